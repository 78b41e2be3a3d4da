//! Numerical checks of the `U(n)` covariance of protocol states.
//!
//! A state with tags `(t₁, …, t_d)` is covariant if, for every unitary `U`
//! acting on the `n` round-copies of each mode (as `U` on `U`-tagged modes
//! and `Ū` on `Ū`-tagged ones), the `n`-round covariance `Γ^{⊕n}` is
//! unchanged. Copies are ordered round-major: mode `k` of round `r` is
//! mode `r·d + k` of the lifted system.

use nalgebra::{Complex, DMatrix, Matrix2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::state::CovarianceMatrix;
use crate::symplectic::{complex_block, set_block, sigma_z, ModeTag, SymplecticTransform};

pub const PHASE_TOL: f64 = 1e-10;
pub const MULTICOPY_TOL: f64 = 1e-9;
pub const COMMUTATION_TOL: f64 = 1e-10;
pub const BLOCK_TOL: f64 = 1e-10;

/// Outcome of one sampled invariance check.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryReport {
    pub check: &'static str,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Seed of the sampled group elements, when any were random.
    pub seed: Option<u64>,
    pub samples: usize,
}

impl SymmetryReport {
    fn new(check: &'static str, max_deviation: f64, tolerance: f64, seed: Option<u64>, samples: usize) -> Self {
        Self {
            check,
            max_deviation,
            tolerance,
            // NaN fails.
            passed: max_deviation <= tolerance,
            seed,
            samples,
        }
    }
}

/// Haar-random `n × n` unitary: QR of a complex Gaussian matrix with the
/// phases of `R`'s diagonal moved into `Q`.
pub fn random_unitary<R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<Complex<f64>> {
    let z = DMatrix::from_fn(n, n, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex::new(re, im)
    });
    let qr = z.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for c in 0..n {
        let d = r[(c, c)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex::new(1.0, 0.0) };
        for row in 0..n {
            q[(row, c)] *= phase;
        }
    }
    q
}

/// Realified action of `u` on `n = u.nrows()` copies of a system whose
/// modes carry `tags`, in round-major order.
pub fn lift_unitary(u: &DMatrix<Complex<f64>>, tags: &[ModeTag]) -> Result<SymplecticTransform> {
    let n = u.nrows();
    if u.ncols() != n {
        return Err(Error::Dimension { expected: n, found: u.ncols() });
    }
    let d = tags.len();
    let mut m = DMatrix::zeros(2 * n * d, 2 * n * d);
    for r in 0..n {
        for s in 0..n {
            for (k, tag) in tags.iter().enumerate() {
                let z = match tag {
                    ModeTag::U => u[(r, s)],
                    ModeTag::Ubar => u[(r, s)].conj(),
                };
                set_block(&mut m, r * d + k, s * d + k, &complex_block(z));
            }
        }
    }
    SymplecticTransform::from_matrix(m)
}

/// Block-diagonal covariance of `copies` independent rounds.
pub fn repeat_rounds(gamma: &CovarianceMatrix, copies: usize) -> CovarianceMatrix {
    (1..copies).fold(gamma.clone(), |acc, _| acc.tensor(gamma))
}

/// Same state with the tag of `mode` flipped; a covariant state becomes
/// non-covariant whenever that mode is correlated with another.
pub fn mistag(gamma: &CovarianceMatrix, mode: usize) -> Result<CovarianceMatrix> {
    let mut tags = gamma.tags().to_vec();
    let d = tags.len();
    let t = tags.get_mut(mode).ok_or(Error::ModeIndex { index: mode, modes: d })?;
    *t = t.flipped();
    gamma.clone().with_tags(tags)
}

fn invariance_deviation(gamma: &DMatrix<f64>, s: &SymplecticTransform) -> Result<f64> {
    Ok((s.conjugate(gamma)? - gamma).norm())
}

/// `max_θ ‖R(θ) Γ R(θ)ᵀ − Γ‖_F`, where `R(θ)` rotates each mode by `±θ`
/// according to its tag.
pub fn check_phase_invariance(gamma: &CovarianceMatrix, thetas: &[f64]) -> Result<SymmetryReport> {
    let devs: Vec<f64> = thetas
        .par_iter()
        .map(|&t| invariance_deviation(gamma.matrix(), &SymplecticTransform::tagged_rotation(t, gamma.tags())))
        .collect::<Result<_>>()?;
    let max = devs.into_iter().fold(0.0, f64::max);
    Ok(SymmetryReport::new("phase", max, PHASE_TOL, None, thetas.len()))
}

/// Invariance of `Γ^{⊕n}` under the lifted action of one unitary `u`.
pub fn check_multicopy_invariance(gamma: &CovarianceMatrix, u: &DMatrix<Complex<f64>>) -> Result<SymmetryReport> {
    let n = u.nrows();
    if n < 1 {
        return Err(Error::Invalid("need at least one copy".into()));
    }
    let big = repeat_rounds(gamma, n);
    let s = lift_unitary(u, gamma.tags())?;
    let dev = invariance_deviation(big.matrix(), &s)?;
    Ok(SymmetryReport::new("multicopy", dev, MULTICOPY_TOL, None, 1))
}

/// [`check_multicopy_invariance`] over `samples` Haar-random unitaries
/// drawn from `seed`.
pub fn multicopy_suite(gamma: &CovarianceMatrix, copies: usize, samples: usize, seed: u64) -> Result<SymmetryReport> {
    if copies < 1 {
        return Err(Error::Invalid("need at least one copy".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let us: Vec<_> = (0..samples).map(|_| random_unitary(copies, &mut rng)).collect();
    let devs: Vec<f64> = us
        .par_iter()
        .map(|u| check_multicopy_invariance(gamma, u).map(|r| r.max_deviation))
        .collect::<Result<_>>()?;
    let max = devs.into_iter().fold(0.0, f64::max);
    Ok(SymmetryReport::new("multicopy", max, MULTICOPY_TOL, Some(seed), samples))
}

/// Deviation of every 2×2 block from the form forced by the tags:
/// `a·I₂` between equally tagged modes, `a·σz` between opposite ones.
pub fn check_block_structure(gamma: &CovarianceMatrix) -> SymmetryReport {
    let tags = gamma.tags();
    let mut max: f64 = 0.0;
    for i in 0..tags.len() {
        for j in 0..tags.len() {
            let b = gamma.block(i, j);
            let template = if tags[i] == tags[j] { Matrix2::identity() } else { sigma_z() };
            // Project onto the template, then measure the remainder.
            let a = 0.5 * b.component_mul(&template).sum();
            max = max.max((b - template * a).amax());
        }
    }
    SymmetryReport::new("block-structure", max, BLOCK_TOL, None, 1)
}

/// Commutators of the two-mode primitives with the lifted `U(n)` action.
#[derive(Debug, Clone, PartialEq)]
pub struct CommutationReport {
    /// `[S(g)^{⊕n}, U ⊗ Ū]`; should vanish.
    pub squeezer: SymmetryReport,
    /// `[B(t)^{⊕n}, U ⊗ U]`; should vanish.
    pub beamsplitter: SymmetryReport,
    /// `[S(g)^{⊕n}, U ⊗ U]`; a positive control that should not vanish.
    pub wrong_pairing: SymmetryReport,
}

impl CommutationReport {
    pub fn passed(&self) -> bool {
        self.squeezer.passed && self.beamsplitter.passed && !self.wrong_pairing.passed
    }
}

fn commutator_norm(a: &SymplecticTransform, b: &SymplecticTransform) -> f64 {
    (a.matrix() * b.matrix() - b.matrix() * a.matrix()).norm()
}

/// Samples `samples` triples `(U, g, t)` with `g ∈ [1, 5]`, `t ∈ [0, 1]`.
pub fn check_primitive_commutation(copies: usize, samples: usize, seed: u64) -> Result<CommutationReport> {
    if copies < 1 {
        return Err(Error::Invalid("need at least one copy".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g_dist = Uniform::new_inclusive(1.0, 5.0).expect("valid range");
    let t_dist = Uniform::new_inclusive(0.0, 1.0).expect("valid range");
    let draws: Vec<_> = (0..samples)
        .map(|_| (random_unitary(copies, &mut rng), g_dist.sample(&mut rng), t_dist.sample(&mut rng)))
        .collect();

    let rows: Vec<(f64, f64, f64)> = draws
        .par_iter()
        .map(|(u, g, t)| -> Result<_> {
            let s = SymplecticTransform::two_mode_squeezer(*g, (0, 1), 2)?.repeated(copies);
            let b = SymplecticTransform::beamsplitter(*t, (0, 1), 2)?.repeated(copies);
            let u_ubar = lift_unitary(u, &[ModeTag::U, ModeTag::Ubar])?;
            let u_u = lift_unitary(u, &[ModeTag::U, ModeTag::U])?;
            Ok((commutator_norm(&s, &u_ubar), commutator_norm(&b, &u_u), commutator_norm(&s, &u_u)))
        })
        .collect::<Result<_>>()?;

    let max = |f: fn(&(f64, f64, f64)) -> f64| rows.iter().map(f).fold(0.0, f64::max);
    // The control must fail on every draw, so report its smallest commutator.
    let control = rows.iter().map(|r| r.2).fold(f64::INFINITY, f64::min);
    Ok(CommutationReport {
        squeezer: SymmetryReport::new("squeezer-commutation", max(|r| r.0), COMMUTATION_TOL, Some(seed), samples),
        beamsplitter: SymmetryReport::new("beamsplitter-commutation", max(|r| r.1), COMMUTATION_TOL, Some(seed), samples),
        wrong_pairing: SymmetryReport::new("wrong-pairing-control", control, COMMUTATION_TOL, Some(seed), samples),
    })
}
