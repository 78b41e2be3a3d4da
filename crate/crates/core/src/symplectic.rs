//! Real symplectic linear algebra in the interleaved quadrature basis
//! `(x₁, p₁, x₂, p₂, …)`, with `x = a + a†` and `p = −i(a − a†)` so that
//! the vacuum covariance is the identity.

use std::ops::Mul;

use nalgebra::{Complex, DMatrix, Matrix2};

use crate::error::{check_range, Error, Result};

/// Tolerance on `‖SΩSᵀ − Ω‖_F` for a matrix to count as symplectic.
pub const SYMPLECTIC_TOL: f64 = 1e-10;

/// Symplectic eigenvalues in `[1 − EIGEN_CLAMP, 1)` are rounded up to 1.
pub const EIGEN_CLAMP: f64 = 1e-8;

/// Tolerance on `‖U†U − I‖_F` accepted by [`SymplecticTransform::realify_unitary`].
pub const UNITARY_TOL: f64 = 1e-10;

/// How a mode transforms under the `U(n)` action: by `U` itself or by its
/// complex conjugate `Ū`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModeTag {
    U,
    Ubar,
}

impl ModeTag {
    pub fn flipped(self) -> Self {
        match self {
            ModeTag::U => ModeTag::Ubar,
            ModeTag::Ubar => ModeTag::U,
        }
    }

    /// Rotation angle applied to a mode with this tag when the group element
    /// is the phase `e^{iθ}`.
    pub fn signed_angle(self, theta: f64) -> f64 {
        match self {
            ModeTag::U => theta,
            ModeTag::Ubar => -theta,
        }
    }
}

pub fn sigma_z() -> Matrix2<f64> {
    Matrix2::new(1.0, 0.0, 0.0, -1.0)
}

/// Rotation block `[[cos θ, sin θ], [−sin θ, cos θ]]`: the image of `e^{iθ}`.
pub fn rotation_block(theta: f64) -> Matrix2<f64> {
    let (s, c) = theta.sin_cos();
    Matrix2::new(c, s, -s, c)
}

/// Realification of one complex entry, consistent with [`rotation_block`].
/// The map `z ↦ [[Re z, Im z], [−Im z, Re z]]` is a ring homomorphism.
pub fn complex_block(z: Complex<f64>) -> Matrix2<f64> {
    Matrix2::new(z.re, z.im, -z.im, z.re)
}

/// The symplectic form `Ω = ⊕ [[0, 1], [−1, 0]]` on `modes` modes.
pub fn symplectic_form(modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * modes, 2 * modes);
    for k in 0..modes {
        omega[(2 * k, 2 * k + 1)] = 1.0;
        omega[(2 * k + 1, 2 * k)] = -1.0;
    }
    omega
}

/// `‖MΩMᵀ − Ω‖_F`.
pub fn symplectic_deviation(m: &DMatrix<f64>) -> f64 {
    let omega = symplectic_form(m.nrows() / 2);
    (m * &omega * m.transpose() - omega).norm()
}

pub(crate) fn set_block(m: &mut DMatrix<f64>, row_mode: usize, col_mode: usize, b: &Matrix2<f64>) {
    m.view_mut((2 * row_mode, 2 * col_mode), (2, 2)).copy_from(b);
}

pub(crate) fn block(m: &DMatrix<f64>, row_mode: usize, col_mode: usize) -> Matrix2<f64> {
    m.fixed_view::<2, 2>(2 * row_mode, 2 * col_mode).into_owned()
}

fn check_square_even(m: &DMatrix<f64>) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::Dimension {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    if m.nrows() == 0 || !m.nrows().is_multiple_of(2) {
        return Err(Error::Invalid(format!(
            "phase-space matrix must have positive even dimension, got {}",
            m.nrows()
        )));
    }
    Ok(m.nrows() / 2)
}

fn check_pair(i: usize, j: usize, modes: usize) -> Result<()> {
    for index in [i, j] {
        if index >= modes {
            return Err(Error::ModeIndex { index, modes });
        }
    }
    if i == j {
        return Err(Error::Invalid(format!("two-mode operation needs distinct modes, got ({i}, {j})")));
    }
    Ok(())
}

/// A real `2d × 2d` matrix `S` with `SΩSᵀ = Ω`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticTransform {
    matrix: DMatrix<f64>,
}

impl SymplecticTransform {
    /// Validates that `matrix` is square, even-dimensional and symplectic.
    pub fn from_matrix(matrix: DMatrix<f64>) -> Result<Self> {
        check_square_even(&matrix)?;
        let dev = symplectic_deviation(&matrix);
        if dev.is_nan() || dev > SYMPLECTIC_TOL {
            return Err(Error::Invalid(format!(
                "matrix is not symplectic (‖SΩSᵀ − Ω‖ = {dev:.3e})"
            )));
        }
        Ok(Self { matrix })
    }

    pub fn identity(modes: usize) -> Self {
        Self {
            matrix: DMatrix::identity(2 * modes, 2 * modes),
        }
    }

    /// Identity on `modes` modes except for the 4×4 block acting on `(i, j)`,
    /// given as its four 2×2 sub-blocks `[[ii, ij], [ji, jj]]`.
    fn two_mode(modes: usize, i: usize, j: usize, blocks: [[Matrix2<f64>; 2]; 2]) -> Self {
        let mut m = DMatrix::identity(2 * modes, 2 * modes);
        set_block(&mut m, i, i, &blocks[0][0]);
        set_block(&mut m, i, j, &blocks[0][1]);
        set_block(&mut m, j, i, &blocks[1][0]);
        set_block(&mut m, j, j, &blocks[1][1]);
        Self { matrix: m }
    }

    /// Beamsplitter of transmittance `t` on modes `(i, j)`:
    /// `[[√t·I, −√(1−t)·I], [√(1−t)·I, √t·I]]`.
    pub fn beamsplitter(t: f64, modes: (usize, usize), num_modes: usize) -> Result<Self> {
        check_range("t", t, 0.0, 1.0, "transmittance in [0, 1]")?;
        check_pair(modes.0, modes.1, num_modes)?;
        let id = Matrix2::identity();
        let (st, sr) = (t.sqrt(), (1.0 - t).sqrt());
        Ok(Self::two_mode(
            num_modes,
            modes.0,
            modes.1,
            [[id * st, id * -sr], [id * sr, id * st]],
        ))
    }

    /// Two-mode squeezer of gain `g ≥ 1` on modes `(i, j)`:
    /// `[[√g·I, √(g−1)·σz], [√(g−1)·σz, √g·I]]`.
    pub fn two_mode_squeezer(g: f64, modes: (usize, usize), num_modes: usize) -> Result<Self> {
        Self::signed_squeezer(g, 1.0, modes, num_modes)
    }

    /// Squeezer with the opposite coupling sign, `[[√g·I, −√(g−1)·σz], …]`.
    /// This is the operation Alice applies at the end of the two-way circuit.
    pub fn two_mode_squeezer_neg(g: f64, modes: (usize, usize), num_modes: usize) -> Result<Self> {
        Self::signed_squeezer(g, -1.0, modes, num_modes)
    }

    fn signed_squeezer(g: f64, sign: f64, modes: (usize, usize), num_modes: usize) -> Result<Self> {
        check_range("g", g, 1.0, f64::INFINITY, "gain >= 1")?;
        check_pair(modes.0, modes.1, num_modes)?;
        let id = Matrix2::identity();
        let coupling = sigma_z() * (sign * (g - 1.0).sqrt());
        let diag = id * g.sqrt();
        Ok(Self::two_mode(
            num_modes,
            modes.0,
            modes.1,
            [[diag, coupling], [coupling, diag]],
        ))
    }

    /// Phase rotation `[[cos θ, sin θ], [−sin θ, cos θ]]` on mode `mode`.
    pub fn phase_rotation(theta: f64, mode: usize, num_modes: usize) -> Result<Self> {
        if mode >= num_modes {
            return Err(Error::ModeIndex {
                index: mode,
                modes: num_modes,
            });
        }
        let mut m = DMatrix::identity(2 * num_modes, 2 * num_modes);
        set_block(&mut m, mode, mode, &rotation_block(theta));
        Ok(Self { matrix: m })
    }

    /// Phase rotations on every mode at once, `θ` on `U` modes and `−θ` on
    /// `Ū` modes: the single-copy image of `e^{iθ}`.
    pub fn tagged_rotation(theta: f64, tags: &[ModeTag]) -> Self {
        let d = tags.len();
        let mut m = DMatrix::zeros(2 * d, 2 * d);
        for (k, tag) in tags.iter().enumerate() {
            set_block(&mut m, k, k, &rotation_block(tag.signed_angle(theta)));
        }
        Self { matrix: m }
    }

    /// Real `2n × 2n` orthogonal symplectic image of an `n × n` unitary,
    /// acting as `U` (tag `U`) or `Ū` (tag `Ubar`) on `n` modes.
    pub fn realify_unitary(u: &DMatrix<Complex<f64>>, tag: ModeTag) -> Result<Self> {
        let n = u.nrows();
        if u.ncols() != n {
            return Err(Error::Dimension {
                expected: n,
                found: u.ncols(),
            });
        }
        let deviation = unitary_deviation(u);
        if deviation.is_nan() || deviation > UNITARY_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                let z = match tag {
                    ModeTag::U => u[(r, c)],
                    ModeTag::Ubar => u[(r, c)].conj(),
                };
                set_block(&mut m, r, c, &complex_block(z));
            }
        }
        Ok(Self { matrix: m })
    }

    /// Block-diagonal `self ⊕ other`, with `other`'s modes appended.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let (a, b) = (self.matrix.nrows(), other.matrix.nrows());
        let mut m = DMatrix::zeros(a + b, a + b);
        m.view_mut((0, 0), (a, a)).copy_from(&self.matrix);
        m.view_mut((a, a), (b, b)).copy_from(&other.matrix);
        Self { matrix: m }
    }

    /// `self` repeated `copies` times on the diagonal.
    pub fn repeated(&self, copies: usize) -> Self {
        (1..copies).fold(self.clone(), |acc, _| acc.direct_sum(self))
    }

    /// `self · other`, i.e. `other` is applied first.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.matrix.nrows() != other.matrix.nrows() {
            return Err(Error::Dimension {
                expected: self.matrix.nrows(),
                found: other.matrix.nrows(),
            });
        }
        Ok(Self {
            matrix: &self.matrix * &other.matrix,
        })
    }

    /// Conjugates `gamma`: returns `S Γ Sᵀ`.
    pub fn conjugate(&self, gamma: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if gamma.nrows() != self.matrix.nrows() || gamma.ncols() != self.matrix.ncols() {
            return Err(Error::Dimension {
                expected: self.matrix.nrows(),
                found: gamma.nrows(),
            });
        }
        Ok(&self.matrix * gamma * self.matrix.transpose())
    }

    pub fn num_modes(&self) -> usize {
        self.matrix.nrows() / 2
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    pub fn deviation(&self) -> f64 {
        symplectic_deviation(&self.matrix)
    }
}

impl Mul for &SymplecticTransform {
    type Output = SymplecticTransform;

    /// # Panics
    /// If the two transforms act on different numbers of modes.
    fn mul(self, rhs: &SymplecticTransform) -> SymplecticTransform {
        self.compose(rhs).expect("mode count mismatch in symplectic product")
    }
}

/// `‖U†U − I‖_F`.
pub fn unitary_deviation(u: &DMatrix<Complex<f64>>) -> f64 {
    let n = u.nrows();
    (u.adjoint() * u - DMatrix::<Complex<f64>>::identity(n, n)).norm()
}

/// Symplectic spectrum of a covariance matrix, sorted ascending.
///
/// With `Γ = LLᵀ`, the antisymmetric `A = LᵀΩL` is similar to `ΩΓ`, so the
/// Hermitian `iA` has eigenvalues `±ν`. Only a Cholesky factorization and a
/// Hermitian eigensolver are needed, both of which converge on degenerate
/// spectra.
///
/// Values within [`EIGEN_CLAMP`] below 1 are clamped to 1; anything lower,
/// or a Γ that is not positive definite, violates the uncertainty principle.
pub fn symplectic_eigenvalues(gamma: &DMatrix<f64>) -> Result<Vec<f64>> {
    let d = check_square_even(gamma)?;
    if gamma.iter().any(|v| !v.is_finite()) {
        return Err(Error::Invalid("non-finite covariance entries".into()));
    }
    let sym = (gamma + gamma.transpose()) * 0.5;
    let l = match sym.cholesky() {
        Some(c) => c.unpack(),
        None => return Err(Error::Unphysical { value: 0.0 }),
    };
    let a = l.transpose() * symplectic_form(d) * &l;
    let ia = DMatrix::from_fn(2 * d, 2 * d, |r, c| Complex::new(0.0, 0.5 * (a[(r, c)] - a[(c, r)])));
    let mut moduli: Vec<f64> = ia.symmetric_eigenvalues().iter().map(|v| v.abs()).collect();
    moduli.sort_by(f64::total_cmp);

    moduli
        .chunks_exact(2)
        .map(|pair| {
            let nu = 0.5 * (pair[0] + pair[1]);
            if nu >= 1.0 {
                Ok(nu)
            } else if nu >= 1.0 - EIGEN_CLAMP {
                Ok(1.0)
            } else {
                Err(Error::Unphysical { value: nu })
            }
        })
        .collect()
}
