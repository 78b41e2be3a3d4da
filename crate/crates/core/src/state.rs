//! Zero-mean Gaussian states described by their covariance matrix.

use nalgebra::{Complex, DMatrix, Matrix2};

use crate::error::{check_range, Error, Result};
use crate::symplectic::{
    self, block, set_block, sigma_z, ModeTag, SymplecticTransform,
};

/// Absolute symmetry tolerance, scaled by the largest entry for big matrices.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Covariance matrix of a zero-mean Gaussian state in shot-noise units
/// (vacuum = identity), together with the `U(n)` tag of every mode.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    matrix: DMatrix<f64>,
    tags: Vec<ModeTag>,
}

impl CovarianceMatrix {
    /// Validates symmetry and the uncertainty principle `Γ + iΩ ⪰ 0`.
    pub fn new(matrix: DMatrix<f64>, tags: Vec<ModeTag>) -> Result<Self> {
        if matrix.nrows() != 2 * tags.len() || matrix.ncols() != 2 * tags.len() {
            return Err(Error::Dimension {
                expected: 2 * tags.len(),
                found: matrix.nrows(),
            });
        }
        let scale = matrix.amax().max(1.0);
        let asym = (&matrix - matrix.transpose()).amax();
        if asym.is_nan() || asym > SYMMETRY_TOL * scale {
            return Err(Error::Invalid(format!(
                "covariance matrix not symmetric (max |Γ − Γᵀ| = {asym:.3e})"
            )));
        }
        symplectic::symplectic_eigenvalues(&matrix)?;
        Ok(Self { matrix, tags })
    }

    /// For outputs of physical operations on valid states; only symmetrizes
    /// away rounding.
    pub(crate) fn from_trusted(matrix: DMatrix<f64>, tags: Vec<ModeTag>) -> Self {
        debug_assert_eq!(matrix.nrows(), 2 * tags.len());
        let matrix = (&matrix + matrix.transpose()) * 0.5;
        Self { matrix, tags }
    }

    /// `d`-mode vacuum, all modes tagged `U`.
    pub fn vacuum(modes: usize) -> Self {
        Self {
            matrix: DMatrix::identity(2 * modes, 2 * modes),
            tags: vec![ModeTag::U; modes],
        }
    }

    /// Single-mode thermal state `v·I₂`, `v ≥ 1`.
    pub fn thermal(v: f64, tag: ModeTag) -> Result<Self> {
        check_range("v", v, 1.0, f64::INFINITY, "variance >= 1")?;
        Ok(Self {
            matrix: DMatrix::identity(2, 2) * v,
            tags: vec![tag],
        })
    }

    /// Two-mode squeezed vacuum `[[V·I, √(V²−1)·σz], [√(V²−1)·σz, V·I]]`.
    pub fn tmss(v: f64, tags: (ModeTag, ModeTag)) -> Result<Self> {
        check_range("V", v, 1.0, f64::INFINITY, "variance >= 1")?;
        let c = (v * v - 1.0).sqrt();
        let mut m = DMatrix::zeros(4, 4);
        let diag = Matrix2::identity() * v;
        let off = sigma_z() * c;
        set_block(&mut m, 0, 0, &diag);
        set_block(&mut m, 1, 1, &diag);
        set_block(&mut m, 0, 1, &off);
        set_block(&mut m, 1, 0, &off);
        Ok(Self {
            matrix: m,
            tags: vec![tags.0, tags.1],
        })
    }

    pub fn num_modes(&self) -> usize {
        self.tags.len()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn tags(&self) -> &[ModeTag] {
        &self.tags
    }

    /// The 2×2 block coupling modes `i` and `j`.
    pub fn block(&self, i: usize, j: usize) -> Matrix2<f64> {
        block(&self.matrix, i, j)
    }

    pub fn with_tags(mut self, tags: Vec<ModeTag>) -> Result<Self> {
        if tags.len() != self.tags.len() {
            return Err(Error::Dimension {
                expected: self.tags.len(),
                found: tags.len(),
            });
        }
        self.tags = tags;
        Ok(self)
    }

    /// Tensor product: `self ⊕ other` on the covariance level.
    pub fn tensor(&self, other: &Self) -> Self {
        let (a, b) = (self.matrix.nrows(), other.matrix.nrows());
        let mut m = DMatrix::zeros(a + b, a + b);
        m.view_mut((0, 0), (a, a)).copy_from(&self.matrix);
        m.view_mut((a, a), (b, b)).copy_from(&other.matrix);
        let tags = self.tags.iter().chain(&other.tags).copied().collect();
        Self { matrix: m, tags }
    }

    /// `Γ → SΓSᵀ`; tags are unchanged.
    pub fn apply(&self, s: &SymplecticTransform) -> Result<Self> {
        let m = s.conjugate(&self.matrix)?;
        Ok(Self::from_trusted(m, self.tags.clone()))
    }

    /// Marginal on `modes`, in the given order.
    pub fn select(&self, modes: &[usize]) -> Result<Self> {
        let d = self.num_modes();
        if let Some(&index) = modes.iter().find(|&&k| k >= d) {
            return Err(Error::ModeIndex { index, modes: d });
        }
        let idx = quadrature_indices(modes);
        let m = DMatrix::from_fn(idx.len(), idx.len(), |r, c| self.matrix[(idx[r], idx[c])]);
        let tags = modes.iter().map(|&k| self.tags[k]).collect();
        Ok(Self { matrix: m, tags })
    }

    pub fn symplectic_eigenvalues(&self) -> Result<Vec<f64>> {
        symplectic::symplectic_eigenvalues(&self.matrix)
    }

    /// Covariance of the remaining modes after heterodyning `measured`.
    ///
    /// Applies `B − Cᵀ(A + I)⁻¹C` one measured mode at a time; the result does
    /// not depend on the outcomes.
    pub fn heterodyne_condition(&self, measured: &[usize]) -> Result<Self> {
        let d = self.num_modes();
        check_measured(measured, d)?;
        let mut state = self.clone();
        // Track where each original mode currently sits.
        let mut position: Vec<Option<usize>> = (0..d).map(Some).collect();
        for &m in measured {
            let p = position[m].expect("duplicate modes rejected above");
            state = state.condition_single(p)?;
            position[m] = None;
            for slot in position.iter_mut().flatten() {
                if *slot > p {
                    *slot -= 1;
                }
            }
        }
        Ok(state)
    }

    /// Same result as [`Self::heterodyne_condition`], computed with a single
    /// joint Schur complement over all measured modes.
    pub fn heterodyne_condition_joint(&self, measured: &[usize]) -> Result<Self> {
        let d = self.num_modes();
        check_measured(measured, d)?;
        let kept: Vec<usize> = (0..d).filter(|k| !measured.contains(k)).collect();
        let mi = quadrature_indices(measured);
        let ki = quadrature_indices(&kept);
        let a = DMatrix::from_fn(mi.len(), mi.len(), |r, c| self.matrix[(mi[r], mi[c])]);
        let b = DMatrix::from_fn(ki.len(), ki.len(), |r, c| self.matrix[(ki[r], ki[c])]);
        let c = DMatrix::from_fn(mi.len(), ki.len(), |r, col| self.matrix[(mi[r], ki[col])]);
        let shifted = a + DMatrix::identity(mi.len(), mi.len());
        let chol = shifted
            .cholesky()
            .ok_or(Error::Singular("A + I in heterodyne conditioning"))?;
        let cond = b - c.transpose() * chol.solve(&c);
        let tags = kept.iter().map(|&k| self.tags[k]).collect();
        Ok(Self::from_trusted(cond, tags))
    }

    fn condition_single(&self, mode: usize) -> Result<Self> {
        let d = self.num_modes();
        let a = block(&self.matrix, mode, mode) + Matrix2::identity();
        let a_inv = a
            .try_inverse()
            .ok_or(Error::Singular("A + I in heterodyne conditioning"))?;
        let kept: Vec<usize> = (0..d).filter(|&k| k != mode).collect();
        let mut out = DMatrix::zeros(2 * kept.len(), 2 * kept.len());
        for (r, &i) in kept.iter().enumerate() {
            let ci = block(&self.matrix, mode, i);
            for (c, &j) in kept.iter().enumerate() {
                let cj = block(&self.matrix, mode, j);
                let b = block(&self.matrix, i, j) - ci.transpose() * a_inv * cj;
                set_block(&mut out, r, c, &b);
            }
        }
        let tags = kept.iter().map(|&k| self.tags[k]).collect();
        Ok(Self::from_trusted(out, tags))
    }

    /// Covariance of the heterodyne outcomes of every mode, `½(Γ + I)`.
    pub fn outcome_covariance(&self) -> DMatrix<f64> {
        let n = self.matrix.nrows();
        (&self.matrix + DMatrix::identity(n, n)) * 0.5
    }
}

fn check_measured(measured: &[usize], modes: usize) -> Result<()> {
    if measured.is_empty() || measured.len() >= modes {
        return Err(Error::Invalid(format!(
            "heterodyne set must be a nonempty proper subset of {modes} modes, got {} modes",
            measured.len()
        )));
    }
    for (k, &m) in measured.iter().enumerate() {
        if m >= modes {
            return Err(Error::ModeIndex { index: m, modes });
        }
        if measured[..k].contains(&m) {
            return Err(Error::Invalid(format!("mode {m} listed twice")));
        }
    }
    Ok(())
}

/// `[2k, 2k+1]` for every mode `k`, in order.
pub fn quadrature_indices(modes: &[usize]) -> Vec<usize> {
    modes.iter().flat_map(|&k| [2 * k, 2 * k + 1]).collect()
}

/// Strictly contractive complex `m × m` matrix, `‖Λ‖ < 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaMatrix {
    matrix: DMatrix<Complex<f64>>,
}

impl LambdaMatrix {
    /// Margin below 1 required of the largest singular value.
    pub const MARGIN: f64 = 1e-12;

    pub fn new(matrix: DMatrix<Complex<f64>>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
            return Err(Error::Dimension {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        let norm = spectral_norm(&matrix);
        if norm.is_nan() || norm >= 1.0 - Self::MARGIN {
            return Err(Error::Parameter {
                name: "‖Λ‖",
                value: norm,
                expected: "spectral norm < 1",
            });
        }
        Ok(Self { matrix })
    }

    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex<f64>> {
        &self.matrix
    }

    pub fn spectral_norm(&self) -> f64 {
        spectral_norm(&self.matrix)
    }
}

fn spectral_norm(m: &DMatrix<Complex<f64>>) -> f64 {
    m.singular_values().max()
}

/// Covariance matrix of the `SU(m,m)` coherent state
/// `|Λ⟩ ∝ exp(Σᵢⱼ Λᵢⱼ aᵢ† bⱼ†)|0⟩` on modes `(a₁…a_m, b₁…b_m)`.
///
/// With `Λ = W·diag(λ)·Vᵀ` the state is a product of TMSS pairs with
/// `V_k = (1+λ_k²)/(1−λ_k²)` in the modes `a′ = W†a`, `b′ = V†b`. The
/// physical quadrature map of `a = Wa′` is `realify(W̄)` in the rotation
/// convention of [`crate::symplectic::rotation_block`].
pub fn su_mm_coherent_state(
    lambda: &LambdaMatrix,
    tags_a: &[ModeTag],
    tags_b: &[ModeTag],
) -> Result<CovarianceMatrix> {
    let m = lambda.size();
    if tags_a.len() != m || tags_b.len() != m {
        return Err(Error::Dimension {
            expected: m,
            found: tags_a.len().min(tags_b.len()),
        });
    }
    let svd = lambda.matrix().clone().svd(true, true);
    let w = svd.u.expect("requested U");
    // nalgebra returns Λ = W Σ V^*; the decomposition above uses V^T.
    let v = svd.v_t.expect("requested V^*").transpose();

    let mut primed = DMatrix::zeros(4 * m, 4 * m);
    for (k, &lam) in svd.singular_values.iter().enumerate() {
        let l2 = lam * lam;
        let var = (1.0 + l2) / (1.0 - l2);
        let corr = 2.0 * lam / (1.0 - l2);
        set_block(&mut primed, k, k, &(Matrix2::identity() * var));
        set_block(&mut primed, m + k, m + k, &(Matrix2::identity() * var));
        set_block(&mut primed, k, m + k, &(sigma_z() * corr));
        set_block(&mut primed, m + k, k, &(sigma_z() * corr));
    }

    let ra = SymplecticTransform::realify_unitary(&w, ModeTag::Ubar)?;
    let rb = SymplecticTransform::realify_unitary(&v, ModeTag::Ubar)?;
    let gamma = ra.direct_sum(&rb).conjugate(&primed)?;
    let tags = tags_a.iter().chain(tags_b).copied().collect();
    Ok(CovarianceMatrix::from_trusted(gamma, tags))
}
