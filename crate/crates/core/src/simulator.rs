//! Monte-Carlo heterodyne outcomes and the covariance acceptance test.
//!
//! Outcomes are stored as real quadrature vectors: row `i` of a sample
//! matrix holds `(x₁, p₁, …, x_d, p_d)` for round `i`. For zero-mean circular
//! Gaussians this carries the same information as the complex outcome.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::keyrate::gaussian_mutual_information;
use crate::state::CovarianceMatrix;

/// `n` independent heterodyne outcomes of `gamma`, drawn from
/// `N(0, ½(Γ + I))` as `z·Lᵀ` with `L` the Cholesky factor. Identical
/// seeds give bit-identical output.
pub fn sample_outcomes(gamma: &CovarianceMatrix, n: usize, seed: u64) -> Result<DMatrix<f64>> {
    if n == 0 {
        return Err(Error::TooFewSamples { found: 0, needed: 1 });
    }
    let chol = gamma
        .outcome_covariance()
        .cholesky()
        .ok_or(Error::Singular("outcome covariance"))?;
    let dim = gamma.matrix().nrows();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let z = DMatrix::<f64>::from_fn(n, dim, |_, _| StandardNormal.sample(&mut rng));
    Ok(z * chol.l().transpose())
}

/// Zero-mean estimator `XᵀX / n`.
pub fn empirical_covariance(samples: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = samples.nrows();
    if n < 2 {
        return Err(Error::TooFewSamples { found: n, needed: 2 });
    }
    let c = samples.tr_mul(samples) / n as f64;
    Ok((&c + c.transpose()) * 0.5)
}

/// Standard error of each entry of the zero-mean estimator at `n` rounds:
/// `√((Σᵢᵢ Σⱼⱼ + Σᵢⱼ²)/n)`.
pub fn standard_errors(reference: &DMatrix<f64>, n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(reference.nrows(), reference.ncols(), |i, j| {
        ((reference[(i, i)] * reference[(j, j)] + reference[(i, j)].powi(2)) / n as f64).sqrt()
    })
}

/// Frobenius ball around the expected outcome covariance.
///
/// Stand-in for an unspecified finite-size test region; it only checks
/// that the observed statistics are those of the assumed channel.
#[derive(Debug, Clone, PartialEq)]
pub struct TestRegion {
    reference: DMatrix<f64>,
    radius: f64,
}

/// Radius of [`TestRegion::calibrated`] in units of the RMS fluctuation.
pub const CALIBRATION_SIGMAS: f64 = 6.0;

impl TestRegion {
    pub fn new(reference: DMatrix<f64>, radius: f64) -> Result<Self> {
        if radius.is_nan() || radius < 0.0 {
            return Err(Error::Parameter {
                name: "radius",
                value: radius,
                expected: "radius >= 0",
            });
        }
        if !reference.is_square() || (&reference - reference.transpose()).amax() > 1e-12 * reference.amax().max(1.0) {
            return Err(Error::Invalid("reference covariance must be symmetric".into()));
        }
        if reference.clone().cholesky().is_none() {
            return Err(Error::Singular("reference covariance"));
        }
        Ok(Self { reference, radius })
    }

    /// Ball of radius `6·√(E‖Ŝ − Σ‖²_F)` at `n` rounds, where for Gaussian
    /// data `E‖Ŝ − Σ‖²_F = ((tr Σ)² + ‖Σ‖²_F)/n`.
    pub fn calibrated(reference: DMatrix<f64>, n: usize) -> Result<Self> {
        let radius = CALIBRATION_SIGMAS * rms_fluctuation(&reference, n);
        Self::new(reference, radius)
    }

    pub fn reference(&self) -> &DMatrix<f64> {
        &self.reference
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

/// `√(((tr Σ)² + ‖Σ‖²_F)/n)`.
pub fn rms_fluctuation(reference: &DMatrix<f64>, n: usize) -> f64 {
    ((reference.trace().powi(2) + reference.norm_squared()) / n as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub seed: u64,
    pub n_rounds: usize,
    pub empirical_covariance: DMatrix<f64>,
    pub test_passed: bool,
    pub max_entry_deviation: f64,
    pub frobenius_deviation: f64,
}

impl RunRecord {
    pub const CSV_HEADER: &'static str = "seed,n,pass,max_deviation,frobenius_deviation";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{:.11e},{:.11e}",
            self.seed, self.n_rounds, self.test_passed, self.max_entry_deviation, self.frobenius_deviation
        )
    }
}

/// Accepts iff `‖Ŝ − Σ‖_F ≤ radius`. `seed` is only recorded.
pub fn run_test(samples: &DMatrix<f64>, region: &TestRegion, seed: u64) -> Result<RunRecord> {
    let emp = empirical_covariance(samples)?;
    if emp.shape() != region.reference.shape() {
        return Err(Error::Dimension {
            expected: region.reference.nrows(),
            found: emp.nrows(),
        });
    }
    let diff = &emp - &region.reference;
    let frobenius_deviation = diff.norm();
    Ok(RunRecord {
        seed,
        n_rounds: samples.nrows(),
        test_passed: frobenius_deviation <= region.radius,
        max_entry_deviation: diff.amax(),
        frobenius_deviation,
        empirical_covariance: emp,
    })
}

/// Gaussian plug-in estimate (bits) of the mutual information between the
/// sample columns `key_cols` and `witness_cols`.
pub fn empirical_mutual_information(samples: &DMatrix<f64>, key_cols: &[usize], witness_cols: &[usize]) -> Result<f64> {
    let cov = empirical_covariance(samples)?;
    if let Some(&c) = key_cols.iter().chain(witness_cols).find(|&&c| c >= cov.nrows()) {
        return Err(Error::ModeIndex { index: c, modes: cov.nrows() });
    }
    gaussian_mutual_information(&cov, key_cols, witness_cols)
}
