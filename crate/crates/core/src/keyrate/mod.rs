//! Asymptotic Devetak–Winter key rates with reverse reconciliation on
//! Alice's heterodyne outcome. All information quantities are in bits.

mod optimize;
mod threshold;

pub use optimize::{optimize_rate, Bounds, Optimum, OptimizerConfig, Protocol};
pub use threshold::{noise_threshold, Threshold};

use nalgebra::DMatrix;

use crate::channel::ChannelParams;
use crate::error::{check_range, Error, Result};
use crate::protocol::{ProtocolState, TwoWayParams};
use crate::state::quadrature_indices;
use crate::symplectic::EIGEN_CLAMP;

/// Von Neumann entropy (bits) of a thermal mode with symplectic eigenvalue
/// `x`: `((x+1)/2)·log₂((x+1)/2) − ((x−1)/2)·log₂((x−1)/2)`, with `g(1) = 0`.
pub fn g_entropy(x: f64) -> Result<f64> {
    if x.is_nan() || x < 1.0 - EIGEN_CLAMP {
        return Err(Error::EntropyDomain(x));
    }
    if x <= 1.0 {
        return Ok(0.0);
    }
    let plus = 0.5 * (x + 1.0);
    let minus = 0.5 * (x - 1.0);
    let minus_term = if minus > 0.0 { minus * minus.log2() } else { 0.0 };
    Ok(plus * plus.log2() - minus_term)
}

fn entropy_sum(spectrum: &[f64]) -> Result<f64> {
    spectrum.iter().map(|&nu| g_entropy(nu)).sum()
}

fn log_det_spd(m: &DMatrix<f64>) -> Result<f64> {
    let chol = m
        .clone()
        .cholesky()
        .ok_or(Error::Singular("covariance block in mutual information"))?;
    Ok(2.0 * chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>())
}

fn sub_matrix(m: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(idx.len(), idx.len(), |r, c| m[(idx[r], idx[c])])
}

/// Mutual information (bits) between the Gaussian variables at row/column
/// indices `a` and `b` of the real covariance `cov`:
/// `½·log₂(det Σ_a · det Σ_b / det Σ_ab)`.
///
/// With every 2×2 mode block proportional to `I₂` or `σz`, the factor ½
/// turns the real determinants into the per-complex-mode form.
pub fn gaussian_mutual_information(cov: &DMatrix<f64>, a: &[usize], b: &[usize]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Ok(0.0);
    }
    let joint: Vec<usize> = a.iter().chain(b).copied().collect();
    let la = log_det_spd(&sub_matrix(cov, a))?;
    let lb = log_det_spd(&sub_matrix(cov, b))?;
    let lab = log_det_spd(&sub_matrix(cov, &joint))?;
    Ok(0.5 * (la + lb - lab) / std::f64::consts::LN_2)
}

/// `I(X_key; witnesses)` from the outcome covariance `½(Γ + I)`, after
/// rescaling each witness by its scale factor. Zero-scale witnesses are
/// dropped.
pub fn mutual_information(state: &ProtocolState) -> Result<f64> {
    let key = state.key_map().ok_or(Error::NoKeyMap)?;
    let mut cov = state.gamma().outcome_covariance();
    let mut kept = Vec::new();
    for w in &key.witnesses {
        if w.scale == 0.0 {
            continue;
        }
        for q in [2 * w.mode, 2 * w.mode + 1] {
            cov.row_mut(q).scale_mut(w.scale);
            cov.column_mut(q).scale_mut(w.scale);
        }
        kept.push(w.mode);
    }
    gaussian_mutual_information(
        &cov,
        &quadrature_indices(&[key.key_mode]),
        &quadrature_indices(&kept),
    )
}

/// Holevo bound `χ(X_key; E) = S(Γ) − S(Γ | X_key)` for a purified
/// eavesdropper, returned with the two symplectic spectra used.
pub fn holevo_with_spectra(state: &ProtocolState) -> Result<(f64, Vec<f64>, Vec<f64>)> {
    let key = state.key_map().ok_or(Error::NoKeyMap)?;
    let full = state.gamma().symplectic_eigenvalues()?;
    let cond = state
        .gamma()
        .heterodyne_condition(&[key.key_mode])?
        .symplectic_eigenvalues()?;
    let chi = entropy_sum(&full)? - entropy_sum(&cond)?;
    Ok((chi, full, cond))
}

pub fn holevo(state: &ProtocolState) -> Result<f64> {
    holevo_with_spectra(state).map(|(chi, _, _)| chi)
}

#[derive(Debug, Clone, PartialEq)]
pub struct KeyRateReport {
    /// Bits per channel use, clamped at zero.
    pub key_rate: f64,
    /// `rate_factor · (βI − χ)` before clamping; used by the optimizer.
    pub raw_rate: f64,
    pub mutual_info: f64,
    pub holevo: f64,
    pub beta: f64,
    pub symplectic_spectrum_full: Vec<f64>,
    pub symplectic_spectrum_conditional: Vec<f64>,
    pub params: Option<TwoWayParams>,
    pub channels: Vec<ChannelParams>,
}

/// Devetak–Winter rate `K = max(0, f·(βI − χ))`, where `f` is the state's
/// channel-use factor.
pub fn key_rate(state: &ProtocolState, beta: f64) -> Result<KeyRateReport> {
    check_range("beta", beta, f64::MIN_POSITIVE, 1.0, "reconciliation efficiency in (0, 1]")?;
    let key = state.key_map().ok_or(Error::NoKeyMap)?;
    let mutual_info = mutual_information(state)?;
    let (chi, full, cond) = holevo_with_spectra(state)?;
    let raw_rate = key.rate_factor * (beta * mutual_info - chi);
    Ok(KeyRateReport {
        key_rate: raw_rate.max(0.0),
        raw_rate,
        mutual_info,
        holevo: chi,
        beta,
        symplectic_spectrum_full: full,
        symplectic_spectrum_conditional: cond,
        params: state.params().copied(),
        channels: state.channels().to_vec(),
    })
}
