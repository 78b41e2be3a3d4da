//! Phase-insensitive thermal bosonic channel parametrized by transmittance
//! and input-referred excess noise.

use nalgebra::Matrix2;

use crate::error::{check_range, Error, Result};
use crate::state::CovarianceMatrix;
use crate::symplectic::{block, set_block};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    tau: f64,
    xi: f64,
}

impl ChannelParams {
    pub fn new(tau: f64, xi: f64) -> Result<Self> {
        check_range("tau", tau, 0.0, 1.0, "transmittance in [0, 1]")?;
        check_range("xi", xi, 0.0, f64::INFINITY, "excess noise >= 0")?;
        Ok(Self { tau, xi })
    }

    pub fn identity() -> Self {
        Self { tau: 1.0, xi: 0.0 }
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    /// Output variance for input variance `v`: `τ(v − 1 + ξ) + 1`.
    pub fn output_variance(&self, v: f64) -> f64 {
        self.tau * (v - 1.0 + self.xi) + 1.0
    }
}

/// Sends `mode` through the channel: `Γ → XΓXᵀ + Y` with `X = √τ·I₂` and
/// `Y = (1 − τ + τξ)·I₂` on that mode.
pub fn apply_channel(
    gamma: &CovarianceMatrix,
    mode: usize,
    channel: ChannelParams,
) -> Result<CovarianceMatrix> {
    let d = gamma.num_modes();
    if mode >= d {
        return Err(Error::ModeIndex { index: mode, modes: d });
    }
    let mut m = gamma.matrix().clone();
    let amp = channel.tau.sqrt();
    for other in (0..d).filter(|&k| k != mode) {
        let b = block(&m, mode, other) * amp;
        set_block(&mut m, mode, other, &b);
        set_block(&mut m, other, mode, &b.transpose());
    }
    let noise = 1.0 - channel.tau + channel.tau * channel.xi;
    let diag = block(&m, mode, mode) * channel.tau + Matrix2::identity() * noise;
    set_block(&mut m, mode, mode, &diag);
    Ok(CovarianceMatrix::from_trusted(m, gamma.tags().to_vec()))
}
