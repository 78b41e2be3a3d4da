use super::optimize::{optimize_rate, Bounds, OptimizerConfig, Protocol};
use crate::channel::ChannelParams;
use crate::error::{check_range, Result};

/// Largest excess noise with a positive optimized key rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Threshold {
    pub xi_max: f64,
    /// True when no key is possible even at `ξ = 0`; `xi_max` is then 0.
    pub no_key_at_zero: bool,
    /// Number of optimizer runs performed.
    pub optimizations: usize,
}

/// Give up growing the bracket beyond this noise level.
const XI_CEILING: f64 = 1024.0;

/// Bisects the optimized rate on `ξ` (same `(τ, ξ)` on every channel) to
/// absolute tolerance `tol`. Returns the lower end of the final bracket, so
/// the reported `ξ_max` always has `K > 0`.
pub fn noise_threshold(
    protocol: Protocol,
    tau: f64,
    beta: f64,
    bounds: &Bounds,
    config: &OptimizerConfig,
    tol: f64,
) -> Result<Threshold> {
    check_range("tau", tau, f64::MIN_POSITIVE, 1.0, "transmittance in (0, 1]")?;
    check_range("tol", tol, f64::MIN_POSITIVE, f64::INFINITY, "tolerance > 0")?;
    let mut optimizations = 0;
    let mut positive = |xi: f64| -> Result<bool> {
        optimizations += 1;
        let ch = ChannelParams::new(tau, xi)?;
        Ok(optimize_rate(protocol, ch, ch, beta, bounds, config)?.report.raw_rate > 0.0)
    };

    if !positive(0.0)? {
        return Ok(Threshold {
            xi_max: 0.0,
            no_key_at_zero: true,
            optimizations,
        });
    }
    let (mut lo, mut hi) = (0.0, 0.5);
    while positive(hi)? {
        lo = hi;
        hi *= 2.0;
        if hi > XI_CEILING {
            return Ok(Threshold {
                xi_max: lo,
                no_key_at_zero: false,
                optimizations,
            });
        }
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if positive(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Threshold {
        xi_max: lo,
        no_key_at_zero: false,
        optimizations,
    })
}
