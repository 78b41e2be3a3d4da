use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{key_rate, KeyRateReport};
use crate::channel::ChannelParams;
use crate::error::{check_range, Error, Result};
use crate::nelder_mead::NelderMead;
use crate::protocol::{build_one_way, build_two_way, OneWayNormalization, ProtocolState, TwoWayParams};

/// Which circuit to optimize.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Protocol {
    TwoWay,
    /// Only `V_B` is free; the signal travels through the backward channel.
    OneWay(OneWayNormalization),
}

impl Protocol {
    pub fn build(
        self,
        params: &TwoWayParams,
        forward: ChannelParams,
        backward: ChannelParams,
    ) -> Result<ProtocolState> {
        match self {
            Protocol::TwoWay => build_two_way(params, forward, backward),
            Protocol::OneWay(norm) => build_one_way(params.vb, backward, norm),
        }
    }
}

/// Closed search intervals. An interval with `lo == hi` fixes the parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub va: (f64, f64),
    pub vb: (f64, f64),
    pub t: (f64, f64),
    pub g: (f64, f64),
}

impl Default for Bounds {
    fn default() -> Self {
        Self {
            va: (1.0, 100.0),
            vb: (1.0, 100.0),
            t: (0.0, 1.0),
            g: (1.0, 20.0),
        }
    }
}

impl Bounds {
    pub fn with_limits(v_max: f64, g_max: f64) -> Self {
        Self {
            va: (1.0, v_max),
            vb: (1.0, v_max),
            g: (1.0, g_max),
            ..Self::default()
        }
    }

    pub fn fix_va(mut self, v: f64) -> Self {
        self.va = (v, v);
        self
    }

    pub fn fix_vb(mut self, v: f64) -> Self {
        self.vb = (v, v);
        self
    }

    pub fn fix_t(mut self, t: f64) -> Self {
        self.t = (t, t);
        self
    }

    pub fn fix_g(mut self, g: f64) -> Self {
        self.g = (g, g);
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, (lo, hi), min, max) in [
            ("va", self.va, 1.0, f64::INFINITY),
            ("vb", self.vb, 1.0, f64::INFINITY),
            ("t", self.t, 0.0, 1.0),
            ("g", self.g, 1.0, f64::INFINITY),
        ] {
            check_range(name, lo, min, max, "lower bound inside the physical range")?;
            check_range(name, hi, lo, max, "upper bound >= lower bound, finite")?;
            if !hi.is_finite() {
                return Err(Error::Parameter {
                    name,
                    value: hi,
                    expected: "finite upper bound",
                });
            }
        }
        Ok(())
    }

    /// Axes of the search for `protocol`, in the order (va, vb, t, g).
    fn axes(&self, protocol: Protocol) -> [Axis; 4] {
        let one_way = matches!(protocol, Protocol::OneWay(_));
        let pick = |range: (f64, f64), fixed: f64, log: bool| {
            if one_way {
                Axis { lo: fixed, hi: fixed, log }
            } else {
                Axis { lo: range.0, hi: range.1, log }
            }
        };
        [
            pick(self.va, 1.0, true),
            Axis { lo: self.vb.0, hi: self.vb.1, log: true },
            pick(self.t, 0.0, false),
            pick(self.g, 1.0, true),
        ]
    }
}

#[derive(Debug, Clone, Copy)]
struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn free(&self) -> bool {
        self.hi > self.lo
    }

    fn value(&self, u: f64) -> f64 {
        if !self.free() {
            return self.lo;
        }
        let v = if self.log {
            self.lo * (self.hi / self.lo).powf(u)
        } else {
            self.lo + (self.hi - self.lo) * u
        };
        v.clamp(self.lo, self.hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OptimizerConfig {
    /// Hard cap on objective evaluations, grid included.
    pub budget: usize,
    pub seed: u64,
    /// Seeded uniform starts added to the 3^k grid.
    pub random_starts: usize,
    /// How many of the best starts get a local Nelder–Mead refinement.
    pub refinements: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            budget: 10_000,
            seed: 0x5eed,
            random_starts: 16,
            refinements: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub params: TwoWayParams,
    pub report: KeyRateReport,
    pub evaluations: usize,
    /// Set when at least one local search ran out of budget before converging.
    pub budget_exhausted: bool,
}

struct Objective<'a> {
    protocol: Protocol,
    axes: [Axis; 4],
    free: Vec<usize>,
    forward: ChannelParams,
    backward: ChannelParams,
    beta: f64,
    _marker: std::marker::PhantomData<&'a ()>,
}

impl Objective<'_> {
    fn params(&self, u: &[f64]) -> TwoWayParams {
        let mut coords = [0.0; 4];
        for (slot, &axis) in self.free.iter().enumerate() {
            coords[axis] = u[slot];
        }
        TwoWayParams {
            va: self.axes[0].value(coords[0]),
            vb: self.axes[1].value(coords[1]),
            t: self.axes[2].value(coords[2]),
            g: self.axes[3].value(coords[3]),
        }
    }

    fn report(&self, p: &TwoWayParams) -> Result<KeyRateReport> {
        let state = self.protocol.build(p, self.forward, self.backward)?;
        key_rate(&state, self.beta)
    }

    /// Unclamped rate, so the search still has a gradient where K = 0.
    fn value(&self, u: &[f64]) -> f64 {
        self.report(&self.params(u))
            .map(|r| r.raw_rate)
            .unwrap_or(f64::NEG_INFINITY)
    }
}

/// Orders candidates by value, breaking ties lexicographically on the
/// coordinates (smaller wins) so the result is independent of evaluation order.
fn better(a: (&[f64], f64), b: (&[f64], f64)) -> bool {
    match a.1.total_cmp(&b.1) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Less => false,
        std::cmp::Ordering::Equal => a.0.iter().zip(b.0).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne())
            == Some(std::cmp::Ordering::Less),
    }
}

/// Maximizes the key rate over the free parameters in `bounds`.
///
/// A 3^k grid plus seeded random points are evaluated; the best
/// `refinements` of them are polished by Nelder–Mead in parallel, sharing
/// what is left of the budget. Results depend only on the inputs and seed.
pub fn optimize_rate(
    protocol: Protocol,
    forward: ChannelParams,
    backward: ChannelParams,
    beta: f64,
    bounds: &Bounds,
    config: &OptimizerConfig,
) -> Result<Optimum> {
    bounds.validate()?;
    check_range("beta", beta, f64::MIN_POSITIVE, 1.0, "reconciliation efficiency in (0, 1]")?;
    let axes = bounds.axes(protocol);
    let free: Vec<usize> = (0..4).filter(|&i| axes[i].free()).collect();
    let objective = Objective {
        protocol,
        axes,
        free: free.clone(),
        forward,
        backward,
        beta,
        _marker: std::marker::PhantomData,
    };
    let k = free.len();

    let mut starts: Vec<Vec<f64>> = Vec::new();
    let levels = [1.0 / 6.0, 0.5, 5.0 / 6.0];
    for idx in 0..3usize.pow(k as u32) {
        let mut rem = idx;
        let point = (0..k)
            .map(|_| {
                let l = levels[rem % 3];
                rem /= 3;
                l
            })
            .collect();
        starts.push(point);
    }
    if k > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        for _ in 0..config.random_starts {
            starts.push((0..k).map(|_| rng.random::<f64>()).collect());
        }
    }

    let scored: Vec<(Vec<f64>, f64)> = starts
        .into_par_iter()
        .map(|u| {
            let v = objective.value(&u);
            (u, v)
        })
        .collect();
    let mut evaluations = scored.len();

    let mut ranked = scored;
    ranked.sort_by(|a, b| {
        if better((&a.0, a.1), (&b.0, b.1)) {
            std::cmp::Ordering::Less
        } else if better((&b.0, b.1), (&a.0, a.1)) {
            std::cmp::Ordering::Greater
        } else {
            std::cmp::Ordering::Equal
        }
    });

    let mut best = ranked[0].clone();
    let mut budget_exhausted = false;
    let remaining = config.budget.saturating_sub(evaluations);
    let n_refine = config.refinements.min(ranked.len());
    if k > 0 && n_refine > 0 && remaining > k + 1 {
        let per_run = remaining / n_refine;
        let local = NelderMead {
            max_evaluations: per_run,
            ..NelderMead::default()
        };
        let runs: Vec<_> = ranked[..n_refine]
            .par_iter()
            .map(|(u, _)| local.maximize(u, |x| objective.value(x)))
            .collect();
        for r in runs {
            evaluations += r.evaluations;
            budget_exhausted |= !r.converged;
            if better((&r.point, r.value), (&best.0, best.1)) {
                best = (r.point, r.value);
            }
        }
    } else if k > 0 {
        budget_exhausted = true;
    }

    let params = objective.params(&best.0);
    let report = objective.report(&params)?;
    Ok(Optimum {
        params,
        report,
        evaluations,
        budget_exhausted,
    })
}
