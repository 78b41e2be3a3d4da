//! Nelder–Mead simplex maximization on the unit box `[0, 1]^k`.
//!
//! Trial points are projected onto the box before evaluation, so the
//! objective is never called outside it.

#[derive(Debug, Clone, PartialEq)]
pub struct NelderMeadResult {
    pub point: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct NelderMead {
    pub initial_step: f64,
    pub max_evaluations: usize,
    /// Stop when the spread of simplex values falls below this...
    pub value_tol: f64,
    /// ...and every vertex lies within this distance of the best one.
    pub point_tol: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self {
            initial_step: 0.1,
            max_evaluations: 2_000,
            value_tol: 1e-11,
            point_tol: 1e-7,
        }
    }
}

fn project(x: &mut [f64]) {
    for v in x {
        *v = v.clamp(0.0, 1.0);
    }
}

impl NelderMead {
    /// Maximizes `f` starting from `start`. NaN values count as −∞.
    pub fn maximize<F>(&self, start: &[f64], mut f: F) -> NelderMeadResult
    where
        F: FnMut(&[f64]) -> f64,
    {
        let k = start.len();
        let mut evaluations = 0usize;
        let mut eval = |x: &[f64], evaluations: &mut usize| {
            *evaluations += 1;
            let v = f(x);
            if v.is_nan() {
                f64::NEG_INFINITY
            } else {
                v
            }
        };

        let mut x0 = start.to_vec();
        project(&mut x0);
        if k == 0 || self.max_evaluations <= 1 {
            let value = eval(&x0, &mut evaluations);
            return NelderMeadResult {
                point: x0,
                value,
                evaluations,
                converged: true,
            };
        }

        let mut simplex: Vec<Vec<f64>> = vec![x0.clone()];
        for i in 0..k {
            let mut v = x0.clone();
            v[i] = if v[i] + self.initial_step <= 1.0 {
                v[i] + self.initial_step
            } else {
                v[i] - self.initial_step
            };
            simplex.push(v);
        }
        let mut values: Vec<f64> = simplex.iter().map(|v| eval(v, &mut evaluations)).collect();

        let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
        let mut converged = false;
        let mut order: Vec<usize> = (0..=k).collect();

        while evaluations < self.max_evaluations {
            // Best first.
            order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
            let (best, worst, second_worst) = (order[0], order[k], order[k - 1]);

            let spread = values[best] - values[worst];
            let diameter = simplex
                .iter()
                .map(|v| {
                    v.iter()
                        .zip(&simplex[best])
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max)
                })
                .fold(0.0, f64::max);
            if spread.abs() <= self.value_tol && diameter <= self.point_tol {
                converged = true;
                break;
            }
            if diameter <= 1e-14 {
                // Collapsed simplex: nothing more to learn.
                converged = true;
                break;
            }

            let mut centroid = vec![0.0; k];
            for &idx in &order[..k] {
                for (c, x) in centroid.iter_mut().zip(&simplex[idx]) {
                    *c += x / k as f64;
                }
            }
            let along = |t: f64| -> Vec<f64> {
                let mut p: Vec<f64> = centroid
                    .iter()
                    .zip(&simplex[worst])
                    .map(|(c, w)| c + t * (c - w))
                    .collect();
                project(&mut p);
                p
            };

            let reflected = along(alpha);
            let fr = eval(&reflected, &mut evaluations);
            if fr > values[best] {
                let expanded = along(alpha * gamma);
                let fe = eval(&expanded, &mut evaluations);
                if fe > fr {
                    simplex[worst] = expanded;
                    values[worst] = fe;
                } else {
                    simplex[worst] = reflected;
                    values[worst] = fr;
                }
                continue;
            }
            if fr > values[second_worst] {
                simplex[worst] = reflected;
                values[worst] = fr;
                continue;
            }

            let (contracted, fc) = if fr > values[worst] {
                let c = along(alpha * rho);
                let v = eval(&c, &mut evaluations);
                (c, v)
            } else {
                let c = along(-rho);
                let v = eval(&c, &mut evaluations);
                (c, v)
            };
            if fc > values[worst].max(fr) {
                simplex[worst] = contracted;
                values[worst] = fc;
                continue;
            }

            // Shrink towards the best vertex.
            let anchor = simplex[best].clone();
            for &idx in &order[1..] {
                if evaluations >= self.max_evaluations {
                    break;
                }
                for (x, a) in simplex[idx].iter_mut().zip(&anchor) {
                    *x = a + sigma * (*x - a);
                }
                values[idx] = eval(&simplex[idx], &mut evaluations);
            }
        }

        let best = (0..=k)
            .max_by(|&a, &b| values[a].total_cmp(&values[b]).then(b.cmp(&a)))
            .expect("simplex is nonempty");
        NelderMeadResult {
            point: simplex[best].clone(),
            value: values[best],
            evaluations,
            converged,
        }
    }
}
