//! Independent reference implementations shared by the integration tests.
//!
//! Nothing here calls the library's circuit, spectrum, or conditioning code;
//! matrices are written out entry by entry.

#![allow(dead_code)]

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};

pub fn set_block_scalar(m: &mut DMatrix<f64>, i: usize, j: usize, value: f64, sigma_z: bool) {
    let s = if sigma_z { -1.0 } else { 1.0 };
    for (a, b) in [(i, j), (j, i)] {
        m[(2 * a, 2 * b)] = value;
        m[(2 * a + 1, 2 * b + 1)] = s * value;
        m[(2 * a, 2 * b + 1)] = 0.0;
        m[(2 * a + 1, 2 * b)] = 0.0;
    }
}

/// Entrywise transcription of `Γ_{A₁A₂B₂B₁}` for identical forward and
/// backward channels `(τ, ξ)`. The `A₁` variance carries `−2√(g(g−1))z₁`.
pub fn closed_form_two_way(va: f64, vb: f64, t: f64, g: f64, tau: f64, xi: f64) -> DMatrix<f64> {
    let v = va - 1.0;
    let vp = vb - 1.0;
    let z = (v * v + 2.0 * v).sqrt();
    let zp = (vp * vp + 2.0 * vp).sqrt();

    let v1 = t * tau * tau * (v + xi) + (1.0 - t) * tau * vp + tau * xi;
    let v2 = (1.0 - t) * tau * (v + xi) + t * vp;
    let z1 = t.sqrt() * tau * z;
    let z2 = -((1.0 - t) * tau).sqrt() * z;
    let z12 = -(t * (1.0 - t) * tau).sqrt() * (tau * (v + xi) - vp);
    let z1p = ((1.0 - t) * tau).sqrt() * zp;
    let z2p = t.sqrt() * zp;
    let (cap_v, cap_v1, cap_v2, cap_vp) = (1.0 + v, 1.0 + v1, 1.0 + v2, 1.0 + vp);

    let sg = g.sqrt();
    let sg1 = (g - 1.0).sqrt();
    let sgg = (g * (g - 1.0)).sqrt();

    let mut m = DMatrix::zeros(8, 8);
    // Modes: 0 = A₁, 1 = A₂, 2 = B₂, 3 = B₁.
    set_block_scalar(&mut m, 0, 0, g * cap_v + (g - 1.0) * cap_v1 - 2.0 * sgg * z1, false);
    set_block_scalar(&mut m, 0, 1, -sgg * (cap_v + cap_v1) + (2.0 * g - 1.0) * z1, true);
    set_block_scalar(&mut m, 0, 2, sg * z2 - sg1 * z12, true);
    set_block_scalar(&mut m, 0, 3, -sg1 * z1p, false);
    set_block_scalar(&mut m, 1, 1, (g - 1.0) * cap_v + g * cap_v1 - 2.0 * sgg * z1, false);
    set_block_scalar(&mut m, 1, 2, -sg1 * z2 + sg * z12, false);
    set_block_scalar(&mut m, 1, 3, sg * z1p, true);
    set_block_scalar(&mut m, 2, 2, cap_v2, false);
    set_block_scalar(&mut m, 2, 3, z2p, true);
    set_block_scalar(&mut m, 3, 3, cap_vp, false);
    m
}

pub fn omega(modes: usize) -> DMatrix<f64> {
    let mut o = DMatrix::zeros(2 * modes, 2 * modes);
    for k in 0..modes {
        o[(2 * k, 2 * k + 1)] = 1.0;
        o[(2 * k + 1, 2 * k)] = -1.0;
    }
    o
}

/// Symplectic spectrum from the symmetric matrix `Γ^{½} Ωᵀ Γ Ω Γ^{½}`, whose
/// eigenvalues are the `ν²`, each twice.
pub fn symplectic_spectrum_oracle(gamma: &DMatrix<f64>) -> Vec<f64> {
    let n = gamma.nrows();
    let eig = SymmetricEigen::new(gamma.clone());
    let sqrt = &eig.eigenvectors
        * DMatrix::from_diagonal(&eig.eigenvalues.map(|x| x.max(0.0).sqrt()))
        * eig.eigenvectors.transpose();
    let o = omega(n / 2);
    let m = &sqrt * o.transpose() * gamma * &o * &sqrt;
    let m = (&m + m.transpose()) * 0.5;
    let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev.chunks(2).map(|p| (0.5 * (p[0] + p[1])).max(0.0).sqrt().max(1.0)).collect()
}

/// Heterodyne conditioning on one mode: `B − C (A + I)⁻¹ Cᵀ`.
pub fn condition_oracle(gamma: &DMatrix<f64>, mode: usize) -> DMatrix<f64> {
    let n = gamma.nrows();
    let keep: Vec<usize> = (0..n).filter(|&i| i / 2 != mode).collect();
    let meas = [2 * mode, 2 * mode + 1];
    let b = DMatrix::from_fn(keep.len(), keep.len(), |r, c| gamma[(keep[r], keep[c])]);
    let c = DMatrix::from_fn(keep.len(), 2, |r, c| gamma[(keep[r], meas[c])]);
    let a = DMatrix::from_fn(2, 2, |r, c| gamma[(meas[r], meas[c])]) + DMatrix::identity(2, 2);
    let inv = a.try_inverse().expect("A + I invertible");
    b - &c * inv * c.transpose()
}

pub fn g_oracle(x: f64) -> f64 {
    if x <= 1.0 {
        return 0.0;
    }
    let p = (x + 1.0) / 2.0;
    let m = (x - 1.0) / 2.0;
    p * p.log2() - m * m.log2()
}

fn det_sub(m: &DMatrix<f64>, idx: &[usize]) -> f64 {
    DMatrix::from_fn(idx.len(), idx.len(), |r, c| m[(idx[r], idx[c])]).determinant()
}

#[derive(Debug, Clone, Copy)]
pub struct OracleRate {
    pub mutual_info: f64,
    pub holevo: f64,
    pub raw_rate: f64,
}

/// Two-way rate from the closed-form matrix: outcome covariance `½(Γ+I)`,
/// `Y₁` rescaled, `I = ½·log₂(det X₂ · det Y / det X₂Y)` on the real
/// matrices, `χ` from the oracle spectrum, factor ½.
pub fn two_way_rate_oracle(va: f64, vb: f64, t: f64, g: f64, tau: f64, xi: f64, beta: f64) -> OracleRate {
    let gamma = closed_form_two_way(va, vb, t, g, tau, xi);
    let mut out = (&gamma + DMatrix::identity(8, 8)) * 0.5;
    let s = (2.0 * (vb - 1.0) / (vb + 1.0)).sqrt();
    let mut y = vec![4, 5];
    if s > 0.0 {
        for q in [6, 7] {
            for k in 0..8 {
                out[(q, k)] *= s;
                out[(k, q)] *= s;
            }
        }
        y.extend([6, 7]);
    }
    let x = [2, 3];
    let xy: Vec<usize> = x.iter().chain(&y).copied().collect();
    let mutual_info = 0.5 * (det_sub(&out, &x) * det_sub(&out, &y) / det_sub(&out, &xy)).log2();

    let full: f64 = symplectic_spectrum_oracle(&gamma).into_iter().map(g_oracle).sum();
    let cond: f64 = symplectic_spectrum_oracle(&condition_oracle(&gamma, 1))
        .into_iter()
        .map(g_oracle)
        .sum();
    let holevo = full - cond;
    OracleRate {
        mutual_info,
        holevo,
        raw_rate: 0.5 * (beta * mutual_info - holevo),
    }
}

/// No-switching one-way rate with reverse reconciliation on the receiver's
/// heterodyne outcome, from scalar formulas only.
///
/// Sender keeps `b = V`; receiver holds `a = τ(V − 1 + ξ) + 1`; correlation
/// `c = √(τ(V² − 1))`.
pub fn one_way_rate_oracle(vb: f64, tau: f64, xi: f64, beta: f64, factor: f64) -> OracleRate {
    let b = vb;
    let a = tau * (vb - 1.0 + xi) + 1.0;
    let c2 = tau * (vb * vb - 1.0);
    let delta = a * a + b * b - 2.0 * c2;
    let d = a * b - c2;
    let root = (delta * delta - 4.0 * d * d).max(0.0).sqrt();
    let nu_plus = ((delta + root) / 2.0).sqrt();
    let nu_minus = ((delta - root) / 2.0).max(1.0).sqrt().max(1.0);
    let nu_cond = b - c2 / (a + 1.0);
    let holevo = g_oracle(nu_plus) + g_oracle(nu_minus) - g_oracle(nu_cond);
    let mutual_info = ((a + 1.0) * (b + 1.0) / ((a + 1.0) * (b + 1.0) - c2)).log2();
    OracleRate {
        mutual_info,
        holevo,
        raw_rate: factor * (beta * mutual_info - holevo),
    }
}

/// Truncated Fock space of `modes` modes with `cutoff + 1` levels each.
pub struct Fock {
    pub modes: usize,
    pub levels: usize,
}

impl Fock {
    pub fn dim(&self) -> usize {
        self.levels.pow(self.modes as u32)
    }

    fn digits(&self, mut idx: usize) -> Vec<usize> {
        let mut d = vec![0; self.modes];
        for k in (0..self.modes).rev() {
            d[k] = idx % self.levels;
            idx /= self.levels;
        }
        d
    }

    fn index(&self, d: &[usize]) -> usize {
        d.iter().fold(0, |acc, &x| acc * self.levels + x)
    }

    /// `a_k ψ`.
    pub fn lower(&self, psi: &DVector<Complex<f64>>, k: usize) -> DVector<Complex<f64>> {
        let mut out = DVector::zeros(psi.len());
        for i in 0..psi.len() {
            let mut d = self.digits(i);
            if d[k] == 0 {
                continue;
            }
            let n = d[k] as f64;
            d[k] -= 1;
            out[self.index(&d)] += psi[i] * n.sqrt();
        }
        out
    }

    /// `a_k† ψ`, dropping amplitude pushed past the cutoff.
    pub fn raise(&self, psi: &DVector<Complex<f64>>, k: usize) -> DVector<Complex<f64>> {
        let mut out = DVector::zeros(psi.len());
        for i in 0..psi.len() {
            let mut d = self.digits(i);
            if d[k] + 1 >= self.levels {
                continue;
            }
            d[k] += 1;
            out[self.index(&d)] += psi[i] * (d[k] as f64).sqrt();
        }
        out
    }

    pub fn vacuum(&self) -> DVector<Complex<f64>> {
        let mut v = DVector::zeros(self.dim());
        v[0] = Complex::new(1.0, 0.0);
        v
    }

    /// `Γ_ij = Re⟨R_i ψ, R_j ψ⟩` with `x = a + a†`, `p = −i(a − a†)`, for a
    /// normalized zero-mean state.
    pub fn covariance(&self, psi: &DVector<Complex<f64>>) -> DMatrix<f64> {
        let i = Complex::new(0.0, 1.0);
        let mut r = Vec::new();
        for k in 0..self.modes {
            let a = self.lower(psi, k);
            let ad = self.raise(psi, k);
            r.push(&a + &ad);
            r.push((&a - &ad) * (-i));
        }
        DMatrix::from_fn(2 * self.modes, 2 * self.modes, |p, q| r[p].dotc(&r[q]).re)
    }
}

/// `exp(Σ Λᵢⱼ aᵢ† bⱼ†)|0⟩` (normalized) on modes `(a₁…a_m, b₁…b_m)`,
/// summed as a Taylor series.
pub fn su_mm_fock(lambda: &DMatrix<Complex<f64>>, cutoff: usize) -> (Fock, DVector<Complex<f64>>) {
    let m = lambda.nrows();
    let fock = Fock { modes: 2 * m, levels: cutoff + 1 };
    let generator = |psi: &DVector<Complex<f64>>| {
        let mut out = DVector::zeros(psi.len());
        for a in 0..m {
            for b in 0..m {
                let raised = fock.raise(&fock.raise(psi, m + b), a);
                out += raised * lambda[(a, b)];
            }
        }
        out
    };
    let mut term = fock.vacuum();
    let mut psi = term.clone();
    for k in 1..=(2 * cutoff + 10) {
        term = generator(&term) / Complex::new(k as f64, 0.0);
        psi += &term;
    }
    let norm = psi.norm();
    (fock, psi / Complex::new(norm, 0.0))
}
