//! Complex SVD by one-sided (Hestenes) Jacobi rotations.
//!
//! Columns of `A` are pairwise orthogonalised by unitary plane rotations
//! that are accumulated into `V`. At convergence `A·V = U·Δ`, so the column
//! norms are the singular values and the normalised columns are `U`.

use num_complex::Complex64;

use crate::linalg::CMatrix;

const MAX_SWEEPS: usize = 80;

/// Thin SVD `A = U·diag(Δ)·Vᴴ` restricted to the numerically nonzero part.
#[derive(Debug, Clone)]
pub struct SvdResult {
    /// N×K₀, orthonormal columns.
    pub u: CMatrix,
    /// K₀ singular values, non-increasing.
    pub sigma: Vec<f64>,
    /// M×K₀, orthonormal columns.
    pub v: CMatrix,
}

impl SvdResult {
    /// Numerical rank K₀.
    pub fn rank(&self) -> usize {
        self.sigma.len()
    }

    pub fn reconstruct(&self) -> CMatrix {
        let mut us = self.u.clone();
        for (k, s) in self.sigma.iter().enumerate() {
            us.column_mut(k).scale_mut(*s);
        }
        us * self.v.adjoint()
    }
}

fn col_dot(a: &CMatrix, p: usize, q: usize) -> (f64, f64, Complex64) {
    let (mut app, mut aqq, mut apq) = (0.0, 0.0, Complex64::new(0.0, 0.0));
    for (x, y) in a.column(p).iter().zip(a.column(q).iter()) {
        app += x.norm_sqr();
        aqq += y.norm_sqr();
        apq += x.conj() * y;
    }
    (app, aqq, apq)
}

/// Rotates columns `p` and `q` of `m` by the unitary `[[c, s·e], [−s, c·e]]`
/// acting on the right, where `e = e^{−jφ}` rephases column `q`.
fn rotate(m: &mut CMatrix, p: usize, q: usize, c: f64, s: f64, phase: Complex64) {
    for i in 0..m.nrows() {
        let xp = m[(i, p)];
        let xq = m[(i, q)] * phase;
        m[(i, p)] = xp * c - xq * s;
        m[(i, q)] = xp * s + xq * c;
    }
}

pub fn complex_svd(a: &CMatrix) -> SvdResult {
    let (rows, cols) = a.shape();
    let mut work = a.clone();
    let mut v = CMatrix::identity(cols, cols);
    let eps = f64::EPSILON;

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let (app, aqq, apq) = col_dot(&work, p, q);
                let g = apq.norm();
                if g == 0.0 || g <= eps * (app * aqq).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = apq.conj() / g;
                let zeta = (aqq - app) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut work, p, q, c, s, phase);
                rotate(&mut v, p, q, c, s, phase);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<(usize, f64)> = (0..cols).map(|j| (j, work.column(j).norm())).collect();
    order.sort_by(|x, y| y.1.total_cmp(&x.1));

    let smax = order.first().map_or(0.0, |o| o.1);
    let tol = rows.max(cols) as f64 * eps * smax;
    let kept: Vec<(usize, f64)> = order.into_iter().filter(|&(_, s)| s > tol && s > 0.0).collect();

    let k0 = kept.len();
    let mut u = CMatrix::zeros(rows, k0);
    let mut vk = CMatrix::zeros(cols, k0);
    let mut sigma = Vec::with_capacity(k0);
    for (k, &(j, s)) in kept.iter().enumerate() {
        u.set_column(k, &(work.column(j) / Complex64::from(s)));
        vk.set_column(k, &v.column(j));
        sigma.push(s);
    }
    SvdResult { u, sigma, v: vk }
}
