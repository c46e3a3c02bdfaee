//! Primal log-barrier method over `{W ⪰ 0} × R^p`.
//!
//! Maximizes `<C, W> + c_y·y` subject to affine inequalities
//! `b_j + <G_j, W> + h_j·y ≥ 0` and at most one hyperbolic constraint
//! `<S, W> − y_v² ≥ 0`. The Hessian of `−log det W` is the operator
//! `D ↦ W⁻¹ D W⁻¹`, which inverts in closed form, so every Newton step only
//! needs a dense solve of size (#constraints + p).

use nalgebra::{DMatrix, DVector};

use crate::linalg::{cplx, hermitize, hpd_cholesky, inner, CMatrix, Eigh};

#[derive(Debug, Clone)]
pub(crate) struct LinearConstraint {
    pub b: f64,
    pub g: CMatrix,
    pub h: Vec<f64>,
}

#[derive(Debug, Clone)]
pub(crate) struct Hyperbolic {
    pub s: CMatrix,
    pub var: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct BarrierProblem {
    pub n: usize,
    pub c_w: Option<CMatrix>,
    pub c_y: Vec<f64>,
    pub linear: Vec<LinearConstraint>,
    pub hyper: Option<Hyperbolic>,
}

#[derive(Debug, Clone)]
pub(crate) struct Point {
    pub w: CMatrix,
    pub y: Vec<f64>,
}

#[derive(Debug, Clone)]
pub(crate) struct BarrierOutcome {
    pub point: Point,
    pub newton_steps: usize,
    pub converged: bool,
}

pub(crate) struct BarrierSettings {
    pub max_newton_steps: usize,
    /// Stop once the duality-gap bound `ν/t` falls below
    /// `rel_tol · max(|objective|, abs_floor)`.
    pub rel_tol: f64,
    pub abs_floor: f64,
    /// Initial barrier weight.
    pub t0: f64,
    pub growth: f64,
}

const CENTERING_TOL: f64 = 1e-9;
const MAX_CENTERING_STEPS: usize = 200;

impl BarrierProblem {
    fn objective(&self, x: &Point) -> f64 {
        let mut v: f64 = self.c_y.iter().zip(&x.y).map(|(c, y)| c * y).sum();
        if let Some(c) = &self.c_w {
            v += inner(c, &x.w);
        }
        v
    }

    fn slack(&self, con: &LinearConstraint, x: &Point) -> f64 {
        con.b + inner(&con.g, &x.w) + con.h.iter().zip(&x.y).map(|(h, y)| h * y).sum::<f64>()
    }

    fn hyper_slack(&self, hy: &Hyperbolic, x: &Point) -> f64 {
        inner(&hy.s, &x.w) - x.y[hy.var] * x.y[hy.var]
    }

    /// Self-concordance parameter of the full barrier.
    pub fn nu(&self) -> f64 {
        (self.n + self.linear.len() + if self.hyper.is_some() { 2 } else { 0 }) as f64
    }

    /// `−t·objective − Σ log(slacks) − log det W`, or `None` outside the domain.
    #[cfg(test)]
    fn phi(&self, t: f64, x: &Point) -> Option<f64> {
        let chol = hpd_cholesky(&x.w)?;
        let logdet: f64 = 2.0 * chol.l().diagonal().iter().map(|d| d.re.ln()).sum::<f64>();
        if !logdet.is_finite() {
            return None;
        }
        let mut val = -t * self.objective(x) - logdet;
        for con in &self.linear {
            let s = self.slack(con, x);
            if !(s > 0.0) {
                return None;
            }
            val -= s.ln();
        }
        if let Some(hy) = &self.hyper {
            let q = self.hyper_slack(hy, x);
            if !(q > 0.0) {
                return None;
            }
            val -= q.ln();
        }
        Some(val)
    }

    /// Newton direction and squared Newton decrement at `x`.
    fn newton(&self, t: f64, x: &Point) -> Option<(CMatrix, Vec<f64>, f64)> {
        let n = self.n;
        let p = x.y.len();
        let chol = hpd_cholesky(&x.w)?;
        let winv = hermitize(&chol.inverse());

        let mut g_w = -winv;
        if let Some(c) = &self.c_w {
            g_w -= c * cplx(t);
        }
        let mut g_y: Vec<f64> = self.c_y.iter().map(|c| -t * c).collect();
        let mut diag_y = vec![0.0; p];

        // low-rank Hessian terms: (G, h, ω)
        let mut terms: Vec<(&CMatrix, Vec<f64>, f64)> = Vec::with_capacity(self.linear.len() + 1);
        for con in &self.linear {
            let s = self.slack(con, x);
            g_w -= &con.g * cplx(1.0 / s);
            for (gy, h) in g_y.iter_mut().zip(&con.h) {
                *gy -= h / s;
            }
            terms.push((&con.g, con.h.clone(), 1.0 / (s * s)));
        }
        if let Some(hy) = &self.hyper {
            let q = self.hyper_slack(hy, x);
            let v = x.y[hy.var];
            g_w -= &hy.s * cplx(1.0 / q);
            g_y[hy.var] += 2.0 * v / q;
            diag_y[hy.var] += 2.0 / q;
            let mut h = vec![0.0; p];
            h[hy.var] = -2.0 * v;
            terms.push((&hy.s, h, 1.0 / (q * q)));
        }

        let w = &x.w;
        let xg = w * &g_w * w;
        let sandwiches: Vec<CMatrix> = terms.iter().map(|(g, _, _)| w * *g * w).collect();
        let j = terms.len();
        let dim = j + p;
        let mut a = DMatrix::<f64>::zeros(dim, dim);
        let mut rhs = DVector::<f64>::zeros(dim);
        for i in 0..j {
            for k in 0..j {
                a[(i, k)] = inner(terms[i].0, &sandwiches[k]);
            }
            a[(i, i)] += 1.0 / terms[i].2;
            for l in 0..p {
                a[(i, j + l)] = -terms[i].1[l];
                a[(j + l, i)] = terms[i].1[l];
            }
            rhs[i] = -inner(terms[i].0, &xg);
        }
        for l in 0..p {
            a[(j + l, j + l)] = diag_y[l];
            rhs[j + l] = -g_y[l];
        }
        let sol = solve_equilibrated(a, rhs)?;
        let mut dw = -xg;
        for (k, pk) in sandwiches.iter().enumerate() {
            dw -= pk * cplx(sol[k]);
        }
        let dw = hermitize(&dw);
        let dy: Vec<f64> = (0..p).map(|l| sol[j + l]).collect();
        debug_assert_eq!(dw.nrows(), n);
        let dec2 = -(inner(&g_w, &dw) + g_y.iter().zip(&dy).map(|(g, d)| g * d).sum::<f64>());
        Some((dw, dy, dec2))
    }

    fn step(x: &Point, dw: &CMatrix, dy: &[f64], alpha: f64) -> Point {
        Point {
            w: &x.w + dw * cplx(alpha),
            y: x.y.iter().zip(dy).map(|(y, d)| y + alpha * d).collect(),
        }
    }

    /// Change of the barrier function along `(dw, dy)`, evaluated without
    /// forming the (possibly huge) absolute values, plus the largest feasible
    /// step.
    fn line_model(&self, t: f64, x: &Point, dw: &CMatrix, dy: &[f64]) -> Option<LineModel> {
        let l = hpd_cholesky(&x.w)?.l();
        let half = l.solve_lower_triangular(dw)?;
        let scaled = l.solve_lower_triangular(&half.adjoint())?;
        let mu = Eigh::new(&scaled).values;
        let mut dobj: f64 = self.c_y.iter().zip(dy).map(|(c, d)| c * d).sum();
        if let Some(c) = &self.c_w {
            dobj += inner(c, dw);
        }
        let lin: Vec<(f64, f64)> = self
            .linear
            .iter()
            .map(|con| {
                let ds = inner(&con.g, dw) + con.h.iter().zip(dy).map(|(h, d)| h * d).sum::<f64>();
                (self.slack(con, x), ds)
            })
            .collect();
        let hyp = self.hyper.as_ref().map(|hy| {
            let v = x.y[hy.var];
            let dv = dy[hy.var];
            (self.hyper_slack(hy, x), inner(&hy.s, dw) - 2.0 * v * dv, dv * dv)
        });
        let mut max_step = f64::INFINITY;
        for &m in &mu {
            if m < 0.0 {
                max_step = max_step.min(-1.0 / m);
            }
        }
        for &(s, ds) in &lin {
            if ds < 0.0 {
                max_step = max_step.min(-s / ds);
            }
        }
        Some(LineModel { t, dobj, mu, lin, hyp, max_step })
    }

    pub fn solve(&self, x0: Point, settings: &BarrierSettings) -> BarrierOutcome {
        let mut x = x0;
        let mut t = settings.t0;
        let mut steps = 0usize;
        let nu = self.nu();
        loop {
            let mut centered = false;
            for _ in 0..MAX_CENTERING_STEPS {
                if steps >= settings.max_newton_steps {
                    break;
                }
                let Some((dw, dy, dec2)) = self.newton(t, &x) else {
                    break;
                };
                steps += 1;
                if !(dec2.is_finite()) {
                    break;
                }
                if dec2 / 2.0 <= CENTERING_TOL {
                    centered = true;
                    break;
                }
                let Some(line) = self.line_model(t, &x, &dw, &dy) else {
                    break;
                };
                let mut alpha = (0.99 * line.max_step).min(1.0);
                let mut accepted = false;
                while alpha > 1e-14 {
                    if let Some(delta) = line.delta(alpha) {
                        if delta <= -0.25 * alpha * dec2 {
                            accepted = true;
                            break;
                        }
                    }
                    alpha *= 0.5;
                }
                if !accepted {
                    // no progress possible at this precision
                    centered = true;
                    break;
                }
                x = Self::step(&x, &dw, &dy, alpha);
            }
            if !centered {
                return BarrierOutcome {
                    point: x,
                    newton_steps: steps,
                    converged: false,
                };
            }
            if nu / t <= settings.rel_tol * self.objective(&x).abs().max(settings.abs_floor) {
                return BarrierOutcome {
                    point: x,
                    newton_steps: steps,
                    converged: true,
                };
            }
            t *= settings.growth;
        }
    }
}

/// Solves `A x = b` after symmetric diagonal scaling; falls back to a
/// truncated SVD when the scaled matrix is numerically singular.
fn solve_equilibrated(a: DMatrix<f64>, b: DVector<f64>) -> Option<DVector<f64>> {
    let d = DVector::from_iterator(a.nrows(), a.diagonal().iter().map(|v| {
        let m = v.abs();
        if m > 0.0 && m.is_finite() {
            1.0 / m.sqrt()
        } else {
            1.0
        }
    }));
    let scaled = DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| d[i] * a[(i, j)] * d[j]);
    let rhs = b.component_mul(&d);
    let z = match scaled.clone().lu().solve(&rhs) {
        Some(z) if z.iter().all(|v| v.is_finite()) => z,
        _ => {
            let svd = scaled.svd(true, true);
            let eps = 1e-14 * svd.singular_values.max();
            svd.solve(&rhs, eps).ok()?
        }
    };
    Some(z.component_mul(&d))
}

struct LineModel {
    t: f64,
    dobj: f64,
    /// Eigenvalues of `L⁻¹ ΔW L⁻ᴴ` with `W = L Lᴴ`.
    mu: Vec<f64>,
    /// `(slack, directional derivative)` per linear constraint.
    lin: Vec<(f64, f64)>,
    /// `(slack, linear coefficient, quadratic coefficient)` of the hyperbolic slack.
    hyp: Option<(f64, f64, f64)>,
    max_step: f64,
}

impl LineModel {
    /// `φ(x + α d) − φ(x)`, or `None` outside the domain.
    fn delta(&self, alpha: f64) -> Option<f64> {
        let mut d = -self.t * alpha * self.dobj;
        for &m in &self.mu {
            let r = alpha * m;
            if !(r > -1.0) {
                return None;
            }
            d -= r.ln_1p();
        }
        for &(s, ds) in &self.lin {
            let r = alpha * ds / s;
            if !(r > -1.0) {
                return None;
            }
            d -= r.ln_1p();
        }
        if let Some((q, dq, dv2)) = self.hyp {
            let r = (alpha * dq - alpha * alpha * dv2) / q;
            if !(r > -1.0) {
                return None;
            }
            d -= r.ln_1p();
        }
        d.is_finite().then_some(d)
    }
}
