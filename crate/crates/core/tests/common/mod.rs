#![allow(dead_code)]

use hybrid_radar::design::Problem;
use hybrid_radar::linalg::{from_db, CMatrix, CVector};
use hybrid_radar::signal_model::{build_waveform_matrix, raised_cosine_taps, CommWaveformModel, Scenario};
use nalgebra::{DMatrix, SymmetricEigen};

/// N = 16, L = 10, P = 8, I = 2, rolloff 0.22, unit-energy window.
pub fn default_model() -> CommWaveformModel {
    model(0.22, 8, 2, 10, 16)
}

pub fn model(rolloff: f64, p: usize, i: usize, l: usize, n: usize) -> CommWaveformModel {
    let shape = raised_cosine_taps(rolloff, p, i).unwrap();
    build_waveform_matrix(&shape, l).unwrap().with_unit_energy_window(n).unwrap()
}

pub fn problem_db(model: &CommWaveformModel, gr_db: f64, gc_db: f64, n: usize, k: usize) -> Problem {
    Problem::new(&Scenario::new(from_db(gr_db), from_db(gc_db), n, k), model).unwrap()
}

/// Real symmetric embedding `[[Re, −Im], [Im, Re]]` of a Hermitian matrix.
pub fn real_embedding(a: &CMatrix) -> DMatrix<f64> {
    let n = a.nrows();
    DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let z = a[(i % n, j % n)];
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

/// Largest generalized eigenvalue of the pencil `(A, B)`, `B ≻ 0`, through
/// `B^{-1/2} A B^{-1/2}` on the real embedding.
pub fn pencil_max(a: &CMatrix, b: &CMatrix) -> f64 {
    let ar = real_embedding(a);
    let eb = SymmetricEigen::new(real_embedding(b));
    let inv_sqrt = &eb.eigenvectors
        * DMatrix::from_diagonal(&eb.eigenvalues.map(|l| 1.0 / l.sqrt()))
        * eb.eigenvectors.transpose();
    let m = &inv_sqrt * ar * &inv_sqrt;
    let m = (&m + m.transpose()) * 0.5;
    SymmetricEigen::new(m).eigenvalues.max()
}

pub fn quotient(a: &CMatrix, b: &CMatrix, w: &CVector) -> f64 {
    let num = w.dotc(&(a * w)).re;
    let den = w.dotc(&(b * w)).re;
    num / den
}

pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Maximizes `f` over real 2×2 PSD matrices `[[a, c], [c, b]]` with
/// `a + b ≤ tau` by a grid that is repeatedly refined around the best point.
pub fn grid_max_2x2(tau: f64, f: impl Fn(f64, f64, f64) -> f64) -> f64 {
    let feasible = |a: f64, b: f64, c: f64| a >= 0.0 && b >= 0.0 && a + b <= tau * (1.0 + 1e-12) && c * c <= a * b;
    let steps = 60;
    let (mut lo, mut hi) = ([0.0, 0.0, -tau], [tau, tau, tau]);
    let mut best = (f64::NEG_INFINITY, [0.0; 3]);
    for _ in 0..12 {
        for i in 0..=steps {
            for j in 0..=steps {
                for m in 0..=steps {
                    let t = [i, j, m].map(|x| x as f64 / steps as f64);
                    let p: [f64; 3] = std::array::from_fn(|d| lo[d] + t[d] * (hi[d] - lo[d]));
                    if feasible(p[0], p[1], p[2]) {
                        let v = f(p[0], p[1], p[2]);
                        if v > best.0 {
                            best = (v, p);
                        }
                    }
                }
            }
        }
        let span: [f64; 3] = std::array::from_fn(|d| (hi[d] - lo[d]) / 4.0);
        lo = std::array::from_fn(|d| best.1[d] - span[d]);
        hi = std::array::from_fn(|d| best.1[d] + span[d]);
    }
    best.0
}

/// Real 2×2 matrix `[[a, c], [c, b]]` as a complex matrix.
pub fn real_2x2(a: f64, b: f64, c: f64) -> CMatrix {
    use hybrid_radar::linalg::cplx;
    CMatrix::from_row_slice(2, 2, &[cplx(a), cplx(c), cplx(c), cplx(b)])
}
