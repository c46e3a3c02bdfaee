use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{cplx, trace_re, CMatrix, CVector, Eigh};
use num_complex::Complex64;

/// Outcome of Gaussian randomization.
#[derive(Debug, Clone)]
pub struct Rounded {
    pub vector: CVector,
    pub score: f64,
    /// Index of the winning candidate; `samples` means the eigenvector candidate won.
    pub index: usize,
    pub samples: usize,
}

/// Draws `samples` circularly-symmetric complex Gaussian vectors with
/// covariance `w`, appends the scaled leading eigenvector of `w` as one more
/// candidate and returns the highest-scoring one (first maximizer wins ties).
pub fn randomize_rank_one<F>(w: &CMatrix, samples: usize, mut score: F, seed: u64) -> Result<Rounded>
where
    F: FnMut(&CVector) -> f64,
{
    if samples == 0 {
        return Err(Error::Domain("at least one randomization trial required".into()));
    }
    let n = w.nrows();
    let eig = Eigh::new(w);
    let tr = trace_re(w);
    if !(tr > 0.0) || !(eig.max_value() > 0.0) {
        return Err(Error::DegenerateRounding);
    }
    // W^{1/2} with negative round-off eigenvalues clipped
    let mut factor = eig.vectors.clone();
    for (c, &lam) in eig.values.iter().enumerate() {
        let root = lam.max(0.0).sqrt();
        for r in 0..n {
            factor[(r, c)] *= cplx(root);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = std::f64::consts::FRAC_1_SQRT_2;
    let mut best: Option<(CVector, f64, usize)> = None;
    let mut consider = |v: CVector, idx: usize, best: &mut Option<(CVector, f64, usize)>| {
        let s = score(&v);
        let better = match best {
            None => true,
            Some((_, b, _)) => s > *b || (b.is_nan() && !s.is_nan()),
        };
        if better {
            *best = Some((v, s, idx));
        }
    };
    for i in 0..samples {
        let z = CVector::from_fn(n, |_, _| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            Complex64::new(re * half, im * half)
        });
        consider(&factor * z, i, &mut best);
    }
    consider(eig.vector(0) * cplx(tr.sqrt()), samples, &mut best);

    let (vector, score, index) = best.expect("at least one candidate");
    Ok(Rounded {
        vector,
        score,
        index,
        samples,
    })
}
