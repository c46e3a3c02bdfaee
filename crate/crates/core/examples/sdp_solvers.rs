//! The three relaxed subproblem solvers on small random instances.

use hybrid_radar::linalg::{cplx, identity, leading_eigenpair, outer, CMatrix, CVector};
use hybrid_radar::sdp::{
    maximize_affine_trace, randomize_rank_one, solve_concave_sqrt, solve_maxmin_affine, AffineForm, PsdProgram,
    SolverConfig, SqrtTerm,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let a = CMatrix::from_fn(n, n, |_, _| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    (&a + a.adjoint()) * cplx(0.5)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let n = 4;
    let cfg = SolverConfig::default();

    // linear objective: the answer is the top eigenvalue
    let a = random_hermitian(&mut rng, n);
    let (_, value) = maximize_affine_trace(&a, 1.0);
    println!("max tr(AW) = {value:.6}, lambda_max = {:.6}", leading_eigenpair(&a).0);

    let forms: Vec<AffineForm> = (0..3).map(|_| AffineForm::new(0.1, random_hermitian(&mut rng, n))).collect();
    let res = solve_maxmin_affine(&PsdProgram::max_min(1.0, forms.clone())?, &cfg)?;
    let vals: Vec<f64> = forms.iter().map(|f| f.eval(&res.w)).collect();
    println!("max-min: objective {:.6} after {} iterations, forms {vals:.4?}", res.objective, res.iterations);

    let v = CVector::from_fn(n, |i, _| cplx(1.0 + i as f64));
    let terms = vec![SqrtTerm { a: 1.0, b: identity(n) }, SqrtTerm { a: 0.5, b: identity(n) * cplx(2.0) }];
    let res = solve_concave_sqrt(&PsdProgram::concave_sqrt(1.0, outer(&v), terms)?, &cfg)?;
    println!("concave sqrt: objective {:.6}", res.objective);

    let r = randomize_rank_one(&res.w, 100, |x| x.norm_squared(), 3)?;
    println!("rounded vector energy {:.6} (candidate {} of {})", r.score, r.index, r.samples);
    Ok(())
}
