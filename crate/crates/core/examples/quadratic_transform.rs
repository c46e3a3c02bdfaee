//! Sum-of-ratios maximization by the quadratic transform.

use hybrid_radar::fractional::{quadratic_transform_sum, sum_of_ratios, FractionalConfig};
use hybrid_radar::linalg::{cplx, identity, outer, CMatrix, CVector};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 4;
    let s = outer(&CVector::from_fn(n, |i, _| cplx(1.0 / (1.0 + i as f64))));
    let b: Vec<CMatrix> = (0..3)
        .map(|k| {
            let v = CVector::from_fn(n, |i, _| cplx(((i + k) % n) as f64));
            outer(&v) * cplx(0.3) + identity(n)
        })
        .collect();
    let a = vec![1.0, 1.0, 2.0];
    let res = quadratic_transform_sum(&s, &b, &a, 1.0, None, &FractionalConfig::default())?;
    println!("objective trace {:.6?}", res.trace);
    println!("final slacks {:.4?}", res.slacks);
    println!("sum of ratios at the solution: {:.6}", sum_of_ratios(&s, &b, &a, &res.w));
    Ok(())
}
