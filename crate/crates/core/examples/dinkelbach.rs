//! Worst-case ratio maximization with the generalized Dinkelbach method.

use hybrid_radar::fractional::{dinkelbach_maxmin, FractionalConfig, Ratio, RatioFamily};
use hybrid_radar::linalg::{cplx, identity, outer, CMatrix, CVector};
use hybrid_radar::sdp::AffineForm;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 3;
    let s = CVector::from_vec(vec![cplx(1.0), cplx(0.5), cplx(-0.25)]);
    let ratios = (0..3)
        .map(|k| {
            let d = CMatrix::from_fn(n, n, |i, j| if i == j { cplx(1.0 + (i + k) as f64 * 0.5) } else { cplx(0.0) });
            Ratio {
                numerator: AffineForm::linear(outer(&s) * cplx(10.0)),
                denominator: AffineForm::linear(&d + identity(n)),
                offset: 0.1 * k as f64,
            }
        })
        .collect();
    let family = RatioFamily::new(ratios)?;
    let res = dinkelbach_maxmin(&family, 1.0, &FractionalConfig { epsilon: 1e-6, ..Default::default() })?;
    println!("lambda trace: {:.6?}", res.trace);
    println!("worst-case ratio {:.6}, residual {:.2e}, converged {}", res.value, res.residual, res.converged);
    Ok(())
}
