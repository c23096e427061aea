//! Approximate MatDot from p answers: points chosen for a target error, then
//! minimum-norm decoding of an untruncated pipeline.

use std::collections::BTreeSet;

use cdmm::experiments::{sample_unit_matrix, trial_rng};
use cdmm::fixedpoint::{parse_rational, rational_to_f64};
use cdmm::{run_cluster, select_amd_points, ExactRational, NormBound, Precision, SchemeSpec};

fn main() -> cdmm::Result<()> {
    let p = 3;
    let eps = parse_rational("1e-3")?;
    let norm = NormBound::from_eta_squared(ExactRational::from_integer(3.into()))?;
    let points = select_amd_points(&eps, &norm, p, p)?;
    println!(
        "alpha_max = {:.4e}",
        rational_to_f64(points.last().unwrap())
    );

    let mut rng = trial_rng(11, 0);
    let u = sample_unit_matrix(1, 3, 8, 10, &mut rng);
    let v = sample_unit_matrix(3, 1, 8, 10, &mut rng);
    let spec = SchemeSpec::amd(p, points, Precision::Exact, Precision::Exact, 10)?;
    let run = run_cluster(&u, &v, &spec, &BTreeSet::new())?;
    let decoded = run.decode()?;
    let err = decoded.c_hat.max_abs_diff(&u.matmul(&v)?)?;
    println!("UV = {:.10}", rational_to_f64(&u.matmul(&v)?.entries()[0]));
    println!(
        "C_hat = {:.10}",
        rational_to_f64(&decoded.c_hat.entries()[0])
    );
    println!(
        "error {:.3e} <= eps {:.0e}: {}",
        rational_to_f64(&err),
        rational_to_f64(&eps),
        err <= eps
    );
    Ok(())
}
