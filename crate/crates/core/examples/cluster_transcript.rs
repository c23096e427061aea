//! Full per-server transcript of one truncated approximate MatDot round.

use std::collections::BTreeSet;

use cdmm::coding::equispaced_points;
use cdmm::experiments::{sample_unit_matrix, trial_rng};
use cdmm::fixedpoint::parse_rational;
use cdmm::{run_cluster, Precision, SchemeSpec};

fn main() -> cdmm::Result<()> {
    let mut rng = trial_rng(5, 0);
    let u = sample_unit_matrix(1, 3, 16, 10, &mut rng);
    let v = sample_unit_matrix(3, 1, 16, 10, &mut rng);
    let points = equispaced_points(&parse_rational("1e-4")?, 3);
    let spec = SchemeSpec::amd(3, points, Precision::Digits(12), Precision::Digits(12), 10)?;
    let run = run_cluster(&u, &v, &spec, &BTreeSet::new())?;
    print!("{}", run.transcript());
    let decoded = run.decode()?;
    println!("C_hat = {}", decoded.render(12, 10)?);
    println!(
        "UV    = {}",
        u.matmul(&v)?.try_map(|x| cdmm::truncate(x, 12, 10))?
    );
    Ok(())
}
