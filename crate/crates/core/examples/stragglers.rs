//! Straggler tolerance of the three schemes with N = 3 servers and p = 2 blocks.

use std::collections::BTreeSet;

use cdmm::coding::equispaced_points;
use cdmm::fixedpoint::parse_rational;
use cdmm::{run_cluster, Error, Precision, RationalMatrix, SchemeKind, SchemeSpec};

fn main() -> cdmm::Result<()> {
    let u = RationalMatrix::from_integers(1, 2, &[3, 5])?;
    let v = RationalMatrix::from_integers(2, 1, &[2, 7])?;
    let digits = Precision::Digits(12);
    let small = equispaced_points(&parse_rational("1e-3")?, 3);
    let specs = [
        SchemeSpec::matdot(
            2,
            equispaced_points(&parse_rational("3")?, 3),
            digits,
            digits,
            10,
        )?,
        SchemeSpec::amd(2, small, digits, digits, 10)?,
        SchemeSpec::repetition(3, digits, digits, 10)?,
    ];
    for spec in &specs {
        for k in 0..=2usize {
            let stragglers: BTreeSet<usize> = (1..=k).collect();
            let outcome = match run_cluster(&u, &v, spec, &stragglers) {
                Ok(run) => format!("decoded {}", run.decode()?.render(4, 10)?),
                Err(Error::ThresholdViolation {
                    required,
                    available,
                }) => {
                    format!("needs {required}, only {available} answered")
                }
                Err(e) => return Err(e),
            };
            let name = match spec.kind() {
                SchemeKind::MatDot => "matdot",
                SchemeKind::Amd => "amd",
                SchemeKind::Repetition => "repetition",
            };
            println!("{name:<10} stragglers {stragglers:?}: {outcome}");
        }
    }
    Ok(())
}
