//! Decoding-matrix conditioning grows like B^((p-1) delta) as the points shrink.

use cdmm::coding::equispaced_points;
use cdmm::fixedpoint::base_pow_rational;
use cdmm::vandermonde_condition;

fn main() -> cdmm::Result<()> {
    for p in [2usize, 3, 4] {
        for delta in 1..=4 {
            let points = equispaced_points(&base_pow_rational(10, -delta), p);
            let c = vandermonde_condition(&points, p, 10)?;
            println!(
                "p = {p}, delta = {delta}: log10 cond = {c:.3} ((p-1) delta = {})",
                (p as i32 - 1) * delta
            );
        }
    }
    Ok(())
}
