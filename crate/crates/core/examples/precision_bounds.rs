//! Precision calculators: what survives decoding, and what the uploads must carry.

use cdmm::analysis::{
    clamped_precision_bound, predicted_precision, required_upload_precision, theorem1_alpha_bound,
};
use cdmm::fixedpoint::{parse_rational, rational_to_f64};
use cdmm::{NormBound, PrecisionBudget};

fn main() -> cdmm::Result<()> {
    let p = 3;
    for (nu_y, delta) in [("12", "4"), ("12", "2"), ("12", "6"), ("18", "6")] {
        let b = PrecisionBudget::symmetric(parse_rational(nu_y)?, parse_rational(delta)?, p)?;
        println!(
            "nu_y = {nu_y:>2}, delta = {delta}: predicted {} (clamped form {})",
            predicted_precision(&b),
            clamped_precision_bound(&b)
        );
    }
    let nu = parse_rational("4")?;
    println!(
        "required upload for nu = 4, p = 3: {}",
        required_upload_precision(&nu, p)?
    );

    let bound = theorem1_alpha_bound(
        &parse_rational("1e-2")?,
        &NormBound::from_eta_squared(parse_rational("100")?)?,
        p,
        10,
    )?;
    println!(
        "alpha bound {:.6e}, delta {:.3}",
        rational_to_f64(&bound.value),
        bound.delta
    );
    Ok(())
}
