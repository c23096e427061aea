//! Fixed-point digits: truncation toward zero, exact addition and multiplication.

use cdmm::fixedpoint::{fp_add, fp_mul, parse_rational, top_digits, truncate, TruncatedValue};

fn main() -> cdmm::Result<()> {
    for (x, gamma) in [("0.123456", 3), ("7/3", 5), ("-0.987", 2)] {
        let t = truncate(&parse_rational(x)?, gamma, 10)?;
        println!("truncate({x}, {gamma}) = {t}");
    }

    let a: TruncatedValue = "0.1234".parse()?;
    let b: TruncatedValue = "0.5678".parse()?;
    println!("{a} + {b} = {}", fp_add(&a, &b)?);
    println!("{a} * {b} = {}", fp_mul(&a, &b)?);
    println!("truncated to 4 digits: {}", fp_mul(&a, &b)?.truncate_to(4));

    let w = "0.12345678";
    println!(
        "top 5 digits of {w}: {}",
        top_digits(&parse_rational(w)?, 5, 10)?
    );
    Ok(())
}
