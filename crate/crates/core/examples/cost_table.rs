//! Recovery threshold, traffic and per-server compute for each scheme.

use cdmm::analysis::{cost_table, cost_table_csv, render_cost_table};
use cdmm::ExactRational;

fn main() -> cdmm::Result<()> {
    let reports = cost_table(3, &ExactRational::from_integer(4.into()))?;
    print!("{}", render_cost_table(&reports));
    println!();
    print!("{}", cost_table_csv(&reports));
    Ok(())
}
