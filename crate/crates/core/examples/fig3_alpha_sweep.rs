//! MAE versus the largest evaluation point at gamma = 12, with the repetition
//! baseline at 4 digits.
//!
//! `cargo run --release --example fig3_alpha_sweep -- [trials]`

use cdmm::experiments::{sweep_alpha, ExperimentConfig};

fn main() -> cdmm::Result<()> {
    let trials = std::env::args()
        .nth(1)
        .map_or(Ok(2000), |s| s.parse())
        .expect("trials");
    let cfg = ExperimentConfig {
        trials,
        ..ExperimentConfig::default()
    };
    let exps: Vec<i32> = (-7..=-1).collect();
    let result = sweep_alpha(&cfg, 12, &exps, Some(4))?;
    print!("{}", result.to_csv());
    if let Some(best) = result.argmin() {
        println!("# best alpha_max = 1e{best}");
    }
    Ok(())
}
