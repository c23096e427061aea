//! MAE versus upload precision for approximate MatDot with p = N = 3.
//!
//! `cargo run --release --example fig2_gamma_sweep -- [trials]`

use cdmm::experiments::{sweep_gamma, ExperimentConfig};
use cdmm::fixedpoint::parse_rational;

fn main() -> cdmm::Result<()> {
    let trials = std::env::args()
        .nth(1)
        .map_or(Ok(2000), |s| s.parse())
        .expect("trials");
    let cfg = ExperimentConfig {
        trials,
        ..ExperimentConfig::default()
    };
    let gammas: Vec<u32> = (4..=16).collect();
    let result = sweep_gamma(&cfg, &gammas, &parse_rational("1e-4")?)?;
    print!("{}", result.to_csv());
    Ok(())
}
