//! α as a function of θ₁ with Hadamard pairs, temporal noise.

use std::f64::consts::{FRAC_PI_4, PI};

use qwalk::ensemble::{run_theta_scan, theta_grid, SimulationConfig};
use qwalk::noise::{NoiseAxis, NoiseKind, NoiseSpec};

fn main() -> qwalk::Result<()> {
    let grid = theta_grid(0.0, PI, PI / 12.0)?;
    for kind in [NoiseKind::RandomBinary, NoiseKind::BinaryPair] {
        let noise = NoiseSpec::new(kind, NoiseAxis::Temporal, 0.0, FRAC_PI_4, 5);
        let rows = run_theta_scan(&SimulationConfig::new(1000, noise, 10), &grid)?;
        println!("{kind:?}");
        for row in rows {
            println!("  theta1={:5.3}pi  alpha={:.3}", row.theta1 / PI, row.alpha);
        }
    }
    Ok(())
}
