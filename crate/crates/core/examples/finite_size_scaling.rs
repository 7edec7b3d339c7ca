//! Long-time width σ̄ against lattice size, evolving each size until the
//! front reaches the edge.

use std::f64::consts::{FRAC_PI_3, FRAC_PI_4};

use qwalk::ensemble::{run_fss, SimulationConfig, DEFAULT_TAIL_FRACTION};
use qwalk::noise::{NoiseAxis, NoiseKind, NoiseSpec};

fn main() -> qwalk::Result<()> {
    let sizes = [2001, 4001, 8001];
    for (kind, axis) in [
        (NoiseKind::BinaryPair, NoiseAxis::Spatial),
        (NoiseKind::RandomBinary, NoiseAxis::Spatial),
        (NoiseKind::RandomBinary, NoiseAxis::Temporal),
    ] {
        let noise = NoiseSpec::new(kind, axis, FRAC_PI_3, FRAC_PI_4, 0);
        let result = run_fss(
            &SimulationConfig::new(0, noise, 8),
            &sizes,
            DEFAULT_TAIL_FRACTION,
        )?;
        println!(
            "{kind:?} / {axis:?}: sigma_bar ~ N^{:.3}",
            result.scaling.slope
        );
        for row in &result.rows {
            println!(
                "  N={:6}  T={:5}  sigma_bar={:8.2} ± {:.2}",
                row.lattice_size, row.steps, row.sigma_bar, row.stderr
            );
        }
    }
    Ok(())
}
