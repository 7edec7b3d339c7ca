//! Ensemble σ(t) and the fitted exponent α for correlated and uncorrelated
//! spatial noise.
//!
//! ```text
//! cargo run --release --example spreading_exponent -- [steps] [realizations]
//! ```

use std::f64::consts::{FRAC_PI_4, PI};

use qwalk::ensemble::{run_ensemble, SimulationConfig};
use qwalk::noise::{NoiseAxis, NoiseKind, NoiseSpec};

fn main() -> qwalk::Result<()> {
    let mut args = std::env::args()
        .skip(1)
        .map(|a| a.parse::<usize>().expect("integer argument"));
    let steps = args.next().unwrap_or(3000);
    let realizations = args.next().unwrap_or(20);

    for theta1 in [PI / 3.0, 4.0 * PI / 15.0] {
        for kind in [NoiseKind::RandomBinary, NoiseKind::BinaryPair] {
            let noise = NoiseSpec::new(kind, NoiseAxis::Spatial, theta1, FRAC_PI_4, 1);
            let result = run_ensemble(&SimulationConfig::new(steps, noise, realizations))?;
            let fit = &result.fit;
            println!(
                "theta1={:.4}  {:<12?}  alpha={:.3} ± {:.3}  on [{}, {}]  final sigma={:.1}",
                theta1,
                kind,
                fit.alpha,
                fit.stderr_alpha,
                fit.window.0,
                fit.window.1,
                result.series.sigma.last().unwrap()
            );
        }
    }
    Ok(())
}
