//! Ensemble-mean final profiles and their semilog tail fits.

use std::f64::consts::{FRAC_PI_3, FRAC_PI_4};

use qwalk::ensemble::{run_profile, SimulationConfig};
use qwalk::noise::{NoiseAxis, NoiseKind, NoiseSpec};
use qwalk::observables::fit_exponential_tail;

fn main() -> qwalk::Result<()> {
    for kind in [NoiseKind::RandomBinary, NoiseKind::BinaryPair] {
        let noise = NoiseSpec::new(kind, NoiseAxis::Spatial, FRAC_PI_3, FRAC_PI_4, 0);
        let dist = run_profile(&SimulationConfig::new(3000, noise, 20))?;
        let tail = fit_exponential_tail(&dist, (10, 400))?;
        println!(
            "{kind:?}: decay {:.4}/site, r2 {:.3}",
            tail.decay_rate, tail.r_squared
        );
        for n in (0..=600).step_by(100) {
            println!("  ln p({n:4}) = {:8.3}", dist.at(n).unwrap().ln());
        }
    }
    Ok(())
}
