//! A single noiseless Hadamard walk: σ(t) and the two ballistic peaks.

use std::f64::consts::FRAC_PI_4;

use qwalk::noise::AngleSchedule;
use qwalk::observables::{moments_and_sigma, ProbabilityDistribution};
use qwalk::walker::{evolve, initial_state, Spinor};

fn main() -> qwalk::Result<()> {
    let steps = 500;
    let mut state = initial_state(2 * steps + 3, Spinor::balanced())?;
    let schedule = AngleSchedule::homogeneous(FRAC_PI_4);

    evolve(&mut state, &schedule, steps, |s| {
        if s.time() % 100 == 0 {
            let m = moments_and_sigma(s)?;
            println!(
                "t={:4}  <n>={:+.4}  sigma={:.3}  sigma/t={:.4}",
                s.time(),
                m.mean_n,
                m.sigma,
                m.sigma / s.time() as f64
            );
        }
        Ok(())
    })?;

    let dist = ProbabilityDistribution::from_state(&state);
    let (peak, p) = dist
        .iter_relative()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    println!("total probability {:.15}", dist.total());
    println!(
        "highest peak at n={peak} (p={p:.4}); t/sqrt(2) = {:.1}",
        steps as f64 / 2f64.sqrt()
    );
    Ok(())
}
