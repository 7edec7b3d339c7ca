//! Random and binary-pair coin schedules side by side.

use std::f64::consts::{FRAC_PI_3, FRAC_PI_4};

use qwalk::noise::{generate_schedule, validate_pair_constraint, NoiseAxis, NoiseKind, NoiseSpec};

fn main() -> qwalk::Result<()> {
    for kind in [NoiseKind::RandomBinary, NoiseKind::BinaryPair] {
        let spec = NoiseSpec::new(kind, NoiseAxis::Spatial, FRAC_PI_3, FRAC_PI_4, 2024);
        let schedule = generate_schedule(&spec, 72)?;
        let bits: String = schedule
            .values()
            .iter()
            .map(|&v| if v == spec.theta2 { '2' } else { '1' })
            .collect();
        println!("{kind:?}");
        println!("  {bits}");
        println!(
            "  pairs only: {}",
            validate_pair_constraint(&schedule, spec.theta2)?
        );

        let long = generate_schedule(&spec, 1_000_000)?;
        println!(
            "  theta2 fraction over 10^6 sites: {:.4}",
            long.fraction_of(spec.theta2)
        );

        let doc = schedule.to_document(spec.theta1, spec.theta2)?;
        println!("  as JSON: {}", serde_json::to_string(&doc).unwrap());
    }
    Ok(())
}
