// Recover a kernel lengthscale by maximizing the log marginal likelihood.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use forcefield::gp::{lml_of, optimize_hyperparams, Dataset, KernelKind, KernelSpec};
use forcefield::telemetry::LocalPoint;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let x: Vec<LocalPoint> = (0..150)
        .map(|_| LocalPoint::new(rng.random_range(0.0..100.0), rng.random_range(0.0..100.0)))
        .collect();
    // smooth field with ~10 m features plus 5 cm noise
    let y: Vec<f64> = x
        .iter()
        .map(|p| (p.x / 10.0).sin() * (p.y / 12.0).cos() + rng.random_range(-0.05..0.05))
        .collect();
    let data = Dataset::new(x.clone(), y.clone())?;

    let init = KernelSpec::initial_guess(KernelKind::Matern32, &x, &y);
    let best = optimize_hyperparams(&data, KernelKind::Matern32, &init, 200, 1)?;
    println!(
        "start:  amplitude {:.3}, lengthscale {:>6.2} m, noise {:.2e}, LML {:.1}",
        init.amplitude,
        init.lengthscale,
        init.noise,
        lml_of(&data, &init)
    );
    println!(
        "result: amplitude {:.3}, lengthscale {:>6.2} m, noise {:.2e}, LML {:.1}",
        best.amplitude,
        best.lengthscale,
        best.noise,
        lml_of(&data, &best)
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
