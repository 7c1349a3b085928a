// Gaussian Process regression on scattered 2-D samples: fit, predict with
// uncertainty, and compare kernels by log marginal likelihood.

use forcefield::gp::{fit, Dataset, KernelKind, KernelSpec};
use forcefield::telemetry::LocalPoint;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    // depth-like surface sampled along three transects
    let mut x = Vec::new();
    let mut y = Vec::new();
    for leg in 0..3 {
        for k in 0..15 {
            let p = LocalPoint::new(leg as f64 * 20.0, k as f64 * 4.0);
            x.push(p);
            y.push(2.0 - 1.5 * (-(p.y - 30.0).powi(2) / 200.0).exp());
        }
    }
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let data = Dataset::new(x, y.iter().map(|v| v - mean).collect())?;

    let k = KernelSpec::new(KernelKind::Matern32, 0.5, 15.0, 1e-3)?;
    let model = fit(&data, &k)?;
    for probe in [
        LocalPoint::new(20.0, 30.0),
        LocalPoint::new(10.0, 30.0),
        LocalPoint::new(80.0, 30.0),
    ] {
        let p = model.predict(&probe);
        println!(
            "({:>4}, {:>4}): depth {:.3} m ± {:.3}",
            probe.x,
            probe.y,
            p.mean + mean,
            p.variance.sqrt()
        );
    }

    for kind in KernelKind::ALL {
        let m = fit(&data, &KernelSpec { kind, ..k })?;
        println!(
            "{kind:>20}: log marginal likelihood {:.2}",
            m.log_marginal_likelihood()
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
