// Save fitted models, load them elsewhere and predict at arbitrary points.

use forcefield::gp::{fit_scalar_field, Dataset, KernelKind, ModelFile};
use forcefield::telemetry::{GeoPoint, LocalPoint};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let x: Vec<LocalPoint> = (0..36)
        .map(|k| LocalPoint::new((k % 6) as f64 * 8.0, (k / 6) as f64 * 8.0))
        .collect();
    let y: Vec<f64> = x.iter().map(|p| 3.0 + 0.02 * p.x - 0.01 * p.y).collect();
    let model = fit_scalar_field(
        &Dataset::new(x, y)?,
        KernelKind::SquaredExponential,
        80,
        0,
        true,
    )?;

    let file = ModelFile {
        name: "depth".into(),
        origin: GeoPoint::new(34.0, -81.0)?,
        model,
    };
    let text = file.to_text();
    println!("{}", text.lines().take(5).collect::<Vec<_>>().join("\n"));

    let loaded = ModelFile::from_text(&text)?;
    let p = LocalPoint::new(21.0, 13.0);
    let (a, b) = (file.model.predict(&p), loaded.model.predict(&p));
    println!(
        "before save {:.6}, after load {:.6} (truth {:.6})",
        a.mean,
        b.mean,
        3.0 + 0.02 * 21.0 - 0.01 * 13.0
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
