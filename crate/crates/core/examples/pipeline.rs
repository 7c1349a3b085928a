// The whole chain from a config file: simulate, align, fuse, fit, map and
// compare kernels.

use forcefield::config::{Ini, PipelineConfig};
use forcefield::pipeline::run_pipeline;

const CONFIG: &str = "
[scenario]
mission = lake-01
origin = 34.0, -81.0
seed = 11
speed = 2.0
lawnmower = 0,0, 60,60, 15
noise = 0.1

[field]
wind = uniform 2 0
current = polar 2.5 30
depth = channel 0 30 90 2.0 12 0.5

[gp]
kernel = matern32
budget = 40

[grid]
res = 3
margin = 2
";

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let ini: Ini = CONFIG.parse()?;
    let dir = tempfile::tempdir()?;
    let mut cfg = PipelineConfig::from_ini(&ini)?;
    cfg.out_dir = dir.path().to_path_buf();

    let report = run_pipeline(&cfg)?;
    println!("{} aligned tuples", report.tuples);
    for s in &report.scores {
        if s.phenomenon.starts_with("current") {
            println!(
                "{:>20} {:<10} held-out RMSE {:.3}",
                s.kernel, s.phenomenon, s.rmse
            );
        }
    }
    let mut files: Vec<_> = walk(dir.path())?;
    files.sort();
    for f in files {
        println!("  {}", f.strip_prefix(dir.path())?.display());
    }
    Ok(())
}

fn walk(dir: &std::path::Path) -> std::io::Result<Vec<std::path::PathBuf>> {
    let mut out = Vec::new();
    for e in std::fs::read_dir(dir)? {
        let p = e?.path();
        if p.is_dir() {
            out.extend(walk(&p)?);
        } else {
            out.push(p);
        }
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
