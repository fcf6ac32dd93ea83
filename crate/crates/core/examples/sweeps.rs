//! The three parameter sweeps, summarised. Pass a directory to also write
//! each table as CSV.

use rade_bounds::simulation::{sweep, SweepConfig};

fn main() -> rade_bounds::Result<()> {
    let out = std::env::args().nth(1);
    let configs = [
        ("era_n10", SweepConfig::figure1(10)),
        ("rc_n1", SweepConfig::figure2(1)),
        ("sd_m1000", SweepConfig::figure3(1000)),
    ];
    for (name, cfg) in configs {
        let table = sweep(&cfg)?;
        println!("{name}: {} rows, columns {}", table.rows.len(), table.columns.join(","));
        if let Some(dir) = &out {
            std::fs::write(format!("{dir}/{name}.csv"), table.to_csv())?;
        }
    }
    let ratio = sweep(&SweepConfig::figure3(1000))?.column("ratio").expect("ratio column");
    let above = ratio.iter().filter(|r| **r > 1.0).count();
    println!("bousquet/sb ratio above 1 on {above} of {} grid points", ratio.len());
    Ok(())
}
