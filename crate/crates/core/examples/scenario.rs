//! Runs a figure scenario from a built-in preset and lists what it wrote.
//!
//! `cargo run --release --example scenario -- fig4-roots case-i-n48`

use orbitsum::scenario::{preset, run_scenario, Scenario, ScenarioName, ScenarioOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let name: ScenarioName = args.next().as_deref().unwrap_or("fig4-roots").parse()?;
    let cfg = match args.next() {
        Some(p) => Some(preset(&p).ok_or_else(|| format!("no preset `{p}`"))?),
        None if name.needs_config() => preset("case-i-n48"),
        None => None,
    };
    let out = std::env::temp_dir().join("orbitsum-example");
    let rep = run_scenario(&Scenario::new(name, cfg, ScenarioOptions::default())?, &out)?;
    println!("{} -> {}", rep.scenario, out.join(name.as_str()).display());
    for f in &rep.files {
        println!("  {f}");
    }
    for (check, ok) in &rep.checks {
        println!("  {} {check}", if *ok { "ok  " } else { "FAIL" });
    }
    Ok(())
}
