//! Driving experiments from a config string, as the CLI does.

use graphon_dynamics::runner::{parse_config, run};

fn main() -> graphon_dynamics::Result<()> {
    let out = std::env::temp_dir().join("graphon-sim-example");
    let text = format!(
        "mode = sde
seed = 12
output_dir = {}

[hamiltonian]
term.triangle = 1
term.edge = -0.25

[sde]
r = 3
sigma = 0.3
horizon_t = 0.5
record_every = 100
replicas = 16
",
        out.display()
    );
    let cfg = parse_config(&text)?;
    for w in &cfg.warnings {
        println!("warning: {w}");
    }
    println!("{}", cfg.to_text());
    let summary = run(&cfg, &mut std::io::stdout())?;
    for f in summary.files {
        println!("wrote {}", f.display());
    }
    Ok(())
}
