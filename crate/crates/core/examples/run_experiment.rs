//! Drive a subcommand from an inline TOML config, as `discevo` does.
use discrete_evolution::config::ExperimentConfig;
use discrete_evolution::experiments::{run, Subcommand};

const CONFIG: &str = r#"
seed = 11
experiment = "decay"

[operator]
kind = "laplacian"
window = [-96, 96]

[probe]
eps = 0.1
horizon = 1.0
"#;

fn main() -> discrete_evolution::Result<()> {
    let cfg = ExperimentConfig::from_toml(CONFIG)?;
    println!("config digest {}", cfg.digest());
    let dir = std::env::temp_dir().join("discevo-example");
    for cmd in [Subcommand::Simulate, Subcommand::Probe, Subcommand::Stationary] {
        let out = run(cmd, &cfg, &dir.join(cmd.name()), true)?;
        println!("{:<11} passed {}  artifacts {:?}", cmd.name(), out.passed, out.artifacts);
    }
    println!("{}", std::fs::read_to_string(dir.join("probe/probe.json"))?.lines().take(6).collect::<Vec<_>>().join("\n"));
    Ok(())
}
