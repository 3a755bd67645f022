// Running a config-driven experiment and writing its report.

use framelab::cli::{self, ExperimentConfig};

const CONFIG: &str = r#"
kind = "approximate"
seed = 11

[parameters]
frame = "doubled_onb(4)"
j = 4
"#;

pub fn run_example() -> framelab::Result<()> {
    let config = ExperimentConfig::parse(CONFIG)?;
    let report = cli::run(&config)?;
    for v in &report.verdicts {
        println!("{:<36} {}", v.invariant, if v.pass { "pass" } else { "FAIL" });
    }
    let dir = std::env::temp_dir().join(format!("framelab-example-{}", std::process::id()));
    cli::write_outputs(&report, &dir)?;
    println!("wrote {}", dir.join("report.json").display());
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("experiment runner example");
}
