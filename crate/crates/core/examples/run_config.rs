//! Drives the command-line interface from code with a TOML configuration.

use halfbind::cli::{run, RunConfig};

const CONFIG: &str = r#"
hbar = 0.5

[boundary]
q_i = 2.0
t_f = 50.0

[boundary.target]
kind = "asymptotic_velocity"
v = 1.0

[scan]
start = 20.0
stop = 320.0
count = 5
spacing = "geometric"

[counterterm]
method = "analytic_inverse_square"
"#;

fn main() {
    let config = RunConfig::from_toml(CONFIG).expect("valid configuration");
    let dir = std::env::temp_dir().join("halfbind-run-config");
    std::fs::create_dir_all(&dir).expect("temp dir");
    let path = dir.join("run.toml");
    std::fs::write(&path, toml::to_string(&config).expect("serializable")).expect("write config");

    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(
        [
            "halfbind",
            "scan",
            "--format",
            "json",
            "--config",
            path.to_str().unwrap(),
        ],
        &mut out,
        &mut err,
    );
    println!("exit status {code}");
    print!("{}", String::from_utf8_lossy(&out));
    eprint!("{}", String::from_utf8_lossy(&err));
}
