//! End-to-end mock experiment: run the shipped two-patient and two-myopic
//! conditions with scripted chat backends, then print the cross-condition
//! report with a Welch one-sided test.
//!
//! ```bash
//! cargo run --example scripted_experiment
//! ```

use pricelab::cli::{cmd_report, run_condition};
use pricelab::config::ConfigFile;
use std::io::Write;
use std::path::{Path, PathBuf};

fn main() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../..");
    let out_base = std::env::temp_dir().join("pricelab_scripted_experiment");
    let _ = std::fs::remove_dir_all(&out_base);

    let mut stdout = std::io::stdout().lock();
    let mut dirs: Vec<PathBuf> = Vec::new();
    for name in ["two_patient", "two_myopic"] {
        let cfg = ConfigFile::load(&root.join(format!("configs/{name}.toml"))).expect("config loads");
        let out_dir = out_base.join(name);
        writeln!(stdout, "=== {} ({} runs) ===", cfg.name, 3).unwrap();
        run_condition(&mut stdout, &cfg, &out_dir, 3, 2).expect("condition runs");
        writeln!(stdout).unwrap();
        dirs.push(out_dir);
    }

    writeln!(stdout, "=== cross-condition report ===").unwrap();
    cmd_report(&mut stdout, &dirs).expect("report renders");
    writeln!(stdout, "\nartifacts under {}", out_base.display()).unwrap();
}
