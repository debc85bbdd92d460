//! Config-driven run: parse a TOML config, run one suite, and sweep one
//! parameter. Arguments: `[config] [suite] [param values]`, e.g.
//!
//! ```text
//! cargo run --example config_run -- configs/default.toml toland eps 1e-1,1e-2,1e-3
//! ```

use std::path::PathBuf;

use glduality::experiment::{exit_code, parse_values, sweep, sweep_csv, Experiment, Suite, SweepParam};

fn main() -> glduality::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let path = args
        .first()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/configs/default.toml")));
    let suite: Suite = args.get(1).map_or("thm1", String::as_str).parse()?;
    let exp = Experiment::from_file(&path)?;

    let rep = exp.run_suite(suite)?;
    print!("{rep}");
    println!("exit code would be {}", exit_code(&rep));

    if let (Some(param), Some(values)) = (args.get(2), args.get(3)) {
        let param: SweepParam = param.parse()?;
        let rows = sweep(&exp, suite, param, &parse_values(values)?)?;
        print!("{}", sweep_csv(param, &rows));
    }
    Ok(())
}
