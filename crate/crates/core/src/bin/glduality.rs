use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use glduality::experiment::{
    create_dir, error_exit_code, exit_code, init_threads, parse_values, sweep, sweep_csv, write_text, Experiment,
    Suite,
};
use glduality::{CheckReport, Error, Result};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Command {
    /// Newton solve; writes u0.csv and solve.json.
    Solve,
    /// Run verification suites; writes one JSON report per suite.
    Verify,
    /// Run a suite over a list of parameter values; writes sweep.csv.
    Sweep,
    /// Brute-force biconjugate; writes biconj.csv and biconj.json.
    Biconj,
}

/// Numerical lab for Ginzburg–Landau duality formulations.
///
/// Exit codes: 0 all checks pass, 1 a check failed, 2 usage or config
/// error, 3 solver or premise failure. GLDUALITY_THREADS sets the number
/// of worker threads.
#[derive(Debug, Parser)]
#[command(version)]
struct Cli {
    command: Command,
    #[arg(long)]
    config: PathBuf,
    /// thm1, thm2, thm3-penalty, toland, exact-dual, biconj or all.
    #[arg(long)]
    suite: Option<String>,
    /// K, K1, eps, eps1, gamma, alpha, beta or n.
    #[arg(long)]
    param: Option<String>,
    /// Comma-separated sweep values.
    #[arg(long)]
    values: Option<String>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(error_exit_code(&e))
        }
    }
}

fn run(cli: &Cli) -> Result<u8> {
    init_threads()?;
    let exp = Experiment::from_file(&cli.config)?;
    match cli.command {
        Command::Solve => {
            let solved = exp.solve()?;
            exp.write_solution(&solved, &cli.out)?;
            println!(
                "newton: {} iterations, residual {:e}, K = {}",
                solved.solve.iterations, solved.solve.final_residual, solved.reg.k_big
            );
            Ok(if solved.solve.converged { 0 } else { 3 })
        }
        Command::Verify => {
            let names = match &cli.suite {
                Some(s) => vec![s.clone()],
                None => exp.config.checks.suites.clone(),
            };
            let suites = names.iter().map(|s| s.parse()).collect::<Result<Vec<Suite>>>()?;
            create_dir(&cli.out)?;
            let mut code = 0;
            for s in suites {
                let rep = exp.run_suite(s)?;
                code = code.max(save_report(&rep, &cli.out)?);
            }
            Ok(code)
        }
        Command::Sweep => {
            let (Some(param), Some(values)) = (&cli.param, &cli.values) else {
                return Err(Error::Config("sweep needs --param and --values".into()));
            };
            let param = param.parse()?;
            let values = parse_values(values)?;
            let suite: Suite = cli.suite.as_deref().unwrap_or("all").parse()?;
            let rows = sweep(&exp, suite, param, &values)?;
            create_dir(&cli.out)?;
            let csv = sweep_csv(param, &rows);
            write_text(&cli.out.join("sweep.csv"), &csv)?;
            print!("{csv}");
            let failed = rows.iter().any(|r| r.outcome.as_ref().map_or(true, |s| !s.passed));
            Ok(if failed { 1 } else { 0 })
        }
        Command::Biconj => {
            let p = exp.biconj_params()?;
            let c = &exp.config.checks;
            let b = glduality::biconjugate::biconjugate_bruteforce(
                &glduality::functional::gl_dc_split(&p),
                -c.biconj_box,
                c.biconj_box,
                c.biconj_points,
            )?;
            create_dir(&cli.out)?;
            write_text(&cli.out.join("biconj.csv"), &b.to_csv())?;
            let mut rep = b.report();
            rep.config_echo = serde_json::to_value(&exp.config)?;
            save_report(&rep, &cli.out)
        }
    }
}

fn save_report(rep: &CheckReport, out: &Path) -> Result<u8> {
    write_text(&out.join(format!("{}.json", rep.suite)), &(rep.to_json()? + "\n"))?;
    print!("{rep}");
    Ok(exit_code(rep))
}
