//! Command-line front end: solve runs, boundary-condition audits, map
//! audits, and convergence sweeps driven by a JSON configuration file.
//!
//! Exit codes: 0 success, 2 configuration error, 3 solver did not converge
//! (reports are still written), 4 audit failure.

use clap::{Args, Parser, Subcommand};
use quadpde::geometry::CATALOG_NAMES;
use quadpde::harness::{
    bc_audit, catalog_map, convergence, convergence_csv, map_audit, run_solve, RunConfig,
};
use quadpde::solver::Termination;
use quadpde::Error;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_CONFIG: u8 = 2;
const EXIT_SOLVER: u8 = 3;
const EXIT_AUDIT: u8 = 4;

#[derive(Parser)]
#[command(name = "quadpde", version, about = "PDE solver with exact boundary conditions on curved quadrilateral domains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Path to a JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory for reports (created if missing).
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Override the configuration's base seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the configured problem and write summary.json, solution.csv,
    /// and gridlines.csv.
    Solve(ConfigArgs),
    /// Check that boundary conditions hold to machine precision for random
    /// untrained networks and coefficients.
    BcAudit {
        #[command(flatten)]
        common: ConfigArgs,
        /// Number of random feature networks to test.
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
    /// Audit the domain map: Jacobian positivity and boundary reproduction.
    MapAudit {
        #[command(flatten)]
        common: ConfigArgs,
        /// Audit grid resolution per direction.
        #[arg(long, default_value_t = 51)]
        n: usize,
    },
    /// Solve at several feature counts and write convergence.csv.
    Convergence {
        #[command(flatten)]
        common: ConfigArgs,
        /// Comma-separated feature counts, e.g. 100,200,400.
        #[arg(long, value_delimiter = ',', required = true)]
        m: Vec<usize>,
    },
    /// List the built-in benchmark domains.
    ListDomains,
}

fn load_config(args: &ConfigArgs) -> Result<RunConfig, String> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| format!("reading {}: {e}", args.config.display()))?;
    let mut cfg = RunConfig::from_json(&text).map_err(|e| e.to_string())?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn write_out(dir: &Path, name: &str, body: &str) -> Result<(), String> {
    std::fs::create_dir_all(dir).map_err(|e| format!("creating {}: {e}", dir.display()))?;
    let path = dir.join(name);
    std::fs::write(&path, body).map_err(|e| format!("writing {}: {e}", path.display()))?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn pretty<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

fn config_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_CONFIG)
}

fn cmd_solve(args: &ConfigArgs) -> ExitCode {
    let cfg = match load_config(args) {
        Ok(c) => c,
        Err(e) => return config_error(&e),
    };
    match run_solve(&cfg) {
        Ok(out) => {
            let report = [
                ("summary.json", pretty(&out.summary)),
                ("solution.csv", out.solution_csv),
                ("gridlines.csv", out.gridlines_csv),
            ];
            for (name, body) in &report {
                if let Err(e) = write_out(&args.out, name, body) {
                    return config_error(&e);
                }
            }
            println!(
                "e_max {:.6e}  e_rms {:.6e}  residual {:.3e} -> {:.3e} ({})",
                out.summary.metrics.e_max,
                out.summary.metrics.e_rms,
                out.summary.solve.initial_residual,
                out.summary.solve.final_residual,
                out.summary.solve.termination,
            );
            if out.report.termination == Termination::Converged
                || cfg.problem.is_linear()
            {
                ExitCode::SUCCESS
            } else {
                eprintln!("solver did not converge ({})", out.summary.solve.termination);
                ExitCode::from(EXIT_SOLVER)
            }
        }
        Err(e @ (Error::InvalidConfig(_) | Error::UnknownDomain(_) | Error::NotSupported(_))) => {
            config_error(&e.to_string())
        }
        Err(e) => {
            eprintln!("solver error: {e}");
            ExitCode::from(EXIT_SOLVER)
        }
    }
}

fn cmd_bc_audit(args: &ConfigArgs, trials: usize) -> ExitCode {
    let cfg = match load_config(args) {
        Ok(c) => c,
        Err(e) => return config_error(&e),
    };
    match bc_audit(&cfg, trials) {
        Ok(rep) => {
            if let Err(e) = write_out(&args.out, "bc_audit.json", &pretty(&rep)) {
                return config_error(&e);
            }
            for edge in &rep.edges {
                println!("{:>2} {:<18} max {:.3e}  rms {:.3e}", edge.edge, edge.bc, edge.max, edge.rms);
            }
            if rep.pass {
                println!("PASS: worst boundary residual {:.3e}", rep.worst);
                ExitCode::SUCCESS
            } else {
                println!("FAIL: worst boundary residual {:.3e}", rep.worst);
                ExitCode::from(EXIT_AUDIT)
            }
        }
        Err(e) => config_error(&e.to_string()),
    }
}

fn cmd_map_audit(args: &ConfigArgs, n: usize) -> ExitCode {
    let cfg = match load_config(args) {
        Ok(c) => c,
        Err(e) => return config_error(&e),
    };
    let map = match cfg.resolve_map() {
        Ok(m) => m,
        Err(e) => return config_error(&e.to_string()),
    };
    let rep = map_audit(&map, n);
    if let Err(e) = write_out(&args.out, "map_audit.json", &pretty(&rep)) {
        return config_error(&e);
    }
    println!(
        "min detJ {:.6e} at (ξ,η)=({:.3},{:.3}); sign changes {}; singular corners {}; boundary gap {:.3e}",
        rep.min_det, rep.min_at.0, rep.min_at.1, rep.sign_changes, rep.singular_corners,
        rep.boundary_max_gap,
    );
    if rep.pass {
        println!("PASS");
        ExitCode::SUCCESS
    } else {
        println!("FAIL");
        ExitCode::from(EXIT_AUDIT)
    }
}

fn cmd_convergence(args: &ConfigArgs, m_list: &[usize]) -> ExitCode {
    let cfg = match load_config(args) {
        Ok(c) => c,
        Err(e) => return config_error(&e),
    };
    match convergence(&cfg, m_list) {
        Ok(rows) => {
            if let Err(e) = write_out(&args.out, "convergence.csv", &convergence_csv(&rows)) {
                return config_error(&e);
            }
            for r in &rows {
                println!("M {:>5}  e_rms {:.6e}  e_max {:.6e}", r.m, r.e_rms, r.e_max);
            }
            ExitCode::SUCCESS
        }
        Err(e @ (Error::InvalidConfig(_) | Error::UnknownDomain(_) | Error::NotSupported(_))) => {
            config_error(&e.to_string())
        }
        Err(e) => {
            eprintln!("solver error: {e}");
            ExitCode::from(EXIT_SOLVER)
        }
    }
}

fn cmd_list_domains() -> ExitCode {
    for name in CATALOG_NAMES {
        let map = catalog_map(name).expect("catalog entry resolves");
        let kind = match &map.kind {
            quadpde::mapping::MapKind::Coons => "coons".to_string(),
            quadpde::mapping::MapKind::CoonsCenter { x_i } => {
                format!("coons_center(x_i=({}, {}))", x_i.x, x_i.y)
            }
        };
        println!("{name:<8} {kind}");
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Solve(args) => cmd_solve(&args),
        Command::BcAudit { common, trials } => cmd_bc_audit(&common, trials),
        Command::MapAudit { common, n } => cmd_map_audit(&common, n),
        Command::Convergence { common, m } => cmd_convergence(&common, &m),
        Command::ListDomains => cmd_list_domains(),
    }
}
