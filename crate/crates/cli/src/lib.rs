//! Command-line front end: reads a JSON run configuration, applies flag
//! overrides, dispatches a command and writes its report as CSV or JSON.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::commands::{cmd_charfn, cmd_identities, cmd_spectrum, cmd_verify, Outcome};
use crate::config::{FamilySpec, Format, Grid, RunConfig};
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "jacobi", version, about = "Spectra of Jacobi matrices via their characteristic function")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub shared: SharedArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyKind {
    Asc2,
    Table,
}

/// Flags accepted by every command; each overrides the configuration file.
#[derive(Debug, Default, Args)]
pub struct SharedArgs {
    /// JSON run configuration
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file (stdout when absent)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Decimal digits for the identity suite (at most 31)
    #[arg(long, global = true)]
    pub precision: Option<u32>,
    /// Coefficient family; tables must come from the configuration file
    #[arg(long, global = true, value_enum)]
    pub family: Option<FamilyKind>,
    #[arg(long, global = true)]
    pub q: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub a: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub shift: Option<f64>,
    /// Asserted lower bound of the spectrum
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    #[arg(long, global = true)]
    pub atol: Option<f64>,
    #[arg(long, global = true)]
    pub max_terms: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Smallest k eigenvalues with brackets, residuals and oracle values
    Spectrum {
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        eig_tol: Option<f64>,
    },
    /// Characteristic function on a real grid by two routes
    Charfn {
        /// MIN:MAX:POINTS
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<Grid>,
        #[arg(long)]
        ratio_terms: Option<usize>,
    },
    /// Structural identity suite
    Verify {
        #[arg(long)]
        rtol: Option<f64>,
    },
    /// q-series identity gaps
    Identities {
        /// Comma-separated q values; an empty string gives an empty report
        #[arg(long, allow_hyphen_values = true)]
        q_list: Option<String>,
        #[arg(long)]
        gap_tol: Option<f64>,
    },
}

fn parse_list(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse::<f64>().map_err(|e| CliError::Config(format!("bad q value {p:?}: {e}"))))
        .collect()
}

impl Cli {
    /// The configuration file (or defaults) with every given flag applied.
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.shared.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        let s = &self.shared;
        match s.family {
            Some(FamilyKind::Table) => {
                if !matches!(cfg.family, FamilySpec::Table { .. }) {
                    return Err(CliError::Config("--family table needs alphas and betas in the configuration file".into()));
                }
                if s.q.is_some() || s.a.is_some() {
                    return Err(CliError::Config("--q and --a apply to the asc2 family only".into()));
                }
            }
            Some(FamilyKind::Asc2) | None => {
                if s.family.is_some() || s.q.is_some() || s.a.is_some() {
                    let (q0, a0) = match cfg.family {
                        FamilySpec::Asc2 { q, a } => (q, a),
                        FamilySpec::Table { .. } if s.family.is_none() => {
                            return Err(CliError::Config("--q and --a apply to the asc2 family only".into()));
                        }
                        FamilySpec::Table { .. } => (0.5, 0.5),
                    };
                    cfg.family = FamilySpec::Asc2 { q: s.q.unwrap_or(q0), a: s.a.unwrap_or(a0) };
                }
            }
        }
        if let Some(v) = s.shift {
            cfg.shift = v;
        }
        if let Some(v) = s.gamma {
            cfg.gamma = Some(v);
        }
        if let Some(v) = s.atol {
            cfg.tolerances.atol = v;
        }
        if let Some(v) = s.max_terms {
            cfg.tolerances.max_terms = v;
        }
        if let Some(v) = s.precision {
            cfg.tolerances.precision_digits = Some(v);
        }
        if let Some(v) = s.format {
            cfg.output.format = v;
        }
        if let Some(v) = &s.out {
            cfg.output.path = Some(v.clone());
        }
        match &self.command {
            Command::Spectrum { k, eig_tol } => {
                if let Some(v) = k {
                    cfg.k = *v;
                }
                if let Some(v) = eig_tol {
                    cfg.tolerances.eig_tol = *v;
                }
            }
            Command::Charfn { grid, ratio_terms } => {
                if let Some(v) = grid {
                    cfg.grid = Some(*v);
                }
                if let Some(v) = ratio_terms {
                    cfg.tolerances.ratio_terms = *v;
                }
            }
            Command::Verify { rtol } => {
                if let Some(v) = rtol {
                    cfg.tolerances.rtol = Some(*v);
                }
            }
            Command::Identities { q_list, gap_tol } => {
                if let Some(v) = q_list {
                    cfg.identities.q_list = parse_list(v)?;
                }
                if let Some(v) = gap_tol {
                    cfg.identities.gap_tol = *v;
                }
            }
        }
        Ok(cfg)
    }

    /// Runs the command on an already resolved configuration.
    pub fn dispatch(&self, cfg: &RunConfig) -> Result<Outcome, CliError> {
        match self.command {
            Command::Spectrum { .. } => cmd_spectrum(cfg),
            Command::Charfn { .. } => cmd_charfn(cfg),
            Command::Verify { .. } => cmd_verify(cfg),
            Command::Identities { .. } => cmd_identities(cfg),
        }
    }
}

/// Renders the report in the configured format.
pub fn render(outcome: &Outcome, cfg: &RunConfig) -> Result<String, CliError> {
    match cfg.output.format {
        Format::Csv => outcome.report.to_csv(),
        Format::Json => outcome.report.to_json(),
    }
}

/// Full run: resolve, dispatch, write. Returns the process exit status.
pub fn run(cli: &Cli) -> i32 {
    let result = cli.resolve().and_then(|cfg| {
        let outcome = cli.dispatch(&cfg)?;
        let text = render(&outcome, &cfg)?;
        match &cfg.output.path {
            Some(p) => std::fs::write(p, text)?,
            None => std::io::stdout().lock().write_all(text.as_bytes())?,
        }
        Ok(outcome.status)
    });
    match result {
        Ok(status) => status,
        Err(e) => {
            eprintln!("jacobi: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("jacobi").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn flags_override_defaults() {
        let cli = parse(&["spectrum", "--family", "asc2", "--q", "0.3", "--a", "0.3", "--shift", "0.3", "--k", "4"]);
        let cfg = cli.resolve().unwrap();
        assert_eq!(cfg.family, FamilySpec::Asc2 { q: 0.3, a: 0.3 });
        assert_eq!(cfg.shift, 0.3);
        assert_eq!(cfg.k, 4);
    }

    #[test]
    fn negative_grid_bounds_parse() {
        let cli = parse(&["charfn", "--grid", "-1:2:13"]);
        assert_eq!(cli.resolve().unwrap().grid, Some(Grid { z_min: -1.0, z_max: 2.0, points: 13 }));
    }

    #[test]
    fn table_flag_requires_config_table() {
        let cli = parse(&["verify", "--family", "table"]);
        assert!(matches!(cli.resolve(), Err(CliError::Config(_))));
    }

    #[test]
    fn empty_q_list() {
        let cli = parse(&["identities", "--q-list", ""]);
        assert!(cli.resolve().unwrap().identities.q_list.is_empty());
    }
}
