//! Command-line front end.
//!
//! Exit codes: 0 success, 1 invalid input or usage, 2 violations found by
//! `check`, 3 paving budget exhausted.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use thickslide_core::paver::{PaveConfig, PaveError, DEFAULT_BOX_BUDGET};

use crate::check::{check_paving, CheckConfig};
use crate::json::{read_paving, write_paving};
use crate::parallel::{available_workers, pave_parallel};
use crate::svg::{render_svg, StyleMap};
use crate::system::{parse_system, SystemDef};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_VIOLATIONS: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "thickslide",
    version,
    about = "Guaranteed enclosures of sliding surfaces"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pave the sliding surface of a system and write it as JSON.
    Pave {
        file: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Overrides the file's epsilon.
        #[arg(long)]
        epsilon: Option<f64>,
        /// Classification threads; defaults to the available parallelism.
        #[arg(long)]
        workers: Option<usize>,
        /// Maximum number of boxes to classify.
        #[arg(long, default_value_t = DEFAULT_BOX_BUDGET)]
        budget: usize,
    },
    /// Print the Lie derivatives of every region leaf along both fields.
    Lie { file: PathBuf },
    /// Look for thin sliding points that a paving classifies OUT.
    Check {
        file: PathBuf,
        #[arg(long)]
        paving: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        /// Random parameter instances; 0 uses the centre of the box.
        #[arg(long, default_value_t = 0)]
        param_samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

struct Failure(i32, String);

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(EXIT_INVALID, msg.into())
}

fn load_system(path: &Path) -> Result<SystemDef, Failure> {
    let text = fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    parse_system(&text).map_err(|e| invalid(format!("{}:{e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

/// Runs the tool on `args` (including the program name) and returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

fn execute(command: Command, out: &mut dyn Write) -> Result<i32, Failure> {
    match command {
        Command::Pave {
            file,
            out: out_path,
            svg,
            epsilon,
            workers,
            budget,
        } => {
            let def = load_system(&file)?;
            let epsilon = epsilon.unwrap_or(def.epsilon);
            if !(epsilon > 0.0 && epsilon.is_finite()) {
                return Err(invalid(format!("epsilon must be positive, got {epsilon}")));
            }
            if svg.is_some() && def.states.len() != 2 {
                return Err(invalid(format!(
                    "SVG output needs a two-dimensional system, this one has {} states",
                    def.states.len()
                )));
            }
            let set = def.sliding_set().map_err(|e| invalid(e.to_string()))?;
            let workers = workers.unwrap_or_else(available_workers);
            let config = PaveConfig { epsilon, budget };
            let paving =
                pave_parallel(&set, &def.domain, config, workers).map_err(|e| match e {
                    PaveError::BudgetExceeded { .. } => Failure(EXIT_RESOURCE, e.to_string()),
                    other => invalid(other.to_string()),
                })?;
            write_file(&out_path, &write_paving(&paving))?;
            if let Some(svg_path) = svg {
                let text = render_svg(&paving, &StyleMap::default())
                    .map_err(|e| invalid(e.to_string()))?;
                write_file(&svg_path, &text)?;
            }
            let c = paving.meta.counts;
            let _ = writeln!(
                out,
                "IN {}  PEN {}  OUT {}  UNKNOWN {}",
                c.inside, c.penumbra, c.outside, c.unknown
            );
            let _ = writeln!(
                out,
                "inner approximation {}",
                if paving.inner_is_empty() {
                    "empty"
                } else {
                    "nonempty"
                }
            );
            let elapsed = paving.meta.elapsed.map_or(0.0, |d| d.as_secs_f64());
            let _ = writeln!(
                out,
                "{} boxes classified, {} bisections, {:.3} s",
                paving.meta.classified, paving.meta.bisections, elapsed
            );
            Ok(EXIT_OK)
        }
        Command::Lie { file } => {
            let def = load_system(&file)?;
            let decl = def.decl();
            let spec = def.spec();
            for (i, (c, _)) in def.region.leaves().into_iter().enumerate() {
                let lie = spec.leaf_lie(c).map_err(|e| invalid(e.to_string()))?;
                let _ = writeln!(out, "leaf {}: {} <= 0", i + 1, c.display(&decl));
                let _ = writeln!(out, "  along a: {}", lie.along_a.display(&decl));
                let _ = writeln!(out, "  along b: {}", lie.along_b.display(&decl));
            }
            Ok(EXIT_OK)
        }
        Command::Check {
            file,
            paving,
            samples,
            param_samples,
            seed,
        } => {
            let def = load_system(&file)?;
            let text = fs::read_to_string(&paving)
                .map_err(|e| invalid(format!("{}: {e}", paving.display())))?;
            let paving = read_paving(&text).map_err(|e| invalid(e.to_string()))?;
            let config = CheckConfig {
                samples,
                param_samples,
                seed,
            };
            let report =
                check_paving(&def, &paving, &config).map_err(|e| invalid(e.to_string()))?;
            let _ = writeln!(
                out,
                "{} samples, {} on a leaf boundary, {} sliding, {} violations",
                report.samples,
                report.on_boundary,
                report.sliding,
                report.violations.len()
            );
            for v in report.violations.iter().take(20) {
                let _ = writeln!(out, "  OUT at x = {:?}, p = {:?}", v.x, v.p);
            }
            Ok(if report.violations.is_empty() {
                EXIT_OK
            } else {
                EXIT_VIOLATIONS
            })
        }
    }
}
