use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use torsion_core::autocorr::{enumerate_classes, ClassEnumeration};
use torsion_core::cache;
use torsion_core::democracy::{build_counterexample, inf_over_members, family_members, Family, PeriodizationSpec};
use torsion_core::hull::{self, classify_vertices, PointCloud, TABLE3_MAX_N};
use torsion_core::oracles::{self, pi_ratio};
use torsion_core::{Error, GroupSpec};

const EXIT_FAILURE: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_BOUND: u8 = 3;
const EXIT_IO: u8 = 4;
const EXIT_CHECK: u8 = 5;

#[derive(Parser, Debug)]
#[command(name = "torsion", version, about = "Autocorrelation classes, exact hulls and democracy functionals on finite abelian groups")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Directory for class caches.
    #[arg(long, global = true, env = "TORSION_CACHE_DIR")]
    cache_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Enumerate autocorrelation classes into a JSON-Lines cache.
    Enumerate {
        #[arg(long)]
        group: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify class vectors as extreme or not, with certificates.
    Hull {
        #[arg(long)]
        group: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Class and extreme-point counts for Z_2^n, n = 0..max_n, as CSV.
    Table3 {
        #[arg(long, default_value_t = 3)]
        max_n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Infimum of the functional over a family of subsets.
    Eval {
        /// `chain:<group>;w=...;tail=...` or `table:<group>;v=...`.
        p: String,
        /// Must agree with the group inside `p` when given.
        #[arg(long)]
        group: Option<String>,
        #[arg(long, default_value = "all")]
        family: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Prüfer-group counterexample report.
    Counterexample {
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run oracle suites (`all` or one of the suite names).
    Check {
        #[arg(default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Best subset sum of the 2n-th roots of unity against the full sum.
    PiRatio { n: usize },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::BoundExceeded { .. } => EXIT_BOUND,
            Error::Io(_) | Error::Cache(_) | Error::Json(_) => EXIT_IO,
            Error::Certificate(_) => EXIT_FAILURE,
            _ => EXIT_PARSE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Error::from(e).into()
    }
}

type Outcome = std::result::Result<u8, Failure>;

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent)?;
            }
            fs::write(path, text)?;
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn emit_json(value: &Value, out: Option<&Path>) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(Error::from)?;
    text.push('\n');
    emit(&text, out)
}

fn parse_group(s: &str) -> Result<GroupSpec, Failure> {
    Ok(s.parse::<GroupSpec>()?)
}

fn classes_for(spec: &GroupSpec, cache_dir: Option<&Path>) -> Result<ClassEnumeration, Failure> {
    Ok(match cache_dir {
        Some(dir) => cache::load_or_enumerate(dir, spec)?,
        None => enumerate_classes(spec.group())?,
    })
}

fn run(cli: Cli) -> Outcome {
    if let Some(n) = cli.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| Failure {
                code: EXIT_FAILURE,
                message: e.to_string(),
            })?;
    }
    let cache_dir = cli.cache_dir.as_deref();
    match cli.command {
        Command::Enumerate { group, out } => {
            let spec = parse_group(&group)?;
            let classes = enumerate_classes(spec.group())?;
            let path = out.or_else(|| cache_dir.map(|d| cache::cache_path(d, &spec)));
            match &path {
                Some(p) => {
                    cache::write_classes(p, &spec, &classes)?;
                    emit_json(
                        &json!({
                            "group": spec.to_string(),
                            "total": classes.total,
                            "distinct": classes.distinct(),
                            "path": p.display().to_string(),
                        }),
                        None,
                    )?;
                }
                None => emit(&cache::render_classes(&spec, &classes)?, None)?,
            }
        }
        Command::Hull { group, out } => {
            let spec = parse_group(&group)?;
            let classes = classes_for(&spec, cache_dir)?;
            let report = classify_vertices(&PointCloud::from_classes(&classes))?;
            let mut value = report.to_json();
            value["group"] = json!(spec.to_string());
            value["total"] = json!(classes.total);
            value["distinct"] = json!(classes.distinct());
            emit_json(&value, out.as_deref())?;
        }
        Command::Table3 { max_n, out } => {
            if max_n > TABLE3_MAX_N {
                return Err(Error::BoundExceeded {
                    what: "table3 max_n",
                    cardinality: max_n,
                    bound: TABLE3_MAX_N,
                }
                .into());
            }
            let mut rows = Vec::new();
            for n in 0..=max_n {
                let classes = classes_for(&GroupSpec::dyadic(n), cache_dir)?;
                rows.push(hull::table3_row_from(n, &classes)?);
            }
            emit(&hull::table3_csv(&rows), out.as_deref())?;
        }
        Command::Eval { p, group, family, out } => {
            let p: PeriodizationSpec = p.parse()?;
            let family: Family = family.parse()?;
            if let Some(g) = group {
                let spec = parse_group(&g)?;
                if spec.group() != p.group() {
                    return Err(Error::GroupMismatch {
                        left: spec.to_string(),
                        right: p.group().to_string(),
                    }
                    .into());
                }
            }
            let members = family_members(p.group(), family)?;
            let report = inf_over_members(&p, family, &members)?;
            emit_json(&serde_json::to_value(&report).map_err(Error::from)?, out.as_deref())?;
        }
        Command::Counterexample { n, out } => {
            let c = build_counterexample(n)?;
            emit_json(&serde_json::to_value(&c.report).map_err(Error::from)?, out.as_deref())?;
            if !c.report.within_bound {
                return Ok(EXIT_CHECK);
            }
        }
        Command::Check { suite, seed, out } => {
            let suites: Vec<&str> = if suite == "all" {
                oracles::SUITES.to_vec()
            } else {
                vec![suite.as_str()]
            };
            let mut outcomes = Vec::new();
            for s in suites {
                outcomes.push(oracles::run_suite(s, seed)?);
            }
            let passed = outcomes.iter().all(|o| o.passed);
            emit_json(
                &json!({"passed": passed, "suites": serde_json::to_value(&outcomes).map_err(Error::from)?}),
                out.as_deref(),
            )?;
            if !passed {
                return Ok(EXIT_CHECK);
            }
        }
        Command::PiRatio { n } => {
            let r = pi_ratio(n)?;
            emit(&format!("{} {} {}\n", r.subset_max, r.full_sum, r.ratio), None)?;
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("torsion: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
