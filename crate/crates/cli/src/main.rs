//! `dic`: validate channels, compute and compare aggregate rate regions.
//!
//! Exit codes: 0 success or equal, 1 a semantic negative (non-injective
//! channel, unequal regions), 2 bad usage, unreadable input or any other error.

mod plot;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use dic_core::polytope::lp::LpOutcome;
use dic_core::polytope::{subset_check, SubsetCheck, DEFAULT_TOL};
use dic_core::theorem_region::{default_a_max, enumerate_facets, presets, DEFAULT_FACET_CAP};
use dic_core::{build_entropy_table, validate_injectivity, ChannelSpec, Error, InputDistribution, Method, Region, RegionOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(name = "dic", version, about = "Rate regions of injective deterministic interference channels")]
struct Cli {
    /// Numerical tolerance for LP comparisons.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// RNG seed for randomized checks; DIC_SEED takes precedence.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that every receiver map is invertible in the interference tuple.
    Validate { spec: PathBuf },
    /// Compute the aggregate rate region for a channel and input distribution.
    Region {
        spec: PathBuf,
        dist: PathBuf,
        #[arg(long, value_enum)]
        method: MethodArg,
        /// Largest facet weight to enumerate (theorem method).
        #[arg(long)]
        a_max: Option<u32>,
        /// Abort enumeration after this many facet choices.
        #[arg(long, default_value_t = DEFAULT_FACET_CAP)]
        facet_cap: usize,
        /// Compute the rate-splitting region even for a non-injective channel.
        #[arg(long)]
        allow_non_injective: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exit 0 iff two region files describe the same set.
    Compare {
        a: PathBuf,
        b: PathBuf,
        /// Number of random support-function spot checks.
        #[arg(long, default_value_t = 100)]
        directions: usize,
    },
    /// Draw a two-user region as SVG, or list three-user vertices as CSV.
    Plot {
        region: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the tabulated facet choices as JSON.
    Presets {
        #[arg(long)]
        k: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    HkProject,
    Theorem,
}

/// Settings shared by the subcommands.
#[derive(Debug, Clone, PartialEq)]
struct RunConfig {
    tol: f64,
    a_max: Option<u32>,
    facet_cap: usize,
    directions: usize,
    seed: u64,
}

impl RunConfig {
    fn validate(&self) -> Result<(), Failure> {
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Failure::usage(format!("tolerance must be positive, got {}", self.tol)));
        }
        if self.facet_cap == 0 || self.directions == 0 || self.a_max == Some(0) {
            return Err(Failure::usage("counts must be at least 1"));
        }
        Ok(())
    }
}

fn seed_from_env(default: u64) -> Result<u64, Failure> {
    match std::env::var("DIC_SEED") {
        Ok(s) => s.trim().parse().map_err(|_| Failure::usage(format!("DIC_SEED is not an integer: {s:?}"))),
        Err(_) => Ok(default),
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    fn negative(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::usage(e.to_string())
    }
}

fn read_with<T>(path: &Path, parse: impl FnOnce(&Path) -> dic_core::Result<T>) -> Result<T, Failure> {
    parse(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::usage(format!("{}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn validate(spec_path: &Path) -> Result<(), Failure> {
    let spec = read_with(spec_path, |p| ChannelSpec::from_file(p))?;
    let report = validate_injectivity(&spec);
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    match report.violations.first() {
        None => Ok(()),
        Some(c) => Err(Failure::negative(format!(
            "not injective: receiver {} with x = {} maps {:?} and {:?} to the same output",
            c.receiver + 1,
            c.x,
            c.first,
            c.second
        ))),
    }
}

fn region(
    cfg: &RunConfig,
    spec_path: &Path,
    dist_path: &Path,
    method: MethodArg,
    allow_non_injective: bool,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let spec = read_with(spec_path, |p| ChannelSpec::from_file(p))?;
    let dist = read_with(dist_path, |p| InputDistribution::from_file(p))?;
    let injective = validate_injectivity(&spec).is_injective;
    if !injective {
        match (allow_non_injective, method) {
            (true, MethodArg::HkProject) => {
                eprintln!("warning: channel is not injective; the rate-splitting region is achievable but may not be the capacity region");
            }
            (true, MethodArg::Theorem) => {
                return Err(Failure::negative("the theorem method needs an injective channel; use --method hk-project"));
            }
            (false, _) => {
                return Err(Failure::negative(
                    "channel is not injective (see `dic validate`); pass --allow-non-injective with --method hk-project to compute the rate-splitting region",
                ));
            }
        }
    }
    let opts = RegionOptions {
        tol: cfg.tol,
        a_max: cfg.a_max,
        facet_cap: cfg.facet_cap,
        allow_non_injective,
    };
    let method = match method {
        MethodArg::HkProject => Method::HkProject,
        MethodArg::Theorem => Method::Theorem,
    };
    let result = dic_core::capacity_region(&spec, &dist, method, &opts)?;
    if method == Method::Theorem {
        let a_max = cfg.a_max.unwrap_or_else(|| default_a_max(spec.k()));
        let table = build_entropy_table(&spec, &dist)?;
        match enumerate_facets(&table, a_max + 1, cfg.facet_cap, cfg.tol) {
            Ok(larger) => {
                let same = dic_core::polytope::regions_equal(&result, &larger, cfg.tol)?;
                eprintln!(
                    "a_max = {} -> {}: region {}",
                    a_max,
                    a_max + 1,
                    if same { "unchanged" } else { "CHANGED, raise --a-max" }
                );
            }
            Err(Error::FacetOverflow { cap }) => {
                eprintln!("a_max = {}: not checked, more than {cap} facet choices", a_max + 1);
            }
            Err(e) => return Err(e.into()),
        }
    }
    write_or_print(out, &result.to_json())
}

fn describe(check: &SubsetCheck, inner: &str, outer: &str) {
    for v in &check.violations {
        let support = v.support.map_or("unbounded".to_string(), |s| format!("{s}"));
        eprintln!(
            "{inner} is not inside {outer}: inequality {} of {outer} ({:?} <= {}) reaches {support}",
            v.index, v.inequality.coeffs, v.inequality.rhs
        );
    }
}

fn outcomes_match(a: LpOutcome, b: LpOutcome, tol: f64) -> bool {
    match (a, b) {
        (LpOutcome::Optimal(x), LpOutcome::Optimal(y)) => (x - y).abs() <= tol.max(1e-8),
        (x, y) => x == y,
    }
}

fn compare(cfg: &RunConfig, a_path: &Path, b_path: &Path) -> Result<(), Failure> {
    let a = read_with(a_path, |p| Region::from_file(p))?;
    let b = read_with(b_path, |p| Region::from_file(p))?;
    if a.dim() != b.dim() {
        return Err(Failure::negative(format!("dimensions differ: {} vs {}", a.dim(), b.dim())));
    }
    let ab = subset_check(&a, &b, cfg.tol)?;
    let ba = subset_check(&b, &a, cfg.tol)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut disagreements = 0;
    for _ in 0..cfg.directions {
        let dir: Vec<f64> = (0..a.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        if !outcomes_match(a.support(&dir)?, b.support(&dir)?, cfg.tol) {
            disagreements += 1;
        }
    }
    let equal = ab.holds && ba.holds;
    println!(
        "{} ({} of {} random directions disagree, seed {})",
        if equal { "equal" } else { "different" },
        disagreements,
        cfg.directions,
        cfg.seed
    );
    if equal {
        if disagreements > 0 {
            eprintln!("warning: inequality checks agree but support spot checks do not; try a looser --tol");
        }
        Ok(())
    } else {
        describe(&ab, "A", "B");
        describe(&ba, "B", "A");
        Err(Failure::negative("regions differ"))
    }
}

fn plot_cmd(cfg: &RunConfig, region_path: &Path, out: &Path) -> Result<(), Failure> {
    let region = read_with(region_path, |p| Region::from_file(p))?;
    let written = plot::render(&region, out, cfg.tol)?;
    println!("wrote {}", written.display());
    Ok(())
}

fn presets_cmd(k: usize) -> Result<(), Failure> {
    let specs = presets(k)?;
    let files: Vec<_> = specs.iter().map(|f| f.to_file_repr()).collect();
    println!("{}", serde_json::to_string_pretty(&files).expect("presets serialize"));
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    let mut cfg = RunConfig {
        tol: cli.tol,
        a_max: None,
        facet_cap: DEFAULT_FACET_CAP,
        directions: 100,
        seed: seed_from_env(cli.seed)?,
    };
    match cli.command {
        Command::Validate { spec } => validate(&spec),
        Command::Region {
            spec,
            dist,
            method,
            a_max,
            facet_cap,
            allow_non_injective,
            out,
        } => {
            cfg.a_max = a_max;
            cfg.facet_cap = facet_cap;
            cfg.validate()?;
            region(&cfg, &spec, &dist, method, allow_non_injective, out.as_deref())
        }
        Command::Compare { a, b, directions } => {
            cfg.directions = directions;
            cfg.validate()?;
            compare(&cfg, &a, &b)
        }
        Command::Plot { region, out } => {
            cfg.validate()?;
            plot_cmd(&cfg, &region, &out)
        }
        Command::Presets { k } => presets_cmd(k),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("dic: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
