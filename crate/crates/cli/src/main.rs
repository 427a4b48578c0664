//! `pdakit` — build, check, expand, and exercise placement delivery arrays.
//!
//! Exit codes: 0 on success, 1 when a check fails (array violations, decode
//! failures), 2 on usage or input errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use num_rational::Ratio;

use pdakit::analysis::{compare, load_from_gpda};
use pdakit::construct::{build_mn_pda, exemplar, MnParameters};
use pdakit::format::{read_gpda, read_pda, write_gpda, write_pda};
use pdakit::gpda::{expand, AssociationProfile, GeneralizedPdaArray};
use pdakit::pda::PdaArray;
use pdakit::scheme::{simulate_delivery, DemandVector, FileLibrary, SchemeError};

/// Default RNG seed for delivery payloads, so runs are reproducible.
const DEFAULT_SEED: u64 = 0x5EED;

/// `println!` that exits quietly when the reader closes the pipe
/// (e.g. `pdakit construct mn --k 8 --t 2 | head`).
macro_rules! outln {
    ($($arg:tt)*) => {{
        use std::io::Write;
        let mut out = std::io::stdout().lock();
        if writeln!(out, $($arg)*).is_err() {
            std::process::exit(0);
        }
    }};
}

/// `print!` counterpart of [`outln`].
macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write;
        let mut out = std::io::stdout().lock();
        if write!(out, $($arg)*).is_err() {
            std::process::exit(0);
        }
    }};
}

#[derive(Parser)]
#[command(name = "pdakit", version, about = "Placement delivery array toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an array and write it in the text format.
    Construct {
        #[command(subcommand)]
        kind: ConstructKind,
    },
    /// Check the defining conditions of an array file.
    Validate {
        /// Array file to check.
        path: PathBuf,
        /// Treat the file as a generalized (user-indexed) array.
        #[arg(long)]
        gpda: bool,
    },
    /// Replicate cache columns to serve a user association profile.
    Expand {
        /// Cache-indexed array file.
        path: PathBuf,
        /// Users per cache, e.g. "3,2,2,1" (one entry per cache).
        #[arg(long)]
        profile: String,
        /// Write the generalized array here instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Simulate one coded delivery round and verify every user decodes.
    Deliver {
        /// Generalized (user-indexed) array file.
        path: PathBuf,
        /// Demanded file per user, e.g. "0,1,2,3" (one entry per user).
        #[arg(long)]
        demands: String,
        /// RNG seed for the generated file library.
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// File size in bytes.
        #[arg(long, default_value_t = 4096)]
        bytes: usize,
    },
    /// Tabulate delivery load against the uncoded per-user baseline.
    Compare {
        /// Cache-indexed array file to compare.
        #[arg(
            long,
            value_name = "PATH",
            conflicts_with = "mn",
            required_unless_present = "mn"
        )]
        pda: Option<PathBuf>,
        /// Build the subset-indexed array K,t instead of reading a file.
        #[arg(long, value_name = "K,T")]
        mn: Option<String>,
        /// Users per cache, e.g. "8,7,6,6,5,4,4,3,2".
        #[arg(long)]
        profile: String,
        /// Cache-to-library memory ratio, e.g. "1/3" (default: Z/F of the array).
        #[arg(long)]
        ratio: Option<String>,
        /// Emit CSV instead of an aligned table.
        #[arg(long)]
        csv: bool,
    },
}

#[derive(Subcommand)]
enum ConstructKind {
    /// Subset-indexed array for K caches with parameter t.
    Mn {
        /// Number of caches.
        #[arg(long)]
        k: usize,
        /// Subset size parameter (0 ≤ t ≤ K).
        #[arg(long)]
        t: usize,
        /// Write the array here instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Built-in worked example ("ex1" or "pue_example").
    Exemplar {
        /// Exemplar name.
        #[arg(long)]
        name: String,
        /// Write the array here instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Construct { kind } => cmd_construct(kind),
        Command::Validate { path, gpda } => cmd_validate(&path, gpda),
        Command::Expand {
            path,
            profile,
            output,
        } => cmd_expand(&path, &profile, output.as_deref()),
        Command::Deliver {
            path,
            demands,
            seed,
            bytes,
        } => cmd_deliver(&path, &demands, seed, bytes),
        Command::Compare {
            pda,
            mn,
            profile,
            ratio,
            csv,
        } => cmd_compare(
            pda.as_deref(),
            mn.as_deref(),
            &profile,
            ratio.as_deref(),
            csv,
        ),
    }
}

fn parse_csv(text: &str, what: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|tok| {
            let tok = tok.trim();
            tok.parse::<usize>()
                .with_context(|| format!("invalid {what} entry `{tok}`"))
        })
        .collect()
}

fn load_pda(path: &Path) -> Result<PdaArray> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    read_pda(&text).with_context(|| format!("cannot parse {}", path.display()))
}

fn load_gpda(path: &Path) -> Result<GeneralizedPdaArray> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    read_gpda(&text).with_context(|| format!("cannot parse {}", path.display()))
}

fn cmd_construct(kind: ConstructKind) -> Result<ExitCode> {
    let (pda, output) = match kind {
        ConstructKind::Mn { k, t, output } => (build_mn_pda(&MnParameters::new(k, t))?, output),
        ConstructKind::Exemplar { name, output } => (exemplar(&name)?, output),
    };
    let text = write_pda(&pda);
    match output {
        Some(path) => {
            fs::write(&path, &text).with_context(|| format!("cannot write {}", path.display()))?;
            outln!(
                "K={} F={} Z={} S={}",
                pda.num_caches(),
                pda.num_rows(),
                pda.stars_per_column(),
                pda.num_integers()
            );
            outln!("wrote {}", path.display());
        }
        None => out!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_validate(path: &Path, gpda: bool) -> Result<ExitCode> {
    let ok = if gpda {
        let g = load_gpda(path)?;
        let report = g.validate();
        outln!("{report}");
        report.is_ok()
    } else {
        let pda = load_pda(path)?;
        let report = pda.validate();
        outln!("{report}");
        report.is_ok()
    };
    Ok(if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_expand(path: &Path, profile: &str, output: Option<&Path>) -> Result<ExitCode> {
    let pda = load_pda(path)?;
    let entries = parse_csv(profile, "profile")?;
    let (g, assignment) = expand(&pda, &AssociationProfile::new(entries))?;
    let text = write_gpda(&g);
    match output {
        Some(out) => {
            fs::write(out, &text).with_context(|| format!("cannot write {}", out.display()))?;
            outln!(
                "K={} F={} Z={} S={} I={}",
                g.num_users(),
                g.num_rows(),
                g.stars_per_column(),
                g.num_integers(),
                g.max_superscript()
            );
            outln!("{assignment}");
            outln!("wrote {}", out.display());
        }
        None => {
            // Keep stdout parseable: the association rides along as comments.
            out!("{text}");
            for line in assignment.to_string().lines() {
                outln!("# {line}");
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_deliver(path: &Path, demands: &str, seed: u64, bytes: usize) -> Result<ExitCode> {
    let g = load_gpda(path)?;
    let demand = DemandVector::new(parse_csv(demands, "demand")?)?;
    let num_files = demand.demands().iter().max().copied().unwrap_or(0) + 1;
    let library = FileLibrary::random(num_files, bytes, g.num_rows(), seed)?;
    outln!(
        "{} users, {} subfile rows, {} files of {} bytes, demands {}, seed {}",
        g.num_users(),
        g.num_rows(),
        num_files,
        bytes,
        demand,
        seed
    );
    match simulate_delivery(&g, &library, &demand) {
        Ok(outcome) => {
            for tx in outcome.plan.transmissions() {
                outln!("{tx}");
            }
            let load = load_from_gpda(&g);
            outln!(
                "{} transmissions, load {} = {}",
                outcome.plan.len(),
                load.load_fraction(),
                load.load_decimal()
            );
            outln!("all {} users decoded OK", g.num_users());
            Ok(ExitCode::SUCCESS)
        }
        Err(
            err @ (SchemeError::MissingTransmission { .. }
            | SchemeError::UndecipherableTerm { .. }
            | SchemeError::CacheMissesSlice { .. }
            | SchemeError::ReconstructionMismatch { .. }),
        ) => {
            eprintln!("decode failure: {err}");
            Ok(ExitCode::from(1))
        }
        Err(other) => Err(other.into()),
    }
}

fn cmd_compare(
    pda_path: Option<&Path>,
    mn: Option<&str>,
    profile: &str,
    ratio: Option<&str>,
    csv: bool,
) -> Result<ExitCode> {
    let pda = match (pda_path, mn) {
        (Some(path), None) => load_pda(path)?,
        (None, Some(spec)) => {
            let params = parse_csv(spec, "--mn")?;
            if params.len() != 2 {
                bail!("--mn expects two values K,t, found {}", params.len());
            }
            build_mn_pda(&MnParameters::new(params[0], params[1]))?
        }
        _ => bail!("pass exactly one of --pda or --mn"),
    };
    let entries = parse_csv(profile, "profile")?;
    let memory_ratio = match ratio {
        Some(text) => text
            .parse::<Ratio<u64>>()
            .with_context(|| format!("invalid --ratio `{text}`"))?,
        None => Ratio::new(pda.stars_per_column() as u64, pda.num_rows() as u64),
    };
    let report = compare(&pda, &AssociationProfile::new(entries), memory_ratio)?;
    if csv {
        out!("{}", report.to_csv());
    } else {
        out!("{}", report.to_table());
    }
    Ok(ExitCode::SUCCESS)
}
