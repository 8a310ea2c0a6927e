//! Command line for the solvable spherical subgroup toolkit: admissible-pair
//! tables, datum validation, model reconstruction, sphericity checks, and the
//! full classification listing.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::{env, fs};

use clap::{Parser, Subcommand, ValueEnum};
use num::{One, Signed, Zero};
use serde::Serialize;
use sha2::{Digest, Sha256};

use solvsph::combinatorial_data::{validate, CombinatorialDatum, DatumDto};
use solvsph::enumeration::{classify, UpTo};
use solvsph::lie_algebra::ChevalleyAlgebra;
use solvsph::marked_roots::{derive_admissible_pairs, table1_pairs, MarkedPair};
use solvsph::reconstruction::build_model;
use solvsph::root_system::{build_root_system, RootSystem};
use solvsph::sphericity::{criterion, oracle_open_orbit, weight_classes};
use solvsph::Rat;

const VERSION: &str = env!("CARGO_PKG_VERSION");

// Regression snapshots; their digest identifies the tables a binary ships.
const TABLES: [(&str, &str); 5] = [
    ("A1", include_str!("../../../tables/A1.json")),
    ("A1xA1", include_str!("../../../tables/A1xA1.json")),
    ("A2", include_str!("../../../tables/A2.json")),
    ("B2", include_str!("../../../tables/B2.json")),
    ("G2", include_str!("../../../tables/G2.json")),
];

#[derive(Parser)]
#[command(name = "solvsph", disable_version_flag = true)]
struct Cli {
    /// Limit the worker thread pool.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the admissible marked roots of a system and compare the derived
    /// list with the classified table.
    MarkedRoots { system: String },
    /// Check a datum file against the validity conditions.
    Validate { file: PathBuf },
    /// Build the subalgebra model of a datum file.
    Reconstruct { file: PathBuf },
    /// Decide sphericity of a datum file's model.
    Check {
        file: PathBuf,
        /// Also run the randomized open-orbit test.
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value_t = 5)]
        trials: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Enumerate all data of a system and group them into classes.
    Classify {
        #[arg(long)]
        system: String,
        #[arg(long, value_enum, default_value_t = UpToArg::GConjugacy)]
        up_to: UpToArg,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Largest total rank accepted (env SPHERICAL_RANK_CAP overrides the
        /// default).
        #[arg(long)]
        rank_cap: Option<usize>,
        #[arg(long, default_value_t = 1_000_000)]
        orbit_bound: usize,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum UpToArg {
    TorusConjugacy,
    GConjugacy,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Tsv,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: String) -> Self {
        Failure { code: 2, message }
    }

    fn semantic(err: solvsph::Error) -> Self {
        Failure {
            code: 1,
            message: err.to_string(),
        }
    }
}

fn tables_digest() -> String {
    let mut hasher = Sha256::new();
    for (name, body) in TABLES {
        hasher.update(name.as_bytes());
        hasher.update(body.as_bytes());
    }
    let digest = hasher.finalize();
    let mut hex = String::new();
    for byte in &digest[..6] {
        write!(hex, "{byte:02x}").expect("writing to a string");
    }
    hex
}

fn main() -> ExitCode {
    // die quietly when a pipe closes, like any other line-oriented tool
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    if env::args().any(|a| a == "--version" || a == "-V") {
        println!("solvsph {VERSION} (tables {})", tables_digest());
        return ExitCode::SUCCESS;
    }
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        // a second pool initialization in one process is harmless here
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    match run(cli.command) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn rank_cap_setting(flag: Option<usize>) -> Result<usize, Failure> {
    if let Some(cap) = flag {
        return Ok(cap);
    }
    match env::var("SPHERICAL_RANK_CAP") {
        Ok(raw) => raw
            .parse()
            .map_err(|_| Failure::usage(format!("SPHERICAL_RANK_CAP is not a number: {raw}"))),
        Err(_) => Ok(4),
    }
}

fn read_datum(path: &Path) -> Result<(RootSystem, CombinatorialDatum), Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    let dto: DatumDto = serde_json::from_str(&text).map_err(|e| {
        Failure::usage(format!(
            "{}: malformed JSON at line {} column {}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })?;
    let rs = build_root_system(&dto.system).map_err(Failure::semantic)?;
    let datum = CombinatorialDatum::from_dto(&rs, &dto).map_err(Failure::semantic)?;
    Ok((rs, datum))
}

fn run(command: Command) -> Result<ExitCode, Failure> {
    match command {
        Command::MarkedRoots { system } => marked_roots(&system),
        Command::Validate { file } => validate_file(&file),
        Command::Reconstruct { file } => reconstruct_file(&file),
        Command::Check {
            file,
            oracle,
            trials,
            seed,
        } => check_file(&file, oracle, trials, seed),
        Command::Classify {
            system,
            up_to,
            format,
            rank_cap,
            orbit_bound,
        } => classify_system(&system, up_to, format, rank_cap_setting(rank_cap)?, orbit_bound),
    }
}

// A type label typed on the command line is argv, so rejecting it is a usage
// error; the same label inside a datum file counts as an invalid datum.
fn argv_system(system: &str) -> Result<RootSystem, Failure> {
    build_root_system(system).map_err(|e| Failure::usage(e.to_string()))
}

fn marked_roots(system: &str) -> Result<ExitCode, Failure> {
    let rs = argv_system(system)?;
    let derived = derive_admissible_pairs(&rs, rs.rank()).map_err(Failure::semantic)?;
    let table = table1_pairs(&rs);
    for pair in &derived {
        println!("{pair}");
    }
    let derived_only: Vec<&MarkedPair> = derived.iter().filter(|p| !table.contains(p)).collect();
    let table_only: Vec<&MarkedPair> = table.iter().filter(|p| !derived.contains(p)).collect();
    if derived_only.is_empty() && table_only.is_empty() {
        println!("{} pairs, diff empty", derived.len());
        Ok(ExitCode::SUCCESS)
    } else {
        for p in derived_only {
            println!("derived only: {p}");
        }
        for p in table_only {
            println!("table only: {p}");
        }
        Ok(ExitCode::from(1))
    }
}

fn validate_file(path: &Path) -> Result<ExitCode, Failure> {
    let (rs, datum) = read_datum(path)?;
    let report = validate(&rs, &datum);
    for (name, verdict) in report.named() {
        if verdict.ok {
            println!("{name}: ok");
        } else {
            println!("{name}: FAIL — {}", verdict.offenders.join("; "));
        }
    }
    if report.is_valid() {
        println!("datum is valid");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("datum is invalid");
        Ok(ExitCode::from(1))
    }
}

// Linear combination of root vectors, e.g. "e(a1) - e(a1+a2)".
fn combo(row: &[Rat], label: impl Fn(usize) -> String) -> String {
    let mut out = String::new();
    for (i, c) in row.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let magnitude = c.abs();
        let sign = c < &Rat::zero();
        if out.is_empty() {
            if sign {
                out.push_str("-");
            }
        } else {
            out.push_str(if sign { " - " } else { " + " });
        }
        if !magnitude.is_one() {
            write!(out, "{magnitude}*").expect("writing to a string");
        }
        out.push_str(&label(i));
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

fn reconstruct_file(path: &Path) -> Result<ExitCode, Failure> {
    let (rs, datum) = read_datum(path)?;
    let alg = ChevalleyAlgebra::new(rs).map_err(Failure::semantic)?;
    let rs = alg.root_system();
    let model = build_model(&alg, &datum).map_err(Failure::semantic)?;
    println!("system: {}", rs.label());
    if model.psi().is_empty() {
        println!("marked set: (empty)");
    } else {
        let shown: Vec<String> = model.psi().iter().map(|p| p.to_string()).collect();
        println!("marked set: {}", shown.join(", "));
    }
    println!(
        "dim s = {}, dim n = {}",
        model.s_basis().dim(),
        model.n_basis().dim()
    );
    println!("s basis:");
    for row in model.s_basis().basis() {
        println!("  {}", combo(row, |i| format!("h{}", i + 1)));
    }
    println!("n basis:");
    for row in model.n_basis().basis() {
        println!("  {}", combo(row, |i| format!("e({})", rs.positive_roots()[i])));
    }
    Ok(ExitCode::SUCCESS)
}

fn check_file(path: &Path, oracle: bool, trials: usize, seed: u64) -> Result<ExitCode, Failure> {
    let (rs, datum) = read_datum(path)?;
    let alg = ChevalleyAlgebra::new(rs).map_err(Failure::semantic)?;
    let rs = alg.root_system();
    let model = build_model(&alg, &datum).map_err(Failure::semantic)?;
    println!("system: {}", rs.label());
    let spherical = criterion(rs, &model);
    println!(
        "criterion: {}",
        if spherical { "spherical" } else { "not spherical" }
    );
    println!("classes:");
    for class in weight_classes(rs, &model) {
        let members: Vec<String> = class
            .members
            .iter()
            .map(|&i| rs.positive_roots()[i].to_string())
            .collect();
        println!("  c={}  {}", class.complement, members.join(", "));
    }
    if oracle {
        let found = oracle_open_orbit(&alg, &model, trials, seed).map_err(Failure::semantic)?;
        println!(
            "oracle: {} (trials={trials}, seed={seed})",
            if found {
                "open orbit found"
            } else {
                "no open orbit found"
            }
        );
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct EntryOut {
    datum: DatumDto,
    orbit_id: usize,
    canonical: bool,
    flagged: bool,
}

#[derive(Serialize)]
struct ClassifyOut {
    system: String,
    up_to: String,
    entries: Vec<EntryOut>,
}

fn classify_system(
    system: &str,
    up_to: UpToArg,
    format: Format,
    rank_cap: usize,
    orbit_bound: usize,
) -> Result<ExitCode, Failure> {
    let rs = argv_system(system)?;
    let alg = ChevalleyAlgebra::new(rs).map_err(Failure::semantic)?;
    let rs = alg.root_system();
    let mode = match up_to {
        UpToArg::TorusConjugacy => UpTo::TorusConjugacy,
        UpToArg::GConjugacy => UpTo::GConjugacy,
    };
    let entries = classify(&alg, mode, rank_cap, orbit_bound).map_err(Failure::semantic)?;
    match format {
        Format::Json => {
            let out = ClassifyOut {
                system: rs.label().to_string(),
                up_to: match mode {
                    UpTo::TorusConjugacy => "torus-conjugacy".into(),
                    UpTo::GConjugacy => "g-conjugacy".into(),
                },
                entries: entries
                    .into_iter()
                    .map(|e| EntryOut {
                        datum: e.datum.to_dto(rs),
                        orbit_id: e.orbit_id,
                        canonical: e.canonical,
                        flagged: e.flagged,
                    })
                    .collect(),
            };
            let rendered = serde_json::to_string_pretty(&out)
                .expect("classification output serializes");
            println!("{rendered}");
        }
        Format::Tsv => {
            println!("orbit_id\tcanonical\tflagged\tmarked\tfusion\tkernel");
            for e in entries {
                let marked = if e.datum.pairs().is_empty() {
                    "-".to_string()
                } else {
                    e.datum
                        .pairs()
                        .iter()
                        .map(|p| p.to_string())
                        .collect::<Vec<_>>()
                        .join("; ")
                };
                let fusion = if e.datum.blocks().is_empty() {
                    "-".to_string()
                } else {
                    e.datum
                        .blocks()
                        .iter()
                        .map(|b| {
                            b.iter()
                                .map(|i| i.to_string())
                                .collect::<Vec<_>>()
                                .join(",")
                        })
                        .collect::<Vec<_>>()
                        .join("|")
                };
                let kernel = if e.datum.torus().kernel().is_zero() {
                    "-".to_string()
                } else {
                    e.datum
                        .torus()
                        .kernel()
                        .basis()
                        .iter()
                        .map(|row| combo(row, |i| format!("a{}", i + 1)))
                        .collect::<Vec<_>>()
                        .join(" | ")
                };
                println!(
                    "{}\t{}\t{}\t{}\t{}\t{}",
                    e.orbit_id, e.canonical, e.flagged, marked, fusion, kernel
                );
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
