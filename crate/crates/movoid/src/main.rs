use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_traits::One;

use movoid::bundle::{read_bundle, write_bundle, write_certificate, BundleError};
use movoid::construct::{
    build_candidate, case_analysis, conjecture_ratio, printed_tables, table_row, CaseLabel,
    ConstructError, ConstructionParams, OrbitChoice,
};
use movoid::cyclotomy::CyclotomyError;
use movoid::gf::GfError;
use movoid::symplectic::SymplecticError;
use movoid::verify::{certify, Mode, VerifyOptions, PERP_FULL_SWEEP_CAP, SPOT_CHECK_SEED};

/// Exact construction and verification of m-ovoids in W(2r-1, p^e).
#[derive(Parser)]
#[command(name = "movoid", version, about)]
struct Cli {
    /// Worker threads (default: all cores, or the THREADS variable).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Print progress lines for long sweeps to stderr.
    #[arg(long, global = true)]
    progress: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Case analysis and the m-value menu for (p0, p, l, t).
    Params(ParamsArgs),
    /// Build a candidate m-ovoid and write it as a bundle directory.
    Construct(ConstructArgs),
    /// Verify a bundle and write its certificate.
    Verify(VerifyArgs),
    /// Exact conjecture ratios m/p^{e(p0-2)} over a range of l0.
    Conjecture(ConjectureArgs),
    /// Export a bundle as CSV points or a hyperplane-intersection summary.
    Export(ExportArgs),
    /// Recompute every printed table row and report consistency.
    Tables(TablesArgs),
}

#[derive(Args)]
struct ParamsArgs {
    #[arg(long)]
    p0: u32,
    #[arg(long)]
    p: u64,
    #[arg(long)]
    l: u32,
    #[arg(long)]
    t: u32,
}

#[derive(Args)]
struct ConstructArgs {
    #[arg(long)]
    p: u64,
    #[arg(long)]
    l: u32,
    #[arg(long)]
    t: u32,
    #[arg(long)]
    b: u64,
    /// Rank r; defaults to the largest odd prime factor of l*t.
    #[arg(long)]
    p0: Option<u32>,
    /// Comma-separated orbit indices instead of the first b orbits.
    #[arg(long, value_delimiter = ',')]
    orbits: Option<Vec<usize>>,
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    bundle: PathBuf,
    /// Comma-separated subset of character,perp,generators.
    #[arg(long, value_delimiter = ',', default_value = "character")]
    modes: Vec<String>,
    /// Stop generator sweeps at the first mismatch.
    #[arg(long)]
    fail_fast: bool,
    #[arg(long, default_value_t = SPOT_CHECK_SEED)]
    seed: u64,
    /// Point-count cap for a full perp sweep; larger spaces are sampled.
    #[arg(long, default_value_t = PERP_FULL_SWEEP_CAP)]
    perp_cap: u64,
}

#[derive(Args)]
struct ConjectureArgs {
    #[arg(long)]
    p: u64,
    #[arg(long)]
    p0: u32,
    #[arg(long)]
    t: u32,
    /// Range of l0, e.g. "1..3" (inclusive) or a single value.
    #[arg(long)]
    l0: String,
    #[arg(long, default_value_t = 1)]
    b: u64,
}

#[derive(Args)]
struct ExportArgs {
    bundle: PathBuf,
    #[arg(long)]
    format: String,
    /// Output file (default: stdout).
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TablesArgs {
    #[arg(long, default_value_t = 1)]
    k: u32,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli
        .threads
        .or_else(|| std::env::var("THREADS").ok().and_then(|v| v.parse().ok()));
    if let Some(n) = threads {
        if rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
            eprintln!("movoid: thread pool already initialized");
        }
    }
    movoid::set_progress(cli.progress);
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("movoid: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Construct(#[from] ConstructError),
    #[error("{0}")]
    Bundle(#[from] BundleError),
    #[error("{0}")]
    Verify(#[from] movoid::verify::VerifyError),
    #[error("{0}")]
    Usage(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 2 for parameter problems, 3 for budget overruns, 1 otherwise.
    fn exit_code(&self) -> u8 {
        fn construct_code(err: &ConstructError) -> u8 {
            match err {
                ConstructError::BadParameters(_)
                | ConstructError::D0NotGreaterThanOne(_)
                | ConstructError::BOutOfRange { .. } => 2,
                ConstructError::Gf(GfError::BudgetExceeded { .. }) => 3,
                ConstructError::Symplectic(SymplecticError::BudgetExceeded(_)) => 3,
                ConstructError::Symplectic(SymplecticError::Gf(GfError::BudgetExceeded { .. })) => 3,
                ConstructError::Symplectic(SymplecticError::BadParameters(_)) => 2,
                ConstructError::Cyclotomy(CyclotomyError::BadParameters(_))
                | ConstructError::Cyclotomy(CyclotomyError::NotSemiprimitive { .. }) => 2,
                _ => 1,
            }
        }
        match self {
            CliError::Construct(err) => construct_code(err),
            CliError::Bundle(BundleError::Construct(err)) => construct_code(err),
            CliError::Bundle(_) => 2,
            CliError::Verify(movoid::verify::VerifyError::Symplectic(SymplecticError::BudgetExceeded(_))) => 3,
            CliError::Verify(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Io(_) => 1,
        }
    }
}

fn run(command: Command) -> Result<ExitCode, CliError> {
    match command {
        Command::Params(a) => cmd_params(a),
        Command::Construct(a) => cmd_construct(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Conjecture(a) => cmd_conjecture(a),
        Command::Export(a) => cmd_export(a),
        Command::Tables(a) => cmd_tables(a),
    }
}

fn cmd_params(a: ParamsArgs) -> Result<ExitCode, CliError> {
    let report = case_analysis(a.p0, a.p, a.l, a.t)?;
    let case = match report.case {
        CaseLabel::A => "A (p0 | t)",
        CaseLabel::B => "B (p0 | l)",
    };
    println!("case: {case}");
    println!("space: W({}, {}^{})", 2 * a.p0 - 1, a.p, report.e);
    println!("N: {}", report.n);
    println!("d0: {}{}", report.d0, if report.d0_odd { "" } else { " (even, contrary to the lemma)" });
    if report.applies {
        println!("m-menu: b * {} for 1 <= b <= {}", report.m_unit, report.b_max);
    } else {
        println!("m-menu: none (d0 = 1, no construction)");
    }
    // table consistency for matching printed rows
    for row in printed_tables() {
        let matches_row = row.p0 == a.p0
            && row.l == a.l
            && a.t % row.t_coeff == 0
            && match row.p {
                movoid::construct::RowPrime::Fixed(p) => p == a.p,
                movoid::construct::RowPrime::AnyOddPrime => true,
            };
        if matches_row {
            let rep = table_row(&row, a.t / row.t_coeff)?;
            for flag in &rep.flags {
                println!("table-{} flag: {flag}", row.table);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn infer_p0(l: u32, t: u32) -> Result<u32, CliError> {
    let lt = l as u64 * t as u64;
    let p0 = movoid::gf::prime_factors(lt)
        .into_iter()
        .filter(|&f| f % 2 == 1)
        .max()
        .ok_or_else(|| CliError::Usage(format!("l*t = {lt} has no odd prime factor; pass --p0")))?;
    Ok(p0 as u32)
}

fn cmd_construct(a: ConstructArgs) -> Result<ExitCode, CliError> {
    let p0 = match a.p0 {
        Some(p0) => p0,
        None => infer_p0(a.l, a.t)?,
    };
    let orbit_choice = match a.orbits {
        Some(idx) => OrbitChoice::Explicit(idx),
        None => OrbitChoice::FirstB,
    };
    let params = ConstructionParams { p: a.p, p0, l: a.l, t: a.t, b: a.b, orbit_choice };
    let c = build_candidate(params)?;
    write_bundle(&a.out, &c, None)?;
    let j: Vec<String> = c.j.members.iter().map(|i| i.to_string()).collect();
    println!("space: W({}, {}^{})", 2 * c.space.r() - 1, c.params.p, c.space.e());
    println!("N: {}  d0: {}  b: {}", c.n, c.d0, c.params.b);
    println!("J: {{{}}}", j.join(", "));
    println!("|M|: {}  m: {}", c.points.len(), c.m_claimed);
    println!("bundle: {}", a.out.display());
    Ok(ExitCode::SUCCESS)
}

fn parse_modes(names: &[String]) -> Result<Vec<Mode>, CliError> {
    names
        .iter()
        .map(|n| match n.trim() {
            "character" => Ok(Mode::Character),
            "perp" => Ok(Mode::Perp),
            "generators" => Ok(Mode::Generators),
            other => Err(CliError::Usage(format!("unknown mode {other:?}"))),
        })
        .collect()
}

fn cmd_verify(a: VerifyArgs) -> Result<ExitCode, CliError> {
    let modes = parse_modes(&a.modes)?;
    let c = read_bundle(&a.bundle)?;
    let opts = VerifyOptions { fail_fast: a.fail_fast, sample_seed: a.seed, perp_sweep_cap: a.perp_cap };
    let cert = certify(&c, &modes, &opts)?;
    write_certificate(&a.bundle.join("certificate.txt"), &cert)?;
    for check in &cert.checks {
        println!("{}: {}", check.name, if check.passed { "pass" } else { "fail" });
        if let Some(w) = &check.witness {
            println!("  note: {w}");
        }
    }
    println!("coverage: {}", cert.coverage_label());
    println!("overall: {}", if cert.overall { "pass" } else { "fail" });
    Ok(if cert.overall { ExitCode::SUCCESS } else { ExitCode::from(4) })
}

fn cmd_conjecture(a: ConjectureArgs) -> Result<ExitCode, CliError> {
    let (lo, hi) = match a.l0.split_once("..") {
        Some((lo, hi)) => (
            lo.parse::<u32>().map_err(|_| CliError::Usage(format!("bad l0 range {:?}", a.l0)))?,
            hi.parse::<u32>().map_err(|_| CliError::Usage(format!("bad l0 range {:?}", a.l0)))?,
        ),
        None => {
            let v = a.l0.parse::<u32>().map_err(|_| CliError::Usage(format!("bad l0 {:?}", a.l0)))?;
            (v, v)
        }
    };
    if lo == 0 || hi < lo {
        return Err(CliError::Usage(format!("bad l0 range {:?}", a.l0)));
    }
    let mut prev = None;
    let mut decreasing = true;
    for l0 in lo..=hi {
        let ratio = conjecture_ratio(a.p, a.p0, a.t, l0, a.b)?;
        println!("l0 = {l0}: m/p^(e(p0-2)) = {}/{}", ratio.numer(), ratio.denom());
        if let Some(prev) = &prev {
            if ratio >= *prev {
                decreasing = false;
            }
        }
        prev = Some(ratio);
    }
    if hi > lo {
        println!("strictly decreasing: {}", if decreasing { "yes" } else { "no" });
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_export(a: ExportArgs) -> Result<ExitCode, CliError> {
    let c = read_bundle(&a.bundle)?;
    let text = match a.format.as_str() {
        "points" => {
            let mut s = String::from("rep\n");
            for &r in c.points.reps() {
                s.push_str(&format!("{r}\n"));
            }
            s
        }
        "intersections" => {
            let mut freq: BTreeMap<u64, u64> = BTreeMap::new();
            for y in 0..c.space.point_modulus() as u32 {
                *freq.entry(c.space.perp_count(y, &c.points)).or_default() += 1;
            }
            let mut s = String::from("size,frequency\n");
            for (size, count) in freq {
                s.push_str(&format!("{size},{count}\n"));
            }
            s
        }
        other => return Err(CliError::Usage(format!("unknown format {other:?}"))),
    };
    match a.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_tables(a: TablesArgs) -> Result<ExitCode, CliError> {
    let mut flagged = 0;
    for row in printed_tables() {
        let rep = table_row(&row, a.k)?;
        let p_desc = match row.p {
            movoid::construct::RowPrime::Fixed(p) => p.to_string(),
            movoid::construct::RowPrime::AnyOddPrime => "p odd".to_string(),
        };
        let status = if rep.consistent() { "ok" } else { "FLAGGED" };
        println!(
            "table {} row (p0={}, p={}, l={}, t={}k): printed d0 = {} -> {status}",
            row.table, row.p0, p_desc, row.l, row.t_coeff, row.printed_d0
        );
        for (p, d0, ok) in &rep.evaluations {
            if !ok {
                println!("  p = {p}: recomputed d0 = {d0}");
            }
        }
        for flag in &rep.flags {
            println!("  flag: {flag}");
        }
        for (p, m) in &rep.m_at_k1 {
            match m {
                Some(m) if m > &num_bigint::BigUint::one() || m.is_one() => {
                    println!("  p = {p}: m(k={}, b=1) = {m}", a.k)
                }
                _ => println!("  p = {p}: no construction (d0 = 1)"),
            }
        }
        if !rep.consistent() {
            flagged += 1;
        }
    }
    println!("flagged rows: {flagged}");
    Ok(ExitCode::SUCCESS)
}
