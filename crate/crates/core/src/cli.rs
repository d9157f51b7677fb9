//! Command-line front end. [`run`] returns the process exit code.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::eigen::filter_nontrivial;
use crate::encoding::DecodedSolution;
use crate::error::{Error, Result};
use crate::io::{export_coordinate, export_vendor_script, load_problem, CompiledModel};
use crate::linsys::estimate_cost;
use crate::model::{SampleSet, ENERGY_TOL};
use crate::sampler::{solve_exhaustive_within, solve_sa, AnnealSchedule};
use crate::verify::{verify_problem, Outcome};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "qubo-linsys", version, about = "Compile linear systems and eigenproblems to QUBO, sample, and decode")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Coord,
    Vendor,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SamplerArg {
    Exhaustive,
    Sa,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compile a problem file and export the QUBO
    Build {
        problem: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "coord")]
        format: FormatArg,
        /// Materialize zero coefficients
        #[arg(long)]
        include_zeros: bool,
        /// num_reads written into vendor scripts
        #[arg(long, default_value_t = 1000)]
        num_reads: u64,
    },
    /// Compile, sample and report ground states with decoded solutions
    Solve {
        problem: PathBuf,
        #[arg(long, value_enum, default_value = "exhaustive")]
        sampler: SamplerArg,
        #[arg(long, default_value_t = 1000)]
        reads: usize,
        #[arg(long, default_value_t = 1000)]
        sweeps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Report every state within this energy of the minimum (exhaustive only)
        #[arg(long, default_value_t = 0.0)]
        margin: f64,
    },
    /// Decode a bitstring (q1 first) against a problem's encoding
    Decode { problem: PathBuf, bitstring: String },
    /// Print the assembly cost triple for dimension n and exponent half-width m
    Estimate { n: u64, m: u64 },
    /// Check the model invariants exhaustively; exits 1 on any violation
    Verify { problem: PathBuf },
}

pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_FAILURE
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Build {
            problem,
            out: path,
            format,
            include_zeros,
            num_reads,
        } => build(&problem, path.as_deref(), format, include_zeros, num_reads, out),
        Command::Solve {
            problem,
            sampler,
            reads,
            sweeps,
            seed,
            margin,
        } => {
            let schedule = AnnealSchedule {
                reads,
                sweeps,
                seed,
                ..AnnealSchedule::default()
            };
            solve(&problem, sampler, &schedule, margin, out)
        }
        Command::Decode { problem, bitstring } => decode(&problem, &bitstring, out),
        Command::Estimate { n, m } => {
            let c = estimate_cost(n, m)?;
            writeln!(out, "{} {} {}", c.pair_count, c.per_pair_total, c.grand_total)?;
            Ok(EXIT_OK)
        }
        Command::Verify { problem } => verify(&problem, out),
    }
}

fn suffixed(path: &Path, label: &str) -> PathBuf {
    let tag: String = label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '-' })
        .collect::<String>()
        .split('-')
        .filter(|s| !s.is_empty())
        .collect::<Vec<_>>()
        .join("-");
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}.{tag}.{}", ext.to_string_lossy()),
        None => format!("{stem}.{tag}"),
    };
    path.with_file_name(name)
}

fn build(
    problem: &Path,
    path: Option<&Path>,
    format: FormatArg,
    include_zeros: bool,
    num_reads: u64,
    out: &mut dyn Write,
) -> Result<i32> {
    let models = load_problem(problem)?.compile()?;
    let multiple = models.len() > 1;
    for m in &models {
        let text = match format {
            FormatArg::Coord => export_coordinate(&m.qubo, include_zeros),
            FormatArg::Vendor => export_vendor_script(&m.qubo, include_zeros, num_reads),
        };
        match path {
            Some(p) => {
                let target = if multiple { suffixed(p, &m.label) } else { p.to_path_buf() };
                std::fs::write(&target, text)
                    .map_err(|e| Error::Io(format!("{}: {e}", target.display())))?;
                writeln!(out, "{}: wrote {} ({} qubits)", m.label, target.display(), m.qubo.num_vars())?;
            }
            None => {
                if multiple {
                    writeln!(out, "# {}", m.label)?;
                }
                write!(out, "{text}")?;
            }
        }
    }
    Ok(EXIT_OK)
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x}")).collect();
    format!("({})", parts.join(", "))
}

fn fmt_solution(d: &DecodedSolution) -> String {
    let mut s = format!("x = {}", fmt_vec(&d.x));
    if let Some(l) = d.lambda {
        s.push_str(&format!("  lambda = {l}"));
    }
    if let Some(r) = d.residual {
        s.push_str(&format!("  residual = {r}"));
    }
    s
}

fn report(m: &CompiledModel, samples: &SampleSet, out: &mut dyn Write) -> Result<()> {
    let q = &m.qubo;
    writeln!(
        out,
        "# {}: {} qubits, offset {}",
        m.label,
        q.num_vars(),
        q.offset()
    )?;
    let mut header: Vec<String> = (1..=q.num_vars()).map(|i| format!("q{i}")).collect();
    header.push("energy".into());
    header.push("occurrences".into());
    writeln!(out, "{}", header.join("\t"))?;
    for r in &samples.records {
        let mut row: Vec<String> = r.bits.iter().map(|b| b.to_string()).collect();
        row.push(format!("{:?}", r.energy - q.offset()));
        row.push(r.occurrences.to_string());
        writeln!(out, "{}", row.join("\t"))?;
    }
    writeln!(
        out,
        "{} distinct states, {} total occurrences",
        samples.len(),
        samples.total_occurrences()
    )?;

    let ground = samples.ground_states(ENERGY_TOL)?;
    writeln!(
        out,
        "lowest energy {:?} ({} ground states)",
        ground.records[0].energy - q.offset(),
        ground.len()
    )?;
    let mut decoded: Vec<DecodedSolution> = Vec::new();
    for r in &ground.records {
        let d = m.decode(&r.bits)?;
        if !decoded.iter().any(|e| e.x == d.x && e.lambda == d.lambda) {
            decoded.push(d);
        }
    }
    decoded.sort_by(|a, b| {
        a.lambda
            .partial_cmp(&b.lambda)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.x.partial_cmp(&b.x).unwrap_or(std::cmp::Ordering::Equal))
    });
    writeln!(out, "decoded solutions:")?;
    for d in &decoded {
        writeln!(out, "  {}", fmt_solution(d))?;
    }
    if m.plan.is_some() {
        let nontrivial = filter_nontrivial(&decoded);
        writeln!(out, "nontrivial eigenpairs: {}", nontrivial.len())?;
        for d in &nontrivial {
            writeln!(out, "  {}", fmt_solution(d))?;
        }
    }
    Ok(())
}

fn solve(
    problem: &Path,
    sampler: SamplerArg,
    schedule: &AnnealSchedule,
    margin: f64,
    out: &mut dyn Write,
) -> Result<i32> {
    let models = load_problem(problem)?.compile()?;
    for (idx, m) in models.iter().enumerate() {
        if idx > 0 {
            writeln!(out)?;
        }
        let samples = match sampler {
            SamplerArg::Exhaustive => solve_exhaustive_within(&m.qubo, margin)?,
            SamplerArg::Sa => solve_sa(&m.qubo, schedule)?,
        };
        report(m, &samples, out)?;
    }
    Ok(EXIT_OK)
}

fn parse_bits(s: &str) -> Result<Vec<u8>> {
    s.chars()
        .filter(|c| !c.is_whitespace() && *c != ',' && *c != '_')
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            other => Err(Error::Parse(format!("bitstring contains `{other}`"))),
        })
        .collect()
}

fn decode(problem: &Path, bitstring: &str, out: &mut dyn Write) -> Result<i32> {
    let bits = parse_bits(bitstring)?;
    let models = load_problem(problem)?.compile()?;
    for m in &models {
        let d = m.decode(&bits)?;
        if models.len() > 1 {
            writeln!(out, "# {}", m.label)?;
        }
        writeln!(out, "{}", fmt_solution(&d))?;
    }
    Ok(EXIT_OK)
}

fn verify(problem: &Path, out: &mut dyn Write) -> Result<i32> {
    let checks = verify_problem(&load_problem(problem)?)?;
    let mut failed = false;
    for c in &checks {
        match &c.outcome {
            Outcome::Pass => writeln!(out, "[ok]   {}: {}", c.model, c.name)?,
            Outcome::Skipped(why) => writeln!(out, "[skip] {}: {} ({why})", c.model, c.name)?,
            Outcome::Fail(why) => {
                failed = true;
                writeln!(out, "[FAIL] {}: {}: {why}", c.model, c.name)?
            }
        }
    }
    Ok(if failed { EXIT_FAILURE } else { EXIT_OK })
}
