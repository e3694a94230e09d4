//! `ampleforge` command-line front end.
//!
//! Exit codes: 0 proved / valid / ok, 2 disproved, 3 inconclusive,
//! 4 conditionally valid, 5 invalid, 64 usage error, 65 data or I/O error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use ampleforge::bounds::{bounds_table, write_csv, BoundsOptions};
use ampleforge::certificate::{decode, encode, verify, verify_with, Certificate, Verdict, VerifyOptions};
use ampleforge::cremona::{reduce_scaled, CremonaWord};
use ampleforge::lattice::{parse_rational, parse_vector};
use ampleforge::pell::{cf_sqrt, conjecture_target, pell_solutions, remainder_bound};
use ampleforge::prover::{
    asymp1_part1, asymp1_part2, asymp1_part3, asymp1_part3_trimmed, coef2_certificate, indecomposability_probe,
    nagata_compose, prove_with_report, ProbeLimits, ProbeVerdict, ProveOutcome, SearchLimits,
};
use ampleforge::{ClassVector, PositivityKind, Rational};
use clap::{Args, Parser, Subcommand, ValueEnum};

const EXIT_DISPROVED: u8 = 2;
const EXIT_INCONCLUSIVE: u8 = 3;
const EXIT_CONDITIONAL: u8 = 4;
const EXIT_INVALID: u8 = 5;
const EXIT_USAGE: u8 = 64;
const EXIT_DATA: u8 = 65;

#[derive(Parser)]
#[command(name = "ampleforge", version, about = "Certificates for nef and ample vectors of blown-up planes")]
struct Cli {
    /// Worker threads; values above 1 enable the parallel prover.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    jobs: u32,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search for a certificate.
    Prove {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long, value_parser = vector_arg, allow_hyphen_values = true)]
        vector: ClassVector,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a certificate file.
    Verify {
        file: PathBuf,
        /// Refuse assumption leaves and remark-based ample witnesses.
        #[arg(long)]
        strict: bool,
    },
    /// Print the standard degree-reduction trace.
    Reduce {
        #[arg(long, value_parser = vector_arg, allow_hyphen_values = true)]
        vector: ClassVector,
    },
    /// Continued fraction of the square root of N.
    Cf { n: u64 },
    /// Solutions of d^2 - N m^2 = 1.
    Pell {
        n: u64,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        count: u64,
    },
    /// The homogeneous target built from the fundamental Pell solution.
    Conjecture {
        n: u64,
        #[arg(long)]
        prove: bool,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certificate for a member of one of the homogeneous families.
    Family {
        #[arg(long, value_enum)]
        part: Part,
        #[arg(long, required_unless_present = "d")]
        a: Option<i128>,
        #[arg(long, required_unless_present = "d")]
        l: Option<i128>,
        #[arg(long, required_if_eq("part", "coef2"))]
        d: Option<i128>,
        /// For part 3, drop the trailing multiplicity 1.
        #[arg(long)]
        trimmed: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Conditional certificate for (d; m^(N1*N2)) from two ampleness hypotheses.
    Nagata {
        #[arg(long)]
        n1: usize,
        #[arg(long)]
        n2: usize,
        #[arg(long, value_parser = rational_arg)]
        d: Rational,
        #[arg(long, value_parser = rational_arg)]
        m: Rational,
        #[arg(long, value_parser = rational_arg)]
        x: Rational,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bounded search for decompositions across the Cremona orbit.
    Probe {
        #[arg(long, value_parser = vector_arg, allow_hyphen_values = true)]
        vector: ClassVector,
        /// Largest degree of an orbit member (default: twice the input degree).
        #[arg(long)]
        degree_bound: Option<i128>,
        #[arg(long, default_value_t = 20_000)]
        max_members: usize,
    },
    /// CSV of remainder bounds for 10 <= N <= max-n.
    Table {
        #[arg(long, value_parser = clap::value_parser!(u64).range(10..))]
        max_n: u64,
        #[arg(long)]
        out: PathBuf,
        /// Prover budget per row for the Pell target.
        #[arg(long, default_value_t = 20_000)]
        budget: u64,
        /// Also write each proved row's certificate into this directory.
        #[arg(long)]
        cert_dir: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, default_value_t = 16)]
    depth: usize,
    #[arg(long, default_value_t = 1_000_000)]
    budget: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Nef,
    Ample,
}

impl From<Kind> for PositivityKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Nef => PositivityKind::Nef,
            Kind::Ample => PositivityKind::Ample,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Part {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    #[value(name = "3")]
    Three,
    Coef2,
}

fn vector_arg(s: &str) -> Result<ClassVector, String> {
    parse_vector(s).map_err(|e| e.to_string())
}

fn rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

enum Failure {
    Usage(String),
    Data(String),
}

type Outcome = Result<u8, Failure>;

fn data(e: impl ToString) -> Failure {
    Failure::Data(e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Data(msg)) => {
            eprintln!("data error: {msg}");
            ExitCode::from(EXIT_DATA)
        }
    }
}

fn run(cli: Cli) -> Outcome {
    if cli.jobs > 1 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.jobs as usize)
            .build_global()
            .map_err(data)?;
    }
    let parallel = cli.jobs > 1;
    match cli.command {
        Command::Prove { kind, vector, search, out } => {
            prove_and_report(&vector, kind.into(), &search.limits(parallel), out.as_deref())
        }
        Command::Verify { file, strict } => verify_file(&file, strict),
        Command::Reduce { vector } => reduce(&vector),
        Command::Cf { n } => {
            println!("{}", cf_sqrt(n).map_err(data)?);
            Ok(0)
        }
        Command::Pell { n, count } => {
            for s in pell_solutions(n, count as usize).map_err(data)? {
                println!("{} {}", s.d, s.m);
            }
            Ok(0)
        }
        Command::Conjecture { n, prove, search, out } => {
            let target = conjecture_target(n).map_err(data)?;
            println!("target {target}");
            println!("bound {}", remainder_bound(&target).map_err(data)?);
            if prove {
                prove_and_report(&target, PositivityKind::Nef, &search.limits(parallel), out.as_deref())
            } else {
                Ok(0)
            }
        }
        Command::Family { part, a, l, d, trimmed, out } => {
            let built = match (part, a, l, d) {
                (Part::Coef2, _, _, Some(d)) => coef2_certificate(d),
                (Part::One, Some(a), Some(l), _) => asymp1_part1(a, l),
                (Part::Two, Some(a), Some(l), _) => asymp1_part2(a, l),
                (Part::Three, Some(a), Some(l), _) if trimmed => asymp1_part3_trimmed(a, l),
                (Part::Three, Some(a), Some(l), _) => asymp1_part3(a, l),
                _ => return Err(Failure::Usage("--a and --l are required for parts 1, 2 and 3".into())),
            };
            emit_constructed(built.map_err(data)?, out.as_deref())
        }
        Command::Nagata { n1, n2, d, m, x, out } => {
            emit_constructed(nagata_compose(n1, n2, &d, &m, &x).map_err(data)?, out.as_deref())
        }
        Command::Probe { vector, degree_bound, max_members } => probe(&vector, degree_bound, max_members),
        Command::Table { max_n, out, budget, cert_dir } => {
            let mut options = BoundsOptions {
                certificate_dir: cert_dir,
                ..BoundsOptions::default()
            };
            options.limits.node_budget = budget;
            let rows = bounds_table(max_n, &options).map_err(data)?;
            let file = fs::File::create(&out).map_err(|e| data(format!("{}: {e}", out.display())))?;
            write_csv(&rows, file).map_err(data)?;
            println!("rows {}", rows.len());
            println!("written {}", out.display());
            Ok(0)
        }
    }
}

impl SearchArgs {
    fn limits(&self, parallel: bool) -> SearchLimits {
        SearchLimits {
            max_depth: self.depth,
            node_budget: self.budget,
            parallel,
            ..SearchLimits::default()
        }
    }
}

fn word_text(w: &CremonaWord) -> String {
    if w.is_empty() {
        return "identity".into();
    }
    w.ops().iter().map(|op| op.to_string()).collect::<Vec<_>>().join(", ")
}

fn glue_lines(c: &Certificate) {
    if let Certificate::Glue { site, inner, .. } = c {
        println!("glue site {site} inner {}", inner.vector());
    }
    for child in c.children() {
        glue_lines(child);
    }
}

fn write_certificate(c: &Certificate, path: &Path) -> Result<(), Failure> {
    fs::write(path, encode(c) + "\n").map_err(|e| data(format!("{}: {e}", path.display())))?;
    println!("certificate {}", path.display());
    Ok(())
}

fn prove_and_report(v: &ClassVector, kind: PositivityKind, limits: &SearchLimits, out: Option<&Path>) -> Outcome {
    let report = prove_with_report(v, kind, limits);
    println!("nodes {}", report.nodes_used);
    match report.outcome {
        ProveOutcome::Proved(c) => {
            println!("outcome proved");
            println!("claim {} {}", c.kind(), c.vector());
            println!("certificate-nodes {}", c.node_count());
            glue_lines(&c);
            if let Some(path) = out {
                write_certificate(&c, path)?;
            }
            Ok(0)
        }
        ProveOutcome::Disproved(dp) => {
            println!("outcome disproved");
            println!("word {}", word_text(&dp.word));
            println!("image {}", dp.image);
            println!("reason {}", dp.reason);
            Ok(EXIT_DISPROVED)
        }
        ProveOutcome::Inconclusive { .. } => {
            println!("outcome inconclusive");
            Ok(EXIT_INCONCLUSIVE)
        }
    }
}

fn emit_constructed(c: Certificate, out: Option<&Path>) -> Outcome {
    println!("claim {} {}", c.kind(), c.vector());
    if let Ok(bound) = remainder_bound(c.vector()) {
        println!("bound {bound}");
    }
    let code = match verify(&c) {
        Verdict::Valid { .. } => {
            println!("verdict valid");
            0
        }
        Verdict::ConditionallyValid { assumptions, .. } => {
            println!("verdict conditional");
            for a in assumptions {
                println!("assumption {a}");
            }
            EXIT_CONDITIONAL
        }
        Verdict::Invalid { path, reason } => {
            println!("verdict invalid");
            println!("path {path}");
            println!("reason {reason}");
            return Ok(EXIT_INVALID);
        }
    };
    if let Some(path) = out {
        write_certificate(&c, path)?;
    }
    Ok(code)
}

fn verify_file(file: &Path, strict: bool) -> Outcome {
    let text = fs::read_to_string(file).map_err(|e| data(format!("{}: {e}", file.display())))?;
    let c = decode(&text).map_err(data)?;
    match verify_with(&c, VerifyOptions { strict }) {
        Verdict::Valid { vector, kind } => {
            println!("verdict valid");
            println!("claim {kind} {vector}");
            Ok(0)
        }
        Verdict::ConditionallyValid { vector, kind, assumptions } => {
            println!("verdict conditional");
            println!("claim {kind} {vector}");
            for a in assumptions {
                println!("assumption {a}");
            }
            Ok(EXIT_CONDITIONAL)
        }
        Verdict::Invalid { path, reason } => {
            println!("verdict invalid");
            println!("path {path}");
            println!("reason {reason}");
            Ok(EXIT_INVALID)
        }
    }
}

fn reduce(v: &ClassVector) -> Outcome {
    let (scale, r) = reduce_scaled(v).map_err(data)?;
    if scale != Rational::from_integer(1.into()) {
        println!("scale {scale}");
    }
    println!("start {}", v.scale(&scale).map_err(data)?);
    for (i, step) in r.steps.iter().enumerate() {
        println!("step {} {} -> {}", i + 1, step.op, step.result);
    }
    println!("final {}", r.final_vector);
    println!("status {}", r.status);
    Ok(0)
}

fn probe(v: &ClassVector, degree_bound: Option<i128>, max_members: usize) -> Outcome {
    if v.to_i128s().is_none() {
        return Err(Failure::Usage("probe needs an integer vector of moderate size".into()));
    }
    let limits = ProbeLimits {
        max_degree: degree_bound,
        max_members,
        ..ProbeLimits::default()
    };
    let r = indecomposability_probe(v, &limits);
    println!("members {}", r.members_explored);
    println!("truncated {}", r.truncated);
    println!("near-misses {}", r.near_miss_count);
    for nm in &r.near_misses {
        println!(
            "near-miss member {} outer {} inner {} refuted-at {} reason {}",
            nm.member, nm.outer, nm.inner, nm.refuted_at, nm.reason
        );
    }
    match r.verdict {
        ProbeVerdict::NoDecompositionFoundWithinBounds => println!("verdict none-within-bounds"),
        ProbeVerdict::DecompositionFound { member, decompositions } => {
            println!("verdict decomposition-found {member}");
            for d in decompositions {
                println!("decomposition outer {} site {} inner {}", d.outer, d.site, d.inner);
            }
        }
    }
    Ok(0)
}
