//! `mlqc`: sweeps, audits, compilers and lemma suites from the command line.
//!
//! Exit status: 0 on success, 1 when a certificate or claim fails, 2 on
//! usage, parse or precondition errors.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mlqc::and_protocol::build_and_protocol;
use mlqc::audit::{all_checks, audit, report_csv, Verdict};
use mlqc::compilers::{
    certificates_csv, compile_oneshot, compile_private, send_input_protocol, verify_oneshot, verify_private,
    PrivateCompiled,
};
use mlqc::corpus::random_coined;
use mlqc::lemmas;
use mlqc::protocol::{from_json_str, simulate_with_cap, to_json_string, u0, InputDistribution, ProtocolSpec};

#[derive(Parser, Debug)]
#[command(name = "mlqc", version, about = "Memoryless quantum protocol laboratory")]
struct Cli {
    /// Numerical tolerance for every certified inequality.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Seed of the 64-bit generator; each subcommand uses its own streams.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Largest joint dimension simulated (at most 256).
    #[arg(long, global = true, default_value_t = 256)]
    cap: usize,
    /// Write the main artifact here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// CIC of the AND protocol family against the lower bound.
    AndSweep {
        #[arg(long, default_value_t = 1)]
        r_min: usize,
        #[arg(long, default_value_t = 8)]
        r_max: usize,
    },
    /// Lower-bound audit of a memoryless protocol.
    Audit(Source),
    /// Compile a protocol and verify the compiler's guarantees.
    Compile(CompileArgs),
    /// Randomized property suites with per-lemma pass counts.
    Lemmas {
        #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
    },
    /// Output distributions and CIC ledger of a protocol.
    Simulate {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum, default_value_t = Mu::U0)]
        mu: Mu,
    },
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct Source {
    /// Protocol JSON file.
    file: Option<PathBuf>,
    /// Use the built-in AND protocol with this parameter r.
    #[arg(long = "and")]
    and_r: Option<usize>,
}

#[derive(Args, Debug)]
struct CompileArgs {
    #[arg(long, conflicts_with = "oneshot", required_unless_present = "oneshot")]
    private: bool,
    #[arg(long)]
    oneshot: bool,
    /// Protocol JSON file (default: send-input AND for --private).
    #[arg(conflicts_with = "random_coined")]
    file: Option<PathBuf>,
    /// Compile a seeded random coined protocol with this many rounds.
    #[arg(long)]
    random_coined: Option<usize>,
    /// Input distribution for the privacy report.
    #[arg(long, value_enum, default_value_t = Mu::U0)]
    mu: Mu,
    /// Largest compiled width in qubits for the privacy verifier.
    #[arg(long, default_value_t = 5)]
    width_cap: usize,
    /// Where to write the verification CSV (default: standard output).
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Mu {
    /// Uniform on {(0,0), (0,1), (1,0)}.
    U0,
    Uniform,
}

impl Mu {
    fn distribution(self, sizes: [usize; 2]) -> InputDistribution {
        match self {
            Mu::U0 if sizes == [2, 2] => u0(),
            _ => InputDistribution::uniform(sizes),
        }
    }
}

/// Failure classes mapped to exit codes.
enum Failure {
    Certificate(String),
    Usage(String),
}

impl From<mlqc::Error> for Failure {
    fn from(e: mlqc::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn header(cli: &Cli, name: &str) -> String {
    format!("# mlqc {name} seed={} tol={:e} cap={}\n", cli.seed, cli.tol, cli.cap)
}

fn emit(path: Option<&Path>, body: &str) -> Outcome {
    match path {
        Some(p) => std::fs::write(p, body).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn load(source: &Source) -> Result<ProtocolSpec, Failure> {
    if let Some(r) = source.and_r {
        return Ok(build_and_protocol(r)?);
    }
    let path = source.file.as_ref().expect("clap enforces a source");
    read_protocol(path)
}

fn read_protocol(path: &Path) -> Result<ProtocolSpec, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    Ok(from_json_str(&text)?)
}

fn and_sweep(cli: &Cli, r_min: usize, r_max: usize) -> Outcome {
    if !(1 <= r_min && r_min <= r_max && r_max <= 8) {
        return Err(Failure::Usage(format!("need 1 ≤ r-min ≤ r-max ≤ 8, got {r_min}..{r_max}")));
    }
    let mut s = header(cli, "and-sweep");
    s.push_str("r,k,qcc,cic,cic0,lower_bound,k_cic_over_log2k\n");
    for r in r_min..=r_max {
        let p = build_and_protocol(r)?;
        let ledger = mlqc::cost::cic_with_cap(&p, &u0(), cli.cap)?;
        let k = p.num_rounds() as f64;
        let _ = writeln!(
            s,
            "{r},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            p.num_rounds(),
            ledger.qcc,
            ledger.cic,
            ledger.cic0.unwrap_or(f64::NAN),
            k.log2() / (12.0 * k),
            k * ledger.cic / k.log2()
        );
    }
    emit(cli.out.as_deref(), &s)
}

fn run_audit(cli: &Cli, source: &Source) -> Outcome {
    let p = load(source)?;
    let aud = audit(&p)?;
    let mut s = header(cli, "audit");
    s.push_str(&report_csv(&aud, cli.tol));
    emit(cli.out.as_deref(), &s)?;
    let failed: Vec<&str> = all_checks(&aud, cli.tol)
        .into_iter()
        .filter(|c| c.verdict == Verdict::Fails)
        .map(|c| c.name)
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Certificate(format!("failed checks: {}", failed.join(", "))))
    }
}

fn private_json(c: &PrivateCompiled) -> Result<String, Failure> {
    let base: serde_json::Value =
        serde_json::from_str(&to_json_string(&c.base)).map_err(|e| Failure::Usage(e.to_string()))?;
    let doc = serde_json::json!({
        "compiler": "private",
        "base": base,
        "copy_register": c.copy_register,
        "round_blocks": c.blocks,
        "round_key_bits": c.round_key_bits,
        "final_key_bits_bob": c.s_b_bits,
        "final_key_bits_alice": c.s_a_bits,
        "on_key_mismatch": "restart",
    });
    let mut text = serde_json::to_string_pretty(&doc).map_err(|e| Failure::Usage(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

fn run_compile(cli: &Cli, args: &CompileArgs) -> Outcome {
    let base = match (&args.file, args.random_coined) {
        (Some(path), _) => read_protocol(path)?,
        (None, Some(k)) => {
            if k % 2 == 0 {
                return Err(Failure::Usage("a memoryless random protocol needs an odd number of rounds".into()));
            }
            random_coined(cli.seed, 0, k)
        }
        (None, None) if args.private => send_input_protocol(mlqc::protocol::and),
        (None, None) => return Err(Failure::Usage("--oneshot needs a protocol file or --random-coined".into())),
    };
    let (json, certs) = if args.private {
        let c = compile_private(&base)?;
        let mu = args.mu.distribution(base.input_sizes);
        let report = verify_private(&c, &mu, args.width_cap)?;
        let mut certs = report.certificates(cli.tol);
        certs.push(mlqc::compilers::Certificate {
            name: "total_cic".into(),
            value: report.total_cic,
            bound: report.output_information,
            pass: (report.total_cic - report.output_information).abs() <= cli.tol,
        });
        (private_json(&c)?, certs)
    } else {
        let c = compile_oneshot(&base, cli.cap)?;
        let report = verify_oneshot(&base, &c, cli.tol, cli.cap)?;
        (to_json_string(&c.compiled), report.certificates)
    };
    emit(cli.out.as_deref(), &json)?;
    let mut csv = header(cli, if args.private { "compile --private" } else { "compile --oneshot" });
    csv.push_str(&certificates_csv(&certs));
    emit(args.report.as_deref(), &csv)?;
    let failed: Vec<&str> = certs.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Certificate(format!("failed certificates: {}", failed.join(", "))))
    }
}

fn run_lemmas(cli: &Cli, trials: usize) -> Outcome {
    let reports = lemmas::run_all(cli.seed, trials, cli.tol)?;
    let mut s = header(cli, "lemmas");
    s.push_str(&lemmas::to_csv(&reports));
    emit(cli.out.as_deref(), &s)?;
    let failed: Vec<&str> = reports.iter().filter(|r| !r.all_passed()).map(|r| r.name).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Certificate(format!("failed suites: {}", failed.join(", "))))
    }
}

fn run_simulate(cli: &Cli, source: &Source, mu: Mu) -> Outcome {
    let p = load(source)?;
    let t = simulate_with_cap(&p, cli.cap)?;
    let mut s = header(cli, "simulate");
    s.push_str("x,y,outcome,probability\n");
    let [nx, ny] = p.input_sizes;
    for x in 0..nx {
        for y in 0..ny {
            for (o, q) in t.output_distribution(x, y).iter().enumerate() {
                let _ = writeln!(s, "{x},{y},{o},{q:.16e}");
            }
        }
    }
    s.push_str(&mlqc::cost::ledger_from_transcript(&p, &t, &mu.distribution(p.input_sizes))?.to_csv());
    emit(cli.out.as_deref(), &s)
}

fn run(cli: &Cli) -> Outcome {
    if !(cli.tol > 0.0 && cli.tol.is_finite()) {
        return Err(Failure::Usage("--tol must be positive".into()));
    }
    if cli.cap == 0 || cli.cap > 256 {
        return Err(Failure::Usage("--cap must be between 1 and 256".into()));
    }
    match &cli.command {
        Command::AndSweep { r_min, r_max } => and_sweep(cli, *r_min, *r_max),
        Command::Audit(source) => run_audit(cli, source),
        Command::Compile(args) => run_compile(cli, args),
        Command::Lemmas { trials } => run_lemmas(cli, *trials as usize),
        Command::Simulate { source, mu } => run_simulate(cli, source, *mu),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Certificate(msg)) => {
            eprintln!("mlqc: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("mlqc: error: {msg}");
            ExitCode::from(2)
        }
    }
}
