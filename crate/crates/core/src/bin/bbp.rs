use std::collections::HashMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use bbp_secrecy::bounds::main_channel_rate;
use bbp_secrecy::sim::{dump_transcripts, simulate_stats};
use bbp_secrecy::sweep::mc_sidecar_path;
use bbp_secrecy::verify::verify_with;
use bbp_secrecy::{
    compute_schedule, leakage_rate_with, BoundPoint, Error, ExplorationSchedule, HalvingRule,
    ModelConfig, SweepSpec, T3Variant,
};

const EXIT_USAGE: u8 = 1;
const EXIT_RUNTIME: u8 = 2;
const EXIT_MISMATCH: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "bbp",
    version,
    about = "Secrecy-capacity bounds and simulation for the binary beampointing wiretap channel"
)]
struct Cli {
    /// key=value file with defaults for any flag (flags win)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form outer bound, leakage and inner bound at one point
    Bounds(PointArgs),
    /// Bounds over a grid of budgets and block lengths, as CSV
    Sweep(SweepArgs),
    /// Monte Carlo estimates of the main rate and the leakage
    Simulate(SimArgs),
    /// Compare the closed forms against exact enumeration
    Verify(PointArgs),
}

#[derive(Args, Debug)]
struct PointArgs {
    #[arg(long = "K")]
    k: Option<u32>,
    #[arg(long = "B")]
    b: Option<f64>,
    #[arg(long = "L")]
    l: Option<usize>,
    /// as-printed or bisection
    #[arg(long)]
    halving: Option<String>,
    /// as-printed or summed-over-states
    #[arg(long)]
    t3: Option<String>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long = "K")]
    k: Option<u32>,
    /// comma separated block lengths
    #[arg(long = "L", value_delimiter = ',')]
    l: Vec<usize>,
    #[arg(long = "B-start")]
    b_start: Option<f64>,
    #[arg(long = "B-stop")]
    b_stop: Option<f64>,
    #[arg(long = "B-step")]
    b_step: Option<f64>,
    /// Monte Carlo blocks per point, written to <out>.mc.csv
    #[arg(long)]
    blocks: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// output CSV (stdout when absent)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    halving: Option<String>,
    #[arg(long)]
    t3: Option<String>,
}

#[derive(Args, Debug)]
struct SimArgs {
    #[arg(long = "K")]
    k: Option<u32>,
    #[arg(long = "B")]
    b: Option<f64>,
    #[arg(long = "L")]
    l: Option<usize>,
    #[arg(long)]
    blocks: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// write one line per block to this file
    #[arg(long = "dump-transcripts")]
    dump_transcripts: Option<PathBuf>,
    #[arg(long)]
    halving: Option<String>,
    #[arg(long)]
    t3: Option<String>,
}

enum Failure {
    Usage(String),
    Runtime(String),
    Mismatch,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) | Error::TranscriptParse { .. } => Failure::Runtime(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

/// Flag values loaded from `--config`.
#[derive(Default)]
struct FileConfig(HashMap<String, String>);

impl FileConfig {
    fn load(path: Option<&Path>) -> Result<Self, Failure> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Runtime(format!("cannot read {}: {e}", path.display())))?;
        let mut map = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Failure::Usage(format!("{}:{}: expected key=value", path.display(), i + 1))
            })?;
            map.insert(
                key.trim().trim_start_matches("--").replace('_', "-"),
                value.trim().to_string(),
            );
        }
        Ok(FileConfig(map))
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, Failure> {
        match self.0.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| Failure::Usage(format!("config key {key}: cannot parse {v:?}"))),
        }
    }

    fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, Failure> {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.get(key),
        }
    }

    fn require<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<T, Failure> {
        self.pick(flag, key)?
            .ok_or_else(|| Failure::Usage(format!("missing --{key}")))
    }
}

fn halving(file: &FileConfig, flag: Option<String>) -> Result<HalvingRule, Failure> {
    match file.pick(flag, "halving")? {
        None => Ok(HalvingRule::default()),
        Some(s) => HalvingRule::parse(&s)
            .ok_or_else(|| Failure::Usage(format!("unknown halving rule {s:?}"))),
    }
}

fn t3_variant(file: &FileConfig, flag: Option<String>) -> Result<T3Variant, Failure> {
    match file.pick(flag, "t3")?.as_deref() {
        None | Some("as-printed") | Some("printed") => Ok(T3Variant::AsPrinted),
        Some("summed-over-states") | Some("summed") => Ok(T3Variant::SummedOverStates),
        Some(s) => Err(Failure::Usage(format!("unknown t3 variant {s:?}"))),
    }
}

/// `x` with ten significant digits.
fn sig10(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let decimals = (9 - x.abs().log10().floor() as i32).max(0) as usize;
    format!("{x:.decimals$}")
}

fn warn_fractional(schedule: &ExplorationSchedule) {
    let steps = schedule.fractional_steps();
    if !steps.is_empty() {
        eprintln!(
            "warning: schedule is fractional at steps {steps:?}; the policy probes floor(c_j) beams there, \
             so closed forms and simulation may disagree"
        );
    }
}

fn cmd_bounds(file: &FileConfig, a: PointArgs) -> CmdResult {
    let k = file.require(a.k, "K")?;
    let b = file.require(a.b, "B")?;
    let l = file.require(a.l, "L")?;
    let variant = t3_variant(file, a.t3)?;
    let p = BoundPoint::compute_with(k, b, l, variant)?;
    let mut out = io::stdout().lock();
    writeln!(out, "K={} L={} B={} t3={}", p.k, p.l, p.b, variant.name())?;
    writeln!(out, "outer={}", sig10(p.outer))?;
    writeln!(out, "leakage={}", sig10(p.leakage))?;
    writeln!(out, "inner_raw={}", sig10(p.inner_raw))?;
    writeln!(out, "inner={}", sig10(p.inner))?;
    Ok(())
}

fn cmd_sweep(file: &FileConfig, a: SweepArgs) -> CmdResult {
    let d = SweepSpec::default();
    let ls = if !a.l.is_empty() {
        a.l
    } else if let Some(v) = file.0.get("L") {
        v.split(',')
            .map(|s| s.trim().parse())
            .collect::<Result<_, _>>()
            .map_err(|_| Failure::Usage(format!("config key L: cannot parse {v:?}")))?
    } else {
        d.ls
    };
    let spec = SweepSpec {
        k: file.pick(a.k, "K")?.unwrap_or(d.k),
        ls,
        b_start: file.pick(a.b_start, "B-start")?.unwrap_or(d.b_start),
        b_stop: file.pick(a.b_stop, "B-stop")?.unwrap_or(d.b_stop),
        b_step: file.pick(a.b_step, "B-step")?.unwrap_or(d.b_step),
        blocks: file.pick(a.blocks, "blocks")?.unwrap_or(0),
        seed: file.pick(a.seed, "seed")?.unwrap_or(0),
        out: file.pick(a.out, "out")?,
        rule: halving(file, a.halving)?,
        variant: t3_variant(file, a.t3)?,
    };
    spec.validate()?;
    match &spec.out {
        Some(path) => {
            let mut w = BufWriter::new(create(path)?);
            let rows = spec.write_csv(&mut w)?;
            w.flush()?;
            eprintln!("wrote {rows} rows to {}", path.display());
            if spec.blocks > 0 {
                let side = mc_sidecar_path(path);
                let mut w = BufWriter::new(create(&side)?);
                let rows = spec.write_mc_csv(&mut w)?;
                w.flush()?;
                eprintln!("wrote {rows} Monte Carlo rows to {}", side.display());
            }
        }
        None => {
            if spec.blocks > 0 {
                return Err(Failure::Usage(
                    "--blocks in a sweep needs --out for the overlay file".into(),
                ));
            }
            let mut w = io::stdout().lock();
            spec.write_csv(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn create(path: &Path) -> Result<File, Failure> {
    File::create(path)
        .map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", path.display())))
}

fn cmd_simulate(file: &FileConfig, a: SimArgs) -> CmdResult {
    let k = file.require(a.k, "K")?;
    let b = file.require(a.b, "B")?;
    let l = file.require(a.l, "L")?;
    let config = ModelConfig::new(k, b, l)?
        .with_blocks(file.require(a.blocks, "blocks")?)
        .with_seed(file.pick(a.seed, "seed")?.unwrap_or(0))
        .with_rule(halving(file, a.halving)?);
    let variant = t3_variant(file, a.t3)?;
    config.validate_for_simulation()?;
    if config.blocks == 0 {
        return Err(Error::NoBlocks.into());
    }
    let schedule = compute_schedule(k, b, l)?;
    warn_fractional(&schedule);
    let stats = match file.pick(a.dump_transcripts, "dump-transcripts")? {
        Some(path) => {
            let mut w = BufWriter::new(create(&path)?);
            let stats = dump_transcripts(&config, &schedule, &mut w)?;
            w.flush()?;
            stats
        }
        None => simulate_stats(&config, &schedule)?,
    };
    let main = stats.main_rate_estimate()?;
    let leak = stats.leakage_estimate()?;
    let main_ref = main_channel_rate(&schedule);
    let leak_ref = leakage_rate_with(k, b, l, variant)?;
    let mut out = io::stdout().lock();
    writeln!(
        out,
        "K={k} L={l} B={b} blocks={} seed={} halving={} t3={}",
        config.blocks,
        config.seed,
        config.rule.name(),
        variant.name()
    )?;
    writeln!(
        out,
        "main_rate={} stderr={} closed_form={} z={:.3}",
        sig10(main.value),
        sig10(main.stderr),
        sig10(main_ref),
        main.z_score(main_ref)
    )?;
    writeln!(
        out,
        "leakage={} stderr={} closed_form={} z={:.3}",
        sig10(leak.value),
        sig10(leak.stderr),
        sig10(leak_ref),
        leak.z_score(leak_ref)
    )?;
    writeln!(
        out,
        "cost_violations={} clamped_probes={}",
        stats.cost_violations, stats.clamped
    )?;
    Ok(())
}

fn cmd_verify(file: &FileConfig, a: PointArgs) -> CmdResult {
    let k = file.require(a.k, "K")?;
    let b = file.require(a.b, "B")?;
    let l = file.require(a.l, "L")?;
    let report = verify_with(k, b, l, halving(file, a.halving)?)?;
    println!("{report}");
    if report.all_matched() {
        Ok(())
    } else {
        Err(Failure::Mismatch)
    }
}

fn init_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("BBP_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        Failure::Usage(format!("BBP_THREADS must be a positive integer, got {v:?}"))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Runtime(e.to_string()))
}

fn run(cli: Cli) -> CmdResult {
    init_threads()?;
    let file = FileConfig::load(cli.config.as_deref())?;
    match cli.command {
        Command::Bounds(a) => cmd_bounds(&file, a),
        Command::Sweep(a) => cmd_sweep(&file, a),
        Command::Simulate(a) => cmd_simulate(&file, a),
        Command::Verify(a) => cmd_verify(&file, a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_RUNTIME)
        }
        Err(Failure::Mismatch) => ExitCode::from(EXIT_MISMATCH),
    }
}
