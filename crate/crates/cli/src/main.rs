//! `ghostbox` command line: single games, box games, sweeps and transcript
//! verification.
//!
//! Exit codes: 0 success, 1 invariant or property failure, 2 usage,
//! configuration or parse error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ghostbox::analysis::{verify_box_transcript, verify_real_transcript, verify_transcript_json, InvariantReport};
use ghostbox::breaker::BreakerSpec;
use ghostbox::engine::{run_game, EllSetting, MakerKind, RealGameParams};
use ghostbox::spookybox::policies::{
    AlwaysHauntGhost, ConcentrateGhost, GreedyConcentrateBreaker, NullBreaker, NullGhost, RandomBreaker,
    RandomGhost, ScriptedBreaker, ScriptedGhost,
};
use ghostbox::spookybox::{
    derive_parameters, random_hypergraph, run_box_game, BoxGameConfig, BreakerPolicy, GhostPolicy, Script,
};
use ghostbox::sweep::{run_sweep, write_csv, SweepConfig, SweepRow};
use ghostbox::Error;

#[derive(Parser)]
#[command(name = "ghostbox", version, about = "Biased Maker-Breaker games on random graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Play one game on E(K_n) and write its transcript and report.
    Play(PlayArgs),
    /// Play a standalone box game with the potential Maker.
    Boxgame(BoxArgs),
    /// Run a grid of games and write one CSV row per (b, seed).
    Sweep(SweepArgs),
    /// Re-check a transcript file and print the invariant report.
    Verify { path: PathBuf },
}

#[derive(Args, Clone)]
struct BreakerArgs {
    #[arg(long, value_enum, default_value_t = BreakerName::Random)]
    breaker: BreakerName,
    /// RNG seed of the random Breaker (defaults to the game seed).
    #[arg(long)]
    breaker_seed: Option<u64>,
    /// Vertex attacked by vertex-focus.
    #[arg(long, default_value_t = 0)]
    target: u32,
    /// Vertex protected by k4-blocker.
    #[arg(long, default_value_t = 0)]
    v0: u32,
}

impl BreakerArgs {
    fn spec(&self, seed: u64) -> BreakerSpec {
        match self.breaker {
            BreakerName::Null => BreakerSpec::Null,
            BreakerName::Random => BreakerSpec::Random {
                seed: self.breaker_seed.unwrap_or(seed),
            },
            BreakerName::VertexFocus => BreakerSpec::VertexFocus { target: self.target },
            BreakerName::TriangleBlocker => BreakerSpec::TriangleBlocker,
            BreakerName::K4Blocker => BreakerSpec::K4Blocker { v0: self.v0 },
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BreakerName {
    Null,
    Random,
    VertexFocus,
    TriangleBlocker,
    K4Blocker,
}

#[derive(Clone, Copy, ValueEnum)]
enum MakerName {
    Potential,
    Random,
    Greedy,
}

impl From<MakerName> for MakerKind {
    fn from(m: MakerName) -> Self {
        match m {
            MakerName::Potential => MakerKind::Potential,
            MakerName::Random => MakerKind::Random,
            MakerName::Greedy => MakerKind::Greedy,
        }
    }
}

#[derive(Args)]
struct PlayArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    p: f64,
    #[arg(long)]
    b: u32,
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    /// Overrides δ = 1e-6·ε².
    #[arg(long)]
    delta: Option<f64>,
    /// Fair-share slack: `nominal`, `auto` or a number.
    #[arg(long, default_value = "nominal", value_parser = parse_ell)]
    ell: EllSetting,
    #[arg(long, value_enum, default_value_t = MakerName::Potential)]
    maker: MakerName,
    #[command(flatten)]
    breaker: BreakerArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    breaker_first: bool,
    /// Abort on the first fair-share violation.
    #[arg(long)]
    strict: bool,
    /// Output prefix: writes PREFIX.transcript.json and PREFIX.report.json.
    #[arg(long, default_value = "game")]
    out: PathBuf,
}

#[derive(Args)]
struct BoxArgs {
    #[arg(long, default_value_t = 1)]
    m: u32,
    #[arg(long)]
    b: u32,
    #[arg(long)]
    vertex_count: u32,
    /// Number of boxes.
    #[arg(long)]
    e: u32,
    /// Maximum box size M.
    #[arg(long)]
    max_box: u32,
    /// `auto` for ℓ_min, or a number.
    #[arg(long, default_value = "auto")]
    ell: String,
    /// Initial size of each random box.
    #[arg(long, default_value_t = 0)]
    box_size: u32,
    /// JSON array of initial boxes; replaces the random ones.
    #[arg(long)]
    boxes: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = GhostName::Random)]
    ghost: GhostName,
    #[arg(long, value_enum, default_value_t = BoxBreakerName::Random)]
    breaker: BoxBreakerName,
    /// Box transcript or event array driving scripted policies.
    #[arg(long)]
    script: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    strict: bool,
    #[arg(long, default_value = "boxgame.json")]
    out: PathBuf,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum GhostName {
    Null,
    AlwaysHaunt,
    Random,
    Concentrate,
    Script,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum BoxBreakerName {
    Null,
    Random,
    GreedyConcentrate,
    Script,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    p: f64,
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    /// Biases, e.g. `1-8` or `1,2,4,8`.
    #[arg(long = "b")]
    biases: String,
    /// Seeds, e.g. `0-2`.
    #[arg(long, default_value = "0")]
    seeds: String,
    #[arg(long, default_value = "auto", value_parser = parse_ell)]
    ell: EllSetting,
    #[arg(long, value_enum, default_value_t = MakerName::Potential)]
    maker: MakerName,
    #[command(flatten)]
    breaker: BreakerArgs,
    #[arg(long)]
    breaker_first: bool,
    /// CSV path; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_ell(s: &str) -> Result<EllSetting, String> {
    match s {
        "nominal" => Ok(EllSetting::Nominal),
        "auto" => Ok(EllSetting::Auto),
        _ => s
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite() && *x > 0.0)
            .map(EllSetting::Fixed)
            .ok_or_else(|| format!("expected nominal, auto or a positive number, got {s:?}")),
    }
}

/// `1-8`, `1,2,4` or a mix such as `1-3,8`; ranges are inclusive.
fn parse_list(s: &str) -> Result<Vec<u64>, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim) {
        let num = |t: &str| t.trim().parse::<u64>().map_err(|_| format!("bad number {t:?} in {s:?}"));
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b) = (num(a)?, num(b)?);
                if a > b {
                    return Err(format!("empty range {part:?}"));
                }
                out.extend(a..=b);
            }
            None => out.push(num(part)?),
        }
    }
    Ok(out)
}

enum Failure {
    Usage(String),
    Invariant(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Invariant(_) | Error::Protocol { .. } | Error::StrategyFault { .. } => {
                Failure::Invariant(e.to_string())
            }
            _ => Failure::Usage(e.to_string()),
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> Failure {
    Failure::Usage(format!("{}: {e}", path.display()))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    let mut text = text.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    fs::write(path, text).map_err(|e| io_err(path, e))
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| io_err(path, e))
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn verdict(report: &InvariantReport) -> Result<(), Failure> {
    match report.first_failure() {
        None => Ok(()),
        Some(c) => Err(Failure::Invariant(format!(
            "invariant check {} failed: {}",
            c.name,
            c.failure.as_ref().map_or("", |f| f.message.as_str())
        ))),
    }
}

fn play(a: PlayArgs) -> Result<(), Failure> {
    let mut params = RealGameParams::new(a.n, a.p, a.b, a.eps, a.seed).with_maker(a.maker.into());
    params.delta = a.delta;
    params.ell_degree = a.ell;
    params.ell_nbhd = a.ell;
    params.breaker_first = a.breaker_first;
    params.strict = a.strict;
    params.validate()?;
    let spec = a.breaker.spec(a.seed);
    spec.validate(a.n)?;
    let mut strategy = spec.build();
    let (transcript, report) = run_game(params, strategy.as_mut())?;
    let tpath = with_suffix(&a.out, ".transcript.json");
    let rpath = with_suffix(&a.out, ".report.json");
    write_file(&tpath, &transcript.to_json())?;
    write_file(&rpath, &serde_json::to_string_pretty(&report).expect("report serialises"))?;
    println!(
        "{} min_degree={} triangle_free={} k4_free_at_v0={} transcript={} report={}",
        report.transcript_hash,
        report.min_maker_degree,
        report.triangle_free,
        report.k4_free_at_v0,
        tpath.display(),
        rpath.display()
    );
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    verdict(&verify_real_transcript(&transcript)?)
}

fn boxgame(a: BoxArgs) -> Result<(), Failure> {
    let mut cfg = BoxGameConfig {
        m: a.m,
        b: a.b,
        vertex_count: a.vertex_count,
        e: a.e,
        max_box: a.max_box,
        ell: 1.0,
        strict_preconditions: a.strict,
    };
    cfg.ell = match a.ell.as_str() {
        "auto" => derive_parameters(&cfg)?.ell_min,
        s => s
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| Failure::Usage(format!("--ell: expected auto or a number, got {s:?}")))?,
    };
    let initial = match &a.boxes {
        Some(path) => {
            let text = read_file(path)?;
            serde_json::from_str(&text).map_err(|e| Failure::from(Error::from_json(&text, &e)))?
        }
        None => random_hypergraph(a.vertex_count, a.e, a.box_size, a.seed),
    };
    let script = match &a.script {
        Some(path) => Some(Script::from_json(&read_file(path)?)?),
        None if a.ghost == GhostName::Script || a.breaker == BoxBreakerName::Script => {
            return Err(Failure::Usage("scripted policies need --script".into()))
        }
        None => None,
    };
    let mut ghost: Box<dyn GhostPolicy> = match a.ghost {
        GhostName::Null => Box::new(NullGhost),
        GhostName::AlwaysHaunt => Box::new(AlwaysHauntGhost),
        GhostName::Random => Box::new(RandomGhost::new(a.seed)),
        GhostName::Concentrate => Box::new(ConcentrateGhost::default()),
        GhostName::Script => Box::new(ScriptedGhost::new(script.as_ref().unwrap())),
    };
    let mut breaker: Box<dyn BreakerPolicy> = match a.breaker {
        BoxBreakerName::Null => Box::new(NullBreaker),
        BoxBreakerName::Random => Box::new(RandomBreaker::new(a.seed.wrapping_add(1))),
        BoxBreakerName::GreedyConcentrate => Box::new(GreedyConcentrateBreaker),
        BoxBreakerName::Script => Box::new(ScriptedBreaker::new(script.as_ref().unwrap())),
    };
    let t = run_box_game(cfg, initial, ghost.as_mut(), breaker.as_mut())?;
    write_file(&a.out, &t.to_json())?;
    let s = &t.summary;
    println!(
        "{} rounds={} maker_claims={} max_deficit={} violations={} transcript={}",
        t.hash,
        s.rounds,
        s.maker_claims,
        s.max_deficit.map_or_else(|| "none".into(), |d| format!("{d:.6}")),
        s.violations,
        a.out.display()
    );
    verdict(&verify_box_transcript(&t)?)
}

fn sweep(a: SweepArgs) -> Result<(), Failure> {
    let biases = parse_list(&a.biases)
        .map_err(Failure::Usage)?
        .into_iter()
        .map(|b| u32::try_from(b).map_err(|_| Failure::Usage(format!("bias {b} too large"))))
        .collect::<Result<Vec<_>, _>>()?;
    let seeds = parse_list(&a.seeds).map_err(Failure::Usage)?;
    let first_seed = seeds.first().copied().unwrap_or(0);
    let cfg = SweepConfig {
        n: a.n,
        p: a.p,
        epsilon: a.eps,
        biases,
        seeds,
        breaker: a.breaker.spec(first_seed),
        maker: a.maker.into(),
        ell: a.ell,
        breaker_first: a.breaker_first,
    };
    let rows: Vec<SweepRow> = run_sweep(&cfg)?.iter().map(SweepRow::from_report).collect();
    match &a.out {
        Some(path) => {
            let mut buf = Vec::new();
            write_csv(&mut buf, &cfg, &rows)?;
            fs::write(path, buf).map_err(|e| io_err(path, e))?;
            eprintln!("{} rows written to {}", rows.len(), path.display());
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write_csv(&mut lock, &cfg, &rows)?;
            lock.flush().map_err(|e| Failure::Usage(e.to_string()))?;
        }
    }
    Ok(())
}

fn verify(path: &Path) -> Result<(), Failure> {
    let report = verify_transcript_json(&read_file(path)?)?;
    println!("{}", report.to_json());
    verdict(&report)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Play(a) => play(a),
        Command::Boxgame(a) => boxgame(a),
        Command::Sweep(a) => sweep(a),
        Command::Verify { path } => verify(&path),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invariant(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
