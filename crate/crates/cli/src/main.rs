use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde_json::json;

use dkdv_core::classify::{overflow_sites, render_ascii, render_svg};
use dkdv_core::harness::{
    run_crosscheck, simulate_scenario, smoke_1d, sweep_single_strip, CrosscheckReport, HarnessError, Scenario,
    Verdict,
};
use dkdv_core::rules::{interaction_trace, WeightVector};

const EXIT_DISAGREE: u8 = 1;
const EXIT_PRECISION: u8 = 2;
const EXIT_MALFORMED: u8 = 3;

#[derive(Parser)]
#[command(name = "dkdv", version, about = "Singularity laboratory for the discrete KdV equation")]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve a scenario; write valuations (TSV), classification (JSON) and an ASCII map.
    Simulate(RunArgs),
    /// Print the elementary-step trace of a weight vector hit by a diagonal of weight Q.
    Predict {
        /// Ascending weights with optional base row, e.g. `1,3,0,9@0`.
        weights: String,
        q: u32,
    },
    /// Compare lattice strip profiles with the interaction rules.
    Crosscheck(RunArgs),
    /// Cross-check every scenario in a directory, or the built-in single-strip sweep.
    Sweep {
        /// Directory of scenario JSON files.
        #[arg(long)]
        dir: Option<PathBuf>,
        #[arg(long, default_value_t = 6)]
        max_p: u32,
        #[arg(long, default_value_t = 6)]
        max_q: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Singularity patterns of the one-dimensional maps.
    Smoke1d,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    scenario: PathBuf,
    /// Output directory; the DKDV_OUT environment variable takes precedence.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write an SVG rendering.
    #[arg(long)]
    svg: bool,
    /// Override the scenario's PRNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the truncation budget K.
    #[arg(long)]
    truncation: Option<i64>,
}

impl RunArgs {
    fn out_dir(&self) -> Option<PathBuf> {
        std::env::var_os("DKDV_OUT").map(PathBuf::from).or_else(|| self.out.clone())
    }

    fn stem(&self) -> String {
        self.scenario
            .file_stem()
            .map_or("scenario".into(), |s| s.to_string_lossy().into_owned())
    }

    fn load(&self) -> Result<Scenario, Failure> {
        let mut sc = load_scenario(&self.scenario)?;
        if let Some(seed) = self.seed {
            sc.prng_seed = seed;
        }
        if let Some(k) = self.truncation {
            sc.truncation_budget = Some(k);
        }
        sc.validate().map_err(Failure::from)?;
        if sc.name.is_none() {
            sc.name = Some(self.stem());
        }
        Ok(sc)
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        let code = if e.is_precision() { EXIT_PRECISION } else { EXIT_MALFORMED };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn malformed(message: String) -> Failure {
    Failure {
        code: EXIT_MALFORMED,
        message,
    }
}

fn load_scenario(path: &Path) -> Result<Scenario, Failure> {
    let text = fs::read_to_string(path).map_err(|e| malformed(format!("{}: {e}", path.display())))?;
    Scenario::from_json(&text).map_err(|e| malformed(format!("{}: {e}", path.display())))
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, Failure> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| malformed(format!("{}: {e}", path.display())))?;
    Ok(path)
}

fn ensure_dir(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| malformed(format!("{}: {e}", dir.display())))
}

fn simulate(args: &RunArgs) -> Result<u8, Failure> {
    let sc = args.load()?;
    let out = simulate_scenario(&sc)?;
    let c = &out.classification;
    let ascii = render_ascii(&out.vmap, &c.strips);
    let record = json!({
        "scenario": sc.label(),
        "window": sc.window(),
        "truncation_budget": out.truncation_budget,
        "prng_seed": sc.prng_seed,
        "classification": c,
        "overflow": overflow_sites(&out.vmap),
    });
    print!("{ascii}");
    println!(
        "window {}x{}  K={}  strips {}  vertical {}  diagonals {}  clusters {}  undefined {}",
        sc.window()[0],
        sc.window()[1],
        out.truncation_budget,
        c.strips.len(),
        c.vertical_strips.len(),
        c.diagonals.len(),
        c.clusters.len(),
        c.undefined.len()
    );
    for note in &c.notes {
        println!("note: {note}");
    }
    let dir = args.out_dir().unwrap_or_else(|| PathBuf::from("."));
    ensure_dir(&dir)?;
    let stem = args.stem();
    let mut written = vec![
        write(&dir, &format!("{stem}.valuations.tsv"), &out.vmap.to_tsv())?,
        write(
            &dir,
            &format!("{stem}.classification.json"),
            &serde_json::to_string_pretty(&record).expect("serializable"),
        )?,
        write(&dir, &format!("{stem}.txt"), &ascii)?,
    ];
    if args.svg {
        written.push(write(&dir, &format!("{stem}.svg"), &render_svg(&out.vmap, &c.strips, 12))?);
    }
    for p in written {
        println!("wrote {}", p.display());
    }
    Ok(0)
}

fn predict(weights: &str, q: u32) -> Result<u8, Failure> {
    let v: WeightVector = weights.parse().map_err(|e| malformed(format!("weights: {e}")))?;
    println!("start   {v}");
    for (i, step) in interaction_trace(&v, q).iter().enumerate() {
        let mark = if (i + 1) % 2 == 0 { '*' } else { ' ' };
        println!("step {:<2}{mark} {step}", i + 1);
    }
    println!("result  {}", dkdv_core::rules::interact_diagonal(&v, q).canonical());
    Ok(0)
}

fn crosscheck(args: &RunArgs) -> Result<u8, Failure> {
    let sc = args.load()?;
    let report = run_crosscheck(&sc)?;
    print!("{}", report.summary());
    if let Some(dir) = args.out_dir() {
        ensure_dir(&dir)?;
        let p = write(
            &dir,
            &format!("{}.crosscheck.json", args.stem()),
            &serde_json::to_string_pretty(&report).expect("serializable"),
        )?;
        println!("wrote {}", p.display());
    }
    Ok(report.exit_code() as u8)
}

fn table_row(name: &str, r: &Result<CrosscheckReport, HarnessError>) -> (String, u8) {
    let show = |v: &Option<WeightVector>| v.as_ref().map_or("-".into(), |v| v.to_string());
    match r {
        Ok(r) => {
            let verdict = match &r.verdict {
                Verdict::Agree => "agree",
                Verdict::Disagree { .. } => "DISAGREE",
                Verdict::Inconclusive { .. } => "inconclusive",
            };
            (
                format!(
                    "{name:<32} {:<16} {:<16} {:<16} {verdict}",
                    show(&r.west),
                    show(&r.east),
                    show(&r.predicted)
                ),
                r.exit_code() as u8,
            )
        }
        Err(HarnessError::NotCrosscheckable(why)) => (format!("{name:<32} skipped: {why}"), 0),
        Err(e) => (format!("{name:<32} error: {e}"), EXIT_MALFORMED),
    }
}

/// Worst exit code, ranking disagreement above inconclusive runs.
fn worst(codes: impl Iterator<Item = u8>) -> u8 {
    codes.max_by_key(|&c| match c {
        EXIT_DISAGREE => 3,
        EXIT_MALFORMED => 2,
        EXIT_PRECISION => 1,
        _ => 0,
    })
    .unwrap_or(0)
}

fn sweep(dir: Option<&Path>, max_p: u32, max_q: u32, seed: u64) -> Result<u8, Failure> {
    let rows: Vec<(String, u8)> = match dir {
        Some(dir) => {
            let mut paths: Vec<PathBuf> = fs::read_dir(dir)
                .map_err(|e| malformed(format!("{}: {e}", dir.display())))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "json"))
                .collect();
            paths.sort();
            paths
                .par_iter()
                .map(|p| {
                    let name = p.file_stem().unwrap_or_default().to_string_lossy().into_owned();
                    match load_scenario(p) {
                        Ok(sc) => table_row(&name, &run_crosscheck(&sc)),
                        Err(f) => (format!("{name:<32} error: {}", f.message), EXIT_MALFORMED),
                    }
                })
                .collect()
        }
        None => sweep_single_strip(max_p, max_q, seed)
            .iter()
            .map(|(p, q, r)| table_row(&format!("p={p} q={q}"), r))
            .collect(),
    };
    println!("{:<32} {:<16} {:<16} {:<16} verdict", "scenario", "west", "east", "predicted");
    for (line, _) in &rows {
        println!("{line}");
    }
    Ok(worst(rows.iter().map(|r| r.1)))
}

fn smoke() -> Result<u8, Failure> {
    let r = smoke_1d();
    let show = |v: &[Option<i64>]| {
        v.iter()
            .map(|x| x.map_or("?".into(), |x| x.to_string()))
            .collect::<Vec<_>>()
            .join(" ")
    };
    println!("x[n+1] + x[n-1] = 1 + 1/x[n]    {}  {}", show(&r.eq2), if r.eq2_confined { "confined" } else { "FAIL" });
    println!("x[n+1] + x[n-1] = 1 + 1/x[n]^2  {}  {}", show(&r.eq1), if r.eq1_persists { "persists" } else { "FAIL" });
    println!("regular start                   {}  {}", show(&r.eq2_generic), if r.generic_regular { "regular" } else { "FAIL" });
    Ok(if r.pass { 0 } else { EXIT_DISAGREE })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("could not size the thread pool: {e}");
        }
    }
    let result = match &cli.command {
        Command::Simulate(args) => simulate(args),
        Command::Predict { weights, q } => predict(weights, *q),
        Command::Crosscheck(args) => crosscheck(args),
        Command::Sweep {
            dir,
            max_p,
            max_q,
            seed,
        } => sweep(dir.as_deref(), *max_p, *max_q, *seed),
        Command::Smoke1d => smoke(),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
