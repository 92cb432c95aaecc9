use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::Value as Json;

use eorder_core::effects::rw_table;
use eorder_core::hb::ProbePolicy;
use eorder_core::lang::parse;
use eorder_core::report::{analyze, summary, verify_report_json, AnalyzeError, AnalyzeOptions, Mode};

const EXIT_CLEAN: u8 = 0;
const EXIT_ERROR: u8 = 1;
const EXIT_BUGS: u8 = 2;

#[derive(Parser)]
#[command(name = "eorder", version, about = "Find event-ordering bugs in .fsol contracts")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Analyse a contract under a scenario.
    Analyze(AnalyzeArgs),
    /// Replay every witness in a report.
    Verify {
        report: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Sync,
    Lin,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProbeArg {
    Coherent,
    All,
}

#[derive(clap::Args)]
struct AnalyzeArgs {
    contract: PathBuf,
    #[arg(long, env = "ETHRACER_SCENARIO", required_unless_present = "dump_rwsets")]
    scenario: Option<PathBuf>,
    /// Initial state snapshot, replacing the scenario's own.
    #[arg(long, env = "ETHRACER_STATE")]
    state: Option<PathBuf>,
    #[arg(long, value_enum, env = "ETHRACER_MODE")]
    mode: Option<ModeArg>,
    #[arg(long, env = "ETHRACER_REPORT")]
    report: Option<PathBuf>,
    #[arg(long, env = "ETHRACER_MAX_LEN")]
    max_len: Option<usize>,
    #[arg(long, env = "ETHRACER_MIN_LEN")]
    min_len: Option<usize>,
    /// Wall-clock budget in minutes; 0 disables it.
    #[arg(long, env = "ETHRACER_TIMEOUT_MIN", default_value_t = 150)]
    timeout_min: u64,
    #[arg(long, env = "ETHRACER_MAX_TRACES")]
    max_traces: Option<u64>,
    #[arg(long, env = "ETHRACER_WITNESS_CAP", default_value_t = 8)]
    witness_cap: usize,
    #[arg(long, env = "ETHRACER_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, env = "ETHRACER_JOBS")]
    jobs: Option<usize>,
    /// Print the read/write sets as JSON and stop.
    #[arg(long)]
    dump_rwsets: bool,
    #[arg(long, env = "ETHRACER_COMPARE_TRANSFERS")]
    compare_transfers: bool,
    /// Compare all pairs of valid orders, not just against the first.
    #[arg(long, env = "ETHRACER_PAIRWISE")]
    pairwise: bool,
    /// Also report reorderings of events of the same function.
    #[arg(long, env = "ETHRACER_CROSS_ENTRY")]
    cross_entry: bool,
    #[arg(long, value_enum, env = "ETHRACER_PROBE", default_value = "coherent")]
    probe: ProbeArg,
    /// Include wall time in the report; the report is then no longer reproducible.
    #[arg(long, env = "ETHRACER_RECORD_TIMING")]
    record_timing: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_CLEAN };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let res = match cli.cmd {
        Cmd::Analyze(a) => run_analyze(a),
        Cmd::Verify { report } => run_verify(&report),
    };
    match res {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

fn read(p: &Path) -> Result<String, String> {
    fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))
}

fn read_json(p: &Path) -> Result<Json, String> {
    serde_json::from_str(&read(p)?).map_err(|e| format!("{}: {e}", p.display()))
}

fn run_analyze(a: AnalyzeArgs) -> Result<u8, String> {
    if let Some(n) = a.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| e.to_string())?;
    }
    let source = read(&a.contract)?;
    if a.dump_rwsets {
        let c = parse(&source).map_err(|e| format!("{}:{e}", a.contract.display()))?;
        println!("{}", serde_json::to_string_pretty(&rw_table(&c)).expect("serialisable"));
        return Ok(EXIT_CLEAN);
    }
    let scenario_path = a.scenario.as_ref().expect("required by clap");
    let scenario = read_json(scenario_path)?;
    let snapshot = a.state.as_deref().map(read_json).transpose()?;
    let opts = AnalyzeOptions {
        mode: a.mode.map(|m| match m {
            ModeArg::Sync => Mode::Sync,
            ModeArg::Lin => Mode::Lin,
            ModeArg::Both => Mode::Both,
        }),
        kmin: a.min_len,
        kmax: a.max_len,
        witness_cap: a.witness_cap,
        pairwise: a.pairwise,
        cross_entry: a.cross_entry,
        compare_transfers: a.compare_transfers,
        timeout: (a.timeout_min > 0).then(|| Duration::from_secs(a.timeout_min * 60)),
        max_traces: a.max_traces,
        probe: match a.probe {
            ProbeArg::Coherent => ProbePolicy::ValueCoherent,
            ProbeArg::All => ProbePolicy::AllPairs,
        },
        seed: a.seed,
        record_timing: a.record_timing,
        snapshot,
    };
    let analysis = analyze(&source, &scenario, &opts).map_err(|e| match e {
        AnalyzeError::Parse(p) => format!("{}:{p}", a.contract.display()),
        AnalyzeError::Scenario(s) => format!("{}: {s}", scenario_path.display()),
        other => other.to_string(),
    })?;
    print!("{}", summary(&analysis));
    if let Some(out) = &a.report {
        fs::write(out, analysis.report.to_json_string()).map_err(|e| format!("{}: {e}", out.display()))?;
        println!("report written to {}", out.display());
    }
    Ok(if analysis.report.bug_count() > 0 { EXIT_BUGS } else { EXIT_CLEAN })
}

fn run_verify(p: &Path) -> Result<u8, String> {
    match verify_report_json(&read(p)?) {
        Ok(s) => {
            println!("ok: {} witnesses and {} lin violations replayed", s.witnesses, s.violations);
            Ok(EXIT_CLEAN)
        }
        Err(e) => {
            println!("FAILED: {e}");
            Ok(EXIT_BUGS)
        }
    }
}
