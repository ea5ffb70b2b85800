//! Per-run result files and the sweep manifest.
//!
//! Layout under an output directory:
//! `<config_id>/<function>/run<k>.csv` holds the best-so-far trajectory
//! (`evals,best_f`), `run<k>.json` the run summary, and `manifest.json`
//! lists every summary in sweep order.

use std::fs;
use std::path::{Path, PathBuf};

use modde_core::runner::RunLog;
use modde_core::{BchmKind, CrossoverKind, MutationStrategy};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const TRAJECTORY_HEADER: &str = "evals,best_f";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub config_id: String,
    pub mutation: MutationStrategy,
    pub crossover: CrossoverKind,
    pub bchm: BchmKind,
    pub function: String,
    pub n: usize,
    pub run: u64,
    pub seed: u64,
    pub instance_seed: u64,
    pub final_best: f64,
    pub f_opt: Option<f64>,
    pub pors: Option<f64>,
    pub repaired: u64,
    pub generated: u64,
    pub evals_used: u64,
    pub generations: u64,
}

impl From<&RunLog> for RunSummary {
    fn from(log: &RunLog) -> Self {
        Self {
            config_id: log.config_id.clone(),
            mutation: log.mutation,
            crossover: log.crossover,
            bchm: log.bchm,
            function: log.function.clone(),
            n: log.n,
            run: log.run_index,
            seed: log.seed,
            instance_seed: log.instance_seed,
            final_best: log.final_best,
            f_opt: log.f_opt,
            pors: log.pors(),
            repaired: log.pors_numerator,
            generated: log.pors_denominator,
            evals_used: log.evals_used,
            generations: log.generations,
        }
    }
}

impl RunSummary {
    pub fn into_log(self, trajectory: Vec<(u64, f64)>) -> RunLog {
        RunLog {
            config_id: self.config_id,
            mutation: self.mutation,
            crossover: self.crossover,
            bchm: self.bchm,
            function: self.function,
            n: self.n,
            run_index: self.run,
            seed: self.seed,
            instance_seed: self.instance_seed,
            trajectory,
            final_best: self.final_best,
            f_opt: self.f_opt,
            evals_used: self.evals_used,
            generations: self.generations,
            pors_numerator: self.repaired,
            pors_denominator: self.generated,
            wall_time_secs: None,
        }
    }

    pub fn relative_dir(&self) -> PathBuf {
        Path::new(&self.config_id).join(&self.function)
    }
}

pub fn run_dir(outdir: &Path, log: &RunLog) -> PathBuf {
    outdir.join(&log.config_id).join(&log.function)
}

pub fn format_trajectory(trajectory: &[(u64, f64)]) -> String {
    let mut out = String::with_capacity(16 * (trajectory.len() + 1));
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    for (evals, best) in trajectory {
        // Debug formatting of f64 round-trips exactly.
        out.push_str(&format!("{evals},{best:?}\n"));
    }
    out
}

pub fn parse_trajectory(path: &Path, text: &str) -> Result<Vec<(u64, f64)>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == TRAJECTORY_HEADER => {}
        _ => {
            return Err(Error::Parse {
                path: path.into(),
                line: 1,
                msg: format!("expected header `{TRAJECTORY_HEADER}`"),
            })
        }
    }
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let bad = |msg: &str| Error::Parse {
            path: path.into(),
            line: i + 2,
            msg: msg.into(),
        };
        let (e, f) = line.split_once(',').ok_or_else(|| bad("expected two fields"))?;
        let e = e.trim().parse::<u64>().map_err(|_| bad("bad evaluation count"))?;
        let f = f.trim().parse::<f64>().map_err(|_| bad("bad objective value"))?;
        out.push((e, f));
    }
    Ok(out)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn to_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|source| Error::Json {
        path: path.into(),
        source,
    })?;
    s.push('\n');
    Ok(s)
}

/// Writes the trajectory and summary of one run; returns the summary path.
pub fn write_run(outdir: &Path, log: &RunLog) -> Result<PathBuf> {
    let dir = run_dir(outdir, log);
    let k = log.run_index;
    write_file(&dir.join(format!("run{k}.csv")), &format_trajectory(&log.trajectory))?;
    let json_path = dir.join(format!("run{k}.json"));
    write_file(&json_path, &to_json(&json_path, &RunSummary::from(log))?)?;
    Ok(json_path)
}

/// Writes every run plus the manifest.
pub fn write_sweep(outdir: &Path, logs: &[RunLog]) -> Result<()> {
    fs::create_dir_all(outdir).map_err(|e| Error::io(outdir, e))?;
    for log in logs {
        write_run(outdir, log)?;
    }
    let summaries: Vec<RunSummary> = logs.iter().map(RunSummary::from).collect();
    let path = outdir.join(MANIFEST_FILE);
    write_file(&path, &to_json(&path, &summaries)?)
}

pub fn read_manifest(indir: &Path) -> Result<Vec<RunSummary>> {
    let path = indir.join(MANIFEST_FILE);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    serde_json::from_str(&text).map_err(|source| Error::Json { path, source })
}

/// Loads every run listed in the manifest, trajectories included.
pub fn read_sweep(indir: &Path) -> Result<Vec<RunLog>> {
    read_manifest(indir)?
        .into_iter()
        .map(|s| {
            let path = indir.join(s.relative_dir()).join(format!("run{}.csv", s.run));
            let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            let trajectory = parse_trajectory(&path, &text)?;
            Ok(s.into_log(trajectory))
        })
        .collect()
}

/// Writes a CSV table; each row already joined by the caller.
pub fn write_csv(path: &Path, header: &str, rows: &[String]) -> Result<()> {
    let mut out = String::new();
    out.push_str(header);
    out.push('\n');
    for row in rows {
        out.push_str(row);
        out.push('\n');
    }
    write_file(path, &out)
}
