//! Desk-scale reproduction of the experiment grid: three experiment
//! families over nine (sigma, theta) presets, scored against the true
//! CPDAG or PAG, with deterministic CSV output.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use crate::alignment::{pseudo_correlation_with, AlignmentOptions};
use crate::citest::CiContext;
use crate::discovery::{fci_search, fisher_ci_fn, pc_search, with_labels, SearchConfig};
use crate::graphs::{dag_to_cpdag, true_pag, MixedGraph};
use crate::kernels::{Dataset, KernelParams};
use crate::metrics::shd;
use crate::simdata::{generate_grid, GridSpec, ManifestEntry, TypeGroup};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamPreset {
    pub id: &'static str,
    pub sigma: f64,
    pub theta: f64,
}

pub const PRESETS: [ParamPreset; 9] = [
    ParamPreset { id: "P1", sigma: 0.001, theta: 0.5 },
    ParamPreset { id: "P2", sigma: 0.01, theta: 1.0 },
    ParamPreset { id: "P3", sigma: 0.1, theta: 1.5 },
    ParamPreset { id: "P4", sigma: 0.001, theta: 1.0 },
    ParamPreset { id: "P5", sigma: 0.01, theta: 1.5 },
    ParamPreset { id: "P6", sigma: 0.1, theta: 0.5 },
    ParamPreset { id: "P7", sigma: 0.001, theta: 1.5 },
    ParamPreset { id: "P8", sigma: 0.01, theta: 0.5 },
    ParamPreset { id: "P9", sigma: 0.1, theta: 1.0 },
];

pub fn preset(id: &str) -> Result<ParamPreset> {
    PRESETS
        .iter()
        .copied()
        .find(|p| p.id.eq_ignore_ascii_case(id))
        .ok_or_else(|| Error::Parameter(format!("unknown preset '{id}' (expected P1..P9)")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Exp1,
    Exp2,
    Exp3,
}

impl Experiment {
    pub fn from_number(n: u8) -> Result<Experiment> {
        match n {
            1 => Ok(Experiment::Exp1),
            2 => Ok(Experiment::Exp2),
            3 => Ok(Experiment::Exp3),
            other => Err(Error::Parameter(format!("unknown experiment {other}"))),
        }
    }

    pub fn group(self) -> TypeGroup {
        match self {
            Experiment::Exp1 => TypeGroup::Group1,
            Experiment::Exp2 | Experiment::Exp3 => TypeGroup::Group2,
        }
    }

    pub fn algorithm_name(self) -> &'static str {
        match self {
            Experiment::Exp1 | Experiment::Exp2 => "kapc",
            Experiment::Exp3 => "kafci",
        }
    }

    pub fn with_latents(self) -> bool {
        self == Experiment::Exp3
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub experiment: Experiment,
    pub presets: Vec<ParamPreset>,
    pub alpha: f64,
    pub seed: u64,
    pub grid: GridSpec,
}

impl ExperimentSpec {
    /// Shrunk grid: p = 10 only, 3 graphs x 2 datasets, n up to 2000.
    pub fn desk_scale(experiment: Experiment, seed: u64) -> ExperimentSpec {
        let grid = GridSpec {
            node_sizes: vec![10],
            graphs_per_size: 3,
            datasets_per_graph: 2,
            sample_sizes: vec![100, 500, 1000, 2000],
            seed,
            group: experiment.group(),
            with_latents: experiment.with_latents(),
            ..Default::default()
        };
        ExperimentSpec {
            experiment,
            presets: PRESETS.to_vec(),
            alpha: 0.1,
            seed,
            grid,
        }
    }

    /// Full grid: p in {10, 20, 30}, 10 graphs x 5 datasets, n up to 5000.
    pub fn full_scale(experiment: Experiment, seed: u64) -> ExperimentSpec {
        let grid = GridSpec {
            seed,
            group: experiment.group(),
            with_latents: experiment.with_latents(),
            ..Default::default()
        };
        ExperimentSpec {
            experiment,
            presets: PRESETS.to_vec(),
            alpha: 0.1,
            seed,
            grid,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRow {
    pub dataset_id: String,
    pub algorithm: String,
    pub params_id: String,
    pub p: usize,
    pub n: usize,
    pub status: String,
    pub extra: usize,
    pub missing: usize,
    pub wrong_mark: usize,
    pub shd: usize,
    pub normalized: f64,
    /// wall-clock time of the pseudo-correlation construction alone
    pub corr_ms: f64,
    /// wall-clock time of the whole cell (alignment + search + scoring)
    pub total_ms: f64,
}

/// One dataset of the grid together with its ground truth.
struct Cell {
    dataset_id: String,
    data_path: String,
    dag_path: String,
    latents_path: Option<String>,
    p: usize,
    n: usize,
}

fn cells_from_manifest(spec: &ExperimentSpec, entries: &[ManifestEntry]) -> Result<Vec<Cell>> {
    // filename grammar is fixed by generate_grid: data_p{p}_g{g}_d{d}_n{n}.csv
    let mut cells = Vec::new();
    for e in entries.iter().filter(|e| e.kind == "dataset") {
        let stem = e
            .path
            .strip_prefix("data_")
            .and_then(|s| s.strip_suffix(".csv"))
            .ok_or_else(|| Error::Data(format!("unexpected dataset path '{}'", e.path)))?;
        let parts: Vec<&str> = stem.split('_').collect();
        if parts.len() != 4 {
            return Err(Error::Data(format!("unexpected dataset path '{}'", e.path)));
        }
        let g = &parts[1][1..];
        let d = &parts[2][1..];
        cells.push(Cell {
            dataset_id: stem.to_string(),
            data_path: e.path.clone(),
            dag_path: format!("dag_p{}_g{}.graph", e.p, g),
            latents_path: if spec.experiment.with_latents() {
                Some(format!("latents_p{}_g{}_d{}.txt", e.p, g, d))
            } else {
                None
            },
            p: e.p,
            n: e.n,
        });
    }
    Ok(cells)
}

fn failed_row(cell: &Cell, preset: &ParamPreset, algorithm: &str, msg: &str) -> ScoreRow {
    eprintln!(
        "cell {} preset {} failed: {msg}",
        cell.dataset_id, preset.id
    );
    ScoreRow {
        dataset_id: cell.dataset_id.clone(),
        algorithm: algorithm.to_string(),
        params_id: preset.id.to_string(),
        p: cell.p,
        n: cell.n,
        status: "failed".into(),
        extra: 0,
        missing: 0,
        wrong_mark: 0,
        shd: 0,
        normalized: f64::NAN,
        corr_ms: 0.0,
        total_ms: 0.0,
    }
}

fn run_cell(
    spec: &ExperimentSpec,
    dir: &Path,
    cell: &Cell,
    preset: &ParamPreset,
) -> Result<ScoreRow> {
    let start = Instant::now();
    let dag = MixedGraph::read_file(&dir.join(&cell.dag_path))?;
    let full = Dataset::read_csv(&dir.join(&cell.data_path))?;

    let (dataset, truth) = match &cell.latents_path {
        None => (full, dag_to_cpdag(&dag)?),
        Some(lp) => {
            let text = std::fs::read_to_string(dir.join(lp))
                .map_err(|e| Error::io(dir.join(lp), e))?;
            let mut latents = Vec::new();
            for label in text.lines().filter(|l| !l.trim().is_empty()) {
                let idx = dag
                    .labels()
                    .iter()
                    .position(|l| l == label.trim())
                    .ok_or_else(|| Error::Data(format!("latent label '{label}' not in DAG")))?;
                latents.push(idx);
            }
            latents.sort_unstable();
            let latent_set: std::collections::BTreeSet<usize> = latents.iter().copied().collect();
            (
                full.without_columns(&latents)?,
                true_pag(&dag, &latent_set)?,
            )
        }
    };

    let params = KernelParams::new(preset.sigma, preset.theta)?;
    let opts = AlignmentOptions::default();
    let corr_start = Instant::now();
    let pseudo = pseudo_correlation_with(&dataset, &params, &opts)?;
    let corr_ms = corr_start.elapsed().as_secs_f64() * 1000.0;

    let cfg = SearchConfig {
        alpha: spec.alpha,
        ..Default::default()
    };
    let ctx = CiContext::new(pseudo.entries().clone(), dataset.n_rows(), spec.alpha)?;
    let ci = fisher_ci_fn(&ctx, false);
    let learned = match spec.experiment {
        Experiment::Exp1 | Experiment::Exp2 => {
            let (g, _) = pc_search(&ci, dataset.n_cols(), &cfg)?;
            with_labels(g, dataset.labels())
        }
        Experiment::Exp3 => {
            let (g, _) = fci_search(&ci, dataset.n_cols(), &cfg)?;
            with_labels(g, dataset.labels())
        }
    };

    let report = shd(&truth, &learned)?;
    Ok(ScoreRow {
        dataset_id: cell.dataset_id.clone(),
        algorithm: spec.experiment.algorithm_name().to_string(),
        params_id: preset.id.to_string(),
        p: cell.p,
        n: cell.n,
        status: "ok".into(),
        extra: report.extra,
        missing: report.missing,
        wrong_mark: report.wrong_mark,
        shd: report.shd,
        normalized: report.normalized,
        corr_ms,
        total_ms: start.elapsed().as_secs_f64() * 1000.0,
    })
}

/// Run every (dataset, preset) cell of the manifest; failures become
/// `status = failed` rows instead of aborting. Rows come back sorted by
/// (dataset_id, params_id) so output is independent of completion order.
pub fn run_experiment(
    spec: &ExperimentSpec,
    dir: &Path,
    entries: &[ManifestEntry],
) -> Result<Vec<ScoreRow>> {
    let cells = cells_from_manifest(spec, entries)?;
    let jobs: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..spec.presets.len()).map(move |q| (c, q)))
        .collect();

    let run_one = |&(c, q): &(usize, usize)| -> ScoreRow {
        let cell = &cells[c];
        let preset = &spec.presets[q];
        run_cell(spec, dir, cell, preset).unwrap_or_else(|e| {
            failed_row(cell, preset, spec.experiment.algorithm_name(), &e.to_string())
        })
    };

    #[cfg(feature = "parallel")]
    let mut rows: Vec<ScoreRow> = {
        use rayon::prelude::*;
        jobs.par_iter().map(run_one).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let mut rows: Vec<ScoreRow> = jobs.iter().map(run_one).collect();

    rows.sort_by(|a, b| {
        (&a.dataset_id, &a.params_id, a.n).cmp(&(&b.dataset_id, &b.params_id, b.n))
    });
    Ok(rows)
}

/// Generate the grid (if not already present) and run the experiment.
pub fn run_experiment_fresh(spec: &ExperimentSpec, dir: &Path) -> Result<Vec<ScoreRow>> {
    let manifest_path = dir.join("manifest.csv");
    let entries = if manifest_path.exists() {
        let text = std::fs::read_to_string(&manifest_path)
            .map_err(|e| Error::io(&manifest_path, e))?;
        crate::simdata::manifest_from_csv(&text)?
    } else {
        generate_grid(&spec.grid, dir)?
    };
    run_experiment(spec, dir, &entries)
}

/// Deterministic score table: no wall-clock columns, so two runs with the
/// same seed produce byte-identical files. Timings go to `timings_to_csv`.
pub fn scores_to_csv(rows: &[ScoreRow]) -> String {
    let mut out = String::from(
        "dataset_id,algorithm,params_id,p,n,status,extra,missing,wrong_mark,shd,normalized\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            r.dataset_id,
            r.algorithm,
            r.params_id,
            r.p,
            r.n,
            r.status,
            r.extra,
            r.missing,
            r.wrong_mark,
            r.shd,
            if r.normalized.is_nan() {
                "NA".to_string()
            } else {
                format!("{:.6}", r.normalized)
            }
        ));
    }
    out
}

pub fn timings_to_csv(rows: &[ScoreRow]) -> String {
    let mut out = String::from("dataset_id,algorithm,params_id,p,n,corr_ms,total_ms\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{:.3},{:.3}\n",
            r.dataset_id, r.algorithm, r.params_id, r.p, r.n, r.corr_ms, r.total_ms
        ));
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub params_id: String,
    pub p: usize,
    pub n: usize,
    pub cells: usize,
    pub mean_normalized: f64,
    pub sd_normalized: f64,
    pub mean_corr_ms: f64,
    pub mean_total_ms: f64,
}

/// Per-(preset, p, n) mean and sample standard deviation of the normalized
/// score, with runtime means; failed cells are excluded.
pub fn summarize(rows: &[ScoreRow]) -> Result<Vec<SummaryRow>> {
    if rows.is_empty() {
        return Err(Error::Input("cannot summarize an empty score table".into()));
    }
    let mut groups: BTreeMap<(String, usize, usize), Vec<&ScoreRow>> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.status == "ok") {
        groups
            .entry((r.params_id.clone(), r.p, r.n))
            .or_default()
            .push(r);
    }
    let mut out = Vec::new();
    for ((params_id, p, n), members) in groups {
        let k = members.len() as f64;
        let mean = members.iter().map(|r| r.normalized).sum::<f64>() / k;
        let sd = if members.len() > 1 {
            (members
                .iter()
                .map(|r| (r.normalized - mean).powi(2))
                .sum::<f64>()
                / (k - 1.0))
                .sqrt()
        } else {
            0.0
        };
        out.push(SummaryRow {
            params_id,
            p,
            n,
            cells: members.len(),
            mean_normalized: mean,
            sd_normalized: sd,
            mean_corr_ms: members.iter().map(|r| r.corr_ms).sum::<f64>() / k,
            mean_total_ms: members.iter().map(|r| r.total_ms).sum::<f64>() / k,
        });
    }
    Ok(out)
}

pub fn summary_to_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::from(
        "params_id,p,n,cells,mean_normalized,sd_normalized,mean_corr_ms,mean_total_ms\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{:.6},{:.6},{:.3},{:.3}\n",
            r.params_id, r.p, r.n, r.cells, r.mean_normalized, r.sd_normalized, r.mean_corr_ms, r.mean_total_ms
        ));
    }
    out
}

/// Spearman rank correlation; average ranks on ties.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::Input("spearman needs two equal-length series, len >= 2".into()));
    }
    let rx = ranks(x);
    let ry = ranks(y);
    let n = x.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for i in 0..x.len() {
        cov += (rx[i] - mx) * (ry[i] - my);
        vx += (rx[i] - mx).powi(2);
        vy += (ry[i] - my).powi(2);
    }
    if vx <= 0.0 || vy <= 0.0 {
        return Err(Error::Numeric("spearman: constant series".into()));
    }
    Ok(cov / (vx * vy).sqrt())
}

fn ranks(x: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].partial_cmp(&x[b]).unwrap());
    let mut out = vec![0.0; x.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && x[idx[j + 1]] == x[idx[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for k in i..=j {
            out[idx[k]] = rank;
        }
        i = j + 1;
    }
    out
}
