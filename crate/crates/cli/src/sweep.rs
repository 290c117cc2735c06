//! Slice + negativity over the (B, E, order) product, then a manifest.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use zeeman_core::fock_algebra::FockLabel;
use zeeman_core::printed::{FigureSpec, FIGURES};
use zeeman_core::wigner::slice_cross_check;
use zeeman_core::{Execution, SCHEMA_VERSION};

use crate::config::{FormatArg, Frequency, RunConfig};
use crate::error::{CliError, CliResult};
use crate::{negativity, output, slice};

/// Nodes per axis of the oracle grids behind each cross-check.
pub const CROSS_CHECK_NODES: usize = 161;
pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, Clone, Serialize)]
pub struct CrossCheckSummary {
    pub max_imag: f64,
    pub relative_deviation: f64,
    pub pairs: usize,
    pub points: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Entry {
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "E")]
    pub e: Option<f64>,
    #[serde(rename = "W")]
    pub w: f64,
    pub order: u32,
    pub slice: String,
    pub negativity: String,
    pub heatmap: Option<String>,
    pub reflection_defect: f64,
    pub cross_check: CrossCheckSummary,
    pub figures: Vec<u32>,
}

#[derive(Debug, Clone, Copy)]
struct Job {
    b: f64,
    freq: Frequency,
    order: u32,
}

fn stem(job: &Job) -> String {
    format!("B{}_{}_order{}", job.b, job.freq.tag(), job.order)
}

fn figures_for(job: &Job) -> Vec<u32> {
    FIGURES
        .iter()
        .filter(|f: &&FigureSpec| f.b == job.b && Some(f.e) == job.freq.e && f.order == job.order)
        .map(|f| f.figure)
        .collect()
}

fn run_job(cfg: &RunConfig, dir: &Path, job: &Job, written: &mut Vec<PathBuf>) -> CliResult<Entry> {
    let ext = match cfg.format {
        FormatArg::Csv => "csv",
        FormatArg::Json => "json",
    };
    let exec = Execution::default();
    let level = FockLabel::new(cfg.n1, cfg.n2);
    let stem = stem(job);

    let field = slice::field(cfg, level, job.freq.w, job.b, job.order, &cfg.grid_spec(), exec)?;
    let slice_name = format!("slice_{stem}.{ext}");
    let path = dir.join(&slice_name);
    written.push(path.clone());
    output::write_file(&path, &slice::render(cfg, &field))?;

    let heatmap = if cfg.heatmap {
        let p = slice::heatmap_path(&path);
        written.push(p.clone());
        output::write_pgm(&p, &field)?;
        p.file_name().map(|n| n.to_string_lossy().into_owned())
    } else {
        None
    };

    let mut table = output::Table::new(&negativity::COLUMNS);
    for level in cfg.levels() {
        let r = negativity::compute(cfg, level, job.freq.w, job.b, job.order, exec)?;
        table.push(negativity::row(cfg, level, job.freq, job.b, job.order, &r));
    }
    let neg_name = format!("negativity_{stem}.{ext}");
    let path = dir.join(&neg_name);
    written.push(path.clone());
    output::write_file(&path, &table.render(cfg))?;

    let state = slice::build_state(cfg, level, job.freq.w, job.b, job.order)?;
    let cc = slice_cross_check(&state, (cfg.slice_q2, cfg.slice_p2), CROSS_CHECK_NODES, exec)?;

    Ok(Entry {
        b: job.b,
        e: job.freq.e,
        w: job.freq.w,
        order: job.order,
        slice: slice_name,
        negativity: neg_name,
        heatmap,
        reflection_defect: field.reflection_defect(),
        cross_check: CrossCheckSummary {
            max_imag: cc.max_imag,
            relative_deviation: cc.relative_deviation,
            pairs: cc.pairs,
            points: cc.points,
        },
        figures: figures_for(job),
    })
}

fn run_all(cfg: &RunConfig, dir: &Path, jobs: &[Job]) -> Vec<(CliResult<Entry>, Vec<PathBuf>)> {
    let one = |job: &Job| {
        let mut written = Vec::new();
        let r = run_job(cfg, dir, job, &mut written);
        (r, written)
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        match rayon::ThreadPoolBuilder::new().num_threads(cfg.jobs).build() {
            Ok(pool) => pool.install(|| jobs.par_iter().map(one).collect()),
            Err(_) => jobs.iter().map(one).collect(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        jobs.iter().map(one).collect()
    }
}

pub fn run(cfg: &RunConfig) -> CliResult<()> {
    let dir = cfg
        .out
        .clone()
        .ok_or_else(|| CliError::Config("sweep needs --out <directory>".into()))?;
    let created = !dir.exists();
    std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;

    let mut jobs = Vec::new();
    for freq in cfg.frequencies() {
        for &b in &cfg.b {
            for &order in &cfg.order {
                jobs.push(Job { b, freq, order });
            }
        }
    }

    let results = run_all(cfg, &dir, &jobs);
    let mut entries = Vec::new();
    let mut failure = None;
    let mut all_written = Vec::new();
    for (r, written) in results {
        all_written.extend(written);
        match r {
            Ok(e) => entries.push(e),
            Err(e) => {
                failure.get_or_insert(e);
            }
        }
    }
    if let Some(e) = failure {
        for p in &all_written {
            let _ = std::fs::remove_file(p);
        }
        if created {
            let _ = std::fs::remove_dir(&dir);
        }
        return Err(e);
    }

    let mut figures = BTreeMap::new();
    for e in &entries {
        for f in &e.figures {
            figures.insert(f.to_string(), e.slice.clone());
        }
    }
    let missing: Vec<u32> = FIGURES
        .iter()
        .map(|f| f.figure)
        .filter(|f| !figures.contains_key(&f.to_string()))
        .collect();
    let manifest = json!({
        "schema_version": SCHEMA_VERSION,
        "config": cfg,
        "level": [cfg.n1, cfg.n2],
        "entries": entries,
        "figures": figures,
        "figures_missing": missing,
    });
    output::write_file(&dir.join(MANIFEST), &output::pretty(&manifest))
}
