use std::path::Path;

use zeeman_core::fock_algebra::FockLabel;
use zeeman_core::grid::{Field2D, GridSpec};
use zeeman_core::perturbation::{first_order_state, FockState, H1_DEGREE};
use zeeman_core::wigner::{wigner_slice, PhaseSpaceState};
use zeeman_core::Execution;

use crate::config::{FormatArg, RunConfig};
use crate::error::CliResult;
use crate::output;

/// Zeroth-order basis state or first-order perturbed state.
pub fn build_state(cfg: &RunConfig, level: FockLabel, w: f64, b: f64, order: u32) -> CliResult<FockState> {
    let cutoff = cfg.cutoff.unwrap_or(level.total() + H1_DEGREE + 2);
    Ok(match order {
        0 => FockState::basis(level, w, cutoff)?,
        _ => first_order_state(level, w, b, cfg.state_mode(), Some(cutoff))?.0,
    })
}

pub fn field(cfg: &RunConfig, level: FockLabel, w: f64, b: f64, order: u32, grid: &GridSpec, exec: Execution) -> CliResult<Field2D> {
    let state = build_state(cfg, level, w, b, order)?;
    let mut f = wigner_slice(&PhaseSpaceState::from_fock(&state)?, grid, exec)?;
    output::annotate(&mut f, cfg);
    f.metadata.insert("level".into(), format!("{},{}", level.n1, level.n2));
    f.metadata.insert("order".into(), order.to_string());
    f.metadata.insert("B".into(), format!("{b}"));
    Ok(f)
}

pub fn render(cfg: &RunConfig, f: &Field2D) -> String {
    match cfg.format {
        FormatArg::Csv => f.to_csv(),
        FormatArg::Json => output::field_json(f),
    }
}

pub fn heatmap_path(out: &Path) -> std::path::PathBuf {
    out.with_extension("pgm")
}

pub fn run(cfg: &RunConfig) -> CliResult<()> {
    let b = cfg.single_b()?;
    let freq = cfg.single_frequency()?;
    let order = cfg.single_order()?;
    let level = FockLabel::new(cfg.n1, cfg.n2);
    let f = field(cfg, level, freq.w, b, order, &cfg.grid_spec(), Execution::default())?;
    output::emit(cfg, &render(cfg, &f))?;
    if cfg.heatmap {
        let out = cfg.out.as_deref().unwrap_or(Path::new("slice.csv"));
        output::write_pgm(&heatmap_path(out), &f)?;
    }
    Ok(())
}
