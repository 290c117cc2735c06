use zeeman_core::fock_algebra::FockLabel;
use zeeman_core::printed;
use zeeman_core::wigner::{negativity, negativity_slice, NegativityOptions, NegativityResult, PhaseSpaceState};
use zeeman_core::Execution;

use crate::config::{Frequency, RunConfig, VariantArg};
use crate::error::CliResult;
use crate::output::{Cell, Table};
use crate::slice::build_state;

pub const COLUMNS: [&str; 16] = [
    "n1",
    "n2",
    "B",
    "eta",
    "paper_eta",
    "abs_deviation",
    "E",
    "W",
    "order",
    "variant",
    "form",
    "abs_integral",
    "integral",
    "error_estimate",
    "tail_bound",
    "u_max",
];

pub fn compute(cfg: &RunConfig, level: FockLabel, w: f64, b: f64, order: u32, exec: Execution) -> CliResult<NegativityResult> {
    let state = PhaseSpaceState::from_fock(&build_state(cfg, level, w, b, order)?)?;
    Ok(match cfg.variant {
        VariantArg::Full => negativity(
            &state,
            &NegativityOptions {
                tol: cfg.tol,
                form: cfg.negativity_form(),
                exec,
                ..NegativityOptions::default()
            },
        )?,
        VariantArg::Slice => negativity_slice(&state, (cfg.slice_q2, cfg.slice_p2), cfg.negativity_form())?,
    })
}

pub fn row(cfg: &RunConfig, level: FockLabel, freq: Frequency, b: f64, order: u32, r: &NegativityResult) -> Vec<Cell> {
    let paper = printed::negativity(level, b);
    vec![
        level.n1.into(),
        level.n2.into(),
        b.into(),
        r.eta.into(),
        paper.into(),
        paper.map(|p| (r.eta - p).abs()).into(),
        freq.e.into(),
        freq.w.into(),
        order.into(),
        match cfg.variant {
            VariantArg::Full => "4d",
            VariantArg::Slice => "slice",
        }
        .into(),
        match cfg.form {
            crate::config::FormArg::Volume => "volume",
            crate::config::FormArg::Halved => "halved",
        }
        .into(),
        r.abs_integral.into(),
        r.integral.into(),
        r.error_estimate.into(),
        r.tail_bound.into(),
        r.u_max.into(),
    ]
}

pub fn table(cfg: &RunConfig, exec: Execution) -> CliResult<Table> {
    let mut t = Table::new(&COLUMNS);
    t.notes.push((
        "eta".into(),
        match cfg.variant {
            VariantArg::Full => "integral of |f_W| over 4d phase space minus 1".into(),
            VariantArg::Slice => format!("slice at q2={},p2={}: integral |f| / |integral f| minus 1", cfg.slice_q2, cfg.slice_p2),
        },
    ));
    t.notes.push(("paper_eta".into(), "printed table value; its definition of eta is not stated".into()));
    for freq in cfg.frequencies() {
        for &order in &cfg.order {
            for &b in &cfg.b {
                for level in cfg.levels() {
                    let r = compute(cfg, level, freq.w, b, order, exec)?;
                    t.push(row(cfg, level, freq, b, order, &r));
                }
            }
        }
    }
    Ok(t)
}

pub fn run(cfg: &RunConfig) -> CliResult<()> {
    crate::output::emit(cfg, &table(cfg, Execution::default())?.render(cfg))
}
