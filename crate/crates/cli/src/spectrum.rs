use zeeman_core::perturbation::{delta_oracle, delta_paper, energy, k0, k1, DeltaSource};
use zeeman_core::Scalar;

use crate::config::RunConfig;
use crate::error::CliResult;
use crate::output::Table;

pub const COLUMNS: [&str; 12] = [
    "n1",
    "n2",
    "B",
    "W",
    "k0",
    "delta_paper",
    "delta_oracle",
    "k1_paper",
    "k1_oracle",
    "E_paper",
    "E_oracle",
    "E_selected",
];

pub fn table(cfg: &RunConfig) -> CliResult<Table> {
    let mut t = Table::new(&COLUMNS);
    t.notes.push(("energy".into(), "E = -((k - B^2 delta/8)/N)^2/2, N = n1+n2+1".into()));
    let selected = cfg.delta_source();
    for freq in cfg.frequencies() {
        for &b in &cfg.b {
            for level in cfg.levels() {
                let (n1, n2) = (level.n1, level.n2);
                let dp = delta_paper::<f64>(n1, n2);
                let d_or = delta_oracle(n1, n2).to_f64();
                t.push(vec![
                    n1.into(),
                    n2.into(),
                    b.into(),
                    freq.w.into(),
                    k0(n1, n2, freq.w).into(),
                    dp.into(),
                    d_or.into(),
                    k1(n1, n2, freq.w, b, DeltaSource::Paper).into(),
                    k1(n1, n2, freq.w, b, DeltaSource::Oracle).into(),
                    energy(n1, n2, b, cfg.k, DeltaSource::Paper).into(),
                    energy(n1, n2, b, cfg.k, DeltaSource::Oracle).into(),
                    energy(n1, n2, b, cfg.k, selected).into(),
                ]);
            }
        }
    }
    Ok(t)
}

pub fn run(cfg: &RunConfig) -> CliResult<()> {
    crate::output::emit(cfg, &table(cfg)?.render(cfg))
}
