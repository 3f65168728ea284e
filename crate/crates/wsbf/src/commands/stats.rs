use anyhow::Result;
use serde::Serialize;
use wsbf_core::data::{summary_stats, Period, SummaryStats};

use super::load;
use crate::config::RunConfig;
use crate::export::{ensure_dir, num, write_json, Table};

#[derive(Debug, Serialize)]
struct StatsReport {
    dataset: String,
    first_period: Period,
    last_period: Period,
    #[serde(flatten)]
    stats: SummaryStats,
}

pub fn run(cfg: &RunConfig) -> Result<String> {
    let ds = load(cfg)?;
    let s = summary_stats(ds.target())?;
    let dir = ensure_dir(&cfg.command_dir("stats"))?;
    let mut t = Table::new(&["statistic", "kwh"]);
    for (name, v) in [
        ("observations", s.n as f64),
        ("min", s.min),
        ("max", s.max),
        ("median", s.median),
        ("mean", s.mean),
        ("sd", s.sd),
    ] {
        t.push(vec![name.into(), num(v)]);
    }
    t.write(&dir.join("stats.csv"))?;
    write_json(
        &dir.join("stats.json"),
        &StatsReport {
            dataset: cfg.dataset.clone(),
            first_period: ds.periods()[0],
            last_period: *ds.periods().last().expect("non-empty"),
            stats: s,
        },
    )?;
    Ok(format!(
        "{}: n={} min={} max={} median={} mean={:.2} sd={:.2} kWh",
        cfg.dataset, s.n, s.min, s.max, s.median, s.mean, s.sd
    ))
}
