use anyhow::Result;
use wsbf_core::evaluation::{stationarity_trend_seasonality, TestOutcome};

use super::load;
use crate::config::RunConfig;
use crate::export::{correlogram_tables, ensure_dir, num, opt, write_json, Table};

pub fn run(cfg: &RunConfig) -> Result<String> {
    let ds = load(cfg)?;
    let y = ds.target();
    let max_lag = cfg.diagnostics.max_lag.min(y.len().saturating_sub(1));
    let rep = stationarity_trend_seasonality(y, cfg.diagnostics.period, max_lag)?;
    let dir = ensure_dir(&cfg.command_dir("diagnose"))?;
    let (acf, pacf) = correlogram_tables(&rep.correlogram);
    acf.write(&dir.join("acf.csv"))?;
    pacf.write(&dir.join("pacf.csv"))?;
    let mut t = Table::new(&["test", "statistic", "p_value", "critical_value", "conclusion"]);
    let row = |name: &str, o: &TestOutcome| {
        vec![
            name.to_string(),
            num(o.statistic),
            opt(o.p_value),
            opt(o.critical_value),
            o.conclusion.clone(),
        ]
    };
    t.push(row("kpss", &rep.kpss));
    t.push(row("mann_kendall", &rep.mann_kendall));
    t.push(row("kruskal_wallis", &rep.kruskal_wallis));
    t.write(&dir.join("tests.csv"))?;
    write_json(&dir.join("diagnostics.json"), &rep)?;
    Ok(format!(
        "{}: KPSS {:.4} ({}), Mann-Kendall p={:.4} ({}), Kruskal-Wallis p={:.4} ({})",
        cfg.dataset,
        rep.kpss.statistic,
        rep.kpss.conclusion,
        rep.mann_kendall.p_value.unwrap_or(f64::NAN),
        rep.mann_kendall.conclusion,
        rep.kruskal_wallis.p_value.unwrap_or(f64::NAN),
        rep.kruskal_wallis.conclusion
    ))
}
