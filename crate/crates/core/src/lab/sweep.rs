//! Running plans: a worker pool computes points, one writer persists them
//! in schedule order.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::Quantity;
use super::plan::{ExperimentPlan, Regime};
use crate::entropy::entanglement_entropy;
use crate::error::{invalid, Error, Result};
use crate::specfun::{FunctionKind, SpectralFunction};
use crate::whop::trace_d;

#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub alpha: f64,
    pub temperature: f64,
    pub gamma_or_f: String,
    pub regime: Regime,
    pub dim: usize,
    /// tr D_α(a, Λ; f), or H_γ for entanglement sweeps.
    pub trace: f64,
    /// Weyl term (α/2π)^d |Λ| ∫ f(a).
    pub bulk: f64,
    /// trace / α^{d−1}
    pub remainder: f64,
    pub grid_n: usize,
    pub two_grid_err: f64,
    pub wall_ms: f64,
    pub method: String,
    pub error: Option<String>,
}

impl RunRecord {
    pub fn is_usable(&self) -> bool {
        self.error.is_none() && self.trace.is_finite() && self.remainder.is_finite()
    }
}

/// One row of the sweep CSV.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CsvRow {
    pub alpha: f64,
    #[serde(rename = "T")]
    pub temperature: f64,
    pub gamma_or_f: String,
    pub trace: f64,
    pub bulk: f64,
    pub remainder: f64,
    pub grid_n: usize,
    pub two_grid_err: f64,
    pub wall_ms: f64,
}

impl From<&RunRecord> for CsvRow {
    fn from(r: &RunRecord) -> Self {
        Self {
            alpha: r.alpha,
            temperature: r.temperature,
            gamma_or_f: r.gamma_or_f.clone(),
            trace: r.trace,
            bulk: r.bulk,
            remainder: r.remainder,
            grid_n: r.grid_n,
            two_grid_err: r.two_grid_err,
            wall_ms: r.wall_ms,
        }
    }
}

pub const CSV_HEADER: &str = "alpha,T,gamma_or_f,trace,bulk,remainder,grid_n,two_grid_err,wall_ms";

pub fn function_label(f: &SpectralFunction) -> String {
    match f.kind {
        FunctionKind::Eta { gamma } => format!("{gamma}"),
        _ => f.name(),
    }
}

fn eta_gamma(f: &SpectralFunction) -> Result<f64> {
    match f.kind {
        FunctionKind::Eta { gamma } => Ok(gamma),
        _ => Err(invalid("entanglement sweeps need f = η_γ")),
    }
}

fn run_point(plan: &ExperimentPlan, alpha: f64, t: f64) -> Result<(f64, f64, usize, f64, String)> {
    match plan.quantity {
        Quantity::Trace => {
            let a = plan.symbol.at(t)?;
            let r = trace_d(&a, &plan.region, alpha, &plan.function, &plan.grid)?;
            Ok((r.value, r.weyl, r.grid_n, r.two_grid_err, r.method))
        }
        Quantity::Entanglement => {
            let mu = match &plan.symbol {
                super::config::SymbolFamily::Fermi(d) => d.mu,
                _ => return Err(invalid("entanglement sweeps need a Fermi symbol")),
            };
            let gamma = eta_gamma(&plan.function)?;
            let r = entanglement_entropy(gamma, t, mu, &plan.region, alpha, plan.kappa, &plan.grid)?;
            Ok((r.value, 0.0, r.grid_n, r.two_grid_err, "entanglement".into()))
        }
    }
}

fn record(plan: &ExperimentPlan, alpha: f64, t: f64) -> RunRecord {
    let start = Instant::now();
    let out = run_point(plan, alpha, t);
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    let dim = plan.region.dim();
    let mut rec = RunRecord {
        alpha,
        temperature: t,
        gamma_or_f: function_label(&plan.function),
        regime: plan.regime,
        dim,
        trace: f64::NAN,
        bulk: f64::NAN,
        remainder: f64::NAN,
        grid_n: 0,
        two_grid_err: f64::NAN,
        wall_ms,
        method: String::new(),
        error: None,
    };
    match out {
        Ok((trace, bulk, n, err, method)) => {
            rec.trace = trace;
            rec.bulk = bulk;
            rec.remainder = trace / alpha.powi(dim as i32 - 1);
            rec.grid_n = n;
            rec.two_grid_err = err;
            rec.method = method;
        }
        Err(e) => rec.error = Some(e.to_string()),
    }
    rec
}

/// Run every point of `plan` on `threads` workers. Rows reach `sink` in
/// schedule order and are flushed one by one, so an interrupted sweep keeps
/// every completed prefix. Point failures are kept in the record.
pub fn run_sweep<W: Write>(plan: &ExperimentPlan, threads: usize, sink: Option<W>) -> Result<Vec<RunRecord>> {
    plan.validate()?;
    let mut writer = sink.map(|w| csv::WriterBuilder::new().has_headers(false).from_writer(w));
    if let Some(w) = writer.as_mut() {
        w.write_record(CSV_HEADER.split(',')).map_err(csv_err)?;
        w.flush()?;
    }
    let n = plan.points.len();
    let mut out: Vec<RunRecord> = Vec::with_capacity(n);
    if n == 0 {
        return Ok(out);
    }
    let next = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel::<(usize, RunRecord)>();
    let workers = threads.clamp(1, n);
    std::thread::scope(|s| -> Result<()> {
        for _ in 0..workers {
            let tx = tx.clone();
            let next = &next;
            s.spawn(move || loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= n {
                    break;
                }
                let (a, t) = plan.points[i];
                if tx.send((i, record(plan, a, t))).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        let mut pending = BTreeMap::new();
        for (i, rec) in rx {
            pending.insert(i, rec);
            while let Some(rec) = pending.remove(&out.len()) {
                if let Some(w) = writer.as_mut() {
                    w.serialize(CsvRow::from(&rec)).map_err(csv_err)?;
                    w.flush()?;
                }
                if let Some(e) = &rec.error {
                    eprintln!("point α={} T={} failed: {e}", rec.alpha, rec.temperature);
                }
                out.push(rec);
            }
        }
        Ok(())
    })?;
    Ok(out)
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e.to_string()))
}

/// Read a sweep CSV back into records. Regime and dimension are not stored
/// and must be supplied.
pub fn read_csv(path: &Path, regime: Regime, dim: usize) -> Result<Vec<RunRecord>> {
    let mut rd = csv::Reader::from_path(path).map_err(csv_err)?;
    let mut out = Vec::new();
    for row in rd.deserialize::<CsvRow>() {
        let r = row.map_err(csv_err)?;
        out.push(RunRecord {
            alpha: r.alpha,
            temperature: r.temperature,
            gamma_or_f: r.gamma_or_f,
            regime,
            dim,
            trace: r.trace,
            bulk: r.bulk,
            remainder: r.remainder,
            grid_n: r.grid_n,
            two_grid_err: r.two_grid_err,
            wall_ms: r.wall_ms,
            method: String::new(),
            error: None,
        });
    }
    Ok(out)
}
