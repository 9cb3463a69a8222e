//! Application benchmarks, SWAP-insertion routing, the improvement model and report files.

use crate::circuit::{Circuit, Gate};
use crate::decomp::{lower_swap, lower_to_native, SwapStrategy};
use crate::device::{circuit_metrics, DeviceModel};
use crate::error::{Error, Result};
use crate::noise::{run_irb_experiment, simulate_density, IrbConfig, NoiseModel, MAX_DENSITY_WIRES};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BenchmarkName {
    LongSwap,
    BernsteinVazirani,
}

impl BenchmarkName {
    pub fn name(self) -> &'static str {
        match self {
            BenchmarkName::LongSwap => "long-swap",
            BenchmarkName::BernsteinVazirani => "bv",
        }
    }
}

impl fmt::Display for BenchmarkName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BenchmarkName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "long-swap" => Ok(BenchmarkName::LongSwap),
            "bv" | "bernstein-vazirani" => Ok(BenchmarkName::BernsteinVazirani),
            _ => Err(Error::Invalid(format!("unknown benchmark `{s}`"))),
        }
    }
}

/// A logical circuit with the outcome it should produce; `None` marks a wire
/// whose value does not matter.
#[derive(Clone, Debug, PartialEq)]
pub struct Benchmark {
    pub name: BenchmarkName,
    pub n: usize,
    pub circuit: Circuit,
    pub expected: Vec<Option<bool>>,
}

impl Benchmark {
    /// `0`, `1` or `x` per wire.
    pub fn expected_string(&self) -> String {
        self.expected
            .iter()
            .map(|b| match b {
                Some(true) => '1',
                Some(false) => '0',
                None => 'x',
            })
            .collect()
    }
}

/// LONG_SWAP moves an excitation from wire 0 to wire `n-1` through a SWAP
/// chain. BV finds the all-ones secret on wires `0..n-1`; the ancilla is wire `n-1`.
pub fn gen_benchmark(name: BenchmarkName, n: usize) -> Result<Benchmark> {
    if n < 2 {
        return Err(Error::Invalid(format!("{name} needs at least 2 qubits, got {n}")));
    }
    let mut c = Circuit::new(n)?;
    let expected = match name {
        BenchmarkName::LongSwap => {
            c.push(Gate::X(0))?;
            for i in 0..n - 1 {
                c.push(Gate::Swap(i, i + 1))?;
            }
            (0..n).map(|i| Some(i == n - 1)).collect()
        }
        BenchmarkName::BernsteinVazirani => {
            let anc = n - 1;
            c.push(Gate::X(anc))?;
            c.push(Gate::H(anc))?;
            for d in 0..anc {
                c.push(Gate::H(d))?;
            }
            for d in 0..anc {
                c.push(Gate::Cnot(d, anc))?;
            }
            for d in 0..anc {
                c.push(Gate::H(d))?;
            }
            let mut e = vec![Some(true); anc];
            e.push(None);
            e
        }
    };
    Ok(Benchmark {
        name,
        n,
        circuit: c,
        expected,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Routed {
    /// On device qubits, `device.n_wires()` wires.
    pub circuit: Circuit,
    /// SWAPs inserted by routing.
    pub k: usize,
    /// Logical wire to device qubit after the last gate.
    pub placement: Vec<usize>,
}

impl Routed {
    /// All SWAPs in the routed circuit, inserted or not.
    pub fn swap_count(&self) -> usize {
        self.circuit.gates().iter().filter(|g| matches!(g, Gate::Swap(..))).count()
    }
}

/// Shortest path by BFS, visiting neighbours in increasing index order.
fn shortest_path(device: &DeviceModel, from: usize, to: usize) -> Option<Vec<usize>> {
    let n = device.n_wires();
    let mut prev = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([from]);
    seen[from] = true;
    while let Some(v) = queue.pop_front() {
        if v == to {
            let mut path = vec![to];
            while *path.last().unwrap() != from {
                path.push(prev[*path.last().unwrap()]);
            }
            path.reverse();
            return Some(path);
        }
        for w in device.neighbors(v) {
            if !seen[w] {
                seen[w] = true;
                prev[w] = v;
                queue.push_back(w);
            }
        }
    }
    None
}

/// Greedy routing: before each two-qubit gate on non-adjacent qubits, the
/// control walks a shortest path toward the target by SWAPs.
pub fn route_on_coupling(c: &Circuit, device: &DeviceModel, placement: &[usize]) -> Result<Routed> {
    let nq = device.n_wires();
    if placement.len() != c.n_wires() {
        return Err(Error::Invalid(format!(
            "placement has {} entries for {} wires",
            placement.len(),
            c.n_wires()
        )));
    }
    let mut at = vec![None; nq];
    for (w, &q) in placement.iter().enumerate() {
        device.qubit(q)?;
        if at[q].replace(w).is_some() {
            return Err(Error::Invalid(format!("placement maps two wires to qubit {q}")));
        }
    }
    let mut pl = placement.to_vec();
    let mut out = Circuit::new(nq)?;
    let mut k = 0;
    for g in c.gates() {
        let (control, target) = match *g {
            Gate::Cnot(a, b) | Gate::Swap(a, b) => (a, b),
            Gate::Notc(a, b) => (b, a),
            Gate::Cr { control, target, .. } => (control, target),
            _ => {
                out.push(g.relabel(|w| pl[w]))?;
                continue;
            }
        };
        let (p, q) = (pl[control], pl[target]);
        if device.edge(p, q).is_err() {
            let path = shortest_path(device, p, q).ok_or(Error::NotConnected(p, q))?;
            for step in path.windows(2).take(path.len() - 2) {
                let (u, v) = (step[0], step[1]);
                out.push(Gate::Swap(u, v))?;
                k += 1;
                at.swap(u, v);
                for (q, w) in [(u, at[u]), (v, at[v])] {
                    if let Some(w) = w {
                        pl[w] = q;
                    }
                }
            }
        }
        out.push(g.relabel(|w| pl[w]))?;
    }
    Ok(Routed {
        circuit: out,
        k,
        placement: pl,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchOutcome {
    pub benchmark: BenchmarkName,
    pub n: usize,
    pub strategy: SwapStrategy,
    pub k: usize,
    pub swap_count: usize,
    pub success: f64,
    pub duration_dt: u64,
    pub duration_ns: f64,
    pub external_rotation_deg: f64,
}

/// Routes, lowers (only SWAPs differ by strategy), simulates and returns the
/// probability of the expected output. `placement` defaults to the identity.
pub fn run_benchmark(
    b: &Benchmark,
    device: &DeviceModel,
    noise: &NoiseModel,
    strategy: SwapStrategy,
    placement: Option<&[usize]>,
) -> Result<BenchOutcome> {
    let identity: Vec<usize> = (0..b.n).collect();
    let routed = route_on_coupling(&b.circuit, device, placement.unwrap_or(&identity))?;
    let used: Vec<usize> = routed
        .placement
        .iter()
        .copied()
        .chain(routed.circuit.active_wires())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if used.len() > MAX_DENSITY_WIRES {
        return Err(Error::TooManyWires {
            n_wires: used.len(),
            max: MAX_DENSITY_WIRES,
        });
    }
    let local = |q: usize| used.iter().position(|&u| u == q).expect("used qubit");
    let sub = device.restrict(&used)?;
    let circuit = routed.circuit.relabeled(used.len(), local)?;
    let native = lower_to_native(&circuit, &sub, strategy)?;
    let metrics = circuit_metrics(&native, &sub)?;
    let probs = simulate_density::<f64>(&native, noise, &sub)?;
    let n = used.len();
    let checks: Vec<(usize, bool)> = b
        .expected
        .iter()
        .enumerate()
        .filter_map(|(w, e)| e.map(|bit| (local(routed.placement[w]), bit)))
        .collect();
    let success = probs
        .iter()
        .enumerate()
        .filter(|(idx, _)| checks.iter().all(|&(r, bit)| (idx >> (n - 1 - r) & 1 == 1) == bit))
        .map(|(_, p)| p)
        .sum();
    Ok(BenchOutcome {
        benchmark: b.name,
        n: b.n,
        strategy,
        k: routed.k,
        swap_count: routed.swap_count(),
        success,
        duration_dt: metrics.duration_dt,
        duration_ns: metrics.duration_ns,
        external_rotation_deg: metrics.external_rotation_deg,
    })
}

/// Every `(n, strategy)` combination, run in parallel and returned in input order.
pub fn bench_sweep(
    name: BenchmarkName,
    ns: &[usize],
    device: &DeviceModel,
    noise: &NoiseModel,
    strategies: &[SwapStrategy],
) -> Result<Vec<BenchOutcome>> {
    let jobs: Vec<(usize, SwapStrategy)> = ns
        .iter()
        .flat_map(|&n| strategies.iter().map(move |&s| (n, s)))
        .collect();
    jobs.par_iter()
        .map(|&(n, s)| run_benchmark(&gen_benchmark(name, n)?, device, noise, s, None))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImprovementParams {
    pub error_opt: f64,
    pub error_std: f64,
    pub k: u32,
    pub delta_t_us: f64,
    pub t1_us: f64,
    pub t2_us: f64,
    pub n: u32,
}

impl ImprovementParams {
    pub fn validate(&self) -> Result<()> {
        for (name, e) in [("error_opt", self.error_opt), ("error_std", self.error_std)] {
            if !(0.0..1.0).contains(&e) {
                return Err(Error::Invalid(format!("{name} = {e} must lie in [0, 1)")));
            }
        }
        if self.delta_t_us.is_nan() || self.delta_t_us < 0.0 {
            return Err(Error::Invalid("runtime saving must be non-negative".into()));
        }
        if !(self.t1_us > 0.0 && self.t2_us > 0.0) {
            return Err(Error::Invalid("lifetimes must be positive".into()));
        }
        Ok(())
    }
}

/// `((1 - e_opt) / (1 - e_std))^k * exp(N dT (1/T1 + 1/T2))`.
pub fn improvement_model(p: &ImprovementParams) -> f64 {
    let swaps = ((1.0 - p.error_opt) / (1.0 - p.error_std)).powi(p.k as i32);
    let idle = (p.n as f64 * p.delta_t_us * (1.0 / p.t1_us + 1.0 / p.t2_us)).exp();
    swaps * idle
}

/// Model inputs measured from a standard and an optimized run of the same benchmark.
pub fn measured_params(
    std: &BenchOutcome,
    opt: &BenchOutcome,
    error_std: f64,
    error_opt: f64,
    device: &DeviceModel,
) -> Result<ImprovementParams> {
    if std.benchmark != opt.benchmark || std.n != opt.n || std.swap_count != opt.swap_count {
        return Err(Error::Invalid("outcomes come from different benchmarks".into()));
    }
    let (t1_us, t2_us) = device.mean_lifetimes_us();
    let p = ImprovementParams {
        error_opt,
        error_std,
        k: std.swap_count as u32,
        delta_t_us: ((std.duration_ns - opt.duration_ns) / 1000.0).max(0.0),
        t1_us,
        t2_us,
        n: std.n as u32,
    };
    p.validate()?;
    Ok(p)
}

/// IRB errors of the standard and optimized SWAP on one edge.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairIrb {
    pub control: usize,
    pub target: usize,
    pub error_std: f64,
    pub error_opt: f64,
    pub reduction: f64,
    pub sigma: f64,
}

/// Both SWAP forms benchmarked on every edge, sharing Clifford draws.
pub fn irb_pair_sweep(device: &DeviceModel, noise: &NoiseModel, config: &IrbConfig) -> Result<Vec<PairIrb>> {
    device
        .edges
        .par_iter()
        .map(|e| {
            let pair = device.pair(e.control, e.target)?;
            let run = |s| run_irb_experiment(&lower_swap(0, 1, s, &pair)?, &pair, noise, config);
            let std = run(SwapStrategy::SlowOrientation)?;
            let opt = run(SwapStrategy::Optimized)?;
            let reduction = std.gate_error / opt.gate_error;
            let rel = (std.gate_error_sigma / std.gate_error).powi(2) + (opt.gate_error_sigma / opt.gate_error).powi(2);
            Ok(PairIrb {
                control: e.control,
                target: e.target,
                error_std: std.gate_error,
                error_opt: opt.gate_error,
                reduction,
                sigma: reduction.abs() * rel.sqrt(),
            })
        })
        .collect()
}

/// A flat table plus the settings that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub kind: String,
    pub seed: u64,
    pub config: Value,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

impl Report {
    pub fn new(kind: &str, seed: u64, config: Value, columns: &[&str]) -> Self {
        Report {
            kind: kind.into(),
            seed,
            config,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    /// Builds one row per record from its serialized fields.
    pub fn from_records<S: Serialize>(kind: &str, seed: u64, config: Value, records: &[S]) -> Result<Self> {
        let mut columns: Vec<String> = Vec::new();
        let mut rows = Vec::with_capacity(records.len());
        for r in records {
            let Value::Object(map) = serde_json::to_value(r)? else {
                return Err(Error::Invalid("report records must serialize to objects".into()));
            };
            if columns.is_empty() {
                columns = map.keys().cloned().collect();
            }
            rows.push(columns.iter().map(|c| map.get(c).cloned().unwrap_or(Value::Null)).collect());
        }
        Ok(Report {
            kind: kind.into(),
            seed,
            config,
            columns,
            rows,
        })
    }

    pub fn push(&mut self, row: Vec<Value>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::DimensionMismatch(row.len(), self.columns.len()));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Invalid(format!("csv: {e}"));
        w.write_record(&self.columns).map_err(io)?;
        for r in &self.rows {
            w.write_record(r.iter().map(cell)).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Invalid(format!("csv: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_json(&self) -> Result<String> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let m: Map<String, Value> = self.columns.iter().cloned().zip(r.iter().cloned()).collect();
                Value::Object(m)
            })
            .collect();
        let doc = serde_json::json!({
            "tool": "swapopt",
            "version": env!("CARGO_PKG_VERSION"),
            "kind": self.kind,
            "seed": self.seed,
            "config": self.config,
            "columns": self.columns,
            "rows": rows,
        });
        let mut s = serde_json::to_string_pretty(&doc)?;
        s.push('\n');
        Ok(s)
    }
}

/// Writes the CSV and/or JSON form of a non-empty report.
pub fn emit_report(report: &Report, csv_path: Option<&Path>, json_path: Option<&Path>) -> Result<()> {
    if report.rows.is_empty() {
        return Err(Error::Invalid(format!("{} report has no rows", report.kind)));
    }
    if let Some(p) = csv_path {
        std::fs::write(p, report.to_csv()?)?;
    }
    if let Some(p) = json_path {
        std::fs::write(p, report.to_json()?)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::device::{EdgeRecord, QubitRecord};

    fn line(n: usize) -> DeviceModel {
        DeviceModel::line(n, 160, 1216, 75.0, 75.0, 2.0 / 9.0)
    }

    /// Center qubit 1 with leaves 0, 2, 3.
    fn tee() -> DeviceModel {
        DeviceModel {
            name: "tee".into(),
            dt_ns: 2.0 / 9.0,
            qubits: (0..4)
                .map(|id| QubitRecord {
                    id,
                    t1q_dt: 160,
                    t1_us: 75.0,
                    t2_us: 75.0,
                })
                .collect(),
            edges: [(0, 1), (1, 2), (3, 1)]
                .iter()
                .map(|&(control, target)| EdgeRecord {
                    control,
                    target,
                    tcr_dt: 1216,
                })
                .collect(),
        }
    }

    #[test]
    fn generators() {
        let ls = gen_benchmark(BenchmarkName::LongSwap, 3).unwrap();
        assert_eq!(ls.expected_string(), "001");
        assert_eq!(ls.circuit.len(), 3);
        let bv = gen_benchmark(BenchmarkName::BernsteinVazirani, 2).unwrap();
        assert_eq!(bv.circuit.gates().iter().filter(|g| matches!(g, Gate::Cnot(..))).count(), 1);
        assert_eq!(bv.expected_string(), "1x");
        assert!(gen_benchmark(BenchmarkName::LongSwap, 1).is_err());
        assert_eq!("LONG_SWAP".parse::<BenchmarkName>().unwrap(), BenchmarkName::LongSwap);
    }

    #[test]
    fn noiseless_success_is_one() {
        for (name, n) in [(BenchmarkName::LongSwap, 3), (BenchmarkName::BernsteinVazirani, 5), (BenchmarkName::BernsteinVazirani, 2)] {
            let b = gen_benchmark(name, n).unwrap();
            for s in SwapStrategy::ALL {
                let o = run_benchmark(&b, &line(n), &NoiseModel::ideal(), s, None).unwrap();
                assert!((o.success - 1.0).abs() < 1e-10, "{name} {n} {s:?}: {}", o.success);
            }
        }
    }

    #[test]
    fn bv_on_tee_needs_no_swaps() {
        let b = gen_benchmark(BenchmarkName::BernsteinVazirani, 4).unwrap();
        let r = route_on_coupling(&b.circuit, &tee(), &[0, 2, 3, 1]).unwrap();
        assert_eq!(r.k, 0);
        let noise = NoiseModel {
            depol_1q: 0.001,
            depol_2q: 0.01,
            thermal: true,
            ..NoiseModel::ideal()
        };
        let run = |s| run_benchmark(&b, &tee(), &noise, s, Some(&[0, 2, 3, 1])).unwrap();
        let (slow, opt) = (run(SwapStrategy::SlowOrientation), run(SwapStrategy::Optimized));
        assert_eq!(slow.success, opt.success);
        assert!(slow.success < 1.0);
    }

    #[test]
    fn bv_routed_on_a_line_still_succeeds() {
        let b = gen_benchmark(BenchmarkName::BernsteinVazirani, 4).unwrap();
        let o = run_benchmark(&b, &line(4), &NoiseModel::ideal(), SwapStrategy::Optimized, None).unwrap();
        assert!(o.k > 0);
        assert!((o.success - 1.0).abs() < 1e-10);
    }

    #[test]
    fn line_ends_take_two_swaps() {
        let c = Circuit::from_gates(4, [Gate::Cnot(0, 3)]).unwrap();
        let r = route_on_coupling(&c, &line(4), &[0, 1, 2, 3]).unwrap();
        assert_eq!(r.k, 2);
        assert_eq!(r.circuit.gates(), &[Gate::Swap(0, 1), Gate::Swap(1, 2), Gate::Cnot(2, 3)]);
        assert_eq!(r.placement, vec![2, 0, 1, 3]);
        // no single SWAP on the line makes qubits 0 and 3 adjacent
        let adjacent = |p: &[usize]| (p[0] as i64 - p[3] as i64).abs() == 1;
        for e in 0..3 {
            let mut p = vec![0, 1, 2, 3];
            let (a, b) = (p.iter().position(|&q| q == e).unwrap(), p.iter().position(|&q| q == e + 1).unwrap());
            p.swap(a, b);
            assert!(!adjacent(&p));
        }
    }

    #[test]
    fn adjacent_circuit_is_unchanged() {
        let c = Circuit::from_gates(3, [Gate::H(0), Gate::Cnot(0, 1), Gate::Notc(2, 1)]).unwrap();
        let r = route_on_coupling(&c, &line(3), &[0, 1, 2]).unwrap();
        assert_eq!(r.k, 0);
        assert_eq!(r.circuit, c);
    }

    #[test]
    fn disconnected_graph_is_an_error() {
        let mut d = line(4);
        d.edges.retain(|e| e.control != 1);
        let c = Circuit::from_gates(4, [Gate::Cnot(0, 3)]).unwrap();
        assert!(matches!(route_on_coupling(&c, &d, &[0, 1, 2, 3]), Err(Error::NotConnected(..))));
        assert!(route_on_coupling(&c, &line(4), &[0, 0, 2, 3]).is_err());
    }

    #[test]
    fn model_values() {
        let p = ImprovementParams {
            error_opt: 0.033,
            error_std: 0.037,
            k: 14,
            delta_t_us: 0.63,
            t1_us: 75.0,
            t2_us: 75.0,
            n: 8,
        };
        let expect = (0.967f64 / 0.963).powi(14) * (8.0 * 0.63 * 2.0 / 75.0f64).exp();
        assert!((improvement_model(&p) - expect).abs() < 1e-12);
        assert!((improvement_model(&p) - 1.21).abs() < 0.01);
        assert_eq!(improvement_model(&ImprovementParams { k: 0, delta_t_us: 0.0, ..p }), 1.0);
        assert_eq!(improvement_model(&ImprovementParams { error_opt: 0.037, delta_t_us: 0.0, ..p }), 1.0);
        assert!(ImprovementParams { error_std: 1.0, ..p }.validate().is_err());
        for bigger in [
            ImprovementParams { k: 15, ..p },
            ImprovementParams { n: 9, ..p },
            ImprovementParams { delta_t_us: 0.7, ..p },
        ] {
            assert!(improvement_model(&bigger) > improvement_model(&p));
        }
    }

    #[test]
    fn reports_are_deterministic() {
        let mut r = Report::new("speedups", 4, serde_json::json!({"device": "x"}), &["control", "target", "optimized_speedup"]);
        r.push(vec![0.into(), 1.into(), 1.121.into()]).unwrap();
        assert!(r.push(vec![0.into()]).is_err());
        assert_eq!(r.to_csv().unwrap(), "control,target,optimized_speedup\n0,1,1.121\n");
        assert_eq!(r.to_json().unwrap(), r.clone().to_json().unwrap());
        let dir = std::env::temp_dir().join(format!("swapopt-report-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        emit_report(&r, Some(&dir.join("a.csv")), Some(&dir.join("a.json"))).unwrap();
        let empty = Report::new("empty", 0, Value::Null, &["a"]);
        assert!(emit_report(&empty, Some(&dir.join("b.csv")), None).is_err());
        assert!(emit_report(&r, Some(&dir.join("missing/c.csv")), None).is_err());
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn records_become_rows() {
        let rows = [PairIrb {
            control: 0,
            target: 1,
            error_std: 0.037,
            error_opt: 0.033,
            reduction: 0.037 / 0.033,
            sigma: 0.01,
        }];
        let r = Report::from_records("irb-pairs", 1, Value::Null, &rows).unwrap();
        assert!(r.to_csv().unwrap().starts_with("control,target,error_std,error_opt,reduction,sigma\n"));
    }
}
