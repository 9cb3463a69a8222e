//! Device calibration records and the timing / error analytics built on them.

use crate::circuit::{schedule_moments, Circuit, Gate, MomentClass, MomentSchedule, SymbolicDepth};
use crate::error::{Error, Result};
use crate::num::Real;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QubitRecord {
    pub id: usize,
    /// Duration of a calibrated single-qubit pulse, in samples.
    pub t1q_dt: u64,
    #[serde(rename = "T1_us")]
    pub t1_us: f64,
    #[serde(rename = "T2_us")]
    pub t2_us: f64,
}

/// Calibrated cross-resonance pair; `control -> target` is the CR direction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeRecord {
    pub control: usize,
    pub target: usize,
    pub tcr_dt: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceModel {
    pub name: String,
    /// Nanoseconds per sample.
    pub dt_ns: f64,
    pub qubits: Vec<QubitRecord>,
    pub edges: Vec<EdgeRecord>,
}

impl DeviceModel {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let model: DeviceModel = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::Device(format!("schema violation at `{}`: {}", path, e.inner()))
        })?;
        model.validate()?;
        Ok(model)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("device serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt_ns.is_finite() && self.dt_ns > 0.0) {
            return Err(Error::Device("dt_ns must be positive".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for q in &self.qubits {
            if !seen.insert(q.id) {
                return Err(Error::Device(format!("duplicate qubit id {}", q.id)));
            }
            if q.t1q_dt == 0 {
                return Err(Error::Device(format!("qubit {}: t1q_dt must be positive", q.id)));
            }
            if !(q.t1_us > 0.0 && q.t2_us > 0.0) {
                return Err(Error::Device(format!(
                    "qubit {}: T1 and T2 must be positive",
                    q.id
                )));
            }
            if q.t2_us > 2.0 * q.t1_us {
                return Err(Error::Unphysical {
                    qubit: q.id,
                    t1_us: q.t1_us,
                    t2_us: q.t2_us,
                });
            }
        }
        let mut pairs = std::collections::BTreeSet::new();
        for e in &self.edges {
            for end in [e.control, e.target] {
                if !seen.contains(&end) {
                    return Err(Error::Device(format!(
                        "edge {}->{} references unknown qubit {end}",
                        e.control, e.target
                    )));
                }
            }
            if e.control == e.target {
                return Err(Error::Device(format!("edge {0}->{0} is a self loop", e.control)));
            }
            if e.tcr_dt == 0 {
                return Err(Error::Device(format!(
                    "edge {}->{}: tcr_dt must be positive",
                    e.control, e.target
                )));
            }
            if !pairs.insert((e.control.min(e.target), e.control.max(e.target))) {
                return Err(Error::Device(format!(
                    "more than one edge between {} and {}",
                    e.control, e.target
                )));
            }
        }
        Ok(())
    }

    /// Wires needed to address every qubit by id.
    pub fn n_wires(&self) -> usize {
        self.qubits.iter().map(|q| q.id + 1).max().unwrap_or(0)
    }

    pub fn qubit(&self, id: usize) -> Result<&QubitRecord> {
        self.qubits
            .iter()
            .find(|q| q.id == id)
            .ok_or(Error::UnknownQubit(id))
    }

    /// Edge joining `a` and `b` in either direction.
    pub fn edge(&self, a: usize, b: usize) -> Result<&EdgeRecord> {
        self.edges
            .iter()
            .find(|e| (e.control, e.target) == (a, b) || (e.control, e.target) == (b, a))
            .ok_or(Error::NotConnected(a, b))
    }

    /// `(control, target)` of the CR on the pair `{a, b}`.
    pub fn cr_direction(&self, a: usize, b: usize) -> Result<(usize, usize)> {
        self.edge(a, b).map(|e| (e.control, e.target))
    }

    pub fn neighbors(&self, q: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|e| {
                if e.control == q {
                    Some(e.target)
                } else if e.target == q {
                    Some(e.control)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// Sub-device on `ids`, relabeled so `ids[i]` becomes qubit `i`.
    pub fn restrict(&self, ids: &[usize]) -> Result<DeviceModel> {
        let pos = |id: usize| ids.iter().position(|&x| x == id);
        let mut qubits = Vec::with_capacity(ids.len());
        for (i, &id) in ids.iter().enumerate() {
            let mut q = self.qubit(id)?.clone();
            q.id = i;
            qubits.push(q);
        }
        let edges = self
            .edges
            .iter()
            .filter_map(|e| {
                Some(EdgeRecord {
                    control: pos(e.control)?,
                    target: pos(e.target)?,
                    tcr_dt: e.tcr_dt,
                })
            })
            .collect();
        let d = DeviceModel {
            name: format!("{}[{}]", self.name, join(ids)),
            dt_ns: self.dt_ns,
            qubits,
            edges,
        };
        d.validate()?;
        Ok(d)
    }

    /// Two-qubit sub-device of one edge with the CR running 0 -> 1.
    pub fn pair(&self, a: usize, b: usize) -> Result<DeviceModel> {
        let (c, t) = self.cr_direction(a, b)?;
        self.restrict(&[c, t])
    }

    /// Uniform linear chain `0 -> 1 -> ... -> n-1`.
    pub fn line(n: usize, t1q_dt: u64, tcr_dt: u64, t1_us: f64, t2_us: f64, dt_ns: f64) -> Self {
        DeviceModel {
            name: format!("line-{n}"),
            dt_ns,
            qubits: (0..n)
                .map(|id| QubitRecord {
                    id,
                    t1q_dt,
                    t1_us,
                    t2_us,
                })
                .collect(),
            edges: (1..n)
                .map(|i| EdgeRecord {
                    control: i - 1,
                    target: i,
                    tcr_dt,
                })
                .collect(),
        }
    }

    /// Duration of one scheduled moment, in samples.
    pub fn moment_duration_dt(&self, circuit: &Circuit, gates: &[usize], class: MomentClass) -> Result<u64> {
        let mut longest = 0;
        for &i in gates {
            let d = match circuit.gates()[i] {
                Gate::Rz(..) => 0,
                Gate::Rx(_, w) | Gate::Ry(_, w) => self.qubit(w)?.t1q_dt,
                Gate::Cr { control, target, .. } => self.cr_edge(control, target)?.tcr_dt,
                other => return Err(Error::NotNative(other.name().into())),
            };
            longest = longest.max(d);
        }
        Ok(if class == MomentClass::Virtual { 0 } else { longest })
    }

    /// Edge for a CR, which must match the calibrated direction.
    pub fn cr_edge(&self, control: usize, target: usize) -> Result<&EdgeRecord> {
        let e = self.edge(control, target)?;
        if (e.control, e.target) != (control, target) {
            return Err(Error::Device(format!(
                "cr {control}->{target} opposes the calibrated direction {}->{}",
                e.control, e.target
            )));
        }
        Ok(e)
    }

    /// Mean T1 and T2 over all qubits, in microseconds.
    pub fn mean_lifetimes_us(&self) -> (f64, f64) {
        let n = self.qubits.len().max(1) as f64;
        (
            self.qubits.iter().map(|q| q.t1_us).sum::<f64>() / n,
            self.qubits.iter().map(|q| q.t2_us).sum::<f64>() / n,
        )
    }

    /// Single-qubit duration used for the pair `{a, b}`: the slower of the two.
    pub fn pair_t1q_dt(&self, a: usize, b: usize) -> Result<u64> {
        Ok(self.qubit(a)?.t1q_dt.max(self.qubit(b)?.t1q_dt))
    }
}

fn join(ids: &[usize]) -> String {
    ids.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",")
}

/// Timing and rotation summary of a native circuit on a device.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub depth: SymbolicDepth,
    pub duration_dt: u64,
    pub duration_ns: f64,
    pub external_rotation_deg: f64,
    /// 180 degrees of echo per CR.
    pub internal_rotation_deg: f64,
    pub cr_count: usize,
}

pub fn circuit_metrics(c: &Circuit, device: &DeviceModel) -> Result<MetricsReport> {
    let schedule = schedule_moments(c)?;
    metrics_for_schedule(c, &schedule, device)
}

pub(crate) fn metrics_for_schedule(
    c: &Circuit,
    schedule: &MomentSchedule,
    device: &DeviceModel,
) -> Result<MetricsReport> {
    let mut duration_dt = 0;
    for m in &schedule.moments {
        duration_dt += device.moment_duration_dt(c, &m.gates, m.class)?;
    }
    for &w in &c.active_wires() {
        device.qubit(w)?;
    }
    let cr_count = c.cr_count();
    Ok(MetricsReport {
        depth: schedule.depth(),
        duration_dt,
        duration_ns: duration_dt as f64 * device.dt_ns,
        external_rotation_deg: c.external_rotation(),
        internal_rotation_deg: 180.0 * cr_count as f64,
        cr_count,
    })
}

fn pair_times(device: &DeviceModel, a: usize, b: usize) -> Result<(f64, f64)> {
    let e = device.edge(a, b)?;
    Ok((device.pair_t1q_dt(a, b)? as f64, e.tcr_dt as f64))
}

/// Slow over fast SWAP orientation: `(5 t1q + 3 tCR) / (4 t1q + 3 tCR)`.
pub fn orientation_speedup(device: &DeviceModel, a: usize, b: usize) -> Result<f64> {
    let (t1q, tcr) = pair_times(device, a, b)?;
    Ok(orientation_speedup_from(t1q, tcr))
}

pub fn orientation_speedup_from<T: Real>(t1q: T, tcr: T) -> T {
    let f = |x: f64| T::of(x);
    (f(5.0) * t1q + f(3.0) * tcr) / (f(4.0) * t1q + f(3.0) * tcr)
}

/// Standard over optimized SWAP: `(5 t1q + 3 tCR) / (2 t1q + 3 tCR)`.
pub fn optimized_speedup(device: &DeviceModel, a: usize, b: usize) -> Result<f64> {
    let (t1q, tcr) = pair_times(device, a, b)?;
    Ok(optimized_speedup_from(t1q, tcr))
}

pub fn optimized_speedup_from<T: Real>(t1q: T, tcr: T) -> T {
    let f = |x: f64| T::of(x);
    (f(5.0) * t1q + f(3.0) * tcr) / (f(2.0) * t1q + f(3.0) * tcr)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeSpeedup {
    pub control: usize,
    pub target: usize,
    pub t1q_dt: u64,
    pub tcr_dt: u64,
    pub orientation_speedup: f64,
    pub optimized_speedup: f64,
}

/// Per-edge speedups in edge-list order, plus the mean optimized speedup.
pub fn device_speedups(device: &DeviceModel) -> Result<(Vec<EdgeSpeedup>, f64)> {
    let mut rows = Vec::with_capacity(device.edges.len());
    for e in &device.edges {
        let t1q = device.pair_t1q_dt(e.control, e.target)?;
        rows.push(EdgeSpeedup {
            control: e.control,
            target: e.target,
            t1q_dt: t1q,
            tcr_dt: e.tcr_dt,
            orientation_speedup: orientation_speedup_from(t1q as f64, e.tcr_dt as f64),
            optimized_speedup: optimized_speedup_from(t1q as f64, e.tcr_dt as f64),
        });
    }
    let mean = if rows.is_empty() {
        f64::NAN
    } else {
        rows.iter().map(|r| r.optimized_speedup).sum::<f64>() / rows.len() as f64
    };
    Ok((rows, mean))
}

/// Solves `5a + 3b = d_std`, `2a + 3b = d_opt` for `(t1q_dt, tcr_dt)`.
///
/// Non-integral solutions are rounded to the nearest sample.
pub fn infer_native_durations(d_std_dt: u64, d_opt_dt: u64) -> Result<(u64, u64)> {
    if d_opt_dt == 0 || d_std_dt <= d_opt_dt {
        return Err(Error::Invalid(format!(
            "need standard > optimized > 0, got {d_std_dt} and {d_opt_dt}"
        )));
    }
    let t1q = ((d_std_dt - d_opt_dt) as f64 / 3.0).round();
    let tcr = ((d_opt_dt as f64 - 2.0 * t1q) / 3.0).round();
    if t1q <= 0.0 || tcr <= 0.0 {
        return Err(Error::Invalid(format!(
            "durations {d_std_dt}/{d_opt_dt} have no positive solution"
        )));
    }
    Ok((t1q as u64, tcr as u64))
}

/// Relaxation-limited gate error over `duration_ns` for qubits given as
/// `(T1_us, T2_us)`: `1 - prod_q (1/2 + e^{-t/T2}/3 + e^{-t/T1}/6)`.
pub fn coherence_limited_error<T: Real>(duration_ns: T, qubits: &[(T, T)]) -> T {
    let t_us = duration_ns / T::of(1000.0);
    let mut f = T::one();
    for &(t1, t2) in qubits {
        f = f
            * (T::of(0.5)
                + (-t_us / t2).exp() / T::of(3.0)
                + (-t_us / t1).exp() / T::of(6.0));
    }
    T::one() - f
}

#[cfg(test)]
mod tests {
    use super::*;

    const CASABLANCA_PAIR: &str = r#"{
        "name": "pair",
        "dt_ns": 0.2222222222222222,
        "qubits": [
            {"id": 0, "t1q_dt": 160, "T1_us": 80.0, "T2_us": 90.0},
            {"id": 1, "t1q_dt": 160, "T1_us": 75.0, "T2_us": 70.0}
        ],
        "edges": [{"control": 0, "target": 1, "tcr_dt": 1216}]
    }"#;

    #[test]
    fn parses_and_validates() {
        let d = DeviceModel::from_json(CASABLANCA_PAIR).unwrap();
        assert_eq!(d.cr_direction(1, 0).unwrap(), (0, 1));
        assert_eq!(d.n_wires(), 2);
        assert!(matches!(d.edge(0, 2), Err(Error::NotConnected(0, 2))));
    }

    #[test]
    fn unphysical_t2_names_qubit() {
        let bad = CASABLANCA_PAIR.replace("\"T2_us\": 70.0", "\"T2_us\": 225.0");
        match DeviceModel::from_json(&bad) {
            Err(Error::Unphysical { qubit, .. }) => assert_eq!(qubit, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn schema_error_has_path() {
        let bad = CASABLANCA_PAIR.replace("\"tcr_dt\": 1216", "\"tcr_dt\": \"x\"");
        let msg = DeviceModel::from_json(&bad).unwrap_err().to_string();
        assert!(msg.contains("edges[0].tcr_dt"), "{msg}");
        let unknown = CASABLANCA_PAIR.replace("\"name\"", "\"nmae\"");
        assert!(DeviceModel::from_json(&unknown).is_err());
    }

    #[test]
    fn empty_edges_are_fine() {
        let d = DeviceModel::from_json(
            r#"{"name":"solo","dt_ns":1.0,"qubits":[{"id":0,"t1q_dt":10,"T1_us":5,"T2_us":5}],"edges":[]}"#,
        )
        .unwrap();
        assert!(d.edges.is_empty());
    }

    #[test]
    fn duplicate_and_dangling_edges() {
        let mut d = DeviceModel::line(3, 10, 100, 50.0, 50.0, 1.0);
        d.edges.push(EdgeRecord {
            control: 1,
            target: 0,
            tcr_dt: 5,
        });
        assert!(d.validate().is_err());
        let mut d = DeviceModel::line(2, 10, 100, 50.0, 50.0, 1.0);
        d.edges[0].target = 7;
        assert!(d.validate().is_err());
    }

    #[test]
    fn restrict_relabels() {
        let d = DeviceModel::line(4, 10, 100, 50.0, 50.0, 1.0);
        let p = d.pair(3, 2).unwrap();
        assert_eq!(p.cr_direction(0, 1).unwrap(), (0, 1));
        let r = d.restrict(&[3, 2, 1]).unwrap();
        assert_eq!(r.cr_direction(0, 1).unwrap(), (1, 0));
        assert_eq!(r.cr_direction(1, 2).unwrap(), (2, 1));
    }

    #[test]
    fn inferred_durations() {
        assert_eq!(infer_native_durations(4448, 3968).unwrap(), (160, 1216));
        assert_eq!(infer_native_durations(1400, 1100).unwrap(), (100, 300));
        assert!(infer_native_durations(1000, 1001).is_err());
        assert!(infer_native_durations(1000, 1000).is_err());
        assert!(infer_native_durations(100, 0).is_err());
    }

    #[test]
    fn speedup_limits() {
        assert!((orientation_speedup_from(160.0f64, 1216.0) - 4448.0 / 4288.0).abs() < 1e-12);
        assert_eq!(orientation_speedup_from(0.0f64, 1216.0), 1.0);
        assert_eq!(optimized_speedup_from(0.0f64, 1216.0), 1.0);
        let d = DeviceModel::from_json(CASABLANCA_PAIR).unwrap();
        assert!((optimized_speedup(&d, 1, 0).unwrap() - 4448.0 / 3968.0).abs() < 1e-12);
        assert!(optimized_speedup(&d, 0, 0).is_err());
    }

    #[test]
    fn coherence_error_limits() {
        assert!(coherence_limited_error(0.0f64, &[(75.0, 75.0), (75.0, 75.0)]).abs() < 1e-15);
        let far = coherence_limited_error(1e12f64, &[(75.0, 75.0), (75.0, 75.0)]);
        assert!((far - 0.75).abs() < 1e-12);
        // 50-digit evaluation of the same formula
        let e = coherence_limited_error(882.0f64, &[(75.0, 75.0), (75.0, 75.0)]);
        assert!((e - 0.011_656_950_887_944_323).abs() < 1e-15, "{e}");
        let e32 = coherence_limited_error(882.0f32, &[(75.0, 75.0), (75.0, 75.0)]);
        assert!((e32 as f64 - 0.011_656_95).abs() < 1e-6);
    }
}
