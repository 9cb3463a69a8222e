//! Peephole passes that turn a lowered SWAP into its optimized form.
//!
//! Every pass works on a layered view of the circuit: per-wire runs of
//! `Rx/Ry/Rz` between the multi-wire gates. Output is always emitted in
//! canonical order, so passes are deterministic and templates compare
//! gate-for-gate.

use crate::circuit::{
    canonicalize_1q_run, canonicalize_1q_run_x90, run_cost, schedule_moments, Circuit, Gate,
    Polarity, RunCost, SymbolicDepth, ANGLE_EPS,
};
use crate::decomp::{lower_to_native, SwapStrategy};
use crate::device::{circuit_metrics, DeviceModel};
use crate::error::{Error, Result};
use crate::num::{cx, czero, C};
use crate::unitary::{apply_to_state, circuit_unitary, equal_up_to_global_phase};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Dense verification up to this many wires; sampled states beyond.
pub const DENSE_VERIFY_WIRES: usize = 6;
const SAMPLED_STATES: usize = 16;
const SAMPLED_TOL: f64 = 1e-8;
const VERIFY_TOL: f64 = 1e-9;
const MAX_ROUNDS: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PassReport {
    pub pass: String,
    pub gates_before: usize,
    pub gates_after: usize,
    pub depth_before: SymbolicDepth,
    pub depth_after: SymbolicDepth,
    pub rotation_before: f64,
    pub rotation_after: f64,
    pub verified: bool,
    /// Global phase of the output relative to the input, radians.
    pub phase: f64,
}

#[derive(Clone, Debug)]
struct Layered {
    n_wires: usize,
    /// Non-rotation gates, in order.
    barriers: Vec<Gate>,
    /// `runs[w][k]`: rotations on `w` before its `k`-th barrier; the last run is the tail.
    runs: Vec<Vec<Vec<Gate>>>,
    /// For each barrier, `(wire, index of the run just before it)`.
    slots: Vec<Vec<(usize, usize)>>,
}

fn is_rotation(g: &Gate) -> bool {
    matches!(g, Gate::Rx(..) | Gate::Ry(..) | Gate::Rz(..))
}

impl Layered {
    fn new(c: &Circuit) -> Self {
        let n = c.n_wires();
        let mut l = Layered {
            n_wires: n,
            barriers: Vec::new(),
            runs: vec![vec![Vec::new()]; n],
            slots: Vec::new(),
        };
        for g in c.gates() {
            let ws = g.wires();
            if is_rotation(g) {
                let w = ws.as_slice()[0];
                l.runs[w].last_mut().unwrap().push(*g);
                continue;
            }
            let mut slot = Vec::with_capacity(2);
            for &w in ws.as_slice() {
                slot.push((w, l.runs[w].len() - 1));
                l.runs[w].push(Vec::new());
            }
            l.barriers.push(*g);
            l.slots.push(slot);
        }
        l
    }

    fn to_circuit(&self) -> Circuit {
        let mut gates = Vec::new();
        let mut cur = vec![0usize; self.n_wires];
        let mut done = vec![false; self.n_wires];
        let flush = |cur: &[usize], done: &mut [bool], gates: &mut Vec<Gate>| {
            for w in 0..self.n_wires {
                if !done[w] {
                    gates.extend_from_slice(&self.runs[w][cur[w]]);
                    done[w] = true;
                }
            }
        };
        for b in &self.barriers {
            flush(&cur, &mut done, &mut gates);
            gates.push(*b);
            for &w in b.wires().as_slice() {
                cur[w] += 1;
                done[w] = false;
            }
        }
        flush(&cur, &mut done, &mut gates);
        Circuit::from_gates(self.n_wires, gates).expect("layering keeps wires valid")
    }

    /// Runs before and after barrier `j` on wire `w`.
    fn around(&self, j: usize, w: usize) -> (usize, usize) {
        let k = self
            .slots[j]
            .iter()
            .find(|(x, _)| *x == w)
            .map(|&(_, k)| k)
            .expect("wire belongs to barrier");
        (k, k + 1)
    }

    fn for_each_run(&mut self, mut f: impl FnMut(&mut Vec<Gate>)) {
        for wire in &mut self.runs {
            for run in wire {
                f(run);
            }
        }
    }
}

/// Re-emits `c` in canonical order: before each multi-wire gate, every
/// wire's pending rotations in wire order.
pub fn serialize_canonical(c: &Circuit) -> Circuit {
    Layered::new(c).to_circuit()
}

/// Every single-wire run replaced by its canonical form, cheaper or not.
pub(crate) fn canonicalize_runs(c: &Circuit) -> Circuit {
    let mut l = Layered::new(c);
    l.for_each_run(|run| *run = canonicalize_1q_run(run));
    l.to_circuit()
}

fn depth(c: &Circuit) -> Result<SymbolicDepth> {
    Ok(schedule_moments(c)?.depth())
}

fn require_native(c: &Circuit) -> Result<()> {
    match c.gates().iter().find(|g| !g.is_native()) {
        Some(g) => Err(Error::NotNative(g.name().into())),
        None => Ok(()),
    }
}

/// Checks `b ~ a` up to global phase; returns the phase of `b` relative to `a`.
pub fn verify_equivalent(a: &Circuit, b: &Circuit) -> Result<Option<f64>> {
    if a.n_wires() != b.n_wires() {
        return Err(Error::DimensionMismatch(a.n_wires(), b.n_wires()));
    }
    if a.n_wires() <= DENSE_VERIFY_WIRES {
        let e = equal_up_to_global_phase(
            &circuit_unitary::<f64>(a)?,
            &circuit_unitary::<f64>(b)?,
            VERIFY_TOL,
        )?;
        return Ok(e.equal.then_some(e.phase));
    }
    let n = a.n_wires();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0f57_a7e5);
    let mut phase: Option<C<f64>> = None;
    for _ in 0..SAMPLED_STATES {
        let mut psi = vec![czero::<f64>(); 1 << n];
        psi[0] = cx(1.0, 0.0);
        let mut prep = Circuit::new(n)?;
        for w in 0..n {
            prep.push(Gate::rz(rng.random_range(-180.0..180.0), w))?;
            prep.push(Gate::ry(rng.random_range(0.0..180.0), w))?;
            prep.push(Gate::rz(rng.random_range(-180.0..180.0), w))?;
        }
        apply_to_state(&prep, &mut psi)?;
        let mut pa = psi.clone();
        apply_to_state(a, &mut pa)?;
        apply_to_state(b, &mut psi)?;
        let ov: C<f64> = pa.iter().zip(&psi).map(|(x, y)| x.conj() * y).sum();
        let p = *phase.get_or_insert(ov / ov.norm().max(f64::MIN_POSITIVE));
        let worst = pa
            .iter()
            .zip(&psi)
            .map(|(x, y)| (x * p - y).norm())
            .fold(0.0, f64::max);
        if worst > SAMPLED_TOL {
            return Ok(None);
        }
    }
    Ok(phase.map(|p| p.arg()))
}

fn report(name: &str, before: &Circuit, after: &Circuit) -> Result<PassReport> {
    let phase = verify_equivalent(before, after)?.ok_or_else(|| Error::Unverified {
        stage: name.to_string(),
    })?;
    Ok(PassReport {
        pass: name.to_string(),
        gates_before: before.len(),
        gates_after: after.len(),
        depth_before: depth(before)?,
        depth_after: depth(after)?,
        rotation_before: before.external_rotation(),
        rotation_after: after.external_rotation(),
        verified: true,
        phase,
    })
}

fn sum_cost(runs: &[&[Gate]]) -> RunCost {
    let mut total = RunCost {
        rotation: 0.0,
        pulses: 0,
    };
    for r in runs {
        let c = run_cost(&canonicalize_1q_run(r));
        total.rotation += c.rotation;
        total.pulses += c.pulses;
    }
    total
}

/// `before - after`, compared lexicographically.
fn gain(before: RunCost, after: RunCost) -> (f64, i64) {
    (
        before.rotation - after.rotation,
        before.pulses as i64 - after.pulses as i64,
    )
}

fn improves(g: (f64, i64)) -> bool {
    g.0 > ANGLE_EPS || (g.0.abs() <= ANGLE_EPS && g.1 > 0)
}

fn beats(a: (f64, i64), b: (f64, i64)) -> bool {
    a.0 > b.0 + ANGLE_EPS || ((a.0 - b.0).abs() <= ANGLE_EPS && a.1 > b.1)
}

/// Accepts `candidate` unless it deepens the schedule.
fn depth_ok(candidate: &Layered, limit: SymbolicDepth) -> Result<Option<Circuit>> {
    let c = candidate.to_circuit();
    Ok(depth(&c)?.le(&limit).then_some(c))
}

fn cgpc_layers(input: &Circuit) -> Result<Circuit> {
    let limit = depth(input)?;
    let base = Layered::new(input);
    let mut all = base.clone();
    all.for_each_run(|run| {
        let canon = canonicalize_1q_run(run);
        if run_cost(&canon).better_than(&run_cost(run)) {
            *run = canon;
        }
    });
    if let Some(c) = depth_ok(&all, limit)? {
        return Ok(c);
    }
    // one run at a time under the guard
    let mut cur = base;
    for w in 0..cur.n_wires {
        for k in 0..cur.runs[w].len() {
            let canon = canonicalize_1q_run(&cur.runs[w][k]);
            if run_cost(&canon).better_than(&run_cost(&cur.runs[w][k])) {
                let mut next = cur.clone();
                next.runs[w][k] = canon;
                if depth_ok(&next, limit)?.is_some() {
                    cur = next;
                }
            }
        }
    }
    Ok(cur.to_circuit())
}

/// Merges each single-wire run into its canonical form when that is
/// strictly cheaper.
pub fn pass_cross_gate_cancellation(c: &Circuit) -> Result<(Circuit, PassReport)> {
    require_native(c)?;
    let out = cgpc_layers(c)?;
    let r = report("cross-gate-cancellation", c, &out)?;
    Ok((out, r))
}

fn negated(run: &[Gate]) -> Vec<Gate> {
    run.iter()
        .map(|g| match *g {
            Gate::Rz(a, w) => Gate::rz(-a.degrees(), w),
            other => other,
        })
        .collect()
}

/// Index of an `Rx` that can leave `run` through its end (`from_back`) or front.
fn movable_rx(run: &[Gate], from_back: bool) -> Option<usize> {
    let order: Vec<usize> = if from_back {
        (0..run.len()).rev().collect()
    } else {
        (0..run.len()).collect()
    };
    let mut passed_rz = false;
    for i in order {
        match run[i] {
            Gate::Rz(..) => passed_rz = true,
            Gate::Rx(a, _) if !passed_rz || a.is_half_turn() => return Some(i),
            _ => return None,
        }
    }
    None
}

/// Both runs after moving one `Rx` across the CR: `(left, right)`.
fn commute_move(left: &[Gate], right: &[Gate], rightward: bool) -> Option<(Vec<Gate>, Vec<Gate>)> {
    if rightward {
        let i = movable_rx(left, true)?;
        let mut l = left[..i].to_vec();
        l.extend(negated(&left[i + 1..]));
        let mut r = vec![left[i]];
        r.extend_from_slice(right);
        Some((l, r))
    } else {
        let i = movable_rx(right, false)?;
        let mut r = negated(&right[..i]);
        r.extend_from_slice(&right[i + 1..]);
        let mut l = left.to_vec();
        l.push(right[i]);
        Some((l, r))
    }
}

/// Moves `Rx` pulses across CRs on the target wire (they commute with the
/// CR there), passing a half-turn through `Rz` as `Rz(-phi)`, whenever the
/// canonical forms of the two affected runs get strictly cheaper.
pub fn pass_commute_through_cr(c: &Circuit) -> Result<(Circuit, PassReport)> {
    require_native(c)?;
    let limit = depth(c)?;
    let mut cur = Layered::new(c);
    let mut out = cur.to_circuit();
    for _ in 0..MAX_ROUNDS {
        let mut moves = Vec::new();
        for (j, b) in cur.barriers.iter().enumerate() {
            let Gate::Cr { target, .. } = *b else { continue };
            let (kl, kr) = cur.around(j, target);
            let (l, r) = (&cur.runs[target][kl], &cur.runs[target][kr]);
            let before = sum_cost(&[l, r]);
            for rightward in [true, false] {
                if let Some((nl, nr)) = commute_move(l, r, rightward) {
                    let g = gain(before, sum_cost(&[&nl, &nr]));
                    if improves(g) {
                        moves.push((g, target, kl, nl, nr));
                    }
                }
            }
        }
        // best gain first; earlier moves win ties
        let mut order: Vec<usize> = (0..moves.len()).collect();
        order.sort_by(|&a, &b| {
            if beats(moves[a].0, moves[b].0) {
                std::cmp::Ordering::Less
            } else if beats(moves[b].0, moves[a].0) {
                std::cmp::Ordering::Greater
            } else {
                a.cmp(&b)
            }
        });
        let mut applied = false;
        for i in order {
            let (_, w, k, ref nl, ref nr) = moves[i];
            let mut next = cur.clone();
            next.runs[w][k] = canonicalize_1q_run(nl);
            next.runs[w][k + 1] = canonicalize_1q_run(nr);
            if let Some(circ) = depth_ok(&next, limit)? {
                cur = next;
                out = circ;
                applied = true;
                break;
            }
        }
        if !applied {
            break;
        }
    }
    let r = report("commute-through-cr", c, &out)?;
    Ok((out, r))
}

/// Flips CR polarities using `CR+- = Rx(-180)@c . CR-+ . Rx(180)@c` (and
/// its mirror) when the injected half-turns strictly reduce the canonical
/// rotation of the adjacent control-wire runs.
pub fn pass_polarity_switch(c: &Circuit) -> Result<(Circuit, PassReport)> {
    require_native(c)?;
    let limit = depth(c)?;
    let mut cur = Layered::new(c);
    let mut out = cur.to_circuit();
    for _ in 0..MAX_ROUNDS {
        let mut changed = false;
        for j in 0..cur.barriers.len() {
            let Gate::Cr {
                polarity,
                control,
                target,
            } = cur.barriers[j]
            else {
                continue;
            };
            let (kl, kr) = cur.around(j, control);
            let (l, r) = (&cur.runs[control][kl], &cur.runs[control][kr]);
            let pre = match polarity {
                Polarity::PlusMinus => -180.0,
                Polarity::MinusPlus => 180.0,
            };
            let mut nl = l.clone();
            nl.push(Gate::rx(pre, control));
            let mut nr = vec![Gate::rx(-pre, control)];
            nr.extend_from_slice(r);
            let g = gain(sum_cost(&[l, r]), sum_cost(&[&nl, &nr]));
            if g.0 <= ANGLE_EPS {
                continue;
            }
            let mut next = cur.clone();
            next.barriers[j] = Gate::cr(polarity.flipped(), control, target);
            next.runs[control][kl] = canonicalize_1q_run(&nl);
            next.runs[control][kr] = canonicalize_1q_run(&nr);
            if let Some(circ) = depth_ok(&next, limit)? {
                cur = next;
                out = circ;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let r = report("polarity-switch", c, &out)?;
    Ok((out, r))
}

/// Rewrites every run into `Rz Rx(+t) Rz` form so pulses use only positive angles.
pub fn pass_x90_form(c: &Circuit) -> Result<(Circuit, PassReport)> {
    require_native(c)?;
    let mut l = Layered::new(c);
    l.for_each_run(|run| {
        if !run.is_empty() {
            *run = canonicalize_1q_run_x90(run);
        }
    });
    let out = l.to_circuit();
    let r = report("x90-form", c, &out)?;
    Ok((out, r))
}

/// Expands each SWAP into CNOT, NOTC, CNOT with the CNOTs along the
/// device's CR direction.
pub fn choose_orientation(c: &Circuit, device: &DeviceModel) -> Result<Circuit> {
    let mut out = Circuit::new(c.n_wires())?;
    for g in c.gates() {
        if let Gate::Swap(a, b) = *g {
            let (ct, tt) = device.cr_direction(a, b)?;
            out.push(Gate::Cnot(ct, tt))?;
            out.push(Gate::Notc(ct, tt))?;
            out.push(Gate::Cnot(ct, tt))?;
        } else {
            out.push(*g)?;
        }
    }
    Ok(out)
}

const STAGES: [&str; 6] = ["slow", "fast", "cgpc", "commuted", "optimized", "optimized-x90"];

fn pipeline_stages(c: &Circuit, device: &DeviceModel) -> Result<(Vec<Circuit>, Vec<PassReport>)> {
    let slow = serialize_canonical(&lower_to_native(c, device, SwapStrategy::SlowOrientation)?);
    let oriented = choose_orientation(c, device)?;
    let fast = serialize_canonical(&lower_to_native(&oriented, device, SwapStrategy::FastOrientation)?);
    let mut reports = vec![report("orientation", &slow, &fast)?];
    let mut stages = vec![slow, fast];
    for pass in [
        pass_cross_gate_cancellation as fn(&Circuit) -> Result<(Circuit, PassReport)>,
        pass_commute_through_cr,
        pass_polarity_switch,
        pass_x90_form,
    ] {
        let (next, r) = pass(stages.last().unwrap())?;
        reports.push(r);
        stages.push(next);
    }
    Ok((stages, reports))
}

/// Orientation, lowering, then the three native passes and the x90 form.
///
/// The first report compares the slow-orientation lowering with the fast
/// one; each later report covers one pass.
pub fn optimize_pipeline(c: &Circuit, device: &DeviceModel) -> Result<(Circuit, Vec<PassReport>)> {
    let (mut stages, reports) = pipeline_stages(c, device)?;
    Ok((stages.pop().unwrap(), reports))
}

/// One pipeline stage of a single SWAP, measured on the device.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LedgerRow {
    pub control: usize,
    pub target: usize,
    pub stage: String,
    pub depth: SymbolicDepth,
    pub duration_dt: u64,
    pub duration_ns: f64,
    pub external_rotation_deg: f64,
    pub internal_rotation_deg: f64,
    pub verified: bool,
}

/// Every stage of the pipeline applied to `SWAP(a, b)` on its edge.
pub fn swap_ledger(device: &DeviceModel, a: usize, b: usize) -> Result<Vec<LedgerRow>> {
    let (control, target) = device.cr_direction(a, b)?;
    let pair = device.pair(control, target)?;
    let swap = Circuit::from_gates(2, [Gate::Swap(0, 1)])?;
    let (stages, _) = pipeline_stages(&swap, &pair)?;
    let reference = circuit_unitary::<f64>(&swap)?;
    stages
        .iter()
        .zip(STAGES)
        .map(|(c, stage)| {
            let m = circuit_metrics(c, &pair)?;
            let verified = equal_up_to_global_phase(&reference, &circuit_unitary::<f64>(c)?, VERIFY_TOL)?.equal;
            Ok(LedgerRow {
                control,
                target,
                stage: stage.to_string(),
                depth: m.depth,
                duration_dt: m.duration_dt,
                duration_ns: m.duration_ns,
                external_rotation_deg: m.external_rotation_deg,
                internal_rotation_deg: m.internal_rotation_deg,
                verified,
            })
        })
        .collect()
}

/// The pipeline's lowered input, i.e. the standard SWAP form of `c`.
pub fn standard_lowering(c: &Circuit, device: &DeviceModel) -> Result<Circuit> {
    Ok(serialize_canonical(&lower_to_native(c, device, SwapStrategy::SlowOrientation)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::parse_circuit;
    use crate::decomp::swap_template;
    use proptest::prelude::*;

    fn pair() -> DeviceModel {
        DeviceModel::line(2, 160, 1216, 75.0, 75.0, 2.0 / 9.0)
    }

    #[test]
    fn ledger_on_a_reversed_edge() {
        let d = DeviceModel::line(3, 160, 1216, 75.0, 75.0, 2.0 / 9.0);
        let rows = swap_ledger(&d, 2, 1).unwrap();
        assert_eq!((rows[0].control, rows[0].target), (1, 2));
        let got: Vec<(u32, f64, u64)> = rows
            .iter()
            .map(|r| (r.depth.one_qubit, r.external_rotation_deg, r.duration_dt))
            .collect();
        assert_eq!(
            got,
            [(5, 990.0, 4448), (4, 900.0, 4288), (3, 720.0, 4128), (3, 450.0, 4128), (2, 270.0, 3968), (2, 270.0, 3968)]
        );
        assert!(rows.iter().all(|r| r.verified && r.internal_rotation_deg == 540.0 && r.depth.cr == 3));
        assert!(swap_ledger(&d, 0, 2).is_err());
    }

    #[test]
    fn serialization_orders_runs_by_wire() {
        let c = parse_circuit("qubits 2\nrx 90 1\nrz 10 0\ncr+- 0 1\nry 90 1\nrx 30 0").unwrap();
        let s = serialize_canonical(&c);
        assert_eq!(s.to_string(), "qubits 2\nrz 10 0\nrx 90 1\ncr+- 0 1\nrx 30 0\nry 90 1\n");
    }

    #[test]
    fn templates_are_canonically_ordered() {
        for s in SwapStrategy::ALL {
            assert_eq!(&serialize_canonical(swap_template(s)), swap_template(s));
        }
    }

    #[test]
    fn cgpc_reproduces_template() {
        let (out, r) = pass_cross_gate_cancellation(swap_template(SwapStrategy::FastOrientation)).unwrap();
        assert_eq!(&out, swap_template(SwapStrategy::Cgpc));
        assert_eq!(r.depth_after, SymbolicDepth::new(3, 3));
        assert_eq!(r.rotation_after, 720.0);
        let (again, r2) = pass_cross_gate_cancellation(&out).unwrap();
        assert_eq!(again, out);
        assert_eq!(r2.rotation_before, r2.rotation_after);
        assert_eq!(r2.gates_before, r2.gates_after);
    }

    #[test]
    fn commute_reproduces_template() {
        let (out, r) = pass_commute_through_cr(swap_template(SwapStrategy::Cgpc)).unwrap();
        assert_eq!(&out, swap_template(SwapStrategy::Commuted));
        assert_eq!(r.depth_after, SymbolicDepth::new(3, 3));
        assert_eq!(r.rotation_after, 450.0);
    }

    #[test]
    fn polarity_reproduces_template() {
        let (out, r) = pass_polarity_switch(swap_template(SwapStrategy::Commuted)).unwrap();
        assert_eq!(&out, swap_template(SwapStrategy::Optimized));
        assert_eq!(r.depth_after, SymbolicDepth::new(2, 3));
        assert_eq!(r.rotation_after, 270.0);
        let flipped: Vec<_> = out
            .gates()
            .iter()
            .filter_map(|g| match g {
                Gate::Cr { polarity, .. } => Some(*polarity),
                _ => None,
            })
            .collect();
        assert_eq!(
            flipped,
            [Polarity::MinusPlus, Polarity::PlusMinus, Polarity::PlusMinus]
        );
    }

    #[test]
    fn later_flips_do_not_help() {
        let opt = swap_template(SwapStrategy::Optimized);
        let l = Layered::new(opt);
        for j in [1, 2] {
            let (kl, kr) = l.around(j, 0);
            let (a, b) = (&l.runs[0][kl], &l.runs[0][kr]);
            let mut na = a.clone();
            na.push(Gate::rx(-180.0, 0));
            let mut nb = vec![Gate::rx(180.0, 0)];
            nb.extend_from_slice(b);
            assert!(sum_cost(&[&na, &nb]).rotation >= sum_cost(&[a, b]).rotation - 1e-9);
        }
    }

    #[test]
    fn pipeline_on_single_swap() {
        let c = parse_circuit("qubits 2\nswap 1 0").unwrap();
        let (out, reports) = optimize_pipeline(&c, &pair()).unwrap();
        assert_eq!(&out, swap_template(SwapStrategy::OptimizedX90));
        assert_eq!(out.to_string(), swap_template(SwapStrategy::OptimizedX90).to_string());
        let rows: Vec<_> = std::iter::once((reports[0].depth_before, reports[0].rotation_before))
            .chain(reports.iter().map(|r| (r.depth_after, r.rotation_after)))
            .collect();
        let d = SymbolicDepth::new;
        assert_eq!(
            rows,
            [
                (d(5, 3), 990.0),
                (d(4, 3), 900.0),
                (d(3, 3), 720.0),
                (d(3, 3), 450.0),
                (d(2, 3), 270.0),
                (d(2, 3), 270.0),
            ]
        );
        assert!(reports.iter().all(|r| r.verified));
    }

    #[test]
    fn disjoint_swaps_overlap() {
        let d = DeviceModel::line(4, 160, 1216, 75.0, 75.0, 1.0);
        let c = parse_circuit("qubits 4\nswap 0 1\nswap 2 3").unwrap();
        let (out, _) = optimize_pipeline(&c, &d).unwrap();
        assert_eq!(depth(&out).unwrap(), SymbolicDepth::new(2, 3));
        assert_eq!(out.external_rotation(), 540.0);
    }

    #[test]
    fn swap_chain_moves_wire_zero_to_three() {
        let d = DeviceModel::line(4, 160, 1216, 75.0, 75.0, 1.0);
        let c = parse_circuit("qubits 4\nswap 0 1\nswap 1 2\nswap 2 3").unwrap();
        let (out, _) = optimize_pipeline(&c, &d).unwrap();
        let u = circuit_unitary::<f64>(&out).unwrap();
        // |x0 x1 x2 x3> -> |x1 x2 x3 x0>, wire 0 as the high bit
        let mut perm = vec![czero::<f64>(); 256];
        for i in 0..16usize {
            let x0 = i >> 3 & 1;
            let j = (i << 1 & 0xf) | x0;
            perm[j * 16 + i] = cx(1.0, 0.0);
        }
        let p = crate::unitary::Unitary::from_entries(perm).unwrap();
        assert!(equal_up_to_global_phase(&u, &p, 1e-9).unwrap().equal);
    }

    #[test]
    fn sampled_verification_on_wide_circuits() {
        let n = 8;
        let d = DeviceModel::line(n, 160, 1216, 75.0, 75.0, 1.0);
        let mut c = Circuit::new(n).unwrap();
        for w in 0..n - 1 {
            c.push(Gate::Swap(w, w + 1)).unwrap();
        }
        let (out, reports) = optimize_pipeline(&c, &d).unwrap();
        assert!(reports.iter().all(|r| r.verified));
        let mut wrong = out.clone();
        wrong.push(Gate::rx(1.0, 3)).unwrap();
        assert_eq!(verify_equivalent(&out, &wrong).unwrap(), None);
    }

    #[test]
    fn passes_need_native_input() {
        let c = parse_circuit("qubits 2\ncnot 0 1").unwrap();
        assert!(matches!(pass_polarity_switch(&c), Err(Error::NotNative(_))));
    }

    #[test]
    fn no_cr_no_flip() {
        let c = parse_circuit("qubits 2\nrx 90 0\nry 45 1").unwrap();
        let (out, _) = pass_polarity_switch(&c).unwrap();
        assert_eq!(out, c);
    }

    fn arb_native() -> impl Strategy<Value = Circuit> {
        let g = (0..5u8, -4..=4i32, any::<bool>(), any::<bool>()).prop_map(|(k, q, w, p)| {
            let a = 45.0 * q as f64;
            let w = w as usize;
            match k {
                0 => Gate::rx(a, w),
                1 => Gate::ry(a, w),
                2 => Gate::rz(a, w),
                _ => {
                    let pol = if p { Polarity::PlusMinus } else { Polarity::MinusPlus };
                    Gate::cr(pol, w, 1 - w)
                }
            }
        });
        proptest::collection::vec(g, 0..=12)
            .prop_map(|gs| Circuit::from_gates(2, gs).unwrap())
    }

    type Pass = fn(&Circuit) -> Result<(Circuit, PassReport)>;
    const PASSES: [Pass; 3] = [
        pass_cross_gate_cancellation,
        pass_commute_through_cr,
        pass_polarity_switch,
    ];

    proptest! {
        #[test]
        fn passes_are_sound_monotone_idempotent(c in arb_native()) {
            for pass in PASSES {
                let (out, r) = pass(&c).unwrap();
                prop_assert!(r.verified);
                prop_assert!(r.rotation_after <= r.rotation_before + 1e-9);
                prop_assert!(r.depth_after.le(&r.depth_before));
                let (again, _) = pass(&out).unwrap();
                prop_assert_eq!(again, out);
            }
        }
    }
}
