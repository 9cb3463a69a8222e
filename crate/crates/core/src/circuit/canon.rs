//! Canonical forms for single-wire gate runs.
//!
//! A run collapses to `Rz(a) Rx(t) Rz(b)` (circuit order). Each operator
//! has two such decompositions, `(a, t, b)` and `(a+180, -t, b+180)`; the
//! pick is made by total physical rotation, then gate count, then the sign
//! of `t`. The five-gate `Rz Rx(90) Rz Rx(90) Rz` form costs 180 degrees,
//! which never beats a single pulse of at most 180, so it is not generated.

use super::{Angle, Gate, ANGLE_EPS};
use crate::num::C;
use crate::unitary::{mat2_mul, rx, rz, single_qubit_matrix, Mat2};

type C64 = C<f64>;

/// Physical cost of a run: summed |angle| of pulses, then pulse count.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunCost {
    pub rotation: f64,
    pub pulses: usize,
}

impl RunCost {
    /// Strictly cheaper: less rotation, or equal rotation with fewer pulses.
    pub fn better_than(&self, other: &RunCost) -> bool {
        if self.rotation < other.rotation - ANGLE_EPS {
            return true;
        }
        (self.rotation - other.rotation).abs() <= ANGLE_EPS && self.pulses < other.pulses
    }
}

pub fn run_cost(gates: &[Gate]) -> RunCost {
    RunCost {
        rotation: gates.iter().map(Gate::external_rotation).sum(),
        pulses: gates.iter().filter(|g| g.is_pulse()).count(),
    }
}

/// 2x2 operator of a run in circuit order.
pub fn run_su2(gates: &[Gate]) -> Mat2<f64> {
    let mut u: Mat2<f64> = rz(0.0);
    for g in gates {
        let m = single_qubit_matrix::<f64>(g).expect("single-wire gate");
        u = mat2_mul(&m, &u);
    }
    u
}

fn overlap(a: &Mat2<f64>, b: &Mat2<f64>) -> f64 {
    let mut tr = C64::new(0.0, 0.0);
    for i in 0..2 {
        for j in 0..2 {
            tr += a[i][j].conj() * b[i][j];
        }
    }
    tr.norm() / 2.0
}

fn zxz_matrix(a: f64, t: f64, b: f64) -> Mat2<f64> {
    mat2_mul(&rz(b), &mat2_mul(&rx(t), &rz(a)))
}

fn norm_deg(x: f64) -> f64 {
    Angle::deg(x).normalized().degrees()
}

const SMALL: f64 = 1e-10;

/// `(a, t, b)` with `u ~ Rz(b) Rx(t) Rz(a)` up to phase and `t` in [0, 180].
///
/// For `t = 0` the whole z rotation is in `a`; for `t = 180`, `b = 0`.
pub fn zxz_angles(u: &Mat2<f64>) -> (f64, f64, f64) {
    let c = u[0][0].norm();
    let s = u[1][0].norm();
    let t = 2.0 * s.atan2(c).to_degrees();
    if s < SMALL {
        let sum = (u[1][1].arg() - u[0][0].arg()).to_degrees();
        return (norm_deg(sum), 0.0, 0.0);
    }
    if c < SMALL {
        let diff = (u[0][1].arg() - u[1][0].arg()).to_degrees();
        for a in [diff, diff + 180.0] {
            if overlap(u, &zxz_matrix(a, 180.0, 0.0)) > 1.0 - 1e-9 {
                return (norm_deg(a), 180.0, 0.0);
            }
        }
        unreachable!("half-turn decomposition exists");
    }
    let sum = (u[1][1].arg() - u[0][0].arg()).to_degrees();
    let diff = (u[0][1].arg() - u[1][0].arg()).to_degrees();
    let a = (sum + diff) / 2.0;
    let b = (sum - diff) / 2.0;
    for (a, b) in [(a, b), (a + 180.0, b + 180.0)] {
        if overlap(u, &zxz_matrix(a, t, b)) > 1.0 - 1e-9 {
            return (norm_deg(a), norm_deg(t), norm_deg(b));
        }
    }
    unreachable!("zxz decomposition exists");
}

fn emit(wire: usize, a: f64, t: f64, b: f64) -> Vec<Gate> {
    let mut out = Vec::with_capacity(3);
    for (g, v) in [
        (Gate::rz(a, wire), a),
        (Gate::rx(t, wire), t),
        (Gate::rz(b, wire), b),
    ] {
        let v = norm_deg(v);
        if v.abs() >= ANGLE_EPS {
            out.push(g.with_angle(v));
        }
    }
    out
}

fn candidates(gates: &[Gate]) -> Option<(usize, [Vec<Gate>; 2])> {
    let wire = gates.first()?.wires().as_slice()[0];
    assert!(
        gates
            .iter()
            .all(|g| matches!(g, Gate::Rx(_, w) | Gate::Ry(_, w) | Gate::Rz(_, w) if *w == wire)),
        "canonicalization needs Rx/Ry/Rz gates on one wire"
    );
    let (a, t, b) = zxz_angles(&run_su2(gates));
    if t.abs() < ANGLE_EPS {
        return Some((wire, [emit(wire, a, 0.0, 0.0), emit(wire, a, 0.0, 0.0)]));
    }
    Some((
        wire,
        [emit(wire, a, t, b), emit(wire, a + 180.0, -t, b + 180.0)],
    ))
}

fn theta(run: &[Gate]) -> f64 {
    run.iter()
        .find_map(|g| match g {
            Gate::Rx(a, _) => Some(a.normalized().degrees()),
            _ => None,
        })
        .unwrap_or(0.0)
}

/// Canonical `[Rz] [Rx] [Rz]` form of a single-wire run.
///
/// Equal up to global phase; zero angles dropped; ties in rotation go to
/// fewer gates, then to a positive `Rx` angle.
pub fn canonicalize_1q_run(gates: &[Gate]) -> Vec<Gate> {
    let Some((_, [p, q])) = candidates(gates) else {
        return Vec::new();
    };
    let key = |r: &Vec<Gate>| (r.len(), theta(r) < 0.0);
    if key(&q) < key(&p) {
        q
    } else {
        p
    }
}

/// Like [`canonicalize_1q_run`] but a positive `Rx` angle wins over gate
/// count, so executable runs use only positively calibrated pulses.
pub fn canonicalize_1q_run_x90(gates: &[Gate]) -> Vec<Gate> {
    let Some((_, [p, q])) = candidates(gates) else {
        return Vec::new();
    };
    let key = |r: &Vec<Gate>| (theta(r) < 0.0, r.len());
    if key(&q) < key(&p) {
        q
    } else {
        p
    }
}
