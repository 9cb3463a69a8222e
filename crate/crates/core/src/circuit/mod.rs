//! Circuit intermediate representation.
//!
//! Gate order is circuit time, left to right. Wire indices are 0-based and
//! double as device qubit ids when a circuit is placed on a [`DeviceModel`].
//!
//! [`DeviceModel`]: crate::device::DeviceModel

mod canon;
mod parse;
mod schedule;

pub use canon::{
    canonicalize_1q_run, canonicalize_1q_run_x90, run_cost, run_su2, zxz_angles, RunCost,
};
pub use schedule::{schedule_moments, Moment, MomentClass, MomentSchedule, SymbolicDepth};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Angles closer than this (in degrees) are treated as equal.
pub const ANGLE_EPS: f64 = 1e-9;

/// Rotation angle in degrees.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Angle(f64);

impl Angle {
    pub const fn deg(degrees: f64) -> Self {
        Angle(degrees)
    }

    pub fn degrees(self) -> f64 {
        self.0
    }

    pub fn radians(self) -> f64 {
        self.0.to_radians()
    }

    /// Equivalent angle in (-180, 180], snapped to a 1e-9 degree grid.
    ///
    /// For the rotation gates used here the operator changes at most by a
    /// sign, which is a global phase.
    pub fn normalized(self) -> Self {
        let mut a = snap(self.0 % 360.0);
        if a <= -180.0 {
            a += 360.0;
        }
        if a > 180.0 {
            a -= 360.0;
        }
        Angle(snap(a))
    }

    pub fn is_zero(self) -> bool {
        self.normalized().0.abs() < ANGLE_EPS
    }

    /// True for a half turn in either direction.
    pub fn is_half_turn(self) -> bool {
        (self.normalized().0 - 180.0).abs() < ANGLE_EPS
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = if self.0 == 0.0 { 0.0 } else { self.0 };
        write!(f, "{v}")
    }
}

fn snap(x: f64) -> f64 {
    let r = (x * 1e9).round() / 1e9;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Echo order of a cross-resonance pulse pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarity {
    /// Positive half first, then negative half.
    PlusMinus,
    /// Negative half first, then positive half.
    MinusPlus,
}

impl Polarity {
    pub fn flipped(self) -> Self {
        match self {
            Polarity::PlusMinus => Polarity::MinusPlus,
            Polarity::MinusPlus => Polarity::PlusMinus,
        }
    }

    fn token(self) -> &'static str {
        match self {
            Polarity::PlusMinus => "+-",
            Polarity::MinusPlus => "-+",
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// A native or composite gate.
///
/// Native kinds are `Rx`, `Ry`, `Rz` and `Cr`; everything else is a
/// convenience form that has to be lowered before scheduling or simulation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gate {
    Rx(Angle, usize),
    Ry(Angle, usize),
    /// Virtual: zero duration and no active rotation.
    Rz(Angle, usize),
    /// Directed echoed cross-resonance.
    Cr {
        polarity: Polarity,
        control: usize,
        target: usize,
    },
    /// `Cnot(control, target)`.
    Cnot(usize, usize),
    /// `Notc(a, b)` flips `a` conditioned on `b`: a CNOT drawn upside down
    /// relative to the wire pair `(a, b)`.
    Notc(usize, usize),
    Swap(usize, usize),
    H(usize),
    X(usize),
}

/// Wires touched by a gate, in gate order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Wires {
    w: [usize; 2],
    len: usize,
}

impl Wires {
    fn one(a: usize) -> Self {
        Wires { w: [a, a], len: 1 }
    }

    fn two(a: usize, b: usize) -> Self {
        Wires { w: [a, b], len: 2 }
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.w[..self.len]
    }

    pub fn contains(&self, wire: usize) -> bool {
        self.as_slice().contains(&wire)
    }
}

impl Gate {
    pub fn rx(deg: f64, wire: usize) -> Self {
        Gate::Rx(Angle::deg(deg), wire)
    }

    pub fn ry(deg: f64, wire: usize) -> Self {
        Gate::Ry(Angle::deg(deg), wire)
    }

    pub fn rz(deg: f64, wire: usize) -> Self {
        Gate::Rz(Angle::deg(deg), wire)
    }

    pub fn cr(polarity: Polarity, control: usize, target: usize) -> Self {
        Gate::Cr {
            polarity,
            control,
            target,
        }
    }

    pub fn cr_pm(control: usize, target: usize) -> Self {
        Gate::cr(Polarity::PlusMinus, control, target)
    }

    pub fn cr_mp(control: usize, target: usize) -> Self {
        Gate::cr(Polarity::MinusPlus, control, target)
    }

    pub fn wires(&self) -> Wires {
        match *self {
            Gate::Rx(_, w) | Gate::Ry(_, w) | Gate::Rz(_, w) | Gate::H(w) | Gate::X(w) => {
                Wires::one(w)
            }
            Gate::Cr {
                control, target, ..
            } => Wires::two(control, target),
            Gate::Cnot(a, b) | Gate::Notc(a, b) | Gate::Swap(a, b) => Wires::two(a, b),
        }
    }

    pub fn arity(&self) -> usize {
        self.wires().len
    }

    pub fn is_native(&self) -> bool {
        matches!(
            self,
            Gate::Rx(..) | Gate::Ry(..) | Gate::Rz(..) | Gate::Cr { .. }
        )
    }

    pub fn is_virtual(&self) -> bool {
        matches!(self, Gate::Rz(..))
    }

    /// Rotation angle of an `Rx`/`Ry`/`Rz`.
    pub fn angle(&self) -> Option<Angle> {
        match *self {
            Gate::Rx(a, _) | Gate::Ry(a, _) | Gate::Rz(a, _) => Some(a),
            _ => None,
        }
    }

    /// Physical (non-virtual) single-qubit pulse with a nonzero angle.
    pub fn is_pulse(&self) -> bool {
        match *self {
            Gate::Rx(a, _) | Gate::Ry(a, _) => !a.is_zero(),
            _ => false,
        }
    }

    /// Degrees of active rotation contributed outside cross-resonance blocks.
    pub fn external_rotation(&self) -> f64 {
        match *self {
            Gate::Rx(a, _) | Gate::Ry(a, _) => a.normalized().degrees().abs(),
            _ => 0.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Gate::Rx(..) => "rx",
            Gate::Ry(..) => "ry",
            Gate::Rz(..) => "rz",
            Gate::Cr {
                polarity: Polarity::PlusMinus,
                ..
            } => "cr+-",
            Gate::Cr {
                polarity: Polarity::MinusPlus,
                ..
            } => "cr-+",
            Gate::Cnot(..) => "cnot",
            Gate::Notc(..) => "notc",
            Gate::Swap(..) => "swap",
            Gate::H(..) => "h",
            Gate::X(..) => "x",
        }
    }

    /// Same gate with every wire passed through `f`.
    pub fn relabel(&self, f: impl Fn(usize) -> usize) -> Gate {
        match *self {
            Gate::Rx(a, w) => Gate::Rx(a, f(w)),
            Gate::Ry(a, w) => Gate::Ry(a, f(w)),
            Gate::Rz(a, w) => Gate::Rz(a, f(w)),
            Gate::H(w) => Gate::H(f(w)),
            Gate::X(w) => Gate::X(f(w)),
            Gate::Cr {
                polarity,
                control,
                target,
            } => Gate::Cr {
                polarity,
                control: f(control),
                target: f(target),
            },
            Gate::Cnot(a, b) => Gate::Cnot(f(a), f(b)),
            Gate::Notc(a, b) => Gate::Notc(f(a), f(b)),
            Gate::Swap(a, b) => Gate::Swap(f(a), f(b)),
        }
    }

    /// Same rotation kind on the same wire with a different angle.
    pub(crate) fn with_angle(&self, deg: f64) -> Gate {
        match *self {
            Gate::Rx(_, w) => Gate::rx(deg, w),
            Gate::Ry(_, w) => Gate::ry(deg, w),
            Gate::Rz(_, w) => Gate::rz(deg, w),
            g => g,
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::Rx(a, w) | Gate::Ry(a, w) | Gate::Rz(a, w) => {
                write!(f, "{} {} {}", self.name(), a, w)
            }
            Gate::H(w) | Gate::X(w) => write!(f, "{} {}", self.name(), w),
            Gate::Cr {
                polarity,
                control,
                target,
            } => write!(f, "cr{} {} {}", polarity.token(), control, target),
            Gate::Cnot(a, b) | Gate::Notc(a, b) | Gate::Swap(a, b) => {
                write!(f, "{} {} {}", self.name(), a, b)
            }
        }
    }
}

/// Ordered gate list on a fixed number of wires.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    n_wires: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_wires: usize) -> Result<Self> {
        if n_wires == 0 {
            return Err(Error::Invalid("a circuit needs at least one wire".into()));
        }
        Ok(Circuit {
            n_wires,
            gates: Vec::new(),
        })
    }

    pub fn from_gates(n_wires: usize, gates: impl IntoIterator<Item = Gate>) -> Result<Self> {
        let mut c = Circuit::new(n_wires)?;
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn n_wires(&self) -> usize {
        self.n_wires
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, g: Gate) -> Result<()> {
        check_gate(&g, self.n_wires)?;
        self.gates.push(g);
        Ok(())
    }

    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        for g in other.gates() {
            self.push(*g)?;
        }
        Ok(())
    }

    pub fn is_native(&self) -> bool {
        self.gates.iter().all(Gate::is_native)
    }

    pub fn cr_count(&self) -> usize {
        self.gates
            .iter()
            .filter(|g| matches!(g, Gate::Cr { .. }))
            .count()
    }

    /// Sum of |angle| over physical single-qubit pulses, in degrees.
    pub fn external_rotation(&self) -> f64 {
        self.gates.iter().map(Gate::external_rotation).sum()
    }

    /// Same circuit on `n_wires` wires with every wire mapped through `f`.
    pub fn relabeled(&self, n_wires: usize, f: impl Fn(usize) -> usize) -> Result<Circuit> {
        Circuit::from_gates(n_wires, self.gates.iter().map(|g| g.relabel(&f)))
    }

    /// Wires that carry at least one gate, ascending.
    pub fn active_wires(&self) -> Vec<usize> {
        let mut used = vec![false; self.n_wires];
        for g in &self.gates {
            for &w in g.wires().as_slice() {
                used[w] = true;
            }
        }
        (0..self.n_wires).filter(|&w| used[w]).collect()
    }
}

fn check_gate(g: &Gate, n_wires: usize) -> Result<()> {
    let ws = g.wires();
    for &w in ws.as_slice() {
        if w >= n_wires {
            return Err(Error::WireOutOfRange { wire: w, n_wires });
        }
    }
    if let [a, b] = ws.as_slice() {
        if a == b {
            return Err(Error::WireCollision(*a));
        }
    }
    Ok(())
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "qubits {}", self.n_wires)?;
        for g in &self.gates {
            writeln!(f, "{g}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Circuit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse::parse_circuit(s)
    }
}

pub use parse::parse_circuit;
