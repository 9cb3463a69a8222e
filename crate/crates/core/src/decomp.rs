//! Lowering of composite gates to `{Rx, Ry, Rz, CR}` on a directed device.

use crate::circuit::{parse_circuit, Circuit, Gate, Polarity};
use crate::device::DeviceModel;
use crate::error::{Error, Result};
use crate::num::{cone, czero, Real, C};
use crate::unitary::{
    circuit_unitary, equal_up_to_global_phase, gate_unitary, kron2, rx, Mat2, Unitary, DEFAULT_TOL,
};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SwapStrategy {
    /// NOTC, CNOT, NOTC.
    SlowOrientation,
    /// CNOT, NOTC, CNOT.
    FastOrientation,
    /// Fast orientation with merged single-qubit runs.
    Cgpc,
    /// Target-wire pulses moved through the CRs.
    Commuted,
    /// First CR's polarity switched.
    Optimized,
    /// `Optimized` with every pulse an `Rx(+90)`.
    OptimizedX90,
}

impl SwapStrategy {
    pub const ALL: [SwapStrategy; 6] = [
        SwapStrategy::SlowOrientation,
        SwapStrategy::FastOrientation,
        SwapStrategy::Cgpc,
        SwapStrategy::Commuted,
        SwapStrategy::Optimized,
        SwapStrategy::OptimizedX90,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SwapStrategy::SlowOrientation => "slow",
            SwapStrategy::FastOrientation => "fast",
            SwapStrategy::Cgpc => "cgpc",
            SwapStrategy::Commuted => "commuted",
            SwapStrategy::Optimized => "optimized",
            SwapStrategy::OptimizedX90 => "optimized-x90",
        }
    }

    fn index(self) -> usize {
        SwapStrategy::ALL.iter().position(|&s| s == self).unwrap()
    }
}

impl fmt::Display for SwapStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SwapStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        let alias = match key.as_str() {
            "slow-orientation" | "standard" => "slow",
            "fast-orientation" => "fast",
            "optimized-x90" | "x90" => "optimized-x90",
            other => other,
        };
        SwapStrategy::ALL
            .into_iter()
            .find(|s| s.name() == alias)
            .ok_or_else(|| Error::Invalid(format!("unknown swap strategy `{s}`")))
    }
}

// Templates on (control 0, target 1), listed run by run: control-wire run,
// target-wire run, then the CR.
const SLOW: &str = "qubits 2
rz 90 0
rx 90 0
rz 180 1
ry 90 1
cr+- 0 1
ry -90 0
rz -90 0
ry 180 0
rz 90 1
rx 90 1
rx 90 1
cr+- 0 1
rz 90 0
rx 90 0
rz 180 1
ry 90 1
cr+- 0 1
ry -90 0
rz 90 1
rx 90 1
";

const FAST: &str = "qubits 2
rz -90 0
ry 180 0
rx 90 1
cr+- 0 1
rz 90 0
rx 90 0
rz 180 1
ry 90 1
cr+- 0 1
ry -90 0
rz -90 0
ry 180 0
rz 90 1
rx 90 1
rx 90 1
cr+- 0 1
";

const CGPC: &str = "qubits 2
rz -90 0
ry 180 0
rx 90 1
cr+- 0 1
rz 90 0
rx 90 0
rz 180 1
ry 90 1
cr+- 0 1
rz 90 0
rx -90 0
rz 90 1
rx 180 1
cr+- 0 1
";

const COMMUTED: &str = "qubits 2
rz -90 0
ry 180 0
cr+- 0 1
rz 90 0
rx 90 0
rz -90 1
rx 90 1
cr+- 0 1
rz 90 0
rx -90 0
rz -90 1
cr+- 0 1
";

const OPTIMIZED: &str = "qubits 2
rz 90 0
cr-+ 0 1
rz -90 0
rx -90 0
rz -90 1
rx 90 1
cr+- 0 1
rz 90 0
rx -90 0
rz -90 1
cr+- 0 1
";

const OPTIMIZED_X90: &str = "qubits 2
rz 90 0
cr-+ 0 1
rz 90 0
rx 90 0
rz 180 0
rz -90 1
rx 90 1
cr+- 0 1
rz -90 0
rx 90 0
rz 180 0
rz -90 1
cr+- 0 1
";

fn verified(text: &str, reference: &Gate, what: &str) -> Circuit {
    let c = parse_circuit(text).expect("template parses");
    let u = circuit_unitary::<f64>(&c).expect("template is small");
    let v = gate_unitary::<f64>(reference, c.n_wires()).expect("reference is small");
    let eq = equal_up_to_global_phase(&u, &v, DEFAULT_TOL).expect("same dimension");
    assert!(eq.equal, "{what} template does not match its composite");
    c
}

fn swap_templates() -> &'static [Circuit; 6] {
    static T: OnceLock<[Circuit; 6]> = OnceLock::new();
    T.get_or_init(|| {
        let s = Gate::Swap(0, 1);
        [
            verified(SLOW, &s, "slow"),
            verified(FAST, &s, "fast"),
            verified(CGPC, &s, "cgpc"),
            verified(COMMUTED, &s, "commuted"),
            verified(OPTIMIZED, &s, "optimized"),
            verified(OPTIMIZED_X90, &s, "optimized-x90"),
        ]
    })
}

fn cnot_template() -> &'static Circuit {
    static T: OnceLock<Circuit> = OnceLock::new();
    T.get_or_init(|| verified("qubits 2\nrz -90 0\nry 180 0\nrx 90 1\ncr+- 0 1", &Gate::Cnot(0, 1), "cnot"))
}

fn notc_template() -> &'static Circuit {
    static T: OnceLock<Circuit> = OnceLock::new();
    T.get_or_init(|| {
        verified(
            "qubits 2\nrz 90 0\nrx 90 0\nrz 180 1\nry 90 1\ncr+- 0 1\nry -90 0\nrz 90 1\nrx 90 1",
            &Gate::Notc(0, 1),
            "notc",
        )
    })
}

/// SWAP template on (control 0, target 1).
pub fn swap_template(strategy: SwapStrategy) -> &'static Circuit {
    &swap_templates()[strategy.index()]
}

fn place(template: &Circuit, c: usize, t: usize) -> Vec<Gate> {
    template
        .gates()
        .iter()
        .map(|g| g.relabel(|w| if w == 0 { c } else { t }))
        .collect()
}

fn pair_circuit(c: usize, t: usize, gates: Vec<Gate>) -> Circuit {
    Circuit::from_gates(c.max(t) + 1, gates).expect("distinct wires")
}

/// CNOT with the same orientation as a CR `control -> target`.
pub fn lower_cnot(control: usize, target: usize) -> Circuit {
    pair_circuit(control, target, place(cnot_template(), control, target))
}

/// NOTC (flips `cr_control`, conditioned on `cr_target`) against a CR `cr_control -> cr_target`.
pub fn lower_notc(cr_control: usize, cr_target: usize) -> Circuit {
    pair_circuit(cr_control, cr_target, place(notc_template(), cr_control, cr_target))
}

/// `[Ry(90), Rx(180)]`.
pub fn lower_h(wire: usize) -> Vec<Gate> {
    vec![Gate::ry(90.0, wire), Gate::rx(180.0, wire)]
}

/// NOTC as a Hadamard-conjugated CNOT.
pub fn lower_notc_via_h(cr_control: usize, cr_target: usize) -> Circuit {
    let (c, t) = (cr_control, cr_target);
    let mut gates = lower_h(c);
    gates.extend(lower_h(t));
    gates.extend(place(cnot_template(), c, t));
    gates.extend(lower_h(c));
    gates.extend(lower_h(t));
    pair_circuit(c, t, gates)
}

/// One step of an echoed CR.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EchoStep {
    /// `Rx(angle)` on the target when the control is `|1>` (or `|0>` if `open`).
    ControlledRx { angle: f64, open: bool },
    /// `Rx(180)` on the control.
    Echo,
}

/// Pulse-level view of one CR: two half-CRs around an echo.
#[derive(Clone, Debug, PartialEq)]
pub struct CrExpansion {
    pub control: usize,
    pub target: usize,
    pub steps: Vec<EchoStep>,
}

fn controlled_rx<T: Real>(angle: f64, open: bool) -> Vec<C<T>> {
    let p0: Mat2<T> = [[cone(), czero()], [czero(), czero()]];
    let p1: Mat2<T> = [[czero(), czero()], [czero(), cone()]];
    let id: Mat2<T> = [[cone(), czero()], [czero(), cone()]];
    let (on, off) = if open { (p0, p1) } else { (p1, p0) };
    let a = kron2(&on, &rx(angle));
    let b = kron2(&off, &id);
    a.iter().zip(&b).map(|(x, y)| *x + *y).collect()
}

impl CrExpansion {
    pub fn echo_count(&self) -> usize {
        self.steps.iter().filter(|s| **s == EchoStep::Echo).count()
    }

    /// Copy with the echo pulses removed.
    pub fn without_echo(&self) -> CrExpansion {
        CrExpansion {
            steps: self.steps.iter().copied().filter(|s| *s != EchoStep::Echo).collect(),
            ..*self
        }
    }

    pub fn unitary<T: Real>(&self, n_wires: usize) -> Result<Unitary<T>> {
        for w in [self.control, self.target] {
            if w >= n_wires {
                return Err(Error::WireOutOfRange { wire: w, n_wires });
            }
        }
        let mut u = Unitary::<T>::identity(1 << n_wires);
        for step in &self.steps {
            match *step {
                EchoStep::ControlledRx { angle, open } => {
                    u.apply_local(&[self.control, self.target], &controlled_rx::<T>(angle, open))
                }
                EchoStep::Echo => {
                    let m = rx::<T>(180.0);
                    u.apply_local(&[self.control], &[m[0][0], m[0][1], m[1][0], m[1][1]])
                }
            }
        }
        Ok(u)
    }
}

/// Echoed pulse sequence of a CR gate.
pub fn expand_cr(g: &Gate) -> Result<CrExpansion> {
    let Gate::Cr {
        polarity,
        control,
        target,
    } = *g
    else {
        return Err(Error::Invalid(format!("expand_cr needs a CR gate, got `{g}`")));
    };
    let ctrl = |angle| EchoStep::ControlledRx { angle, open: false };
    let open = |angle| EchoStep::ControlledRx { angle, open: true };
    let positive = [open(45.0), ctrl(-45.0)];
    let negative = [ctrl(45.0), open(-45.0)];
    let (first, second) = match polarity {
        Polarity::PlusMinus => (positive, negative),
        Polarity::MinusPlus => (negative, positive),
    };
    let mut steps = first.to_vec();
    steps.push(EchoStep::Echo);
    steps.extend(second);
    Ok(CrExpansion {
        control,
        target,
        steps,
    })
}

/// SWAP on a device edge, oriented to the edge's CR direction.
///
/// Wires are device qubit ids; the circuit spans `device.n_wires()` wires.
pub fn lower_swap(a: usize, b: usize, strategy: SwapStrategy, device: &DeviceModel) -> Result<Circuit> {
    let (c, t) = device.cr_direction(a, b)?;
    let gates = place(swap_template(strategy), c, t);
    let n = device.n_wires().max(c.max(t) + 1);
    Ok(crate::passes::serialize_canonical(&Circuit::from_gates(n, gates)?))
}

/// Replaces CNOT, NOTC, H and X with native sequences for `device`.
///
/// Each SWAP becomes the given strategy's template. Native gates pass
/// through; a CR against the calibrated direction is an error.
pub fn lower_to_native(c: &Circuit, device: &DeviceModel, swap: SwapStrategy) -> Result<Circuit> {
    let mut out = Circuit::new(c.n_wires())?;
    let n = c.n_wires();
    let mut emit = |gates: Vec<Gate>| -> Result<()> {
        for g in gates {
            out.push(g)?;
        }
        Ok(())
    };
    for g in c.gates() {
        match *g {
            Gate::Rx(..) | Gate::Ry(..) | Gate::Rz(..) => emit(vec![*g])?,
            Gate::Cr { control, target, .. } => {
                device.cr_edge(control, target)?;
                emit(vec![*g])?
            }
            Gate::H(w) => emit(lower_h(w))?,
            Gate::X(w) => emit(vec![Gate::rx(180.0, w)])?,
            // flips b conditioned on a
            Gate::Cnot(a, b) | Gate::Notc(b, a) => {
                let (cc, ct) = device.cr_direction(a, b)?;
                let gates = if (cc, ct) == (a, b) {
                    place(cnot_template(), a, b)
                } else {
                    place(notc_template(), b, a)
                };
                emit(gates)?
            }
            Gate::Swap(a, b) => {
                let (cc, ct) = device.cr_direction(a, b)?;
                if cc.max(ct) >= n {
                    return Err(Error::WireOutOfRange {
                        wire: cc.max(ct),
                        n_wires: n,
                    });
                }
                emit(place(swap_template(swap), cc, ct))?
            }
        }
    }
    Ok(out)
}
