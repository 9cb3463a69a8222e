//! The two-qubit Clifford group as native circuits on a CR pair `0 -> 1`.

use crate::circuit::{canonicalize_1q_run, Circuit, Gate};
use crate::decomp::{lower_cnot, lower_notc, swap_template, SwapStrategy};
use crate::error::{Error, Result};
use crate::noise::channel::paulis;
use crate::num::{cx, C};
use crate::passes::canonicalize_runs;
use crate::unitary::{circuit_unitary, Unitary};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::hash_map::Entry;
use std::collections::HashMap;
use std::sync::OnceLock;

pub const GROUP_ORDER: usize = 11520;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CliffordClass {
    Single,
    CnotLike,
    IswapLike,
    SwapLike,
}

impl CliffordClass {
    pub const ALL: [CliffordClass; 4] = [
        CliffordClass::Single,
        CliffordClass::CnotLike,
        CliffordClass::IswapLike,
        CliffordClass::SwapLike,
    ];

    /// Entangling gates in the class representative.
    pub fn cr_count(self) -> usize {
        match self {
            CliffordClass::Single => 0,
            CliffordClass::CnotLike => 1,
            CliffordClass::IswapLike => 2,
            CliffordClass::SwapLike => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CliffordElement {
    pub circuit: Circuit,
    pub unitary: Unitary<f64>,
    pub class: CliffordClass,
}

/// Global-phase-free hash key: entries divided by the phase of the first
/// non-negligible one, rounded to 1e-6.
pub(crate) fn phase_key(entries: &[C<f64>]) -> Vec<(i64, i64)> {
    let pivot = entries
        .iter()
        .find(|x| x.norm() > 1e-6)
        .copied()
        .unwrap_or(cx(1.0, 0.0));
    let rot = pivot.conj() / pivot.norm();
    entries
        .iter()
        .map(|x| {
            let y = x * rot;
            ((y.re * 1e6).round() as i64, (y.im * 1e6).round() as i64)
        })
        .collect()
}

fn run_matrix_key(run: &[Gate]) -> Vec<(i64, i64)> {
    let c = Circuit::from_gates(1, run.iter().copied()).expect("single-wire run");
    phase_key(circuit_unitary::<f64>(&c).expect("tiny").entries())
}

/// The 24 single-qubit Cliffords as canonical runs on wire 0, in breadth-first order from `H` and `S`.
pub fn one_qubit_cliffords() -> Vec<Vec<Gate>> {
    let gens = [vec![Gate::ry(90.0, 0), Gate::rx(180.0, 0)], vec![Gate::rz(90.0, 0)]];
    let mut seen = HashMap::new();
    let mut out: Vec<Vec<Gate>> = vec![Vec::new()];
    seen.insert(run_matrix_key(&[]), 0);
    let mut i = 0;
    while i < out.len() {
        for g in &gens {
            let mut run = out[i].clone();
            run.extend_from_slice(g);
            let run = canonicalize_1q_run(&run);
            let key = run_matrix_key(&run);
            if let Entry::Vacant(e) = seen.entry(key) {
                e.insert(out.len());
                out.push(run);
            }
        }
        i += 1;
    }
    out
}

fn on_wire(run: &[Gate], w: usize) -> impl Iterator<Item = Gate> + '_ {
    run.iter().map(move |g| g.relabel(|_| w))
}

/// All 11520 elements, built as `(s1 (x) s2) G (A (x) B)` per class.
pub struct CliffordTable {
    elements: Vec<CliffordElement>,
    index: HashMap<Vec<(i64, i64)>, usize>,
}

impl CliffordTable {
    fn build() -> Self {
        let c1 = one_qubit_cliffords();
        let s_plain: Vec<Vec<Gate>> = vec![Vec::new()];
        let s_twirl: Vec<Vec<Gate>> = vec![
            Vec::new(),
            vec![Gate::ry(90.0, 0), Gate::rx(90.0, 0)],
            vec![Gate::rx(-90.0, 0), Gate::ry(-90.0, 0)],
        ];
        let mut elements = Vec::with_capacity(GROUP_ORDER);
        let mut index = HashMap::with_capacity(GROUP_ORDER);
        for class in CliffordClass::ALL {
            let (core, twirl): (Vec<Gate>, &Vec<Vec<Gate>>) = match class {
                CliffordClass::Single => (Vec::new(), &s_plain),
                CliffordClass::CnotLike => (lower_cnot(0, 1).gates().to_vec(), &s_twirl),
                CliffordClass::IswapLike => {
                    let mut g = lower_cnot(0, 1).gates().to_vec();
                    g.extend_from_slice(lower_notc(0, 1).gates());
                    (g, &s_twirl)
                }
                CliffordClass::SwapLike => (swap_template(SwapStrategy::Cgpc).gates().to_vec(), &s_plain),
            };
            for a in &c1 {
                for b in &c1 {
                    for s1 in twirl {
                        for s2 in twirl {
                            let gates = on_wire(a, 0)
                                .chain(on_wire(b, 1))
                                .chain(core.iter().copied())
                                .chain(on_wire(s1, 0))
                                .chain(on_wire(s2, 1));
                            let raw = Circuit::from_gates(2, gates).expect("two wires");
                            let circuit = canonicalize_runs(&raw);
                            let unitary = circuit_unitary::<f64>(&circuit).expect("two wires");
                            let key = phase_key(unitary.entries());
                            if index.contains_key(&key) {
                                continue;
                            }
                            index.insert(key, elements.len());
                            elements.push(CliffordElement {
                                circuit,
                                unitary,
                                class,
                            });
                        }
                    }
                }
            }
        }
        CliffordTable { elements, index }
    }

    pub fn global() -> &'static CliffordTable {
        static T: OnceLock<CliffordTable> = OnceLock::new();
        T.get_or_init(CliffordTable::build)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[CliffordElement] {
        &self.elements
    }

    /// Element equal to `u` up to global phase.
    pub fn lookup(&self, u: &Unitary<f64>) -> Result<&CliffordElement> {
        if u.dim() != 4 {
            return Err(Error::DimensionMismatch(u.dim(), 4));
        }
        self.index
            .get(&phase_key(u.entries()))
            .map(|&i| &self.elements[i])
            .ok_or(Error::NotClifford)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> &CliffordElement {
        &self.elements[rng.random_range(0..self.elements.len())]
    }
}

/// Uniformly random two-qubit Clifford.
pub fn random_clifford2<R: Rng + ?Sized>(rng: &mut R) -> &'static CliffordElement {
    CliffordTable::global().sample(rng)
}

fn pauli_string(n: usize, code: usize) -> Unitary<f64> {
    let ps = paulis::<f64>();
    let mut u = Unitary::<f64>::identity(1 << n);
    for w in 0..n {
        let p = ps[code >> (2 * w) & 3];
        u.apply_local(&[w], &[p[0][0], p[0][1], p[1][0], p[1][1]]);
    }
    u
}

/// True if `u` maps each single-wire `X` and `Z` to a Pauli string up to a phase.
pub fn is_clifford(u: &Unitary<f64>) -> bool {
    let n = u.n_wires();
    if n > 4 {
        return false;
    }
    let d = u.dim() as f64;
    let all: Vec<Unitary<f64>> = (0..1usize << (2 * n)).map(|c| pauli_string(n, c)).collect();
    (0..n).all(|w| {
        [1usize, 3].iter().all(|&p| {
            let g = pauli_string(n, p << (2 * w));
            let m = u.mul(&g).mul(&u.adjoint());
            all.iter().any(|q| (q.overlap(&m).norm() / d - 1.0).abs() < 1e-9)
        })
    })
}
