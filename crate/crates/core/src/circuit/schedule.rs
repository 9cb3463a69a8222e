use super::{Circuit, Gate};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MomentClass {
    /// Only virtual `Rz`; zero duration.
    Virtual,
    OneQubit,
    Cr,
}

/// One time step: indices into the scheduled circuit's gate list, ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Moment {
    pub class: MomentClass,
    pub gates: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MomentSchedule {
    pub moments: Vec<Moment>,
}

/// Depth as `one_qubit * t1q + cr * tCR`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolicDepth {
    pub one_qubit: u32,
    pub cr: u32,
}

impl SymbolicDepth {
    pub const fn new(one_qubit: u32, cr: u32) -> Self {
        SymbolicDepth { one_qubit, cr }
    }

    /// True if neither coefficient is larger than in `other`.
    pub fn le(&self, other: &SymbolicDepth) -> bool {
        self.one_qubit <= other.one_qubit && self.cr <= other.cr
    }

    pub fn evaluate(&self, t1q: f64, tcr: f64) -> f64 {
        self.one_qubit as f64 * t1q + self.cr as f64 * tcr
    }
}

impl fmt::Display for SymbolicDepth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}t1q+{}tCR", self.one_qubit, self.cr)
    }
}

impl MomentSchedule {
    pub fn depth(&self) -> SymbolicDepth {
        let mut d = SymbolicDepth::default();
        for m in &self.moments {
            match m.class {
                MomentClass::OneQubit => d.one_qubit += 1,
                MomentClass::Cr => d.cr += 1,
                MomentClass::Virtual => {}
            }
        }
        d
    }

    pub fn len(&self) -> usize {
        self.moments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moments.is_empty()
    }
}

/// As-soon-as-possible schedule with class-homogeneous moments.
///
/// A gate joins the earliest existing moment after its wires' last use that
/// has the same class and no overlapping wire; otherwise a new moment is
/// appended. `Rz` gates ride along with the next pulse or CR on their wire,
/// and any left over at the end form one trailing virtual moment.
pub fn schedule_moments(c: &Circuit) -> Result<MomentSchedule> {
    let n = c.n_wires();
    let mut moments: Vec<Moment> = Vec::new();
    let mut busy: Vec<Vec<bool>> = Vec::new();
    let mut wire_next = vec![0usize; n];
    let mut pending: Vec<Vec<usize>> = vec![Vec::new(); n];

    for (i, g) in c.gates().iter().enumerate() {
        let class = match g {
            Gate::Rz(_, w) => {
                pending[*w].push(i);
                continue;
            }
            Gate::Rx(..) | Gate::Ry(..) => MomentClass::OneQubit,
            Gate::Cr { .. } => MomentClass::Cr,
            other => return Err(Error::NotNative(other.name().to_string())),
        };
        let ws = g.wires();
        let earliest = ws.as_slice().iter().map(|&w| wire_next[w]).max().unwrap_or(0);
        let slot = (earliest..moments.len()).find(|&m| {
            moments[m].class == class && ws.as_slice().iter().all(|&w| !busy[m][w])
        });
        let m = slot.unwrap_or_else(|| {
            moments.push(Moment {
                class,
                gates: Vec::new(),
            });
            busy.push(vec![false; n]);
            moments.len() - 1
        });
        for &w in ws.as_slice() {
            moments[m].gates.append(&mut pending[w]);
            busy[m][w] = true;
            wire_next[w] = m + 1;
        }
        moments[m].gates.push(i);
    }

    let mut tail: Vec<usize> = pending.into_iter().flatten().collect();
    if !tail.is_empty() {
        tail.sort_unstable();
        moments.push(Moment {
            class: MomentClass::Virtual,
            gates: tail,
        });
    }
    for m in &mut moments {
        m.gates.sort_unstable();
    }
    Ok(MomentSchedule { moments })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::parse_circuit;

    #[test]
    fn empty_circuit() {
        let s = schedule_moments(&Circuit::new(2).unwrap()).unwrap();
        assert!(s.is_empty());
        assert_eq!(s.depth(), SymbolicDepth::new(0, 0));
    }

    #[test]
    fn composite_rejected() {
        let c = parse_circuit("qubits 2\nswap 0 1").unwrap();
        assert!(matches!(schedule_moments(&c), Err(Error::NotNative(_))));
    }

    #[test]
    fn cnot_lowering_depth() {
        let c = parse_circuit("qubits 2\nrz -90 0\nry 180 0\nrx 90 1\ncr+- 0 1").unwrap();
        let s = schedule_moments(&c).unwrap();
        assert_eq!(s.depth(), SymbolicDepth::new(1, 1));
        assert_eq!(s.moments[0].gates, vec![0, 1, 2]);
        assert_eq!(s.moments[0].class, MomentClass::OneQubit);
    }

    #[test]
    fn trailing_rz_is_virtual() {
        let c = parse_circuit("qubits 2\nrx 90 0\nrz 90 1\nrz 45 0").unwrap();
        let s = schedule_moments(&c).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.moments[1].class, MomentClass::Virtual);
        assert_eq!(s.moments[1].gates, vec![1, 2]);
        assert_eq!(s.depth(), SymbolicDepth::new(1, 0));
    }

    #[test]
    fn preserves_wire_order_and_count() {
        let c = parse_circuit(
            "qubits 3\nrx 90 0\ncr+- 0 1\nry 90 2\nrz 10 1\nrx 30 1\ncr-+ 2 1\nrx 10 0",
        )
        .unwrap();
        let s = schedule_moments(&c).unwrap();
        let mut seen: Vec<usize> = s.moments.iter().flat_map(|m| m.gates.clone()).collect();
        assert_eq!(seen.len(), c.len());
        seen.sort_unstable();
        assert_eq!(seen, (0..c.len()).collect::<Vec<_>>());
        // per-wire order: moment index is non-decreasing along each wire
        let pos = |i: usize| s.moments.iter().position(|m| m.gates.contains(&i)).unwrap();
        for w in 0..3 {
            let on: Vec<usize> = (0..c.len())
                .filter(|&i| c.gates()[i].wires().contains(w))
                .collect();
            for pair in on.windows(2) {
                assert!(pos(pair[0]) <= pos(pair[1]));
            }
        }
    }
}
