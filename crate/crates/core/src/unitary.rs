//! Dense operators for gates and circuits, and equivalence up to global phase.
//!
//! Conventions (angles in degrees, converted here):
//! `Rx(t) = exp(-i t X / 2)`, `Ry(t) = exp(-i t Y / 2)`, `Rz(t) = diag(e^{-it/2}, e^{it/2})`.
//! The echoed cross-resonance gate is `CR+- = E K` and `CR-+ = K E` with
//! `K = |0><0| (x) Rx(90) + |1><1| (x) Rx(-90)` on (control, target) and
//! `E = Rx(180)` on the control.

use crate::circuit::{Circuit, Gate, Polarity};
use crate::error::{Error, Result};
use crate::linalg::apply_rows;
use crate::num::{cis, cone, cx, czero, Real, C};
use std::fmt::Write as _;

/// Largest register `circuit_unitary` will build densely.
pub const MAX_DENSE_WIRES: usize = 12;

/// Default tolerance for [`equal_up_to_global_phase`].
pub const DEFAULT_TOL: f64 = 1e-9;

/// Square complex matrix, row-major, dimension a power of two.
#[derive(Clone, Debug, PartialEq)]
pub struct Unitary<T> {
    dim: usize,
    data: Vec<C<T>>,
}

impl<T: Real> Unitary<T> {
    pub fn identity(dim: usize) -> Self {
        let mut data = vec![czero(); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = cone();
        }
        Unitary { dim, data }
    }

    /// Builds from row-major entries; `entries.len()` must be a square of a power of two.
    pub fn from_entries(entries: Vec<C<T>>) -> Result<Self> {
        let dim = (entries.len() as f64).sqrt().round() as usize;
        if dim * dim != entries.len() || !dim.is_power_of_two() {
            return Err(Error::Invalid(format!(
                "{} entries do not form a 2^n x 2^n matrix",
                entries.len()
            )));
        }
        Ok(Unitary { dim, data: entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_wires(&self) -> usize {
        self.dim.trailing_zeros() as usize
    }

    pub fn entries(&self) -> &[C<T>] {
        &self.data
    }

    pub fn get(&self, row: usize, col: usize) -> C<T> {
        self.data[row * self.dim + col]
    }

    /// Matrix product `self * rhs` (apply `rhs` first).
    pub fn mul(&self, rhs: &Unitary<T>) -> Unitary<T> {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let d = self.dim;
        let mut out = vec![czero(); d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.data[i * d + k];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                for j in 0..d {
                    out[i * d + j] = out[i * d + j] + a * rhs.data[k * d + j];
                }
            }
        }
        Unitary { dim: d, data: out }
    }

    /// Left-multiplies by a local operator on `wires` (first wire = local MSB).
    pub(crate) fn apply_local(&mut self, wires: &[usize], m: &[C<T>]) {
        let n = self.n_wires();
        apply_rows(&mut self.data, n, self.dim, wires, m);
    }

    pub fn adjoint(&self) -> Unitary<T> {
        let d = self.dim;
        let mut out = vec![czero(); d * d];
        for i in 0..d {
            for j in 0..d {
                out[j * d + i] = self.data[i * d + j].conj();
            }
        }
        Unitary { dim: d, data: out }
    }

    pub fn scaled(&self, s: C<T>) -> Unitary<T> {
        Unitary {
            dim: self.dim,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    /// `trace(self^dagger * other)`.
    pub fn overlap(&self, other: &Unitary<T>) -> C<T> {
        self.data
            .iter()
            .zip(&other.data)
            .fold(czero(), |acc, (a, b)| acc + a.conj() * b)
    }

    /// Largest elementwise deviation of `U^dagger U` from the identity.
    pub fn unitarity_defect(&self) -> T {
        let p = self.adjoint().mul(self);
        let id = Unitary::identity(self.dim);
        p.data
            .iter()
            .zip(&id.data)
            .map(|(a, b)| (*a - *b).norm())
            .fold(T::zero(), T::max)
    }

    /// Largest elementwise `|self - other|`.
    pub fn max_abs_diff(&self, other: &Unitary<T>) -> T {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (*a - *b).norm())
            .fold(T::zero(), T::max)
    }

    /// Row-major `re,im` pairs, one matrix row per CSV line.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for r in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|c| {
                    let z = self.get(r, c);
                    format!("{},{}", z.re, z.im)
                })
                .collect();
            let _ = writeln!(s, "{}", row.join(","));
        }
        s
    }

    /// Inverse of [`Unitary::to_csv`].
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let vals: Vec<f64> = line
                .split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse {
                    line: i + 1,
                    msg: e.to_string(),
                })?;
            if !vals.len().is_multiple_of(2) {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: "odd number of values in complex row".into(),
                });
            }
            entries.extend(vals.chunks(2).map(|p| cx::<T>(p[0], p[1])));
        }
        Unitary::from_entries(entries)
    }
}

pub type Mat2<T> = [[C<T>; 2]; 2];

pub fn mat2_mul<T: Real>(a: &Mat2<T>, b: &Mat2<T>) -> Mat2<T> {
    let mut out = [[czero(); 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn rx<T: Real>(deg: f64) -> Mat2<T> {
    let h = deg.to_radians() / 2.0;
    let (c, s) = (h.cos(), h.sin());
    [[cx(c, 0.), cx(0., -s)], [cx(0., -s), cx(c, 0.)]]
}

pub fn ry<T: Real>(deg: f64) -> Mat2<T> {
    let h = deg.to_radians() / 2.0;
    let (c, s) = (h.cos(), h.sin());
    [[cx(c, 0.), cx(-s, 0.)], [cx(s, 0.), cx(c, 0.)]]
}

pub fn rz<T: Real>(deg: f64) -> Mat2<T> {
    let h = deg.to_radians() / 2.0;
    [[cx(h.cos(), -h.sin()), czero()], [czero(), cx(h.cos(), h.sin())]]
}

pub fn hadamard<T: Real>() -> Mat2<T> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    [[cx(r, 0.), cx(r, 0.)], [cx(r, 0.), cx(-r, 0.)]]
}

pub fn pauli_x<T: Real>() -> Mat2<T> {
    [[czero(), cone()], [cone(), czero()]]
}

/// 2x2 operator of a single-wire gate; `None` for two-wire kinds.
pub fn single_qubit_matrix<T: Real>(g: &Gate) -> Option<Mat2<T>> {
    match *g {
        Gate::Rx(a, _) => Some(rx(a.degrees())),
        Gate::Ry(a, _) => Some(ry(a.degrees())),
        Gate::Rz(a, _) => Some(rz(a.degrees())),
        Gate::H(_) => Some(hadamard()),
        Gate::X(_) => Some(pauli_x()),
        _ => None,
    }
}

fn flat2<T: Real>(m: &Mat2<T>) -> Vec<C<T>> {
    vec![m[0][0], m[0][1], m[1][0], m[1][1]]
}

pub(crate) fn kron2<T: Real>(a: &Mat2<T>, b: &Mat2<T>) -> Vec<C<T>> {
    let mut out = vec![czero(); 16];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[(2 * i + k) * 4 + (2 * j + l)] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

fn mul4<T: Real>(a: &[C<T>], b: &[C<T>]) -> Vec<C<T>> {
    let mut out = vec![czero(); 16];
    for i in 0..4 {
        for k in 0..4 {
            for j in 0..4 {
                out[i * 4 + j] = out[i * 4 + j] + a[i * 4 + k] * b[k * 4 + j];
            }
        }
    }
    out
}

/// Conditional kernel of the echoed CR on (control, target).
pub fn cr_kernel<T: Real>() -> Vec<C<T>> {
    let p0: Mat2<T> = [[cone(), czero()], [czero(), czero()]];
    let p1: Mat2<T> = [[czero(), czero()], [czero(), cone()]];
    let a = kron2(&p0, &rx(90.0));
    let b = kron2(&p1, &rx(-90.0));
    a.iter().zip(&b).map(|(x, y)| *x + *y).collect()
}

/// Echo pulse `Rx(180)` on the control, as a 4x4 on (control, target).
pub fn cr_echo<T: Real>() -> Vec<C<T>> {
    let id: Mat2<T> = [[cone(), czero()], [czero(), cone()]];
    kron2(&rx(180.0), &id)
}

/// 4x4 operator of a CR on (control, target), control as the local MSB.
pub fn cr_matrix<T: Real>(polarity: Polarity) -> Vec<C<T>> {
    let (k, e) = (cr_kernel::<T>(), cr_echo::<T>());
    match polarity {
        Polarity::PlusMinus => mul4(&e, &k),
        Polarity::MinusPlus => mul4(&k, &e),
    }
}

fn permutation4<T: Real>(perm: [usize; 4]) -> Vec<C<T>> {
    let mut m = vec![czero(); 16];
    for (col, &row) in perm.iter().enumerate() {
        m[row * 4 + col] = cone();
    }
    m
}

/// Local operator and the wires it acts on (first wire = local MSB).
pub(crate) fn local_operator<T: Real>(g: &Gate) -> (Vec<C<T>>, [usize; 2], usize) {
    if let Some(m) = single_qubit_matrix::<T>(g) {
        let w = g.wires().as_slice()[0];
        return (flat2(&m), [w, w], 1);
    }
    match *g {
        Gate::Cr {
            polarity,
            control,
            target,
        } => (cr_matrix(polarity), [control, target], 2),
        Gate::Cnot(c, t) => (permutation4([0, 1, 3, 2]), [c, t], 2),
        // logical control is the second wire
        Gate::Notc(a, b) => (permutation4([0, 1, 3, 2]), [b, a], 2),
        Gate::Swap(a, b) => (permutation4([0, 2, 1, 3]), [a, b], 2),
        _ => unreachable!("single-wire kinds handled above"),
    }
}

/// Full `2^n x 2^n` operator of one gate.
pub fn gate_unitary<T: Real>(g: &Gate, n_wires: usize) -> Result<Unitary<T>> {
    let c = Circuit::from_gates(n_wires, [*g])?;
    circuit_unitary(&c)
}

/// Product of the gate operators, later gates on the left.
pub fn circuit_unitary<T: Real>(c: &Circuit) -> Result<Unitary<T>> {
    let n = c.n_wires();
    if n > MAX_DENSE_WIRES {
        return Err(Error::TooManyWires {
            n_wires: n,
            max: MAX_DENSE_WIRES,
        });
    }
    let mut u = Unitary::<T>::identity(1 << n);
    let dim = u.dim;
    for g in c.gates() {
        let (m, wires, k) = local_operator::<T>(g);
        apply_rows(&mut u.data, n, dim, &wires[..k], &m);
    }
    Ok(u)
}

/// Applies `c` to a state vector of length `2^n`.
pub fn apply_to_state<T: Real>(c: &Circuit, state: &mut [C<T>]) -> Result<()> {
    let n = c.n_wires();
    if state.len() != 1 << n {
        return Err(Error::DimensionMismatch(state.len(), 1 << n));
    }
    for g in c.gates() {
        let (m, wires, k) = local_operator::<T>(g);
        apply_rows(state, n, 1, &wires[..k], &m);
    }
    Ok(())
}

/// Outcome of a global-phase-insensitive comparison.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Equivalence<T> {
    pub equal: bool,
    /// `arg(trace(u^dagger v))`, radians; meaningful when `equal`.
    pub phase: T,
    /// `|trace(u^dagger v)| / dim`, 1 for equal operators.
    pub overlap: T,
}

impl<T: Real> Equivalence<T> {
    /// `1 - overlap`.
    pub fn deficit(&self) -> T {
        T::one() - self.overlap
    }
}

/// `equal` iff `|trace(u^dagger v)| >= dim (1 - tol)`.
pub fn equal_up_to_global_phase<T: Real>(
    u: &Unitary<T>,
    v: &Unitary<T>,
    tol: T,
) -> Result<Equivalence<T>> {
    if u.dim != v.dim {
        return Err(Error::DimensionMismatch(u.dim, v.dim));
    }
    if tol <= T::zero() {
        return Err(Error::Invalid("tolerance must be positive".into()));
    }
    let tr = u.overlap(v);
    let dim = T::from_usize(u.dim).expect("dimension fits");
    let overlap = tr.norm() / dim;
    Ok(Equivalence {
        equal: overlap >= T::one() - tol,
        phase: tr.arg(),
        overlap,
    })
}

/// `e^{i phi} u`.
pub fn with_phase<T: Real>(u: &Unitary<T>, phi: T) -> Unitary<T> {
    u.scaled(cis(phi))
}
