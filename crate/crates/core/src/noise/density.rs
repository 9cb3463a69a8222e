use super::channel::{thermal_channel, Kraus1};
use super::NoiseModel;
use crate::circuit::{schedule_moments, Circuit, Gate, MomentClass};
use crate::device::DeviceModel;
use crate::error::{Error, Result};
use crate::linalg::{apply_cols_adjoint, apply_rows};
use crate::num::{cone, czero, Real, C};
use crate::unitary::{local_operator, Mat2, Unitary};
use rand::Rng;
use rand_distr::{Binomial, Distribution};

/// Largest register the density simulator accepts.
pub const MAX_DENSITY_WIRES: usize = 9;

/// `2^n x 2^n` density operator, row-major; wire 0 is the high bit.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T> {
    n_wires: usize,
    data: Vec<C<T>>,
}

fn flat<T: Real>(m: &Mat2<T>) -> Vec<C<T>> {
    vec![m[0][0], m[0][1], m[1][0], m[1][1]]
}

impl<T: Real> DensityMatrix<T> {
    /// `|0...0><0...0|`.
    pub fn ground(n_wires: usize) -> Result<Self> {
        Self::basis_operator(n_wires, 0, 0)
    }

    /// `|i><j|`; not a state unless `i == j`, but evolution is linear.
    pub fn basis_operator(n_wires: usize, i: usize, j: usize) -> Result<Self> {
        if n_wires == 0 || n_wires > MAX_DENSITY_WIRES {
            return Err(Error::TooManyWires {
                n_wires,
                max: MAX_DENSITY_WIRES,
            });
        }
        let dim = 1 << n_wires;
        let mut data = vec![czero(); dim * dim];
        data[i * dim + j] = cone();
        Ok(DensityMatrix { n_wires, data })
    }

    pub fn n_wires(&self) -> usize {
        self.n_wires
    }

    pub fn dim(&self) -> usize {
        1 << self.n_wires
    }

    pub fn get(&self, i: usize, j: usize) -> C<T> {
        self.data[i * self.dim() + j]
    }

    pub fn trace(&self) -> C<T> {
        (0..self.dim()).map(|i| self.get(i, i)).fold(czero(), |a, b| a + b)
    }

    /// Diagonal in the computational basis.
    pub fn probabilities(&self) -> Vec<T> {
        (0..self.dim()).map(|i| self.get(i, i).re).collect()
    }

    /// Largest `|rho_ij - conj(rho_ji)|`.
    pub fn hermiticity_defect(&self) -> T {
        let d = self.dim();
        let mut worst = T::zero();
        for i in 0..d {
            for j in 0..d {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// `rho <- M rho M^dagger` for a local operator on `wires`.
    pub fn apply_local(&mut self, wires: &[usize], m: &[C<T>]) {
        let (n, d) = (self.n_wires, self.dim());
        apply_rows(&mut self.data, n, d, wires, m);
        apply_cols_adjoint(&mut self.data, n, d, wires, m);
    }

    pub fn apply_gate(&mut self, g: &Gate) {
        let (m, wires, k) = local_operator::<T>(g);
        self.apply_local(&wires[..k], &m);
    }

    pub fn apply_unitary(&mut self, u: &Unitary<T>) -> Result<()> {
        if u.dim() != self.dim() {
            return Err(Error::DimensionMismatch(u.dim(), self.dim()));
        }
        let wires: Vec<usize> = (0..self.n_wires).collect();
        self.apply_local(&wires, u.entries());
        Ok(())
    }

    pub fn apply_kraus(&mut self, wire: usize, k: &Kraus1<T>) {
        let mut acc = vec![czero(); self.data.len()];
        for op in &k.ops {
            let mut part = self.clone();
            part.apply_local(&[wire], &flat(op));
            for (a, b) in acc.iter_mut().zip(&part.data) {
                *a = *a + *b;
            }
        }
        self.data = acc;
    }

    /// `(1-p) rho + p tr_S(rho) (x) I_S / 2^|S|` on the wires `S`.
    pub fn depolarize(&mut self, wires: &[usize], p: T) {
        if p == T::zero() {
            return;
        }
        let n = self.n_wires;
        let d = self.dim();
        let bits: Vec<usize> = wires.iter().map(|&w| 1 << (n - 1 - w)).collect();
        let mask = bits.iter().fold(0, |a, b| a | b);
        let offsets: Vec<usize> = (0..1usize << bits.len())
            .map(|s| {
                bits.iter()
                    .enumerate()
                    .filter(|(j, _)| s >> j & 1 == 1)
                    .fold(0, |a, (_, b)| a | b)
            })
            .collect();
        let keep = T::one() - p;
        let share = p / T::from_usize(offsets.len()).unwrap();
        for r in (0..d).filter(|r| r & mask == 0) {
            for c in (0..d).filter(|c| c & mask == 0) {
                let red = offsets
                    .iter()
                    .fold(czero::<T>(), |a, &o| a + self.data[(r | o) * d + (c | o)]);
                for &o1 in &offsets {
                    for &o2 in &offsets {
                        let v = &mut self.data[(r | o1) * d + (c | o2)];
                        *v = *v * keep;
                        if o1 == o2 {
                            *v = *v + red * share;
                        }
                    }
                }
            }
        }
    }

    /// Runs one scheduled circuit segment with noise.
    ///
    /// Per moment: the gates, then relaxation on every wire for the
    /// moment's duration, then depolarizing noise per pulse and per CR.
    pub fn evolve(&mut self, c: &Circuit, noise: &NoiseModel, device: &DeviceModel) -> Result<()> {
        if c.n_wires() != self.n_wires {
            return Err(Error::DimensionMismatch(c.n_wires(), self.n_wires));
        }
        let schedule = schedule_moments(c)?;
        let p1 = T::of(noise.depol_1q);
        let p2 = T::of(noise.depol_2q);
        for m in &schedule.moments {
            for &i in &m.gates {
                self.apply_gate(&c.gates()[i]);
            }
            let dt = device.moment_duration_dt(c, &m.gates, m.class)?;
            if noise.thermal && dt > 0 {
                let t_ns = dt as f64 * device.dt_ns;
                for w in 0..self.n_wires {
                    let q = device.qubit(w)?;
                    let k = thermal_channel::<T>(t_ns, q.t1_us, q.t2_us).map_err(|e| match e {
                        Error::Unphysical { t1_us, t2_us, .. } => Error::Unphysical {
                            qubit: w,
                            t1_us,
                            t2_us,
                        },
                        other => other,
                    })?;
                    self.apply_kraus(w, &k);
                }
            }
            if m.class == MomentClass::Virtual {
                continue;
            }
            for &i in &m.gates {
                match c.gates()[i] {
                    Gate::Rx(_, w) | Gate::Ry(_, w) => self.depolarize(&[w], p1),
                    Gate::Cr { control, target, .. } => self.depolarize(&[control, target], p2),
                    _ => {}
                }
            }
        }
        Ok(())
    }
}

/// Noisy run from `|0...0>`, segment by segment; each segment is scheduled on its own.
pub fn simulate_segments<T: Real>(
    segments: &[Circuit],
    noise: &NoiseModel,
    device: &DeviceModel,
) -> Result<DensityMatrix<T>> {
    let n = segments.first().map_or(1, Circuit::n_wires);
    let mut rho = DensityMatrix::<T>::ground(n)?;
    for s in segments {
        rho.evolve(s, noise, device)?;
    }
    Ok(rho)
}

/// Outcome probabilities of `c` from `|0...0>`, indexed with wire 0 as the high bit.
pub fn simulate_density<T: Real>(c: &Circuit, noise: &NoiseModel, device: &DeviceModel) -> Result<Vec<T>> {
    Ok(simulate_segments::<T>(std::slice::from_ref(c), noise, device)?.probabilities())
}

/// Multinomial counts for `shots` draws from `probs`.
pub fn sample_counts<R: Rng + ?Sized>(probs: &[f64], shots: u64, rng: &mut R) -> Vec<u64> {
    let mut left = shots;
    let mut mass = 1.0f64;
    let mut out = Vec::with_capacity(probs.len());
    for (i, &p) in probs.iter().enumerate() {
        if i + 1 == probs.len() {
            out.push(left);
            break;
        }
        let q = if mass > 0.0 { (p.max(0.0) / mass).clamp(0.0, 1.0) } else { 0.0 };
        let k = Binomial::new(left, q).expect("valid binomial").sample(rng);
        out.push(k);
        left -= k;
        mass -= p.max(0.0);
    }
    out
}

/// `1 - F_avg` of a noisy segment against `ideal`, from the channel trace
/// `F_avg = (tr L + d) / (d^2 + d)` of `ideal^dagger o channel`.
pub fn average_gate_error(
    segment: &Circuit,
    ideal: &Unitary<f64>,
    noise: &NoiseModel,
    device: &DeviceModel,
) -> Result<f64> {
    let n = segment.n_wires();
    let d = 1usize << n;
    if ideal.dim() != d {
        return Err(Error::DimensionMismatch(ideal.dim(), d));
    }
    let undo = ideal.adjoint();
    let mut tr = czero::<f64>();
    for i in 0..d {
        for j in 0..d {
            let mut rho = DensityMatrix::<f64>::basis_operator(n, i, j)?;
            rho.evolve(segment, noise, device)?;
            rho.apply_unitary(&undo)?;
            tr += rho.get(i, j);
        }
    }
    let d = d as f64;
    Ok(1.0 - (tr.re + d) / (d * d + d))
}
