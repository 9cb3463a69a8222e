use crate::error::{Error, Result};
use crate::num::{cone, cx, czero, Real, C};
use crate::unitary::{mat2_mul, Mat2};

/// Kraus operators of a single-qubit channel.
#[derive(Clone, Debug, PartialEq)]
pub struct Kraus1<T> {
    pub ops: Vec<Mat2<T>>,
}

fn adjoint2<T: Real>(m: &Mat2<T>) -> Mat2<T> {
    [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]]
}

impl<T: Real> Kraus1<T> {
    pub fn identity() -> Self {
        Kraus1 {
            ops: vec![[[cone(), czero()], [czero(), cone()]]],
        }
    }

    /// Largest entry of `sum K^dagger K - I`.
    pub fn closure_defect(&self) -> T {
        let mut s: Mat2<T> = [[czero(); 2]; 2];
        for k in &self.ops {
            let p = mat2_mul(&adjoint2(k), k);
            for i in 0..2 {
                for j in 0..2 {
                    s[i][j] = s[i][j] + p[i][j];
                }
            }
        }
        let mut worst = T::zero();
        for (i, row) in s.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let id = if i == j { cone() } else { czero() };
                worst = worst.max((*v - id).norm());
            }
        }
        worst
    }

    /// `other` after `self`.
    pub fn then(&self, other: &Kraus1<T>) -> Kraus1<T> {
        let mut ops = Vec::with_capacity(self.ops.len() * other.ops.len());
        for b in &other.ops {
            for a in &self.ops {
                ops.push(mat2_mul(b, a));
            }
        }
        Kraus1 { ops }
    }
}

pub fn amplitude_damping<T: Real>(gamma: T) -> Kraus1<T> {
    let z = czero();
    Kraus1 {
        ops: vec![
            [[cone(), z], [z, C::new((T::one() - gamma).sqrt(), T::zero())]],
            [[z, C::new(gamma.sqrt(), T::zero())], [z, z]],
        ],
    }
}

/// Off-diagonals scaled by `sqrt(1 - lambda)`.
pub fn phase_damping<T: Real>(lambda: T) -> Kraus1<T> {
    let z = czero();
    Kraus1 {
        ops: vec![
            [[cone(), z], [z, C::new((T::one() - lambda).sqrt(), T::zero())]],
            [[z, z], [z, C::new(lambda.sqrt(), T::zero())]],
        ],
    }
}

/// Relaxation over `t_ns`: amplitude damping with `gamma = 1 - e^{-t/T1}`,
/// then pure dephasing at `1/Tphi = 1/T2 - 1/(2 T1)`.
///
/// Infinite lifetimes are allowed and switch the matching part off.
pub fn thermal_channel<T: Real>(t_ns: f64, t1_us: f64, t2_us: f64) -> Result<Kraus1<T>> {
    if !(t1_us > 0.0 && t2_us > 0.0) || t_ns < 0.0 || t_ns.is_nan() {
        return Err(Error::Invalid(format!(
            "thermal channel needs t >= 0 and positive lifetimes, got t={t_ns} T1={t1_us} T2={t2_us}"
        )));
    }
    if t2_us > 2.0 * t1_us {
        return Err(Error::Unphysical {
            qubit: usize::MAX,
            t1_us,
            t2_us,
        });
    }
    let t = t_ns / 1000.0;
    let gamma = 1.0 - (-t / t1_us).exp();
    let inv_tphi = (1.0 / t2_us - 0.5 / t1_us).max(0.0);
    let lambda = 1.0 - (-2.0 * t * inv_tphi).exp();
    Ok(amplitude_damping(T::of(gamma)).then(&phase_damping(T::of(lambda))))
}

/// Pauli matrices `I, X, Y, Z`.
pub fn paulis<T: Real>() -> [Mat2<T>; 4] {
    let (o, z) = (cone::<T>(), czero::<T>());
    [
        [[o, z], [z, o]],
        [[z, o], [o, z]],
        [[z, cx(0., -1.)], [cx(0., 1.), z]],
        [[o, z], [z, cx(-1., 0.)]],
    ]
}

/// Kraus form of `(1-p) rho + p I/2 (x) tr(rho)` on one qubit.
pub fn depolarizing_1q<T: Real>(p: T) -> Kraus1<T> {
    let four = T::of(4.0);
    let w = [T::one() - T::of(3.0) * p / four, p / four, p / four, p / four];
    Kraus1 {
        ops: paulis::<T>()
            .iter()
            .zip(w)
            .map(|(m, w)| {
                let s = w.max(T::zero()).sqrt();
                [[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]]
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn channels_are_trace_preserving() {
        for (t, t1, t2) in [(0.0, 75.0, 75.0), (160.0, 50.0, 30.0), (5e4, 20.0, 40.0), (1e9, 1.0, 0.5)] {
            let k = thermal_channel::<f64>(t, t1, t2).unwrap();
            assert!(k.closure_defect() < 1e-10);
        }
        for p in [0.0, 0.01, 0.5, 1.0] {
            assert!(depolarizing_1q::<f64>(p).closure_defect() < 1e-12);
        }
        assert!(thermal_channel::<f32>(300.0, 40.0, 60.0).unwrap().closure_defect() < 1e-6);
    }

    #[test]
    fn infinite_lifetimes_are_identity() {
        let k = thermal_channel::<f64>(1e6, f64::INFINITY, f64::INFINITY).unwrap();
        let sum: f64 = k.ops.iter().skip(1).flat_map(|m| m.iter().flatten()).map(|v| v.norm()).sum();
        assert_eq!(sum, 0.0);
        assert!((k.ops[0][1][1].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn damping_rate_at_t1() {
        // T2 = 2 T1: no pure dephasing, gamma = 1 - 1/e
        let k = thermal_channel::<f64>(50_000.0, 50.0, 100.0).unwrap();
        let gamma: f64 = k.ops.iter().map(|m| m[0][1].norm_sqr()).sum();
        assert!((gamma - (1.0 - (-1.0f64).exp())).abs() < 1e-12);
    }

    #[test]
    fn rejects_unphysical() {
        assert!(matches!(
            thermal_channel::<f64>(10.0, 10.0, 30.0),
            Err(Error::Unphysical { .. })
        ));
        assert!(thermal_channel::<f64>(-1.0, 10.0, 10.0).is_err());
    }
}
