use crate::error::{Error, Result};
use crate::num::Real;
use serde::{Deserialize, Serialize};

const MAX_ITER: usize = 200;

/// `y = A alpha^m + B`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit<T> {
    #[serde(rename = "A")]
    pub a: T,
    pub alpha: T,
    #[serde(rename = "B")]
    pub b: T,
    pub sigma_alpha: T,
    /// RMS of the residuals.
    pub residual: T,
}

impl<T: Real> DecayFit<T> {
    pub fn eval(&self, m: T) -> T {
        self.a * self.alpha.powf(m) + self.b
    }
}

fn solve3<T: Real>(m: [[T; 3]; 3], v: [T; 3]) -> Option<[T; 3]> {
    let det = |m: &[[T; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(&m);
    if d == T::zero() || !d.is_finite() {
        return None;
    }
    let mut out = [T::zero(); 3];
    for (k, o) in out.iter_mut().enumerate() {
        let mut mk = m;
        for i in 0..3 {
            mk[i][k] = v[i];
        }
        *o = det(&mk) / d;
    }
    Some(out)
}

fn inverse3<T: Real>(m: [[T; 3]; 3]) -> Option<[[T; 3]; 3]> {
    let mut inv = [[T::zero(); 3]; 3];
    for k in 0..3 {
        let mut e = [T::zero(); 3];
        e[k] = T::one();
        let col = solve3(m, e)?;
        for i in 0..3 {
            inv[i][k] = col[i];
        }
    }
    Some(inv)
}

fn sse<T: Real>(pts: &[(T, T)], p: [T; 3]) -> T {
    pts.iter()
        .map(|&(m, y)| {
            let r = y - (p[0] * p[1].powf(m) + p[2]);
            r * r
        })
        .fold(T::zero(), |a, b| a + b)
}

fn normal_equations<T: Real>(pts: &[(T, T)], p: [T; 3]) -> ([[T; 3]; 3], [T; 3]) {
    let mut jtj = [[T::zero(); 3]; 3];
    let mut jtr = [T::zero(); 3];
    for &(m, y) in pts {
        let am = p[1].powf(m);
        let j = [am, p[0] * m * p[1].powf(m - T::one()), T::one()];
        let r = y - (p[0] * am + p[2]);
        for a in 0..3 {
            jtr[a] = jtr[a] + j[a] * r;
            for b in 0..3 {
                jtj[a][b] = jtj[a][b] + j[a] * j[b];
            }
        }
    }
    (jtj, jtr)
}

/// Least-squares fit of `A alpha^m + B` by damped Gauss-Newton.
///
/// Starts from `A = 0.75`, `B = 0.25` and `alpha` from a log-linear fit of
/// `y - 0.25`; stops when the relative step drops below 1e-10 or after 200
/// iterations. `sigma_alpha` comes from `s^2 (J^T J)^-1`.
pub fn fit_decay<T: Real>(points: &[(T, T)]) -> Result<DecayFit<T>> {
    let mut ms: Vec<f64> = points.iter().map(|p| p.0.as_f64()).collect();
    ms.sort_by(f64::total_cmp);
    ms.dedup();
    if ms.len() < 4 {
        return Err(Error::Fit(format!("need at least 4 distinct lengths, got {}", ms.len())));
    }
    if points.iter().any(|&(m, y)| !m.is_finite() || !y.is_finite()) {
        return Err(Error::Fit("non-finite input".into()));
    }
    let (lo, hi) = points
        .iter()
        .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &(_, y)| (lo.min(y), hi.max(y)));
    if hi - lo < T::of(1e-12) {
        return Err(Error::Fit("survival is constant, nothing decays".into()));
    }

    let b0 = T::of(0.25);
    let logs: Vec<(T, T)> = points
        .iter()
        .filter(|&&(_, y)| y - b0 > T::of(1e-9))
        .map(|&(m, y)| (m, (y - b0).ln()))
        .collect();
    let alpha0 = if logs.len() >= 2 {
        let n = T::from_usize(logs.len()).unwrap();
        let mx = logs.iter().fold(T::zero(), |a, p| a + p.0) / n;
        let my = logs.iter().fold(T::zero(), |a, p| a + p.1) / n;
        let sxy = logs.iter().fold(T::zero(), |a, p| a + (p.0 - mx) * (p.1 - my));
        let sxx = logs.iter().fold(T::zero(), |a, p| a + (p.0 - mx) * (p.0 - mx));
        if sxx > T::zero() {
            (sxy / sxx).exp()
        } else {
            T::of(0.9)
        }
    } else {
        T::of(0.9)
    };
    let mut p = [T::of(0.75), alpha0.min(T::of(0.999_999)).max(T::of(1e-3)), b0];
    let mut cost = sse(points, p);
    let mut mu = T::of(1e-3);
    for _ in 0..MAX_ITER {
        let (jtj, jtr) = normal_equations(points, p);
        let mut accepted = false;
        let mut small = false;
        for _ in 0..60 {
            let mut damped = jtj;
            for (k, row) in damped.iter_mut().enumerate() {
                row[k] = row[k] * (T::one() + mu);
            }
            let Some(step) = solve3(damped, jtr) else {
                mu = mu * T::of(10.0);
                continue;
            };
            let trial = [p[0] + step[0], p[1] + step[1], p[2] + step[2]];
            let rel = (0..3)
                .map(|k| step[k].abs() / p[k].abs().max(T::of(1e-12)))
                .fold(T::zero(), T::max);
            if trial[1] > T::zero() && trial[1].is_finite() {
                let c = sse(points, trial);
                if c <= cost {
                    p = trial;
                    cost = c;
                    mu = (mu / T::of(10.0)).max(T::of(1e-12));
                    accepted = true;
                    small = rel < T::of(1e-10);
                    break;
                }
            }
            if rel < T::of(1e-14) {
                small = true;
                break;
            }
            mu = mu * T::of(10.0);
        }
        if small || !accepted {
            break;
        }
    }
    if !(p[1] > T::zero() && p.iter().all(|v| v.is_finite())) {
        return Err(Error::Fit(format!("did not converge (alpha = {})", p[1])));
    }
    let n = T::from_usize(points.len()).unwrap();
    let dof = (n - T::of(3.0)).max(T::one());
    let s2 = cost / dof;
    let (jtj, _) = normal_equations(points, p);
    let sigma_alpha = inverse3(jtj)
        .map(|inv| (s2 * inv[1][1]).max(T::zero()).sqrt())
        .unwrap_or(T::infinity());
    Ok(DecayFit {
        a: p[0],
        alpha: p[1],
        b: p[2],
        sigma_alpha,
        residual: (cost / n).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_distr::{Distribution, Normal};

    const MS: [f64; 9] = [1.0, 2.0, 3.0, 5.0, 8.0, 12.0, 17.0, 23.0, 30.0];

    #[test]
    fn exact_round_trip() {
        let pts: Vec<(f64, f64)> = MS.iter().map(|&m| (m, 0.75 * 0.97f64.powf(m) + 0.25)).collect();
        let f = fit_decay(&pts).unwrap();
        assert!((f.alpha - 0.97).abs() < 1e-8, "{f:?}");
        assert!((f.a - 0.75).abs() < 1e-8);
        assert!((f.b - 0.25).abs() < 1e-8);
        assert!(f.residual < 1e-10);
    }

    #[test]
    fn other_start_points() {
        for (a, alpha, b) in [(0.6, 0.9, 0.3), (0.7, 0.995, 0.27), (0.5, 0.7, 0.25)] {
            let pts: Vec<(f64, f64)> =
                MS.iter().map(|&m| (m, a * f64::powf(alpha, m) + b)).collect();
            let f = fit_decay(&pts).unwrap();
            assert!((f.alpha - alpha).abs() < 1e-7, "{f:?}");
        }
    }

    #[test]
    fn single_precision() {
        let pts: Vec<(f32, f32)> = MS
            .iter()
            .map(|&m| (m as f32, 0.75 * 0.95f32.powf(m as f32) + 0.25))
            .collect();
        let f = fit_decay(&pts).unwrap();
        assert!((f.alpha - 0.95).abs() < 1e-4);
    }

    #[test]
    fn degenerate_inputs() {
        let flat: Vec<(f64, f64)> = MS.iter().map(|&m| (m, 1.0)).collect();
        assert!(fit_decay(&flat).is_err());
        let few = [(1.0, 0.9), (2.0, 0.8), (3.0, 0.7)];
        assert!(fit_decay(&few).is_err());
        let repeated = [(1.0, 0.9), (1.0, 0.8), (2.0, 0.7), (2.0, 0.6), (3.0, 0.5)];
        assert!(fit_decay(&repeated).is_err());
    }

    #[test]
    fn noisy_coverage() {
        let noise = Normal::new(0.0, 0.005).unwrap();
        let mut hits = 0;
        for seed in 0..100 {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let pts: Vec<(f64, f64)> = MS
                .iter()
                .map(|&m| (m, 0.75 * 0.97f64.powf(m) + 0.25 + noise.sample(&mut rng)))
                .collect();
            let f = fit_decay(&pts).unwrap();
            if (f.alpha - 0.97).abs() <= 3.0 * f.sigma_alpha {
                hits += 1;
            }
        }
        assert!(hits >= 95, "{hits}/100");
    }
}
