use super::clifford::{is_clifford, CliffordTable};
use super::density::{average_gate_error, sample_counts, simulate_segments};
use super::fit::{fit_decay, DecayFit};
use super::NoiseModel;
use crate::circuit::{Circuit, Gate};
use crate::decomp::{lower_swap, SwapStrategy};
use crate::device::DeviceModel;
use crate::error::{Error, Result};
use crate::unitary::{circuit_unitary, equal_up_to_global_phase, gate_unitary, Unitary};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// One nominal-identity sequence, split into the segments that are scheduled
/// separately: each Clifford, each interleaved gate, then the inverse.
#[derive(Clone, Debug, PartialEq)]
pub struct RbSequence {
    pub length: usize,
    pub index: usize,
    pub segments: Vec<Circuit>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IrbConfig {
    pub lengths: Vec<usize>,
    pub sequences_per_length: usize,
    pub seed: u64,
}

impl Default for IrbConfig {
    fn default() -> Self {
        IrbConfig {
            lengths: vec![1, 2, 3, 5, 8, 12, 17, 23, 30],
            sequences_per_length: 12,
            seed: 0,
        }
    }
}

/// Mean survival of `|00>` at one length.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurvivalRow {
    pub m: usize,
    pub reference: f64,
    pub interleaved: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IrbResult {
    pub alpha_rb: DecayFit<f64>,
    pub alpha_int: DecayFit<f64>,
    pub gate_error: f64,
    pub gate_error_sigma: f64,
    pub table: Vec<SurvivalRow>,
}

fn stream_rng(seed: u64, li: usize, si: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((li as u64) << 32) | si as u64);
    rng
}

fn check_interleave(c: &Circuit) -> Result<Unitary<f64>> {
    if c.n_wires() != 2 {
        return Err(Error::DimensionMismatch(c.n_wires(), 2));
    }
    let u = circuit_unitary::<f64>(c)?;
    if !is_clifford(&u) {
        return Err(Error::NotClifford);
    }
    Ok(u)
}

fn build_sequence(
    length: usize,
    index: usize,
    mut rng: ChaCha8Rng,
    interleave: Option<(&Circuit, &Unitary<f64>)>,
) -> Result<RbSequence> {
    let table = CliffordTable::global();
    let mut total = Unitary::<f64>::identity(4);
    let mut segments = Vec::with_capacity(2 * length + 1);
    for _ in 0..length {
        let e = table.sample(&mut rng);
        total = e.unitary.mul(&total);
        segments.push(e.circuit.clone());
        if let Some((c, u)) = interleave {
            total = u.mul(&total);
            segments.push(c.clone());
        }
    }
    segments.push(table.lookup(&total.adjoint())?.circuit.clone());
    Ok(RbSequence {
        length,
        index,
        segments,
    })
}

/// `k` sequences per length. Sequence `(l, s)` draws its Cliffords from its
/// own stream of `seed`, so the reference and interleaved sets share them.
pub fn rb_sequences(
    lengths: &[usize],
    k: usize,
    interleave: Option<&Circuit>,
    seed: u64,
) -> Result<Vec<RbSequence>> {
    if lengths.contains(&0) {
        return Err(Error::Invalid("sequence lengths must be at least 1".into()));
    }
    let inter = interleave.map(|c| check_interleave(c).map(|u| (c, u))).transpose()?;
    let jobs: Vec<(usize, usize, usize)> = lengths
        .iter()
        .enumerate()
        .flat_map(|(li, &m)| (0..k).map(move |si| (li, m, si)))
        .collect();
    jobs.par_iter()
        .map(|&(li, m, si)| build_sequence(m, si, stream_rng(seed, li, si), inter.as_ref().map(|(c, u)| (*c, u))))
        .collect()
}

/// `(3/4)(1 - alpha_int / alpha_rb)`, with the ratio's variance propagated
/// from both fits. The returned table is empty.
pub fn irb_gate_error(fit_rb: &DecayFit<f64>, fit_int: &DecayFit<f64>) -> Result<IrbResult> {
    if fit_rb.alpha.abs() < 1e-12 {
        return Err(Error::Fit("reference decay alpha is zero".into()));
    }
    let r = fit_int.alpha / fit_rb.alpha;
    let rel = (fit_int.sigma_alpha / fit_int.alpha).powi(2) + (fit_rb.sigma_alpha / fit_rb.alpha).powi(2);
    Ok(IrbResult {
        alpha_rb: *fit_rb,
        alpha_int: *fit_int,
        gate_error: 0.75 * (1.0 - r),
        gate_error_sigma: 0.75 * r.abs() * rel.sqrt(),
        table: Vec::new(),
    })
}

fn survival(seq: &RbSequence, noise: &NoiseModel, device: &DeviceModel, li: usize) -> Result<f64> {
    let p = simulate_segments::<f64>(&seq.segments, noise, device)?.probabilities();
    Ok(match noise.shots {
        None => p[0],
        Some(shots) => {
            let mut rng = stream_rng(noise.seed, li, seq.index);
            sample_counts(&p, shots, &mut rng)[0] as f64 / shots as f64
        }
    })
}

/// Fit, treating survival that never leaves 1 as no decay at all.
fn fit_arm(points: &[(f64, f64)]) -> Result<DecayFit<f64>> {
    if points.iter().all(|&(_, y)| (y - 1.0).abs() < 1e-12) {
        let residual = (points.iter().map(|p| (p.1 - 1.0).powi(2)).sum::<f64>() / points.len() as f64).sqrt();
        return Ok(DecayFit {
            a: 0.75,
            alpha: 1.0,
            b: 0.25,
            sigma_alpha: 0.0,
            residual,
        });
    }
    fit_decay(points)
}

/// Reference and interleaved RB on a two-wire device whose CR runs `0 -> 1`.
pub fn run_irb_experiment(
    swap_impl: &Circuit,
    device: &DeviceModel,
    noise: &NoiseModel,
    config: &IrbConfig,
) -> Result<IrbResult> {
    noise.validate()?;
    if device.n_wires() != 2 {
        return Err(Error::DimensionMismatch(device.n_wires(), 2));
    }
    device.edge(0, 1)?;
    let u = circuit_unitary::<f64>(swap_impl)?;
    let swap = gate_unitary::<f64>(&Gate::Swap(0, 1), 2)?;
    if !equal_up_to_global_phase(&u, &swap, 1e-9)?.equal {
        return Err(Error::Invalid("interleaved circuit is not a SWAP".into()));
    }
    if config.lengths.len() < 4 || config.sequences_per_length == 0 {
        return Err(Error::Invalid("need at least 4 lengths and one sequence per length".into()));
    }
    let k = config.sequences_per_length;
    let reference = rb_sequences(&config.lengths, k, None, config.seed)?;
    let interleaved = rb_sequences(&config.lengths, k, Some(swap_impl), config.seed)?;
    let run = |seqs: &[RbSequence]| -> Result<Vec<f64>> {
        seqs.par_iter()
            .enumerate()
            .map(|(i, s)| survival(s, noise, device, i / k))
            .collect()
    };
    let (ys_ref, ys_int) = (run(&reference)?, run(&interleaved)?);
    let mean = |ys: &[f64], li: usize| ys[li * k..(li + 1) * k].iter().sum::<f64>() / k as f64;
    let table: Vec<SurvivalRow> = config
        .lengths
        .iter()
        .enumerate()
        .map(|(li, &m)| SurvivalRow {
            m,
            reference: mean(&ys_ref, li),
            interleaved: mean(&ys_int, li),
        })
        .collect();
    let pts = |f: fn(&SurvivalRow) -> f64| -> Vec<(f64, f64)> { table.iter().map(|r| (r.m as f64, f(r))).collect() };
    let fit_rb = fit_arm(&pts(|r| r.reference))?;
    let fit_int = fit_arm(&pts(|r| r.interleaved))?;
    let mut out = irb_gate_error(&fit_rb, &fit_int)?;
    out.table = table;
    Ok(out)
}

/// Average error of the standard SWAP on `device` (a two-wire pair).
pub fn standard_swap_error(device: &DeviceModel, noise: &NoiseModel) -> Result<f64> {
    let c = lower_swap(0, 1, SwapStrategy::SlowOrientation, device)?;
    let ideal = gate_unitary::<f64>(&Gate::Swap(0, 1), 2)?;
    average_gate_error(&c, &ideal, noise, device)
}

/// `depol_2q` at which the standard SWAP's average error equals `target`,
/// with `depol_1q` and thermal relaxation held fixed.
pub fn calibrate_depol_2q(device: &DeviceModel, target: f64, depol_1q: f64, thermal: bool) -> Result<NoiseModel> {
    let at = |p: f64| NoiseModel {
        depol_1q,
        depol_2q: p,
        thermal,
        ..NoiseModel::ideal()
    };
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    if standard_swap_error(device, &at(lo))? > target || standard_swap_error(device, &at(hi))? < target {
        return Err(Error::Invalid(format!("error target {target} is out of reach")));
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if standard_swap_error(device, &at(mid))? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(at(0.5 * (lo + hi)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::clifford::CliffordClass;

    fn pair() -> DeviceModel {
        DeviceModel::line(2, 160, 1216, 75.0, 75.0, 2.0 / 9.0)
    }

    fn small() -> IrbConfig {
        IrbConfig {
            lengths: vec![1, 2, 4, 8, 14, 22],
            sequences_per_length: 6,
            seed: 7,
        }
    }

    #[test]
    fn noiseless_sequences_return_home() {
        let swap = lower_swap(0, 1, SwapStrategy::Optimized, &pair()).unwrap();
        for inter in [None, Some(&swap)] {
            for s in rb_sequences(&[1, 3, 6], 4, inter, 11).unwrap() {
                let p = simulate_segments::<f64>(&s.segments, &NoiseModel::ideal(), &pair())
                    .unwrap()
                    .probabilities();
                assert!((p[0] - 1.0).abs() < 1e-12);
                let per = if inter.is_some() { 2 } else { 1 };
                assert_eq!(s.segments.len(), per * s.length + 1);
            }
        }
    }

    #[test]
    fn arms_share_cliffords() {
        let swap = lower_swap(0, 1, SwapStrategy::SlowOrientation, &pair()).unwrap();
        let a = rb_sequences(&[3], 2, None, 5).unwrap();
        let b = rb_sequences(&[3], 2, Some(&swap), 5).unwrap();
        for (x, y) in a.iter().zip(&b) {
            for i in 0..3 {
                assert_eq!(x.segments[i], y.segments[2 * i]);
                assert_eq!(y.segments[2 * i + 1], swap);
            }
        }
        assert_ne!(a[0].segments, a[1].segments);
    }

    #[test]
    fn non_clifford_interleave_rejected() {
        let t = Circuit::from_gates(2, [Gate::rz(45.0, 0)]).unwrap();
        assert!(matches!(rb_sequences(&[1], 1, Some(&t), 0), Err(Error::NotClifford)));
    }

    #[test]
    fn error_arithmetic() {
        let f = |alpha| DecayFit {
            a: 0.75,
            alpha,
            b: 0.25,
            sigma_alpha: 0.0,
            residual: 0.0,
        };
        assert_eq!(irb_gate_error(&f(0.95), &f(0.95)).unwrap().gate_error, 0.0);
        let e = irb_gate_error(&f(0.95), &f(0.90)).unwrap().gate_error;
        assert!((e - 0.75 * (1.0 - 0.9 / 0.95)).abs() < 1e-15);
        assert!((e - 0.0395).abs() < 1e-4);
        assert!(irb_gate_error(&f(0.0), &f(0.5)).is_err());
    }

    #[test]
    fn noiseless_irb() {
        let swap = lower_swap(0, 1, SwapStrategy::Optimized, &pair()).unwrap();
        let r = run_irb_experiment(&swap, &pair(), &NoiseModel::ideal(), &small()).unwrap();
        assert!(r.gate_error.abs() < 1e-6);
        assert!(r.table.iter().all(|row| (row.reference - 1.0).abs() < 1e-12));
    }

    #[test]
    fn calibration_hits_target() {
        let n = calibrate_depol_2q(&pair(), 0.037, 0.0006, true).unwrap();
        assert!((standard_swap_error(&pair(), &n).unwrap() - 0.037).abs() < 1e-9);
        assert!(n.depol_2q > 0.0 && n.depol_2q < 0.1);
        assert!(calibrate_depol_2q(&pair(), 0.0, 0.0006, true).is_err());
    }

    #[test]
    fn noisy_irb_is_deterministic_and_decays() {
        let noise = NoiseModel {
            depol_1q: 0.001,
            depol_2q: 0.02,
            thermal: true,
            ..NoiseModel::ideal()
        };
        let swap = lower_swap(0, 1, SwapStrategy::Optimized, &pair()).unwrap();
        let a = run_irb_experiment(&swap, &pair(), &noise, &small()).unwrap();
        let b = run_irb_experiment(&swap, &pair(), &noise, &small()).unwrap();
        assert_eq!(a, b);
        assert!(a.alpha_rb.alpha < 1.0 && a.alpha_int.alpha < a.alpha_rb.alpha);
        assert!(a.table.last().unwrap().reference < a.table[0].reference);
    }

    #[test]
    fn shot_sampling_is_seeded() {
        let noise = NoiseModel {
            depol_2q: 0.03,
            shots: Some(8000),
            seed: 3,
            ..NoiseModel::ideal()
        };
        let swap = lower_swap(0, 1, SwapStrategy::Optimized, &pair()).unwrap();
        let a = run_irb_experiment(&swap, &pair(), &noise, &small()).unwrap();
        let b = run_irb_experiment(&swap, &pair(), &noise, &small()).unwrap();
        assert_eq!(a, b);
        let exact = run_irb_experiment(&swap, &pair(), &NoiseModel { shots: None, ..noise }, &small()).unwrap();
        for (s, e) in a.table.iter().zip(&exact.table) {
            assert!((s.reference - e.reference).abs() < 0.02);
        }
    }

    #[test]
    fn entangling_classes_cost_more_under_cr_noise() {
        let noise = NoiseModel {
            depol_2q: 0.02,
            ..NoiseModel::ideal()
        };
        let table = CliffordTable::global();
        let mean_error = |class: CliffordClass| {
            let es: Vec<f64> = table
                .elements()
                .iter()
                .filter(|e| e.class == class)
                .step_by(97)
                .map(|e| average_gate_error(&e.circuit, &e.unitary, &noise, &pair()).unwrap())
                .collect();
            es.iter().sum::<f64>() / es.len() as f64
        };
        let (one, three) = (mean_error(CliffordClass::CnotLike), mean_error(CliffordClass::SwapLike));
        assert!(three > one, "{three} vs {one}");
        assert!(mean_error(CliffordClass::Single) < 1e-15);
    }
}
