//! Oracle computations shared by the statistical tests and the acceptance
//! gate. Each returns what it measured alongside the reference value.
#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;

use rpu_core::array::{
    CoincidenceCounts, DeviceArraySpec, DeviceArrayState, DeviceParams, WeightInit,
};
use rpu_core::network::{Network, NetworkConfig};
use rpu_core::stochastic::{
    expected_update, stochastic_outer_update, SaturationStats, TranslatorConfig, UpdateScratch,
};
use rpu_core::StreamKey;

pub fn zero_array(rows: usize, cols: usize, device: DeviceParams) -> DeviceArrayState {
    let spec = DeviceArraySpec::new(rows, cols, device);
    DeviceArrayState::materialize(&spec, &WeightInit::Constant(0.0), StreamKey::root(0)).unwrap()
}

pub fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// One update cycle per trial on a fresh 1x1 array; returns the changes.
pub fn single_device_updates(
    x: f64,
    delta: f64,
    device: DeviceParams,
    cfg: &TranslatorConfig,
    trials: u64,
) -> Vec<f64> {
    let base = zero_array(1, 1, device);
    let mut stats = SaturationStats::default();
    let mut scratch = UpdateScratch::default();
    let root = StreamKey::root(2024);
    (0..trials)
        .map(|t| {
            let mut a = base.clone();
            stochastic_outer_update(
                &mut a,
                &[x],
                &[delta],
                cfg,
                root.child(t),
                &mut stats,
                &mut scratch,
            )
            .unwrap();
            a.weight(0, 0)
        })
        .collect()
}

pub struct MeanCheck {
    pub mean: f64,
    pub expected: f64,
    pub standard_error: f64,
}

impl MeanCheck {
    pub fn sigmas(&self) -> f64 {
        (self.mean - self.expected).abs() / self.standard_error
    }
}

/// Monte Carlo mean of 1e5 single-device updates against `BL dw C^2 x delta`.
pub fn monte_carlo_mean() -> MeanCheck {
    let dw = 0.001;
    let cfg = TranslatorConfig::new(10, 1.0).unwrap();
    let (x, delta) = (0.3, -0.4);
    let samples = single_device_updates(x, delta, DeviceParams::ideal(dw), &cfg, 100_000);
    let (mean, _) = mean_std(&samples);
    // each slot coincides with probability q = |x delta|
    let q = (x * delta).abs();
    MeanCheck {
        mean,
        expected: expected_update(x, delta, dw, &cfg).value,
        standard_error: dw * (10.0 * q * (1.0 - q) / samples.len() as f64).sqrt(),
    }
}

/// Relative spread of the update at BL = 4 over that at BL = 16, with the
/// increment scaled as eta / BL so the mean is fixed.
pub fn spread_ratio_bl4_bl16() -> f64 {
    let eta = 0.004;
    let rel = |bl: usize| {
        let cfg = TranslatorConfig::new(bl, 1.0).unwrap();
        let samples = single_device_updates(
            0.5,
            0.5,
            DeviceParams::ideal(eta / bl as f64),
            &cfg,
            100_000,
        );
        let (mean, sd) = mean_std(&samples);
        sd / mean
    };
    rel(4) / rel(16)
}

/// Rank by Gaussian elimination with partial pivoting.
pub fn rank(m: &[Vec<f64>], tol: f64) -> usize {
    let mut a: Vec<Vec<f64>> = m.to_vec();
    let (rows, cols) = (a.len(), a[0].len());
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())) else {
            break;
        };
        if a[p][c].abs() < tol {
            continue;
        }
        a.swap(r, p);
        for i in r + 1..rows {
            let f = a[i][c] / a[r][c];
            for k in c..cols {
                a[i][k] -= f * a[r][k];
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

/// Weight change matrix of one 8x6 update cycle with half-pulse response `k`.
pub fn update_matrix(k: f64, seed: u64) -> Vec<Vec<f64>> {
    let (rows, cols) = (8, 6);
    let mut a = zero_array(
        rows,
        cols,
        DeviceParams {
            k,
            ..DeviceParams::ideal(0.01)
        },
    );
    let mut u = StreamKey::root(seed).rng();
    let x: Vec<f64> = (0..rows).map(|_| 2.0 * u.next_unit() - 1.0).collect();
    let d: Vec<f64> = (0..cols).map(|_| 2.0 * u.next_unit() - 1.0).collect();
    let cfg = TranslatorConfig::new(10, 1.0).unwrap();
    stochastic_outer_update(
        &mut a,
        &x,
        &d,
        &cfg,
        StreamKey::root(seed + 1),
        &mut SaturationStats::default(),
        &mut UpdateScratch::default(),
    )
    .unwrap();
    (0..rows)
        .map(|i| (0..cols).map(|j| a.weight(i, j)).collect())
        .collect()
}

/// Largest rank over 20 random update cycles.
pub fn max_update_rank(k: f64) -> usize {
    (0..20)
        .map(|s| rank(&update_matrix(k, s * 10), 1e-12))
        .max()
        .unwrap()
}

/// Two-sample Kolmogorov-Smirnov statistic.
pub fn ks_statistic(a: &mut [f64], b: &mut [f64]) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let v = a[i].min(b[j]);
        while i < a.len() && a[i] <= v {
            i += 1;
        }
        while j < b.len() && b[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

/// KS statistic between the simulator's aggregated cycle-to-cycle noise and
/// per-coincidence sampling, plus the alpha = 0.01 critical value.
pub fn aggregation_ks() -> (f64, f64) {
    let (dw, sigma, k) = (0.01, 1.5, 0.3);
    let (and, xor) = (3u32, 4u32);
    let device = DeviceParams {
        sigma_c2c: sigma,
        k,
        ..DeviceParams::ideal(dw)
    };
    let base = zero_array(1, 1, device);
    let counts = CoincidenceCounts {
        rows: 1,
        cols: 1,
        and_counts: vec![and],
        xor_counts: vec![xor],
        row_negative: vec![false],
        col_negative: vec![false],
    };
    let n = 4000;
    let mut simulated: Vec<f64> = (0..n)
        .map(|t| {
            let mut a = base.clone();
            a.apply_coincidences(&counts, &mut StreamKey::root(77).child(t).rng())
                .unwrap();
            a.weight(0, 0)
        })
        .collect();
    // reference: every coincidence draws its own noisy step
    let mut rng = StdRng::seed_from_u64(99);
    let mut reference: Vec<f64> = (0..n)
        .map(|_| {
            let full: f64 = (0..and)
                .map(|_| dw * (1.0 + sigma * rng.sample::<f64, _>(StandardNormal)))
                .sum();
            let half: f64 = (0..xor)
                .map(|_| k * dw * (1.0 + sigma * rng.sample::<f64, _>(StandardNormal)))
                .sum();
            full + half
        })
        .collect();
    let d = ks_statistic(&mut simulated, &mut reference);
    let m = n as f64;
    (d, 1.628 * ((m + m) / (m * m)).sqrt())
}

pub fn toy_config() -> NetworkConfig {
    NetworkConfig {
        layer_sizes: vec![6, 4, 3, 2],
        init_scale: 0.8,
        ..NetworkConfig::default()
    }
}

pub fn toy_input() -> Vec<f64> {
    vec![0.1, 0.9, 0.4, 0.0, 0.7, 0.3]
}

/// Worst relative gap between backprop and central differences on a
/// 6-4-3-2 network.
pub fn gradient_check() -> f64 {
    let mut net = Network::baseline(toy_config(), StreamKey::root(4)).unwrap();
    let (x, label) = (toy_input(), 1);
    let key = StreamKey::root(0);
    let grads = net.gradients(&x, label, key).unwrap();
    let h = 1e-6;
    let mut worst = 0.0f64;
    for l in 0..3 {
        let w0 = net.layers()[l].weights().to_vec();
        for idx in 0..w0.len() {
            let mut w = w0.clone();
            w[idx] += h;
            net.layers_mut()[l].set_weights(&w).unwrap();
            let up = net.loss(&x, label, key).unwrap();
            w[idx] -= 2.0 * h;
            net.layers_mut()[l].set_weights(&w).unwrap();
            let down = net.loss(&x, label, key).unwrap();
            net.layers_mut()[l].set_weights(&w0).unwrap();
            let numeric = (up - down) / (2.0 * h);
            let analytic = grads[l][idx];
            let rel = (numeric - analytic).abs() / numeric.abs().max(analytic.abs()).max(1e-3);
            worst = worst.max(rel);
        }
    }
    worst
}
