use rpu_core::array::{
    DeviceArraySpec, DeviceArrayState, DeviceParams, ReadoutConfig, WeightInit, INCREMENT_FLOOR,
};
use rpu_core::StreamKey;

fn sample(rows: usize, cols: usize, device: DeviceParams, init: WeightInit) -> DeviceArrayState {
    DeviceArrayState::materialize(
        &DeviceArraySpec::new(rows, cols, device),
        &init,
        StreamKey::root(11),
    )
    .unwrap()
}

fn mean_sd(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    (
        m,
        (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt(),
    )
}

/// Mean and standard deviation of N(mu, sd) conditioned on `x >= floor`,
/// by Simpson integration of the density.
fn truncated_moments(mu: f64, sd: f64, floor: f64) -> (f64, f64) {
    let pdf = |x: f64| (-(x - mu).powi(2) / (2.0 * sd * sd)).exp();
    let (a, b) = (floor, mu + 12.0 * sd);
    let n = 200_000;
    let h = (b - a) / n as f64;
    let mut m = [0.0f64; 3];
    for i in 0..=n {
        let x = a + i as f64 * h;
        let w = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let p = w * pdf(x);
        m[0] += p;
        m[1] += p * x;
        m[2] += p * x * x;
    }
    let mean = m[1] / m[0];
    (mean, (m[2] / m[0] - mean * mean).sqrt())
}

#[test]
fn increment_spread_follows_truncated_normal() {
    let sigma = 3.2;
    let a = sample(
        300,
        300,
        DeviceParams {
            sigma_d2d: sigma,
            ..DeviceParams::ideal(1.0)
        },
        WeightInit::Constant(0.0),
    );
    let (mean, sd) = mean_sd(a.dw_up());
    let (want_mean, want_sd) = truncated_moments(1.0, sigma, INCREMENT_FLOOR);
    let se = want_sd / (a.dw_up().len() as f64).sqrt();
    assert!(
        (mean - want_mean).abs() < 4.0 * se,
        "mean {mean} want {want_mean}"
    );
    assert!((sd / want_sd - 1.0).abs() < 0.02, "sd {sd} want {want_sd}");
    assert!(a.dw_up().iter().all(|&v| v >= INCREMENT_FLOOR));
    // without ratio spread, both polarities share the sampled factor
    assert_eq!(a.dw_up(), a.dw_down());
}

#[test]
fn global_asymmetry_scales_down_steps() {
    let a = sample(
        50,
        50,
        DeviceParams {
            asym_down: 0.75,
            ..DeviceParams::ideal(0.002)
        },
        WeightInit::Constant(0.0),
    );
    for (u, d) in a.dw_up().iter().zip(a.dw_down()) {
        assert!((d / u - 0.25).abs() < 1e-12);
        assert!((u - 0.002).abs() < 1e-15);
    }
}

#[test]
fn ratio_spread_is_centred() {
    let a = sample(
        200,
        200,
        DeviceParams {
            sigma_asym: 0.2,
            ..DeviceParams::ideal(1.0)
        },
        WeightInit::Constant(0.0),
    );
    let ratios: Vec<f64> = a
        .dw_up()
        .iter()
        .zip(a.dw_down())
        .map(|(u, d)| u - d)
        .collect();
    let (m, sd) = mean_sd(&ratios);
    assert!(m.abs() < 4.0 * 0.2 / 200.0, "{m}");
    assert!((sd - 0.2).abs() < 0.01, "{sd}");
}

#[test]
fn bound_spread_statistics() {
    let a = sample(
        200,
        200,
        DeviceParams {
            bound: 1.0,
            sigma_bound: 0.3,
            ..DeviceParams::ideal(0.001)
        },
        WeightInit::Uniform(0.1),
    );
    let (hi_m, hi_sd) = mean_sd(a.upper_bounds());
    let (lo_m, _) = mean_sd(a.lower_bounds());
    assert!((hi_m - 1.0).abs() < 0.01 && (lo_m + 1.0).abs() < 0.01);
    assert!((hi_sd - 0.3).abs() < 0.01);
    for ((lo, hi), w) in a
        .lower_bounds()
        .iter()
        .zip(a.upper_bounds())
        .zip(a.weights())
    {
        assert!(lo <= hi && *lo <= *w && w <= hi);
    }
}

#[test]
fn read_noise_has_requested_spread() {
    let a = sample(
        4,
        1000,
        DeviceParams::ideal(0.001),
        WeightInit::Constant(0.0),
    );
    let cfg = ReadoutConfig {
        noise_sigma: 0.1,
        ..ReadoutConfig::ideal()
    };
    let mut rng = StreamKey::root(3).rng();
    let mut all = Vec::new();
    for _ in 0..100 {
        all.extend(
            a.read_forward(&[1.0, 0.0, -1.0, 0.5], &cfg, &mut rng)
                .unwrap(),
        );
    }
    let (m, sd) = mean_sd(&all);
    assert!(m.abs() < 0.002);
    assert!((sd / 0.1 - 1.0).abs() < 0.03, "{sd}");
}

#[test]
fn transpose_read_matches_brute_force() {
    let w: Vec<f64> = (0..64)
        .map(|i| ((i * 37 % 17) as f64 - 8.0) / 10.0)
        .collect();
    let a = sample(
        8,
        8,
        DeviceParams::ideal(0.001),
        WeightInit::Explicit(w.clone()),
    );
    let d: Vec<f64> = (0..8).map(|j| (j as f64 - 3.5) / 4.0).collect();
    let mut rng = StreamKey::root(1).rng();
    let back = a
        .read_backward(&d, &ReadoutConfig::ideal(), &mut rng)
        .unwrap();
    let fwd = a
        .read_forward(&d, &ReadoutConfig::ideal(), &mut rng)
        .unwrap();
    for i in 0..8 {
        let want_back: f64 = (0..8).map(|j| w[i * 8 + j] * d[j]).sum();
        let want_fwd: f64 = (0..8).map(|j| w[j * 8 + i] * d[j]).sum();
        assert!((back[i] - want_back).abs() < 1e-12);
        assert!((fwd[i] - want_fwd).abs() < 1e-12);
    }
}

#[test]
fn clipped_reads_saturate_at_alpha() {
    let a = sample(3, 2, DeviceParams::ideal(0.001), WeightInit::Constant(2.0));
    let cfg = ReadoutConfig {
        alpha_bound: 3.0,
        ..ReadoutConfig::ideal()
    };
    let out = a
        .read_forward(&[1.0, 1.0, -1.0], &cfg, &mut StreamKey::root(0).rng())
        .unwrap();
    assert_eq!(out, vec![2.0, 2.0]);
    let out = a
        .read_forward(&[1.0, 1.0, 1.0], &cfg, &mut StreamKey::root(0).rng())
        .unwrap();
    assert_eq!(out, vec![3.0, 3.0]);
}
