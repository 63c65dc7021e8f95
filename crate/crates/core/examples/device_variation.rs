//! Sample a device array with cycle-to-cycle, device-to-device and bound
//! variation, drive it with repeated updates, and look at how the weights
//! and reads behave.

use rpu_core::array::{DeviceArraySpec, DeviceArrayState, DeviceParams, ReadoutConfig, WeightInit};
use rpu_core::stochastic::{
    stochastic_outer_update, SaturationStats, TranslatorConfig, UpdateScratch,
};
use rpu_core::StreamKey;

fn stats(v: &[f64]) -> (f64, f64, f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let sd = (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt();
    let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (mean, sd, lo, hi)
}

fn main() -> rpu_core::Result<()> {
    let device = DeviceParams {
        sigma_c2c: 0.3,
        sigma_d2d: 0.3,
        bound: 0.6,
        sigma_bound: 0.3,
        asym_down: 0.05,
        sigma_asym: 0.02,
        ..DeviceParams::ideal(0.001)
    };
    let spec = DeviceArraySpec::new(64, 32, device);
    let mut array =
        DeviceArrayState::materialize(&spec, &WeightInit::Uniform(0.1), StreamKey::root(7))?;

    for (name, v) in [
        ("dw_up", array.dw_up()),
        ("dw_down", array.dw_down()),
        ("upper bound", array.upper_bounds()),
        ("lower bound", array.lower_bounds()),
    ] {
        let (m, sd, lo, hi) = stats(v);
        println!("{name:<12} mean {m:>9.5}  sd {sd:>8.5}  range [{lo:.5}, {hi:.5}]");
    }

    // push every weight upward for many cycles; devices stop at their own bound
    let cfg = TranslatorConfig::new(10, 1.0)?;
    let x = vec![0.8; 64];
    let d = vec![0.8; 32];
    let mut sat = SaturationStats::default();
    let mut scratch = UpdateScratch::default();
    for cycle in 0..2000u64 {
        stochastic_outer_update(
            &mut array,
            &x,
            &d,
            &cfg,
            StreamKey::root(8).child(cycle),
            &mut sat,
            &mut scratch,
        )?;
    }
    let at_bound = array
        .weights()
        .iter()
        .zip(array.upper_bounds())
        .filter(|(w, hi)| (*w - *hi).abs() < 1e-12)
        .count();
    println!(
        "\nafter 2000 up cycles: {at_bound} of {} devices sit at their upper bound",
        array.weights().len()
    );

    let mut rng = StreamKey::root(9).rng();
    let input = vec![1.0; 64];
    for (label, readout) in [
        ("ideal read", ReadoutConfig::ideal()),
        (
            "noise 0.1",
            ReadoutConfig {
                noise_sigma: 0.1,
                ..ReadoutConfig::ideal()
            },
        ),
        (
            "|alpha| = 12",
            ReadoutConfig {
                alpha_bound: 12.0,
                ..ReadoutConfig::ideal()
            },
        ),
    ] {
        let out = array.read_forward(&input, &readout, &mut rng)?;
        println!("{label:<14} first outputs {:.3?}", &out[..4]);
    }
    Ok(())
}
