//! Multiply two numbers with coincident pulse streams and compare the
//! Monte Carlo mean against the closed form.
//!
//! ```text
//! cargo run --release --example stochastic_multiply -- 0.6 -0.3
//! ```

use rpu_core::stochastic::{coincidence_counts, expected_update, translate, TranslatorConfig};
use rpu_core::StreamKey;

fn main() -> rpu_core::Result<()> {
    let args: Vec<f64> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let (x, delta) = (
        args.first().copied().unwrap_or(0.6),
        args.get(1).copied().unwrap_or(-0.3),
    );
    let dw_min = 0.001;

    println!("x = {x}, delta = {delta}, dw_min = {dw_min}");
    println!(
        "{:>4} {:>12} {:>12} {:>10}",
        "BL", "mean", "expected", "rel. std"
    );
    for bl in [1usize, 2, 4, 10, 16, 32, 64] {
        let cfg = TranslatorConfig::new(bl, 1.0)?;
        let mut rng = StreamKey::root(bl as u64).rng();
        let trials = 50_000;
        let mut sum = 0.0;
        let mut sum2 = 0.0;
        for _ in 0..trials {
            let a = translate(x, &cfg, &mut rng)?;
            let b = translate(delta, &cfg, &mut rng)?;
            let (and, _) = coincidence_counts(&a, &b)?;
            let change = and as f64 * dw_min * (x * delta).signum();
            sum += change;
            sum2 += change * change;
        }
        let mean = sum / trials as f64;
        let sd = (sum2 / trials as f64 - mean * mean).sqrt();
        let want = expected_update(x, delta, dw_min, &cfg).value;
        println!(
            "{bl:>4} {mean:>12.6} {want:>12.6} {:>10.3}",
            sd / mean.abs()
        );
    }

    let cfg = TranslatorConfig::new(10, 1.0)?;
    let mut rng = StreamKey::root(0).rng();
    let a = translate(x, &cfg, &mut rng)?;
    let b = translate(delta, &cfg, &mut rng)?;
    println!(
        "\nrow stream    {a}\ncolumn stream {b}\ncoincidences  {:?} (and, xor)",
        coincidence_counts(&a, &b)?
    );
    Ok(())
}
