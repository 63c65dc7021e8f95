//! Train the 784-256-128-10 network on MNIST, either with exact floating-point
//! updates or with stochastic pulse updates on ideal devices.
//!
//! ```text
//! cargo run --release --example train_mnist -- [baseline|stochastic] [epochs] [bl]
//! ```

use rpu_core::network::{train, GainRule, LrSchedule, TrainConfig, TrainMode};
use rpu_core::{load_dataset, DeviceParams};

fn main() -> rpu_core::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let mode = args.first().map(String::as_str).unwrap_or("baseline");
    let epochs: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let bl: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(10);

    let (train_set, test_set) = load_dataset(rpu_core::mnist::default_data_dir())?;
    let mut config = TrainConfig::reference_baseline();
    config.epochs = epochs;
    config.schedule = LrSchedule::constant(0.01, epochs)?;
    if mode == "stochastic" {
        config.mode = TrainMode::Stochastic {
            bl,
            rule: GainRule::MatchedIncrement,
            device: DeviceParams::ideal(0.001),
        };
    }

    let start = std::time::Instant::now();
    let run = train(&config, &train_set, &test_set, 1)?;
    for rec in &run.epochs {
        println!(
            "epoch {:>2}  eta {:.4}  test error {:>5.2}%  saturated {:.4}  {:.1}s",
            rec.epoch, rec.eta, rec.test_error, rec.saturation_fraction, rec.wallclock_s
        );
    }
    println!("total {:.1}s", start.elapsed().as_secs_f64());
    Ok(())
}
