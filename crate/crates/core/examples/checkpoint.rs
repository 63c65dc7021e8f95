//! Train briefly with non-ideal devices, save a checkpoint, reload it and
//! confirm the restored network classifies identically.

use rpu_core::harness::{self, Budget};
use rpu_core::mnist::{default_data_dir, load_dataset};
use rpu_core::network::{Network, Trainer};
use rpu_core::StreamKey;

fn main() -> rpu_core::Result<()> {
    let (train, test) = load_dataset(default_data_dir())?;
    let spec = harness::find("fig4b.model3")?
        .remove(0)
        .with_budget(Budget::Smoke);
    let mut trainer = Trainer::new(spec.train_config(), 1)?;
    trainer.train_epoch(&train, 0)?;

    let dir = std::env::temp_dir().join("rpu-checkpoint");
    let net = trainer.into_network();
    net.save_checkpoint(&dir, &[("experiment".into(), spec.name.clone())])?;
    let restored = Network::load_checkpoint(&dir)?;

    let key = StreamKey::root(42);
    let subset = test.head(2000);
    let a = net.evaluate_error(&subset, key)?;
    let b = restored.evaluate_error(&subset, key)?;
    println!("saved to {}", dir.display());
    println!("test error before save {a:.2}%, after reload {b:.2}%");
    let m = restored.confusion(&subset, key)?;
    println!("confusion matrix (rows = true label):");
    for row in m {
        println!(
            "{}",
            row.iter().map(|c| format!("{c:>5}")).collect::<String>()
        );
    }
    Ok(())
}
