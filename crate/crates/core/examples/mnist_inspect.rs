//! Load the MNIST IDX files and print a few digits as ASCII art.
//!
//! Looks in `$MNIST_DIR`, else `data/mnist` (see `scripts/fetch_mnist.sh`),
//! or takes a directory as the first argument.

use rpu_core::mnist::{default_data_dir, load_dataset};

fn main() -> rpu_core::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .map(Into::into)
        .unwrap_or_else(default_data_dir);
    let (train, test) = load_dataset(&dir)?;
    println!(
        "{}: {} training and {} test images of {} pixels",
        dir.display(),
        train.len(),
        test.len(),
        train.pixels_per_image()
    );

    let mut counts = [0usize; 10];
    train.labels().iter().for_each(|&l| counts[l as usize] += 1);
    println!("training label counts: {counts:?}");

    let shades = [' ', '.', ':', 'o', '#'];
    for i in 0..3 {
        println!("\nlabel {}", test.label(i));
        for row in test.raw_image(i).chunks(28) {
            let line: String = row
                .iter()
                .map(|&p| shades[(p as usize * shades.len()) / 256])
                .collect();
            println!("{line}");
        }
    }
    Ok(())
}
