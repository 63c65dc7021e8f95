//! Derive the tile and chip figures from the default circuit parameters,
//! then explore how the acceptable op-amp noise depends on the integration
//! time and on/off ratio, and what a slower clock does to the array size.

use rpu_core::hw::{self, HwParams};

fn main() -> rpu_core::Result<()> {
    let params = HwParams::default();
    let derived = hw::derive(&params)?;
    print!("{}", derived.report_text(&params));

    println!("\nacceptable input noise (nV/rtHz)");
    let betas = [2.0, 4.0, 6.0, 10.0, 100.0];
    print!("{:>10}", "t_meas");
    betas.iter().for_each(|b| print!("{:>9}", format!("b={b}")));
    println!();
    for t in [20.0, 80.0, 160.0] {
        print!("{:>8}ns", t);
        for (_, _, v) in hw::noise_curves(&params, &[t], &betas) {
            print!("{v:>9.2}");
        }
        println!();
    }

    let slow = HwParams {
        f_clock_hz: 0.25e9,
        ..params.clone()
    };
    let d = hw::derive(&slow)?;
    println!(
        "\nat a 250 MHz clock: line {:.2} mm, N = {}, R_device {:.1} MOhm, {:.1} TeraOps/s per tile",
        d.l_line_max_mm, d.n, d.r_device_mohm, d.tile.throughput_tops
    );

    match hw::noise_budget(
        derived.acceptable_noise_nv,
        &[derived.thermal_noise_nv, 14.0],
    ) {
        Ok(rem) => println!("remaining after a 14 nV/rtHz op-amp: {rem:.2}"),
        Err(e) => println!("a 14 nV/rtHz op-amp does not fit: {e}"),
    }
    Ok(())
}
