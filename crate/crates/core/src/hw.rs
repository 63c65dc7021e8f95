//! Circuit and system arithmetic for an RPU tile and chip.
//!
//! Everything here is a pure function of [`HwParams`]. Field names carry their
//! units as suffixes (`_mm`, `_ohm`, `_f`, `_nv` for nV/sqrt(Hz), ...).
//!
//! Modeling choices:
//! * Line RC delay is the lumped half-RC product `0.5 (r l)(c l)`.
//! * Operations count two per multiply-accumulate.
//! * The acceptable op-amp input noise follows an integrator scaling
//!   `v = K sqrt(t_meas) (beta - 1) / (beta + 1)`, with `K` calibrated on one
//!   anchor point (`noise_anchor_*`). Only the scaling is modeled; the full
//!   integrator transfer function is not.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::kv::KvDoc;

pub const BOLTZMANN: f64 = 1.380_649e-23;

/// One Table-1 style design point.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignInput {
    pub name: String,
    pub tiles_active: usize,
    pub tiles_total: usize,
    pub power_w: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HwParams {
    pub r_line_ohm_per_um: f64,
    pub c_line_ff_per_um: f64,
    pub line_width_nm: f64,
    pub line_spacing_nm: f64,
    pub f_clock_hz: f64,
    /// Allowed RC delay as a fraction of the pulse width.
    pub delay_fraction: f64,
    /// Allowed IR drop along a line.
    pub drop_fraction: f64,
    pub v_op_v: f64,
    pub activity: f64,
    pub bl: usize,
    pub alpha_bound: f64,
    pub beta: f64,
    pub t_meas_ns: f64,
    pub v_in_v: f64,
    pub v_out_max_v: f64,
    pub input_bits: u32,
    pub adc_bits: u32,
    pub adc_area_mm2: f64,
    pub adc_power_mw: f64,
    pub adc_share: usize,
    pub periphery_reserve_w: f64,
    /// Rounded tile power used for the efficiency figures.
    pub tile_power_w: f64,
    pub temperature_k: f64,
    pub noise_anchor_nv: f64,
    pub noise_anchor_t_ns: f64,
    pub noise_anchor_beta: f64,
    pub cpu_ref_tops: f64,
    pub weight_bound: f64,
    pub dw_min: f64,
    pub storage_levels: f64,
    pub k: f64,
    pub up_down_asymmetry: f64,
    pub designs: Vec<DesignInput>,
}

impl Default for HwParams {
    fn default() -> Self {
        HwParams {
            r_line_ohm_per_um: 0.36,
            c_line_ff_per_um: 0.2,
            line_width_nm: 200.0,
            line_spacing_nm: 200.0,
            f_clock_hz: 1e9,
            delay_fraction: 0.1,
            drop_fraction: 0.1,
            v_op_v: 1.0,
            activity: 0.2,
            bl: 10,
            alpha_bound: 12.0,
            beta: 6.0,
            t_meas_ns: 80.0,
            v_in_v: 1.0,
            v_out_max_v: 1.0,
            input_bits: 5,
            adc_bits: 9,
            adc_area_mm2: 0.0256,
            adc_power_mw: 0.24,
            adc_share: 64,
            periphery_reserve_w: 0.7,
            tile_power_w: 2.0,
            temperature_k: 300.0,
            noise_anchor_nv: 15.1,
            noise_anchor_t_ns: 80.0,
            noise_anchor_beta: 6.0,
            cpu_ref_tops: 0.676,
            weight_bound: 0.3,
            dw_min: 0.001,
            storage_levels: 1000.0,
            k: 0.1,
            up_down_asymmetry: 1.05,
            designs: vec![
                DesignInput {
                    name: "Design 1".into(),
                    tiles_active: 12,
                    tiles_total: 12,
                    power_w: 250.0,
                },
                DesignInput {
                    name: "Design 2".into(),
                    tiles_active: 50,
                    tiles_total: 50,
                    power_w: 250.0,
                },
                DesignInput {
                    name: "Design 3".into(),
                    tiles_active: 1,
                    tiles_total: 100,
                    power_w: 22.0,
                },
            ],
        }
    }
}

macro_rules! scalar_keys {
    ($($key:literal => $field:ident),* $(,)?) => {
        const SCALAR_KEYS: &[&str] = &[$($key),*];

        impl HwParams {
            fn apply_scalars(&mut self, doc: &KvDoc) -> Result<()> {
                $( if let Some(v) = doc.get($key)? { self.$field = v; } )*
                Ok(())
            }

            fn scalars_to(&self, doc: &mut KvDoc) {
                $( doc.set($key, format!("{:?}", self.$field)); )*
            }
        }
    };
}

scalar_keys! {
    "line.r_ohm_per_um" => r_line_ohm_per_um,
    "line.c_ff_per_um" => c_line_ff_per_um,
    "line.width_nm" => line_width_nm,
    "line.spacing_nm" => line_spacing_nm,
    "line.delay_fraction" => delay_fraction,
    "line.drop_fraction" => drop_fraction,
    "clock.hz" => f_clock_hz,
    "array.v_op" => v_op_v,
    "array.activity" => activity,
    "update.bl" => bl,
    "nlf.alpha_bound" => alpha_bound,
    "device.beta" => beta,
    "read.t_meas_ns" => t_meas_ns,
    "read.v_in" => v_in_v,
    "read.v_out_max" => v_out_max_v,
    "io.input_bits" => input_bits,
    "adc.bits" => adc_bits,
    "adc.area_mm2" => adc_area_mm2,
    "adc.power_mw" => adc_power_mw,
    "adc.share" => adc_share,
    "tile.periphery_reserve_w" => periphery_reserve_w,
    "tile.power_w" => tile_power_w,
    "noise.temperature_k" => temperature_k,
    "noise.anchor_nv" => noise_anchor_nv,
    "noise.anchor_t_ns" => noise_anchor_t_ns,
    "noise.anchor_beta" => noise_anchor_beta,
    "system.cpu_ref_tops" => cpu_ref_tops,
    "device.weight_bound" => weight_bound,
    "device.dw_min" => dw_min,
    "device.storage_levels" => storage_levels,
    "device.k" => k,
    "device.up_down_asymmetry" => up_down_asymmetry,
}

impl HwParams {
    pub fn pitch_nm(&self) -> f64 {
        self.line_width_nm + self.line_spacing_nm
    }

    pub fn validate(&self) -> Result<()> {
        let positives = [
            ("r_line", self.r_line_ohm_per_um),
            ("c_line", self.c_line_ff_per_um),
            ("line width", self.line_width_nm),
            ("line spacing", self.line_spacing_nm),
            ("clock", self.f_clock_hz),
            ("v_op", self.v_op_v),
            ("beta", self.beta),
            ("t_meas", self.t_meas_ns),
            ("v_in", self.v_in_v),
            ("v_out_max", self.v_out_max_v),
            ("temperature", self.temperature_k),
            ("tile power", self.tile_power_w),
            ("alpha bound", self.alpha_bound),
            ("dw_min", self.dw_min),
            ("cpu reference", self.cpu_ref_tops),
        ];
        if let Some((name, _)) = positives.iter().find(|(_, v)| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidConfig(format!("{name} must be positive")));
        }
        for (name, v) in [
            ("delay_fraction", self.delay_fraction),
            ("drop_fraction", self.drop_fraction),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::InvalidConfig(format!("{name} must lie in (0, 1)")));
            }
        }
        if !(0.0..=1.0).contains(&self.activity) {
            return Err(Error::InvalidConfig("activity must lie in [0, 1]".into()));
        }
        if self.bl == 0 || self.adc_share == 0 {
            return Err(Error::InvalidConfig(
                "bl and adc.share must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn from_kv(doc: &KvDoc) -> Result<Self> {
        let mut p = HwParams::default();
        p.apply_scalars(doc)?;
        let mut designs = Vec::new();
        for i in 1.. {
            let prefix = format!("design.{i}");
            let Some(name) = doc.get_str(&format!("{prefix}.name")) else {
                break;
            };
            let need = |field: &str| -> Result<String> {
                doc.get_str(&format!("{prefix}.{field}"))
                    .map(str::to_string)
                    .ok_or_else(|| Error::InvalidConfig(format!("{prefix}.{field} missing")))
            };
            let parse = |s: String| -> Result<f64> {
                s.parse()
                    .map_err(|_| Error::InvalidConfig(format!("{prefix}: bad number `{s}`")))
            };
            designs.push(DesignInput {
                name: name.to_string(),
                tiles_active: parse(need("tiles_active")?)? as usize,
                tiles_total: parse(need("tiles_total")?)? as usize,
                power_w: parse(need("power_w")?)?,
            });
        }
        if !designs.is_empty() {
            p.designs = designs;
        }
        for key in doc.keys() {
            if !SCALAR_KEYS.contains(&key) && !key.starts_with("design.") {
                return Err(Error::InvalidConfig(format!(
                    "unknown hardware key `{key}`"
                )));
            }
        }
        p.validate()?;
        Ok(p)
    }

    pub fn to_kv(&self) -> KvDoc {
        let mut doc = KvDoc::default();
        self.scalars_to(&mut doc);
        for (i, d) in self.designs.iter().enumerate() {
            let prefix = format!("design.{}", i + 1);
            doc.set(&format!("{prefix}.name"), &d.name);
            doc.set(&format!("{prefix}.tiles_active"), d.tiles_active);
            doc.set(&format!("{prefix}.tiles_total"), d.tiles_total);
            doc.set(&format!("{prefix}.power_w"), d.power_w);
        }
        doc
    }
}

/// Longest line whose half-RC delay fits the budget.
pub fn line_length_mm(p: &HwParams) -> f64 {
    let delay_s = p.delay_fraction / p.f_clock_hz;
    let rc_per_um2 = p.r_line_ohm_per_um * p.c_line_ff_per_um * 1e-15;
    (2.0 * delay_s / rc_per_um2).sqrt() * 1e-3
}

/// Half-RC delay of a line of the given length.
pub fn line_delay_ns(p: &HwParams, l_mm: f64) -> f64 {
    let l_um = l_mm * 1e3;
    0.5 * (p.r_line_ohm_per_um * l_um) * (p.c_line_ff_per_um * 1e-15 * l_um) * 1e9
}

/// Devices per line: the raw count, or the largest power of two that fits.
pub fn array_size(l_mm: f64, pitch_nm: f64, power_of_two: bool) -> usize {
    let raw = (l_mm * 1e6 / pitch_nm + 1e-9).floor() as usize;
    if !power_of_two || raw == 0 {
        return raw;
    }
    1 << (usize::BITS - 1 - raw.leading_zeros())
}

/// Average device resistance that keeps the line drop `N R_line / R_device`
/// at `drop_fraction`.
pub fn device_resistance_mohm(n: usize, r_line_total_ohm: f64, drop_fraction: f64) -> f64 {
    n as f64 * r_line_total_ohm / drop_fraction * 1e-6
}

/// Power of the positive/negative array pair and the footprint of the
/// stacked pair.
pub fn array_power_area(p: &HwParams, n: usize, r_device_mohm: f64) -> (f64, f64) {
    let n2 = (n * n) as f64;
    let power = 2.0 * n2 * p.v_op_v * p.v_op_v * p.activity / (r_device_mohm * 1e6);
    let side_mm = n as f64 * p.pitch_nm() * 1e-6;
    (power, side_mm * side_mm)
}

/// Integrator output with `n_active` devices contributing.
pub fn opamp_vout(
    n_active: f64,
    v_in: f64,
    t_meas_s: f64,
    r_device_ohm: f64,
    c_int_f: f64,
    beta: f64,
) -> f64 {
    2.0 * n_active * v_in * t_meas_s / (r_device_ohm * c_int_f) * (beta - 1.0) / (beta + 1.0)
}

/// Capacitance that makes [`opamp_vout`] equal `v_out`.
pub fn integration_capacitance(
    n_active: f64,
    v_in: f64,
    t_meas_s: f64,
    r_device_ohm: f64,
    beta: f64,
    v_out: f64,
) -> f64 {
    2.0 * n_active * v_in * t_meas_s / (r_device_ohm * v_out) * (beta - 1.0) / (beta + 1.0)
}

/// Noise density left after removing independent components from the total.
pub fn noise_budget(total_nv: f64, components_nv: &[f64]) -> Result<f64> {
    let used: f64 = components_nv.iter().map(|c| c * c).sum();
    let rem = total_nv * total_nv - used;
    if rem < 0.0 || components_nv.iter().any(|&c| c >= total_nv) {
        return Err(Error::OverBudget {
            total: total_nv,
            used: used.sqrt(),
        });
    }
    Ok(rem.sqrt())
}

/// Johnson noise of all `N` devices on a line in parallel (both arrays when
/// `pair`).
pub fn thermal_noise_nv(r_device_ohm: f64, n: usize, pair: bool, temperature_k: f64) -> f64 {
    let parallel = if pair { 2.0 * n as f64 } else { n as f64 };
    (4.0 * BOLTZMANN * temperature_k * r_device_ohm / parallel).sqrt() * 1e9
}

/// Acceptable op-amp input noise for a given integration time and on/off ratio.
pub fn acceptable_input_noise_nv(p: &HwParams, t_meas_ns: f64, beta: f64) -> f64 {
    let shape = |t: f64, b: f64| t.sqrt() * (b - 1.0) / (b + 1.0);
    p.noise_anchor_nv * shape(t_meas_ns, beta) / shape(p.noise_anchor_t_ns, p.noise_anchor_beta)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TileMetrics {
    pub update_cycle_ns: f64,
    pub update_rate_tups: f64,
    pub update_per_w: f64,
    pub update_per_mm2: f64,
    pub throughput_tops: f64,
    pub throughput_per_w: f64,
    pub throughput_per_mm2: f64,
    pub bandwidth_gbs: f64,
    pub compute_gops: f64,
}

pub fn tile_metrics(p: &HwParams, n: usize, tile_area_mm2: f64) -> TileMetrics {
    let n2 = (n * n) as f64;
    let t_meas_s = p.t_meas_ns * 1e-9;
    // positive and negative phases, BL pulses each
    let update_cycle_s = 2.0 * p.bl as f64 / p.f_clock_hz;
    let update_rate = n2 / update_cycle_s * 1e-12;
    let throughput = 2.0 * n2 / t_meas_s * 1e-12;
    TileMetrics {
        update_cycle_ns: update_cycle_s * 1e9,
        update_rate_tups: update_rate,
        update_per_w: update_rate / p.tile_power_w,
        update_per_mm2: update_rate / tile_area_mm2,
        throughput_tops: throughput,
        throughput_per_w: throughput / p.tile_power_w,
        throughput_per_mm2: throughput / tile_area_mm2,
        bandwidth_gbs: n as f64 * (p.input_bits + p.adc_bits) as f64 / t_meas_s / 8.0 * 1e-9,
        compute_gops: n as f64 / t_meas_s * 1e-9,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table1Row {
    pub name: String,
    pub throughput_tops: f64,
    pub power_w: f64,
    pub efficiency_gops_per_w: f64,
    /// `None` for reference processors.
    pub network_weights: Option<f64>,
    pub acceleration: f64,
}

pub fn design_point(
    name: &str,
    tiles_active: usize,
    tiles_total: usize,
    power_w: f64,
    tile_tops: f64,
    n: usize,
    cpu_ref_tops: f64,
) -> Table1Row {
    let throughput = tiles_active as f64 * tile_tops;
    Table1Row {
        name: name.to_string(),
        throughput_tops: throughput,
        power_w,
        efficiency_gops_per_w: throughput * 1e3 / power_w,
        network_weights: Some((tiles_total * n * n) as f64),
        acceleration: throughput / cpu_ref_tops,
    }
}

/// Published reference processors, reproduced as given.
pub fn reference_rows() -> Vec<Table1Row> {
    vec![
        Table1Row {
            name: "CPU Power8 12 Cores".into(),
            throughput_tops: 0.676,
            power_w: 250.0,
            efficiency_gops_per_w: 0.676e3 / 250.0,
            network_weights: None,
            acceleration: 1.0,
        },
        Table1Row {
            name: "GPU NVidia Tesla K40".into(),
            throughput_tops: 4.3,
            power_w: 242.0,
            efficiency_gops_per_w: 4.3e3 / 242.0,
            network_weights: None,
            acceleration: 4.3 / 0.676,
        },
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table2 {
    pub pulse_duration_ns: f64,
    pub operating_voltage_v: f64,
    pub max_device_area_um2: f64,
    pub r_avg_mohm: f64,
    pub r_max_mohm: f64,
    pub r_min_mohm: f64,
    pub dr_full_kohm: f64,
    pub dr_half_kohm: f64,
    pub storage_levels: f64,
    /// `2 bound / dw_min`, the lower estimate of required states.
    pub min_states: f64,
    pub up_down_asymmetry: f64,
    pub tolerances: Vec<(&'static str, &'static str)>,
}

/// Device specification with the resistance window centred (in conductance)
/// on `r_device` and spanning an on/off ratio `beta`.
pub fn device_spec_table(p: &HwParams, r_device_mohm: f64) -> Table2 {
    let r_min = r_device_mohm * (p.beta + 1.0) / (2.0 * p.beta);
    let r_max = r_device_mohm * (p.beta + 1.0) / 2.0;
    let dr_full = (r_max - r_min) * 1e3 / p.storage_levels;
    Table2 {
        pulse_duration_ns: 1e9 / p.f_clock_hz,
        operating_voltage_v: p.v_op_v,
        max_device_area_um2: (p.line_width_nm * 1e-3).powi(2),
        r_avg_mohm: r_device_mohm,
        r_max_mohm: r_max,
        r_min_mohm: r_min,
        dr_full_kohm: dr_full,
        dr_half_kohm: p.k * dr_full,
        storage_levels: p.storage_levels,
        min_states: 2.0 * p.weight_bound / p.dw_min,
        up_down_asymmetry: p.up_down_asymmetry,
        tolerances: vec![
            ("Average Device Resistance", "7 MOhm"),
            ("Maximum Device Resistance", "7 MOhm"),
            ("Minimum Device Resistance", "7 MOhm"),
            ("Resistance change at +-V_S", "21 kOhm"),
            ("Device up/down asymmetry", "2%"),
        ],
    }
}

/// Every derived quantity, all recomputable from [`HwParams`].
#[derive(Debug, Clone, PartialEq)]
pub struct HwDerived {
    pub l_line_max_mm: f64,
    pub n: usize,
    pub n_raw: usize,
    pub array_side_mm: f64,
    pub line_delay_ns: f64,
    pub r_line_total_ohm: f64,
    pub r_device_mohm: f64,
    pub p_array_w: f64,
    pub a_array_mm2: f64,
    pub acceptable_noise_nv: f64,
    pub c_int_ff: f64,
    pub v_out_v: f64,
    pub thermal_noise_nv: f64,
    pub noise_remainder_nv: f64,
    pub adc_sample_rate_msps: f64,
    pub adc_total_area_unshared_mm2: f64,
    pub adc_total_power_w: f64,
    pub adc_area_shared_mm2: f64,
    pub adc_shared_rate_msps: f64,
    pub tile_power_sum_w: f64,
    pub tile: TileMetrics,
    pub table1: Vec<Table1Row>,
    pub table2: Table2,
}

pub fn derive(p: &HwParams) -> Result<HwDerived> {
    p.validate()?;
    let l_max = line_length_mm(p);
    let n_raw = array_size(l_max, p.pitch_nm(), false);
    let n = array_size(l_max, p.pitch_nm(), true);
    let side = n as f64 * p.pitch_nm() * 1e-6;
    let r_line_total = p.r_line_ohm_per_um * side * 1e3;
    let r_device = device_resistance_mohm(n, r_line_total, p.drop_fraction);
    let (p_array, a_array) = array_power_area(p, n, r_device);
    let t_meas_s = p.t_meas_ns * 1e-9;
    let c_int = integration_capacitance(
        p.alpha_bound,
        p.v_in_v,
        t_meas_s,
        r_device * 1e6,
        p.beta,
        p.v_out_max_v,
    );
    let v_out = opamp_vout(
        p.alpha_bound,
        p.v_in_v,
        t_meas_s,
        r_device * 1e6,
        c_int,
        p.beta,
    );
    let acceptable = acceptable_input_noise_nv(p, p.t_meas_ns, p.beta);
    let thermal = thermal_noise_nv(r_device * 1e6, n, true, p.temperature_k);
    let remainder = noise_budget(acceptable, &[thermal])?;
    let adc_rate = 1e3 / p.t_meas_ns;
    let adc_power = n as f64 * p.adc_power_mw * 1e-3;
    let tile = tile_metrics(p, n, a_array);
    let mut table1 = reference_rows();
    table1.extend(p.designs.iter().map(|d| {
        design_point(
            &d.name,
            d.tiles_active,
            d.tiles_total,
            d.power_w,
            tile.throughput_tops,
            n,
            p.cpu_ref_tops,
        )
    }));
    Ok(HwDerived {
        l_line_max_mm: l_max,
        n,
        n_raw,
        array_side_mm: side,
        line_delay_ns: line_delay_ns(p, side),
        r_line_total_ohm: r_line_total,
        r_device_mohm: r_device,
        p_array_w: p_array,
        a_array_mm2: a_array,
        acceptable_noise_nv: acceptable,
        c_int_ff: c_int * 1e15,
        v_out_v: v_out,
        thermal_noise_nv: thermal,
        noise_remainder_nv: remainder,
        adc_sample_rate_msps: adc_rate,
        adc_total_area_unshared_mm2: n as f64 * p.adc_area_mm2,
        adc_total_power_w: adc_power,
        adc_area_shared_mm2: (n / p.adc_share) as f64 * p.adc_area_mm2,
        adc_shared_rate_msps: adc_rate * p.adc_share as f64,
        tile_power_sum_w: p_array + adc_power + p.periphery_reserve_w,
        tile,
        table1,
        table2: device_spec_table(p, r_device),
    })
}

/// Noise-model curves: acceptable input noise over a beta grid for each
/// integration time.
pub fn noise_curves(p: &HwParams, t_meas_ns: &[f64], betas: &[f64]) -> Vec<(f64, f64, f64)> {
    t_meas_ns
        .iter()
        .flat_map(|&t| {
            betas
                .iter()
                .map(move |&b| (t, b, acceptable_input_noise_nv(p, t, b)))
        })
        .collect()
}

impl HwDerived {
    /// `(quantity, value, unit)` rows in report order.
    pub fn quantities(&self) -> Vec<(&'static str, f64, &'static str)> {
        let t = &self.tile;
        vec![
            ("l_line_max", self.l_line_max_mm, "mm"),
            ("array_side", self.array_side_mm, "mm"),
            ("n_raw", self.n_raw as f64, "devices"),
            ("n", self.n as f64, "devices"),
            ("line_delay", self.line_delay_ns, "ns"),
            ("r_line_total", self.r_line_total_ohm, "Ohm"),
            ("r_device", self.r_device_mohm, "MOhm"),
            ("p_array", self.p_array_w, "W"),
            ("a_array", self.a_array_mm2, "mm2"),
            ("acceptable_noise", self.acceptable_noise_nv, "nV/rtHz"),
            ("c_int", self.c_int_ff, "fF"),
            ("v_out", self.v_out_v, "V"),
            ("thermal_noise", self.thermal_noise_nv, "nV/rtHz"),
            ("noise_remainder", self.noise_remainder_nv, "nV/rtHz"),
            ("adc_sample_rate", self.adc_sample_rate_msps, "MS/s"),
            ("adc_area_unshared", self.adc_total_area_unshared_mm2, "mm2"),
            ("adc_power", self.adc_total_power_w, "W"),
            ("adc_area_shared", self.adc_area_shared_mm2, "mm2"),
            ("adc_shared_rate", self.adc_shared_rate_msps, "MS/s"),
            ("tile_power_sum", self.tile_power_sum_w, "W"),
            ("update_cycle", t.update_cycle_ns, "ns"),
            ("update_rate", t.update_rate_tups, "TeraUpdates/s"),
            ("update_per_w", t.update_per_w, "TeraUpdates/s/W"),
            ("update_per_mm2", t.update_per_mm2, "TeraUpdates/s/mm2"),
            ("throughput", t.throughput_tops, "TeraOps/s"),
            ("throughput_per_w", t.throughput_per_w, "TeraOps/s/W"),
            ("throughput_per_mm2", t.throughput_per_mm2, "TeraOps/s/mm2"),
            ("bandwidth", t.bandwidth_gbs, "GB/s"),
            ("compute", t.compute_gops, "GigaOps/s"),
            ("table2_r_min", self.table2.r_min_mohm, "MOhm"),
            ("table2_r_max", self.table2.r_max_mohm, "MOhm"),
            ("table2_dr_full", self.table2.dr_full_kohm, "kOhm"),
            ("table2_dr_half", self.table2.dr_half_kohm, "kOhm"),
            ("table2_min_states", self.table2.min_states, "states"),
        ]
    }

    pub fn report_text(&self, p: &HwParams) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# RPU hardware design report");
        let _ = writeln!(
            s,
            "# noise model: v_acc = {:.3} nV/rtHz * sqrt(t/{} ns) * g(beta)/g({}), g(b) = (b-1)/(b+1)",
            p.noise_anchor_nv, p.noise_anchor_t_ns, p.noise_anchor_beta
        );
        let _ = writeln!(
            s,
            "# RC model: delay = 0.5 * (r l) * (c l); ops = 2 per MAC"
        );
        let _ = writeln!(s);
        for (name, v, unit) in self.quantities() {
            let _ = writeln!(s, "{name:<22} {v:>14.4} {unit}");
        }
        let _ = writeln!(s);
        let _ = writeln!(
            s,
            "{:<22} {:>12} {:>8} {:>14} {:>14} {:>12}",
            "System", "TeraOps/s", "Power W", "GOps/s/W", "Weights", "vs CPU"
        );
        for r in &self.table1 {
            let weights = r
                .network_weights
                .map_or("-".to_string(), |w| format!("{:.0}M", w / 1e6));
            let _ = writeln!(
                s,
                "{:<22} {:>12.1} {:>8.0} {:>14.1} {:>14} {:>12.1}",
                r.name,
                r.throughput_tops,
                r.power_w,
                r.efficiency_gops_per_w,
                weights,
                r.acceleration
            );
        }
        let t2 = &self.table2;
        let _ = writeln!(s);
        let _ = writeln!(
            s,
            "Pulse duration            {:.3} ns",
            t2.pulse_duration_ns
        );
        let _ = writeln!(
            s,
            "Operating voltage         +-{:.2} V",
            t2.operating_voltage_v
        );
        let _ = writeln!(
            s,
            "Maximum device area       {:.3} um2",
            t2.max_device_area_um2
        );
        let _ = writeln!(s, "Average resistance        {:.2} MOhm", t2.r_avg_mohm);
        let _ = writeln!(s, "Maximum resistance        {:.2} MOhm", t2.r_max_mohm);
        let _ = writeln!(s, "Minimum resistance        {:.2} MOhm", t2.r_min_mohm);
        let _ = writeln!(s, "Change at +-V_S           {:.2} kOhm", t2.dr_full_kohm);
        let _ = writeln!(s, "Change at +-V_S/2         {:.2} kOhm", t2.dr_half_kohm);
        let _ = writeln!(
            s,
            "Storage capacity          {:.0} levels (>= {:.0} required)",
            t2.storage_levels, t2.min_states
        );
        let _ = writeln!(s, "Up/down asymmetry         {:.2}", t2.up_down_asymmetry);
        for (what, tol) in &t2.tolerances {
            let _ = writeln!(s, "  tolerance: {what}: {tol}");
        }
        s
    }

    /// `section,quantity,value,unit` rows, including the Table 1 rows.
    pub fn report_csv(&self) -> String {
        let mut s = String::from("section,quantity,value,unit\n");
        for (name, v, unit) in self.quantities() {
            let _ = writeln!(s, "derived,{name},{v},{unit}");
        }
        for r in &self.table1 {
            let _ = writeln!(
                s,
                "table1,{} throughput,{},TeraOps/s",
                r.name, r.throughput_tops
            );
            let _ = writeln!(s, "table1,{} power,{},W", r.name, r.power_w);
            let _ = writeln!(
                s,
                "table1,{} efficiency,{},GOps/s/W",
                r.name, r.efficiency_gops_per_w
            );
            if let Some(w) = r.network_weights {
                let _ = writeln!(s, "table1,{} weights,{},weights", r.name, w);
            }
            let _ = writeln!(s, "table1,{} acceleration,{},x", r.name, r.acceleration);
        }
        s
    }
}
