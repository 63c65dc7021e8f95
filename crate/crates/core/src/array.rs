//! Weight matrices stored on arrays of resistive devices.
//!
//! A [`DeviceArrayState`] holds the weight of every cross-point together with
//! the per-device quantities sampled once at fabrication time: the up and down
//! increment per coincidence and the lower and upper weight bounds. All of it
//! lives in the weight domain; conductances only show up in [`crate::hw`].

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::rng::{CounterRng, StreamKey};

/// Lower truncation point for sampled increments, as a fraction of the mean.
pub const INCREMENT_FLOOR: f64 = 0.01;

/// Device behaviour shared by every cross-point of an array.
///
/// Variations are relative standard deviations (1.0 = 100% of the mean).
/// `asym_up` and `asym_down` are fractional weakenings: `asym_down = 0.25`
/// makes every down step 75% of the nominal increment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviceParams {
    pub dw_min: f64,
    pub sigma_c2c: f64,
    pub sigma_d2d: f64,
    /// Weight magnitude bound; `f64::INFINITY` disables clipping.
    pub bound: f64,
    pub sigma_bound: f64,
    pub asym_up: f64,
    pub asym_down: f64,
    /// Device-to-device spread of the up/down increment ratio.
    pub sigma_asym: f64,
    /// Half-voltage response relative to a full coincidence.
    pub k: f64,
}

impl DeviceParams {
    /// Symmetric, noiseless, unbounded device with increment `dw_min`.
    pub fn ideal(dw_min: f64) -> Self {
        DeviceParams {
            dw_min,
            sigma_c2c: 0.0,
            sigma_d2d: 0.0,
            bound: f64::INFINITY,
            sigma_bound: 0.0,
            asym_up: 0.0,
            asym_down: 0.0,
            sigma_asym: 0.0,
            k: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidConfig(what.to_string()));
        if !(self.dw_min > 0.0 && self.dw_min.is_finite()) {
            return bad("dw_min must be positive and finite");
        }
        for (name, v) in [
            ("sigma_c2c", self.sigma_c2c),
            ("sigma_d2d", self.sigma_d2d),
            ("sigma_bound", self.sigma_bound),
            ("sigma_asym", self.sigma_asym),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be finite and >= 0"
                )));
            }
        }
        if !(self.bound > 0.0) {
            return bad("bound must be positive");
        }
        for (name, v) in [("asym_up", self.asym_up), ("asym_down", self.asym_down)] {
            if !(0.0..1.0).contains(&v) {
                return Err(Error::InvalidConfig(format!("{name} must lie in [0, 1)")));
            }
        }
        if !(0.0..=1.0).contains(&self.k) {
            return bad("k must lie in [0, 1]");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviceArraySpec {
    pub rows: usize,
    pub cols: usize,
    pub device: DeviceParams,
}

impl DeviceArraySpec {
    pub fn new(rows: usize, cols: usize, device: DeviceParams) -> Self {
        DeviceArraySpec { rows, cols, device }
    }

    pub fn validate(&self) -> Result<()> {
        if self.rows == 0 || self.cols == 0 {
            return Err(Error::InvalidConfig(
                "array dimensions must be positive".into(),
            ));
        }
        self.device.validate()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum WeightInit {
    /// Uniform in `[-half_width, half_width]`.
    Uniform(f64),
    Constant(f64),
    /// Row-major values, `rows * cols` of them.
    Explicit(Vec<f64>),
}

impl Default for WeightInit {
    fn default() -> Self {
        WeightInit::Uniform(0.1)
    }
}

/// Analog read path settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReadoutConfig {
    /// Additive Gaussian noise on every read result.
    pub noise_sigma: f64,
    /// Symmetric clip on read results; infinite when off.
    pub alpha_bound: f64,
    /// Number of time-quantization levels for inputs; 0 keeps inputs continuous.
    pub input_pulses: u32,
}

impl Default for ReadoutConfig {
    fn default() -> Self {
        ReadoutConfig::ideal()
    }
}

impl ReadoutConfig {
    pub const fn ideal() -> Self {
        ReadoutConfig {
            noise_sigma: 0.0,
            alpha_bound: f64::INFINITY,
            input_pulses: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(Error::InvalidConfig(
                "noise_sigma must be finite and >= 0".into(),
            ));
        }
        if !(self.alpha_bound > 0.0) {
            return Err(Error::InvalidConfig("alpha_bound must be positive".into()));
        }
        Ok(())
    }

    /// Time-encoded input value.
    #[inline]
    pub fn quantize(&self, v: f64) -> f64 {
        if self.input_pulses == 0 {
            return v;
        }
        let levels = self.input_pulses as f64;
        let mag = (v.abs() * levels).round().min(levels) / levels;
        mag.copysign(v)
    }

    #[inline]
    fn finish(&self, acc: f64, rng: &mut CounterRng) -> f64 {
        let noisy = if self.noise_sigma > 0.0 {
            let z: f64 = rng.sample(StandardNormal);
            acc + self.noise_sigma * z
        } else {
            acc
        };
        noisy.clamp(-self.alpha_bound, self.alpha_bound)
    }
}

/// Direction of a weight change, chosen by the product of the row and
/// column signs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Up,
    Down,
}

impl Direction {
    #[inline]
    pub fn from_signs(row_negative: bool, col_negative: bool) -> Self {
        if row_negative == col_negative {
            Direction::Up
        } else {
            Direction::Down
        }
    }
}

/// Coincidence statistics for one update cycle, dense and row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CoincidenceCounts {
    pub rows: usize,
    pub cols: usize,
    pub and_counts: Vec<u32>,
    pub xor_counts: Vec<u32>,
    /// `true` where the row value is negative.
    pub row_negative: Vec<bool>,
    pub col_negative: Vec<bool>,
}

impl CoincidenceCounts {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CoincidenceCounts {
            rows,
            cols,
            and_counts: vec![0; rows * cols],
            xor_counts: vec![0; rows * cols],
            row_negative: vec![false; rows],
            col_negative: vec![false; cols],
        }
    }
}

/// One row or column stream ready to be applied: packed pulse bits plus the
/// sign of the value it encodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LinePulses {
    pub bits: u64,
    pub negative: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeviceArrayState {
    rows: usize,
    cols: usize,
    device: DeviceParams,
    weights: Vec<f64>,
    dw_up: Vec<f64>,
    dw_down: Vec<f64>,
    b_lo: Vec<f64>,
    b_hi: Vec<f64>,
}

fn truncated_normal(rng: &mut CounterRng, mean: f64, sd: f64, floor: f64) -> f64 {
    if sd == 0.0 {
        return mean.max(floor);
    }
    loop {
        let z: f64 = rng.sample(StandardNormal);
        let v = mean + sd * z;
        if v >= floor {
            return v;
        }
    }
}

impl DeviceArrayState {
    /// Sample every device of `spec` and initialize the weights.
    pub fn materialize(spec: &DeviceArraySpec, init: &WeightInit, key: StreamKey) -> Result<Self> {
        spec.validate()?;
        let DeviceArraySpec { rows, cols, device } = *spec;
        let n = rows * cols;

        let mut dev_rng = key.child(0).rng();
        let mut dw_up = Vec::with_capacity(n);
        let mut dw_down = Vec::with_capacity(n);
        let up_mean = device.dw_min * (1.0 - device.asym_up);
        let down_mean = device.dw_min * (1.0 - device.asym_down);
        for _ in 0..n {
            let base = truncated_normal(&mut dev_rng, 1.0, device.sigma_d2d, INCREMENT_FLOOR);
            // split a ratio deviation `a` evenly between the two polarities so
            // up/down ~ 1 + a while their average stays at `base`
            let (up_f, down_f) = if device.sigma_asym > 0.0 {
                loop {
                    let z: f64 = dev_rng.sample(StandardNormal);
                    let a = device.sigma_asym * z;
                    let (u, d) = (1.0 + 0.5 * a, 1.0 - 0.5 * a);
                    if u >= INCREMENT_FLOOR && d >= INCREMENT_FLOOR {
                        break (u, d);
                    }
                }
            } else {
                (1.0, 1.0)
            };
            dw_up.push(up_mean * base * up_f);
            dw_down.push(down_mean * base * down_f);
        }

        let mut b_lo = vec![-device.bound; n];
        let mut b_hi = vec![device.bound; n];
        if device.bound.is_finite() && device.sigma_bound > 0.0 {
            let mut bound_rng = key.child(1).rng();
            let sd = device.sigma_bound * device.bound;
            for (lo, hi) in b_lo.iter_mut().zip(b_hi.iter_mut()) {
                let zh: f64 = bound_rng.sample(StandardNormal);
                let zl: f64 = bound_rng.sample(StandardNormal);
                let mut h = device.bound + sd * zh;
                let mut l = -device.bound + sd * zl;
                if h < l {
                    std::mem::swap(&mut h, &mut l);
                }
                *lo = l;
                *hi = h;
            }
        }

        let weights = match init {
            WeightInit::Uniform(half) => {
                let mut w_rng = key.child(2).rng();
                (0..n)
                    .map(|_| (2.0 * w_rng.next_unit() - 1.0) * half)
                    .collect()
            }
            WeightInit::Constant(c) => vec![*c; n],
            WeightInit::Explicit(v) => {
                if v.len() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        actual: v.len(),
                    });
                }
                v.clone()
            }
        };

        let mut state = DeviceArrayState {
            rows,
            cols,
            device,
            weights,
            dw_up,
            dw_down,
            b_lo,
            b_hi,
        };
        state.clip_all();
        Ok(state)
    }

    fn clip_all(&mut self) {
        for ((w, lo), hi) in self.weights.iter_mut().zip(&self.b_lo).zip(&self.b_hi) {
            *w = w.clamp(*lo, *hi);
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn device(&self) -> &DeviceParams {
        &self.device
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, row: usize, col: usize) -> f64 {
        self.weights[row * self.cols + col]
    }

    pub fn dw_up(&self) -> &[f64] {
        &self.dw_up
    }

    pub fn dw_down(&self) -> &[f64] {
        &self.dw_down
    }

    pub fn lower_bounds(&self) -> &[f64] {
        &self.b_lo
    }

    pub fn upper_bounds(&self) -> &[f64] {
        &self.b_hi
    }

    /// Overwrite all weights, clipping into each device's range.
    pub fn set_weights(&mut self, weights: &[f64]) -> Result<()> {
        if weights.len() != self.weights.len() {
            return Err(Error::DimensionMismatch {
                expected: self.weights.len(),
                actual: weights.len(),
            });
        }
        self.weights.copy_from_slice(weights);
        self.clip_all();
        Ok(())
    }

    /// Rescale every sampled increment so that the nominal mean becomes
    /// `dw_min`. Relative device variations are preserved.
    pub fn rescale_increments(&mut self, dw_min: f64) {
        let f = dw_min / self.device.dw_min;
        if f == 1.0 {
            return;
        }
        self.dw_up.iter_mut().for_each(|v| *v *= f);
        self.dw_down.iter_mut().for_each(|v| *v *= f);
        self.device.dw_min = dw_min;
    }

    pub fn read_forward(
        &self,
        x: &[f64],
        cfg: &ReadoutConfig,
        rng: &mut CounterRng,
    ) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.cols];
        self.read_forward_into(x, cfg, rng, &mut out)?;
        Ok(out)
    }

    /// `out[j] = clip(sum_i W[i][j] q(x[i]) + noise)`.
    pub fn read_forward_into(
        &self,
        x: &[f64],
        cfg: &ReadoutConfig,
        rng: &mut CounterRng,
        out: &mut [f64],
    ) -> Result<()> {
        if x.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                actual: x.len(),
            });
        }
        if out.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                actual: out.len(),
            });
        }
        out.fill(0.0);
        for (xi, row) in x.iter().zip(self.weights.chunks_exact(self.cols)) {
            let v = cfg.quantize(*xi);
            if v == 0.0 {
                continue;
            }
            for (o, w) in out.iter_mut().zip(row) {
                *o += w * v;
            }
        }
        for o in out.iter_mut() {
            *o = cfg.finish(*o, rng);
        }
        Ok(())
    }

    pub fn read_backward(
        &self,
        delta: &[f64],
        cfg: &ReadoutConfig,
        rng: &mut CounterRng,
    ) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.rows];
        self.read_backward_into(delta, cfg, rng, &mut out)?;
        Ok(out)
    }

    /// Transpose read: `out[i] = clip(sum_j W[i][j] q(delta[j]) + noise)`.
    pub fn read_backward_into(
        &self,
        delta: &[f64],
        cfg: &ReadoutConfig,
        rng: &mut CounterRng,
        out: &mut [f64],
    ) -> Result<()> {
        if delta.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                actual: delta.len(),
            });
        }
        if out.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                actual: out.len(),
            });
        }
        let quantized: Vec<f64>;
        let d: &[f64] = if cfg.input_pulses > 0 {
            quantized = delta.iter().map(|v| cfg.quantize(*v)).collect();
            &quantized
        } else {
            delta
        };
        for (o, row) in out.iter_mut().zip(self.weights.chunks_exact(self.cols)) {
            let acc: f64 = row.iter().zip(d).map(|(w, v)| w * v).sum();
            *o = cfg.finish(acc, rng);
        }
        Ok(())
    }

    /// Exact floating-point rank-one update `W += scale * x * delta^T`,
    /// clipped into the device bounds.
    pub fn apply_outer_product(&mut self, x: &[f64], delta: &[f64], scale: f64) -> Result<()> {
        if x.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                actual: x.len(),
            });
        }
        if delta.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                actual: delta.len(),
            });
        }
        let bounded = self.device.bound.is_finite();
        for (i, xi) in x.iter().enumerate() {
            let f = scale * xi;
            if f == 0.0 {
                continue;
            }
            let base = i * self.cols;
            let row = &mut self.weights[base..base + self.cols];
            for (w, d) in row.iter_mut().zip(delta) {
                *w += f * d;
            }
            if bounded {
                for (j, w) in row.iter_mut().enumerate() {
                    *w = w.clamp(self.b_lo[base + j], self.b_hi[base + j]);
                }
            }
        }
        Ok(())
    }

    #[inline(always)]
    fn pulse(&mut self, idx: usize, and: u32, xor: u32, dir: Direction, rng: &mut CounterRng) {
        let k = self.device.k;
        let events = and as f64 + k * xor as f64;
        if events == 0.0 {
            return;
        }
        let dw = match dir {
            Direction::Up => self.dw_up[idx],
            Direction::Down => self.dw_down[idx],
        };
        let mut change = events * dw;
        if self.device.sigma_c2c > 0.0 {
            // sum of per-event Gaussian draws, sampled in one shot
            let var_events = and as f64 + k * k * xor as f64;
            let z: f64 = rng.sample(StandardNormal);
            change += self.device.sigma_c2c * dw * var_events.sqrt() * z;
        }
        let w = match dir {
            Direction::Up => self.weights[idx] + change,
            Direction::Down => self.weights[idx] - change,
        };
        self.weights[idx] = w.clamp(self.b_lo[idx], self.b_hi[idx]);
    }

    /// Apply precomputed coincidence counts element by element.
    ///
    /// Noise draws are consumed in row-major order over elements that see at
    /// least one event, the same order [`Self::apply_line_pulses`] uses.
    pub fn apply_coincidences(
        &mut self,
        counts: &CoincidenceCounts,
        rng: &mut CounterRng,
    ) -> Result<()> {
        if counts.rows != self.rows || counts.cols != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                actual: counts.rows * counts.cols,
            });
        }
        let n = self.rows * self.cols;
        if counts.and_counts.len() != n || counts.xor_counts.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: counts.and_counts.len(),
            });
        }
        if counts.row_negative.len() != self.rows || counts.col_negative.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows + self.cols,
                actual: counts.row_negative.len() + counts.col_negative.len(),
            });
        }
        for i in 0..self.rows {
            for j in 0..self.cols {
                let idx = i * self.cols + j;
                let dir = Direction::from_signs(counts.row_negative[i], counts.col_negative[j]);
                self.pulse(
                    idx,
                    counts.and_counts[idx],
                    counts.xor_counts[idx],
                    dir,
                    rng,
                );
            }
        }
        Ok(())
    }

    /// Apply one update cycle given the packed row and column streams.
    ///
    /// Equivalent to computing [`CoincidenceCounts`] with AND/XOR popcounts
    /// and calling [`Self::apply_coincidences`], but skips silent lines.
    pub fn apply_line_pulses(
        &mut self,
        rows: &[LinePulses],
        cols: &[LinePulses],
        rng: &mut CounterRng,
    ) -> Result<()> {
        if rows.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                actual: rows.len(),
            });
        }
        if cols.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                actual: cols.len(),
            });
        }
        let active_cols: Vec<usize> = (0..self.cols).filter(|&j| cols[j].bits != 0).collect();
        let half_pulses = self.device.k > 0.0;
        for (i, r) in rows.iter().enumerate() {
            let base = i * self.cols;
            if r.bits == 0 || !half_pulses {
                // without half-pulse response only columns that fire matter;
                // a silent row only sees column half pulses
                if r.bits == 0 && !half_pulses {
                    continue;
                }
                for &j in &active_cols {
                    let c = cols[j];
                    let and = (r.bits & c.bits).count_ones();
                    let xor = (r.bits ^ c.bits).count_ones();
                    self.pulse(
                        base + j,
                        and,
                        xor,
                        Direction::from_signs(r.negative, c.negative),
                        rng,
                    );
                }
            } else {
                for (j, c) in cols.iter().enumerate() {
                    let and = (r.bits & c.bits).count_ones();
                    let xor = (r.bits ^ c.bits).count_ones();
                    self.pulse(
                        base + j,
                        and,
                        xor,
                        Direction::from_signs(r.negative, c.negative),
                        rng,
                    );
                }
            }
        }
        Ok(())
    }

    /// Write a text snapshot: a header line, dimensions, then five row-major
    /// sections (weights, dw_up, dw_down, b_lo, b_hi). Values round-trip exactly.
    pub fn write_snapshot<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let d = &self.device;
        writeln!(out, "rpu-array v1")?;
        writeln!(out, "dims {} {}", self.rows, self.cols)?;
        writeln!(
            out,
            "device {} {} {} {} {} {} {} {} {}",
            d.dw_min,
            d.sigma_c2c,
            d.sigma_d2d,
            d.bound,
            d.sigma_bound,
            d.asym_up,
            d.asym_down,
            d.sigma_asym,
            d.k
        )?;
        for (name, data) in [
            ("weights", &self.weights),
            ("dw_up", &self.dw_up),
            ("dw_down", &self.dw_down),
            ("b_lo", &self.b_lo),
            ("b_hi", &self.b_hi),
        ] {
            writeln!(out, "{name}")?;
            let mut line = String::new();
            for row in data.chunks_exact(self.cols) {
                line.clear();
                for (j, v) in row.iter().enumerate() {
                    if j > 0 {
                        line.push(' ');
                    }
                    let _ = write!(line, "{v:?}");
                }
                writeln!(out, "{line}")?;
            }
        }
        Ok(())
    }

    pub fn read_snapshot<R: BufRead>(input: R) -> Result<Self> {
        let bad = |m: &str| Error::Checkpoint(m.to_string());
        let mut lines = input.lines();
        let mut next = || -> Result<String> {
            lines
                .next()
                .ok_or_else(|| bad("unexpected end of snapshot"))?
                .map_err(|e| Error::Checkpoint(e.to_string()))
        };
        if next()?.trim() != "rpu-array v1" {
            return Err(bad("missing header"));
        }
        let dims = next()?;
        let dims: Vec<usize> = dims
            .strip_prefix("dims ")
            .ok_or_else(|| bad("missing dims"))?
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| bad("bad dims")))
            .collect::<Result<_>>()?;
        let [rows, cols] = dims[..] else {
            return Err(bad("dims needs two values"));
        };
        let dev = next()?;
        let dv: Vec<f64> = dev
            .strip_prefix("device ")
            .ok_or_else(|| bad("missing device line"))?
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| bad("bad device value")))
            .collect::<Result<_>>()?;
        let [dw_min, sigma_c2c, sigma_d2d, bound, sigma_bound, asym_up, asym_down, sigma_asym, k] =
            dv[..]
        else {
            return Err(bad("device line needs nine values"));
        };
        let device = DeviceParams {
            dw_min,
            sigma_c2c,
            sigma_d2d,
            bound,
            sigma_bound,
            asym_up,
            asym_down,
            sigma_asym,
            k,
        };
        let mut sections: Vec<Vec<f64>> = Vec::with_capacity(5);
        for name in ["weights", "dw_up", "dw_down", "b_lo", "b_hi"] {
            if next()?.trim() != name {
                return Err(Error::Checkpoint(format!("expected section `{name}`")));
            }
            let mut data = Vec::with_capacity(rows * cols);
            for _ in 0..rows {
                let line = next()?;
                let before = data.len();
                for t in line.split_whitespace() {
                    data.push(t.parse::<f64>().map_err(|_| bad("bad matrix value"))?);
                }
                if data.len() - before != cols {
                    return Err(bad("row length does not match dims"));
                }
            }
            sections.push(data);
        }
        let mut it = sections.into_iter();
        let mut take = || it.next().expect("five sections");
        Ok(DeviceArrayState {
            rows,
            cols,
            device,
            weights: take(),
            dw_up: take(),
            dw_down: take(),
            b_lo: take(),
            b_hi: take(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key() -> StreamKey {
        StreamKey::root(11)
    }

    fn identity(n: usize) -> Vec<f64> {
        (0..n * n)
            .map(|i| if i / n == i % n { 1.0 } else { 0.0 })
            .collect()
    }

    #[test]
    fn ideal_devices_are_identical() {
        let spec = DeviceArraySpec::new(
            5,
            7,
            DeviceParams {
                bound: 0.4,
                ..DeviceParams::ideal(0.002)
            },
        );
        let s = DeviceArrayState::materialize(&spec, &WeightInit::default(), key()).unwrap();
        assert!(s.dw_up().iter().all(|&v| v == 0.002));
        assert!(s.dw_down().iter().all(|&v| v == 0.002));
        assert!(s.lower_bounds().iter().all(|&v| v == -0.4));
        assert!(s.upper_bounds().iter().all(|&v| v == 0.4));
    }

    #[test]
    fn global_down_weakening() {
        let dev = DeviceParams {
            asym_down: 0.75,
            ..DeviceParams::ideal(0.001)
        };
        let s = DeviceArrayState::materialize(
            &DeviceArraySpec::new(10, 10, dev),
            &WeightInit::Constant(0.0),
            key(),
        )
        .unwrap();
        let up: f64 = s.dw_up().iter().sum::<f64>() / 100.0;
        let down: f64 = s.dw_down().iter().sum::<f64>() / 100.0;
        assert!((down - 0.25 * up).abs() < 1e-15);
    }

    #[test]
    fn invalid_device_rejected() {
        let mut dev = DeviceParams::ideal(0.001);
        dev.k = 1.5;
        assert!(dev.validate().is_err());
        dev.k = 0.0;
        dev.sigma_c2c = -0.1;
        assert!(dev.validate().is_err());
        assert!(DeviceParams::ideal(0.0).validate().is_err());
        assert!(DeviceArraySpec::new(0, 3, DeviceParams::ideal(0.1))
            .validate()
            .is_err());
    }

    #[test]
    fn identity_forward_and_backward() {
        let spec = DeviceArraySpec::new(4, 4, DeviceParams::ideal(0.01));
        let s = DeviceArrayState::materialize(&spec, &WeightInit::Explicit(identity(4)), key())
            .unwrap();
        let x = [0.3, -0.2, 0.9, 0.0];
        let mut rng = key().rng();
        assert_eq!(
            s.read_forward(&x, &ReadoutConfig::ideal(), &mut rng)
                .unwrap(),
            x.to_vec()
        );
        assert_eq!(
            s.read_backward(&x, &ReadoutConfig::ideal(), &mut rng)
                .unwrap(),
            x.to_vec()
        );
    }

    #[test]
    fn backward_unit_vector_picks_row() {
        let w: Vec<f64> = (0..12).map(|v| v as f64 * 0.1).collect();
        let spec = DeviceArraySpec::new(3, 4, DeviceParams::ideal(0.01));
        let s =
            DeviceArrayState::materialize(&spec, &WeightInit::Explicit(w.clone()), key()).unwrap();
        let mut rng = key().rng();
        let e2 = [0.0, 0.0, 1.0, 0.0];
        let got = s
            .read_backward(&e2, &ReadoutConfig::ideal(), &mut rng)
            .unwrap();
        assert_eq!(got, vec![w[2], w[6], w[10]]);
    }

    #[test]
    fn alpha_clip_is_exact() {
        let spec = DeviceArraySpec::new(2, 2, DeviceParams::ideal(0.01));
        let s = DeviceArrayState::materialize(
            &spec,
            &WeightInit::Explicit(vec![5.0, -5.0, 0.0, 1.0]),
            key(),
        )
        .unwrap();
        let cfg = ReadoutConfig {
            alpha_bound: 3.0,
            ..ReadoutConfig::ideal()
        };
        let y = s.read_forward(&[1.0, 1.0], &cfg, &mut key().rng()).unwrap();
        assert_eq!(y, vec![3.0, -3.0]);
    }

    #[test]
    fn dimension_mismatch() {
        let spec = DeviceArraySpec::new(3, 2, DeviceParams::ideal(0.01));
        let s = DeviceArrayState::materialize(&spec, &WeightInit::default(), key()).unwrap();
        let mut rng = key().rng();
        assert!(matches!(
            s.read_forward(&[1.0, 2.0], &ReadoutConfig::ideal(), &mut rng),
            Err(Error::DimensionMismatch {
                expected: 3,
                actual: 2
            })
        ));
        assert!(s
            .read_backward(&[1.0], &ReadoutConfig::ideal(), &mut rng)
            .is_err());
    }

    #[test]
    fn input_quantization_levels() {
        let cfg = ReadoutConfig {
            input_pulses: 20,
            ..ReadoutConfig::ideal()
        };
        assert_eq!(cfg.quantize(0.51), 0.5);
        assert_eq!(cfg.quantize(-0.024), -0.0);
        assert_eq!(cfg.quantize(-0.026), -0.05);
        assert_eq!(cfg.quantize(3.0), 1.0);
    }

    #[test]
    fn zero_counts_leave_state() {
        let dev = DeviceParams {
            sigma_c2c: 1.0,
            ..DeviceParams::ideal(0.01)
        };
        let mut s = DeviceArrayState::materialize(
            &DeviceArraySpec::new(3, 3, dev),
            &WeightInit::default(),
            key(),
        )
        .unwrap();
        let before = s.clone();
        s.apply_coincidences(&CoincidenceCounts::zeros(3, 3), &mut key().rng())
            .unwrap();
        assert_eq!(s, before);
    }

    #[test]
    fn noiseless_counts_apply_exactly() {
        let mut s = DeviceArrayState::materialize(
            &DeviceArraySpec::new(2, 2, DeviceParams::ideal(0.001)),
            &WeightInit::Constant(0.0),
            key(),
        )
        .unwrap();
        let mut c = CoincidenceCounts::zeros(2, 2);
        c.and_counts = vec![3, 0, 1, 7];
        c.xor_counts = vec![2, 2, 2, 2];
        c.col_negative = vec![false, true];
        s.apply_coincidences(&c, &mut key().rng()).unwrap();
        let expect = [0.003, 0.0, 0.001, -0.007];
        for (w, e) in s.weights().iter().zip(expect) {
            assert!((w - e).abs() < 1e-15);
        }
    }

    #[test]
    fn snapshot_round_trip() {
        let dev = DeviceParams {
            sigma_d2d: 0.3,
            sigma_bound: 0.2,
            bound: 1.0,
            sigma_asym: 0.05,
            ..DeviceParams::ideal(0.001)
        };
        let s = DeviceArrayState::materialize(
            &DeviceArraySpec::new(4, 3, dev),
            &WeightInit::default(),
            key(),
        )
        .unwrap();
        let mut buf = Vec::new();
        s.write_snapshot(&mut buf).unwrap();
        let back = DeviceArrayState::read_snapshot(buf.as_slice()).unwrap();
        assert_eq!(back, s);

        let unbounded = DeviceArrayState::materialize(
            &DeviceArraySpec::new(2, 2, DeviceParams::ideal(0.01)),
            &WeightInit::default(),
            key(),
        )
        .unwrap();
        let mut buf = Vec::new();
        unbounded.write_snapshot(&mut buf).unwrap();
        assert_eq!(
            DeviceArrayState::read_snapshot(buf.as_slice()).unwrap(),
            unbounded
        );
    }

    #[test]
    fn truncated_snapshot_rejected() {
        let s = DeviceArrayState::materialize(
            &DeviceArraySpec::new(2, 2, DeviceParams::ideal(0.01)),
            &WeightInit::default(),
            key(),
        )
        .unwrap();
        let mut buf = Vec::new();
        s.write_snapshot(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let cut: String = text.lines().take(6).map(|l| format!("{l}\n")).collect();
        assert!(matches!(
            DeviceArrayState::read_snapshot(cut.as_bytes()),
            Err(Error::Checkpoint(_))
        ));
    }
}
