//! Stochastic pulse streams and the coincidence-based outer-product update.
//!
//! A value `v` is sent to the array as `BL` independent Bernoulli pulses with
//! firing probability `min(1, C |v|)`; its sign travels separately and picks
//! the up or down phase. A device moves by one increment for every slot in
//! which its row and column both fire, and by `k` increments for every slot in
//! which exactly one of them fires.

use crate::array::{DeviceArrayState, LinePulses};
use crate::error::{Error, Result};
use crate::rng::{CounterRng, Purpose, StreamKey};
use rand_core::RngCore;

/// Streams are packed into a single `u64`.
pub const MAX_BL: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StochasticStream {
    bits: u64,
    len: u8,
}

impl StochasticStream {
    /// Bits above `len` must be clear.
    pub fn new(bits: u64, len: usize) -> Result<Self> {
        if len == 0 || len > MAX_BL {
            return Err(Error::InvalidConfig(format!(
                "stream length {len} outside 1..={MAX_BL}"
            )));
        }
        if len < 64 && bits >> len != 0 {
            return Err(Error::RejectedInput(format!(
                "bits set beyond stream length {len}"
            )));
        }
        Ok(StochasticStream {
            bits,
            len: len as u8,
        })
    }

    pub fn zeros(len: usize) -> Result<Self> {
        Self::new(0, len)
    }

    pub fn ones(len: usize) -> Result<Self> {
        Self::new(mask(len), len)
    }

    /// Parse a string of `0`/`1`, slot 0 first.
    pub fn from_bit_str(s: &str) -> Result<Self> {
        let mut bits = 0u64;
        for (n, c) in s.chars().enumerate() {
            match c {
                '1' if n < 64 => bits |= 1 << n,
                '0' => {}
                _ => {
                    return Err(Error::RejectedInput(format!(
                        "invalid stream literal `{s}`"
                    )))
                }
            }
        }
        Self::new(bits, s.len())
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn get(&self, slot: usize) -> bool {
        slot < self.len() && (self.bits >> slot) & 1 == 1
    }

    pub fn popcount(&self) -> u32 {
        self.bits.count_ones()
    }
}

/// Same notation as [`StochasticStream::from_bit_str`].
impl std::fmt::Display for StochasticStream {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        (0..self.len()).try_for_each(|n| f.write_str(if self.get(n) { "1" } else { "0" }))
    }
}

#[inline]
fn mask(len: usize) -> u64 {
    if len >= 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

/// Stream length and gain of the stochastic translators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TranslatorConfig {
    pub bl: usize,
    pub gain: f64,
}

impl TranslatorConfig {
    pub fn new(bl: usize, gain: f64) -> Result<Self> {
        let cfg = TranslatorConfig { bl, gain };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Gain that makes the mean update equal `eta * x * delta` for a device
    /// with increment `dw_min`.
    pub fn matched(bl: usize, eta: f64, dw_min: f64) -> Result<Self> {
        Self::new(bl, matched_gain(eta, bl, dw_min))
    }

    pub fn validate(&self) -> Result<()> {
        if self.bl == 0 || self.bl > MAX_BL {
            return Err(Error::InvalidConfig(format!(
                "BL {} outside 1..={MAX_BL}",
                self.bl
            )));
        }
        if !(self.gain > 0.0 && self.gain.is_finite()) {
            return Err(Error::InvalidConfig(
                "translator gain must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Firing probability for `value` and whether it had to be clamped.
    #[inline]
    pub fn probability(&self, value: f64) -> (f64, bool) {
        let p = self.gain * value.abs();
        if p > 1.0 {
            (1.0, true)
        } else {
            (p, false)
        }
    }
}

/// `sqrt(eta / (BL * dw_min))`.
pub fn matched_gain(eta: f64, bl: usize, dw_min: f64) -> f64 {
    (eta / (bl as f64 * dw_min)).sqrt()
}

/// Count of probability clamps over a span of translations.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SaturationStats {
    pub translations: u64,
    pub clamped: u64,
}

impl SaturationStats {
    pub fn fraction(&self) -> f64 {
        if self.translations == 0 {
            0.0
        } else {
            self.clamped as f64 / self.translations as f64
        }
    }

    pub fn merge(&mut self, other: SaturationStats) {
        self.translations += other.translations;
        self.clamped += other.clamped;
    }
}

#[inline]
fn draw_bits(p: f64, bl: usize, rng: &mut CounterRng) -> u64 {
    if p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return mask(bl);
    }
    // p * 2^64 as an integer threshold; exact enough for any p in (0, 1)
    let threshold = (p * 18_446_744_073_709_551_616.0) as u64;
    let mut bits = 0u64;
    for n in 0..bl {
        if rng.next_u64() < threshold {
            bits |= 1 << n;
        }
    }
    bits
}

/// Translate one value into a pulse stream. The sign is not encoded.
pub fn translate(
    value: f64,
    cfg: &TranslatorConfig,
    rng: &mut CounterRng,
) -> Result<StochasticStream> {
    cfg.validate()?;
    if !value.is_finite() {
        return Err(Error::RejectedInput(format!(
            "cannot translate non-finite value {value}"
        )));
    }
    let (p, _) = cfg.probability(value);
    Ok(StochasticStream {
        bits: draw_bits(p, cfg.bl, rng),
        len: cfg.bl as u8,
    })
}

/// Number of slots where both streams fire, and where exactly one does.
pub fn coincidence_counts(row: &StochasticStream, col: &StochasticStream) -> Result<(u32, u32)> {
    if row.len != col.len {
        return Err(Error::StreamLengthMismatch {
            left: row.len(),
            right: col.len(),
        });
    }
    Ok((
        (row.bits & col.bits).count_ones(),
        (row.bits ^ col.bits).count_ones(),
    ))
}

/// Mean weight change `BL * dw_min * C^2 * x * delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectedUpdate {
    pub value: f64,
    /// At least one firing probability was clamped to 1, so `value` is only
    /// an upper bound on the magnitude of the true mean.
    pub clamped: bool,
}

pub fn expected_update(x: f64, delta: f64, dw_min: f64, cfg: &TranslatorConfig) -> ExpectedUpdate {
    let c = cfg.gain;
    ExpectedUpdate {
        value: cfg.bl as f64 * dw_min * c * c * x * delta,
        clamped: cfg.probability(x).1 || cfg.probability(delta).1,
    }
}

/// Generate the per-line pulses for a vector. Line `i` draws from
/// `key.child(i)`, and silent lines consume nothing.
pub fn translate_lines(
    values: &[f64],
    cfg: &TranslatorConfig,
    key: StreamKey,
    stats: &mut SaturationStats,
    out: &mut Vec<LinePulses>,
) -> Result<()> {
    out.clear();
    out.reserve(values.len());
    for (i, &v) in values.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::RejectedInput(format!(
                "non-finite value {v} on line {i}"
            )));
        }
        let (p, clamped) = cfg.probability(v);
        stats.translations += 1;
        stats.clamped += clamped as u64;
        let bits = if p > 0.0 {
            draw_bits(p, cfg.bl, &mut key.child(i as u64).rng())
        } else {
            0
        };
        out.push(LinePulses {
            bits,
            negative: v < 0.0,
        });
    }
    Ok(())
}

/// Reusable buffers for [`stochastic_outer_update`].
#[derive(Debug, Default)]
pub struct UpdateScratch {
    rows: Vec<LinePulses>,
    cols: Vec<LinePulses>,
}

/// One stochastic update cycle: `W += ~ BL dw C^2 x delta^T`.
///
/// Row streams come from `key / RowStreams / i`, column streams from
/// `key / ColStreams / j`, cycle-to-cycle noise from `key / UpdateNoise`.
/// Each stream is shared by the whole row or column.
pub fn stochastic_outer_update(
    array: &mut DeviceArrayState,
    x: &[f64],
    delta: &[f64],
    cfg: &TranslatorConfig,
    key: StreamKey,
    stats: &mut SaturationStats,
    scratch: &mut UpdateScratch,
) -> Result<()> {
    cfg.validate()?;
    if x.len() != array.rows() {
        return Err(Error::DimensionMismatch {
            expected: array.rows(),
            actual: x.len(),
        });
    }
    if delta.len() != array.cols() {
        return Err(Error::DimensionMismatch {
            expected: array.cols(),
            actual: delta.len(),
        });
    }
    translate_lines(
        x,
        cfg,
        key.child(Purpose::RowStreams.into()),
        stats,
        &mut scratch.rows,
    )?;
    translate_lines(
        delta,
        cfg,
        key.child(Purpose::ColStreams.into()),
        stats,
        &mut scratch.cols,
    )?;
    let mut noise = key.child(Purpose::UpdateNoise.into()).rng();
    array.apply_line_pulses(&scratch.rows, &scratch.cols, &mut noise)
}
