//! Fully connected sigmoid/softmax network whose layers live on device arrays.
//!
//! Training is plain per-sample backpropagation with a cross-entropy loss. In
//! baseline mode each layer receives the exact update `W -= eta x delta^T`; in
//! stochastic mode the same update goes through pulse streams and device
//! physics (see [`crate::stochastic`]).

use std::fs;
use std::io::{BufReader, BufWriter};
use std::path::Path;
use std::time::Instant;

use rand::seq::SliceRandom;

use crate::array::{DeviceArraySpec, DeviceArrayState, DeviceParams, ReadoutConfig, WeightInit};
use crate::error::{Error, Result};
use crate::mnist::Dataset;
use crate::rng::{Purpose, StreamKey};
use crate::stochastic::{
    stochastic_outer_update, SaturationStats, TranslatorConfig, UpdateScratch,
};

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkConfig {
    pub layer_sizes: Vec<usize>,
    /// Shared by the sigmoid and softmax.
    pub temperature: f64,
    /// Append an always-on input row to every layer.
    pub bias: bool,
    /// Half-width of the uniform weight initialization.
    pub init_scale: f64,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        NetworkConfig {
            layer_sizes: vec![784, 256, 128, 10],
            temperature: 1.0,
            bias: true,
            init_scale: 0.1,
        }
    }
}

impl NetworkConfig {
    pub fn validate(&self) -> Result<()> {
        if self.layer_sizes.len() < 2 || self.layer_sizes.contains(&0) {
            return Err(Error::InvalidConfig(
                "need at least two non-empty layers".into(),
            ));
        }
        if !(self.temperature > 0.0) {
            return Err(Error::InvalidConfig("temperature must be positive".into()));
        }
        Ok(())
    }

    pub fn num_layers(&self) -> usize {
        self.layer_sizes.len() - 1
    }
}

/// Piecewise-constant learning rate over epochs.
#[derive(Debug, Clone, PartialEq)]
pub struct LrSchedule {
    /// `(first_epoch, end_epoch_exclusive, eta)`, contiguous from epoch 0.
    segments: Vec<(usize, usize, f64)>,
}

impl LrSchedule {
    pub fn new(segments: Vec<(usize, usize, f64)>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidConfig("empty learning-rate schedule".into()));
        }
        let mut expect = 0;
        for &(start, end, eta) in &segments {
            if start != expect || end <= start {
                return Err(Error::InvalidConfig(format!(
                    "schedule segments must be contiguous from epoch 0 (got {start}..{end})"
                )));
            }
            if !(eta > 0.0 && eta.is_finite()) {
                return Err(Error::InvalidConfig(
                    "learning rates must be positive".into(),
                ));
            }
            expect = end;
        }
        Ok(LrSchedule { segments })
    }

    /// 0.01, 0.005 and 0.0025 for ten epochs each.
    pub fn stepped() -> Self {
        LrSchedule {
            segments: vec![(0, 10, 0.01), (10, 20, 0.005), (20, 30, 0.0025)],
        }
    }

    pub fn constant(eta: f64, epochs: usize) -> Result<Self> {
        Self::new(vec![(0, epochs.max(1), eta)])
    }

    pub fn segments(&self) -> &[(usize, usize, f64)] {
        &self.segments
    }

    pub fn epochs(&self) -> usize {
        self.segments.last().map_or(0, |s| s.1)
    }

    /// Rate for `epoch`; past the end the last rate holds.
    pub fn eta_at(&self, epoch: usize) -> f64 {
        self.segments
            .iter()
            .find(|s| epoch >= s.0 && epoch < s.1)
            .unwrap_or_else(|| self.segments.last().expect("non-empty"))
            .2
    }

    /// `0-9:0.01,10-19:0.005` (inclusive epoch ranges).
    pub fn to_spec_string(&self) -> String {
        self.segments
            .iter()
            .map(|(s, e, eta)| format!("{s}-{}:{eta}", e - 1))
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn parse(text: &str) -> Result<Self> {
        let bad = || Error::InvalidConfig(format!("bad schedule `{text}`"));
        let mut segs = Vec::new();
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (range, eta) = part.split_once(':').ok_or_else(bad)?;
            let (a, b) = range.split_once('-').ok_or_else(bad)?;
            let a: usize = a.trim().parse().map_err(|_| bad())?;
            let b: usize = b.trim().parse().map_err(|_| bad())?;
            let eta: f64 = eta.trim().parse().map_err(|_| bad())?;
            segs.push((a, b + 1, eta));
        }
        Self::new(segs)
    }
}

/// How the stochastic translators are tuned to the learning rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GainRule {
    /// `dw_min = eta / BL` and `C = 1`; the increment follows the schedule.
    MatchedIncrement,
    /// Fixed `dw_min`, `C = sqrt(eta / (BL dw_min))`.
    MatchedGain,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrainMode {
    Baseline,
    Stochastic {
        bl: usize,
        rule: GainRule,
        device: DeviceParams,
    },
}

impl TrainMode {
    pub fn label(&self) -> &'static str {
        match self {
            TrainMode::Baseline => "baseline",
            TrainMode::Stochastic { .. } => "stochastic",
        }
    }
}

/// Read-path settings for hidden (sigmoid) and output (softmax) layers.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Readout {
    pub hidden: ReadoutConfig,
    pub output: ReadoutConfig,
}

#[derive(Debug, Clone, Default)]
pub struct Activations {
    /// Input to each layer, bias entry included.
    pub inputs: Vec<Vec<f64>>,
    /// Output-layer read results after clipping.
    pub logits: Vec<f64>,
    pub output: Vec<f64>,
}

#[inline]
pub fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Numerically stable softmax of `z / temperature`.
pub fn softmax(z: &[f64], temperature: f64, out: &mut [f64]) {
    let max = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for (o, v) in out.iter_mut().zip(z) {
        *o = ((v - max) / temperature).exp();
        sum += *o;
    }
    out.iter_mut().for_each(|o| *o /= sum);
}

/// Index of the largest value; ties go to the lowest index.
pub fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone)]
pub struct Network {
    config: NetworkConfig,
    layers: Vec<DeviceArrayState>,
    readouts: Vec<ReadoutConfig>,
}

impl Network {
    pub fn new(
        config: NetworkConfig,
        device: DeviceParams,
        readout: Readout,
        key: StreamKey,
    ) -> Result<Self> {
        config.validate()?;
        readout.hidden.validate()?;
        readout.output.validate()?;
        let n = config.num_layers();
        let bias = config.bias as usize;
        let mut layers = Vec::with_capacity(n);
        let mut readouts = Vec::with_capacity(n);
        for l in 0..n {
            let spec = DeviceArraySpec::new(
                config.layer_sizes[l] + bias,
                config.layer_sizes[l + 1],
                device,
            );
            let init = WeightInit::Uniform(config.init_scale);
            layers.push(DeviceArrayState::materialize(
                &spec,
                &init,
                key.child(l as u64),
            )?);
            readouts.push(if l + 1 == n {
                readout.output
            } else {
                readout.hidden
            });
        }
        Ok(Network {
            config,
            layers,
            readouts,
        })
    }

    /// Ideal unbounded devices, noise-free reads.
    pub fn baseline(config: NetworkConfig, key: StreamKey) -> Result<Self> {
        Self::new(config, DeviceParams::ideal(1.0), Readout::default(), key)
    }

    pub fn config(&self) -> &NetworkConfig {
        &self.config
    }

    pub fn layers(&self) -> &[DeviceArrayState] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [DeviceArrayState] {
        &mut self.layers
    }

    pub fn readouts(&self) -> &[ReadoutConfig] {
        &self.readouts
    }

    pub fn activations(&self) -> Activations {
        let bias = self.config.bias as usize;
        let n = self.config.num_layers();
        Activations {
            inputs: (0..n)
                .map(|l| vec![0.0; self.config.layer_sizes[l] + bias])
                .collect(),
            logits: vec![0.0; self.config.layer_sizes[n]],
            output: vec![0.0; self.config.layer_sizes[n]],
        }
    }

    /// Forward cycle. Read noise for layer `l` is drawn from
    /// `key / l / ReadForward`.
    pub fn forward(&self, input: &[f64], key: StreamKey, acts: &mut Activations) -> Result<()> {
        let sizes = &self.config.layer_sizes;
        if input.len() != sizes[0] {
            return Err(Error::DimensionMismatch {
                expected: sizes[0],
                actual: input.len(),
            });
        }
        if acts.inputs.len() != self.layers.len() {
            *acts = self.activations();
        }
        let t = self.config.temperature;
        let n = self.layers.len();
        acts.inputs[0][..sizes[0]].copy_from_slice(input);
        for l in 0..n {
            if self.config.bias {
                let last = acts.inputs[l].len() - 1;
                acts.inputs[l][last] = 1.0;
            }
            let mut rng = key.path(&[l as u64, Purpose::ReadForward.into()]).rng();
            if l + 1 < n {
                let (head, tail) = acts.inputs.split_at_mut(l + 1);
                let out = &mut tail[0][..sizes[l + 1]];
                self.layers[l].read_forward_into(&head[l], &self.readouts[l], &mut rng, out)?;
                out.iter_mut().for_each(|v| *v = sigmoid(*v / t));
            } else {
                self.layers[l].read_forward_into(
                    &acts.inputs[l],
                    &self.readouts[l],
                    &mut rng,
                    &mut acts.logits,
                )?;
                softmax(&acts.logits, t, &mut acts.output);
            }
        }
        Ok(())
    }

    /// Backward cycle: `deltas[l]` is dL/dz for the outputs of layer `l`.
    /// Read noise for layer `l` comes from `key / l / ReadBackward`.
    pub fn backward(
        &self,
        acts: &Activations,
        label: usize,
        key: StreamKey,
        deltas: &mut Vec<Vec<f64>>,
    ) -> Result<()> {
        let sizes = &self.config.layer_sizes;
        let n = self.layers.len();
        if label >= sizes[n] {
            return Err(Error::RejectedInput(format!("label {label} out of range")));
        }
        if deltas.len() != n {
            *deltas = (0..n).map(|l| vec![0.0; sizes[l + 1]]).collect();
        }
        let t = self.config.temperature;
        for (j, d) in deltas[n - 1].iter_mut().enumerate() {
            let target = if j == label { 1.0 } else { 0.0 };
            *d = (acts.output[j] - target) / t;
        }
        let mut back = Vec::new();
        for l in (1..n).rev() {
            back.resize(self.layers[l].rows(), 0.0);
            let mut rng = key.path(&[l as u64, Purpose::ReadBackward.into()]).rng();
            self.layers[l].read_backward_into(
                &deltas[l],
                &self.readouts[l],
                &mut rng,
                &mut back,
            )?;
            let h = &acts.inputs[l];
            for (j, d) in deltas[l - 1].iter_mut().enumerate() {
                let s = h[j];
                *d = back[j] * s * (1.0 - s) / t;
            }
        }
        Ok(())
    }

    /// Cross-entropy of the current prediction.
    pub fn loss(&self, input: &[f64], label: usize, key: StreamKey) -> Result<f64> {
        let mut acts = self.activations();
        self.forward(input, key, &mut acts)?;
        Ok(-acts.output[label].max(f64::MIN_POSITIVE).ln())
    }

    /// dL/dW for every layer, row-major like the weights.
    pub fn gradients(&self, input: &[f64], label: usize, key: StreamKey) -> Result<Vec<Vec<f64>>> {
        let mut acts = self.activations();
        let mut deltas = Vec::new();
        self.forward(input, key, &mut acts)?;
        self.backward(&acts, label, key, &mut deltas)?;
        Ok(self
            .layers
            .iter()
            .enumerate()
            .map(|(l, layer)| {
                let mut g = Vec::with_capacity(layer.rows() * layer.cols());
                for &x in &acts.inputs[l] {
                    g.extend(deltas[l].iter().map(|d| x * d));
                }
                g
            })
            .collect())
    }

    pub fn predict(&self, input: &[f64], key: StreamKey, acts: &mut Activations) -> Result<usize> {
        self.forward(input, key, acts)?;
        Ok(argmax(&acts.output))
    }

    /// Percentage of misclassified examples. Example `i` reads with
    /// `key / i`.
    pub fn evaluate_error(&self, data: &Dataset, key: StreamKey) -> Result<f64> {
        let mut acts = self.activations();
        let mut input = vec![0.0; data.pixels_per_image()];
        let mut wrong = 0usize;
        for i in 0..data.len() {
            data.fill_input(i, &mut input);
            if self.predict(&input, key.child(i as u64), &mut acts)? != data.label(i) as usize {
                wrong += 1;
            }
        }
        if data.is_empty() {
            return Ok(0.0);
        }
        Ok(100.0 * wrong as f64 / data.len() as f64)
    }

    /// Confusion matrix `[true][predicted]`, read the same way as
    /// [`Self::evaluate_error`].
    pub fn confusion(&self, data: &Dataset, key: StreamKey) -> Result<Vec<Vec<usize>>> {
        let classes = *self.config.layer_sizes.last().expect("validated");
        let mut m = vec![vec![0; classes]; classes];
        let mut acts = self.activations();
        let mut input = vec![0.0; data.pixels_per_image()];
        for i in 0..data.len() {
            data.fill_input(i, &mut input);
            let p = self.predict(&input, key.child(i as u64), &mut acts)?;
            m[data.label(i) as usize][p] += 1;
        }
        Ok(m)
    }

    /// Write one snapshot per layer plus `meta.txt` into `dir`.
    pub fn save_checkpoint(&self, dir: &Path, extra: &[(String, String)]) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut meta = String::new();
        let sizes: Vec<String> = self
            .config
            .layer_sizes
            .iter()
            .map(|s| s.to_string())
            .collect();
        meta.push_str(&format!("network.layer_sizes = {}\n", sizes.join(",")));
        meta.push_str(&format!(
            "network.temperature = {:?}\n",
            self.config.temperature
        ));
        meta.push_str(&format!("network.bias = {}\n", self.config.bias));
        meta.push_str(&format!(
            "network.init_scale = {:?}\n",
            self.config.init_scale
        ));
        for (l, r) in self.readouts.iter().enumerate() {
            meta.push_str(&format!(
                "readout.{l} = {:?} {:?} {}\n",
                r.noise_sigma, r.alpha_bound, r.input_pulses
            ));
        }
        for (k, v) in extra {
            meta.push_str(&format!("{k} = {v}\n"));
        }
        let p = dir.join("meta.txt");
        fs::write(&p, meta).map_err(|e| Error::io(&p, e))?;
        for (l, layer) in self.layers.iter().enumerate() {
            let p = dir.join(format!("layer{l}.txt"));
            let f = fs::File::create(&p).map_err(|e| Error::io(&p, e))?;
            layer
                .write_snapshot(BufWriter::new(f))
                .map_err(|e| Error::io(&p, e))?;
        }
        Ok(())
    }

    pub fn load_checkpoint(dir: &Path) -> Result<Self> {
        let p = dir.join("meta.txt");
        let text = fs::read_to_string(&p).map_err(|e| Error::io(&p, e))?;
        let bad = |m: &str| Error::Checkpoint(m.to_string());
        let mut config = NetworkConfig::default();
        let mut readouts = Vec::new();
        for line in text.lines() {
            let Some((k, v)) = line.split_once('=') else {
                continue;
            };
            let (k, v) = (k.trim(), v.trim());
            match k {
                "network.layer_sizes" => {
                    config.layer_sizes = v
                        .split(',')
                        .map(|s| s.trim().parse().map_err(|_| bad("layer sizes")))
                        .collect::<Result<_>>()?
                }
                "network.temperature" => {
                    config.temperature = v.parse().map_err(|_| bad("temperature"))?
                }
                "network.bias" => config.bias = v.parse().map_err(|_| bad("bias"))?,
                "network.init_scale" => {
                    config.init_scale = v.parse().map_err(|_| bad("init_scale"))?
                }
                _ if k.starts_with("readout.") => {
                    let f: Vec<&str> = v.split_whitespace().collect();
                    let [noise, alpha, pulses] = f[..] else {
                        return Err(bad("readout line"));
                    };
                    readouts.push(ReadoutConfig {
                        noise_sigma: noise.parse().map_err(|_| bad("noise"))?,
                        alpha_bound: alpha.parse().map_err(|_| bad("alpha"))?,
                        input_pulses: pulses.parse().map_err(|_| bad("pulses"))?,
                    });
                }
                _ => {}
            }
        }
        config.validate()?;
        let n = config.num_layers();
        if readouts.len() != n {
            return Err(bad("readout count does not match layers"));
        }
        let mut layers = Vec::with_capacity(n);
        for l in 0..n {
            let p = dir.join(format!("layer{l}.txt"));
            let f = fs::File::open(&p).map_err(|e| Error::io(&p, e))?;
            let layer = DeviceArrayState::read_snapshot(BufReader::new(f))?;
            let rows = config.layer_sizes[l] + config.bias as usize;
            if layer.rows() != rows || layer.cols() != config.layer_sizes[l + 1] {
                return Err(bad("layer dims do not match network config"));
            }
            layers.push(layer);
        }
        Ok(Network {
            config,
            layers,
            readouts,
        })
    }
}

/// Everything needed to reproduce one training run besides the seed.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub network: NetworkConfig,
    pub mode: TrainMode,
    pub readout: Readout,
    pub schedule: LrSchedule,
    pub epochs: usize,
    /// Train on only the first `n` shuffled examples each epoch.
    pub samples_per_epoch: Option<usize>,
}

impl TrainConfig {
    pub fn reference_baseline() -> Self {
        TrainConfig {
            network: NetworkConfig::default(),
            mode: TrainMode::Baseline,
            readout: Readout::default(),
            schedule: LrSchedule::stepped(),
            epochs: 30,
            samples_per_epoch: None,
        }
    }

    fn device_for(&self, eta: f64) -> DeviceParams {
        match self.mode {
            TrainMode::Baseline => DeviceParams::ideal(1.0),
            TrainMode::Stochastic {
                bl,
                rule: GainRule::MatchedIncrement,
                device,
            } => DeviceParams {
                dw_min: eta / bl as f64,
                ..device
            },
            TrainMode::Stochastic { device, .. } => device,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpochRecord {
    /// 1-based: the record for epoch `n` is taken after `n` passes.
    pub epoch: usize,
    pub eta: f64,
    pub test_error: f64,
    pub saturation_fraction: f64,
    pub wallclock_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainRun {
    pub mode: &'static str,
    pub seed: u64,
    pub epochs: Vec<EpochRecord>,
}

impl TrainRun {
    pub fn final_error(&self) -> Option<f64> {
        self.epochs.last().map(|e| e.test_error)
    }
}

/// Owns a network and the scratch space for per-sample training.
pub struct Trainer {
    config: TrainConfig,
    seed: u64,
    root: StreamKey,
    net: Network,
    acts: Activations,
    deltas: Vec<Vec<f64>>,
    negated: Vec<f64>,
    scratch: UpdateScratch,
    stats: SaturationStats,
}

impl Trainer {
    pub fn new(config: TrainConfig, seed: u64) -> Result<Self> {
        let root = StreamKey::root(seed);
        let eta0 = config.schedule.eta_at(0);
        let device = config.device_for(eta0);
        let net = Network::new(
            config.network.clone(),
            device,
            config.readout,
            root.child(Purpose::WeightInit.into()),
        )?;
        if let TrainMode::Stochastic { bl, .. } = config.mode {
            TranslatorConfig::new(bl, 1.0)?;
        }
        Ok(Trainer {
            acts: net.activations(),
            deltas: Vec::new(),
            negated: Vec::new(),
            scratch: UpdateScratch::default(),
            stats: SaturationStats::default(),
            config,
            seed,
            root,
            net,
        })
    }

    pub fn network(&self) -> &Network {
        &self.net
    }

    pub fn into_network(self) -> Network {
        self.net
    }

    pub fn saturation(&self) -> SaturationStats {
        self.stats
    }

    fn translator(&self, eta: f64) -> Result<Option<TranslatorConfig>> {
        match self.config.mode {
            TrainMode::Baseline => Ok(None),
            TrainMode::Stochastic {
                bl,
                rule: GainRule::MatchedIncrement,
                ..
            } => Ok(Some(TranslatorConfig::new(bl, 1.0)?)),
            TrainMode::Stochastic {
                bl,
                rule: GainRule::MatchedGain,
                device,
            } => Ok(Some(TranslatorConfig::matched(bl, eta, device.dw_min)?)),
        }
    }

    /// One forward/backward/update cycle on a single example.
    pub fn train_sample(
        &mut self,
        input: &[f64],
        label: usize,
        eta: f64,
        key: StreamKey,
    ) -> Result<()> {
        let translator = self.translator(eta)?;
        self.train_sample_with(input, label, eta, translator.as_ref(), key)
    }

    fn train_sample_with(
        &mut self,
        input: &[f64],
        label: usize,
        eta: f64,
        translator: Option<&TranslatorConfig>,
        key: StreamKey,
    ) -> Result<()> {
        self.net.forward(input, key, &mut self.acts)?;
        self.net
            .backward(&self.acts, label, key, &mut self.deltas)?;
        for l in 0..self.net.layers.len() {
            let x = &self.acts.inputs[l];
            let d = &self.deltas[l];
            match translator {
                None => self.net.layers[l].apply_outer_product(x, d, -eta)?,
                Some(cfg) => {
                    self.negated.clear();
                    self.negated.extend(d.iter().map(|v| -v));
                    stochastic_outer_update(
                        &mut self.net.layers[l],
                        x,
                        &self.negated,
                        cfg,
                        key.child(l as u64),
                        &mut self.stats,
                        &mut self.scratch,
                    )?;
                }
            }
        }
        Ok(())
    }

    /// One pass over (a shuffled prefix of) `train`.
    pub fn train_epoch(&mut self, train: &Dataset, epoch: usize) -> Result<SaturationStats> {
        let eta = self.config.schedule.eta_at(epoch);
        if let TrainMode::Stochastic {
            rule: GainRule::MatchedIncrement,
            ..
        } = self.config.mode
        {
            let dw = self.config.device_for(eta).dw_min;
            for layer in self.net.layers_mut() {
                layer.rescale_increments(dw);
            }
        }
        let translator = self.translator(eta)?;
        let mut order: Vec<usize> = (0..train.len()).collect();
        order.shuffle(
            &mut self
                .root
                .path(&[Purpose::Shuffle.into(), epoch as u64])
                .rng(),
        );
        let count = self
            .config
            .samples_per_epoch
            .map_or(order.len(), |n| n.min(order.len()));
        let epoch_key = self.root.path(&[Purpose::Training.into(), epoch as u64]);
        let before = self.stats;
        let mut input = vec![0.0; train.pixels_per_image()];
        for (n, &i) in order[..count].iter().enumerate() {
            train.fill_input(i, &mut input);
            self.train_sample_with(
                &input,
                train.label(i) as usize,
                eta,
                translator.as_ref(),
                epoch_key.child(n as u64),
            )?;
        }
        Ok(SaturationStats {
            translations: self.stats.translations - before.translations,
            clamped: self.stats.clamped - before.clamped,
        })
    }

    /// Test error after the network has seen `epoch` passes.
    pub fn evaluate(&self, test: &Dataset, epoch: usize) -> Result<f64> {
        self.net.evaluate_error(
            test,
            self.root.path(&[Purpose::Evaluation.into(), epoch as u64]),
        )
    }

    /// Run every epoch, calling `on_epoch` after each evaluation.
    pub fn run(
        &mut self,
        train: &Dataset,
        test: &Dataset,
        mut on_epoch: impl FnMut(&EpochRecord) -> Result<()>,
    ) -> Result<TrainRun> {
        let mut records = Vec::with_capacity(self.config.epochs);
        for epoch in 0..self.config.epochs {
            let start = Instant::now();
            let sat = self.train_epoch(train, epoch)?;
            let test_error = self.evaluate(test, epoch + 1)?;
            let rec = EpochRecord {
                epoch: epoch + 1,
                eta: self.config.schedule.eta_at(epoch),
                test_error,
                saturation_fraction: sat.fraction(),
                wallclock_s: start.elapsed().as_secs_f64(),
            };
            on_epoch(&rec)?;
            records.push(rec);
        }
        Ok(TrainRun {
            mode: self.config.mode.label(),
            seed: self.seed,
            epochs: records,
        })
    }
}

/// Build a trainer for `config` and run it to completion.
pub fn train(config: &TrainConfig, train: &Dataset, test: &Dataset, seed: u64) -> Result<TrainRun> {
    Trainer::new(config.clone(), seed)?.run(train, test, |_| Ok(()))
}
