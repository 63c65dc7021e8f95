//! Named experiment definitions and their flat-config representation.

use crate::array::{DeviceParams, ReadoutConfig};
use crate::error::{Error, Result};
use crate::kv::KvDoc;
use crate::network::{GainRule, LrSchedule, NetworkConfig, Readout, TrainConfig, TrainMode};

/// Epoch budget applied on top of an experiment definition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Budget {
    /// 30 epochs with the stepped learning-rate schedule.
    #[default]
    Full,
    /// 10 epochs at a constant 0.01.
    Ci,
    /// One epoch on the first 6000 shuffled training examples.
    Smoke,
}

impl Budget {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Budget::Full),
            "ci" => Ok(Budget::Ci),
            "smoke" => Ok(Budget::Smoke),
            _ => Err(Error::InvalidConfig(format!(
                "unknown budget `{s}` (full, ci, smoke)"
            ))),
        }
    }
}

pub const DEFAULT_SEEDS: [u64; 3] = [1, 2, 3];

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub name: String,
    pub summary: String,
    pub network: NetworkConfig,
    pub mode: TrainMode,
    pub readout: Readout,
    pub schedule: LrSchedule,
    pub epochs: usize,
    pub samples_per_epoch: Option<usize>,
    pub seeds: Vec<u64>,
}

impl ExperimentSpec {
    pub fn baseline(name: &str, summary: &str) -> Self {
        let base = TrainConfig::reference_baseline();
        ExperimentSpec {
            name: name.to_string(),
            summary: summary.to_string(),
            network: base.network,
            mode: base.mode,
            readout: base.readout,
            schedule: base.schedule,
            epochs: base.epochs,
            samples_per_epoch: None,
            seeds: DEFAULT_SEEDS.to_vec(),
        }
    }

    pub fn stochastic(
        name: &str,
        summary: &str,
        bl: usize,
        rule: GainRule,
        device: DeviceParams,
    ) -> Self {
        ExperimentSpec {
            mode: TrainMode::Stochastic { bl, rule, device },
            ..Self::baseline(name, summary)
        }
    }

    pub fn with_readout(mut self, readout: Readout) -> Self {
        self.readout = readout;
        self
    }

    pub fn with_budget(mut self, budget: Budget) -> Self {
        match budget {
            Budget::Full => {
                self.schedule = LrSchedule::stepped();
                self.epochs = 30;
                self.samples_per_epoch = None;
            }
            Budget::Ci => {
                self.schedule = LrSchedule::constant(0.01, 10).expect("valid schedule");
                self.epochs = 10;
                self.samples_per_epoch = None;
            }
            Budget::Smoke => {
                self.schedule = LrSchedule::constant(0.01, 1).expect("valid schedule");
                self.epochs = 1;
                self.samples_per_epoch = Some(6000);
            }
        }
        self
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            network: self.network.clone(),
            mode: self.mode,
            readout: self.readout,
            schedule: self.schedule.clone(),
            epochs: self.epochs,
            samples_per_epoch: self.samples_per_epoch,
        }
    }

    pub fn to_kv(&self) -> KvDoc {
        let mut doc = KvDoc::default();
        doc.set("name", &self.name);
        if !self.summary.is_empty() {
            doc.set("summary", &self.summary);
        }
        let layers: Vec<String> = self
            .network
            .layer_sizes
            .iter()
            .map(|n| n.to_string())
            .collect();
        doc.set("network.layers", layers.join(","));
        doc.set(
            "network.temperature",
            format!("{:?}", self.network.temperature),
        );
        doc.set("network.bias", self.network.bias);
        doc.set(
            "network.init_scale",
            format!("{:?}", self.network.init_scale),
        );
        match self.mode {
            TrainMode::Baseline => doc.set("mode", "baseline"),
            TrainMode::Stochastic {
                bl,
                rule,
                device: d,
            } => {
                doc.set("mode", "stochastic");
                doc.set("update.bl", bl);
                doc.set(
                    "update.rule",
                    match rule {
                        GainRule::MatchedIncrement => "matched_increment",
                        GainRule::MatchedGain => "matched_gain",
                    },
                );
                for (k, v) in device_fields(&d) {
                    doc.set(&format!("device.{k}"), format!("{v:?}"));
                }
            }
        }
        for (layer, r) in [
            ("hidden", &self.readout.hidden),
            ("output", &self.readout.output),
        ] {
            doc.set(
                &format!("readout.{layer}.noise"),
                format!("{:?}", r.noise_sigma),
            );
            doc.set(
                &format!("readout.{layer}.alpha"),
                format!("{:?}", r.alpha_bound),
            );
            doc.set(&format!("readout.{layer}.input_pulses"), r.input_pulses);
        }
        doc.set("schedule", self.schedule.to_spec_string());
        doc.set("epochs", self.epochs);
        if let Some(n) = self.samples_per_epoch {
            doc.set("samples_per_epoch", n);
        }
        let seeds: Vec<String> = self.seeds.iter().map(|s| s.to_string()).collect();
        doc.set("seeds", seeds.join(","));
        doc
    }

    /// Unset keys fall back to the floating-point baseline defaults.
    pub fn from_kv(doc: &KvDoc) -> Result<Self> {
        let mut known: Vec<String> = [
            "name",
            "summary",
            "mode",
            "network.layers",
            "network.temperature",
            "network.bias",
            "network.init_scale",
            "update.bl",
            "update.rule",
            "schedule",
            "epochs",
            "samples_per_epoch",
            "seeds",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        known.extend(
            device_fields(&DeviceParams::ideal(1.0))
                .iter()
                .map(|(k, _)| format!("device.{k}")),
        );
        for layer in ["hidden", "output"] {
            for f in ["noise", "alpha", "input_pulses"] {
                known.push(format!("readout.{layer}.{f}"));
            }
        }
        let known_refs: Vec<&str> = known.iter().map(String::as_str).collect();
        doc.check_keys(&known_refs)?;

        let name = doc
            .get_str("name")
            .ok_or_else(|| Error::InvalidConfig("config needs a `name`".into()))?;
        let mut spec = ExperimentSpec::baseline(name, doc.get_str("summary").unwrap_or(""));
        if let Some(layers) = doc.get_str("network.layers") {
            spec.network.layer_sizes = parse_list(layers)?;
        }
        spec.network.temperature = doc.get_or("network.temperature", spec.network.temperature)?;
        spec.network.bias = doc.get_or("network.bias", spec.network.bias)?;
        spec.network.init_scale = doc.get_or("network.init_scale", spec.network.init_scale)?;
        spec.network.validate()?;

        match doc.get_str("mode").unwrap_or("baseline") {
            "baseline" => {}
            "stochastic" => {
                let bl = doc.get_or("update.bl", 10usize)?;
                let rule = match doc.get_str("update.rule").unwrap_or("matched_gain") {
                    "matched_increment" => GainRule::MatchedIncrement,
                    "matched_gain" => GainRule::MatchedGain,
                    other => {
                        return Err(Error::InvalidConfig(format!(
                            "unknown update.rule `{other}`"
                        )))
                    }
                };
                let mut d = DeviceParams::ideal(0.001);
                {
                    let mut fields = device_fields_mut(&mut d);
                    for (k, v) in fields.iter_mut() {
                        **v = doc.get_or(&format!("device.{k}"), **v)?;
                    }
                }
                d.validate()?;
                spec.mode = TrainMode::Stochastic {
                    bl,
                    rule,
                    device: d,
                };
            }
            other => return Err(Error::InvalidConfig(format!("unknown mode `{other}`"))),
        }
        for (layer, r) in [
            ("hidden", &mut spec.readout.hidden),
            ("output", &mut spec.readout.output),
        ] {
            r.noise_sigma = doc.get_or(&format!("readout.{layer}.noise"), r.noise_sigma)?;
            r.alpha_bound = doc.get_or(&format!("readout.{layer}.alpha"), r.alpha_bound)?;
            r.input_pulses =
                doc.get_or(&format!("readout.{layer}.input_pulses"), r.input_pulses)?;
            r.validate()?;
        }
        if let Some(s) = doc.get_str("schedule") {
            spec.schedule = LrSchedule::parse(s)?;
        }
        spec.epochs = doc.get_or("epochs", spec.schedule.epochs())?;
        spec.samples_per_epoch = doc.get("samples_per_epoch")?;
        if let Some(s) = doc.get_str("seeds") {
            spec.seeds = parse_list(s)?;
            if spec.seeds.is_empty() {
                return Err(Error::InvalidConfig("`seeds` is empty".into()));
            }
        }
        Ok(spec)
    }
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            p.parse()
                .map_err(|_| Error::InvalidConfig(format!("bad list item `{p}`")))
        })
        .collect()
}

fn device_fields(d: &DeviceParams) -> [(&'static str, f64); 9] {
    [
        ("dw_min", d.dw_min),
        ("sigma_c2c", d.sigma_c2c),
        ("sigma_d2d", d.sigma_d2d),
        ("bound", d.bound),
        ("sigma_bound", d.sigma_bound),
        ("asym_up", d.asym_up),
        ("asym_down", d.asym_down),
        ("sigma_asym", d.sigma_asym),
        ("k", d.k),
    ]
}

fn device_fields_mut(d: &mut DeviceParams) -> [(&'static str, &mut f64); 9] {
    [
        ("dw_min", &mut d.dw_min),
        ("sigma_c2c", &mut d.sigma_c2c),
        ("sigma_d2d", &mut d.sigma_d2d),
        ("bound", &mut d.bound),
        ("sigma_bound", &mut d.sigma_bound),
        ("asym_up", &mut d.asym_up),
        ("asym_down", &mut d.asym_down),
        ("sigma_asym", &mut d.sigma_asym),
        ("k", &mut d.k),
    ]
}

/// Reference device for the single-parameter stress tests: 0.001 increment,
/// +-1 bounds, otherwise ideal.
pub fn reference_device() -> DeviceParams {
    DeviceParams {
        bound: 1.0,
        ..DeviceParams::ideal(0.001)
    }
}

/// Per-parameter tolerance thresholds.
pub mod threshold {
    pub const SIGMA_C2C: f64 = 1.5;
    pub const SIGMA_D2D: f64 = 1.1;
    pub const SIGMA_BOUND: f64 = 0.8;
    pub const ASYM_GLOBAL: f64 = 0.05;
    pub const SIGMA_ASYM: f64 = 0.06;
    pub const READ_NOISE: f64 = 0.1;
}

fn noisy_readout(sigma: f64) -> Readout {
    let r = ReadoutConfig {
        noise_sigma: sigma,
        ..ReadoutConfig::ideal()
    };
    Readout {
        hidden: r,
        output: r,
    }
}

fn model3() -> (DeviceParams, Readout) {
    let d = DeviceParams {
        sigma_c2c: 0.3,
        sigma_d2d: 0.3,
        sigma_bound: 0.3,
        sigma_asym: 0.02,
        ..reference_device()
    };
    (d, noisy_readout(0.05))
}

fn stress(name: String, summary: String, device: DeviceParams) -> ExperimentSpec {
    ExperimentSpec::stochastic(&name, &summary, 10, GainRule::MatchedGain, device)
}

/// Every named experiment.
pub fn catalog() -> Vec<ExperimentSpec> {
    use threshold::*;
    let mut out = vec![ExperimentSpec::baseline(
        "fig2a.baseline",
        "floating-point baseline",
    )];
    for bl in [1usize, 2, 10] {
        out.push(ExperimentSpec::stochastic(
            &format!("fig2a.bl{bl}"),
            &format!("stochastic update, BL={bl}, dw_min=eta/BL"),
            bl,
            GainRule::MatchedIncrement,
            DeviceParams::ideal(0.001),
        ));
    }
    for (tag, k) in [("k0.5", 0.5), ("k0.4", 0.4), ("k0.1", 0.1)] {
        out.push(ExperimentSpec::stochastic(
            &format!("fig2b.{tag}"),
            &format!("half-pulse response k={k}, BL=10"),
            10,
            GainRule::MatchedIncrement,
            DeviceParams {
                k,
                ..DeviceParams::ideal(0.001)
            },
        ));
    }
    let lines = |fig: &str, what: &str, values: [f64; 3], make: &dyn Fn(f64) -> DeviceParams| {
        values
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                stress(
                    format!("{fig}.line{}", i + 1),
                    format!("{what} = {v}"),
                    make(v),
                )
            })
            .collect::<Vec<_>>()
    };
    out.extend(lines("fig3a", "dw_min", [0.1, 0.032, 0.01], &|v| {
        DeviceParams::ideal(v)
    }));
    out.extend(lines("fig3b", "weight bound", [0.1, 0.2, 0.3], &|v| {
        DeviceParams {
            bound: v,
            ..DeviceParams::ideal(0.001)
        }
    }));
    out.extend(lines(
        "fig3c",
        "cycle-to-cycle noise",
        [10.0, 3.2, 1.0],
        &|v| DeviceParams {
            sigma_c2c: v,
            ..reference_device()
        },
    ));
    out.extend(lines(
        "fig3d",
        "device-to-device increment spread",
        [10.0, 3.2, 1.0],
        &|v| DeviceParams {
            sigma_d2d: v,
            ..reference_device()
        },
    ));
    out.extend(lines("fig3e", "bound spread", [10.0, 3.2, 1.0], &|v| {
        DeviceParams {
            sigma_bound: v,
            ..reference_device()
        }
    }));
    out.extend(lines(
        "fig3f",
        "down/up increment ratio",
        [0.5, 0.75, 0.9],
        &|v| DeviceParams {
            asym_down: 1.0 - v,
            ..reference_device()
        },
    ));
    out.extend(lines(
        "fig3g",
        "up/down increment ratio",
        [0.5, 0.75, 0.9],
        &|v| DeviceParams {
            asym_up: 1.0 - v,
            ..reference_device()
        },
    ));
    out.extend(lines(
        "fig3h",
        "up/down ratio spread",
        [0.4, 0.2, 0.06],
        &|v| DeviceParams {
            sigma_asym: v,
            ..reference_device()
        },
    ));
    for (i, sigma) in [1.0, 0.6, 0.1].into_iter().enumerate() {
        out.push(
            stress(
                format!("fig3i.line{}", i + 1),
                format!("read noise = {sigma}"),
                reference_device(),
            )
            .with_readout(noisy_readout(sigma)),
        );
    }

    let r = reference_device();
    let thresholds = [
        (
            "c2c",
            DeviceParams {
                sigma_c2c: SIGMA_C2C,
                ..r
            },
        ),
        (
            "d2d",
            DeviceParams {
                sigma_d2d: SIGMA_D2D,
                ..r
            },
        ),
        (
            "bound_spread",
            DeviceParams {
                sigma_bound: SIGMA_BOUND,
                ..r
            },
        ),
        (
            "asym_down",
            DeviceParams {
                asym_down: ASYM_GLOBAL,
                ..r
            },
        ),
        (
            "asym_up",
            DeviceParams {
                asym_up: ASYM_GLOBAL,
                ..r
            },
        ),
        (
            "asym_spread",
            DeviceParams {
                sigma_asym: SIGMA_ASYM,
                ..r
            },
        ),
    ];
    for (tag, d) in thresholds {
        out.push(stress(
            format!("fig4a.{tag}"),
            format!("{tag} at its threshold"),
            d,
        ));
    }
    out.push(
        stress(
            "fig4a.read_noise".into(),
            "read noise at its threshold".into(),
            r,
        )
        .with_readout(noisy_readout(READ_NOISE)),
    );
    let model1 = DeviceParams {
        sigma_c2c: SIGMA_C2C,
        sigma_d2d: SIGMA_D2D,
        sigma_bound: SIGMA_BOUND,
        asym_down: ASYM_GLOBAL,
        sigma_asym: SIGMA_ASYM,
        ..r
    };
    out.push(
        stress(
            "fig4b.model1".into(),
            "all parameters at threshold".into(),
            model1,
        )
        .with_readout(noisy_readout(READ_NOISE)),
    );
    let model2 = DeviceParams {
        sigma_c2c: SIGMA_C2C,
        sigma_d2d: SIGMA_D2D,
        sigma_bound: SIGMA_BOUND,
        ..r
    };
    out.push(stress(
        "fig4b.model2".into(),
        "c2c, d2d and bound spread at threshold".into(),
        model2,
    ));
    let (d3, r3) = model3();
    out.push(
        stress(
            "fig4b.model3".into(),
            "30% spreads, 2% ratio spread, 5% read noise".into(),
            d3,
        )
        .with_readout(r3),
    );

    let clip = |r: ReadoutConfig, alpha: f64| ReadoutConfig {
        alpha_bound: alpha,
        ..r
    };
    let nlf = [
        (
            "curve1",
            "model 3, |alpha| = 3 on sigmoid layers",
            Readout {
                hidden: clip(r3.hidden, 3.0),
                output: r3.output,
            },
        ),
        (
            "curve2",
            "model 3, |alpha| = 3 on all layers",
            Readout {
                hidden: clip(r3.hidden, 3.0),
                output: clip(r3.output, 3.0),
            },
        ),
        (
            "curve3",
            "model 3, |alpha| = 12 on all layers",
            Readout {
                hidden: clip(r3.hidden, 12.0),
                output: clip(r3.output, 12.0),
            },
        ),
    ];
    for (tag, summary, readout) in nlf {
        out.push(stress(format!("fig5b.{tag}"), summary.into(), d3).with_readout(readout));
    }
    out
}

/// Experiments named `query` exactly, or whose name starts with `query.`.
pub fn find(query: &str) -> Result<Vec<ExperimentSpec>> {
    let all = catalog();
    if let Some(e) = all.iter().find(|e| e.name == query) {
        return Ok(vec![e.clone()]);
    }
    let prefix = format!("{query}.");
    let hits: Vec<_> = all
        .into_iter()
        .filter(|e| e.name.starts_with(&prefix))
        .collect();
    if hits.is_empty() {
        return Err(Error::UnknownExperiment(query.to_string()));
    }
    Ok(hits)
}
