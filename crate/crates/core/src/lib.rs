//! Simulation of DNN training on resistive processing unit (RPU) crossbar
//! arrays: stochastic pulse-coincidence updates, non-ideal analog devices and
//! readout, a fully connected MNIST trainer, an experiment harness, and the
//! tile/chip design arithmetic.

pub mod array;
pub mod error;
pub mod harness;
pub mod hw;
pub mod kv;
pub mod mnist;
pub mod network;
pub mod rng;
pub mod stochastic;

pub use array::{DeviceArraySpec, DeviceArrayState, DeviceParams, ReadoutConfig, WeightInit};
pub use error::{Error, Result};
pub use mnist::{load_dataset, Dataset};
pub use network::{GainRule, LrSchedule, Network, NetworkConfig, TrainConfig, TrainMode, Trainer};
pub use rng::{Purpose, StreamKey};
pub use stochastic::{StochasticStream, TranslatorConfig};
