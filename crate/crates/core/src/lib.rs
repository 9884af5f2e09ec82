//! Short-term load forecasting for aggregated appliance-level power
//! consumption.
//!
//! The engine pairs an LSTM trained from scratch with backpropagation
//! through time with a small feedforward corrector network that learns the
//! mapping from input windows to past forecast errors and adds its estimate
//! to every new forecast. A data pipeline handles smart-meter CSV ingestion,
//! cleaning, percentile-based outlier replacement, category merging,
//! household aggregation, resampling, zero-center normalization, and
//! sliding-window construction; an evaluation layer provides MAPE, naive
//! baselines, and comparison reports.
//!
//! Everything is 64-bit floating point and deterministic: a fixed seeded RNG
//! drives initialization, shuffling, and the synthetic data generator, so
//! identical inputs and seeds reproduce identical results bit for bit.

pub mod corrector;
pub mod error;
pub mod eval;
pub mod lstm;
pub mod numerics;
pub mod pipeline;
pub mod training;

pub use corrector::{CorrectorParams, ResidualRecord};
pub use error::{Error, Result};
pub use eval::ForecastReport;
pub use lstm::{LstmParams, LstmState};
pub use numerics::{Matrix, Rng, Vector};
pub use pipeline::{Normalizer, RawTable, TimeSeries, WindowedDataset};
pub use training::{AdamState, TrainConfig};
