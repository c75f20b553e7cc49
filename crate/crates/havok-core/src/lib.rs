//! Decomposition of scalar time series into intermittently forced
//! linear systems via Hankel/SVD time-delay embedding, plus the
//! statistics that characterize the forcing term: burst durations,
//! fat-tailed distributions, dominant spectral bandwidth, and Morse
//! wavelet scalograms.
//!
//! The crate is `no_std`-compatible (`alloc` required); disable the
//! default `std` feature for freestanding use. The `parallel` feature
//! computes scalogram rows on a thread pool without changing any
//! result bit.
//!
//! Typical flow:
//!
//! ```
//! use havok_core::{embedding, havok, intermittency, RankPolicy, TimeSeries};
//!
//! let values: Vec<f64> = (0..600)
//!     .map(|k| (0.02 * k as f64).sin() + 0.4 * (0.11 * k as f64).sin())
//!     .collect();
//! let series = TimeSeries::new(values, 1.0, 0.0, "demo").unwrap();
//! let emb = embedding::embed(&series, 12, 1, RankPolicy::Fixed(4)).unwrap();
//! let model = havok::fit(&emb.coordinates(), havok::FitMode::Discrete).unwrap();
//! let bursts = intermittency::detect_bursts(&emb.forcing(), 0.12, 0.0, 0.0).unwrap();
//! assert_eq!(model.r, 4);
//! assert!(bursts.threshold > 0.0);
//! ```

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub use nalgebra;

pub mod embedding;
pub mod error;
pub mod fft;
pub mod filter;
pub mod havok;
pub mod intermittency;
mod linalg;
pub mod physio;
pub mod series;
pub mod spectral;
pub mod stats;
pub mod systems;
pub mod wavelet;

pub use embedding::{build_hankel, decompose, embed, select_rank, DelayEmbedding, RankPolicy};
pub use error::{Error, Result};
pub use havok::{fit, simulate, CoordinateSeries, FitMode, ForcingSeries, HavokModel};
pub use intermittency::{
    burst_statistics, detect_bursts, estimate_pdf, pearson_test, Binning, Burst, BurstAnalysis,
    BurstStatistics, DistributionEstimate, PearsonResult,
};
pub use series::TimeSeries;
pub use spectral::{amplitude_spectrum, dominant_bandwidth, windowed_spectra, SpectrumResult};
pub use wavelet::{cwt_morse, MorseWavelet, Scalogram};
