//! Analysis configuration: TOML file plus command-line overrides.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use havok_core::{FitMode, RankPolicy};

/// Every pipeline knob, serializable as a single TOML (or JSON) file.
/// Command-line flags override file values field by field.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    /// Embedding dimension (Hankel rows).
    pub window_p: usize,
    /// Samples between successive delays.
    pub lag_tau: usize,
    /// "auto", "fixed", or "energy".
    pub rank_policy: String,
    /// Rank for the "fixed" policy.
    pub rank_fixed: usize,
    /// Energy fraction for the "energy" policy.
    pub rank_energy: f64,
    /// "discrete" or "derivative".
    pub mode: String,
    /// Burst threshold fraction of max squared forcing.
    pub psi: f64,
    /// Bursts shorter than this (seconds) are dropped.
    pub min_duration: f64,
    /// Bursts closer than this (seconds) are merged.
    pub merge_gap: f64,
    /// Dominant-band energy fraction.
    pub energy_fraction: f64,
    pub wavelet: WaveletConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct WaveletConfig {
    pub gamma: f64,
    pub time_bandwidth: f64,
    pub voices: usize,
}

impl Default for WaveletConfig {
    fn default() -> Self {
        Self { gamma: 3.0, time_bandwidth: 60.0, voices: 10 }
    }
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            window_p: 15,
            lag_tau: 1,
            rank_policy: "auto".into(),
            rank_fixed: 8,
            rank_energy: 0.99,
            mode: "discrete".into(),
            psi: 0.12,
            min_duration: 0.0,
            merge_gap: 0.0,
            energy_fraction: 0.95,
            wavelet: WaveletConfig::default(),
        }
    }
}

impl AnalysisConfig {
    pub fn from_toml_file(path: &std::path::Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("bad config {}: {e}", path.display()))
    }

    pub fn rank_policy(&self) -> Result<RankPolicy, String> {
        match self.rank_policy.as_str() {
            "auto" => Ok(RankPolicy::Auto),
            "fixed" => Ok(RankPolicy::Fixed(self.rank_fixed)),
            "energy" => Ok(RankPolicy::Energy(self.rank_energy)),
            other => Err(format!("unknown rank policy '{other}' (auto|fixed|energy)")),
        }
    }

    pub fn fit_mode(&self) -> Result<FitMode, String> {
        match self.mode.as_str() {
            "discrete" => Ok(FitMode::Discrete),
            "derivative" => Ok(FitMode::Derivative),
            other => Err(format!("unknown fit mode '{other}' (discrete|derivative)")),
        }
    }

    /// Hex SHA-256 of the canonical JSON encoding, recorded in reports
    /// so identical configurations are recognizable.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        let mut hasher = Sha256::new();
        hasher.update(canonical.as_bytes());
        let digest = hasher.finalize();
        let mut out = String::with_capacity(64);
        for byte in digest {
            out.push_str(&format!("{byte:02x}"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_toml() {
        let cfg = AnalysisConfig::default();
        let text = toml::to_string(&cfg).unwrap();
        let back: AnalysisConfig = toml::from_str(&text).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn partial_files_fall_back_to_defaults() {
        let cfg: AnalysisConfig = toml::from_str("psi = 0.2\nwindow_p = 100\n").unwrap();
        assert_eq!(cfg.psi, 0.2);
        assert_eq!(cfg.window_p, 100);
        assert_eq!(cfg.lag_tau, 1);
        assert_eq!(cfg.wavelet.voices, 10);
    }

    #[test]
    fn hash_tracks_content() {
        let a = AnalysisConfig::default();
        let mut b = AnalysisConfig::default();
        assert_eq!(a.hash(), b.hash());
        b.psi = 0.13;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<AnalysisConfig>("pssi = 0.2\n").is_err());
    }
}
