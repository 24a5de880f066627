use std::path::Path;

use qkz_core::algebra::{Rat, Scalar};
use qkz_core::qkz::LatticePath;
use qkz_core::rmatrix::RMode;
use qkz_core::{Error, Result};
use serde::{Deserialize, Serialize};

/// JSON run configuration. Every field is optional; command-line flags take
/// precedence over the file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<RMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hbar: Option<Rat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<LatticePath>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vector: Option<Vec<Rat>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relation: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub identification: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<Rat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<Rat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<Rat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<Rat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_prime: Option<Rat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub central: Option<Rat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub i: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hbar: Option<Rat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<Rat>,
    #[serde(default)]
    pub points: Vec<Rat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<RMode>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidConfig(format!("config: {e}")))
    }
}

pub fn parse_rat(s: &str) -> Result<Rat> {
    s.parse().map_err(|e: Error| Error::InvalidConfig(e.to_string()))
}

pub fn parse_rats(items: &[String]) -> Result<Vec<Rat>> {
    items.iter().map(|s| parse_rat(s)).collect()
}

pub fn nonzero_hbar(h: Rat) -> Result<Rat> {
    if h.is_zero() {
        return Err(Error::InvalidConfig("hbar must be nonzero".into()));
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let text = r#"{"seed": 3, "system": {"n": 2, "hbar": "1/2", "level": "1", "points": ["0", "-3/4"],
                       "mode": {"normalized": {"order": 3}}}, "path": {"steps": [{"i": 1, "sign": -1}]}}"#;
        let cfg = RunConfig::parse(text).unwrap();
        let sys = cfg.system.as_ref().unwrap();
        assert_eq!(sys.points[1], Rat::new(-3, 4));
        assert_eq!(sys.mode, Some(RMode::Normalized { order: 3 }));
        let again = RunConfig::parse(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn rejects_unknown_fields_and_bad_numbers() {
        assert!(matches!(RunConfig::parse(r#"{"sede": 1}"#), Err(Error::InvalidConfig(_))));
        assert!(matches!(RunConfig::parse(r#"{"hbar": "1/0"}"#), Err(Error::InvalidConfig(_))));
        assert!(matches!(RunConfig::parse(r#"{"hbar": 0.5}"#), Err(Error::InvalidConfig(_))));
    }
}
