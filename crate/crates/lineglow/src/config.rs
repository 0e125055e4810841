//! JSON configuration file: grid settings and default render parameters.

use std::path::Path;

use lineglow_core::polyline::DEFAULT_MARGIN;
use lineglow_core::RenderParams;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub width: usize,
    pub height: usize,
    pub margin: f64,
    pub params: RenderParams,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            width: 512,
            height: 512,
            margin: DEFAULT_MARGIN,
            params: RenderParams::default(),
        }
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: Self = serde_json::from_str(&text).map_err(|e| Error::Row {
            path: path.into(),
            row: e.line() as u64,
            message: e.to_string(),
        })?;
        cfg.params.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use lineglow_core::Lighting;

    #[test]
    fn partial_file_fills_defaults() {
        let cfg: Config = serde_json::from_str(
            r#"{"width": 300, "params": {"phi": -10, "lighting": {"mode": "fixed_global", "azimuth": 135, "elevation": 60}}}"#,
        )
        .unwrap();
        assert_eq!(cfg.width, 300);
        assert_eq!(cfg.height, 512);
        assert_eq!(cfg.params.phi, -10.0);
        assert_eq!(cfg.params.sigma, RenderParams::default().sigma);
        assert!(matches!(cfg.params.lighting, Lighting::FixedGlobal { .. }));
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(serde_json::from_str::<Config>(r#"{"widht": 3}"#).is_err());
    }
}
