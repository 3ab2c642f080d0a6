use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Environment variable naming a JSON style file.
pub const STYLE_ENV: &str = "QVIZ_STYLE";

/// Visual constants for the renderers. Every field is optional in a style
/// file; missing ones keep their defaults.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, rename_all = "camelCase", deny_unknown_fields)]
pub struct StyleConfig {
    /// Pixels per horizontal layout unit (one character).
    pub unit_x: i64,
    /// Pixels per vertical layout unit (one text row).
    pub unit_y: i64,
    pub font_family: String,
    pub font_size: i64,
    pub stroke: String,
    pub box_fill: String,
    pub title_fill: String,
    pub edge_stroke: String,
    pub arrow_stroke: String,
    /// `stroke-dasharray` of ¬∃ boxes.
    pub dash_pattern: String,
    /// Pixel gap between the two lines of a ∀ box.
    pub double_gap: i64,
    /// Fill per shade index of negation boxes.
    pub shade_tints: Vec<String>,
    pub shade_opacity: String,
}

impl Default for StyleConfig {
    fn default() -> Self {
        StyleConfig {
            unit_x: 8,
            unit_y: 20,
            font_family: "monospace".into(),
            font_size: 13,
            stroke: "#333333".into(),
            box_fill: "#ffffff".into(),
            title_fill: "#eeeeee".into(),
            edge_stroke: "#555555".into(),
            arrow_stroke: "#1f5fbf".into(),
            dash_pattern: "6 4".into(),
            double_gap: 3,
            shade_tints: vec!["#f4f4f4".into(), "#d6d6d6".into()],
            shade_opacity: "0.8".into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum StyleError {
    #[error("cannot read style file {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid style file {path}: {source}")]
    Format {
        path: String,
        source: serde_json::Error,
    },
    #[error("invalid style: {0}")]
    Invalid(String),
}

impl StyleConfig {
    pub fn from_file(path: &Path) -> Result<StyleConfig, StyleError> {
        let text = std::fs::read_to_string(path).map_err(|source| StyleError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let style: StyleConfig =
            serde_json::from_str(&text).map_err(|source| StyleError::Format {
                path: path.display().to_string(),
                source,
            })?;
        style.validate()?;
        Ok(style)
    }

    /// Defaults, or the file named by `QVIZ_STYLE` when set.
    pub fn from_env() -> Result<StyleConfig, StyleError> {
        match std::env::var_os(STYLE_ENV) {
            Some(p) if !p.is_empty() => StyleConfig::from_file(Path::new(&p)),
            _ => Ok(StyleConfig::default()),
        }
    }

    pub fn validate(&self) -> Result<(), StyleError> {
        if self.unit_x <= 0 || self.unit_y <= 0 {
            return Err(StyleError::Invalid("units must be positive".into()));
        }
        if self.shade_tints.is_empty() {
            return Err(StyleError::Invalid("shadeTints must not be empty".into()));
        }
        Ok(())
    }

    pub fn tint(&self, shade: usize) -> &str {
        &self.shade_tints[shade % self.shade_tints.len()]
    }
}
