//! Built-in scenarios.

use crate::config::FileConfig;
use crate::CliError;

pub const PRESETS: [(&str, &str); 5] = [
    ("far_field_4x4", include_str!("../presets/far_field_4x4.toml")),
    ("far_field_8x8", include_str!("../presets/far_field_8x8.toml")),
    ("far_field_16x16", include_str!("../presets/far_field_16x16.toml")),
    ("near_field_4x4", include_str!("../presets/near_field_4x4.toml")),
    ("near_field_8x8", include_str!("../presets/near_field_8x8.toml")),
];

pub fn preset_names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|p| p.0)
}

pub fn preset(name: &str) -> Result<FileConfig, CliError> {
    let (_, text) = PRESETS.iter().find(|p| p.0 == name).ok_or_else(|| {
        CliError::Usage(format!(
            "unknown preset `{name}`; available: {}",
            preset_names().collect::<Vec<_>>().join(", ")
        ))
    })?;
    FileConfig::parse(text)
}
