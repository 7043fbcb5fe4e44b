//! Flag/config-file layering. Every subcommand accepts `--config FILE`, a flat
//! TOML document whose keys are the long flag names; flags win over the file.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

/// Overlay the flags given on the command line onto the config file.
pub fn resolve<T: Serialize + DeserializeOwned + Clone>(
    flags: &T,
    file: Option<&Path>,
) -> CliResult<T> {
    let Some(path) = file else {
        return Ok(flags.clone());
    };
    let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
    let mut table: toml::Table =
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let given = toml::Table::try_from(flags).map_err(|e| CliError::Usage(e.to_string()))?;
    table.extend(given);
    table
        .try_into()
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

/// Header lines embedding the schema version and the resolved configuration.
pub fn header<C: Serialize>(config: &C) -> String {
    let json = serde_json::to_string(config).expect("configs serialize");
    format!("# schema_version={SCHEMA_VERSION}\n# config={json}\n")
}

pub fn probability(name: &str, x: f64) -> CliResult<f64> {
    if x > 0.0 && x < 1.0 {
        Ok(x)
    } else {
        Err(CliError::Usage(format!(
            "--{name} must lie in (0, 1), got {x}"
        )))
    }
}

pub fn required<T>(name: &str, x: Option<T>) -> CliResult<T> {
    x.ok_or_else(|| CliError::Usage(format!("--{name} is required")))
}
