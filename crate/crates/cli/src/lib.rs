//! Configuration, subcommand dispatch and deterministic output writing for
//! the `boussinesq` command-line tool.

pub mod config;
pub mod error;
pub mod manifest;
pub mod run;

pub use config::{parse_config, Command, ConfigFile, Overrides, RunConfig};
pub use error::CliError;
pub use manifest::{sha256_hex, verify_manifest, Artifacts, MANIFEST_NAME};
pub use run::{execute, run, Outcome};

use std::path::Path;

/// Loads the config file (optional for `gauss`) and applies overrides.
pub fn load(command: Command, config: Option<&Path>, ov: &Overrides) -> Result<RunConfig, CliError> {
    match config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            parse_config(&text, command, ov)
        }
        None if command == Command::Gauss => config::gauss_only(ov),
        None => Err(CliError::Config(format!("`{command}` needs --config PATH"))),
    }
}

/// Writes a lone error record and its manifest into `dir`.
pub fn write_error(dir: &Path, err: &CliError) -> Result<(), CliError> {
    let mut a = Artifacts::new();
    a.add_text(run::ERROR_RECORD, err.to_json() + "\n");
    a.write_to(dir).map(drop)
}
