//! Run configuration: a TOML file, command-line flags, or both (flags
//! win).

use std::path::{Path, PathBuf};

use fairstream_core::constraint::Proportion;
use fairstream_core::{AttributeSchema, FairnessConstraint, WindowSpec};
use serde::Deserialize;

use crate::source::SourceSpec;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot parse config {path}: {source}")]
    Parse {
        path: PathBuf,
        source: toml::de::Error,
    },
    #[error("schema values are required (--schema or config file)")]
    MissingSchema,
    #[error("proportions are required (--proportions or config file)")]
    MissingProportions,
    #[error("{0} proportions given for {1} schema values")]
    ProportionCount(usize, usize),
    #[error(transparent)]
    Invalid(#[from] fairstream_core::Error),
}

/// Fully validated run configuration.
#[derive(Debug, Clone)]
pub struct Config {
    pub schema: AttributeSchema,
    pub constraint: FairnessConstraint,
    pub spec: WindowSpec,
    pub source: SourceSpec,
    /// Items per second; unlimited when absent.
    pub rate: Option<u64>,
    /// Event sink path; stdout when absent.
    pub output: Option<PathBuf>,
    /// Emit a metrics snapshot every this many windows.
    pub metrics_every: u64,
}

/// The subset of settings a config file may carry.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    schema: Option<Vec<String>>,
    proportions: Option<Vec<String>>,
    window: Option<usize>,
    block: Option<usize>,
    landmark: Option<usize>,
    slide: Option<usize>,
    epsilon: Option<f64>,
    source: Option<String>,
    rate: Option<u64>,
    output: Option<PathBuf>,
    metrics_every: Option<u64>,
}

/// Flag-level overrides; every field beats the config file when present.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub schema: Option<Vec<String>>,
    pub proportions: Option<Vec<String>>,
    pub window: Option<usize>,
    pub block: Option<usize>,
    pub landmark: Option<usize>,
    pub slide: Option<usize>,
    pub epsilon: Option<f64>,
    pub source: Option<String>,
    pub rate: Option<u64>,
    pub output: Option<PathBuf>,
    pub metrics_every: Option<u64>,
}

/// Loads and validates the configuration. Defaults mirror the usual
/// deployment: window 1000, block 25, landmark 100, slide 1, ε 1.
pub fn load_config(path: Option<&Path>, flags: Overrides) -> Result<Config, ConfigError> {
    let file: ConfigFile = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|source| ConfigError::Read {
                path: p.to_path_buf(),
                source,
            })?;
            toml::from_str(&text).map_err(|source| ConfigError::Parse {
                path: p.to_path_buf(),
                source,
            })?
        }
        None => ConfigFile::default(),
    };

    let schema_values = flags
        .schema
        .or(file.schema)
        .ok_or(ConfigError::MissingSchema)?;
    let proportion_texts = flags
        .proportions
        .or(file.proportions)
        .ok_or(ConfigError::MissingProportions)?;
    if proportion_texts.len() != schema_values.len() {
        return Err(ConfigError::ProportionCount(
            proportion_texts.len(),
            schema_values.len(),
        ));
    }

    let schema = AttributeSchema::new(schema_values)?;
    let proportions = proportion_texts
        .iter()
        .map(|t| Proportion::parse(t))
        .collect::<Result<Vec<_>, _>>()?;
    let epsilon = flags.epsilon.or(file.epsilon).unwrap_or(1.0);
    let constraint = FairnessConstraint::from_proportions(proportions, epsilon)?;

    let spec = WindowSpec::new(
        flags.window.or(file.window).unwrap_or(1000),
        flags.block.or(file.block).unwrap_or(25),
        flags.slide.or(file.slide).unwrap_or(1),
        flags.landmark.or(file.landmark).unwrap_or(100),
    )?;

    let source = flags
        .source
        .or(file.source)
        .map(|s| SourceSpec::parse(&s))
        .unwrap_or(SourceSpec::Stdin);

    Ok(Config {
        schema,
        constraint,
        spec,
        source,
        rate: flags.rate.or(file.rate),
        output: flags.output.or(file.output),
        metrics_every: flags.metrics_every.or(file.metrics_every).unwrap_or(1000),
    })
}
