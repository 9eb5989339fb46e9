//! Run configuration: JSON with a fixed schema, unknown keys rejected.

use std::fmt;
use std::path::Path;

use serde::Deserialize;
use telescope_core::perm::Permutation;
use telescope_core::selfsim::{parse_named_word, WreathRecursion};
use telescope_core::telescope::{build_telescope, TelescopeGroup};

/// Path that selects the embedded demo configuration.
pub const BUILTIN_DEMO: &str = "builtin:demo";
pub const DEMO_CONFIG: &str = include_str!("../configs/demo.json");

#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub group: GroupSpec,
    pub levels: Vec<usize>,
    #[serde(default)]
    pub basepoints: Basepoints,
    #[serde(default)]
    pub ball_radius: usize,
    #[serde(default)]
    pub word_sample: WordSample,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_horizon")]
    pub horizon_factor: usize,
    #[serde(default = "default_output")]
    pub output_path: String,
}

fn default_horizon() -> usize {
    2
}

fn default_output() -> String {
    "certificate.json".into()
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(untagged)]
pub enum GroupSpec {
    Preset(String),
    Inline(InlineGroup),
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineGroup {
    pub arity: usize,
    pub generators: Vec<InlineGenerator>,
    #[serde(default = "default_contracting")]
    pub contracting: bool,
}

fn default_contracting() -> bool {
    true
}

/// `root` in cycle notation on `0..arity`; `sections` are words in the generator names.
#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineGenerator {
    pub name: String,
    pub root: String,
    pub sections: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(untagged)]
pub enum Basepoints {
    Keyword(String),
    List(Vec<usize>),
}

impl Default for Basepoints {
    fn default() -> Self {
        Basepoints::Keyword("identity".into())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WordSample {
    pub count: usize,
    pub max_length: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error at line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ConfigError {}

/// A validated configuration with its group and telescope built.
#[derive(Debug)]
pub struct Setup {
    pub config: RunConfig,
    pub bytes: Vec<u8>,
    pub recursion: WreathRecursion,
    pub telescope: TelescopeGroup,
}

/// 1-based line of the first occurrence of `"key"`, or 1.
fn line_of(text: &str, key: &str) -> usize {
    let needle = format!("\"{key}\"");
    text.find(&needle)
        .map_or(1, |at| text[..at].matches('\n').count() + 1)
}

fn error_at(text: &str, key: &str, message: impl fmt::Display) -> ConfigError {
    ConfigError {
        line: line_of(text, key),
        message: message.to_string(),
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<RunConfig, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError {
            line: e.line().max(1),
            message: e.to_string(),
        })
    }

    pub fn recursion(&self) -> Result<WreathRecursion, String> {
        match &self.group {
            GroupSpec::Preset(name) => WreathRecursion::preset(name).map_err(|e| e.to_string()),
            GroupSpec::Inline(g) => {
                let names: Vec<String> = g.generators.iter().map(|x| x.name.clone()).collect();
                let mut roots = Vec::new();
                let mut sections = Vec::new();
                for x in &g.generators {
                    roots.push(
                        Permutation::parse_cycles(g.arity, &x.root)
                            .map_err(|e| format!("generator {}: {e}", x.name))?,
                    );
                    sections.push(
                        x.sections
                            .iter()
                            .map(|s| parse_named_word(&names, s))
                            .collect::<Result<Vec<_>, _>>()
                            .map_err(|e| format!("generator {}: {e}", x.name))?,
                    );
                }
                WreathRecursion::new(g.arity, names, roots, sections, g.contracting)
                    .map_err(|e| e.to_string())
            }
        }
    }

    pub fn basepoint_list(&self) -> Result<Vec<usize>, String> {
        match &self.basepoints {
            Basepoints::Keyword(k) if k == "identity" => Ok(vec![0; self.levels.len()]),
            Basepoints::Keyword(k) => Err(format!("unknown basepoint keyword {k:?}")),
            Basepoints::List(list) if list.len() == self.levels.len() => Ok(list.clone()),
            Basepoints::List(list) => Err(format!(
                "{} basepoints given for {} levels",
                list.len(),
                self.levels.len()
            )),
        }
    }
}

impl Setup {
    pub fn from_text(text: &str) -> Result<Setup, ConfigError> {
        let config = RunConfig::parse(text)?;
        if config.levels.is_empty() {
            return Err(error_at(text, "levels", "levels must not be empty"));
        }
        if config.levels[0] == 0 || config.levels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(error_at(
                text,
                "levels",
                "levels must be positive and strictly increasing",
            ));
        }
        if config.horizon_factor == 0 {
            return Err(error_at(
                text,
                "horizon_factor",
                "horizon_factor must be at least 1",
            ));
        }
        let recursion = config.recursion().map_err(|e| error_at(text, "group", e))?;
        let basepoints = config
            .basepoint_list()
            .map_err(|e| error_at(text, "basepoints", e))?;
        let top = *config.levels.last().expect("nonempty");
        if top > 24
            || recursion
                .arity()
                .checked_pow(top as u32)
                .is_none_or(|d| d > 1 << 20)
        {
            return Err(error_at(
                text,
                "levels",
                format!("level {top} is too deep to materialize"),
            ));
        }
        let telescope = build_telescope(&recursion, &config.levels, &basepoints)
            .map_err(|e| error_at(text, "basepoints", e))?;
        Ok(Setup {
            config,
            bytes: text.as_bytes().to_vec(),
            recursion,
            telescope,
        })
    }

    /// Reads a config file, or the embedded demo for [`BUILTIN_DEMO`].
    pub fn load(path: &str) -> anyhow::Result<Setup> {
        let text = if path == BUILTIN_DEMO {
            DEMO_CONFIG.to_string()
        } else {
            std::fs::read_to_string(Path::new(path))
                .map_err(|e| anyhow::anyhow!("cannot read config {path}: {e}"))?
        };
        Ok(Setup::from_text(&text)?)
    }
}
