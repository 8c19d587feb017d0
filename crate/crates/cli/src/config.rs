//! TOML run configuration. Every section is optional and every key inside a
//! section is optional; command-line flags take precedence over it.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Deserialize;

use spanalign::baseline::BeadPenalties;
use spanalign::optimize::{CPrime, OneSidedPolicy};
use spanalign::predict::NullMode;
use spanalign::snap::BoundaryRule;
use spanalign::symmetrize::MissingDirection;
use spanalign::synth::{NullSampling, SamplingMode, SquadVersion};
use spanalign::{Error, Result};

/// Environment variable naming a default config file.
pub const CONFIG_ENV: &str = "SPANALIGN_CONFIG";

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub global: GlobalSection,
    #[serde(default)]
    pub synth: SynthSection,
    #[serde(default)]
    pub score: ScoreSection,
    #[serde(default)]
    pub null: NullSection,
    #[serde(default)]
    pub snap: SnapSection,
    #[serde(default)]
    pub combine: CombineSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub sym: SymSection,
    #[serde(default)]
    pub baseline: BeadPenalties,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GlobalSection {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub log_level: Option<String>,
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSection {
    pub name: Option<String>,
    pub negatives: Option<usize>,
    pub mode: Option<SamplingMode>,
    pub max_query_tokens: Option<usize>,
    pub max_context_tokens: Option<usize>,
    pub squad_version: Option<SquadVersion>,
    pub null_cap: Option<f64>,
    pub null_sampling: Option<NullSampling>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScorerKind {
    Lexical,
    Planted,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScoreSection {
    pub scorer: Option<ScorerKind>,
    pub sharpness: Option<f64>,
    pub top_k: Option<usize>,
    pub max_sentences: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NullSection {
    pub mode: Option<NullMode>,
    pub tau: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnapSection {
    pub min_score: Option<f64>,
    pub boundary: Option<BoundaryRule>,
}

/// `c_prime` is a number or the string `"auto"`.
#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(try_from = "CPrimeValue")]
pub struct CPrimeSetting(pub CPrime);

#[derive(Deserialize)]
#[serde(untagged)]
enum CPrimeValue {
    Number(f64),
    Word(String),
}

impl TryFrom<CPrimeValue> for CPrimeSetting {
    type Error = String;

    fn try_from(v: CPrimeValue) -> std::result::Result<Self, String> {
        match v {
            CPrimeValue::Number(x) => Ok(CPrimeSetting(CPrime::Fixed(x))),
            CPrimeValue::Word(w) => parse_c_prime(&w).map(CPrimeSetting),
        }
    }
}

pub fn parse_c_prime(s: &str) -> std::result::Result<CPrime, String> {
    if s == "auto" {
        return Ok(CPrime::Auto);
    }
    s.parse::<f64>().map(CPrime::Fixed).map_err(|_| format!("expected a number or \"auto\", got {s:?}"))
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CombineSection {
    pub c: Option<f64>,
    pub c_prime: Option<CPrimeSetting>,
    pub one_sided: Option<OneSidedPolicy>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Exact,
    Greedy,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub kind: Option<SolverKind>,
    pub exact_cap: Option<usize>,
    pub emit_nulls: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymSection {
    pub theta: Option<f64>,
    pub missing: Option<MissingDirection>,
}

impl RunConfig {
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let line = e.span().map_or(1, |s| text[..s.start].matches('\n').count() + 1);
            Error::parse(origin, line, e.message())
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    /// The explicit path, else the environment default, else built-in
    /// defaults.
    pub fn resolve(explicit: Option<&Path>) -> Result<Self> {
        match explicit {
            Some(p) => Self::load(p),
            None => match std::env::var_os(CONFIG_ENV) {
                Some(p) if !p.is_empty() => Self::load(Path::new(&p)),
                _ => Ok(RunConfig::default()),
            },
        }
    }
}

/// Parses a flag value through the same names the config file accepts.
pub fn parse_named<T: DeserializeOwned>(s: &str) -> std::result::Result<T, String> {
    T::deserialize(serde::de::value::StrDeserializer::<serde::de::value::Error>::new(s)).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_default() {
        let c = RunConfig::parse("", "mem").unwrap();
        assert!(c.global.seed.is_none());
        assert_eq!(c.baseline, BeadPenalties::default());
    }

    #[test]
    fn sections_parse() {
        let c = RunConfig::parse(
            "[global]\nseed = 7\n[combine]\nc = 1.0\nc_prime = \"auto\"\n[snap]\nboundary = \"cover\"\n[baseline]\ntwo_two = 0.3\n",
            "mem",
        )
        .unwrap();
        assert_eq!(c.global.seed, Some(7));
        assert_eq!(c.combine.c_prime, Some(CPrimeSetting(CPrime::Auto)));
        assert_eq!(c.snap.boundary, Some(BoundaryRule::Cover));
        assert_eq!(c.baseline.two_two, 0.3);
        assert_eq!(c.baseline.one_zero, 0.25);
        let c = RunConfig::parse("[combine]\nc = 1\nc_prime = 0\n", "mem").unwrap();
        assert_eq!(c.combine.c, Some(1.0));
        assert_eq!(c.combine.c_prime, Some(CPrimeSetting(CPrime::Fixed(0.0))));
        assert!(RunConfig::parse("[combine]\nc_prime = \"half\"\n", "mem").is_err());
    }

    #[test]
    fn unknown_key_names_line() {
        let err = RunConfig::parse("[global]\nseed = 1\nbogus = 2\n", "run.toml").unwrap_err();
        match err {
            Error::Parse { origin, line, .. } => {
                assert_eq!(origin, "run.toml");
                assert_eq!(line, 3);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(RunConfig::parse("[nosuch]\n", "mem").is_err());
    }

    #[test]
    fn flag_names_match_config_names() {
        assert_eq!(parse_named::<BoundaryRule>("contain"), Ok(BoundaryRule::Contain));
        assert_eq!(parse_named::<NullMode>("na-token"), Ok(NullMode::NaToken));
        assert_eq!(parse_named::<SquadVersion>("v1.1"), Ok(SquadVersion::V1_1));
        assert!(parse_named::<BoundaryRule>("closest").is_err());
        assert_eq!(parse_c_prime("auto"), Ok(CPrime::Auto));
        assert_eq!(parse_c_prime("0.5"), Ok(CPrime::Fixed(0.5)));
        assert!(parse_c_prime("x").is_err());
    }
}
