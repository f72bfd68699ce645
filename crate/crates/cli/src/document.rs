//! The JSON spec document and its conversion to an [`ActionSpec`].

use std::fmt;
use std::path::Path;

use normsq_core::exactlin::{parse_rat, Rat, RatVec};
use normsq_core::weights::{validate_spec, ActionSpec, RawSpec, SpecWarning};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightEntry {
    pub weight: Vec<i64>,
    pub multiplicity: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecDocument {
    pub rank: usize,
    pub weights: Vec<WeightEntry>,
    pub shift: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Vec<String>>,
}

/// A problem with the input, reported with the offending field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InputError(pub String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

fn to_i64(x: &Rat) -> Option<i64> {
    if !x.is_integer() {
        return None;
    }
    i64::try_from(x.to_integer()).ok()
}

fn parse_field(field: &str, s: &str) -> Result<Rat, InputError> {
    parse_rat(s).ok_or_else(|| InputError(format!("{field}: malformed rational \"{s}\"")))
}

fn parse_vector(field: &str, entries: &[String]) -> Result<RatVec, InputError> {
    entries
        .iter()
        .enumerate()
        .map(|(i, s)| parse_field(&format!("{field}[{i}]"), s))
        .collect::<Result<Vec<_>, _>>()
        .map(RatVec::new)
}

/// Parses a target given on the command line: comma-separated rationals,
/// optionally wrapped in parentheses.
pub fn parse_target_arg(s: &str) -> Result<RatVec, InputError> {
    let inner = s.trim();
    let inner = inner
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .unwrap_or(inner);
    if inner.trim().is_empty() {
        return Ok(RatVec::new(Vec::new()));
    }
    let parts: Vec<String> = inner.split(',').map(|p| p.trim().to_string()).collect();
    parse_vector("--target", &parts)
}

/// A validated spec with its target and any warnings.
#[derive(Clone, Debug)]
pub struct LoadedSpec {
    pub spec: ActionSpec,
    pub target: RatVec,
    pub warnings: Vec<SpecWarning>,
}

impl SpecDocument {
    pub fn from_json(text: &str) -> Result<Self, InputError> {
        serde_json::from_str(text).map_err(|e| InputError(format!("spec document: {e}")))
    }

    pub fn read(path: &Path) -> Result<Self, InputError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| InputError(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_raw(&self) -> Result<RawSpec, InputError> {
        let weights = self
            .weights
            .iter()
            .map(|w| {
                (
                    w.weight
                        .iter()
                        .map(|&x| Rat::from_integer(x.into()))
                        .collect(),
                    w.multiplicity,
                )
            })
            .collect();
        Ok(RawSpec {
            rank: self.rank,
            weights,
            shift: parse_vector("shift", &self.shift)?.into_entries(),
        })
    }

    /// Validates the document; an explicit target overrides the document's,
    /// and the origin is used when neither is given.
    pub fn load(&self, target_override: Option<&RatVec>) -> Result<LoadedSpec, InputError> {
        let raw = self.to_raw()?;
        let (spec, warnings) = validate_spec(&raw).map_err(|e| InputError(format!("spec: {e}")))?;
        let target = match (target_override, &self.target) {
            (Some(t), _) => t.clone(),
            (None, Some(t)) => parse_vector("target", t)?,
            (None, None) => RatVec::zeros(spec.rank()),
        };
        spec.check_target(&target)
            .map_err(|e| InputError(format!("target: {e}")))?;
        Ok(LoadedSpec {
            spec,
            target,
            warnings,
        })
    }

    /// The document describing a validated spec (duplicates merged).
    pub fn echo(spec: &ActionSpec, target: Option<&RatVec>) -> Result<Self, InputError> {
        let weights = spec
            .weights()
            .iter()
            .map(|w| {
                let weight = w
                    .weight
                    .entries()
                    .iter()
                    .map(|x| {
                        to_i64(x)
                            .ok_or_else(|| InputError(format!("non-integer weight {}", w.weight)))
                    })
                    .collect::<Result<_, _>>()?;
                Ok(WeightEntry {
                    weight,
                    multiplicity: w.multiplicity as i64,
                })
            })
            .collect::<Result<_, InputError>>()?;
        Ok(SpecDocument {
            rank: spec.rank(),
            weights,
            shift: spec
                .shift()
                .entries()
                .iter()
                .map(|x| x.to_string())
                .collect(),
            target: target.map(|t| t.entries().iter().map(|x| x.to_string()).collect()),
        })
    }

    pub fn to_compact_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const C3: &str = r#"{"rank": 2,
        "weights": [{"weight": [1, 0], "multiplicity": 1},
                    {"weight": [0, 1], "multiplicity": 1},
                    {"weight": [1, -1], "multiplicity": 1}],
        "shift": ["-3", "1"]}"#;

    #[test]
    fn parses_example() {
        let doc = SpecDocument::from_json(C3).unwrap();
        let loaded = doc.load(None).unwrap();
        assert_eq!(loaded.spec.coordinate_count(), 3);
        assert_eq!(loaded.target, RatVec::from_ints(&[0, 0]));
    }

    #[test]
    fn bad_rational_names_field() {
        let doc = SpecDocument::from_json(&C3.replace("\"-3\"", "\"1/0\"")).unwrap();
        let err = doc.load(None).unwrap_err();
        assert!(err.0.contains("shift[0]"), "{err}");
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = C3.replace("\"rank\": 2,", "\"rank\": 2, \"colour\": 1,");
        let err = SpecDocument::from_json(&text).unwrap_err();
        assert!(err.0.contains("colour"), "{err}");
    }

    #[test]
    fn target_argument_forms() {
        assert_eq!(
            parse_target_arg("(0,1/2)").unwrap(),
            RatVec::new(vec![
                Rat::from_integer(0.into()),
                Rat::new(1.into(), 2.into())
            ])
        );
        assert_eq!(parse_target_arg("3").unwrap(), RatVec::from_ints(&[3]));
        assert!(parse_target_arg("1,x")
            .unwrap_err()
            .0
            .contains("--target[1]"));
    }

    #[test]
    fn echo_round_trips() {
        let doc = SpecDocument::from_json(C3).unwrap();
        let loaded = doc.load(None).unwrap();
        let echo = SpecDocument::echo(&loaded.spec, Some(&loaded.target)).unwrap();
        let again = SpecDocument::from_json(&echo.to_compact_json())
            .unwrap()
            .load(None)
            .unwrap();
        assert_eq!(again.spec, loaded.spec);
        assert_eq!(again.target, loaded.target);
    }
}
