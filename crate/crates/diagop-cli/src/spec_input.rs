//! Operator inputs: JSON spec files or built-in family descriptors.
//!
//! A descriptor is either a path to an operator JSON file or a family name
//! with optional parameters, e.g. `B_t(t=0.5)`, `A_F(pred=even)`,
//! `A_F(pred=set:1;4;9)`, `rationals(m=1,variant=b)`, `example41_A`.

use std::collections::BTreeSet;
use std::path::Path;

use diagop::family::{make_family, EnumerationVariant, Family, IndicatorSet};
use diagop::OperatorSpec;

use crate::CliError;

pub fn load_operator(desc: &str, accumulation_bound: u32) -> Result<OperatorSpec, CliError> {
    if Path::new(desc).exists() || desc.ends_with(".json") {
        let text = std::fs::read_to_string(desc)
            .map_err(|e| CliError::Input(format!("reading {desc}: {e}")))?;
        let value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Input(format!("parsing {desc}: {e}")))?;
        return OperatorSpec::from_json(&value)
            .map_err(|e| CliError::Input(format!("loading {desc}: {e}")));
    }
    let family = parse_family(desc, accumulation_bound)?;
    make_family(&family).map_err(CliError::Domain)
}

fn parse_family(desc: &str, accumulation_bound: u32) -> Result<Family, CliError> {
    let bad = |msg: String| CliError::Input(msg);
    let (name, args) = match desc.find('(') {
        None => (desc.trim(), Vec::new()),
        Some(open) => {
            if !desc.ends_with(')') {
                return Err(bad(format!("unbalanced parentheses in `{desc}`")));
            }
            let inner = &desc[open + 1..desc.len() - 1];
            let args: Vec<(&str, &str)> = inner
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|kv| {
                    kv.split_once('=')
                        .map(|(k, v)| (k.trim(), v.trim()))
                        .ok_or_else(|| bad(format!("expected key=value in `{kv}`")))
                })
                .collect::<Result<_, _>>()?;
            (desc[..open].trim(), args)
        }
    };
    let get = |key: &str| args.iter().find(|(k, _)| *k == key).map(|(_, v)| *v);
    let parse_f64 = |key: &str| -> Result<f64, CliError> {
        get(key)
            .ok_or_else(|| bad(format!("family `{name}` needs `{key}=...`")))?
            .parse()
            .map_err(|e| bad(format!("bad `{key}`: {e}")))
    };
    match name {
        "example41_A" => Ok(Family::Example41A),
        "example41_B" => Ok(Family::Example41B),
        "A_t" => Ok(Family::At { t: parse_f64("t")? }),
        "B_t" => {
            let bound = match get("bound") {
                Some(v) => v.parse().map_err(|e| bad(format!("bad `bound`: {e}")))?,
                None => accumulation_bound,
            };
            Ok(Family::Bt { t: parse_f64("t")?, bound })
        }
        "A_F" => {
            let pred = get("pred").ok_or_else(|| bad("A_F needs `pred=...`".into()))?;
            let set = if pred == "even" {
                IndicatorSet::Even
            } else if pred == "odd" {
                IndicatorSet::Odd
            } else if let Some(p) = pred.strip_prefix("upto:") {
                IndicatorSet::UpTo(p.parse().map_err(|e| bad(format!("bad bound: {e}")))?)
            } else if let Some(list) = pred.strip_prefix("set:") {
                let parsed: Result<BTreeSet<u64>, _> =
                    list.split(';').map(|x| x.trim().parse()).collect();
                IndicatorSet::Explicit(parsed.map_err(|e| bad(format!("bad set: {e}")))?)
            } else {
                return Err(bad(format!(
                    "unknown predicate `{pred}` (even | odd | upto:N | set:a;b;c)"
                )));
            };
            Ok(Family::Indicator(set))
        }
        "rationals" => {
            let window = get("m")
                .unwrap_or("1")
                .parse()
                .map_err(|e| bad(format!("bad `m`: {e}")))?;
            let variant = match get("variant").unwrap_or("a") {
                "a" => EnumerationVariant::Single,
                "b" => EnumerationVariant::PairSwapped,
                "c" => EnumerationVariant::Doubled,
                other => return Err(bad(format!("unknown variant `{other}` (a | b | c)"))),
            };
            Ok(Family::Rationals { window, variant })
        }
        other => Err(bad(format!(
            "unknown family `{other}` (example41_A | example41_B | A_t | B_t | A_F | rationals) \
             and no such file"
        ))),
    }
}
