//! Flat key/value experiment configuration files.
//!
//! Format: one `key = value` pair per line, `#` starts a comment, blank
//! lines ignored, later keys override earlier ones. The schema is documented
//! in `docs/config.md`; command-line flags override file values.

use std::collections::BTreeMap;
use std::path::Path;

use crate::cost::CostModel;
use crate::error::{Error, Result};
use crate::source::SourceSpec;

#[derive(Clone, Debug, Default)]
pub struct FileConfig {
    map: BTreeMap<String, String>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Domain(format!(
                    "config line {}: expected `key = value`, got {raw:?}",
                    lineno + 1
                )));
            };
            map.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(FileConfig { map })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(|s| s.as_str())
    }

    pub fn entries(&self) -> impl Iterator<Item = (&String, &String)> {
        self.map.iter()
    }
}

fn parse_f64_list(s: &str, what: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| Error::Domain(format!("{what}: bad number {x:?}")))
        })
        .collect()
}

/// Parse a source description:
/// `uniform-seed`, `memoryless:p1,p2,...`, or
/// `markov:init=p1,p2;rows=a,b|c,d` (rows separated by `|`).
pub fn parse_source(s: &str) -> Result<SourceSpec> {
    let s = s.trim();
    if s == "uniform-seed" {
        return Ok(SourceSpec::UniformSeed);
    }
    if let Some(rest) = s.strip_prefix("memoryless:") {
        return SourceSpec::memoryless(parse_f64_list(rest, "memoryless probabilities")?);
    }
    if let Some(rest) = s.strip_prefix("markov:") {
        let mut init = None;
        let mut rows = None;
        for part in rest.split(';') {
            if let Some(v) = part.strip_prefix("init=") {
                init = Some(parse_f64_list(v, "markov init")?);
            } else if let Some(v) = part.strip_prefix("rows=") {
                rows = Some(
                    v.split('|')
                        .map(|row| parse_f64_list(row, "markov row"))
                        .collect::<Result<Vec<_>>>()?,
                );
            } else {
                return Err(Error::Domain(format!(
                    "markov source: unknown part {part:?}"
                )));
            }
        }
        let init = init.ok_or_else(|| Error::Domain("markov source: missing init=".into()))?;
        let rows = rows.ok_or_else(|| Error::Domain("markov source: missing rows=".into()))?;
        return SourceSpec::markov(init, rows);
    }
    Err(Error::Domain(format!(
        "unknown source {s:?}; expected uniform-seed, memoryless:..., or markov:..."
    )))
}

/// Assemble a cost model from its textual pieces.
pub fn build_cost(
    kind: &str,
    source: Option<&str>,
    tameness_c: Option<f64>,
    tameness_epsilon: Option<f64>,
    max_depth: Option<usize>,
) -> Result<CostModel> {
    let mut cost = match kind.trim() {
        "key" | "key-comparisons" => CostModel::key_comparisons(),
        "symbol" | "symbol-comparisons" => {
            let src = source.ok_or_else(|| {
                Error::Domain("symbol cost needs --source (or `source` in the config)".into())
            })?;
            CostModel::symbol_comparisons(parse_source(src)?)?
        }
        other => {
            return Err(Error::Domain(format!(
                "unknown cost kind {other:?}; expected key or symbol"
            )))
        }
    };
    match (tameness_c, tameness_epsilon) {
        (Some(c), Some(eps)) => cost = cost.with_tameness(c, eps)?,
        (None, None) => {}
        _ => {
            return Err(Error::Domain(
                "declare both tameness c and epsilon, or neither".into(),
            ))
        }
    }
    if let Some(d) = max_depth {
        cost = cost.with_max_depth(d);
    }
    Ok(cost)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_key_values() {
        let cfg = FileConfig::parse("alpha = 0.5\n# comment\nreps=100\n\ncost = key\n").unwrap();
        assert_eq!(cfg.get("alpha"), Some("0.5"));
        assert_eq!(cfg.get("reps"), Some("100"));
        assert_eq!(cfg.get("cost"), Some("key"));
        assert_eq!(cfg.get("missing"), None);
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(FileConfig::parse("alpha 0.5").is_err());
    }

    #[test]
    fn parses_sources() {
        assert_eq!(
            parse_source("uniform-seed").unwrap(),
            SourceSpec::UniformSeed
        );
        let m = parse_source("memoryless:0.5,0.5").unwrap();
        assert_eq!(m.alphabet_size(), Some(2));
        let mk = parse_source("markov:init=0.5,0.5;rows=0.9,0.1|0.2,0.8").unwrap();
        assert_eq!(mk.alphabet_size(), Some(2));
        assert!(parse_source("bogus:1").is_err());
        assert!(parse_source("memoryless:0.5,0.6").is_err());
    }

    #[test]
    fn builds_cost_models() {
        assert!(!build_cost("key", None, None, None, None)
            .unwrap()
            .is_symbol());
        let sym = build_cost(
            "symbol",
            Some("memoryless:0.5,0.5"),
            Some(5.5),
            Some(0.1),
            None,
        )
        .unwrap();
        assert!(sym.is_symbol());
        assert_eq!(sym.declared_tameness().unwrap().epsilon, 0.1);
        assert!(build_cost("symbol", None, None, None, None).is_err());
        assert!(build_cost("symbol", Some("memoryless:0.5,0.5"), Some(1.0), None, None).is_err());
    }
}
