use std::collections::BTreeMap;
use std::fs;

use dcs_core::rational::{format_rational, parse_rational, Rational};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ABSENT: i32 = 1;
pub const EXIT_BUDGET: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

/// An exact comparison `lhs rel rhs` between two rationals.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub claim: String,
    pub lhs: String,
    pub rel: String,
    pub rhs: String,
    pub holds: bool,
}

impl Certificate {
    pub fn new(claim: impl Into<String>, lhs: &Rational, rel: &str, rhs: &Rational) -> Self {
        let holds = compare(lhs, rel, rhs).unwrap_or(false);
        Self {
            claim: claim.into(),
            lhs: format_rational(lhs),
            rel: rel.to_string(),
            rhs: format_rational(rhs),
            holds,
        }
    }

    /// Recompute the comparison from the recorded strings.
    pub fn recheck(&self) -> bool {
        let (Ok(l), Ok(r)) = (parse_rational(&self.lhs), parse_rational(&self.rhs)) else {
            return false;
        };
        compare(&l, &self.rel, &r) == Some(self.holds)
    }
}

fn compare(l: &Rational, rel: &str, r: &Rational) -> Option<bool> {
    Some(match rel {
        "=" => l == r,
        "<=" => l <= r,
        ">=" => l >= r,
        "<" => l < r,
        ">" => l > r,
        _ => return None,
    })
}

/// The outcome of one command.
#[derive(Debug)]
pub struct Outcome {
    pub exit: i32,
    pub lines: Vec<String>,
    pub result: serde_json::Value,
    pub certificates: Vec<Certificate>,
}

impl Outcome {
    pub fn new(exit: i32, result: serde_json::Value) -> Self {
        Self {
            exit,
            lines: Vec::new(),
            result,
            certificates: Vec::new(),
        }
    }

    pub fn line(mut self, s: impl Into<String>) -> Self {
        self.lines.push(s.into());
        self
    }

    pub fn cert(&mut self, c: Certificate) {
        self.certificates.push(c);
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: Vec<String>,
    pub inputs_digest: String,
    /// Every input file the command read, by the path given on the command line.
    pub inputs: BTreeMap<String, String>,
    pub exit: i32,
    pub result: serde_json::Value,
    pub certificates: Vec<Certificate>,
    pub timing_ms: u64,
}

/// Input files, read from disk or served from an embedded report.
pub struct Inputs {
    embedded: Option<BTreeMap<String, String>>,
    pub read: BTreeMap<String, String>,
}

impl Inputs {
    pub fn disk() -> Self {
        Self {
            embedded: None,
            read: BTreeMap::new(),
        }
    }

    pub fn embedded(files: BTreeMap<String, String>) -> Self {
        Self {
            embedded: Some(files),
            read: BTreeMap::new(),
        }
    }

    pub fn read(&mut self, path: &str) -> Result<String, String> {
        let text = match &self.embedded {
            Some(files) => files.get(path).cloned().ok_or_else(|| format!("{path}: not embedded in the report"))?,
            None => fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?,
        };
        self.read.insert(path.to_string(), text.clone());
        Ok(text)
    }
}

/// SHA-256 over the arguments and the contents of every input file.
pub fn digest(command: &[String], inputs: &BTreeMap<String, String>) -> String {
    let mut h = Sha256::new();
    for a in command {
        h.update((a.len() as u64).to_le_bytes());
        h.update(a.as_bytes());
    }
    for (path, text) in inputs {
        h.update((path.len() as u64).to_le_bytes());
        h.update(path.as_bytes());
        h.update((text.len() as u64).to_le_bytes());
        h.update(text.as_bytes());
    }
    hex::encode(h.finalize())
}

#[cfg(test)]
mod tests {
    use super::*;
    use dcs_core::rational::ratio;

    #[test]
    fn certificates_recheck_from_strings() {
        let c = Certificate::new("x", &ratio(1, 3), "<=", &ratio(1, 2));
        assert!(c.holds && c.recheck());
        let mut bad = c.clone();
        bad.lhs = "2/3".into();
        assert!(!bad.recheck());
    }

    #[test]
    fn digest_depends_on_file_contents() {
        let cmd = vec!["dcs".to_string(), "search-line".to_string()];
        let mut a = BTreeMap::new();
        a.insert("f".to_string(), "11\n".to_string());
        let mut b = a.clone();
        b.insert("f".to_string(), "12\n".to_string());
        assert_ne!(digest(&cmd, &a), digest(&cmd, &b));
        assert_eq!(digest(&cmd, &a), digest(&cmd, &a.clone()));
    }
}
