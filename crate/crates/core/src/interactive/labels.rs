use std::fmt;

use serde::{Deserialize, Serialize};

use crate::distributions::Outcome;
use crate::error::{Error, Result};

/// One exchanged message pair. The mechanism-first prologue is a step with an
/// empty query.
pub type Step = (String, String);

/// Characters reserved by the kernel-key and transcript encodings.
pub const RESERVED: [char; 3] = ['|', ';', '='];

pub(crate) fn check_label(label: &str, what: &str) -> Result<()> {
    if label.is_empty() {
        return Err(Error::InvalidMechanism(format!("empty {what} label")));
    }
    if label.contains(RESERVED) {
        return Err(Error::InvalidMechanism(format!(
            "{what} label {label:?} contains one of '|', ';', '='"
        )));
    }
    Ok(())
}

fn encode_steps(steps: &[Step]) -> String {
    steps
        .iter()
        .map(|(q, a)| format!("{q}={a}"))
        .collect::<Vec<_>>()
        .join(";")
}

fn decode_steps<'a>(parts: impl Iterator<Item = &'a str>) -> Result<Vec<Step>> {
    parts
        .map(|p| {
            p.split_once('=')
                .map(|(q, a)| (q.to_string(), a.to_string()))
                .ok_or_else(|| Error::InvalidMechanism(format!("malformed step {p:?}")))
        })
        .collect()
}

/// `q1=a1;q2=a2;q3`: the completed steps followed by the pending query.
pub fn encode_prefix(steps: &[Step], query: &str) -> String {
    if steps.is_empty() {
        query.to_string()
    } else {
        format!("{};{query}", encode_steps(steps))
    }
}

pub fn decode_prefix(prefix: &str) -> Result<(Vec<Step>, String)> {
    let mut parts: Vec<&str> = prefix.split(';').collect();
    let query = parts.pop().unwrap_or_default().to_string();
    if query.contains('=') {
        return Err(Error::InvalidMechanism(format!("prefix {prefix:?} has no pending query")));
    }
    Ok((decode_steps(parts.into_iter())?, query))
}

/// `<dataset>|<prefix>`.
pub fn kernel_key(dataset: &str, steps: &[Step], query: &str) -> String {
    format!("{dataset}|{}", encode_prefix(steps, query))
}

/// A complete exchange as seen by a deterministic adversary.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Transcript {
    pub steps: Vec<Step>,
}

impl Transcript {
    pub fn new(steps: Vec<Step>) -> Self {
        Transcript { steps }
    }

    pub fn answers(&self) -> Vec<String> {
        self.steps.iter().map(|s| s.1.clone()).collect()
    }

    pub fn encode(&self) -> String {
        encode_steps(&self.steps)
    }

    pub fn decode(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Ok(Transcript::default());
        }
        Ok(Transcript {
            steps: decode_steps(s.split(';'))?,
        })
    }

    pub fn to_outcome(&self) -> Outcome {
        Outcome::Text(self.encode())
    }

    pub fn from_outcome(o: &Outcome) -> Result<Self> {
        match o {
            Outcome::Text(s) => Transcript::decode(s),
            other => Err(Error::InvalidMechanism(format!("{other} is not a transcript"))),
        }
    }
}

impl fmt::Display for Transcript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encode())
    }
}
