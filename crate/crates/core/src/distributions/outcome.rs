use std::fmt;

use serde::{Deserialize, Serialize};

/// Label of a discrete outcome.
///
/// Plain labels are integers or strings. Tuples label the outcomes of joint
/// distributions, coupled seeds and other structured values; they serialize
/// as JSON arrays.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Outcome {
    Int(i64),
    Text(String),
    Tuple(Vec<Outcome>),
}

impl Outcome {
    pub fn text(label: impl Into<String>) -> Self {
        Outcome::Text(label.into())
    }

    pub fn pair(left: Outcome, right: Outcome) -> Self {
        Outcome::Tuple(vec![left, right])
    }

    pub fn unit() -> Self {
        Outcome::Tuple(Vec::new())
    }

    pub fn as_tuple(&self) -> Option<&[Outcome]> {
        match self {
            Outcome::Tuple(items) => Some(items),
            _ => None,
        }
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            Outcome::Text(s) => Some(s),
            _ => None,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Int(i) => write!(f, "{i}"),
            Outcome::Text(s) => write!(f, "{s}"),
            Outcome::Tuple(items) => {
                write!(f, "(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{item}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl From<i64> for Outcome {
    fn from(v: i64) -> Self {
        Outcome::Int(v)
    }
}

impl From<i32> for Outcome {
    fn from(v: i32) -> Self {
        Outcome::Int(v.into())
    }
}

impl From<&str> for Outcome {
    fn from(v: &str) -> Self {
        Outcome::Text(v.to_string())
    }
}

impl From<String> for Outcome {
    fn from(v: String) -> Self {
        Outcome::Text(v)
    }
}
