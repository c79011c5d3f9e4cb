//! Integer combinations of orbit types, keyed by id.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitTypeElement(pub BTreeMap<String, i64>);

impl OrbitTypeElement {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(id: &str, c: i64) -> Self {
        let mut e = Self::new();
        e.add_term(id, c);
        e
    }

    pub fn coefficient(&self, id: &str) -> i64 {
        self.0.get(id).copied().unwrap_or(0)
    }

    pub fn add_term(&mut self, id: &str, c: i64) {
        if c == 0 {
            return;
        }
        let v = self.0.entry(id.to_string()).or_insert(0);
        *v += c;
        if *v == 0 {
            self.0.remove(id);
        }
    }

    pub fn add(&mut self, other: &OrbitTypeElement, scale: i64) {
        for (k, v) in &other.0 {
            self.add_term(k, scale * v);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&str, i64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// Keep only the terms whose id satisfies `keep`.
    pub fn filtered(&self, keep: impl Fn(&str) -> bool) -> OrbitTypeElement {
        OrbitTypeElement(self.0.iter().filter(|(k, _)| keep(k)).map(|(k, v)| (k.clone(), *v)).collect())
    }
}

impl fmt::Display for OrbitTypeElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, v)) in self.0.iter().enumerate() {
            let sign = if *v < 0 { "-" } else if i > 0 { "+" } else { "" };
            let a = v.abs();
            if i > 0 {
                write!(f, " ")?;
            }
            if a == 1 {
                write!(f, "{sign}({k})")?;
            } else {
                write!(f, "{sign}{a}({k})")?;
            }
        }
        Ok(())
    }
}
