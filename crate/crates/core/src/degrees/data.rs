//! Stored basic degrees and maximal-type lists, checked against their
//! SHA-256 digests on load.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use sha2::{Digest, Sha256};

use super::element::OrbitTypeElement;
use crate::error::{Error, Result};
use crate::representation::IsotypicalLabel;

pub const BASIC_DEGREES: &str = include_str!("../../data/basic_degrees.txt");
pub const BASIC_DEGREES_SHA256: &str = "5650b312d99439e88263bc12b31b54584ceb7ef91220694b697c45f919b92f23";
pub const MAXIMAL_TYPES: &str = include_str!("../../data/maximal_types.txt");
pub const MAXIMAL_TYPES_SHA256: &str = "88a13099a1e64bb16ef739227c810bb23971ced8ba783cd4d6e8adbe7a32b035";

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn check(text: &str, digest: &str, what: &str) -> Result<()> {
    let got = sha256_hex(text.as_bytes());
    if got != digest {
        return Err(Error::Data(format!("{what}: checksum {got} does not match {digest}")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct StoredDegree {
    pub element: OrbitTypeElement,
    /// Ids flagged as maximal, in file order.
    pub maximal: Vec<String>,
}

fn blocks(text: &str) -> Result<BTreeMap<i32, Vec<&str>>> {
    let mut out: BTreeMap<i32, Vec<&str>> = BTreeMap::new();
    let mut cur: Option<i32> = None;
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        if let Some(rest) = line.strip_prefix("n = ") {
            let n: i32 = rest.parse().map_err(|_| Error::Parse(format!("bad block header {line}")))?;
            IsotypicalLabel::new(n)?;
            cur = Some(n);
            out.entry(n).or_default();
        } else {
            let n = cur.ok_or_else(|| Error::Parse(format!("line before first block: {line}")))?;
            out.get_mut(&n).expect("block").push(line);
        }
    }
    Ok(out)
}

pub fn parse_degrees(text: &str) -> Result<BTreeMap<i32, StoredDegree>> {
    let mut out = BTreeMap::new();
    for (n, lines) in blocks(text)? {
        let mut element = OrbitTypeElement::new();
        let mut maximal = Vec::new();
        for line in lines {
            let (c, rest) = line.split_once(' ').ok_or_else(|| Error::Parse(format!("bad term {line}")))?;
            let c: i64 = c.parse().map_err(|_| Error::Parse(format!("bad coefficient in {line}")))?;
            let (id, red) = match rest.strip_suffix(" *") {
                Some(id) => (id, true),
                None => (rest, false),
            };
            if element.coefficient(id) != 0 {
                return Err(Error::Parse(format!("repeated orbit type {id}")));
            }
            element.add_term(id, c);
            if red {
                maximal.push(id.to_string());
            }
        }
        out.insert(n, StoredDegree { element, maximal });
    }
    Ok(out)
}

pub fn parse_maximal(text: &str) -> Result<BTreeMap<i32, Vec<String>>> {
    Ok(blocks(text)?.into_iter().map(|(n, ls)| (n, ls.into_iter().map(str::to_string).collect())).collect())
}

/// The ten stored basic degrees, keyed by isotypical label.
pub fn stored_degrees() -> Result<&'static BTreeMap<i32, StoredDegree>> {
    static D: OnceLock<std::result::Result<BTreeMap<i32, StoredDegree>, String>> = OnceLock::new();
    D.get_or_init(|| {
        check(BASIC_DEGREES, BASIC_DEGREES_SHA256, "basic degrees").and_then(|_| parse_degrees(BASIC_DEGREES)).map_err(|e| e.to_string())
    })
    .as_ref()
    .map_err(|e| Error::Data(e.clone()))
}

/// Expected maximal types with nonzero coefficient, keyed by label.
pub fn stored_maximal_types() -> Result<&'static BTreeMap<i32, Vec<String>>> {
    static D: OnceLock<std::result::Result<BTreeMap<i32, Vec<String>>, String>> = OnceLock::new();
    D.get_or_init(|| {
        check(MAXIMAL_TYPES, MAXIMAL_TYPES_SHA256, "maximal types").and_then(|_| parse_maximal(MAXIMAL_TYPES)).map_err(|e| e.to_string())
    })
    .as_ref()
    .map_err(|e| Error::Data(e.clone()))
}

pub fn stored_degree(n: IsotypicalLabel) -> Result<&'static StoredDegree> {
    stored_degrees()?.get(&n.n()).ok_or_else(|| Error::Data(format!("no stored degree for {n}")))
}
