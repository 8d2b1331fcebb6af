//! `{"ring": [p, f, e, N], "elements": ["idx", ...]}` set files.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ring::{Ring, RingParams};
use crate::sets::RingSet;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetFile {
    pub ring: RingParams,
    /// Canonical indices at level N, as decimal strings.
    pub elements: Vec<String>,
}

impl SetFile {
    pub fn from_set(a: &RingSet) -> Result<Self> {
        if a.level() != a.params().n {
            return Err(Error::Precondition("set files hold sets at the top level".into()));
        }
        Ok(SetFile { ring: a.params(), elements: a.indices().map(|i| i.to_string()).collect() })
    }

    pub fn to_set(&self) -> Result<RingSet> {
        let ring = Ring::new(self.ring)?;
        let idx = self
            .elements
            .iter()
            .map(|s| s.trim().parse::<u64>().map_err(|_| Error::Parse(format!("bad element index {s:?}"))))
            .collect::<Result<Vec<_>>>()?;
        RingSet::from_indices(&ring, self.ring.n, idx)
    }

    pub fn to_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("set files serialize")
    }
}

pub fn read_set(path: &Path) -> Result<RingSet> {
    let text = std::fs::read_to_string(path)?;
    let file: SetFile = serde_json::from_str(&text)?;
    file.to_set()
}

pub fn write_set(path: &Path, a: &RingSet) -> Result<()> {
    let text = serde_json::to_string(&SetFile::from_set(a)?)?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

/// The set file of `a` as JSON, for failure witnesses.
pub fn witness_value(a: &RingSet) -> serde_json::Value {
    serde_json::json!({
        "ring": a.params(),
        "level": a.level(),
        "elements": a.indices().map(|i| i.to_string()).collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_through_json() {
        let r = Ring::from_parts(3, 1, 1, 2).unwrap();
        let a = RingSet::from_indices(&r, 2, [0, 4, 8]).unwrap();
        let f = SetFile::from_set(&a).unwrap();
        let text = serde_json::to_string(&f).unwrap();
        assert_eq!(text, r#"{"ring":[3,1,1,2],"elements":["0","4","8"]}"#);
        let back: SetFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_set().unwrap(), a);
    }

    #[test]
    fn rejects_bad_input() {
        let bad: SetFile = serde_json::from_str(r#"{"ring":[2,1,1,2],"elements":["9"]}"#).unwrap();
        assert!(bad.to_set().is_err());
        let bad: SetFile = serde_json::from_str(r#"{"ring":[2,1,1,2],"elements":["x"]}"#).unwrap();
        assert!(matches!(bad.to_set(), Err(Error::Parse(_))));
        assert!(serde_json::from_str::<SetFile>(r#"{"ring":[4,1,1,2],"elements":[]}"#).is_err());
    }
}
