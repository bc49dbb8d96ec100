//! Index families: one index set per boundary face of the heat space.

use super::{IndexSet, Rational};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Face {
    /// Front face over the edge.
    Ff,
    /// Temporal diagonal.
    Td,
    /// Temporal face.
    Tf,
    Rf,
    Lf,
    /// Corner face.
    Cf,
}

impl fmt::Display for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Face::Ff => "ff",
            Face::Td => "td",
            Face::Tf => "tf",
            Face::Rf => "rf",
            Face::Lf => "lf",
            Face::Cf => "cf",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct IndexFamily {
    pub face_sets: BTreeMap<Face, IndexSet>,
}

impl IndexFamily {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, face: Face, set: IndexSet) -> Self {
        self.face_sets.insert(face, set);
        self
    }

    pub fn get(&self, face: Face) -> Option<&IndexSet> {
        self.face_sets.get(&face)
    }

    /// Trace-class sanity on the side faces: `min E_lf + min E_rf > −1`.
    /// Faces that are absent or empty impose no condition.
    pub fn side_faces_integrable(&self) -> bool {
        let lo = |face| self.get(face).and_then(IndexSet::min_exponent);
        match (lo(Face::Lf), lo(Face::Rf)) {
            (Some(l), Some(r)) => l + r > Rational::from_integer(-1),
            _ => true,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::{int, rat};
    use super::*;

    #[test]
    fn faces_may_be_empty() {
        let fam = IndexFamily::new()
            .with(Face::Td, IndexSet::lattice(int(-3), int(8)))
            .with(Face::Tf, IndexSet::empty(int(8)));
        assert!(fam.get(Face::Tf).unwrap().is_empty());
        assert!(fam.get(Face::Ff).is_none());
    }

    #[test]
    fn side_face_condition() {
        let ok = IndexFamily::new()
            .with(Face::Lf, IndexSet::lattice(rat(-1, 4), int(2)))
            .with(Face::Rf, IndexSet::lattice(rat(-1, 4), int(2)));
        assert!(ok.side_faces_integrable());
        let bad = IndexFamily::new()
            .with(Face::Lf, IndexSet::lattice(rat(-1, 2), int(2)))
            .with(Face::Rf, IndexSet::lattice(rat(-1, 2), int(2)));
        assert!(!bad.side_faces_integrable());
    }

    #[test]
    fn json_keys_are_face_labels() {
        let fam = IndexFamily::new().with(Face::Ff, IndexSet::lattice(int(0), int(1)));
        let text = serde_json::to_string(&fam).unwrap();
        assert!(text.contains("\"ff\""));
        let back: IndexFamily = serde_json::from_str(&text).unwrap();
        assert_eq!(back, fam);
    }
}
