use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::complexes::{ConeId, SubdivisionOf};
use crate::exactgeom::IntVector;

/// What a report does and does not establish.
pub const SCOPE: &str = "polyhedral hypotheses only: union-of-cones, cone-onto-cone, lattice surjectivity and the \
fiber-product subdivision check; Chow-level identities are not verified";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportInputs {
    pub genus: u32,
    pub markings: usize,
    pub factors: Vec<Vec<i64>>,
    pub unimodular: bool,
}

/// A point of cone `cone` witnessing a failure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub cone: ConeId,
    pub point: IntVector,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), passed, detail: detail.into(), witness: None }
    }

    pub fn with_witness(mut self, witness: Option<Witness>) -> Self {
        self.witness = witness;
        self
    }
}

/// A ray added by the subdivision, in the coordinates of its host cone.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InsertedRay {
    pub host: ConeId,
    pub ray: IntVector,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubdivisionSummary {
    /// Cone counts by dimension.
    pub before: BTreeMap<usize, usize>,
    pub after: BTreeMap<usize, usize>,
    pub inserted_rays: Vec<InsertedRay>,
}

impl SubdivisionSummary {
    pub fn of(s: &SubdivisionOf) -> Self {
        let mut before = BTreeMap::new();
        for c in s.original.cones.values() {
            *before.entry(c.dim()).or_insert(0) += 1;
        }
        let mut inserted_rays = Vec::new();
        for (&host, fan) in s.fans() {
            let cone = &s.original.cones[&host];
            for cell in fan.iter().filter(|c| c.dim() == 1) {
                let r = &cell.rays()[0];
                if cone.relint_contains(r) && cone.dim() > 1 {
                    inserted_rays.push(InsertedRay { host, ray: r.clone() });
                }
            }
        }
        SubdivisionSummary { before, after: s.cone_counts(), inserted_rays }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub inputs: ReportInputs,
    pub scope: String,
    pub subdivision: SubdivisionSummary,
    pub checks: Vec<Check>,
    /// Labels of map types contracting a cycle to a point in every factor.
    pub flagged_types: Vec<String>,
}

impl Report {
    pub fn new(inputs: ReportInputs) -> Self {
        Report {
            inputs,
            scope: SCOPE.to_string(),
            subdivision: SubdivisionSummary::default(),
            checks: Vec::new(),
            flagged_types: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let i = &self.inputs;
        let _ = writeln!(s, "genus {} markings {} factors {:?} unimodular {}", i.genus, i.markings, i.factors, i.unimodular);
        let _ = writeln!(s, "scope: {}", self.scope);
        let _ = writeln!(
            s,
            "subdivision: cones by dim {:?} -> {:?}, {} inserted rays",
            self.subdivision.before,
            self.subdivision.after,
            self.subdivision.inserted_rays.len()
        );
        for c in &self.checks {
            let _ = write!(s, "[{}] {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            if let Some(w) = &c.witness {
                let _ = write!(s, " (cone {} at {:?})", w.cone, w.point.to_i64s().unwrap_or_default());
            }
            s.push('\n');
        }
        for f in &self.flagged_types {
            let _ = writeln!(s, "flagged: {f}");
        }
        let _ = writeln!(s, "{}", if self.passed() { "all checks passed" } else { "some checks failed" });
        s
    }
}
