//! Property validation with witness-bearing reports.
//!
//! Failures are reported, not thrown: every validator returns a [`Report`]
//! listing the violated conditions together with a concrete witness (the
//! offending world, state or cycle).

use crate::model::{InqModel, Point};
use crate::relational::Structure;
use crate::worldset::WorldSet;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub condition: String,
    pub witness: String,
}

impl Failure {
    pub fn new(condition: impl Into<String>, witness: impl Into<String>) -> Failure {
        Failure {
            condition: condition.into(),
            witness: witness.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub property: String,
    failures: Vec<Failure>,
}

impl Report {
    pub fn new(property: impl Into<String>, failures: Vec<Failure>) -> Report {
        Report {
            property: property.into(),
            failures,
        }
    }

    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn failures(&self) -> &[Failure] {
        &self.failures
    }
}

impl std::fmt::Display for Report {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.pass() {
            write!(f, "PASS {}", self.property)
        } else {
            write!(f, "FAIL {}", self.property)?;
            for fail in &self.failures {
                write!(f, "\n  {}: {}", fail.condition, fail.witness)?;
            }
            Ok(())
        }
    }
}

/// The checkable model properties.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Property {
    RelationalValid,
    S5,
    Stratified { depth: usize, point: Point },
    KRich(usize),
    Simple,
    NAcyclic(usize),
    DownwardClosed,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ValidateError {
    #[error("property {0} applies to relational structures, not plain models")]
    NeedsStructure(&'static str),
}

/// Validates a plain inquisitive model. `relational-valid` and `stratified`
/// concern the second sort and need a structure subject.
pub fn validate_model(m: &InqModel, prop: &Property) -> Result<Report, ValidateError> {
    match prop {
        Property::RelationalValid => Err(ValidateError::NeedsStructure("relational-valid")),
        Property::Stratified { .. } => Err(ValidateError::NeedsStructure("stratified")),
        Property::S5 => Ok(crate::epistemic::s5_report(m)),
        Property::KRich(k) => Ok(crate::epistemic::k_rich_report(m, *k)),
        Property::Simple => Ok(crate::epistemic::simple_report(m)),
        Property::NAcyclic(n) => Ok(crate::epistemic::n_acyclic_report(m, *n)),
        Property::DownwardClosed => Ok(downward_closed_report(m)),
    }
}

/// Validates a two-sorted structure; properties of the induced inquisitive
/// model are checked on the decoding.
pub fn validate_structure(st: &Structure, prop: &Property) -> Report {
    match prop {
        Property::RelationalValid => st.validate_relational(),
        Property::Stratified { depth, point } => {
            crate::transforms::stratified_report(st, *depth, *point)
        }
        other => match crate::relational::decode_structure(st) {
            Ok(m) => validate_model(&m, other).expect("property applies to models"),
            Err(err) => Report::new(
                property_name(other),
                vec![Failure::new("relational-valid", err.to_string())],
            ),
        },
    }
}

pub fn property_name(p: &Property) -> String {
    match p {
        Property::RelationalValid => "relational-valid".into(),
        Property::S5 => "s5".into(),
        Property::Stratified { depth, .. } => format!("stratified({depth})"),
        Property::KRich(k) => format!("k-rich({k})"),
        Property::Simple => "simple".into(),
        Property::NAcyclic(n) => format!("n-acyclic({n})"),
        Property::DownwardClosed => "downward-closed".into(),
    }
}

/// Checks the stored antichains against naive subset enumeration: every
/// subset of every member must itself be a member.
pub fn downward_closed_report(m: &InqModel) -> Report {
    let mut failures = Vec::new();
    'outer: for a in 0..m.agents().len() {
        for w in 0..m.world_count() {
            let st = m.state_map(a, w);
            for s in st.members() {
                for t in s.subsets() {
                    if !st.contains(t) {
                        failures.push(Failure::new(
                            "downward-closed",
                            format!(
                                "Σ_{}({}) holds {} but not {}",
                                m.agents()[a],
                                m.world_label(w),
                                m.state_label(s),
                                m.state_label(t)
                            ),
                        ));
                        break 'outer;
                    }
                }
            }
            if !st.contains(WorldSet::EMPTY) {
                failures.push(Failure::new(
                    "downward-closed",
                    format!("Σ_{}({}) misses ∅", m.agents()[a], m.world_label(w)),
                ));
                break 'outer;
            }
        }
    }
    Report::new("downward-closed", failures)
}
