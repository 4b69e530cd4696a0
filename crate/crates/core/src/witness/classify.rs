//! Classification of causal maps into ProbC, ProbQ, PhysC, PhysQ and Coh.
//!
//! Witnesses are one-sided: a value above threshold heralds a property, a
//! value below threshold is only absence of evidence. The reported class is
//! the weakest one consistent with everything observed.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::induced::{c_cd_witness, negativity_two_qubit};
use super::search::{
    outcome_negativities, pathway_value, search, Pathway, SearchOptions, SearchResult,
};
use crate::error::{Error, Result};
use crate::linalg::partial_trace;
use crate::model::{BlochVector, CausalMap};

/// Default decision threshold for a nonzero witness in exact-theory mode.
pub const DEFAULT_EPSILON: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CausalClass {
    ProbC,
    ProbQ,
    PhysC,
    PhysQ,
    Coh,
    #[serde(rename = "undetermined")]
    Undetermined,
}

impl CausalClass {
    pub fn as_str(self) -> &'static str {
        match self {
            CausalClass::ProbC => "ProbC",
            CausalClass::ProbQ => "ProbQ",
            CausalClass::PhysC => "PhysC",
            CausalClass::PhysQ => "PhysQ",
            CausalClass::Coh => "Coh",
            CausalClass::Undetermined => "undetermined",
        }
    }
}

impl fmt::Display for CausalClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CausalClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "ProbC" => CausalClass::ProbC,
            "ProbQ" => CausalClass::ProbQ,
            "PhysC" => CausalClass::PhysC,
            "PhysQ" => CausalClass::PhysQ,
            "Coh" => CausalClass::Coh,
            "undetermined" => CausalClass::Undetermined,
            _ => return Err(Error::Parse(format!("unknown class `{s}`"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ClassFlags {
    pub physical_mixture: bool,
    pub cc_quantum: bool,
    pub ce_quantum: bool,
    pub berkson: bool,
    pub cc_entanglement_breaking: bool,
    pub ce_entanglement_breaking: bool,
}

impl ClassFlags {
    /// Places the flags on the class lattice.
    pub fn class(&self) -> CausalClass {
        let both_breaking = self.cc_entanglement_breaking && self.ce_entanglement_breaking;
        let pathway_quantum = self.cc_quantum || self.ce_quantum;
        if self.berkson && !both_breaking {
            CausalClass::Coh
        } else if self.berkson {
            CausalClass::Undetermined
        } else if self.physical_mixture {
            if pathway_quantum {
                CausalClass::PhysQ
            } else {
                CausalClass::PhysC
            }
        } else if pathway_quantum {
            CausalClass::ProbQ
        } else {
            CausalClass::ProbC
        }
    }
}

/// Per-outcome pair of values, `+1` first.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct OutcomePair {
    pub plus: f64,
    pub minus: f64,
}

impl From<[f64; 2]> for OutcomePair {
    fn from([plus, minus]: [f64; 2]) -> Self {
        Self { plus, minus }
    }
}

impl OutcomePair {
    pub fn min(&self) -> f64 {
        self.plus.min(self.minus)
    }
}

/// Raw witness values for a map at a fixed choice of bases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessValues {
    pub c_cd: f64,
    /// Reference-basis negativities (σx on C, σy on D, σz on B).
    pub neg_bd: OutcomePair,
    pub neg_cb: OutcomePair,
    pub neg_cd: OutcomePair,
    /// `min_±` negativity at the chosen basis of each pathway.
    pub cc: f64,
    pub ce: f64,
    pub berkson: f64,
    /// Negativity of `Tr_D τ` (C|B) and `Tr_C τ` (B|D).
    pub cc_marginal: f64,
    pub ce_marginal: f64,
}

/// The bases at which pathway values are evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathwayBases {
    pub cc: BlochVector,
    pub ce: BlochVector,
    pub berkson: BlochVector,
}

impl PathwayBases {
    pub fn reference() -> Self {
        Self {
            cc: Pathway::CommonCause.reference_basis(),
            ce: Pathway::CauseEffect.reference_basis(),
            berkson: Pathway::Berkson.reference_basis(),
        }
    }
}

impl WitnessValues {
    pub fn evaluate(map: &CausalMap, bases: &PathwayBases) -> Self {
        let (cc_marginal, ce_marginal) = marginal_negativities(map);
        Self {
            c_cd: c_cd_witness(map),
            neg_bd: outcome_negativities(map, Pathway::CauseEffect, &BlochVector::X).into(),
            neg_cb: outcome_negativities(map, Pathway::CommonCause, &BlochVector::Y).into(),
            neg_cd: outcome_negativities(map, Pathway::Berkson, &BlochVector::Z).into(),
            cc: pathway_value(map, Pathway::CommonCause, &bases.cc),
            ce: pathway_value(map, Pathway::CauseEffect, &bases.ce),
            berkson: pathway_value(map, Pathway::Berkson, &bases.berkson),
            cc_marginal,
            ce_marginal,
        }
    }
}

fn marginal_negativities(map: &CausalMap) -> (f64, f64) {
    let layout = CausalMap::layout();
    let neg = |keep: [&str; 2]| {
        partial_trace(map.tau(), &layout, &keep)
            .and_then(|m| negativity_two_qubit(&m.hermitian_part()))
            .unwrap_or(0.0)
    };
    (neg(["C", "B"]), neg(["B", "D"]))
}

/// Entanglement-breaking status of the common-cause and cause-effect pathways.
pub fn entanglement_breaking_flags(map: &CausalMap, epsilon: f64) -> (bool, bool) {
    let (cc, ce) = marginal_negativities(map);
    (cc < epsilon, ce < epsilon)
}

/// Per-witness decision thresholds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub c_cd: f64,
    pub cc: f64,
    pub ce: f64,
    pub berkson: f64,
    pub cc_marginal: f64,
    pub ce_marginal: f64,
}

impl Thresholds {
    pub fn uniform(epsilon: f64) -> Self {
        Self {
            c_cd: epsilon,
            cc: epsilon,
            ce: epsilon,
            berkson: epsilon,
            cc_marginal: epsilon,
            ce_marginal: epsilon,
        }
    }

    pub fn flags(&self, v: &WitnessValues) -> ClassFlags {
        ClassFlags {
            physical_mixture: v.c_cd.abs() > self.c_cd,
            cc_quantum: v.cc > self.cc,
            ce_quantum: v.ce > self.ce,
            berkson: v.berkson > self.berkson,
            cc_entanglement_breaking: v.cc_marginal < self.cc_marginal.max(f64::MIN_POSITIVE),
            ce_entanglement_breaking: v.ce_marginal < self.ce_marginal.max(f64::MIN_POSITIVE),
        }
    }
}

/// Bootstrap standard errors of the witness values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessErrors {
    pub resamples: usize,
    pub c_cd: f64,
    pub cc: f64,
    pub ce: f64,
    pub berkson: f64,
    pub cc_marginal: f64,
    pub ce_marginal: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessReport {
    pub values: WitnessValues,
    pub bases: PathwayBases,
    pub flags: ClassFlags,
    pub class: CausalClass,
    pub epsilon: f64,
    pub errors: Option<WitnessErrors>,
}

impl WitnessReport {
    pub fn from_values(
        values: WitnessValues,
        bases: PathwayBases,
        thresholds: &Thresholds,
        epsilon: f64,
    ) -> Self {
        let flags = thresholds.flags(&values);
        Self {
            values,
            bases,
            flags,
            class: flags.class(),
            epsilon,
            errors: None,
        }
    }

    pub fn c_cd(&self) -> f64 {
        self.values.c_cd
    }

    pub fn search_result(&self, pathway: Pathway) -> SearchResult {
        let (basis, value) = match pathway {
            Pathway::CommonCause => (self.bases.cc, self.values.cc),
            Pathway::CauseEffect => (self.bases.ce, self.values.ce),
            Pathway::Berkson => (self.bases.berkson, self.values.berkson),
        };
        SearchResult { basis, value }
    }

    pub fn optimal_bases(&self) -> BTreeMap<&'static str, BlochVector> {
        Pathway::ALL
            .into_iter()
            .map(|p| (p.name(), self.search_result(p).basis))
            .collect()
    }

    pub fn to_json(&self) -> ReportJson {
        let v = &self.values;
        let f = &self.flags;
        ReportJson {
            c_cd: v.c_cd,
            neg_bd_plus: v.neg_bd.plus,
            neg_bd_minus: v.neg_bd.minus,
            neg_cb_plus: v.neg_cb.plus,
            neg_cb_minus: v.neg_cb.minus,
            neg_cd_plus: v.neg_cd.plus,
            neg_cd_minus: v.neg_cd.minus,
            class: self.class,
            search_cc: v.cc,
            search_ce: v.ce,
            search_berkson: v.berkson,
            basis_cc: self.bases.cc.components(),
            basis_ce: self.bases.ce.components(),
            basis_berkson: self.bases.berkson.components(),
            neg_cb_marginal: v.cc_marginal,
            neg_bd_marginal: v.ce_marginal,
            physical_mixture: f.physical_mixture,
            cc_quantum: f.cc_quantum,
            ce_quantum: f.ce_quantum,
            berkson: f.berkson,
            cc_entanglement_breaking: f.cc_entanglement_breaking,
            ce_entanglement_breaking: f.ce_entanglement_breaking,
            epsilon: self.epsilon,
            bootstrap_resamples: self.errors.map(|e| e.resamples),
            stderr_c_cd: self.errors.map(|e| e.c_cd),
            stderr_search_cc: self.errors.map(|e| e.cc),
            stderr_search_ce: self.errors.map(|e| e.ce),
            stderr_search_berkson: self.errors.map(|e| e.berkson),
        }
    }
}

/// Flat JSON form of a [`WitnessReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportJson {
    pub c_cd: f64,
    pub neg_bd_plus: f64,
    pub neg_bd_minus: f64,
    pub neg_cb_plus: f64,
    pub neg_cb_minus: f64,
    pub neg_cd_plus: f64,
    pub neg_cd_minus: f64,
    pub class: CausalClass,
    pub search_cc: f64,
    pub search_ce: f64,
    pub search_berkson: f64,
    pub basis_cc: [f64; 3],
    pub basis_ce: [f64; 3],
    pub basis_berkson: [f64; 3],
    pub neg_cb_marginal: f64,
    pub neg_bd_marginal: f64,
    pub physical_mixture: bool,
    pub cc_quantum: bool,
    pub ce_quantum: bool,
    pub berkson: bool,
    pub cc_entanglement_breaking: bool,
    pub ce_entanglement_breaking: bool,
    pub epsilon: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub bootstrap_resamples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub stderr_c_cd: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub stderr_search_cc: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub stderr_search_ce: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub stderr_search_berkson: Option<f64>,
}

/// Runs all three searches and returns the optimal bases.
pub fn search_bases(map: &CausalMap, opts: &SearchOptions) -> PathwayBases {
    PathwayBases {
        cc: search(map, Pathway::CommonCause, opts).basis,
        ce: search(map, Pathway::CauseEffect, opts).basis,
        berkson: search(map, Pathway::Berkson, opts).basis,
    }
}

/// Computes every witness and classifies the map with threshold `epsilon`.
pub fn classify(map: &CausalMap, epsilon: f64) -> Result<WitnessReport> {
    classify_with(map, epsilon, &SearchOptions::default())
}

pub fn classify_with(map: &CausalMap, epsilon: f64, opts: &SearchOptions) -> Result<WitnessReport> {
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::Argument(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let bases = search_bases(map, opts);
    let values = WitnessValues::evaluate(map, &bases);
    Ok(WitnessReport::from_values(
        values,
        bases,
        &Thresholds::uniform(epsilon),
        epsilon,
    ))
}
