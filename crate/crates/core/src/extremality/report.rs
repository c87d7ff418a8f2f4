use serde::Serialize;

use super::criteria::{stlm_verdict, threshold_verdict, StlmVerdict, ThresholdVerdict};
use super::reconstruct::{realizations_from_point, zero_marginal_realization};
use crate::model::{ProbabilityPoint, Realization};
use crate::polytope::{is_nonlocal, max_chsh};

/// Which criteria to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Correlator saturation with marginal-dependent normalisation plus
    /// equal larger roots.
    Stlm,
    /// Correlator saturation at maximal entanglement plus the state-angle
    /// threshold.
    Threshold,
    #[default]
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReconstructionBranch {
    NonzeroMarginals,
    ZeroMarginals,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtremalityReport {
    pub realization: Realization,
    pub point: ProbabilityPoint,
    pub nonlocal: bool,
    pub max_chsh: f64,
    pub has_realization: bool,
    pub branch: ReconstructionBranch,
    /// Canonical realisations recovered from the point alone.
    pub realizations: Vec<Realization>,
    pub stlm: Option<StlmVerdict>,
    pub threshold: Option<ThresholdVerdict>,
    /// Whether the two verdicts coincide; `None` unless both were run.
    pub agreement: Option<bool>,
}

impl ExtremalityReport {
    /// The combined verdict: every evaluated criterion says extremal.
    pub fn extremal(&self) -> bool {
        self.stlm.as_ref().is_none_or(|v| v.extremal) && self.threshold.as_ref().is_none_or(|v| v.extremal)
    }
}

pub fn extremality_report(r: &Realization, method: Method) -> ExtremalityReport {
    let point = r.point();
    let zero = point
        .marginals()
        .iter()
        .all(|m| m.abs() <= super::reconstruct::ZERO_MARGINAL_TOL);
    let (branch, realizations) = if zero {
        let found = zero_marginal_realization(&point).ok().flatten();
        (ReconstructionBranch::ZeroMarginals, found.into_iter().collect())
    } else {
        (
            ReconstructionBranch::NonzeroMarginals,
            realizations_from_point(&point).unwrap_or_default(),
        )
    };
    let stlm = matches!(method, Method::Stlm | Method::Both).then(|| stlm_verdict(r));
    let threshold = matches!(method, Method::Threshold | Method::Both).then(|| threshold_verdict(r));
    let agreement = match (&stlm, &threshold) {
        (Some(a), Some(b)) => Some(a.extremal == b.extremal),
        _ => None,
    };
    ExtremalityReport {
        realization: *r,
        nonlocal: is_nonlocal(&point),
        max_chsh: max_chsh(&point),
        has_realization: !realizations.is_empty(),
        point,
        branch,
        realizations,
        stlm,
        threshold,
        agreement,
    }
}
