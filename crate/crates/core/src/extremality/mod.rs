//! Extremality of quantum points with two-qubit realisations.

mod criteria;
mod geometry;
mod reconstruct;
mod report;

pub use criteria::{
    conjecture_equivalence_check, stlm_check, stlm_verdict, theta_star, threshold_verdict, tlm_residual,
    tlm_residual_maximally_entangled, tlm_saturated, EquivalenceCheck, StlmCheck, StlmVerdict, Threshold,
    ThresholdBranch, ThresholdVerdict, DEGENERATE_PAIR_TOL, SATURATION_TOL,
};
pub use geometry::{
    decomposition_witness, discriminant_probability_identity, facet_touch_angles, DecompositionWitness,
    EllipseDecomposition, FacetContact, FacetTouch,
};
pub use reconstruct::{
    check_conditions, realizations_from_point, zero_marginal_realization, ConditionCheck, RealizationQuadratic,
    ZERO_MARGINAL_TOL,
};
pub use report::{extremality_report, ExtremalityReport, Method, ReconstructionBranch};
