//! Case classification, rate regions and the decomposition lemmas.

mod cases;
mod lemmas;
mod polytope;
mod profile;

pub use cases::{
    alpha_bounds_case1, alpha_bounds_case2, alpha_range, case2_alpha_formula, classify_case,
    classify_profile, elementary_from_profile, elementary_region, elementary_region_profile,
    region_case2_formula, region_common, region_common_profile, region_from_profile, AlphaRange,
    CaseLabel, Classification, BOUNDARY_WARN, EQ_TOL,
};
pub use lemmas::{
    random_hull_instance, random_union_instance, verify_convexhull_lemma, verify_lemma_suite,
    verify_union_lemma, Counterexample, HullLemmaInstance, LemmaOptions, LemmaReport,
    LemmaSuiteEntry, LemmaSuiteReport, UnionLemmaInstance, Witness,
};
pub use polytope::{polytope_contains, Constraint, RatePolytope};
pub use profile::{info_profile, InfoProfile};
