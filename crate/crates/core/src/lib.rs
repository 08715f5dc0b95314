#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Generalized hyperbolic-type metrics on finite samples of a metric space
//! `X` with a closed excluded set `M`.
//!
//! Four families are provided (Gehring–Osgood, Dovgoshey–Hariri–Vuorinen,
//! Nikolov–Andreev and Ibragimov), each built from the base distance and a
//! positive weight such as `dist(x, M)`. Around them sit metric-axiom and
//! Lipschitz audits, Gromov δ estimation, multiplicative four-point checks
//! and quasiconformal dilatation estimates.
//!
//! ```
//! use hyptype_core::{rho, MetricFamily};
//!
//! let v = rho(MetricFamily::NikolovAndreev, 2.0, 1.0, 3.0).unwrap();
//! assert!((v - 3f64.ln()).abs() < 1e-14);
//! ```

pub mod audit;
pub mod error;
pub mod family;
pub mod gromov;
pub mod obstacle;
pub mod qc;
pub mod sampling;
pub mod space;
pub mod spaces;

pub use audit::{lipschitz_audit, metric_axiom_audit, triangle_slack, AuditReport};
pub use error::{Error, Result};
pub use family::{
    bound_lower_global, bound_upper_near, comparison_functional, go_equality_probe,
    invert_distance_bound, rho, rho_unchecked, EqualityProbe, MetricFamily, Variant,
};
pub use gromov::{
    basepoint_defect, basepoint_transfer_check, delta_estimate, four_point_defect, gromov_product,
    multiplicative_four_point_check, DeltaEstimate,
};
pub use obstacle::{dist_to_set, ObstacleSet, Primitive};
pub use qc::{
    dilatation_empirical, dilatation_profile, envelope_ratio, extrapolate_limit, DilatationProfile,
    WeightField,
};
pub use sampling::SearchMode;
pub use space::{PairTable, SampledSpace, WeightFunction, WeightSource, TOL_ABS, TOL_REL};
pub use spaces::{build, BuiltSpace, SpaceSpec};
