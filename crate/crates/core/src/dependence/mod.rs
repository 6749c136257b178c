//! Functional dependence on finite relations.
//!
//! A point `x` depends on the index subset `I` when every point sharing its
//! projection onto `I` carries the same label. This module computes those
//! functionality domains exactly, solves the minimal global and
//! instance-wise selection problems, checks the structural properties any
//! instance-wise selection has to satisfy, and provides the proxy sets and
//! the fANOVA decomposition used to contrast other notions of attribution.

mod fanova;
mod properties;
mod proxy;
mod relation;
mod solver;

pub use fanova::{fanova_decompose, FanovaDecomposition, ProductGrid, FANOVA_MAX_DIM, FANOVA_MAX_LEVELS};
pub use properties::{
    check_property1, check_property2, check_property2_with, Property1Report, PROPERTY2_MAX_DIM,
};
pub use proxy::{proxy_sets, ProxySets, BASELINE_TOLERANCE};
pub use relation::{functional_domain, project, LabeledRelation, Point};
pub use solver::{
    solve_all_instance_selections, solve_global_selection, solve_instance_selection,
    SelectionSolution,
};

/// The two-input `AND` function on `{0,1}^2` as a relation, points ordered
/// `(0,0), (0,1), (1,0), (1,1)`.
pub fn and_grid() -> LabeledRelation {
    LabeledRelation::from_rows(
        2,
        &[(&[0.0, 0.0], 0), (&[0.0, 1.0], 0), (&[1.0, 0.0], 0), (&[1.0, 1.0], 1)],
    )
    .expect("static relation is well formed")
}
