//! Finite groups attached to module representations and nilpotent Lie
//! algebras, with naive and structural class and orbit counts.

pub mod counting;
pub mod group;
pub mod lie;
pub mod unionfind;

pub use counting::{
    burnside_orbits, class_count_naive, class_count_naive_with, class_count_structural,
    conjugacy_classes, mtheta_orbit_count, natural_orbit_count, ConjugateBy, FiniteAction,
    MthetaAction, OrbitMode, StructuralKind,
};
pub use group::{
    baer_group, general_linear_group, heisenberg_group, mtheta_group, unitriangular_group,
    CocycleGroup, GroupKind, GroupTable, MatrixGroup,
};
pub use lie::{
    lie_adjoint_rep, lie_exp_group, lie_from_json, lie_inclusion_rep, lie_to_json, lie_validate,
    structure_constants, LieData,
};
