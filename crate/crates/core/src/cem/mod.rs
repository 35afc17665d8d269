//! Combinatorial equilibrium modelling: topological diagrams and the
//! layer-sequential equilibrium solve that turns them into form diagrams.

mod solver;
mod topology;
mod validate;

pub use solver::{solve_equilibrium, CemInputs, ForceState, FormDiagram, MemberForce};
pub use topology::{
    compute_topological_distances, Member, MemberClass, MemberId, TopologyDiagram, Trail,
    VertexId, VertexRole,
};
pub use validate::{validate_equilibrium, ResidualReport};
