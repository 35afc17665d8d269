use super::solver::{CemInputs, FormDiagram};
use super::topology::TopologyDiagram;
use crate::scalar::Scalar;
use crate::vector::Vec3;

/// Force balance recomputed from positions and stored member forces.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport<T> {
    /// Magnitude of the out-of-balance force at each node.
    pub node_residuals: Vec<T>,
    pub max_residual: T,
    /// |sum of reactions + sum of loads|.
    pub reaction_balance: T,
    /// Largest distance of a node from its constraint plane.
    pub plane_deviation: T,
    pub force_scale: T,
    pub passed: bool,
}

/// Treats every member as a two-force element acting along its current
/// geometry and sums the forces at each node together with the load and,
/// at supports, the reaction.
pub fn validate_equilibrium<T: Scalar>(
    form: &FormDiagram<T>,
    topo: &TopologyDiagram<T>,
    inputs: &CemInputs<T>,
) -> ResidualReport<T> {
    let n = topo.vertex_count();
    let load = Vec3::new(T::zero(), T::zero(), -inputs.load);
    let mut sums = vec![load; n];
    for (v, r) in &form.reactions {
        sums[*v] += *r;
    }
    for (id, m) in topo.members().iter().enumerate() {
        let signed = form.member_forces[id].signed();
        let along = form.positions[m.b] - form.positions[m.a];
        let len = along.norm();
        if len > T::zero() {
            // tension pulls each end toward the other
            let f = along * (signed / len);
            sums[m.a] += f;
            sums[m.b] += -f;
        } else if signed != T::zero() {
            let bad = Vec3::new(T::infinity(), T::zero(), T::zero());
            sums[m.a] += bad;
            sums[m.b] += bad;
        }
    }
    let node_residuals: Vec<T> = sums.iter().map(|s| s.norm()).collect();
    let max_residual = node_residuals.iter().fold(T::zero(), |a, &r| a.max(r));

    let mut total = Vec3::zero();
    for r in form.reactions.values() {
        total += *r;
    }
    total += load * T::from_usize_lossy(n);
    let reaction_balance = total.norm();

    let plane_deviation = inputs
        .plane_heights
        .iter()
        .fold(T::zero(), |acc, (v, h)| acc.max((form.positions[*v].z - *h).abs()));

    let force_scale = form.force_scale();
    let limit = T::residual_tolerance() * force_scale;
    let passed = max_residual <= limit && reaction_balance <= limit;
    ResidualReport { node_residuals, max_residual, reaction_balance, plane_deviation, force_scale, passed }
}
