use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::topology::{MemberClass, MemberId, TopologyDiagram, VertexId, VertexRole};
use crate::error::{Error, Result};
use crate::generator::DesignParams;
use crate::scalar::Scalar;
use crate::vector::Vec3;

/// Numeric inputs of one equilibrium solve.
#[derive(Debug, Clone, PartialEq)]
pub struct CemInputs<T> {
    /// Signed force per deviation member: positive is tension.
    pub deviation_forces: BTreeMap<MemberId, T>,
    /// Elevation of the horizontal constraint plane of every non-start vertex.
    pub plane_heights: BTreeMap<VertexId, T>,
    /// Radius of the start circle the start positions were generated from.
    pub radius: T,
    /// Vertical load at every node, acting in -z.
    pub load: T,
    /// Start positions overriding those stored in the topology.
    pub start_positions: BTreeMap<VertexId, Vec3<T>>,
}

impl<T: Scalar> CemInputs<T> {
    pub fn start_position(&self, topo: &TopologyDiagram<T>, v: VertexId) -> Vec3<T> {
        self.start_positions
            .get(&v)
            .or_else(|| topo.start_positions().get(&v))
            .copied()
            .expect("start vertex without position")
    }

    /// Checks completeness against the topology and the plane ordering
    /// along every trail.
    pub fn check(&self, topo: &TopologyDiagram<T>) -> Result<()> {
        let deviations: Vec<MemberId> = topo.deviation_members().collect();
        if deviations.len() != self.deviation_forces.len()
            || deviations.iter().any(|m| !self.deviation_forces.contains_key(m))
        {
            return Err(Error::Input("every deviation member needs exactly one force".into()));
        }
        for (v, role) in topo.roles().iter().enumerate() {
            let has = self.plane_heights.contains_key(&v);
            if (*role == VertexRole::Start) == has {
                return Err(Error::Input(format!(
                    "vertex {v}: plane heights are required for non-start vertices only"
                )));
            }
        }
        if self.plane_heights.len() + topo.start_positions().len() != topo.vertex_count() {
            return Err(Error::Input("plane heights reference unknown vertices".into()));
        }
        if let Some(v) = self.start_positions.keys().find(|v| topo.roles().get(**v) != Some(&VertexRole::Start)) {
            return Err(Error::Input(format!("start position given for non-start vertex {v}")));
        }
        if !(self.load >= T::zero()) || !self.load.is_finite() {
            return Err(Error::Input("load must be finite and non-negative".into()));
        }
        for trail in topo.trails() {
            let mut z = self.start_position(topo, trail.start()).z;
            for &v in &trail.vertices[1..] {
                let h = self.plane_heights[&v];
                if !(h < z) {
                    return Err(Error::Input(format!(
                        "plane ordering violated at vertex {v}: {h} is not below {z}"
                    )));
                }
                z = h;
            }
        }
        Ok(())
    }

    /// Largest input force magnitude.
    pub fn force_scale(&self) -> T {
        self.deviation_forces.values().fold(self.load, |acc, d| acc.max(d.abs()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ForceState {
    Tension,
    Compression,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MemberForce<T> {
    pub magnitude: T,
    pub state: ForceState,
}

impl<T: Scalar> MemberForce<T> {
    /// Positive for tension, negative for compression.
    pub fn signed(&self) -> T {
        match self.state {
            ForceState::Tension => self.magnitude,
            ForceState::Compression => -self.magnitude,
            ForceState::Zero => T::zero(),
        }
    }
}

/// Solved geometry and internal forces of a network.
#[derive(Debug, Clone, PartialEq)]
pub struct FormDiagram<T> {
    pub positions: Vec<Vec3<T>>,
    pub member_forces: Vec<MemberForce<T>>,
    pub reactions: BTreeMap<VertexId, Vec3<T>>,
    pub load: T,
    pub source: Option<DesignParams>,
}

impl<T: Scalar> FormDiagram<T> {
    pub fn max_member_force(&self) -> T {
        self.member_forces.iter().fold(T::zero(), |acc, f| acc.max(f.magnitude))
    }

    /// Force scale used by the residual tolerance.
    pub fn force_scale(&self) -> T {
        self.load.max(self.max_member_force())
    }
}

/// Solves the network layer by layer, starting from the start vertices.
///
/// At each node the incoming trail force, the deviation pulls toward the
/// already placed same-layer neighbours and the load add up to a resultant;
/// the outgoing trail member runs along that resultant to the successor's
/// constraint plane.
pub fn solve_equilibrium<T: Scalar>(
    topo: &TopologyDiagram<T>,
    inputs: &CemInputs<T>,
) -> Result<FormDiagram<T>> {
    inputs.check(topo)?;

    let n = topo.vertex_count();
    let members = topo.members();
    let load = Vec3::new(T::zero(), T::zero(), -inputs.load);
    let scale = inputs.force_scale();
    let tiny = T::degeneracy_tolerance();

    let mut positions: Vec<Option<Vec3<T>>> = vec![None; n];
    for trail in topo.trails() {
        positions[trail.start()] = Some(inputs.start_position(topo, trail.start()));
    }
    let mut incoming = vec![Vec3::zero(); n];
    let mut member_forces = vec![
        MemberForce { magnitude: T::zero(), state: ForceState::Zero };
        members.len()
    ];
    for (&m, &d) in &inputs.deviation_forces {
        member_forces[m] = MemberForce {
            magnitude: d.abs(),
            state: if d > T::zero() {
                ForceState::Tension
            } else if d < T::zero() {
                ForceState::Compression
            } else {
                ForceState::Zero
            },
        };
    }
    let mut reactions = BTreeMap::new();

    for layer in topo.layers().iter().rev() {
        for &v in layer {
            let here = positions[v].expect("layer placed before it is processed");
            let mut resultant = incoming[v] + load;
            for &m in topo.incident(v) {
                if members[m].class != MemberClass::Deviation {
                    continue;
                }
                let nb = members[m].other(v);
                let there = positions[nb].expect("same-layer neighbour placed");
                let dir = (there - here).normalized().ok_or_else(|| Error::Degenerate {
                    vertex: v,
                    message: format!("deviation member {m} has zero length"),
                })?;
                resultant += dir * inputs.deviation_forces[&m];
            }

            let Some((trail_member, next)) = topo.successor(v) else {
                reactions.insert(v, -resultant);
                continue;
            };

            let magnitude = resultant.norm();
            if !(magnitude > tiny * scale) {
                return Err(Error::Degenerate {
                    vertex: v,
                    message: "zero resultant leaves the trail direction undefined".into(),
                });
            }
            if !(resultant.z.abs() >= tiny * magnitude) {
                return Err(Error::Degenerate {
                    vertex: v,
                    message: "resultant is parallel to the constraint plane".into(),
                });
            }
            let plane = inputs.plane_heights[&next];
            let dir = resultant * (T::one() / magnitude);
            let t = (plane - here.z) / dir.z;
            let mut p = here + dir * t;
            p.z = plane;
            if !p.is_finite() {
                return Err(Error::Degenerate { vertex: next, message: "non-finite position".into() });
            }
            positions[next] = Some(p);
            incoming[next] = resultant;
            member_forces[trail_member] = MemberForce {
                magnitude,
                state: if t > T::zero() { ForceState::Compression } else { ForceState::Tension },
            };
        }
    }

    Ok(FormDiagram {
        positions: positions.into_iter().map(|p| p.expect("every vertex placed")).collect(),
        member_forces,
        reactions,
        load: inputs.load,
        source: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cem::{Member, VertexRole};

    fn approx(a: Vec3<f64>, b: Vec3<f64>) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn vertical_load_path() {
        let roles = vec![VertexRole::Start, VertexRole::Support];
        let members = vec![Member { a: 0, b: 1, class: MemberClass::Trail }];
        let topo = TopologyDiagram::new(roles, members, BTreeMap::from([(0, Vec3::zero())])).unwrap();
        let inputs = CemInputs {
            deviation_forces: BTreeMap::new(),
            plane_heights: BTreeMap::from([(1, -1.0)]),
            radius: 0.0,
            load: 2.0,
            start_positions: BTreeMap::new(),
        };
        let form = solve_equilibrium(&topo, &inputs).unwrap();
        assert!(approx(form.positions[1], Vec3::new(0.0, 0.0, -1.0)));
        assert_eq!(form.member_forces[0].state, ForceState::Compression);
        assert!((form.member_forces[0].magnitude - 2.0).abs() < 1e-12);
        assert!(approx(form.reactions[&1], Vec3::new(0.0, 0.0, 4.0)));
    }

    fn four_ring(d: f64) -> (TopologyDiagram<f64>, CemInputs<f64>) {
        // starts 0..4 on the unit circle, supports 4..8 below them
        let mut roles = vec![VertexRole::Start; 4];
        roles.extend([VertexRole::Support; 4]);
        let mut members: Vec<Member> =
            (0..4).map(|j| Member { a: j, b: j + 4, class: MemberClass::Trail }).collect();
        members.extend((0..4).map(|j| Member { a: j, b: (j + 1) % 4, class: MemberClass::Deviation }));
        let starts = (0..4)
            .map(|j| {
                let a = std::f64::consts::FRAC_PI_2 * j as f64;
                (j, Vec3::new(a.cos(), a.sin(), 0.0))
            })
            .collect();
        let topo = TopologyDiagram::new(roles, members, starts).unwrap();
        let inputs = CemInputs {
            deviation_forces: (4..8).map(|m| (m, d)).collect(),
            plane_heights: (4..8).map(|v| (v, -1.0)).collect(),
            radius: 1.0,
            load: 1.0,
            start_positions: BTreeMap::new(),
        };
        (topo, inputs)
    }

    #[test]
    fn ring_tension_pulls_trails_inward() {
        let (topo, inputs) = four_ring(1.0);
        let form = solve_equilibrium(&topo, &inputs).unwrap();
        let s2 = std::f64::consts::SQRT_2;
        assert!((form.positions[4] - Vec3::new(1.0 - s2, 0.0, -1.0)).norm() < 1e-12);
        assert!((form.member_forces[0].magnitude - 3f64.sqrt()).abs() < 1e-12);
        assert_eq!(form.member_forces[0].state, ForceState::Compression);
        assert_eq!(form.member_forces[4].state, ForceState::Tension);
    }

    #[test]
    fn zero_deviation_gives_vertical_trails() {
        let (topo, inputs) = four_ring(0.0);
        let form = solve_equilibrium(&topo, &inputs).unwrap();
        for j in 0..4 {
            let (top, bottom) = (form.positions[j], form.positions[j + 4]);
            assert!((top.x - bottom.x).abs() < 1e-15 && (top.y - bottom.y).abs() < 1e-15);
            assert_eq!(form.member_forces[j].state, ForceState::Compression);
        }
    }

    #[test]
    fn zero_load_and_zero_deviation_is_degenerate() {
        let (topo, mut inputs) = four_ring(0.0);
        inputs.load = 0.0;
        assert!(matches!(solve_equilibrium(&topo, &inputs), Err(Error::Degenerate { .. })));
    }

    #[test]
    fn horizontal_resultant_is_degenerate() {
        // load 0, ring tension only: resultant is horizontal
        let (topo, mut inputs) = four_ring(1.0);
        inputs.load = 0.0;
        let err = solve_equilibrium(&topo, &inputs).unwrap_err();
        assert!(matches!(err, Error::Degenerate { vertex: 0, .. }));
    }

    #[test]
    fn plane_above_predecessor_is_an_input_error() {
        let (topo, mut inputs) = four_ring(1.0);
        inputs.plane_heights.insert(5, 0.5);
        assert!(matches!(solve_equilibrium(&topo, &inputs), Err(Error::Input(_))));
    }

    #[test]
    fn missing_deviation_force_is_an_input_error() {
        let (topo, mut inputs) = four_ring(1.0);
        inputs.deviation_forces.remove(&5);
        assert!(matches!(solve_equilibrium(&topo, &inputs), Err(Error::Input(_))));
    }

    #[test]
    fn negative_load_is_an_input_error() {
        let roles = vec![VertexRole::Start, VertexRole::Support];
        let members = vec![Member { a: 0, b: 1, class: MemberClass::Trail }];
        let topo = TopologyDiagram::new(roles, members, BTreeMap::from([(0, Vec3::zero())])).unwrap();
        let inputs = CemInputs {
            deviation_forces: BTreeMap::new(),
            plane_heights: BTreeMap::from([(1, -1.0)]),
            radius: 0.0,
            load: -1.0,
            start_positions: BTreeMap::new(),
        };
        assert!(matches!(solve_equilibrium(&topo, &inputs), Err(Error::Input(_))));
    }
}
