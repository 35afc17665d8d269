use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cem::{Member, MemberClass, MemberId, TopologyDiagram, VertexId, VertexRole};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::vector::Vec3;

/// Size of a ring tower: `n_trails` radial trails of `n_layers` members each.
///
/// Node layer `d` counts from the start vertices (`d = 0`) down to the
/// supports (`d = n_layers`). Vertex `(d, j)` has id `d * n_trails + j`.
/// Trail members come first in `(d, j)` order, then ring deviation members
/// `(d, j) -> (d, j + 1 mod n_trails)` for `d < n_layers`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopologySpec {
    pub n_trails: usize,
    pub n_layers: usize,
}

impl Default for TopologySpec {
    fn default() -> Self {
        Self { n_trails: 20, n_layers: 20 }
    }
}

impl TopologySpec {
    pub fn new(n_trails: usize, n_layers: usize) -> Result<Self> {
        let spec = Self { n_trails, n_layers };
        spec.check()?;
        Ok(spec)
    }

    pub fn check(&self) -> Result<()> {
        if self.n_trails < 3 {
            return Err(Error::Argument(format!("need at least 3 trails, got {}", self.n_trails)));
        }
        if self.n_layers < 1 {
            return Err(Error::Argument("need at least 1 layer".into()));
        }
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.n_trails * (self.n_layers + 1)
    }

    pub fn trail_member_count(&self) -> usize {
        self.n_trails * self.n_layers
    }

    pub fn deviation_member_count(&self) -> usize {
        self.n_trails * self.n_layers
    }

    pub fn vertex(&self, layer: usize, trail: usize) -> VertexId {
        layer * self.n_trails + trail
    }

    /// Trail member from `(layer, trail)` to `(layer + 1, trail)`.
    pub fn trail_member(&self, layer: usize, trail: usize) -> MemberId {
        layer * self.n_trails + trail
    }

    /// Ring member from `(layer, trail)` to `(layer, trail + 1)`.
    pub fn deviation_member(&self, layer: usize, trail: usize) -> MemberId {
        self.trail_member_count() + layer * self.n_trails + trail
    }

    /// Builds the ring-tower topology with start vertices on the unit circle.
    pub fn build_topology<T: Scalar>(&self) -> Result<TopologyDiagram<T>> {
        self.check()?;
        let (n, m) = (self.n_trails, self.n_layers);
        let roles = (0..=m)
            .flat_map(|d| {
                let role = match d {
                    0 => VertexRole::Start,
                    d if d == m => VertexRole::Support,
                    _ => VertexRole::Intermediate,
                };
                std::iter::repeat(role).take(n)
            })
            .collect();
        let mut members = Vec::with_capacity(2 * n * m);
        for d in 0..m {
            for j in 0..n {
                members.push(Member {
                    a: self.vertex(d, j),
                    b: self.vertex(d + 1, j),
                    class: MemberClass::Trail,
                });
            }
        }
        for d in 0..m {
            for j in 0..n {
                members.push(Member {
                    a: self.vertex(d, j),
                    b: self.vertex(d, (j + 1) % n),
                    class: MemberClass::Deviation,
                });
            }
        }
        let starts: BTreeMap<VertexId, Vec3<T>> = (0..n)
            .map(|j| {
                let angle = T::TAU() * T::from_usize_lossy(j) / T::from_usize_lossy(n);
                (self.vertex(0, j), Vec3::new(angle.cos(), angle.sin(), T::zero()))
            })
            .collect();
        TopologyDiagram::new(roles, members, starts)
    }
}
