use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::vector::Vec3;

pub type VertexId = usize;
pub type MemberId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VertexRole {
    Start,
    Intermediate,
    Support,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MemberClass {
    Trail,
    Deviation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Member {
    pub a: VertexId,
    pub b: VertexId,
    pub class: MemberClass,
}

impl Member {
    pub fn other(&self, v: VertexId) -> VertexId {
        if self.a == v {
            self.b
        } else {
            self.a
        }
    }
}

/// One trail: vertices from the start vertex down to the support, and the
/// trail members between consecutive vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trail {
    pub vertices: Vec<VertexId>,
    pub members: Vec<MemberId>,
}

impl Trail {
    pub fn start(&self) -> VertexId {
        self.vertices[0]
    }

    pub fn support(&self) -> VertexId {
        *self.vertices.last().expect("trail is never empty")
    }
}

/// Connectivity of a network plus its trail/deviation classification.
///
/// Construction validates the structural invariants: every vertex sits on
/// exactly one trail, trails are shortest paths to their support, and
/// deviation members join vertices of equal topological distance.
#[derive(Debug, Clone)]
pub struct TopologyDiagram<T> {
    roles: Vec<VertexRole>,
    members: Vec<Member>,
    start_positions: BTreeMap<VertexId, Vec3<T>>,
    supports: Vec<VertexId>,
    distances: Vec<usize>,
    trails: Vec<Trail>,
    trail_of: Vec<(usize, usize)>,
    incident: Vec<Vec<MemberId>>,
}

fn adjacency(n: usize, members: &[Member]) -> Vec<Vec<MemberId>> {
    let mut adj = vec![Vec::new(); n];
    for (id, m) in members.iter().enumerate() {
        adj[m.a].push(id);
        adj[m.b].push(id);
    }
    adj
}

/// Breadth-first hop count from every vertex to its nearest support over
/// all members.
pub fn compute_topological_distances(
    vertex_count: usize,
    members: &[Member],
    supports: &[VertexId],
) -> Result<Vec<usize>> {
    if supports.is_empty() {
        return Err(Error::Topology { vertex: 0, message: "no support vertices".into() });
    }
    let adj = adjacency(vertex_count, members);
    let mut dist = vec![usize::MAX; vertex_count];
    let mut queue = VecDeque::new();
    for &s in supports {
        if s >= vertex_count {
            return Err(Error::Topology { vertex: s, message: "support id out of range".into() });
        }
        dist[s] = 0;
        queue.push_back(s);
    }
    while let Some(v) = queue.pop_front() {
        for &m in &adj[v] {
            let w = members[m].other(v);
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    if let Some(v) = dist.iter().position(|&d| d == usize::MAX) {
        return Err(Error::Topology {
            vertex: v,
            message: "vertex is disconnected from every support".into(),
        });
    }
    Ok(dist)
}

impl<T: Scalar> TopologyDiagram<T> {
    pub fn new(
        roles: Vec<VertexRole>,
        members: Vec<Member>,
        start_positions: BTreeMap<VertexId, Vec3<T>>,
    ) -> Result<Self> {
        let n = roles.len();
        for (id, m) in members.iter().enumerate() {
            if m.a >= n || m.b >= n || m.a == m.b {
                return Err(Error::Inconsistent {
                    member: id,
                    message: format!("invalid endpoints ({}, {})", m.a, m.b),
                });
            }
        }
        let supports: Vec<VertexId> =
            (0..n).filter(|&v| roles[v] == VertexRole::Support).collect();
        let distances = compute_topological_distances(n, &members, &supports)?;
        let incident = adjacency(n, &members);

        for (v, role) in roles.iter().enumerate() {
            if *role == VertexRole::Start && !start_positions.contains_key(&v) {
                return Err(Error::Topology { vertex: v, message: "start vertex has no position".into() });
            }
        }
        if let Some((&v, _)) = start_positions.iter().find(|(v, _)| roles.get(**v) != Some(&VertexRole::Start)) {
            return Err(Error::Topology { vertex: v, message: "position given for a non-start vertex".into() });
        }

        let mut topo = Self {
            roles,
            members,
            start_positions,
            supports,
            distances,
            trails: Vec::new(),
            trail_of: vec![(usize::MAX, 0); n],
            incident,
        };
        topo.trace_trails()?;
        topo.classify_members()?;
        Ok(topo)
    }

    fn trail_members_at(&self, v: VertexId) -> impl Iterator<Item = MemberId> + '_ {
        self.incident[v]
            .iter()
            .copied()
            .filter(|&m| self.members[m].class == MemberClass::Trail)
    }

    fn trace_trails(&mut self) -> Result<()> {
        let starts: Vec<VertexId> =
            (0..self.roles.len()).filter(|&v| self.roles[v] == VertexRole::Start).collect();
        for start in starts {
            let t = self.trails.len();
            let mut vertices = vec![start];
            let mut members = Vec::new();
            let mut prev_member = None;
            let mut v = start;
            self.trail_of[v] = (t, 0);
            while self.roles[v] != VertexRole::Support {
                let next: Vec<MemberId> =
                    self.trail_members_at(v).filter(|&m| Some(m) != prev_member).collect();
                if next.len() != 1 {
                    return Err(Error::Topology {
                        vertex: v,
                        message: format!("trail branches or ends early ({} onward trail members)", next.len()),
                    });
                }
                let m = next[0];
                let w = self.members[m].other(v);
                if self.trail_of[w].0 != usize::MAX {
                    return Err(Error::Topology { vertex: w, message: "vertex lies on more than one trail".into() });
                }
                if self.roles[w] == VertexRole::Start {
                    return Err(Error::Topology { vertex: w, message: "trail runs into another start vertex".into() });
                }
                self.trail_of[w] = (t, vertices.len());
                vertices.push(w);
                members.push(m);
                prev_member = Some(m);
                v = w;
            }
            if self.trail_members_at(v).count() != 1 {
                return Err(Error::Topology { vertex: v, message: "support must end exactly one trail".into() });
            }
            self.trails.push(Trail { vertices, members });
        }
        if let Some(v) = self.trail_of.iter().position(|&(t, _)| t == usize::MAX) {
            return Err(Error::Topology { vertex: v, message: "vertex is not on any trail".into() });
        }
        Ok(())
    }

    /// Checks the stored trail/deviation tags against the topological
    /// distances and returns them.
    pub fn classify_members(&self) -> Result<Vec<MemberClass>> {
        for trail in &self.trails {
            for (i, &m) in trail.members.iter().enumerate() {
                let (from, to) = (trail.vertices[i], trail.vertices[i + 1]);
                if self.distances[from] != self.distances[to] + 1 {
                    return Err(Error::Inconsistent {
                        member: m,
                        message: format!(
                            "trail member is not on a shortest path (distances {} -> {})",
                            self.distances[from], self.distances[to]
                        ),
                    });
                }
            }
        }
        for (id, m) in self.members.iter().enumerate() {
            if m.class == MemberClass::Deviation && self.distances[m.a] != self.distances[m.b] {
                return Err(Error::Inconsistent {
                    member: id,
                    message: format!(
                        "deviation member joins layers {} and {}",
                        self.distances[m.a], self.distances[m.b]
                    ),
                });
            }
        }
        Ok(self.members.iter().map(|m| m.class).collect())
    }

    pub fn vertex_count(&self) -> usize {
        self.roles.len()
    }

    pub fn roles(&self) -> &[VertexRole] {
        &self.roles
    }

    pub fn members(&self) -> &[Member] {
        &self.members
    }

    pub fn supports(&self) -> &[VertexId] {
        &self.supports
    }

    pub fn start_positions(&self) -> &BTreeMap<VertexId, Vec3<T>> {
        &self.start_positions
    }

    /// Topological distance of every vertex to its support.
    pub fn distances(&self) -> &[usize] {
        &self.distances
    }

    pub fn trails(&self) -> &[Trail] {
        &self.trails
    }

    /// `(trail index, position along the trail from its start)`.
    pub fn trail_position(&self, v: VertexId) -> (usize, usize) {
        self.trail_of[v]
    }

    pub fn incident(&self, v: VertexId) -> &[MemberId] {
        &self.incident[v]
    }

    pub fn deviation_members(&self) -> impl Iterator<Item = MemberId> + '_ {
        (0..self.members.len()).filter(|&m| self.members[m].class == MemberClass::Deviation)
    }

    pub fn trail_member_count(&self) -> usize {
        self.members.iter().filter(|m| m.class == MemberClass::Trail).count()
    }

    pub fn max_distance(&self) -> usize {
        self.distances.iter().copied().max().unwrap_or(0)
    }

    /// Vertices grouped by topological distance, each group in trail order.
    pub fn layers(&self) -> Vec<Vec<VertexId>> {
        let mut layers = vec![Vec::new(); self.max_distance() + 1];
        for trail in &self.trails {
            for &v in &trail.vertices {
                layers[self.distances[v]].push(v);
            }
        }
        layers
    }

    /// The next vertex toward the support, if any.
    pub fn successor(&self, v: VertexId) -> Option<(MemberId, VertexId)> {
        let (t, i) = self.trail_of[v];
        let trail = &self.trails[t];
        trail.members.get(i).map(|&m| (m, trail.vertices[i + 1]))
    }

    /// Same topology with start positions replaced.
    pub fn with_start_positions(&self, positions: BTreeMap<VertexId, Vec3<T>>) -> Result<Self> {
        if positions.len() != self.start_positions.len()
            || positions.keys().any(|k| !self.start_positions.contains_key(k))
        {
            return Err(Error::Input("start position keys do not match start vertices".into()));
        }
        let mut t = self.clone();
        t.start_positions = positions;
        Ok(t)
    }
}
