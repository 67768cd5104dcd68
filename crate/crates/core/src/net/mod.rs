//! Three-phase network and demand data model.
//!
//! Everything downstream (power flow, LP formulations, scenario pipelines)
//! consumes the types defined here. All quantities are stored per-unit on the
//! network's own base; file ingestion converts from ohms/kW at the boundary.

mod builders;
mod profile;
mod schema;

pub use builders::{build_cigre_lv, build_synthetic_feeder, NetworkBundle};
pub use profile::{DemandSnapshot, Direction, LoadProfile, PhasePower};
pub use schema::{
    load_network, load_profile, save_network, save_profile, NetworkFile, ProfileSidecar,
};

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// Errors from file ingestion and model construction.
#[derive(Debug, Error)]
pub enum NetError {
    #[error("parse error in {path}: {detail}")]
    Parse { path: String, detail: String },
    #[error("validation error: {0}")]
    Validation(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// One of the three phases of the network. Nominal angles are 0°, −120° and
/// +120° for A, B and C.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Phase {
    A,
    B,
    C,
}

impl Phase {
    pub const ALL: [Phase; 3] = [Phase::A, Phase::B, Phase::C];

    /// Index 0, 1, 2 for A, B, C.
    pub fn index(self) -> usize {
        match self {
            Phase::A => 0,
            Phase::B => 1,
            Phase::C => 2,
        }
    }

    pub fn from_index(i: usize) -> Phase {
        Phase::ALL[i]
    }

    /// Nominal angle in radians: 0, −2π/3, +2π/3.
    pub fn nominal_angle(self) -> f64 {
        match self {
            Phase::A => 0.0,
            Phase::B => -2.0 * std::f64::consts::PI / 3.0,
            Phase::C => 2.0 * std::f64::consts::PI / 3.0,
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Phase::A => write!(f, "a"),
            Phase::B => write!(f, "b"),
            Phase::C => write!(f, "c"),
        }
    }
}

/// Node identifier as written in network files.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Symmetric 3×3 real matrix, row-major, indexed by phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Matrix3(pub [[f64; 3]; 3]);

impl Matrix3 {
    pub fn zeros() -> Self {
        Matrix3([[0.0; 3]; 3])
    }

    pub fn diagonal(d: f64) -> Self {
        let mut m = [[0.0; 3]; 3];
        for (p, row) in m.iter_mut().enumerate() {
            row[p] = d;
        }
        Matrix3(m)
    }

    /// Build from self and mutual terms (all diagonals equal, all
    /// off-diagonals equal) — the usual transposed-line approximation.
    pub fn from_self_mutual(self_z: f64, mutual: f64) -> Self {
        let mut m = [[mutual; 3]; 3];
        for (p, row) in m.iter_mut().enumerate() {
            row[p] = self_z;
        }
        Matrix3(m)
    }

    pub fn get(&self, p: Phase, q: Phase) -> f64 {
        self.0[p.index()][q.index()]
    }

    pub fn scale(&self, k: f64) -> Self {
        let mut m = self.0;
        for row in m.iter_mut() {
            for v in row.iter_mut() {
                *v *= k;
            }
        }
        Matrix3(m)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        for p in 0..3 {
            for q in (p + 1)..3 {
                if (self.0[p][q] - self.0[q][p]).abs() > tol {
                    return false;
                }
            }
        }
        true
    }
}

/// A line between two nodes with per-unit impedance matrices and a per-phase
/// ampacity (also per-unit).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Branch {
    pub from: NodeId,
    pub to: NodeId,
    /// Per-unit resistance between phases.
    pub r: Matrix3,
    /// Per-unit reactance between phases.
    pub x: Matrix3,
    /// Per-phase current limit, per-unit.
    pub ampacity: f64,
}

/// Voltage-quality limits enforced by the constraint checks.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct OperatingLimits {
    pub u_min: f64,
    pub u_max: f64,
    pub vuf_max: f64,
}

impl Default for OperatingLimits {
    fn default() -> Self {
        OperatingLimits {
            u_min: 0.9,
            u_max: 1.1,
            vuf_max: 0.02,
        }
    }
}

impl OperatingLimits {
    fn validate(&self) -> Result<(), NetError> {
        if !(self.u_min > 0.0 && self.u_min < 1.0 && self.u_max > 1.0) {
            return Err(NetError::Validation(format!(
                "voltage limits must satisfy 0 < u_min < 1 < u_max, got [{}, {}]",
                self.u_min, self.u_max
            )));
        }
        if !(self.vuf_max > 0.0 && self.vuf_max < 1.0) {
            return Err(NetError::Validation(format!(
                "vuf_max must be in (0, 1), got {}",
                self.vuf_max
            )));
        }
        Ok(())
    }
}

/// Per-unit conversion helpers derived from the network base.
#[derive(Debug, Clone, Copy)]
pub struct BaseUnits {
    /// Phase-to-neutral base voltage, volts.
    pub v_phase: f64,
    /// Three-phase base power, VA.
    pub s_total: f64,
}

impl BaseUnits {
    /// Single-phase base power, VA.
    pub fn s_phase(&self) -> f64 {
        self.s_total / 3.0
    }

    /// Base impedance, ohms.
    pub fn z_base(&self) -> f64 {
        self.v_phase * self.v_phase / self.s_phase()
    }

    /// Base current, amperes.
    pub fn i_base(&self) -> f64 {
        self.s_phase() / self.v_phase
    }

    pub fn kw_to_pu(&self, kw: f64) -> f64 {
        kw * 1000.0 / self.s_phase()
    }

    pub fn pu_to_kw(&self, pu: f64) -> f64 {
        pu * self.s_phase() / 1000.0
    }
}

/// Parent/child bookkeeping for the radial feeder, built once at validation.
#[derive(Debug, Clone)]
pub struct TreeIndex {
    /// For each node index: the branch index towards the slack, or None for
    /// the slack itself.
    pub parent_branch: Vec<Option<usize>>,
    /// For each node index: branch indices towards children.
    pub child_branches: Vec<Vec<usize>>,
    /// Node indices in breadth-first order from the slack.
    pub bfs_order: Vec<usize>,
    /// For each branch index: (upstream node index, downstream node index).
    pub branch_dir: Vec<(usize, usize)>,
}

/// A radial three-phase feeder.
///
/// Construction validates radiality (|branches| = |nodes| − 1, connected,
/// acyclic), impedance symmetry, and slack/DER membership; the tree index is
/// cached so the model is immutable and cheap to share afterwards.
#[derive(Debug, Clone)]
pub struct NetworkModel {
    nodes: Vec<NodeId>,
    branches: Vec<Branch>,
    slack: NodeId,
    /// Phase-to-neutral base voltage, volts (230.94 V for a 0.4 kV feeder).
    base_voltage: f64,
    /// Three-phase base power, VA.
    base_power: f64,
    limits: OperatingLimits,
    der_nodes: Vec<NodeId>,
    index_of: BTreeMap<NodeId, usize>,
    tree: TreeIndex,
}

impl NetworkModel {
    pub fn new(
        nodes: Vec<NodeId>,
        branches: Vec<Branch>,
        slack: NodeId,
        base_voltage: f64,
        base_power: f64,
        limits: OperatingLimits,
        der_nodes: Vec<NodeId>,
    ) -> Result<Self, NetError> {
        limits.validate()?;
        if base_voltage <= 0.0 || base_power <= 0.0 {
            return Err(NetError::Validation(
                "base voltage and power must be positive".into(),
            ));
        }
        let mut index_of = BTreeMap::new();
        for (i, id) in nodes.iter().enumerate() {
            if index_of.insert(*id, i).is_some() {
                return Err(NetError::Validation(format!("duplicate node {id}")));
            }
        }
        if !index_of.contains_key(&slack) {
            return Err(NetError::Validation(format!(
                "slack node {slack} is not in the node list"
            )));
        }
        if branches.len() + 1 != nodes.len() {
            return Err(NetError::Validation(format!(
                "expected {} branches for {} nodes, got {}",
                nodes.len() - 1,
                nodes.len(),
                branches.len()
            )));
        }
        for b in &branches {
            if b.from == b.to {
                return Err(NetError::Validation(format!(
                    "branch {}->{} is a self-loop at node {}",
                    b.from, b.to, b.from
                )));
            }
            for id in [b.from, b.to] {
                if !index_of.contains_key(&id) {
                    return Err(NetError::Validation(format!(
                        "branch {}->{} references unknown node {id}",
                        b.from, b.to
                    )));
                }
            }
            if !b.r.is_symmetric(1e-9) || !b.x.is_symmetric(1e-9) {
                return Err(NetError::Validation(format!(
                    "branch {}->{} has an asymmetric impedance matrix",
                    b.from, b.to
                )));
            }
            if b.ampacity <= 0.0 {
                return Err(NetError::Validation(format!(
                    "branch {}->{} has non-positive ampacity",
                    b.from, b.to
                )));
            }
        }
        for d in &der_nodes {
            if !index_of.contains_key(d) {
                return Err(NetError::Validation(format!("DER node {d} is unknown")));
            }
            if *d == slack {
                return Err(NetError::Validation(format!(
                    "DER node {d} is the slack node"
                )));
            }
        }

        let tree = Self::build_tree(&nodes, &branches, &index_of, slack)?;
        Ok(NetworkModel {
            nodes,
            branches,
            slack,
            base_voltage,
            base_power,
            limits,
            der_nodes,
            index_of,
            tree,
        })
    }

    fn build_tree(
        nodes: &[NodeId],
        branches: &[Branch],
        index_of: &BTreeMap<NodeId, usize>,
        slack: NodeId,
    ) -> Result<TreeIndex, NetError> {
        let n = nodes.len();
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for (bi, b) in branches.iter().enumerate() {
            let fi = index_of[&b.from];
            let ti = index_of[&b.to];
            adj[fi].push((ti, bi));
            adj[ti].push((fi, bi));
        }
        let root = index_of[&slack];
        let mut parent_branch = vec![None; n];
        let mut child_branches = vec![Vec::new(); n];
        let mut branch_dir = vec![(usize::MAX, usize::MAX); branches.len()];
        let mut visited = vec![false; n];
        let mut bfs_order = Vec::with_capacity(n);
        let mut queue = std::collections::VecDeque::new();
        visited[root] = true;
        queue.push_back(root);
        while let Some(u) = queue.pop_front() {
            bfs_order.push(u);
            for &(v, bi) in &adj[u] {
                if Some(bi) == parent_branch[u] {
                    continue;
                }
                if visited[v] {
                    return Err(NetError::Validation(format!(
                        "cycle detected through branch {}->{} at node {}",
                        branches[bi].from, branches[bi].to, nodes[v]
                    )));
                }
                visited[v] = true;
                parent_branch[v] = Some(bi);
                child_branches[u].push(bi);
                branch_dir[bi] = (u, v);
                queue.push_back(v);
            }
        }
        if let Some(i) = visited.iter().position(|v| !v) {
            return Err(NetError::Validation(format!(
                "node {} is not connected to the slack",
                nodes[i]
            )));
        }
        Ok(TreeIndex {
            parent_branch,
            child_branches,
            bfs_order,
            branch_dir,
        })
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn slack(&self) -> NodeId {
        self.slack
    }

    pub fn limits(&self) -> &OperatingLimits {
        &self.limits
    }

    pub fn der_nodes(&self) -> &[NodeId] {
        &self.der_nodes
    }

    pub fn base(&self) -> BaseUnits {
        BaseUnits {
            v_phase: self.base_voltage,
            s_total: self.base_power,
        }
    }

    pub fn node_index(&self, id: NodeId) -> usize {
        self.index_of[&id]
    }

    pub fn try_node_index(&self, id: NodeId) -> Option<usize> {
        self.index_of.get(&id).copied()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn tree(&self) -> &TreeIndex {
        &self.tree
    }

    /// Sum of per-phase ampacities over branches incident to the slack;
    /// an upper envelope on deliverable per-unit current.
    pub fn slack_feed_capacity(&self) -> f64 {
        let root = self.node_index(self.slack);
        self.tree.child_branches[root]
            .iter()
            .map(|&bi| 3.0 * self.branches[bi].ampacity)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_node() -> NetworkModel {
        NetworkModel::new(
            vec![NodeId(1), NodeId(2)],
            vec![Branch {
                from: NodeId(1),
                to: NodeId(2),
                r: Matrix3::diagonal(0.05),
                x: Matrix3::diagonal(0.02),
                ampacity: 2.0,
            }],
            NodeId(1),
            230.94,
            1.0e6,
            OperatingLimits::default(),
            vec![NodeId(2)],
        )
        .unwrap()
    }

    #[test]
    fn smallest_tree_is_valid() {
        let net = two_node();
        assert_eq!(net.node_count(), 2);
        assert_eq!(net.tree().bfs_order, vec![0, 1]);
        assert_eq!(net.tree().parent_branch, vec![None, Some(0)]);
    }

    #[test]
    fn self_loop_is_rejected_naming_the_node() {
        let err = NetworkModel::new(
            vec![NodeId(1), NodeId(5)],
            vec![Branch {
                from: NodeId(5),
                to: NodeId(5),
                r: Matrix3::zeros(),
                x: Matrix3::zeros(),
                ampacity: 1.0,
            }],
            NodeId(1),
            230.94,
            1.0e6,
            OperatingLimits::default(),
            vec![],
        )
        .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("self-loop"), "{msg}");
        assert!(msg.contains('5'), "{msg}");
    }

    #[test]
    fn asymmetric_matrix_is_rejected() {
        let mut r = Matrix3::diagonal(0.1);
        r.0[0][1] = 0.03;
        let err = NetworkModel::new(
            vec![NodeId(1), NodeId(2)],
            vec![Branch {
                from: NodeId(1),
                to: NodeId(2),
                r,
                x: Matrix3::zeros(),
                ampacity: 1.0,
            }],
            NodeId(1),
            230.94,
            1.0e6,
            OperatingLimits::default(),
            vec![],
        )
        .unwrap_err();
        assert!(err.to_string().contains("asymmetric"));
    }

    #[test]
    fn base_unit_conversions_are_consistent() {
        let base = two_node().base();
        // 0.4 kV line-to-line, 1 MVA
        assert!((base.z_base() - 230.94 * 230.94 / (1.0e6 / 3.0)).abs() < 1e-12);
        let kw = 12.5;
        assert!((base.pu_to_kw(base.kw_to_pu(kw)) - kw).abs() < 1e-12);
    }

    #[test]
    fn der_at_slack_is_rejected() {
        let err = NetworkModel::new(
            vec![NodeId(1), NodeId(2)],
            vec![Branch {
                from: NodeId(1),
                to: NodeId(2),
                r: Matrix3::diagonal(0.05),
                x: Matrix3::diagonal(0.02),
                ampacity: 2.0,
            }],
            NodeId(1),
            230.94,
            1.0e6,
            OperatingLimits::default(),
            vec![NodeId(1)],
        )
        .unwrap_err();
        assert!(err.to_string().contains("slack"));
    }
}
