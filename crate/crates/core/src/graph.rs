//! Conflict graphs, hop distances and local views.

use std::collections::VecDeque;
use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// A user (transmitter-receiver pair), 0-based internally.
///
/// `Display` prints the 1-based label used in every human-facing format.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct UserId(pub usize);

impl UserId {
    pub fn index(self) -> usize {
        self.0
    }

    /// Build from a 1-based label.
    pub fn from_label(label: usize) -> Option<UserId> {
        label.checked_sub(1).map(UserId)
    }

    pub fn label(self) -> usize {
        self.0 + 1
    }
}

impl fmt::Display for UserId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0 + 1)
    }
}

/// Hop distance between two users.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Distance {
    Hops(usize),
    Unreachable,
}

impl Distance {
    pub fn hops(self) -> Option<usize> {
        match self {
            Distance::Hops(h) => Some(h),
            Distance::Unreachable => None,
        }
    }

    pub fn within(self, limit: usize) -> bool {
        matches!(self, Distance::Hops(h) if h <= limit)
    }
}

/// Undirected simple graph over users `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConflictGraph {
    adj: Vec<Vec<UserId>>,
    matrix: Vec<FixedBitSet>,
}

impl ConflictGraph {
    /// Graph on `n` users and no edges.
    pub fn empty(n: usize) -> Self {
        ConflictGraph {
            adj: vec![Vec::new(); n],
            matrix: vec![FixedBitSet::with_capacity(n); n],
        }
    }

    /// Build from 0-based undirected edges. Duplicates are merged; self-loops
    /// and out-of-range endpoints are rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = ConflictGraph::empty(n);
        for (u, v) in edges {
            g.add_edge(UserId(u), UserId(v))?;
        }
        g.finish();
        Ok(g)
    }

    fn add_edge(&mut self, u: UserId, v: UserId) -> Result<()> {
        self.check(u)?;
        self.check(v)?;
        if u == v {
            return Err(invalid(format!("self-loop on user {u}")));
        }
        if !self.matrix[u.0].contains(v.0) {
            self.matrix[u.0].insert(v.0);
            self.matrix[v.0].insert(u.0);
            self.adj[u.0].push(v);
            self.adj[v.0].push(u);
        }
        Ok(())
    }

    fn finish(&mut self) {
        for list in &mut self.adj {
            list.sort_unstable();
        }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn users(&self) -> impl Iterator<Item = UserId> + '_ {
        (0..self.n()).map(UserId)
    }

    pub fn check(&self, v: UserId) -> Result<()> {
        if v.0 < self.n() {
            Ok(())
        } else {
            Err(Error::UserOutOfRange { user: v, n: self.n() })
        }
    }

    /// Neighbors of `v` in ascending order.
    pub fn neighbors(&self, v: UserId) -> Result<&[UserId]> {
        self.check(v)?;
        Ok(&self.adj[v.0])
    }

    /// Unchecked neighbor access for hot loops; panics when `v` is out of range.
    pub(crate) fn adj(&self, v: UserId) -> &[UserId] {
        &self.adj[v.0]
    }

    pub(crate) fn adjacency_row(&self, v: UserId) -> &FixedBitSet {
        &self.matrix[v.0]
    }

    pub fn is_adjacent(&self, u: UserId, v: UserId) -> bool {
        u.0 < self.n() && self.matrix[u.0].contains(v.0)
    }

    pub fn degree(&self, v: UserId) -> usize {
        self.adj[v.0].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (UserId, UserId)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, list)| {
            list.iter()
                .filter(move |v| v.0 > u)
                .map(move |&v| (UserId(u), v))
        })
    }

    /// Hop distances from `source` to every user.
    pub fn distances_from(&self, source: UserId) -> Result<Vec<Distance>> {
        self.check(source)?;
        Ok(self.bfs(source, usize::MAX))
    }

    /// BFS truncated at `limit` hops; users beyond it are `Unreachable`.
    pub(crate) fn bfs(&self, source: UserId, limit: usize) -> Vec<Distance> {
        let mut dist = vec![Distance::Unreachable; self.n()];
        dist[source.0] = Distance::Hops(0);
        let mut queue = VecDeque::from([(source, 0usize)]);
        while let Some((u, d)) = queue.pop_front() {
            if d == limit {
                continue;
            }
            for &w in &self.adj[u.0] {
                if dist[w.0] == Distance::Unreachable {
                    dist[w.0] = Distance::Hops(d + 1);
                    queue.push_back((w, d + 1));
                }
            }
        }
        dist
    }

    pub fn bfs_distance(&self, u: UserId, v: UserId) -> Result<Distance> {
        self.check(u)?;
        self.check(v)?;
        Ok(self.bfs(u, usize::MAX)[v.0])
    }

    /// Largest finite eccentricity, or `Unreachable` if the graph is disconnected.
    pub fn diameter(&self) -> Distance {
        let mut best = 0;
        for u in self.users() {
            for d in self.bfs(u, usize::MAX) {
                match d {
                    Distance::Hops(h) => best = best.max(h),
                    Distance::Unreachable => return Distance::Unreachable,
                }
            }
        }
        Distance::Hops(best)
    }

    /// Subgraph induced by `members` (sorted, distinct), renumbered densely in
    /// the order given.
    pub fn induced(&self, members: &[UserId]) -> ConflictGraph {
        let mut local = vec![usize::MAX; self.n()];
        for (i, m) in members.iter().enumerate() {
            local[m.0] = i;
        }
        let mut sub = ConflictGraph::empty(members.len());
        for (i, m) in members.iter().enumerate() {
            for &w in &self.adj[m.0] {
                let j = local[w.0];
                if j != usize::MAX && j > i {
                    sub.matrix[i].insert(j);
                    sub.matrix[j].insert(i);
                    sub.adj[i].push(UserId(j));
                    sub.adj[j].push(UserId(i));
                }
            }
        }
        sub.finish();
        sub
    }

    /// The `tau`-hop local view around `center`.
    pub fn ball(&self, center: UserId, tau: usize) -> Result<LocalView> {
        self.check(center)?;
        let dist = self.bfs(center, tau);
        let id_map: Vec<UserId> = self
            .users()
            .filter(|u| dist[u.0].within(tau))
            .collect();
        let subgraph = self.induced(&id_map);
        let global_degree = id_map.iter().map(|&u| self.degree(u)).collect();
        Ok(LocalView {
            center,
            radius: tau,
            subgraph,
            id_map,
            global_degree,
        })
    }

    /// Users of degree exactly one.
    pub fn degree_one_set(&self) -> Vec<UserId> {
        self.users().filter(|&u| self.degree(u) == 1).collect()
    }
}

/// Knowledge of a single user: everything within `radius` hops of `center`.
#[derive(Clone, Debug)]
pub struct LocalView {
    pub center: UserId,
    pub radius: usize,
    /// Induced subgraph, numbered `0..id_map.len()`.
    pub subgraph: ConflictGraph,
    /// Local index to original user, ascending.
    pub id_map: Vec<UserId>,
    /// Degree in the original graph of each local vertex.
    pub global_degree: Vec<usize>,
}

impl LocalView {
    pub fn to_global(&self, local: UserId) -> UserId {
        self.id_map[local.0]
    }

    pub fn to_local(&self, global: UserId) -> Option<UserId> {
        self.id_map.binary_search(&global).ok().map(UserId)
    }

    pub fn contains(&self, global: UserId) -> bool {
        self.to_local(global).is_some()
    }

    /// Users in the view whose degree in the original graph is one.
    ///
    /// Degrees are not read from the truncated subgraph, where boundary
    /// vertices lose neighbors.
    pub fn degree_one_set(&self) -> Vec<UserId> {
        self.id_map
            .iter()
            .zip(&self.global_degree)
            .filter(|(_, &d)| d == 1)
            .map(|(&u, _)| u)
            .collect()
    }
}

/// Hops of interference-network channel knowledge equivalent to `eta` hops in
/// the conflict graph.
pub fn hops_conflict_to_interference(eta: usize) -> usize {
    2 * eta + 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{line_clique, line_star};

    fn ids(v: &[usize]) -> Vec<UserId> {
        v.iter().map(|&x| UserId(x)).collect()
    }

    fn complete(n: usize) -> ConflictGraph {
        let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
        ConflictGraph::from_edges(n, edges).unwrap()
    }

    #[test]
    fn neighbors_of_line_clique_junction() {
        let g = line_clique(6).unwrap();
        assert_eq!(g.neighbors(UserId(3)).unwrap(), ids(&[2, 4, 5]).as_slice());
        assert_eq!(complete(4).neighbors(UserId(0)).unwrap(), ids(&[1, 2, 3]).as_slice());
        let iso = ConflictGraph::from_edges(3, [(0, 1)]).unwrap();
        assert!(iso.neighbors(UserId(2)).unwrap().is_empty());
        assert!(matches!(
            g.neighbors(UserId(6)),
            Err(Error::UserOutOfRange { .. })
        ));
    }

    #[test]
    fn distances() {
        let g = line_clique(6).unwrap();
        assert_eq!(g.bfs_distance(UserId(0), UserId(5)).unwrap(), Distance::Hops(4));
        assert_eq!(g.bfs_distance(UserId(2), UserId(2)).unwrap(), Distance::Hops(0));
        let split = ConflictGraph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(split.bfs_distance(UserId(0), UserId(3)).unwrap(), Distance::Unreachable);
        assert_eq!(split.diameter(), Distance::Unreachable);
    }

    #[test]
    fn ball_of_line_end() {
        let g = line_clique(6).unwrap();
        let view = g.ball(UserId(0), 2).unwrap();
        assert_eq!(view.id_map, ids(&[0, 1, 2]));
        let edges: Vec<_> = view.subgraph.edges().collect();
        assert_eq!(edges, vec![(UserId(0), UserId(1)), (UserId(1), UserId(2))]);

        let single = g.ball(UserId(3), 0).unwrap();
        assert_eq!(single.id_map, ids(&[3]));
        assert_eq!(single.subgraph.edge_count(), 0);

        let star = ConflictGraph::from_edges(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        let whole = star.ball(UserId(0), 1).unwrap();
        assert_eq!(whole.subgraph, star);
    }

    #[test]
    fn degree_one_uses_original_degrees() {
        let g = line_clique(10).unwrap();
        let full = g.ball(UserId(0), 20).unwrap();
        assert_eq!(full.degree_one_set(), ids(&[0]));
        // user 3 sits on the boundary of this ball with one visible neighbor
        let partial = g.ball(UserId(0), 3).unwrap();
        assert_eq!(partial.subgraph.degree(UserId(3)), 1);
        assert_eq!(partial.degree_one_set(), ids(&[0]));

        let cycle = ConflictGraph::from_edges(5, (0..5).map(|i| (i, (i + 1) % 5))).unwrap();
        assert!(cycle.degree_one_set().is_empty());
        let star = ConflictGraph::from_edges(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(star.degree_one_set(), ids(&[1, 2, 3]));
        assert_eq!(line_star(7).unwrap().degree_one_set(), ids(&[0, 5, 6]));
    }

    #[test]
    fn max_degrees() {
        assert_eq!(line_clique(6).unwrap().max_degree(), 3);
        assert_eq!(line_clique(30).unwrap().max_degree(), 3);
        assert_eq!(ConflictGraph::empty(5).max_degree(), 0);
        assert_eq!(complete(5).max_degree(), 4);
    }

    #[test]
    fn hop_conversion() {
        assert_eq!(hops_conflict_to_interference(0), 1);
        assert_eq!(hops_conflict_to_interference(1), 3);
        assert_eq!(hops_conflict_to_interference(5), 11);
    }

    #[test]
    fn rejects_self_loops_and_bad_ids() {
        assert!(ConflictGraph::from_edges(3, [(1, 1)]).is_err());
        assert!(ConflictGraph::from_edges(3, [(0, 3)]).is_err());
        let g = ConflictGraph::from_edges(3, [(0, 1), (1, 0), (0, 1)]).unwrap();
        assert_eq!(g.edge_count(), 1);
    }
}
