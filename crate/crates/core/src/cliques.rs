//! Identification of diameter-bounded cliques and the temporary clique graph.
//!
//! An r-clique is a user set `S` whose induced subgraph `G[S]` has diameter
//! exactly `r` and which has no proper superset of diameter `r`. Order 0 is
//! every singleton, order 1 the maximal cliques of two or more users. Higher
//! orders are found by enumerating connected sets whose members are pairwise
//! within `rho` hops in `G` (induced distances never undercut `G` distances,
//! so nothing else can reach diameter `rho`).

use std::collections::{BTreeMap, HashMap};

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::graph::{ConflictGraph, Distance, UserId};

/// Default cap on the number of connected candidate sets visited when
/// enumerating orders two and above.
pub const DEFAULT_BUDGET: usize = 4_000_000;

/// A vertex of a clique graph: the users it stands for and its clique order.
///
/// The derived ordering sorts by order, then members lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct CliqueVertex {
    pub order: usize,
    pub members: Vec<UserId>,
}

impl CliqueVertex {
    pub fn new(order: usize, mut members: Vec<UserId>) -> Self {
        members.sort_unstable();
        members.dedup();
        CliqueVertex { order, members }
    }

    pub fn singleton(u: UserId) -> Self {
        CliqueVertex { order: 0, members: vec![u] }
    }

    pub fn min_member(&self) -> UserId {
        self.members[0]
    }

    pub fn contains(&self, u: UserId) -> bool {
        self.members.binary_search(&u).is_ok()
    }

    /// `{a,b,c}` with 1-based labels.
    pub fn label(&self) -> String {
        let inner: Vec<String> = self.members.iter().map(ToString::to_string).collect();
        format!("{{{}}}", inner.join(","))
    }
}

/// Diameter of the subgraph induced by `members`, with distances measured
/// inside that subgraph.
pub fn induced_diameter(g: &ConflictGraph, members: &[UserId]) -> Result<Distance> {
    if members.is_empty() {
        return Err(invalid("induced diameter of an empty set"));
    }
    let mut sorted = members.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    for &m in &sorted {
        g.check(m)?;
    }
    Ok(g.induced(&sorted).diameter())
}

/// All r-cliques for `r = 0..=rho`, sorted by (order, members).
pub fn enumerate_r_cliques(g: &ConflictGraph, rho: usize) -> Result<Vec<CliqueVertex>> {
    enumerate_r_cliques_with_budget(g, rho, DEFAULT_BUDGET)
}

pub fn enumerate_r_cliques_with_budget(
    g: &ConflictGraph,
    rho: usize,
    budget: usize,
) -> Result<Vec<CliqueVertex>> {
    let mut out: Vec<CliqueVertex> = g.users().map(CliqueVertex::singleton).collect();
    if rho >= 1 {
        let mut cliques = Vec::new();
        maximal_cliques(g, &mut cliques);
        out.extend(
            cliques
                .into_iter()
                .filter(|c| c.len() >= 2)
                .map(|c| CliqueVertex::new(1, c)),
        );
    }
    if rho >= 2 {
        let mut buckets = enumerate_wide(g, rho, budget)?;
        for (order, sets) in buckets.iter_mut() {
            let kept = keep_maximal(sets, g.n());
            out.extend(kept.into_iter().map(|s| CliqueVertex::new(*order, s)));
        }
    }
    out.sort();
    Ok(out)
}

fn to_set(n: usize, members: &[UserId]) -> FixedBitSet {
    let mut s = FixedBitSet::with_capacity(n);
    for m in members {
        s.insert(m.0);
    }
    s
}

/// Bron-Kerbosch with pivoting over adjacency bitsets.
fn maximal_cliques(g: &ConflictGraph, out: &mut Vec<Vec<UserId>>) {
    let n = g.n();
    let mut p = FixedBitSet::with_capacity(n);
    p.insert_range(..);
    let x = FixedBitSet::with_capacity(n);
    let mut r = Vec::new();
    bron_kerbosch(g, &mut r, p, x, out);
}

fn bron_kerbosch(
    g: &ConflictGraph,
    r: &mut Vec<UserId>,
    mut p: FixedBitSet,
    mut x: FixedBitSet,
    out: &mut Vec<Vec<UserId>>,
) {
    if p.is_clear() {
        if x.is_clear() {
            let mut c = r.clone();
            c.sort_unstable();
            out.push(c);
        }
        return;
    }
    // pivot: the vertex of P ∪ X with the most neighbors in P
    let pivot = p
        .ones()
        .chain(x.ones())
        .max_by_key(|&u| g.adjacency_row(UserId(u)).intersection(&p).count())
        .expect("P is non-empty");
    let mut todo = p.clone();
    todo.difference_with(g.adjacency_row(UserId(pivot)));
    for v in todo.ones() {
        let row = g.adjacency_row(UserId(v));
        let mut next_p = p.clone();
        next_p.intersect_with(row);
        let mut next_x = x.clone();
        next_x.intersect_with(row);
        r.push(UserId(v));
        bron_kerbosch(g, r, next_p, next_x, out);
        r.pop();
        p.set(v, false);
        x.insert(v);
    }
}

struct Wide<'a> {
    g: &'a ConflictGraph,
    rho: usize,
    /// `near[u]`: users within `rho` hops of `u` in `G`.
    near: Vec<FixedBitSet>,
    buckets: BTreeMap<usize, Vec<Vec<UserId>>>,
    visited: usize,
    budget: usize,
}

/// Sets with induced diameter in `2..=rho`, bucketed by diameter.
fn enumerate_wide(
    g: &ConflictGraph,
    rho: usize,
    budget: usize,
) -> Result<BTreeMap<usize, Vec<Vec<UserId>>>> {
    let n = g.n();
    let near = g
        .users()
        .map(|u| {
            let mut s = FixedBitSet::with_capacity(n);
            for (w, d) in g.bfs(u, rho).into_iter().enumerate() {
                if d.within(rho) {
                    s.insert(w);
                }
            }
            s
        })
        .collect();
    let mut wide = Wide {
        g,
        rho,
        near,
        buckets: BTreeMap::new(),
        visited: 0,
        budget,
    };
    for root in g.users() {
        let mut members = FixedBitSet::with_capacity(n);
        members.insert(root.0);
        let mut closed = g.adjacency_row(root).clone();
        closed.insert(root.0);
        let allowed = wide.near[root.0].clone();
        let ext: Vec<UserId> = g
            .adj(root)
            .iter()
            .copied()
            .filter(|w| w.0 > root.0 && allowed.contains(w.0))
            .collect();
        wide.extend(root, &mut vec![root], &members, &closed, ext, &allowed)?;
    }
    Ok(wide.buckets)
}

impl Wide<'_> {
    /// Connected-set enumeration in the ESU style: every connected set whose
    /// smallest user is `root` is reached exactly once.
    fn extend(
        &mut self,
        root: UserId,
        set: &mut Vec<UserId>,
        members: &FixedBitSet,
        closed: &FixedBitSet,
        mut ext: Vec<UserId>,
        allowed: &FixedBitSet,
    ) -> Result<()> {
        self.visited += 1;
        if self.visited > self.budget {
            return Err(Error::BudgetExceeded(self.budget));
        }
        if set.len() >= 3 {
            if let Distance::Hops(d) = set_diameter(self.g, members) {
                if (2..=self.rho).contains(&d) {
                    let mut s = set.clone();
                    s.sort_unstable();
                    self.buckets.entry(d).or_default().push(s);
                }
            }
        }
        while let Some(w) = ext.pop() {
            let mut next_allowed = allowed.clone();
            next_allowed.intersect_with(&self.near[w.0]);
            let mut next_ext: Vec<UserId> = ext
                .iter()
                .copied()
                .filter(|u| next_allowed.contains(u.0))
                .collect();
            next_ext.extend(self.g.adj(w).iter().copied().filter(|u| {
                u.0 > root.0 && !closed.contains(u.0) && next_allowed.contains(u.0)
            }));
            let mut next_members = members.clone();
            next_members.insert(w.0);
            let mut next_closed = closed.clone();
            next_closed.union_with(self.g.adjacency_row(w));
            next_closed.insert(w.0);
            set.push(w);
            self.extend(root, set, &next_members, &next_closed, next_ext, &next_allowed)?;
            set.pop();
        }
        Ok(())
    }
}

/// Diameter of `G[members]` by breadth-first sweeps over bitsets.
fn set_diameter(g: &ConflictGraph, members: &FixedBitSet) -> Distance {
    let total = members.count_ones(..);
    let mut best = 0;
    for src in members.ones() {
        let mut seen = FixedBitSet::with_capacity(members.len());
        seen.insert(src);
        let mut frontier = seen.clone();
        let mut reached = 1;
        let mut depth = 0;
        while reached < total {
            let mut next = FixedBitSet::with_capacity(members.len());
            for u in frontier.ones() {
                next.union_with(g.adjacency_row(UserId(u)));
            }
            next.intersect_with(members);
            next.difference_with(&seen);
            if next.is_clear() {
                return Distance::Unreachable;
            }
            depth += 1;
            reached += next.count_ones(..);
            seen.union_with(&next);
            frontier = next;
        }
        best = best.max(depth);
    }
    Distance::Hops(best)
}

/// Drop every set strictly contained in another set of the same bucket.
fn keep_maximal(sets: &mut Vec<Vec<UserId>>, n: usize) -> Vec<Vec<UserId>> {
    sets.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    sets.dedup();
    let bits: Vec<FixedBitSet> = sets.iter().map(|s| to_set(n, s)).collect();
    let mut by_user: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, s) in sets.iter().enumerate() {
        for m in s {
            by_user[m.0].push(i);
        }
    }
    let mut kept = Vec::new();
    for (i, s) in sets.iter().enumerate() {
        let rarest = s
            .iter()
            .min_by_key(|m| by_user[m.0].len())
            .expect("sets are non-empty");
        let dominated = by_user[rarest.0]
            .iter()
            .any(|&j| sets[j].len() > s.len() && bits[i].is_subset(&bits[j]));
        if !dominated {
            kept.push(s.clone());
        }
    }
    kept
}

/// Graph whose vertices are clique vertices over a conflict graph.
///
/// Two vertices are adjacent when they share a user or when a user of one is
/// adjacent in the conflict graph to a user of the other. Used for the
/// temporary graph and for the consolidated graph after selection.
#[derive(Clone, Debug)]
pub struct ConsolidatedGraph {
    n_users: usize,
    rho: usize,
    vertices: Vec<CliqueVertex>,
    adj: Vec<Vec<usize>>,
    index: HashMap<Vec<UserId>, usize>,
}

impl ConsolidatedGraph {
    pub fn n_users(&self) -> usize {
        self.n_users
    }

    /// Largest clique order the graph was built for.
    pub fn rho(&self) -> usize {
        self.rho
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[CliqueVertex] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &CliqueVertex {
        &self.vertices[i]
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adj[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adj[i].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn is_adjacent(&self, i: usize, j: usize) -> bool {
        self.adj[i].binary_search(&j).is_ok()
    }

    /// Index of the vertex with exactly these (sorted) members.
    pub fn find(&self, members: &[UserId]) -> Option<usize> {
        self.index.get(members).copied()
    }

    /// Indices of vertices containing `u`, ascending.
    pub fn containing(&self, u: UserId) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.vertices[i].contains(u)).collect()
    }

    /// Edges `(i, j)` with `i < j`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(i, list)| list.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
    }

    /// Keep the vertices flagged in `keep`; the edge rule only looks at the
    /// two endpoints, so surviving adjacency is inherited unchanged.
    pub fn retain(&self, keep: &[bool]) -> ConsolidatedGraph {
        let mut remap = vec![usize::MAX; self.len()];
        let mut vertices = Vec::new();
        for (i, v) in self.vertices.iter().enumerate() {
            if keep[i] {
                remap[i] = vertices.len();
                vertices.push(v.clone());
            }
        }
        let adj = (0..self.len())
            .filter(|&i| keep[i])
            .map(|i| {
                self.adj[i]
                    .iter()
                    .filter(|&&j| keep[j])
                    .map(|&j| remap[j])
                    .collect()
            })
            .collect();
        let index = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.members.clone(), i))
            .collect();
        ConsolidatedGraph {
            n_users: self.n_users,
            rho: self.rho,
            vertices,
            adj,
            index,
        }
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph consolidated {\n");
        for (i, v) in self.vertices.iter().enumerate() {
            s.push_str(&format!("  w{i} [label=\"{}\"];\n", v.label()));
        }
        for (i, j) in self.edges() {
            s.push_str(&format!("  w{i} -- w{j};\n"));
        }
        s.push_str("}\n");
        s
    }
}

/// Build the clique graph over `cliques` with the overlap-or-adjacency edge
/// rule. Vertices are kept in the given order.
pub fn build_temp_graph(g: &ConflictGraph, cliques: Vec<CliqueVertex>) -> Result<ConsolidatedGraph> {
    let n = g.n();
    let mut index = HashMap::with_capacity(cliques.len());
    for (i, c) in cliques.iter().enumerate() {
        if c.members.is_empty() {
            return Err(invalid("clique vertex without members"));
        }
        for &m in &c.members {
            g.check(m)?;
        }
        if index.insert(c.members.clone(), i).is_some() {
            return Err(invalid(format!("duplicate clique vertex {}", c.label())));
        }
    }
    let member_bits: Vec<FixedBitSet> = cliques.iter().map(|c| to_set(n, &c.members)).collect();
    let closed: Vec<FixedBitSet> = cliques
        .iter()
        .zip(&member_bits)
        .map(|(c, bits)| {
            let mut s = bits.clone();
            for &m in &c.members {
                s.union_with(g.adjacency_row(m));
            }
            s
        })
        .collect();
    let mut adj = vec![Vec::new(); cliques.len()];
    for i in 0..cliques.len() {
        for j in i + 1..cliques.len() {
            if !closed[i].is_disjoint(&member_bits[j]) {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    let rho = cliques.iter().map(|c| c.order).max().unwrap_or(0);
    Ok(ConsolidatedGraph {
        n_users: n,
        rho,
        vertices: cliques,
        adj,
        index,
    })
}

/// Like [`build_temp_graph`], tagged with the clique-order bound `rho`.
pub fn build_temp_graph_for(
    g: &ConflictGraph,
    cliques: Vec<CliqueVertex>,
    rho: usize,
) -> Result<ConsolidatedGraph> {
    if let Some(c) = cliques.iter().find(|c| c.order > rho) {
        return Err(invalid(format!("vertex {} has order {} above rho = {rho}", c.label(), c.order)));
    }
    let mut cg = build_temp_graph(g, cliques)?;
    cg.rho = rho;
    Ok(cg)
}

/// Centralized temporary graph: every r-clique of `g` up to `rho`.
pub fn temp_graph(g: &ConflictGraph, rho: usize) -> Result<ConsolidatedGraph> {
    build_temp_graph_for(g, enumerate_r_cliques(g, rho)?, rho)
}

/// Temporary graph as seen by user `v` with `tau` hops of connectivity.
pub fn local_temp_graph(
    g: &ConflictGraph,
    v: UserId,
    rho: usize,
    tau: usize,
) -> Result<ConsolidatedGraph> {
    if tau < rho + 1 {
        return Err(invalid(format!(
            "identification needs at least rho + 1 = {} hops of connectivity, got {tau}",
            rho + 1
        )));
    }
    let view = g.ball(v, tau)?;
    let cliques = enumerate_r_cliques(&view.subgraph, rho)?
        .into_iter()
        .map(|c| CliqueVertex {
            order: c.order,
            members: c.members.iter().map(|&m| view.to_global(m)).collect(),
        })
        .collect();
    build_temp_graph_for(g, cliques, rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::line_clique;

    fn labels(cg: &[CliqueVertex]) -> Vec<String> {
        cg.iter().map(CliqueVertex::label).collect()
    }

    fn set(labels: &[usize]) -> Vec<UserId> {
        labels.iter().map(|&l| UserId::from_label(l).unwrap()).collect()
    }

    #[test]
    fn induced_diameters() {
        let g = line_clique(6).unwrap();
        assert_eq!(induced_diameter(&g, &set(&[2])).unwrap(), Distance::Hops(0));
        assert_eq!(induced_diameter(&g, &set(&[4, 5, 6])).unwrap(), Distance::Hops(1));
        assert_eq!(induced_diameter(&g, &set(&[1, 3])).unwrap(), Distance::Unreachable);
        assert!(induced_diameter(&g, &[]).is_err());
    }

    #[test]
    fn line_clique_one_cliques() {
        let g = line_clique(6).unwrap();
        let got = enumerate_r_cliques(&g, 1).unwrap();
        assert_eq!(
            labels(&got),
            ["{1}", "{2}", "{3}", "{4}", "{5}", "{6}", "{1,2}", "{2,3}", "{3,4}", "{4,5,6}"]
        );
    }

    #[test]
    fn order_zero_is_all_singletons() {
        let g = line_clique(9).unwrap();
        let got = enumerate_r_cliques(&g, 0).unwrap();
        assert_eq!(got.len(), 9);
        assert!(got.iter().all(|c| c.order == 0 && c.members.len() == 1));
    }

    #[test]
    fn line_clique_two_cliques_keep_lower_orders() {
        let g = line_clique(8).unwrap();
        let got = enumerate_r_cliques(&g, 2).unwrap();
        let twos: Vec<String> = got.iter().filter(|c| c.order == 2).map(CliqueVertex::label).collect();
        assert_eq!(twos, ["{1,2,3}", "{2,3,4}", "{3,4,5}", "{4,5,6}", "{5,6,7,8}"]);
        // 1-cliques survive next to the 2-cliques that contain them
        assert!(got.iter().any(|c| c.order == 1 && c.label() == "{1,2}"));
        assert!(got.iter().any(|c| c.order == 1 && c.label() == "{6,7,8}"));
    }

    #[test]
    fn temp_graph_edges() {
        let g = line_clique(6).unwrap();
        let cg = temp_graph(&g, 1).unwrap();
        let w = cg.find(&set(&[1, 2])).unwrap();
        let mut nb: Vec<String> = cg.neighbors(w).iter().map(|&j| cg.vertex(j).label()).collect();
        nb.sort();
        assert_eq!(nb, ["{1}", "{2,3}", "{2}", "{3,4}", "{3}"]);

        let singles = build_temp_graph(&g, g.users().map(CliqueVertex::singleton).collect()).unwrap();
        let edges: Vec<(usize, usize)> = singles.edges().collect();
        let orig: Vec<(usize, usize)> = g.edges().map(|(u, v)| (u.0, v.0)).collect();
        assert_eq!(edges, orig);

        let two = ConflictGraph::from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        let cg = temp_graph(&two, 1).unwrap();
        let a = cg.find(&set(&[1, 2, 3])).unwrap();
        let b = cg.find(&set(&[4, 5, 6])).unwrap();
        assert!(!cg.is_adjacent(a, b));
    }

    #[test]
    fn duplicate_vertices_rejected() {
        let g = line_clique(5).unwrap();
        let dup = vec![CliqueVertex::singleton(UserId(0)), CliqueVertex::singleton(UserId(0))];
        assert!(build_temp_graph(&g, dup).is_err());
    }

    #[test]
    fn local_views_of_line_clique() {
        let g = line_clique(9).unwrap();
        let n1 = local_temp_graph(&g, UserId(0), 1, 2).unwrap();
        assert_eq!(labels(n1.vertices()), ["{1}", "{2}", "{3}", "{1,2}", "{2,3}"]);
        let n2 = local_temp_graph(&g, UserId(1), 1, 2).unwrap();
        assert_eq!(
            labels(n2.vertices()),
            ["{1}", "{2}", "{3}", "{4}", "{1,2}", "{2,3}", "{3,4}"]
        );
        let last = local_temp_graph(&g, UserId(8), 1, 2).unwrap();
        assert!(last.find(&set(&[7, 8, 9])).is_some());
        assert!(last.find(&set(&[8, 9])).is_none());
        assert!(local_temp_graph(&g, UserId(0), 1, 1).is_err());

        let full = local_temp_graph(&g, UserId(4), 2, 20).unwrap();
        let central = temp_graph(&g, 2).unwrap();
        assert_eq!(full.vertices(), central.vertices());
        assert_eq!(full.edges().collect::<Vec<_>>(), central.edges().collect::<Vec<_>>());
    }

    #[test]
    fn budget_is_enforced() {
        let edges = (0..12).flat_map(|i| (i + 1..12).map(move |j| (i, j)));
        let k12 = ConflictGraph::from_edges(12, edges).unwrap();
        assert!(matches!(
            enumerate_r_cliques_with_budget(&k12, 2, 100),
            Err(Error::BudgetExceeded(100))
        ));
    }
}
