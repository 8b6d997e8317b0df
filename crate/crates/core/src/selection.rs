//! Selection: pruning the temporary clique graph into the consolidated graph.
//!
//! The aggressive rule walks orders `r = 0..rho-1` and drops a vertex of
//! order `r` when every member appears at least twice among the vertices of
//! each higher order `s > r` (once is enough for a member of degree one).
//! Vertices that contain a degree-one user are never dropped. Counts always
//! come from the unpruned temporary graph; a stage only reads orders above
//! its own, which no earlier stage touches.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::cliques::{self, CliqueVertex, ConsolidatedGraph};
use crate::error::{invalid, Error, Result};
use crate::graph::{ConflictGraph, UserId};

/// A consolidated graph and, per user, the vertices that represent it.
#[derive(Clone, Debug)]
pub struct SelectionResult {
    pub consolidated: ConsolidatedGraph,
    pub representation: BTreeMap<UserId, Vec<usize>>,
}

impl SelectionResult {
    fn new(consolidated: ConsolidatedGraph, users: impl IntoIterator<Item = UserId>) -> Self {
        let mut representation: BTreeMap<UserId, Vec<usize>> =
            users.into_iter().map(|u| (u, Vec::new())).collect();
        for (i, v) in consolidated.vertices().iter().enumerate() {
            for m in &v.members {
                if let Some(list) = representation.get_mut(m) {
                    list.push(i);
                }
            }
        }
        SelectionResult { consolidated, representation }
    }

    /// `a(v)`: number of vertices representing `u`.
    pub fn appearances(&self, u: UserId) -> usize {
        self.representation.get(&u).map_or(0, Vec::len)
    }

    pub fn min_appearances(&self) -> usize {
        self.representation.values().map(Vec::len).min().unwrap_or(0)
    }

    pub fn to_json(&self) -> SelectionJson {
        SelectionJson {
            rho: self.consolidated.rho(),
            vertices: self
                .consolidated
                .vertices()
                .iter()
                .map(|v| VertexJson {
                    order: v.order,
                    members: v.members.iter().map(|m| m.label()).collect(),
                })
                .collect(),
            edges: self.consolidated.edges().collect(),
        }
    }
}

/// Serialized selection: vertices as sorted 1-based member lists, edges as
/// vertex index pairs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelectionJson {
    pub rho: usize,
    pub vertices: Vec<VertexJson>,
    pub edges: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VertexJson {
    pub order: usize,
    pub members: Vec<usize>,
}

/// `A_u(s)`: number of order-`s` vertices containing user `u`.
#[derive(Clone, Debug, Default)]
pub struct AppearanceCount {
    counts: HashMap<(UserId, usize), usize>,
}

impl AppearanceCount {
    pub fn from_vertices<'a>(vertices: impl IntoIterator<Item = &'a CliqueVertex>) -> Self {
        let mut counts = HashMap::new();
        for v in vertices {
            for &m in &v.members {
                *counts.entry((m, v.order)).or_insert(0) += 1;
            }
        }
        AppearanceCount { counts }
    }

    pub fn get(&self, u: UserId, order: usize) -> usize {
        self.counts.get(&(u, order)).copied().unwrap_or(0)
    }
}

fn aggressive_keep(
    temp: &ConsolidatedGraph,
    rho: usize,
    is_degree_one: impl Fn(UserId) -> bool,
) -> Vec<bool> {
    let counts = AppearanceCount::from_vertices(temp.vertices());
    temp.vertices()
        .iter()
        .map(|w| {
            if w.order >= rho || w.members.iter().any(|&u| is_degree_one(u)) {
                return true;
            }
            let redundant = w.members.iter().all(|&u| {
                let need = if is_degree_one(u) { 1 } else { 2 };
                (w.order + 1..=rho).all(|s| counts.get(u, s) >= need)
            });
            !redundant
        })
        .collect()
}

fn check_rho(temp: &ConsolidatedGraph, g: &ConflictGraph, rho: usize) -> Result<()> {
    if temp.rho() != rho {
        return Err(invalid(format!(
            "temporary graph was built for rho = {}, selection asked for rho = {rho}",
            temp.rho()
        )));
    }
    if temp.n_users() != g.n() {
        return Err(invalid("temporary graph belongs to a different conflict graph"));
    }
    Ok(())
}

/// Aggressive selection with a full view of the graph.
pub fn aggressive_centralized(
    temp: &ConsolidatedGraph,
    g: &ConflictGraph,
    rho: usize,
) -> Result<SelectionResult> {
    check_rho(temp, g, rho)?;
    let keep = aggressive_keep(temp, rho, |u| g.degree(u) == 1);
    Ok(SelectionResult::new(temp.retain(&keep), g.users()))
}

/// Aggressive selection as run by user `v` with `3 rho + 1` hops of
/// connectivity.
pub fn aggressive_distributed(g: &ConflictGraph, v: UserId, rho: usize) -> Result<SelectionResult> {
    aggressive_distributed_with_tau(g, v, rho, 3 * rho + 1)
}

/// Aggressive selection from a `tau`-hop view; below `3 rho + 1` the result
/// may disagree with the centralized graph.
pub fn aggressive_distributed_with_tau(
    g: &ConflictGraph,
    v: UserId,
    rho: usize,
    tau: usize,
) -> Result<SelectionResult> {
    let view = g.ball(v, tau)?;
    let degree_one: BTreeSet<UserId> = view.degree_one_set().into_iter().collect();
    let temp = cliques::local_temp_graph(g, v, rho, tau)?;
    let keep = aggressive_keep(&temp, rho, |u| degree_one.contains(&u));
    Ok(SelectionResult::new(temp.retain(&keep), view.id_map.iter().copied()))
}

/// Conservative selection.
///
/// Candidates of order one and above are visited by descending order,
/// descending size, then ascending members. A candidate is accepted when
/// none of its users is represented yet and its degree, in the graph of
/// accepted vertices plus every other user as a singleton, does not exceed
/// the smallest conflict-graph degree among its users. Users never covered
/// stay singletons. Merging only ever lowers degrees, so both guarantees
/// (one vertex per user, no degree above the user's own) hold at the end.
pub fn conservative_select(
    temp: &ConsolidatedGraph,
    g: &ConflictGraph,
    rho: usize,
) -> Result<SelectionResult> {
    check_rho(temp, g, rho)?;
    let mut candidates: Vec<&CliqueVertex> =
        temp.vertices().iter().filter(|w| w.order >= 1).collect();
    candidates.sort_by(|a, b| {
        b.order
            .cmp(&a.order)
            .then(b.members.len().cmp(&a.members.len()))
            .then_with(|| a.members.cmp(&b.members))
    });

    let mut group_of: Vec<Option<usize>> = vec![None; g.n()];
    let mut accepted: Vec<CliqueVertex> = Vec::new();
    for w in candidates {
        if w.members.iter().any(|m| group_of[m.0].is_some()) {
            continue;
        }
        let mut groups = BTreeSet::new();
        let mut singles = BTreeSet::new();
        for &m in &w.members {
            for &x in g.adj(m) {
                if w.contains(x) {
                    continue;
                }
                match group_of[x.0] {
                    Some(gid) => {
                        groups.insert(gid);
                    }
                    None => {
                        singles.insert(x);
                    }
                }
            }
        }
        let degree = groups.len() + singles.len();
        let bound = w.members.iter().map(|&m| g.degree(m)).min().unwrap_or(0);
        if degree <= bound {
            for &m in &w.members {
                group_of[m.0] = Some(accepted.len());
            }
            accepted.push(w.clone());
        }
    }
    let mut vertices = accepted;
    vertices.extend(
        g.users()
            .filter(|u| group_of[u.0].is_none())
            .map(CliqueVertex::singleton),
    );
    vertices.sort();
    let consolidated = cliques::build_temp_graph_for(g, vertices, rho)?;
    Ok(SelectionResult::new(consolidated, g.users()))
}

/// First disagreement between a local and the centralized consolidated graph.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Divergence {
    /// User whose view disagrees (1-based in JSON through `Display`).
    pub user: UserId,
    pub vertex: Vec<UserId>,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConsistencyReport {
    pub rho: usize,
    pub tau: usize,
    pub views_checked: usize,
    pub vertices_checked: usize,
    pub divergence: Option<Divergence>,
}

impl ConsistencyReport {
    pub fn passed(&self) -> bool {
        self.divergence.is_none()
    }
}

/// Compare every user's aggressive view (with `3 rho + 1` hops) against the
/// centralized aggressive graph on the vertices containing that user.
pub fn check_view_consistency(g: &ConflictGraph, rho: usize) -> Result<ConsistencyReport> {
    check_view_consistency_with_tau(g, rho, 3 * rho + 1)
}

pub fn check_view_consistency_with_tau(
    g: &ConflictGraph,
    rho: usize,
    tau: usize,
) -> Result<ConsistencyReport> {
    let temp = cliques::temp_graph(g, rho)?;
    let central = aggressive_centralized(&temp, g, rho)?;
    let users: Vec<UserId> = g.users().collect();
    let per_user = crate::par_map(&users, |&v| -> Result<(usize, Option<Divergence>)> {
        let local = aggressive_distributed_with_tau(g, v, rho, tau)?;
        Ok(compare_view(&local.consolidated, &central.consolidated, v))
    });
    let mut report = ConsistencyReport {
        rho,
        tau,
        views_checked: 0,
        vertices_checked: 0,
        divergence: None,
    };
    for outcome in per_user {
        let (checked, divergence) = outcome?;
        report.views_checked += 1;
        report.vertices_checked += checked;
        if report.divergence.is_none() {
            report.divergence = divergence;
        }
    }
    Ok(report)
}

fn neighborhood(cg: &ConsolidatedGraph, i: usize) -> BTreeSet<&[UserId]> {
    cg.neighbors(i)
        .iter()
        .map(|&j| cg.vertex(j).members.as_slice())
        .collect()
}

fn neighborhood_edges(cg: &ConsolidatedGraph, i: usize) -> BTreeSet<(&[UserId], &[UserId])> {
    let mut closed: Vec<usize> = cg.neighbors(i).to_vec();
    closed.push(i);
    let mut out = BTreeSet::new();
    for &a in &closed {
        for &b in &closed {
            let (ma, mb) = (&cg.vertex(a).members, &cg.vertex(b).members);
            if ma < mb && cg.is_adjacent(a, b) {
                out.insert((ma.as_slice(), mb.as_slice()));
            }
        }
    }
    out
}

fn compare_view(
    local: &ConsolidatedGraph,
    central: &ConsolidatedGraph,
    v: UserId,
) -> (usize, Option<Divergence>) {
    let mut checked = 0;
    for i in local.containing(v) {
        checked += 1;
        let members = &local.vertex(i).members;
        let diverge = |detail: String| Divergence {
            user: v,
            vertex: members.clone(),
            detail,
        };
        let Some(c) = central.find(members) else {
            return (checked, Some(diverge("vertex kept locally but removed centrally".into())));
        };
        let (ln, cn) = (neighborhood(local, i), neighborhood(central, c));
        if ln != cn {
            let only_local: Vec<String> = ln.difference(&cn).map(|m| label(m)).collect();
            let only_central: Vec<String> = cn.difference(&ln).map(|m| label(m)).collect();
            return (
                checked,
                Some(diverge(format!(
                    "neighborhoods differ: only local {only_local:?}, only central {only_central:?}"
                ))),
            );
        }
        if neighborhood_edges(local, i) != neighborhood_edges(central, c) {
            return (checked, Some(diverge("edges among neighbors differ".into())));
        }
    }
    for c in central.containing(v) {
        if local.find(&central.vertex(c).members).is_none() {
            let members = central.vertex(c).members.clone();
            return (
                checked,
                Some(Divergence {
                    user: v,
                    vertex: members,
                    detail: "vertex kept centrally but removed locally".into(),
                }),
            );
        }
    }
    (checked, None)
}

fn label(members: &[UserId]) -> String {
    CliqueVertex {
        order: 0,
        members: members.to_vec(),
    }
    .label()
}

/// Structural checks on a selection result.
pub fn verify_aggressive(sel: &SelectionResult, g: &ConflictGraph) -> Result<()> {
    for (&u, list) in &sel.representation {
        if list.is_empty() {
            return Err(Error::Invariant(format!("user {u} is not represented")));
        }
        if g.degree(u) == 1 && sel.consolidated.find(&[u]).is_none() {
            return Err(Error::Invariant(format!(
                "singleton of degree-one user {u} was removed"
            )));
        }
    }
    Ok(())
}

pub fn verify_conservative(sel: &SelectionResult, g: &ConflictGraph) -> Result<()> {
    for (&u, list) in &sel.representation {
        if list.len() != 1 {
            return Err(Error::Invariant(format!(
                "user {u} is represented {} times",
                list.len()
            )));
        }
        let deg = sel.consolidated.degree(list[0]);
        if deg > g.degree(u) {
            return Err(Error::Invariant(format!(
                "vertex {} has degree {deg} above user {u}'s degree {}",
                sel.consolidated.vertex(list[0]).label(),
                g.degree(u)
            )));
        }
    }
    Ok(())
}
