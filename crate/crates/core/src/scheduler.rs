//! One-shot local multicoloring over a clique graph.
//!
//! Every user draws `k` values uniformly from `1..=k * nbar^4`. A clique
//! vertex borrows the vector of its smallest member, and acquires slot `i`
//! when its value at `i` beats the value of every neighbor. Equal values are
//! settled by comparing member lists (smaller list wins), which two adjacent
//! vertices sharing their smallest member can always evaluate locally.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cliques::{CliqueVertex, ConsolidatedGraph};
use crate::error::{invalid, Result};
use crate::graph::UserId;
use crate::rng;

/// Default upper bound on the number of slots.
pub const DEFAULT_K_CAP: usize = 20_000;

/// `ceil(6 (nbar + 1) ln(nbar) / eps^2)`.
pub fn kuhn_k(nbar: usize, eps: f64) -> Result<usize> {
    if nbar < 2 {
        return Err(invalid(format!("nbar must be at least 2, got {nbar}")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(invalid(format!("epsilon must lie in (0, 1), got {eps}")));
    }
    let nb = nbar as f64;
    Ok((6.0 * (nb + 1.0) * nb.ln() / (eps * eps)).ceil() as usize)
}

/// [`kuhn_k`] clamped to `cap`.
pub fn kuhn_k_capped(nbar: usize, eps: f64, cap: usize) -> Result<usize> {
    if cap == 0 {
        return Err(invalid("slot cap must be positive"));
    }
    Ok(kuhn_k(nbar, eps)?.min(cap))
}

/// Slots a vertex of degree `degree` acquires with high probability.
pub fn guaranteed_slots(k: usize, eps: f64, degree: usize) -> usize {
    ((1.0 - eps) * k as f64 / (degree as f64 + 1.0)).floor() as usize
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColorVector(pub Vec<u128>);

impl ColorVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Largest value a slot entry can take, `k * nbar^4`.
pub fn value_range(k: usize, nbar: usize) -> Result<u128> {
    (nbar as u128)
        .checked_pow(4)
        .and_then(|p| p.checked_mul(k as u128))
        .ok_or_else(|| invalid(format!("k * nbar^4 overflows 128 bits (k = {k}, nbar = {nbar})")))
}

/// Vector of a single user, from its own substream of `seed`.
pub fn draw_vector(user: UserId, k: usize, nbar: usize, seed: u64) -> Result<ColorVector> {
    let top = value_range(k, nbar)?;
    let mut rng = rng::stream(seed, user.0 as u64);
    Ok(ColorVector((0..k).map(|_| rng.gen_range(1..=top)).collect()))
}

/// Vectors for users `0..n_users`.
pub fn draw_vectors(n_users: usize, k: usize, nbar: usize, seed: u64) -> Result<Vec<ColorVector>> {
    if k == 0 {
        return Err(invalid("k must be positive"));
    }
    if n_users > nbar {
        return Err(invalid(format!(
            "nbar = {nbar} underestimates the {n_users} users"
        )));
    }
    (0..n_users)
        .map(|u| draw_vector(UserId(u), k, nbar, seed))
        .collect()
}

/// How a clique vertex obtains its random vector.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VectorRule {
    /// The vector of the smallest member. Adjacent vertices that share their
    /// smallest member get identical vectors, and one of them loses every slot.
    #[default]
    MinMember,
    /// The smallest member draws a separate vector for every vertex it leads,
    /// keyed by the member list; singletons keep the user's own vector.
    PerVertex,
}

/// Vector of one vertex under [`VectorRule::PerVertex`].
pub fn draw_vertex_vector(v: &CliqueVertex, k: usize, nbar: usize, seed: u64) -> Result<ColorVector> {
    if v.members.len() == 1 {
        return draw_vector(v.members[0], k, nbar, seed);
    }
    let mut tags = vec![rng::tag::CLIQUE];
    tags.extend(v.members.iter().map(|m| m.0 as u64));
    draw_vector(v.min_member(), k, nbar, rng::derive_seed(seed, &tags))
}

/// Each vertex takes the vector of its smallest member.
pub fn assign_clique_vectors<'a>(
    cg: &ConsolidatedGraph,
    vectors: &'a [ColorVector],
) -> Result<Vec<&'a ColorVector>> {
    cg.vertices()
        .iter()
        .map(|v| {
            let m = v.min_member();
            vectors
                .get(m.0)
                .ok_or_else(|| invalid(format!("no vector for user {m}")))
        })
        .collect()
}

/// Acquired slots per vertex (0-based slot indices, ascending).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColorAssignment {
    pub k: usize,
    pub acquired: Vec<Vec<u32>>,
}

impl ColorAssignment {
    pub fn count(&self, vertex: usize) -> usize {
        self.acquired[vertex].len()
    }

    pub fn holds(&self, vertex: usize, slot: u32) -> bool {
        self.acquired[vertex].binary_search(&slot).is_ok()
    }

    /// No slot is held by both endpoints of an edge.
    pub fn is_proper(&self, cg: &ConsolidatedGraph) -> bool {
        let mut by_slot: Vec<Vec<usize>> = vec![Vec::new(); self.k];
        for (w, slots) in self.acquired.iter().enumerate() {
            for &s in slots {
                by_slot[s as usize].push(w);
            }
        }
        by_slot.iter().all(|holders| {
            holders
                .iter()
                .enumerate()
                .all(|(a, &x)| holders[a + 1..].iter().all(|&y| !cg.is_adjacent(x, y)))
        })
    }

    /// `vertex,k,acquired,fraction` rows with `{a,b}` vertex labels.
    pub fn to_csv(&self, cg: &ConsolidatedGraph) -> String {
        let mut out = String::from("vertex,k,acquired,fraction\n");
        for (i, v) in cg.vertices().iter().enumerate() {
            let c = self.count(i);
            out.push_str(&format!(
                "\"{}\",{},{},{}\n",
                v.label(),
                self.k,
                c,
                c as f64 / self.k as f64
            ));
        }
        out
    }
}

/// Slots won by a vertex against its neighbors; only the vertex's own data
/// and its 1-hop neighborhood are consulted.
pub fn acquire(
    own: (&ColorVector, &CliqueVertex),
    neighbors: &[(&ColorVector, &CliqueVertex)],
) -> Vec<u32> {
    let (lv, lw) = own;
    (0..lv.len())
        .filter(|&i| {
            let mine = lv.0[i];
            neighbors.iter().all(|(nv, nw)| {
                let theirs = nv.0[i];
                mine < theirs || (mine == theirs && lw.members < nw.members)
            })
        })
        .map(|i| i as u32)
        .collect()
}

/// Multicolor `cg` given one vector per vertex.
pub fn multicolor(cg: &ConsolidatedGraph, vertex_vectors: &[&ColorVector]) -> Result<ColorAssignment> {
    if vertex_vectors.len() != cg.len() {
        return Err(invalid("one vector per vertex is required"));
    }
    let k = vertex_vectors.first().map_or(0, |v| v.len());
    if vertex_vectors.iter().any(|v| v.len() != k) {
        return Err(invalid("vectors differ in length"));
    }
    let indices: Vec<usize> = (0..cg.len()).collect();
    let acquired = crate::par_map(&indices, |&w| {
        let neighbors: Vec<_> = cg
            .neighbors(w)
            .iter()
            .map(|&z| (vertex_vectors[z], cg.vertex(z)))
            .collect();
        acquire((vertex_vectors[w], cg.vertex(w)), &neighbors)
    });
    Ok(ColorAssignment { k, acquired })
}

/// Draw vectors and multicolor `cg` in one step.
pub fn schedule(
    cg: &ConsolidatedGraph,
    k: usize,
    nbar: usize,
    seed: u64,
) -> Result<ColorAssignment> {
    schedule_with(cg, k, nbar, seed, VectorRule::MinMember)
}

/// [`schedule`] under an explicit vector rule.
pub fn schedule_with(
    cg: &ConsolidatedGraph,
    k: usize,
    nbar: usize,
    seed: u64,
    rule: VectorRule,
) -> Result<ColorAssignment> {
    let vectors = draw_vectors(cg.n_users(), k, nbar, seed)?;
    match rule {
        VectorRule::MinMember => multicolor(cg, &assign_clique_vectors(cg, &vectors)?),
        VectorRule::PerVertex => {
            let own: Vec<ColorVector> = cg
                .vertices()
                .iter()
                .map(|v| draw_vertex_vector(v, k, nbar, seed))
                .collect::<Result<_>>()?;
            multicolor(cg, &own.iter().collect::<Vec<_>>())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cliques::build_temp_graph;
    use crate::graph::ConflictGraph;

    fn singletons(g: &ConflictGraph) -> ConsolidatedGraph {
        build_temp_graph(g, g.users().map(CliqueVertex::singleton).collect()).unwrap()
    }

    #[test]
    fn slot_counts() {
        assert_eq!(kuhn_k(50, 0.3).unwrap(), 13301);
        assert_eq!(kuhn_k(2, 0.99).unwrap(), 13);
        let (a, b) = (kuhn_k(50, 0.3).unwrap(), kuhn_k(50, 0.15).unwrap());
        assert!(b + 4 >= 4 * a);
        assert!(kuhn_k(1, 0.3).is_err());
        assert!(kuhn_k(10, 1.0).is_err());
        assert!(kuhn_k(10, 0.0).is_err());
        assert_eq!(kuhn_k_capped(50, 0.1, DEFAULT_K_CAP).unwrap(), DEFAULT_K_CAP);
    }

    #[test]
    fn vectors_are_per_user_and_in_range() {
        let a = draw_vectors(5, 64, 10, 3).unwrap();
        let b = draw_vector(UserId(3), 64, 10, 3).unwrap();
        assert_eq!(a[3], b);
        assert_ne!(a[2], a[3]);
        let top = value_range(64, 10).unwrap();
        assert!(a.iter().flat_map(|v| &v.0).all(|&x| (1..=top).contains(&x)));
        assert!(draw_vectors(11, 8, 10, 0).is_err());
        assert!(value_range(usize::MAX, usize::MAX).is_err());
    }

    #[test]
    fn collision_rate_matches_range() {
        // tiny range so collisions are frequent enough to count
        let (k, nbar) = (4000, 2);
        let x = draw_vector(UserId(0), k, nbar, 9).unwrap();
        let y = draw_vector(UserId(1), k, nbar, 9).unwrap();
        let hits = x.0.iter().zip(&y.0).filter(|(a, b)| a == b).count();
        let expected = k as f64 / value_range(k, nbar).unwrap() as f64;
        // 1/16 of one draw per slot: mean 0.0625 collisions over 4000 slots
        assert!((hits as f64) <= expected * 4000.0 + 6.0);
    }

    #[test]
    fn isolated_vertex_takes_everything() {
        let g = ConflictGraph::empty(3);
        let cg = singletons(&g);
        let a = schedule(&cg, 50, 3, 1).unwrap();
        assert!((0..3).all(|w| a.count(w) == 50));
        assert!(a.is_proper(&cg));
    }

    #[test]
    fn adjacent_pair_splits_slots() {
        let g = ConflictGraph::from_edges(2, [(0, 1)]).unwrap();
        let cg = singletons(&g);
        let k = 10_000;
        let a = schedule(&cg, k, 2, 5).unwrap();
        assert_eq!(a.count(0) + a.count(1), k);
        let sigma = (k as f64 * 0.25).sqrt();
        assert!((a.count(0) as f64 - k as f64 / 2.0).abs() < 3.0 * sigma);
    }

    #[test]
    fn shared_minimum_members_are_tie_broken() {
        // {1,2} and {1,3} share user 1 and therefore its vector
        let g = ConflictGraph::from_edges(3, [(0, 1), (0, 2)]).unwrap();
        let cg = build_temp_graph(
            &g,
            vec![
                CliqueVertex::new(1, vec![UserId(0), UserId(1)]),
                CliqueVertex::new(1, vec![UserId(0), UserId(2)]),
            ],
        )
        .unwrap();
        let vectors = draw_vectors(3, 100, 3, 2).unwrap();
        let per_vertex = assign_clique_vectors(&cg, &vectors).unwrap();
        assert_eq!(per_vertex[0], per_vertex[1]);
        let a = multicolor(&cg, &per_vertex).unwrap();
        assert!(a.is_proper(&cg));
        assert_eq!(a.count(0), 100);
        assert_eq!(a.count(1), 0);
    }

    #[test]
    fn per_vertex_rule_separates_shared_minimum() {
        let g = ConflictGraph::from_edges(3, [(0, 1), (0, 2)]).unwrap();
        let cg = build_temp_graph(
            &g,
            vec![
                CliqueVertex::singleton(UserId(0)),
                CliqueVertex::new(1, vec![UserId(0), UserId(1)]),
                CliqueVertex::new(1, vec![UserId(0), UserId(2)]),
            ],
        )
        .unwrap();
        let k = 3000;
        let a = schedule_with(&cg, k, 3, 2, VectorRule::PerVertex).unwrap();
        assert!(a.is_proper(&cg));
        assert!((0..3).all(|w| a.count(w) > k / 5), "{:?}", (0..3).map(|w| a.count(w)).collect::<Vec<_>>());
        let own = draw_vector(UserId(0), k, 3, 2).unwrap();
        assert_eq!(draw_vertex_vector(cg.vertex(0), k, 3, 2).unwrap(), own);
        let m = schedule_with(&cg, k, 3, 2, VectorRule::MinMember).unwrap();
        assert_eq!(m.count(1) + m.count(2), 0);
    }

    #[test]
    fn triangle_guarantee() {
        let g = ConflictGraph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let cg = singletons(&g);
        let eps = 0.3;
        let k = kuhn_k(3, eps).unwrap();
        let need = guaranteed_slots(k, eps, 2);
        let mut ok = 0;
        for seed in 0..100 {
            let a = schedule(&cg, k, 3, seed).unwrap();
            assert!(a.is_proper(&cg));
            ok += (0..3).filter(|&w| a.count(w) >= need).count();
        }
        assert!(ok as f64 >= 0.95 * 300.0, "{ok} of 300");
    }

    #[test]
    fn assignment_is_deterministic_and_local() {
        let g = crate::generators::erdos_renyi(15, 0.3, 8).unwrap();
        let cg = singletons(&g);
        let a = schedule(&cg, 200, 15, 4).unwrap();
        assert_eq!(a, schedule(&cg, 200, 15, 4).unwrap());
        let vectors = draw_vectors(15, 200, 15, 4).unwrap();
        for w in 0..cg.len() {
            let own = (&vectors[w], cg.vertex(w));
            let nb: Vec<_> = cg.neighbors(w).iter().map(|&z| (&vectors[z], cg.vertex(z))).collect();
            assert_eq!(acquire(own, &nb), a.acquired[w]);
        }
    }

    #[test]
    fn csv_export() {
        let g = ConflictGraph::from_edges(2, [(0, 1)]).unwrap();
        let cg = singletons(&g);
        let a = ColorAssignment { k: 4, acquired: vec![vec![0, 2], vec![1]] };
        assert_eq!(a.to_csv(&cg), "vertex,k,acquired,fraction\n\"{1}\",4,2,0.5\n\"{2}\",4,1,0.25\n");
        let bad = ColorAssignment { k: 4, acquired: vec![vec![0], vec![0]] };
        assert!(!bad.is_proper(&cg));
    }
}
