//! Seeded graph families.

use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::graph::{ConflictGraph, UserId};
use crate::rng;

/// A graph family and its shape parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum GraphFamily {
    LineClique { n: usize },
    LineStar { n: usize },
    ErdosRenyi { n: usize, p: f64 },
    BarabasiAlbert {
        n: usize,
        #[serde(default = "default_ba_m")]
        m: usize,
    },
    Geometric { n: usize, d: f64 },
}

fn default_ba_m() -> usize {
    1
}

impl GraphFamily {
    pub fn name(&self) -> &'static str {
        match self {
            GraphFamily::LineClique { .. } => "line_clique",
            GraphFamily::LineStar { .. } => "line_star",
            GraphFamily::ErdosRenyi { .. } => "erdos_renyi",
            GraphFamily::BarabasiAlbert { .. } => "barabasi_albert",
            GraphFamily::Geometric { .. } => "geometric",
        }
    }

    pub fn n(&self) -> usize {
        match *self {
            GraphFamily::LineClique { n }
            | GraphFamily::LineStar { n }
            | GraphFamily::ErdosRenyi { n, .. }
            | GraphFamily::BarabasiAlbert { n, .. }
            | GraphFamily::Geometric { n, .. } => n,
        }
    }

    /// Family-specific parameters rendered as `key=value`.
    pub fn params(&self) -> String {
        match self {
            GraphFamily::LineClique { .. } | GraphFamily::LineStar { .. } => String::new(),
            GraphFamily::ErdosRenyi { p, .. } => format!("p={p}"),
            GraphFamily::BarabasiAlbert { m, .. } => format!("m={m}"),
            GraphFamily::Geometric { d, .. } => format!("d={d}"),
        }
    }

    /// Whether the family ignores its seed.
    pub fn is_deterministic(&self) -> bool {
        matches!(self, GraphFamily::LineClique { .. } | GraphFamily::LineStar { .. })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            GraphFamily::LineClique { n } | GraphFamily::LineStar { n } if n < 4 => {
                Err(invalid(format!("{} requires n >= 4, got {n}", self.name())))
            }
            GraphFamily::ErdosRenyi { n, p } if n < 1 || !(0.0..=1.0).contains(&p) => {
                Err(invalid(format!("erdos_renyi requires n >= 1 and 0 <= p <= 1, got n={n}, p={p}")))
            }
            GraphFamily::BarabasiAlbert { n, m } if m < 1 || m >= n => {
                Err(invalid(format!("barabasi_albert requires 1 <= m < n, got n={n}, m={m}")))
            }
            GraphFamily::Geometric { n, d } if n < 1 || d.is_nan() || d <= 0.0 => {
                Err(invalid(format!("geometric requires n >= 1 and d > 0, got n={n}, d={d}")))
            }
            _ => Ok(()),
        }
    }
}

/// A family plus the seed that drives it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    #[serde(flatten)]
    pub family: GraphFamily,
    #[serde(default)]
    pub seed: u64,
}

/// Output of a generator: the conflict graph and, for geometric
/// placements, the interference network it came from.
#[derive(Clone, Debug)]
pub struct Generated {
    pub graph: ConflictGraph,
    pub network: Option<InterferenceNetwork>,
}

impl GenSpec {
    pub fn new(family: GraphFamily, seed: u64) -> Self {
        GenSpec { family, seed }
    }

    pub fn generate(&self) -> Result<Generated> {
        self.family.validate()?;
        let graph = match self.family {
            GraphFamily::LineClique { n } => line_clique(n)?,
            GraphFamily::LineStar { n } => line_star(n)?,
            GraphFamily::ErdosRenyi { n, p } => erdos_renyi(n, p, self.seed)?,
            GraphFamily::BarabasiAlbert { n, m } => barabasi_albert(n, m, self.seed)?,
            GraphFamily::Geometric { n, d } => {
                let (network, graph) = geometric(n, d, self.seed)?;
                return Ok(Generated { graph, network: Some(network) });
            }
        };
        Ok(Generated { graph, network: None })
    }
}

fn line_edges(n: usize) -> impl Iterator<Item = (usize, usize)> {
    // path over users 0..=n-3, then n-3 joined to both n-2 and n-1
    (0..n - 3).map(|i| (i, i + 1)).chain([(n - 3, n - 2), (n - 3, n - 1)])
}

/// Path of `n - 2` users whose last user closes a triangle with two extra users.
pub fn line_clique(n: usize) -> Result<ConflictGraph> {
    GraphFamily::LineClique { n }.validate()?;
    ConflictGraph::from_edges(n, line_edges(n).chain([(n - 2, n - 1)]))
}

/// The line-clique graph without the edge between its two last users.
pub fn line_star(n: usize) -> Result<ConflictGraph> {
    GraphFamily::LineStar { n }.validate()?;
    ConflictGraph::from_edges(n, line_edges(n))
}

/// G(n, p): pairs `i < j` visited lexicographically, each kept with probability `p`.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Result<ConflictGraph> {
    GraphFamily::ErdosRenyi { n, p }.validate()?;
    let mut rng = rng::stream(seed, 0);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    ConflictGraph::from_edges(n, edges)
}

/// Preferential attachment grown from a clique on `m + 1` users.
///
/// Each arriving user picks `m` distinct targets, one degree-weighted draw at
/// a time over the targets not yet picked.
pub fn barabasi_albert(n: usize, m: usize, seed: u64) -> Result<ConflictGraph> {
    GraphFamily::BarabasiAlbert { n, m }.validate()?;
    let mut rng = rng::stream(seed, 0);
    let mut edges: Vec<(usize, usize)> = (0..=m)
        .flat_map(|i| (i + 1..=m).map(move |j| (i, j)))
        .collect();
    let mut degree = vec![0u64; n];
    for &(i, j) in &edges {
        degree[i] += 1;
        degree[j] += 1;
    }
    for new in m + 1..n {
        let mut picked = Vec::with_capacity(m);
        for _ in 0..m {
            let total: u64 = (0..new)
                .filter(|u| !picked.contains(u))
                .map(|u| degree[u])
                .sum();
            let mut ticket = rng.gen_range(0..total);
            let target = (0..new)
                .filter(|u| !picked.contains(u))
                .find(|&u| {
                    if ticket < degree[u] {
                        true
                    } else {
                        ticket -= degree[u];
                        false
                    }
                })
                .expect("ticket lies within the total weight");
            picked.push(target);
        }
        for &t in &picked {
            edges.push((t, new));
            degree[t] += 1;
            degree[new] += 1;
        }
    }
    ConflictGraph::from_edges(n, edges)
}

/// A point in the unit square.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn dist(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Source-destination connectivity behind a conflict graph.
///
/// `links` holds `(i, j)` when source `i` reaches destination `j`; `(i, i)` is
/// always present. Channel gains are carried for export only.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InterferenceNetwork {
    pub n: usize,
    pub tx_pos: Option<Vec<Point>>,
    pub rx_pos: Option<Vec<Point>>,
    pub links: BTreeSet<(UserId, UserId)>,
    pub gains: Option<Vec<((UserId, UserId), f64)>>,
}

impl InterferenceNetwork {
    /// Two users conflict when either source reaches the other's destination.
    pub fn conflict_graph(&self) -> Result<ConflictGraph> {
        ConflictGraph::from_edges(
            self.n,
            self.links
                .iter()
                .filter(|(i, j)| i != j)
                .map(|&(i, j)| (i.0.min(j.0), i.0.max(j.0))),
        )
    }
}

/// Uniform transmitter and receiver placement in the unit square; source `i`
/// interferes at destination `j` when they are within `d`.
pub fn geometric(n: usize, d: f64, seed: u64) -> Result<(InterferenceNetwork, ConflictGraph)> {
    GraphFamily::Geometric { n, d }.validate()?;
    let mut rng = rng::stream(seed, 0);
    let mut tx = Vec::with_capacity(n);
    let mut rx = Vec::with_capacity(n);
    for _ in 0..n {
        tx.push(Point { x: rng.gen(), y: rng.gen() });
        rx.push(Point { x: rng.gen(), y: rng.gen() });
    }
    let mut links = BTreeSet::new();
    for (i, &t) in tx.iter().enumerate() {
        for (j, &r) in rx.iter().enumerate() {
            if i == j || t.dist(r) <= d {
                links.insert((UserId(i), UserId(j)));
            }
        }
    }
    let network = InterferenceNetwork {
        n,
        tx_pos: Some(tx),
        rx_pos: Some(rx),
        links,
        gains: None,
    };
    let graph = network.conflict_graph()?;
    Ok((network, graph))
}
