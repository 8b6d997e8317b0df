//! Brute-force references shared by the integration tests. Nothing here
//! calls the enumeration or selection code it is compared against.

#![allow(dead_code)]

use subnet_core::{CliqueVertex, ConflictGraph, UserId};

const INF: usize = usize::MAX / 4;

/// Induced diameter of the users in `mask`, or `None` when disconnected.
/// Floyd-Warshall restricted to the subset.
pub fn mask_diameter(g: &ConflictGraph, mask: u32) -> Option<usize> {
    let members: Vec<usize> = (0..g.n()).filter(|&i| mask >> i & 1 == 1).collect();
    let m = members.len();
    let mut d = vec![vec![INF; m]; m];
    for a in 0..m {
        d[a][a] = 0;
        for b in 0..m {
            if a != b && g.is_adjacent(UserId(members[a]), UserId(members[b])) {
                d[a][b] = 1;
            }
        }
    }
    for c in 0..m {
        for a in 0..m {
            for b in 0..m {
                if d[a][c] + d[c][b] < d[a][b] {
                    d[a][b] = d[a][c] + d[c][b];
                }
            }
        }
    }
    let worst = d.iter().flatten().copied().max().unwrap_or(0);
    (worst < INF).then_some(worst)
}

/// Every r-clique for `r <= rho` over all `2^n` subsets: a set of induced
/// diameter `r` that no strict superset of the same diameter contains.
pub fn r_cliques(g: &ConflictGraph, rho: usize) -> Vec<CliqueVertex> {
    let n = g.n();
    assert!(n <= 16, "oracle is exponential");
    let full = 1u32 << n;
    let diam: Vec<Option<usize>> = (0..full)
        .map(|mask| if mask == 0 { None } else { mask_diameter(g, mask) })
        .collect();
    let mut out = Vec::new();
    for mask in 1..full {
        let Some(r) = diam[mask as usize] else { continue };
        if r > rho {
            continue;
        }
        let dominated = (mask + 1..full)
            .any(|sup| sup & mask == mask && diam[sup as usize] == Some(r));
        if !dominated {
            let members = (0..n).filter(|&i| mask >> i & 1 == 1).map(UserId).collect();
            out.push(CliqueVertex::new(r, members));
        }
    }
    out.sort();
    out
}

/// Whether two member sets overlap or contain adjacent users.
pub fn interfere(g: &ConflictGraph, a: &[UserId], b: &[UserId]) -> bool {
    a.iter().any(|&x| b.iter().any(|&y| x == y || g.is_adjacent(x, y)))
}

/// Plain BFS distances from `s`, `None` when unreachable.
pub fn bfs(g: &ConflictGraph, s: UserId) -> Vec<Option<usize>> {
    let mut dist = vec![None; g.n()];
    dist[s.0] = Some(0);
    let mut queue = std::collections::VecDeque::from([s]);
    while let Some(u) = queue.pop_front() {
        let du = dist[u.0].unwrap();
        for v in g.neighbors(u).unwrap() {
            if dist[v.0].is_none() {
                dist[v.0] = Some(du + 1);
                queue.push_back(*v);
            }
        }
    }
    dist
}
