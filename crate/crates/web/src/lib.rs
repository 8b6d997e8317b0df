//! Browser bindings for the demo page. Every export takes plain arguments
//! and returns a JSON string; errors come back as JS exceptions.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use subnet_core::cliques::temp_graph;
use subnet_core::generators::{GenSpec, GraphFamily};
use subnet_core::metrics;
use subnet_core::rng::derive_seed;
use subnet_core::scheduler::{self, VectorRule};
use subnet_core::selection::{aggressive_centralized, conservative_select};
use subnet_core::{ConflictGraph, SelectionResult};

type Res<T> = Result<T, String>;

fn family(name: &str, n: usize, param: f64) -> Res<GraphFamily> {
    let f = match name {
        "line_clique" => GraphFamily::LineClique { n },
        "line_star" => GraphFamily::LineStar { n },
        "erdos_renyi" => GraphFamily::ErdosRenyi { n, p: param },
        "barabasi_albert" => GraphFamily::BarabasiAlbert { n, m: param.max(1.0) as usize },
        "geometric" => GraphFamily::Geometric { n, d: param },
        other => return Err(format!("unknown family {other:?}")),
    };
    f.validate().map_err(|e| e.to_string())?;
    Ok(f)
}

fn select(g: &ConflictGraph, rho: usize, mode: &str) -> Res<SelectionResult> {
    let temp = temp_graph(g, rho).map_err(|e| e.to_string())?;
    match mode {
        "aggressive" => aggressive_centralized(&temp, g, rho),
        "conservative" => conservative_select(&temp, g, rho),
        other => return Err(format!("unknown mode {other:?}")),
    }
    .map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct CurvePoint {
    rho: usize,
    dc: f64,
    conservative: f64,
    aggressive_ratio: f64,
    aggressive_sum: f64,
    graphs: usize,
}

/// Mean analytic alpha for `rho = 0..=max_rho` over `reps` seeded graphs.
pub fn alpha_curve_json(name: &str, n: usize, param: f64, max_rho: usize, reps: usize, seed: u64) -> Res<String> {
    let fam = family(name, n, param)?;
    let reps = if fam.is_deterministic() { 1 } else { reps.max(1) };
    let graphs: Vec<ConflictGraph> = (0..reps)
        .map(|r| GenSpec::new(fam.clone(), derive_seed(seed, &[r as u64])).generate().map(|x| x.graph))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let mut points = Vec::new();
    for rho in 0..=max_rho {
        let (mut dc, mut con, mut ratio, mut sum) = (0.0, 0.0, 0.0, 0.0);
        for g in &graphs {
            let d = metrics::alpha_dc(g).ideal_f64();
            dc += d;
            if rho == 0 {
                con += d;
                ratio += d;
                sum += d;
                continue;
            }
            con += metrics::alpha_conservative(&select(g, rho, "conservative")?, 0.0).ideal_f64();
            let agg = select(g, rho, "aggressive")?;
            ratio += metrics::alpha_aggressive_ratio(&agg).map_err(|e| e.to_string())?.ideal_f64();
            sum += metrics::alpha_aggressive_sum(&agg, 0.0).map_err(|e| e.to_string())?.ideal_f64();
        }
        let k = graphs.len() as f64;
        points.push(CurvePoint {
            rho,
            dc: dc / k,
            conservative: con / k,
            aggressive_ratio: ratio / k,
            aggressive_sum: sum / k,
            graphs: graphs.len(),
        });
    }
    serde_json::to_string(&points).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct View {
    positions: Vec<(f64, f64)>,
    edges: Vec<(usize, usize)>,
    vertices: Vec<Vec<usize>>,
    orders: Vec<usize>,
    vertex_edges: Vec<(usize, usize)>,
    max_degree: usize,
    alpha: f64,
}

/// Circle layout, or transmitter positions for geometric graphs.
fn layout(spec: &GenSpec, n: usize) -> Res<Vec<(f64, f64)>> {
    if let GraphFamily::Geometric { .. } = spec.family {
        let net = spec.generate().map_err(|e| e.to_string())?.network;
        if let Some(tx) = net.and_then(|net| net.tx_pos) {
            return Ok(tx.iter().map(|p| (p.x, p.y)).collect());
        }
    }
    Ok((0..n)
        .map(|i| {
            let t = std::f64::consts::TAU * i as f64 / n as f64;
            (0.5 + 0.45 * t.cos(), 0.5 + 0.45 * t.sin())
        })
        .collect())
}

/// The conflict graph with a layout plus the consolidated graph over it.
/// Vertex members are 0-based user indices.
pub fn consolidated_view_json(name: &str, n: usize, param: f64, seed: u64, rho: usize, mode: &str) -> Res<String> {
    let spec = GenSpec::new(family(name, n, param)?, seed);
    let g = spec.generate().map_err(|e| e.to_string())?.graph;
    let sel = select(&g, rho, mode)?;
    let cg = &sel.consolidated;
    let alpha = match mode {
        "aggressive" => metrics::alpha_aggressive_ratio(&sel).map_err(|e| e.to_string())?.ideal_f64(),
        _ => metrics::alpha_conservative(&sel, 0.0).ideal_f64(),
    };
    let view = View {
        positions: layout(&spec, g.n())?,
        edges: g.edges().map(|(u, v)| (u.0, v.0)).collect(),
        vertices: cg.vertices().iter().map(|v| v.members.iter().map(|m| m.0).collect()).collect(),
        orders: cg.vertices().iter().map(|v| v.order).collect(),
        vertex_edges: cg.edges().collect(),
        max_degree: cg.max_degree(),
        alpha,
    };
    serde_json::to_string(&view).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct Slots {
    k: usize,
    labels: Vec<String>,
    counts: Vec<usize>,
    guaranteed: Vec<usize>,
    /// Holder of each of the first `shown` slots per vertex.
    strip: Vec<Vec<u32>>,
    alpha_empirical: f64,
}

/// Multicolor the consolidated graph with `k` slots.
#[allow(clippy::too_many_arguments)]
pub fn multicolor_json(
    name: &str,
    n: usize,
    param: f64,
    seed: u64,
    rho: usize,
    mode: &str,
    k: usize,
    eps: f64,
    per_vertex: bool,
    shown: usize,
) -> Res<String> {
    let g = GenSpec::new(family(name, n, param)?, seed)
        .generate()
        .map_err(|e| e.to_string())?
        .graph;
    let sel = select(&g, rho, mode)?;
    let cg = &sel.consolidated;
    let rule = if per_vertex { VectorRule::PerVertex } else { VectorRule::MinMember };
    let nbar = g.n().max(2);
    let assign = scheduler::schedule_with(cg, k, nbar, derive_seed(seed, &[1]), rule)
        .map_err(|e| e.to_string())?;
    let out = Slots {
        k,
        labels: cg.vertices().iter().map(|v| v.label()).collect(),
        counts: (0..cg.len()).map(|w| assign.count(w)).collect(),
        guaranteed: (0..cg.len()).map(|w| scheduler::guaranteed_slots(k, eps, cg.degree(w))).collect(),
        strip: assign
            .acquired
            .iter()
            .map(|slots| slots.iter().copied().take_while(|&s| (s as usize) < shown).collect())
            .collect(),
        alpha_empirical: metrics::alpha_empirical(&assign, &sel).ideal_f64(),
    };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn alpha_curve(name: &str, n: usize, param: f64, max_rho: usize, reps: usize, seed: u64) -> Result<String, JsValue> {
    alpha_curve_json(name, n, param, max_rho, reps, seed).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn consolidated_view(name: &str, n: usize, param: f64, seed: u64, rho: usize, mode: &str) -> Result<String, JsValue> {
    consolidated_view_json(name, n, param, seed, rho, mode).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn multicolor(
    name: &str,
    n: usize,
    param: f64,
    seed: u64,
    rho: usize,
    mode: &str,
    k: usize,
    eps: f64,
    per_vertex: bool,
    shown: usize,
) -> Result<String, JsValue> {
    multicolor_json(name, n, param, seed, rho, mode, k, eps, per_vertex, shown).map_err(|e| JsValue::from_str(&e))
}
