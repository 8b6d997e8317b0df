//! Replicated experiments producing one CSV row per
//! (graph setting, replicate, rho, algorithm).

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::cliques::{temp_graph, ConsolidatedGraph};
use crate::error::{invalid, Error, Result};
use crate::generators::{GenSpec, GraphFamily};
use crate::graph::ConflictGraph;
use crate::metrics::{self, AlphaReport, MsOutcome, NetRateBounds};
use crate::rng::{self, tag};
use crate::scheduler;
use crate::selection::{
    aggressive_centralized, conservative_select, verify_aggressive, verify_conservative,
    SelectionResult,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Dc,
    Ms,
    Conservative,
    Aggressive,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] =
        [Algorithm::Dc, Algorithm::Ms, Algorithm::Conservative, Algorithm::Aggressive];
}

/// Where the graphs of one setting come from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GraphSource {
    Generated(GenSpec),
    File { path: PathBuf },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Sources {
    One(GraphSource),
    Many(Vec<GraphSource>),
}

impl Sources {
    pub fn as_slice(&self) -> &[GraphSource] {
        match self {
            Sources::One(s) => std::slice::from_ref(s),
            Sources::Many(v) => v,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Capacities {
    Uniform(f64),
    PerUser(Vec<f64>),
}

impl Default for Capacities {
    fn default() -> Self {
        Capacities::Uniform(1.0)
    }
}

impl Capacities {
    fn for_users(&self, n: usize) -> Result<Vec<f64>> {
        match self {
            Capacities::Uniform(c) => Ok(vec![*c; n]),
            Capacities::PerUser(v) if v.len() >= n => Ok(v[..n].to_vec()),
            Capacities::PerUser(v) => Err(invalid(format!(
                "{} capacities given for {n} users",
                v.len()
            ))),
        }
    }
}

fn default_eps() -> f64 {
    0.3
}
fn default_reps() -> usize {
    1
}
fn default_slots() -> usize {
    10_000
}
fn default_k_cap() -> usize {
    scheduler::DEFAULT_K_CAP
}
fn default_algorithms() -> Vec<Algorithm> {
    Algorithm::ALL.to_vec()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub gen: Sources,
    pub rho: Vec<usize>,
    #[serde(default = "default_eps")]
    pub epsilon: f64,
    #[serde(default = "default_algorithms")]
    pub algorithms: Vec<Algorithm>,
    #[serde(default = "default_reps")]
    pub replications: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_slots")]
    pub slots_ms: usize,
    #[serde(default)]
    pub capacities: Capacities,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// Run the multicoloring step for empirical alpha and net-rate columns.
    #[serde(default)]
    pub empirical: bool,
    /// Upper bound on users used to size the color vectors; defaults to n.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nbar: Option<usize>,
    #[serde(default = "default_k_cap")]
    pub k_cap: usize,
    #[serde(default)]
    pub vector_rule: scheduler::VectorRule,
    #[serde(default)]
    pub record_runtime: bool,
}

impl ExperimentConfig {
    pub fn new(gen: Vec<GraphSource>, rho: Vec<usize>) -> Self {
        ExperimentConfig {
            gen: Sources::Many(gen),
            rho,
            epsilon: default_eps(),
            algorithms: default_algorithms(),
            replications: default_reps(),
            master_seed: 0,
            slots_ms: default_slots(),
            capacities: Capacities::default(),
            output: None,
            empirical: false,
            nbar: None,
            k_cap: default_k_cap(),
            vector_rule: scheduler::VectorRule::default(),
            record_runtime: false,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.gen.as_slice().is_empty() {
            return Err(invalid("no graph sources configured"));
        }
        for src in self.gen.as_slice() {
            if let GraphSource::Generated(spec) = src {
                spec.family.validate()?;
            }
        }
        if self.rho.is_empty() {
            return Err(invalid("rho list is empty"));
        }
        if self.replications == 0 {
            return Err(invalid("replications must be at least 1"));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(invalid(format!("epsilon must lie in (0, 1), got {}", self.epsilon)));
        }
        if self.algorithms.is_empty() {
            return Err(invalid("no algorithms selected"));
        }
        if self.algorithms.contains(&Algorithm::Ms) && self.slots_ms == 0 {
            return Err(invalid("slots_ms must be at least 1"));
        }
        if self.k_cap == 0 {
            return Err(invalid("k_cap must be positive"));
        }
        match &self.capacities {
            Capacities::Uniform(c) if !(c.is_finite() && *c >= 0.0) => {
                return Err(invalid("capacities must be finite and non-negative"))
            }
            Capacities::PerUser(v) if v.iter().any(|c| !(c.is_finite() && *c >= 0.0)) => {
                return Err(invalid("capacities must be finite and non-negative"))
            }
            _ => {}
        }
        Ok(())
    }
}

/// One output line. Optional columns stay empty when not computed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub family: String,
    pub n: usize,
    pub params: String,
    pub seed: u64,
    pub rho: usize,
    pub epsilon: f64,
    pub algorithm: String,
    pub alpha_ideal_num: Option<String>,
    pub alpha_ideal_den: Option<String>,
    pub alpha_ideal: Option<f64>,
    pub alpha_eps: Option<f64>,
    pub alpha_empirical: Option<f64>,
    pub net_lower: Option<f64>,
    pub net_upper: Option<f64>,
    #[serde(rename = "max_degree_G")]
    pub max_degree_g: Option<usize>,
    #[serde(rename = "max_degree_Grho")]
    pub max_degree_grho: Option<usize>,
    pub runtime_ms: Option<u64>,
    pub error: Option<String>,
}

#[derive(Clone, Debug)]
struct Setting {
    family: String,
    n: usize,
    params: String,
}

impl Setting {
    fn row(&self, seed: u64, rho: usize, eps: f64, algorithm: &str) -> MetricsRow {
        MetricsRow {
            family: self.family.clone(),
            n: self.n,
            params: self.params.clone(),
            seed,
            rho,
            epsilon: eps,
            algorithm: algorithm.to_string(),
            alpha_ideal_num: None,
            alpha_ideal_den: None,
            alpha_ideal: None,
            alpha_eps: None,
            alpha_empirical: None,
            net_lower: None,
            net_upper: None,
            max_degree_g: None,
            max_degree_grho: None,
            runtime_ms: None,
            error: None,
        }
    }
}

fn fill_alpha(row: &mut MetricsRow, a: &AlphaReport) {
    row.alpha_ideal_num = Some(a.ideal.numer().to_string());
    row.alpha_ideal_den = Some(a.ideal.denom().to_string());
    row.alpha_ideal = Some(a.ideal_f64());
    row.alpha_eps = Some(a.eps_scaled);
}

fn fill_net(row: &mut MetricsRow, b: &NetRateBounds) {
    row.net_lower = Some(b.lower);
    row.net_upper = Some(b.upper);
}

/// Seed of replicate `r`.
pub fn replicate_seed(master: u64, r: usize) -> u64 {
    rng::derive_seed(master, &[tag::REPLICATE, r as u64])
}

struct Job<'a> {
    setting_idx: usize,
    source: &'a GraphSource,
    replicate: usize,
}

/// Load or generate the graph of one replicate, returning it with the seed
/// that produced it.
fn materialize(
    source: &GraphSource,
    setting_idx: usize,
    rep_seed: u64,
) -> Result<(ConflictGraph, u64)> {
    match source {
        GraphSource::File { path } => Ok((crate::io::read_edge_list(path)?, rep_seed)),
        GraphSource::Generated(spec) => {
            let seed = if spec.family.is_deterministic() {
                0
            } else {
                rng::derive_seed(spec.seed ^ rep_seed, &[tag::GRAPH, setting_idx as u64])
            };
            let g = GenSpec::new(spec.family.clone(), seed).generate()?.graph;
            Ok((g, seed))
        }
    }
}

fn describe(source: &GraphSource) -> Setting {
    match source {
        GraphSource::Generated(spec) => Setting {
            family: spec.family.name().to_string(),
            n: spec.family.n(),
            params: spec.family.params(),
        },
        GraphSource::File { path } => Setting {
            family: "file".to_string(),
            n: 0,
            params: path.display().to_string(),
        },
    }
}

/// Per-replicate context shared by every (rho, algorithm) pair.
struct Replicate<'a> {
    cfg: &'a ExperimentConfig,
    g: ConflictGraph,
    seed: u64,
    capacities: Vec<f64>,
    k: Option<usize>,
    nbar: usize,
}

impl Replicate<'_> {
    fn vector_seed(&self) -> u64 {
        rng::derive_seed(self.seed, &[tag::VECTORS])
    }

    fn multicolor(&self, sel: &SelectionResult) -> Result<Option<scheduler::ColorAssignment>> {
        let Some(k) = self.k else { return Ok(None) };
        let assign = scheduler::schedule_with(
            &sel.consolidated,
            k,
            self.nbar,
            self.vector_seed(),
            self.cfg.vector_rule,
        )?;
        if !assign.is_proper(&sel.consolidated) {
            return Err(Error::Invariant("multicoloring is not proper".into()));
        }
        Ok(Some(assign))
    }

    fn empirical(&self, row: &mut MetricsRow, sel: &SelectionResult) -> Result<()> {
        if let Some(assign) = self.multicolor(sel)? {
            row.alpha_empirical = Some(metrics::alpha_empirical(&assign, sel).ideal_f64());
            let b = metrics::net_rate_bounds(&assign, sel, &self.capacities)?;
            if b.lower > b.upper + 1e-9 {
                return Err(Error::Invariant("net lower bound exceeds upper bound".into()));
            }
            fill_net(row, &b);
        }
        Ok(())
    }

    fn dc(&self, row: &mut MetricsRow) -> Result<()> {
        let singles = temp_graph(&self.g, 0)?;
        let sel = conservative_select(&singles, &self.g, 0)?;
        fill_alpha(row, &metrics::alpha_dc(&self.g).scaled(self.cfg.epsilon));
        row.max_degree_grho = Some(self.g.max_degree());
        self.empirical(row, &sel)
    }

    fn ms(&self, row: &mut MetricsRow, out: &MsOutcome) {
        let a = metrics::alpha_ms(out);
        fill_alpha(row, &a);
        row.alpha_empirical = Some(a.ideal_f64());
        fill_net(row, &metrics::ms_net_rate(out, &self.capacities));
        row.max_degree_grho = Some(self.g.max_degree());
    }

    fn temp(&self, rho: usize) -> Result<ConsolidatedGraph> {
        temp_graph(&self.g, rho)
    }

    fn conservative(&self, row: &mut MetricsRow, rho: usize) -> Result<()> {
        let sel = conservative_select(&self.temp(rho)?, &self.g, rho)?;
        verify_conservative(&sel, &self.g)?;
        let a = metrics::alpha_conservative(&sel, self.cfg.epsilon);
        if a.ideal < metrics::alpha_dc(&self.g).ideal {
            return Err(Error::Invariant("conservative alpha below distributed coloring".into()));
        }
        fill_alpha(row, &a);
        row.max_degree_grho = Some(sel.consolidated.max_degree());
        self.empirical(row, &sel)
    }

    fn aggressive(&self, rows: &mut [MetricsRow; 2], rho: usize) -> Result<()> {
        let sel = aggressive_centralized(&self.temp(rho)?, &self.g, rho)?;
        verify_aggressive(&sel, &self.g)?;
        let ratio = metrics::alpha_aggressive_ratio(&sel)?.scaled(self.cfg.epsilon);
        let sum = metrics::alpha_aggressive_sum(&sel, self.cfg.epsilon)?;
        fill_alpha(&mut rows[0], &ratio);
        fill_alpha(&mut rows[1], &sum);
        for row in rows.iter_mut() {
            row.max_degree_grho = Some(sel.consolidated.max_degree());
        }
        self.empirical(&mut rows[0], &sel)?;
        let (emp, lo, hi) = (rows[0].alpha_empirical, rows[0].net_lower, rows[0].net_upper);
        rows[1].alpha_empirical = emp;
        rows[1].net_lower = lo;
        rows[1].net_upper = hi;
        Ok(())
    }
}

fn run_job(cfg: &ExperimentConfig, job: &Job<'_>) -> Vec<MetricsRow> {
    let setting = describe(job.source);
    let rep_seed = replicate_seed(cfg.master_seed, job.replicate);
    let eps = cfg.epsilon;

    // every configured (rho, algorithm) pair, with aggressive expanding to two rows
    let labels: Vec<(usize, Algorithm, &str)> = cfg
        .rho
        .iter()
        .flat_map(|&rho| {
            cfg.algorithms.iter().flat_map(move |&alg| {
                let names: &[&str] = match alg {
                    Algorithm::Dc => &["dc"],
                    Algorithm::Ms => &["ms"],
                    Algorithm::Conservative => &["conservative"],
                    Algorithm::Aggressive => &["aggressive", "aggressive_sum"],
                };
                names.iter().map(move |&name| (rho, alg, name))
            })
        })
        .collect();

    let failed = |seed: u64, n: usize, err: &Error| -> Vec<MetricsRow> {
        labels
            .iter()
            .map(|&(rho, _, name)| {
                let mut row = setting.row(seed, rho, eps, name);
                row.n = n;
                row.error = Some(err.to_string());
                row
            })
            .collect()
    };

    let (g, seed) = match materialize(job.source, job.setting_idx, rep_seed) {
        Ok(x) => x,
        Err(e) => return failed(rep_seed, setting.n, &e),
    };
    let setting = Setting { n: g.n(), ..setting.clone() };
    let setup = || -> Result<Replicate<'_>> {
        let nbar = cfg.nbar.unwrap_or(g.n()).max(2);
        let k = if cfg.empirical {
            Some(scheduler::kuhn_k_capped(nbar, eps, cfg.k_cap)?)
        } else {
            None
        };
        Ok(Replicate {
            cfg,
            g: g.clone(),
            seed: rep_seed,
            capacities: cfg.capacities.for_users(g.n())?,
            k,
            nbar,
        })
    };
    let rep = match setup() {
        Ok(r) => r,
        Err(e) => return failed(seed, g.n(), &e),
    };

    let ms_out = if cfg.algorithms.contains(&Algorithm::Ms) {
        Some(metrics::ms_schedule(
            &rep.g,
            cfg.slots_ms,
            rng::derive_seed(rep_seed, &[tag::MS]),
        ))
    } else {
        None
    };

    let mut rows = Vec::with_capacity(labels.len());
    for &rho in &cfg.rho {
        for &alg in &cfg.algorithms {
            let start = Instant::now();
            let base = |name: &str| {
                let mut row = setting.row(seed, rho, eps, name);
                row.max_degree_g = Some(rep.g.max_degree());
                row
            };
            let mut produced = match alg {
                Algorithm::Aggressive => {
                    let mut pair = [base("aggressive"), base("aggressive_sum")];
                    // rho = 0 means no cliques are formed: distributed coloring
                    let res = if rho == 0 {
                        let r = rep.dc(&mut pair[0]);
                        let copy = pair[0].clone();
                        pair[1] = MetricsRow { algorithm: "aggressive_sum".into(), ..copy };
                        r
                    } else {
                        rep.aggressive(&mut pair, rho)
                    };
                    if let Err(e) = res {
                        pair.iter_mut().for_each(|r| r.error = Some(e.to_string()));
                    }
                    pair.to_vec()
                }
                _ => {
                    let mut row = base(match alg {
                        Algorithm::Dc => "dc",
                        Algorithm::Ms => "ms",
                        _ => "conservative",
                    });
                    let res = match alg {
                        Algorithm::Dc => rep.dc(&mut row),
                        Algorithm::Ms => match ms_out.as_ref().expect("ms outcome") {
                            Ok(out) => {
                                rep.ms(&mut row, out);
                                Ok(())
                            }
                            Err(e) => Err(Error::Invariant(e.to_string())),
                        },
                        _ if rho == 0 => rep.dc(&mut row),
                        _ => rep.conservative(&mut row, rho),
                    };
                    if let Err(e) = res {
                        row.error = Some(e.to_string());
                    }
                    vec![row]
                }
            };
            if cfg.record_runtime {
                let ms = start.elapsed().as_millis() as u64;
                produced.iter_mut().for_each(|r| r.runtime_ms = Some(ms));
            }
            rows.extend(produced);
        }
    }
    rows
}

/// Run every (setting, replicate) pair; rows come back in
/// (setting, replicate, rho, algorithm) order whatever the thread schedule.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<MetricsRow>> {
    cfg.validate()?;
    let jobs: Vec<Job<'_>> = cfg
        .gen
        .as_slice()
        .iter()
        .enumerate()
        .flat_map(|(setting_idx, source)| {
            (0..cfg.replications).map(move |replicate| Job { setting_idx, source, replicate })
        })
        .collect();
    Ok(crate::par_map(&jobs, |job| run_job(cfg, job)).into_iter().flatten().collect())
}

/// Mean of each column over replicates, grouped by (setting, rho, algorithm).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryRow {
    pub family: String,
    pub n: usize,
    pub params: String,
    pub rho: usize,
    pub algorithm: String,
    pub replicates: usize,
    pub errors: usize,
    pub mean_alpha_ideal: Option<f64>,
    pub mean_alpha_eps: Option<f64>,
    pub mean_alpha_empirical: Option<f64>,
    pub mean_net_lower: Option<f64>,
    pub mean_net_upper: Option<f64>,
}

fn mean(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let v: Vec<f64> = values.flatten().collect();
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

pub fn summarize(rows: &[MetricsRow]) -> Vec<SummaryRow> {
    let mut order = Vec::new();
    let mut groups: BTreeMap<(String, usize, String, usize, String), Vec<&MetricsRow>> =
        BTreeMap::new();
    for r in rows {
        let key = (r.family.clone(), r.n, r.params.clone(), r.rho, r.algorithm.clone());
        groups
            .entry(key.clone())
            .or_insert_with(|| {
                order.push(key);
                Vec::new()
            })
            .push(r);
    }
    order
        .into_iter()
        .map(|key| {
            let g = &groups[&key];
            let ok: Vec<&&MetricsRow> = g.iter().filter(|r| r.error.is_none()).collect();
            SummaryRow {
                family: key.0.clone(),
                n: key.1,
                params: key.2.clone(),
                rho: key.3,
                algorithm: key.4.clone(),
                replicates: g.len(),
                errors: g.len() - ok.len(),
                mean_alpha_ideal: mean(ok.iter().map(|r| r.alpha_ideal)),
                mean_alpha_eps: mean(ok.iter().map(|r| r.alpha_eps)),
                mean_alpha_empirical: mean(ok.iter().map(|r| r.alpha_empirical)),
                mean_net_lower: mean(ok.iter().map(|r| r.net_lower)),
                mean_net_upper: mean(ok.iter().map(|r| r.net_upper)),
            }
        })
        .collect()
}

pub fn write_csv<T: Serialize, W: Write>(rows: &[T], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_csv_string<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

pub fn write_json<T: Serialize, W: Write>(rows: &[T], out: W) -> Result<()> {
    serde_json::to_writer_pretty(out, rows)?;
    Ok(())
}

fn generated(family: GraphFamily) -> GraphSource {
    GraphSource::Generated(GenSpec::new(family, 0))
}

fn preset(gen: Vec<GraphSource>, rho: Vec<usize>, reps: usize, empirical: bool) -> ExperimentConfig {
    ExperimentConfig {
        replications: reps,
        empirical,
        ..ExperimentConfig::new(gen, rho)
    }
}

/// One configuration per figure of the evaluation.
pub fn figure_recipes() -> Vec<(&'static str, ExperimentConfig)> {
    use GraphFamily::*;
    let er = |n, p| generated(ErdosRenyi { n, p });
    vec![
        (
            "exgraphs",
            ExperimentConfig {
                algorithms: vec![Algorithm::Conservative, Algorithm::Aggressive],
                ..preset(
                    vec![generated(LineClique { n: 20 }), generated(LineStar { n: 20 })],
                    vec![0, 1, 2, 3],
                    1,
                    false,
                )
            },
        ),
        (
            "randomalphacomp",
            preset(
                vec![
                    er(20, 0.1),
                    er(20, 0.5),
                    er(20, 0.9),
                    generated(BarabasiAlbert { n: 100, m: 1 }),
                    generated(Geometric { n: 20, d: 0.25 }),
                    generated(Geometric { n: 20, d: 0.5 }),
                ],
                vec![1],
                100,
                false,
            ),
        ),
        ("rg_p01_net", preset(vec![er(5, 0.1), er(10, 0.1), er(20, 0.1)], vec![1], 100, true)),
        ("rg_p09_net", preset(vec![er(5, 0.9), er(10, 0.9), er(20, 0.9)], vec![1], 100, true)),
        (
            "scalefree_net",
            preset(
                [25, 50, 100]
                    .into_iter()
                    .map(|n| generated(BarabasiAlbert { n, m: 1 }))
                    .collect(),
                vec![1],
                100,
                true,
            ),
        ),
        (
            "geo_d025_net",
            preset(
                [10, 20, 30].into_iter().map(|n| generated(Geometric { n, d: 0.25 })).collect(),
                vec![1],
                100,
                true,
            ),
        ),
    ]
}

pub fn figure_recipe(name: &str) -> Result<ExperimentConfig> {
    let recipes = figure_recipes();
    let names: Vec<&str> = recipes.iter().map(|(n, _)| *n).collect();
    recipes
        .into_iter()
        .find(|(n, _)| *n == name)
        .map(|(_, cfg)| cfg)
        .ok_or_else(|| invalid(format!("unknown preset {name:?}; available: {}", names.join(", "))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_clique_cfg() -> ExperimentConfig {
        ExperimentConfig {
            algorithms: vec![Algorithm::Aggressive],
            ..ExperimentConfig::new(vec![generated(GraphFamily::LineClique { n: 20 })], vec![0, 1, 2, 3])
        }
    }

    #[test]
    fn line_clique_ratio_column() {
        let rows = run_experiment(&line_clique_cfg()).unwrap();
        let ratio: Vec<(String, String)> = rows
            .iter()
            .filter(|r| r.algorithm == "aggressive")
            .map(|r| (r.alpha_ideal_num.clone().unwrap(), r.alpha_ideal_den.clone().unwrap()))
            .collect();
        let want = [("1", "4"), ("2", "5"), ("3", "7"), ("4", "9")];
        assert_eq!(ratio.len(), 4);
        for ((n, d), (wn, wd)) in ratio.iter().zip(want) {
            assert_eq!((n.as_str(), d.as_str()), (wn, wd));
        }
        assert_eq!(rows.len(), 8);
    }

    #[test]
    fn deterministic_output() {
        let cfg = ExperimentConfig {
            replications: 3,
            empirical: true,
            k_cap: 500,
            slots_ms: 200,
            master_seed: 11,
            ..ExperimentConfig::new(
                vec![generated(GraphFamily::ErdosRenyi { n: 12, p: 0.3 })],
                vec![1],
            )
        };
        let a = to_csv_string(&run_experiment(&cfg).unwrap()).unwrap();
        let b = to_csv_string(&run_experiment(&cfg).unwrap()).unwrap();
        assert_eq!(a, b);
        assert!(a.starts_with("family,n,params,seed,rho,epsilon,algorithm,alpha_ideal_num"));
        assert!(a.lines().next().unwrap().ends_with("max_degree_G,max_degree_Grho,runtime_ms,error"));
    }

    #[test]
    fn replicates_are_never_dropped() {
        let cfg = ExperimentConfig {
            replications: 4,
            ..ExperimentConfig::new(
                vec![GraphSource::File { path: PathBuf::from("/nonexistent/graph.txt") }],
                vec![1, 2],
            )
        };
        let rows = run_experiment(&cfg).unwrap();
        // 4 replicates x 2 rho x (dc, ms, conservative, aggressive, aggressive_sum)
        assert_eq!(rows.len(), 4 * 2 * 5);
        assert!(rows.iter().all(|r| r.error.is_some()));
    }

    #[test]
    fn config_validation() {
        let ok = r#"{"gen": {"family": "erdos_renyi", "n": 10, "p": 0.2}, "rho": [1]}"#;
        let cfg = ExperimentConfig::from_json(ok).unwrap();
        assert_eq!(cfg.epsilon, 0.3);
        assert_eq!(cfg.slots_ms, 10_000);
        let file = r#"{"gen": [{"path": "g.txt"}], "rho": [1], "algorithms": ["dc"]}"#;
        assert!(matches!(
            ExperimentConfig::from_json(file).unwrap().gen.as_slice()[0],
            GraphSource::File { .. }
        ));
        for bad in [
            r#"{"gen": {"family": "erdos_renyi", "n": 10, "p": 0.2}, "rho": []}"#,
            r#"{"gen": {"family": "erdos_renyi", "n": 10, "p": 0.2}, "rho": [1], "epsilon": 1.5}"#,
            r#"{"gen": {"family": "erdos_renyi", "n": 10, "p": 0.2}, "rho": [1], "replications": 0}"#,
            r#"{"gen": {"family": "erdos_renyi", "n": 10, "p": 2.0}, "rho": [1]}"#,
            r#"{"gen": {"family": "erdos_renyi", "n": 10, "p": 0.2}, "rho": [1], "bogus": 1}"#,
        ] {
            assert!(ExperimentConfig::from_json(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn presets() {
        let names: Vec<&str> = figure_recipes().iter().map(|(n, _)| *n).collect();
        assert_eq!(
            names,
            ["exgraphs", "randomalphacomp", "rg_p01_net", "rg_p09_net", "scalefree_net", "geo_d025_net"]
        );
        assert_eq!(figure_recipe("randomalphacomp").unwrap().gen.as_slice().len(), 6);
        let p09 = figure_recipe("rg_p09_net").unwrap();
        let ns: Vec<usize> = p09
            .gen
            .as_slice()
            .iter()
            .map(|s| match s {
                GraphSource::Generated(g) => g.family.n(),
                GraphSource::File { .. } => 0,
            })
            .collect();
        assert_eq!(ns, [5, 10, 20]);
        assert!(p09.empirical);
        let err = figure_recipe("nope").unwrap_err().to_string();
        assert!(err.contains("exgraphs") && err.contains("geo_d025_net"));
        for (_, cfg) in figure_recipes() {
            cfg.validate().unwrap();
        }
    }

    #[test]
    fn summary_means() {
        let cfg = ExperimentConfig {
            replications: 5,
            algorithms: vec![Algorithm::Dc],
            ..ExperimentConfig::new(vec![generated(GraphFamily::ErdosRenyi { n: 10, p: 0.3 })], vec![1])
        };
        let rows = run_experiment(&cfg).unwrap();
        let s = summarize(&rows);
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].replicates, 5);
        let direct = rows.iter().map(|r| r.alpha_ideal.unwrap()).sum::<f64>() / 5.0;
        assert!((s[0].mean_alpha_ideal.unwrap() - direct).abs() < 1e-12);
    }
}
