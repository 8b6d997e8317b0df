use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use subnet_core::cliques::{enumerate_r_cliques, temp_graph};
use subnet_core::experiment::{self, ExperimentConfig};
use subnet_core::generators::{GenSpec, GraphFamily};
use subnet_core::scheduler::{self, VectorRule};
use subnet_core::selection::{self, aggressive_centralized, conservative_select};
use subnet_core::{io as graph_io, metrics, ConflictGraph, Error, SelectionResult, UserId};

#[derive(Parser)]
#[command(name = "subnet", version, about = "Clique-based sub-network scheduling on conflict graphs")]
struct Cli {
    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a conflict graph and print it as an edge list or DOT.
    Generate {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        dot: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the r-cliques of a graph for r up to rho.
    Cliques {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value_t = 1)]
        rho: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Select clique vertices and print the consolidated graph.
    Select {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        sel: SelectArgs,
        /// Run the aggressive selection from this user's local view (1-based).
        #[arg(long)]
        user: Option<usize>,
        #[arg(long)]
        dot: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Multicolor the consolidated graph and report slot counts.
    Schedule {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        sel: SelectArgs,
        #[arg(long, default_value_t = 0.3)]
        epsilon: f64,
        /// Upper bound on the number of users (default: n).
        #[arg(long)]
        nbar: Option<usize>,
        #[arg(long, default_value_t = scheduler::DEFAULT_K_CAP)]
        k_cap: usize,
        #[arg(long, value_enum, default_value_t = RuleArg::MinMember)]
        vector_rule: RuleArg,
        /// Seed for the random vectors.
        #[arg(long, default_value_t = 0)]
        vector_seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a replicated experiment from a config file or a named preset.
    Experiment {
        #[arg(long, conflicts_with = "preset", required_unless_present_any = ["preset", "list_presets"])]
        config: Option<PathBuf>,
        #[arg(long)]
        preset: Option<String>,
        #[arg(long)]
        list_presets: bool,
        /// Override the master seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Print per-setting means instead of raw rows.
        #[arg(long)]
        summary: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify local-view consistency and selection invariants.
    Check {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value_t = 1)]
        rho: usize,
    },
}

#[derive(Args)]
struct GraphArgs {
    /// Edge list file (first line: number of users, then `u v` per line).
    #[arg(long, conflicts_with = "family")]
    graph: Option<PathBuf>,
    #[arg(long, value_enum)]
    family: Option<FamilyArg>,
    #[arg(short, long)]
    n: Option<usize>,
    #[arg(short, long)]
    p: Option<f64>,
    #[arg(short, long, default_value_t = 1)]
    m: usize,
    #[arg(short, long)]
    d: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    LineClique,
    LineStar,
    ErdosRenyi,
    BarabasiAlbert,
    Geometric,
}

#[derive(Args)]
struct SelectArgs {
    #[arg(long, default_value_t = 1)]
    rho: usize,
    #[arg(long, value_enum, default_value_t = Mode::Aggressive)]
    mode: Mode,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Aggressive,
    Conservative,
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleArg {
    MinMember,
    PerVertex,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl GraphArgs {
    fn family(&self) -> anyhow::Result<GraphFamily> {
        let n = self.n.context("--n is required with --family")?;
        let family = match self.family.context("either --graph or --family is required")? {
            FamilyArg::LineClique => GraphFamily::LineClique { n },
            FamilyArg::LineStar => GraphFamily::LineStar { n },
            FamilyArg::ErdosRenyi => GraphFamily::ErdosRenyi { n, p: self.p.context("--p is required")? },
            FamilyArg::BarabasiAlbert => GraphFamily::BarabasiAlbert { n, m: self.m },
            FamilyArg::Geometric => GraphFamily::Geometric { n, d: self.d.context("--d is required")? },
        };
        Ok(family)
    }

    fn load(&self) -> anyhow::Result<ConflictGraph> {
        match &self.graph {
            Some(path) => graph_io::read_edge_list(path)
                .with_context(|| format!("reading {}", path.display())),
            None => Ok(GenSpec::new(self.family()?, self.seed).generate()?.graph),
        }
    }
}

impl SelectArgs {
    fn run(&self, g: &ConflictGraph) -> Result<SelectionResult, Error> {
        let temp = temp_graph(g, self.rho)?;
        match self.mode {
            Mode::Aggressive => aggressive_centralized(&temp, g, self.rho),
            Mode::Conservative => conservative_select(&temp, g, self.rho),
        }
    }
}

fn sink(out: &Option<PathBuf>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("creating {}", path.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit(out: &Option<PathBuf>, text: &str) -> anyhow::Result<()> {
    let mut w = sink(out)?;
    w.write_all(text.as_bytes())?;
    w.flush()?;
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global()?;
    }
    match cli.command {
        Command::Generate { graph, dot, out } => {
            let g = graph.load()?;
            let text = if dot { graph_io::graph_to_dot(&g) } else { graph_io::write_edge_list(&g) };
            emit(&out, &text)
        }
        Command::Cliques { graph, rho, format, out } => {
            let g = graph.load()?;
            let cliques = enumerate_r_cliques(&g, rho)?;
            let text = match format {
                Format::Json => {
                    let list: Vec<_> = cliques
                        .iter()
                        .map(|c| json!({"order": c.order, "members": c.members.iter().map(|m| m.label()).collect::<Vec<_>>()}))
                        .collect();
                    serde_json::to_string_pretty(&list)? + "\n"
                }
                Format::Csv => {
                    let mut s = String::from("order,members\n");
                    for c in &cliques {
                        s.push_str(&format!("{},\"{}\"\n", c.order, c.label()));
                    }
                    s
                }
            };
            emit(&out, &text)
        }
        Command::Select { graph, sel, user, dot, out } => {
            let g = graph.load()?;
            let result = match user {
                Some(label) => {
                    if sel.mode != Mode::Aggressive {
                        bail!("--user is only supported for the aggressive selection");
                    }
                    let v = UserId::from_label(label).context("users are numbered from 1")?;
                    selection::aggressive_distributed(&g, v, sel.rho)?
                }
                None => sel.run(&g)?,
            };
            let text = if dot {
                result.consolidated.to_dot()
            } else {
                serde_json::to_string_pretty(&result.to_json())? + "\n"
            };
            emit(&out, &text)
        }
        Command::Schedule { graph, sel, epsilon, nbar, k_cap, vector_rule, vector_seed, format, out } => {
            let g = graph.load()?;
            let result = sel.run(&g)?;
            let nbar = nbar.unwrap_or(g.n()).max(2);
            let k = scheduler::kuhn_k_capped(nbar, epsilon, k_cap)?;
            let rule = match vector_rule {
                RuleArg::MinMember => VectorRule::MinMember,
                RuleArg::PerVertex => VectorRule::PerVertex,
            };
            let assign = scheduler::schedule_with(&result.consolidated, k, nbar, vector_seed, rule)?;
            if !assign.is_proper(&result.consolidated) {
                return Err(Error::Invariant("multicoloring is not proper".into()).into());
            }
            let empirical = metrics::alpha_empirical(&assign, &result).ideal_f64();
            let text = match format {
                Format::Csv => {
                    eprintln!("k = {k}, empirical alpha = {empirical:.6}");
                    assign.to_csv(&result.consolidated)
                }
                Format::Json => {
                    let vertices: Vec<_> = result
                        .consolidated
                        .vertices()
                        .iter()
                        .enumerate()
                        .map(|(i, v)| json!({"vertex": v.label(), "acquired": assign.count(i)}))
                        .collect();
                    serde_json::to_string_pretty(&json!({"k": k, "alpha_empirical": empirical, "vertices": vertices}))? + "\n"
                }
            };
            emit(&out, &text)
        }
        Command::Experiment { config, preset, list_presets, seed, format, summary, out } => {
            if list_presets {
                let names: Vec<_> = experiment::figure_recipes().into_iter().map(|(n, _)| n).collect();
                return emit(&out, &(names.join("\n") + "\n"));
            }
            let mut cfg = match (config, preset) {
                (Some(path), _) => ExperimentConfig::load(&path)
                    .with_context(|| format!("loading {}", path.display()))?,
                (None, Some(name)) => experiment::figure_recipe(&name)?,
                (None, None) => bail!("--config or --preset is required"),
            };
            if let Some(s) = seed {
                cfg.master_seed = s;
            }
            let rows = experiment::run_experiment(&cfg)?;
            let target = out.or_else(|| cfg.output.clone());
            let mut w = sink(&target)?;
            match (summary, format) {
                (false, Format::Csv) => experiment::write_csv(&rows, &mut w)?,
                (false, Format::Json) => experiment::write_json(&rows, &mut w)?,
                (true, Format::Csv) => experiment::write_csv(&experiment::summarize(&rows), &mut w)?,
                (true, Format::Json) => experiment::write_json(&experiment::summarize(&rows), &mut w)?,
            }
            w.flush()?;
            Ok(())
        }
        Command::Check { graph, rho } => {
            let g = graph.load()?;
            let report = selection::check_view_consistency(&g, rho)?;
            println!(
                "view consistency: {} views, {} vertices, {}",
                report.views_checked,
                report.vertices_checked,
                if report.passed() { "ok" } else { "DIVERGED" }
            );
            if let Some(d) = &report.divergence {
                return Err(Error::Invariant(format!("user {} disagrees on {:?}: {}", d.user, d.vertex, d.detail)).into());
            }
            let temp = temp_graph(&g, rho)?;
            let agg = aggressive_centralized(&temp, &g, rho)?;
            selection::verify_aggressive(&agg, &g)?;
            let con = conservative_select(&temp, &g, rho)?;
            selection::verify_conservative(&con, &g)?;
            if metrics::alpha_conservative(&con, 0.0).ideal < metrics::alpha_dc(&g).ideal {
                return Err(Error::Invariant("conservative alpha below distributed coloring".into()).into());
            }
            println!("aggressive selection: ok ({} vertices)", agg.consolidated.len());
            println!("conservative selection: ok ({} vertices)", con.consolidated.len());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            match err.downcast_ref::<Error>() {
                Some(Error::Invariant(_)) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
