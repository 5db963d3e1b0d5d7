use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use tailgraph::analysis::{
    build_report, compare_stage, degree_stage, diameter_stage, fit_stage, hopplot_stage, ComparisonTable, ComponentStats,
    FitRecord, FitSettings, HopPlotRecord, ReportSettings,
};
use tailgraph::io::{self as tio, EdgeListOptions};
use tailgraph::plot;
use tailgraph_core::aggregation::{aggregate_graph, parse_url_host, GroupMap, SuffixRules};
use tailgraph_core::components::ComponentSummary;
use tailgraph_core::distances::AnfOptions;
use tailgraph_core::tailfit::{EmpiricalDistribution, FitOptions, Formalism};
use tailgraph_core::{AdjacencyGraph, Direction, SelfLoopPolicy};

#[derive(Parser)]
#[command(name = "tailgraph", version, about = "Structure and heavy-tail analysis of large directed graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Read an edge list and write it back in canonical form with its label map.
    Ingest(IngestArgs),
    /// Collapse a URL or host graph to hosts, pay-level domains or explicit groups.
    Aggregate(AggregateArgs),
    /// Degree distribution with frequency and CCDF plot data.
    Degrees(DegreesArgs),
    /// Strongly and weakly connected components.
    Components(GraphArgs),
    /// Approximate neighbourhood function and effective diameter.
    Hopplot(HopplotArgs),
    /// Effective diameter and sampled-BFS lower bound on the full diameter.
    Diameter(DiameterArgs),
    /// Power-law tail fit with bootstrap goodness of fit.
    Fit(FitArgs),
    /// Likelihood-ratio comparison of the power law against alternative tails.
    Compare(CompareArgs),
    /// The whole pipeline, with one JSON report and plot data.
    Report(ReportArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum DirectionArg {
    In,
    Out,
    Total,
}

impl From<DirectionArg> for Direction {
    fn from(d: DirectionArg) -> Self {
        match d {
            DirectionArg::In => Direction::In,
            DirectionArg::Out => Direction::Out,
            DirectionArg::Total => Direction::Total,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormalismArg {
    Discrete,
    Continuous,
}

impl From<FormalismArg> for Formalism {
    fn from(f: FormalismArg) -> Self {
        match f {
            FormalismArg::Discrete => Formalism::Discrete,
            FormalismArg::Continuous => Formalism::Continuous,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SelfLoopsArg {
    Keep,
    Drop,
}

impl From<SelfLoopsArg> for SelfLoopPolicy {
    fn from(s: SelfLoopsArg) -> Self {
        match s {
            SelfLoopsArg::Keep => SelfLoopPolicy::Keep,
            SelfLoopsArg::Drop => SelfLoopPolicy::Drop,
        }
    }
}

#[derive(Args)]
struct GraphArgs {
    /// Edge list, `src<TAB>dst` per line, optionally gzip-compressed.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    #[arg(long, value_enum, default_value = "keep")]
    self_loops: SelfLoopsArg,
}

impl GraphArgs {
    fn load(&self) -> Result<AdjacencyGraph> {
        Ok(self.load_full()?.graph)
    }

    fn load_full(&self) -> Result<tio::LoadedGraph> {
        require(&self.input, "input edge list")?;
        let opts = EdgeListOptions { dedup: true, self_loops: self.self_loops.into() };
        tio::load_edge_list(&self.input, opts).with_context(|| format!("loading edge list {}", self.input.display()))
    }
}

#[derive(Args)]
struct IngestArgs {
    #[command(flatten)]
    graph: GraphArgs,
}

#[derive(Args)]
struct AggregateArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Public suffix list; groups hosts by pay-level domain.
    #[arg(long, conflicts_with = "groups")]
    psl: Option<PathBuf>,
    /// Explicit `node_label<TAB>group_label` map.
    #[arg(long)]
    groups: Option<PathBuf>,
}

#[derive(Args)]
struct DegreesArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long, value_enum)]
    direction: DirectionArg,
    /// Plot the zero bin at abscissa 0.1, tagged `zero`.
    #[arg(long)]
    zero_shift: bool,
}

#[derive(Args)]
struct AnfArgs {
    #[arg(long, default_value_t = AnfOptions::default().trials)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.9)]
    quantile: f64,
    /// Ignore arc direction.
    #[arg(long)]
    undirected: bool,
}

impl AnfArgs {
    fn options(&self) -> AnfOptions {
        AnfOptions { trials: self.trials, seed: self.seed, undirected: self.undirected, ..AnfOptions::default() }
    }
}

#[derive(Args)]
struct HopplotArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    anf: AnfArgs,
}

#[derive(Args)]
struct DiameterArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    anf: AnfArgs,
    /// BFS start nodes for the full-diameter lower bound.
    #[arg(long, default_value_t = 10_000)]
    bfs_sample: usize,
}

#[derive(Args)]
struct DistributionArgs {
    /// Frequency file (`value<TAB>count` or one value per line), or an edge
    /// list when `--direction` is given.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    /// Analyse this degree distribution of the edge list given as input.
    #[arg(long, value_enum)]
    direction: Option<DirectionArg>,
    #[arg(long, value_enum, default_value = "keep")]
    self_loops: SelfLoopsArg,
    #[arg(long, value_enum, default_value = "discrete")]
    formalism: FormalismArg,
    /// Smallest tail admitted by the cutoff scan.
    #[arg(long, default_value_t = FitOptions::default().min_tail)]
    min_tail: u64,
}

impl DistributionArgs {
    fn load(&self) -> Result<EmpiricalDistribution> {
        match self.direction {
            Some(dir) => {
                let g = GraphArgs { input: self.input.clone(), output: self.output.clone(), self_loops: self.self_loops }.load()?;
                Ok(degree_stage(&g, dir.into()).0)
            }
            None => {
                require(&self.input, "input distribution")?;
                tio::load_distribution(&self.input).with_context(|| format!("loading distribution {}", self.input.display()))
            }
        }
    }

    fn formalism(&self) -> Formalism {
        self.formalism.into()
    }
}

#[derive(Args)]
struct FitArgs {
    #[command(flatten)]
    dist: DistributionArgs,
    /// Bootstrap replicates; 0 skips the goodness-of-fit test.
    #[arg(long, default_value_t = 2500)]
    sims: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    dist: DistributionArgs,
    /// Power-law fit to compare against; defaults to `fit_<formalism>.json`
    /// in the output directory, refitting without bootstrap when absent.
    #[arg(long)]
    fit: Option<PathBuf>,
    /// Let every alternative select its own cutoff by KS distance.
    #[arg(long)]
    reestimate_xmin: bool,
}

#[derive(Args)]
struct ReportArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long, default_value_t = 2500)]
    sims: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = AnfOptions::default().trials)]
    trials: usize,
    #[arg(long, default_value_t = 0.9)]
    quantile: f64,
    #[arg(long, default_value_t = 10_000)]
    bfs_sample: usize,
    #[arg(long, default_value_t = FitOptions::default().min_tail)]
    min_tail: u64,
    #[arg(long)]
    zero_shift: bool,
}

fn require(path: &Path, what: &str) -> Result<()> {
    if !path.exists() {
        bail!("missing {what}: {} does not exist", path.display());
    }
    Ok(())
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut w = tio::create_output(path).with_context(|| format!("creating {}", path.display()))?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn write_with(path: &Path, f: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<()> {
    let mut w = tio::create_output(path).with_context(|| format!("creating {}", path.display()))?;
    f(&mut w).with_context(|| format!("writing {}", path.display()))?;
    w.flush()?;
    Ok(())
}

/// `<stem>.tsv`, `<stem>_freq.tsv` and `<stem>_ccdf.tsv`.
fn write_distribution_files(dir: &Path, stem: &str, d: &EmpiricalDistribution, zero_shift: bool) -> Result<()> {
    write_with(&dir.join(format!("{stem}.tsv")), |w| tio::write_distribution(d, w))?;
    write_with(&dir.join(format!("{stem}_freq.tsv")), |w| plot::write_frequency(d, zero_shift, w))?;
    write_with(&dir.join(format!("{stem}_ccdf.tsv")), |w| plot::write_ccdf(d, zero_shift, w))
}

fn write_graph(dir: &Path, g: &AdjacencyGraph) -> Result<()> {
    write_with(&dir.join("graph.tsv"), |w| tio::write_edge_list(g, w))?;
    write_with(&dir.join("labels.tsv"), |w| tio::write_label_map(g, w))
}

fn write_components(dir: &Path, g: &AdjacencyGraph, scc: &ComponentSummary, wcc: &ComponentSummary, zero_shift: bool) -> Result<()> {
    for s in [scc, wcc] {
        let kind = s.kind.as_str();
        write_with(&dir.join(format!("{kind}_assignment.tsv")), |w| tio::write_assignment(g, &s.assignment, w))?;
        write_distribution_files(dir, &format!("{kind}_sizes"), &s.size_distribution(), zero_shift)?;
    }
    write_json(&dir.join("components.json"), &[ComponentStats::from(scc), ComponentStats::from(wcc)])
}

fn write_hopplot(dir: &Path, hop: &HopPlotRecord) -> Result<()> {
    write_with(&dir.join("hopplot.tsv"), |w| {
        writeln!(w, "# h\tN(h)")?;
        for (h, n) in hop.counts.iter().enumerate() {
            writeln!(w, "{h}\t{n}")?;
        }
        Ok(())
    })?;
    write_json(&dir.join("hopplot.json"), hop)
}

/// `model,R,q,verdict` rows, one per alternative.
fn write_comparison_csv(path: &Path, t: &ComparisonTable) -> Result<()> {
    let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
    write_with(path, |w| {
        writeln!(w, "model,R,q,verdict")?;
        for a in &t.alternatives {
            let verdict = a.support.as_deref().unwrap_or("error");
            writeln!(w, "{},{},{},{}", a.model, opt(a.r), opt(a.q), verdict)?;
        }
        Ok(())
    })
}

fn write_comparisons(dir: &Path, stem: &str, t: &ComparisonTable) -> Result<()> {
    write_json(&dir.join(format!("{stem}.json")), t)?;
    write_comparison_csv(&dir.join(format!("{stem}.csv")), t)
}

/// The host of a URL label, or the label itself lowercased when it has no scheme.
fn host_of(label: &str) -> Result<String> {
    if label.contains("://") {
        Ok(parse_url_host(label)?)
    } else {
        Ok(label.trim_end_matches('.').to_ascii_lowercase())
    }
}

#[derive(Serialize)]
struct IngestSummary<'a> {
    input: &'a str,
    records: u64,
    nodes: usize,
    arcs: usize,
    self_loops_dropped: u64,
}

#[derive(Serialize)]
struct AggregateSummary {
    level: &'static str,
    input_nodes: usize,
    input_arcs: usize,
    groups: usize,
    arcs: usize,
    /// Hosts that are themselves public suffixes and so form their own group.
    suffix_hosts: u64,
}

fn file_name(p: &Path) -> String {
    p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default()
}

fn ingest(a: &IngestArgs) -> Result<()> {
    let loaded = a.graph.load_full()?;
    let dir = &a.graph.output;
    write_graph(dir, &loaded.graph)?;
    write_json(
        &dir.join("ingest.json"),
        &IngestSummary {
            input: &file_name(&a.graph.input),
            records: loaded.records,
            nodes: loaded.graph.node_count(),
            arcs: loaded.graph.arc_count(),
            self_loops_dropped: loaded.self_loops_dropped,
        },
    )
}

fn aggregate(a: &AggregateArgs) -> Result<()> {
    let g = a.graph.load()?;
    let (map, level, suffix_hosts) = if let Some(path) = &a.groups {
        require(path, "group map")?;
        let map = tio::read_group_map(tio::open_input(path)?, &g).with_context(|| format!("reading {}", path.display()))?;
        (map, "groups", 0)
    } else {
        let hosts: Vec<String> = g
            .nodes()
            .map(|u| host_of(&tio::node_label(&g, u)))
            .collect::<Result<_>>()
            .context("extracting hosts from node labels")?;
        match &a.psl {
            Some(path) => {
                require(path, "public suffix list")?;
                let rules = SuffixRules::parse(&tio::read_to_string(path)?);
                let (map, suffix_hosts) = GroupMap::by_pld(&hosts, &rules);
                (map, "pld", suffix_hosts)
            }
            None => (GroupMap::from_labels(&hosts), "host", 0),
        }
    };
    let q = aggregate_graph(&g, &map, a.graph.self_loops.into())?;
    let dir = &a.graph.output;
    write_graph(dir, &q)?;
    write_with(&dir.join("groups.tsv"), |w| {
        for u in g.nodes() {
            writeln!(w, "{}\t{}", tio::node_label(&g, u), map.labels()[map.assignment()[u as usize] as usize])?;
        }
        Ok(())
    })?;
    write_json(
        &dir.join("aggregate.json"),
        &AggregateSummary {
            level,
            input_nodes: g.node_count(),
            input_arcs: g.arc_count(),
            groups: q.node_count(),
            arcs: q.arc_count(),
            suffix_hosts,
        },
    )
}

fn degrees(a: &DegreesArgs) -> Result<()> {
    let g = a.graph.load()?;
    let (d, stats) = degree_stage(&g, a.direction.into());
    let dir = &a.graph.output;
    let stem = format!("degrees_{}", stats.direction);
    write_distribution_files(dir, &stem, &d, a.zero_shift)?;
    write_json(&dir.join(format!("{stem}.json")), &stats)
}

fn components(a: &GraphArgs) -> Result<()> {
    let g = a.load()?;
    let (scc, wcc) = tailgraph::analysis::component_stage(&g);
    write_components(&a.output, &g, &scc, &wcc, false)
}

fn hopplot(a: &HopplotArgs) -> Result<()> {
    let g = a.graph.load()?;
    let (_, hop) = hopplot_stage(&g, &a.anf.options(), a.anf.quantile)?;
    write_hopplot(&a.graph.output, &hop)
}

/// Reuses `hopplot.json` from the output directory when its settings match,
/// so the diameter artifact agrees with the hop plot it sits next to.
fn diameter(a: &DiameterArgs) -> Result<()> {
    let g = a.graph.load()?;
    let dir = &a.graph.output;
    let cached = dir.join("hopplot.json");
    let opts = a.anf.options();
    let reusable = fs::read_to_string(&cached)
        .ok()
        .and_then(|s| serde_json::from_str::<HopPlotRecord>(&s).ok())
        .filter(|h| h.trials == opts.trials && h.seed == opts.seed && h.quantile == a.anf.quantile && !a.anf.undirected);
    let hop = match reusable {
        Some(h) => h,
        None => hopplot_stage(&g, &opts, a.anf.quantile)?.1,
    };
    let record = diameter_stage(&g, &hop, a.bfs_sample, a.anf.seed)?;
    write_json(&dir.join("diameter.json"), &record)
}

fn fit(a: &FitArgs) -> Result<()> {
    let d = a.dist.load()?;
    let s = FitSettings { sims: a.sims, seed: a.seed, fit: FitOptions { min_tail: a.dist.min_tail } };
    let fit = fit_stage(&d, a.dist.formalism(), &s).context("fitting power law")?;
    let record = FitRecord::new(&fit, a.seed);
    write_json(&a.dist.output.join(format!("fit_{}.json", record.formalism)), &record)
}

fn compare(a: &CompareArgs) -> Result<()> {
    let d = a.dist.load()?;
    let formalism = a.dist.formalism();
    let fit_path = a.fit.clone().unwrap_or_else(|| a.dist.output.join(format!("fit_{}.json", formalism.as_str())));
    if a.fit.is_some() {
        require(&fit_path, "power-law fit")?;
    }
    let fit = if fit_path.exists() {
        let record: FitRecord = serde_json::from_str(&tio::read_to_string(&fit_path)?)
            .with_context(|| format!("parsing {}", fit_path.display()))?;
        if record.formalism != formalism.as_str() {
            bail!("{} holds a {} fit, expected {}", fit_path.display(), record.formalism, formalism.as_str());
        }
        record.to_fit_result()?
    } else {
        let s = FitSettings { sims: 0, seed: 0, fit: FitOptions { min_tail: a.dist.min_tail } };
        fit_stage(&d, formalism, &s).context("fitting power law")?
    };
    let opts = FitOptions { min_tail: a.dist.min_tail };
    let table = compare_stage(&d, &fit, a.reestimate_xmin.then_some(&opts));
    write_comparisons(&a.dist.output, &format!("comparisons_{}", formalism.as_str()), &table)
}

/// Runs every stage and writes their artifacts next to `report.json`; the
/// report embeds the same records, so each number has a stage artifact.
fn report(a: &ReportArgs) -> Result<()> {
    let g = a.graph.load()?;
    let settings = ReportSettings {
        sims: a.sims,
        seed: a.seed,
        min_tail: a.min_tail,
        trials: a.trials,
        bias_bits: AnfOptions::default().bias_bits,
        quantile: a.quantile,
        bfs_sample: a.bfs_sample,
    };
    let parts = build_report(&g, &file_name(&a.graph.input), &settings)?;
    let dir = &a.graph.output;
    for ((name, d), analysis) in parts.distributions.iter().zip(&parts.report.distributions) {
        // component size files come from write_components below
        if !matches!(name.as_str(), "scc" | "wcc") {
            write_distribution_files(dir, name, d, a.zero_shift)?;
        }
        for (f, fa) in [("discrete", &analysis.discrete), ("continuous", &analysis.continuous)] {
            if let Some(fit) = &fa.fit {
                write_json(&dir.join(format!("fit_{name}_{f}.json")), fit)?;
            }
            if let Some(t) = &fa.comparisons {
                write_comparisons(dir, &format!("comparisons_{name}_{f}"), t)?;
            }
        }
    }
    write_components(dir, &g, &parts.scc, &parts.wcc, a.zero_shift)?;
    write_hopplot(dir, &parts.report.hopplot)?;
    write_json(&dir.join("diameter.json"), &parts.report.distances)?;
    write_json(&dir.join("report.json"), &parts.report)
}

fn run(cli: &Cli) -> Result<()> {
    tailgraph::init_threads()?;
    match &cli.command {
        Command::Ingest(a) => ingest(a),
        Command::Aggregate(a) => aggregate(a),
        Command::Degrees(a) => degrees(a),
        Command::Components(a) => components(a),
        Command::Hopplot(a) => hopplot(a),
        Command::Diameter(a) => diameter(a),
        Command::Fit(a) => fit(a),
        Command::Compare(a) => compare(a),
        Command::Report(a) => report(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tailgraph: {e:#}");
            ExitCode::FAILURE
        }
    }
}
