use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::Args;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use gbary::barycenter::EDGE_DROP_TOL;
use gbary::baselines::KarcherConfig;
use gbary::graphs::{balanced_partition, generate_line_communities, generate_multilayer_sbm, generate_sbm, perturb_edges};
use gbary::io::{format_edge_list, format_graph, parse_labels, read_graph, GraphFormat};
use gbary::learn::{
    community_count_dataset, fusion_experiment, kmeans_graphs, kmeans_laplacians, nearest_centroid_classify, nmi,
    paired_distance, ssl_classify, stratified_observed, trial_seeds, two_class_sbm_dataset, FusionErrors, KMeansConfig,
    SslProblem,
};
use gbary::{
    bw_mean, interpolate, mean_of, BarycenterProblem, DistanceKind, FixedPointConfig, Graph, Init, MeanConfig, MeanKind,
    MultiLayerGraph, SymMatrix, Weights,
};

use crate::table::{config_hash, num, ResultTable};
use crate::CliError;

pub enum Output {
    Table(ResultTable),
    Text(String),
}

type CmdResult = Result<Output, CliError>;

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Invalid(msg.into())
}

fn parse<T: std::str::FromStr<Err = gbary::Error>>(s: &str) -> Result<T, CliError> {
    s.parse().map_err(CliError::Core)
}

fn parse_kinds(names: &[String]) -> Result<Vec<MeanKind>, CliError> {
    if names.is_empty() {
        return Err(invalid("at least one mean kind is required"));
    }
    names.iter().map(|s| parse(s)).collect()
}

fn table(command: &str, params: &impl Serialize, seed: Option<u64>, columns: &[&str]) -> ResultTable {
    let mut t = ResultTable::new(columns);
    t.meta("command", command);
    t.meta("seed", seed.map_or("none".to_string(), |s| s.to_string()));
    t.meta("config_hash", config_hash(command, params));
    t
}

/// CSV cell for free text: quoted when it would break the row.
fn text_cell(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn read_all(paths: &[PathBuf]) -> Result<Vec<Graph>, CliError> {
    paths
        .iter()
        .map(|p| read_graph(p).map_err(|e| invalid(format!("{}: {e}", p.display()))))
        .collect()
}

/// Inputs must describe the same labeled node set.
fn check_aligned(graphs: &[Graph]) -> Result<(), CliError> {
    let first = &graphs[0];
    for (i, g) in graphs.iter().enumerate().skip(1) {
        if g.num_nodes() != first.num_nodes() {
            return Err(invalid(format!("input {i} has {} nodes, input 0 has {}", g.num_nodes(), first.num_nodes())));
        }
        if g.node_labels() != first.node_labels() {
            return Err(invalid(format!("input {i} has different node labels than input 0")));
        }
    }
    Ok(())
}

fn edge_rows(t: &mut ResultTable, g: &Graph, prefix: &[String]) {
    for e in g.edges() {
        let mut row = prefix.to_vec();
        row.extend([e.i.to_string(), e.j.to_string(), num(e.weight)]);
        t.push(row);
    }
}

#[derive(Args, Serialize, Deserialize, Debug, Clone)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct GenerateArgs {
    /// sbm | line | perturb
    #[arg(long, default_value = "sbm")]
    pub kind: String,
    #[arg(long, default_value_t = 50)]
    pub nodes: usize,
    #[arg(long, default_value_t = 5)]
    pub communities: usize,
    #[arg(long, default_value_t = 0.3)]
    pub p_in: f64,
    #[arg(long, default_value_t = 0.1)]
    pub p_out: f64,
    /// Graph to perturb (kind = perturb).
    #[arg(long)]
    pub base: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    pub remove: usize,
    #[arg(long, default_value_t = 10)]
    pub add: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// tsv | laplacian | adjacency
    #[arg(long, default_value = "tsv")]
    pub format: String,
}

pub fn generate(a: &GenerateArgs) -> CmdResult {
    let format: GraphFormat = parse(&a.format)?;
    let g = match a.kind.as_str() {
        "sbm" => generate_sbm(&balanced_partition(a.nodes, a.communities)?, a.p_in, a.p_out, a.seed)?,
        "line" => generate_line_communities(a.nodes, a.communities, a.p_in, a.seed)?,
        "perturb" => {
            let base = a.base.as_ref().ok_or_else(|| invalid("--base is required for kind perturb"))?;
            perturb_edges(&read_all(std::slice::from_ref(base))?[0], a.remove, a.add, a.seed)?
        }
        other => return Err(invalid(format!("unknown graph kind `{other}` (sbm, line, perturb)"))),
    };
    if format != GraphFormat::EdgeList {
        return Ok(Output::Text(format_graph(&g, format)));
    }
    // Provenance goes in comment lines after the node-count header.
    let text = format_edge_list(&g);
    let (header, body) = text.split_once('\n').expect("edge list has a header");
    Ok(Output::Text(format!(
        "{header}\n# seed={}\n# config_hash={}\n{body}",
        a.seed,
        config_hash("generate", a)
    )))
}

#[derive(Args, Serialize, Deserialize, Debug, Clone)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct MeanArgs {
    /// Graph files (edge-list TSV or tagged dense CSV).
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Comma-separated positive weights, normalized to sum to 1 (default uniform).
    #[arg(long, value_delimiter = ',')]
    pub weights: Option<Vec<f64>>,
    /// bw, bw:<filter>, arithmetic, harmonic, power:<p>, karcher
    #[arg(long, default_value = "bw")]
    pub kind: String,
    /// Fixed-point step tolerance.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, default_value_t = 100)]
    pub max_iter: usize,
    /// Fixed-point start: arithmetic | first
    #[arg(long, default_value = "arithmetic")]
    pub init: String,
    /// Eigenvalue shift for power means (default ln(1+|p|) for p < 0, else 0).
    #[arg(long)]
    pub power_shift: Option<f64>,
    /// Also write the mean graph to this file.
    #[arg(long)]
    pub graph_out: Option<PathBuf>,
    /// Format of --graph-out: tsv | laplacian | adjacency
    #[arg(long, default_value = "tsv")]
    pub format: String,
}

pub fn mean(a: &MeanArgs) -> CmdResult {
    let graphs = read_all(&a.inputs)?;
    check_aligned(&graphs)?;
    let weights = match &a.weights {
        Some(w) if w.len() != graphs.len() => {
            return Err(invalid(format!("{} weights for {} inputs", w.len(), graphs.len())))
        }
        Some(w) => Weights::new(w.clone())?,
        None => Weights::uniform(graphs.len())?,
    };
    let kind: MeanKind = parse(&a.kind)?;
    let init = match a.init.as_str() {
        "arithmetic" => Init::ArithmeticEmbedding,
        "first" => Init::FirstEmbedding,
        other => return Err(invalid(format!("unknown init `{other}` (arithmetic, first)"))),
    };
    let fixed_point = FixedPointConfig { tol: a.tol, max_iter: a.max_iter, init };
    let mut t = table("mean", a, None, &["u", "v", "weight"]);
    t.meta("kind", kind);
    let mean_graph = match kind {
        MeanKind::BuresWasserstein(filter) => {
            let report = bw_mean(&BarycenterProblem::from_graphs(&graphs, weights, filter)?, &fixed_point)?;
            t.meta("iterations", report.iterations);
            t.meta("final_step", num(report.final_step));
            t.meta("residual", num(report.residual));
            report.mean_graph
        }
        _ => {
            let cfg = MeanConfig {
                fixed_point,
                karcher: KarcherConfig { tol: a.tol, ..Default::default() },
                power_shift: a.power_shift,
                ..Default::default()
            };
            let ls: Vec<SymMatrix> = graphs.iter().map(|g| g.laplacian().into_matrix()).collect();
            Graph::from_laplacian(&mean_of(&ls, &weights, kind, &cfg)?, EDGE_DROP_TOL)?
        }
    };
    let mean_graph = mean_graph.with_labels(graphs[0].node_labels().to_vec())?;
    edge_rows(&mut t, &mean_graph, &[]);
    if let Some(path) = &a.graph_out {
        gbary::io::write_graph(&mean_graph, path, parse(&a.format)?)
            .map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    }
    Ok(Output::Table(t))
}

#[derive(Args, Serialize, Deserialize, Debug, Clone)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct DistanceArgs {
    /// Two or more graph files; every pair is reported.
    #[arg(required = true, num_args = 2..)]
    pub inputs: Vec<PathBuf>,
    /// bw, bw:<filter>, frobenius, frobenius-pinv
    #[arg(long, default_value = "bw")]
    pub kind: String,
}

pub fn distance(a: &DistanceArgs) -> CmdResult {
    if a.inputs.len() < 2 {
        return Err(invalid("distance needs at least two inputs"));
    }
    let graphs = read_all(&a.inputs)?;
    check_aligned(&graphs)?;
    let kind: DistanceKind = parse(&a.kind)?;
    let table_d = gbary::pairwise_distances(&graphs, kind)?;
    let mut t = table("distance", a, None, &["i", "j", "source", "target", "distance"]);
    t.meta("kind", kind);
    for i in 0..graphs.len() {
        for j in (i + 1)..graphs.len() {
            t.push(vec![
                i.to_string(),
                j.to_string(),
                text_cell(&a.inputs[i].display().to_string()),
                text_cell(&a.inputs[j].display().to_string()),
                num(table_d[(i, j)]),
            ]);
        }
    }
    Ok(Output::Table(t))
}

#[derive(Args, Serialize, Deserialize, Debug, Clone)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct InterpolateArgs {
    /// Start and end graph.
    #[arg(required = true, num_args = 2)]
    pub inputs: Vec<PathBuf>,
    /// Comma-separated times in [0, 1].
    #[arg(long, value_delimiter = ',', default_value = "0.5")]
    pub t: Vec<f64>,
    /// Use the evenly spaced times k/steps, k = 0..=steps, instead of --t.
    #[arg(long)]
    pub steps: Option<usize>,
}

pub fn interpolate_path(a: &InterpolateArgs) -> CmdResult {
    if a.inputs.len() != 2 {
        return Err(invalid("interpolate needs exactly two inputs"));
    }
    let graphs = read_all(&a.inputs)?;
    check_aligned(&graphs)?;
    let times: Vec<f64> = match a.steps {
        Some(0) => return Err(invalid("--steps must be at least 1")),
        Some(s) => (0..=s).map(|k| k as f64 / s as f64).collect(),
        None => a.t.clone(),
    };
    let points = times
        .par_iter()
        .map(|&t| interpolate(&graphs[0], &graphs[1], t))
        .collect::<gbary::Result<Vec<_>>>()?;
    let mut t = table("interpolate", a, None, &["t", "u", "v", "weight"]);
    for (time, g) in times.iter().zip(&points) {
        edge_rows(&mut t, g, &[num(*time)]);
    }
    Ok(Output::Table(t))
}

#[derive(Args, Serialize, Deserialize, Debug, Clone)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ClusterArgs {
    /// Graph files to cluster; without inputs the synthetic protocol runs
    /// (class c = line of c+1 communities).
    pub inputs: Vec<PathBuf>,
    /// Number of clusters (required with inputs; synthetic runs use --classes).
    #[arg(long)]
    pub k: Option<usize>,
    /// Comma-separated means, each paired with its natural distance.
    #[arg(long, value_delimiter = ',', default_value = "bw,arithmetic,harmonic")]
    pub means: Vec<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Synthetic repetitions (fresh dataset and seeding each).
    #[arg(long, default_value_t = 10)]
    pub repeats: usize,
    #[arg(long, default_value_t = 50)]
    pub nodes: usize,
    #[arg(long, default_value_t = 5)]
    pub classes: usize,
    #[arg(long, default_value_t = 0.2)]
    pub p_in: f64,
    #[arg(long, default_value_t = 20)]
    pub per_class: usize,
    #[arg(long, default_value_t = 5)]
    pub n_init: usize,
    #[arg(long, default_value_t = 50)]
    pub max_iter: usize,
}

pub fn cluster(a: &ClusterArgs) -> CmdResult {
    let kinds = parse_kinds(&a.means)?;
    let config = |k: usize, kind: MeanKind, seed: u64| KMeansConfig {
        max_iter: a.max_iter,
        n_init: a.n_init,
        ..KMeansConfig::paired(k, kind, seed)
    };
    if !a.inputs.is_empty() {
        let k = a.k.ok_or_else(|| invalid("--k is required when clustering input files"))?;
        let graphs = read_all(&a.inputs)?;
        check_aligned(&graphs)?;
        let ls: Vec<SymMatrix> = graphs.iter().map(|g| g.laplacian().into_matrix()).collect();
        let mut t = table("cluster", a, Some(a.seed), &["mean", "index", "file", "cluster"]);
        for kind in kinds {
            let r = kmeans_laplacians(&ls, &config(k, kind, a.seed))?;
            t.meta(&format!("inertia[{kind}]"), num(r.inertia));
            for (i, c) in r.assignment.iter().enumerate() {
                t.push(vec![kind.to_string(), i.to_string(), text_cell(&a.inputs[i].display().to_string()), c.to_string()]);
            }
        }
        return Ok(Output::Table(t));
    }
    let seeds = trial_seeds(a.seed, a.repeats);
    let rows = seeds
        .par_iter()
        .map(|&s| {
            let sub = trial_seeds(s, 2);
            let (graphs, labels) = community_count_dataset(a.nodes, a.classes, a.p_in, a.per_class, sub[0])?;
            kinds
                .iter()
                .map(|&kind| {
                    let r = kmeans_graphs(&graphs, &config(a.classes, kind, sub[1]))?;
                    Ok((kind, nmi(&r.assignment, &labels)?, r.inertia, r.iterations))
                })
                .collect::<gbary::Result<Vec<_>>>()
        })
        .collect::<gbary::Result<Vec<_>>>()?;
    let mut t = table("cluster", a, Some(a.seed), &["repeat", "trial_seed", "mean", "nmi", "inertia", "iterations"]);
    for (r, (s, per_kind)) in seeds.iter().zip(rows).enumerate() {
        for (kind, score, inertia, iterations) in per_kind {
            t.push(vec![r.to_string(), s.to_string(), kind.to_string(), num(score), num(inertia), iterations.to_string()]);
        }
    }
    Ok(Output::Table(t))
}

#[derive(Args, Serialize, Deserialize, Debug, Clone)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ClassifyArgs {
    #[arg(long, default_value_t = 30)]
    pub nodes: usize,
    #[arg(long, default_value_t = 3)]
    pub communities: usize,
    /// Within-community edge probability of class 0 and class 1.
    #[arg(long, value_delimiter = ',', default_value = "0.5,0.4")]
    pub p_in: Vec<f64>,
    #[arg(long, default_value_t = 0.05)]
    pub p_out: f64,
    #[arg(long, default_value_t = 10)]
    pub train_per_class: usize,
    #[arg(long, default_value_t = 20)]
    pub test_per_class: usize,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_delimiter = ',', default_value = "bw,arithmetic,harmonic")]
    pub means: Vec<String>,
}

pub fn classify(a: &ClassifyArgs) -> CmdResult {
    let kinds = parse_kinds(&a.means)?;
    let p_in: [f64; 2] = a.p_in.as_slice().try_into().map_err(|_| invalid("--p-in takes exactly two values"))?;
    let seeds = trial_seeds(a.seed, a.trials);
    let rows = seeds
        .par_iter()
        .map(|&s| {
            let sub = trial_seeds(s, 2);
            let (train, train_labels) =
                two_class_sbm_dataset(a.nodes, a.communities, p_in, a.p_out, a.train_per_class, sub[0])?;
            let (test, test_labels) = two_class_sbm_dataset(a.nodes, a.communities, p_in, a.p_out, a.test_per_class, sub[1])?;
            let lap = |gs: &[Graph]| gs.iter().map(|g| g.laplacian().into_matrix()).collect::<Vec<_>>();
            let (train, test) = (lap(&train), lap(&test));
            kinds
                .iter()
                .map(|&kind| {
                    let c = nearest_centroid_classify(&train, &train_labels, &test, kind, paired_distance(kind), &MeanConfig::default())?;
                    Ok((kind, c.misclassification_rate(&test_labels)?))
                })
                .collect::<gbary::Result<Vec<_>>>()
        })
        .collect::<gbary::Result<Vec<_>>>()?;
    let mut t = table("classify", a, Some(a.seed), &["trial", "trial_seed", "mean", "misclassification"]);
    for (i, (s, per_kind)) in seeds.iter().zip(rows).enumerate() {
        for (kind, rate) in per_kind {
            t.push(vec![i.to_string(), s.to_string(), kind.to_string(), num(rate)]);
        }
    }
    Ok(Output::Table(t))
}

#[derive(Args, Serialize, Deserialize, Debug, Clone)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct SslArgs {
    /// Layer graph files; without them the synthetic multi-layer SBM runs.
    #[arg(long, num_args = 1..)]
    pub layers: Vec<PathBuf>,
    /// Ground-truth node classes, one integer per line (required with --layers).
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[arg(long, default_value_t = 150)]
    pub nodes: usize,
    #[arg(long, default_value_t = 3)]
    pub classes: usize,
    /// Synthetic layers as comma-separated `p_in:p_out` pairs.
    #[arg(long, value_delimiter = ',', default_value = "0.12:0.03,0.07:0.04")]
    pub layer_sbm: Vec<String>,
    #[arg(long, default_value_t = 0.1)]
    pub observed_fraction: f64,
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    /// Regularization weight (default depends on the mean).
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long, value_delimiter = ',', default_value = "bw,arithmetic,harmonic,power:-10")]
    pub means: Vec<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

fn parse_layer_sbm(specs: &[String]) -> Result<Vec<(f64, f64)>, CliError> {
    specs
        .iter()
        .map(|s| {
            let (a, b) = s.split_once(':').ok_or_else(|| invalid(format!("layer `{s}` is not `p_in:p_out`")))?;
            let p = |x: &str| x.trim().parse::<f64>().map_err(|_| invalid(format!("bad probability `{x}` in `{s}`")));
            Ok((p(a)?, p(b)?))
        })
        .collect()
}

fn ssl_run(
    graph: &MultiLayerGraph,
    truth: &[usize],
    n_classes: usize,
    observed: &BTreeMap<usize, usize>,
    kinds: &[MeanKind],
    rho: Option<f64>,
) -> gbary::Result<Vec<(MeanKind, f64, f64, Vec<usize>)>> {
    kinds
        .iter()
        .map(|&kind| {
            let p = SslProblem::from_multilayer(graph, observed.clone(), n_classes, rho, kind)?;
            let r = ssl_classify(&p, &MeanConfig::default())?;
            Ok((kind, p.rho, r.unobserved_error(truth, observed)?, r.labels))
        })
        .collect()
}

pub fn ssl(a: &SslArgs) -> CmdResult {
    let kinds = parse_kinds(&a.means)?;
    if !a.layers.is_empty() {
        let path = a.labels.as_ref().ok_or_else(|| invalid("--labels is required with --layers"))?;
        let text = std::fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
        let truth = parse_labels(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
        let layers = read_all(&a.layers)?;
        check_aligned(&layers)?;
        let n_classes = truth.iter().max().map_or(0, |m| m + 1);
        let graph = MultiLayerGraph::new(layers, Some(truth.clone()))?;
        let observed = stratified_observed(&truth, a.observed_fraction, a.seed)?;
        let mut t = table("ssl", a, Some(a.seed), &["mean", "node", "truth", "observed", "predicted"]);
        for (kind, rho, error, labels) in ssl_run(&graph, &truth, n_classes, &observed, &kinds, a.rho)? {
            t.meta(&format!("rho[{kind}]"), num(rho));
            t.meta(&format!("error[{kind}]"), num(error));
            for (i, p) in labels.iter().enumerate() {
                let obs = u8::from(observed.contains_key(&i));
                t.push(vec![kind.to_string(), i.to_string(), truth[i].to_string(), obs.to_string(), p.to_string()]);
            }
        }
        return Ok(Output::Table(t));
    }
    let layer_params = parse_layer_sbm(&a.layer_sbm)?;
    let truth: Vec<usize> = balanced_partition(a.nodes, a.classes)?;
    let seeds = trial_seeds(a.seed, a.trials);
    let rows = seeds
        .par_iter()
        .map(|&s| {
            let sub = trial_seeds(s, 2);
            let graph = generate_multilayer_sbm(&truth, &layer_params, sub[0])?;
            let observed = stratified_observed(&truth, a.observed_fraction, sub[1])?;
            ssl_run(&graph, &truth, a.classes, &observed, &kinds, a.rho)
        })
        .collect::<gbary::Result<Vec<_>>>()?;
    let mut t = table("ssl", a, Some(a.seed), &["trial", "trial_seed", "mean", "rho", "error"]);
    for (i, (s, per_kind)) in seeds.iter().zip(rows).enumerate() {
        for (kind, rho, error, _) in per_kind {
            t.push(vec![i.to_string(), s.to_string(), kind.to_string(), num(rho), num(error)]);
        }
    }
    Ok(Output::Table(t))
}

#[derive(Args, Serialize, Deserialize, Debug, Clone)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct FuseArgs {
    #[arg(long, default_value_t = 50)]
    pub nodes: usize,
    #[arg(long, default_value_t = 5)]
    pub communities: usize,
    #[arg(long, default_value_t = 0.3)]
    pub p_in: f64,
    #[arg(long, default_value_t = 0.1)]
    pub p_out: f64,
    /// Perturbed copies averaged per trial.
    #[arg(long, default_value_t = 100)]
    pub graphs: usize,
    /// Edges removed and edges added per copy.
    #[arg(long, default_value_t = 10)]
    pub perturb: usize,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_delimiter = ',', default_value = "bw,arithmetic,harmonic,karcher")]
    pub means: Vec<String>,
}

pub fn fuse(a: &FuseArgs) -> CmdResult {
    let kinds = parse_kinds(&a.means)?;
    let partition = balanced_partition(a.nodes, a.communities)?;
    let seeds = trial_seeds(a.seed, a.trials);
    let reports = seeds
        .par_iter()
        .map(|&s| {
            let sub = trial_seeds(s, 2);
            let base = generate_sbm(&partition, a.p_in, a.p_out, sub[0])?;
            fusion_experiment(&base, &partition, a.graphs, a.perturb, &kinds, sub[1], &MeanConfig::default())
        })
        .collect::<gbary::Result<Vec<_>>>()?;
    let mut columns = vec!["trial", "trial_seed", "mean"];
    columns.extend(FusionErrors::NAMES);
    let mut t = table("fuse-experiment", a, Some(a.seed), &columns);
    let mut per_kind: Vec<Vec<FusionErrors>> = vec![Vec::new(); kinds.len()];
    for (i, (s, report)) in seeds.iter().zip(&reports).enumerate() {
        for (k, (kind, errors)) in report.rows.iter().enumerate() {
            per_kind[k].push(*errors);
            let mut row = vec![i.to_string(), s.to_string(), kind.to_string()];
            row.extend(errors.values().map(num));
            t.push(row);
        }
    }
    for (kind, rows) in kinds.iter().zip(&per_kind) {
        let mut row = vec!["average".to_string(), String::new(), kind.to_string()];
        row.extend(FusionErrors::average(rows).values().map(num));
        t.push(row);
    }
    Ok(Output::Table(t))
}
