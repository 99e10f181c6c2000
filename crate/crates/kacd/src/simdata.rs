//! Synthetic mixed-data generator: random DAGs, type assignment, forward
//! sampling through a conditional-linear-Gaussian scheme, latent masking
//! and grid generation with a deterministic manifest.

use std::path::Path;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Gumbel, StandardNormal};

use crate::graphs::{GraphKind, MixedGraph};
use crate::kernels::{Column, ColumnValues, DataType, Dataset};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TypeGroup {
    /// binary, ordinal, continuous
    Group1,
    /// categorical, binary, ordinal, continuous
    Group2,
}

impl TypeGroup {
    pub fn types(self) -> &'static [DataType] {
        match self {
            TypeGroup::Group1 => &[DataType::Binary, DataType::Ordinal, DataType::Continuous],
            TypeGroup::Group2 => &[
                DataType::Categorical,
                DataType::Binary,
                DataType::Ordinal,
                DataType::Continuous,
            ],
        }
    }

    pub fn id(self) -> u8 {
        match self {
            TypeGroup::Group1 => 1,
            TypeGroup::Group2 => 2,
        }
    }

    pub fn from_id(id: u8) -> Result<TypeGroup> {
        match id {
            1 => Ok(TypeGroup::Group1),
            2 => Ok(TypeGroup::Group2),
            other => Err(Error::Parameter(format!("unknown type group {other}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct GenConfig {
    pub p: usize,
    pub expected_degree: f64,
    pub group: TypeGroup,
    pub n: usize,
    pub seed: u64,
    pub ordinal_levels: usize,
    pub categorical_levels: usize,
    pub type_fraction_bounds: (f64, f64),
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            p: 10,
            expected_degree: 2.0,
            group: TypeGroup::Group2,
            n: 1000,
            seed: 0,
            ordinal_levels: 4,
            categorical_levels: 3,
            type_fraction_bounds: (0.15, 0.60),
        }
    }
}

// ---------------------------------------------------------------------------
// seeding

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Hierarchical sub-seed: mixes a base seed with a list of coordinates.
pub fn subseed(seed: u64, tags: &[u64]) -> u64 {
    let mut state = seed;
    let mut out = splitmix64(&mut state);
    for &t in tags {
        state = out ^ t.wrapping_mul(0xD1B54A32D192ED03);
        out = splitmix64(&mut state);
    }
    out
}

pub fn rng_from(seed: u64, tags: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(subseed(seed, tags))
}

// ---------------------------------------------------------------------------
// graph and type sampling

/// Random DAG: uniform topological order, each forward pair included
/// independently with probability expected_degree / (p - 1).
pub fn random_dag(p: usize, expected_degree: f64, rng: &mut impl Rng) -> Result<MixedGraph> {
    if p < 2 {
        return Err(Error::Parameter(format!("p must be >= 2, got {p}")));
    }
    if !(expected_degree >= 0.0) || expected_degree > (p - 1) as f64 {
        return Err(Error::Parameter(format!(
            "expected_degree {expected_degree} outside [0, p-1]"
        )));
    }
    let prob = expected_degree / (p - 1) as f64;
    let mut order: Vec<usize> = (0..p).collect();
    order.shuffle(rng);
    let mut dag = MixedGraph::with_node_count(GraphKind::Dag, p);
    for i in 0..p {
        for j in (i + 1)..p {
            if rng.gen_bool(prob) {
                dag.add_directed(order[i], order[j])?;
            }
        }
    }
    Ok(dag)
}

/// Sample per-type fractions on the simplex, rejecting until every fraction
/// lies in the given bounds, then round to counts >= 1 summing to p and
/// assign types to nodes uniformly at random.
pub fn assign_types(
    p: usize,
    group: TypeGroup,
    bounds: (f64, f64),
    rng: &mut impl Rng,
) -> Result<Vec<DataType>> {
    let types = group.types();
    let k = types.len();
    if p < k {
        return Err(Error::Input(format!(
            "p = {p} smaller than the {k} types of the group"
        )));
    }
    let (lo, hi) = bounds;
    if !(lo > 0.0 && hi < 1.0 && lo < hi) {
        return Err(Error::Parameter(format!("bad fraction bounds ({lo}, {hi})")));
    }

    // flat Dirichlet via normalized exponentials, rejected to the bounds
    let fractions = loop {
        let draws: Vec<f64> = (0..k).map(|_| -(rng.gen::<f64>().max(1e-300)).ln()).collect();
        let total: f64 = draws.iter().sum();
        let f: Vec<f64> = draws.iter().map(|d| d / total).collect();
        if f.iter().all(|&x| x >= lo && x <= hi) {
            break f;
        }
    };

    // largest-remainder rounding, then force every count >= 1
    let mut counts: Vec<usize> = fractions.iter().map(|f| (f * p as f64).floor() as usize).collect();
    let mut rem: Vec<(usize, f64)> = fractions
        .iter()
        .enumerate()
        .map(|(i, f)| (i, f * p as f64 - counts[i] as f64))
        .collect();
    rem.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    let mut deficit = p - counts.iter().sum::<usize>();
    for (i, _) in rem {
        if deficit == 0 {
            break;
        }
        counts[i] += 1;
        deficit -= 1;
    }
    for i in 0..k {
        while counts[i] == 0 {
            let donor = (0..k).max_by_key(|&j| counts[j]).unwrap();
            counts[donor] -= 1;
            counts[i] += 1;
        }
    }

    let mut assigned: Vec<DataType> = Vec::with_capacity(p);
    for (i, &t) in types.iter().enumerate() {
        assigned.extend(std::iter::repeat(t).take(counts[i]));
    }
    assigned.shuffle(rng);
    Ok(assigned)
}

// ---------------------------------------------------------------------------
// structural equation parameters

/// Mechanism of one node, keyed by its type and the types of its parents.
/// Discrete parents act through per-configuration intercepts or tables;
/// continuous parents act through linear weights.
#[derive(Debug, Clone)]
pub enum NodeMech {
    Continuous {
        weights: Vec<f64>,
        intercepts: Vec<f64>,
        noise_sd: f64,
    },
    /// Binary/ordinal child with at least one continuous parent: latent
    /// linear-Gaussian value cut at marginal quantile thresholds.
    Threshold {
        weights: Vec<f64>,
        intercepts: Vec<f64>,
        noise_sd: f64,
        levels: usize,
        thresholds: Vec<f64>,
    },
    /// Categorical child with at least one continuous parent: argmax of
    /// per-level linear utilities perturbed by standard Gumbel noise.
    Utility {
        levels: usize,
        /// weights[level][continuous parent]
        weights: Vec<Vec<f64>>,
        /// intercepts[level][discrete-parent configuration]
        intercepts: Vec<Vec<f64>>,
    },
    /// Discrete child with discrete-only parents (or a root): one
    /// probability row per parent configuration.
    Table { rows: Vec<Vec<f64>>, levels: usize },
}

#[derive(Debug, Clone)]
pub struct SemParams {
    pub mechs: Vec<NodeMech>,
    /// continuous parents per node, ascending
    pub cont_parents: Vec<Vec<usize>>,
    /// discrete (binary/ordinal/categorical) parents per node, ascending
    pub disc_parents: Vec<Vec<usize>>,
    /// level count per node; 0 for continuous nodes
    pub cardinality: Vec<usize>,
}

fn node_cardinality(t: DataType, cfg: &GenConfig) -> usize {
    match t {
        DataType::Continuous => 0,
        DataType::Binary => 2,
        DataType::Ordinal => cfg.ordinal_levels,
        DataType::Categorical => cfg.categorical_levels,
    }
}

fn signed_weight(rng: &mut impl Rng) -> f64 {
    let w = rng.gen_range(0.5..1.5);
    if rng.gen_bool(0.5) {
        w
    } else {
        -w
    }
}

fn dirichlet_row(k: usize, rng: &mut impl Rng) -> Vec<f64> {
    let draws: Vec<f64> = (0..k).map(|_| -(rng.gen::<f64>().max(1e-300)).ln()).collect();
    let total: f64 = draws.iter().sum();
    draws.into_iter().map(|d| d / total).collect()
}

pub fn sample_sem_params(
    dag: &MixedGraph,
    types: &[DataType],
    cfg: &GenConfig,
    rng: &mut impl Rng,
) -> Result<SemParams> {
    let p = dag.node_count();
    if types.len() != p {
        return Err(Error::Input("types length must equal node count".into()));
    }
    let cardinality: Vec<usize> = types.iter().map(|&t| node_cardinality(t, cfg)).collect();
    let mut cont_parents = Vec::with_capacity(p);
    let mut disc_parents = Vec::with_capacity(p);
    let mut mechs = Vec::with_capacity(p);

    for v in 0..p {
        let mut parents = dag.parents(v);
        parents.sort_unstable();
        let cont: Vec<usize> = parents
            .iter()
            .copied()
            .filter(|&u| types[u] == DataType::Continuous)
            .collect();
        let disc: Vec<usize> = parents
            .iter()
            .copied()
            .filter(|&u| types[u] != DataType::Continuous)
            .collect();
        let n_configs: usize = disc.iter().map(|&u| cardinality[u]).product::<usize>().max(1);

        let mech = match types[v] {
            DataType::Continuous => {
                let weights: Vec<f64> = cont.iter().map(|_| signed_weight(rng)).collect();
                let intercepts: Vec<f64> = if disc.is_empty() {
                    vec![0.0]
                } else {
                    (0..n_configs).map(|_| signed_weight(rng)).collect()
                };
                let noise_sd = rng.gen_range(0.5..1.0);
                NodeMech::Continuous {
                    weights,
                    intercepts,
                    noise_sd,
                }
            }
            DataType::Binary | DataType::Ordinal => {
                if cont.is_empty() {
                    NodeMech::Table {
                        rows: (0..n_configs).map(|_| dirichlet_row(cardinality[v], rng)).collect(),
                        levels: cardinality[v],
                    }
                } else {
                    let weights: Vec<f64> = cont.iter().map(|_| signed_weight(rng)).collect();
                    let intercepts: Vec<f64> = if disc.is_empty() {
                        vec![0.0]
                    } else {
                        (0..n_configs).map(|_| signed_weight(rng)).collect()
                    };
                    NodeMech::Threshold {
                        weights,
                        intercepts,
                        noise_sd: rng.gen_range(0.5..1.0),
                        levels: cardinality[v],
                        thresholds: Vec::new(), // filled by the sampling pre-pass
                    }
                }
            }
            DataType::Categorical => {
                if cont.is_empty() {
                    NodeMech::Table {
                        rows: (0..n_configs).map(|_| dirichlet_row(cardinality[v], rng)).collect(),
                        levels: cardinality[v],
                    }
                } else {
                    let levels = cardinality[v];
                    NodeMech::Utility {
                        levels,
                        weights: (0..levels)
                            .map(|_| cont.iter().map(|_| signed_weight(rng)).collect())
                            .collect(),
                        intercepts: (0..levels)
                            .map(|_| (0..n_configs).map(|_| signed_weight(rng)).collect())
                            .collect(),
                    }
                }
            }
        };
        cont_parents.push(cont);
        disc_parents.push(disc);
        mechs.push(mech);
    }

    Ok(SemParams {
        mechs,
        cont_parents,
        disc_parents,
        cardinality,
    })
}

// ---------------------------------------------------------------------------
// forward sampling

/// Per-node sampled values during a pass; discrete codes kept as u32.
enum NodeValues {
    Real(Vec<f64>),
    Levels(Vec<u32>),
}

fn config_index(
    disc_parents: &[usize],
    cardinality: &[usize],
    values: &[Option<NodeValues>],
    row: usize,
) -> usize {
    let mut idx = 0usize;
    for &u in disc_parents {
        let code = match values[u].as_ref().unwrap() {
            NodeValues::Levels(v) => v[row] as usize,
            NodeValues::Real(v) => v[row] as usize, // ordinal codes stored as reals
        };
        idx = idx * cardinality[u] + code;
    }
    idx
}

fn linear_value(
    cont_parents: &[usize],
    weights: &[f64],
    values: &[Option<NodeValues>],
    row: usize,
) -> f64 {
    let mut sum = 0.0;
    for (&u, &w) in cont_parents.iter().zip(weights) {
        let x = match values[u].as_ref().unwrap() {
            NodeValues::Real(v) => v[row],
            NodeValues::Levels(v) => v[row] as f64,
        };
        sum += w * x;
    }
    sum
}

fn quantile_thresholds(latents: &mut [f64], levels: usize) -> Vec<f64> {
    latents.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let m = latents.len();
    (1..levels)
        .map(|k| {
            let pos = (k * m) / levels;
            latents[pos.min(m - 1)]
        })
        .collect()
}

fn sample_pass(
    order: &[usize],
    types: &[DataType],
    params: &mut SemParams,
    rows: usize,
    estimate_thresholds: bool,
    rng: &mut impl Rng,
) -> Vec<Option<NodeValues>> {
    let p = types.len();
    let mut values: Vec<Option<NodeValues>> = (0..p).map(|_| None).collect();
    let gumbel = Gumbel::new(0.0, 1.0).unwrap();

    for &v in order {
        let cont = params.cont_parents[v].clone();
        let disc = params.disc_parents[v].clone();
        let cards = params.cardinality.clone();
        let col = match &mut params.mechs[v] {
            NodeMech::Continuous {
                weights,
                intercepts,
                noise_sd,
            } => {
                let mut out = Vec::with_capacity(rows);
                for r in 0..rows {
                    let cfg_idx = config_index(&disc, &cards, &values, r);
                    let noise: f64 = rng.sample::<f64, _>(StandardNormal) * *noise_sd;
                    out.push(intercepts[cfg_idx] + linear_value(&cont, weights, &values, r) + noise);
                }
                NodeValues::Real(out)
            }
            NodeMech::Threshold {
                weights,
                intercepts,
                noise_sd,
                levels,
                thresholds,
            } => {
                let mut latent = Vec::with_capacity(rows);
                for r in 0..rows {
                    let cfg_idx = config_index(&disc, &cards, &values, r);
                    let noise: f64 = rng.sample::<f64, _>(StandardNormal) * *noise_sd;
                    latent.push(intercepts[cfg_idx] + linear_value(&cont, weights, &values, r) + noise);
                }
                if estimate_thresholds {
                    let mut copy = latent.clone();
                    *thresholds = quantile_thresholds(&mut copy, *levels);
                }
                let th = thresholds.clone();
                let codes: Vec<u32> = latent
                    .iter()
                    .map(|&x| th.iter().filter(|&&t| x > t).count() as u32)
                    .collect();
                if types[v] == DataType::Ordinal {
                    NodeValues::Real(codes.into_iter().map(|c| c as f64).collect())
                } else {
                    NodeValues::Levels(codes)
                }
            }
            NodeMech::Utility {
                levels,
                weights,
                intercepts,
            } => {
                let mut out = Vec::with_capacity(rows);
                for r in 0..rows {
                    let cfg_idx = config_index(&disc, &cards, &values, r);
                    let mut best = 0u32;
                    let mut best_val = f64::NEG_INFINITY;
                    for l in 0..*levels {
                        let u = intercepts[l][cfg_idx]
                            + linear_value(&cont, &weights[l], &values, r)
                            + rng.sample::<f64, _>(gumbel);
                        if u > best_val {
                            best_val = u;
                            best = l as u32;
                        }
                    }
                    out.push(best);
                }
                NodeValues::Levels(out)
            }
            NodeMech::Table { rows: table, levels } => {
                let mut out = Vec::with_capacity(rows);
                for r in 0..rows {
                    let cfg_idx = config_index(&disc, &cards, &values, r);
                    let row_probs = &table[cfg_idx];
                    let u: f64 = rng.gen();
                    let mut acc = 0.0;
                    let mut code = *levels as u32 - 1;
                    for (l, &pr) in row_probs.iter().enumerate() {
                        acc += pr;
                        if u < acc {
                            code = l as u32;
                            break;
                        }
                    }
                    out.push(code);
                }
                if types[v] == DataType::Ordinal {
                    NodeValues::Real(out.into_iter().map(|c| c as f64).collect())
                } else {
                    NodeValues::Levels(out)
                }
            }
        };
        values[v] = Some(col);
    }
    values
}

/// Forward-sample n rows in topological order. Threshold mechanisms first
/// estimate their cut points from a 10n-row pre-pass of latent draws.
pub fn forward_sample(
    dag: &MixedGraph,
    types: &[DataType],
    params: &SemParams,
    n: usize,
    rng: &mut impl Rng,
) -> Result<Dataset> {
    if n < 1 {
        return Err(Error::Parameter("n must be >= 1".into()));
    }
    let order = dag.topological_order()?;
    let mut working = params.clone();

    let needs_prepass = working
        .mechs
        .iter()
        .any(|m| matches!(m, NodeMech::Threshold { thresholds, .. } if thresholds.is_empty()));
    if needs_prepass {
        let _ = sample_pass(&order, types, &mut working, 10 * n, true, rng);
    }
    let values = sample_pass(&order, types, &mut working, n, false, rng);

    let columns: Vec<Column> = values
        .into_iter()
        .enumerate()
        .map(|(v, col)| Column {
            label: dag.labels()[v].clone(),
            dtype: types[v],
            values: match col.unwrap() {
                NodeValues::Real(x) => ColumnValues::Real(x),
                NodeValues::Levels(x) => ColumnValues::Levels(x),
            },
        })
        .collect();
    Dataset::new(columns)
}

/// Remove k uniformly chosen columns; returns the reduced dataset and the
/// removed column indices (ascending, relative to the input).
pub fn mask_latents(
    dataset: &Dataset,
    k: usize,
    rng: &mut impl Rng,
) -> Result<(Dataset, Vec<usize>)> {
    let p = dataset.n_cols();
    if k == 0 || k >= p {
        return Err(Error::Input(format!("latent count {k} outside [1, p-1]")));
    }
    let mut latents: Vec<usize> = rand::seq::index::sample(rng, p, k).into_vec();
    latents.sort_unstable();
    let reduced = dataset.without_columns(&latents)?;
    Ok((reduced, latents))
}

/// Count of variables deleted for the FCI experiments: 1/4/8 for graphs of
/// 10/20/30 nodes.
pub fn latent_count_for(p: usize) -> usize {
    match p {
        10 => 1,
        20 => 4,
        30 => 8,
        _ => (p / 8).max(1),
    }
}

// ---------------------------------------------------------------------------
// grid generation

#[derive(Debug, Clone)]
pub struct GridSpec {
    pub node_sizes: Vec<usize>,
    pub expected_degree: f64,
    pub group: TypeGroup,
    pub graphs_per_size: usize,
    pub datasets_per_graph: usize,
    pub sample_sizes: Vec<usize>,
    pub seed: u64,
    pub ordinal_levels: usize,
    pub categorical_levels: usize,
    pub type_fraction_bounds: (f64, f64),
    /// Also write a latent-variable list per (graph, dataset) cell.
    pub with_latents: bool,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            node_sizes: vec![10, 20, 30],
            expected_degree: 2.0,
            group: TypeGroup::Group2,
            graphs_per_size: 10,
            datasets_per_graph: 5,
            sample_sizes: vec![100, 500, 1000, 1500, 2000, 5000],
            seed: 0,
            ordinal_levels: 4,
            categorical_levels: 3,
            type_fraction_bounds: (0.15, 0.60),
            with_latents: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManifestEntry {
    pub path: String,
    pub kind: String,
    pub p: usize,
    pub n: usize,
    pub group: u8,
    pub seed: u64,
}

pub fn manifest_to_csv(entries: &[ManifestEntry]) -> String {
    let mut out = String::from("path,kind,p,n,group,seed\n");
    for e in entries {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            e.path, e.kind, e.p, e.n, e.group, e.seed
        ));
    }
    out
}

pub fn manifest_from_csv(text: &str) -> Result<Vec<ManifestEntry>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 || line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 6 {
            return Err(Error::Data(format!("bad manifest line '{line}'")));
        }
        let parse_usize = |s: &str| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Error::Data(format!("bad number '{s}' in manifest")))
        };
        out.push(ManifestEntry {
            path: cells[0].to_string(),
            kind: cells[1].to_string(),
            p: parse_usize(cells[2])?,
            n: parse_usize(cells[3])?,
            group: cells[4]
                .trim()
                .parse::<u8>()
                .map_err(|_| Error::Data("bad group in manifest".into()))?,
            seed: cells[5]
                .trim()
                .parse::<u64>()
                .map_err(|_| Error::Data("bad seed in manifest".into()))?,
        });
    }
    Ok(out)
}

/// Generate every (graph, dataset, sample size) cell under `outdir` and
/// write `manifest.csv`; fully deterministic from the spec seed.
pub fn generate_grid(spec: &GridSpec, outdir: &Path) -> Result<Vec<ManifestEntry>> {
    std::fs::create_dir_all(outdir).map_err(|e| Error::io(outdir, e))?;
    let mut entries: Vec<ManifestEntry> = Vec::new();

    for &p in &spec.node_sizes {
        for g in 0..spec.graphs_per_size {
            let graph_seed = subseed(spec.seed, &[1, p as u64, g as u64]);
            let mut rng = ChaCha8Rng::seed_from_u64(graph_seed);
            let dag = random_dag(p, spec.expected_degree, &mut rng)?;
            let types = assign_types(p, spec.group, spec.type_fraction_bounds, &mut rng)?;
            let cfg = GenConfig {
                p,
                expected_degree: spec.expected_degree,
                group: spec.group,
                n: 0,
                seed: spec.seed,
                ordinal_levels: spec.ordinal_levels,
                categorical_levels: spec.categorical_levels,
                type_fraction_bounds: spec.type_fraction_bounds,
            };
            let params = sample_sem_params(&dag, &types, &cfg, &mut rng)?;

            let dag_name = format!("dag_p{p}_g{g}.graph");
            dag.write_file(&outdir.join(&dag_name))?;
            entries.push(ManifestEntry {
                path: dag_name,
                kind: "dag".into(),
                p,
                n: 0,
                group: spec.group.id(),
                seed: graph_seed,
            });

            for d in 0..spec.datasets_per_graph {
                if spec.with_latents {
                    let latent_seed = subseed(spec.seed, &[2, p as u64, g as u64, d as u64]);
                    let mut lrng = ChaCha8Rng::seed_from_u64(latent_seed);
                    let k = latent_count_for(p);
                    let mut latents: Vec<usize> =
                        rand::seq::index::sample(&mut lrng, p, k).into_vec();
                    latents.sort_unstable();
                    let latent_name = format!("latents_p{p}_g{g}_d{d}.txt");
                    let text: String = latents
                        .iter()
                        .map(|&i| format!("{}\n", dag.labels()[i]))
                        .collect();
                    std::fs::write(outdir.join(&latent_name), text)
                        .map_err(|e| Error::io(outdir.join(&latent_name), e))?;
                    entries.push(ManifestEntry {
                        path: latent_name,
                        kind: "latents".into(),
                        p,
                        n: 0,
                        group: spec.group.id(),
                        seed: latent_seed,
                    });
                }

                for &n in &spec.sample_sizes {
                    let cell_seed =
                        subseed(spec.seed, &[3, p as u64, g as u64, d as u64, n as u64]);
                    let mut crng = ChaCha8Rng::seed_from_u64(cell_seed);
                    let ds = forward_sample(&dag, &types, &params, n, &mut crng)?;
                    let data_name = format!("data_p{p}_g{g}_d{d}_n{n}.csv");
                    ds.write_csv(&outdir.join(&data_name))?;
                    entries.push(ManifestEntry {
                        path: data_name,
                        kind: "dataset".into(),
                        p,
                        n,
                        group: spec.group.id(),
                        seed: cell_seed,
                    });
                }
            }
        }
    }

    let manifest_path = outdir.join("manifest.csv");
    std::fs::write(&manifest_path, manifest_to_csv(&entries))
        .map_err(|e| Error::io(&manifest_path, e))?;
    Ok(entries)
}
