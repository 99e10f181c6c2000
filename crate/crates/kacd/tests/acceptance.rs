//! End-to-end acceptance checks. Each test prints a single PASS line on
//! success (visible with `--nocapture`) and panics with a FAIL line
//! otherwise.

use std::collections::BTreeSet;
use std::time::Instant;

use nalgebra::DMatrix;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use kacd::alignment::{alignment, pseudo_correlation_matrix};
use kacd::bench::{preset, run_experiment, spearman, summarize, Experiment, ExperimentSpec};
use kacd::citest::{fisher_z_ci_test, partial_correlation, CiContext, pearson_correlation_matrix};
use kacd::discovery::{fci_search, pc_search, SearchConfig};
use kacd::graphs::{d_separated, dag_to_cpdag, true_pag, GraphKind, Mark, MixedGraph};
use kacd::kernels::{
    center_kernel_matrix, h_theta, kernel_for_column, rbf_kernel_matrix, Dataset, KernelParams,
};
use kacd::metrics::shd;
use kacd::simdata::{
    assign_types, forward_sample, generate_grid, random_dag, sample_sem_params, GenConfig,
    TypeGroup,
};

fn pass(n: usize, name: &str) {
    println!("acceptance {n} ({name}): PASS");
}

macro_rules! check {
    ($cond:expr, $n:expr, $name:expr, $($detail:tt)*) => {
        if !$cond {
            panic!("acceptance {} ({}): FAIL - {}", $n, $name, format!($($detail)*));
        }
    };
}

fn oracle_ci(dag: &MixedGraph) -> impl Fn(usize, usize, &[usize]) -> kacd::Result<bool> + '_ {
    move |u, v, s| {
        let set: BTreeSet<usize> = s.iter().copied().collect();
        d_separated(dag, u, v, &set)
    }
}

#[test]
fn oracle_pc_exactness() {
    let name = "oracle PC recovers the CPDAG";
    let start = Instant::now();
    for seed in 1..=100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dag = random_dag(10, 2.0, &mut rng).unwrap();
        let truth = dag_to_cpdag(&dag).unwrap();
        let ci = oracle_ci(&dag);
        let (learned, _) = pc_search(&ci, 10, &SearchConfig::default()).unwrap();
        let report = shd(&truth, &learned).unwrap();
        check!(report.shd == 0, 1, name, "seed {seed}: SHD {}", report.shd);
    }
    let elapsed = start.elapsed();
    check!(elapsed.as_secs_f64() < 10.0, 1, name, "took {elapsed:?}");
    pass(1, name);
}

#[test]
fn oracle_fci_consistency() {
    let name = "oracle FCI matches the true PAG";
    let start = Instant::now();
    let p = 8usize;
    for seed in 1..=50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let dag = random_dag(p, 2.0, &mut rng).unwrap();
        let mut latents: Vec<usize> = rand::seq::index::sample(&mut rng, p, 2).into_vec();
        latents.sort_unstable();
        let latent_set: BTreeSet<usize> = latents.iter().copied().collect();
        let observed: Vec<usize> = (0..p).filter(|i| !latent_set.contains(i)).collect();

        let truth = true_pag(&dag, &latent_set).unwrap();
        let ci = |u: usize, v: usize, s: &[usize]| {
            let set: BTreeSet<usize> = s.iter().map(|&k| observed[k]).collect();
            d_separated(&dag, observed[u], observed[v], &set)
        };
        let cfg = SearchConfig::default();
        let (learned, _) = fci_search(&ci, observed.len(), &cfg).unwrap();
        let report = shd(&truth, &learned).unwrap();
        check!(report.shd == 0, 2, name, "seed {seed}: SHD {}", report.shd);

        // no retained edge may be separable by any observed subset
        let others: Vec<usize> = (0..observed.len()).collect();
        for (u, v, _, _) in learned.edges() {
            let rest: Vec<usize> = others
                .iter()
                .copied()
                .filter(|&k| k != u && k != v)
                .collect();
            for mask in 0..(1usize << rest.len()) {
                let s: BTreeSet<usize> = rest
                    .iter()
                    .enumerate()
                    .filter(|(b, _)| mask & (1 << b) != 0)
                    .map(|(_, &k)| observed[k])
                    .collect();
                let sep = d_separated(&dag, observed[u], observed[v], &s).unwrap();
                check!(
                    !sep,
                    2,
                    name,
                    "seed {seed}: edge ({u},{v}) separable by {s:?}"
                );
            }
        }
    }
    let elapsed = start.elapsed();
    check!(elapsed.as_secs_f64() < 60.0, 2, name, "took {elapsed:?}");
    pass(2, name);
}

fn random_mixed_dataset(seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = rng.gen_range(4..=10);
    let n = rng.gen_range(50..=200);
    let group = if seed % 2 == 0 {
        TypeGroup::Group1
    } else {
        TypeGroup::Group2
    };
    let dag = random_dag(p, 2.0, &mut rng).unwrap();
    let types = assign_types(p, group, (0.15, 0.60), &mut rng).unwrap();
    let cfg = GenConfig::default();
    let params = sample_sem_params(&dag, &types, &cfg, &mut rng).unwrap();
    forward_sample(&dag, &types, &params, n, &mut rng).unwrap()
}

#[test]
fn alignment_matrix_validity() {
    let name = "pseudo-correlation validity and oracle agreement";
    let params = KernelParams::new(0.5, 1.0).unwrap();
    for seed in 0..200u64 {
        let ds = random_mixed_dataset(seed);
        let pseudo = pseudo_correlation_matrix(&ds, &params).unwrap();
        let m = pseudo.entries();
        let p = ds.n_cols();
        for i in 0..p {
            check!(m[(i, i)] == 1.0, 3, name, "seed {seed}: diag {}", m[(i, i)]);
            for j in 0..p {
                check!(
                    (m[(i, j)] - m[(j, i)]).abs() < 1e-15,
                    3,
                    name,
                    "seed {seed}: asymmetry at ({i},{j})"
                );
                check!(
                    (0.0..=1.0).contains(&m[(i, j)]),
                    3,
                    name,
                    "seed {seed}: entry {} out of range",
                    m[(i, j)]
                );
            }
        }
        let min_eig = m
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .fold(f64::INFINITY, |a, &b| a.min(b));
        check!(min_eig >= -1e-8, 3, name, "seed {seed}: min eigenvalue {min_eig}");

        // naive double-loop oracle
        let kernels: Vec<_> = (0..p)
            .map(|i| kernel_for_column(ds.column(i), &params).unwrap())
            .collect();
        for i in 0..p {
            for j in (i + 1)..p {
                let naive = alignment(&kernels[i], &kernels[j]).unwrap().clamp(0.0, 1.0);
                let rel = (m[(i, j)] - naive).abs() / naive.abs().max(1.0);
                check!(
                    rel < 1e-10,
                    3,
                    name,
                    "seed {seed}: ({i},{j}) streaming {} vs naive {naive}",
                    m[(i, j)]
                );
            }
        }
    }
    pass(3, name);
}

fn random_pd_correlation(p: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    let m = DMatrix::from_fn(p, p + 2, |_, _| rng.gen_range(-1.0..1.0));
    let gram = &m * m.transpose() + DMatrix::<f64>::identity(p, p) * 0.5;
    let mut corr: DMatrix<f64> = DMatrix::identity(p, p);
    for i in 0..p {
        for j in 0..p {
            corr[(i, j)] = gram[(i, j)] / (gram[(i, i)] * gram[(j, j)]).sqrt();
        }
    }
    corr
}

fn recursion_partial(corr: &DMatrix<f64>, i: usize, j: usize, s: &[usize]) -> f64 {
    if s.is_empty() {
        return corr[(i, j)];
    }
    let (h, rest) = (s[s.len() - 1], &s[..s.len() - 1]);
    let r_ij = recursion_partial(corr, i, j, rest);
    let r_ih = recursion_partial(corr, i, h, rest);
    let r_jh = recursion_partial(corr, j, h, rest);
    (r_ij - r_ih * r_jh) / ((1.0 - r_ih * r_ih) * (1.0 - r_jh * r_jh)).sqrt()
}

#[test]
fn partial_correlation_oracle_equivalence() {
    let name = "partial correlation inversion vs recursion";
    let mut rng = ChaCha8Rng::seed_from_u64(4242);
    for trial in 0..1000 {
        let p = rng.gen_range(3..=8);
        let corr = random_pd_correlation(p, &mut rng);
        let max_s = (p - 2).min(4);
        let ns = rng.gen_range(0..=max_s);
        let s: Vec<usize> = (2..2 + ns).collect();
        let inv = partial_correlation(&corr, 0, 1, &s).unwrap();
        let rec = recursion_partial(&corr, 0, 1, &s);
        check!(
            (inv - rec).abs() < 1e-10,
            4,
            name,
            "trial {trial} p={p} |S|={ns}: {inv} vs {rec}"
        );
    }
    pass(4, name);
}

#[test]
fn fisher_z_calibration() {
    let name = "Fisher-z calibration on Gaussian chains";
    let n = 5000usize;
    let mut cond_indep = 0;
    let mut marg_dep = 0;
    let replicates = 100;
    for rep in 0..replicates {
        let mut rng = ChaCha8Rng::seed_from_u64(9000 + rep);
        let a: f64 = rng.gen_range(0.5..1.5);
        let b: f64 = rng.gen_range(0.5..1.5);
        let mut x = vec![0.0; n];
        let mut y = vec![0.0; n];
        let mut z = vec![0.0; n];
        for t in 0..n {
            x[t] = rng.sample::<f64, _>(rand_distr::StandardNormal);
            y[t] = a * x[t] + rng.sample::<f64, _>(rand_distr::StandardNormal);
            z[t] = b * y[t] + rng.sample::<f64, _>(rand_distr::StandardNormal);
        }
        let corr = pearson_correlation_matrix(&[x, y, z]).unwrap();
        let ctx = CiContext::new(corr, n, 0.1).unwrap();
        if fisher_z_ci_test(&ctx, 0, 2, &[1]).unwrap().independent {
            cond_indep += 1;
        }
        if !fisher_z_ci_test(&ctx, 0, 2, &[]).unwrap().independent {
            marg_dep += 1;
        }
    }
    check!(
        cond_indep * 100 >= 85 * replicates as usize,
        5,
        name,
        "X indep Z | Y in only {cond_indep}/{replicates}"
    );
    check!(
        marg_dep * 100 >= 99 * replicates as usize,
        5,
        name,
        "X dep Z in only {marg_dep}/{replicates}"
    );
    pass(5, name);
}

#[test]
fn desk_scale_trend_is_negative() {
    let name = "mean normalized score falls with sample size";
    let start = Instant::now();
    let mut spec = ExperimentSpec::desk_scale(Experiment::Exp2, 7);
    spec.presets = vec![preset("P1").unwrap()];
    let dir = tempfile::tempdir().unwrap();
    let entries = generate_grid(&spec.grid, dir.path()).unwrap();
    let rows = run_experiment(&spec, dir.path(), &entries).unwrap();
    check!(
        rows.iter().all(|r| r.status == "ok"),
        6,
        name,
        "failed cells present"
    );
    let summary = summarize(&rows).unwrap();
    let mut ns = Vec::new();
    let mut means = Vec::new();
    for row in summary.iter().filter(|r| r.params_id == "P1") {
        ns.push(row.n as f64);
        means.push(row.mean_normalized);
    }
    check!(ns.len() == 4, 6, name, "expected 4 sample sizes, got {}", ns.len());
    let rho = spearman(&ns, &means).unwrap();
    check!(rho < 0.0, 6, name, "Spearman(n, mean score) = {rho}, means {means:?}");
    let elapsed = start.elapsed();
    check!(elapsed.as_secs_f64() < 600.0, 6, name, "took {elapsed:?}");
    pass(6, name);
}

#[test]
fn shd_arithmetic() {
    let name = "structural Hamming distance arithmetic";
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let dag = random_dag(10, 2.0, &mut rng).unwrap();
    let cpdag = dag_to_cpdag(&dag).unwrap();
    let self_report = shd(&cpdag, &cpdag).unwrap();
    check!(self_report.shd == 0, 7, name, "self-SHD {}", self_report.shd);

    // true A <-> B vs learned A o-> B: one wrong mark
    let mut truth = MixedGraph::with_node_count(GraphKind::Pag, 2);
    truth.set_edge(0, 1, Mark::Arrow, Mark::Arrow).unwrap();
    let mut learned = MixedGraph::with_node_count(GraphKind::Pag, 2);
    learned.set_edge(0, 1, Mark::Circle, Mark::Arrow).unwrap();
    let r = shd(&truth, &learned).unwrap();
    check!(
        r.wrong_mark == 1 && r.shd == 1 && r.extra == 0 && r.missing == 0,
        7,
        name,
        "PAG mark example: {r:?}"
    );

    // S = 9 over 10 nodes: 9 / (45 / 2) = 0.4
    let mut g1 = MixedGraph::with_node_count(GraphKind::Cpdag, 10);
    for i in 0..9 {
        g1.set_edge(i, i + 1, Mark::Tail, Mark::Tail).unwrap();
    }
    let g2 = MixedGraph::with_node_count(GraphKind::Cpdag, 10);
    let r = shd(&g1, &g2).unwrap();
    check!(r.shd == 9, 7, name, "expected SHD 9, got {}", r.shd);
    check!(
        (r.normalized - 0.4).abs() < 1e-15,
        7,
        name,
        "normalized {}",
        r.normalized
    );
    pass(7, name);
}

#[test]
fn bench_cli_is_deterministic() {
    let name = "bench command reproduces scores.csv byte for byte";
    let bin = env!("CARGO_BIN_EXE_kacd");
    let mut outputs = Vec::new();
    for run in 0..2 {
        let dir = tempfile::tempdir().unwrap();
        let status = std::process::Command::new(bin)
            .args([
                "bench",
                "--experiment",
                "2",
                "--desk-scale",
                "--seed",
                "7",
                "--out",
            ])
            .arg(dir.path())
            .status()
            .unwrap();
        check!(status.success(), 8, name, "run {run} exited with {status}");
        outputs.push(std::fs::read(dir.path().join("scores.csv")).unwrap());
    }
    check!(outputs[0] == outputs[1], 8, name, "scores.csv differs between runs");
    check!(!outputs[0].is_empty(), 8, name, "scores.csv empty");
    pass(8, name);
}

#[test]
fn kernel_unit_values() {
    let name = "kernel unit values";
    // RBF at |delta| = sigma
    let k = rbf_kernel_matrix(&[0.0, 0.25], 0.25).unwrap();
    check!(
        (k[(0, 1)] - (-0.5f64).exp()).abs() < 1e-15,
        9,
        name,
        "RBF off-diagonal {}",
        k[(0, 1)]
    );
    // h_1(0.5) = 0.5
    check!(
        (h_theta(0.5, 1.0).unwrap() - 0.5).abs() < 1e-15,
        9,
        name,
        "h_1(0.5) = {}",
        h_theta(0.5, 1.0).unwrap()
    );
    // unequal levels -> zero
    let kc = kacd::kernels::categorical_kernel_matrix(&[0, 1, 0], 1.0).unwrap();
    check!(kc[(0, 1)] == 0.0, 9, name, "unequal-level kernel {}", kc[(0, 1)]);
    // centering kills a constant column's kernel
    let constant = rbf_kernel_matrix(&[3.0; 5], 1.0).unwrap();
    let centered = center_kernel_matrix(&constant);
    let max = centered.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    check!(max < 1e-12, 9, name, "centered constant kernel max {max}");
    pass(9, name);
}

#[test]
fn pseudo_correlation_runtime_budget() {
    let name = "p = 30, n = 1000 pseudo-correlation under 30 s";
    let mut rng = ChaCha8Rng::seed_from_u64(300);
    let p = 30;
    let dag = random_dag(p, 2.0, &mut rng).unwrap();
    let types = assign_types(p, TypeGroup::Group2, (0.15, 0.60), &mut rng).unwrap();
    let cfg = GenConfig::default();
    let params = sample_sem_params(&dag, &types, &cfg, &mut rng).unwrap();
    let ds = forward_sample(&dag, &types, &params, 1000, &mut rng).unwrap();

    let kp = KernelParams::new(0.1, 1.0).unwrap();
    let start = Instant::now();
    let pseudo = pseudo_correlation_matrix(&ds, &kp).unwrap();
    let elapsed = start.elapsed();
    check!(pseudo.p() == p, 10, name, "wrong size");
    check!(elapsed.as_secs_f64() < 30.0, 10, name, "took {elapsed:?}");
    pass(10, name);
}
