//! PC and FCI structure search over an abstract CI-test function, plus the
//! kernel-alignment pipelines (KAPC, KAFCI).

use std::collections::BTreeSet;

use crate::alignment::{pseudo_correlation_with, AlignmentOptions};
use crate::citest::{fisher_z_ci_test, CiContext};
use crate::graphs::{GraphKind, Mark, MixedGraph, SepsetTable};
use crate::kernels::{Dataset, KernelParams};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Pc,
    Fci,
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub alpha: f64,
    /// Cap on conditioning-set size, None = unlimited.
    pub max_cond_size: Option<usize>,
    /// Order-independent skeleton (adjacency snapshots per level).
    pub stable_skeleton: bool,
    pub algorithm: Algorithm,
    /// Log every CI query.
    pub verbose: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            alpha: 0.1,
            max_cond_size: None,
            stable_skeleton: true,
            algorithm: Algorithm::Pc,
            verbose: false,
        }
    }
}

/// Visit all size-k subsets of `pool` until the callback returns
/// Some(value); lexicographic order over pool positions.
fn for_each_subset<T>(
    pool: &[usize],
    k: usize,
    f: &mut impl FnMut(&[usize]) -> Result<Option<T>>,
) -> Result<Option<T>> {
    fn rec<T>(
        pool: &[usize],
        k: usize,
        start: usize,
        current: &mut Vec<usize>,
        f: &mut impl FnMut(&[usize]) -> Result<Option<T>>,
    ) -> Result<Option<T>> {
        if current.len() == k {
            return f(current);
        }
        let needed = k - current.len();
        for idx in start..=pool.len().saturating_sub(needed) {
            current.push(pool[idx]);
            if let Some(v) = rec(pool, k, idx + 1, current, f)? {
                current.pop();
                return Ok(Some(v));
            }
            current.pop();
        }
        Ok(None)
    }
    if k > pool.len() {
        return Ok(None);
    }
    rec(pool, k, 0, &mut Vec::with_capacity(k), f)
}

/// Skeleton phase of PC: drop edge (i, j) when some subset of the current
/// adjacency of i or j separates them; records the separating set.
pub fn pc_skeleton<F>(
    ci: &F,
    p: usize,
    cfg: &SearchConfig,
) -> Result<(MixedGraph, SepsetTable)>
where
    F: Fn(usize, usize, &[usize]) -> Result<bool>,
{
    let mut adj: Vec<BTreeSet<usize>> = (0..p)
        .map(|i| (0..p).filter(|&j| j != i).collect())
        .collect();
    let mut sepsets = SepsetTable::new();

    let mut level = 0usize;
    loop {
        if let Some(cap) = cfg.max_cond_size {
            if level > cap {
                break;
            }
        }
        let snapshot: Vec<BTreeSet<usize>> = if cfg.stable_skeleton {
            adj.clone()
        } else {
            Vec::new()
        };
        let candidates = |i: usize, adj: &Vec<BTreeSet<usize>>| -> Vec<usize> {
            if cfg.stable_skeleton {
                snapshot[i].iter().copied().collect()
            } else {
                adj[i].iter().copied().collect()
            }
        };

        let mut any_candidate = false;
        // ordered pairs: subsets come from adj(i)\{j} for each direction
        for i in 0..p {
            let neigh_i: Vec<usize> = adj[i].iter().copied().collect();
            for j in neigh_i {
                if !adj[i].contains(&j) {
                    continue; // removed earlier at this level
                }
                let pool: Vec<usize> = candidates(i, &adj)
                    .into_iter()
                    .filter(|&v| v != j)
                    .collect();
                if pool.len() < level {
                    continue;
                }
                any_candidate = true;
                let found = for_each_subset(&pool, level, &mut |s| {
                    let independent = ci(i, j, s)?;
                    if cfg.verbose {
                        eprintln!("ci: {i} vs {j} | {s:?} -> {independent}");
                    }
                    Ok(independent.then(|| s.to_vec()))
                })?;
                if let Some(s) = found {
                    adj[i].remove(&j);
                    adj[j].remove(&i);
                    sepsets.insert(i, j, s);
                }
            }
        }
        if !any_candidate {
            break;
        }
        level += 1;
    }

    let mut skel = MixedGraph::with_node_count(GraphKind::Pdag, p);
    for i in 0..p {
        for &j in &adj[i] {
            if i < j {
                skel.set_edge(i, j, Mark::Tail, Mark::Tail)?;
            }
        }
    }
    Ok((skel, sepsets))
}

/// Orient unshielded colliders i -> k <- j where k is not in sepset(i, j).
/// Conflicting demands are applied in encounter order (last write wins)
/// with a logged conflict count.
pub fn orient_v_structures(
    skeleton: &MixedGraph,
    sepsets: &SepsetTable,
) -> Result<MixedGraph> {
    let mut g = skeleton.clone();
    g.set_kind(GraphKind::Pdag);
    let p = g.node_count();
    let mut conflicts = 0usize;
    for i in 0..p {
        for k in 0..p {
            if k == i || !skeleton.adjacent(i, k) {
                continue;
            }
            for j in (i + 1)..p {
                if j == k || !skeleton.adjacent(k, j) || skeleton.adjacent(i, j) {
                    continue;
                }
                let sep = sepsets.get(i, j).unwrap_or(&[]);
                if !sep.contains(&k) {
                    if g.edge(i, k) == Some((Mark::Arrow, Mark::Tail))
                        || g.edge(j, k) == Some((Mark::Arrow, Mark::Tail))
                    {
                        conflicts += 1;
                    }
                    g.set_edge(i, k, Mark::Tail, Mark::Arrow)?;
                    g.set_edge(j, k, Mark::Tail, Mark::Arrow)?;
                }
            }
        }
    }
    if conflicts > 0 {
        eprintln!("warning: {conflicts} v-structure orientation conflict(s)");
    }
    Ok(g)
}

/// Meek rules R1-R4 to fixpoint; never removes edges or flips an oriented
/// edge, only directs undirected ones.
pub fn apply_meek_rules(pdag: &MixedGraph) -> Result<MixedGraph> {
    let mut g = pdag.clone();
    let p = g.node_count();
    loop {
        let mut changed = false;
        for a in 0..p {
            for b in 0..p {
                if a == b || !g.is_undirected(a, b) {
                    continue;
                }
                // R1: c -> a, a - b, c and b nonadjacent  =>  a -> b
                let r1 = g
                    .parents(a)
                    .into_iter()
                    .any(|c| c != b && !g.adjacent(c, b));
                // R2: a -> c -> b and a - b  =>  a -> b
                let r2 = g
                    .children(a)
                    .into_iter()
                    .any(|c| c != b && g.is_directed(c, b));
                // R3: a - c -> b, a - d -> b, c and d nonadjacent  =>  a -> b
                let spouses: Vec<usize> = g
                    .neighbors(a)
                    .into_iter()
                    .filter(|&c| c != b && g.is_undirected(a, c) && g.is_directed(c, b))
                    .collect();
                let mut r3 = false;
                'outer: for x in 0..spouses.len() {
                    for y in (x + 1)..spouses.len() {
                        if !g.adjacent(spouses[x], spouses[y]) {
                            r3 = true;
                            break 'outer;
                        }
                    }
                }
                // R4: a - d, d -> c, c -> b, d and b nonadjacent  =>  a -> b
                let mut r4 = false;
                'r4: for d in g.neighbors(a) {
                    if d == b || !g.is_undirected(a, d) || g.adjacent(d, b) {
                        continue;
                    }
                    for c in g.children(d) {
                        if c != a && c != b && g.is_directed(c, b) && g.adjacent(a, c) {
                            r4 = true;
                            break 'r4;
                        }
                    }
                }
                if r1 || r2 || r3 || r4 {
                    g.set_edge(a, b, Mark::Tail, Mark::Arrow)?;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    g.set_kind(GraphKind::Cpdag);
    Ok(g)
}

// ---------------------------------------------------------------------------
// FCI

/// Possible-D-SEP(x): nodes reachable from x by a path on which every
/// interior vertex is either a collider or part of a triangle.
fn possible_d_sep(g: &MixedGraph, x: usize) -> Vec<usize> {
    let p = g.node_count();
    let mut reached: BTreeSet<usize> = BTreeSet::new();
    // states are traversed edges (from, to)
    let mut visited: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut queue: Vec<(usize, usize)> = g.neighbors(x).into_iter().map(|v| (x, v)).collect();
    while let Some((a, b)) = queue.pop() {
        if !visited.insert((a, b)) {
            continue;
        }
        if b != x {
            reached.insert(b);
        }
        for c in g.neighbors(b) {
            if c == a {
                continue;
            }
            let collider = g.mark_at(b, a) == Some(Mark::Arrow)
                && g.mark_at(b, c) == Some(Mark::Arrow);
            let triangle = g.adjacent(a, c);
            if collider || triangle {
                queue.push((b, c));
            }
        }
    }
    let _ = p;
    reached.into_iter().collect()
}

fn orient_colliders_with_circles(
    skeleton: &MixedGraph,
    sepsets: &SepsetTable,
) -> Result<MixedGraph> {
    let mut g = MixedGraph::new(GraphKind::Pag, skeleton.labels().to_vec());
    for (i, j, _, _) in skeleton.edges() {
        g.set_edge(i, j, Mark::Circle, Mark::Circle)?;
    }
    let p = g.node_count();
    for k in 0..p {
        let neigh = g.neighbors(k);
        for a in 0..neigh.len() {
            for b in (a + 1)..neigh.len() {
                let (i, j) = (neigh[a], neigh[b]);
                if g.adjacent(i, j) {
                    continue;
                }
                let sep = sepsets.get(i, j).unwrap_or(&[]);
                if !sep.contains(&k) {
                    g.set_mark_at(k, i, Mark::Arrow)?;
                    g.set_mark_at(k, j, Mark::Arrow)?;
                }
            }
        }
    }
    Ok(g)
}

/// Is the edge from `a` to `b` potentially directed toward `b`
/// (no arrow back at `a`, no tail at `b`)?
fn potentially_directed(g: &MixedGraph, a: usize, b: usize) -> bool {
    matches!(g.mark_at(a, b), Some(Mark::Tail) | Some(Mark::Circle))
        && matches!(g.mark_at(b, a), Some(Mark::Arrow) | Some(Mark::Circle))
}

/// Uncovered potentially directed path from `from` to `to` whose first
/// step is `first`; returns true if one exists (simple-path DFS).
fn has_uncovered_pd_path(g: &MixedGraph, from: usize, first: usize, to: usize) -> bool {
    if !potentially_directed(g, from, first) {
        return false;
    }
    if first == to {
        return true;
    }
    fn dfs(
        g: &MixedGraph,
        prev: usize,
        cur: usize,
        to: usize,
        on_path: &mut Vec<bool>,
    ) -> bool {
        for next in g.neighbors(cur) {
            if on_path[next] || next == prev {
                continue;
            }
            if g.adjacent(prev, next) {
                continue; // covered triple
            }
            if !potentially_directed(g, cur, next) {
                continue;
            }
            if next == to {
                return true;
            }
            on_path[next] = true;
            if dfs(g, cur, next, to, on_path) {
                return true;
            }
            on_path[next] = false;
        }
        false
    }
    let mut on_path = vec![false; g.node_count()];
    on_path[from] = true;
    on_path[first] = true;
    dfs(g, from, first, to, &mut on_path)
}

/// Backward search for a discriminating path <d, ..., a, b, c>; returns d
/// and the immediate path predecessor of b (the node `a`).
fn find_discriminating_path(g: &MixedGraph, b: usize, c: usize) -> Option<(usize, usize)> {
    // candidates for a: collider at a on (a, b) and a parent of c
    let starts: Vec<usize> = g
        .neighbors(b)
        .into_iter()
        .filter(|&a| {
            a != c
                && g.mark_at(a, b) == Some(Mark::Arrow)
                && g.is_directed(a, c)
        })
        .collect();
    for &a in &starts {
        // BFS backwards from a; interior vertices must be colliders on the
        // path and parents of c
        let mut queue: Vec<(usize, Vec<usize>)> = vec![(a, vec![b, a])];
        let mut visited: BTreeSet<usize> = [b, a, c].into_iter().collect();
        while let Some((v, path)) = queue.pop() {
            for u in g.neighbors(v) {
                if visited.contains(&u) {
                    continue;
                }
                // v must receive an arrow from u to stay a collider
                if g.mark_at(v, u) != Some(Mark::Arrow) {
                    continue;
                }
                if !g.adjacent(u, c) {
                    return Some((u, a)); // u is the endpoint d
                }
                if g.is_directed(u, c) && g.mark_at(u, v) == Some(Mark::Arrow) {
                    visited.insert(u);
                    let mut next = path.clone();
                    next.push(u);
                    queue.push((u, next));
                }
            }
        }
    }
    None
}

/// Zhang's orientation rules R1-R4 and R8-R10 to fixpoint (selection-bias
/// rules R5-R7 omitted).
fn apply_fci_rules(g: &mut MixedGraph, sepsets: &SepsetTable) -> Result<()> {
    let p = g.node_count();
    loop {
        let mut changed = false;

        // R1: a *-> b o-* c, a and c nonadjacent => b -> c
        for b in 0..p {
            let neigh = g.neighbors(b);
            for &a in &neigh {
                if g.mark_at(b, a) != Some(Mark::Arrow) {
                    continue;
                }
                for &c in &neigh {
                    if c == a || g.adjacent(a, c) {
                        continue;
                    }
                    if g.mark_at(b, c) == Some(Mark::Circle) {
                        g.set_mark_at(b, c, Mark::Tail)?;
                        g.set_mark_at(c, b, Mark::Arrow)?;
                        changed = true;
                    }
                }
            }
        }

        // R2: a -> b *-> c or a *-> b -> c, and a *-o c => a *-> c
        for a in 0..p {
            for c in 0..p {
                if a == c || g.mark_at(c, a) != Some(Mark::Circle) {
                    continue;
                }
                for b in g.neighbors(a) {
                    if b == c || !g.adjacent(b, c) {
                        continue;
                    }
                    let chain1 = g.is_directed(a, b) && g.mark_at(c, b) == Some(Mark::Arrow);
                    let chain2 = g.mark_at(b, a) == Some(Mark::Arrow) && g.is_directed(b, c);
                    if chain1 || chain2 {
                        g.set_mark_at(c, a, Mark::Arrow)?;
                        changed = true;
                        break;
                    }
                }
            }
        }

        // R3: a *-> b <-* c, a *-o d o-* c, a and c nonadjacent, d *-o b
        //     => d *-> b
        for d in 0..p {
            for b in g.neighbors(d) {
                if g.mark_at(b, d) != Some(Mark::Circle) {
                    continue;
                }
                let neigh_d: Vec<usize> = g
                    .neighbors(d)
                    .into_iter()
                    .filter(|&x| x != b && g.mark_at(d, x) == Some(Mark::Circle))
                    .collect();
                let mut fired = false;
                for x in 0..neigh_d.len() {
                    for y in 0..neigh_d.len() {
                        if x == y {
                            continue;
                        }
                        let (a, c) = (neigh_d[x], neigh_d[y]);
                        if g.adjacent(a, c) {
                            continue;
                        }
                        if g.mark_at(b, a) == Some(Mark::Arrow)
                            && g.mark_at(b, c) == Some(Mark::Arrow)
                        {
                            g.set_mark_at(b, d, Mark::Arrow)?;
                            changed = true;
                            fired = true;
                            break;
                        }
                    }
                    if fired {
                        break;
                    }
                }
            }
        }

        // R4: discriminating path <d, ..., a, b, c> with b o-* c
        for b in 0..p {
            for c in g.neighbors(b) {
                if g.mark_at(b, c) != Some(Mark::Circle) {
                    continue;
                }
                if let Some((d, a)) = find_discriminating_path(g, b, c) {
                    let sep = sepsets.get(d, c).unwrap_or(&[]);
                    if sep.contains(&b) {
                        g.set_mark_at(b, c, Mark::Tail)?;
                        g.set_mark_at(c, b, Mark::Arrow)?;
                    } else {
                        g.set_mark_at(a, b, Mark::Arrow)?;
                        g.set_mark_at(b, a, Mark::Arrow)?;
                        g.set_mark_at(b, c, Mark::Arrow)?;
                        g.set_mark_at(c, b, Mark::Arrow)?;
                    }
                    changed = true;
                }
            }
        }

        // R8: a -> b -> c (or a -o b -> c) and a o-> c => a -> c
        for a in 0..p {
            for c in g.neighbors(a) {
                if g.mark_at(a, c) != Some(Mark::Circle)
                    || g.mark_at(c, a) != Some(Mark::Arrow)
                {
                    continue;
                }
                for b in g.neighbors(a) {
                    if b == c || !g.is_directed(b, c) {
                        continue;
                    }
                    let first = g.is_directed(a, b)
                        || (g.mark_at(a, b) == Some(Mark::Tail)
                            && g.mark_at(b, a) == Some(Mark::Circle));
                    if first {
                        g.set_mark_at(a, c, Mark::Tail)?;
                        changed = true;
                        break;
                    }
                }
            }
        }

        // R9: a o-> c and an uncovered p.d. path <a, b, ..., c> with b, c
        //     nonadjacent => a -> c
        for a in 0..p {
            for c in g.neighbors(a) {
                if g.mark_at(a, c) != Some(Mark::Circle)
                    || g.mark_at(c, a) != Some(Mark::Arrow)
                {
                    continue;
                }
                for b in g.neighbors(a) {
                    if b == c || g.adjacent(b, c) {
                        continue;
                    }
                    if has_uncovered_pd_path(g, a, b, c) {
                        g.set_mark_at(a, c, Mark::Tail)?;
                        changed = true;
                        break;
                    }
                }
            }
        }

        // R10: a o-> c, b -> c <- d, uncovered p.d. paths a..b and a..d
        //      whose first nodes are distinct and nonadjacent => a -> c
        for a in 0..p {
            for c in g.neighbors(a) {
                if g.mark_at(a, c) != Some(Mark::Circle)
                    || g.mark_at(c, a) != Some(Mark::Arrow)
                {
                    continue;
                }
                let into_c: Vec<usize> = g
                    .neighbors(c)
                    .into_iter()
                    .filter(|&x| x != a && g.is_directed(x, c))
                    .collect();
                let firsts: Vec<usize> = g.neighbors(a).into_iter().filter(|&x| x != c).collect();
                let mut fired = false;
                for bi in 0..into_c.len() {
                    for di in 0..into_c.len() {
                        if bi == di {
                            continue;
                        }
                        let (b, d) = (into_c[bi], into_c[di]);
                        for &mu in &firsts {
                            if !has_uncovered_pd_path(g, a, mu, b) {
                                continue;
                            }
                            for &om in &firsts {
                                if om == mu || g.adjacent(mu, om) {
                                    continue;
                                }
                                if has_uncovered_pd_path(g, a, om, d) {
                                    g.set_mark_at(a, c, Mark::Tail)?;
                                    changed = true;
                                    fired = true;
                                    break;
                                }
                            }
                            if fired {
                                break;
                            }
                        }
                        if fired {
                            break;
                        }
                    }
                    if fired {
                        break;
                    }
                }
            }
        }

        if !changed {
            break;
        }
    }
    Ok(())
}

/// FCI: PC skeleton, collider orientation, Possible-D-SEP edge re-testing,
/// re-orientation from circles, then Zhang's rules to fixpoint.
pub fn fci_search<F>(
    ci: &F,
    p: usize,
    cfg: &SearchConfig,
) -> Result<(MixedGraph, SepsetTable)>
where
    F: Fn(usize, usize, &[usize]) -> Result<bool>,
{
    let (skel, mut sepsets) = pc_skeleton(ci, p, cfg)?;
    let mut g = orient_colliders_with_circles(&skel, &sepsets)?;

    // re-test every remaining edge against subsets of Possible-D-SEP
    let edges: Vec<(usize, usize)> = g.edges().map(|(i, j, _, _)| (i, j)).collect();
    for (i, j) in edges {
        let mut removed = false;
        for &x in &[i, j] {
            let other = if x == i { j } else { i };
            let pool: Vec<usize> = possible_d_sep(&g, x)
                .into_iter()
                .filter(|&v| v != i && v != j)
                .collect();
            let max_k = cfg.max_cond_size.unwrap_or(pool.len()).min(pool.len());
            for k in 1..=max_k {
                let found = for_each_subset(&pool, k, &mut |s| {
                    let independent = ci(x, other, s)?;
                    if cfg.verbose {
                        eprintln!("ci(pds): {x} vs {other} | {s:?} -> {independent}");
                    }
                    Ok(independent.then(|| s.to_vec()))
                })?;
                if let Some(s) = found {
                    g.remove_edge(i, j);
                    sepsets.insert(i, j, s);
                    removed = true;
                    break;
                }
            }
            if removed {
                break;
            }
        }
    }

    // reset to circles and re-orient with the updated sepsets
    let skel2 = g.skeleton();
    let mut pag = orient_colliders_with_circles(&skel2, &sepsets)?;
    apply_fci_rules(&mut pag, &sepsets)?;
    pag.set_kind(GraphKind::Pag);
    Ok((pag, sepsets))
}

/// PC end-to-end: skeleton, v-structures, Meek closure.
pub fn pc_search<F>(ci: &F, p: usize, cfg: &SearchConfig) -> Result<(MixedGraph, SepsetTable)>
where
    F: Fn(usize, usize, &[usize]) -> Result<bool>,
{
    let (skel, sepsets) = pc_skeleton(ci, p, cfg)?;
    let pdag = orient_v_structures(&skel, &sepsets)?;
    let cpdag = apply_meek_rules(&pdag)?;
    Ok((cpdag, sepsets))
}

pub(crate) fn fisher_ci_fn<'a>(
    ctx: &'a CiContext,
    verbose: bool,
) -> impl Fn(usize, usize, &[usize]) -> Result<bool> + 'a {
    move |u, v, s| {
        let d = fisher_z_ci_test(ctx, u, v, s)?;
        if verbose {
            eprintln!(
                "{u} ⟂ {v} | {s:?} : rho={:.6}, stat={:.4}, {}",
                d.rho,
                d.statistic,
                if d.independent { "independent" } else { "dependent" }
            );
        }
        Ok(d.independent)
    }
}

/// Kernel-alignment PC: pseudo-correlation matrix feeding a Fisher-z CI
/// test feeding the PC search.
pub fn kapc(dataset: &Dataset, params: &KernelParams, cfg: &SearchConfig) -> Result<MixedGraph> {
    kapc_with(dataset, params, cfg, &AlignmentOptions::default())
}

pub fn kapc_with(
    dataset: &Dataset,
    params: &KernelParams,
    cfg: &SearchConfig,
    opts: &AlignmentOptions,
) -> Result<MixedGraph> {
    let pseudo = pseudo_correlation_with(dataset, params, opts)?;
    let ctx = CiContext::new(pseudo.entries().clone(), dataset.n_rows(), cfg.alpha)?;
    let ci = fisher_ci_fn(&ctx, cfg.verbose);
    let (mut cpdag, _) = pc_search(&ci, dataset.n_cols(), cfg)?;
    cpdag = with_labels(cpdag, dataset.labels());
    Ok(cpdag)
}

/// Kernel-alignment FCI: same front end feeding the FCI search.
pub fn kafci(dataset: &Dataset, params: &KernelParams, cfg: &SearchConfig) -> Result<MixedGraph> {
    kafci_with(dataset, params, cfg, &AlignmentOptions::default())
}

pub fn kafci_with(
    dataset: &Dataset,
    params: &KernelParams,
    cfg: &SearchConfig,
    opts: &AlignmentOptions,
) -> Result<MixedGraph> {
    let pseudo = pseudo_correlation_with(dataset, params, opts)?;
    let ctx = CiContext::new(pseudo.entries().clone(), dataset.n_rows(), cfg.alpha)?;
    let ci = fisher_ci_fn(&ctx, cfg.verbose);
    let (mut pag, _) = fci_search(&ci, dataset.n_cols(), cfg)?;
    pag = with_labels(pag, dataset.labels());
    Ok(pag)
}

pub(crate) fn with_labels(g: MixedGraph, labels: Vec<String>) -> MixedGraph {
    let mut out = MixedGraph::new(g.kind(), labels);
    for (i, j, mi, mj) in g.edges() {
        out.set_edge(i, j, mi, mj).unwrap();
    }
    out
}
