//! Mixed graphs with typed endpoint marks (DAG / CPDAG / PAG), the
//! d-separation oracle, and text-format I/O.
//!
//! Edges are stored once per unordered pair with `i < j`; direction is
//! encoded purely by the two endpoint marks.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;
use std::path::Path;

use crate::{Error, Result};

/// Endpoint mark of an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mark {
    Tail,
    Arrow,
    Circle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphKind {
    Dag,
    Cpdag,
    Pag,
    Pdag,
}

impl GraphKind {
    fn as_str(self) -> &'static str {
        match self {
            GraphKind::Dag => "dag",
            GraphKind::Cpdag => "cpdag",
            GraphKind::Pag => "pag",
            GraphKind::Pdag => "pdag",
        }
    }
}

/// One graph representation covering DAGs, CPDAGs, PDAGs and PAGs.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedGraph {
    kind: GraphKind,
    labels: Vec<String>,
    /// key (i, j) with i < j; value (mark at i, mark at j).
    edges: BTreeMap<(usize, usize), (Mark, Mark)>,
}

impl MixedGraph {
    pub fn new(kind: GraphKind, labels: Vec<String>) -> Self {
        MixedGraph {
            kind,
            labels,
            edges: BTreeMap::new(),
        }
    }

    /// Empty graph with labels `X1..Xp`.
    pub fn with_node_count(kind: GraphKind, p: usize) -> Self {
        Self::new(kind, (1..=p).map(|i| format!("X{i}")).collect())
    }

    pub fn kind(&self) -> GraphKind {
        self.kind
    }

    pub fn set_kind(&mut self, kind: GraphKind) {
        self.kind = kind;
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    fn check_node(&self, i: usize) -> Result<()> {
        if i >= self.labels.len() {
            return Err(Error::Input(format!(
                "node index {i} out of range (p = {})",
                self.labels.len()
            )));
        }
        Ok(())
    }

    /// Insert or replace the edge between `i` and `j`. `mark_i` is the mark
    /// at `i`'s end regardless of index order.
    pub fn set_edge(&mut self, i: usize, j: usize, mark_i: Mark, mark_j: Mark) -> Result<()> {
        self.check_node(i)?;
        self.check_node(j)?;
        if i == j {
            return Err(Error::Input(format!("self-loop at node {i}")));
        }
        if i < j {
            self.edges.insert((i, j), (mark_i, mark_j));
        } else {
            self.edges.insert((j, i), (mark_j, mark_i));
        }
        Ok(())
    }

    /// Convenience for DAG construction: directed edge `from -> to`.
    pub fn add_directed(&mut self, from: usize, to: usize) -> Result<()> {
        self.set_edge(from, to, Mark::Tail, Mark::Arrow)
    }

    pub fn remove_edge(&mut self, i: usize, j: usize) -> Option<(Mark, Mark)> {
        let key = if i < j { (i, j) } else { (j, i) };
        let removed = self.edges.remove(&key)?;
        Some(if i < j {
            removed
        } else {
            (removed.1, removed.0)
        })
    }

    /// Marks (at i, at j) of the edge between `i` and `j`, if present.
    pub fn edge(&self, i: usize, j: usize) -> Option<(Mark, Mark)> {
        if i < j {
            self.edges.get(&(i, j)).copied()
        } else {
            self.edges.get(&(j, i)).map(|&(a, b)| (b, a))
        }
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.edge(i, j).is_some()
    }

    /// Mark at `at`'s end of the edge between `at` and `other`.
    pub fn mark_at(&self, at: usize, other: usize) -> Option<Mark> {
        self.edge(at, other).map(|(m, _)| m)
    }

    /// Set only the mark at `at`'s end of an existing edge.
    pub fn set_mark_at(&mut self, at: usize, other: usize, mark: Mark) -> Result<()> {
        let (_, m_other) = self
            .edge(at, other)
            .ok_or_else(|| Error::Input(format!("no edge between {at} and {other}")))?;
        self.set_edge(at, other, mark, m_other)
    }

    /// Iterate edges as (i, j, mark at i, mark at j) with i < j.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, Mark, Mark)> + '_ {
        self.edges.iter().map(|(&(i, j), &(mi, mj))| (i, j, mi, mj))
    }

    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for (&(a, b), _) in &self.edges {
            if a == i {
                out.push(b);
            } else if b == i {
                out.push(a);
            }
        }
        out
    }

    /// Is `i -> j` (tail at i, arrow at j)?
    pub fn is_directed(&self, i: usize, j: usize) -> bool {
        self.edge(i, j) == Some((Mark::Tail, Mark::Arrow))
    }

    /// Is the edge i - j fully undirected (tail-tail)?
    pub fn is_undirected(&self, i: usize, j: usize) -> bool {
        self.edge(i, j) == Some((Mark::Tail, Mark::Tail))
    }

    /// Parents of `i` under the directed reading (tail at parent, arrow at i).
    pub fn parents(&self, i: usize) -> Vec<usize> {
        self.neighbors(i)
            .into_iter()
            .filter(|&u| self.is_directed(u, i))
            .collect()
    }

    pub fn children(&self, i: usize) -> Vec<usize> {
        self.neighbors(i)
            .into_iter()
            .filter(|&u| self.is_directed(i, u))
            .collect()
    }

    /// True if the directed part (tail-arrow edges) has no cycle.
    pub fn directed_part_acyclic(&self) -> bool {
        let p = self.node_count();
        let mut indeg = vec![0usize; p];
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); p];
        for (i, j, mi, mj) in self.edges() {
            if (mi, mj) == (Mark::Tail, Mark::Arrow) {
                children[i].push(j);
                indeg[j] += 1;
            } else if (mi, mj) == (Mark::Arrow, Mark::Tail) {
                children[j].push(i);
                indeg[i] += 1;
            }
        }
        let mut queue: VecDeque<usize> = (0..p).filter(|&v| indeg[v] == 0).collect();
        let mut seen = 0;
        while let Some(v) = queue.pop_front() {
            seen += 1;
            for &c in &children[v] {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    queue.push_back(c);
                }
            }
        }
        seen == p
    }

    /// Validate the per-kind edge invariants.
    pub fn validate(&self) -> Result<()> {
        for (i, j, mi, mj) in self.edges() {
            match self.kind {
                GraphKind::Dag => {
                    if !matches!((mi, mj), (Mark::Tail, Mark::Arrow) | (Mark::Arrow, Mark::Tail)) {
                        return Err(Error::Input(format!(
                            "DAG edge ({i},{j}) must be directed"
                        )));
                    }
                }
                GraphKind::Cpdag | GraphKind::Pdag => {
                    if mi == Mark::Circle || mj == Mark::Circle {
                        return Err(Error::Input(format!(
                            "{:?} edge ({i},{j}) may not carry circle marks",
                            self.kind
                        )));
                    }
                }
                GraphKind::Pag => {}
            }
        }
        if self.kind == GraphKind::Dag && !self.directed_part_acyclic() {
            return Err(Error::Input("DAG contains a directed cycle".into()));
        }
        Ok(())
    }

    /// A topological order of a DAG.
    pub fn topological_order(&self) -> Result<Vec<usize>> {
        let p = self.node_count();
        let mut indeg = vec![0usize; p];
        for v in 0..p {
            indeg[v] = self.parents(v).len();
        }
        let mut queue: VecDeque<usize> = (0..p).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(p);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for c in self.children(v) {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    queue.push_back(c);
                }
            }
        }
        if order.len() != p {
            return Err(Error::Input("graph is not acyclic".into()));
        }
        Ok(order)
    }

    /// Restriction of the graph to a node subset, keeping only edges whose
    /// endpoints both survive. Labels carry over.
    pub fn induced_subgraph(&self, keep: &[usize]) -> MixedGraph {
        let mut pos = vec![usize::MAX; self.node_count()];
        for (new, &old) in keep.iter().enumerate() {
            pos[old] = new;
        }
        let mut g = MixedGraph::new(
            self.kind,
            keep.iter().map(|&i| self.labels[i].clone()).collect(),
        );
        for (i, j, mi, mj) in self.edges() {
            if pos[i] != usize::MAX && pos[j] != usize::MAX {
                g.set_edge(pos[i], pos[j], mi, mj).unwrap();
            }
        }
        g
    }

    /// Skeleton copy: every edge becomes tail-tail, kind becomes Pdag.
    pub fn skeleton(&self) -> MixedGraph {
        let mut g = MixedGraph::new(GraphKind::Pdag, self.labels.clone());
        for (i, j, _, _) in self.edges() {
            g.set_edge(i, j, Mark::Tail, Mark::Tail).unwrap();
        }
        g
    }
}

/// Map from unordered variable pair to the conditioning set that separated it.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SepsetTable {
    entries: BTreeMap<(usize, usize), Vec<usize>>,
}

impl SepsetTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, i: usize, j: usize, s: Vec<usize>) {
        debug_assert!(!s.contains(&i) && !s.contains(&j));
        let key = if i < j { (i, j) } else { (j, i) };
        self.entries.insert(key, s);
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&[usize]> {
        let key = if i < j { (i, j) } else { (j, i) };
        self.entries.get(&key).map(|v| v.as_slice())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), &[usize])> + '_ {
        self.entries.iter().map(|(&k, v)| (k, v.as_slice()))
    }
}

/// d-separation of `i` and `j` given `s`, by reachability over active
/// paths (Bayes-ball style, linear in nodes + edges per query).
pub fn d_separated(dag: &MixedGraph, i: usize, j: usize, s: &BTreeSet<usize>) -> Result<bool> {
    if dag.kind() != GraphKind::Dag {
        return Err(Error::Input("d_separated requires a DAG".into()));
    }
    let p = dag.node_count();
    if i >= p || j >= p || s.iter().any(|&v| v >= p) {
        return Err(Error::Input("node index out of range".into()));
    }
    if i == j {
        return Err(Error::Input("query nodes must differ".into()));
    }
    if s.contains(&i) || s.contains(&j) {
        return Err(Error::Input("conditioning set may not contain the query pair".into()));
    }

    let mut parents: Vec<Vec<usize>> = vec![Vec::new(); p];
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); p];
    for (a, b, ma, mb) in dag.edges() {
        if (ma, mb) == (Mark::Tail, Mark::Arrow) {
            children[a].push(b);
            parents[b].push(a);
        } else {
            children[b].push(a);
            parents[a].push(b);
        }
    }

    // ancestors of S (including S itself)
    let mut anc = vec![false; p];
    let mut stack: Vec<usize> = s.iter().copied().collect();
    for &v in s {
        anc[v] = true;
    }
    while let Some(v) = stack.pop() {
        for &pa in &parents[v] {
            if !anc[pa] {
                anc[pa] = true;
                stack.push(pa);
            }
        }
    }

    // traversal state: (node, arrived-from-child)
    let mut visited = vec![[false; 2]; p];
    let mut queue = VecDeque::new();
    queue.push_back((i, true)); // start as if entered from a child
    while let Some((v, from_child)) = queue.pop_front() {
        let dir = from_child as usize;
        if visited[v][dir] {
            continue;
        }
        visited[v][dir] = true;
        if v == j {
            return Ok(false);
        }
        if from_child {
            if !s.contains(&v) {
                for &pa in &parents[v] {
                    queue.push_back((pa, true));
                }
                for &ch in &children[v] {
                    queue.push_back((ch, false));
                }
            }
        } else {
            if !s.contains(&v) {
                for &ch in &children[v] {
                    queue.push_back((ch, false));
                }
            }
            if anc[v] {
                for &pa in &parents[v] {
                    queue.push_back((pa, true));
                }
            }
        }
    }
    Ok(true)
}

/// CPDAG of a DAG: same skeleton, v-structures oriented, closure under the
/// Meek rules; everything else left undirected.
pub fn dag_to_cpdag(dag: &MixedGraph) -> Result<MixedGraph> {
    if dag.kind() != GraphKind::Dag {
        return Err(Error::Input("dag_to_cpdag requires a DAG".into()));
    }
    let mut pdag = dag.skeleton();
    // orient v-structures straight from the DAG
    let p = dag.node_count();
    for k in 0..p {
        let pa = dag.parents(k);
        for a in 0..pa.len() {
            for b in (a + 1)..pa.len() {
                let (i, j) = (pa[a], pa[b]);
                if !dag.adjacent(i, j) {
                    pdag.set_edge(i, k, Mark::Tail, Mark::Arrow)?;
                    pdag.set_edge(j, k, Mark::Tail, Mark::Arrow)?;
                }
            }
        }
    }
    crate::discovery::apply_meek_rules(&pdag)
}

/// True PAG of a DAG with the given latent nodes: runs FCI with the
/// d-separation oracle restricted to the observed variables.
pub fn true_pag(dag: &MixedGraph, latents: &BTreeSet<usize>) -> Result<MixedGraph> {
    if dag.kind() != GraphKind::Dag {
        return Err(Error::Input("true_pag requires a DAG".into()));
    }
    let observed: Vec<usize> = (0..dag.node_count()).filter(|v| !latents.contains(v)).collect();
    if observed.is_empty() {
        return Err(Error::Input("all nodes latent".into()));
    }
    let oracle = crate::citest::oracle_ci_test(dag.clone());
    let ci = |u: usize, v: usize, s: &[usize]| -> Result<bool> {
        let su: BTreeSet<usize> = s.iter().map(|&k| observed[k]).collect();
        oracle(observed[u], observed[v], &su)
    };
    let cfg = crate::discovery::SearchConfig {
        algorithm: crate::discovery::Algorithm::Fci,
        ..Default::default()
    };
    let (mut pag, _) = crate::discovery::fci_search(&ci, observed.len(), &cfg)?;
    pag = relabel(pag, observed.iter().map(|&i| dag.labels()[i].clone()).collect());
    Ok(pag)
}

fn relabel(mut g: MixedGraph, labels: Vec<String>) -> MixedGraph {
    g.labels = labels;
    g
}

// ---------------------------------------------------------------------------
// text format

fn mark_char(mark: Mark, left: bool) -> char {
    match (mark, left) {
        (Mark::Tail, _) => '-',
        (Mark::Arrow, true) => '<',
        (Mark::Arrow, false) => '>',
        (Mark::Circle, _) => 'o',
    }
}

fn parse_mark(c: char, left: bool) -> Result<Mark> {
    match (c, left) {
        ('-', _) => Ok(Mark::Tail),
        ('<', true) | ('>', false) => Ok(Mark::Arrow),
        ('o', _) => Ok(Mark::Circle),
        _ => Err(Error::Data(format!("bad mark character '{c}'"))),
    }
}

impl MixedGraph {
    /// Serialize in the line-oriented text format:
    /// a `#kind:` header, a `#nodes:` header, then one edge per line
    /// like `X1 -> X2`, `X3 o> X4`, `X5 -- X6`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "#kind: {}", self.kind.as_str()).unwrap();
        writeln!(out, "#nodes: {}", self.labels.join(",")).unwrap();
        for (i, j, mi, mj) in self.edges() {
            writeln!(
                out,
                "{} {}{} {}",
                self.labels[i],
                mark_char(mi, true),
                mark_char(mj, false),
                self.labels[j]
            )
            .unwrap();
        }
        out
    }

    pub fn from_text(text: &str) -> Result<MixedGraph> {
        let mut kind = None;
        let mut labels: Option<Vec<String>> = None;
        let mut edges = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("#kind:") {
                kind = Some(match rest.trim() {
                    "dag" => GraphKind::Dag,
                    "cpdag" => GraphKind::Cpdag,
                    "pag" => GraphKind::Pag,
                    "pdag" => GraphKind::Pdag,
                    other => return Err(Error::Data(format!("unknown graph kind '{other}'"))),
                });
            } else if let Some(rest) = line.strip_prefix("#nodes:") {
                labels = Some(
                    rest.split(',')
                        .map(|s| s.trim().to_string())
                        .filter(|s| !s.is_empty())
                        .collect(),
                );
            } else if line.starts_with('#') {
                continue;
            } else {
                edges.push(line.to_string());
            }
        }
        let kind = kind.ok_or_else(|| Error::Data("missing #kind header".into()))?;
        let labels = labels.ok_or_else(|| Error::Data("missing #nodes header".into()))?;
        let index: BTreeMap<&str, usize> = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i))
            .collect();
        let mut g = MixedGraph::new(kind, labels.clone());
        for line in &edges {
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(Error::Data(format!("bad edge line '{line}'")));
            }
            let marks: Vec<char> = parts[1].chars().collect();
            if marks.len() != 2 {
                return Err(Error::Data(format!("bad edge marks '{}'", parts[1])));
            }
            let i = *index
                .get(parts[0])
                .ok_or_else(|| Error::Data(format!("unknown node '{}'", parts[0])))?;
            let j = *index
                .get(parts[2])
                .ok_or_else(|| Error::Data(format!("unknown node '{}'", parts[2])))?;
            g.set_edge(i, j, parse_mark(marks[0], true)?, parse_mark(marks[1], false)?)?;
        }
        g.validate()?;
        Ok(g)
    }

    pub fn write_file(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn read_file(path: &Path) -> Result<MixedGraph> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        MixedGraph::from_text(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain3() -> MixedGraph {
        // A -> B -> C
        let mut g = MixedGraph::new(
            GraphKind::Dag,
            vec!["A".into(), "B".into(), "C".into()],
        );
        g.add_directed(0, 1).unwrap();
        g.add_directed(1, 2).unwrap();
        g
    }

    fn collider3() -> MixedGraph {
        // A -> B <- C
        let mut g = MixedGraph::new(
            GraphKind::Dag,
            vec!["A".into(), "B".into(), "C".into()],
        );
        g.add_directed(0, 1).unwrap();
        g.add_directed(2, 1).unwrap();
        g
    }

    fn set(vals: &[usize]) -> BTreeSet<usize> {
        vals.iter().copied().collect()
    }

    #[test]
    fn dsep_chain_blocked_by_middle() {
        assert!(d_separated(&chain3(), 0, 2, &set(&[1])).unwrap());
        assert!(!d_separated(&chain3(), 0, 2, &set(&[])).unwrap());
    }

    #[test]
    fn dsep_conditioned_collider_opens() {
        assert!(!d_separated(&collider3(), 0, 2, &set(&[1])).unwrap());
        assert!(d_separated(&collider3(), 0, 2, &set(&[])).unwrap());
    }

    #[test]
    fn dsep_descendant_of_collider_opens() {
        // A -> B <- C, B -> D; conditioning on D opens the collider
        let mut g = collider3();
        g.labels.push("D".into());
        g.add_directed(1, 3).unwrap();
        assert!(!d_separated(&g, 0, 2, &set(&[3])).unwrap());
    }

    #[test]
    fn dsep_input_errors() {
        assert!(d_separated(&chain3(), 0, 9, &set(&[])).is_err());
        assert!(d_separated(&chain3(), 0, 0, &set(&[])).is_err());
        assert!(d_separated(&chain3(), 0, 2, &set(&[0])).is_err());
    }

    #[test]
    fn cpdag_of_chain_is_undirected() {
        let c = dag_to_cpdag(&chain3()).unwrap();
        assert!(c.is_undirected(0, 1));
        assert!(c.is_undirected(1, 2));
    }

    #[test]
    fn cpdag_preserves_v_structure() {
        let c = dag_to_cpdag(&collider3()).unwrap();
        assert!(c.is_directed(0, 1));
        assert!(c.is_directed(2, 1));
    }

    #[test]
    fn cpdag_single_edge_undirected() {
        let mut g = MixedGraph::new(GraphKind::Dag, vec!["A".into(), "B".into()]);
        g.add_directed(0, 1).unwrap();
        let c = dag_to_cpdag(&g).unwrap();
        assert!(c.is_undirected(0, 1));
    }

    #[test]
    fn text_roundtrip() {
        let mut g = MixedGraph::new(
            GraphKind::Pag,
            vec!["X1".into(), "X2".into(), "X3".into(), "X4".into()],
        );
        g.set_edge(0, 1, Mark::Tail, Mark::Arrow).unwrap();
        g.set_edge(2, 3, Mark::Circle, Mark::Arrow).unwrap();
        g.set_edge(0, 3, Mark::Arrow, Mark::Arrow).unwrap();
        let text = g.to_text();
        assert!(text.contains("X1 -> X2"));
        assert!(text.contains("X3 o> X4"));
        assert!(text.contains("X1 <> X4"));
        let back = MixedGraph::from_text(&text).unwrap();
        assert_eq!(g, back);
    }

    #[test]
    fn text_rejects_garbage() {
        assert!(MixedGraph::from_text("#nodes: A,B\nA -> B").is_err());
        assert!(MixedGraph::from_text("#kind: dag\n#nodes: A,B\nA xx B").is_err());
        assert!(MixedGraph::from_text("#kind: dag\n#nodes: A,B\nA -> C").is_err());
    }

    #[test]
    fn true_pag_no_latents_circles_on_chain() {
        let pag = true_pag(&chain3(), &BTreeSet::new()).unwrap();
        assert_eq!(pag.edge_count(), 2);
        assert!(pag.edge(0, 1).is_some());
        assert!(pag.edge(1, 2).is_some());
        assert!(pag.edge(0, 2).is_none());
    }

    #[test]
    fn true_pag_latent_middle_keeps_pair_connected() {
        // A -> L -> B with L latent: A o-o B
        let mut g = MixedGraph::new(
            GraphKind::Dag,
            vec!["A".into(), "L".into(), "B".into()],
        );
        g.add_directed(0, 1).unwrap();
        g.add_directed(1, 2).unwrap();
        let pag = true_pag(&g, &set(&[1])).unwrap();
        assert_eq!(pag.node_count(), 2);
        assert_eq!(pag.edge(0, 1), Some((Mark::Circle, Mark::Circle)));
    }

    #[test]
    fn true_pag_all_but_one_latent_is_empty() {
        let pag = true_pag(&chain3(), &set(&[1, 2])).unwrap();
        assert_eq!(pag.node_count(), 1);
        assert_eq!(pag.edge_count(), 0);
    }

    #[test]
    fn true_pag_all_latent_errors() {
        assert!(true_pag(&chain3(), &set(&[0, 1, 2])).is_err());
    }

    #[test]
    fn validate_rejects_cycle_and_bad_marks() {
        let mut g = MixedGraph::new(GraphKind::Dag, vec!["A".into(), "B".into()]);
        g.set_edge(0, 1, Mark::Circle, Mark::Arrow).unwrap();
        assert!(g.validate().is_err());
        let mut c = MixedGraph::with_node_count(GraphKind::Cpdag, 2);
        c.set_edge(0, 1, Mark::Circle, Mark::Circle).unwrap();
        assert!(c.validate().is_err());
    }
}
