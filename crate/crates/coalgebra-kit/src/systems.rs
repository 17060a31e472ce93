//! Finite pointed graphs and labelled transition systems as finite
//! generators of (possibly infinite) finitely branching trees.
//!
//! A pointed graph unfolds to the tree whose nodes are the root-originating
//! paths; cycles unfold to infinite trees, so only depth-bounded unfoldings
//! are materialized. Bisimilarity is decided by partition refinement on the
//! disjoint union of the two state spaces, and the refinement rounds line up
//! with the depth-n approximants of the unfoldings: two states land in the
//! same round-n block exactly when their depth-n approximants coincide.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::metrics::{ExtRat, FinMetricSpace};
use crate::trees::{CanonicalTree, RawTree};
use crate::value::Value;

#[derive(Debug, Error)]
pub enum SystemsError {
    #[error("alphabet mismatch between the two systems")]
    AlphabetMismatch,
    #[error("labelled input where an unlabelled graph is required")]
    LabelledInput,
    #[error("unknown node: {0}")]
    UnknownNode(String),
    #[error("invalid graph: {0}")]
    BadGraph(String),
    #[error("graph parse error: {0}")]
    Json(String),
}

/// A finite label alphabet; symbols are kept sorted so equal alphabets have
/// equal representations. The optional metric is a distance table over the
/// symbols.
#[derive(Debug, Clone, PartialEq)]
pub struct Alphabet {
    symbols: Vec<String>,
    metric: Option<FinMetricSpace>,
}

impl Alphabet {
    pub fn new(symbols: impl IntoIterator<Item = String>) -> Alphabet {
        let mut symbols: Vec<String> = symbols.into_iter().collect();
        symbols.sort();
        symbols.dedup();
        Alphabet {
            symbols,
            metric: None,
        }
    }

    pub fn with_metric(
        symbols: impl IntoIterator<Item = String>,
        metric: FinMetricSpace,
    ) -> Result<Alphabet, SystemsError> {
        let a = Alphabet::new(symbols);
        let expected: Vec<Value> = a.symbols.iter().map(|s| Value::Str(s.clone())).collect();
        if metric.points().as_slice() != expected.as_slice() {
            return Err(SystemsError::BadGraph(
                "alphabet metric must be a table over exactly the symbols".into(),
            ));
        }
        Ok(Alphabet {
            symbols: a.symbols,
            metric: Some(metric),
        })
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn metric(&self) -> Option<&FinMetricSpace> {
        self.metric.as_ref()
    }

    pub fn index_of(&self, symbol: &str) -> Option<usize> {
        self.symbols
            .binary_search_by(|s| s.as_str().cmp(symbol))
            .ok()
    }
}

/// Successor list of one state: (label, target) pairs, `None` being the
/// reserved label of unlabelled graphs.
pub type StateSuccessors = Vec<(Option<usize>, usize)>;

/// A finite rooted directed graph with optional edge labels; cycles are
/// allowed. Unlabelled graphs carry no alphabet and use `None` as the single
/// reserved label.
#[derive(Debug, Clone, PartialEq)]
pub struct PointedGraph {
    names: Vec<String>,
    /// Deduplicated edge set.
    edges: Vec<(usize, Option<usize>, usize)>,
    succ: Vec<StateSuccessors>,
    root: usize,
    alphabet: Option<Alphabet>,
}

impl PointedGraph {
    pub fn unlabelled(
        n_nodes: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
        root: usize,
    ) -> Result<PointedGraph, SystemsError> {
        let edges = edges.into_iter().map(|(x, y)| (x, None, y));
        Self::build(
            (0..n_nodes).map(|i| i.to_string()).collect(),
            edges.collect(),
            root,
            None,
        )
    }

    pub fn labelled(
        n_nodes: usize,
        edges: impl IntoIterator<Item = (usize, usize, usize)>,
        root: usize,
        alphabet: Alphabet,
    ) -> Result<PointedGraph, SystemsError> {
        let edges = edges.into_iter().map(|(x, l, y)| (x, Some(l), y));
        Self::build(
            (0..n_nodes).map(|i| i.to_string()).collect(),
            edges.collect(),
            root,
            Some(alphabet),
        )
    }

    fn build(
        names: Vec<String>,
        mut edges: Vec<(usize, Option<usize>, usize)>,
        root: usize,
        alphabet: Option<Alphabet>,
    ) -> Result<PointedGraph, SystemsError> {
        let n = names.len();
        if root >= n {
            return Err(SystemsError::UnknownNode(format!("root {root}")));
        }
        for &(x, l, y) in &edges {
            if x >= n {
                return Err(SystemsError::UnknownNode(x.to_string()));
            }
            if y >= n {
                return Err(SystemsError::UnknownNode(y.to_string()));
            }
            match (l, &alphabet) {
                (Some(i), Some(a)) if i >= a.symbols.len() => {
                    return Err(SystemsError::BadGraph(format!(
                        "label index {i} out of range"
                    )))
                }
                (Some(_), None) => {
                    return Err(SystemsError::BadGraph(
                        "labelled edge in a graph without an alphabet".into(),
                    ))
                }
                _ => {}
            }
        }
        edges.sort();
        edges.dedup();
        let mut succ = vec![Vec::new(); n];
        for &(x, l, y) in &edges {
            succ[x].push((l, y));
        }
        Ok(PointedGraph {
            names,
            edges,
            succ,
            root,
            alphabet,
        })
    }

    /// The one-node graph with no edges.
    pub fn single_node() -> PointedGraph {
        PointedGraph::unlabelled(1, [], 0).unwrap()
    }

    /// The one-node graph with a self-loop.
    pub fn self_loop() -> PointedGraph {
        PointedGraph::unlabelled(1, [(0, 0)], 0).unwrap()
    }

    /// An unlabelled path `0 -> 1 -> ... -> n`.
    pub fn path(n: usize) -> PointedGraph {
        PointedGraph::unlabelled(n + 1, (0..n).map(|i| (i, i + 1)), 0).unwrap()
    }

    /// A tree-shaped generator of a finite tree.
    pub fn from_raw_tree(t: &RawTree) -> PointedGraph {
        let edges = (0..t.node_count()).flat_map(|x| t.children_of(x).iter().map(move |&c| (x, c)));
        PointedGraph::unlabelled(t.node_count(), edges, t.root()).unwrap()
    }

    pub fn from_canonical_tree(t: &CanonicalTree) -> PointedGraph {
        PointedGraph::from_raw_tree(&t.to_raw())
    }

    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    pub fn node_names(&self) -> &[String] {
        &self.names
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn edges(&self) -> &[(usize, Option<usize>, usize)] {
        &self.edges
    }

    pub fn successors(&self, x: usize) -> &[(Option<usize>, usize)] {
        &self.succ[x]
    }

    pub fn alphabet(&self) -> Option<&Alphabet> {
        self.alphabet.as_ref()
    }

    pub fn is_labelled(&self) -> bool {
        self.alphabet.is_some()
    }

    /// The same graph pointed at a different node.
    pub fn reroot(&self, x: usize) -> Result<PointedGraph, SystemsError> {
        if x >= self.node_count() {
            return Err(SystemsError::UnknownNode(x.to_string()));
        }
        let mut g = self.clone();
        g.root = x;
        Ok(g)
    }

    /// Forgets labels (and the alphabet), deduplicating parallel edges.
    pub fn strip_labels(&self) -> PointedGraph {
        let edges = self.edges.iter().map(|&(x, _, y)| (x, None, y)).collect();
        PointedGraph::build(self.names.clone(), edges, self.root, None).unwrap()
    }

    /// Partition-refinement round history on this graph's own state space.
    pub fn refinement_rounds(&self) -> Vec<Partition> {
        refinement_rounds(&self.succ)
    }

    fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.node_count()];
        let mut stack = vec![self.root];
        seen[self.root] = true;
        while let Some(x) = stack.pop() {
            for &(_, y) in &self.succ[x] {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        seen
    }

    /// Depth-n tree unfolding: the nodes of the result are the
    /// root-originating paths with at most `n` edges.
    pub fn unfold(&self, n: usize) -> RawTree {
        fn go(g: &PointedGraph, x: usize, n: usize) -> RawTree {
            if n == 0 {
                return RawTree::leaf();
            }
            RawTree::branch(g.succ[x].iter().map(|&(_, y)| go(g, y, n - 1)).collect())
        }
        go(self, self.root, n)
    }

    /// Depth-n unfolding with edge labels preserved.
    pub fn unfold_labelled(&self, n: usize) -> LabelledTree {
        fn go(
            g: &PointedGraph,
            x: usize,
            n: usize,
            out: &mut Vec<Vec<(Option<usize>, usize)>>,
        ) -> usize {
            let me = out.len();
            out.push(Vec::new());
            if n > 0 {
                for &(l, y) in &g.succ[x] {
                    let c = go(g, y, n - 1, out);
                    out[me].push((l, c));
                }
            }
            me
        }
        let mut children = Vec::new();
        let root = go(self, self.root, n, &mut children);
        LabelledTree {
            children,
            root,
            alphabet: self.alphabet.clone(),
        }
    }
}

/// A depth-bounded unfolding of a labelled graph: a finite tree whose edges
/// carry labels.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelledTree {
    children: Vec<Vec<(Option<usize>, usize)>>,
    root: usize,
    alphabet: Option<Alphabet>,
}

impl LabelledTree {
    pub fn node_count(&self) -> usize {
        self.children.len()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn children_of(&self, x: usize) -> &[(Option<usize>, usize)] {
        &self.children[x]
    }

    /// Forgets the labels.
    pub fn shape(&self) -> RawTree {
        fn go(t: &LabelledTree, x: usize) -> RawTree {
            RawTree::branch(t.children[x].iter().map(|&(_, c)| go(t, c)).collect())
        }
        go(self, self.root)
    }
}

impl fmt::Display for LabelledTree {
    /// Bracket text with `label:` prefixes on labelled children, e.g.
    /// `[a:[],b:[[]]]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(t: &LabelledTree, x: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            write!(f, "[")?;
            for (i, &(l, c)) in t.children[x].iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                if let (Some(li), Some(a)) = (l, &t.alphabet) {
                    write!(f, "{}:", a.symbols[li])?;
                }
                go(t, c, f)?;
            }
            write!(f, "]")
        }
        go(self, self.root, f)
    }
}

/// A partition of a state space into disjoint blocks, with the refinement
/// round that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    block_of: Vec<usize>,
    round: usize,
}

impl Partition {
    fn trivial(n: usize) -> Partition {
        Partition {
            block_of: vec![0; n],
            round: 0,
        }
    }

    pub fn round(&self) -> usize {
        self.round
    }

    pub fn block_of(&self, x: usize) -> usize {
        self.block_of[x]
    }

    pub fn block_count(&self) -> usize {
        self.block_of.iter().max().map_or(0, |&m| m + 1)
    }

    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.block_count()];
        for (x, &b) in self.block_of.iter().enumerate() {
            blocks[b].push(x);
        }
        blocks
    }

    pub fn same_block(&self, x: usize, y: usize) -> bool {
        self.block_of[x] == self.block_of[y]
    }
}

/// One signature-refinement step. The signature of a state is its current
/// block together with the set of (label, successor block) pairs, so each
/// round refines the previous partition and round n equates exactly the
/// states whose depth-n approximants agree.
fn refine_step(succ: &[StateSuccessors], p: &Partition) -> Partition {
    let mut sig_ids: HashMap<(usize, StateSuccessors), usize> = HashMap::new();
    let mut block_of = Vec::with_capacity(succ.len());
    for (x, out) in succ.iter().enumerate() {
        let mut sig: Vec<(Option<usize>, usize)> =
            out.iter().map(|&(l, y)| (l, p.block_of[y])).collect();
        sig.sort();
        sig.dedup();
        let next = sig_ids.len();
        let id = *sig_ids.entry((p.block_of[x], sig)).or_insert(next);
        block_of.push(id);
    }
    Partition {
        block_of,
        round: p.round + 1,
    }
}

/// Runs the refinement loop to its fixpoint, returning the full round
/// history (round 0 is the one-block partition). The last two entries are
/// equal as partitions: refinement has stabilized.
pub fn refinement_rounds(succ: &[StateSuccessors]) -> Vec<Partition> {
    let mut rounds = vec![Partition::trivial(succ.len())];
    loop {
        let next = refine_step(succ, rounds.last().unwrap());
        let stable = next.block_of == rounds.last().unwrap().block_of;
        rounds.push(next);
        if stable {
            return rounds;
        }
    }
}

/// Successor lists of the disjoint union of two graphs, with the second
/// graph's labels translated into the first graph's alphabet ordering.
fn union_succ(g1: &PointedGraph, g2: &PointedGraph) -> Result<Vec<StateSuccessors>, SystemsError> {
    match (&g1.alphabet, &g2.alphabet) {
        (None, None) => {}
        (Some(a), Some(b)) if a.symbols == b.symbols => {}
        _ => return Err(SystemsError::AlphabetMismatch),
    }
    let n1 = g1.node_count();
    let mut succ: Vec<StateSuccessors> = Vec::with_capacity(n1 + g2.node_count());
    for x in 0..n1 {
        succ.push(g1.succ[x].clone());
    }
    for x in 0..g2.node_count() {
        succ.push(g2.succ[x].iter().map(|&(l, y)| (l, y + n1)).collect());
    }
    Ok(succ)
}

/// The largest bisimulation between two graphs, if it relates the roots.
#[derive(Debug, Clone)]
pub struct BisimWitness {
    /// The stable partition over the disjoint union; states `0..n1` come
    /// from the first graph, the rest from the second.
    pub partition: Partition,
    /// Cross pairs (node of g1, node of g2) in a common block.
    pub pairs: Vec<(usize, usize)>,
}

/// Decides bisimilarity of the two roots by partition refinement on the
/// disjoint union; on labelled systems an `a`-child must be matched by an
/// `a`-child. Returns the stable-partition witness, or `None`.
pub fn bisimilar(
    g1: &PointedGraph,
    g2: &PointedGraph,
) -> Result<Option<BisimWitness>, SystemsError> {
    let succ = union_succ(g1, g2)?;
    let stable = refinement_rounds(&succ).pop().unwrap();
    let n1 = g1.node_count();
    if !stable.same_block(g1.root, n1 + g2.root) {
        return Ok(None);
    }
    let mut pairs = Vec::new();
    for x in 0..n1 {
        for y in 0..g2.node_count() {
            if stable.same_block(x, n1 + y) {
                pairs.push((x, y));
            }
        }
    }
    Ok(Some(BisimWitness {
        partition: stable,
        pairs,
    }))
}

/// The least depth at which the unfoldings of the two graphs become
/// distinguishable: the least n with `∂_n(unfold g1) != ∂_n(unfold g2)`.
/// `None` exactly when the graphs are bisimilar.
pub fn separation_depth(
    g1: &PointedGraph,
    g2: &PointedGraph,
) -> Result<Option<usize>, SystemsError> {
    let succ = union_succ(g1, g2)?;
    let rounds = refinement_rounds(&succ);
    let r1 = g1.root;
    let r2 = g1.node_count() + g2.root;
    for p in &rounds {
        if !p.same_block(r1, r2) {
            return Ok(Some(p.round()));
        }
    }
    Ok(None)
}

/// The depth-n approximant of a graph's unfolding, computed by memoized
/// recursion over (node, depth) — equal to `partial_n(g.unfold(n), n)` but
/// polynomial even where the unfolding itself explodes.
pub fn depth_approximant(g: &PointedGraph, n: usize) -> CanonicalTree {
    fn go(
        g: &PointedGraph,
        x: usize,
        n: usize,
        memo: &mut HashMap<(usize, usize), CanonicalTree>,
    ) -> CanonicalTree {
        if n == 0 {
            return CanonicalTree::leaf();
        }
        if let Some(t) = memo.get(&(x, n)) {
            return *t;
        }
        let t = CanonicalTree::node(
            g.succ[x]
                .iter()
                .map(|&(_, y)| go(g, y, n - 1, memo))
                .collect::<Vec<_>>(),
        );
        memo.insert((x, n), t);
        t
    }
    go(g, g.root, n, &mut HashMap::new())
}

/// The leads-to relation on generators: some child subtree of `g1`'s
/// unfolding is bisimilar to `g2`'s unfolding.
pub fn leadsto(g1: &PointedGraph, g2: &PointedGraph) -> Result<bool, SystemsError> {
    if g1.is_labelled() || g2.is_labelled() {
        return Err(SystemsError::LabelledInput);
    }
    for &(l, c) in g1.successors(g1.root) {
        debug_assert!(l.is_none());
        if bisimilar(&g1.reroot(c)?, g2)?.is_some() {
            return Ok(true);
        }
    }
    Ok(false)
}

/// The definitional reading of leads-to, checked to a depth bound: for every
/// `n <= depth` the depth-n approximant of `g2`'s unfolding is a member of
/// the depth-(n+1) approximant of `g1`'s unfolding. For finite graphs this
/// agrees with [`leadsto`] once `depth` exceeds both state counts.
pub fn leadsto_definitional(
    g1: &PointedGraph,
    g2: &PointedGraph,
    depth: usize,
) -> Result<bool, SystemsError> {
    if g1.is_labelled() || g2.is_labelled() {
        return Err(SystemsError::LabelledInput);
    }
    for n in 0..=depth {
        let x = depth_approximant(g2, n);
        let s = depth_approximant(g1, n + 1);
        if !s.children().contains(&x) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Quotient of the reachable part of `g` by its largest bisimulation: a
/// minimal generator of the same behavior. Blocks are renumbered in
/// breadth-first order from the root block, so the output is deterministic.
pub fn minimize(g: &PointedGraph) -> PointedGraph {
    let rounds = refinement_rounds(&g.succ);
    let stable = rounds.last().unwrap();
    let reach = g.reachable();

    // Breadth-first renumbering of reachable blocks.
    let mut new_id: HashMap<usize, usize> = HashMap::new();
    let mut order = Vec::new();
    let mut queue = VecDeque::new();
    let root_block = stable.block_of(g.root);
    new_id.insert(root_block, 0);
    order.push(g.root);
    queue.push_back(g.root);
    let mut visited_blocks = HashSet::new();
    visited_blocks.insert(root_block);
    while let Some(x) = queue.pop_front() {
        for &(_, y) in &g.succ[x] {
            let b = stable.block_of(y);
            if visited_blocks.insert(b) {
                let id = new_id.len();
                new_id.insert(b, id);
                order.push(y);
                queue.push_back(y);
            }
        }
    }

    let mut edges = Vec::new();
    for x in 0..g.node_count() {
        if !reach[x] {
            continue;
        }
        let bx = new_id[&stable.block_of(x)];
        for &(l, y) in &g.succ[x] {
            edges.push((bx, l, new_id[&stable.block_of(y)]));
        }
    }
    let names = (0..new_id.len()).map(|i| i.to_string()).collect();
    PointedGraph::build(names, edges, 0, g.alphabet.clone()).unwrap()
}

// ---------------------------------------------------------------------------
// JSON interface
// ---------------------------------------------------------------------------

fn json_id(v: &serde_json::Value) -> Result<String, SystemsError> {
    match v {
        serde_json::Value::String(s) => Ok(s.clone()),
        serde_json::Value::Number(n) => Ok(n.to_string()),
        other => Err(SystemsError::Json(format!("bad node id: {other}"))),
    }
}

impl PointedGraph {
    /// Parses the graph JSON format:
    /// `{"nodes":[...], "root": id, "edges":[{"from":id,"to":id,"label":..}],
    ///   "alphabet": {"symbols":[...], "dist":[[...]]}}`.
    /// The alphabet block is required exactly when edges carry labels; the
    /// distance table inside it is optional.
    pub fn from_json(text: &str) -> Result<PointedGraph, SystemsError> {
        let v: serde_json::Value =
            serde_json::from_str(text).map_err(|e| SystemsError::Json(e.to_string()))?;
        Self::from_json_value(&v)
    }

    pub fn from_json_value(v: &serde_json::Value) -> Result<PointedGraph, SystemsError> {
        let obj = v
            .as_object()
            .ok_or_else(|| SystemsError::Json("expected a JSON object".into()))?;
        let nodes = obj
            .get("nodes")
            .and_then(|n| n.as_array())
            .ok_or_else(|| SystemsError::Json("missing \"nodes\" array".into()))?;
        let names: Vec<String> = nodes.iter().map(json_id).collect::<Result<_, _>>()?;
        let mut index: HashMap<&str, usize> = HashMap::new();
        for (i, name) in names.iter().enumerate() {
            if index.insert(name.as_str(), i).is_some() {
                return Err(SystemsError::Json(format!("duplicate node id {name}")));
            }
        }
        let root_name = json_id(
            obj.get("root")
                .ok_or_else(|| SystemsError::Json("missing \"root\"".into()))?,
        )?;
        let root = *index
            .get(root_name.as_str())
            .ok_or_else(|| SystemsError::UnknownNode(root_name.clone()))?;

        let alphabet = match obj.get("alphabet") {
            None => None,
            Some(a) => {
                let aobj = a
                    .as_object()
                    .ok_or_else(|| SystemsError::Json("bad \"alphabet\" block".into()))?;
                let symbols: Vec<String> = aobj
                    .get("symbols")
                    .and_then(|s| s.as_array())
                    .ok_or_else(|| SystemsError::Json("alphabet needs \"symbols\"".into()))?
                    .iter()
                    .map(json_id)
                    .collect::<Result<_, _>>()?;
                match aobj.get("dist") {
                    None => Some(Alphabet::new(symbols)),
                    Some(d) => {
                        let rows = d
                            .as_array()
                            .ok_or_else(|| SystemsError::Json("bad distance table".into()))?;
                        if rows.len() != symbols.len() {
                            return Err(SystemsError::Json(
                                "distance table size does not match symbols".into(),
                            ));
                        }
                        let mut table: HashMap<(String, String), ExtRat> = HashMap::new();
                        for (i, row) in rows.iter().enumerate() {
                            let row = row
                                .as_array()
                                .ok_or_else(|| SystemsError::Json("bad distance row".into()))?;
                            if row.len() != symbols.len() {
                                return Err(SystemsError::Json("ragged distance table".into()));
                            }
                            for (j, cell) in row.iter().enumerate() {
                                let d = parse_dist_cell(cell)?;
                                table.insert((symbols[i].clone(), symbols[j].clone()), d);
                            }
                        }
                        let space = FinMetricSpace::new(
                            symbols.iter().map(|s| Value::Str(s.clone())),
                            |x, y| match (x, y) {
                                (Value::Str(a), Value::Str(b)) => {
                                    table[&(a.clone(), b.clone())].clone()
                                }
                                _ => unreachable!(),
                            },
                        )
                        .map_err(|e| SystemsError::Json(e.to_string()))?;
                        Some(Alphabet::with_metric(symbols, space)?)
                    }
                }
            }
        };

        let mut edges = Vec::new();
        let edge_list = obj
            .get("edges")
            .and_then(|e| e.as_array())
            .ok_or_else(|| SystemsError::Json("missing \"edges\" array".into()))?;
        for e in edge_list {
            let eobj = e
                .as_object()
                .ok_or_else(|| SystemsError::Json("bad edge entry".into()))?;
            let from = json_id(
                eobj.get("from")
                    .ok_or_else(|| SystemsError::Json("edge missing \"from\"".into()))?,
            )?;
            let to = json_id(
                eobj.get("to")
                    .ok_or_else(|| SystemsError::Json("edge missing \"to\"".into()))?,
            )?;
            let x = *index
                .get(from.as_str())
                .ok_or_else(|| SystemsError::UnknownNode(from.clone()))?;
            let y = *index
                .get(to.as_str())
                .ok_or_else(|| SystemsError::UnknownNode(to.clone()))?;
            let label = match eobj.get("label") {
                None | Some(serde_json::Value::Null) => None,
                Some(l) => {
                    let l = json_id(l)?;
                    let a = alphabet.as_ref().ok_or_else(|| {
                        SystemsError::Json(format!("label {l} used without an \"alphabet\" block"))
                    })?;
                    Some(a.index_of(&l).ok_or_else(|| {
                        SystemsError::Json(format!("label {l} not declared in the alphabet"))
                    })?)
                }
            };
            edges.push((x, label, y));
        }
        PointedGraph::build(names, edges, root, alphabet)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let edges: Vec<serde_json::Value> = self
            .edges
            .iter()
            .map(|&(x, l, y)| {
                let mut e = serde_json::Map::new();
                e.insert("from".into(), self.names[x].clone().into());
                e.insert("to".into(), self.names[y].clone().into());
                if let (Some(li), Some(a)) = (l, &self.alphabet) {
                    e.insert("label".into(), a.symbols[li].clone().into());
                }
                serde_json::Value::Object(e)
            })
            .collect();
        let mut obj = serde_json::Map::new();
        let names: Vec<serde_json::Value> = self.names.iter().map(|n| n.clone().into()).collect();
        obj.insert("nodes".into(), names.into());
        obj.insert("root".into(), self.names[self.root].clone().into());
        obj.insert("edges".into(), edges.into());
        if let Some(a) = &self.alphabet {
            let mut ab = serde_json::Map::new();
            let symbols: Vec<serde_json::Value> =
                a.symbols.iter().map(|s| s.clone().into()).collect();
            ab.insert("symbols".into(), symbols.into());
            if let Some(m) = &a.metric {
                let rows: Vec<serde_json::Value> = a
                    .symbols
                    .iter()
                    .map(|s| {
                        let row: Vec<serde_json::Value> = a
                            .symbols
                            .iter()
                            .map(|t| {
                                m.dist(&Value::Str(s.clone()), &Value::Str(t.clone()))
                                    .unwrap()
                                    .to_string()
                                    .into()
                            })
                            .collect();
                        row.into()
                    })
                    .collect();
                ab.insert("dist".into(), rows.into());
            }
            obj.insert("alphabet".into(), ab.into());
        }
        serde_json::Value::Object(obj)
    }
}

fn parse_dist_cell(cell: &serde_json::Value) -> Result<ExtRat, SystemsError> {
    match cell {
        serde_json::Value::String(s) => s
            .parse::<ExtRat>()
            .map_err(|e| SystemsError::Json(e.to_string())),
        serde_json::Value::Number(n) if n.is_u64() => Ok(ExtRat::from_int(n.as_u64().unwrap())),
        other => Err(SystemsError::Json(format!("bad distance entry {other}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trees::{canonize, partial_n};

    // Exhaustive bisimilarity oracle over all relations containing the root
    // pair; only for tiny graphs.
    fn oracle_bisimilar(g1: &PointedGraph, g2: &PointedGraph) -> bool {
        let n1 = g1.node_count();
        let n2 = g2.node_count();
        assert!(n1 * n2 <= 16);
        'rel: for mask in 0u32..(1 << (n1 * n2)) {
            let related = |x: usize, y: usize| mask & (1 << (x * n2 + y)) != 0;
            if !related(g1.root(), g2.root()) {
                continue;
            }
            for x in 0..n1 {
                for y in 0..n2 {
                    if !related(x, y) {
                        continue;
                    }
                    for &(l, cx) in g1.successors(x) {
                        if !g2
                            .successors(y)
                            .iter()
                            .any(|&(l2, cy)| l2 == l && related(cx, cy))
                        {
                            continue 'rel;
                        }
                    }
                    for &(l, cy) in g2.successors(y) {
                        if !g1
                            .successors(x)
                            .iter()
                            .any(|&(l2, cx)| l2 == l && related(cx, cy))
                        {
                            continue 'rel;
                        }
                    }
                }
            }
            return true;
        }
        false
    }

    #[test]
    fn unfold_examples() {
        assert_eq!(PointedGraph::single_node().unfold(5), RawTree::leaf());
        assert_eq!(PointedGraph::self_loop().unfold(3), RawTree::path(3));
        let two = PointedGraph::unlabelled(3, [(0, 1), (0, 2)], 0).unwrap();
        assert_eq!(
            two.unfold(1),
            RawTree::branch(vec![RawTree::leaf(), RawTree::leaf()])
        );
    }

    #[test]
    fn bisimilar_examples() {
        let g = PointedGraph::unlabelled(2, [(0, 1), (1, 0)], 0).unwrap();
        let w = bisimilar(&g, &g).unwrap().expect("reflexive");
        assert!(w.pairs.contains(&(0, 0)));

        // self-loop vs two-node cycle: both unfold to the infinite path
        let w = bisimilar(&PointedGraph::self_loop(), &g).unwrap();
        assert!(w.is_some());

        // out-degree 0 vs 1 at the root
        assert!(
            bisimilar(&PointedGraph::single_node(), &PointedGraph::path(1))
                .unwrap()
                .is_none()
        );
    }

    #[test]
    fn bisimilar_matches_truncation_equality() {
        let g1 = PointedGraph::self_loop();
        let g2 = PointedGraph::unlabelled(3, [(0, 1), (1, 2), (2, 0)], 0).unwrap();
        assert!(bisimilar(&g1, &g2).unwrap().is_some());
        for n in 0..8 {
            assert_eq!(partial_n(&g1.unfold(n), n), partial_n(&g2.unfold(n), n));
        }
    }

    #[test]
    fn separation_depth_examples() {
        let g = PointedGraph::path(2);
        assert_eq!(separation_depth(&g, &g).unwrap(), None);
        assert_eq!(
            separation_depth(&PointedGraph::single_node(), &PointedGraph::path(1)).unwrap(),
            Some(1)
        );
        assert_eq!(
            separation_depth(&PointedGraph::self_loop(), &PointedGraph::path(3)).unwrap(),
            Some(4)
        );
    }

    #[test]
    fn separation_depth_matches_direct_truncations() {
        let samples = vec![
            PointedGraph::single_node(),
            PointedGraph::self_loop(),
            PointedGraph::path(1),
            PointedGraph::path(3),
            PointedGraph::unlabelled(2, [(0, 1), (1, 1)], 0).unwrap(),
            PointedGraph::unlabelled(3, [(0, 1), (0, 2), (2, 2)], 0).unwrap(),
        ];
        for g1 in &samples {
            for g2 in &samples {
                let sep = separation_depth(g1, g2).unwrap();
                let bound = g1.node_count() + g2.node_count();
                let direct = (0..=bound)
                    .find(|&n| partial_n(&g1.unfold(n), n) != partial_n(&g2.unfold(n), n));
                assert_eq!(sep, direct, "{g1:?} vs {g2:?}");
                assert_eq!(sep.is_none(), bisimilar(g1, g2).unwrap().is_some());
            }
        }
    }

    #[test]
    fn refinement_monotone_and_bounded() {
        let g = PointedGraph::unlabelled(4, [(0, 1), (1, 2), (2, 3), (3, 3), (0, 2)], 0).unwrap();
        let rounds = g.refinement_rounds();
        for w in rounds.windows(2) {
            // each round refines the previous one
            for x in 0..g.node_count() {
                for y in 0..g.node_count() {
                    if w[1].same_block(x, y) {
                        assert!(w[0].same_block(x, y));
                    }
                }
            }
        }
        // stabilization within |nodes| proper rounds
        assert!(rounds.len() <= g.node_count() + 2);
    }

    #[test]
    fn partition_refinement_agrees_with_oracle() {
        // all unlabelled pointed graphs with 1..=2 nodes, plus a few 3-node ones
        let mut graphs = Vec::new();
        for n in 1..=2usize {
            let pairs: Vec<(usize, usize)> =
                (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).collect();
            for mask in 0u32..(1 << pairs.len()) {
                let edges: Vec<(usize, usize)> = pairs
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, &p)| p)
                    .collect();
                for root in 0..n {
                    graphs.push(PointedGraph::unlabelled(n, edges.clone(), root).unwrap());
                }
            }
        }
        graphs.push(PointedGraph::unlabelled(3, [(0, 1), (1, 2), (2, 0)], 0).unwrap());
        graphs.push(PointedGraph::unlabelled(3, [(0, 1), (0, 2), (1, 2)], 0).unwrap());
        for g1 in &graphs {
            for g2 in &graphs {
                assert_eq!(
                    bisimilar(g1, g2).unwrap().is_some(),
                    oracle_bisimilar(g1, g2),
                    "{g1:?} vs {g2:?}"
                );
            }
        }
    }

    #[test]
    fn leadsto_examples() {
        let parent = PointedGraph::path(1);
        let leaf = PointedGraph::single_node();
        assert!(leadsto(&parent, &leaf).unwrap());
        assert!(!leadsto(&leaf, &parent).unwrap());
        assert!(!leadsto(&leaf, &leaf).unwrap());
        let lp = PointedGraph::self_loop();
        assert!(leadsto(&lp, &lp).unwrap());
        assert!(leadsto_definitional(&lp, &lp, 12).unwrap());
    }

    #[test]
    fn leadsto_agrees_with_definitional_oracle() {
        let samples = vec![
            PointedGraph::single_node(),
            PointedGraph::self_loop(),
            PointedGraph::path(1),
            PointedGraph::path(2),
            PointedGraph::unlabelled(2, [(0, 1), (1, 1)], 0).unwrap(),
            PointedGraph::unlabelled(3, [(0, 1), (1, 2), (2, 1)], 0).unwrap(),
        ];
        for g1 in &samples {
            for g2 in &samples {
                assert_eq!(
                    leadsto(g1, g2).unwrap(),
                    leadsto_definitional(g1, g2, 12).unwrap(),
                    "{g1:?} vs {g2:?}"
                );
            }
        }
    }

    #[test]
    fn minimize_examples() {
        let cycle = PointedGraph::unlabelled(2, [(0, 1), (1, 0)], 0).unwrap();
        let m = minimize(&cycle);
        assert_eq!(m.node_count(), 1);
        assert!(bisimilar(&cycle, &m).unwrap().is_some());

        assert_eq!(minimize(&PointedGraph::single_node()).node_count(), 1);

        let twin = PointedGraph::unlabelled(3, [(0, 1), (0, 2)], 0).unwrap();
        let m = minimize(&twin);
        assert_eq!(m.node_count(), 2);
        assert!(bisimilar(&twin, &m).unwrap().is_some());

        // idempotent up to renaming
        assert_eq!(minimize(&m), m);
    }

    #[test]
    fn minimize_drops_unreachable_states() {
        let g = PointedGraph::unlabelled(3, [(0, 0), (1, 2)], 0).unwrap();
        assert_eq!(minimize(&g).node_count(), 1);
    }

    #[test]
    fn minimize_respects_labels() {
        let ab = Alphabet::new(["a".into(), "b".into()]);
        // two leaf targets collapse into one block; the differently
        // labelled edges both survive
        let g = PointedGraph::labelled(3, [(0, 0, 1), (0, 1, 2)], 0, ab.clone()).unwrap();
        let m = minimize(&g);
        assert_eq!(m.node_count(), 2);
        assert_eq!(m.edges().len(), 2);
        assert!(bisimilar(&g, &m).unwrap().is_some());

        // states reachable by different labels stay apart when their
        // behavior differs
        let h = PointedGraph::labelled(3, [(0, 0, 1), (0, 1, 2), (1, 0, 1)], 0, ab).unwrap();
        let mh = minimize(&h);
        assert_eq!(mh.node_count(), 3);
        assert!(bisimilar(&h, &mh).unwrap().is_some());
    }

    #[test]
    fn depth_approximant_matches_unfolding() {
        let samples = vec![
            PointedGraph::single_node(),
            PointedGraph::self_loop(),
            PointedGraph::path(2),
            PointedGraph::unlabelled(3, [(0, 1), (0, 2), (1, 2), (2, 0)], 0).unwrap(),
            PointedGraph::unlabelled(2, [(0, 0), (0, 1), (1, 0), (1, 1)], 0).unwrap(),
        ];
        for g in &samples {
            for n in 0..=6 {
                assert_eq!(
                    depth_approximant(g, n),
                    partial_n(&g.unfold(n), n),
                    "{g:?} at {n}"
                );
            }
        }
        // stays cheap where the unfolding would explode
        let dense =
            PointedGraph::unlabelled(5, (0..5).flat_map(|x| (0..5).map(move |y| (x, y))), 0)
                .unwrap();
        let t = depth_approximant(&dense, 40);
        assert_eq!(t.height(), 40);
    }

    #[test]
    fn unfold_nodes_are_paths_and_rho_sees_the_generator() {
        // Nodes of the depth-n unfolding are root-originating paths; the
        // node-wise approximant at a path's endpoint equals the graph-level
        // approximant of the generator rerooted at that endpoint.
        use crate::trees::rho_n;
        let g = PointedGraph::unlabelled(3, [(0, 1), (0, 2), (1, 2), (2, 0)], 0).unwrap();
        let depth = 4usize;
        let t = g.unfold(depth);

        // walk the unfolding in step with the graph; children were created
        // in successor order
        fn walk(
            g: &PointedGraph,
            t: &RawTree,
            node: usize,
            state: usize,
            remaining: usize,
            out: &mut Vec<(usize, usize, usize)>,
        ) {
            out.push((node, state, remaining));
            if remaining == 0 {
                assert!(t.children_of(node).is_empty());
                return;
            }
            assert_eq!(t.children_of(node).len(), g.successors(state).len());
            for (&child, &(_, next)) in t.children_of(node).iter().zip(g.successors(state)) {
                walk(g, t, child, next, remaining - 1, out);
            }
        }
        let mut nodes = Vec::new();
        walk(&g, &t, t.root(), g.root(), depth, &mut nodes);
        assert_eq!(nodes.len(), t.node_count());

        for (node, state, remaining) in nodes {
            for k in 0..=remaining {
                assert_eq!(
                    rho_n(&t, node, k).unwrap(),
                    depth_approximant(&g.reroot(state).unwrap(), k),
                    "node {node} (state {state}) at depth {k}"
                );
            }
        }
    }

    #[test]
    fn unfold_canonize_coherence() {
        let g = PointedGraph::unlabelled(3, [(0, 1), (1, 2), (2, 0), (0, 2)], 0).unwrap();
        for n in 0..5 {
            for m in n..6 {
                assert_eq!(canonize(&g.unfold(n)), partial_n(&g.unfold(m), n));
            }
        }
    }

    #[test]
    fn saturation_family_truncations_agree() {
        // t_N: root with children {path of length k : k <= N};
        // t'_N: t_N plus one extra child, a path of length N+1.
        for big_n in 0..=5usize {
            let t = RawTree::branch((0..=big_n).map(RawTree::path).collect());
            let t_prime = RawTree::branch((0..=big_n + 1).map(RawTree::path).collect());
            for n in 0..=big_n + 1 {
                assert_eq!(partial_n(&t, n), partial_n(&t_prime, n), "N={big_n} n={n}");
            }
            assert_ne!(partial_n(&t, big_n + 2), partial_n(&t_prime, big_n + 2));
        }
    }

    #[test]
    fn labelled_bisimilarity_distinguishes_labels() {
        let ab = Alphabet::new(["a".into(), "b".into()]);
        let g_a = PointedGraph::labelled(2, [(0, 0, 1)], 0, ab.clone()).unwrap();
        let g_b = PointedGraph::labelled(2, [(0, 1, 1)], 0, ab.clone()).unwrap();
        assert!(bisimilar(&g_a, &g_a).unwrap().is_some());
        assert!(bisimilar(&g_a, &g_b).unwrap().is_none());
        // but their shapes are bisimilar
        assert!(bisimilar(&g_a.strip_labels(), &g_b.strip_labels())
            .unwrap()
            .is_some());
        // alphabet mismatch is an error
        let other = Alphabet::new(["x".into()]);
        let g_x = PointedGraph::labelled(1, [], 0, other).unwrap();
        assert!(matches!(
            bisimilar(&g_a, &g_x),
            Err(SystemsError::AlphabetMismatch)
        ));
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{
            "nodes": ["s", "t"],
            "root": "s",
            "edges": [{"from": "s", "to": "t", "label": "0"}, {"from": "t", "to": "t", "label": "1"}],
            "alphabet": {"symbols": ["0", "1"], "dist": [["0", "1/2"], ["1/2", "0"]]}
        }"#;
        let g = PointedGraph::from_json(text).unwrap();
        assert!(g.is_labelled());
        let metric = g.alphabet().unwrap().metric().unwrap();
        assert_eq!(
            metric
                .dist(&Value::Str("0".into()), &Value::Str("1".into()))
                .unwrap(),
            ExtRat::ratio(1, 2)
        );
        let again = PointedGraph::from_json(&g.to_json().to_string()).unwrap();
        assert_eq!(again, g);

        assert!(
            PointedGraph::from_json(r#"{"nodes":[0],"root":0,"edges":[{"from":0,"to":1}]}"#)
                .is_err()
        );
        assert!(PointedGraph::from_json(
            r#"{"nodes":[0],"root":0,"edges":[{"from":0,"to":0,"label":"a"}]}"#
        )
        .is_err());
    }

    #[test]
    fn labelled_unfold_preserves_labels() {
        let ab = Alphabet::new(["a".into(), "b".into()]);
        let g = PointedGraph::labelled(2, [(0, 0, 1), (0, 1, 1)], 0, ab).unwrap();
        let t = g.unfold_labelled(1);
        assert_eq!(t.node_count(), 3);
        assert_eq!(t.to_string(), "[a:[],b:[]]");
        assert_eq!(
            t.shape(),
            RawTree::branch(vec![RawTree::leaf(), RawTree::leaf()])
        );
    }
}
