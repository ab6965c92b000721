//! Finite graphs and trees: parsing, rooted views, balls, bipartitions and
//! the tree families used throughout the crate.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::Write as _;
use std::ops::Deref;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::caps::Caps;
use crate::error::{Error, Result};

/// Simple undirected graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Builds a graph, rejecting self-loops, parallel edges and bad ids.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Graph> {
        let mut adj = vec![Vec::new(); n];
        let mut list = Vec::new();
        for (u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(Error::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at {u}")));
            }
            if adj[u].contains(&v) {
                return Err(Error::InvalidGraph(format!("duplicate edge {u}-{v}")));
            }
            adj[u].push(v);
            adj[v].push(u);
            list.push((u.min(v), u.max(v)));
        }
        for nb in &mut adj {
            nb.sort_unstable();
        }
        Ok(Graph { adj, edges: list })
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n() && self.adj[u].binary_search(&v).is_ok()
    }

    /// BFS distances from `o`; `None` for vertices in other components.
    pub fn distances_from(&self, o: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n()];
        let mut queue = VecDeque::new();
        dist[o] = Some(0);
        queue.push_back(o);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap();
            for &w in &self.adj[v] {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.n() == 0 || self.distances_from(0).iter().all(Option::is_some)
    }

    /// Largest finite distance between two vertices.
    pub fn diameter(&self) -> usize {
        (0..self.n())
            .map(|o| self.distances_from(o).into_iter().flatten().max().unwrap_or(0))
            .max()
            .unwrap_or(0)
    }

    /// Vertices within distance `r` of `o`, in BFS order (so `o` comes first).
    pub fn ball_vertices(&self, o: usize, r: usize) -> Result<Vec<usize>> {
        self.check_vertex(o)?;
        let mut seen = vec![false; self.n()];
        let mut out = vec![o];
        let mut frontier = vec![o];
        seen[o] = true;
        for _ in 0..r {
            let mut next = Vec::new();
            for &v in &frontier {
                for &w in &self.adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        next.push(w);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            out.extend_from_slice(&next);
            frontier = next;
        }
        Ok(out)
    }

    /// Induced subgraph on `vertices`, with local ids in the given order.
    pub fn induced(&self, vertices: &[usize]) -> Result<Window<Graph>> {
        let local: HashMap<usize, usize> =
            vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut edges = Vec::new();
        for (i, &v) in vertices.iter().enumerate() {
            self.check_vertex(v)?;
            for &w in &self.adj[v] {
                if let Some(&j) = local.get(&w) {
                    if i < j {
                        edges.push((i, j));
                    }
                }
            }
        }
        let graph = Graph::new(vertices.len(), edges)?;
        Ok(Window::new(graph, vertices.to_vec()))
    }

    /// The ball `B_r(G, o)` as an induced subgraph with a remap table.
    pub fn ball(&self, o: usize, r: usize) -> Result<Window<Graph>> {
        let vs = self.ball_vertices(o, r)?;
        self.induced(&vs)
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.n() {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange { vertex: v, n: self.n() })
        }
    }

    /// Edge-list text: vertex count, then one `u v` line per edge.
    pub fn to_edge_list(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{}", self.n()).unwrap();
        for &(u, v) in &self.edges {
            writeln!(s, "{u} {v}").unwrap();
        }
        s
    }
}

/// An induced subgraph together with the original id of each local vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Window<G> {
    pub graph: G,
    pub original: Vec<usize>,
    local: HashMap<usize, usize>,
}

impl<G> Window<G> {
    fn new(graph: G, original: Vec<usize>) -> Self {
        let local = original.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        Window { graph, original, local }
    }

    /// Local id of an original vertex, if it lies in the window.
    pub fn local(&self, original: usize) -> Option<usize> {
        self.local.get(&original).copied()
    }

    pub fn to_original(&self, local: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = local.iter().map(|&i| self.original[i]).collect();
        out.sort_unstable();
        out
    }
}

/// A finite tree: connected, `n - 1` edges, at least one vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tree {
    graph: Graph,
}

impl Deref for Tree {
    type Target = Graph;
    fn deref(&self) -> &Graph {
        &self.graph
    }
}

impl Tree {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Tree> {
        Tree::from_graph(Graph::new(n, edges)?)
    }

    pub fn from_graph(graph: Graph) -> Result<Tree> {
        if graph.n() == 0 {
            return Err(Error::InvalidGraph("a tree needs at least one vertex".into()));
        }
        if graph.edges().len() != graph.n() - 1 {
            return Err(Error::InvalidGraph(format!(
                "{} edges for {} vertices",
                graph.edges().len(),
                graph.n()
            )));
        }
        if !graph.is_connected() {
            return Err(Error::InvalidGraph("disconnected".into()));
        }
        Ok(Tree { graph })
    }

    pub fn single_vertex() -> Tree {
        Tree { graph: Graph::new(1, []).unwrap() }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn into_graph(self) -> Graph {
        self.graph
    }

    /// `B_r(G, o)` as a tree; local vertex 0 is `o`.
    pub fn ball(&self, o: usize, r: usize) -> Result<Window<Tree>> {
        let w = self.graph.ball(o, r)?;
        Ok(Window::new(Tree { graph: w.graph }, w.original))
    }

    /// Induced subtree on a connected vertex set.
    pub fn induced_tree(&self, vertices: &[usize]) -> Result<Window<Tree>> {
        let w = self.graph.induced(vertices)?;
        Ok(Window::new(Tree::from_graph(w.graph)?, w.original))
    }

    pub fn root_at(&self, o: usize) -> Result<RootedTree> {
        RootedTree::new(self.clone(), o)
    }

    /// Canonical string shared exactly by isomorphic trees.
    pub fn canonical_code(&self) -> String {
        self.centers()
            .into_iter()
            .map(|c| self.rooted_code(c))
            .min()
            .unwrap()
    }

    fn centers(&self) -> Vec<usize> {
        let n = self.n();
        if n <= 2 {
            return (0..n).collect();
        }
        let mut deg: Vec<usize> = (0..n).map(|v| self.degree(v)).collect();
        let mut layer: Vec<usize> = (0..n).filter(|&v| deg[v] == 1).collect();
        let mut remaining = n;
        while remaining > 2 {
            remaining -= layer.len();
            let mut next = Vec::new();
            for &v in &layer {
                for &w in self.neighbors(v) {
                    if deg[w] > 1 {
                        deg[w] -= 1;
                        if deg[w] == 1 {
                            next.push(w);
                        }
                    }
                }
                deg[v] = 0;
            }
            layer = next;
        }
        layer.sort_unstable();
        layer
    }

    fn rooted_code(&self, root: usize) -> String {
        let rooted = RootedTree::new(self.clone(), root).unwrap();
        let mut code: Vec<String> = vec![String::new(); self.n()];
        for &v in rooted.order().iter().rev() {
            let mut parts: Vec<String> =
                rooted.children(v).iter().map(|&c| std::mem::take(&mut code[c])).collect();
            parts.sort_unstable();
            code[v] = format!("({})", parts.concat());
        }
        std::mem::take(&mut code[root])
    }
}

/// Parses the edge-list format: first line `n`, then `n - 1` lines `u v`.
///
/// Blank lines and lines starting with `#` are ignored.
pub fn parse_tree(text: &str) -> Result<Tree> {
    let (n, edges) = parse_lines(text)?;
    let mut uf = UnionFind::new(n);
    let mut seen = std::collections::HashSet::new();
    for (count, &(line, u, v)) in edges.iter().enumerate() {
        if count + 1 > n.saturating_sub(1) {
            return Err(Error::Parse {
                line,
                message: format!("edge count exceeds n-1 = {}", n.saturating_sub(1)),
            });
        }
        if !seen.insert((u.min(v), u.max(v))) {
            return Err(Error::Parse { line, message: format!("duplicate edge {u} {v}") });
        }
        if !uf.union(u, v) {
            return Err(Error::Parse { line, message: format!("edge {u} {v} closes a cycle") });
        }
    }
    if edges.len() + 1 < n {
        let line = edges.last().map_or(1, |e| e.0);
        return Err(Error::Parse {
            line,
            message: format!("disconnected: {} edges for {} vertices", edges.len(), n),
        });
    }
    Tree::new(n, edges.into_iter().map(|(_, u, v)| (u, v)))
}

/// Same format as [`parse_tree`] but with any number of edges.
pub fn parse_graph(text: &str) -> Result<Graph> {
    let (n, edges) = parse_lines(text)?;
    let mut seen = std::collections::HashSet::new();
    for &(line, u, v) in &edges {
        if u == v {
            return Err(Error::Parse { line, message: format!("self-loop at {u}") });
        }
        if !seen.insert((u.min(v), u.max(v))) {
            return Err(Error::Parse { line, message: format!("duplicate edge {u} {v}") });
        }
    }
    Graph::new(n, edges.into_iter().map(|(_, u, v)| (u, v)))
}

type NumberedEdge = (usize, usize, usize);

fn parse_lines(text: &str) -> Result<(usize, Vec<NumberedEdge>)> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (first, header) = lines
        .next()
        .ok_or(Error::Parse { line: 1, message: "missing vertex count".into() })?;
    let n: usize = header.parse().map_err(|_| Error::Parse {
        line: first,
        message: format!("bad vertex count {header:?}"),
    })?;
    if n == 0 {
        return Err(Error::Parse { line: first, message: "vertex count must be at least 1".into() });
    }
    let mut edges = Vec::new();
    for (line, text) in lines {
        let fields: Vec<&str> = text.split_whitespace().collect();
        let ids: Option<Vec<usize>> = fields.iter().map(|f| f.parse().ok()).collect();
        let (u, v) = match ids.as_deref() {
            Some(&[u, v]) => (u, v),
            _ => {
                return Err(Error::Parse { line, message: format!("expected `u v`, got {text:?}") })
            }
        };
        if u >= n || v >= n {
            return Err(Error::Parse {
                line,
                message: format!("vertex id {} out of range 0..{n}", u.max(v)),
            });
        }
        edges.push((line, u, v));
    }
    Ok((n, edges))
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

/// A tree with a distinguished root and its BFS structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedTree {
    tree: Tree,
    root: usize,
    parent: Vec<Option<usize>>,
    depth: Vec<usize>,
    order: Vec<usize>,
    children: Vec<Vec<usize>>,
}

impl RootedTree {
    pub fn new(tree: Tree, root: usize) -> Result<RootedTree> {
        tree.check_vertex(root)?;
        let n = tree.n();
        let mut parent = vec![None; n];
        let mut depth = vec![0; n];
        let mut children = vec![Vec::new(); n];
        let mut order = Vec::with_capacity(n);
        let mut visited = vec![false; n];
        visited[root] = true;
        order.push(root);
        let mut head = 0;
        while head < order.len() {
            let v = order[head];
            head += 1;
            for &w in tree.neighbors(v) {
                if !visited[w] {
                    visited[w] = true;
                    parent[w] = Some(v);
                    depth[w] = depth[v] + 1;
                    children[v].push(w);
                    order.push(w);
                }
            }
        }
        Ok(RootedTree { tree, root, parent, depth, order, children })
    }

    pub fn tree(&self) -> &Tree {
        &self.tree
    }

    pub fn into_tree(self) -> Tree {
        self.tree
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn n(&self) -> usize {
        self.tree.n()
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn depth(&self, v: usize) -> usize {
        self.depth[v]
    }

    pub fn depths(&self) -> &[usize] {
        &self.depth
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    /// Vertices in BFS order from the root; reverse it for bottom-up passes.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Path `root = v_0, ..., v_k = x`.
    pub fn path_from_root(&self, x: usize) -> Vec<usize> {
        let mut path = vec![x];
        let mut v = x;
        while let Some(p) = self.parent[v] {
            path.push(p);
            v = p;
        }
        path.reverse();
        path
    }

    pub fn reroot(&self, o: usize) -> Result<RootedTree> {
        RootedTree::new(self.tree.clone(), o)
    }

    pub fn bipartition(&self, root_class: Class) -> Bipartition {
        bipartition_by_parity(self, root_class)
    }
}

/// One of the two color classes of a bipartite tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Class {
    S,
    T,
}

/// Proper two-coloring `(S, T)` of a tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bipartition {
    in_s: Vec<bool>,
}

impl Bipartition {
    pub fn from_s_mask(in_s: Vec<bool>) -> Self {
        Bipartition { in_s }
    }

    /// Checks that every edge joins the two classes.
    pub fn is_proper_for(&self, graph: &Graph) -> bool {
        self.in_s.len() == graph.n() && graph.edges().iter().all(|&(u, v)| self.in_s[u] != self.in_s[v])
    }

    pub fn n(&self) -> usize {
        self.in_s.len()
    }

    pub fn in_s(&self, v: usize) -> bool {
        self.in_s[v]
    }

    pub fn class(&self, v: usize) -> Class {
        if self.in_s[v] {
            Class::S
        } else {
            Class::T
        }
    }

    pub fn s(&self) -> Vec<usize> {
        (0..self.n()).filter(|&v| self.in_s[v]).collect()
    }

    pub fn t(&self) -> Vec<usize> {
        (0..self.n()).filter(|&v| !self.in_s[v]).collect()
    }

    /// The coloring with the roles of `S` and `T` exchanged.
    pub fn swapped(&self) -> Bipartition {
        Bipartition { in_s: self.in_s.iter().map(|b| !b).collect() }
    }
}

/// Colors even-depth vertices with `root_class` and odd-depth ones with the other class.
pub fn bipartition_by_parity(rooted: &RootedTree, root_class: Class) -> Bipartition {
    let root_in_s = root_class == Class::S;
    Bipartition { in_s: rooted.depths().iter().map(|d| (d % 2 == 0) == root_in_s).collect() }
}

fn check_cap(needed: u128, caps: &Caps) -> Result<usize> {
    if needed > caps.max_vertices as u128 {
        return Err(Error::CapExceeded { what: "tree generator", needed, cap: caps.max_vertices as u128 });
    }
    Ok(needed as usize)
}

/// Builds a rooted tree level by level; `branching(depth)` is the number of
/// children of every vertex at `depth`.
fn grow(depth: usize, expected: usize, branching: impl Fn(usize) -> usize) -> RootedTree {
    let mut edges = Vec::with_capacity(expected.saturating_sub(1));
    let mut level = vec![0usize];
    let mut next_id = 1usize;
    for d in 0..depth {
        let mut next = Vec::with_capacity(level.len() * branching(d));
        for &v in &level {
            for _ in 0..branching(d) {
                edges.push((v, next_id));
                next.push(next_id);
                next_id += 1;
            }
        }
        level = next;
    }
    let tree = Tree::new(next_id, edges).expect("generated tree is valid");
    RootedTree::new(tree, 0).unwrap()
}

fn geometric_count(levels: impl Iterator<Item = u128>) -> u128 {
    let mut total: u128 = 0;
    let mut width: u128 = 1;
    total += 1;
    for b in levels {
        width = width.saturating_mul(b);
        total = total.saturating_add(width);
    }
    total
}

/// Complete `k`-ary tree of depth `n`: root has `k` children, every
/// non-leaf non-root vertex has `k` children (degree `k + 1`).
pub fn gen_kary(k: usize, n: usize, caps: &Caps) -> Result<RootedTree> {
    if k < 2 {
        return Err(Error::Domain(format!("branching k = {k} must be at least 2")));
    }
    let count = check_cap(geometric_count((0..n).map(|_| k as u128)), caps)?;
    Ok(grow(n, count, |_| k))
}

/// `B_n(T_d, o)` for the `d`-regular infinite tree.
pub fn gen_regular_ball(d: usize, n: usize, caps: &Caps) -> Result<RootedTree> {
    if d < 3 {
        return Err(Error::Domain(format!("degree d = {d} must be at least 3")));
    }
    let b = |depth: usize| if depth == 0 { d } else { d - 1 };
    let count = check_cap(geometric_count((0..n).map(|i| b(i) as u128)), caps)?;
    Ok(grow(n, count, b))
}

/// Depth-`n` truncation of the tree whose even-depth vertices have one
/// child and odd-depth vertices two.
pub fn gen_alternating(n: usize, caps: &Caps) -> Result<RootedTree> {
    let b = |depth: usize| if depth.is_multiple_of(2) { 1 } else { 2 };
    let count = check_cap(geometric_count((0..n).map(|i| b(i) as u128)), caps)?;
    Ok(grow(n, count, b))
}

/// Path on `n` vertices `0 - 1 - ... - (n-1)`.
pub fn gen_path(n: usize, caps: &Caps) -> Result<Tree> {
    if n == 0 {
        return Err(Error::Domain("a path needs at least one vertex".into()));
    }
    check_cap(n as u128, caps)?;
    Tree::new(n, (1..n).map(|v| (v - 1, v)))
}

/// Star `K_{1,k}` with center 0.
pub fn gen_star(k: usize) -> Tree {
    Tree::new(k + 1, (1..=k).map(|v| (0, v))).unwrap()
}

/// All pairwise non-isomorphic trees on exactly `n` vertices.
pub fn free_trees(n: usize) -> Vec<Tree> {
    if n == 0 {
        return Vec::new();
    }
    let mut current = vec![Tree::single_vertex()];
    for m in 1..n {
        let mut next: BTreeMap<String, Tree> = BTreeMap::new();
        for t in &current {
            for v in 0..m {
                let mut edges = t.edges().to_vec();
                edges.push((v, m));
                let grown = Tree::new(m + 1, edges).unwrap();
                next.entry(grown.canonical_code()).or_insert(grown);
            }
        }
        current = next.into_values().collect();
    }
    current
}

/// Every free tree with between 1 and `max_n` vertices.
pub fn free_tree_catalog(max_n: usize) -> Vec<Tree> {
    (1..=max_n).flat_map(free_trees).collect()
}

/// Uniform labeled tree on `n` vertices (Prüfer decoding).
pub fn random_tree<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Tree {
    if n <= 2 {
        return Tree::new(n.max(1), (1..n).map(|v| (0, v))).unwrap();
    }
    let prufer: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &p in &prufer {
        degree[p] += 1;
    }
    let mut leaves: std::collections::BTreeSet<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    let mut edges = Vec::with_capacity(n - 1);
    for &p in &prufer {
        let leaf = *leaves.iter().next().unwrap();
        leaves.remove(&leaf);
        edges.push((leaf, p));
        degree[p] -= 1;
        if degree[p] == 1 {
            leaves.insert(p);
        }
    }
    let rest: Vec<usize> = leaves.into_iter().collect();
    edges.push((rest[0], rest[1]));
    Tree::new(n, edges).unwrap()
}

/// A random tree on `n` vertices plus `extra` distinct random chords.
pub fn random_graph<R: Rng + ?Sized>(n: usize, extra: usize, rng: &mut R) -> Graph {
    let tree = random_tree(n, rng);
    let mut edges = tree.edges().to_vec();
    let mut missing: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .filter(|&(u, v)| !tree.has_edge(u, v))
        .collect();
    missing.shuffle(rng);
    edges.extend(missing.into_iter().take(extra));
    Graph::new(n, edges).unwrap()
}
