//! Exact matching combinatorics on trees: the matching polynomial,
//! maximum-matching counts, exact samplers, and reconstruction of a
//! matching from its uncovered set.
//!
//! All dynamic programs run over a BFS order of the tree rooted at vertex 0,
//! so deep trees (long paths) never recurse.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::law::SubsetLaw;
use crate::tree::{Bipartition, Graph, RootedTree, Tree};

/// A set of vertex-disjoint edges, stored as a symmetric partner map.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matching {
    partner: Vec<Option<usize>>,
}

impl Matching {
    pub fn empty(n: usize) -> Matching {
        Matching { partner: vec![None; n] }
    }

    /// Validates that `edges` are disjoint edges of `graph`.
    pub fn from_edges(graph: &Graph, edges: &[(usize, usize)]) -> Result<Matching> {
        let mut m = Matching::empty(graph.n());
        for &(u, v) in edges {
            if !graph.has_edge(u, v) {
                return Err(Error::Domain(format!("{u}-{v} is not an edge")));
            }
            if m.partner[u].is_some() || m.partner[v].is_some() {
                return Err(Error::Domain(format!("edges meet at {u}-{v}")));
            }
            m.partner[u] = Some(v);
            m.partner[v] = Some(u);
        }
        Ok(m)
    }

    fn pair(&mut self, u: usize, v: usize) {
        self.partner[u] = Some(v);
        self.partner[v] = Some(u);
    }

    fn unpair(&mut self, u: usize, v: usize) {
        self.partner[u] = None;
        self.partner[v] = None;
    }

    pub fn n(&self) -> usize {
        self.partner.len()
    }

    pub fn partner(&self, v: usize) -> Option<usize> {
        self.partner[v]
    }

    /// Matched pairs `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.partner
            .iter()
            .enumerate()
            .filter_map(|(u, p)| p.filter(|&v| u < v).map(|v| (u, v)))
            .collect()
    }

    pub fn size(&self) -> usize {
        self.partner.iter().flatten().count() / 2
    }

    pub fn is_valid_for(&self, graph: &Graph) -> bool {
        self.n() == graph.n()
            && self.partner.iter().enumerate().all(|(u, p)| match *p {
                None => true,
                Some(v) => v < self.n() && self.partner[v] == Some(u) && graph.has_edge(u, v),
            })
    }
}

/// `U(M)`: vertices not covered by `m`, ascending.
pub fn uncovered(m: &Matching) -> Vec<usize> {
    (0..m.n()).filter(|&v| m.partner(v).is_none()).collect()
}

/// `Δ(M) = U(M) △ T`, ascending.
pub fn delta(m: &Matching, bip: &Bipartition) -> Vec<usize> {
    (0..m.n()).filter(|&v| m.partner(v).is_none() != !bip.in_s(v)).collect()
}

/// Commutative semiring used by the counting programs.
pub trait Weight: Clone {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn plus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
}

impl Weight for BigUint {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
}

/// A nonnegative count stored as its natural logarithm (`-inf` for zero).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogCount(pub f64);

impl Weight for LogCount {
    fn zero() -> Self {
        LogCount(f64::NEG_INFINITY)
    }
    fn one() -> Self {
        LogCount(0.0)
    }
    fn is_zero(&self) -> bool {
        self.0 == f64::NEG_INFINITY
    }
    fn plus(&self, other: &Self) -> Self {
        let (hi, lo) = if self.0 >= other.0 { (self.0, other.0) } else { (other.0, self.0) };
        if lo == f64::NEG_INFINITY {
            return LogCount(hi);
        }
        LogCount(hi + (lo - hi).exp().ln_1p())
    }
    fn times(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        LogCount(self.0 + other.0)
    }
}

/// `ln` of an arbitrary-precision integer, exact to f64 rounding.
pub fn big_ln(x: &BigUint) -> f64 {
    if num_traits::Zero::is_zero(x) {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

/// A count that is exact for small trees and log-space for large ones.
#[derive(Debug, Clone, PartialEq)]
pub enum Count {
    Exact(BigUint),
    Log(f64),
}

impl Count {
    pub fn ln(&self) -> f64 {
        match self {
            Count::Exact(x) => big_ln(x),
            Count::Log(l) => *l,
        }
    }

    pub fn exact(&self) -> Option<&BigUint> {
        match self {
            Count::Exact(x) => Some(x),
            Count::Log(_) => None,
        }
    }
}

/// Coefficients `c_j` = number of matchings leaving exactly `j` vertices uncovered.
#[derive(Debug, Clone, PartialEq)]
pub enum Coefficients {
    Exact(Vec<BigUint>),
    /// `ln c_j`, `-inf` where `c_j = 0`.
    Log(Vec<f64>),
}

/// `P_G(z) = Σ_M z^{|V| − 2|M|}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchingPolynomial {
    n: usize,
    coeffs: Coefficients,
}

impl MatchingPolynomial {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coefficients(&self) -> &Coefficients {
        &self.coeffs
    }

    pub fn exact(&self) -> Option<&[BigUint]> {
        match &self.coeffs {
            Coefficients::Exact(c) => Some(c),
            Coefficients::Log(_) => None,
        }
    }

    pub fn log_coeffs(&self) -> Vec<f64> {
        match &self.coeffs {
            Coefficients::Exact(c) => c.iter().map(big_ln).collect(),
            Coefficients::Log(c) => c.clone(),
        }
    }

    /// Smallest `j` with `c_j > 0`, i.e. `n − 2ν`.
    pub fn min_uncovered(&self) -> usize {
        self.log_coeffs().iter().position(|&l| l > f64::NEG_INFINITY).unwrap()
    }

    pub fn nu(&self) -> usize {
        (self.n - self.min_uncovered()) / 2
    }

    /// The number of maximum matchings, the lowest nonzero coefficient.
    pub fn max_matching_count(&self) -> Count {
        let j = self.min_uncovered();
        match &self.coeffs {
            Coefficients::Exact(c) => Count::Exact(c[j].clone()),
            Coefficients::Log(c) => Count::Log(c[j]),
        }
    }

    /// `ln P_G(z)` for `z > 0`.
    pub fn log_eval(&self, z: f64) -> f64 {
        let lz = z.ln();
        self.log_coeffs()
            .iter()
            .enumerate()
            .map(|(j, &l)| LogCount(l + if l.is_finite() { j as f64 * lz } else { 0.0 }))
            .fold(LogCount::zero(), |acc, t| acc.plus(&t))
            .0
    }

    pub fn eval(&self, z: f64) -> f64 {
        self.log_eval(z).exp()
    }

    /// Total number of matchings, `P_G(1)`.
    pub fn total(&self) -> Count {
        match &self.coeffs {
            Coefficients::Exact(c) => Count::Exact(c.iter().sum()),
            Coefficients::Log(_) => Count::Log(self.log_eval(1.0)),
        }
    }
}

fn poly_mul<W: Weight>(a: &[W], b: &[W]) -> Vec<W> {
    let mut out = vec![W::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] = out[i + j].plus(&x.times(y));
            }
        }
    }
    out
}

fn poly_add<W: Weight>(a: &[W], b: &[W]) -> Vec<W> {
    let mut out = vec![W::zero(); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] = x.clone();
    }
    for (i, y) in b.iter().enumerate() {
        out[i] = out[i].plus(y);
    }
    out
}

/// Bottom-up pass returning, for the root, the polynomials of matchings with
/// the root uncovered and with the root covered.
fn polynomial_dp<W: Weight>(rooted: &RootedTree) -> (Vec<W>, Vec<W>) {
    let n = rooted.n();
    let mut free: Vec<Option<Vec<W>>> = vec![None; n];
    let mut covered: Vec<Option<Vec<W>>> = vec![None; n];
    for &x in rooted.order().iter().rev() {
        let mut a = vec![W::zero(), W::one()];
        let mut b = vec![W::zero()];
        for &c in rooted.children(x) {
            let ac = free[c].take().unwrap();
            let bc = covered[c].take().unwrap();
            let total = poly_add(&ac, &bc);
            let via_c = poly_mul(&a, &ac);
            b = poly_add(&poly_mul(&b, &total), &via_c[2..]);
            a = poly_mul(&a, &total);
        }
        free[x] = Some(a);
        covered[x] = Some(b);
    }
    let r = rooted.root();
    (free[r].take().unwrap(), covered[r].take().unwrap())
}

fn trimmed<W: Weight>(mut v: Vec<W>, len: usize) -> Vec<W> {
    v.resize(len, W::zero());
    v
}

/// Exact big-integer coefficients.
pub fn matching_polynomial_exact(tree: &Tree) -> MatchingPolynomial {
    let rooted = RootedTree::new(tree.clone(), 0).unwrap();
    let (a, b) = polynomial_dp::<BigUint>(&rooted);
    let n = tree.n();
    MatchingPolynomial { n, coeffs: Coefficients::Exact(trimmed(poly_add(&a, &b), n + 1)) }
}

/// Log-space coefficients.
pub fn matching_polynomial_log(tree: &Tree) -> MatchingPolynomial {
    let rooted = RootedTree::new(tree.clone(), 0).unwrap();
    let (a, b) = polynomial_dp::<LogCount>(&rooted);
    let n = tree.n();
    let coeffs = trimmed(poly_add(&a, &b), n + 1).into_iter().map(|c| c.0).collect();
    MatchingPolynomial { n, coeffs: Coefficients::Log(coeffs) }
}

/// Exact coefficients up to `caps.exact_count_threshold` vertices, log-space above.
pub fn matching_polynomial(tree: &Tree, caps: &Caps) -> MatchingPolynomial {
    if tree.n() <= caps.exact_count_threshold {
        matching_polynomial_exact(tree)
    } else {
        matching_polynomial_log(tree)
    }
}

#[derive(Debug, Clone)]
struct Best<W> {
    size: usize,
    count: W,
}

impl<W: Weight> Best<W> {
    fn unit() -> Self {
        Best { size: 0, count: W::one() }
    }

    fn join(&self, other: &Self) -> Self {
        Best { size: self.size + other.size, count: self.count.times(&other.count) }
    }

    fn or(self, other: Self) -> Self {
        use std::cmp::Ordering::*;
        match self.size.cmp(&other.size) {
            Greater => self,
            Less => other,
            Equal => Best { size: self.size, count: self.count.plus(&other.count) },
        }
    }
}

/// Per-vertex maximum matchings of the subtree below the vertex: with the
/// vertex left free, and unrestricted.
#[derive(Debug, Clone)]
struct SubtreeBest<W> {
    free: Best<W>,
    any: Best<W>,
}

fn max_matching_dp<W: Weight>(rooted: &RootedTree) -> Vec<SubtreeBest<W>> {
    let n = rooted.n();
    let mut table: Vec<Option<SubtreeBest<W>>> = vec![None; n];
    for &x in rooted.order().iter().rev() {
        let mut free = Best::unit();
        let mut matched: Option<Best<W>> = None;
        for &c in rooted.children(x) {
            let child = table[c].as_ref().unwrap();
            let through_c = {
                let mut b = free.join(&child.free);
                b.size += 1;
                b
            };
            matched = Some(match matched {
                Some(m) => m.join(&child.any).or(through_c),
                None => through_c,
            });
            free = free.join(&child.any);
        }
        let any = match &matched {
            Some(m) => free.clone().or(m.clone()),
            None => free.clone(),
        };
        table[x] = Some(SubtreeBest { free, any });
    }
    table.into_iter().map(Option::unwrap).collect()
}

/// `ν(G)` and `mm(G)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxMatchingStats {
    pub nu: usize,
    pub mm: Count,
}

/// Linear-time maximum matching size and count; exact up to
/// `caps.exact_count_threshold` vertices, log-space above.
pub fn max_matching_stats(tree: &Tree, caps: &Caps) -> MaxMatchingStats {
    let rooted = RootedTree::new(tree.clone(), 0).unwrap();
    if tree.n() <= caps.exact_count_threshold {
        let t = max_matching_dp::<BigUint>(&rooted);
        let any = &t[0].any;
        MaxMatchingStats { nu: any.size, mm: Count::Exact(any.count.clone()) }
    } else {
        let t = max_matching_dp::<LogCount>(&rooted);
        let any = &t[0].any;
        MaxMatchingStats { nu: any.size, mm: Count::Log(any.count.0) }
    }
}

/// `P(root ∉ V(M))` for a uniform maximum matching, as an exact fraction
/// obtained by counting.
pub fn root_uncovered_probability_exact(rooted: &RootedTree) -> BigRational {
    let t = max_matching_dp::<BigUint>(rooted);
    let r = &t[rooted.root()];
    if r.free.size < r.any.size {
        return BigRational::zero();
    }
    BigRational::new(r.free.count.clone().into(), r.any.count.clone().into())
}

/// Calls `visit` once for every maximum matching of `tree`, without touching
/// the non-maximum ones. Returns the number of matchings visited.
pub fn for_each_maximum_matching<F: FnMut(&Matching)>(tree: &Tree, mut visit: F) -> u64 {
    let rooted = RootedTree::new(tree.clone(), 0).unwrap();
    let table = max_matching_dp::<LogCount>(&rooted);
    let mut current = Matching::empty(tree.n());
    // (vertex, may be matched downward)
    let mut pending = vec![(0usize, true)];
    let mut frames: Vec<WalkFrame> = Vec::new();
    let mut visited = 0u64;
    // Option 0 leaves the vertex unmatched below; option `i + 1` matches it
    // to its `i`-th child.
    let valid = |x: usize, available: bool, option: usize| -> bool {
        let me = &table[x];
        if option == 0 {
            return !available || me.free.size == me.any.size;
        }
        let ch = &table[rooted.children(x)[option - 1]];
        available && me.free.size + 1 + ch.free.size == me.any.size + ch.any.size
    };
    let mut descend = true;
    loop {
        if descend {
            match pending.pop() {
                None => {
                    visited += 1;
                    visit(&current);
                }
                Some((x, available)) => {
                    frames.push(WalkFrame { x, available, base: pending.len(), applied: None, next: 0 })
                }
            }
        }
        let Some(frame) = frames.last_mut() else { break };
        let children = rooted.children(frame.x);
        pending.truncate(frame.base);
        if let Some(c) = frame.applied.take() {
            current.unpair(frame.x, c);
        }
        let option = (frame.next..=children.len()).find(|&o| valid(frame.x, frame.available, o));
        match option {
            Some(o) => {
                frame.next = o + 1;
                let chosen = (o > 0).then(|| children[o - 1]);
                if let Some(c) = chosen {
                    current.pair(frame.x, c);
                    frame.applied = Some(c);
                }
                pending.extend(children.iter().map(|&c| (c, Some(c) != chosen)));
                descend = true;
            }
            None => {
                pending.push((frame.x, frame.available));
                frames.pop();
                descend = false;
            }
        }
    }
    visited
}

struct WalkFrame {
    x: usize,
    available: bool,
    base: usize,
    applied: Option<usize>,
    next: usize,
}

/// Exact sampler for a uniform maximum-size matching.
#[derive(Debug, Clone)]
pub struct UniformMaxMatchingSampler {
    rooted: RootedTree,
    table: Vec<SubtreeBest<LogCount>>,
}

impl UniformMaxMatchingSampler {
    pub fn new(tree: &Tree) -> Self {
        let rooted = RootedTree::new(tree.clone(), 0).unwrap();
        let table = max_matching_dp::<LogCount>(&rooted);
        UniformMaxMatchingSampler { rooted, table }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Matching {
        let mut m = Matching::empty(self.rooted.n());
        // (vertex, may be matched downward)
        let mut stack = vec![(self.rooted.root(), true)];
        let mut options: Vec<(Option<usize>, f64)> = Vec::new();
        while let Some((x, available)) = stack.pop() {
            let children = self.rooted.children(x);
            let mut chosen = None;
            if available {
                let me = &self.table[x];
                options.clear();
                if me.free.size == me.any.size {
                    options.push((None, 1.0));
                }
                for &c in children {
                    let ch = &self.table[c];
                    if me.free.size + 1 + ch.free.size == me.any.size + ch.any.size {
                        options.push((Some(c), (ch.free.count.0 - ch.any.count.0).exp()));
                    }
                }
                chosen = pick(&options, rng);
            }
            if let Some(c) = chosen {
                m.pair(x, c);
            }
            for &c in children {
                stack.push((c, Some(c) != chosen));
            }
        }
        m
    }
}

fn pick<R: Rng + ?Sized>(options: &[(Option<usize>, f64)], rng: &mut R) -> Option<usize> {
    let total: f64 = options.iter().map(|o| o.1).sum();
    let mut u = rng.gen::<f64>() * total;
    for &(choice, w) in options {
        if u < w {
            return choice;
        }
        u -= w;
    }
    options.last().unwrap().0
}

/// One uniform maximum matching drawn with a seeded ChaCha8 generator.
pub fn sample_uniform_max_matching(tree: &Tree, seed: u64) -> Matching {
    UniformMaxMatchingSampler::new(tree).sample(&mut ChaCha8Rng::seed_from_u64(seed))
}

/// Exact sampler for the Boltzmann matching at temperature `z`.
///
/// The downward pass only needs the ratios `F_x / Z_x` (subtree weight with
/// `x` uncovered over the full subtree weight), which stay in `(0, 1]` for
/// every `z > 0`.
#[derive(Debug, Clone)]
pub struct BoltzmannSampler {
    rooted: RootedTree,
    z2: f64,
    ratio: Vec<f64>,
}

impl BoltzmannSampler {
    pub fn new(tree: &Tree, z: f64) -> Result<Self> {
        if !(z > 0.0 && z.is_finite()) {
            return Err(Error::Domain(format!("temperature z = {z} must be positive")));
        }
        let rooted = RootedTree::new(tree.clone(), 0).unwrap();
        let z2 = z * z;
        let mut ratio = vec![0.0; rooted.n()];
        for &x in rooted.order().iter().rev() {
            let s: f64 = rooted.children(x).iter().map(|&c| ratio[c]).sum();
            ratio[x] = z2 / (z2 + s);
        }
        Ok(BoltzmannSampler { rooted, z2, ratio })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Matching {
        let mut m = Matching::empty(self.rooted.n());
        let mut stack = vec![(self.rooted.root(), true)];
        let mut options: Vec<(Option<usize>, f64)> = Vec::new();
        while let Some((x, available)) = stack.pop() {
            let children = self.rooted.children(x);
            let mut chosen = None;
            if available {
                options.clear();
                options.push((None, self.z2));
                options.extend(children.iter().map(|&c| (Some(c), self.ratio[c])));
                chosen = pick(&options, rng);
            }
            if let Some(c) = chosen {
                m.pair(x, c);
            }
            for &c in children {
                stack.push((c, Some(c) != chosen));
            }
        }
        m
    }
}

pub fn sample_boltzmann(tree: &Tree, z: f64, seed: u64) -> Result<Matching> {
    Ok(BoltzmannSampler::new(tree, z)?.sample(&mut ChaCha8Rng::seed_from_u64(seed)))
}

/// Rebuilds the unique matching whose uncovered set is `u`, by peeling
/// leaves in ascending id order.
pub fn reconstruct_matching(tree: &Tree, u: &[usize]) -> Result<Matching> {
    let n = tree.n();
    let mut in_u = vec![false; n];
    for &v in u {
        tree.check_vertex(v)?;
        in_u[v] = true;
    }
    let mut degree: Vec<usize> = (0..n).map(|v| tree.degree(v)).collect();
    let mut removed = vec![false; n];
    let mut leaves: BTreeSet<usize> = (0..n).filter(|&v| degree[v] <= 1).collect();
    let mut m = Matching::empty(n);

    let remove = |v: usize,
                  removed: &mut Vec<bool>,
                  degree: &mut Vec<usize>,
                  leaves: &mut BTreeSet<usize>| {
        removed[v] = true;
        leaves.remove(&v);
        for &w in tree.neighbors(v) {
            if !removed[w] {
                degree[w] -= 1;
                if degree[w] <= 1 {
                    leaves.insert(w);
                }
            }
        }
    };

    while let Some(&v) = leaves.iter().next() {
        if in_u[v] {
            remove(v, &mut removed, &mut degree, &mut leaves);
            continue;
        }
        let partner = tree.neighbors(v).iter().copied().find(|&w| !removed[w]);
        let p = partner.ok_or_else(|| Error::Reconstruction {
            vertex: v,
            reason: "vertex must be covered but has no remaining neighbor".into(),
        })?;
        if in_u[p] {
            return Err(Error::Reconstruction {
                vertex: v,
                reason: format!("its only possible partner {p} is required to be uncovered"),
            });
        }
        m.pair(v, p);
        remove(v, &mut removed, &mut degree, &mut leaves);
        remove(p, &mut removed, &mut degree, &mut leaves);
    }
    Ok(m)
}

/// Every matching of `graph` (including the empty one).
pub fn all_matchings(graph: &Graph, caps: &Caps) -> Result<Vec<Matching>> {
    if graph.n() > caps.enumeration {
        return Err(Error::CapExceeded {
            what: "matching enumeration",
            needed: graph.n() as u128,
            cap: caps.enumeration as u128,
        });
    }
    fn go(edges: &[(usize, usize)], i: usize, cur: &mut Matching, out: &mut Vec<Matching>) {
        if i == edges.len() {
            out.push(cur.clone());
            return;
        }
        go(edges, i + 1, cur, out);
        let (u, v) = edges[i];
        if cur.partner[u].is_none() && cur.partner[v].is_none() {
            cur.pair(u, v);
            go(edges, i + 1, cur, out);
            cur.partner[u] = None;
            cur.partner[v] = None;
        }
    }
    let mut out = Vec::new();
    go(graph.edges(), 0, &mut Matching::empty(graph.n()), &mut out);
    Ok(out)
}

fn maximum_matchings(tree: &Tree, caps: &Caps) -> Result<Vec<Matching>> {
    let all = all_matchings(tree, caps)?;
    let nu = all.iter().map(Matching::size).max().unwrap_or(0);
    Ok(all.into_iter().filter(|m| m.size() == nu).collect())
}

/// Law of `U(M)` for a uniform maximum matching, by enumeration.
pub fn exact_uncovered_law(tree: &Tree, caps: &Caps) -> Result<SubsetLaw> {
    let ground = (0..tree.n()).collect();
    let maxes = maximum_matchings(tree, caps)?;
    SubsetLaw::from_weights(ground, maxes.iter().map(|m| (uncovered(m), 1.0)).collect::<Vec<_>>())
}

/// Same law with exact rational probabilities.
pub fn exact_uncovered_law_rational(
    tree: &Tree,
    caps: &Caps,
) -> Result<BTreeMap<Vec<usize>, BigRational>> {
    let maxes = maximum_matchings(tree, caps)?;
    let p = BigRational::new(1.into(), (maxes.len() as u64).into());
    Ok(maxes.iter().map(|m| (uncovered(m), p.clone())).collect())
}

fn boltzmann_weights(tree: &Tree, z: f64, caps: &Caps) -> Result<Vec<(Matching, f64)>> {
    if !(z > 0.0 && z.is_finite()) {
        return Err(Error::Domain(format!("temperature z = {z} must be positive")));
    }
    let all = all_matchings(tree, caps)?;
    Ok(all
        .into_iter()
        .map(|m| {
            let k = (tree.n() - 2 * m.size()) as i32;
            (m, z.powi(k))
        })
        .collect())
}

/// Law of `Δ(M)` for the Boltzmann matching at `z`, by enumeration.
pub fn exact_delta_law(tree: &Tree, bip: &Bipartition, z: f64, caps: &Caps) -> Result<SubsetLaw> {
    let w = boltzmann_weights(tree, z, caps)?;
    SubsetLaw::from_weights(
        (0..tree.n()).collect(),
        w.iter().map(|(m, p)| (delta(m, bip), *p)).collect::<Vec<_>>(),
    )
}

/// Law of `U(M)` for the Boltzmann matching at `z`, by enumeration.
pub fn exact_boltzmann_uncovered_law(tree: &Tree, z: f64, caps: &Caps) -> Result<SubsetLaw> {
    let w = boltzmann_weights(tree, z, caps)?;
    SubsetLaw::from_weights(
        (0..tree.n()).collect(),
        w.iter().map(|(m, p)| (uncovered(m), *p)).collect::<Vec<_>>(),
    )
}
