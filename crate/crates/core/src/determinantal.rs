//! Determinantal measures of projection kernels: exact laws, sampling,
//! window marginals, chain-rule entropy, and the cross-checks against the
//! combinatorial matching laws.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::law::{binary_entropy, SubsetLaw};
use crate::matching::{exact_delta_law, exact_uncovered_law, matching_polynomial};
use crate::spectral::{
    boltzmann_subdeterminant, kernel_projection, positive_temp_projection, subdeterminant_closed_form,
    windowed_projection, BlockBasisMatrix, ProjectionMatrix,
};
use crate::tree::{bipartition_by_parity, Bipartition, Class, Tree};

/// Violations of `[0, 1]` larger than this are flagged by [`inclusion_prob`].
pub const INCLUSION_FLAG_TOL: f64 = 1e-8;
/// Inclusion–exclusion results down to `-NEGATIVE_CLAMP` are clamped to zero.
pub const NEGATIVE_CLAMP: f64 = 1e-9;
/// Conditioning pivots below this force the opposite event.
pub const PIVOT_TOL: f64 = 1e-12;

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn subsets_of_size(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else { break };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
    out
}

fn principal_minor(k: &DMatrix<f64>, f: &[usize]) -> f64 {
    if f.is_empty() {
        return 1.0;
    }
    DMatrix::from_fn(f.len(), f.len(), |i, j| k[(f[i], f[j])]).determinant()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InclusionProb {
    /// `det K_F` clamped to `[0, 1]`.
    pub value: f64,
    pub raw: f64,
    /// Set when the raw minor left `[0, 1]` by more than [`INCLUSION_FLAG_TOL`].
    pub flagged: bool,
}

/// `P(F ⊆ X) = det K_F`.
pub fn inclusion_prob(k: &DMatrix<f64>, f: &[usize]) -> InclusionProb {
    let raw = principal_minor(k, f);
    let flagged = !(-INCLUSION_FLAG_TOL..=1.0 + INCLUSION_FLAG_TOL).contains(&raw);
    InclusionProb { value: raw.clamp(0.0, 1.0), raw, flagged }
}

/// Orthonormal rows spanning the range of a projection.
fn range_basis(k: &ProjectionMatrix) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(k.matrix().clone());
    let cols: Vec<usize> = (0..k.dim()).filter(|&i| eig.eigenvalues[i] > 0.5).collect();
    eig.eigenvectors.select_columns(&cols).transpose()
}

/// The law `ν_K` on subsets of `0..n`: `ν(X) = det(B[X])²` for `|X| = rank`
/// with `B` an orthonormal basis of the range, zero otherwise.
pub fn exact_law(k: &ProjectionMatrix, caps: &Caps) -> Result<SubsetLaw> {
    let n = k.dim();
    if n > caps.enumeration {
        return Err(Error::CapExceeded { what: "determinantal enumeration", needed: n as u128, cap: caps.enumeration as u128 });
    }
    let b = range_basis(k);
    let r = b.nrows();
    let weights: Vec<(Vec<usize>, f64)> = subsets_of_size(n, r)
        .into_iter()
        .map(|x| {
            let d = if r == 0 { 1.0 } else { b.select_columns(&x).determinant() };
            (x, d * d)
        })
        .filter(|(_, p)| *p > 1e-300)
        .collect();
    SubsetLaw::from_weights((0..n).collect(), weights)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Event {
    Included(usize),
    Excluded(usize),
}

/// A kernel conditioned on a sequence of inclusion/exclusion events.
#[derive(Debug, Clone)]
pub struct ConditionedKernel {
    base: DMatrix<f64>,
    current: DMatrix<f64>,
    events: Vec<Event>,
    /// Largest amount a diagonal entry had to be clipped into `[0, 1]`.
    drift: f64,
}

impl ConditionedKernel {
    pub fn new(k: &DMatrix<f64>) -> ConditionedKernel {
        ConditionedKernel { base: k.clone(), current: k.clone(), events: Vec::new(), drift: 0.0 }
    }

    pub fn base(&self) -> &DMatrix<f64> {
        &self.base
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.current
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn drift(&self) -> f64 {
        self.drift
    }

    /// Current conditional probability that `v` is included.
    pub fn prob(&self, v: usize) -> f64 {
        self.current[(v, v)].clamp(0.0, 1.0)
    }

    /// Conditions on `v ∈ X` (`include`) or `v ∉ X` by a rank-one Schur
    /// complement. A degenerate pivot forces the other event; the event
    /// actually applied is returned.
    pub fn condition(&mut self, v: usize, include: bool) -> Event {
        let kvv = self.current[(v, v)];
        let include = if include { kvv >= PIVOT_TOL } else { 1.0 - kvv < PIVOT_TOL };
        let col = self.current.column(v).clone_owned();
        let denom = if include { kvv } else { kvv - 1.0 };
        self.current -= &col * col.transpose() / denom;
        self.current.row_mut(v).fill(0.0);
        self.current.column_mut(v).fill(0.0);
        self.current[(v, v)] = if include { 1.0 } else { 0.0 };
        for i in 0..self.current.nrows() {
            let d = self.current[(i, i)];
            let c = d.clamp(0.0, 1.0);
            self.drift = self.drift.max((d - c).abs());
            self.current[(i, i)] = c;
        }
        let event = if include { Event::Included(v) } else { Event::Excluded(v) };
        self.events.push(event);
        event
    }
}

/// One exact draw from `ν_K` by sequential conditioning over `0..n`.
pub fn sample_determinantal<R: Rng + ?Sized>(k: &ProjectionMatrix, rng: &mut R) -> Vec<usize> {
    let mut ck = ConditionedKernel::new(k.matrix());
    let mut out = Vec::with_capacity(k.rank());
    for v in 0..k.dim() {
        let u: f64 = rng.gen();
        if let Event::Included(v) = ck.condition(v, u < ck.prob(v)) {
            out.push(v);
        }
    }
    out
}

pub fn sample_determinantal_seeded(k: &ProjectionMatrix, seed: u64) -> Vec<usize> {
    sample_determinantal(k, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Law of `X ∩ W` by Möbius inversion of the principal minors over `W`:
/// `P(X ∩ W = Y) = Σ_{Y⊆Z⊆W} (−1)^{|Z∖Y|} det K_Z`.
pub fn window_marginal(k: &DMatrix<f64>, window: &[usize], caps: &Caps) -> Result<SubsetLaw> {
    let w = window.len();
    if w > caps.enumeration {
        return Err(Error::CapExceeded { what: "window marginal", needed: w as u128, cap: caps.enumeration as u128 });
    }
    let members = |mask: usize| -> Vec<usize> { (0..w).filter(|i| mask >> i & 1 == 1).map(|i| window[i]).collect() };
    let mut f: Vec<f64> = (0..1usize << w).map(|mask| principal_minor(k, &members(mask))).collect();
    for i in 0..w {
        for mask in 0..1usize << w {
            if mask >> i & 1 == 0 {
                f[mask] -= f[mask | 1 << i];
            }
        }
    }
    let mut weights = Vec::with_capacity(f.len());
    for (mask, &p) in f.iter().enumerate() {
        let set = members(mask);
        if p < -NEGATIVE_CLAMP {
            return Err(Error::NegativeProbability { value: p, subset: set });
        }
        weights.push((set, p.max(0.0)));
    }
    SubsetLaw::from_weights(window.to_vec(), weights)
}

/// How to order the vertices for [`entropy_chain_rule`].
#[derive(Debug, Clone)]
pub enum Labeling {
    /// Vertices are processed in increasing label order (ties by id).
    Labels(Vec<f64>),
    /// Independent uniform labels drawn from this seed.
    Seed(u64),
}

impl Labeling {
    pub fn order(&self, n: usize) -> Result<Vec<usize>> {
        let labels = match self {
            Labeling::Labels(l) => {
                if l.len() != n {
                    return Err(Error::Domain(format!("{} labels for {n} vertices", l.len())));
                }
                l.clone()
            }
            Labeling::Seed(s) => {
                let mut rng = ChaCha8Rng::seed_from_u64(*s);
                (0..n).map(|_| rng.gen::<f64>()).collect()
            }
        };
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| labels[a].total_cmp(&labels[b]).then(a.cmp(&b)));
        Ok(order)
    }
}

/// `H(ν_K) = Σ_v H(I(v) | I(u), u before v)`. Each conditional entropy is an
/// average of binary entropies of conditioned-kernel diagonals over the
/// histories of earlier indicators, so all branches of positive probability
/// are explored.
pub fn entropy_chain_rule(k: &ProjectionMatrix, labeling: &Labeling, caps: &Caps) -> Result<f64> {
    let n = k.dim();
    if n > caps.enumeration {
        return Err(Error::CapExceeded { what: "chain-rule entropy", needed: n as u128, cap: caps.enumeration as u128 });
    }
    let order = labeling.order(n)?;
    fn walk(ck: ConditionedKernel, order: &[usize], weight: f64) -> f64 {
        let Some((&v, rest)) = order.split_first() else { return 0.0 };
        let p = ck.prob(v);
        if p < PIVOT_TOL || 1.0 - p < PIVOT_TOL {
            let mut next = ck;
            next.condition(v, p >= 0.5);
            return walk(next, rest, weight);
        }
        let mut total = weight * binary_entropy(p);
        let mut inc = ck.clone();
        inc.condition(v, true);
        total += walk(inc, rest, weight * p);
        let mut exc = ck;
        exc.condition(v, false);
        total += walk(exc, rest, weight * (1.0 - p));
        total
    }
    Ok(walk(ConditionedKernel::new(k.matrix()), &order, 1.0))
}

/// Outcome of one identity check.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub check: String,
    pub n: usize,
    pub max_dev: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Deviation of each sub-check.
    pub components: BTreeMap<String, f64>,
}

impl VerificationReport {
    fn new(check: &str, n: usize, tolerance: f64, components: BTreeMap<String, f64>) -> VerificationReport {
        let max_dev = components.values().fold(0.0, |a: f64, &b| if b.is_nan() { f64::INFINITY } else { a.max(b) });
        VerificationReport { check: check.into(), n, max_dev, tolerance, passed: max_dev < tolerance, components }
    }
}

/// Compares the law of the uncovered set of a uniform maximum matching with
/// `ν_{P̄_G}`, subset by subset and through every inclusion probability.
pub fn verify_uncovered_determinantal(tree: &Tree, caps: &Caps) -> Result<VerificationReport> {
    let n = tree.n();
    let combinatorial = exact_uncovered_law(tree, caps)?;
    let kernel = kernel_projection(tree, caps)?;
    let spectral = exact_law(&kernel, caps)?;
    let mut superset = vec![0.0; 1usize << n];
    for (s, p) in combinatorial.iter() {
        superset[s.iter().fold(0usize, |m, &v| m | 1 << v)] += p;
    }
    for i in 0..n {
        for mask in 0..1usize << n {
            if mask >> i & 1 == 0 {
                superset[mask] += superset[mask | 1 << i];
            }
        }
    }
    let inclusion = (0..1usize << n)
        .map(|mask| {
            let f: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            (superset[mask] - inclusion_prob(kernel.matrix(), &f).raw).abs()
        })
        .fold(0.0, f64::max);
    let components = BTreeMap::from([
        ("law".to_string(), combinatorial.max_abs_diff(&spectral)),
        ("inclusion".to_string(), inclusion),
    ]);
    Ok(VerificationReport::new("uncovered-determinantal", n, 1e-9, components))
}

/// Compares the law of `Δ(M)` under the Boltzmann matching with `ν_{P^z}`,
/// checks each `|det B[X]|²` against its combinatorial value, and the
/// normalization `det(BBᵀ) = z^{|S|−|T|} P_G(z)`.
pub fn verify_boltzmann_determinantal(tree: &Tree, bip: &Bipartition, z: f64, caps: &Caps) -> Result<VerificationReport> {
    let n = tree.n();
    if n > caps.boltzmann_enumeration {
        return Err(Error::CapExceeded {
            what: "Boltzmann enumeration",
            needed: n as u128,
            cap: caps.boltzmann_enumeration as u128,
        });
    }
    if !(z > 0.0 && z.is_finite()) {
        return Err(Error::Domain(format!("z must be positive, got {z}")));
    }
    let combinatorial = exact_delta_law(tree, bip, z, caps)?;
    let kernel = positive_temp_projection(tree, bip, z, caps)?;
    let spectral = exact_law(&kernel, caps)?;
    let s = bip.s().len();
    let mut subdet = 0.0f64;
    let mut total = 0.0;
    for x in subsets_of_size(n, s) {
        let direct = boltzmann_subdeterminant(tree, bip, z, &x)?;
        let closed = subdeterminant_closed_form(tree, bip, z, &x)?;
        total += direct;
        let dev = if closed == 0.0 { direct.abs() } else { (direct - closed).abs() / closed };
        subdet = subdet.max(dev);
    }
    let gram_det = BlockBasisMatrix::new(tree, bip, z)?.gram().determinant();
    let poly = matching_polynomial(tree, caps).eval(z);
    let expected = z.powi(s as i32 - (n - s) as i32) * poly;
    let components = BTreeMap::from([
        ("law".to_string(), combinatorial.max_abs_diff(&spectral)),
        ("subdeterminant".to_string(), subdet),
        ("normalization".to_string(), (gram_det - expected).abs() / expected),
        ("cauchy_binet".to_string(), (total - expected).abs() / expected),
    ]);
    Ok(VerificationReport::new("boltzmann-determinantal", n, 1e-9, components))
}

/// Law of `(U_even ∩ S) ∪ (U_odd ∩ T)` on `B_{R+1}(o)`, where `U_even`,
/// `U_odd` are independent uncovered sets of uniform maximum matchings of the
/// balls of radius the largest even and odd integers not exceeding `R + 1`,
/// and `o ∈ S`.
pub fn even_odd_window_law(tree: &Tree, o: usize, radius: usize, caps: &Caps) -> Result<SubsetLaw> {
    let bip = bipartition_by_parity(&tree.root_at(o)?, Class::S);
    let top = radius + 1;
    let (r_even, r_odd) = if top.is_multiple_of(2) { (top, top - 1) } else { (top - 1, top) };
    let ball_law = |r: usize| -> Result<SubsetLaw> {
        let ball = tree.ball(o, r)?;
        let law = exact_uncovered_law(&ball.graph, caps)?;
        law.relabel(|v| ball.original[v])
    };
    let even = ball_law(r_even)?;
    let odd = ball_law(r_odd)?;
    let mut weights: Vec<(Vec<usize>, f64)> = Vec::new();
    for (a, pa) in even.iter() {
        for (b, pb) in odd.iter() {
            let mut y: Vec<usize> = a.iter().copied().filter(|&v| bip.in_s(v)).collect();
            y.extend(b.iter().copied().filter(|&v| !bip.in_s(v)));
            weights.push((y, pa * pb));
        }
    }
    SubsetLaw::from_weights(tree.ball_vertices(o, top)?, weights)
}

/// Compares the window marginal of `ν_{P̄_{G,o,R}}` on `B_{R+1}(o)` with
/// [`even_odd_window_law`].
pub fn verify_even_odd_window(tree: &Tree, o: usize, radius: usize, caps: &Caps) -> Result<VerificationReport> {
    let (_, kernel) = windowed_projection(tree, o, radius, caps)?;
    let window = tree.ball_vertices(o, radius + 1)?;
    let determinantal = window_marginal(kernel.matrix(), &window, caps)?;
    let combinatorial = even_odd_window_law(tree, o, radius, caps)?;
    let components = BTreeMap::from([("law".to_string(), determinantal.max_abs_diff(&combinatorial))]);
    Ok(VerificationReport::new("even-odd-window", tree.n(), 1e-9, components))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::law::{chi_square, entropy_exact, tv_distance};
    use crate::spectral::range_projection;
    use crate::tree::{free_tree_catalog, gen_path, gen_star};

    fn caps() -> Caps {
        Caps::default()
    }

    fn kernel(t: &Tree) -> ProjectionMatrix {
        kernel_projection(t, &caps()).unwrap()
    }

    fn p3() -> Tree {
        gen_path(3, &caps()).unwrap()
    }

    #[test]
    fn subsets() {
        assert_eq!(subsets_of_size(4, 2).len(), 6);
        assert_eq!(subsets_of_size(3, 0), vec![Vec::<usize>::new()]);
        assert!(subsets_of_size(2, 3).is_empty());
    }

    #[test]
    fn inclusion_examples() {
        let k = kernel(&p3());
        assert_eq!(inclusion_prob(k.matrix(), &[]).value, 1.0);
        assert!((inclusion_prob(k.matrix(), &[0]).value - 0.5).abs() < 1e-12);
        let star = kernel(&gen_star(3));
        let ip = inclusion_prob(star.matrix(), &[1, 2]);
        assert!((ip.value - 1.0 / 3.0).abs() < 1e-12 && !ip.flagged);
    }

    #[test]
    fn exact_law_examples() {
        let law = exact_law(&kernel(&p3()), &caps()).unwrap();
        assert!((law.prob(&[0]) - 0.5).abs() < 1e-12 && (law.prob(&[2]) - 0.5).abs() < 1e-12);
        let law = exact_law(&kernel(&gen_path(2, &caps()).unwrap()), &caps()).unwrap();
        assert!((law.prob(&[]) - 1.0).abs() < 1e-12);
        let law = exact_law(&kernel(&gen_star(3)), &caps()).unwrap();
        assert_eq!(law.support_len(), 3);
        assert!(law.iter().all(|(s, p)| !s.contains(&0) && (p - 1.0 / 3.0).abs() < 1e-12));
    }

    #[test]
    fn sampler_basics() {
        let id = ProjectionMatrix::identity(4);
        assert_eq!(sample_determinantal_seeded(&id, 3), vec![0, 1, 2, 3]);
        let k = kernel(&p3());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut zero = 0;
        for _ in 0..100_000 {
            let x = sample_determinantal(&k, &mut rng);
            assert_eq!(x.len(), 1);
            zero += usize::from(x == vec![0]);
        }
        assert!((zero as f64 / 1e5 - 0.5).abs() < 0.01);
    }

    #[test]
    fn sampler_chi_square_on_catalog() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for t in free_tree_catalog(6) {
            let k = kernel(&t);
            let law = exact_law(&k, &caps()).unwrap();
            let mut counts = BTreeMap::new();
            for _ in 0..20_000 {
                *counts.entry(sample_determinantal(&k, &mut rng)).or_insert(0u64) += 1;
            }
            assert!(chi_square(&counts, &law).passes());
        }
    }

    #[test]
    fn window_marginal_examples() {
        let k = kernel(&gen_star(3));
        let single = window_marginal(k.matrix(), &[1], &caps()).unwrap();
        assert!((single.prob(&[1]) - k.entry(1, 1)).abs() < 1e-12);
        let two = window_marginal(k.matrix(), &[1, 2], &caps()).unwrap();
        for (set, p) in [(vec![1, 2], 1.0 / 3.0), (vec![1], 1.0 / 3.0), (vec![2], 1.0 / 3.0), (vec![], 0.0)] {
            assert!((two.prob(&set) - p).abs() < 1e-12);
        }
        let full = window_marginal(k.matrix(), &[0, 1, 2, 3], &caps()).unwrap();
        assert!(full.max_abs_diff(&exact_law(&k, &caps()).unwrap()) < 1e-12);
        let big = DMatrix::identity(17, 17);
        assert!(window_marginal(&big, &(0..17).collect::<Vec<_>>(), &caps()).is_err());
    }

    #[test]
    fn window_consistency_and_complement() {
        for t in free_tree_catalog(7) {
            let k = kernel(&t);
            let n = t.n();
            let all: Vec<usize> = (0..n).collect();
            let full = window_marginal(k.matrix(), &all, &caps()).unwrap();
            for mask in 0..1usize << n {
                let w: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
                let direct = window_marginal(k.matrix(), &w, &caps()).unwrap();
                assert!(direct.max_abs_diff(&full.marginal(&w).unwrap()) < 1e-10);
            }
            let dual = exact_law(&k.complement(), &caps()).unwrap();
            assert!(dual.max_abs_diff(&exact_law(&k, &caps()).unwrap().complement()) < 1e-10);
        }
    }

    #[test]
    fn tv_window_example() {
        let t = p3();
        let full = kernel(&t);
        let (_, local) = windowed_projection(&t, 0, 0, &caps()).unwrap();
        let a = window_marginal(full.matrix(), &[0, 1], &caps()).unwrap();
        let b = window_marginal(local.matrix(), &[0, 1], &caps()).unwrap();
        let d = tv_distance(&a, &b).unwrap();
        assert!((0.0..=1.0).contains(&d));
        assert_eq!(d, tv_distance(&a, &b).unwrap());
    }

    #[test]
    fn chain_rule_entropy() {
        let single = ProjectionMatrix::from_matrix(DMatrix::from_element(1, 1, 1.0)).unwrap();
        assert_eq!(entropy_chain_rule(&single, &Labeling::Seed(0), &caps()).unwrap(), 0.0);
        let k = kernel(&p3());
        for perm in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
            let labels = perm.iter().map(|&x| x as f64).collect();
            let h = entropy_chain_rule(&k, &Labeling::Labels(labels), &caps()).unwrap();
            assert!((h - 2f64.ln()).abs() < 1e-9);
        }
        for t in free_tree_catalog(7) {
            let k = kernel(&t);
            let exact = entropy_exact(&exact_law(&k, &caps()).unwrap());
            let hs: Vec<f64> =
                (0..20).map(|s| entropy_chain_rule(&k, &Labeling::Seed(s), &caps()).unwrap()).collect();
            let (lo, hi) = hs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &x| (l.min(x), h.max(x)));
            assert!(hi - lo < 1e-9);
            assert!((hi - exact).abs() < 1e-9);
        }
    }

    #[test]
    fn conditioning_degenerate_pivot() {
        let k = range_projection(&gen_path(2, &caps()).unwrap(), &caps()).unwrap();
        let mut ck = ConditionedKernel::new(k.matrix());
        assert_eq!(ck.condition(0, false), Event::Included(0));
        let zero = DMatrix::zeros(2, 2);
        let mut ck = ConditionedKernel::new(&zero);
        assert_eq!(ck.condition(1, true), Event::Excluded(1));
    }

    #[test]
    fn uncovered_identity_small() {
        for t in [p3(), gen_star(3)] {
            assert!(verify_uncovered_determinantal(&t, &caps()).unwrap().max_dev < 1e-10);
        }
    }

    #[test]
    fn boltzmann_identity_small() {
        let t = gen_path(2, &caps()).unwrap();
        let bip = Bipartition::from_s_mask(vec![true, false]);
        let r = verify_boltzmann_determinantal(&t, &bip, 1.0, &caps()).unwrap();
        assert!(r.passed, "{r:?}");
        let bip3 = bipartition_by_parity(&p3().root_at(0).unwrap(), Class::S);
        for z in [0.5, 1.0, 2.0] {
            assert!(verify_boltzmann_determinantal(&p3(), &bip3, z, &caps()).unwrap().passed);
        }
        assert!(verify_boltzmann_determinantal(&p3(), &bip3, 0.0, &caps()).is_err());
    }

    #[test]
    fn even_odd_window_small() {
        for t in free_tree_catalog(6) {
            for o in 0..t.n() {
                for r in 0..=t.diameter() {
                    let rep = verify_even_odd_window(&t, o, r, &caps()).unwrap();
                    assert!(rep.passed, "{} o={o} R={r}: {rep:?}", t.to_edge_list());
                }
            }
        }
    }
}
