//! Tree recursions for the root-uncovered ratios `m`, the path weights `w`
//! built from them, and the closed-form kernel rows they produce. Also the
//! canopy-tree counting recurrences and the alternating-tree sequence.

use std::ops::{Add, Div};

use nalgebra::DMatrix;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matching::big_ln;
use crate::tree::{Bipartition, RootedTree, Tree};

/// A nonnegative value or `+∞`, used for the zero-temperature conventions
/// `0⁻¹ = ∞` and `∞⁻¹ = 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum Extended<T> {
    Finite(T),
    Infinite,
}

impl<T: Clone + Zero + One + Div<Output = T>> Extended<T> {
    pub fn reciprocal(&self) -> Extended<T> {
        match self {
            Extended::Infinite => Extended::Finite(T::zero()),
            Extended::Finite(x) if x.is_zero() => Extended::Infinite,
            Extended::Finite(x) => Extended::Finite(T::one() / x.clone()),
        }
    }
}

/// Per-vertex recursion output for one root.
#[derive(Debug, Clone, Serialize)]
pub struct RecursionValues {
    /// Temperature; `0` for the zero-temperature recursion.
    pub z: f64,
    pub root: usize,
    pub m: Vec<f64>,
    /// Path weights `w_x` (`w_x^z` at positive temperature), without signs.
    /// At zero temperature vertices at odd distance carry `0`.
    pub w: Vec<f64>,
    /// `ln |w_x|`, `-∞` where the weight vanishes.
    pub log_w: Vec<f64>,
    /// Sign of `z^{-ℓ(x)}`; all `+1` unless `z < 0`.
    pub w_sign: Vec<f64>,
    pub depth: Vec<usize>,
}

impl RecursionValues {
    /// `h_x^z`: `m_x` on `S`, `1 − m_x` on `T`.
    pub fn h(&self, bip: &Bipartition) -> Vec<f64> {
        self.m.iter().enumerate().map(|(x, &m)| if bip.in_s(x) { m } else { 1.0 - m }).collect()
    }
}

/// `m_x^z = z² / (z² + Σ_{y≻x} m_y^z)`, evaluated bottom-up, with the path
/// weights `w_x^z = z^{-ℓ(x)} ∏_{v on the path o..x} m_v^z`.
pub fn solve_m_z(rooted: &RootedTree, z: f64) -> Result<RecursionValues> {
    if z == 0.0 || !z.is_finite() {
        return Err(Error::Domain("z must be finite and nonzero; use solve_m_zero at z = 0".into()));
    }
    let n = rooted.n();
    let z2 = z * z;
    let mut m = vec![0.0; n];
    for &x in rooted.order().iter().rev() {
        let sum: f64 = rooted.children(x).iter().map(|&y| m[y]).sum();
        m[x] = z2 / (z2 + sum);
    }
    let root = rooted.root();
    let mut log_w = vec![0.0; n];
    let mut w_sign = vec![1.0; n];
    let (lz, sz) = (z.abs().ln(), z.signum());
    for &x in rooted.order() {
        match rooted.parent(x) {
            None => log_w[x] = m[x].ln(),
            Some(p) => {
                log_w[x] = log_w[p] + m[x].ln() - lz;
                w_sign[x] = w_sign[p] * sz;
            }
        }
    }
    let w = log_w.iter().map(|l| l.exp()).collect();
    Ok(RecursionValues { z, root, m, w, log_w, w_sign, depth: rooted.depths().to_vec() })
}

/// Largest relative violation of the positive-temperature fixed-point equation.
pub fn fixed_point_residual(rooted: &RootedTree, values: &RecursionValues) -> f64 {
    let z2 = values.z * values.z;
    (0..rooted.n())
        .map(|x| {
            let sum: f64 = rooted.children(x).iter().map(|&y| values.m[y]).sum();
            let rhs = z2 / (z2 + sum);
            (values.m[x] - rhs).abs() / rhs.abs().max(f64::MIN_POSITIVE)
        })
        .fold(0.0, f64::max)
}

/// Zero-temperature ratios in any ordered field, bottom-up:
/// `m_x = 1 / (1 + Σ_{y≻x} (Σ_{u≻y} m_u)⁻¹)`.
///
/// On a finite tree this single pass is the only consistent evaluation, so
/// no fixed-point iteration or choice of solution is involved.
pub fn zero_temperature_ratios<T>(rooted: &RootedTree) -> Vec<T>
where
    T: Clone + Zero + One + Add<Output = T> + Div<Output = T>,
{
    let n = rooted.n();
    let mut m: Vec<T> = vec![T::zero(); n];
    for &x in rooted.order().iter().rev() {
        let mut outer = Extended::Finite(T::zero());
        for &y in rooted.children(x) {
            let inner = rooted.children(y).iter().fold(T::zero(), |acc, &u| acc + m[u].clone());
            outer = match (outer, Extended::Finite(inner).reciprocal()) {
                (Extended::Finite(a), Extended::Finite(b)) => Extended::Finite(a + b),
                _ => Extended::Infinite,
            };
        }
        m[x] = match outer {
            Extended::Infinite => T::zero(),
            Extended::Finite(s) => T::one() / (T::one() + s),
        };
    }
    m
}

/// Zero-temperature ratios `m_x` and the weights of the kernel formula:
/// `w_x = m_o ∏_{i=1}^{k} m_{v_{2i}} / Σ_{y≻v_{2i−1}} m_y` for `x = v_{2k}`,
/// with `0/0 = 0`.
pub fn solve_m_zero(rooted: &RootedTree) -> RecursionValues {
    let n = rooted.n();
    let m: Vec<f64> = zero_temperature_ratios(rooted);
    let mut w = vec![0.0; n];
    for &x in rooted.order() {
        let d = rooted.depth(x);
        if d == 0 {
            w[x] = m[x];
        } else if d.is_multiple_of(2) {
            let p = rooted.parent(x).unwrap();
            let g = rooted.parent(p).unwrap();
            let sum: f64 = rooted.children(p).iter().map(|&y| m[y]).sum();
            w[x] = if sum == 0.0 { 0.0 } else { w[g] * m[x] / sum };
        }
    }
    let log_w = w.iter().map(|v: &f64| v.ln()).collect();
    RecursionValues { z: 0.0, root: rooted.root(), m, w, log_w, w_sign: vec![1.0; n], depth: rooted.depths().to_vec() }
}

/// Exact rational zero-temperature ratios.
pub fn solve_m_zero_exact(rooted: &RootedTree) -> Vec<BigRational> {
    zero_temperature_ratios(rooted)
}

fn floor_half(x: i64) -> i64 {
    x.div_euclid(2)
}

fn parity_sign(e: i64) -> f64 {
    if e.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Row `o` of `P_{G,S,T}^z` from the recursion rooted at `o`.
pub fn ptemp_kernel_row(tree: &Tree, bip: &Bipartition, z: f64, o: usize) -> Result<Vec<f64>> {
    if !bip.is_proper_for(tree) {
        return Err(Error::Domain("bipartition is not a proper coloring of the tree".into()));
    }
    let rooted = tree.root_at(o)?;
    let vals = solve_m_z(&rooted, z)?;
    let o_in_s = bip.in_s(o);
    Ok((0..tree.n())
        .map(|x| {
            let l = vals.depth[x] as i64;
            let w = vals.w_sign[x] * vals.w[x];
            match (o_in_s, bip.in_s(x)) {
                (true, true) | (false, true) => parity_sign(floor_half(l)) * w,
                (true, false) => parity_sign(floor_half(l - 1)) * w,
                (false, false) if x == o => 1.0 - vals.m[o],
                (false, false) => parity_sign(floor_half(l - 1)) * w,
            }
        })
        .collect())
}

/// Row `o` of `P̄_G` from the zero-temperature recursion rooted at `o`.
pub fn zero_kernel_row(tree: &Tree, o: usize) -> Result<Vec<f64>> {
    let rooted = tree.root_at(o)?;
    let vals = solve_m_zero(&rooted);
    Ok((0..tree.n())
        .map(|x| {
            let l = vals.depth[x] as i64;
            if l % 2 == 1 {
                0.0
            } else {
                parity_sign(floor_half(l + 1)) * vals.w[x]
            }
        })
        .collect())
}

/// All rows of `P_{G,S,T}^z` from per-root recursions.
pub fn ptemp_kernel_matrix(tree: &Tree, bip: &Bipartition, z: f64) -> Result<DMatrix<f64>> {
    let n = tree.n();
    let mut out = DMatrix::zeros(n, n);
    for o in 0..n {
        for (x, v) in ptemp_kernel_row(tree, bip, z, o)?.into_iter().enumerate() {
            out[(o, x)] = v;
        }
    }
    Ok(out)
}

/// All rows of `P̄_G` from per-root recursions.
pub fn zero_kernel_matrix(tree: &Tree) -> Result<DMatrix<f64>> {
    let n = tree.n();
    let mut out = DMatrix::zeros(n, n);
    for o in 0..n {
        for (x, v) in zero_kernel_row(tree, o)?.into_iter().enumerate() {
            out[(o, x)] = v;
        }
    }
    Ok(out)
}

/// Above this many nats the canopy counts are kept in log-space only.
pub const CANOPY_EXACT_LOG_LIMIT: f64 = 1e5;

/// `a_n = mm(T_n)` for the complete `k`-ary tree of depth `n`.
#[derive(Debug, Clone, Serialize)]
pub struct CanopyTerm {
    pub n: usize,
    pub vertices: f64,
    pub log_a: f64,
    #[serde(serialize_with = "serialize_opt_big")]
    pub exact: Option<BigUint>,
}

fn serialize_opt_big<S: serde::Serializer>(v: &Option<BigUint>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(b) => s.serialize_str(&b.to_string()),
        None => s.serialize_none(),
    }
}

/// `|V(T_n)| = (k^{n+1} − 1)/(k − 1)`, as a float.
pub fn kary_vertex_count(k: usize, n: usize) -> f64 {
    let k = k as f64;
    (k.powi(n as i32 + 1) - 1.0) / (k - 1.0)
}

/// `a_1 = k`, `a_{2i} = (i+1)·a_{2i−1}^k`, `a_{2i+1} = k·a_{2i−1}^k·a_{2i}^{k−1}`,
/// for `n = 1..=n_max`.
pub fn canopy_counts(k: usize, n_max: usize) -> Result<Vec<CanopyTerm>> {
    if k < 2 {
        return Err(Error::Domain(format!("branching must be at least 2, got {k}")));
    }
    let mut out: Vec<CanopyTerm> = Vec::with_capacity(n_max);
    let kf = k as f64;
    for n in 1..=n_max {
        let (log_a, exact) = if n == 1 {
            (kf.ln(), Some(BigUint::from(k)))
        } else if n % 2 == 0 {
            let i = n / 2;
            let prev = &out[n - 2];
            let log_a = ((i + 1) as f64).ln() + kf * prev.log_a;
            let exact = (log_a <= CANOPY_EXACT_LOG_LIMIT)
                .then(|| prev.exact.as_ref().map(|a| BigUint::from(i + 1) * Pow::pow(a, k as u32)))
                .flatten();
            (log_a, exact)
        } else {
            let odd = &out[n - 3];
            let even = &out[n - 2];
            let log_a = kf.ln() + kf * odd.log_a + (kf - 1.0) * even.log_a;
            let exact = (log_a <= CANOPY_EXACT_LOG_LIMIT)
                .then(|| match (&odd.exact, &even.exact) {
                    (Some(a), Some(b)) => Some(BigUint::from(k) * Pow::pow(a, k as u32) * Pow::pow(b, k as u32 - 1)),
                    _ => None,
                })
                .flatten();
            (log_a, exact)
        };
        let log_a = exact.as_ref().map_or(log_a, big_ln);
        out.push(CanopyTerm { n, vertices: kary_vertex_count(k, n), log_a, exact });
    }
    Ok(out)
}

/// Closed form of `log a_{2i+1}`:
/// `(k^{2(i+1)} − 1)/(k² − 1)·log k + (k − 1)·Σ_{ℓ=2}^{i+1} k^{2(i+1−ℓ)} log ℓ`.
pub fn canopy_closed_form_log(k: usize, i: usize) -> f64 {
    let kf = k as f64;
    let first = (kf.powi(2 * (i as i32 + 1)) - 1.0) / (kf * kf - 1.0) * kf.ln();
    let series: f64 = (2..=i + 1).map(|l| kf.powi(2 * (i + 1 - l) as i32) * (l as f64).ln()).sum();
    first + (kf - 1.0) * series
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CanopyLimit {
    pub d: usize,
    pub terms: usize,
    pub value: f64,
    /// Upper bound on the omitted tail of the series.
    pub tail_bound: f64,
}

/// `log(d−1)/d + (d−2)² Σ_{ℓ=2}^{terms} (d−1)^{−2ℓ} log ℓ`, with a geometric
/// bound on the remainder.
pub fn canopy_limit(d: usize, terms: usize) -> Result<CanopyLimit> {
    if d < 3 {
        return Err(Error::Domain(format!("degree must be at least 3, got {d}")));
    }
    let q = ((d - 1) as f64).powi(-2);
    let c = ((d - 2) * (d - 2)) as f64;
    // Summed from the smallest term up.
    let series: f64 = (2..=terms).rev().map(|l| q.powi(l as i32) * (l as f64).ln()).sum();
    let value = ((d - 1) as f64).ln() / d as f64 + c * series;
    // Term ratios q·log(ℓ+1)/log ℓ decrease in ℓ, so the tail after `last`
    // is dominated by a geometric series.
    let last = terms.max(1);
    let next = (last + 1) as f64;
    let rho = q * (next + 1.0).ln() / next.ln();
    let tail_bound = c * q.powi(last as i32 + 1) * next.ln() / (1.0 - rho);
    Ok(CanopyLimit { d, terms, value, tail_bound })
}

/// `m_0 = 1`, `m_1 = 0`, `m_n = 1/(1 + (2m_{n−2})⁻¹)`.
pub fn pelda_sequence(n_max: usize) -> Vec<f64> {
    pelda_sequence_generic(n_max)
}

/// Exact rational version of [`pelda_sequence`].
pub fn pelda_sequence_exact(n_max: usize) -> Vec<BigRational> {
    pelda_sequence_generic(n_max)
}

fn pelda_sequence_generic<T>(n_max: usize) -> Vec<T>
where
    T: Clone + Zero + One + Add<Output = T> + Div<Output = T>,
{
    let mut m: Vec<T> = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let v = match n {
            0 => T::one(),
            1 => T::zero(),
            _ => {
                let prev = m[n - 2].clone();
                match Extended::Finite(prev.clone() + prev).reciprocal() {
                    Extended::Infinite => T::zero(),
                    Extended::Finite(r) => T::one() / (T::one() + r),
                }
            }
        };
        m.push(v);
    }
    m
}

pub fn rational_to_f64(q: &BigRational) -> f64 {
    match (q.numer().to_f64(), q.denom().to_f64()) {
        (Some(a), Some(b)) if a.is_finite() && b.is_finite() => a / b,
        _ => {
            let ln = |x: &BigInt| big_ln(x.magnitude());
            let s = if q.numer() < &BigInt::zero() { -1.0 } else { 1.0 };
            if q.numer().is_zero() {
                0.0
            } else {
                s * (ln(q.numer()) - ln(q.denom())).exp()
            }
        }
    }
}
