//! Exact finite distributions over subsets of a vertex window.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};

/// Probability law on subsets of `ground`. Keys are sorted vertex lists.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubsetLaw {
    ground: Vec<usize>,
    support: BTreeMap<Vec<usize>, f64>,
}

impl SubsetLaw {
    /// Normalizes nonnegative weights into a law. Zero weights are dropped.
    pub fn from_weights(
        ground: Vec<usize>,
        weights: impl IntoIterator<Item = (Vec<usize>, f64)>,
    ) -> Result<SubsetLaw> {
        let mut ground = ground;
        ground.sort_unstable();
        ground.dedup();
        let mut support: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
        for (mut set, w) in weights {
            set.sort_unstable();
            if w < 0.0 || !w.is_finite() {
                return Err(Error::NegativeProbability { value: w, subset: set });
            }
            if let Some(v) = set.iter().find(|v| ground.binary_search(v).is_err()) {
                return Err(Error::GroundMismatch(format!("vertex {v} outside the ground set")));
            }
            if w > 0.0 {
                *support.entry(set).or_insert(0.0) += w;
            }
        }
        let total: f64 = support.values().sum();
        if total <= 0.0 {
            return Err(Error::Domain("law has no mass".into()));
        }
        for p in support.values_mut() {
            *p /= total;
        }
        Ok(SubsetLaw { ground, support })
    }

    /// Point mass on one subset.
    pub fn dirac(ground: Vec<usize>, set: Vec<usize>) -> Result<SubsetLaw> {
        SubsetLaw::from_weights(ground, [(set, 1.0)])
    }

    pub fn ground(&self) -> &[usize] {
        &self.ground
    }

    pub fn prob(&self, set: &[usize]) -> f64 {
        let mut key = set.to_vec();
        key.sort_unstable();
        self.support.get(&key).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<usize>, f64)> {
        self.support.iter().map(|(k, &p)| (k, p))
    }

    pub fn support_len(&self) -> usize {
        self.support.len()
    }

    pub fn total_mass(&self) -> f64 {
        self.support.values().sum()
    }

    /// `P(v ∈ X)`.
    pub fn inclusion(&self, v: usize) -> f64 {
        self.iter().filter(|(s, _)| s.binary_search(&v).is_ok()).map(|(_, p)| p).sum()
    }

    /// Law of `X ∩ window`; `window` must lie in the ground set.
    pub fn marginal(&self, window: &[usize]) -> Result<SubsetLaw> {
        let mut window = window.to_vec();
        window.sort_unstable();
        if let Some(v) = window.iter().find(|v| self.ground.binary_search(v).is_err()) {
            return Err(Error::GroundMismatch(format!("window vertex {v} outside the ground set")));
        }
        let weights = self.iter().map(|(s, p)| {
            let kept: Vec<usize> = s.iter().copied().filter(|v| window.binary_search(v).is_ok()).collect();
            (kept, p)
        });
        SubsetLaw::from_weights(window.clone(), weights.collect::<Vec<_>>())
    }

    /// Image under a vertex relabeling (e.g. a window's local-to-original map).
    pub fn relabel(&self, map: impl Fn(usize) -> usize) -> Result<SubsetLaw> {
        let ground = self.ground.iter().map(|&v| map(v)).collect();
        SubsetLaw::from_weights(
            ground,
            self.iter().map(|(s, p)| (s.iter().map(|&v| map(v)).collect(), p)).collect::<Vec<_>>(),
        )
    }

    /// Law of `ground ∖ X`.
    pub fn complement(&self) -> SubsetLaw {
        let support = self
            .iter()
            .map(|(s, p)| {
                let c: Vec<usize> =
                    self.ground.iter().copied().filter(|v| s.binary_search(v).is_err()).collect();
                (c, p)
            })
            .collect();
        SubsetLaw { ground: self.ground.clone(), support }
    }

    /// Largest absolute probability difference over the union of supports.
    pub fn max_abs_diff(&self, other: &SubsetLaw) -> f64 {
        self.support
            .keys()
            .chain(other.support.keys())
            .map(|k| (self.prob(k) - other.prob(k)).abs())
            .fold(0.0, f64::max)
    }

    pub fn entropy(&self) -> f64 {
        entropy_exact(self)
    }
}

/// `½ Σ |p₁(Y) − p₂(Y)|`.
pub fn tv_distance(a: &SubsetLaw, b: &SubsetLaw) -> Result<f64> {
    if a.ground != b.ground {
        return Err(Error::GroundMismatch(format!("{:?} vs {:?}", a.ground, b.ground)));
    }
    let keys: std::collections::BTreeSet<&Vec<usize>> =
        a.support.keys().chain(b.support.keys()).collect();
    Ok(0.5 * keys.into_iter().map(|k| (a.prob(k) - b.prob(k)).abs()).sum::<f64>())
}

/// Shannon entropy in nats, with `0 log 0 = 0`.
pub fn entropy_exact(law: &SubsetLaw) -> f64 {
    law.support.values().filter(|&&p| p > 0.0).map(|&p| -p * p.ln()).sum()
}

/// Binary entropy `−p log p − (1−p) log(1−p)` in nats.
pub fn binary_entropy(p: f64) -> f64 {
    let p = p.clamp(0.0, 1.0);
    let term = |x: f64| if x > 0.0 { -x * x.ln() } else { 0.0 };
    term(p) + term(1.0 - p)
}

/// Pearson goodness-of-fit result.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    /// `dof + 4·sqrt(2·dof)`: four standard deviations above the mean of χ²(dof).
    pub threshold: f64,
}

impl ChiSquare {
    pub fn passes(&self) -> bool {
        self.statistic <= self.threshold
    }
}

/// Compares sample counts against `law`. Any sample outside the support
/// makes the statistic infinite.
pub fn chi_square(counts: &BTreeMap<Vec<usize>, u64>, law: &SubsetLaw) -> ChiSquare {
    let total: u64 = counts.values().sum();
    let mut stat = 0.0;
    for (k, &c) in counts {
        if law.prob(k) <= 0.0 && c > 0 {
            stat = f64::INFINITY;
        }
    }
    for (k, p) in law.iter() {
        let expected = p * total as f64;
        let observed = counts.get(k).copied().unwrap_or(0) as f64;
        stat += (observed - expected).powi(2) / expected;
    }
    let dof = law.support_len().saturating_sub(1).max(1);
    ChiSquare { statistic: stat, dof, threshold: dof as f64 + 4.0 * (2.0 * dof as f64).sqrt() }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coin() -> SubsetLaw {
        SubsetLaw::from_weights(vec![0, 1], [(vec![0], 1.0), (vec![1], 1.0)]).unwrap()
    }

    #[test]
    fn tv_basics() {
        let a = coin();
        assert_eq!(tv_distance(&a, &a).unwrap(), 0.0);
        let x = SubsetLaw::dirac(vec![0, 1], vec![0]).unwrap();
        let y = SubsetLaw::dirac(vec![0, 1], vec![1]).unwrap();
        assert!((tv_distance(&x, &y).unwrap() - 1.0).abs() < 1e-15);
        let other = SubsetLaw::dirac(vec![0, 2], vec![0]).unwrap();
        assert!(tv_distance(&x, &other).is_err());
    }

    #[test]
    fn entropy_basics() {
        assert!((entropy_exact(&coin()) - 2f64.ln()).abs() < 1e-15);
        assert_eq!(entropy_exact(&SubsetLaw::dirac(vec![0], vec![]).unwrap()), 0.0);
        assert!((binary_entropy(0.5) - 2f64.ln()).abs() < 1e-15);
        assert_eq!(binary_entropy(1.0), 0.0);
    }

    #[test]
    fn marginal_and_complement() {
        let law = SubsetLaw::from_weights(
            vec![0, 1, 2],
            [(vec![0, 1], 1.0), (vec![1, 2], 1.0), (vec![0, 2], 2.0)],
        )
        .unwrap();
        let m = law.marginal(&[0]).unwrap();
        assert!((m.prob(&[0]) - 0.75).abs() < 1e-15);
        assert!((m.prob(&[]) - 0.25).abs() < 1e-15);
        let c = law.complement();
        assert!((c.prob(&[1]) - 0.5).abs() < 1e-15);
        assert!((law.inclusion(1) - 0.5).abs() < 1e-15);
        assert!(law.marginal(&[7]).is_err());
    }

    #[test]
    fn chi_square_flags_out_of_support() {
        let mut counts = BTreeMap::new();
        counts.insert(vec![0], 500);
        counts.insert(vec![1], 500);
        assert!(chi_square(&counts, &coin()).passes());
        counts.insert(vec![0, 1], 1);
        assert!(!chi_square(&counts, &coin()).passes());
    }
}
