//! Size limits shared by generators, enumerators and dense linear algebra.

/// Environment variable overriding [`Caps::max_vertices`].
pub const CAP_ENV: &str = "TREEDET_CAP";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Largest tree a generator may build.
    pub max_vertices: usize,
    /// Largest ground set for exhaustive subset or matching enumeration.
    pub enumeration: usize,
    /// Largest ground set for the Boltzmann (Δ-law) verification.
    pub boltzmann_enumeration: usize,
    /// Largest matrix dimension for dense eigen/Gram computations.
    pub dense: usize,
    /// Above this vertex count, counts switch from big integers to log-space.
    pub exact_count_threshold: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_vertices: 5_000_000,
            enumeration: 16,
            boltzmann_enumeration: 14,
            dense: 4000,
            exact_count_threshold: 4096,
        }
    }
}

impl Caps {
    /// Defaults, with `TREEDET_CAP` applied to the generator cap when set.
    pub fn from_env() -> Self {
        let mut caps = Caps::default();
        if let Some(v) = std::env::var(CAP_ENV).ok().and_then(|s| s.trim().parse().ok()) {
            caps.max_vertices = v;
        }
        caps
    }

    pub fn with_max_vertices(mut self, cap: usize) -> Self {
        self.max_vertices = cap;
        self
    }
}
