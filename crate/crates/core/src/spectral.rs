//! Dense projection matrices attached to a graph: the kernel and row-space
//! projections of the adjacency matrix, their windowed versions, and the
//! positive-temperature projection onto the row space of `(zI | H)`.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::matching::reconstruct_matching;
use crate::tree::{Bipartition, Graph, Tree};

pub const SYMMETRY_TOL: f64 = 1e-10;
pub const IDEMPOTENCE_TOL: f64 = 1e-8;
/// Relative eigenvalue threshold for the adjacency kernel.
pub const KERNEL_EIG_TOL: f64 = 1e-8;
/// Relative norm below which a vector is dropped as dependent during orthogonalization.
pub const SPAN_DROP_TOL: f64 = 1e-10;
/// Gram condition number above which the Cholesky route is abandoned.
pub const GRAM_CONDITION_LIMIT: f64 = 1e12;

/// A dense symmetric idempotent matrix with its residual diagnostics.
#[derive(Debug, Clone)]
pub struct ProjectionMatrix {
    matrix: DMatrix<f64>,
    rank: usize,
    symmetry_residual: f64,
    idempotence_residual: f64,
    annihilation_residual: Option<f64>,
    condition: Option<f64>,
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |a, x| a.max(x.abs()))
}

impl ProjectionMatrix {
    /// Validates symmetry and idempotence; the rank is the rounded trace.
    pub fn from_matrix(matrix: DMatrix<f64>) -> Result<ProjectionMatrix> {
        if !matrix.is_square() {
            return Err(Error::NotProjection("not square".into()));
        }
        let symmetry_residual = max_abs(&(&matrix - matrix.transpose()));
        let matrix = (&matrix + matrix.transpose()) * 0.5;
        let idempotence_residual = max_abs(&(&matrix * &matrix - &matrix));
        if symmetry_residual > SYMMETRY_TOL {
            return Err(Error::NotProjection(format!("symmetry residual {symmetry_residual:e}")));
        }
        if idempotence_residual > IDEMPOTENCE_TOL {
            return Err(Error::NotProjection(format!("idempotence residual {idempotence_residual:e}")));
        }
        let rank = matrix.trace().round().max(0.0) as usize;
        Ok(ProjectionMatrix {
            matrix,
            rank,
            symmetry_residual,
            idempotence_residual,
            annihilation_residual: None,
            condition: None,
        })
    }

    /// Projection onto the span of the orthonormal columns of `q`.
    pub fn from_orthonormal(q: &DMatrix<f64>) -> Result<ProjectionMatrix> {
        let mut p = ProjectionMatrix::from_matrix(q * q.transpose())?;
        p.rank = q.ncols();
        Ok(p)
    }

    pub fn identity(n: usize) -> ProjectionMatrix {
        ProjectionMatrix::from_matrix(DMatrix::identity(n, n)).unwrap()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.matrix[(i, j)]
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.matrix.row(i).iter().copied().collect()
    }

    pub fn symmetry_residual(&self) -> f64 {
        self.symmetry_residual
    }

    pub fn idempotence_residual(&self) -> f64 {
        self.idempotence_residual
    }

    /// `max |(A P)_{ij}|` for kernel projections.
    pub fn annihilation_residual(&self) -> Option<f64> {
        self.annihilation_residual
    }

    /// Condition number of the Gram matrix, when one was inverted.
    pub fn condition(&self) -> Option<f64> {
        self.condition
    }

    /// `I − P`.
    pub fn complement(&self) -> ProjectionMatrix {
        let n = self.dim();
        let mut c = ProjectionMatrix::from_matrix(DMatrix::identity(n, n) - &self.matrix).unwrap();
        c.rank = n - self.rank;
        c
    }

    /// Principal submatrix on `indices` (in the given order).
    pub fn submatrix(&self, indices: &[usize]) -> DMatrix<f64> {
        DMatrix::from_fn(indices.len(), indices.len(), |i, j| self.matrix[(indices[i], indices[j])])
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim()).map(|i| self.row(i)).collect()
    }
}

pub fn adjacency_matrix(graph: &Graph) -> DMatrix<f64> {
    let n = graph.n();
    let mut a = DMatrix::zeros(n, n);
    for &(u, v) in graph.edges() {
        a[(u, v)] = 1.0;
        a[(v, u)] = 1.0;
    }
    a
}

fn check_dense(n: usize, caps: &Caps) -> Result<()> {
    if n > caps.dense {
        return Err(Error::CapExceeded { what: "dense linear algebra", needed: n as u128, cap: caps.dense as u128 });
    }
    Ok(())
}

/// `P̄_G`: orthogonal projection onto `ker A`.
///
/// The kernel is read off a symmetric eigendecomposition and its dimension
/// must equal the exact integer nullity; a mismatch is an error.
pub fn kernel_projection(graph: &Graph, caps: &Caps) -> Result<ProjectionMatrix> {
    let n = graph.n();
    check_dense(n, caps)?;
    let a = adjacency_matrix(graph);
    let eig = SymmetricEigen::new(a.clone());
    let radius = eig.eigenvalues.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let threshold = KERNEL_EIG_TOL * radius.max(1.0);
    let kernel: Vec<usize> = (0..n).filter(|&i| eig.eigenvalues[i].abs() < threshold).collect();
    let exact = n - rank_exact(graph);
    if kernel.len() != exact {
        return Err(Error::KernelRankMismatch { spectral: kernel.len(), exact });
    }
    let v = eig.eigenvectors.select_columns(&kernel);
    let mut p = ProjectionMatrix::from_orthonormal(&v)?;
    p.annihilation_residual = Some(max_abs(&(&a * p.matrix())));
    Ok(p)
}

/// `Π_G = I − P̄_G`: orthogonal projection onto the row space of `A`.
pub fn range_projection(graph: &Graph, caps: &Caps) -> Result<ProjectionMatrix> {
    Ok(kernel_projection(graph, caps)?.complement())
}

/// Orthonormal basis (as columns) of the span of `vectors`, by modified
/// Gram–Schmidt with column pivoting. Vectors whose residual falls below
/// `SPAN_DROP_TOL` times the largest input norm are dropped.
pub fn orthonormal_span(vectors: &[DVector<f64>], dim: usize) -> DMatrix<f64> {
    let mut work: Vec<DVector<f64>> = vectors.to_vec();
    let scale = work.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut basis: Vec<DVector<f64>> = Vec::new();
    let mut alive: Vec<bool> = vec![true; work.len()];
    loop {
        let best = (0..work.len())
            .filter(|&i| alive[i])
            .map(|i| (i, work[i].norm()))
            .max_by(|a, b| a.1.total_cmp(&b.1));
        let Some((j, norm)) = best else { break };
        if norm <= SPAN_DROP_TOL * scale || norm == 0.0 {
            break;
        }
        alive[j] = false;
        let mut q = work[j].clone();
        for b in &basis {
            let c = b.dot(&q);
            q.axpy(-c, b, 1.0);
        }
        let qn = q.norm();
        if qn <= SPAN_DROP_TOL * scale {
            continue;
        }
        q /= qn;
        for i in 0..work.len() {
            if alive[i] {
                let c = q.dot(&work[i]);
                work[i].axpy(-c, &q, 1.0);
            }
        }
        basis.push(q);
    }
    if basis.is_empty() {
        return DMatrix::zeros(dim, 0);
    }
    DMatrix::from_columns(&basis)
}

/// `Π_{G,o,R}` expressed on the vertices of `B_{R+1}(G, o)`, outside of which
/// it vanishes.
#[derive(Debug, Clone)]
pub struct LocalProjection {
    /// Original ids of `B_{R+1}(G, o)` in BFS order; local index 0 is `o`.
    pub vertices: Vec<usize>,
    pub matrix: DMatrix<f64>,
    pub rank: usize,
}

impl LocalProjection {
    pub fn local_index(&self, v: usize) -> Option<usize> {
        self.vertices.iter().position(|&w| w == v)
    }

    /// Entry at original ids; zero outside the support.
    pub fn entry(&self, u: usize, v: usize) -> f64 {
        match (self.local_index(u), self.local_index(v)) {
            (Some(i), Some(j)) => self.matrix[(i, j)],
            _ => 0.0,
        }
    }
}

/// Projection onto `span{ b⁰(v) : v ∈ B_R(G, o) }` in local coordinates.
pub fn window_range_local(graph: &Graph, o: usize, radius: usize) -> Result<LocalProjection> {
    let inner = graph.ball_vertices(o, radius)?;
    let vertices = graph.ball_vertices(o, radius + 1)?;
    let index: std::collections::HashMap<usize, usize> =
        vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let d = vertices.len();
    let vectors: Vec<DVector<f64>> = inner
        .iter()
        .map(|&v| {
            let mut b = DVector::zeros(d);
            for &w in graph.neighbors(v) {
                b[index[&w]] = 1.0;
            }
            b
        })
        .collect();
    let q = orthonormal_span(&vectors, d);
    Ok(LocalProjection { vertices, matrix: &q * q.transpose(), rank: q.ncols() })
}

/// `(Π_{G,o,R}, P̄_{G,o,R})` as full `n × n` projections.
pub fn windowed_projection(
    graph: &Graph,
    o: usize,
    radius: usize,
    caps: &Caps,
) -> Result<(ProjectionMatrix, ProjectionMatrix)> {
    let n = graph.n();
    check_dense(n, caps)?;
    let local = window_range_local(graph, o, radius)?;
    let mut full = DMatrix::zeros(n, n);
    for (i, &u) in local.vertices.iter().enumerate() {
        for (j, &v) in local.vertices.iter().enumerate() {
            full[(u, v)] = local.matrix[(i, j)];
        }
    }
    let mut range = ProjectionMatrix::from_matrix(full)?;
    range.rank = local.rank;
    let kernel = range.complement();
    Ok((range, kernel))
}

/// `B_G^z`: rows indexed by `S`, columns by all vertices, row `s` equal to
/// `b^z(s) = z·χ_s + Σ_{y∼s} χ_y`. Up to a column permutation this is the
/// block matrix `(zI | H_G)`.
#[derive(Debug, Clone)]
pub struct BlockBasisMatrix {
    pub s: Vec<usize>,
    pub t: Vec<usize>,
    pub z: f64,
    pub matrix: DMatrix<f64>,
}

impl BlockBasisMatrix {
    pub fn new(tree: &Tree, bip: &Bipartition, z: f64) -> Result<BlockBasisMatrix> {
        if !bip.is_proper_for(tree) {
            return Err(Error::Domain("bipartition is not a proper coloring of the tree".into()));
        }
        let s = bip.s();
        let t = bip.t();
        let mut matrix = DMatrix::zeros(s.len(), tree.n());
        for (row, &v) in s.iter().enumerate() {
            matrix[(row, v)] = z;
            for &w in tree.neighbors(v) {
                matrix[(row, w)] = 1.0;
            }
        }
        Ok(BlockBasisMatrix { s, t, z, matrix })
    }

    /// `H_G`: the `S × T` biadjacency block.
    pub fn h_block(&self) -> DMatrix<f64> {
        self.matrix.select_columns(&self.t)
    }

    /// `B[X]`: the columns indexed by `x`.
    pub fn columns(&self, x: &[usize]) -> DMatrix<f64> {
        self.matrix.select_columns(x)
    }

    pub fn gram(&self) -> DMatrix<f64> {
        &self.matrix * self.matrix.transpose()
    }
}

/// `P^z_{G,S,T}`: orthogonal projection onto the row space of `B_G^z`.
pub fn positive_temp_projection(tree: &Tree, bip: &Bipartition, z: f64, caps: &Caps) -> Result<ProjectionMatrix> {
    check_dense(tree.n(), caps)?;
    let b = BlockBasisMatrix::new(tree, bip, z)?;
    let n = tree.n();
    if b.s.is_empty() {
        return ProjectionMatrix::from_matrix(DMatrix::zeros(n, n));
    }
    let via_span = |b: &BlockBasisMatrix| -> Result<ProjectionMatrix> {
        let rows: Vec<DVector<f64>> = b.matrix.row_iter().map(|r| r.transpose()).collect();
        let q = orthonormal_span(&rows, n);
        if q.ncols() < b.s.len() {
            return Err(Error::RankDeficient(format!(
                "rows of B at z = {z} span only {} of {} dimensions; use the windowed orthogonalization",
                q.ncols(),
                b.s.len()
            )));
        }
        ProjectionMatrix::from_orthonormal(&q)
    };
    if z == 0.0 {
        return via_span(&b);
    }
    let gram = b.gram();
    let eig = gram.clone().symmetric_eigenvalues();
    let (lo, hi) = eig.iter().fold((f64::INFINITY, 0.0f64), |(l, h), &x| (l.min(x), h.max(x)));
    let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    let mut p = if condition > GRAM_CONDITION_LIMIT {
        via_span(&b)?
    } else {
        let chol = gram
            .cholesky()
            .ok_or_else(|| Error::RankDeficient("Gram matrix is not positive definite".into()))?;
        let solved = chol.solve(&b.matrix);
        let mut p = ProjectionMatrix::from_matrix(b.matrix.transpose() * solved)?;
        p.rank = b.s.len();
        p
    };
    p.condition = Some(condition);
    Ok(p)
}

/// Rank of the adjacency matrix by fraction-free (Bareiss) elimination.
pub fn rank_exact(graph: &Graph) -> usize {
    let n = graph.n();
    let mut m = vec![vec![0i128; n]; n];
    for &(u, v) in graph.edges() {
        m[u][v] = 1;
        m[v][u] = 1;
    }
    match bareiss_rank_i128(m.clone()) {
        Some(r) => r,
        None => bareiss_rank_big(m.into_iter().map(|r| r.into_iter().map(BigInt::from).collect()).collect()),
    }
}

fn bareiss_rank_i128(mut m: Vec<Vec<i128>>) -> Option<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut prev: i128 = 1;
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| m[i][c] != 0) else { continue };
        m.swap(r, p);
        let pivot = m[r][c];
        for i in r + 1..rows {
            let lead = m[i][c];
            for j in c + 1..cols {
                let a = pivot.checked_mul(m[i][j])?;
                let b = lead.checked_mul(m[r][j])?;
                m[i][j] = a.checked_sub(b)? / prev;
            }
            m[i][c] = 0;
        }
        prev = pivot;
        r += 1;
    }
    Some(r)
}

fn bareiss_rank_big(mut m: Vec<Vec<BigInt>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut prev = BigInt::from(1);
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let pivot = m[r][c].clone();
        for i in r + 1..rows {
            let lead = m[i][c].clone();
            for j in c + 1..cols {
                let v = (&pivot * &m[i][j] - &lead * &m[r][j]) / &prev;
                m[i][j] = v;
            }
            m[i][c] = BigInt::zero();
        }
        prev = pivot;
        r += 1;
    }
    r
}

/// `rang_R(G) = Σ_o ⟨Π_{G,o,R} χ_o, χ_o⟩`.
///
/// Windows sharing the same inner ball share one projection, so large radii
/// cost a single decomposition.
pub fn rank_windowed(graph: &Graph, radius: usize) -> Result<f64> {
    let mut groups: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
    for o in 0..graph.n() {
        let mut inner = graph.ball_vertices(o, radius)?;
        inner.sort_unstable();
        groups.entry(inner).or_default().push(o);
    }
    let groups: Vec<Vec<usize>> = groups.into_values().collect();
    let parts: Result<Vec<f64>> = groups
        .par_iter()
        .map(|centers| {
            let local = window_range_local(graph, centers[0], radius)?;
            Ok(centers.iter().map(|&o| local.entry(o, o)).sum())
        })
        .collect();
    Ok(parts?.iter().sum())
}

/// `|det B_G^z[X]|²` computed directly from the columns of `B`.
pub fn boltzmann_subdeterminant(tree: &Tree, bip: &Bipartition, z: f64, x: &[usize]) -> Result<f64> {
    let b = BlockBasisMatrix::new(tree, bip, z)?;
    if x.len() != b.s.len() {
        return Err(Error::Domain(format!("|X| = {} but |S| = {}", x.len(), b.s.len())));
    }
    for &v in x {
        tree.check_vertex(v)?;
    }
    let d = b.columns(x).determinant();
    Ok(d * d)
}

/// The combinatorial value of `|det B_G^z[X]|²`: zero when no matching has
/// `Δ(M) = X`, otherwise `z^{2|S ∩ X|}`.
pub fn subdeterminant_closed_form(tree: &Tree, bip: &Bipartition, z: f64, x: &[usize]) -> Result<f64> {
    let s_count = bip.s().len();
    if x.len() != s_count {
        return Err(Error::Domain(format!("|X| = {} but |S| = {s_count}", x.len())));
    }
    let mut in_x = vec![false; tree.n()];
    for &v in x {
        tree.check_vertex(v)?;
        in_x[v] = true;
    }
    let u: Vec<usize> = (0..tree.n()).filter(|&v| in_x[v] != !bip.in_s(v)).collect();
    match reconstruct_matching(tree, &u) {
        Ok(_) => {
            let k = x.iter().filter(|&&v| bip.in_s(v)).count();
            Ok(z.powi(2 * k as i32))
        }
        Err(Error::Reconstruction { .. }) => Ok(0.0),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{bipartition_by_parity, free_tree_catalog, gen_path, gen_star, random_graph, random_tree, Class};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn caps() -> Caps {
        Caps::default()
    }

    fn p(n: usize) -> Tree {
        gen_path(n, &caps()).unwrap()
    }

    fn close(a: &DMatrix<f64>, b: &DMatrix<f64>, tol: f64) -> bool {
        max_abs(&(a - b)) < tol
    }

    #[test]
    fn kernel_examples() {
        let k1 = kernel_projection(&Tree::single_vertex(), &caps()).unwrap();
        assert!((k1.entry(0, 0) - 1.0).abs() < 1e-12);
        let k2 = kernel_projection(&p(2), &caps()).unwrap();
        assert_eq!(k2.rank(), 0);
        assert!(max_abs(k2.matrix()) < 1e-12);
        let k3 = kernel_projection(&p(3), &caps()).unwrap();
        let expect = DMatrix::from_row_slice(3, 3, &[0.5, 0.0, -0.5, 0.0, 0.0, 0.0, -0.5, 0.0, 0.5]);
        assert!(close(k3.matrix(), &expect, 1e-12));
        assert!(k3.annihilation_residual().unwrap() < 1e-8);
    }

    #[test]
    fn range_examples() {
        let r2 = range_projection(&p(2), &caps()).unwrap();
        assert!(close(r2.matrix(), &DMatrix::identity(2, 2), 1e-12));
        let r1 = range_projection(&Tree::single_vertex(), &caps()).unwrap();
        assert!(r1.entry(0, 0).abs() < 1e-12);
        for t in free_tree_catalog(10) {
            let r = range_projection(&t, &caps()).unwrap();
            assert!((r.matrix().trace() - rank_exact(&t) as f64).abs() < 1e-9);
            let k = kernel_projection(&t, &caps()).unwrap();
            assert!(close(&(r.matrix() + k.matrix()), &DMatrix::identity(t.n(), t.n()), 1e-12));
        }
    }

    #[test]
    fn exact_ranks() {
        assert_eq!(rank_exact(&p(3)), 2);
        assert_eq!(rank_exact(&gen_star(3)), 2);
        // forests have rank twice their matching number
        let caps = caps();
        for t in free_tree_catalog(10) {
            assert_eq!(rank_exact(&t), 2 * crate::matching::max_matching_stats(&t, &caps).nu);
        }
        let mut m = vec![vec![BigInt::from(0); 3]; 3];
        m[0][1] = 1.into();
        m[1][0] = 1.into();
        m[1][2] = 1.into();
        m[2][1] = 1.into();
        assert_eq!(bareiss_rank_big(m), 2);
    }

    #[test]
    fn kernel_rank_on_random_trees_and_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for i in 0..100 {
            let n = 1 + (i * 2) % 200;
            let t = random_tree(n, &mut rng);
            let k = kernel_projection(&t, &caps()).unwrap();
            assert_eq!(k.rank(), n - rank_exact(&t));
        }
        for _ in 0..10 {
            let g = random_graph(40, 15, &mut rng);
            let k = kernel_projection(&g, &caps()).unwrap();
            assert_eq!(k.rank(), 40 - rank_exact(&g));
        }
    }

    #[test]
    fn windowed_examples() {
        let g = p(3);
        let (range, _) = windowed_projection(&g, 1, 0, &caps()).unwrap();
        let d: Vec<f64> = (0..3).map(|i| range.entry(i, i)).collect();
        assert!((d[0] - 0.5).abs() < 1e-12 && d[1].abs() < 1e-12 && (d[2] - 0.5).abs() < 1e-12);
        assert!((range.entry(0, 2) - 0.5).abs() < 1e-12);

        for t in free_tree_catalog(8) {
            let full = range_projection(&t, &caps()).unwrap();
            let diam = t.diameter();
            for o in 0..t.n() {
                let (r, _) = windowed_projection(&t, o, diam, &caps()).unwrap();
                assert!(close(r.matrix(), full.matrix(), 1e-10));
                let mut last = vec![0.0; t.n()];
                for radius in 0..=diam {
                    let (r, _) = windowed_projection(&t, o, radius, &caps()).unwrap();
                    for u in 0..t.n() {
                        assert!(r.entry(u, u) >= last[u] - 1e-12);
                        last[u] = r.entry(u, u);
                    }
                }
            }
        }
    }

    #[test]
    fn windowed_ranks() {
        let g = p(3);
        assert!((rank_windowed(&g, 1).unwrap() - 2.0).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10 {
            let g = random_graph(30, 6, &mut rng);
            let exact = rank_exact(&g) as f64;
            let mut prev = 0.0;
            for radius in 0..4 {
                let r = rank_windowed(&g, radius).unwrap();
                assert!(r <= exact + 1e-9);
                assert!(r >= prev - 1e-9);
                prev = r;
            }
            let whole = rank_windowed(&g, g.diameter()).unwrap();
            assert!((whole - exact).abs() < 1e-8);
        }
    }

    #[test]
    fn positive_temperature_p2() {
        for z in [0.5, 1.0, 2.0] {
            let bip = Bipartition::from_s_mask(vec![true, false]);
            let p = positive_temp_projection(&p(2), &bip, z, &caps()).unwrap();
            let c = 1.0 / (1.0 + z * z);
            let expect = DMatrix::from_row_slice(2, 2, &[z * z * c, z * c, z * c, c]);
            assert!(close(p.matrix(), &expect, 1e-12));
            assert!(p.condition().unwrap() >= 1.0);
        }
    }

    #[test]
    fn positive_temperature_rank_and_orthogonality() {
        for t in free_tree_catalog(8) {
            let bip = bipartition_by_parity(&t.root_at(0).unwrap(), Class::S);
            for z in [0.5, 1.0, 2.0] {
                let p = positive_temp_projection(&t, &bip, z, &caps()).unwrap();
                assert_eq!(p.rank(), bip.s().len());
                assert!((p.matrix().trace() - bip.s().len() as f64).abs() < 1e-9);
                let q = positive_temp_projection(&t, &bip.swapped(), -z, &caps()).unwrap();
                assert!(close(&(p.matrix() + q.matrix()), &DMatrix::identity(t.n(), t.n()), 1e-9));
            }
        }
    }

    #[test]
    fn zero_temperature_dependent_rows_error() {
        let star = gen_star(3);
        let bip = bipartition_by_parity(&star.root_at(0).unwrap(), Class::T);
        assert!(matches!(positive_temp_projection(&star, &bip, 0.0, &caps()), Err(Error::RankDeficient(_))));
    }

    #[test]
    fn subdeterminant_examples() {
        let z = 0.7;
        let bip = Bipartition::from_s_mask(vec![true, false]);
        assert!((boltzmann_subdeterminant(&p(2), &bip, z, &[1]).unwrap() - 1.0).abs() < 1e-12);
        assert!((boltzmann_subdeterminant(&p(2), &bip, z, &[0]).unwrap() - z * z).abs() < 1e-12);
        let bip3 = Bipartition::from_s_mask(vec![true, false, true]);
        assert!((boltzmann_subdeterminant(&p(3), &bip3, z, &[0, 2]).unwrap() - z.powi(4)).abs() < 1e-12);
        assert!(boltzmann_subdeterminant(&p(3), &bip3, z, &[0]).is_err());
        assert!(subdeterminant_closed_form(&p(3), &bip3, z, &[1]).is_err());
    }

    #[test]
    fn subdeterminants_match_closed_form() {
        for t in free_tree_catalog(8) {
            let bip = bipartition_by_parity(&t.root_at(0).unwrap(), Class::S);
            let k = bip.s().len();
            for z in [0.5, 1.0, 2.0] {
                for x in crate::determinantal::subsets_of_size(t.n(), k) {
                    let direct = boltzmann_subdeterminant(&t, &bip, z, &x).unwrap();
                    let closed = subdeterminant_closed_form(&t, &bip, z, &x).unwrap();
                    if closed == 0.0 {
                        assert!(direct.abs() < 1e-10);
                    } else {
                        assert!((direct - closed).abs() <= 1e-10 * closed);
                    }
                }
            }
        }
    }
}
