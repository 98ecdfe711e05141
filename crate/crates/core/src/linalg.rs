//! Exact rational linear algebra: row reduction, kernels, subspace lattice
//! operations, and the constructive finite-dimensional functional extension.
//!
//! Everything here is exact. Subspaces are canonicalized to reduced row
//! echelon form, so structural equality of `Subspace` values is equality of
//! subspaces.

use num_traits::{One, Zero};
use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LinAlgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("functional does not vanish on the intersection of the two subspaces")]
    FunctionalNotVanishing,
    #[error("expected {expected} functional values, got {got}")]
    FunctionalLength { expected: usize, got: usize },
}

/// Dense matrix over the rationals, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RatMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        RatMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    /// Builds from integer literals; handy in tests and constructions.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&n| crate::rational::rat(n)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> RatMatrix {
        let mut t = RatMatrix::zero(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)].clone();
            }
        }
        t
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(self.cols, v.len(), "mul_vec dimension mismatch");
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Reduced row echelon form. The result is the unique RREF of the row
    /// space; zero rows sink to the bottom.
    pub fn rref(&self) -> RatMatrix {
        let mut m = self.clone();
        m.rref_in_place();
        m
    }

    fn rref_in_place(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut pr = 0;
        for col in 0..self.cols {
            if pr >= self.rows {
                break;
            }
            let Some(nz) = (pr..self.rows).find(|&r| !self[(r, col)].is_zero()) else {
                continue;
            };
            self.swap_rows(pr, nz);
            let inv = self[(pr, col)].clone().recip();
            for c in col..self.cols {
                let v = &self[(pr, c)] * &inv;
                self[(pr, c)] = v;
            }
            for r in 0..self.rows {
                if r != pr && !self[(r, col)].is_zero() {
                    let f = self[(r, col)].clone();
                    for c in col..self.cols {
                        let v = &self[(r, c)] - &(&f * &self[(pr, c)]);
                        self[(r, c)] = v;
                    }
                }
            }
            pivots.push(col);
            pr += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref_in_place().len()
    }

    /// Basis of `{x : self · x = 0}`, one vector per free column.
    pub fn kernel_basis(&self) -> Vec<Vec<Rational>> {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        let pivot_row: std::collections::HashMap<usize, usize> =
            pivots.iter().enumerate().map(|(r, &c)| (c, r)).collect();
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|c| !pivot_row.contains_key(c)) {
            let mut v = vec![Rational::zero(); self.cols];
            v[free] = Rational::one();
            for (&pc, &pr) in &pivot_row {
                v[pc] = -m[(pr, free)].clone();
            }
            basis.push(v);
        }
        basis
    }
}

impl std::ops::Index<(usize, usize)> for RatMatrix {
    type Output = Rational;
    fn index(&self, (r, c): (usize, usize)) -> &Rational {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Rational {
        &mut self.data[r * self.cols + c]
    }
}

/// Reduced row echelon form of a matrix (free function mirror of
/// [`RatMatrix::rref`]).
pub fn rref(mat: &RatMatrix) -> RatMatrix {
    mat.rref()
}

/// Kernel of a matrix as a canonical subspace of the column coordinate space.
pub fn kernel(mat: &RatMatrix) -> Subspace {
    Subspace::from_vectors(mat.cols(), mat.kernel_basis())
}

/// Linear subspace of `ℚ^n`, stored by its canonical RREF basis. Two values
/// compare equal iff they are the same subspace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<Vec<Rational>>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: Vec::new() }
    }

    pub fn full(ambient: usize) -> Self {
        Self::from_vectors(ambient, RatMatrix::identity(ambient).row_vecs())
    }

    /// Span of the given vectors; dependent and zero vectors are absorbed.
    pub fn from_vectors(ambient: usize, vectors: Vec<Vec<Rational>>) -> Self {
        assert!(vectors.iter().all(|v| v.len() == ambient), "vector length mismatch");
        if vectors.is_empty() {
            return Self::zero(ambient);
        }
        let reduced = RatMatrix::from_rows(vectors).rref();
        let basis = reduced
            .row_vecs()
            .into_iter()
            .filter(|row| row.iter().any(|x| !x.is_zero()))
            .collect();
        Subspace { ambient, basis }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    /// Canonical basis vectors (rows of the RREF).
    pub fn basis(&self) -> &[Vec<Rational>] {
        &self.basis
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        assert_eq!(v.len(), self.ambient, "ambient dimension mismatch");
        // Reduce v against the RREF basis; membership iff the residual is 0.
        let mut res = v.to_vec();
        for row in &self.basis {
            let lead = row.iter().position(|x| !x.is_zero()).expect("nonzero basis row");
            if !res[lead].is_zero() {
                let f = res[lead].clone();
                for (ri, bi) in res.iter_mut().zip(row) {
                    *ri = &*ri - &(&f * bi);
                }
            }
        }
        res.iter().all(Zero::is_zero)
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.basis.iter().all(|v| self.contains(v))
    }

    /// Sum of subspaces.
    pub fn sum(&self, other: &Subspace) -> Result<Subspace, LinAlgError> {
        self.check_ambient(other)?;
        let mut vs = self.basis.clone();
        vs.extend(other.basis.iter().cloned());
        Ok(Subspace::from_vectors(self.ambient, vs))
    }

    /// Intersection, computed from the kernel of the stacked coefficient
    /// matrix: `Σ xᵢ aᵢ = Σ yⱼ bⱼ` with unknowns `(x, y)`.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace, LinAlgError> {
        self.check_ambient(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Subspace::zero(self.ambient));
        }
        let p = self.dim();
        let q = other.dim();
        let mut m = RatMatrix::zero(self.ambient, p + q);
        for (i, v) in self.basis.iter().enumerate() {
            for (r, x) in v.iter().enumerate() {
                m[(r, i)] = x.clone();
            }
        }
        for (j, v) in other.basis.iter().enumerate() {
            for (r, x) in v.iter().enumerate() {
                m[(r, p + j)] = -x.clone();
            }
        }
        let vectors = m
            .kernel_basis()
            .into_iter()
            .map(|coeffs| {
                let mut v = vec![Rational::zero(); self.ambient];
                for (i, basis_vec) in self.basis.iter().enumerate() {
                    for (vi, bi) in v.iter_mut().zip(basis_vec) {
                        *vi = &*vi + &(&coeffs[i] * bi);
                    }
                }
                v
            })
            .collect();
        Ok(Subspace::from_vectors(self.ambient, vectors))
    }

    /// Coordinates of `v` in the canonical basis, if `v` lies in the subspace.
    pub fn coordinates(&self, v: &[Rational]) -> Option<Vec<Rational>> {
        assert_eq!(v.len(), self.ambient, "ambient dimension mismatch");
        let mut res = v.to_vec();
        let mut coords = Vec::with_capacity(self.basis.len());
        for row in &self.basis {
            let lead = row.iter().position(|x| !x.is_zero()).expect("nonzero basis row");
            let f = res[lead].clone();
            if !f.is_zero() {
                for (ri, bi) in res.iter_mut().zip(row) {
                    *ri = &*ri - &(&f * bi);
                }
            }
            coords.push(f);
        }
        if res.iter().all(Zero::is_zero) {
            Some(coords)
        } else {
            None
        }
    }

    fn check_ambient(&self, other: &Subspace) -> Result<(), LinAlgError> {
        if self.ambient != other.ambient {
            return Err(LinAlgError::DimensionMismatch(format!(
                "ambient {} vs {}",
                self.ambient, other.ambient
            )));
        }
        Ok(())
    }
}

/// Intersection of two subspaces (free function mirror).
pub fn intersect(a: &Subspace, b: &Subspace) -> Result<Subspace, LinAlgError> {
    a.intersect(b)
}

/// Prepared exact solver for `A x = b` with a fixed `A`, for repeated solves.
#[derive(Debug, Clone)]
pub struct Solver {
    /// RREF of the augmented system `[A | I]`: `reduced = ops · A`.
    reduced: RatMatrix,
    ops: RatMatrix,
    pivots: Vec<usize>,
    cols: usize,
}

impl Solver {
    pub fn new(a: &RatMatrix) -> Self {
        let rows = a.rows();
        let cols = a.cols();
        let mut aug = RatMatrix::zero(rows, cols + rows);
        for r in 0..rows {
            for c in 0..cols {
                aug[(r, c)] = a[(r, c)].clone();
            }
            aug[(r, cols + r)] = Rational::one();
        }
        // Eliminate on the A-block only; the identity block records the ops.
        let mut pivots = Vec::new();
        let mut pr = 0;
        for col in 0..cols {
            if pr >= rows {
                break;
            }
            let Some(nz) = (pr..rows).find(|&r| !aug[(r, col)].is_zero()) else {
                continue;
            };
            aug.swap_rows(pr, nz);
            let inv = aug[(pr, col)].clone().recip();
            for c in col..cols + rows {
                let v = &aug[(pr, c)] * &inv;
                aug[(pr, c)] = v;
            }
            for r in 0..rows {
                if r != pr && !aug[(r, col)].is_zero() {
                    let f = aug[(r, col)].clone();
                    for c in col..cols + rows {
                        let v = &aug[(r, c)] - &(&f * &aug[(pr, c)]);
                        aug[(r, c)] = v;
                    }
                }
            }
            pivots.push(col);
            pr += 1;
        }
        let mut reduced = RatMatrix::zero(rows, cols);
        let mut ops = RatMatrix::zero(rows, rows);
        for r in 0..rows {
            for c in 0..cols {
                reduced[(r, c)] = aug[(r, c)].clone();
            }
            for c in 0..rows {
                ops[(r, c)] = aug[(r, cols + c)].clone();
            }
        }
        Solver { reduced, ops, pivots, cols }
    }

    /// One exact solution of `A x = b`, or `None` if inconsistent. Free
    /// variables are set to zero, so the solution is deterministic.
    pub fn solve(&self, b: &[Rational]) -> Option<Vec<Rational>> {
        let u = self.ops.mul_vec(b);
        let rank = self.pivots.len();
        if u[rank..].iter().any(|x| !x.is_zero()) {
            return None;
        }
        let mut x = vec![Rational::zero(); self.cols];
        for (r, &pc) in self.pivots.iter().enumerate() {
            // Reduced rows are unit at their pivot and zero at other pivots,
            // so with zero free variables the pivot value is u[r] directly...
            // unless free columns carry coefficients, which contribute 0.
            let _ = r;
            x[pc] = u[r].clone();
        }
        // Consistency of the construction: verify residual on debug builds.
        debug_assert!({
            let ax = self.reduced.mul_vec(&x);
            ax.iter().zip(&u).take(rank).all(|(l, r)| l == r)
        });
        Some(x)
    }
}

/// Constructs a functional `Ψ` on `ℚ^ambient` with `Ψ|_E = ψ` and `Ψ|_F = 0`,
/// where `ψ` is given by its values on the canonical basis of `e_space`.
///
/// `ψ` must vanish on `E ∩ F`; this is checked and reported. The values on a
/// complement of `E + F` are set to zero (unit vectors at the non-pivot
/// coordinates of `E + F` are used as the complement), which makes the result
/// unique and deterministic.
pub fn extend_functional(
    ambient_dim: usize,
    e_space: &Subspace,
    f_space: &Subspace,
    psi_on_e_basis: &[Rational],
) -> Result<Vec<Rational>, LinAlgError> {
    if e_space.ambient_dim() != ambient_dim || f_space.ambient_dim() != ambient_dim {
        return Err(LinAlgError::DimensionMismatch(format!(
            "ambient {} vs subspaces in ℚ^{} and ℚ^{}",
            ambient_dim,
            e_space.ambient_dim(),
            f_space.ambient_dim()
        )));
    }
    if psi_on_e_basis.len() != e_space.dim() {
        return Err(LinAlgError::FunctionalLength {
            expected: e_space.dim(),
            got: psi_on_e_basis.len(),
        });
    }

    // Precondition: ψ vanishes on E ∩ F.
    let meet = e_space.intersect(f_space)?;
    for x in meet.basis() {
        let coords = e_space.coordinates(x).expect("intersection lies in E");
        let val: Rational = coords.iter().zip(psi_on_e_basis).map(|(c, p)| c * p).sum();
        if !val.is_zero() {
            return Err(LinAlgError::FunctionalNotVanishing);
        }
    }

    // Interpolation system: rows constrain Ψ on E, on F, and on the chosen
    // complement of E + F.
    let join = e_space.sum(f_space)?;
    let pivot_cols: std::collections::HashSet<usize> = join
        .basis()
        .iter()
        .map(|row| row.iter().position(|x| !x.is_zero()).expect("nonzero basis row"))
        .collect();
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for (v, val) in e_space.basis().iter().zip(psi_on_e_basis) {
        rows.push(v.clone());
        rhs.push(val.clone());
    }
    for v in f_space.basis() {
        rows.push(v.clone());
        rhs.push(Rational::zero());
    }
    for c in (0..ambient_dim).filter(|c| !pivot_cols.contains(c)) {
        let mut unit = vec![Rational::zero(); ambient_dim];
        unit[c] = Rational::one();
        rows.push(unit);
        rhs.push(Rational::zero());
    }
    let solver = Solver::new(&RatMatrix::from_rows(rows));
    let psi = solver
        .solve(&rhs)
        .expect("system is consistent once ψ vanishes on E ∩ F");
    Ok(psi)
}
