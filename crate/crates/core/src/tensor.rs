//! The mean-zero tensor space `V ⊗ ℝ^ℓ`, the spike vectors `D_j`, spaces of
//! admissible differences, and linear maps on them.
//!
//! `V` is the hyperplane of `ℝ^m` with zero coordinate sum. An element of
//! `V ⊗ ℝ^ℓ` is stored as an `m × ℓ` rational matrix whose columns all sum to
//! zero; row `j` is the `ℝ^ℓ` value attached to digit `j`.

use num_traits::Zero;
use thiserror::Error;

use crate::linalg::{RatMatrix, Solver, Subspace};
use crate::rational::{rat, Rational};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TensorError {
    #[error("branching factor must be at least 2, got {0}")]
    BranchingTooSmall(usize),
    #[error("target dimension must be at least 1, got {0}")]
    TargetDimTooSmall(usize),
    #[error("digit {digit} out of range 1..={m}")]
    DigitOutOfRange { digit: usize, m: usize },
    #[error("column {col} of tensor {index} sums to a nonzero value")]
    ColumnSumNonzero { index: usize, col: usize },
    #[error("vector does not have zero coordinate sum")]
    NotMeanZero,
    #[error("basis tensor {index} is dependent on the previous ones")]
    DependentBasis { index: usize },
    #[error("tensor has shape {got_rows}×{got_cols}, expected {rows}×{cols}")]
    ShapeMismatch { rows: usize, cols: usize, got_rows: usize, got_cols: usize },
    #[error("tensor does not lie in the admissible difference space")]
    NotInSpace,
    #[error("map image {index} has {got} coordinates, expected {expected}")]
    ImageLength { index: usize, expected: usize, got: usize },
    #[error("expected {expected} images, one per basis tensor, got {got}")]
    ImageCount { expected: usize, got: usize },
}

/// Branching factor `m` and target dimension `ℓ` of the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelParams {
    m: usize,
    ell: usize,
}

impl ModelParams {
    pub fn new(m: usize, ell: usize) -> Result<Self, TensorError> {
        if m < 2 {
            return Err(TensorError::BranchingTooSmall(m));
        }
        if ell < 1 {
            return Err(TensorError::TargetDimTooSmall(ell));
        }
        Ok(ModelParams { m, ell })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    /// Dimension of the ambient coordinate space `ℝ^{m·ℓ}` used for exact
    /// subspace computations.
    pub fn ambient_dim(&self) -> usize {
        self.m * self.ell
    }

    pub fn digits(&self) -> impl Iterator<Item = usize> {
        1..=self.m
    }

    pub fn check_digit(&self, j: usize) -> Result<(), TensorError> {
        if j < 1 || j > self.m {
            return Err(TensorError::DigitOutOfRange { digit: j, m: self.m });
        }
        Ok(())
    }
}

/// Element of `V ⊗ ℝ^ℓ`: an `m × ℓ` rational matrix with zero column sums.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffTensor {
    params: ModelParams,
    entries: RatMatrix,
}

impl DiffTensor {
    pub fn new(params: ModelParams, entries: RatMatrix) -> Result<Self, TensorError> {
        Self::checked(params, entries, 0)
    }

    fn checked(params: ModelParams, entries: RatMatrix, index: usize) -> Result<Self, TensorError> {
        if entries.rows() != params.m || entries.cols() != params.ell {
            return Err(TensorError::ShapeMismatch {
                rows: params.m,
                cols: params.ell,
                got_rows: entries.rows(),
                got_cols: entries.cols(),
            });
        }
        for col in 0..params.ell {
            let sum: Rational = (0..params.m).map(|r| entries[(r, col)].clone()).sum();
            if !sum.is_zero() {
                return Err(TensorError::ColumnSumNonzero { index, col });
            }
        }
        Ok(DiffTensor { params, entries })
    }

    pub fn zero(params: ModelParams) -> Self {
        DiffTensor { params, entries: RatMatrix::zero(params.m, params.ell) }
    }

    pub fn params(&self) -> ModelParams {
        self.params
    }

    pub fn entries(&self) -> &RatMatrix {
        &self.entries
    }

    /// The `ℝ^ℓ` value attached to digit `j` (1-based).
    pub fn row(&self, j: usize) -> &[Rational] {
        self.entries.row(j - 1)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_zero()
    }

    /// Row-major flattening into `ℝ^{m·ℓ}`; index `(j-1)·ℓ + (k-1)`.
    pub fn to_vec(&self) -> Vec<Rational> {
        (0..self.params.m).flat_map(|r| self.entries.row(r).to_vec()).collect()
    }

    pub fn from_vec(params: ModelParams, v: &[Rational]) -> Result<Self, TensorError> {
        assert_eq!(v.len(), params.ambient_dim(), "flattened length mismatch");
        let rows = v.chunks(params.ell).map(<[Rational]>::to_vec).collect();
        Self::new(params, RatMatrix::from_rows(rows))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let rows = (0..self.params.m)
            .map(|r| self.entries.row(r).iter().map(|x| x * c).collect())
            .collect();
        DiffTensor { params: self.params, entries: RatMatrix::from_rows(rows) }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.params, other.params);
        let rows = (0..self.params.m)
            .map(|r| {
                self.entries
                    .row(r)
                    .iter()
                    .zip(other.entries.row(r))
                    .map(|(a, b)| a + b)
                    .collect()
            })
            .collect();
        DiffTensor { params: self.params, entries: RatMatrix::from_rows(rows) }
    }
}

/// The spike vector with `m − 1` at position `j` (1-based) and `−1` elsewhere.
/// These are, up to scaling, exactly the elements of `V` with `m − 1` equal
/// coordinates.
pub fn spike_vector(j: usize, params: ModelParams) -> Result<Vec<Rational>, TensorError> {
    params.check_digit(j)?;
    Ok((1..=params.m)
        .map(|i| if i == j { rat(params.m as i64 - 1) } else { rat(-1) })
        .collect())
}

/// Elementary tensor `v ⊗ a` with `v ∈ V`: entry `(j, k)` is `v_j · a_k`.
pub fn rank_one(
    params: ModelParams,
    v: &[Rational],
    a: &[Rational],
) -> Result<DiffTensor, TensorError> {
    assert_eq!(v.len(), params.m, "v must have m coordinates");
    assert_eq!(a.len(), params.ell, "a must have ℓ coordinates");
    if !v.iter().sum::<Rational>().is_zero() {
        return Err(TensorError::NotMeanZero);
    }
    let rows = v.iter().map(|vj| a.iter().map(|ak| vj * ak).collect()).collect();
    Ok(DiffTensor { params, entries: RatMatrix::from_rows(rows) })
}

/// Spike tensor `D_j ⊗ a`.
pub fn spike_tensor(
    params: ModelParams,
    j: usize,
    a: &[Rational],
) -> Result<DiffTensor, TensorError> {
    rank_one(params, &spike_vector(j, params)?, a)
}

/// The subspace `{D_j ⊗ a : a ∈ ℝ^ℓ}` of the ambient coordinate space.
pub fn spike_tensor_space(params: ModelParams, j: usize) -> Result<Subspace, TensorError> {
    let mut vs = Vec::with_capacity(params.ell);
    for k in 0..params.ell {
        let mut a = vec![Rational::zero(); params.ell];
        a[k] = rat(1);
        vs.push(spike_tensor(params, j, &a)?.to_vec());
    }
    Ok(Subspace::from_vectors(params.ambient_dim(), vs))
}

/// Subspace `W ⊆ V ⊗ ℝ^ℓ` of admissible martingale differences, given by a
/// basis of tensors.
#[derive(Debug, Clone)]
pub struct DiffSpace {
    params: ModelParams,
    basis: Vec<DiffTensor>,
    subspace: Subspace,
    solver: Solver,
}

impl DiffSpace {
    /// Validates the column-sum invariant of every tensor and independence of
    /// the family.
    pub fn new(params: ModelParams, basis: Vec<DiffTensor>) -> Result<Self, TensorError> {
        for (index, t) in basis.iter().enumerate() {
            DiffTensor::checked(params, t.entries.clone(), index)?;
        }
        let vectors: Vec<Vec<Rational>> = basis.iter().map(DiffTensor::to_vec).collect();
        let subspace = Subspace::from_vectors(params.ambient_dim(), vectors.clone());
        if subspace.dim() != basis.len() {
            // Find the first dependent tensor for the report.
            for index in 1..=basis.len() {
                let partial =
                    Subspace::from_vectors(params.ambient_dim(), vectors[..index].to_vec());
                if partial.dim() != index {
                    return Err(TensorError::DependentBasis { index: index - 1 });
                }
            }
            return Err(TensorError::DependentBasis { index: 0 });
        }
        // Prepared solver for coefficient extraction: columns are the basis
        // tensors, flattened.
        let mut mat = RatMatrix::zero(params.ambient_dim(), basis.len());
        for (i, v) in vectors.iter().enumerate() {
            for (r, x) in v.iter().enumerate() {
                mat[(r, i)] = x.clone();
            }
        }
        Ok(DiffSpace { params, basis, subspace, solver: Solver::new(&mat) })
    }

    pub fn zero(params: ModelParams) -> Self {
        Self::new(params, Vec::new()).expect("empty basis is valid")
    }

    /// The full space `V ⊗ ℝ^ℓ`, spanned by `(e_j − e_m) ⊗ e_k`.
    pub fn full(params: ModelParams) -> Self {
        let mut basis = Vec::new();
        for j in 1..params.m {
            for k in 0..params.ell {
                let mut v = vec![Rational::zero(); params.m];
                v[j - 1] = rat(1);
                v[params.m - 1] = rat(-1);
                let mut a = vec![Rational::zero(); params.ell];
                a[k] = rat(1);
                basis.push(rank_one(params, &v, &a).expect("mean zero"));
            }
        }
        Self::new(params, basis).expect("independent family")
    }

    pub fn params(&self) -> ModelParams {
        self.params
    }

    pub fn basis(&self) -> &[DiffTensor] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn subspace(&self) -> &Subspace {
        &self.subspace
    }

    pub fn contains(&self, t: &DiffTensor) -> bool {
        self.subspace.contains(&t.to_vec())
    }

    /// Coefficients of `t` in the stored basis, if `t` lies in the space.
    pub fn coefficients(&self, t: &DiffTensor) -> Option<Vec<Rational>> {
        self.solver.solve(&t.to_vec())
    }

    /// Directions `a ∈ ℝ^ℓ` whose spike tensor `D_j ⊗ a` lies in this space,
    /// computed exactly from the joint membership system in `(a, coefficients)`.
    pub fn spike_directions(&self, j: usize) -> Result<Subspace, TensorError> {
        self.params.check_digit(j)?;
        let ell = self.params.ell;
        let amb = self.params.ambient_dim();
        let r = self.basis.len();
        // Columns: ℓ unknowns for a (tensor D_j ⊗ e_k), then r coefficients.
        let mut m = RatMatrix::zero(amb, ell + r);
        for k in 0..ell {
            let mut a = vec![Rational::zero(); ell];
            a[k] = rat(1);
            let col = spike_tensor(self.params, j, &a)?.to_vec();
            for (row, x) in col.into_iter().enumerate() {
                m[(row, k)] = x;
            }
        }
        for (i, b) in self.basis.iter().enumerate() {
            for (row, x) in b.to_vec().into_iter().enumerate() {
                m[(row, ell + i)] = -x;
            }
        }
        let projected: Vec<Vec<Rational>> =
            m.kernel_basis().into_iter().map(|v| v[..ell].to_vec()).collect();
        Ok(Subspace::from_vectors(ell, projected))
    }
}

/// Linear map `φ: W → V`, stored by its images on the basis tensors of `W`.
#[derive(Debug, Clone)]
pub struct PhiMap {
    domain: DiffSpace,
    images: Vec<Vec<Rational>>,
}

impl PhiMap {
    /// Every image must be a vector of `V` (zero coordinate sum).
    pub fn new(domain: DiffSpace, images: Vec<Vec<Rational>>) -> Result<Self, TensorError> {
        if images.len() != domain.dim() {
            return Err(TensorError::ImageCount { expected: domain.dim(), got: images.len() });
        }
        let m = domain.params().m;
        for (index, img) in images.iter().enumerate() {
            if img.len() != m {
                return Err(TensorError::ImageLength { index, expected: m, got: img.len() });
            }
            if !img.iter().sum::<Rational>().is_zero() {
                return Err(TensorError::NotMeanZero);
            }
        }
        Ok(PhiMap { domain, images })
    }

    pub fn domain(&self) -> &DiffSpace {
        &self.domain
    }

    pub fn images(&self) -> &[Vec<Rational>] {
        &self.images
    }

    pub fn params(&self) -> ModelParams {
        self.domain.params()
    }

    /// Applies `φ` to a tensor of `W`; errors if the tensor is outside `W`.
    pub fn apply(&self, t: &DiffTensor) -> Result<Vec<Rational>, TensorError> {
        let coeffs = self.domain.coefficients(t).ok_or(TensorError::NotInSpace)?;
        let m = self.params().m;
        let mut out = vec![Rational::zero(); m];
        for (c, img) in coeffs.iter().zip(&self.images) {
            if c.is_zero() {
                continue;
            }
            for (o, x) in out.iter_mut().zip(img) {
                *o = &*o + &(c * x);
            }
        }
        Ok(out)
    }
}

/// Applies `φ` to a tensor (free function mirror of [`PhiMap::apply`]).
pub fn apply_phi(phi: &PhiMap, t: &DiffTensor) -> Result<Vec<Rational>, TensorError> {
    phi.apply(t)
}

/// Linear map `V ⊗ ℝ^ℓ → ℝ^m` given by `m` functionals, each stored as an
/// `m × ℓ` coefficient matrix paired against tensor entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendedMap {
    params: ModelParams,
    functionals: Vec<RatMatrix>,
}

impl ExtendedMap {
    pub fn from_functionals(
        params: ModelParams,
        functionals: Vec<RatMatrix>,
    ) -> Result<Self, TensorError> {
        if functionals.len() != params.m {
            return Err(TensorError::ImageCount { expected: params.m, got: functionals.len() });
        }
        for f in &functionals {
            if f.rows() != params.m || f.cols() != params.ell {
                return Err(TensorError::ShapeMismatch {
                    rows: params.m,
                    cols: params.ell,
                    got_rows: f.rows(),
                    got_cols: f.cols(),
                });
            }
        }
        Ok(ExtendedMap { params, functionals })
    }

    pub fn zero(params: ModelParams) -> Self {
        ExtendedMap {
            params,
            functionals: vec![RatMatrix::zero(params.m, params.ell); params.m],
        }
    }

    pub fn params(&self) -> ModelParams {
        self.params
    }

    pub fn functionals(&self) -> &[RatMatrix] {
        &self.functionals
    }

    /// Value of the `j`-th coordinate functional (1-based) on a tensor.
    pub fn coordinate(&self, j: usize, t: &DiffTensor) -> Rational {
        let f = &self.functionals[j - 1];
        let mut acc = Rational::zero();
        for r in 0..self.params.m {
            for (fx, tx) in f.row(r).iter().zip(t.entries().row(r)) {
                if !fx.is_zero() && !tx.is_zero() {
                    acc += fx * tx;
                }
            }
        }
        acc
    }

    /// Applies the map; unlike [`PhiMap::apply`] this is total on `V ⊗ ℝ^ℓ`.
    pub fn apply(&self, t: &DiffTensor) -> Vec<Rational> {
        (1..=self.params.m).map(|j| self.coordinate(j, t)).collect()
    }

    /// Coefficient vector of the functional `a ↦ (Φ(D_j ⊗ a))_i` on `ℝ^ℓ`.
    pub fn spike_response(&self, j: usize, i: usize) -> Vec<Rational> {
        let spike = spike_vector(j, self.params).expect("digit validated by caller");
        let f = &self.functionals[i - 1];
        (0..self.params.ell)
            .map(|k| (0..self.params.m).map(|r| &spike[r] * &f[(r, k)]).sum())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn params(m: usize, ell: usize) -> ModelParams {
        ModelParams::new(m, ell).unwrap()
    }

    #[test]
    fn params_validation() {
        assert_eq!(ModelParams::new(1, 1), Err(TensorError::BranchingTooSmall(1)));
        assert_eq!(ModelParams::new(3, 0), Err(TensorError::TargetDimTooSmall(0)));
        assert!(ModelParams::new(2, 1).is_ok());
    }

    #[test]
    fn spike_vector_matches_definition() {
        assert_eq!(
            spike_vector(1, params(3, 1)).unwrap(),
            vec![rat(2), rat(-1), rat(-1)]
        );
        assert_eq!(spike_vector(2, params(2, 1)).unwrap(), vec![rat(-1), rat(1)]);
        assert!(matches!(
            spike_vector(4, params(3, 1)),
            Err(TensorError::DigitOutOfRange { digit: 4, m: 3 })
        ));
    }

    #[test]
    fn spike_vectors_have_zero_sum_and_sum_to_zero() {
        for m in 2..=6 {
            let p = params(m, 1);
            let mut total = vec![Rational::zero(); m];
            for j in 1..=m {
                let d = spike_vector(j, p).unwrap();
                assert!(d.iter().sum::<Rational>().is_zero());
                for (t, x) in total.iter_mut().zip(&d) {
                    *t = &*t + x;
                }
            }
            assert!(total.iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn rank_one_zero_factors_give_zero_tensor() {
        let p = params(3, 2);
        let z = vec![Rational::zero(); 3];
        let a = vec![rat(1), rat(2)];
        assert!(rank_one(p, &z, &a).unwrap().is_zero());
        let v = spike_vector(1, p).unwrap();
        assert!(rank_one(p, &v, &[rat(0), rat(0)]).unwrap().is_zero());
    }

    #[test]
    fn spike_tensor_column_is_spike_vector() {
        let p = params(3, 1);
        let t = spike_tensor(p, 1, &[rat(1)]).unwrap();
        assert_eq!(t.to_vec(), vec![rat(2), rat(-1), rat(-1)]);
    }

    #[test]
    fn rank_one_rejects_non_mean_zero() {
        let p = params(3, 1);
        assert_eq!(
            rank_one(p, &[rat(1), rat(1), rat(1)], &[rat(1)]),
            Err(TensorError::NotMeanZero)
        );
    }

    proptest! {
        /// All 2×2 minors of a rank-one tensor vanish.
        #[test]
        fn rank_one_minors_vanish(
            vs in proptest::collection::vec(-4i64..=4, 3),
            a in proptest::collection::vec(-4i64..=4, 3),
        ) {
            let p = params(4, 3);
            let mut v: Vec<Rational> = vs.iter().map(|&n| rat(n)).collect();
            let s: Rational = v.iter().sum();
            v.push(-s);
            let a: Vec<Rational> = a.iter().map(|&n| rat(n)).collect();
            let t = rank_one(p, &v, &a).unwrap();
            let e = t.entries();
            for r1 in 0..4 {
                for r2 in r1 + 1..4 {
                    for c1 in 0..3 {
                        for c2 in c1 + 1..3 {
                            let minor = &(&e[(r1, c1)] * &e[(r2, c2)])
                                - &(&e[(r1, c2)] * &e[(r2, c1)]);
                            prop_assert!(minor.is_zero());
                        }
                    }
                }
            }
        }

        /// Scalar multiples of D_j are exactly the V-vectors with m−1 equal
        /// coordinates; test the detector agreement both ways.
        #[test]
        fn spike_multiples_have_m_minus_1_equal_coords(
            m in 2usize..=5,
            j_raw in 1usize..=5,
            c_num in -6i64..=6,
            mix in proptest::collection::vec(-3i64..=3, 5),
        ) {
            let j = (j_raw - 1) % m + 1;
            let p = params(m, 1);
            let d = spike_vector(j, p).unwrap();
            let c = ratio(c_num, 2);
            let v: Vec<Rational> = d.iter().map(|x| x * &c).collect();
            // Detector: some m−1 coordinates are pairwise equal.
            let detector = |v: &[Rational]| -> bool {
                (0..m).any(|skip| {
                    let rest: Vec<&Rational> =
                        (0..m).filter(|&i| i != skip).map(|i| &v[i]).collect();
                    rest.windows(2).all(|w| w[0] == w[1])
                })
            };
            prop_assert!(detector(&v));

            // A random mean-zero vector is a spike multiple iff detected.
            let mut w: Vec<Rational> = mix[..m - 1].iter().map(|&n| rat(n)).collect();
            let s: Rational = w.iter().sum();
            w.push(-s);
            let proportional = (1..=m).any(|jj| {
                let d = spike_vector(jj, p).unwrap();
                // w ∥ d iff w = (w·d/|d|²) d.
                let num: Rational = w.iter().zip(&d).map(|(a, b)| a * b).sum();
                let den: Rational = d.iter().map(|x| x * x).sum();
                let t = num / den;
                w.iter().zip(&d).all(|(a, b)| a == &(&t * b))
            });
            prop_assert_eq!(detector(&w), proportional);
        }
    }

    #[test]
    fn spike_directions_of_single_spike_space() {
        let p = params(3, 2);
        let t = spike_tensor(p, 1, &[rat(1), rat(0)]).unwrap();
        let w = DiffSpace::new(p, vec![t]).unwrap();
        let a1 = w.spike_directions(1).unwrap();
        assert_eq!(a1.dim(), 1);
        assert!(a1.contains(&[rat(1), rat(0)]));
        // D_2 ⊗ a ∈ span{D_1 ⊗ e_1} forces a = 0.
        assert!(w.spike_directions(2).unwrap().is_zero());
    }

    #[test]
    fn spike_directions_of_full_space_is_everything() {
        let p = params(3, 2);
        let w = DiffSpace::full(p);
        assert_eq!(w.dim(), 4);
        for j in 1..=3 {
            assert_eq!(w.spike_directions(j).unwrap().dim(), 2);
        }
    }

    #[test]
    fn spike_directions_membership_is_tight() {
        // Basis of the result maps into W; a complement direction does not.
        let p = params(3, 2);
        let t = spike_tensor(p, 2, &[rat(1), rat(1)]).unwrap();
        let w = DiffSpace::new(p, vec![t]).unwrap();
        let a2 = w.spike_directions(2).unwrap();
        for a in a2.basis() {
            assert!(w.contains(&spike_tensor(p, 2, a).unwrap()));
        }
        // (1, -1) is independent of (1, 1); its spike tensor must be outside.
        let out = spike_tensor(p, 2, &[rat(1), rat(-1)]).unwrap();
        assert!(!w.contains(&out));
    }

    #[test]
    fn dependent_basis_is_rejected() {
        let p = params(3, 1);
        let t = spike_tensor(p, 1, &[rat(1)]).unwrap();
        let t2 = t.scale(&rat(2));
        assert_eq!(
            DiffSpace::new(p, vec![t, t2]).err(),
            Some(TensorError::DependentBasis { index: 1 })
        );
    }

    #[test]
    fn apply_phi_examples() {
        let p = params(3, 1);
        let d1 = spike_tensor(p, 1, &[rat(1)]).unwrap();
        let w = DiffSpace::new(p, vec![d1.clone()]).unwrap();
        let phi = PhiMap::new(w, vec![vec![rat(0), rat(1), rat(-1)]]).unwrap();
        assert_eq!(
            phi.apply(&DiffTensor::zero(p)).unwrap(),
            vec![rat(0), rat(0), rat(0)]
        );
        assert_eq!(
            phi.apply(&d1.scale(&rat(3))).unwrap(),
            vec![rat(0), rat(3), rat(-3)]
        );
        // Result always lands in V.
        let img = phi.apply(&d1).unwrap();
        assert!(img.iter().sum::<Rational>().is_zero());
    }

    #[test]
    fn apply_phi_rejects_tensor_outside_domain() {
        let p = params(3, 1);
        let d1 = spike_tensor(p, 1, &[rat(1)]).unwrap();
        let w = DiffSpace::new(p, vec![d1]).unwrap();
        let phi = PhiMap::new(w, vec![vec![rat(0), rat(1), rat(-1)]]).unwrap();
        let outside = rank_one(p, &[rat(1), rat(-1), rat(0)], &[rat(1)]).unwrap();
        assert_eq!(phi.apply(&outside), Err(TensorError::NotInSpace));
    }

    #[test]
    fn apply_phi_matches_coefficient_expansion_oracle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        let p = params(4, 2);
        for _ in 0..20 {
            // Random independent basis of 3 tensors.
            let mut basis = Vec::new();
            while basis.len() < 3 {
                let mut rows: Vec<Vec<Rational>> = (0..3)
                    .map(|_| (0..2).map(|_| rat(rng.gen_range(-3..=3))).collect())
                    .collect();
                let last: Vec<Rational> =
                    (0..2).map(|k| -rows.iter().map(|r| r[k].clone()).sum::<Rational>()).collect();
                rows.push(last);
                let t = DiffTensor::new(p, RatMatrix::from_rows(rows)).unwrap();
                let mut cand = basis.clone();
                cand.push(t);
                if DiffSpace::new(p, cand.clone()).is_ok() {
                    basis = cand;
                }
            }
            let w = DiffSpace::new(p, basis.clone()).unwrap();
            let images: Vec<Vec<Rational>> = (0..3)
                .map(|_| {
                    let mut img: Vec<Rational> =
                        (0..3).map(|_| rat(rng.gen_range(-3..=3))).collect();
                    img.push(-img.iter().sum::<Rational>());
                    img
                })
                .collect();
            let phi = PhiMap::new(w, images.clone()).unwrap();
            // Random element of W with known coefficients.
            let coeffs: Vec<Rational> = (0..3).map(|_| ratio(rng.gen_range(-4..=4), 2)).collect();
            let mut t = DiffTensor::zero(p);
            for (c, b) in coeffs.iter().zip(&basis) {
                t = t.add(&b.scale(c));
            }
            let got = phi.apply(&t).unwrap();
            let mut want = vec![Rational::zero(); 4];
            for (c, img) in coeffs.iter().zip(&images) {
                for (wv, x) in want.iter_mut().zip(img) {
                    *wv = &*wv + &(c * x);
                }
            }
            assert_eq!(got, want);
        }
    }

    #[test]
    fn extended_map_coordinate_and_response() {
        let p = params(3, 2);
        // Functional j pairs against the full entry grid.
        let f1 = RatMatrix::from_i64(&[&[1, 0], &[0, 2], &[0, 0]]);
        let zero = RatMatrix::zero(3, 2);
        let ext = ExtendedMap::from_functionals(p, vec![f1, zero.clone(), zero]).unwrap();
        let t = spike_tensor(p, 1, &[rat(1), rat(1)]).unwrap();
        // Φ₁(D₁⊗(1,1)) = 1·2 + 2·(−1) = 0.
        assert_eq!(ext.coordinate(1, &t), rat(0));
        // Response of a ↦ Φ₁(D₁⊗a): k=0 gives 2, k=1 gives −2.
        assert_eq!(ext.spike_response(1, 1), vec![rat(2), rat(-2)]);
    }
}
