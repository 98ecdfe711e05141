//! Explicit constructions around the transform: the blow-up counterexample
//! when weak cancellation fails, delta-measure martingales, the
//! disjoint-support certificate for the extension, and the exact finite-depth
//! operator norm of the extended transform.

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::martingale::{
    transform_at, FiniteMartingale, MartingaleError, TransformOperator,
};
use crate::rational::{exact_sqrt, norm_sq, pow_u, to_f64, Rational};
use crate::tensor::{spike_tensor, DiffSpace, ExtendedMap, ModelParams, PhiMap, TensorError};
use crate::tree::{Atom, TreePath};

#[derive(Debug, Error, PartialEq)]
pub enum WitnessError {
    #[error("the spike tensor D_j ⊗ a does not lie in the difference space")]
    SpikeNotInSpace,
    #[error("θ = 0: the instance does not blow up; use the extension path instead")]
    ThetaZero,
    #[error("curve value at depth {depth} is {got}, expected {expected}")]
    CurveMismatch { depth: usize, expected: Rational, got: Rational },
    #[error("weight at point {index} has {got} coordinates, expected {expected}")]
    WeightLength { index: usize, expected: usize, got: usize },
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Martingale(#[from] MartingaleError),
}

/// Nonnegative value carried by its exact square, so maxima and equality are
/// decided exactly even when the value itself is irrational.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct NormValue {
    square: Rational,
}

impl NormValue {
    pub fn zero() -> Self {
        NormValue { square: Rational::zero() }
    }

    pub fn from_square(square: Rational) -> Self {
        assert!(!square.is_negative(), "square must be nonnegative");
        NormValue { square }
    }

    /// Euclidean norm of a rational vector.
    pub fn of_vector(v: &[Rational]) -> Self {
        NormValue { square: norm_sq(v) }
    }

    pub fn square(&self) -> &Rational {
        &self.square
    }

    /// Exact value when the square root is rational.
    pub fn exact(&self) -> Option<Rational> {
        exact_sqrt(&self.square)
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(&self.square).sqrt()
    }
}

/// Finitely supported vector measure on the path space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomicMeasure {
    params: ModelParams,
    support: Vec<(TreePath, Vec<Rational>)>,
}

impl AtomicMeasure {
    pub fn new(
        params: ModelParams,
        support: Vec<(TreePath, Vec<Rational>)>,
    ) -> Result<Self, WitnessError> {
        for (index, (_, weight)) in support.iter().enumerate() {
            if weight.len() != params.ell() {
                return Err(WitnessError::WeightLength {
                    index,
                    expected: params.ell(),
                    got: weight.len(),
                });
            }
        }
        Ok(AtomicMeasure { params, support })
    }

    pub fn params(&self) -> ModelParams {
        self.params
    }

    pub fn support(&self) -> &[(TreePath, Vec<Rational>)] {
        &self.support
    }

    /// Sum of the Euclidean norms of the point weights.
    pub fn total_variation(&self) -> f64 {
        self.support.iter().map(|(_, w)| NormValue::of_vector(w).to_f64()).sum()
    }

    /// Exact total variation when every point norm is rational.
    pub fn total_variation_exact(&self) -> Option<Rational> {
        let mut total = Rational::zero();
        for (_, w) in &self.support {
            total += exact_sqrt(&norm_sq(w))?;
        }
        Some(total)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.params, other.params);
        let mut support = self.support.clone();
        support.extend(other.support.iter().cloned());
        AtomicMeasure { params: self.params, support }
    }
}

/// Martingale representing the measure `a · δ_path`: the depth-`N` atom
/// containing the path carries `a · m^N`, everything else is zero. Its
/// level-`n` difference is the spike tensor of the path's next digit, scaled
/// by `m^n` and placed on the depth-`n` path atom.
pub fn delta_martingale(
    path: &TreePath,
    a: &[Rational],
    depth: usize,
    params: ModelParams,
) -> Result<FiniteMartingale, WitnessError> {
    let atom = path.atom_at_depth(depth);
    let scale = pow_u(params.m() as u64, depth as u32);
    let mut leaves = crate::martingale::AtomMap::new();
    let value: Vec<Rational> = a.iter().map(|x| x * &scale).collect();
    if !value.iter().all(Zero::is_zero) {
        leaves.insert(atom, value);
    }
    Ok(FiniteMartingale::new(params, depth, leaves)?)
}

/// The stopped counterexample of the necessity argument: the delta martingale
/// along the constant-digit path `j, j, j, …`.
pub fn blow_up_martingale(
    j: usize,
    a: &[Rational],
    depth: usize,
    params: ModelParams,
) -> Result<FiniteMartingale, WitnessError> {
    params.check_digit(j)?;
    let path = TreePath::constant(j as u8, params).expect("digit validated");
    delta_martingale(&path, a, depth, params)
}

/// Martingale of a finitely supported measure: `F_n = Σ_ω μ(ω) m^n χ_ω`,
/// realized at depth `N` by summing the delta constructions. Linear in `μ`.
pub fn measure_to_martingale(
    mu: &AtomicMeasure,
    depth: usize,
) -> Result<FiniteMartingale, WitnessError> {
    let mut total = FiniteMartingale::zero(mu.params(), depth);
    for (path, weight) in mu.support() {
        let delta = delta_martingale(path, weight, depth, mu.params())?;
        total = total.add(&delta)?;
    }
    Ok(total)
}

/// Blow-up certificate: the digit, the direction, `θ`, and the exact curve of
/// transform values at the constant-digit atom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessReport {
    pub j: usize,
    pub a: Vec<Rational>,
    pub theta: Rational,
    /// Pairs `(N, lhs)` with `lhs = N·θ`, verified exactly.
    pub curve: Vec<(usize, Rational)>,
}

/// Evaluates the transform of the stopped counterexample at the constant-`j`
/// atom for every depth up to `n_max` and certifies the exact blow-up
/// `lhs(N) = N·θ`. Requires `D_j ⊗ a ∈ W` and `θ = (φ(D_j ⊗ a))_j ≠ 0`.
pub fn blow_up_curve(
    w: &DiffSpace,
    phi: &PhiMap,
    j: usize,
    a: &[Rational],
    n_max: usize,
) -> Result<WitnessReport, WitnessError> {
    let params = w.params();
    params.check_digit(j)?;
    let tensor = spike_tensor(params, j, a)?;
    if !w.contains(&tensor) {
        return Err(WitnessError::SpikeNotInSpace);
    }
    let theta = phi.apply(&tensor)?[j - 1].clone();
    if theta.is_zero() {
        return Err(WitnessError::ThetaZero);
    }
    let mut curve = Vec::with_capacity(n_max);
    for depth in 1..=n_max {
        let f = blow_up_martingale(j, a, depth, params)?;
        let atom = Atom::new(vec![j as u8; depth], params).expect("valid digit");
        let got = transform_at(&f, TransformOperator::Phi(phi), &atom)?;
        let expected = Rational::from_integer(depth.into()) * &theta;
        if got != expected {
            return Err(WitnessError::CurveMismatch { depth, expected, got });
        }
        curve.push((depth, got));
    }
    Ok(WitnessReport { j, a: a.to_vec(), theta, curve })
}

/// Diagonal transform values along a path: entry `n` is
/// `(Φ(D_{j_{n+1}} ⊗ a))_{j_{n+1}}`, the value of the level-`n` summand of
/// the delta-martingale transform on the next path atom.
fn diagonal_values(
    ext: &ExtendedMap,
    path: &TreePath,
    a: &[Rational],
    depth: usize,
) -> Result<Vec<Rational>, WitnessError> {
    (0..depth)
        .map(|n| {
            let j = path.digit_at(n) as usize;
            let tensor = spike_tensor(ext.params(), j, a)?;
            Ok(ext.coordinate(j, &tensor))
        })
        .collect()
}

/// True iff every level-`n` summand of the delta-martingale transform
/// vanishes identically on the next atom of the path — the disjoint-support
/// property guaranteed by the extension contract. Exact.
pub fn disjoint_support_check(
    ext: &ExtendedMap,
    path: &TreePath,
    a: &[Rational],
    depth: usize,
) -> Result<bool, WitnessError> {
    Ok(diagonal_values(ext, path, a, depth)?.iter().all(Zero::is_zero))
}

/// Maximum, over all depth-`N` atoms, of the number of levels contributing a
/// nonzero summand to the transform of the delta martingale of `(path, a)`.
/// Atoms are grouped by the level and digit at which they leave the path, so
/// the whole leaf level is covered in `O(N·m)` exact checks.
pub fn max_contributing_levels(
    ext: &ExtendedMap,
    path: &TreePath,
    a: &[Rational],
    depth: usize,
) -> Result<usize, WitnessError> {
    let params = ext.params();
    let diag = diagonal_values(ext, path, a, depth)?;
    let mut prefix_nonzero = vec![0usize; depth + 1];
    for n in 0..depth {
        prefix_nonzero[n + 1] = prefix_nonzero[n] + usize::from(!diag[n].is_zero());
    }
    // On-path atom: all levels contribute through the diagonal.
    let mut worst = prefix_nonzero[depth];
    for k in 0..depth {
        let j = path.digit_at(k) as usize;
        let tensor = spike_tensor(params, j, a)?;
        for i in params.digits().filter(|&i| i != j) {
            let off = ext.coordinate(i, &tensor);
            let count = prefix_nonzero[k] + usize::from(!off.is_zero());
            worst = worst.max(count);
        }
    }
    Ok(worst)
}

/// Exact operator norm of the extended transform at finite depth:
/// `sup ‖transform(F_μ)‖_∞` over measures of total variation at most one.
///
/// The transform is linear in `μ` and the objective is convex, so the
/// supremum is attained at unit-weight delta measures. For a delta at path
/// `t`, the value at an evaluation atom is a linear functional of the weight,
/// determined by the level and digit of departure from `t`; the norm is the
/// largest Euclidean norm of these functionals. Enumeration walks the digit
/// prefixes once, carrying the running diagonal sum.
pub fn transform_norm(ext: &ExtendedMap, depth: usize) -> NormValue {
    let params = ext.params();
    let m = params.m();
    let ell = params.ell();
    // response[j-1][i-1] is the coefficient vector of a ↦ (Φ(D_j ⊗ a))_i.
    let response: Vec<Vec<Vec<Rational>>> = (1..=m)
        .map(|j| (1..=m).map(|i| ext.spike_response(j, i)).collect())
        .collect();
    let mut best = Rational::zero();
    let mut consider = |v: &[Rational]| {
        let sq = norm_sq(v);
        if sq > best {
            best = sq;
        }
    };
    // Stack of (running diagonal functional, remaining levels).
    let mut stack = vec![(vec![Rational::zero(); ell], depth)];
    while let Some((sum, remaining)) = stack.pop() {
        if remaining == 0 {
            consider(&sum);
            continue;
        }
        for j in 1..=m {
            for i in (1..=m).filter(|&i| i != j) {
                let departed: Vec<Rational> = sum
                    .iter()
                    .zip(&response[j - 1][i - 1])
                    .map(|(s, r)| s + r)
                    .collect();
                consider(&departed);
            }
            let onward: Vec<Rational> = sum
                .iter()
                .zip(&response[j - 1][j - 1])
                .map(|(s, r)| s + r)
                .collect();
            stack.push((onward, remaining - 1));
        }
    }
    NormValue::from_square(best)
}

/// Closed form for the norm of an extension satisfying the coordinate
/// contract: the largest Euclidean norm of `a ↦ (Φ(D_j ⊗ a))_i` over `j` and
/// `i ≠ j`. Equals [`transform_norm`] at every depth `N ≥ 1` in that case.
pub fn extension_norm_closed_form(ext: &ExtendedMap) -> NormValue {
    let m = ext.params().m();
    let mut best = Rational::zero();
    for j in 1..=m {
        for i in (1..=m).filter(|&i| i != j) {
            let sq = norm_sq(&ext.spike_response(j, i));
            if sq > best {
                best = sq;
            }
        }
    }
    NormValue::from_square(best)
}
