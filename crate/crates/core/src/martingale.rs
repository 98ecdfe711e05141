//! Finite-depth martingales on the m-adic tree: difference sequences,
//! admissibility of differences, L_p norms, the discrete Riesz potential, and
//! the coordinate transform built from `φ` or its extension `Φ`.
//!
//! A martingale is stored by its leaf values at depth `N`; every coarser
//! level is the conditional expectation, i.e. the average over children, so
//! the martingale property holds by construction. Leaf maps are sparse:
//! missing atoms carry the zero vector.

use std::collections::BTreeMap;

use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::linalg::RatMatrix;
use crate::rational::{exact_sqrt, norm_sq, pow_neg, rat, to_f64, Rational};
use crate::tensor::{DiffSpace, DiffTensor, ExtendedMap, ModelParams, PhiMap, TensorError};
use crate::tree::Atom;

/// Values attached to the atoms of one generation; missing atoms are zero.
pub type AtomMap = BTreeMap<Atom, Vec<Rational>>;

#[derive(Debug, Error, PartialEq)]
pub enum MartingaleError {
    #[error("level {level} out of range for depth {depth}")]
    LevelOutOfRange { level: usize, depth: usize },
    #[error("model parameters of the operands do not match")]
    ParamsMismatch,
    #[error("leaf at atom {atom} is invalid: {reason}")]
    BadLeaf { atom: Atom, reason: String },
    #[error("exponent must satisfy p ≥ 1, got {0}")]
    InvalidExponent(f64),
    #[error("Riesz exponent must be nonnegative")]
    NegativeAlpha,
    #[error("m^(-α) is irrational for this (m, α); use the floating-point monitor instead")]
    IrrationalRieszWeight,
    #[error("difference at atom {atom} is not admissible")]
    SobolevViolation { atom: Atom },
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

/// Integrability exponent: `1`, a finite `p > 1`, or `∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    One,
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn finite(p: f64) -> Result<Self, MartingaleError> {
        if !p.is_finite() || p <= 1.0 {
            return Err(MartingaleError::InvalidExponent(p));
        }
        Ok(Exponent::Finite(p))
    }

    /// The exponent `(p − 1)/p` that weights level `n` by `m^{−n(p−1)/p}`.
    pub fn weight_exponent(&self) -> f64 {
        match self {
            Exponent::One => 0.0,
            Exponent::Finite(p) => (p - 1.0) / p,
            Exponent::Infinity => 1.0,
        }
    }
}

/// Depth-`N` martingale with values in `ℝ^ℓ`, stored by leaf values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteMartingale {
    params: ModelParams,
    depth: usize,
    leaves: AtomMap,
}

impl FiniteMartingale {
    pub fn new(params: ModelParams, depth: usize, leaves: AtomMap) -> Result<Self, MartingaleError> {
        for (atom, value) in &leaves {
            if atom.depth() != depth {
                return Err(MartingaleError::BadLeaf {
                    atom: atom.clone(),
                    reason: format!("depth {} instead of {depth}", atom.depth()),
                });
            }
            if atom.digits().iter().any(|&d| d < 1 || d as usize > params.m()) {
                return Err(MartingaleError::BadLeaf {
                    atom: atom.clone(),
                    reason: "digit out of range".into(),
                });
            }
            if value.len() != params.ell() {
                return Err(MartingaleError::BadLeaf {
                    atom: atom.clone(),
                    reason: format!("value has {} coordinates, expected {}", value.len(), params.ell()),
                });
            }
        }
        Ok(FiniteMartingale { params, depth, leaves })
    }

    pub fn zero(params: ModelParams, depth: usize) -> Self {
        FiniteMartingale { params, depth, leaves: AtomMap::new() }
    }

    /// Constant martingale: every leaf carries `value`.
    pub fn constant(params: ModelParams, depth: usize, value: Vec<Rational>) -> Self {
        assert_eq!(value.len(), params.ell());
        let leaves = crate::tree::atoms_at_depth(depth, params)
            .into_iter()
            .map(|a| (a, value.clone()))
            .collect();
        FiniteMartingale { params, depth, leaves }
    }

    pub fn params(&self) -> ModelParams {
        self.params
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn leaves(&self) -> &AtomMap {
        &self.leaves
    }

    pub fn leaf_value(&self, atom: &Atom) -> Vec<Rational> {
        self.leaves
            .get(atom)
            .cloned()
            .unwrap_or_else(|| vec![Rational::zero(); self.params.ell()])
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let leaves = self
            .leaves
            .iter()
            .map(|(a, v)| (a.clone(), v.iter().map(|x| x * c).collect()))
            .collect();
        FiniteMartingale { params: self.params, depth: self.depth, leaves }
    }

    pub fn add(&self, other: &Self) -> Result<Self, MartingaleError> {
        if self.params != other.params || self.depth != other.depth {
            return Err(MartingaleError::ParamsMismatch);
        }
        let mut leaves = self.leaves.clone();
        for (a, v) in &other.leaves {
            match leaves.get_mut(a) {
                Some(existing) => {
                    for (e, x) in existing.iter_mut().zip(v) {
                        *e = &*e + x;
                    }
                }
                None => {
                    leaves.insert(a.clone(), v.clone());
                }
            }
        }
        Ok(FiniteMartingale { params: self.params, depth: self.depth, leaves })
    }

    /// Equality as functions on the leaf level (missing entries are zero).
    pub fn eq_as_functions(&self, other: &Self) -> bool {
        self.params == other.params
            && self.depth == other.depth
            && atom_maps_equal(&self.leaves, &other.leaves)
    }

    /// All levels `F_0 … F_N` by repeated averaging over children. The
    /// support of each level is the set of ancestors of the leaf support.
    pub fn levels(&self) -> MartingaleLevels {
        let mut maps = vec![AtomMap::new(); self.depth + 1];
        maps[self.depth] = self.leaves.clone();
        let inv_m = Rational::new(One::one(), self.params.m().into());
        for n in (0..self.depth).rev() {
            let mut level = AtomMap::new();
            for (atom, value) in &maps[n + 1] {
                let parent = atom.parent().expect("depth > 0");
                let entry = level
                    .entry(parent)
                    .or_insert_with(|| vec![Rational::zero(); self.params.ell()]);
                for (e, x) in entry.iter_mut().zip(value) {
                    *e = &*e + x;
                }
            }
            for value in level.values_mut() {
                for x in value.iter_mut() {
                    *x = &*x * &inv_m;
                }
            }
            maps[n] = level;
        }
        MartingaleLevels { params: self.params, depth: self.depth, maps }
    }
}

/// Compares two atom maps as functions (missing = zero).
pub fn atom_maps_equal(a: &AtomMap, b: &AtomMap) -> bool {
    a.iter().all(|(k, v)| b.get(k).map_or(v.iter().all(Zero::is_zero), |w| v == w))
        && b.iter().all(|(k, v)| a.contains_key(k) || v.iter().all(Zero::is_zero))
}

/// The conditional-expectation levels of a martingale.
#[derive(Debug, Clone)]
pub struct MartingaleLevels {
    params: ModelParams,
    depth: usize,
    maps: Vec<AtomMap>,
}

impl MartingaleLevels {
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn level(&self, n: usize) -> &AtomMap {
        &self.maps[n]
    }

    pub fn value(&self, n: usize, atom: &Atom) -> Vec<Rational> {
        self.maps[n]
            .get(atom)
            .cloned()
            .unwrap_or_else(|| vec![Rational::zero(); self.params.ell()])
    }

    /// Martingale difference at level `n`: `f_n = F_n − F_{n−1}` on depth-`n`
    /// atoms, with the convention `f_0 = F_0` at the root. The returned map
    /// covers every atom where the difference can be nonzero.
    pub fn difference(&self, n: usize) -> Result<AtomMap, MartingaleError> {
        if n > self.depth {
            return Err(MartingaleError::LevelOutOfRange { level: n, depth: self.depth });
        }
        if n == 0 {
            let mut out = AtomMap::new();
            let root_value = self.value(0, &Atom::root());
            if !root_value.iter().all(Zero::is_zero) {
                out.insert(Atom::root(), root_value);
            }
            return Ok(out);
        }
        let mut out = AtomMap::new();
        for (parent, parent_value) in &self.maps[n - 1] {
            for digit in 1..=self.params.m() as u8 {
                let child = parent.child(digit);
                let child_value = self.value(n, &child);
                let diff: Vec<Rational> =
                    child_value.iter().zip(parent_value).map(|(c, p)| c - p).collect();
                if !diff.iter().all(Zero::is_zero) {
                    out.insert(child, diff);
                }
            }
        }
        Ok(out)
    }

    /// The element of `V ⊗ ℝ^ℓ` carrying `f_{n+1}` restricted to a depth-`n`
    /// atom: row `i` is the difference on child `i`.
    pub fn difference_tensor(&self, n: usize, atom: &Atom) -> DiffTensor {
        debug_assert!(n < self.depth && atom.depth() == n);
        let parent_value = self.value(n, atom);
        let rows: Vec<Vec<Rational>> = (1..=self.params.m() as u8)
            .map(|digit| {
                let child_value = self.value(n + 1, &atom.child(digit));
                child_value.iter().zip(&parent_value).map(|(c, p)| c - p).collect()
            })
            .collect();
        DiffTensor::new(self.params, RatMatrix::from_rows(rows))
            .expect("differences have zero mean over children")
    }
}

/// Whether every difference of the martingale is admissible for `w`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SobolevVerdict {
    Valid,
    Violated { level: usize, atom: Atom },
}

impl SobolevVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, SobolevVerdict::Valid)
    }
}

/// Checks `f_{n+1}|_ω ∈ J_ω[W]` for every level and atom, exactly. The first
/// violation (lowest level, lexicographically first atom) is reported.
pub fn validate_sobolev(
    f: &FiniteMartingale,
    w: &DiffSpace,
) -> Result<SobolevVerdict, MartingaleError> {
    if f.params() != w.params() {
        return Err(MartingaleError::ParamsMismatch);
    }
    let levels = f.levels();
    for n in 0..f.depth() {
        for atom in levels.level(n).keys() {
            let tensor = levels.difference_tensor(n, atom);
            if !tensor.is_zero() && !w.contains(&tensor) {
                return Ok(SobolevVerdict::Violated { level: n, atom: atom.clone() });
            }
        }
    }
    Ok(SobolevVerdict::Valid)
}

/// Deterministic random element of the martingale class of `w`: the root
/// value and every difference are drawn with small integer coefficients, so
/// admissibility holds by construction.
pub fn random_sobolev(w: &DiffSpace, depth: usize, seed: u64) -> FiniteMartingale {
    let params = w.params();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let root: Vec<Rational> = (0..params.ell()).map(|_| rat(rng.gen_range(-3..=3))).collect();
    let mut leaves = AtomMap::new();
    let mut stack = vec![(Atom::root(), root)];
    while let Some((atom, value)) = stack.pop() {
        if atom.depth() == depth {
            leaves.insert(atom, value);
            continue;
        }
        let mut tensor = DiffTensor::zero(params);
        for basis in w.basis() {
            let c = rat(rng.gen_range(-2..=2));
            if !c.is_zero() {
                tensor = tensor.add(&basis.scale(&c));
            }
        }
        // Reverse digit order keeps the DFS deterministic and digit-ordered.
        for digit in (1..=params.m() as u8).rev() {
            let row = tensor.row(digit as usize);
            let child_value: Vec<Rational> =
                value.iter().zip(row).map(|(v, r)| v + r).collect();
            stack.push((atom.child(digit), child_value));
        }
    }
    FiniteMartingale { params, depth, leaves }
}

/// `L_p` norm of level-`n` data: `(Σ_ω m^{−n} |x(ω)|₂^p)^{1/p}` for finite
/// `p`, the maximum of `|x(ω)|₂` for `p = ∞`.
pub fn lp_norm(
    values: &AtomMap,
    level: usize,
    p: Exponent,
    params: ModelParams,
) -> f64 {
    match p {
        Exponent::Infinity => values
            .values()
            .map(|v| to_f64(&norm_sq(v)).sqrt())
            .fold(0.0, f64::max),
        Exponent::One | Exponent::Finite(_) => {
            let pv = if let Exponent::Finite(p) = p { p } else { 1.0 };
            let weight = (params.m() as f64).powi(-(level as i32));
            let sum: f64 = values
                .values()
                .map(|v| weight * to_f64(&norm_sq(v)).sqrt().powf(pv))
                .sum();
            sum.powf(1.0 / pv)
        }
    }
}

/// Exact `L₁` norm of level-`n` data when every point norm is rational.
pub fn l1_norm_exact(values: &AtomMap, level: usize, params: ModelParams) -> Option<Rational> {
    let weight = pow_neg(params.m() as u64, level as u32);
    let mut total = Rational::zero();
    for v in values.values() {
        let point = exact_sqrt(&norm_sq(v))?;
        total += &weight * &point;
    }
    Some(total)
}

/// `‖F‖` in the martingale class: the `L₁` norm of the final level.
pub fn norm_w(f: &FiniteMartingale) -> f64 {
    lp_norm(f.leaves(), f.depth(), Exponent::One, f.params())
}

/// Exact variant of [`norm_w`] when all leaf norms are rational.
pub fn norm_w_exact(f: &FiniteMartingale) -> Option<Rational> {
    l1_norm_exact(f.leaves(), f.depth(), f.params())
}

/// `m^{−α}` as an exact rational, when it is one.
pub fn riesz_weight(m: usize, alpha: &Rational) -> Result<Rational, MartingaleError> {
    if alpha.is_negative() {
        return Err(MartingaleError::NegativeAlpha);
    }
    if alpha.is_zero() {
        return Ok(Rational::one());
    }
    let exp = alpha
        .numer()
        .to_u32()
        .ok_or(MartingaleError::IrrationalRieszWeight)?;
    let root_order = alpha
        .denom()
        .to_u32()
        .ok_or(MartingaleError::IrrationalRieszWeight)?;
    let power = num_bigint::BigInt::from(m).pow(exp);
    let root = power.nth_root(root_order);
    if root.clone().pow(root_order) != power {
        return Err(MartingaleError::IrrationalRieszWeight);
    }
    Ok(Rational::new(One::one(), root))
}

/// Riesz potential `I_α[F]`: the martingale whose `n`-th difference is
/// `m^{−αn} f_n`. Exact; requires `m^{−α}` rational. The result is returned
/// as a full-depth martingale (its levels are the partial sums). The leaf
/// table is dense, so this is meant for desk-scale depths.
pub fn riesz_potential(
    f: &FiniteMartingale,
    alpha: &Rational,
) -> Result<FiniteMartingale, MartingaleError> {
    let weight = riesz_weight(f.params().m(), alpha)?;
    let levels = f.levels();
    let params = f.params();
    let mut leaves = AtomMap::new();
    // acc at depth n carries Σ_{k≤n} w^k f_k along the current branch.
    let root_acc = levels.value(0, &Atom::root());
    let mut stack = vec![(Atom::root(), root_acc, Rational::one())];
    while let Some((atom, acc, weight_n)) = stack.pop() {
        let n = atom.depth();
        if n == f.depth() {
            leaves.insert(atom, acc);
            continue;
        }
        let parent_value = levels.value(n, &atom);
        let next_weight = &weight_n * &weight;
        for digit in (1..=params.m() as u8).rev() {
            let child = atom.child(digit);
            let child_value = levels.value(n + 1, &child);
            let child_acc: Vec<Rational> = acc
                .iter()
                .zip(child_value.iter().zip(&parent_value))
                .map(|(a, (c, p))| a + &(&next_weight * &(c - p)))
                .collect();
            stack.push((child, child_acc, next_weight.clone()));
        }
    }
    FiniteMartingale::new(params, f.depth(), leaves)
}

/// Scalar function on the depth-`N` atoms (missing atoms are zero).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScalarTreeFunction {
    params: ModelParams,
    depth: usize,
    values: BTreeMap<Atom, Rational>,
}

impl ScalarTreeFunction {
    pub fn params(&self) -> ModelParams {
        self.params
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn values(&self) -> &BTreeMap<Atom, Rational> {
        &self.values
    }

    pub fn value(&self, atom: &Atom) -> Rational {
        self.values.get(atom).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.values.values().all(Zero::is_zero)
    }

    /// Exact `L_∞` norm (the values are rational).
    pub fn linf_norm(&self) -> Rational {
        self.values
            .values()
            .map(Signed::abs)
            .max()
            .unwrap_or_else(Rational::zero)
    }
}

/// Either the bare map `φ` (defined on `W` only) or its extension (total).
#[derive(Debug, Clone, Copy)]
pub enum TransformOperator<'a> {
    Phi(&'a PhiMap),
    Extended(&'a ExtendedMap),
}

impl TransformOperator<'_> {
    pub fn params(&self) -> ModelParams {
        match self {
            TransformOperator::Phi(phi) => phi.params(),
            TransformOperator::Extended(ext) => ext.params(),
        }
    }

    fn apply(&self, t: &DiffTensor, atom: &Atom) -> Result<Vec<Rational>, MartingaleError> {
        match self {
            TransformOperator::Phi(phi) => phi.apply(t).map_err(|e| match e {
                TensorError::NotInSpace => {
                    MartingaleError::SobolevViolation { atom: atom.clone() }
                }
                other => MartingaleError::Tensor(other),
            }),
            TransformOperator::Extended(ext) => Ok(ext.apply(t)),
        }
    }
}

/// The coordinate transform `Σ_n m^{−n} Σ_ω J_ω[op(J_ω^{−1}[f_{n+1}|_ω])]`,
/// truncated at the martingale depth and materialized on every depth-`N`
/// atom. With a bare `φ` the martingale must be admissible for its domain;
/// the extended map accepts any martingale.
pub fn transform(
    f: &FiniteMartingale,
    op: TransformOperator<'_>,
) -> Result<ScalarTreeFunction, MartingaleError> {
    if f.params() != op.params() {
        return Err(MartingaleError::ParamsMismatch);
    }
    let params = f.params();
    let levels = f.levels();
    let mut values = BTreeMap::new();
    let mut stack = vec![(Atom::root(), Rational::zero())];
    while let Some((atom, acc)) = stack.pop() {
        let n = atom.depth();
        if n == f.depth() {
            if !acc.is_zero() {
                values.insert(atom, acc);
            }
            continue;
        }
        let tensor = levels.difference_tensor(n, &atom);
        let image = if tensor.is_zero() {
            vec![Rational::zero(); params.m()]
        } else {
            op.apply(&tensor, &atom)?
        };
        let scale = pow_neg(params.m() as u64, n as u32);
        for digit in (1..=params.m() as u8).rev() {
            let term = &scale * &image[digit as usize - 1];
            stack.push((atom.child(digit), &acc + &term));
        }
    }
    Ok(ScalarTreeFunction { params, depth: f.depth(), values })
}

/// Value of the transform at a single depth-`N` atom, without materializing
/// the whole function. Follows the ancestor chain of the atom only, so it is
/// cheap even at large depths for sparse martingales.
pub fn transform_at(
    f: &FiniteMartingale,
    op: TransformOperator<'_>,
    atom: &Atom,
) -> Result<Rational, MartingaleError> {
    if f.params() != op.params() {
        return Err(MartingaleError::ParamsMismatch);
    }
    assert_eq!(atom.depth(), f.depth(), "evaluation atom must be a leaf atom");
    let params = f.params();
    let levels = f.levels();
    let mut acc = Rational::zero();
    for n in 0..f.depth() {
        let ancestor = Atom::new(atom.digits()[..n].to_vec(), params).expect("valid digits");
        let tensor = levels.difference_tensor(n, &ancestor);
        if tensor.is_zero() {
            continue;
        }
        let image = op.apply(&tensor, &ancestor)?;
        let digit = atom.digits()[n] as usize;
        acc += &pow_neg(params.m() as u64, n as u32) * &image[digit - 1];
    }
    Ok(acc)
}

/// Left-hand side of the levelwise embedding: `Σ_n m^{−n(p−1)/p} ‖f_n‖_{L_p}`.
pub fn difference_embedding_lhs(
    f: &FiniteMartingale,
    p: Exponent,
) -> Result<f64, MartingaleError> {
    let levels = f.levels();
    let m = f.params().m() as f64;
    let wexp = p.weight_exponent();
    let mut total = 0.0;
    for n in 0..=f.depth() {
        let diff = levels.difference(n)?;
        let weight = m.powf(-(n as f64) * wexp);
        total += weight * lp_norm(&diff, n, p, f.params());
    }
    Ok(total)
}

/// Left-hand side of the potential embedding: `‖I_{(p−1)/p}[F]‖_{L_p}`,
/// evaluated on the final element of the potential sequence. Floating point;
/// this is a monitoring quantity, not an exact checker.
pub fn riesz_embedding_lhs(f: &FiniteMartingale, p: Exponent) -> Result<f64, MartingaleError> {
    if matches!(p, Exponent::One) {
        return Err(MartingaleError::InvalidExponent(1.0));
    }
    let params = f.params();
    let levels = f.levels();
    let weight = (params.m() as f64).powf(-p.weight_exponent());
    let ell = params.ell();
    // Dense float walk accumulating Σ_k w^k f_k along each branch.
    let root: Vec<f64> = levels.value(0, &Atom::root()).iter().map(to_f64).collect();
    let mut stack = vec![(Atom::root(), root, 1.0f64)];
    let mut final_level: Vec<(Atom, Vec<f64>)> = Vec::new();
    while let Some((atom, acc, weight_n)) = stack.pop() {
        let n = atom.depth();
        if n == f.depth() {
            final_level.push((atom, acc));
            continue;
        }
        let parent_value = levels.value(n, &atom);
        let next_weight = weight_n * weight;
        for digit in (1..=params.m() as u8).rev() {
            let child = atom.child(digit);
            let child_value = levels.value(n + 1, &child);
            let child_acc: Vec<f64> = (0..ell)
                .map(|k| acc[k] + next_weight * (to_f64(&child_value[k]) - to_f64(&parent_value[k])))
                .collect();
            stack.push((child, child_acc, next_weight));
        }
    }
    let point_norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    match p {
        Exponent::Infinity => {
            Ok(final_level.iter().map(|(_, v)| point_norm(v)).fold(0.0, f64::max))
        }
        Exponent::Finite(pv) => {
            let mass = (params.m() as f64).powi(-(f.depth() as i32));
            let sum: f64 =
                final_level.iter().map(|(_, v)| mass * point_norm(v).powf(pv)).sum();
            Ok(sum.powf(1.0 / pv))
        }
        Exponent::One => unreachable!("rejected above"),
    }
}
