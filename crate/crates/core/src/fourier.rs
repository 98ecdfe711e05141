//! Translation-invariant picture over a finite abelian group structure on
//! the digit alphabet: characters, Fourier fibers of the difference space,
//! and the Fourier reformulations of both cancellation conditions.
//!
//! Digit `j` corresponds to the group element with mixed-radix index `j − 1`,
//! so digit 1 is the identity. The transform convention is
//! `ŵ(γ) = Σ_x w(x) · conj(χ_γ(x))` with no prefactor; verdicts do not depend
//! on the normalization. Arithmetic here is complex floating point with a
//! rank threshold of `1e-9`; the exact spatial checkers are the reference.

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::RatMatrix;
use crate::rational::{to_f64, Rational};
use crate::tensor::{DiffSpace, DiffTensor, PhiMap};

/// Rank / verdict tolerance for the floating-point Fourier computations.
pub const FOURIER_TOL: f64 = 1e-9;

type C = Complex64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FourierError {
    #[error("cyclic orders must each be at least 2")]
    BadOrders,
    #[error("group order {order} does not match branching factor {m}")]
    OrderMismatch { order: usize, m: usize },
    #[error("the difference space is not translation invariant")]
    NotTranslationInvariant,
    #[error("the map is defined on a space that is not translation invariant")]
    DomainNotInvariant,
}

/// Finite abelian group `ℤ_{n_1} × … × ℤ_{n_k}` identified with the digit
/// alphabet `[1..m]`, `m = Π n_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbelianGroup {
    orders: Vec<usize>,
    order: usize,
}

impl AbelianGroup {
    pub fn new(orders: Vec<usize>) -> Result<Self, FourierError> {
        if orders.is_empty() || orders.iter().any(|&n| n < 2) {
            return Err(FourierError::BadOrders);
        }
        let order = orders.iter().product();
        Ok(AbelianGroup { orders, order })
    }

    pub fn cyclic(n: usize) -> Result<Self, FourierError> {
        Self::new(vec![n])
    }

    pub fn orders(&self) -> &[usize] {
        &self.orders
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Mixed-radix decoding of an element index, most significant first.
    pub fn tuple(&self, mut index: usize) -> Vec<usize> {
        let mut t = vec![0; self.orders.len()];
        for (i, &n) in self.orders.iter().enumerate().rev() {
            t[i] = index % n;
            index /= n;
        }
        t
    }

    pub fn index(&self, tuple: &[usize]) -> usize {
        tuple
            .iter()
            .zip(&self.orders)
            .fold(0, |acc, (&t, &n)| acc * n + (t % n))
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        let ta = self.tuple(a);
        let tb = self.tuple(b);
        let sum: Vec<usize> = ta
            .iter()
            .zip(&tb)
            .zip(&self.orders)
            .map(|((&x, &y), &n)| (x + y) % n)
            .collect();
        self.index(&sum)
    }

    pub fn neg(&self, a: usize) -> usize {
        let t = self.tuple(a);
        let neg: Vec<usize> =
            t.iter().zip(&self.orders).map(|(&x, &n)| (n - x) % n).collect();
        self.index(&neg)
    }

    /// Value of the character indexed by `gamma` at the element `x`.
    pub fn character_value(&self, gamma: usize, x: usize) -> C {
        let tg = self.tuple(gamma);
        let tx = self.tuple(x);
        let angle: f64 = tg
            .iter()
            .zip(&tx)
            .zip(&self.orders)
            .map(|((&g, &x), &n)| (g * x) as f64 / n as f64)
            .sum();
        C::from_polar(1.0, 2.0 * std::f64::consts::PI * angle)
    }

    /// Permutation of element indices induced by adding `g`.
    fn translation(&self, g: usize) -> Vec<usize> {
        (0..self.order).map(|e| self.add(e, g)).collect()
    }

    /// Action on tensors: row of digit `x + g` in the result is the row of
    /// digit `x` in the input.
    pub fn translate_tensor(&self, t: &DiffTensor, g: usize) -> DiffTensor {
        let params = t.params();
        assert_eq!(params.m(), self.order, "group order must match m");
        let perm = self.translation(g);
        let mut rows = vec![Vec::new(); self.order];
        for e in 0..self.order {
            rows[perm[e]] = t.entries().row(e).to_vec();
        }
        DiffTensor::new(params, RatMatrix::from_rows(rows)).expect("permutation keeps column sums")
    }

    /// Same permutation action on a coordinate vector of `ℝ^m`.
    pub fn translate_vector(&self, v: &[Rational], g: usize) -> Vec<Rational> {
        assert_eq!(v.len(), self.order);
        let perm = self.translation(g);
        let mut out = vec![Rational::from_integer(0.into()); self.order];
        for e in 0..self.order {
            out[perm[e]] = v[e].clone();
        }
        out
    }

    pub fn translate_vector_inverse(&self, v: &[Rational], g: usize) -> Vec<Rational> {
        self.translate_vector(v, self.neg(g))
    }
}

/// All `m` characters as value tables over the element indices; the identity
/// character (all ones) comes first.
pub fn characters(group: &AbelianGroup) -> Vec<Vec<C>> {
    (0..group.order())
        .map(|gamma| (0..group.order()).map(|x| group.character_value(gamma, x)).collect())
        .collect()
}

/// Fourier coefficient `ŵ(γ) = Σ_x w(x) conj(χ_γ(x))` of a tensor seen as an
/// `ℝ^ℓ`-valued function on the group.
pub fn tensor_fourier_coefficient(
    group: &AbelianGroup,
    t: &DiffTensor,
    gamma: usize,
) -> Vec<C> {
    let ell = t.params().ell();
    let mut out = vec![C::new(0.0, 0.0); ell];
    for e in 0..group.order() {
        let chi = group.character_value(gamma, e).conj();
        for (o, x) in out.iter_mut().zip(t.entries().row(e)) {
            *o += chi * to_f64(x);
        }
    }
    out
}

/// Fourier coefficient of a scalar function on the group (a vector of `ℝ^m`).
pub fn vector_fourier_coefficient(group: &AbelianGroup, v: &[Rational], gamma: usize) -> C {
    (0..group.order())
        .map(|e| group.character_value(gamma, e).conj() * to_f64(&v[e]))
        .sum()
}

/// Exact check that every translation maps the difference space onto itself.
pub fn is_translation_invariant(w: &DiffSpace, group: &AbelianGroup) -> bool {
    if w.params().m() != group.order() {
        return false;
    }
    for g in 1..group.order() {
        let translated: Vec<Vec<Rational>> = w
            .basis()
            .iter()
            .map(|b| group.translate_tensor(b, g).to_vec())
            .collect();
        let moved = crate::linalg::Subspace::from_vectors(w.params().ambient_dim(), translated);
        if &moved != w.subspace() {
            return false;
        }
    }
    true
}

/// Exact check that `φ` commutes with every translation on its domain.
/// Requires the domain itself to be translation invariant.
pub fn is_phi_translation_invariant(
    phi: &PhiMap,
    group: &AbelianGroup,
) -> Result<bool, FourierError> {
    let w = phi.domain();
    if !is_translation_invariant(w, group) {
        return Err(FourierError::DomainNotInvariant);
    }
    for g in 1..group.order() {
        for b in w.basis() {
            let moved = group.translate_tensor(b, g);
            let lhs = phi.apply(&moved).expect("translate stays in W");
            let rhs = group.translate_vector(&phi.apply(b).expect("basis in W"), g);
            if lhs != rhs {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Fourier fiber at a nonzero character: the space of coefficients `ŵ(γ)`
/// over `w ∈ W`, with an orthonormal basis.
#[derive(Debug, Clone)]
pub struct CharacterFiber {
    pub gamma: Vec<usize>,
    pub basis: Vec<Vec<C>>,
}

impl CharacterFiber {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// Fibers `W_γ` for every nonzero character, in character-index order.
pub fn fibers(w: &DiffSpace, group: &AbelianGroup) -> Result<Vec<CharacterFiber>, FourierError> {
    if w.params().m() != group.order() {
        return Err(FourierError::OrderMismatch { order: group.order(), m: w.params().m() });
    }
    if !is_translation_invariant(w, group) {
        return Err(FourierError::NotTranslationInvariant);
    }
    let mut out = Vec::new();
    for gamma in 1..group.order() {
        let coeffs: Vec<Vec<C>> = w
            .basis()
            .iter()
            .map(|b| tensor_fourier_coefficient(group, b, gamma))
            .collect();
        out.push(CharacterFiber {
            gamma: group.tuple(gamma),
            basis: orthonormal_span(&coeffs),
        });
    }
    Ok(out)
}

/// `⋂_{γ≠0} W_γ = {0}`: the Fourier form of the cancellation condition.
pub fn fourier_cancelling(w: &DiffSpace, group: &AbelianGroup) -> Result<bool, FourierError> {
    Ok(fiber_intersection(w, group)?.is_empty())
}

/// Orthonormal basis of `⋂_{γ≠0} W_γ`.
pub fn fiber_intersection(
    w: &DiffSpace,
    group: &AbelianGroup,
) -> Result<Vec<Vec<C>>, FourierError> {
    let fibers = fibers(w, group)?;
    let ell = w.params().ell();
    let mut meet: Vec<Vec<C>> = identity_basis(ell);
    for fiber in &fibers {
        meet = intersect_spans(&meet, &fiber.basis, ell);
        if meet.is_empty() {
            break;
        }
    }
    Ok(meet)
}

/// Fourier form of weak cancellation: `Σ_{γ≠0} φ_γ[a] = 0` for every `a` in
/// the fiber intersection. The fiber functionals `φ_γ` are recovered from the
/// action of `φ` on the basis of `W`.
pub fn fourier_weak_cancelling(
    w: &DiffSpace,
    phi: &PhiMap,
    group: &AbelianGroup,
) -> Result<bool, FourierError> {
    if !is_phi_translation_invariant(phi, group)? {
        return Err(FourierError::DomainNotInvariant);
    }
    let meet = fiber_intersection(w, group)?;
    if meet.is_empty() {
        return Ok(true);
    }
    let m = group.order();
    // Per nonzero character: coefficient family ŵ_i(γ) and the scalar values
    // of the transformed basis.
    let mut coeff_families = Vec::new();
    let mut value_families = Vec::new();
    for gamma in 1..m {
        let coeffs: Vec<Vec<C>> = w
            .basis()
            .iter()
            .map(|b| tensor_fourier_coefficient(group, b, gamma))
            .collect();
        let values: Vec<C> = w
            .basis()
            .iter()
            .map(|b| {
                let img = phi.apply(b).expect("basis in W");
                vector_fourier_coefficient(group, &img, gamma)
            })
            .collect();
        coeff_families.push(coeffs);
        value_families.push(values);
    }
    for a in &meet {
        let mut total = C::new(0.0, 0.0);
        for (coeffs, values) in coeff_families.iter().zip(&value_families) {
            total += fiber_functional_value(coeffs, values, a);
        }
        if total.norm() > FOURIER_TOL {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Value `φ_γ[a]`: solves `Σ_i c_i ŵ_i(γ) = a` in the least-squares sense and
/// returns `Σ_i c_i value_i`. Translation invariance makes the result
/// independent of the particular solution.
fn fiber_functional_value(coeffs: &[Vec<C>], values: &[C], a: &[C]) -> C {
    let r = coeffs.len();
    if r == 0 {
        return C::new(0.0, 0.0);
    }
    // Normal equations G c = rhs with G = M^H M, rhs = M^H a, where the
    // columns of M are the coefficient vectors.
    let mut g = vec![vec![C::new(0.0, 0.0); r]; r];
    let mut rhs = vec![C::new(0.0, 0.0); r];
    for i in 0..r {
        for j in 0..r {
            g[i][j] = coeffs[i].iter().zip(&coeffs[j]).map(|(x, y)| x.conj() * y).sum();
        }
        rhs[i] = coeffs[i].iter().zip(a).map(|(x, y)| x.conj() * y).sum();
    }
    let c = solve_square(&mut g, &mut rhs);
    values.iter().zip(&c).map(|(v, ci)| v * ci).sum()
}

/// In-place Gaussian elimination solve with magnitude pivoting; singular
/// directions get zero coefficients.
fn solve_square(a: &mut [Vec<C>], b: &mut [C]) -> Vec<C> {
    let n = a.len();
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; n];
    let mut row = 0;
    for col in 0..n {
        let Some(best) = (row..n)
            .filter(|&r| a[r][col].norm() > FOURIER_TOL)
            .max_by(|&x, &y| a[x][col].norm().total_cmp(&a[y][col].norm()))
        else {
            continue;
        };
        a.swap(row, best);
        b.swap(row, best);
        let inv = C::new(1.0, 0.0) / a[row][col];
        for c in col..n {
            a[row][c] *= inv;
        }
        b[row] *= inv;
        for r in 0..n {
            if r != row {
                let f = a[r][col];
                if f.norm() > 0.0 {
                    for c in col..n {
                        let sub = f * a[row][c];
                        a[r][c] -= sub;
                    }
                    let sub = f * b[row];
                    b[r] -= sub;
                }
            }
        }
        pivot_of_col[col] = Some(row);
        row += 1;
        if row == n {
            break;
        }
    }
    (0..n)
        .map(|col| pivot_of_col[col].map_or(C::new(0.0, 0.0), |r| b[r]))
        .collect()
}

fn identity_basis(dim: usize) -> Vec<Vec<C>> {
    (0..dim)
        .map(|i| {
            let mut v = vec![C::new(0.0, 0.0); dim];
            v[i] = C::new(1.0, 0.0);
            v
        })
        .collect()
}

/// Orthonormal basis of the span, modified Gram–Schmidt with one
/// re-orthogonalization pass and the rank threshold [`FOURIER_TOL`].
fn orthonormal_span(vectors: &[Vec<C>]) -> Vec<Vec<C>> {
    let mut basis: Vec<Vec<C>> = Vec::new();
    for v in vectors {
        let scale = v.iter().map(|x| x.norm()).fold(0.0f64, f64::max);
        if scale <= FOURIER_TOL {
            continue;
        }
        let mut u: Vec<C> = v.iter().map(|x| x / scale).collect();
        for _ in 0..2 {
            for b in &basis {
                let proj: C = b.iter().zip(&u).map(|(x, y)| x.conj() * y).sum();
                for (ui, bi) in u.iter_mut().zip(b) {
                    *ui -= proj * bi;
                }
            }
        }
        let norm = u.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm > FOURIER_TOL {
            for ui in &mut u {
                *ui /= norm;
            }
            basis.push(u);
        }
    }
    basis
}

/// Intersection of two spans inside `ℂ^dim`, via the kernel of the stacked
/// coefficient matrix.
fn intersect_spans(a: &[Vec<C>], b: &[Vec<C>], dim: usize) -> Vec<Vec<C>> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let p = a.len();
    let q = b.len();
    // dim rows, p + q columns: Σ x_i a_i − Σ y_j b_j = 0.
    let rows: Vec<Vec<C>> = (0..dim)
        .map(|r| {
            (0..p + q)
                .map(|c| if c < p { a[c][r] } else { -b[c - p][r] })
                .collect()
        })
        .collect();
    let combos = kernel_basis_c(&rows, p + q);
    let vectors: Vec<Vec<C>> = combos
        .iter()
        .map(|k| {
            (0..dim)
                .map(|r| (0..p).map(|i| k[i] * a[i][r]).sum())
                .collect()
        })
        .collect();
    orthonormal_span(&vectors)
}

/// Kernel basis of a complex matrix given by rows, with threshold pivoting.
fn kernel_basis_c(rows: &[Vec<C>], cols: usize) -> Vec<Vec<C>> {
    let mut m: Vec<Vec<C>> = rows.to_vec();
    let nrows = m.len();
    let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, col)
    let mut row = 0;
    for col in 0..cols {
        let Some(best) = (row..nrows)
            .filter(|&r| m[r][col].norm() > FOURIER_TOL)
            .max_by(|&x, &y| m[x][col].norm().total_cmp(&m[y][col].norm()))
        else {
            continue;
        };
        m.swap(row, best);
        let inv = C::new(1.0, 0.0) / m[row][col];
        for c in col..cols {
            m[row][c] *= inv;
        }
        for r in 0..nrows {
            if r != row && m[r][col].norm() > 0.0 {
                let f = m[r][col];
                for c in col..cols {
                    let sub = f * m[row][c];
                    m[r][c] -= sub;
                }
            }
        }
        pivots.push((row, col));
        row += 1;
        if row == nrows {
            break;
        }
    }
    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let mut basis = Vec::new();
    for free in (0..cols).filter(|c| !pivot_cols.contains(c)) {
        let mut v = vec![C::new(0.0, 0.0); cols];
        v[free] = C::new(1.0, 0.0);
        for &(r, c) in &pivots {
            v[c] = -m[r][free];
        }
        basis.push(v);
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cancellation::{is_cancelling, is_weakly_cancelling};
    use crate::rational::rat;
    use crate::sampling;
    use crate::tensor::{spike_tensor, ModelParams};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn close(a: C, b: C) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn z2_characters() {
        let g = AbelianGroup::cyclic(2).unwrap();
        let chars = characters(&g);
        assert!(close(chars[0][0], C::new(1.0, 0.0)) && close(chars[0][1], C::new(1.0, 0.0)));
        assert!(close(chars[1][0], C::new(1.0, 0.0)) && close(chars[1][1], C::new(-1.0, 0.0)));
    }

    #[test]
    fn identity_character_is_all_ones() {
        for orders in [vec![3], vec![2, 2], vec![6], vec![2, 3]] {
            let g = AbelianGroup::new(orders).unwrap();
            let chars = characters(&g);
            assert!(chars[0].iter().all(|&v| close(v, C::new(1.0, 0.0))));
        }
    }

    #[test]
    fn character_orthogonality() {
        for orders in [vec![3], vec![4], vec![2, 2], vec![6]] {
            let g = AbelianGroup::new(orders).unwrap();
            let m = g.order() as f64;
            let chars = characters(&g);
            for (i, ci) in chars.iter().enumerate() {
                for (j, cj) in chars.iter().enumerate() {
                    let dot: C = ci.iter().zip(cj).map(|(x, y)| x * y.conj()).sum();
                    let want = if i == j { C::new(m, 0.0) } else { C::new(0.0, 0.0) };
                    assert!((dot - want).norm() < 1e-12, "orders mismatch at {i},{j}");
                }
            }
        }
    }

    #[test]
    fn z3_character_table_is_powers_of_the_primitive_root() {
        let g = AbelianGroup::cyclic(3).unwrap();
        let chars = characters(&g);
        let root = C::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
        for gamma in 0..3 {
            for x in 0..3 {
                assert!(close(chars[gamma][x], root.powu((gamma * x) as u32 % 3)));
            }
        }
    }

    #[test]
    fn trivial_coefficient_vanishes_on_mean_zero_tensors() {
        let g = AbelianGroup::new(vec![2, 2]).unwrap();
        let p = ModelParams::new(4, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let t = sampling::random_tensor(p, &mut rng);
            let hat0 = tensor_fourier_coefficient(&g, &t, 0);
            assert!(hat0.iter().all(|c| c.norm() < 1e-12));
        }
    }

    #[test]
    fn plancherel_identity() {
        let g = AbelianGroup::cyclic(4).unwrap();
        let p = ModelParams::new(4, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..10 {
            let t = sampling::random_tensor(p, &mut rng);
            let spatial: f64 = (0..4)
                .map(|e| {
                    t.entries().row(e).iter().map(|x| to_f64(x).powi(2)).sum::<f64>()
                })
                .sum();
            let fourier: f64 = (0..4)
                .map(|gamma| {
                    tensor_fourier_coefficient(&g, &t, gamma)
                        .iter()
                        .map(|c| c.norm_sqr())
                        .sum::<f64>()
                })
                .sum();
            let rel = (spatial - fourier / 4.0).abs() / spatial.max(1.0);
            assert!(rel < 1e-10, "plancherel violated: {spatial} vs {fourier}");
        }
    }

    #[test]
    fn full_space_is_invariant_with_full_fibers() {
        let p = ModelParams::new(4, 2).unwrap();
        let w = DiffSpace::full(p);
        for orders in [vec![4], vec![2, 2]] {
            let g = AbelianGroup::new(orders).unwrap();
            assert!(is_translation_invariant(&w, &g));
            let fib = fibers(&w, &g).unwrap();
            assert!(fib.iter().all(|f| f.dim() == 2));
            // Intersection is everything, so not cancelling.
            assert!(!fourier_cancelling(&w, &g).unwrap());
        }
    }

    #[test]
    fn single_spike_span_is_not_invariant() {
        let p = ModelParams::new(3, 1).unwrap();
        let t = spike_tensor(p, 1, &[rat(1)]).unwrap();
        let w = DiffSpace::new(p, vec![t]).unwrap();
        let g = AbelianGroup::cyclic(3).unwrap();
        assert!(!is_translation_invariant(&w, &g));
        assert_eq!(fibers(&w, &g).err(), Some(FourierError::NotTranslationInvariant));
    }

    #[test]
    fn span_of_all_spikes_is_invariant() {
        let p = ModelParams::new(3, 1).unwrap();
        let tensors: Vec<_> = (1..=2)
            .map(|j| spike_tensor(p, j, &[rat(1)]).unwrap())
            .collect();
        // D_1, D_2 span the same space as all three spikes (they sum to zero).
        let w = DiffSpace::new(p, tensors).unwrap();
        let g = AbelianGroup::cyclic(3).unwrap();
        assert!(is_translation_invariant(&w, &g));
    }

    #[test]
    fn z2_fiber_is_span_of_direction() {
        // W = span{(1,−1) ⊗ a}: the sign-character fiber is the span of a.
        let p = ModelParams::new(2, 2).unwrap();
        let a = [rat(1), rat(2)];
        let t = spike_tensor(p, 1, &a).unwrap();
        let w = DiffSpace::new(p, vec![t]).unwrap();
        let g = AbelianGroup::cyclic(2).unwrap();
        let fib = fibers(&w, &g).unwrap();
        assert_eq!(fib.len(), 1);
        assert_eq!(fib[0].dim(), 1);
        // Hand DFT: ŵ(sign) = row(1) − row(2) = 2·(1, 2).
        let b = &fib[0].basis[0];
        let expected = [1.0, 2.0];
        let scale = b[0].re / expected[0];
        for (bi, ei) in b.iter().zip(expected) {
            assert!((bi - C::new(scale * ei, 0.0)).norm() < 1e-9);
        }
    }

    #[test]
    fn fiber_dims_reconstruct_space_dim() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for orders in [vec![2], vec![3], vec![4], vec![2, 2], vec![6]] {
            let g = AbelianGroup::new(orders).unwrap();
            let (w, _) = sampling::translation_invariant_instance(&g, 2, &mut rng);
            let fib = fibers(&w, &g).unwrap();
            let total: usize = fib.iter().map(CharacterFiber::dim).sum();
            assert_eq!(total, w.dim(), "orders {:?}", g.orders());
        }
    }

    #[test]
    fn zero_space_is_fourier_cancelling() {
        let p = ModelParams::new(4, 2).unwrap();
        let w = DiffSpace::zero(p);
        let g = AbelianGroup::new(vec![2, 2]).unwrap();
        assert!(fourier_cancelling(&w, &g).unwrap());
    }

    #[test]
    fn z2_weak_cancellation_forces_zero_multiplier() {
        // W = span{(1,−1)}, φ(1,−1) = c·(1,−1): weakly cancelling iff c = 0.
        let p = ModelParams::new(2, 1).unwrap();
        let t = spike_tensor(p, 1, &[rat(1)]).unwrap();
        let g = AbelianGroup::cyclic(2).unwrap();
        for c in [0i64, 1, -2] {
            let w = DiffSpace::new(p, vec![t.clone()]).unwrap();
            let phi = PhiMap::new(w.clone(), vec![vec![rat(c), rat(-c)]]).unwrap();
            let spatial = is_weakly_cancelling(&w, &phi).unwrap().holds();
            let fourier = fourier_weak_cancelling(&w, &phi, &g).unwrap();
            assert_eq!(spatial, c == 0);
            assert_eq!(fourier, spatial);
        }
    }

    #[test]
    fn spatial_and_fourier_verdicts_agree_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for orders in [vec![2], vec![3], vec![4], vec![2, 2]] {
            let g = AbelianGroup::new(orders).unwrap();
            for _ in 0..8 {
                let ell = rng.gen_range(1..=3);
                let (w, phi) = sampling::translation_invariant_instance(&g, ell, &mut rng);
                assert_eq!(
                    fourier_cancelling(&w, &g).unwrap(),
                    is_cancelling(&w).unwrap().holds()
                );
                assert_eq!(
                    fourier_weak_cancelling(&w, &phi, &g).unwrap(),
                    is_weakly_cancelling(&w, &phi).unwrap().holds()
                );
            }
        }
    }
}
