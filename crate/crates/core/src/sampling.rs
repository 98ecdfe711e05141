//! Seeded random generation of model instances: admissible difference
//! spaces, maps on them, and translation-invariant examples. Used by the
//! property-test sweeps and the acceptance suite; everything is deterministic
//! given the seed.

use num_traits::Zero;
use rand::Rng;

use crate::fourier::AbelianGroup;
use crate::linalg::RatMatrix;
use crate::rational::{rat, ratio, Rational};
use crate::tensor::{spike_tensor, DiffSpace, DiffTensor, ModelParams, PhiMap};

/// Derives the sub-seed for the `index`-th job of a sweep from the base seed.
/// SplitMix64 finalizer over `base + index`, so jobs can run in any order.
pub fn split_seed(base: u64, index: u64) -> u64 {
    let mut z = base.wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Small rational with numerator in `−3..=3` and denominator in `{1, 2, 3}`.
pub fn small_rational(rng: &mut impl Rng) -> Rational {
    ratio(rng.gen_range(-3..=3), *[1, 1, 2, 3].get(rng.gen_range(0..4)).unwrap())
}

/// Random vector of small integers with zero coordinate sum.
pub fn random_mean_zero(len: usize, rng: &mut impl Rng) -> Vec<Rational> {
    let mut v: Vec<Rational> = (0..len - 1).map(|_| rat(rng.gen_range(-3..=3))).collect();
    v.push(-v.iter().sum::<Rational>());
    v
}

/// Random tensor of `V ⊗ ℝ^ℓ` with small integer entries.
pub fn random_tensor(params: ModelParams, rng: &mut impl Rng) -> DiffTensor {
    let mut rows: Vec<Vec<Rational>> = (0..params.m() - 1)
        .map(|_| (0..params.ell()).map(|_| rat(rng.gen_range(-3..=3))).collect())
        .collect();
    let last: Vec<Rational> = (0..params.ell())
        .map(|k| -rows.iter().map(|r| r[k].clone()).sum::<Rational>())
        .collect();
    rows.push(last);
    DiffTensor::new(params, RatMatrix::from_rows(rows)).expect("columns sum to zero")
}

/// Greedily keeps tensors that enlarge the span, up to `target` of them.
fn independent_family(
    params: ModelParams,
    candidates: impl Iterator<Item = DiffTensor>,
    target: usize,
) -> Vec<DiffTensor> {
    let mut kept: Vec<DiffTensor> = Vec::new();
    for t in candidates {
        if kept.len() == target {
            break;
        }
        if t.is_zero() {
            continue;
        }
        let mut trial = kept.clone();
        trial.push(t);
        if DiffSpace::new(params, trial.clone()).is_ok() {
            kept = trial;
        }
    }
    kept
}

/// Random difference space of dimension between 1 and the ambient dimension
/// of `V ⊗ ℝ^ℓ` (biased small).
pub fn random_diff_space(params: ModelParams, rng: &mut impl Rng) -> DiffSpace {
    let max_dim = (params.m() - 1) * params.ell();
    let target = rng.gen_range(1..=max_dim.min(3));
    let mut attempts = 0;
    let basis = independent_family(
        params,
        std::iter::from_fn(|| {
            attempts += 1;
            (attempts < 100).then(|| random_tensor(params, rng))
        }),
        target,
    );
    DiffSpace::new(params, basis).expect("independent by construction")
}

/// Like [`random_diff_space`], but usually seeds the space with one or two
/// spike tensors so the spike-direction spaces are often nontrivial.
pub fn random_spiky_diff_space(params: ModelParams, rng: &mut impl Rng) -> DiffSpace {
    let max_dim = (params.m() - 1) * params.ell();
    let n_spikes = rng.gen_range(0..=2usize.min(max_dim));
    let mut candidates: Vec<DiffTensor> = Vec::new();
    for _ in 0..n_spikes {
        let j = rng.gen_range(1..=params.m());
        let a: Vec<Rational> =
            (0..params.ell()).map(|_| rat(rng.gen_range(-2..=2))).collect();
        if a.iter().all(Zero::is_zero) {
            continue;
        }
        candidates.push(spike_tensor(params, j, &a).expect("valid digit"));
    }
    let extra = rng.gen_range(0..=2usize);
    for _ in 0..extra {
        candidates.push(random_tensor(params, rng));
    }
    let target = candidates.len().clamp(1, max_dim);
    let mut attempts = 0;
    let basis = independent_family(
        params,
        candidates.into_iter().chain(std::iter::from_fn(|| {
            attempts += 1;
            (attempts < 50).then(|| random_tensor(params, rng))
        })),
        target,
    );
    DiffSpace::new(params, basis).expect("independent by construction")
}

/// Random `φ: W → V` with small integer images.
pub fn random_phi(w: &DiffSpace, rng: &mut impl Rng) -> PhiMap {
    let m = w.params().m();
    let images = (0..w.dim()).map(|_| random_mean_zero(m, rng)).collect();
    PhiMap::new(w.clone(), images).expect("images lie in V")
}

/// Random instance `(W, φ)` that satisfies weak cancellation exactly: the
/// condition is a linear constraint system on the images of `φ`, and we
/// sample from the kernel of that system.
pub fn weakly_cancelling_instance(
    params: ModelParams,
    rng: &mut impl Rng,
) -> (DiffSpace, PhiMap) {
    let w = random_spiky_diff_space(params, rng);
    let phi = weakly_cancelling_phi(&w, rng);
    (w, phi)
}

/// Samples `φ` from the exact solution space of the weak-cancellation
/// constraints on `W`.
pub fn weakly_cancelling_phi(w: &DiffSpace, rng: &mut impl Rng) -> PhiMap {
    let params = w.params();
    let m = params.m();
    let r = w.dim();
    if r == 0 {
        return PhiMap::new(w.clone(), Vec::new()).expect("empty map");
    }
    // Unknowns: images y_1..y_r ∈ ℝ^m, flattened as r·m coordinates.
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    // Images must lie in V.
    for k in 0..r {
        let mut row = vec![Rational::zero(); r * m];
        for i in 0..m {
            row[k * m + i] = rat(1);
        }
        rows.push(row);
    }
    // For each digit j and each basis direction a of the spike-direction
    // space: Σ_k c_k (y_k)_j = 0, where D_j ⊗ a = Σ_k c_k b_k.
    for j in params.digits() {
        let directions = w.spike_directions(j).expect("valid digit");
        for a in directions.basis() {
            let t = spike_tensor(params, j, a).expect("valid digit");
            let coeffs = w.coefficients(&t).expect("spike tensor lies in W");
            let mut row = vec![Rational::zero(); r * m];
            for (k, c) in coeffs.iter().enumerate() {
                row[k * m + (j - 1)] = c.clone();
            }
            rows.push(row);
        }
    }
    let kernel = RatMatrix::from_rows(rows).kernel_basis();
    let mut flat = vec![Rational::zero(); r * m];
    for v in &kernel {
        let c = rat(rng.gen_range(-3..=3));
        if c.is_zero() {
            continue;
        }
        for (fi, vi) in flat.iter_mut().zip(v) {
            *fi = &*fi + &(&c * vi);
        }
    }
    let images: Vec<Vec<Rational>> = flat.chunks(m).map(<[Rational]>::to_vec).collect();
    PhiMap::new(w.clone(), images).expect("kernel satisfies the V constraint")
}

/// Random invertible `n × n` rational matrix with small integer entries.
pub fn random_invertible(n: usize, rng: &mut impl Rng) -> RatMatrix {
    loop {
        let m = RatMatrix::from_rows(
            (0..n).map(|_| (0..n).map(|_| rat(rng.gen_range(-2..=2))).collect()).collect(),
        );
        if n == 0 || m.rank() == n {
            return m;
        }
    }
}

/// Random translation-invariant instance over the given group: `W` is the
/// span of the orbit of one or two random tensors, and `φ` is obtained by
/// averaging a random linear map over the group action, which makes it
/// commute with every translation.
pub fn translation_invariant_instance(
    group: &AbelianGroup,
    ell: usize,
    rng: &mut impl Rng,
) -> (DiffSpace, PhiMap) {
    let params = ModelParams::new(group.order(), ell).expect("group order is at least 2");
    let m = params.m();
    let n_generators = rng.gen_range(1..=2);
    let mut orbit = Vec::new();
    for _ in 0..n_generators {
        let t = random_tensor(params, rng);
        for g in 0..m {
            orbit.push(group.translate_tensor(&t, g));
        }
    }
    let max_dim = (m - 1) * ell;
    let basis = independent_family(params, orbit.into_iter(), max_dim);
    let w = DiffSpace::new(params, basis).expect("independent by construction");

    // Random linear map ρ on W, then average τ_g⁻¹ ∘ ρ ∘ τ_g over the group.
    let rho_images: Vec<Vec<Rational>> =
        (0..w.dim()).map(|_| random_mean_zero(m, rng)).collect();
    let rho = |t: &DiffTensor| -> Vec<Rational> {
        let coeffs = w.coefficients(t).expect("orbit stays inside W");
        let mut out = vec![Rational::zero(); m];
        for (c, img) in coeffs.iter().zip(&rho_images) {
            for (o, x) in out.iter_mut().zip(img) {
                *o = &*o + &(c * x);
            }
        }
        out
    };
    let inv_m = ratio(1, m as i64);
    let images: Vec<Vec<Rational>> = w
        .basis()
        .iter()
        .map(|b| {
            let mut acc = vec![Rational::zero(); m];
            for g in 0..m {
                let moved = group.translate_tensor(b, g);
                let mapped = rho(&moved);
                let back = group.translate_vector_inverse(&mapped, g);
                for (a, x) in acc.iter_mut().zip(&back) {
                    *a = &*a + x;
                }
            }
            acc.iter().map(|x| x * &inv_m).collect()
        })
        .collect();
    let phi = PhiMap::new(w.clone(), images).expect("averaged images stay in V");
    (w, phi)
}
