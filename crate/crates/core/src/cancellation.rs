//! Decision procedures for the cancellation and weak-cancellation conditions,
//! and the construction of the extended map `Φ`.
//!
//! Cancellation: `W` contains no nonzero spike tensor `D_j ⊗ a`, i.e. every
//! spike-direction space is trivial. Weak cancellation relative to `φ`: the
//! `j`-th coordinate of `φ(D_j ⊗ a)` vanishes whenever `D_j ⊗ a ∈ W`. Both
//! are decided exactly on a basis of each spike-direction space.

use num_traits::Zero;
use thiserror::Error;

use crate::linalg::{extend_functional, RatMatrix};
use crate::rational::Rational;
use crate::tensor::{
    spike_tensor, spike_tensor_space, DiffSpace, ExtendedMap, PhiMap, TensorError,
};

#[derive(Debug, Error, PartialEq)]
pub enum CancellationError {
    #[error("weak cancellation fails at digit {}: θ = {}", .0.j, .0.theta)]
    WeakCancellationViolated(WeakCancellationWitness),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

/// Nonzero direction `a` with `D_j ⊗ a ∈ W`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CancellationWitness {
    pub j: usize,
    pub a: Vec<Rational>,
}

/// Direction violating the coordinate condition: `θ = (φ(D_j ⊗ a))_j ≠ 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeakCancellationWitness {
    pub j: usize,
    pub a: Vec<Rational>,
    pub theta: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CancellationVerdict {
    Cancelling,
    NotCancelling(CancellationWitness),
}

impl CancellationVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, CancellationVerdict::Cancelling)
    }

    pub fn witness(&self) -> Option<&CancellationWitness> {
        match self {
            CancellationVerdict::Cancelling => None,
            CancellationVerdict::NotCancelling(w) => Some(w),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WeakCancellationVerdict {
    WeaklyCancelling,
    Violated(WeakCancellationWitness),
}

impl WeakCancellationVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, WeakCancellationVerdict::WeaklyCancelling)
    }

    pub fn witness(&self) -> Option<&WeakCancellationWitness> {
        match self {
            WeakCancellationVerdict::WeaklyCancelling => None,
            WeakCancellationVerdict::Violated(w) => Some(w),
        }
    }
}

/// True iff every spike-direction space of `W` is `{0}`. On failure reports
/// the lowest digit `j` together with the first basis direction of its
/// spike-direction space.
pub fn is_cancelling(w: &DiffSpace) -> Result<CancellationVerdict, TensorError> {
    for j in w.params().digits() {
        let directions = w.spike_directions(j)?;
        if !directions.is_zero() {
            return Ok(CancellationVerdict::NotCancelling(CancellationWitness {
                j,
                a: directions.basis()[0].clone(),
            }));
        }
    }
    Ok(CancellationVerdict::Cancelling)
}

/// True iff `(φ(D_j ⊗ a))_j = 0` for every `j` and every `a` with
/// `D_j ⊗ a ∈ W`. By linearity in `a` it suffices to check a basis of each
/// spike-direction space; the first violation (lowest `j`, then basis order)
/// is reported with `θ`.
pub fn is_weakly_cancelling(
    w: &DiffSpace,
    phi: &PhiMap,
) -> Result<WeakCancellationVerdict, TensorError> {
    for j in w.params().digits() {
        let directions = w.spike_directions(j)?;
        for a in directions.basis() {
            let tensor = spike_tensor(w.params(), j, a)?;
            let image = phi.apply(&tensor)?;
            let theta = image[j - 1].clone();
            if !theta.is_zero() {
                return Ok(WeakCancellationVerdict::Violated(WeakCancellationWitness {
                    j,
                    a: a.clone(),
                    theta,
                }));
            }
        }
    }
    Ok(WeakCancellationVerdict::WeaklyCancelling)
}

/// Builds the extension `Φ: V ⊗ ℝ^ℓ → ℝ^m` of `φ` whose `j`-th coordinate
/// functional vanishes on the whole spike tensor space of digit `j`.
///
/// Each coordinate functional is produced by [`extend_functional`] with
/// `E = W`, `F = {D_j ⊗ a}`, and `ψ = φ_j`; the complement of `E + F` gets
/// zero values, so the result is deterministic. Requires weak cancellation,
/// which is re-checked and reported with its witness on failure.
pub fn build_extension(w: &DiffSpace, phi: &PhiMap) -> Result<ExtendedMap, CancellationError> {
    match is_weakly_cancelling(w, phi)? {
        WeakCancellationVerdict::Violated(witness) => {
            return Err(CancellationError::WeakCancellationViolated(witness));
        }
        WeakCancellationVerdict::WeaklyCancelling => {}
    }
    let params = w.params();
    let ambient = params.ambient_dim();
    let e_space = w.subspace();
    // ψ_j values on the canonical basis of W: expand each canonical basis
    // vector in the stored tensor basis and apply φ there.
    let canonical_images: Vec<Vec<Rational>> = e_space
        .basis()
        .iter()
        .map(|v| {
            let t = crate::tensor::DiffTensor::from_vec(params, v).expect("basis tensor");
            phi.apply(&t).expect("canonical basis vector lies in W")
        })
        .collect();

    let mut functionals = Vec::with_capacity(params.m());
    for j in params.digits() {
        let f_space = spike_tensor_space(params, j)?;
        let psi: Vec<Rational> =
            canonical_images.iter().map(|img| img[j - 1].clone()).collect();
        let coeffs = extend_functional(ambient, e_space, &f_space, &psi)
            .expect("weak cancellation makes ψ vanish on W ∩ spike space");
        let rows = coeffs.chunks(params.ell()).map(<[Rational]>::to_vec).collect();
        functionals.push(RatMatrix::from_rows(rows));
    }
    Ok(ExtendedMap::from_functionals(params, functionals)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::sampling;
    use crate::tensor::{rank_one, DiffTensor, ModelParams};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn params(m: usize, ell: usize) -> ModelParams {
        ModelParams::new(m, ell).unwrap()
    }

    #[test]
    fn non_spike_line_is_cancelling() {
        // (1, −1, 0) is not proportional to any D_j for m = 3, so the span of
        // its rank-one tensor contains no spike tensors.
        let p = params(3, 1);
        let t = rank_one(p, &[rat(1), rat(-1), rat(0)], &[rat(1)]).unwrap();
        let w = DiffSpace::new(p, vec![t]).unwrap();
        assert!(is_cancelling(&w).unwrap().holds());
    }

    #[test]
    fn spike_line_is_not_cancelling() {
        let p = params(3, 1);
        let t = spike_tensor(p, 2, &[rat(1)]).unwrap();
        let w = DiffSpace::new(p, vec![t]).unwrap();
        let verdict = is_cancelling(&w).unwrap();
        let witness = verdict.witness().unwrap();
        assert_eq!(witness.j, 2);
        assert!(!witness.a.iter().all(Zero::is_zero));
        assert!(w.contains(&spike_tensor(p, 2, &witness.a).unwrap()));
    }

    #[test]
    fn zero_space_is_cancelling() {
        let w = DiffSpace::zero(params(3, 2));
        assert!(is_cancelling(&w).unwrap().holds());
    }

    #[test]
    fn weak_cancellation_examples() {
        let p = params(3, 1);
        let d1 = spike_tensor(p, 1, &[rat(1)]).unwrap();
        let w = DiffSpace::new(p, vec![d1.clone()]).unwrap();

        // φ(D_1) = (0, 1, −1): first coordinate vanishes.
        let phi = PhiMap::new(w.clone(), vec![vec![rat(0), rat(1), rat(-1)]]).unwrap();
        assert!(is_weakly_cancelling(&w, &phi).unwrap().holds());

        // φ(D_1) = D_1: θ = (D_1)_1 = m − 1 = 2.
        let phi_id = PhiMap::new(w.clone(), vec![vec![rat(2), rat(-1), rat(-1)]]).unwrap();
        let verdict = is_weakly_cancelling(&w, &phi_id).unwrap();
        let witness = verdict.witness().unwrap();
        assert_eq!(witness.j, 1);
        assert_eq!(witness.a, vec![rat(1)]);
        assert_eq!(witness.theta, rat(2));
    }

    #[test]
    fn cancelling_space_makes_weak_cancellation_vacuous() {
        let p = params(3, 1);
        let t = rank_one(p, &[rat(1), rat(-1), rat(0)], &[rat(1)]).unwrap();
        let w = DiffSpace::new(p, vec![t]).unwrap();
        // Any φ works, including one with large coordinates everywhere.
        let phi = PhiMap::new(w.clone(), vec![vec![rat(5), rat(-2), rat(-3)]]).unwrap();
        assert!(is_weakly_cancelling(&w, &phi).unwrap().holds());
    }

    #[test]
    fn extension_of_zero_space_is_zero() {
        let p = params(3, 2);
        let w = DiffSpace::zero(p);
        let phi = PhiMap::new(w.clone(), Vec::new()).unwrap();
        let ext = build_extension(&w, &phi).unwrap();
        assert_eq!(ext, ExtendedMap::zero(p));
    }

    #[test]
    fn extension_satisfies_both_contracts() {
        let p = params(3, 1);
        let d1 = spike_tensor(p, 1, &[rat(1)]).unwrap();
        let w = DiffSpace::new(p, vec![d1.clone()]).unwrap();
        let phi = PhiMap::new(w.clone(), vec![vec![rat(0), rat(1), rat(-1)]]).unwrap();
        let ext = build_extension(&w, &phi).unwrap();

        // Φ agrees with φ on W.
        assert_eq!(ext.apply(&d1), vec![rat(0), rat(1), rat(-1)]);
        // (Φ(D_j ⊗ a))_j = 0 for all j and a = basis directions.
        for j in 1..=3 {
            let t = spike_tensor(p, j, &[rat(1)]).unwrap();
            assert!(ext.coordinate(j, &t).is_zero());
        }
    }

    #[test]
    fn extension_reports_weak_cancellation_witness() {
        let p = params(3, 1);
        let d1 = spike_tensor(p, 1, &[rat(1)]).unwrap();
        let w = DiffSpace::new(p, vec![d1]).unwrap();
        let phi_id = PhiMap::new(w.clone(), vec![vec![rat(2), rat(-1), rat(-1)]]).unwrap();
        match build_extension(&w, &phi_id) {
            Err(CancellationError::WeakCancellationViolated(witness)) => {
                assert_eq!((witness.j, witness.a, witness.theta), (1, vec![rat(1)], rat(2)));
            }
            other => panic!("expected violation, got {other:?}"),
        }
    }

    #[test]
    fn extension_contract_on_random_weakly_cancelling_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..15 {
            let m = rng.gen_range(2..=4);
            let ell = rng.gen_range(1..=3);
            let p = params(m, ell);
            let (w, phi) = sampling::weakly_cancelling_instance(p, &mut rng);
            let ext = build_extension(&w, &phi).unwrap();
            for b in w.basis() {
                assert_eq!(ext.apply(b), phi.apply(b).unwrap());
            }
            for j in 1..=m {
                for k in 0..ell {
                    let mut a = vec![Rational::zero(); ell];
                    a[k] = rat(1);
                    let t = spike_tensor(p, j, &a).unwrap();
                    assert!(ext.coordinate(j, &t).is_zero());
                }
            }
        }
    }

    #[test]
    fn cancelling_implies_weakly_cancelling_for_random_phi() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut found = 0;
        while found < 10 {
            let m = rng.gen_range(2..=4);
            let ell = rng.gen_range(1..=3);
            let p = params(m, ell);
            let w = sampling::random_diff_space(p, &mut rng);
            if !is_cancelling(&w).unwrap().holds() {
                continue;
            }
            found += 1;
            let phi = sampling::random_phi(&w, &mut rng);
            assert!(is_weakly_cancelling(&w, &phi).unwrap().holds());
        }
    }

    #[test]
    fn verdicts_survive_basis_change_and_recoordinatization() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..12 {
            let m = rng.gen_range(2..=4);
            let ell = rng.gen_range(1..=2);
            let p = params(m, ell);
            let w = sampling::random_spiky_diff_space(p, &mut rng);
            let phi = sampling::random_phi(&w, &mut rng);
            let cancelling = is_cancelling(&w).unwrap().holds();
            let weakly = is_weakly_cancelling(&w, &phi).unwrap().holds();

            // Random invertible change of basis of W, with φ transported.
            let n = w.dim();
            let change = sampling::random_invertible(n, &mut rng);
            let mut new_basis = Vec::new();
            let mut new_images = Vec::new();
            for r in 0..n {
                let mut t = DiffTensor::zero(p);
                let mut img = vec![Rational::zero(); m];
                for c in 0..n {
                    t = t.add(&w.basis()[c].scale(&change[(r, c)]));
                    for (iv, x) in img.iter_mut().zip(&phi.images()[c]) {
                        *iv = &*iv + &(&change[(r, c)] * x);
                    }
                }
                new_basis.push(t);
                new_images.push(img);
            }
            let w2 = DiffSpace::new(p, new_basis).unwrap();
            let phi2 = PhiMap::new(w2.clone(), new_images).unwrap();
            assert_eq!(is_cancelling(&w2).unwrap().holds(), cancelling);
            assert_eq!(is_weakly_cancelling(&w2, &phi2).unwrap().holds(), weakly);

            // Invertible recoordinatization of ℝ^ℓ applied to all tensors.
            let s = sampling::random_invertible(ell, &mut rng);
            let transform_tensor = |t: &DiffTensor| {
                let rows: Vec<Vec<Rational>> = (0..m)
                    .map(|r| {
                        (0..ell)
                            .map(|k| {
                                (0..ell)
                                    .map(|k2| &s[(k, k2)] * &t.entries()[(r, k2)])
                                    .sum::<Rational>()
                            })
                            .collect()
                    })
                    .collect();
                DiffTensor::new(p, RatMatrix::from_rows(rows)).unwrap()
            };
            let w3 = DiffSpace::new(p, w.basis().iter().map(transform_tensor).collect()).unwrap();
            let phi3 = PhiMap::new(w3.clone(), phi.images().to_vec()).unwrap();
            assert_eq!(is_cancelling(&w3).unwrap().holds(), cancelling);
            assert_eq!(is_weakly_cancelling(&w3, &phi3).unwrap().holds(), weakly);
        }
    }
}
