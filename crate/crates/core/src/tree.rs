//! The m-adic atom tree: atoms as digit sequences, infinite paths, the
//! ultrametric, and the identification of `ℝ^m` values with functions on an
//! atom's children.

use std::fmt;

use thiserror::Error;

use crate::linalg::RatMatrix;
use crate::rational::{pow_neg, Rational};
use crate::tensor::ModelParams;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TreeError {
    #[error("digit {digit} out of range 1..={m}")]
    DigitOutOfRange { digit: u8, m: usize },
    #[error("digit character {0:?} is not in 1..=9")]
    BadDigitChar(char),
}

/// Atom of generation `n`, identified by its digit sequence from the root.
/// The root atom is the empty sequence; the atom has probability `m^(−n)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    digits: Vec<u8>,
}

impl Atom {
    pub fn root() -> Self {
        Atom { digits: Vec::new() }
    }

    pub fn new(digits: Vec<u8>, params: ModelParams) -> Result<Self, TreeError> {
        for &d in &digits {
            check_digit(d, params)?;
        }
        Ok(Atom { digits })
    }

    pub fn depth(&self) -> usize {
        self.digits.len()
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    pub fn child(&self, digit: u8) -> Atom {
        let mut digits = self.digits.clone();
        digits.push(digit);
        Atom { digits }
    }

    pub fn parent(&self) -> Option<Atom> {
        if self.digits.is_empty() {
            None
        } else {
            Some(Atom { digits: self.digits[..self.digits.len() - 1].to_vec() })
        }
    }

    pub fn is_ancestor_of(&self, other: &Atom) -> bool {
        other.digits.starts_with(&self.digits)
    }

    /// Parses the digit-string form produced by `Display` ("312"; "" = root).
    pub fn parse(s: &str, params: ModelParams) -> Result<Self, TreeError> {
        let mut digits = Vec::with_capacity(s.len());
        for ch in s.chars() {
            let d = ch.to_digit(10).filter(|&d| d >= 1).ok_or(TreeError::BadDigitChar(ch))? as u8;
            check_digit(d, params)?;
            digits.push(d);
        }
        Ok(Atom { digits })
    }
}

impl fmt::Display for Atom {
    /// Digit-string serialization; only digits up to 9 are representable.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &d in &self.digits {
            if d <= 9 {
                write!(f, "{d}")?;
            } else {
                write!(f, "({d})")?;
            }
        }
        Ok(())
    }
}

fn check_digit(d: u8, params: ModelParams) -> Result<(), TreeError> {
    if d < 1 || (d as usize) > params.m() {
        return Err(TreeError::DigitOutOfRange { digit: d, m: params.m() });
    }
    Ok(())
}

/// The `m` children of an atom, ordered by digit.
pub fn children(atom: &Atom, params: ModelParams) -> Vec<Atom> {
    (1..=params.m() as u8).map(|d| atom.child(d)).collect()
}

/// All atoms of generation `n`, in lexicographic (digit) order.
pub fn atoms_at_depth(n: usize, params: ModelParams) -> Vec<Atom> {
    let mut out = vec![Atom::root()];
    for _ in 0..n {
        out = out.iter().flat_map(|a| children(a, params)).collect();
    }
    out
}

/// Infinite path in the tree: a finite prefix followed by one digit repeated
/// forever. This class is dense in the path space and closed under the
/// operations the library needs.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TreePath {
    prefix: Vec<u8>,
    repeat: u8,
}

impl TreePath {
    /// Canonicalizes by stripping trailing copies of `repeat` from the
    /// prefix, so equal infinite sequences compare equal.
    pub fn new(mut prefix: Vec<u8>, repeat: u8, params: ModelParams) -> Result<Self, TreeError> {
        check_digit(repeat, params)?;
        for &d in &prefix {
            check_digit(d, params)?;
        }
        while prefix.last() == Some(&repeat) {
            prefix.pop();
        }
        Ok(TreePath { prefix, repeat })
    }

    /// The path `j, j, j, …`.
    pub fn constant(j: u8, params: ModelParams) -> Result<Self, TreeError> {
        Self::new(Vec::new(), j, params)
    }

    pub fn digit_at(&self, index: usize) -> u8 {
        *self.prefix.get(index).unwrap_or(&self.repeat)
    }

    /// The depth-`n` atom containing this path.
    pub fn atom_at_depth(&self, n: usize) -> Atom {
        Atom { digits: (0..n).map(|i| self.digit_at(i)).collect() }
    }

    pub fn prefix(&self) -> &[u8] {
        &self.prefix
    }

    pub fn repeat(&self) -> u8 {
        self.repeat
    }
}

/// Metric on paths: `m^(−d)` where `d` counts the common leading digits;
/// `0` for equal paths. Distinct first digits give distance `1`.
pub fn dist(p1: &TreePath, p2: &TreePath, params: ModelParams) -> Rational {
    if p1 == p2 {
        return Rational::from_integer(0.into());
    }
    let horizon = p1.prefix.len().max(p2.prefix.len()) + 1;
    let d = (0..horizon)
        .take_while(|&i| p1.digit_at(i) == p2.digit_at(i))
        .count();
    pow_neg(params.m() as u64, d as u32)
}

/// Assigns the coordinates of `x ∈ ℝ^m` to the children of an atom: child `i`
/// receives `x_i`. For `x ∈ V` the mean over children is zero; other vectors
/// are accepted as well.
pub fn j_omega_apply(
    atom: &Atom,
    x: &[Rational],
    params: ModelParams,
) -> Vec<(Atom, Rational)> {
    assert_eq!(x.len(), params.m(), "x must have m coordinates");
    children(atom, params).into_iter().zip(x.iter().cloned()).collect()
}

/// Vector-valued variant: row `i` of the `m × ℓ` matrix goes to child `i`.
pub fn j_omega_apply_rows(
    atom: &Atom,
    rows: &RatMatrix,
    params: ModelParams,
) -> Vec<(Atom, Vec<Rational>)> {
    assert_eq!(rows.rows(), params.m(), "matrix must have m rows");
    children(atom, params)
        .into_iter()
        .enumerate()
        .map(|(i, child)| (child, rows.row(i).to_vec()))
        .collect()
}
