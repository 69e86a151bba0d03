//! The extactic polynomial E_W(X): determinant of the matrix of iterated
//! Lie derivatives of a basis of W. Invariant hypersurfaces with defining
//! polynomial in W divide it, and the largest power dividing it is the
//! surface's multiplicity.

use crate::linalg;
use crate::poly::MultiPoly;
use crate::field::PolyVectorField;
use std::fmt;

/// A basis of a finite-dimensional subspace W of the polynomial ring.
/// Construction checks linear independence over Q(i).
#[derive(Clone, Debug)]
pub struct BasisW {
    elements: Vec<MultiPoly>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BasisError {
    Empty,
    Dependent,
    ArityMismatch,
}

impl fmt::Display for BasisError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisError::Empty => write!(f, "basis must be nonempty"),
            BasisError::Dependent => write!(f, "basis elements are linearly dependent"),
            BasisError::ArityMismatch => write!(f, "basis elements disagree on variable count"),
        }
    }
}

impl std::error::Error for BasisError {}

impl BasisW {
    pub fn new(elements: Vec<MultiPoly>) -> Result<Self, BasisError> {
        if elements.is_empty() {
            return Err(BasisError::Empty);
        }
        let nvars = elements[0].nvars();
        if elements.iter().any(|e| e.nvars() != nvars) {
            return Err(BasisError::ArityMismatch);
        }
        // Coefficient-matrix rank over the union of appearing monomials.
        let mut monomials = std::collections::BTreeSet::new();
        for e in &elements {
            for (m, _) in e.terms() {
                monomials.insert(m.clone());
            }
        }
        let cols: Vec<_> = monomials.into_iter().collect();
        let matrix: Vec<Vec<_>> = elements
            .iter()
            .map(|e| cols.iter().map(|m| e.coeff(m)).collect())
            .collect();
        if linalg::rank(&matrix) != elements.len() {
            return Err(BasisError::Dependent);
        }
        Ok(BasisW { elements })
    }

    pub fn elements(&self) -> &[MultiPoly] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn nvars(&self) -> usize {
        self.elements[0].nvars()
    }
}

#[derive(Clone, Debug)]
pub struct ExtacticResult {
    pub e: MultiPoly,
    pub degenerate: bool,
}

/// E_W(X) via fraction-free Bareiss elimination over the polynomial ring.
/// Row j holds X^j applied to each basis element; iterated derivatives are
/// computed once per column and reused.
pub fn extactic(x: &PolyVectorField, w: &BasisW) -> ExtacticResult {
    assert_eq!(x.nvars(), w.nvars(), "variable count mismatch");
    let l = w.len();
    let mut matrix: Vec<Vec<MultiPoly>> = vec![Vec::with_capacity(l); l];
    for v in w.elements() {
        let mut current = v.clone();
        for (j, row) in matrix.iter_mut().enumerate() {
            if j > 0 {
                current = x.lie_derivative(&current);
            }
            row.push(current.clone());
        }
    }
    let e = det_bareiss(matrix);
    let degenerate = e.is_zero();
    ExtacticResult { e, degenerate }
}

/// Fraction-free Bareiss determinant of a square polynomial matrix. Row
/// pivoting with sign tracking; every interior division is exact.
pub fn det_bareiss(mut m: Vec<Vec<MultiPoly>>) -> MultiPoly {
    let n = m.len();
    assert!(n > 0 && m.iter().all(|r| r.len() == n), "square matrix required");
    let nvars = m[0][0].nvars();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut sign_neg = false;
    let mut prev_pivot = MultiPoly::one(nvars);
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign_neg = !sign_neg;
                }
                None => return MultiPoly::zero(nvars),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&m[i][j] * &m[k][k]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = num
                    .exact_divide(&prev_pivot)
                    .expect("Bareiss division is exact");
            }
            m[i][k] = MultiPoly::zero(nvars);
        }
        prev_pivot = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if sign_neg {
        -det
    } else {
        det
    }
}

/// Cofactor (Laplace) expansion determinant; the independent cross-check for
/// small matrices.
pub fn det_expansion(m: &[Vec<MultiPoly>]) -> MultiPoly {
    let n = m.len();
    assert!(n > 0 && m.iter().all(|r| r.len() == n), "square matrix required");
    let nvars = m[0][0].nvars();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = MultiPoly::zero(nvars);
    for (col, entry) in m[0].iter().enumerate() {
        if entry.is_zero() {
            continue;
        }
        let minor: Vec<Vec<MultiPoly>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(j, _)| *j != col)
                    .map(|(_, e)| e.clone())
                    .collect()
            })
            .collect();
        let term = entry * &det_expansion(&minor);
        acc = if col % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    acc
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MultiplicityError {
    DegenerateExtactic,
    ConstantFactor,
}

impl fmt::Display for MultiplicityError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MultiplicityError::DegenerateExtactic => {
                write!(f, "extactic polynomial is identically zero; multiplicity undefined")
            }
            MultiplicityError::ConstantFactor => write!(f, "factor must be nonconstant"),
        }
    }
}

impl std::error::Error for MultiplicityError {}

/// Greatest k with f^k dividing E; k = 0 when f is no factor at all.
pub fn multiplicity(e: &ExtacticResult, f: &MultiPoly) -> Result<u32, MultiplicityError> {
    if e.degenerate {
        return Err(MultiplicityError::DegenerateExtactic);
    }
    if f.is_constant() {
        return Err(MultiplicityError::ConstantFactor);
    }
    let mut k = 0;
    let mut rest = e.e.clone();
    while let Some(q) = rest.exact_divide(f) {
        k += 1;
        rest = q;
    }
    Ok(k)
}
