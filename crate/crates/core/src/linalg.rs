//! Exact dense linear algebra over the Gaussian rationals: row echelon
//! reduction with partial pivoting on exact norms, rank, null spaces, and
//! affine solves. Everything is small and dense; clarity over cleverness.

use crate::scalar::GaussianRational;

pub type Matrix = Vec<Vec<GaussianRational>>;

/// Reduced row echelon form in place; returns the pivot column indices.
pub fn rref(m: &mut Matrix) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row >= rows {
            break;
        }
        // Partial pivoting on the exact norm |z|^2.
        let mut best: Option<(usize, crate::scalar::Rat)> = None;
        for r in row..rows {
            if !m[r][col].is_zero() {
                let n = m[r][col].norm_sqr();
                if best.as_ref().map(|(_, bn)| n > *bn).unwrap_or(true) {
                    best = Some((r, n));
                }
            }
        }
        let Some((prow, _)) = best else { continue };
        m.swap(row, prow);
        let inv = m[row][col].inv();
        for c in col..cols {
            m[row][c] = &m[row][c] * &inv;
        }
        for r in 0..rows {
            if r != row && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for c in col..cols {
                    let sub = &factor * &m[row][c];
                    m[r][c] = &m[r][c] - &sub;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

pub fn rank(m: &Matrix) -> usize {
    let mut work = m.clone();
    rref(&mut work).len()
}

/// Basis of the null space of `m` (viewed as rows of a homogeneous system),
/// one vector per free column. Each vector is scaled so its first nonzero
/// entry is 1.
pub fn null_space(m: &Matrix) -> Vec<Vec<GaussianRational>> {
    if m.is_empty() {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut work = m.clone();
    let pivots = rref(&mut work);
    let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
    let mut basis = Vec::new();
    for free in (0..cols).filter(|c| !pivot_set.contains(c)) {
        let mut v = vec![GaussianRational::zero(); cols];
        v[free] = GaussianRational::one();
        for (prow, &pcol) in pivots.iter().enumerate() {
            v[pcol] = -work[prow][free].clone();
        }
        normalize_first_nonzero(&mut v);
        basis.push(v);
    }
    basis
}

/// Scale so the first nonzero entry becomes 1.
pub fn normalize_first_nonzero(v: &mut [GaussianRational]) {
    if let Some(lead) = v.iter().find(|c| !c.is_zero()).cloned() {
        let inv = lead.inv();
        for c in v.iter_mut() {
            *c = &*c * &inv;
        }
    }
}

/// One particular solution of `m·x = b` (free variables set to zero), or
/// `None` when the system is inconsistent.
pub fn solve(m: &Matrix, b: &[GaussianRational]) -> Option<Vec<GaussianRational>> {
    assert_eq!(m.len(), b.len(), "row/rhs mismatch");
    if m.is_empty() {
        return Some(Vec::new());
    }
    let cols = m[0].len();
    let mut aug: Matrix = m
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.last().is_some_and(|&p| p == cols) {
        return None; // pivot in the rhs column
    }
    let mut x = vec![GaussianRational::zero(); cols];
    for (prow, &pcol) in pivots.iter().enumerate() {
        x[pcol] = aug[prow][cols].clone();
    }
    Some(x)
}

/// Is `v` in the row span of `basis`?
pub fn in_span(basis: &[Vec<GaussianRational>], v: &[GaussianRational]) -> bool {
    let base_rank = rank(&basis.to_vec());
    let mut extended: Matrix = basis.to_vec();
    extended.push(v.to_vec());
    rank(&extended) == base_rank
}
