//! Exact integer linear algebra: Smith and Hermite normal forms, integer
//! kernels, cokernel invariants, and solving inside saturated sublattices.
//!
//! Pivoting is deterministic: the pivot is the entry of smallest nonzero
//! absolute value in the active submatrix, ties broken row-major.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::IntegerMatrix;

/// `u * m * v == d` with `u`, `v` unimodular and `d` in Smith normal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    pub u: IntegerMatrix,
    pub d: IntegerMatrix,
    pub v: IntegerMatrix,
}

impl SmithForm {
    /// The nonzero diagonal entries `d_1 | d_2 | ...`.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        let r = self.d.rows().min(self.d.cols());
        (0..r).map(|i| self.d[(i, i)].clone()).take_while(|x| !x.is_zero()).collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

/// Invariant factors of `Z^n / image(M)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CokernelInvariants {
    /// Torsion invariant factors, all greater than one, in divisibility order.
    #[serde(serialize_with = "crate::json::big::vec")]
    pub torsion: Vec<BigInt>,
    pub free_rank: usize,
}

impl CokernelInvariants {
    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    /// Number of elements when the cokernel is finite.
    pub fn order(&self) -> Option<BigInt> {
        self.is_finite().then(|| self.torsion.iter().product())
    }
}

fn smallest_nonzero(d: &IntegerMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, BigInt)> = None;
    for i in t..d.rows() {
        for j in t..d.cols() {
            let x = &d[(i, j)];
            if x.is_zero() {
                continue;
            }
            let a = x.abs();
            if best.as_ref().is_none_or(|(_, _, b)| a < *b) {
                best = Some((i, j, a));
            }
        }
    }
    best.map(|(i, j, _)| (i, j))
}

/// Smith normal form with unimodular transforms. Total on every integer matrix.
pub fn smith_normal_form(m: &IntegerMatrix) -> SmithForm {
    let (rows, cols) = (m.rows(), m.cols());
    let mut d = m.clone();
    let mut u = IntegerMatrix::identity(rows);
    let mut v = IntegerMatrix::identity(cols);

    for t in 0..rows.min(cols) {
        loop {
            let Some((pi, pj)) = smallest_nonzero(&d, t) else {
                return SmithForm { u, d, v };
            };
            d.swap_rows(t, pi);
            u.swap_rows(t, pi);
            d.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let pivot = d[(t, t)].clone();
            let mut clean = true;
            for i in t + 1..rows {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let q = -d[(i, t)].div_floor(&pivot);
                d.add_row_multiple(i, t, &q);
                u.add_row_multiple(i, t, &q);
                clean &= d[(i, t)].is_zero();
            }
            for j in t + 1..cols {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let q = -d[(t, j)].div_floor(&pivot);
                d.add_col_multiple(j, t, &q);
                v.add_col_multiple(j, t, &q);
                clean &= d[(t, j)].is_zero();
            }
            if !clean {
                continue;
            }

            // The pivot must divide the whole remaining block.
            let offender = (t + 1..rows)
                .find(|&i| (t + 1..cols).any(|j| !d[(i, j)].is_multiple_of(&pivot)));
            match offender {
                Some(i) => {
                    d.add_row_multiple(t, i, &BigInt::one());
                    u.add_row_multiple(t, i, &BigInt::one());
                }
                None => break,
            }
        }
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    SmithForm { u, d, v }
}

/// Row-style Hermite normal form `h = w * m` with `w` unimodular.
///
/// Pivots are positive and entries above each pivot are reduced into
/// `[0, pivot)`. Zero rows come last.
pub fn hermite_normal_form(m: &IntegerMatrix) -> (IntegerMatrix, IntegerMatrix) {
    let (rows, cols) = (m.rows(), m.cols());
    let mut h = m.clone();
    let mut w = IntegerMatrix::identity(rows);
    let mut p = 0;
    for j in 0..cols {
        if p == rows {
            break;
        }
        loop {
            let pick = (p..rows)
                .filter(|&i| !h[(i, j)].is_zero())
                .min_by(|&a, &b| h[(a, j)].abs().cmp(&h[(b, j)].abs()).then(a.cmp(&b)));
            let Some(pi) = pick else { break };
            h.swap_rows(p, pi);
            w.swap_rows(p, pi);
            let pivot = h[(p, j)].clone();
            let mut done = true;
            for i in p + 1..rows {
                if h[(i, j)].is_zero() {
                    continue;
                }
                let q = -h[(i, j)].div_floor(&pivot);
                h.add_row_multiple(i, p, &q);
                w.add_row_multiple(i, p, &q);
                done &= h[(i, j)].is_zero();
            }
            if done {
                break;
            }
        }
        if h[(p, j)].is_zero() {
            continue;
        }
        if h[(p, j)].is_negative() {
            h.negate_row(p);
            w.negate_row(p);
        }
        let pivot = h[(p, j)].clone();
        for i in 0..p {
            let q = -h[(i, j)].div_floor(&pivot);
            h.add_row_multiple(i, p, &q);
            w.add_row_multiple(i, p, &q);
        }
        p += 1;
    }
    (h, w)
}

/// Columns form a saturated basis of `{x : M x = 0}`, in column Hermite form.
pub fn kernel_basis(m: &IntegerMatrix) -> IntegerMatrix {
    let snf = smith_normal_form(m);
    let rank = snf.rank();
    let free: Vec<usize> = (rank..m.cols()).collect();
    let raw = snf.v.select_columns(&free);
    let (h, _) = hermite_normal_form(&raw.transpose());
    h.transpose()
}

/// Invariant factors and free rank of `Z^rows / image(M)`.
pub fn cokernel_invariants(m: &IntegerMatrix) -> CokernelInvariants {
    let snf = smith_normal_form(m);
    let factors = snf.invariant_factors();
    let free_rank = m.rows() - factors.len();
    CokernelInvariants { torsion: factors.into_iter().filter(|d| !d.is_one()).collect(), free_rank }
}

pub fn rank(m: &IntegerMatrix) -> usize {
    smith_normal_form(m).rank()
}

/// True when the columns span a saturated sublattice of full column rank.
pub fn is_saturated_basis(k: &IntegerMatrix) -> bool {
    let f = smith_normal_form(k).invariant_factors();
    f.len() == k.cols() && f.iter().all(One::is_one)
}

/// Integer solution `c` of `basis * c == targets`, column by column.
///
/// Fails when some target column is not an integer combination of the basis
/// columns. The basis must have full column rank.
pub fn solve_in_basis(basis: &IntegerMatrix, targets: &IntegerMatrix) -> Result<IntegerMatrix> {
    if basis.rows() != targets.rows() {
        return Err(Error::DimensionMismatch(format!(
            "basis has {} rows, targets have {}",
            basis.rows(),
            targets.rows()
        )));
    }
    let snf = smith_normal_form(basis);
    let factors = snf.invariant_factors();
    if factors.len() != basis.cols() {
        return Err(Error::DimensionMismatch("basis columns are linearly dependent".into()));
    }
    let y = &snf.u * targets;
    let mut z = IntegerMatrix::zeros(basis.cols(), targets.cols());
    for c in 0..targets.cols() {
        for (i, d) in factors.iter().enumerate() {
            let (q, r) = y[(i, c)].div_rem(d);
            if !r.is_zero() {
                return Err(Error::InternalInconsistency(format!(
                    "target column {c} is not in the integer span of the basis"
                )));
            }
            z[(i, c)] = q;
        }
        if (factors.len()..y.rows()).any(|i| !y[(i, c)].is_zero()) {
            return Err(Error::InternalInconsistency(format!(
                "target column {c} is not in the rational span of the basis"
            )));
        }
    }
    Ok(&snf.v * &z)
}

/// Extends a saturated basis `k` (n x m) to a unimodular `n x n` matrix whose
/// first `m` columns are `k`. Returns the matrix and its inverse.
pub fn extend_to_unimodular(k: &IntegerMatrix) -> Result<(IntegerMatrix, IntegerMatrix)> {
    let n = k.rows();
    let m = k.cols();
    let snf = smith_normal_form(k);
    let f = snf.invariant_factors();
    if f.len() != m || !f.iter().all(One::is_one) {
        return Err(Error::DimensionMismatch("basis is not saturated".into()));
    }
    // u k v = [I; 0], so k = u^-1 [v^-1; 0]. Columns m.. of u^-1 complete k.
    let u_inv = inverse_unimodular(&snf.u)?;
    let mut full = IntegerMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..m {
            full[(i, j)] = k[(i, j)].clone();
        }
        for j in m..n {
            full[(i, j)] = u_inv[(i, j)].clone();
        }
    }
    let inv = inverse_unimodular(&full)?;
    Ok((full, inv))
}

/// Inverse of a unimodular matrix, exact.
pub fn inverse_unimodular(a: &IntegerMatrix) -> Result<IntegerMatrix> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch("inverse of a non-square matrix".into()));
    }
    let snf = smith_normal_form(a);
    let f = snf.invariant_factors();
    if f.len() != a.rows() || !f.iter().all(One::is_one) {
        return Err(Error::DimensionMismatch("matrix is not unimodular".into()));
    }
    // u a v = I  =>  a^-1 = v u
    Ok(&snf.v * &snf.u)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_snf(m: &IntegerMatrix) -> SmithForm {
        let s = smith_normal_form(m);
        assert_eq!(&(&s.u * m) * &s.v, s.d);
        assert!(s.u.is_unimodular());
        assert!(s.v.is_unimodular());
        let f = s.invariant_factors();
        for w in f.windows(2) {
            assert!(w[1].is_multiple_of(&w[0]));
        }
        assert!(f.iter().all(|x| x.is_positive()));
        for i in 0..s.d.rows() {
            for j in 0..s.d.cols() {
                if i != j || i >= f.len() {
                    assert!(s.d[(i, j)].is_zero());
                }
            }
        }
        s
    }

    #[test]
    fn snf_zero_one_by_one() {
        let s = check_snf(&IntegerMatrix::from_rows(&[[0]]));
        assert_eq!(s.d, IntegerMatrix::from_rows(&[[0]]));
    }

    #[test]
    fn snf_diag_two_three() {
        let s = check_snf(&IntegerMatrix::from_rows(&[[2, 0], [0, 3]]));
        assert_eq!(s.d, IntegerMatrix::from_rows(&[[1, 0], [0, 6]]));
    }

    #[test]
    fn snf_identity() {
        for n in 0..5 {
            let s = check_snf(&IntegerMatrix::identity(n));
            assert_eq!(s.d, IntegerMatrix::identity(n));
        }
    }

    #[test]
    fn snf_rectangular() {
        let m = IntegerMatrix::from_rows(&[[2, 4, 4], [-6, 6, 12], [10, -4, -16]]);
        let s = check_snf(&m);
        assert_eq!(s.invariant_factors(), vec![2.into(), 6.into(), 12.into()]);
        check_snf(&IntegerMatrix::from_rows(&[[1, 2, 3, 4], [5, 6, 7, 8]]));
        check_snf(&IntegerMatrix::zeros(3, 0));
        check_snf(&IntegerMatrix::zeros(0, 2));
    }

    #[test]
    fn kernel_of_row_one_one() {
        let k = kernel_basis(&IntegerMatrix::from_rows(&[[1, 1]]));
        assert_eq!(k.cols(), 1);
        let v = k.column(0);
        assert!(v == vec![1.into(), (-1).into()] || v == vec![(-1).into(), 1.into()]);
    }

    #[test]
    fn kernel_extremes() {
        assert_eq!(kernel_basis(&IntegerMatrix::identity(3)).cols(), 0);
        let k = kernel_basis(&IntegerMatrix::zeros(2, 2));
        assert_eq!(k.cols(), 2);
        assert!(is_saturated_basis(&k));
    }

    #[test]
    fn kernel_is_saturated() {
        // x + 2y + 4z = 0 has a saturated kernel of rank 2 not spanned by small multiples.
        let m = IntegerMatrix::from_rows(&[[2, 4, 8]]);
        let k = kernel_basis(&m);
        assert_eq!(k.cols(), 2);
        assert!((&m * &k).is_zero());
        assert!(is_saturated_basis(&k));
    }

    #[test]
    fn cokernel_examples() {
        let c = cokernel_invariants(&IntegerMatrix::from_rows(&[[2]]));
        assert_eq!(c, CokernelInvariants { torsion: vec![2.into()], free_rank: 0 });
        let c = cokernel_invariants(&IntegerMatrix::identity(2));
        assert_eq!(c, CokernelInvariants { torsion: vec![], free_rank: 0 });
        let c = cokernel_invariants(&IntegerMatrix::from_rows(&[[2, 0], [0, 2]]));
        assert_eq!(c.torsion, vec![BigInt::from(2), BigInt::from(2)]);
        assert_eq!(c.order(), Some(BigInt::from(4)));
        let c = cokernel_invariants(&IntegerMatrix::from_rows(&[[3], [0]]));
        assert_eq!(c, CokernelInvariants { torsion: vec![3.into()], free_rank: 1 });
    }

    #[test]
    fn hermite_is_echelon() {
        let m = IntegerMatrix::from_rows(&[[4, 6, 2], [2, 3, 5], [6, 9, 7]]);
        let (h, w) = hermite_normal_form(&m);
        assert_eq!(&w * &m, h);
        assert!(w.is_unimodular());
        assert_eq!(h, IntegerMatrix::from_rows(&[[2, 3, 5], [0, 0, 8], [0, 0, 0]]));
    }

    #[test]
    fn solve_and_extend() {
        let k = IntegerMatrix::from_rows(&[[1], [-1], [0]]);
        let x = IntegerMatrix::from_rows(&[[3], [-3], [0]]);
        assert_eq!(solve_in_basis(&k, &x).unwrap(), IntegerMatrix::from_rows(&[[3]]));
        assert!(solve_in_basis(&k, &IntegerMatrix::from_rows(&[[1], [0], [0]])).is_err());
        let (full, inv) = extend_to_unimodular(&k).unwrap();
        assert!((&full * &inv).is_identity());
        assert_eq!(full.select_columns(&[0]), k);
    }
}
