//! Lattices with involution, their splitting into the three indecomposable
//! Z[C2]-lattices, and the group of real components of the associated torus.
//!
//! For a lattice `Λ` with involution `T`, write `Λ+ = ker(T - I)` and
//! `Λ- = ker(T + I)`. The components of the based real locus of `(Λ ⊗ R)/Λ`
//! are indexed by the F2-vector space `(Λ- / 2) / π-(Λ)`, where
//! `π- = (I - T)/2`. Scaling by two identifies it with `Λ- / (I - T)Λ`, which
//! is how it is computed here.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::f2::F2Matrix;
use crate::linalg::{
    cokernel_invariants, inverse_unimodular, kernel_basis, smith_normal_form, solve_in_basis,
};
use crate::matrix::IntegerMatrix;

/// Default cost guard for [`component_group_oracle`].
pub const ORACLE_RANK_LIMIT: usize = 16;

/// Confirms `T * T == I`, naming the first offending entry otherwise.
pub fn validate(t: &IntegerMatrix) -> Result<()> {
    if !t.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "involution matrix must be square, got {}x{}",
            t.rows(),
            t.cols()
        )));
    }
    let sq = t * t;
    for i in 0..sq.rows() {
        for j in 0..sq.cols() {
            let expected = if i == j { BigInt::one() } else { BigInt::zero() };
            if sq[(i, j)] != expected {
                return Err(Error::NotAnInvolution { row: i, col: j });
            }
        }
    }
    Ok(())
}

/// A free lattice `Z^n` together with an integral involution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvolutionLattice {
    t: IntegerMatrix,
}

impl InvolutionLattice {
    pub fn new(t: IntegerMatrix) -> Result<Self> {
        validate(&t)?;
        Ok(InvolutionLattice { t })
    }

    /// The involution `[[0, 1], [1, 0]]^c ⊕ diag(1^a, (-1)^b)` in block form:
    /// trivial summands first, then sign, then permutation.
    pub fn standard(n_trivial: usize, n_sign: usize, n_perm: usize) -> Self {
        let mut diag = vec![1; n_trivial];
        diag.extend(std::iter::repeat_n(-1, n_sign));
        let mut t = IntegerMatrix::diagonal(&diag);
        for _ in 0..n_perm {
            t = t.direct_sum(&IntegerMatrix::from_rows(&[[0, 1], [1, 0]]));
        }
        InvolutionLattice { t }
    }

    pub fn rank(&self) -> usize {
        self.t.rows()
    }

    pub fn matrix(&self) -> &IntegerMatrix {
        &self.t
    }

    pub fn into_matrix(self) -> IntegerMatrix {
        self.t
    }

    /// The same lattice with the involution `-T`.
    pub fn negated(&self) -> Self {
        InvolutionLattice { t: -&self.t }
    }

    /// `(I - T)`: column `j` is twice `π-(e_j)`.
    pub fn i_minus_t(&self) -> IntegerMatrix {
        &IntegerMatrix::identity(self.rank()) - &self.t
    }

    /// `(I + T)`: column `j` is twice `π+(e_j)`.
    pub fn i_plus_t(&self) -> IntegerMatrix {
        &IntegerMatrix::identity(self.rank()) + &self.t
    }

    pub fn split(&self) -> SplitData {
        let lambda_plus = kernel_basis(&(&self.t - &IntegerMatrix::identity(self.rank())));
        let lambda_minus = kernel_basis(&self.i_plus_t());
        SplitData { lambda_plus, lambda_minus, pi_minus_numerators: self.i_minus_t() }
    }

    /// Multiplicities of the trivial, sign and permutation summands.
    ///
    /// Computed from ranks of `Λ±` and the F2-rank of `I + T`, then checked
    /// against the order of the component group. A disagreement is an
    /// implementation bug and surfaces as `InternalInconsistency`.
    pub fn decompose(&self, with_witness: bool) -> Result<C2Decomposition> {
        let split = self.split();
        let n_perm = F2Matrix::from_integer(&self.i_plus_t()).rank();
        let plus = split.lambda_plus.cols();
        let minus = split.lambda_minus.cols();
        if plus < n_perm || minus < n_perm || plus + minus != self.rank() {
            return Err(Error::InternalInconsistency(format!(
                "rank(Λ+)={plus}, rank(Λ-)={minus}, n_perm={n_perm} on a rank-{} lattice",
                self.rank()
            )));
        }
        let dec = C2Decomposition {
            n_trivial: plus - n_perm,
            n_sign: minus - n_perm,
            n_perm,
            witness: None,
        };

        let group = component_group_from_split(self, &split)?;
        if group.f2_rank != dec.n_sign {
            return Err(Error::InternalInconsistency(format!(
                "component group has F2-rank {} but the decomposition has {} sign summands",
                group.f2_rank, dec.n_sign
            )));
        }

        if with_witness {
            let w = decomposition_witness(self, &split)?;
            let dec = C2Decomposition { witness: Some(w), ..dec };
            dec.check_witness(self)?;
            return Ok(dec);
        }
        Ok(dec)
    }

    pub fn component_group(&self) -> Result<ComponentGroup> {
        component_group_from_split(self, &self.split())
    }

    /// Order of the component group by closure over F2 cosets, with no use of
    /// the Smith-form code.
    pub fn component_group_oracle(&self, rank_limit: usize) -> Result<u64> {
        component_group_oracle(&self.t, rank_limit)
    }
}

/// Saturated bases of the eigenlattices and the numerators of `π-`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitData {
    /// Columns span `Λ+ = ker(T - I)`.
    pub lambda_plus: IntegerMatrix,
    /// Columns span `Λ- = ker(T + I)`.
    pub lambda_minus: IntegerMatrix,
    /// Column `j` is `e_j - T e_j`, i.e. `π-(e_j)` over the denominator 2.
    pub pi_minus_numerators: IntegerMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct C2Decomposition {
    pub n_trivial: usize,
    pub n_sign: usize,
    pub n_perm: usize,
    /// Unimodular `W` with `W^-1 T W` block diagonal: `[1]^a`, then
    /// `[-1]^b`, then `[[0,1],[1,0]]^c`.
    #[serde(skip)]
    pub witness: Option<IntegerMatrix>,
}

impl C2Decomposition {
    pub fn rank(&self) -> usize {
        self.n_trivial + self.n_sign + 2 * self.n_perm
    }

    pub fn as_tuple(&self) -> (usize, usize, usize) {
        (self.n_trivial, self.n_sign, self.n_perm)
    }

    fn check_witness(&self, lattice: &InvolutionLattice) -> Result<()> {
        let Some(w) = &self.witness else { return Ok(()) };
        let block = InvolutionLattice::standard(self.n_trivial, self.n_sign, self.n_perm);
        if !w.is_unimodular() || lattice.matrix() * w != w * block.matrix() {
            return Err(Error::InternalInconsistency(
                "decomposition witness does not conjugate T to block form".into(),
            ));
        }
        Ok(())
    }
}

/// The F2-vector space `(Λ-/2)/π-(Λ)`.
///
/// Elements are stored as integer numerators over the common denominator 2:
/// a generator `g` stands for the half-lattice point `g/2`, with `g ∈ Λ-`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentGroup {
    pub f2_rank: usize,
    /// Numerators of a basis of the group, each in `Λ-`.
    #[serde(serialize_with = "crate::json::big::vec2")]
    pub generators: Vec<Vec<BigInt>>,
    /// Invariant factors of `Λ- / (I - T)Λ` larger than one. Always all 2.
    #[serde(serialize_with = "crate::json::big::vec")]
    pub invariant_factors: Vec<BigInt>,
}

impl ComponentGroup {
    /// Number of components of the based real locus, `2^f2_rank`.
    pub fn order(&self) -> BigInt {
        BigInt::one() << self.f2_rank
    }

    /// Numerator of the representative indexed by the bits of `mask`.
    pub fn representative(&self, mask: u64) -> Vec<BigInt> {
        let n = self.generators.first().map_or(0, Vec::len);
        let mut acc = vec![BigInt::zero(); n];
        for (i, g) in self.generators.iter().enumerate() {
            if i < 64 && (mask >> i) & 1 == 1 {
                for (a, x) in acc.iter_mut().zip(g) {
                    *a += x;
                }
            }
        }
        acc
    }

    /// All `2^f2_rank` representatives, the zero class first.
    ///
    /// Panics when `f2_rank >= 64`; callers guard the size first.
    pub fn representatives(&self) -> impl Iterator<Item = Vec<BigInt>> + '_ {
        assert!(self.f2_rank < 64, "too many representatives to enumerate");
        (0..(1u64 << self.f2_rank)).map(move |m| self.representative(m))
    }
}

fn component_group_from_split(lattice: &InvolutionLattice, split: &SplitData) -> Result<ComponentGroup> {
    let n = lattice.rank();
    let k = &split.lambda_minus;
    if k.cols() == 0 {
        return Ok(ComponentGroup { f2_rank: 0, generators: vec![], invariant_factors: vec![] });
    }
    // (I - T)Λ ⊂ Λ-, expressed in the Λ- basis.
    let coords = solve_in_basis(k, &split.pi_minus_numerators)?;
    let inv = cokernel_invariants(&coords);
    if inv.free_rank != 0 || inv.torsion.iter().any(|d| *d != BigInt::from(2)) {
        return Err(Error::InternalInconsistency(format!(
            "Λ-/(I-T)Λ has invariants {:?} and free rank {} on a rank-{n} lattice",
            inv.torsion, inv.free_rank
        )));
    }

    let snf = smith_normal_form(&coords);
    let u_inv = inverse_unimodular(&snf.u)?;
    let factors = snf.invariant_factors();
    let mut generators = Vec::new();
    for (i, d) in factors.iter().enumerate() {
        if *d == BigInt::from(2) {
            generators.push(k.mul_vec(&u_inv.column(i)));
        }
    }
    Ok(ComponentGroup { f2_rank: generators.len(), generators, invariant_factors: inv.torsion })
}

/// Unimodular change of basis exhibiting the block decomposition.
fn decomposition_witness(lattice: &InvolutionLattice, split: &SplitData) -> Result<IntegerMatrix> {
    let n = lattice.rank();
    let t = lattice.matrix();

    // Bases of Λ± adapted to the images of (I ± T): the first c columns are
    // hit exactly, the rest only up to a factor of two.
    let adapt = |basis: &IntegerMatrix, image: &IntegerMatrix| -> Result<(IntegerMatrix, IntegerMatrix, usize)> {
        if basis.cols() == 0 {
            return Ok((basis.clone(), IntegerMatrix::zeros(n, 0), 0));
        }
        let coords = solve_in_basis(basis, image)?;
        let snf = smith_normal_form(&coords);
        let adapted = basis * &inverse_unimodular(&snf.u)?;
        let ones = snf.invariant_factors().iter().take_while(|d| d.is_one()).count();
        let preimages = snf.v.select_columns(&(0..ones).collect::<Vec<_>>());
        Ok((adapted, preimages, ones))
    };
    let (plus, pre_plus, c) = adapt(&split.lambda_plus, &lattice.i_plus_t())?;
    let (minus, _, c_minus) = adapt(&split.lambda_minus, &lattice.i_minus_t())?;
    if c != c_minus {
        return Err(Error::InternalInconsistency(format!(
            "(I+T) and (I-T) images disagree on the permutation count: {c} vs {c_minus}"
        )));
    }

    // x_j with (I+T) x_j = p_j; (I-T) x_j is determined mod 2Λ- by the glue.
    let xs = pre_plus;
    let v = &lattice.i_minus_t() * &xs;
    let v_coords = solve_in_basis(&minus, &v)?;
    let mut psi = F2Matrix::zeros(c, c);
    for i in 0..c {
        for j in 0..c {
            psi.set(i, j, v_coords[(i, j)].is_odd());
        }
    }
    let lift = lift_f2_invertible(&psi)?;

    // Replace v_j by an integral lift of its class that completes a basis of Λ-.
    let first_c = minus.select_columns(&(0..c).collect::<Vec<_>>());
    let target = &first_c * &lift;
    let mut columns: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for j in c..plus.cols() {
        columns.push(plus.column(j));
    }
    for j in c..minus.cols() {
        columns.push(minus.column(j));
    }
    for j in 0..c {
        let x = xs.column(j);
        let x: Vec<BigInt> = x
            .iter()
            .zip(target.column(j))
            .zip(v.column(j))
            .map(|((xi, ti), vi)| {
                let (q, r) = (ti - vi).div_rem(&BigInt::from(2));
                debug_assert!(r.is_zero());
                xi + q
            })
            .collect();
        let tx = t.mul_vec(&x);
        columns.push(x);
        columns.push(tx);
    }
    Ok(IntegerMatrix::from_columns(n, &columns))
}

/// An integer unimodular matrix reducing to the given invertible F2 matrix.
fn lift_f2_invertible(psi: &F2Matrix) -> Result<IntegerMatrix> {
    let c = psi.rows();
    // Reduce psi to the identity by row operations, then replay those
    // operations as integer column operations on the identity.
    let mut a = psi.clone();
    let mut ops: Vec<(usize, usize, bool)> = Vec::new(); // (dst, src, is_swap)
    for j in 0..c {
        let Some(p) = (j..c).find(|&i| a.get(i, j)) else {
            return Err(Error::InternalInconsistency("glue map is singular mod 2".into()));
        };
        if p != j {
            for col in 0..c {
                let (x, y) = (a.get(j, col), a.get(p, col));
                a.set(j, col, y);
                a.set(p, col, x);
            }
            ops.push((j, p, true));
        }
        for i in 0..c {
            if i != j && a.get(i, j) {
                for col in 0..c {
                    let s = a.get(i, col) ^ a.get(j, col);
                    a.set(i, col, s);
                }
                ops.push((i, j, false));
            }
        }
    }
    // E_r ... E_1 psi = I, so psi = E_1 ... E_r over F2 (each E is its own inverse).
    let mut lift = IntegerMatrix::identity(c);
    for &(dst, src, swap) in &ops {
        // right-multiplying by E acts on columns: swap, or col[src] += col[dst]
        if swap {
            lift.swap_cols(dst, src);
        } else {
            lift.add_col_multiple(src, dst, &BigInt::one());
        }
    }
    debug_assert_eq!(&F2Matrix::from_integer(&lift), psi);
    Ok(lift)
}

/// Order of `Λ-/(I-T)Λ`, computed entirely over F2 by enumeration.
///
/// With `K = ker(I + T mod 2)` and `S = Λ+ mod 2` the group is `K / S`.
/// `S` is spanned by the columns of `I + T` together with `(I + T)w / 2` for
/// every 0/1 lift `w` of an element of `K`; the quotient is counted by
/// breadth-first closure of cosets.
pub fn component_group_oracle(t: &IntegerMatrix, rank_limit: usize) -> Result<u64> {
    validate(t)?;
    let n = t.rows();
    if n > rank_limit || n > 24 {
        return Err(Error::RankGuardExceeded { rank: n, limit: rank_limit.min(24) });
    }
    // (I + T) mod 4 as small integers.
    let four = BigInt::from(4);
    let a: Vec<Vec<u8>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let x = if i == j { &t[(i, j)] + 1 } else { t[(i, j)].clone() };
                    x.mod_floor(&four).to_u8().expect("residue mod 4")
                })
                .collect()
        })
        .collect();
    let apply_mod4 = |w: u32| -> Vec<u8> {
        (0..n)
            .map(|i| (0..n).filter(|&j| (w >> j) & 1 == 1).map(|j| a[i][j]).sum::<u8>() % 4)
            .collect()
    };
    let pack = |v: &[u8], shift: u8| -> u32 {
        v.iter().enumerate().fold(0u32, |acc, (i, &x)| acc | ((((x >> shift) & 1) as u32) << i))
    };

    let kernel: Vec<u32> = (0u32..(1u32 << n)).filter(|&w| pack(&apply_mod4(w), 0) == 0).collect();

    let mut gens: Vec<u32> = (0..n).map(|j| pack(&apply_mod4(1 << j), 0)).collect();
    gens.extend(kernel.iter().map(|&w| pack(&apply_mod4(w), 1)));

    // Closure of the subgroup S.
    let mut in_s = vec![false; 1usize << n];
    in_s[0] = true;
    let mut queue = std::collections::VecDeque::from([0u32]);
    while let Some(x) = queue.pop_front() {
        for &g in &gens {
            let y = x ^ g;
            if !in_s[y as usize] {
                in_s[y as usize] = true;
                queue.push_back(y);
            }
        }
    }
    let subgroup: Vec<u32> = (0u32..(1u32 << n)).filter(|&x| in_s[x as usize]).collect();

    // Count cosets x + S inside K.
    let mut seen = vec![false; 1usize << n];
    let mut cosets = 0u64;
    for &x in &kernel {
        if seen[x as usize] {
            continue;
        }
        cosets += 1;
        for &s in &subgroup {
            seen[(x ^ s) as usize] = true;
        }
    }
    Ok(cosets)
}
