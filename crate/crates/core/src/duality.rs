//! Dual lattices with involution and the mod-2 pairing between their
//! component groups.
//!
//! The pairing `⟨λ, λ∨⟩ = λ∨ᵀ P λ` with `P` unimodular induces
//! `(λ/2, λ∨/2) ↦ ⟨λ, λ∨⟩ mod 2` on the component groups. It is well defined
//! when `P T = T∨ᵀ P`: shifting `λ` by `(I - T)μ` changes the value by
//! `⟨μ, (I - T∨)λ∨⟩ = 2⟨μ, λ∨⟩`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::f2::F2Matrix;
use crate::involution::{ComponentGroup, InvolutionLattice};
use crate::matrix::IntegerMatrix;
use crate::random;

/// Cost guard for the exhaustive arm of [`verify_perfect`].
pub const PERFECT_RANK_LIMIT: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualPair {
    pub lattice: InvolutionLattice,
    pub dual: InvolutionLattice,
    pub pairing: IntegerMatrix,
}

impl DualPair {
    pub fn new(lattice: InvolutionLattice, dual: InvolutionLattice, pairing: IntegerMatrix) -> Result<Self> {
        let n = lattice.rank();
        if dual.rank() != n || pairing.rows() != n || pairing.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "lattice rank {n}, dual rank {}, pairing {}x{}",
                dual.rank(),
                pairing.rows(),
                pairing.cols()
            )));
        }
        if !pairing.is_unimodular() {
            return Err(Error::DimensionMismatch("pairing matrix is not unimodular".into()));
        }
        let pair = DualPair { lattice, dual, pairing };
        pair.check_adjoint()?;
        Ok(pair)
    }

    /// `P T == T∨ᵀ P`, reporting the first differing entry.
    pub fn check_adjoint(&self) -> Result<()> {
        let lhs = &self.pairing * self.lattice.matrix();
        let rhs = &self.dual.matrix().transpose() * &self.pairing;
        for i in 0..lhs.rows() {
            for j in 0..lhs.cols() {
                if lhs[(i, j)] != rhs[(i, j)] {
                    return Err(Error::AdjointnessViolation { row: i, col: j });
                }
            }
        }
        Ok(())
    }

    /// `⟨λ, λ∨⟩ = λ∨ᵀ P λ`.
    pub fn evaluate(&self, lambda: &[BigInt], lambda_dual: &[BigInt]) -> BigInt {
        let p_lambda = self.pairing.mul_vec(lambda);
        lambda_dual.iter().zip(&p_lambda).fold(BigInt::zero(), |acc, (a, b)| acc + a * b)
    }

    /// Re-expresses both sides in new bases: `λ = A λ'` and `λ∨ = B λ∨'`.
    ///
    /// `a`, `b` are unimodular with the given inverses.
    pub fn change_bases(
        &self,
        (a, a_inv): (&IntegerMatrix, &IntegerMatrix),
        (b, b_inv): (&IntegerMatrix, &IntegerMatrix),
    ) -> Result<DualPair> {
        let t = &(a_inv * self.lattice.matrix()) * a;
        let td = &(b_inv * self.dual.matrix()) * b;
        let p = &(&b.transpose() * &self.pairing) * a;
        DualPair::new(InvolutionLattice::new(t)?, InvolutionLattice::new(td)?, p)
    }
}

/// `(L, Lᵀ, I)`: the dual involution is the transpose in the dual basis.
pub fn standard_dual(lattice: &InvolutionLattice) -> DualPair {
    let dual = InvolutionLattice::new(lattice.matrix().transpose())
        .expect("transpose of an involution is an involution");
    DualPair { lattice: lattice.clone(), dual, pairing: IntegerMatrix::identity(lattice.rank()) }
}

/// Random `DualPair` obtained from `standard_dual` by independent
/// unimodular changes of basis on both sides.
pub fn random_dual_pair<R: Rng>(lattice: &InvolutionLattice, rng: &mut R) -> DualPair {
    let n = lattice.rank();
    let (a, a_inv) = random::unimodular(n, 2 * n + 2, rng);
    let (b, b_inv) = random::unimodular(n, 2 * n + 2, rng);
    standard_dual(lattice)
        .change_bases((&a, &a_inv), (&b, &b_inv))
        .expect("contragredient change of basis preserves adjointness")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct F2Pairing {
    pub rank_lattice: usize,
    pub rank_dual: usize,
    /// Entry `(i, j)` is `⟨g_i, g∨_j⟩ mod 2` on the chosen generators.
    pub gram: Vec<Vec<u8>>,
    pub perfect: bool,
    #[serde(skip)]
    pub lattice_group: ComponentGroup,
    #[serde(skip)]
    pub dual_group: ComponentGroup,
}

impl F2Pairing {
    pub fn gram_matrix(&self) -> F2Matrix {
        let mut m = F2Matrix::zeros(self.rank_lattice, self.rank_dual);
        for (i, row) in self.gram.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                m.set(i, j, x == 1);
            }
        }
        m
    }
}

fn gram_of(pair: &DualPair, left: &[Vec<BigInt>], right: &[Vec<BigInt>]) -> Vec<Vec<u8>> {
    left.iter()
        .map(|l| right.iter().map(|r| pair.evaluate(l, r).is_odd() as u8).collect())
        .collect()
}

/// Gram matrix of the induced pairing on component-group generators.
pub fn induced_pairing(pair: &DualPair) -> Result<F2Pairing> {
    pair.check_adjoint()?;
    let lattice_group = pair.lattice.component_group()?;
    let dual_group = pair.dual.component_group()?;
    let gram = gram_of(pair, &lattice_group.generators, &dual_group.generators);
    let mut out = F2Pairing {
        rank_lattice: lattice_group.f2_rank,
        rank_dual: dual_group.f2_rank,
        gram,
        perfect: false,
        lattice_group,
        dual_group,
    };
    let g = out.gram_matrix();
    out.perfect = out.rank_lattice == out.rank_dual && g.rank() == out.rank_lattice;
    Ok(out)
}

/// Recomputes the Gram matrix after shifting every representative by a
/// random element of `(I - T)Λ` (resp. `(I - T∨)Λ∨`) and reports whether it
/// is unchanged.
pub fn gram_is_well_defined<R: Rng>(pair: &DualPair, pairing: &F2Pairing, trials: usize, rng: &mut R) -> bool {
    let shift_l = pair.lattice.i_minus_t();
    let shift_d = pair.dual.i_minus_t();
    let shifted = |gens: &[Vec<BigInt>], m: &IntegerMatrix, rng: &mut R| -> Vec<Vec<BigInt>> {
        gens.iter()
            .map(|g| {
                let s = random::image_element(m, rng);
                g.iter().zip(&s).map(|(a, b)| a + b).collect()
            })
            .collect()
    };
    (0..trials).all(|_| {
        let l = shifted(&pairing.lattice_group.generators, &shift_l, rng);
        let d = shifted(&pairing.dual_group.generators, &shift_d, rng);
        gram_of(pair, &l, &d) == pairing.gram
    })
}

/// One explicit witness of nondegeneracy: a class and a partner with odd pairing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CertificateEntry {
    /// Numerator of the class `λ/2` in the lattice.
    #[serde(serialize_with = "crate::json::big::vec")]
    pub class: Vec<BigInt>,
    /// Numerator of the partner `λ∨/2` in the dual lattice.
    #[serde(serialize_with = "crate::json::big::vec")]
    pub partner: Vec<BigInt>,
    /// `⟨λ, λ∨⟩`, odd.
    #[serde(serialize_with = "crate::json::big::serialize")]
    pub value: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PerfectnessReport {
    pub perfect: bool,
    pub by_rank: bool,
    pub by_enumeration: bool,
    /// For each generator of the lattice side, its dual-basis partner.
    pub certificate: Vec<CertificateEntry>,
    #[serde(skip)]
    pub pairing: F2Pairing,
}

/// Perfectness by F2-rank and, independently, by exhausting every nonzero
/// class on each side and finding a partner with odd pairing.
pub fn verify_perfect(pair: &DualPair) -> Result<PerfectnessReport> {
    let pairing = induced_pairing(pair)?;
    let (r, rd) = (pairing.rank_lattice, pairing.rank_dual);
    if r.max(rd) > PERFECT_RANK_LIMIT {
        return Err(Error::RankGuardExceeded { rank: r.max(rd), limit: PERFECT_RANK_LIMIT });
    }
    let by_rank = pairing.perfect;

    let g = pairing.gram_matrix();
    let gt = g.transpose();
    let nondegenerate = |m: &F2Matrix, size: usize| -> bool {
        (1u64..(1u64 << size)).all(|mask| m.row_combination(mask).iter().any(|&w| w != 0))
    };
    let by_enumeration = r == rd && nondegenerate(&g, r) && nondegenerate(&gt, rd);
    if by_rank != by_enumeration {
        return Err(Error::InternalInconsistency(format!(
            "rank test says {by_rank}, enumeration says {by_enumeration}"
        )));
    }

    let mut certificate = Vec::new();
    if by_rank {
        // Columns of G^-1 pick, for each generator, a dual class pairing to 1
        // with it and to 0 with the other generators.
        let inv = g.inverse().expect("perfect Gram matrix is invertible");
        for i in 0..r {
            let mask: u64 = (0..rd).filter(|&j| inv.get(j, i)).fold(0, |m, j| m | (1 << j));
            let partner = pairing.dual_group.representative(mask);
            let class = pairing.lattice_group.generators[i].clone();
            let value = pair.evaluate(&class, &partner);
            if !value.is_odd() {
                return Err(Error::InternalInconsistency("certificate partner pairs evenly".into()));
            }
            certificate.push(CertificateEntry { class, partner, value });
        }
    }
    Ok(PerfectnessReport { perfect: by_rank, by_rank, by_enumeration, certificate, pairing })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::rng;

    fn lattice(rows: &[&[i64]]) -> InvolutionLattice {
        InvolutionLattice::new(IntegerMatrix::from_rows(rows)).unwrap()
    }

    #[test]
    fn standard_dual_is_transpose() {
        let d = standard_dual(&lattice(&[&[-1]]));
        assert_eq!(d.dual.matrix(), &IntegerMatrix::from_rows(&[[-1]]));
        let swap = lattice(&[&[0, 1], &[1, 0]]);
        assert_eq!(standard_dual(&swap).dual.matrix(), swap.matrix());
        let sheared = lattice(&[&[1, 1], &[0, -1]]);
        let d = standard_dual(&sheared);
        assert_eq!(d.dual.matrix(), &IntegerMatrix::from_rows(&[[1, 0], [1, -1]]));
        assert!(d.check_adjoint().is_ok());
    }

    #[test]
    fn sign_sum_gram_is_identity() {
        let p = induced_pairing(&standard_dual(&lattice(&[&[-1, 0], &[0, -1]]))).unwrap();
        assert_eq!(p.gram, vec![vec![1, 0], vec![0, 1]]);
        assert!(p.perfect);
    }

    #[test]
    fn permutation_module_is_vacuously_perfect() {
        let r = verify_perfect(&standard_dual(&lattice(&[&[0, 1], &[1, 0]]))).unwrap();
        assert!(r.perfect && r.by_enumeration);
        assert_eq!(r.pairing.rank_lattice, 0);
        assert!(r.certificate.is_empty());
    }

    #[test]
    fn sign_module_certificate() {
        let r = verify_perfect(&standard_dual(&lattice(&[&[-1]]))).unwrap();
        assert!(r.perfect);
        assert_eq!(r.certificate.len(), 1);
        let c = &r.certificate[0];
        assert_eq!(c.class, vec![BigInt::from(1)]);
        assert_eq!(c.partner, vec![BigInt::from(1)]);
        assert_eq!(c.value, BigInt::from(1));
    }

    #[test]
    fn adjointness_violation_is_reported() {
        let l = lattice(&[&[1, 1], &[0, -1]]);
        // Using T itself as the dual involution with P = I breaks adjointness.
        let err = DualPair::new(l.clone(), l.clone(), IntegerMatrix::identity(2)).unwrap_err();
        assert_eq!(err.name(), "AdjointnessViolation");
        let bad = DualPair { lattice: l.clone(), dual: l, pairing: IntegerMatrix::identity(2) };
        assert_eq!(induced_pairing(&bad).unwrap_err().name(), "AdjointnessViolation");
    }

    #[test]
    fn random_pairs_are_perfect_and_well_defined() {
        let mut r = rng(11);
        for rank in 1..=8 {
            let (a, b, c) = random::multiplicities(rank, &mut r);
            let l = random::conjugated_involution(a, b, c, &mut r);
            let pair = random_dual_pair(&l, &mut r);
            let rep = verify_perfect(&pair).unwrap();
            assert!(rep.perfect, "rank {rank} ({a},{b},{c})");
            assert_eq!(rep.pairing.rank_lattice, b);
            assert_eq!(rep.pairing.rank_dual, b);
            assert!(gram_is_well_defined(&pair, &rep.pairing, 4, &mut r));
        }
    }
}
