use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use prym_census::duality::{gram_is_well_defined, random_dual_pair, verify_perfect};
use prym_census::f2::F2Matrix;
use prym_census::json;
use prym_census::linalg::{
    cokernel_invariants, hermite_normal_form, is_saturated_basis, kernel_basis, rank, smith_normal_form,
};
use prym_census::random::{self, rng};
use prym_census::{IntegerMatrix, InvolutionLattice};

fn matrix(max_dim: usize, bound: i64) -> impl Strategy<Value = IntegerMatrix> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(move |(r, c)| {
        prop::collection::vec(-bound..=bound, r * c).prop_map(move |xs| {
            IntegerMatrix::new(r, c, xs.into_iter().map(BigInt::from).collect()).unwrap()
        })
    })
}

fn multiplicities(max_rank: usize) -> impl Strategy<Value = (usize, usize, usize)> {
    (0..=max_rank, 0..=max_rank, 0..=max_rank / 2)
        .prop_filter("rank in range", move |(a, b, c)| (1..=max_rank).contains(&(a + b + 2 * c)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn smith_form_reconstructs(m in matrix(6, 9)) {
        let s = smith_normal_form(&m);
        prop_assert_eq!(&(&s.u * &m) * &s.v, s.d.clone());
        prop_assert!(s.u.is_unimodular() && s.v.is_unimodular());
        let f = s.invariant_factors();
        prop_assert!(f.iter().all(|x| x.is_positive()));
        prop_assert!(f.windows(2).all(|w| w[1].is_multiple_of(&w[0])));
        prop_assert_eq!(f.len(), rank(&m));
    }

    #[test]
    fn first_invariant_factor_is_entry_gcd(m in matrix(5, 12)) {
        let g = m.entries().iter().fold(BigInt::zero(), |g, x| g.gcd(x));
        let f = smith_normal_form(&m).invariant_factors();
        prop_assert_eq!(f.first().cloned().unwrap_or_default(), g);
    }

    #[test]
    fn invariant_factors_multiply_to_determinant(m in matrix(5, 6)) {
        prop_assume!(m.is_square());
        let det = m.determinant().abs();
        let f = smith_normal_form(&m).invariant_factors();
        let product: BigInt = if f.len() == m.rows() { f.iter().product() } else { BigInt::zero() };
        prop_assert_eq!(product, det);
    }

    #[test]
    fn cokernel_is_invariant_under_unimodular_change(m in matrix(5, 7), seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, _) = random::unimodular(m.rows(), 12, &mut r);
        let (b, _) = random::unimodular(m.cols(), 12, &mut r);
        prop_assert_eq!(cokernel_invariants(&(&(&a * &m) * &b)), cokernel_invariants(&m));
    }

    #[test]
    fn kernel_is_saturated_and_complete(m in matrix(5, 4)) {
        let k = kernel_basis(&m);
        prop_assert_eq!(k.cols(), m.cols() - rank(&m));
        if k.cols() > 0 {
            prop_assert!((&m * &k).is_zero());
            prop_assert!(is_saturated_basis(&k));
        }
    }

    #[test]
    fn hermite_form_is_a_unimodular_row_reduction(m in matrix(5, 8)) {
        let (h, w) = hermite_normal_form(&m);
        prop_assert!(w.is_unimodular());
        prop_assert_eq!(&w * &m, h.clone());
        // Reducing again changes nothing.
        prop_assert_eq!(hermite_normal_form(&h).0, h);
    }

    #[test]
    fn f2_rank_counts_odd_invariant_factors(m in matrix(6, 5)) {
        let odd = smith_normal_form(&m).invariant_factors().iter().filter(|x| x.is_odd()).count();
        prop_assert_eq!(F2Matrix::from_integer(&m).rank(), odd);
    }

    #[test]
    fn decompose_is_conjugation_invariant(mult in multiplicities(12), seed in any::<u64>()) {
        let (a, b, c) = mult;
        let mut r = rng(seed);
        let l = random::conjugated_involution(a, b, c, &mut r);
        let d = l.decompose(l.rank() <= 8).unwrap();
        prop_assert_eq!(d.as_tuple(), (a, b, c));
        if let Some(w) = &d.witness {
            let block = InvolutionLattice::standard(a, b, c);
            prop_assert!(w.is_unimodular());
            prop_assert_eq!(l.matrix() * w, w * block.matrix());
        }
        prop_assert_eq!(l.negated().decompose(false).unwrap().as_tuple(), (b, a, c));
    }

    #[test]
    fn oracle_counts_two_to_the_sign_multiplicity(mult in multiplicities(10), seed in any::<u64>()) {
        let (a, b, c) = mult;
        let l = random::conjugated_involution(a, b, c, &mut rng(seed));
        let group = l.component_group().unwrap();
        let oracle = l.component_group_oracle(16).unwrap();
        prop_assert_eq!(BigInt::from(oracle), BigInt::one() << b);
        prop_assert_eq!(group.order(), BigInt::one() << b);
        prop_assert!(group.invariant_factors.iter().all(|f| f == &BigInt::from(2)));
    }

    #[test]
    fn random_dual_pairs_are_perfect(mult in multiplicities(8), seed in any::<u64>()) {
        let (a, b, c) = mult;
        let mut r = rng(seed);
        let l = random::conjugated_involution(a, b, c, &mut r);
        let pair = random_dual_pair(&l, &mut r);
        let report = verify_perfect(&pair).unwrap();
        prop_assert!(report.by_rank && report.by_enumeration);
        prop_assert_eq!(report.pairing.rank_lattice, report.pairing.rank_dual);
        prop_assert_eq!(report.certificate.len(), report.pairing.rank_lattice);
        prop_assert!(gram_is_well_defined(&pair, &report.pairing, 4, &mut r));
    }

    #[test]
    fn matrix_json_round_trips(m in matrix(4, i64::MAX / 2), shift in 0u32..200) {
        let big = m.scale(&(BigInt::one() << shift));
        let text = json::to_pretty(&json::matrix_value(&big, None));
        prop_assert_eq!(json::parse_matrix(&text).unwrap().matrix, big);
    }
}

#[test]
fn adjointness_violation_is_reported() {
    let l = InvolutionLattice::new(IntegerMatrix::from_rows(&[[0, 1], [1, 0]])).unwrap();
    let dual = InvolutionLattice::new(IntegerMatrix::from_rows(&[[1, 0], [0, -1]])).unwrap();
    let e = prym_census::duality::DualPair::new(l, dual, IntegerMatrix::identity(2)).unwrap_err();
    assert_eq!(e.name(), "AdjointnessViolation");
}
