use num_bigint::BigInt;
use num_traits::One;

use prym_census::census::{census, fiber_compatible, paradox_report};
use prym_census::spectral::{fiber_counts, RealCurveData, SpectralHomology};
use prym_census::InvolutionLattice;

#[test]
fn structure_and_jacobian_counts_on_small_grid() {
    for curve in RealCurveData::grid(3..=6) {
        let f = fiber_counts(curve).unwrap();
        assert!(f.checks.all(), "{curve:?}");
        assert_eq!(f.rank, 8 * curve.g - 6);
        assert!(f.jacobian_matches_closed_form(), "{curve:?}: {}", f.jacobian);
        assert!(f.sl2_equals_pgl2(), "{curve:?}");
    }
}

/// The lattices built from the cycle basis give `2^(k-1)` real components for
/// both the Prym and the PGL(2) quotient, half of `2^k`. The coset oracle
/// agrees wherever its rank guard allows, so the halving is a property of
/// the model rather than of the Smith-form route.
#[test]
fn prym_and_pgl2_counts_are_half_of_two_to_the_k() {
    for curve in RealCurveData::grid(3..=6) {
        let f = fiber_counts(curve).unwrap();
        let half = BigInt::one() << (curve.k - 1);
        assert_eq!(f.sl2, half, "{curve:?}");
        assert_eq!(f.pgl2, half, "{curve:?}");
        assert!(!f.fibers_match_closed_form());
    }
    let s = SpectralHomology::build(RealCurveData::new(3, 2, 1).unwrap()).unwrap();
    for l in [s.prym_lattice().unwrap(), s.pgl2_lattice().unwrap()] {
        assert_eq!(l.rank(), 12);
        assert_eq!(l.component_group_oracle(16).unwrap(), 2);
    }
}

/// Consistency of the model with real-curve topology: `τ` and `iτ` on the
/// spectral curve have `2ℓ` and `2(k - ℓ)` ovals, so `2ℓ - 1` and
/// `2(k - ℓ) - 1` sign summands.
#[test]
fn sign_multiplicities_match_oval_counts() {
    for curve in RealCurveData::grid(3..=5) {
        let s = SpectralHomology::build(curve).unwrap();
        let tau = s.jacobian_lattice().decompose(false).unwrap();
        assert_eq!(tau.n_sign, 2 * curve.ell - 1);
        let i_tau = InvolutionLattice::new(&s.sheet * &s.tau).unwrap().decompose(false).unwrap();
        assert_eq!(i_tau.n_sign, 2 * (curve.k - curve.ell) - 1, "{curve:?}");
    }
}

#[test]
fn census_routes_agree_up_to_twenty() {
    for k in 1..=20 {
        let c = census(k, 20).unwrap();
        assert_eq!(c.sl2.enumerated, (1u64 << (k - 1)) + 1);
        assert_eq!(c.pgl2.enumerated, (3u64.pow(k as u32) + 1) / 2);
        assert_eq!(*c.pgl2.recursion.last().unwrap(), c.pgl2.closed_form);
    }
}

#[test]
fn fiber_bound_is_two_to_the_k() {
    for k in 2..=12 {
        for ell in 1..k {
            let f = fiber_compatible(k, ell).unwrap();
            assert_eq!(f.pre_parity, 1u64 << k);
            assert!(f.parity_filtered <= f.pre_parity);
        }
    }
    let r = paradox_report(3, 2, 1).unwrap();
    assert!(r.pgl2_global_exceeds_fiber);
    assert_eq!((r.global_pgl2, r.fiber_bound), (5, 4));
}
