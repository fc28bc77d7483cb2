//! Counts of topological types of real SL(2,C) and PGL(2,C) bundles of
//! degree zero over a type I real curve with `k` real circles, and the
//! per-fiber bound for a fixed spectral curve.
//!
//! Each count is obtained by explicit enumeration and cross-checked against
//! its closed form (and, for PGL(2), against the recursion
//! `n_k = 3^(k-1) + n_(k-1)`, `n_1 = 2`).

use num_bigint::BigInt;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::par;
use crate::spectral::{fiber_counts, RealCurveData};

/// Largest `k` accepted by the counting routines (3^k must fit in a `u64`).
pub const MAX_K: usize = 40;

/// Default guard for the exhaustive enumerations.
pub const DEFAULT_ENUMERATION_LIMIT: usize = 20;

/// Guard for [`fiber_compatible`], which scans all `3^k` tuples.
pub const FIBER_ENUMERATION_LIMIT: usize = 16;

pub const PGL2_NOTE: &str = "global PGL(2) count uses (3^k+1)/2, solved from the parity recursion \
n_k = 3^(k-1) + n_(k-1); the value 3^k+1 also appears as a statement of this count and differs by a \
factor of two; it is reported as pgl2_alternative_statement and not used";

pub const SL2_NOTE: &str = "SL(2) count assumes the per-circle signs for c = +I can be normalized \
globally, i.e. sign assignments are counted modulo one simultaneous flip";

fn check_k(k: usize) -> Result<()> {
    if k == 0 || k > MAX_K {
        return Err(Error::InvalidCurveData(format!("need 1 <= k <= {MAX_K}, got k = {k}")));
    }
    Ok(())
}

fn check_enumeration(k: usize, limit: usize) -> Result<()> {
    if k > limit {
        return Err(Error::RankGuardExceeded { rank: k, limit });
    }
    Ok(())
}

/// Per-circle reduction of a real PGL(2,C) bundle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Pgl2Choice {
    #[serde(rename = "PSU2")]
    Psu2,
    #[serde(rename = "PGL2R_oriented")]
    Pgl2rOriented,
    #[serde(rename = "PGL2R_nonoriented")]
    Pgl2rNonoriented,
}

impl Pgl2Choice {
    pub const ALL: [Pgl2Choice; 3] = [Pgl2Choice::Psu2, Pgl2Choice::Pgl2rOriented, Pgl2Choice::Pgl2rNonoriented];
}

/// One topological class of real SL(2,C) bundles.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "c")]
pub enum Sl2Class {
    /// `c = +I`: a sign per circle, normalized so the first sign is `+`.
    #[serde(rename = "+I")]
    Real { signs: Vec<char> },
    /// `c = -I`: the single pseudo-real class.
    #[serde(rename = "-I")]
    PseudoReal,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Sl2Census {
    pub k: usize,
    pub enumerated: u64,
    pub closed_form: u64,
    pub note: &'static str,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Pgl2Census {
    pub k: usize,
    pub enumerated: u64,
    /// `n_1, ..., n_k` from the recursion.
    pub recursion: Vec<u64>,
    pub closed_form: u64,
    pub pgl2_alternative_statement: u64,
    pub note: &'static str,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CensusResult {
    pub k: usize,
    pub sl2: Sl2Census,
    pub pgl2: Pgl2Census,
}

impl CensusResult {
    pub fn sl2_count(&self) -> u64 {
        self.sl2.closed_form
    }

    pub fn pgl2_count(&self) -> u64 {
        self.pgl2.closed_form
    }
}

fn pow(base: u64, e: usize) -> u64 {
    base.pow(e as u32)
}

/// Sign assignments in `{+,-}^k` modulo a global flip, plus the class `c = -I`.
pub fn census_sl2(k: usize, limit: usize) -> Result<Sl2Census> {
    check_k(k)?;
    check_enumeration(k, limit)?;
    let full = (1u64 << k) - 1;
    // Count orbit representatives: t is canonical when t <= its flip.
    let real = par::sum_range(1u64 << k, |t| u64::from(t <= (t ^ full)));
    let enumerated = real + 1;
    let closed_form = pow(2, k - 1) + 1;
    if enumerated != closed_form {
        return Err(Error::InternalInconsistency(format!(
            "SL(2) census for k = {k}: enumeration {enumerated}, closed form {closed_form}"
        )));
    }
    Ok(Sl2Census { k, enumerated, closed_form, note: SL2_NOTE })
}

/// The SL(2) classes themselves, for small `k`.
pub fn sl2_classes(k: usize) -> Result<Vec<Sl2Class>> {
    check_k(k)?;
    check_enumeration(k, DEFAULT_ENUMERATION_LIMIT)?;
    let full = (1u64 << k) - 1;
    let mut out: Vec<Sl2Class> = (0..1u64 << k)
        .filter(|&t| t <= (t ^ full))
        .map(|t| Sl2Class::Real {
            // The orbit minimum has its top bit clear; list that circle first.
            signs: (0..k).rev().map(|j| if (t >> j) & 1 == 0 { '+' } else { '-' }).collect(),
        })
        .collect();
    out.push(Sl2Class::PseudoReal);
    Ok(out)
}

/// Recursion trace `n_1 = 2`, `n_j = 3^(j-1) + n_(j-1)`.
pub fn pgl2_recursion(k: usize) -> Result<Vec<u64>> {
    check_k(k)?;
    let mut trace = vec![2u64];
    for j in 2..=k {
        let prev = *trace.last().expect("nonempty");
        trace.push(pow(3, j - 1) + prev);
    }
    Ok(trace)
}

/// Number of tuples in `{PSU2, oriented, nonoriented}^k` with an even number
/// of nonoriented circles, by visiting every tuple.
///
/// A tuple is encoded by the set `a` of PGL(2,R) circles and the subset
/// `s ⊆ a` of nonoriented ones; the outer loop over `a` runs in parallel.
pub fn enumerate_pgl2(k: usize) -> u64 {
    enumerate_pgl2_with(par::Mode::default(), k)
}

/// [`enumerate_pgl2`] on an explicit execution path.
pub fn enumerate_pgl2_with(mode: par::Mode, k: usize) -> u64 {
    par::sum_range_with(mode, 1u64 << k, |a| {
        let mut count = 0u64;
        let mut s = a;
        loop {
            count += u64::from(s.count_ones() % 2 == 0);
            if s == 0 {
                break;
            }
            s = (s - 1) & a;
        }
        count
    })
}

pub fn census_pgl2(k: usize, limit: usize) -> Result<Pgl2Census> {
    check_k(k)?;
    check_enumeration(k, limit)?;
    let enumerated = enumerate_pgl2(k);
    let recursion = pgl2_recursion(k)?;
    let closed_form = (pow(3, k) + 1) / 2;
    let last = *recursion.last().expect("nonempty");
    if enumerated != closed_form || last != closed_form {
        return Err(Error::InternalInconsistency(format!(
            "PGL(2) census for k = {k}: enumeration {enumerated}, recursion {last}, closed form {closed_form}"
        )));
    }
    Ok(Pgl2Census {
        k,
        enumerated,
        recursion,
        closed_form,
        pgl2_alternative_statement: pow(3, k) + 1,
        note: PGL2_NOTE,
    })
}

/// All parity-admissible PGL(2) tuples, lazily, in base-3 order.
pub fn pgl2_classes(k: usize) -> Result<impl Iterator<Item = Vec<Pgl2Choice>>> {
    check_k(k)?;
    check_enumeration(k, DEFAULT_ENUMERATION_LIMIT)?;
    Ok((0..pow(3, k)).filter_map(move |mut code| {
        let mut tuple = Vec::with_capacity(k);
        for _ in 0..k {
            tuple.push(Pgl2Choice::ALL[(code % 3) as usize]);
            code /= 3;
        }
        let odd = tuple.iter().filter(|&&c| c == Pgl2Choice::Pgl2rNonoriented).count() % 2 == 1;
        (!odd).then_some(tuple)
    }))
}

pub fn census(k: usize, limit: usize) -> Result<CensusResult> {
    Ok(CensusResult { k, sl2: census_sl2(k, limit)?, pgl2: census_pgl2(k, limit)? })
}

/// Reductions admissible along one fixed spectral curve.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiberCompatibility {
    pub k: usize,
    pub ell: usize,
    /// Size of the product of per-circle allowed sets, before the parity constraint.
    pub pre_parity: u64,
    /// Tuples with an even number of nonoriented circles.
    pub parity_filtered: u64,
}

/// Per-circle allowed sets along a fixed fiber: the `ell` circles whose lifts
/// `τ` fixes allow `{PSU2, PGL2R_oriented}`; the other `k - ell` allow
/// `{PGL2R_oriented, PGL2R_nonoriented}`.
pub fn fiber_allowed_sets(k: usize, ell: usize) -> Vec<Vec<Pgl2Choice>> {
    (0..k)
        .map(|j| {
            if j < ell {
                vec![Pgl2Choice::Psu2, Pgl2Choice::Pgl2rOriented]
            } else {
                vec![Pgl2Choice::Pgl2rOriented, Pgl2Choice::Pgl2rNonoriented]
            }
        })
        .collect()
}

/// Scans all `3^k` circle-choice tuples, keeping those inside the
/// per-circle allowed sets, and counts the survivors before and after the
/// even-parity constraint on nonoriented circles.
pub fn fiber_compatible(k: usize, ell: usize) -> Result<FiberCompatibility> {
    check_k(k)?;
    if ell < 1 || ell + 1 > k {
        return Err(Error::InvalidCurveData(format!("need 1 <= ell <= k - 1, got ell = {ell}, k = {k}")));
    }
    check_enumeration(k, FIBER_ENUMERATION_LIMIT)?;
    let sets = fiber_allowed_sets(k, ell);
    let total = 3u64.pow(k as u32);
    // (compatible, compatible with even parity) for tuple code `x` in base 3
    let classify = |mut x: u64| -> (bool, bool) {
        let mut nonoriented = 0usize;
        for set in &sets {
            let c = Pgl2Choice::ALL[(x % 3) as usize];
            x /= 3;
            if !set.contains(&c) {
                return (false, false);
            }
            nonoriented += usize::from(c == Pgl2Choice::Pgl2rNonoriented);
        }
        (true, nonoriented % 2 == 0)
    };
    let pre_parity = par::sum_range(total, |x| u64::from(classify(x).0));
    let parity_filtered = par::sum_range(total, |x| u64::from(classify(x).1));
    Ok(FiberCompatibility { k, ell, pre_parity, parity_filtered })
}

/// Tuple `x` of the fiber product, reading bit `j` as the second choice on circle `j`.
pub fn fiber_tuple(k: usize, ell: usize, x: u64) -> Vec<Pgl2Choice> {
    fiber_allowed_sets(k, ell)
        .into_iter()
        .enumerate()
        .map(|(j, s)| s[((x >> j) & 1) as usize])
        .collect()
}

/// Global component counts set against what a single fiber can meet.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParadoxReport {
    pub g: usize,
    pub k: usize,
    pub ell: usize,
    pub global_pgl2: u64,
    pub global_sl2: u64,
    /// `2^k`: per-circle choices available along the fiber, before parity.
    pub fiber_bound: u64,
    pub fiber_bound_parity_filtered: u64,
    /// Real components of the PGL(2) fiber computed from the spectral lattice.
    #[serde(serialize_with = "crate::json::big::serialize")]
    pub fiber_pgl2_lattice: BigInt,
    /// Real components of the SL(2) fiber computed from the spectral lattice.
    #[serde(serialize_with = "crate::json::big::serialize")]
    pub fiber_sl2_lattice: BigInt,
    pub pgl2_global_exceeds_fiber: bool,
    pub sl2_global_exceeds_fiber: bool,
    pub notes: Vec<&'static str>,
}

pub fn paradox_report(g: usize, k: usize, ell: usize) -> Result<ParadoxReport> {
    let curve = RealCurveData::new(g, k, ell)?;
    let census = census(k, DEFAULT_ENUMERATION_LIMIT)?;
    let fiber = fiber_compatible(k, ell)?;
    let counts = fiber_counts(curve)?;
    Ok(ParadoxReport {
        g,
        k,
        ell,
        global_pgl2: census.pgl2_count(),
        global_sl2: census.sl2_count(),
        fiber_bound: fiber.pre_parity,
        fiber_bound_parity_filtered: fiber.parity_filtered,
        fiber_pgl2_lattice: counts.pgl2,
        fiber_sl2_lattice: counts.sl2,
        pgl2_global_exceeds_fiber: census.pgl2_count() > fiber.pre_parity,
        sl2_global_exceeds_fiber: census.sl2_count() > fiber.pre_parity,
        notes: vec![PGL2_NOTE, SL2_NOTE],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sl2_values() {
        for (k, n) in [(1, 2), (2, 3), (4, 9)] {
            assert_eq!(census_sl2(k, 20).unwrap().enumerated, n);
            assert_eq!(sl2_classes(k).unwrap().len() as u64, n);
        }
    }

    #[test]
    fn sl2_classes_are_flip_normalized() {
        let classes = sl2_classes(3).unwrap();
        assert_eq!(classes.last(), Some(&Sl2Class::PseudoReal));
        for c in &classes[..classes.len() - 1] {
            let Sl2Class::Real { signs } = c else { panic!("real class expected") };
            assert_eq!(signs[0], '+');
        }
    }

    #[test]
    fn pgl2_values() {
        let c = census_pgl2(1, 20).unwrap();
        assert_eq!((c.enumerated, c.closed_form), (2, 2));
        let classes: Vec<_> = pgl2_classes(1).unwrap().collect();
        assert_eq!(classes, vec![vec![Pgl2Choice::Psu2], vec![Pgl2Choice::Pgl2rOriented]]);

        let c = census_pgl2(2, 20).unwrap();
        assert_eq!(c.enumerated, 5);
        let with_two_nonoriented = pgl2_classes(2)
            .unwrap()
            .filter(|t| t.iter().all(|&x| x == Pgl2Choice::Pgl2rNonoriented))
            .count();
        assert_eq!(with_two_nonoriented, 1);

        assert_eq!(census_pgl2(5, 20).unwrap().enumerated, 122);
        assert_eq!(pgl2_recursion(5).unwrap(), vec![2, 5, 14, 41, 122]);
        assert_eq!(census_pgl2(3, 20).unwrap().pgl2_alternative_statement, 28);
    }

    #[test]
    fn guards() {
        assert_eq!(census_sl2(0, 20).unwrap_err().name(), "InvalidCurveData");
        assert_eq!(census_pgl2(21, 20).unwrap_err().name(), "RankGuardExceeded");
        assert_eq!(fiber_compatible(2, 2).unwrap_err().name(), "InvalidCurveData");
        assert_eq!(fiber_compatible(2, 0).unwrap_err().name(), "InvalidCurveData");
    }

    #[test]
    fn fiber_bound_examples() {
        let f = fiber_compatible(2, 1).unwrap();
        assert_eq!((f.pre_parity, f.parity_filtered), (4, 2));
        assert_eq!(fiber_compatible(3, 1).unwrap().pre_parity, 8);
        // Brute force over the explicit tuples for (2, 1).
        let admissible = (0..4u64)
            .map(|x| fiber_tuple(2, 1, x))
            .filter(|t| t.iter().filter(|&&c| c == Pgl2Choice::Pgl2rNonoriented).count() % 2 == 0)
            .count();
        assert_eq!(admissible, 2);
        assert!(!fiber_tuple(3, 2, 7).contains(&Pgl2Choice::Psu2));
        assert_eq!(fiber_tuple(3, 2, 0)[2], Pgl2Choice::Pgl2rOriented);
    }

    #[test]
    fn paradox_examples() {
        let r = paradox_report(3, 2, 1).unwrap();
        assert_eq!((r.global_pgl2, r.fiber_bound), (5, 4));
        assert!(r.pgl2_global_exceeds_fiber);
        assert_eq!(r.global_sl2, 3);
        assert!(!r.sl2_global_exceeds_fiber);

        let r = paradox_report(4, 3, 1).unwrap();
        assert_eq!((r.global_pgl2, r.fiber_bound), (14, 8));
        assert!(r.pgl2_global_exceeds_fiber);
    }
}
