//! Seeded invariant suites over every module, at desk-scale bounds.
//!
//! Each suite generates its cases from `substream(seed, suite, index)`, runs
//! them through [`par::map`], and keeps results in case order, so the report
//! depends only on the configuration. Cases are generated smallest first and
//! the reported counterexample is the smallest failing one.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::Serialize;

use crate::census::{census, fiber_compatible, paradox_report, DEFAULT_ENUMERATION_LIMIT};
use crate::duality::{gram_is_well_defined, random_dual_pair, verify_perfect};
use crate::error::Error;
use crate::involution::{InvolutionLattice, ORACLE_RANK_LIMIT};
use crate::linalg::{cokernel_invariants, smith_normal_form};
use crate::matrix::IntegerMatrix;
use crate::par;
use crate::random::{self, substream};
use crate::spectral::{fiber_counts, RealCurveData};

pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SelftestConfig {
    pub seed: u64,
    pub snf_cases: usize,
    pub decompose_cases: usize,
    pub max_rank: usize,
    /// Cases up to this rank are also checked against the coset oracle.
    pub oracle_max_rank: usize,
    pub dual_pairs: usize,
    pub max_genus: usize,
    pub max_k: usize,
    pub fiber_max_k: usize,
    /// Adds a suite fed a non-involution, which must fail.
    pub inject_fault: bool,
}

impl SelftestConfig {
    pub fn new(seed: u64) -> Self {
        SelftestConfig {
            seed,
            snf_cases: 200,
            decompose_cases: 500,
            max_rank: 12,
            oracle_max_rank: 10,
            dual_pairs: 200,
            max_genus: 9,
            max_k: 20,
            fiber_max_k: 12,
            inject_fault: false,
        }
    }
}

impl Default for SelftestConfig {
    fn default() -> Self {
        SelftestConfig::new(DEFAULT_SEED)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub invariant: String,
    /// The failing input, small enough to paste into a reproduction.
    pub input: String,
    pub detail: String,
    /// Name of the module error, when the failure was an error.
    pub error: Option<&'static str>,
}

impl Failure {
    fn new(invariant: &str, input: impl Into<String>, detail: impl Into<String>) -> Self {
        Failure { invariant: invariant.into(), input: input.into(), detail: detail.into(), error: None }
    }

    fn from_error(invariant: &str, input: impl Into<String>, e: Error) -> Self {
        Failure { invariant: invariant.into(), input: input.into(), detail: e.to_string(), error: Some(e.name()) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub cases: usize,
    pub failed: usize,
    pub passed: bool,
    pub counterexample: Option<Failure>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
    /// The counterexample of the first failing suite.
    pub first_failure: Option<Failure>,
}

type CaseResult = std::result::Result<(), Failure>;

fn run_suite<T: Send>(suite: &'static str, cases: Vec<T>, check: impl Fn(T) -> CaseResult + Sync + Send) -> SuiteReport {
    let n = cases.len();
    let results = par::map(cases, check);
    let failed = results.iter().filter(|r| r.is_err()).count();
    let counterexample = results.into_iter().find_map(|r| r.err());
    SuiteReport { suite, cases: n, failed, passed: failed == 0, counterexample }
}

fn matrix_input(m: &IntegerMatrix) -> String {
    let rows: Vec<String> = m
        .to_nested()
        .iter()
        .map(|r| format!("[{}]", r.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")))
        .collect();
    format!("[{}]", rows.join(","))
}

fn is_smith_diagonal(d: &IntegerMatrix) -> bool {
    let r = d.rows().min(d.cols());
    let off_diagonal_zero =
        (0..d.rows()).all(|i| (0..d.cols()).all(|j| i == j || d[(i, j)].is_zero()));
    let diag: Vec<&BigInt> = (0..r).map(|i| &d[(i, i)]).collect();
    let nonnegative = diag.iter().all(|x| !x.is_negative());
    let divides = diag.windows(2).all(|w| {
        if w[0].is_zero() {
            w[1].is_zero()
        } else {
            w[1].is_multiple_of(w[0])
        }
    });
    off_diagonal_zero && nonnegative && divides
}

fn snf_suite(cfg: &SelftestConfig) -> SuiteReport {
    let cases: Vec<u64> = (0..cfg.snf_cases as u64).collect();
    run_suite("smith_normal_form", cases, |i| {
        let mut rng = substream(cfg.seed, "smith_normal_form", i);
        let (r, c) = (1 + (i as usize) % 6, rng.gen_range(1..=6usize));
        let entries = (0..r * c).map(|_| BigInt::from(rng.gen_range(-6..=6))).collect();
        let m = IntegerMatrix::new(r, c, entries).expect("sized");
        let input = matrix_input(&m);
        let s = smith_normal_form(&m);
        if &(&s.u * &m) * &s.v != s.d {
            return Err(Failure::new("u*m*v == d", input, "reconstruction differs"));
        }
        if !s.u.is_unimodular() || !s.v.is_unimodular() {
            return Err(Failure::new("u, v unimodular", input, "transform has determinant other than +-1"));
        }
        if !is_smith_diagonal(&s.d) {
            return Err(Failure::new("d diagonal with d_i | d_(i+1)", input, format!("{:?}", s.d)));
        }
        let (a, _) = random::unimodular(r, 3 * r, &mut rng);
        let (b, _) = random::unimodular(c, 3 * c, &mut rng);
        let conj = &(&a * &m) * &b;
        if cokernel_invariants(&conj) != cokernel_invariants(&m) {
            return Err(Failure::new("cokernel invariant under unimodular change", input, matrix_input(&conj)));
        }
        Ok(())
    })
}

#[derive(Clone, Debug)]
struct InvolutionCase {
    multiplicities: (usize, usize, usize),
    lattice: InvolutionLattice,
}

fn involution_cases(cfg: &SelftestConfig, suite: &str) -> Vec<InvolutionCase> {
    let mut cases: Vec<(usize, u64)> =
        (0..cfg.decompose_cases as u64).map(|i| (1 + (i as usize) % cfg.max_rank.max(1), i)).collect();
    cases.sort();
    cases
        .into_iter()
        .map(|(rank, i)| {
            let mut rng = substream(cfg.seed, suite, i);
            let (a, b, c) = random::multiplicities(rank, &mut rng);
            InvolutionCase { multiplicities: (a, b, c), lattice: random::conjugated_involution(a, b, c, &mut rng) }
        })
        .collect()
}

fn decompose_suite(cfg: &SelftestConfig) -> SuiteReport {
    run_suite("decompose", involution_cases(cfg, "involutions"), |case| {
        let input = matrix_input(case.lattice.matrix());
        let with_witness = case.lattice.rank() <= 8;
        let d = case
            .lattice
            .decompose(with_witness)
            .map_err(|e| Failure::from_error("decompose", input.clone(), e))?;
        if d.as_tuple() != case.multiplicities {
            return Err(Failure::new(
                "decompose recovers (n_trivial, n_sign, n_perm)",
                input,
                format!("expected {:?}, got {:?}", case.multiplicities, d.as_tuple()),
            ));
        }
        Ok(())
    })
}

fn component_group_suite(cfg: &SelftestConfig) -> SuiteReport {
    let cases: Vec<InvolutionCase> = involution_cases(cfg, "involutions")
        .into_iter()
        .filter(|c| c.lattice.rank() <= cfg.oracle_max_rank)
        .collect();
    run_suite("component_group", cases, |case| {
        let input = matrix_input(case.lattice.matrix());
        let expected = BigInt::one() << case.multiplicities.1;
        let group = case
            .lattice
            .component_group()
            .map_err(|e| Failure::from_error("component_group", input.clone(), e))?;
        let oracle = case
            .lattice
            .component_group_oracle(ORACLE_RANK_LIMIT)
            .map_err(|e| Failure::from_error("component_group_oracle", input.clone(), e))?;
        if group.order() != expected || BigInt::from(oracle) != expected {
            return Err(Failure::new(
                "SNF route == coset oracle == 2^n_sign",
                input,
                format!("SNF {}, oracle {oracle}, expected {expected}", group.order()),
            ));
        }
        if group.invariant_factors.iter().any(|f| f != &BigInt::from(2)) {
            return Err(Failure::new("component group is elementary abelian", input, format!("{:?}", group.invariant_factors)));
        }
        Ok(())
    })
}

fn duality_suite(cfg: &SelftestConfig) -> SuiteReport {
    let mut cases: Vec<(usize, u64)> = (0..cfg.dual_pairs as u64).map(|i| (1 + (i as usize) % 10, i)).collect();
    cases.sort();
    run_suite("duality", cases, |(rank, i)| {
        let mut rng = substream(cfg.seed, "duality", i);
        let (a, b, c) = random::multiplicities(rank, &mut rng);
        let lattice = random::conjugated_involution(a, b, c, &mut rng);
        let pair = random_dual_pair(&lattice, &mut rng);
        let input = format!(
            "T = {}, T_dual = {}, P = {}",
            matrix_input(pair.lattice.matrix()),
            matrix_input(pair.dual.matrix()),
            matrix_input(&pair.pairing)
        );
        let report = verify_perfect(&pair).map_err(|e| Failure::from_error("verify_perfect", input.clone(), e))?;
        if !(report.by_rank && report.by_enumeration) {
            return Err(Failure::new(
                "pairing is perfect",
                input,
                format!("by_rank {}, by_enumeration {}", report.by_rank, report.by_enumeration),
            ));
        }
        if report.pairing.rank_lattice != report.pairing.rank_dual {
            return Err(Failure::new(
                "f2_rank(L) == f2_rank(L_dual)",
                input,
                format!("{} vs {}", report.pairing.rank_lattice, report.pairing.rank_dual),
            ));
        }
        if !gram_is_well_defined(&pair, &report.pairing, 3, &mut rng) {
            return Err(Failure::new("pairing independent of representatives", input, "Gram matrix changed"));
        }
        Ok(())
    })
}

fn spectral_suite(cfg: &SelftestConfig) -> SuiteReport {
    run_suite("spectral", RealCurveData::grid(3..=cfg.max_genus), |curve| {
        let input = format!("g = {}, k = {}, ell = {}", curve.g, curve.k, curve.ell);
        let f = fiber_counts(curve).map_err(|e| Failure::from_error("fiber_counts", input.clone(), e))?;
        if !f.checks.all() {
            return Err(Failure::new("I^2 = tau^2 = 1, I tau = tau I, rank 8g - 6", input, format!("{:?}", f.checks)));
        }
        if !f.jacobian_matches_closed_form() {
            return Err(Failure::new(
                "Jacobian count == 2^(2 ell - 1)",
                input,
                format!("{} vs {}", f.jacobian, f.expected_jacobian),
            ));
        }
        if !f.sl2_equals_pgl2() {
            return Err(Failure::new("Prym count == PGL(2) count", input, format!("{} vs {}", f.sl2, f.pgl2)));
        }
        if !f.fibers_match_closed_form() {
            return Err(Failure::new(
                "Prym and PGL(2) counts == 2^k",
                input,
                format!("Prym {}, PGL(2) {}, closed form {}", f.sl2, f.pgl2, f.expected_fiber),
            ));
        }
        Ok(())
    })
}

fn census_suite(cfg: &SelftestConfig) -> SuiteReport {
    run_suite("census", (1..=cfg.max_k).collect(), |k| {
        census(k, DEFAULT_ENUMERATION_LIMIT.max(cfg.max_k))
            .map(|_| ())
            .map_err(|e| Failure::from_error("enumeration == recursion == closed form", format!("k = {k}"), e))
    })
}

fn fiber_suite(cfg: &SelftestConfig) -> SuiteReport {
    let mut cases: Vec<(usize, usize)> =
        (2..=cfg.fiber_max_k).flat_map(|k| (1..k).map(move |ell| (k, ell))).collect();
    // (0, 0) stands for the paradox check at (g, k, ell) = (3, 2, 1).
    cases.push((0, 0));
    run_suite("fiber_bound", cases, |(k, ell)| {
        if k == 0 {
            let input = "g = 3, k = 2, ell = 1";
            let r = paradox_report(3, 2, 1).map_err(|e| Failure::from_error("paradox_report", input, e))?;
            if !(r.pgl2_global_exceeds_fiber && r.global_pgl2 == 5 && r.fiber_bound == 4) {
                return Err(Failure::new(
                    "global PGL(2) count 5 exceeds fiber bound 4",
                    input,
                    format!("{} vs {}", r.global_pgl2, r.fiber_bound),
                ));
            }
            return Ok(());
        }
        let input = format!("k = {k}, ell = {ell}");
        let f = fiber_compatible(k, ell).map_err(|e| Failure::from_error("fiber_compatible", input.clone(), e))?;
        if f.pre_parity != 1u64 << k || f.parity_filtered > f.pre_parity {
            return Err(Failure::new(
                "pre-parity count == 2^k >= parity-filtered count",
                input,
                format!("pre-parity {}, parity-filtered {}", f.pre_parity, f.parity_filtered),
            ));
        }
        Ok(())
    })
}

fn fault_suite() -> SuiteReport {
    let t = IntegerMatrix::from_rows(&[[1, 1], [0, 1]]);
    let input = matrix_input(&t);
    run_suite("injected_fault", vec![t], |t| {
        InvolutionLattice::new(t).map(|_| ()).map_err(|e| Failure::from_error("T*T == I", input.clone(), e))
    })
}

pub fn run(cfg: &SelftestConfig) -> SelftestReport {
    let mut suites = Vec::new();
    if cfg.inject_fault {
        suites.push(fault_suite());
    }
    suites.extend([
        snf_suite(cfg),
        decompose_suite(cfg),
        component_group_suite(cfg),
        duality_suite(cfg),
        spectral_suite(cfg),
        census_suite(cfg),
        fiber_suite(cfg),
    ]);
    let first_failure = suites.iter().find_map(|s| s.counterexample.clone());
    SelftestReport { seed: cfg.seed, passed: suites.iter().all(|s| s.passed), suites, first_failure }
}
