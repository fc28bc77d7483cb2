//! One function per subcommand. Each returns the report as JSON, plus an
//! optional table rendering and an optional failure message for exit status 1.

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use serde::Serialize;
use serde_json::Value;

use prym_census::census::{self as cen, FiberCompatibility, ParadoxReport, Pgl2Census, Sl2Census};
use prym_census::duality::{self, CertificateEntry, DualPair};
use prym_census::involution::ORACLE_RANK_LIMIT;
use prym_census::json::{self, ParseError};
use prym_census::selftest::{self as st, SelftestConfig};
use prym_census::spectral::{fiber_counts, FiberCounts, RealCurveData, SpectralHomology};
use prym_census::{par, Error, IntegerMatrix, InvolutionLattice};

use crate::table;
use crate::{Format, Global};

pub const DEFAULT_RANK_GUARD: usize = 64;
pub const DEFAULT_K_GUARD: usize = 20;

/// Component groups with more generators than this are summarized, not listed.
const REPRESENTATIVE_LIMIT: usize = 10;

pub struct Output {
    pub value: Value,
    pub table: Option<String>,
    /// Set when the command ran but its verdict is a failure.
    pub failure: Option<String>,
}

impl Output {
    fn report<T: Serialize>(report: &T) -> Self {
        Output { value: json::report_value(report), table: None, failure: None }
    }
}

#[derive(Debug)]
pub enum CliError {
    Domain(Error),
    Malformed { path: PathBuf, error: ParseError },
    Io { path: PathBuf, error: io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Domain(_) => 1,
            CliError::Malformed { .. } | CliError::Io { .. } => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Domain(e) => write!(f, "error: {e}"),
            CliError::Malformed { path, error } => write!(f, "error: MalformedInput: {}: {error}", path.display()),
            CliError::Io { path, error } => write!(f, "error: MalformedInput: {}: {error}", path.display()),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Domain(e)
    }
}

pub fn warn_on_guards(g: &Global) {
    if g.rank_guard > DEFAULT_RANK_GUARD {
        eprintln!(
            "warning: rank guard raised to {}; Smith normal form cost grows quickly with rank",
            g.rank_guard
        );
    }
    if g.k_guard > DEFAULT_K_GUARD {
        eprintln!("warning: k guard raised to {}; enumerations visit up to 3^k tuples", g.k_guard);
    }
}

pub fn emit(g: &Global, out: &Output) -> Result<(), CliError> {
    let text = match (g.format, &out.table) {
        (Format::Json, _) => json::to_pretty(&out.value),
        (Format::Table, Some(t)) => t.clone(),
        (Format::Table, None) => table::key_values(&out.value),
    };
    match &g.output {
        Some(path) => fs::write(path, text).map_err(|error| CliError::Io { path: path.clone(), error }),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|error| CliError::Io { path: "<stdout>".into(), error }),
    }
}

fn read_matrix(path: &Path) -> Result<IntegerMatrix, CliError> {
    let text = fs::read_to_string(path).map_err(|error| CliError::Io { path: path.into(), error })?;
    json::parse_matrix(&text)
        .map(|doc| doc.matrix)
        .map_err(|error| CliError::Malformed { path: path.into(), error })
}

fn guard_rank(g: &Global, rank: usize) -> Result<(), CliError> {
    if rank > g.rank_guard {
        return Err(Error::RankGuardExceeded { rank, limit: g.rank_guard }.into());
    }
    Ok(())
}

fn guard_k(g: &Global, k: usize) -> Result<(), CliError> {
    if k > g.k_guard {
        return Err(Error::RankGuardExceeded { rank: k, limit: g.k_guard }.into());
    }
    Ok(())
}

fn guarded_matrix(g: &Global, path: &Path) -> Result<IntegerMatrix, CliError> {
    let m = read_matrix(path)?;
    guard_rank(g, m.rows().max(m.cols()))?;
    Ok(m)
}

#[derive(Serialize)]
struct ComponentsReport {
    rank: usize,
    n_trivial: usize,
    n_sign: usize,
    n_perm: usize,
    #[serde(serialize_with = "json::big::serialize")]
    component_count: BigInt,
    f2_rank: usize,
    #[serde(serialize_with = "json::big::vec")]
    invariant_factors: Vec<BigInt>,
    /// Each entry `v` stands for the point `v/2`.
    representative_denominator: u32,
    #[serde(serialize_with = "json::big::vec2")]
    generators: Vec<Vec<BigInt>>,
    /// All `2^f2_rank` classes, when `f2_rank` is small enough to list.
    #[serde(serialize_with = "json::big::vec2")]
    representatives: Vec<Vec<BigInt>>,
    representatives_complete: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle_count: Option<u64>,
}

pub fn components(g: &Global, matrix: &Path, witness: bool, oracle: bool) -> Result<Output, CliError> {
    let lattice = InvolutionLattice::new(guarded_matrix(g, matrix)?)?;
    let d = lattice.decompose(witness)?;
    let group = lattice.component_group()?;
    let complete = group.f2_rank <= REPRESENTATIVE_LIMIT;
    let representatives = if complete { group.representatives().collect() } else { Vec::new() };
    let oracle_count = if oracle { Some(lattice.component_group_oracle(ORACLE_RANK_LIMIT)?) } else { None };
    if let Some(count) = oracle_count {
        if BigInt::from(count) != group.order() {
            return Err(Error::InternalInconsistency(format!(
                "oracle counts {count} components, Smith route {}",
                group.order()
            ))
            .into());
        }
    }
    Ok(Output::report(&ComponentsReport {
        rank: lattice.rank(),
        n_trivial: d.n_trivial,
        n_sign: d.n_sign,
        n_perm: d.n_perm,
        component_count: group.order(),
        f2_rank: group.f2_rank,
        invariant_factors: group.invariant_factors.clone(),
        representative_denominator: 2,
        generators: group.generators.clone(),
        representatives,
        representatives_complete: complete,
        witness: d.witness.as_ref().map(|w| json::matrix_value(w, None)),
        oracle_count,
    }))
}

#[derive(Serialize)]
struct PairingReport {
    lattice_rank: usize,
    #[serde(rename = "rank_L")]
    rank_l: usize,
    rank_dual: usize,
    gram_mod2: Vec<Vec<u8>>,
    perfect: bool,
    by_rank: bool,
    by_enumeration: bool,
    certificate: Vec<CertificateEntry>,
}

pub fn pairing(g: &Global, matrix: &Path, dual: Option<(&Path, &Path)>) -> Result<Output, CliError> {
    let lattice = InvolutionLattice::new(guarded_matrix(g, matrix)?)?;
    let pair = match dual {
        None => duality::standard_dual(&lattice),
        Some((dual, pairing)) => {
            let dual = InvolutionLattice::new(guarded_matrix(g, dual)?)?;
            DualPair::new(lattice, dual, guarded_matrix(g, pairing)?)?
        }
    };
    let r = duality::verify_perfect(&pair)?;
    Ok(Output::report(&PairingReport {
        lattice_rank: pair.lattice.rank(),
        rank_l: r.pairing.rank_lattice,
        rank_dual: r.pairing.rank_dual,
        gram_mod2: r.pairing.gram.clone(),
        perfect: r.perfect,
        by_rank: r.by_rank,
        by_enumeration: r.by_enumeration,
        certificate: r.certificate,
    }))
}

#[derive(Serialize)]
struct SpectralReport {
    #[serde(flatten)]
    counts: FiberCounts,
    jacobian_matches_closed_form: bool,
    fibers_match_closed_form: bool,
    sl2_equals_pgl2: bool,
}

impl From<FiberCounts> for SpectralReport {
    fn from(counts: FiberCounts) -> Self {
        SpectralReport {
            jacobian_matches_closed_form: counts.jacobian_matches_closed_form(),
            fibers_match_closed_form: counts.fibers_match_closed_form(),
            sl2_equals_pgl2: counts.sl2_equals_pgl2(),
            counts,
        }
    }
}

fn checked_curve(g: &Global, genus: usize, k: usize, ell: usize) -> Result<RealCurveData, CliError> {
    let curve = RealCurveData::new(genus, k, ell)?;
    guard_k(g, k)?;
    guard_rank(g, curve.homology_rank())?;
    Ok(curve)
}

pub fn spectral(g: &Global, genus: usize, k: usize, ell: usize, emit: Option<&Path>) -> Result<Output, CliError> {
    let curve = checked_curve(g, genus, k, ell)?;
    if let Some(path) = emit {
        let s = SpectralHomology::build(curve)?;
        let labels = s.label_strings();
        let doc = serde_json::json!({
            "schema_version": json::SCHEMA_VERSION,
            "curve": curve,
            "sheet_involution": json::matrix_value(&s.sheet, Some(&labels)),
            "tau": json::matrix_value(&s.tau, Some(&labels)),
        });
        fs::write(path, json::to_pretty(&doc)).map_err(|error| CliError::Io { path: path.into(), error })?;
    }
    Ok(Output::report(&SpectralReport::from(fiber_counts(curve)?)))
}

#[derive(Serialize)]
struct CensusReport {
    k: usize,
    sl2: Sl2Census,
    pgl2: Pgl2Census,
    notes: Vec<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fiber: Option<FiberCompatibility>,
    #[serde(skip_serializing_if = "Option::is_none")]
    paradox: Option<ParadoxReport>,
}

/// Smallest genus `g >= 2` with `g + 1 - k` even and `k <= g + 1`.
fn default_genus(k: usize) -> usize {
    let mut g = (k.max(1) - 1).max(2);
    if (g + 1 - k.min(g + 1)) % 2 != 0 {
        g += 1;
    }
    g
}

pub fn census(g: &Global, k: usize, ell: Option<usize>, genus: Option<usize>) -> Result<Output, CliError> {
    guard_k(g, k)?;
    let c = cen::census(k, g.k_guard)?;
    let (fiber, paradox) = match ell {
        None => (None, None),
        Some(ell) => {
            let genus = genus.unwrap_or_else(|| default_genus(k));
            checked_curve(g, genus, k, ell)?;
            (Some(cen::fiber_compatible(k, ell)?), Some(cen::paradox_report(genus, k, ell)?))
        }
    };
    Ok(Output::report(&CensusReport {
        k,
        sl2: c.sl2,
        pgl2: c.pgl2,
        notes: vec![cen::PGL2_NOTE, cen::SL2_NOTE],
        fiber,
        paradox,
    }))
}

#[derive(Serialize)]
struct CensusSweepRow {
    k: usize,
    sl2: u64,
    pgl2: u64,
    pgl2_alternative_statement: u64,
    recursion: Vec<u64>,
}

#[derive(Serialize)]
struct CensusSweep {
    max_k: usize,
    rows: Vec<CensusSweepRow>,
    notes: Vec<&'static str>,
}

pub fn census_sweep(g: &Global, max_k: usize) -> Result<Output, CliError> {
    guard_k(g, max_k)?;
    let mut rows = Vec::with_capacity(max_k);
    for k in 1..=max_k {
        let c = cen::census(k, g.k_guard)?;
        rows.push(CensusSweepRow {
            k,
            sl2: c.sl2_count(),
            pgl2: c.pgl2_count(),
            pgl2_alternative_statement: c.pgl2.pgl2_alternative_statement,
            recursion: c.pgl2.recursion,
        });
    }
    let table_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let trace: Vec<String> = r.recursion.iter().map(u64::to_string).collect();
            vec![r.k.to_string(), r.sl2.to_string(), r.pgl2.to_string(), trace.join(",")]
        })
        .collect();
    let table = table::render(&["k", "sl2", "pgl2", "recursion"], &table_rows);
    let mut out = Output::report(&CensusSweep { max_k, rows, notes: vec![cen::PGL2_NOTE, cen::SL2_NOTE] });
    out.table = Some(table);
    Ok(out)
}

#[derive(Serialize)]
struct SweepReport {
    g_min: usize,
    g_max: usize,
    points: usize,
    rows: Vec<SpectralReport>,
}

pub fn sweep(g: &Global, g_min: usize, g_max: usize) -> Result<Output, CliError> {
    let grid = RealCurveData::grid(g_min.max(2)..=g_max);
    for c in &grid {
        guard_k(g, c.k)?;
        guard_rank(g, c.homology_rank())?;
    }
    let results = par::map(grid, fiber_counts);
    let rows: Vec<SpectralReport> =
        results.into_iter().map(|r| r.map(SpectralReport::from)).collect::<Result<_, Error>>()?;
    let table_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let c = &r.counts;
            vec![
                c.curve.g.to_string(),
                c.curve.k.to_string(),
                c.curve.ell.to_string(),
                c.rank.to_string(),
                c.jacobian.to_string(),
                c.sl2.to_string(),
                c.pgl2.to_string(),
                c.expected_fiber.to_string(),
                c.checks.all().to_string(),
            ]
        })
        .collect();
    let table = table::render(&["g", "k", "ell", "rank", "jacobian", "sl2", "pgl2", "2^k", "checks"], &table_rows);
    let mut out = Output::report(&SweepReport { g_min, g_max, points: rows.len(), rows });
    out.table = Some(table);
    Ok(out)
}

pub fn selftest(seed: u64, inject_fault: bool) -> Result<Output, CliError> {
    let cfg = SelftestConfig { inject_fault, ..SelftestConfig::new(seed) };
    let report = st::run(&cfg);
    let table_rows: Vec<Vec<String>> = report
        .suites
        .iter()
        .map(|s| {
            let first = s.counterexample.as_ref().map(|f| format!("{} [{}]", f.invariant, f.input));
            vec![s.suite.to_string(), s.cases.to_string(), s.failed.to_string(), first.unwrap_or_default()]
        })
        .collect();
    let failure = report.first_failure.as_ref().map(|f| match f.error {
        Some(name) => format!("selftest failed: {name}: {} ({})", f.invariant, f.input),
        None => format!("selftest failed: {} ({}): {}", f.invariant, f.input, f.detail),
    });
    Ok(Output {
        value: json::report_value(&report),
        table: Some(table::render(&["suite", "cases", "failed", "first counterexample"], &table_rows)),
        failure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_genus_is_valid() {
        for k in 2..12 {
            let g = default_genus(k);
            assert!(RealCurveData::new(g, k, 1).is_ok(), "k = {k}, g = {g}");
        }
        assert_eq!(default_genus(2), 3);
        assert_eq!(default_genus(3), 2);
    }
}
