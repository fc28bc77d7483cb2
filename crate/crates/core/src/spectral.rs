//! Homology of the spectral double cover `S → X` of a type I real curve,
//! with the actions of the sheet involution `i` and the lifted real
//! structure `τ`, and the three involution lattices read off from it.
//!
//! `X` has genus `g = 2h + k - 1` and `k` real circles. The spectral curve
//! has genus `4g - 3`, so `H_1(S, Z)` has rank `8g - 6`. The lifts of the
//! first `ℓ` circles are fixed by `τ`; the lifts of the remaining `k - ℓ`
//! are exchanged by `τ` exactly as by `i`.
//!
//! Basis order (each label a column of the matrices):
//!
//! | family        | range                 | members          | i                          | τ                          |
//! |---------------|-----------------------|------------------|----------------------------|----------------------------|
//! | alpha         | `j = 1..=2h`          | a, ia, τa, τia   | a↔ia, τa↔τia               | a↔τa, ia↔τia               |
//! | beta          | `j = 1..=2g-4`        | b, τb            | `-1`                       | b↔τb                       |
//! | gamma_fixed   | `j = 1..ℓ`            | c, ic            | c↔ic                       | fixed                      |
//! | gamma_swap    | `j = ℓ+1..=k`         | c, ic            | c↔ic                       | c↔ic                       |
//! | gamma_ell     |                       | c_ℓ              | `-c_ℓ - Σ_{j≠ℓ}(c_j + ic_j)` | fixed                    |
//! | delta_fixed   | `j = 1..ℓ`            | d, id            | d↔id                       | `-1`                       |
//! | delta_swap    | `j = ℓ+1..k`          | d, id            | d↔id                       | d ↦ -id, id ↦ -d           |
//! | delta_ell, i_delta_ell, mu |          | d_ℓ, id_ℓ, m     | d_ℓ↔id_ℓ, m ↦ -m           | d_ℓ ↦ m - d_ℓ, id_ℓ ↦ -m - id_ℓ, m fixed |
//!
//! The image of `c_ℓ` under `i` encodes that the boundary of the half
//! surface over `X_0`, namely `Σ_j (c_j + ic_j)`, is null-homologous.

use std::fmt;

use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::involution::InvolutionLattice;
use crate::linalg::{extend_to_unimodular, kernel_basis, solve_in_basis};
use crate::matrix::IntegerMatrix;

/// Genus, real circle count, and number of circles whose lifts `τ` fixes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct RealCurveData {
    pub g: usize,
    pub k: usize,
    pub ell: usize,
    pub h: usize,
}

impl RealCurveData {
    pub fn new(g: usize, k: usize, ell: usize) -> Result<Self> {
        if g < 2 {
            return Err(Error::InvalidCurveData(format!("genus g = {g} must be at least 2")));
        }
        if k > g + 1 {
            return Err(Error::InvalidCurveData(format!(
                "Harnack bound k <= g + 1 violated: k = {k}, g = {g}"
            )));
        }
        if (g + 1 - k) % 2 != 0 {
            return Err(Error::InvalidCurveData(format!(
                "g = 2h + k - 1 has no integer solution h for g = {g}, k = {k}"
            )));
        }
        if ell < 1 || ell + 1 > k {
            return Err(Error::InvalidCurveData(format!(
                "need 1 <= ell <= k - 1, got ell = {ell}, k = {k}"
            )));
        }
        Ok(RealCurveData { g, k, ell, h: (g + 1 - k) / 2 })
    }

    /// Rank of `H_1(S, Z)`: twice the genus `4g - 3` of the spectral curve.
    pub fn homology_rank(&self) -> usize {
        8 * self.g - 6
    }

    /// Every valid `(g, k, ell)` with `g` in the given range.
    pub fn grid(genera: std::ops::RangeInclusive<usize>) -> Vec<RealCurveData> {
        let mut out = Vec::new();
        for g in genera {
            for k in 2..=g + 1 {
                for ell in 1..k {
                    if let Ok(c) = RealCurveData::new(g, k, ell) {
                        out.push(c);
                    }
                }
            }
        }
        out
    }
}

/// How a basis cycle relates to its family representative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Twist {
    Id,
    I,
    Tau,
    ITau,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum CycleLabel {
    Alpha { j: usize, s: Twist },
    Beta { j: usize, s: Twist },
    GammaFixed { j: usize, s: Twist },
    GammaSwap { j: usize, s: Twist },
    GammaEll,
    DeltaFixed { j: usize, s: Twist },
    DeltaSwap { j: usize, s: Twist },
    DeltaEll,
    IDeltaEll,
    Mu,
}

impl CycleLabel {
    /// True for the cycles built from paths between real circles.
    pub fn is_delta_type(&self) -> bool {
        matches!(
            self,
            CycleLabel::DeltaFixed { .. }
                | CycleLabel::DeltaSwap { .. }
                | CycleLabel::DeltaEll
                | CycleLabel::IDeltaEll
                | CycleLabel::Mu
        )
    }
}

impl fmt::Display for CycleLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pre = |s: &Twist| match s {
            Twist::Id => "",
            Twist::I => "i.",
            Twist::Tau => "tau.",
            Twist::ITau => "i.tau.",
        };
        match self {
            CycleLabel::Alpha { j, s } => write!(f, "{}alpha{j}", pre(s)),
            CycleLabel::Beta { j, s } => write!(f, "{}beta{j}", pre(s)),
            CycleLabel::GammaFixed { j, s } | CycleLabel::GammaSwap { j, s } => write!(f, "{}gamma{j}", pre(s)),
            CycleLabel::GammaEll => write!(f, "gamma_ell"),
            CycleLabel::DeltaFixed { j, s } | CycleLabel::DeltaSwap { j, s } => write!(f, "{}delta{j}", pre(s)),
            CycleLabel::DeltaEll => write!(f, "delta_ell"),
            CycleLabel::IDeltaEll => write!(f, "i.delta_ell"),
            CycleLabel::Mu => write!(f, "mu"),
        }
    }
}

/// `H_1(S, Z)` with the matrices of `i_*` and `τ_*` in the labelled basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectralHomology {
    pub curve: RealCurveData,
    pub labels: Vec<CycleLabel>,
    pub sheet: IntegerMatrix,
    pub tau: IntegerMatrix,
}

/// Accumulates the columns of `i_*` and `τ_*` as sparse images.
struct Builder {
    labels: Vec<CycleLabel>,
    sheet: Vec<Vec<(usize, i64)>>,
    tau: Vec<Vec<(usize, i64)>>,
}

impl Builder {
    fn push(&mut self, label: CycleLabel) -> usize {
        self.labels.push(label);
        self.sheet.push(Vec::new());
        self.tau.push(Vec::new());
        self.labels.len() - 1
    }

    fn finish(self, curve: RealCurveData) -> SpectralHomology {
        let n = self.labels.len();
        let dense = |cols: &[Vec<(usize, i64)>]| {
            let mut m = IntegerMatrix::zeros(n, n);
            for (j, col) in cols.iter().enumerate() {
                for &(i, x) in col {
                    m[(i, j)] += BigInt::from(x);
                }
            }
            m
        };
        SpectralHomology { curve, sheet: dense(&self.sheet), tau: dense(&self.tau), labels: self.labels }
    }
}

/// Result of the involution and commutation checks on a constructed basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct StructureChecks {
    pub involutions: bool,
    pub commute: bool,
    pub rank: bool,
}

impl StructureChecks {
    pub fn all(&self) -> bool {
        self.involutions && self.commute && self.rank
    }
}

impl SpectralHomology {
    pub fn build(curve: RealCurveData) -> Result<Self> {
        let RealCurveData { g, k, ell, h } = curve;
        let mut b = Builder { labels: Vec::new(), sheet: Vec::new(), tau: Vec::new() };

        for j in 1..=2 * h {
            let a = b.push(CycleLabel::Alpha { j, s: Twist::Id });
            let ia = b.push(CycleLabel::Alpha { j, s: Twist::I });
            let ta = b.push(CycleLabel::Alpha { j, s: Twist::Tau });
            let ita = b.push(CycleLabel::Alpha { j, s: Twist::ITau });
            for (x, y) in [(a, ia), (ia, a), (ta, ita), (ita, ta)] {
                b.sheet[x] = vec![(y, 1)];
            }
            for (x, y) in [(a, ta), (ta, a), (ia, ita), (ita, ia)] {
                b.tau[x] = vec![(y, 1)];
            }
        }

        for j in 1..=2 * g - 4 {
            let x = b.push(CycleLabel::Beta { j, s: Twist::Id });
            let tx = b.push(CycleLabel::Beta { j, s: Twist::Tau });
            b.sheet[x] = vec![(x, -1)];
            b.sheet[tx] = vec![(tx, -1)];
            b.tau[x] = vec![(tx, 1)];
            b.tau[tx] = vec![(x, 1)];
        }

        // Boundary lifts; gamma_ell is added after the others so its i-image
        // can refer to them.
        let mut boundary = Vec::new();
        for j in 1..ell {
            let c = b.push(CycleLabel::GammaFixed { j, s: Twist::Id });
            let ic = b.push(CycleLabel::GammaFixed { j, s: Twist::I });
            b.sheet[c] = vec![(ic, 1)];
            b.sheet[ic] = vec![(c, 1)];
            b.tau[c] = vec![(c, 1)];
            b.tau[ic] = vec![(ic, 1)];
            boundary.extend([c, ic]);
        }
        for j in ell + 1..=k {
            let c = b.push(CycleLabel::GammaSwap { j, s: Twist::Id });
            let ic = b.push(CycleLabel::GammaSwap { j, s: Twist::I });
            b.sheet[c] = vec![(ic, 1)];
            b.sheet[ic] = vec![(c, 1)];
            b.tau[c] = vec![(ic, 1)];
            b.tau[ic] = vec![(c, 1)];
            boundary.extend([c, ic]);
        }
        let c_ell = b.push(CycleLabel::GammaEll);
        b.tau[c_ell] = vec![(c_ell, 1)];
        let mut image = vec![(c_ell, -1)];
        image.extend(boundary.iter().map(|&x| (x, -1)));
        b.sheet[c_ell] = image;

        for j in 1..ell {
            let d = b.push(CycleLabel::DeltaFixed { j, s: Twist::Id });
            let id = b.push(CycleLabel::DeltaFixed { j, s: Twist::I });
            b.sheet[d] = vec![(id, 1)];
            b.sheet[id] = vec![(d, 1)];
            b.tau[d] = vec![(d, -1)];
            b.tau[id] = vec![(id, -1)];
        }
        for j in ell + 1..k {
            let d = b.push(CycleLabel::DeltaSwap { j, s: Twist::Id });
            let id = b.push(CycleLabel::DeltaSwap { j, s: Twist::I });
            b.sheet[d] = vec![(id, 1)];
            b.sheet[id] = vec![(d, 1)];
            b.tau[d] = vec![(id, -1)];
            b.tau[id] = vec![(d, -1)];
        }

        let d = b.push(CycleLabel::DeltaEll);
        let id = b.push(CycleLabel::IDeltaEll);
        let mu = b.push(CycleLabel::Mu);
        b.sheet[d] = vec![(id, 1)];
        b.sheet[id] = vec![(d, 1)];
        b.sheet[mu] = vec![(mu, -1)];
        b.tau[d] = vec![(mu, 1), (d, -1)];
        b.tau[id] = vec![(mu, -1), (id, -1)];
        b.tau[mu] = vec![(mu, 1)];

        let s = b.finish(curve);
        let checks = s.checks();
        if !checks.all() {
            return Err(Error::InternalInconsistency(format!(
                "spectral basis for {curve:?} fails its structure checks: {checks:?}"
            )));
        }
        Ok(s)
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    pub fn checks(&self) -> StructureChecks {
        let id = IntegerMatrix::identity(self.rank());
        StructureChecks {
            involutions: (&self.sheet * &self.sheet) == id && (&self.tau * &self.tau) == id,
            commute: (&self.sheet * &self.tau) == (&self.tau * &self.sheet),
            rank: self.rank() == self.curve.homology_rank(),
        }
    }

    /// `(H_1(S), τ_*)`: the real structure on the Jacobian of `S`.
    pub fn jacobian_lattice(&self) -> InvolutionLattice {
        InvolutionLattice::new(self.tau.clone()).expect("tau is an involution")
    }

    /// `ker(i_* + 1)` with `τ_*` restricted: the Prym lattice (SL(2) fiber).
    pub fn prym_lattice(&self) -> Result<InvolutionLattice> {
        let n = self.rank();
        let basis = kernel_basis(&(&self.sheet + &IntegerMatrix::identity(n)));
        let restricted = solve_in_basis(&basis, &(&self.tau * &basis))?;
        InvolutionLattice::new(restricted)
    }

    /// `H_1(S) / ker(i_* - 1)` with the induced `τ_*`: the PGL(2) fiber.
    pub fn pgl2_lattice(&self) -> Result<InvolutionLattice> {
        let n = self.rank();
        let fixed = kernel_basis(&(&self.sheet - &IntegerMatrix::identity(n)));
        let m = fixed.cols();
        let (basis, inv) = extend_to_unimodular(&fixed)?;
        let conj = &(&inv * &self.tau) * &basis;
        // τ must preserve the fixed sublattice: lower-left block vanishes.
        for i in m..n {
            for j in 0..m {
                if conj[(i, j)] != BigInt::from(0) {
                    return Err(Error::InternalInconsistency(
                        "tau does not preserve the i-invariant sublattice".into(),
                    ));
                }
            }
        }
        let rest: Vec<usize> = (m..n).collect();
        let quotient = conj.select_rows(&rest).select_columns(&rest);
        InvolutionLattice::new(quotient)
    }

    /// Indices of delta-type basis cycles.
    pub fn delta_indices(&self) -> Vec<usize> {
        (0..self.rank()).filter(|&i| self.labels[i].is_delta_type()).collect()
    }

    /// Labels paired with the two matrices, for export.
    pub fn label_strings(&self) -> Vec<String> {
        self.labels.iter().map(ToString::to_string).collect()
    }
}

/// Real component counts on the three fibers, from the constructed lattices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiberCounts {
    pub curve: RealCurveData,
    pub rank: usize,
    pub checks: StructureChecks,
    #[serde(serialize_with = "crate::json::big::serialize")]
    pub jacobian: BigInt,
    #[serde(serialize_with = "crate::json::big::serialize")]
    pub sl2: BigInt,
    #[serde(serialize_with = "crate::json::big::serialize")]
    pub pgl2: BigInt,
    pub n_sign_jacobian: usize,
    pub n_sign_sl2: usize,
    pub n_sign_pgl2: usize,
    /// Closed forms `2^(2ℓ-1)` and `2^k`, for comparison only.
    #[serde(serialize_with = "crate::json::big::serialize")]
    pub expected_jacobian: BigInt,
    #[serde(serialize_with = "crate::json::big::serialize")]
    pub expected_fiber: BigInt,
}

impl FiberCounts {
    pub fn jacobian_matches_closed_form(&self) -> bool {
        self.jacobian == self.expected_jacobian
    }

    pub fn fibers_match_closed_form(&self) -> bool {
        self.sl2 == self.expected_fiber && self.pgl2 == self.expected_fiber
    }

    pub fn sl2_equals_pgl2(&self) -> bool {
        self.sl2 == self.pgl2
    }
}

pub fn fiber_counts(curve: RealCurveData) -> Result<FiberCounts> {
    let s = SpectralHomology::build(curve)?;
    let jac = s.jacobian_lattice().decompose(false)?;
    let prym = s.prym_lattice()?.decompose(false)?;
    let pgl = s.pgl2_lattice()?.decompose(false)?;
    Ok(FiberCounts {
        curve,
        rank: s.rank(),
        checks: s.checks(),
        jacobian: BigInt::one() << jac.n_sign,
        sl2: BigInt::one() << prym.n_sign,
        pgl2: BigInt::one() << pgl.n_sign,
        n_sign_jacobian: jac.n_sign,
        n_sign_sl2: prym.n_sign,
        n_sign_pgl2: pgl.n_sign,
        expected_jacobian: BigInt::one() << (2 * curve.ell - 1),
        expected_fiber: BigInt::one() << curve.k,
    })
}
