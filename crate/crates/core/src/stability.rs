//! Stability machinery: the named conditions (S0), (S1), (S1'), (S2), the
//! two-parameter semistability inequalities, Hom-vanishing criteria, the
//! classification of stable data with trivial framing, and wall/chamber
//! bookkeeping for the stability parameter.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::field::{rat, Field};
use crate::rep::{
    cm_data, closure_min_t, hom_space, subrep_pairs, BlowupRep, FrameMode, SubrepPair,
};
use crate::subspace::Subspace;

/// The stability parameter `(zeta0, zeta1)`, always an exact rational pair
/// independent of the matrix field.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StabilityParam {
    pub zeta0: BigRational,
    pub zeta1: BigRational,
}

impl StabilityParam {
    pub fn new(zeta0: BigRational, zeta1: BigRational) -> Self {
        StabilityParam { zeta0, zeta1 }
    }

    pub fn from_pairs(z0: (i64, i64), z1: (i64, i64)) -> Self {
        StabilityParam { zeta0: rat(z0.0, z0.1), zeta1: rat(z1.0, z1.1) }
    }

    pub fn from_ints(z0: i64, z1: i64) -> Self {
        StabilityParam { zeta0: rat(z0, 1), zeta1: rat(z1, 1) }
    }

    /// The open region `zeta0 + zeta1 < 0`, `zeta0 < 0`.
    pub fn in_region_ass(&self) -> bool {
        (&self.zeta0 + &self.zeta1).is_negative() && self.zeta0.is_negative()
    }

    /// The boundary ray `zeta0 + zeta1 = 0`, `zeta0 < 0`.
    pub fn on_boundary_ass_prime(&self) -> bool {
        (&self.zeta0 + &self.zeta1).is_zero() && self.zeta0.is_negative()
    }

    /// The chamber `{zeta0 < 0, zeta1 < 0}`.
    pub fn in_zero_chamber(&self) -> bool {
        self.zeta0.is_negative() && self.zeta1.is_negative()
    }

    /// The linear form `m*zeta0 + (m+1)*zeta1` attached to the wall `m`.
    pub fn wall_form(&self, m: u64) -> BigRational {
        let m = BigRational::from_integer(BigInt::from(m));
        &m * &self.zeta0 + (m + BigRational::one()) * &self.zeta1
    }

    /// The wall this parameter lies on, if any.
    pub fn wall_membership(&self) -> Option<u64> {
        let sum = &self.zeta0 + &self.zeta1;
        if sum.is_zero() {
            return None;
        }
        let m = -&self.zeta1 / sum;
        if m.is_integer() && !m.is_negative() {
            let (digits_sign, digits) = m.numer().to_u64_digits();
            if digits.is_empty() {
                return Some(0);
            }
            if digits.len() == 1 && digits_sign != num_bigint::Sign::Minus {
                return Some(digits[0]);
            }
        }
        None
    }

    /// `zeta0*s0 + zeta1*s1` for a dimension pair.
    pub fn pairing(&self, s0: usize, s1: usize) -> BigRational {
        &self.zeta0 * BigRational::from_integer(BigInt::from(s0))
            + &self.zeta1 * BigRational::from_integer(BigInt::from(s1))
    }

    /// The derived weight at the infinity vertex for total dimensions
    /// `(n0, n1)`: `-zeta0*n0 - zeta1*n1`.
    pub fn zeta_inf(&self, n0: usize, n1: usize) -> BigRational {
        -self.pairing(n0, n1)
    }

    pub fn is_balanced(&self, n0: usize, n1: usize) -> bool {
        self.pairing(n0, n1).is_zero()
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        StabilityParam { zeta0: &self.zeta0 * c, zeta1: &self.zeta1 * c }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabilityStatus {
    Stable,
    StrictlySemistable,
    Unstable,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerdictMethod {
    ExhaustiveSubspaces,
    HomCriteria,
    ClosurePair,
    TheoremBacked,
}

/// Certificate attached to a non-stable verdict: either an invariant pair
/// violating (or achieving equality in) the defining inequality, or a
/// single subspace for the plane-side conditions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness<F: Field> {
    Pair(SubrepPair<F>),
    Space(Subspace<F>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilityVerdict<F: Field> {
    pub status: StabilityStatus,
    pub witness: Option<Witness<F>>,
    pub method: VerdictMethod,
}

impl<F: Field> StabilityVerdict<F> {
    pub fn new(status: StabilityStatus, method: VerdictMethod) -> Self {
        StabilityVerdict { status, witness: None, method }
    }

    pub fn with_pair(status: StabilityStatus, pair: SubrepPair<F>, method: VerdictMethod) -> Self {
        StabilityVerdict { status, witness: Some(Witness::Pair(pair)), method }
    }

    pub fn is_semistable(&self) -> bool {
        matches!(self.status, StabilityStatus::Stable | StabilityStatus::StrictlySemistable)
    }

    pub fn is_stable(&self) -> bool {
        self.status == StabilityStatus::Stable
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedCondition {
    S0,
    S1,
    S1Prime,
    S2,
}

/// Check one of the named stability conditions by exhausting invariant
/// subspace pairs (finite fields; the only rational-field fast path is
/// (S0) at dimensions (1,1), where the condition reduces to `B != 0`).
pub fn check_condition<F: Field>(
    x: &BlowupRep<F>,
    which: NamedCondition,
    budget: Option<u128>,
) -> Result<StabilityVerdict<F>> {
    use NamedCondition::*;
    if which == S0 {
        if x.r != 0 || x.n0 != x.n1 {
            return Err(Error::PreconditionViolated(
                "(S0) requires r = 0 and dim V0 = dim V1".into(),
            ));
        }
        if x.n0 == 1 {
            // (S0) at dims (1,1) over any field: the only dangerous pair is
            // (0, V1), invariant iff B1 = B2 = 0.
            return Ok(if x.b1.is_zero() && x.b2.is_zero() {
                StabilityVerdict::with_pair(
                    StabilityStatus::Unstable,
                    SubrepPair {
                        s0: Subspace::zero(x.field.clone(), 1),
                        s1: Subspace::full(x.field.clone(), 1),
                        s_inf: false,
                    },
                    VerdictMethod::TheoremBacked,
                )
            } else {
                StabilityVerdict::new(StabilityStatus::Stable, VerdictMethod::TheoremBacked)
            });
        }
    }
    if x.field.order().is_none() {
        return Err(Error::UnsupportedField);
    }
    let s_inf = which == S2;
    let pairs = subrep_pairs(x, s_inf, budget)?;
    for pair in pairs {
        let (s0, s1) = pair.dims();
        let violated = match which {
            S0 => !(s0 > s1 || (s0 == 0 && s1 == 0) || (s0 == x.n0 && s1 == x.n1)),
            S1 => !(s0 > s1 || (s0 == 0 && s1 == 0)),
            S1Prime => s0 < s1,
            S2 => {
                let (c0, c1) = (x.n0 - s0, x.n1 - s1);
                !(c1 > c0 || (c0 == 0 && c1 == 0))
            }
        };
        if violated {
            return Ok(StabilityVerdict::with_pair(
                StabilityStatus::Unstable,
                pair,
                VerdictMethod::ExhaustiveSubspaces,
            ));
        }
    }
    Ok(StabilityVerdict::new(StabilityStatus::Stable, VerdictMethod::ExhaustiveSubspaces))
}

/// Full semistable/stable/unstable trichotomy for the two-inequality
/// definition. Exhaustive over finite fields. Over the rationals the
/// decision is exact in the `{zeta0 < 0, zeta1 < 0}` chamber (closure
/// pair); elsewhere the Hom-criteria route is attempted and `Unknown` is
/// returned when it cannot certify.
pub fn zeta_semistable<F: Field>(
    x: &BlowupRep<F>,
    zeta: &StabilityParam,
    strict: bool,
    budget: Option<u128>,
) -> Result<StabilityVerdict<F>> {
    if x.r == 0 && strict && !zeta.is_balanced(x.n0, x.n1) {
        return Err(Error::PreconditionViolated(
            "stability with W = 0 requires zeta0*n0 + zeta1*n1 = 0".into(),
        ));
    }
    if x.field.order().is_some() {
        return exhaustive_verdict(x, zeta, budget);
    }
    // Rationals.
    if x.r >= 1 && zeta.in_zero_chamber() {
        // Condition (1) holds automatically; condition (2) says the only
        // invariant pair containing Im i is the full one.
        let t = closure_min_t(x)?;
        let verdict = if t.s0.is_full() && t.s1.is_full() {
            StabilityVerdict::new(StabilityStatus::Stable, VerdictMethod::ClosurePair)
        } else {
            StabilityVerdict::with_pair(StabilityStatus::Unstable, t, VerdictMethod::ClosurePair)
        };
        return Ok(verdict);
    }
    if x.r >= 1 && zeta.in_region_ass() {
        match criteria_semistable(x, zeta, S2Mode::CheckExhaustive) {
            Ok(v) => return Ok(v),
            Err(Error::NeedsS2Certificate) => {
                return Ok(StabilityVerdict::new(
                    StabilityStatus::Unknown,
                    VerdictMethod::HomCriteria,
                ))
            }
            Err(e) => return Err(e),
        }
    }
    Ok(StabilityVerdict::new(StabilityStatus::Unknown, VerdictMethod::HomCriteria))
}

fn exhaustive_verdict<F: Field>(
    x: &BlowupRep<F>,
    zeta: &StabilityParam,
    budget: Option<u128>,
) -> Result<StabilityVerdict<F>> {
    let mut equality: Option<SubrepPair<F>> = None;
    // Condition (1): pairs below Ker j.
    for pair in subrep_pairs(x, false, budget)? {
        let (s0, s1) = pair.dims();
        let value = zeta.pairing(s0, s1);
        if value.is_positive() {
            return Ok(StabilityVerdict::with_pair(
                StabilityStatus::Unstable,
                pair,
                VerdictMethod::ExhaustiveSubspaces,
            ));
        }
        let exceptional = if x.r == 0 {
            (s0 == 0 && s1 == 0) || (s0 == x.n0 && s1 == x.n1)
        } else {
            s0 == 0 && s1 == 0
        };
        if value.is_zero() && !exceptional && equality.is_none() {
            equality = Some(pair);
        }
    }
    // Condition (2): pairs above Im i (skipped for W = 0, where it is
    // equivalent to condition (1)).
    if x.r >= 1 {
        for pair in subrep_pairs(x, true, budget)? {
            let (s0, s1) = pair.dims();
            let value = zeta.pairing(x.n0 - s0, x.n1 - s1);
            if value.is_negative() {
                return Ok(StabilityVerdict::with_pair(
                    StabilityStatus::Unstable,
                    pair,
                    VerdictMethod::ExhaustiveSubspaces,
                ));
            }
            let exceptional = s0 == x.n0 && s1 == x.n1;
            if value.is_zero() && !exceptional && equality.is_none() {
                equality = Some(pair);
            }
        }
    }
    Ok(match equality {
        Some(pair) => StabilityVerdict::with_pair(
            StabilityStatus::StrictlySemistable,
            pair,
            VerdictMethod::ExhaustiveSubspaces,
        ),
        None => StabilityVerdict::new(StabilityStatus::Stable, VerdictMethod::ExhaustiveSubspaces),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum S2Mode {
    /// Verify (S2) by subspace exhaustion (finite fields).
    CheckExhaustive,
    /// Caller certifies (S2); typically from a finite-field
    /// specialization, in which case the overall verdict inherits the
    /// probabilistic nature of the certificate.
    Certified,
}

/// Semistability via Hom-vanishing against the `C_m` family: given (S2),
/// the representation is semistable iff `Hom(C_m, X) = 0` whenever the
/// wall form of `m` is positive and `Hom(X, C_m) = 0` whenever it is
/// negative, with `m` ranging up to `n0 + n1`. On a wall, stability is
/// separated from strict semistability by the two Hom spaces at the wall
/// index.
pub fn criteria_semistable<F: Field>(
    x: &BlowupRep<F>,
    zeta: &StabilityParam,
    s2_mode: S2Mode,
) -> Result<StabilityVerdict<F>> {
    if x.r == 0 {
        return Err(Error::PreconditionViolated("criteria route requires a framing".into()));
    }
    if !zeta.in_region_ass() {
        return Err(Error::PreconditionViolated(
            "criteria route requires zeta0 + zeta1 < 0, zeta0 < 0".into(),
        ));
    }
    if s2_mode == S2Mode::CheckExhaustive {
        if x.field.order().is_none() {
            return Err(Error::NeedsS2Certificate);
        }
        let s2 = check_condition(x, NamedCondition::S2, None)?;
        if s2.status != StabilityStatus::Stable {
            // (S2) failure is itself a zeta-witness in the assumed region.
            return Ok(StabilityVerdict {
                status: StabilityStatus::Unstable,
                witness: s2.witness,
                method: VerdictMethod::HomCriteria,
            });
        }
    }
    let m_max = x.n0 + x.n1;
    for m in 0..=m_max {
        let cm = cm_data(x.field.clone(), m);
        let form = zeta.wall_form(m as u64);
        if form.is_positive() {
            if let Some(pair) = first_hom_image_pair(&cm, x)? {
                return Ok(StabilityVerdict::with_pair(
                    StabilityStatus::Unstable,
                    pair,
                    VerdictMethod::HomCriteria,
                ));
            }
        } else if form.is_negative() {
            if let Some(pair) = first_hom_kernel_pair(x, &cm)? {
                return Ok(StabilityVerdict::with_pair(
                    StabilityStatus::Unstable,
                    pair,
                    VerdictMethod::HomCriteria,
                ));
            }
        }
    }
    // Semistable. A strictly semistable representation has a Jordan-Holder
    // factor C_m on the wall through zeta, visible as a Hom in one of the
    // two directions.
    if let Some(m) = zeta.wall_membership() {
        if (m as usize) <= m_max {
            let cm = cm_data(x.field.clone(), m as usize);
            if let Some(pair) = first_hom_image_pair(&cm, x)? {
                return Ok(StabilityVerdict::with_pair(
                    StabilityStatus::StrictlySemistable,
                    pair,
                    VerdictMethod::HomCriteria,
                ));
            }
            if let Some(pair) = first_hom_kernel_pair(x, &cm)? {
                return Ok(StabilityVerdict::with_pair(
                    StabilityStatus::StrictlySemistable,
                    pair,
                    VerdictMethod::HomCriteria,
                ));
            }
        }
    }
    Ok(StabilityVerdict::new(StabilityStatus::Stable, VerdictMethod::HomCriteria))
}

/// Image pair of some nonzero element of `Hom(c, x)`, if any.
fn first_hom_image_pair<F: Field>(
    c: &BlowupRep<F>,
    x: &BlowupRep<F>,
) -> Result<Option<SubrepPair<F>>> {
    let homs = hom_space(c, x, FrameMode::Free)?;
    let Some(phi) = homs.basis.first() else {
        return Ok(None);
    };
    let s0 = Subspace::span(&phi.xi0.transpose());
    let s1 = Subspace::span(&phi.xi1.transpose());
    let pair = SubrepPair::new(x, s0, s1, false)?;
    Ok(Some(pair))
}

/// Kernel pair of some nonzero element of `Hom(x, c)`, if any.
fn first_hom_kernel_pair<F: Field>(
    x: &BlowupRep<F>,
    c: &BlowupRep<F>,
) -> Result<Option<SubrepPair<F>>> {
    let homs = hom_space(x, c, FrameMode::Free)?;
    let Some(phi) = homs.basis.first() else {
        return Ok(None);
    };
    let t0 = Subspace::from_vectors(x.field.clone(), x.n0, &phi.xi0.kernel_rows());
    let t1 = Subspace::from_vectors(x.field.clone(), x.n1, &phi.xi1.kernel_rows());
    let pair = SubrepPair::new(x, t0, t1, true)?;
    Ok(Some(pair))
}

// ---------------------------------------------------------------------------
// Classification of stable data with W = 0
// ---------------------------------------------------------------------------

/// Outcome of the parameter-by-parameter classification of stable data
/// with trivial framing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum W0Class {
    Empty,
    /// A single point: the data `C_m` at dimensions `(m, m+1)`.
    UniqueCm(u64),
    /// A single point of the transposed kind at dimensions `(m+1, m)`.
    UniqueCmDual(u64),
    /// Dimensions (1,1) on the boundary ray: the moduli space is the
    /// blown-up affine plane.
    BlowupPlane,
    /// Dimensions (1,1) with the sign of `zeta0` flipped: the affine plane.
    AffinePlane,
    /// `zeta = 0` at dimensions (1,1): the punctured affine plane.
    PuncturedAffinePlane,
}

impl std::fmt::Display for W0Class {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            W0Class::Empty => write!(f, "empty"),
            W0Class::UniqueCm(m) => write!(f, "unique_cm({m})"),
            W0Class::UniqueCmDual(m) => write!(f, "unique_cm_dual({m})"),
            W0Class::BlowupPlane => write!(f, "blowup_plane"),
            W0Class::AffinePlane => write!(f, "affine_plane"),
            W0Class::PuncturedAffinePlane => write!(f, "punctured_affine_plane"),
        }
    }
}

/// Classify the stable locus for `W = 0` at the given dimensions and
/// parameter. Requires the balance `zeta0*n0 + zeta1*n1 = 0`.
pub fn classify_w0(dims: (usize, usize), zeta: &StabilityParam) -> Result<W0Class> {
    let (n0, n1) = dims;
    if !zeta.is_balanced(n0, n1) {
        return Err(Error::PreconditionViolated(
            "classification requires zeta0*n0 + zeta1*n1 = 0".into(),
        ));
    }
    if n0 == 0 && n1 == 0 {
        return Ok(W0Class::Empty);
    }
    let sum = &zeta.zeta0 + &zeta.zeta1;
    if sum.is_negative() {
        if zeta.zeta0.is_negative() {
            // Interior region: a single point C_m exactly on the wall.
            if n1 == n0 + 1 {
                let m = n0 as u64;
                if zeta.wall_form(m).is_zero() {
                    return Ok(W0Class::UniqueCm(m));
                }
            }
            Ok(W0Class::Empty)
        } else {
            // zeta0 >= 0: only (1, 0) with zeta0 = 0 survives.
            if dims == (1, 0) && zeta.zeta0.is_zero() {
                Ok(W0Class::UniqueCmDual(0))
            } else {
                Ok(W0Class::Empty)
            }
        }
    } else if sum.is_positive() {
        if zeta.zeta1.is_positive() {
            if n0 == n1 + 1 {
                let m = n1 as u64;
                // Dual wall form (m+1)*zeta0 + m*zeta1.
                let mm = BigRational::from_integer(BigInt::from(m));
                let form = (&mm + BigRational::one()) * &zeta.zeta0 + &mm * &zeta.zeta1;
                if form.is_zero() {
                    return Ok(W0Class::UniqueCmDual(m));
                }
            }
            Ok(W0Class::Empty)
        } else {
            // zeta1 <= 0: only (0, 1) with zeta1 = 0 survives.
            if dims == (0, 1) && zeta.zeta1.is_zero() {
                Ok(W0Class::UniqueCm(0))
            } else {
                Ok(W0Class::Empty)
            }
        }
    } else {
        // zeta0 + zeta1 = 0. Balance forces n0 = n1 unless zeta = 0.
        if zeta.zeta0.is_negative() {
            if dims == (1, 1) {
                Ok(W0Class::BlowupPlane)
            } else {
                Ok(W0Class::Empty)
            }
        } else if zeta.zeta0.is_positive() {
            if dims == (1, 1) {
                Ok(W0Class::AffinePlane)
            } else {
                Ok(W0Class::Empty)
            }
        } else if dims == (1, 1) {
            Ok(W0Class::PuncturedAffinePlane)
        } else {
            Ok(W0Class::Empty)
        }
    }
}

// ---------------------------------------------------------------------------
// Walls and chambers
// ---------------------------------------------------------------------------

/// Topological data of the sheaves: rank, degree along the exceptional
/// curve, and the instanton number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChernData {
    pub r: u64,
    pub k: i64,
    pub n: BigRational,
}

impl ChernData {
    pub fn new(r: u64, k: i64, n: BigRational) -> Result<Self> {
        let c = ChernData { r, k, n };
        c.dims()?;
        Ok(c)
    }

    /// The dimension vector `(n0, n1)` determined by `(r, k, n)`:
    /// `n0 = n + k^2/(2r) - k/2`, `n1 = n0 + k`. Both must be nonnegative
    /// integers.
    pub fn dims(&self) -> Result<(usize, usize)> {
        if self.r == 0 {
            return Err(Error::InvalidChernData("rank must be positive".into()));
        }
        let k = BigRational::from_integer(BigInt::from(self.k));
        let two_r = BigRational::from_integer(BigInt::from(2 * self.r as i64));
        let n0 = &self.n + &k * &k / &two_r - &k / BigRational::from_integer(BigInt::from(2));
        let n1 = &n0 + &k;
        for v in [&n0, &n1] {
            if !v.is_integer() || v.is_negative() {
                return Err(Error::InvalidChernData(format!(
                    "derived dimensions ({n0}, {n1}) are not nonnegative integers"
                )));
            }
        }
        let to_usize = |v: &BigRational| -> Result<usize> {
            let (_, digits) = v.numer().to_u64_digits();
            match digits.len() {
                0 => Ok(0),
                1 => Ok(digits[0] as usize),
                _ => Err(Error::InvalidChernData("dimension overflows".into())),
            }
        };
        Ok((to_usize(&n0)?, to_usize(&n1)?))
    }
}

/// Candidate walls for the given Chern data: indices `m >= 0` whose
/// dimension vector `(m, m+1)` fits inside `(n0, n1)`. This is the
/// necessary condition for a Jordan-Holder factor `C_m`; whether a given
/// candidate is an actual wall is decided separately by a witness search.
pub fn candidate_walls(c: &ChernData) -> Result<Vec<u64>> {
    let (n0, n1) = c.dims()?;
    if n1 == 0 {
        return Ok(Vec::new());
    }
    let top = n0.min(n1 - 1) as u64;
    Ok((0..=top).collect())
}

/// A parameter inside the chamber lying just below wall `m` (all wall
/// forms with index `>= m` negative, all with index `< m` positive).
/// `m = max(walls) + 1` selects the chamber adjacent to the boundary ray.
pub fn chamber_rep(m: u64, walls: &[u64]) -> Result<StabilityParam> {
    let max_wall = walls.iter().copied().max();
    let sentinel = max_wall.map(|w| w + 1).unwrap_or(0);
    if !(walls.contains(&m) || m == sentinel) {
        return Err(Error::PreconditionViolated(format!(
            "m = {m} is neither a wall nor the sentinel {sentinel}"
        )));
    }
    let zeta1 = if m == 0 {
        rat(-1, 2)
    } else if walls.contains(&m) {
        // Midpoint of the consecutive wall slopes (m-1)/m and m/(m+1).
        let lo = rat((m - 1) as i64, m as i64);
        let hi = rat(m as i64, (m + 1) as i64);
        (lo + hi) / rat(2, 1)
    } else {
        // Sentinel: just below the boundary slope 1.
        let n = max_wall.unwrap();
        let lo = rat(n as i64, (n + 1) as i64);
        (lo + rat(1, 1)) / rat(2, 1)
    };
    let zeta = StabilityParam::new(rat(-1, 1), zeta1);
    for &w in walls {
        let form = zeta.wall_form(w);
        let ok = if w < m { form.is_positive() } else { form.is_negative() };
        if !ok {
            return Err(Error::PreconditionViolated(format!(
                "chamber representative fails the sign check at wall {w}"
            )));
        }
    }
    Ok(zeta)
}

/// Search for a strictly semistable representation at the wall `m`
/// (exhaustively, over a finite field), certifying that the candidate
/// wall is an actual wall for these dimensions.
pub fn wall_witness<F: Field>(
    field: &F,
    dims: (usize, usize, usize),
    m: u64,
    budget: Option<u128>,
) -> Result<Option<BlowupRep<F>>> {
    // A parameter on the wall itself: (-(m+1), m) up to scale.
    let zeta = StabilityParam::from_ints(-(m as i64 + 1), m as i64);
    for x in crate::rep::enumerate_reps(field, dims, true, budget)? {
        let verdict = zeta_semistable(&x, &zeta, true, None)?;
        if verdict.status == StabilityStatus::StrictlySemistable {
            return Ok(Some(x));
        }
    }
    Ok(None)
}

// ---------------------------------------------------------------------------
// The blown-up plane as dims-(1,1) stable triples
// ---------------------------------------------------------------------------

/// A point of the blown-up affine plane: `((z1, z2), [z : w])` with
/// `z1 w = z2 z`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlowupPoint<F: Field> {
    pub z1: F::Elem,
    pub z2: F::Elem,
    pub z: F::Elem,
    pub w: F::Elem,
}

impl<F: Field> BlowupPoint<F> {
    /// Validate and normalize: `(z, w)` is projective, scaled so its first
    /// nonzero coordinate is 1.
    pub fn new(field: &F, z1: F::Elem, z2: F::Elem, z: F::Elem, w: F::Elem) -> Result<Self> {
        if field.is_zero(&z) && field.is_zero(&w) {
            return Err(Error::InvalidPoint);
        }
        let lhs = field.mul(&z1, &w);
        let rhs = field.mul(&z2, &z);
        if lhs != rhs {
            return Err(Error::InvalidPoint);
        }
        let scale = if !field.is_zero(&z) { field.inv(&z)? } else { field.inv(&w)? };
        Ok(BlowupPoint {
            z1,
            z2,
            z: field.mul(&z, &scale),
            w: field.mul(&w, &scale),
        })
    }
}

/// Scale a dims-(1,1) triple to its canonical torus representative: the
/// first nonzero of `(B1, B2)` becomes 1 and `d` absorbs the inverse.
pub fn normalize_triple<F: Field>(
    field: &F,
    b1: &F::Elem,
    b2: &F::Elem,
    d: &F::Elem,
) -> Result<(F::Elem, F::Elem, F::Elem)> {
    let lead = if !field.is_zero(b1) { b1 } else { b2 };
    if field.is_zero(lead) {
        return Err(Error::NotS0Stable);
    }
    let inv = field.inv(lead)?;
    Ok((field.mul(b1, &inv), field.mul(b2, &inv), field.mul(d, lead)))
}

/// Forward map of the dims-(1,1) classification: an (S0)-stable scalar
/// triple goes to `((B1 d, B2 d), [B1 : B2])`.
pub fn triple_to_point<F: Field>(
    field: &F,
    b1: &F::Elem,
    b2: &F::Elem,
    d: &F::Elem,
) -> Result<BlowupPoint<F>> {
    if field.is_zero(b1) && field.is_zero(b2) {
        return Err(Error::NotS0Stable);
    }
    BlowupPoint::new(field, field.mul(b1, d), field.mul(b2, d), b1.clone(), b2.clone())
}

/// Inverse map: `B1 = z`, `B2 = w`, `d = z1/z` on the chart `z != 0`,
/// `d = z2/w` otherwise. Output is torus-normalized.
pub fn point_to_triple<F: Field>(
    field: &F,
    pt: &BlowupPoint<F>,
) -> Result<(F::Elem, F::Elem, F::Elem)> {
    let d = if !field.is_zero(&pt.z) {
        field.div(&pt.z1, &pt.z)?
    } else {
        field.div(&pt.z2, &pt.w)?
    };
    normalize_triple(field, &pt.z, &pt.w, &d)
}
