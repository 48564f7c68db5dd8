//! Exhaustive finite-field sweeps: enumerate representations at fixed
//! dimensions and check a named assertion on every one of them.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::kronecker::{blocks_to_pencil, enumerate_pencil_classes};
use crate::linsys::BlockMap;
use crate::mat::Mat;
use crate::monad::{scan_beta, BetaScan};
use crate::rep::{
    cm_data, enumerate_reps, is_isomorphic, BlowupRep, SubrepPair,
};
use crate::stability::{
    check_condition, criteria_semistable, zeta_semistable, NamedCondition, S2Mode,
    StabilityParam, StabilityStatus,
};
use crate::subspace::enumerate_subspaces;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAssertion {
    /// Definition-level and Hom-criteria semistability agree.
    SsEquivalence,
    /// The stable set with trivial framing matches the classification.
    W0Classification,
    /// (S2) agrees with pointwise surjectivity of the second monad map.
    KingEquivalence,
}

impl std::str::FromStr for SweepAssertion {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ss-equivalence" => Ok(SweepAssertion::SsEquivalence),
            "w0-classification" => Ok(SweepAssertion::W0Classification),
            "king-equivalence" => Ok(SweepAssertion::KingEquivalence),
            other => Err(Error::MalformedInput(format!("unknown assertion set {other:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub checked: u64,
    pub failures: u64,
    pub first_failure: Option<String>,
    pub notes: Vec<String>,
}

impl SweepOutcome {
    fn new() -> Self {
        SweepOutcome { checked: 0, failures: 0, first_failure: None, notes: Vec::new() }
    }

    fn fail(&mut self, description: String) {
        self.failures += 1;
        if self.first_failure.is_none() {
            self.first_failure = Some(description);
        }
    }
}

/// Run one assertion set over every flat tuple at the given dimensions.
pub fn sweep<F: Field>(
    field: &F,
    dims: (usize, usize, usize),
    zeta: Option<&StabilityParam>,
    assertion: SweepAssertion,
    budget: Option<u128>,
) -> Result<SweepOutcome> {
    match assertion {
        SweepAssertion::SsEquivalence => {
            let zeta = zeta.ok_or_else(|| {
                Error::PreconditionViolated("ss-equivalence needs a stability parameter".into())
            })?;
            sweep_ss_equivalence(field, dims, zeta, budget)
        }
        SweepAssertion::W0Classification => {
            let zeta = zeta.ok_or_else(|| {
                Error::PreconditionViolated("w0-classification needs a stability parameter".into())
            })?;
            if dims.2 != 0 {
                return Err(Error::PreconditionViolated(
                    "w0-classification applies to r = 0 dimensions".into(),
                ));
            }
            sweep_w0_classification(field, (dims.0, dims.1), zeta, budget)
        }
        SweepAssertion::KingEquivalence => sweep_king_equivalence(field, dims, budget),
    }
}

fn sweep_ss_equivalence<F: Field>(
    field: &F,
    dims: (usize, usize, usize),
    zeta: &StabilityParam,
    budget: Option<u128>,
) -> Result<SweepOutcome> {
    if dims.2 == 0 {
        return Err(Error::PreconditionViolated(
            "ss-equivalence compares the framed criteria; r must be positive".into(),
        ));
    }
    let mut out = SweepOutcome::new();
    for x in enumerate_reps(field, dims, true, budget)? {
        let a = zeta_semistable(&x, zeta, true, None)?;
        let b = criteria_semistable(&x, zeta, S2Mode::CheckExhaustive)?;
        out.checked += 1;
        if a.status != b.status {
            out.fail(format!(
                "definition gives {:?}, criteria give {:?} at {:?}",
                a.status, b.status, x
            ));
        }
    }
    Ok(out)
}

fn sweep_king_equivalence<F: Field>(
    field: &F,
    dims: (usize, usize, usize),
    budget: Option<u128>,
) -> Result<SweepOutcome> {
    let mut out = SweepOutcome::new();
    for x in enumerate_reps(field, dims, true, budget)? {
        let s2 = check_condition(&x, NamedCondition::S2, None)?.status == StabilityStatus::Stable;
        let surj = scan_beta(&x, None, None)? == BetaScan::SurjectiveEverywhere;
        out.checked += 1;
        if s2 != surj {
            out.fail(format!("(S2) = {s2} but beta scan = {surj} at {x:?}"));
        }
    }
    Ok(out)
}

/// Which exhaustive route enumerates the stable set with trivial framing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum W0Route {
    /// All matrix tuples (bounded by `q^entries`).
    Raw,
    /// All pencil equivalence classes, each paired with every `d`
    /// satisfying the linearized relation. Covers every orbit because
    /// stability is invariant under the group action.
    CanonicalPencils,
}

/// Representatives of the isomorphism classes of stable `(B1, B2, d)`
/// tuples at the given dimensions and parameter.
pub fn w0_stable_classes<F: Field>(
    field: &F,
    dims: (usize, usize),
    zeta: &StabilityParam,
    route: W0Route,
    budget: Option<u128>,
) -> Result<Vec<BlowupRep<F>>> {
    let (n0, n1) = dims;
    let mut classes: Vec<BlowupRep<F>> = Vec::new();
    let consider = |x: BlowupRep<F>, classes: &mut Vec<BlowupRep<F>>| -> Result<()> {
        for c in classes.iter() {
            if is_isomorphic(c, &x, None)? {
                return Ok(());
            }
        }
        classes.push(x);
        Ok(())
    };
    match route {
        W0Route::Raw => {
            let checker = W0StabilityChecker::new(field, dims, zeta, budget)?;
            for x in enumerate_reps(field, (n0, n1, 0), true, budget)? {
                if checker.is_stable(&x)? {
                    consider(x, &mut classes)?;
                }
            }
        }
        W0Route::CanonicalPencils => {
            let checker = W0StabilityChecker::new(field, dims, zeta, budget)?;
            for blocks in enumerate_pencil_classes(field, n0, n1)? {
                let (b1, b2) = blocks_to_pencil(field, &blocks);
                // All d with B1 d B2 = B2 d B1.
                let mut bm = BlockMap::new(field.clone(), vec![(n1, n0)], vec![(n0, n1)]);
                bm.term(0, 0, b1.clone(), b2.clone(), false);
                bm.term(0, 0, b2.clone(), b1.clone(), true);
                let kernel = bm.kernel();
                let elems = field.elements().expect("finite");
                let dim = kernel.len() as u32;
                let total = (elems.len() as u128).checked_pow(dim).filter(|&t| {
                    t <= budget.unwrap_or(crate::rep::DEFAULT_REP_BUDGET)
                });
                let Some(total) = total else {
                    return Err(Error::BoundExceeded(format!(
                        "flat d-space too large: q^{dim}"
                    )));
                };
                let mut counter = vec![0usize; kernel.len()];
                for _ in 0..total {
                    let mut d = Mat::zeros(field.clone(), n1, n0);
                    for (slot, k) in counter.iter().zip(&kernel) {
                        if *slot != 0 {
                            d = d.add(&k[0].scale(&elems[*slot]));
                        }
                    }
                    let x = BlowupRep::new(
                        field.clone(),
                        b1.clone(),
                        b2.clone(),
                        d,
                        Mat::zeros(field.clone(), n0, 0),
                        Mat::zeros(field.clone(), 0, n1),
                    )?;
                    debug_assert!(x.is_flat());
                    if checker.is_stable(&x)? {
                        consider(x, &mut classes)?;
                    }
                    let mut carry = true;
                    for slot in counter.iter_mut() {
                        if !carry {
                            break;
                        }
                        *slot += 1;
                        if *slot == elems.len() {
                            *slot = 0;
                        } else {
                            carry = false;
                        }
                    }
                    if carry {
                        break;
                    }
                }
            }
        }
    }
    Ok(classes)
}

/// Precomputed subspace tables for fast repeated stability checks with
/// trivial framing at fixed dimensions.
struct W0StabilityChecker<F: Field> {
    s0s: Vec<crate::subspace::Subspace<F>>,
    s1s: Vec<crate::subspace::Subspace<F>>,
    n0: usize,
    n1: usize,
    values: Vec<Vec<ValueClass>>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum ValueClass {
    Negative,
    ZeroExceptional,
    ZeroProper,
    Positive,
}

impl<F: Field> W0StabilityChecker<F> {
    fn new(
        field: &F,
        dims: (usize, usize),
        zeta: &StabilityParam,
        budget: Option<u128>,
    ) -> Result<Self> {
        use num_traits::Signed;
        use num_traits::Zero;
        let (n0, n1) = dims;
        let s0s = enumerate_subspaces(field, n0, budget)?;
        let s1s = enumerate_subspaces(field, n1, budget)?;
        let mut values = Vec::with_capacity(s0s.len());
        for s0 in &s0s {
            let mut row = Vec::with_capacity(s1s.len());
            for s1 in &s1s {
                let v = zeta.pairing(s0.dim(), s1.dim());
                let class = if v.is_positive() {
                    ValueClass::Positive
                } else if !v.is_zero() {
                    ValueClass::Negative
                } else {
                    let trivial = s0.dim() == 0 && s1.dim() == 0;
                    let full = s0.dim() == n0 && s1.dim() == n1;
                    if trivial || full {
                        ValueClass::ZeroExceptional
                    } else {
                        ValueClass::ZeroProper
                    }
                };
                row.push(class);
            }
            values.push(row);
        }
        Ok(W0StabilityChecker { s0s, s1s, n0, n1, values })
    }

    /// Strict stability in the sense of the trivial-framing definition.
    fn is_stable(&self, x: &BlowupRep<F>) -> Result<bool> {
        debug_assert_eq!((x.n0, x.n1, x.r), (self.n0, self.n1, 0));
        for (i0, s0) in self.s0s.iter().enumerate() {
            // The sign table skips pairs that cannot decide anything.
            for (i1, s1) in self.s1s.iter().enumerate() {
                match self.values[i0][i1] {
                    ValueClass::Negative | ValueClass::ZeroExceptional => continue,
                    ValueClass::Positive | ValueClass::ZeroProper => {}
                }
                let pair = SubrepPair { s0: s0.clone(), s1: s1.clone(), s_inf: false };
                if pair.is_valid_for(x) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

fn sweep_w0_classification<F: Field>(
    field: &F,
    dims: (usize, usize),
    zeta: &StabilityParam,
    budget: Option<u128>,
) -> Result<SweepOutcome> {
    use crate::stability::{classify_w0, W0Class};
    let mut out = SweepOutcome::new();
    let expected = classify_w0(dims, zeta)?;
    let (n0, n1) = dims;
    let entries = 3 * n0 * n1;
    let q = field.order().ok_or(Error::UnsupportedField)?;
    let route = if q.checked_pow(entries as u32).map(|t| t <= (1 << 18)).unwrap_or(false) {
        W0Route::Raw
    } else {
        W0Route::CanonicalPencils
    };
    let classes = w0_stable_classes(field, dims, zeta, route, budget)?;
    out.checked = 1;
    out.notes.push(format!("route {route:?}; {} stable class(es)", classes.len()));
    match expected {
        W0Class::UniqueCm(m) => {
            let cm = cm_data(field.clone(), m as usize);
            if classes.len() != 1 || !is_isomorphic(&classes[0], &cm, None)? {
                out.fail(format!(
                    "expected exactly the class of C_{m}, found {} class(es)",
                    classes.len()
                ));
            }
        }
        W0Class::Empty => {
            if !classes.is_empty() {
                out.fail(format!("expected no stable classes, found {}", classes.len()));
            }
        }
        other => {
            out.notes.push(format!("classification {other} not checked by enumeration"));
        }
    }
    Ok(out)
}

/// Raw-vs-canonical agreement of the stable class sets; used to validate
/// the orbit enumeration against plain enumeration where both fit.
pub fn w0_routes_agree<F: Field>(
    field: &F,
    dims: (usize, usize),
    zeta: &StabilityParam,
    budget: Option<u128>,
) -> Result<bool> {
    let raw = w0_stable_classes(field, dims, zeta, W0Route::Raw, budget)?;
    let canonical = w0_stable_classes(field, dims, zeta, W0Route::CanonicalPencils, budget)?;
    if raw.len() != canonical.len() {
        return Ok(false);
    }
    for c in &canonical {
        let mut found = false;
        for r in &raw {
            if is_isomorphic(c, r, None)? {
                found = true;
                break;
            }
        }
        if !found {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::GaloisField;

    fn f2() -> GaloisField {
        GaloisField::prime(2).unwrap()
    }

    #[test]
    fn ss_equivalence_at_dims_111() {
        let zeta = StabilityParam::from_ints(-3, 1);
        let out = sweep(&f2(), (1, 1, 1), Some(&zeta), SweepAssertion::SsEquivalence, None)
            .unwrap();
        assert_eq!(out.checked, 24);
        assert_eq!(out.failures, 0, "{:?}", out.first_failure);
    }

    #[test]
    fn w0_classification_at_dims_12() {
        let zeta = StabilityParam::from_ints(-2, 1);
        let out = sweep(&f2(), (1, 2, 0), Some(&zeta), SweepAssertion::W0Classification, None)
            .unwrap();
        assert_eq!(out.failures, 0, "{:?}", out.first_failure);
    }

    #[test]
    fn king_equivalence_small() {
        let out = sweep(&f2(), (1, 1, 1), None, SweepAssertion::KingEquivalence, None).unwrap();
        assert_eq!(out.checked, 24);
        assert_eq!(out.failures, 0, "{:?}", out.first_failure);
    }

    #[test]
    fn w0_routes_agree_at_small_dims() {
        let zeta = StabilityParam::from_ints(-2, 1);
        assert!(w0_routes_agree(&f2(), (1, 2), &zeta, None).unwrap());
        let zeta = StabilityParam::from_ints(-3, 1);
        assert!(w0_routes_agree(&f2(), (1, 3), &zeta, None).unwrap());
    }
}
