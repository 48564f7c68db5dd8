//! Pointwise evaluation of the three-term complex attached to a
//! representation, on the surface `{z1 w = z2 z}` in `P^2 x P^1`.
//!
//! Line-bundle fibers are trivialized through the canonical point
//! normalization, so both maps become plain matrices over the point's
//! field; scans over all rational points of bounded-degree extensions
//! certify surjectivity/injectivity loci and fiber dimension profiles.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::mat::Mat;
use crate::rep::{cm_data, hom_dim, BlowupRep};

/// A point `([z0 : z1 : z2], [z : w])` with `z1 w = z2 z`, both factors
/// normalized so their first nonzero coordinate is 1.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SurfacePoint<F: Field> {
    pub field: F,
    pub z0: F::Elem,
    pub z1: F::Elem,
    pub z2: F::Elem,
    pub z: F::Elem,
    pub w: F::Elem,
}

impl<F: Field> SurfacePoint<F> {
    pub fn new(
        field: F,
        z0: F::Elem,
        z1: F::Elem,
        z2: F::Elem,
        z: F::Elem,
        w: F::Elem,
    ) -> Result<Self> {
        if field.is_zero(&z0) && field.is_zero(&z1) && field.is_zero(&z2) {
            return Err(Error::InvalidPoint);
        }
        if field.is_zero(&z) && field.is_zero(&w) {
            return Err(Error::InvalidPoint);
        }
        if field.mul(&z1, &w) != field.mul(&z2, &z) {
            return Err(Error::InvalidPoint);
        }
        let norm2 = |a: &F::Elem, b: &F::Elem, c: &F::Elem| -> Result<(F::Elem, F::Elem, F::Elem)> {
            let lead = if !field.is_zero(a) {
                a
            } else if !field.is_zero(b) {
                b
            } else {
                c
            };
            let inv = field.inv(lead)?;
            Ok((field.mul(a, &inv), field.mul(b, &inv), field.mul(c, &inv)))
        };
        let (z0, z1, z2) = norm2(&z0, &z1, &z2)?;
        let lead = if !field.is_zero(&z) { &z } else { &w };
        let inv = field.inv(lead)?;
        let (z, w) = (field.mul(&z, &inv), field.mul(&w, &inv));
        Ok(SurfacePoint { field, z0, z1, z2, z, w })
    }

    pub fn on_line_at_infinity(&self) -> bool {
        self.field.is_zero(&self.z0)
    }

    pub fn on_exceptional_curve(&self) -> bool {
        self.field.is_zero(&self.z1) && self.field.is_zero(&self.z2)
    }
}

/// Default bound on the number of points one scan may visit.
pub const DEFAULT_POINT_BUDGET: u128 = 1 << 24;

/// All points of the surface over the degree-`ext_degree` extension of
/// the base field, in canonical order: the affine chart `z0 = 1` fibered
/// over `[z : w]`, then the line at infinity.
pub fn enumerate_points<F: Field>(
    field: &F,
    ext_degree: u32,
    budget: Option<u128>,
) -> Result<(F, Vec<SurfacePoint<F>>)> {
    let base_q = field.order().ok_or(Error::UnsupportedField)?;
    let budget = budget.unwrap_or(DEFAULT_POINT_BUDGET);
    if base_q
        .checked_pow(2 * ext_degree)
        .map(|n| n > budget)
        .unwrap_or(true)
    {
        return Err(Error::BoundExceeded(format!(
            "q^(2*{ext_degree}) exceeds the point budget {budget}"
        )));
    }
    let ext = field.extension(ext_degree)?;
    let elems = ext.elements().expect("finite field enumerates");
    let one = ext.one();
    let zero = ext.zero();
    // P^1 directions: [1 : t] then [0 : 1].
    let mut directions: Vec<(F::Elem, F::Elem)> =
        elems.iter().map(|t| (one.clone(), t.clone())).collect();
    directions.push((zero.clone(), one.clone()));
    let mut out = Vec::new();
    for (z, w) in &directions {
        for t in &elems {
            let z1 = ext.mul(t, z);
            let z2 = ext.mul(t, w);
            out.push(SurfacePoint::new(
                ext.clone(),
                one.clone(),
                z1,
                z2,
                z.clone(),
                w.clone(),
            )?);
        }
    }
    for (z, w) in &directions {
        out.push(SurfacePoint::new(
            ext.clone(),
            zero.clone(),
            z.clone(),
            w.clone(),
            z.clone(),
            w.clone(),
        )?);
    }
    Ok((ext, out))
}

/// The two maps of the complex evaluated at a point.
#[derive(Clone, Debug)]
pub struct MonadEval<F: Field> {
    pub alpha: Mat<F>,
    pub beta: Mat<F>,
    pub point: SurfacePoint<F>,
}

/// Substitute the point's coordinates into the block matrices. The point
/// may live over an extension of the representation's field.
pub fn alpha_beta_at<F: Field>(x: &BlowupRep<F>, pt: &SurfacePoint<F>) -> Result<MonadEval<F>> {
    let xe;
    let x = if x.field == pt.field {
        x
    } else {
        let data = x.field.embedding_data(&pt.field)?;
        xe = x.embed_into(&pt.field, &data);
        &xe
    };
    Ok(alpha_beta_same_field(x, pt))
}

fn scaled_identity<F: Field>(field: &F, n: usize, c: &F::Elem) -> Mat<F> {
    let mut m = Mat::zeros(field.clone(), n, n);
    for k in 0..n {
        m.set(k, k, c.clone());
    }
    m
}

fn alpha_beta_same_field<F: Field>(x: &BlowupRep<F>, pt: &SurfacePoint<F>) -> MonadEval<F> {
    let f = x.field.clone();
    let (n0, n1, r) = x.dims();
    let neg = |m: &Mat<F>| m.neg();
    let sc = |m: &Mat<F>, c: &F::Elem| m.scale(c);
    let db1 = x.d.mul(&x.b1);
    let db2 = x.d.mul(&x.b2);
    // alpha columns: (V0 | V1).
    let alpha_rows: Vec<Mat<F>> = vec![
        scaled_identity(&f, n0, &pt.z).hstack(&sc(&x.b1, &pt.z0)),
        scaled_identity(&f, n0, &pt.w).hstack(&sc(&x.b2, &pt.z0)),
        Mat::zeros(f.clone(), n1, n0)
            .hstack(&scaled_identity(&f, n1, &pt.z1).sub(&sc(&db1, &pt.z0))),
        Mat::zeros(f.clone(), n1, n0)
            .hstack(&scaled_identity(&f, n1, &pt.z2).sub(&sc(&db2, &pt.z0))),
        Mat::zeros(f.clone(), r, n0).hstack(&sc(&x.j, &pt.z0)),
    ];
    let mut alpha = alpha_rows[0].clone();
    for row in &alpha_rows[1..] {
        alpha = alpha.vstack(row);
    }
    // beta rows: (V0 | V1) target; columns split as C^2(x)V0, C^2(x)V1, W.
    let beta_top = scaled_identity(&f, n0, &pt.z2)
        .hstack(&neg(&scaled_identity(&f, n0, &pt.z1)))
        .hstack(&sc(&x.b2, &pt.z0))
        .hstack(&neg(&sc(&x.b1, &pt.z0)))
        .hstack(&sc(&x.i, &pt.z0));
    let beta_bot = sc(&x.d, &pt.w)
        .hstack(&neg(&sc(&x.d, &pt.z)))
        .hstack(&scaled_identity(&f, n1, &pt.w))
        .hstack(&neg(&scaled_identity(&f, n1, &pt.z)))
        .hstack(&Mat::zeros(f.clone(), n1, r));
    let beta = beta_top.vstack(&beta_bot);
    MonadEval { alpha, beta, point: pt.clone() }
}

/// Fiber dimensions `(h_minus, h_zero, h_plus)` at one point: kernel of
/// alpha, middle cohomology, cokernel of beta. Valid when `mu(X) = 0`.
pub fn fiber_at<F: Field>(x: &BlowupRep<F>, pt: &SurfacePoint<F>) -> Result<(usize, usize, usize)> {
    let ev = alpha_beta_at(x, pt)?;
    let (n0, n1, r) = x.dims();
    let rank_a = ev.alpha.rank();
    let rank_b = ev.beta.rank();
    let h_minus = (n0 + n1) - rank_a;
    let h_plus = (n0 + n1) - rank_b;
    let middle = 2 * n0 + 2 * n1 + r;
    let h_zero = (middle - rank_b) - rank_a;
    Ok((h_minus, h_zero, h_plus))
}

/// Fiber dimensions at a list of points, in the given order.
#[derive(Clone, Debug)]
pub struct FiberProfile<F: Field> {
    pub entries: Vec<(SurfacePoint<F>, (usize, usize, usize))>,
}

impl<F: Field> FiberProfile<F> {
    /// `h_minus - h_zero + h_plus` is `-r` at every point.
    pub fn euler_constant(&self, r: usize) -> bool {
        self.entries.iter().all(|(_, (hm, h0, hp))| {
            *hm as isize - *h0 as isize + *hp as isize == -(r as isize)
        })
    }
}

pub fn fiber_profile<F: Field>(
    x: &BlowupRep<F>,
    pts: &[SurfacePoint<F>],
) -> Result<FiberProfile<F>> {
    let mut entries = Vec::with_capacity(pts.len());
    for pt in pts {
        entries.push((pt.clone(), fiber_at(x, pt)?));
    }
    Ok(FiberProfile { entries })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BetaScan<F: Field> {
    SurjectiveEverywhere,
    FailsAt(SurfacePoint<F>),
}

/// Check surjectivity of the second map at every rational point of every
/// extension up to `max_ext` (default `n0 + n1`, the eigenvector-degree
/// bound; failures, when present, show up within that range).
pub fn scan_beta<F: Field>(
    x: &BlowupRep<F>,
    max_ext: Option<u32>,
    budget: Option<u128>,
) -> Result<BetaScan<F>> {
    let (n0, n1, _) = x.dims();
    let max_ext = max_ext.unwrap_or(((n0 + n1) as u32).max(1));
    for e in 1..=max_ext {
        let ext = x.field.extension(e)?;
        let data = x.field.embedding_data(&ext)?;
        let xe = x.embed_into(&ext, &data);
        let (_, points) = enumerate_points(&x.field, e, budget)?;
        for pt in points {
            let ev = alpha_beta_same_field(&xe, &pt);
            if ev.beta.rank() != n0 + n1 {
                return Ok(BetaScan::FailsAt(pt));
            }
        }
    }
    Ok(BetaScan::SurjectiveEverywhere)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlphaScan<F: Field> {
    InjectiveEverywhere,
    /// Failures at isolated points; reported per extension degree.
    FiniteFailures(Vec<(u32, Vec<SurfacePoint<F>>)>),
    /// The failure locus contains every rational point of the exceptional
    /// curve (checked over the base field; reported per degree).
    CurveFailure(Vec<(u32, Vec<SurfacePoint<F>>)>),
}

/// Classify the pointwise injectivity failures of the first map over the
/// sampled extensions.
pub fn scan_alpha<F: Field>(
    x: &BlowupRep<F>,
    max_ext: Option<u32>,
    budget: Option<u128>,
) -> Result<AlphaScan<F>> {
    let (n0, n1, _) = x.dims();
    let max_ext = max_ext.unwrap_or(((n0 + n1) as u32).max(1));
    let mut failures: Vec<(u32, Vec<SurfacePoint<F>>)> = Vec::new();
    let mut base_curve_failures = 0usize;
    let mut base_curve_points = 0usize;
    for e in 1..=max_ext {
        let ext = x.field.extension(e)?;
        let data = x.field.embedding_data(&ext)?;
        let xe = x.embed_into(&ext, &data);
        let (_, points) = enumerate_points(&x.field, e, budget)?;
        let mut here = Vec::new();
        for pt in points {
            let ev = alpha_beta_same_field(&xe, &pt);
            let injective = ev.alpha.rank() == n0 + n1;
            if e == 1 && pt.on_exceptional_curve() {
                base_curve_points += 1;
                if !injective {
                    base_curve_failures += 1;
                }
            }
            if !injective {
                here.push(pt);
            }
        }
        if !here.is_empty() {
            failures.push((e, here));
        }
    }
    if failures.is_empty() {
        Ok(AlphaScan::InjectiveEverywhere)
    } else if base_curve_failures == base_curve_points && base_curve_points > 0 {
        Ok(AlphaScan::CurveFailure(failures))
    } else {
        Ok(AlphaScan::FiniteFailures(failures))
    }
}

/// Verify the canonical framing along the line at infinity: at every
/// sampled point the fiber profile is `(0, r, 0)` and the framing block
/// maps isomorphically onto the middle cohomology. Returns `false` when
/// the surjectivity scan fails (no framed sheaf exists).
pub fn framing_check<F: Field>(
    x: &BlowupRep<F>,
    ext_degree: u32,
    budget: Option<u128>,
) -> Result<bool> {
    let (n0, n1, r) = x.dims();
    if scan_beta(x, Some(ext_degree), budget)? != BetaScan::SurjectiveEverywhere {
        return Ok(false);
    }
    for e in 1..=ext_degree {
        let ext = x.field.extension(e)?;
        let data = x.field.embedding_data(&ext)?;
        let xe = x.embed_into(&ext, &data);
        let (_, points) = enumerate_points(&x.field, e, budget)?;
        for pt in points.into_iter().filter(|p| p.on_line_at_infinity()) {
            let ev = alpha_beta_same_field(&xe, &pt);
            let rank_a = ev.alpha.rank();
            let rank_b = ev.beta.rank();
            let middle = 2 * n0 + 2 * n1 + r;
            let profile = (n0 + n1 - rank_a, middle - rank_b - rank_a, n0 + n1 - rank_b);
            if profile != (0, r, 0) {
                return Ok(false);
            }
            // The framing block must inject into the middle cohomology:
            // its columns are independent from the image of alpha.
            let mut w_incl = Mat::zeros(ext.clone(), middle, r);
            for k in 0..r {
                w_incl.set(2 * n0 + 2 * n1 + k, k, ext.one());
            }
            if ev.alpha.hstack(&w_incl).rank() != rank_a + r {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The table `n -> (dim Hom(X, C_n), dim Hom(C_n, X))` for `n <= m_max`.
pub fn perverse_hom_profile<F: Field>(
    x: &BlowupRep<F>,
    m_max: usize,
) -> Result<Vec<(usize, usize, usize)>> {
    let mut out = Vec::with_capacity(m_max + 1);
    for n in 0..=m_max {
        let cn = cm_data(x.field.clone(), n);
        out.push((n, hom_dim(x, &cn)?, hom_dim(&cn, x)?));
    }
    Ok(out)
}

/// The chamber-`m` perversity test on a profile: `Hom(X, C_n) = 0` for
/// `n >= m` and `Hom(C_n', X) = 0` for `n' < m`.
pub fn perversity_passes(profile: &[(usize, usize, usize)], m: usize) -> bool {
    profile.iter().all(|&(n, to_cn, from_cn)| {
        let to_ok = n < m || to_cn == 0;
        let from_ok = n >= m || from_cn == 0;
        to_ok && from_ok
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{GaloisField, Rationals};

    fn f2() -> GaloisField {
        GaloisField::prime(2).unwrap()
    }
    fn f3() -> GaloisField {
        GaloisField::prime(3).unwrap()
    }

    /// The rank-one datum with `V1 = 0`: n0 = r = 1, i = 1.
    fn o_minus_c<F: Field>(field: F) -> BlowupRep<F> {
        BlowupRep::new(
            field.clone(),
            Mat::zeros(field.clone(), 1, 0),
            Mat::zeros(field.clone(), 1, 0),
            Mat::zeros(field.clone(), 0, 1),
            Mat::identity(field.clone(), 1),
            Mat::zeros(field, 1, 0),
        )
        .unwrap()
    }

    fn stable_111<F: Field>(field: F) -> BlowupRep<F> {
        BlowupRep::new(
            field.clone(),
            Mat::zeros(field.clone(), 1, 1),
            Mat::zeros(field.clone(), 1, 1),
            Mat::identity(field.clone(), 1),
            Mat::identity(field.clone(), 1),
            Mat::zeros(field, 1, 1),
        )
        .unwrap()
    }

    #[test]
    fn point_counts() {
        let (_, pts) = enumerate_points(&f2(), 1, None).unwrap();
        assert_eq!(pts.len(), 9); // 6 affine-chart + 3 at infinity
        assert_eq!(pts.iter().filter(|p| p.on_line_at_infinity()).count(), 3);
        let (_, pts) = enumerate_points(&f3(), 1, None).unwrap();
        assert_eq!(pts.len(), 16); // 12 + 4
        for p in &pts {
            let f = &p.field;
            assert_eq!(f.mul(&p.z1, &p.w), f.mul(&p.z2, &p.z));
        }
        // Distinct canonical representatives.
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                assert_ne!(pts[i], pts[j]);
            }
        }
        assert!(enumerate_points(&Rationals, 1, None).is_err());
    }

    #[test]
    fn o_minus_c_matrices() {
        let x = o_minus_c(f3());
        let (_, pts) = enumerate_points(&f3(), 1, None).unwrap();
        let pt = &pts[0];
        let ev = alpha_beta_at(&x, pt).unwrap();
        // alpha = (z, w, 0)^t, beta = [z2, -z1, z0].
        assert_eq!((ev.alpha.rows, ev.alpha.cols), (3, 1));
        assert_eq!(ev.alpha.at(0, 0), &pt.z);
        assert_eq!(ev.alpha.at(1, 0), &pt.w);
        assert!(pt.field.is_zero(ev.alpha.at(2, 0)));
        assert_eq!((ev.beta.rows, ev.beta.cols), (1, 3));
        assert_eq!(ev.beta.at(0, 0), &pt.z2);
        assert_eq!(ev.beta.at(0, 1), &pt.field.neg(&pt.z1));
        assert_eq!(ev.beta.at(0, 2), &pt.z0);
    }

    #[test]
    fn beta_alpha_vanishes_on_flat_data() {
        let x = stable_111(f3());
        assert!(x.is_flat());
        let (_, pts) = enumerate_points(&f3(), 1, None).unwrap();
        for pt in &pts {
            let ev = alpha_beta_at(&x, pt).unwrap();
            assert!(ev.beta.mul(&ev.alpha).is_zero());
        }
    }

    #[test]
    fn beta_scan_examples() {
        for m in 0..=2usize {
            let cm = cm_data(f2(), m);
            assert_eq!(scan_beta(&cm, None, None).unwrap(), BetaScan::SurjectiveEverywhere);
        }
        assert_eq!(
            scan_beta(&o_minus_c(f2()), None, None).unwrap(),
            BetaScan::SurjectiveEverywhere
        );
        // dims (1,0,1) with i = 0: beta = [z2, -z1, 0] dies on the
        // exceptional curve.
        let bad = BlowupRep::zero(f2(), 1, 0, 1);
        match scan_beta(&bad, None, None).unwrap() {
            BetaScan::FailsAt(pt) => assert!(pt.on_exceptional_curve()),
            other => panic!("expected a failure, got {other:?}"),
        }
    }

    #[test]
    fn alpha_scan_examples() {
        assert_eq!(
            scan_alpha(&o_minus_c(f2()), None, None).unwrap(),
            AlphaScan::InjectiveEverywhere
        );
        // The colength-one ideal sheaf datum (B1 = 1, i = 1): torsion
        // free, alpha drops rank at a single point.
        let f = f2();
        let ideal = BlowupRep::new(
            f.clone(),
            Mat::identity(f.clone(), 1),
            Mat::zeros(f.clone(), 1, 1),
            Mat::zeros(f.clone(), 1, 1),
            Mat::identity(f.clone(), 1),
            Mat::zeros(f.clone(), 1, 1),
        )
        .unwrap();
        match scan_alpha(&ideal, None, None).unwrap() {
            AlphaScan::FiniteFailures(fails) => {
                assert_eq!(fails[0].1.len(), 1);
            }
            other => panic!("expected finite failures, got {other:?}"),
        }
        // The d = 1 example does not satisfy the relaxed injectivity
        // condition; its failure locus is the whole exceptional curve.
        match scan_alpha(&stable_111(f2()), None, None).unwrap() {
            AlphaScan::CurveFailure(_) => {}
            other => panic!("expected a curve failure, got {other:?}"),
        }
        match scan_alpha(&cm_data(f2(), 1), None, None).unwrap() {
            AlphaScan::CurveFailure(_) => {}
            other => panic!("expected a curve failure, got {other:?}"),
        }
    }

    #[test]
    fn beta_scan_over_gf4_base() {
        let f4 = GaloisField::new(2, 2).unwrap();
        let c1 = cm_data(f4, 1);
        assert_eq!(
            scan_beta(&c1, Some(2), None).unwrap(),
            BetaScan::SurjectiveEverywhere
        );
    }

    #[test]
    fn fiber_profiles() {
        for field in [f2(), f3()] {
            let c1 = cm_data(field.clone(), 1);
            let (_, pts) = enumerate_points(&field, 1, None).unwrap();
            let profile = fiber_profile(&c1, &pts).unwrap();
            assert!(profile.euler_constant(0));
            for (pt, h) in &profile.entries {
                if pt.on_exceptional_curve() {
                    assert_eq!(*h, (1, 1, 0));
                } else {
                    assert_eq!(*h, (0, 0, 0));
                }
            }
            let oc = o_minus_c(field.clone());
            let profile = fiber_profile(&oc, &pts).unwrap();
            assert!(profile.euler_constant(1));
            for (_, h) in &profile.entries {
                assert_eq!(*h, (0, 1, 0));
            }
        }
        // The zero representation has the zero profile.
        let z = BlowupRep::zero(f2(), 0, 0, 0);
        let (_, pts) = enumerate_points(&f2(), 1, None).unwrap();
        let profile = fiber_profile(&z, &pts).unwrap();
        for (_, h) in &profile.entries {
            assert_eq!(*h, (0, 0, 0));
        }
    }

    #[test]
    fn framing_examples() {
        assert!(framing_check(&stable_111(f2()), 2, None).unwrap());
        assert!(framing_check(&o_minus_c(f2()), 2, None).unwrap());
        // C_m has no framing; the check is vacuous on the W block.
        assert!(framing_check(&cm_data(f2(), 1), 2, None).unwrap());
        // i = 0 fails through the beta scan.
        assert!(!framing_check(&BlowupRep::zero(f2(), 1, 0, 1), 2, None).unwrap());
    }

    #[test]
    fn perverse_profile_example() {
        let x = stable_111(f2());
        let profile = perverse_hom_profile(&x, 3).unwrap();
        for &(n, to_cn, from_cn) in &profile {
            assert_eq!(to_cn, 0, "Hom(X, C_{n}) = 0");
            if n == 0 {
                assert_eq!(from_cn, 1, "Hom(C_0, X) is one-dimensional");
            }
        }
        assert!(perversity_passes(&profile, 0));
        assert!(!perversity_passes(&profile, 1));
        // C_1 itself fails at every m through Hom(C_1, C_1) = 1.
        let c1 = cm_data(f2(), 1);
        let profile = perverse_hom_profile(&c1, 3).unwrap();
        for m in 0..=3 {
            assert!(!perversity_passes(&profile, m));
        }
    }
}
