//! Slopes and Harder-Narasimhan / Jordan-Holder filtrations for
//! representations of the three-vertex quiver.
//!
//! The weight at the infinity vertex is pinned by the top representation
//! so that its total slope vanishes; destabilizers are found by
//! exhaustive subspace-pair search over a finite field.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::rep::{all_subreps, sub_quotient, BlowupRep, NewQuiverRep, SubrepPair};
use crate::stability::StabilityParam;

/// `theta(Y) = (zeta0 n0 + zeta1 n1 + zeta_inf n_inf) / (n0 + n1 + n_inf)`.
pub fn slope_theta<F: Field>(
    y: &NewQuiverRep<F>,
    zeta: &StabilityParam,
    zeta_inf: &BigRational,
) -> Result<BigRational> {
    slope_of_dims((y.rep.n0, y.rep.n1, y.dim_inf), zeta, zeta_inf)
}

pub fn slope_of_dims(
    dims: (usize, usize, bool),
    zeta: &StabilityParam,
    zeta_inf: &BigRational,
) -> Result<BigRational> {
    let (n0, n1, inf) = dims;
    let total = n0 + n1 + usize::from(inf);
    if total == 0 {
        return Err(Error::ZeroRepresentation);
    }
    let mut num = zeta.pairing(n0, n1);
    if inf {
        num += zeta_inf;
    }
    Ok(num / BigRational::from_integer(BigInt::from(total)))
}

/// A descending chain of invariant pairs from the full representation to
/// zero, with one slope per graded piece (top quotient first).
#[derive(Debug, Clone)]
pub struct Filtration<F: Field> {
    pub steps: Vec<SubrepPair<F>>,
    pub slopes: Vec<BigRational>,
}

impl<F: Field> Filtration<F> {
    pub fn num_pieces(&self) -> usize {
        self.slopes.len()
    }
}

/// Is the representation theta-semistable, and what is the maximal
/// destabilizer if not? Returns the join of all maximal-slope subreps.
fn maximal_destabilizer<F: Field>(
    y: &NewQuiverRep<F>,
    zeta: &StabilityParam,
    zeta_inf: &BigRational,
    budget: Option<u128>,
) -> Result<(SubrepPair<F>, BigRational)> {
    let subs = all_subreps(y, budget)?;
    let mut best: Option<BigRational> = None;
    for pair in &subs {
        let total = pair.s0.dim() + pair.s1.dim() + usize::from(pair.s_inf);
        if total == 0 {
            continue;
        }
        let slope = slope_of_dims((pair.s0.dim(), pair.s1.dim(), pair.s_inf), zeta, zeta_inf)?;
        if best.as_ref().map(|b| slope > *b).unwrap_or(true) {
            best = Some(slope);
        }
    }
    let best = best.ok_or(Error::ZeroRepresentation)?;
    let mut join: Option<SubrepPair<F>> = None;
    for pair in subs {
        let total = pair.s0.dim() + pair.s1.dim() + usize::from(pair.s_inf);
        if total == 0 {
            continue;
        }
        let slope = slope_of_dims((pair.s0.dim(), pair.s1.dim(), pair.s_inf), zeta, zeta_inf)?;
        if slope == best {
            join = Some(match join {
                None => pair,
                Some(j) => j.sum(&pair)?,
            });
        }
    }
    let join = join.expect("a maximal-slope subrepresentation exists");
    let join_slope =
        slope_of_dims((join.s0.dim(), join.s1.dim(), join.s_inf), zeta, zeta_inf)?;
    debug_assert_eq!(join_slope, best, "maximal-slope subreps are closed under sums");
    Ok((join, best))
}

/// Pull a pair on a quotient back through the (cumulative) projections.
fn pull_back_pair<F: Field>(
    pair: &SubrepPair<F>,
    proj0: &crate::mat::Mat<F>,
    proj1: &crate::mat::Mat<F>,
    cum_inf: bool,
) -> SubrepPair<F> {
    SubrepPair {
        s0: pair.s0.preimage_under(proj0).expect("projection shape"),
        s1: pair.s1.preimage_under(proj1).expect("projection shape"),
        s_inf: pair.s_inf || cum_inf,
    }
}

/// The Harder-Narasimhan filtration: graded pieces are theta-semistable
/// with strictly increasing slopes toward the bottom. The maximal
/// destabilizer at each stage is the join of all maximal-slope
/// subrepresentations, which makes the output unique.
pub fn hn_filtration<F: Field>(
    y: &NewQuiverRep<F>,
    zeta: &StabilityParam,
    budget: Option<u128>,
) -> Result<Filtration<F>> {
    if !y.rep.is_flat() {
        return Err(Error::PreconditionViolated("filtrations expect mu = 0".into()));
    }
    if y.total_dim() == 0 {
        return Err(Error::ZeroRepresentation);
    }
    let zeta_inf = zeta.zeta_inf(y.rep.n0, y.rep.n1);
    let x = &y.rep;
    let f = x.field.clone();

    // Peel maximal destabilizers bottom-up, tracking cumulative
    // projections back to the original coordinates.
    let mut chain: Vec<SubrepPair<F>> = Vec::new();
    let mut cur = y.clone();
    let mut proj0 = crate::mat::Mat::identity(f.clone(), x.n0);
    let mut proj1 = crate::mat::Mat::identity(f.clone(), x.n1);
    let mut cum_inf = false;
    loop {
        let (dest, _slope) = maximal_destabilizer(&cur, zeta, &zeta_inf, budget)?;
        if dest.is_full(&cur.rep, cur.dim_inf) {
            break;
        }
        chain.push(pull_back_pair(&dest, &proj0, &proj1, cum_inf));
        let sq = sub_quotient(&cur.rep, &dest)?;
        proj0 = sq.proj0.mul(&proj0);
        proj1 = sq.proj1.mul(&proj1);
        cum_inf = cum_inf || dest.s_inf;
        let dim_inf = cur.dim_inf && !dest.s_inf;
        cur = NewQuiverRep { rep: sq.quot, dim_inf };
        if cur.total_dim() == 0 {
            break;
        }
    }

    finish_filtration(y, zeta, &zeta_inf, chain)
}

fn finish_filtration<F: Field>(
    y: &NewQuiverRep<F>,
    zeta: &StabilityParam,
    zeta_inf: &BigRational,
    chain: Vec<SubrepPair<F>>,
) -> Result<Filtration<F>> {
    let x = &y.rep;
    let mut steps = Vec::with_capacity(chain.len() + 2);
    steps.push(SubrepPair::full_pair(x, y.dim_inf));
    for pair in chain.into_iter().rev() {
        steps.push(pair);
    }
    steps.push(SubrepPair::zero_pair(x));
    // Drop a duplicated zero at the bottom (an empty representation can
    // make the last peel equal the zero pair).
    steps.dedup();
    let mut slopes = Vec::with_capacity(steps.len() - 1);
    for k in 0..steps.len() - 1 {
        let outer = &steps[k];
        let inner = &steps[k + 1];
        let dims = (
            outer.s0.dim() - inner.s0.dim(),
            outer.s1.dim() - inner.s1.dim(),
            outer.s_inf && !inner.s_inf,
        );
        slopes.push(slope_of_dims(dims, zeta, zeta_inf)?);
    }
    Ok(Filtration { steps, slopes })
}

/// Is `y` theta-semistable at this parameter?
pub fn is_theta_semistable<F: Field>(
    y: &NewQuiverRep<F>,
    zeta: &StabilityParam,
    budget: Option<u128>,
) -> Result<bool> {
    let zeta_inf = zeta.zeta_inf(y.rep.n0, y.rep.n1);
    let whole = slope_theta(y, zeta, &zeta_inf)?;
    let (_, best) = maximal_destabilizer(y, zeta, &zeta_inf, budget)?;
    Ok(best == whole)
}

/// The Jordan-Holder filtration of a theta-semistable representation:
/// graded pieces are theta-stable of equal slope. Pieces are peeled as
/// minimal-dimension equal-slope subrepresentations, first in canonical
/// enumeration order, so the output is deterministic (the graded multiset
/// is the invariant).
pub fn jh_filtration<F: Field>(
    y: &NewQuiverRep<F>,
    zeta: &StabilityParam,
    budget: Option<u128>,
) -> Result<Filtration<F>> {
    if !y.rep.is_flat() {
        return Err(Error::PreconditionViolated("filtrations expect mu = 0".into()));
    }
    if y.total_dim() == 0 {
        return Err(Error::ZeroRepresentation);
    }
    if !is_theta_semistable(y, zeta, budget)? {
        return Err(Error::NotSemistable);
    }
    let zeta_inf = zeta.zeta_inf(y.rep.n0, y.rep.n1);
    let slope = slope_theta(y, zeta, &zeta_inf)?;
    let x = &y.rep;
    let f = x.field.clone();

    let mut chain: Vec<SubrepPair<F>> = Vec::new();
    let mut cur = y.clone();
    let mut proj0 = crate::mat::Mat::identity(f.clone(), x.n0);
    let mut proj1 = crate::mat::Mat::identity(f.clone(), x.n1);
    let mut cum_inf = false;
    loop {
        if cur.total_dim() == 0 {
            break;
        }
        // Minimal nonzero subrep of the current quotient with the global
        // slope; minimality makes it stable.
        let subs = all_subreps(&cur, budget)?;
        let mut min: Option<SubrepPair<F>> = None;
        for pair in subs {
            let total = pair.s0.dim() + pair.s1.dim() + usize::from(pair.s_inf);
            if total == 0 {
                continue;
            }
            let s = slope_of_dims((pair.s0.dim(), pair.s1.dim(), pair.s_inf), zeta, &zeta_inf)?;
            if s != slope {
                continue;
            }
            let better = match &min {
                None => true,
                Some(m) => total < m.s0.dim() + m.s1.dim() + usize::from(m.s_inf),
            };
            if better {
                min = Some(pair);
            }
        }
        let min = min.ok_or(Error::NotSemistable)?;
        if min.is_full(&cur.rep, cur.dim_inf) {
            break;
        }
        chain.push(pull_back_pair(&min, &proj0, &proj1, cum_inf));
        let sq = sub_quotient(&cur.rep, &min)?;
        proj0 = sq.proj0.mul(&proj0);
        proj1 = sq.proj1.mul(&proj1);
        cum_inf = cum_inf || min.s_inf;
        let dim_inf = cur.dim_inf && !min.s_inf;
        cur = NewQuiverRep { rep: sq.quot, dim_inf };
    }

    finish_filtration(y, zeta, &zeta_inf, chain)
}

/// The graded piece `outer/inner` of a filtration step, as a
/// representation of the three-vertex quiver.
pub fn graded_piece<F: Field>(
    x: &BlowupRep<F>,
    outer: &SubrepPair<F>,
    inner: &SubrepPair<F>,
) -> Result<NewQuiverRep<F>> {
    if !outer.contains(inner) {
        return Err(Error::InvalidPair("inner step not contained in outer step".into()));
    }
    let sq_outer = sub_quotient(x, outer)?;
    // Express the inner pair in the coordinates of the outer subrep.
    let in_coords = |space: &crate::subspace::Subspace<F>,
                     outer_space: &crate::subspace::Subspace<F>|
     -> crate::subspace::Subspace<F> {
        let rows: Vec<Vec<F::Elem>> = (0..space.dim())
            .map(|k| {
                outer_space
                    .coords_of(space.basis().row(k))
                    .expect("inner step lies inside the outer step")
            })
            .collect();
        crate::subspace::Subspace::from_vectors(x.field.clone(), outer_space.dim(), &rows)
    };
    let pair_in_sub = SubrepPair {
        s0: in_coords(&inner.s0, &outer.s0),
        s1: in_coords(&inner.s1, &outer.s1),
        s_inf: inner.s_inf,
    };
    let sq_inner = sub_quotient(&sq_outer.sub, &pair_in_sub)?;
    let dim_inf = outer.s_inf && !inner.s_inf;
    Ok(if dim_inf {
        NewQuiverRep::framed(sq_inner.quot)
    } else {
        NewQuiverRep::unframed(sq_inner.quot)?
    })
}

/// All graded pieces of a filtration, top quotient first.
pub fn graded_pieces<F: Field>(
    x: &BlowupRep<F>,
    filtration: &Filtration<F>,
) -> Result<Vec<NewQuiverRep<F>>> {
    let mut out = Vec::new();
    for k in 0..filtration.steps.len() - 1 {
        out.push(graded_piece(x, &filtration.steps[k], &filtration.steps[k + 1])?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{rat, GaloisField};
    use num_traits::Zero;
    use crate::mat::Mat;
    use crate::rep::{cm_data, is_isomorphic};

    fn f2() -> GaloisField {
        GaloisField::prime(2).unwrap()
    }

    #[test]
    fn slope_examples() {
        let zeta = StabilityParam::from_ints(-3, 2);
        // The full framed representation has slope zero by construction.
        let x = BlowupRep::zero(f2(), 2, 1, 1);
        let y = NewQuiverRep::framed(x);
        let zi = zeta.zeta_inf(2, 1);
        assert_eq!(slope_theta(&y, &zeta, &zi).unwrap(), rat(0, 1));
        // C0 and C1 slopes at (-3, 2).
        let c0 = NewQuiverRep::unframed(cm_data(f2(), 0)).unwrap();
        let c1 = NewQuiverRep::unframed(cm_data(f2(), 1)).unwrap();
        assert_eq!(slope_theta(&c0, &zeta, &zi).unwrap(), rat(2, 1));
        assert_eq!(slope_theta(&c1, &zeta, &zi).unwrap(), rat(1, 3));
        // Positive scaling preserves slope order.
        let scaled = zeta.scale(&rat(5, 1));
        let zi_s = scaled.zeta_inf(2, 1);
        assert_eq!(slope_theta(&c0, &scaled, &zi_s).unwrap(), rat(10, 1));
        assert_eq!(slope_theta(&c1, &scaled, &zi_s).unwrap(), rat(5, 3));
        // Zero representation has no slope.
        let z = NewQuiverRep::unframed(BlowupRep::zero(f2(), 0, 0, 0)).unwrap();
        assert!(slope_theta(&z, &zeta, &zi).is_err());
    }

    #[test]
    fn hn_of_semistable_is_trivial() {
        let zeta = StabilityParam::from_ints(-2, 1);
        let c1 = NewQuiverRep::unframed(cm_data(f2(), 1)).unwrap();
        let filt = hn_filtration(&c1, &zeta, None).unwrap();
        assert_eq!(filt.steps.len(), 2);
        assert_eq!(filt.num_pieces(), 1);
    }

    #[test]
    fn hn_of_c0_plus_c1() {
        let zeta = StabilityParam::from_ints(-3, 2);
        let x = cm_data(f2(), 0).direct_sum(&cm_data(f2(), 1)).unwrap();
        let y = NewQuiverRep::unframed(x.clone()).unwrap();
        let filt = hn_filtration(&y, &zeta, None).unwrap();
        assert_eq!(filt.num_pieces(), 2);
        // Slopes strictly increase toward the bottom: 1/3 then 2.
        assert_eq!(filt.slopes, vec![rat(1, 3), rat(2, 1)]);
        // The middle step is the C0 summand.
        assert_eq!(filt.steps[1].dims(), (0, 1));
        let pieces = graded_pieces(&x, &filt).unwrap();
        assert!(is_isomorphic(&pieces[0].rep, &cm_data(f2(), 1), None).unwrap());
        assert!(is_isomorphic(&pieces[1].rep, &cm_data(f2(), 0), None).unwrap());
        // Moving the parameter keeps the same ordering for this pair.
        let zeta2 = StabilityParam::from_ints(-5, 4);
        let filt2 = hn_filtration(&y, &zeta2, None).unwrap();
        assert_eq!(filt2.slopes, vec![rat(1, 1), rat(4, 1)]);
    }

    #[test]
    fn jh_of_c1_plus_c1() {
        let zeta = StabilityParam::from_ints(-2, 1);
        let c1 = cm_data(f2(), 1);
        let x = c1.direct_sum(&c1).unwrap();
        let y = NewQuiverRep::unframed(x.clone()).unwrap();
        let filt = jh_filtration(&y, &zeta, None).unwrap();
        assert_eq!(filt.num_pieces(), 2);
        assert!(filt.slopes.iter().all(|s| s.is_zero()));
        for piece in graded_pieces(&x, &filt).unwrap() {
            assert!(is_isomorphic(&piece.rep, &c1, None).unwrap());
        }
    }

    #[test]
    fn jh_of_stable_is_single_piece() {
        let zeta = StabilityParam::from_ints(-2, 1);
        let c1 = NewQuiverRep::unframed(cm_data(f2(), 1)).unwrap();
        let filt = jh_filtration(&c1, &zeta, None).unwrap();
        assert_eq!(filt.num_pieces(), 1);
    }

    #[test]
    fn jh_rejects_unstable_input() {
        let zeta = StabilityParam::from_ints(-3, 2);
        let x = cm_data(f2(), 0).direct_sum(&cm_data(f2(), 1)).unwrap();
        let y = NewQuiverRep::unframed(x).unwrap();
        assert!(matches!(jh_filtration(&y, &zeta, None), Err(Error::NotSemistable)));
    }

    #[test]
    fn jh_at_a_wall_splits_off_cm() {
        // X' framed stable at the wall m=1, plus a C1 summand: the JH
        // graded pieces are {X', C1}.
        let zeta = StabilityParam::from_ints(-2, 1);
        let f = f2();
        let xp = BlowupRep::new(
            f.clone(),
            Mat::from_i64(f.clone(), 1, 1, &[1]),
            Mat::zeros(f.clone(), 1, 1),
            Mat::zeros(f.clone(), 1, 1),
            Mat::identity(f.clone(), 1),
            Mat::zeros(f.clone(), 1, 1),
        )
        .unwrap();
        let x = xp.direct_sum(&cm_data(f.clone(), 1)).unwrap();
        let y = NewQuiverRep::framed(x.clone());
        let filt = jh_filtration(&y, &zeta, None).unwrap();
        assert_eq!(filt.num_pieces(), 2);
        let pieces = graded_pieces(&x, &filt).unwrap();
        let c1 = cm_data(f, 1);
        let mut found_c1 = false;
        let mut found_xp = false;
        for p in &pieces {
            if p.rep.dims() == c1.dims() && is_isomorphic(&p.rep, &c1, None).unwrap() {
                found_c1 = true;
            }
            if p.rep.dims() == xp.dims() && is_isomorphic(&p.rep, &xp, None).unwrap() {
                found_xp = true;
            }
        }
        assert!(found_c1 && found_xp);
    }

    #[test]
    fn hn_is_equivariant_under_conjugation() {
        let zeta = StabilityParam::from_ints(-3, 2);
        let x = cm_data(f2(), 0).direct_sum(&cm_data(f2(), 1)).unwrap();
        let g0 = Mat::from_i64(f2(), 1, 1, &[1]);
        let g1 = Mat::from_i64(f2(), 3, 3, &[1, 1, 0, 0, 1, 1, 0, 0, 1]);
        let xc = x.conjugate(&g0, &g1).unwrap();
        let filt = hn_filtration(&NewQuiverRep::unframed(x).unwrap(), &zeta, None).unwrap();
        let filt_c = hn_filtration(&NewQuiverRep::unframed(xc).unwrap(), &zeta, None).unwrap();
        assert_eq!(filt.slopes, filt_c.slopes);
        let dims: Vec<_> = filt.steps.iter().map(|p| p.dims()).collect();
        let dims_c: Vec<_> = filt_c.steps.iter().map(|p| p.dims()).collect();
        assert_eq!(dims, dims_c);
    }
}
