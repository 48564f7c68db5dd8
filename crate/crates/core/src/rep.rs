//! Representations of the blown-up-plane quiver: the data
//! `(B1, B2, d, i, j)` on `(V0, V1, W)` subject to the moment-map relation
//! `B1 d B2 - B2 d B1 + i j = 0`, together with homomorphism spaces,
//! invariant subspace pairs, closures, direct sums, sub/quotient
//! constructions and exhaustive enumeration over finite fields.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::linsys::BlockMap;
use crate::mat::Mat;
use crate::subspace::{enumerate_subspaces, Subspace};

/// The quintuple `(B1, B2, d, i, j)` with `B1, B2 : V1 -> V0`,
/// `d : V0 -> V1`, `i : W -> V0`, `j : V1 -> W`.
#[derive(Clone, PartialEq, Eq)]
pub struct BlowupRep<F: Field> {
    pub field: F,
    pub n0: usize,
    pub n1: usize,
    pub r: usize,
    pub b1: Mat<F>,
    pub b2: Mat<F>,
    pub d: Mat<F>,
    pub i: Mat<F>,
    pub j: Mat<F>,
}

impl<F: Field> std::fmt::Debug for BlowupRep<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "BlowupRep dims ({},{},{}) B1={:?} B2={:?} d={:?} i={:?} j={:?}",
            self.n0, self.n1, self.r, self.b1, self.b2, self.d, self.i, self.j
        )
    }
}

impl<F: Field> BlowupRep<F> {
    pub fn new(field: F, b1: Mat<F>, b2: Mat<F>, d: Mat<F>, i: Mat<F>, j: Mat<F>) -> Result<Self> {
        let (n0, n1) = (b1.rows, b1.cols);
        let r = i.cols;
        let shape_err = |what: &str| Error::DimensionMismatch(format!("{what} has a bad shape"));
        if (b2.rows, b2.cols) != (n0, n1) {
            return Err(shape_err("B2"));
        }
        if (d.rows, d.cols) != (n1, n0) {
            return Err(shape_err("d"));
        }
        if i.rows != n0 {
            return Err(shape_err("i"));
        }
        if (j.rows, j.cols) != (r, n1) {
            return Err(shape_err("j"));
        }
        for m in [&b1, &b2, &d, &i, &j] {
            if m.field != field {
                return Err(Error::FieldMismatch("matrix over a different field".into()));
            }
        }
        Ok(BlowupRep { field, n0, n1, r, b1, b2, d, i, j })
    }

    pub fn zero(field: F, n0: usize, n1: usize, r: usize) -> Self {
        BlowupRep {
            field: field.clone(),
            n0,
            n1,
            r,
            b1: Mat::zeros(field.clone(), n0, n1),
            b2: Mat::zeros(field.clone(), n0, n1),
            d: Mat::zeros(field.clone(), n1, n0),
            i: Mat::zeros(field.clone(), n0, r),
            j: Mat::zeros(field, r, n1),
        }
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.n0, self.n1, self.r)
    }

    pub fn check_same_field(&self, other: &Self) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(format!(
                "{} vs {}",
                self.field.spec(),
                other.field.spec()
            )));
        }
        Ok(())
    }

    /// The moment-map residual `B1 d B2 - B2 d B1 + i j` in `Hom(V1, V0)`.
    pub fn mu_residual(&self) -> Mat<F> {
        let b1db2 = self.b1.mul(&self.d).mul(&self.b2);
        let b2db1 = self.b2.mul(&self.d).mul(&self.b1);
        b1db2.sub(&b2db1).add(&self.i.mul(&self.j))
    }

    pub fn is_flat(&self) -> bool {
        self.mu_residual().is_zero()
    }

    /// Block-diagonal direct sum; framing spaces are summed.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        self.check_same_field(other)?;
        let f = self.field.clone();
        BlowupRep::new(
            f.clone(),
            Mat::block_diag(f.clone(), &[&self.b1, &other.b1]),
            Mat::block_diag(f.clone(), &[&self.b2, &other.b2]),
            Mat::block_diag(f.clone(), &[&self.d, &other.d]),
            Mat::block_diag(f.clone(), &[&self.i, &other.i]),
            Mat::block_diag(f, &[&self.j, &other.j]),
        )
    }

    /// Direct sum identifying the two framing spaces (requires equal `r`).
    pub fn direct_sum_shared_frame(&self, other: &Self) -> Result<Self> {
        self.check_same_field(other)?;
        if self.r != other.r {
            return Err(Error::DimensionMismatch(format!(
                "shared framing needs equal r: {} vs {}",
                self.r, other.r
            )));
        }
        let f = self.field.clone();
        BlowupRep::new(
            f.clone(),
            Mat::block_diag(f.clone(), &[&self.b1, &other.b1]),
            Mat::block_diag(f.clone(), &[&self.b2, &other.b2]),
            Mat::block_diag(f, &[&self.d, &other.d]),
            self.i.vstack(&other.i),
            self.j.hstack(&other.j),
        )
    }

    /// Column span of `[B1 | B2 | i]`, the target of the surjectivity
    /// statement that follows from condition (S2).
    pub fn v0_generators_span(&self) -> Subspace<F> {
        let stacked = self.b1.hstack(&self.b2).hstack(&self.i);
        Subspace::span(&stacked.transpose())
    }

    /// Conjugate by invertible `(g0, g1)` (and identity on `W`).
    pub fn conjugate(&self, g0: &Mat<F>, g1: &Mat<F>) -> Result<Self> {
        let g0i = g0.inverse().ok_or(Error::PreconditionViolated("g0 not invertible".into()))?;
        let g1i = g1.inverse().ok_or(Error::PreconditionViolated("g1 not invertible".into()))?;
        BlowupRep::new(
            self.field.clone(),
            g0.mul(&self.b1).mul(&g1i),
            g0.mul(&self.b2).mul(&g1i),
            g1.mul(&self.d).mul(&g0i),
            g0.mul(&self.i),
            self.j.mul(&g1i),
        )
    }

    /// Map all matrices into an extension field.
    pub fn embed_into(&self, target: &F, data: &[F::Elem]) -> Self {
        BlowupRep {
            field: target.clone(),
            n0: self.n0,
            n1: self.n1,
            r: self.r,
            b1: self.b1.embed_into(target, data),
            b2: self.b2.embed_into(target, data),
            d: self.d.embed_into(target, data),
            i: self.i.embed_into(target, data),
            j: self.j.embed_into(target, data),
        }
    }
}

/// The data `C_m`: dimensions `(m, m+1)`, no framing, `B1 = [1_m 0]`,
/// `B2 = [0 1_m]`, `d = 0`.
pub fn cm_data<F: Field>(field: F, m: usize) -> BlowupRep<F> {
    let mut b1 = Mat::zeros(field.clone(), m, m + 1);
    let mut b2 = Mat::zeros(field.clone(), m, m + 1);
    for k in 0..m {
        b1.set(k, k, field.one());
        b2.set(k, k + 1, field.one());
    }
    BlowupRep::new(
        field.clone(),
        b1,
        b2,
        Mat::zeros(field.clone(), m + 1, m),
        Mat::zeros(field.clone(), m, 0),
        Mat::zeros(field, 0, m + 1),
    )
    .expect("shapes are consistent")
}

/// A representation of the three-vertex quiver: the blowup data plus the
/// dimension (0 or 1) at the framing vertex.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NewQuiverRep<F: Field> {
    pub rep: BlowupRep<F>,
    pub dim_inf: bool,
}

impl<F: Field> NewQuiverRep<F> {
    /// A framed representation: the infinity vertex carries a line.
    pub fn framed(rep: BlowupRep<F>) -> Self {
        NewQuiverRep { rep, dim_inf: true }
    }

    /// A representation with nothing at the infinity vertex; requires `r = 0`.
    pub fn unframed(rep: BlowupRep<F>) -> Result<Self> {
        if rep.r != 0 {
            return Err(Error::PreconditionViolated(
                "dim V_inf = 0 forces r = 0 (no framing arrows)".into(),
            ));
        }
        Ok(NewQuiverRep { rep, dim_inf: false })
    }

    pub fn total_dim(&self) -> usize {
        self.rep.n0 + self.rep.n1 + usize::from(self.dim_inf)
    }
}

/// A pair of subspaces `(S0, S1)` invariant under the quiver maps, with a
/// prescribed dimension at the infinity vertex.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SubrepPair<F: Field> {
    pub s0: Subspace<F>,
    pub s1: Subspace<F>,
    pub s_inf: bool,
}

impl<F: Field> SubrepPair<F> {
    /// Validate and build: `B_a(S1) <= S0`, `d(S0) <= S1`, and
    /// `S1 <= Ker j` when `s_inf = 0`, `Im i <= S0` when `s_inf = 1`.
    pub fn new(x: &BlowupRep<F>, s0: Subspace<F>, s1: Subspace<F>, s_inf: bool) -> Result<Self> {
        let pair = SubrepPair { s0, s1, s_inf };
        if !pair.is_valid_for(x) {
            return Err(Error::InvalidPair("subspace pair is not invariant".into()));
        }
        Ok(pair)
    }

    pub fn is_valid_for(&self, x: &BlowupRep<F>) -> bool {
        if self.s0.ambient != x.n0 || self.s1.ambient != x.n1 {
            return false;
        }
        let b1s1 = self.s1.image_under(&x.b1).expect("shape checked");
        let b2s1 = self.s1.image_under(&x.b2).expect("shape checked");
        let ds0 = self.s0.image_under(&x.d).expect("shape checked");
        if !self.s0.contains(&b1s1) || !self.s0.contains(&b2s1) || !self.s1.contains(&ds0) {
            return false;
        }
        if self.s_inf {
            let im_i = Subspace::span(&x.i.transpose());
            self.s0.contains(&im_i)
        } else {
            self.s1.image_under(&x.j).expect("shape checked").is_zero()
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.s0.dim(), self.s1.dim())
    }

    pub fn is_zero(&self) -> bool {
        self.s0.is_zero() && self.s1.is_zero() && !self.s_inf
    }

    pub fn is_full(&self, _x: &BlowupRep<F>, with_inf: bool) -> bool {
        self.s0.is_full() && self.s1.is_full() && self.s_inf == with_inf
    }

    pub fn zero_pair(x: &BlowupRep<F>) -> Self {
        SubrepPair {
            s0: Subspace::zero(x.field.clone(), x.n0),
            s1: Subspace::zero(x.field.clone(), x.n1),
            s_inf: false,
        }
    }

    pub fn full_pair(x: &BlowupRep<F>, s_inf: bool) -> Self {
        SubrepPair {
            s0: Subspace::full(x.field.clone(), x.n0),
            s1: Subspace::full(x.field.clone(), x.n1),
            s_inf,
        }
    }

    pub fn contains(&self, other: &Self) -> bool {
        self.s0.contains(&other.s0) && self.s1.contains(&other.s1) && (self.s_inf || !other.s_inf)
    }

    pub fn sum(&self, other: &Self) -> Result<Self> {
        Ok(SubrepPair {
            s0: self.s0.sum(&other.s0)?,
            s1: self.s1.sum(&other.s1)?,
            s_inf: self.s_inf || other.s_inf,
        })
    }
}

/// The least invariant pair with `s_inf = 1`: upward saturation from
/// `(Im i, 0)`. Such pairs are intersection-closed, so the limit is the
/// unique minimum.
pub fn closure_min_t<F: Field>(x: &BlowupRep<F>) -> Result<SubrepPair<F>> {
    if x.r == 0 {
        return Err(Error::NoFraming);
    }
    Ok(closure_min_t_unchecked(x))
}

/// Saturation used by `closure_min_t`; also meaningful for `r = 0`, where
/// it starts from the zero pair.
pub fn closure_min_t_unchecked<F: Field>(x: &BlowupRep<F>) -> SubrepPair<F> {
    let mut t0 = Subspace::span(&x.i.transpose());
    let mut t1 = Subspace::zero(x.field.clone(), x.n1);
    loop {
        let new_t1 = t1.sum(&t0.image_under(&x.d).unwrap()).unwrap();
        let new_t0 = t0
            .sum(&new_t1.image_under(&x.b1).unwrap())
            .unwrap()
            .sum(&new_t1.image_under(&x.b2).unwrap())
            .unwrap();
        if new_t0 == t0 && new_t1 == t1 {
            break;
        }
        t0 = new_t0;
        t1 = new_t1;
    }
    SubrepPair { s0: t0, s1: t1, s_inf: true }
}

/// The greatest invariant pair with `s_inf = 0`: downward saturation from
/// `(V0, Ker j)`. Valid pairs are sum-closed, so the limit is the unique
/// maximum.
pub fn closure_max_s<F: Field>(x: &BlowupRep<F>) -> SubrepPair<F> {
    let ker_j = Subspace::from_vectors(x.field.clone(), x.n1, &x.j.kernel_rows());
    let mut s1 = ker_j.clone();
    let mut s0 = Subspace::full(x.field.clone(), x.n0);
    loop {
        let new_s0 = s1.preimage_under(&x.d).unwrap();
        let new_s1 = ker_j
            .intersect(&new_s0.preimage_under(&x.b1).unwrap())
            .unwrap()
            .intersect(&new_s0.preimage_under(&x.b2).unwrap())
            .unwrap();
        if new_s0 == s0 && new_s1 == s1 {
            break;
        }
        s0 = new_s0;
        s1 = new_s1;
    }
    SubrepPair { s0, s1, s_inf: false }
}

/// Every invariant pair with the given `s_inf`, in subspace enumeration
/// order (finite fields only).
pub fn subrep_pairs<F: Field>(
    x: &BlowupRep<F>,
    s_inf: bool,
    budget: Option<u128>,
) -> Result<Vec<SubrepPair<F>>> {
    let s0s = enumerate_subspaces(&x.field, x.n0, budget)?;
    let s1s = enumerate_subspaces(&x.field, x.n1, budget)?;
    let mut out = Vec::new();
    for s0 in &s0s {
        for s1 in &s1s {
            let pair = SubrepPair { s0: s0.clone(), s1: s1.clone(), s_inf };
            if pair.is_valid_for(x) {
                out.push(pair);
            }
        }
    }
    Ok(out)
}

/// All subrepresentations of a new-quiver representation (both values of
/// `s_inf` when the representation is framed).
pub fn all_subreps<F: Field>(
    y: &NewQuiverRep<F>,
    budget: Option<u128>,
) -> Result<Vec<SubrepPair<F>>> {
    let mut out = subrep_pairs(&y.rep, false, budget)?;
    if y.dim_inf {
        out.extend(subrep_pairs(&y.rep, true, budget)?);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Enumeration of representations
// ---------------------------------------------------------------------------

/// Default bound on the number of tuples a single enumeration may visit.
pub const DEFAULT_REP_BUDGET: u128 = 1 << 24;

/// Iterator over all representations with the given dimensions over a
/// finite field, optionally filtered by the moment-map relation.
pub struct RepIter<F: Field> {
    field: F,
    dims: (usize, usize, usize),
    elems: Vec<F::Elem>,
    counter: Option<Vec<usize>>,
    flat_only: bool,
}

impl<F: Field> RepIter<F> {
    fn entry_count(dims: (usize, usize, usize)) -> usize {
        let (n0, n1, r) = dims;
        3 * n0 * n1 + n0 * r + r * n1
    }

    fn build(&self, counter: &[usize]) -> BlowupRep<F> {
        let (n0, n1, r) = self.dims;
        let mut it = counter.iter().map(|&i| self.elems[i].clone());
        let mut take = |rows: usize, cols: usize| {
            let entries: Vec<F::Elem> = (&mut it).take(rows * cols).collect();
            Mat::new(self.field.clone(), rows, cols, entries)
        };
        let b1 = take(n0, n1);
        let b2 = take(n0, n1);
        let d = take(n1, n0);
        let i = take(n0, r);
        let j = take(r, n1);
        BlowupRep::new(self.field.clone(), b1, b2, d, i, j).expect("shapes consistent")
    }
}

impl<F: Field> Iterator for RepIter<F> {
    type Item = BlowupRep<F>;

    fn next(&mut self) -> Option<BlowupRep<F>> {
        loop {
            let mut counter = self.counter.take()?;
            let rep = self.build(&counter);
            // Advance the base-q counter (first entry least significant).
            let mut carry = true;
            for slot in counter.iter_mut() {
                if !carry {
                    break;
                }
                *slot += 1;
                if *slot == self.elems.len() {
                    *slot = 0;
                } else {
                    carry = false;
                }
            }
            if !carry {
                self.counter = Some(counter);
            }
            if !self.flat_only || rep.is_flat() {
                return Some(rep);
            }
        }
    }
}

/// All matrix tuples at `dims` over a finite field, in deterministic
/// counter order, filtered by `mu = 0` when `flat_only`.
pub fn enumerate_reps<F: Field>(
    field: &F,
    dims: (usize, usize, usize),
    flat_only: bool,
    budget: Option<u128>,
) -> Result<RepIter<F>> {
    let q = field.order().ok_or(Error::UnsupportedField)?;
    let entries = RepIter::<F>::entry_count(dims);
    let budget = budget.unwrap_or(DEFAULT_REP_BUDGET);
    let total = q.checked_pow(entries as u32);
    if total.map(|t| t > budget).unwrap_or(true) {
        return Err(Error::BoundExceeded(format!(
            "q^{entries} tuples at dims {dims:?} exceeds budget {budget}"
        )));
    }
    Ok(RepIter {
        field: field.clone(),
        dims,
        elems: field.elements().expect("finite field enumerates"),
        counter: Some(vec![0; entries]),
        flat_only,
    })
}

// ---------------------------------------------------------------------------
// Homomorphism spaces
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameMode {
    /// All triples `(xi0, xi1, b_WW)`.
    Free,
    /// `b_WW` pinned to the identity; the solution set is affine.
    FramedIdentity,
}

/// One homomorphism: `xi0 : V0 -> V0'`, `xi1 : V1 -> V1'`, `b_WW : W -> W'`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HomTriple<F: Field> {
    pub xi0: Mat<F>,
    pub xi1: Mat<F>,
    pub b_ww: Mat<F>,
}

impl<F: Field> HomTriple<F> {
    pub fn identity(x: &BlowupRep<F>) -> Self {
        HomTriple {
            xi0: Mat::identity(x.field.clone(), x.n0),
            xi1: Mat::identity(x.field.clone(), x.n1),
            b_ww: Mat::identity(x.field.clone(), x.r),
        }
    }

    /// Composition `other . self` (apply `self` first).
    pub fn then(&self, other: &Self) -> Self {
        HomTriple {
            xi0: other.xi0.mul(&self.xi0),
            xi1: other.xi1.mul(&self.xi1),
            b_ww: other.b_ww.mul(&self.b_ww),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        HomTriple {
            xi0: self.xi0.add(&other.xi0),
            xi1: self.xi1.add(&other.xi1),
            b_ww: self.b_ww.add(&other.b_ww),
        }
    }

    pub fn scale(&self, c: &F::Elem) -> Self {
        HomTriple { xi0: self.xi0.scale(c), xi1: self.xi1.scale(c), b_ww: self.b_ww.scale(c) }
    }

    pub fn is_invertible_on_v(&self) -> bool {
        self.xi0.is_invertible() && self.xi1.is_invertible()
    }

    /// Check the intertwining relations against a source and target.
    pub fn satisfies(&self, x: &BlowupRep<F>, y: &BlowupRep<F>) -> bool {
        self.xi0.mul(&x.b1) == y.b1.mul(&self.xi1)
            && self.xi0.mul(&x.b2) == y.b2.mul(&self.xi1)
            && self.xi1.mul(&x.d) == y.d.mul(&self.xi0)
            && self.xi0.mul(&x.i) == y.i.mul(&self.b_ww)
            && self.b_ww.mul(&x.j) == y.j.mul(&self.xi1)
    }
}

/// A basis of the space of homomorphisms from `source` to `target`.
/// In `FramedIdentity` mode the basis spans the homogeneous solutions
/// (`b_WW = 0`) and `basepoint` carries a particular solution with
/// `b_WW = id`, when one exists.
#[derive(Clone, Debug)]
pub struct HomBasis<F: Field> {
    pub source: BlowupRep<F>,
    pub target: BlowupRep<F>,
    pub mode: FrameMode,
    pub basis: Vec<HomTriple<F>>,
    pub basepoint: Option<HomTriple<F>>,
}

impl<F: Field> HomBasis<F> {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Is the solution set empty? Only possible in `FramedIdentity` mode.
    pub fn is_empty_affine(&self) -> bool {
        self.mode == FrameMode::FramedIdentity && self.basepoint.is_none()
    }
}

/// Solve the intertwining system
/// `xi0 B_a = B'_a xi1`, `xi1 d = d' xi0`, `xi0 i = i' b_WW`,
/// `b_WW j = j' xi1`.
pub fn hom_space<F: Field>(
    x: &BlowupRep<F>,
    y: &BlowupRep<F>,
    mode: FrameMode,
) -> Result<HomBasis<F>> {
    x.check_same_field(y)?;
    let f = x.field.clone();
    match mode {
        FrameMode::Free => {
            let shapes = vec![(y.n0, x.n0), (y.n1, x.n1), (y.r, x.r)];
            let outs = vec![
                (y.n0, x.n1), // xi0 B1 - B1' xi1
                (y.n0, x.n1), // xi0 B2 - B2' xi1
                (y.n1, x.n0), // xi1 d - d' xi0
                (y.n0, x.r),  // xi0 i - i' b
                (y.r, x.n1),  // b j - j' xi1
            ];
            let mut bm = BlockMap::new(f.clone(), shapes, outs);
            bm.term_right(0, 0, x.b1.clone(), false);
            bm.term_left(0, 1, y.b1.clone(), true);
            bm.term_right(1, 0, x.b2.clone(), false);
            bm.term_left(1, 1, y.b2.clone(), true);
            bm.term_right(2, 1, x.d.clone(), false);
            bm.term_left(2, 0, y.d.clone(), true);
            bm.term_right(3, 0, x.i.clone(), false);
            bm.term_left(3, 2, y.i.clone(), true);
            bm.term_right(4, 2, x.j.clone(), false);
            bm.term_left(4, 1, y.j.clone(), true);
            let basis = bm
                .kernel()
                .into_iter()
                .map(|mut blocks| {
                    let b_ww = blocks.pop().unwrap();
                    let xi1 = blocks.pop().unwrap();
                    let xi0 = blocks.pop().unwrap();
                    HomTriple { xi0, xi1, b_ww }
                })
                .collect();
            Ok(HomBasis { source: x.clone(), target: y.clone(), mode, basis, basepoint: None })
        }
        FrameMode::FramedIdentity => {
            if x.r != y.r {
                return Err(Error::PreconditionViolated(
                    "framed identity mode requires equal framing rank".into(),
                ));
            }
            let shapes = vec![(y.n0, x.n0), (y.n1, x.n1)];
            let outs = vec![
                (y.n0, x.n1),
                (y.n0, x.n1),
                (y.n1, x.n0),
                (y.n0, x.r), // xi0 i = i'
                (y.r, x.n1), // j' xi1 = j
            ];
            let mut bm = BlockMap::new(f.clone(), shapes, outs);
            bm.term_right(0, 0, x.b1.clone(), false);
            bm.term_left(0, 1, y.b1.clone(), true);
            bm.term_right(1, 0, x.b2.clone(), false);
            bm.term_left(1, 1, y.b2.clone(), true);
            bm.term_right(2, 1, x.d.clone(), false);
            bm.term_left(2, 0, y.d.clone(), true);
            bm.term_right(3, 0, x.i.clone(), false);
            bm.term_left(4, 1, y.j.clone(), false);
            let rhs = vec![
                Mat::zeros(f.clone(), y.n0, x.n1),
                Mat::zeros(f.clone(), y.n0, x.n1),
                Mat::zeros(f.clone(), y.n1, x.n0),
                y.i.clone(),
                x.j.clone(),
            ];
            let zero_b = Mat::zeros(f.clone(), y.r, x.r);
            let (basepoint, kernel) = match bm.affine_solve(&rhs) {
                Some((base, kernel)) => {
                    let bp = HomTriple {
                        xi0: base[0].clone(),
                        xi1: base[1].clone(),
                        b_ww: Mat::identity(f.clone(), x.r),
                    };
                    (Some(bp), kernel)
                }
                None => (None, bm.kernel()),
            };
            let basis = kernel
                .into_iter()
                .map(|blocks| HomTriple {
                    xi0: blocks[0].clone(),
                    xi1: blocks[1].clone(),
                    b_ww: zero_b.clone(),
                })
                .collect();
            Ok(HomBasis { source: x.clone(), target: y.clone(), mode, basis, basepoint })
        }
    }
}

/// Dimension of `Hom(x, y)` in the unframed (free) sense.
pub fn hom_dim<F: Field>(x: &BlowupRep<F>, y: &BlowupRep<F>) -> Result<usize> {
    Ok(hom_space(x, y, FrameMode::Free)?.dim())
}

// ---------------------------------------------------------------------------
// Sub and quotient representations
// ---------------------------------------------------------------------------

/// Restriction and quotient along an invariant pair, with the transition
/// matrices needed to pull subspaces back and forth.
pub struct SubQuotient<F: Field> {
    pub sub: BlowupRep<F>,
    pub quot: BlowupRep<F>,
    /// `V0` inclusion: `n0 x dim S0`, columns are the pair's basis vectors.
    pub incl0: Mat<F>,
    pub incl1: Mat<F>,
    /// Quotient projection `dim(V0/S0) x n0` in free-coordinate bases.
    pub proj0: Mat<F>,
    pub proj1: Mat<F>,
    /// Standard sections of the projections (`n0 x dim(V0/S0)`).
    pub sect0: Mat<F>,
    pub sect1: Mat<F>,
}

fn quotient_projection<F: Field>(s: &Subspace<F>) -> (Mat<F>, Mat<F>) {
    let f = s.field().clone();
    let n = s.ambient;
    let free = s.free_cols();
    let pivots = s.pivot_cols();
    let mut proj = Mat::zeros(f.clone(), free.len(), n);
    for (a, &fc) in free.iter().enumerate() {
        proj.set(a, fc, f.one());
        for (i, &p) in pivots.iter().enumerate() {
            proj.set(a, p, f.neg(s.basis().at(i, fc)));
        }
    }
    let mut sect = Mat::zeros(f.clone(), n, free.len());
    for (a, &fc) in free.iter().enumerate() {
        sect.set(fc, a, f.one());
    }
    (proj, sect)
}

/// Split `x` along a valid pair. The sub keeps the framing iff
/// `pair.s_inf = 1`; the quotient keeps it iff `pair.s_inf = 0`.
pub fn sub_quotient<F: Field>(x: &BlowupRep<F>, pair: &SubrepPair<F>) -> Result<SubQuotient<F>> {
    if !pair.is_valid_for(x) {
        return Err(Error::InvalidPair("pair is not invariant for this representation".into()));
    }
    let f = x.field.clone();
    let incl0 = pair.s0.basis().transpose();
    let incl1 = pair.s1.basis().transpose();
    let (proj0, sect0) = quotient_projection(&pair.s0);
    let (proj1, sect1) = quotient_projection(&pair.s1);

    let restrict = |m: &Mat<F>, into: &Mat<F>, from: &Mat<F>| -> Mat<F> {
        // Solve into * X = m * from; unique since `into` has full column rank.
        into.solve(&m.mul(from)).expect("pair is invariant")
    };

    let sub_b1 = restrict(&x.b1, &incl0, &incl1);
    let sub_b2 = restrict(&x.b2, &incl0, &incl1);
    let sub_d = restrict(&x.d, &incl1, &incl0);
    let (sub_i, sub_j) = if pair.s_inf {
        (incl0.solve(&x.i).expect("Im i lies in S0"), x.j.mul(&incl1))
    } else {
        (Mat::zeros(f.clone(), pair.s0.dim(), 0), Mat::zeros(f.clone(), 0, pair.s1.dim()))
    };
    let sub = BlowupRep::new(f.clone(), sub_b1, sub_b2, sub_d, sub_i, sub_j)?;

    let quot_b1 = proj0.mul(&x.b1).mul(&sect1);
    let quot_b2 = proj0.mul(&x.b2).mul(&sect1);
    let quot_d = proj1.mul(&x.d).mul(&sect0);
    let (quot_i, quot_j) = if pair.s_inf {
        (
            Mat::zeros(f.clone(), x.n0 - pair.s0.dim(), 0),
            Mat::zeros(f.clone(), 0, x.n1 - pair.s1.dim()),
        )
    } else {
        // j descends because j(S1) = 0 for s_inf = 0 pairs.
        (proj0.mul(&x.i), x.j.mul(&sect1))
    };
    let quot = BlowupRep::new(f, quot_b1, quot_b2, quot_d, quot_i, quot_j)?;

    Ok(SubQuotient { sub, quot, incl0, incl1, proj0, proj1, sect0, sect1 })
}

// ---------------------------------------------------------------------------
// Tangent complex
// ---------------------------------------------------------------------------

/// The two maps of the deformation complex at `x`: the differential of the
/// group action and the differential of the moment map. Returned as plain
/// matrices on row-major flattened blocks.
pub fn tangent_complex<F: Field>(x: &BlowupRep<F>) -> (Mat<F>, Mat<F>) {
    let f = x.field.clone();
    let (n0, n1, r) = x.dims();
    let mid = vec![(n1, n0), (n0, n1), (n0, n1), (n0, r), (r, n1)];

    let mut iota = BlockMap::new(f.clone(), vec![(n0, n0), (n1, n1)], mid.clone());
    // (xi0, xi1) -> (d xi0 - xi1 d, B1 xi1 - xi0 B1, B2 xi1 - xi0 B2, xi0 i, -j xi1)
    iota.term_left(0, 0, x.d.clone(), false);
    iota.term_right(0, 1, x.d.clone(), true);
    iota.term_left(1, 1, x.b1.clone(), false);
    iota.term_right(1, 0, x.b1.clone(), true);
    iota.term_left(2, 1, x.b2.clone(), false);
    iota.term_right(2, 0, x.b2.clone(), true);
    iota.term_right(3, 0, x.i.clone(), false);
    iota.term_left(4, 1, x.j.clone(), true);

    let mut dmu = BlockMap::new(f, mid, vec![(n0, n1)]);
    // (dt, b1t, b2t, it, jt) -> B1 d b2t + B1 dt B2 + b1t d B2
    //                         - B2 d b1t - B2 dt B1 - b2t d B1 + it j + i jt
    dmu.term_left(0, 2, x.b1.mul(&x.d), false);
    dmu.term(0, 0, x.b1.clone(), x.b2.clone(), false);
    dmu.term_right(0, 1, x.d.mul(&x.b2), false);
    dmu.term_left(0, 1, x.b2.mul(&x.d), true);
    dmu.term(0, 0, x.b2.clone(), x.b1.clone(), true);
    dmu.term_right(0, 2, x.d.mul(&x.b1), true);
    dmu.term_right(0, 3, x.j.clone(), false);
    dmu.term_left(0, 4, x.i.clone(), false);

    (iota.assemble(), dmu.assemble())
}

// ---------------------------------------------------------------------------
// Isomorphism testing
// ---------------------------------------------------------------------------

/// Default cap on the number of hom-space combinations scanned while
/// searching for an invertible element.
pub const DEFAULT_ISO_BUDGET: u128 = 1 << 16;

/// Isomorphism of representations via an invertible element of the hom
/// space, with the framing identified when `r > 0`. Exhaustive over finite
/// fields; over the rationals only the affine basepoint is tried.
pub fn is_isomorphic<F: Field>(
    x: &BlowupRep<F>,
    y: &BlowupRep<F>,
    budget: Option<u128>,
) -> Result<bool> {
    if x.dims() != y.dims() {
        return Ok(false);
    }
    x.check_same_field(y)?;
    if x.n0 == 0 && x.n1 == 0 {
        return Ok(true);
    }
    let mode = if x.r > 0 { FrameMode::FramedIdentity } else { FrameMode::Free };
    let homs = hom_space(x, y, mode)?;
    if homs.is_empty_affine() {
        return Ok(false);
    }
    match x.field.elements() {
        Some(elems) => {
            let budget = budget.unwrap_or(DEFAULT_ISO_BUDGET);
            let q = elems.len() as u128;
            let dim = homs.dim() as u32;
            let total = q.checked_pow(dim).filter(|&t| t <= budget).ok_or_else(|| {
                Error::BoundExceeded(format!("hom space too large to scan: q^{dim}"))
            })?;
            let mut counter = vec![0usize; homs.dim()];
            for _ in 0..total {
                let mut cand = match &homs.basepoint {
                    Some(bp) => bp.clone(),
                    None => HomTriple {
                        xi0: Mat::zeros(x.field.clone(), y.n0, x.n0),
                        xi1: Mat::zeros(x.field.clone(), y.n1, x.n1),
                        b_ww: Mat::zeros(x.field.clone(), y.r, x.r),
                    },
                };
                for (slot, basis) in counter.iter().zip(&homs.basis) {
                    if *slot == 0 {
                        continue;
                    }
                    cand = cand.add(&basis.scale(&elems[*slot]));
                }
                if cand.is_invertible_on_v() && (x.r == 0 || cand.b_ww.is_invertible()) {
                    return Ok(true);
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
            Ok(false)
        }
        None => {
            // Rationals: try the basepoint and single basis elements.
            if let Some(bp) = &homs.basepoint {
                if bp.is_invertible_on_v() {
                    return Ok(true);
                }
            }
            for b in &homs.basis {
                if b.is_invertible_on_v() && (x.r == 0 || b.b_ww.is_invertible()) {
                    return Ok(true);
                }
            }
            Err(Error::UnsupportedField)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{GaloisField, Rationals};

    fn scalar_rep(vals: [i64; 5]) -> BlowupRep<Rationals> {
        let q = Rationals;
        BlowupRep::new(
            q,
            Mat::from_i64(q, 1, 1, &[vals[0]]),
            Mat::from_i64(q, 1, 1, &[vals[1]]),
            Mat::from_i64(q, 1, 1, &[vals[2]]),
            Mat::from_i64(q, 1, 1, &[vals[3]]),
            Mat::from_i64(q, 1, 1, &[vals[4]]),
        )
        .unwrap()
    }

    #[test]
    fn mu_examples() {
        let q = Rationals;
        assert!(BlowupRep::zero(q, 1, 1, 1).mu_residual().is_zero());
        assert!(cm_data(q, 1).mu_residual().is_zero());
        // On one-dimensional spaces mu reduces to i*j.
        assert!(scalar_rep([1, 2, 3, 1, 0]).is_flat());
        let with_j = scalar_rep([1, 2, 3, 1, 1]);
        assert_eq!(with_j.mu_residual().at(0, 0), &q.one());
    }

    #[test]
    fn cm_data_is_flat_up_to_m_five() {
        for m in 0..=5usize {
            assert!(cm_data(Rationals, m).is_flat());
            assert_eq!(cm_data(Rationals, m).dims(), (m, m + 1, 0));
        }
    }

    #[test]
    fn values_are_shareable_across_threads() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<crate::field::GaloisField>();
        assert_send_sync::<Mat<crate::field::GaloisField>>();
        assert_send_sync::<BlowupRep<Rationals>>();
        assert_send_sync::<crate::subspace::Subspace<crate::field::GaloisField>>();
    }

    #[test]
    fn hom_of_cm_matches_the_line_bundle_dictionary() {
        let q = Rationals;
        for m in 0..=3usize {
            for mp in 0..=3usize {
                let expected = (m as i64 - mp as i64 + 1).max(0) as usize;
                let d = hom_dim(&cm_data(q, m), &cm_data(q, mp)).unwrap();
                assert_eq!(d, expected, "Hom(C_{m}, C_{mp})");
            }
        }
    }

    #[test]
    fn identity_is_always_a_hom() {
        let x = scalar_rep([1, 2, 3, 1, 0]);
        assert!(HomTriple::identity(&x).satisfies(&x, &x));
        let homs = hom_space(&x, &x, FrameMode::FramedIdentity).unwrap();
        assert!(homs.basepoint.is_some());
    }

    #[test]
    fn direct_sum_dims_and_blocks() {
        let q = Rationals;
        let c0 = cm_data(q, 0);
        let c1 = cm_data(q, 1);
        let s = c0.direct_sum(&c0).unwrap();
        assert_eq!(s.dims(), (0, 2, 0));
        assert!(s.b1.is_zero() && s.d.is_zero());
        let s = c0.direct_sum(&c1).unwrap();
        assert_eq!(s.dims(), (1, 3, 0));
        let zero = BlowupRep::zero(q, 0, 0, 0);
        assert_eq!(c1.direct_sum(&zero).unwrap(), c1);
    }

    #[test]
    fn closure_examples() {
        // d=1, i=1, B=0, j=0: i fills V0, then d fills V1.
        let x = scalar_rep([0, 0, 1, 1, 0]);
        let t = closure_min_t(&x).unwrap();
        assert!(t.s0.is_full() && t.s1.is_full());
        // d=0, i=1: nothing reaches V1.
        let x = scalar_rep([0, 0, 0, 1, 0]);
        let t = closure_min_t(&x).unwrap();
        assert!(t.s0.is_full() && t.s1.is_zero());
        // i=0: closure is the zero pair.
        let x = scalar_rep([1, 1, 1, 0, 0]);
        let t = closure_min_t(&x).unwrap();
        assert!(t.s0.is_zero() && t.s1.is_zero());

        // j=0, d=0: no constraints, max pair is everything.
        let x = scalar_rep([1, 1, 0, 1, 0]);
        let s = closure_max_s(&x);
        assert!(s.s0.is_full() && s.s1.is_full());
        // d=1, j=1: Ker j = 0 forces S1 = 0, then S0 = 0.
        let x = scalar_rep([0, 0, 1, 0, 1]);
        let s = closure_max_s(&x);
        assert!(s.s0.is_zero() && s.s1.is_zero());
        // C_m with r = 0: the whole representation.
        let c2 = cm_data(Rationals, 2);
        let s = closure_max_s(&c2);
        assert!(s.s0.is_full() && s.s1.is_full());
    }

    #[test]
    fn subrep_pair_examples() {
        let f2 = GaloisField::prime(2).unwrap();
        let c0 = cm_data(f2.clone(), 0);
        let pairs = subrep_pairs(&c0, false, None).unwrap();
        assert_eq!(pairs.len(), 2); // (0,0) and (0,V1)

        let zero = BlowupRep::zero(f2.clone(), 1, 1, 0);
        let pairs = subrep_pairs(&zero, false, None).unwrap();
        assert_eq!(pairs.len(), 4); // all four subspace pairs over GF(2)

        // d=1, i=1, j=0 at dims (1,1,1): closure forces the full pair.
        let x = BlowupRep::new(
            f2.clone(),
            Mat::zeros(f2.clone(), 1, 1),
            Mat::zeros(f2.clone(), 1, 1),
            Mat::identity(f2.clone(), 1),
            Mat::identity(f2.clone(), 1),
            Mat::zeros(f2.clone(), 1, 1),
        )
        .unwrap();
        let pairs = subrep_pairs(&x, true, None).unwrap();
        assert_eq!(pairs.len(), 1);
        assert!(pairs[0].s0.is_full() && pairs[0].s1.is_full());
    }

    #[test]
    fn enumeration_counts() {
        let f2 = GaloisField::prime(2).unwrap();
        assert_eq!(enumerate_reps(&f2, (1, 0, 0), false, None).unwrap().count(), 1);
        assert_eq!(enumerate_reps(&f2, (1, 1, 0), true, None).unwrap().count(), 8);
        // mu = i*j on scalars: flat iff ij = 0, 24 of 32 tuples.
        assert_eq!(enumerate_reps(&f2, (1, 1, 1), true, None).unwrap().count(), 24);
        assert!(enumerate_reps(&f2, (3, 4, 0), false, None).is_err());
        assert!(enumerate_reps(&Rationals, (1, 1, 0), false, None).is_err());
    }

    #[test]
    fn sub_quotient_extremes_and_summands() {
        let q = Rationals;
        let x = scalar_rep([1, 2, 3, 1, 0]);
        let zero_pair = SubrepPair::zero_pair(&x);
        let sq = sub_quotient(&x, &zero_pair).unwrap();
        assert_eq!(sq.sub.dims(), (0, 0, 0));
        assert_eq!(sq.quot.dims(), x.dims());
        assert_eq!(sq.quot.b1, x.b1);

        let full_pair = SubrepPair::full_pair(&x, true);
        let sq = sub_quotient(&x, &full_pair).unwrap();
        assert_eq!(sq.sub.dims(), x.dims());
        assert_eq!(sq.quot.dims(), (0, 0, 0));
        assert_eq!(sq.sub.b1, x.b1);

        // X = C0 + C1, P = the C0 summand: sub ~ C0, quot ~ C1.
        let c0 = cm_data(q, 0);
        let c1 = cm_data(q, 1);
        let x = c0.direct_sum(&c1).unwrap();
        let s0 = Subspace::zero(q, 1);
        let s1 = Subspace::from_vectors(q, 3, &[vec![q.one(), q.zero(), q.zero()]]);
        let pair = SubrepPair::new(&x, s0, s1, false).unwrap();
        let sq = sub_quotient(&x, &pair).unwrap();
        assert_eq!(sq.sub.dims(), (0, 1, 0));
        assert_eq!(sq.quot.dims(), (1, 2, 0));
        assert_eq!(sq.quot.b1, c1.b1);
        assert_eq!(sq.quot.b2, c1.b2);
    }

    #[test]
    fn mu_is_inherited_by_sub_and_quotient() {
        let f2 = GaloisField::prime(2).unwrap();
        for x in enumerate_reps(&f2, (1, 1, 1), true, None).unwrap() {
            for s_inf in [false, true] {
                for pair in subrep_pairs(&x, s_inf, None).unwrap() {
                    let sq = sub_quotient(&x, &pair).unwrap();
                    assert!(sq.sub.is_flat(), "sub of flat is flat");
                    assert!(sq.quot.is_flat(), "quotient of flat is flat");
                }
            }
        }
    }

    #[test]
    fn closures_are_extremal_among_enumerated_pairs() {
        let f2 = GaloisField::prime(2).unwrap();
        for x in enumerate_reps(&f2, (1, 2, 1), true, None).unwrap().take(64) {
            let min_t = closure_min_t(&x).unwrap();
            for pair in subrep_pairs(&x, true, None).unwrap() {
                assert!(pair.contains(&min_t));
            }
            let max_s = closure_max_s(&x);
            for pair in subrep_pairs(&x, false, None).unwrap() {
                assert!(max_s.contains(&pair));
            }
        }
    }

    #[test]
    fn hom_composition_closes() {
        let q = Rationals;
        let c1 = cm_data(q, 1);
        let c0 = cm_data(q, 0);
        let h10 = hom_space(&c1, &c0, FrameMode::Free).unwrap();
        assert_eq!(h10.dim(), 2);
        let h11 = hom_space(&c1, &c1, FrameMode::Free).unwrap();
        for a in &h11.basis {
            for b in &h10.basis {
                let comp = a.then(b);
                assert!(comp.satisfies(&c1, &c0));
            }
        }
    }

    #[test]
    fn hom_is_additive_in_the_source() {
        let q = Rationals;
        let c0 = cm_data(q, 0);
        let c1 = cm_data(q, 1);
        let sum = c0.direct_sum(&c1).unwrap();
        let lhs = hom_dim(&sum, &c1).unwrap();
        let rhs = hom_dim(&c0, &c1).unwrap() + hom_dim(&c1, &c1).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn tangent_complex_shapes_and_composition() {
        let x = scalar_rep([0, 0, 1, 1, 0]);
        let (iota, dmu) = tangent_complex(&x);
        assert_eq!(iota.cols, 2);
        assert_eq!(iota.rows, 5);
        assert_eq!(dmu.rows, 1);
        assert!(dmu.mul(&iota).is_zero(), "d(mu) . iota = 0 at a flat point");
    }

    #[test]
    fn isomorphism_detects_conjugates() {
        let f3 = GaloisField::prime(3).unwrap();
        let c1 = cm_data(f3.clone(), 1);
        let g0 = Mat::from_i64(f3.clone(), 1, 1, &[2]);
        let g1 = Mat::from_i64(f3.clone(), 2, 2, &[1, 1, 0, 2]);
        let conj = c1.conjugate(&g0, &g1).unwrap();
        assert!(is_isomorphic(&c1, &conj, None).unwrap());
        assert!(!is_isomorphic(&c1, &cm_data(f3.clone(), 0), None).unwrap());
        let c0 = cm_data(f3.clone(), 0);
        let not_iso = BlowupRep::zero(f3, 0, 1, 0);
        // C0 is the zero data at dims (0,1); same thing here.
        assert!(is_isomorphic(&c0, &not_iso, None).unwrap());
    }
}
