//! Exact Kronecker canonical form of a matrix pencil `(B1, B2)` of maps
//! `V1 -> V0`.
//!
//! The singular part is peeled off one minimal chain at a time (minimal
//! column chains directly, minimal row chains through the transposed
//! pencil), each time splitting off the chain as a direct summand by
//! solving the linear complement equations. The remaining regular part is
//! split into the part where `B2` is nilpotent relative to `B1` and the
//! part where `B2` is invertible; the former becomes identity/Jordan
//! blocks, the latter is put into canonical form through the cyclic
//! decomposition of the endomorphism `B2^{-1} B1`. Eigenvalues outside
//! the base field stay bundled in companion blocks.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::linsys::BlockMap;
use crate::mat::Mat;
use crate::poly::Poly;
use crate::subspace::Subspace;

/// A canonical pencil block. Shapes are `(rows, cols)` of each factor.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum KroneckerBlock<F: Field> {
    /// `B1 = [1_m; 0]`, `B2 = [0; 1_m]` of shape `(m+1) x m`, `m >= 0`.
    A { m: usize },
    /// `B1 = [1_m 0]`, `B2 = [0 1_m]` of shape `m x (m+1)`, `m >= 0`.
    B { m: usize },
    /// `B1 = 1_m`, `B2 = J_m`, `m >= 1`.
    C { m: usize },
    /// `B1 = a*1_m + J_m`, `B2 = 1_m`, `m >= 1`.
    D { m: usize, eigen: F::Elem },
    /// `B1 = companion(h)`, `B2 = 1`, for a monic `h` with no roots in the
    /// base field (the undecomposed part of an invariant factor).
    DGeneralized { poly: Vec<F::Elem> },
}

impl<F: Field> KroneckerBlock<F> {
    pub fn shape(&self) -> (usize, usize) {
        match self {
            KroneckerBlock::A { m } => (m + 1, *m),
            KroneckerBlock::B { m } => (*m, m + 1),
            KroneckerBlock::C { m } => (*m, *m),
            KroneckerBlock::D { m, .. } => (*m, *m),
            KroneckerBlock::DGeneralized { poly } => (poly.len() - 1, poly.len() - 1),
        }
    }

    /// The canonical matrices of the block.
    pub fn matrices(&self, field: &F) -> (Mat<F>, Mat<F>) {
        match self {
            KroneckerBlock::A { m } => {
                let m = *m;
                let mut b1 = Mat::zeros(field.clone(), m + 1, m);
                let mut b2 = Mat::zeros(field.clone(), m + 1, m);
                for k in 0..m {
                    b1.set(k, k, field.one());
                    b2.set(k + 1, k, field.one());
                }
                (b1, b2)
            }
            KroneckerBlock::B { m } => {
                let m = *m;
                let mut b1 = Mat::zeros(field.clone(), m, m + 1);
                let mut b2 = Mat::zeros(field.clone(), m, m + 1);
                for k in 0..m {
                    b1.set(k, k, field.one());
                    b2.set(k, k + 1, field.one());
                }
                (b1, b2)
            }
            KroneckerBlock::C { m } => (Mat::identity(field.clone(), *m), jordan_zero(field, *m)),
            KroneckerBlock::D { m, eigen } => {
                let mut b1 = jordan_zero(field, *m);
                for k in 0..*m {
                    b1.set(k, k, eigen.clone());
                }
                (b1, Mat::identity(field.clone(), *m))
            }
            KroneckerBlock::DGeneralized { poly } => {
                let p = Poly::new(field.clone(), poly.clone());
                let n = poly.len() - 1;
                (p.companion(), Mat::identity(field.clone(), n))
            }
        }
    }

    fn sort_key(&self, field: &F) -> (u8, usize, Vec<String>) {
        match self {
            KroneckerBlock::A { m } => (0, *m, Vec::new()),
            KroneckerBlock::B { m } => (1, *m, Vec::new()),
            KroneckerBlock::C { m } => (2, *m, Vec::new()),
            KroneckerBlock::D { m, eigen } => (3, *m, vec![field.elem_to_string(eigen)]),
            KroneckerBlock::DGeneralized { poly } => {
                (4, poly.len() - 1, poly.iter().map(|c| field.elem_to_string(c)).collect())
            }
        }
    }
}

/// Superdiagonal nilpotent Jordan block.
fn jordan_zero<F: Field>(field: &F, m: usize) -> Mat<F> {
    let mut j = Mat::zeros(field.clone(), m, m);
    for k in 0..m.saturating_sub(1) {
        j.set(k, k + 1, field.one());
    }
    j
}

/// Assemble the block-diagonal pencil of a block list.
pub fn blocks_to_pencil<F: Field>(field: &F, blocks: &[KroneckerBlock<F>]) -> (Mat<F>, Mat<F>) {
    let mats: Vec<(Mat<F>, Mat<F>)> = blocks.iter().map(|b| b.matrices(field)).collect();
    let b1s: Vec<&Mat<F>> = mats.iter().map(|(a, _)| a).collect();
    let b2s: Vec<&Mat<F>> = mats.iter().map(|(_, b)| b).collect();
    (Mat::block_diag(field.clone(), &b1s), Mat::block_diag(field.clone(), &b2s))
}

/// The result of a pencil decomposition: invertible `p`, `q` with
/// `p * B_alpha * q` equal to the block diagonal of the canonical blocks,
/// listed in a deterministic sorted order.
pub struct PencilDecomposition<F: Field> {
    pub blocks: Vec<KroneckerBlock<F>>,
    pub p: Mat<F>,
    pub q: Mat<F>,
}

/// Kronecker canonical form of the pencil `(b1, b2)`.
pub fn kronecker_decompose<F: Field>(b1: &Mat<F>, b2: &Mat<F>) -> Result<PencilDecomposition<F>> {
    if (b1.rows, b1.cols) != (b2.rows, b2.cols) {
        return Err(Error::DimensionMismatch("pencil matrices must share a shape".into()));
    }
    b1.check_same_field(b2)?;
    let field = b1.field.clone();

    // Phase 1: strip minimal column chains (kind-B blocks).
    let s1 = strip_column_chains(b1, b2)?;

    // Phase 2: strip minimal column chains of the transposed remainder;
    // these are the kind-A blocks of the original pencil.
    let s2t = strip_column_chains(&s1.rest_b1.transpose(), &s1.rest_b2.transpose())?;
    let p2 = s2t.q.transpose();
    let q2 = s2t.p.transpose();
    let reg_b1 = s2t.rest_b1.transpose();
    let reg_b2 = s2t.rest_b2.transpose();

    // Phase 3: the remainder is regular (and in particular square).
    if reg_b1.rows != reg_b1.cols {
        return Err(Error::PreconditionViolated(
            "internal: singular part not fully stripped".into(),
        ));
    }
    let s3 = decompose_regular(&reg_b1, &reg_b2)?;

    // Stitch the transforms: P b1 Q = diag(B-blocks, A-blocks, regular).
    let nb0: usize = s1.sizes.iter().copied().sum();
    let nb1: usize = s1.sizes.iter().map(|m| *m + 1).sum();
    let na0: usize = s2t.sizes.iter().map(|m| *m + 1).sum();
    let na1: usize = s2t.sizes.iter().copied().sum();
    let f = field.clone();
    let inner_p = Mat::block_diag(f.clone(), &[&Mat::identity(f.clone(), na0), &s3.p]);
    let inner_q = Mat::block_diag(f.clone(), &[&Mat::identity(f.clone(), na1), &s3.q]);
    let mid_p = Mat::block_diag(f.clone(), &[&Mat::identity(f.clone(), nb0), &inner_p.mul(&p2)]);
    let mid_q = Mat::block_diag(f.clone(), &[&Mat::identity(f.clone(), nb1), &q2.mul(&inner_q)]);
    let p = mid_p.mul(&s1.p);
    let q = s1.q.mul(&mid_q);

    let mut blocks: Vec<KroneckerBlock<F>> = Vec::new();
    blocks.extend(s1.sizes.iter().map(|&m| KroneckerBlock::B { m }));
    blocks.extend(s2t.sizes.iter().map(|&m| KroneckerBlock::A { m }));
    blocks.extend(s3.blocks);

    // Reorder the blocks into the canonical sorted order with block
    // permutations on both sides.
    let order = sorted_order(&field, &blocks);
    let (pp, pq) = block_permutations(&field, &blocks, &order);
    let blocks: Vec<KroneckerBlock<F>> = order.iter().map(|&i| blocks[i].clone()).collect();
    let p = pp.mul(&p);
    let q = q.mul(&pq);

    let dec = PencilDecomposition { blocks, p, q };
    debug_assert!(dec.verify(b1, b2));
    Ok(dec)
}

impl<F: Field> PencilDecomposition<F> {
    /// Check invertibility of the transforms and the canonical equality.
    pub fn verify(&self, b1: &Mat<F>, b2: &Mat<F>) -> bool {
        let field = &b1.field;
        let (c1, c2) = blocks_to_pencil(field, &self.blocks);
        self.p.is_invertible()
            && self.q.is_invertible()
            && self.p.mul(b1).mul(&self.q) == c1
            && self.p.mul(b2).mul(&self.q) == c2
    }
}

fn sorted_order<F: Field>(field: &F, blocks: &[KroneckerBlock<F>]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..blocks.len()).collect();
    order.sort_by_key(|&i| blocks[i].sort_key(field));
    order
}

/// Row/column permutations moving block `order[k]` into slot `k`.
fn block_permutations<F: Field>(
    field: &F,
    blocks: &[KroneckerBlock<F>],
    order: &[usize],
) -> (Mat<F>, Mat<F>) {
    let shapes: Vec<(usize, usize)> = blocks.iter().map(|b| b.shape()).collect();
    let mut row_off = Vec::with_capacity(shapes.len());
    let mut col_off = Vec::with_capacity(shapes.len());
    let (mut r, mut c) = (0, 0);
    for &(br, bc) in &shapes {
        row_off.push(r);
        col_off.push(c);
        r += br;
        c += bc;
    }
    let mut pp = Mat::zeros(field.clone(), r, r);
    let mut pq = Mat::zeros(field.clone(), c, c);
    let (mut nr, mut nc) = (0, 0);
    for &i in order {
        let (br, bc) = shapes[i];
        for k in 0..br {
            pp.set(nr + k, row_off[i] + k, field.one());
        }
        for k in 0..bc {
            pq.set(col_off[i] + k, nc + k, field.one());
        }
        nr += br;
        nc += bc;
    }
    (pp, pq)
}

// ---------------------------------------------------------------------------
// Minimal column chains
// ---------------------------------------------------------------------------

struct StripResult<F: Field> {
    /// Sizes `m` of the stripped `m x (m+1)` blocks, in extraction order.
    sizes: Vec<usize>,
    p: Mat<F>,
    q: Mat<F>,
    rest_b1: Mat<F>,
    rest_b2: Mat<F>,
}

/// Peel kind-B blocks until no polynomial column chain remains:
/// `P b1 Q = diag(B-blocks..., rest)`.
fn strip_column_chains<F: Field>(b1: &Mat<F>, b2: &Mat<F>) -> Result<StripResult<F>> {
    let field = b1.field.clone();
    let mut sizes = Vec::new();
    let mut p = Mat::identity(field.clone(), b1.rows);
    let mut q = Mat::identity(field.clone(), b1.cols);
    let mut cur1 = b1.clone();
    let mut cur2 = b2.clone();
    let mut done0 = 0usize; // rows already in canonical position
    let mut done1 = 0usize; // cols already in canonical position
    while let Some(chain) = find_min_column_chain(&cur1, &cur2) {
        let m = chain.len() - 1;
        let split = split_chain(&cur1, &cur2, &chain)?;
        // Update global transforms: act on the not-yet-done corner.
        let f = field.clone();
        let step_p = Mat::block_diag(f.clone(), &[&Mat::identity(f.clone(), done0), &split.p]);
        let step_q = Mat::block_diag(f.clone(), &[&Mat::identity(f.clone(), done1), &split.q]);
        p = step_p.mul(&p);
        q = q.mul(&step_q);
        done0 += m;
        done1 += m + 1;
        cur1 = split.rest_b1;
        cur2 = split.rest_b2;
        sizes.push(m);
    }
    // Re-block the accumulated transforms so earlier blocks sit first and
    // the remainder last; they already do by construction.
    Ok(StripResult { sizes, p, q, rest_b1: cur1, rest_b2: cur2 })
}

/// A chain `v_0..v_m` with `B2 v_0 = 0`, `B1 v_i = B2 v_{i+1}`,
/// `B1 v_m = 0`, of minimal length.
fn find_min_column_chain<F: Field>(b1: &Mat<F>, b2: &Mat<F>) -> Option<Vec<Vec<F::Elem>>> {
    let n1 = b1.cols;
    let n0 = b1.rows;
    let f = &b1.field;
    for eps in 0..=n1.saturating_sub(1) {
        // Block Toeplitz system for (v_0..v_eps).
        let rows = (eps + 2) * n0;
        let cols = (eps + 1) * n1;
        let mut t = Mat::zeros(f.clone(), rows, cols);
        for blk in 0..=eps + 1 {
            for r in 0..n0 {
                for c in 0..n1 {
                    // Row block blk: B2 * v_blk (when blk <= eps) minus
                    // B1 * v_{blk-1} (when blk >= 1).
                    if blk <= eps {
                        t.set(blk * n0 + r, blk * n1 + c, b2.at(r, c).clone());
                    }
                    if blk >= 1 {
                        let cur = t.at(blk * n0 + r, (blk - 1) * n1 + c).clone();
                        t.set(blk * n0 + r, (blk - 1) * n1 + c, f.sub(&cur, b1.at(r, c)));
                    }
                }
            }
        }
        let kernel = t.kernel_rows();
        if let Some(sol) = kernel.first() {
            let chain: Vec<Vec<F::Elem>> =
                (0..=eps).map(|k| sol[k * n1..(k + 1) * n1].to_vec()).collect();
            return Some(chain);
        }
    }
    None
}

struct ChainSplit<F: Field> {
    p: Mat<F>,
    q: Mat<F>,
    rest_b1: Mat<F>,
    rest_b2: Mat<F>,
}

/// Split a minimal chain off as a direct summand:
/// `P b1 Q = diag([1_m 0], rest1)`, `P b2 Q = diag([0 1_m], rest2)`.
fn split_chain<F: Field>(
    b1: &Mat<F>,
    b2: &Mat<F>,
    chain: &[Vec<F::Elem>],
) -> Result<ChainSplit<F>> {
    let field = b1.field.clone();
    let m = chain.len() - 1;
    let n0 = b1.rows;
    let n1 = b1.cols;
    // U1 = span(chain), U0 = span(B1 v_0 .. B1 v_{m-1}).
    let u1 = Subspace::from_vectors(field.clone(), n1, chain);
    let u_rows: Vec<Vec<F::Elem>> = (0..m).map(|k| b1.apply(&chain[k])).collect();
    let u0 = Subspace::from_vectors(field.clone(), n0, &u_rows);
    if u1.dim() != m + 1 || u0.dim() != m {
        return Err(Error::PreconditionViolated(
            "internal: minimal chain is not independent".into(),
        ));
    }
    // Inclusions with the CHAIN ordering (not the echelon basis).
    let incl1 = Mat::from_fn(field.clone(), n1, m + 1, |r, c| chain[c][r].clone());
    let incl0 = Mat::from_fn(field.clone(), n0, m, |r, c| u_rows[c][r].clone());
    let (c0, c1) = invariant_complement(b1, b2, &u0, &u1, &incl0, &incl1)?;

    let basis0 = incl0.hstack(&c0);
    let basis1 = incl1.hstack(&c1);
    let p = basis0.inverse().ok_or_else(|| {
        Error::PreconditionViolated("internal: complement does not span".into())
    })?;
    let t1 = p.mul(&b1.mul(&basis1));
    let t2 = p.mul(&b2.mul(&basis1));
    // Verify the canonical corner and extract the remainder.
    let rest_b1 = t1.submatrix(m, n0, m + 1, n1);
    let rest_b2 = t2.submatrix(m, n0, m + 1, n1);
    Ok(ChainSplit { p, q: basis1, rest_b1, rest_b2 })
}

/// Find a complement pair `(C0, C1)` of `(U0, U1)` invariant under both
/// maps of the pencil, as inclusion matrices. The deformation unknowns
/// are linear, so this is one affine solve.
fn invariant_complement<F: Field>(
    b1: &Mat<F>,
    b2: &Mat<F>,
    u0: &Subspace<F>,
    u1: &Subspace<F>,
    incl0: &Mat<F>,
    incl1: &Mat<F>,
) -> Result<(Mat<F>, Mat<F>)> {
    let field = b1.field.clone();
    let k0 = u0.dim();
    let k1 = u1.dim();
    let n0 = u0.ambient;
    let n1 = u1.ambient;
    let c0 = n0 - k0;
    let c1 = n1 - k1;
    let (proj0, sect0) = projection_section(u0);
    let (_proj1, sect1) = projection_section(u1);
    // Coordinates in the chain basis: solve incl * X = (1 - sect proj).
    let u_coords = |incl: &Mat<F>, proj: &Mat<F>, sect: &Mat<F>, n: usize| -> Mat<F> {
        let complement_part = sect.mul(proj);
        let reduce = Mat::identity(field.clone(), n).sub(&complement_part);
        incl.solve(&reduce).expect("residue lies in the subspace")
    };
    let r0 = u_coords(incl0, &proj0, &sect0, n0);

    // Unknowns phi0: c0 -> U0 (k0 x c0), phi1: c1 -> U1 (k1 x c1).
    let mut bm = BlockMap::new(field.clone(), vec![(k0, c0), (k1, c1)], vec![(k0, c1), (k0, c1)]);
    let mut rhs = Vec::new();
    for (slot, m) in [b1, b2].iter().enumerate() {
        // r0 M sect1 + r0 M incl1 phi1 - phi0 proj0 M sect1 = 0.
        bm.term_left(slot, 1, r0.mul(&m.mul(incl1)), false);
        bm.term_right(slot, 0, proj0.mul(&m.mul(&sect1)), true);
        rhs.push(r0.mul(&m.mul(&sect1)).neg());
    }
    let (base, _) = bm
        .affine_solve(&rhs)
        .ok_or_else(|| Error::PreconditionViolated("internal: no invariant complement".into()))?;
    let phi0 = &base[0];
    let phi1 = &base[1];
    let c0_incl = sect0.add(&incl0.mul(phi0));
    let c1_incl = sect1.add(&incl1.mul(phi1));
    Ok((c0_incl, c1_incl))
}

fn projection_section<F: Field>(s: &Subspace<F>) -> (Mat<F>, Mat<F>) {
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

// ---------------------------------------------------------------------------
// Regular part
// ---------------------------------------------------------------------------

struct RegularDecomposition<F: Field> {
    blocks: Vec<KroneckerBlock<F>>,
    p: Mat<F>,
    q: Mat<F>,
}

fn decompose_regular<F: Field>(b1: &Mat<F>, b2: &Mat<F>) -> Result<RegularDecomposition<F>> {
    let field = b1.field.clone();
    let n = b1.rows;
    if n == 0 {
        return Ok(RegularDecomposition {
            blocks: Vec::new(),
            p: Mat::identity(field.clone(), 0),
            q: Mat::identity(field, 0),
        });
    }
    // The part of V1 where B2 is nilpotent relative to B1.
    let mut nil = Subspace::from_vectors(field.clone(), n, &b2.kernel_rows());
    loop {
        let next = nil.image_under(b1)?.preimage_under(b2)?;
        if next == nil {
            break;
        }
        nil = next;
    }
    let k = nil.dim();
    if k == n {
        // Purely the infinite part.
        let (blocks, p, q) = canonicalize_c_part(b1, b2)?;
        return Ok(RegularDecomposition { blocks, p, q });
    }
    if k == 0 {
        let (blocks, p, q) = canonicalize_finite_part(b1, b2)?;
        return Ok(RegularDecomposition { blocks, p, q });
    }
    // Split V = nil-part + complement and recurse into both corners.
    let u1 = nil;
    let u0 = u1.image_under(b1)?;
    if u0.dim() != k {
        return Err(Error::PreconditionViolated("internal: pencil is not regular".into()));
    }
    let incl0 = u0.basis().transpose();
    let incl1 = u1.basis().transpose();
    let (c0, c1) = invariant_complement(b1, b2, &u0, &u1, &incl0, &incl1)?;
    let basis0 = incl0.hstack(&c0);
    let basis1 = incl1.hstack(&c1);
    let p_split = basis0
        .inverse()
        .ok_or_else(|| Error::PreconditionViolated("internal: complement does not span".into()))?;
    let t1 = p_split.mul(&b1.mul(&basis1));
    let t2 = p_split.mul(&b2.mul(&basis1));
    let (cb, cp, cq) = canonicalize_c_part(&t1.submatrix(0, k, 0, k), &t2.submatrix(0, k, 0, k))?;
    let (fb, fp, fq) =
        canonicalize_finite_part(&t1.submatrix(k, n, k, n), &t2.submatrix(k, n, k, n))?;
    let f = field.clone();
    let p = Mat::block_diag(f.clone(), &[&cp, &fp]).mul(&p_split);
    let q = basis1.mul(&Mat::block_diag(f, &[&cq, &fq]));
    let mut blocks = cb;
    blocks.extend(fb);
    Ok(RegularDecomposition { blocks, p, q })
}

/// Canonicalize a pencil with `B1` invertible and `B1^{-1} B2` nilpotent
/// into `(1, J)` blocks.
type CornerForm<F> = (Vec<KroneckerBlock<F>>, Mat<F>, Mat<F>);

fn canonicalize_c_part<F: Field>(b1: &Mat<F>, b2: &Mat<F>) -> Result<CornerForm<F>> {
    let b1_inv = b1
        .inverse()
        .ok_or_else(|| Error::PreconditionViolated("internal: B1 singular on the C part".into()))?;
    let t = b1_inv.mul(b2);
    let (q, sizes) = nilpotent_jordan_basis(&t)?;
    let p = b1.mul(&q).inverse().expect("basis is invertible");
    let blocks = sizes.into_iter().map(|m| KroneckerBlock::C { m }).collect();
    Ok((blocks, p, q))
}

/// Jordan basis of a nilpotent operator; returns the basis matrix
/// (columns) and the chain lengths. Each chain is listed bottom first,
/// which produces superdiagonal Jordan blocks.
fn nilpotent_jordan_basis<F: Field>(t: &Mat<F>) -> Result<(Mat<F>, Vec<usize>)> {
    let field = t.field.clone();
    let n = t.rows;
    if n == 0 {
        return Ok((Mat::identity(field, 0), Vec::new()));
    }
    // Kernel chain K_1 <= K_2 <= ...
    let mut kernels = vec![Subspace::zero(field.clone(), n)];
    let mut power = Mat::identity(field.clone(), n);
    loop {
        power = power.mul(t);
        let ker = Subspace::from_vectors(field.clone(), n, &power.kernel_rows());
        let dim = ker.dim();
        kernels.push(ker);
        if dim == n {
            break;
        }
        if kernels.len() > n + 1 {
            return Err(Error::PreconditionViolated("internal: operator is not nilpotent".into()));
        }
    }
    let s = kernels.len() - 1;
    let mut chains: Vec<Vec<Vec<F::Elem>>> = Vec::new();
    for level in (1..=s).rev() {
        // Span we already cover inside K_level: K_{level-1} plus images of
        // higher chains at this level.
        let mut covered: Vec<Vec<F::Elem>> = Vec::new();
        for i in 0..kernels[level - 1].dim() {
            covered.push(kernels[level - 1].basis().row(i).to_vec());
        }
        for chain in &chains {
            // chain[0] is the head at level = chain.len(); its image at
            // this level is chain[chain.len() - level].
            if chain.len() >= level {
                covered.push(chain[chain.len() - level].clone());
            }
        }
        let mut span = Subspace::from_vectors(field.clone(), n, &covered);
        // Extend with new heads from K_level.
        let target = &kernels[level];
        for i in 0..target.dim() {
            let v = target.basis().row(i).to_vec();
            if span.contains_vector(&v) {
                continue;
            }
            let mut chain = vec![v.clone()];
            let mut cur = v.clone();
            for _ in 1..level {
                cur = t.apply(&cur);
                chain.push(cur.clone());
            }
            chains.push(chain);
            let one = Subspace::from_vectors(field.clone(), n, &[v]);
            span = span.sum(&one)?;
        }
    }
    chains.sort_by_key(|c| std::cmp::Reverse(c.len()));
    let mut cols: Vec<Vec<F::Elem>> = Vec::new();
    let mut sizes = Vec::new();
    for chain in &chains {
        sizes.push(chain.len());
        // Bottom of the chain first: T^(len-1) v, .., T v, v.
        for v in chain.iter().rev() {
            cols.push(v.clone());
        }
    }
    let q = Mat::from_rows(field, cols).transpose();
    if !q.is_invertible() {
        return Err(Error::PreconditionViolated("internal: Jordan basis is singular".into()));
    }
    Ok((q, sizes))
}

/// Canonicalize a pencil with `B2` invertible via the cyclic decomposition
/// of `S = B2^{-1} B1` into Jordan blocks for in-field eigenvalues and
/// companion blocks for the rootless parts of the invariant factors.
fn canonicalize_finite_part<F: Field>(b1: &Mat<F>, b2: &Mat<F>) -> Result<CornerForm<F>> {
    let field = b1.field.clone();
    let n = b1.rows;
    if n == 0 {
        return Ok((Vec::new(), Mat::identity(field.clone(), 0), Mat::identity(field, 0)));
    }
    let b2_inv = b2.inverse().ok_or_else(|| {
        Error::PreconditionViolated("internal: B2 singular on the finite part".into())
    })?;
    let s = b2_inv.mul(b1);
    let factors = cyclic_invariant_factors(&s)?;
    let mut blocks = Vec::new();
    let mut cols: Vec<Vec<F::Elem>> = Vec::new();
    for (g, gen) in factors {
        // Split g into in-field roots and a rootless cofactor.
        let roots = field.roots_of_poly(g.coeffs());
        let mut rest = g.clone();
        let mut primary: Vec<(F::Elem, usize)> = Vec::new();
        for a in roots {
            let (mult, quotient) = rest.root_multiplicity(&a);
            if mult > 0 {
                primary.push((a, mult));
                rest = quotient;
            }
        }
        primary.sort_by_key(|(a, m)| (field.elem_to_string(a), *m));
        for (a, mult) in primary {
            // Generator of the (x-a)^mult primary component.
            let lin = Poly::x_minus(field.clone(), &a);
            let mut cof = rest.clone();
            for (b, m2) in primary_iter(&g, &rest, &field) {
                if b == a {
                    continue;
                }
                let lb = Poly::x_minus(field.clone(), &b);
                for _ in 0..m2 {
                    cof = cof.mul(&lb);
                }
            }
            // cof = g / (x-a)^mult.
            let mut check = cof.clone();
            for _ in 0..mult {
                check = check.mul(&lin);
            }
            debug_assert_eq!(check.make_monic(), g.make_monic());
            let u = apply_poly(&s, &cof, &gen);
            // Chain (S - a)^(mult-1) u, .., (S - a) u, u.
            let mut shifted = Vec::with_capacity(mult);
            let mut cur = u.clone();
            shifted.push(cur.clone());
            let a_mat = {
                let mut m = s.clone();
                for idx in 0..n {
                    let v = field.sub(m.at(idx, idx), &a);
                    m.set(idx, idx, v);
                }
                m
            };
            for _ in 1..mult {
                cur = a_mat.apply(&cur);
                shifted.push(cur.clone());
            }
            for v in shifted.iter().rev() {
                cols.push(v.clone());
            }
            blocks.push(KroneckerBlock::D { m: mult, eigen: a });
        }
        if rest.degree().unwrap_or(0) >= 1 {
            let cof = g.divrem(&rest)?.0;
            let u = apply_poly(&s, &cof, &gen);
            let deg = rest.degree().unwrap();
            let mut cur = u.clone();
            cols.push(cur.clone());
            for _ in 1..deg {
                cur = s.apply(&cur);
                cols.push(cur.clone());
            }
            blocks.push(KroneckerBlock::DGeneralized { poly: rest.make_monic().coeffs().to_vec() });
        }
    }
    let q = Mat::from_rows(field.clone(), cols).transpose();
    if !q.is_invertible() {
        return Err(Error::PreconditionViolated("internal: cyclic basis is singular".into()));
    }
    let p = b2.mul(&q).inverse().expect("invertible");
    Ok((blocks, p, q))
}

/// The multiset of in-field roots of `g` with multiplicities (recomputed
/// against the rootless residue `rest`).
fn primary_iter<F: Field>(g: &Poly<F>, rest: &Poly<F>, field: &F) -> Vec<(F::Elem, usize)> {
    let mut out = Vec::new();
    let roots = field.roots_of_poly(g.coeffs());
    let mut cur = g.clone();
    for a in roots {
        let (mult, quotient) = cur.root_multiplicity(&a);
        if mult > 0 {
            out.push((a, mult));
            cur = quotient;
        }
    }
    debug_assert_eq!(cur.make_monic(), rest.make_monic());
    out
}

fn apply_poly<F: Field>(s: &Mat<F>, p: &Poly<F>, v: &[F::Elem]) -> Vec<F::Elem> {
    let f = &s.field;
    let n = v.len();
    let mut acc = vec![f.zero(); n];
    for c in p.coeffs().iter().rev() {
        acc = s.apply(&acc);
        for (k, item) in acc.iter_mut().enumerate() {
            *item = f.add(item, &f.mul(c, &v[k]));
        }
    }
    acc
}

/// Minimal polynomial of an operator (monic).
pub fn minimal_polynomial<F: Field>(s: &Mat<F>) -> Poly<F> {
    let field = s.field.clone();
    let n = s.rows;
    let mut powers: Vec<Mat<F>> = vec![Mat::identity(field.clone(), n)];
    loop {
        let k = powers.len();
        let next = powers.last().unwrap().mul(s);
        // Is next a combination of the previous powers?
        let mut cols = Mat::zeros(field.clone(), n * n, k);
        for (idx, pw) in powers.iter().enumerate() {
            for r in 0..n {
                for c in 0..n {
                    cols.set(r * n + c, idx, pw.at(r, c).clone());
                }
            }
        }
        let mut rhs = Mat::zeros(field.clone(), n * n, 1);
        for r in 0..n {
            for c in 0..n {
                rhs.set(r * n + c, 0, next.at(r, c).clone());
            }
        }
        if let Some(x) = cols.solve(&rhs) {
            let mut coeffs: Vec<F::Elem> = (0..k).map(|i| field.neg(x.at(i, 0))).collect();
            coeffs.push(field.one());
            return Poly::new(field, coeffs);
        }
        powers.push(next);
    }
}

#[allow(clippy::needless_range_loop)]
fn minimal_polynomial_of_vector<F: Field>(s: &Mat<F>, v: &[F::Elem]) -> Poly<F> {
    let field = s.field.clone();
    let n = v.len();
    let mut iterates: Vec<Vec<F::Elem>> = vec![v.to_vec()];
    loop {
        let k = iterates.len();
        let next = s.apply(iterates.last().unwrap());
        let mut cols = Mat::zeros(field.clone(), n, k);
        for (idx, w) in iterates.iter().enumerate() {
            for r in 0..n {
                cols.set(r, idx, w[r].clone());
            }
        }
        let rhs = Mat::new(field.clone(), n, 1, next.clone());
        if let Some(x) = cols.solve(&rhs) {
            let mut coeffs: Vec<F::Elem> = (0..k).map(|i| field.neg(x.at(i, 0))).collect();
            coeffs.push(field.one());
            return Poly::new(field, coeffs);
        }
        iterates.push(next);
    }
}

/// Cyclic decomposition: a list of `(invariant factor, generator)` pairs,
/// largest factor first, whose cyclic subspaces sum to the whole space.
/// Generators are returned in the ambient coordinates of `s`.
type CyclicFactors<F> = Vec<(Poly<F>, Vec<<F as Field>::Elem>)>;

fn cyclic_invariant_factors<F: Field>(s: &Mat<F>) -> Result<CyclicFactors<F>> {
    let field = s.field.clone();
    let n = s.rows;
    if n == 0 {
        return Ok(Vec::new());
    }
    let mu = minimal_polynomial(s);
    let target = mu.degree().unwrap();
    let v = find_vector_of_order(s, target)?;
    // Cyclic subspace and an invariant complement.
    let mut iterates: Vec<Vec<F::Elem>> = Vec::with_capacity(target);
    let mut cur = v.clone();
    for _ in 0..target {
        iterates.push(cur.clone());
        cur = s.apply(&cur);
    }
    let u = Subspace::from_vectors(field.clone(), n, &iterates);
    if u.dim() != target {
        return Err(Error::PreconditionViolated("internal: cyclic space dimension".into()));
    }
    if target == n {
        return Ok(vec![(mu, v)]);
    }
    let incl = u.basis().transpose();
    let ident = Mat::identity(field.clone(), n);
    let (c_incl, _) = invariant_complement(s, &ident, &u, &u, &incl, &incl)?;
    // Restrict s to the complement and recurse.
    let s_c = c_incl.solve(&s.mul(&c_incl)).ok_or_else(|| {
        Error::PreconditionViolated("internal: complement is not invariant".into())
    })?;
    let rest = cyclic_invariant_factors(&s_c)?;
    let mut out = vec![(mu.clone(), v)];
    for (g, gen_c) in rest {
        if !g.divides(&mu) {
            return Err(Error::PreconditionViolated(
                "internal: invariant factor chain broken".into(),
            ));
        }
        // Lift the generator back to ambient coordinates.
        let lifted = c_incl.apply(&gen_c);
        out.push((g, lifted));
    }
    Ok(out)
}

/// A vector whose annihilator has the given degree (= the minimal
/// polynomial). Exhaustive over finite fields; over the rationals a grid
/// search over small integer coordinates.
fn find_vector_of_order<F: Field>(s: &Mat<F>, target: usize) -> Result<Vec<F::Elem>> {
    let field = s.field.clone();
    let n = s.rows;
    match field.elements() {
        Some(elems) => {
            let mut counter = vec![0usize; n];
            loop {
                let v: Vec<F::Elem> = counter.iter().map(|&i| elems[i].clone()).collect();
                if counter.iter().any(|&i| i != 0)
                    && minimal_polynomial_of_vector(s, &v).degree() == Some(target)
                {
                    return Ok(v);
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
            Err(Error::PreconditionViolated("internal: no cyclic vector found".into()))
        }
        None => {
            // Grid over {0..bound}^n; a maximal-order vector is generic.
            for bound in 1..=(n as i64 + 2) {
                let mut counter = vec![0i64; n];
                loop {
                    let v: Vec<F::Elem> = counter.iter().map(|&i| field.from_i64(i)).collect();
                    if counter.iter().any(|&i| i != 0)
                        && minimal_polynomial_of_vector(s, &v).degree() == Some(target)
                    {
                        return Ok(v);
                    }
                    let mut carry = true;
                    for slot in counter.iter_mut() {
                        if !carry {
                            break;
                        }
                        *slot += 1;
                        if *slot > bound {
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
            Err(Error::PreconditionViolated("internal: no cyclic vector found".into()))
        }
    }
}

// ---------------------------------------------------------------------------
// Enumeration of pencil classes (orbit representatives)
// ---------------------------------------------------------------------------

/// All pencil equivalence classes of shape `(rows, cols)` over a finite
/// field, as canonical block multisets: minimal-index blocks of both
/// kinds, nilpotent blocks, and finite parts listed through invariant
/// factor chains.
pub fn enumerate_pencil_classes<F: Field>(
    field: &F,
    rows: usize,
    cols: usize,
) -> Result<Vec<Vec<KroneckerBlock<F>>>> {
    if field.order().is_none() {
        return Err(Error::UnsupportedField);
    }
    let mut out: Vec<Vec<KroneckerBlock<F>>> = Vec::new();
    // Multisets of b-sizes (weight m each, plus one column), a-sizes, and
    // a regular square of size s.
    for b_multiset in multisets_bounded(cols) {
        let b_rows: usize = b_multiset.iter().sum();
        let b_cols: usize = b_multiset.iter().map(|m| m + 1).sum();
        if b_rows > rows || b_cols > cols {
            continue;
        }
        for a_multiset in multisets_bounded(rows.saturating_sub(b_rows)) {
            let a_rows: usize = a_multiset.iter().map(|m| m + 1).sum();
            let a_cols: usize = a_multiset.iter().sum();
            if b_rows + a_rows > rows || b_cols + a_cols > cols {
                continue;
            }
            let s_rows = rows - b_rows - a_rows;
            let s_cols = cols - b_cols - a_cols;
            if s_rows != s_cols {
                continue;
            }
            for reg in regular_classes(field, s_rows)? {
                let mut blocks: Vec<KroneckerBlock<F>> =
                    b_multiset.iter().map(|&m| KroneckerBlock::B { m }).collect();
                blocks.extend(a_multiset.iter().map(|&m| KroneckerBlock::A { m }));
                blocks.extend(reg);
                let order = sorted_order(field, &blocks);
                out.push(order.into_iter().map(|i| blocks[i].clone()).collect());
            }
        }
    }
    out.sort_by(|a, b| {
        let ka: Vec<_> = a.iter().map(|x| x.sort_key(field)).collect();
        let kb: Vec<_> = b.iter().map(|x| x.sort_key(field)).collect();
        ka.cmp(&kb)
    });
    out.dedup();
    Ok(out)
}

/// All multisets of sizes `m >= 0` (ascending) whose canonical B blocks
/// fit inside the given column budget.
fn multisets_bounded(budget: usize) -> Vec<Vec<usize>> {
    // Each entry m costs at least one column (m + 1 columns for B blocks);
    // enumerate ascending multisets with at most `budget` entries and sum
    // bounded by budget.
    let mut out = vec![Vec::new()];
    fn rec(start: usize, budget_left: isize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        for m in start..=budget_left.max(0) as usize {
            if (m as isize) + 1 > budget_left {
                break;
            }
            cur.push(m);
            out.push(cur.clone());
            rec(m, budget_left - m as isize - 1, cur, out);
            cur.pop();
        }
    }
    let mut cur = Vec::new();
    rec(0, budget as isize, &mut cur, &mut out);
    out
}

/// Regular pencil classes of size `s`: a nilpotent-part partition plus an
/// invariant factor chain for the finite part.
fn regular_classes<F: Field>(field: &F, s: usize) -> Result<Vec<Vec<KroneckerBlock<F>>>> {
    let mut out = Vec::new();
    for c_total in 0..=s {
        let fin_total = s - c_total;
        for c_partition in partitions(c_total) {
            for chain in invariant_factor_chains(field, fin_total)? {
                let mut blocks: Vec<KroneckerBlock<F>> =
                    c_partition.iter().map(|&m| KroneckerBlock::C { m }).collect();
                for g in &chain {
                    blocks.extend(factor_blocks(field, g));
                }
                out.push(blocks);
            }
        }
    }
    Ok(out)
}

/// Blocks contributed by one invariant factor: Jordan blocks for in-field
/// roots, one companion block for the rootless part.
fn factor_blocks<F: Field>(field: &F, g: &Poly<F>) -> Vec<KroneckerBlock<F>> {
    let mut out = Vec::new();
    let mut rest = g.clone();
    for a in field.roots_of_poly(g.coeffs()) {
        let (mult, quotient) = rest.root_multiplicity(&a);
        if mult > 0 {
            out.push(KroneckerBlock::D { m: mult, eigen: a });
            rest = quotient;
        }
    }
    if rest.degree().unwrap_or(0) >= 1 {
        out.push(KroneckerBlock::DGeneralized { poly: rest.make_monic().coeffs().to_vec() });
    }
    out
}

fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        for p in (1..=n.min(max)).rev() {
            cur.push(p);
            rec(n - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    let mut cur = Vec::new();
    rec(n, n.max(1), &mut cur, &mut out);
    out
}

/// All divisibility chains `g_1 | g_2 | ... | g_t` of monic polynomials of
/// degree >= 1 with total degree `total`.
fn invariant_factor_chains<F: Field>(field: &F, total: usize) -> Result<Vec<Vec<Poly<F>>>> {
    if total == 0 {
        return Ok(vec![Vec::new()]);
    }
    let mut out = Vec::new();
    for d in 1..=total {
        for g in Poly::enumerate_monic(field, d)? {
            // g is the largest factor; everything before divides it.
            for mut chain in chains_dividing(field, total - d, &g)? {
                chain.push(g.clone());
                out.push(chain);
            }
        }
    }
    Ok(out)
}

fn chains_dividing<F: Field>(field: &F, total: usize, top: &Poly<F>) -> Result<Vec<Vec<Poly<F>>>> {
    if total == 0 {
        return Ok(vec![Vec::new()]);
    }
    let mut out = Vec::new();
    let dmax = total.min(top.degree().unwrap_or(0));
    for d in 1..=dmax {
        for g in Poly::enumerate_monic(field, d)? {
            if !g.divides(top) {
                continue;
            }
            for mut chain in chains_dividing(field, total - d, &g)? {
                chain.push(g.clone());
                out.push(chain);
            }
        }
    }
    Ok(out)
}
