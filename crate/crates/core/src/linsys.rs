//! Assembly of linear maps between spaces of block matrices.
//!
//! Homomorphism spaces, the tangent complex, moment-map linearizations and
//! complement equations all reduce to systems whose unknowns are a tuple of
//! matrices and whose equations are sums of terms `L * X_b * R`. This
//! module flattens such systems into one ordinary matrix.

use crate::field::Field;
use crate::mat::Mat;

/// One kernel element per entry, reshaped into the unknown blocks.
#[allow(clippy::type_complexity)]
pub type BlockKernel<F> = Vec<Vec<Mat<F>>>;

/// Row-major flattening offsets for a list of block shapes.
fn offsets(shapes: &[(usize, usize)]) -> (Vec<usize>, usize) {
    let mut off = Vec::with_capacity(shapes.len());
    let mut total = 0;
    for &(r, c) in shapes {
        off.push(total);
        total += r * c;
    }
    (off, total)
}

/// A linear map from a tuple of matrix unknowns to a tuple of matrix
/// equations, built from terms `out += (-1)^negate * L * X_in * R`.
pub struct BlockMap<F: Field> {
    field: F,
    in_shapes: Vec<(usize, usize)>,
    out_shapes: Vec<(usize, usize)>,
    #[allow(clippy::type_complexity)]
    terms: Vec<(usize, usize, Mat<F>, Mat<F>, bool)>,
}

impl<F: Field> BlockMap<F> {
    pub fn new(field: F, in_shapes: Vec<(usize, usize)>, out_shapes: Vec<(usize, usize)>) -> Self {
        BlockMap { field, in_shapes, out_shapes, terms: Vec::new() }
    }

    /// Add a term `L * X_{in_block} * R` to equation block `out_block`.
    /// Shapes must compose: `L: out_rows x in_rows`, `R: in_cols x out_cols`.
    pub fn term(&mut self, out_block: usize, in_block: usize, l: Mat<F>, r: Mat<F>, negate: bool) {
        let (ir, ic) = self.in_shapes[in_block];
        let (or, oc) = self.out_shapes[out_block];
        assert_eq!((l.rows, l.cols), (or, ir), "left factor shape");
        assert_eq!((r.rows, r.cols), (ic, oc), "right factor shape");
        self.terms.push((out_block, in_block, l, r, negate));
    }

    /// Term `L * X` (right factor identity).
    pub fn term_left(&mut self, out_block: usize, in_block: usize, l: Mat<F>, negate: bool) {
        let ic = self.in_shapes[in_block].1;
        let r = Mat::identity(self.field.clone(), ic);
        self.term(out_block, in_block, l, r, negate);
    }

    /// Term `X * R` (left factor identity).
    pub fn term_right(&mut self, out_block: usize, in_block: usize, r: Mat<F>, negate: bool) {
        let ir = self.in_shapes[in_block].0;
        let l = Mat::identity(self.field.clone(), ir);
        self.term(out_block, in_block, l, r, negate);
    }

    pub fn domain_dim(&self) -> usize {
        offsets(&self.in_shapes).1
    }

    pub fn codomain_dim(&self) -> usize {
        offsets(&self.out_shapes).1
    }

    /// The matrix of the assembled map, acting on row-major flattened
    /// unknowns (as a column vector).
    pub fn assemble(&self) -> Mat<F> {
        let f = &self.field;
        let (in_off, in_total) = offsets(&self.in_shapes);
        let (out_off, out_total) = offsets(&self.out_shapes);
        let mut m = Mat::zeros(f.clone(), out_total, in_total);
        for (ob, ib, l, r, negate) in &self.terms {
            let (_, ic) = self.in_shapes[*ib];
            let (or, oc) = self.out_shapes[*ob];
            for a in 0..or {
                for b in 0..oc {
                    let row = out_off[*ob] + a * oc + b;
                    for i in 0..l.cols {
                        let lai = l.at(a, i);
                        if f.is_zero(lai) {
                            continue;
                        }
                        for j in 0..ic {
                            let coeff = f.mul(lai, r.at(j, b));
                            if f.is_zero(&coeff) {
                                continue;
                            }
                            let col = in_off[*ib] + i * ic + j;
                            let coeff = if *negate { f.neg(&coeff) } else { coeff };
                            let cur = f.add(m.at(row, col), &coeff);
                            m.set(row, col, cur);
                        }
                    }
                }
            }
        }
        m
    }

    /// Kernel of the assembled map, reshaped into block-matrix tuples.
    pub fn kernel(&self) -> BlockKernel<F> {
        let m = self.assemble();
        m.kernel_rows()
            .into_iter()
            .map(|flat| unflatten(&self.field, &self.in_shapes, &flat))
            .collect()
    }

    /// Particular solution of `map(X) = rhs` together with the kernel, or
    /// `None` if inconsistent. `rhs` is given per output block.
    pub fn affine_solve(&self, rhs: &[Mat<F>]) -> Option<(Vec<Mat<F>>, BlockKernel<F>)> {
        let m = self.assemble();
        let mut flat_rhs = Vec::with_capacity(m.rows);
        for (b, &(r, c)) in self.out_shapes.iter().enumerate() {
            assert_eq!((rhs[b].rows, rhs[b].cols), (r, c));
            flat_rhs.extend(rhs[b].entries().iter().cloned());
        }
        let rhs_mat = Mat::new(self.field.clone(), m.rows, 1, flat_rhs);
        let x = m.solve(&rhs_mat)?;
        let flat: Vec<F::Elem> = (0..x.rows).map(|i| x.at(i, 0).clone()).collect();
        let base = unflatten(&self.field, &self.in_shapes, &flat);
        Some((base, self.kernel()))
    }
}

/// Reshape a flat row-major vector into the given block shapes.
pub fn unflatten<F: Field>(field: &F, shapes: &[(usize, usize)], flat: &[F::Elem]) -> Vec<Mat<F>> {
    let (off, total) = offsets(shapes);
    assert_eq!(flat.len(), total);
    shapes
        .iter()
        .zip(&off)
        .map(|(&(r, c), &o)| Mat::new(field.clone(), r, c, flat[o..o + r * c].to_vec()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rationals;

    #[test]
    fn sylvester_kernel() {
        // Unknown X (2x2) with A X - X A = 0 for A = diag(1, 2):
        // solutions are the diagonal matrices.
        let q = Rationals;
        let a = Mat::from_i64(q, 2, 2, &[1, 0, 0, 2]);
        let mut bm = BlockMap::new(q, vec![(2, 2)], vec![(2, 2)]);
        bm.term_left(0, 0, a.clone(), false);
        bm.term_right(0, 0, a, true);
        let kernel = bm.kernel();
        assert_eq!(kernel.len(), 2);
        for sol in kernel {
            assert_eq!(sol[0].at(0, 1), &q.zero());
            assert_eq!(sol[0].at(1, 0), &q.zero());
        }
    }

    #[test]
    fn affine_solve_round_trip() {
        // X * R = B with R invertible: unique solution, empty kernel.
        let q = Rationals;
        let r = Mat::from_i64(q, 2, 2, &[1, 1, 0, 1]);
        let b = Mat::from_i64(q, 2, 2, &[3, 5, 1, 2]);
        let mut bm = BlockMap::new(q, vec![(2, 2)], vec![(2, 2)]);
        bm.term_right(0, 0, r.clone(), false);
        let (base, kernel) = bm.affine_solve(&[b.clone()]).unwrap();
        assert!(kernel.is_empty());
        assert_eq!(base[0].mul(&r), b);
    }
}
