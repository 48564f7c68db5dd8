//! Linear subspaces with a canonical reduced-row-echelon basis.
//!
//! Two subspaces are equal iff their echelon bases are identical, which
//! makes subspaces hashable and enumeration output deterministic.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::mat::Mat;

/// A subspace of `F^ambient`, represented by its unique reduced
/// row-echelon basis (basis vectors are the rows).
#[derive(Clone, PartialEq, Eq)]
pub struct Subspace<F: Field> {
    pub ambient: usize,
    basis: Mat<F>,
}

impl<F: Field> std::fmt::Debug for Subspace<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Subspace(dim {} of {}) {:?}", self.dim(), self.ambient, self.basis)
    }
}

impl<F: Field> Subspace<F> {
    /// Span of the rows of `gens`.
    pub fn span(gens: &Mat<F>) -> Self {
        let ambient = gens.cols;
        let (r, pivots) = gens.rref();
        let basis = r.submatrix(0, pivots.len(), 0, ambient);
        Subspace { ambient, basis }
    }

    pub fn zero(field: F, ambient: usize) -> Self {
        Subspace { ambient, basis: Mat::zeros(field, 0, ambient) }
    }

    pub fn full(field: F, ambient: usize) -> Self {
        Subspace { ambient, basis: Mat::identity(field, ambient) }
    }

    pub fn from_vectors(field: F, ambient: usize, vectors: &[Vec<F::Elem>]) -> Self {
        if vectors.is_empty() {
            return Self::zero(field, ambient);
        }
        Self::span(&Mat::from_rows(field, vectors.to_vec()))
    }

    pub fn field(&self) -> &F {
        &self.basis.field
    }

    pub fn dim(&self) -> usize {
        self.basis.rows
    }

    pub fn basis(&self) -> &Mat<F> {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient
    }

    pub fn check_ambient(&self, other: &Self) -> Result<()> {
        if self.ambient != other.ambient {
            return Err(Error::DimensionMismatch(format!(
                "ambient {} vs {}",
                self.ambient, other.ambient
            )));
        }
        self.basis.check_same_field(&other.basis)
    }

    pub fn sum(&self, other: &Self) -> Result<Self> {
        self.check_ambient(other)?;
        Ok(Self::span(&self.basis.vstack(&other.basis)))
    }

    /// Intersection via the kernel of the stacked-transpose system: a vector
    /// lies in both spans iff it is a row combination from each side.
    pub fn intersect(&self, other: &Self) -> Result<Self> {
        self.check_ambient(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.basis.field.clone(), self.ambient));
        }
        let stacked = self.basis.vstack(&other.basis);
        let kernel = stacked.transpose().kernel_rows();
        let f = self.basis.field.clone();
        let da = self.dim();
        let mut vectors = Vec::new();
        for coeffs in kernel {
            let mut v = vec![f.zero(); self.ambient];
            for (i, c) in coeffs.iter().take(da).enumerate() {
                for (j, item) in v.iter_mut().enumerate() {
                    *item = f.add(item, &f.mul(c, self.basis.at(i, j)));
                }
            }
            vectors.push(v);
        }
        Ok(Self::from_vectors(f, self.ambient, &vectors))
    }

    /// Image `{Mv : v in self}` inside the target of `M`.
    pub fn image_under(&self, m: &Mat<F>) -> Result<Self> {
        if m.cols != self.ambient {
            return Err(Error::DimensionMismatch(format!(
                "map domain {} vs ambient {}",
                m.cols, self.ambient
            )));
        }
        Ok(Self::span(&self.basis.mul(&m.transpose())))
    }

    /// Preimage `{v : Mv in self}` inside the domain of `M`.
    pub fn preimage_under(&self, m: &Mat<F>) -> Result<Self> {
        if m.rows != self.ambient {
            return Err(Error::DimensionMismatch(format!(
                "map target {} vs ambient {}",
                m.rows, self.ambient
            )));
        }
        let f = self.basis.field.clone();
        // Functionals vanishing on self = kernel of the basis matrix.
        let ann = self.basis.kernel_rows();
        if ann.is_empty() {
            return Ok(Self::full(f, m.cols));
        }
        let ann_mat = Mat::from_rows(f.clone(), ann);
        let constraint = ann_mat.mul(m);
        Ok(Self::from_vectors(f, m.cols, &constraint.kernel_rows()))
    }

    #[allow(clippy::needless_range_loop)]
    pub fn contains_vector(&self, v: &[F::Elem]) -> bool {
        assert_eq!(v.len(), self.ambient);
        let f = &self.basis.field;
        let mut v = v.to_vec();
        for i in 0..self.dim() {
            let pivot = (0..self.ambient)
                .find(|&c| f.is_one(self.basis.at(i, c)))
                .expect("echelon row has a pivot");
            if f.is_zero(&v[pivot]) {
                continue;
            }
            let c = v[pivot].clone();
            for j in 0..self.ambient {
                v[j] = f.sub(&v[j], &f.mul(&c, self.basis.at(i, j)));
            }
        }
        v.iter().all(|e| f.is_zero(e))
    }

    pub fn contains(&self, other: &Self) -> bool {
        other.ambient == self.ambient
            && (0..other.dim()).all(|i| self.contains_vector(other.basis.row(i)))
    }

    /// Coordinates of `v` in the echelon basis, if `v` lies in the subspace.
    #[allow(clippy::needless_range_loop)]
    pub fn coords_of(&self, v: &[F::Elem]) -> Option<Vec<F::Elem>> {
        let f = &self.basis.field;
        let mut v = v.to_vec();
        let mut coords = vec![f.zero(); self.dim()];
        for i in 0..self.dim() {
            let pivot = self.pivot_col(i);
            coords[i] = v[pivot].clone();
            if f.is_zero(&coords[i]) {
                continue;
            }
            let c = coords[i].clone();
            for j in 0..self.ambient {
                v[j] = f.sub(&v[j], &f.mul(&c, self.basis.at(i, j)));
            }
        }
        v.iter().all(|e| f.is_zero(e)).then_some(coords)
    }

    fn pivot_col(&self, row: usize) -> usize {
        let f = &self.basis.field;
        (0..self.ambient)
            .find(|&c| !f.is_zero(self.basis.at(row, c)))
            .expect("echelon row has a pivot")
    }

    pub fn pivot_cols(&self) -> Vec<usize> {
        (0..self.dim()).map(|i| self.pivot_col(i)).collect()
    }

    /// Ambient coordinates not used as pivots; the corresponding standard
    /// basis vectors project to a basis of the quotient.
    pub fn free_cols(&self) -> Vec<usize> {
        let pivots = self.pivot_cols();
        (0..self.ambient).filter(|c| !pivots.contains(c)).collect()
    }
}

/// Gaussian binomial coefficient `[n choose k]_q`; `None` on overflow.
pub fn gaussian_binomial(q: u128, n: usize, k: usize) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    // Product formula with exact division at each step.
    let mut num = 1u128;
    let mut den = 1u128;
    for i in 0..k {
        let qn = q.checked_pow((n - i) as u32)?;
        let qk = q.checked_pow((i + 1) as u32)?;
        num = num.checked_mul(qn.checked_sub(1)?)?;
        den = den.checked_mul(qk - 1)?;
        let g = gcd_u128(num, den);
        num /= g;
        den /= g;
    }
    (den == 1).then_some(num)
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    if a == 0 {
        1
    } else {
        a
    }
}

/// Total number of subspaces of `F_q^n` (the Galois number), `None` on overflow.
pub fn galois_number(q: u128, n: usize) -> Option<u128> {
    let mut total = 0u128;
    for k in 0..=n {
        total = total.checked_add(gaussian_binomial(q, n, k)?)?;
    }
    Some(total)
}

/// Default cap on the subspace count a single enumeration may produce.
/// Yields ambient-dimension bounds of 6 over GF(2) and 5 over GF(3).
pub const DEFAULT_SUBSPACE_BUDGET: u128 = 5000;

/// Every subspace of `F^ambient`, exactly once, in echelon-pivot
/// lexicographic order: by dimension, then pivot set, then free entries.
pub fn enumerate_subspaces<F: Field>(
    field: &F,
    ambient: usize,
    budget: Option<u128>,
) -> Result<Vec<Subspace<F>>> {
    let q = field.order().ok_or(Error::UnsupportedField)?;
    let budget = budget.unwrap_or(DEFAULT_SUBSPACE_BUDGET);
    let total = galois_number(q, ambient)
        .filter(|&t| t <= budget)
        .ok_or_else(|| {
            Error::BoundExceeded(format!(
                "subspace count of GF({q})^{ambient} exceeds budget {budget}"
            ))
        })?;
    let elems = field.elements().expect("finite field enumerates");
    let mut out = Vec::with_capacity(total as usize);
    for dim in 0..=ambient {
        for pivots in combinations(ambient, dim) {
            // Free positions: entries to the right of each pivot in
            // non-pivot columns.
            let mut free_pos = Vec::new();
            for (i, &p) in pivots.iter().enumerate() {
                for c in (p + 1)..ambient {
                    if !pivots.contains(&c) {
                        free_pos.push((i, c));
                    }
                }
            }
            let mut counter = vec![0usize; free_pos.len()];
            loop {
                let mut basis = Mat::zeros(field.clone(), dim, ambient);
                for (i, &p) in pivots.iter().enumerate() {
                    basis.set(i, p, field.one());
                }
                for (slot, &(i, c)) in free_pos.iter().enumerate() {
                    basis.set(i, c, elems[counter[slot]].clone());
                }
                out.push(Subspace { ambient, basis });
                // Increment the base-q counter.
                let mut carry = true;
                for slot in (0..counter.len()).rev() {
                    if !carry {
                        break;
                    }
                    counter[slot] += 1;
                    if counter[slot] == elems.len() {
                        counter[slot] = 0;
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
    debug_assert_eq!(out.len() as u128, total);
    Ok(out)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}
