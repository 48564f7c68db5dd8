//! Univariate polynomials over an exact field.
//!
//! Coefficients are stored ascending with trailing zeros trimmed; the zero
//! polynomial has an empty coefficient vector.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::mat::Mat;

#[derive(Clone, PartialEq, Eq)]
pub struct Poly<F: Field> {
    pub field: F,
    coeffs: Vec<F::Elem>,
}

impl<F: Field> std::fmt::Debug for Poly<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !self.field.is_zero(c))
            .map(|(i, c)| match i {
                0 => self.field.elem_to_string(c),
                1 => format!("{}*x", self.field.elem_to_string(c)),
                _ => format!("{}*x^{}", self.field.elem_to_string(c), i),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl<F: Field> Poly<F> {
    pub fn new(field: F, mut coeffs: Vec<F::Elem>) -> Self {
        while coeffs.last().map(|c| field.is_zero(c)).unwrap_or(false) {
            coeffs.pop();
        }
        Poly { field, coeffs }
    }

    pub fn zero(field: F) -> Self {
        Poly { field, coeffs: Vec::new() }
    }

    pub fn one(field: F) -> Self {
        let one = field.one();
        Poly { field, coeffs: vec![one] }
    }

    pub fn constant(field: F, c: F::Elem) -> Self {
        Poly::new(field, vec![c])
    }

    pub fn x(field: F) -> Self {
        let coeffs = vec![field.zero(), field.one()];
        Poly { field, coeffs }
    }

    /// `x - a`
    pub fn x_minus(field: F, a: &F::Elem) -> Self {
        let coeffs = vec![field.neg(a), field.one()];
        Poly { field, coeffs }
    }

    pub fn coeffs(&self) -> &[F::Elem] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> F::Elem {
        self.coeffs.get(i).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial has none.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&F::Elem> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().map(|c| self.field.is_one(c)).unwrap_or(false)
    }

    pub fn add(&self, other: &Self) -> Self {
        let f = &self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| f.add(&self.coeff(i), &other.coeff(i))).collect();
        Poly::new(f.clone(), coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let f = &self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| f.sub(&self.coeff(i), &other.coeff(i))).collect();
        Poly::new(f.clone(), coeffs)
    }

    pub fn scale(&self, c: &F::Elem) -> Self {
        let coeffs = self.coeffs.iter().map(|a| self.field.mul(a, c)).collect();
        Poly::new(self.field.clone(), coeffs)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let f = &self.field;
        if self.is_zero() || other.is_zero() {
            return Poly::zero(f.clone());
        }
        let mut coeffs = vec![f.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if f.is_zero(a) {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = f.add(&coeffs[i + j], &f.mul(a, b));
            }
        }
        Poly::new(f.clone(), coeffs)
    }

    pub fn divrem(&self, divisor: &Self) -> Result<(Self, Self)> {
        if divisor.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let f = self.field.clone();
        let dd = divisor.degree().unwrap();
        let lead_inv = f.inv(divisor.leading().unwrap())?;
        let mut rem = self.clone();
        let mut quo = vec![f.zero(); self.coeffs.len().saturating_sub(dd)];
        while let Some(dr) = rem.degree() {
            if dr < dd {
                break;
            }
            let c = f.mul(rem.leading().unwrap(), &lead_inv);
            quo[dr - dd] = c.clone();
            let mut coeffs = rem.coeffs.clone();
            for (i, b) in divisor.coeffs.iter().enumerate() {
                let idx = dr - dd + i;
                coeffs[idx] = f.sub(&coeffs[idx], &f.mul(&c, b));
            }
            rem = Poly::new(f.clone(), coeffs);
            debug_assert!(rem.degree().map(|d| d < dr).unwrap_or(true));
        }
        Ok((Poly::new(f, quo), rem))
    }

    pub fn divides(&self, other: &Self) -> bool {
        match other.divrem(self) {
            Ok((_, r)) => r.is_zero(),
            Err(_) => false,
        }
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b).expect("nonzero divisor");
            a = std::mem::replace(&mut b, r);
        }
        a.make_monic()
    }

    pub fn make_monic(&self) -> Self {
        match self.leading() {
            None => self.clone(),
            Some(l) => {
                let inv = self.field.inv(l).expect("leading coefficient is nonzero");
                self.scale(&inv)
            }
        }
    }

    pub fn eval(&self, x: &F::Elem) -> F::Elem {
        let f = &self.field;
        let mut acc = f.zero();
        for c in self.coeffs.iter().rev() {
            acc = f.add(&f.mul(&acc, x), c);
        }
        acc
    }

    /// Apply the polynomial to a square matrix.
    pub fn eval_matrix(&self, m: &Mat<F>) -> Mat<F> {
        assert!(m.is_square());
        let f = &self.field;
        let n = m.rows;
        let mut acc = Mat::zeros(f.clone(), n, n);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(m);
            for i in 0..n {
                let v = f.add(acc.at(i, i), c);
                acc.set(i, i, v);
            }
        }
        acc
    }

    /// Multiplicity of `a` as a root, dividing out `(x - a)` repeatedly.
    /// Returns the multiplicity and the quotient by `(x - a)^mult`.
    pub fn root_multiplicity(&self, a: &F::Elem) -> (usize, Self) {
        let lin = Poly::x_minus(self.field.clone(), a);
        let mut mult = 0;
        let mut cur = self.clone();
        loop {
            if cur.is_zero() {
                break;
            }
            let (q, r) = cur.divrem(&lin).expect("nonzero divisor");
            if r.is_zero() {
                mult += 1;
                cur = q;
            } else {
                break;
            }
        }
        (mult, cur)
    }

    /// Companion matrix of a monic polynomial of degree >= 1: subdiagonal
    /// ones, last column the negated coefficients.
    pub fn companion(&self) -> Mat<F> {
        assert!(self.is_monic() && !self.coeffs.is_empty());
        let f = self.field.clone();
        let n = self.coeffs.len() - 1;
        assert!(n >= 1, "companion needs degree >= 1");
        let mut m = Mat::zeros(f.clone(), n, n);
        for i in 1..n {
            m.set(i, i - 1, f.one());
        }
        for i in 0..n {
            m.set(i, n - 1, f.neg(&self.coeffs[i]));
        }
        m
    }

    /// All monic polynomials of exactly the given degree (finite fields only).
    pub fn enumerate_monic(field: &F, degree: usize) -> Result<Vec<Poly<F>>> {
        let elems = field.elements().ok_or(Error::UnsupportedField)?;
        let mut out = Vec::new();
        let mut counter = vec![0usize; degree];
        loop {
            let mut coeffs: Vec<F::Elem> = counter.iter().map(|&i| elems[i].clone()).collect();
            coeffs.push(field.one());
            out.push(Poly { field: field.clone(), coeffs });
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
        Ok(out)
    }

    /// Irreducibility over a finite field by trial division.
    pub fn is_irreducible(&self) -> Result<bool> {
        let d = match self.degree() {
            None | Some(0) => return Ok(false),
            Some(1) => return Ok(true),
            Some(d) => d,
        };
        for dd in 1..=d / 2 {
            for g in Poly::enumerate_monic(&self.field, dd)? {
                if g.divides(self) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}
