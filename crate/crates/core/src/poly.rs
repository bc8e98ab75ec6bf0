//! Dense univariate polynomials over a binary field.
//!
//! Coefficient `i` is the coefficient of `x^i`; the zero polynomial has an
//! empty coefficient vector. All operations take the owning [`FieldSpec`].

use crate::gf::{FieldElem, FieldSpec};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Poly {
    coeffs: Vec<FieldElem>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Poly {
        Poly {
            coeffs: vec![FieldElem::ONE],
        }
    }

    pub fn constant(c: FieldElem) -> Poly {
        Poly::from_coeffs(vec![c])
    }

    /// The monomial x.
    pub fn x() -> Poly {
        Poly {
            coeffs: vec![FieldElem::ZERO, FieldElem::ONE],
        }
    }

    /// x + alpha (equal to x - alpha in characteristic 2).
    pub fn linear(alpha: FieldElem) -> Poly {
        Poly {
            coeffs: vec![alpha, FieldElem::ONE],
        }
    }

    /// x^n with coefficient one.
    pub fn monomial(n: usize) -> Poly {
        let mut coeffs = vec![FieldElem::ZERO; n + 1];
        coeffs[n] = FieldElem::ONE;
        Poly { coeffs }
    }

    pub fn from_coeffs(mut coeffs: Vec<FieldElem>) -> Poly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == FieldElem::ONE
    }

    /// Degree as i64; the zero polynomial gets -1.
    pub fn degree(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn leading_coeff(&self) -> FieldElem {
        *self.coeffs.last().unwrap_or(&FieldElem::ZERO)
    }

    pub fn coeff(&self, i: usize) -> FieldElem {
        self.coeffs.get(i).copied().unwrap_or(FieldElem::ZERO)
    }

    pub fn add(&self, f: &FieldSpec, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| f.add(self.coeff(i), other.coeff(i)))
            .collect();
        Poly::from_coeffs(coeffs)
    }

    pub fn mul(&self, f: &FieldSpec, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![FieldElem::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = f.add(coeffs[i + j], f.mul(a, b));
            }
        }
        Poly::from_coeffs(coeffs)
    }

    pub fn scale(&self, f: &FieldSpec, c: FieldElem) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|&a| f.mul(a, c)).collect())
    }

    pub fn pow(&self, f: &FieldSpec, mut e: u64) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(f, &base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(f, &base);
            }
        }
        acc
    }

    /// Quotient and remainder; panics on division by the zero polynomial.
    pub fn divmod(&self, f: &FieldSpec, divisor: &Poly) -> (Poly, Poly) {
        assert!(!divisor.is_zero(), "polynomial division by zero");
        if self.degree() < divisor.degree() {
            return (Poly::zero(), self.clone());
        }
        let lead_inv = f.inv(divisor.leading_coeff()).expect("nonzero leading");
        let mut rem = self.coeffs.clone();
        let dd = divisor.coeffs.len() - 1;
        let mut quot = vec![FieldElem::ZERO; rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let c = rem[i];
            if c.is_zero() {
                continue;
            }
            let q = f.mul(c, lead_inv);
            quot[i - dd] = q;
            for (j, &dc) in divisor.coeffs.iter().enumerate() {
                rem[i - dd + j] = f.add(rem[i - dd + j], f.mul(q, dc));
            }
        }
        (Poly::from_coeffs(quot), Poly::from_coeffs(rem))
    }

    pub fn rem(&self, f: &FieldSpec, divisor: &Poly) -> Poly {
        self.divmod(f, divisor).1
    }

    /// Exact division; panics if the remainder is nonzero.
    pub fn div_exact(&self, f: &FieldSpec, divisor: &Poly) -> Poly {
        let (q, r) = self.divmod(f, divisor);
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    /// Monic gcd.
    pub fn gcd(&self, f: &FieldSpec, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(f, &b);
            a = b;
            b = r;
        }
        a.make_monic(f)
    }

    pub fn make_monic(&self, f: &FieldSpec) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let inv = f.inv(self.leading_coeff()).expect("nonzero leading");
        self.scale(f, inv)
    }

    /// Horner evaluation.
    pub fn eval(&self, f: &FieldSpec, at: FieldElem) -> FieldElem {
        let mut acc = FieldElem::ZERO;
        for &c in self.coeffs.iter().rev() {
            acc = f.add(f.mul(acc, at), c);
        }
        acc
    }

    /// Multiplicity of `alpha` as a root, by repeated deflation.
    pub fn root_multiplicity(&self, f: &FieldSpec, alpha: FieldElem) -> u64 {
        let mut count = 0;
        let lin = Poly::linear(alpha);
        let mut cur = self.clone();
        while !cur.is_zero() && cur.eval(f, alpha).is_zero() {
            cur = cur.div_exact(f, &lin);
            count += 1;
        }
        count
    }

    /// Full factorization into linear factors by exhaustive root finding plus
    /// deflation. Returns (constant, [(root, multiplicity)...]) or the degree
    /// of the non-split remainder.
    pub fn split_into_roots(
        &self,
        f: &FieldSpec,
    ) -> Result<(FieldElem, Vec<(FieldElem, u64)>), PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        let mut cur = self.make_monic(f);
        let mut roots = Vec::new();
        for alpha in f.elements() {
            if cur.degree() == 0 {
                break;
            }
            let mut mult = 0;
            let lin = Poly::linear(alpha);
            while cur.eval(f, alpha).is_zero() {
                cur = cur.div_exact(f, &lin);
                mult += 1;
            }
            if mult > 0 {
                roots.push((alpha, mult));
            }
        }
        if cur.degree() > 0 {
            return Err(PolyError::NonSplit {
                remainder_degree: cur.degree() as u64,
            });
        }
        Ok((self.leading_coeff(), roots))
    }

    /// x^(2^k) + x, the product of (x + alpha) over the subfield fixed by the
    /// k-fold Frobenius.
    pub fn additive_span(k: u32) -> Poly {
        let mut coeffs = vec![FieldElem::ZERO; (1 << k) + 1];
        coeffs[1] = FieldElem::ONE;
        coeffs[1 << k] = FieldElem::ONE;
        Poly { coeffs }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("the zero polynomial has no factorization")]
    ZeroPolynomial,
    #[error(
        "polynomial does not split into linear factors (remainder of degree {remainder_degree})"
    )]
    NonSplit { remainder_degree: u64 },
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::make_field;

    #[test]
    fn divmod_roundtrip() {
        let f = make_field(4).unwrap();
        let a = Poly::from_coeffs((1..10).map(|i| f.elem(i % 16)).collect());
        let b = Poly::from_coeffs(vec![f.elem(3), f.elem(1), f.elem(7)]);
        let (q, r) = a.divmod(&f, &b);
        let back = q.mul(&f, &b).add(&f, &r);
        assert_eq!(back, a);
        assert!(r.degree() < b.degree());
    }

    #[test]
    fn additive_span_factors_over_subfield() {
        // x^8 + x = product of (x + alpha) over GF(8) inside GF(64).
        let f = make_field(6).unwrap();
        let p = Poly::additive_span(3);
        let (lead, roots) = p.split_into_roots(&f).unwrap();
        assert_eq!(lead, f.one());
        assert_eq!(roots.len(), 8);
        for (alpha, mult) in &roots {
            assert_eq!(*mult, 1);
            assert!(f.in_subfield(*alpha, 3));
        }
    }

    #[test]
    fn non_split_detected() {
        // x^2 + x + 1 has no roots in GF(8) (gcd(2,3)=1).
        let f = make_field(3).unwrap();
        let p = Poly::from_coeffs(vec![f.one(), f.one(), f.one()]);
        match p.split_into_roots(&f) {
            Err(PolyError::NonSplit { remainder_degree }) => assert_eq!(remainder_degree, 2),
            other => panic!("expected non-split error, got {other:?}"),
        }
    }

    #[test]
    fn gcd_of_common_factor() {
        let f = make_field(4).unwrap();
        let common = Poly::linear(f.elem(5));
        let a = common.mul(&f, &Poly::linear(f.elem(2)));
        let b = common.mul(&f, &Poly::linear(f.elem(9)));
        assert_eq!(a.gcd(&f, &b), common.make_monic(&f));
    }

    #[test]
    fn root_multiplicity_counts() {
        let f = make_field(3).unwrap();
        let alpha = f.elem(4);
        let p = Poly::linear(alpha)
            .pow(&f, 3)
            .mul(&f, &Poly::linear(f.elem(1)));
        assert_eq!(p.root_multiplicity(&f, alpha), 3);
        assert_eq!(p.root_multiplicity(&f, f.elem(1)), 1);
        assert_eq!(p.root_multiplicity(&f, f.elem(2)), 0);
    }
}
