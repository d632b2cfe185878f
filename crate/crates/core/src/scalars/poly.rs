//! Dense univariate polynomials over a [`ScalarField`], used for minimal
//! polynomials, characteristic polynomials and the factorization engine.

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{polyvec, ScalarElem, ScalarField};
use crate::error::{Error, Result};

/// A polynomial with exact coefficients, stored low to high with no trailing
/// zeros. The zero polynomial has an empty coefficient list.
#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    field: ScalarField,
    coeffs: Vec<ScalarElem>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut terms = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let cs = c.to_string();
            let coeff = if cs.contains('+') || cs.contains(' ') || (i > 0 && cs[1..].contains('-'))
            {
                format!("({cs})")
            } else {
                cs
            };
            let term = match i {
                0 => coeff,
                1 if coeff == "1" => "x".to_string(),
                1 => format!("{coeff}*x"),
                _ if coeff == "1" => format!("x^{i}"),
                _ => format!("{coeff}*x^{i}"),
            };
            terms.push(term);
        }
        write!(f, "{}", terms.join(" + "))
    }
}

impl Poly {
    pub fn new(field: ScalarField, coeffs: Vec<ScalarElem>) -> Self {
        let coeffs = polyvec::trim(coeffs);
        Poly { field, coeffs }
    }

    pub fn zero(field: &ScalarField) -> Self {
        Poly { field: field.clone(), coeffs: Vec::new() }
    }

    pub fn one(field: &ScalarField) -> Self {
        Poly { field: field.clone(), coeffs: vec![ScalarElem::one(field)] }
    }

    pub fn x(field: &ScalarField) -> Self {
        Poly {
            field: field.clone(),
            coeffs: vec![ScalarElem::zero(field), ScalarElem::one(field)],
        }
    }

    pub fn constant(c: ScalarElem) -> Self {
        let field = c.field().clone();
        Poly::new(field, vec![c])
    }

    pub fn from_i64(field: &ScalarField, coeffs: &[i64]) -> Self {
        Poly::new(
            field.clone(),
            coeffs.iter().map(|&n| ScalarElem::from_i64(field, n)).collect(),
        )
    }

    pub fn field(&self) -> &ScalarField {
        &self.field
    }

    /// Coefficients low to high, trailing zeros removed.
    pub fn coeffs(&self) -> &[ScalarElem] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> ScalarElem {
        self.coeffs.get(i).cloned().unwrap_or_else(|| ScalarElem::zero(&self.field))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> ScalarElem {
        self.coeffs.last().cloned().unwrap_or_else(|| ScalarElem::zero(&self.field))
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().map(|c| c.is_one()).unwrap_or(false)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = vec![ScalarElem::zero(&self.field); self.coeffs.len().max(other.coeffs.len())];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] = out[i].add(c);
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            out[i] = out[i].add(c);
        }
        Poly::new(self.field.clone(), out)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Poly {
        Poly {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        Poly {
            field: self.field.clone(),
            coeffs: polyvec::mul(&self.field, &self.coeffs, &other.coeffs),
        }
    }

    pub fn scale(&self, c: &ScalarElem) -> Poly {
        Poly::new(self.field.clone(), self.coeffs.iter().map(|x| x.mul(c)).collect())
    }

    pub fn pow(&self, n: usize) -> Poly {
        let mut out = Poly::one(&self.field);
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Euclidean division: self = q*other + r with deg r < deg other.
    pub fn divmod(&self, other: &Poly) -> Result<(Poly, Poly)> {
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let (q, r) = polyvec::divmod(&self.field, &self.coeffs, &other.coeffs);
        Ok((
            Poly { field: self.field.clone(), coeffs: q },
            Poly { field: self.field.clone(), coeffs: r },
        ))
    }

    pub fn divides(&self, other: &Poly) -> bool {
        match other.divmod(self) {
            Ok((_, r)) => r.is_zero(),
            Err(_) => false,
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.divmod(&b).expect("b nonzero");
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Scale to leading coefficient 1 (zero stays zero).
    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.leading().inv().expect("nonzero leading coefficient");
        self.scale(&inv)
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero(&self.field);
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.mul(&ScalarElem::from_i64(&self.field, i as i64)))
            .collect();
        Poly::new(self.field.clone(), coeffs)
    }

    pub fn eval(&self, x: &ScalarElem) -> ScalarElem {
        let mut acc = ScalarElem::zero(&self.field);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }

    /// Substitute x -> c*x, i.e. return f(c x).
    pub fn scale_argument(&self, c: &ScalarElem) -> Poly {
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        let mut power = ScalarElem::one(&self.field);
        for a in &self.coeffs {
            coeffs.push(a.mul(&power));
            power = power.mul(c);
        }
        Poly::new(self.field.clone(), coeffs)
    }

    /// Substitute x -> x + c.
    pub fn shift_argument(&self, c: &ScalarElem) -> Poly {
        let shift = Poly::new(
            self.field.clone(),
            vec![c.clone(), ScalarElem::one(&self.field)],
        );
        let mut acc = Poly::zero(&self.field);
        for a in self.coeffs.iter().rev() {
            acc = acc.mul(&shift).add(&Poly::constant(a.clone()));
        }
        acc
    }

    /// Compose with another polynomial: self(g(x)).
    pub fn compose(&self, g: &Poly) -> Poly {
        let mut acc = Poly::zero(&self.field);
        for a in self.coeffs.iter().rev() {
            acc = acc.mul(g).add(&Poly::constant(a.clone()));
        }
        acc
    }

    /// Lift all coefficients into an extension of the coefficient field.
    pub fn lift_to(&self, target: &ScalarField) -> Result<Poly> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.lift_to(target))
            .collect::<Result<Vec<_>>>()?;
        Ok(Poly::new(target.clone(), coeffs))
    }

    /// The squarefree part: self / gcd(self, self').
    pub fn squarefree_part(&self) -> Poly {
        if self.degree() == 0 {
            return self.monic();
        }
        let g = self.gcd(&self.derivative());
        if g.degree() == 0 {
            return self.monic();
        }
        let (q, _) = self.divmod(&g).expect("gcd divides");
        q.monic()
    }

    /// Resultant of two polynomials over the coefficient field, computed by
    /// the Euclidean remainder sequence.
    pub fn resultant(&self, other: &Poly) -> ScalarElem {
        let field = self.field.clone();
        let mut a = self.clone();
        let mut b = other.clone();
        if a.is_zero() || b.is_zero() {
            return ScalarElem::zero(&field);
        }
        let mut acc = ScalarElem::one(&field);
        let mut sign_flips = 0usize;
        loop {
            if b.degree() == 0 {
                // res(a, c) = c^{deg a}
                let c = b.leading();
                let pow = c.pow(a.degree() as i64).expect("nonzero constant");
                let mut r = acc.mul(&pow);
                if sign_flips % 2 == 1 {
                    r = r.neg();
                }
                return r;
            }
            let (_, r) = a.divmod(&b).expect("b nonzero");
            if r.is_zero() {
                return ScalarElem::zero(&field);
            }
            // res(a,b) = (-1)^{da db} lc(b)^{da - dr} res(b, r)
            let da = a.degree();
            let db = b.degree();
            let dr = r.degree();
            if (da * db) % 2 == 1 {
                sign_flips += 1;
            }
            let lcb = b.leading().pow((da - dr) as i64).expect("nonzero lc");
            acc = acc.mul(&lcb);
            a = b;
            b = r;
        }
    }

    /// Rational coefficient vector when every coefficient is rational.
    pub fn rational_coeffs(&self) -> Option<Vec<BigRational>> {
        self.coeffs.iter().map(|c| c.as_rational()).collect()
    }

    /// Clear denominators and content: returns the primitive integer
    /// polynomial (as rationals) and is only defined for rational input.
    pub fn primitive_integer(&self) -> Option<(Vec<num_bigint::BigInt>, BigRational)> {
        use num_bigint::BigInt;
        use num_integer::Integer;
        let rc = self.rational_coeffs()?;
        if rc.is_empty() {
            return Some((Vec::new(), BigRational::one()));
        }
        let mut den = BigInt::one();
        for c in &rc {
            den = den.lcm(c.denom());
        }
        let ints: Vec<BigInt> = rc.iter().map(|c| (c * BigRational::from(den.clone())).to_integer()).collect();
        let mut content = BigInt::zero();
        for c in &ints {
            content = content.gcd(c);
        }
        if content.is_zero() {
            content = BigInt::one();
        }
        if ints.last().map(|c| c.is_negative()).unwrap_or(false) {
            content = -content;
        }
        let prim: Vec<BigInt> = ints.iter().map(|c| c / &content).collect();
        let scale = BigRational::new(content, den);
        Some((prim, scale))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divmod_roundtrip() {
        let f = ScalarField::rationals();
        let a = Poly::from_i64(&f, &[1, 0, -3, 2, 5]);
        let b = Poly::from_i64(&f, &[2, 1, 1]);
        let (q, r) = a.divmod(&b).unwrap();
        assert_eq!(q.mul(&b).add(&r), a);
        assert!(r.degree() < b.degree());
    }

    #[test]
    fn gcd_of_product() {
        let f = ScalarField::rationals();
        let p = Poly::from_i64(&f, &[-1, 1]); // x - 1
        let q = Poly::from_i64(&f, &[1, 1]); // x + 1
        let a = p.mul(&q);
        let b = p.mul(&Poly::from_i64(&f, &[3, 1]));
        assert_eq!(a.gcd(&b), p.monic());
    }

    #[test]
    fn resultant_detects_common_root() {
        let f = ScalarField::rationals();
        let a = Poly::from_i64(&f, &[-2, 1]); // x - 2
        let b = Poly::from_i64(&f, &[-4, 0, 1]); // x^2 - 4
        assert!(a.resultant(&b).is_zero());
        let c = Poly::from_i64(&f, &[-3, 1]);
        assert!(!c.resultant(&b).is_zero());
    }

    #[test]
    fn resultant_multiplicative() {
        let f = ScalarField::rationals();
        let a = Poly::from_i64(&f, &[1, 2, 1]);
        let b = Poly::from_i64(&f, &[-5, 3]);
        let c = Poly::from_i64(&f, &[7, 0, 2]);
        let left = a.resultant(&b.mul(&c));
        let right = a.resultant(&b).mul(&a.resultant(&c));
        assert_eq!(left, right);
    }

    #[test]
    fn argument_transforms() {
        let f = ScalarField::rationals();
        let p = Poly::from_i64(&f, &[1, 1, 1]); // 1 + x + x^2
        let two = ScalarElem::from_i64(&f, 2);
        let scaled = p.scale_argument(&two); // 1 + 2x + 4x^2
        assert_eq!(scaled, Poly::from_i64(&f, &[1, 2, 4]));
        let shifted = p.shift_argument(&two); // p(x+2) = 7 + 5x + x^2
        assert_eq!(shifted, Poly::from_i64(&f, &[7, 5, 1]));
    }

    #[test]
    fn squarefree_part_strips_multiplicity() {
        let f = ScalarField::rationals();
        let p = Poly::from_i64(&f, &[-1, 1]); // x-1
        let q = Poly::from_i64(&f, &[2, 1]); // x+2
        let poly = p.pow(3).mul(&q);
        let sf = poly.squarefree_part();
        assert_eq!(sf, p.mul(&q).monic());
    }
}
