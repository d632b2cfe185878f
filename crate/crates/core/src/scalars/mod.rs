//! Exact coefficient arithmetic for the ground field: rationals plus simple
//! algebraic extensions kept as a tower, with the q-power and q-torsion
//! predicates used throughout the classification.
//!
//! A [`ScalarField`] is either the rationals or an extension of a parent
//! field by a monic irreducible minimal polynomial. A [`ScalarElem`] stores
//! dense coordinates over its parent field; arithmetic reduces modulo the
//! minimal polynomial at each level. Equality is exact.

pub mod factor;
pub mod poly;

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use poly::Poly;

/// Tag for the four 2-torsion cosets of k^x / q^Z.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TwoTorsion {
    One,
    MinusOne,
    /// Class of a square root of q. When no square root of q lives in the
    /// field this tag stands for the merged pair {±√q}.
    SqrtQ,
    MinusSqrtQ,
}

#[derive(Debug)]
enum FieldRepr {
    Rationals,
    Extension {
        parent: ScalarField,
        /// Non-leading coefficients of the monic minimal polynomial,
        /// low to high: x^d + minpoly[d-1] x^{d-1} + ... + minpoly[0].
        minpoly: Vec<ScalarElem>,
        name: String,
    },
}

/// A field in the tower: the rationals or a simple extension of its parent.
#[derive(Clone)]
pub struct ScalarField(Arc<FieldRepr>);

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.describe())
    }
}

impl PartialEq for ScalarField {
    fn eq(&self, other: &Self) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        match (&*self.0, &*other.0) {
            (FieldRepr::Rationals, FieldRepr::Rationals) => true,
            (
                FieldRepr::Extension { parent: p1, minpoly: m1, name: n1 },
                FieldRepr::Extension { parent: p2, minpoly: m2, name: n2 },
            ) => n1 == n2 && p1 == p2 && m1 == m2,
            _ => false,
        }
    }
}
impl Eq for ScalarField {}

impl ScalarField {
    /// The base field of rationals.
    pub fn rationals() -> Self {
        ScalarField(Arc::new(FieldRepr::Rationals))
    }

    pub fn is_rationals(&self) -> bool {
        matches!(&*self.0, FieldRepr::Rationals)
    }

    /// Degree of this field over its parent (1 for the rationals).
    pub fn degree(&self) -> usize {
        match &*self.0 {
            FieldRepr::Rationals => 1,
            FieldRepr::Extension { minpoly, .. } => minpoly.len(),
        }
    }

    /// Absolute degree over the rationals.
    pub fn absolute_degree(&self) -> usize {
        match &*self.0 {
            FieldRepr::Rationals => 1,
            FieldRepr::Extension { parent, minpoly, .. } => {
                minpoly.len() * parent.absolute_degree()
            }
        }
    }

    pub fn parent(&self) -> Option<&ScalarField> {
        match &*self.0 {
            FieldRepr::Rationals => None,
            FieldRepr::Extension { parent, .. } => Some(parent),
        }
    }

    pub fn generator_name(&self) -> Option<&str> {
        match &*self.0 {
            FieldRepr::Rationals => None,
            FieldRepr::Extension { name, .. } => Some(name),
        }
    }

    /// The monic minimal polynomial of the generator, as a polynomial over
    /// the parent field. None for the rationals.
    pub fn minimal_polynomial(&self) -> Option<Poly> {
        match &*self.0 {
            FieldRepr::Rationals => None,
            FieldRepr::Extension { parent, minpoly, .. } => {
                let mut coeffs = minpoly.clone();
                coeffs.push(ScalarElem::one(parent));
                Some(Poly::new(parent.clone(), coeffs))
            }
        }
    }

    /// True if `self` equals `base` or is built by extending `base`.
    pub fn extends(&self, base: &ScalarField) -> bool {
        if self == base {
            return true;
        }
        match &*self.0 {
            FieldRepr::Rationals => false,
            FieldRepr::Extension { parent, .. } => parent.extends(base),
        }
    }

    /// Human-readable tower description, e.g. `Q(a: x^2-2)(b: x^2-a)`.
    pub fn describe(&self) -> String {
        match &*self.0 {
            FieldRepr::Rationals => "Q".to_string(),
            FieldRepr::Extension { parent, name, .. } => {
                let mp = self.minimal_polynomial().unwrap();
                format!("{}({}: {})", parent.describe(), name, mp)
            }
        }
    }

    /// Adjoin a root of a monic irreducible polynomial over `self`.
    ///
    /// Rejects non-monic input, degree < 2, generator names already used in
    /// the tower, and reducible polynomials (naming a factor when the
    /// factorization engine finds one).
    pub fn extend(&self, minpoly: &Poly, name: &str) -> Result<ScalarField> {
        if minpoly.field() != self {
            return Err(Error::parameter("minimal polynomial is over the wrong field"));
        }
        if minpoly.degree() < 2 {
            return Err(Error::parameter("minimal polynomial must have degree >= 2"));
        }
        if !minpoly.is_monic() {
            return Err(Error::parameter("minimal polynomial must be monic"));
        }
        let mut walk = Some(self.clone());
        while let Some(f) = walk {
            if f.generator_name() == Some(name) {
                return Err(Error::parameter(format!(
                    "generator name `{name}` already used in the tower"
                )));
            }
            walk = f.parent().cloned();
        }
        match factor::irreducibility_witness(minpoly)? {
            None => {}
            Some(factor) => {
                return Err(Error::Reducible {
                    poly: minpoly.to_string(),
                    factor: factor.to_string(),
                });
            }
        }
        let d = minpoly.degree();
        Ok(ScalarField(Arc::new(FieldRepr::Extension {
            parent: self.clone(),
            minpoly: minpoly.coeffs()[..d].to_vec(),
            name: name.to_string(),
        })))
    }

    /// Extension that trusts the caller's irreducibility certificate; used
    /// where the minimal polynomial is the output of the factorization
    /// engine itself.
    pub(crate) fn extend_trusted(&self, minpoly: &Poly, name: &str) -> Result<ScalarField> {
        if minpoly.field() != self || !minpoly.is_monic() || minpoly.degree() < 2 {
            return Err(Error::parameter("bad trusted extension input"));
        }
        let mut unique = name.to_string();
        let mut counter = 1;
        while self.generator_by_name(&unique).is_some() {
            counter += 1;
            unique = format!("{name}{counter}");
        }
        let d = minpoly.degree();
        Ok(ScalarField(Arc::new(FieldRepr::Extension {
            parent: self.clone(),
            minpoly: minpoly.coeffs()[..d].to_vec(),
            name: unique,
        })))
    }

    /// The generator of this extension as an element of the field.
    pub fn generator(&self) -> Result<ScalarElem> {
        match &*self.0 {
            FieldRepr::Rationals => Err(Error::parameter("the rationals have no generator")),
            FieldRepr::Extension { parent, minpoly, .. } => {
                let mut coords = vec![ScalarElem::zero(parent); minpoly.len()];
                coords[1] = ScalarElem::one(parent);
                Ok(ScalarElem { field: self.clone(), repr: ElemRepr::Ext(coords) })
            }
        }
    }

    /// Look up a generator by name anywhere in the tower, lifted to `self`.
    pub fn generator_by_name(&self, name: &str) -> Option<ScalarElem> {
        let mut level = self.clone();
        loop {
            if level.generator_name() == Some(name) {
                let gen = level.generator().ok()?;
                return Some(gen.lift_to(self).ok()?);
            }
            level = level.parent()?.clone();
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum ElemRepr {
    Rat(BigRational),
    /// Dense coordinates over the parent field; length = extension degree.
    Ext(Vec<ScalarElem>),
}

/// An element of a [`ScalarField`]. Arithmetic is exact.
#[derive(Clone)]
pub struct ScalarElem {
    field: ScalarField,
    repr: ElemRepr,
}

impl fmt::Debug for ScalarElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ScalarElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            ElemRepr::Rat(r) => write!(f, "{r}"),
            ElemRepr::Ext(coords) => {
                let name = self.field.generator_name().unwrap_or("?");
                let mut terms: Vec<String> = Vec::new();
                for (i, c) in coords.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let cs = c.to_string();
                    let coeff = if cs.contains(['+', '-', ' ']) && !cs.starts_with('-') {
                        format!("({cs})")
                    } else if cs.contains(['+', ' ']) || cs[1..].contains('-') {
                        format!("({cs})")
                    } else {
                        cs
                    };
                    let term = match i {
                        0 => coeff,
                        1 if coeff == "1" => name.to_string(),
                        1 => format!("{coeff}*{name}"),
                        _ if coeff == "1" => format!("{name}^{i}"),
                        _ => format!("{coeff}*{name}^{i}"),
                    };
                    terms.push(term);
                }
                if terms.is_empty() {
                    write!(f, "0")
                } else {
                    write!(f, "{}", terms.join(" + "))
                }
            }
        }
    }
}

impl PartialEq for ScalarElem {
    fn eq(&self, other: &Self) -> bool {
        if self.field == other.field {
            return self.repr == other.repr;
        }
        // Tolerate comparisons across tower levels when one field extends
        // the other.
        if other.field.extends(&self.field) {
            if let Ok(lifted) = self.clone().lift_to(&other.field) {
                return lifted.repr == other.repr;
            }
        }
        if self.field.extends(&other.field) {
            if let Ok(lifted) = other.clone().lift_to(&self.field) {
                return lifted.repr == self.repr;
            }
        }
        false
    }
}
impl Eq for ScalarElem {}

impl ScalarElem {
    pub fn field(&self) -> &ScalarField {
        &self.field
    }

    pub fn zero(field: &ScalarField) -> Self {
        Self::from_rational(field, BigRational::zero())
    }

    pub fn one(field: &ScalarField) -> Self {
        Self::from_rational(field, BigRational::one())
    }

    pub fn from_i64(field: &ScalarField, n: i64) -> Self {
        Self::from_rational(field, BigRational::from(BigInt::from(n)))
    }

    pub fn from_ratio(field: &ScalarField, num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Self::from_rational(
            field,
            BigRational::new(BigInt::from(num), BigInt::from(den)),
        )
    }

    pub fn from_rational(field: &ScalarField, r: BigRational) -> Self {
        match &*field.0 {
            FieldRepr::Rationals => ScalarElem { field: field.clone(), repr: ElemRepr::Rat(r) },
            FieldRepr::Extension { parent, minpoly, .. } => {
                let mut coords = vec![ScalarElem::zero(parent); minpoly.len()];
                coords[0] = ScalarElem::from_rational(parent, r);
                ScalarElem { field: field.clone(), repr: ElemRepr::Ext(coords) }
            }
        }
    }

    /// Build an element of an extension from coordinates over the parent.
    pub fn from_coords(field: &ScalarField, mut coords: Vec<ScalarElem>) -> Result<Self> {
        match &*field.0 {
            FieldRepr::Rationals => Err(Error::parameter("rationals take no coordinate vector")),
            FieldRepr::Extension { parent, minpoly, .. } => {
                if coords.len() > minpoly.len() {
                    return Err(Error::parameter("coordinate vector too long"));
                }
                for c in &coords {
                    if c.field() != parent {
                        return Err(Error::parameter("coordinate over the wrong field"));
                    }
                }
                coords.resize(minpoly.len(), ScalarElem::zero(parent));
                Ok(ScalarElem { field: field.clone(), repr: ElemRepr::Ext(coords) })
            }
        }
    }

    /// Coordinates over the parent field (length = degree; a rational has
    /// itself as single coordinate).
    pub fn coords(&self) -> Vec<ScalarElem> {
        match &self.repr {
            ElemRepr::Rat(_) => vec![self.clone()],
            ElemRepr::Ext(coords) => coords.clone(),
        }
    }

    /// The element as a rational number, when it happens to live in Q.
    pub fn as_rational(&self) -> Option<BigRational> {
        match &self.repr {
            ElemRepr::Rat(r) => Some(r.clone()),
            ElemRepr::Ext(coords) => {
                for c in &coords[1..] {
                    if !c.is_zero() {
                        return None;
                    }
                }
                coords[0].as_rational()
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.repr {
            ElemRepr::Rat(r) => r.is_zero(),
            ElemRepr::Ext(coords) => coords.iter().all(|c| c.is_zero()),
        }
    }

    pub fn is_one(&self) -> bool {
        match &self.repr {
            ElemRepr::Rat(r) => r.is_one(),
            ElemRepr::Ext(coords) => {
                coords[0].is_one() && coords[1..].iter().all(|c| c.is_zero())
            }
        }
    }

    /// Lift into a field higher in the same tower.
    pub fn lift_to(&self, target: &ScalarField) -> Result<ScalarElem> {
        if &self.field == target {
            return Ok(self.clone());
        }
        if !target.extends(&self.field) {
            return Err(Error::parameter(format!(
                "cannot lift element of {} into {}",
                self.field.describe(),
                target.describe()
            )));
        }
        let parent = target.parent().expect("target extends self, so it is an extension");
        let in_parent = self.lift_to(parent)?;
        let deg = target.degree();
        let mut coords = vec![ScalarElem::zero(parent); deg];
        coords[0] = in_parent;
        Ok(ScalarElem { field: target.clone(), repr: ElemRepr::Ext(coords) })
    }

    /// Flattened coordinate vector over `base` (length = relative degree).
    /// The basis is the product basis of the tower generators, lowest level
    /// varying fastest.
    pub fn coords_over(&self, base: &ScalarField) -> Result<Vec<ScalarElem>> {
        if &self.field == base {
            return Ok(vec![self.clone()]);
        }
        if !self.field.extends(base) {
            return Err(Error::parameter("element field does not extend the requested base"));
        }
        match &self.repr {
            ElemRepr::Rat(_) => unreachable!("rationals extend only themselves"),
            ElemRepr::Ext(coords) => {
                let mut out = Vec::new();
                for c in coords {
                    out.extend(c.coords_over(base)?);
                }
                Ok(out)
            }
        }
    }

    fn binop_fields(a: &ScalarElem, b: &ScalarElem) -> (ScalarElem, ScalarElem) {
        if a.field == b.field {
            (a.clone(), b.clone())
        } else if b.field.extends(&a.field) {
            (a.lift_to(&b.field).expect("prefix lift"), b.clone())
        } else if a.field.extends(&b.field) {
            (a.clone(), b.lift_to(&a.field).expect("prefix lift"))
        } else {
            panic!(
                "scalar arithmetic across incompatible fields: {} vs {}",
                a.field.describe(),
                b.field.describe()
            );
        }
    }

    pub fn add(&self, other: &ScalarElem) -> ScalarElem {
        let (a, b) = Self::binop_fields(self, other);
        match (a.repr, b.repr) {
            (ElemRepr::Rat(x), ElemRepr::Rat(y)) => {
                ScalarElem { field: a.field, repr: ElemRepr::Rat(x + y) }
            }
            (ElemRepr::Ext(xs), ElemRepr::Ext(ys)) => {
                let coords = xs.iter().zip(ys.iter()).map(|(x, y)| x.add(y)).collect();
                ScalarElem { field: a.field, repr: ElemRepr::Ext(coords) }
            }
            _ => unreachable!("same field, same repr shape"),
        }
    }

    pub fn sub(&self, other: &ScalarElem) -> ScalarElem {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> ScalarElem {
        match &self.repr {
            ElemRepr::Rat(r) => ScalarElem { field: self.field.clone(), repr: ElemRepr::Rat(-r) },
            ElemRepr::Ext(coords) => ScalarElem {
                field: self.field.clone(),
                repr: ElemRepr::Ext(coords.iter().map(|c| c.neg()).collect()),
            },
        }
    }

    pub fn mul(&self, other: &ScalarElem) -> ScalarElem {
        let (a, b) = Self::binop_fields(self, other);
        let field = a.field.clone();
        match (&a.repr, &b.repr) {
            (ElemRepr::Rat(x), ElemRepr::Rat(y)) => {
                ScalarElem { field, repr: ElemRepr::Rat(x * y) }
            }
            (ElemRepr::Ext(xs), ElemRepr::Ext(ys)) => {
                let (parent, minpoly) = match &*field.0 {
                    FieldRepr::Extension { parent, minpoly, .. } => (parent, minpoly),
                    FieldRepr::Rationals => unreachable!(),
                };
                let prod = polyvec::mul(parent, xs, ys);
                let red = polyvec::reduce_mod(parent, prod, minpoly);
                let mut coords = red;
                coords.resize(minpoly.len(), ScalarElem::zero(parent));
                ScalarElem { field, repr: ElemRepr::Ext(coords) }
            }
            _ => unreachable!(),
        }
    }

    pub fn inv(&self) -> Result<ScalarElem> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        match &self.repr {
            ElemRepr::Rat(r) => Ok(ScalarElem {
                field: self.field.clone(),
                repr: ElemRepr::Rat(r.recip()),
            }),
            ElemRepr::Ext(coords) => {
                let (parent, minpoly) = match &*self.field.0 {
                    FieldRepr::Extension { parent, minpoly, .. } => (parent, minpoly),
                    FieldRepr::Rationals => unreachable!(),
                };
                let mut mp = minpoly.clone();
                mp.push(ScalarElem::one(parent));
                let inv = polyvec::invert_mod(parent, coords, &mp)?;
                let mut coords = inv;
                coords.resize(minpoly.len(), ScalarElem::zero(parent));
                Ok(ScalarElem { field: self.field.clone(), repr: ElemRepr::Ext(coords) })
            }
        }
    }

    pub fn div(&self, other: &ScalarElem) -> Result<ScalarElem> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, n: i64) -> Result<ScalarElem> {
        if n == 0 {
            return Ok(ScalarElem::one(&self.field));
        }
        let base = if n < 0 { self.inv()? } else { self.clone() };
        let mut result = ScalarElem::one(&self.field);
        let mut power = base;
        let mut e = n.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&power);
            }
            e >>= 1;
            if e > 0 {
                power = power.mul(&power);
            }
        }
        Ok(result)
    }

    /// Deterministic total order on flattened rational coordinates; used for
    /// canonical multiset keys, not compatible with the arithmetic.
    pub fn canonical_cmp(&self, other: &ScalarElem) -> std::cmp::Ordering {
        let (a, b) = Self::binop_fields(self, other);
        let base = ScalarField::rationals();
        let xs = a.coords_over(&base).expect("tower over Q");
        let ys = b.coords_over(&base).expect("tower over Q");
        for (x, y) in xs.iter().zip(ys.iter()) {
            let (rx, ry) = (x.as_rational().unwrap(), y.as_rational().unwrap());
            match rx.cmp(&ry) {
                std::cmp::Ordering::Equal => continue,
                ord => return ord,
            }
        }
        xs.len().cmp(&ys.len())
    }

    /// Archimedean absolute value when the element is rational.
    pub fn rational_abs(&self) -> Option<BigRational> {
        self.as_rational().map(|r| r.abs())
    }
}

/// Low-level dense polynomial helpers over coefficient vectors. These back
/// both extension-field arithmetic and the public [`poly::Poly`] type.
pub(crate) mod polyvec {
    use super::*;

    pub fn trim(mut v: Vec<ScalarElem>) -> Vec<ScalarElem> {
        while v.last().map(|c| c.is_zero()).unwrap_or(false) {
            v.pop();
        }
        v
    }

    pub fn mul(field: &ScalarField, a: &[ScalarElem], b: &[ScalarElem]) -> Vec<ScalarElem> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![ScalarElem::zero(field); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                out[i + j] = out[i + j].add(&x.mul(y));
            }
        }
        trim(out)
    }

    /// Remainder of `a` modulo the monic polynomial `m` (coefficient vectors
    /// low to high, `m` includes its leading 1).
    pub fn reduce_mod(field: &ScalarField, a: Vec<ScalarElem>, m_nonlead: &[ScalarElem]) -> Vec<ScalarElem> {
        let d = m_nonlead.len();
        let mut a = a;
        while a.len() > d {
            let lead = a.pop().unwrap();
            if lead.is_zero() {
                continue;
            }
            let shift = a.len() - d;
            for (i, c) in m_nonlead.iter().enumerate() {
                let t = lead.mul(c);
                a[shift + i] = a[shift + i].sub(&t);
            }
        }
        let _ = field;
        trim(a)
    }

    /// Euclidean division a = q*b + r over a field; b nonzero.
    pub fn divmod(
        field: &ScalarField,
        a: &[ScalarElem],
        b: &[ScalarElem],
    ) -> (Vec<ScalarElem>, Vec<ScalarElem>) {
        let b = trim(b.to_vec());
        assert!(!b.is_empty(), "division by zero polynomial");
        let mut r = trim(a.to_vec());
        if r.len() < b.len() {
            return (Vec::new(), r);
        }
        let lead_inv = b.last().unwrap().inv().expect("nonzero leading coefficient");
        let mut q = vec![ScalarElem::zero(field); r.len() - b.len() + 1];
        while r.len() >= b.len() && !r.is_empty() {
            let c = r.last().unwrap().mul(&lead_inv);
            let shift = r.len() - b.len();
            q[shift] = c.clone();
            for (i, bc) in b.iter().enumerate() {
                let t = c.mul(bc);
                r[shift + i] = r[shift + i].sub(&t);
            }
            r = trim(r);
        }
        (trim(q), r)
    }

    /// Inverse of `a` modulo monic `m` via the extended Euclidean algorithm.
    pub fn invert_mod(
        field: &ScalarField,
        a: &[ScalarElem],
        m: &[ScalarElem],
    ) -> Result<Vec<ScalarElem>> {
        // r0 = m, r1 = a; track s only (coefficients of a).
        let mut r0 = trim(m.to_vec());
        let mut r1 = trim(a.to_vec());
        let mut s0: Vec<ScalarElem> = Vec::new();
        let mut s1: Vec<ScalarElem> = vec![ScalarElem::one(field)];
        while !r1.is_empty() {
            let (q, r) = divmod(field, &r0, &r1);
            let qs1 = mul(field, &q, &s1);
            let mut s2 = vec![ScalarElem::zero(field); s0.len().max(qs1.len())];
            for (i, c) in s0.iter().enumerate() {
                s2[i] = s2[i].add(c);
            }
            for (i, c) in qs1.iter().enumerate() {
                s2[i] = s2[i].sub(c);
            }
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = trim(s2);
        }
        if r0.len() != 1 {
            return Err(Error::parameter(
                "element not invertible: gcd with minimal polynomial is not constant",
            ));
        }
        let g_inv = r0[0].inv()?;
        Ok(trim(s0.iter().map(|c| c.mul(&g_inv)).collect()))
    }
}

/// Ambient data for all q-difference computations: the scalar field, the
/// multiplier q (not a root of unity) and the search bound for q-power and
/// torsion tests over proper extensions.
#[derive(Clone, Debug, PartialEq)]
pub struct QContext {
    field: ScalarField,
    q: ScalarElem,
    torsion_bound: i64,
    default_precision: i64,
}

impl QContext {
    pub const DEFAULT_TORSION_BOUND: i64 = 64;
    pub const DEFAULT_PRECISION: i64 = 32;

    pub fn new(field: ScalarField, q: ScalarElem) -> Result<Self> {
        Self::with_options(field, q, Self::DEFAULT_TORSION_BOUND, Self::DEFAULT_PRECISION)
    }

    pub fn with_options(
        field: ScalarField,
        q: ScalarElem,
        torsion_bound: i64,
        default_precision: i64,
    ) -> Result<Self> {
        if q.field() != &field {
            return Err(Error::parameter("q must be an element of the context field"));
        }
        if q.is_zero() {
            return Err(Error::parameter("q must be nonzero"));
        }
        if torsion_bound < 1 {
            return Err(Error::parameter("torsion bound must be positive"));
        }
        if default_precision < 1 {
            return Err(Error::parameter("default precision must be positive"));
        }
        if let Some(r) = q.as_rational() {
            if r.abs().is_one() {
                return Err(Error::parameter("q must not be a root of unity"));
            }
        } else {
            // Roots of unity in a field of absolute degree d have order n with
            // phi(n) <= d; checking q^n for all such n is exact and terminating.
            let d = field.absolute_degree() as i64;
            let mut power = q.clone();
            for n in 1..=root_of_unity_order_bound(d) {
                if n > 1 {
                    power = power.mul(&q);
                }
                if euler_phi(n) <= d && power.is_one() {
                    return Err(Error::parameter("q must not be a root of unity"));
                }
            }
        }
        Ok(QContext { field, q, torsion_bound, default_precision })
    }

    pub fn field(&self) -> &ScalarField {
        &self.field
    }

    pub fn q(&self) -> &ScalarElem {
        &self.q
    }

    pub fn torsion_bound(&self) -> i64 {
        self.torsion_bound
    }

    pub fn default_precision(&self) -> i64 {
        self.default_precision
    }

    /// q as a power of the context q; kept for symmetry with ramified
    /// contexts where q itself is a root.
    pub fn q_pow(&self, m: i64) -> ScalarElem {
        self.q.pow(m).expect("q is nonzero")
    }

    /// Exact test for lambda = q^m. For rational q the answer is exact and
    /// unconditional; over proper extensions the search is bounded by the
    /// torsion bound.
    pub fn q_power_exponent(&self, lambda: &ScalarElem) -> Option<i64> {
        if lambda.is_zero() {
            return None;
        }
        let lam = lambda.lift_to(&self.field).ok()?;
        if let (Some(l), Some(qr)) = (lam.as_rational(), self.q.as_rational()) {
            return rational_q_power(&l, &qr);
        }
        if lam.is_one() {
            return Some(0);
        }
        let mut up = self.q.clone();
        let q_inv = self.q.inv().expect("q nonzero");
        let mut down = q_inv.clone();
        for m in 1..=self.torsion_bound {
            if up == lam {
                return Some(m);
            }
            if down == lam {
                return Some(-m);
            }
            if m < self.torsion_bound {
                up = up.mul(&self.q);
                down = down.mul(&q_inv);
            }
        }
        None
    }

    /// True when lambda and mu lie in the same coset of q^Z.
    pub fn same_q_class(&self, lambda: &ScalarElem, mu: &ScalarElem) -> bool {
        if lambda.is_zero() || mu.is_zero() {
            return lambda.is_zero() && mu.is_zero();
        }
        let ratio = lambda.div(mu).expect("mu nonzero");
        self.q_power_exponent(&ratio).is_some()
    }

    /// The 2-torsion class of lambda in k^x/q^Z, when lambda^2 lies in q^Z.
    pub fn two_torsion_class(&self, lambda: &ScalarElem) -> Option<TwoTorsion> {
        if lambda.is_zero() {
            return None;
        }
        let lam = lambda.lift_to(&self.field).ok()?;
        let e = self.q_power_exponent(&lam.mul(&lam))?;
        if e.rem_euclid(2) == 0 {
            let unit = lam.mul(&self.q_pow(-e / 2));
            if unit.is_one() {
                Some(TwoTorsion::One)
            } else {
                debug_assert!(unit.neg().is_one());
                Some(TwoTorsion::MinusOne)
            }
        } else {
            // lambda * q^{-(e-1)/2} squares to q.
            let s = lam.mul(&self.q_pow(-(e - 1) / 2));
            match self.canonical_sqrt_q() {
                Some(root) if s == root.neg() => Some(TwoTorsion::MinusSqrtQ),
                // With no square root of q in the field the two classes
                // cannot be told apart; report the merged tag.
                _ => Some(TwoTorsion::SqrtQ),
            }
        }
    }

    /// A canonical square root of q inside the field, when one exists:
    /// the positive rational root, else the first root found in the tower.
    pub fn canonical_sqrt_q(&self) -> Option<ScalarElem> {
        if let Some(qr) = self.q.as_rational() {
            if let Some(r) = rational_sqrt(&qr) {
                return Some(ScalarElem::from_rational(&self.field, r));
            }
        }
        if self.field.is_rationals() {
            return None;
        }
        let x2_minus_q = Poly::new(
            self.field.clone(),
            vec![
                self.q.neg(),
                ScalarElem::zero(&self.field),
                ScalarElem::one(&self.field),
            ],
        );
        let mut roots = factor::roots_in(&x2_minus_q).ok()?;
        roots.sort_by(|a, b| a.canonical_cmp(b));
        roots.pop()
    }

    /// Canonical coset representative for display: for rational q the unique
    /// lambda q^{-m} with absolute value in [1, |q|); for tower elements the
    /// representative is returned unchanged (exact coset tests are used for
    /// all logic).
    pub fn coset_representative(&self, lambda: &ScalarElem) -> ScalarElem {
        let Some(l) = lambda.as_rational() else {
            return lambda.clone();
        };
        let Some(qr) = self.q.as_rational() else {
            return lambda.clone();
        };
        if l.is_zero() {
            return lambda.clone();
        }
        let (qa, flip) = if qr.abs() > BigRational::one() {
            (qr.clone(), false)
        } else {
            (qr.recip(), true)
        };
        let qabs = qa.abs();
        let mut x = l;
        let mut m: i64 = 0;
        while x.abs() >= qabs {
            x /= qa.clone();
            m += 1;
        }
        while x.abs() < BigRational::one() {
            x *= qa.clone();
            m -= 1;
        }
        let _ = if flip { -m } else { m };
        ScalarElem::from_rational(lambda.field(), x)
    }
}

/// Exact q-power test for rationals: decide lambda = q^m by repeated exact
/// division, using |q| != 1.
fn rational_q_power(lambda: &BigRational, q: &BigRational) -> Option<i64> {
    if lambda.is_zero() || q.is_zero() {
        return None;
    }
    let (qn, invert) = if q.abs() > BigRational::one() {
        (q.clone(), false)
    } else {
        (q.recip(), true)
    };
    let qabs = qn.abs();
    let one = BigRational::one();
    let mut x = lambda.clone();
    let mut m: i64 = 0;
    while x.abs() >= qabs {
        x /= qn.clone();
        m += 1;
    }
    while x.abs() < one {
        x *= qn.clone();
        m -= 1;
    }
    if x.is_one() {
        Some(if invert { -m } else { m })
    } else {
        None
    }
}

/// Exact rational square root, when the argument is a perfect square.
pub(crate) fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let num = r.numer();
    let den = r.denom();
    let sn = num.sqrt();
    let sd = den.sqrt();
    if &(&sn * &sn) == num && &(&sd * &sd) == den {
        Some(BigRational::new(sn, sd))
    } else {
        None
    }
}

fn euler_phi(n: i64) -> i64 {
    let mut n = n;
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

/// Largest order a root of unity can have in a field of absolute degree d.
fn root_of_unity_order_bound(d: i64) -> i64 {
    let mut bound = 1;
    let mut n = 1;
    // phi(n) >= sqrt(n/2), so phi(n) <= d forces n <= 2d^2 + 1.
    while n <= 2 * d * d + 1 {
        if euler_phi(n) <= d {
            bound = n;
        }
        n += 1;
    }
    bound
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q2_ctx() -> QContext {
        let f = ScalarField::rationals();
        let q = ScalarElem::from_i64(&f, 2);
        QContext::new(f, q).unwrap()
    }

    #[test]
    fn rational_arithmetic() {
        let f = ScalarField::rationals();
        let a = ScalarElem::from_ratio(&f, 3, 4);
        let b = ScalarElem::from_ratio(&f, -1, 2);
        assert_eq!(a.add(&b), ScalarElem::from_ratio(&f, 1, 4));
        assert_eq!(a.mul(&b), ScalarElem::from_ratio(&f, -3, 8));
        assert_eq!(a.inv().unwrap(), ScalarElem::from_ratio(&f, 4, 3));
    }

    #[test]
    fn quadratic_extension() {
        let q = ScalarField::rationals();
        let minpoly = Poly::from_i64(&q, &[-2, 0, 1]); // x^2 - 2
        let f = q.extend(&minpoly, "a").unwrap();
        assert_eq!(f.degree(), 2);
        let a = f.generator().unwrap();
        let a2 = a.mul(&a);
        assert_eq!(a2, ScalarElem::from_i64(&f, 2));
        // (1 + a)^-1 = a - 1 since (1+a)(a-1) = a^2 - 1 = 1.
        let one_plus_a = ScalarElem::one(&f).add(&a);
        let inv = one_plus_a.inv().unwrap();
        assert_eq!(inv, a.sub(&ScalarElem::one(&f)));
    }

    #[test]
    fn reducible_minpoly_rejected() {
        let q = ScalarField::rationals();
        let minpoly = Poly::from_i64(&q, &[-4, 0, 1]); // x^2 - 4 = (x-2)(x+2)
        let err = q.extend(&minpoly, "a").unwrap_err();
        match err {
            Error::Reducible { factor, .. } => assert!(factor.contains("x")),
            other => panic!("expected Reducible, got {other:?}"),
        }
    }

    #[test]
    fn tower_of_degree_four() {
        // extend(Q(sqrt2), x^2 - sqrt2): total degree 4; the generator b has
        // b^4 = 2, verified by brute-force power computation.
        let q = ScalarField::rationals();
        let f1 = q.extend(&Poly::from_i64(&q, &[-2, 0, 1]), "a").unwrap();
        let a = f1.generator().unwrap();
        let mp = Poly::new(
            f1.clone(),
            vec![a.neg(), ScalarElem::zero(&f1), ScalarElem::one(&f1)],
        );
        let f2 = f1.extend(&mp, "b").unwrap();
        assert_eq!(f2.absolute_degree(), 4);
        let b = f2.generator().unwrap();
        let b4 = b.pow(4).unwrap();
        assert_eq!(b4, ScalarElem::from_i64(&f2, 2));
        // The absolute minimal polynomial of b is x^4 - 2.
        let base = ScalarField::rationals();
        let mp_abs = factor::minimal_polynomial_over(&b, &base).unwrap();
        assert_eq!(mp_abs, Poly::from_i64(&base, &[-2, 0, 0, 0, 1]));
    }

    #[test]
    fn q_power_exponent_rational() {
        let ctx = q2_ctx();
        let f = ctx.field().clone();
        assert_eq!(ctx.q_power_exponent(&ScalarElem::from_i64(&f, 8)), Some(3));
        assert_eq!(ctx.q_power_exponent(&ScalarElem::from_i64(&f, 3)), None);
        assert_eq!(ctx.q_power_exponent(&ScalarElem::from_ratio(&f, 1, 4)), Some(-2));
        assert_eq!(ctx.q_power_exponent(&ScalarElem::from_i64(&f, -8)), None);
        assert_eq!(ctx.q_power_exponent(&ScalarElem::one(&f)), Some(0));
    }

    #[test]
    fn q_power_exponent_fractional_q() {
        let f = ScalarField::rationals();
        let q = ScalarElem::from_ratio(&f, 1, 2);
        let ctx = QContext::new(f.clone(), q).unwrap();
        assert_eq!(ctx.q_power_exponent(&ScalarElem::from_i64(&f, 8)), Some(-3));
        assert_eq!(ctx.q_power_exponent(&ScalarElem::from_ratio(&f, 1, 8)), Some(3));
    }

    #[test]
    fn two_torsion_tags() {
        let ctx = q2_ctx();
        let f = ctx.field().clone();
        assert_eq!(
            ctx.two_torsion_class(&ScalarElem::from_i64(&f, -1)),
            Some(TwoTorsion::MinusOne)
        );
        assert_eq!(ctx.two_torsion_class(&ScalarElem::from_i64(&f, 3)), None);
        assert_eq!(ctx.two_torsion_class(&ScalarElem::from_i64(&f, 4)), Some(TwoTorsion::One));

        // q = 4: lambda = 2 squares to q, and 2 is the canonical sqrt(4).
        let q4 = QContext::new(f.clone(), ScalarElem::from_i64(&f, 4)).unwrap();
        assert_eq!(q4.two_torsion_class(&ScalarElem::from_i64(&f, 2)), Some(TwoTorsion::SqrtQ));
        assert_eq!(
            q4.two_torsion_class(&ScalarElem::from_i64(&f, -2)),
            Some(TwoTorsion::MinusSqrtQ)
        );
    }

    #[test]
    fn torsion_iff_square_power() {
        let ctx = q2_ctx();
        let f = ctx.field().clone();
        for n in [-9i64, -2, -1, 1, 2, 3, 4, 5, 8, 16] {
            let lam = ScalarElem::from_i64(&f, n);
            let sq = lam.mul(&lam);
            assert_eq!(
                ctx.two_torsion_class(&lam).is_some(),
                ctx.q_power_exponent(&sq).is_some(),
                "mismatch at {n}"
            );
        }
    }

    #[test]
    fn root_of_unity_rejected() {
        let f = ScalarField::rationals();
        assert!(QContext::new(f.clone(), ScalarElem::from_i64(&f, -1)).is_err());
        assert!(QContext::new(f.clone(), ScalarElem::from_i64(&f, 1)).is_err());
        assert!(QContext::new(f.clone(), ScalarElem::zero(&f)).is_err());
        // i is a 4th root of unity in Q(i).
        let qi = f.extend(&Poly::from_i64(&f, &[1, 0, 1]), "i").unwrap();
        let i = qi.generator().unwrap();
        assert!(QContext::new(qi.clone(), i).is_err());
        // sqrt2 is not a root of unity.
        let q2 = f.extend(&Poly::from_i64(&f, &[-2, 0, 1]), "s").unwrap();
        let s = q2.generator().unwrap();
        assert!(QContext::new(q2, s).is_ok());
    }

    #[test]
    fn field_axioms_random() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let q = ScalarField::rationals();
        let f = q.extend(&Poly::from_i64(&q, &[-2, 0, 1]), "a").unwrap();
        let gen = f.generator().unwrap();
        let random_elem = |rng: &mut rand_chacha::ChaCha8Rng| {
            let c0 = ScalarElem::from_i64(&f, rng.gen_range(-5..6));
            let c1 = ScalarElem::from_i64(&f, rng.gen_range(-5..6));
            c0.add(&c1.mul(&gen))
        };
        for _ in 0..50 {
            let a = random_elem(&mut rng);
            let b = random_elem(&mut rng);
            let c = random_elem(&mut rng);
            assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
            assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            if !a.is_zero() {
                assert!(a.mul(&a.inv().unwrap()).is_one());
            }
        }
    }

    #[test]
    fn coset_representative_window() {
        let ctx = q2_ctx();
        let f = ctx.field().clone();
        let lam = ScalarElem::from_i64(&f, 24); // 24 = 2^3 * 3
        let rep = ctx.coset_representative(&lam);
        assert_eq!(rep, ScalarElem::from_ratio(&f, 3, 2));
        assert!(ctx.same_q_class(&lam, &rep));
    }
}
