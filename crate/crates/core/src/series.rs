//! Truncated formal Laurent series over the scalar field, the automorphism
//! sigma_q, ramified series in a root of t, and the sigma_q-coboundary
//! solver.
//!
//! Precision is absolute: a series is either an exact polynomial (all higher
//! coefficients zero) or known modulo t^N. Arithmetic never reports
//! coefficients beyond proven precision; the product of series known mod
//! t^{N1}, t^{N2} with valuations v1, v2 is known mod t^{min(N1+v2, N2+v1)},
//! and inverting a series of valuation v known mod t^N yields a result known
//! mod t^{N-2v}.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalars::{QContext, ScalarElem, ScalarField};

/// Absolute precision of a series: exact polynomial or known modulo t^N.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Prec {
    Exact,
    Mod(i64),
}

impl Prec {
    pub fn min(self, other: Prec) -> Prec {
        match (self, other) {
            (Prec::Exact, p) | (p, Prec::Exact) => p,
            (Prec::Mod(a), Prec::Mod(b)) => Prec::Mod(a.min(b)),
        }
    }

    pub fn shift(self, k: i64) -> Prec {
        match self {
            Prec::Exact => Prec::Exact,
            Prec::Mod(n) => Prec::Mod(n + k),
        }
    }

    pub fn bound(self) -> Option<i64> {
        match self {
            Prec::Exact => None,
            Prec::Mod(n) => Some(n),
        }
    }

    /// True when coefficients at exponent `e` are known.
    pub fn knows(self, e: i64) -> bool {
        match self {
            Prec::Exact => true,
            Prec::Mod(n) => e < n,
        }
    }
}

/// A truncated formal Laurent series in t over a [`ScalarField`].
#[derive(Clone)]
pub struct LaurentSeries {
    field: ScalarField,
    /// Exponent of coeffs[0]; meaningful only when coeffs is nonempty.
    val: i64,
    /// Dense coefficients for exponents val .. val+len; leading coefficient
    /// nonzero, trailing zeros trimmed.
    coeffs: Vec<ScalarElem>,
    prec: Prec,
}

impl fmt::Debug for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms: Vec<String> = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = self.val + i as i64;
            let cs = c.to_string();
            let coeff = if cs.contains(['+', ' ']) || cs[1..].contains('-') {
                format!("({cs})")
            } else {
                cs
            };
            let term = match e {
                0 => coeff,
                1 if coeff == "1" => "t".to_string(),
                1 => format!("{coeff}*t"),
                _ if coeff == "1" => format!("t^{e}"),
                _ => format!("{coeff}*t^{e}"),
            };
            terms.push(term);
        }
        if terms.is_empty() {
            terms.push("0".to_string());
        }
        write!(f, "{}", terms.join(" + "))?;
        if let Prec::Mod(n) = self.prec {
            write!(f, " (mod t^{n})")?;
        }
        Ok(())
    }
}

impl LaurentSeries {
    pub fn zero(field: &ScalarField) -> Self {
        LaurentSeries { field: field.clone(), val: 0, coeffs: Vec::new(), prec: Prec::Exact }
    }

    /// The zero series known only modulo t^N.
    pub fn zero_mod(field: &ScalarField, n: i64) -> Self {
        LaurentSeries { field: field.clone(), val: 0, coeffs: Vec::new(), prec: Prec::Mod(n) }
    }

    pub fn one(field: &ScalarField) -> Self {
        Self::monomial(ScalarElem::one(field), 0)
    }

    pub fn constant(c: ScalarElem) -> Self {
        Self::monomial(c, 0)
    }

    pub fn monomial(c: ScalarElem, exponent: i64) -> Self {
        let field = c.field().clone();
        if c.is_zero() {
            return Self::zero(&field);
        }
        LaurentSeries { field, val: exponent, coeffs: vec![c], prec: Prec::Exact }
    }

    /// Build from (exponent, coefficient) pairs, exact unless a precision is
    /// given; terms at or beyond the precision are dropped.
    pub fn from_terms(
        field: &ScalarField,
        terms: &[(i64, ScalarElem)],
        prec: Prec,
    ) -> Self {
        if terms.is_empty() {
            let mut z = Self::zero(field);
            z.prec = prec;
            return z;
        }
        let lo = terms.iter().map(|(e, _)| *e).min().unwrap();
        let hi = terms.iter().map(|(e, _)| *e).max().unwrap();
        let mut coeffs = vec![ScalarElem::zero(field); (hi - lo + 1) as usize];
        for (e, c) in terms {
            coeffs[(e - lo) as usize] = coeffs[(e - lo) as usize].add(c);
        }
        Self::normalized(field.clone(), lo, coeffs, prec)
    }

    fn normalized(field: ScalarField, mut val: i64, mut coeffs: Vec<ScalarElem>, prec: Prec) -> Self {
        if let Prec::Mod(n) = prec {
            // drop unknown coefficients
            while val + coeffs.len() as i64 > n {
                coeffs.pop();
            }
        }
        while coeffs.first().map(|c| c.is_zero()).unwrap_or(false) {
            coeffs.remove(0);
            val += 1;
        }
        while coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            val = 0;
        }
        LaurentSeries { field, val, coeffs, prec }
    }

    pub fn field(&self) -> &ScalarField {
        &self.field
    }

    pub fn prec(&self) -> Prec {
        self.prec
    }

    /// True when no nonzero coefficient is known. For a truncated series
    /// this does not certify the series is zero.
    pub fn is_zero_known(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// True only for the exact zero series.
    pub fn is_exactly_zero(&self) -> bool {
        self.coeffs.is_empty() && self.prec == Prec::Exact
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.val == 0 && self.coeffs[0].is_one()
    }

    /// The t-adic valuation; None when the series has no known nonzero
    /// coefficient (exact zero or indistinguishable from zero).
    pub fn valuation(&self) -> Option<i64> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.val)
        }
    }

    pub fn leading_coeff(&self) -> Option<ScalarElem> {
        self.coeffs.first().cloned()
    }

    pub fn coeff(&self, e: i64) -> ScalarElem {
        if e < self.val || e >= self.val + self.coeffs.len() as i64 {
            ScalarElem::zero(&self.field)
        } else {
            self.coeffs[(e - self.val) as usize].clone()
        }
    }

    /// Coefficient together with whether it is actually known at this
    /// precision.
    pub fn coeff_checked(&self, e: i64) -> Result<ScalarElem> {
        if self.prec.knows(e) {
            Ok(self.coeff(e))
        } else {
            Err(Error::precision(
                "coefficient access",
                format!("coefficient of t^{e} beyond precision"),
            ))
        }
    }

    /// Iterate over known nonzero terms (exponent, coefficient).
    pub fn terms(&self) -> impl Iterator<Item = (i64, &ScalarElem)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (self.val + i as i64, c))
    }

    pub fn add(&self, other: &LaurentSeries) -> LaurentSeries {
        let prec = self.prec.min(other.prec);
        if self.coeffs.is_empty() {
            return Self::normalized(other.field.clone(), other.val, other.coeffs.clone(), prec);
        }
        if other.coeffs.is_empty() {
            return Self::normalized(self.field.clone(), self.val, self.coeffs.clone(), prec);
        }
        let lo = self.val.min(other.val);
        let hi = (self.val + self.coeffs.len() as i64).max(other.val + other.coeffs.len() as i64);
        let mut coeffs = vec![ScalarElem::zero(&self.field); (hi - lo) as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[(self.val - lo) as usize + i] = c.clone();
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            let idx = (other.val - lo) as usize + i;
            coeffs[idx] = coeffs[idx].add(c);
        }
        Self::normalized(self.field.clone(), lo, coeffs, prec)
    }

    pub fn sub(&self, other: &LaurentSeries) -> LaurentSeries {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> LaurentSeries {
        LaurentSeries {
            field: self.field.clone(),
            val: self.val,
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
            prec: self.prec,
        }
    }

    pub fn mul(&self, other: &LaurentSeries) -> LaurentSeries {
        // Output precision: min over precision of one factor shifted by the
        // valuation of the other. An (unknown-)zero factor contributes its
        // precision directly.
        let prec = match (self.prec, other.prec) {
            (Prec::Exact, Prec::Exact) => Prec::Exact,
            _ => {
                let p1 = match (self.prec, other.valuation()) {
                    (Prec::Mod(n), Some(v)) => Prec::Mod(n + v),
                    (Prec::Mod(n), None) => match other.prec {
                        // zero * known-mod: product known at least mod n + other bound
                        Prec::Mod(m) => Prec::Mod(n + m),
                        Prec::Exact => Prec::Exact, // other is exact zero
                    },
                    (Prec::Exact, _) => Prec::Exact,
                };
                let p2 = match (other.prec, self.valuation()) {
                    (Prec::Mod(n), Some(v)) => Prec::Mod(n + v),
                    (Prec::Mod(n), None) => match self.prec {
                        Prec::Mod(m) => Prec::Mod(n + m),
                        Prec::Exact => Prec::Exact,
                    },
                    (Prec::Exact, _) => Prec::Exact,
                };
                p1.min(p2)
            }
        };
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            let mut z = Self::zero(&self.field);
            z.prec = prec;
            return z;
        }
        let mut coeffs =
            vec![ScalarElem::zero(&self.field); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
            }
        }
        Self::normalized(self.field.clone(), self.val + other.val, coeffs, prec)
    }

    pub fn scale(&self, c: &ScalarElem) -> LaurentSeries {
        if c.is_zero() {
            let mut z = Self::zero(&self.field);
            z.prec = self.prec;
            return z;
        }
        LaurentSeries {
            field: self.field.clone(),
            val: self.val,
            coeffs: self.coeffs.iter().map(|x| x.mul(c)).collect(),
            prec: self.prec,
        }
    }

    /// Multiply by t^k.
    pub fn shift(&self, k: i64) -> LaurentSeries {
        LaurentSeries {
            field: self.field.clone(),
            val: self.val + k,
            coeffs: self.coeffs.clone(),
            prec: self.prec.shift(k),
        }
    }

    /// Inverse. For exact polynomial input the expansion is truncated at
    /// `target` absolute precision (required unless the input is a
    /// monomial); truncated input carries its own bound.
    pub fn invert(&self, target: Option<i64>) -> Result<LaurentSeries> {
        let v = self.valuation().ok_or(match self.prec {
            Prec::Exact => Error::DivisionByZero,
            Prec::Mod(n) => Error::ZeroAtPrecision { precision: n },
        })?;
        let lead_inv = self.coeffs[0].inv()?;
        if self.coeffs.len() == 1 {
            let mut out = Self::monomial(lead_inv, -v);
            if let Prec::Mod(n) = self.prec {
                // knowledge of a mod t^n with val v bounds the inverse mod t^{n-2v}
                out.prec = Prec::Mod(n - 2 * v);
                out = Self::normalized(out.field.clone(), out.val, out.coeffs.clone(), out.prec);
            }
            return Ok(out);
        }
        let out_prec = match self.prec {
            Prec::Mod(n) => n - 2 * v,
            Prec::Exact => match target {
                Some(n) => n,
                None => {
                    return Err(Error::parameter(
                        "inverting a non-monomial exact series requires a target precision",
                    ))
                }
            },
        };
        // Write self = c t^v (1 + u) and invert 1 + u by the geometric
        // recursion up to t^{out_prec + v}.
        let terms_needed = (out_prec + v) as i64; // exponents of (1+u)^{-1} go 0..terms_needed-? relative
        let rel_len = (terms_needed).max(0);
        // relative coefficients of self / (c t^v): r[0] = 1
        let mut r = vec![ScalarElem::zero(&self.field); self.coeffs.len()];
        for (i, c) in self.coeffs.iter().enumerate() {
            r[i] = c.mul(&lead_inv);
        }
        let mut inv_rel = vec![ScalarElem::zero(&self.field); rel_len.max(1) as usize];
        if inv_rel.is_empty() {
            inv_rel.push(ScalarElem::one(&self.field));
        }
        inv_rel[0] = ScalarElem::one(&self.field);
        for k in 1..inv_rel.len() {
            // sum_{j=1..k} r[j] * inv_rel[k-j] = 0
            let mut acc = ScalarElem::zero(&self.field);
            for j in 1..=k.min(r.len() - 1) {
                acc = acc.add(&r[j].mul(&inv_rel[k - j]));
            }
            inv_rel[k] = acc.neg();
        }
        let coeffs: Vec<ScalarElem> = inv_rel.into_iter().map(|c| c.mul(&lead_inv)).collect();
        Ok(Self::normalized(self.field.clone(), -v, coeffs, Prec::Mod(out_prec)))
    }

    /// Truncate to absolute precision n (no-op if already weaker).
    pub fn truncate(&self, n: i64) -> LaurentSeries {
        let prec = self.prec.min(Prec::Mod(n));
        Self::normalized(self.field.clone(), self.val, self.coeffs.clone(), prec)
    }

    /// The automorphism t -> qt: coefficient at t^i is multiplied by q^i.
    pub fn sigma_q(&self, ctx: &QContext) -> LaurentSeries {
        self.sigma_q_power(ctx, 1)
    }

    /// sigma_q iterated m times (m may be negative).
    pub fn sigma_q_power(&self, ctx: &QContext, m: i64) -> LaurentSeries {
        if m == 0 || self.coeffs.is_empty() {
            return self.clone();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c.mul(&ctx.q_pow(m * (self.val + i as i64))))
            .collect();
        LaurentSeries { field: self.field.clone(), val: self.val, coeffs, prec: self.prec }
    }

    /// Exact equality of all jointly-known coefficients; the certified
    /// precision is the min of the two bounds.
    pub fn agrees_with(&self, other: &LaurentSeries) -> bool {
        let bound = self.prec.min(other.prec);
        let lo = match (self.valuation(), other.valuation()) {
            (None, None) => return true,
            (Some(a), None) | (None, Some(a)) => a,
            (Some(a), Some(b)) => a.min(b),
        };
        let hi = match bound {
            Prec::Exact => {
                (self.val + self.coeffs.len() as i64).max(other.val + other.coeffs.len() as i64)
            }
            Prec::Mod(n) => n,
        };
        for e in lo..hi {
            if self.coeff(e) != other.coeff(e) {
                return false;
            }
        }
        true
    }

    /// Lift coefficients into an extension field.
    pub fn lift_to(&self, target: &ScalarField) -> Result<LaurentSeries> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.lift_to(target))
            .collect::<Result<Vec<_>>>()?;
        Ok(LaurentSeries { field: target.clone(), val: self.val, coeffs, prec: self.prec })
    }

    /// Reinterpret in the ramified variable u with u^s = t: exponents are
    /// multiplied by s.
    pub fn ramify_exponents(&self, s: i64) -> LaurentSeries {
        assert!(s >= 1);
        if s == 1 {
            return self.clone();
        }
        if self.coeffs.is_empty() {
            let prec = match self.prec {
                Prec::Exact => Prec::Exact,
                Prec::Mod(n) => Prec::Mod(n * s),
            };
            let mut z = Self::zero(&self.field);
            z.prec = prec;
            return z;
        }
        let mut coeffs = vec![ScalarElem::zero(&self.field); (self.coeffs.len() - 1) * s as usize + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * s as usize] = c.clone();
        }
        let prec = match self.prec {
            Prec::Exact => Prec::Exact,
            Prec::Mod(n) => Prec::Mod(n * s),
        };
        Self::normalized(self.field.clone(), self.val * s, coeffs, prec)
    }

    /// Constant term and the certainty that the series IS that constant
    /// (exact and no other terms).
    pub fn as_constant(&self) -> Option<ScalarElem> {
        if self.coeffs.is_empty() {
            return Some(ScalarElem::zero(&self.field));
        }
        if self.val == 0 && self.coeffs.len() == 1 {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }
}

/// A series in the ramified variable u = t^{1/s}. The body is an ordinary
/// Laurent series in u; sigma_q acts through a chosen s-th root of q.
#[derive(Clone, Debug)]
pub struct RamifiedSeries {
    pub ramification: i64,
    pub body: LaurentSeries,
}

impl RamifiedSeries {
    /// Scalar extension: view a series in t inside k((t^{1/s})).
    pub fn ramify(a: &LaurentSeries, s: i64, q_root: &ScalarElem, ctx: &QContext) -> Result<Self> {
        if s < 1 {
            return Err(Error::parameter("ramification index must be >= 1"));
        }
        let powed = q_root.pow(s)?;
        let q_lift = ctx.q().lift_to(q_root.field()).map_err(|_| {
            Error::parameter("q root lives under the context field")
        })?;
        if powed != q_lift {
            return Err(Error::parameter(format!(
                "inconsistent root: candidate^({s}) != q"
            )));
        }
        let body = a.lift_to(q_root.field())?.ramify_exponents(s);
        Ok(RamifiedSeries { ramification: s, body })
    }

    /// Restriction back to k((t)) of a series whose support lies in exponent
    /// class 0 mod s; errors otherwise.
    pub fn restrict(&self) -> Result<LaurentSeries> {
        let s = self.ramification;
        if s == 1 {
            return Ok(self.body.clone());
        }
        let mut terms = Vec::new();
        for (e, c) in self.body.terms() {
            if e.rem_euclid(s) != 0 {
                return Err(Error::parameter(
                    "series has ramified support; restriction needs the block structure",
                ));
            }
            terms.push((e.div_euclid(s), c.clone()));
        }
        let prec = match self.body.prec() {
            Prec::Exact => Prec::Exact,
            Prec::Mod(n) => Prec::Mod(n.div_euclid(s)),
        };
        Ok(LaurentSeries::from_terms(self.body.field(), &terms, prec))
    }

    /// The s x s matrix over k((t)) of multiplication by this series on the
    /// basis 1, u, ..., u^{s-1} of k((u)) over k((t)). This is the
    /// restriction-of-scalars block structure.
    pub fn restriction_matrix(&self) -> Vec<Vec<LaurentSeries>> {
        let s = self.ramification;
        let field = self.body.field();
        let mut rows =
            vec![vec![LaurentSeries::zero(field); s as usize]; s as usize];
        // entry (i, j): coefficient of u^i in (series * u^j), gathered by
        // exponent class mod s, exponent divided by s.
        for j in 0..s {
            let shifted = self.body.shift(j);
            for (e, c) in shifted.terms() {
                let i = e.rem_euclid(s);
                let te = e.div_euclid(s);
                let add = LaurentSeries::monomial(c.clone(), te);
                rows[i as usize][j as usize] = rows[i as usize][j as usize].add(&add);
            }
            // propagate truncation info
            if let Prec::Mod(n) = shifted.prec() {
                for i in 0..s {
                    let cell = &mut rows[i as usize][j as usize];
                    *cell = cell.truncate((n - i).div_euclid(s) + 1);
                }
            }
        }
        rows
    }
}

/// Solve u = v (sigma_q v)^{-1} for v in 1 + t k[[t]], given a unit
/// u = 1 + a1 t + ... known mod t^N. Coefficientwise this is
/// v_i (1 - q^i) = (convolution of lower terms), well defined because q is
/// not a root of unity.
pub fn coboundary_solve(u: &LaurentSeries, ctx: &QContext) -> Result<LaurentSeries> {
    let n = match u.prec() {
        Prec::Mod(n) => n,
        Prec::Exact => {
            let highest = u.valuation().map(|v| v + u.coeffs.len() as i64).unwrap_or(1);
            highest.max(ctx.default_precision())
        }
    };
    if !u.coeff(0).is_one() || u.valuation() != Some(0) {
        return Err(Error::parameter(
            "coboundary solver needs a unit with constant term 1",
        ));
    }
    let field = u.field().clone();
    // v = u * sigma_q(v): v_i = sum_{j<i} u_{i-j} q^j v_j + q^i v_i.
    let mut v = vec![ScalarElem::zero(&field); n.max(1) as usize];
    v[0] = ScalarElem::one(&field);
    for i in 1..n as usize {
        let mut acc = ScalarElem::zero(&field);
        for j in 0..i {
            let uc = u.coeff((i - j) as i64);
            if uc.is_zero() {
                continue;
            }
            acc = acc.add(&uc.mul(&ctx.q_pow(j as i64)).mul(&v[j]));
        }
        let denom = ScalarElem::one(&field).sub(&ctx.q_pow(i as i64));
        v[i] = acc.mul(&denom.inv().expect("q not a root of unity"));
    }
    Ok(LaurentSeries::normalized(field, 0, v, Prec::Mod(n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{QContext, ScalarElem, ScalarField};

    fn ctx2() -> QContext {
        let f = ScalarField::rationals();
        let q = ScalarElem::from_i64(&f, 2);
        QContext::new(f, q).unwrap()
    }

    fn fe(f: &ScalarField, n: i64) -> ScalarElem {
        ScalarElem::from_i64(f, n)
    }

    #[test]
    fn sigma_q_scales_coefficients() {
        let ctx = ctx2();
        let f = ctx.field().clone();
        // t^{-1} + 3t -> (1/2) t^{-1} + 6t
        let a = LaurentSeries::from_terms(
            &f,
            &[(-1, fe(&f, 1)), (1, fe(&f, 3))],
            Prec::Exact,
        );
        let sa = a.sigma_q(&ctx);
        assert_eq!(sa.coeff(-1), ScalarElem::from_ratio(&f, 1, 2));
        assert_eq!(sa.coeff(1), fe(&f, 6));
        // constants fixed
        let one = LaurentSeries::one(&f);
        assert!(one.sigma_q(&ctx).is_one());
        // precision preserved
        let b = LaurentSeries::from_terms(&f, &[(2, fe(&f, 1))], Prec::Mod(5));
        let sb = b.sigma_q(&ctx);
        assert_eq!(sb.coeff(2), fe(&f, 4));
        assert_eq!(sb.prec(), Prec::Mod(5));
    }

    #[test]
    fn geometric_series_inverse() {
        let f = ScalarField::rationals();
        let one_minus_t = LaurentSeries::from_terms(
            &f,
            &[(0, fe(&f, 1)), (1, fe(&f, -1))],
            Prec::Exact,
        );
        let inv = one_minus_t.invert(Some(4)).unwrap();
        for i in 0..4 {
            assert_eq!(inv.coeff(i), fe(&f, 1), "coefficient of t^{i}");
        }
        assert_eq!(inv.prec(), Prec::Mod(4));
        // inverse of a monomial is exact
        let m = LaurentSeries::monomial(fe(&f, 2), -2);
        let mi = m.invert(None).unwrap();
        assert_eq!(mi.coeff(2), ScalarElem::from_ratio(&f, 1, 2));
        assert_eq!(mi.prec(), Prec::Exact);
    }

    #[test]
    fn valuation_arithmetic() {
        let f = ScalarField::rationals();
        let a = LaurentSeries::monomial(fe(&f, 1), -2);
        let b = LaurentSeries::monomial(fe(&f, 1), 5);
        assert_eq!(a.mul(&b).valuation(), Some(3));
    }

    #[test]
    fn precision_bookkeeping_in_products() {
        let f = ScalarField::rationals();
        // (t + t^2 mod t^4) * (t^{-1} exact) -> 1 + t mod t^3
        let a = LaurentSeries::from_terms(
            &f,
            &[(1, fe(&f, 1)), (2, fe(&f, 1))],
            Prec::Mod(4),
        );
        let b = LaurentSeries::monomial(fe(&f, 1), -1);
        let p = a.mul(&b);
        assert_eq!(p.prec(), Prec::Mod(3));
        assert_eq!(p.coeff(0), fe(&f, 1));
        assert_eq!(p.coeff(1), fe(&f, 1));
        // inversion precision: nu(a)=1 known mod t^4 -> inverse known mod t^2
        let ai = a.invert(None).unwrap();
        assert_eq!(ai.prec(), Prec::Mod(2));
        assert!(a.mul(&ai).agrees_with(&LaurentSeries::one(&f)));
    }

    #[test]
    fn zero_division_reported() {
        let f = ScalarField::rationals();
        assert!(matches!(
            LaurentSeries::zero(&f).invert(None),
            Err(Error::DivisionByZero)
        ));
        assert!(matches!(
            LaurentSeries::zero_mod(&f, 7).invert(None),
            Err(Error::ZeroAtPrecision { precision: 7 })
        ));
    }

    #[test]
    fn coboundary_example() {
        let ctx = ctx2();
        let f = ctx.field().clone();
        // q=2, u = 1+t: v = 1 - t + (2/3) t^2 + ...
        let u = LaurentSeries::from_terms(&f, &[(0, fe(&f, 1)), (1, fe(&f, 1))], Prec::Mod(6));
        let v = coboundary_solve(&u, &ctx).unwrap();
        assert_eq!(v.coeff(1), fe(&f, -1));
        assert_eq!(v.coeff(2), ScalarElem::from_ratio(&f, 2, 3));
        // check u * sigma(v) = v to precision
        let lhs = u.mul(&v.sigma_q(&ctx));
        assert!(lhs.agrees_with(&v));
        // u = 1 -> v = 1
        let one = LaurentSeries::one(&f).truncate(8);
        let v1 = coboundary_solve(&one, &ctx).unwrap();
        assert!(v1.agrees_with(&LaurentSeries::one(&f)));
    }

    #[test]
    fn coboundary_roundtrip_random_units() {
        use rand::{Rng, SeedableRng};
        let ctx = ctx2();
        let f = ctx.field().clone();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..25 {
            let mut terms = vec![(0, fe(&f, 1))];
            for e in 1..8 {
                terms.push((e, fe(&f, rng.gen_range(-4..5))));
            }
            let u = LaurentSeries::from_terms(&f, &terms, Prec::Mod(12));
            let v = coboundary_solve(&u, &ctx).unwrap();
            let recovered = v.mul(&v.sigma_q(&ctx).invert(None).unwrap());
            assert!(recovered.agrees_with(&u));
        }
    }

    #[test]
    fn ramify_restrict_roundtrip() {
        let ctx = ctx2();
        let f = ctx.field().clone();
        let a = LaurentSeries::from_terms(&f, &[(-1, fe(&f, 1)), (0, fe(&f, 1))], Prec::Exact);
        // adjoin sqrt(2) as q^{1/2}
        let k =
            f.extend(&crate::scalars::poly::Poly::from_i64(&f, &[-2, 0, 1]), "q12").unwrap();
        let root = k.generator().unwrap();
        let ram = RamifiedSeries::ramify(&a, 2, &root, &ctx).unwrap();
        assert_eq!(ram.body.valuation(), Some(-2));
        assert_eq!(ram.body.coeff(-2), ScalarElem::one(&k));
        let back = ram.restrict().unwrap();
        assert!(back.agrees_with(&a.lift_to(&k).unwrap()));
        // inconsistent root rejected
        let bad = ScalarElem::from_i64(&k, 3);
        assert!(RamifiedSeries::ramify(&a, 2, &bad, &ctx).is_err());
    }

    #[test]
    fn sigma_is_automorphism_random() {
        use rand::{Rng, SeedableRng};
        let ctx = ctx2();
        let f = ctx.field().clone();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..30 {
            let mut terms_a = Vec::new();
            let mut terms_b = Vec::new();
            for e in -3..5 {
                terms_a.push((e, fe(&f, rng.gen_range(-3..4))));
                terms_b.push((e, fe(&f, rng.gen_range(-3..4))));
            }
            let a = LaurentSeries::from_terms(&f, &terms_a, Prec::Exact);
            let b = LaurentSeries::from_terms(&f, &terms_b, Prec::Exact);
            let lhs = a.mul(&b).sigma_q(&ctx);
            let rhs = a.sigma_q(&ctx).mul(&b.sigma_q(&ctx));
            assert!(lhs.agrees_with(&rhs));
            assert_eq!(a.sigma_q(&ctx).valuation(), a.valuation());
            // nu(ab) = nu(a) + nu(b) when both nonzero
            if let (Some(va), Some(vb)) = (a.valuation(), b.valuation()) {
                assert_eq!(a.mul(&b).valuation(), Some(va + vb));
            }
            // ultrametric inequality
            if let (Some(va), Some(vb)) = (a.valuation(), b.valuation()) {
                if let Some(vs) = a.add(&b).valuation() {
                    assert!(vs >= va.min(vb));
                    if va != vb {
                        assert_eq!(vs, va.min(vb));
                    }
                }
            }
        }
    }
}
