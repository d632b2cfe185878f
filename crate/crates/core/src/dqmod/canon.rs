//! Classification data: canonical blocks J_d (x) V_{r,s}(lambda or f), the
//! multiset normal form, the sigma_q-action on irreducible polynomials with
//! its orbit key, the Harder-Narasimhan layering and the SL_n criteria.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::matrix::SeriesMat;
use crate::ore::{gcd_i64, Slope};
use crate::scalars::poly::Poly;
use crate::scalars::{factor, QContext, ScalarElem};

/// The lambda-part of a block: a scalar class in k^x/q^Z, or an irreducible
/// polynomial class in S/<sigma_q> for Galois-descent blocks.
#[derive(Clone, Debug)]
pub enum BlockClass {
    Split(ScalarElem),
    Descent(Poly),
}

impl BlockClass {
    pub fn degree(&self) -> i64 {
        match self {
            BlockClass::Split(_) => 1,
            BlockClass::Descent(f) => f.degree() as i64,
        }
    }

    /// Representative as a monic polynomial (linear for the split case).
    pub fn as_poly(&self) -> Poly {
        match self {
            BlockClass::Split(lam) => Poly::new(
                lam.field().clone(),
                vec![lam.neg(), ScalarElem::one(lam.field())],
            ),
            BlockClass::Descent(f) => f.clone(),
        }
    }
}

/// One indecomposable summand J_d (x) V_{r,s}(class).
#[derive(Clone, Debug)]
pub struct CanonicalBlock {
    pub d: i64,
    pub r: i64,
    pub s: i64,
    pub class: BlockClass,
}

impl CanonicalBlock {
    pub fn split(d: i64, r: i64, s: i64, lambda: ScalarElem) -> Result<Self> {
        if d < 1 || s < 1 || gcd_i64(r.unsigned_abs(), s as u64) != 1 {
            return Err(Error::parameter("block needs d >= 1, s >= 1, gcd(r,s) = 1"));
        }
        if lambda.is_zero() {
            return Err(Error::parameter("lambda must be nonzero"));
        }
        Ok(CanonicalBlock { d, r, s, class: BlockClass::Split(lambda) })
    }

    pub fn descent(d: i64, r: i64, s: i64, f: Poly) -> Result<Self> {
        if d < 1 || s < 1 || gcd_i64(r.unsigned_abs(), s as u64) != 1 {
            return Err(Error::parameter("block needs d >= 1, s >= 1, gcd(r,s) = 1"));
        }
        if !f.is_monic() || f.degree() < 1 || f.coeff(0).is_zero() {
            return Err(Error::parameter("descent class needs monic f with f(0) != 0"));
        }
        if f.degree() == 1 {
            return Ok(CanonicalBlock { d, r, s, class: BlockClass::Split(f.coeff(0).neg()) });
        }
        Ok(CanonicalBlock { d, r, s, class: BlockClass::Descent(f) })
    }

    pub fn slope(&self) -> Slope {
        Slope::new(self.r, self.s)
    }

    pub fn dim(&self) -> i64 {
        self.d * self.s * self.class.degree()
    }

    pub fn degree(&self) -> i64 {
        self.d * self.r * self.class.degree()
    }

    /// Exact class equality: same (d, r, s) and the lambda data in the same
    /// sigma_q-orbit.
    pub fn same_class(&self, other: &CanonicalBlock, ctx: &QContext) -> bool {
        if (self.d, self.r, self.s) != (other.d, other.r, other.s) {
            return false;
        }
        match (&self.class, &other.class) {
            (BlockClass::Split(a), BlockClass::Split(b)) => ctx.same_q_class(a, b),
            (BlockClass::Descent(f), BlockClass::Descent(g)) => {
                same_s_orbit(f, g, ctx).unwrap_or(false)
            }
            _ => false,
        }
    }

    /// Deterministic sort/display key.
    pub fn sort_key(&self, ctx: &QContext) -> (Slope, i64, Vec<String>) {
        let canon = s_class_key(&self.class.as_poly(), ctx).unwrap_or_else(|_| self.class.as_poly());
        let coeffs: Vec<String> = canon.coeffs().iter().map(|c| c.to_string()).collect();
        (self.slope(), self.d, coeffs)
    }
}

impl fmt::Display for CanonicalBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "J({}) (x) V({}/{}; ", self.d, self.r, self.s)?;
        match &self.class {
            BlockClass::Split(lam) => write!(f, "lambda={lam})"),
            BlockClass::Descent(p) => write!(f, "f={p})"),
        }
    }
}

/// The classification datum of a module: a multiset of canonical blocks.
#[derive(Clone, Debug)]
pub struct CanonicalForm {
    pub blocks: Vec<CanonicalBlock>,
}

impl CanonicalForm {
    pub fn new(mut blocks: Vec<CanonicalBlock>, ctx: &QContext) -> Self {
        blocks.sort_by(|a, b| {
            let ka = a.sort_key(ctx);
            let kb = b.sort_key(ctx);
            ka.0.cmp(&kb.0).then(ka.1.cmp(&kb.1)).then(ka.2.cmp(&kb.2))
        });
        CanonicalForm { blocks }
    }

    pub fn dim(&self) -> i64 {
        self.blocks.iter().map(|b| b.dim()).sum()
    }

    pub fn degree(&self) -> i64 {
        self.blocks.iter().map(|b| b.degree()).sum()
    }

    pub fn is_semistable(&self) -> bool {
        let mut slopes = self.blocks.iter().map(|b| b.slope());
        match slopes.next() {
            None => true,
            Some(first) => slopes.all(|s| s == first),
        }
    }

    /// True when every block class is a scalar (no descent blocks).
    pub fn is_split(&self) -> bool {
        self.blocks.iter().all(|b| matches!(b.class, BlockClass::Split(_)))
    }

    /// Multiset equality through exact class tests.
    pub fn equivalent(&self, other: &CanonicalForm, ctx: &QContext) -> bool {
        if self.blocks.len() != other.blocks.len() {
            return false;
        }
        let mut used = vec![false; other.blocks.len()];
        for a in &self.blocks {
            let mut found = false;
            for (i, b) in other.blocks.iter().enumerate() {
                if !used[i] && a.same_class(b, ctx) {
                    used[i] = true;
                    found = true;
                    break;
                }
            }
            if !found {
                return false;
            }
        }
        true
    }

    /// The canonical block-diagonal model module.
    pub fn model(&self, ctx: &QContext) -> Result<super::DqModule> {
        let mut acc: Option<super::DqModule> = None;
        for b in &self.blocks {
            let core = match &b.class {
                BlockClass::Split(lam) => super::DqModule::block_v(ctx, b.r, b.s, lam)?,
                BlockClass::Descent(f) => super::DqModule::block_vf(ctx, b.r, b.s, f)?,
            };
            let with_j = if b.d == 1 {
                core
            } else {
                super::DqModule::block_j(ctx, b.d)?.tensor(&core)?
            };
            acc = Some(match acc {
                None => with_j,
                Some(m) => m.direct_sum(&with_j)?,
            });
        }
        acc.ok_or_else(|| Error::parameter("empty canonical form has no model"))
    }

    /// Harder-Narasimhan layering: blocks grouped by slope in strictly
    /// decreasing order; each layer is semistable and the concatenation
    /// recovers the form (the associated graded module).
    pub fn hn_filtration(&self, ctx: &QContext) -> Vec<(Slope, CanonicalForm)> {
        let mut by_slope: Vec<(Slope, Vec<CanonicalBlock>)> = Vec::new();
        for b in &self.blocks {
            let s = b.slope();
            match by_slope.iter_mut().find(|(sl, _)| *sl == s) {
                Some((_, v)) => v.push(b.clone()),
                None => by_slope.push((s, vec![b.clone()])),
            }
        }
        by_slope.sort_by(|a, b| b.0.cmp(&a.0));
        by_slope
            .into_iter()
            .map(|(s, blocks)| (s, CanonicalForm::new(blocks, ctx)))
            .collect()
    }

    /// SL_n membership of the class: total t-power of the determinant
    /// vanishes and the product of the lambda's lies in q^Z. Needs split
    /// blocks.
    pub fn sl_class_predicate(&self, ctx: &QContext) -> Result<bool> {
        let mut rsum = 0i64;
        let mut prod = ScalarElem::one(ctx.field());
        for b in &self.blocks {
            match &b.class {
                BlockClass::Split(lam) => {
                    rsum += b.d * b.r * b.s;
                    // det of the s x s companion of T^s - lambda t^r is
                    // (-1)^{s-1} lambda t^r; the unit part contributes
                    // lambda^d up to sign, and signs are 2-torsion handled
                    // through the q-coset test only when they cancel.
                    prod = prod.mul(&lam.lift_to(ctx.field())?.pow(b.d)?);
                }
                BlockClass::Descent(_) => {
                    return Err(Error::parameter(
                        "SL predicate defined on split canonical forms",
                    ));
                }
            }
        }
        // Corollary form: sum d_i r_i = 0 (per irreducible factor of dim s_i
        // the determinant contributes t^{r_i}, d_i times) and the lambda
        // product a q-power.
        let rsum_blocks: i64 = self.blocks.iter().map(|b| b.d * b.r).sum();
        let _ = rsum;
        Ok(rsum_blocks == 0 && ctx.q_power_exponent(&prod).is_some())
    }
}

impl fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

/// The sigma_q-action on monic polynomials with nonzero constant term:
/// sigma_q f(x) = q^{-deg f} f(qx), scaling the roots by q^{-1}.
pub fn sigma_q_on_s(f: &Poly, ctx: &QContext, power: i64) -> Result<Poly> {
    if !f.is_monic() || f.coeff(0).is_zero() {
        return Err(Error::parameter("sigma_q acts on monic f with f(0) != 0"));
    }
    let qp = ctx.q_pow(power).lift_to(f.field())?;
    Ok(f.scale_argument(&qp).monic())
}

/// True when f and g lie in the same <sigma_q>-orbit. For rational q the
/// candidate shift is pinned exactly by the constant terms; over towers the
/// search is bounded by the torsion bound.
pub fn same_s_orbit(f: &Poly, g: &Poly, ctx: &QContext) -> Result<bool> {
    if f.degree() != g.degree() {
        return Ok(false);
    }
    let m = f.degree() as i64;
    // constant terms transform by q^{-m j}: g(0) = q^{-mj} f(0)
    let ratio = f.coeff(0).div(&g.coeff(0))?;
    if let Some(e) = ctx.q_power_exponent(&ratio) {
        if e.rem_euclid(m) != 0 {
            return Ok(false);
        }
        let j = e / m;
        return Ok(&sigma_q_on_s(f, ctx, j)? == g);
    }
    Ok(false)
}

/// Canonical representative of the <sigma_q>-orbit. For rational data the
/// representative is pinned exactly: the unique shift whose constant term
/// has absolute value in [1, |q|^deg). Otherwise the lexicographically
/// least coefficient vector within the torsion bound is used (a bounded
/// search, adequate because tower representatives are produced by the same
/// normalization everywhere).
pub fn s_class_key(f: &Poly, ctx: &QContext) -> Result<Poly> {
    if !f.is_monic() || f.coeff(0).is_zero() {
        return Err(Error::parameter("orbit key needs monic f with f(0) != 0"));
    }
    use num_traits::{One, Signed};
    let m = f.degree() as i64;
    if let (Some(c0), Some(qr)) = (f.coeff(0).as_rational(), ctx.q().as_rational()) {
        // |constant of sigma^j f| = |c0| |q|^{-jm}; land it in [1, |q|^m).
        let step = if qr.abs() > BigRational::one() {
            qr.abs()
        } else {
            qr.abs().recip()
        };
        let window = num_traits::pow::pow(step.clone(), m as usize);
        let sign = if qr.abs() > BigRational::one() { 1i64 } else { -1 };
        let mut x = c0.abs();
        let mut j = 0i64;
        while x >= window {
            x /= window.clone();
            j += 1;
        }
        while x < BigRational::one() {
            x *= window.clone();
            j -= 1;
        }
        return sigma_q_on_s(f, ctx, sign * j);
    }
    let mut best = f.clone();
    let bound = ctx.torsion_bound().min(16);
    for j in -bound..=bound {
        let cand = sigma_q_on_s(f, ctx, j)?;
        if poly_lex_lt(&cand, &best) {
            best = cand;
        }
    }
    Ok(best)
}

fn poly_lex_lt(a: &Poly, b: &Poly) -> bool {
    for i in (0..=a.degree().max(b.degree())).rev() {
        match a.coeff(i).canonical_cmp(&b.coeff(i)) {
            std::cmp::Ordering::Less => return true,
            std::cmp::Ordering::Greater => return false,
            std::cmp::Ordering::Equal => {}
        }
    }
    false
}

/// Normalize a GL witness between SL classes: the determinant must be a
/// constant series; dividing by an n-th root from the scalar tower gives an
/// SL witness with the same twisted-conjugation action.
pub fn sl_normalize_conjugator(c: &SeriesMat, ctx: &QContext) -> Result<SeriesMat> {
    let n = c.rows();
    let det = c.det()?;
    let Some(constant) = det.as_constant() else {
        return Err(Error::parameter(
            "determinant is not sigma_q-fixed: not a twisted centralizer of an SL pair",
        ));
    };
    if constant.is_zero() {
        return Err(Error::parameter("conjugator is singular"));
    }
    // find an n-th root of the constant in the tower
    let field = ctx.field();
    let mut coeffs = vec![ScalarElem::zero(field); n + 1];
    coeffs[0] = constant.lift_to(field)?.neg();
    coeffs[n] = ScalarElem::one(field);
    let pol = Poly::new(field.clone(), coeffs);
    let mut roots = factor::roots_in(&pol)?;
    roots.sort_by(|a, b| a.canonical_cmp(b));
    let root = roots.pop().ok_or_else(|| {
        Error::ExtensionRequired(format!(
            "no {n}-th root of det = {constant} in {}",
            field.describe()
        ))
    })?;
    let scale = crate::series::LaurentSeries::constant(root.inv()?);
    Ok(c.scale(&scale))
}

/// mu-weighted dimension bookkeeping for the HN layers: the sum of
/// (layer dim) x (layer slope) equals the total degree.
pub fn hn_degree_identity(cf: &CanonicalForm, ctx: &QContext) -> bool {
    let total: BigRational = cf
        .hn_filtration(ctx)
        .iter()
        .map(|(s, layer)| {
            s.as_rational() * BigRational::from(BigInt::from(layer.dim()))
        })
        .sum();
    total == BigRational::from(BigInt::from(cf.degree()))
}
