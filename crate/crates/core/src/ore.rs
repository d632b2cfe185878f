//! The twisted polynomial ring k((t))_q[T] with T a = sigma_q(a) T:
//! multiplication, right Euclidean division, Newton polygons, and the
//! factorization of a monic polynomial into pure (single-slope) factors by
//! polygon-graded Hensel lifting.
//!
//! The Newton polygon is the lower convex hull of the points (i, nu(a_i))
//! for f = T^n + a_1 T^{n-1} + ... + a_n, read left to right with strictly
//! increasing slopes; the defining example T^s - lambda t^r has the single
//! slope r/s. Pure factors are listed by increasing slope and compose
//! left-to-right: f = f_1 * f_2 * ... * f_k.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::matrix::ScalarMat;
use crate::scalars::{QContext, ScalarElem};
use crate::series::{LaurentSeries, Prec};

/// A slope r/s in lowest terms with s >= 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Slope {
    pub num: i64,
    pub den: i64,
}

impl Slope {
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0);
        let (mut num, mut den) = if den < 0 { (-num, -den) } else { (num, den) };
        let g = gcd_i64(num.unsigned_abs(), den.unsigned_abs()) as i64;
        if g > 1 {
            num /= g;
            den /= g;
        }
        Slope { num, den }
    }

    pub fn zero() -> Self {
        Slope { num: 0, den: 1 }
    }

    pub fn as_rational(&self) -> BigRational {
        BigRational::new(BigInt::from(self.num), BigInt::from(self.den))
    }
}

impl PartialOrd for Slope {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Slope {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.num as i128 * other.den as i128).cmp(&(other.num as i128 * self.den as i128))
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

pub(crate) fn gcd_i64(a: u64, b: u64) -> u64 {
    if b == 0 {
        a.max(1)
    } else {
        gcd_i64(b, a % b)
    }
}

/// The finite lower boundary of the Newton polygon.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygon {
    /// Lattice vertices (abscissa, value), abscissae strictly increasing
    /// from 0 to the degree.
    pub vertices: Vec<(i64, i64)>,
    /// (slope in lowest terms, horizontal multiplicity), strictly increasing.
    pub slopes: Vec<(Slope, i64)>,
}

impl NewtonPolygon {
    pub fn is_pure(&self) -> bool {
        self.slopes.len() == 1
    }

    /// Hull value at abscissa i (rational).
    pub fn value_at(&self, i: i64) -> BigRational {
        for w in self.vertices.windows(2) {
            let (x0, y0) = w[0];
            let (x1, y1) = w[1];
            if i >= x0 && i <= x1 {
                return BigRational::new(
                    BigInt::from(y0 * (x1 - i) + y1 * (i - x0)),
                    BigInt::from(x1 - x0),
                );
            }
        }
        let (x, y) = self.vertices[self.vertices.len() - 1];
        debug_assert_eq!(i, x);
        BigRational::from(BigInt::from(y))
    }

    /// The multiset of slopes, one entry per unit of horizontal length.
    pub fn slope_multiset(&self) -> Vec<Slope> {
        let mut out = Vec::new();
        for (s, m) in &self.slopes {
            for _ in 0..*m {
                out.push(*s);
            }
        }
        out
    }
}

/// A twisted polynomial a_0 T^n + a_1 T^{n-1} + ... + a_n over k((t)).
#[derive(Clone)]
pub struct OrePoly {
    ctx: QContext,
    /// coeffs[i] is a_i, the coefficient of T^{n-i}; coeffs[0] nonzero.
    coeffs: Vec<LaurentSeries>,
}

impl fmt::Debug for OrePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for OrePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.degree();
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero_known() && c.prec() == Prec::Exact {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let e = n - i as i64;
            match e {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})*T")?,
                _ => write!(f, "({c})*T^{e}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl OrePoly {
    /// Build from coefficients a_0..a_n (a_0 multiplies T^n). Leading known
    /// zeros are trimmed.
    pub fn new(ctx: &QContext, coeffs: Vec<LaurentSeries>) -> Self {
        let mut coeffs = coeffs;
        while coeffs.len() > 1 && coeffs.first().map(|c| c.is_exactly_zero()).unwrap_or(false) {
            coeffs.remove(0);
        }
        if coeffs.is_empty() {
            coeffs.push(LaurentSeries::zero(ctx.field()));
        }
        OrePoly { ctx: ctx.clone(), coeffs }
    }

    pub fn zero(ctx: &QContext) -> Self {
        OrePoly { ctx: ctx.clone(), coeffs: vec![LaurentSeries::zero(ctx.field())] }
    }

    pub fn one(ctx: &QContext) -> Self {
        OrePoly { ctx: ctx.clone(), coeffs: vec![LaurentSeries::one(ctx.field())] }
    }

    /// The monomial c t^{exp} T^{tdeg}.
    pub fn monomial(ctx: &QContext, c: ScalarElem, exp: i64, tdeg: usize) -> Self {
        let mut coeffs = vec![LaurentSeries::zero(ctx.field()); tdeg + 1];
        coeffs[0] = LaurentSeries::monomial(c, exp);
        OrePoly { ctx: ctx.clone(), coeffs }
    }

    /// T^s - lambda t^r, the defining polynomial of the irreducible block.
    pub fn pure_block(ctx: &QContext, r: i64, s: i64, lambda: &ScalarElem) -> Result<Self> {
        if s < 1 || gcd_i64(r.unsigned_abs(), s as u64) != 1 {
            return Err(Error::parameter("pure block needs s >= 1 and gcd(r, s) = 1"));
        }
        if lambda.is_zero() {
            return Err(Error::parameter("lambda must be nonzero"));
        }
        let mut coeffs = vec![LaurentSeries::zero(ctx.field()); s as usize + 1];
        coeffs[0] = LaurentSeries::one(ctx.field());
        coeffs[s as usize] = LaurentSeries::monomial(lambda.neg(), r);
        Ok(OrePoly { ctx: ctx.clone(), coeffs })
    }

    pub fn ctx(&self) -> &QContext {
        &self.ctx
    }

    pub fn degree(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    /// a_i = coefficient of T^{degree - i}.
    pub fn coeff_a(&self, i: usize) -> LaurentSeries {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| LaurentSeries::zero(self.ctx.field()))
    }

    /// Coefficient of T^e.
    pub fn coeff_of_power(&self, e: i64) -> LaurentSeries {
        let n = self.degree();
        if e < 0 || e > n {
            LaurentSeries::zero(self.ctx.field())
        } else {
            self.coeff_a((n - e) as usize)
        }
    }

    pub fn coeffs(&self) -> &[LaurentSeries] {
        &self.coeffs
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs[0].is_one()
    }

    pub fn is_zero_known(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero_known())
    }

    pub fn add(&self, other: &OrePoly) -> OrePoly {
        let n = self.degree().max(other.degree());
        let mut coeffs = Vec::with_capacity(n as usize + 1);
        for e in (0..=n).rev() {
            coeffs.push(self.coeff_of_power(e).add(&other.coeff_of_power(e)));
        }
        OrePoly::new(&self.ctx, coeffs)
    }

    pub fn sub(&self, other: &OrePoly) -> OrePoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> OrePoly {
        OrePoly {
            ctx: self.ctx.clone(),
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    /// Twisted product: (a T^i)(b T^j) = a sigma^i(b) T^{i+j}.
    pub fn mul(&self, other: &OrePoly) -> OrePoly {
        let n = self.degree();
        let m = other.degree();
        let field = self.ctx.field();
        let mut out = vec![LaurentSeries::zero(field); (n + m) as usize + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero_known() && a.prec() == Prec::Exact {
                continue;
            }
            let tpow = n - i as i64;
            for (j, b) in other.coeffs.iter().enumerate() {
                let twisted = b.sigma_q_power(&self.ctx, tpow);
                let term = a.mul(&twisted);
                let idx = i + j;
                out[idx] = out[idx].add(&term);
            }
        }
        OrePoly::new(&self.ctx, out)
    }

    /// Right division: self = q * g + r with deg r < deg g.
    pub fn divmod_right(&self, g: &OrePoly) -> Result<(OrePoly, OrePoly)> {
        if g.is_zero_known() {
            return Err(Error::DivisionByZero);
        }
        let field = self.ctx.field();
        let dg = g.degree();
        let g0 = &g.coeffs[0];
        let mut r = self.clone();
        let mut q_terms: Vec<(i64, LaurentSeries)> = Vec::new();
        let work = self
            .coeffs
            .iter()
            .chain(g.coeffs.iter())
            .filter_map(|c| c.prec().bound())
            .min();
        while r.degree() >= dg && !r.coeffs[0].is_zero_known() {
            let shift = r.degree() - dg;
            let lead_t = g0.sigma_q_power(&self.ctx, shift);
            let inv = match lead_t.prec() {
                Prec::Exact => lead_t.invert(work.or(Some(self.ctx.default_precision()))),
                Prec::Mod(_) => lead_t.invert(None),
            }?;
            let c = r.coeffs[0].mul(&inv);
            q_terms.push((shift, c.clone()));
            // subtract (c T^shift) * g
            let mut sub = vec![LaurentSeries::zero(field); r.coeffs.len()];
            for (j, b) in g.coeffs.iter().enumerate() {
                sub[j] = c.mul(&b.sigma_q_power(&self.ctx, shift));
            }
            let mut coeffs = r.coeffs.clone();
            for (j, s) in sub.into_iter().enumerate() {
                coeffs[j] = coeffs[j].sub(&s);
            }
            // the leading term cancels by construction
            coeffs.remove(0);
            if coeffs.is_empty() {
                coeffs.push(LaurentSeries::zero(field));
            }
            r = OrePoly { ctx: self.ctx.clone(), coeffs };
        }
        let qdeg = q_terms.iter().map(|(s, _)| *s).max().unwrap_or(0);
        let mut q = vec![LaurentSeries::zero(field); qdeg as usize + 1];
        for (s, c) in q_terms {
            let idx = (qdeg - s) as usize;
            q[idx] = q[idx].add(&c);
        }
        Ok((OrePoly::new(&self.ctx, q), r))
    }

    /// Newton polygon of a monic polynomial with nonzero constant term.
    /// Errors name the index of any coefficient whose valuation is
    /// undetermined at the current precision yet could cut below the hull.
    pub fn newton_polygon(&self) -> Result<NewtonPolygon> {
        if !self.is_monic() {
            return Err(Error::parameter("Newton polygon needs a monic polynomial"));
        }
        let n = self.degree();
        let mut points: Vec<(i64, i64)> = Vec::new();
        let mut unknown: Vec<(i64, i64)> = Vec::new(); // (index, precision bound)
        for i in 0..=n {
            let a = self.coeff_a(i as usize);
            match a.valuation() {
                Some(v) => points.push((i, v)),
                None => match a.prec() {
                    Prec::Exact => {
                        if i == n {
                            return Err(Error::parameter(
                                "constant coefficient a_n must be nonzero",
                            ));
                        }
                    }
                    Prec::Mod(b) => {
                        if i == n {
                            return Err(Error::precision(
                                "newton_polygon",
                                format!("valuation of a_{i} undetermined below t^{b}"),
                            ));
                        }
                        unknown.push((i, b));
                    }
                },
            }
        }
        let hull = lower_hull(&points);
        let polygon = polygon_from_hull(hull);
        // an unknown coefficient may not be able to dip below the hull
        for (i, b) in unknown {
            if BigRational::from(BigInt::from(b)) < polygon.value_at(i) {
                return Err(Error::precision(
                    "newton_polygon",
                    format!(
                        "coefficient a_{i} known only mod t^{b}, below the hull at {}",
                        polygon.value_at(i)
                    ),
                ));
            }
        }
        Ok(polygon)
    }

    /// Factor a monic polynomial into pure factors, one per polygon slope,
    /// listed by increasing slope; the product in listed order recombines to
    /// the input (left-to-right composition).
    pub fn slope_factor(&self, target_precision: i64) -> Result<Vec<(Slope, OrePoly)>> {
        if !self.is_monic() {
            return Err(Error::parameter("slope factorization needs a monic polynomial"));
        }
        let polygon = self.newton_polygon()?;
        if polygon.is_pure() {
            return Ok(vec![(polygon.slopes[0].0, self.clone())]);
        }
        let split_abscissa = polygon.vertices[1].0;
        let (g, h) = self.split_at_vertex(split_abscissa, true, target_precision)?;
        let mut out = vec![(polygon.slopes[0].0, g)];
        out.extend(h.slope_factor(target_precision)?);
        Ok(out)
    }

    /// Split f = g * h at a polygon vertex. With `lower_left` the left
    /// factor g carries the polygon edges strictly left of the vertex
    /// (the lower slopes); otherwise g carries the edges right of it.
    /// The lift is the polygon-graded Hensel iteration: initial factors from
    /// edge coefficients, then per-defect-level exact linear corrections.
    pub fn split_at_vertex(
        &self,
        abscissa: i64,
        lower_left: bool,
        target_precision: i64,
    ) -> Result<(OrePoly, OrePoly)> {
        let polygon = self.newton_polygon()?;
        if !polygon.vertices.iter().any(|&(x, _)| x == abscissa)
            || abscissa <= 0
            || abscissa >= self.degree()
        {
            return Err(Error::parameter(format!(
                "abscissa {abscissa} is not an interior polygon vertex"
            )));
        }
        let n = self.degree();
        let field = self.ctx.field().clone();
        let ell = abscissa; // split point
        let (dg, dh) = if lower_left { (ell, n - ell) } else { (n - ell, ell) };

        // Polygon value helpers for the two factors. The left factor's
        // grading function pg and the right factor's ph satisfy
        // pg(i) + ph(j) >= P(i + j) with equality along the edges.
        let p = |i: i64| polygon.value_at(i);
        let pg: Box<dyn Fn(i64) -> BigRational> = if lower_left {
            Box::new(move |i| p(i))
        } else {
            let shift = p(ell);
            Box::new(move |i| p(ell + i) - shift.clone())
        };
        let p2 = |i: i64| polygon.value_at(i);
        let ph: Box<dyn Fn(i64) -> BigRational> = if lower_left {
            let shift = p2(ell);
            Box::new(move |j| p2(ell + j) - shift.clone())
        } else {
            Box::new(move |j| p2(j))
        };

        // Edge coefficients of f: the exact t^{P(i)} coefficient where P(i)
        // is integral, else zero.
        let edge_coeff = |i: i64| -> ScalarElem {
            let v = polygon.value_at(i);
            if v.denom().is_one() {
                self.coeff_a(i as usize).coeff(v.numer().to_i64().expect("small exponent"))
            } else {
                ScalarElem::zero(&field)
            }
        };

        // Initial factors supported on the edges.
        let mut g_coeffs = vec![LaurentSeries::zero(&field); dg as usize + 1];
        g_coeffs[0] = LaurentSeries::one(&field);
        let mut h_coeffs = vec![LaurentSeries::zero(&field); dh as usize + 1];
        h_coeffs[0] = LaurentSeries::one(&field);

        if lower_left {
            // f's lower edges are exactly g's edges; h's edges come from
            // dividing the upper edge coefficients by the corner monomial.
            for i in 1..=dg {
                let c = edge_coeff(i);
                if !c.is_zero() {
                    let e = pg(i).to_integer().to_i64().unwrap();
                    g_coeffs[i as usize] = LaurentSeries::monomial(c, e);
                }
            }
            let corner = edge_coeff(ell);
            let corner_inv = corner.inv().map_err(|_| {
                Error::internal("slope split", "zero corner coefficient on the hull")
            })?;
            let corner_exp = polygon.value_at(ell).to_integer().to_i64().unwrap();
            for j in 1..=dh {
                let c = edge_coeff(ell + j);
                if !c.is_zero() {
                    let e = (polygon.value_at(ell + j).to_integer().to_i64().unwrap())
                        - corner_exp;
                    h_coeffs[j as usize] = LaurentSeries::monomial(c.mul(&corner_inv), e);
                }
            }
        } else {
            // f's lower edges are sigma^{deg g}-twists of h's edges; g's
            // edges then divide out the twisted corner.
            for j in 1..=dh {
                let c = edge_coeff(j);
                if !c.is_zero() {
                    let e = ph(j).to_integer().to_i64().unwrap();
                    let mono = LaurentSeries::monomial(c, e).sigma_q_power(&self.ctx, -dg);
                    h_coeffs[j as usize] = mono;
                }
            }
            let corner_exp = polygon.value_at(ell).to_integer().to_i64().unwrap();
            let corner = edge_coeff(ell);
            if corner.is_zero() {
                return Err(Error::internal("slope split", "zero corner coefficient"));
            }
            let corner_mono =
                LaurentSeries::monomial(corner, corner_exp).sigma_q_power(&self.ctx, -dg);
            for i in 1..=dg {
                let c = edge_coeff(ell + i);
                if !c.is_zero() {
                    let e = polygon.value_at(ell + i).to_integer().to_i64().unwrap();
                    // g_i * sigma^{dg - i}(corner t^{corner_exp}) = edge(ell+i)
                    let twisted_corner = corner_mono.sigma_q_power(&self.ctx, dg - i);
                    let gi = LaurentSeries::monomial(c, e)
                        .mul(&twisted_corner.invert(None).expect("monomial"));
                    g_coeffs[i as usize] = gi;
                }
            }
        }

        let mut g = OrePoly::new(&self.ctx, g_coeffs);
        let mut h = OrePoly::new(&self.ctx, h_coeffs);

        // Defect grid: all corrections live on (1/den_lcm) Z.
        let den_lcm = polygon
            .slopes
            .iter()
            .fold(1i64, |acc, (s, _)| acc / gcd_i64(acc.unsigned_abs(), s.den as u64) as i64 * s.den);
        let min_p: BigRational = (0..=n).map(|i| polygon.value_at(i)).min().unwrap();
        let max_levels = ((BigRational::from(BigInt::from(target_precision)) - min_p.clone())
            * BigRational::from(BigInt::from(den_lcm)))
        .to_integer()
        .to_i64()
        .unwrap_or(0)
        .max(1) as usize
            + 2;


        for _round in 0..max_levels {
            let residual = self.sub(&g.mul(&h));
            // find the minimal defect among known nonzero residual terms
            let mut min_defect: Option<BigRational> = None;
            for a in 1..=n {
                let r = residual.coeff_of_power(n - a);
                for (e, _) in r.terms() {
                    let defect = BigRational::from(BigInt::from(e)) - polygon.value_at(a);
                    if min_defect.as_ref().map(|d| &defect < d).unwrap_or(true) {
                        min_defect = Some(defect);
                    }
                }
            }
            let Some(delta) = min_defect else {
                // residual zero on all known coefficients: done
                break;
            };
            if delta <= BigRational::zero() {
                return Err(Error::internal(
                    "slope split",
                    "residual at nonpositive defect; edge initialization inconsistent",
                ));
            }
            if &delta + min_p.clone() >= BigRational::from(BigInt::from(target_precision)) {
                break;
            }

            // unknowns at this level: indices with integral exponent
            let mut unknown_slots: Vec<(bool, i64, i64)> = Vec::new(); // (is_g, index, exponent)
            for i in 1..=dg {
                let e = pg(i) + delta.clone();
                if e.denom().is_one() {
                    unknown_slots.push((true, i, e.to_integer().to_i64().unwrap()));
                }
            }
            for j in 1..=dh {
                let e = ph(j) + delta.clone();
                if e.denom().is_one() {
                    unknown_slots.push((false, j, e.to_integer().to_i64().unwrap()));
                }
            }
            // rows: abscissae with integral P(a) + delta
            let mut row_slots: Vec<(i64, i64)> = Vec::new();
            for a in 1..=n {
                let e = polygon.value_at(a) + delta.clone();
                if e.denom().is_one() {
                    row_slots.push((a, e.to_integer().to_i64().unwrap()));
                }
            }
            if unknown_slots.is_empty() {
                return Err(Error::internal(
                    "slope split",
                    "residual with no matching correction slots",
                ));
            }

            // matrix built generically: column = contribution of a unit
            // correction monomial through the twisted product
            let mut cols: Vec<Vec<ScalarElem>> = Vec::new();
            for &(is_g, idx, exp) in &unknown_slots {
                let contribution = if is_g {
                    // (unit monomial at g slot) * h
                    let mono = OrePoly::monomial(
                        &self.ctx,
                        ScalarElem::one(&field),
                        exp,
                        (dg - idx) as usize,
                    );
                    mono.mul(&h)
                } else {
                    let mono = OrePoly::monomial(
                        &self.ctx,
                        ScalarElem::one(&field),
                        exp,
                        (dh - idx) as usize,
                    );
                    g.mul(&mono)
                };
                let col: Vec<ScalarElem> = row_slots
                    .iter()
                    .map(|&(a, e)| contribution.coeff_of_power(n - a).coeff(e))
                    .collect();
                cols.push(col);
            }
            let mat = ScalarMat::from_columns(&field, row_slots.len(), &cols);
            let rhs: Vec<ScalarElem> = row_slots
                .iter()
                .map(|&(a, e)| residual.coeff_of_power(n - a).coeff(e))
                .collect();
            let Some(solution) = mat.solve(&rhs) else {
                return Err(Error::precision(
                    "slope split",
                    format!("graded system singular at defect {delta}"),
                ));
            };
            // apply corrections
            let mut g_coeffs: Vec<LaurentSeries> = g.coeffs.clone();
            let mut h_coeffs: Vec<LaurentSeries> = h.coeffs.clone();
            for (&(is_g, idx, exp), c) in unknown_slots.iter().zip(&solution) {
                if c.is_zero() {
                    continue;
                }
                let add = LaurentSeries::monomial(c.clone(), exp);
                if is_g {
                    g_coeffs[idx as usize] = g_coeffs[idx as usize].add(&add);
                } else {
                    h_coeffs[idx as usize] = h_coeffs[idx as usize].add(&add);
                }
            }
            g = OrePoly::new(&self.ctx, g_coeffs);
            h = OrePoly::new(&self.ctx, h_coeffs);
        }

        // record honest truncation on the factors
        let delta_reached = BigRational::from(BigInt::from(target_precision)) - min_p.clone();
        let trunc = |poly: &OrePoly, pf: &dyn Fn(i64) -> BigRational, deg: i64| -> OrePoly {
            let mut coeffs = poly.coeffs.clone();
            for (i, c) in coeffs.iter_mut().enumerate().skip(1) {
                let bound = (pf(i as i64) + delta_reached.clone()).ceil().to_integer();
                let bound = bound.to_i64().unwrap_or(target_precision);
                *c = c.truncate(bound.min(target_precision + bound.max(0)));
            }
            let _ = deg;
            OrePoly::new(&self.ctx, coeffs)
        };
        let g = trunc(&g, &*pg, dg);
        let h = trunc(&h, &*ph, dh);
        Ok((g, h))
    }
}

fn lower_hull(points: &[(i64, i64)]) -> Vec<(i64, i64)> {
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for &p in points {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // keep strictly convex turns: remove b when it lies on or above
            // the segment a-p
            let cross = (b.0 - a.0) as i128 * (p.1 - a.1) as i128
                - (b.1 - a.1) as i128 * (p.0 - a.0) as i128;
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

fn polygon_from_hull(hull: Vec<(i64, i64)>) -> NewtonPolygon {
    let mut slopes = Vec::new();
    for w in hull.windows(2) {
        let (x0, y0) = w[0];
        let (x1, y1) = w[1];
        slopes.push((Slope::new(y1 - y0, x1 - x0), x1 - x0));
    }
    NewtonPolygon { vertices: hull, slopes }
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

    fn t_linear(ctx: &QContext, c: i64, e: i64) -> OrePoly {
        // T - c t^e
        let f = ctx.field();
        OrePoly::new(
            ctx,
            vec![
                LaurentSeries::one(f),
                LaurentSeries::monomial(ScalarElem::from_i64(f, -c), e),
            ],
        )
    }

    #[test]
    fn twisted_product_example() {
        // q=2: (T-1)(T-t) = T^2 - (1+2t) T + t
        let ctx = ctx2();
        let f = ctx.field().clone();
        let a = t_linear(&ctx, 1, 0);
        let b = t_linear(&ctx, 1, 1);
        let p = a.mul(&b);
        assert_eq!(p.degree(), 2);
        assert!(p.coeff_a(0).is_one());
        let middle = p.coeff_a(1);
        assert_eq!(middle.coeff(0), ScalarElem::from_i64(&f, -1));
        assert_eq!(middle.coeff(1), ScalarElem::from_i64(&f, -2));
        assert_eq!(p.coeff_a(2).coeff(1), ScalarElem::from_i64(&f, 1));
    }

    #[test]
    fn divmod_inverts_product() {
        let ctx = ctx2();
        let a = t_linear(&ctx, 1, 0);
        let b = t_linear(&ctx, 1, 1);
        let p = a.mul(&b);
        let (q, r) = p.divmod_right(&b).unwrap();
        assert!(r.is_zero_known());
        assert_eq!(q.degree(), 1);
        assert!(q.sub(&a).is_zero_known());
        // f * 1 = f
        let one = OrePoly::one(&ctx);
        assert!(p.mul(&one).sub(&p).is_zero_known());
    }

    #[test]
    fn polygon_of_pure_block() {
        let ctx = ctx2();
        let lam = ScalarElem::from_i64(ctx.field(), 3);
        for (r, s) in [(1i64, 2i64), (0, 1), (-1, 3), (2, 1), (3, 2)] {
            let f = OrePoly::pure_block(&ctx, r, s, &lam).unwrap();
            let ng = f.newton_polygon().unwrap();
            assert_eq!(ng.vertices, vec![(0, 0), (s, r)]);
            assert_eq!(ng.slopes, vec![(Slope::new(r, s), s)]);
            assert!(ng.is_pure());
        }
    }

    #[test]
    fn polygon_of_mixed_product() {
        let ctx = ctx2();
        let a = t_linear(&ctx, 1, 0);
        let b = t_linear(&ctx, 1, 1);
        let p = a.mul(&b);
        let ng = p.newton_polygon().unwrap();
        assert_eq!(ng.vertices, vec![(0, 0), (1, 0), (2, 1)]);
        assert_eq!(
            ng.slopes,
            vec![(Slope::zero(), 1), (Slope::new(1, 1), 1)]
        );
    }

    #[test]
    fn unipotent_polygon() {
        // (T-1)^3: single slope 0 with multiplicity 3
        let ctx = ctx2();
        let a = t_linear(&ctx, 1, 0);
        let p = a.mul(&a).mul(&a);
        let ng = p.newton_polygon().unwrap();
        assert_eq!(ng.slopes, vec![(Slope::zero(), 3)]);
    }

    #[test]
    fn slope_factor_two_slopes() {
        let ctx = ctx2();
        let a = t_linear(&ctx, 1, 0);
        let b = t_linear(&ctx, 1, 1);
        let p = a.mul(&b);
        let factors = p.slope_factor(16).unwrap();
        assert_eq!(factors.len(), 2);
        assert_eq!(factors[0].0, Slope::zero());
        assert_eq!(factors[1].0, Slope::new(1, 1));
        // both factors pure, product recombines
        for (s, f) in &factors {
            let ng = f.newton_polygon().unwrap();
            assert_eq!(ng.slopes.len(), 1);
            assert_eq!(ng.slopes[0].0, *s);
        }
        let product = factors[0].1.mul(&factors[1].1);
        assert!(product.sub(&p).is_zero_known());
        // leftmost factor is exactly T - 1 here
        assert!(factors[0].1.sub(&a).is_zero_known());
    }

    #[test]
    fn slope_factor_half_integer_slope() {
        // (T^2 - 3t)(T - 5): slopes 0 and 1/2
        let ctx = ctx2();
        let lam = ScalarElem::from_i64(ctx.field(), 3);
        let quad = OrePoly::pure_block(&ctx, 1, 2, &lam).unwrap();
        let lin = t_linear(&ctx, 5, 0);
        let p = quad.mul(&lin);
        let factors = p.slope_factor(16).unwrap();
        assert_eq!(factors.len(), 2);
        assert_eq!(factors[0].0, Slope::zero());
        assert_eq!(factors[1].0, Slope::new(1, 2));
        let product = factors[0].1.mul(&factors[1].1);
        assert!(product
            .sub(&p)
            .coeffs()
            .iter()
            .all(|c| c.is_zero_known()));
    }

    #[test]
    fn split_high_left() {
        let ctx = ctx2();
        let a = t_linear(&ctx, 1, 0); // slope 0
        let b = t_linear(&ctx, 1, 1); // slope 1
        let p = a.mul(&b);
        // high-left split: p = G * H with G of slope 1, H of slope 0
        let (g, h) = p.split_at_vertex(1, false, 16).unwrap();
        let ng = g.newton_polygon().unwrap();
        let nh = h.newton_polygon().unwrap();
        assert_eq!(ng.slopes[0].0, Slope::new(1, 1));
        assert_eq!(nh.slopes[0].0, Slope::zero());
        let product = g.mul(&h);
        assert!(product.sub(&p).coeffs().iter().all(|c| c.is_zero_known()));
    }

    #[test]
    fn polygon_additivity_random_products() {
        use rand::{Rng, SeedableRng};
        let ctx = ctx2();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..40 {
            let params = |rng: &mut rand_chacha::ChaCha8Rng| {
                let s = rng.gen_range(1..4i64);
                let mut r = rng.gen_range(-3..4i64);
                while gcd_i64(r.unsigned_abs(), s as u64) != 1 {
                    r = rng.gen_range(-3..4i64);
                }
                let lam = rng.gen_range(1..6i64);
                (r, s, lam)
            };
            let (r1, s1, l1) = params(&mut rng);
            let (r2, s2, l2) = params(&mut rng);
            let f1 = OrePoly::pure_block(&ctx, r1, s1, &ScalarElem::from_i64(ctx.field(), l1))
                .unwrap();
            let f2 = OrePoly::pure_block(&ctx, r2, s2, &ScalarElem::from_i64(ctx.field(), l2))
                .unwrap();
            let prod = f1.mul(&f2);
            let mut expected = f1
                .newton_polygon()
                .unwrap()
                .slope_multiset();
            expected.extend(f2.newton_polygon().unwrap().slope_multiset());
            expected.sort();
            let mut got = prod.newton_polygon().unwrap().slope_multiset();
            got.sort();
            assert_eq!(expected, got, "f1 = {f1}, f2 = {f2}");
        }
    }

    #[test]
    fn insufficient_precision_detected() {
        let ctx = ctx2();
        let f0 = ctx.field();
        // T^2 + (0 mod t^0) T + t: the middle coefficient could dip below the
        // hull value 1/2 at abscissa 1... with bound 0 it is undetermined.
        let p = OrePoly::new(
            &ctx,
            vec![
                LaurentSeries::one(f0),
                LaurentSeries::zero_mod(f0, 0),
                LaurentSeries::monomial(ScalarElem::one(f0), 1),
            ],
        );
        assert!(matches!(
            p.newton_polygon(),
            Err(Error::InsufficientPrecision { .. })
        ));
        // with bound 1 the hull at abscissa 1 is 1/2 < 1, so it is fine
        let p2 = OrePoly::new(
            &ctx,
            vec![
                LaurentSeries::one(f0),
                LaurentSeries::zero_mod(f0, 1),
                LaurentSeries::monomial(ScalarElem::one(f0), 1),
            ],
        );
        assert!(p2.newton_polygon().is_ok());
    }
}
