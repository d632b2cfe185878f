//! Exact polynomial factorization at desk scale: squarefree splitting,
//! rational roots, Kronecker interpolation over the rationals, and a
//! norm-based reduction (Trager) over extension towers.
//!
//! Degrees are capped (default 8 over the rationals); inputs beyond the cap
//! are rejected rather than approximated.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::poly::Poly;
use super::{ScalarElem, ScalarField};
use crate::error::{Error, Result};

/// Default factorization degree bound over the rationals.
pub const DEFAULT_DEGREE_BOUND: usize = 8;

/// Budget for Kronecker divisor-tuple enumeration.
const KRONECKER_BUDGET: usize = 4_000_000;

/// Monic irreducible factors with multiplicities, sorted canonically.
pub fn factor(poly: &Poly) -> Result<Vec<(Poly, usize)>> {
    factor_with_bound(poly, DEFAULT_DEGREE_BOUND)
}

pub fn factor_with_bound(poly: &Poly, bound: usize) -> Result<Vec<(Poly, usize)>> {
    if poly.is_zero() {
        return Err(Error::parameter("cannot factor the zero polynomial"));
    }
    if poly.degree() == 0 {
        return Ok(Vec::new());
    }
    let monic = poly.monic();
    let mut out: Vec<(Poly, usize)> = Vec::new();
    for (part, mult) in yun_squarefree(&monic)? {
        for p in factor_squarefree(&part, bound)? {
            out.push((p, mult));
        }
    }
    out.sort_by(|(a, _), (b, _)| {
        a.degree().cmp(&b.degree()).then_with(|| cmp_polys(a, b))
    });
    Ok(out)
}

fn cmp_polys(a: &Poly, b: &Poly) -> std::cmp::Ordering {
    for i in (0..=a.degree().max(b.degree())).rev() {
        match a.coeff(i).canonical_cmp(&b.coeff(i)) {
            std::cmp::Ordering::Equal => continue,
            ord => return ord,
        }
    }
    std::cmp::Ordering::Equal
}

/// Roots of the polynomial inside its own coefficient field, with
/// multiplicity.
pub fn roots_in(poly: &Poly) -> Result<Vec<ScalarElem>> {
    let mut roots = Vec::new();
    for (p, mult) in factor(poly)? {
        if p.degree() == 1 {
            let r = p.coeff(0).neg();
            for _ in 0..mult {
                roots.push(r.clone());
            }
        }
    }
    Ok(roots)
}

/// True iff the monic polynomial has no nontrivial monic factorization over
/// the field of its coefficients.
pub fn irreducible_over(f: &Poly, field: &ScalarField) -> Result<bool> {
    let lifted = f.lift_to(field)?;
    Ok(irreducibility_witness(&lifted)?.is_none())
}

/// None when irreducible; otherwise a nontrivial monic factor.
pub fn irreducibility_witness(f: &Poly) -> Result<Option<Poly>> {
    if f.degree() < 1 {
        return Err(Error::parameter("irreducibility is asked of degree >= 1"));
    }
    if f.degree() == 1 {
        return Ok(None);
    }
    let factors = factor(f)?;
    if factors.len() == 1 && factors[0].1 == 1 {
        Ok(None)
    } else {
        Ok(Some(factors[0].0.clone()))
    }
}

/// Yun's squarefree decomposition (characteristic zero): returns pairs
/// (squarefree monic part, multiplicity).
fn yun_squarefree(f: &Poly) -> Result<Vec<(Poly, usize)>> {
    let mut out = Vec::new();
    let df = f.derivative();
    let g = f.gcd(&df);
    if g.degree() == 0 {
        out.push((f.monic(), 1));
        return Ok(out);
    }
    let (mut w, _) = f.divmod(&g)?;
    let (mut y, _) = df.divmod(&g)?;
    let mut z = y.sub(&w.derivative());
    let mut i = 1usize;
    while w.degree() > 0 {
        let gi = w.gcd(&z);
        if gi.degree() > 0 {
            out.push((gi.monic(), i));
        }
        let (w2, _) = w.divmod(&gi)?;
        let (y2, _) = z.divmod(&gi)?;
        w = w2;
        y = y2;
        z = y.sub(&w.derivative());
        i += 1;
    }
    Ok(out)
}

fn factor_squarefree(f: &Poly, bound: usize) -> Result<Vec<Poly>> {
    if f.degree() <= 1 {
        return Ok(vec![f.monic()]);
    }
    if f.field().is_rationals() {
        factor_squarefree_rational(f, bound)
    } else {
        factor_squarefree_trager(f, bound)
    }
}

fn factor_squarefree_rational(f: &Poly, bound: usize) -> Result<Vec<Poly>> {
    if f.degree() > bound {
        return Err(Error::UnsupportedDegree { degree: f.degree(), bound });
    }
    let field = f.field().clone();
    let mut out = Vec::new();
    let mut rest = f.monic();

    // Rational roots from divisors of the primitive constant and leading
    // coefficients.
    for r in rational_roots(&rest)? {
        let lin = Poly::new(
            field.clone(),
            vec![ScalarElem::from_rational(&field, -r.clone()), ScalarElem::one(&field)],
        );
        let (q, rem) = rest.divmod(&lin)?;
        debug_assert!(rem.is_zero());
        out.push(lin);
        rest = q.monic();
    }
    if rest.degree() == 0 {
        return Ok(out);
    }
    if rest.degree() <= 3 {
        // Root-free degree 2 or 3 is irreducible.
        out.push(rest);
        return Ok(out);
    }
    out.extend(kronecker_factor(&rest)?);
    Ok(out)
}

/// All rational roots of a squarefree rational polynomial.
fn rational_roots(f: &Poly) -> Result<Vec<BigRational>> {
    let (prim, _) = f
        .primitive_integer()
        .ok_or_else(|| Error::parameter("rational factorization of non-rational input"))?;
    if prim.len() < 2 {
        return Ok(Vec::new());
    }
    let mut roots = Vec::new();
    let a0 = &prim[0];
    let an = prim.last().unwrap();
    if a0.is_zero() {
        roots.push(BigRational::zero());
    }
    let nums = if a0.is_zero() { vec![BigInt::one()] } else { divisors(&a0.abs())? };
    let dens = divisors(&an.abs())?;
    for p in &nums {
        for q in &dens {
            for sign in [1i64, -1] {
                let cand = BigRational::new(p * BigInt::from(sign), q.clone());
                if !cand.is_integer() && cand.denom().is_one() {
                    continue;
                }
                let val = f.eval(&ScalarElem::from_rational(f.field(), cand.clone()));
                if val.is_zero() && !roots.contains(&cand) {
                    roots.push(cand);
                }
            }
        }
    }
    Ok(roots)
}

/// Kronecker interpolation factoring for a squarefree, root-free rational
/// polynomial of degree >= 4 within the degree bound.
fn kronecker_factor(f: &Poly) -> Result<Vec<Poly>> {
    let field = f.field().clone();
    let (prim, _) = f.primitive_integer().expect("rational input");
    match kronecker_split(&prim)? {
        None => Ok(vec![f.monic()]),
        Some((g, h)) => {
            let gp = Poly::new(
                field.clone(),
                g.iter().map(|c| ScalarElem::from_rational(&field, BigRational::from(c.clone()))).collect(),
            );
            let hp = Poly::new(
                field.clone(),
                h.iter().map(|c| ScalarElem::from_rational(&field, BigRational::from(c.clone()))).collect(),
            );
            let mut out = kronecker_factor(&gp.monic())?;
            out.extend(kronecker_factor(&hp.monic())?);
            Ok(out)
        }
    }
}

/// One Kronecker splitting step on a primitive integer polynomial.
fn kronecker_split(prim: &[BigInt]) -> Result<Option<(Vec<BigInt>, Vec<BigInt>)>> {
    let n = prim.len() - 1;
    let eval = |x: i64| -> BigInt {
        let mut acc = BigInt::zero();
        for c in prim.iter().rev() {
            acc = acc * BigInt::from(x) + c;
        }
        acc
    };
    // Sample points ordered by |value|, skipping roots (handled earlier).
    let mut points: Vec<(i64, BigInt)> = Vec::new();
    let mut x = 0i64;
    while points.len() < n + 3 {
        for cand in [x, -x] {
            if cand == 0 && x != 0 {
                continue;
            }
            let v = eval(cand);
            if !v.is_zero() && !points.iter().any(|(p, _)| *p == cand) {
                points.push((cand, v));
            }
        }
        x += 1;
    }
    points.sort_by(|a, b| a.1.abs().cmp(&b.1.abs()));

    for d in 2..=(n / 2) {
        let pts = &points[..=d];
        let mut divisor_lists: Vec<Vec<BigInt>> = Vec::new();
        let mut budget: usize = 1;
        let mut feasible = true;
        for (_, v) in pts {
            let divs = divisors(&v.abs())?;
            let count = divs.len() * 2;
            budget = budget.saturating_mul(count);
            if budget > KRONECKER_BUDGET {
                feasible = false;
                break;
            }
            let mut signed = Vec::with_capacity(count);
            for dv in divs {
                signed.push(dv.clone());
                signed.push(-dv);
            }
            divisor_lists.push(signed);
        }
        if !feasible {
            return Err(Error::parameter(format!(
                "factorization budget exceeded at degree {d} split"
            )));
        }
        let xs: Vec<i64> = pts.iter().map(|(x, _)| *x).collect();
        let mut idx = vec![0usize; d + 1];
        'outer: loop {
            let ys: Vec<BigInt> =
                idx.iter().zip(&divisor_lists).map(|(&i, l)| l[i].clone()).collect();
            if let Some(g) = integer_interpolate(&xs, &ys) {
                if g.len() == d + 1 {
                    if let Some(h) = integer_poly_divide(prim, &g) {
                        let g = normalize_sign(g);
                        let h = normalize_sign(h);
                        return Ok(Some((g, h)));
                    }
                }
            }
            // advance the tuple
            for pos in 0..=d {
                idx[pos] += 1;
                if idx[pos] < divisor_lists[pos].len() {
                    continue 'outer;
                }
                idx[pos] = 0;
            }
            break;
        }
    }
    Ok(None)
}

fn normalize_sign(mut p: Vec<BigInt>) -> Vec<BigInt> {
    if p.last().map(|c| c.is_negative()).unwrap_or(false) {
        for c in &mut p {
            *c = -c.clone();
        }
    }
    p
}

/// Interpolate integer values at integer points; None when the result is not
/// an integer polynomial.
fn integer_interpolate(xs: &[i64], ys: &[BigInt]) -> Option<Vec<BigInt>> {
    // Newton divided differences over the rationals, then integrality check.
    let n = xs.len();
    let mut table: Vec<BigRational> = ys.iter().map(|y| BigRational::from(y.clone())).collect();
    for level in 1..n {
        for i in (level..n).rev() {
            let dx = BigRational::from(BigInt::from(xs[i] - xs[i - level]));
            table[i] = (table[i].clone() - table[i - 1].clone()) / dx;
        }
    }
    // Expand Newton form to monomial coefficients.
    let mut coeffs: Vec<BigRational> = vec![BigRational::zero(); n];
    for i in (0..n).rev() {
        // multiply running polynomial by (x - xs[i]) and add table[i]
        let mut next = vec![BigRational::zero(); n];
        for j in (1..n).rev() {
            next[j] = coeffs[j - 1].clone();
        }
        for j in 0..n {
            next[j] -= BigRational::from(BigInt::from(xs[i])) * coeffs[j].clone();
        }
        next[0] += table[i].clone();
        coeffs = next;
    }
    let mut out = Vec::with_capacity(n);
    for c in coeffs {
        if !c.is_integer() {
            return None;
        }
        out.push(c.to_integer());
    }
    while out.last().map(|c| c.is_zero()).unwrap_or(false) {
        out.pop();
    }
    if out.is_empty() {
        None
    } else {
        Some(out)
    }
}

/// Exact division of integer polynomials; None when not divisible.
fn integer_poly_divide(num: &[BigInt], den: &[BigInt]) -> Option<Vec<BigInt>> {
    let dn = num.len() - 1;
    let dd = den.len() - 1;
    if dd > dn || den.last().unwrap().is_zero() {
        return None;
    }
    let mut rem: Vec<BigInt> = num.to_vec();
    let mut quot = vec![BigInt::zero(); dn - dd + 1];
    let lead = den.last().unwrap();
    for k in (0..=(dn - dd)).rev() {
        let top = rem[k + dd].clone();
        if (&top % lead).is_zero() {
            let c = top / lead;
            for i in 0..=dd {
                rem[k + i] -= &c * &den[i];
            }
            quot[k] = c;
        } else {
            return None;
        }
    }
    if rem.iter().all(|c| c.is_zero()) {
        Some(quot)
    } else {
        None
    }
}

/// All positive divisors. Trial division with a hard stop: values whose
/// cofactor cannot be certified prime are rejected.
fn divisors(n: &BigInt) -> Result<Vec<BigInt>> {
    const TRIAL_LIMIT: u64 = 1 << 20;
    if n.is_zero() {
        return Err(Error::parameter("divisors of zero requested"));
    }
    let mut n = n.abs();
    let mut primes: Vec<(BigInt, u32)> = Vec::new();
    let mut p = BigInt::from(2u32);
    let limit = BigInt::from(TRIAL_LIMIT);
    while &(&p * &p) <= &n && p <= limit {
        if (&n % &p).is_zero() {
            let mut e = 0u32;
            while (&n % &p).is_zero() {
                n /= &p;
                e += 1;
            }
            primes.push((p.clone(), e));
        }
        p += 1u32;
    }
    if !n.is_one() {
        if &(&limit * &limit) < &n {
            return Err(Error::parameter(format!(
                "integer {n} too hard to factor for divisor enumeration"
            )));
        }
        primes.push((n, 1));
    }
    let mut divs = vec![BigInt::one()];
    for (p, e) in primes {
        let mut next = Vec::with_capacity(divs.len() * (e as usize + 1));
        for d in &divs {
            let mut pk = BigInt::one();
            for _ in 0..=e {
                next.push(d * &pk);
                pk *= &p;
            }
        }
        divs = next;
    }
    divs.sort();
    divs.dedup();
    Ok(divs)
}

/// Trager reduction: factor a squarefree polynomial over an extension by
/// factoring a squarefree norm over the parent and pulling factors back
/// through gcds.
fn factor_squarefree_trager(f: &Poly, bound: usize) -> Result<Vec<Poly>> {
    let field = f.field().clone();
    let beta = field.generator()?;

    for attempt in 0..12i64 {
        let s = if attempt % 2 == 0 { attempt / 2 } else { -(attempt / 2 + 1) };
        let shift = beta.mul(&ScalarElem::from_i64(&field, s)).neg();
        let shifted = f.shift_argument(&shift); // f(x - s*beta)
        let norm = norm_to_parent(&shifted)?;
        if norm.gcd(&norm.derivative()).degree() != 0 {
            continue;
        }
        let norm_factors = factor_squarefree(&norm, bound)?;
        if norm_factors.len() == 1 {
            return Ok(vec![f.monic()]);
        }
        let mut out = Vec::new();
        let mut rest = f.monic();
        for h in &norm_factors {
            if rest.degree() == 0 {
                break;
            }
            let lifted = h.lift_to(&field)?;
            let unshifted = lifted.shift_argument(&beta.mul(&ScalarElem::from_i64(&field, s)));
            let g = rest.gcd(&unshifted);
            if g.degree() > 0 {
                let (q, _) = rest.divmod(&g)?;
                rest = q.monic();
                out.push(g.monic());
            }
        }
        if rest.degree() > 0 {
            out.push(rest);
        }
        let mut product = Poly::one(&field);
        for g in &out {
            product = product.mul(g);
        }
        if product == f.monic() {
            out.sort_by(cmp_polys);
            return Ok(out);
        }
        // fall through to the next shift on bookkeeping mismatch
    }
    Err(Error::parameter(format!(
        "norm-based factorization over {} failed to find a squarefree shift",
        field.describe()
    )))
}

/// Norm from K[x] down to parent[x]: resultant in the generator, computed by
/// evaluation and interpolation.
fn norm_to_parent(f: &Poly) -> Result<Poly> {
    let field = f.field().clone();
    let parent = field.parent().expect("extension").clone();
    let m = field.minimal_polynomial().expect("extension");
    let e = field.degree();
    let target = f.degree() * e;

    let mut xs: Vec<i64> = Vec::with_capacity(target + 1);
    let mut k = 0i64;
    while xs.len() < target + 1 {
        xs.push(k);
        if xs.len() < target + 1 && k > 0 {
            xs.push(-k);
        }
        k += 1;
    }
    let mut vals = Vec::with_capacity(xs.len());
    for &x0 in &xs {
        let v = f.eval(&ScalarElem::from_i64(&field, x0));
        // v as a polynomial in the generator over the parent field
        let py = Poly::new(parent.clone(), v.coords());
        vals.push(m.resultant(&py));
    }
    Ok(lagrange_interpolate(&parent, &xs, &vals))
}

fn lagrange_interpolate(field: &ScalarField, xs: &[i64], ys: &[ScalarElem]) -> Poly {
    let mut acc = Poly::zero(field);
    for (i, &xi) in xs.iter().enumerate() {
        let mut num = Poly::one(field);
        let mut den = ScalarElem::one(field);
        for (j, &xj) in xs.iter().enumerate() {
            if i == j {
                continue;
            }
            num = num.mul(&Poly::new(
                field.clone(),
                vec![ScalarElem::from_i64(field, -xj), ScalarElem::one(field)],
            ));
            den = den.mul(&ScalarElem::from_i64(field, xi - xj));
        }
        let scale = ys[i].mul(&den.inv().expect("distinct points"));
        acc = acc.add(&num.scale(&scale));
    }
    acc
}

/// Minimal polynomial over `base` of an element living anywhere in the
/// tower, found as the first linear dependence among its powers.
pub fn minimal_polynomial_over(elem: &ScalarElem, base: &ScalarField) -> Result<Poly> {
    if !elem.field().extends(base) {
        return Err(Error::parameter("element does not live over the requested base"));
    }
    let dim = elem.field().absolute_degree() / base.absolute_degree();
    let mut powers: Vec<Vec<ScalarElem>> = Vec::new();
    let mut acc = ScalarElem::one(elem.field());
    for _ in 0..=dim {
        powers.push(acc.coords_over(base)?);
        acc = acc.mul(elem);
    }
    // Find the least d with power_d in the span of lower powers.
    for d in 1..=dim {
        if let Some(combo) = solve_linear_combo(base, &powers[..d], &powers[d]) {
            let mut coeffs: Vec<ScalarElem> = combo.into_iter().map(|c| c.neg()).collect();
            coeffs.push(ScalarElem::one(base));
            return Ok(Poly::new(base.clone(), coeffs));
        }
    }
    Err(Error::internal("minimal_polynomial_over", "no dependence found within tower degree"))
}

/// Solve sum c_i basis_i = target over the given field by Gaussian
/// elimination on coordinates; None when the target is outside the span.
fn solve_linear_combo(
    field: &ScalarField,
    basis: &[Vec<ScalarElem>],
    target: &[ScalarElem],
) -> Option<Vec<ScalarElem>> {
    let rows = target.len();
    let cols = basis.len();
    // Augmented matrix, column-major candidate solve.
    let mut m: Vec<Vec<ScalarElem>> = Vec::with_capacity(rows);
    for r in 0..rows {
        let mut row: Vec<ScalarElem> = Vec::with_capacity(cols + 1);
        for b in basis {
            row.push(b.get(r).cloned().unwrap_or_else(|| ScalarElem::zero(field)));
        }
        row.push(target[r].clone());
        m.push(row);
    }
    let mut pivot_cols = Vec::new();
    let mut r0 = 0usize;
    for c in 0..cols {
        let Some(pr) = (r0..rows).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(r0, pr);
        let inv = m[r0][c].inv().ok()?;
        for x in m[r0].clone().iter().enumerate() {
            m[r0][x.0] = x.1.mul(&inv);
        }
        for r in 0..rows {
            if r != r0 && !m[r][c].is_zero() {
                let factor = m[r][c].clone();
                for cc in 0..=cols {
                    let t = m[r0][cc].mul(&factor);
                    m[r][cc] = m[r][cc].sub(&t);
                }
            }
        }
        pivot_cols.push(c);
        r0 += 1;
        if r0 == rows {
            break;
        }
    }
    // Consistency: no row of the form (0 ... 0 | nonzero).
    for r in r0..rows {
        if !m[r][cols].is_zero() {
            return None;
        }
    }
    let mut combo = vec![ScalarElem::zero(field); cols];
    for (i, &c) in pivot_cols.iter().enumerate() {
        combo[c] = m[i][cols].clone();
    }
    Some(combo)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> ScalarField {
        ScalarField::rationals()
    }

    #[test]
    fn irreducibles_over_q() {
        let f = q();
        assert!(irreducible_over(&Poly::from_i64(&f, &[1, 0, 1]), &f).unwrap()); // x^2+1
        assert!(!irreducible_over(&Poly::from_i64(&f, &[-4, 0, 1]), &f).unwrap()); // x^2-4
        assert!(irreducible_over(&Poly::from_i64(&f, &[-2, 0, 0, 1]), &f).unwrap()); // x^3-2
    }

    #[test]
    fn cubic_over_quadratic_extension() {
        // x^3 - 2 has no root in Q(sqrt2), so it stays irreducible there.
        let f = q();
        let k = f.extend(&Poly::from_i64(&f, &[-2, 0, 1]), "a").unwrap();
        let cubic = Poly::from_i64(&f, &[-2, 0, 0, 1]).lift_to(&k).unwrap();
        assert!(irreducible_over(&cubic, &k).unwrap());
    }

    #[test]
    fn splits_over_matching_extension() {
        let f = q();
        let k = f.extend(&Poly::from_i64(&f, &[-2, 0, 1]), "a").unwrap();
        let a = k.generator().unwrap();
        let quad = Poly::from_i64(&f, &[-2, 0, 1]).lift_to(&k).unwrap();
        let mut roots = roots_in(&quad).unwrap();
        roots.sort_by(|x, y| x.canonical_cmp(y));
        assert_eq!(roots, vec![a.neg(), a.clone()]);
    }

    #[test]
    fn quartic_factorization() {
        let f = q();
        // (x^2+1)(x^2-2)
        let p = Poly::from_i64(&f, &[1, 0, 1]).mul(&Poly::from_i64(&f, &[-2, 0, 1]));
        let factors = factor(&p).unwrap();
        assert_eq!(factors.len(), 2);
        assert!(factors.iter().all(|(g, m)| g.degree() == 2 && *m == 1));
    }

    #[test]
    fn multiplicities_tracked() {
        let f = q();
        let p = Poly::from_i64(&f, &[-1, 1]).pow(3).mul(&Poly::from_i64(&f, &[1, 0, 1]));
        let factors = factor(&p).unwrap();
        let cubic_mult = factors.iter().find(|(g, _)| g.degree() == 1).unwrap().1;
        assert_eq!(cubic_mult, 3);
    }

    #[test]
    fn degree_bound_enforced() {
        let f = q();
        // x^9 + x + 1 is beyond the default bound.
        let mut coeffs = vec![0i64; 10];
        coeffs[0] = 1;
        coeffs[1] = 1;
        coeffs[9] = 1;
        let p = Poly::from_i64(&f, &coeffs);
        match factor(&p) {
            Err(Error::UnsupportedDegree { degree: 9, bound: 8 }) => {}
            other => panic!("expected UnsupportedDegree, got {other:?}"),
        }
    }

    #[test]
    fn brute_force_agreement_low_degree() {
        // irreducible_over agrees with exhaustive divisor search for small
        // integer polynomials of degree <= 4.
        let f = q();
        let cases: Vec<(Vec<i64>, bool)> = vec![
            (vec![1, 0, 1], true),
            (vec![-4, 0, 1], false),
            (vec![2, 3, 1], false),        // (x+1)(x+2)
            (vec![1, 1, 1, 1], false),     // (x+1)(x^2+1)
            (vec![1, 1, 0, 0, 1], true),   // x^4+x+1
            (vec![4, 0, 0, 0, 1], false),  // x^4+4 = (x^2-2x+2)(x^2+2x+2)
            (vec![-2, 0, 0, 0, 1], true),  // x^4-2
        ];
        for (coeffs, expect) in cases {
            let p = Poly::from_i64(&f, &coeffs);
            assert_eq!(
                irreducible_over(&p, &f).unwrap(),
                expect,
                "disagreement on {coeffs:?}"
            );
        }
    }

    #[test]
    fn minimal_polynomial_of_tower_element() {
        let f = q();
        let k = f.extend(&Poly::from_i64(&f, &[-2, 0, 1]), "a").unwrap();
        let a = k.generator().unwrap();
        let mp = minimal_polynomial_over(&a, &f).unwrap();
        assert_eq!(mp, Poly::from_i64(&f, &[-2, 0, 1]));
        // 1 + a has minimal polynomial x^2 - 2x - 1.
        let e = ScalarElem::one(&k).add(&a);
        let mp2 = minimal_polynomial_over(&e, &f).unwrap();
        assert_eq!(mp2, Poly::from_i64(&f, &[-1, -2, 1]));
        // A rational element has a linear minimal polynomial.
        let r = ScalarElem::from_i64(&k, 5);
        let mp3 = minimal_polynomial_over(&r, &f).unwrap();
        assert_eq!(mp3, Poly::from_i64(&f, &[-5, 1]));
    }
}
