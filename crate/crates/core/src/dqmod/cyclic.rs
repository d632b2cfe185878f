//! Cyclic vectors and the cyclic minimal polynomial: every D_q-module has a
//! vector v with v, Phi v, ..., Phi^{n-1} v a basis, exhibiting the module
//! as k((t))_q[T]/(f(T)).

use super::DqModule;
use crate::error::{Error, Result};
use crate::matrix::SeriesMat;
use crate::ore::OrePoly;
use crate::scalars::ScalarElem;
use crate::series::LaurentSeries;

/// Find a cyclic vector, together with the basis matrix
/// C = [v | Phi v | ... | Phi^{n-1} v]. The search sweeps standard basis
/// vectors, staggered t-power combinations, then seeded random small
/// polynomial vectors; failure indicates insufficient precision or an
/// exhausted candidate budget and reports the attempts.
pub fn cyclic_vector(m: &DqModule) -> Result<(Vec<LaurentSeries>, SeriesMat)> {
    let n = m.dim();
    let field = m.ctx().field().clone();
    let mut attempts = 0usize;

    let try_candidate =
        |v: &[LaurentSeries], attempts: &mut usize| -> Option<(Vec<LaurentSeries>, SeriesMat)> {
            *attempts += 1;
            let mat = iterate_basis(m, v);
            match mat.det() {
                Ok(d) if d.valuation().is_some() => Some((v.to_vec(), mat)),
                _ => None,
            }
        };

    // standard basis vectors
    for i in 0..n {
        let mut v = vec![LaurentSeries::zero(&field); n];
        v[i] = LaurentSeries::one(&field);
        if let Some(hit) = try_candidate(&v, &mut attempts) {
            return Ok(hit);
        }
    }
    // staggered t-powers (1, t^k, t^{2k}, ...)
    for k in 1..=2i64 {
        let v: Vec<LaurentSeries> = (0..n)
            .map(|i| LaurentSeries::monomial(ScalarElem::one(&field), k * i as i64))
            .collect();
        if let Some(hit) = try_candidate(&v, &mut attempts) {
            return Ok(hit);
        }
    }
    // seeded random small polynomial vectors
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x9d_1f);
    for _ in 0..40 {
        let v: Vec<LaurentSeries> = (0..n)
            .map(|_| {
                let mut terms = Vec::new();
                for e in 0..3i64 {
                    let c = rng.gen_range(-2..3i64);
                    if c != 0 {
                        terms.push((e, ScalarElem::from_i64(&field, c)));
                    }
                }
                LaurentSeries::from_terms(&field, &terms, crate::series::Prec::Exact)
            })
            .collect();
        if let Some(hit) = try_candidate(&v, &mut attempts) {
            return Ok(hit);
        }
    }
    Err(Error::precision(
        "cyclic_vector",
        format!("no cyclic vector among {attempts} candidates; existence is guaranteed, so the precision or search budget is too small"),
    ))
}

fn iterate_basis(m: &DqModule, v: &[LaurentSeries]) -> SeriesMat {
    let n = m.dim();
    let field = m.ctx().field();
    let mut cols: Vec<Vec<LaurentSeries>> = Vec::with_capacity(n);
    let mut cur = v.to_vec();
    for _ in 0..n {
        cols.push(cur.clone());
        cur = m.apply_phi(&cur);
    }
    SeriesMat::from_fn(field, n, n, |i, j| cols[j][i].clone())
}

/// The monic f with f(Phi) v = 0: solved as a linear system over the series
/// field in the cyclic basis.
pub fn cyclic_minpoly(m: &DqModule, v: &[LaurentSeries]) -> Result<OrePoly> {
    let n = m.dim();
    let ctx = m.ctx().clone();
    let basis = iterate_basis(m, v);
    let mut top = v.to_vec();
    for _ in 0..n {
        top = m.apply_phi(&top);
    }
    let rhs: Vec<LaurentSeries> = top.iter().map(|x| x.neg()).collect();
    let work = basis
        .min_precision()
        .or_else(|| {
            top.iter().filter_map(|x| x.prec().bound()).min()
        })
        .unwrap_or(ctx.default_precision());
    let x = basis
        .solve(&rhs, work)
        .map_err(|e| Error::precision("cyclic_minpoly", e.to_string()))?;
    // x[j] multiplies Phi^j v; the coefficient a_i of T^{n-i} is x[n-i].
    let mut coeffs = Vec::with_capacity(n + 1);
    coeffs.push(LaurentSeries::one(ctx.field()));
    for i in 1..=n {
        coeffs.push(x[n - i].clone());
    }
    let f = OrePoly::new(&ctx, coeffs);
    if f.coeff_a(n).valuation().is_none() {
        return Err(Error::precision(
            "cyclic_minpoly",
            "constant coefficient indistinguishable from zero".to_string(),
        ));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dqmod::tests::ctx_q;
    use crate::ore::Slope;
    use crate::scalars::ScalarElem;

    #[test]
    fn identity_module_minpoly() {
        // 2x2 identity with v = (1, t): f = T^2 - (q+1) T + q
        let ctx = ctx_q(2, 1);
        let field = ctx.field().clone();
        let m = DqModule::new(&ctx, crate::matrix::SeriesMat::identity(&field, 2)).unwrap();
        let v = vec![
            LaurentSeries::one(&field),
            LaurentSeries::monomial(ScalarElem::one(&field), 1),
        ];
        let basis = iterate_basis(&m, &v);
        let d = basis.det().unwrap();
        assert_eq!(d.valuation(), Some(1)); // (q-1) t
        let f = cyclic_minpoly(&m, &v).unwrap();
        assert_eq!(f.degree(), 2);
        assert_eq!(f.coeff_a(1).coeff(0), ScalarElem::from_i64(&field, -3));
        assert_eq!(f.coeff_a(2).coeff(0), ScalarElem::from_i64(&field, 2));
    }

    #[test]
    fn companion_recovers_defining_polynomial() {
        let ctx = ctx_q(2, 1);
        let field = ctx.field().clone();
        let lam = ScalarElem::from_i64(&field, 3);
        let m = DqModule::block_v(&ctx, 1, 2, &lam).unwrap();
        let (v, _) = cyclic_vector(&m).unwrap();
        // e_1 is cyclic for companion modules and is found first
        assert!(v[0].is_one());
        let f = cyclic_minpoly(&m, &v).unwrap();
        assert_eq!(f.degree(), 2);
        assert!(f.coeff_a(1).is_zero_known());
        assert_eq!(f.coeff_a(2).coeff(1), lam.neg());
    }

    #[test]
    fn jordan_block_minpoly() {
        let ctx = ctx_q(2, 1);
        let field = ctx.field().clone();
        let m = DqModule::block_j(&ctx, 2).unwrap();
        let (v, _) = cyclic_vector(&m).unwrap();
        let f = cyclic_minpoly(&m, &v).unwrap();
        // (T-1)^2 = T^2 - 2T + 1
        assert_eq!(f.coeff_a(1).coeff(0), ScalarElem::from_i64(&field, -2));
        assert_eq!(f.coeff_a(2).coeff(0), ScalarElem::from_i64(&field, 1));
    }

    #[test]
    fn polygon_of_direct_sum_is_union() {
        let ctx = ctx_q(2, 1);
        let field = ctx.field().clone();
        let a = DqModule::block_v(&ctx, 1, 1, &ScalarElem::from_i64(&field, 3)).unwrap();
        let b = DqModule::block_v(&ctx, -1, 2, &ScalarElem::from_i64(&field, 5)).unwrap();
        let s = a.direct_sum(&b).unwrap();
        let mut slopes = s.polygon().unwrap().slope_multiset();
        slopes.sort();
        assert_eq!(
            slopes,
            vec![Slope::new(-1, 2), Slope::new(-1, 2), Slope::new(1, 1)]
        );
        assert!(!s.is_semistable().unwrap());
        assert!(a.is_semistable().unwrap());
    }
}
