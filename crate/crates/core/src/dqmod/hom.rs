//! Morphism spaces between D_q-modules: exact k-bases of the solutions of
//! rho g_a = g_b sigma_q(rho) with t-support confined to a window, and the
//! isomorphism test that searches the space for an invertible element.
//!
//! The solver unrolls the matrix equation into one sparse linear system over
//! the scalar field, with unknowns the coefficient matrices of rho at each
//! t-order, and eliminates rows in t-order so fill-in stays inside the band.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::matrix::SeriesMat;
use crate::scalars::ScalarElem;
use crate::series::LaurentSeries;

use super::DqModule;

/// A computed space of morphisms a -> b.
#[derive(Clone, Debug)]
pub struct HomSpace {
    /// k-basis of solutions rho (n_b x n_a series matrices).
    pub basis: Vec<SeriesMat>,
    pub dim: usize,
    /// Support window [-b, b + n_extra] used for rho entries.
    pub window_lo: i64,
    pub window_hi: i64,
    /// Precision the equations were imposed to.
    pub precision: i64,
    /// No basis element touches the window boundary; for canonical-built
    /// inputs with the recommended window the dimension is then exact,
    /// otherwise it is a within-window count.
    pub certified: bool,
}

/// The default support half-width from the spec rule
/// B = n (1 + slope spread) + margin, where the spread is the numerator
/// span of the two polygons' slopes.
pub fn recommended_window(a: &DqModule, b: &DqModule) -> i64 {
    let n = a.dim().max(b.dim()) as i64;
    let mut spread = 0i64;
    for m in [a, b] {
        if let Ok(ng) = m.polygon() {
            for (s, _) in &ng.slopes {
                let mag = s.num.abs() + (s.den - 1);
                spread = spread.max(mag);
            }
        }
    }
    n * (1 + spread) + 4
}

/// Solve for Hom(a, b) inside the support window [-window, window + N].
pub fn hom_space(a: &DqModule, b: &DqModule, window: i64) -> Result<HomSpace> {
    if a.ctx() != b.ctx() {
        return Err(Error::parameter("hom across different contexts"));
    }
    let ctx = a.ctx().clone();
    let field = ctx.field().clone();
    let na = a.dim();
    let nb = b.dim();
    let ga = a.matrix();
    let gb = b.matrix();

    // knowledge bounds of the two matrices
    let prec_a = ga.min_precision();
    let prec_b = gb.min_precision();
    let n_work = match (prec_a, prec_b) {
        (None, None) => ctx.default_precision(),
        (pa, pb) => pa.unwrap_or(i64::MAX).min(pb.unwrap_or(i64::MAX)),
    };

    let w_lo = -window;
    let w_hi = window + n_work;

    // support range of known coefficients of g_a, g_b
    let mut min_exp = i64::MAX;
    let mut max_exp = i64::MIN;
    for m in [ga, gb] {
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                for (e, _) in m.at(i, j).terms() {
                    min_exp = min_exp.min(e);
                    max_exp = max_exp.max(e);
                }
            }
        }
    }
    if min_exp > max_exp {
        return Err(Error::parameter("zero module matrices"));
    }

    // Equation at t-order tau: sum_w X_w A_{tau - w} - q^w B_{tau - w} X_w = 0.
    // It is imposable when every referenced coefficient is known:
    // tau - w_lo < min known precision (truncated case only).
    let exact = prec_a.is_none() && prec_b.is_none();
    let tau_lo = w_lo + min_exp;
    let tau_hi = if exact {
        w_hi + max_exp + 1
    } else {
        // all contributions known: tau - w < N_work for w >= w_lo
        w_lo + n_work
    };

    // unknown index: (w - w_lo) * (nb*na) + i * na + j for X_w[i][j]
    let layer = nb * na;
    let unknown_count = ((w_hi - w_lo + 1) as usize) * layer;
    let uidx = |w: i64, i: usize, j: usize| -> usize {
        ((w - w_lo) as usize) * layer + i * na + j
    };

    // sparse echelon rows keyed by leading unknown
    let mut echelon: BTreeMap<usize, BTreeMap<usize, ScalarElem>> = BTreeMap::new();

    let mut reduce_and_insert = |mut row: BTreeMap<usize, ScalarElem>| {
        loop {
            let Some((&lead, _)) = row.iter().next() else { return };
            match echelon.get(&lead) {
                None => {
                    // normalize leading to 1
                    let inv = row[&lead].inv().expect("nonzero");
                    for v in row.values_mut() {
                        *v = v.mul(&inv);
                    }
                    echelon.insert(lead, row);
                    return;
                }
                Some(pivot_row) => {
                    let c = row[&lead].clone();
                    let pivot_row = pivot_row.clone();
                    for (k, v) in pivot_row {
                        let t = v.mul(&c);
                        match row.get_mut(&k) {
                            Some(x) => {
                                *x = x.sub(&t);
                                if x.is_zero() {
                                    row.remove(&k);
                                }
                            }
                            None => {
                                row.insert(k, t.neg());
                            }
                        }
                    }
                }
            }
        }
    };

    for tau in tau_lo..tau_hi {
        // rows indexed by (i, k) entries of the nb x na matrix equation
        for i in 0..nb {
            for k in 0..na {
                let mut row: BTreeMap<usize, ScalarElem> = BTreeMap::new();
                // [X_w * A_{tau-w}]_{ik} = sum_l X_w[i][l] A[l][k]
                for l in 0..na {
                    for (e, c) in ga.at(l, k).terms() {
                        let w = tau - e;
                        if w < w_lo || w > w_hi {
                            continue;
                        }
                        let idx = uidx(w, i, l);
                        let entry = row.entry(idx).or_insert_with(|| ScalarElem::zero(&field));
                        *entry = entry.add(c);
                    }
                }
                // -[B_{tau-w} q^w X_w]_{ik} = -sum_l B[i][l] q^w X_w[l][k]
                for l in 0..nb {
                    for (e, c) in gb.at(i, l).terms() {
                        let w = tau - e;
                        if w < w_lo || w > w_hi {
                            continue;
                        }
                        let coeff = c.mul(&ctx.q_pow(w));
                        let idx = uidx(w, l, k);
                        let entry = row.entry(idx).or_insert_with(|| ScalarElem::zero(&field));
                        *entry = entry.sub(&coeff);
                    }
                }
                row.retain(|_, v| !v.is_zero());
                if !row.is_empty() {
                    reduce_and_insert(row);
                }
            }
        }
    }

    // free unknowns = those never leading
    let mut basis = Vec::new();
    for free in 0..unknown_count {
        if echelon.contains_key(&free) {
            continue;
        }
        let mut x: BTreeMap<usize, ScalarElem> = BTreeMap::new();
        x.insert(free, ScalarElem::one(&field));
        // back-substitute in decreasing leading order
        for (&lead, row) in echelon.iter().rev() {
            let mut acc = ScalarElem::zero(&field);
            for (&k, v) in row {
                if k == lead {
                    continue;
                }
                if let Some(xv) = x.get(&k) {
                    acc = acc.add(&v.mul(xv));
                }
            }
            if !acc.is_zero() {
                x.insert(lead, acc.neg());
            }
        }
        // assemble the series matrix
        let mut rho = SeriesMat::zero(&field, nb, na);
        for (&idx, v) in &x {
            let w = w_lo + (idx / layer) as i64;
            let rem = idx % layer;
            let (i, j) = (rem / na, rem % na);
            let mono = LaurentSeries::monomial(v.clone(), w);
            *rho.at_mut(i, j) = rho.at(i, j).add(&mono);
        }
        let rho = rho.map(|e| {
            if exact {
                e.clone()
            } else {
                e.truncate(w_hi + 1)
            }
        });
        basis.push((x, rho));
    }

    // boundary-touch certification
    let mut certified = true;
    for (x, _) in &basis {
        for &idx in x.keys() {
            let w = w_lo + (idx / layer) as i64;
            if w == w_lo || w == w_hi {
                certified = false;
            }
        }
    }

    let dim = basis.len();
    Ok(HomSpace {
        basis: basis.into_iter().map(|(_, r)| r).collect(),
        dim,
        window_lo: w_lo,
        window_hi: w_hi,
        precision: n_work,
        certified,
    })
}

/// Verify rho g_a = g_b sigma(rho) on jointly-known coefficients.
pub fn is_morphism(a: &DqModule, b: &DqModule, rho: &SeriesMat) -> bool {
    let lhs = rho.mul(a.matrix());
    let rhs = b.matrix().mul(&rho.sigma_q(a.ctx()));
    lhs.agrees_with(&rhs)
}

/// Search Hom(a, b) for an invertible element: basis elements first, then
/// seeded random small combinations. Returns a witness certified invertible
/// at the working precision, or None when the window holds no invertible
/// morphism. The window widens automatically once if a solution touches the
/// boundary.
pub fn isom_test(a: &DqModule, b: &DqModule) -> Result<Option<SeriesMat>> {
    if a.dim() != b.dim() {
        return Err(Error::parameter("isomorphism test needs equal dimensions"));
    }
    let mut window = recommended_window(a, b);
    for _ in 0..2 {
        let hom = hom_space(a, b, window)?;
        if let Some(w) = find_invertible(a, b, &hom)? {
            return Ok(Some(w));
        }
        if hom.certified {
            return Ok(None);
        }
        window *= 2;
    }
    Ok(None)
}

fn find_invertible(a: &DqModule, b: &DqModule, hom: &HomSpace) -> Result<Option<SeriesMat>> {
    use rand::{Rng, SeedableRng};
    if hom.dim == 0 {
        return Ok(None);
    }
    let field = a.ctx().field().clone();
    let invertible = |rho: &SeriesMat| -> bool {
        matches!(rho.det(), Ok(d) if d.valuation().is_some()) && is_morphism(a, b, rho)
    };
    for rho in &hom.basis {
        if invertible(rho) {
            return Ok(Some(rho.clone()));
        }
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x150_3);
    for _ in 0..25 {
        let mut acc = SeriesMat::zero(&field, hom.basis[0].rows(), hom.basis[0].cols());
        for rho in &hom.basis {
            let c = rng.gen_range(-3..4i64);
            if c != 0 {
                acc = acc.add(&rho.map(|e| {
                    e.scale(&ScalarElem::from_i64(&field, c))
                }));
            }
        }
        if invertible(&acc) {
            return Ok(Some(acc));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dqmod::tests::{ctx_q, random_unimodular};
    use crate::scalars::ScalarElem;

    #[test]
    fn end_of_irreducible_block_is_one_dimensional() {
        let ctx = ctx_q(2, 1);
        let lam = ScalarElem::from_i64(ctx.field(), 3);
        for (r, s) in [(0i64, 1i64), (1, 1), (1, 2), (-1, 2), (1, 3)] {
            let v = DqModule::block_v(&ctx, r, s, &lam).unwrap();
            let hom = hom_space(&v, &v, recommended_window(&v, &v)).unwrap();
            assert_eq!(hom.dim, 1, "End V_({r},{s})");
            assert!(hom.certified);
        }
    }

    #[test]
    fn end_of_jordan_tensor_block() {
        let ctx = ctx_q(2, 1);
        let lam = ScalarElem::from_i64(ctx.field(), 3);
        for d in 1..=3i64 {
            let j = DqModule::block_j(&ctx, d).unwrap();
            let v = DqModule::block_v(&ctx, 1, 1, &lam).unwrap();
            let m = j.tensor(&v).unwrap();
            let hom = hom_space(&m, &m, recommended_window(&m, &m)).unwrap();
            assert_eq!(hom.dim, d as usize, "End(J_{d} (x) V_(1,1))");
        }
    }

    #[test]
    fn hom_between_q_shifted_lines() {
        let ctx = ctx_q(2, 1);
        let field = ctx.field().clone();
        let lam = ScalarElem::from_i64(&field, 3);
        let a = DqModule::block_v(&ctx, 0, 1, &lam).unwrap();
        let b = DqModule::block_v(&ctx, 0, 1, &ScalarElem::from_i64(&field, 6)).unwrap();
        let hom = hom_space(&a, &b, recommended_window(&a, &b)).unwrap();
        assert_eq!(hom.dim, 1);
        // against an unrelated class the space vanishes
        let c = DqModule::block_v(&ctx, 0, 1, &ScalarElem::from_i64(&field, 5)).unwrap();
        let hom0 = hom_space(&a, &c, recommended_window(&a, &c)).unwrap();
        assert_eq!(hom0.dim, 0);
    }

    #[test]
    fn hom_additive_over_direct_sum() {
        let ctx = ctx_q(2, 1);
        let field = ctx.field().clone();
        let lam = ScalarElem::from_i64(&field, 3);
        let a = DqModule::block_v(&ctx, 0, 1, &lam).unwrap();
        let b = DqModule::block_v(&ctx, 1, 1, &lam).unwrap();
        let sum = a.direct_sum(&b).unwrap();
        let w = recommended_window(&sum, &sum);
        let d_sum = hom_space(&sum, &a, w).unwrap().dim;
        let d1 = hom_space(&a, &a, w).unwrap().dim;
        let d2 = hom_space(&b, &a, w).unwrap().dim;
        assert_eq!(d_sum, d1 + d2);
    }

    #[test]
    fn morphisms_output_satisfies_equation() {
        let ctx = ctx_q(2, 1);
        let lam = ScalarElem::from_i64(ctx.field(), 3);
        let j2 = DqModule::block_j(&ctx, 2).unwrap();
        let v = DqModule::block_v(&ctx, 1, 2, &lam).unwrap();
        let m = j2.tensor(&v).unwrap();
        let hom = hom_space(&m, &m, recommended_window(&m, &m)).unwrap();
        assert!(hom.dim >= 1);
        for rho in &hom.basis {
            assert!(is_morphism(&m, &m, rho));
        }
    }

    #[test]
    fn isom_finds_conjugation_witness() {
        use rand::SeedableRng;
        let ctx = ctx_q(2, 1);
        let lam = ScalarElem::from_i64(ctx.field(), 3);
        let m = DqModule::block_v(&ctx, 1, 1, &lam)
            .unwrap()
            .direct_sum(&DqModule::block_j(&ctx, 2).unwrap())
            .unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for _ in 0..5 {
            let h = random_unimodular(&ctx, m.dim(), &mut rng);
            let conj = m.ad_q(&h).unwrap();
            let witness = isom_test(&m, &conj).unwrap();
            assert!(witness.is_some());
        }
    }

    #[test]
    fn isom_distinguishes_classes() {
        let ctx = ctx_q(2, 1);
        let field = ctx.field().clone();
        let a = DqModule::block_v(&ctx, 0, 1, &ScalarElem::from_i64(&field, 3)).unwrap();
        // q^3 lambda: isomorphic
        let b = DqModule::block_v(&ctx, 0, 1, &ScalarElem::from_i64(&field, 24)).unwrap();
        assert!(isom_test(&a, &b).unwrap().is_some());
        // different class: not isomorphic
        let c = DqModule::block_v(&ctx, 0, 1, &ScalarElem::from_i64(&field, 5)).unwrap();
        assert!(isom_test(&a, &c).unwrap().is_none());
        // dimension mismatch is a precondition error
        let j2 = DqModule::block_j(&ctx, 2).unwrap();
        assert!(isom_test(&a, &j2).is_err());
    }
}
