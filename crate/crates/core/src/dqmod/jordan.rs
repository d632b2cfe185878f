//! Rational Jordan form of a constant matrix over the scalar field: the
//! generalized-eigenspace data per irreducible factor of the characteristic
//! polynomial, a conjugating basis of cyclic chains, and the block matrix
//! itself (classical Jordan blocks for linear factors, hypercompanion
//! blocks otherwise).

use crate::error::{Error, Result};
use crate::matrix::ScalarMat;
use crate::scalars::poly::Poly;
use crate::scalars::{factor, ScalarElem, ScalarField};

/// One Jordan block: the irreducible factor, its depth, and where the block
/// sits in the assembled matrix.
#[derive(Clone, Debug)]
pub struct JordanBlock {
    pub factor: Poly,
    pub depth: i64,
    pub offset: usize,
    pub size: usize,
}

#[derive(Clone, Debug)]
pub struct RationalJordan {
    /// P with P^{-1} A P = jordan.
    pub transform: ScalarMat,
    pub jordan: ScalarMat,
    pub blocks: Vec<JordanBlock>,
}

/// Depth profile of an irreducible factor p in A: the number of blocks of
/// each exact depth, read off kernel ranks of p(A)^j.
pub fn depth_profile(a: &ScalarMat, p: &Poly) -> Vec<(i64, usize)> {
    let e = p.degree();
    let pa = a.eval_poly(p);
    let mut kappa = vec![0usize]; // kappa[j] = dim ker p(A)^j / deg p
    let mut power = ScalarMat::identity(a.field(), a.rows());
    loop {
        power = power.mul(&pa);
        let k = (a.rows() - power.rank()) / e;
        if k == *kappa.last().unwrap() {
            break;
        }
        kappa.push(k);
        if k == a.rows() / e {
            break;
        }
    }
    let dmax = kappa.len() - 1;
    let mut out = Vec::new();
    for d in 1..=dmax {
        let at_least_d = kappa[d] - kappa[d - 1];
        let at_least_d1 = if d + 1 <= dmax { kappa[d + 1] - kappa[d] } else { 0 };
        let exactly = at_least_d - at_least_d1;
        if exactly > 0 {
            out.push((d as i64, exactly));
        }
    }
    out
}

/// Compute the rational Jordan form given the distinct irreducible factors
/// of the characteristic polynomial (every eigenvalue must be covered).
pub fn rational_jordan_with_factors(a: &ScalarMat, factors: &[Poly]) -> Result<RationalJordan> {
    let n = a.rows();
    let field = a.field().clone();
    let mut columns: Vec<Vec<ScalarElem>> = Vec::new();
    let mut blocks = Vec::new();

    for p in factors {
        let e = p.degree();
        let pa = a.eval_poly(p);
        // kernel filtration
        let mut kernels: Vec<Vec<Vec<ScalarElem>>> = vec![Vec::new()];
        let mut power = ScalarMat::identity(&field, n);
        loop {
            power = power.mul(&pa);
            let ker = power.kernel();
            if ker.len() == kernels.last().unwrap().len() {
                break;
            }
            kernels.push(ker);
        }
        let dmax = kernels.len() - 1;
        if dmax == 0 {
            continue;
        }
        // chains per depth, top-down
        let mut chosen_chain_tops: Vec<(usize, Vec<ScalarElem>)> = Vec::new(); // (depth, v)
        for d in (1..=dmax).rev() {
            // span to avoid: K_{d-1} + p(A) * (chains of depth > d) + A-translates
            // of tops already chosen at this depth
            let count_ge =
                (kernels[d].len() - kernels[d - 1].len()) / e;
            let count_gt = chosen_chain_tops.iter().filter(|(dd, _)| *dd > d).count();
            let needed = count_ge - count_gt;
            for _ in 0..needed {
                // avoid span of: K_{d-1}, all translates A^a p(A)^b (top) for
                // chosen tops with b adjusted to land in K_d, and A-translates
                // of tops already at depth d
                let mut avoid: Vec<Vec<ScalarElem>> = kernels[d - 1].clone();
                for (dd, top) in &chosen_chain_tops {
                    // push top down into K_d: p(A)^{dd - d} top, then its
                    // A^a p(A)^b translates within K_d
                    let drop = dd.saturating_sub(d);
                    let mut base = top.clone();
                    for _ in 0..drop {
                        base = pa.mul_vec(&base);
                    }
                    let mut cur = base.clone();
                    for b in 0..d {
                        let mut t = cur.clone();
                        for _a in 0..e {
                            avoid.push(t.clone());
                            t = a.mul_vec(&t);
                        }
                        let _ = b;
                        cur = pa.mul_vec(&cur);
                    }
                }
                let v = pick_outside_span(&field, &kernels[d], &avoid).ok_or_else(|| {
                    Error::internal("rational_jordan", "chain top selection exhausted")
                })?;
                chosen_chain_tops.push((d, v));
            }
        }
        chosen_chain_tops.sort_by(|x, y| y.0.cmp(&x.0));
        for (d, v) in chosen_chain_tops {
            let offset = columns.len();
            // basis p(A)^b A^a v, b = 0..d, a = 0..e; ordered so the matrix
            // is the hypercompanion (companion of p with unit carries).
            let mut layer = v.clone();
            for _b in 0..d {
                let mut t = layer.clone();
                for _a in 0..e {
                    columns.push(t.clone());
                    t = a.mul_vec(&t);
                }
                layer = pa.mul_vec(&layer);
            }
            blocks.push(JordanBlock {
                factor: p.clone(),
                depth: d as i64,
                offset,
                size: d * e,
            });
        }
    }

    if columns.len() != n {
        return Err(Error::internal(
            "rational_jordan",
            format!("basis incomplete: {} of {n} columns", columns.len()),
        ));
    }
    let p_mat = ScalarMat::from_columns(&field, n, &columns);
    let p_inv = p_mat
        .inverse()
        .map_err(|_| Error::internal("rational_jordan", "chain basis not invertible"))?;
    let jordan = p_inv.mul(&a.mul(&p_mat));
    // structural verification: block-diagonal outside the blocks
    for bi in &blocks {
        for bj in &blocks {
            if bi.offset == bj.offset {
                continue;
            }
            for i in 0..bi.size {
                for j in 0..bj.size {
                    if !jordan.at(bi.offset + i, bj.offset + j).is_zero() {
                        return Err(Error::internal(
                            "rational_jordan",
                            "off-block coupling after conjugation",
                        ));
                    }
                }
            }
        }
    }
    Ok(RationalJordan { transform: p_mat, jordan, blocks })
}

/// Convenience entry: factor the squarefree part of the characteristic
/// polynomial directly (degree-capped), then build the form.
pub fn rational_jordan(a: &ScalarMat) -> Result<RationalJordan> {
    let cp = a.charpoly();
    let sf = cp.squarefree_part();
    let factors: Vec<Poly> = factor::factor(&sf)?.into_iter().map(|(p, _)| p).collect();
    rational_jordan_with_factors(a, &factors)
}

/// A vector of `inside` outside the span of `avoid`, preferring basis
/// vectors then small combinations.
fn pick_outside_span(
    field: &ScalarField,
    inside: &[Vec<ScalarElem>],
    avoid: &[Vec<ScalarElem>],
) -> Option<Vec<ScalarElem>> {
    if inside.is_empty() {
        return None;
    }
    let dim = inside[0].len();
    let in_span = |v: &[ScalarElem], span: &[Vec<ScalarElem>]| -> bool {
        if span.is_empty() {
            return v.iter().all(|c| c.is_zero());
        }
        let m = ScalarMat::from_columns(field, dim, span);
        // v in span iff rank unchanged after appending
        let mut cols: Vec<Vec<ScalarElem>> = span.to_vec();
        cols.push(v.to_vec());
        let m2 = ScalarMat::from_columns(field, dim, &cols);
        m.rank() == m2.rank()
    };
    for v in inside {
        if !in_span(v, avoid) {
            return Some(v.clone());
        }
    }
    // small integer combinations
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x10_ad);
    for _ in 0..60 {
        let mut v = vec![ScalarElem::zero(field); dim];
        for b in inside {
            let c = rng.gen_range(-2..3i64);
            if c != 0 {
                let ce = ScalarElem::from_i64(field, c);
                for (x, y) in v.iter_mut().zip(b) {
                    *x = x.add(&y.mul(&ce));
                }
            }
        }
        if !in_span(&v, avoid) {
            return Some(v);
        }
    }
    None
}
