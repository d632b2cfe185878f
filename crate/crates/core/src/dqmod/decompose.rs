//! The classification pipeline: cyclic polynomial, slope factorization,
//! ramified reduction of each pure part to a constant matrix, resonance
//! alignment, and reconstruction of the canonical block multiset from
//! spectral data.
//!
//! A pure part of slope r/s is taken to the cover u^s = t (adjoining a root
//! q^{1/s} on demand), twisted by u^{-r} and rebalanced to a matrix with
//! invertible constant term C0. Aligning the spectrum of C0 so no two
//! eigenvalues differ by a nonzero power of q^{1/s} makes the constant
//! reduction solvable at every order, so the module is isomorphic to the
//! constant model of C0 and all invariants are read from
//! B = q^{r(s-1)/2} C0^s: its eigenvalue classes modulo q^Z are the
//! lambda-data and its kernel filtrations the Jordan depths. Galois descent
//! appears as irreducible factors of higher degree, grouped through minimal
//! polynomials over the base field.

use crate::error::{Error, Result};
use crate::matrix::{ScalarMat, SeriesMat};
use crate::ore::{OrePoly, Slope};
use crate::scalars::poly::Poly;
use crate::scalars::{factor, QContext, ScalarElem};

use super::canon::{same_s_orbit, CanonicalBlock, CanonicalForm};
use super::cyclic;
use super::jordan::depth_profile;
use super::DqModule;

#[derive(Clone, Debug)]
pub struct DecomposeOutput {
    pub form: CanonicalForm,
    /// Precision at which the pipeline stages were carried out; for exact
    /// polynomial input the classification data itself is exact.
    pub certified_precision: i64,
}

/// Classify a module into its canonical block multiset.
pub fn decompose(m: &DqModule) -> Result<DecomposeOutput> {
    let ctx = m.ctx().clone();
    let prec = m
        .matrix()
        .min_precision()
        .unwrap_or(ctx.default_precision());
    let (v, _) = cyclic::cyclic_vector(m)?;
    let f = cyclic::cyclic_minpoly(m, &v)?;
    let pure_factors = f.slope_factor(prec)?;
    let mut blocks: Vec<CanonicalBlock> = Vec::new();
    for (slope, fk) in &pure_factors {
        blocks.extend(classify_pure(fk, *slope, &ctx)?);
    }
    let total: i64 = blocks.iter().map(|b| b.dim()).sum();
    if total != m.dim() as i64 {
        return Err(Error::internal(
            "decompose",
            format!("block dimensions sum to {total}, expected {}", m.dim()),
        ));
    }
    Ok(DecomposeOutput { form: CanonicalForm::new(blocks, &ctx), certified_precision: prec })
}

/// A conjugation witness onto the canonical model, found through the
/// morphism space and certified by invertibility at precision.
pub fn canonical_witness(m: &DqModule, cf: &CanonicalForm) -> Result<SeriesMat> {
    let model = cf.model(m.ctx())?;
    match super::hom::isom_test(m, &model)? {
        Some(w) => Ok(w),
        None => Err(Error::precision(
            "canonical_witness",
            "no invertible morphism onto the model found in the window".to_string(),
        )),
    }
}

/// Classification of a single pure part given by its monic Ore polynomial.
fn classify_pure(fk: &OrePoly, slope: Slope, base_ctx: &QContext) -> Result<Vec<CanonicalBlock>> {
    let r = slope.num;
    let s = slope.den;
    let n_p = fk.degree();
    let (ctx_r, _q_root) = ramified_context(base_ctx, s)?;
    let kp = ctx_r.field().clone();

    // companion matrix of the pure polynomial, entries moved to k'((u))
    let companion = DqModule::from_ore(fk)?.matrix().clone();
    let g_u = companion.lift_to(&kp)?.ramify_exponents(s);
    let balanced = balance_twist(&g_u, r, &ctx_r)?;
    let c0 = aligned_constant(balanced, &ctx_r)?;

    // B = q'^{s r (s-1)/2} C0^s has eigenvalue classes equal to the lambda
    // data of the blocks (q^{r(s-1)/2} c^s with c the line eigenvalues).
    let exponent = s * r * (s - 1) / 2;
    let b = c0.pow(s as u32).scale(&ctx_r.q_pow(exponent));
    let blocks = spectral_blocks(&b, r, s, &ctx_r, base_ctx)?;
    let total: i64 = blocks.iter().map(|bl| bl.dim()).sum();
    if total != n_p {
        return Err(Error::internal(
            "classify_pure",
            format!("pure part of dim {n_p} reconstructed as {total}"),
        ));
    }
    Ok(blocks)
}

/// Context for the cover u^s = t: the scalar field gains an s-th root of q
/// when none is present, and the new q is that root.
pub(crate) fn ramified_context(
    base: &QContext,
    s: i64,
) -> Result<(QContext, ScalarElem)> {
    if s == 1 {
        return Ok((base.clone(), base.q().clone()));
    }
    let field = base.field().clone();
    let mut coeffs = vec![ScalarElem::zero(&field); s as usize + 1];
    coeffs[0] = base.q().neg();
    coeffs[s as usize] = ScalarElem::one(&field);
    let xs_minus_q = Poly::new(field.clone(), coeffs);
    // a root inside the field first
    let mut roots = factor::roots_in(&xs_minus_q)?;
    roots.sort_by(|a, b| a.canonical_cmp(b));
    if let Some(root) = roots.pop() {
        let ctx = QContext::with_options(
            field,
            root.clone(),
            base.torsion_bound(),
            base.default_precision(),
        )?;
        return Ok((ctx, root));
    }
    // adjoin a root of any irreducible factor: every root of a factor of
    // x^s - q is an s-th root of q
    let factors = factor::factor(&xs_minus_q)?;
    let minpoly = factors[0].0.clone();
    let ext = field.extend_trusted(&minpoly, &format!("q{s}r"))?;
    let root = ext.generator()?;
    let ctx = QContext::with_options(
        ext,
        root.clone(),
        base.torsion_bound(),
        base.default_precision(),
    )?;
    Ok((ctx, root))
}

/// Twist a slope-r companion matrix over the cover by u^{-r} and conjugate
/// by the grading diagonal diag(u^{-jr}) so the result has entries in
/// k'[[u]] with invertible constant term.
fn balance_twist(g_u: &SeriesMat, r: i64, ctx_r: &QContext) -> Result<SeriesMat> {
    let n = g_u.rows();
    let field = ctx_r.field().clone();
    let out = SeriesMat::from_fn(&field, n, n, |i, j| {
        // entry scaled by u^{c_j - c_i - r} q'^{c_j} with c_j = -j r
        let cj = -(j as i64) * r;
        let ci = -(i as i64) * r;
        let entry = g_u.at(i, j);
        entry
            .shift(cj - ci - r)
            .scale(&ctx_r.q_pow(cj))
    });
    match out.min_valuation() {
        Some(v) if v < 0 => {
            return Err(Error::internal(
                "balance_twist",
                "negative valuation after grading twist",
            ))
        }
        _ => {}
    }
    let c0 = out.constant_term();
    if c0.det().is_zero() {
        return Err(Error::internal("balance_twist", "constant term singular"));
    }
    Ok(out)
}

/// Iteratively remove spectral resonances: whenever an eigenvalue of the
/// constant term is a positive q-power times another, split the module by
/// the corresponding coprime kernel projections and shear the upper part
/// down by one power of t. Terminates because the total offset potential
/// strictly decreases. Returns the final constant term.
fn aligned_constant(mut g: SeriesMat, ctx: &QContext) -> Result<ScalarMat> {
    let field = ctx.field().clone();
    let n = g.rows();
    let bound = ctx.torsion_bound().max(2 * ctx.default_precision());
    let max_rounds = (bound as usize) * n + 16;

    for _ in 0..max_rounds {
        let c0 = g.constant_term();
        if c0.det().is_zero() {
            return Err(Error::precision(
                "resonance alignment",
                "constant term became singular".to_string(),
            ));
        }
        let cp = c0.charpoly();
        let sf = cp.squarefree_part();
        // roots with something q-below them but nothing q-above them
        let mut has_below = Poly::one(&field);
        let mut has_above = Poly::one(&field);
        for m in 1..=bound {
            let qm = ctx.q_pow(m);
            let up = sf.scale_argument(&qm.inv()?).monic(); // roots scaled by q^m
            let down = sf.scale_argument(&qm).monic(); // roots scaled by q^-m
            let below_m = sf.gcd(&up);
            let above_m = sf.gcd(&down);
            has_below = squarefree_union(&has_below, &below_m);
            has_above = squarefree_union(&has_above, &above_m);
        }
        if has_below.degree() == 0 {
            return Ok(c0);
        }
        let (w_poly, _) = has_below.divmod(&has_below.gcd(&has_above))?;
        let w_poly = w_poly.monic();
        if w_poly.degree() == 0 {
            // cycles are impossible for q not a root of unity
            return Err(Error::internal(
                "resonance alignment",
                "offset order has no maximal element",
            ));
        }
        // coprime complement of the W-part inside the characteristic poly
        let mut u_poly = cp.clone();
        loop {
            let g_ = u_poly.gcd(&w_poly);
            if g_.degree() == 0 {
                break;
            }
            let (q_, _) = u_poly.divmod(&g_)?;
            u_poly = q_.monic();
        }
        let w_sat = c0.eval_poly(&w_poly).pow(n as u32);
        let u_sat = c0.eval_poly(&u_poly).pow(n as u32);
        let w_basis = w_sat.kernel();
        let u_basis = u_sat.kernel();
        if w_basis.len() + u_basis.len() != n {
            return Err(Error::internal(
                "resonance alignment",
                "coprime kernel split does not fill the space",
            ));
        }
        let mut cols = u_basis;
        let w_start = cols.len();
        cols.extend(w_basis);
        let p = ScalarMat::from_columns(&field, n, &cols);
        let p_inv = p
            .inverse()
            .map_err(|_| Error::internal("resonance alignment", "split basis singular"))?;
        // constant conjugation, then the shear diag(1_U, t 1_W)
        let p_series = p.to_series();
        let p_inv_series = p_inv.to_series();
        let conj = p_inv_series.mul(&g).mul(&p_series);
        let q_inv = ctx.q_pow(-1);
        g = SeriesMat::from_fn(&field, n, n, |i, j| {
            let e = conj.at(i, j);
            let mut out = e.clone();
            if i >= w_start {
                out = out.shift(1);
            }
            if j >= w_start {
                out = out.shift(-1).scale(&q_inv);
            }
            out
        });
        if g.min_valuation().map(|v| v < 0).unwrap_or(false) {
            return Err(Error::internal(
                "resonance alignment",
                "shear produced negative valuation",
            ));
        }
    }
    Err(Error::precision(
        "resonance alignment",
        "offset normalization did not stabilize within the search bound".to_string(),
    ))
}

/// Union of squarefree monic polynomials (product without repeated factors).
fn squarefree_union(a: &Poly, b: &Poly) -> Poly {
    let g = a.gcd(b);
    let (q, _) = b.divmod(&g).expect("gcd divides");
    a.mul(&q).monic()
}

/// Read the block multiset of a pure part from the spectral data of B over
/// the ramified field: eigenvalue classes modulo q^Z and kernel-filtration
/// depths, grouped into base-field classes through minimal polynomials.
fn spectral_blocks(
    b: &ScalarMat,
    r: i64,
    s: i64,
    ctx_r: &QContext,
    base_ctx: &QContext,
) -> Result<Vec<CanonicalBlock>> {
    let kp = ctx_r.field().clone();
    let base_field = base_ctx.field().clone();
    let q_base = base_ctx.q().lift_to(&kp)?;
    let ctx_b = QContext::with_options(
        kp.clone(),
        q_base.clone(),
        base_ctx.torsion_bound(),
        base_ctx.default_precision(),
    )?;

    let cp = b.charpoly();
    let sf = cp.squarefree_part();
    let bound = ctx_b.torsion_bound();

    // keep only q-maximal representatives of each eigenvalue q-orbit
    let mut pool = sf.clone();
    loop {
        let mut changed = false;
        for m in 1..=bound {
            if pool.degree() == 0 {
                break;
            }
            let qm = ctx_b.q_pow(m);
            // roots x of pool with q^m x still a root of sf sit below another
            let down = sf.scale_argument(&qm).monic();
            let below = pool.gcd(&down);
            if below.degree() > 0 {
                let (q_, _) = pool.divmod(&below)?;
                pool = q_.monic();
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    if pool.degree() == 0 {
        return Err(Error::internal("spectral_blocks", "empty orbit pool"));
    }
    let reps: Vec<Poly> = factor::factor(&pool)?.into_iter().map(|(p, _)| p).collect();

    // accumulate (depth, base-class) -> total algebraic degree
    struct Group {
        d: i64,
        f0: Poly,
        total: i64,
    }
    let mut groups: Vec<Group> = Vec::new();

    for p in &reps {
        // minimal polynomial over the base field of a root of p
        let f0 = if p.degree() == 1 {
            let mu = p.coeff(0).neg();
            factor::minimal_polynomial_over(&mu, &base_field)?
        } else {
            let ext = kp.extend_trusted(p, "w")?;
            let mu = ext.generator()?;
            factor::minimal_polynomial_over(&mu, &base_field)?
        };
        for m in -bound..=bound {
            let qm = ctx_b.q_pow(-m);
            let p_m = p.scale_argument(&qm).monic(); // roots scaled by q^m
            if !p_m.divides(&cp) {
                continue;
            }
            for (d, count) in depth_profile(b, &p_m) {
                let add = count as i64 * p.degree() as i64;
                match groups.iter_mut().find(|g| {
                    g.d == d && same_s_orbit(&g.f0, &f0, base_ctx).unwrap_or(false)
                }) {
                    Some(g) => g.total += add,
                    None => groups.push(Group { d, f0: f0.clone(), total: add }),
                }
            }
        }
    }

    let mut blocks = Vec::new();
    for g in groups {
        let m0 = g.f0.degree() as i64;
        if g.total % (s * m0) != 0 {
            return Err(Error::internal(
                "spectral_blocks",
                format!(
                    "class total {} not divisible by s*deg = {}",
                    g.total,
                    s * m0
                ),
            ));
        }
        let count = g.total / (s * m0);
        for _ in 0..count {
            let block = if m0 == 1 {
                let lam = g.f0.coeff(0).neg();
                let rep = base_ctx.coset_representative(&lam);
                CanonicalBlock::split(g.d, r, s, rep)?
            } else {
                let key = super::canon::s_class_key(&g.f0, base_ctx)?;
                CanonicalBlock::descent(g.d, r, s, key)?
            };
            blocks.push(block);
        }
    }
    Ok(blocks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dqmod::canon::BlockClass;
    use crate::dqmod::tests::{ctx_q, random_unimodular};
    use crate::matrix::SeriesMat;
    use crate::scalars::ScalarField;

    fn split_block(ctx: &QContext, d: i64, r: i64, s: i64, lam: i64) -> DqModule {
        let lam = ScalarElem::from_i64(ctx.field(), lam);
        let v = DqModule::block_v(ctx, r, s, &lam).unwrap();
        if d == 1 {
            v
        } else {
            DqModule::block_j(ctx, d).unwrap().tensor(&v).unwrap()
        }
    }

    #[test]
    fn identity_module_decomposes_to_unit_blocks() {
        let ctx = ctx_q(2, 1);
        let m = DqModule::new(&ctx, SeriesMat::identity(ctx.field(), 2)).unwrap();
        let out = decompose(&m).unwrap();
        assert_eq!(out.form.blocks.len(), 2);
        for b in &out.form.blocks {
            assert_eq!((b.d, b.r, b.s), (1, 0, 1));
            match &b.class {
                BlockClass::Split(l) => assert!(ctx.same_q_class(l, &ScalarElem::one(ctx.field()))),
                _ => panic!("expected split block"),
            }
        }
    }

    #[test]
    fn single_blocks_roundtrip() {
        let ctx = ctx_q(2, 1);
        for (d, r, s, lam) in [
            (1i64, 0i64, 1i64, 3i64),
            (2, 0, 1, 3),
            (1, 1, 1, 5),
            (1, 1, 2, 3),
            (1, -1, 2, 3),
            (2, 1, 1, 3),
            (1, 1, 3, 2),
            (3, 0, 1, 1),
        ] {
            let m = split_block(&ctx, d, r, s, lam);
            let out = decompose(&m).unwrap();
            assert_eq!(out.form.blocks.len(), 1, "block (d={d}, r={r}, s={s})");
            let b = &out.form.blocks[0];
            assert_eq!((b.d, b.r, b.s), (d, r, s));
            match &b.class {
                BlockClass::Split(l) => {
                    let expect = ScalarElem::from_i64(ctx.field(), lam);
                    assert!(ctx.same_q_class(l, &expect), "lambda class for ({d},{r},{s},{lam})");
                }
                _ => panic!("expected split block"),
            }
        }
    }

    #[test]
    fn mixed_slopes_and_depths() {
        let ctx = ctx_q(2, 1);
        // J_2 (x) V_{0,1}(3) + V_{1,2}(5)
        let a = split_block(&ctx, 2, 0, 1, 3);
        let b = split_block(&ctx, 1, 1, 2, 5);
        let m = a.direct_sum(&b).unwrap();
        let out = decompose(&m).unwrap();
        let expected = CanonicalForm::new(
            vec![
                CanonicalBlock::split(2, 0, 1, ScalarElem::from_i64(ctx.field(), 3)).unwrap(),
                CanonicalBlock::split(1, 1, 2, ScalarElem::from_i64(ctx.field(), 5)).unwrap(),
            ],
            &ctx,
        );
        assert!(out.form.equivalent(&expected, &ctx));
    }

    #[test]
    fn resonant_sum_still_splits() {
        // V_{0,1}(3) + V_{0,1}(3 q^3) are isomorphic blocks; the sum must
        // come back as two unit-depth blocks of the same class, not J_2.
        let ctx = ctx_q(2, 1);
        let a = split_block(&ctx, 1, 0, 1, 3);
        let b = split_block(&ctx, 1, 0, 1, 24);
        let m = a.direct_sum(&b).unwrap();
        let out = decompose(&m).unwrap();
        assert_eq!(out.form.blocks.len(), 2);
        for bl in &out.form.blocks {
            assert_eq!(bl.d, 1);
            match &bl.class {
                BlockClass::Split(l) => {
                    assert!(ctx.same_q_class(l, &ScalarElem::from_i64(ctx.field(), 3)))
                }
                _ => panic!("split expected"),
            }
        }
    }

    #[test]
    fn conjugated_modules_classify_identically() {
        use rand::SeedableRng;
        let ctx = ctx_q(2, 1);
        let m = split_block(&ctx, 2, 1, 2, 3);
        let expected = decompose(&m).unwrap().form;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        for _ in 0..6 {
            let h = random_unimodular(&ctx, m.dim(), &mut rng);
            let conj = m.ad_q(&h).unwrap();
            let out = decompose(&conj).unwrap();
            assert!(out.form.equivalent(&expected, &ctx), "conjugation changed the class");
        }
    }

    #[test]
    fn descent_block_over_q() {
        let ctx = ctx_q(2, 1);
        let field = ctx.field().clone();
        let f = Poly::from_i64(&field, &[-2, 0, 1]); // x^2 - 2
        let m = DqModule::block_vf(&ctx, 0, 1, &f).unwrap();
        let out = decompose(&m).unwrap();
        assert_eq!(out.form.blocks.len(), 1);
        let b = &out.form.blocks[0];
        assert_eq!((b.d, b.r, b.s), (1, 0, 1));
        match &b.class {
            BlockClass::Descent(g) => {
                assert!(same_s_orbit(g, &f, &ctx).unwrap());
            }
            _ => panic!("expected descent block"),
        }
    }

    #[test]
    fn descent_block_splits_over_extension() {
        // over Q(sqrt2) the same module splits into conjugate lines
        let base = ScalarField::rationals();
        let k = base
            .extend(&Poly::from_i64(&base, &[-2, 0, 1]), "a")
            .unwrap();
        let q = ScalarElem::from_i64(&k, 2);
        let ctx = QContext::new(k.clone(), q).unwrap();
        let f = Poly::from_i64(&base, &[-2, 0, 1]).lift_to(&k).unwrap();
        // build by hand: the same matrix as over Q, entries lifted
        let base_ctx = ctx_q(2, 1);
        let m_q = DqModule::block_vf(&base_ctx, 0, 1, &Poly::from_i64(&base, &[-2, 0, 1])).unwrap();
        let m = DqModule::new(&ctx, m_q.matrix().lift_to(&k).unwrap()).unwrap();
        let out = decompose(&m).unwrap();
        assert_eq!(out.form.blocks.len(), 2);
        let a = k.generator().unwrap();
        let mut classes = Vec::new();
        for b in &out.form.blocks {
            assert_eq!((b.d, b.r, b.s), (1, 0, 1));
            match &b.class {
                BlockClass::Split(l) => classes.push(l.clone()),
                _ => panic!("expected split over the extension"),
            }
        }
        assert!(classes.iter().any(|l| ctx.same_q_class(l, &a)));
        assert!(classes.iter().any(|l| ctx.same_q_class(l, &a.neg())));
        let _ = f;
    }

    #[test]
    fn witness_against_model() {
        let ctx = ctx_q(2, 1);
        let m = split_block(&ctx, 1, 1, 1, 3)
            .direct_sum(&split_block(&ctx, 1, 0, 1, 5))
            .unwrap();
        let out = decompose(&m).unwrap();
        let w = canonical_witness(&m, &out.form).unwrap();
        // w conjugates m onto the model
        let model = out.form.model(&ctx).unwrap();
        let conj = m.ad_q(&w).unwrap();
        assert!(conj.matrix().agrees_with(model.matrix()));
    }
}
