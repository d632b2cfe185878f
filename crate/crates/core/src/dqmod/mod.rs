//! D_q-modules presented by invertible series matrices: the block
//! constructors behind the classification, tensor operations, the twisted
//! conjugation action, and the numerical invariants (degree, slope, Newton
//! polygon).
//!
//! A module is the pair (V, Phi_g) with Phi_g = g composed with the
//! coordinatewise substitution t -> qt; isomorphism classes correspond to
//! q-conjugacy classes of g under h g sigma_q(h)^{-1}.

pub mod canon;
pub mod cyclic;
pub mod decompose;
pub mod hom;
pub mod jordan;

pub use canon::{BlockClass, CanonicalBlock, CanonicalForm};
pub use decompose::{decompose, DecomposeOutput};
pub use hom::{hom_space, isom_test, recommended_window, HomSpace};

use crate::error::{Error, Result};
use crate::matrix::SeriesMat;
use crate::ore::{gcd_i64, NewtonPolygon, OrePoly, Slope};
use crate::scalars::poly::Poly;
use crate::scalars::{factor, QContext, ScalarElem};
use crate::series::LaurentSeries;

/// A D_q-module (V, Phi_g) given by an invertible n x n series matrix.
#[derive(Clone, Debug)]
pub struct DqModule {
    ctx: QContext,
    g: SeriesMat,
}

impl DqModule {
    /// Wrap a square matrix; the determinant must have a determined
    /// valuation at the current precision.
    pub fn new(ctx: &QContext, g: SeriesMat) -> Result<Self> {
        if g.rows() != g.cols() {
            return Err(Error::parameter("module matrix must be square"));
        }
        if g.field() != ctx.field() {
            return Err(Error::parameter("matrix field must match the context field"));
        }
        let det = g.det()?;
        if det.valuation().is_none() {
            return Err(Error::ZeroAtPrecision {
                precision: det.prec().bound().unwrap_or(0),
            });
        }
        Ok(DqModule { ctx: ctx.clone(), g })
    }

    pub(crate) fn from_parts_unchecked(ctx: &QContext, g: SeriesMat) -> Self {
        DqModule { ctx: ctx.clone(), g }
    }

    pub fn ctx(&self) -> &QContext {
        &self.ctx
    }

    pub fn matrix(&self) -> &SeriesMat {
        &self.g
    }

    pub fn dim(&self) -> usize {
        self.g.rows()
    }

    /// Apply Phi to a coordinate vector: g * sigma_q(v).
    pub fn apply_phi(&self, v: &[LaurentSeries]) -> Vec<LaurentSeries> {
        let twisted: Vec<LaurentSeries> = v.iter().map(|x| x.sigma_q(&self.ctx)).collect();
        self.g.mul_vec(&twisted)
    }

    /// The companion-matrix module of a monic Ore polynomial with nonzero
    /// constant coefficient: Phi acts as left multiplication by T on the
    /// basis 1, T, ..., T^{n-1}.
    pub fn from_ore(f: &OrePoly) -> Result<Self> {
        if !f.is_monic() {
            return Err(Error::parameter("companion module needs a monic polynomial"));
        }
        let n = f.degree();
        if n < 1 {
            return Err(Error::parameter("companion module needs degree >= 1"));
        }
        let ctx = f.ctx().clone();
        let field = ctx.field();
        let mut g = SeriesMat::zero(field, n as usize, n as usize);
        for j in 0..(n - 1) as usize {
            *g.at_mut(j + 1, j) = LaurentSeries::one(field);
        }
        for i in 0..n as usize {
            // column n-1 carries -a_{n-i} at row i
            *g.at_mut(i, (n - 1) as usize) = f.coeff_a((n - i as i64) as usize).neg();
        }
        DqModule::new(&ctx, g)
    }

    /// The irreducible block V_{r,s}(lambda) = k((t))_q[T]/(T^s - lambda t^r).
    pub fn block_v(ctx: &QContext, r: i64, s: i64, lambda: &ScalarElem) -> Result<Self> {
        let f = OrePoly::pure_block(ctx, r, s, &lambda.lift_to(ctx.field())?)?;
        Self::from_ore(&f)
    }

    /// The unipotent block J_d = k((t))_q[T]/((T-1)^d), realized as the
    /// constant lower-triangular unipotent Jordan matrix.
    pub fn block_j(ctx: &QContext, d: i64) -> Result<Self> {
        if d < 1 {
            return Err(Error::parameter("Jordan depth must be >= 1"));
        }
        let field = ctx.field();
        let mut g = SeriesMat::identity(field, d as usize);
        for j in 0..(d - 1) as usize {
            *g.at_mut(j + 1, j) = LaurentSeries::one(field);
        }
        DqModule::new(ctx, g)
    }

    /// W_{r,s}(lambda), the restriction of the rank-one ramified module
    /// E(lambda^{1/s} t^{r/s}); equivalently the companion module of
    /// T^s - q^{r(s-1)/2} lambda t^r. When r(s-1) is odd a square root of q
    /// must be present in the scalar field.
    pub fn block_w(ctx: &QContext, r: i64, s: i64, lambda: &ScalarElem) -> Result<Self> {
        let rs = r * (s - 1);
        let scale = if rs.rem_euclid(2) == 0 {
            ctx.q_pow(rs / 2)
        } else {
            let root = ctx.canonical_sqrt_q().ok_or_else(|| {
                Error::ExtensionRequired(format!(
                    "q^(1/2) needed for W_({r},{s}) but absent from {}",
                    ctx.field().describe()
                ))
            })?;
            root.pow(rs)?
        };
        let twisted = lambda.lift_to(ctx.field())?.mul(&scale);
        Self::block_v(ctx, r, s, &twisted)
    }

    /// The Galois-descent block V_{r,s}(f) = k((t))_q[T]/(f(t^{-r} T^s)) for
    /// f monic irreducible over k with f(0) != 0, realized on the basis
    /// Phi^i v_j with Phi^s v_j = t^r v_{j+1} and the closing relation from
    /// the coefficients of f.
    pub fn block_vf(ctx: &QContext, r: i64, s: i64, f: &Poly) -> Result<Self> {
        if s < 1 || gcd_i64(r.unsigned_abs(), s as u64) != 1 {
            return Err(Error::parameter("descent block needs s >= 1 and gcd(r, s) = 1"));
        }
        if !f.is_monic() || f.degree() < 1 {
            return Err(Error::parameter("f must be monic of degree >= 1"));
        }
        if f.coeff(0).is_zero() {
            return Err(Error::parameter("f must have nonzero constant term"));
        }
        let f_ctx = f.lift_to(ctx.field())?;
        if factor::irreducibility_witness(&f_ctx)?.is_some() {
            return Err(Error::parameter("f must be irreducible over the scalar field"));
        }
        let m = f.degree() as i64;
        let n = (s * m) as usize;
        let field = ctx.field();
        let idx = |j: i64, i: i64| (j * s + i) as usize;
        let mut g = SeriesMat::zero(field, n, n);
        for j in 0..m {
            for i in 0..(s - 1) {
                *g.at_mut(idx(j, i + 1), idx(j, i)) = LaurentSeries::one(field);
            }
        }
        let tr = |c: ScalarElem| LaurentSeries::monomial(c, r);
        for j in 0..(m - 1) {
            *g.at_mut(idx(j + 1, 0), idx(j, s - 1)) = tr(ScalarElem::one(field));
        }
        // f(x) = x^m - a_{m-1} x^{m-1} - ... - a_0, so a_j = -coeff_j(f).
        for j in 0..m {
            let a_j = f_ctx.coeff(j as usize).neg();
            if !a_j.is_zero() {
                *g.at_mut(idx(j, 0), idx(m - 1, s - 1)) = tr(a_j);
            }
        }
        DqModule::new(ctx, g)
    }

    pub fn direct_sum(&self, other: &DqModule) -> Result<DqModule> {
        if self.ctx != other.ctx {
            return Err(Error::parameter("direct sum across different contexts"));
        }
        Ok(DqModule::from_parts_unchecked(&self.ctx, self.g.direct_sum(&other.g)))
    }

    pub fn tensor(&self, other: &DqModule) -> Result<DqModule> {
        if self.ctx != other.ctx {
            return Err(Error::parameter("tensor across different contexts"));
        }
        Ok(DqModule::from_parts_unchecked(&self.ctx, self.g.kronecker(&other.g)))
    }

    /// The twisted conjugation Ad_q h: g -> h g sigma_q(h)^{-1}.
    pub fn ad_q(&self, h: &SeriesMat) -> Result<DqModule> {
        if h.rows() != self.dim() || h.cols() != self.dim() {
            return Err(Error::parameter("conjugator dimension mismatch"));
        }
        let work = self
            .g
            .min_precision()
            .or(h.min_precision())
            .unwrap_or(self.ctx.default_precision());
        let hs_inv = h.sigma_q(&self.ctx).inverse(work)?;
        let g2 = h.mul(&self.g).mul(&hs_inv);
        DqModule::new(&self.ctx, g2)
    }

    /// deg V = nu(det g); invariant under twisted conjugation.
    pub fn degree(&self) -> Result<i64> {
        let det = self.g.det()?;
        det.valuation().ok_or(Error::ZeroAtPrecision {
            precision: det.prec().bound().unwrap_or(0),
        })
    }

    /// mu(V) = deg V / dim V.
    pub fn slope_mu(&self) -> Result<Slope> {
        Ok(Slope::new(self.degree()?, self.dim() as i64))
    }

    /// Newton polygon through a cyclic vector.
    pub fn polygon(&self) -> Result<NewtonPolygon> {
        let (v, _) = cyclic::cyclic_vector(self)?;
        let f = cyclic::cyclic_minpoly(self, &v)?;
        f.newton_polygon()
    }

    /// Pure = semistable: one polygon slope.
    pub fn is_semistable(&self) -> Result<bool> {
        Ok(self.polygon()?.is_pure())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::SeriesMat;
    use crate::scalars::{QContext, ScalarElem, ScalarField};

    pub(crate) fn ctx_q(q_num: i64, q_den: i64) -> QContext {
        let f = ScalarField::rationals();
        let q = ScalarElem::from_ratio(&f, q_num, q_den);
        QContext::new(f, q).unwrap()
    }

    #[test]
    fn block_v_companion_shape() {
        let ctx = ctx_q(2, 1);
        let lam = ScalarElem::from_i64(ctx.field(), 3);
        let m = DqModule::block_v(&ctx, 1, 2, &lam).unwrap();
        // rows [[0, lambda t], [1, 0]]
        assert_eq!(m.dim(), 2);
        assert_eq!(m.matrix().at(0, 1).coeff(1), lam);
        assert!(m.matrix().at(1, 0).is_one());
        assert!(m.matrix().at(0, 0).is_zero_known());
        // 1x1 case: (lambda t)
        let m1 = DqModule::block_v(&ctx, 1, 1, &lam).unwrap();
        assert_eq!(m1.matrix().at(0, 0).coeff(1), lam);
    }

    #[test]
    fn degree_and_slope_of_blocks() {
        let ctx = ctx_q(2, 1);
        let lam = ScalarElem::from_i64(ctx.field(), 5);
        for (r, s) in [(1i64, 1i64), (1, 2), (-1, 2), (2, 3), (0, 1)] {
            let m = DqModule::block_v(&ctx, r, s, &lam).unwrap();
            assert_eq!(m.degree().unwrap(), r, "degree of V_({r},{s})");
            assert_eq!(m.slope_mu().unwrap(), Slope::new(r, s));
            let ng = m.polygon().unwrap();
            assert_eq!(ng.slopes, vec![(Slope::new(r, s), s)]);
        }
    }

    #[test]
    fn block_j_is_unipotent() {
        let ctx = ctx_q(2, 1);
        let j3 = DqModule::block_j(&ctx, 3).unwrap();
        assert_eq!(j3.degree().unwrap(), 0);
        let ng = j3.polygon().unwrap();
        assert_eq!(ng.slopes, vec![(Slope::zero(), 3)]);
    }

    #[test]
    fn tensor_degree_formula() {
        let ctx = ctx_q(2, 1);
        let lam = ScalarElem::from_i64(ctx.field(), 3);
        let mu = ScalarElem::from_i64(ctx.field(), 7);
        let a = DqModule::block_v(&ctx, 1, 2, &lam).unwrap();
        let b = DqModule::block_v(&ctx, 1, 1, &mu).unwrap();
        let t = a.tensor(&b).unwrap();
        // deg(a (x) b) = dim b * deg a + dim a * deg b
        assert_eq!(
            t.degree().unwrap(),
            b.dim() as i64 * a.degree().unwrap() + a.dim() as i64 * b.degree().unwrap()
        );
        let s = a.direct_sum(&b).unwrap();
        assert_eq!(s.dim(), a.dim() + b.dim());
        assert_eq!(s.degree().unwrap(), a.degree().unwrap() + b.degree().unwrap());
    }

    #[test]
    fn tensor_with_unit_object() {
        let ctx = ctx_q(2, 1);
        let lam = ScalarElem::from_i64(ctx.field(), 3);
        let m = DqModule::block_v(&ctx, 1, 2, &lam).unwrap();
        let unit = DqModule::block_j(&ctx, 1).unwrap();
        let t = unit.tensor(&m).unwrap();
        assert!(t.matrix().agrees_with(m.matrix()));
    }

    #[test]
    fn ad_q_preserves_invariants() {
        use rand::SeedableRng;
        let ctx = ctx_q(2, 1);
        let field = ctx.field().clone();
        let lam = ScalarElem::from_i64(&field, 3);
        let m = DqModule::block_v(&ctx, 1, 1, &lam)
            .unwrap()
            .direct_sum(&DqModule::block_j(&ctx, 2).unwrap())
            .unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let h = random_unimodular(&ctx, m.dim(), &mut rng);
            let conj = m.ad_q(&h).unwrap();
            assert_eq!(conj.degree().unwrap(), m.degree().unwrap());
            let mut s1 = conj.polygon().unwrap().slope_multiset();
            let mut s2 = m.polygon().unwrap().slope_multiset();
            s1.sort();
            s2.sort();
            assert_eq!(s1, s2);
        }
        // identity conjugator is a no-op
        let id = SeriesMat::identity(&field, m.dim());
        assert!(m.ad_q(&id).unwrap().matrix().agrees_with(m.matrix()));
    }

    #[test]
    fn ad_q_is_group_action() {
        use rand::SeedableRng;
        let ctx = ctx_q(3, 1);
        let lam = ScalarElem::from_i64(ctx.field(), 2);
        let m = DqModule::block_v(&ctx, 0, 1, &lam)
            .unwrap()
            .direct_sum(&DqModule::block_j(&ctx, 2).unwrap())
            .unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let h1 = random_unimodular(&ctx, m.dim(), &mut rng);
        let h2 = random_unimodular(&ctx, m.dim(), &mut rng);
        let lhs = m.ad_q(&h2).unwrap().ad_q(&h1).unwrap();
        let rhs = m.ad_q(&h1.mul(&h2)).unwrap();
        assert!(lhs.matrix().agrees_with(rhs.matrix()));
    }

    #[test]
    fn block_vf_matches_block_v_for_linear_f() {
        let ctx = ctx_q(2, 1);
        let field = ctx.field().clone();
        let lam = ScalarElem::from_i64(&field, 3);
        let f = Poly::new(field.clone(), vec![lam.neg(), ScalarElem::one(&field)]);
        let vf = DqModule::block_vf(&ctx, 1, 2, &f).unwrap();
        let v = DqModule::block_v(&ctx, 1, 2, &lam).unwrap();
        assert!(vf.matrix().agrees_with(v.matrix()));
    }

    #[test]
    fn block_vf_constant_companion() {
        let ctx = ctx_q(2, 1);
        let field = ctx.field().clone();
        // r=0, s=1, f=x^2-2: Phi v0 = v1, Phi v1 = 2 v0
        let f = Poly::from_i64(&field, &[-2, 0, 1]);
        let m = DqModule::block_vf(&ctx, 0, 1, &f).unwrap();
        assert_eq!(m.dim(), 2);
        assert!(m.matrix().at(1, 0).is_one());
        assert_eq!(m.matrix().at(0, 1).coeff(0), ScalarElem::from_i64(&field, 2));
        assert_eq!(m.degree().unwrap(), 0);
    }

    #[test]
    fn block_vf_rejects_bad_parameters() {
        let ctx = ctx_q(2, 1);
        let field = ctx.field().clone();
        let reducible = Poly::from_i64(&field, &[-4, 0, 1]);
        assert!(DqModule::block_vf(&ctx, 0, 1, &reducible).is_err());
        let zero_const = Poly::from_i64(&field, &[0, 1]);
        assert!(DqModule::block_vf(&ctx, 0, 1, &zero_const).is_err());
        let lam = ScalarElem::from_i64(&field, 3);
        assert!(DqModule::block_v(&ctx, 2, 4, &lam).is_err());
        assert!(DqModule::block_v(&ctx, 1, 1, &ScalarElem::zero(&field)).is_err());
    }

    #[test]
    fn block_w_identity() {
        // W_{1,2}(lambda) = V_{1,2}(q^{1/2} lambda) needs sqrt(q); with q = 4
        // the canonical root is 2.
        let ctx = ctx_q(4, 1);
        let lam = ScalarElem::from_i64(ctx.field(), 3);
        let w = DqModule::block_w(&ctx, 1, 2, &lam).unwrap();
        let expect = DqModule::block_v(&ctx, 1, 2, &ScalarElem::from_i64(ctx.field(), 6)).unwrap();
        assert!(w.matrix().agrees_with(expect.matrix()));
        // q = 2 lacks a square root in Q
        let ctx2 = ctx_q(2, 1);
        let lam2 = ScalarElem::from_i64(ctx2.field(), 3);
        assert!(matches!(
            DqModule::block_w(&ctx2, 1, 2, &lam2),
            Err(Error::ExtensionRequired(_))
        ));
    }

    /// A random conjugator with unit determinant: product of two triangular
    /// matrices with unit diagonal and small polynomial entries.
    pub(crate) fn random_unimodular(
        ctx: &QContext,
        n: usize,
        rng: &mut rand_chacha::ChaCha8Rng,
    ) -> SeriesMat {
        use rand::Rng;
        let field = ctx.field();
        let mut lower = SeriesMat::identity(field, n);
        let mut upper = SeriesMat::identity(field, n);
        for i in 0..n {
            for j in 0..n {
                if i > j {
                    let c = rng.gen_range(-2..3i64);
                    let e = rng.gen_range(0..3i64);
                    if c != 0 {
                        *lower.at_mut(i, j) =
                            LaurentSeries::monomial(ScalarElem::from_i64(field, c), e);
                    }
                } else if i < j {
                    let c = rng.gen_range(-2..3i64);
                    let e = rng.gen_range(0..3i64);
                    if c != 0 {
                        *upper.at_mut(i, j) =
                            LaurentSeries::monomial(ScalarElem::from_i64(field, c), e);
                    }
                }
            }
        }
        lower.mul(&upper)
    }
}
