//! Ideals of base jets, decided by row reduction on the truncated monomial basis.

use std::collections::BTreeMap;

use crate::graded_core::basis::window_monomials;
use crate::graded_core::{Ctx, GradedPolynomial, Monomial, Rat};
use crate::linalg::{EchelonBasis, PivotOrder, SparseVec};

/// Columns sort by (polynomial degree, monomial) so pivots land on the
/// highest-degree terms and normal forms keep low-degree representatives.
type Col = (u32, Monomial);

fn to_vec(p: &GradedPolynomial) -> SparseVec<Col> {
    p.terms().map(|(m, c)| ((m.weight(), m.clone()), c.clone())).collect()
}

fn from_vec(ctx: &Ctx, v: SparseVec<Col>) -> GradedPolynomial {
    GradedPolynomial::from_terms(ctx, v.into_iter().map(|((_, m), c)| (m, c)))
}

/// The ideal generated by some base functions inside the jet ring.
#[derive(Clone, Debug)]
pub struct IdealReducer {
    ctx: Ctx,
    generators: Vec<GradedPolynomial>,
    span: EchelonBasis<Col>,
}

impl IdealReducer {
    /// `base_ctx` must contain only degree-0 variables.
    pub fn new(base_ctx: &Ctx, generators: &[GradedPolynomial]) -> Self {
        let gens: Vec<GradedPolynomial> = generators.iter().map(|g| g.transfer(base_ctx)).collect();
        let mut span = EchelonBasis::new(PivotOrder::Highest);
        let monos = window_monomials(base_ctx, 0);
        for g in &gens {
            for m in &monos {
                let p = &GradedPolynomial::term(base_ctx, m.clone(), Rat::from_integer(1.into())) * g;
                if !p.is_zero() {
                    span.insert(&to_vec(&p));
                }
            }
        }
        IdealReducer { ctx: base_ctx.clone(), generators: gens, span }
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn generators(&self) -> &[GradedPolynomial] {
        &self.generators
    }

    /// Canonical remainder of a base function.
    pub fn reduce(&self, p: &GradedPolynomial) -> GradedPolynomial {
        let p = p.transfer(&self.ctx);
        from_vec(&self.ctx, self.span.reduce(&to_vec(&p)).0)
    }

    pub fn contains(&self, p: &GradedPolynomial) -> bool {
        self.reduce(p).is_zero()
    }

    /// Dimension of the ideal inside the jet ring.
    pub fn dimension(&self) -> usize {
        self.span.rank()
    }

    /// Dimension of jets modulo the ideal.
    pub fn quotient_dimension(&self) -> usize {
        window_monomials(&self.ctx, 0).len() - self.span.rank()
    }

    pub fn is_unit(&self) -> bool {
        self.contains(&GradedPolynomial::one(&self.ctx))
    }

    /// Reduces the base-variable part of every coefficient of `p`, keeping
    /// the graded factors; `p` may live in a larger context.
    pub fn reduce_coefficients(&self, p: &GradedPolynomial) -> GradedPolynomial {
        let ctx = p.ctx();
        let base: Vec<usize> = ctx.base_indices();
        let mut groups: BTreeMap<Vec<u16>, Vec<(Monomial, Rat)>> = BTreeMap::new();
        for (m, c) in p.terms() {
            let mut graded = m.exponents().to_vec();
            let mut base_part = vec![0u16; ctx.len()];
            for &i in &base {
                base_part[i] = graded[i];
                graded[i] = 0;
            }
            groups.entry(graded).or_default().push((Monomial::from_exponents(base_part), c.clone()));
        }
        let mut out = GradedPolynomial::zero(ctx);
        for (graded, terms) in groups {
            let b = GradedPolynomial::from_terms(ctx, terms);
            let r = self.reduce(&b).transfer(ctx);
            let g = GradedPolynomial::term(ctx, Monomial::from_exponents(graded), Rat::from_integer(1.into()));
            out = &out + &(&r * &g);
        }
        out
    }
}
