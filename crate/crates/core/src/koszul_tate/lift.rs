use super::cohomology::solve_function;
use super::resolution::KTResolution;
use crate::derivations::Derivation;
use crate::error::{Error, Result};
use crate::graded_core::{Ctx, GradedPolynomial};
use crate::ideal::IdealReducer;
use crate::linalg::PivotOrder;

/// Window used while solving level by level; errors from the cut-off stay
/// above the caller's jet order.
pub(crate) fn lifting_context(delta: &Derivation) -> Ctx {
    let ctx = delta.ctx();
    let wmax = delta.terms().map(|(_, m, _)| m.base_degree(ctx)).max().unwrap_or(0);
    let levels = ctx.variables().iter().map(|v| v.negative_degree()).max().unwrap_or(0);
    ctx.with_orders(ctx.jet_order() + levels * (wmax + 1) + 2, ctx.filtration_order())
}

/// Negative-degree coordinates, shallowest first.
fn negative_generators(ctx: &Ctx) -> Vec<usize> {
    let mut out: Vec<usize> = (0..ctx.len()).filter(|&i| ctx.degree(i) < 0).collect();
    out.sort_by_key(|&i| -ctx.degree(i));
    out
}

/// Extends `fixed` (read on the nonnegative coordinates) to a field
/// commuting with `delta`, solving one generator at a time.
pub fn lift_field(delta: &Derivation, fixed: &Derivation, order: PivotOrder) -> Result<Derivation> {
    let ctx = delta.ctx().clone();
    let work = lifting_context(delta);
    let d = delta.transfer(&work);
    let mut q = fixed.transfer(&work);
    let negs = negative_generators(&ctx);
    for &g in &negs {
        q = q.with_value(g, GradedPolynomial::zero(&work))?;
    }
    let sign = if fixed.is_odd() { -1 } else { 1 };
    // keep the lift homogeneous in the negative grading when `fixed` is
    let gradings: std::collections::BTreeSet<i64> = (0..ctx.len())
        .filter(|&i| ctx.degree(i) >= 0)
        .flat_map(|i| fixed.value(i).monomials().map(|m| m.negative_degree(fixed.ctx()) as i64))
        .collect();
    let shift = match gradings.len() {
        0 => Some(0),
        1 => gradings.first().copied(),
        _ => None,
    };
    for &g in &negs {
        let t = q.apply(d.value(g))?.scale(&crate::graded_core::int(sign));
        let deg = ctx.degree(g) + fixed.degree();
        let neg = shift.map(|n| (n + ctx.variable(g).negative_degree() as i64).max(0) as u32);
        let u = solve_function(&d, &t, deg, neg, &work, order)?.ok_or_else(|| {
            Error::Unsolvable(format!(
                "no value on `{}` (degree {deg}); the truncation may be too small",
                ctx.variable(g).name
            ))
        })?;
        q = q.with_value(g, u)?;
    }
    let q = q.transfer(&ctx);
    let residual = delta.commutator(&q)?;
    if !residual.is_zero() {
        return Err(Error::stage("lift", 0, format!("[delta, q] = {residual}")));
    }
    Ok(q)
}

/// Images of the base coordinates modulo the ideal.
pub fn induced_derivation(x: &Derivation, reducer: &IdealReducer) -> Vec<GradedPolynomial> {
    let ctx = x.ctx();
    ctx.base_indices()
        .into_iter()
        .map(|i| reducer.reduce(&x.value(i).base_projection()))
        .collect()
}

/// Lifts a derivation of base jets modulo the ideal, given by the images
/// of the base coordinates, to a degree-0 field commuting with `delta`.
pub fn lift_derivation(images: &[GradedPolynomial], kt: &KTResolution) -> Result<Derivation> {
    let base = kt.base_ctx();
    let reducer = kt.reducer();
    if images.len() != base.len() {
        return Err(Error::Precondition(format!("expected {} images, got {}", base.len(), images.len())));
    }
    let qi = Derivation::new(&base, 0, images.iter().map(|p| p.transfer(&base)).collect())?;
    for f in &kt.ideal {
        let r = reducer.reduce(&qi.apply(f)?);
        if !r.is_zero() {
            return Err(Error::Precondition(format!("the derivation does not preserve the ideal: {f} -> remainder {r}")));
        }
    }
    let ctx = kt.ctx();
    let fixed = qi.transfer(ctx);
    let q = lift_field(kt.delta(), &fixed, PivotOrder::Lowest)?;
    let induced = induced_derivation(&q, &reducer);
    for (i, p) in induced.iter().enumerate() {
        if *p != reducer.reduce(&images[i]) {
            return Err(Error::stage("lift", 1, format!("induced image of `{}` changed", base.variable(i).name)));
        }
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded_core::GradedContext;
    use crate::koszul_tate::kt_build;

    #[test]
    fn euler_on_x() {
        let c = GradedContext::from_pairs(&[("x", 0), ("y", 0)], 4, 1).unwrap();
        let x = GradedPolynomial::var(&c, 0);
        let y = GradedPolynomial::var(&c, 1);
        let kt = kt_build(&[&x * &y], 2).unwrap();
        let q = lift_derivation(&[x.clone(), GradedPolynomial::zero(&c)], &kt).unwrap();
        let k = kt.ctx();
        let xi = k.index_of("xi").unwrap();
        assert_eq!(q.value(xi), &GradedPolynomial::var(k, xi));
        assert!(lift_derivation(&[GradedPolynomial::zero(&c), GradedPolynomial::zero(&c)], &kt).unwrap().is_zero());
        // y d/dx does not preserve (xy)
        assert!(lift_derivation(&[y, GradedPolynomial::zero(&c)], &kt).is_err());
    }

    #[test]
    fn corrections_on_deeper_generators() {
        let c = GradedContext::from_pairs(&[("x", 0), ("y", 0)], 4, 1).unwrap();
        let x = GradedPolynomial::var(&c, 0);
        let y = GradedPolynomial::var(&c, 1);
        let kt = kt_build(&[&x * &x, &x * &y], 3).unwrap();
        let q = lift_derivation(&[GradedPolynomial::zero(&c), y], &kt).unwrap();
        assert!(kt.delta().commutator(&q).unwrap().is_zero());
    }
}
