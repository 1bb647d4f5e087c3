//! Seeded generators of test inputs.
//!
//! Conjugations use triangular flows: the value on each coordinate only
//! involves coordinates listed before it, so every exponential is a finite
//! sum and results are exact before truncation.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::derivations::{push_forward, Derivation};
use crate::error::Result;
use crate::graded_core::basis::window_monomials;
use crate::graded_core::{Ctx, GradedContext, GradedPolynomial, Monomial, Rat};
use crate::qmanifold::{check_q, QStructure};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn small_rational<R: Rng>(rng: &mut R) -> Rat {
    loop {
        let n: i64 = rng.gen_range(-3..=3);
        if n != 0 {
            let d: i64 = rng.gen_range(1..=2);
            return Rat::new(n.into(), d.into());
        }
    }
}

/// A random homogeneous polynomial of the given total degree with up to
/// `terms` window monomials.
pub fn random_polynomial<R: Rng>(rng: &mut R, ctx: &Ctx, degree: i32, terms: usize) -> GradedPolynomial {
    let monos = window_monomials(ctx, degree);
    if monos.is_empty() {
        return GradedPolynomial::zero(ctx);
    }
    let picked: Vec<(Monomial, Rat)> =
        (0..terms).map(|_| (monos[rng.gen_range(0..monos.len())].clone(), small_rational(rng))).collect();
    let mut out = GradedPolynomial::zero(ctx);
    for (m, c) in picked {
        out = &out + &GradedPolynomial::term(ctx, m, c);
    }
    out
}

/// A random derivation of the given degree.
pub fn random_derivation<R: Rng>(rng: &mut R, ctx: &Ctx, degree: i32, terms: usize) -> Derivation {
    let mut values = Vec::with_capacity(ctx.len());
    for i in 0..ctx.len() {
        let n = rng.gen_range(0..=terms);
        values.push(random_polynomial(rng, ctx, ctx.degree(i) + degree, n));
    }
    Derivation::new(ctx, degree, values).expect("homogeneous by construction")
}

/// A degree-0 field vanishing at the origin whose value on each coordinate
/// only involves earlier coordinates of a random order.
pub fn triangular_flow<R: Rng>(rng: &mut R, ctx: &Ctx, terms: usize, max_weight: u32) -> Derivation {
    let mut order: Vec<usize> = (0..ctx.len()).collect();
    order.shuffle(rng);
    let mut values = vec![GradedPolynomial::zero(ctx); ctx.len()];
    for _ in 0..terms {
        let pos = rng.gen_range(0..order.len());
        let target = order[pos];
        let earlier = &order[..pos];
        let candidates: Vec<Monomial> = window_monomials(ctx, ctx.degree(target))
            .into_iter()
            .filter(|m| !m.is_one() && m.weight() <= max_weight)
            .filter(|m| (0..ctx.len()).all(|i| m.exponent(i) == 0 || earlier.contains(&i)))
            .collect();
        if candidates.is_empty() {
            continue;
        }
        let m = candidates[rng.gen_range(0..candidates.len())].clone();
        values[target] = &values[target] + &GradedPolynomial::term(ctx, m, small_rational(rng));
    }
    Derivation::new(ctx, 0, values).expect("degree 0 by construction")
}

fn fits(x: &Derivation, ctx: &Ctx) -> bool {
    x.terms().all(|(_, m, _)| m.in_window(ctx))
}

/// Conjugates `q` by triangular flows in a wide window and keeps the result
/// only if nothing was cut off by the narrower window of `q`.
pub fn conjugate_exactly<R: Rng>(rng: &mut R, q: &Derivation, flows: usize, terms: usize) -> Option<Derivation> {
    let ctx = q.ctx().clone();
    let wide = ctx.with_orders(ctx.jet_order() * 3 + 4, ctx.filtration_order() * 3 + 4);
    let mut cur = q.transfer(&wide);
    for _ in 0..flows {
        let v = triangular_flow(rng, &ctx, terms, 2).transfer(&wide);
        cur = push_forward(&v, &cur).ok()?;
    }
    if fits(&cur, &ctx) {
        Some(cur.transfer(&ctx))
    } else {
        None
    }
}

/// A base polynomial with nonzero constant term.
fn random_unit<R: Rng>(rng: &mut R, ctx: &Ctx) -> GradedPolynomial {
    let base = crate::qmanifold::base_context(ctx);
    let extra = random_polynomial(rng, &base, 0, 2).transfer(ctx);
    let extra = GradedPolynomial::from_terms(ctx, extra.terms().filter(|(m, _)| !m.is_one()).map(|(m, c)| (m.clone(), c.clone())));
    &GradedPolynomial::constant(ctx, small_rational(rng)) + &extra
}

/// Charts used for random Q-structures with invertible curvature.
fn unit_charts(jet: u32, filt: u32) -> Vec<Ctx> {
    let shapes: [&[(&str, i32)]; 4] = [
        &[("x", 0), ("eta", -1), ("theta", 1)],
        &[("x", 0), ("y", 0), ("eta", -1), ("theta", 1)],
        &[("x", 0), ("eta1", -1), ("eta2", -1), ("theta", 1)],
        &[("x", 0), ("y", 0), ("eta", -1), ("theta", 1), ("omega", 3)],
    ];
    shapes.iter().map(|s| GradedContext::from_pairs(s, jet, filt).expect("valid chart")).collect()
}

/// A verified Q whose curvature is invertible at the origin: the contraction
/// with a random curvature, conjugated by random triangular flows.
pub fn random_unit_curvature_q<R: Rng>(rng: &mut R, jet: u32, filt: u32) -> QStructure {
    let charts = unit_charts(jet, filt);
    loop {
        let ctx = charts[rng.gen_range(0..charts.len())].clone();
        let mut values = vec![GradedPolynomial::zero(&ctx); ctx.len()];
        let etas = ctx.indices_of_degree(-1);
        for (k, &e) in etas.iter().enumerate() {
            values[e] = if k == 0 {
                random_unit(rng, &ctx)
            } else {
                let base = crate::qmanifold::base_context(&ctx);
                random_polynomial(rng, &base, 0, 2).transfer(&ctx)
            };
        }
        let q0 = Derivation::new(&ctx, 1, values).expect("degree +1");
        let flows = rng.gen_range(1..=3);
        if let Some(q) = conjugate_exactly(rng, &q0, flows, 3) {
            if let Ok(qs) = check_q(&q) {
                if qs.is_verified() && q != q0 {
                    return qs;
                }
            }
        }
    }
}

/// `x_i * r_i` images, which preserve every monomial ideal.
pub fn random_monomial_preserving<R: Rng>(rng: &mut R, base: &Ctx) -> Vec<GradedPolynomial> {
    base.base_indices()
        .into_iter()
        .map(|i| {
            let mut r = random_polynomial(rng, base, 0, 2);
            if rng.gen_bool(0.5) {
                r = &r + &GradedPolynomial::constant(base, small_rational(rng));
            }
            &GradedPolynomial::var(base, i) * &r
        })
        .collect()
}

/// Direct sum of `pairs` contractible pairs `theta_k d/dy_k` and `R`,
/// conjugated by random origin-fixing flows.
pub fn random_split_input<R: Rng>(rng: &mut R, pairs: usize, jet: u32, filt: u32) -> (QStructure, Derivation) {
    let mut spec: Vec<(String, i32)> = Vec::new();
    for k in 1..=pairs {
        spec.push((format!("y{k}"), 0));
        spec.push((format!("theta{k}"), 1));
    }
    spec.push(("x".into(), 0));
    spec.push(("xi".into(), -1));
    let refs: Vec<(&str, i32)> = spec.iter().map(|(n, d)| (n.as_str(), *d)).collect();
    let ctx = GradedContext::from_pairs(&refs, jet, filt).expect("valid chart");
    let x = ctx.index_of("x").expect("declared");
    let xi = ctx.index_of("xi").expect("declared");
    loop {
        let k = rng.gen_range(1..=2u32);
        let r0 = Derivation::coefficient_partial(&GradedPolynomial::var(&ctx, x).pow(k + 1).scale(&small_rational(rng)), xi)
            .expect("homogeneous");
        let mut q0 = r0.clone();
        for p in 1..=pairs {
            let y = ctx.index_of(&format!("y{p}")).expect("declared");
            let t = ctx.index_of(&format!("theta{p}")).expect("declared");
            q0 = q0.checked_add(&Derivation::coefficient_partial(&GradedPolynomial::var(&ctx, t), y).expect("homogeneous")).expect("same chart");
        }
        let flows = rng.gen_range(1..=2);
        if let Some(q) = conjugate_exactly(rng, &q0, flows, 3) {
            if let Ok(qs) = check_q(&q) {
                if qs.is_verified() {
                    return (qs, r0);
                }
            }
        }
    }
}

/// A zero-locus differential `x_i -> x_i r_i theta` on a chart with one
/// degree +1 coordinate `theta`.
pub fn random_qplus<R: Rng>(rng: &mut R, ctx: &Ctx) -> Result<Derivation> {
    let theta = ctx.indices_of_degree(1)[0];
    let base = crate::qmanifold::base_context(ctx);
    let imgs = random_monomial_preserving(rng, &base);
    let mut values = vec![GradedPolynomial::zero(ctx); ctx.len()];
    for (k, &i) in ctx.base_indices().iter().enumerate() {
        values[i] = &imgs[k].transfer(ctx) * &GradedPolynomial::var(ctx, theta);
    }
    Derivation::new(ctx, 1, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_reproducible_and_valid() {
        let a = random_unit_curvature_q(&mut rng(7), 3, 4);
        let b = random_unit_curvature_q(&mut rng(7), 3, 4);
        assert_eq!(a, b);
        assert!(a.is_verified());
        let (s, _) = random_split_input(&mut rng(3), 2, 3, 3);
        assert!(s.is_verified());
    }
}
