use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::derivations::{push_forward, working_context, Derivation, FieldGrading, FlowLog};
use crate::error::{Error, Result};
use crate::graded_core::basis::window_monomials_bounded;
use crate::graded_core::{Ctx, GradedPolynomial, Rat};
use crate::qmanifold::{check_q, curvature, QStructure};

/// Inverse of a base jet with nonzero constant term, by geometric series.
pub fn jet_inverse(f: &GradedPolynomial) -> Result<GradedPolynomial> {
    let c = f.constant_term();
    if c.is_zero() {
        return Err(Error::Precondition("function vanishes at the origin".into()));
    }
    let ctx = f.ctx();
    let inv_c = Rat::one() / &c;
    // f = c (1 + u) with u vanishing at the origin
    let u = &f.scale(&inv_c) - &GradedPolynomial::one(ctx);
    let mu = -&u;
    let mut term = GradedPolynomial::one(ctx);
    let mut acc = term.clone();
    loop {
        term = &term * &mu;
        if term.is_zero() {
            break;
        }
        acc = &acc + &term;
    }
    Ok(acc.scale(&inv_c))
}

/// `α = κ_i^{-1} η_i` for the first degree -1 coordinate whose curvature
/// component is a unit at the origin.
pub fn homotopy_alpha(q: &QStructure) -> Result<GradedPolynomial> {
    let kappa = curvature(q);
    for (i, k) in &kappa.entries {
        if !k.constant_term().is_zero() {
            let inv = jet_inverse(k)?;
            return Ok(&inv * &GradedPolynomial::var(q.ctx(), *i));
        }
    }
    Err(Error::Precondition(
        "curvature vanishes at the origin; the origin lies in the zero locus".into(),
    ))
}

/// The derivation `i_κ`: each degree -1 coordinate goes to its curvature component.
pub fn contraction_with_curvature(q: &QStructure) -> Result<Derivation> {
    let ctx = q.ctx();
    let mut values = vec![GradedPolynomial::zero(ctx); ctx.len()];
    for (i, k) in curvature(q).entries {
        values[i] = k;
    }
    Derivation::new(ctx, 1, values)
}

#[derive(Clone, Debug)]
pub struct Trivialization {
    pub q_final: QStructure,
    pub log: FlowLog,
    pub alpha: GradedPolynomial,
}

fn assert_component_zero(q: &Derivation, out: &Ctx, grading: FieldGrading, n: i64, stage: &str, step: usize) -> Result<()> {
    let rest = q.component(grading, n).transfer(out);
    if !rest.is_zero() {
        return Err(Error::stage(stage, step, format!("component {n} survived: {rest}")));
    }
    Ok(())
}

/// Conjugates Q to `i_κ` where the curvature is invertible.
pub fn trivialize(q: &QStructure) -> Result<Trivialization> {
    q.require_verified()?;
    let out = q.ctx().clone();
    let alpha = homotopy_alpha(q)?;
    let work = working_context(&out);
    let mut qw = q.q().transfer(&work);
    let alpha_w = homotopy_alpha(&QStructure::unchecked(qw.clone()))?;
    let mut log = FlowLog::new(&work);
    let minus = -Rat::one();

    // stage 1: remove negative-degree components 0, 1, 2, ...
    for n in 0..out.filtration_order() as i64 {
        let y = qw.component(FieldGrading::Negative, n);
        if y.is_zero() {
            continue;
        }
        let v = y.left_multiply(&alpha_w)?.scale(&minus);
        qw = push_forward(&v, &qw)?;
        log.push_flow(v)?;
        assert_component_zero(&qw, &out, FieldGrading::Negative, n, "stage 1", n as usize)?;
    }

    // stage 2: inside the remaining negative-degree -1 part, remove arity 0, 1, 2, ...
    let max_arity = qw
        .decompose(FieldGrading::Arity)
        .keys()
        .next_back()
        .copied()
        .unwrap_or(-1);
    for i in 0..=max_arity.max(-1) {
        let y = qw.component(FieldGrading::Arity, i);
        if y.is_zero() {
            continue;
        }
        let v = y.left_multiply(&alpha_w)?.scale(&minus);
        qw = push_forward(&v, &qw)?;
        log.push_flow(v)?;
        assert_component_zero(&qw, &out, FieldGrading::Arity, i, "stage 2", i as usize)?;
    }

    let q_final = qw.transfer(&out);
    let target = contraction_with_curvature(q)?;
    if q_final != target {
        let diff = q_final.checked_sub(&target)?;
        return Err(Error::stage("final", 0, format!("result differs from i_kappa by {diff}")));
    }
    Ok(Trivialization { q_final: check_q(&q_final)?, log, alpha })
}

#[derive(Clone, Debug, Serialize)]
pub struct HomotopyReport {
    /// total degree -> number of basis monomials checked
    pub checked: BTreeMap<i32, usize>,
    pub failures: Vec<String>,
}

impl HomotopyReport {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks `Q h + h Q = id` for `h = α·` on the given functions.
pub fn contracting_homotopy(q: &Derivation, alpha: &GradedPolynomial, sample: &[GradedPolynomial]) -> Result<HomotopyReport> {
    let mut report = HomotopyReport { checked: BTreeMap::new(), failures: Vec::new() };
    for f in sample {
        let lhs = &q.apply(&alpha.multiply_exact(f)?)? + &alpha.multiply_exact(&q.apply(f)?)?.truncated();
        let residual = &lhs.truncated() - &f.truncated();
        let deg = f.total_degrees().first().copied().unwrap_or(0);
        *report.checked.entry(deg).or_insert(0) += 1;
        if !residual.is_zero() {
            report.failures.push(format!("{f}: residual {residual}"));
        }
    }
    Ok(report)
}

/// Every window monomial with positive degree up to `max_pos`.
pub fn full_basis(ctx: &Ctx, max_pos: u32) -> Vec<GradedPolynomial> {
    window_monomials_bounded(ctx, max_pos)
        .into_iter()
        .map(|m| GradedPolynomial::term(ctx, m, Rat::one()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derivations::push_forward_log;
    use crate::graded_core::{int, GradedContext};

    fn shifted() -> (Ctx, Derivation) {
        let c = GradedContext::from_pairs(&[("x", 0), ("theta", 1), ("eta", -1)], 3, 3).unwrap();
        let q = Derivation::partial(&c, 2)
            .checked_add(&Derivation::coefficient_partial(&GradedPolynomial::var(&c, 1), 0).unwrap())
            .unwrap();
        (c, q)
    }

    #[test]
    fn alpha_examples() {
        let (c, q) = shifted();
        assert_eq!(homotopy_alpha(&check_q(&q).unwrap()).unwrap(), GradedPolynomial::var(&c, 2));
        let c = GradedContext::from_pairs(&[("x", 0), ("eta", -1)], 3, 3).unwrap();
        let x = GradedPolynomial::var(&c, 0);
        let q = Derivation::coefficient_partial(&(&GradedPolynomial::one(&c) + &x), 1).unwrap();
        let a = homotopy_alpha(&check_q(&q).unwrap()).unwrap();
        let series = &(&(&GradedPolynomial::one(&c) - &x) + &x.pow(2)) - &x.pow(3);
        assert_eq!(a, &series * &GradedPolynomial::var(&c, 1));
        let c = GradedContext::from_pairs(&[("x", 0), ("y", 0), ("xi", -1)], 3, 3).unwrap();
        let q = Derivation::coefficient_partial(&(&GradedPolynomial::var(&c, 0) * &GradedPolynomial::var(&c, 1)), 2).unwrap();
        assert!(homotopy_alpha(&check_q(&q).unwrap()).is_err());
    }

    #[test]
    fn trivializes_shifted_example() {
        let (c, q) = shifted();
        let t = trivialize(&check_q(&q).unwrap()).unwrap();
        assert_eq!(t.q_final.q(), &Derivation::partial(&c, 2));
        assert_eq!(t.log.effective_len(), 1);
        assert_eq!(push_forward_log(&t.log, &q).unwrap(), *t.q_final.q());
        let v = match &t.log.transfer(&c).steps()[0] {
            crate::derivations::FlowStep::Flow { generator, .. } => generator.clone(),
            other => panic!("unexpected {other:?}"),
        };
        let ex = crate::derivations::exp_flow(&v, &int(1)).unwrap();
        let et = &GradedPolynomial::var(&c, 2) * &GradedPolynomial::var(&c, 1);
        assert_eq!(ex.image(0), &(&GradedPolynomial::var(&c, 0) - &et));
    }

    #[test]
    fn fixed_point() {
        let c = GradedContext::from_pairs(&[("x", 0), ("eta", -1)], 3, 3).unwrap();
        let q = Derivation::coefficient_partial(&(&GradedPolynomial::one(&c) + &GradedPolynomial::var(&c, 0)), 1).unwrap();
        let t = trivialize(&check_q(&q).unwrap()).unwrap();
        assert_eq!(t.q_final.q(), &q);
        assert_eq!(t.log.effective_len(), 0);
    }

    #[test]
    fn homotopy_on_full_basis() {
        let (c, _) = shifted();
        let q = Derivation::partial(&c, 2);
        let rep = contracting_homotopy(&q, &GradedPolynomial::var(&c, 2), &full_basis(&c, 3)).unwrap();
        assert!(rep.holds(), "{:?}", rep.failures);
    }
}
