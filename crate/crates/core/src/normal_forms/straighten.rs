use num_traits::{One, Zero};

use crate::derivations::{push_forward_log, working_context, Derivation, FieldGrading, FlowLog};
use crate::error::{Error, Result};
use crate::graded_core::{int, Ctx, GradedPolynomial, Monomial, Rat};

#[derive(Clone, Debug)]
pub struct Straightening {
    pub log: FlowLog,
    /// The base coordinate `v` becomes `d/dy` for.
    pub y: usize,
}

/// Coefficient-wise antiderivative in `y`.
pub(crate) fn integrate(p: &GradedPolynomial, y: usize) -> GradedPolynomial {
    let ctx = p.ctx();
    GradedPolynomial::from_terms(
        ctx,
        p.terms().map(|(m, c)| {
            let mut e = m.exponents().to_vec();
            e[y] += 1;
            (Monomial::from_exponents(e.clone()), c / int(e[y] as i64))
        }),
    )
}

/// Value of the base part of `v` at the origin.
pub fn base_part_at_origin(v: &Derivation) -> Vec<(usize, Rat)> {
    v.ctx()
        .base_indices()
        .into_iter()
        .map(|i| (i, v.value(i).constant_term()))
        .collect()
}

/// Straightens a degree-0 field whose base part is nonzero at the origin.
pub fn straighten(v: &Derivation) -> Result<Straightening> {
    let out = v.ctx().clone();
    let work = working_context(&out);
    straighten_in(&v.transfer(&work), &out)
}

/// As [`straighten`], with `v` already in the working window; the result is
/// checked after truncation to `check`.
pub fn straighten_in(v: &Derivation, check: &Ctx) -> Result<Straightening> {
    straighten_preferring(v, check, None)
}

/// Uses `prefer` as the straightened coordinate when its component at the
/// origin is nonzero.
pub fn straighten_preferring(v: &Derivation, check: &Ctx, prefer: Option<usize>) -> Result<Straightening> {
    if v.degree() != 0 && !v.is_zero() {
        return Err(Error::Precondition(format!("straightening needs degree 0, found {}", v.degree())));
    }
    let work = v.ctx().clone();
    let a = base_part_at_origin(v);
    let (y, ay) = a
        .iter()
        .find(|(i, c)| Some(*i) == prefer && !c.is_zero())
        .or_else(|| a.iter().find(|(_, c)| !c.is_zero()))
        .cloned()
        .ok_or_else(|| Error::Precondition("base part vanishes at the origin".into()))?;
    let mut log = FlowLog::new(&work);

    // linear stage: shears clear the other constant components, then a rescale
    for (j, aj) in &a {
        if *j == y || aj.is_zero() {
            continue;
        }
        let t = -(aj / &ay);
        let shear = Derivation::coefficient_partial(&GradedPolynomial::var(&work, y).scale(&t), *j)?;
        log.push_flow(shear)?;
    }
    log.push_rescale(y, Rat::one() / &ay)?;

    let dy = Derivation::partial(&work, y);
    let budget = crate::derivations::flow::series_budget(&work) * 4;
    let mut current = push_forward_log(&log, v)?;
    for step in 0..budget {
        let r = current.checked_sub(&dy)?;
        if r.transfer(check).is_zero() {
            return Ok(Straightening { log, y });
        }
        let k = r
            .min_grading(FieldGrading::Weight)
            .expect("nonzero residual has terms");
        if k < 0 {
            return Err(Error::stage("straighten", step, format!("constant residual {r}")));
        }
        let rk = r.component(FieldGrading::Weight, k);
        let values: Vec<GradedPolynomial> = rk.values().iter().map(|c| -&integrate(c, y)).collect();
        let w = Derivation::new(&work, 0, values)?;
        let mut one = FlowLog::new(&work);
        one.push_flow(w)?;
        current = push_forward_log(&one, &current)?;
        log.extend(&one)?;
    }
    Err(Error::NonTerminating { what: "straightening".into(), budget })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derivations::compose_flows;
    use crate::graded_core::{rat, GradedContext};

    #[test]
    fn already_straight() {
        let c = GradedContext::from_pairs(&[("y", 0)], 4, 2).unwrap();
        let s = straighten(&Derivation::partial(&c, 0)).unwrap();
        assert_eq!(s.log.effective_len(), 0);
    }

    #[test]
    fn logarithm_coordinate() {
        let c = GradedContext::from_pairs(&[("y", 0)], 4, 2).unwrap();
        let y = GradedPolynomial::var(&c, 0);
        let v = Derivation::coefficient_partial(&(&GradedPolynomial::one(&c) + &y), 0).unwrap();
        let s = straighten(&v).unwrap();
        assert_eq!(push_forward_log(&s.log, &v).unwrap(), Derivation::partial(&c, 0));
        let psi = compose_flows(&s.log, &c).unwrap();
        let expect = GradedPolynomial::from_terms(
            &c,
            (1..=4).map(|k| {
                let sign = if k % 2 == 1 { 1 } else { -1 };
                (Monomial::from_exponents(vec![k as u16]), rat(sign, k))
            }),
        );
        assert_eq!(psi.image(0), &expect);
    }

    #[test]
    fn graded_correction() {
        let c = GradedContext::from_pairs(&[("y", 0), ("theta", 1), ("eta", -1)], 3, 3).unwrap();
        let et = &GradedPolynomial::var(&c, 2) * &GradedPolynomial::var(&c, 1);
        let v = Derivation::coefficient_partial(&(&GradedPolynomial::one(&c) + &et), 0).unwrap();
        let s = straighten(&v).unwrap();
        assert_eq!(s.log.effective_len(), 1);
        assert_eq!(push_forward_log(&s.log, &v).unwrap(), Derivation::partial(&c, 0));
    }

    #[test]
    fn two_dimensional_with_shear() {
        let c = GradedContext::from_pairs(&[("x", 0), ("y", 0)], 3, 2).unwrap();
        let x = GradedPolynomial::var(&c, 0);
        let v = Derivation::coefficient_partial(&(&GradedPolynomial::one(&c) + &x), 0)
            .unwrap()
            .checked_add(&Derivation::coefficient_partial(&GradedPolynomial::constant(&c, int(2)), 1).unwrap())
            .unwrap();
        let s = straighten(&v).unwrap();
        assert_eq!(push_forward_log(&s.log, &v).unwrap(), Derivation::partial(&c, s.y));
    }
}
