//! Graded derivations, flows and coordinate changes.

pub mod derivation;
pub mod flow;

pub use derivation::{Derivation, FieldGrading};
pub use flow::{
    compose_flows, exp_flow, logarithm, push_forward, push_forward_log, working_context, Automorphism, FlowLog, FlowStep,
};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded_core::{int, Ctx, GradedContext, GradedPolynomial};

    fn xy() -> Ctx {
        GradedContext::from_pairs(&[("x", 0), ("y", 0), ("xi", -1)], 4, 3).unwrap()
    }

    fn delta(c: &Ctx) -> Derivation {
        let xy = &GradedPolynomial::var(c, 0) * &GradedPolynomial::var(c, 1);
        Derivation::coefficient_partial(&xy, 2).unwrap()
    }

    #[test]
    fn apply_examples() {
        let c = xy();
        let d = delta(&c);
        let x = GradedPolynomial::var(&c, 0);
        let y = GradedPolynomial::var(&c, 1);
        let xi = GradedPolynomial::var(&c, 2);
        assert_eq!(d.apply(&xi).unwrap(), &x * &y);
        assert!(d.apply(&x).unwrap().is_zero());
        assert_eq!(d.apply(&(&x * &xi)).unwrap(), &(&x * &x) * &y);
    }

    #[test]
    fn commutator_examples() {
        let c = xy();
        let d = delta(&c);
        let dx = Derivation::partial(&c, 0);
        let expect = Derivation::coefficient_partial(&GradedPolynomial::var(&c, 1), 2).unwrap().scale(&int(-1));
        assert_eq!(d.commutator(&dx).unwrap(), expect);
        assert!(d.commutator(&d).unwrap().is_zero());
        assert!(dx.commutator(&dx).unwrap().is_zero());
    }

    #[test]
    fn decompose_examples() {
        let c = GradedContext::from_pairs(&[("x", 0), ("theta", 1), ("eta", -1)], 3, 3).unwrap();
        let theta = GradedPolynomial::var(&c, 1);
        let q = Derivation::partial(&c, 2)
            .checked_add(&Derivation::coefficient_partial(&theta, 0).unwrap())
            .unwrap();
        let parts = q.decompose(FieldGrading::Negative);
        assert_eq!(parts[&-1], Derivation::partial(&c, 2));
        assert_eq!(parts[&0], Derivation::coefficient_partial(&theta, 0).unwrap());
        let c2 = xy();
        let d = delta(&c2);
        let parts = d.decompose(FieldGrading::Negative);
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[&-1], d);
        // contraction-type terms lower the polynomial degree by one
        let parts = d.decompose(FieldGrading::Arity);
        assert_eq!(parts[&-1], d);
    }
}
