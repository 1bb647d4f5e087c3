//! Koszul–Tate resolutions of ideals of base jets, their cohomology, the
//! linearized complex and lifting of derivations.

pub mod cohomology;
pub mod lift;
pub mod linearization;
pub mod resolution;

pub use cohomology::{
    advf_cohomology, complex_cohomology, exact_commutator, field_basis, is_coboundary, is_cocycle, Cochain,
    CochainDegree, CohomologyReport, DegreeCohomology, FieldDegree,
};
pub use lift::{induced_derivation, lift_derivation, lift_field};
pub use linearization::{linearization, LinearizationReport};
pub use resolution::{assemble_tilde_delta, kt_build, kt_verify, KTResolution, KtVerification};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derivations::Derivation;
    use crate::graded_core::{Ctx, GradedContext, GradedPolynomial};

    fn xy(j: u32) -> (Ctx, Derivation) {
        let c = GradedContext::from_pairs(&[("x", 0), ("y", 0), ("xi", -1)], j, 3).unwrap();
        let p = &GradedPolynomial::var(&c, 0) * &GradedPolynomial::var(&c, 1);
        (c.clone(), Derivation::coefficient_partial(&p, 2).unwrap())
    }

    #[test]
    fn functions_of_xy_model() {
        let (_, d) = xy(3);
        let r = complex_cohomology(&d, &[CochainDegree::Total(0), CochainDegree::Total(-1)]).unwrap();
        assert_eq!(r.get(0).dimension, 7);
        assert!(!r.get(0).stable);
        assert_eq!(r.get(1).dimension, 0);
    }

    #[test]
    fn fields_of_xy_model() {
        for j in [2, 4] {
            let (c, d) = xy(j);
            let r = advf_cohomology(&d, &[FieldDegree { total: 1, negative: None }]).unwrap();
            let h = r.get(0);
            assert_eq!(h.dimension, 1);
            assert!(h.stable);
            assert_eq!(h.cocycles, vec![Cochain::Field(Derivation::partial(&c, 2))]);
        }
        let (c, d) = xy(3);
        let euler = Derivation::coefficient_partial(&GradedPolynomial::var(&c, 0), 0)
            .unwrap()
            .checked_add(&Derivation::coefficient_partial(&GradedPolynomial::var(&c, 2), 2).unwrap())
            .unwrap();
        assert!(is_cocycle(&d, &euler).unwrap());
        assert!(!is_coboundary(&d, &euler).unwrap());
        let ydx = Derivation::coefficient_partial(&GradedPolynomial::var(&c, 1), 0).unwrap();
        assert!(!is_cocycle(&d, &ydx).unwrap());
    }

    #[test]
    fn smooth_zero_locus_has_no_h1() {
        let c = GradedContext::from_pairs(&[("x", 0), ("xi", -1)], 3, 3).unwrap();
        let d = Derivation::coefficient_partial(&GradedPolynomial::var(&c, 0), 1).unwrap();
        let r = advf_cohomology(&d, &[FieldDegree { total: 1, negative: None }]).unwrap();
        assert_eq!(r.get(0).dimension, 0);
    }
}
