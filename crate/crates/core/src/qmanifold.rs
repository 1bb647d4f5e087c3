//! Homological vector fields: verification, curvature, negative part,
//! zero-locus DGA and anchor.

use num_traits::Zero;
use serde::Serialize;

use crate::derivations::{Derivation, FieldGrading};
use crate::error::{Error, Result};
use crate::graded_core::{Ctx, GradedPolynomial, Monomial, Rat};
use crate::ideal::IdealReducer;
use crate::linalg::dense_rank;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verification {
    Unchecked,
    Verified,
    Failed { variable: String, residual: GradedPolynomial },
}

/// A degree +1 derivation together with what is known about `[Q,Q]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QStructure {
    q: Derivation,
    verification: Verification,
}

impl QStructure {
    pub fn unchecked(q: Derivation) -> Self {
        QStructure { q, verification: Verification::Unchecked }
    }

    pub fn q(&self) -> &Derivation {
        &self.q
    }

    pub fn ctx(&self) -> &Ctx {
        self.q.ctx()
    }

    pub fn verification(&self) -> &Verification {
        &self.verification
    }

    pub fn is_verified(&self) -> bool {
        self.verification == Verification::Verified
    }

    /// Errors with the witness unless verified.
    pub fn require_verified(&self) -> Result<()> {
        match &self.verification {
            Verification::Verified => Ok(()),
            Verification::Failed { variable, residual } => Err(Error::NotHomological {
                variable: variable.clone(),
                residual: residual.to_string(),
            }),
            Verification::Unchecked => check_q(&self.q)?.require_verified(),
        }
    }
}

/// Computes `[Q,Q]` on every coordinate.
pub fn check_q(q: &Derivation) -> Result<QStructure> {
    if q.degree() != 1 && !q.is_zero() {
        return Err(Error::DegreeMismatch(format!("Q must have degree +1, found {}", q.degree())));
    }
    let sq = q.commutator(q)?;
    for (i, v) in sq.values().iter().enumerate() {
        if !v.is_zero() {
            return Ok(QStructure {
                q: q.clone(),
                verification: Verification::Failed {
                    variable: q.ctx().variable(i).name.clone(),
                    residual: v.clone(),
                },
            });
        }
    }
    Ok(QStructure { q: q.clone(), verification: Verification::Verified })
}

/// Curvature components, one per degree -1 coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurvatureSection {
    pub entries: Vec<(usize, GradedPolynomial)>,
}

impl CurvatureSection {
    pub fn component(&self, var: usize) -> Option<&GradedPolynomial> {
        self.entries.iter().find(|(v, _)| *v == var).map(|(_, p)| p)
    }

    pub fn vanishes_at_origin(&self) -> bool {
        self.entries.iter().all(|(_, p)| p.constant_term().is_zero())
    }

    pub fn polynomials(&self) -> Vec<GradedPolynomial> {
        self.entries.iter().map(|(_, p)| p.clone()).collect()
    }
}

pub fn curvature(q: &QStructure) -> CurvatureSection {
    let ctx = q.ctx();
    let entries = ctx
        .indices_of_degree(-1)
        .into_iter()
        .map(|i| (i, q.q().value(i).base_projection()))
        .collect();
    CurvatureSection { entries }
}

/// The sub-context of nonpositive-degree coordinates.
pub fn nonpositive_context(ctx: &Ctx) -> Ctx {
    let keep: Vec<usize> = (0..ctx.len()).filter(|&i| ctx.degree(i) <= 0).collect();
    ctx.restricted(&keep)
}

/// Q with positive coordinates set to zero, on the nonpositive sub-context.
pub fn negative_part(q: &QStructure) -> Result<QStructure> {
    let target = nonpositive_context(q.ctx());
    let reduced = q.q().transfer(&target);
    let reduced = Derivation::new(&target, 1, reduced.values().to_vec())?;
    check_q(&reduced)
}

/// Base functions modulo the curvature, with the induced differential on
/// the positive coordinates.
#[derive(Clone, Debug)]
pub struct ZeroLocusDGA {
    pub reducer: IdealReducer,
    pub ctx_plus: Ctx,
    pub q_plus: Derivation,
}

impl ZeroLocusDGA {
    pub fn ideal_generators(&self) -> &[GradedPolynomial] {
        self.reducer.generators()
    }

    /// Largest residual of `Q_plus^2` modulo the ideal, if any.
    pub fn square_residual(&self) -> Result<Option<(String, GradedPolynomial)>> {
        let sq = self.q_plus.commutator(&self.q_plus)?;
        for (i, v) in sq.values().iter().enumerate() {
            let r = self.reducer.reduce_coefficients(v);
            if !r.is_zero() {
                return Ok(Some((self.ctx_plus.variable(i).name.clone(), r)));
            }
        }
        Ok(None)
    }

    /// Two presentations agree when their ideals coincide and the
    /// differentials agree modulo the ideal.
    pub fn equivalent(&self, other: &ZeroLocusDGA) -> Result<bool> {
        for g in other.ideal_generators() {
            if !self.reducer.contains(g) {
                return Ok(false);
            }
        }
        for g in self.ideal_generators() {
            if !other.reducer.contains(g) {
                return Ok(false);
            }
        }
        if !self.ctx_plus.same_variables(&other.ctx_plus) {
            return Ok(false);
        }
        let theirs = other.q_plus.transfer(&self.ctx_plus);
        let diff = self.q_plus.checked_sub(&theirs)?;
        Ok(diff.values().iter().all(|v| self.reducer.reduce_coefficients(v).is_zero()))
    }
}

pub fn base_context(ctx: &Ctx) -> Ctx {
    ctx.restricted(&ctx.base_indices())
}

pub fn nonnegative_context(ctx: &Ctx) -> Ctx {
    let keep: Vec<usize> = (0..ctx.len()).filter(|&i| ctx.degree(i) >= 0).collect();
    ctx.restricted(&keep)
}

/// Reduces a derivation on base plus positive coordinates modulo an ideal.
pub fn reduce_field(reducer: &IdealReducer, x: &Derivation) -> Result<Derivation> {
    let values = x.values().iter().map(|v| reducer.reduce_coefficients(v)).collect();
    Derivation::new(x.ctx(), x.degree(), values)
}

pub fn zero_locus_dga(q: &QStructure) -> Result<ZeroLocusDGA> {
    let ctx = q.ctx();
    let kappa = curvature(q);
    let reducer = IdealReducer::new(&base_context(ctx), &kappa.polynomials());
    let ctx_plus = nonnegative_context(ctx);
    let q0 = q.q().component(FieldGrading::Negative, 0).transfer(&ctx_plus);
    let q_plus = reduce_field(&reducer, &Derivation::new(&ctx_plus, 1, q0.values().to_vec())?)?;
    Ok(ZeroLocusDGA { reducer, ctx_plus, q_plus })
}

#[derive(Clone, Debug, Serialize)]
pub struct AnchorReport {
    pub rows: Vec<String>,
    pub columns: Vec<String>,
    pub matrix: Vec<Vec<String>>,
    pub rank: usize,
    /// False when the curvature does not vanish at the origin; the matrix
    /// then depends on the chosen splitting.
    pub at_zero_locus: bool,
    #[serde(skip)]
    pub entries: Vec<Vec<Rat>>,
}

/// Entry (i, j) is the constant term of the coefficient of `theta_j` in `Q(x_i)`.
pub fn anchor(q: &QStructure) -> AnchorReport {
    let ctx = q.ctx();
    let rows = ctx.base_indices();
    let cols = ctx.indices_of_degree(1);
    let entries: Vec<Vec<Rat>> = rows
        .iter()
        .map(|&i| {
            cols.iter()
                .map(|&j| q.q().value(i).coefficient(&Monomial::var(ctx.len(), j)))
                .collect()
        })
        .collect();
    let rank = if cols.is_empty() { 0 } else { dense_rank(&entries) };
    AnchorReport {
        rows: rows.iter().map(|&i| ctx.variable(i).name.clone()).collect(),
        columns: cols.iter().map(|&j| ctx.variable(j).name.clone()).collect(),
        matrix: entries.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect(),
        rank,
        at_zero_locus: curvature(q).vanishes_at_origin(),
        entries,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded_core::{int, GradedContext};

    fn p(c: &Ctx, i: usize) -> GradedPolynomial {
        GradedPolynomial::var(c, i)
    }

    #[test]
    fn xy_example() {
        let c = GradedContext::from_pairs(&[("x", 0), ("y", 0), ("xi", -1)], 3, 3).unwrap();
        let d = Derivation::coefficient_partial(&(&p(&c, 0) * &p(&c, 1)), 2).unwrap();
        let q = check_q(&d).unwrap();
        assert!(q.is_verified());
        assert_eq!(curvature(&q).component(2).unwrap(), &(&p(&c, 0) * &p(&c, 1)));
        let z = zero_locus_dga(&q).unwrap();
        assert_eq!(z.reducer.quotient_dimension(), 7);
        assert!(z.q_plus.is_zero());
        let a = anchor(&q);
        assert_eq!(a.rank, 0);
        assert!(a.columns.is_empty());
    }

    #[test]
    fn shifted_example_and_failure() {
        let c = GradedContext::from_pairs(&[("x", 0), ("theta", 1), ("eta", -1)], 3, 3).unwrap();
        let q = Derivation::partial(&c, 2)
            .checked_add(&Derivation::coefficient_partial(&p(&c, 1), 0).unwrap())
            .unwrap();
        let qs = check_q(&q).unwrap();
        assert!(qs.is_verified());
        assert_eq!(curvature(&qs).component(2).unwrap(), &GradedPolynomial::one(&c));
        assert!(zero_locus_dga(&qs).unwrap().reducer.is_unit());
        // mutate: eta -> 1 + x is no longer homological
        let bad = q.with_value(2, &GradedPolynomial::one(&c) + &p(&c, 0)).unwrap();
        match check_q(&bad).unwrap().verification() {
            Verification::Failed { variable, .. } => assert_eq!(variable, "eta"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn negative_part_and_zero_locus() {
        let c = GradedContext::from_pairs(&[("x", 0), ("y", 0), ("xi", -1), ("theta", 1)], 3, 3).unwrap();
        let q = Derivation::coefficient_partial(&p(&c, 0), 2)
            .unwrap()
            .checked_add(&Derivation::coefficient_partial(&(&p(&c, 1) * &p(&c, 3)), 1).unwrap())
            .unwrap();
        let qs = check_q(&q).unwrap();
        assert!(qs.is_verified());
        let neg = negative_part(&qs).unwrap();
        assert!(neg.is_verified());
        assert_eq!(neg.ctx().len(), 3);
        assert_eq!(negative_part(&neg).unwrap(), neg);
        let z = zero_locus_dga(&qs).unwrap();
        assert!(z.reducer.contains(&p(&c, 0)));
        let yi = z.ctx_plus.index_of("y").unwrap();
        let ti = z.ctx_plus.index_of("theta").unwrap();
        assert_eq!(z.q_plus.value(yi), &(&p(&z.ctx_plus, yi) * &p(&z.ctx_plus, ti)));
        assert!(z.square_residual().unwrap().is_none());
    }

    #[test]
    fn anchor_examples() {
        let c = GradedContext::from_pairs(&[("y", 0), ("theta", 1)], 6, 3).unwrap();
        let one_y = &GradedPolynomial::one(&c) + &p(&c, 0);
        let q = Derivation::coefficient_partial(&(&one_y * &p(&c, 1)), 0).unwrap();
        let a = anchor(&check_q(&q).unwrap());
        assert_eq!(a.rank, 1);
        assert_eq!(a.entries[0][0], int(1));
    }
}
