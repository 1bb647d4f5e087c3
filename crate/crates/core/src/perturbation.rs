//! Reconstruction of a Q-structure from a Koszul–Tate part and a zero-locus
//! differential, and gauge equivalence between two reconstructions.

use crate::derivations::{compose_flows, push_forward, push_forward_log, Derivation, FieldGrading, FlowLog};
use crate::error::{Error, Result};
use crate::graded_core::{rat, Ctx, GradedPolynomial};
use crate::ideal::IdealReducer;
use crate::koszul_tate::cohomology::{solve_adjoint, FieldDegree};
use crate::koszul_tate::lift::{lift_field, lifting_context};
use crate::linalg::PivotOrder;
use crate::qmanifold::{
    base_context, check_q, curvature, negative_part, nonnegative_context, reduce_field, zero_locus_dga, QStructure,
    ZeroLocusDGA,
};

fn working(delta: &Derivation) -> Ctx {
    let ctx = delta.ctx();
    let lift = lifting_context(delta);
    let extra = lift.jet_order() - ctx.jet_order();
    ctx.with_orders(ctx.jet_order() + extra + ctx.filtration_order() + 1, ctx.filtration_order())
}

/// The zero-locus data a construction must reproduce.
pub fn target_dga(delta: &QStructure, qplus: &Derivation) -> Result<ZeroLocusDGA> {
    let ctx = delta.ctx();
    let reducer = IdealReducer::new(&base_context(ctx), &curvature(delta).polynomials());
    let ctx_plus = nonnegative_context(ctx);
    let qp = Derivation::new(&ctx_plus, 1, qplus.transfer(&ctx_plus).values().to_vec())?;
    Ok(ZeroLocusDGA { q_plus: reduce_field(&reducer, &qp)?, reducer, ctx_plus })
}

fn check_qplus(delta: &QStructure, qplus: &Derivation) -> Result<ZeroLocusDGA> {
    if qplus.degree() != 1 {
        return Err(Error::DegreeMismatch(format!("Q_plus must have degree +1, found {}", qplus.degree())));
    }
    let dga = target_dga(delta, qplus)?;
    let qp = qplus.transfer(&dga.ctx_plus);
    for f in dga.ideal_generators() {
        let r = dga.reducer.reduce_coefficients(&qp.apply(&f.transfer(&dga.ctx_plus))?);
        if !r.is_zero() {
            return Err(Error::Precondition(format!("Q_plus does not preserve the ideal: {f} -> {r}")));
        }
    }
    let sq = qp.commutator(&qp)?;
    for (i, v) in sq.values().iter().enumerate() {
        let r = dga.reducer.reduce_coefficients(v);
        if !r.is_zero() {
            return Err(Error::Precondition(format!(
                "Q_plus does not square to zero modulo the ideal on `{}`: {r}",
                dga.ctx_plus.variable(i).name
            )));
        }
    }
    Ok(dga)
}

#[derive(Clone, Debug)]
pub struct Construction {
    pub q: QStructure,
    /// (negative grading of the defect, correction) per solved stage.
    pub stages: Vec<(i64, Derivation)>,
}

/// Builds Q with negative part `delta` and zero-locus differential `qplus`.
pub fn construct_q(delta: &QStructure, qplus: &Derivation, order: PivotOrder) -> Result<Construction> {
    delta.require_verified()?;
    let ctx = delta.ctx().clone();
    let dga = check_qplus(delta, qplus)?;
    let work = working(delta.q());
    let d = delta.q().transfer(&work);
    let fixed = qplus.transfer(&work);
    let q0 = lift_field(&d, &fixed, order)?;
    let mut q = d.checked_add(&q0)?;
    let mut stages = Vec::new();
    let mut last = i64::MIN;
    let half = -rat(1, 2);
    for step in 0..=ctx.filtration_order() as usize + 1 {
        let sq = q.commutator(&q)?;
        let visible = sq.transfer(&ctx);
        let Some(n) = visible.min_grading(FieldGrading::Negative) else {
            break;
        };
        if n <= last {
            return Err(Error::stage("construct", step, format!("defect of negative degree {n} survived")));
        }
        last = n;
        let defect = sq.component(FieldGrading::Negative, n);
        if !d.commutator(&defect)?.transfer(&ctx).is_zero() {
            return Err(Error::stage("construct", step, format!("defect of negative degree {n} is not a cocycle")));
        }
        let target = defect.scale(&half);
        let corr = solve_adjoint(&d, &target, FieldDegree { total: 1, negative: Some(n + 1) }, &work, order)?
            .ok_or_else(|| Error::Unsolvable(format!("no correction for the defect of negative degree {n}")))?;
        q = q.checked_add(&corr)?;
        stages.push((n, corr.transfer(&ctx)));
    }
    let out = check_q(&q.transfer(&ctx))?;
    if !out.is_verified() {
        let res = out.q().commutator(out.q())?;
        return Err(Error::stage("construct", stages.len(), format!("[Q,Q] = {res}")));
    }
    if negative_part(&out)? != negative_part(delta)? {
        return Err(Error::stage("construct", stages.len(), "negative part changed"));
    }
    if !zero_locus_dga(&out)?.equivalent(&dga)? {
        return Err(Error::stage("construct", stages.len(), "zero-locus differential changed"));
    }
    Ok(Construction { q: out, stages })
}

/// Q with every positive coordinate killed, as a field on the full chart.
fn negative_field(q: &Derivation) -> Result<Derivation> {
    let ctx = q.ctx();
    let pos: Vec<usize> = (0..ctx.len()).filter(|&i| ctx.degree(i) > 0).collect();
    let values = (0..ctx.len())
        .map(|i| {
            if ctx.degree(i) < 0 {
                q.value(i).kill_variables(&pos)
            } else {
                GradedPolynomial::zero(ctx)
            }
        })
        .collect();
    Derivation::new(ctx, 1, values)
}

/// A flow log taking `q` to `q_prime`, built one negative degree at a time.
pub fn intertwine(q: &QStructure, q_prime: &QStructure, order: PivotOrder) -> Result<FlowLog> {
    q.require_verified()?;
    q_prime.require_verified()?;
    let ctx = q.ctx().clone();
    if !ctx.same_variables(q_prime.ctx()) || ctx.jet_order() != q_prime.ctx().jet_order() {
        return Err(Error::ContextMismatch);
    }
    if negative_part(q)? != negative_part(q_prime)? {
        return Err(Error::Precondition("the negative parts differ".into()));
    }
    if !zero_locus_dga(q)?.equivalent(&zero_locus_dga(q_prime)?)? {
        return Err(Error::Precondition("the zero-locus differentials differ".into()));
    }
    let delta = negative_field(q.q())?;
    let work = working(&delta);
    let d = delta.transfer(&work);
    let target = q_prime.q().transfer(&work);
    let mut current = q.q().transfer(&work);
    let mut log = FlowLog::new(&work);
    let mut last = i64::MIN;
    for step in 0..=ctx.filtration_order() as usize + 1 {
        let diff = target.checked_sub(&current)?;
        let Some(n) = diff.transfer(&ctx).min_grading(FieldGrading::Negative) else {
            break;
        };
        if n <= last || n < 0 {
            return Err(Error::stage("intertwine", step, format!("difference of negative degree {n} survived")));
        }
        last = n;
        let part = diff.component(FieldGrading::Negative, n);
        let u = solve_adjoint(&d, &part, FieldDegree { total: 0, negative: Some(n + 1) }, &work, order)?
            .ok_or_else(|| {
                Error::Unsolvable(format!(
                    "obstruction in negative degree {n}: {}",
                    part.transfer(&ctx)
                ))
            })?;
        current = push_forward(&u, &current)?;
        log.push_flow(u)?;
    }
    if push_forward_log(&log, q.q())? != *q_prime.q() {
        return Err(Error::stage("intertwine", log.len(), "the log does not reproduce the target"));
    }
    check_identity_on_parts(&log, &ctx)?;
    Ok(log)
}

/// The composed map must fix the negative part and the zero-locus part.
fn check_identity_on_parts(log: &FlowLog, ctx: &Ctx) -> Result<()> {
    let psi = compose_flows(log, ctx)?;
    let pos: Vec<usize> = (0..ctx.len()).filter(|&i| ctx.degree(i) > 0).collect();
    let neg: Vec<usize> = (0..ctx.len()).filter(|&i| ctx.degree(i) < 0).collect();
    for i in 0..ctx.len() {
        let moved = psi.image(i) - &GradedPolynomial::var(ctx, i);
        let rest = if ctx.degree(i) < 0 { moved.kill_variables(&pos) } else { moved.kill_variables(&neg) };
        if !rest.is_zero() {
            return Err(Error::stage(
                "intertwine",
                0,
                format!("the map moves `{}` by {rest}", ctx.variable(i).name),
            ));
        }
    }
    Ok(())
}
