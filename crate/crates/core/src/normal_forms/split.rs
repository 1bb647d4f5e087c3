use num_traits::Zero;

use super::straighten::straighten_preferring;
use crate::derivations::{logarithm, push_forward_log, working_context, Automorphism, Derivation, FlowLog};
use crate::error::{Error, Result};
use crate::graded_core::{Ctx, GradedPolynomial, Monomial, Rat};
use crate::qmanifold::{anchor, check_q, curvature, QStructure};

#[derive(Clone, Debug)]
pub struct Splitting {
    /// (base coordinate, degree +1 coordinate) names.
    pub pairs: Vec<(String, String)>,
    /// Q on the remaining coordinates.
    pub residual: QStructure,
    pub log: FlowLog,
    pub anchor_rank: usize,
}

/// Coefficient-wise left derivative in `theta`, as a degree-0 derivation.
fn theta_part(q: &Derivation, theta: usize) -> Result<Derivation> {
    let ctx = q.ctx();
    let values = (0..ctx.len())
        .map(|i| if i == theta { GradedPolynomial::zero(ctx) } else { q.value(i).derivative(theta) })
        .collect();
    Derivation::new(ctx, q.degree() - ctx.degree(theta), values)
}

fn push(log: &mut FlowLog, q: &Derivation, step: FlowLog) -> Result<Derivation> {
    let out = push_forward_log(&step, q)?;
    log.extend(&step)?;
    Ok(out)
}

/// Extracts one pair `theta d/dy` from Q (in the working window).
///
/// Returns the conjugated Q, the pair indices and the log used.
fn extract_pair(q: &Derivation, out: &Ctx) -> Result<(Derivation, usize, usize, FlowLog)> {
    let work = q.ctx().clone();
    let mut log = FlowLog::new(&work);
    let a = anchor(&QStructure::unchecked(q.transfer(out)));
    let col = (0..a.columns.len())
        .find(|&j| a.entries.iter().any(|r| !r[j].is_zero()))
        .ok_or_else(|| Error::Precondition("anchor vanishes at the origin".into()))?;
    let e = work.index_of(&a.columns[col])?;
    let prefer = (0..a.rows.len())
        .find(|&i| !a.entries[i][col].is_zero())
        .map(|i| work.index_of(&a.rows[i]))
        .transpose()?;

    // straighten v = [Q, i_e]
    let v = q.commutator(&Derivation::partial(&work, e))?;
    let s = straighten_preferring(&v, out, prefer)?;
    let y = s.y;
    let q1 = push(&mut log, q, s.log)?;

    // make Q(y) a coordinate: theta_j := tau
    let tau = q1.value(y).clone();
    let j = work
        .indices_of_degree(1)
        .into_iter()
        .find(|&j| !tau.coefficient(&Monomial::var(work.len(), j)).is_zero())
        .ok_or_else(|| Error::stage("split", 0, format!("Q(y) = {tau} has no linear part")))?;
    let lambda = tau.coefficient(&Monomial::var(work.len(), j));
    let mut u = Automorphism::identity(&work);
    let mut images = u.images().to_vec();
    images[j] = tau.scale(&(Rat::from_integer(1.into()) / &lambda));
    u = Automorphism::from_images(images);
    let mut change = FlowLog::new(&work);
    change.push_flow(logarithm(&u, &work)?)?;
    change.push_rescale(j, lambda)?;
    let q2 = push(&mut log, &q1, change)?;
    let theta = j;
    check_value(&q2, y, &GradedPolynomial::var(&work, theta), out, "replace")?;

    // Q2 = theta (d/dy + B) + A; straighten d/dy + B keeping theta fixed
    let big_v = theta_part(&q2, theta)?;
    let s2 = straighten_preferring(&big_v, out, Some(y))?;
    if s2.y != y {
        return Err(Error::stage("split", 1, "straightening moved to another coordinate"));
    }
    let q3 = push(&mut log, &q2, s2.log)?;

    // theta := theta + T with T = Q3(y) - theta
    let t = &q3.value(y).clone() - &GradedPolynomial::var(&work, theta);
    if !t.is_zero() {
        let w = Derivation::coefficient_partial(&t, theta)?;
        let mut step = FlowLog::new(&work);
        step.push_flow(w)?;
        let q4 = push(&mut log, &q3, step)?;
        return Ok((q4, y, theta, log));
    }
    Ok((q3, y, theta, log))
}

fn check_value(q: &Derivation, var: usize, want: &GradedPolynomial, out: &Ctx, stage: &str) -> Result<()> {
    let got = q.value(var).transfer(out);
    if got != want.transfer(out) {
        return Err(Error::stage(stage, 0, format!("Q({}) = {got}", q.ctx().variable(var).name)));
    }
    Ok(())
}

/// Conjugates Q at a zero-locus origin to `Σ theta_k d/dy_k + R`.
pub fn split_at_point(q: &QStructure) -> Result<Splitting> {
    q.require_verified()?;
    let out = q.ctx().clone();
    if !curvature(q).vanishes_at_origin() {
        return Err(Error::Precondition("the origin is not in the zero locus".into()));
    }
    let rank = anchor(q).rank;
    let work = working_context(&out);
    let mut log = FlowLog::new(&work);
    let mut current = q.q().transfer(&work);
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    // coordinates still carrying the residual, as indices into `work`
    let mut remaining: Vec<usize> = (0..work.len()).collect();

    for k in 0..rank {
        let sub = work.restricted(&remaining);
        let sub_out = out.restricted(&remaining);
        let r = current.transfer(&sub);
        let (_, y, theta, sub_log) = extract_pair(&r, &sub_out)
            .map_err(|e| Error::stage("split", k, e.to_string()))?;
        let yname = sub.variable(y).name.clone();
        let tname = sub.variable(theta).name.clone();
        let yi = work.index_of(&yname)?;
        let ti = work.index_of(&tname)?;
        // extend the sub-log to the full chart; pairs already split off commute with it
        log.extend(&sub_log.transfer(&work))?;
        current = push_forward_log(&sub_log.transfer(&work), &current)?;
        pairs.push((yi, ti));
        remaining.retain(|&i| i != yi && i != ti);
    }

    let res_ctx = out.restricted(&remaining);
    let q_out = current.transfer(&out);
    // assert the normal form on the full chart
    for &(y, t) in &pairs {
        check_value(&q_out, y, &GradedPolynomial::var(&out, t), &out, "final")?;
        if !q_out.value(t).is_zero() {
            return Err(Error::stage("final", 0, format!("Q({}) is not zero", out.variable(t).name)));
        }
        for (i, val) in q_out.values().iter().enumerate() {
            if pairs.iter().any(|&(yy, _)| yy == i) {
                continue;
            }
            if val.involves(y) || val.involves(t) {
                return Err(Error::stage(
                    "final",
                    0,
                    format!("Q({}) still involves the split coordinates", out.variable(i).name),
                ));
            }
        }
    }
    let residual = check_q(&q_out.transfer(&res_ctx))?;
    let split_rank = anchor(&residual).rank;
    if split_rank != 0 {
        return Err(Error::stage("final", 0, format!("residual anchor rank {split_rank}")));
    }
    Ok(Splitting {
        pairs: pairs
            .iter()
            .map(|&(y, t)| (out.variable(y).name.clone(), out.variable(t).name.clone()))
            .collect(),
        residual,
        log,
        anchor_rank: rank,
    })
}

/// The normal form `Σ theta_k d/dy_k + R` on the full chart.
pub fn normal_form(split: &Splitting, ctx: &Ctx) -> Result<Derivation> {
    let mut q = split.residual.q().transfer(ctx);
    for (y, t) in &split.pairs {
        let d = Derivation::coefficient_partial(&GradedPolynomial::named(ctx, t)?, ctx.index_of(y)?)?;
        q = q.checked_add(&d)?;
    }
    Ok(q)
}
