use std::fmt;

use num_traits::{One, Zero};

use super::derivation::{Derivation, FieldGrading};
use crate::error::{Error, Result};
use crate::graded_core::context::ensure_same;
use crate::graded_core::{int, Ctx, GradedPolynomial, Rat};

/// Iteration budget for series that must terminate under truncation.
pub fn series_budget(ctx: &Ctx) -> usize {
    (ctx.jet_order() as usize + 2) * (ctx.filtration_order() as usize + 2) + ctx.len() + 4
}

/// A larger window used inside iterative algorithms so that derivatives
/// of dropped high-order terms cannot leak back into the visible window.
pub fn working_context(ctx: &Ctx) -> Ctx {
    ctx.with_orders(ctx.jet_order() + ctx.filtration_order() + 2, ctx.filtration_order() + 1)
}

/// An algebra map on functions given by the images of the coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automorphism {
    images: Vec<GradedPolynomial>,
}

impl Automorphism {
    pub fn identity(ctx: &Ctx) -> Self {
        Automorphism { images: (0..ctx.len()).map(|i| GradedPolynomial::var(ctx, i)).collect() }
    }

    pub fn from_images(images: Vec<GradedPolynomial>) -> Self {
        Automorphism { images }
    }

    pub fn images(&self) -> &[GradedPolynomial] {
        &self.images
    }

    pub fn image(&self, index: usize) -> &GradedPolynomial {
        &self.images[index]
    }

    pub fn apply(&self, f: &GradedPolynomial) -> Result<GradedPolynomial> {
        f.substitute(&self.images)
    }

    /// `self ∘ other` as maps on functions.
    pub fn compose(&self, other: &Automorphism) -> Result<Automorphism> {
        let images = other.images.iter().map(|p| self.apply(p)).collect::<Result<Vec<_>>>()?;
        Ok(Automorphism { images })
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, p)| {
            let ctx = p.ctx();
            *p == GradedPolynomial::var(ctx, i)
        })
    }
}

/// `v ↦ Σ t^k/k! v^k(x)` for every coordinate `x`.
pub fn exp_flow(v: &Derivation, t: &Rat) -> Result<Automorphism> {
    if v.degree() != 0 && !v.is_zero() {
        return Err(Error::Precondition(format!("flow generator has degree {}", v.degree())));
    }
    let ctx = v.ctx().clone();
    let budget = series_budget(&ctx);
    let mut images = Vec::with_capacity(ctx.len());
    for i in 0..ctx.len() {
        let mut term = GradedPolynomial::var(&ctx, i);
        let mut acc = term.clone();
        let mut k = 1;
        loop {
            term = v.apply(&term)?.scale(&(t / int(k as i64)));
            if term.is_zero() {
                break;
            }
            acc = &acc + &term;
            k += 1;
            if k > budget {
                return Err(Error::NonTerminating { what: format!("exponential of {v}"), budget });
            }
        }
        images.push(acc);
    }
    Ok(Automorphism { images })
}

/// `Σ (1/k!) (-ad_v)^k X`, i.e. `e^{-v} ∘ X ∘ e^{v}`.
pub fn push_forward(v: &Derivation, x: &Derivation) -> Result<Derivation> {
    ensure_same(v.ctx(), x.ctx())?;
    if v.is_zero() {
        return Ok(x.clone());
    }
    if v.degree() != 0 {
        return Err(Error::Precondition(format!("flow generator has degree {}", v.degree())));
    }
    let budget = series_budget(v.ctx());
    let mut term = x.clone();
    let mut acc = x.clone();
    let mut k = 1;
    loop {
        term = v.commutator(&term)?.scale(&(-Rat::one() / int(k as i64)));
        if term.is_zero() {
            return Ok(acc);
        }
        acc = acc.checked_add(&term)?;
        k += 1;
        if k > budget {
            return Err(Error::NonTerminating { what: format!("adjoint series of {v}"), budget });
        }
    }
}

/// One step of a coordinate change.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FlowStep {
    /// Time-one flow of a degree-0 derivation, with its least negative-degree gain.
    Flow { generator: Derivation, gain: i64 },
    /// `x_var ↦ factor * x_var`.
    Rescale { var: usize, factor: Rat },
}

impl FlowStep {
    pub fn flow(generator: Derivation) -> Result<FlowStep> {
        if generator.degree() != 0 && !generator.is_zero() {
            return Err(Error::Precondition(format!(
                "flow generator has degree {}",
                generator.degree()
            )));
        }
        let gain = generator.min_grading(FieldGrading::Negative).unwrap_or(0);
        Ok(FlowStep::Flow { generator, gain })
    }

    fn automorphism(&self, ctx: &Ctx) -> Result<Automorphism> {
        match self {
            FlowStep::Flow { generator, .. } => exp_flow(&generator.transfer(ctx), &Rat::one()),
            FlowStep::Rescale { var, factor } => {
                let mut a = Automorphism::identity(ctx);
                a.images[*var] = a.images[*var].scale(factor);
                Ok(a)
            }
        }
    }

    fn inverse(&self) -> FlowStep {
        match self {
            FlowStep::Flow { generator, gain } => {
                FlowStep::Flow { generator: generator.scale(&-Rat::one()), gain: *gain }
            }
            FlowStep::Rescale { var, factor } => FlowStep::Rescale { var: *var, factor: Rat::one() / factor },
        }
    }

    /// Conjugates `x` by this step.
    pub fn push(&self, x: &Derivation) -> Result<Derivation> {
        match self {
            FlowStep::Flow { generator, .. } => push_forward(&generator.transfer(x.ctx()), x),
            FlowStep::Rescale { var, factor } => {
                let ctx = x.ctx();
                let mut sub = Automorphism::identity(ctx);
                sub.images[*var] = sub.images[*var].scale(&(Rat::one() / factor));
                let mut values = Vec::with_capacity(ctx.len());
                for i in 0..ctx.len() {
                    let mut v = sub.apply(x.value(i))?;
                    if i == *var {
                        v = v.scale(factor);
                    }
                    values.push(v);
                }
                Derivation::new(ctx, x.degree(), values)
            }
        }
    }

    fn is_trivial(&self) -> bool {
        match self {
            FlowStep::Flow { generator, .. } => generator.is_zero(),
            FlowStep::Rescale { factor, .. } => factor.is_one(),
        }
    }
}

/// An ordered product of flows, `Ψ = φ_1 ∘ φ_2 ∘ … ∘ φ_k` on functions.
///
/// Conjugating by `Ψ` is the same as pushing forward by each step in order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowLog {
    ctx: Ctx,
    steps: Vec<FlowStep>,
}

impl FlowLog {
    pub fn new(ctx: &Ctx) -> Self {
        FlowLog { ctx: ctx.clone(), steps: Vec::new() }
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn steps(&self) -> &[FlowStep] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Number of steps that are not the identity.
    pub fn effective_len(&self) -> usize {
        self.steps.iter().filter(|s| !s.is_trivial()).count()
    }

    pub fn push_step(&mut self, step: FlowStep) -> Result<()> {
        if let FlowStep::Flow { generator, .. } = &step {
            if !generator.ctx().same_variables(&self.ctx) {
                return Err(Error::ContextMismatch);
            }
        }
        if !step.is_trivial() {
            self.steps.push(step);
        }
        Ok(())
    }

    pub fn push_flow(&mut self, generator: Derivation) -> Result<()> {
        self.push_step(FlowStep::flow(generator)?)
    }

    pub fn push_rescale(&mut self, var: usize, factor: Rat) -> Result<()> {
        if factor.is_zero() {
            return Err(Error::Precondition("rescale by zero".into()));
        }
        self.push_step(FlowStep::Rescale { var, factor })
    }

    /// Appends every step of `other` after ours.
    pub fn extend(&mut self, other: &FlowLog) -> Result<()> {
        for s in &other.steps {
            self.push_step(s.clone())?;
        }
        Ok(())
    }

    /// Every flow step must have degree 0.
    pub fn validate(&self) -> Result<()> {
        for (k, s) in self.steps.iter().enumerate() {
            if let FlowStep::Flow { generator, .. } = s {
                if generator.degree() != 0 && !generator.is_zero() {
                    return Err(Error::stage("flow log", k, "generator of nonzero degree"));
                }
            }
        }
        Ok(())
    }

    /// Reversed, negated log.
    pub fn inverse(&self) -> FlowLog {
        FlowLog { ctx: self.ctx.clone(), steps: self.steps.iter().rev().map(|s| s.inverse()).collect() }
    }

    /// Same steps moved into another context with the same coordinates.
    pub fn transfer(&self, ctx: &Ctx) -> FlowLog {
        let steps = self
            .steps
            .iter()
            .map(|s| match s {
                FlowStep::Flow { generator, gain } => {
                    FlowStep::Flow { generator: generator.transfer(ctx), gain: *gain }
                }
                other => other.clone(),
            })
            .collect();
        FlowLog { ctx: ctx.clone(), steps }
    }

    pub fn dsl(&self) -> String {
        let mut out = format!(
            "flowlog {{\n  jet {}; filt {};\n",
            self.ctx.jet_order(),
            self.ctx.filtration_order()
        );
        for s in &self.steps {
            match s {
                FlowStep::Flow { generator, .. } => {
                    out.push_str("  step {");
                    for l in generator.dsl_lines() {
                        out.push(' ');
                        out.push_str(&l);
                    }
                    out.push_str(" }\n");
                }
                FlowStep::Rescale { var, factor } => {
                    out.push_str(&format!("  scale {{ {} : {}; }}\n", self.ctx.variable(*var).name, factor));
                }
            }
        }
        out.push('}');
        out
    }
}

impl fmt::Display for FlowLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.dsl())
    }
}

/// The automorphism `Ψ` of a log, evaluated in `ctx`.
pub fn compose_flows(log: &FlowLog, ctx: &Ctx) -> Result<Automorphism> {
    let mut acc = Automorphism::identity(ctx);
    for step in log.steps.iter().rev() {
        let a = step.automorphism(ctx)?;
        acc = a.compose(&acc)?;
    }
    Ok(acc)
}

/// Conjugates `x` by every step of the log, in order.
///
/// The work happens in the log's own window; the result is truncated
/// back to the window of `x`.
pub fn push_forward_log(log: &FlowLog, x: &Derivation) -> Result<Derivation> {
    if !log.ctx.same_variables(x.ctx()) {
        return Err(Error::ContextMismatch);
    }
    let mut q = x.transfer(&log.ctx);
    for s in &log.steps {
        q = s.push(&q)?;
    }
    Ok(q.transfer(x.ctx()))
}

/// The derivation `w` with `e^w = φ`, for `φ` unipotent on the window.
pub fn logarithm(phi: &Automorphism, ctx: &Ctx) -> Result<Derivation> {
    let budget = series_budget(ctx);
    let mut values = Vec::with_capacity(ctx.len());
    for i in 0..ctx.len() {
        let x = GradedPolynomial::var(ctx, i);
        let mut power = x.clone();
        let mut acc = GradedPolynomial::zero(ctx);
        let mut k = 1i64;
        loop {
            power = &phi.apply(&power)? - &power;
            if power.is_zero() {
                break;
            }
            let c = if k % 2 == 1 { int(1) } else { int(-1) } / int(k);
            acc = &acc + &power.scale(&c);
            k += 1;
            if k as usize > budget {
                return Err(Error::NonTerminating { what: "logarithm of a substitution".into(), budget });
            }
        }
        values.push(acc);
    }
    Derivation::new(ctx, 0, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded_core::GradedContext;

    fn ctx() -> Ctx {
        GradedContext::from_pairs(&[("x", 0), ("theta", 1), ("eta", -1)], 3, 3).unwrap()
    }

    fn v_example(c: &Ctx) -> Derivation {
        let eta = GradedPolynomial::var(c, 2);
        let theta = GradedPolynomial::var(c, 1);
        Derivation::coefficient_partial(&-&(&eta * &theta), 0).unwrap()
    }

    #[test]
    fn exp_of_nilpotent_shift() {
        let c = ctx();
        let v = v_example(&c);
        let e = exp_flow(&v, &int(1)).unwrap();
        let x = GradedPolynomial::var(&c, 0);
        let et = &GradedPolynomial::var(&c, 2) * &GradedPolynomial::var(&c, 1);
        assert_eq!(e.image(0), &(&x - &et));
        let e2 = exp_flow(&v, &int(2)).unwrap();
        assert_eq!(e.compose(&e).unwrap(), e2);
    }

    #[test]
    fn push_forward_kills_shifted_term() {
        let c = ctx();
        let v = v_example(&c);
        let theta = GradedPolynomial::var(&c, 1);
        let q = Derivation::partial(&c, 2)
            .checked_add(&Derivation::coefficient_partial(&theta, 0).unwrap())
            .unwrap();
        let out = push_forward(&v, &q).unwrap();
        assert_eq!(out, Derivation::partial(&c, 2));
    }

    #[test]
    fn log_inverts_exp() {
        let c = ctx();
        let v = v_example(&c);
        let e = exp_flow(&v, &int(1)).unwrap();
        assert_eq!(logarithm(&e, &c).unwrap(), v);
    }

    #[test]
    fn compose_matches_sequential_substitution() {
        let c = ctx();
        let mut log = FlowLog::new(&c);
        log.push_flow(v_example(&c)).unwrap();
        log.push_rescale(1, int(3)).unwrap();
        let psi = compose_flows(&log, &c).unwrap();
        let inv = compose_flows(&log.inverse(), &c).unwrap();
        assert!(psi.compose(&inv).unwrap().is_identity());
        let et = &GradedPolynomial::var(&c, 2) * &GradedPolynomial::var(&c, 1);
        assert_eq!(psi.image(0), &(&GradedPolynomial::var(&c, 0) - &et));
        assert_eq!(psi.image(1), &GradedPolynomial::var(&c, 1).scale(&int(3)));
    }
}
