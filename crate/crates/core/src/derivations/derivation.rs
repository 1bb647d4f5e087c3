use std::collections::BTreeMap;
use std::fmt;

use num_traits::One;

use crate::error::{Error, Result};
use crate::graded_core::context::ensure_same;
use crate::graded_core::{Ctx, GradedPolynomial, Monomial, Rat};

/// Gradings a derivation can be split by.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldGrading {
    /// deg_-(coefficient) - deg_-(variable)
    Negative,
    /// arity(coefficient) - arity(variable)
    Arity,
    /// base degree of coefficient minus base degree of the variable
    Jet,
    /// polynomial degree of coefficient minus that of the variable
    Weight,
}

impl FieldGrading {
    fn of(self, m: &Monomial, var: usize, ctx: &crate::graded_core::GradedContext) -> i64 {
        let v = ctx.variable(var);
        match self {
            FieldGrading::Negative => m.negative_degree(ctx) as i64 - v.negative_degree() as i64,
            FieldGrading::Arity => m.arity(ctx) as i64 - if v.is_base() { 0 } else { 1 },
            FieldGrading::Jet => m.base_degree(ctx) as i64 - if v.is_base() { 1 } else { 0 },
            FieldGrading::Weight => m.weight() as i64 - 1,
        }
    }
}

/// A homogeneous graded derivation, stored by its values on the coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    ctx: Ctx,
    degree: i32,
    values: Vec<GradedPolynomial>,
}

impl Derivation {
    pub fn zero(ctx: &Ctx, degree: i32) -> Self {
        Derivation { ctx: ctx.clone(), degree, values: vec![GradedPolynomial::zero(ctx); ctx.len()] }
    }

    /// Validates that every value has degree `deg(v) + degree`.
    pub fn new(ctx: &Ctx, degree: i32, values: Vec<GradedPolynomial>) -> Result<Self> {
        if values.len() != ctx.len() {
            return Err(Error::Precondition(format!(
                "expected {} values, got {}",
                ctx.len(),
                values.len()
            )));
        }
        let mut out = Vec::with_capacity(values.len());
        for (i, v) in values.into_iter().enumerate() {
            ensure_same(ctx, v.ctx())?;
            let want = ctx.degree(i) + degree;
            let v = v.truncated();
            for d in v.total_degrees() {
                if d != want {
                    return Err(Error::DegreeMismatch(format!(
                        "value on `{}` has degree {d}, expected {want}",
                        ctx.variable(i).name
                    )));
                }
            }
            out.push(v);
        }
        Ok(Derivation { ctx: ctx.clone(), degree, values: out })
    }

    /// Builds from named values; unnamed variables map to zero.
    pub fn from_named(ctx: &Ctx, degree: i32, named: &[(&str, GradedPolynomial)]) -> Result<Self> {
        let mut values = vec![GradedPolynomial::zero(ctx); ctx.len()];
        for (n, p) in named {
            values[ctx.index_of(n)?] = p.clone();
        }
        Self::new(ctx, degree, values)
    }

    /// `c * d/d(x_index)`; the degree is read off `c`.
    pub fn coefficient_partial(c: &GradedPolynomial, index: usize) -> Result<Self> {
        let ctx = c.ctx().clone();
        let deg = c.total_degree()?.unwrap_or(0) - ctx.degree(index);
        let mut values = vec![GradedPolynomial::zero(&ctx); ctx.len()];
        values[index] = c.clone();
        Self::new(&ctx, deg, values)
    }

    pub fn partial(ctx: &Ctx, index: usize) -> Self {
        Self::coefficient_partial(&GradedPolynomial::one(ctx), index).expect("homogeneous")
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn degree(&self) -> i32 {
        self.degree
    }

    pub fn is_odd(&self) -> bool {
        self.degree.rem_euclid(2) == 1
    }

    pub fn value(&self, index: usize) -> &GradedPolynomial {
        &self.values[index]
    }

    pub fn values(&self) -> &[GradedPolynomial] {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.is_zero())
    }

    /// Number of stored (monomial, variable) terms.
    pub fn term_count(&self) -> usize {
        self.values.iter().map(|v| v.len()).sum()
    }

    /// Evaluates on a function: `X(f) = sum_k X(u_k) * d_k f` with left partials.
    pub fn apply(&self, f: &GradedPolynomial) -> Result<GradedPolynomial> {
        ensure_same(&self.ctx, f.ctx())?;
        let mut out = GradedPolynomial::zero(&self.ctx);
        for (k, xv) in self.values.iter().enumerate() {
            if xv.is_zero() || !f.involves(k) {
                continue;
            }
            let d = f.derivative(k);
            out = out.checked_add(&xv.multiply_exact(&d)?)?;
        }
        Ok(out.truncated())
    }

    /// `[X,Y] = XY - (-1)^{|X||Y|} YX`, computed on each coordinate.
    pub fn commutator(&self, other: &Derivation) -> Result<Derivation> {
        ensure_same(&self.ctx, &other.ctx)?;
        let sign = if self.is_odd() && other.is_odd() { Rat::one() } else { -Rat::one() };
        let mut values = Vec::with_capacity(self.ctx.len());
        for i in 0..self.ctx.len() {
            let a = self.apply(&other.values[i])?;
            let b = other.apply(&self.values[i])?;
            // XY - (-1)^{|X||Y|} YX = a + sign*b with sign = +1 when both odd
            values.push(a.checked_add(&b.scale(&sign))?);
        }
        Ok(Derivation { ctx: self.ctx.clone(), degree: self.degree + other.degree, values })
    }

    pub fn checked_add(&self, other: &Derivation) -> Result<Derivation> {
        ensure_same(&self.ctx, &other.ctx)?;
        if self.degree != other.degree && !self.is_zero() && !other.is_zero() {
            return Err(Error::DegreeMismatch(format!(
                "cannot add derivations of degrees {} and {}",
                self.degree, other.degree
            )));
        }
        let degree = if self.is_zero() { other.degree } else { self.degree };
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Derivation { ctx: self.ctx.clone(), degree, values })
    }

    pub fn checked_sub(&self, other: &Derivation) -> Result<Derivation> {
        self.checked_add(&other.scale(&-Rat::one()))
    }

    pub fn scale(&self, c: &Rat) -> Derivation {
        Derivation {
            ctx: self.ctx.clone(),
            degree: self.degree,
            values: self.values.iter().map(|v| v.scale(c)).collect(),
        }
    }

    /// The derivation `f * X`.
    pub fn left_multiply(&self, f: &GradedPolynomial) -> Result<Derivation> {
        ensure_same(&self.ctx, f.ctx())?;
        let fd = match f.total_degree()? {
            Some(d) => d,
            None => return Ok(Derivation::zero(&self.ctx, self.degree)),
        };
        let values = self.values.iter().map(|v| f.multiply(v)).collect::<Result<Vec<_>>>()?;
        Ok(Derivation { ctx: self.ctx.clone(), degree: self.degree + fd, values })
    }

    pub fn component(&self, grading: FieldGrading, n: i64) -> Derivation {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| {
                GradedPolynomial::from_terms(
                    &self.ctx,
                    v.terms()
                        .filter(|(m, _)| grading.of(m, i, &self.ctx) == n)
                        .map(|(m, c)| (m.clone(), c.clone())),
                )
            })
            .collect();
        Derivation { ctx: self.ctx.clone(), degree: self.degree, values }
    }

    /// Splits into homogeneous pieces; the pieces sum to `self`.
    pub fn decompose(&self, grading: FieldGrading) -> BTreeMap<i64, Derivation> {
        let mut keys: Vec<i64> = Vec::new();
        for (i, v) in self.values.iter().enumerate() {
            for m in v.monomials() {
                keys.push(grading.of(m, i, &self.ctx));
            }
        }
        keys.sort_unstable();
        keys.dedup();
        keys.into_iter().map(|k| (k, self.component(grading, k))).collect()
    }

    /// Smallest value of the grading over all terms.
    pub fn min_grading(&self, grading: FieldGrading) -> Option<i64> {
        self.values
            .iter()
            .enumerate()
            .flat_map(|(i, v)| v.monomials().map(move |m| grading.of(m, i, &self.ctx)))
            .min()
    }

    pub fn truncated(&self) -> Derivation {
        Derivation {
            ctx: self.ctx.clone(),
            degree: self.degree,
            values: self.values.iter().map(|v| v.truncated()).collect(),
        }
    }

    /// Moves into another context by name; entries for missing variables
    /// are dropped and missing variables are set to zero in coefficients.
    pub fn transfer(&self, target: &Ctx) -> Derivation {
        let mut values = vec![GradedPolynomial::zero(target); target.len()];
        for (i, v) in self.values.iter().enumerate() {
            let var = self.ctx.variable(i);
            if let Some(j) = target.try_index_of(&var.name) {
                if target.degree(j) == var.degree {
                    values[j] = v.transfer(target);
                }
            }
        }
        Derivation { ctx: target.clone(), degree: self.degree, values }
    }

    /// Replaces the value on one coordinate.
    pub fn with_value(&self, index: usize, value: GradedPolynomial) -> Result<Derivation> {
        let mut values = self.values.clone();
        values[index] = value;
        Derivation::new(&self.ctx, self.degree, values)
    }

    /// Every term as (variable, monomial, coefficient).
    pub fn terms(&self) -> impl Iterator<Item = (usize, &Monomial, &Rat)> {
        self.values
            .iter()
            .enumerate()
            .flat_map(|(i, v)| v.terms().map(move |(m, c)| (i, m, c)))
    }

    pub fn dsl_lines(&self) -> Vec<String> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(i, v)| format!("{} -> {};", self.ctx.variable(i).name, v))
            .collect()
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, v) in self.values.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let name = &self.ctx.variable(i).name;
            if v.len() == 1 && v.constant_term().is_one() {
                write!(f, "d/d{name}")?;
            } else {
                write!(f, "({v})*d/d{name}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// True when the two derivations agree term by term.
pub fn same_field(a: &Derivation, b: &Derivation) -> bool {
    a.ctx.same_variables(&b.ctx) && a.values == b.values || (a.is_zero() && b.is_zero())
}
