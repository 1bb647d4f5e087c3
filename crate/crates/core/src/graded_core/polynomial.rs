use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::context::{ensure_same, Ctx};
use super::monomial::{canonicalize_indices, DegreeReport, Monomial};
use crate::error::{Error, Result};

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Which of the four gradings to select by.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Grading {
    Total,
    Negative,
    Positive,
    Arity,
}

impl Grading {
    pub fn of(self, m: &Monomial, ctx: &super::context::GradedContext) -> i64 {
        match self {
            Grading::Total => m.total_degree(ctx) as i64,
            Grading::Negative => m.negative_degree(ctx) as i64,
            Grading::Positive => m.positive_degree(ctx) as i64,
            Grading::Arity => m.arity(ctx) as i64,
        }
    }
}

/// Exact rational combination of canonical monomials in a fixed context.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GradedPolynomial {
    ctx: Ctx,
    terms: BTreeMap<Monomial, Rat>,
}

impl GradedPolynomial {
    pub fn zero(ctx: &Ctx) -> Self {
        GradedPolynomial { ctx: ctx.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(ctx: &Ctx, c: Rat) -> Self {
        let mut p = Self::zero(ctx);
        p.add_term(Monomial::one(ctx.len()), c);
        p.truncate_in_place();
        p
    }

    pub fn one(ctx: &Ctx) -> Self {
        Self::constant(ctx, Rat::one())
    }

    pub fn var(ctx: &Ctx, index: usize) -> Self {
        let mut p = Self::zero(ctx);
        p.add_term(Monomial::var(ctx.len(), index), Rat::one());
        p.truncate_in_place();
        p
    }

    pub fn named(ctx: &Ctx, name: &str) -> Result<Self> {
        Ok(Self::var(ctx, ctx.index_of(name)?))
    }

    /// Single term; dropped if outside the window.
    pub fn term(ctx: &Ctx, m: Monomial, c: Rat) -> Self {
        let mut p = Self::zero(ctx);
        p.add_term(m, c);
        p.truncate_in_place();
        p
    }

    /// Sums the given terms and truncates.
    pub fn from_terms(ctx: &Ctx, terms: impl IntoIterator<Item = (Monomial, Rat)>) -> Self {
        let mut p = Self::zero(ctx);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p.truncate_in_place();
        p
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    pub fn monomials(&self) -> impl Iterator<Item = &Monomial> {
        self.terms.keys()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rat {
        self.terms.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn constant_term(&self) -> Rat {
        self.coefficient(&Monomial::one(self.ctx.len()))
    }

    /// Adds `c*m` without truncating.
    pub(crate) fn add_term(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn truncate_in_place(&mut self) {
        let ctx = self.ctx.clone();
        self.terms.retain(|m, _| m.in_window(&ctx));
    }

    /// Drops every term outside the context window.
    pub fn truncated(&self) -> Self {
        let mut p = self.clone();
        p.truncate_in_place();
        p
    }

    pub fn is_truncated(&self) -> bool {
        self.terms.keys().all(|m| m.in_window(&self.ctx))
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero(&self.ctx);
        }
        GradedPolynomial {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        ensure_same(&self.ctx, &other.ctx)?;
        let mut p = self.clone();
        for (m, c) in &other.terms {
            p.add_term(m.clone(), c.clone());
        }
        Ok(p)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        ensure_same(&self.ctx, &other.ctx)?;
        let mut p = self.clone();
        for (m, c) in &other.terms {
            p.add_term(m.clone(), -c.clone());
        }
        Ok(p)
    }

    /// Product truncated to the window.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        let mut p = self.multiply_exact(other)?;
        p.truncate_in_place();
        Ok(p)
    }

    /// Product with no truncation at all.
    pub fn multiply_exact(&self, other: &Self) -> Result<Self> {
        ensure_same(&self.ctx, &other.ctx)?;
        let mut p = Self::zero(&self.ctx);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                if let Some((m, s)) = a.mul(b, &self.ctx) {
                    let c = ca * cb;
                    p.add_term(m, if s < 0 { -c } else { c });
                }
            }
        }
        Ok(p)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut r = Self::one(&self.ctx);
        for _ in 0..k {
            r = &r * self;
        }
        r
    }

    /// Distinct total degrees present, ascending.
    pub fn total_degrees(&self) -> Vec<i32> {
        let mut d: Vec<i32> = self.terms.keys().map(|m| m.total_degree(&self.ctx)).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    /// Total degree of a homogeneous element; `None` for zero.
    pub fn total_degree(&self) -> Result<Option<i32>> {
        let d = self.total_degrees();
        match d.len() {
            0 => Ok(None),
            1 => Ok(Some(d[0])),
            _ => Err(Error::MixedDegree(d)),
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        self.total_degrees().len() <= 1
    }

    /// Parity of a homogeneous element (zero counts as even).
    pub fn is_odd(&self) -> bool {
        self.terms
            .keys()
            .next()
            .map(|m| m.is_odd(&self.ctx))
            .unwrap_or(false)
    }

    pub fn monomial_reports(&self) -> Vec<(Monomial, DegreeReport)> {
        self.terms.keys().map(|m| (m.clone(), m.report(&self.ctx))).collect()
    }

    /// The four degrees, provided every term shares them.
    pub fn degree_report(&self) -> Result<Option<DegreeReport>> {
        let reports: Vec<DegreeReport> = self.terms.keys().map(|m| m.report(&self.ctx)).collect();
        match reports.first() {
            None => Ok(None),
            Some(r) if reports.iter().all(|s| s == r) => Ok(Some(*r)),
            Some(_) => Err(Error::MixedDegree(self.total_degrees())),
        }
    }

    pub fn homogeneous_component(&self, grading: Grading, n: i64) -> Self {
        GradedPolynomial {
            ctx: self.ctx.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| grading.of(m, &self.ctx) == n)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn components(&self, grading: Grading) -> BTreeMap<i64, Self> {
        let mut out: BTreeMap<i64, Self> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(grading.of(m, &self.ctx))
                .or_insert_with(|| Self::zero(&self.ctx))
                .terms
                .insert(m.clone(), c.clone());
        }
        out
    }

    /// Every nonzero-degree variable evaluated to zero.
    pub fn base_projection(&self) -> Self {
        self.homogeneous_component(Grading::Arity, 0)
    }

    /// The listed variables evaluated to zero.
    pub fn kill_variables(&self, indices: &[usize]) -> Self {
        GradedPolynomial {
            ctx: self.ctx.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| indices.iter().all(|&i| !m.contains(i)))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn involves(&self, index: usize) -> bool {
        self.terms.keys().any(|m| m.contains(index))
    }

    /// Left partial derivative by variable `index`.
    pub fn derivative(&self, index: usize) -> Self {
        let mut p = Self::zero(&self.ctx);
        for (m, c) in &self.terms {
            if let Some((k, r)) = m.left_derivative(index, &self.ctx) {
                p.add_term(r, c * int(k));
            }
        }
        p
    }

    /// Moves into another context by variable name.
    ///
    /// Variables missing from `target` are set to zero; reordering of odd
    /// variables is accounted for; the result is truncated to `target`.
    pub fn transfer(&self, target: &Ctx) -> Self {
        let map: Vec<Option<usize>> = self
            .ctx
            .variables()
            .iter()
            .map(|v| target.try_index_of(&v.name).filter(|&j| target.degree(j) == v.degree))
            .collect();
        let mut p = Self::zero(target);
        'terms: for (m, c) in &self.terms {
            let mut factors = Vec::new();
            for (i, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                match map[i] {
                    Some(j) => factors.push((j, e)),
                    None => continue 'terms,
                }
            }
            if let Ok(Some((nm, s))) = canonicalize_indices(&factors, target) {
                p.add_term(nm, if s < 0 { -c.clone() } else { c.clone() });
            }
        }
        p.truncate_in_place();
        p
    }

    /// Algebra map sending variable `i` to `images[i]`, all in one target context.
    pub fn substitute(&self, images: &[GradedPolynomial]) -> Result<Self> {
        assert_eq!(images.len(), self.ctx.len(), "one image per variable");
        let target = match images.first() {
            Some(p) => p.ctx.clone(),
            None => return Ok(self.clone()),
        };
        let mut out = Self::zero(&target);
        let mut powers: Vec<Vec<GradedPolynomial>> = images.iter().map(|p| vec![Self::one(&target), p.clone()]).collect();
        for (m, c) in &self.terms {
            let mut acc = Self::constant(&target, c.clone());
            for (i, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap().multiply(&images[i])?;
                    powers[i].push(next);
                }
                acc = acc.multiply(&powers[i][e as usize])?;
                if acc.is_zero() {
                    break;
                }
            }
            out = out.checked_add(&acc)?;
        }
        Ok(out)
    }

    /// Largest absolute numerator or denominator, as a size hint.
    pub fn height(&self) -> BigInt {
        self.terms
            .values()
            .map(|c| c.numer().abs().max(c.denom().abs()))
            .max()
            .unwrap_or_else(BigInt::zero)
    }
}

fn fmt_coeff_term(f: &mut fmt::Formatter<'_>, c: &Rat, mono: &str, first: bool) -> fmt::Result {
    let neg = c.is_negative();
    let a = c.abs();
    if first {
        if neg {
            write!(f, "-")?;
        }
    } else {
        write!(f, " {} ", if neg { "-" } else { "+" })?;
    }
    if mono == "1" {
        return write!(f, "{a}");
    }
    if a.is_one() {
        write!(f, "{mono}")
    } else {
        write!(f, "{a}*{mono}")
    }
}

impl fmt::Display for GradedPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // lowest weight first reads more naturally
        let mut ts: Vec<_> = self.terms.iter().collect();
        ts.sort_by_key(|(m, _)| m.weight());
        for (k, (m, c)) in ts.into_iter().enumerate() {
            let mono = m.display(&self.ctx).to_string();
            fmt_coeff_term(f, c, &mono, k == 0)?;
        }
        Ok(())
    }
}

impl Add for &GradedPolynomial {
    type Output = GradedPolynomial;
    fn add(self, rhs: Self) -> GradedPolynomial {
        self.checked_add(rhs).expect("context mismatch")
    }
}

impl Sub for &GradedPolynomial {
    type Output = GradedPolynomial;
    fn sub(self, rhs: Self) -> GradedPolynomial {
        self.checked_sub(rhs).expect("context mismatch")
    }
}

impl Mul for &GradedPolynomial {
    type Output = GradedPolynomial;
    fn mul(self, rhs: Self) -> GradedPolynomial {
        self.multiply(rhs).expect("context mismatch")
    }
}

impl Neg for &GradedPolynomial {
    type Output = GradedPolynomial;
    fn neg(self) -> GradedPolynomial {
        self.scale(&-Rat::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded_core::context::GradedContext;

    fn xyxi(j: u32) -> Ctx {
        GradedContext::from_pairs(&[("x", 0), ("y", 0), ("xi", -1), ("eta", -1), ("theta", 1)], j, 3).unwrap()
    }

    #[test]
    fn product_distributes() {
        let c = xyxi(3);
        let x = GradedPolynomial::var(&c, 0);
        let y = GradedPolynomial::var(&c, 1);
        let xi = GradedPolynomial::var(&c, 2);
        let lhs = &(&x + &xi) * &y;
        assert_eq!(lhs, &(&x * &y) + &(&xi * &y));
    }

    #[test]
    fn odd_elements_anticommute() {
        let c = xyxi(3);
        let xi = GradedPolynomial::var(&c, 2);
        let eta = GradedPolynomial::var(&c, 3);
        assert_eq!(&xi * &eta, -&(&eta * &xi));
        assert!((&xi * &xi).is_zero());
    }

    #[test]
    fn jet_truncation_kills_high_powers() {
        let c = xyxi(2);
        let x = GradedPolynomial::var(&c, 0);
        assert!((&x.pow(2) * &x).is_zero());
    }

    #[test]
    fn components_recover_polynomial() {
        let c = xyxi(3);
        let x = GradedPolynomial::var(&c, 0);
        let xt = &GradedPolynomial::var(&c, 2) * &GradedPolynomial::var(&c, 4);
        let p = &x + &xt;
        assert_eq!(p.homogeneous_component(Grading::Negative, 1), xt);
        assert_eq!(p.homogeneous_component(Grading::Arity, 0), x);
        let mut sum = GradedPolynomial::zero(&c);
        for q in p.components(Grading::Positive).values() {
            sum = &sum + q;
        }
        assert_eq!(sum, p);
    }

    #[test]
    fn reports() {
        let c = xyxi(3);
        let xt = &GradedPolynomial::var(&c, 2) * &GradedPolynomial::var(&c, 4);
        let r = xt.degree_report().unwrap().unwrap();
        assert_eq!(r, DegreeReport { total: 0, positive: 1, negative: 1, arity: 2 });
        let x2y = &GradedPolynomial::var(&c, 0).pow(2) * &GradedPolynomial::var(&c, 1);
        let r = x2y.degree_report().unwrap().unwrap();
        assert_eq!(r, DegreeReport { total: 0, positive: 0, negative: 0, arity: 0 });
        let mixed = &xt + &GradedPolynomial::var(&c, 2);
        assert!(mixed.degree_report().is_err());
    }

    #[test]
    fn transfer_tracks_reordering_sign() {
        let a = GradedContext::from_pairs(&[("xi", -1), ("eta", -1)], 2, 3).unwrap();
        let b = GradedContext::from_pairs(&[("eta", -1), ("xi", -1)], 2, 3).unwrap();
        let p = &GradedPolynomial::var(&a, 0) * &GradedPolynomial::var(&a, 1);
        let q = p.transfer(&b);
        let expect = &GradedPolynomial::var(&b, 1) * &GradedPolynomial::var(&b, 0);
        assert_eq!(q, expect);
        assert_eq!(q.transfer(&a), p);
    }

    #[test]
    fn display_is_readable() {
        let c = xyxi(3);
        let p = &GradedPolynomial::var(&c, 0).scale(&rat(-2, 3)) + &GradedPolynomial::one(&c);
        assert_eq!(p.to_string(), "1 - 2/3*x");
    }
}
