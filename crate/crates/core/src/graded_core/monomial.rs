use std::fmt;

use serde::Serialize;

use super::context::GradedContext;
use crate::error::{Error, Result};

/// A product of coordinates written in declaration order.
///
/// Stored as one exponent per context variable; odd variables only ever
/// carry exponent 0 or 1.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<u16>);

/// The four gradings of a monomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeReport {
    pub total: i32,
    pub positive: u32,
    pub negative: u32,
    pub arity: u32,
}

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, index: usize) -> Self {
        let mut e = vec![0; nvars];
        e[index] = 1;
        Monomial(e)
    }

    pub fn from_exponents(exps: Vec<u16>) -> Self {
        Monomial(exps)
    }

    pub fn exponents(&self) -> &[u16] {
        &self.0
    }

    pub fn exponent(&self, index: usize) -> u16 {
        self.0[index]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn contains(&self, index: usize) -> bool {
        self.0[index] > 0
    }

    pub fn total_degree(&self, ctx: &GradedContext) -> i32 {
        self.0.iter().enumerate().map(|(i, &e)| e as i32 * ctx.degree(i)).sum()
    }

    pub fn negative_degree(&self, ctx: &GradedContext) -> u32 {
        self.0
            .iter()
            .enumerate()
            .map(|(i, &e)| e as u32 * ctx.variable(i).negative_degree())
            .sum()
    }

    pub fn positive_degree(&self, ctx: &GradedContext) -> u32 {
        self.0
            .iter()
            .enumerate()
            .map(|(i, &e)| e as u32 * ctx.variable(i).positive_degree())
            .sum()
    }

    /// Number of nonzero-degree factors, with multiplicity.
    pub fn arity(&self, ctx: &GradedContext) -> u32 {
        self.0
            .iter()
            .enumerate()
            .filter(|(i, _)| ctx.degree(*i) != 0)
            .map(|(_, &e)| e as u32)
            .sum()
    }

    /// Total exponent in the degree-0 (base) variables.
    pub fn base_degree(&self, ctx: &GradedContext) -> u32 {
        self.0
            .iter()
            .enumerate()
            .filter(|(i, _)| ctx.degree(*i) == 0)
            .map(|(_, &e)| e as u32)
            .sum()
    }

    /// Polynomial degree counting every variable once.
    pub fn weight(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn report(&self, ctx: &GradedContext) -> DegreeReport {
        DegreeReport {
            total: self.total_degree(ctx),
            positive: self.positive_degree(ctx),
            negative: self.negative_degree(ctx),
            arity: self.arity(ctx),
        }
    }

    pub fn in_window(&self, ctx: &GradedContext) -> bool {
        self.base_degree(ctx) <= ctx.jet_order()
            && self.negative_degree(ctx) < ctx.filtration_order()
    }

    pub fn is_odd(&self, ctx: &GradedContext) -> bool {
        self.total_degree(ctx).rem_euclid(2) == 1
    }

    /// True when the monomial only involves base variables.
    pub fn is_base(&self, ctx: &GradedContext) -> bool {
        self.arity(ctx) == 0
    }

    /// Graded product `self * other`, or `None` when an odd variable repeats.
    pub fn mul(&self, other: &Monomial, ctx: &GradedContext) -> Option<(Monomial, i8)> {
        let mut odd_after = 0u32; // odd factors of `self` with index > current
        let mut flips = 0u32;
        let n = self.0.len();
        // Walk from the end so `odd_after` counts odd factors of self to the right.
        for i in (0..n).rev() {
            let odd = ctx.variable(i).is_odd();
            if odd && self.0[i] > 0 && other.0[i] > 0 {
                return None;
            }
            if odd && other.0[i] > 0 {
                flips += odd_after;
            }
            if odd && self.0[i] > 0 {
                odd_after += 1;
            }
        }
        let exps = self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect();
        Some((Monomial(exps), if flips.is_multiple_of(2) { 1 } else { -1 }))
    }

    /// Left partial derivative with respect to variable `index`.
    ///
    /// Returns the integer multiplicity (signed) and the reduced monomial.
    pub fn left_derivative(&self, index: usize, ctx: &GradedContext) -> Option<(i64, Monomial)> {
        let e = self.0[index];
        if e == 0 {
            return None;
        }
        let mut sign = 1i64;
        if ctx.variable(index).is_odd() {
            let before: i32 = (0..index).map(|j| self.0[j] as i32 * ctx.degree(j)).sum();
            if before.rem_euclid(2) == 1 {
                sign = -1;
            }
        }
        let mut exps = self.0.clone();
        exps[index] -= 1;
        Some((sign * e as i64, Monomial(exps)))
    }

    /// Drops the listed variables (which must not occur).
    pub fn project(&self, keep: &[usize]) -> Monomial {
        Monomial(keep.iter().map(|&i| self.0[i]).collect())
    }

    /// Embeds into a larger context given the position map old -> new.
    pub fn embed(&self, positions: &[usize], new_len: usize) -> Monomial {
        let mut exps = vec![0; new_len];
        for (i, &p) in positions.iter().enumerate() {
            exps[p] = self.0[i];
        }
        Monomial(exps)
    }

    pub fn display<'a>(&'a self, ctx: &'a GradedContext) -> MonomialDisplay<'a> {
        MonomialDisplay { mono: self, ctx }
    }
}

/// Sorts an arbitrary product of factors into canonical order.
///
/// Returns `None` when the product vanishes (an odd variable repeats),
/// otherwise the monomial and the Koszul sign of the reordering.
pub fn canonicalize(factors: &[(&str, u16)], ctx: &GradedContext) -> Result<Option<(Monomial, i8)>> {
    let mut idx = Vec::with_capacity(factors.len());
    for (name, e) in factors {
        let i = ctx.index_of(name)?;
        if *e == 0 {
            continue;
        }
        idx.push((i, *e));
    }
    canonicalize_indices(&idx, ctx)
}

pub fn canonicalize_indices(factors: &[(usize, u16)], ctx: &GradedContext) -> Result<Option<(Monomial, i8)>> {
    let mut exps = vec![0u16; ctx.len()];
    let mut flips = 0u32;
    for (k, &(i, e)) in factors.iter().enumerate() {
        if i >= ctx.len() {
            return Err(Error::UnknownVariable(format!("#{i}")));
        }
        let odd_factor = ctx.variable(i).is_odd() && e % 2 == 1;
        if ctx.variable(i).is_odd() && (e > 1 || exps[i] > 0) {
            return Ok(None);
        }
        if odd_factor {
            // factors earlier in the sequence with a larger index must move past this one
            for &(j, ej) in &factors[..k] {
                if j > i && ctx.variable(j).is_odd() && ej % 2 == 1 {
                    flips += 1;
                }
            }
        }
        exps[i] += e;
    }
    Ok(Some((Monomial(exps), if flips.is_multiple_of(2) { 1 } else { -1 })))
}

pub struct MonomialDisplay<'a> {
    mono: &'a Monomial,
    ctx: &'a GradedContext,
}

impl fmt::Display for MonomialDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &e) in self.mono.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            write!(f, "{}", self.ctx.variable(i).name)?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        if first {
            write!(f, "1")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded_core::context::GradedContext;

    #[test]
    fn odd_transposition_flips_sign() {
        let ctx = GradedContext::from_pairs(&[("theta", 1), ("eta", -1)], 2, 3).unwrap();
        let (m, s) = canonicalize(&[("eta", 1), ("theta", 1)], &ctx).unwrap().unwrap();
        assert_eq!(m.exponents(), &[1, 1]);
        assert_eq!(s, -1);
    }

    #[test]
    fn even_factors_commute() {
        let ctx = GradedContext::from_pairs(&[("x", 0), ("y", 0)], 2, 3).unwrap();
        let (m, s) = canonicalize(&[("y", 1), ("x", 1)], &ctx).unwrap().unwrap();
        assert_eq!(m.exponents(), &[1, 1]);
        assert_eq!(s, 1);
    }

    #[test]
    fn odd_square_vanishes() {
        let ctx = GradedContext::from_pairs(&[("xi", -1)], 2, 3).unwrap();
        assert!(canonicalize(&[("xi", 1), ("xi", 1)], &ctx).unwrap().is_none());
        assert!(canonicalize(&[("xi", 2)], &ctx).unwrap().is_none());
    }

    #[test]
    fn unknown_name_is_an_error() {
        let ctx = GradedContext::from_pairs(&[("x", 0)], 2, 3).unwrap();
        assert!(canonicalize(&[("q", 1)], &ctx).is_err());
    }

    #[test]
    fn example_degrees() {
        let ctx = GradedContext::from_pairs(&[("a", 5), ("b", -4), ("c", -7)], 0, 20).unwrap();
        let m = Monomial::from_exponents(vec![1, 1, 1]);
        let r = m.report(&ctx);
        assert_eq!(r, DegreeReport { total: -6, positive: 5, negative: 11, arity: 3 });
    }

    #[test]
    fn mul_matches_canonicalize() {
        let ctx = GradedContext::from_pairs(&[("a", 1), ("b", -1), ("c", 3), ("x", 0)], 3, 5).unwrap();
        let a = Monomial::from_exponents(vec![0, 1, 1, 0]);
        let b = Monomial::from_exponents(vec![1, 0, 0, 2]);
        let (m, s) = a.mul(&b, &ctx).unwrap();
        let (m2, s2) = canonicalize_indices(&[(1, 1), (2, 1), (0, 1), (3, 2)], &ctx).unwrap().unwrap();
        assert_eq!(m, m2);
        assert_eq!(s, s2);
    }
}
