//! Truncated cohomology of a differential on functions and of its adjoint
//! action on vector fields.
//!
//! Cocycles are computed exactly on the window basis. Coboundaries are the
//! images of window elements that land entirely inside the window.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::derivations::Derivation;
use crate::error::{Error, Result};
use crate::graded_core::basis::{window_monomials, window_monomials_bounded};
use crate::graded_core::{Ctx, GradedPolynomial, Monomial, Rat};
use crate::linalg::{EchelonBasis, PivotOrder, SparseVec};

/// Which functions form a cochain space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CochainDegree {
    Total(i32),
    /// Negative degree `n`, positive degree capped at the jet order.
    Negative(u32),
}

/// Vector fields of a fixed total degree, optionally of a fixed negative grading.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FieldDegree {
    pub total: i32,
    pub negative: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Cochain {
    Function(GradedPolynomial),
    Field(Derivation),
}

impl std::fmt::Display for Cochain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Cochain::Function(p) => write!(f, "{p}"),
            Cochain::Field(d) => write!(f, "{d}"),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DegreeCohomology {
    pub degree: String,
    pub jet_order: u32,
    pub cochains: usize,
    pub kernel: usize,
    pub image: usize,
    pub dimension: usize,
    /// Same dimension one jet order higher.
    pub stable: bool,
    pub representatives: Vec<String>,
    #[serde(skip)]
    pub cocycles: Vec<Cochain>,
}

impl DegreeCohomology {
    pub fn caveat(&self) -> Option<&'static str> {
        if self.stable {
            None
        } else {
            Some("truncation-sensitive")
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CohomologyReport {
    pub degrees: Vec<DegreeCohomology>,
}

impl CohomologyReport {
    pub fn get(&self, index: usize) -> &DegreeCohomology {
        &self.degrees[index]
    }
}

/// A context large enough that applying `d` once to window elements loses nothing.
pub(crate) fn exact_context(d: &Derivation) -> Ctx {
    let ctx = d.ctx();
    let mut wmax = 0u32;
    let mut nmax = 0u32;
    for (_, m, _) in d.terms() {
        wmax = wmax.max(m.weight());
        nmax = nmax.max(m.negative_degree(ctx));
    }
    ctx.with_orders(ctx.jet_order() + wmax + 1, ctx.filtration_order() + nmax + 1)
}

pub(crate) struct Dimensions<K> {
    pub kernel: usize,
    pub image: usize,
    pub representatives: Vec<SparseVec<K>>,
}

fn combine<K: Ord + Clone>(basis: &[K], combo: &crate::linalg::Combination) -> SparseVec<K> {
    combo.iter().map(|(&i, c)| (basis[i].clone(), c.clone())).collect()
}

/// Cohomology at `source` given the map on `source` and on the previous space.
pub(crate) fn cohomology_core<K, F, W>(source: &[K], prev: &[K], image: F, in_window: W) -> Result<Dimensions<K>>
where
    K: Ord + Clone,
    F: Fn(&K) -> Result<SparseVec<K>>,
    W: Fn(&K) -> bool,
{
    let mut ker = EchelonBasis::new(PivotOrder::Lowest);
    for s in source {
        ker.insert(&image(s)?);
    }
    let kernel: Vec<SparseVec<K>> = ker.kernel().iter().map(|c| combine(source, c)).collect();

    // outside-window columns come first so they take the pivots
    let mut im = EchelonBasis::new(PivotOrder::Lowest);
    for p in prev {
        let v: SparseVec<(bool, K)> = image(p)?.into_iter().map(|(k, c)| ((in_window(&k), k), c)).collect();
        im.insert(&v);
    }
    let inside: Vec<SparseVec<K>> = im
        .rows_with_pivot(|(w, _)| *w)
        .into_iter()
        .map(|r| r.into_iter().map(|((_, k), c)| (k, c)).collect())
        .collect();

    let mut quotient = EchelonBasis::new(PivotOrder::Lowest);
    for r in &inside {
        quotient.insert(r);
    }
    let mut representatives = Vec::new();
    for k in kernel.iter() {
        if quotient.insert(k) {
            representatives.push(k.clone());
        }
    }
    Ok(Dimensions { kernel: kernel.len(), image: inside.len(), representatives })
}

fn poly_vec(p: &GradedPolynomial) -> SparseVec<Monomial> {
    p.terms().map(|(m, c)| (m.clone(), c.clone())).collect()
}

fn field_vec(x: &Derivation) -> SparseVec<(usize, Monomial)> {
    x.terms().map(|(v, m, c)| ((v, m.clone()), c.clone())).collect()
}

fn function_basis(ctx: &Ctx, degree: CochainDegree) -> Vec<Monomial> {
    let mut out: Vec<Monomial> = match degree {
        CochainDegree::Total(d) => window_monomials(ctx, d),
        CochainDegree::Negative(n) => window_monomials_bounded(ctx, ctx.jet_order())
            .into_iter()
            .filter(|m| m.negative_degree(ctx) == n)
            .collect(),
    };
    out.sort_by(|a, b| (a.weight(), a).cmp(&(b.weight(), b)));
    out
}

fn previous(degree: CochainDegree) -> Option<CochainDegree> {
    match degree {
        CochainDegree::Total(d) => Some(CochainDegree::Total(d - 1)),
        CochainDegree::Negative(n) => Some(CochainDegree::Negative(n + 1)),
    }
}

/// `m d/dv` basis of fields with the given degrees.
pub fn field_basis(ctx: &Ctx, degree: FieldDegree) -> Vec<(usize, Monomial)> {
    let mut out = Vec::new();
    for v in 0..ctx.len() {
        let var = ctx.variable(v);
        for m in window_monomials(ctx, degree.total + var.degree) {
            let n = m.negative_degree(ctx) as i64 - var.negative_degree() as i64;
            if degree.negative.is_none_or(|want| want == n) {
                out.push((v, m));
            }
        }
    }
    out.sort_by(|a, b| (a.1.weight(), a.0, &a.1).cmp(&(b.1.weight(), b.0, &b.1)));
    out
}

fn field_from_vec(ctx: &Ctx, degree: i32, v: &SparseVec<(usize, Monomial)>) -> Result<Derivation> {
    let mut values = vec![GradedPolynomial::zero(ctx); ctx.len()];
    for ((var, m), c) in v {
        values[*var] = &values[*var] + &GradedPolynomial::term(ctx, m.clone(), c.clone());
    }
    Derivation::new(ctx, degree, values)
}

fn describe(degree: CochainDegree) -> String {
    match degree {
        CochainDegree::Total(d) => format!("total {d}"),
        CochainDegree::Negative(n) => format!("negative {n}"),
    }
}

fn require_differential(d: &Derivation) -> Result<()> {
    if d.degree() != 1 {
        return Err(Error::DegreeMismatch(format!("differential must have degree +1, found {}", d.degree())));
    }
    if !d.commutator(d)?.is_zero() {
        return Err(Error::Precondition("the differential does not square to zero".into()));
    }
    Ok(())
}

fn function_dims(d: &Derivation, degree: CochainDegree) -> Result<(usize, Dimensions<Monomial>)> {
    let ctx = d.ctx().clone();
    let big = exact_context(d);
    let db = d.transfer(&big);
    let source = function_basis(&ctx, degree);
    let prev = previous(degree).map(|p| function_basis(&ctx, p)).unwrap_or_default();
    let dims = cohomology_core(
        &source,
        &prev,
        |m| Ok(poly_vec(&db.apply(&GradedPolynomial::term(&big, m.clone(), Rat::one()))?)),
        |m| m.in_window(&ctx),
    )?;
    Ok((source.len(), dims))
}

/// Cohomology of `d` acting on functions, in each requested degree.
pub fn complex_cohomology(d: &Derivation, degrees: &[CochainDegree]) -> Result<CohomologyReport> {
    require_differential(d)?;
    let ctx = d.ctx().clone();
    let up = d.transfer(&ctx.with_orders(ctx.jet_order() + 1, ctx.filtration_order()));
    let mut out = Vec::new();
    for &deg in degrees {
        let (n, dims) = function_dims(d, deg)?;
        let (_, higher) = function_dims(&up, deg)?;
        let higher_dim = higher.kernel - higher.image;
        let cocycles: Vec<Cochain> = dims
            .representatives
            .iter()
            .map(|v| Cochain::Function(GradedPolynomial::from_terms(&ctx, v.clone())))
            .collect();
        out.push(DegreeCohomology {
            degree: describe(deg),
            jet_order: ctx.jet_order(),
            cochains: n,
            kernel: dims.kernel,
            image: dims.image,
            dimension: dims.kernel - dims.image,
            stable: dims.kernel - dims.image == higher_dim,
            representatives: cocycles.iter().map(|c| c.to_string()).collect(),
            cocycles,
        });
    }
    Ok(CohomologyReport { degrees: out })
}

/// Representatives of the cohomology of `d` in one degree, as functions.
pub(crate) fn function_representatives(d: &Derivation, degree: CochainDegree) -> Result<Vec<GradedPolynomial>> {
    let (_, dims) = function_dims(d, degree)?;
    Ok(dims
        .representatives
        .into_iter()
        .map(|v| GradedPolynomial::from_terms(d.ctx(), v))
        .collect())
}

fn field_dims(d: &Derivation, degree: FieldDegree) -> Result<(usize, Dimensions<(usize, Monomial)>)> {
    let ctx = d.ctx().clone();
    let big = exact_context(d);
    let db = d.transfer(&big);
    let source = field_basis(&ctx, degree);
    let prev_deg = FieldDegree { total: degree.total - 1, negative: degree.negative.map(|n| n + 1) };
    let prev = field_basis(&ctx, prev_deg);
    let dims = cohomology_core(
        &source,
        &prev,
        |(v, m)| {
            let x = Derivation::coefficient_partial(&GradedPolynomial::term(&big, m.clone(), Rat::one()), *v)?;
            Ok(field_vec(&db.commutator(&x)?))
        },
        |(_, m)| m.in_window(&ctx),
    )?;
    Ok((source.len(), dims))
}

/// Cohomology of `ad_d` on vector fields, in each requested degree.
pub fn advf_cohomology(d: &Derivation, degrees: &[FieldDegree]) -> Result<CohomologyReport> {
    require_differential(d)?;
    let ctx = d.ctx().clone();
    let up = d.transfer(&ctx.with_orders(ctx.jet_order() + 1, ctx.filtration_order()));
    let mut out = Vec::new();
    for &deg in degrees {
        let (n, dims) = field_dims(d, deg)?;
        let (_, higher) = field_dims(&up, deg)?;
        let higher_dim = higher.kernel - higher.image;
        let cocycles = dims
            .representatives
            .iter()
            .map(|v| field_from_vec(&ctx, deg.total, v).map(Cochain::Field))
            .collect::<Result<Vec<_>>>()?;
        let label = match deg.negative {
            Some(k) => format!("total {}, negative {k}", deg.total),
            None => format!("total {}", deg.total),
        };
        out.push(DegreeCohomology {
            degree: label,
            jet_order: ctx.jet_order(),
            cochains: n,
            kernel: dims.kernel,
            image: dims.image,
            dimension: dims.kernel - dims.image,
            stable: dims.kernel - dims.image == higher_dim,
            representatives: cocycles.iter().map(|c| c.to_string()).collect(),
            cocycles,
        });
    }
    Ok(CohomologyReport { degrees: out })
}

/// `[d, x]` computed without truncation loss.
pub fn exact_commutator(d: &Derivation, x: &Derivation) -> Result<Derivation> {
    let mut big = exact_context(d);
    let bx = exact_context(x);
    big = big.with_orders(big.jet_order().max(bx.jet_order()), big.filtration_order().max(bx.filtration_order()));
    d.transfer(&big).commutator(&x.transfer(&big))
}

/// True when `[d, x] = 0` exactly.
pub fn is_cocycle(d: &Derivation, x: &Derivation) -> Result<bool> {
    Ok(exact_commutator(d, x)?.is_zero())
}

/// True when `x = [d, y]` for some window field `y`.
pub fn is_coboundary(d: &Derivation, x: &Derivation) -> Result<bool> {
    let ctx = d.ctx().clone();
    let big = exact_context(d);
    let db = d.transfer(&big);
    let mut span = EchelonBasis::new(PivotOrder::Lowest);
    for (v, m) in field_basis(&ctx, FieldDegree { total: x.degree() - 1, negative: None }) {
        let y = Derivation::coefficient_partial(&GradedPolynomial::term(&big, m, Rat::one()), v)?;
        span.insert(&field_vec(&db.commutator(&y)?));
    }
    Ok(span.contains(&field_vec(&x.transfer(&big))))
}

/// A solution of `[d, y] = target` among window fields of the given degrees,
/// matching only the terms inside `check`.
pub(crate) fn solve_adjoint(
    d: &Derivation,
    target: &Derivation,
    degree: FieldDegree,
    check: &Ctx,
    order: PivotOrder,
) -> Result<Option<Derivation>> {
    let ctx = d.ctx().clone();
    let big = exact_context(d);
    let db = d.transfer(&big);
    let basis = field_basis(&ctx, degree);
    let mut span = EchelonBasis::new(order);
    let keep = |v: SparseVec<(usize, Monomial)>| -> SparseVec<(usize, Monomial)> {
        v.into_iter().filter(|((_, m), _)| m.in_window(check)).collect()
    };
    for (v, m) in &basis {
        let y = Derivation::coefficient_partial(&GradedPolynomial::term(&big, m.clone(), Rat::one()), *v)?;
        span.insert(&keep(field_vec(&db.commutator(&y)?)));
    }
    let t = keep(field_vec(target));
    match span.solve(&t) {
        None => Ok(None),
        Some(combo) => {
            let v: SparseVec<(usize, Monomial)> = combo
                .iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|(&i, c)| (basis[i].clone(), c.clone()))
                .collect();
            Ok(Some(field_from_vec(&ctx, degree.total, &v)?))
        }
    }
}

/// A solution of `d(u) = target` among window functions of total degree
/// `degree` (and negative degree `negative`, if given), matching only the
/// terms inside `check`.
pub(crate) fn solve_function(
    d: &Derivation,
    target: &GradedPolynomial,
    degree: i32,
    negative: Option<u32>,
    check: &Ctx,
    order: PivotOrder,
) -> Result<Option<GradedPolynomial>> {
    let ctx = d.ctx().clone();
    let big = exact_context(d);
    let db = d.transfer(&big);
    let mut basis = function_basis(&ctx, CochainDegree::Total(degree));
    if let Some(n) = negative {
        basis.retain(|m| m.negative_degree(&ctx) == n);
    }
    let keep = |v: SparseVec<Monomial>| -> SparseVec<Monomial> { v.into_iter().filter(|(m, _)| m.in_window(check)).collect() };
    let mut span = EchelonBasis::new(order);
    for m in &basis {
        span.insert(&keep(poly_vec(&db.apply(&GradedPolynomial::term(&big, m.clone(), Rat::one()))?)));
    }
    match span.solve(&keep(poly_vec(target))) {
        None => Ok(None),
        Some(combo) => Ok(Some(GradedPolynomial::from_terms(
            &ctx,
            combo.iter().map(|(&i, c)| (basis[i].clone(), c.clone())),
        ))),
    }
}
