//! Dense brute-force reference computations.
//!
//! Bases are enumerated here from the chart alone and ranks come from plain
//! Gaussian elimination on dense rational matrices. The engine is used only
//! to apply a derivation, in a window wide enough that nothing is cut off.

use std::collections::BTreeMap;

use gradedq::derivations::Derivation;
use gradedq::graded_core::{Ctx, GradedPolynomial, Monomial, Rat};
use num_traits::{One, Zero};

const MARGIN: u32 = 12;

type Key = (usize, Vec<u16>);

pub fn dense_rank(mut m: Vec<Vec<Rat>>) -> usize {
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let inv = Rat::one() / &m[rank][c];
        for r in 0..m.len() {
            if r != rank && !m[r][c].is_zero() {
                let f = &m[r][c] * &inv;
                for k in c..cols {
                    let s = &f * &m[rank][k];
                    m[r][k] -= s;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn in_window(ctx: &Ctx, e: &[u16]) -> bool {
    let mut base = 0u32;
    let mut neg = 0u32;
    for (i, &k) in e.iter().enumerate() {
        let d = ctx.degree(i);
        if d == 0 {
            base += k as u32;
        } else if d < 0 {
            neg += k as u32 * d.unsigned_abs();
        }
    }
    base <= ctx.jet_order() && neg < ctx.filtration_order()
}

/// Window exponent vectors of total degree `total`.
pub fn functions(ctx: &Ctx, total: i32) -> Vec<Vec<u16>> {
    let n = ctx.len();
    let pos_cap = total + ctx.filtration_order() as i32 - 1;
    let mut out = Vec::new();
    let mut e = vec![0u16; n];
    fn go(ctx: &Ctx, i: usize, e: &mut Vec<u16>, base: u32, neg: u32, pos: i32, cap: i32, total: i32, out: &mut Vec<Vec<u16>>) {
        if i == ctx.len() {
            if pos - neg as i32 == total {
                out.push(e.clone());
            }
            return;
        }
        let d = ctx.degree(i);
        let max = if d % 2 != 0 { 1 } else { 64 };
        for k in 0..=max {
            let (b, ng, p) = match d.signum() {
                0 => (base + k, neg, pos),
                -1 => (base, neg + k * d.unsigned_abs(), pos),
                _ => (base, neg, pos + (k * d as u32) as i32),
            };
            if b > ctx.jet_order() || ng >= ctx.filtration_order() || p > cap.max(0) {
                break;
            }
            e[i] = k as u16;
            go(ctx, i + 1, e, b, ng, p, cap, total, out);
        }
        e[i] = 0;
    }
    go(ctx, 0, &mut e, 0, 0, 0, pos_cap, total, &mut out);
    out
}

/// Window basis of vector fields of total degree `total`, as (variable, coefficient exponents).
pub fn fields(ctx: &Ctx, total: i32) -> Vec<Key> {
    let mut out = Vec::new();
    for i in 0..ctx.len() {
        for e in functions(ctx, total + ctx.degree(i)) {
            out.push((i, e));
        }
    }
    out
}

fn wide(ctx: &Ctx) -> Ctx {
    ctx.with_orders(ctx.jet_order() + MARGIN, ctx.filtration_order() + MARGIN)
}

fn mono(ctx: &Ctx, e: &[u16]) -> GradedPolynomial {
    GradedPolynomial::term(ctx, Monomial::from_exponents(e.to_vec()), Rat::one())
}

fn coords_of_function(p: &GradedPolynomial) -> BTreeMap<Key, Rat> {
    p.terms().map(|(m, c)| ((0, m.exponents().to_vec()), c.clone())).collect()
}

fn coords_of_field(x: &Derivation) -> BTreeMap<Key, Rat> {
    x.terms().map(|(i, m, c)| ((i, m.exponents().to_vec()), c.clone())).collect()
}

/// `n - rank(M_d) - (rank(M_prev) - rank(P_out M_prev))`, with images in
/// the wide window and `P_out` the projection to coordinates outside the window.
fn cohomology<S>(ctx: &Ctx, source: &[S], prev: &[S], image: impl Fn(&S) -> BTreeMap<Key, Rat>) -> usize {
    let img_src: Vec<_> = source.iter().map(&image).collect();
    let img_prev: Vec<_> = prev.iter().map(&image).collect();
    let mut keys: Vec<Key> = img_src.iter().chain(&img_prev).flat_map(|m| m.keys().cloned()).collect();
    keys.sort();
    keys.dedup();
    let dense = |rows: &[BTreeMap<Key, Rat>], keep: &dyn Fn(&Key) -> bool| -> Vec<Vec<Rat>> {
        rows.iter()
            .map(|r| keys.iter().map(|k| if keep(k) { r.get(k).cloned().unwrap_or_else(Rat::zero) } else { Rat::zero() }).collect())
            .collect()
    };
    let all = |_: &Key| true;
    let outside = |k: &Key| !in_window(ctx, &k.1);
    let n = source.len();
    let rank_d = dense_rank(dense(&img_src, &all));
    let rank_prev = dense_rank(dense(&img_prev, &all));
    let rank_out = dense_rank(dense(&img_prev, &outside));
    n - rank_d - (rank_prev - rank_out)
}

/// Dimension of the cohomology of `d` on window functions of total degree `total`.
pub fn function_cohomology(d: &Derivation, total: i32) -> usize {
    let ctx = d.ctx().clone();
    let big = wide(&ctx);
    let db = d.transfer(&big);
    let image = |e: &Vec<u16>| coords_of_function(&db.apply(&mono(&big, e)).expect("same chart"));
    cohomology(&ctx, &functions(&ctx, total), &functions(&ctx, total - 1), image)
}

/// Dimension of the cohomology of `ad_d` on window vector fields of total degree `total`.
pub fn field_cohomology(d: &Derivation, total: i32) -> usize {
    let ctx = d.ctx().clone();
    let big = wide(&ctx);
    let db = d.transfer(&big);
    let image = |(i, e): &Key| {
        let x = Derivation::coefficient_partial(&mono(&big, e), *i).expect("homogeneous");
        coords_of_field(&db.commutator(&x).expect("same chart"))
    };
    cohomology(&ctx, &fields(&ctx, total), &fields(&ctx, total - 1), image)
}

/// Dimension of base jets of order at most J modulo the truncated ideal.
pub fn quotient_dimension(base: &Ctx, gens: &[GradedPolynomial]) -> usize {
    let monos = functions(base, 0);
    let index: BTreeMap<Vec<u16>, usize> = monos.iter().cloned().enumerate().map(|(k, e)| (e, k)).collect();
    let mut rows = Vec::new();
    for g in gens {
        let g = g.transfer(base);
        for e in &monos {
            let p = &mono(base, e) * &g;
            let mut row = vec![Rat::zero(); monos.len()];
            for (m, c) in p.terms() {
                row[index[m.exponents()]] = c.clone();
            }
            rows.push(row);
        }
    }
    monos.len() - dense_rank(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use gradedq::graded_core::GradedContext;

    #[test]
    fn rank_examples() {
        let r = |a: i64| Rat::from_integer(a.into());
        assert_eq!(dense_rank(vec![vec![r(1), r(2)], vec![r(2), r(4)]]), 1);
        assert_eq!(dense_rank(vec![vec![r(0), r(1)], vec![r(1), r(0)]]), 2);
    }

    #[test]
    fn window_counts() {
        let c = GradedContext::from_pairs(&[("x", 0), ("y", 0), ("xi", -1)], 2, 2).unwrap();
        assert_eq!(functions(&c, 0).len(), 6);
        assert_eq!(functions(&c, -1).len(), 6);
        assert_eq!(quotient_dimension(&c, &[&GradedPolynomial::var(&c, 0) * &GradedPolynomial::var(&c, 1)]), 5);
    }
}
