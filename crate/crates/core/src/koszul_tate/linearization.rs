use serde::Serialize;

use super::resolution::KTResolution;
use crate::error::Result;
use crate::graded_core::basis::window_monomials;
use crate::graded_core::{GradedPolynomial, Monomial, Rat};
use crate::ideal::IdealReducer;
use crate::linalg::{EchelonBasis, PivotOrder, SparseVec};

/// The linearized complex along the zero locus: base directions, then one
/// slot per generator of each level, with matrices over base jets modulo
/// the ideal.
#[derive(Clone, Debug, Serialize)]
pub struct LinearizationReport {
    /// Slot names per level; level 0 holds the base coordinates.
    pub levels: Vec<Vec<String>>,
    /// `maps[k]` sends level `k` to level `k + 1`; rows are indexed by the target.
    pub maps: Vec<Vec<Vec<String>>>,
    pub quotient_dimension: usize,
    pub ranks: Vec<usize>,
    /// Dimension of the cohomology at each level.
    pub dims: Vec<usize>,
}

fn rank_of_map(reducer: &IdealReducer, matrix: &[Vec<GradedPolynomial>], sources: usize) -> usize {
    let ctx = reducer.ctx().clone();
    let monos = window_monomials(&ctx, 0);
    let mut span: EchelonBasis<(usize, Monomial)> = EchelonBasis::new(PivotOrder::Lowest);
    for s in 0..sources {
        for m in &monos {
            let mp = GradedPolynomial::term(&ctx, m.clone(), Rat::from_integer(1.into()));
            let mut v: SparseVec<(usize, Monomial)> = SparseVec::new();
            for (t, row) in matrix.iter().enumerate() {
                let r = reducer.reduce(&(&mp * &row[s]));
                for (mm, c) in r.terms() {
                    v.insert((t, mm.clone()), c.clone());
                }
            }
            span.insert(&v);
        }
    }
    span.rank()
}

pub fn linearization(kt: &KTResolution) -> Result<LinearizationReport> {
    let ctx = kt.ctx().clone();
    let base = kt.base_ctx();
    let reducer = kt.reducer();
    let q = reducer.quotient_dimension();
    let base_idx = ctx.base_indices();
    let mut levels_idx: Vec<Vec<usize>> = vec![base_idx.clone()];
    for names in &kt.levels {
        levels_idx.push(names.iter().map(|n| ctx.index_of(n)).collect::<Result<_>>()?);
    }

    let mut matrices: Vec<Vec<Vec<GradedPolynomial>>> = Vec::new();
    for k in 0..levels_idx.len() - 1 {
        let (src, tgt) = (&levels_idx[k], &levels_idx[k + 1]);
        let mut m = Vec::new();
        for &g in tgt {
            let value = kt.delta().value(g);
            let row: Vec<GradedPolynomial> = src
                .iter()
                .map(|&h| {
                    let entry = if k == 0 {
                        value.derivative(h)
                    } else {
                        // base coefficient of the generator h
                        GradedPolynomial::from_terms(
                            &ctx,
                            value.terms().filter_map(|(mono, c)| {
                                if mono.exponent(h) == 1 && mono.arity(&ctx) == 1 {
                                    let mut e = mono.exponents().to_vec();
                                    e[h] = 0;
                                    Some((Monomial::from_exponents(e), c.clone()))
                                } else {
                                    None
                                }
                            }),
                        )
                    };
                    reducer.reduce(&entry.transfer(&base))
                })
                .collect();
            m.push(row);
        }
        matrices.push(m);
    }

    let ranks: Vec<usize> = matrices
        .iter()
        .enumerate()
        .map(|(k, m)| rank_of_map(&reducer, m, levels_idx[k].len()))
        .collect();
    let dims = (0..levels_idx.len())
        .map(|k| {
            let total = levels_idx[k].len() * q;
            let out = ranks.get(k).copied().unwrap_or(0);
            let inc = if k == 0 { 0 } else { ranks[k - 1] };
            total - out - inc
        })
        .collect();
    Ok(LinearizationReport {
        levels: levels_idx
            .iter()
            .map(|l| l.iter().map(|&i| ctx.variable(i).name.clone()).collect())
            .collect(),
        maps: matrices
            .iter()
            .map(|m| m.iter().map(|r| r.iter().map(|p| if p.is_zero() { "0".into() } else { p.to_string() }).collect()).collect())
            .collect(),
        quotient_dimension: q,
        ranks,
        dims,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded_core::GradedContext;
    use crate::koszul_tate::kt_build;

    #[test]
    fn smooth_point() {
        let c = GradedContext::from_pairs(&[("x", 0)], 3, 1).unwrap();
        let kt = kt_build(&[GradedPolynomial::var(&c, 0)], 2).unwrap();
        let l = linearization(&kt).unwrap();
        assert_eq!(l.quotient_dimension, 1);
        assert_eq!(l.dims, vec![0, 0]);
    }

    #[test]
    fn crossing() {
        let c = GradedContext::from_pairs(&[("x", 0), ("y", 0)], 3, 1).unwrap();
        let xy = &GradedPolynomial::var(&c, 0) * &GradedPolynomial::var(&c, 1);
        let kt = kt_build(&[xy], 2).unwrap();
        let l = linearization(&kt).unwrap();
        assert_eq!(l.maps[0][0], vec!["y".to_string(), "x".to_string()]);
        assert_eq!(l.dims, vec![8, 1]);
    }
}
