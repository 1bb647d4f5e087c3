use serde::Serialize;

use super::cohomology::{complex_cohomology, function_representatives, CochainDegree};
use crate::derivations::Derivation;
use crate::error::{Error, Result};
use crate::graded_core::{Ctx, GradedContext, GradedPolynomial, Variable};
use crate::ideal::IdealReducer;
use crate::qmanifold::{base_context, check_q, QStructure};

/// A truncated Koszul–Tate resolution of an ideal of base jets.
#[derive(Clone, Debug)]
pub struct KTResolution {
    pub delta: QStructure,
    /// Generators of the ideal, in the base context.
    pub ideal: Vec<GradedPolynomial>,
    pub depth: u32,
    /// Generator names per level; level `k` has degree `-(k+1)`.
    pub levels: Vec<Vec<String>>,
}

impl KTResolution {
    pub fn ctx(&self) -> &Ctx {
        self.delta.ctx()
    }

    pub fn delta(&self) -> &Derivation {
        self.delta.q()
    }

    pub fn base_ctx(&self) -> Ctx {
        base_context(self.ctx())
    }

    pub fn reducer(&self) -> IdealReducer {
        IdealReducer::new(&self.base_ctx(), &self.ideal)
    }
}

fn level_name(level: usize, index: usize, count: usize) -> String {
    let stem = match level {
        1 => "xi".to_string(),
        2 => "zeta".to_string(),
        3 => "chi".to_string(),
        k => format!("g{k}_"),
    };
    if count == 1 && level <= 3 {
        stem
    } else {
        format!("{stem}{}", index + 1)
    }
}

/// Renames generators level by level once their counts are known.
fn rename(delta: &Derivation, base: usize, counts: &[usize]) -> Result<Derivation> {
    let old = delta.ctx();
    let mut vars: Vec<Variable> = old.variables()[..base].to_vec();
    for (l, &c) in counts.iter().enumerate() {
        for i in 0..c {
            vars.push(Variable::new(level_name(l + 1, i, c), -(l as i32 + 1)));
        }
    }
    let ctx = GradedContext::new(vars, old.jet_order(), old.filtration_order())?;
    let values = delta
        .values()
        .iter()
        .map(|v| GradedPolynomial::from_terms(&ctx, v.terms().map(|(m, c)| (m.clone(), c.clone()))))
        .collect();
    Derivation::new(&ctx, 1, values)
}

fn adjoin(delta: &Derivation, name: String, degree: i32, value: &GradedPolynomial) -> Result<Derivation> {
    let ctx = delta.ctx().extended(&[Variable::new(name, degree)])?;
    let d = delta.transfer(&ctx);
    let idx = ctx.len() - 1;
    d.with_value(idx, value.transfer(&ctx))
}

/// Tate's construction up to generators of degree `-depth`.
///
/// The window keeps the jet order of the ideal's context and a filtration
/// order of at least `depth + 2`.
pub fn kt_build(ideal: &[GradedPolynomial], depth: u32) -> Result<KTResolution> {
    if depth == 0 {
        return Err(Error::Precondition("depth must be positive".into()));
    }
    let first = ideal.first().ok_or_else(|| Error::Precondition("the ideal has no generators".into()))?;
    let src = first.ctx();
    let base = base_context(src);
    let base = base.with_orders(src.jet_order(), src.filtration_order().max(depth + 2));
    let gens: Vec<GradedPolynomial> = ideal.iter().map(|f| f.transfer(&base)).collect();
    for (a, f) in gens.iter().enumerate() {
        if f.is_zero() {
            return Err(Error::Precondition(format!("generator {} vanishes at this truncation", a + 1)));
        }
    }

    // temporary names avoid clashes while the counts are unknown
    let nbase = base.len();
    let mut delta = Derivation::zero(&base, 1);
    for (a, f) in gens.iter().enumerate() {
        delta = adjoin(&delta, format!("#1_{a}"), -1, f)?;
    }
    let mut counts = vec![gens.len()];
    for k in 1..depth {
        let level = k as usize + 1;
        let mut added = 0usize;
        let mut last_dim = usize::MAX;
        loop {
            let reps = function_representatives(&delta, CochainDegree::Total(-(k as i32)))?;
            if reps.is_empty() {
                break;
            }
            if reps.len() >= last_dim {
                return Err(Error::stage(
                    "kt_build",
                    k as usize,
                    format!("adjoining a generator did not reduce H^-{k}; raise the jet order"),
                ));
            }
            last_dim = reps.len();
            delta = adjoin(&delta, format!("#{level}_{added}"), -(level as i32), &reps[0])?;
            added += 1;
        }
        counts.push(added);
        if added == 0 {
            break;
        }
    }
    while counts.last() == Some(&0) {
        counts.pop();
    }
    for v in base.variables() {
        for (l, &c) in counts.iter().enumerate() {
            for i in 0..c {
                if v.name == level_name(l + 1, i, c) {
                    return Err(Error::InvalidContext(format!("base variable `{}` clashes with a generator name", v.name)));
                }
            }
        }
    }
    let delta = rename(&delta, nbase, &counts)?;
    let ctx = delta.ctx().clone();
    let q = check_q(&delta)?;
    q.require_verified()?;
    let levels = counts
        .iter()
        .enumerate()
        .map(|(l, &c)| (0..c).map(|i| level_name(l + 1, i, c)).collect())
        .collect();
    Ok(KTResolution { delta: q, ideal: gens.iter().map(|g| g.transfer(&base_context(&ctx))).collect(), depth, levels })
}

#[derive(Clone, Debug, Serialize)]
pub struct KtVerification {
    pub squares_to_zero: bool,
    /// (k, dim H^-k) for 0 < k < depth
    pub lower: Vec<(u32, usize)>,
    pub h0: usize,
    pub quotient_dimension: usize,
}

impl KtVerification {
    pub fn holds(&self) -> bool {
        self.squares_to_zero && self.lower.iter().all(|(_, d)| *d == 0) && self.h0 == self.quotient_dimension
    }
}

pub fn kt_verify(kt: &KTResolution) -> Result<KtVerification> {
    let d = kt.delta();
    let squares_to_zero = d.commutator(d)?.is_zero();
    let mut degrees = vec![CochainDegree::Total(0)];
    degrees.extend((1..kt.depth).map(|k| CochainDegree::Total(-(k as i32))));
    let rep = complex_cohomology(d, &degrees)?;
    Ok(KtVerification {
        squares_to_zero,
        lower: (1..kt.depth).map(|k| (k, rep.get(k as usize).dimension)).collect(),
        h0: rep.get(0).dimension,
        quotient_dimension: kt.reducer().quotient_dimension(),
    })
}

/// `δ̃`: the resolution on a chart extended by positive generators, zero on them.
pub fn assemble_tilde_delta(kt: &KTResolution, positive: &[(String, i32)]) -> Result<QStructure> {
    let mut extra = Vec::new();
    for (name, deg) in positive {
        if *deg <= 0 {
            return Err(Error::Precondition(format!("`{name}` must have positive degree, found {deg}")));
        }
        extra.push(Variable::new(name.clone(), *deg));
    }
    let ctx = kt.ctx().extended(&extra)?;
    check_q(&kt.delta().transfer(&ctx))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base(j: u32) -> Ctx {
        GradedContext::from_pairs(&[("x", 0), ("y", 0)], j, 1).unwrap()
    }

    #[test]
    fn principal_ideal() {
        let c = base(4);
        let xy = &GradedPolynomial::var(&c, 0) * &GradedPolynomial::var(&c, 1);
        let kt = kt_build(std::slice::from_ref(&xy), 3).unwrap();
        assert_eq!(kt.levels, vec![vec!["xi".to_string()]]);
        let xi = kt.ctx().index_of("xi").unwrap();
        assert_eq!(kt.delta().value(xi), &xy.transfer(kt.ctx()));
        assert!(kt_verify(&kt).unwrap().holds());
    }

    #[test]
    fn one_relation() {
        let c = base(4);
        let x = GradedPolynomial::var(&c, 0);
        let y = GradedPolynomial::var(&c, 1);
        let kt = kt_build(&[&x * &x, &x * &y], 3).unwrap();
        assert_eq!(kt.levels[1].len(), 1);
        let v = kt_verify(&kt).unwrap();
        assert!(v.holds(), "{v:?}");
    }

    #[test]
    fn assemble_extends_by_zero() {
        let c = base(3);
        let xy = &GradedPolynomial::var(&c, 0) * &GradedPolynomial::var(&c, 1);
        let kt = kt_build(&[xy], 1).unwrap();
        let t = assemble_tilde_delta(&kt, &[("theta".into(), 1)]).unwrap();
        assert!(t.is_verified());
        assert!(t.q().value(t.ctx().index_of("theta").unwrap()).is_zero());
        assert!(assemble_tilde_delta(&kt, &[("x".into(), 1)]).is_err());
    }
}
