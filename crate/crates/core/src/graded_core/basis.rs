use super::context::GradedContext;
use super::monomial::Monomial;

/// All window monomials of the given total degree.
///
/// Finite because positive degree is bounded by `total + filtration_order - 1`.
pub fn window_monomials(ctx: &GradedContext, total: i32) -> Vec<Monomial> {
    let max_pos = total + ctx.filtration_order() as i32 - 1;
    if max_pos < 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut exps = vec![0u16; ctx.len()];
    walk(ctx, 0, &mut exps, 0, 0, 0, max_pos as u32, &mut |e| {
        let m = Monomial::from_exponents(e.to_vec());
        if m.total_degree(ctx) == total {
            out.push(m);
        }
    });
    out.sort();
    out
}

/// All window monomials whose positive degree is at most `max_pos`.
pub fn window_monomials_bounded(ctx: &GradedContext, max_pos: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut exps = vec![0u16; ctx.len()];
    walk(ctx, 0, &mut exps, 0, 0, 0, max_pos, &mut |e| {
        out.push(Monomial::from_exponents(e.to_vec()));
    });
    out.sort();
    out
}

#[allow(clippy::too_many_arguments)]
fn walk(
    ctx: &GradedContext,
    i: usize,
    exps: &mut Vec<u16>,
    base: u32,
    neg: u32,
    pos: u32,
    max_pos: u32,
    emit: &mut dyn FnMut(&[u16]),
) {
    if i == ctx.len() {
        emit(exps);
        return;
    }
    let v = ctx.variable(i);
    let cap: u32 = if v.is_odd() { 1 } else { u32::MAX };
    let mut e = 0u32;
    loop {
        let (b, n, p) = if v.degree == 0 {
            (base + e, neg, pos)
        } else if v.degree < 0 {
            (base, neg + e * v.negative_degree(), pos)
        } else {
            (base, neg, pos + e * v.positive_degree())
        };
        if b > ctx.jet_order() || n >= ctx.filtration_order() || p > max_pos || e > cap {
            break;
        }
        exps[i] = e as u16;
        walk(ctx, i + 1, exps, b, n, p, max_pos, emit);
        e += 1;
    }
    exps[i] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_base_jets() {
        let ctx = GradedContext::from_pairs(&[("x", 0), ("y", 0)], 3, 1).unwrap();
        assert_eq!(window_monomials(&ctx, 0).len(), 10);
    }

    #[test]
    fn respects_filtration() {
        let ctx = GradedContext::from_pairs(&[("x", 0), ("xi", -1), ("zeta", -2)], 1, 3).unwrap();
        // degree -2: zeta, zeta*x, and xi^2 = 0
        assert_eq!(window_monomials(&ctx, -2).len(), 2);
        assert_eq!(window_monomials(&ctx, -3).len(), 0);
    }
}
