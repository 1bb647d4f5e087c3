//! Text format for charts, fields, ideals and flow logs.
//!
//! ```text
//! manifold { base x; base y; gen xi : -1; }
//! truncate { jet 4; filt 4; }
//! Q { xi -> x*y; }
//! ideal { x*y }
//! flowlog { jet 8; filt 5; step { x -> xi*theta; } scale { x : 2; } }
//! ```
//!
//! Field blocks are `Q`, `Qprime`, `delta`, `Qplus` (degree +1), `qI` and
//! `lift` (degree 0). Comments run from `#` to the end of the line.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::derivations::{Derivation, FlowLog, FlowStep};
use crate::error::{Error, Result};
use crate::graded_core::{Ctx, GradedContext, GradedPolynomial, Rat, Variable};

pub const DEFAULT_JET: u32 = 4;
pub const DEFAULT_FILT: u32 = 4;
const MAX_EXPONENT: u32 = 64;
/// Orders of the scratch window used to degree-check expressions before truncation.
const WIDE: u32 = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

fn err(pos: Pos, message: impl Into<String>) -> Error {
    Error::Parse { line: pos.line, column: pos.column, message: message.into() }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Sym(&'static str),
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Sym(s) => write!(f, "`{s}`"),
            Tok::End => write!(f, "end of input"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, column: col };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            out.push((Tok::Ident(s), pos));
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            out.push((Tok::Int(s.parse().expect("digits")), pos));
            continue;
        }
        let sym = match c {
            '-' if chars.get(i + 1) == Some(&'>') => "->",
            '{' => "{",
            '}' => "}",
            ';' => ";",
            ':' => ":",
            ',' => ",",
            '+' => "+",
            '-' => "-",
            '*' => "*",
            '/' => "/",
            '^' => "^",
            '(' => "(",
            ')' => ")",
            _ => return Err(err(pos, format!("unexpected character `{c}`"))),
        };
        i += sym.len();
        col += sym.len();
        out.push((Tok::Sym(sym), pos));
    }
    out.push((Tok::End, Pos { line, column: col }));
    Ok(out)
}

#[derive(Clone, Debug)]
enum Expr {
    Num(Rat),
    Var(String, Pos),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

#[derive(Clone, Debug)]
struct Assignment {
    var: String,
    pos: Pos,
    value: Expr,
}

#[derive(Clone, Debug)]
enum LogStep {
    Flow(Vec<Assignment>, Pos),
    Scale { var: String, pos: Pos, factor: Rat },
}

#[derive(Clone, Debug)]
enum Block {
    Manifold(Vec<(Variable, Pos)>),
    Truncate { jet: u32, filt: u32 },
    Field { name: String, pos: Pos, assignments: Vec<Assignment> },
    Ideal(Vec<(Expr, Pos)>),
    FlowLog { window: Option<(u32, u32)>, steps: Vec<LogStep>, pos: Pos },
}

const FIELD_BLOCKS: [(&str, i32); 6] =
    [("Q", 1), ("Qprime", 1), ("delta", 1), ("Qplus", 1), ("qI", 0), ("lift", 0)];

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(t) if *t == s)
    }

    fn expect_sym(&mut self, s: &str) -> Result<Pos> {
        if self.is_sym(s) {
            Ok(self.bump().1)
        } else {
            Err(err(self.pos(), format!("expected `{s}`, found {}", self.peek())))
        }
    }

    fn ident(&mut self) -> Result<(String, Pos)> {
        match self.bump() {
            (Tok::Ident(s), p) => Ok((s, p)),
            (t, p) => Err(err(p, format!("expected an identifier, found {t}"))),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<()> {
        match self.bump() {
            (Tok::Ident(s), _) if s == kw => Ok(()),
            (t, p) => Err(err(p, format!("expected `{kw}`, found {t}"))),
        }
    }

    fn int(&mut self) -> Result<BigInt> {
        let neg = if self.is_sym("-") {
            self.bump();
            true
        } else {
            false
        };
        match self.bump() {
            (Tok::Int(n), _) => Ok(if neg { -n } else { n }),
            (t, p) => Err(err(p, format!("expected an integer, found {t}"))),
        }
    }

    fn small(&mut self, what: &str) -> Result<i64> {
        let p = self.pos();
        let n = self.int()?;
        i64::try_from(n).map_err(|_| err(p, format!("{what} out of range")))
    }

    fn unsigned(&mut self, what: &str) -> Result<u32> {
        let p = self.pos();
        let n = self.small(what)?;
        u32::try_from(n).map_err(|_| err(p, format!("{what} must be a non-negative integer")))
    }

    fn rational(&mut self) -> Result<Rat> {
        let p = self.pos();
        let n = self.int()?;
        if self.is_sym("/") {
            self.bump();
            let d = self.int()?;
            if d.is_zero() {
                return Err(err(p, "zero denominator"));
            }
            Ok(Rat::new(n, d))
        } else {
            Ok(Rat::from_integer(n))
        }
    }

    fn file(&mut self) -> Result<Vec<Block>> {
        let mut blocks = Vec::new();
        while *self.peek() != Tok::End {
            blocks.push(self.block()?);
        }
        if blocks.is_empty() {
            return Err(err(self.pos(), "empty input"));
        }
        Ok(blocks)
    }

    fn block(&mut self) -> Result<Block> {
        let (name, pos) = self.ident()?;
        self.expect_sym("{")?;
        let b = match name.as_str() {
            "manifold" => {
                let mut decls = Vec::new();
                while !self.is_sym("}") {
                    decls.push(self.decl()?);
                }
                if decls.is_empty() {
                    return Err(err(pos, "manifold block declares no variables"));
                }
                Block::Manifold(decls)
            }
            "truncate" => {
                let (jet, filt) = self.window()?;
                Block::Truncate { jet, filt }
            }
            "ideal" => {
                let mut gens = vec![(self.expr()?, pos)];
                while self.is_sym(",") {
                    self.bump();
                    let p = self.pos();
                    gens.push((self.expr()?, p));
                }
                Block::Ideal(gens)
            }
            "flowlog" => {
                let window = match self.peek() {
                    Tok::Ident(s) if s == "jet" => Some(self.window()?),
                    _ => None,
                };
                let mut steps = Vec::new();
                while !self.is_sym("}") {
                    steps.push(self.log_step()?);
                }
                Block::FlowLog { window, steps, pos }
            }
            n if FIELD_BLOCKS.iter().any(|(b, _)| *b == n) => {
                let assignments = self.assignments()?;
                if assignments.is_empty() {
                    return Err(err(pos, format!("{n} block has no assignments")));
                }
                Block::Field { name, pos, assignments }
            }
            _ => return Err(err(pos, format!("unknown block `{name}`"))),
        };
        self.expect_sym("}")?;
        Ok(b)
    }

    fn window(&mut self) -> Result<(u32, u32)> {
        self.keyword("jet")?;
        let jet = self.unsigned("jet order")?;
        self.expect_sym(";")?;
        self.keyword("filt")?;
        let p = self.pos();
        let filt = self.unsigned("filtration order")?;
        if filt == 0 {
            return Err(err(p, "filtration order must be at least 1"));
        }
        self.expect_sym(";")?;
        Ok((jet, filt))
    }

    fn decl(&mut self) -> Result<(Variable, Pos)> {
        let (kind, pos) = self.ident()?;
        let (name, npos) = self.ident()?;
        let degree = if self.is_sym(":") {
            self.bump();
            let p = self.pos();
            let d = self.small("degree")?;
            Some(i32::try_from(d).map_err(|_| err(p, "degree out of range"))?)
        } else {
            None
        };
        self.expect_sym(";")?;
        let degree = match (kind.as_str(), degree) {
            ("base", None | Some(0)) => 0,
            ("base", Some(d)) => return Err(err(npos, format!("base variable `{name}` must have degree 0, found {d}"))),
            ("gen", None) => return Err(err(npos, format!("missing degree on generator `{name}`"))),
            ("gen", Some(0)) => {
                return Err(err(npos, format!("generator `{name}` has degree 0; declare it with `base`")))
            }
            ("gen", Some(d)) => d,
            _ => return Err(err(pos, format!("expected `base` or `gen`, found `{kind}`"))),
        };
        Ok((Variable::new(name, degree), npos))
    }

    fn assignments(&mut self) -> Result<Vec<Assignment>> {
        let mut out = Vec::new();
        while !self.is_sym("}") {
            let (var, pos) = self.ident()?;
            self.expect_sym("->")?;
            let value = self.expr()?;
            self.expect_sym(";")?;
            out.push(Assignment { var, pos, value });
        }
        Ok(out)
    }

    fn log_step(&mut self) -> Result<LogStep> {
        let (kind, pos) = self.ident()?;
        self.expect_sym("{")?;
        let step = match kind.as_str() {
            "step" => LogStep::Flow(self.assignments()?, pos),
            "scale" => {
                let (var, vpos) = self.ident()?;
                self.expect_sym(":")?;
                let factor = self.rational()?;
                self.expect_sym(";")?;
                if factor.is_zero() {
                    return Err(err(vpos, "rescale by zero"));
                }
                LogStep::Scale { var, pos: vpos, factor }
            }
            _ => return Err(err(pos, format!("expected `step` or `scale`, found `{kind}`"))),
        };
        self.expect_sym("}")?;
        Ok(step)
    }

    // expr := term (('+' | '-') term)*
    fn expr(&mut self) -> Result<Expr> {
        let mut e = self.term()?;
        loop {
            if self.is_sym("+") {
                self.bump();
                e = Expr::Add(Box::new(e), Box::new(self.term()?));
            } else if self.is_sym("-") {
                self.bump();
                e = Expr::Sub(Box::new(e), Box::new(self.term()?));
            } else {
                return Ok(e);
            }
        }
    }

    // term := unary ('*' unary)*
    fn term(&mut self) -> Result<Expr> {
        let mut e = self.unary()?;
        while self.is_sym("*") {
            self.bump();
            e = Expr::Mul(Box::new(e), Box::new(self.unary()?));
        }
        Ok(e)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.is_sym("-") {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.is_sym("^") {
            self.bump();
            let p = self.pos();
            let k = self.unsigned("exponent")?;
            if k > MAX_EXPONENT {
                return Err(err(p, format!("exponent {k} exceeds {MAX_EXPONENT}")));
            }
            return Ok(Expr::Pow(Box::new(base), k));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek().clone() {
            Tok::Int(_) => Ok(Expr::Num(self.rational()?)),
            Tok::Ident(s) => {
                let p = self.bump().1;
                Ok(Expr::Var(s, p))
            }
            Tok::Sym("(") => {
                self.bump();
                let e = self.expr()?;
                self.expect_sym(")")?;
                Ok(e)
            }
            t => Err(err(self.pos(), format!("expected an expression, found {t}"))),
        }
    }
}

fn eval(e: &Expr, ctx: &Ctx) -> Result<GradedPolynomial> {
    Ok(match e {
        Expr::Num(r) => GradedPolynomial::constant(ctx, r.clone()),
        Expr::Var(name, pos) => {
            let i = ctx.try_index_of(name).ok_or_else(|| err(*pos, format!("unknown identifier `{name}`")))?;
            GradedPolynomial::var(ctx, i)
        }
        Expr::Neg(a) => eval(a, ctx)?.scale(&-Rat::one()),
        Expr::Add(a, b) => eval(a, ctx)?.checked_add(&eval(b, ctx)?)?,
        Expr::Sub(a, b) => eval(a, ctx)?.checked_sub(&eval(b, ctx)?)?,
        Expr::Mul(a, b) => eval(a, ctx)?.multiply(&eval(b, ctx)?)?,
        Expr::Pow(a, k) => eval(a, ctx)?.pow(*k),
    })
}

/// Evaluates without truncation and checks the total degree, then truncates.
fn eval_checked(e: &Expr, wide: &Ctx, ctx: &Ctx, want: Option<i32>, what: &str, pos: Pos) -> Result<GradedPolynomial> {
    let p = eval(e, wide)?;
    let degs = p.total_degrees();
    if degs.len() > 1 {
        return Err(err(pos, format!("{what} is not homogeneous: total degrees {degs:?}")));
    }
    if let (Some(w), Some(&d)) = (want, degs.first()) {
        if d != w {
            return Err(err(pos, format!("degree mismatch: {what} must have degree {w}, found {d}")));
        }
    }
    Ok(p.transfer(ctx))
}

fn field(ctx: &Ctx, wide: &Ctx, degree: i32, assignments: &[Assignment], block: &str) -> Result<Derivation> {
    let mut values = vec![GradedPolynomial::zero(ctx); ctx.len()];
    let mut seen = vec![false; ctx.len()];
    for a in assignments {
        let i = ctx
            .try_index_of(&a.var)
            .ok_or_else(|| err(a.pos, format!("unknown identifier `{}`", a.var)))?;
        if seen[i] {
            return Err(err(a.pos, format!("`{}` assigned twice in {block}", a.var)));
        }
        seen[i] = true;
        let what = format!("the value of `{}` in {block}", a.var);
        values[i] = eval_checked(&a.value, wide, ctx, Some(ctx.degree(i) + degree), &what, a.pos)?;
    }
    Derivation::new(ctx, degree, values)
}

/// A parsed input file, with every expression evaluated in its window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifoldSpec {
    pub ctx: Ctx,
    /// Field blocks by name.
    pub fields: BTreeMap<String, Derivation>,
    /// Ideal generators on the full chart.
    pub ideal: Option<Vec<GradedPolynomial>>,
    pub flowlog: Option<FlowLog>,
}

impl ManifoldSpec {
    pub fn field(&self, name: &str) -> Result<&Derivation> {
        self.fields
            .get(name)
            .ok_or_else(|| Error::Precondition(format!("the input has no `{name}` block")))
    }

    pub fn ideal(&self) -> Result<&[GradedPolynomial]> {
        self.ideal.as_deref().ok_or_else(|| Error::Precondition("the input has no `ideal` block".into()))
    }

    pub fn flowlog(&self) -> Result<&FlowLog> {
        self.flowlog.as_ref().ok_or_else(|| Error::Precondition("the input has no `flowlog` block".into()))
    }
}

pub fn parse(text: &str) -> Result<ManifoldSpec> {
    parse_with(text, None, None)
}

/// Parses with optional overrides of the truncation orders.
pub fn parse_with(text: &str, jet: Option<u32>, filt: Option<u32>) -> Result<ManifoldSpec> {
    let blocks = Parser { toks: lex(text)?, at: 0 }.file()?;
    let mut vars: Option<Vec<Variable>> = None;
    let mut window = (DEFAULT_JET, DEFAULT_FILT);
    let mut seen_truncate = false;
    for b in &blocks {
        match b {
            Block::Manifold(decls) => {
                if vars.is_some() {
                    return Err(err(decls[0].1, "second manifold block"));
                }
                let mut vs: Vec<Variable> = Vec::new();
                for (v, p) in decls {
                    if vs.iter().any(|w| w.name == v.name) {
                        return Err(err(*p, format!("`{}` declared twice", v.name)));
                    }
                    vs.push(v.clone());
                }
                vars = Some(vs);
            }
            Block::Truncate { jet, filt } => {
                if seen_truncate {
                    return Err(err(Pos { line: 1, column: 1 }, "second truncate block"));
                }
                seen_truncate = true;
                window = (*jet, *filt);
            }
            _ => {}
        }
    }
    let vars = vars.ok_or_else(|| err(Pos { line: 1, column: 1 }, "missing manifold block"))?;
    let window = (jet.unwrap_or(window.0), filt.unwrap_or(window.1));
    if window.1 == 0 {
        return Err(Error::InvalidContext("filtration order must be at least 1".into()));
    }
    let ctx = GradedContext::new(vars, window.0, window.1)?;
    let wide = ctx.with_orders(WIDE, WIDE);

    let mut spec = ManifoldSpec { ctx: ctx.clone(), fields: BTreeMap::new(), ideal: None, flowlog: None };
    for b in &blocks {
        match b {
            Block::Field { name, pos, assignments } => {
                if spec.fields.contains_key(name) {
                    return Err(err(*pos, format!("second {name} block")));
                }
                let degree = FIELD_BLOCKS.iter().find(|(n, _)| n == name).expect("known block").1;
                spec.fields.insert(name.clone(), field(&ctx, &wide, degree, assignments, name)?);
            }
            Block::Ideal(gens) => {
                if spec.ideal.is_some() {
                    return Err(err(gens[0].1, "second ideal block"));
                }
                let mut out = Vec::new();
                for (k, (e, p)) in gens.iter().enumerate() {
                    let what = format!("ideal generator {}", k + 1);
                    let g = eval_checked(e, &wide, &ctx, Some(0), &what, *p)?;
                    if g.monomials().any(|m| !m.is_base(&ctx)) {
                        return Err(err(*p, format!("{what} involves non-base variables")));
                    }
                    out.push(g);
                }
                spec.ideal = Some(out);
            }
            Block::FlowLog { window: w, steps, pos } => {
                if spec.flowlog.is_some() {
                    return Err(err(*pos, "second flowlog block"));
                }
                let (j, n) = w.unwrap_or((ctx.jet_order(), ctx.filtration_order()));
                let lctx = ctx.with_orders(j, n);
                let lwide = lctx.with_orders(WIDE, WIDE);
                let mut log = FlowLog::new(&lctx);
                for s in steps {
                    match s {
                        LogStep::Flow(assignments, p) => {
                            let g = field(&lctx, &lwide, 0, assignments, "step")?;
                            log.push_step(FlowStep::flow(g).map_err(|e| err(*p, e.to_string()))?)?;
                        }
                        LogStep::Scale { var, pos, factor } => {
                            let i = lctx
                                .try_index_of(var)
                                .ok_or_else(|| err(*pos, format!("unknown identifier `{var}`")))?;
                            log.push_rescale(i, factor.clone())?;
                        }
                    }
                }
                spec.flowlog = Some(log);
            }
            _ => {}
        }
    }
    Ok(spec)
}

/// The `manifold` and `truncate` blocks of a chart.
pub fn chart_dsl(ctx: &Ctx) -> String {
    let mut out = String::from("manifold {\n");
    for v in ctx.variables() {
        if v.degree == 0 {
            out.push_str(&format!("  base {};\n", v.name));
        } else {
            out.push_str(&format!("  gen {} : {};\n", v.name, v.degree));
        }
    }
    out.push_str("}\n");
    out.push_str(&format!("truncate {{ jet {}; filt {}; }}\n", ctx.jet_order(), ctx.filtration_order()));
    out
}

/// A field block; empty fields print one explicit zero assignment.
pub fn field_dsl(name: &str, x: &Derivation) -> String {
    let lines = x.dsl_lines();
    let mut out = format!("{name} {{\n");
    if lines.is_empty() {
        out.push_str(&format!("  {} -> 0;\n", x.ctx().variable(0).name));
    }
    for l in lines {
        out.push_str("  ");
        out.push_str(&l);
        out.push('\n');
    }
    out.push_str("}\n");
    out
}

pub fn ideal_dsl(gens: &[GradedPolynomial]) -> String {
    let gs: Vec<String> = gens.iter().map(|g| g.to_string()).collect();
    format!("ideal {{ {} }}\n", gs.join(", "))
}

impl fmt::Display for ManifoldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", chart_dsl(&self.ctx))?;
        if let Some(gens) = &self.ideal {
            write!(f, "{}", ideal_dsl(gens))?;
        }
        for (name, x) in &self.fields {
            write!(f, "{}", field_dsl(name, x))?;
        }
        if let Some(log) = &self.flowlog {
            writeln!(f, "{}", log.dsl())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const XY: &str = "manifold { base x; base y; gen xi : -1; } Q { xi -> x*y; }";

    fn location(e: Error) -> (usize, usize, String) {
        match e {
            Error::Parse { line, column, message } => (line, column, message),
            other => panic!("expected a parse error, got {other}"),
        }
    }

    #[test]
    fn xy_model() {
        let s = parse(XY).unwrap();
        assert_eq!(s.ctx.len(), 3);
        assert_eq!(s.ctx.jet_order(), DEFAULT_JET);
        let q = s.field("Q").unwrap();
        assert_eq!(q.value(2).to_string(), "x*y");
        assert!(q.value(0).is_zero());
    }

    #[test]
    fn missing_generator_degree() {
        let (l, c, m) = location(parse("manifold { gen theta; }").unwrap_err());
        assert_eq!((l, c), (1, 16));
        assert!(m.contains("missing degree"), "{m}");
    }

    #[test]
    fn degree_mismatch_names_the_assignment() {
        let src = "manifold { base x; gen xi : -1; }\nQ { xi -> x; x -> x; }";
        let (l, c, m) = location(parse(src).unwrap_err());
        assert_eq!((l, c), (2, 14));
        assert!(m.contains("`x`") && m.contains("degree 1"), "{m}");
    }

    #[test]
    fn unknown_identifier() {
        let (_, _, m) = location(parse("manifold { base x; gen xi : -1; } Q { xi -> z; }").unwrap_err());
        assert!(m.contains("unknown identifier `z`"));
    }

    #[test]
    fn syntax_error_location() {
        let (l, c, _) = location(parse("manifold { base x; }\nQ { x -> (x + ; }").unwrap_err());
        assert_eq!((l, c), (2, 15));
    }

    #[test]
    fn expressions() {
        let s = parse("manifold { base x; gen xi : -1; gen th : 1; } truncate { jet 3; filt 2; } Q { x -> -(1/2)*th*(1 + x)^2 - 3/4*x^3*th; }")
            .unwrap();
        // x^4*th and x^5*th fall outside jet order 3
        assert_eq!(s.field("Q").unwrap().value(0).to_string(), "-1/2*th - x*th - 1/2*x^2*th - 3/4*x^3*th");
    }

    #[test]
    fn degree_checked_before_truncation() {
        // x^5 is cut off at jet 2 but still makes the value inhomogeneous
        let src = "manifold { base x; gen xi : -1; } truncate { jet 2; filt 2; } Q { xi -> x + x^5*xi; }";
        assert!(parse(src).is_err());
    }

    #[test]
    fn round_trip() {
        let src = "manifold { base x; base y; gen xi : -1; gen theta : 1; }
            truncate { jet 3; filt 3; }
            ideal { x*y, x^2 }
            Q { xi -> x*y; y -> 2/3*(1+y)*theta; }
            qI { x -> x; }
            flowlog { jet 5; filt 4; step { x -> xi*theta; } scale { y : -2; } }";
        let s = parse(src).unwrap();
        let printed = s.to_string();
        let again = parse(&printed).unwrap();
        assert_eq!(s, again);
        assert_eq!(printed, again.to_string());
        let log = again.flowlog().unwrap();
        assert_eq!(log.ctx().jet_order(), 5);
        assert_eq!(log.len(), 2);
    }

    #[test]
    fn overrides_window() {
        let s = parse_with(XY, Some(2), Some(1)).unwrap();
        assert_eq!((s.ctx.jet_order(), s.ctx.filtration_order()), (2, 1));
    }

    #[test]
    fn rejects_bad_blocks() {
        assert!(parse("manifold { base x : 1; }").is_err());
        assert!(parse("manifold { gen x : 0; }").is_err());
        assert!(parse("manifold { base x; base x; }").is_err());
        assert!(parse("manifold { base x; } ideal { x, xi }").is_err());
        assert!(parse("manifold { base x; gen xi:-1; } ideal { xi }").is_err());
        assert!(parse("manifold { base x; gen t : 1; } flowlog { step { x -> t; } }").is_err());
        assert!(parse("manifold { base x; } frob { }").is_err());
    }
}
