//! Command dispatch and report emission for the `gradedq` binary.
//!
//! Text output of transformation commands is itself an input document:
//! the chart, the resulting `Q` block and the `flowlog` that produced it,
//! with summary lines as `#` comments. Structured output is one JSON
//! object per line, each carrying `version`, `command` and `kind`.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::{One, Signed};
use serde_json::{json, Value};

use crate::derivations::{push_forward_log, Derivation, FlowLog};
use crate::dsl::{chart_dsl, field_dsl, ideal_dsl, parse, parse_with, ManifoldSpec};
use crate::error::Error;
use crate::graded_core::{Ctx, GradedContext, GradedPolynomial, Variable};
use crate::koszul_tate::{
    advf_cohomology, assemble_tilde_delta, complex_cohomology, kt_build, kt_verify, lift_derivation, linearization,
    Cochain, CochainDegree, CohomologyReport, FieldDegree, KTResolution,
};
use crate::linalg::PivotOrder;
use crate::normal_forms::trivialize::full_basis;
use crate::normal_forms::{contracting_homotopy, homotopy_alpha, normal_form, split_at_point, trivialize};
use crate::perturbation::{construct_q, intertwine};
use crate::qmanifold::{anchor, check_q, curvature, negative_part, zero_locus_dga, QStructure, Verification};
use crate::random;

pub const FORMAT_VERSION: u32 = 1;
const DEFAULT_DEPTH: u32 = 2;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Structured,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Pivot {
    #[default]
    Lowest,
    Highest,
}

impl From<Pivot> for PivotOrder {
    fn from(p: Pivot) -> Self {
        match p {
            Pivot::Lowest => PivotOrder::Lowest,
            Pivot::Highest => PivotOrder::Highest,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "gradedq", version, about = "Normal forms of graded Q-manifolds at jet truncation")]
#[command(allow_negative_numbers = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Opts {
    /// Input document; standard input when absent.
    #[arg(long = "in", global = true, value_name = "FILE")]
    pub input: Option<PathBuf>,
    /// Total degrees, comma separated.
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    pub degree: Vec<i32>,
    /// Negative degree.
    #[arg(long, global = true)]
    pub negdeg: Option<u32>,
    /// Overrides the jet order of the input.
    #[arg(long, global = true)]
    pub jet: Option<u32>,
    /// Overrides the filtration order of the input.
    #[arg(long, global = true)]
    pub filt: Option<u32>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Depth of Koszul–Tate resolutions.
    #[arg(long, global = true)]
    pub depth: Option<u32>,
    /// Document holding a flowlog block, for `replay`.
    #[arg(long, global = true, value_name = "FILE")]
    pub log: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Pivot::Lowest)]
    pub pivot: Pivot,
    /// Vector-field cohomology instead of function cohomology.
    #[arg(long, global = true)]
    pub vf: bool,
    /// Number of contractible pairs for `random`.
    #[arg(long, global = true)]
    pub pairs: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Verify [Q,Q] = 0.
    Check,
    /// Curvature components.
    Curvature,
    /// Q modulo the positive coordinates.
    NegativePart,
    /// Zero-locus ideal and induced differential.
    ZeroLocus,
    /// Anchor matrix and rank at the origin.
    Anchor,
    /// Conjugate Q to the contraction with its curvature.
    Trivialize,
    /// Check Q h + h Q = id on the truncated basis after trivializing.
    Homotopy,
    /// Split off contractible pairs at a zero-locus origin.
    Split,
    /// Koszul–Tate resolution of the `ideal` block.
    KtBuild,
    /// Acyclicity checks of the resolution.
    KtVerify,
    /// Cohomology of `delta`/`Q`, or of the resolution of `ideal`.
    KtCohomology,
    /// Linearization complex of the resolution.
    Linearize,
    /// Lift the `qI` block to the resolution.
    Lift,
    /// Resolution extended by the positive coordinates of the chart.
    Assemble,
    /// Build Q from `delta` (or `ideal`) and `Qplus`.
    Perturb,
    /// Flow log taking `Q` to `Qprime`.
    Intertwine,
    /// Apply a flow log to `Q`.
    Replay,
    /// A seeded random Q with invertible curvature, or a split input with `--pairs`.
    Random,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Check => "check",
            Command::Curvature => "curvature",
            Command::NegativePart => "negative-part",
            Command::ZeroLocus => "zero-locus",
            Command::Anchor => "anchor",
            Command::Trivialize => "trivialize",
            Command::Homotopy => "homotopy",
            Command::Split => "split",
            Command::KtBuild => "kt-build",
            Command::KtVerify => "kt-verify",
            Command::KtCohomology => "kt-cohomology",
            Command::Linearize => "linearize",
            Command::Lift => "lift",
            Command::Assemble => "assemble",
            Command::Perturb => "perturb",
            Command::Intertwine => "intertwine",
            Command::Replay => "replay",
            Command::Random => "random",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Engine(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Engine(e) if e.is_mathematical() => 1,
            CliError::Engine(_) => 2,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Accumulated report of one command.
pub struct Output {
    format: Format,
    command: &'static str,
    text: String,
    records: Vec<Value>,
    failed: bool,
}

impl Output {
    fn new(format: Format, command: &'static str) -> Self {
        Output { format, command, text: String::new(), records: Vec::new(), failed: false }
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        if !s.as_ref().ends_with('\n') {
            self.text.push('\n');
        }
    }

    fn record(&mut self, kind: &str, body: Value) {
        let mut v = json!({ "version": FORMAT_VERSION, "command": self.command, "kind": kind });
        if let (Value::Object(m), Value::Object(b)) = (&mut v, body) {
            m.extend(b);
        }
        self.records.push(v);
    }

    pub fn render(&self) -> String {
        match self.format {
            Format::Text => self.text.clone(),
            Format::Structured => {
                let mut s = String::new();
                for r in &self.records {
                    s.push_str(&r.to_string());
                    s.push('\n');
                }
                s
            }
        }
    }

    pub fn exit_code(&self) -> i32 {
        i32::from(self.failed)
    }
}

fn read(path: &Option<PathBuf>) -> CliResult<String> {
    match path {
        Some(p) => std::fs::read_to_string(p).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", p.display()))),
        None => {
            let mut s = String::new();
            std::io::Read::read_to_string(&mut std::io::stdin(), &mut s)
                .map_err(|e| CliError::Usage(format!("cannot read standard input: {e}")))?;
            Ok(s)
        }
    }
}

fn need<'a>(spec: &'a ManifoldSpec, block: &str) -> CliResult<&'a Derivation> {
    spec.fields.get(block).ok_or_else(|| CliError::Usage(format!("the input needs a `{block}` block")))
}

fn need_q(spec: &ManifoldSpec) -> CliResult<QStructure> {
    Ok(check_q(need(spec, "Q")?)?)
}

fn resolution(spec: &ManifoldSpec, opts: &Opts) -> CliResult<KTResolution> {
    let ideal = spec.ideal.as_ref().ok_or_else(|| CliError::Usage("the input needs an `ideal` block".into()))?;
    Ok(kt_build(ideal, opts.depth.unwrap_or(DEFAULT_DEPTH))?)
}

fn positive_variables(ctx: &Ctx) -> Vec<(String, i32)> {
    ctx.variables().iter().filter(|v| v.degree > 0).map(|v| (v.name.clone(), v.degree)).collect()
}

fn chart_json(ctx: &Ctx) -> Value {
    json!({
        "variables": ctx.variables().iter().map(|v| json!({"name": v.name, "degree": v.degree})).collect::<Vec<_>>(),
        "jet": ctx.jet_order(),
        "filt": ctx.filtration_order(),
    })
}

/// Values as `{variable: polynomial}` with rational coefficients kept as strings.
fn field_json(x: &Derivation) -> Value {
    let mut m = serde_json::Map::new();
    for (i, v) in x.values().iter().enumerate() {
        if !v.is_zero() {
            m.insert(x.ctx().variable(i).name.clone(), json!(v.to_string()));
        }
    }
    json!({ "degree": x.degree(), "values": Value::Object(m) })
}

fn log_json(log: &FlowLog) -> Value {
    json!({ "steps": log.len(), "dsl": log.dsl() })
}

/// Chart, `Q` block and optional flow log, as a document.
fn document(out: &mut Output, name: &str, q: &Derivation, log: Option<&FlowLog>) {
    out.line(chart_dsl(q.ctx()));
    out.line(field_dsl(name, q));
    if let Some(l) = log {
        out.line(l.dsl());
    }
    let mut body = json!({ "chart": chart_json(q.ctx()), "block": name, "field": field_json(q), "dsl": field_dsl(name, q) });
    if let Some(l) = log {
        body["flowlog"] = log_json(l);
    }
    out.record("result", body);
}

fn greek(name: &str) -> String {
    const TABLE: [(&str, &str); 12] = [
        ("alpha", "α"),
        ("beta", "β"),
        ("gamma", "γ"),
        ("zeta", "ζ"),
        ("theta", "θ"),
        ("kappa", "κ"),
        ("lambda", "λ"),
        ("omega", "ω"),
        ("chi", "χ"),
        ("eta", "η"),
        ("xi", "ξ"),
        ("mu", "μ"),
    ];
    for (w, g) in TABLE {
        if let Some(rest) = name.strip_prefix(w) {
            if rest.chars().all(|c| c.is_ascii_digit()) {
                return format!("{g}{rest}");
            }
        }
    }
    name.to_string()
}

pub fn superscript(n: i64) -> String {
    n.to_string()
        .chars()
        .map(|c| match c {
            '-' => '⁻',
            d => "⁰¹²³⁴⁵⁶⁷⁸⁹".chars().nth(d.to_digit(10).expect("digit") as usize).expect("digit"),
        })
        .collect()
}

fn pretty_terms(p: &GradedPolynomial, suffix: &str, out: &mut Vec<(bool, String)>) {
    let ctx = p.ctx();
    let mut ts: Vec<_> = p.terms().collect();
    ts.sort_by_key(|(m, _)| m.weight());
    for (m, c) in ts {
        let mut mono = String::new();
        for (i, &e) in m.exponents().iter().enumerate() {
            if e > 0 {
                mono.push_str(&greek(&ctx.variable(i).name));
                if e > 1 {
                    mono.push_str(&superscript(e as i64));
                }
            }
        }
        let a = c.abs();
        let coeff = if a.is_one() && !(mono.is_empty() && suffix.is_empty()) { String::new() } else { a.to_string() };
        out.push((c.is_negative(), format!("{coeff}{mono}{suffix}")));
    }
}

fn join_signed(terms: Vec<(bool, String)>) -> String {
    if terms.is_empty() {
        return "0".into();
    }
    let mut s = String::new();
    for (k, (neg, t)) in terms.into_iter().enumerate() {
        match (k, neg) {
            (0, true) => s.push('-'),
            (0, false) => {}
            (_, true) => s.push_str(" - "),
            (_, false) => s.push_str(" + "),
        }
        s.push_str(&t);
    }
    s
}

/// Conventional notation: Greek letters, implicit products, `∂/∂`.
pub fn pretty(c: &Cochain) -> String {
    let mut terms = Vec::new();
    match c {
        Cochain::Function(p) => pretty_terms(p, "", &mut terms),
        Cochain::Field(x) => {
            for (i, v) in x.values().iter().enumerate() {
                pretty_terms(v, &format!("∂/∂{}", greek(&x.ctx().variable(i).name)), &mut terms);
            }
        }
    }
    join_signed(terms)
}

fn cohomology_lines(out: &mut Output, rep: &CohomologyReport, labels: &[(i64, Option<u32>)], vf: bool) {
    for (d, &(total, neg)) in rep.degrees.iter().zip(labels) {
        let h = match neg {
            Some(n) if vf => format!("H{} (negative degree {n})", superscript(total)),
            Some(n) => format!("H (negative degree {n})"),
            None => format!("H{}", superscript(total)),
        };
        let mut line = format!("dim {h} = {}", d.dimension);
        let reps: Vec<String> = d.cocycles.iter().map(pretty).collect();
        match reps.len() {
            0 => {}
            1 => line.push_str(&format!("; representative {}", reps[0])),
            _ => line.push_str(&format!("; representatives {}", reps.join(", "))),
        }
        out.line(line);
        out.line(format!(
            "  jet {}, cochains {}, kernel {}, image {}{}",
            d.jet_order,
            d.cochains,
            d.kernel,
            d.image,
            d.caveat().map(|c| format!(", {c}")).unwrap_or_default()
        ));
        out.record(
            "cohomology",
            json!({
                "vector_fields": vf,
                "total": if neg.is_some() && !vf { Value::Null } else { json!(total) },
                "negative": neg,
                "label": d.degree,
                "jet": d.jet_order,
                "cochains": d.cochains,
                "kernel": d.kernel,
                "image": d.image,
                "dimension": d.dimension,
                "stable": d.stable,
                "representatives": d.representatives,
            }),
        );
    }
}

fn kt_summary(out: &mut Output, kt: &KTResolution) {
    out.line(format!("# depth {}", kt.depth));
    for (l, names) in kt.levels.iter().enumerate() {
        out.line(format!("# degree {}: {}", -(l as i32 + 1), names.join(", ")));
    }
    out.line(ideal_dsl(&kt.ideal));
    document(out, "delta", kt.delta(), None);
    out.record("levels", json!({ "depth": kt.depth, "levels": kt.levels }));
}

/// Runs one command on an already parsed input.
pub fn execute(command: Command, opts: &Opts, spec: Option<&ManifoldSpec>) -> CliResult<Output> {
    let mut out = Output::new(opts.format, command.name());
    let spec_ref = || spec.ok_or_else(|| CliError::Usage("no input".into()));
    match command {
        Command::Check => {
            let q = need_q(spec_ref()?)?;
            match q.verification() {
                Verification::Failed { variable, residual } => {
                    out.line(format!("[Q,Q] does not vanish; witness `{variable}`: [Q,Q]({variable}) = {residual}"));
                    out.record("check", json!({ "verified": false, "witness": variable, "residual": residual.to_string() }));
                    out.failed = true;
                }
                _ => {
                    let c = q.ctx();
                    out.line(format!("[Q,Q] = 0 at jet {}, filt {}", c.jet_order(), c.filtration_order()));
                    out.record("check", json!({ "verified": true }));
                }
            }
        }
        Command::Curvature => {
            let q = need_q(spec_ref()?)?;
            q.require_verified()?;
            let k = curvature(&q);
            for (i, p) in &k.entries {
                out.line(format!("kappa({}) = {p}", q.ctx().variable(*i).name));
            }
            out.line(format!("vanishes at origin: {}", k.vanishes_at_origin()));
            let entries: Vec<Value> = k
                .entries
                .iter()
                .map(|(i, p)| json!({ "variable": q.ctx().variable(*i).name, "value": p.to_string() }))
                .collect();
            out.record("curvature", json!({ "entries": entries, "vanishes_at_origin": k.vanishes_at_origin() }));
        }
        Command::NegativePart => {
            let q = need_q(spec_ref()?)?;
            q.require_verified()?;
            let n = negative_part(&q)?;
            document(&mut out, "Q", n.q(), None);
        }
        Command::ZeroLocus => {
            let q = need_q(spec_ref()?)?;
            q.require_verified()?;
            let z = zero_locus_dga(&q)?;
            let gens: Vec<String> = z.ideal_generators().iter().map(|g| g.to_string()).collect();
            out.line(format!("# quotient dimension {}", z.reducer.quotient_dimension()));
            if !gens.is_empty() {
                out.line(ideal_dsl(z.ideal_generators()));
            }
            document(&mut out, "Qplus", &z.q_plus, None);
            let residual = z.square_residual()?;
            if let Some((v, r)) = &residual {
                out.line(format!("# Qplus^2 does not vanish modulo the ideal on `{v}`: {r}"));
                out.failed = true;
            }
            out.record(
                "zero-locus",
                json!({
                    "ideal": gens,
                    "quotient_dimension": z.reducer.quotient_dimension(),
                    "square_residual": residual.map(|(v, r)| json!({"variable": v, "residual": r.to_string()})),
                }),
            );
        }
        Command::Anchor => {
            let q = need_q(spec_ref()?)?;
            q.require_verified()?;
            let a = anchor(&q);
            out.line(format!("rank {}", a.rank));
            out.line(format!("columns: {}", a.columns.join(" ")));
            for (r, row) in a.rows.iter().zip(&a.matrix) {
                out.line(format!("{r}: {}", row.join(" ")));
            }
            if !a.at_zero_locus {
                out.line("# the origin is not in the zero locus; the matrix depends on the splitting");
            }
            out.record("anchor", serde_json::to_value(&a).expect("serializable"));
        }
        Command::Trivialize => {
            let q = need_q(spec_ref()?)?;
            let t = trivialize(&q)?;
            out.line(format!("# alpha = {}", t.alpha));
            out.line(format!("# {} flow steps", t.log.effective_len()));
            document(&mut out, "Q", t.q_final.q(), Some(&t.log));
        }
        Command::Homotopy => {
            let q = need_q(spec_ref()?)?;
            let t = trivialize(&q)?;
            let alpha = homotopy_alpha(&t.q_final)?;
            let ctx = t.q_final.ctx();
            let basis = full_basis(ctx, ctx.filtration_order());
            let rep = contracting_homotopy(t.q_final.q(), &alpha, &basis)?;
            out.line(format!("h = {alpha} * (.)"));
            for (d, n) in &rep.checked {
                out.line(format!("degree {d}: {n} basis monomials"));
            }
            if rep.holds() {
                out.line("Q h + h Q = id on every basis monomial");
            } else {
                for f in &rep.failures {
                    out.line(format!("fails on {f}"));
                }
                out.failed = true;
            }
            out.record(
                "homotopy",
                json!({ "alpha": alpha.to_string(), "checked": rep.checked, "failures": rep.failures, "holds": rep.holds() }),
            );
        }
        Command::Split => {
            let q = need_q(spec_ref()?)?;
            let s = split_at_point(&q)?;
            let nf = normal_form(&s, q.ctx())?;
            out.line(format!("# anchor rank {}", s.anchor_rank));
            for (y, t) in &s.pairs {
                out.line(format!("# pair {t} d/d{y}"));
            }
            out.line(format!("# residual: {}", s.residual.q()));
            document(&mut out, "Q", &nf, Some(&s.log));
            out.record(
                "split",
                json!({ "anchor_rank": s.anchor_rank, "pairs": s.pairs, "residual": field_json(s.residual.q()) }),
            );
        }
        Command::KtBuild => {
            let kt = resolution(spec_ref()?, opts)?;
            kt_summary(&mut out, &kt);
        }
        Command::KtVerify => {
            let kt = resolution(spec_ref()?, opts)?;
            let v = kt_verify(&kt)?;
            out.line(format!("[delta,delta] = 0: {}", v.squares_to_zero));
            for (k, d) in &v.lower {
                out.line(format!("dim H{} = {d}", superscript(-(*k as i64))));
            }
            out.line(format!("dim H⁰ = {}; quotient dimension {}", v.h0, v.quotient_dimension));
            out.line(if v.holds() { "resolution verified" } else { "resolution NOT verified" });
            out.failed = !v.holds();
            out.record("kt-verify", serde_json::to_value(&v).expect("serializable"));
        }
        Command::KtCohomology => {
            let spec = spec_ref()?;
            let delta = match spec.fields.get("delta").or_else(|| spec.fields.get("Q")) {
                Some(d) => d.clone(),
                None => resolution(spec, opts)?.delta().clone(),
            };
            let mut labels = Vec::new();
            let rep = if opts.vf {
                let totals = if opts.degree.is_empty() { vec![1] } else { opts.degree.clone() };
                let degs: Vec<FieldDegree> = totals
                    .iter()
                    .map(|&t| FieldDegree { total: t, negative: opts.negdeg.map(i64::from) })
                    .collect();
                labels.extend(totals.iter().map(|&t| (t as i64, opts.negdeg)));
                advf_cohomology(&delta, &degs)?
            } else {
                let degs: Vec<CochainDegree> = match (opts.negdeg, opts.degree.is_empty()) {
                    (Some(n), true) => {
                        labels.push((0, Some(n)));
                        vec![CochainDegree::Negative(n)]
                    }
                    (Some(_), false) => {
                        return Err(CliError::Usage("function cohomology takes --degree or --negdeg, not both".into()))
                    }
                    (None, _) => {
                        let totals = if opts.degree.is_empty() { vec![0] } else { opts.degree.clone() };
                        labels.extend(totals.iter().map(|&t| (t as i64, None)));
                        totals.into_iter().map(CochainDegree::Total).collect()
                    }
                };
                complex_cohomology(&delta, &degs)?
            };
            cohomology_lines(&mut out, &rep, &labels, opts.vf);
        }
        Command::Linearize => {
            let kt = resolution(spec_ref()?, opts)?;
            let l = linearization(&kt)?;
            for (k, m) in l.maps.iter().enumerate() {
                out.line(format!("level {k} -> {}:", k + 1));
                for (row, name) in m.iter().zip(&l.levels[k + 1]) {
                    out.line(format!("  {name}: [{}]", row.join(", ")));
                }
            }
            out.line(format!("quotient dimension {}", l.quotient_dimension));
            for (k, d) in l.dims.iter().enumerate() {
                out.line(format!("dim H at level {k} = {d}"));
            }
            out.record("linearize", serde_json::to_value(&l).expect("serializable"));
        }
        Command::Lift => {
            let spec = spec_ref()?;
            let qi = need(spec, "qI")?;
            let kt = resolution(spec, opts)?;
            let images: Vec<GradedPolynomial> =
                spec.ctx.base_indices().into_iter().map(|i| qi.value(i).clone()).collect();
            let q = lift_derivation(&images, &kt)?;
            out.line("# [delta, lift] = 0; induced derivation equals qI modulo the ideal");
            out.line(ideal_dsl(&kt.ideal));
            out.line(field_dsl("delta", kt.delta()));
            document(&mut out, "lift", &q, None);
        }
        Command::Assemble => {
            let spec = spec_ref()?;
            let kt = resolution(spec, opts)?;
            let t = assemble_tilde_delta(&kt, &positive_variables(&spec.ctx))?;
            out.line(ideal_dsl(&kt.ideal));
            document(&mut out, "delta", t.q(), None);
        }
        Command::Perturb => {
            let spec = spec_ref()?;
            let qplus = need(spec, "Qplus")?;
            let delta = match spec.fields.get("delta") {
                Some(d) => check_q(d)?,
                None => assemble_tilde_delta(&resolution(spec, opts)?, &positive_variables(&spec.ctx))?,
            };
            let c = construct_q(&delta, &qplus.transfer(delta.ctx()), opts.pivot.into())?;
            for (n, corr) in &c.stages {
                out.line(format!("# stage {n}: {corr}"));
            }
            out.record(
                "stages",
                json!(c.stages.iter().map(|(n, x)| json!({"negative": n, "correction": field_json(x)})).collect::<Vec<_>>()),
            );
            document(&mut out, "Q", c.q.q(), None);
        }
        Command::Intertwine => {
            let spec = spec_ref()?;
            let q = need_q(spec)?;
            let qp = check_q(need(spec, "Qprime")?)?;
            let log = intertwine(&q, &qp, opts.pivot.into())?;
            out.line(format!("# {} flow steps", log.effective_len()));
            document(&mut out, "Q", qp.q(), Some(&log));
        }
        Command::Replay => {
            let spec = spec_ref()?;
            let q = need(spec, "Q")?;
            let log = match &opts.log {
                Some(_) => {
                    let text = read(&opts.log)?;
                    parse(&text)?.flowlog.ok_or_else(|| CliError::Usage("the log file has no flowlog block".into()))?
                }
                None => spec.flowlog.clone().ok_or_else(|| CliError::Usage("no flowlog block; pass --log".into()))?,
            };
            let moved = push_forward_log(&log, q)?;
            document(&mut out, "Q", &moved, None);
        }
        Command::Random => {
            let mut rng = random::rng(opts.seed);
            let (jet, filt) = (opts.jet.unwrap_or(3), opts.filt.unwrap_or(4));
            let q = match opts.pairs {
                Some(p) => random::random_split_input(&mut rng, p, jet, filt).0,
                None => random::random_unit_curvature_q(&mut rng, jet, filt),
            };
            out.line(format!("# seed {}", opts.seed));
            document(&mut out, "Q", q.q(), None);
        }
    }
    Ok(out)
}

/// Parses the input (when the command needs one), runs, and renders.
/// Returns the report and the process exit code.
pub fn run(cli: &Cli) -> (String, i32) {
    let opts = &cli.opts;
    let result = (|| {
        let spec = if cli.command == Command::Random {
            None
        } else {
            Some(parse_with(&read(&opts.input)?, opts.jet, opts.filt)?)
        };
        execute(cli.command, opts, spec.as_ref())
    })();
    match result {
        Ok(out) => (out.render(), out.exit_code()),
        Err(e) => {
            let code = e.exit_code();
            let rendered = match opts.format {
                Format::Text => format!("error: {e}\n"),
                Format::Structured => {
                    let mut v = json!({
                        "version": FORMAT_VERSION,
                        "command": cli.command.name(),
                        "kind": "error",
                        "message": e.to_string(),
                        "exit_code": code,
                    });
                    if let CliError::Engine(Error::Parse { line, column, .. }) = &e {
                        v["line"] = json!(line);
                        v["column"] = json!(column);
                    }
                    format!("{v}\n")
                }
            };
            (rendered, code)
        }
    }
}

/// A chart from `(name, degree)` pairs, for callers building inputs in code.
pub fn chart(pairs: &[(&str, i32)], jet: u32, filt: u32) -> crate::error::Result<Ctx> {
    GradedContext::new(pairs.iter().map(|(n, d)| Variable::new(*n, *d)).collect(), jet, filt)
}
