use std::fs;
use std::path::Path;

use autalg::algebra::{parse_any, Algebra, AnyAlgebra, NotSimpleWitness, SimplicityMode, SimplicityVerdict, TraceKind};
use autalg::autgroup::{
    automorphism_group, brute_force_automorphisms, expectation_from_meta, expect_d_action, gl_order, match_expected,
    verify_block_hypotheses, AutGroupError, AutomorphismSet, EnumerationOptions, EnumerationStats, DEFAULT_BUDGET,
};
use autalg::constructions::{
    algebra_c, algebra_d, algebra_e, automorphism_checks, exterior_b, invariant_f, lambda_for, monomial_line,
    realize_finite_group, rigid_algebra, simplicity_check, units, wrap_with_params, Check, CheckStatus,
    ConstructionError, ConstructionParams, DParams, RealizeOptions,
};
use autalg::field::{first_irreducible_modulus, field_make, AnyField, Field};
use autalg::graded::{build_a, Flavor};
use autalg::linalg::{Matrix, Subspace};
use autalg::perm::{line_normalizer, symmetric_group, PermGroup};
use serde_json::{json, Value};

use crate::{
    AlgebraArg, AutgroupArgs, BudgetArgs, Cli, Command, ConstructArgs, ExpectArg, FlavorArg, Kind, ModeArg,
    NormalizerArgs, RealizeArgs, SimplicityArgs,
};

/// Exit code, human text and JSON report of one invocation.
#[derive(Debug)]
pub struct Outcome {
    pub code: u8,
    pub text: String,
    pub json: Value,
    pub error: Option<String>,
}

const OK: u8 = 0;
const VIOLATION: u8 = 1;
const USAGE: u8 = 2;
const INCONCLUSIVE: u8 = 3;

impl Outcome {
    fn usage(msg: impl Into<String>) -> Self {
        let msg = msg.into();
        Outcome { code: USAGE, text: String::new(), json: json!({ "exit_code": USAGE, "error": msg }), error: Some(msg) }
    }

    /// Exit code from the checks: any failure is a violation (with its witness
    /// lifted into the report), else any inconclusive check makes the run inconclusive.
    fn from_checks(checks: &[Check], mut json: Value, mut text: String) -> Self {
        let failed = checks.iter().find(|c| c.status == CheckStatus::Fail);
        let code = if failed.is_some() {
            VIOLATION
        } else if checks.iter().any(|c| c.status == CheckStatus::Inconclusive) {
            INCONCLUSIVE
        } else {
            OK
        };
        for c in checks {
            text.push_str(&format!("{:<18} {:<12} {}\n", c.claim, status_name(c.status), c.detail));
        }
        json["checks"] = json!(checks);
        if let Some(c) = failed {
            json["witness"] = json!({
                "claim": c.claim,
                "detail": c.detail,
                "value": c.witness.clone().unwrap_or(Value::Null),
            });
        }
        json["exit_code"] = json!(code);
        Outcome { code, text, json, error: failed.map(|c| format!("{} fails: {}", c.claim, c.detail)) }
    }
}

fn status_name(s: CheckStatus) -> &'static str {
    match s {
        CheckStatus::Pass => "pass",
        CheckStatus::Fail => "FAIL",
        CheckStatus::Inconclusive => "inconclusive",
        CheckStatus::Skipped => "skipped",
    }
}

type Res = Result<Outcome, Outcome>;

fn usage<E: std::fmt::Display>(e: E) -> Outcome {
    Outcome::usage(e.to_string())
}

macro_rules! with_field {
    ($any:expr, $f:ident => $body:expr) => {
        match $any {
            AnyField::Finite($f) => $body,
            AnyField::Rational($f) => $body,
        }
    };
}

macro_rules! with_algebra {
    ($any:expr, $a:ident => $body:expr) => {
        match $any {
            AnyAlgebra::Finite($a) => $body,
            AnyAlgebra::Rational($a) => $body,
        }
    };
}

pub fn dispatch(cli: &Cli) -> Outcome {
    let workers = cli.workers.max(1);
    let result = match &cli.command {
        Command::Realize(a) => realize(a, workers),
        Command::Construct(a) => construct(a),
        Command::Verify(a) => verify(a, workers),
        Command::Autgroup(a) => autgroup(a, workers),
        Command::Simplicity(a) => simplicity(a, workers),
        Command::Normalizer(a) => normalizer(a),
        Command::TraceForms(a) => trace_forms(a),
        Command::ExportTensor(a) => export_tensor(a),
    };
    result.unwrap_or_else(|e| e)
}

/// `p`, `p,k`, `p,k,c0 c1 … ck`, or `0`/`Q` for the rationals.
pub fn parse_field(text: &str) -> Result<AnyField, Outcome> {
    let t = text.trim();
    if t == "0" || t.eq_ignore_ascii_case("q") {
        return field_make(0, 1, None).map_err(usage);
    }
    let parts: Vec<&str> = t.split(',').map(str::trim).collect();
    let num = |s: &str, what: &str| s.parse::<u64>().map_err(|_| Outcome::usage(format!("field: bad {what} `{s}`")));
    let p = num(parts[0], "characteristic")?;
    match parts.len() {
        1 => field_make(p, 1, None).map_err(usage),
        2 => {
            let k = num(parts[1], "degree")? as u32;
            if k == 1 {
                return field_make(p, 1, None).map_err(usage);
            }
            let m = first_irreducible_modulus(p, k).map_err(usage)?;
            field_make(p, k, Some(&m)).map_err(usage)
        }
        3 => {
            let k = num(parts[1], "degree")? as u32;
            let m = parts[2].split_whitespace().map(|c| num(c, "modulus coefficient")).collect::<Result<Vec<_>, _>>()?;
            field_make(p, k, Some(&m)).map_err(usage)
        }
        _ => Err(Outcome::usage(format!("field: expected p[,k[,modulus]], got `{text}`"))),
    }
}

fn read(path: &Path) -> Result<String, Outcome> {
    fs::read_to_string(path).map_err(|e| Outcome::usage(format!("cannot read {}: {e}", path.display())))
}

fn load(path: &Path) -> Result<AnyAlgebra, Outcome> {
    parse_any(&read(path)?).map_err(|e| Outcome::usage(format!("{}: {e}", path.display())))
}

fn load_params(path: Option<&Path>) -> Result<ConstructionParams, Outcome> {
    match path {
        None => Ok(ConstructionParams::default()),
        Some(p) => ConstructionParams::from_json(&read(p)?).map_err(|e| Outcome::usage(format!("{}: {e}", p.display()))),
    }
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), Outcome> {
    if let Some(p) = path {
        fs::write(p, text).map_err(|e| Outcome::usage(format!("cannot write {}: {e}", p.display())))?;
    }
    Ok(())
}

fn budget_of(b: &BudgetArgs) -> u64 {
    if b.force {
        u64::MAX
    } else {
        b.budget.unwrap_or(DEFAULT_BUDGET)
    }
}

/// An enumeration refused for its size is a usage matter: the caller decides
/// whether to pay for it.
fn budget_refusal(out: &mut Outcome) {
    let refused = out.json["checks"]
        .as_array()
        .into_iter()
        .flatten()
        .any(|c| c["claim"] == "aut_order" && c["status"] == "skipped" && c["detail"].as_str().is_some_and(|d| d.contains("budget")));
    if refused && out.code == OK {
        out.code = USAGE;
        out.json["exit_code"] = json!(USAGE);
        out.error = Some("automorphism enumeration exceeds the budget; raise --budget or pass --force".into());
    }
}

fn matrix_json<F: Field>(f: &F, m: &Matrix<F::Elem>) -> Value {
    Value::Array((0..m.rows()).map(|i| Value::Array(m.row(i).iter().map(|x| json!(f.format_elem(x))).collect())).collect())
}

fn parse_algebra_json(text: &str) -> Value {
    serde_json::from_str(text).expect("algebra serializer emits valid JSON")
}

fn construction_error(e: ConstructionError) -> Outcome {
    usage(e)
}

// ---------------------------------------------------------------------------

fn realize(args: &RealizeArgs, workers: usize) -> Res {
    let g = PermGroup::parse(&args.group).map_err(|e| Outcome::usage(format!("group: {e}")))?;
    let field = parse_field(&args.field)?;
    let params = load_params(args.params.as_deref())?;
    let opts = RealizeOptions {
        enumerate: !args.no_enumerate,
        enumeration: EnumerationOptions { budget: budget_of(&args.budget), workers, prefilter: true },
        simplicity: None,
    };
    with_field!(field, f => {
        let report = realize_finite_group(&g, &f, &params, &opts).map_err(construction_error)?;
        let algebra_text = report.algebra.to_json();
        write_out(args.out.as_deref(), &algebra_text)?;
        let mut json = report.to_json();
        json["command"] = json!("realize");
        if let Some(p) = &args.out {
            json["algebra_file"] = json!(p.display().to_string());
        }
        let mut text = format!("realized {} over {}: dim {}\n", g.describe(), f.spec(), report.algebra.dim());
        if let Some(auts) = &report.automorphisms {
            text.push_str(&format!("automorphisms: {} ({})\n", auts.order(), auts.method));
        }
        let mut out = Outcome::from_checks(&report.checks, json, text);
        budget_refusal(&mut out);
        Ok(out)
    })
}

// ---------------------------------------------------------------------------

fn sl_order(n: usize, q: u64) -> u64 {
    (gl_order(n, q) / (q as u128 - 1)) as u64
}

fn parse_monomial(text: &str) -> Result<Vec<usize>, Outcome> {
    text.split(',')
        .map(|t| match t.trim().parse::<usize>() {
            Ok(i) if i >= 1 => Ok(i - 1),
            _ => Err(Outcome::usage(format!("monomial: bad variable index `{t}` (1-based)"))),
        })
        .collect()
}

fn flavor_of(f: FlavorArg) -> Flavor {
    match f {
        FlavorArg::Tensor => Flavor::Tensor,
        FlavorArg::Symmetric => Flavor::Symmetric,
    }
}

fn construct(args: &ConstructArgs) -> Res {
    let field = parse_field(&args.field)?;
    let params = load_params(args.params.as_deref())?;
    if args.kind == Kind::Wrap {
        if let Some(path) = &args.inner {
            let inner = load(path)?;
            let spec = with_algebra!(&inner, a => a.field().spec());
            if spec != field.spec() {
                return Err(Outcome::usage(format!("--field {} differs from the inner algebra's field {spec}", field.spec())));
            }
            return with_algebra!(inner, a => finish_construct(args, wrap_of(a, &params)?));
        }
    }
    with_field!(field, f => {
        let a = build_construction(args, &f, &params)?;
        finish_construct(args, a)
    })
}

fn wrap_of<F: Field>(inner: Algebra<F>, params: &ConstructionParams) -> Result<Algebra<F>, Outcome> {
    let (mut w, _) = wrap_with_params(&inner, params).map_err(construction_error)?;
    w.meta_mut().claims.simple = Some(true);
    w.meta_mut().claims.aut_order = inner.meta().claims.aut_order;
    Ok(w)
}

fn build_construction<F: Field>(args: &ConstructArgs, f: &F, params: &ConstructionParams) -> Result<Algebra<F>, Outcome> {
    let e = construction_error;
    let q = f.order();
    Ok(match args.kind {
        Kind::Rigid => {
            let mut a = rigid_algebra(args.s, f).map_err(e)?;
            a.meta_mut().claims.aut_order = q.map(|_| 1);
            a
        }
        Kind::B => exterior_b(args.n, f).map_err(e)?,
        Kind::A => {
            let flavor = flavor_of(args.flavor);
            let top = autalg::graded::GradedBasis::new(flavor, args.n, args.r).len();
            let s = match &args.monomial {
                Some(m) => monomial_line(f, flavor, args.n, args.r, &parse_monomial(m)?).map_err(e)?,
                None => Subspace::zero(top),
            };
            let vars: Vec<String> = (1..=args.n).map(|i| format!("x{i}")).collect();
            build_a(f, args.n, &s, args.r, flavor, &vars).map_err(usage)?.algebra
        }
        Kind::C => {
            let l = rigid_algebra(args.s, f).map_err(e)?;
            let gamma = match params.sequence(f, "gamma").map_err(e)? {
                Some(g) => g,
                None => units(f, args.n + 1, "γ (|F| ≥ n+3)").map_err(e)?,
            };
            let mut a = algebra_c(&l, args.n, &gamma).map_err(e)?;
            a.meta_mut().claims.aut_order = q.map(|q| sl_order(args.n, q));
            a
        }
        Kind::D => {
            let l = rigid_algebra(args.s, f).map_err(e)?;
            let vdim = args.s + args.n;
            let mono = match &args.monomial {
                Some(m) => parse_monomial(m)?,
                None => vec![args.s; args.r],
            };
            let s = monomial_line(f, Flavor::Tensor, vdim, args.r, &mono).map_err(e)?;
            let mut p = DParams::canonical(f, args.s, args.n, args.r, s).map_err(e)?;
            if let Some(g) = params.sequence(f, "gamma").map_err(e)? {
                p.gamma = g;
            }
            if let Some(d) = params.sequence(f, "delta").map_err(e)? {
                p.delta = d;
            }
            if let Some(phi) = params.matrix(f, "phi").map_err(e)? {
                p.phi = phi;
            }
            let mut a = algebra_d(&l, &p).map_err(e)?;
            // the predicted group is enumerated from SL(n), so only when that is cheap
            if q.is_some_and(|q| (q as f64).powi((args.n * args.n) as i32) <= 1e7) {
                a.meta_mut().claims.aut_order = Some(expect_d_action(f, args.s, &p).predicted.len() as u64);
            }
            a
        }
        Kind::E => {
            let text = args.group.as_deref().ok_or_else(|| Outcome::usage("--kind E needs --group"))?;
            let g = PermGroup::parse(text).map_err(|e| Outcome::usage(format!("group: {e}")))?;
            let lambda = lambda_for(&g, f, params).map_err(e)?;
            let mu = match params.sequence(f, "mu").map_err(e)? {
                Some(m) => m,
                None => units(f, g.order() + 1, "μ (|F| ≥ |G|+3)").map_err(e)?,
            };
            let mut a = algebra_e(&g, &lambda, &mu, f).map_err(e)?;
            a.meta_mut().claims.aut_order = q.map(|_| g.order() as u64);
            a
        }
        Kind::Wrap => {
            let mut inner = rigid_algebra(args.s, f).map_err(e)?;
            inner.meta_mut().claims.aut_order = q.map(|_| 1);
            wrap_of(inner, params)?
        }
    })
}

fn finish_construct<F: Field>(args: &ConstructArgs, a: Algebra<F>) -> Res {
    let text = a.to_json();
    write_out(args.out.as_deref(), &text)?;
    let meta = a.meta();
    let mut json = json!({
        "command": "construct",
        "construction": meta.construction,
        "field": a.field().spec().to_string(),
        "dim": a.dim(),
        "parameters": meta.params,
        "claims": meta.claims,
        "exit_code": OK,
    });
    let mut human = format!("{} over {}: dim {}\n", meta.construction, a.field().spec(), a.dim());
    match &args.out {
        Some(p) => {
            json["algebra_file"] = json!(p.display().to_string());
            human.push_str(&format!("written to {}\n", p.display()));
        }
        None => {
            json["algebra"] = parse_algebra_json(&text);
            human.push_str(&text);
        }
    }
    Ok(Outcome { code: OK, text: human, json, error: None })
}

// ---------------------------------------------------------------------------

fn verify(args: &AlgebraArg, workers: usize) -> Res {
    let any = load(&args.algebra)?;
    let opts = EnumerationOptions { budget: budget_of(&args.budget), workers, prefilter: true };
    with_algebra!(any, a => {
        let mut checks = Vec::new();
        let text = a.to_json();
        let round_trip = Algebra::from_json(a.field(), &text).map(|b| b == a && b.to_json() == text);
        checks.push(match round_trip {
            Ok(true) => Check::new("round_trip", CheckStatus::Pass, "serialize/deserialize is the identity"),
            Ok(false) => Check::new("round_trip", CheckStatus::Fail, "re-read algebra differs"),
            Err(e) => Check::new("round_trip", CheckStatus::Fail, e.to_string()),
        });
        checks.push(trace_check(&a));
        // blocks without a unit line only describe how the algebra nests elsewhere
        if a.unit_block().is_some() {
            checks.push(match verify_block_hypotheses(&a) {
                Ok(v) => Check::new("block_hypotheses", CheckStatus::Pass, v.describe().join(" | ")),
                Err(e) => Check::new("block_hypotheses", CheckStatus::Fail, e.to_string()),
            });
        }
        let claims = a.meta().claims.clone();
        if let Some(claimed) = claims.simple {
            let mut c = simplicity_check(&a, None, workers);
            if !claimed {
                c.status = match c.status {
                    CheckStatus::Pass => CheckStatus::Fail,
                    CheckStatus::Fail => CheckStatus::Pass,
                    s => s,
                };
            }
            checks.push(c);
        }
        if claims.aut_order.is_some() {
            let exp = expectation_from_meta(a.field(), a.meta());
            let (c, _) = automorphism_checks(&a, claims.aut_order, exp.as_ref(), &opts);
            checks.extend(c);
        }
        let json = json!({
            "command": "verify",
            "construction": a.meta().construction,
            "field": a.field().spec().to_string(),
            "dim": a.dim(),
        });
        let human = format!("{} over {}: dim {}\n", a.meta().construction, a.field().spec(), a.dim());
        let mut out = Outcome::from_checks(&checks, json, human);
        budget_refusal(&mut out);
        Ok(out)
    })
}

fn trace_check<F: Field>(a: &Algebra<F>) -> Check {
    let (lr, _) = a.trace_form(TraceKind::LR);
    let (rl, _) = a.trace_form(TraceKind::RL);
    if lr == rl.transpose() {
        Check::new("trace_forms", CheckStatus::Pass, "LR equals the transpose of RL")
    } else {
        let mut c = Check::new("trace_forms", CheckStatus::Fail, "LR differs from the transpose of RL");
        c.witness = Some(json!({ "LR": matrix_json(a.field(), &lr), "RL": matrix_json(a.field(), &rl) }));
        c
    }
}

// ---------------------------------------------------------------------------

fn autgroup(args: &AutgroupArgs, workers: usize) -> Res {
    let any = load(&args.algebra)?;
    with_algebra!(any, a => autgroup_of(&a, args, workers))
}

fn autgroup_of<F: Field>(a: &Algebra<F>, args: &AutgroupArgs, workers: usize) -> Res {
    let f = a.field();
    let mut auts = if args.brute_force {
        let elements = brute_force_automorphisms(a, workers).map_err(usage)?;
        AutomorphismSet {
            elements,
            matched_form: None,
            complete: true,
            method: "brute_force".into(),
            stats: EnumerationStats::default(),
        }
    } else {
        let opts = EnumerationOptions { budget: budget_of(&args.budget), workers, prefilter: !args.no_prefilter };
        match automorphism_group(a, &opts) {
            Ok(s) => s,
            Err(e @ AutGroupError::BudgetExceeded { .. }) => {
                return Err(Outcome::usage(format!("{e}; raise --budget or pass --force")));
            }
            Err(e) => return Err(usage(e)),
        }
    };
    let mut checks = Vec::new();
    if let Some(order) = a.meta().claims.aut_order {
        let found = auts.order() as u64;
        let status = match (found == order, auts.complete) {
            (true, true) => CheckStatus::Pass,
            (true, false) => CheckStatus::Inconclusive,
            (false, _) if auts.complete || found > order => CheckStatus::Fail,
            _ => CheckStatus::Inconclusive,
        };
        let mut c = Check::new("aut_order", status, format!("{found} automorphisms, claimed {order}"));
        if status == CheckStatus::Fail {
            c.witness = auts.elements.iter().find(|m| !m.is_identity(f)).map(|m| matrix_json(f, m));
        }
        checks.push(c);
    }
    if args.expect == ExpectArg::Auto {
        if let Some(exp) = expectation_from_meta(f, a.meta()) {
            checks.push(match match_expected(f, &auts, &exp) {
                Ok(m) => {
                    auts.matched_form = Some(m.form.clone());
                    Check::new("aut_shape", CheckStatus::Pass, format!("matches {}", m.form))
                }
                Err(AutGroupError::Mismatch { form, reason, matrix }) => {
                    let mut c = Check::new("aut_shape", CheckStatus::Fail, format!("{form}: {reason}"));
                    c.witness = matrix.map(Value::String);
                    c
                }
                Err(e) => Check::new("aut_shape", CheckStatus::Fail, e.to_string()),
            });
        }
    }
    if !auts.complete {
        checks.push(Check::new("complete", CheckStatus::Inconclusive, "block hypotheses fail; the set is only a sampled subset"));
    }
    let json = json!({
        "command": "autgroup",
        "construction": a.meta().construction,
        "field": f.spec().to_string(),
        "dim": a.dim(),
        "order": auts.order(),
        "complete": auts.complete,
        "method": auts.method,
        "stats": auts.stats,
        "matched_form": auts.matched_form,
        "automorphisms": auts.elements.iter().map(|m| matrix_json(f, m)).collect::<Vec<_>>(),
    });
    let human = format!(
        "{} automorphisms ({}, {} candidates){}\n",
        auts.order(),
        auts.method,
        auts.stats.candidates,
        auts.matched_form.as_deref().map(|m| format!(", shape {m}")).unwrap_or_default()
    );
    Ok(Outcome::from_checks(&checks, json, human))
}

// ---------------------------------------------------------------------------

fn simplicity(args: &SimplicityArgs, workers: usize) -> Res {
    let any = load(&args.algebra)?;
    let mode = match args.mode {
        ModeArg::Exhaustive => SimplicityMode::Exhaustive,
        ModeArg::Norton => SimplicityMode::Norton { seed: args.seed, rounds: args.rounds.unwrap_or(20) },
        ModeArg::Sampled => SimplicityMode::Sampled { seed: args.seed, rounds: args.rounds.unwrap_or(1000) },
    };
    with_algebra!(any, a => {
        let verdict = a.is_simple_with(mode, workers).map_err(usage)?;
        let mut json = json!({
            "command": "simplicity",
            "construction": a.meta().construction,
            "field": a.field().spec().to_string(),
            "dim": a.dim(),
            "mode": format!("{mode:?}"),
        });
        let check = match verdict {
            SimplicityVerdict::Simple { certificate } => {
                json["simple"] = json!(true);
                Check::new("simple", CheckStatus::Pass, certificate)
            }
            SimplicityVerdict::NotSimple(w) => {
                json["simple"] = json!(false);
                let mut c = Check::new("simple", CheckStatus::Fail, "");
                match w {
                    NotSimpleWitness::ZeroMultiplication => {
                        c.detail = "multiplication is zero".into();
                        c.witness = Some(json!("zero multiplication"));
                    }
                    NotSimpleWitness::ProperIdeal(s) => {
                        let span: Vec<String> = s.basis().iter().map(|v| a.format_vec(v)).collect();
                        c.detail = format!("proper ideal span{{{}}}", span.join(", "));
                        c.witness = Some(json!({ "ideal": span, "ideal_dim": s.dim() }));
                    }
                }
                c
            }
            SimplicityVerdict::Inconclusive { reason } => {
                json["simple"] = Value::Null;
                Check::new("simple", CheckStatus::Inconclusive, reason)
            }
        };
        Ok(Outcome::from_checks(&[check], json, String::new()))
    })
}

// ---------------------------------------------------------------------------

fn normalizer(args: &NormalizerArgs) -> Res {
    let g = PermGroup::parse(&args.group).map_err(|e| Outcome::usage(format!("group: {e}")))?;
    let field = parse_field(&args.field)?;
    with_field!(field, f => {
        let lambda = args
            .lambda
            .split(',')
            .map(|s| f.parse_elem(s.trim()))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| Outcome::usage(format!("lambda: {e}")))?;
        let fv = invariant_f(&g, &lambda, &f).map_err(construction_error)?;
        // f lives in Sym^|G| of the n variables
        let norm = line_normalizer(&f, g.order(), &fv, &symmetric_group(g.degree())).map_err(usage)?;
        let elements: Vec<String> = norm.elements().iter().map(|p| p.to_string()).collect();
        let json = json!({
            "command": "normalizer",
            "group": g.describe(),
            "field": f.spec().to_string(),
            "f": fv.iter().map(|x| f.format_elem(x)).collect::<Vec<_>>(),
            "order": norm.order(),
            "elements": elements,
        });
        let extra = norm.elements().iter().find(|p| !g.contains(p));
        let mut check = match extra {
            None => Check::new("normalizer_is_group", CheckStatus::Pass, format!("line normalizer equals the group (order {})", g.order())),
            Some(p) => {
                let mut c = Check::new("normalizer_is_group", CheckStatus::Fail, format!("{p} fixes the line of f but is not in the group"));
                c.witness = Some(json!(p.to_string()));
                c
            }
        };
        if extra.is_none() && norm.order() != g.order() {
            check = Check::new("normalizer_is_group", CheckStatus::Fail, "line normalizer misses group elements");
            check.witness = Some(json!(g.elements().iter().find(|p| !norm.contains(p)).map(|p| p.to_string())));
        }
        let human = format!("normalizer of order {}: {}\n", norm.order(), elements.join(" "));
        Ok(Outcome::from_checks(&[check], json, human))
    })
}

// ---------------------------------------------------------------------------

fn trace_forms(args: &AlgebraArg) -> Res {
    let any = load(&args.algebra)?;
    with_algebra!(any, a => {
        let f = a.field();
        let mut forms = serde_json::Map::new();
        let mut human = String::new();
        for kind in TraceKind::ALL {
            let (gram, nondegenerate) = a.trace_form(kind);
            human.push_str(&format!("{kind}: {}\n", if nondegenerate { "nondegenerate" } else { "degenerate" }));
            forms.insert(kind.to_string(), json!({ "gram": matrix_json(f, &gram), "nondegenerate": nondegenerate }));
        }
        let check = trace_check(&a);
        let json = json!({
            "command": "trace-forms",
            "field": f.spec().to_string(),
            "dim": a.dim(),
            "forms": forms,
            "lr_equals_rl_transpose": check.status == CheckStatus::Pass,
        });
        Ok(Outcome::from_checks(&[check], json, human))
    })
}

fn export_tensor(args: &AlgebraArg) -> Res {
    let any = load(&args.algebra)?;
    with_algebra!(any, a => {
        let f = a.field();
        let entries: Vec<Value> = a.export_tensor().iter().map(|(i, j, k, c)| json!([i, j, k, f.format_elem(c)])).collect();
        let human = entries.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("\n");
        let json = json!({
            "command": "export-tensor",
            "field": f.spec().to_string(),
            "dim": a.dim(),
            "basis": a.basis_names(),
            "entries": entries,
            "exit_code": OK,
        });
        Ok(Outcome { code: OK, text: human, json, error: None })
    })
}
