//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::cell::RefCell;
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use autalg::algebra::{Algebra, AutCheck, SimplicityMode, SimplicityVerdict, TraceKind};
use autalg::autgroup::{
    automorphism_group, brute_force_automorphisms, enumerate_automorphisms, enumerate_automorphisms_observed,
    expect_c_action, expect_d_action, expect_wrapped, generation_plan, match_expected, EnumerationOptions, Expectation,
};
use autalg::constructions::{
    algebra_c, algebra_d, algebra_e, exterior_b, extend_b, invariant_f, monomial_line, realize_finite_group,
    rigid_algebra, unitized_etale, units, wrap_simple, wrap_with_params, zero_algebra, ConstructionParams, DParams,
    RealizeOptions, WrapVariant,
};
use autalg::field::{Field, FiniteField};
use autalg::graded::Flavor;
use autalg::linalg::Matrix;
use autalg::perm::{line_normalizer, symmetric_group, PermGroup};

type Alg = Algebra<FiniteField>;
type Outcome = Result<String, String>;

fn fp(p: u64) -> FiniteField {
    FiniteField::prime(p).unwrap()
}

fn f49() -> FiniteField {
    FiniteField::new(7, 2, Some(&[1, 0, 1])).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn all_matrices(f: &FiniteField, k: usize) -> impl Iterator<Item = Matrix<u32>> + '_ {
    let q = f.order().unwrap();
    (0..q.pow((k * k) as u32)).map(move |idx| {
        let mut data = vec![0u32; k * k];
        let mut rest = idx;
        for slot in (0..k * k).rev() {
            data[slot] = f.nth_element(rest % q);
            rest /= q;
        }
        Matrix::from_vec(k, k, data)
    })
}

/// Tensor-stabilization vs. the product check on every candidate the enumeration assembles.
#[derive(Default)]
struct DeviceTally {
    examined: AtomicUsize,
    discrepancies: AtomicUsize,
}

impl DeviceTally {
    fn record(&self, a: &Alg, g: &Matrix<u32>) {
        self.examined.fetch_add(1, Ordering::Relaxed);
        if a.tensor_stabilizes(g) != a.is_automorphism(g).holds() {
            self.discrepancies.fetch_add(1, Ordering::Relaxed);
        }
    }
}

struct Run {
    built: RefCell<Vec<Alg>>,
    tally: DeviceTally,
    workers: usize,
}

impl Run {
    fn keep(&self, a: &Alg) {
        self.built.borrow_mut().push(a.clone());
    }

    fn observed(&self, a: &Alg) -> Result<Vec<Matrix<u32>>, String> {
        let plan = generation_plan(a).map_err(|e| e.to_string())?;
        let opts = EnumerationOptions { workers: self.workers, ..Default::default() };
        let tally = &self.tally;
        let obs = move |alg: &Alg, g: &Matrix<u32>, ok: bool| {
            tally.record(alg, g);
            if ok != alg.is_automorphism(g).holds() {
                tally.discrepancies.fetch_add(1, Ordering::Relaxed);
            }
        };
        let set = enumerate_automorphisms_observed(a, &plan, &opts, Some(&obs)).map_err(|e| e.to_string())?;
        Ok(set.elements)
    }
}

fn rigid_brute_force(run: &Run) -> Outcome {
    let r2 = rigid_algebra(2, &fp(5)).unwrap();
    let r3 = rigid_algebra(3, &fp(5)).unwrap();
    run.keep(&r2);
    run.keep(&r3);
    let a2 = brute_force_automorphisms(&r2, run.workers).map_err(|e| e.to_string())?;
    ensure(a2.len() == 1 && a2[0].is_identity(&fp(5)), || format!("rigid(2,F5): {} automorphisms", a2.len()))?;
    let a3 = brute_force_automorphisms(&r3, run.workers).map_err(|e| e.to_string())?;
    ensure(a3.len() == 1, || format!("rigid(3,F5): {} automorphisms", a3.len()))?;
    Ok("rigid(2,F5) over 5^4 and rigid(3,F5) over 5^9 matrices: 1 automorphism each".into())
}

fn exterior_extensions(run: &Run) -> Outcome {
    let f = fp(5);
    let b = exterior_b(2, &f).unwrap();
    run.keep(&b);
    let top = b.basis_names().iter().position(|n| n == "u1∧u2").ok_or("no top wedge basis vector")?;
    let (mut invertible, mut extend, mut sl) = (0, 0, 0);
    for g in all_matrices(&f, 2) {
        let det = g.det(&f);
        if f.is_zero(&det) {
            continue;
        }
        invertible += 1;
        sl += f.is_one(&det) as usize;
        let ext = extend_b(&f, &g);
        run.tally.record(&b, &ext);
        match b.is_automorphism(&ext) {
            AutCheck::Holds => extend += 1,
            AutCheck::Violation { i, j } if (i, j) == (top, top) => {}
            other => return Err(format!("unexpected verdict {other:?} for {g:?}")),
        }
    }
    ensure((extend, invertible, sl) == (120, 480, 120), || format!("{extend} of {invertible} extend; |SL| = {sl}"))?;
    Ok(format!("{extend} of {invertible} extend (= |SL(2,5)|); every rejection violates at (b0, b0)"))
}

fn c_enumeration(run: &Run) -> Outcome {
    let f = fp(5);
    let l = rigid_algebra(2, &f).unwrap();
    let c = algebra_c(&l, 2, &units(&f, 3, "γ").unwrap()).unwrap();
    run.keep(&c);
    let found = run.observed(&c)?;
    let set = autalg::autgroup::AutomorphismSet {
        elements: found,
        matched_form: None,
        complete: true,
        method: "block sweep".into(),
        stats: Default::default(),
    };
    ensure(set.order() == 120, || format!("{} automorphisms", set.order()))?;
    match_expected(&f, &set, &expect_c_action(&f, 2, 2)).map_err(|e| e.to_string())?;
    Ok("120 automorphisms, element-by-element the extensions of SL(2,5)".into())
}

fn d_enumeration(run: &Run) -> Outcome {
    let f = fp(7);
    let l = rigid_algebra(2, &f).unwrap();
    // u1 is the third variable of V = L ⊕ U
    let s = monomial_line(&f, Flavor::Tensor, 4, 2, &[2, 2]).unwrap();
    let p = DParams::canonical(&f, 2, 2, 2, s).unwrap();
    let d = algebra_d(&l, &p).unwrap();
    run.keep(&d);
    // g(u1) is column 0, so g·S = S exactly when the lower-left entry vanishes
    let stabilizer = all_matrices(&f, 2).filter(|g| f.is_one(&g.det(&f)) && f.is_zero(g.get(1, 0))).count();
    let found = run.observed(&d)?;
    ensure(found.len() == stabilizer && stabilizer == 42, || format!("{} automorphisms, stabilizer {stabilizer}", found.len()))?;
    let set = autalg::autgroup::AutomorphismSet {
        elements: found,
        matched_form: None,
        complete: true,
        method: "block sweep".into(),
        stats: Default::default(),
    };
    match_expected(&f, &set, &expect_d_action(&f, 2, &p)).map_err(|e| e.to_string())?;
    Ok(format!("dim {}: {} automorphisms = |Stab_SL(2,7)(S)|, matching the predicted action", d.dim(), set.order()))
}

fn wrapper_simplicity(run: &Run) -> Outcome {
    let f5 = fp(5);
    let w = wrap_with_params(&rigid_algebra(2, &f5).unwrap(), &ConstructionParams::default()).unwrap().0;
    run.keep(&w);
    let v = w.is_simple_with(SimplicityMode::Exhaustive, run.workers).map_err(|e| e.to_string())?;
    ensure(v.is_simple(), || format!("wrap(rigid(2),F5): {v:?}"))?;
    let pts5 = autalg::algebra::projective_point_count(5, w.dim()).unwrap();

    let f3 = fp(3);
    let z = wrap_simple(&rigid_algebra(2, &f3).unwrap(), &2, &0, &Matrix::identity(&f3, 2), WrapVariant::ZetaZero).unwrap();
    run.keep(&z);
    let v = z.is_simple_with(SimplicityMode::Exhaustive, run.workers).map_err(|e| e.to_string())?;
    ensure(v.is_simple(), || format!("ζ = 0 over F3: {v:?}"))?;
    let pts3 = autalg::algebra::projective_point_count(3, z.dim()).unwrap();
    ensure((pts5, pts3) == (781, 121), || format!("point counts {pts5}, {pts3}"))?;

    let c2 = PermGroup::parse("n=2; gens=(1 2)").unwrap();
    let opts = RealizeOptions { enumerate: false, ..Default::default() };
    let r = realize_finite_group(&c2, &fp(7), &ConstructionParams::default(), &opts).map_err(|e| e.to_string())?;
    ensure(r.algebra.dim() == 15, || format!("dim {}", r.algebra.dim()))?;
    let norton = r.algebra.is_simple(SimplicityMode::Norton { seed: 1, rounds: 20 }).map_err(|e| e.to_string())?;
    let SimplicityVerdict::Simple { certificate } = norton else {
        return Err(format!("Norton: {norton:?}"));
    };
    let sampled = r.algebra.is_simple(SimplicityMode::Sampled { seed: 1, rounds: 1000 }).map_err(|e| e.to_string())?;
    ensure(!sampled.is_not_simple(), || format!("sampling found an ideal: {sampled:?}"))?;
    Ok(format!("exhaustive over {pts5} and {pts3} points; realize(C2,F7): {certificate}; 1000 spins find no ideal"))
}

fn wrapper_automorphisms(run: &Run) -> Outcome {
    let f = fp(5);
    let l = rigid_algebra(2, &f).unwrap();
    let (w, delta) = wrap_with_params(&l, &ConstructionParams::default()).unwrap();
    let auts = automorphism_group(&w, &EnumerationOptions { workers: run.workers, ..Default::default() }).map_err(|e| e.to_string())?;
    ensure(auts.order() == 1, || format!("{} automorphisms", auts.order()))?;
    let inner = Expectation::itself("identity", vec![Matrix::identity(&f, 2)]);
    let m = match_expected(&f, &auts, &expect_wrapped(&f, &inner, &delta)).map_err(|e| e.to_string())?;
    let range = w.block("R").ok_or("no R block")?.range.clone();
    let mut restricted: Vec<Matrix<u32>> = auts.elements.iter().map(|g| g.submatrix(range.clone(), range.clone())).collect();
    restricted.sort_by(|a, b| a.data().cmp(b.data()));
    let inner_auts = brute_force_automorphisms(&l, run.workers).map_err(|e| e.to_string())?;
    ensure(restricted == inner_auts, || "restriction to R is not Aut(rigid)".into())?;
    Ok(format!("order 1, shape {}; restriction to R is a bijection onto Aut(rigid)", m.form))
}

fn normalizers(_: &Run) -> Outcome {
    let c3 = PermGroup::parse("n=3; gens=(1 2 3)").unwrap();
    let f11 = fp(11);
    let fv = invariant_f(&c3, &[1, 2, 5], &f11).map_err(|e| e.to_string())?;
    let n3 = line_normalizer(&f11, 3, &fv, &symmetric_group(3)).map_err(|e| e.to_string())?;
    ensure(n3.elements() == c3.elements(), || format!("C3: got {}", n3.describe()))?;
    let s2 = symmetric_group(2);
    let f7 = fp(7);
    let fv = invariant_f(&s2, &[1, 2], &f7).map_err(|e| e.to_string())?;
    let n2 = line_normalizer(&f7, 2, &fv, &s2).map_err(|e| e.to_string())?;
    ensure(n2.order() == 2, || format!("S2: order {}", n2.order()))?;
    Ok("C3 over F11 → exactly C3; S2 over F7 → both elements".into())
}

fn realizations(run: &Run) -> Outcome {
    let opts = RealizeOptions { enumeration: EnumerationOptions { workers: run.workers, ..Default::default() }, ..Default::default() };
    let c2 = PermGroup::parse("n=2; gens=(1 2)").unwrap();
    let c3 = PermGroup::parse("n=3; gens=(1 2 3)").unwrap();
    let mut lines = Vec::new();
    let mut check = |name: &str, r: autalg::constructions::ConstructionReport<FiniteField>, dim: usize, order: usize| {
        let auts = r.automorphisms.as_ref().ok_or(format!("{name}: no enumeration"))?;
        ensure(r.passed(), || format!("{name}: {:?}", r.checks))?;
        ensure(r.algebra.dim() == dim && auts.order() == order && auts.complete, || {
            format!("{name}: dim {}, {} automorphisms", r.algebra.dim(), auts.order())
        })?;
        ensure(auts.matched_form.as_deref() == Some("wrap(permutation)"), || format!("{name}: shape {:?}", auts.matched_form))?;
        run.keep(&r.algebra);
        lines.push(format!("{name}: dim {dim}, {order} automorphisms"));
        Ok::<_, String>(())
    };
    let p = ConstructionParams::default();
    check("C2/F7", realize_finite_group(&c2, &fp(7), &p, &opts).map_err(|e| e.to_string())?, 15, 2)?;
    check("C2/F49", realize_finite_group(&c2, &f49(), &p, &opts).map_err(|e| e.to_string())?, 15, 2)?;
    check("C3/F7", realize_finite_group(&c3, &fp(7), &p, &opts).map_err(|e| e.to_string())?, 45, 3)?;
    Ok(lines.join("; "))
}

fn tensor_device(run: &Run) -> Outcome {
    let examined = run.tally.examined.load(Ordering::Relaxed);
    let bad = run.tally.discrepancies.load(Ordering::Relaxed);
    ensure(examined > 0 && bad == 0, || format!("{bad} discrepancies in {examined} candidates"))?;
    Ok(format!("{examined} candidates, 0 discrepancies"))
}

fn trace_forms(run: &Run) -> Outcome {
    let f = fp(5);
    let e = algebra_e(&PermGroup::parse("n=2; gens=(1 2)").unwrap(), &[1, 2], &[2, 3, 4], &fp(7)).unwrap();
    run.keep(&e);
    let built = run.built.borrow();
    for a in built.iter() {
        let (lr, _) = a.trace_form(TraceKind::LR);
        let (rl, _) = a.trace_form(TraceKind::RL);
        ensure(lr == rl.transpose(), || format!("{}: LR ≠ RLᵀ", a.meta().construction))?;
        for kind in [TraceKind::LL, TraceKind::RR] {
            let (g, _) = a.trace_form(kind);
            ensure(g == g.transpose(), || format!("{}: {kind} not symmetric", a.meta().construction))?;
        }
    }
    let z = zero_algebra(3, &f).unwrap();
    for kind in TraceKind::ALL {
        let (g, nondeg) = z.trace_form(kind);
        ensure(g == Matrix::zeros(&f, 3, 3) && !nondeg, || format!("zero algebra: {kind} nonzero"))?;
    }
    Ok(format!("{} algebras: LR = RLᵀ; zero algebra gives four zero forms", built.len()))
}

fn oracle_equivalence(run: &Run) -> Outcome {
    let cases: Vec<(&str, Alg)> = vec![
        ("rigid(2)/F5", rigid_algebra(2, &fp(5)).unwrap()),
        ("rigid(2)/F3", rigid_algebra(2, &fp(3)).unwrap()),
        ("unitized E2/F3", unitized_etale(2, &2, &fp(3)).unwrap()),
        ("unitized E2/F5", unitized_etale(2, &2, &fp(5)).unwrap()),
    ];
    let mut lines = Vec::new();
    for (name, a) in &cases {
        run.keep(a);
        let plan = generation_plan(a).map_err(|e| format!("{name}: {e}"))?;
        let opts = EnumerationOptions { workers: run.workers, ..Default::default() };
        let sweep = enumerate_automorphisms(a, &plan, &opts).map_err(|e| format!("{name}: {e}"))?;
        let brute = brute_force_automorphisms(a, run.workers).map_err(|e| format!("{name}: {e}"))?;
        ensure(sweep.elements == brute, || format!("{name}: sweep {} vs brute force {}", sweep.order(), brute.len()))?;
        lines.push(format!("{name} {}", brute.len()));
    }
    Ok(lines.join(", "))
}

fn determinism(run: &Run) -> Outcome {
    let c2 = PermGroup::parse("n=2; gens=(1 2)").unwrap();
    let report = |workers| {
        let opts = RealizeOptions { enumeration: EnumerationOptions { workers, ..Default::default() }, ..Default::default() };
        let r = realize_finite_group(&c2, &fp(7), &ConstructionParams::default(), &opts).unwrap();
        (r.algebra.to_json(), r.to_json().to_string())
    };
    let (a1, j1) = report(1);
    let (a2, j2) = report(run.workers.max(2));
    ensure(a1 == a2 && j1 == j2, || "realize output depends on the run".into())?;
    let built = run.built.borrow();
    for a in built.iter() {
        let text = a.to_json();
        let back = Algebra::from_json(a.field(), &text).map_err(|e| e.to_string())?;
        ensure(&back == a && back.to_json() == text, || format!("{} does not round-trip", a.meta().construction))?;
    }
    Ok(format!("byte-identical reports across worker counts; {} algebras round-trip", built.len()))
}

fn main() -> ExitCode {
    let run = Run { built: RefCell::new(Vec::new()), tally: DeviceTally::default(), workers: 4 };
    let criteria: [(&str, fn(&Run) -> Outcome); 12] = [
        ("rigid algebra has only the identity", rigid_brute_force),
        ("exterior algebra extensions are SL(2,5)", exterior_extensions),
        ("Aut(C) over F5 is SL(2,5)", c_enumeration),
        ("Aut(D) over F7 is the stabilizer of S", d_enumeration),
        ("wrapped algebras are simple", wrapper_simplicity),
        ("wrapping preserves the automorphism group", wrapper_automorphisms),
        ("line normalizers recover the group", normalizers),
        ("realized groups over F7, F49", realizations),
        ("tensor stabilization equals the product check", tensor_device),
        ("trace forms", trace_forms),
        ("block sweep agrees with brute force", oracle_equivalence),
        ("determinism and round trip", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check(&run);
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {:>2} {name} ({secs:.2}s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({secs:.2}s): {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
