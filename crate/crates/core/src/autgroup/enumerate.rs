use std::ops::Range;
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use serde::Serialize;

use super::brute::{brute_force_automorphisms, sample_automorphisms, BRUTE_FORCE_LIMIT};
use super::{generation_plan, linked_indices, verify_block_hypotheses, AutGroupError, GenerationPlan, Result};
use crate::algebra::{Algebra, Role};
use crate::field::Field;
use crate::graded::{Flavor, GradedBasis};
use crate::linalg::{Matrix, Subspace};

pub const DEFAULT_BUDGET: u64 = 500_000_000;

/// Highest degree of products examined when deriving sweep constraints.
const CONSTRAINT_MAX_DEGREE: usize = 6;
const CONSTRAINT_MAX_WORDS: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumerationOptions {
    pub budget: u64,
    pub workers: usize,
    /// Reject generator maps that do not preserve the kernels of the product maps.
    pub prefilter: bool,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        EnumerationOptions { budget: DEFAULT_BUDGET, workers: 1, prefilter: true }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct EnumerationStats {
    /// Candidate tuples before any filtering, the quantity the budget bounds.
    pub candidates: u128,
    /// Block matrices visited by the sweeps, singular ones included.
    pub swept: u64,
    /// Block matrices that survived the determinant and constraint tests.
    pub survivors: u64,
    /// Full matrices handed to the final automorphism check.
    pub checked: u64,
}

/// A set of automorphisms in canonical (entry-lexicographic) order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AutomorphismSet<E> {
    pub elements: Vec<Matrix<E>>,
    pub matched_form: Option<String>,
    /// False when the set is only a sound subset (hypotheses failed).
    pub complete: bool,
    pub method: String,
    pub stats: EnumerationStats,
}

impl<E: Clone + Ord> AutomorphismSet<E> {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, g: &Matrix<E>) -> bool {
        self.elements.binary_search_by(|m| m.data().cmp(g.data())).is_ok()
    }

    /// Closure under products and inverses, checked on all pairs.
    pub fn is_group<F: Field<Elem = E>>(&self, f: &F) -> bool {
        let Some(first) = self.elements.first() else { return false };
        if !self.contains(&Matrix::identity(f, first.rows())) {
            return false;
        }
        self.elements.iter().all(|x| {
            x.inverse(f).map(|i| self.contains(&i)).unwrap_or(false)
                && self.elements.iter().all(|y| self.contains(&x.mul(f, y)))
        })
    }
}

pub(crate) fn canonical_sort<E: Ord + Clone>(v: &mut Vec<Matrix<E>>) {
    v.sort_by(|x, y| x.data().cmp(y.data()));
    v.dedup();
}

/// Called with every fully assembled candidate and the verdict of the final check.
pub type Observer<'a, F> = &'a (dyn Fn(&Algebra<F>, &Matrix<<F as Field>::Elem>, bool) + Sync);

/// `|GL(k, q)|`, saturating.
pub fn gl_order(k: usize, q: u64) -> u128 {
    let qk = (q as u128).saturating_pow(k as u32);
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(qk - (q as u128).pow(i as u32)))
}

/// `d`-th products of a block whose kernel every automorphism must preserve.
#[derive(Debug, Clone)]
struct KernelConstraint<E> {
    basis: GradedBasis,
    kernel: Subspace<E>,
}

impl<E: Clone + Eq> KernelConstraint<E> {
    /// `g` is row-major `k×k` with column `j` the image of the `j`-th block vector.
    fn preserved<F: Field<Elem = E>>(&self, f: &F, g: &[E]) -> bool {
        let k = self.basis.base_dim();
        let monomials = self.basis.monomials();
        self.kernel.basis().iter().all(|v| {
            let mut image = vec![f.zero(); self.basis.len()];
            for (mi, c) in v.iter().enumerate() {
                if f.is_zero(c) {
                    continue;
                }
                let mut partial = vec![c.clone()];
                for &mt in &monomials[mi] {
                    let mut next = Vec::with_capacity(partial.len() * k);
                    for p in &partial {
                        for j in 0..k {
                            next.push(if f.is_zero(p) { f.zero() } else { f.mul(p, &g[j * k + mt]) });
                        }
                    }
                    partial = next;
                }
                for (w, x) in partial.iter().enumerate() {
                    if !f.is_zero(x) {
                        let t = self.basis.word_target(w);
                        image[t] = f.add(&image[t], x);
                    }
                }
            }
            self.kernel.contains(f, &image)
        })
    }
}

/// Kernels of the left-normed product maps on words in the block's basis.
fn product_constraints<F: Field>(a: &Algebra<F>, range: Range<usize>) -> Vec<KernelConstraint<F::Elem>> {
    let f = a.field();
    let k = range.len();
    let n = a.dim();
    let mut out = Vec::new();
    if k == 0 {
        return out;
    }
    let base: Vec<Vec<F::Elem>> = range.clone().map(|i| crate::linalg::unit_vector(f, n, i)).collect();
    let mut prods = base.clone();
    for d in 2..=CONSTRAINT_MAX_DEGREE {
        if prods.len() * k > CONSTRAINT_MAX_WORDS {
            break;
        }
        prods = prods
            .iter()
            .flat_map(|p| base.iter().map(move |b| a.mul_unchecked(p, b)))
            .collect();
        if prods.iter().all(|p| crate::linalg::is_zero_vec(f, p)) {
            break;
        }
        let sym = GradedBasis::new(Flavor::Symmetric, k, d);
        let symmetric = (0..prods.len()).all(|w| {
            let m = &sym.monomials()[sym.word_target(w)];
            prods[w] == prods[word_index(m, k)]
        });
        let basis = if symmetric { sym } else { GradedBasis::new(Flavor::Tensor, k, d) };
        let cols: Vec<Vec<F::Elem>> = basis.monomials().iter().map(|m| prods[word_index(m, k)].clone()).collect();
        let kernel = Subspace::span(f, basis.len(), Matrix::from_cols(cols).kernel(f));
        if !kernel.is_zero() && !kernel.is_full() {
            out.push(KernelConstraint { basis, kernel });
        }
    }
    out
}

fn word_index(word: &[usize], k: usize) -> usize {
    word.iter().fold(0, |acc, &x| acc * k + x)
}

fn small_det<F: Field>(f: &F, k: usize, m: &[F::Elem]) -> bool {
    let mut a = m.to_vec();
    for c in 0..k {
        let Some(p) = (c..k).find(|&r| !f.is_zero(&a[r * k + c])) else { return false };
        if p != c {
            for j in 0..k {
                a.swap(p * k + j, c * k + j);
            }
        }
        let inv = f.inv(&a[c * k + c]).expect("nonzero pivot");
        for r in c + 1..k {
            if f.is_zero(&a[r * k + c]) {
                continue;
            }
            let factor = f.mul(&a[r * k + c], &inv);
            for j in c..k {
                let v = f.sub(&a[r * k + j], &f.mul(&factor, &a[c * k + j]));
                a[r * k + j] = v;
            }
        }
    }
    true
}

/// Invertible `k×k` matrices in lexicographic entry order that pass `constraints`.
///
/// With constraints present only matrices whose first nonzero entry is 1 are
/// tested; the constraints are homogeneous, so survivors are then scaled by
/// every unit.
fn sweep_block<F: Field>(f: &F, k: usize, constraints: &[KernelConstraint<F::Elem>], swept: &AtomicU64) -> Vec<Matrix<F::Elem>> {
    let q = f.order().expect("finite field");
    let elems: Vec<F::Elem> = f.elements().collect();
    let kk = k * k;
    let keep = |data: &[F::Elem]| small_det(f, k, data) && constraints.iter().all(|c| c.preserved(f, data));
    let mut out: Vec<Matrix<F::Elem>> = if constraints.is_empty() {
        let total = q.pow(kk as u32);
        swept.fetch_add(total, Ordering::Relaxed);
        (0..total as usize)
            .into_par_iter()
            .with_min_len(4096)
            .filter_map(|idx| {
                let idx = idx as u64;
                let mut data = vec![f.zero(); kk];
                let mut rest = idx;
                for slot in (0..kk).rev() {
                    data[slot] = elems[(rest % q) as usize].clone();
                    rest /= q;
                }
                keep(&data).then(|| Matrix::from_vec(k, k, data))
            })
            .collect()
    } else {
        let mut normalized = Vec::new();
        for lead in 0..kk {
            let free = (kk - 1 - lead) as u32;
            let total = q.pow(free);
            swept.fetch_add(total, Ordering::Relaxed);
            let part: Vec<Vec<F::Elem>> = (0..total as usize)
                .into_par_iter()
                .with_min_len(4096)
                .filter_map(|idx| {
                    let idx = idx as u64;
                    let mut data = vec![f.zero(); kk];
                    data[lead] = f.one();
                    let mut rest = idx;
                    for slot in (lead + 1..kk).rev() {
                        data[slot] = elems[(rest % q) as usize].clone();
                        rest /= q;
                    }
                    keep(&data).then_some(data)
                })
                .collect();
            normalized.extend(part);
        }
        let units: Vec<&F::Elem> = elems.iter().filter(|x| !f.is_zero(x)).collect();
        normalized
            .iter()
            .flat_map(|d| units.iter().map(move |c| Matrix::from_vec(k, k, d.iter().map(|x| f.mul(x, c)).collect())))
            .collect()
    };
    canonical_sort(&mut out);
    out
}

enum Task<E> {
    Derive {
        range: Range<usize>,
        ys: Vec<usize>,
        pairing: Matrix<E>,
        pairing_inv: Matrix<E>,
        constraints: Vec<KernelConstraint<E>>,
    },
    Generate,
}

fn place<F: Field>(f: &F, n: usize, images: &mut [Vec<F::Elem>], range: &Range<usize>, m: &Matrix<F::Elem>) {
    for j in 0..range.len() {
        let mut col = vec![f.zero(); n];
        for i in 0..range.len() {
            col[range.start + i] = m.get(i, j).clone();
        }
        images[range.start + j] = col;
    }
}

/// Unconditional entry point: verifies the hypotheses first.
pub fn enumerate_automorphisms<F: Field>(
    a: &Algebra<F>,
    plan: &GenerationPlan<F::Elem>,
    opts: &EnumerationOptions,
) -> Result<AutomorphismSet<F::Elem>> {
    enumerate_automorphisms_observed(a, plan, opts, None)
}

pub fn enumerate_automorphisms_observed<F: Field>(
    a: &Algebra<F>,
    plan: &GenerationPlan<F::Elem>,
    opts: &EnumerationOptions,
    observer: Option<Observer<'_, F>>,
) -> Result<AutomorphismSet<F::Elem>> {
    if !a.field().is_finite() {
        return Err(AutGroupError::Unsupported("automorphism enumeration needs a finite field".into()));
    }
    verify_block_hypotheses(a).map_err(|e| AutGroupError::HypothesesNotVerified(e.to_string()))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers.max(1))
        .build()
        .map_err(|e| AutGroupError::Unsupported(format!("worker pool: {e}")))?;
    let stats = Counters::default();
    let elements = pool.install(|| level(a, plan, opts, observer, &stats))?;
    Ok(AutomorphismSet {
        elements,
        matched_form: None,
        complete: true,
        method: "block sweep".into(),
        stats: stats.snapshot(),
    })
}

#[derive(Default)]
struct Counters {
    candidates: std::sync::Mutex<u128>,
    swept: AtomicU64,
    survivors: AtomicU64,
    checked: AtomicU64,
}

impl Counters {
    fn snapshot(&self) -> EnumerationStats {
        EnumerationStats {
            candidates: *self.candidates.lock().expect("counter lock"),
            swept: self.swept.load(Ordering::Relaxed),
            survivors: self.survivors.load(Ordering::Relaxed),
            checked: self.checked.load(Ordering::Relaxed),
        }
    }
}

fn level<F: Field>(
    a: &Algebra<F>,
    plan: &GenerationPlan<F::Elem>,
    opts: &EnumerationOptions,
    observer: Option<Observer<'_, F>>,
    stats: &Counters,
) -> Result<Vec<Matrix<F::Elem>>> {
    let f = a.field();
    let n = a.dim();
    let q = f.order().expect("finite field");
    let unit = a.unit_block().expect("verified").range.start;

    let mut nested: Vec<(Range<usize>, Vec<Matrix<F::Elem>>)> = Vec::new();
    let mut free: Vec<(Range<usize>, Vec<KernelConstraint<F::Elem>>)> = Vec::new();
    let mut derived = Vec::new();
    let mut assigned = vec![false; n];
    assigned[unit] = true;
    for b in a.top_blocks() {
        match b.role {
            Role::UnitLine | Role::Generated => {}
            _ if b.pairing.is_some() => derived.push(b),
            Role::Plain if !a.children(&b.name).is_empty() => {
                let sub = a.nested(&b.name)?;
                let sub_plan = generation_plan(&sub)?;
                nested.push((b.range.clone(), level(&sub, &sub_plan, opts, None, stats)?));
                b.range.clone().for_each(|i| assigned[i] = true);
            }
            _ => {
                let c = if opts.prefilter { product_constraints(a, b.range.clone()) } else { Vec::new() };
                free.push((b.range.clone(), c));
                b.range.clone().for_each(|i| assigned[i] = true);
            }
        }
    }

    // order the pairing derivations and the generation step by their inputs
    let mut tasks = Vec::new();
    let mut pending: Vec<_> = derived.into_iter().map(Some).collect();
    let mut generated = plan.targets().next().is_none();
    loop {
        let mut progress = false;
        for slot in pending.iter_mut() {
            let Some(b) = slot else { continue };
            let ys = linked_indices(a, &b.linked_to).expect("verified links");
            if ys.iter().all(|&y| assigned[y]) {
                let pairing = b.pairing.clone().expect("derived blocks carry a pairing");
                let pairing_inv = pairing.inverse(f).expect("pairings are invertible");
                let constraints = if opts.prefilter { product_constraints(a, b.range.clone()) } else { Vec::new() };
                b.range.clone().for_each(|i| assigned[i] = true);
                tasks.push(Task::Derive { range: b.range.clone(), ys, pairing, pairing_inv, constraints });
                *slot = None;
                progress = true;
            }
        }
        if !generated && plan.seeds().iter().all(|&s| assigned[s]) {
            plan.targets().for_each(|t| assigned[t] = true);
            tasks.push(Task::Generate);
            generated = true;
            progress = true;
        }
        if !progress {
            break;
        }
    }
    if pending.iter().any(Option::is_some) || !generated || assigned.iter().any(|x| !x) {
        return Err(AutGroupError::HypothesesNotVerified("block links leave some coordinates undetermined".into()));
    }

    let candidates = nested
        .iter()
        .map(|(_, l)| l.len() as u128)
        .chain(free.iter().map(|(r, _)| gl_order(r.len(), q)))
        .fold(1u128, |acc, x| acc.saturating_mul(x));
    {
        let mut c = stats.candidates.lock().expect("counter lock");
        *c = c.saturating_add(candidates);
    }
    if candidates > opts.budget as u128 {
        return Err(AutGroupError::BudgetExceeded { candidates, budget: opts.budget });
    }

    let survivors: Vec<(Range<usize>, Vec<Matrix<F::Elem>>)> = free
        .iter()
        .map(|(r, c)| {
            let s = sweep_block(f, r.len(), c, &stats.swept);
            stats.survivors.fetch_add(s.len() as u64, Ordering::Relaxed);
            (r.clone(), s)
        })
        .collect();
    let lists: Vec<(&Range<usize>, &Vec<Matrix<F::Elem>>)> =
        nested.iter().chain(survivors.iter()).map(|(r, l)| (r, l)).collect();
    let total: u64 = lists.iter().map(|(_, l)| l.len() as u64).product();

    let assemble = |t: u64| -> Option<Vec<Vec<F::Elem>>> {
        let mut images = vec![Vec::new(); n];
        images[unit] = crate::linalg::unit_vector(f, n, unit);
        let mut rest = t;
        for (r, l) in lists.iter().rev() {
            let len = l.len() as u64;
            place(f, n, &mut images, r, &l[(rest % len) as usize]);
            rest /= len;
        }
        for task in &tasks {
            match task {
                Task::Generate => plan.apply(a, &mut images),
                Task::Derive { range, ys, pairing, pairing_inv, constraints } => {
                    // the linked coordinates must be stable for the adjoint to make sense
                    let k = ys.len();
                    let mut gy = Matrix::zeros(f, k, k);
                    for (bcol, &y) in ys.iter().enumerate() {
                        let img = &images[y];
                        for (i, x) in img.iter().enumerate() {
                            if !f.is_zero(x) && !ys.contains(&i) {
                                return None;
                            }
                        }
                        for (arow, &ya) in ys.iter().enumerate() {
                            gy.set(arow, bcol, img[ya].clone());
                        }
                    }
                    let gy_inv = gy.inverse(f).ok()?;
                    let gx = pairing.mul(f, &gy_inv).mul(f, pairing_inv).transpose();
                    if !constraints.iter().all(|c| c.preserved(f, gx.data())) {
                        return None;
                    }
                    place(f, n, &mut images, range, &gx);
                }
            }
        }
        Some(images)
    };

    let mut found: Vec<Matrix<F::Elem>> = (0..total as usize)
        .into_par_iter()
        .with_min_len(64)
        .filter_map(|t| {
            let t = t as u64;
            let images = assemble(t)?;
            stats.checked.fetch_add(1, Ordering::Relaxed);
            let ok = a.first_violation(&images).is_none();
            let m = Matrix::from_cols(images);
            let ok = ok && !f.is_zero(&m.det(f));
            if let Some(obs) = observer {
                obs(a, &m, ok);
            }
            ok.then_some(m)
        })
        .collect();
    canonical_sort(&mut found);
    Ok(found)
}

/// Verified enumeration when the hypotheses hold; otherwise brute force when
/// small enough, else a sampled sound subset marked incomplete.
pub fn automorphism_group<F: Field>(a: &Algebra<F>, opts: &EnumerationOptions) -> Result<AutomorphismSet<F::Elem>> {
    let Some(q) = a.field().order() else {
        return Err(AutGroupError::Unsupported("automorphism enumeration needs a finite field".into()));
    };
    match verify_block_hypotheses(a) {
        Ok(_) => {
            let plan = generation_plan(a)?;
            enumerate_automorphisms(a, &plan, opts)
        }
        Err(AutGroupError::Algebra(e)) => Err(AutGroupError::Algebra(e)),
        Err(_) => {
            let space = (q as u128).checked_pow((a.dim() * a.dim()) as u32);
            if space.is_some_and(|s| s <= BRUTE_FORCE_LIMIT as u128) {
                let elements = brute_force_automorphisms(a, opts.workers)?;
                let candidates = space.unwrap_or(u128::MAX);
                Ok(AutomorphismSet {
                    elements,
                    matched_form: None,
                    complete: true,
                    method: "brute force".into(),
                    stats: EnumerationStats { candidates, swept: candidates as u64, survivors: 0, checked: 0 },
                })
            } else {
                Ok(sample_automorphisms(a, 1, 10_000))
            }
        }
    }
}
