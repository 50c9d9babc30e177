use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::enumerate::{canonical_sort, AutomorphismSet, EnumerationStats};
use super::{AutGroupError, Result};
use crate::algebra::Algebra;
use crate::field::Field;
use crate::linalg::Matrix;

/// Largest matrix space the unrestricted oracle will walk.
pub const BRUTE_FORCE_LIMIT: u64 = 50_000_000;

/// Every invertible matrix, in lexicographic entry order, checked against the
/// structure constants. No block hypotheses are used.
pub fn brute_force_automorphisms<F: Field>(a: &Algebra<F>, workers: usize) -> Result<Vec<Matrix<F::Elem>>> {
    let f = a.field();
    let Some(q) = f.order() else {
        return Err(AutGroupError::Unsupported("brute force needs a finite field".into()));
    };
    let n = a.dim();
    let total = (q as u128).checked_pow((n * n) as u32).unwrap_or(u128::MAX);
    if total > BRUTE_FORCE_LIMIT as u128 {
        return Err(AutGroupError::BudgetExceeded { candidates: total, budget: BRUTE_FORCE_LIMIT });
    }
    let elems: Vec<F::Elem> = f.elements().collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| AutGroupError::Unsupported(format!("worker pool: {e}")))?;
    let mut found: Vec<Matrix<F::Elem>> = pool.install(|| {
        (0..total as usize)
            .into_par_iter()
            .with_min_len(4096)
            .filter_map(|idx| {
                let idx = idx as u64;
                let mut data = vec![f.zero(); n * n];
                let mut rest = idx;
                for slot in (0..n * n).rev() {
                    data[slot] = elems[(rest % q) as usize].clone();
                    rest /= q;
                }
                let m = Matrix::from_vec(n, n, data);
                a.is_automorphism(&m).holds().then_some(m)
            })
            .collect()
    });
    canonical_sort(&mut found);
    Ok(found)
}

/// Random invertible matrices that happen to be automorphisms, plus the
/// identity. Sound but not complete.
pub fn sample_automorphisms<F: Field>(a: &Algebra<F>, seed: u64, rounds: u64) -> AutomorphismSet<F::Elem> {
    let f = a.field();
    let n = a.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut found = vec![Matrix::identity(f, n)];
    for _ in 0..rounds {
        let data = (0..n * n).map(|_| f.random_elem(&mut rng)).collect();
        let m = Matrix::from_vec(n, n, data);
        if a.is_automorphism(&m).holds() {
            found.push(m);
        }
    }
    canonical_sort(&mut found);
    AutomorphismSet {
        elements: found,
        matched_form: None,
        complete: false,
        method: "sampling".into(),
        stats: EnumerationStats { candidates: rounds as u128, swept: rounds, survivors: 0, checked: rounds },
    }
}
