//! Simplicity: exhaustive projective spinning, the Norton irreducibility
//! test, and random sampling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{Algebra, AlgebraError};
use crate::field::Field;
use crate::linalg::{self, spin, Matrix, Subspace};
use crate::poly;

/// Projective points allowed in exhaustive mode.
pub const EXHAUSTIVE_LIMIT: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimplicityMode {
    Exhaustive,
    Norton { seed: u64, rounds: u32 },
    Sampled { seed: u64, rounds: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NotSimpleWitness<E> {
    ZeroMultiplication,
    ProperIdeal(Subspace<E>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SimplicityVerdict<E> {
    Simple { certificate: String },
    NotSimple(NotSimpleWitness<E>),
    Inconclusive { reason: String },
}

impl<E> SimplicityVerdict<E> {
    pub fn is_simple(&self) -> bool {
        matches!(self, SimplicityVerdict::Simple { .. })
    }

    pub fn is_not_simple(&self) -> bool {
        matches!(self, SimplicityVerdict::NotSimple(_))
    }
}

/// Number of points of `P^{d-1}(F_q)`.
pub fn projective_point_count(q: u64, d: usize) -> Option<u64> {
    let mut total: u64 = 0;
    let mut pow: u64 = 1;
    for _ in 0..d {
        total = total.checked_add(pow)?;
        pow = pow.checked_mul(q)?;
    }
    Some(total)
}

/// The `idx`-th normalized representative: points are ordered by the
/// position of the leading 1 (leftmost first), then by the trailing
/// coordinates in lexicographic order.
pub fn projective_point<F: Field>(f: &F, d: usize, mut idx: u64) -> Vec<F::Elem> {
    let q = f.order().expect("finite field");
    let mut v = vec![f.zero(); d];
    for p in 0..d {
        let tail = d - 1 - p;
        let count = q.pow(tail as u32);
        if idx < count {
            v[p] = f.one();
            for t in (p + 1..d).rev() {
                v[t] = f.nth_element(idx % q);
                idx /= q;
            }
            return v;
        }
        idx -= count;
    }
    panic!("projective point index out of range");
}

impl<F: Field> Algebra<F> {
    pub fn is_simple(&self, mode: SimplicityMode) -> Result<SimplicityVerdict<F::Elem>, AlgebraError> {
        self.is_simple_with(mode, 1)
    }

    /// As [`Algebra::is_simple`], spreading exhaustive search over `workers` threads.
    /// The verdict does not depend on the worker count.
    pub fn is_simple_with(&self, mode: SimplicityMode, workers: usize) -> Result<SimplicityVerdict<F::Elem>, AlgebraError> {
        if self.has_zero_multiplication() {
            return Ok(SimplicityVerdict::NotSimple(NotSimpleWitness::ZeroMultiplication));
        }
        match mode {
            SimplicityMode::Exhaustive => self.exhaustive(workers),
            SimplicityMode::Norton { seed, rounds } => self.norton(seed, rounds),
            SimplicityMode::Sampled { seed, rounds } => Ok(self.sampled(seed, rounds)),
        }
    }

    fn exhaustive(&self, workers: usize) -> Result<SimplicityVerdict<F::Elem>, AlgebraError> {
        let f = self.field();
        let d = self.dim();
        let q = f
            .order()
            .ok_or_else(|| AlgebraError::Unsupported("exhaustive simplicity needs a finite field".into()))?;
        let points = match projective_point_count(q, d) {
            Some(n) if n <= EXHAUSTIVE_LIMIT => n,
            Some(n) => return Err(AlgebraError::TooLargeForExhaustive { points: n.to_string(), limit: EXHAUSTIVE_LIMIT }),
            None => return Err(AlgebraError::TooLargeForExhaustive { points: format!("> {}", u64::MAX), limit: EXHAUSTIVE_LIMIT }),
        };
        let probe = |idx: u64| {
            let v = projective_point(f, d, idx);
            let s = self.spin_ideal(&[v]);
            (!s.is_full()).then_some(s)
        };
        let found = if workers <= 1 {
            (0..points).find_map(probe)
        } else {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build().expect("thread pool");
            pool.install(|| (0..points).into_par_iter().find_map_first(probe))
        };
        Ok(match found {
            Some(s) => SimplicityVerdict::NotSimple(NotSimpleWitness::ProperIdeal(s)),
            None => SimplicityVerdict::Simple { certificate: format!("all {points} projective points spin to the full space") },
        })
    }

    fn sampled(&self, seed: u64, rounds: u32) -> SimplicityVerdict<F::Elem> {
        let f = self.field();
        let d = self.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut seeds: Vec<Vec<F::Elem>> = (0..d).map(|i| linalg::unit_vector(f, d, i)).collect();
        for _ in 0..rounds {
            let v: Vec<F::Elem> = (0..d).map(|_| f.random_elem(&mut rng)).collect();
            if !linalg::is_zero_vec(f, &v) {
                seeds.push(v);
            }
        }
        for v in seeds {
            let s = self.spin_ideal(&[v]);
            if !s.is_full() {
                return SimplicityVerdict::NotSimple(NotSimpleWitness::ProperIdeal(s));
            }
        }
        SimplicityVerdict::Inconclusive {
            reason: format!("no proper ideal among {} basis and {rounds} random spins", d),
        }
    }

    fn norton(&self, seed: u64, rounds: u32) -> Result<SimplicityVerdict<F::Elem>, AlgebraError> {
        let f = self.field();
        if f.order().is_none() {
            return Err(AlgebraError::Unsupported("the Norton test needs a finite field".into()));
        }
        let d = self.dim();
        let ops = self.basis_operators();
        let ops_t: Vec<Matrix<F::Elem>> = ops.iter().map(|m| m.transpose()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for round in 1..=rounds {
            let theta = random_envelope_element(f, d, &ops, &mut rng);
            let cp = theta.charpoly(f);
            let Some(p) = poly::lowest_degree_irreducible_factor(f, &cp) else { continue };
            let z = theta.eval_poly(f, &p);
            let kernel = z.kernel(f);
            if kernel.len() != p.len() - 1 {
                continue;
            }
            for v in &kernel {
                let s = spin(f, d, std::slice::from_ref(v), &ops);
                if !s.is_full() {
                    return Ok(SimplicityVerdict::NotSimple(NotSimpleWitness::ProperIdeal(s)));
                }
            }
            for w in z.transpose().kernel(f) {
                let s = spin(f, d, std::slice::from_ref(&w), &ops_t);
                if !s.is_full() {
                    // the annihilator of a proper transpose-stable subspace is an ideal
                    let ideal = s.annihilator(f);
                    return Ok(SimplicityVerdict::NotSimple(NotSimpleWitness::ProperIdeal(ideal)));
                }
            }
            return Ok(SimplicityVerdict::Simple {
                certificate: format!(
                    "Norton certificate in round {round}: factor of degree {} with nullity {}",
                    p.len() - 1,
                    kernel.len()
                ),
            });
        }
        Ok(SimplicityVerdict::Inconclusive { reason: format!("no usable kernel in {rounds} rounds") })
    }
}

/// `c_0 I + Σ c_k A_k + Σ c'_t A_{a_t} A_{b_t}` with random coefficients and two random words of length two.
fn random_envelope_element<F: Field>(f: &F, d: usize, ops: &[Matrix<F::Elem>], rng: &mut ChaCha8Rng) -> Matrix<F::Elem> {
    use rand::Rng;
    let mut theta = Matrix::scalar(f, d, &f.random_elem(rng));
    for op in ops {
        let c = f.random_elem(rng);
        if !f.is_zero(&c) {
            theta = theta.add(f, &op.scale(f, &c));
        }
    }
    for _ in 0..2 {
        let a = rng.gen_range(0..ops.len());
        let b = rng.gen_range(0..ops.len());
        let c = f.random_elem(rng);
        theta = theta.add(f, &ops[a].mul(f, &ops[b]).scale(f, &c));
    }
    theta
}
