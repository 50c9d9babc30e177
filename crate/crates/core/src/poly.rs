//! Dense univariate polynomials over a [`Field`], stored low-to-high and
//! trimmed so the last coefficient is nonzero (the zero polynomial is empty).

use num_bigint::BigUint;
use num_traits::One;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::field::{big_pow, Field};

pub type Poly<E> = Vec<E>;

pub fn trim<F: Field>(f: &F, mut a: Poly<F::Elem>) -> Poly<F::Elem> {
    while a.last().is_some_and(|c| f.is_zero(c)) {
        a.pop();
    }
    a
}

/// Degree, with `None` for the zero polynomial.
pub fn degree<E>(a: &[E]) -> Option<usize> {
    a.len().checked_sub(1)
}

pub fn add<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Poly<F::Elem> {
    let n = a.len().max(b.len());
    let z = f.zero();
    let out = (0..n).map(|i| f.add(a.get(i).unwrap_or(&z), b.get(i).unwrap_or(&z))).collect();
    trim(f, out)
}

pub fn sub<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Poly<F::Elem> {
    let n = a.len().max(b.len());
    let z = f.zero();
    let out = (0..n).map(|i| f.sub(a.get(i).unwrap_or(&z), b.get(i).unwrap_or(&z))).collect();
    trim(f, out)
}

pub fn mul<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Poly<F::Elem> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![f.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if f.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = f.mul_add(&out[i + j], x, y);
        }
    }
    trim(f, out)
}

pub fn scale<F: Field>(f: &F, a: &[F::Elem], c: &F::Elem) -> Poly<F::Elem> {
    trim(f, a.iter().map(|x| f.mul(x, c)).collect())
}

/// Quotient and remainder; panics on division by the zero polynomial.
pub fn divrem<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> (Poly<F::Elem>, Poly<F::Elem>) {
    let db = degree(b).expect("division by zero polynomial");
    let lead_inv = f.inv(&b[db]).expect("trimmed polynomial has nonzero lead");
    let mut r: Poly<F::Elem> = trim(f, a.to_vec());
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let mut q = vec![f.zero(); r.len() - db];
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let c = f.mul(&r[dr], &lead_inv);
        let shift = dr - db;
        for (i, bc) in b.iter().enumerate() {
            r[shift + i] = f.sub(&r[shift + i], &f.mul(&c, bc));
        }
        q[shift] = c;
        r = trim(f, r);
    }
    (trim(f, q), r)
}

pub fn rem<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Poly<F::Elem> {
    divrem(f, a, b).1
}

pub fn monic<F: Field>(f: &F, a: &[F::Elem]) -> Poly<F::Elem> {
    match a.last() {
        None => Vec::new(),
        Some(lead) => {
            let inv = f.inv(lead).expect("nonzero lead");
            scale(f, a, &inv)
        }
    }
}

/// Monic greatest common divisor.
pub fn gcd<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Poly<F::Elem> {
    let mut x = trim(f, a.to_vec());
    let mut y = trim(f, b.to_vec());
    while !y.is_empty() {
        let r = rem(f, &x, &y);
        x = y;
        y = r;
    }
    monic(f, &x)
}

pub fn eval<F: Field>(f: &F, a: &[F::Elem], x: &F::Elem) -> F::Elem {
    a.iter().rev().fold(f.zero(), |acc, c| f.add(&f.mul(&acc, x), c))
}

/// `base^e mod m`.
pub fn powmod<F: Field>(f: &F, base: &[F::Elem], e: &BigUint, m: &[F::Elem]) -> Poly<F::Elem> {
    let mut acc = rem(f, &[f.one()], m);
    let b = rem(f, base, m);
    for i in (0..e.bits()).rev() {
        acc = rem(f, &mul(f, &acc, &acc), m);
        if e.bit(i) {
            acc = rem(f, &mul(f, &acc, &b), m);
        }
    }
    acc
}

fn x_poly<F: Field>(f: &F) -> Poly<F::Elem> {
    vec![f.zero(), f.one()]
}

fn prime_divisors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Rabin's irreducibility test over a finite field.
pub fn is_irreducible<F: Field>(f: &F, a: &[F::Elem]) -> bool {
    let q = f.order().expect("irreducibility test needs a finite field");
    let a = monic(f, &trim(f, a.to_vec()));
    let n = match degree(&a) {
        None | Some(0) => return false,
        Some(1) => return true,
        Some(n) => n,
    };
    let qb = BigUint::from(q);
    let x = x_poly(f);
    // frob[k] = x^{q^k} mod a
    let mut frob = vec![rem(f, &x, &a)];
    for k in 1..=n {
        let next = powmod(f, &frob[k - 1], &qb, &a);
        frob.push(next);
    }
    if sub(f, &frob[n], &x).iter().any(|c| !f.is_zero(c)) {
        return false;
    }
    for r in prime_divisors(n) {
        let h = sub(f, &frob[n / r], &x);
        if degree(&gcd(f, &h, &a)) != Some(0) {
            return false;
        }
    }
    true
}

/// Splits a monic squarefree product of distinct degree-`d` irreducibles.
fn equal_degree_split<F: Field>(f: &F, a: &[F::Elem], d: usize, rng: &mut ChaCha8Rng) -> Vec<Poly<F::Elem>> {
    let n = degree(a).unwrap_or(0);
    if n <= d {
        return vec![a.to_vec()];
    }
    let q = f.order().expect("finite field");
    let char2 = f.characteristic() == 2;
    loop {
        let r: Poly<F::Elem> = trim(f, (0..n).map(|_| f.random_elem(rng)).collect());
        if degree(&r).unwrap_or(0) == 0 {
            continue;
        }
        let b = if char2 {
            // trace map r + r^2 + … + r^{2^{kd-1}} where q = 2^k
            let k = q.trailing_zeros() as usize;
            let mut t = rem(f, &r, a);
            let mut acc = t.clone();
            let two = BigUint::from(2u32);
            for _ in 1..k * d {
                t = powmod(f, &t, &two, a);
                acc = add(f, &acc, &t);
            }
            acc
        } else {
            let e = (big_pow(q, d) - BigUint::one()) >> 1;
            sub(f, &powmod(f, &r, &e, a), &[f.one()])
        };
        let g = gcd(f, &b, a);
        let dg = degree(&g).unwrap_or(0);
        if dg > 0 && dg < n {
            let (h, _) = divrem(f, a, &g);
            let mut out = equal_degree_split(f, &g, d, rng);
            out.extend(equal_degree_split(f, &monic(f, &h), d, rng));
            return out;
        }
    }
}

/// Roots in a finite field, ascending in canonical order.
pub fn finite_roots<F: Field>(f: &F, a: &[F::Elem]) -> Vec<F::Elem> {
    let a = monic(f, &trim(f, a.to_vec()));
    let Some(n) = degree(&a) else { return Vec::new() };
    if n == 0 {
        return Vec::new();
    }
    let q = f.order().expect("finite field");
    if q <= 256 {
        let mut out: Vec<F::Elem> = f.elements().filter(|x| f.is_zero(&eval(f, &a, x))).collect();
        out.sort();
        return out;
    }
    let x = x_poly(f);
    let xq = powmod(f, &x, &BigUint::from(q), &a);
    let g = gcd(f, &sub(f, &xq, &x), &a);
    if degree(&g).unwrap_or(0) == 0 {
        return Vec::new();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut out: Vec<F::Elem> =
        equal_degree_split(f, &g, 1, &mut rng).into_iter().map(|lin| f.neg(&lin[0])).collect();
    out.sort();
    out
}

/// A monic irreducible factor of least degree, ties broken by the smallest
/// coefficient sequence (compared from the top coefficient down).
pub fn lowest_degree_irreducible_factor<F: Field>(f: &F, a: &[F::Elem]) -> Option<Poly<F::Elem>> {
    let a = monic(f, &trim(f, a.to_vec()));
    let n = degree(&a)?;
    if n == 0 {
        return None;
    }
    let q = BigUint::from(f.order().expect("finite field"));
    let x = x_poly(f);
    let mut h = rem(f, &x, &a);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for d in 1..=n {
        h = powmod(f, &h, &q, &a);
        let g = gcd(f, &sub(f, &h, &x), &a);
        if degree(&g).unwrap_or(0) > 0 {
            let mut parts = equal_degree_split(f, &g, d, &mut rng);
            parts.sort_by(|u, v| u.iter().rev().cmp(v.iter().rev()));
            return parts.into_iter().next();
        }
    }
    None
}

pub fn is_zero_poly<E>(a: &[E]) -> bool {
    a.is_empty()
}

pub fn constant<F: Field>(f: &F, c: F::Elem) -> Poly<F::Elem> {
    trim(f, vec![c])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FiniteField;

    #[test]
    fn division_identity() {
        let f = FiniteField::prime(7).unwrap();
        let a = vec![3, 0, 5, 1, 2];
        let b = vec![1, 4, 1];
        let (q, r) = divrem(&f, &a, &b);
        assert_eq!(add(&f, &mul(&f, &q, &b), &r), a);
        assert!(r.len() < b.len());
    }

    #[test]
    fn roots_large_field_match_scan() {
        let f = FiniteField::new(3, 6, Some(&[2, 1, 0, 0, 0, 0, 1])).unwrap();
        // (x - 5)(x - 300)(x - 17) * (x^2 + 1 irreducible? ignore) build from linears
        let mut p = vec![1u32];
        for r in [5u32, 300, 17] {
            p = mul(&f, &p, &[f.neg(&r), 1]);
        }
        assert_eq!(finite_roots(&f, &p), vec![5, 17, 300]);
    }

    #[test]
    fn lowest_factor_examples() {
        let f = FiniteField::prime(5).unwrap();
        // (x^2 + 2)(x + 3) over F_5: x^2+2 is irreducible mod 5
        let p = mul(&f, &[2, 0, 1], &[3, 1]);
        assert_eq!(lowest_degree_irreducible_factor(&f, &p), Some(vec![3, 1]));
        // (x^2+2)(x^2+3): both irreducible; smaller coefficient list first
        let p = mul(&f, &[2, 0, 1], &[3, 0, 1]);
        assert_eq!(lowest_degree_irreducible_factor(&f, &p), Some(vec![2, 0, 1]));
    }

    #[test]
    fn irreducible_counts_over_f2() {
        // number of monic irreducibles of degree 4 over F_2 is 3
        let f = FiniteField::prime(2).unwrap();
        let count = (0u32..16)
            .filter(|m| {
                let mut c: Vec<u32> = (0..4).map(|i| (m >> i) & 1).collect();
                c.push(1);
                is_irreducible(&f, &c)
            })
            .count();
        assert_eq!(count, 3);
    }
}
