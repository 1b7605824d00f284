//! Finite fields `F_{p^n}` as `F_p[x]/(m(x))` for a canonical irreducible `m`.
//!
//! Elements are little-endian coefficient vectors of length `n`. The modulus
//! is the lexicographically least monic irreducible polynomial of degree `n`,
//! comparing the non-leading coefficients from the constant term upward, so a
//! given `(p, n)` always produces the same field. Different degrees are never
//! identified with each other; [`FieldCtx::embedding_into`] builds an explicit
//! embedding when one is needed.

pub mod poly;
pub mod prime;
mod spec;

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use thiserror::Error;

use prime::{add_mod, inv_mod, is_prime, mul_mod, prime_divisors, sub_mod};

pub use poly::Poly;
pub use spec::{parse_field_spec, FieldSpec};

/// Default cap on the number of elements an enumerating operation may visit.
pub const DEFAULT_ENUM_BUDGET: u64 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    DegreeZero,
    #[error("field of size {size} exceeds the enumeration budget {budget}")]
    BudgetExceeded { size: String, budget: u64 },
    #[error("field spec parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("no embedding of GF({p}^{from}) into GF({p}^{to})")]
    NoEmbedding { p: u64, from: usize, to: usize },
}

/// Shared handle to an immutable field context.
pub type Field = Arc<FieldCtx>;

#[derive(Debug, PartialEq, Eq)]
pub struct FieldCtx {
    p: u64,
    n: usize,
    /// Non-leading coefficients `m_0..m_{n-1}` of the monic modulus.
    modulus: Vec<u64>,
}

/// An element of some `F_{p^n}`; meaningful only together with its context.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FieldElem {
    coeffs: Vec<u64>,
}

impl FieldElem {
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

impl Ord for FieldElem {
    /// Orders by rank: the highest coefficient is most significant.
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs
            .iter()
            .rev()
            .cmp(other.coeffs.iter().rev())
    }
}

impl PartialOrd for FieldElem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Builds `F_{p^n}` with the canonical modulus.
pub fn build_field(p: u64, n: usize) -> Result<Field, FieldError> {
    if !is_prime(p) {
        return Err(FieldError::NotPrime(p));
    }
    if n == 0 {
        return Err(FieldError::DegreeZero);
    }
    let modulus = if n == 1 {
        vec![0]
    } else {
        least_irreducible(p, n)
    };
    Ok(Arc::new(FieldCtx { p, n, modulus }))
}

impl FieldCtx {
    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    /// Non-leading coefficients of the monic modulus, constant term first.
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// `p^n`, when it fits in 64 bits.
    pub fn size(&self) -> Option<u64> {
        self.p.checked_pow(self.n as u32)
    }

    pub fn size_big(&self) -> BigUint {
        BigUint::from(self.p).pow(self.n as u32)
    }

    /// Checks `p^n <= budget` and returns the size.
    pub fn check_budget(&self, budget: u64) -> Result<u64, FieldError> {
        match self.size() {
            Some(s) if s <= budget => Ok(s),
            _ => Err(FieldError::BudgetExceeded {
                size: format!("{}^{}", self.p, self.n),
                budget,
            }),
        }
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem {
            coeffs: vec![0; self.n],
        }
    }

    pub fn one(&self) -> FieldElem {
        self.from_u64(1)
    }

    /// The image of an integer in the prime subfield.
    pub fn from_u64(&self, c: u64) -> FieldElem {
        let mut coeffs = vec![0; self.n];
        coeffs[0] = c % self.p;
        FieldElem { coeffs }
    }

    pub fn from_i64(&self, c: i64) -> FieldElem {
        self.from_u64((c as i128).rem_euclid(self.p as i128) as u64)
    }

    pub fn from_bigint(&self, c: &num_bigint::BigInt) -> FieldElem {
        let p = num_bigint::BigInt::from(self.p);
        let r = ((c % &p) + &p) % &p;
        let (_, digits) = r.to_u64_digits();
        self.from_u64(digits.first().copied().unwrap_or(0))
    }

    /// Builds an element from coefficients, reducing each mod `p`.
    /// Extra high coefficients are reduced modulo the field polynomial.
    pub fn from_coeffs(&self, coeffs: &[u64]) -> FieldElem {
        let mut c: Vec<u64> = coeffs.iter().map(|&x| x % self.p).collect();
        if c.len() <= self.n {
            c.resize(self.n, 0);
            FieldElem { coeffs: c }
        } else {
            self.reduce_wide(c)
        }
    }

    /// The class of `x` (a generator of the field over `F_p` when `n > 1`).
    pub fn generator(&self) -> FieldElem {
        if self.n == 1 {
            // x mod (x - 0)
            return self.zero();
        }
        let mut c = vec![0; self.n];
        c[1] = 1;
        FieldElem { coeffs: c }
    }

    pub fn is_one(&self, a: &FieldElem) -> bool {
        a.coeffs[0] == 1 && a.coeffs[1..].iter().all(|&c| c == 0)
    }

    /// Whether `a` lies in the prime subfield.
    pub fn is_prime_subfield(&self, a: &FieldElem) -> bool {
        a.coeffs[1..].iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        let coeffs = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(&x, &y)| add_mod(x, y, self.p))
            .collect();
        FieldElem { coeffs }
    }

    pub fn sub(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        let coeffs = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(&x, &y)| sub_mod(x, y, self.p))
            .collect();
        FieldElem { coeffs }
    }

    pub fn neg(&self, a: &FieldElem) -> FieldElem {
        let coeffs = a
            .coeffs
            .iter()
            .map(|&x| if x == 0 { 0 } else { self.p - x })
            .collect();
        FieldElem { coeffs }
    }

    pub fn scale(&self, a: &FieldElem, c: u64) -> FieldElem {
        let c = c % self.p;
        FieldElem {
            coeffs: a.coeffs.iter().map(|&x| mul_mod(x, c, self.p)).collect(),
        }
    }

    pub fn mul(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        let n = self.n;
        let p = self.p;
        if n == 1 {
            return FieldElem {
                coeffs: vec![mul_mod(a.coeffs[0], b.coeffs[0], p)],
            };
        }
        let mut wide = vec![0u64; 2 * n - 1];
        if p < (1 << 31) {
            // products fit in 62 bits; accumulate a full column before reducing
            let mut acc = vec![0u128; 2 * n - 1];
            for (i, &x) in a.coeffs.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                for (j, &y) in b.coeffs.iter().enumerate() {
                    acc[i + j] += (x * y) as u128;
                }
            }
            for (w, s) in wide.iter_mut().zip(acc) {
                *w = (s % p as u128) as u64;
            }
        } else {
            for (i, &x) in a.coeffs.iter().enumerate() {
                for (j, &y) in b.coeffs.iter().enumerate() {
                    wide[i + j] = add_mod(wide[i + j], mul_mod(x, y, p), p);
                }
            }
        }
        self.reduce_wide(wide)
    }

    pub fn square(&self, a: &FieldElem) -> FieldElem {
        self.mul(a, a)
    }

    /// Reduces a coefficient vector of any length modulo the field polynomial.
    fn reduce_wide(&self, mut wide: Vec<u64>) -> FieldElem {
        let n = self.n;
        let p = self.p;
        for i in (n..wide.len()).rev() {
            let c = wide[i];
            if c == 0 {
                continue;
            }
            wide[i] = 0;
            // x^n = -sum m_j x^j
            for j in 0..n {
                let t = mul_mod(c, self.modulus[j], p);
                wide[i - n + j] = sub_mod(wide[i - n + j], t, p);
            }
        }
        wide.truncate(n);
        wide.resize(n, 0);
        FieldElem { coeffs: wide }
    }

    /// Multiplicative inverse by the extended Euclidean algorithm.
    pub fn inv(&self, a: &FieldElem) -> Option<FieldElem> {
        if a.is_zero() {
            return None;
        }
        let p = self.p;
        if self.n == 1 {
            return Some(FieldElem {
                coeffs: vec![inv_mod(a.coeffs[0], p)],
            });
        }
        let mut r0 = self.modulus_poly();
        let mut r1 = fp::trimmed(a.coeffs.clone());
        let mut s0: Vec<u64> = Vec::new();
        let mut s1: Vec<u64> = vec![1];
        while r1.len() > 1 {
            let (q, r) = fp::divrem(&r0, &r1, p);
            let qs = fp::mul(&q, &s1, p);
            let s2 = fp::sub(&s0, &qs, p);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
        }
        // r1 is a nonzero constant since the modulus is irreducible
        let c = inv_mod(r1[0], p);
        let s: Vec<u64> = s1.iter().map(|&x| mul_mod(x, c, p)).collect();
        Some(self.from_coeffs(&s))
    }

    pub fn div(&self, a: &FieldElem, b: &FieldElem) -> Option<FieldElem> {
        self.inv(b).map(|bi| self.mul(a, &bi))
    }

    pub fn pow(&self, a: &FieldElem, mut e: u64) -> FieldElem {
        let mut acc = self.one();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.square(&base);
            }
        }
        acc
    }

    pub fn pow_big(&self, a: &FieldElem, e: &BigUint) -> FieldElem {
        let mut acc = self.one();
        for i in (0..e.bits()).rev() {
            acc = self.square(&acc);
            if e.bit(i) {
                acc = self.mul(&acc, a);
            }
        }
        acc
    }

    /// The Frobenius map `e -> e^p`.
    pub fn frobenius(&self, e: &FieldElem) -> FieldElem {
        if self.n == 1 {
            return e.clone();
        }
        self.pow(e, self.p)
    }

    /// Least `k >= 1` with `e^{p^k} = e`, i.e. the degree of `e` over `F_p`.
    pub fn element_degree(&self, e: &FieldElem) -> usize {
        self.element_degree_over(e, 1)
    }

    /// Degree of `e` over the subfield `F_{p^m}` (`m` must divide `n`).
    pub fn element_degree_over(&self, e: &FieldElem, m: usize) -> usize {
        assert!(m >= 1 && self.n % m == 0, "subfield degree must divide n");
        if self.is_prime_subfield(e) {
            return 1;
        }
        let mut cur = e.clone();
        for k in 1..=self.n / m {
            for _ in 0..m {
                cur = self.frobenius(&cur);
            }
            if &cur == e {
                return k;
            }
        }
        unreachable!("Frobenius^n is the identity")
    }

    /// Euler's criterion: whether `a` is a square (zero counts as a square).
    pub fn is_square(&self, a: &FieldElem) -> bool {
        if a.is_zero() {
            return true;
        }
        if self.p == 2 {
            return true;
        }
        let e = (self.size_big() - 1u32) >> 1;
        self.is_one(&self.pow_big(a, &e))
    }

    /// Rank `sum c_i p^i`; requires `p^n` to fit in 64 bits.
    pub fn rank(&self, e: &FieldElem) -> u64 {
        e.coeffs
            .iter()
            .rev()
            .fold(0u64, |acc, &c| acc * self.p + c)
    }

    pub fn unrank(&self, mut r: u64) -> FieldElem {
        let mut coeffs = vec![0; self.n];
        for c in coeffs.iter_mut() {
            *c = r % self.p;
            r /= self.p;
        }
        FieldElem { coeffs }
    }

    /// All elements in rank order; fails if `p^n` exceeds `budget`.
    pub fn enumerate(
        &self,
        budget: u64,
    ) -> Result<impl Iterator<Item = FieldElem> + '_, FieldError> {
        let size = self.check_budget(budget)?;
        Ok((0..size).map(move |r| self.unrank(r)))
    }

    fn modulus_poly(&self) -> Vec<u64> {
        let mut m = self.modulus.clone();
        m.push(1);
        m
    }

    /// Embeds this field into `target` (same characteristic, degree divisible
    /// by ours) by sending the generator to the least root of our modulus.
    pub fn embedding_into(&self, target: &Field) -> Result<Embedding, FieldError> {
        let err = FieldError::NoEmbedding {
            p: self.p,
            from: self.n,
            to: target.n,
        };
        if target.p != self.p || target.n % self.n != 0 {
            return Err(err);
        }
        if self.n == 1 {
            return Ok(Embedding {
                generator_image: target.zero(),
                prime_only: true,
            });
        }
        let m = Poly::new(
            self.modulus_poly()
                .iter()
                .map(|&c| target.from_u64(c))
                .collect(),
        );
        let roots = m.distinct_roots(target);
        let root = roots.into_iter().min().ok_or(err)?;
        Ok(Embedding {
            generator_image: root,
            prime_only: false,
        })
    }

    pub fn fmt_elem(&self, e: &FieldElem) -> String {
        if self.n == 1 {
            return e.coeffs[0].to_string();
        }
        let mut terms = Vec::new();
        for (i, &c) in e.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let t = match (i, c) {
                (0, _) => c.to_string(),
                (1, 1) => "x".to_string(),
                (1, _) => format!("{c}*x"),
                (_, 1) => format!("x^{i}"),
                _ => format!("{c}*x^{i}"),
            };
            terms.push(t);
        }
        if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join("+")
        }
    }
}

impl fmt::Display for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n == 1 {
            write!(f, "GF({})", self.p)
        } else {
            write!(f, "GF({}^{})", self.p, self.n)
        }
    }
}

/// A field homomorphism `F_{p^m} -> F_{p^{mk}}`.
#[derive(Clone, Debug)]
pub struct Embedding {
    generator_image: FieldElem,
    prime_only: bool,
}

impl Embedding {
    pub fn apply(&self, source: &FieldCtx, target: &FieldCtx, e: &FieldElem) -> FieldElem {
        if self.prime_only {
            return target.from_u64(e.coeffs[0]);
        }
        // Horner in the image of the generator
        let mut acc = target.zero();
        for &c in e.coeffs.iter().rev() {
            acc = target.mul(&acc, &self.generator_image);
            acc = target.add(&acc, &target.from_u64(c));
        }
        debug_assert_eq!(e.coeffs.len(), source.n);
        acc
    }
}

/// Lexicographically least monic irreducible of degree `n >= 2` over `F_p`,
/// returned without its leading coefficient.
fn least_irreducible(p: u64, n: usize) -> Vec<u64> {
    let mut low = vec![0u64; n];
    loop {
        if low[0] != 0 {
            let mut f = low.clone();
            f.push(1);
            if fp::is_irreducible(&f, p) {
                return low;
            }
        }
        // increment, constant term varying slowest for lexicographic order
        // on (c_0, c_1, ..., c_{n-1})
        let mut i = n - 1;
        loop {
            low[i] += 1;
            if low[i] < p {
                break;
            }
            low[i] = 0;
            assert!(i > 0, "an irreducible polynomial of every degree exists");
            i -= 1;
        }
    }
}

/// Dense polynomials over the prime field, little-endian and trimmed.
mod fp {
    use super::prime::{add_mod, inv_mod, mul_mod, sub_mod};

    pub fn trimmed(mut a: Vec<u64>) -> Vec<u64> {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    pub fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let n = a.len().max(b.len());
        let r = (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                sub_mod(x, y, p)
            })
            .collect();
        trimmed(r)
    }

    pub fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut r = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                r[i + j] = add_mod(r[i + j], mul_mod(x, y, p), p);
            }
        }
        trimmed(r)
    }

    /// Quotient and remainder; `b` must be nonzero.
    pub fn divrem(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
        let mut r = trimmed(a.to_vec());
        let db = b.len() - 1;
        let lead_inv = inv_mod(b[db], p);
        if r.len() < b.len() {
            return (Vec::new(), r);
        }
        let mut q = vec![0u64; r.len() - db];
        while r.len() >= b.len() {
            let shift = r.len() - b.len();
            let c = mul_mod(*r.last().unwrap(), lead_inv, p);
            q[shift] = c;
            for (j, &bj) in b.iter().enumerate() {
                r[shift + j] = sub_mod(r[shift + j], mul_mod(c, bj, p), p);
            }
            r = trimmed(r);
        }
        (trimmed(q), r)
    }

    pub fn rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        divrem(a, b, p).1
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut x = trimmed(a.to_vec());
        let mut y = trimmed(b.to_vec());
        while !y.is_empty() {
            let r = rem(&x, &y, p);
            x = std::mem::replace(&mut y, r);
        }
        x
    }

    fn mulmod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
        rem(&mul(a, b, p), f, p)
    }

    /// `base^p mod f`.
    fn pow_p(base: &[u64], f: &[u64], p: u64) -> Vec<u64> {
        let mut acc = vec![1u64];
        let mut b = base.to_vec();
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(&acc, &b, f, p);
            }
            e >>= 1;
            if e > 0 {
                b = mulmod(&b, &b, f, p);
            }
        }
        acc
    }

    /// Rabin's test for a monic `f` of degree `n >= 1`.
    pub fn is_irreducible(f: &[u64], p: u64) -> bool {
        let n = f.len() - 1;
        let x = rem(&[0, 1], f, p);
        // x^{p^k} mod f for k = 1..n
        let mut powers = Vec::with_capacity(n);
        let mut cur = x.clone();
        for _ in 0..n {
            cur = pow_p(&cur, f, p);
            powers.push(cur.clone());
        }
        if sub(&powers[n - 1], &x, p) != Vec::<u64>::new() {
            return false;
        }
        for r in super::prime_divisors(n as u64) {
            let k = n / r as usize;
            let h = sub(&powers[k - 1], &x, p);
            let g = gcd(f, &h, p);
            if g.len() != 1 {
                return false;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force irreducibility for tiny fields: no roots and no factor of
    /// degree <= n/2, checked by trial division over all monic polynomials.
    fn brute_irreducible(f: &[u64], p: u64) -> bool {
        let n = f.len() - 1;
        for d in 1..=n / 2 {
            let count = p.pow(d as u32);
            for r in 0..count {
                let mut g = Vec::with_capacity(d + 1);
                let mut x = r;
                for _ in 0..d {
                    g.push(x % p);
                    x /= p;
                }
                g.push(1);
                if fp::rem(f, &g, p).is_empty() {
                    return false;
                }
            }
        }
        true
    }

    fn brute_least(p: u64, n: usize) -> Vec<u64> {
        // lexicographic on (c_0, ..., c_{n-1})
        let mut all: Vec<Vec<u64>> = (0..p.pow(n as u32))
            .map(|mut r| {
                let mut c = vec![0; n];
                for slot in c.iter_mut().rev() {
                    *slot = r % p;
                    r /= p;
                }
                c
            })
            .collect();
        all.sort();
        all.into_iter()
            .find(|c| {
                let mut f = c.clone();
                f.push(1);
                brute_irreducible(&f, p)
            })
            .unwrap()
    }

    #[test]
    fn prime_field_modulus_is_x() {
        let f = build_field(3, 1).unwrap();
        assert_eq!(f.modulus(), &[0]);
    }

    #[test]
    fn gf9_modulus_is_x2_plus_1() {
        let f = build_field(3, 2).unwrap();
        assert_eq!(f.modulus(), &[1, 0]);
    }

    #[test]
    fn canonical_modulus_matches_exhaustive_search() {
        for (p, n) in [(2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (3, 4), (5, 2), (5, 3), (7, 2)] {
            let f = build_field(p, n).unwrap();
            assert_eq!(f.modulus(), brute_least(p, n).as_slice(), "p={p} n={n}");
        }
    }

    #[test]
    fn errors() {
        assert_eq!(build_field(4, 1).unwrap_err(), FieldError::NotPrime(4));
        assert_eq!(build_field(3, 0).unwrap_err(), FieldError::DegreeZero);
        assert!(build_field(2, 1).is_ok());
    }

    #[test]
    fn frobenius_examples() {
        let f = build_field(3, 2).unwrap();
        let two = f.from_u64(2);
        assert_eq!(f.frobenius(&two), two);
        let x = f.generator();
        assert_eq!(f.frobenius(&x), f.scale(&x, 2));
        assert_eq!(f.frobenius(&f.zero()), f.zero());
    }

    #[test]
    fn element_degrees() {
        let f81 = build_field(3, 4).unwrap();
        assert_eq!(f81.element_degree(&f81.from_u64(2)), 1);
        let f9 = build_field(3, 2).unwrap();
        assert_eq!(f9.element_degree(&f9.generator()), 2);
        let below: usize = f81
            .enumerate(DEFAULT_ENUM_BUDGET)
            .unwrap()
            .filter(|e| f81.element_degree(e) < 4)
            .count();
        assert_eq!(below, 9);
    }

    #[test]
    fn enumeration_sizes() {
        let f3 = build_field(3, 1).unwrap();
        let v: Vec<u64> = f3.enumerate(10).unwrap().map(|e| e.coeffs()[0]).collect();
        assert_eq!(v, vec![0, 1, 2]);
        assert_eq!(build_field(3, 2).unwrap().enumerate(100).unwrap().count(), 9);
        assert_eq!(
            build_field(3, 10).unwrap().enumerate(DEFAULT_ENUM_BUDGET).unwrap().count(),
            59049
        );
        assert!(matches!(
            build_field(3, 10).unwrap().enumerate(1000).map(|_| ()),
            Err(FieldError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn rank_round_trip() {
        let f = build_field(5, 3).unwrap();
        for r in 0..125 {
            assert_eq!(f.rank(&f.unrank(r)), r);
        }
    }

    #[test]
    fn inverses_in_gf_3_5() {
        let f = build_field(3, 5).unwrap();
        for e in f.enumerate(1000).unwrap().skip(1) {
            let i = f.inv(&e).unwrap();
            assert!(f.is_one(&f.mul(&e, &i)));
        }
        assert!(f.inv(&f.zero()).is_none());
    }

    #[test]
    fn embedding_is_a_homomorphism() {
        let small = build_field(3, 2).unwrap();
        let big = build_field(3, 4).unwrap();
        let emb = small.embedding_into(&big).unwrap();
        let elems: Vec<_> = small.enumerate(100).unwrap().collect();
        for a in &elems {
            for b in &elems {
                let lhs = emb.apply(&small, &big, &small.mul(a, b));
                let rhs = big.mul(&emb.apply(&small, &big, a), &emb.apply(&small, &big, b));
                assert_eq!(lhs, rhs);
                let lhs = emb.apply(&small, &big, &small.add(a, b));
                let rhs = big.add(&emb.apply(&small, &big, a), &emb.apply(&small, &big, b));
                assert_eq!(lhs, rhs);
            }
            assert!(big.element_degree(&emb.apply(&small, &big, a)) <= 2);
        }
        assert!(small.embedding_into(&build_field(3, 3).unwrap()).is_err());
    }

    #[test]
    fn square_test_counts() {
        let f = build_field(5, 2).unwrap();
        let squares = f.enumerate(100).unwrap().filter(|e| f.is_square(e)).count();
        assert_eq!(squares, 13); // (25 - 1)/2 + 1
    }
}
