//! Univariate polynomials over a [`FieldCtx`], with root finding.

use num_bigint::BigUint;

use super::{FieldCtx, FieldElem};

/// Little-endian coefficients; always trimmed (no trailing zeros).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<FieldElem>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<FieldElem>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: FieldElem) -> Self {
        Poly::new(vec![c])
    }

    /// `x - a`
    pub fn linear_root(f: &FieldCtx, a: &FieldElem) -> Self {
        Poly::new(vec![f.neg(a), f.one()])
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&FieldElem> {
        self.coeffs.last()
    }

    pub fn coeff(&self, f: &FieldCtx, i: usize) -> FieldElem {
        self.coeffs.get(i).cloned().unwrap_or_else(|| f.zero())
    }

    pub fn eval(&self, f: &FieldCtx, x: &FieldElem) -> FieldElem {
        let mut acc = f.zero();
        for c in self.coeffs.iter().rev() {
            acc = f.add(&f.mul(&acc, x), c);
        }
        acc
    }

    pub fn add(&self, f: &FieldCtx, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new(
            (0..n)
                .map(|i| f.add(&self.coeff(f, i), &other.coeff(f, i)))
                .collect(),
        )
    }

    pub fn sub(&self, f: &FieldCtx, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new(
            (0..n)
                .map(|i| f.sub(&self.coeff(f, i), &other.coeff(f, i)))
                .collect(),
        )
    }

    pub fn scale(&self, f: &FieldCtx, c: &FieldElem) -> Poly {
        Poly::new(self.coeffs.iter().map(|x| f.mul(x, c)).collect())
    }

    pub fn mul(&self, f: &FieldCtx, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut r = vec![f.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                r[i + j] = f.add(&r[i + j], &f.mul(a, b));
            }
        }
        Poly::new(r)
    }

    pub fn derivative(&self, f: &FieldCtx) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| f.scale(c, i as u64))
                .collect(),
        )
    }

    /// Division with remainder; panics on division by zero.
    pub fn divrem(&self, f: &FieldCtx, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lead_inv = f.inv(d.lead().unwrap()).unwrap();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut q = vec![f.zero(); r.len() - dd];
        for shift in (0..q.len()).rev() {
            let top = &r[shift + dd];
            if top.is_zero() {
                continue;
            }
            let c = f.mul(top, &lead_inv);
            for (j, dj) in d.coeffs.iter().enumerate() {
                r[shift + j] = f.sub(&r[shift + j], &f.mul(&c, dj));
            }
            q[shift] = c;
        }
        r.truncate(dd);
        (Poly::new(q), Poly::new(r))
    }

    pub fn rem(&self, f: &FieldCtx, d: &Poly) -> Poly {
        self.divrem(f, d).1
    }

    pub fn monic(&self, f: &FieldCtx) -> Poly {
        match self.lead() {
            None => Poly::zero(),
            Some(l) => self.scale(f, &f.inv(l).unwrap()),
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, f: &FieldCtx, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(f, &b);
            a = std::mem::replace(&mut b, r);
        }
        a.monic(f)
    }

    /// `self^e mod m`.
    pub fn pow_mod(&self, f: &FieldCtx, e: &BigUint, m: &Poly) -> Poly {
        let mut acc = Poly::constant(f.one()).rem(f, m);
        let base = self.rem(f, m);
        for i in (0..e.bits()).rev() {
            acc = acc.mul(f, &acc).rem(f, m);
            if e.bit(i) {
                acc = acc.mul(f, &base).rem(f, m);
            }
        }
        acc
    }

    /// Multiplicity of `a` as a root (0 if not a root). The zero polynomial
    /// reports `usize::MAX`.
    pub fn root_multiplicity(&self, f: &FieldCtx, a: &FieldElem) -> usize {
        if self.is_zero() {
            return usize::MAX;
        }
        let lin = Poly::linear_root(f, a);
        let mut cur = self.clone();
        let mut k = 0;
        loop {
            let (q, r) = cur.divrem(f, &lin);
            if !r.is_zero() {
                return k;
            }
            k += 1;
            cur = q;
        }
    }

    /// The distinct roots lying in the field, in rank order.
    ///
    /// Uses the gcd with `x^Q - x` followed by equal-degree splitting with
    /// `(x + t)^{(Q-1)/2} - 1` for deterministic shifts `t`; characteristic 2
    /// falls back to exhaustive search.
    pub fn distinct_roots(&self, f: &FieldCtx) -> Vec<FieldElem> {
        if self.degree().unwrap_or(0) == 0 {
            return Vec::new();
        }
        let m = self.monic(f);
        let x = Poly::new(vec![f.zero(), f.one()]);
        let q = f.size_big();
        let xq = x.pow_mod(f, &q, &m);
        let g = m.gcd(f, &xq.sub(f, &x));
        let mut roots = Vec::new();
        if f.characteristic() == 2 {
            let size = f.size().expect("characteristic-2 root search needs a small field");
            for r in 0..size {
                let e = f.unrank(r);
                if g.eval(f, &e).is_zero() {
                    roots.push(e);
                }
            }
            return roots;
        }
        let half = (q - 1u32) >> 1;
        split_linear(f, &g, &half, &mut roots, 0);
        roots.sort();
        roots
    }

    /// Roots with multiplicities.
    pub fn roots_with_multiplicity(&self, f: &FieldCtx) -> Vec<(FieldElem, usize)> {
        self.distinct_roots(f)
            .into_iter()
            .map(|r| {
                let k = self.root_multiplicity(f, &r);
                (r, k)
            })
            .collect()
    }
}

/// Splits a squarefree product of distinct linear factors.
fn split_linear(f: &FieldCtx, g: &Poly, half: &BigUint, out: &mut Vec<FieldElem>, mut shift: u64) {
    match g.degree() {
        None | Some(0) => return,
        Some(1) => {
            // x + c  ->  root -c
            out.push(f.neg(&g.coeffs[0]));
            return;
        }
        _ => {}
    }
    let one = Poly::constant(f.one());
    loop {
        let t = f.unrank(shift % f.size().unwrap_or(u64::MAX));
        shift += 1;
        let lin = Poly::new(vec![t, f.one()]);
        let h = lin.pow_mod(f, half, g).sub(f, &one);
        let d = g.gcd(f, &h);
        let dd = d.degree().unwrap_or(0);
        if dd > 0 && dd < g.degree().unwrap() {
            let (other, _) = g.divrem(f, &d);
            split_linear(f, &d, half, out, shift);
            split_linear(f, &other.monic(f), half, out, shift);
            return;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::build_field;

    fn brute_roots(f: &FieldCtx, p: &Poly) -> Vec<FieldElem> {
        let mut v: Vec<_> = f
            .enumerate(1 << 20)
            .unwrap()
            .filter(|e| p.eval(f, e).is_zero())
            .collect();
        v.sort();
        v
    }

    #[test]
    fn roots_match_exhaustive_search() {
        let f = build_field(5, 2).unwrap();
        // (x^2 - 2)(x - 3)(x^2 + x + 1): roots of x^2 - 2 live in GF(25)
        let p = Poly::new(vec![f.from_i64(-2), f.zero(), f.one()])
            .mul(&f, &Poly::linear_root(&f, &f.from_u64(3)))
            .mul(&f, &Poly::new(vec![f.one(), f.one(), f.one()]));
        let roots = p.distinct_roots(&f);
        assert_eq!(roots, brute_roots(&f, &p));
        assert_eq!(roots.len(), 5);
    }

    #[test]
    fn multiplicities() {
        let f = build_field(7, 1).unwrap();
        let a = f.from_u64(3);
        let p = Poly::linear_root(&f, &a)
            .mul(&f, &Poly::linear_root(&f, &a))
            .mul(&f, &Poly::linear_root(&f, &f.from_u64(1)));
        assert_eq!(
            p.roots_with_multiplicity(&f),
            vec![(f.from_u64(1), 1), (a, 2)]
        );
    }

    #[test]
    fn no_roots_for_irreducible() {
        let f = build_field(3, 1).unwrap();
        let p = Poly::new(vec![f.one(), f.zero(), f.one()]);
        assert!(p.distinct_roots(&f).is_empty());
    }

    #[test]
    fn characteristic_two_roots() {
        let f = build_field(2, 3).unwrap();
        let p = Poly::new(vec![f.zero(), f.one(), f.one()]); // x^2 + x
        assert_eq!(p.distinct_roots(&f).len(), 2);
    }
}
