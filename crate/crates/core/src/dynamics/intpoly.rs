//! Dense integer polynomials (little-endian, trimmed) over `BigInt`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type IntPoly = Vec<BigInt>;

pub fn trim(mut a: IntPoly) -> IntPoly {
    while a.last().is_some_and(|c| c.is_zero()) {
        a.pop();
    }
    a
}

pub fn constant(c: i64) -> IntPoly {
    trim(vec![BigInt::from(c)])
}

pub fn var() -> IntPoly {
    vec![BigInt::zero(), BigInt::one()]
}

pub fn degree(a: &IntPoly) -> Option<usize> {
    a.len().checked_sub(1)
}

pub fn add(a: &IntPoly, b: &IntPoly) -> IntPoly {
    let n = a.len().max(b.len());
    trim(
        (0..n)
            .map(|i| a.get(i).cloned().unwrap_or_default() + b.get(i).cloned().unwrap_or_default())
            .collect(),
    )
}

pub fn neg(a: &IntPoly) -> IntPoly {
    a.iter().map(|c| -c).collect()
}

pub fn sub(a: &IntPoly, b: &IntPoly) -> IntPoly {
    add(a, &neg(b))
}

pub fn mul(a: &IntPoly, b: &IntPoly) -> IntPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut r = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            r[i + j] += x * y;
        }
    }
    trim(r)
}

pub fn pow(a: &IntPoly, e: u32) -> IntPoly {
    let mut acc = constant(1);
    for _ in 0..e {
        acc = mul(&acc, a);
    }
    acc
}

pub fn content(a: &IntPoly) -> BigInt {
    a.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
}

fn scale_div(a: &IntPoly, c: &BigInt) -> IntPoly {
    a.iter().map(|x| x / c).collect()
}

/// Pseudo-remainder of `a` by `b` (`b` nonzero).
fn prem(a: &IntPoly, b: &IntPoly) -> IntPoly {
    let db = b.len() - 1;
    let lb = b[db].clone();
    let mut r = a.clone();
    while r.len() > db && !r.is_empty() {
        let shift = r.len() - 1 - db;
        let lr = r.last().unwrap().clone();
        r = r.iter().map(|c| c * &lb).collect();
        for (j, bj) in b.iter().enumerate() {
            r[shift + j] -= &lr * bj;
        }
        r = trim(r);
    }
    r
}

fn primitive(a: &IntPoly) -> IntPoly {
    if a.is_empty() {
        return Vec::new();
    }
    let mut c = content(a);
    if a.last().unwrap().is_negative() {
        c = -c;
    }
    scale_div(a, &c)
}

/// Primitive gcd in `Z[x]` with positive leading coefficient.
pub fn gcd(a: &IntPoly, b: &IntPoly) -> IntPoly {
    let mut x = primitive(a);
    let mut y = primitive(b);
    if x.len() < y.len() {
        std::mem::swap(&mut x, &mut y);
    }
    while !y.is_empty() {
        let r = primitive(&prem(&x, &y));
        x = std::mem::replace(&mut y, r);
    }
    x
}

/// Exact division; `b` must divide `a` in `Q[x]` with integral quotient up to
/// the returned content factor, which the caller compensates.
pub fn div_exact(a: &IntPoly, b: &IntPoly) -> IntPoly {
    let db = b.len() - 1;
    let lb = b[db].clone();
    let mut r = a.clone();
    let mut q = vec![BigInt::zero(); a.len().saturating_sub(db)];
    while r.len() > db && !r.is_empty() {
        let shift = r.len() - 1 - db;
        let lr = r.last().unwrap().clone();
        assert!((&lr % &lb).is_zero(), "inexact polynomial division");
        let c = &lr / &lb;
        for (j, bj) in b.iter().enumerate() {
            r[shift + j] -= &c * bj;
        }
        q[shift] = c;
        r = trim(r);
    }
    assert!(r.is_empty(), "inexact polynomial division");
    trim(q)
}

pub fn is_constant_one(a: &IntPoly) -> bool {
    a.len() == 1 && a[0].is_one()
}
