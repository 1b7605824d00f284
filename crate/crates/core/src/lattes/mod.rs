//! Periodic points of the Lattès map `k(x + 1/x)` over `GF(p^n)`, `p ≡ 1 mod 4`,
//! checked against the arithmetic of the curve `y^2 = x^3 + x`.

use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::dynamics::{FieldMap, FunctionalGraph, MapError, ProjPoint};
use crate::field::{build_field, prime::is_prime, FieldError};

pub const DEFAULT_POINT_BUDGET: u64 = 1_000_000;

#[derive(Debug, Error)]
pub enum LattesError {
    #[error("p = {0} is not 1 mod 4")]
    WrongResidueClass(u64),
    #[error("{0} is not a perfect square")]
    NotASquare(BigInt),
    #[error("valuation of zero")]
    ZeroElement,
    #[error("p^n = {size} exceeds the point budget {budget}")]
    BudgetExceeded { size: String, budget: u64 },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Map(#[from] MapError),
}

/// An element of `Z[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussianInt {
    pub re: BigInt,
    pub im: BigInt,
}

impl GaussianInt {
    pub fn new(re: impl Into<BigInt>, im: impl Into<BigInt>) -> Self {
        GaussianInt {
            re: re.into(),
            im: im.into(),
        }
    }

    pub fn one() -> Self {
        Self::new(1, 0)
    }

    pub fn norm(&self) -> BigInt {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn conj(&self) -> Self {
        GaussianInt {
            re: self.re.clone(),
            im: -&self.im,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }
}

impl std::fmt::Display for GaussianInt {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.im.is_negative() {
            write!(f, "{} - {}i", self.re, -&self.im)
        } else {
            write!(f, "{} + {}i", self.re, self.im)
        }
    }
}

impl Add for &GaussianInt {
    type Output = GaussianInt;
    fn add(self, o: &GaussianInt) -> GaussianInt {
        GaussianInt {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }
}

impl Sub for &GaussianInt {
    type Output = GaussianInt;
    fn sub(self, o: &GaussianInt) -> GaussianInt {
        GaussianInt {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
        }
    }
}

impl Mul for &GaussianInt {
    type Output = GaussianInt;
    fn mul(self, o: &GaussianInt) -> GaussianInt {
        GaussianInt {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl Neg for &GaussianInt {
    type Output = GaussianInt;
    fn neg(self) -> GaussianInt {
        GaussianInt {
            re: -&self.re,
            im: -&self.im,
        }
    }
}

/// Valuation at the prime `1 + i`, equal to the 2-adic valuation of the norm.
pub fn wp_valuation(z: &GaussianInt) -> Result<u32, LattesError> {
    if z.is_zero() {
        return Err(LattesError::ZeroElement);
    }
    let n = z.norm();
    Ok(n.trailing_zeros().expect("nonzero") as u32)
}

fn check_prime(p: u64) -> Result<(), LattesError> {
    if !is_prime(p) {
        return Err(FieldError::NotPrime(p).into());
    }
    if p % 4 != 1 {
        return Err(LattesError::WrongResidueClass(p));
    }
    Ok(())
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = ((acc as u128 * b as u128) % p as u128) as u64;
        }
        b = ((b as u128 * b as u128) % p as u128) as u64;
        e >>= 1;
    }
    acc
}

/// `#E(F_p)` for `y^2 = x^3 + x`, including the point at infinity.
pub fn count_curve_points(p: u64) -> Result<u64, LattesError> {
    check_prime(p)?;
    if p > DEFAULT_POINT_BUDGET {
        return Err(LattesError::BudgetExceeded {
            size: p.to_string(),
            budget: DEFAULT_POINT_BUDGET,
        });
    }
    let affine: u64 = (0..p)
        .into_par_iter()
        .map(|x| {
            let t = (pow_mod(x, 3, p) + x) % p;
            if t == 0 {
                1
            } else if pow_mod(t, (p - 1) / 2, p) == 1 {
                2
            } else {
                0
            }
        })
        .sum();
    Ok(affine + 1)
}

/// Frobenius `a + bi` with `a = r/2` and `b > 0`.
pub fn frobenius_pi(p: u64, trace: i64) -> Result<GaussianInt, LattesError> {
    let a = BigInt::from(trace);
    if trace.is_odd() {
        return Err(LattesError::NotASquare(a));
    }
    let a = a / 2;
    let b2: BigInt = BigInt::from(p) - &a * &a;
    if b2.is_negative() {
        return Err(LattesError::NotASquare(b2));
    }
    let b = b2.sqrt();
    if &b * &b != b2 {
        return Err(LattesError::NotASquare(b2));
    }
    let pi = GaussianInt { re: a, im: b };
    debug_assert_eq!(pi.norm(), BigInt::from(p));
    Ok(pi)
}

/// `k(x + 1/x)` over `GF(p^n)`.
pub fn psi_map(p: u64, n: usize, k: u64) -> Result<FieldMap, LattesError> {
    let f = build_field(p, n)?;
    let k = f.from_u64(k);
    Ok(FieldMap::new(
        f.clone(),
        vec![k.clone(), f.zero(), k],
        vec![f.zero(), f.one(), f.zero()],
    )?)
}

/// Both square roots of `-1/4` in `GF(p)`, least first.
pub fn square_roots_of_minus_quarter(p: u64) -> Vec<u64> {
    let target = (p - pow_mod(4, p - 2, p)) % p;
    (0..p).filter(|&k| k * k % p == target).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct TreeAudit {
    /// Predicted depth of the non-periodic trees on this side.
    pub predicted: u32,
    /// Periodic points whose tree is complete binary of the predicted depth.
    pub passing: usize,
    pub periodic: usize,
    /// Observed depths of failing trees, with counts.
    pub failures: Vec<(String, usize)>,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct LattesLevel {
    pub n: usize,
    pub points: u64,
    pub sqrt2_in_field: bool,
    pub v_minus: u32,
    pub v_plus: u32,
    pub a_count: u64,
    pub b_count: u64,
    pub a_periodic: u64,
    pub b_periodic: u64,
    pub periodic: u64,
    #[serde(serialize_with = "ser_ratio")]
    pub proportion: Ratio<u64>,
    pub partition_invariant: bool,
    /// Side whose trees have the smaller predicted depth.
    pub designated: char,
    pub tree_audit: TreeAudit,
    pub other_side_audit: TreeAudit,
    pub side_quarter_bound: bool,
    pub eighth_bound: bool,
    /// `|#A_n/(p^n+1) - 1/2|` against `2 p^{-n/2} + 2/(p^n+1)`.
    pub hasse_deviation: f64,
    pub hasse_bound: f64,
    pub hasse_ok: bool,
    /// Both square roots `k` give the same periodic count.
    pub conjugate_agrees: bool,
}

fn ser_ratio<S: serde::Serializer>(r: &Ratio<u64>, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
}

#[derive(Clone, Debug, Serialize)]
pub struct LattesReport {
    pub p: u64,
    pub k: u64,
    pub curve_points: u64,
    pub trace: i64,
    pub frobenius: String,
    pub hasse_trace_ok: bool,
    pub levels: Vec<LattesLevel>,
    pub passed: bool,
}

/// Height and completeness of the tree of non-periodic preimages above a
/// periodic point. `weight` counts critical preimages twice.
fn tree_depth(root: u32, preds: &[Vec<u32>], periodic: &[bool], weight: &dyn Fn(u32) -> usize) -> Option<u32> {
    // the single non-periodic preimage of `root` starts the tree
    let mut level: Vec<u32> = preds[root as usize].iter().copied().filter(|&x| !periodic[x as usize]).collect();
    let first: usize = level.iter().map(|&x| weight(x)).sum();
    if first == 0 {
        return Some(0);
    }
    if first != 1 && !(first == 2 && level.len() == 1) {
        return None;
    }
    let mut depth = 0u32;
    while !level.is_empty() {
        depth += 1;
        let counts: Vec<usize> = level.iter().map(|&v| preds[v as usize].iter().map(|&x| weight(x)).sum()).collect();
        if counts.iter().all(|&c| c == 0) {
            return Some(depth);
        }
        if counts.iter().any(|&c| c != 2) {
            return None;
        }
        level = level.iter().flat_map(|&v| preds[v as usize].iter().copied()).collect();
        level.dedup();
    }
    Some(depth)
}

fn audit_side(
    side: &[bool],
    periodic: &[bool],
    preds: &[Vec<u32>],
    predicted: u32,
    weight: &dyn Fn(u32) -> usize,
) -> TreeAudit {
    let mut passing = 0;
    let mut total = 0;
    let mut failures: std::collections::BTreeMap<String, usize> = Default::default();
    for r in 0..side.len() {
        if !side[r] || !periodic[r] {
            continue;
        }
        total += 1;
        match tree_depth(r as u32, preds, periodic, weight) {
            Some(d) if d == predicted => passing += 1,
            Some(d) => *failures.entry(format!("depth {d}")).or_default() += 1,
            None => *failures.entry("incomplete".into()).or_default() += 1,
        }
    }
    TreeAudit {
        predicted,
        passing,
        periodic: total,
        failures: failures.into_iter().collect(),
        holds: passing == total,
    }
}

fn periodic_count(p: u64, n: usize, k: u64, budget: u64) -> Result<u64, LattesError> {
    let g = FunctionalGraph::build(&psi_map(p, n, k)?, budget)?;
    Ok(g.cyclic_mask().iter().filter(|&&c| c).count() as u64)
}

/// Runs every check for `n = 1..=n_max`.
pub fn lattes_audit(p: u64, n_max: usize, budget: u64) -> Result<LattesReport, LattesError> {
    check_prime(p)?;
    let curve_points = count_curve_points(p)?;
    let trace = p as i64 + 1 - curve_points as i64;
    let pi = frobenius_pi(p, trace)?;
    let roots = square_roots_of_minus_quarter(p);
    let k = roots[0];
    let mut levels = Vec::new();
    for n in 1..=n_max {
        let size = (p as u128).pow(n as u32);
        if size + 1 > budget as u128 {
            return Err(LattesError::BudgetExceeded {
                size: size.to_string(),
                budget,
            });
        }
        levels.push(audit_level(p, n, k, roots[1], &pi, budget)?);
    }
    let hasse_trace_ok = (trace as i128).pow(2) <= 4 * p as i128;
    let passed = hasse_trace_ok
        && levels.iter().all(|l| {
            l.partition_invariant && l.tree_audit.holds && l.side_quarter_bound && l.eighth_bound && l.hasse_ok && l.conjugate_agrees
        });
    Ok(LattesReport {
        p,
        k,
        curve_points,
        trace,
        frobenius: pi.to_string(),
        hasse_trace_ok,
        levels,
        passed,
    })
}

fn audit_level(p: u64, n: usize, k: u64, k_other: u64, pi: &GaussianInt, budget: u64) -> Result<LattesLevel, LattesError> {
    let map = psi_map(p, n, k)?;
    let f = map.field().clone();
    let graph = FunctionalGraph::build(&map, budget)?;
    let index = graph.index();
    let succ = graph.successors();
    let periodic = graph.cyclic_mask();
    let q = f.size().expect("small field");
    let len = succ.len();

    let two = f.from_u64(2);
    let half = (q - 1) / 2;
    let sqrt2 = f.is_one(&f.pow(&two, half));
    let s_set: Vec<u32> = [0i64, 1, -1]
        .iter()
        .map(|&c| {
            // roots of x^3 + x: 0 and the square roots of -1
            if c == 0 {
                index.rank(&ProjPoint::Finite(f.zero()))
            } else {
                let i = (0..p).find(|&t| t * t % p == p - 1).expect("p = 1 mod 4");
                let v = if c == 1 { i } else { p - i };
                index.rank(&ProjPoint::Finite(f.from_u64(v)))
            }
        })
        .collect();
    let in_a: Vec<bool> = (0..len as u32)
        .into_par_iter()
        .map(|r| match index.point(r) {
            ProjPoint::Infinity => sqrt2,
            ProjPoint::Finite(x) => {
                let t = f.add(&f.mul(&f.square(&x), &x), &x);
                let on_curve = t.is_zero() || f.is_one(&f.pow(&t, half));
                on_curve && (sqrt2 || !s_set.contains(&r))
            }
        })
        .collect();
    let partition_invariant = (0..len).all(|r| in_a[r] == in_a[succ[r] as usize]);

    let mut preds: Vec<Vec<u32>> = vec![Vec::new(); len];
    for (r, &s) in succ.iter().enumerate() {
        preds[s as usize].push(r as u32);
    }
    let one = index.rank(&ProjPoint::Finite(f.one()));
    let minus_one = index.rank(&ProjPoint::Finite(f.neg(&f.one())));
    let weight = move |x: u32| if x == one || x == minus_one { 2 } else { 1 };

    let pin = pi.pow(n as u32);
    let v_minus = wp_valuation(&(&pin - &GaussianInt::one()))?;
    let v_plus = wp_valuation(&(&pin + &GaussianInt::one()))?;
    let in_b: Vec<bool> = in_a.iter().map(|&a| !a).collect();
    let audit_a = audit_side(&in_a, &periodic, &preds, v_minus, &weight);
    let audit_b = audit_side(&in_b, &periodic, &preds, v_plus, &weight);
    let (designated, tree_audit, other_side_audit) = if v_minus <= v_plus {
        ('A', audit_a, audit_b)
    } else {
        ('B', audit_b, audit_a)
    };

    let count = |mask: &[bool], extra: &[bool]| mask.iter().zip(extra).filter(|(a, b)| **a && **b).count() as u64;
    let a_count = in_a.iter().filter(|&&a| a).count() as u64;
    let b_count = len as u64 - a_count;
    let a_periodic = count(&in_a, &periodic);
    let b_periodic = count(&in_b, &periodic);
    let periodic_total = a_periodic + b_periodic;
    let (side_count, side_periodic) = if designated == 'A' { (a_count, a_periodic) } else { (b_count, b_periodic) };
    let points = len as u64;
    let hasse_deviation = (a_count as f64 / points as f64 - 0.5).abs();
    let hasse_bound = 2.0 * (p as f64).powf(-(n as f64) / 2.0) + 2.0 / points as f64;
    let conjugate_agrees = periodic_count(p, n, k_other, budget)? == periodic_total;
    Ok(LattesLevel {
        n,
        points,
        sqrt2_in_field: sqrt2,
        v_minus,
        v_plus,
        a_count,
        b_count,
        a_periodic,
        b_periodic,
        periodic: periodic_total,
        proportion: Ratio::new(periodic_total, points),
        partition_invariant,
        designated,
        tree_audit,
        other_side_audit,
        side_quarter_bound: 4 * side_periodic >= side_count,
        eighth_bound: 8 * periodic_total >= points,
        hasse_ok: hasse_deviation <= hasse_bound,
        hasse_deviation,
        hasse_bound,
        conjugate_agrees,
    })
}
