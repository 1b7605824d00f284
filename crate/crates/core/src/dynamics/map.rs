//! Rational self-maps of the projective line.
//!
//! [`RationalMap`] keeps exact integer coefficients so it can be reduced modulo
//! any prime. [`FieldMap`] is the reduced homogeneous pair `(F(X,Y), G(X,Y))`
//! over a concrete field, normalized so the leading nonzero coefficient of `F`
//! is one.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::expr::parse_fraction;
use super::intpoly::{self, IntPoly};
use super::MapError;
use crate::field::{Embedding, Field, FieldCtx, FieldElem, Poly};

/// A point of `P^1` over some field; finite points are stored affinely.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProjPoint {
    Finite(FieldElem),
    Infinity,
}

impl ProjPoint {
    pub fn is_infinity(&self) -> bool {
        matches!(self, ProjPoint::Infinity)
    }

    pub fn display(&self, f: &FieldCtx) -> String {
        match self {
            ProjPoint::Finite(e) => f.fmt_elem(e),
            ProjPoint::Infinity => "inf".to_string(),
        }
    }
}

/// A map with integer coefficients, `num(x)/den(x)` in lowest terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMap {
    num: IntPoly,
    den: IntPoly,
    source: String,
}

impl RationalMap {
    /// Parses an expression; see [`super::expr`] for the grammar.
    pub fn parse(src: &str) -> Result<Self, MapError> {
        let (num, den) = parse_fraction(src)?;
        Self::from_polys(num, den, src.trim().to_string())
    }

    /// Builds `num/den` from little-endian integer coefficients.
    pub fn from_coeffs(num: &[i64], den: &[i64]) -> Result<Self, MapError> {
        let num = intpoly::trim(num.iter().map(|&c| BigInt::from(c)).collect());
        let den = intpoly::trim(den.iter().map(|&c| BigInt::from(c)).collect());
        let source = format!("({})/({})", fmt_int_poly(&num), fmt_int_poly(&den));
        Self::from_polys(num, den, source)
    }

    fn from_polys(num: IntPoly, den: IntPoly, source: String) -> Result<Self, MapError> {
        if den.is_empty() {
            return Err(MapError::Parse {
                pos: 0,
                msg: "denominator is zero".into(),
            });
        }
        let g = intpoly::gcd(&num, &den);
        let (mut num, mut den) = if num.is_empty() || intpoly::is_constant_one(&g) {
            (num, den)
        } else {
            (intpoly::div_exact(&num, &g), intpoly::div_exact(&den, &g))
        };
        let c = intpoly::content(&num).gcd_with(&intpoly::content(&den));
        if !c.is_zero() && c != BigInt::from(1) {
            num = num.iter().map(|x| x / &c).collect();
            den = den.iter().map(|x| x / &c).collect();
        }
        if den.last().unwrap().is_negative() {
            num = intpoly::neg(&num);
            den = intpoly::neg(&den);
        }
        let map = RationalMap { num, den, source };
        if map.degree() == 0 {
            return Err(MapError::Constant);
        }
        Ok(map)
    }

    pub fn degree(&self) -> usize {
        intpoly::degree(&self.num)
            .unwrap_or(0)
            .max(intpoly::degree(&self.den).unwrap_or(0))
    }

    pub fn numerator(&self) -> &[BigInt] {
        &self.num
    }

    pub fn denominator(&self) -> &[BigInt] {
        &self.den
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// Reduces modulo the characteristic of `field`.
    pub fn reduce(&self, field: &Field) -> Result<FieldMap, MapError> {
        let d = self.degree();
        let conv = |poly: &IntPoly| -> Vec<FieldElem> {
            (0..=d)
                .map(|i| poly.get(i).map_or_else(|| field.zero(), |c| field.from_bigint(c)))
                .collect()
        };
        FieldMap::new(field.clone(), conv(&self.num), conv(&self.den))
    }
}

trait GcdWith {
    fn gcd_with(&self, o: &BigInt) -> BigInt;
}

impl GcdWith for BigInt {
    fn gcd_with(&self, o: &BigInt) -> BigInt {
        num_integer::Integer::gcd(self, o)
    }
}

fn fmt_int_poly(p: &IntPoly) -> String {
    if p.is_empty() {
        return "0".into();
    }
    let mut s = String::new();
    for (i, c) in p.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        let a = c.abs();
        if !s.is_empty() {
            s.push_str(if neg { "-" } else { "+" });
        } else if neg {
            s.push('-');
        }
        let one = a == BigInt::from(1);
        match i {
            0 => s.push_str(&a.to_string()),
            1 if one => s.push('x'),
            1 => s.push_str(&format!("{a}*x")),
            _ if one => s.push_str(&format!("x^{i}")),
            _ => s.push_str(&format!("{a}*x^{i}")),
        }
    }
    s
}

impl fmt::Display for RationalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.len() == 1 && self.den[0] == BigInt::from(1) {
            write!(f, "{}", fmt_int_poly(&self.num))
        } else {
            write!(f, "({})/({})", fmt_int_poly(&self.num), fmt_int_poly(&self.den))
        }
    }
}

/// Homogeneous polynomial of degree `len - 1`: entry `i` is the coefficient
/// of `X^i Y^{deg-i}`.
pub type HomPoly = Vec<FieldElem>;

fn hom_mul(f: &FieldCtx, a: &[FieldElem], b: &[FieldElem]) -> HomPoly {
    let mut r = vec![f.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            r[i + j] = f.add(&r[i + j], &f.mul(x, y));
        }
    }
    r
}

fn hom_add(f: &FieldCtx, a: &[FieldElem], b: &[FieldElem]) -> HomPoly {
    a.iter().zip(b).map(|(x, y)| f.add(x, y)).collect()
}

fn hom_scale(f: &FieldCtx, a: &[FieldElem], c: &FieldElem) -> HomPoly {
    a.iter().map(|x| f.mul(x, c)).collect()
}

/// Substitutes linear forms: `P(l1, l2)` where `l = [coef of Y, coef of X]`.
fn hom_substitute(f: &FieldCtx, p: &[FieldElem], l1: &[FieldElem], l2: &[FieldElem]) -> HomPoly {
    let d = p.len() - 1;
    let mut pow1 = vec![vec![f.one()]];
    let mut pow2 = vec![vec![f.one()]];
    for k in 0..d {
        pow1.push(hom_mul(f, &pow1[k], l1));
        pow2.push(hom_mul(f, &pow2[k], l2));
    }
    let mut acc = vec![f.zero(); d + 1];
    for (i, c) in p.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let term = hom_mul(f, &pow1[i], &pow2[d - i]);
        acc = hom_add(f, &acc, &hom_scale(f, &term, c));
    }
    acc
}

/// Determinant over a field by Gaussian elimination.
fn determinant(f: &FieldCtx, mut m: Vec<Vec<FieldElem>>) -> FieldElem {
    let n = m.len();
    let mut det = f.one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return f.zero();
        };
        if piv != col {
            m.swap(piv, col);
            det = f.neg(&det);
        }
        det = f.mul(&det, &m[col][col]);
        let inv = f.inv(&m[col][col]).unwrap();
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = f.mul(&m[r][col], &inv);
            for c in col..n {
                let t = f.mul(&factor, &m[col][c]);
                m[r][c] = f.sub(&m[r][c], &t);
            }
        }
    }
    det
}

/// Homogeneous resultant of two degree-`d` forms via the Sylvester matrix.
pub fn homogeneous_resultant(f: &FieldCtx, a: &[FieldElem], b: &[FieldElem]) -> FieldElem {
    let d = a.len() - 1;
    assert_eq!(b.len(), d + 1);
    let size = 2 * d;
    let mut rows = Vec::with_capacity(size);
    for poly in [a, b] {
        for shift in 0..d {
            let mut row = vec![f.zero(); size];
            // descending powers of X
            for (k, c) in poly.iter().rev().enumerate() {
                row[shift + k] = c.clone();
            }
            rows.push(row);
        }
    }
    determinant(f, rows)
}

/// A Möbius transformation `(X:Y) -> (aX + bY : cX + dY)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mobius {
    pub a: FieldElem,
    pub b: FieldElem,
    pub c: FieldElem,
    pub d: FieldElem,
}

impl Mobius {
    pub fn identity(f: &FieldCtx) -> Self {
        Mobius {
            a: f.one(),
            b: f.zero(),
            c: f.zero(),
            d: f.one(),
        }
    }

    pub fn determinant(&self, f: &FieldCtx) -> FieldElem {
        f.sub(&f.mul(&self.a, &self.d), &f.mul(&self.b, &self.c))
    }

    /// The adjugate, which represents the inverse transformation.
    pub fn inverse(&self, f: &FieldCtx) -> Self {
        Mobius {
            a: self.d.clone(),
            b: f.neg(&self.b),
            c: f.neg(&self.c),
            d: self.a.clone(),
        }
    }

    /// `self ∘ other`
    pub fn compose(&self, f: &FieldCtx, o: &Mobius) -> Self {
        let m = |x: &FieldElem, y: &FieldElem, z: &FieldElem, w: &FieldElem| {
            f.add(&f.mul(x, y), &f.mul(z, w))
        };
        Mobius {
            a: m(&self.a, &o.a, &self.b, &o.c),
            b: m(&self.a, &o.b, &self.b, &o.d),
            c: m(&self.c, &o.a, &self.d, &o.c),
            d: m(&self.c, &o.b, &self.d, &o.d),
        }
    }

    pub fn apply(&self, f: &FieldCtx, pt: &ProjPoint) -> ProjPoint {
        let (x, y) = match pt {
            ProjPoint::Finite(x) => (x.clone(), f.one()),
            ProjPoint::Infinity => (f.one(), f.zero()),
        };
        let nx = f.add(&f.mul(&self.a, &x), &f.mul(&self.b, &y));
        let ny = f.add(&f.mul(&self.c, &x), &f.mul(&self.d, &y));
        to_affine(f, nx, ny)
    }

    /// The unique transformation sending `p0, p1, p2` to `0, 1, inf`.
    pub fn to_standard(f: &FieldCtx, p0: &ProjPoint, p1: &ProjPoint, p2: &ProjPoint) -> Option<Self> {
        // x -> (x - p0)(p1 - p2) / ((x - p2)(p1 - p0)), written homogeneously
        let hom = |p: &ProjPoint| match p {
            ProjPoint::Finite(x) => (x.clone(), f.one()),
            ProjPoint::Infinity => (f.one(), f.zero()),
        };
        let (x0, y0) = hom(p0);
        let (x1, y1) = hom(p1);
        let (x2, y2) = hom(p2);
        // linear form vanishing at (x0:y0): y0*X - x0*Y
        let l0 = (y0.clone(), f.neg(&x0));
        let l2 = (y2.clone(), f.neg(&x2));
        let eval = |l: &(FieldElem, FieldElem), x: &FieldElem, y: &FieldElem| {
            f.add(&f.mul(&l.0, x), &f.mul(&l.1, y))
        };
        let s = eval(&l2, &x1, &y1);
        let t = eval(&l0, &x1, &y1);
        // numerator s*l0, denominator t*l2
        let m = Mobius {
            a: f.mul(&s, &l0.0),
            b: f.mul(&s, &l0.1),
            c: f.mul(&t, &l2.0),
            d: f.mul(&t, &l2.1),
        };
        if m.determinant(f).is_zero() {
            None
        } else {
            Some(m)
        }
    }

    /// The transformation sending `p0, p1, p2` to `q0, q1, q2`.
    pub fn three_point(f: &FieldCtx, from: [&ProjPoint; 3], to: [&ProjPoint; 3]) -> Option<Self> {
        let a = Self::to_standard(f, from[0], from[1], from[2])?;
        let b = Self::to_standard(f, to[0], to[1], to[2])?;
        Some(b.inverse(f).compose(f, &a))
    }
}

fn to_affine(f: &FieldCtx, x: FieldElem, y: FieldElem) -> ProjPoint {
    if y.is_zero() {
        ProjPoint::Infinity
    } else {
        ProjPoint::Finite(f.mul(&x, &f.inv(&y).unwrap()))
    }
}

/// A morphism `P^1 -> P^1` over a concrete field.
#[derive(Clone, Debug)]
pub struct FieldMap {
    field: Field,
    /// coefficient `i` is that of `X^i Y^{d-i}`
    num: HomPoly,
    den: HomPoly,
}

impl PartialEq for FieldMap {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.num == other.num && self.den == other.den
    }
}

impl FieldMap {
    /// Builds and normalizes the pair; fails when the resultant vanishes.
    pub fn new(field: Field, num: HomPoly, den: HomPoly) -> Result<Self, MapError> {
        assert_eq!(num.len(), den.len(), "homogeneous parts must share a degree");
        let d = num.len() - 1;
        if d == 0 {
            return Err(MapError::Constant);
        }
        let res = homogeneous_resultant(&field, &num, &den);
        if res.is_zero() {
            return Err(MapError::BadReduction {
                p: field.characteristic(),
            });
        }
        let lead = num
            .iter()
            .rev()
            .find(|c| !c.is_zero())
            .map(|c| field.inv(c).unwrap())
            .unwrap_or_else(|| field.inv(den.iter().rev().find(|c| !c.is_zero()).unwrap()).unwrap());
        let num = hom_scale(&field, &num, &lead);
        let den = hom_scale(&field, &den, &lead);
        Ok(FieldMap { field, num, den })
    }

    /// `(x^2 + a)/(x^2 + b)`
    pub fn quadratic_normal(field: &Field, a: &FieldElem, b: &FieldElem) -> Result<Self, MapError> {
        FieldMap::new(
            field.clone(),
            vec![a.clone(), field.zero(), field.one()],
            vec![b.clone(), field.zero(), field.one()],
        )
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn degree(&self) -> usize {
        self.num.len() - 1
    }

    pub fn numerator(&self) -> &[FieldElem] {
        &self.num
    }

    pub fn denominator(&self) -> &[FieldElem] {
        &self.den
    }

    /// Affine numerator `F(x, 1)` as a polynomial.
    pub fn affine_num(&self) -> Poly {
        Poly::new(self.num.clone())
    }

    pub fn affine_den(&self) -> Poly {
        Poly::new(self.den.clone())
    }

    /// Evaluates the homogeneous pair at a point.
    pub fn eval_hom(&self, pt: &ProjPoint) -> (FieldElem, FieldElem) {
        let f = &*self.field;
        match pt {
            ProjPoint::Finite(x) => {
                let mut a = f.zero();
                let mut b = f.zero();
                for i in (0..self.num.len()).rev() {
                    a = f.add(&f.mul(&a, x), &self.num[i]);
                    b = f.add(&f.mul(&b, x), &self.den[i]);
                }
                (a, b)
            }
            ProjPoint::Infinity => (self.num.last().unwrap().clone(), self.den.last().unwrap().clone()),
        }
    }

    pub fn eval(&self, pt: &ProjPoint) -> ProjPoint {
        let (a, b) = self.eval_hom(pt);
        debug_assert!(!(a.is_zero() && b.is_zero()), "good reduction forbids 0/0");
        to_affine(&self.field, a, b)
    }

    /// `self ∘ self ∘ ...` applied `n` times.
    pub fn iterate(&self, pt: &ProjPoint, n: usize) -> ProjPoint {
        let mut cur = pt.clone();
        for _ in 0..n {
            cur = self.eval(&cur);
        }
        cur
    }

    /// `mu ∘ self ∘ mu^{-1}`.
    pub fn conjugate(&self, mu: &Mobius) -> Result<FieldMap, MapError> {
        let f = &*self.field;
        let inv = mu.inverse(f);
        // forms in (X, Y) ordered as [coef of Y, coef of X]
        let l1 = vec![inv.b.clone(), inv.a.clone()];
        let l2 = vec![inv.d.clone(), inv.c.clone()];
        let fs = hom_substitute(f, &self.num, &l1, &l2);
        let gs = hom_substitute(f, &self.den, &l1, &l2);
        let num = hom_add(f, &hom_scale(f, &fs, &mu.a), &hom_scale(f, &gs, &mu.b));
        let den = hom_add(f, &hom_scale(f, &fs, &mu.c), &hom_scale(f, &gs, &mu.d));
        FieldMap::new(self.field.clone(), num, den)
    }

    /// Maps the coefficients into a larger field.
    pub fn embed(&self, target: &Field, emb: &Embedding) -> FieldMap {
        let conv = |v: &[FieldElem]| -> HomPoly {
            v.iter().map(|c| emb.apply(&self.field, target, c)).collect()
        };
        FieldMap::new(target.clone(), conv(&self.num), conv(&self.den))
            .expect("good reduction is preserved by field extension")
    }

    /// `F(X,Y) * G_b - G(X,Y) * F_b` where `(F_b : G_b)` represents `beta`;
    /// its roots are the preimages of `beta` with multiplicity.
    pub fn fiber_form(&self, beta: &ProjPoint) -> HomPoly {
        let f = &*self.field;
        let (fb, gb) = match beta {
            ProjPoint::Finite(b) => (b.clone(), f.one()),
            ProjPoint::Infinity => (f.one(), f.zero()),
        };
        self.num
            .iter()
            .zip(&self.den)
            .map(|(fi, gi)| f.sub(&f.mul(fi, &gb), &f.mul(gi, &fb)))
            .collect()
    }

    /// Preimages of `beta` that are rational over this field, with
    /// multiplicities. They sum to the degree iff the fiber is fully rational.
    pub fn preimages(&self, beta: &ProjPoint) -> Vec<(ProjPoint, usize)> {
        hom_roots(&self.field, &self.fiber_form(beta))
    }

    /// Ramification index `e(alpha)`: multiplicity of `alpha` in its fiber.
    pub fn ramification_index(&self, alpha: &ProjPoint) -> usize {
        let beta = self.eval(alpha);
        hom_root_multiplicity(&self.field, &self.fiber_form(&beta), alpha)
    }

    /// The Jacobian `F_X G_Y - F_Y G_X`, a form of degree `2d - 2` whose roots
    /// are the critical points in the tame case.
    pub fn wronskian(&self) -> HomPoly {
        let f = &*self.field;
        let d = self.degree();
        let dx = |p: &[FieldElem]| -> HomPoly {
            (1..=d).map(|i| f.scale(&p[i], i as u64)).collect()
        };
        let dy = |p: &[FieldElem]| -> HomPoly {
            (0..d).map(|i| f.scale(&p[i], (d - i) as u64)).collect()
        };
        let a = hom_mul(f, &dx(&self.num), &dy(&self.den));
        let b = hom_mul(f, &dy(&self.num), &dx(&self.den));
        a.iter().zip(&b).map(|(x, y)| f.sub(x, y)).collect()
    }

    pub fn display(&self) -> String {
        let f = &*self.field;
        let show = |p: &[FieldElem]| -> String {
            let mut terms = Vec::new();
            for (i, c) in p.iter().enumerate().rev() {
                if c.is_zero() {
                    continue;
                }
                let cs = f.fmt_elem(c);
                let cs = if cs.contains('+') { format!("({cs})") } else { cs };
                terms.push(match (i, f.is_one(c)) {
                    (0, _) => cs,
                    (1, true) => "x".into(),
                    (1, false) => format!("{cs}*x"),
                    (_, true) => format!("x^{i}"),
                    (_, false) => format!("{cs}*x^{i}"),
                });
            }
            if terms.is_empty() {
                "0".into()
            } else {
                terms.join(" + ")
            }
        };
        format!("({})/({})", show(&self.num), show(&self.den))
    }
}

/// Projective roots of a homogeneous form over its field, with multiplicity.
pub fn hom_roots(f: &FieldCtx, form: &[FieldElem]) -> Vec<(ProjPoint, usize)> {
    let d = form.len() - 1;
    let affine = Poly::new(form.to_vec());
    let mut out: Vec<(ProjPoint, usize)> = affine
        .roots_with_multiplicity(f)
        .into_iter()
        .map(|(r, k)| (ProjPoint::Finite(r), k))
        .collect();
    let inf = d - affine.degree().unwrap_or(0);
    if !affine.is_zero() && inf > 0 {
        out.push((ProjPoint::Infinity, inf));
    }
    out
}

pub fn hom_root_multiplicity(f: &FieldCtx, form: &[FieldElem], pt: &ProjPoint) -> usize {
    let affine = Poly::new(form.to_vec());
    match pt {
        ProjPoint::Finite(x) => affine.root_multiplicity(f, x),
        ProjPoint::Infinity => (form.len() - 1) - affine.degree().unwrap_or(0),
    }
}
