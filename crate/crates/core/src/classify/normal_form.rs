use serde::ser::{Serialize, SerializeStruct, Serializer};

use super::{critical_points, ClassifyError, DEFAULT_MAX_EXTENSION};
use crate::dynamics::{FieldMap, Mobius, ProjPoint};
use crate::field::{Field, FieldElem};

/// Normal form of a quadratic map up to conjugacy over the algebraic closure.
#[derive(Clone, Debug)]
pub enum QuadNormalForm {
    /// Conjugate to `x^2` (critical points fixed) or `x^-2` (swapped).
    Power { swapped: bool },
    /// Conjugate to `(x^2 + a)/(x^2 + b)`.
    Params(NormalParams),
}

#[derive(Clone, Debug)]
pub struct NormalParams {
    /// Field containing the critical points, over which `a` and `b` live.
    pub field: Field,
    pub a: FieldElem,
    pub b: FieldElem,
    /// `conjugator ∘ φ ∘ conjugator^{-1} = (x^2 + a)/(x^2 + b)`.
    pub conjugator: Mobius,
    /// The other representative `(a^2/b^3, a/b^2)`, present when `ab != 0`.
    pub alternate: Option<(FieldElem, FieldElem)>,
}

impl NormalParams {
    pub fn representatives(&self) -> Vec<(FieldElem, FieldElem)> {
        let mut v = vec![(self.a.clone(), self.b.clone())];
        if let Some(alt) = &self.alternate {
            if alt != &v[0] {
                v.push(alt.clone());
            }
        }
        v.sort();
        v
    }
}

impl QuadNormalForm {
    /// Conjugacy test for two normal forms over the same field.
    pub fn conjugate_to(&self, other: &QuadNormalForm) -> bool {
        match (self, other) {
            (QuadNormalForm::Power { swapped: a }, QuadNormalForm::Power { swapped: b }) => a == b,
            (QuadNormalForm::Params(x), QuadNormalForm::Params(y)) => {
                assert!(x.field == y.field, "normal forms must share a field");
                let ry = y.representatives();
                x.representatives().iter().any(|r| ry.contains(r))
            }
            _ => false,
        }
    }

    pub fn params(&self) -> Option<&NormalParams> {
        match self {
            QuadNormalForm::Params(p) => Some(p),
            QuadNormalForm::Power { .. } => None,
        }
    }
}

impl Serialize for QuadNormalForm {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            QuadNormalForm::Power { swapped } => {
                let mut st = s.serialize_struct("QuadNormalForm", 2)?;
                st.serialize_field("kind", "power")?;
                st.serialize_field("exponent", if *swapped { &-2 } else { &2 })?;
                st.end()
            }
            QuadNormalForm::Params(p) => {
                let f = &p.field;
                let mut st = s.serialize_struct("QuadNormalForm", 5)?;
                st.serialize_field("kind", "params")?;
                st.serialize_field("field", &f.to_string())?;
                st.serialize_field("a", &f.fmt_elem(&p.a))?;
                st.serialize_field("b", &f.fmt_elem(&p.b))?;
                st.serialize_field(
                    "alternate",
                    &p.alternate.as_ref().map(|(x, y)| [f.fmt_elem(x), f.fmt_elem(y)]),
                )?;
                st.end()
            }
        }
    }
}

/// Sends the critical points to `0` and `∞`, then scales so `φ(∞) = 1`.
pub fn quad_normal_form(map: &FieldMap) -> Result<QuadNormalForm, ClassifyError> {
    if map.degree() != 2 {
        return Err(ClassifyError::WrongDegree(map.degree()));
    }
    if map.field().characteristic() == 2 {
        return Err(ClassifyError::EvenCharacteristic);
    }
    let crit = critical_points(map, DEFAULT_MAX_EXTENSION)?;
    let m = &crit.map;
    let f = &crit.field;
    let cs: Vec<ProjPoint> = crit.points.iter().map(|(c, _)| c.clone()).collect();
    debug_assert_eq!(cs.len(), 2);
    // prefer sending the higher-ranked critical point to ∞, so maps already
    // in normal form are left alone
    let Some(i) = [1usize, 0].into_iter().find(|&i| !crit.is_critical(&m.eval(&cs[i]))) else {
        return Ok(QuadNormalForm::Power {
            swapped: m.eval(&cs[0]) == cs[1],
        });
    };
    let (c, other) = (&cs[i], &cs[1 - i]);
    let image = m.eval(c);
    let zero = ProjPoint::Finite(f.zero());
    let one = ProjPoint::Finite(f.one());
    let mu = Mobius::three_point(f, [c, other, &image], [&ProjPoint::Infinity, &zero, &one])
        .expect("critical points and the image are distinct");
    let psi = m.conjugate(&mu)?;
    let (num, den) = (psi.numerator(), psi.denominator());
    debug_assert!(num[1].is_zero() && den[1].is_zero() && f.is_one(&num[2]) && f.is_one(&den[2]));
    let a = num[0].clone();
    let b = den[0].clone();
    let alternate = if a.is_zero() || b.is_zero() {
        None
    } else {
        let b2 = f.mul(&b, &b);
        let b3 = f.mul(&b2, &b);
        Some((
            f.div(&f.mul(&a, &a), &b3).unwrap(),
            f.div(&a, &b2).unwrap(),
        ))
    };
    Ok(QuadNormalForm::Params(NormalParams {
        field: f.clone(),
        a,
        b,
        conjugator: mu,
        alternate,
    }))
}
