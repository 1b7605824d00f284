//! Critical orbits, ramification portraits and the classification of
//! quadratic maps into Lattès, Chebyshev-conjugate and exceptional cases.

mod census;
mod exceptional;
mod normal_form;
mod portrait;

use serde::Serialize;
use thiserror::Error;

use crate::dynamics::map::hom_roots;
use crate::dynamics::{FieldMap, MapError, ProjPoint};
use crate::field::{build_field, Field, FieldError};

pub use census::{lattes_class_census, CensusClass, LattesCensus};
pub use exceptional::{
    exceptional_quadratic, exceptional_search, is_dynamically_exceptional, lattes_r_certificate,
    post_critical_set, ExceptionalReport, ExceptionalVerdict, LattesCertificate, QuadraticExceptional,
};
pub use normal_form::{quad_normal_form, QuadNormalForm};
pub use portrait::{
    canonical_form, is_lattes_quadratic, ramification_portrait, PortraitShape, PortraitVertex,
    RamificationPortrait,
};

/// Default cap on the extension degree used to locate critical points.
pub const DEFAULT_MAX_EXTENSION: usize = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassifyError {
    #[error("wild ramification: characteristic {p} divides degree {d}")]
    WildRamification { p: u64, d: usize },
    #[error("expected a quadratic map, got degree {0}")]
    WrongDegree(usize),
    #[error("critical points are not rational over extensions of degree <= {bound}")]
    ExtensionBoundExceeded { bound: usize },
    #[error("characteristic 2 is not supported here")]
    EvenCharacteristic,
    #[error("internal inconsistency: Lattès portrait without a weight certificate")]
    NoCertificate,
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Critical points of a map, computed over the least extension containing them.
#[derive(Clone, Debug)]
pub struct CriticalData {
    /// Field over which all critical points are rational.
    pub field: Field,
    /// Degree of `field` over the map's field of definition.
    pub ext_degree: usize,
    /// The map with coefficients moved into `field`.
    pub map: FieldMap,
    /// Each critical point with its ramification index, in rank order.
    pub points: Vec<(ProjPoint, usize)>,
}

impl CriticalData {
    pub fn is_critical(&self, pt: &ProjPoint) -> bool {
        self.points.iter().any(|(c, _)| c == pt)
    }

    pub fn base_degree(&self) -> usize {
        self.field.degree() / self.ext_degree
    }
}

/// Moves `map` into the degree-`k` extension of its field.
pub fn extend_map(map: &FieldMap, k: usize) -> Result<FieldMap, ClassifyError> {
    if k == 1 {
        return Ok(map.clone());
    }
    let base = map.field();
    let ext = build_field(base.characteristic(), base.degree() * k)?;
    let emb = base.embedding_into(&ext)?;
    Ok(map.embed(&ext, &emb))
}

/// Critical points as roots of the Jacobian form; requires `p` not dividing
/// the degree.
pub fn critical_points(map: &FieldMap, max_ext: usize) -> Result<CriticalData, ClassifyError> {
    let d = map.degree();
    let p = map.field().characteristic();
    if d as u64 % p == 0 {
        return Err(ClassifyError::WildRamification { p, d });
    }
    for k in 1..=max_ext {
        let m = extend_map(map, k)?;
        let w = m.wronskian();
        if w.iter().all(|c| c.is_zero()) {
            return Err(ClassifyError::WildRamification { p, d });
        }
        let roots = hom_roots(m.field(), &w);
        let total: usize = roots.iter().map(|(_, k)| k).sum();
        if total == 2 * d - 2 {
            let points = roots
                .into_iter()
                .map(|(pt, _)| {
                    let e = m.ramification_index(&pt);
                    (pt, e)
                })
                .collect();
            return Ok(CriticalData {
                field: m.field().clone(),
                ext_degree: k,
                map: m,
                points,
            });
        }
    }
    Err(ClassifyError::ExtensionBoundExceeded { bound: max_ext })
}

/// The full report produced by the `classify` command.
#[derive(Clone, Debug, Serialize)]
pub struct Classification {
    pub map: String,
    pub field: String,
    pub portrait: RamificationPortrait,
    pub lattes: bool,
    pub chebyshev_conjugate: bool,
    pub exceptional: ExceptionalReport,
    pub normal_form: Option<QuadNormalForm>,
}

/// Runs every classification step on a map.
pub fn classify(map: &FieldMap, max_ext: usize) -> Result<Classification, ClassifyError> {
    let portrait = ramification_portrait(map, max_ext)?;
    let quadratic = map.degree() == 2;
    let lattes = quadratic && portrait.shape.is_lattes();
    let normal_form = if quadratic {
        Some(quad_normal_form(map)?)
    } else {
        None
    };
    Ok(Classification {
        map: map.display(),
        field: map.field().to_string(),
        lattes,
        chebyshev_conjugate: portrait.shape == PortraitShape::Chebyshev,
        exceptional: is_dynamically_exceptional(map, max_ext)?,
        portrait,
        normal_form,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::RationalMap;

    fn reduce(expr: &str, p: u64, n: usize) -> FieldMap {
        RationalMap::parse(expr).unwrap().reduce(&build_field(p, n).unwrap()).unwrap()
    }

    #[test]
    fn critical_points_of_polynomials() {
        let m = reduce("x^2-2", 7, 1);
        let c = critical_points(&m, DEFAULT_MAX_EXTENSION).unwrap();
        let f = &c.field;
        assert_eq!(c.points, vec![(ProjPoint::Finite(f.zero()), 2), (ProjPoint::Infinity, 2)]);
        assert_eq!(c.ext_degree, 1);
    }

    #[test]
    fn critical_points_in_quadratic_extension() {
        // (x^2 + 1)/(x^2 + x + 2) over GF(3)
        let m = reduce("(x^2+1)/(x^2+x+2)", 3, 1);
        let c = critical_points(&m, DEFAULT_MAX_EXTENSION).unwrap();
        assert_eq!(c.points.len(), 2);
        assert!(c.points.iter().all(|(_, e)| *e == 2));
        for (pt, _) in &c.points {
            assert_eq!(c.map.ramification_index(pt), 2);
        }
    }

    #[test]
    fn wild_case_rejected() {
        let m = reduce("x^3+x", 3, 1);
        assert!(matches!(
            critical_points(&m, 4),
            Err(ClassifyError::WildRamification { p: 3, d: 3 })
        ));
    }

    #[test]
    fn every_quadratic_has_two_critical_points() {
        let f = build_field(5, 1).unwrap();
        let mut seen = 0;
        for a in 0..5 {
            for b in 0..5 {
                for c in 0..5 {
                    let num = vec![f.from_u64(a), f.from_u64(b), f.one()];
                    let den = vec![f.from_u64(c), f.one(), f.zero()];
                    let Ok(m) = FieldMap::new(f.clone(), num, den) else {
                        continue;
                    };
                    let cd = critical_points(&m, 4).unwrap();
                    assert_eq!(cd.points.len(), 2);
                    seen += 1;
                }
            }
        }
        assert!(seen > 50);
    }
}
