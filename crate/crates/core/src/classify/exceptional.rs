use std::collections::{HashMap, HashSet};

use serde::Serialize;

use super::portrait::{is_lattes_quadratic, PortraitShape};
use super::{critical_points, ClassifyError, CriticalData};
use crate::dynamics::periodic::is_periodic_point;
use crate::dynamics::{FieldMap, Mobius, ProjPoint};
use crate::field::{Field, FieldElem};

/// Points `φ^k(c)` for critical `c` and `k >= 1`, in discovery order.
pub fn post_critical_set(crit: &CriticalData) -> Vec<ProjPoint> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (c, _) in &crit.points {
        let mut cur = crit.map.eval(c);
        while seen.insert(cur.clone()) {
            out.push(cur.clone());
            cur = crit.map.eval(&cur);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExceptionalVerdict {
    /// The largest set `Γ` with `φ^{-1}(Γ) \ C = Γ`, nonempty.
    Exceptional(Vec<ProjPoint>),
    NotExceptional,
    /// Critical points were not found within the extension bound.
    Unknown,
}

impl ExceptionalVerdict {
    pub fn name(&self) -> &'static str {
        match self {
            ExceptionalVerdict::Exceptional(_) => "exceptional",
            ExceptionalVerdict::NotExceptional => "not_exceptional",
            ExceptionalVerdict::Unknown => "unknown",
        }
    }

    pub fn is_exceptional(&self) -> Option<bool> {
        match self {
            ExceptionalVerdict::Exceptional(_) => Some(true),
            ExceptionalVerdict::NotExceptional => Some(false),
            ExceptionalVerdict::Unknown => None,
        }
    }
}

/// Searches for `Γ` with `φ^{-1}(Γ) \ C = Γ`.
///
/// Any such `Γ` lies in the post-critical set and unions of such sets are
/// again such sets, so the largest one is found by pruning `P \ C` until
/// stable. The answer is exact once the critical points are located.
pub fn exceptional_search(map: &FieldMap, max_ext: usize) -> Result<(ExceptionalVerdict, Option<CriticalData>), ClassifyError> {
    let crit = match critical_points(map, max_ext) {
        Ok(c) => c,
        Err(ClassifyError::ExtensionBoundExceeded { .. }) => return Ok((ExceptionalVerdict::Unknown, None)),
        Err(e) => return Err(e),
    };
    let m = &crit.map;
    let d = m.degree();
    let mut gamma: HashSet<ProjPoint> = post_critical_set(&crit)
        .into_iter()
        .filter(|p| !crit.is_critical(p))
        .collect();
    let mut fibers: HashMap<ProjPoint, Vec<(ProjPoint, usize)>> = HashMap::new();
    loop {
        let mut drop = Vec::new();
        for a in &gamma {
            if !gamma.contains(&m.eval(a)) {
                drop.push(a.clone());
                continue;
            }
            let fib = fibers.entry(a.clone()).or_insert_with(|| m.preimages(a));
            let rational: usize = fib.iter().map(|(_, k)| k).sum();
            let escapes = fib.iter().any(|(b, _)| !crit.is_critical(b) && !gamma.contains(b));
            if rational < d || escapes {
                drop.push(a.clone());
            }
        }
        if drop.is_empty() {
            break;
        }
        for a in drop {
            gamma.remove(&a);
        }
    }
    let verdict = if gamma.is_empty() {
        ExceptionalVerdict::NotExceptional
    } else {
        let mut g: Vec<ProjPoint> = gamma.into_iter().collect();
        g.sort();
        ExceptionalVerdict::Exceptional(g)
    };
    Ok((verdict, Some(crit)))
}

/// Result of the quadratic criterion: Lattès, or a critical point `c` with
/// `c` and `φ(c)` strictly preperiodic and `φ^2(c)` fixed.
#[derive(Clone, Debug)]
pub struct QuadraticExceptional {
    pub shape: PortraitShape,
    pub lattes: bool,
    /// Witness critical point and the parameter `a` of the conjugate
    /// `(x^2 + a)/(x^2 - (a + 2))`, over the critical field.
    pub family: Option<(ProjPoint, FieldElem)>,
    pub field: Field,
}

impl QuadraticExceptional {
    pub fn exceptional(&self) -> bool {
        self.lattes || self.family.is_some()
    }
}

pub fn exceptional_quadratic(map: &FieldMap, max_ext: usize) -> Result<QuadraticExceptional, ClassifyError> {
    let (lattes, shape) = is_lattes_quadratic(map, max_ext)?;
    let crit = critical_points(map, max_ext)?;
    let m = &crit.map;
    let f = &crit.field;
    let mut family = None;
    for (c, _) in &crit.points {
        let c1 = m.eval(c);
        let c2 = m.eval(&c1);
        if is_periodic_point(m, c) || is_periodic_point(m, &c1) || m.eval(&c2) != c2 {
            continue;
        }
        let one = ProjPoint::Finite(f.one());
        let minus_one = ProjPoint::Finite(f.neg(&f.one()));
        let mu = Mobius::three_point(f, [c, &c1, &c2], [&ProjPoint::Infinity, &one, &minus_one])
            .expect("orbit points are distinct");
        let psi = m.conjugate(&mu)?;
        let a = psi.numerator()[0].clone();
        debug_assert_eq!(
            psi,
            FieldMap::quadratic_normal(f, &a, &f.neg(&f.add(&a, &f.from_u64(2)))).unwrap()
        );
        family = Some((c.clone(), a));
        break;
    }
    Ok(QuadraticExceptional {
        shape,
        lattes,
        family,
        field: f.clone(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ExceptionalReport {
    /// `exceptional`, `not_exceptional` or `unknown`.
    pub verdict: String,
    /// The largest exceptional set found by the search, if any.
    pub witness: Vec<String>,
    /// Quadratic criterion: Lattès portrait.
    pub lattes: Option<bool>,
    /// Quadratic criterion: parameter `a` of the conjugate in the family.
    pub family_a: Option<String>,
    /// Whether the quadratic criterion and the search agree.
    pub criteria_agree: Option<bool>,
    #[serde(skip)]
    pub search: ExceptionalVerdict,
}

/// Exceptionality by the quadratic criterion when the degree is two, always
/// cross-checked against the exceptional-set search.
pub fn is_dynamically_exceptional(map: &FieldMap, max_ext: usize) -> Result<ExceptionalReport, ClassifyError> {
    let (search, crit) = exceptional_search(map, max_ext)?;
    let witness = match (&search, &crit) {
        (ExceptionalVerdict::Exceptional(g), Some(c)) => g.iter().map(|p| p.display(&c.field)).collect(),
        _ => Vec::new(),
    };
    if map.degree() == 2 && map.field().characteristic() != 2 {
        let q = exceptional_quadratic(map, max_ext)?;
        let verdict = if q.exceptional() { "exceptional" } else { "not_exceptional" };
        return Ok(ExceptionalReport {
            verdict: verdict.into(),
            witness,
            lattes: Some(q.lattes),
            family_a: q.family.as_ref().map(|(_, a)| q.field.fmt_elem(a)),
            criteria_agree: search.is_exceptional().map(|s| s == q.exceptional()),
            search,
        });
    }
    Ok(ExceptionalReport {
        verdict: search.name().into(),
        witness,
        lattes: None,
        family_a: None,
        criteria_agree: None,
        search,
    })
}

/// Weights `r` with `r(φ(α)) = e(α) r(α)` and `r = 1` off the post-critical set.
#[derive(Clone, Debug, Serialize)]
pub struct LattesCertificate {
    /// `(point, r)` for every post-critical point; all other points have `r = 1`.
    pub weights: Vec<(String, u64)>,
    #[serde(skip)]
    pub raw: Vec<(ProjPoint, u64)>,
}

/// Constructs and verifies the weight function of a Lattès map.
pub fn lattes_r_certificate(map: &FieldMap, max_ext: usize) -> Result<LattesCertificate, ClassifyError> {
    let crit = critical_points(map, max_ext)?;
    let m = &crit.map;
    let d = m.degree();
    let post: Vec<ProjPoint> = post_critical_set(&crit);
    let in_post: HashSet<&ProjPoint> = post.iter().collect();
    let e_of = |a: &ProjPoint| crit.points.iter().find(|(c, _)| c == a).map_or(1, |(_, e)| *e as u64);
    let mut r: HashMap<ProjPoint, u64> = HashMap::new();
    let r_of = |r: &HashMap<ProjPoint, u64>, a: &ProjPoint| -> Option<u64> {
        if in_post.contains(a) {
            r.get(a).copied()
        } else {
            Some(1)
        }
    };
    let fibers: HashMap<&ProjPoint, Vec<(ProjPoint, usize)>> = post.iter().map(|b| (b, m.preimages(b))).collect();
    loop {
        let mut progress = false;
        for b in &post {
            if r.contains_key(b) {
                continue;
            }
            if let Some(v) = fibers[b].iter().find_map(|(a, _)| r_of(&r, a).map(|ra| e_of(a) * ra)) {
                r.insert(b.clone(), v);
                progress = true;
            }
        }
        if !progress {
            break;
        }
    }
    if r.len() != post.len() {
        return Err(ClassifyError::NoCertificate);
    }
    for b in &post {
        let rb = r[b];
        let fib = &fibers[b];
        let rational: usize = fib.iter().map(|(_, k)| k).sum();
        // preimages outside the field are neither critical nor post-critical
        if rational < d && rb != 1 {
            return Err(ClassifyError::NoCertificate);
        }
        for (a, _) in fib {
            if e_of(a) * r_of(&r, a).unwrap() != rb {
                return Err(ClassifyError::NoCertificate);
            }
        }
    }
    let mut raw: Vec<(ProjPoint, u64)> = post.iter().map(|p| (p.clone(), r[p])).collect();
    raw.sort();
    Ok(LattesCertificate {
        weights: raw.iter().map(|(p, v)| (p.display(&crit.field), *v)).collect(),
        raw,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::DEFAULT_MAX_EXTENSION;
    use crate::dynamics::RationalMap;
    use crate::field::build_field;

    fn reduce(expr: &str, p: u64) -> FieldMap {
        RationalMap::parse(expr).unwrap().reduce(&build_field(p, 1).unwrap()).unwrap()
    }

    #[test]
    fn chebyshev_family_parameter() {
        let m = reduce("x^2-2", 7);
        let q = exceptional_quadratic(&m, DEFAULT_MAX_EXTENSION).unwrap();
        assert!(!q.lattes);
        let (c, a) = q.family.unwrap();
        assert_eq!(c, ProjPoint::Finite(q.field.zero()));
        assert!(a.is_zero());
        let rep = is_dynamically_exceptional(&m, DEFAULT_MAX_EXTENSION).unwrap();
        assert_eq!(rep.verdict, "exceptional");
        assert_eq!(rep.criteria_agree, Some(true));
        // Γ = {-2, 2}
        assert_eq!(rep.witness, vec!["2", "5"]);
    }

    #[test]
    fn power_map_is_not_exceptional() {
        let m = reduce("x^2", 5);
        let rep = is_dynamically_exceptional(&m, 6).unwrap();
        assert_eq!(rep.verdict, "not_exceptional");
        assert_eq!(rep.criteria_agree, Some(true));
    }

    #[test]
    fn basilica_map_is_not_exceptional() {
        let m = reduce("x^2-1", 3);
        let rep = is_dynamically_exceptional(&m, DEFAULT_MAX_EXTENSION).unwrap();
        assert_eq!(rep.verdict, "not_exceptional");
        assert_eq!(rep.criteria_agree, Some(true));
    }

    #[test]
    fn certificate_for_critical_chain() {
        let m = reduce("(x^2-2)/x^2", 7);
        let cert = lattes_r_certificate(&m, DEFAULT_MAX_EXTENSION).unwrap();
        // ∞ -> 2, 1 -> 4, -1 -> 4
        assert_eq!(
            cert.weights,
            vec![("1".to_string(), 4), ("6".to_string(), 4), ("inf".to_string(), 2)]
        );
        let rep = is_dynamically_exceptional(&m, DEFAULT_MAX_EXTENSION).unwrap();
        assert_eq!(rep.lattes, Some(true));
        assert_eq!(rep.criteria_agree, Some(true));
    }

    #[test]
    fn no_certificate_for_non_lattes() {
        assert!(matches!(
            lattes_r_certificate(&reduce("x^2-1", 5), DEFAULT_MAX_EXTENSION),
            Err(ClassifyError::NoCertificate)
        ));
    }

    #[test]
    fn search_in_higher_degree() {
        // Chebyshev of degree 3: T3 = x^3 - 3x, exceptional set {2, -2}
        let m = reduce("x^3-3x", 7);
        let (v, _) = exceptional_search(&m, DEFAULT_MAX_EXTENSION).unwrap();
        assert!(matches!(v, ExceptionalVerdict::Exceptional(ref g) if g.len() == 2));
        let (v, _) = exceptional_search(&reduce("x^3+x+1", 7), DEFAULT_MAX_EXTENSION).unwrap();
        assert_ne!(v, ExceptionalVerdict::Unknown);
    }
}
