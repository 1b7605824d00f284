use std::collections::HashMap;

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::{critical_points, ClassifyError, CriticalData};
use crate::dynamics::{FieldMap, ProjPoint};

/// Named portrait shapes of quadratic maps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PortraitShape {
    /// `c -> c' -> n -> f`, `f` fixed.
    CriticalChain,
    /// A fixed critical point, plus `c -> n -> f` with `f` fixed.
    Chebyshev,
    /// Two disjoint copies of `c -> n -> f` with `f` fixed.
    TwoFixedTails,
    /// `c -> n -> m1 <-> m2 <- n' <- c'`.
    TwoCycle,
    /// `c -> n -> m`, `c' -> n' -> m`, `m -> f` with `f` fixed.
    MergedTails,
    /// Both critical points fixed or exchanged, as for `x^2` and `x^-2`.
    Power,
    Other,
}

impl PortraitShape {
    pub fn name(self) -> &'static str {
        match self {
            PortraitShape::CriticalChain => "critical_chain",
            PortraitShape::Chebyshev => "chebyshev",
            PortraitShape::TwoFixedTails => "two_fixed_tails",
            PortraitShape::TwoCycle => "two_cycle",
            PortraitShape::MergedTails => "merged_tails",
            PortraitShape::Power => "power",
            PortraitShape::Other => "other",
        }
    }

    /// Shapes that occur exactly for quadratic Lattès maps.
    pub fn is_lattes(self) -> bool {
        matches!(
            self,
            PortraitShape::CriticalChain
                | PortraitShape::TwoFixedTails
                | PortraitShape::TwoCycle
                | PortraitShape::MergedTails
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PortraitVertex {
    pub point: String,
    pub critical: bool,
    /// Label of the outgoing edge.
    pub ramification: usize,
    /// Degree of the point over the map's field of definition.
    pub degree: usize,
    pub next: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct RamificationPortrait {
    pub vertices: Vec<PortraitVertex>,
    /// Isomorphism-invariant encoding of the labeled graph.
    pub canonical: String,
    /// SHA-256 of `canonical`, hex encoded.
    pub hash: String,
    pub shape: PortraitShape,
    #[serde(skip)]
    pub points: Vec<ProjPoint>,
    #[serde(skip)]
    pub critical: CriticalData,
}

impl PartialEq for RamificationPortrait {
    fn eq(&self, other: &Self) -> bool {
        self.canonical == other.canonical
    }
}

/// Canonical string of a functional graph with integer vertex labels.
///
/// Trees hanging off cycles are encoded bottom-up with sorted children; each
/// cycle takes its lexicographically least rotation and components are sorted.
pub fn canonical_form(succ: &[usize], labels: &[usize]) -> String {
    let n = succ.len();
    let mut indeg = vec![0usize; n];
    for &s in succ {
        indeg[s] += 1;
    }
    let mut on_cycle = vec![true; n];
    let mut stack: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    while let Some(v) = stack.pop() {
        on_cycle[v] = false;
        indeg[succ[v]] -= 1;
        if indeg[succ[v]] == 0 {
            stack.push(succ[v]);
        }
    }
    let mut children = vec![Vec::new(); n];
    for v in 0..n {
        if !on_cycle[v] {
            children[succ[v]].push(v);
        }
    }
    fn tree(v: usize, labels: &[usize], children: &[Vec<usize>]) -> String {
        let mut kids: Vec<String> = children[v].iter().map(|&c| tree(c, labels, children)).collect();
        kids.sort();
        format!("({}{})", labels[v], kids.concat())
    }
    let mut seen = vec![false; n];
    let mut comps = Vec::new();
    for start in 0..n {
        if !on_cycle[start] || seen[start] {
            continue;
        }
        let mut cyc = Vec::new();
        let mut v = start;
        while !seen[v] {
            seen[v] = true;
            cyc.push(tree(v, labels, &children));
            v = succ[v];
        }
        let best = (0..cyc.len())
            .map(|r| {
                let mut rot = cyc[r..].to_vec();
                rot.extend_from_slice(&cyc[..r]);
                rot.concat()
            })
            .min()
            .unwrap();
        comps.push(format!("[{best}]"));
    }
    comps.sort();
    comps.concat()
}

fn shape_templates() -> Vec<(PortraitShape, String)> {
    let t = |succ: &[usize], labels: &[usize]| canonical_form(succ, labels);
    vec![
        (PortraitShape::CriticalChain, t(&[1, 2, 3, 3], &[2, 2, 1, 1])),
        (PortraitShape::Chebyshev, t(&[0, 2, 3, 3], &[2, 2, 1, 1])),
        (
            PortraitShape::TwoFixedTails,
            t(&[1, 2, 2, 4, 5, 5], &[2, 1, 1, 2, 1, 1]),
        ),
        (PortraitShape::TwoCycle, t(&[1, 2, 3, 2, 3, 4], &[2, 1, 1, 1, 1, 2])),
        (
            PortraitShape::MergedTails,
            t(&[1, 2, 3, 3, 5, 2], &[2, 1, 1, 1, 2, 1]),
        ),
        (PortraitShape::Power, t(&[0, 1], &[2, 2])),
        (PortraitShape::Power, t(&[1, 0], &[2, 2])),
    ]
}

fn identify(canonical: &str) -> PortraitShape {
    shape_templates()
        .into_iter()
        .find(|(_, c)| c == canonical)
        .map_or(PortraitShape::Other, |(s, _)| s)
}

/// Builds the portrait over the least extension containing the critical points.
pub fn ramification_portrait(map: &FieldMap, max_ext: usize) -> Result<RamificationPortrait, ClassifyError> {
    let crit = critical_points(map, max_ext)?;
    let m = &crit.map;
    let mut index: HashMap<ProjPoint, usize> = HashMap::new();
    let mut points: Vec<ProjPoint> = Vec::new();
    for (c, _) in &crit.points {
        let mut cur = c.clone();
        while !index.contains_key(&cur) {
            index.insert(cur.clone(), points.len());
            points.push(cur.clone());
            cur = m.eval(&cur);
        }
    }
    let f = &crit.field;
    let base = crit.base_degree();
    let vertices: Vec<PortraitVertex> = points
        .iter()
        .map(|pt| {
            let e = crit
                .points
                .iter()
                .find(|(c, _)| c == pt)
                .map_or(1, |(_, e)| *e);
            PortraitVertex {
                point: pt.display(f),
                critical: e > 1,
                ramification: e,
                degree: match pt {
                    ProjPoint::Finite(x) => f.element_degree_over(x, base),
                    ProjPoint::Infinity => 1,
                },
                next: index[&m.eval(pt)],
            }
        })
        .collect();
    let succ: Vec<usize> = vertices.iter().map(|v| v.next).collect();
    let labels: Vec<usize> = vertices.iter().map(|v| v.ramification).collect();
    let canonical = canonical_form(&succ, &labels);
    let hash = format!("{:x}", Sha256::digest(canonical.as_bytes()));
    let shape = if map.degree() == 2 {
        identify(&canonical)
    } else {
        PortraitShape::Other
    };
    Ok(RamificationPortrait {
        vertices,
        canonical,
        hash,
        shape,
        points,
        critical: crit,
    })
}

/// Whether a quadratic map is Lattès, read off its portrait.
pub fn is_lattes_quadratic(map: &FieldMap, max_ext: usize) -> Result<(bool, PortraitShape), ClassifyError> {
    if map.degree() != 2 {
        return Err(ClassifyError::WrongDegree(map.degree()));
    }
    if map.field().characteristic() == 2 {
        return Err(ClassifyError::EvenCharacteristic);
    }
    let shape = ramification_portrait(map, max_ext)?.shape;
    Ok((shape.is_lattes(), shape))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::DEFAULT_MAX_EXTENSION;
    use crate::dynamics::RationalMap;
    use crate::field::build_field;

    fn portrait(expr: &str, p: u64) -> RamificationPortrait {
        let m = RationalMap::parse(expr).unwrap().reduce(&build_field(p, 1).unwrap()).unwrap();
        ramification_portrait(&m, DEFAULT_MAX_EXTENSION).unwrap()
    }

    #[test]
    fn canonical_form_ignores_vertex_order() {
        let a = canonical_form(&[1, 2, 3, 3], &[2, 2, 1, 1]);
        let b = canonical_form(&[1, 1, 3, 0], &[1, 1, 2, 2]);
        assert_eq!(a, b);
        assert_ne!(a, canonical_form(&[0, 2, 3, 3], &[2, 2, 1, 1]));
        let c1 = canonical_form(&[1, 2, 0], &[2, 1, 1]);
        let c2 = canonical_form(&[2, 0, 1], &[1, 1, 2]);
        assert_eq!(c1, c2);
    }

    #[test]
    fn templates_are_distinct() {
        let t = shape_templates();
        for i in 0..t.len() {
            for j in i + 1..t.len() {
                if t[i].0 != t[j].0 {
                    assert_ne!(t[i].1, t[j].1);
                }
            }
        }
    }

    #[test]
    fn known_shapes() {
        let l = portrait("(x^2-2)/x^2", 3);
        assert_eq!(l.shape, PortraitShape::CriticalChain);
        assert_eq!(l.vertices.len(), 4);
        assert_eq!(portrait("(x^2-2)/x^2", 7).shape, PortraitShape::CriticalChain);
        assert_eq!(portrait("x^2-2", 7).shape, PortraitShape::Chebyshev);
        assert_eq!(portrait("x^2", 5).shape, PortraitShape::Power);
        assert_eq!(portrait("1/x^2", 5).shape, PortraitShape::Power);
        let other = portrait("(x^2-1)/x^2", 7);
        assert_ne!(other.hash, l.hash);
    }

    #[test]
    fn out_degree_and_labels() {
        let p = portrait("(x^2-2)/(x^2-1)", 5);
        for v in &p.vertices {
            assert!(v.next < p.vertices.len());
            assert!(v.ramification == 1 || v.ramification == 2);
            assert_eq!(v.critical, v.ramification == 2);
        }
    }
}
