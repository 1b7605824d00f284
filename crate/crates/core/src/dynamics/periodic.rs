//! Periodic points on `P^1(F_q)`, by image stabilization and by functional
//! graph peeling.

use rayon::prelude::*;

use super::{FieldMap, MapError, ProjPoint};
use crate::field::Field;

/// Bijection between `P^1(F_q)` and `0..=q`; `q` is the point at infinity.
#[derive(Clone, Debug)]
pub struct PointIndex {
    field: Field,
    q: u64,
}

impl PointIndex {
    pub fn new(field: &Field, budget: u64) -> Result<Self, MapError> {
        let q = field.check_budget(budget.saturating_sub(1))?;
        if q >= u32::MAX as u64 {
            return Err(MapError::Field(crate::field::FieldError::BudgetExceeded {
                size: q.to_string(),
                budget,
            }));
        }
        Ok(PointIndex {
            field: field.clone(),
            q,
        })
    }

    /// Number of points, `q + 1`.
    pub fn len(&self) -> usize {
        self.q as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn rank(&self, pt: &ProjPoint) -> u32 {
        match pt {
            ProjPoint::Finite(e) => self.field.rank(e) as u32,
            ProjPoint::Infinity => self.q as u32,
        }
    }

    pub fn point(&self, r: u32) -> ProjPoint {
        if r as u64 == self.q {
            ProjPoint::Infinity
        } else {
            ProjPoint::Finite(self.field.unrank(r as u64))
        }
    }
}

/// The map as a flat successor array over point ranks.
#[derive(Clone, Debug)]
pub struct FunctionalGraph {
    index: PointIndex,
    succ: Vec<u32>,
}

impl FunctionalGraph {
    pub fn build(map: &FieldMap, budget: u64) -> Result<Self, MapError> {
        let index = PointIndex::new(map.field(), budget)?;
        let succ = (0..index.len() as u32)
            .into_par_iter()
            .map(|r| index.rank(&map.eval(&index.point(r))))
            .collect();
        Ok(FunctionalGraph { index, succ })
    }

    pub fn index(&self) -> &PointIndex {
        &self.index
    }

    pub fn successors(&self) -> &[u32] {
        &self.succ
    }

    /// Marks points lying on cycles by repeatedly deleting points of
    /// in-degree zero.
    pub fn cyclic_mask(&self) -> Vec<bool> {
        let n = self.succ.len();
        let mut indeg = vec![0u32; n];
        for &s in &self.succ {
            indeg[s as usize] += 1;
        }
        let mut alive = vec![true; n];
        let mut stack: Vec<u32> = (0..n as u32).filter(|&v| indeg[v as usize] == 0).collect();
        while let Some(v) = stack.pop() {
            alive[v as usize] = false;
            let s = self.succ[v as usize] as usize;
            indeg[s] -= 1;
            if indeg[s] == 0 {
                stack.push(s as u32);
            }
        }
        alive
    }

    pub fn periodic_ranks(&self) -> Vec<u32> {
        self.cyclic_mask()
            .iter()
            .enumerate()
            .filter(|(_, &c)| c)
            .map(|(i, _)| i as u32)
            .collect()
    }

    /// Lengths of all cycles, sorted.
    pub fn cycle_lengths(&self) -> Vec<usize> {
        let mut seen = self.cyclic_mask().iter().map(|&c| !c).collect::<Vec<_>>();
        let mut out = Vec::new();
        for start in 0..self.succ.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut v = start;
            while !seen[v] {
                seen[v] = true;
                v = self.succ[v] as usize;
                len += 1;
            }
            out.push(len);
        }
        out.sort_unstable();
        out
    }

    /// The image of the whole point set, as a membership mask.
    pub fn image_mask(&self, mask: &[bool]) -> Vec<bool> {
        let mut next = vec![false; self.succ.len()];
        for (v, &m) in mask.iter().enumerate() {
            if m {
                next[self.succ[v] as usize] = true;
            }
        }
        next
    }
}

fn to_points(index: &PointIndex, ranks: impl IntoIterator<Item = u32>) -> Vec<ProjPoint> {
    let mut pts: Vec<ProjPoint> = ranks.into_iter().map(|r| index.point(r)).collect();
    pts.sort();
    pts
}

/// Applies the map to the full point set until the image stops shrinking.
pub fn periodic_points_iterate(map: &FieldMap, budget: u64) -> Result<Vec<ProjPoint>, MapError> {
    let g = FunctionalGraph::build(map, budget)?;
    let mut mask = vec![true; g.succ.len()];
    let mut count = mask.len();
    loop {
        let next = g.image_mask(&mask);
        let c = next.iter().filter(|&&b| b).count();
        mask = next;
        if c == count {
            break;
        }
        count = c;
    }
    Ok(to_points(
        &g.index,
        mask.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i as u32),
    ))
}

/// Points lying on cycles of the functional graph.
pub fn periodic_points_graph(map: &FieldMap, budget: u64) -> Result<Vec<ProjPoint>, MapError> {
    let g = FunctionalGraph::build(map, budget)?;
    Ok(to_points(&g.index, g.periodic_ranks()))
}

/// Cardinality of the `m`-th forward image of `P^1(F_q)`.
pub fn image_size(map: &FieldMap, m: usize, budget: u64) -> Result<usize, MapError> {
    let g = FunctionalGraph::build(map, budget)?;
    let mut mask = vec![true; g.succ.len()];
    for _ in 0..m {
        mask = g.image_mask(&mask);
    }
    Ok(mask.iter().filter(|&&b| b).count())
}

/// Whether `x` lies on a cycle, by walking its orbit.
pub fn is_periodic_point(map: &FieldMap, x: &ProjPoint) -> bool {
    let mut slow = map.eval(x);
    let mut fast = map.eval(&slow);
    while slow != fast {
        slow = map.eval(&slow);
        fast = map.iterate(&fast, 2);
    }
    // slow is on the cycle; check whether x is
    let mut y = map.eval(&slow);
    loop {
        if &y == x {
            return true;
        }
        if y == slow {
            return false;
        }
        y = map.eval(&y);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::RationalMap;
    use crate::field::{build_field, DEFAULT_ENUM_BUDGET};

    fn per(expr: &str, p: u64, n: usize) -> Vec<ProjPoint> {
        let f = build_field(p, n).unwrap();
        let m = RationalMap::parse(expr).unwrap().reduce(&f).unwrap();
        let a = periodic_points_iterate(&m, DEFAULT_ENUM_BUDGET).unwrap();
        let b = periodic_points_graph(&m, DEFAULT_ENUM_BUDGET).unwrap();
        assert_eq!(a, b);
        a
    }

    #[test]
    fn small_periodic_sets() {
        let f = build_field(3, 1).unwrap();
        let pts = |v: &[u64]| {
            let mut out: Vec<ProjPoint> = v.iter().map(|&x| ProjPoint::Finite(f.from_u64(x))).collect();
            out.push(ProjPoint::Infinity);
            out
        };
        assert_eq!(per("x^2-1", 3, 1), pts(&[0, 2]));
        assert_eq!(per("x^2", 3, 1), pts(&[0, 1]));
        assert_eq!(per("x", 5, 2).len(), 26);
    }

    #[test]
    fn successor_array_matches_eval() {
        let f = build_field(3, 2).unwrap();
        let m = RationalMap::parse("(x^2-2)/(x^2-1)").unwrap().reduce(&f).unwrap();
        let g = FunctionalGraph::build(&m, DEFAULT_ENUM_BUDGET).unwrap();
        for r in 0..g.index().len() as u32 {
            let p = g.index().point(r);
            assert_eq!(g.index().point(g.successors()[r as usize]), m.eval(&p));
        }
        let periodic = per("(x^2-2)/(x^2-1)", 3, 2);
        assert_eq!(periodic.len(), 2); // 0.200 of 10 points
        for r in 0..g.index().len() as u32 {
            let p = g.index().point(r);
            assert_eq!(is_periodic_point(&m, &p), periodic.contains(&p));
        }
    }

    #[test]
    fn image_sizes() {
        let f = build_field(3, 1).unwrap();
        let sq = RationalMap::parse("x^2").unwrap().reduce(&f).unwrap();
        assert_eq!(image_size(&sq, 0, DEFAULT_ENUM_BUDGET).unwrap(), 4);
        assert_eq!(image_size(&sq, 1, DEFAULT_ENUM_BUDGET).unwrap(), 3);
    }

    #[test]
    fn cycle_lengths_partition_periodic_points() {
        let f = build_field(5, 1).unwrap();
        let m = RationalMap::parse("x^2-2").unwrap().reduce(&f).unwrap();
        let g = FunctionalGraph::build(&m, DEFAULT_ENUM_BUDGET).unwrap();
        let total: usize = g.cycle_lengths().iter().sum();
        assert_eq!(total, g.periodic_ranks().len());
    }
}
