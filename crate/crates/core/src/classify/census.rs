use serde::Serialize;

use super::normal_form::{quad_normal_form, QuadNormalForm};
use super::portrait::{is_lattes_quadratic, PortraitShape};
use super::{ClassifyError, DEFAULT_MAX_EXTENSION};
use crate::dynamics::{FieldMap, MapError};
use crate::field::{build_field, prime::is_prime, Field, FieldElem, FieldError, Poly};

#[derive(Clone, Debug, Serialize)]
pub struct CensusClass {
    /// Members of the class, as maps over `GF(p^2)`.
    pub maps: Vec<String>,
    pub shape: PortraitShape,
}

#[derive(Clone, Debug, Serialize)]
pub struct LattesCensus {
    pub p: u64,
    pub class_count: usize,
    pub classes: Vec<CensusClass>,
}

fn roots(f: &Field, c0: i64, c1: i64) -> Vec<FieldElem> {
    Poly::new(vec![f.from_i64(c0), f.from_i64(c1), f.one()]).distinct_roots(f)
}

/// The quadratic Lattès families over `GF(p^2)`, merged up to conjugacy.
pub fn lattes_class_census(p: u64) -> Result<LattesCensus, ClassifyError> {
    if !is_prime(p) {
        return Err(FieldError::NotPrime(p).into());
    }
    if p == 2 {
        return Err(ClassifyError::EvenCharacteristic);
    }
    let f = build_field(p, 2)?;
    let one = f.one();
    let two = f.from_u64(2);
    let mut params: Vec<(FieldElem, FieldElem)> = vec![(f.from_i64(-2), f.zero())];
    for a in roots(&f, 1, 0) {
        params.push((a.clone(), f.neg(&a)));
    }
    for a in roots(&f, -1, -2) {
        params.push((a.clone(), f.neg(&a)));
    }
    let a3 = roots(&f, 8, 5);
    for a in &a3 {
        params.push((a.clone(), f.neg(&f.add(a, &two))));
    }
    for a in &a3 {
        let (Some(x), Some(y)) = (f.div(&one, a), f.div(&one, &f.add(a, &two))) else {
            continue;
        };
        params.push((x, f.neg(&y)));
    }
    let mut members: Vec<(FieldMap, QuadNormalForm, PortraitShape)> = Vec::new();
    for (a, b) in params {
        let map = match FieldMap::quadratic_normal(&f, &a, &b) {
            Ok(m) => m,
            Err(MapError::BadReduction { .. }) => continue,
            Err(e) => return Err(e.into()),
        };
        let (lattes, shape) = is_lattes_quadratic(&map, DEFAULT_MAX_EXTENSION)?;
        if !lattes {
            continue;
        }
        if members.iter().any(|(m, _, _)| m == &map) {
            continue;
        }
        let nf = quad_normal_form(&map)?;
        members.push((map, nf, shape));
    }
    // union-find over shared normal-form representatives
    let n = members.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        parent[x] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if members[i].1.conjugate_to(&members[j].1) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[rj] = ri;
            }
        }
    }
    let mut classes: Vec<(usize, CensusClass)> = Vec::new();
    for (i, (map, _, shape)) in members.iter().enumerate() {
        let root = find(&mut parent, i);
        match classes.iter_mut().find(|(r, _)| *r == root) {
            Some((_, c)) => c.maps.push(map.display()),
            None => classes.push((
                root,
                CensusClass {
                    maps: vec![map.display()],
                    shape: *shape,
                },
            )),
        }
    }
    let classes: Vec<CensusClass> = classes.into_iter().map(|(_, c)| c).collect();
    Ok(LattesCensus {
        p,
        class_count: classes.len(),
        classes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn census_counts() {
        assert_eq!(lattes_class_census(5).unwrap().class_count, 8);
        assert_eq!(lattes_class_census(7).unwrap().class_count, 6);
    }

    #[test]
    fn census_rejects_even_characteristic() {
        assert!(matches!(lattes_class_census(2), Err(ClassifyError::EvenCharacteristic)));
    }
}
