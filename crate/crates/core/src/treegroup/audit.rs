//! Per-level checks on level quotients: kernel orbits, martingale identities,
//! transitivity and recurrence.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigUint;
use num_rational::Ratio;
use serde::Serialize;

use super::automaton::Automaton;
use super::chain::{vertex_image, FactorChain};
use super::perm::{orbit_labels, orbit_sizes, Perm};
use super::quotient::{build_levels, LevelQuotient};
use super::{Budget, TreeError};

fn ser_ratio<S: serde::Serializer>(r: &Ratio<u64>, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
}

fn ser_big<S: serde::Serializer>(r: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

/// Number of fixed vertices at each level `1..=n` of a level-`n` permutation.
pub fn fixed_vertex_counts(g: &Perm, d: usize, n: usize) -> Vec<u32> {
    (1..=n)
        .map(|k| {
            let stride = (d as u32).pow((n - k) as u32);
            (0..(d as u32).pow(k as u32)).filter(|&u| vertex_image(g, stride, u) == u).count() as u32
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct MartingaleLevel {
    pub level: usize,
    #[serde(serialize_with = "ser_big")]
    pub kernel_order: BigUint,
    /// Common size of the kernel orbits, if all are equal.
    pub orbit_size: Option<usize>,
    /// Every kernel orbit is a full set of children `v*`.
    pub holds: bool,
}

/// Orbit sizes of `H_n` on the leaves.
pub fn kernel_orbit_sizes(q: &LevelQuotient) -> Vec<usize> {
    let h = q.kernel_h();
    orbit_sizes(q.degree(), &h.generators).into_iter().map(|(_, s)| s).collect()
}

pub fn martingale_level(q: &LevelQuotient) -> MartingaleLevel {
    let sizes = kernel_orbit_sizes(q);
    let common = sizes.first().copied().filter(|&s| sizes.iter().all(|&t| t == s));
    MartingaleLevel {
        level: q.level,
        kernel_order: q.kernel_h().order,
        orbit_size: common,
        holds: common == Some(q.d),
    }
}

pub fn martingale_check(aut: &Automaton, n_max: usize, budget: &Budget) -> Result<Vec<MartingaleLevel>, TreeError> {
    Ok(build_levels(aut, n_max, budget)?.iter().map(martingale_level).collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionalRow {
    /// Fixed-vertex counts at levels `1..n-1`.
    pub history: Vec<u32>,
    pub count: u64,
    #[serde(serialize_with = "ser_ratio")]
    pub expectation: Ratio<u64>,
    /// Count at level `n - 1` (1 at the root).
    pub previous: u32,
    pub holds: bool,
}

/// `E[Y_n | Y_1..Y_{n-1}]` for every history with positive mass.
pub fn conditional_expectation_audit(q: &LevelQuotient, budget: &Budget) -> Result<Vec<ConditionalRow>, TreeError> {
    q.require_enumerable(budget)?;
    let (d, n) = (q.d, q.level);
    let table: BTreeMap<Vec<u32>, (u64, u64)> = q.chain.fold_elements(
        BTreeMap::new,
        |mut m, g| {
            let mut y = fixed_vertex_counts(g, d, n);
            let last = y.pop().expect("level >= 1") as u64;
            let e = m.entry(y).or_insert((0, 0));
            e.0 += 1;
            e.1 += last;
            m
        },
        |mut a, b| {
            for (k, (c, s)) in b {
                let e = a.entry(k).or_insert((0, 0));
                e.0 += c;
                e.1 += s;
            }
            a
        },
    );
    Ok(table
        .into_iter()
        .map(|(history, (count, sum))| {
            let previous = history.last().copied().unwrap_or(1);
            let expectation = Ratio::new(sum, count);
            ConditionalRow {
                holds: expectation == Ratio::from_integer(previous as u64),
                history,
                count,
                expectation,
                previous,
            }
        })
        .collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct BurnsideAudit {
    pub level: usize,
    pub kernel_order: u64,
    #[serde(serialize_with = "ser_ratio")]
    pub mean_fixed: Ratio<u64>,
    pub orbits: usize,
    pub holds: bool,
}

/// Average number of fixed leaves over `H_n` against the orbit count.
pub fn burnside_audit(q: &LevelQuotient, budget: &Budget) -> Result<BurnsideAudit, TreeError> {
    let h = q.kernel_h();
    let order = match h.chain.order_u64() {
        Some(o) if o <= budget.max_enumeration => o,
        _ => {
            return Err(TreeError::NotEnumerated {
                level: q.level,
                order: h.order.to_string(),
                budget: budget.max_enumeration,
            })
        }
    };
    let fixed = h.chain.fold_elements(|| 0u64, |a, g| a + g.fixed_points() as u64, |a, b| a + b);
    let orbits = orbit_sizes(q.degree(), &h.generators).len();
    let mean_fixed = Ratio::new(fixed, order);
    Ok(BurnsideAudit {
        level: q.level,
        kernel_order: order,
        mean_fixed,
        orbits,
        holds: mean_fixed == Ratio::from_integer(orbits as u64),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitAudit {
    pub level: usize,
    /// Distinct kernel orbit sizes.
    pub sizes: Vec<usize>,
    pub holds: bool,
}

/// All kernel orbits share one size dividing `d`.
pub fn horb_audit(q: &LevelQuotient) -> OrbitAudit {
    let mut sizes = kernel_orbit_sizes(q);
    sizes.sort_unstable();
    sizes.dedup();
    let holds = sizes.len() == 1 && q.d % sizes[0] == 0;
    OrbitAudit {
        level: q.level,
        sizes,
        holds,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TransitivityLevel {
    pub level: usize,
    pub orbits: usize,
    pub transitive: bool,
}

pub fn level_transitive(aut: &Automaton, n_max: usize, budget: &Budget) -> Result<Vec<TransitivityLevel>, TreeError> {
    (1..=n_max)
        .map(|n| {
            let deg = budget.degree(aut.alphabet_size(), n)?;
            let perms = aut.level_perms(n);
            let gens: Vec<Perm> = aut.generators().iter().map(|&g| perms[g].clone()).collect();
            let orbits = orbit_sizes(deg, &gens).len();
            Ok(TransitivityLevel {
                level: n,
                orbits,
                transitive: orbits == 1,
            })
        })
        .collect()
}

/// Transitivity on ordered pairs of distinct letters.
pub fn double_transitive(aut: &Automaton) -> bool {
    let d = aut.alphabet_size();
    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|x| (0..d).filter(move |&y| y != x).map(move |y| (x, y))).collect();
    let index: HashMap<(usize, usize), u32> = pairs.iter().enumerate().map(|(i, &p)| (p, i as u32)).collect();
    let gens: Vec<Perm> = aut
        .generators()
        .iter()
        .map(|&g| {
            let p = aut.perm(g);
            Perm(pairs.iter().map(|&(x, y)| index[&(p[x], p[y])]).collect())
        })
        .collect();
    orbit_labels(pairs.len(), &gens).iter().all(|&l| l == 0)
}

#[derive(Clone, Debug, Serialize)]
pub struct RecurrenceLevel {
    pub level: usize,
    pub transitive_on_letters: bool,
    /// Order of the restricted vertex stabilizer, per letter.
    pub section_orders: Vec<String>,
    pub lower_order: String,
    pub holds: bool,
}

/// Generators of the stabilizer of the level-1 vertex `x` (Schreier lemma).
fn letter_stabilizer(gens: &[Perm], d: usize, n: usize, x: u32) -> Vec<Perm> {
    let deg = gens.first().map_or(d.pow(n as u32), |g| g.degree());
    let stride = (d as u32).pow((n - 1) as u32);
    let mut reps: HashMap<u32, Perm> = HashMap::new();
    let mut order = vec![x];
    reps.insert(x, Perm::identity(deg));
    let mut i = 0;
    while i < order.len() {
        let y = order[i];
        for s in gens {
            let t = s.compose(&reps[&y]);
            let z = vertex_image(&t, stride, x);
            if !reps.contains_key(&z) {
                reps.insert(z, t);
                order.push(z);
            }
        }
        i += 1;
    }
    let mut out = Vec::new();
    for y in &order {
        for s in gens {
            let t = s.compose(&reps[y]);
            let z = vertex_image(&t, stride, x);
            let g = reps[&z].inverse().compose(&t);
            if !g.is_identity() && !out.contains(&g) {
                out.push(g);
            }
        }
    }
    out
}

/// Action of a stabilizer of `x` on the subtree below `x`.
fn section_perm(g: &Perm, d: usize, n: usize, x: u32) -> Perm {
    let stride = (d as u32).pow((n - 1) as u32);
    let off = x * stride;
    Perm((0..stride).map(|w| g.apply(off + w) - off).collect())
}

pub fn recurrent_check(aut: &Automaton, n_max: usize, budget: &Budget) -> Result<Vec<RecurrenceLevel>, TreeError> {
    let d = aut.alphabet_size();
    let levels = build_levels(aut, n_max, budget)?;
    let level_one: Vec<Perm> = aut.generators().iter().map(|&g| Perm(aut.perm(g).iter().map(|&x| x as u32).collect())).collect();
    let transitive = orbit_sizes(d, &level_one).len() == 1;
    let mut out = Vec::new();
    for q in &levels {
        let n = q.level;
        let lower = if n == 1 { BigUint::from(1u32) } else { levels[n - 2].order.clone() };
        let mut orders = Vec::new();
        for x in 0..d as u32 {
            let stab = letter_stabilizer(&q.generators, d, n, x);
            let order = if n == 1 {
                BigUint::from(1u32)
            } else {
                let sec: Vec<Perm> = stab.iter().map(|g| section_perm(g, d, n, x)).collect();
                FactorChain::build(d, n - 1, &sec).order()
            };
            orders.push(order);
        }
        let holds = transitive && orders.iter().all(|o| *o == lower);
        out.push(RecurrenceLevel {
            level: n,
            transitive_on_letters: transitive,
            section_orders: orders.iter().map(|o| o.to_string()).collect(),
            lower_order: lower.to_string(),
            holds,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treegroup::quotient::build_level_quotient;

    const ODOMETER: &str = r#"{"name":"odometer","alphabet_size":2,
        "states":{"a":{"perm":[1,0],"rest":["id","a"]}},"generators":["a"]}"#;
    const BASILICA: &str = r#"{"name":"basilica","alphabet_size":2,
        "states":{"a":{"perm":[1,0],"rest":["b","id"]},"b":{"perm":[0,1],"rest":["a","id"]}},
        "generators":["a","b"]}"#;
    const TRIVIAL: &str = r#"{"name":"t","alphabet_size":2,"states":{},"generators":[]}"#;

    fn aut(j: &str) -> Automaton {
        Automaton::from_json(j).unwrap()
    }

    #[test]
    fn martingale_examples() {
        let b = Budget::default();
        assert!(martingale_check(&aut(ODOMETER), 4, &b).unwrap().iter().all(|l| l.holds));
        assert!(martingale_check(&aut(BASILICA), 6, &b).unwrap().iter().all(|l| l.holds));
        assert!(martingale_check(&aut(TRIVIAL), 2, &b).unwrap().iter().all(|l| !l.holds));
    }

    #[test]
    fn odometer_conditional_expectation() {
        let b = Budget::default();
        let q = build_level_quotient(&aut(ODOMETER), 3, &b).unwrap();
        let rows = conditional_expectation_audit(&q, &b).unwrap();
        assert!(rows.iter().all(|r| r.holds));
        assert_eq!(rows.iter().map(|r| r.count).sum::<u64>(), 8);
    }

    #[test]
    fn burnside_and_orbits() {
        let b = Budget::default();
        for n in 1..=5 {
            let q = build_level_quotient(&aut(BASILICA), n, &b).unwrap();
            assert!(burnside_audit(&q, &b).unwrap().holds);
            assert!(horb_audit(&q).holds);
        }
    }

    #[test]
    fn transitivity() {
        let b = Budget::default();
        assert!(level_transitive(&aut(BASILICA), 8, &b).unwrap().iter().all(|l| l.transitive));
        assert!(!level_transitive(&aut(TRIVIAL), 1, &b).unwrap()[0].transitive);
        assert!(double_transitive(&aut(ODOMETER)));
    }

    #[test]
    fn recurrence() {
        let b = Budget::default();
        assert!(recurrent_check(&aut(ODOMETER), 5, &b).unwrap().iter().all(|l| l.holds));
        assert!(recurrent_check(&aut(BASILICA), 5, &b).unwrap().iter().all(|l| l.holds));
        assert!(!recurrent_check(&aut(TRIVIAL), 1, &b).unwrap()[0].holds);
    }
}
