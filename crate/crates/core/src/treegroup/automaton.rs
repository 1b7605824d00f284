//! Finite-state wreath recursions and the tree automorphisms they define.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::perm::Perm;
use super::TreeError;

/// JSON form of an automaton. The identity state `id` is implicit.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct AutomatonSpec {
    pub name: String,
    pub alphabet_size: usize,
    pub states: BTreeMap<String, StateSpec>,
    pub generators: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    pub perm: Vec<usize>,
    pub rest: Vec<String>,
}

pub const IDENTITY_NAME: &str = "id";

/// A minimized, inverse-closed automaton.
///
/// Distinct states define distinct tree automorphisms, every state has an
/// inverse state, and `identity` is the trivial automorphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automaton {
    name: String,
    d: usize,
    names: Vec<String>,
    perms: Vec<Vec<usize>>,
    rest: Vec<Vec<usize>>,
    inverse: Vec<usize>,
    identity: usize,
    generators: Vec<usize>,
}

/// Raw transition data before normalization.
#[derive(Clone, Debug)]
pub struct RawAutomaton {
    pub d: usize,
    pub names: Vec<String>,
    pub perms: Vec<Vec<usize>>,
    pub rest: Vec<Vec<usize>>,
}

fn is_permutation(p: &[usize], d: usize) -> bool {
    let mut seen = vec![false; d];
    p.len() == d && p.iter().all(|&x| x < d && !std::mem::replace(&mut seen[x], true))
}

fn invert_perm(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (i, &x) in p.iter().enumerate() {
        inv[x] = i;
    }
    inv
}

/// Moore partition refinement; returns the class of each state.
fn minimize_classes(perms: &[Vec<usize>], rest: &[Vec<usize>]) -> Vec<usize> {
    let n = perms.len();
    let mut class = vec![0usize; n];
    {
        let mut ids: HashMap<&Vec<usize>, usize> = HashMap::new();
        for s in 0..n {
            let k = ids.len();
            class[s] = *ids.entry(&perms[s]).or_insert(k);
        }
    }
    loop {
        let mut ids: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
        let mut next = vec![0usize; n];
        for s in 0..n {
            let key = (class[s], rest[s].iter().map(|&t| class[t]).collect::<Vec<_>>());
            let k = ids.len();
            next[s] = *ids.entry(key).or_insert(k);
        }
        let before = class.iter().max().map_or(0, |m| m + 1);
        let after = ids.len();
        class = next;
        if after == before {
            return class;
        }
    }
}

impl RawAutomaton {
    /// Adds inverse states, minimizes, and returns the automaton together with
    /// the class of each raw state. `identity` must name a raw identity state.
    pub fn normalize(&self, name: &str, identity: usize, generators: &[usize]) -> (Automaton, Vec<usize>) {
        let n = self.perms.len();
        let mut perms = self.perms.clone();
        let mut rest = self.rest.clone();
        // state n + s is the inverse of s: perm^{-1}, and s^{-1}|_{σ(x)} = (s|_x)^{-1}
        for s in 0..n {
            let p = &self.perms[s];
            perms.push(invert_perm(p));
            let mut r = vec![0; self.d];
            for x in 0..self.d {
                r[p[x]] = n + self.rest[s][x];
            }
            rest.push(r);
        }
        let class = minimize_classes(&perms, &rest);
        // renumber classes in order of first appearance so raw order is kept
        let mut order: Vec<usize> = Vec::new();
        let mut renum: HashMap<usize, usize> = HashMap::new();
        for &c in &class {
            if !renum.contains_key(&c) {
                renum.insert(c, order.len());
                order.push(c);
            }
        }
        let class: Vec<usize> = class.iter().map(|c| renum[c]).collect();
        let k = order.len();
        let mut rep = vec![usize::MAX; k];
        for (s, &c) in class.iter().enumerate() {
            if rep[c] == usize::MAX {
                rep[c] = s;
            }
        }
        let mut names = Vec::with_capacity(k);
        for &r in &rep {
            names.push(if r < n {
                self.names[r].clone()
            } else {
                format!("{}^-1", self.names[r - n])
            });
        }
        let aut = Automaton {
            name: name.to_string(),
            d: self.d,
            perms: rep.iter().map(|&r| perms[r].clone()).collect(),
            rest: rep.iter().map(|&r| rest[r].iter().map(|&t| class[t]).collect()).collect(),
            inverse: rep
                .iter()
                .map(|&r| class[if r < n { r + n } else { r - n }])
                .collect(),
            identity: class[identity],
            generators: generators.iter().map(|&g| class[g]).collect(),
            names,
        };
        (aut, class[..n].to_vec())
    }
}

impl Automaton {
    pub fn from_spec(spec: &AutomatonSpec) -> Result<Self, TreeError> {
        let d = spec.alphabet_size;
        if d < 2 {
            return Err(TreeError::Schema("alphabet_size must be at least 2".into()));
        }
        if spec.states.contains_key(IDENTITY_NAME) {
            return Err(TreeError::Schema(format!("state name '{IDENTITY_NAME}' is reserved")));
        }
        let mut index: HashMap<&str, usize> = HashMap::new();
        index.insert(IDENTITY_NAME, 0);
        let mut names = vec![IDENTITY_NAME.to_string()];
        for name in spec.states.keys() {
            index.insert(name, names.len());
            names.push(name.clone());
        }
        let mut perms = vec![(0..d).collect::<Vec<_>>()];
        let mut rest = vec![vec![0; d]];
        for (name, st) in &spec.states {
            if !is_permutation(&st.perm, d) {
                return Err(TreeError::Schema(format!("state '{name}': perm is not a permutation of 0..{d}")));
            }
            if st.rest.len() != d {
                return Err(TreeError::Schema(format!("state '{name}': rest must have {d} entries")));
            }
            let r = st
                .rest
                .iter()
                .map(|t| index.get(t.as_str()).copied().ok_or_else(|| TreeError::UnknownState(t.clone())))
                .collect::<Result<Vec<_>, _>>()?;
            perms.push(st.perm.clone());
            rest.push(r);
        }
        let generators = spec
            .generators
            .iter()
            .map(|g| index.get(g.as_str()).copied().ok_or_else(|| TreeError::UnknownState(g.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        let raw = RawAutomaton { d, names, perms, rest };
        Ok(raw.normalize(&spec.name, 0, &generators).0)
    }

    pub fn from_json(text: &str) -> Result<Self, TreeError> {
        let spec: AutomatonSpec = serde_json::from_str(text).map_err(|e| TreeError::Schema(e.to_string()))?;
        Self::from_spec(&spec)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn alphabet_size(&self) -> usize {
        self.d
    }

    pub fn state_count(&self) -> usize {
        self.perms.len()
    }

    pub fn state_name(&self, s: usize) -> &str {
        &self.names[s]
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn perm(&self, s: usize) -> &[usize] {
        &self.perms[s]
    }

    pub fn restriction(&self, s: usize, x: usize) -> usize {
        self.rest[s][x]
    }

    pub fn inverse(&self, s: usize) -> usize {
        self.inverse[s]
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn raw(&self) -> RawAutomaton {
        RawAutomaton {
            d: self.d,
            names: self.names.clone(),
            perms: self.perms.clone(),
            rest: self.rest.clone(),
        }
    }

    /// Restricts to the given states, which must be closed under restriction.
    pub fn sub_automaton(&self, keep: &[usize], name: &str) -> Automaton {
        let pos: HashMap<usize, usize> = keep.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let raw = RawAutomaton {
            d: self.d,
            names: keep.iter().map(|&s| self.names[s].clone()).collect(),
            perms: keep.iter().map(|&s| self.perms[s].clone()).collect(),
            rest: keep.iter().map(|&s| self.rest[s].iter().map(|t| pos[t]).collect()).collect(),
        };
        let gens: Vec<usize> = self.generators.iter().filter_map(|g| pos.get(g).copied()).collect();
        raw.normalize(name, pos[&self.identity], &gens).0
    }

    /// Serializes back to the JSON schema. Inverse states that are not
    /// themselves generators are kept as ordinary states.
    pub fn to_spec(&self) -> AutomatonSpec {
        let label = |s: usize| {
            if s == self.identity {
                IDENTITY_NAME.to_string()
            } else {
                self.names[s].clone()
            }
        };
        let states = (0..self.state_count())
            .filter(|&s| s != self.identity)
            .map(|s| {
                (
                    label(s),
                    StateSpec {
                        perm: self.perms[s].clone(),
                        rest: self.rest[s].iter().map(|&t| label(t)).collect(),
                    },
                )
            })
            .collect();
        AutomatonSpec {
            name: self.name.clone(),
            alphabet_size: self.d,
            states,
            generators: self.generators.iter().map(|&g| label(g)).collect(),
        }
    }

    /// Checks a word over the alphabet.
    pub fn check_word(&self, w: &[usize]) -> Result<(), TreeError> {
        match w.iter().find(|&&x| x >= self.d) {
            Some(&x) => Err(TreeError::BadLetter { letter: x, d: self.d }),
            None => Ok(()),
        }
    }

    /// Image of `w` under state `s`.
    pub fn state_act(&self, s: usize, w: &[usize]) -> Vec<usize> {
        let mut cur = s;
        w.iter()
            .map(|&x| {
                let y = self.perms[cur][x];
                cur = self.rest[cur][x];
                y
            })
            .collect()
    }

    /// `s|_w`.
    pub fn state_restrict(&self, s: usize, w: &[usize]) -> usize {
        w.iter().fold(s, |cur, &x| self.rest[cur][x])
    }

    /// Level-`n` permutations of every state, on words ranked with the first
    /// letter most significant.
    pub fn level_perms(&self, n: usize) -> Vec<Perm> {
        let k = self.state_count();
        let mut cur: Vec<Perm> = vec![Perm(vec![0]); k];
        let mut size = 1u32;
        for _ in 0..n {
            let next: Vec<Perm> = (0..k)
                .map(|s| {
                    let mut v = Vec::with_capacity(size as usize * self.d);
                    for x in 0..self.d {
                        let y = self.perms[s][x] as u32;
                        let sub = &cur[self.rest[s][x]];
                        v.extend(sub.0.iter().map(|&w| y * size + w));
                    }
                    Perm(v)
                })
                .collect();
            cur = next;
            size *= self.d as u32;
        }
        cur
    }

    /// Edges `s -> s|_x` over all letters.
    pub fn restriction_graph(&self) -> Vec<Vec<usize>> {
        self.rest.clone()
    }

    /// States reachable from a cycle of the restriction graph: exactly the
    /// states that occur as restrictions at words of unbounded length.
    pub fn core(&self) -> Vec<usize> {
        let k = self.state_count();
        // strip states without predecessors until stable
        let mut alive = vec![true; k];
        loop {
            let mut has_pred = vec![false; k];
            for s in 0..k {
                if alive[s] {
                    for &t in &self.rest[s] {
                        has_pred[t] = true;
                    }
                }
            }
            let mut changed = false;
            for s in 0..k {
                if alive[s] && !has_pred[s] {
                    alive[s] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        (0..k).filter(|&s| alive[s]).collect()
    }

    /// States reachable from the generators (and their inverses).
    pub fn reachable(&self) -> Vec<usize> {
        let k = self.state_count();
        let mut seen = vec![false; k];
        let mut stack: Vec<usize> = self.generators.iter().flat_map(|&g| [g, self.inverse[g]]).collect();
        stack.push(self.identity);
        while let Some(s) = stack.pop() {
            if std::mem::replace(&mut seen[s], true) {
                continue;
            }
            stack.extend(self.rest[s].iter().copied());
            stack.push(self.inverse[s]);
        }
        (0..k).filter(|&s| seen[s]).collect()
    }
}
