//! Nucleus of a contracting automaton group, elements fixing a word and
//! returning to themselves, and the ends they fix.

use std::collections::VecDeque;

use serde::Serialize;

use super::automaton::{Automaton, RawAutomaton};
use super::format_word;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NucleusOptions {
    pub max_iterations: usize,
    /// Abandon the closure once a candidate set grows past this size.
    pub max_states: usize,
}

impl Default for NucleusOptions {
    fn default() -> Self {
        NucleusOptions {
            max_iterations: 16,
            max_states: 2048,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Nucleus {
    pub automaton: Automaton,
    pub iterations: usize,
    /// False if the closure did not stabilize within the bounds.
    pub complete: bool,
}

impl Nucleus {
    pub fn state_names(&self) -> Vec<String> {
        (0..self.automaton.state_count()).map(|s| self.automaton.state_name(s).to_string()).collect()
    }
}

/// Adds every product of two states, then keeps the minimized core.
fn square_step(aut: &Automaton) -> Automaton {
    let k = aut.state_count();
    let d = aut.alphabet_size();
    let mut names: Vec<String> = (0..k).map(|s| aut.state_name(s).to_string()).collect();
    let mut perms: Vec<Vec<usize>> = (0..k).map(|s| aut.perm(s).to_vec()).collect();
    let mut rest: Vec<Vec<usize>> = (0..k).map(|s| (0..d).map(|x| aut.restriction(s, x)).collect()).collect();
    let pair = |s: usize, t: usize| k + s * k + t;
    for s in 0..k {
        for t in 0..k {
            names.push(format!("{}*{}", aut.state_name(s), aut.state_name(t)));
            let (ps, pt) = (aut.perm(s), aut.perm(t));
            perms.push((0..d).map(|x| ps[pt[x]]).collect());
            rest.push((0..d).map(|x| pair(aut.restriction(s, pt[x]), aut.restriction(t, x))).collect());
        }
    }
    let raw = RawAutomaton { d, names, perms, rest };
    let gens: Vec<usize> = aut.generators().to_vec();
    let (full, _) = raw.normalize(aut.name(), aut.identity(), &gens);
    let core = full.core();
    full.sub_automaton(&core, aut.name())
}

/// Iterates `N <- core(N ∪ N·N)` from the core of the generated states.
pub fn nucleus(aut: &Automaton, opts: &NucleusOptions) -> Nucleus {
    let reach = aut.reachable();
    let start = aut.sub_automaton(&reach, aut.name());
    let core = start.core();
    let mut cur = start.sub_automaton(&core, aut.name());
    for it in 1..=opts.max_iterations {
        if cur.state_count() * (cur.state_count() + 1) > opts.max_states * opts.max_states {
            return Nucleus {
                automaton: cur,
                iterations: it - 1,
                complete: false,
            };
        }
        let next = square_step(&cur);
        if next.state_count() == cur.state_count() {
            return Nucleus {
                automaton: cur,
                iterations: it,
                complete: true,
            };
        }
        cur = next;
    }
    Nucleus {
        automaton: cur,
        iterations: opts.max_iterations,
        complete: false,
    }
}

/// Edges `s -x-> s|_x` for letters fixed by `s`.
fn fixed_letter_edges(aut: &Automaton, s: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
    (0..aut.alphabet_size()).filter(move |&x| aut.perm(s)[x] == x).map(move |x| (x, aut.restriction(s, x)))
}

#[derive(Clone, Debug, Serialize)]
pub struct N1Element {
    pub state: String,
    /// Nonempty `w` with `g(w) = w` and `g|_w = g`.
    pub witness: String,
    pub trivial: bool,
}

/// States `g` on a cycle of the fixed-letter graph, with a shortest witness.
pub fn n1_elements(aut: &Automaton) -> Vec<N1Element> {
    let k = aut.state_count();
    let mut out = Vec::new();
    for g in 0..k {
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; k];
        let mut queue = VecDeque::new();
        let mut found = None;
        for (x, t) in fixed_letter_edges(aut, g) {
            if t == g {
                found = Some(vec![x]);
                break;
            }
            if prev[t].is_none() {
                prev[t] = Some((g, x));
                queue.push_back(t);
            }
        }
        while found.is_none() {
            let Some(s) = queue.pop_front() else { break };
            for (x, t) in fixed_letter_edges(aut, s) {
                if t == g {
                    let mut w = vec![x];
                    let mut cur = s;
                    while cur != g {
                        let (p, y) = prev[cur].expect("visited");
                        w.push(y);
                        cur = p;
                    }
                    w.reverse();
                    found = Some(w);
                    break;
                }
                if prev[t].is_none() && t != g {
                    prev[t] = Some((s, x));
                    queue.push_back(t);
                }
            }
        }
        if let Some(w) = found {
            out.push(N1Element {
                state: aut.state_name(g).to_string(),
                witness: format_word(&w),
                trivial: g == aut.identity(),
            });
        }
    }
    out
}

/// An eventually periodic end `prefix period period ...`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct End {
    pub prefix: String,
    pub period: String,
}

impl std::fmt::Display for End {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}({})^inf", self.prefix, self.period)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum EndsClass {
    None,
    Finite { count: usize, ends: Vec<End> },
    Infinite,
}

/// Classifies the set of ends fixed by state `g`.
pub fn ends_fixed_class(aut: &Automaton, g: usize) -> EndsClass {
    let k = aut.state_count();
    let edges: Vec<Vec<(usize, usize)>> = (0..k).map(|s| fixed_letter_edges(aut, s).collect()).collect();
    let mut live = vec![true; k];
    loop {
        let mut changed = false;
        for s in 0..k {
            if live[s] && !edges[s].iter().any(|&(_, t)| live[t]) {
                live[s] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    if !live[g] {
        return EndsClass::None;
    }
    let out: Vec<Vec<(usize, usize)>> = edges.iter().map(|e| e.iter().copied().filter(|&(_, t)| live[t]).collect()).collect();
    let mut reach = vec![false; k];
    let mut stack = vec![g];
    while let Some(s) = stack.pop() {
        if !std::mem::replace(&mut reach[s], true) {
            stack.extend(out[s].iter().map(|&(_, t)| t));
        }
    }
    // a vertex on a cycle with a second live exit yields infinitely many ends
    let on_cycle = |s: usize| {
        let mut seen = vec![false; k];
        let mut st: Vec<usize> = out[s].iter().map(|&(_, t)| t).collect();
        while let Some(v) = st.pop() {
            if v == s {
                return true;
            }
            if !std::mem::replace(&mut seen[v], true) {
                st.extend(out[v].iter().map(|&(_, t)| t));
            }
        }
        false
    };
    if (0..k).any(|s| reach[s] && out[s].len() >= 2 && on_cycle(s)) {
        return EndsClass::Infinite;
    }
    // every cycle is a simple loop without exits, so paths are finite in number
    let mut ends = Vec::new();
    let mut stack: Vec<(usize, Vec<usize>, Vec<usize>)> = vec![(g, Vec::new(), Vec::new())];
    while let Some((s, word, states)) = stack.pop() {
        if let Some(pos) = states.iter().position(|&t| t == s) {
            ends.push(End {
                prefix: format_word(&word[..pos]),
                period: format_word(&word[pos..]),
            });
            continue;
        }
        for &(x, t) in out[s].iter().rev() {
            let mut w = word.clone();
            w.push(x);
            let mut st = states.clone();
            st.push(s);
            stack.push((t, w, st));
        }
    }
    EndsClass::Finite { count: ends.len(), ends }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConsistencyReport {
    pub n1: Vec<(N1Element, EndsClass)>,
    /// A nontrivial element of `N_1` fixing finitely many ends.
    pub finite_witness: Option<String>,
    pub map_exceptional: bool,
    pub nucleus_complete: bool,
    pub consistent: bool,
}

/// Compares the ends of `N_1` with a map's exceptionality verdict.
pub fn exceptionality_consistency(nuc: &Nucleus, map_exceptional: bool) -> ConsistencyReport {
    let aut = &nuc.automaton;
    let n1: Vec<(N1Element, EndsClass)> = n1_elements(aut)
        .into_iter()
        .map(|e| {
            let s = aut.state_index(&e.state).expect("state of the nucleus");
            let class = ends_fixed_class(aut, s);
            (e, class)
        })
        .collect();
    let finite_witness = n1
        .iter()
        .find(|(e, c)| !e.trivial && matches!(c, EndsClass::Finite { .. }))
        .map(|(e, _)| e.state.clone());
    ConsistencyReport {
        consistent: finite_witness.is_some() == map_exceptional && nuc.complete,
        n1,
        finite_witness,
        map_exceptional,
        nucleus_complete: nuc.complete,
    }
}
