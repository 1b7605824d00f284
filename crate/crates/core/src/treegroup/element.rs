//! Group elements as reduced words in automaton states.

use super::automaton::Automaton;
use super::perm::Perm;
use super::TreeError;

/// A product `s_1 s_2 ... s_k` of states, acting right to left:
/// `(gh)(v) = g(h(v))`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TreeElement {
    word: Vec<usize>,
}

impl TreeElement {
    pub fn identity() -> Self {
        TreeElement { word: Vec::new() }
    }

    pub fn from_state(aut: &Automaton, s: usize) -> Self {
        Self::from_word(aut, vec![s])
    }

    /// Builds and freely reduces a word of state indices.
    pub fn from_word(aut: &Automaton, word: Vec<usize>) -> Self {
        let mut out: Vec<usize> = Vec::with_capacity(word.len());
        for s in word {
            if s == aut.identity() {
                continue;
            }
            if out.last().is_some_and(|&t| aut.inverse(t) == s) {
                out.pop();
            } else {
                out.push(s);
            }
        }
        TreeElement { word: out }
    }

    /// Parses names separated by spaces or `*`, e.g. `"a b^-1"`.
    pub fn parse(aut: &Automaton, text: &str) -> Result<Self, TreeError> {
        let mut word = Vec::new();
        for tok in text.split(|c: char| c == '*' || c.is_whitespace()).filter(|t| !t.is_empty()) {
            let s = match aut.state_index(tok) {
                Some(s) => s,
                None => match tok.strip_suffix("^-1").and_then(|b| aut.state_index(b)) {
                    Some(s) => aut.inverse(s),
                    None => return Err(TreeError::UnknownState(tok.to_string())),
                },
            };
            word.push(s);
        }
        Ok(Self::from_word(aut, word))
    }

    pub fn word(&self) -> &[usize] {
        &self.word
    }

    pub fn is_identity_word(&self) -> bool {
        self.word.is_empty()
    }

    pub fn mul(&self, aut: &Automaton, other: &TreeElement) -> TreeElement {
        let mut w = self.word.clone();
        w.extend_from_slice(&other.word);
        Self::from_word(aut, w)
    }

    pub fn inverse(&self, aut: &Automaton) -> TreeElement {
        TreeElement {
            word: self.word.iter().rev().map(|&s| aut.inverse(s)).collect(),
        }
    }

    pub fn act(&self, aut: &Automaton, w: &[usize]) -> Result<Vec<usize>, TreeError> {
        aut.check_word(w)?;
        Ok(self.word.iter().rev().fold(w.to_vec(), |v, &s| aut.state_act(s, &v)))
    }

    /// `g|_w`, using `(gh)|_v = g|_{h(v)} h|_v`.
    pub fn restrict(&self, aut: &Automaton, w: &[usize]) -> Result<TreeElement, TreeError> {
        aut.check_word(w)?;
        let mut cur = w.to_vec();
        let mut out = vec![0; self.word.len()];
        for (i, &s) in self.word.iter().enumerate().rev() {
            out[i] = aut.state_restrict(s, &cur);
            cur = aut.state_act(s, &cur);
        }
        Ok(Self::from_word(aut, out))
    }

    /// Top permutation and first-level restrictions.
    pub fn wreath(&self, aut: &Automaton) -> (Vec<usize>, Vec<TreeElement>) {
        let d = aut.alphabet_size();
        let perm = (0..d).map(|x| self.act(aut, &[x]).expect("letter in range")[0]).collect();
        let rest = (0..d).map(|x| self.restrict(aut, &[x]).expect("letter in range")).collect();
        (perm, rest)
    }

    /// Level-`n` permutation, given the level-`n` permutations of all states.
    pub fn level_perm(&self, state_perms: &[Perm]) -> Perm {
        let deg = state_perms[0].degree();
        self.word.iter().fold(Perm::identity(deg), |acc, &s| acc.compose(&state_perms[s]))
    }

    pub fn display(&self, aut: &Automaton) -> String {
        if self.word.is_empty() {
            return "id".to_string();
        }
        self.word.iter().map(|&s| aut.state_name(s)).collect::<Vec<_>>().join("*")
    }
}

/// Product of wreath forms: `(σ, g_x) (τ, h_x) = (στ, g_{τ(x)} h_x)`.
pub fn wreath_product(
    aut: &Automaton,
    a: &(Vec<usize>, Vec<TreeElement>),
    b: &(Vec<usize>, Vec<TreeElement>),
) -> (Vec<usize>, Vec<TreeElement>) {
    let d = a.0.len();
    let perm = (0..d).map(|x| a.0[b.0[x]]).collect();
    let rest = (0..d).map(|x| a.1[b.0[x]].mul(aut, &b.1[x])).collect();
    (perm, rest)
}

/// Action of an element given in wreath form.
pub fn wreath_act(aut: &Automaton, form: &(Vec<usize>, Vec<TreeElement>), w: &[usize]) -> Result<Vec<usize>, TreeError> {
    aut.check_word(w)?;
    let Some((&x, tail)) = w.split_first() else {
        return Ok(Vec::new());
    };
    let mut out = vec![form.0[x]];
    out.extend(form.1[x].act(aut, tail)?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basilica() -> Automaton {
        Automaton::from_json(
            r#"{"name":"basilica","alphabet_size":2,
            "states":{"a":{"perm":[1,0],"rest":["b","id"]},"b":{"perm":[0,1],"rest":["a","id"]}},
            "generators":["a","b"]}"#,
        )
        .unwrap()
    }

    #[test]
    fn basilica_examples() {
        let aut = basilica();
        let a = TreeElement::parse(&aut, "a").unwrap();
        assert_eq!(a.act(&aut, &[0, 0]).unwrap(), vec![1, 0]);
        let a2 = a.mul(&aut, &a);
        let b = TreeElement::parse(&aut, "b").unwrap();
        assert_eq!(a2.restrict(&aut, &[0]).unwrap(), b);
        assert_eq!(a.restrict(&aut, &[]).unwrap(), a);
        assert!(matches!(a.act(&aut, &[2]), Err(TreeError::BadLetter { letter: 2, d: 2 })));
    }

    #[test]
    fn free_reduction() {
        let aut = basilica();
        let g = TreeElement::parse(&aut, "a b b^-1 a^-1 id").unwrap();
        assert!(g.is_identity_word());
        let h = TreeElement::parse(&aut, "a*b").unwrap();
        assert!(h.mul(&aut, &h.inverse(&aut)).is_identity_word());
        assert_eq!(h.display(&aut), "a*b");
    }

    #[test]
    fn level_perm_matches_action() {
        let aut = basilica();
        let perms = aut.level_perms(3);
        let g = TreeElement::parse(&aut, "a b^-1 a").unwrap();
        let p = g.level_perm(&perms);
        for r in 0..8usize {
            let w = vec![r >> 2, (r >> 1) & 1, r & 1];
            let img = g.act(&aut, &w).unwrap();
            assert_eq!(p.apply(r as u32) as usize, img[0] * 4 + img[1] * 2 + img[2]);
        }
    }
}
