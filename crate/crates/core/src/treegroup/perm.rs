//! Permutations of `0..n` as flat image arrays.

/// `p[x]` is the image of `x`. Composition follows `(gh)(x) = g(h(x))`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(pub Vec<u32>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n as u32).collect())
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    #[inline]
    pub fn apply(&self, x: u32) -> u32 {
        self.0[x as usize]
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Perm) -> Perm {
        Perm(other.0.iter().map(|&x| self.0[x as usize]).collect())
    }

    /// Writes `self ∘ other` into `out`.
    pub fn compose_into(&self, other: &Perm, out: &mut Perm) {
        out.0.clear();
        out.0.extend(other.0.iter().map(|&x| self.0[x as usize]));
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        Perm(inv)
    }

    pub fn fixed_points(&self) -> usize {
        self.0.iter().enumerate().filter(|(i, &x)| *i as u32 == x).count()
    }

    pub fn has_fixed_point(&self) -> bool {
        self.0.iter().enumerate().any(|(i, &x)| i as u32 == x)
    }

    /// Order of the permutation as the lcm of cycle lengths.
    pub fn order(&self) -> u128 {
        let mut seen = vec![false; self.0.len()];
        let mut acc: u128 = 1;
        for s in 0..self.0.len() {
            if seen[s] {
                continue;
            }
            let mut len = 0u128;
            let mut x = s;
            while !seen[x] {
                seen[x] = true;
                x = self.0[x] as usize;
                len += 1;
            }
            acc = num_integer::lcm(acc, len);
        }
        acc
    }
}

/// Orbits of the group generated by `gens` on `0..n`, as a representative
/// label per point (the least point of its orbit).
pub fn orbit_labels(n: usize, gens: &[Perm]) -> Vec<u32> {
    let mut label = vec![u32::MAX; n];
    let mut stack = Vec::new();
    for s in 0..n {
        if label[s] != u32::MAX {
            continue;
        }
        label[s] = s as u32;
        stack.push(s as u32);
        while let Some(x) = stack.pop() {
            for g in gens {
                let y = g.apply(x) as usize;
                if label[y] == u32::MAX {
                    label[y] = s as u32;
                    stack.push(y as u32);
                }
            }
        }
    }
    label
}

/// Orbit sizes indexed by the least point of each orbit.
pub fn orbit_sizes(n: usize, gens: &[Perm]) -> Vec<(u32, usize)> {
    let labels = orbit_labels(n, gens);
    let mut counts = vec![0usize; n];
    for &l in &labels {
        counts[l as usize] += 1;
    }
    counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(i, &c)| (i as u32, c))
        .collect()
}
