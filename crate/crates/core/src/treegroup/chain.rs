//! Stabilizer chains for groups acting on the first `n` levels of the tree.
//!
//! Every element factors uniquely as `c_1 c_2 ... c_m` with `c_i` taken from
//! factor `i`. Factors are ordered by tree level, so the factors at level `k`
//! form a chain of the kernel of the restriction to level `k - 1`.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::One;
use rand::Rng;
use rayon::prelude::*;

use super::perm::Perm;

/// Coset representatives for one base vertex.
#[derive(Clone, Debug)]
pub struct Factor {
    /// Tree level of the base vertex.
    pub level: usize,
    /// Rank of the base vertex within its level.
    pub base: u32,
    /// `images[i]` is the image of the base under `choices[i]`.
    pub images: Vec<u32>,
    /// `choices[0]` is the identity.
    pub choices: Vec<Perm>,
    inverses: Vec<Perm>,
    lookup: HashMap<u32, usize>,
}

impl Factor {
    fn new(level: usize, base: u32, entries: Vec<(u32, Perm)>) -> Self {
        let inverses = entries.iter().map(|(_, p)| p.inverse()).collect();
        let lookup = entries.iter().enumerate().map(|(i, (img, _))| (*img, i)).collect();
        let (images, choices) = entries.into_iter().unzip();
        Factor {
            level,
            base,
            images,
            choices,
            inverses,
            lookup,
        }
    }

    pub fn len(&self) -> usize {
        self.choices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.choices.is_empty()
    }
}

/// Image of vertex `u` at `level` under a permutation of the leaves of an
/// `n`-level tree.
#[inline]
pub fn vertex_image(g: &Perm, stride: u32, u: u32) -> u32 {
    g.apply(u * stride) / stride
}

fn stride(d: usize, n: usize, level: usize) -> u32 {
    (d as u32).pow((n - level) as u32)
}

/// Projects a level-`n` permutation to level `m <= n`.
pub fn project_perm(g: &Perm, d: usize, n: usize, m: usize) -> Perm {
    let s = stride(d, n, m);
    let len = (d as u32).pow(m as u32);
    Perm((0..len).map(|u| vertex_image(g, s, u)).collect())
}

#[derive(Clone, Debug)]
pub struct FactorChain {
    pub d: usize,
    pub n: usize,
    pub factors: Vec<Factor>,
}

impl FactorChain {
    /// Chain of the group generated by `gens` (permutations of `X^n`).
    pub fn build(d: usize, n: usize, gens: &[Perm]) -> Self {
        if d == 2 {
            Self::build_layered(n, gens)
        } else {
            Self::build_schreier_sims(d, n, gens)
        }
    }

    pub fn degree(&self) -> usize {
        self.d.pow(self.n as u32)
    }

    pub fn order(&self) -> BigUint {
        self.factors.iter().fold(BigUint::one(), |acc, f| acc * f.len())
    }

    /// Group order if it fits in a `u64`.
    pub fn order_u64(&self) -> Option<u64> {
        self.factors.iter().try_fold(1u64, |acc, f| acc.checked_mul(f.len() as u64))
    }

    /// Order of the factors at exactly this tree level.
    pub fn level_order(&self, level: usize) -> BigUint {
        self.factors
            .iter()
            .filter(|f| f.level == level)
            .fold(BigUint::one(), |acc, f| acc * f.len())
    }

    /// Strips `g` through the chain; returns the residue and whether every
    /// step succeeded.
    pub fn sift(&self, g: &Perm) -> (Perm, bool) {
        let mut g = g.clone();
        let mut tmp = Perm(Vec::with_capacity(g.degree()));
        for f in &self.factors {
            let img = vertex_image(&g, stride(self.d, self.n, f.level), f.base);
            if img == f.base {
                continue;
            }
            match f.lookup.get(&img) {
                Some(&i) => {
                    f.inverses[i].compose_into(&g, &mut tmp);
                    std::mem::swap(&mut g, &mut tmp);
                }
                None => return (g, false),
            }
        }
        let ok = g.is_identity();
        (g, ok)
    }

    pub fn contains(&self, g: &Perm) -> bool {
        self.sift(g).1
    }

    /// Chain of the image in `Aut(X^m)`, `m <= n`.
    pub fn project(&self, m: usize) -> FactorChain {
        assert!(m <= self.n);
        let factors = self
            .factors
            .iter()
            .filter(|f| f.level <= m)
            .map(|f| {
                let entries = f
                    .images
                    .iter()
                    .zip(&f.choices)
                    .map(|(&img, c)| (img, project_perm(c, self.d, self.n, m)))
                    .collect();
                Factor::new(f.level, f.base, entries)
            })
            .collect();
        FactorChain {
            d: self.d,
            n: m,
            factors,
        }
    }

    /// Chain of the subgroup fixing every vertex above `level`, i.e. the
    /// factors at tree levels `>= level`.
    pub fn stabilizer_chain(&self, level: usize) -> FactorChain {
        FactorChain {
            d: self.d,
            n: self.n,
            factors: self.factors.iter().filter(|f| f.level >= level).cloned().collect(),
        }
    }

    /// Non-identity coset representatives of the factors at `level`.
    pub fn level_generators(&self, level: usize) -> Vec<Perm> {
        self.factors
            .iter()
            .filter(|f| f.level == level)
            .flat_map(|f| f.choices[1..].iter().cloned())
            .collect()
    }

    /// A uniformly distributed element.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Perm {
        let mut acc = Perm::identity(self.degree());
        let mut tmp = Perm(Vec::with_capacity(acc.degree()));
        for f in &self.factors {
            let i = rng.gen_range(0..f.len());
            if i != 0 {
                acc.compose_into(&f.choices[i], &mut tmp);
                std::mem::swap(&mut acc, &mut tmp);
            }
        }
        acc
    }

    /// Folds over every element, in parallel. `reduce` must be associative
    /// and commutative for the result to be deterministic.
    pub fn fold_elements<A, I, F, R>(&self, init: I, fold: F, reduce: R) -> A
    where
        A: Send,
        I: Fn() -> A + Sync + Send,
        F: Fn(A, &Perm) -> A + Sync + Send,
        R: Fn(A, A) -> A + Sync + Send,
    {
        let m = self.factors.len();
        let mut split = 0;
        let mut width = 1usize;
        while split < m && width < 256 {
            width = width.saturating_mul(self.factors[split].len());
            split += 1;
        }
        let mut prefixes: Vec<Vec<usize>> = vec![Vec::new()];
        for f in &self.factors[..split] {
            prefixes = prefixes
                .into_iter()
                .flat_map(|p| {
                    (0..f.len()).map(move |i| {
                        let mut q = p.clone();
                        q.push(i);
                        q
                    })
                })
                .collect();
        }
        prefixes
            .par_iter()
            .map(|idx| {
                let mut start = Perm::identity(self.degree());
                for (f, &i) in self.factors[..split].iter().zip(idx) {
                    start = start.compose(&f.choices[i]);
                }
                self.fold_from(split, start, init(), &fold)
            })
            .reduce(&init, &reduce)
    }

    fn fold_from<A, F>(&self, s: usize, start: Perm, mut acc: A, fold: &F) -> A
    where
        F: Fn(A, &Perm) -> A,
    {
        let depth = self.factors.len() - s;
        let mut bufs = vec![start; depth + 1];
        let mut idx = vec![0usize; depth];
        let mut k = 0;
        loop {
            if k < depth {
                let (lo, hi) = bufs.split_at_mut(k + 1);
                lo[k].compose_into(&self.factors[s + k].choices[idx[k]], &mut hi[0]);
                k += 1;
                continue;
            }
            acc = fold(acc, &bufs[depth]);
            loop {
                if k == 0 {
                    return acc;
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < self.factors[s + k].len() {
                    break;
                }
                idx[k] = 0;
            }
        }
    }

    /// Binary trees only: an echelon basis over GF(2) per level.
    ///
    /// At level `l` an element fixing level `l - 1` is described by which
    /// level-`(l-1)` vertices have their two children swapped. Closure is
    /// reached once every square and commutator of basis elements sifts.
    pub fn build_layered(n: usize, gens: &[Perm]) -> Self {
        let deg = 1usize << n;
        // per level: (pivot vertex, element)
        let mut basis: Vec<Vec<(u32, Perm, Perm)>> = vec![Vec::new(); n + 1];
        let mut all: Vec<Perm> = Vec::new();
        let mut queue: Vec<Perm> = gens.iter().filter(|g| !g.is_identity()).cloned().collect();
        queue.reverse();
        while let Some(g) = queue.pop() {
            let Some((level, pivot, u)) = Self::layered_residue(n, &basis, g) else {
                continue;
            };
            let uinv = u.inverse();
            queue.push(u.compose(&u));
            for v in &all {
                let vinv = v.inverse();
                queue.push(u.compose(v).compose(&uinv).compose(&vinv));
            }
            all.push(u.clone());
            basis[level].push((pivot, u, uinv));
        }
        let factors = basis
            .into_iter()
            .enumerate()
            .flat_map(|(level, layer)| {
                layer.into_iter().map(move |(w, u, _)| {
                    Factor::new(level, 2 * w, vec![(2 * w, Perm::identity(deg)), (2 * w + 1, u)])
                })
            })
            .collect();
        FactorChain { d: 2, n, factors }
    }

    fn layered_residue(n: usize, basis: &[Vec<(u32, Perm, Perm)>], mut g: Perm) -> Option<(usize, u32, Perm)> {
        let mut tmp = Perm(Vec::with_capacity(g.degree()));
        for level in 1..=n {
            let s = 1u32 << (n - level);
            for (w, _, uinv) in &basis[level] {
                if vertex_image(&g, s, 2 * w) != 2 * w {
                    uinv.compose_into(&g, &mut tmp);
                    std::mem::swap(&mut g, &mut tmp);
                }
            }
            if let Some(w) = (0..1u32 << (level - 1)).find(|&w| vertex_image(&g, s, 2 * w) != 2 * w) {
                return Some((level, w, g));
            }
        }
        None
    }

    /// Deterministic Schreier-Sims with every vertex of levels `1..=n` as a
    /// base point, in level order.
    pub fn build_schreier_sims(d: usize, n: usize, gens: &[Perm]) -> Self {
        let deg = d.pow(n as u32);
        let mut base: Vec<(usize, u32)> = Vec::new();
        for level in 1..=n {
            for u in 0..d.pow(level as u32) as u32 {
                base.push((level, u));
            }
        }
        let k = base.len();
        let strides: Vec<u32> = base.iter().map(|&(l, _)| stride(d, n, l)).collect();
        let mut sgens: Vec<Vec<Perm>> = vec![Vec::new(); k];
        let mut orbits: Vec<Vec<(u32, Perm, Perm)>> = vec![Vec::new(); k];
        let mut lookups: Vec<HashMap<u32, usize>> = vec![HashMap::new(); k];

        let gens: Vec<Perm> = gens.iter().filter(|g| !g.is_identity()).cloned().collect();
        for l in 0..k {
            let fixes_prefix = |g: &Perm| (0..l).all(|j| vertex_image(g, strides[j], base[j].1) == base[j].1);
            sgens[l] = gens.iter().filter(|g| fixes_prefix(g)).cloned().collect();
        }
        let recompute = |l: usize, sg: &[Perm], orb: &mut Vec<(u32, Perm, Perm)>, look: &mut HashMap<u32, usize>| {
            orb.clear();
            look.clear();
            let b = base[l].1;
            orb.push((b, Perm::identity(deg), Perm::identity(deg)));
            look.insert(b, 0);
            let mut i = 0;
            while i < orb.len() {
                for s in sg {
                    let t = s.compose(&orb[i].1);
                    let img = vertex_image(&t, strides[l], b);
                    if !look.contains_key(&img) {
                        look.insert(img, orb.len());
                        let tinv = t.inverse();
                        orb.push((img, t, tinv));
                    }
                }
                i += 1;
            }
        };
        for l in 0..k {
            recompute(l, &sgens[l], &mut orbits[l], &mut lookups[l]);
        }
        let strip = |y: Perm, from: usize, orbits: &[Vec<(u32, Perm, Perm)>], lookups: &[HashMap<u32, usize>]| -> (Perm, usize) {
            let mut y = y;
            for l in from..k {
                let img = vertex_image(&y, strides[l], base[l].1);
                if img == base[l].1 {
                    continue;
                }
                match lookups[l].get(&img) {
                    Some(&i) => y = orbits[l][i].2.compose(&y),
                    None => return (y, l),
                }
            }
            (y, k)
        };
        let mut i = k;
        while i > 0 {
            let l = i - 1;
            let mut restart = None;
            'search: for p in 0..orbits[l].len() {
                for s in &sgens[l] {
                    let sp = s.compose(&orbits[l][p].1);
                    let img = vertex_image(&sp, strides[l], base[l].1);
                    let j = lookups[l][&img];
                    let y = orbits[l][j].2.compose(&sp);
                    let (h, stop) = strip(y, l + 1, &orbits, &lookups);
                    if !h.is_identity() {
                        restart = Some((h, stop));
                        break 'search;
                    }
                }
            }
            match restart {
                Some((h, stop)) => {
                    for m in l + 1..=stop.min(k - 1) {
                        sgens[m].push(h.clone());
                        recompute(m, &sgens[m], &mut orbits[m], &mut lookups[m]);
                    }
                    i = stop.min(k - 1) + 1;
                }
                None => i -= 1,
            }
        }
        let factors = base
            .iter()
            .zip(orbits)
            .filter(|(_, orb)| orb.len() > 1)
            .map(|(&(level, b), orb)| Factor::new(level, b, orb.into_iter().map(|(img, t, _)| (img, t)).collect()))
            .collect();
        FactorChain { d, n, factors }
    }
}
