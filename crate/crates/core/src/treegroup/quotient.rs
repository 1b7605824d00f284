//! Level quotients `G_n <= Aut(X^n)` and fixed-point proportions.

use num_bigint::BigUint;
use num_rational::Ratio;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::automaton::Automaton;
use super::chain::FactorChain;
use super::perm::Perm;
use super::{Budget, TreeError};

#[derive(Clone, Debug)]
pub struct LevelQuotient {
    pub d: usize,
    pub level: usize,
    /// Generator actions on `X^n`, words ranked first letter most significant.
    pub generators: Vec<Perm>,
    pub chain: FactorChain,
    pub order: BigUint,
    /// Whether the order is within the enumeration budget.
    pub enumerable: bool,
}

impl LevelQuotient {
    pub fn from_chain(generators: Vec<Perm>, chain: FactorChain, budget: &Budget) -> Self {
        let order = chain.order();
        let enumerable = chain.order_u64().is_some_and(|o| o <= budget.max_enumeration);
        LevelQuotient {
            d: chain.d,
            level: chain.n,
            generators,
            chain,
            order,
            enumerable,
        }
    }

    pub fn degree(&self) -> usize {
        self.chain.degree()
    }

    /// The quotient at a lower level, read off this one.
    pub fn project(&self, m: usize, budget: &Budget) -> LevelQuotient {
        let gens = self
            .generators
            .iter()
            .map(|g| super::chain::project_perm(g, self.d, self.level, m))
            .collect();
        Self::from_chain(gens, self.chain.project(m), budget)
    }

    pub fn order_u64(&self) -> Option<u64> {
        self.chain.order_u64()
    }

    /// Kernel of the restriction to level `n - 1`.
    pub fn kernel_h(&self) -> KernelH {
        let chain = self.chain.stabilizer_chain(self.level);
        KernelH {
            level: self.level,
            generators: chain.level_generators(self.level),
            order: chain.order(),
            chain,
        }
    }

    /// Exact proportion of elements fixing at least one leaf.
    pub fn fpp_exact(&self, budget: &Budget) -> Result<Ratio<u64>, TreeError> {
        let order = self.require_enumerable(budget)?;
        let hits = self.chain.fold_elements(|| 0u64, |a, g| a + g.has_fixed_point() as u64, |a, b| a + b);
        Ok(Ratio::new(hits, order))
    }

    pub fn require_enumerable(&self, budget: &Budget) -> Result<u64, TreeError> {
        match self.order_u64() {
            Some(o) if o <= budget.max_enumeration => Ok(o),
            _ => Err(TreeError::NotEnumerated {
                level: self.level,
                order: self.order.to_string(),
                budget: budget.max_enumeration,
            }),
        }
    }

    /// Uniform samples via the chain, split into fixed chunks so the result
    /// does not depend on the thread count.
    pub fn fpp_sampled(&self, samples: u64, seed: u64) -> u64 {
        const CHUNK: u64 = 1024;
        let chunks = samples.div_ceil(CHUNK);
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(c ^ ((self.level as u64) << 48));
                let len = CHUNK.min(samples - c * CHUNK);
                (0..len).filter(|_| self.chain.sample(&mut rng).has_fixed_point()).count() as u64
            })
            .sum()
    }
}

/// Pointwise stabilizer of level `n - 1` inside `G_n`.
#[derive(Clone, Debug)]
pub struct KernelH {
    pub level: usize,
    pub generators: Vec<Perm>,
    pub order: BigUint,
    pub chain: FactorChain,
}

/// Builds `G_n` from the automaton's generators.
pub fn build_level_quotient(aut: &Automaton, n: usize, budget: &Budget) -> Result<LevelQuotient, TreeError> {
    budget.degree(aut.alphabet_size(), n)?;
    let perms = aut.level_perms(n);
    let gens: Vec<Perm> = aut.generators().iter().map(|&g| perms[g].clone()).collect();
    let chain = FactorChain::build(aut.alphabet_size(), n, &gens);
    Ok(LevelQuotient::from_chain(gens, chain, budget))
}

/// Builds the top level once and reads off every lower level.
pub fn build_levels(aut: &Automaton, n_max: usize, budget: &Budget) -> Result<Vec<LevelQuotient>, TreeError> {
    let top = build_level_quotient(aut, n_max, budget)?;
    let mut out: Vec<LevelQuotient> = (1..n_max).map(|m| top.project(m, budget)).collect();
    out.push(top);
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FppMethod {
    Exact,
    Sampled,
}

#[derive(Clone, Debug, Serialize)]
pub struct FppLevel {
    pub level: usize,
    pub order: String,
    pub method: FppMethod,
    /// Exact value, or the sample proportion.
    #[serde(serialize_with = "ser_ratio")]
    pub value: Ratio<u64>,
    pub samples: Option<u64>,
    /// Standard error of the sample proportion.
    pub sigma: Option<f64>,
    /// Hoeffding half-width at the requested confidence.
    pub half_width: Option<f64>,
}

fn ser_ratio<S: serde::Serializer>(r: &Ratio<u64>, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
}

#[derive(Clone, Debug, Serialize)]
pub struct FppReport {
    pub name: String,
    pub levels: Vec<FppLevel>,
}

#[derive(Clone, Copy, Debug)]
pub struct FppOptions {
    pub budget: Budget,
    /// Overrides the Hoeffding sample count.
    pub samples: Option<u64>,
    pub epsilon: f64,
    pub delta: f64,
    pub seed: u64,
}

impl Default for FppOptions {
    fn default() -> Self {
        FppOptions {
            budget: Budget::default(),
            samples: None,
            epsilon: 0.01,
            delta: 0.05,
            seed: 0,
        }
    }
}

/// Sample count guaranteeing half-width `epsilon` with probability `1 - delta`.
pub fn hoeffding_samples(epsilon: f64, delta: f64) -> u64 {
    ((2.0 / delta).ln() / (2.0 * epsilon * epsilon)).ceil() as u64
}

pub fn hoeffding_half_width(samples: u64, delta: f64) -> f64 {
    ((2.0 / delta).ln() / (2.0 * samples as f64)).sqrt()
}

impl FppLevel {
    pub fn from_quotient(q: &LevelQuotient, opts: &FppOptions) -> Self {
        if q.enumerable {
            let value = q.fpp_exact(&opts.budget).expect("enumerable");
            return FppLevel {
                level: q.level,
                order: q.order.to_string(),
                method: FppMethod::Exact,
                value,
                samples: None,
                sigma: None,
                half_width: None,
            };
        }
        let n = opts.samples.unwrap_or_else(|| hoeffding_samples(opts.epsilon, opts.delta)).max(1);
        let hits = q.fpp_sampled(n, opts.seed);
        let p = hits as f64 / n as f64;
        FppLevel {
            level: q.level,
            order: q.order.to_string(),
            method: FppMethod::Sampled,
            value: Ratio::new(hits, n),
            samples: Some(n),
            sigma: Some((p * (1.0 - p) / n as f64).sqrt()),
            half_width: Some(hoeffding_half_width(n, opts.delta)),
        }
    }

    pub fn value_f64(&self) -> f64 {
        *self.value.numer() as f64 / *self.value.denom() as f64
    }
}

pub fn fpp_report(aut: &Automaton, n_max: usize, opts: &FppOptions) -> Result<FppReport, TreeError> {
    let levels = build_levels(aut, n_max, &opts.budget)?;
    Ok(FppReport {
        name: aut.name().to_string(),
        levels: levels.iter().map(|q| FppLevel::from_quotient(q, opts)).collect(),
    })
}
