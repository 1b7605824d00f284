//! Self-similar groups acting on the rooted d-ary tree.

use thiserror::Error;

pub mod audit;
pub mod automaton;
pub mod chain;
pub mod element;
pub mod nucleus;
pub mod perm;
pub mod quotient;

pub use automaton::{Automaton, AutomatonSpec, StateSpec};
pub use chain::{Factor, FactorChain};
pub use element::TreeElement;
pub use nucleus::{ends_fixed_class, exceptionality_consistency, n1_elements, nucleus, End, EndsClass, N1Element, Nucleus, NucleusOptions};
pub use perm::Perm;
pub use quotient::{build_level_quotient, fpp_report, FppLevel, FppMethod, FppOptions, FppReport, KernelH, LevelQuotient};

pub const DEFAULT_MAX_DEGREE: usize = 1 << 14;
pub const DEFAULT_MAX_ENUMERATION: u64 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("automaton schema error: {0}")]
    Schema(String),
    #[error("unknown state '{0}'")]
    UnknownState(String),
    #[error("letter {letter} is outside the alphabet 0..{d}")]
    BadLetter { letter: usize, d: usize },
    #[error("level {level} needs permutation degree {degree}, above the budget {budget}")]
    DegreeBudgetExceeded { level: usize, degree: u128, budget: usize },
    #[error("level {level} has group order {order}, above the enumeration budget {budget}")]
    NotEnumerated { level: usize, order: String, budget: u64 },
    #[error("no fixpoint within {0} iterations")]
    IterationBoundExceeded(usize),
}

/// Resource limits for level quotients.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Largest allowed `d^n`.
    pub max_degree: usize,
    /// Largest group order that is enumerated element by element.
    pub max_enumeration: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_degree: DEFAULT_MAX_DEGREE,
            max_enumeration: DEFAULT_MAX_ENUMERATION,
        }
    }
}

impl Budget {
    /// `d^n`, or an error if it exceeds the degree budget.
    pub fn degree(&self, d: usize, n: usize) -> Result<usize, TreeError> {
        let deg = (d as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
        if deg > self.max_degree as u128 {
            return Err(TreeError::DegreeBudgetExceeded {
                level: n,
                degree: deg,
                budget: self.max_degree,
            });
        }
        Ok(deg as usize)
    }
}

/// Formats a word over the alphabet, one digit or bracketed number per letter.
pub fn format_word(w: &[usize]) -> String {
    w.iter()
        .map(|&x| if x < 10 { x.to_string() } else { format!("[{x}]") })
        .collect()
}

/// Parses a word such as `"0110"`; letters above 9 are written `[12]`.
pub fn parse_word(s: &str, d: usize) -> Result<Vec<usize>, TreeError> {
    let mut out = Vec::new();
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        let x = if c == '[' {
            let num: String = chars.by_ref().take_while(|&c| c != ']').collect();
            num.parse::<usize>().map_err(|_| TreeError::Schema(format!("bad letter '[{num}]'")))?
        } else if let Some(v) = c.to_digit(10) {
            v as usize
        } else {
            return Err(TreeError::Schema(format!("bad letter '{c}'")));
        };
        if x >= d {
            return Err(TreeError::BadLetter { letter: x, d });
        }
        out.push(x);
    }
    Ok(out)
}
