//! Proportion scans: up a tower of extensions, or across primes.

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use super::periodic::FunctionalGraph;
use super::{MapError, RationalMap};
use crate::field::{build_field, prime::primes_in};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProportionRow {
    /// Extension degree over the prime field, or the prime for horizontal scans.
    pub key: u64,
    pub periodic: u64,
    pub total: u64,
    #[serde(skip)]
    pub proportion: Ratio<u64>,
}

impl ProportionRow {
    fn new(key: u64, periodic: u64, total: u64) -> Self {
        ProportionRow {
            key,
            periodic,
            total,
            proportion: Ratio::new(periodic, total),
        }
    }

    /// Proportion rounded half-to-even to three decimals.
    pub fn display(&self) -> String {
        format_half_even(&self.proportion, 3)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProportionTable {
    pub map: String,
    pub p: u64,
    pub base_degree: usize,
    pub rows: Vec<ProportionRow>,
}

/// Formats a non-negative rational with `digits` decimals, rounding ties to even.
pub fn format_half_even(r: &Ratio<u64>, digits: u32) -> String {
    let scale = 10u128.pow(digits);
    let num = *r.numer() as u128 * scale;
    let den = *r.denom() as u128;
    let mut q = num / den;
    let rem = num % den;
    if 2 * rem > den || (2 * rem == den && q % 2 == 1) {
        q += 1;
    }
    let int = q / scale;
    let frac = q % scale;
    if digits == 0 {
        int.to_string()
    } else {
        format!("{int}.{frac:0width$}", width = digits as usize)
    }
}

fn count_periodic(map: &RationalMap, p: u64, n: usize, budget: u64) -> Result<ProportionRow, MapError> {
    let field = build_field(p, n)?;
    let fm = map.reduce(&field)?;
    let g = FunctionalGraph::build(&fm, budget)?;
    let periodic = g.periodic_ranks().len() as u64;
    Ok(ProportionRow::new(n as u64, periodic, g.index().len() as u64))
}

/// Periodic proportions over `F_{p^{mk}}` for `k = 1..=k_max`. Rows are keyed
/// by `k`.
pub fn vertical_scan(
    map: &RationalMap,
    p: u64,
    base_degree: usize,
    k_max: usize,
    budget: u64,
) -> Result<ProportionTable, MapError> {
    // fail fast on the largest field before doing any work
    build_field(p, base_degree * k_max)?.check_budget(budget.saturating_sub(1))?;
    let rows = (1..=k_max)
        .into_par_iter()
        .map(|k| {
            count_periodic(map, p, base_degree * k, budget).map(|mut r| {
                r.key = k as u64;
                r
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ProportionTable {
        map: map.to_string(),
        p,
        base_degree,
        rows,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HorizontalScan {
    pub map: String,
    /// One row per prime of good reduction, keyed by the prime.
    pub rows: Vec<ProportionRow>,
    /// Primes skipped because the reduction is not a morphism of full degree.
    pub bad_primes: Vec<u64>,
    /// Running minimum of the proportion after each row.
    pub running_min: Vec<Ratio<u64>>,
}

/// Periodic proportions over `P^1(F_p)` for primes `p` in `lo..=hi`.
pub fn horizontal_scan(map: &RationalMap, lo: u64, hi: u64, budget: u64) -> Result<HorizontalScan, MapError> {
    let primes = primes_in(lo, hi);
    if primes.is_empty() {
        return Err(MapError::EmptyRange);
    }
    let results: Vec<(u64, Result<ProportionRow, MapError>)> = primes
        .par_iter()
        .map(|&p| {
            (
                p,
                count_periodic(map, p, 1, budget).map(|mut r| {
                    r.key = p;
                    r
                }),
            )
        })
        .collect();
    let mut rows = Vec::new();
    let mut bad_primes = Vec::new();
    for (p, r) in results {
        match r {
            Ok(row) => rows.push(row),
            Err(MapError::BadReduction { .. }) => bad_primes.push(p),
            Err(e) => return Err(e),
        }
    }
    let mut running_min = Vec::with_capacity(rows.len());
    let mut cur: Option<Ratio<u64>> = None;
    for row in &rows {
        let m = match cur {
            Some(c) if c <= row.proportion => c,
            _ => row.proportion,
        };
        cur = Some(m);
        running_min.push(m);
    }
    Ok(HorizontalScan {
        map: map.to_string(),
        rows,
        bad_primes,
        running_min,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::DEFAULT_ENUM_BUDGET;

    #[test]
    fn half_even_rounding() {
        assert_eq!(format_half_even(&Ratio::new(1, 8), 2), "0.12");
        assert_eq!(format_half_even(&Ratio::new(3, 8), 2), "0.38");
        assert_eq!(format_half_even(&Ratio::new(3, 4), 3), "0.750");
        assert_eq!(format_half_even(&Ratio::new(1, 1), 3), "1.000");
        assert_eq!(format_half_even(&Ratio::new(2, 3), 3), "0.667");
    }

    #[test]
    fn identity_is_fully_periodic() {
        let m = RationalMap::parse("x").unwrap();
        let t = vertical_scan(&m, 2, 1, 3, DEFAULT_ENUM_BUDGET).unwrap();
        let shown: Vec<_> = t.rows.iter().map(|r| r.display()).collect();
        assert_eq!(shown, ["1.000", "1.000", "1.000"]);
    }

    #[test]
    fn squaring_column() {
        let m = RationalMap::parse("x^2").unwrap();
        let t = vertical_scan(&m, 3, 1, 4, DEFAULT_ENUM_BUDGET).unwrap();
        let shown: Vec<_> = t.rows.iter().map(|r| r.display()).collect();
        assert_eq!(shown, ["0.750", "0.300", "0.536", "0.085"]);
    }

    #[test]
    fn horizontal_skips_bad_primes() {
        let m = RationalMap::parse("x^2/2").unwrap();
        let s = horizontal_scan(&m, 2, 7, DEFAULT_ENUM_BUDGET).unwrap();
        assert_eq!(s.bad_primes, vec![2]);
        assert_eq!(s.rows.len(), 3);
        let m = RationalMap::parse("x^2-1").unwrap();
        let s = horizontal_scan(&m, 3, 50, DEFAULT_ENUM_BUDGET).unwrap();
        assert_eq!(s.rows[0].display(), "0.750");
        assert!(s.bad_primes.is_empty());
        assert!(matches!(horizontal_scan(&m, 24, 28, DEFAULT_ENUM_BUDGET), Err(MapError::EmptyRange)));
    }
}
