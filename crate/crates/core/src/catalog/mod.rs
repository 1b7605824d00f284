//! Bundled wreath recursions paired with the rational maps they model.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classify::{classify, ClassifyError, DEFAULT_MAX_EXTENSION};
use crate::dynamics::{FieldMap, MapError, RationalMap};
use crate::field::{build_field, FieldError};
use crate::treegroup::audit::level_transitive;
use crate::treegroup::nucleus::ConsistencyReport;
use crate::treegroup::{exceptionality_consistency, nucleus, Automaton, AutomatonSpec, Budget, NucleusOptions, TreeElement, TreeError};

const BUNDLED: &[(&str, &str)] = &[
    ("basilica", include_str!("../../data/basilica.json")),
    ("chebyshev2", include_str!("../../data/chebyshev2.json")),
    ("odometer", include_str!("../../data/odometer.json")),
    ("z2plusi", include_str!("../../data/z2plusi.json")),
];

/// Levels at which relations are checked on load.
pub const RELATION_LEVELS: usize = 10;

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("catalog schema error: {0}")]
    Schema(String),
    #[error("unknown catalog entry '{0}'")]
    UnknownEntry(String),
    #[error("entry '{entry}' failed validation: {relation}")]
    Validation { entry: String, relation: String },
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error("cannot read '{path}': {msg}")]
    Io { path: String, msg: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectations {
    pub exceptional: bool,
    pub lattes: bool,
    pub chebyshev_conjugate: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntrySpec {
    pub name: String,
    pub automaton: AutomatonSpec,
    pub map: String,
    pub prime: u64,
    pub expect: Expectations,
    /// Words that must act trivially.
    #[serde(default)]
    pub relations: Vec<String>,
    pub provenance: String,
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub spec: EntrySpec,
    pub automaton: Automaton,
    pub map: FieldMap,
    /// Re-derived from the map, equal to `spec.expect`.
    pub derived: Expectations,
}

pub fn list() -> Vec<&'static str> {
    BUNDLED.iter().map(|(n, _)| *n).collect()
}

/// Loads a bundled entry by name, or a JSON file by path.
pub fn load_entry(name_or_path: &str) -> Result<CatalogEntry, CatalogError> {
    if let Some((_, text)) = BUNDLED.iter().find(|(n, _)| *n == name_or_path) {
        return parse_entry(text);
    }
    if std::path::Path::new(name_or_path).exists() {
        let text = std::fs::read_to_string(name_or_path).map_err(|e| CatalogError::Io {
            path: name_or_path.into(),
            msg: e.to_string(),
        })?;
        return parse_entry(&text);
    }
    Err(CatalogError::UnknownEntry(name_or_path.into()))
}

pub fn load_all() -> Result<Vec<CatalogEntry>, CatalogError> {
    list().into_iter().map(load_entry).collect()
}

/// Bundled automaton by name, or an automaton/catalog JSON file.
pub fn load_automaton(name_or_path: &str) -> Result<Automaton, CatalogError> {
    if BUNDLED.iter().any(|(n, _)| *n == name_or_path) {
        return Ok(load_entry(name_or_path)?.automaton);
    }
    let text = std::fs::read_to_string(name_or_path).map_err(|e| CatalogError::Io {
        path: name_or_path.into(),
        msg: e.to_string(),
    })?;
    if let Ok(entry) = serde_json::from_str::<EntrySpec>(&text) {
        return Ok(Automaton::from_spec(&entry.automaton)?);
    }
    Ok(Automaton::from_json(&text)?)
}

pub fn parse_entry(text: &str) -> Result<CatalogEntry, CatalogError> {
    let spec: EntrySpec = serde_json::from_str(text).map_err(|e| CatalogError::Schema(e.to_string()))?;
    let automaton = Automaton::from_spec(&spec.automaton)?;
    let fail = |relation: String| CatalogError::Validation {
        entry: spec.name.clone(),
        relation,
    };
    // minimization is idempotent
    let again = Automaton::from_spec(&automaton.to_spec())?;
    if again.state_count() != automaton.state_count() {
        return Err(fail("minimization is not stable".into()));
    }
    let perms = automaton.level_perms(RELATION_LEVELS);
    for rel in &spec.relations {
        let g = TreeElement::parse(&automaton, rel)?;
        if !g.level_perm(&perms).is_identity() {
            return Err(fail(format!("{rel} = 1 up to level {RELATION_LEVELS}")));
        }
    }
    let field = build_field(spec.prime, 1)?;
    let map = RationalMap::parse(&spec.map)?.reduce(&field)?;
    let c = classify(&map, DEFAULT_MAX_EXTENSION)?;
    let derived = Expectations {
        exceptional: c.exceptional.verdict == "exceptional",
        lattes: c.lattes,
        chebyshev_conjugate: c.chebyshev_conjugate,
    };
    if derived != spec.expect {
        return Err(fail(format!("classification of {} over GF({}) is {:?}", spec.map, spec.prime, derived)));
    }
    Ok(CatalogEntry {
        spec,
        automaton,
        map,
        derived,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub name: String,
    pub level_transitive_to: usize,
    pub level_transitive: bool,
    pub nucleus_states: Vec<String>,
    pub nucleus_complete: bool,
    pub nucleus_closed: bool,
    pub consistency: ConsistencyReport,
    pub passed: bool,
}

/// Level transitivity, nucleus termination and closure, and agreement of
/// `N_1` ends with the paired map's exceptionality.
pub fn validate(entry: &CatalogEntry, levels: usize, budget: &Budget) -> Result<ValidationReport, CatalogError> {
    let aut = &entry.automaton;
    let transitive = level_transitive(aut, levels, budget)?.iter().all(|l| l.transitive);
    let nuc = nucleus(aut, &NucleusOptions::default());
    let na = &nuc.automaton;
    let closed = (0..na.state_count()).all(|s| (0..na.alphabet_size()).all(|x| na.restriction(s, x) < na.state_count()));
    let consistency = exceptionality_consistency(&nuc, entry.derived.exceptional);
    let mut names: Vec<String> = nuc.state_names();
    names.sort();
    Ok(ValidationReport {
        name: entry.spec.name.clone(),
        level_transitive_to: levels,
        level_transitive: transitive,
        passed: transitive && nuc.complete && closed && consistency.consistent,
        nucleus_states: names,
        nucleus_complete: nuc.complete,
        nucleus_closed: closed,
        consistency,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_entries_load() {
        let all = load_all().unwrap();
        assert_eq!(all.len(), 4);
        let cheb = load_entry("chebyshev2").unwrap();
        assert!(cheb.derived.exceptional && cheb.derived.chebyshev_conjugate);
        assert!(matches!(load_entry("nope"), Err(CatalogError::UnknownEntry(_))));
    }

    #[test]
    fn wrong_expectation_is_rejected() {
        let text = include_str!("../../data/basilica.json").replace(r#""exceptional": false"#, r#""exceptional": true"#);
        assert!(matches!(parse_entry(&text), Err(CatalogError::Validation { .. })));
        let text = include_str!("../../data/odometer.json").replace(r#""relations": []"#, r#""relations": ["a*a"]"#);
        assert!(matches!(parse_entry(&text), Err(CatalogError::Validation { .. })));
    }

    #[test]
    fn battery_passes() {
        let b = Budget::default();
        for e in load_all().unwrap() {
            let r = validate(&e, 8, &b).unwrap();
            assert!(r.passed, "{}: {:?}", e.spec.name, r);
        }
    }
}
