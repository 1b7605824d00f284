//! Command-line frontend. `run` is pure apart from reading budget variables
//! from the environment, so identical arguments give identical output.

use std::ffi::OsString;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Ratio;
use serde::Serialize;
use serde_json::{json, Value};

use crate::catalog::{self, CatalogEntry};
use crate::classify::{classify, lattes_class_census, ramification_portrait, DEFAULT_MAX_EXTENSION};
use crate::dynamics::{format_half_even, horizontal_scan, vertical_scan, FieldMap, RationalMap};
use crate::field::{build_field, parse_field_spec, DEFAULT_ENUM_BUDGET};
use crate::lattes::{lattes_audit, DEFAULT_POINT_BUDGET};
use crate::treegroup::audit::martingale_check;
use crate::treegroup::{
    ends_fixed_class, exceptionality_consistency, fpp_report, n1_elements, nucleus, Automaton, Budget, EndsClass,
    FppOptions, NucleusOptions,
};

/// Environment variables overriding the default budgets.
pub const ENV_ENUM_BUDGET: &str = "PERDYN_ENUM_BUDGET";
pub const ENV_MAX_DEGREE: &str = "PERDYN_MAX_DEGREE";
pub const ENV_MAX_ENUMERATION: &str = "PERDYN_MAX_ENUMERATION";
pub const ENV_POINT_BUDGET: &str = "PERDYN_POINT_BUDGET";

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERDICT: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "perdyn", version, about = "Periodic points over finite fields and fixed-point proportions of tree groups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub jobs: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
pub struct MapField {
    /// Rational map in x, e.g. "(x^2-2)/x^2".
    #[arg(long)]
    pub map: String,
    /// GF(p) or GF(p^n).
    #[arg(long)]
    pub field: String,
}

#[derive(Args, Debug)]
pub struct AutArg {
    /// Catalog entry name, catalog entry file, or automaton file.
    #[arg(long)]
    pub aut: String,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Periodic proportions over F_{p^{mk}} for k = 1..nmax.
    PerTable {
        #[command(flatten)]
        mf: MapField,
        #[arg(long, value_parser = positive_usize)]
        nmax: usize,
    },
    /// Periodic proportions over F_p for primes p in [from, to].
    ScanHorizontal {
        #[arg(long)]
        map: String,
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        from: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        to: u64,
    },
    /// Portrait, Lattès and Chebyshev tests, exceptionality and normal form.
    Classify {
        #[command(flatten)]
        mf: MapField,
        #[arg(long, default_value_t = DEFAULT_MAX_EXTENSION, value_parser = positive_usize)]
        max_ext: usize,
    },
    /// Ramification portrait of the critical orbits.
    Portrait {
        #[command(flatten)]
        mf: MapField,
        #[arg(long, default_value_t = DEFAULT_MAX_EXTENSION, value_parser = positive_usize)]
        max_ext: usize,
    },
    /// Conjugacy classes of quadratic Lattès maps over GF(p^2).
    LattesCensus {
        #[arg(long)]
        p: u64,
    },
    /// Fixed-point proportions of the level quotients.
    Fpp {
        #[command(flatten)]
        aut: AutArg,
        #[arg(long, value_parser = positive_usize)]
        nmax: usize,
        /// Sample count for levels too large to enumerate.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        samples: Option<u64>,
        #[arg(long, default_value_t = 0.01)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Kernel orbit test for the fixed-vertex process.
    Martingale {
        #[command(flatten)]
        aut: AutArg,
        #[arg(long, value_parser = positive_usize)]
        nmax: usize,
    },
    /// Nucleus by repeated squaring.
    Nucleus {
        #[command(flatten)]
        aut: AutArg,
        #[arg(long, default_value_t = 16, value_parser = positive_usize)]
        max_iterations: usize,
        #[arg(long, default_value_t = 2048, value_parser = positive_usize)]
        max_states: usize,
    },
    /// Nucleus elements g with g(w) = w and g|_w = g, and the ends they fix.
    N1 {
        #[command(flatten)]
        aut: AutArg,
    },
    /// Ends fixed by a state.
    Ends {
        #[command(flatten)]
        aut: AutArg,
        #[arg(long)]
        state: String,
    },
    /// Periodic points of the Lattès map x -> k(x + 1/x) against the curve's Frobenius.
    Lattes {
        #[arg(long)]
        p: u64,
        #[arg(long, value_parser = positive_usize)]
        nmax: usize,
    },
    /// Bundled automata paired with rational maps.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Subcommand, Debug)]
pub enum CatalogAction {
    List,
    Show {
        name: String,
    },
    /// Transitivity, nucleus and ends consistency checks.
    Validate {
        /// Entries to check (default: all bundled).
        names: Vec<String>,
        #[arg(long, default_value_t = 8, value_parser = positive_usize)]
        levels: usize,
    },
}

fn positive_usize(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

/// Exit code and captured streams of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn usage(msg: impl std::fmt::Display) -> Self {
        Outcome {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Budgets {
    enumeration: u64,
    tree: Budget,
    points: u64,
}

fn env_u64(name: &str, default: u64) -> Result<u64, String> {
    match std::env::var(name) {
        Ok(v) => match v.trim().parse::<u64>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(format!("{name} must be a positive integer, got '{v}'")),
        },
        Err(_) => Ok(default),
    }
}

fn budgets_from_env() -> Result<Budgets, String> {
    let d = Budget::default();
    Ok(Budgets {
        enumeration: env_u64(ENV_ENUM_BUDGET, DEFAULT_ENUM_BUDGET)?,
        tree: Budget {
            max_degree: env_u64(ENV_MAX_DEGREE, d.max_degree as u64)? as usize,
            max_enumeration: env_u64(ENV_MAX_ENUMERATION, d.max_enumeration)?,
        },
        points: env_u64(ENV_POINT_BUDGET, DEFAULT_POINT_BUDGET)?,
    })
}

/// A rendered result: JSON document, CSV table, and whether every check passed.
struct Report {
    json: Value,
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
    ok: bool,
}

impl Report {
    fn new(json: Value, header: Vec<&'static str>, rows: Vec<Vec<String>>) -> Self {
        Report { json, header, rows, ok: true }
    }

    fn verdict(mut self, ok: bool) -> Self {
        self.ok = ok;
        self
    }

    fn render(&self, format: Format) -> Result<String, String> {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).map_err(|e| e.to_string())?;
                s.push('\n');
                Ok(s)
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.header).map_err(|e| e.to_string())?;
                for r in &self.rows {
                    w.write_record(r).map_err(|e| e.to_string())?;
                }
                let bytes = w.into_inner().map_err(|e| e.to_string())?;
                String::from_utf8(bytes).map_err(|e| e.to_string())
            }
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<Value, String> {
    serde_json::to_value(v).map_err(|e| e.to_string())
}

fn ratio(r: &Ratio<u64>) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn reduce_map(mf: &MapField) -> Result<FieldMap, String> {
    let spec = parse_field_spec(&mf.field).map_err(|e| e.to_string())?;
    let field = build_field(spec.p, spec.n).map_err(|e| e.to_string())?;
    let map = RationalMap::parse(&mf.map).map_err(|e| e.to_string())?;
    map.reduce(&field).map_err(|e| e.to_string())
}

/// A catalog entry when the source names one, otherwise a bare automaton.
fn load_source(src: &str) -> Result<(Automaton, Option<CatalogEntry>), String> {
    match catalog::load_entry(src) {
        Ok(e) => Ok((e.automaton.clone(), Some(e))),
        Err(catalog::CatalogError::UnknownEntry(_)) | Err(catalog::CatalogError::Schema(_)) => {
            catalog::load_automaton(src).map(|a| (a, None)).map_err(|e| e.to_string())
        }
        Err(e) => Err(e.to_string()),
    }
}

fn ends_json(c: &EndsClass) -> (String, String, String) {
    match c {
        EndsClass::None => ("none".into(), "0".into(), String::new()),
        EndsClass::Finite { count, ends } => (
            "finite".into(),
            count.to_string(),
            ends.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(";"),
        ),
        EndsClass::Infinite => ("infinite".into(), "inf".into(), String::new()),
    }
}

fn automaton_rows(aut: &Automaton) -> Vec<Vec<String>> {
    (0..aut.state_count())
        .map(|s| {
            let perm = aut.perm(s).iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
            let rest = (0..aut.alphabet_size())
                .map(|x| aut.state_name(aut.restriction(s, x)).to_string())
                .collect::<Vec<_>>()
                .join(" ");
            vec![aut.state_name(s).to_string(), perm, rest]
        })
        .collect()
}

fn execute(cmd: &Command, b: &Budgets) -> Result<Report, String> {
    match cmd {
        Command::PerTable { mf, nmax } => {
            let spec = parse_field_spec(&mf.field).map_err(|e| e.to_string())?;
            let map = RationalMap::parse(&mf.map).map_err(|e| e.to_string())?;
            let t = vertical_scan(&map, spec.p, spec.n, *nmax, b.enumeration).map_err(|e| e.to_string())?;
            let rows: Vec<Vec<String>> = t
                .rows
                .iter()
                .map(|r| {
                    let n = r.key * spec.n as u64;
                    vec![n.to_string(), r.periodic.to_string(), r.total.to_string(), r.display()]
                })
                .collect();
            let json = json!({
                "map": t.map,
                "field": spec.to_string(),
                "rows": t.rows.iter().map(|r| json!({
                    "n": r.key * spec.n as u64,
                    "periodic": r.periodic,
                    "total": r.total,
                    "proportion": r.display(),
                    "exact": ratio(&r.proportion),
                })).collect::<Vec<_>>(),
            });
            Ok(Report::new(json, vec!["n", "periodic", "total", "proportion"], rows))
        }
        Command::ScanHorizontal { map, from, to } => {
            if from > to {
                return Err(format!("empty prime range [{from}, {to}]"));
            }
            let m = RationalMap::parse(map).map_err(|e| e.to_string())?;
            let s = horizontal_scan(&m, *from, *to, b.enumeration).map_err(|e| e.to_string())?;
            let rows = s
                .rows
                .iter()
                .zip(&s.running_min)
                .map(|(r, m)| {
                    vec![r.key.to_string(), r.periodic.to_string(), r.total.to_string(), r.display(), format_half_even(m, 3)]
                })
                .collect();
            let json = json!({
                "map": s.map,
                "rows": s.rows.iter().zip(&s.running_min).map(|(r, m)| json!({
                    "p": r.key,
                    "periodic": r.periodic,
                    "total": r.total,
                    "proportion": r.display(),
                    "exact": ratio(&r.proportion),
                    "running_min": ratio(m),
                })).collect::<Vec<_>>(),
                "bad_primes": s.bad_primes,
            });
            Ok(Report::new(json, vec!["p", "periodic", "total", "proportion", "running_min"], rows))
        }
        Command::Classify { mf, max_ext } => {
            let fm = reduce_map(mf)?;
            let c = classify(&fm, *max_ext).map_err(|e| e.to_string())?;
            let json = to_json(&c)?;
            let nf = match &c.normal_form {
                Some(n) => to_json(n)?.to_string(),
                None => String::new(),
            };
            let rows = vec![vec![
                c.map.clone(),
                c.field.clone(),
                c.portrait.shape.name().to_string(),
                c.lattes.to_string(),
                c.chebyshev_conjugate.to_string(),
                c.exceptional.verdict.clone(),
                nf,
            ]];
            Ok(Report::new(
                json,
                vec!["map", "field", "shape", "lattes", "chebyshev_conjugate", "exceptional", "normal_form"],
                rows,
            ))
        }
        Command::Portrait { mf, max_ext } => {
            let fm = reduce_map(mf)?;
            let p = ramification_portrait(&fm, *max_ext).map_err(|e| e.to_string())?;
            let rows = p
                .vertices
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    vec![
                        i.to_string(),
                        v.point.clone(),
                        v.critical.to_string(),
                        v.ramification.to_string(),
                        v.degree.to_string(),
                        v.next.to_string(),
                    ]
                })
                .collect();
            Ok(Report::new(
                to_json(&p)?,
                vec!["index", "point", "critical", "ramification", "degree", "next"],
                rows,
            ))
        }
        Command::LattesCensus { p } => {
            let c = lattes_class_census(*p).map_err(|e| e.to_string())?;
            let rows = c
                .classes
                .iter()
                .enumerate()
                .map(|(i, k)| vec![i.to_string(), k.shape.name().to_string(), k.maps.len().to_string(), k.maps.join(";")])
                .collect();
            Ok(Report::new(to_json(&c)?, vec!["class", "shape", "size", "maps"], rows))
        }
        Command::Fpp {
            aut,
            nmax,
            samples,
            epsilon,
            delta,
            seed,
        } => {
            if !(*epsilon > 0.0 && *epsilon < 1.0 && *delta > 0.0 && *delta < 1.0) {
                return Err("epsilon and delta must lie in (0, 1)".into());
            }
            let (a, _) = load_source(&aut.aut)?;
            let opts = FppOptions {
                budget: b.tree,
                samples: *samples,
                epsilon: *epsilon,
                delta: *delta,
                seed: *seed,
            };
            let r = fpp_report(&a, *nmax, &opts).map_err(|e| e.to_string())?;
            let rows = r
                .levels
                .iter()
                .map(|l| {
                    vec![
                        l.level.to_string(),
                        l.order.clone(),
                        to_json(&l.method).map(|v| v.as_str().unwrap_or_default().to_string()).unwrap_or_default(),
                        ratio(&l.value),
                        format!("{:.6}", l.value_f64()),
                        opt(l.samples),
                        opt(l.sigma.map(|s| format!("{s:.6}"))),
                        opt(l.half_width.map(|s| format!("{s:.6}"))),
                        seed.to_string(),
                    ]
                })
                .collect();
            let mut json = to_json(&r)?;
            json["seed"] = json!(seed);
            json["delta"] = json!(delta);
            Ok(Report::new(
                json,
                vec!["level", "order", "method", "value", "decimal", "samples", "sigma", "half_width", "seed"],
                rows,
            ))
        }
        Command::Martingale { aut, nmax } => {
            let (a, _) = load_source(&aut.aut)?;
            let levels = martingale_check(&a, *nmax, &b.tree).map_err(|e| e.to_string())?;
            let ok = levels.iter().all(|l| l.holds);
            let rows = levels
                .iter()
                .map(|l| vec![l.level.to_string(), l.kernel_order.to_string(), opt(l.orbit_size), l.holds.to_string()])
                .collect();
            let json = json!({"name": a.name(), "levels": to_json(&levels)?, "holds": ok});
            Ok(Report::new(json, vec!["level", "kernel_order", "orbit_size", "holds"], rows).verdict(ok))
        }
        Command::Nucleus {
            aut,
            max_iterations,
            max_states,
        } => {
            let (a, entry) = load_source(&aut.aut)?;
            let opts = NucleusOptions {
                max_iterations: *max_iterations,
                max_states: *max_states,
            };
            let nuc = nucleus(&a, &opts);
            let na = &nuc.automaton;
            let mut json = json!({
                "name": a.name(),
                "complete": nuc.complete,
                "iterations": nuc.iterations,
                "size": na.state_count(),
                "automaton": to_json(&na.to_spec())?,
            });
            let mut ok = nuc.complete;
            if let Some(e) = entry {
                let c = exceptionality_consistency(&nuc, e.derived.exceptional);
                ok &= c.consistent;
                json["consistency"] = to_json(&c)?;
            }
            Ok(Report::new(json, vec!["state", "perm", "rest"], automaton_rows(na)).verdict(ok))
        }
        Command::N1 { aut } => {
            let (a, _) = load_source(&aut.aut)?;
            let nuc = nucleus(&a, &NucleusOptions::default());
            let na = &nuc.automaton;
            let mut rows = Vec::new();
            let mut items = Vec::new();
            for e in n1_elements(na) {
                let s = na.state_index(&e.state).ok_or("state of the nucleus")?;
                let c = ends_fixed_class(na, s);
                let (class, count, ends) = ends_json(&c);
                rows.push(vec![e.state.clone(), e.witness.clone(), e.trivial.to_string(), class, count, ends]);
                items.push(json!({"element": to_json(&e)?, "ends": to_json(&c)?}));
            }
            let json = json!({"name": a.name(), "nucleus_complete": nuc.complete, "n1": items});
            Ok(Report::new(json, vec!["state", "witness", "trivial", "ends", "count", "fixed_ends"], rows).verdict(nuc.complete))
        }
        Command::Ends { aut, state } => {
            let (a, _) = load_source(&aut.aut)?;
            let s = a.state_index(state).ok_or_else(|| format!("unknown state '{state}'"))?;
            let c = ends_fixed_class(&a, s);
            let (class, count, ends) = ends_json(&c);
            let json = json!({"name": a.name(), "state": state, "ends": to_json(&c)?});
            Ok(Report::new(json, vec!["state", "ends", "count", "fixed_ends"], vec![vec![state.clone(), class, count, ends]]))
        }
        Command::Lattes { p, nmax } => {
            let r = lattes_audit(*p, *nmax, b.points).map_err(|e| e.to_string())?;
            let rows = r
                .levels
                .iter()
                .map(|l| {
                    vec![
                        l.n.to_string(),
                        l.points.to_string(),
                        l.periodic.to_string(),
                        ratio(&l.proportion),
                        l.v_minus.to_string(),
                        l.v_plus.to_string(),
                        l.designated.to_string(),
                        l.partition_invariant.to_string(),
                        l.tree_audit.holds.to_string(),
                        l.side_quarter_bound.to_string(),
                        l.eighth_bound.to_string(),
                        l.hasse_ok.to_string(),
                        l.conjugate_agrees.to_string(),
                    ]
                })
                .collect();
            Ok(Report::new(
                to_json(&r)?,
                vec![
                    "n",
                    "points",
                    "periodic",
                    "proportion",
                    "v_minus",
                    "v_plus",
                    "designated",
                    "partition_invariant",
                    "tree_audit",
                    "side_quarter_bound",
                    "eighth_bound",
                    "hasse_ok",
                    "conjugate_agrees",
                ],
                rows,
            )
            .verdict(r.passed))
        }
        Command::Catalog { action } => catalog_command(action, b),
    }
}

fn catalog_command(action: &CatalogAction, b: &Budgets) -> Result<Report, String> {
    let entry_row = |e: &CatalogEntry| {
        vec![
            e.spec.name.clone(),
            e.automaton.alphabet_size().to_string(),
            e.spec.automaton.states.len().to_string(),
            e.spec.map.clone(),
            e.spec.prime.to_string(),
            e.derived.exceptional.to_string(),
            e.derived.lattes.to_string(),
            e.derived.chebyshev_conjugate.to_string(),
        ]
    };
    let header = vec!["name", "alphabet_size", "states", "map", "prime", "exceptional", "lattes", "chebyshev_conjugate"];
    match action {
        CatalogAction::List => {
            let all = catalog::load_all().map_err(|e| e.to_string())?;
            let json = Value::Array(
                all.iter()
                    .map(|e| {
                        json!({
                            "name": e.spec.name,
                            "alphabet_size": e.automaton.alphabet_size(),
                            "map": e.spec.map,
                            "prime": e.spec.prime,
                            "expect": to_json(&e.derived).unwrap_or(Value::Null),
                        })
                    })
                    .collect(),
            );
            Ok(Report::new(json, header, all.iter().map(entry_row).collect()))
        }
        CatalogAction::Show { name } => {
            let e = catalog::load_entry(name).map_err(|e| e.to_string())?;
            Ok(Report::new(to_json(&e.spec)?, header, vec![entry_row(&e)]))
        }
        CatalogAction::Validate { names, levels } => {
            let names: Vec<String> = if names.is_empty() {
                catalog::list().into_iter().map(String::from).collect()
            } else {
                names.clone()
            };
            let mut reports = Vec::new();
            for n in &names {
                let e = catalog::load_entry(n).map_err(|e| e.to_string())?;
                reports.push(catalog::validate(&e, *levels, &b.tree).map_err(|e| e.to_string())?);
            }
            let ok = reports.iter().all(|r| r.passed);
            let rows = reports
                .iter()
                .map(|r| {
                    vec![
                        r.name.clone(),
                        r.level_transitive.to_string(),
                        r.nucleus_states.len().to_string(),
                        r.nucleus_complete.to_string(),
                        r.nucleus_closed.to_string(),
                        r.consistency.consistent.to_string(),
                        r.passed.to_string(),
                    ]
                })
                .collect();
            Ok(Report::new(
                to_json(&reports)?,
                vec!["name", "level_transitive", "nucleus_size", "nucleus_complete", "nucleus_closed", "consistent", "passed"],
                rows,
            )
            .verdict(ok))
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let budgets = match budgets_from_env() {
        Ok(b) => b,
        Err(e) => return Outcome::usage(e),
    };
    let exec = || execute(&cli.command, &budgets);
    let result = match cli.jobs {
        Some(j) => match rayon::ThreadPoolBuilder::new().num_threads(j as usize).build() {
            Ok(pool) => pool.install(exec),
            Err(e) => return Outcome::usage(e),
        },
        None => exec(),
    };
    let report = match result {
        Ok(r) => r,
        Err(e) => return Outcome::usage(e),
    };
    match report.render(cli.format) {
        Ok(stdout) => Outcome {
            code: if report.ok { EXIT_OK } else { EXIT_VERDICT },
            stdout,
            stderr: String::new(),
        },
        Err(e) => Outcome::usage(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn go(args: &str) -> Outcome {
        run(std::iter::once("perdyn").chain(args.split_whitespace()))
    }

    #[test]
    fn per_table_csv() {
        let o = go("per-table --map x^2-1 --field GF(3) --nmax 3 --format csv");
        assert_eq!(o.code, 0, "{}", o.stderr);
        assert!(o.stdout.starts_with("n,periodic,total,proportion\n1,"));
        assert_eq!(o.stdout.lines().count(), 4);
    }

    #[test]
    fn usage_errors() {
        assert_eq!(go("per-table --map x^2 --field GF(4) --nmax 2").code, EXIT_USAGE);
        assert_eq!(go("per-table --map x^2 --field GF(3) --nmax 0").code, EXIT_USAGE);
        assert_eq!(go("fpp --aut nowhere --nmax 2").code, EXIT_USAGE);
        assert_eq!(go("frobnicate").code, EXIT_USAGE);
        assert_eq!(go("--help").code, EXIT_OK);
    }

    #[test]
    fn fpp_odometer() {
        let o = go("fpp --aut odometer --nmax 4 --format csv");
        assert_eq!(o.code, 0);
        let values: Vec<&str> = o.stdout.lines().skip(1).map(|l| l.split(',').nth(3).unwrap()).collect();
        assert_eq!(values, ["1/2", "1/4", "1/8", "1/16"]);
    }

    #[test]
    fn ends_chebyshev() {
        let o = go("ends --aut chebyshev2 --state b --format csv");
        assert_eq!(o.code, 0);
        assert_eq!(o.stdout.lines().nth(1), Some("b,finite,1,(1)^inf"));
        assert_eq!(go("ends --aut chebyshev2 --state zz").code, EXIT_USAGE);
    }

    #[test]
    fn jobs_do_not_change_output() {
        let a = go("fpp --aut basilica --nmax 6 --samples 2000 --jobs 1");
        let b = go("fpp --aut basilica --nmax 6 --samples 2000 --jobs 3");
        assert_eq!(a, b);
    }
}
