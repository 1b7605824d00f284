//! End-to-end acceptance run. Prints one line per criterion and exits
//! nonzero on any failure other than the known finite-level counterexamples
//! to the 1/8 Lattès bound.

use std::process::ExitCode;
use std::time::Instant;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use perdyn::catalog;
use perdyn::classify::{classify, lattes_class_census, DEFAULT_MAX_EXTENSION};
use perdyn::cli;
use perdyn::dynamics::{format_half_even, periodic_points_graph, periodic_points_iterate, vertical_scan, FieldMap, RationalMap};
use perdyn::field::{build_field, DEFAULT_ENUM_BUDGET};
use perdyn::lattes::{lattes_audit, DEFAULT_POINT_BUDGET};
use perdyn::treegroup::audit::{burnside_audit, conditional_expectation_audit, horb_audit, martingale_level};
use perdyn::treegroup::quotient::build_levels;
use perdyn::treegroup::{
    exceptionality_consistency, nucleus, Automaton, Budget, EndsClass, FppLevel, FppMethod, FppOptions, NucleusOptions,
    TreeElement, TreeError,
};

type Outcome = Result<String, String>;

const TABLE_MAPS: [&str; 6] = ["x^2", "x^2-1", "x^2-2", "(x^2-2)/x^2", "(x^2-2)/(x^2-1)", "(x^2-1)/x^2"];

/// Thousandths, one row per n = 1..10, columns in `TABLE_MAPS` order.
const TABLE: [[u32; 6]; 10] = [
    [750, 750, 500, 250, 500, 750],
    [300, 500, 400, 300, 200, 500],
    [536, 214, 393, 250, 286, 321],
    [85, 61, 293, 329, 73, 159],
    [504, 299, 377, 250, 254, 176],
    [127, 60, 314, 325, 52, 105],
    [501, 85, 375, 250, 250, 43],
    [32, 17, 266, 315, 23, 46],
    [500, 31, 375, 250, 250, 14],
    [125, 11, 313, 328, 3, 21],
];

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn table_reproduction() -> Outcome {
    let start = Instant::now();
    let mut exact = 0;
    for (col, src) in TABLE_MAPS.iter().enumerate() {
        let map = RationalMap::parse(src).map_err(|e| e.to_string())?;
        let t = vertical_scan(&map, 3, 1, 10, DEFAULT_ENUM_BUDGET).map_err(|e| e.to_string())?;
        for (row, r) in t.rows.iter().enumerate() {
            let shown: u32 = r.display().replace('.', "").parse().map_err(|e| format!("{e}"))?;
            let printed = TABLE[row][col];
            check(shown.abs_diff(printed) <= 1, || {
                format!("{src} at n={}: computed {} vs printed 0.{printed:03}", row + 1, r.display())
            })?;
            exact += (shown == printed) as usize;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(secs < 10.0, || format!("took {secs:.1}s"))?;
    Ok(format!("{exact}/60 entries exact, all within 1 ulp, {secs:.2}s"))
}

fn random_quadratic(field: &perdyn::field::Field, rng: &mut ChaCha8Rng) -> FieldMap {
    let size = field.size().expect("small field");
    loop {
        let mut coeff = || field.unrank(rng.gen_range(0..size));
        let num = vec![coeff(), coeff(), coeff()];
        let den = vec![coeff(), coeff(), coeff()];
        if num[2].is_zero() && den[2].is_zero() {
            continue;
        }
        if let Ok(m) = FieldMap::new(field.clone(), num, den) {
            if m.degree() == 2 {
                return m;
            }
        }
    }
}

fn oracle_equivalence() -> Outcome {
    let mut compared = 0;
    for src in TABLE_MAPS {
        let map = RationalMap::parse(src).map_err(|e| e.to_string())?;
        for n in 1..=10 {
            let fm = map.reduce(&build_field(3, n).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
            let a = periodic_points_iterate(&fm, DEFAULT_ENUM_BUDGET).map_err(|e| e.to_string())?;
            let b = periodic_points_graph(&fm, DEFAULT_ENUM_BUDGET).map_err(|e| e.to_string())?;
            check(a == b, || format!("{src} over GF(3^{n})"))?;
            compared += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for (p, n) in [(3, 2), (5, 2)] {
        let field = build_field(p, n).map_err(|e| e.to_string())?;
        for _ in 0..200 {
            let fm = random_quadratic(&field, &mut rng);
            let a = periodic_points_iterate(&fm, DEFAULT_ENUM_BUDGET).map_err(|e| e.to_string())?;
            let b = periodic_points_graph(&fm, DEFAULT_ENUM_BUDGET).map_err(|e| e.to_string())?;
            check(a == b, || format!("{} over GF({p}^{n})", fm.display()))?;
            compared += 1;
        }
    }
    Ok(format!("{compared} maps agree"))
}

fn lower_degree_count() -> Outcome {
    let mut pattern = Vec::new();
    for k in 2..=10usize {
        let f = build_field(3, k).map_err(|e| e.to_string())?;
        let count = f
            .enumerate(DEFAULT_ENUM_BUDGET)
            .map_err(|e| e.to_string())?
            .filter(|e| f.element_degree(e) < k)
            .count() as f64;
        let bound = 2.0 * 3f64.powf(k as f64 / 2.0);
        check(count <= bound, || format!("k={k}: {count} > {bound:.1}"))?;
        pattern.push(format!("k={k}:{count}/{bound:.0}"));
    }
    Ok(pattern.join(" "))
}

fn classification_suite() -> Outcome {
    let run = |src: &str, p: u64| {
        let f = build_field(p, 1).map_err(|e| e.to_string())?;
        let m = RationalMap::parse(src).and_then(|m| m.reduce(&f)).map_err(|e| e.to_string())?;
        classify(&m, DEFAULT_MAX_EXTENSION).map_err(|e| e.to_string())
    };
    let c = run("(x^2-2)/x^2", 3)?;
    check(c.lattes, || format!("(x^2-2)/x^2 portrait {}", c.portrait.shape.name()))?;
    let c = run("x^2-2", 3)?;
    check(c.chebyshev_conjugate && c.exceptional.verdict == "exceptional", || {
        format!("x^2-2: chebyshev={} exceptional={}", c.chebyshev_conjugate, c.exceptional.verdict)
    })?;
    let grid = [((2, 0), "lattes"), ((0, 2), "chebyshev"), ((0, 1), "plain"), ((1, 2), "plain"), ((1, 0), "plain")];
    for ((a, b), want) in grid {
        let src = format!("(x^2-{a})/(x^2-{b})");
        let c = run(&src, 3)?;
        let ok = match want {
            "lattes" => c.lattes && c.exceptional.verdict == "exceptional",
            "chebyshev" => c.chebyshev_conjugate && c.exceptional.verdict == "exceptional",
            _ => c.exceptional.verdict == "not_exceptional",
        };
        check(ok, || format!("{src}: lattes={} chebyshev={} verdict={}", c.lattes, c.chebyshev_conjugate, c.exceptional.verdict))?;
    }
    Ok("Lattès, Chebyshev and the GF(3) grid as expected".into())
}

fn census() -> Outcome {
    let mut out = Vec::new();
    for (p, want) in [(3, 8), (5, 8), (7, 6), (11, 8), (13, 8)] {
        let c = lattes_class_census(p).map_err(|e| e.to_string())?;
        check(c.class_count == want, || format!("p={p}: {} classes, expected {want}", c.class_count))?;
        out.push(format!("p={p}:{}", c.class_count));
    }
    Ok(out.join(" "))
}

fn random_element(aut: &Automaton, rng: &mut ChaCha8Rng) -> TreeElement {
    let gens = aut.generators();
    let len = rng.gen_range(0..=8);
    let word = (0..len)
        .map(|_| {
            let g = gens[rng.gen_range(0..gens.len())];
            if rng.gen_bool(0.5) {
                aut.inverse(g)
            } else {
                g
            }
        })
        .collect();
    TreeElement::from_word(aut, word)
}

fn random_word(d: usize, rng: &mut ChaCha8Rng, max: usize) -> Vec<usize> {
    let len = rng.gen_range(0..=max);
    (0..len).map(|_| rng.gen_range(0..d)).collect()
}

fn wreath_laws() -> Outcome {
    const PAIRS: usize = 10_000;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let err = |e: TreeError| e.to_string();
    for entry in catalog::load_all().map_err(|e| e.to_string())? {
        let aut = &entry.automaton;
        let d = aut.alphabet_size();
        for _ in 0..PAIRS {
            let g = random_element(aut, &mut rng);
            let h = random_element(aut, &mut rng);
            let v = random_word(d, &mut rng, 6);
            let w = random_word(d, &mut rng, 6);
            let vw: Vec<usize> = v.iter().chain(&w).copied().collect();
            let probe = random_word(d, &mut rng, 8);
            // nested restriction
            let lhs = g.restrict(aut, &vw).map_err(err)?;
            let rhs = g.restrict(aut, &v).map_err(err)?.restrict(aut, &w).map_err(err)?;
            check(lhs.act(aut, &probe).map_err(err)? == rhs.act(aut, &probe).map_err(err)?, || {
                format!("{}: nested restriction of {} at {vw:?}", aut.name(), g.display(aut))
            })?;
            // products
            let gh = g.mul(aut, &h);
            let hv = h.act(aut, &v).map_err(err)?;
            check(gh.act(aut, &v).map_err(err)? == g.act(aut, &hv).map_err(err)?, || {
                format!("{}: product action", aut.name())
            })?;
            let split = g.restrict(aut, &hv).map_err(err)?.mul(aut, &h.restrict(aut, &v).map_err(err)?);
            check(
                gh.restrict(aut, &v).map_err(err)?.act(aut, &probe).map_err(err)? == split.act(aut, &probe).map_err(err)?,
                || format!("{}: product restriction", aut.name()),
            )?;
            let form = perdyn::treegroup::element::wreath_product(aut, &g.wreath(aut), &h.wreath(aut));
            check(perdyn::treegroup::element::wreath_act(aut, &form, &vw).map_err(err)? == gh.act(aut, &vw).map_err(err)?, || {
                format!("{}: wreath product", aut.name())
            })?;
            // single letter
            if let Some((&x, tail)) = vw.split_first() {
                let mut expect = g.act(aut, &[x]).map_err(err)?;
                expect.extend(g.restrict(aut, &[x]).map_err(err)?.act(aut, tail).map_err(err)?);
                check(g.act(aut, &vw).map_err(err)? == expect, || format!("{}: single letter", aut.name()))?;
            }
        }
    }
    Ok(format!("{PAIRS} pairs per group, 4 groups"))
}

fn fpp_levels(name: &str, n_max: usize, opts: &FppOptions) -> Result<Vec<FppLevel>, String> {
    let aut = catalog::load_automaton(name).map_err(|e| e.to_string())?;
    let levels = build_levels(&aut, n_max, &opts.budget).map_err(|e| e.to_string())?;
    Ok(levels.iter().map(|q| FppLevel::from_quotient(q, opts)).collect())
}

fn fpp_exactness() -> Outcome {
    let opts = FppOptions::default();
    let odo = fpp_levels("odometer", 10, &opts)?;
    for l in &odo {
        check(l.method == FppMethod::Exact && l.value == Ratio::new(1, 1u64 << l.level), || {
            format!("odometer level {}: {}", l.level, l.value)
        })?;
    }
    for name in catalog::list() {
        let levels = fpp_levels(name, 8, &opts)?;
        let exact: Vec<_> = levels.iter().filter(|l| l.method == FppMethod::Exact).collect();
        for w in exact.windows(2) {
            check(w[1].value <= w[0].value, || format!("{name}: FPP rises at level {}", w[1].level))?;
        }
    }
    let bas = fpp_levels("basilica", 10, &opts)?;
    let last_exact = bas.iter().rposition(|l| l.method == FppMethod::Exact).ok_or("no exact level")?;
    for w in bas[..=last_exact].windows(2) {
        check(w[1].value < w[0].value, || format!("basilica: not strictly decreasing at level {}", w[1].level))?;
    }
    for w in bas[last_exact..].windows(2) {
        let s = w[0].sigma.unwrap_or(0.0).hypot(w[1].sigma.unwrap_or(0.0));
        check(w[1].value_f64() <= w[0].value_f64() + 3.0 * s, || {
            format!("basilica: sampled level {} rises beyond 3 sigma", w[1].level)
        })?;
    }
    let tail: Vec<String> = bas.iter().map(|l| format!("{:.4}", l.value_f64())).collect();
    Ok(format!("basilica exact through level {}, levels 1..10: {}", last_exact + 1, tail.join(" ")))
}

fn martingale() -> Outcome {
    let budget = Budget::default();
    let mut audited = 0;
    for name in catalog::list() {
        let aut = catalog::load_automaton(name).map_err(|e| e.to_string())?;
        for q in build_levels(&aut, 10, &budget).map_err(|e| e.to_string())? {
            let m = martingale_level(&q);
            check(m.holds, || format!("{name}: kernel orbits at level {} have size {:?}", q.level, m.orbit_size))?;
            if q.enumerable {
                let rows = conditional_expectation_audit(&q, &budget).map_err(|e| e.to_string())?;
                check(rows.iter().all(|r| r.holds), || format!("{name}: conditional expectation at level {}", q.level))?;
                audited += 1;
            }
        }
    }
    Ok(format!("orbit test at levels 1..10 for 4 groups, exact conditional expectation on {audited} enumerable levels"))
}

fn burnside_and_orbits() -> Outcome {
    let budget = Budget::default();
    let (mut burnside, mut orbits) = (0, 0);
    for name in catalog::list() {
        let aut = catalog::load_automaton(name).map_err(|e| e.to_string())?;
        for q in build_levels(&aut, 10, &budget).map_err(|e| e.to_string())? {
            let o = horb_audit(&q);
            check(o.holds, || format!("{name}: kernel orbit sizes {:?} at level {}", o.sizes, q.level))?;
            orbits += 1;
            match burnside_audit(&q, &budget) {
                Ok(b) => {
                    check(b.holds, || format!("{name}: Burnside at level {}", q.level))?;
                    burnside += 1;
                }
                Err(TreeError::NotEnumerated { .. }) => {}
                Err(e) => return Err(e.to_string()),
            }
        }
    }
    Ok(format!("Burnside exact on {burnside} kernels, equal orbit lengths on {orbits}"))
}

fn ends_dichotomy() -> Outcome {
    let mut out = Vec::new();
    for (name, finite) in [("chebyshev2", true), ("basilica", false), ("odometer", false)] {
        let e = catalog::load_entry(name).map_err(|e| e.to_string())?;
        check(e.derived.exceptional == finite, || format!("{name}: map verdict"))?;
        let nuc = nucleus(&e.automaton, &NucleusOptions::default());
        let r = exceptionality_consistency(&nuc, e.derived.exceptional);
        check(r.consistent && r.finite_witness.is_some() == finite, || format!("{name}: {:?}", r.finite_witness))?;
        if finite {
            let has_single_end = r.n1.iter().any(|(el, c)| !el.trivial && matches!(c, EndsClass::Finite { count: 1, .. }));
            check(has_single_end, || format!("{name}: no element with exactly one fixed end"))?;
        }
        out.push(format!("{name}:{}", r.finite_witness.as_deref().unwrap_or("none")));
    }
    Ok(out.join(" "))
}

/// Levels with `p^n` up to one million.
fn lattes_levels(p: u64) -> usize {
    let mut n = 0;
    let mut size = 1u64;
    while size * p <= 1_000_000 {
        size *= p;
        n += 1;
    }
    n
}

/// Returns the outcome and whether every failure is an expected one.
fn lattes_verifier() -> (Outcome, bool) {
    let expected: [(u64, usize); 2] = [(5, 2), (17, 2)];
    let mut below = Vec::new();
    for p in [5, 13, 17, 29] {
        let r = match lattes_audit(p, lattes_levels(p), DEFAULT_POINT_BUDGET) {
            Ok(r) => r,
            Err(e) => return (Err(e.to_string()), false),
        };
        for l in &r.levels {
            let other = l.partition_invariant && l.tree_audit.holds && l.hasse_ok && l.side_quarter_bound && l.conjugate_agrees;
            if !other {
                return (Err(format!("p={p} n={}: {:?}", l.n, l)), false);
            }
            if !l.eighth_bound {
                below.push((p, l.n, l.proportion));
            }
        }
    }
    if below.is_empty() {
        return (Ok("all checks hold at every level".into()), true);
    }
    let listed: Vec<String> = below.iter().map(|(p, n, r)| format!("p={p} n={n} ({r})")).collect();
    let known = below.iter().map(|&(p, n, _)| (p, n)).eq(expected.iter().copied());
    (
        Err(format!(
            "proportion below 1/8 at {}; partition, tree depth, quarter and Hasse checks hold at every level",
            listed.join(", ")
        )),
        known,
    )
}

fn square_field_trend() -> Outcome {
    let map = RationalMap::parse("x^2+1").map_err(|e| e.to_string())?;
    let t = vertical_scan(&map, 3, 2, 5, DEFAULT_ENUM_BUDGET).map_err(|e| e.to_string())?;
    let first = t.rows.first().ok_or("empty")?.proportion;
    let last = t.rows.last().ok_or("empty")?.proportion;
    let shown: Vec<String> = t.rows.iter().map(|r| format_half_even(&r.proportion, 3)).collect();
    check(last < first, || format!("final {last} not below initial {first}"))?;
    Ok(format!("k=1..5: {}", shown.join(" ")))
}

fn determinism() -> Outcome {
    let runs: [&[&str]; 4] = [
        &["fpp", "--aut", "basilica", "--nmax", "9", "--samples", "5000", "--seed", "11"],
        &["per-table", "--map", "(x^2-2)/(x^2-1)", "--field", "GF(3)", "--nmax", "8", "--format", "csv"],
        &["lattes", "--p", "13", "--nmax", "3"],
        &["n1", "--aut", "z2plusi", "--format", "csv"],
    ];
    for args in runs {
        let argv = |jobs: &'static str| {
            let mut v = vec!["perdyn", "--jobs", jobs];
            v.extend_from_slice(args);
            v
        };
        let a = cli::run(argv("1"));
        let b = cli::run(argv("4"));
        let c = cli::run(argv("4"));
        check(a == b && b == c, || format!("{} differs between runs", args.join(" ")))?;
        check(a.code != cli::EXIT_USAGE, || format!("{}: {}", args.join(" "), a.stderr))?;
    }
    Ok("4 commands byte-identical across repeated runs and thread counts".into())
}

fn main() -> ExitCode {
    let mut unexpected = 0;
    let mut passed = 0;
    let mut report = |n: usize, title: &str, r: Outcome, expected_failure: bool| {
        match &r {
            Ok(detail) => {
                passed += 1;
                println!("criterion {n:>2} PASS  {title}: {detail}");
            }
            Err(detail) => {
                let tag = if expected_failure { " (known finite-level counterexample)" } else { "" };
                println!("criterion {n:>2} FAIL  {title}: {detail}{tag}");
                if !expected_failure {
                    unexpected += 1;
                }
            }
        }
    };
    report(1, "periodic proportion table over GF(3^n)", table_reproduction(), false);
    report(2, "iterate and graph oracles agree", oracle_equivalence(), false);
    report(3, "lower-degree element count", lower_degree_count(), false);
    report(4, "classification suite", classification_suite(), false);
    report(5, "Lattès conjugacy census", census(), false);
    report(6, "wreath recursion laws", wreath_laws(), false);
    report(7, "fixed-point proportions", fpp_exactness(), false);
    report(8, "martingale diagnostics", martingale(), false);
    report(9, "Burnside and kernel orbit audits", burnside_and_orbits(), false);
    report(10, "ends dichotomy", ends_dichotomy(), false);
    let (r, known) = lattes_verifier();
    report(11, "Lattès verifier", r, known);
    report(12, "square-field proportion trend", square_field_trend(), false);
    report(13, "determinism", determinism(), false);
    println!("{passed}/13 criteria pass, {unexpected} unexpected failures");
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
