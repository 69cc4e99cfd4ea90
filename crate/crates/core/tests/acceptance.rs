//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Thresholds are the constants below.
//!
//! The oracles here recompute inner products, norms and square classes
//! straight from field arithmetic rather than through the library's
//! vector and code helpers.

use std::collections::HashSet;
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use soxpand::code::{Budget, LinearCode};
use soxpand::expand::{
    enumerate_expansions, expand_euclidean, expand_hermitian, random_self_orthogonal,
    remark_quad_expand, selfdual_obstruction, tower, try_expand_boundary, ExpansionReport,
};
use soxpand::gf::{make_field, Fe, Field};
use soxpand::linalg::{InnerForm, MatF, VecF};

const C1_INSTANCES: usize = 200;
const C1_MAX_SECONDS: f64 = 10.0;
const C1_MAX_N: usize = 10;
const C3_SAMPLES: usize = 500;
const C4_INSTANCES: usize = 200;
const C4_MAX_N: usize = 10;
const C5_MIN_INSTANCES: usize = 100;
const C5_MAX_N: usize = 8;
const C6_CODES_PER_CASE: u64 = 12;
const C7_TOWERS: usize = 100;
const C8_MAX_CODEWORDS: u64 = 100_000;
const C9_SAMPLES: usize = 100;
const C10_CODES: usize = 500;
const C11_INVOCATIONS: usize = 50;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn field(p: u64, m: u32) -> Field {
    make_field(p, m).expect("field")
}

// ---------------------------------------------------------------------------
// Oracles

fn oracle_inner(f: &Field, a: &[Fe], b: &[Fe], form: InnerForm) -> Fe {
    let q = match form {
        InnerForm::Euclidean => 1,
        InnerForm::Hermitian => (f.order() as f64).sqrt().round() as u64,
    };
    a.iter().zip(b).fold(Fe::ZERO, |acc, (&x, &y)| {
        let x = if q == 1 { x } else { f.pow(x, q) };
        f.add(acc, f.mul(x, y))
    })
}

fn oracle_self_orthogonal(c: &LinearCode, form: InnerForm) -> bool {
    let rows = c.generator().rows();
    rows.iter()
        .all(|a| rows.iter().all(|b| oracle_inner(c.ctx(), a, b, form).is_zero()))
}

fn oracle_contains(big: &LinearCode, small: &LinearCode) -> bool {
    let stacked = big.generator().stack(small.generator()).unwrap();
    stacked.rank() == big.k()
}

/// The report's four core invariants, recomputed independently.
fn oracle_step(rep: &ExpansionReport) -> Result<(), String> {
    let f = rep.input.ctx();
    let v = rep.new_vector.entries();
    if rep.output.k() != rep.input.k() + 1 {
        return Err(format!("dimension {} -> {}", rep.input.k(), rep.output.k()));
    }
    if !oracle_contains(&rep.output, &rep.input) {
        return Err("input not contained in output".into());
    }
    if !oracle_self_orthogonal(&rep.output, rep.form) {
        return Err("output not self-orthogonal".into());
    }
    let in_dual = rep
        .input
        .generator()
        .rows()
        .iter()
        .all(|r| oracle_inner(f, r, v, rep.form).is_zero());
    if !in_dual || !oracle_inner(f, v, v, rep.form).is_zero() {
        return Err("new vector not isotropic in the dual".into());
    }
    if !rep.verified().map_err(|e| e.to_string())? {
        return Err("library checklist failed".into());
    }
    Ok(())
}

fn random_code(f: &Field, n: usize, rng: &mut ChaCha8Rng) -> LinearCode {
    let rows = rng.gen_range(0..=n);
    let rows: Vec<Vec<Fe>> = (0..rows)
        .map(|_| (0..n).map(|_| f.random(rng)).collect())
        .collect();
    LinearCode::new(&MatF::new(f, n, rows).unwrap()).unwrap()
}

// ---------------------------------------------------------------------------
// Instance suites shared by criteria 1, 4 and 8

struct Instance {
    start: LinearCode,
    step: ExpansionReport,
}

fn run_suite(
    fields: &[(u64, u32)],
    form: InnerForm,
    min_n: usize,
    max_n: usize,
    slack: usize,
    count: usize,
) -> Result<Vec<Instance>, String> {
    let mut combos = Vec::new();
    for &(p, m) in fields {
        for n in min_n..=max_n {
            for k in 0..=(n - slack) / 2 {
                combos.push((field(p, m), n, k));
            }
        }
    }
    let mut out = Vec::new();
    let mut round = 0u64;
    while out.len() < count {
        for (i, (f, n, k)) in combos.iter().enumerate() {
            if out.len() == count {
                break;
            }
            let seed = round * 10_000 + i as u64;
            let start = random_self_orthogonal(f, *n, *k, form, seed)
                .map_err(|e| format!("start GF({}) n={n} k={k}: {e}", f.name()))?;
            let step_seed = (round % 2 == 1).then_some(seed);
            let step = match form {
                InnerForm::Hermitian => expand_hermitian(&start, step_seed),
                InnerForm::Euclidean => expand_euclidean(&start, step_seed),
            }
            .map_err(|e| format!("GF({}) n={n} k={k} seed={seed}: {e}", f.name()))?;
            oracle_step(&step).map_err(|e| format!("GF({}) n={n} k={k} seed={seed}: {e}", f.name()))?;
            out.push(Instance { start, step });
        }
        round += 1;
    }
    Ok(out)
}

fn hermitian_suite() -> Result<Vec<Instance>, String> {
    run_suite(&[(2, 2), (3, 2), (2, 4)], InnerForm::Hermitian, 2, C1_MAX_N, 2, C1_INSTANCES)
}

fn euclidean_odd_suite() -> Result<Vec<Instance>, String> {
    run_suite(&[(3, 1), (5, 1), (7, 1), (3, 2)], InnerForm::Euclidean, 3, C4_MAX_N, 3, C4_INSTANCES)
}

fn euclidean_even_suite() -> Result<Vec<Instance>, String> {
    run_suite(&[(2, 1), (2, 2), (2, 3)], InnerForm::Euclidean, 2, C4_MAX_N, 2, C4_INSTANCES)
}

// ---------------------------------------------------------------------------
// Criteria

fn c1_hermitian() -> Verdict {
    let t = Instant::now();
    let suite = hermitian_suite()?;
    let secs = t.elapsed().as_secs_f64();
    if secs > C1_MAX_SECONDS {
        return Err(format!("{} instances took {secs:.2}s", suite.len()));
    }
    Ok(format!("{}/{} expanded with all invariants in {secs:.2}s", suite.len(), C1_INSTANCES))
}

fn c2_norm_counts() -> Verdict {
    let mut checked = 0;
    for (p, m) in [(2, 2), (3, 2), (2, 4), (5, 2), (7, 2)] {
        let f = field(p, m);
        let q = (f.order() as f64).sqrt().round() as u64;
        let base: Vec<Fe> = f.elements().filter(|&x| f.pow(x, q) == x).collect();
        if base.len() as u64 != q {
            return Err(format!("GF({}) base subfield has {} elements", f.name(), base.len()));
        }
        for c in base {
            let brute: Vec<Fe> = f.elements().filter(|&t| f.pow(t, q + 1) == c).collect();
            let mut got = f.solve_norm(c).map_err(|e| e.to_string())?;
            got.sort();
            let expected = if c.is_zero() { 1 } else { q as usize + 1 };
            if got != brute || got.len() != expected {
                return Err(format!(
                    "GF({}) c={}: {} roots, brute force {}",
                    f.name(),
                    c,
                    got.len(),
                    brute.len()
                ));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} norm values match brute force with counts 1 / q+1"))
}

fn c3_set_intersection() -> Verdict {
    let fields = [
        (3, 1), (5, 1), (7, 1), (3, 2), (11, 1), (13, 1), (17, 1), (19, 1), (23, 1),
        (5, 2), (3, 3), (29, 1), (31, 1), (37, 1), (41, 1), (43, 1), (47, 1), (7, 2),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (p, m) in fields {
        let f = field(p, m);
        let half = (f.order() as usize).div_ceil(2);
        for _ in 0..C3_SAMPLES {
            let (a, b, c) = (f.random_nonzero(&mut rng), f.random_nonzero(&mut rng), f.random_nonzero(&mut rng));
            let s_set: HashSet<Fe> = f.elements().map(|s| f.add(a, f.mul(b, f.mul(s, s)))).collect();
            let t_set: HashSet<Fe> = f.elements().map(|t| f.neg(f.mul(c, f.mul(t, t)))).collect();
            if s_set.len() != half || t_set.len() != half {
                return Err(format!("GF({}): |S|={} |T|={}", f.name(), s_set.len(), t_set.len()));
            }
            let (s, t) = f.solve_diag_quadratic(a, b, c).map_err(|e| e.to_string())?;
            let lhs = f.add(a, f.add(f.mul(b, f.mul(s, s)), f.mul(c, f.mul(t, t))));
            if !lhs.is_zero() {
                return Err(format!("GF({}): ({s},{t}) fails for ({a},{b},{c})", f.name()));
            }
        }
    }
    Ok(format!("{} fields x {C3_SAMPLES} triples", fields.len()))
}

fn c4_euclidean() -> Verdict {
    let odd = euclidean_odd_suite()?;
    let even = euclidean_even_suite()?;
    Ok(format!(
        "odd p: {}/{C4_INSTANCES}, p = 2: {}/{C4_INSTANCES} expanded with all invariants",
        odd.len(),
        even.len()
    ))
}

fn c5_boundary() -> Verdict {
    let mut total = 0;
    let mut positive = 0;
    let mut seed = 0u64;
    while total < C5_MIN_INSTANCES {
        for (p, m) in [(3, 1), (5, 1)] {
            let f = field(p, m);
            for n in (2..=C5_MAX_N).step_by(2) {
                let k = (n - 2) / 2;
                seed += 1;
                let c = random_self_orthogonal(&f, n, k, InnerForm::Euclidean, seed).map_err(|e| e.to_string())?;
                let verdict = try_expand_boundary(&c, seed.is_multiple_of(2).then_some(seed)).map_err(|e| e.to_string())?;
                let all = enumerate_expansions(&c, InnerForm::Euclidean, &Budget::default()).map_err(|e| e.to_string())?;
                let tag = format!("GF({}) n={n} seed={seed}", f.name());
                if verdict.expandable == all.is_empty() {
                    return Err(format!("{tag}: verdict {} vs {} supersets", verdict.expandable, all.len()));
                }
                // The witness classifies the same way as the verdict.
                let w = verdict.square_class_witness;
                let w_square = f.elements().any(|x| f.mul(x, x) == w);
                if w.is_zero() || w_square != verdict.expandable {
                    return Err(format!("{tag}: witness {w} disagrees with the verdict"));
                }
                if let Some(r) = &verdict.result {
                    if r.k() != n / 2 || !oracle_self_orthogonal(r, InnerForm::Euclidean) || !oracle_contains(r, &c) {
                        return Err(format!("{tag}: result is not a self-dual superset"));
                    }
                    positive += 1;
                }
                total += 1;
            }
        }
    }
    Ok(format!("{total} instances agree with exhaustive search ({positive} expandable)"))
}

/// Every isotropic vector of F^n lying in the dual of `c` but outside `c`.
fn oracle_has_superset(c: &LinearCode) -> bool {
    let f = c.ctx();
    let (q, n) = (f.order() as u64, c.n());
    let gen = c.generator().rows();
    (0..q.pow(n as u32)).any(|mut idx| {
        let v: Vec<Fe> = (0..n)
            .map(|_| {
                let x = Fe((idx % q) as u32);
                idx /= q;
                x
            })
            .collect();
        oracle_inner(f, &v, &v, InnerForm::Euclidean).is_zero()
            && gen.iter().all(|g| oracle_inner(f, g, &v, InnerForm::Euclidean).is_zero())
            && !c.contains(&VecF::new(f, v.clone()).unwrap()).unwrap()
    })
}

fn c6_obstruction() -> Verdict {
    for (q, k, obstructed) in [(3u64, 0usize, true), (3, 2, true), (7, 0, true), (5, 0, false), (5, 2, false), (9, 0, false)] {
        let (p, m) = if q == 9 { (3, 2) } else { (q, 1) };
        let f = field(p, m);
        let n = 2 * k + 2;
        let predicted = selfdual_obstruction(q, k).map_err(|e| e.to_string())?;
        if predicted != obstructed {
            return Err(format!("q={q} k={k}: predicate returned {predicted}"));
        }
        let mut witness = false;
        for seed in 0..C6_CODES_PER_CASE {
            let c = random_self_orthogonal(&f, n, k, InnerForm::Euclidean, seed).map_err(|e| e.to_string())?;
            let exists = oracle_has_superset(&c);
            let listed = !enumerate_expansions(&c, InnerForm::Euclidean, &Budget::default())
                .map_err(|e| e.to_string())?
                .is_empty();
            if exists != listed {
                return Err(format!("q={q} k={k} seed={seed}: enumeration disagrees with brute force"));
            }
            if obstructed && exists {
                return Err(format!("q={q} k={k} seed={seed}: found a self-dual superset"));
            }
            witness |= exists;
        }
        if !obstructed && !witness {
            return Err(format!("q={q} k={k}: no self-dual witness found"));
        }
    }
    Ok("predicate and exhaustive search agree on all six cases".into())
}

fn c7_towers() -> Verdict {
    struct Regime {
        name: &'static str,
        fields: &'static [(u64, u32)],
        form: InnerForm,
        lengths: &'static [usize],
        expected: fn(usize) -> usize,
    }
    let regimes = [
        Regime { name: "euclidean odd n", fields: &[(2, 1), (3, 1), (5, 1), (2, 2), (7, 1), (3, 2)], form: InnerForm::Euclidean, lengths: &[1, 3, 5, 7, 9, 11], expected: |n| (n - 1) / 2 },
        Regime { name: "euclidean odd p even n", fields: &[(3, 1), (5, 1), (7, 1), (3, 2)], form: InnerForm::Euclidean, lengths: &[2, 4, 6, 8, 10], expected: |n| n / 2 - 1 },
        Regime { name: "euclidean p=2 even n", fields: &[(2, 1), (2, 2), (2, 3)], form: InnerForm::Euclidean, lengths: &[2, 4, 6, 8, 10], expected: |n| n / 2 },
        Regime { name: "hermitian even n", fields: &[(2, 2), (3, 2), (2, 4)], form: InnerForm::Hermitian, lengths: &[2, 4, 6, 8, 10], expected: |n| n / 2 },
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut summary = Vec::new();
    for r in &regimes {
        for i in 0..C7_TOWERS {
            let (p, m) = r.fields[i % r.fields.len()];
            let f = field(p, m);
            let n = r.lengths[(i / r.fields.len()) % r.lengths.len()];
            let target = (r.expected)(n);
            let k0 = rng.gen_range(0..=target);
            let seed = rng.gen::<u64>();
            let start = random_self_orthogonal(&f, n, k0, r.form, seed).map_err(|e| e.to_string())?;
            let t = tower(&start, r.form, Some(seed), false).map_err(|e| e.to_string())?;
            let tag = format!("{}: GF({}) n={n} k0={k0}", r.name, f.name());
            if t.terminal.k() != target || t.r_steps != target - k0 {
                return Err(format!("{tag}: terminal k={} after {} steps, expected {target}", t.terminal.k(), t.r_steps));
            }
            if !oracle_self_orthogonal(&t.terminal, r.form) || !oracle_contains(&t.terminal, &start) {
                return Err(format!("{tag}: terminal code invalid"));
            }
            for s in &t.steps {
                oracle_step(s).map_err(|e| format!("{tag}: {e}"))?;
            }
        }
        summary.push(format!("{}: {C7_TOWERS}", r.name));
    }
    Ok(summary.join(", "))
}

fn codewords(c: &LinearCode) -> u64 {
    (c.ctx().order() as u64).saturating_pow(c.k() as u32)
}

fn c8_distance_sandwich() -> Verdict {
    let budget = Budget {
        threads: std::thread::available_parallelism().map_or(1, |n| n.get()),
        ..Budget::default()
    };
    let (mut checked, mut skipped) = (0, 0);
    let suites = [hermitian_suite()?, euclidean_odd_suite()?, euclidean_even_suite()?];
    for inst in suites.iter().flatten() {
        let form = inst.step.form;
        let c = &inst.start;
        let c1 = &inst.step.output;
        let c1_dual = c1.dual(form).map_err(|e| e.to_string())?;
        let c_dual = c.dual(form).map_err(|e| e.to_string())?;
        if codewords(&c_dual) > C8_MAX_CODEWORDS {
            skipped += 1;
            continue;
        }
        let d = |x: &LinearCode| x.min_distance_with(&budget).map_err(|e| e.to_string());
        let d_c = if c.k() == 0 { usize::MAX } else { d(c)? };
        let chain = [d_c, d(c1)?, d(&c1_dual)?, d(&c_dual)?];
        if chain.windows(2).any(|w| w[0] < w[1]) {
            return Err(format!("GF({}) n={}: distances {chain:?}", c.ctx().name(), c.n()));
        }
        checked += 1;
    }
    Ok(format!("{checked} instances checked, {skipped} above {C8_MAX_CODEWORDS} codewords skipped"))
}

fn c9_quad() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut lines = Vec::new();
    let mut failed = false;
    for p in [5u64, 13] {
        let f = field(p, 1);
        let (mut ok, mut degenerate, mut example) = (0, 0, None);
        let mut drawn = 0;
        while drawn < C9_SAMPLES {
            let a: Vec<Fe> = (0..4).map(|_| f.random(&mut rng)).collect();
            if a[0].is_zero() || a[1].is_zero() || !oracle_inner(&f, &a, &a, InnerForm::Euclidean).is_zero() {
                continue;
            }
            drawn += 1;
            let v = VecF::new(&f, a).unwrap();
            match remark_quad_expand(&v) {
                Ok(c) if c.k() == 2 && oracle_self_orthogonal(&c, InnerForm::Euclidean) => ok += 1,
                _ => {
                    degenerate += 1;
                    example.get_or_insert(v);
                }
            }
        }
        failed |= ok != C9_SAMPLES;
        let mut line = format!("GF({p}): {ok}/{C9_SAMPLES} self-dual");
        if let Some(v) = example {
            line += &format!(", {degenerate} with (-a3,-a4,a1,a2) proportional to a, e.g. {v}");
        }
        lines.push(line);
    }
    let detail = lines.join("; ");
    if failed { Err(detail) } else { Ok(detail) }
}

fn c10_duality() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let euclid = [(2, 1), (3, 1), (5, 1), (7, 1), (2, 2), (2, 3), (3, 2)];
    let herm = [(2, 2), (3, 2), (2, 4), (5, 2)];
    for (form, fields) in [(InnerForm::Euclidean, &euclid[..]), (InnerForm::Hermitian, &herm[..])] {
        for i in 0..C10_CODES {
            let (p, m) = fields[i % fields.len()];
            let f = field(p, m);
            let n = rng.gen_range(1..=8);
            let c = random_code(&f, n, &mut rng);
            let d = c.dual(form).map_err(|e| e.to_string())?;
            let tag = format!("{form} GF({}) {c}", f.name());
            if d.k() != n - c.k() || d.dual(form).map_err(|e| e.to_string())? != c {
                return Err(format!("{tag}: dual {d}"));
            }
            let orth = c.generator().rows().iter().all(|a| {
                d.generator().rows().iter().all(|b| oracle_inner(&f, a, b, form).is_zero())
            });
            if !orth {
                return Err(format!("{tag}: dual not orthogonal"));
            }
        }
    }
    Ok(format!("{C10_CODES} codes per form"))
}

fn c11_determinism() -> Verdict {
    let exe = env!("CARGO_BIN_EXE_soxpand");
    let data = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data");
    let scratch = env!("CARGO_TARGET_TMPDIR");
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let templates: &[&[&str]] = &[
        &["expand", "--in", "{data}/line7_gf3.code"],
        &["expand", "--inner", "hermitian", "--in", "{data}/line6_gf4.code"],
        &["tower", "--field", "5^1", "--n", "8", "--attempt-boundary"],
        &["tower", "--inner", "hermitian", "--field", "3^2", "--n", "6"],
        &["random", "--field", "2^3", "--n", "8", "--k", "3"],
        &["boundary", "--in", "{data}/line4_gf5.code"],
        &["enumerate", "--in", "{data}/line4_gf5.code"],
        &["best", "--in", "{data}/line7_gf3.code", "--threads", "2"],
        &["dual", "--inner", "hermitian", "--in", "{data}/line6_gf4.code"],
        &["mindist", "--in", "{data}/hamming8_gf2.code"],
        &["verify", "--in", "{data}/selfdual4_gf5.code"],
        &["obstruction", "--field", "7^1", "--k", "2"],
    ];
    for i in 0..C11_INVOCATIONS {
        let t = templates[rng.gen_range(0..templates.len())];
        let seed = rng.gen_range(0..1000u64).to_string();
        let json = rng.gen_bool(0.5);
        let out = format!("{scratch}/determinism.code");
        let mut args: Vec<String> = t.iter().map(|a| a.replace("{data}", data)).collect();
        args.extend(["--seed".into(), seed]);
        if json {
            args.push("--json".into());
        }
        args.extend(["--out".into(), out.clone()]);
        let mut runs = Vec::new();
        for _ in 0..2 {
            let _ = std::fs::remove_file(&out);
            let o = Command::new(exe).args(&args).env_remove("SOXPAND_CAP").output().map_err(|e| e.to_string())?;
            runs.push((o.status.code(), o.stdout, o.stderr, std::fs::read(&out).ok()));
        }
        if runs[0] != runs[1] {
            return Err(format!("invocation {i} differs: {}", args.join(" ")));
        }
        if runs[0].0 != Some(0) {
            return Err(format!("invocation {i} exited {:?}: {}", runs[0].0, args.join(" ")));
        }
    }
    Ok(format!("{C11_INVOCATIONS} invocations replayed byte-identically"))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("hermitian expansion soundness", c1_hermitian),
        ("norm-equation counts", c2_norm_counts),
        ("set-intersection solver", c3_set_intersection),
        ("euclidean expansion soundness", c4_euclidean),
        ("boundary iff-equivalence", c5_boundary),
        ("obstruction", c6_obstruction),
        ("tower terminal dimensions", c7_towers),
        ("distance sandwich", c8_distance_sandwich),
        ("[4,2] construction", c9_quad),
        ("duality algebra", c10_duality),
        ("determinism", c11_determinism),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let verdict = check();
        let secs = t.elapsed().as_secs_f64();
        let (tag, detail) = match verdict {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failures += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {:>2} {tag} {name}: {detail} [{secs:.2}s]", i + 1);
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
