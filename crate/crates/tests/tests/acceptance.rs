//! Acceptance criteria, one line per criterion. Exits non-zero if any fails.

use std::collections::HashMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use telescope_core::certify::{alt_cutoff, check_subdirect};
use telescope_core::freewords::{Letter, Word};
use telescope_core::perm::{factorial, PermGroup, Permutation};
use telescope_core::selfsim::{GroupElement, WreathRecursion};
use telescope_core::telescope::{
    build_telescope, extend_action, verify_fundamental_general, verify_torsion_bound,
    verify_trace_lemmas, OrderSource, TelescopeGroup,
};
use telescope_tests::{all_perms, closure, grigorchuk_image, grigorchuk_torsion_growth};

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn grigorchuk_telescope(levels: &[usize]) -> (WreathRecursion, TelescopeGroup) {
    let rec = WreathRecursion::grigorchuk();
    let tg = build_telescope(&rec, levels, &vec![0; levels.len()]).unwrap();
    (rec, tg)
}

fn random_perm(rng: &mut ChaCha8Rng, n: usize) -> Permutation {
    let mut v: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        v.swap(i, rng.gen_range(0..=i));
    }
    Permutation::from_images(v).unwrap()
}

fn generator_sequences(count: usize) -> Vec<Vec<GroupElement>> {
    let singles = (0..count).map(|g| vec![GroupElement::generator(g)]);
    let pairs = (0..count).flat_map(|g| {
        (0..count).map(move |h| vec![GroupElement::generator(g), GroupElement::generator(h)])
    });
    singles.chain(pairs).collect()
}

fn global_order(rec: &WreathRecursion, gseq: &[GroupElement]) -> BigUint {
    let product = gseq.iter().fold(GroupElement::identity(), |a, b| a.mul(b));
    rec.element_order(&product).unwrap()
}

fn within(elapsed: Duration, limit: Duration) -> (bool, String) {
    (
        elapsed < limit,
        format!("{:.2}s of {}s", elapsed.as_secs_f64(), limit.as_secs()),
    )
}

fn engine_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut mismatches = 0;
    for _ in 0..50 {
        let n = rng.gen_range(1..=7);
        let k = rng.gen_range(1..=3);
        let gens: Vec<Permutation> = (0..k).map(|_| random_perm(&mut rng, n)).collect();
        let elements = closure(&gens);
        let group = PermGroup::new(gens).unwrap();
        if group.order() != BigUint::from(elements.len()) {
            mismatches += 1;
        }
        for v in all_perms(n) {
            let member = group
                .contains(&Permutation::from_images(v.clone()).unwrap())
                .unwrap();
            if member != elements.contains(&v) {
                mismatches += 1;
            }
        }
    }
    let (fast, time) = within(start.elapsed(), Duration::from_secs(10));
    outcome(
        mismatches == 0 && fast,
        format!("50 generator sets, {mismatches} mismatches, {time}"),
    )
}

fn fundamental_general_sweep() -> Outcome {
    let start = Instant::now();
    let (rec, tg) = grigorchuk_telescope(&[1, 2, 3, 4]);
    let mut violations = 0;
    let mut checks = 0;
    for gseq in generator_sequences(4) {
        let n = global_order(&rec, &gseq);
        for c in 0..4 {
            let r =
                verify_fundamental_general(&tg, c, &gseq, &OrderSource::Global(n.clone())).unwrap();
            checks += 1;
            violations += r.witnesses.iter().filter(|w| w["ok"] == false).count();
        }
    }
    let (fast, time) = within(start.elapsed(), Duration::from_secs(120));
    outcome(
        violations == 0 && fast,
        format!("{checks} (gseq, component) pairs, {violations} violations, {time}"),
    )
}

fn trace_lemma_sweep() -> Outcome {
    let start = Instant::now();
    let (rec, tg) = grigorchuk_telescope(&[1, 2, 3, 4]);
    let mut totals: HashMap<&str, u64> = HashMap::new();
    for gseq in generator_sequences(4) {
        let n = global_order(&rec, &gseq);
        for c in 0..4 {
            let r = verify_trace_lemmas(&tg, c, &gseq, &OrderSource::Global(n.clone()), 2).unwrap();
            let v = &r.parameters["violations"];
            for key in [
                "avoidance",
                "return_to_p",
                "pigeonhole",
                "pigeonhole_relaxed_bound",
            ] {
                *totals.entry(key).or_default() += v[key].as_u64().unwrap();
            }
        }
    }
    let strict = totals["avoidance"] + totals["return_to_p"] + totals["pigeonhole"];
    let (fast, time) = within(start.elapsed(), Duration::from_secs(300));
    outcome(
        strict == 0 && fast,
        format!(
            "violations: avoidance {}, return to p {}, pigeonhole m2 < N(k+1) {} \
             (with m2 < 2N(k+1): {}), {time}",
            totals["avoidance"],
            totals["return_to_p"],
            totals["pigeonhole"],
            totals["pigeonhole_relaxed_bound"]
        ),
    )
}

fn torsion_bound_sample() -> Outcome {
    let start = Instant::now();
    let (rec, tg) = grigorchuk_telescope(&[1, 2, 3, 4]);
    let table = rec.torsion_growth_table(&rec.generators(), 5).unwrap();
    let oracle = grigorchuk_torsion_growth(5, 8);
    let spot_ok = table[1] == BigUint::from(2u32) && table[2] == BigUint::from(8u32);
    let oracle_ok = table == oracle;

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut violations = 0;
    for _ in 0..500 {
        let len = rng.gen_range(0..=5);
        let w = Word::reduce((0..len).map(|_| match rng.gen_range(0..9) {
            c if c < 4 => Letter::gen(c),
            c if c < 8 => Letter::gen_inv(c - 4),
            _ => Letter::Tau,
        }));
        let n = w.len();
        let t = &table[n];
        let order = tg.order_in_truncation(&w).unwrap();
        let m = usize::try_from(t * BigUint::from(n + 1)).unwrap();
        let direct = (factorial(m) % &order) == BigUint::from(0u32);
        let report = verify_torsion_bound(&tg, &w, t).unwrap();
        if !direct || !report.passed() {
            violations += 1;
        }
    }
    let (fast, time) = within(start.elapsed(), Duration::from_secs(120));
    outcome(
        spot_ok && oracle_ok && violations == 0 && fast,
        format!(
            "T(1) = {}, T(2) = {} (stated 2, 8), ball-scan oracle {}, 500 words: {violations} violations, {time}",
            table[1],
            table[2],
            if oracle_ok { "agrees" } else { "DISAGREES" }
        ),
    )
}

fn subdirect_orders() -> Outcome {
    let start = Instant::now();
    let (_, tg) = grigorchuk_telescope(&[1, 2, 3, 4]);
    let r = check_subdirect(&tg).unwrap();
    let orders: Vec<String> = r
        .witnesses
        .iter()
        .map(|w| w["order"].as_str().unwrap().to_string())
        .collect();
    let expected: Vec<String> = [3usize, 5, 9, 17]
        .iter()
        .map(|&n| factorial(n).to_string())
        .collect();
    let c3 = TelescopeGroup::from_components(vec![extend_action(
        &[Permutation::parse_cycles(3, "(0 1 2)").unwrap()],
        2,
    )
    .unwrap()])
    .unwrap();
    let sym4 = PermGroup::new(c3.union_generators()).unwrap().order();
    let (fast, time) = within(start.elapsed(), Duration::from_secs(30));
    outcome(
        r.passed() && orders == expected && sym4 == BigUint::from(24u32) && fast,
        format!(
            "projection orders {}, C3 extension order {sym4}, {time}",
            orders.join(", ")
        ),
    )
}

fn alternating_cutoff() -> Outcome {
    let start = Instant::now();
    let (_, tg) = grigorchuk_telescope(&[1, 2, 3, 4]);
    let a = alt_cutoff(&tg).unwrap();
    let offsets = tg.offsets();
    let signs_ok = a.kernel_generators.iter().all(|k| {
        tg.components()
            .iter()
            .zip(&offsets)
            .all(|(c, &off)| k.restrict(off, c.extended_degree()).unwrap().sign() == 1)
    });
    let orders_ok = a.cutoff.is_some_and(|m| {
        tg.components()
            .iter()
            .enumerate()
            .skip(m - 1)
            .all(|(i, c)| {
                &a.projection_orders[i] * BigUint::from(2u32) == factorial(c.extended_degree())
            })
    });
    let (fast, time) = within(start.elapsed(), Duration::from_secs(120));
    outcome(
        orders_ok && signs_ok && fast,
        format!(
            "m = {:?}, {} kernel generators with all-(+1) signs: {signs_ok}, {time}",
            a.cutoff,
            a.kernel_generators.len()
        ),
    )
}

fn self_similar_orders() -> Outcome {
    let start = Instant::now();
    let rec = WreathRecursion::grigorchuk();
    let ball = rec.ball(&rec.generators(), 3).unwrap();
    let letters_of = |g: &GroupElement| -> Vec<u8> {
        g.word()
            .letters()
            .iter()
            .map(|l| match l {
                Letter::Gen { index, .. } => b"abcd"[*index],
                Letter::Tau => unreachable!(),
            })
            .collect()
    };
    let mut mismatches = 0;
    for g in &ball {
        if rec.element_order(g).unwrap() != grigorchuk_image(&letters_of(g), 8).order() {
            mismatches += 1;
        }
    }
    let mut spots = Vec::new();
    let mut spots_ok = true;
    for (text, stated) in [("a", 2u32), ("b", 2), ("c", 2), ("d", 2), ("a b", 8)] {
        let g = rec.parse_element(text).unwrap();
        let recursive = rec.element_order(&g).unwrap();
        let level = grigorchuk_image(&letters_of(&g), 8).order();
        spots_ok &= recursive == BigUint::from(stated) && level == BigUint::from(stated);
        spots.push(format!(
            "ord({}) = {recursive}/{level}",
            text.replace(' ', "")
        ));
    }
    let (fast, time) = within(start.elapsed(), Duration::from_secs(60));
    outcome(
        mismatches == 0 && spots_ok && fast,
        format!(
            "{} ball elements, {mismatches} mismatches; recursive/level-8: {} (stated ord(ab) = 8), {time}",
            ball.len(),
            spots.join(", ")
        ),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("certificate.json");
    let run = || {
        let _ = std::fs::remove_file(&path);
        let args = [
            "telescope",
            "verify",
            "--config",
            "builtin:demo",
            "--out",
            path.to_str().unwrap(),
        ];
        let (mut out, mut err) = (Vec::new(), Vec::new());
        telescope_cli::app::run(args, &mut out, &mut err);
        (std::fs::read(&path).unwrap_or_default(), out)
    };
    let (a, out_a) = run();
    let (b, out_b) = run();
    let same = !a.is_empty() && a == b && out_a == out_b;
    outcome(
        same,
        format!(
            "`telescope verify` on the demo config twice: {} and {} bytes, identical certificates and stdout: {same}",
            a.len(),
            b.len()
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("engine agrees with brute-force closure", engine_oracle),
        ("fixed-point bound m <= N(k+1)", fundamental_general_sweep),
        ("trace statements", trace_lemma_sweep),
        ("torsion bound on sampled words", torsion_bound_sample),
        ("subdirect onto symmetric groups", subdirect_orders),
        ("alternating cutoff", alternating_cutoff),
        ("self-similar element orders", self_similar_orders),
        ("deterministic certificates", determinism),
    ];
    let mut failed = 0;
    for (i, (title, run)) in criteria.iter().enumerate() {
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {} {}: {title}: {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
