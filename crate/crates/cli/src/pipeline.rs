//! The `build`, `verify` and `word` commands.

use std::fmt::Write as _;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use telescope_core::certify::{
    alt_cutoff, check_perfect, check_subdirect, check_tail_injectivity, component_summaries,
    derived_subgroup, emit_certificate, sign_vectors, Certificate, TorsionBoundRow,
};
use telescope_core::freewords::{Letter, Word};
use telescope_core::perm::PermGroup;
use telescope_core::report::{Report, Status};
use telescope_core::selfsim::{GroupElement, WreathRecursion};
use telescope_core::telescope::{
    verify_fundamental_general, verify_orbit_bound, verify_torsion_bound, verify_trace_lemmas,
    OrderSource, TelescopeGroup,
};

use crate::config::Setup;

pub const RNG_NAME: &str = "ChaCha8Rng/seed_from_u64";

fn skipped(name: &str, reason: impl ToString) -> Report {
    let mut r = Report::new(name).param("reason", reason.to_string());
    r.status = Status::Skipped;
    r
}

fn failed(name: &str, reason: impl ToString) -> Report {
    let mut r = Report::new(name).param("reason", reason.to_string());
    r.fail();
    r
}

/// Component table printed by `telescope build`.
pub fn build_summary(setup: &Setup) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "component  level  base_degree  extended_degree  basepoint"
    )
    .unwrap();
    for (i, c) in setup.telescope.components().iter().enumerate() {
        writeln!(
            out,
            "{:>9}  {:>5}  {:>11}  {:>15}  {:>9}",
            i + 1,
            c.level().map_or("-".to_string(), |l| l.to_string()),
            c.base_degree(),
            c.extended_degree(),
            c.basepoint()
        )
        .unwrap();
    }
    out
}

fn transitivity(tg: &TelescopeGroup) -> Report {
    let mut r = Report::new("transitivity").existential();
    for (i, c) in tg.components().iter().enumerate() {
        let ok = c.is_base_transitive();
        if !ok {
            r.fail();
        }
        r.witness(json!({ "component": i + 1, "degree": c.base_degree(), "transitive": ok }));
    }
    r
}

/// Every sequence of one or two generators.
fn generator_sequences(count: usize) -> Vec<Vec<GroupElement>> {
    let singles = (0..count).map(|g| vec![GroupElement::generator(g)]);
    let pairs = (0..count).flat_map(|g| {
        (0..count).map(move |h| vec![GroupElement::generator(g), GroupElement::generator(h)])
    });
    singles.chain(pairs).collect()
}

fn word_family_checks(setup: &Setup, reports: &mut Vec<Report>) {
    let (rec, tg) = (&setup.recursion, &setup.telescope);
    let mut trace = Vec::new();
    let mut global = Vec::new();
    let mut local = Vec::new();
    for gseq in generator_sequences(rec.generator_count()) {
        let product = gseq.iter().fold(GroupElement::identity(), |a, b| a.mul(b));
        let label = json!(gseq
            .iter()
            .map(|g| g.word().to_string())
            .collect::<Vec<_>>());
        let n = match rec.element_order(&product) {
            Ok(n) => n,
            Err(e) => {
                let r = skipped("trace_lemmas", e).param("gseq", label);
                trace.push(r.clone());
                global.push(r.clone());
                continue;
            }
        };
        for c in 0..tg.components().len() {
            let source = OrderSource::Global(n.clone());
            let outcome = verify_trace_lemmas(tg, c, &gseq, &source, setup.config.horizon_factor)
                .unwrap_or_else(|e| failed("trace_lemmas", e));
            trace.push(outcome);
            global.push(
                verify_fundamental_general(tg, c, &gseq, &source)
                    .unwrap_or_else(|e| failed("fundamental_general", e)),
            );
            local.push(
                verify_fundamental_general(tg, c, &gseq, &OrderSource::ComponentLocal)
                    .unwrap_or_else(|e| failed("fundamental_general", e)),
            );
        }
    }
    reports.extend(trace);
    reports.extend(global);
    reports.extend(local);
}

fn sample_words(setup: &Setup) -> Vec<Word> {
    let sample = setup.config.word_sample;
    let gens = setup.telescope.gen_count();
    let mut rng = ChaCha8Rng::seed_from_u64(setup.config.seed);
    (0..sample.count)
        .map(|_| {
            let len = rng.gen_range(0..=sample.max_length);
            Word::reduce((0..len).map(|_| {
                let code = rng.gen_range(0..2 * gens + 1);
                if code < gens {
                    Letter::gen(code)
                } else if code < 2 * gens {
                    Letter::gen_inv(code - gens)
                } else {
                    Letter::Tau
                }
            }))
        })
        .collect()
}

fn bound_checks(setup: &Setup, reports: &mut Vec<Report>) -> Vec<TorsionBoundRow> {
    let (rec, tg) = (&setup.recursion, &setup.telescope);
    let sample = setup.config.word_sample;
    let params = |name: &str| {
        Report::new(name)
            .existential()
            .param("count", sample.count)
            .param("max_length", sample.max_length)
            .param("seed", setup.config.seed)
            .param("rng", RNG_NAME)
    };
    if sample.count == 0 {
        reports.push(skipped("orbit_bound", "empty word sample"));
        reports.push(skipped("torsion_bound", "empty word sample"));
    }
    let table = match rec.torsion_growth_table(&rec.generators(), sample.max_length) {
        Ok(t) => t,
        Err(e) => {
            if sample.count > 0 {
                reports.push(skipped("orbit_bound", &e));
                reports.push(skipped("torsion_bound", &e));
            }
            return Vec::new();
        }
    };
    let rows = (1..table.len())
        .map(|n| TorsionBoundRow::new(n, table[n].clone()))
        .collect();
    if sample.count == 0 {
        return rows;
    }
    let mut orbit = params("orbit_bound");
    let mut torsion = params("torsion_bound");
    for w in sample_words(setup) {
        let t = &table[w.len()];
        let o = verify_orbit_bound(tg, &w, t).unwrap_or_else(|e| failed("orbit_bound", e));
        let s = verify_torsion_bound(tg, &w, t).unwrap_or_else(|e| failed("torsion_bound", e));
        let max_orbit = o
            .witnesses
            .iter()
            .filter_map(|x| x["max_orbit"].as_u64())
            .max();
        orbit.witness(json!({
            "word": w.to_string(),
            "T": t.to_string(),
            "bound": o.parameters.get("bound").cloned().unwrap_or(Value::Null),
            "max_orbit": max_orbit,
            "ok": o.passed(),
        }));
        torsion.witness(json!({
            "word": w.to_string(),
            "T": t.to_string(),
            "order": s.parameters.get("order").cloned().unwrap_or(Value::Null),
            "bound": s.parameters.get("bound").cloned().unwrap_or(Value::Null),
            "ok": s.passed(),
        }));
        if o.failed() {
            orbit.fail();
        }
        if s.failed() {
            torsion.fail();
        }
    }
    reports.push(orbit);
    reports.push(torsion);
    rows
}

fn perfect_quotients(setup: &Setup) -> Report {
    let mut r = Report::new("perfect").informational();
    for c in setup.telescope.components() {
        let base = PermGroup::new(c.base_images()).expect("nonempty generator list");
        let perfect = check_perfect(&base).expect("degrees agree");
        let derived = derived_subgroup(&base).expect("degrees agree").order();
        if !perfect {
            r.fail();
        }
        r.witness(json!({
            "level": c.level(),
            "order": base.order().to_string(),
            "derived_order": derived.to_string(),
            "perfect": perfect,
        }));
    }
    r
}

/// Runs every check in order and assembles the certificate.
pub fn verify(setup: &Setup) -> anyhow::Result<Certificate> {
    let (rec, tg): (&WreathRecursion, &TelescopeGroup) = (&setup.recursion, &setup.telescope);
    let mut reports = vec![transitivity(tg)];
    word_family_checks(setup, &mut reports);
    let table = bound_checks(setup, &mut reports);

    let subdirect = check_subdirect(tg).unwrap_or_else(|e| failed("subdirect", e));
    let subdirect_ok = subdirect.passed();
    reports.push(subdirect);

    for n in 1..=tg.components().len() {
        reports.push(
            check_tail_injectivity(tg, rec, &rec.generators(), setup.config.ball_radius, n)
                .unwrap_or_else(|e| skipped("tail_injectivity", e).param("n", n)),
        );
    }
    reports.push(sign_vectors(tg).report());

    let mut cutoff = None;
    if subdirect_ok {
        let a = alt_cutoff(tg)?;
        cutoff = a.cutoff;
        reports.push(a.report);
    } else {
        reports.push(skipped("alt_cutoff", "subdirect check did not pass"));
    }
    reports.push(perfect_quotients(setup));

    Ok(emit_certificate(
        reports,
        &setup.bytes,
        component_summaries(tg),
        cutoff,
        table,
    )?)
}

/// One line per check: status, name and the distinguishing parameters.
pub fn verify_summary(cert: &Certificate) -> String {
    let mut out = String::new();
    for r in &cert.checks {
        let status = match r.status {
            Status::Pass => "pass",
            Status::Fail if r.is_informational() => "info",
            Status::Fail => "FAIL",
            Status::Skipped => "skip",
        };
        let mut tags = Vec::new();
        for key in ["component", "gseq", "order_source", "n"] {
            if let Some(v) = r.parameters.get(key) {
                tags.push(format!("{key}={v}"));
            }
        }
        writeln!(out, "{status:4}  {} {}", r.name, tags.join(" ")).unwrap();
    }
    let failures = cert
        .checks
        .iter()
        .filter(|r| r.failed() && !r.is_informational())
        .count();
    match cert.alt_cutoff {
        Some(m) => writeln!(out, "alternating cutoff m = {m}").unwrap(),
        None => writeln!(out, "alternating cutoff: none within the truncation").unwrap(),
    }
    writeln!(out, "{} checks, {failures} failed", cert.checks.len()).unwrap();
    out
}

/// Text report for a single word over `g<k>` and `t`.
pub fn word_report(setup: &Setup, text: &str) -> anyhow::Result<String> {
    let w: Word = text.parse()?;
    let (rec, tg) = (&setup.recursion, &setup.telescope);
    let images = tg.evaluate(&w)?;
    let mut out = String::new();
    writeln!(out, "word: {w}").unwrap();
    if images.iter().all(|p| p.is_identity()) {
        writeln!(out, "identity in every component").unwrap();
    }
    for (i, p) in images.iter().enumerate() {
        let mut sizes = p.cycle_type();
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        writeln!(
            out,
            "component {}: {p}  order {}  orbit sizes {:?}",
            i + 1,
            p.order(),
            sizes
        )
        .unwrap();
    }
    let order = tg.order_in_truncation(&w)?;
    writeln!(out, "order in truncation: {order}").unwrap();
    match rec.torsion_growth_table(&rec.generators(), w.len()) {
        Ok(table) => {
            let t: &BigUint = &table[w.len()];
            let r = verify_torsion_bound(tg, &w, t)?;
            writeln!(
                out,
                "torsion bound: order divides {}: {}",
                r.parameters["bound"].as_str().unwrap_or("?"),
                if r.passed() { "yes" } else { "NO" }
            )
            .unwrap();
        }
        Err(e) => writeln!(out, "torsion bound: not computed ({e})").unwrap(),
    }
    Ok(out)
}
