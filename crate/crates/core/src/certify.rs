//! Subdirectness onto symmetric groups, tail injectivity, the sign kernel
//! and its alternating cutoff, perfectness of finite groups, and the
//! certificate document that collects every report of a run.

use std::collections::{BTreeMap, HashMap, VecDeque};

use num_traits::One;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{invalid, Error, Result};
use crate::perm::{factorial, BigNatural, PermGroup, Permutation, StabChain};
use crate::report::Report;
use crate::selfsim::{GroupElement, WreathRecursion};
use crate::telescope::{big, TelescopeGroup};

pub const FORMAT_VERSION: u32 = 1;

/// Componentwise signs, `+1` or `-1`.
pub type SignVector = Vec<i8>;

fn block_group(tg: &TelescopeGroup, component: usize) -> Result<PermGroup> {
    let c = tg.component(component)?;
    let mut gens = c.gen_images().to_vec();
    gens.push(c.tau().clone());
    PermGroup::new(gens)
}

/// Each component projection of the truncation is the full symmetric group
/// on `Ω_i⁺`. Fails with an error if some base action is not transitive.
pub fn check_subdirect(tg: &TelescopeGroup) -> Result<Report> {
    if let Some(i) = tg.components().iter().position(|c| !c.is_base_transitive()) {
        return Err(invalid(format!(
            "precondition failed: the base action of component {} is not transitive",
            i + 1
        )));
    }
    let mut report = Report::new("subdirect").existential();
    for (i, c) in tg.components().iter().enumerate() {
        let group = block_group(tg, i)?;
        let order = group.order();
        let expected = factorial(c.extended_degree());
        let ok = order == expected;
        if !ok {
            report.fail();
        }
        report.witness(json!({
            "component": i + 1,
            "degree": c.extended_degree(),
            "order": big(&order),
            "expected": big(&expected),
            "ok": ok,
        }));
    }
    Ok(report)
}

/// Distinct elements of the ball of the given radius have distinct image
/// tuples under components `n..=t` (1-based `n`).
pub fn check_tail_injectivity(
    tg: &TelescopeGroup,
    rec: &WreathRecursion,
    gens: &[GroupElement],
    radius: usize,
    n: usize,
) -> Result<Report> {
    let t = tg.components().len();
    if n == 0 || n > t {
        return Err(invalid(format!("tail start {n} outside 1..={t}")));
    }
    let ball = rec.ball(gens, radius)?;
    let tail = &tg.components()[n - 1..];
    let mut seen: HashMap<Vec<Permutation>, usize> = HashMap::new();
    let mut report = Report::new("tail_injectivity")
        .existential()
        .param("n", n)
        .param("radius", radius)
        .param("ball_size", ball.len());
    let mut collisions = 0usize;
    for (idx, g) in ball.iter().enumerate() {
        let image = tail
            .iter()
            .map(|c| c.assignment().evaluate(g.word()))
            .collect::<Result<Vec<_>>>()?;
        if let Some(&first) = seen.get(&image) {
            collisions += 1;
            report.witness(json!({
                "collision": [rec.format_element(&ball[first]), rec.format_element(g)],
            }));
        } else {
            seen.insert(image, idx);
        }
    }
    report.set_param("distinct_images", seen.len());
    if collisions > 0 {
        report.fail();
    } else {
        report.witness(json!({ "separated": ball.len() }));
    }
    Ok(report)
}

/// Sign vectors of `X_I` (generators of `G`, then `τ_I`) and the size of the
/// subgroup of `{±1}^t` they generate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignVectors {
    pub vectors: Vec<SignVector>,
    pub rank: usize,
}

impl SignVectors {
    pub fn image_size(&self) -> BigNatural {
        BigNatural::one() << self.rank
    }

    pub fn report(&self) -> Report {
        let mut r = Report::new("sign_vectors")
            .param("rank", self.rank)
            .param("image_size", big(&self.image_size()));
        let last = self.vectors.len().saturating_sub(1);
        for (i, v) in self.vectors.iter().enumerate() {
            let name = if i == last {
                "t".to_string()
            } else {
                format!("g{}", i + 1)
            };
            r.witness(json!({ "generator": name, "signs": v }));
        }
        r
    }
}

fn sign_bits(v: &[i8]) -> Vec<bool> {
    v.iter().map(|&s| s < 0).collect()
}

fn gf2_rank(rows: &[Vec<bool>]) -> usize {
    let mut rows = rows.to_vec();
    let width = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..width {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col]) else {
            continue;
        };
        rows.swap(rank, pivot);
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[col] {
                for (a, b) in row.iter_mut().zip(&pivot_row) {
                    *a ^= b;
                }
            }
        }
        rank += 1;
    }
    rank
}

pub fn sign_vectors(tg: &TelescopeGroup) -> SignVectors {
    let vectors: Vec<SignVector> = tg
        .gen_tuples()
        .iter()
        .map(|t| t.iter().map(Permutation::sign).collect())
        .collect();
    let rank = gf2_rank(&vectors.iter().map(|v| sign_bits(v)).collect::<Vec<_>>());
    SignVectors { vectors, rank }
}

fn union_signs(tg: &TelescopeGroup, p: &Permutation) -> Vec<bool> {
    tg.components()
        .iter()
        .zip(tg.offsets())
        .map(|(c, off)| {
            p.restrict(off, c.extended_degree())
                .expect("block preserved")
                .sign()
                < 0
        })
        .collect()
}

/// `K`, the kernel of the sign map of the truncation, with its projections.
#[derive(Clone, Debug)]
pub struct AltCutoff {
    /// Least 1-based component index from which every projection of `K` is
    /// the full alternating group.
    pub cutoff: Option<usize>,
    pub kernel_generators: Vec<Permutation>,
    pub kernel_order: BigNatural,
    pub projection_orders: Vec<BigNatural>,
    pub full_alternating: Vec<bool>,
    pub report: Report,
}

/// Generators of the sign kernel via Schreier generators over coset
/// representatives of the (finite, elementary abelian) sign image.
pub fn sign_kernel(tg: &TelescopeGroup) -> Result<(Vec<Permutation>, StabChain)> {
    let degree = tg.union_degree();
    let gens = tg.union_generators();
    let signs: Vec<Vec<bool>> = gens.iter().map(|g| union_signs(tg, g)).collect();
    let add = |a: &[bool], b: &[bool]| a.iter().zip(b).map(|(x, y)| x ^ y).collect::<Vec<_>>();

    let identity = Permutation::identity(degree);
    let zero = vec![false; tg.components().len()];
    let mut reps: BTreeMap<Vec<bool>, Permutation> = BTreeMap::new();
    let mut order = vec![zero.clone()];
    reps.insert(zero.clone(), identity);
    let mut queue = VecDeque::from([zero]);
    while let Some(h) = queue.pop_front() {
        for (g, s) in gens.iter().zip(&signs) {
            let next = add(&h, s);
            if !reps.contains_key(&next) {
                let rep = g.compose(&reps[&h])?;
                reps.insert(next.clone(), rep);
                order.push(next.clone());
                queue.push_back(next);
            }
        }
    }

    let mut chain = StabChain::new(degree);
    let mut kernel = Vec::new();
    for h in &order {
        let r = &reps[h];
        for (g, s) in gens.iter().zip(&signs) {
            let target = &reps[&add(h, s)];
            let schreier = target.inverse().compose(&g.compose(r)?)?;
            if !schreier.is_identity() && chain.insert(&schreier)? {
                kernel.push(schreier);
            }
        }
    }
    Ok((kernel, chain))
}

pub fn alt_cutoff(tg: &TelescopeGroup) -> Result<AltCutoff> {
    let (kernel, chain) = sign_kernel(tg)?;
    let kernel_signs_trivial = kernel
        .iter()
        .all(|k| union_signs(tg, k).iter().all(|&odd| !odd));
    let mut projection_orders = Vec::new();
    let mut full_alternating = Vec::new();
    for (c, off) in tg.components().iter().zip(tg.offsets()) {
        let n = c.extended_degree();
        let proj = if kernel.is_empty() {
            PermGroup::trivial(n)
        } else {
            PermGroup::new(
                kernel
                    .iter()
                    .map(|k| k.restrict(off, n))
                    .collect::<Result<Vec<_>>>()?,
            )?
        };
        projection_orders.push(proj.order());
        full_alternating.push(proj.is_full_alternating());
    }
    let t = full_alternating.len();
    let tail_start = full_alternating
        .iter()
        .rposition(|ok| !ok)
        .map_or(0, |i| i + 1);
    let cutoff = (tail_start < t).then_some(tail_start + 1);

    let mut report = Report::new("alt_cutoff")
        .existential()
        .param("kernel_generators", kernel.len())
        .param("kernel_order", big(&chain.order()))
        .param("kernel_signs_trivial", kernel_signs_trivial);
    match cutoff {
        Some(m) => report.set_param("m", m),
        None => {
            report.set_param("m", Value::Null);
            report.set_param("reason", "cutoff exceeds truncation");
            report.fail();
        }
    }
    if !kernel_signs_trivial {
        report.fail();
    }
    for (i, c) in tg.components().iter().enumerate() {
        let expected = factorial(c.extended_degree()) / BigNatural::from(2u32);
        report.witness(json!({
            "component": i + 1,
            "degree": c.extended_degree(),
            "order": big(&projection_orders[i]),
            "expected": big(&expected),
            "full_alternating": full_alternating[i],
        }));
    }
    Ok(AltCutoff {
        cutoff,
        kernel_generators: kernel,
        kernel_order: chain.order(),
        projection_orders,
        full_alternating,
        report,
    })
}

/// Normal closure of the generator commutators.
pub fn derived_subgroup(g: &PermGroup) -> Result<StabChain> {
    let gens = g.generators();
    let mut chain = StabChain::new(g.degree());
    let mut queue = VecDeque::new();
    for (i, x) in gens.iter().enumerate() {
        for y in &gens[i + 1..] {
            let c = x.inverse().compose(&y.inverse())?.compose(x)?.compose(y)?;
            if chain.insert(&c)? {
                queue.push_back(c);
            }
        }
    }
    while let Some(c) = queue.pop_front() {
        for x in gens {
            let conj = x.compose(&c)?.compose(&x.inverse())?;
            if chain.insert(&conj)? {
                queue.push_back(conj);
            }
        }
    }
    Ok(chain)
}

pub fn check_perfect(g: &PermGroup) -> Result<bool> {
    Ok(derived_subgroup(g)?.order() == g.order())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentSummary {
    pub level: Option<usize>,
    pub base_degree: usize,
    pub extended_degree: usize,
    pub basepoint: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TorsionBoundRow {
    pub n: usize,
    #[serde(rename = "T", serialize_with = "as_decimal")]
    pub t: BigNatural,
    pub bound: String,
}

impl TorsionBoundRow {
    pub fn new(n: usize, t: BigNatural) -> Self {
        let bound = format!("({t}*{})! = {}!", n + 1, &t * BigNatural::from(n + 1));
        TorsionBoundRow { n, t, bound }
    }
}

fn as_decimal<S: serde::Serializer>(n: &BigNatural, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&n.to_string())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub format_version: u32,
    pub config_digest: String,
    pub components: Vec<ComponentSummary>,
    pub checks: Vec<Report>,
    pub alt_cutoff: Option<usize>,
    pub torsion_bound_table: Vec<TorsionBoundRow>,
}

pub fn config_digest(config: &[u8]) -> String {
    hex::encode(Sha256::digest(config))
}

pub fn component_summaries(tg: &TelescopeGroup) -> Vec<ComponentSummary> {
    tg.components()
        .iter()
        .map(|c| ComponentSummary {
            level: c.level(),
            base_degree: c.base_degree(),
            extended_degree: c.extended_degree(),
            basepoint: c.basepoint(),
        })
        .collect()
}

/// Assembles a certificate; a passing existential check without witnesses is rejected.
pub fn emit_certificate(
    checks: Vec<Report>,
    config: &[u8],
    components: Vec<ComponentSummary>,
    alt_cutoff: Option<usize>,
    torsion_bound_table: Vec<TorsionBoundRow>,
) -> Result<Certificate> {
    if let Some(bad) = checks
        .iter()
        .find(|r| r.existential && r.passed() && r.witnesses.is_empty())
    {
        return Err(Error::Integrity(format!(
            "check '{}' passes without witness data",
            bad.name
        )));
    }
    Ok(Certificate {
        format_version: FORMAT_VERSION,
        config_digest: config_digest(config),
        components,
        checks,
        alt_cutoff,
        torsion_bound_table,
    })
}

impl Certificate {
    /// Pretty JSON with sorted object keys and a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("certificate serializes");
        s.push('\n');
        s
    }

    /// True iff no non-informational check failed.
    pub fn is_clean(&self) -> bool {
        self.checks
            .iter()
            .all(|r| !r.failed() || r.is_informational())
    }
}
