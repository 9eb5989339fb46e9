//! Extended actions `Ω⁺ = Ω ∪ {q}` with `τ = (p, q)`, and finite truncations
//! of the group generated by the diagonal image of `G` and `(τ_i)`.
//!
//! The verifiers here sweep every point of every component and return
//! structured [`Report`]s. Witnesses are ordered by component, then point.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{invalid, Error, Result};
use crate::freewords::{build_w, trace, Assignment, Letter, Word};
use crate::perm::{BigNatural, Permutation};
use crate::report::Report;
use crate::selfsim::{GroupElement, WreathRecursion};

pub(crate) fn big(n: &BigNatural) -> Value {
    Value::String(n.to_string())
}

/// A `G`-set with one extra fixed point appended and the transposition
/// swapping it with the basepoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtendedAction {
    level: Option<usize>,
    base_degree: usize,
    basepoint: usize,
    tau: Permutation,
    gen_images: Vec<Permutation>,
}

impl ExtendedAction {
    /// `gen_images` act on `Ω = {0, .., n-1}`; the new point is `n`.
    pub fn new(gen_images: &[Permutation], basepoint: usize) -> Result<Self> {
        let base_degree = gen_images
            .first()
            .ok_or_else(|| invalid("an action needs at least one generator image"))?
            .degree();
        if let Some(bad) = gen_images.iter().find(|p| p.degree() != base_degree) {
            return Err(Error::DegreeMismatch {
                left: base_degree,
                right: bad.degree(),
            });
        }
        if basepoint >= base_degree {
            return Err(Error::PointOutOfRange {
                point: basepoint,
                degree: base_degree,
            });
        }
        let ext = base_degree + 1;
        Ok(ExtendedAction {
            level: None,
            base_degree,
            basepoint,
            tau: Permutation::transposition(ext, basepoint, base_degree)?,
            gen_images: gen_images.iter().map(|p| p.extend_to(ext)).collect(),
        })
    }

    fn with_level(mut self, level: usize) -> Self {
        self.level = Some(level);
        self
    }

    pub fn level(&self) -> Option<usize> {
        self.level
    }

    pub fn base_degree(&self) -> usize {
        self.base_degree
    }

    pub fn extended_degree(&self) -> usize {
        self.base_degree + 1
    }

    pub fn basepoint(&self) -> usize {
        self.basepoint
    }

    pub fn extra_point(&self) -> usize {
        self.base_degree
    }

    pub fn tau(&self) -> &Permutation {
        &self.tau
    }

    pub fn gen_images(&self) -> &[Permutation] {
        &self.gen_images
    }

    /// Generator images restricted to `Ω`.
    pub fn base_images(&self) -> Vec<Permutation> {
        self.gen_images
            .iter()
            .map(|p| p.restrict(0, self.base_degree).expect("q is fixed"))
            .collect()
    }

    pub fn is_base_transitive(&self) -> bool {
        crate::perm::orbit(&self.base_images(), 0).is_ok_and(|o| o.len() == self.base_degree)
    }

    /// Letters `g_j` and `t` assigned to this component's permutations.
    pub fn assignment(&self) -> Assignment {
        Assignment::new(self.gen_images.clone(), Some(self.tau.clone()))
            .expect("images share the extended degree")
    }

    /// Assignment sending `g_j` to the image of `gseq[j]` and `t` to `τ`.
    pub fn sequence_assignment(&self, gseq: &[GroupElement]) -> Result<Assignment> {
        let own = self.assignment();
        let images = gseq
            .iter()
            .map(|g| own.evaluate(g.word()))
            .collect::<Result<Vec<_>>>()?;
        Assignment::new(images, Some(self.tau.clone()))
    }
}

/// Finite truncation `Γ_I` acting on the disjoint union of the `Ω_i⁺`.
#[derive(Clone, Debug)]
pub struct TelescopeGroup {
    components: Vec<ExtendedAction>,
    gen_count: usize,
}

impl TelescopeGroup {
    pub fn from_components(components: Vec<ExtendedAction>) -> Result<Self> {
        let gen_count = components
            .first()
            .ok_or_else(|| invalid("a telescope needs at least one component"))?
            .gen_images
            .len();
        if components.iter().any(|c| c.gen_images.len() != gen_count) {
            return Err(invalid("components disagree on the number of generators"));
        }
        Ok(TelescopeGroup {
            components,
            gen_count,
        })
    }

    pub fn components(&self) -> &[ExtendedAction] {
        &self.components
    }

    pub fn component(&self, i: usize) -> Result<&ExtendedAction> {
        self.components
            .get(i)
            .ok_or_else(|| invalid(format!("component {i} out of range")))
    }

    pub fn gen_count(&self) -> usize {
        self.gen_count
    }

    /// The first `t` components.
    pub fn prefix(&self, t: usize) -> Result<TelescopeGroup> {
        TelescopeGroup::from_components(self.components[..t.min(self.components.len())].to_vec())
    }

    pub fn union_degree(&self) -> usize {
        self.components
            .iter()
            .map(ExtendedAction::extended_degree)
            .sum()
    }

    pub fn offsets(&self) -> Vec<usize> {
        self.components
            .iter()
            .scan(0, |acc, c| {
                let start = *acc;
                *acc += c.extended_degree();
                Some(start)
            })
            .collect()
    }

    /// Generator tuples for `X_I`: one per generator of `G`, then `τ_I` last.
    pub fn gen_tuples(&self) -> Vec<Vec<Permutation>> {
        let mut tuples: Vec<Vec<Permutation>> = (0..self.gen_count)
            .map(|g| {
                self.components
                    .iter()
                    .map(|c| c.gen_images[g].clone())
                    .collect()
            })
            .collect();
        tuples.push(self.components.iter().map(|c| c.tau.clone()).collect());
        tuples
    }

    /// `X_I` as permutations of the disjoint union.
    pub fn union_generators(&self) -> Vec<Permutation> {
        self.gen_tuples()
            .iter()
            .map(|t| Permutation::direct_sum(t))
            .collect()
    }

    fn check_word(&self, w: &Word) -> Result<()> {
        match w.max_generator() {
            Some(m) if m >= self.gen_count => Err(invalid(format!(
                "word {w} uses g{} but the telescope has {} generators",
                m + 1,
                self.gen_count
            ))),
            _ => Ok(()),
        }
    }

    /// Componentwise image of a word over `g<k>` and `t`.
    pub fn evaluate(&self, w: &Word) -> Result<Vec<Permutation>> {
        self.check_word(w)?;
        self.components
            .iter()
            .map(|c| c.assignment().evaluate(w))
            .collect()
    }

    pub fn evaluate_union(&self, w: &Word) -> Result<Permutation> {
        Ok(Permutation::direct_sum(&self.evaluate(w)?))
    }

    /// Order of the image of `w` in the truncation: lcm of component orders.
    pub fn order_in_truncation(&self, w: &Word) -> Result<BigNatural> {
        Ok(self
            .evaluate(w)?
            .iter()
            .fold(BigNatural::one(), |acc, p| acc.lcm(&p.order())))
    }
}

pub fn extend_action(gen_images: &[Permutation], basepoint: usize) -> Result<ExtendedAction> {
    ExtendedAction::new(gen_images, basepoint)
}

/// Components `i` use the level-`levels[i]` action with basepoint `basepoints[i]`.
pub fn build_telescope(
    rec: &WreathRecursion,
    levels: &[usize],
    basepoints: &[usize],
) -> Result<TelescopeGroup> {
    if levels.is_empty() {
        return Err(invalid("the level list is empty"));
    }
    if levels[0] == 0 {
        return Err(invalid("levels start at 1"));
    }
    if levels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("levels must be strictly increasing"));
    }
    if basepoints.len() != levels.len() {
        return Err(invalid(format!(
            "{} basepoints given for {} levels",
            basepoints.len(),
            levels.len()
        )));
    }
    let actions = rec.level_actions(*levels.last().expect("nonempty"));
    let components = levels
        .iter()
        .zip(basepoints)
        .map(|(&level, &p)| {
            ExtendedAction::new(&actions[level - 1].images, p).map(|c| c.with_level(level))
        })
        .collect::<Result<Vec<_>>>()?;
    TelescopeGroup::from_components(components)
}

/// Which `N` the word-family verifiers use.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrderSource {
    /// `ord_G(g_1 .. g_k)`, e.g. from [`WreathRecursion::element_order`].
    Global(BigNatural),
    /// Order of `g_1 .. g_k` in the component's own action.
    ComponentLocal,
}

struct Family {
    k: usize,
    n: usize,
    assign: Assignment,
    basepoint: usize,
    degree: usize,
    params: BTreeMap<String, Value>,
}

impl Family {
    fn new(
        tg: &TelescopeGroup,
        component: usize,
        gseq: &[GroupElement],
        source: &OrderSource,
    ) -> Result<Self> {
        if gseq.is_empty() {
            return Err(invalid("the generator sequence is empty"));
        }
        let comp = tg.component(component)?;
        for g in gseq {
            tg.check_word(g.word())?;
        }
        let assign = comp.sequence_assignment(gseq)?;
        let (n_big, mode) = match source {
            OrderSource::Global(n) => (n.clone(), "global"),
            OrderSource::ComponentLocal => {
                let product = Word::reduce((0..gseq.len()).map(Letter::gen));
                (assign.evaluate(&product)?.order(), "component-local")
            }
        };
        if n_big.is_zero() {
            return Err(invalid("N must be positive"));
        }
        let n = n_big
            .to_usize()
            .filter(|n| n.checked_mul(gseq.len() + 1).is_some())
            .ok_or_else(|| invalid(format!("N = {n_big} is too large for an exhaustive sweep")))?;
        let mut params = BTreeMap::new();
        params.insert("component".into(), json!(component + 1));
        params.insert("k".into(), json!(gseq.len()));
        params.insert("N".into(), json!(n));
        params.insert("order_source".into(), json!(mode));
        params.insert(
            "gseq".into(),
            json!(gseq
                .iter()
                .map(|g| g.word().to_string())
                .collect::<Vec<_>>()),
        );
        Ok(Family {
            k: gseq.len(),
            n,
            assign,
            basepoint: comp.basepoint(),
            degree: comp.extended_degree(),
            params,
        })
    }

    fn w(&self, n: usize, i: usize) -> Word {
        build_w(self.k, n, i).expect("i < k")
    }

    fn report(&self, name: &str) -> Report {
        let mut r = Report::new(name);
        r.parameters = self.params.clone();
        r
    }
}

/// For every point `ξ`, the least `m ≥ 1` with `w_{m,0} · ξ = ξ` is at most `N(k+1)`.
pub fn verify_fundamental_general(
    tg: &TelescopeGroup,
    component: usize,
    gseq: &[GroupElement],
    source: &OrderSource,
) -> Result<Report> {
    let fam = Family::new(tg, component, gseq, source)?;
    let bound = fam.n * (fam.k + 1);
    let step = fam.assign.evaluate(&fam.w(1, 0))?;
    let mut report = fam
        .report("fundamental_general")
        .existential()
        .param("bound", bound);
    for xi in 0..fam.degree {
        let mut x = step.apply(xi);
        let mut m = 1;
        while x != xi {
            x = step.apply(x);
            m += 1;
        }
        if m > bound {
            report.fail();
        }
        report.witness(json!({ "point": xi, "m": m, "ok": m <= bound }));
    }
    Ok(report)
}

/// The three trace statements about `w_{n,i}`, checked for every point and
/// every `0 <= i < k`, for `n` up to `horizon_factor * N(k+1)`:
///
/// 1. if `p ∉ Tr_{w_{N,i}}(ξ)` then `p ∉ Tr_{w_{n,i}}(ξ)`;
/// 2. `p ∈ Tr_{w_{N,i}}(p)`;
/// 3. if `p ∈ Tr_{w_{n,i}}(ξ)` for some `n`, there are `m1 < m2 < N(k+1)`
///    and `j < k` with `w_{N(k+1),0}·ξ = w_{m1,j}·p = w_{m2,j}·p`.
///
/// Statement 3 can fail with the strict bound `m2 < N(k+1)` (already for
/// the regular action of C₂). The report therefore also counts violations of
/// the relaxed bound `m2 < 2N(k+1)` under `violations.pigeonhole_relaxed_bound`.
/// That count is diagnostic and does not change the status.
pub fn verify_trace_lemmas(
    tg: &TelescopeGroup,
    component: usize,
    gseq: &[GroupElement],
    source: &OrderSource,
    horizon_factor: usize,
) -> Result<Report> {
    if horizon_factor == 0 {
        return Err(invalid("horizon factor must be at least 1"));
    }
    let fam = Family::new(tg, component, gseq, source)?;
    let (k, n, p) = (fam.k, fam.n, fam.basepoint);
    let cap = n * (k + 1);
    let horizon = horizon_factor * cap;
    let top = horizon.max(n);
    let prefix_len = |m: usize, i: usize| 2 * (m * k + i);

    // w_{m,j} = w_{1,0}^m w_{0,j}, so images of p are tabulated by iterating w_{1,0}.
    // Rows run up to 2N(k+1) for the relaxed-bound diagnostic.
    let step = fam.assign.evaluate(&fam.w(1, 0))?;
    let from_p: Vec<Vec<usize>> = (0..k)
        .map(|j| {
            let mut x = fam.assign.act(&fam.w(0, j), p).expect("p in range");
            (0..2 * cap)
                .map(|_| {
                    let here = x;
                    x = step.apply(x);
                    here
                })
                .collect()
        })
        .collect();
    let find_pair = |target: usize, limit: usize| -> Option<(usize, usize, usize)> {
        from_p.iter().enumerate().find_map(|(j, row)| {
            let mut hits = row[..limit]
                .iter()
                .enumerate()
                .filter(|(_, &y)| y == target);
            let (m1, _) = hits.next()?;
            let (m2, _) = hits.next()?;
            Some((m1, m2, j))
        })
    };

    let mut report = fam
        .report("trace_lemmas")
        .existential()
        .param("horizon", horizon)
        .param("horizon_factor", horizon_factor);
    let mut violations = [0usize; 4];
    for xi in 0..fam.degree {
        let target = fam.assign.act(&fam.w(cap, 0), xi)?;
        for i in 0..k {
            let tr = trace(&fam.w(top, i), xi, &fam.assign)?;
            let at_n = tr.prefix_contains(prefix_len(n, i), p);
            let within_horizon = tr.prefix_contains(prefix_len(horizon, i), p);

            let avoids_ok = at_n || !within_horizon;
            let returns_ok = xi != p || at_n;
            let (pigeon, relaxed) = if within_horizon {
                (find_pair(target, cap), find_pair(target, 2 * cap))
            } else {
                (None, None)
            };
            let pigeon_ok = !within_horizon || pigeon.is_some();
            let relaxed_ok = !within_horizon || relaxed.is_some();
            for (slot, ok) in violations
                .iter_mut()
                .zip([avoids_ok, returns_ok, pigeon_ok, relaxed_ok])
            {
                *slot += usize::from(!ok);
            }
            let ok = avoids_ok && returns_ok && pigeon_ok;
            let mut wit = json!({
                "point": xi,
                "i": i,
                "p_in_trace_at_N": at_n,
                "p_in_trace_within_horizon": within_horizon,
                "avoidance": avoids_ok,
                "return_to_p": returns_ok,
                "pigeonhole": pigeon_ok,
                "ok": ok,
            });
            if let Some((m1, m2, j)) = pigeon.or(relaxed) {
                wit["m1"] = json!(m1);
                wit["m2"] = json!(m2);
                wit["j"] = json!(j);
            }
            report.witness(wit);
        }
    }
    let [avoidance, return_to_p, pigeonhole, relaxed] = violations;
    report.set_param(
        "violations",
        json!({
            "avoidance": avoidance,
            "return_to_p": return_to_p,
            "pigeonhole": pigeonhole,
            "pigeonhole_relaxed_bound": relaxed,
        }),
    );
    if avoidance + return_to_p + pigeonhole > 0 {
        report.fail();
    }
    Ok(report)
}

/// Every orbit of `⟨w⟩` in every component has size at most `T·(|w|+1)`.
pub fn verify_orbit_bound(tg: &TelescopeGroup, w: &Word, t: &BigNatural) -> Result<Report> {
    let len = w.len();
    let bound = t * BigNatural::from(len + 1);
    let mut report = Report::new("orbit_bound")
        .param("word", w.to_string())
        .param("length", len)
        .param("T", big(t))
        .param("bound", big(&bound));
    for (ci, p) in tg.evaluate(w)?.iter().enumerate() {
        let largest = p.cycle_type().into_iter().max().unwrap_or(0);
        let ok = BigNatural::from(largest) <= bound;
        if !ok {
            report.fail();
        }
        report.witness(json!({ "component": ci + 1, "max_orbit": largest, "ok": ok }));
    }
    Ok(report)
}

/// Prime factorization of the lcm of `lengths`.
fn lcm_factorization(lengths: impl IntoIterator<Item = usize>) -> BTreeMap<usize, u32> {
    let mut out: BTreeMap<usize, u32> = BTreeMap::new();
    for mut len in lengths {
        let mut p = 2;
        while p * p <= len {
            let mut e = 0;
            while len % p == 0 {
                len /= p;
                e += 1;
            }
            if e > 0 {
                let slot = out.entry(p).or_insert(0);
                *slot = (*slot).max(e);
            }
            p += 1;
        }
        if len > 1 {
            out.entry(len).or_insert(1);
        }
    }
    out
}

/// Exponent of the prime `p` in `m!`.
pub fn legendre_valuation(m: &BigNatural, p: usize) -> BigNatural {
    let p = BigNatural::from(p);
    let mut total = BigNatural::zero();
    let mut q = m / &p;
    while !q.is_zero() {
        total += &q;
        q /= &p;
    }
    total
}

/// `ord(w)` in the truncation divides `(T·(|w|+1))!`, checked prime by prime.
pub fn verify_torsion_bound(tg: &TelescopeGroup, w: &Word, t: &BigNatural) -> Result<Report> {
    let len = w.len();
    let images = tg.evaluate(w)?;
    let order = images
        .iter()
        .fold(BigNatural::one(), |acc, p| acc.lcm(&p.order()));
    let m = t * BigNatural::from(len + 1);
    let factors = lcm_factorization(images.iter().flat_map(Permutation::cycle_type));
    let mut report = Report::new("torsion_bound")
        .param("word", w.to_string())
        .param("length", len)
        .param("T", big(t))
        .param("bound", format!("({t}*{})!", len + 1))
        .param("order", big(&order));
    for (&prime, &exp) in &factors {
        let val = legendre_valuation(&m, prime);
        let ok = val >= BigNatural::from(exp);
        if !ok {
            report.fail();
        }
        report.witness(json!({
            "prime": prime,
            "exponent": exp,
            "factorial_valuation": big(&val),
            "ok": ok,
        }));
    }
    Ok(report)
}
