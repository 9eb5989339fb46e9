//! Self-similar groups acting on rooted `d`-ary trees.
//!
//! A [`WreathRecursion`] gives, for every generator, a permutation of the
//! first tree level and one section word per child:
//! `g(x w) = σ_g(x) g|_x(w)`. Products obey `(uv)|_x = u|_{σ_v(x)} v|_x`,
//! so the rightmost letter again acts first. Level actions realise the
//! finite quotients by level stabilizers. Equality and element orders are
//! decided by exploring the finite set of section states a word reaches,
//! which terminates for contracting recursions.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::RwLock;

use num_integer::Integer;
use num_traits::One;

use crate::error::{invalid, Error, Result};
use crate::freewords::{Letter, Word};
use crate::perm::{BigNatural, Permutation};

pub const DEFAULT_STEP_BUDGET: usize = 1_000_000;

/// An element of the self-similar group, stored as a `t`-free reduced word.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct GroupElement(Word);

impl GroupElement {
    pub fn identity() -> Self {
        GroupElement(Word::empty())
    }

    pub fn new(word: Word) -> Result<Self> {
        if word.contains_tau() {
            return Err(invalid(format!("group element word {word} contains t")));
        }
        Ok(GroupElement(word))
    }

    pub fn generator(index: usize) -> Self {
        GroupElement(Word::from(Letter::gen(index)))
    }

    pub fn word(&self) -> &Word {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &GroupElement) -> GroupElement {
        GroupElement(self.0.concat(&other.0))
    }

    pub fn inverse(&self) -> GroupElement {
        GroupElement(self.0.inverse())
    }

    pub fn pow(&self, e: usize) -> GroupElement {
        GroupElement(self.0.pow(e))
    }
}

impl From<GroupElement> for Word {
    fn from(g: GroupElement) -> Word {
        g.0
    }
}

/// Permutations of the `d^level` vertices at depth `level`, one per generator.
///
/// Vertex `(x_1, .., x_l)` has index `Σ x_j d^(l-j)`, so dropping the last
/// tree letter is integer division by `d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelAction {
    pub level: usize,
    pub arity: usize,
    pub images: Vec<Permutation>,
    inverses: Vec<Permutation>,
}

impl LevelAction {
    pub fn degree(&self) -> usize {
        self.arity.pow(self.level as u32)
    }

    fn letter(&self, l: Letter) -> Result<&Permutation> {
        match l {
            Letter::Gen { index, inverse } if index < self.images.len() => Ok(if inverse {
                &self.inverses[index]
            } else {
                &self.images[index]
            }),
            _ => Err(invalid(format!(
                "letter {l} is not a generator of this action"
            ))),
        }
    }

    pub fn evaluate(&self, g: &GroupElement) -> Result<Permutation> {
        let mut acc = Permutation::identity(self.degree());
        for &l in g.word().letters() {
            acc = acc.compose_unchecked(self.letter(l)?);
        }
        Ok(acc)
    }

    pub fn is_transitive(&self) -> bool {
        crate::perm::orbit(&self.images, 0).is_ok_and(|o| o.len() == self.degree())
    }

    /// The action one level up, obtained by forgetting the last tree letter.
    pub fn truncate(&self) -> Result<Vec<Permutation>> {
        let d = self.arity;
        let deg = self.degree() / d;
        self.images
            .iter()
            .map(|p| Permutation::from_images((0..deg).map(|v| p.apply(v * d) / d).collect()))
            .collect()
    }
}

pub struct WreathRecursion {
    arity: usize,
    names: Vec<String>,
    root: Vec<Permutation>,
    root_inv: Vec<Permutation>,
    sections: Vec<Vec<Word>>,
    contracting: bool,
    budget: usize,
    identity_cache: RwLock<HashMap<Word, bool>>,
    order_cache: RwLock<HashMap<Word, BigNatural>>,
}

impl fmt::Debug for WreathRecursion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WreathRecursion")
            .field("arity", &self.arity)
            .field("names", &self.names)
            .field("root", &self.root)
            .field("sections", &self.sections)
            .field("contracting", &self.contracting)
            .finish()
    }
}

impl WreathRecursion {
    pub fn new(
        arity: usize,
        names: Vec<String>,
        root: Vec<Permutation>,
        sections: Vec<Vec<Word>>,
        contracting: bool,
    ) -> Result<Self> {
        if arity < 2 {
            return Err(invalid("tree arity must be at least 2"));
        }
        let k = names.len();
        if k == 0 {
            return Err(invalid("a recursion needs at least one generator"));
        }
        if root.len() != k || sections.len() != k {
            return Err(invalid(
                "root permutations and sections must match the generator list",
            ));
        }
        let mut seen = HashSet::new();
        for name in &names {
            if name.is_empty() || name.contains(char::is_whitespace) || name.contains('^') {
                return Err(invalid(format!("bad generator name {name:?}")));
            }
            if !seen.insert(name) {
                return Err(invalid(format!("duplicate generator name {name:?}")));
            }
        }
        for (g, p) in root.iter().enumerate() {
            if p.degree() != arity {
                return Err(invalid(format!(
                    "root permutation of {} has degree {} instead of {arity}",
                    names[g],
                    p.degree()
                )));
            }
        }
        for (g, row) in sections.iter().enumerate() {
            if row.len() != arity {
                return Err(invalid(format!(
                    "generator {} has {} sections instead of {arity}",
                    names[g],
                    row.len()
                )));
            }
            for w in row {
                if w.contains_tau() || w.max_generator().is_some_and(|m| m >= k) {
                    return Err(invalid(format!(
                        "section {w} of {} refers to an unknown generator",
                        names[g]
                    )));
                }
            }
        }
        Ok(WreathRecursion {
            arity,
            root_inv: root.iter().map(Permutation::inverse).collect(),
            names,
            root,
            sections,
            contracting,
            budget: DEFAULT_STEP_BUDGET,
            identity_cache: RwLock::new(HashMap::new()),
            order_cache: RwLock::new(HashMap::new()),
        })
    }

    /// Grigorchuk's group: `a` swaps the two subtrees, `b = (a, c)`, `c = (a, d)`, `d = (1, b)`.
    pub fn grigorchuk() -> Self {
        let id = Permutation::identity(2);
        let swap = Permutation::transposition(2, 0, 1).expect("valid transposition");
        let g = |i: usize| Word::from(Letter::gen(i));
        Self::new(
            2,
            ["a", "b", "c", "d"].map(String::from).to_vec(),
            vec![swap, id.clone(), id.clone(), id],
            vec![
                vec![Word::empty(), Word::empty()],
                vec![g(0), g(2)],
                vec![g(0), g(3)],
                vec![Word::empty(), g(1)],
            ],
            true,
        )
        .expect("preset is well formed")
    }

    /// Gupta-Sidki 3-group: `a` cycles the three subtrees, `t = (a, a^-1, t)`.
    pub fn gupta_sidki() -> Self {
        let cycle = Permutation::from_cycles(3, &[vec![0, 1, 2]]).expect("valid cycle");
        Self::new(
            3,
            vec!["a".into(), "t".into()],
            vec![cycle, Permutation::identity(3)],
            vec![
                vec![Word::empty(), Word::empty(), Word::empty()],
                vec![
                    Word::from(Letter::gen(0)),
                    Word::from(Letter::gen_inv(0)),
                    Word::from(Letter::gen(1)),
                ],
            ],
            true,
        )
        .expect("preset is well formed")
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "grigorchuk" => Ok(Self::grigorchuk()),
            "gupta-sidki-3" => Ok(Self::gupta_sidki()),
            other => Err(invalid(format!("unknown preset {other:?}"))),
        }
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn generator_count(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn is_contracting(&self) -> bool {
        self.contracting
    }

    pub fn root_perm(&self, g: usize) -> &Permutation {
        &self.root[g]
    }

    pub fn sections(&self, g: usize) -> &[Word] {
        &self.sections[g]
    }

    pub fn generators(&self) -> Vec<GroupElement> {
        (0..self.generator_count())
            .map(GroupElement::generator)
            .collect()
    }

    /// Parses whitespace-separated generator names with optional `^-1`; `1` or blank is the identity.
    pub fn parse_element(&self, text: &str) -> Result<GroupElement> {
        parse_named_word(&self.names, text).map(GroupElement)
    }

    pub fn format_element(&self, g: &GroupElement) -> String {
        if g.is_empty() {
            return "1".into();
        }
        g.word()
            .letters()
            .iter()
            .map(|l| match *l {
                Letter::Gen { index, inverse } => {
                    format!("{}{}", self.names[index], if inverse { "^-1" } else { "" })
                }
                Letter::Tau => "t".into(),
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn check_element(&self, g: &GroupElement) -> Result<()> {
        match g.word().max_generator() {
            Some(m) if m >= self.generator_count() => {
                Err(invalid(format!("generator index {} out of range", m + 1)))
            }
            _ => Ok(()),
        }
    }

    fn letter_root(&self, l: Letter) -> &Permutation {
        match l {
            Letter::Gen { index, inverse } => {
                if inverse {
                    &self.root_inv[index]
                } else {
                    &self.root[index]
                }
            }
            Letter::Tau => unreachable!("group element words never contain t"),
        }
    }

    fn letter_section(&self, l: Letter, x: usize) -> Word {
        match l {
            Letter::Gen {
                index,
                inverse: false,
            } => self.sections[index][x].clone(),
            Letter::Gen {
                index,
                inverse: true,
            } => self.sections[index][self.root_inv[index].apply(x)].inverse(),
            Letter::Tau => unreachable!("group element words never contain t"),
        }
    }

    /// Root permutation and the sections at every child.
    pub fn decompose(&self, w: &Word) -> (Permutation, Vec<Word>) {
        let mut root = Permutation::identity(self.arity);
        for &l in w.letters() {
            root = root.compose_unchecked(self.letter_root(l));
        }
        let sections = (0..self.arity)
            .map(|x| {
                let mut parts: Vec<Letter> = Vec::new();
                let mut y = x;
                let mut pieces = Vec::with_capacity(w.len());
                for &l in w.letters().iter().rev() {
                    pieces.push(self.letter_section(l, y));
                    y = self.letter_root(l).apply(y);
                }
                for piece in pieces.iter().rev() {
                    parts.extend_from_slice(piece.letters());
                }
                Word::reduce(parts)
            })
            .collect();
        (root, sections)
    }

    /// Actions on levels `1..=max_level`.
    pub fn level_actions(&self, max_level: usize) -> Vec<LevelAction> {
        let d = self.arity;
        let k = self.generator_count();
        let mut out: Vec<LevelAction> = Vec::with_capacity(max_level);
        let mut prev = LevelAction {
            level: 0,
            arity: d,
            images: vec![Permutation::identity(1); k],
            inverses: vec![Permutation::identity(1); k],
        };
        for level in 1..=max_level {
            let sub = prev.degree();
            let images: Vec<Permutation> = (0..k)
                .map(|g| {
                    let mut img = vec![0; sub * d];
                    for x in 0..d {
                        let section = GroupElement(self.sections[g][x].clone());
                        let below = prev.evaluate(&section).expect("sections validated");
                        let top = self.root[g].apply(x);
                        for r in 0..sub {
                            img[x * sub + r] = top * sub + below.apply(r);
                        }
                    }
                    Permutation::from_images(img).expect("level image is a bijection")
                })
                .collect();
            let action = LevelAction {
                level,
                arity: d,
                inverses: images.iter().map(Permutation::inverse).collect(),
                images,
            };
            out.push(action.clone());
            prev = action;
        }
        out
    }

    pub fn level_action(&self, level: usize) -> Result<LevelAction> {
        if level == 0 {
            return Err(invalid("level actions start at level 1"));
        }
        Ok(self.level_actions(level).pop().expect("at least one level"))
    }

    fn require_contracting(&self) -> Result<()> {
        if !self.contracting {
            return Err(Error::Unsupported(
                "equality and orders need a recursion declared contracting".into(),
            ));
        }
        Ok(())
    }

    /// Whether `g` acts trivially on the whole tree.
    pub fn is_identity(&self, g: &GroupElement) -> Result<bool> {
        self.require_contracting()?;
        self.check_element(g)?;
        let start = g.word().clone();
        if let Some(&known) = self.identity_cache.read().unwrap().get(&start) {
            return Ok(known);
        }
        let mut visited: HashSet<Word> = HashSet::from([start.clone()]);
        let mut queue = VecDeque::from([start.clone()]);
        while let Some(w) = queue.pop_front() {
            match self.identity_cache.read().unwrap().get(&w) {
                Some(true) => continue,
                Some(false) => {
                    self.identity_cache.write().unwrap().insert(start, false);
                    return Ok(false);
                }
                None => {}
            }
            let (root, sections) = self.decompose(&w);
            if !root.is_identity() {
                self.identity_cache.write().unwrap().insert(start, false);
                return Ok(false);
            }
            for s in sections {
                if visited.insert(s.clone()) {
                    if visited.len() > self.budget {
                        return Err(Error::BudgetExceeded {
                            budget: self.budget,
                        });
                    }
                    queue.push_back(s);
                }
            }
        }
        let mut cache = self.identity_cache.write().unwrap();
        for w in visited {
            cache.insert(w, true);
        }
        Ok(true)
    }

    pub fn equal(&self, u: &GroupElement, v: &GroupElement) -> Result<bool> {
        if u == v {
            self.require_contracting()?;
            return Ok(true);
        }
        self.is_identity(&u.mul(&v.inverse()))
    }

    /// Edges of the order recursion: one per root cycle, to the product of
    /// sections around the cycle, weighted by the cycle length.
    fn order_edges(&self, w: &Word) -> Vec<(Word, usize)> {
        let (root, sections) = self.decompose(w);
        let mut seen = vec![false; self.arity];
        let mut edges = Vec::new();
        for start in 0..self.arity {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cycle.push(x);
                x = root.apply(x);
            }
            // w^c restricted at `start` is w|_{x_{c-1}} .. w|_{x_1} w|_{x_0}
            let product = Word::reduce(
                cycle
                    .iter()
                    .rev()
                    .flat_map(|&y| sections[y].letters().iter().copied()),
            );
            edges.push((product, cycle.len()));
        }
        edges
    }

    /// Exact order of `g`.
    ///
    /// `ord(w) = lcm over root cycles of length c of c * ord(section product)`.
    /// The least solution of this system over the reachable state graph is
    /// the true order; a state that returns to itself through a cycle of
    /// length > 1 has infinite order.
    pub fn element_order(&self, g: &GroupElement) -> Result<BigNatural> {
        self.require_contracting()?;
        self.check_element(g)?;
        let start = g.word().clone();
        if let Some(o) = self.order_cache.read().unwrap().get(&start) {
            return Ok(o.clone());
        }

        // Discover the reachable graph, stopping at states with cached orders.
        let cache = self.order_cache.read().unwrap().clone();
        let mut index: HashMap<Word, usize> = HashMap::from([(start.clone(), 0)]);
        let mut nodes = vec![start];
        let mut edges: Vec<Vec<(usize, usize)>> = Vec::new();
        let mut i = 0;
        while i < nodes.len() {
            let mut out = Vec::new();
            if !cache.contains_key(&nodes[i]) {
                for (child, c) in self.order_edges(&nodes[i]) {
                    let id = match index.get(&child) {
                        Some(&id) => id,
                        None => {
                            if nodes.len() >= self.budget {
                                return Err(Error::BudgetExceeded {
                                    budget: self.budget,
                                });
                            }
                            index.insert(child.clone(), nodes.len());
                            nodes.push(child);
                            nodes.len() - 1
                        }
                    };
                    out.push((id, c));
                }
            }
            edges.push(out);
            i += 1;
        }

        let comps = strongly_connected_components(&edges);
        let mut comp_of = vec![0; nodes.len()];
        for (ci, comp) in comps.iter().enumerate() {
            for &v in comp {
                comp_of[v] = ci;
            }
        }
        // Tarjan emits components sinks first, so children are resolved before parents.
        let mut comp_order: Vec<BigNatural> = Vec::with_capacity(comps.len());
        for (ci, comp) in comps.iter().enumerate() {
            let mut acc = BigNatural::one();
            for &v in comp {
                if let Some(o) = cache.get(&nodes[v]) {
                    acc = acc.lcm(o);
                    continue;
                }
                for &(t, c) in &edges[v] {
                    if comp_of[t] == ci {
                        if c > 1 {
                            return Err(Error::InfiniteOrder { multiplier: c });
                        }
                    } else {
                        acc = acc.lcm(&(BigNatural::from(c) * &comp_order[comp_of[t]]));
                    }
                }
            }
            comp_order.push(acc);
        }

        let mut cache = self.order_cache.write().unwrap();
        for (v, w) in nodes.into_iter().enumerate() {
            cache
                .entry(w)
                .or_insert_with(|| comp_order[comp_of[v]].clone());
        }
        Ok(comp_order[comp_of[0]].clone())
    }

    /// Elements of word length exactly `r` in `X ∪ X^-1`, for `r = 0..=radius`.
    ///
    /// Each sphere holds one representative word per group element.
    pub fn ball_spheres(
        &self,
        gens: &[GroupElement],
        radius: usize,
    ) -> Result<Vec<Vec<GroupElement>>> {
        self.require_contracting()?;
        for g in gens {
            self.check_element(g)?;
        }
        let steps: Vec<GroupElement> = gens.iter().flat_map(|g| [g.clone(), g.inverse()]).collect();
        // Deep level images fingerprint elements; equal() settles collisions.
        let level = fingerprint_level(self.arity);
        let action = self.level_action(level)?;
        let step_perms = steps
            .iter()
            .map(|s| action.evaluate(s))
            .collect::<Result<Vec<_>>>()?;

        let mut buckets: HashMap<Permutation, Vec<GroupElement>> = HashMap::new();
        let id = GroupElement::identity();
        let id_perm = Permutation::identity(action.degree());
        buckets.insert(id_perm.clone(), vec![id.clone()]);
        let mut spheres = vec![vec![id]];
        let mut frontier = vec![(GroupElement::identity(), id_perm)];
        for _ in 0..radius {
            let mut next_sphere = Vec::new();
            let mut next_frontier = Vec::new();
            for (u, up) in &frontier {
                for (s, sp) in steps.iter().zip(&step_perms) {
                    let cand = u.mul(s);
                    let cp = up.compose_unchecked(sp);
                    let bucket = buckets.entry(cp.clone()).or_default();
                    let mut known = false;
                    for rep in bucket.iter() {
                        if self.equal(rep, &cand)? {
                            known = true;
                            break;
                        }
                    }
                    if !known {
                        bucket.push(cand.clone());
                        next_sphere.push(cand.clone());
                        next_frontier.push((cand, cp));
                    }
                }
            }
            spheres.push(next_sphere);
            frontier = next_frontier;
        }
        Ok(spheres)
    }

    /// Representatives of all elements of word length at most `radius`.
    pub fn ball(&self, gens: &[GroupElement], radius: usize) -> Result<Vec<GroupElement>> {
        Ok(self
            .ball_spheres(gens, radius)?
            .into_iter()
            .flatten()
            .collect())
    }

    /// Largest element order in the ball of the given radius.
    pub fn torsion_growth(&self, gens: &[GroupElement], radius: usize) -> Result<BigNatural> {
        Ok(self
            .torsion_growth_table(gens, radius)?
            .pop()
            .unwrap_or_else(BigNatural::one))
    }

    /// `T(0), T(1), .., T(max_radius)`.
    pub fn torsion_growth_table(
        &self,
        gens: &[GroupElement],
        max_radius: usize,
    ) -> Result<Vec<BigNatural>> {
        let spheres = self.ball_spheres(gens, max_radius)?;
        let mut table = Vec::with_capacity(spheres.len());
        let mut best = BigNatural::one();
        for sphere in &spheres {
            for g in sphere {
                let o = self.element_order(g)?;
                if o > best {
                    best = o;
                }
            }
            table.push(best.clone());
        }
        Ok(table)
    }
}

fn fingerprint_level(arity: usize) -> usize {
    let mut level = 1;
    while arity.pow(level as u32 + 1) <= 1024 {
        level += 1;
    }
    level
}

/// Parses whitespace-separated generator names, each optionally followed by `^-1`.
pub fn parse_named_word(names: &[String], text: &str) -> Result<Word> {
    let mut letters = Vec::new();
    for token in text.split_whitespace() {
        if token == "1" {
            continue;
        }
        let (name, inverse) = match token.strip_suffix("^-1") {
            Some(n) => (n, true),
            None => (token, false),
        };
        let index = names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| invalid(format!("unknown generator {name:?}")))?;
        letters.push(Letter::Gen { index, inverse });
    }
    Ok(Word::reduce(letters))
}

/// Iterative Tarjan; components come out in reverse topological order.
fn strongly_connected_components(edges: &[Vec<(usize, usize)>]) -> Vec<Vec<usize>> {
    let n = edges.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comps = Vec::new();
    let mut counter = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(top) = call.last_mut() {
            let v = top.0;
            if top.1 < edges[v].len() {
                let w = edges[v][top.1].0;
                top.1 += 1;
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comps.push(comp);
                }
            }
        }
    }
    comps
}
