//! Exact permutation groups.
//!
//! Permutations act on the left: `p.compose(&q)` is the map `x -> p(q(x))`,
//! so in a product the rightmost factor acts first. Stabilizer chains use
//! Knuth's incremental Schreier-Sims procedure with the points `0, 1, ..`
//! as base in ascending order, which makes every derived quantity
//! (base, transversals, order) deterministic.

use std::collections::VecDeque;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;

use crate::error::{invalid, Error, Result};

/// Arbitrary-precision natural number used for group and element orders.
pub type BigNatural = BigUint;

/// `n!` as an exact natural number.
pub fn factorial(n: usize) -> BigNatural {
    (2..=n).fold(BigNatural::one(), |acc, k| acc * BigNatural::from(k))
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation {
            images: (0..degree).collect(),
        }
    }

    /// Builds a permutation from its image list, checking that it is a bijection.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n {
                return Err(Error::PointOutOfRange {
                    point: x,
                    degree: n,
                });
            }
            if std::mem::replace(&mut seen[x], true) {
                return Err(invalid(format!("image {x} appears twice")));
            }
        }
        Ok(Permutation { images })
    }

    /// Builds a permutation of `degree` points from disjoint cycles.
    pub fn from_cycles(degree: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        let mut images: Vec<usize> = (0..degree).collect();
        let mut touched = vec![false; degree];
        for cycle in cycles {
            for (i, &x) in cycle.iter().enumerate() {
                if x >= degree {
                    return Err(Error::PointOutOfRange { point: x, degree });
                }
                if std::mem::replace(&mut touched[x], true) {
                    return Err(invalid(format!("point {x} appears in more than one cycle")));
                }
                images[x] = cycle[(i + 1) % cycle.len()];
            }
        }
        Ok(Permutation { images })
    }

    pub fn transposition(degree: usize, a: usize, b: usize) -> Result<Self> {
        if a == b {
            return Err(invalid("transposition needs two distinct points"));
        }
        Self::from_cycles(degree, &[vec![a, b]])
    }

    /// Parses cycle notation such as `(0 1)(2 3 4)`; `()` or an empty string is the identity.
    pub fn parse_cycles(degree: usize, text: &str) -> Result<Self> {
        let mut cycles = Vec::new();
        let mut rest = text.trim();
        while !rest.is_empty() {
            let inner_start = rest
                .strip_prefix('(')
                .ok_or_else(|| invalid(format!("expected '(' in cycle notation {text:?}")))?;
            let close = inner_start
                .find(')')
                .ok_or_else(|| invalid(format!("unclosed cycle in {text:?}")))?;
            let points = inner_start[..close]
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse::<usize>()
                        .map_err(|_| invalid(format!("bad point {s:?} in cycle notation")))
                })
                .collect::<Result<Vec<_>>>()?;
            if !points.is_empty() {
                cycles.push(points);
            }
            rest = inner_start[close + 1..].trim_start();
        }
        Self::from_cycles(degree, &cycles)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.images[x]
    }

    /// `self ∘ other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.degree() != other.degree() {
            return Err(Error::DegreeMismatch {
                left: self.degree(),
                right: other.degree(),
            });
        }
        Ok(self.compose_unchecked(other))
    }

    pub(crate) fn compose_unchecked(&self, other: &Permutation) -> Permutation {
        Permutation {
            images: other.images.iter().map(|&x| self.images[x]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.degree()];
        for (x, &y) in self.images.iter().enumerate() {
            images[y] = x;
        }
        Permutation { images }
    }

    pub fn pow(&self, mut e: u64) -> Permutation {
        let mut base = self.clone();
        let mut acc = Permutation::identity(self.degree());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose_unchecked(&base);
            }
            base = base.compose_unchecked(&base);
            e >>= 1;
        }
        acc
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x)
    }

    pub fn moved_points(&self) -> impl Iterator<Item = usize> + '_ {
        self.images
            .iter()
            .enumerate()
            .filter(|(i, x)| i != *x)
            .map(|(i, _)| i)
    }

    /// Disjoint cycles of length at least 2, each starting at its smallest point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree()];
        let mut out = Vec::new();
        for start in 0..self.degree() {
            if seen[start] || self.images[start] == start {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cycle.push(x);
                x = self.images[x];
            }
            out.push(cycle);
        }
        out
    }

    /// Lengths of all cycles, fixed points included, in order of smallest point.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut seen = vec![false; self.degree()];
        let mut out = Vec::new();
        for start in 0..self.degree() {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                len += 1;
                x = self.images[x];
            }
            out.push(len);
        }
        out
    }

    /// Order of the permutation: lcm of its cycle lengths.
    pub fn order(&self) -> BigNatural {
        self.cycle_type()
            .into_iter()
            .fold(BigNatural::one(), |acc, len| {
                acc.lcm(&BigNatural::from(len))
            })
    }

    /// `+1` for even, `-1` for odd permutations.
    pub fn sign(&self) -> i8 {
        let transpositions: usize = self.cycle_type().iter().map(|len| len - 1).sum();
        if transpositions.is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// Same permutation on `degree >= self.degree()` points, fixing the new ones.
    pub fn extend_to(&self, degree: usize) -> Permutation {
        debug_assert!(degree >= self.degree());
        let mut images = self.images.clone();
        images.extend(self.degree()..degree);
        Permutation { images }
    }

    /// Restriction to the block `[offset, offset + len)`, which must be invariant.
    pub fn restrict(&self, offset: usize, len: usize) -> Result<Permutation> {
        if offset + len > self.degree() {
            return Err(Error::PointOutOfRange {
                point: offset + len,
                degree: self.degree(),
            });
        }
        let images = (offset..offset + len)
            .map(|x| {
                let y = self.images[x];
                if y < offset || y >= offset + len {
                    Err(invalid(format!(
                        "block [{offset}, {}) is not invariant",
                        offset + len
                    )))
                } else {
                    Ok(y - offset)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Permutation { images })
    }

    /// Disjoint union of permutations acting on consecutive blocks.
    pub fn direct_sum(parts: &[Permutation]) -> Permutation {
        let mut images = Vec::with_capacity(parts.iter().map(Permutation::degree).sum());
        let mut offset = 0;
        for p in parts {
            images.extend(p.images.iter().map(|&x| x + offset));
            offset += p.degree();
        }
        Permutation { images }
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return f.write_str("()");
        }
        for cycle in cycles {
            f.write_str("(")?;
            for (i, x) in cycle.iter().enumerate() {
                if i > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{x}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}[{}]", self.degree())
    }
}

/// Orbit of `point` under the group generated by `gens`, in breadth-first order.
pub fn orbit(gens: &[Permutation], point: usize) -> Result<Vec<usize>> {
    let degree = gens.first().map_or(0, Permutation::degree);
    if let Some(bad) = gens.iter().find(|g| g.degree() != degree) {
        return Err(Error::DegreeMismatch {
            left: degree,
            right: bad.degree(),
        });
    }
    if gens.is_empty() {
        return Ok(vec![point]);
    }
    if point >= degree {
        return Err(Error::PointOutOfRange { point, degree });
    }
    let mut seen = vec![false; degree];
    seen[point] = true;
    let mut out = vec![point];
    let mut queue = VecDeque::from([point]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = g.apply(x);
            if !seen[y] {
                seen[y] = true;
                out.push(y);
                queue.push_back(y);
            }
        }
    }
    Ok(out)
}

/// Partition of the domain into orbits, each listed from its smallest point.
pub fn orbits(gens: &[Permutation], degree: usize) -> Result<Vec<Vec<usize>>> {
    let mut seen = vec![false; degree];
    let mut out = Vec::new();
    for x in 0..degree {
        if seen[x] {
            continue;
        }
        let orb = orbit(gens, x)?;
        for &y in &orb {
            seen[y] = true;
        }
        out.push(orb);
    }
    Ok(out)
}

#[derive(Clone, Debug)]
struct Level {
    gens: Vec<Permutation>,
    reps: Vec<Option<Permutation>>,
    reps_inv: Vec<Option<Permutation>>,
    orbit: Vec<usize>,
}

impl Level {
    fn new(degree: usize, point: usize) -> Self {
        let mut reps = vec![None; degree];
        reps[point] = Some(Permutation::identity(degree));
        Level {
            gens: Vec::new(),
            reps_inv: reps.clone(),
            reps,
            orbit: vec![point],
        }
    }
}

/// Stabilizer chain over the full base `0, 1, .., degree - 1`.
///
/// Level `k` holds a transversal of the stabilizer of `0..=k` in the
/// stabilizer of `0..k`. Levels with a trivial basic orbit are kept so
/// that sifting is uniform, but they are omitted from [`StabChain::base`].
#[derive(Clone, Debug)]
pub struct StabChain {
    degree: usize,
    levels: Vec<Level>,
}

impl StabChain {
    /// Chain of the trivial group.
    pub fn new(degree: usize) -> Self {
        StabChain {
            degree,
            levels: (0..degree).map(|k| Level::new(degree, k)).collect(),
        }
    }

    pub fn from_generators(degree: usize, gens: &[Permutation]) -> Result<Self> {
        let mut chain = StabChain::new(degree);
        for g in gens {
            chain.insert(g)?;
        }
        Ok(chain)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Adds `g` to the group; returns `false` if it was already a member.
    pub fn insert(&mut self, g: &Permutation) -> Result<bool> {
        self.check_degree(g)?;
        Ok(self.add(0, g.clone()))
    }

    pub fn contains(&self, p: &Permutation) -> Result<bool> {
        self.check_degree(p)?;
        Ok(self.sift_from(0, p).is_none())
    }

    pub fn order(&self) -> BigNatural {
        self.levels.iter().fold(BigNatural::one(), |acc, l| {
            acc * BigNatural::from(l.orbit.len())
        })
    }

    /// Base points with nontrivial basic orbits, ascending.
    pub fn base(&self) -> Vec<usize> {
        (0..self.degree)
            .filter(|&k| self.levels[k].orbit.len() > 1)
            .collect()
    }

    pub fn basic_orbit_lengths(&self) -> Vec<usize> {
        self.base()
            .into_iter()
            .map(|k| self.levels[k].orbit.len())
            .collect()
    }

    pub fn strong_generators(&self) -> Vec<Permutation> {
        let mut out: Vec<Permutation> = Vec::new();
        for level in &self.levels {
            for g in &level.gens {
                if !out.contains(g) {
                    out.push(g.clone());
                }
            }
        }
        out
    }

    fn check_degree(&self, p: &Permutation) -> Result<()> {
        if p.degree() != self.degree {
            return Err(Error::DegreeMismatch {
                left: self.degree,
                right: p.degree(),
            });
        }
        Ok(())
    }

    /// Sifts `g` through levels `k..`; `None` means it reduced to the identity.
    fn sift_from(&self, k: usize, g: &Permutation) -> Option<Permutation> {
        let mut h = g.clone();
        for j in k..self.degree {
            let b = h.apply(j);
            if b == j {
                continue;
            }
            match &self.levels[j].reps_inv[b] {
                Some(inv) => h = inv.compose_unchecked(&h),
                None => return Some(h),
            }
        }
        None
    }

    fn add(&mut self, k: usize, g: Permutation) -> bool {
        if k >= self.degree || self.sift_from(k, &g).is_none() {
            return false;
        }
        self.extend(k, g);
        true
    }

    fn extend(&mut self, k: usize, g: Permutation) {
        self.levels[k].gens.push(g.clone());
        let known = self.levels[k].orbit.len();
        for idx in 0..known {
            let pt = self.levels[k].orbit[idx];
            let rep = self.levels[k].reps[pt]
                .clone()
                .expect("orbit point has a rep");
            self.close(k, g.compose_unchecked(&rep));
        }
    }

    fn close(&mut self, k: usize, pi: Permutation) {
        let mut stack = vec![pi];
        while let Some(pi) = stack.pop() {
            let j = pi.apply(k);
            if let Some(inv) = &self.levels[k].reps_inv[j] {
                let h = inv.compose_unchecked(&pi);
                self.add(k + 1, h);
            } else {
                let level = &mut self.levels[k];
                level.reps_inv[j] = Some(pi.inverse());
                level.orbit.push(j);
                for tau in &level.gens {
                    stack.push(tau.compose_unchecked(&pi));
                }
                level.reps[j] = Some(pi);
            }
        }
    }
}

/// A permutation group given by generators, with a lazily built stabilizer chain.
#[derive(Debug)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Permutation>,
    chain: OnceLock<StabChain>,
}

impl Clone for PermGroup {
    fn clone(&self) -> Self {
        let chain = OnceLock::new();
        if let Some(c) = self.chain.get() {
            let _ = chain.set(c.clone());
        }
        PermGroup {
            degree: self.degree,
            generators: self.generators.clone(),
            chain,
        }
    }
}

impl PermGroup {
    pub fn new(generators: Vec<Permutation>) -> Result<Self> {
        let degree = generators
            .first()
            .ok_or_else(|| invalid("a permutation group needs at least one generator"))?
            .degree();
        if let Some(bad) = generators.iter().find(|g| g.degree() != degree) {
            return Err(Error::DegreeMismatch {
                left: degree,
                right: bad.degree(),
            });
        }
        Ok(PermGroup {
            degree,
            generators,
            chain: OnceLock::new(),
        })
    }

    pub fn trivial(degree: usize) -> Self {
        PermGroup {
            degree,
            generators: vec![Permutation::identity(degree)],
            chain: OnceLock::new(),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn chain(&self) -> &StabChain {
        self.chain.get_or_init(|| {
            StabChain::from_generators(self.degree, &self.generators)
                .expect("generator degrees checked at construction")
        })
    }

    /// Forces the stabilizer chain; repeated calls are no-ops.
    pub fn build_chain(self) -> Self {
        self.chain();
        self
    }

    pub fn order(&self) -> BigNatural {
        self.chain().order()
    }

    pub fn contains(&self, p: &Permutation) -> Result<bool> {
        self.chain().contains(p)
    }

    pub fn orbit(&self, point: usize) -> Result<Vec<usize>> {
        orbit(&self.generators, point)
    }

    pub fn is_transitive(&self) -> bool {
        self.degree == 0 || orbit(&self.generators, 0).is_ok_and(|o| o.len() == self.degree)
    }

    pub fn is_full_symmetric(&self) -> bool {
        self.order() == factorial(self.degree)
    }

    pub fn is_full_alternating(&self) -> bool {
        if self.degree <= 2 {
            return self.order().is_one();
        }
        self.generators.iter().all(|g| g.sign() == 1)
            && self.order() == factorial(self.degree) / BigNatural::from(2u32)
    }
}
