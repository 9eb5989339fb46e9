//! Brute-force oracles that share no code with the algorithms they check.

use std::collections::{BTreeSet, VecDeque};

use num_bigint::BigUint;
use telescope_core::perm::Permutation;

/// All elements of `⟨gens⟩` as image vectors, by breadth-first multiplication.
pub fn closure(gens: &[Permutation]) -> BTreeSet<Vec<usize>> {
    let id = Permutation::identity(gens[0].degree());
    let mut seen = BTreeSet::from([id.images().to_vec()]);
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = g.compose(&x).unwrap();
            if seen.insert(y.images().to_vec()) {
                queue.push_back(y);
            }
        }
    }
    seen
}

/// Every permutation of `0..n` as an image vector.
pub fn all_perms(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for k in 0..n {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..=k).map(move |pos| {
                    let mut q = p.clone();
                    q.insert(pos, k);
                    q
                })
            })
            .collect();
    }
    out
}

/// Grigorchuk generator `a`, `b`, `c` or `d` acting on a binary string.
pub fn grigorchuk_act(g: u8, x: &[u8]) -> Vec<u8> {
    let Some((&head, tail)) = x.split_first() else {
        return Vec::new();
    };
    let (first, rest) = match (g, head) {
        (b'a', h) => (1 - h, tail.to_vec()),
        (b'b', 0) => (0, grigorchuk_act(b'a', tail)),
        (b'b', _) => (1, grigorchuk_act(b'c', tail)),
        (b'c', 0) => (0, grigorchuk_act(b'a', tail)),
        (b'c', _) => (1, grigorchuk_act(b'd', tail)),
        (b'd', 0) => (0, tail.to_vec()),
        (b'd', _) => (1, grigorchuk_act(b'b', tail)),
        _ => panic!("unknown generator {}", g as char),
    };
    let mut out = vec![first];
    out.extend(rest);
    out
}

/// Level image of one generator; vertex index reads the string as binary, first letter high.
pub fn grigorchuk_generator(g: u8, level: usize) -> Permutation {
    let images = (0..1usize << level)
        .map(|v| {
            let bits: Vec<u8> = (0..level)
                .map(|j| ((v >> (level - 1 - j)) & 1) as u8)
                .collect();
            grigorchuk_act(g, &bits)
                .iter()
                .fold(0usize, |acc, &b| 2 * acc + b as usize)
        })
        .collect();
    Permutation::from_images(images).unwrap()
}

/// Level image of a word over `a, b, c, d`, rightmost letter acting first.
pub fn grigorchuk_image(letters: &[u8], level: usize) -> Permutation {
    letters
        .iter()
        .fold(Permutation::identity(1 << level), |acc, &g| {
            acc.compose(&grigorchuk_generator(g, level)).unwrap()
        })
}

/// Largest order of a level image over the ball of each radius `0..=radius`.
pub fn grigorchuk_torsion_growth(radius: usize, level: usize) -> Vec<BigUint> {
    let gens: Vec<Permutation> = b"abcd"
        .iter()
        .map(|&g| grigorchuk_generator(g, level))
        .collect();
    let id = Permutation::identity(1 << level);
    let mut seen = BTreeSet::from([id.images().to_vec()]);
    let mut frontier = vec![id];
    let mut best = BigUint::from(1u32);
    let mut table = vec![best.clone()];
    for _ in 0..radius {
        let mut next = Vec::new();
        for x in &frontier {
            for g in &gens {
                let y = x.compose(g).unwrap();
                if seen.insert(y.images().to_vec()) {
                    best = best.max(y.order());
                    next.push(y);
                }
            }
        }
        frontier = next;
        table.push(best.clone());
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_perms_counts() {
        assert_eq!(all_perms(0).len(), 1);
        assert_eq!(all_perms(4).len(), 24);
        assert_eq!(all_perms(4).into_iter().collect::<BTreeSet<_>>().len(), 24);
    }

    #[test]
    fn generators_are_involutions() {
        for g in *b"abcd" {
            assert!(grigorchuk_image(&[g, g], 5).is_identity());
        }
        assert!(grigorchuk_image(b"bcd", 6).is_identity());
    }

    #[test]
    fn level_one_only_sees_a() {
        assert!(!grigorchuk_generator(b'a', 1).is_identity());
        for g in *b"bcd" {
            assert!(grigorchuk_generator(g, 1).is_identity());
        }
    }
}
