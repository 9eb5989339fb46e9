//! Reduced words over a finite set of generator symbols plus the involution `t`.
//!
//! Words are stored left to right as written and act right to left: the
//! terminal letters act first. Only formal cancellation is applied
//! (`x x^-1`, and `t t` since `t` is normalized as its own inverse).

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::perm::Permutation;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Letter {
    /// Generator `index` (0-based; printed 1-based as `g<index+1>`).
    Gen {
        index: usize,
        inverse: bool,
    },
    Tau,
}

impl Letter {
    pub fn gen(index: usize) -> Self {
        Letter::Gen {
            index,
            inverse: false,
        }
    }

    pub fn gen_inv(index: usize) -> Self {
        Letter::Gen {
            index,
            inverse: true,
        }
    }

    pub fn inverse(self) -> Self {
        match self {
            Letter::Gen { index, inverse } => Letter::Gen {
                index,
                inverse: !inverse,
            },
            Letter::Tau => Letter::Tau,
        }
    }

    pub fn is_tau(self) -> bool {
        self == Letter::Tau
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Letter::Gen {
                index,
                inverse: false,
            } => write!(f, "g{}", index + 1),
            Letter::Gen {
                index,
                inverse: true,
            } => write!(f, "g{}^-1", index + 1),
            Letter::Tau => f.write_str("t"),
        }
    }
}

impl FromStr for Letter {
    type Err = Error;

    fn from_str(token: &str) -> Result<Self> {
        if token == "t" {
            return Ok(Letter::Tau);
        }
        let bad = || invalid(format!("bad word token {token:?}"));
        let body = token.strip_prefix('g').ok_or_else(bad)?;
        let (digits, inverse) = match body.strip_suffix("^-1") {
            Some(d) => (d, true),
            None => (body, false),
        };
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let k: usize = digits.parse().map_err(|_| bad())?;
        if k == 0 {
            return Err(bad());
        }
        Ok(Letter::Gen {
            index: k - 1,
            inverse,
        })
    }
}

/// A freely reduced word.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn empty() -> Self {
        Word::default()
    }

    /// Free reduction of an arbitrary letter sequence.
    pub fn reduce(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word { letters: out }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// The last `k` letters.
    pub fn terminal_subword(&self, k: usize) -> Result<Word> {
        if k > self.len() {
            return Err(invalid(format!(
                "terminal subword of length {k} requested from a word of length {}",
                self.len()
            )));
        }
        Ok(Word {
            letters: self.letters[self.len() - k..].to_vec(),
        })
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    /// Reduced product `self · other`.
    pub fn concat(&self, other: &Word) -> Word {
        Word::reduce(self.letters.iter().chain(other.letters.iter()).copied())
    }

    pub fn pow(&self, e: usize) -> Word {
        Word::reduce(std::iter::repeat_n(self.letters.iter().copied(), e).flatten())
    }

    /// Substitutes a word for each generator symbol; `t` stays `t`.
    pub fn substitute(&self, images: &[Word]) -> Result<Word> {
        let mut letters = Vec::new();
        for &l in &self.letters {
            match l {
                Letter::Tau => letters.push(Letter::Tau),
                Letter::Gen { index, inverse } => {
                    let w = images
                        .get(index)
                        .ok_or_else(|| invalid(format!("no image for generator g{}", index + 1)))?;
                    if inverse {
                        letters.extend(w.inverse().letters);
                    } else {
                        letters.extend_from_slice(&w.letters);
                    }
                }
            }
        }
        Ok(Word::reduce(letters))
    }

    pub fn max_generator(&self) -> Option<usize> {
        self.letters
            .iter()
            .filter_map(|l| match l {
                Letter::Gen { index, .. } => Some(*index),
                Letter::Tau => None,
            })
            .max()
    }

    pub fn contains_tau(&self) -> bool {
        self.letters.iter().any(|l| l.is_tau())
    }
}

impl From<Letter> for Word {
    fn from(l: Letter) -> Self {
        Word { letters: vec![l] }
    }
}

impl FromStr for Word {
    type Err = Error;

    /// Whitespace-separated tokens `g<k>`, `g<k>^-1` and `t`; `1` alone is the empty word.
    fn from_str(text: &str) -> Result<Self> {
        if text.trim() == "1" {
            return Ok(Word::empty());
        }
        let letters = text
            .split_whitespace()
            .map(Letter::from_str)
            .collect::<Result<Vec<_>>>()?;
        Ok(Word::reduce(letters))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("1");
        }
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

/// Permutations assigned to generator symbols and to `t`, all of one degree.
#[derive(Clone, Debug)]
pub struct Assignment {
    degree: usize,
    gens: Vec<Permutation>,
    gens_inv: Vec<Permutation>,
    tau: Option<Permutation>,
}

impl Assignment {
    pub fn new(gens: Vec<Permutation>, tau: Option<Permutation>) -> Result<Self> {
        let degree = gens
            .first()
            .or(tau.as_ref())
            .ok_or_else(|| invalid("empty letter assignment"))?
            .degree();
        for p in gens.iter().chain(tau.iter()) {
            if p.degree() != degree {
                return Err(Error::DegreeMismatch {
                    left: degree,
                    right: p.degree(),
                });
            }
        }
        // `t` is its own inverse in the word calculus
        if let Some(t) = &tau {
            if !t.compose_unchecked(t).is_identity() {
                return Err(invalid(
                    "the permutation assigned to t must be an involution",
                ));
            }
        }
        Ok(Assignment {
            degree,
            gens_inv: gens.iter().map(Permutation::inverse).collect(),
            gens,
            tau,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn letter(&self, l: Letter) -> Result<&Permutation> {
        let found = match l {
            Letter::Tau => self.tau.as_ref(),
            Letter::Gen {
                index,
                inverse: false,
            } => self.gens.get(index),
            Letter::Gen {
                index,
                inverse: true,
            } => self.gens_inv.get(index),
        };
        found.ok_or_else(|| invalid(format!("letter {l} has no assigned permutation")))
    }

    /// The permutation a word represents (rightmost letter acts first).
    pub fn evaluate(&self, w: &Word) -> Result<Permutation> {
        let mut acc = Permutation::identity(self.degree);
        for &l in w.letters() {
            acc = acc.compose_unchecked(self.letter(l)?);
        }
        Ok(acc)
    }

    /// Image of a single point, folding from the terminal letter.
    pub fn act(&self, w: &Word, point: usize) -> Result<usize> {
        self.check_point(point)?;
        let mut x = point;
        for &l in w.letters().iter().rev() {
            x = self.letter(l)?.apply(x);
        }
        Ok(x)
    }

    fn check_point(&self, point: usize) -> Result<()> {
        if point >= self.degree {
            return Err(Error::PointOutOfRange {
                point,
                degree: self.degree,
            });
        }
        Ok(())
    }
}

/// Images of a start point under the terminal subwords of lengths `1..=len`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceSequence {
    pub points: Vec<usize>,
}

impl TraceSequence {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.points.contains(&x)
    }

    /// Whether `x` occurs among the first `len` entries.
    pub fn prefix_contains(&self, len: usize, x: usize) -> bool {
        self.points[..len.min(self.points.len())].contains(&x)
    }

    pub fn last(&self) -> Option<usize> {
        self.points.last().copied()
    }
}

pub fn trace(w: &Word, start: usize, assign: &Assignment) -> Result<TraceSequence> {
    assign.check_point(start)?;
    let mut x = start;
    let mut points = Vec::with_capacity(w.len());
    for &l in w.letters().iter().rev() {
        x = assign.letter(l)?.apply(x);
        points.push(x);
    }
    Ok(TraceSequence { points })
}

fn check_family_args(k: usize, i: usize) -> Result<()> {
    if k == 0 {
        return Err(invalid("word family needs k >= 1"));
    }
    if i >= k {
        return Err(invalid(format!("index i = {i} must be below k = {k}")));
    }
    Ok(())
}

/// `(g1 .. gk)^n g1 .. gi`.
pub fn build_v(k: usize, n: usize, i: usize) -> Result<Word> {
    check_family_args(k, i)?;
    let letters = (0..n).flat_map(|_| 0..k).chain(0..i).map(Letter::gen);
    Ok(Word::reduce(letters))
}

/// `(t g1 .. t gk)^n t g1 .. t gi`.
pub fn build_w(k: usize, n: usize, i: usize) -> Result<Word> {
    check_family_args(k, i)?;
    let letters = (0..n)
        .flat_map(|_| 0..k)
        .chain(0..i)
        .flat_map(|j| [Letter::Tau, Letter::gen(j)]);
    Ok(Word::reduce(letters))
}
