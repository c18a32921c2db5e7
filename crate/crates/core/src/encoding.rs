//! Letters, words and permutations, the prefix-counter languages `L(k,∞)`,
//! the μ-ordering and classical pattern avoidance.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One move of the two-stack machine, or the end marker used as PDA input.
///
/// `Rho` moves the next input token onto the first (bounded) stack, `Lambda`
/// moves the top of the first stack onto the second stack and `Mu` pops the
/// second stack to the output.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    Rho,
    Lambda,
    Mu,
    Dollar,
}

impl Letter {
    /// The three generating moves, in the canonical order ρ, λ, μ.
    pub const MOVES: [Letter; 3] = [Letter::Rho, Letter::Lambda, Letter::Mu];

    pub fn ascii(self) -> char {
        match self {
            Letter::Rho => 'r',
            Letter::Lambda => 'l',
            Letter::Mu => 'm',
            Letter::Dollar => '$',
        }
    }

    pub fn unicode(self) -> char {
        match self {
            Letter::Rho => 'ρ',
            Letter::Lambda => 'λ',
            Letter::Mu => 'μ',
            Letter::Dollar => '$',
        }
    }

    pub fn from_char(c: char) -> Option<Letter> {
        match c {
            'r' | 'ρ' => Some(Letter::Rho),
            'l' | 'λ' => Some(Letter::Lambda),
            'm' | 'μ' => Some(Letter::Mu),
            '$' => Some(Letter::Dollar),
            _ => None,
        }
    }
}

/// Serialized as its ASCII character.
impl Serialize for Letter {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut buf = [0u8; 4];
        s.serialize_str(self.ascii().encode_utf8(&mut buf))
    }
}

impl<'de> Deserialize<'de> for Letter {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        let mut chars = text.chars();
        match (chars.next().and_then(Letter::from_char), chars.next()) {
            (Some(l), None) => Ok(l),
            _ => Err(serde::de::Error::custom(format!("unknown letter {text:?}"))),
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.ascii())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseWordError {
    #[error("InvalidCharacter({0})")]
    InvalidCharacter(usize),
}

/// A finite word over ρ, λ, μ, optionally terminated by a single `$`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn new(letters: Vec<Letter>) -> Word {
        Word(letters)
    }

    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains_dollar(&self) -> bool {
        self.0.contains(&Letter::Dollar)
    }

    /// Appends the end marker, producing a PDA input word.
    pub fn with_dollar(&self) -> Word {
        let mut letters = self.0.clone();
        letters.push(Letter::Dollar);
        Word(letters)
    }

    /// Drops a trailing `$` if present.
    pub fn without_dollar(&self) -> Word {
        match self.0.split_last() {
            Some((Letter::Dollar, rest)) => Word(rest.to_vec()),
            _ => self.clone(),
        }
    }

    pub fn to_unicode(&self) -> String {
        self.0.iter().map(|l| l.unicode()).collect()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Letter> {
        self.0.iter()
    }
}

impl From<Vec<Letter>> for Word {
    fn from(letters: Vec<Letter>) -> Self {
        Word(letters)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{}", l.ascii())?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = ParseWordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_word(s)
    }
}

/// Parses `r`/`l`/`m` (or `ρ`/`λ`/`μ`) with an optional trailing `$`.
/// Positions in errors count characters, not bytes.
pub fn parse_word(text: &str) -> Result<Word, ParseWordError> {
    let count = text.chars().count();
    let mut letters = Vec::with_capacity(count);
    for (pos, c) in text.chars().enumerate() {
        match Letter::from_char(c) {
            Some(Letter::Dollar) if pos + 1 != count => {
                return Err(ParseWordError::InvalidCharacter(pos))
            }
            Some(l) => letters.push(l),
            None => return Err(ParseWordError::InvalidCharacter(pos)),
        }
    }
    Ok(Word(letters))
}

/// `D_{a,b}(w)`: occurrences of `a` minus occurrences of `b`.
pub fn d_count(w: &[Letter], a: Letter, b: Letter) -> i64 {
    w.iter()
        .fold(0, |acc, &l| acc + i64::from(l == a) - i64::from(l == b))
}

/// Capacity of the first stack.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Depth {
    Bounded(usize),
    Unbounded,
}

impl Depth {
    fn admits(self, height: i64) -> bool {
        match self {
            Depth::Bounded(k) => height <= k as i64,
            Depth::Unbounded => true,
        }
    }
}

impl From<usize> for Depth {
    fn from(k: usize) -> Self {
        Depth::Bounded(k)
    }
}

/// Running prefix counters `(D_{ρ,λ}, D_{λ,μ})`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Counters {
    pub rho_lambda: i64,
    pub lambda_mu: i64,
}

impl Counters {
    pub fn step(mut self, l: Letter) -> Counters {
        match l {
            Letter::Rho => self.rho_lambda += 1,
            Letter::Lambda => {
                self.rho_lambda -= 1;
                self.lambda_mu += 1;
            }
            Letter::Mu => self.lambda_mu -= 1,
            Letter::Dollar => {}
        }
        self
    }

    /// Prefix condition of `L(k,∞)`.
    pub fn admissible(self, depth: Depth) -> bool {
        self.rho_lambda >= 0 && depth.admits(self.rho_lambda) && self.lambda_mu >= 0
    }

    pub fn is_zero(self) -> bool {
        self.rho_lambda == 0 && self.lambda_mu == 0
    }
}

/// Membership in `L(k,∞)`: every prefix keeps `D_{ρ,λ}` in `[0,k]` and
/// `D_{λ,μ}` nonnegative, and both are zero on the whole word.
pub fn in_lk(w: &[Letter], depth: Depth) -> bool {
    let mut c = Counters::default();
    for &l in w {
        if l == Letter::Dollar {
            return false;
        }
        c = c.step(l);
        if !c.admissible(depth) {
            return false;
        }
    }
    c.is_zero()
}

/// Strict μ-order: equal length, distinct strings, and the image under
/// ρ,λ ↦ ν, μ ↦ μ is lexicographically smaller with μ < ν.
pub fn mu_less(u: &[Letter], v: &[Letter]) -> bool {
    if u.len() != v.len() || u == v {
        return false;
    }
    let theta = |l: &Letter| u8::from(*l != Letter::Mu);
    u.iter().map(theta).cmp(v.iter().map(theta)) == Ordering::Less
}

/// Enumerates every word of `L(k,∞)` of the given length, in lexicographic
/// order ρ < λ < μ. Lengths not divisible by three give nothing.
pub fn words_in_lk(len: usize, depth: Depth) -> Vec<Word> {
    let mut out = Vec::new();
    if !len.is_multiple_of(3) {
        return out;
    }
    let n = (len / 3) as i64;
    let mut buf = Vec::with_capacity(len);
    extend_lk(
        &mut buf,
        Counters::default(),
        [0; 3],
        n,
        len,
        depth,
        &mut |w| out.push(Word(w.to_vec())),
    );
    out
}

/// Visits every word of `L(k,∞)` of the given length without collecting them.
pub fn for_each_in_lk(len: usize, depth: Depth, mut visit: impl FnMut(&[Letter])) {
    if !len.is_multiple_of(3) {
        return;
    }
    let n = (len / 3) as i64;
    let mut buf = Vec::with_capacity(len);
    extend_lk(
        &mut buf,
        Counters::default(),
        [0; 3],
        n,
        len,
        depth,
        &mut visit,
    );
}

fn extend_lk(
    buf: &mut Vec<Letter>,
    c: Counters,
    used: [i64; 3],
    n: i64,
    len: usize,
    depth: Depth,
    visit: &mut dyn FnMut(&[Letter]),
) {
    if buf.len() == len {
        if c.is_zero() {
            visit(buf);
        }
        return;
    }
    for (idx, &l) in Letter::MOVES.iter().enumerate() {
        if used[idx] == n {
            continue;
        }
        let next = c.step(l);
        if !next.admissible(depth) {
            continue;
        }
        let mut used = used;
        used[idx] += 1;
        buf.push(l);
        extend_lk(buf, next, used, n, len, depth, visit);
        buf.pop();
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermutationError {
    #[error("not a permutation of 1..{0}")]
    NotAPermutation(usize),
    #[error("unparsable entry {0:?}")]
    BadEntry(String),
}

/// A permutation of `1..=n` in one-line notation.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(entries: Vec<usize>) -> Result<Permutation, PermutationError> {
        let n = entries.len();
        let mut seen = vec![false; n + 1];
        for &e in &entries {
            if e == 0 || e > n || seen[e] {
                return Err(PermutationError::NotAPermutation(n));
            }
            seen[e] = true;
        }
        Ok(Permutation(entries))
    }

    /// Callers guarantee `entries` is a permutation of `1..=n`.
    pub(crate) fn from_vec_unchecked(entries: Vec<usize>) -> Permutation {
        debug_assert!(Permutation::new(entries.clone()).is_ok());
        Permutation(entries)
    }

    pub fn identity(n: usize) -> Permutation {
        Permutation((1..=n).collect())
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// All permutations of `1..=n` in lexicographic order.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(n);
        let mut used = vec![false; n + 1];
        fn go(n: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Permutation>) {
            if cur.len() == n {
                out.push(Permutation(cur.clone()));
                return;
            }
            for v in 1..=n {
                if !used[v] {
                    used[v] = true;
                    cur.push(v);
                    go(n, cur, used, out);
                    cur.pop();
                    used[v] = false;
                }
            }
        }
        go(n, &mut cur, &mut used, &mut out);
        out
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() <= 9 {
            for e in &self.0 {
                write!(f, "{e}")?;
            }
        } else {
            for (i, e) in self.0.iter().enumerate() {
                if i > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{e}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for Permutation {
    type Err = PermutationError;

    /// Accepts a digit string (`25413`) or space-separated integers.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let entries: Result<Vec<usize>, _> = if s.contains(char::is_whitespace) {
            s.split_whitespace()
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|_| PermutationError::BadEntry(t.into()))
                })
                .collect()
        } else {
            s.chars()
                .map(|c| {
                    c.to_digit(10)
                        .map(|d| d as usize)
                        .ok_or_else(|| PermutationError::BadEntry(c.to_string()))
                })
                .collect()
        };
        Permutation::new(entries?)
    }
}

/// True iff no subsequence of `p` is order-isomorphic to `q`.
pub fn avoids(p: &Permutation, q: &Permutation) -> bool {
    let k = q.len();
    if k == 0 {
        return false;
    }
    if k > p.len() {
        return true;
    }
    let mut chosen = Vec::with_capacity(k);
    !contains_from(p.entries(), q.entries(), 0, &mut chosen)
}

fn contains_from(p: &[usize], q: &[usize], start: usize, chosen: &mut Vec<usize>) -> bool {
    let depth = chosen.len();
    if depth == q.len() {
        return true;
    }
    for i in start..=p.len() - (q.len() - depth) {
        let v = p[i];
        // The new entry must compare with every earlier entry the way q does.
        let consistent = chosen
            .iter()
            .zip(q)
            .all(|(&c, &qc)| (c < v) == (qc < q[depth]));
        if consistent {
            chosen.push(v);
            if contains_from(p, q, i + 1, chosen) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        parse_word(s).unwrap()
    }

    #[test]
    fn parse_examples() {
        assert_eq!(
            w("rlm").letters(),
            &[Letter::Rho, Letter::Lambda, Letter::Mu]
        );
        assert!(w("").is_empty());
        assert_eq!(parse_word("rlx"), Err(ParseWordError::InvalidCharacter(2)));
        assert_eq!(w("ρλμ"), w("rlm"));
        assert_eq!(w("rlm$").letters().last(), Some(&Letter::Dollar));
        assert_eq!(parse_word("r$lm"), Err(ParseWordError::InvalidCharacter(1)));
    }

    #[test]
    fn d_count_examples() {
        assert_eq!(d_count(w("rlm").letters(), Letter::Rho, Letter::Lambda), 0);
        assert_eq!(d_count(w("rrl").letters(), Letter::Rho, Letter::Lambda), 1);
        assert_eq!(
            d_count(w("rlmrlm").letters(), Letter::Lambda, Letter::Mu),
            0
        );
    }

    #[test]
    fn lk_examples() {
        assert!(in_lk(w("rlmrlm").letters(), Depth::Bounded(2)));
        assert!(!in_lk(w("rrlmlm").letters(), Depth::Bounded(1)));
        assert!(in_lk(w("rrlmlm").letters(), Depth::Bounded(2)));
        assert!(in_lk(&[], Depth::Bounded(2)));
        assert!(!in_lk(w("rlm$").letters(), Depth::Bounded(2)));
        assert!(!in_lk(w("rlml").letters(), Depth::Unbounded));
    }

    #[test]
    fn mu_order_examples() {
        assert!(mu_less(w("rlmrlm").letters(), w("rlrmlm").letters()));
        assert!(!mu_less(w("rlmrlm").letters(), w("rlmrlm").letters()));
        assert!(mu_less(w("rrlmlm").letters(), w("rlrlmm").letters()));
        // Same θ image, different strings.
        assert!(!mu_less(w("rlm").letters(), w("lrm").letters()));
        assert!(!mu_less(w("lrm").letters(), w("rlm").letters()));
    }

    #[test]
    fn avoidance_examples() {
        let p: Permutation = "25413".parse().unwrap();
        assert!(avoids(&p, &"123".parse().unwrap()));
        // 5,1,3 is an occurrence of 312.
        assert!(!avoids(&p, &"312".parse().unwrap()));
        assert!(!avoids(&p, &p));
        let q: Permutation = "312".parse().unwrap();
        assert!(!avoids(&q, &q));
        assert!(avoids(&"123".parse().unwrap(), &q));
    }

    #[test]
    fn permutation_display_and_parse() {
        let p = Permutation::new(vec![2, 5, 4, 1, 3]).unwrap();
        assert_eq!(p.to_string(), "25413");
        let long = Permutation::new((1..=10).rev().collect()).unwrap();
        assert_eq!(long.to_string(), "10 9 8 7 6 5 4 3 2 1");
        assert_eq!(long.to_string().parse::<Permutation>().unwrap(), long);
        assert!("112".parse::<Permutation>().is_err());
        assert!(Permutation::new(vec![0]).is_err());
    }

    #[test]
    fn l2inf_enumeration_respects_counts() {
        for n in 0..=4 {
            for word in words_in_lk(3 * n, Depth::Bounded(2)) {
                let l = word.letters();
                assert!(in_lk(l, Depth::Bounded(2)));
                for m in Letter::MOVES {
                    assert_eq!(l.iter().filter(|&&x| x == m).count(), n);
                }
            }
        }
        assert!(words_in_lk(4, Depth::Bounded(2)).is_empty());
        assert_eq!(words_in_lk(0, Depth::Bounded(2)), vec![Word::empty()]);
    }
}
