//! The canonical sublanguage `L` of `L(2,∞)`: one word per generated
//! permutation.
//!
//! A word of `L(2,∞)` is outside `L` when it contains `ρμ`, or has a prefix
//! `w₀·ρλ·w₁·λμ` or `w₀·λρ·w₁·λμ` with `D_{ρ,λ}(w₀) = 1` and `w₁ ∈ L(1,∞)`.
//! Each such violation has a rewrite that keeps the generated permutation
//! and moves strictly down in μ-order, so repeated rewriting terminates.

use serde::Serialize;
use thiserror::Error;

use crate::encoding::{in_lk, Counters, Depth, Letter, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CanonicalError {
    #[error("NotInL2Infinity")]
    NotInL2Infinity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ViolationKind {
    /// A `ρμ` factor.
    RhoMu,
    /// Prefix `w₀·ρλ·w₁·λμ`.
    Rule2Prefix,
    /// Prefix `w₀·λρ·w₁·λμ`.
    Rule3Prefix,
}

/// Where a word leaves `L`.
///
/// For `RhoMu`, `start` is the index of the ρ and `w1_len` is zero. For the
/// prefix rules `start = |w₀|`, the swapped pair sits at `start..start + 2`,
/// `w₁` spans `w1_len` letters after it and the closing `λμ` follows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub start: usize,
    pub w1_len: usize,
}

impl Violation {
    pub fn rho_mu(at: usize) -> Violation {
        Violation {
            kind: ViolationKind::RhoMu,
            start: at,
            w1_len: 0,
        }
    }

    /// Index of the closing `λ` (prefix rules only).
    pub fn closing(&self) -> usize {
        self.start + 2 + self.w1_len
    }

    /// One past the last letter the violation covers.
    pub fn end(&self) -> usize {
        match self.kind {
            ViolationKind::RhoMu => self.start + 2,
            _ => self.closing() + 2,
        }
    }
}

fn require_l2inf(w: &[Letter]) -> Result<(), CanonicalError> {
    if in_lk(w, Depth::Bounded(2)) {
        Ok(())
    } else {
        Err(CanonicalError::NotInL2Infinity)
    }
}

/// Finds the violation `canonicalize` would repair next: the leftmost `ρμ`
/// if any, otherwise the bad prefix with the smallest end, breaking ties by
/// the shortest `w₀`.
pub fn find_violation(w: &[Letter]) -> Result<Option<Violation>, CanonicalError> {
    require_l2inf(w)?;
    Ok(scan(w))
}

fn scan(w: &[Letter]) -> Option<Violation> {
    if let Some(at) = w.windows(2).position(|p| p == [Letter::Rho, Letter::Mu]) {
        return Some(Violation::rho_mu(at));
    }

    let mut best: Option<Violation> = None;
    let mut prefix = Counters::default();
    for start in 0..w.len() {
        if start > 0 {
            prefix = prefix.step(w[start - 1]);
        }
        if prefix.rho_lambda != 1 || start + 4 > w.len() {
            continue;
        }
        let kind = match (w[start], w[start + 1]) {
            (Letter::Rho, Letter::Lambda) => ViolationKind::Rule2Prefix,
            (Letter::Lambda, Letter::Rho) => ViolationKind::Rule3Prefix,
            _ => continue,
        };
        let w1_start = start + 2;
        if let Some(bound) = best.map(|b| b.end()) {
            // Shortest possible match here already ends too late.
            if w1_start + 2 >= bound {
                continue;
            }
        }
        let mut c = Counters::default();
        let mut e = w1_start;
        loop {
            // w[w1_start..e] is admissible for depth one; closes iff counters are zero.
            if c.is_zero() && e + 1 < w.len() && w[e] == Letter::Lambda && w[e + 1] == Letter::Mu {
                let v = Violation {
                    kind,
                    start,
                    w1_len: e - w1_start,
                };
                if best.is_none_or(|b| v.end() < b.end()) {
                    best = Some(v);
                }
                break;
            }
            if e >= w.len() {
                break;
            }
            c = c.step(w[e]);
            if !c.admissible(Depth::Bounded(1)) {
                break;
            }
            e += 1;
        }
    }
    best
}

/// Applies the rewrite for `v`: `ρμ → μρ`, `w₀ρλw₁λμ → w₀λρw₁μλ`,
/// `w₀λρw₁λμ → w₀ρλw₁μλ`. The rest of the word is untouched.
pub fn rewrite_once(w: &[Letter], v: &Violation) -> Word {
    let mut out = w.to_vec();
    match v.kind {
        ViolationKind::RhoMu => out.swap(v.start, v.start + 1),
        ViolationKind::Rule2Prefix | ViolationKind::Rule3Prefix => {
            out.swap(v.start, v.start + 1);
            out.swap(v.closing(), v.closing() + 1);
        }
    }
    Word::new(out)
}

/// Rewrites until no violation remains. The result is in `L`, has the same
/// length and generates the same permutation.
pub fn canonicalize(w: &[Letter]) -> Result<Word, CanonicalError> {
    Ok(canonicalize_counted(w)?.0)
}

/// As [`canonicalize`], also reporting how many rewrites were applied.
pub fn canonicalize_counted(w: &[Letter]) -> Result<(Word, usize), CanonicalError> {
    require_l2inf(w)?;
    let mut cur = Word::new(w.to_vec());
    let mut steps = 0;
    while let Some(v) = scan(cur.letters()) {
        cur = rewrite_once(cur.letters(), &v);
        steps += 1;
    }
    Ok((cur, steps))
}

/// Direct membership test for `L`.
pub fn in_l(w: &[Letter]) -> bool {
    in_lk(w, Depth::Bounded(2)) && scan(w).is_none()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::{mu_less, parse_word, words_in_lk};
    use crate::machine::run;

    fn w(s: &str) -> Word {
        parse_word(s).unwrap()
    }

    /// Every decomposition, straight from the definition.
    fn brute_violations(x: &[Letter]) -> Vec<Violation> {
        let mut out = Vec::new();
        for i in 0..x.len().saturating_sub(1) {
            if x[i] == Letter::Rho && x[i + 1] == Letter::Mu {
                out.push(Violation::rho_mu(i));
            }
        }
        for start in 0..x.len() {
            if crate::encoding::d_count(&x[..start], Letter::Rho, Letter::Lambda) != 1 {
                continue;
            }
            for w1_len in 0..x.len() {
                let close = start + 2 + w1_len;
                if close + 2 > x.len() {
                    break;
                }
                let kind = match (x[start], x[start + 1]) {
                    (Letter::Rho, Letter::Lambda) => ViolationKind::Rule2Prefix,
                    (Letter::Lambda, Letter::Rho) => ViolationKind::Rule3Prefix,
                    _ => continue,
                };
                if x[close] == Letter::Lambda
                    && x[close + 1] == Letter::Mu
                    && in_lk(&x[start + 2..close], Depth::Bounded(1))
                {
                    out.push(Violation {
                        kind,
                        start,
                        w1_len,
                    });
                }
            }
        }
        out
    }

    #[test]
    fn violation_examples() {
        assert_eq!(find_violation(w("rlmrlm").letters()), Ok(None));
        assert_eq!(
            find_violation(w("rlrmlm").letters()),
            Ok(Some(Violation::rho_mu(2)))
        );
        assert_eq!(
            find_violation(w("rlrlmm").letters()),
            Ok(Some(Violation {
                kind: ViolationKind::Rule3Prefix,
                start: 1,
                w1_len: 0
            }))
        );
        assert_eq!(
            find_violation(w("rrr").letters()),
            Err(CanonicalError::NotInL2Infinity)
        );
    }

    #[test]
    fn rewrite_examples() {
        let v = Violation::rho_mu(2);
        assert_eq!(rewrite_once(w("rlrmlm").letters(), &v), w("rlmrlm"));
        let v = Violation {
            kind: ViolationKind::Rule3Prefix,
            start: 1,
            w1_len: 0,
        };
        let out = rewrite_once(w("rlrlmm").letters(), &v);
        assert_eq!(out, w("rrlmlm"));
        assert_eq!(
            run(out.letters(), 2, None).unwrap(),
            run(w("rlrlmm").letters(), 2, None).unwrap()
        );
    }

    #[test]
    fn canonicalize_examples() {
        assert_eq!(canonicalize(w("rlrmlm").letters()).unwrap(), w("rlmrlm"));
        assert_eq!(canonicalize(w("rlmrlm").letters()).unwrap(), w("rlmrlm"));
        assert_eq!(canonicalize(w("rlrlmm").letters()).unwrap(), w("rrlmlm"));
        assert_eq!(canonicalize(&[]).unwrap(), Word::empty());
        assert_eq!(
            canonicalize(w("rm").letters()),
            Err(CanonicalError::NotInL2Infinity)
        );
    }

    #[test]
    fn membership_examples() {
        assert!(in_l(w("rlmrlm").letters()));
        assert!(!in_l(w("rlrlmm").letters()));
        assert!(!in_l(w("rlrmlm").letters()));
        assert!(!in_l(w("rlm$").letters()));
        assert!(in_l(&[]));
    }

    #[test]
    fn scan_agrees_with_definition() {
        for n in 0..=4 {
            for word in words_in_lk(3 * n, Depth::Bounded(2)) {
                let x = word.letters();
                let all = brute_violations(x);
                let got = scan(x);
                assert_eq!(got.is_some(), !all.is_empty(), "{word}");
                if let Some(v) = got {
                    assert!(all.contains(&v), "{word}: {v:?}");
                    let expected = all
                        .iter()
                        .find(|c| c.kind == ViolationKind::RhoMu)
                        .copied()
                        .or_else(|| all.iter().copied().min_by_key(|c| (c.end(), c.start)));
                    assert_eq!(Some(v), expected, "{word}");
                }
            }
        }
    }

    #[test]
    fn rewrites_descend_and_preserve_output() {
        for n in 0..=3 {
            for word in words_in_lk(3 * n, Depth::Bounded(2)) {
                let x = word.letters();
                if let Some(v) = find_violation(x).unwrap() {
                    let y = rewrite_once(x, &v);
                    assert!(mu_less(y.letters(), x), "{word} -> {y}");
                    assert!(in_lk(y.letters(), Depth::Bounded(2)));
                    assert_eq!(run(y.letters(), 2, None), run(x, 2, None));
                }
            }
        }
    }
}
