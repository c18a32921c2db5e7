//! Two stacks in series: a first stack of bounded depth feeding an unbounded
//! second stack. Tokens `1, 2, …` enter in order; ρ, λ and μ move them
//! input → A, A → B and B → output.

use std::collections::{BTreeSet, HashSet};

use serde::Serialize;
use thiserror::Error;

use crate::encoding::{Letter, Permutation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MachineError {
    #[error("StackAOverflow({0})")]
    StackAOverflow(usize),
    #[error("StackAUnderflow({0})")]
    StackAUnderflow(usize),
    #[error("StackBUnderflow({0})")]
    StackBUnderflow(usize),
    #[error("InputExhausted({0})")]
    InputExhausted(usize),
    #[error("IncompleteRun({0})")]
    IncompleteRun(usize),
    #[error("UnexpectedEndMarker({0})")]
    UnexpectedEndMarker(usize),
}

impl MachineError {
    pub fn position(&self) -> usize {
        match *self {
            MachineError::StackAOverflow(p)
            | MachineError::StackAUnderflow(p)
            | MachineError::StackBUnderflow(p)
            | MachineError::InputExhausted(p)
            | MachineError::IncompleteRun(p)
            | MachineError::UnexpectedEndMarker(p) => p,
        }
    }
}

/// Snapshot of the machine. Stacks list their top last.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct MachineConfig {
    pub input_next: usize,
    pub stack_a: Vec<usize>,
    pub stack_b: Vec<usize>,
    pub output: Vec<usize>,
}

impl MachineConfig {
    pub fn initial() -> MachineConfig {
        MachineConfig {
            input_next: 1,
            stack_a: Vec::new(),
            stack_b: Vec::new(),
            output: Vec::new(),
        }
    }

    fn apply(&mut self, l: Letter, pos: usize, k: usize, n: usize) -> Result<(), MachineError> {
        match l {
            Letter::Rho => {
                if self.stack_a.len() >= k {
                    return Err(MachineError::StackAOverflow(pos));
                }
                if self.input_next > n {
                    return Err(MachineError::InputExhausted(pos));
                }
                self.stack_a.push(self.input_next);
                self.input_next += 1;
            }
            Letter::Lambda => {
                let t = self
                    .stack_a
                    .pop()
                    .ok_or(MachineError::StackAUnderflow(pos))?;
                self.stack_b.push(t);
            }
            Letter::Mu => {
                let t = self
                    .stack_b
                    .pop()
                    .ok_or(MachineError::StackBUnderflow(pos))?;
                self.output.push(t);
            }
            Letter::Dollar => return Err(MachineError::UnexpectedEndMarker(pos)),
        }
        Ok(())
    }

    fn is_drained(&self) -> bool {
        self.stack_a.is_empty() && self.stack_b.is_empty()
    }
}

/// Runs `w` with a first stack of depth `k`. Without `n_tokens` the input
/// holds `|w| / 3` tokens.
pub fn run(w: &[Letter], k: usize, n_tokens: Option<usize>) -> Result<Permutation, MachineError> {
    let n = n_tokens.unwrap_or(w.len() / 3);
    let mut cfg = MachineConfig::initial();
    for (pos, &l) in w.iter().enumerate() {
        cfg.apply(l, pos, k, n)?;
    }
    finish(cfg, w.len(), n)
}

fn finish(cfg: MachineConfig, len: usize, n: usize) -> Result<Permutation, MachineError> {
    if !cfg.is_drained() || cfg.output.len() != n {
        return Err(MachineError::IncompleteRun(len));
    }
    Ok(Permutation::from_vec_unchecked(cfg.output))
}

/// Every configuration of a run, starting with the initial one.
pub fn run_trace(w: &[Letter], k: usize) -> Result<Vec<MachineConfig>, MachineError> {
    let n = w.len() / 3;
    let mut cfg = MachineConfig::initial();
    let mut trace = vec![cfg.clone()];
    for (pos, &l) in w.iter().enumerate() {
        cfg.apply(l, pos, k, n)?;
        trace.push(cfg.clone());
    }
    if !cfg.is_drained() || cfg.output.len() != n {
        return Err(MachineError::IncompleteRun(w.len()));
    }
    Ok(trace)
}

/// Reads `w` right to left with the stacks in the opposite order: μ moves
/// input → unbounded stack, λ unbounded → depth-2 stack, ρ depth-2 → output.
///
/// Error variants keep their stack names: `StackB*` refers to the unbounded
/// stack and `StackA*` to the depth-2 one. Positions index into `w` as given.
pub fn run_reversed(w: &[Letter]) -> Result<Permutation, MachineError> {
    const DEPTH: usize = 2;
    let n = w.len() / 3;
    let mut next = 1;
    let mut bounded: Vec<usize> = Vec::new();
    let mut unbounded: Vec<usize> = Vec::new();
    let mut output = Vec::with_capacity(n);
    for (pos, &l) in w.iter().enumerate().rev() {
        match l {
            Letter::Mu => {
                if next > n {
                    return Err(MachineError::InputExhausted(pos));
                }
                unbounded.push(next);
                next += 1;
            }
            Letter::Lambda => {
                let t = unbounded.pop().ok_or(MachineError::StackBUnderflow(pos))?;
                if bounded.len() >= DEPTH {
                    return Err(MachineError::StackAOverflow(pos));
                }
                bounded.push(t);
            }
            Letter::Rho => {
                let t = bounded.pop().ok_or(MachineError::StackAUnderflow(pos))?;
                output.push(t);
            }
            Letter::Dollar => return Err(MachineError::UnexpectedEndMarker(pos)),
        }
    }
    if !bounded.is_empty() || !unbounded.is_empty() || output.len() != n {
        return Err(MachineError::IncompleteRun(w.len()));
    }
    Ok(Permutation::from_vec_unchecked(output))
}

/// All permutations of length `n` the machine with depth-`k` first stack can
/// produce, by depth-first search over configurations.
pub fn enumerate_perms(n: usize, k: usize) -> BTreeSet<Permutation> {
    let mut found = BTreeSet::new();
    let mut seen = HashSet::new();
    let mut stack = vec![MachineConfig::initial()];
    while let Some(cfg) = stack.pop() {
        if cfg.output.len() == n {
            found.insert(Permutation::from_vec_unchecked(cfg.output));
            continue;
        }
        for l in Letter::MOVES {
            let mut next = cfg.clone();
            if next.apply(l, 0, k, n).is_ok() && seen.insert(next.clone()) {
                stack.push(next);
            }
        }
    }
    found
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::parse_word;

    fn run2(s: &str) -> Result<Permutation, MachineError> {
        run(parse_word(s).unwrap().letters(), 2, None)
    }

    #[test]
    fn run_examples() {
        assert_eq!(run2("rlm").unwrap().to_string(), "1");
        assert_eq!(run2("rlmrlm").unwrap().to_string(), "12");
        assert_eq!(run2("rlrmlm").unwrap().to_string(), "12");
        assert_eq!(run2("rrlmlm").unwrap().to_string(), "21");
        assert_eq!(run2("rrrlllmmm"), Err(MachineError::StackAOverflow(2)));
        assert_eq!(run2("l"), Err(MachineError::StackAUnderflow(0)));
        assert_eq!(run2("rlmm"), Err(MachineError::StackBUnderflow(3)));
        assert_eq!(run2("rlr"), Err(MachineError::InputExhausted(2)));
        let rl = parse_word("rl").unwrap();
        assert_eq!(
            run(rl.letters(), 2, Some(1)),
            Err(MachineError::IncompleteRun(2))
        );
        assert_eq!(run2("rlm$"), Err(MachineError::UnexpectedEndMarker(3)));
        assert_eq!(run2("").unwrap(), Permutation::identity(0));
    }

    #[test]
    fn explicit_token_count() {
        let w = parse_word("rlm").unwrap();
        assert_eq!(
            run(w.letters(), 2, Some(2)),
            Err(MachineError::IncompleteRun(3))
        );
        let w = parse_word("rlmrlm").unwrap();
        assert_eq!(
            run(w.letters(), 2, Some(1)),
            Err(MachineError::InputExhausted(3))
        );
    }

    #[test]
    fn trace_examples() {
        let t = run_trace(parse_word("rlm").unwrap().letters(), 2).unwrap();
        assert_eq!(t.len(), 4);
        assert_eq!(t[3].output, vec![1]);
        assert_eq!(t[1].stack_a, vec![1]);
        assert_eq!(run_trace(&[], 2).unwrap(), vec![MachineConfig::initial()]);
        let t = run_trace(parse_word("rlrmlm").unwrap().letters(), 2).unwrap();
        assert_eq!(t.last().unwrap().output, vec![1, 2]);
    }

    #[test]
    fn reversed_examples() {
        let rev = |s: &str| run_reversed(parse_word(s).unwrap().letters());
        assert_eq!(rev("rlm").unwrap().to_string(), "1");
        assert_eq!(rev("rlmrlm").unwrap().to_string(), "12");
        // Right to left: μ μ λ λ ρ ρ pushes 1,2 then moves 2,1 into the
        // bounded stack and outputs 1 then 2.
        assert_eq!(rev("rrllmm").unwrap().to_string(), "12");
        assert_eq!(rev("rrlmlm").unwrap().to_string(), "21");
        assert_eq!(rev("m"), Err(MachineError::InputExhausted(0)));
        assert_eq!(rev("r"), Err(MachineError::StackAUnderflow(0)));
    }

    #[test]
    fn enumeration_small() {
        assert_eq!(enumerate_perms(0, 2).len(), 1);
        assert_eq!(enumerate_perms(1, 2).len(), 1);
        assert_eq!(enumerate_perms(3, 2).len(), 6);
        assert_eq!(enumerate_perms(4, 1).len(), 14);
        assert_eq!(enumerate_perms(5, 2).len(), 114);
    }
}
