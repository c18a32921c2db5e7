//! A deterministic pushdown automaton accepting `L$` on empty stack.
//!
//! The stack tracks `D_{λ,μ}` (its height is `D_{λ,μ} + 1`) and the state
//! tracks `D_{ρ,λ}`. Symbol `2` flags material pushed while a bad prefix
//! `w₀ρλ…` or `w₀λρ…` could still be completed.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::encoding::{Counters, Letter};

pub type State = u8;
pub type StackSymbol = u8;

/// One row of the transition table. `letter == None` is an ε-move.
/// `push` replaces the popped symbol; its first element becomes the top.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Transition {
    pub from: State,
    pub letter: Option<Letter>,
    pub pop: StackSymbol,
    pub to: State,
    pub push: Vec<StackSymbol>,
}

type Key = (State, Option<Letter>, StackSymbol);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pda {
    pub num_states: u8,
    pub input_alphabet: Vec<Letter>,
    pub stack_alphabet: Vec<StackSymbol>,
    pub start_state: State,
    pub start_stack: StackSymbol,
    delta: BTreeMap<Key, Vec<(State, Vec<StackSymbol>)>>,
}

/// Stack is listed top first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct PdaConfig {
    pub state: State,
    pub stack: Vec<StackSymbol>,
}

impl PdaConfig {
    pub fn stack_string(&self) -> String {
        self.stack.iter().map(|s| char::from(b'0' + s)).collect()
    }
}

impl fmt::Display for PdaConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(q{}, \"{}\")", self.state, self.stack_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PdaError {
    #[error("MalformedInput: input must end with a single `$`")]
    MalformedInput,
}

/// `D_{ρ,λ}` of every prefix whose run ends in the given state.
pub const PREFIX_RHO_LAMBDA: [i64; 9] = [0, 1, 2, 0, 1, 1, 1, 0, 2];

impl Pda {
    pub fn new(
        num_states: u8,
        input_alphabet: Vec<Letter>,
        stack_alphabet: Vec<StackSymbol>,
        start_state: State,
        start_stack: StackSymbol,
    ) -> Pda {
        Pda {
            num_states,
            input_alphabet,
            stack_alphabet,
            start_state,
            start_stack,
            delta: BTreeMap::new(),
        }
    }

    /// Adds a row; a second row on the same key makes the machine
    /// nondeterministic rather than replacing the first.
    pub fn add(&mut self, t: Transition) {
        self.delta
            .entry((t.from, t.letter, t.pop))
            .or_default()
            .push((t.to, t.push));
    }

    pub fn transitions(&self) -> Vec<Transition> {
        self.delta
            .iter()
            .flat_map(|(&(from, letter, pop), targets)| {
                targets.iter().map(move |(to, push)| Transition {
                    from,
                    letter,
                    pop,
                    to: *to,
                    push: push.clone(),
                })
            })
            .collect()
    }

    pub fn states(&self) -> impl Iterator<Item = State> {
        0..self.num_states
    }

    /// The unique move on `(state, letter, top)`, if any.
    pub fn step(
        &self,
        state: State,
        letter: Letter,
        top: StackSymbol,
    ) -> Option<(State, &[StackSymbol])> {
        let targets = self.delta.get(&(state, Some(letter), top))?;
        match targets.as_slice() {
            [(to, push)] => Some((*to, push.as_slice())),
            _ => None,
        }
    }

    pub fn initial_config(&self) -> PdaConfig {
        PdaConfig {
            state: self.start_state,
            stack: vec![self.start_stack],
        }
    }

    /// Advances one letter; `None` when no move applies.
    pub fn advance(&self, cfg: &PdaConfig, letter: Letter) -> Option<PdaConfig> {
        let (&top, rest) = cfg.stack.split_first()?;
        let (to, push) = self.step(cfg.state, letter, top)?;
        let mut stack = Vec::with_capacity(push.len() + rest.len());
        stack.extend_from_slice(push);
        stack.extend_from_slice(rest);
        Some(PdaConfig { state: to, stack })
    }

    /// Runs over a prefix (no end marker required). `None` if the machine
    /// blocks somewhere inside it.
    pub fn run_prefix(&self, w: &[Letter]) -> Option<PdaConfig> {
        let mut cfg = self.initial_config();
        for &l in w {
            cfg = self.advance(&cfg, l)?;
        }
        Some(cfg)
    }
}

macro_rules! rows {
    ($m:ident; $( ($from:expr, $l:ident, $pop:expr) => ($to:expr, [$($push:expr),*]) ),* $(,)?) => {
        $( $m.add(Transition {
            from: $from,
            letter: Some(Letter::$l),
            pop: $pop,
            to: $to,
            push: vec![$($push),*],
        }); )*
    };
}

/// The automaton `M`: nine states, stack alphabet `{0, 1, 2}`, start
/// configuration `(q₀, "0")`, 36 transitions.
pub fn build_m() -> Pda {
    let mut m = Pda::new(
        9,
        vec![Letter::Rho, Letter::Lambda, Letter::Mu, Letter::Dollar],
        vec![0, 1, 2],
        0,
        0,
    );
    rows!(m;
        (0, Dollar, 0) => (0, []),
        (0, Mu, 1) => (0, []),
        (0, Mu, 2) => (0, []),
        (3, Mu, 1) => (0, []),
        (4, Mu, 1) => (4, []),
        (4, Mu, 2) => (4, []),
        (5, Mu, 1) => (4, []),
        (5, Mu, 2) => (5, []),

        (0, Rho, 0) => (1, [0]),
        (0, Rho, 1) => (1, [1]),
        (0, Rho, 2) => (1, [2]),
        (1, Rho, 0) => (2, [0]),
        (1, Rho, 1) => (2, [1]),
        (1, Rho, 2) => (2, [2]),
        (3, Rho, 1) => (6, [1]),
        (4, Rho, 0) => (2, [0]),
        (4, Rho, 1) => (2, [1]),
        (4, Rho, 2) => (2, [2]),
        (5, Rho, 1) => (8, [1]),
        (5, Rho, 2) => (8, [2]),
        (6, Rho, 1) => (8, [1]),
        (7, Rho, 1) => (6, [1]),

        (1, Lambda, 0) => (3, [1, 0]),
        (1, Lambda, 1) => (3, [1, 1]),
        (1, Lambda, 2) => (3, [1, 2]),
        (2, Lambda, 0) => (5, [1, 0]),
        (2, Lambda, 1) => (5, [1, 1]),
        (2, Lambda, 2) => (5, [1, 2]),
        (4, Lambda, 0) => (3, [1, 0]),
        (4, Lambda, 1) => (3, [1, 1]),
        (4, Lambda, 2) => (3, [1, 2]),
        (5, Lambda, 1) => (7, [1, 1]),
        (5, Lambda, 2) => (7, [1, 2]),
        (6, Lambda, 1) => (7, [1, 1]),
        (8, Lambda, 1) => (5, [2, 1]),
        (8, Lambda, 2) => (5, [2, 2]),
    );
    m
}

/// No key has two images, and no `(state, top)` with an ε-move also has a
/// letter move.
pub fn is_deterministic(m: &Pda) -> bool {
    if m.delta.values().any(|targets| targets.len() > 1) {
        return false;
    }
    m.delta.keys().all(|&(state, letter, top)| {
        letter.is_some()
            || !m
                .delta
                .keys()
                .any(|&(s, l, t)| s == state && t == top && l.is_some())
    })
}

fn check_input(w: &[Letter]) -> Result<(), PdaError> {
    match w.split_last() {
        Some((Letter::Dollar, body)) if !body.contains(&Letter::Dollar) => Ok(()),
        _ => Err(PdaError::MalformedInput),
    }
}

/// Acceptance on empty stack: the stack must empty exactly as the final `$`
/// is consumed. Only letter moves are followed.
pub fn accepts(m: &Pda, w: &[Letter]) -> Result<bool, PdaError> {
    check_input(w)?;
    Ok(m.run_prefix(w).is_some_and(|cfg| cfg.stack.is_empty()))
}

/// Initial configuration followed by the configuration after each consumed
/// letter, stopping where the machine blocks.
pub fn trace(m: &Pda, w: &[Letter]) -> Result<Vec<PdaConfig>, PdaError> {
    check_input(w)?;
    let mut cfg = m.initial_config();
    let mut out = vec![cfg.clone()];
    for &l in w {
        match m.advance(&cfg, l) {
            Some(next) => cfg = next,
            None => break,
        }
        out.push(cfg.clone());
    }
    Ok(out)
}

/// Number of accepted inputs of exactly `length` letters, `$` included.
/// Counts accepting paths, which equals the word count for a deterministic
/// machine.
pub fn count_accepted(m: &Pda, length: usize) -> u64 {
    if length == 0 {
        return 0;
    }
    let moves: Vec<Letter> = m
        .input_alphabet
        .iter()
        .copied()
        .filter(|&l| l != Letter::Dollar)
        .collect();
    let mut total = 0;
    count_from(m, &m.initial_config(), length, &moves, &mut total);
    total
}

fn count_from(m: &Pda, cfg: &PdaConfig, remaining: usize, moves: &[Letter], total: &mut u64) {
    // Each symbol still on the stack needs a letter to pop it.
    if cfg.stack.len() > remaining {
        return;
    }
    if remaining == 1 {
        if m.advance(cfg, Letter::Dollar)
            .is_some_and(|c| c.stack.is_empty())
        {
            *total += 1;
        }
        return;
    }
    for &l in moves {
        if let Some(next) = m.advance(cfg, l) {
            if !next.stack.is_empty() {
                count_from(m, &next, remaining - 1, moves, total);
            }
        }
    }
}

/// Checks the state/counter laws of `M` along the run of `w` (end marker
/// optional): `D_{ρ,λ}` of each prefix matches [`PREFIX_RHO_LAMBDA`], the
/// stack height is `D_{λ,μ} + 1` before `$`, states 3, 6, 7 see `1` on top
/// and states 5, 8 see `1` or `2`. Returns the first offending prefix length.
pub fn check_state_invariants(m: &Pda, w: &[Letter]) -> Result<(), usize> {
    let mut cfg = m.initial_config();
    let mut counters = Counters::default();
    for (i, &l) in w.iter().enumerate() {
        let Some(next) = m.advance(&cfg, l) else {
            return Ok(());
        };
        cfg = next;
        if l == Letter::Dollar {
            break;
        }
        counters = counters.step(l);
        let state = usize::from(cfg.state);
        let top = cfg.stack.first().copied();
        let ok = PREFIX_RHO_LAMBDA.get(state) == Some(&counters.rho_lambda)
            && cfg.stack.len() as i64 == counters.lambda_mu + 1
            && match cfg.state {
                3 | 6 | 7 => top == Some(1),
                5 | 8 => matches!(top, Some(1) | Some(2)),
                _ => true,
            };
        if !ok {
            return Err(i + 1);
        }
    }
    Ok(())
}

/// Machine-readable form of a [`Pda`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PdaDocument {
    pub states: Vec<String>,
    pub input_alphabet: Vec<String>,
    pub stack_alphabet: Vec<StackSymbol>,
    pub start_state: String,
    pub start_stack: String,
    pub transitions: Vec<TransitionRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionRecord {
    pub from: String,
    /// ASCII letter, or `""` for an ε-move.
    pub letter: String,
    pub pop: StackSymbol,
    pub to: String,
    /// Replacement string, top first.
    pub push: String,
}

pub fn export(m: &Pda) -> PdaDocument {
    let name = |q: State| format!("q{q}");
    PdaDocument {
        states: m.states().map(name).collect(),
        input_alphabet: m
            .input_alphabet
            .iter()
            .map(|l| l.ascii().to_string())
            .collect(),
        stack_alphabet: m.stack_alphabet.clone(),
        start_state: name(m.start_state),
        start_stack: m.start_stack.to_string(),
        transitions: m
            .transitions()
            .into_iter()
            .map(|t| TransitionRecord {
                from: name(t.from),
                letter: t.letter.map(|l| l.ascii().to_string()).unwrap_or_default(),
                pop: t.pop,
                to: name(t.to),
                push: t.push.iter().map(|s| char::from(b'0' + s)).collect(),
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::parse_word;

    fn w(s: &str) -> Vec<Letter> {
        parse_word(s).unwrap().into_letters()
    }

    #[test]
    fn table_rows() {
        let m = build_m();
        assert_eq!(m.transitions().len(), 36);
        assert_eq!(m.step(0, Letter::Dollar, 0), Some((0, &[][..])));
        assert_eq!(m.step(8, Letter::Lambda, 1), Some((5, &[2, 1][..])));
        for top in 0..3 {
            assert_eq!(m.step(1, Letter::Mu, top), None);
        }
    }

    #[test]
    fn determinism() {
        assert!(is_deterministic(&build_m()));

        let mut eps = build_m();
        eps.add(Transition {
            from: 0,
            letter: None,
            pop: 0,
            to: 1,
            push: vec![0],
        });
        assert!(!is_deterministic(&eps));

        let mut fork = build_m();
        fork.add(Transition {
            from: 0,
            letter: Some(Letter::Rho),
            pop: 0,
            to: 2,
            push: vec![0],
        });
        assert!(!is_deterministic(&fork));

        // An ε-move on a key with no letter moves is fine.
        let mut lone = build_m();
        lone.add(Transition {
            from: 7,
            letter: None,
            pop: 0,
            to: 0,
            push: vec![],
        });
        assert!(is_deterministic(&lone));
    }

    #[test]
    fn acceptance_examples() {
        let m = build_m();
        assert_eq!(accepts(&m, &w("rlmrlm$")), Ok(true));
        assert_eq!(accepts(&m, &w("rlrmlm$")), Ok(false));
        assert_eq!(accepts(&m, &w("$")), Ok(true));
        assert_eq!(accepts(&m, &w("rlrlmm$")), Ok(false));
        assert_eq!(accepts(&m, &w("rrlmlm$")), Ok(true));
        assert_eq!(accepts(&m, &w("rlm")), Err(PdaError::MalformedInput));
        assert_eq!(
            accepts(&m, &[Letter::Dollar, Letter::Dollar]),
            Err(PdaError::MalformedInput)
        );
    }

    #[test]
    fn trace_examples() {
        let m = build_m();
        let t = trace(&m, &w("rlmrlm$")).unwrap();
        let states: Vec<State> = t.iter().map(|c| c.state).collect();
        assert_eq!(states, vec![0, 1, 3, 0, 1, 3, 0, 0]);
        assert_eq!(
            t[2],
            PdaConfig {
                state: 3,
                stack: vec![1, 0]
            }
        );
        assert_eq!(t[2].stack_string(), "10");

        let t = trace(&m, &w("$")).unwrap();
        assert_eq!(
            t,
            vec![
                PdaConfig {
                    state: 0,
                    stack: vec![0]
                },
                PdaConfig {
                    state: 0,
                    stack: vec![]
                },
            ]
        );

        let bad = w("rlrmlm$");
        let t = trace(&m, &bad).unwrap();
        assert!(t.len() - 1 < bad.len());
        assert_eq!(t.len() - 1, 3);
    }

    #[test]
    fn counting() {
        let m = build_m();
        assert_eq!(count_accepted(&m, 1), 1);
        assert_eq!(count_accepted(&m, 3), 0);
        assert_eq!(count_accepted(&m, 4), 1);
        assert_eq!(count_accepted(&m, 7), 2);
        assert_eq!(count_accepted(&m, 10), 6);
        assert_eq!(count_accepted(&m, 0), 0);
    }

    #[test]
    fn export_shape() {
        let doc = export(&build_m());
        assert_eq!(doc.states.len(), 9);
        assert_eq!(doc.transitions.len(), 36);
        let row = doc
            .transitions
            .iter()
            .find(|t| t.from == "q8" && t.letter == "l" && t.pop == 1)
            .unwrap();
        assert_eq!((row.to.as_str(), row.push.as_str()), ("q5", "21"));
        let json = serde_json::to_string(&doc).unwrap();
        let back: PdaDocument = serde_json::from_str(&json).unwrap();
        assert_eq!(back, doc);
    }
}
