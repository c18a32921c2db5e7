//! Permutations generated by a stack of depth two followed by an infinite
//! stack, and the pipelines that count them.
//!
//! Words over ρ, λ, μ drive the machine ([`machine`]). The canonical
//! sublanguage ([`canonical`]) picks one word per permutation, a
//! deterministic pushdown automaton ([`pda`]) recognises it, the triple
//! construction ([`grammar`]) turns the automaton into a grammar, and
//! [`series`] extracts the counting sequence both from that grammar and from
//! a closed-form algebraic generating function. [`verify`] runs them all
//! against each other.

pub mod canonical;
pub mod cli;
pub mod encoding;
pub mod grammar;
pub mod machine;
pub mod pda;
pub mod series;
pub mod verify;

pub use canonical::{canonicalize, find_violation, in_l, rewrite_once, Violation, ViolationKind};
pub use encoding::{avoids, d_count, in_lk, mu_less, parse_word, Depth, Letter, Permutation, Word};
pub use grammar::{pda_to_grammar, reduce, trim, Grammar, Nonterminal};
pub use machine::{enumerate_perms, run, run_reversed, run_trace, MachineConfig, MachineError};
pub use pda::{accepts, build_m, count_accepted, is_deterministic, Pda, PdaConfig};
pub use series::{
    asymptotic_estimate, coefficients_closed_form, coefficients_from_grammar, solve_system,
    CountSequence, Series,
};

/// Counts of permutations of length 0..=12 as published alongside the
/// closed form.
pub const PUBLISHED_COUNTS: [u64; 13] = [
    1, 1, 2, 6, 24, 114, 592, 3216, 17904, 101198, 578208, 3332136, 19343408,
];
