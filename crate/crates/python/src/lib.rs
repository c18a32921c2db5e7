//! Python bindings. Words are passed as strings over `r`, `l`, `m`
//! (or `ρ`, `λ`, `μ`) with an optional trailing `$`; permutations as lists of
//! integers.

use std::fmt::Display;

use num_bigint::BigInt;
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use tw::encoding::{Depth, Permutation, Word};
use tw::grammar::{self, Grammar as CoreGrammar};
use tw::pda::{self, Pda as CorePda};
use tw::verify::{cross_check, VerifyOptions};
use twostack as tw;

create_exception!(
    twostack,
    TwoStackError,
    PyValueError,
    "A machine, word or series error."
);

fn err(e: impl Display) -> PyErr {
    TwoStackError::new_err(e.to_string())
}

fn word(text: &str) -> PyResult<Word> {
    tw::parse_word(text).map_err(err)
}

fn perm(entries: Vec<usize>) -> PyResult<Permutation> {
    Permutation::new(entries).map_err(err)
}

fn depth(k: Option<usize>) -> Depth {
    k.map_or(Depth::Unbounded, Depth::Bounded)
}

/// Permutation generated by `word` on a depth-`k` stack followed by an
/// infinite one.
#[pyfunction]
#[pyo3(signature = (word, k = 2))]
fn run(word: &str, k: usize) -> PyResult<Vec<usize>> {
    let w = self::word(word)?;
    Ok(tw::run(w.letters(), k, None)
        .map_err(err)?
        .entries()
        .to_vec())
}

type Snapshot = (usize, Vec<usize>, Vec<usize>, Vec<usize>);

/// Configurations after each letter, as `(next_input, stack_a, stack_b, output)`.
#[pyfunction]
#[pyo3(signature = (word, k = 2))]
fn run_trace(word: &str, k: usize) -> PyResult<Vec<Snapshot>> {
    let w = self::word(word)?;
    let configs = tw::run_trace(w.letters(), k).map_err(err)?;
    Ok(configs
        .into_iter()
        .map(|c| (c.input_next, c.stack_a, c.stack_b, c.output))
        .collect())
}

/// Reads `word` right to left with the infinite stack first.
#[pyfunction]
fn run_reversed(word: &str) -> PyResult<Vec<usize>> {
    let w = self::word(word)?;
    Ok(tw::run_reversed(w.letters())
        .map_err(err)?
        .entries()
        .to_vec())
}

/// Membership in `L(k,∞)`; `k=None` leaves the first stack unbounded too.
#[pyfunction]
#[pyo3(signature = (word, k = Some(2)))]
fn in_lk(word: &str, k: Option<usize>) -> PyResult<bool> {
    Ok(tw::in_lk(self::word(word)?.letters(), depth(k)))
}

#[pyfunction]
fn in_l(word: &str) -> PyResult<bool> {
    Ok(tw::in_l(self::word(word)?.letters()))
}

#[pyfunction]
fn mu_less(u: &str, v: &str) -> PyResult<bool> {
    Ok(tw::mu_less(word(u)?.letters(), word(v)?.letters()))
}

/// First violation as `(kind, start, w1_len)`, or `None` for words of `L`.
#[pyfunction]
fn find_violation(word: &str) -> PyResult<Option<(String, usize, usize)>> {
    let v = tw::find_violation(self::word(word)?.letters()).map_err(err)?;
    Ok(v.map(|v| (format!("{:?}", v.kind), v.start, v.w1_len)))
}

#[pyfunction]
fn canonicalize(word: &str) -> PyResult<String> {
    Ok(tw::canonicalize(self::word(word)?.letters())
        .map_err(err)?
        .to_string())
}

#[pyfunction]
fn avoids(p: Vec<usize>, q: Vec<usize>) -> PyResult<bool> {
    Ok(tw::avoids(&perm(p)?, &perm(q)?))
}

/// Every permutation of length `n` the machine can output, sorted.
#[pyfunction]
#[pyo3(signature = (n, k = 2))]
fn enumerate_perms(py: Python<'_>, n: usize, k: usize) -> Vec<Vec<usize>> {
    py.detach(|| tw::enumerate_perms(n, k))
        .into_iter()
        .map(|p| p.entries().to_vec())
        .collect()
}

/// `c_0..=c_{n_max}` from the closed-form generating function.
#[pyfunction]
fn coefficients_closed_form(py: Python<'_>, n_max: usize) -> PyResult<Vec<BigInt>> {
    Ok(py
        .detach(|| tw::coefficients_closed_form(n_max))
        .map_err(err)?
        .0)
}

#[pyfunction]
fn asymptotic_estimate(n: u64) -> f64 {
    tw::asymptotic_estimate(n)
}

/// `c / estimate(n) - 1`.
#[pyfunction]
fn relative_error(c: BigInt, n: u64) -> f64 {
    tw::series::relative_error(&c, n)
}

/// Runs the cross-check and returns `(passed, report_json)`.
#[pyfunction]
#[pyo3(signature = (quick = true))]
fn verify(py: Python<'_>, quick: bool) -> (bool, String) {
    let opts = if quick {
        VerifyOptions::quick()
    } else {
        VerifyOptions::default()
    };
    let report = py.detach(|| cross_check(&opts));
    (report.passed(), report.to_json())
}

/// The deterministic pushdown automaton recognising canonical words.
#[pyclass(frozen, module = "twostack")]
struct Pda {
    inner: CorePda,
}

#[pymethods]
impl Pda {
    #[new]
    fn new() -> Self {
        Pda {
            inner: pda::build_m(),
        }
    }

    /// `word` must end with `$`.
    fn accepts(&self, word: &str) -> PyResult<bool> {
        pda::accepts(&self.inner, self::word(word)?.letters()).map_err(err)
    }

    /// `(state, stack)` pairs, stack top first.
    fn trace(&self, word: &str) -> PyResult<Vec<(u8, String)>> {
        let configs = pda::trace(&self.inner, self::word(word)?.letters()).map_err(err)?;
        Ok(configs
            .iter()
            .map(|c| (c.state, c.stack_string()))
            .collect())
    }

    fn count_accepted(&self, length: usize) -> u64 {
        pda::count_accepted(&self.inner, length)
    }

    fn is_deterministic(&self) -> bool {
        pda::is_deterministic(&self.inner)
    }

    fn to_json(&self) -> String {
        serde_json::to_string_pretty(&pda::export(&self.inner)).expect("serializable")
    }

    fn __len__(&self) -> usize {
        self.inner.transitions().len()
    }

    fn __repr__(&self) -> String {
        format!("Pda(transitions={})", self.inner.transitions().len())
    }
}

/// A context-free grammar over ρ, λ, μ, $.
#[pyclass(frozen, module = "twostack")]
struct Grammar {
    inner: CoreGrammar,
}

#[pymethods]
impl Grammar {
    /// The grammar of the automaton, reduced unless `raw`.
    #[staticmethod]
    #[pyo3(signature = (raw = false))]
    fn from_pda(raw: bool) -> PyResult<Self> {
        let g = grammar::pda_to_grammar(&pda::build_m()).map_err(err)?;
        let inner = if raw {
            g
        } else {
            grammar::reduce(&g).map_err(err)?
        };
        Ok(Grammar { inner })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Grammar {
            inner: grammar::from_json(text).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_bnf(text: &str) -> PyResult<Self> {
        Ok(Grammar {
            inner: grammar::from_bnf(text).map_err(err)?,
        })
    }

    /// Standard productive/reachable cleanup.
    fn trim(&self) -> PyResult<Self> {
        Ok(Grammar {
            inner: grammar::trim(&self.inner).map_err(err)?,
        })
    }

    #[pyo3(signature = (unicode = false))]
    fn to_bnf(&self, unicode: bool) -> String {
        grammar::to_bnf(&self.inner, unicode)
    }

    fn to_json(&self) -> String {
        grammar::to_json(&self.inner)
    }

    #[getter]
    fn start(&self) -> String {
        self.inner.start.to_string()
    }

    #[getter]
    fn nonterminal_count(&self) -> usize {
        self.inner.nonterminals().len()
    }

    #[getter]
    fn production_count(&self) -> usize {
        self.inner.productions().len()
    }

    /// Counts `c_0..=c_{n_max}` read off the start symbol's series.
    fn coefficients(&self, py: Python<'_>, n_max: usize) -> PyResult<Vec<BigInt>> {
        Ok(py
            .detach(|| tw::coefficients_from_grammar(&self.inner, n_max))
            .map_err(err)?
            .0)
    }

    fn __eq__(&self, other: &Grammar) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!(
            "Grammar(start={}, productions={})",
            self.inner.start,
            self.inner.productions().len()
        )
    }
}

#[pymodule]
#[pyo3(name = "twostack")]
fn twostack_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("TwoStackError", m.py().get_type::<TwoStackError>())?;
    m.add("PUBLISHED_COUNTS", tw::PUBLISHED_COUNTS.to_vec())?;
    m.add_class::<Pda>()?;
    m.add_class::<Grammar>()?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(run_trace, m)?)?;
    m.add_function(wrap_pyfunction!(run_reversed, m)?)?;
    m.add_function(wrap_pyfunction!(in_lk, m)?)?;
    m.add_function(wrap_pyfunction!(in_l, m)?)?;
    m.add_function(wrap_pyfunction!(mu_less, m)?)?;
    m.add_function(wrap_pyfunction!(find_violation, m)?)?;
    m.add_function(wrap_pyfunction!(canonicalize, m)?)?;
    m.add_function(wrap_pyfunction!(avoids, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_perms, m)?)?;
    m.add_function(wrap_pyfunction!(coefficients_closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(asymptotic_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(relative_error, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
