//! Truncated formal power series with exact rational coefficients, the
//! generating-function system of a grammar, and the closed form of the
//! counting sequence.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grammar::{Grammar, Nonterminal, Symbol};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("DivisionByZeroSeries")]
    DivisionByZeroSeries,
    #[error("SqrtBadConstantTerm")]
    SqrtBadConstantTerm,
    #[error("NoConvergence({0})")]
    NoConvergence(usize),
    #[error("StraySupport({0})")]
    StraySupport(usize),
    #[error("NonIntegerCoefficient({0})")]
    NonIntegerCoefficient(usize),
}

/// `Σ a_i x^i` known exactly for `i ≤ order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Series {
    coeffs: Vec<BigRational>,
}

impl Series {
    pub fn zero(order: usize) -> Series {
        Series {
            coeffs: vec![BigRational::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Series {
        Series::monomial(BigRational::one(), 0, order)
    }

    /// `c·x^degree`, truncated at `order`.
    pub fn monomial(c: BigRational, degree: usize, order: usize) -> Series {
        let mut s = Series::zero(order);
        if degree <= order {
            s.coeffs[degree] = c;
        }
        s
    }

    /// The variable `x` itself.
    pub fn x(order: usize) -> Series {
        Series::monomial(BigRational::one(), 1, order)
    }

    /// Pads with zeros or truncates to `order`.
    pub fn from_coeffs(coeffs: Vec<BigRational>, order: usize) -> Series {
        let mut coeffs = coeffs;
        coeffs.resize(order + 1, BigRational::zero());
        Series { coeffs }
    }

    pub fn from_integers<I: Into<BigInt>>(
        coeffs: impl IntoIterator<Item = I>,
        order: usize,
    ) -> Series {
        Series::from_coeffs(
            coeffs
                .into_iter()
                .map(|c| BigRational::from_integer(c.into()))
                .collect(),
            order,
        )
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// Index of the first nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn truncate(&self, order: usize) -> Series {
        Series::from_coeffs(
            self.coeffs[..=order.min(self.order())].to_vec(),
            order.min(self.order()),
        )
    }

    pub fn scale(&self, c: &BigRational) -> Series {
        Series {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn add(&self, other: &Series) -> Series {
        let order = self.order().min(other.order());
        Series {
            coeffs: (0..=order)
                .map(|i| &self.coeffs[i] + &other.coeffs[i])
                .collect(),
        }
    }

    pub fn sub(&self, other: &Series) -> Series {
        let order = self.order().min(other.order());
        Series {
            coeffs: (0..=order)
                .map(|i| &self.coeffs[i] - &other.coeffs[i])
                .collect(),
        }
    }

    pub fn mul(&self, other: &Series) -> Series {
        let order = self.order().min(other.order());
        let (a, da) = self.integer_form(order);
        let (b, db) = other.integer_form(order);
        let mut out = vec![BigInt::zero(); order + 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate().take(order + 1 - i) {
                if !y.is_zero() {
                    out[i + j] += x * y;
                }
            }
        }
        let d = da * db;
        Series {
            coeffs: out
                .into_iter()
                .map(|c| BigRational::new(c, d.clone()))
                .collect(),
        }
    }

    /// Integer numerators over a common denominator, through `order`.
    fn integer_form(&self, order: usize) -> (Vec<BigInt>, BigInt) {
        let head = &self.coeffs[..=order];
        let d = head.iter().fold(BigInt::one(), |d, c| d.lcm(c.denom()));
        let nums = head.iter().map(|c| c.numer() * (&d / c.denom())).collect();
        (nums, d)
    }

    /// Exact quotient. The divisor's valuation `v` must not exceed the
    /// dividend's; the result is known through `min(orders) - v`.
    pub fn div(&self, other: &Series) -> Result<Series, SeriesError> {
        let v = other.valuation().ok_or(SeriesError::DivisionByZeroSeries)?;
        if self.coeffs.iter().take(v).any(|c| !c.is_zero()) {
            return Err(SeriesError::DivisionByZeroSeries);
        }
        let order = self.order().min(other.order()) - v;
        let num = &self.coeffs[v..];
        let den = &other.coeffs[v..];
        let lead = &den[0];
        let mut q: Vec<BigRational> = Vec::with_capacity(order + 1);
        for n in 0..=order {
            let mut acc = num[n].clone();
            for i in 1..=n.min(den.len() - 1) {
                if !den[i].is_zero() {
                    acc -= &den[i] * &q[n - i];
                }
            }
            q.push(acc / lead);
        }
        Ok(Series { coeffs: q })
    }

    /// Square root with constant term 1, by Newton iteration
    /// `y ← (y + s / y) / 2`, doubling the number of correct terms each step.
    pub fn sqrt(&self) -> Result<Series, SeriesError> {
        if !self.coeffs[0].is_one() {
            return Err(SeriesError::SqrtBadConstantTerm);
        }
        let order = self.order();
        let half = BigRational::new(1.into(), 2.into());
        let mut y = Series::one(0);
        let mut known = 1;
        while known < order + 1 {
            known = (2 * known).min(order + 1);
            let target = self.truncate(known - 1);
            let y_ext = Series::from_coeffs(y.coeffs, known - 1);
            y = y_ext.add(&target.div(&y_ext)?).scale(&half);
        }
        Ok(Series::from_coeffs(y.coeffs, order))
    }

    /// Coefficients as integers, or the first index that is not one.
    pub fn to_integers(&self) -> Result<Vec<BigInt>, SeriesError> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if c.is_integer() {
                    Ok(c.to_integer())
                } else {
                    Err(SeriesError::NonIntegerCoefficient(i))
                }
            })
            .collect()
    }
}

impl Add for &Series {
    type Output = Series;
    fn add(self, rhs: &Series) -> Series {
        Series::add(self, rhs)
    }
}

impl Sub for &Series {
    type Output = Series;
    fn sub(self, rhs: &Series) -> Series {
        Series::sub(self, rhs)
    }
}

impl Mul for &Series {
    type Output = Series;
    fn mul(self, rhs: &Series) -> Series {
        Series::mul(self, rhs)
    }
}

impl Neg for &Series {
    type Output = Series;
    fn neg(self) -> Series {
        Series {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            match (i, a.is_one()) {
                (0, _) => write!(f, "{a}")?,
                (1, true) => f.write_str("x")?,
                (1, false) => write!(f, "{a}x")?,
                (_, true) => write!(f, "x^{i}")?,
                (_, false) => write!(f, "{a}x^{i}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        write!(f, " + O(x^{})", self.order() + 1)
    }
}

/// `c_0, c_1, …` as exact integers. Serialized as decimal strings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountSequence(pub Vec<BigInt>);

impl Serialize for CountSequence {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter().map(|c| c.to_string()))
    }
}

impl<'de> Deserialize<'de> for CountSequence {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|t| t.parse::<BigInt>().map_err(serde::de::Error::custom))
            .collect::<Result<_, _>>()
            .map(CountSequence)
    }
}

impl CountSequence {
    pub fn values(&self) -> &[BigInt] {
        &self.0
    }

    pub fn get(&self, n: usize) -> Option<&BigInt> {
        self.0.get(n)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `n,c_n` rows under that header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,c_n\n");
        for (n, c) in self.0.iter().enumerate() {
            out.push_str(&format!("{n},{c}\n"));
        }
        out
    }
}

/// One production as a monomial `x^terminals · Π f_nonterminal`.
struct Monomial {
    lhs: usize,
    degree: usize,
    factors: Vec<usize>,
}

/// Least solution of the system `f_A = Σ_{A → rhs} x^{#terminals} Π f_B`,
/// truncated at `order`.
///
/// Coefficients are settled one degree per sweep, each sweep re-evaluating
/// every right-hand side at that degree from the already settled lower
/// ones. When a production has no terminal the sweep repeats until the
/// degree is stable; a degree that fails to settle within `#nonterminals + 1`
/// rounds reports `NoConvergence`.
pub fn solve_system(
    g: &Grammar,
    order: usize,
) -> Result<BTreeMap<Nonterminal, Series>, SeriesError> {
    let names: Vec<Nonterminal> = g.nonterminals().into_iter().collect();
    let index: BTreeMap<Nonterminal, usize> =
        names.iter().enumerate().map(|(i, n)| (*n, i)).collect();
    let monomials: Vec<Monomial> = g
        .productions()
        .iter()
        .map(|p| Monomial {
            lhs: index[&p.lhs],
            degree: p
                .rhs
                .iter()
                .filter(|s| matches!(s, Symbol::Terminal(_)))
                .count(),
            factors: p.nonterminals().map(|n| index[&n]).collect(),
        })
        .collect();
    let needs_rounds = monomials.iter().any(|m| m.degree == 0);
    let max_rounds = if needs_rounds { names.len() + 1 } else { 1 };

    let mut coeffs: Vec<Vec<BigInt>> = vec![Vec::with_capacity(order + 1); names.len()];
    for d in 0..=order {
        for c in coeffs.iter_mut() {
            c.push(BigInt::zero());
        }
        let mut settled = false;
        for _ in 0..max_rounds {
            let mut next = vec![BigInt::zero(); names.len()];
            for m in &monomials {
                if m.degree <= d {
                    next[m.lhs] += product_coeff(&coeffs, &m.factors, d - m.degree);
                }
            }
            let changed = next.iter().zip(&coeffs).any(|(a, c)| *a != c[d]);
            for (c, a) in coeffs.iter_mut().zip(next) {
                c[d] = a;
            }
            if !changed || !needs_rounds {
                settled = true;
                break;
            }
        }
        if !settled {
            return Err(SeriesError::NoConvergence(order));
        }
    }

    Ok(names
        .into_iter()
        .zip(coeffs)
        .map(|(n, c)| (n, Series::from_integers(c, order)))
        .collect())
}

/// Coefficient of `x^d` in the product of the given series.
fn product_coeff(coeffs: &[Vec<BigInt>], factors: &[usize], d: usize) -> BigInt {
    match factors {
        [] => {
            if d == 0 {
                BigInt::one()
            } else {
                BigInt::zero()
            }
        }
        [a] => coeffs[*a][d].clone(),
        [a, b] => {
            let (a, b) = (&coeffs[*a], &coeffs[*b]);
            (0..=d)
                .filter(|&i| !a[i].is_zero() && !b[d - i].is_zero())
                .map(|i| &a[i] * &b[d - i])
                .sum()
        }
        [first, rest @ ..] => (0..=d)
            .filter(|&i| !coeffs[*first][i].is_zero())
            .map(|i| &coeffs[*first][i] * product_coeff(coeffs, rest, d - i))
            .sum(),
    }
}

/// `c_n` read off the start symbol's series: `c_n` is the coefficient of
/// `z^{3n+1}`, and every other coefficient must vanish.
pub fn coefficients_from_grammar(g: &Grammar, n_max: usize) -> Result<CountSequence, SeriesError> {
    let order = 3 * n_max + 1;
    let solution = solve_system(g, order)?;
    let f = &solution[&g.start];
    let mut out = Vec::with_capacity(n_max + 1);
    for (i, c) in f.coeffs().iter().enumerate() {
        if i % 3 == 1 {
            if !c.is_integer() {
                return Err(SeriesError::NonIntegerCoefficient(i));
            }
            out.push(c.to_integer());
        } else if !c.is_zero() {
            return Err(SeriesError::StraySupport(i));
        }
    }
    Ok(CountSequence(out))
}

/// `q(t) = (1 - 2t - √(1 - 4t)) / (2t)`, the shifted Catalan series.
pub fn catalan_q(order: usize) -> Result<Series, SeriesError> {
    let t = Series::x(order + 1);
    let one = Series::one(order + 1);
    let root = (&one - &t.scale(&rational(4))).sqrt()?;
    let numer = &(&one - &t.scale(&rational(2))) - &root;
    numer.div(&t.scale(&rational(2)))
}

fn rational(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Evaluates
/// `(1+q)(1 + 5q - q² - q³ - (1-q)√((1-q²)(1-4q-q²))) / (8q)`
/// exactly as a series in `t` and returns `c_0..=c_{n_max}`.
pub fn coefficients_closed_form(n_max: usize) -> Result<CountSequence, SeriesError> {
    // Dividing by 8q costs one term.
    let order = n_max + 1;
    let q = catalan_q(order)?;
    let one = Series::one(order);
    let q2 = &q * &q;
    let q3 = &q2 * &q;
    let poly = &(&(&one + &q.scale(&rational(5))) - &q2) - &q3;
    let radicand = &(&one - &q2) * &(&(&one - &q.scale(&rational(4))) - &q2);
    let root_term = &(&one - &q) * &radicand.sqrt()?;
    let numer = &(&one + &q) * &(&poly - &root_term);
    let gf = numer.div(&q.scale(&rational(8)))?;
    let values = gf.to_integers()?;
    Ok(CountSequence(values.into_iter().take(n_max + 1).collect()))
}

/// `√(25 - 11√5) / (2√(π n³)) · (2 + 2√5)^n`.
pub fn asymptotic_estimate(n: u64) -> f64 {
    ln_estimate(n).exp()
}

pub(crate) fn ln_estimate(n: u64) -> f64 {
    let s5 = 5f64.sqrt();
    let n = n as f64;
    0.5 * (25.0 - 11.0 * s5).ln() - 2f64.ln() - 0.5 * (std::f64::consts::PI * n.powi(3)).ln()
        + n * (2.0 + 2.0 * s5).ln()
}

/// `c / estimate(n) - 1`, taken in log space so neither side overflows.
pub fn relative_error(c: &BigInt, n: u64) -> f64 {
    (ln_bigint(c) - ln_estimate(n)).exp() - 1.0
}

fn ln_bigint(c: &BigInt) -> f64 {
    let shift = c.bits().saturating_sub(64);
    let top = (c >> shift).to_f64().unwrap_or(f64::NAN);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}
