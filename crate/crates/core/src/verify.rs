//! Runs every counting pipeline side by side and collects the results into
//! one report. Failures are recorded, never raised.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use serde::{Serialize, Serializer};

use crate::canonical::{canonicalize, in_l};
use crate::encoding::{avoids, for_each_in_lk, Depth, Letter, Permutation};
use crate::grammar::{pda_to_grammar, reduce};
use crate::machine::{enumerate_perms, run, run_reversed};
use crate::pda::{build_m, count_accepted};
use crate::series::{coefficients_closed_form, coefficients_from_grammar};
use crate::PUBLISHED_COUNTS;

/// Ranges for [`cross_check`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyOptions {
    pub brute_max: usize,
    pub pda_max: usize,
    pub series_max: usize,
    pub bijection_max: usize,
    pub catalan_max: usize,
    pub q_class_max: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            brute_max: 9,
            pda_max: 8,
            series_max: 50,
            bijection_max: 7,
            catalan_max: 7,
            q_class_max: 6,
        }
    }
}

impl VerifyOptions {
    /// A run of a few seconds.
    pub fn quick() -> Self {
        VerifyOptions {
            brute_max: 7,
            pda_max: 6,
            series_max: 15,
            bijection_max: 5,
            catalan_max: 6,
            q_class_max: 5,
        }
    }
}

fn decimal<S: Serializer>(v: &Option<BigInt>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(c) => s.serialize_some(&c.to_string()),
        None => s.serialize_none(),
    }
}

/// One `n` across all pipelines. A missing count means `n` is outside that
/// pipeline's range.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CountRow {
    pub n: usize,
    pub published: Option<u64>,
    pub brute_force_count: Option<u64>,
    pub pda_count: Option<u64>,
    #[serde(serialize_with = "decimal")]
    pub grammar_count: Option<BigInt>,
    #[serde(serialize_with = "decimal")]
    pub closed_form_count: Option<BigInt>,
    pub all_equal: bool,
}

/// Outcome of [`bijection_stats`] for one length.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BijectionStats {
    pub n: usize,
    /// Words of `L` of length `3n`.
    pub words_in_l: usize,
    /// Distinct permutations those words generate.
    pub distinct_images: usize,
    /// `|enumerate_perms(n, 2)|`.
    pub generated: usize,
    /// Image equals the generated class.
    pub onto: bool,
    /// Every `L(2,∞)` word canonicalizes into `L` with the same permutation.
    pub canonical_ok: bool,
}

impl BijectionStats {
    pub fn holds(&self) -> bool {
        self.words_in_l == self.distinct_images && self.onto && self.canonical_ok
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StageTiming {
    pub stage: String,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub options: VerifyOptions,
    pub rows: Vec<CountRow>,
    pub bijection: Vec<BijectionStats>,
    /// Largest `n` such that the bijection holds for every length up to it.
    pub bijection_checked_up_to: Option<usize>,
    pub catalan_check: bool,
    pub q_class_check: bool,
    /// Pipeline errors, if any.
    pub errors: Vec<String>,
    /// Wall-clock time per stage. Not part of the serialized report.
    #[serde(skip)]
    pub timings: Vec<StageTiming>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.errors.is_empty()
            && self.rows.iter().all(|r| r.all_equal)
            && self.bijection.iter().all(BijectionStats::holds)
            && self.catalan_check
            && self.q_class_check
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Fixed-width table followed by the side checks.
    pub fn to_text(&self) -> String {
        fn cell<T: ToString>(v: &Option<T>) -> String {
            v.as_ref().map_or_else(|| "-".to_string(), T::to_string)
        }
        let wide = self
            .rows
            .iter()
            .flat_map(|r| [&r.grammar_count, &r.closed_form_count])
            .map(|c| cell(c).len())
            .max()
            .unwrap_or(0)
            .max(7);
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:>3}  {:>10}  {:>10}  {:>10}  {:>wide$}  {:>wide$}  ok",
            "n", "published", "brute", "pda", "grammar", "closed"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:>3}  {:>10}  {:>10}  {:>10}  {:>wide$}  {:>wide$}  {}",
                r.n,
                cell(&r.published),
                cell(&r.brute_force_count),
                cell(&r.pda_count),
                cell(&r.grammar_count),
                cell(&r.closed_form_count),
                if r.all_equal { "yes" } else { "NO" }
            );
        }
        out.push('\n');
        for b in &self.bijection {
            let _ = writeln!(
                out,
                "bijection n={}: {} words in L, {} images, {} generated, canonicalize {}: {}",
                b.n,
                b.words_in_l,
                b.distinct_images,
                b.generated,
                if b.canonical_ok { "ok" } else { "broken" },
                pass(b.holds())
            );
        }
        let _ = writeln!(
            out,
            "bijection checked up to n={}",
            cell(&self.bijection_checked_up_to)
        );
        let _ = writeln!(
            out,
            "depth-1 class is Av(312), Catalan counts, n <= {}: {}",
            self.options.catalan_max,
            pass(self.catalan_check)
        );
        let _ = writeln!(
            out,
            "reversed-order class counts, n <= {}: {}",
            self.options.q_class_max,
            pass(self.q_class_check)
        );
        for e in &self.errors {
            let _ = writeln!(out, "error: {e}");
        }
        let _ = writeln!(out, "overall: {}", pass(self.passed()));
        out
    }
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn timed<T>(timings: &mut Vec<StageTiming>, stage: &str, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let out = f();
    timings.push(StageTiming {
        stage: stage.to_string(),
        seconds: secs(start.elapsed()),
    });
    out
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

/// Computes every count on its range and compares them with each other and
/// with the published values for `n ≤ 12`.
pub fn cross_check(opts: &VerifyOptions) -> VerifyReport {
    let mut timings = Vec::new();
    let mut errors = Vec::new();

    let brute: Vec<u64> = timed(&mut timings, "brute force", || {
        (0..=opts.brute_max)
            .map(|n| enumerate_perms(n, 2).len() as u64)
            .collect()
    });
    let pda: Vec<u64> = timed(&mut timings, "pda", || {
        let m = build_m();
        (0..=opts.pda_max)
            .map(|n| count_accepted(&m, 3 * n + 1))
            .collect()
    });
    let grammar: Vec<BigInt> = timed(&mut timings, "grammar", || {
        let m = build_m();
        let seq = pda_to_grammar(&m)
            .and_then(|g| reduce(&g))
            .map_err(|e| e.to_string())
            .and_then(|g| {
                coefficients_from_grammar(&g, opts.series_max).map_err(|e| e.to_string())
            });
        match seq {
            Ok(s) => s.0,
            Err(e) => {
                errors.push(format!("grammar: {e}"));
                Vec::new()
            }
        }
    });
    let closed: Vec<BigInt> = timed(
        &mut timings,
        "closed form",
        || match coefficients_closed_form(opts.series_max) {
            Ok(s) => s.0,
            Err(e) => {
                errors.push(format!("closed form: {e}"));
                Vec::new()
            }
        },
    );

    let top = opts
        .brute_max
        .max(opts.pda_max)
        .max(opts.series_max)
        .max(PUBLISHED_COUNTS.len() - 1);
    let rows = (0..=top)
        .map(|n| {
            let row = CountRow {
                n,
                published: PUBLISHED_COUNTS.get(n).copied(),
                brute_force_count: brute.get(n).copied(),
                pda_count: pda.get(n).copied(),
                grammar_count: grammar.get(n).cloned(),
                closed_form_count: closed.get(n).cloned(),
                all_equal: false,
            };
            let expected_present = [
                (n <= opts.brute_max, row.brute_force_count.is_some()),
                (n <= opts.pda_max, row.pda_count.is_some()),
                (n <= opts.series_max, row.grammar_count.is_some()),
                (n <= opts.series_max, row.closed_form_count.is_some()),
            ]
            .iter()
            .all(|&(want, have)| !want || have);
            let values: BTreeSet<BigInt> = row
                .published
                .iter()
                .chain(&row.brute_force_count)
                .chain(&row.pda_count)
                .map(|&c| BigInt::from(c))
                .chain(row.grammar_count.iter().cloned())
                .chain(row.closed_form_count.iter().cloned())
                .collect();
            CountRow {
                all_equal: expected_present && values.len() == 1,
                ..row
            }
        })
        .collect();

    let bijection: Vec<BijectionStats> = timed(&mut timings, "bijection", || {
        (0..=opts.bijection_max).map(bijection_stats).collect()
    });
    let bijection_checked_up_to = bijection
        .iter()
        .take_while(|b| b.holds())
        .last()
        .map(|b| b.n);
    let catalan_check = timed(&mut timings, "catalan", || catalan_check(opts.catalan_max));
    let q_class_check = timed(&mut timings, "reversed class", || {
        q_class_check(opts.q_class_max)
    });

    VerifyReport {
        options: opts.clone(),
        rows,
        bijection,
        bijection_checked_up_to,
        catalan_check,
        q_class_check,
        errors,
        timings,
    }
}

/// Runs every word of `L(2,∞)` of length `3n`: words of `L` must generate
/// distinct permutations covering `enumerate_perms(n, 2)`, and canonicalizing
/// any word must land in `L` without changing its permutation.
pub fn bijection_stats(n: usize) -> BijectionStats {
    let mut images: HashMap<Permutation, usize> = HashMap::new();
    let mut words_in_l = 0;
    let mut canonical_ok = true;
    for_each_in_lk(3 * n, Depth::Bounded(2), |w| {
        let Ok(p) = run(w, 2, None) else {
            canonical_ok = false;
            return;
        };
        if in_l(w) {
            words_in_l += 1;
            *images.entry(p.clone()).or_default() += 1;
        }
        match canonicalize(w) {
            Ok(c) => {
                if !in_l(c.letters()) || run(c.letters(), 2, None).as_ref() != Ok(&p) {
                    canonical_ok = false;
                }
            }
            Err(_) => canonical_ok = false,
        }
    });
    let generated = enumerate_perms(n, 2);
    let onto = images.len() == generated.len() && generated.iter().all(|p| images.contains_key(p));
    BijectionStats {
        n,
        words_in_l,
        distinct_images: images.len(),
        generated: generated.len(),
        onto,
        canonical_ok,
    }
}

/// The run map is a bijection from words of `L` of length `3n` onto the
/// generated permutations of length `n`.
pub fn bijection_check(n: usize) -> bool {
    bijection_stats(n).holds()
}

/// `binom(2n, n) / (n + 1)`.
pub fn catalan(n: usize) -> u64 {
    (0..n as u64).fold(1, |c, i| c * 2 * (2 * i + 1) / (i + 2))
}

/// For `n ≤ n_max` the depth-1 machine generates exactly the 312-avoiders,
/// and there are `Catalan(n)` of them.
pub fn catalan_check(n_max: usize) -> bool {
    let pattern = Permutation::new(vec![3, 1, 2]).expect("valid pattern");
    (0..=n_max).all(|n| {
        let generated = enumerate_perms(n, 1);
        let avoiders: BTreeSet<Permutation> = Permutation::all(n)
            .into_iter()
            .filter(|p| avoids(p, &pattern))
            .collect();
        generated.len() as u64 == catalan(n) && generated == avoiders
    })
}

/// For `n ≤ n_max` (at most 12), reading words of `L(2,∞)` right to left
/// yields exactly `c_n` distinct permutations.
pub fn q_class_check(n_max: usize) -> bool {
    if n_max >= PUBLISHED_COUNTS.len() {
        return false;
    }
    (0..=n_max).all(|n| {
        let expected = PUBLISHED_COUNTS[n];
        let mut image = BTreeSet::new();
        let mut ok = true;
        for_each_in_lk(3 * n, Depth::Bounded(2), |w| match run_reversed(w) {
            Ok(p) => {
                image.insert(p);
            }
            Err(_) => ok = false,
        });
        ok && image.len() as u64 == expected
    })
}

/// The Catalan and reversed-class checks at their default ranges.
pub fn side_checks() -> bool {
    let d = VerifyOptions::default();
    catalan_check(d.catalan_max) && q_class_check(d.q_class_max)
}

/// Words of `L` of length `3n`, each with `$` appended, for tracing.
pub fn words_of_l(n: usize) -> Vec<Vec<Letter>> {
    let mut out = Vec::new();
    for_each_in_lk(3 * n, Depth::Bounded(2), |w| {
        if in_l(w) {
            let mut v = w.to_vec();
            v.push(Letter::Dollar);
            out.push(v);
        }
    });
    out
}
