//! Pushdown automaton to context-free grammar via the triple construction,
//! pruning, and BNF/JSON export.
//!
//! The nonterminal `N(i, j, k)` derives the input consumed while the
//! automaton goes from state `i` with `j` on top of the stack to state `k`
//! with that `j` popped.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::encoding::Letter;
use crate::pda::{Pda, StackSymbol, State};

/// `Start` serializes as `"S"`, triples as `{"i": .., "j": .., "k": ..}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "NonterminalRepr", try_from = "NonterminalRepr")]
pub enum Nonterminal {
    Start,
    Triple { i: State, j: StackSymbol, k: State },
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum NonterminalRepr {
    Tag(String),
    Triple { i: State, j: StackSymbol, k: State },
}

impl From<Nonterminal> for NonterminalRepr {
    fn from(n: Nonterminal) -> Self {
        match n {
            Nonterminal::Start => NonterminalRepr::Tag("S".into()),
            Nonterminal::Triple { i, j, k } => NonterminalRepr::Triple { i, j, k },
        }
    }
}

impl TryFrom<NonterminalRepr> for Nonterminal {
    type Error = String;

    fn try_from(r: NonterminalRepr) -> Result<Self, String> {
        match r {
            NonterminalRepr::Tag(t) if t == "S" => Ok(Nonterminal::Start),
            NonterminalRepr::Tag(t) => Err(format!("unknown nonterminal {t:?}")),
            NonterminalRepr::Triple { i, j, k } => Ok(Nonterminal::Triple { i, j, k }),
        }
    }
}

impl Nonterminal {
    pub fn triple(i: State, j: StackSymbol, k: State) -> Nonterminal {
        Nonterminal::Triple { i, j, k }
    }
}

impl fmt::Display for Nonterminal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Nonterminal::Start => f.write_str("S"),
            Nonterminal::Triple { i, j, k } => write!(f, "N{i}{j}{k}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Symbol {
    Terminal(Letter),
    Nonterminal(Nonterminal),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Production {
    pub lhs: Nonterminal,
    pub rhs: Vec<Symbol>,
}

impl Production {
    pub fn nonterminals(&self) -> impl Iterator<Item = Nonterminal> + '_ {
        self.rhs.iter().filter_map(|s| match s {
            Symbol::Nonterminal(n) => Some(*n),
            Symbol::Terminal(_) => None,
        })
    }

    pub fn terminals_only(&self) -> bool {
        self.rhs.iter().all(|s| matches!(s, Symbol::Terminal(_)))
    }
}

/// Productions are kept sorted and free of duplicates: by left side, then
/// shorter right sides first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grammar {
    pub start: Nonterminal,
    productions: Vec<Production>,
}

impl Grammar {
    pub fn new(start: Nonterminal, productions: impl IntoIterator<Item = Production>) -> Grammar {
        let set: BTreeSet<Production> = productions.into_iter().collect();
        let mut productions: Vec<Production> = set.into_iter().collect();
        productions.sort_by(|a, b| (a.lhs, a.rhs.len(), &a.rhs).cmp(&(b.lhs, b.rhs.len(), &b.rhs)));
        Grammar { start, productions }
    }

    pub fn productions(&self) -> &[Production] {
        &self.productions
    }

    /// Every nonterminal mentioned anywhere, plus the start symbol.
    pub fn nonterminals(&self) -> BTreeSet<Nonterminal> {
        let mut out = BTreeSet::from([self.start]);
        for p in &self.productions {
            out.insert(p.lhs);
            out.extend(p.nonterminals());
        }
        out
    }

    /// Nonterminals with at least one production.
    pub fn left_sides(&self) -> BTreeSet<Nonterminal> {
        self.productions.iter().map(|p| p.lhs).collect()
    }

    /// Productions grouped by left side, in order.
    pub fn grouped(&self) -> BTreeMap<Nonterminal, Vec<&Production>> {
        let mut out: BTreeMap<Nonterminal, Vec<&Production>> = BTreeMap::new();
        for p in &self.productions {
            out.entry(p.lhs).or_default().push(p);
        }
        out
    }

    /// Nonterminals that derive some terminal string.
    pub fn productive(&self) -> BTreeSet<Nonterminal> {
        let mut done = BTreeSet::new();
        loop {
            let before = done.len();
            for p in &self.productions {
                if !done.contains(&p.lhs) && p.nonterminals().all(|n| done.contains(&n)) {
                    done.insert(p.lhs);
                }
            }
            if done.len() == before {
                return done;
            }
        }
    }

    /// Nonterminals reachable from the start symbol.
    pub fn reachable(&self) -> BTreeSet<Nonterminal> {
        let groups = self.grouped();
        let mut seen = BTreeSet::from([self.start]);
        let mut todo = vec![self.start];
        while let Some(n) = todo.pop() {
            for p in groups.get(&n).into_iter().flatten() {
                for m in p.nonterminals() {
                    if seen.insert(m) {
                        todo.push(m);
                    }
                }
            }
        }
        seen
    }

    fn retain(&self, start: Nonterminal, keep: impl Fn(&Nonterminal) -> bool) -> Grammar {
        Grammar::new(
            start,
            self.productions
                .iter()
                .filter(|p| keep(&p.lhs) && p.nonterminals().all(|n| keep(&n)))
                .cloned(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrammarError {
    #[error("UnsupportedPushLength: transition pushes {0} symbols")]
    UnsupportedPushLength(usize),
    #[error("EmptyLanguage: the start symbol derives no terminal string")]
    EmptyLanguage,
    #[error("malformed grammar document: {0}")]
    Parse(String),
}

/// Triple construction for an automaton accepting on empty stack:
///
/// * `S → N(q₀, Z, i)` for every state `i`;
/// * a pop `δ(i, a, j) = (k, ε)` gives `N(i,j,k) → a`;
/// * a keep `δ(i, a, j) = (k, l)` gives `N(i,j,x) → a N(k,l,x)` for all `x`;
/// * a push `δ(i, a, j) = (k, lm)` gives `N(i,j,x) → a N(k,l,y) N(y,m,x)`
///   for all `x, y`.
pub fn pda_to_grammar(m: &Pda) -> Result<Grammar, GrammarError> {
    let mut prods = Vec::new();
    for i in m.states() {
        prods.push(Production {
            lhs: Nonterminal::Start,
            rhs: vec![Symbol::Nonterminal(Nonterminal::triple(
                m.start_state,
                m.start_stack,
                i,
            ))],
        });
    }
    for t in m.transitions() {
        let prefix: Vec<Symbol> = t.letter.map(Symbol::Terminal).into_iter().collect();
        let nt = |i, j, k| Symbol::Nonterminal(Nonterminal::triple(i, j, k));
        match t.push.as_slice() {
            [] => prods.push(Production {
                lhs: Nonterminal::triple(t.from, t.pop, t.to),
                rhs: prefix,
            }),
            &[l] => {
                for x in m.states() {
                    let mut rhs = prefix.clone();
                    rhs.push(nt(t.to, l, x));
                    prods.push(Production {
                        lhs: Nonterminal::triple(t.from, t.pop, x),
                        rhs,
                    });
                }
            }
            &[l, below] => {
                for x in m.states() {
                    for y in m.states() {
                        let mut rhs = prefix.clone();
                        rhs.push(nt(t.to, l, y));
                        rhs.push(nt(y, below, x));
                        prods.push(Production {
                            lhs: Nonterminal::triple(t.from, t.pop, x),
                            rhs,
                        });
                    }
                }
            }
            longer => return Err(GrammarError::UnsupportedPushLength(longer.len())),
        }
    }
    Ok(Grammar::new(Nonterminal::Start, prods))
}

/// Structural pruning of a triple-construction grammar:
///
/// 1. the start symbol is replaced by `N(q₀, Z, k)` when exactly one state
///    `k` is the target of a terminal rule popping the bottom symbol `Z`,
///    and `S` is dropped;
/// 2. triples whose final state is never the target of a terminal rule are
///    removed, since the final index passes unchanged to the last
///    nonterminal of every right side;
/// 3. nonterminals left without productions are removed together with every
///    production mentioning them, until nothing changes.
///
/// This does not remove productive-but-unreachable nonterminals, nor cycles
/// of nonterminals that only rewrite into each other; [`trim`] does.
pub fn reduce(g: &Grammar) -> Result<Grammar, GrammarError> {
    if !g.productive().contains(&g.start) {
        return Err(GrammarError::EmptyLanguage);
    }

    let mut start = g.start;
    let mut prods: Vec<Production> = g.productions.clone();
    if g.start == Nonterminal::Start {
        let bottom: BTreeSet<(State, StackSymbol)> = prods
            .iter()
            .filter(|p| p.lhs == Nonterminal::Start)
            .filter_map(|p| match p.rhs.as_slice() {
                [Symbol::Nonterminal(Nonterminal::Triple { i, j, .. })] => Some((*i, *j)),
                _ => None,
            })
            .collect();
        let targets: BTreeSet<Nonterminal> = prods
            .iter()
            .filter(|p| p.terminals_only())
            .filter(|p| match p.lhs {
                Nonterminal::Triple { i, j, .. } => bottom.contains(&(i, j)),
                Nonterminal::Start => false,
            })
            .map(|p| p.lhs)
            .collect();
        if let [only] = targets.into_iter().collect::<Vec<_>>().as_slice() {
            start = *only;
            prods.retain(|p| {
                p.lhs != Nonterminal::Start && p.nonterminals().all(|n| n != Nonterminal::Start)
            });
        }
    }

    let sinks: BTreeSet<State> = prods
        .iter()
        .filter(|p| p.terminals_only())
        .filter_map(|p| match p.lhs {
            Nonterminal::Triple { k, .. } => Some(k),
            Nonterminal::Start => None,
        })
        .collect();
    let ends_in_sink = |n: &Nonterminal| match n {
        Nonterminal::Triple { k, .. } => sinks.contains(k),
        Nonterminal::Start => true,
    };
    prods.retain(|p| ends_in_sink(&p.lhs) && p.nonterminals().all(|n| ends_in_sink(&n)));

    loop {
        let defined: BTreeSet<Nonterminal> = prods.iter().map(|p| p.lhs).collect();
        let before = prods.len();
        prods.retain(|p| p.nonterminals().all(|n| defined.contains(&n)));
        if prods.len() == before {
            break;
        }
    }
    Ok(Grammar::new(start, prods))
}

/// Standard cleanup: keep productive nonterminals, then those reachable from
/// the start symbol.
pub fn trim(g: &Grammar) -> Result<Grammar, GrammarError> {
    let productive = g.productive();
    if !productive.contains(&g.start) {
        return Err(GrammarError::EmptyLanguage);
    }
    let useful = g.retain(g.start, |n| productive.contains(n));
    let reachable = useful.reachable();
    Ok(useful.retain(g.start, |n| reachable.contains(n)))
}

/// Renders productions grouped by left side, e.g. `N000 -> $ | r N100`.
pub fn to_bnf(g: &Grammar, unicode: bool) -> String {
    let mut out = String::new();
    for (lhs, prods) in g.grouped() {
        let alts: Vec<String> = prods
            .iter()
            .map(|p| {
                p.rhs
                    .iter()
                    .map(|s| match s {
                        Symbol::Terminal(l) if unicode => l.unicode().to_string(),
                        Symbol::Terminal(l) => l.ascii().to_string(),
                        Symbol::Nonterminal(n) => n.to_string(),
                    })
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect();
        out.push_str(&format!("{lhs} -> {}\n", alts.join(" | ")));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrammarDocument {
    pub start: Nonterminal,
    pub nonterminals: Vec<Nonterminal>,
    pub productions: Vec<Production>,
}

pub fn to_document(g: &Grammar) -> GrammarDocument {
    GrammarDocument {
        start: g.start,
        nonterminals: g.nonterminals().into_iter().collect(),
        productions: g.productions.clone(),
    }
}

pub fn to_json(g: &Grammar) -> String {
    serde_json::to_string_pretty(&to_document(g)).expect("grammar serializes")
}

pub fn from_json(text: &str) -> Result<Grammar, GrammarError> {
    let doc: GrammarDocument =
        serde_json::from_str(text).map_err(|e| GrammarError::Parse(e.to_string()))?;
    Ok(Grammar::new(doc.start, doc.productions))
}

/// Parses the BNF produced by [`to_bnf`] (ASCII or Unicode terminals).
pub fn from_bnf(text: &str) -> Result<Grammar, GrammarError> {
    let parse_nt = |tok: &str| -> Result<Nonterminal, GrammarError> {
        if tok == "S" {
            return Ok(Nonterminal::Start);
        }
        let digits: Vec<u8> = tok
            .strip_prefix('N')
            .filter(|d| d.len() == 3)
            .map(|d| d.bytes().map(|b| b.wrapping_sub(b'0')).collect())
            .ok_or_else(|| GrammarError::Parse(format!("bad nonterminal {tok:?}")))?;
        if digits.iter().any(|&d| d > 9) {
            return Err(GrammarError::Parse(format!("bad nonterminal {tok:?}")));
        }
        Ok(Nonterminal::triple(digits[0], digits[1], digits[2]))
    };
    let mut start = None;
    let mut prods = Vec::new();
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
        let (lhs, rhs) = line
            .split_once("->")
            .ok_or_else(|| GrammarError::Parse(format!("missing `->` in {line:?}")))?;
        let lhs = parse_nt(lhs.trim())?;
        start.get_or_insert(lhs);
        for alt in rhs.trim().trim_end_matches([',', '.']).split('|') {
            let mut syms = Vec::new();
            for tok in alt.split_whitespace() {
                let mut chars = tok.chars();
                let sym = match (chars.next().and_then(Letter::from_char), chars.next()) {
                    (Some(l), None) => Symbol::Terminal(l),
                    _ => Symbol::Nonterminal(parse_nt(tok)?),
                };
                syms.push(sym);
            }
            prods.push(Production { lhs, rhs: syms });
        }
    }
    let start = start.unwrap_or(Nonterminal::Start);
    Ok(Grammar::new(start, prods))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pda::build_m;

    fn raw() -> Grammar {
        pda_to_grammar(&build_m()).unwrap()
    }

    fn nt(i: u8, j: u8, k: u8) -> Symbol {
        Symbol::Nonterminal(Nonterminal::triple(i, j, k))
    }

    #[test]
    fn construction_shape() {
        let g = raw();
        assert_eq!(g.nonterminals().len(), 9 * 3 * 9 + 1);
        assert!(g.productions().contains(&Production {
            lhs: Nonterminal::triple(0, 0, 0),
            rhs: vec![Symbol::Terminal(Letter::Dollar)],
        }));
        for x in 0..9 {
            for y in 0..9 {
                assert!(g.productions().contains(&Production {
                    lhs: Nonterminal::triple(8, 1, x),
                    rhs: vec![Symbol::Terminal(Letter::Lambda), nt(5, 2, y), nt(y, 1, x)],
                }));
            }
        }
        // 9 start rules, 8 pops, 14 keeps × 9, 14 pushes × 81.
        assert_eq!(g.productions().len(), 9 + 8 + 14 * 9 + 14 * 81);
    }

    #[test]
    fn long_push_rejected() {
        let mut m = build_m();
        m.add(crate::pda::Transition {
            from: 7,
            letter: Some(Letter::Mu),
            pop: 1,
            to: 7,
            push: vec![1, 1, 1],
        });
        assert_eq!(
            pda_to_grammar(&m),
            Err(GrammarError::UnsupportedPushLength(3))
        );
    }

    #[test]
    fn reduction_properties() {
        let g = reduce(&raw()).unwrap();
        assert_eq!(g.start, Nonterminal::triple(0, 0, 0));
        assert_eq!(g.left_sides().len(), 57);
        for n in g.nonterminals() {
            match n {
                Nonterminal::Triple { k, .. } => assert!([0, 4, 5].contains(&k), "{n}"),
                Nonterminal::Start => panic!("start symbol survived"),
            }
        }
        for k in [0, 4, 5] {
            assert!(!g.nonterminals().contains(&Nonterminal::triple(5, 0, k)));
        }
        let bnf = to_bnf(&g, false);
        assert!(bnf.lines().any(|l| l == "N000 -> $ | r N100"), "{bnf}");
    }

    #[test]
    fn trim_drops_dead_cycles() {
        let reduced = reduce(&raw()).unwrap();
        let trimmed = trim(&reduced).unwrap();
        let dead: BTreeSet<Nonterminal> = reduced
            .left_sides()
            .difference(&trimmed.left_sides())
            .copied()
            .collect();
        // Bottom-of-stack triples ending away from q0 never terminate, and
        // neither does any N(i,1,5): its right sides always carry another one.
        for i in [0, 1, 2, 4] {
            for k in [4, 5] {
                assert!(dead.contains(&Nonterminal::triple(i, 0, k)));
            }
        }
        for i in [0, 1, 2, 3, 4, 5, 6, 7, 8] {
            assert!(dead.contains(&Nonterminal::triple(i, 1, 5)));
        }
        assert!(dead
            .iter()
            .all(|n| matches!(n, Nonterminal::Triple { k: 4 | 5, .. })));
        assert_eq!(trimmed.left_sides().len(), 36);

        // Trimming the raw grammar keeps `S -> N000` on top of the same core.
        let from_raw = trim(&raw()).unwrap();
        assert_eq!(from_raw.start, Nonterminal::Start);
        let mut sides = from_raw.left_sides();
        assert!(sides.remove(&Nonterminal::Start));
        assert_eq!(sides, trimmed.left_sides());
    }

    #[test]
    fn empty_language() {
        let g = Grammar::new(
            Nonterminal::triple(0, 0, 0),
            [Production {
                lhs: Nonterminal::triple(0, 0, 0),
                rhs: vec![Symbol::Terminal(Letter::Rho), nt(0, 0, 0)],
            }],
        );
        assert_eq!(reduce(&g), Err(GrammarError::EmptyLanguage));
        assert_eq!(trim(&g), Err(GrammarError::EmptyLanguage));
    }

    #[test]
    fn documents() {
        let g = reduce(&raw()).unwrap();
        assert_eq!(from_json(&to_json(&g)).unwrap(), g);
        assert_eq!(from_bnf(&to_bnf(&g, false)).unwrap(), g);
        assert_eq!(from_bnf(&to_bnf(&g, true)).unwrap(), g);
        let r = raw();
        assert_eq!(from_json(&to_json(&r)).unwrap(), r);

        let empty = Grammar::new(Nonterminal::Start, []);
        let doc = to_document(&empty);
        assert!(doc.productions.is_empty());
        assert_eq!(from_json(&to_json(&empty)).unwrap(), empty);

        let json: serde_json::Value = serde_json::from_str(&to_json(&g)).unwrap();
        assert_eq!(json["start"], serde_json::json!({"i": 0, "j": 0, "k": 0}));
        assert_eq!(
            json["productions"][0]["rhs"][0],
            serde_json::json!({"terminal": "$"})
        );
    }
}
