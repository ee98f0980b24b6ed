//! Line-oriented text formats for automata, semigroups with recognizers, and formula lists.
//!
//! Every file starts with `costltl-format 1`. Blank lines and lines starting with `#` are
//! skipped. Each other line is a keyword followed by space-separated fields.
//!
//! ```text
//! costltl-format 1
//! kind S
//! alphabet ab
//! states q f
//! initial q
//! final f
//! counters 1
//! transition q a q | i
//! transition q b f | cr
//! ```
//!
//! A transition carries one `|`-separated token sequence per counter; `e` is the empty one.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::actions::{render_seq, Act};
use crate::automata::{CostAutomaton, Polarity};
use crate::error::{Error, Result};
use crate::semigroup::{Recognizer, StabSemigroup};
use crate::word::Alphabet;

pub const HEADER: &str = "costltl-format 1";

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Format { line, msg: msg.into() }
}

/// `(line number, keyword, rest)` for each content line after the header.
fn content_lines(text: &str) -> Result<Vec<(usize, &str, &str)>> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let header = lines.find(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    match header {
        Some((_, HEADER)) => {}
        Some((n, l)) => return Err(err(n, format!("expected header {HEADER:?}, found {l:?}"))),
        None => return Err(err(1, "empty file")),
    }
    Ok(lines
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .map(|(n, l)| match l.split_once(char::is_whitespace) {
            Some((k, rest)) => (n, k, rest.trim()),
            None => (n, l, ""),
        })
        .collect())
}

fn once<'a>(slot: &mut Option<(usize, &'a str)>, n: usize, key: &str, rest: &'a str) -> Result<()> {
    if slot.is_some() {
        return Err(err(n, format!("duplicate {key} line")));
    }
    *slot = Some((n, rest));
    Ok(())
}

fn required<'a>(slot: Option<(usize, &'a str)>, key: &str) -> Result<(usize, &'a str)> {
    slot.ok_or_else(|| err(0, format!("missing {key} line")))
}

fn words(s: &str) -> Vec<&str> {
    s.split_whitespace().collect()
}

pub fn parse_automaton(text: &str) -> Result<CostAutomaton> {
    let mut slots: BTreeMap<&str, Option<(usize, &str)>> =
        ["kind", "alphabet", "states", "initial", "final", "counters"].iter().map(|&k| (k, None)).collect();
    let mut transitions = Vec::new();
    for (n, key, rest) in content_lines(text)? {
        if key == "transition" {
            transitions.push((n, rest));
            continue;
        }
        match slots.get_mut(key) {
            Some(slot) => once(slot, n, key, rest)?,
            None => return Err(err(n, format!("unknown keyword {key:?}"))),
        }
    }
    let (n, kind) = required(slots["kind"], "kind")?;
    let polarity = match kind {
        "B" => Polarity::B,
        "S" => Polarity::S,
        k => return Err(err(n, format!("kind must be B or S, found {k:?}"))),
    };
    let (n, letters) = required(slots["alphabet"], "alphabet")?;
    let alphabet = Alphabet::new(letters).map_err(|e| err(n, e.to_string()))?;
    let (n, counters) = required(slots["counters"], "counters")?;
    let counters: usize = counters.parse().map_err(|_| err(n, format!("bad counter count {counters:?}")))?;
    let mut aut = CostAutomaton::new(polarity, &alphabet, counters);
    let (n, states) = required(slots["states"], "states")?;
    for s in words(states) {
        if aut.state_index(s).is_some() {
            return Err(err(n, format!("duplicate state {s}")));
        }
        aut.add_state(s);
    }
    let lookup = |aut: &CostAutomaton, n: usize, s: &str| {
        aut.state_index(s).ok_or_else(|| err(n, format!("undeclared state {s}")))
    };
    let (n, initial) = required(slots["initial"], "initial")?;
    for s in words(initial) {
        let q = lookup(&aut, n, s)?;
        aut.initial.insert(q);
    }
    let (n, finals) = required(slots["final"], "final")?;
    for s in words(finals) {
        let q = lookup(&aut, n, s)?;
        aut.finals.insert(q);
    }
    for (n, rest) in transitions {
        let mut parts = rest.split('|');
        let head = words(parts.next().unwrap_or(""));
        let [from, letter, to] = head[..] else {
            return Err(err(n, "expected: transition <from> <letter> <to> | <actions> ..."));
        };
        let mut chars = letter.chars();
        let (Some(c), None) = (chars.next(), chars.next()) else {
            return Err(err(n, format!("letter {letter:?} is not one character")));
        };
        if !alphabet.contains(c) {
            return Err(err(n, format!("letter '{c}' is not in the alphabet")));
        }
        let seqs: Vec<Vec<Act>> = parts
            .map(|p| words(p).into_iter().map(|t| Act::parse(t).map_err(|e| err(n, e.to_string()))).collect())
            .collect::<Result<_>>()?;
        if seqs.len() != counters {
            return Err(err(n, format!("{} action sequences for {counters} counters", seqs.len())));
        }
        let (from, to) = (lookup(&aut, n, from)?, lookup(&aut, n, to)?);
        aut.add_transition(from, c, to, seqs);
    }
    if let Some(p) = aut.validate().first() {
        return Err(err(0, p.clone()));
    }
    Ok(aut)
}

fn names_of<'a>(names: &'a [String], set: impl IntoIterator<Item = &'a usize>) -> String {
    set.into_iter().map(|&i| names[i].as_str()).collect::<Vec<_>>().join(" ")
}

fn keyed(key: &str, rest: &str) -> String {
    if rest.is_empty() {
        format!("{key}\n")
    } else {
        format!("{key} {rest}\n")
    }
}

pub fn serialize_automaton(aut: &CostAutomaton) -> String {
    let mut out = format!("{HEADER}\n");
    out += &keyed("kind", &aut.polarity.to_string());
    out += &keyed("alphabet", &aut.alphabet.letters().iter().collect::<String>());
    out += &keyed("states", &aut.states.join(" "));
    out += &keyed("initial", &names_of(&aut.states, &aut.initial));
    out += &keyed("final", &names_of(&aut.states, &aut.finals));
    out += &keyed("counters", &aut.counters.to_string());
    for t in &aut.transitions {
        let _ = write!(out, "transition {} {} {}", aut.states[t.from], t.letter, aut.states[t.to]);
        for seq in &t.actions {
            let _ = write!(out, " | {}", render_seq(seq));
        }
        out.push('\n');
    }
    out
}

/// A semigroup file, with the recognizer block when one is present.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemigroupFile {
    pub semigroup: StabSemigroup,
    pub recognizer: Option<Recognizer>,
}

fn pairs(n: usize, rest: &str, sep: &str) -> Result<Vec<(String, String)>> {
    words(rest)
        .into_iter()
        .map(|p| {
            p.split_once(sep)
                .map(|(x, y)| (x.to_string(), y.to_string()))
                .ok_or_else(|| err(n, format!("expected x{sep}y, found {p:?}")))
        })
        .collect()
}

pub fn parse_semigroup(text: &str) -> Result<SemigroupFile> {
    let lines = content_lines(text)?;
    let mut slots: BTreeMap<&str, Option<(usize, &str)>> =
        ["elements", "order", "sharp", "neutral", "alphabet", "h", "ideal", "height"]
            .iter()
            .map(|&k| (k, None))
            .collect();
    let mut rows: Vec<(usize, String)> = Vec::new();
    let mut in_product = false;
    let mut seen_product = false;
    for &(n, key, rest) in &lines {
        if key == "product" {
            if seen_product {
                return Err(err(n, "duplicate product line"));
            }
            seen_product = true;
            in_product = true;
            continue;
        }
        if let Some(slot) = slots.get_mut(key) {
            in_product = false;
            once(slot, n, key, rest)?;
        } else if in_product {
            rows.push((n, format!("{key} {rest}")));
        } else {
            return Err(err(n, format!("unknown keyword {key:?}")));
        }
    }
    let (n, elements) = required(slots["elements"], "elements")?;
    let names: Vec<String> = words(elements).into_iter().map(String::from).collect();
    let index: BTreeMap<&str, usize> = names.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    if index.len() != names.len() {
        return Err(err(n, "duplicate element name"));
    }
    let look = |n: usize, s: &str| index.get(s).copied().ok_or_else(|| err(n, format!("unknown element {s}")));
    if rows.len() != names.len() {
        return Err(err(0, format!("product has {} rows for {} elements", rows.len(), names.len())));
    }
    let mut product = Vec::new();
    for (n, row) in &rows {
        let n = *n;
        let cells: Vec<usize> = words(row).into_iter().map(|c| look(n, c)).collect::<Result<_>>()?;
        if cells.len() != names.len() {
            return Err(err(n, format!("product row has {} entries", cells.len())));
        }
        product.push(cells);
    }
    let mut order = Vec::new();
    if let Some((n, rest)) = slots["order"] {
        for (x, y) in pairs(n, rest, "<=")? {
            order.push((look(n, &x)?, look(n, &y)?));
        }
    }
    let mut sharp = vec![None; names.len()];
    if let Some((n, rest)) = slots["sharp"] {
        for (x, y) in pairs(n, rest, ":")? {
            sharp[look(n, &x)?] = Some(look(n, &y)?);
        }
    }
    let neutral = match slots["neutral"] {
        Some((n, rest)) => Some(look(n, rest)?),
        None => None,
    };
    let semigroup = StabSemigroup::new(names.clone(), product, &order, sharp, neutral)?;
    let recognizer = match slots["h"] {
        None => {
            for key in ["alphabet", "ideal", "height"] {
                if let Some((n, _)) = slots[key] {
                    return Err(err(n, format!("{key} given without h")));
                }
            }
            None
        }
        Some((n, rest)) => {
            let mut h = BTreeMap::new();
            let mut letters = Vec::new();
            for (c, x) in pairs(n, rest, ":")? {
                let mut cs = c.chars();
                let (Some(ch), None) = (cs.next(), cs.next()) else {
                    return Err(err(n, format!("letter {c:?} is not one character")));
                };
                letters.push(ch);
                h.insert(ch, look(n, &x)?);
            }
            let alphabet = match slots["alphabet"] {
                Some((n, a)) => Alphabet::new(a).map_err(|e| err(n, e.to_string()))?,
                None => Alphabet::from_letters(letters).map_err(|e| err(n, e.to_string()))?,
            };
            let mut ideal = BTreeSet::new();
            if let Some((n, rest)) = slots["ideal"] {
                for x in words(rest) {
                    ideal.insert(look(n, x)?);
                }
            }
            let height = match slots["height"] {
                Some((n, s)) => Some(s.parse().map_err(|_| err(n, format!("bad height {s:?}")))?),
                None => None,
            };
            Some(Recognizer::new(semigroup.clone(), &alphabet, h, ideal, height)?)
        }
    };
    Ok(SemigroupFile { semigroup, recognizer })
}

/// Pairs `x < y` with nothing strictly between them.
fn covers(sg: &StabSemigroup) -> Vec<(usize, usize)> {
    let n = sg.len();
    let lt = |x: usize, y: usize| x != y && sg.leq[x][y];
    let mut out = Vec::new();
    for x in 0..n {
        for y in 0..n {
            if lt(x, y) && !(0..n).any(|z| lt(x, z) && lt(z, y)) {
                out.push((x, y));
            }
        }
    }
    out
}

pub fn serialize_semigroup(sg: &StabSemigroup, rec: Option<&Recognizer>) -> String {
    let names = &sg.names;
    let mut out = format!("{HEADER}\n");
    out += &keyed("elements", &names.join(" "));
    out += "product\n";
    for row in &sg.product {
        out += &names_of(names, row);
        out.push('\n');
    }
    let order: Vec<String> = covers(sg).iter().map(|&(x, y)| format!("{}<={}", names[x], names[y])).collect();
    out += &keyed("order", &order.join(" "));
    let sharp: Vec<String> = sg
        .sharp
        .iter()
        .enumerate()
        .filter_map(|(x, s)| s.map(|s| format!("{}:{}", names[x], names[s])))
        .collect();
    out += &keyed("sharp", &sharp.join(" "));
    if let Some(e) = sg.neutral {
        out += &keyed("neutral", &names[e]);
    }
    if let Some(rec) = rec {
        out += &keyed("alphabet", &rec.alphabet.letters().iter().collect::<String>());
        let h: Vec<String> = rec.alphabet.letters().iter().map(|c| format!("{c}:{}", names[rec.h[c]])).collect();
        out += &keyed("h", &h.join(" "));
        out += &keyed("ideal", &names_of(names, &rec.ideal));
        out += &keyed("height", &rec.height.to_string());
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expect {
    Bounded,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormulaEntry {
    pub text: String,
    pub expect: Option<Expect>,
}

/// An alphabet and a list of formulae, each optionally followed by an expected verdict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormulaFile {
    pub alphabet: Alphabet,
    pub entries: Vec<FormulaEntry>,
}

pub fn parse_formula_file(text: &str) -> Result<FormulaFile> {
    let mut alphabet = None;
    let mut entries: Vec<FormulaEntry> = Vec::new();
    for (n, key, rest) in content_lines(text)? {
        match key {
            "alphabet" if alphabet.is_none() => {
                alphabet = Some(Alphabet::new(rest).map_err(|e| err(n, e.to_string()))?);
            }
            "formula" => {
                let a = alphabet.as_ref().ok_or_else(|| err(n, "alphabet must precede formulae"))?;
                crate::formula::Formula::parse(rest, a).map_err(|e| err(n, e.to_string()))?;
                entries.push(FormulaEntry { text: rest.to_string(), expect: None });
            }
            "expect" => {
                let last = entries.last_mut().ok_or_else(|| err(n, "expect before any formula"))?;
                if last.expect.is_some() {
                    return Err(err(n, "duplicate expect"));
                }
                last.expect = Some(match rest {
                    "bounded" => Expect::Bounded,
                    "unbounded" => Expect::Unbounded,
                    r => return Err(err(n, format!("expect bounded or unbounded, found {r:?}"))),
                });
            }
            k => return Err(err(n, format!("unexpected keyword {k:?}"))),
        }
    }
    let alphabet = alphabet.ok_or_else(|| err(0, "missing alphabet line"))?;
    Ok(FormulaFile { alphabet, entries })
}

pub fn serialize_formula_file(file: &FormulaFile) -> String {
    let mut out = format!("{HEADER}\n");
    out += &keyed("alphabet", &file.alphabet.letters().iter().collect::<String>());
    for e in &file.entries {
        out += &keyed("formula", &e.text);
        match e.expect {
            Some(Expect::Bounded) => out += "expect bounded\n",
            Some(Expect::Unbounded) => out += "expect unbounded\n",
            None => {}
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const COUNT_A: &str = "costltl-format 1
kind S
alphabet ab
states q f
initial q
final f
counters 1
transition q a q | i
transition q b q | e
transition q a f | cr
transition q b f | cr
";

    #[test]
    fn automaton_round_trip() {
        let aut = parse_automaton(COUNT_A).unwrap();
        assert_eq!(aut.states, vec!["q", "f"]);
        assert_eq!(aut.transitions[0].actions, vec![vec![Act::I]]);
        assert_eq!(aut.transitions[1].actions, vec![Vec::<Act>::new()]);
        assert_eq!(serialize_automaton(&aut), COUNT_A);
    }

    #[test]
    fn automaton_errors_name_the_line() {
        let bad = COUNT_A.replace("transition q a f | cr", "transition q a z | cr");
        assert!(matches!(parse_automaton(&bad), Err(Error::Format { line: 10, .. })));
        let bad = COUNT_A.replace("| cr\ntransition q b f", "| ic\ntransition q b f");
        assert!(parse_automaton(&bad).is_err());
        let bad = COUNT_A.replace("| i\n", "| i | r\n");
        assert!(matches!(parse_automaton(&bad), Err(Error::Format { line: 8, .. })));
        assert!(parse_automaton("kind S\n").is_err());
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let text = format!("# counts a\n\n{}", COUNT_A.replace("counters 1\n", "counters 1\n\n# loops\n"));
        assert_eq!(parse_automaton(&text).unwrap(), parse_automaton(COUNT_A).unwrap());
    }

    #[test]
    fn semigroup_round_trip() {
        let text = serialize_semigroup(&StabSemigroup::s_actions(), None);
        let back = parse_semigroup(&text).unwrap();
        assert_eq!(back.semigroup, StabSemigroup::s_actions());
        assert_eq!(serialize_semigroup(&back.semigroup, None), text);
    }

    #[test]
    fn recognizer_round_trip() {
        let rec = crate::semigroup::tests::counting_recognizer(9);
        let text = serialize_semigroup(&rec.semigroup, Some(&rec));
        assert!(text.contains("order bot<=a a<=b\n"));
        let back = parse_semigroup(&text).unwrap();
        assert_eq!(back.recognizer.as_ref(), Some(&rec));
        assert_eq!(serialize_semigroup(&back.semigroup, back.recognizer.as_ref()), text);
    }

    #[test]
    fn semigroup_errors() {
        let rec = crate::semigroup::tests::counting_recognizer(9);
        let text = serialize_semigroup(&rec.semigroup, Some(&rec));
        assert!(parse_semigroup(&text.replace("bot a a\n", "bot a\n")).is_err());
        assert!(parse_semigroup(&text.replace("ideal bot", "ideal a")).is_err());
        assert!(parse_semigroup(&text.replace("h a:a b:b\n", "")).is_err());
    }

    #[test]
    fn formula_file_round_trip() {
        let text = "costltl-format 1\nalphabet ab\nformula !a U# END\nexpect unbounded\nformula G TRUE\n";
        let f = parse_formula_file(text).unwrap();
        assert_eq!(f.entries.len(), 2);
        assert_eq!(f.entries[0].expect, Some(Expect::Unbounded));
        assert_eq!(serialize_formula_file(&f), text);
        assert!(parse_formula_file("costltl-format 1\nalphabet ab\nformula a U\n").is_err());
    }
}
