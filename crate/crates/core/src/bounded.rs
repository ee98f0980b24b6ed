//! Boundedness of S-automata: the control-point search and the run-semigroup closure.
//!
//! Both work on transitions whose letters are forgotten and whose counter actions are
//! composed into vectors of S-actions. Smaller actions are always preferable, so only
//! minimal ones are kept.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::actions::SVec;
use crate::automata::{CostAutomaton, Polarity};
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::semigroup::{Recognizer, StabSemigroup};
use crate::translate::nltl_to_s;
use crate::word::Word;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ContractedTransition {
    pub from: usize,
    pub action: SVec,
    pub to: usize,
    /// A letter carrying this action, kept for witnesses.
    pub letter: char,
}

fn require_s(aut: &CostAutomaton) -> Result<()> {
    if aut.polarity != Polarity::S {
        return Err(Error::Domain("boundedness is decided on S automata".into()));
    }
    Ok(())
}

/// Keeps the minimal actions among `items` sharing endpoints; `⊥` actions are dropped.
fn minimal_by_endpoints<T: Clone>(items: impl IntoIterator<Item = (usize, SVec, usize, T)>) -> Vec<(usize, SVec, usize, T)> {
    let mut by_pair: BTreeMap<(usize, usize), Vec<(SVec, T)>> = BTreeMap::new();
    for (p, s, q, extra) in items {
        if s.has_bot() {
            continue;
        }
        let slot = by_pair.entry((p, q)).or_default();
        if slot.iter().any(|(t, _)| t.leq(&s)) {
            continue;
        }
        slot.retain(|(t, _)| !s.leq(t));
        slot.push((s, extra));
    }
    let mut out = Vec::new();
    for ((p, q), v) in by_pair {
        for (s, extra) in v {
            out.push((p, s, q, extra));
        }
    }
    out.sort_by(|a, b| (a.0, &a.1, a.2).cmp(&(b.0, &b.1, b.2)));
    out
}

pub fn contracted_transitions(aut: &CostAutomaton) -> Result<Vec<ContractedTransition>> {
    require_s(aut)?;
    let mut items = Vec::new();
    for t in &aut.transitions {
        let action = SVec::from_seqs(&t.actions)
            .ok_or_else(|| Error::Domain("B token in an S automaton".into()))?;
        items.push((t.from, action, t.to, t.letter));
    }
    Ok(minimal_by_endpoints(items)
        .into_iter()
        .map(|(from, action, to, letter)| ContractedTransition { from, action, to, letter })
        .collect())
}

/// A path whose loops are meant to be repeated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Piece {
    Letter(char),
    Loop(Vec<Piece>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub pieces: Vec<Piece>,
}

impl Witness {
    /// Every loop, nested ones included, repeated `n` times.
    pub fn pumped(&self, n: usize) -> Vec<char> {
        fn go(ps: &[Piece], n: usize, out: &mut Vec<char>) {
            for p in ps {
                match p {
                    Piece::Letter(c) => out.push(*c),
                    Piece::Loop(body) => {
                        for _ in 0..n {
                            go(body, n, out);
                        }
                    }
                }
            }
        }
        let mut out = Vec::new();
        go(&self.pieces, n, &mut out);
        out
    }

    pub fn word(&self, aut: &CostAutomaton, n: usize) -> Result<Word> {
        Word::from_letters(&aut.alphabet, self.pumped(n))
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(ps: &[Piece], f: &mut fmt::Formatter<'_>) -> fmt::Result {
            for p in ps {
                match p {
                    Piece::Letter(c) => write!(f, "{c}")?,
                    Piece::Loop(body) => {
                        f.write_str("(")?;
                        go(body, f)?;
                        f.write_str(")^n")?;
                    }
                }
            }
            Ok(())
        }
        if self.pieces.is_empty() {
            return f.write_str("ε");
        }
        go(&self.pieces, f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Bounded,
    Unbounded(Option<Witness>),
}

impl Verdict {
    pub fn is_bounded(&self) -> bool {
        matches!(self, Verdict::Bounded)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.is_bounded() { "bounded" } else { "unbounded" })
    }
}

#[derive(Clone, Debug)]
enum Step {
    Start,
    Extend { prev: usize, letter: char },
    /// Stabilized a cycle found one level down, recorded as its entry there.
    Close { prev: usize, cycle: usize },
}

/// Pairs `(σ, q)` reachable inside one frame opened at a fixed state, in discovery order.
#[derive(Debug, Default)]
struct Frame {
    entries: Vec<(SVec, usize, Step)>,
    index: HashMap<(SVec, usize), usize>,
}

#[derive(Clone, Debug)]
pub struct SearchReport {
    pub verdict: Verdict,
    /// Frame entries computed over all levels and start states.
    pub visited: usize,
}

/// The control-point search with at most `|Γ|+1` frames.
///
/// A frame is opened with the neutral action, so what happens inside it never depends on
/// the frames below. Each frame's reachable pairs are therefore computed once per nesting
/// level and start state. A pair `(τ, q)` inside a frame opened at `q` is a cycle; closing
/// it multiplies the enclosing action by `τ♯`.
struct Search<'a> {
    out: HashMap<usize, Vec<&'a ContractedTransition>>,
    neutral: SVec,
    frames: HashMap<(usize, usize), Frame>,
}

impl Search<'_> {
    /// Frame opened at `p` with `level` further frames allowed on top of it.
    fn frame(&mut self, level: usize, p: usize) -> &Frame {
        if !self.frames.contains_key(&(level, p)) {
            let f = self.explore(level, p);
            self.frames.insert((level, p), f);
        }
        &self.frames[&(level, p)]
    }

    /// Stabilizable cycles at `q` one level down: `(entry index, τ♯)`.
    fn cycles(&mut self, level: usize, q: usize) -> Vec<(usize, SVec)> {
        self.frame(level, q)
            .entries
            .iter()
            .enumerate()
            .filter(|(_, (_, r, _))| *r == q)
            .filter_map(|(i, (tau, _, _))| tau.sharp().map(|s| (i, s)))
            .collect()
    }

    fn explore(&mut self, level: usize, p: usize) -> Frame {
        let mut f = Frame::default();
        let push = |f: &mut Frame, s: SVec, q: usize, step: Step| {
            if s.has_bot() || f.index.contains_key(&(s.clone(), q)) {
                return;
            }
            f.index.insert((s.clone(), q), f.entries.len());
            f.entries.push((s, q, step));
        };
        push(&mut f, self.neutral.clone(), p, Step::Start);
        let mut cycles: HashMap<usize, Vec<(usize, SVec)>> = HashMap::new();
        let mut i = 0;
        while i < f.entries.len() {
            let (sigma, q) = (f.entries[i].0.clone(), f.entries[i].1);
            for t in self.out.get(&q).into_iter().flatten() {
                push(&mut f, sigma.mul(&t.action), t.to, Step::Extend { prev: i, letter: t.letter });
            }
            if level > 0 {
                if !cycles.contains_key(&q) {
                    let c = self.cycles(level - 1, q);
                    cycles.insert(q, c);
                }
                for (cycle, stab) in &cycles[&q] {
                    push(&mut f, sigma.mul(stab), q, Step::Close { prev: i, cycle: *cycle });
                }
            }
            i += 1;
        }
        f
    }

    fn pieces(&self, level: usize, p: usize, mut at: usize) -> Vec<Piece> {
        let f = &self.frames[&(level, p)];
        let mut rev = Vec::new();
        loop {
            let (_, q, step) = &f.entries[at];
            match *step {
                Step::Start => break,
                Step::Extend { prev, letter } => {
                    rev.push(Piece::Letter(letter));
                    at = prev;
                }
                Step::Close { prev, cycle } => {
                    rev.push(Piece::Loop(self.pieces(level - 1, *q, cycle)));
                    at = prev;
                }
            }
        }
        rev.reverse();
        rev
    }
}

pub fn bounded_onthefly(aut: &CostAutomaton) -> Result<SearchReport> {
    let trans = contracted_transitions(aut)?;
    let mut out: HashMap<usize, Vec<&ContractedTransition>> = HashMap::new();
    for t in &trans {
        out.entry(t.from).or_default().push(t);
    }
    let mut search = Search { out, neutral: SVec::neutral(aut.counters), frames: HashMap::new() };
    let top = aut.counters;
    for &p in &aut.initial {
        let hit = search
            .frame(top, p)
            .entries
            .iter()
            .position(|(s, q, _)| aut.finals.contains(q) && s.is_unchecked());
        if let Some(at) = hit {
            let witness = Witness { pieces: search.pieces(top, p, at) };
            let visited = search.frames.values().map(|f| f.entries.len()).sum();
            return Ok(SearchReport { verdict: Verdict::Unbounded(Some(witness)), visited });
        }
    }
    let visited = search.frames.values().map(|f| f.entries.len()).sum();
    Ok(SearchReport { verdict: Verdict::Bounded, visited })
}

/// Upward-closed set of partial runs, stored as its minimal triples; `⊥` triples are absent.
pub type RunElem = BTreeSet<(usize, SVec, usize)>;

fn normalize(items: impl IntoIterator<Item = (usize, SVec, usize)>) -> RunElem {
    minimal_by_endpoints(items.into_iter().map(|(p, s, q)| (p, s, q, ()))).into_iter().map(|(p, s, q, ())| (p, s, q)).collect()
}

fn run_product(e: &RunElem, f: &RunElem) -> RunElem {
    let mut by_start: BTreeMap<usize, Vec<(&SVec, usize)>> = BTreeMap::new();
    for (q, s, r) in f {
        by_start.entry(*q).or_default().push((s, *r));
    }
    normalize(e.iter().flat_map(|(p, s1, q)| {
        by_start.get(q).into_iter().flatten().map(move |(s2, r)| (*p, s1.mul(s2), *r))
    }))
}

fn run_sharp(e: &RunElem) -> RunElem {
    let mut items = Vec::new();
    for (q, se, q2) in e {
        if q != q2 {
            continue;
        }
        let Some(stab) = se.sharp() else { continue };
        for (p, s1, _) in e.iter().filter(|t| t.2 == *q) {
            let left = s1.mul(&stab);
            for (_, s2, r) in e.iter().filter(|t| t.0 == *q) {
                items.push((*p, left.mul(s2), *r));
            }
        }
    }
    normalize(items)
}

/// `F↑ ⊆ E↑`.
fn run_leq(e: &RunElem, f: &RunElem) -> bool {
    f.iter().all(|(p, t, q)| e.iter().any(|(p2, s, q2)| p2 == p && q2 == q && s.leq(t)))
}

/// The elements generated by the letter images, with their tables.
#[derive(Clone, Debug)]
pub struct RunSemigroup {
    pub elements: Vec<RunElem>,
    pub product: Vec<Vec<usize>>,
    pub sharp: Vec<Option<usize>>,
    pub letters: BTreeMap<char, usize>,
    pub good: BTreeSet<usize>,
    pub verdict: Verdict,
}

impl RunSemigroup {
    /// Elements ordered by reverse inclusion of their upward closures.
    pub fn to_recognizer(&self, aut: &CostAutomaton) -> Result<Recognizer> {
        let n = self.elements.len();
        let names = (0..n).map(|i| format!("E{i}")).collect();
        let mut order = Vec::new();
        for x in 0..n {
            for y in 0..n {
                if x != y && run_leq(&self.elements[x], &self.elements[y]) {
                    order.push((x, y));
                }
            }
        }
        let sg = StabSemigroup::new(names, self.product.clone(), &order, self.sharp.clone(), None)?;
        Recognizer::new(sg, &aut.alphabet, self.letters.clone(), self.good.clone(), None)
    }
}

fn is_good(aut: &CostAutomaton, e: &RunElem) -> bool {
    e.iter().any(|(p, s, q)| aut.initial.contains(p) && aut.finals.contains(q) && s.is_unchecked())
}

/// Closes the letter images under product and stabilization of idempotents.
///
/// Runs through states that are unreachable or cannot reach a final state never matter,
/// so the automaton is trimmed first.
pub fn run_semigroup_closure(aut: &CostAutomaton, limit: usize) -> Result<RunSemigroup> {
    require_s(aut)?;
    let aut = &aut.trim();
    let mut elements: Vec<RunElem> = Vec::new();
    let mut index: HashMap<RunElem, usize> = HashMap::new();
    let mut intern = |e: RunElem, elements: &mut Vec<RunElem>| -> Result<usize> {
        if let Some(&i) = index.get(&e) {
            return Ok(i);
        }
        if elements.len() >= limit {
            return Err(Error::Resource(format!(
                "run semigroup exceeds {limit} elements ({} found so far)",
                elements.len()
            )));
        }
        elements.push(e.clone());
        index.insert(e, elements.len() - 1);
        Ok(elements.len() - 1)
    };
    let mut letters = BTreeMap::new();
    for &a in aut.alphabet.letters() {
        let mut items = Vec::new();
        for t in aut.transitions.iter().filter(|t| t.letter == a) {
            let s = SVec::from_seqs(&t.actions).ok_or_else(|| Error::Domain("B token in an S automaton".into()))?;
            items.push((t.from, s, t.to));
        }
        let i = intern(normalize(items), &mut elements)?;
        letters.insert(a, i);
    }
    let mut product: HashMap<(usize, usize), usize> = HashMap::new();
    let mut sharp: HashMap<usize, usize> = HashMap::new();
    let mut done = 0;
    while done < elements.len() {
        let x = done;
        done += 1;
        for y in 0..done {
            for (l, r) in [(x, y), (y, x)] {
                if product.contains_key(&(l, r)) {
                    continue;
                }
                let p = run_product(&elements[l], &elements[r]);
                let i = intern(p, &mut elements)?;
                product.insert((l, r), i);
            }
        }
        if product[&(x, x)] == x {
            let s = run_sharp(&elements[x]);
            let i = intern(s, &mut elements)?;
            sharp.insert(x, i);
        }
    }
    let n = elements.len();
    let product = (0..n).map(|x| (0..n).map(|y| product[&(x, y)]).collect()).collect();
    let sharp = (0..n).map(|x| sharp.get(&x).copied()).collect();
    let good: BTreeSet<usize> = (0..n).filter(|&x| is_good(aut, &elements[x])).collect();
    let eps = aut.initial.iter().any(|p| aut.finals.contains(p));
    let verdict = if eps || !good.is_empty() { Verdict::Unbounded(None) } else { Verdict::Bounded };
    Ok(RunSemigroup { elements, product, sharp, letters, good, verdict })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    OnTheFly,
    Closure,
}

/// Default element limit for the closure.
pub const CLOSURE_LIMIT: usize = 20_000;

/// Decides boundedness of a pure cost formula through its dual S-automaton.
pub fn bounded_formula(phi: &Formula, method: Method) -> Result<Verdict> {
    let aut = nltl_to_s(&phi.dualize()?)?;
    match method {
        Method::OnTheFly => Ok(bounded_onthefly(&aut)?.verdict),
        Method::Closure => Ok(run_semigroup_closure(&aut, CLOSURE_LIMIT)?.verdict),
    }
}
