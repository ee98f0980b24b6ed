//! B and S cost automata with per-counter action sequences, and their exact valuations.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap, HashSet};
use std::fmt;

use crate::actions::{b_seq_value, contract_max, Act};
use crate::cost::CostValue;
use crate::error::{Error, Result};
use crate::word::{Alphabet, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Polarity {
    B,
    S,
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarity::B => "B",
            Polarity::S => "S",
        })
    }
}

/// `actions[k]` is the token sequence applied to counter `k`; `e` tokens are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transition {
    pub from: usize,
    pub letter: char,
    pub to: usize,
    pub actions: Vec<Vec<Act>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CostAutomaton {
    pub polarity: Polarity,
    pub alphabet: Alphabet,
    pub states: Vec<String>,
    pub initial: BTreeSet<usize>,
    pub finals: BTreeSet<usize>,
    pub counters: usize,
    pub transitions: Vec<Transition>,
}

/// An accepting run: `states.len() == transitions.len() + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Run {
    pub states: Vec<usize>,
    pub transitions: Vec<usize>,
}

impl CostAutomaton {
    pub fn new(polarity: Polarity, alphabet: &Alphabet, counters: usize) -> Self {
        CostAutomaton {
            polarity,
            alphabet: alphabet.clone(),
            states: Vec::new(),
            initial: BTreeSet::new(),
            finals: BTreeSet::new(),
            counters,
            transitions: Vec::new(),
        }
    }

    pub fn add_state(&mut self, name: impl Into<String>) -> usize {
        self.states.push(name.into());
        self.states.len() - 1
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    /// Drops `e` tokens; identical transitions are kept once.
    pub fn add_transition(&mut self, from: usize, letter: char, to: usize, actions: Vec<Vec<Act>>) {
        let actions = actions
            .into_iter()
            .map(|seq| seq.into_iter().filter(|&a| a != Act::E).collect())
            .collect();
        let t = Transition { from, letter, to, actions };
        if !self.transitions.contains(&t) {
            self.transitions.push(t);
        }
    }

    /// Every structural violation, one line each; empty when well formed.
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        let n = self.states.len();
        let mut names = HashSet::new();
        for s in &self.states {
            if !names.insert(s) {
                out.push(format!("duplicate state name {s}"));
            }
            if s.is_empty() || s.chars().any(char::is_whitespace) {
                out.push(format!("state name {s:?} is empty or contains whitespace"));
            }
        }
        for &q in self.initial.iter().chain(&self.finals) {
            if q >= n {
                out.push(format!("initial or final state #{q} is not declared"));
            }
        }
        for (i, t) in self.transitions.iter().enumerate() {
            if t.from >= n || t.to >= n {
                out.push(format!("transition {i} uses an undeclared state"));
            }
            if !self.alphabet.contains(t.letter) {
                out.push(format!("transition {i} reads '{}' outside the alphabet", t.letter));
            }
            if t.actions.len() != self.counters {
                out.push(format!(
                    "transition {i} has {} action sequences for {} counters",
                    t.actions.len(),
                    self.counters
                ));
            }
            for a in t.actions.iter().flatten() {
                let ok = match self.polarity {
                    Polarity::B => a.is_b(),
                    Polarity::S => a.is_s(),
                };
                if !ok {
                    out.push(format!("transition {i} uses token {a} in a {} automaton", self.polarity));
                }
            }
        }
        out
    }

    fn check_word(&self, u: &Word, polarity: Polarity) -> Result<()> {
        if self.polarity != polarity {
            return Err(Error::Domain(format!("expected a {polarity} automaton")));
        }
        if u.alphabet() != &self.alphabet {
            return Err(Error::Alphabet(format!(
                "word over {} given to an automaton over {}",
                u.alphabet(),
                self.alphabet
            )));
        }
        Ok(())
    }

    /// Keeps the states reachable from an initial state and co-reachable to a final one.
    pub fn trim(&self) -> CostAutomaton {
        let mut fwd = vec![Vec::new(); self.states.len()];
        let mut bwd = vec![Vec::new(); self.states.len()];
        for t in &self.transitions {
            fwd[t.from].push(t.to);
            bwd[t.to].push(t.from);
        }
        let reach = |start: &BTreeSet<usize>, adj: &[Vec<usize>]| {
            let mut seen = start.clone();
            let mut stack: Vec<usize> = start.iter().copied().collect();
            while let Some(q) = stack.pop() {
                for &r in &adj[q] {
                    if seen.insert(r) {
                        stack.push(r);
                    }
                }
            }
            seen
        };
        let live: BTreeSet<usize> =
            reach(&self.initial, &fwd).intersection(&reach(&self.finals, &bwd)).copied().collect();
        let map: HashMap<usize, usize> = live.iter().enumerate().map(|(i, &q)| (q, i)).collect();
        let mut out = CostAutomaton::new(self.polarity, &self.alphabet, self.counters);
        for &q in &live {
            out.add_state(self.states[q].clone());
        }
        out.initial = self.initial.iter().filter_map(|q| map.get(q).copied()).collect();
        out.finals = self.finals.iter().filter_map(|q| map.get(q).copied()).collect();
        for t in &self.transitions {
            if let (Some(&from), Some(&to)) = (map.get(&t.from), map.get(&t.to)) {
                out.transitions.push(Transition { from, to, ..t.clone() });
            }
        }
        out
    }

    /// Transitions grouped by `(from, letter index)`.
    fn outgoing(&self) -> HashMap<(usize, char), Vec<&Transition>> {
        let mut map: HashMap<(usize, char), Vec<&Transition>> = HashMap::new();
        for t in &self.transitions {
            map.entry((t.from, t.letter)).or_default().push(t);
        }
        map
    }

    /// Largest number of tokens on one counter of one transition.
    fn max_seq_len(&self) -> usize {
        self.transitions.iter().flat_map(|t| t.actions.iter().map(Vec::len)).max().unwrap_or(0)
    }
}

/// `inf` over accepting runs of the largest checked value.
pub fn eval_b(aut: &CostAutomaton, u: &Word) -> Result<CostValue> {
    aut.check_word(u, Polarity::B)?;
    let out = aut.outgoing();
    let letters = u.letters();
    type Key = (usize, usize, Vec<u64>);
    let mut best: HashMap<Key, u64> = HashMap::new();
    let mut heap = BinaryHeap::new();
    for &q in &aut.initial {
        let key = (0, q, vec![0; aut.counters]);
        best.insert(key.clone(), 0);
        heap.push(Reverse((0u64, key)));
    }
    while let Some(Reverse((cost, key))) = heap.pop() {
        if best.get(&key).is_some_and(|&c| c < cost) {
            continue;
        }
        let (pos, q, counters) = key;
        if pos == letters.len() {
            if aut.finals.contains(&q) {
                return Ok(CostValue::Finite(cost));
            }
            continue;
        }
        for t in out.get(&(q, letters[pos])).into_iter().flatten() {
            let mut next = counters.clone();
            let mut c = cost;
            for (k, seq) in t.actions.iter().enumerate() {
                let (v, end) = b_seq_value(seq, next[k]);
                c = c.max(v.finite().unwrap_or(u64::MAX));
                next[k] = end;
            }
            let key = (pos + 1, t.to, next);
            if best.get(&key).map_or(true, |&old| c < old) {
                best.insert(key.clone(), c);
                heap.push(Reverse((c, key)));
            }
        }
    }
    Ok(CostValue::Infinite)
}

/// Applies an S sequence to a counter capped at `cap`; `None` when a check sees less than `cap`.
fn s_step_capped(seq: &[Act], mut c: u64, cap: u64) -> Option<u64> {
    for a in seq {
        match a {
            Act::I => c = (c + 1).min(cap),
            Act::R => c = 0,
            Act::Cr => {
                if c < cap {
                    return None;
                }
                c = 0;
            }
            _ => {}
        }
    }
    Some(c)
}

/// Is there an accepting run all of whose checks see at least `n`?
fn s_feasible(aut: &CostAutomaton, u: &Word, n: u64, out: &HashMap<(usize, char), Vec<&Transition>>) -> bool {
    let mut layer: HashSet<(usize, Vec<u64>)> =
        aut.initial.iter().map(|&q| (q, vec![0; aut.counters])).collect();
    for &a in u.letters() {
        let mut next = HashSet::new();
        for (q, counters) in &layer {
            for t in out.get(&(*q, a)).into_iter().flatten() {
                let stepped: Option<Vec<u64>> = t
                    .actions
                    .iter()
                    .zip(counters)
                    .map(|(seq, &c)| s_step_capped(seq, c, n))
                    .collect();
                if let Some(c) = stepped {
                    next.insert((t.to, c));
                }
            }
        }
        layer = next;
    }
    layer.iter().any(|(q, _)| aut.finals.contains(q))
}

/// `sup` over accepting runs of the smallest checked value.
pub fn eval_s(aut: &CostAutomaton, u: &Word) -> Result<CostValue> {
    aut.check_word(u, Polarity::S)?;
    let out = aut.outgoing();
    let no_checks = CostAutomaton {
        transitions: aut
            .transitions
            .iter()
            .filter(|t| !t.actions.iter().flatten().any(|&a| a == Act::Cr))
            .cloned()
            .collect(),
        ..aut.clone()
    };
    if s_feasible(&no_checks, u, 0, &no_checks.outgoing()) {
        return Ok(CostValue::Infinite);
    }
    if !s_feasible(aut, u, 0, &out) {
        return Ok(CostValue::ZERO);
    }
    // Checked values never exceed the total number of increments along the word.
    let (mut lo, mut hi) = (0u64, (u.len() * aut.max_seq_len()) as u64 + 1);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if s_feasible(aut, u, mid, &out) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(CostValue::Finite(lo))
}

pub fn eval(aut: &CostAutomaton, u: &Word) -> Result<CostValue> {
    match aut.polarity {
        Polarity::B => eval_b(aut, u),
        Polarity::S => eval_s(aut, u),
    }
}

/// Replaces each sequence by its largest token under `e < ic < r`.
/// `K` is the largest value a single sequence reaches from 0.
pub fn contract_b(aut: &CostAutomaton) -> Result<(CostAutomaton, u64)> {
    if aut.polarity != Polarity::B {
        return Err(Error::Domain("contraction applies to B automata".into()));
    }
    let mut k = 0;
    let mut out = CostAutomaton { transitions: Vec::new(), ..aut.clone() };
    for t in &aut.transitions {
        for seq in &t.actions {
            k = k.max(b_seq_value(seq, 0).0.finite().unwrap_or(0));
        }
        let actions = t.actions.iter().map(|seq| vec![contract_max(seq)]).collect();
        out.add_transition(t.from, t.letter, t.to, actions);
    }
    Ok((out, k))
}

/// All accepting runs on `u`, or a resource error past `limit` partial runs.
pub fn enumerate_runs(aut: &CostAutomaton, u: &Word, limit: usize) -> Result<Vec<Run>> {
    let out = aut.outgoing();
    let mut partial: Vec<Run> =
        aut.initial.iter().map(|&q| Run { states: vec![q], transitions: vec![] }).collect();
    for &a in u.letters() {
        let mut next = Vec::new();
        for r in &partial {
            let q = *r.states.last().expect("runs start with a state");
            for t in out.get(&(q, a)).into_iter().flatten() {
                let idx = aut.transitions.iter().position(|x| std::ptr::eq(x, *t)).expect("own transition");
                let mut r2 = r.clone();
                r2.states.push(t.to);
                r2.transitions.push(idx);
                next.push(r2);
                if next.len() > limit {
                    return Err(Error::Resource(format!("more than {limit} partial runs")));
                }
            }
        }
        partial = next;
    }
    partial.retain(|r| aut.finals.contains(r.states.last().expect("nonempty")));
    Ok(partial)
}

/// Value of one run: largest checked value (B) or smallest check (S).
pub fn run_value(aut: &CostAutomaton, run: &Run) -> CostValue {
    let mut counters = vec![0u64; aut.counters];
    let mut checked = Vec::new();
    for &ti in &run.transitions {
        for (k, seq) in aut.transitions[ti].actions.iter().enumerate() {
            for a in seq {
                match a {
                    Act::Ic => {
                        counters[k] += 1;
                        checked.push(counters[k]);
                    }
                    Act::I => counters[k] += 1,
                    Act::R => counters[k] = 0,
                    Act::Cr => {
                        checked.push(counters[k]);
                        counters[k] = 0;
                    }
                    Act::E => {}
                }
            }
        }
    }
    let vals = checked.into_iter().map(CostValue::Finite);
    match aut.polarity {
        Polarity::B => CostValue::sup(vals),
        Polarity::S => CostValue::inf(vals),
    }
}

/// Valuation by explicit enumeration of accepting runs.
pub fn eval_by_runs(aut: &CostAutomaton, u: &Word, limit: usize) -> Result<CostValue> {
    let runs = enumerate_runs(aut, u, limit)?;
    let vals = runs.iter().map(|r| run_value(aut, r));
    Ok(match aut.polarity {
        Polarity::B => CostValue::inf(vals),
        Polarity::S => CostValue::sup(vals),
    })
}
