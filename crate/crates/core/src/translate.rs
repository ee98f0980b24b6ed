//! Tableau translations: LTL≤ to B automata and nLTL≤ to S automata.
//!
//! States are sets of formulae still to be proved. A letter step first saturates the set
//! with ε-rules (each rule rewrites one largest non-reduced member and may act on one
//! counter), keeps the consistent reduced endpoints `Z`, reads a letter compatible with
//! the atom of `Z`, and moves to `next(Z)`.
//!
//! End of word. A state is final for B when its ε-saturation can reach a set inside
//! `{END}`; the reachable actions there are resets and never change the value. For S, a
//! state is final when such an endpoint is reached without a check; endpoints that need a
//! check are routed through an extra final sink `end`, entered on the last letter with the
//! check appended.
//!
//! Repeated R# instances. When an R# formula is introduced afresh while an older instance
//! of it is still pending, the older one is implied by the newer one from now on. The
//! S translation drops the older instance and resets its counter, so the counter always
//! measures the newest instance. Without this, the merged instance counts from the older
//! start and overestimates the value without bound (see `literal_merge_overestimates`).

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use crate::actions::Act;
use crate::automata::{CostAutomaton, Polarity};
use crate::cost::CostValue;
use crate::error::{Error, Result};
use crate::formula::{render, Formula, Logic, Node};

pub type Id = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Kind {
    Atom(char),
    End,
    And(Id, Id),
    Or(Id, Id),
    Next(Id),
    Until(Id, Id),
    UntilLeq(Id, Id),
    ReleaseGeq(Id, Id),
    /// Self-continuation `X R` produced by the rule of an R# formula `R`.
    Carry(Id),
    /// Pending R# instance carried over from an earlier position.
    Cont(Id),
}

/// Actions per counter collected along an ε-path; `e` is left implicit.
pub type ActionSeqs = Vec<Vec<Act>>;

/// A pseudo-state: members are interned formula ids.
pub type PseudoState = BTreeSet<Id>;

/// Interned formulae of one translation plus the ε-rules over them.
#[derive(Clone, Debug)]
pub struct Translator {
    kinds: Vec<Kind>,
    sizes: Vec<usize>,
    index: HashMap<Kind, Id>,
    counter: HashMap<Id, usize>,
    counters: usize,
    root: Id,
    /// Merge R# instances as plain set members, without resetting on re-introduction.
    literal: bool,
}

impl Translator {
    pub fn new(phi: &Formula, polarity: Polarity) -> Result<Self> {
        Self::build(phi, polarity, false)
    }

    fn build(phi: &Formula, polarity: Polarity, literal: bool) -> Result<Self> {
        let logic_ok = match polarity {
            Polarity::B => !phi.root().has_release_geq(),
            Polarity::S => !phi.root().has_until_leq(),
        };
        if !logic_ok {
            let want = if polarity == Polarity::B { Logic::Ltl } else { Logic::Nltl };
            return Err(Error::Domain(format!("{polarity} translation needs a {want:?} formula")));
        }
        let subs = phi.subformulas();
        let mut t = Translator {
            kinds: Vec::new(),
            sizes: Vec::new(),
            index: HashMap::new(),
            counter: HashMap::new(),
            counters: match polarity {
                Polarity::B => subs.until_count(),
                Polarity::S => subs.release_count(),
            },
            root: 0,
            literal,
        };
        t.root = t.intern(phi.root());
        for n in subs.members() {
            let k = match polarity {
                Polarity::B => subs.until_index(n),
                Polarity::S => subs.release_index(n),
            };
            if let Some(k) = k {
                let id = t.intern(n);
                t.counter.insert(id, k - 1);
            }
        }
        Ok(t)
    }

    pub fn counters(&self) -> usize {
        self.counters
    }

    pub fn root(&self) -> Id {
        self.root
    }

    fn add(&mut self, kind: Kind, size: usize) -> Id {
        if let Some(&id) = self.index.get(&kind) {
            return id;
        }
        self.kinds.push(kind);
        self.sizes.push(size);
        self.index.insert(kind, self.kinds.len() - 1);
        self.kinds.len() - 1
    }

    pub fn intern(&mut self, n: &Node) -> Id {
        let bin = |t: &mut Self, l: &Node, r: &Node, f: fn(Id, Id) -> Kind| {
            let (l, r) = (t.intern(l), t.intern(r));
            let size = 1 + t.sizes[l] + t.sizes[r];
            t.add(f(l, r), size)
        };
        match n {
            Node::Atom(c) => self.add(Kind::Atom(*c), 1),
            Node::End => self.add(Kind::End, 1),
            Node::And(l, r) => bin(self, l, r, Kind::And),
            Node::Or(l, r) => bin(self, l, r, Kind::Or),
            Node::Until(l, r) => bin(self, l, r, Kind::Until),
            Node::UntilLeqN(l, r) => bin(self, l, r, Kind::UntilLeq),
            Node::ReleaseGeqN(l, r) => bin(self, l, r, Kind::ReleaseGeq),
            Node::Next(x) => {
                let x = self.intern(x);
                self.next_of(x)
            }
        }
    }

    fn next_of(&mut self, x: Id) -> Id {
        let size = 1 + self.sizes[x];
        self.add(Kind::Next(x), size)
    }

    /// The formula an id stands for; a carried-over R# instance maps to the R# itself.
    pub fn node(&self, id: Id) -> Node {
        let b = |x: Id| Box::new(self.node(x));
        match self.kinds[id] {
            Kind::Atom(c) => Node::Atom(c),
            Kind::End => Node::End,
            Kind::And(l, r) => Node::And(b(l), b(r)),
            Kind::Or(l, r) => Node::Or(b(l), b(r)),
            Kind::Next(x) | Kind::Carry(x) => Node::Next(b(x)),
            Kind::Until(l, r) => Node::Until(b(l), b(r)),
            Kind::UntilLeq(l, r) => Node::UntilLeqN(b(l), b(r)),
            Kind::ReleaseGeq(l, r) => Node::ReleaseGeqN(b(l), b(r)),
            Kind::Cont(x) => self.node(x),
        }
    }

    pub fn render_set(&self, set: &PseudoState) -> String {
        let parts: Vec<String> = set
            .iter()
            .map(|&id| match self.kinds[id] {
                Kind::Cont(x) => format!("({})'", render(&self.node(x))),
                Kind::Carry(x) => format!("X ({})'", render(&self.node(x))),
                _ => render(&self.node(id)),
            })
            .collect();
        format!("{{{}}}", parts.join(", "))
    }

    fn is_reduced(&self, id: Id) -> bool {
        matches!(self.kinds[id], Kind::Atom(_) | Kind::End | Kind::Next(_) | Kind::Carry(_))
    }

    fn is_atomic(&self, id: Id) -> bool {
        matches!(self.kinds[id], Kind::Atom(_) | Kind::End)
    }

    fn consistent(&self, set: &PseudoState) -> bool {
        set.iter().filter(|&&id| self.is_atomic(id)).count() <= 1
    }

    /// `{φ : Xφ ∈ Z}`; an R# carried by its own rule becomes a pending instance, while an
    /// R# under a plain `X` starts afresh.
    pub fn next(&mut self, z: &PseudoState) -> Result<PseudoState> {
        if !self.consistent(z) || z.iter().any(|&id| !self.is_reduced(id)) {
            return Err(Error::Domain(format!("{} is not consistent and reduced", self.render_set(z))));
        }
        let mut out = BTreeSet::new();
        for &id in z {
            match self.kinds[id] {
                Kind::Next(x) => {
                    out.insert(x);
                }
                Kind::Carry(x) => {
                    out.insert(self.add(Kind::Cont(x), self.sizes[x]));
                }
                _ => {}
            }
        }
        Ok(out)
    }

    fn act(&self, id: Id, a: Act) -> ActionSeqs {
        let mut s = vec![Vec::new(); self.counters];
        s[self.counter[&id]].push(a);
        s
    }

    /// Consistent reduced endpoints of every maximal ε-path from `y`, with their actions.
    pub fn epsilon_closure(&mut self, y: &PseudoState) -> Vec<(PseudoState, ActionSeqs)> {
        self.saturate(y, false)
    }

    /// With `at_end`, R# may also be discharged by its right side alone, since no later
    /// position exists to carry it.
    fn saturate(&mut self, y: &PseudoState, at_end: bool) -> Vec<(PseudoState, ActionSeqs)> {
        let start = (y.clone(), vec![Vec::new(); self.counters]);
        let mut seen = HashSet::new();
        let mut stack = vec![start];
        let mut out = BTreeSet::new();
        while let Some((set, acts)) = stack.pop() {
            if !self.consistent(&set) || !seen.insert((set.clone(), acts.clone())) {
                continue;
            }
            let pick = set
                .iter()
                .copied()
                .filter(|&id| !self.is_reduced(id))
                .max_by_key(|&id| (self.sizes[id], id));
            let Some(psi) = pick else {
                out.insert((set, acts));
                continue;
            };
            for (succ, extra) in self.rules(&set, psi, at_end) {
                let mut acts2 = acts.clone();
                for (k, seq) in extra.into_iter().enumerate() {
                    acts2[k].extend(seq);
                }
                stack.push((succ, acts2));
            }
        }
        out.into_iter().collect()
    }

    fn rules(&mut self, set: &PseudoState, psi: Id, at_end: bool) -> Vec<(PseudoState, ActionSeqs)> {
        let none = vec![Vec::new(); self.counters];
        let mut rest = set.clone();
        rest.remove(&psi);
        let with = |extra: &[Id]| {
            let mut s = rest.clone();
            s.extend(extra.iter().copied());
            s
        };
        match self.kinds[psi] {
            Kind::And(l, r) => vec![(with(&[l, r]), none)],
            Kind::Or(l, r) => vec![(with(&[l]), none.clone()), (with(&[r]), none)],
            Kind::Until(l, r) => {
                let x = self.next_of(psi);
                vec![(with(&[l, x]), none.clone()), (with(&[r]), none)]
            }
            Kind::UntilLeq(l, r) => {
                let x = self.next_of(psi);
                vec![
                    (with(&[l, x]), none),
                    (with(&[x]), self.act(psi, Act::Ic)),
                    (with(&[r]), self.act(psi, Act::R)),
                ]
            }
            Kind::ReleaseGeq(..) => {
                let cont = self.index.get(&Kind::Cont(psi)).copied();
                let mut rest = rest.clone();
                if let Some(c) = cont {
                    rest.remove(&c);
                }
                let reset = !self.literal;
                self.release_rules(&rest, psi, reset, at_end)
            }
            Kind::Cont(r) => {
                if set.contains(&r) {
                    vec![(rest, none)]
                } else {
                    self.release_rules(&rest, r, false, at_end)
                }
            }
            Kind::Atom(_) | Kind::End | Kind::Next(_) | Kind::Carry(_) => unreachable!("reduced formulae have no rule"),
        }
    }

    fn release_rules(
        &mut self,
        rest: &PseudoState,
        psi: Id,
        reset: bool,
        at_end: bool,
    ) -> Vec<(PseudoState, ActionSeqs)> {
        let Kind::ReleaseGeq(l, r) = self.kinds[psi] else { unreachable!("R# expected") };
        let x = if self.literal { self.next_of(psi) } else { self.add(Kind::Carry(psi), 1 + self.sizes[psi]) };
        let with = |extra: &[Id]| {
            let mut s = rest.clone();
            s.extend(extra.iter().copied());
            s
        };
        let k = self.counter[&psi];
        let seq = |a: Option<Act>| {
            let mut s = vec![Vec::new(); self.counters];
            if reset {
                s[k].push(Act::R);
            }
            s[k].extend(a);
            s
        };
        if at_end {
            return vec![(with(&[r]), seq(None)), (rest.clone(), seq(Some(Act::Cr)))];
        }
        vec![
            (with(&[l, r, x]), seq(Some(Act::I))),
            (with(&[r, x]), seq(None)),
            (rest.clone(), seq(Some(Act::Cr))),
        ]
    }

    /// Endpoints compatible with the end of the word: subsets of `{END}`.
    pub fn end_closure(&mut self, y: &PseudoState) -> Vec<ActionSeqs> {
        self.saturate(y, true)
            .into_iter()
            .filter(|(z, _)| z.iter().all(|&id| self.kinds[id] == Kind::End))
            .map(|(_, a)| a)
            .collect()
    }

    fn atom_of(&self, z: &PseudoState) -> Option<Kind> {
        z.iter().map(|&id| self.kinds[id]).find(|k| matches!(k, Kind::Atom(_) | Kind::End))
    }
}

fn has_check(acts: &ActionSeqs) -> bool {
    acts.iter().flatten().any(|&a| a == Act::Cr)
}

fn concat(a: &ActionSeqs, b: &ActionSeqs) -> ActionSeqs {
    a.iter().zip(b).map(|(x, y)| x.iter().chain(y).copied().collect()).collect()
}

/// A translated automaton with the formula set behind each state.
#[derive(Clone, Debug)]
pub struct Compiled {
    pub automaton: CostAutomaton,
    /// Formulae of each state; empty for the S end sink.
    pub state_formulas: Vec<Vec<Node>>,
    pub state_labels: Vec<String>,
}

fn compile(phi: &Formula, polarity: Polarity, literal: bool) -> Result<Compiled> {
    let mut t = Translator::build(phi, polarity, literal)?;
    let mut aut = CostAutomaton::new(polarity, phi.alphabet(), t.counters());
    let mut ids: BTreeMap<PseudoState, usize> = BTreeMap::new();
    let mut sets: Vec<PseudoState> = Vec::new();
    let mut queue = VecDeque::new();
    let init: PseudoState = [t.root()].into();
    ids.insert(init.clone(), 0);
    sets.push(init.clone());
    aut.add_state("q0");
    aut.initial.insert(0);
    queue.push_back(init);
    let mut edges: Vec<(usize, char, PseudoState, ActionSeqs)> = Vec::new();
    while let Some(y) = queue.pop_front() {
        let from = ids[&y];
        for (z, acts) in t.epsilon_closure(&y) {
            let letters: Vec<char> = match t.atom_of(&z) {
                None => phi.alphabet().letters().to_vec(),
                Some(Kind::Atom(c)) => vec![c],
                _ => vec![],
            };
            if letters.is_empty() {
                continue;
            }
            let target = t.next(&z)?;
            if !ids.contains_key(&target) {
                let q = aut.add_state(format!("q{}", sets.len()));
                ids.insert(target.clone(), q);
                sets.push(target.clone());
                queue.push_back(target.clone());
            }
            for c in letters {
                edges.push((from, c, target.clone(), acts.clone()));
            }
        }
    }
    let ends: Vec<Vec<ActionSeqs>> = sets.iter().map(|s| t.end_closure(s)).collect();
    for (q, e) in ends.iter().enumerate() {
        let fin = match polarity {
            Polarity::B => !e.is_empty(),
            Polarity::S => e.iter().any(|a| !has_check(a)),
        };
        if fin {
            aut.finals.insert(q);
        }
    }
    let mut sink = None;
    for (from, c, target, acts) in edges {
        let to = ids[&target];
        aut.add_transition(from, c, to, acts.clone());
        if polarity == Polarity::S && !aut.finals.contains(&to) {
            for tail in &ends[to] {
                let s = *sink.get_or_insert_with(|| {
                    let s = aut.add_state("end");
                    aut.finals.insert(s);
                    s
                });
                aut.add_transition(from, c, s, concat(&acts, tail));
            }
        }
    }
    let mut state_formulas: Vec<Vec<Node>> =
        sets.iter().map(|s| s.iter().map(|&id| t.node(id)).collect()).collect();
    let mut state_labels: Vec<String> = sets.iter().map(|s| t.render_set(s)).collect();
    if sink.is_some() {
        state_formulas.push(Vec::new());
        state_labels.push("end".into());
    }
    Ok(Compiled { automaton: aut, state_formulas, state_labels })
}

/// B automaton whose value on every word equals the formula's.
pub fn ltl_to_b(phi: &Formula) -> Result<CostAutomaton> {
    Ok(compile(phi, Polarity::B, false)?.automaton)
}

pub fn ltl_to_b_with_states(phi: &Formula) -> Result<Compiled> {
    compile(phi, Polarity::B, false)
}

/// S automaton for an nLTL≤ formula.
pub fn nltl_to_s(phi: &Formula) -> Result<CostAutomaton> {
    Ok(compile(phi, Polarity::S, false)?.automaton)
}

pub fn nltl_to_s_with_states(phi: &Formula) -> Result<Compiled> {
    compile(phi, Polarity::S, false)
}

/// S translation that keeps one merged set member per R# formula and never resets it.
pub fn nltl_to_s_merged(phi: &Formula) -> Result<CostAutomaton> {
    Ok(compile(phi, Polarity::S, true)?.automaton)
}

/// Value of the formula's translation on the empty word.
pub fn accept_epsilon_value(phi: &Formula, polarity: Polarity) -> Result<CostValue> {
    let mut t = Translator::new(phi, polarity)?;
    let ends = t.end_closure(&[t.root()].into());
    Ok(match polarity {
        Polarity::B if ends.is_empty() => CostValue::Infinite,
        Polarity::B => CostValue::ZERO,
        Polarity::S if ends.iter().any(|a| !has_check(a)) => CostValue::Infinite,
        Polarity::S => CostValue::ZERO,
    })
}
