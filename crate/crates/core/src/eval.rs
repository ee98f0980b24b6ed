//! Reference semantics of LTL≤ and nLTL≤ on finite words.
//!
//! Positions run over `0..=|u|`; position `|u|` is past the last letter, where `END` holds.
//! The budget `n` is the single global value of `N`.
//!
//! `φ R# ψ` holds at `i` when every `j` with `i ≤ j ≤ |u|` satisfies `ψ` or is preceded by
//! at least `n` positions of `[i, j)` satisfying `φ`. Including `j = i` makes
//! `(u, n) ⊭ φ ⟺ (u, n+1) ⊨ dualize(φ)` hold for every LTL≤ formula.

use crate::cost::CostValue;
use crate::error::{Error, Result};
use crate::formula::{Formula, Node};
use crate::word::Word;

/// Truth value of `node` at every position `0..=|letters|`.
pub fn truth_table(node: &Node, letters: &[char], n: u64) -> Vec<bool> {
    let len = letters.len();
    match node {
        Node::Atom(a) => (0..=len).map(|i| i < len && letters[i] == *a).collect(),
        Node::End => (0..=len).map(|i| i == len).collect(),
        Node::And(l, r) => {
            let (l, r) = (truth_table(l, letters, n), truth_table(r, letters, n));
            l.iter().zip(&r).map(|(x, y)| *x && *y).collect()
        }
        Node::Or(l, r) => {
            let (l, r) = (truth_table(l, letters, n), truth_table(r, letters, n));
            l.iter().zip(&r).map(|(x, y)| *x || *y).collect()
        }
        Node::Next(x) => {
            let x = truth_table(x, letters, n);
            (0..=len).map(|i| i < len && x[i + 1]).collect()
        }
        Node::Until(l, r) => {
            let (phi, psi) = (truth_table(l, letters, n), truth_table(r, letters, n));
            let mut out = vec![false; len + 1];
            let mut later = false;
            for i in (0..=len).rev() {
                later = psi[i] || (phi[i] && later);
                out[i] = later;
            }
            out
        }
        Node::UntilLeqN(l, r) => {
            let (phi, psi) = (truth_table(l, letters, n), truth_table(r, letters, n));
            (0..=len)
                .map(|i| {
                    let mut mistakes = 0u64;
                    for j in i..=len {
                        if psi[j] {
                            return true;
                        }
                        if !phi[j] {
                            mistakes += 1;
                            if mistakes > n {
                                return false;
                            }
                        }
                    }
                    false
                })
                .collect()
        }
        Node::ReleaseGeqN(l, r) => {
            let (phi, psi) = (truth_table(l, letters, n), truth_table(r, letters, n));
            (0..=len)
                .map(|i| {
                    let mut seen = 0u64;
                    for j in i..=len {
                        if !psi[j] && seen < n {
                            return false;
                        }
                        if phi[j] {
                            seen += 1;
                        }
                    }
                    true
                })
                .collect()
        }
    }
}

/// `(u, n, i) ⊨ φ`.
pub fn models(u: &Word, n: u64, phi: &Formula, i: usize) -> Result<bool> {
    if i > u.len() {
        return Err(Error::Domain(format!("position {i} is outside 0..={}", u.len())));
    }
    Ok(truth_table(phi.root(), u.letters(), n)[i])
}

fn holds(phi: &Formula, u: &Word, n: u64) -> bool {
    truth_table(phi.root(), u.letters(), n)[0]
}

/// `inf { n : (u, n) ⊨ φ }` for an LTL≤ formula.
///
/// A `U#` never counts more than `|u|` mistakes, so budgets above `|u|` add nothing.
pub fn sem_inf(phi: &Formula, u: &Word) -> CostValue {
    (0..=u.len() as u64)
        .find(|&n| holds(phi, u, n))
        .map_or(CostValue::Infinite, CostValue::Finite)
}

/// `sup { n : (u, n) ⊨ φ }` for an nLTL≤ formula, with `sup ∅ = 0`.
pub fn sem_sup(phi: &Formula, u: &Word) -> CostValue {
    let top = u.len() as u64 + 2;
    if holds(phi, u, top) {
        return CostValue::Infinite;
    }
    (0..top)
        .rev()
        .find(|&n| holds(phi, u, n))
        .map_or(CostValue::ZERO, CostValue::Finite)
}
