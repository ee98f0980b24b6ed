//! Finite stabilization semigroups, recognition by factorization trees, and ω♯-expressions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::actions::{s_leq, s_product, S_ELEMS};
use crate::cost::CostValue;
use crate::error::{Error, Result};
use crate::word::{Alphabet, Word};

/// Elements are `0..len()`; `leq[x][y]` means `x ≤ y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabSemigroup {
    pub names: Vec<String>,
    pub product: Vec<Vec<usize>>,
    pub leq: Vec<Vec<bool>>,
    pub sharp: Vec<Option<usize>>,
    pub neutral: Option<usize>,
}

impl StabSemigroup {
    /// Takes the reflexive-transitive closure of `order`.
    pub fn new(
        names: Vec<String>,
        product: Vec<Vec<usize>>,
        order: &[(usize, usize)],
        sharp: Vec<Option<usize>>,
        neutral: Option<usize>,
    ) -> Result<Self> {
        let n = names.len();
        if n == 0 {
            return Err(Error::Domain("a semigroup needs at least one element".into()));
        }
        let shape_ok = product.len() == n
            && product.iter().all(|row| row.len() == n && row.iter().all(|&x| x < n))
            && sharp.len() == n
            && sharp.iter().flatten().all(|&x| x < n)
            && order.iter().all(|&(x, y)| x < n && y < n)
            && neutral.map_or(true, |x| x < n);
        if !shape_ok {
            return Err(Error::Domain("semigroup tables do not match the element count".into()));
        }
        let mut leq = vec![vec![false; n]; n];
        for (x, row) in leq.iter_mut().enumerate() {
            row[x] = true;
        }
        for &(x, y) in order {
            leq[x][y] = true;
        }
        transitive_closure(&mut leq);
        Ok(StabSemigroup { names, product, leq, sharp, neutral })
    }

    /// The seven S-actions with their table, order and stabilization.
    pub fn s_actions() -> Self {
        let idx = |x: crate::actions::SElem| x.index();
        let names = S_ELEMS.iter().map(|x| x.name().to_string()).collect();
        let product = S_ELEMS
            .iter()
            .map(|&x| S_ELEMS.iter().map(|&y| idx(s_product(x, y))).collect())
            .collect();
        let leq = S_ELEMS.iter().map(|&x| S_ELEMS.iter().map(|&y| s_leq(x, y)).collect()).collect();
        let sharp = S_ELEMS.iter().map(|&x| crate::actions::s_sharp(x).ok().map(idx)).collect();
        StabSemigroup { names, product, leq, sharp, neutral: Some(idx(crate::actions::SElem::E)) }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.product[x][y]
    }

    pub fn mul_all(&self, xs: &[usize]) -> Option<usize> {
        xs.iter().copied().reduce(|a, b| self.mul(a, b))
    }

    pub fn is_idempotent(&self, x: usize) -> bool {
        self.mul(x, x) == x
    }

    pub fn idempotents(&self) -> Vec<usize> {
        (0..self.len()).filter(|&x| self.is_idempotent(x)).collect()
    }

    /// `x^k` for `k ≥ 1`.
    pub fn power(&self, x: usize, k: usize) -> usize {
        (1..k.max(1)).fold(x, |acc, _| self.mul(acc, x))
    }

    /// The unique idempotent among the powers of `x`.
    pub fn idempotent_power(&self, x: usize) -> usize {
        let mut p = x;
        loop {
            if self.is_idempotent(p) {
                return p;
            }
            p = self.mul(p, x);
        }
    }

    /// `(x^ω)♯`, total on every element of a valid semigroup.
    pub fn omega_sharp(&self, x: usize) -> usize {
        let e = self.idempotent_power(x);
        self.sharp[e].expect("sharp is defined on idempotents")
    }

    pub fn sharp_of(&self, x: usize) -> Result<usize> {
        self.sharp[x].ok_or_else(|| Error::Domain(format!("sharp undefined on {}", self.names[x])))
    }

    /// Every violated axiom, one line each; empty when valid.
    pub fn validate_axioms(&self) -> Vec<String> {
        let n = self.len();
        let name = |x: usize| self.names[x].as_str();
        let mut out = Vec::new();
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    if self.mul(self.mul(x, y), z) != self.mul(x, self.mul(y, z)) {
                        out.push(format!("associativity fails on ({}, {}, {})", name(x), name(y), name(z)));
                    }
                }
            }
        }
        for x in 0..n {
            if !self.leq[x][x] {
                out.push(format!("order is not reflexive at {}", name(x)));
            }
            for y in 0..n {
                if x != y && self.leq[x][y] && self.leq[y][x] {
                    out.push(format!("order is not antisymmetric on {} and {}", name(x), name(y)));
                }
                for z in 0..n {
                    if self.leq[x][y] && self.leq[y][z] && !self.leq[x][z] {
                        out.push(format!("order is not transitive on {}, {}, {}", name(x), name(y), name(z)));
                    }
                    if self.leq[x][y]
                        && !(self.leq[self.mul(z, x)][self.mul(z, y)] && self.leq[self.mul(x, z)][self.mul(y, z)])
                    {
                        out.push(format!(
                            "order is not compatible: {} <= {} but not after multiplying by {}",
                            name(x),
                            name(y),
                            name(z)
                        ));
                    }
                }
            }
        }
        for x in 0..n {
            match (self.is_idempotent(x), self.sharp[x]) {
                (true, None) => out.push(format!("sharp undefined on idempotent {}", name(x))),
                (false, Some(_)) => out.push(format!("sharp defined on non-idempotent {}", name(x))),
                (true, Some(s)) => {
                    if self.sharp[s] != Some(s) {
                        out.push(format!("({}#)# differs from {}#", name(x), name(x)));
                    }
                    if !self.leq[s][x] {
                        out.push(format!("{}# is not below {}", name(x), name(x)));
                    }
                    if self.mul(x, s) != s || self.mul(s, x) != s || self.mul(s, s) != s {
                        out.push(format!("{}# is not absorbed by {}", name(x), name(x)));
                    }
                }
                (false, None) => {}
            }
        }
        for a in 0..n {
            for b in 0..n {
                let (ab, ba) = (self.mul(a, b), self.mul(b, a));
                if self.is_idempotent(ab) && self.is_idempotent(ba) {
                    if let (Some(l), Some(r)) = (self.sharp[ab], self.sharp[ba]) {
                        if l != self.mul(self.mul(a, r), b) {
                            out.push(format!("(ab)# != a(ba)#b for a={}, b={}", name(a), name(b)));
                        }
                    }
                }
            }
        }
        let ids = self.idempotents();
        for &e in &ids {
            for &f in &ids {
                if self.leq[e][f] {
                    if let (Some(se), Some(sf)) = (self.sharp[e], self.sharp[f]) {
                        if !self.leq[se][sf] {
                            out.push(format!("{} <= {} but not {}# <= {}#", name(e), name(f), name(e), name(f)));
                        }
                    }
                }
            }
        }
        if let Some(one) = self.neutral {
            if (0..n).any(|x| self.mul(one, x) != x || self.mul(x, one) != x) {
                out.push(format!("{} is not neutral", name(one)));
            }
            if self.sharp[one] != Some(one) {
                out.push(format!("{}# differs from {}", name(one), name(one)));
            }
        }
        out
    }

    /// Elements generated by `gens` under product and `s ↦ (s^ω)♯`.
    pub fn generated(&self, gens: &[usize]) -> BTreeSet<usize> {
        let mut set: BTreeSet<usize> = gens.iter().copied().collect();
        loop {
            let mut added = Vec::new();
            for &x in &set {
                let s = self.omega_sharp(x);
                if !set.contains(&s) {
                    added.push(s);
                }
                for &y in &set {
                    let p = self.mul(x, y);
                    if !set.contains(&p) {
                        added.push(p);
                    }
                }
            }
            if added.is_empty() {
                return set;
            }
            set.extend(added);
        }
    }
}

pub(crate) fn transitive_closure(rel: &mut [Vec<bool>]) {
    let n = rel.len();
    for k in 0..n {
        for x in 0..n {
            if rel[x][k] {
                for y in 0..n {
                    if rel[k][y] {
                        rel[x][y] = true;
                    }
                }
            }
        }
    }
}

/// A semigroup with a letter morphism, an accepting ideal and a tree height bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Recognizer {
    pub semigroup: StabSemigroup,
    pub alphabet: Alphabet,
    pub h: BTreeMap<char, usize>,
    pub ideal: BTreeSet<usize>,
    pub height: usize,
}

impl Recognizer {
    pub fn new(
        semigroup: StabSemigroup,
        alphabet: &Alphabet,
        h: BTreeMap<char, usize>,
        ideal: BTreeSet<usize>,
        height: Option<usize>,
    ) -> Result<Self> {
        let height = height.unwrap_or(3 * semigroup.len());
        let rec = Recognizer { semigroup, alphabet: alphabet.clone(), h, ideal, height };
        let problems = rec.validate();
        if let Some(p) = problems.first() {
            return Err(Error::Domain(p.clone()));
        }
        Ok(rec)
    }

    pub fn validate(&self) -> Vec<String> {
        let sg = &self.semigroup;
        let mut out = Vec::new();
        for &c in self.alphabet.letters() {
            match self.h.get(&c) {
                Some(&x) if x < sg.len() => {}
                _ => out.push(format!("letter '{c}' has no image")),
            }
        }
        for &c in self.h.keys() {
            if !self.alphabet.contains(c) {
                out.push(format!("image given for '{c}' outside the alphabet"));
            }
        }
        for &x in &self.ideal {
            if x >= sg.len() {
                out.push(format!("ideal member #{x} is not an element"));
                continue;
            }
            for y in 0..sg.len() {
                if sg.leq[y][x] && !self.ideal.contains(&y) {
                    out.push(format!(
                        "ideal is not downward closed: {} <= {} is missing",
                        sg.names[y], sg.names[x]
                    ));
                }
            }
        }
        if self.height < 3 {
            out.push(format!("height bound {} is below 3", self.height));
        }
        out
    }

    pub fn image(&self, u: &Word) -> Result<Vec<usize>> {
        if u.alphabet() != &self.alphabet {
            return Err(Error::Alphabet(format!("word over {} for a recognizer over {}", u.alphabet(), self.alphabet)));
        }
        Ok(u.letters().iter().map(|c| self.h[c]).collect())
    }
}

/// Values of the `n`-trees over `w` of height at most `height`.
///
/// Leaves have height 0. Idempotent nodes take 2 to `n` children, stabilization nodes
/// more than `n` (one child is allowed when `n = 0`).
pub fn achievable_values(sg: &StabSemigroup, w: &[usize], n: usize, height: usize) -> Result<BTreeSet<usize>> {
    if w.is_empty() {
        return Err(Error::Domain("trees need a nonempty sequence".into()));
    }
    let len = w.len();
    let size = sg.len();
    // vals[i][j][x]: x is reachable on w[i..j].
    let mut vals = vec![vec![vec![false; size]; len + 1]; len + 1];
    for (i, &x) in w.iter().enumerate() {
        vals[i][i + 1][x] = true;
    }
    let ids = sg.idempotents();
    for _ in 0..height {
        let mut next = vals.clone();
        for i in 0..len {
            for j in i + 2..=len {
                for m in i + 1..j {
                    for x in (0..size).filter(|&x| vals[i][m][x]) {
                        for y in (0..size).filter(|&y| vals[m][j][y]) {
                            next[i][j][sg.mul(x, y)] = true;
                        }
                    }
                }
            }
        }
        for &e in &ids {
            let sharp = sg.sharp[e];
            for i in 0..len {
                // parts[j][k]: w[i..j] splits into k blocks, each reaching e.
                let mut parts = vec![vec![false; len + 1]; len + 1];
                parts[i][0] = true;
                for j in i + 1..=len {
                    for m in i..j {
                        if !vals[m][j][e] {
                            continue;
                        }
                        for k in 0..len {
                            if parts[m][k] {
                                parts[j][k + 1] = true;
                            }
                        }
                    }
                    for k in 1..=len {
                        if !parts[j][k] {
                            continue;
                        }
                        if k > n {
                            if let Some(s) = sharp {
                                next[i][j][s] = true;
                            }
                        } else if k >= 2 {
                            next[i][j][e] = true;
                        }
                    }
                }
            }
        }
        if next == vals {
            break;
        }
        vals = next;
    }
    Ok((0..size).filter(|&x| vals[0][len][x]).collect())
}

/// `inf { n : no tree value over h(u) lies in the ideal }`.
pub fn recognize(rec: &Recognizer, u: &Word) -> Result<CostValue> {
    if u.is_empty() {
        return Err(Error::Domain("recognition is defined on nonempty words".into()));
    }
    let w = rec.image(u)?;
    // Beyond n = |u| no stabilization node exists, so values stop changing.
    for n in 0..=u.len() {
        let vals = achievable_values(&rec.semigroup, &w, n, rec.height)?;
        if vals.is_disjoint(&rec.ideal) {
            return Ok(CostValue::Finite(n as u64));
        }
    }
    Ok(CostValue::Infinite)
}

/// Expressions over letters with `^w` (idempotent power), `^w#` and bare `^#`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Letter(char),
    Cat(Box<Expr>, Box<Expr>),
    Omega(Box<Expr>),
    OmegaSharp(Box<Expr>),
    Sharp(Box<Expr>),
}

impl Expr {
    pub fn parse(text: &str) -> Result<Expr> {
        let chars: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
        let mut p = ExprParser { chars, pos: 0 };
        let e = p.seq()?;
        if p.pos != p.chars.len() {
            return Err(Error::Syntax { pos: p.pos, msg: format!("unexpected '{}'", p.chars[p.pos]) });
        }
        Ok(e)
    }

    /// Uses only letters, concatenation, `^w` and `^w#`.
    pub fn is_omega_sharp(&self) -> bool {
        match self {
            Expr::Letter(_) => true,
            Expr::Cat(l, r) => l.is_omega_sharp() && r.is_omega_sharp(),
            Expr::Omega(x) | Expr::OmegaSharp(x) => x.is_omega_sharp(),
            Expr::Sharp(_) => false,
        }
    }

    /// Uses only letters, concatenation and bare `^#`.
    pub fn is_sharp_expr(&self) -> bool {
        match self {
            Expr::Letter(_) => true,
            Expr::Cat(l, r) => l.is_sharp_expr() && r.is_sharp_expr(),
            Expr::Sharp(x) => x.is_sharp_expr(),
            Expr::Omega(_) | Expr::OmegaSharp(_) => false,
        }
    }

    fn letters_into(&self, out: &mut BTreeSet<char>) {
        match self {
            Expr::Letter(c) => {
                out.insert(*c);
            }
            Expr::Cat(l, r) => {
                l.letters_into(out);
                r.letters_into(out);
            }
            Expr::Omega(x) | Expr::OmegaSharp(x) | Expr::Sharp(x) => x.letters_into(out),
        }
    }

    pub fn letters(&self) -> BTreeSet<char> {
        let mut out = BTreeSet::new();
        self.letters_into(&mut out);
        out
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let operand = |f: &mut fmt::Formatter<'_>, x: &Expr| match x {
            Expr::Letter(c) => write!(f, "{c}"),
            _ => write!(f, "({x})"),
        };
        match self {
            Expr::Letter(c) => write!(f, "{c}"),
            Expr::Cat(l, r) => write!(f, "{l}{r}"),
            Expr::Omega(x) => {
                operand(f, x)?;
                write!(f, "^w")
            }
            Expr::OmegaSharp(x) => {
                operand(f, x)?;
                write!(f, "^w#")
            }
            Expr::Sharp(x) => {
                operand(f, x)?;
                write!(f, "^#")
            }
        }
    }
}

struct ExprParser {
    chars: Vec<char>,
    pos: usize,
}

impl ExprParser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn seq(&mut self) -> Result<Expr> {
        let mut acc: Option<Expr> = None;
        while let Some(c) = self.peek() {
            if c == ')' {
                break;
            }
            let t = self.term()?;
            acc = Some(match acc {
                None => t,
                Some(a) => Expr::Cat(Box::new(a), Box::new(t)),
            });
        }
        acc.ok_or_else(|| Error::Syntax { pos: self.pos, msg: "expected an expression".into() })
    }

    fn term(&mut self) -> Result<Expr> {
        let mut e = match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.seq()?;
                if self.peek() != Some(')') {
                    return Err(Error::Syntax { pos: self.pos, msg: "expected ')'".into() });
                }
                self.pos += 1;
                e
            }
            Some(c) if c.is_alphabetic() && c != 'ω' => {
                self.pos += 1;
                Expr::Letter(c)
            }
            Some(c) => return Err(Error::Syntax { pos: self.pos, msg: format!("unexpected '{c}'") }),
            None => return Err(Error::Syntax { pos: self.pos, msg: "unexpected end".into() }),
        };
        while self.peek() == Some('^') {
            self.pos += 1;
            let is_sharp = |c: Option<char>| matches!(c, Some('#') | Some('♯'));
            match self.peek() {
                Some('w') | Some('ω') => {
                    self.pos += 1;
                    if is_sharp(self.peek()) {
                        self.pos += 1;
                        e = Expr::OmegaSharp(Box::new(e));
                    } else {
                        e = Expr::Omega(Box::new(e));
                    }
                }
                c if is_sharp(c) => {
                    self.pos += 1;
                    e = Expr::Sharp(Box::new(e));
                }
                _ => return Err(Error::Syntax { pos: self.pos, msg: "expected w, w# or # after ^".into() }),
            }
        }
        Ok(e)
    }
}

/// Value of an expression; a bare `♯` on a non-idempotent value is an error.
pub fn eval_expr(sg: &StabSemigroup, h: &BTreeMap<char, usize>, e: &Expr) -> Result<usize> {
    Ok(match e {
        Expr::Letter(c) => *h.get(c).ok_or(Error::LetterOutsideAlphabet(*c))?,
        Expr::Cat(l, r) => sg.mul(eval_expr(sg, h, l)?, eval_expr(sg, h, r)?),
        Expr::Omega(x) => sg.idempotent_power(eval_expr(sg, h, x)?),
        Expr::OmegaSharp(x) => sg.omega_sharp(eval_expr(sg, h, x)?),
        Expr::Sharp(x) => {
            let v = eval_expr(sg, h, x)?;
            if !sg.is_idempotent(v) {
                return Err(Error::Domain(format!(
                    "expression {e} is not well-formed: {} is not idempotent",
                    sg.names[v]
                )));
            }
            sg.sharp_of(v)?
        }
    })
}

/// The word `E[ω ← k, ♯ ← n]`.
pub fn instantiate(e: &Expr, k: usize, n: usize) -> Vec<char> {
    match e {
        Expr::Letter(c) => vec![*c],
        Expr::Cat(l, r) => {
            let mut v = instantiate(l, k, n);
            v.extend(instantiate(r, k, n));
            v
        }
        Expr::Omega(x) => instantiate(x, k, n).repeat(k),
        Expr::OmegaSharp(x) => instantiate(x, k, n).repeat(k * n),
        Expr::Sharp(x) => instantiate(x, k, n).repeat(n),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExprClass {
    /// Values along `n` stay bounded.
    Bounded,
    /// Values along `n` tend to infinity.
    Divergent,
}

impl fmt::Display for ExprClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExprClass::Bounded => "bounded",
            ExprClass::Divergent => "divergent",
        })
    }
}

/// Divergent iff the expression evaluates into the ideal.
pub fn classify(rec: &Recognizer, e: &Expr) -> Result<ExprClass> {
    let v = eval_expr(&rec.semigroup, &rec.h, e)?;
    Ok(if rec.ideal.contains(&v) { ExprClass::Divergent } else { ExprClass::Bounded })
}
