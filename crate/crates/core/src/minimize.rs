//! Syntactic congruence of a recognizer, the minimal quotient, and aperiodicity.
//!
//! Two elements are equivalent when every single-hole context sends both inside the ideal
//! or both outside. Contexts are composites of `s ↦ x·s`, `s ↦ s·x` and `s ↦ (s^ω)♯`.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::semigroup::{transitive_closure, Recognizer, StabSemigroup};

/// A context as a total self-map on elements.
pub type ContextFunction = Vec<usize>;

fn generators<'a>(sg: &'a StabSemigroup, over: &[usize]) -> Vec<Box<dyn Fn(usize) -> usize + 'a>> {
    let mut gens: Vec<Box<dyn Fn(usize) -> usize + 'a>> = Vec::new();
    for &x in over {
        gens.push(Box::new(move |s| sg.mul(x, s)));
        gens.push(Box::new(move |s| sg.mul(s, x)));
    }
    gens.push(Box::new(move |s| sg.omega_sharp(s)));
    gens
}

/// Every composite of the generators, identity included; errors past `limit` maps.
pub fn context_closure(sg: &StabSemigroup, limit: usize) -> Result<Vec<ContextFunction>> {
    let n = sg.len();
    let all: Vec<usize> = (0..n).collect();
    let gens = generators(sg, &all);
    let id: ContextFunction = all.clone();
    let mut seen: HashSet<ContextFunction> = [id.clone()].into();
    let mut order = vec![id.clone()];
    let mut queue = VecDeque::from([id]);
    while let Some(f) = queue.pop_front() {
        for g in &gens {
            let h: ContextFunction = f.iter().map(|&s| g(s)).collect();
            if seen.insert(h.clone()) {
                if seen.len() > limit {
                    return Err(Error::Resource(format!("more than {limit} context functions")));
                }
                order.push(h.clone());
                queue.push_back(h);
            }
        }
    }
    Ok(order)
}

/// Block index of each element of `elems` under the coarsest partition that separates
/// the ideal and is stable under the generators.
fn refine(sg: &StabSemigroup, elems: &[usize], ideal: &BTreeSet<usize>) -> HashMap<usize, usize> {
    let gens = generators(sg, elems);
    let mut block: HashMap<usize, usize> =
        elems.iter().map(|&s| (s, usize::from(ideal.contains(&s)))).collect();
    loop {
        let mut sigs: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        let mut next = HashMap::new();
        for &s in elems {
            let mut sig = vec![block[&s]];
            sig.extend(gens.iter().map(|g| block[&g(s)]));
            let fresh = sigs.len();
            next.insert(s, *sigs.entry(sig).or_insert(fresh));
        }
        let stable = sigs.len() == block.values().collect::<HashSet<_>>().len();
        block = next;
        if stable {
            return block;
        }
    }
}

/// A minimal recognizer and, for each of its elements, the input elements it merges.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub recognizer: Recognizer,
    pub classes: Vec<Vec<usize>>,
}

/// Restricts to the elements generated by the letters, then merges equivalent elements.
pub fn syntactic_quotient(rec: &Recognizer) -> Result<Quotient> {
    let sg = &rec.semigroup;
    let letters: Vec<usize> = rec.alphabet.letters().iter().map(|c| rec.h[c]).collect();
    let elems: Vec<usize> = sg.generated(&letters).into_iter().collect();
    let block = refine(sg, &elems, &rec.ideal);
    // Classes numbered by their first member.
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut class_of: HashMap<usize, usize> = HashMap::new();
    let mut by_block: HashMap<usize, usize> = HashMap::new();
    for &s in &elems {
        let c = *by_block.entry(block[&s]).or_insert_with(|| {
            classes.push(Vec::new());
            classes.len() - 1
        });
        classes[c].push(s);
        class_of.insert(s, c);
    }
    let k = classes.len();
    let mut product = vec![vec![0; k]; k];
    for (i, ci) in classes.iter().enumerate() {
        for (j, cj) in classes.iter().enumerate() {
            let class_of = &class_of;
            let vals: BTreeSet<usize> =
                ci.iter().flat_map(|&s| cj.iter().map(move |&t| class_of[&sg.mul(s, t)])).collect();
            assert_eq!(vals.len(), 1, "products respect the congruence");
            product[i][j] = vals.into_iter().next().expect("nonempty classes");
        }
    }
    let mut sharp = vec![None; k];
    for (i, ci) in classes.iter().enumerate() {
        if product[i][i] == i {
            let vals: BTreeSet<usize> = ci.iter().map(|&s| class_of[&sg.omega_sharp(s)]).collect();
            assert_eq!(vals.len(), 1, "stabilization respects the congruence");
            sharp[i] = vals.into_iter().next();
        }
    }
    let leq = induced_order(&product, &sharp)?;
    let names = classes.iter().map(|c| sg.names[c[0]].clone()).collect();
    let neutral = sg.neutral.and_then(|x| class_of.get(&x).copied());
    let semigroup = StabSemigroup { names, product, leq, sharp, neutral };
    let h = rec.h.iter().map(|(&c, &x)| (c, class_of[&x])).collect();
    let ideal = rec.ideal.iter().filter_map(|x| class_of.get(x).copied()).collect();
    let recognizer = Recognizer::new(semigroup, &rec.alphabet, h, ideal, Some(rec.height))?;
    Ok(Quotient { recognizer, classes })
}

/// Least order with `e♯ ≤ e`, stable under products, stabilization and transitivity.
fn induced_order(product: &[Vec<usize>], sharp: &[Option<usize>]) -> Result<Vec<Vec<bool>>> {
    let k = product.len();
    let mut leq = vec![vec![false; k]; k];
    for (x, row) in leq.iter_mut().enumerate() {
        row[x] = true;
    }
    for (e, s) in sharp.iter().enumerate() {
        if let Some(s) = *s {
            leq[s][e] = true;
        }
    }
    loop {
        let before = leq.clone();
        for x in 0..k {
            for y in 0..k {
                if !before[x][y] {
                    continue;
                }
                for z in 0..k {
                    leq[product[z][x]][product[z][y]] = true;
                    leq[product[x][z]][product[y][z]] = true;
                }
                if let (Some(sx), Some(sy)) = (sharp[x], sharp[y]) {
                    leq[sx][sy] = true;
                }
            }
        }
        transitive_closure(&mut leq);
        if leq == before {
            break;
        }
    }
    for x in 0..k {
        for y in 0..x {
            if leq[x][y] && leq[y][x] {
                return Err(Error::Domain("the induced order on the quotient is not antisymmetric".into()));
            }
        }
    }
    Ok(leq)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Aperiodicity {
    /// Least `k` with `s^(k+1) = s^k` for every element.
    Aperiodic(usize),
    /// An element whose powers cycle with period above 1.
    Periodic(usize),
}

pub fn is_aperiodic(sg: &StabSemigroup) -> Aperiodicity {
    let n = sg.len();
    if let Some(s) = (0..n).find(|&s| sg.power(s, n + 1) != sg.power(s, n)) {
        return Aperiodicity::Periodic(s);
    }
    let k = (1..=n)
        .find(|&k| (0..n).all(|s| sg.power(s, k + 1) == sg.power(s, k)))
        .expect("k = |S| works");
    Aperiodicity::Aperiodic(k)
}

/// Aperiodicity of the minimal quotient.
pub fn is_ltl_definable(rec: &Recognizer) -> Result<bool> {
    let q = syntactic_quotient(rec)?;
    Ok(matches!(is_aperiodic(&q.recognizer.semigroup), Aperiodicity::Aperiodic(_)))
}

/// Equivalence classes computed directly from an explicit context set.
pub fn classes_by_contexts(rec: &Recognizer, limit: usize) -> Result<Vec<BTreeSet<usize>>> {
    let sg = &rec.semigroup;
    let letters: Vec<usize> = rec.alphabet.letters().iter().map(|c| rec.h[c]).collect();
    let elems = sg.generated(&letters);
    let ctx = context_closure(sg, limit)?;
    let mut groups: BTreeMap<Vec<bool>, BTreeSet<usize>> = BTreeMap::new();
    for &s in &elems {
        let profile = ctx.iter().map(|f| rec.ideal.contains(&f[s])).collect();
        groups.entry(profile).or_default().insert(s);
    }
    Ok(groups.into_values().collect())
}
