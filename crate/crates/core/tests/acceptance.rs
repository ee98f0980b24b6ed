//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use costltl::automata::{contract_b, eval_b, eval_s, CostAutomaton};
use costltl::bounded::{bounded_formula, bounded_onthefly, run_semigroup_closure, Method, Verdict, CLOSURE_LIMIT};
use costltl::eval::{sem_inf, sem_sup};
use costltl::format::{parse_automaton, parse_semigroup, serialize_semigroup, SemigroupFile};
use costltl::minimize::{is_aperiodic, is_ltl_definable, syntactic_quotient, Aperiodicity};
use costltl::semigroup::{recognize, StabSemigroup};
use costltl::translate::{ltl_to_b, nltl_to_s};
use costltl::{CostValue, Formula, Node, Word};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Words of length at most this are checked by the exactness and contraction criteria.
const EXACT_WORD_LEN: usize = 7;
const COUNT_WORD_LEN: usize = 10;
const BOUNDED_WORD_LEN: usize = 8;
const BOUNDED_EXAMPLE_MAX: u64 = 2;
const PUMP_LIMIT: usize = 12;
const WITNESS_PUMPS: usize = 6;
const DUALITY_PAIRS: usize = 200;
const DUALITY_WORD_LEN: usize = 6;
const DUALITY_TOLERANCE: u64 = 1;
const ALGEBRA_BUDGET: Duration = Duration::from_secs(1);
const MIN_CORPUS: usize = 30;

type Outcome = Result<String, String>;

fn fixture(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name);
    fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn sg_fixture(name: &str) -> SemigroupFile {
    parse_semigroup(&fixture(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fin(n: usize) -> CostValue {
    CostValue::Finite(n as u64)
}

/// Nesting depth with purely propositional subtrees (literals, `TRUE`) counted as leaves,
/// so `F x` and `!a` weigh what they do in the surface syntax.
fn surface_depth(n: &Node) -> usize {
    let temporal = |m: &Node| !matches!(m, Node::Atom(_) | Node::End | Node::And(..) | Node::Or(..));
    if !n.preorder().into_iter().any(temporal) {
        return 0;
    }
    1 + n.children().into_iter().map(surface_depth).max().unwrap_or(0)
}

fn exact_translation() -> Outcome {
    let corpus = common::corpus();
    ensure(corpus.len() >= MIN_CORPUS, || format!("corpus has {} formulae", corpus.len()))?;
    for phi in &corpus {
        let counted = phi.root().preorder().into_iter().filter(|n| matches!(n, Node::UntilLeqN(..))).count();
        ensure(surface_depth(phi.root()) <= 5 && counted <= 2, || format!("{phi} is outside the corpus shape"))?;
    }
    let words = common::ab().words_up_to(EXACT_WORD_LEN);
    let mut checks = 0;
    for phi in &corpus {
        let aut = ltl_to_b(phi).map_err(|e| format!("{phi}: {e}"))?;
        for u in &words {
            let (got, want) = (eval_b(&aut, u).map_err(|e| e.to_string())?, sem_inf(phi, u));
            ensure(got == want, || format!("{phi} on {u}: automaton {got}, formula {want}"))?;
            checks += 1;
        }
    }
    Ok(format!("{} formulae x {} words, {checks} exact matches", corpus.len(), words.len()))
}

fn counting_formula() -> Outcome {
    let phi = common::parse("!a U# END");
    let aut = ltl_to_b(&phi).map_err(|e| e.to_string())?;
    let words = common::ab().words_up_to(COUNT_WORD_LEN);
    let words: Vec<&Word> = words.iter().filter(|u| !u.is_empty()).collect();
    ensure(words.len() == 2046, || format!("{} words", words.len()))?;
    for u in &words {
        let want = CostValue::Finite(u.count_letter('a').unwrap());
        let (s, b) = (sem_inf(&phi, u), eval_b(&aut, u).map_err(|e| e.to_string())?);
        ensure(s == want && b == want, || format!("{u}: formula {s}, automaton {b}, |u|_a {want}"))?;
    }
    Ok(format!("{} words via formula and automaton", words.len()))
}

fn bounded_examples() -> Outcome {
    let ab = common::ab();
    let bounded = common::parse("(b | X a | X F a) U# END");
    let unbounded = common::parse("(a | X a | X F a) U# END");
    for method in [Method::OnTheFly, Method::Closure] {
        let v = bounded_formula(&bounded, method).map_err(|e| e.to_string())?;
        ensure(v.is_bounded(), || format!("{bounded}: {v} by {method:?}"))?;
        let v = bounded_formula(&unbounded, method).map_err(|e| e.to_string())?;
        ensure(!v.is_bounded(), || format!("{unbounded}: {v} by {method:?}"))?;
    }
    for n in 0..=PUMP_LIMIT {
        let u = Word::from_letters(&ab, vec!['b'; n]).unwrap();
        let v = sem_inf(&unbounded, &u);
        ensure(v == fin(n), || format!("{unbounded} on b^{n} is {v}"))?;
    }
    let words = ab.words_up_to(BOUNDED_WORD_LEN);
    let (argmax, max) = words.iter().map(|u| (u, sem_inf(&bounded, u))).max_by_key(|p| p.1).unwrap();
    ensure(max == CostValue::Finite(BOUNDED_EXAMPLE_MAX), || {
        format!("max of {bounded} over words <= {BOUNDED_WORD_LEN} is {max} (at {argmax}), expected {BOUNDED_EXAMPLE_MAX}")
    })?;
    Ok(format!("verdicts by both methods, b^n for n <= {PUMP_LIMIT}, max {max}"))
}

/// Product and sharp of the action semigroup, typed row by row from the published array.
fn action_table() -> (Vec<&'static str>, Vec<Vec<&'static str>>, Vec<Option<&'static str>>) {
    let names = vec!["omega", "i", "e", "r", "cromega", "cr", "bot"];
    let rows = [
        "omega omega omega r omega r bot",
        "omega i i r cromega cr bot",
        "omega i e r cromega cr bot",
        "omega r r r bot bot bot",
        "cromega cromega cromega cr cromega cr bot",
        "cromega cr cr cr bot bot bot",
        "bot bot bot bot bot bot bot",
    ];
    let product = rows.iter().map(|r| r.split(' ').collect()).collect();
    let sharp = vec![Some("omega"), Some("omega"), Some("e"), Some("r"), Some("cromega"), None, Some("bot")];
    (names, product, sharp)
}

fn action_algebra() -> Outcome {
    let start = Instant::now();
    let file = sg_fixture("saction.sg");
    let sg = &file.semigroup;
    ensure(*sg == StabSemigroup::s_actions(), || "fixture differs from the built-in table".into())?;
    ensure(serialize_semigroup(sg, None) == fixture("saction.sg"), || "fixture does not re-serialize".into())?;
    let (names, product, sharp) = action_table();
    ensure(sg.names == names, || format!("element names {:?}", sg.names))?;
    let n = sg.len();
    for x in 0..n {
        for y in 0..n {
            let got = &sg.names[sg.mul(x, y)];
            ensure(got == product[x][y], || format!("{} . {} = {got}, table says {}", names[x], names[y], product[x][y]))?;
        }
        let got = sg.sharp[x].map(|s| sg.names[s].as_str());
        ensure(got == sharp[x], || format!("{}# = {got:?}, table says {:?}", names[x], sharp[x]))?;
    }
    let mut triples = 0;
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                ensure(sg.mul(sg.mul(x, y), z) == sg.mul(x, sg.mul(y, z)), || format!("({x}{y}){z}"))?;
                triples += 1;
            }
        }
    }
    for x in 0..n {
        for y in 0..n {
            if !sg.leq[x][y] {
                continue;
            }
            for z in 0..n {
                ensure(sg.leq[sg.mul(x, z)][sg.mul(y, z)] && sg.leq[sg.mul(z, x)][sg.mul(z, y)], || {
                    format!("order not compatible at {} <= {} with {}", names[x], names[y], names[z])
                })?;
            }
            if let (Some(a), Some(b)) = (sg.sharp[x], sg.sharp[y]) {
                ensure(sg.leq[a][b], || format!("sharp not monotone at {} <= {}", names[x], names[y]))?;
            }
        }
    }
    for e in sg.idempotents() {
        let s = sg.sharp[e].ok_or_else(|| format!("{}# undefined on an idempotent", names[e]))?;
        ensure(sg.mul(s, s) == s && sg.mul(e, s) == s && sg.mul(s, e) == s, || format!("{}# not absorbing", names[e]))?;
        ensure(sg.leq[s][e], || format!("{}# not below {}", names[e], names[e]))?;
        ensure(sg.sharp[s] == Some(s), || format!("({})## differs", names[e]))?;
    }
    for x in 0..n {
        for y in 0..n {
            let (xy, yx) = (sg.mul(x, y), sg.mul(y, x));
            if let (Some(l), Some(r)) = (sg.sharp[xy], sg.sharp[yx]) {
                ensure(sg.mul(l, x) == sg.mul(x, r), || format!("(xy)#x != x(yx)# at {},{}", names[x], names[y]))?;
            }
        }
    }
    let problems = sg.validate_axioms();
    ensure(problems.is_empty(), || problems.join("; "))?;
    let elapsed = start.elapsed();
    ensure(elapsed < ALGEBRA_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!("{triples} triples associative, table bit-exact, {elapsed:?}"))
}

fn check_witnesses(name: &str, aut: &CostAutomaton) -> Result<bool, String> {
    let fly = bounded_onthefly(aut).map_err(|e| format!("{name}: {e}"))?;
    let closure = run_semigroup_closure(aut, CLOSURE_LIMIT).map_err(|e| format!("{name}: {e}"))?;
    let (a, b) = (fly.verdict.is_bounded(), closure.verdict.is_bounded());
    ensure(a == b, || format!("{name}: on-the-fly {}, closure {}", fly.verdict, closure.verdict))?;
    if let Verdict::Unbounded(w) = &fly.verdict {
        let w = w.as_ref().ok_or_else(|| format!("{name}: unbounded without a witness"))?;
        for n in 1..=WITNESS_PUMPS {
            let u = w.word(aut, n).map_err(|e| e.to_string())?;
            let v = eval_s(aut, &u).map_err(|e| e.to_string())?;
            ensure(v >= fin(n), || format!("{name}: witness {w} at n = {n} is {u} with value {v}"))?;
        }
    }
    Ok(a)
}

fn oracle_agreement() -> Outcome {
    let mut autos = Vec::new();
    for phi in common::corpus() {
        let d = phi.dualize().map_err(|e| e.to_string())?;
        autos.push((phi.to_string(), nltl_to_s(&d).map_err(|e| format!("{phi}: {e}"))?));
    }
    for name in ["count_a_s.aut", "shortest_a_block_s.aut"] {
        autos.push((name.to_string(), parse_automaton(&fixture(name)).map_err(|e| e.to_string())?));
    }
    let mut bounded = 0;
    for (name, aut) in &autos {
        bounded += usize::from(check_witnesses(name, aut)?);
    }
    Ok(format!("{} automata agree ({bounded} bounded), witnesses reach n for n <= {WITNESS_PUMPS}", autos.len()))
}

fn contraction_bound() -> Outcome {
    let words = common::ab().words_up_to(EXACT_WORD_LEN);
    let corpus = common::corpus();
    let mut worst_k = 0;
    for phi in &corpus {
        let aut = ltl_to_b(phi).map_err(|e| e.to_string())?;
        let (contracted, k) = contract_b(&aut).map_err(|e| e.to_string())?;
        worst_k = worst_k.max(k);
        for u in &words {
            let full = eval_b(&aut, u).map_err(|e| e.to_string())?;
            let small = eval_b(&contracted, u).map_err(|e| e.to_string())?;
            let upper = match small {
                CostValue::Finite(m) => CostValue::Finite(2 * k * m + 2 * k),
                CostValue::Infinite => CostValue::Infinite,
            };
            ensure(small <= full && full <= upper, || format!("{phi} on {u}: contracted {small}, full {full}, K = {k}"))?;
        }
    }
    Ok(format!("{} formulae x {} words, largest K = {worst_k}", corpus.len(), words.len()))
}

fn counting_recognizer() -> Outcome {
    let file = sg_fixture("counting.sg");
    let rec = file.recognizer.ok_or("counting.sg has no recognizer")?;
    ensure(rec.height == 9, || format!("height {}", rec.height))?;
    let words = common::ab().words_up_to(COUNT_WORD_LEN);
    let mut checked = 0;
    for u in words.iter().filter(|u| !u.is_empty()) {
        let v = recognize(&rec, u).map_err(|e| e.to_string())?;
        let want = CostValue::Finite(u.count_letter('a').unwrap());
        ensure(v == want, || format!("{u}: recognized {v}, |u|_a {want}"))?;
        checked += 1;
    }
    Ok(format!("{checked} nonempty words"))
}

fn minimization() -> Outcome {
    let parity = sg_fixture("parity.sg").recognizer.ok_or("parity.sg has no recognizer")?;
    let q = syntactic_quotient(&parity).map_err(|e| e.to_string())?;
    ensure(q.classes.len() == 4, || format!("parity has {} classes", q.classes.len()))?;
    let sg = &q.recognizer.semigroup;
    let a = q.recognizer.h[&'a'];
    let aa = sg.mul(a, a);
    let z = sg.sharp[aa].ok_or("(aa)# undefined")?;
    ensure(sg.mul(aa, a) == a, || "aa.a != a".into())?;
    ensure(sg.mul(sg.mul(z, a), a) == z, || "(aa)#a.a != (aa)#".into())?;
    let counting = sg_fixture("counting.sg").recognizer.ok_or("counting.sg has no recognizer")?;
    let n = syntactic_quotient(&counting).map_err(|e| e.to_string())?.classes.len();
    ensure(n == 3, || format!("counting has {n} classes"))?;
    let padded = sg_fixture("padded.sg").recognizer.ok_or("padded.sg has no recognizer")?;
    ensure(padded.semigroup.len() == 4, || "padded fixture is not 4 elements".into())?;
    let n = syntactic_quotient(&padded).map_err(|e| e.to_string())?.classes.len();
    ensure(n == 3, || format!("padded has {n} classes"))?;
    let min = sg_fixture("parity_min.sg").semigroup;
    ensure(matches!(is_aperiodic(&counting.semigroup), Aperiodicity::Aperiodic(_)), || "counting is periodic".into())?;
    ensure(matches!(is_aperiodic(&min), Aperiodicity::Periodic(_)), || "parity minimum is aperiodic".into())?;
    ensure(matches!(is_aperiodic(sg), Aperiodicity::Periodic(_)), || "parity quotient is aperiodic".into())?;
    ensure(is_ltl_definable(&counting).map_err(|e| e.to_string())?, || "counting not definable".into())?;
    ensure(!is_ltl_definable(&parity).map_err(|e| e.to_string())?, || "parity definable".into())?;
    Ok("parity 8 -> 4, counting 3, padded 4 -> 3, aperiodicity and definability as expected".into())
}

fn duality() -> Outcome {
    let ab = common::ab();
    let mut rng = ChaCha8Rng::seed_from_u64(0xd0a1);
    let formulas = common::random_formulas(0xd0a1, DUALITY_PAIRS, 5);
    let mut worst = 0;
    let mut automata: BTreeMap<String, CostAutomaton> = BTreeMap::new();
    for phi in &formulas {
        let len = rng.gen_range(0..=DUALITY_WORD_LEN);
        let letters = (0..len).map(|_| *ab.letters().choose(&mut rng).unwrap()).collect();
        let u = Word::from_letters(&ab, letters).unwrap();
        let d = phi.dualize().map_err(|e| e.to_string())?;
        let (inf, sup) = (sem_inf(phi, &u), sem_sup(&d, &u));
        let gap = sup.distance(inf).ok_or_else(|| format!("{phi} on {u}: inf {inf}, dual sup {sup}"))?;
        ensure(gap <= DUALITY_TOLERANCE, || format!("{phi} on {u}: inf {inf}, dual sup {sup}"))?;
        let key = d.to_string();
        if !automata.contains_key(&key) {
            automata.insert(key.clone(), nltl_to_s(&d).map_err(|e| format!("{d}: {e}"))?);
        }
        let s = eval_s(&automata[&key], &u).map_err(|e| e.to_string())?;
        let dev = s.distance(sup).ok_or_else(|| format!("{d} on {u}: automaton {s}, formula {sup}"))?;
        ensure(dev <= DUALITY_TOLERANCE, || format!("{d} on {u}: automaton {s}, formula {sup}"))?;
        worst = worst.max(gap).max(dev);
    }
    Ok(format!("{DUALITY_PAIRS} pairs, largest deviation {worst}"))
}

/// Syntactic semigroup size of `member` by Myhill-Nerode over nonempty words up to
/// `len`, separated by contexts with sides up to `ctx`.
fn brute_force_syntactic(member: &dyn Fn(&[char]) -> bool, len: usize, ctx: usize) -> usize {
    let ab = common::ab();
    let contexts = ab.words_up_to(ctx);
    let mut classes = BTreeSet::new();
    for u in ab.words_up_to(len).iter().filter(|u| !u.is_empty()) {
        let signature: Vec<bool> = contexts
            .iter()
            .flat_map(|x| contexts.iter().map(move |y| (x, y)))
            .map(|(x, y)| member(&[x.letters(), u.letters(), y.letters()].concat()))
            .collect();
        classes.insert(signature);
    }
    classes.len()
}

fn classical_embedding() -> Outcome {
    type Member = fn(&[char]) -> bool;
    let languages: [(&str, Member); 3] = [
        ("a U b", |w| w.iter().find(|&&c| c != 'a') == Some(&'b')),
        ("F (a & X b)", |w| w.windows(2).any(|p| p == ['a', 'b'])),
        ("F (b & X END)", |w| w.last() == Some(&'b')),
    ];
    let words = common::ab().words_up_to(BOUNDED_WORD_LEN);
    let mut report = Vec::new();
    for (text, member) in languages {
        let phi: Formula = common::parse(text);
        for u in &words {
            let v = sem_inf(&phi, u);
            let want = if member(u.letters()) { CostValue::ZERO } else { CostValue::Infinite };
            ensure(v == want, || format!("{text} on {u}: {v}, membership says {want}"))?;
        }
        let aut = nltl_to_s(&phi.dualize().map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let rec = run_semigroup_closure(&aut, CLOSURE_LIMIT)
            .and_then(|r| r.to_recognizer(&aut))
            .map_err(|e| format!("{text}: {e}"))?;
        let ours = syntactic_quotient(&rec).map_err(|e| format!("{text}: {e}"))?.classes.len();
        let oracle = brute_force_syntactic(&member, 6, 4);
        ensure(ours == oracle, || format!("{text}: quotient has {ours} classes, syntactic semigroup {oracle}"))?;
        report.push(format!("{text}: {ours}"));
    }
    Ok(format!("class counts {}", report.join(", ")))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("exact B translation on the corpus", exact_translation),
        ("counting formula equals |u|_a", counting_formula),
        ("bounded and unbounded until examples", bounded_examples),
        ("action semigroup table and axioms", action_algebra),
        ("boundedness oracles agree", oracle_agreement),
        ("contraction bound", contraction_bound),
        ("counting recognizer", counting_recognizer),
        ("minimization and aperiodicity", minimization),
        ("duality", duality),
        ("classical languages embed", classical_embedding),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{elapsed:.2?}]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} [{elapsed:.2?}]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
