//! Canonical finite automata over a finite alphabet and letter-to-letter
//! transductions over the paired alphabet.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Debug;
use std::hash::Hash;

use thiserror::Error;

use crate::signatures::{Alphabet, Symbol};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RegError {
    #[error("alphabet mismatch: {0} vs {1} symbols")]
    AlphabetMismatch(usize, usize),
    #[error("closure exceeded {cap} elements (reached {size}); the set of languages is not finite or the cap is too small")]
    TooLarge { cap: usize, size: usize },
    #[error("automaton line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// A deterministic automaton with a total transition table. Values built by
/// the public constructors are canonical: minimal, every state reachable, and
/// states numbered in breadth-first order from the initial state 0, so that
/// structural equality coincides with language equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dfa {
    symbols: usize,
    trans: Vec<u32>,
    accept: Vec<bool>,
}

impl Dfa {
    /// Builds and canonicalizes an automaton; `trans[q * symbols + a]` is the
    /// successor of `q` on letter `a`.
    pub fn new(symbols: usize, trans: Vec<u32>, init: u32, accept: Vec<bool>) -> Dfa {
        let n = accept.len();
        assert!(n > 0 && trans.len() == n * symbols, "transition table must be total");
        assert!(trans.iter().all(|&t| (t as usize) < n));
        minimize(symbols, &trans, init, &accept)
    }

    pub fn empty(symbols: usize) -> Dfa {
        Dfa::new(symbols, vec![0; symbols], 0, vec![false])
    }

    pub fn universal(symbols: usize) -> Dfa {
        Dfa::new(symbols, vec![0; symbols], 0, vec![true])
    }

    /// The language `{w}`.
    pub fn word(symbols: usize, w: &[usize]) -> Dfa {
        let n = w.len() + 2;
        let sink = (n - 1) as u32;
        let mut trans = vec![sink; n * symbols];
        for (i, &a) in w.iter().enumerate() {
            trans[i * symbols + a] = (i + 1) as u32;
        }
        let mut accept = vec![false; n];
        accept[w.len()] = true;
        Dfa::new(symbols, trans, 0, accept)
    }

    /// Words whose letters all lie in `letters`.
    pub fn star_of(symbols: usize, letters: &[usize]) -> Dfa {
        let mut trans = vec![1; 2 * symbols];
        for &a in letters {
            trans[a] = 0;
        }
        Dfa::new(symbols, trans, 0, vec![true, false])
    }

    pub fn symbols(&self) -> usize {
        self.symbols
    }

    pub fn states(&self) -> usize {
        self.accept.len()
    }

    pub fn step(&self, q: u32, a: usize) -> u32 {
        self.trans[q as usize * self.symbols + a]
    }

    pub fn is_accepting(&self, q: u32) -> bool {
        self.accept[q as usize]
    }

    pub fn run(&self, w: &[usize]) -> u32 {
        w.iter().fold(0, |q, &a| self.step(q, a))
    }

    pub fn accepts(&self, w: &[usize]) -> bool {
        self.is_accepting(self.run(w))
    }

    pub fn accepts_symbols(&self, w: &[Symbol]) -> bool {
        let w: Vec<usize> = w.iter().map(|s| s.index()).collect();
        self.accepts(&w)
    }

    pub fn contains_epsilon(&self) -> bool {
        self.accept[0]
    }

    /// Canonical automata have only reachable states, so emptiness means no
    /// accepting state at all.
    pub fn is_empty(&self) -> bool {
        !self.accept.iter().any(|&b| b)
    }

    pub fn is_universal(&self) -> bool {
        self.accept.iter().all(|&b| b)
    }

    fn check(&self, other: &Dfa) -> Result<(), RegError> {
        if self.symbols != other.symbols {
            return Err(RegError::AlphabetMismatch(self.symbols, other.symbols));
        }
        Ok(())
    }

    fn product(&self, other: &Dfa, op: impl Fn(bool, bool) -> bool) -> Dfa {
        let k = self.symbols;
        let mut index: HashMap<(u32, u32), u32> = HashMap::new();
        let mut states = vec![(0u32, 0u32)];
        index.insert((0, 0), 0);
        let mut trans = Vec::new();
        let mut i = 0;
        while i < states.len() {
            let (p, q) = states[i];
            for a in 0..k {
                let next = (self.step(p, a), other.step(q, a));
                let id = *index.entry(next).or_insert_with(|| {
                    states.push(next);
                    (states.len() - 1) as u32
                });
                trans.push(id);
            }
            i += 1;
        }
        let accept = states
            .iter()
            .map(|&(p, q)| op(self.is_accepting(p), other.is_accepting(q)))
            .collect();
        Dfa::new(k, trans, 0, accept)
    }

    pub fn union(&self, other: &Dfa) -> Result<Dfa, RegError> {
        self.check(other)?;
        Ok(self.product(other, |a, b| a || b))
    }

    pub fn intersect(&self, other: &Dfa) -> Result<Dfa, RegError> {
        self.check(other)?;
        Ok(self.product(other, |a, b| a && b))
    }

    pub fn complement(&self) -> Dfa {
        let accept = self.accept.iter().map(|b| !b).collect();
        Dfa::new(self.symbols, self.trans.clone(), 0, accept)
    }

    /// Left quotient `w⁻¹L = {v | wv ∈ L}`.
    pub fn quotient(&self, w: &[usize]) -> Dfa {
        let q = self.run(w);
        if q == 0 {
            return self.clone();
        }
        Dfa::new(self.symbols, self.trans.clone(), q, self.accept.clone())
    }

    pub fn quotient_symbols(&self, w: &[Symbol]) -> Dfa {
        let w: Vec<usize> = w.iter().map(|s| s.index()).collect();
        self.quotient(&w)
    }

    /// Every word of length at most `max_len` in the language, shortlex order.
    pub fn words_up_to(&self, max_len: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut layer: Vec<(Vec<usize>, u32)> = vec![(vec![], 0)];
        for len in 0..=max_len {
            for (w, q) in &layer {
                if self.is_accepting(*q) {
                    out.push(w.clone());
                }
            }
            if len == max_len {
                break;
            }
            let mut next = Vec::new();
            for (w, q) in &layer {
                for a in 0..self.symbols {
                    let mut w2 = w.clone();
                    w2.push(a);
                    next.push((w2, self.step(*q, a)));
                }
            }
            layer = next;
        }
        out
    }

    /// Renders in the textual automaton format using `names[a]` for letters.
    pub fn render(&self, names: &[String]) -> String {
        let mut out = format!("dfa {} {}\n", self.states(), names.join(" "));
        for q in 0..self.states() {
            for (a, name) in names.iter().enumerate().take(self.symbols) {
                out.push_str(&format!("{q} {name} {}\n", self.step(q as u32, a)));
            }
        }
        let acc: Vec<String> = (0..self.states())
            .filter(|&q| self.accept[q])
            .map(|q| q.to_string())
            .collect();
        out.push_str(&format!("accept {}\n", acc.join(" ")));
        out.push_str("init 0\n");
        out
    }

    /// Parses the textual format; `letter` maps a letter name to its index.
    /// Transitions left undefined lead to a rejecting sink.
    pub fn parse(
        text: &str,
        symbols: usize,
        letter: impl Fn(&str) -> Option<usize>,
    ) -> Result<Dfa, RegError> {
        let err = |line: usize, msg: String| RegError::Parse { line, msg };
        let mut n: Option<usize> = None;
        let mut trans: Vec<Option<u32>> = Vec::new();
        let mut accept: Vec<bool> = Vec::new();
        let mut init = 0u32;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let toks: Vec<&str> = raw.split_whitespace().collect();
            if toks.is_empty() || toks[0].starts_with('#') {
                continue;
            }
            let state = |t: &str, n: usize| -> Result<u32, RegError> {
                let q: usize = t.parse().map_err(|_| err(line, format!("bad state `{t}`")))?;
                if q >= n {
                    return Err(err(line, format!("state {q} out of range")));
                }
                Ok(q as u32)
            };
            match toks[0] {
                "dfa" => {
                    let count: usize = toks
                        .get(1)
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| err(line, "expected `dfa <nstates>`".into()))?;
                    if count == 0 {
                        return Err(err(line, "an automaton needs at least one state".into()));
                    }
                    for t in &toks[2..] {
                        letter(t).ok_or_else(|| err(line, format!("unknown letter `{t}`")))?;
                    }
                    n = Some(count);
                    trans = vec![None; count * symbols];
                    accept = vec![false; count];
                }
                "accept" => {
                    let n = n.ok_or_else(|| err(line, "`accept` before header".into()))?;
                    for t in &toks[1..] {
                        accept[state(t, n)? as usize] = true;
                    }
                }
                "init" => {
                    let n = n.ok_or_else(|| err(line, "`init` before header".into()))?;
                    let t = toks.get(1).ok_or_else(|| err(line, "expected `init q`".into()))?;
                    init = state(t, n)?;
                }
                _ => {
                    let n = n.ok_or_else(|| err(line, "transition before header".into()))?;
                    if toks.len() != 3 {
                        return Err(err(line, "expected `q letter q'`".into()));
                    }
                    let p = state(toks[0], n)?;
                    let a = letter(toks[1])
                        .ok_or_else(|| err(line, format!("unknown letter `{}`", toks[1])))?;
                    let q = state(toks[2], n)?;
                    let slot = &mut trans[p as usize * symbols + a];
                    if slot.is_some_and(|old| old != q) {
                        return Err(err(line, format!("second transition from {p} on `{}`", toks[1])));
                    }
                    *slot = Some(q);
                }
            }
        }
        let n = n.ok_or_else(|| err(0, "missing `dfa` header".into()))?;
        let sink = n as u32;
        let mut full: Vec<u32> = trans.into_iter().map(|t| t.unwrap_or(sink)).collect();
        full.extend(std::iter::repeat(sink).take(symbols));
        accept.push(false);
        Ok(Dfa::new(symbols, full, init, accept))
    }
}

/// Hopcroft partition refinement on the reachable part, then breadth-first
/// renumbering from the initial state.
fn minimize(k: usize, trans: &[u32], init: u32, accept: &[bool]) -> Dfa {
    // reachable states, in BFS order
    let n_all = accept.len();
    let mut seen = vec![u32::MAX; n_all];
    let mut order = vec![init];
    seen[init as usize] = 0;
    let mut i = 0;
    while i < order.len() {
        let q = order[i] as usize;
        for a in 0..k {
            let t = trans[q * k + a];
            if seen[t as usize] == u32::MAX {
                seen[t as usize] = order.len() as u32;
                order.push(t);
            }
        }
        i += 1;
    }
    let n = order.len();
    let seen = &seen;
    let delta: Vec<u32> = order
        .iter()
        .flat_map(|&q| (0..k).map(move |a| seen[trans[q as usize * k + a] as usize]))
        .collect();
    let acc: Vec<bool> = order.iter().map(|&q| accept[q as usize]).collect();

    let mut preds: Vec<Vec<Vec<u32>>> = vec![vec![Vec::new(); n]; k];
    for q in 0..n {
        for a in 0..k {
            preds[a][delta[q * k + a] as usize].push(q as u32);
        }
    }
    let mut block_of = vec![0u32; n];
    let mut blocks: Vec<Vec<u32>> = Vec::new();
    let finals: Vec<u32> = (0..n as u32).filter(|&q| acc[q as usize]).collect();
    let others: Vec<u32> = (0..n as u32).filter(|&q| !acc[q as usize]).collect();
    for part in [finals, others] {
        if !part.is_empty() {
            let id = blocks.len() as u32;
            for &q in &part {
                block_of[q as usize] = id;
            }
            blocks.push(part);
        }
    }
    let mut in_work = vec![true; blocks.len()];
    let mut work: Vec<u32> = (0..blocks.len() as u32).collect();
    let mut mark = vec![false; n];
    while let Some(splitter) = work.pop() {
        in_work[splitter as usize] = false;
        let members = blocks[splitter as usize].clone();
        for pa in preds.iter().take(k) {
            let mut touched: Vec<u32> = Vec::new();
            let mut hits: Vec<u32> = Vec::new();
            for &t in &members {
                for &q in &pa[t as usize] {
                    if !mark[q as usize] {
                        mark[q as usize] = true;
                        hits.push(q);
                        let b = block_of[q as usize];
                        if !touched.contains(&b) {
                            touched.push(b);
                        }
                    }
                }
            }
            for b in touched {
                let (inside, outside): (Vec<u32>, Vec<u32>) =
                    blocks[b as usize].iter().partition(|&&q| mark[q as usize]);
                if outside.is_empty() {
                    continue;
                }
                let new_id = blocks.len() as u32;
                for &q in &outside {
                    block_of[q as usize] = new_id;
                }
                let smaller_is_new = outside.len() < inside.len();
                blocks[b as usize] = inside;
                blocks.push(outside);
                in_work.push(false);
                if in_work[b as usize] {
                    in_work[new_id as usize] = true;
                    work.push(new_id);
                } else {
                    let pick = if smaller_is_new { new_id } else { b };
                    in_work[pick as usize] = true;
                    work.push(pick);
                }
            }
            for q in hits {
                mark[q as usize] = false;
            }
        }
    }

    // renumber blocks in BFS order from the initial block
    let nb = blocks.len();
    let mut num = vec![u32::MAX; nb];
    let start = block_of[0];
    num[start as usize] = 0;
    let mut queue = VecDeque::from([start]);
    let mut out_trans = Vec::with_capacity(nb * k);
    let mut out_acc = Vec::with_capacity(nb);
    let mut next = 1u32;
    while let Some(b) = queue.pop_front() {
        let rep = blocks[b as usize][0] as usize;
        out_acc.push(acc[rep]);
        for a in 0..k {
            let tb = block_of[delta[rep * k + a] as usize];
            if num[tb as usize] == u32::MAX {
                num[tb as usize] = next;
                next += 1;
                queue.push_back(tb);
            }
            out_trans.push(num[tb as usize]);
        }
    }
    Dfa { symbols: k, trans: out_trans, accept: out_acc }
}

/// A letter-to-letter relation over `Γ`, stored as a canonical automaton over
/// the pair alphabet `Γ×Γ` with letter `(a, b)` numbered `a * |Γ| + b`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transduction {
    base: usize,
    dfa: Dfa,
}

impl Transduction {
    pub fn from_dfa(base: usize, dfa: Dfa) -> Result<Transduction, RegError> {
        if dfa.symbols() != base * base {
            return Err(RegError::AlphabetMismatch(dfa.symbols(), base * base));
        }
        Ok(Transduction { base, dfa })
    }

    pub fn pair(base: usize, a: usize, b: usize) -> usize {
        a * base + b
    }

    pub fn empty(base: usize) -> Transduction {
        Transduction { base, dfa: Dfa::empty(base * base) }
    }

    pub fn identity(base: usize) -> Transduction {
        let diag: Vec<usize> = (0..base).map(|a| a * base + a).collect();
        Transduction { base, dfa: Dfa::star_of(base * base, &diag) }
    }

    /// The relation applying the letter map `f` to every position.
    pub fn letter_map(base: usize, f: impl Fn(usize) -> Option<usize>) -> Transduction {
        let letters: Vec<usize> = (0..base)
            .filter_map(|a| f(a).map(|b| a * base + b))
            .collect();
        Transduction { base, dfa: Dfa::star_of(base * base, &letters) }
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn dfa(&self) -> &Dfa {
        &self.dfa
    }

    pub fn is_empty(&self) -> bool {
        self.dfa.is_empty()
    }

    pub fn relates(&self, u: &[usize], w: &[usize]) -> bool {
        if u.len() != w.len() {
            return false;
        }
        let word: Vec<usize> = u.iter().zip(w).map(|(&a, &b)| a * self.base + b).collect();
        self.dfa.accepts(&word)
    }

    pub fn relates_empty(&self) -> bool {
        self.dfa.contains_epsilon()
    }

    pub fn union(&self, other: &Transduction) -> Result<Transduction, RegError> {
        Ok(Transduction { base: self.base, dfa: self.dfa.union(&other.dfa)? })
    }

    /// `⟨a,b⟩⁻¹t = {⟨u,w⟩ | ⟨au,bw⟩ ∈ t}`.
    pub fn quotient(&self, a: usize, b: usize) -> Transduction {
        Transduction { base: self.base, dfa: self.dfa.quotient(&[a * self.base + b]) }
    }

    /// `{⟨u,w⟩ | ∃v. ⟨u,v⟩ ∈ self ∧ ⟨v,w⟩ ∈ other}`, by a subset
    /// construction over pairs of states guessing the middle letter.
    pub fn compose(&self, other: &Transduction) -> Result<Transduction, RegError> {
        if self.base != other.base {
            return Err(RegError::AlphabetMismatch(self.base, other.base));
        }
        let g = self.base;
        let k = g * g;
        let (d1, d2) = (&self.dfa, &other.dfa);
        let mut index: HashMap<BTreeSet<(u32, u32)>, u32> = HashMap::new();
        let start: BTreeSet<(u32, u32)> = [(0, 0)].into();
        let mut sets = vec![start.clone()];
        index.insert(start, 0);
        let mut trans = Vec::new();
        let mut i = 0;
        while i < sets.len() {
            let cur = sets[i].clone();
            for a in 0..g {
                for c in 0..g {
                    let mut next = BTreeSet::new();
                    for &(p, q) in &cur {
                        for b in 0..g {
                            next.insert((d1.step(p, a * g + b), d2.step(q, b * g + c)));
                        }
                    }
                    let id = *index.entry(next.clone()).or_insert_with(|| {
                        sets.push(next);
                        (sets.len() - 1) as u32
                    });
                    trans.push(id);
                }
            }
            i += 1;
        }
        debug_assert_eq!(trans.len(), sets.len() * k);
        let accept = sets
            .iter()
            .map(|s| s.iter().any(|&(p, q)| d1.is_accepting(p) && d2.is_accepting(q)))
            .collect();
        Ok(Transduction { base: g, dfa: Dfa::new(k, trans, 0, accept) })
    }

    /// Renders with pair letters `a|b`.
    pub fn render(&self, alphabet: &Alphabet) -> String {
        let names: Vec<String> = (0..self.base * self.base)
            .map(|p| {
                format!(
                    "{}|{}",
                    alphabet.name(Symbol((p / self.base) as u32)),
                    alphabet.name(Symbol((p % self.base) as u32))
                )
            })
            .collect();
        self.dfa.render(&names)
    }

    pub fn parse(text: &str, alphabet: &Alphabet) -> Result<Transduction, RegError> {
        let g = alphabet.len();
        let dfa = Dfa::parse(text, g * g, |t| {
            let (a, b) = t.split_once('|')?;
            Some(alphabet.lookup(a)?.index() * g + alphabet.lookup(b)?.index())
        })?;
        Transduction::from_dfa(g, dfa)
    }
}

/// Parses a plain automaton over `alphabet`.
pub fn parse_dfa(text: &str, alphabet: &Alphabet) -> Result<Dfa, RegError> {
    Dfa::parse(text, alphabet.len(), |t| alphabet.lookup(t).map(|s| s.index()))
}

pub fn render_dfa(dfa: &Dfa, alphabet: &Alphabet) -> String {
    dfa.render(alphabet.names())
}

/// A finite set of values closed under a fixed family of unary and binary
/// operations, with every operation tabulated over the set.
#[derive(Debug, Clone)]
pub struct ClosedSet<T> {
    items: Vec<T>,
    index: HashMap<T, u32>,
    unary: Vec<Vec<u32>>,
    binary: Vec<HashMap<(u32, u32), u32>>,
}

/// Default element cap for closure computations.
pub const DEFAULT_CLOSURE_CAP: usize = 10_000;

impl<T: Clone + Eq + Hash + Debug> ClosedSet<T> {
    /// Least superset of `seed` closed under `unary` (each producing one value
    /// per letter of a fixed range) and the `binary` operations.
    pub fn build(
        seed: impl IntoIterator<Item = T>,
        unary: &dyn Fn(&T) -> Vec<T>,
        binary: &[&dyn Fn(&T, &T) -> T],
        cap: usize,
    ) -> Result<ClosedSet<T>, RegError> {
        let mut set = ClosedSet {
            items: Vec::new(),
            index: HashMap::new(),
            unary: Vec::new(),
            binary: vec![HashMap::new(); binary.len()],
        };
        for t in seed {
            set.intern(t, cap)?;
        }
        let mut done = 0;
        while done < set.items.len() {
            let i = done as u32;
            let t = set.items[done].clone();
            let row: Vec<u32> = unary(&t)
                .into_iter()
                .map(|u| set.intern(u, cap))
                .collect::<Result<_, _>>()?;
            set.unary.push(row);
            for j in 0..=i {
                let u = set.items[j as usize].clone();
                for (o, op) in binary.iter().enumerate() {
                    let x = set.intern(op(&t, &u), cap)?;
                    set.binary[o].insert((i, j), x);
                    if i != j {
                        let y = set.intern(op(&u, &t), cap)?;
                        set.binary[o].insert((j, i), y);
                    }
                }
            }
            done += 1;
        }
        Ok(set)
    }

    fn intern(&mut self, t: T, cap: usize) -> Result<u32, RegError> {
        if let Some(&i) = self.index.get(&t) {
            return Ok(i);
        }
        if self.items.len() >= cap {
            return Err(RegError::TooLarge { cap, size: self.items.len() + 1 });
        }
        let i = self.items.len() as u32;
        self.index.insert(t.clone(), i);
        self.items.push(t);
        Ok(i)
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn items(&self) -> &[T] {
        &self.items
    }

    pub fn get(&self, i: u32) -> &T {
        &self.items[i as usize]
    }

    pub fn find(&self, t: &T) -> Option<u32> {
        self.index.get(t).copied()
    }

    pub fn apply_unary(&self, i: u32, letter: usize) -> u32 {
        self.unary[i as usize][letter]
    }

    pub fn apply_binary(&self, op: usize, i: u32, j: u32) -> u32 {
        self.binary[op][&(i, j)]
    }
}

/// The closed set of transductions generated by `seed`, `∅` and the identity
/// under composition (op 0), union (op 1), and single-pair quotients (unary,
/// indexed by pair letter).
pub fn transduction_closure(
    base: usize,
    seed: impl IntoIterator<Item = Transduction>,
    cap: usize,
) -> Result<ClosedSet<Transduction>, RegError> {
    let compose = |a: &Transduction, b: &Transduction| a.compose(b).expect("same base");
    let union = |a: &Transduction, b: &Transduction| a.union(b).expect("same base");
    let quot = |t: &Transduction| {
        (0..base * base)
            .map(|p| t.quotient(p / base, p % base))
            .collect()
    };
    let init = [Transduction::empty(base), Transduction::identity(base)];
    ClosedSet::build(init.into_iter().chain(seed), &quot, &[&compose, &union], cap)
}

/// The closed set of languages generated by `seed`, `∅` and `Γ*` under union
/// (op 0), intersection (op 1) and single-letter quotients (unary).
pub fn language_closure(
    symbols: usize,
    seed: impl IntoIterator<Item = Dfa>,
    cap: usize,
) -> Result<ClosedSet<Dfa>, RegError> {
    let union = |a: &Dfa, b: &Dfa| a.union(b).expect("same alphabet");
    let inter = |a: &Dfa, b: &Dfa| a.intersect(b).expect("same alphabet");
    let quot = |d: &Dfa| (0..symbols).map(|a| d.quotient(&[a])).collect();
    let init = [Dfa::empty(symbols), Dfa::universal(symbols)];
    ClosedSet::build(init.into_iter().chain(seed), &quot, &[&union, &inter], cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn even(k: usize) -> Dfa {
        let mut trans = vec![0; 2 * k];
        for a in 0..k {
            trans[a] = 1;
            trans[k + a] = 0;
        }
        Dfa::new(k, trans, 0, vec![true, false])
    }

    fn all_words(k: usize, max: usize) -> Vec<Vec<usize>> {
        Dfa::universal(k).words_up_to(max)
    }

    #[test]
    fn set_operations() {
        let l = even(1);
        assert_eq!(l.union(&Dfa::empty(1)).unwrap(), l);
        assert_eq!(l.intersect(&Dfa::universal(1)).unwrap(), l);
        let positive = Dfa::word(1, &[0]).union(&Dfa::word(1, &[0, 0])).unwrap();
        let nonempty = Dfa::word(1, &[]).complement();
        let both = l.intersect(&nonempty).unwrap();
        for w in all_words(1, 6) {
            assert_eq!(both.accepts(&w), w.len() % 2 == 0 && !w.is_empty());
        }
        assert!(!positive.accepts(&[]));
        assert!(l.union(&Dfa::empty(2)).is_err());
    }

    #[test]
    fn quotients() {
        let l = even(1);
        assert_eq!(l.quotient(&[]), l);
        let odd = l.quotient(&[0]);
        for w in all_words(1, 6) {
            assert_eq!(odd.accepts(&w), w.len() % 2 == 1);
        }
        let prefixed = Dfa::word(2, &[1]).intersect(&Dfa::universal(2)).unwrap();
        assert!(prefixed.quotient(&[1]).contains_epsilon());
    }

    #[test]
    fn membership() {
        assert!(Dfa::universal(2).accepts(&[0, 1, 1]));
        assert!(!Dfa::empty(2).accepts(&[]));
        assert!(!even(1).accepts(&[0, 0, 0]));
        assert!(Dfa::empty(3).is_empty());
        assert!(!Dfa::word(3, &[2]).is_empty());
    }

    #[test]
    fn canonical_forms_are_structural() {
        // two different presentations of (ab)*
        let a = Dfa::new(2, vec![1, 2, 2, 0, 2, 2], 0, vec![true, false, false]);
        let b = Dfa::new(2, vec![1, 3, 3, 2, 1, 3, 3, 3], 0, vec![true, false, true, false]);
        assert_eq!(a, b);
        assert_eq!(a.states(), 3);
    }

    #[test]
    fn transduction_composition() {
        let t = Transduction::letter_map(2, |a| Some(1 - a));
        let id = Transduction::identity(2);
        assert_eq!(id.compose(&t).unwrap(), t);
        assert_eq!(Transduction::empty(2).compose(&t).unwrap(), Transduction::empty(2));
        let tt = t.compose(&t).unwrap();
        for u in all_words(2, 4) {
            for w in all_words(2, 4) {
                assert_eq!(tt.relates(&u, &w), u == w);
            }
        }
        assert_eq!(tt, id);
    }

    #[test]
    fn closures() {
        let c = transduction_closure(2, [], 100).unwrap();
        assert_eq!(c.len(), 2);
        let c = transduction_closure(2, [Transduction::identity(2)], 100).unwrap();
        assert_eq!(c.len(), 2);
        let swap = Transduction::letter_map(2, |a| Some(1 - a));
        let c = transduction_closure(2, [swap.clone()], 100).unwrap();
        let id = Transduction::identity(2);
        let expected: BTreeSet<Transduction> =
            [Transduction::empty(2), id.clone(), swap.clone(), id.union(&swap).unwrap()].into();
        let got: BTreeSet<Transduction> = c.items().iter().cloned().collect();
        assert_eq!(got, expected);
        let err = transduction_closure(2, [swap], 3).unwrap_err();
        assert!(matches!(err, RegError::TooLarge { cap: 3, .. }));
    }

    #[test]
    fn closure_tables_agree_with_operations() {
        let seed = [even(2), Dfa::word(2, &[0, 1]), Dfa::star_of(2, &[0])];
        let c = language_closure(2, seed, 1000).unwrap();
        for i in 0..c.len() as u32 {
            for a in 0..2 {
                assert_eq!(c.get(c.apply_unary(i, a)), &c.get(i).quotient(&[a]));
            }
            for j in 0..c.len() as u32 {
                assert_eq!(c.get(c.apply_binary(0, i, j)), &c.get(i).union(c.get(j)).unwrap());
                assert_eq!(c.get(c.apply_binary(1, i, j)), &c.get(i).intersect(c.get(j)).unwrap());
            }
        }
    }

    #[test]
    fn text_round_trip() {
        let alpha = Alphabet::new(["a", "b"]);
        let d = Dfa::word(2, &[0, 1]).union(&even(2)).unwrap();
        let text = render_dfa(&d, &alpha);
        assert_eq!(parse_dfa(&text, &alpha).unwrap(), d);
        let partial = "dfa 2 a b\n0 a 1\naccept 1\ninit 0\n";
        assert_eq!(parse_dfa(partial, &alpha).unwrap(), Dfa::word(2, &[0]));
        let t = Transduction::letter_map(2, |x| Some(1 - x));
        let text = t.render(&alpha);
        assert!(text.contains("a|b"));
        assert_eq!(Transduction::parse(&text, &alpha).unwrap(), t);
        assert!(parse_dfa("dfa 1\n0 c 0\n", &alpha).is_err());
    }

    fn arb_dfa(k: usize) -> impl Strategy<Value = (Vec<u32>, Vec<bool>)> {
        (1usize..6).prop_flat_map(move |n| {
            (
                proptest::collection::vec(0..n as u32, n * k),
                proptest::collection::vec(any::<bool>(), n),
            )
        })
    }

    /// Language of a raw (unminimized) table, by direct simulation.
    fn raw_accepts(k: usize, trans: &[u32], acc: &[bool], w: &[usize]) -> bool {
        let q = w.iter().fold(0u32, |q, &a| trans[q as usize * k + a]);
        acc[q as usize]
    }

    proptest! {
        #[test]
        fn canonicalization_preserves_language((trans, acc) in arb_dfa(2)) {
            let d = Dfa::new(2, trans.clone(), 0, acc.clone());
            let again = Dfa::new(2, d.trans.clone(), 0, d.accept.clone());
            prop_assert_eq!(&again, &d);
            for w in all_words(2, 5) {
                prop_assert_eq!(d.accepts(&w), raw_accepts(2, &trans, &acc, &w));
            }
        }

        #[test]
        fn quotient_distributes((t1, a1) in arb_dfa(2), (t2, a2) in arb_dfa(2), w in proptest::collection::vec(0usize..2, 0..4)) {
            let x = Dfa::new(2, t1, 0, a1);
            let y = Dfa::new(2, t2, 0, a2);
            prop_assert_eq!(x.union(&y).unwrap().quotient(&w), x.quotient(&w).union(&y.quotient(&w)).unwrap());
            prop_assert_eq!(x.intersect(&y).unwrap().quotient(&w), x.quotient(&w).intersect(&y.quotient(&w)).unwrap());
        }

        #[test]
        fn quotients_of_a_language_are_finitely_many((t, a) in arb_dfa(2)) {
            let d = Dfa::new(2, t, 0, a);
            let mut seen: BTreeSet<Dfa> = [d.clone()].into();
            let mut frontier = vec![d.clone()];
            while let Some(x) = frontier.pop() {
                for letter in 0..2 {
                    let q = x.quotient(&[letter]);
                    if seen.insert(q.clone()) {
                        frontier.push(q);
                    }
                }
            }
            prop_assert!(seen.len() <= d.states());
        }
    }
}
