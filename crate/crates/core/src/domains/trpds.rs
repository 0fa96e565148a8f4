//! Pushdown systems whose rules rewrite the remaining stack through a
//! letter-to-letter transducer, analysed over maps `Γ^m × Γ^n → T` for a
//! finite closed set `T` of transductions.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;

use crate::algebra::laws::{SampleRng, StructureSampler};
use crate::algebra::{lift, Lifted, LiftedSemiring, WeightStructure};
use crate::domains::relations::{hash_alphabet, hashes, HASH};
use crate::reglang::{transduction_closure, ClosedSet, RegError, Transduction};
use crate::saturation::{chain_automaton, delta_from, presaturate, reach_regular, SatError, SaturationOptions, WeightedAutomaton};
use crate::signatures::{words_of_len, Alphabet, Signature, Symbol, Word};
use crate::wpds::{Config, Rule, State, WeightedPds};

const COMPOSE: usize = 0;
const UNION: usize = 1;

/// `⟨from, pop⟩ ↪ ⟨to, push⟩`, rewriting the rest of the stack by `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrRule {
    pub from: State,
    pub pop: Symbol,
    pub to: State,
    pub push: Word,
    pub t: Transduction,
}

#[derive(Debug, Clone)]
pub struct TrPds {
    pub states: Vec<String>,
    pub alphabet: Alphabet,
    pub rules: Vec<TrRule>,
}

impl TrPds {
    pub fn successors(&self, c: &Config) -> Vec<Config> {
        let Some((&top, rest)) = c.stack.split_first() else { return vec![] };
        let rest_ix: Vec<usize> = rest.iter().map(|s| s.index()).collect();
        let outs = words_of_len(self.alphabet.len(), rest.len());
        let mut out = Vec::new();
        for r in self.rules.iter().filter(|r| r.from == c.state && r.pop == top) {
            for w in &outs {
                let w_ix: Vec<usize> = w.iter().map(|s| s.index()).collect();
                if r.t.relates(&rest_ix, &w_ix) {
                    let mut stack = r.push.clone();
                    stack.extend_from_slice(w);
                    out.push(Config::new(r.to, stack));
                }
            }
        }
        out
    }
}

/// A sparse map `Γ^m × Γ^n → T`; absent entries are `0_T`.
pub type TrFun = BTreeMap<(Word, Word), u32>;

#[derive(Debug, Clone)]
pub struct TransductionFns {
    pub alphabet: Alphabet,
    pub closure: Arc<ClosedSet<Transduction>>,
    empty: u32,
    identity: u32,
}

impl TransductionFns {
    pub fn new(alphabet: Alphabet, closure: ClosedSet<Transduction>) -> Self {
        let g = alphabet.len();
        let empty = closure.find(&Transduction::empty(g)).expect("closure contains 0_T");
        let identity = closure.find(&Transduction::identity(g)).expect("closure contains 1_T");
        TransductionFns { alphabet, closure: Arc::new(closure), empty, identity }
    }

    pub fn generated(alphabet: Alphabet, seed: impl IntoIterator<Item = Transduction>, cap: usize) -> Result<Self, RegError> {
        let closure = transduction_closure(alphabet.len(), seed, cap)?;
        Ok(TransductionFns::new(alphabet, closure))
    }

    pub fn transduction(&self, i: u32) -> &Transduction {
        self.closure.get(i)
    }

    pub fn identity(&self) -> u32 {
        self.identity
    }

    fn union(&self, a: u32, b: u32) -> u32 {
        self.closure.apply_binary(UNION, a, b)
    }

    fn quotient(&self, t: u32, u: &[Symbol], v: &[Symbol]) -> u32 {
        let g = self.alphabet.len();
        u.iter()
            .zip(v)
            .fold(t, |acc, (a, b)| self.closure.apply_unary(acc, Transduction::pair(g, a.index(), b.index())))
    }

    fn put(&self, f: &mut TrFun, key: (Word, Word), t: u32) {
        if t == self.empty {
            return;
        }
        match f.get_mut(&key) {
            Some(old) => *old = self.union(*old, t),
            None => {
                f.insert(key, t);
            }
        }
    }

    fn render_word(&self, w: &[Symbol]) -> String {
        if w.is_empty() {
            "-".to_string()
        } else {
            w.iter().map(|&s| self.alphabet.name(s)).collect::<Vec<_>>().join(" ")
        }
    }

    fn parse_word(&self, text: &str) -> Option<Word> {
        let text = text.trim();
        if text == "-" || text.is_empty() {
            return Some(vec![]);
        }
        text.split_whitespace().map(|t| self.alphabet.lookup(t)).collect()
    }

    /// Parses `tr:{(u,v)->T<n>;…}`; the prefix is optional.
    pub fn parse(&self, text: &str) -> Option<TrFun> {
        let text = text.trim();
        let text = text.strip_prefix("tr:").unwrap_or(text);
        let inner = text.strip_prefix('{')?.strip_suffix('}')?;
        let mut f = TrFun::new();
        for item in inner.split(';').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, val) = item.split_once("->")?;
            let (l, r) = key.trim().strip_prefix('(')?.strip_suffix(')')?.split_once(',')?;
            let t: u32 = val.trim().strip_prefix('T')?.parse().ok()?;
            if t as usize >= self.closure.len() {
                return None;
            }
            self.put(&mut f, (self.parse_word(l)?, self.parse_word(r)?), t);
        }
        Some(f)
    }

    pub fn legend(&self) -> String {
        let mut out = String::new();
        for (i, t) in self.closure.items().iter().enumerate() {
            out.push_str(&format!("T{i}:\n{}", t.render(&self.alphabet)));
        }
        out
    }
}

impl WeightStructure for TransductionFns {
    type Value = TrFun;

    fn name(&self) -> String {
        "trpds".to_string()
    }

    fn contains(&self, sig: &Signature, a: &TrFun) -> bool {
        let g = self.alphabet.len() as u32;
        a.iter().all(|((x, y), t)| {
            x.len() == sig.pop.len()
                && y.len() == sig.push.len()
                && x.iter().chain(y).all(|s| s.0 < g)
                && (*t as usize) < self.closure.len()
                && *t != self.empty
        })
    }

    fn zero(&self, _sig: &Signature) -> TrFun {
        TrFun::new()
    }

    fn unit(&self, sig: &Signature) -> TrFun {
        words_of_len(self.alphabet.len(), sig.pop.len())
            .into_iter()
            .map(|w| ((w.clone(), w), self.identity))
            .collect()
    }

    fn add(&self, _sig: &Signature, a: &TrFun, b: &TrFun) -> TrFun {
        let mut out = a.clone();
        for (k, &t) in b {
            self.put(&mut out, k.clone(), t);
        }
        out
    }

    fn smul(&self, _l: &Signature, _r: &Signature, a: &TrFun, b: &TrFun) -> TrFun {
        let mut by_mid: BTreeMap<&Word, Vec<(&Word, u32)>> = BTreeMap::new();
        for ((y, z), &t) in b {
            by_mid.entry(y).or_default().push((z, t));
        }
        let mut out = TrFun::new();
        for ((x, y), &t1) in a {
            for &(z, t2) in by_mid.get(y).into_iter().flatten() {
                let t = self.closure.apply_binary(COMPOSE, t1, t2);
                self.put(&mut out, (x.clone(), z.clone()), t);
            }
        }
        out
    }

    fn ext(&self, _sig: &Signature, suffix: &[Symbol], a: &TrFun) -> TrFun {
        let tails = words_of_len(self.alphabet.len(), suffix.len());
        let mut out = TrFun::new();
        for ((x, y), &t) in a {
            for u in &tails {
                for v in &tails {
                    let q = self.quotient(t, u, v);
                    let mut xu = x.clone();
                    xu.extend_from_slice(u);
                    let mut yv = y.clone();
                    yv.extend_from_slice(v);
                    self.put(&mut out, (xu, yv), q);
                }
            }
        }
        out
    }

    fn locally_bounded(&self) -> bool {
        true
    }

    fn render(&self, a: &TrFun) -> String {
        let items: Vec<String> = a
            .iter()
            .map(|((x, y), t)| format!("({},{})->T{t}", self.render_word(x), self.render_word(y)))
            .collect();
        format!("tr:{{{}}}", items.join(";"))
    }
}

impl StructureSampler for TransductionFns {
    fn sample_symbols(&self) -> usize {
        1
    }

    fn sample(&self, sig: &Signature, rng: &mut SampleRng) -> TrFun {
        let g = self.alphabet.len();
        let mut out = TrFun::new();
        for x in words_of_len(g, sig.pop.len()) {
            for y in words_of_len(g, sig.push.len()) {
                if rng.gen_bool(0.3) {
                    let t = rng.gen_range(0..self.closure.len() as u32);
                    self.put(&mut out, (x.clone(), y), t);
                }
            }
        }
        out
    }
}

pub type TrWpds = WeightedPds<LiftedSemiring<TransductionFns>>;

/// Rule `⟨p, γ, p′, w, t⟩` becomes `⟨p, #, p′, #^{|w|}, t↑γ,w⟩`, the map
/// sending `(γ, w)` to `t` and everything else to `0_T`.
pub fn trpds_ws(pds: &TrPds, cap: usize) -> Result<TrWpds, RegError> {
    let ws = TransductionFns::generated(pds.alphabet.clone(), pds.rules.iter().map(|r| r.t.clone()), cap)?;
    let rules = pds
        .rules
        .iter()
        .map(|r| {
            let t = ws.closure.find(&r.t).expect("rule transductions seed the closure");
            let mut f = TrFun::new();
            ws.put(&mut f, (vec![r.pop], r.push.clone()), t);
            Rule { from: r.from, pop: HASH, to: r.to, push: hashes(r.push.len()), weight: Lifted::Val(f) }
        })
        .collect();
    Ok(WeightedPds::new(lift(ws), pds.states.clone(), hash_alphabet(), rules).expect("well typed"))
}

#[derive(Debug, thiserror::Error)]
pub enum TrError {
    #[error("transduction closure is not finite within the cap: {0}")]
    Closure(#[from] RegError),
    #[error(transparent)]
    Saturation(#[from] SatError),
}

pub struct TrAnalysis {
    pub encoded: TrWpds,
    pub automaton: WeightedAutomaton<Lifted<TrFun>>,
}

impl TrAnalysis {
    pub fn new(pds: &TrPds, cap: usize, opts: &SaturationOptions) -> Result<Self, TrError> {
        let encoded = trpds_ws(pds, cap)?;
        let automaton = presaturate(&encoded, opts)?.automaton;
        Ok(TrAnalysis { encoded, automaton })
    }

    fn ws(&self) -> &TransductionFns {
        self.encoded.semiring.structure()
    }

    fn relates_empty(&self, f: &TrFun, w1: &[Symbol]) -> bool {
        f.get(&(w1.to_vec(), vec![])).is_some_and(|&t| self.ws().transduction(t).relates_empty())
    }

    pub fn reaches_empty(&self, p: State, w: &[Symbol], q: State) -> bool {
        match delta_from(&self.encoded.semiring, &self.automaton, p, &hashes(w.len())).get(&q) {
            Some(Lifted::Val(f)) => self.relates_empty(f, w),
            _ => false,
        }
    }

    /// `⟨p, w⟩ ⟹* ⟨p′, w′⟩` iff `⟨ε, ε⟩ ∈ a(w, w′)`, read through a target
    /// automaton whose `i`-th edge carries `(w′_i, ε) ↦ 1_T`.
    pub fn reaches(&self, p: State, w: &[Symbol], q: State, w2: &[Symbol], opts: &SaturationOptions) -> Result<bool, SatError> {
        if w2.is_empty() {
            return Ok(self.reaches_empty(p, w, q));
        }
        let weights = w2
            .iter()
            .map(|&g| Lifted::Val(TrFun::from([((vec![g], vec![]), self.ws().identity())])))
            .collect();
        let target = chain_automaton(&hashes(w2.len()), weights);
        Ok(match reach_regular(&self.encoded, &target, q, p, &hashes(w.len()), opts)? {
            Lifted::Val(f) => self.relates_empty(&f, w),
            Lifted::Bullet => false,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::laws::{indexed_law_suite, structure_law_suite, IndexFamily};
    use crate::reglang::DEFAULT_CLOSURE_CAP;

    fn s(i: u32) -> Symbol {
        Symbol(i)
    }

    fn swap() -> Transduction {
        Transduction::letter_map(2, |a| Some(1 - a))
    }

    // ⟨p, a⟩ → ⟨q, ε⟩ swapping the rest; ⟨q, b⟩ → ⟨q, ε⟩
    fn swapper() -> TrPds {
        TrPds {
            states: vec!["p".into(), "q".into()],
            alphabet: Alphabet::new(["a", "b"]),
            rules: vec![
                TrRule { from: 0, pop: s(0), to: 1, push: vec![], t: swap() },
                TrRule { from: 1, pop: s(1), to: 1, push: vec![], t: Transduction::identity(2) },
                TrRule { from: 1, pop: s(0), to: 0, push: vec![s(0), s(1)], t: Transduction::identity(2) },
            ],
        }
    }

    #[test]
    fn laws_hold() {
        let ws = TransductionFns::generated(Alphabet::new(["a", "b"]), [swap()], 100).unwrap();
        let r = structure_law_suite(&ws, 300, 7);
        assert!(r.passed(), "{r}");
        let r = indexed_law_suite(&lift(ws), IndexFamily::All, 300, 8);
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn transductions_are_applied() {
        let an = TrAnalysis::new(&swapper(), DEFAULT_CLOSURE_CAP, &SaturationOptions::default()).unwrap();
        let (a, b) = (s(0), s(1));
        // ⟨p, a a⟩ → ⟨q, b⟩ → ⟨q, ε⟩
        assert!(an.reaches_empty(0, &[a, a], 1));
        assert!(!an.reaches_empty(0, &[a, b], 1));
        let opts = SaturationOptions::default();
        assert!(an.reaches(0, &[a, b, a], 1, &[a, b], &opts).unwrap());
        assert!(!an.reaches(0, &[a, b, a], 1, &[b, a], &opts).unwrap());
        // ⟨q, a b⟩ → ⟨p, a b b⟩ → ⟨q, a a⟩
        assert!(an.reaches(1, &[a, b], 1, &[a, a], &opts).unwrap());
    }

    #[test]
    fn literal_round_trip() {
        let ws = TransductionFns::generated(Alphabet::new(["a", "b"]), [swap()], 100).unwrap();
        let f = ws.parse("tr:{(a,b a)->T1;(b,-)->T2}").unwrap();
        assert_eq!(ws.parse(&ws.render(&f)).unwrap(), f);
        assert!(ws.parse("tr:{(a,b)->T999}").is_none());
    }
}
