//! Conditional pushdown systems: a rule fires only when the stack below its
//! top lies in a regular language. Weights are languages from a finite
//! closure of the rule conditions.

use std::sync::Arc;

use rand::Rng;

use crate::algebra::laws::{SampleRng, StructureSampler};
use crate::algebra::{lift, Lifted, LiftedSemiring, WeightStructure};
use crate::reglang::{language_closure, ClosedSet, Dfa, RegError};
use crate::saturation::{
    chain_automaton, delta_from, presaturate, reach_regular, SatError, SaturationOptions, WeightedAutomaton,
};
use crate::signatures::{Alphabet, Signature, Symbol, Word};
use crate::wpds::{Config, Rule, State, WeightedPds};

const UNION: usize = 0;
const INTERSECT: usize = 1;

/// `⟨from, pop⟩ ↪ ⟨to, push⟩`, enabled when the rest of the stack is in `cond`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CondRule {
    pub from: State,
    pub pop: Symbol,
    pub to: State,
    pub push: Word,
    pub cond: Dfa,
}

#[derive(Debug, Clone)]
pub struct CondPds {
    pub states: Vec<String>,
    pub alphabet: Alphabet,
    pub rules: Vec<CondRule>,
}

impl CondPds {
    pub fn successors(&self, c: &Config) -> Vec<Config> {
        let Some((&top, rest)) = c.stack.split_first() else { return vec![] };
        self.rules
            .iter()
            .filter(|r| r.from == c.state && r.pop == top && r.cond.accepts_symbols(rest))
            .map(|r| {
                let mut stack = r.push.clone();
                stack.extend_from_slice(rest);
                Config::new(r.to, stack)
            })
            .collect()
    }
}

/// Languages of the closure `D`, referred to by their position in it.
/// The same carrier serves every proper signature.
#[derive(Debug, Clone)]
pub struct Conditional {
    pub alphabet: Alphabet,
    pub closure: Arc<ClosedSet<Dfa>>,
    empty: u32,
    universal: u32,
}

impl Conditional {
    pub fn new(alphabet: Alphabet, closure: ClosedSet<Dfa>) -> Self {
        let k = alphabet.len();
        let empty = closure.find(&Dfa::empty(k)).expect("closure contains ∅");
        let universal = closure.find(&Dfa::universal(k)).expect("closure contains Γ*");
        Conditional { alphabet, closure: Arc::new(closure), empty, universal }
    }

    /// The closure generated by `conds`.
    pub fn generated(alphabet: Alphabet, conds: impl IntoIterator<Item = Dfa>, cap: usize) -> Result<Self, RegError> {
        let closure = language_closure(alphabet.len(), conds, cap)?;
        Ok(Conditional::new(alphabet, closure))
    }

    pub fn language(&self, a: u32) -> &Dfa {
        self.closure.get(a)
    }

    pub fn index_of(&self, d: &Dfa) -> Option<u32> {
        self.closure.find(d)
    }

    pub fn universal(&self) -> u32 {
        self.universal
    }

    pub fn quotient(&self, w: &[Symbol], a: u32) -> u32 {
        w.iter().fold(a, |acc, g| self.closure.apply_unary(acc, g.index()))
    }

    /// Parses `L<n>` (or `cond:L<n>`).
    pub fn parse(&self, text: &str) -> Option<u32> {
        let t = text.trim();
        let t = t.strip_prefix("cond:").unwrap_or(t);
        let i: u32 = t.strip_prefix('L')?.parse().ok()?;
        ((i as usize) < self.closure.len()).then_some(i)
    }

    /// One block per closure element: `L<n>` followed by its automaton.
    pub fn legend(&self) -> String {
        let mut out = String::new();
        for (i, d) in self.closure.items().iter().enumerate() {
            out.push_str(&format!("L{i}:\n{}", d.render(self.alphabet.names())));
        }
        out
    }
}

impl WeightStructure for Conditional {
    type Value = u32;

    fn name(&self) -> String {
        "conditional".to_string()
    }

    fn contains(&self, _sig: &Signature, a: &u32) -> bool {
        (*a as usize) < self.closure.len()
    }

    fn zero(&self, _sig: &Signature) -> u32 {
        self.empty
    }

    fn unit(&self, _sig: &Signature) -> u32 {
        self.universal
    }

    fn add(&self, _sig: &Signature, a: &u32, b: &u32) -> u32 {
        self.closure.apply_binary(UNION, *a, *b)
    }

    fn smul(&self, _l: &Signature, _r: &Signature, a: &u32, b: &u32) -> u32 {
        self.closure.apply_binary(INTERSECT, *a, *b)
    }

    fn ext(&self, _sig: &Signature, suffix: &[Symbol], a: &u32) -> u32 {
        self.quotient(suffix, *a)
    }

    fn locally_bounded(&self) -> bool {
        true
    }

    fn render(&self, a: &u32) -> String {
        format!("L{a}")
    }
}

impl StructureSampler for Conditional {
    fn sample_symbols(&self) -> usize {
        self.alphabet.len()
    }

    fn sample(&self, _sig: &Signature, rng: &mut SampleRng) -> u32 {
        rng.gen_range(0..self.closure.len() as u32)
    }
}

pub type CondWpds = WeightedPds<LiftedSemiring<Conditional>>;

/// The weight structure over the closure of the rule conditions, and the
/// system reading each conditional rule as a weighted one.
pub fn conditional_ws(pds: &CondPds, cap: usize) -> Result<CondWpds, RegError> {
    conditional_ws_with(pds, [], cap)
}

/// As [`conditional_ws`], with further languages (say, target weights)
/// seeding the closure.
pub fn conditional_ws_with(pds: &CondPds, extra: impl IntoIterator<Item = Dfa>, cap: usize) -> Result<CondWpds, RegError> {
    let seed: Vec<Dfa> = pds.rules.iter().map(|r| r.cond.clone()).chain(extra).collect();
    let ws = Conditional::generated(pds.alphabet.clone(), seed, cap)?;
    let rules = pds
        .rules
        .iter()
        .map(|r| Rule {
            from: r.from,
            pop: r.pop,
            to: r.to,
            push: r.push.clone(),
            weight: Lifted::Val(ws.index_of(&r.cond).expect("conditions seed the closure")),
        })
        .collect();
    Ok(WeightedPds::new(lift(ws), pds.states.clone(), pds.alphabet.clone(), rules).expect("well typed"))
}

/// Saturated analysis of a conditional system.
pub struct CondAnalysis {
    pub encoded: CondWpds,
    pub automaton: WeightedAutomaton<Lifted<u32>>,
}

impl CondAnalysis {
    pub fn new(pds: &CondPds, cap: usize, opts: &SaturationOptions) -> Result<Self, CondError> {
        let encoded = conditional_ws(pds, cap)?;
        let automaton = presaturate(&encoded, opts)?.automaton;
        Ok(CondAnalysis { encoded, automaton })
    }

    fn ws(&self) -> &Conditional {
        self.encoded.semiring.structure()
    }

    /// `⟨p, w⟩ ⟹* ⟨p′, ε⟩` iff `ε ∈ δ(p, w, p′)`.
    pub fn reaches_empty(&self, p: State, w: &[Symbol], q: State) -> bool {
        match delta_from(&self.encoded.semiring, &self.automaton, p, w).get(&q) {
            Some(Lifted::Val(a)) => self.ws().language(*a).contains_epsilon(),
            _ => false,
        }
    }

    /// `⟨p, w⟩ ⟹* ⟨p′, w′⟩`, through a target automaton accepting `w′`
    /// whose edges carry `Γ*`.
    pub fn reaches(&self, p: State, w: &[Symbol], q: State, w2: &[Symbol], opts: &SaturationOptions) -> Result<bool, SatError> {
        if w2.is_empty() {
            return Ok(self.reaches_empty(p, w, q));
        }
        let one = Lifted::Val(self.ws().universal());
        let target = chain_automaton(w2, vec![one; w2.len()]);
        Ok(match reach_regular(&self.encoded, &target, q, p, w, opts)? {
            Lifted::Val(a) => self.ws().language(a).contains_epsilon(),
            Lifted::Bullet => false,
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CondError {
    #[error("condition closure: {0}")]
    Closure(#[from] RegError),
    #[error(transparent)]
    Saturation(#[from] SatError),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::laws::{indexed_law_suite, structure_law_suite, IndexFamily};
    use crate::reglang::DEFAULT_CLOSURE_CAP;

    fn s(i: u32) -> Symbol {
        Symbol(i)
    }

    // pop `a` from p only when the rest of the stack is in a*
    fn guarded() -> CondPds {
        let k = 2;
        CondPds {
            states: vec!["p".into(), "q".into()],
            alphabet: Alphabet::new(["a", "b"]),
            rules: vec![
                CondRule { from: 0, pop: s(0), to: 0, push: vec![], cond: Dfa::star_of(k, &[0]) },
                CondRule { from: 0, pop: s(1), to: 1, push: vec![s(0)], cond: Dfa::universal(k) },
                CondRule { from: 1, pop: s(0), to: 0, push: vec![s(0), s(0)], cond: Dfa::universal(k) },
            ],
        }
    }

    #[test]
    fn laws_hold() {
        let pds = guarded();
        let ws = Conditional::generated(pds.alphabet.clone(), pds.rules.iter().map(|r| r.cond.clone()), 100).unwrap();
        let r = structure_law_suite(&ws, 500, 5);
        assert!(r.passed(), "{r}");
        let r = indexed_law_suite(&lift(ws), IndexFamily::All, 500, 6);
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn conditions_are_respected() {
        let an = CondAnalysis::new(&guarded(), DEFAULT_CLOSURE_CAP, &SaturationOptions::default()).unwrap();
        let (a, b) = (s(0), s(1));
        assert!(an.reaches_empty(0, &[a, a, a], 0));
        // the first pop sees `b a` below
        assert!(!an.reaches_empty(0, &[a, b, a], 0));
        // ⟨p, b⟩ → ⟨q, a⟩ → ⟨p, a a⟩ →* ⟨p, ε⟩
        assert!(an.reaches_empty(0, &[b], 0));
        assert!(an.reaches_empty(0, &[b, a], 0));
        assert!(!an.reaches_empty(0, &[b, b], 0));
        let opts = SaturationOptions::default();
        assert!(an.reaches(0, &[b], 1, &[a], &opts).unwrap());
        assert!(an.reaches(0, &[b, b], 1, &[a, b], &opts).unwrap());
        assert!(!an.reaches(0, &[b, b], 0, &[b], &opts).unwrap());
    }

    #[test]
    fn closure_is_finite_and_bounded_below_cap() {
        let pds = guarded();
        let ws = conditional_ws(&pds, 100).unwrap();
        assert!(ws.semiring.structure().closure.len() <= 100);
        let err = conditional_ws(&pds, 2).unwrap_err();
        assert!(matches!(err, RegError::TooLarge { cap: 2, .. }));
    }
}
