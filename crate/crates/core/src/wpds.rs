//! Weighted pushdown systems over an indexed semiring, with bounded
//! enumeration of signature-level and configuration-level transitions.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;
use thiserror::Error;

use crate::algebra::IndexedSemiring;
use crate::signatures::{Alphabet, Signature, StackSignature, Symbol, Word};

pub type State = u32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PdsError {
    #[error("rule {index}: weight {weight} does not inhabit index {sig}")]
    IllTyped { index: usize, weight: String, sig: String },
    #[error("rule {index}: unknown state {state}")]
    UnknownState { index: usize, state: State },
}

/// `⟨from, pop⟩ ↪ ⟨to, push⟩` with a weight in `D_{pop/push}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule<V> {
    pub from: State,
    pub pop: Symbol,
    pub to: State,
    pub push: Word,
    pub weight: V,
}

impl<V> Rule<V> {
    pub fn signature(&self) -> StackSignature {
        StackSignature::proper(vec![self.pop], self.push.clone())
    }
}

/// A configuration `⟨p, w⟩`, top of stack at the left of `w`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Config {
    pub state: State,
    pub stack: Word,
}

impl Config {
    pub fn new(state: State, stack: Word) -> Self {
        Config { state, stack }
    }
}

#[derive(Debug, Clone)]
pub struct WeightedPds<S: IndexedSemiring> {
    pub semiring: S,
    pub states: Vec<String>,
    pub alphabet: Alphabet,
    pub rules: Vec<Rule<S::Value>>,
}

/// An unweighted rule `⟨from, pop⟩ ↪ ⟨to, push⟩`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlainRule {
    pub from: State,
    pub pop: Symbol,
    pub to: State,
    pub push: Word,
}

/// An ordinary pushdown system.
#[derive(Debug, Clone)]
pub struct Pds {
    pub states: Vec<String>,
    pub alphabet: Alphabet,
    pub rules: Vec<PlainRule>,
}

impl Pds {
    /// Configurations reachable in one step.
    pub fn successors(&self, c: &Config) -> Vec<Config> {
        let Some((&top, rest)) = c.stack.split_first() else { return vec![] };
        self.rules
            .iter()
            .filter(|r| r.from == c.state && r.pop == top)
            .map(|r| {
                let mut stack = r.push.clone();
                stack.extend_from_slice(rest);
                Config::new(r.to, stack)
            })
            .collect()
    }
}

/// A collapsed signature-level transition `p ⟹[σ] p′` with weight `a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigTransition<V> {
    pub from: State,
    pub to: State,
    pub sig: StackSignature,
    pub weight: V,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvMismatch {
    pub start: String,
    pub target: String,
    pub config_weight: String,
    pub signature_weight: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvReport {
    pub depth: usize,
    pub starts: usize,
    pub compared: usize,
    pub mismatches: Vec<ConvMismatch>,
}

impl ConvReport {
    pub fn ok(&self) -> bool {
        self.mismatches.is_empty()
    }
}

impl<S: IndexedSemiring> WeightedPds<S> {
    pub fn new(
        semiring: S,
        states: Vec<String>,
        alphabet: Alphabet,
        rules: Vec<Rule<S::Value>>,
    ) -> Result<Self, PdsError> {
        for (index, r) in rules.iter().enumerate() {
            for state in [r.from, r.to] {
                if state as usize >= states.len() {
                    return Err(PdsError::UnknownState { index, state });
                }
            }
            let sig = r.signature();
            if !semiring.contains(&sig, &r.weight) {
                return Err(PdsError::IllTyped {
                    index,
                    weight: semiring.render(&r.weight),
                    sig: alphabet.render(&sig),
                });
            }
        }
        Ok(WeightedPds { semiring, states, alphabet, rules })
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn state(&self, name: &str) -> Option<State> {
        self.states.iter().position(|s| s == name).map(|i| i as State)
    }

    pub fn state_name(&self, p: State) -> &str {
        &self.states[p as usize]
    }

    pub fn render_config(&self, c: &Config) -> String {
        format!("⟨{}, {}⟩", self.state_name(c.state), self.alphabet.render_word(&c.stack))
    }

    /// Transitions derivable with at most `depth` rule applications, equal
    /// triples `(p, p′, σ)` collapsed by `⊕`; Top products are discarded.
    pub fn sig_transitions(&self, depth: usize) -> Vec<SigTransition<S::Value>> {
        let s = &self.semiring;
        let mut total: BTreeMap<Key, S::Value> = BTreeMap::new();
        let mut layer: HashMap<Key, S::Value> = HashMap::new();
        let unit = StackSignature::unit();
        for p in 0..self.states.len() as State {
            layer.insert((p, p, unit.clone()), s.one());
        }
        for k in 0..=depth {
            for (key, v) in &layer {
                accumulate(s, &mut total, key.clone(), v);
            }
            if k == depth {
                break;
            }
            let mut next: HashMap<Key, S::Value> = HashMap::new();
            for ((p, q, sig), v) in &layer {
                for r in self.rules.iter().filter(|r| r.from == *q) {
                    let rs = r.signature();
                    let out = sig.mul(&rs);
                    if out.is_top() {
                        continue;
                    }
                    let w = s.mul(sig, &rs, v, &r.weight);
                    accumulate_hash(s, &mut next, (*p, r.to, out), w);
                }
            }
            layer = next;
        }
        total
            .into_iter()
            .map(|((from, to, sig), weight)| SigTransition { from, to, sig, weight })
            .collect()
    }

    /// Configurations reachable from `start` with at most `depth` rule steps,
    /// each with the `⊕` of the weights of its derivations, at index
    /// `start.stack / c.stack`. Configurations with stacks longer than
    /// `stack_cap` are not explored.
    pub fn config_transitions(
        &self,
        start: &Config,
        depth: usize,
        stack_cap: usize,
    ) -> BTreeMap<Config, S::Value> {
        let s = &self.semiring;
        let w0 = &start.stack;
        let unit = StackSignature::unit();
        let bal = StackSignature::proper(w0.clone(), w0.clone());
        let first = s.convert(&unit, &bal, &s.one());
        let mut total: BTreeMap<Config, S::Value> = BTreeMap::new();
        let mut layer: HashMap<Config, S::Value> = HashMap::from([(start.clone(), first)]);
        for k in 0..=depth {
            for (c, v) in &layer {
                let idx = StackSignature::proper(w0.clone(), c.stack.clone());
                match total.get_mut(c) {
                    Some(old) => *old = s.add(&idx, old, v),
                    None => {
                        total.insert(c.clone(), v.clone());
                    }
                }
            }
            if k == depth {
                break;
            }
            let mut next: HashMap<Config, S::Value> = HashMap::new();
            for (c, v) in &layer {
                let Some((&top, rest)) = c.stack.split_first() else { continue };
                for r in self.rules.iter().filter(|r| r.from == c.state && r.pop == top) {
                    let mut stack = r.push.clone();
                    stack.extend_from_slice(rest);
                    if stack.len() > stack_cap {
                        continue;
                    }
                    let step_from = StackSignature::proper(vec![top], r.push.clone());
                    let step_to = StackSignature::proper(c.stack.clone(), stack.clone());
                    let step = s.convert(&step_from, &step_to, &r.weight);
                    let here = StackSignature::proper(w0.clone(), c.stack.clone());
                    let w = s.mul(&here, &step_to, v, &step);
                    let idx = StackSignature::proper(w0.clone(), stack.clone());
                    let nc = Config::new(r.to, stack);
                    match next.get_mut(&nc) {
                        Some(old) => *old = s.add(&idx, old, &w),
                        None => {
                            next.insert(nc, w);
                        }
                    }
                }
            }
            layer = next;
        }
        total
    }

    /// Compares both enumerations: for every start `⟨p, w⟩` with `|w| ≤ depth`
    /// and every target `⟨p′, w′⟩`, the configuration-level weight must equal
    /// the `⊕` of `ext[σ, w/w′](a′)` over signature-level transitions
    /// `p ⟹[σ] p′ | a′` with `σ ≤ w/w′`.
    pub fn check_prop_conv(&self, depth: usize) -> ConvReport {
        let s = &self.semiring;
        let sig = self.sig_transitions(depth);
        let mut by_pair: HashMap<(State, State), Vec<&SigTransition<S::Value>>> = HashMap::new();
        for t in &sig {
            by_pair.entry((t.from, t.to)).or_default().push(t);
        }
        let growth = self.rules.iter().map(|r| r.push.len()).max().unwrap_or(1);
        let symbols: Vec<Symbol> = self.alphabet.symbols().collect();
        let mut words: Vec<Word> = vec![vec![]];
        let mut frontier: Vec<Word> = vec![vec![]];
        for _ in 0..depth {
            let mut next = Vec::new();
            for w in &frontier {
                for &a in &symbols {
                    let mut w2 = w.clone();
                    w2.push(a);
                    next.push(w2);
                }
            }
            words.extend(next.iter().cloned());
            frontier = next;
        }
        let mut report = ConvReport { depth, starts: 0, compared: 0, mismatches: Vec::new() };
        for p in 0..self.states.len() as State {
            for w in &words {
                report.starts += 1;
                let start = Config::new(p, w.clone());
                let cap = w.len() + depth * growth.max(1);
                let configs = self.config_transitions(&start, depth, cap);
                // signature-level side, keyed by target configuration
                let mut predicted: BTreeMap<Config, S::Value> = BTreeMap::new();
                for q in 0..self.states.len() as State {
                    for t in by_pair.get(&(p, q)).into_iter().flatten() {
                        let Some(tsig) = t.sig.as_proper() else { continue };
                        let Some(z) = w.strip_prefix(tsig.pop.as_slice()) else { continue };
                        let mut target = tsig.push.clone();
                        target.extend_from_slice(z);
                        let to_idx = StackSignature::proper(w.clone(), target.clone());
                        let v = s.convert(&t.sig, &to_idx, &t.weight);
                        let c = Config::new(q, target);
                        match predicted.get_mut(&c) {
                            Some(old) => *old = s.add(&to_idx, old, &v),
                            None => {
                                predicted.insert(c, v);
                            }
                        }
                    }
                }
                let mut keys: Vec<&Config> = configs.keys().chain(predicted.keys()).collect();
                keys.sort();
                keys.dedup();
                for c in keys {
                    let idx = StackSignature::proper(w.clone(), c.stack.clone());
                    let zero = s.zero(&idx);
                    let a = configs.get(c).unwrap_or(&zero);
                    let b = predicted.get(c).unwrap_or(&zero);
                    report.compared += 1;
                    if !s.equal(&idx, a, b) {
                        report.mismatches.push(ConvMismatch {
                            start: self.render_config(&start),
                            target: self.render_config(c),
                            config_weight: s.render(a),
                            signature_weight: s.render(b),
                        });
                    }
                }
            }
        }
        report
    }
}

type Key = (State, State, StackSignature);

fn accumulate<S: IndexedSemiring>(s: &S, map: &mut BTreeMap<Key, S::Value>, key: Key, v: &S::Value) {
    match map.get_mut(&key) {
        Some(old) => *old = s.add(&key.2, old, v),
        None => {
            map.insert(key, v.clone());
        }
    }
}

fn accumulate_hash<S: IndexedSemiring>(s: &S, map: &mut HashMap<Key, S::Value>, key: Key, v: S::Value) {
    match map.get_mut(&key) {
        Some(old) => *old = s.add(&key.2, old, &v),
        None => {
            map.insert(key, v);
        }
    }
}

/// Restricts collapsed transitions to those of signature `w/ε`.
pub fn popping_weights<V: Clone>(ts: &[SigTransition<V>]) -> HashMap<(State, Word, State), V> {
    ts.iter()
        .filter_map(|t| {
            let s: &Signature = t.sig.as_proper()?;
            s.push.is_empty().then(|| ((t.from, s.pop.clone(), t.to), t.weight.clone()))
        })
        .collect()
}
