//! Backward saturation over indexed semirings: weighted P-automata, the
//! fixpoint construction, path weights, and regular-target queries.

use std::collections::{BTreeMap, HashMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::IndexedSemiring;
use crate::signatures::{Alphabet, StackSignature, Symbol};
use crate::wpds::{State, WeightedPds};

pub const DEFAULT_BUDGET: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SatError {
    #[error("the weight domain {0} does not declare local boundedness; saturation may not terminate")]
    NotLocallyBounded(String),
    #[error("step budget of {budget} edge updates exhausted; last grown edge {edge}")]
    BudgetExceeded { budget: usize, edge: String },
    #[error("target automaton has an incoming edge to its initial state: {0}")]
    InitialHasIncoming(String),
    #[error("malformed automaton dump line {line}: {msg}")]
    Dump { line: usize, msg: String },
}

/// Order in which pending rules are taken from the worklist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WorkOrder {
    #[default]
    Fifo,
    Lifo,
    /// FIFO with the initial rules enqueued last-to-first.
    ReversedFifo,
    /// Uniformly random pending rule, from a fixed seed.
    Shuffled(u64),
}

#[derive(Debug, Clone)]
pub struct SaturationOptions {
    pub budget: usize,
    pub order: WorkOrder,
    pub record_trace: bool,
}

impl Default for SaturationOptions {
    fn default() -> Self {
        SaturationOptions { budget: DEFAULT_BUDGET, order: WorkOrder::Fifo, record_trace: false }
    }
}

/// A weighted automaton whose edges `q --γ--> q′` carry weights in `D_{γ/ε}`.
/// Edges absent from the table weigh `0`; zero weights are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedAutomaton<V> {
    pub states: Vec<String>,
    pub edges: BTreeMap<(State, Symbol, State), V>,
    pub init: Option<State>,
    pub finals: Vec<State>,
}

impl<V: Clone> WeightedAutomaton<V> {
    pub fn new(states: Vec<String>) -> Self {
        WeightedAutomaton { states, edges: BTreeMap::new(), init: None, finals: Vec::new() }
    }

    pub fn state(&self, name: &str) -> Option<State> {
        self.states.iter().position(|s| s == name).map(|i| i as State)
    }

    pub fn edge(&self, p: State, g: Symbol, q: State) -> Option<&V> {
        self.edges.get(&(p, g, q))
    }

    fn out_edges(&self, p: State, g: Symbol) -> impl Iterator<Item = (State, &V)> {
        self.edges
            .range((p, g, 0)..=(p, g, State::MAX))
            .map(|(&(_, _, q), v)| (q, v))
    }
}

/// One edge update made by saturation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEvent<V> {
    pub rule: usize,
    pub edge: (State, Symbol, State),
    pub old: V,
    pub new: V,
}

#[derive(Debug, Clone)]
pub struct Saturated<V> {
    pub automaton: WeightedAutomaton<V>,
    pub steps: usize,
    pub trace: Vec<TraceEvent<V>>,
}

fn popping(w: &[Symbol]) -> StackSignature {
    StackSignature::proper(w.to_vec(), vec![])
}

/// `δ(p, w, ·)`: the weight of every path labelled `w` from `p`, at index `w/ε`.
pub fn delta_from<S: IndexedSemiring>(
    s: &S,
    a: &WeightedAutomaton<S::Value>,
    p: State,
    w: &[Symbol],
) -> HashMap<State, S::Value> {
    let mut cur: HashMap<State, S::Value> = HashMap::from([(p, s.one())]);
    for (i, &g) in w.iter().enumerate() {
        let here = popping(&w[..i]);
        let step = popping(&[g]);
        let there = popping(&w[..=i]);
        let mut next: HashMap<State, S::Value> = HashMap::new();
        for (r, v) in &cur {
            for (q, e) in a.out_edges(*r, g) {
                let x = s.mul(&here, &step, v, e);
                match next.get_mut(&q) {
                    Some(old) => *old = s.add(&there, old, &x),
                    None => {
                        next.insert(q, x);
                    }
                }
            }
        }
        next.retain(|_, v| !s.is_zero(&there, v));
        cur = next;
        if cur.is_empty() {
            break;
        }
    }
    cur
}

/// `δ(p, w, p′)`; `1` or `0` at `ε/ε` for the empty word.
pub fn delta<S: IndexedSemiring>(
    s: &S,
    a: &WeightedAutomaton<S::Value>,
    p: State,
    w: &[Symbol],
    q: State,
) -> S::Value {
    delta_from(s, a, p, w)
        .remove(&q)
        .unwrap_or_else(|| s.zero(&popping(w)))
}

struct Worklist {
    queue: VecDeque<usize>,
    queued: Vec<bool>,
    order: WorkOrder,
    rng: ChaCha8Rng,
}

impl Worklist {
    fn new(n: usize, order: WorkOrder) -> Self {
        let seed = match order {
            WorkOrder::Shuffled(s) => s,
            _ => 0,
        };
        let mut queue: VecDeque<usize> = (0..n).collect();
        if order == WorkOrder::ReversedFifo {
            queue = queue.into_iter().rev().collect();
        }
        Worklist { queue, queued: vec![true; n], order, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    fn push(&mut self, r: usize) {
        if !self.queued[r] {
            self.queued[r] = true;
            self.queue.push_back(r);
        }
    }

    fn pop(&mut self) -> Option<usize> {
        let r = match self.order {
            WorkOrder::Fifo | WorkOrder::ReversedFifo => self.queue.pop_front(),
            WorkOrder::Lifo => self.queue.pop_back(),
            WorkOrder::Shuffled(_) => {
                if self.queue.is_empty() {
                    None
                } else {
                    let i = self.rng.gen_range(0..self.queue.len());
                    self.queue.swap_remove_back(i)
                }
            }
        }?;
        self.queued[r] = false;
        Some(r)
    }
}

/// Saturates `start` (whose states must begin with the states of `pds`)
/// under the rules of `pds`: for a rule `⟨p, γ, p′, w, a₁⟩` and a path
/// `p′ --w--> p″` of weight `a₂`, the edge `p --γ--> p″` grows by `a₁ ⊗ a₂`.
pub fn saturate<S: IndexedSemiring>(
    pds: &WeightedPds<S>,
    start: WeightedAutomaton<S::Value>,
    opts: &SaturationOptions,
) -> Result<Saturated<S::Value>, SatError> {
    let s = &pds.semiring;
    if !s.locally_bounded() {
        return Err(SatError::NotLocallyBounded(s.name()));
    }
    let mut a = start;
    let mut trace = Vec::new();
    let mut steps = 0usize;
    // rules to revisit when an edge labelled γ changes
    let mut watchers: HashMap<Symbol, Vec<usize>> = HashMap::new();
    for (i, r) in pds.rules.iter().enumerate() {
        let mut seen = r.push.clone();
        seen.sort();
        seen.dedup();
        for g in seen {
            watchers.entry(g).or_default().push(i);
        }
    }
    let mut work = Worklist::new(pds.rules.len(), opts.order);
    while let Some(ri) = work.pop() {
        let r = &pds.rules[ri];
        let rsig = r.signature();
        let tail = popping(&r.push);
        let target = popping(&[r.pop]);
        for (q, a2) in delta_from(s, &a, r.to, &r.push) {
            let contrib = s.mul(&rsig, &tail, &r.weight, &a2);
            if s.is_zero(&target, &contrib) {
                continue;
            }
            let key = (r.from, r.pop, q);
            let old = a.edges.get(&key).cloned().unwrap_or_else(|| s.zero(&target));
            let new = s.add(&target, &old, &contrib);
            if s.equal(&target, &old, &new) {
                continue;
            }
            steps += 1;
            if steps > opts.budget {
                return Err(SatError::BudgetExceeded {
                    budget: opts.budget,
                    edge: format!(
                        "{} --{}|{}--> {}",
                        a.states[key.0 as usize],
                        pds.alphabet.name(key.1),
                        s.render(&new),
                        a.states[key.2 as usize]
                    ),
                });
            }
            if opts.record_trace {
                trace.push(TraceEvent { rule: ri, edge: key, old, new: new.clone() });
            }
            a.edges.insert(key, new);
            for &w in watchers.get(&r.pop).into_iter().flatten() {
                work.push(w);
            }
        }
    }
    Ok(Saturated { automaton: a, steps, trace })
}

/// The automaton `A_pre*` over the states of `pds`, saturated from no edges.
pub fn presaturate<S: IndexedSemiring>(
    pds: &WeightedPds<S>,
    opts: &SaturationOptions,
) -> Result<Saturated<S::Value>, SatError> {
    saturate(pds, WeightedAutomaton::new(pds.states.clone()), opts)
}

/// Re-applies a trace to the automaton it started from.
pub fn replay<V: Clone + PartialEq>(
    start: &WeightedAutomaton<V>,
    trace: &[TraceEvent<V>],
) -> WeightedAutomaton<V> {
    let mut a = start.clone();
    for e in trace {
        a.edges.insert(e.edge, e.new.clone());
    }
    a
}

/// A target automaton whose initial state is merged with a state of the
/// system, and the query answer summed over its final states.
pub fn combine_target<S: IndexedSemiring>(
    pds: &WeightedPds<S>,
    target: &WeightedAutomaton<S::Value>,
    anchor: State,
) -> Result<(WeightedAutomaton<S::Value>, Vec<State>), SatError> {
    let q0 = target.init.unwrap_or(0);
    if let Some(((p, g, _), _)) = target.edges.iter().find(|((_, _, q), _)| *q == q0) {
        return Err(SatError::InitialHasIncoming(format!(
            "{} --{}--> {}",
            target.states[*p as usize],
            pds.alphabet.name(*g),
            target.states[q0 as usize]
        )));
    }
    let mut states = pds.states.clone();
    let mut map = vec![0 as State; target.states.len()];
    for (i, name) in target.states.iter().enumerate() {
        if i as State == q0 {
            map[i] = anchor;
        } else {
            map[i] = states.len() as State;
            states.push(format!("{name}'"));
        }
    }
    let mut a = WeightedAutomaton::new(states);
    for (&(p, g, q), v) in &target.edges {
        a.edges.insert((map[p as usize], g, map[q as usize]), v.clone());
    }
    let finals = target.finals.iter().map(|&f| map[f as usize]).collect();
    Ok((a, finals))
}

/// The automaton `q0 --w[0]--> q1 … --w[n-1]--> qn` accepting exactly `w`,
/// with the given edge weights.
pub fn chain_automaton<V: Clone>(w: &[Symbol], weights: Vec<V>) -> WeightedAutomaton<V> {
    assert_eq!(w.len(), weights.len());
    let mut a = WeightedAutomaton::new((0..=w.len()).map(|i| format!("q{i}")).collect());
    for (i, (&g, v)) in w.iter().zip(weights).enumerate() {
        a.edges.insert((i as State, g, i as State + 1), v);
    }
    a.init = Some(0);
    a.finals = vec![w.len() as State];
    a
}

/// `⊕_{q∈F} δ(p, w, q)` in the saturation of `pds` combined with `target`,
/// the initial state of `target` identified with `anchor`.
pub fn reach_regular<S: IndexedSemiring>(
    pds: &WeightedPds<S>,
    target: &WeightedAutomaton<S::Value>,
    anchor: State,
    p: State,
    w: &[Symbol],
    opts: &SaturationOptions,
) -> Result<S::Value, SatError> {
    let (start, finals) = combine_target(pds, target, anchor)?;
    let sat = saturate(pds, start, opts)?;
    Ok(sum_over(&pds.semiring, &sat.automaton, p, w, &finals))
}

pub fn sum_over<S: IndexedSemiring>(
    s: &S,
    a: &WeightedAutomaton<S::Value>,
    p: State,
    w: &[Symbol],
    finals: &[State],
) -> S::Value {
    let idx = popping(w);
    let ds = delta_from(s, a, p, w);
    let mut acc = s.zero(&idx);
    for f in finals {
        if let Some(v) = ds.get(f) {
            acc = s.add(&idx, &acc, v);
        }
    }
    acc
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub from: String,
    pub symbol: String,
    pub to: String,
    pub weight: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutomatonRecord {
    pub states: Vec<String>,
    pub edges: Vec<EdgeRecord>,
}

fn edge_records<V>(
    a: &WeightedAutomaton<V>,
    alphabet: &Alphabet,
    render: &dyn Fn(&V) -> String,
) -> Vec<EdgeRecord> {
    a.edges
        .iter()
        .map(|(&(p, g, q), v)| EdgeRecord {
            from: a.states[p as usize].clone(),
            symbol: alphabet.name(g).to_string(),
            to: a.states[q as usize].clone(),
            weight: render(v),
        })
        .collect()
}

/// One line `p --γ|weight--> p′` per edge.
pub fn dump<V>(a: &WeightedAutomaton<V>, alphabet: &Alphabet, render: &dyn Fn(&V) -> String) -> String {
    edge_records(a, alphabet, render)
        .iter()
        .map(|e| format!("{} --{}|{}--> {}\n", e.from, e.symbol, e.weight, e.to))
        .collect()
}

pub fn dump_record<V>(
    a: &WeightedAutomaton<V>,
    alphabet: &Alphabet,
    render: &dyn Fn(&V) -> String,
) -> AutomatonRecord {
    AutomatonRecord { states: a.states.clone(), edges: edge_records(a, alphabet, render) }
}

pub fn dump_json<V>(a: &WeightedAutomaton<V>, alphabet: &Alphabet, render: &dyn Fn(&V) -> String) -> String {
    serde_json::to_string_pretty(&dump_record(a, alphabet, render)).expect("serializable")
}

fn from_records<V: Clone>(
    states: Vec<String>,
    edges: &[EdgeRecord],
    alphabet: &Alphabet,
    parse: &dyn Fn(&str) -> Option<V>,
) -> Result<WeightedAutomaton<V>, SatError> {
    let mut a = WeightedAutomaton::new(states);
    for (i, e) in edges.iter().enumerate() {
        let err = |msg: String| SatError::Dump { line: i + 1, msg };
        let p = a.state(&e.from).ok_or_else(|| err(format!("unknown state `{}`", e.from)))?;
        let q = a.state(&e.to).ok_or_else(|| err(format!("unknown state `{}`", e.to)))?;
        let g = alphabet.lookup(&e.symbol).ok_or_else(|| err(format!("unknown symbol `{}`", e.symbol)))?;
        let v = parse(&e.weight).ok_or_else(|| err(format!("bad weight `{}`", e.weight)))?;
        a.edges.insert((p, g, q), v);
    }
    Ok(a)
}

/// Parses the line format back; `states` fixes the state numbering.
pub fn parse_dump<V: Clone>(
    text: &str,
    states: Vec<String>,
    alphabet: &Alphabet,
    parse: &dyn Fn(&str) -> Option<V>,
) -> Result<WeightedAutomaton<V>, SatError> {
    let mut edges = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let err = |msg: &str| SatError::Dump { line: i + 1, msg: msg.to_string() };
        let (from, rest) = line.split_once(" --").ok_or_else(|| err("expected `p --γ|w--> q`"))?;
        let (label, to) = rest.rsplit_once("--> ").ok_or_else(|| err("expected `--> q`"))?;
        let (symbol, weight) = label.split_once('|').ok_or_else(|| err("expected `γ|weight`"))?;
        edges.push(EdgeRecord {
            from: from.to_string(),
            symbol: symbol.to_string(),
            to: to.to_string(),
            weight: weight.to_string(),
        });
    }
    from_records(states, &edges, alphabet, parse)
}

pub fn parse_dump_json<V: Clone>(
    text: &str,
    alphabet: &Alphabet,
    parse: &dyn Fn(&str) -> Option<V>,
) -> Result<WeightedAutomaton<V>, SatError> {
    let rec: AutomatonRecord =
        serde_json::from_str(text).map_err(|e| SatError::Dump { line: e.line(), msg: e.to_string() })?;
    from_records(rec.states, &rec.edges, alphabet, parse)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{lift, Lifted, LiftedSemiring};
    use crate::domains::{Height, MinHeight};
    use crate::wpds::Rule;

    type MH = LiftedSemiring<MinHeight>;

    fn h(n: u64) -> Lifted<Height> {
        Lifted::Val(Height::Finite(n))
    }

    fn pex() -> WeightedPds<MH> {
        let g = Symbol(0);
        let rule = |from, to, push: usize, w| Rule { from, pop: g, to, push: vec![g; push], weight: h(w) };
        WeightedPds::new(
            lift(MinHeight::new(1)),
            (0..4).map(|i| format!("p{i}")).collect(),
            Alphabet::new(["g"]),
            vec![rule(0, 1, 3, 3), rule(1, 1, 4, 4), rule(1, 2, 0, 1), rule(2, 3, 0, 1), rule(3, 2, 0, 1)],
        )
        .unwrap()
    }

    fn edges(a: &WeightedAutomaton<Lifted<Height>>) -> Vec<(State, State, u64)> {
        a.edges
            .iter()
            .map(|(&(p, _, q), v)| (p, q, v.value().unwrap().finite().unwrap()))
            .collect()
    }

    #[test]
    fn running_example() {
        let p = pex();
        let sat = presaturate(&p, &SaturationOptions::default()).unwrap();
        assert_eq!(
            edges(&sat.automaton),
            vec![(0, 2, 3), (0, 3, 6), (1, 2, 1), (1, 3, 4), (2, 3, 1), (3, 2, 1)]
        );
        let g = Symbol(0);
        assert_eq!(delta(&p.semiring, &sat.automaton, 0, &[g], 3), h(6));
        assert_eq!(delta(&p.semiring, &sat.automaton, 1, &[g, g], 3), h(2));
        assert_eq!(delta(&p.semiring, &sat.automaton, 2, &[], 2), h(0));
        assert_eq!(delta(&p.semiring, &sat.automaton, 2, &[], 1), Lifted::Val(Height::Infinite));
    }

    #[test]
    fn no_rules_no_edges() {
        let p = WeightedPds::new(lift(MinHeight::new(1)), vec!["p".into()], Alphabet::new(["g"]), vec![]).unwrap();
        let opts = SaturationOptions { record_trace: true, ..Default::default() };
        let sat = presaturate(&p, &opts).unwrap();
        assert!(sat.automaton.edges.is_empty());
        assert!(sat.trace.is_empty());
    }

    #[test]
    fn trace_starts_with_pops_and_replays() {
        let p = pex();
        let opts = SaturationOptions { record_trace: true, ..Default::default() };
        let sat = presaturate(&p, &opts).unwrap();
        let first: Vec<(State, State)> = sat.trace.iter().take(3).map(|e| (e.edge.0, e.edge.2)).collect();
        assert_eq!(first, vec![(1, 2), (2, 3), (3, 2)]);
        let again = replay(&WeightedAutomaton::new(p.states.clone()), &sat.trace);
        assert_eq!(again, sat.automaton);
        for e in &sat.trace {
            let idx = StackSignature::proper(vec![e.edge.1], vec![]);
            assert!(p.semiring.below(&idx, &e.old, &e.new));
        }
    }

    #[test]
    fn worklist_order_is_irrelevant() {
        let p = pex();
        let base = presaturate(&p, &SaturationOptions::default()).unwrap().automaton;
        for order in [WorkOrder::Lifo, WorkOrder::ReversedFifo, WorkOrder::Shuffled(1), WorkOrder::Shuffled(2)] {
            let opts = SaturationOptions { order, ..Default::default() };
            assert_eq!(presaturate(&p, &opts).unwrap().automaton, base);
        }
    }

    #[test]
    fn budget_overflow_names_an_edge() {
        let opts = SaturationOptions { budget: 2, ..Default::default() };
        let err = presaturate(&pex(), &opts).unwrap_err();
        match err {
            SatError::BudgetExceeded { budget: 2, edge } => assert!(edge.contains("--g|")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn dumps_round_trip() {
        let p = pex();
        let a = presaturate(&p, &SaturationOptions::default()).unwrap().automaton;
        let render = |v: &Lifted<Height>| p.semiring.render(v);
        let text = dump(&a, &p.alphabet, &render);
        assert!(text.contains("p0 --g|6--> p3\n"));
        let parse = |t: &str| Height::parse(t).map(Lifted::Val);
        let back = parse_dump(&text, p.states.clone(), &p.alphabet, &parse).unwrap();
        assert_eq!(back, a);
        assert_eq!(dump(&back, &p.alphabet, &render), text);
        let json = dump_json(&a, &p.alphabet, &render);
        let back = parse_dump_json(&json, &p.alphabet, &parse).unwrap();
        assert_eq!(dump_json(&back, &p.alphabet, &render), json);
    }

    #[test]
    fn regular_target_with_only_epsilon_reduces_to_delta() {
        let p = pex();
        let g = Symbol(0);
        let mut t = WeightedAutomaton::new(vec!["q0".into()]);
        t.init = Some(0);
        t.finals = vec![0];
        let opts = SaturationOptions::default();
        let sat = presaturate(&p, &opts).unwrap().automaton;
        for w in [vec![g], vec![g, g], vec![g, g, g]] {
            for anchor in 0..4 {
                for start in 0..4 {
                    let via_target = reach_regular(&p, &t, anchor, start, &w, &opts).unwrap();
                    assert_eq!(via_target, delta(&p.semiring, &sat, start, &w, anchor));
                }
            }
        }
    }

    #[test]
    fn target_path_weight_after_a_push() {
        // one rule ⟨p, a⟩ ↪ ⟨p', b c⟩; target accepts exactly "b c" from p'
        let (a, b, c) = (Symbol(0), Symbol(1), Symbol(2));
        let pds = WeightedPds::new(
            lift(MinHeight::new(3)),
            vec!["p".into(), "p'".into()],
            Alphabet::new(["a", "b", "c"]),
            vec![Rule { from: 0, pop: a, to: 1, push: vec![b, c], weight: h(2) }],
        )
        .unwrap();
        let mut t = WeightedAutomaton::new(vec!["q0".into(), "q1".into(), "q2".into()]);
        t.init = Some(0);
        t.finals = vec![2];
        t.edges.insert((0, b, 1), h(1));
        t.edges.insert((1, c, 2), h(1));
        let opts = SaturationOptions::default();
        // ⟨p, a⟩ ⟹ ⟨p', bc⟩ at height 2, then bc accepted; the product is max(2, 2)
        assert_eq!(reach_regular(&pds, &t, 1, 0, &[a], &opts).unwrap(), h(2));
        assert_eq!(reach_regular(&pds, &t, 1, 1, &[b, c], &opts).unwrap(), h(2));
        assert_eq!(reach_regular(&pds, &t, 1, 0, &[b], &opts).unwrap(), Lifted::Val(Height::Infinite));
        let mut bad = t.clone();
        bad.edges.insert((1, b, 0), h(1));
        assert!(matches!(reach_regular(&pds, &bad, 1, 0, &[a], &opts), Err(SatError::InitialHasIncoming(_))));
    }
}
