//! Queries on a parsed system file, dispatched on its domain. Words are given
//! as text and parsed against the system's alphabet or order.

use thiserror::Error;

use crate::algebra::laws::{indexed_law_suite, structure_law_suite, IndexFamily, LawReport, StructureSampler};
use crate::algebra::{lift, IndexedSemiring, Lifted};
use crate::domains::conditional::{conditional_ws_with, CondRule, Conditional};
use crate::domains::minheight::{Height, MinHeight};
use crate::domains::relations::{encode_pds_as_relations, hash_alphabet, hashes, Relations};
use crate::domains::trpds::{trpds_ws, TransductionFns};
use crate::domains::wspds::{wspds_ws, CoverAnalysis, IdealFns, NamedTransfer, Wspds};
use crate::format::{parse_elems, parse_height, parse_word, Domain, System, SystemFile, TargetSpec};
use crate::reglang::{Dfa, RegError, Transduction};
use crate::saturation::{
    chain_automaton, delta_from, dump_record, presaturate, reach_regular, AutomatonRecord, SatError,
    SaturationOptions, WeightedAutomaton, DEFAULT_BUDGET,
};
use crate::signatures::{Alphabet, Symbol, Word};
use crate::wpds::{State, WeightedPds};
use crate::wqo::{FiniteOrder, Wqo, WqoError};

#[derive(Debug, Clone, Copy)]
pub struct Caps {
    pub closure: usize,
    pub budget: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { closure: crate::reglang::DEFAULT_CLOSURE_CAP, budget: DEFAULT_BUDGET }
    }
}

impl Caps {
    fn opts(&self) -> SaturationOptions {
        SaturationOptions { budget: self.budget, ..Default::default() }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RunError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Cap(String),
    #[error("{0}")]
    Unsupported(String),
}

impl From<SatError> for RunError {
    fn from(e: SatError) -> Self {
        match e {
            SatError::BudgetExceeded { .. } => RunError::Cap(format!("step cap: {e}")),
            other => RunError::Input(other.to_string()),
        }
    }
}

impl From<RegError> for RunError {
    fn from(e: RegError) -> Self {
        match e {
            RegError::TooLarge { .. } => RunError::Cap(format!("closure cap: {e}")),
            other => RunError::Input(other.to_string()),
        }
    }
}

impl From<WqoError> for RunError {
    fn from(e: WqoError) -> Self {
        RunError::Input(e.to_string())
    }
}

#[derive(Debug, Clone)]
pub struct PresatOutput {
    pub automaton: AutomatonRecord,
    pub steps: usize,
    /// Meaning of closure indices in the rendered weights, when there are any.
    pub legend: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightOutput {
    pub weight: String,
    pub reachable: bool,
}

fn word(alphabet: &Alphabet, text: &str) -> Result<Word, RunError> {
    parse_word(alphabet, text).map_err(RunError::Input)
}

fn elems<W: Wqo>(order: &W, text: &str) -> Result<Vec<W::Elem>, RunError> {
    parse_elems(order, text).map_err(RunError::Input)
}

fn presat_of<S: IndexedSemiring>(pds: &WeightedPds<S>, caps: &Caps, legend: Option<String>) -> Result<PresatOutput, RunError> {
    let sat = presaturate(pds, &caps.opts())?;
    let render = |v: &S::Value| pds.semiring.render(v);
    Ok(PresatOutput { automaton: dump_record(&sat.automaton, &pds.alphabet, &render), steps: sat.steps, legend })
}

fn delta_of<S: IndexedSemiring>(pds: &WeightedPds<S>, p: State, w: &[Symbol], q: State, caps: &Caps) -> Result<S::Value, RunError> {
    let sat = presaturate(pds, &caps.opts())?;
    let idx = crate::signatures::StackSignature::proper(w.to_vec(), vec![]);
    Ok(delta_from(&pds.semiring, &sat.automaton, p, w).remove(&q).unwrap_or_else(|| pds.semiring.zero(&idx)))
}

fn build_target<S: IndexedSemiring>(
    spec: &TargetSpec,
    alphabet: &Alphabet,
    parse: &dyn Fn(&str) -> Option<S::Value>,
) -> Result<WeightedAutomaton<S::Value>, RunError> {
    let mut a = WeightedAutomaton::new(spec.states.clone());
    let st = |n: &str| a_state(&spec.states, n);
    for (from, sym, weight, to) in &spec.edges {
        let g = alphabet
            .lookup(sym)
            .ok_or_else(|| RunError::Input(format!("target line {}: unknown symbol `{sym}`", spec.line)))?;
        let v = parse(weight).ok_or_else(|| RunError::Input(format!("target line {}: bad weight `{weight}`", spec.line)))?;
        a.edges.insert((st(from), g, st(to)), v);
    }
    a.init = Some(st(&spec.init));
    a.finals = spec.finals.iter().map(|f| st(f)).collect();
    Ok(a)
}

fn a_state(states: &[String], name: &str) -> State {
    states.iter().position(|s| s == name).expect("collected from the block") as State
}

impl SystemFile {
    fn state_arg(&self, name: &str) -> Result<State, RunError> {
        self.state(name).ok_or_else(|| RunError::Input(format!("unknown state `{name}`")))
    }

    fn spec(&self, target: &str) -> Result<&TargetSpec, RunError> {
        self.targets.get(target).ok_or_else(|| RunError::Input(format!("no target automaton named `{target}`")))
    }

    /// Conditions from rules plus automata referenced by targets.
    fn cond_extra(&self) -> Vec<Dfa> {
        self.automata.values().cloned().collect()
    }

    fn cond_parse<'a>(&'a self, ws: &'a Conditional) -> impl Fn(&str) -> Option<Lifted<u32>> + 'a {
        move |t: &str| {
            let t = t.trim();
            if let Some(i) = ws.parse(t) {
                return Some(Lifted::Val(i));
            }
            let name = t.strip_prefix("cond:")?;
            if name == "*" {
                return Some(Lifted::Val(ws.universal()));
            }
            ws.index_of(self.automata.get(name)?).map(Lifted::Val)
        }
    }

    pub fn presat(&self, caps: &Caps) -> Result<PresatOutput, RunError> {
        match &self.system {
            System::MinHeight(p) => presat_of(p, caps, None),
            System::Relations(p) => presat_of(&encode_pds_as_relations(p), caps, None),
            System::Conditional(p) => {
                let enc = conditional_ws_with(p, self.cond_extra(), caps.closure)?;
                let legend = enc.semiring.structure().legend();
                presat_of(&enc, caps, Some(legend))
            }
            System::Trpds(p) => {
                let enc = trpds_ws(p, caps.closure)?;
                let legend = enc.semiring.structure().legend();
                presat_of(&enc, caps, Some(legend))
            }
            System::WspdsFinite(w) => presat_of(&wspds_ws(w)?, caps, None),
            System::WspdsVector(w) => presat_of(&wspds_ws(w)?, caps, None),
        }
    }

    /// `δ(p, w, p′)` rendered; `#`-encoded domains read `w` over the source
    /// alphabet and report the weight at `#^{|w|}`.
    pub fn delta(&self, p: &str, w: &str, q: &str, caps: &Caps) -> Result<String, RunError> {
        let (p, q) = (self.state_arg(p)?, self.state_arg(q)?);
        match &self.system {
            System::MinHeight(s) => {
                let v = delta_of(s, p, &word(&s.alphabet, w)?, q, caps)?;
                Ok(s.semiring.render(&v))
            }
            System::Relations(s) => {
                let enc = encode_pds_as_relations(s);
                let v = delta_of(&enc, p, &hashes(word(&s.alphabet, w)?.len()), q, caps)?;
                Ok(enc.semiring.render(&v))
            }
            System::Conditional(s) => {
                let enc = conditional_ws_with(s, self.cond_extra(), caps.closure)?;
                let v = delta_of(&enc, p, &word(&s.alphabet, w)?, q, caps)?;
                Ok(enc.semiring.render(&v))
            }
            System::Trpds(s) => {
                let enc = trpds_ws(s, caps.closure)?;
                let v = delta_of(&enc, p, &hashes(word(&s.alphabet, w)?.len()), q, caps)?;
                Ok(enc.semiring.render(&v))
            }
            System::WspdsFinite(s) => {
                let enc = wspds_ws(s)?;
                let v = delta_of(&enc, p, &hashes(elems(&s.order, w)?.len()), q, caps)?;
                Ok(enc.semiring.render(&v))
            }
            System::WspdsVector(s) => {
                let enc = wspds_ws(s)?;
                let v = delta_of(&enc, p, &hashes(elems(&s.order, w)?.len()), q, caps)?;
                Ok(enc.semiring.render(&v))
            }
        }
    }

    /// The min-height weight `δ(p, w, p′)`.
    pub fn minheight(&self, p: &str, w: &str, q: &str, caps: &Caps) -> Result<Height, RunError> {
        let System::MinHeight(s) = &self.system else {
            return Err(RunError::Unsupported(format!("`minheight` needs a minheight system, not {}", self.domain)));
        };
        let v = delta_of(s, self.state_arg(p)?, &word(&s.alphabet, w)?, self.state_arg(q)?, caps)?;
        Ok(match v {
            Lifted::Val(h) => h,
            Lifted::Bullet => Height::Infinite,
        })
    }

    /// `⟨p, w⟩ ⟹* ⟨p′, w′⟩`.
    pub fn reach(&self, p: &str, w: &str, q: &str, w2: &str, caps: &Caps) -> Result<bool, RunError> {
        let (p, q) = (self.state_arg(p)?, self.state_arg(q)?);
        let opts = caps.opts();
        match &self.system {
            System::MinHeight(s) => {
                let (w, w2) = (word(&s.alphabet, w)?, word(&s.alphabet, w2)?);
                let v = if w2.is_empty() {
                    delta_of(s, p, &w, q, caps)?
                } else {
                    let target = chain_automaton(&w2, vec![Lifted::Val(Height::Finite(1)); w2.len()]);
                    reach_regular(s, &target, q, p, &w, &opts)?
                };
                Ok(matches!(v, Lifted::Val(Height::Finite(_))))
            }
            System::Relations(s) => {
                let (w, w2) = (word(&s.alphabet, w)?, word(&s.alphabet, w2)?);
                let enc = encode_pds_as_relations(s);
                let v = if w2.is_empty() {
                    delta_of(&enc, p, &hashes(w.len()), q, caps)?
                } else {
                    let weights = w2.iter().map(|&g| Lifted::Val([(vec![g], vec![])].into())).collect();
                    let target = chain_automaton(&hashes(w2.len()), weights);
                    reach_regular(&enc, &target, q, p, &hashes(w.len()), &opts)?
                };
                Ok(v.value().is_some_and(|r| r.contains(&(w, vec![]))))
            }
            System::Conditional(s) => {
                let (w, w2) = (word(&s.alphabet, w)?, word(&s.alphabet, w2)?);
                let an = crate::domains::CondAnalysis::new(s, caps.closure, &opts).map_err(cond_err)?;
                Ok(an.reaches(p, &w, q, &w2, &opts)?)
            }
            System::Trpds(_) => self.trreach_at(p, w, q, w2, caps),
            System::WspdsFinite(_) | System::WspdsVector(_) => Err(RunError::Unsupported(
                "a wspds system answers coverability only; use `cover`".into(),
            )),
        }
    }

    /// TrPDS reachability `⟨p, w⟩ ⟹* ⟨p′, w′⟩`.
    pub fn trreach(&self, p: &str, w: &str, q: &str, w2: &str, caps: &Caps) -> Result<bool, RunError> {
        let (p, q) = (self.state_arg(p)?, self.state_arg(q)?);
        self.trreach_at(p, w, q, w2, caps)
    }

    fn trreach_at(&self, p: State, w: &str, q: State, w2: &str, caps: &Caps) -> Result<bool, RunError> {
        let System::Trpds(s) = &self.system else {
            return Err(RunError::Unsupported(format!("`trreach` needs a trpds system, not {}", self.domain)));
        };
        let (w, w2) = (word(&s.alphabet, w)?, word(&s.alphabet, w2)?);
        let opts = caps.opts();
        let an = crate::domains::TrAnalysis::new(s, caps.closure, &opts).map_err(|e| match e {
            crate::domains::trpds::TrError::Closure(e) => RunError::from(e),
            crate::domains::trpds::TrError::Saturation(e) => RunError::from(e),
        })?;
        Ok(an.reaches(p, &w, q, &w2, &opts)?)
    }

    /// Whether `⟨p, w⟩` reaches a configuration `⟨p′, w″⟩` with `w′ ≼ w″`.
    pub fn cover(&self, p: &str, w: &str, q: &str, w2: &str, caps: &Caps) -> Result<bool, RunError> {
        let (p, q) = (self.state_arg(p)?, self.state_arg(q)?);
        match &self.system {
            System::WspdsFinite(s) => cover_in(s, p, w, q, w2, caps),
            System::WspdsVector(s) => cover_in(s, p, w, q, w2, caps),
            _ => Err(RunError::Unsupported(format!("`cover` needs a wspds system, not {}", self.domain))),
        }
    }

    /// `⊕_{f∈F} δ(p, w, f)` after saturating with the named target automaton,
    /// its initial state identified with `q`.
    pub fn reach_target(&self, p: &str, w: &str, q: &str, target: &str, caps: &Caps) -> Result<WeightOutput, RunError> {
        let (p, q) = (self.state_arg(p)?, self.state_arg(q)?);
        let spec = self.spec(target)?;
        let opts = caps.opts();
        match &self.system {
            System::MinHeight(s) => {
                let w = word(&s.alphabet, w)?;
                let t = build_target::<crate::algebra::LiftedSemiring<MinHeight>>(spec, &s.alphabet, &|x| parse_height(x).map(Lifted::Val))?;
                let v = reach_regular(s, &t, q, p, &w, &opts)?;
                Ok(WeightOutput { reachable: matches!(v, Lifted::Val(Height::Finite(_))), weight: s.semiring.render(&v) })
            }
            System::Relations(s) => {
                let w = word(&s.alphabet, w)?;
                let enc = encode_pds_as_relations(s);
                let ws = Relations::new(s.alphabet.clone());
                let t = build_target::<crate::algebra::LiftedSemiring<Relations>>(spec, &hash_alphabet(), &|x| ws.parse(x).map(Lifted::Val))?;
                let v = reach_regular(&enc, &t, q, p, &hashes(w.len()), &opts)?;
                let reachable = v.value().is_some_and(|r| r.contains(&(w.clone(), vec![])));
                Ok(WeightOutput { reachable, weight: enc.semiring.render(&v) })
            }
            System::Conditional(s) => {
                let w = word(&s.alphabet, w)?;
                let enc = conditional_ws_with(s, self.cond_extra(), caps.closure)?;
                let ws = enc.semiring.structure();
                let parse = self.cond_parse(ws);
                let t = build_target::<crate::algebra::LiftedSemiring<Conditional>>(spec, &s.alphabet, &parse)?;
                let v = reach_regular(&enc, &t, q, p, &w, &opts)?;
                let reachable = v.value().is_some_and(|&a| ws.language(a).contains_epsilon());
                Ok(WeightOutput { reachable, weight: enc.semiring.render(&v) })
            }
            System::WspdsFinite(s) => target_cover(s, p, w, q, spec, &opts),
            System::WspdsVector(s) => target_cover(s, p, w, q, spec, &opts),
            System::Trpds(_) => Err(RunError::Unsupported(
                "trpds targets are given as words; use `trreach`".into(),
            )),
        }
    }
}

fn cond_err(e: crate::domains::conditional::CondError) -> RunError {
    match e {
        crate::domains::conditional::CondError::Closure(e) => e.into(),
        crate::domains::conditional::CondError::Saturation(e) => e.into(),
    }
}

fn cover_in<W: Wqo + Clone>(s: &Wspds<W>, p: State, w: &str, q: State, w2: &str, caps: &Caps) -> Result<bool, RunError>
where
    W::Transfer: Clone,
{
    let (w, w2) = (elems(&s.order, w)?, elems(&s.order, w2)?);
    let opts = caps.opts();
    let an = CoverAnalysis::new(s, &opts).map_err(|e| match e {
        crate::domains::wspds::WsError::Order(e) => RunError::from(e),
        crate::domains::wspds::WsError::Saturation(e) => RunError::from(e),
    })?;
    Ok(an.covers(p, &w, q, &w2, &opts)?)
}

fn target_cover<W: Wqo + Clone>(
    s: &Wspds<W>,
    p: State,
    w: &str,
    q: State,
    spec: &TargetSpec,
    opts: &SaturationOptions,
) -> Result<WeightOutput, RunError>
where
    W::Transfer: Clone,
{
    let w = elems(&s.order, w)?;
    let enc = wspds_ws(s)?;
    let ws = enc.semiring.structure().clone();
    let t = build_target::<crate::algebra::LiftedSemiring<IdealFns<W>>>(spec, &hash_alphabet(), &|x| ws.parse_ideal(1, x).map(Lifted::Val))?;
    let v = reach_regular(&enc, &t, q, p, &hashes(w.len()), opts)?;
    let reachable = match &v {
        Lifted::Val(f) => f.ideal().is_some_and(|u| u.member(&w, |a, b| crate::wqo::tuple_leq(&*ws.order, a, b))),
        Lifted::Bullet => false,
    };
    Ok(WeightOutput { reachable, weight: enc.semiring.render(&v) })
}

fn both<W: StructureSampler + Clone>(ws: W, samples: usize, seed: u64) -> Vec<LawReport> {
    vec![
        structure_law_suite(&ws, samples, seed),
        indexed_law_suite(&lift(ws), IndexFamily::All, samples, seed.wrapping_add(1)),
    ]
}

/// Law reports for a domain: the weight structure, then its lifting. With
/// a system file the instance comes from the file; otherwise a small
/// built-in instance is used.
pub fn laws(domain: Domain, file: Option<&SystemFile>, samples: usize, seed: u64, caps: &Caps) -> Result<Vec<LawReport>, RunError> {
    if let Some(f) = file {
        if f.domain != domain {
            return Err(RunError::Unsupported(format!("--domain {domain} does not match the file's domain {}", f.domain)));
        }
    }
    let ab = || Alphabet::new(["a", "b"]);
    Ok(match (domain, file.map(|f| &f.system)) {
        (Domain::MinHeight, Some(System::MinHeight(p))) => both(p.semiring.structure().clone(), samples, seed),
        (Domain::MinHeight, _) => both(MinHeight::new(2), samples, seed),
        (Domain::Relations, Some(System::Relations(p))) => both(Relations::new(p.alphabet.clone()), samples, seed),
        (Domain::Relations, _) => both(Relations::new(ab()), samples, seed),
        (Domain::Conditional, Some(System::Conditional(p))) => {
            let enc = conditional_ws_with(p, file.map(|f| f.cond_extra()).unwrap_or_default(), caps.closure)?;
            both(enc.semiring.structure().clone(), samples, seed)
        }
        (Domain::Conditional, _) => {
            let conds = [Dfa::star_of(2, &[0]), Dfa::word(2, &[1]).union(&Dfa::star_of(2, &[1]))?];
            let pds = crate::domains::CondPds {
                states: vec!["p".into()],
                alphabet: ab(),
                rules: conds
                    .into_iter()
                    .map(|cond| CondRule { from: 0, pop: Symbol(0), to: 0, push: vec![], cond })
                    .collect(),
            };
            both(conditional_ws_with(&pds, [], caps.closure)?.semiring.structure().clone(), samples, seed)
        }
        (Domain::Trpds, Some(System::Trpds(p))) => both(trpds_ws(p, caps.closure)?.semiring.structure().clone(), samples, seed),
        (Domain::Trpds, _) => {
            let swap = Transduction::letter_map(2, |a| Some(1 - a));
            both(TransductionFns::generated(ab(), [swap], caps.closure)?, samples, seed)
        }
        (Domain::Wspds, Some(System::WspdsFinite(w))) => both(IdealFns::new(w.order.clone(), w.transfers.clone()), samples, seed),
        (Domain::Wspds, Some(System::WspdsVector(w))) => {
            let mut o = w.order.clone();
            o.probe_bound = o.probe_bound.min(1);
            both(IdealFns::new(o, w.transfers.clone()), samples, seed)
        }
        (Domain::Wspds, _) => {
            let o = FiniteOrder::new(vec!["a".into(), "b".into(), "c".into()], &[(0, 1), (1, 2)]);
            let push = o.transfer(2, vec![Some(vec![0, 0]), Some(vec![1, 0]), Some(vec![2, 1])])?;
            let pop = o.transfer(0, vec![None, Some(vec![]), Some(vec![])])?;
            let ts = vec![
                NamedTransfer { name: "push".into(), transfer: push },
                NamedTransfer { name: "pop".into(), transfer: pop },
            ];
            both(IdealFns::new(o, ts), samples, seed)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse_system;

    const PEX: &str = "\
domain minheight
states p0 p1 p2 p3
alphabet g
rule p0 g -> p1 g g g h:3
rule p1 g -> p1 g g g g h:4
rule p1 g -> p2 - h:1
rule p2 g -> p3 - h:1
rule p3 g -> p2 - h:1
target one
init t0
final t1
t0 --g|h:1--> t1
end
";

    #[test]
    fn running_example_queries() {
        let f = parse_system(PEX).unwrap();
        let caps = Caps::default();
        assert_eq!(f.minheight("p0", "g", "p3", &caps).unwrap(), Height::Finite(6));
        assert_eq!(f.presat(&caps).unwrap().automaton.edges.len(), 6);
        assert!(f.reach("p0", "g", "p2", "", &caps).unwrap());
        assert!(f.reach("p1", "g g", "p2", "g", &caps).unwrap());
        let t = f.reach_target("p1", "g g", "p2", "one", &caps).unwrap();
        assert!(t.reachable, "{t:?}");
        assert!(matches!(f.cover("p0", "g", "p1", "g", &caps), Err(RunError::Unsupported(_))));
    }

    #[test]
    fn tiny_budget_is_a_cap_error() {
        let f = parse_system(PEX).unwrap();
        let caps = Caps { budget: 2, ..Caps::default() };
        assert!(matches!(f.presat(&caps), Err(RunError::Cap(_))));
    }

    #[test]
    fn default_law_instances_pass() {
        for d in Domain::ALL {
            for r in laws(d, None, 200, 9, &Caps::default()).unwrap() {
                assert!(r.passed(), "{d}: {r}");
            }
        }
    }
}
