//! Well-structured pushdown systems: stack symbols from a well-quasi-order,
//! rules given by monotone transfers. Coverability is decided over weights
//! `Γ^n → I(Γ^m)` mapping a tuple to an upward-closed set of tuples.
//!
//! Weights are kept as expressions over the rule preimages and evaluated on
//! demand. At `n = 0` a weight is a single ideal and is stored evaluated, so
//! automaton edges are always concrete antichains. All weights are antitone,
//! which lets composition range over the generators of an ideal only.

use std::sync::Arc;

use rand::Rng;

use crate::algebra::laws::{SampleRng, StructureSampler};
use crate::algebra::{lift, Lifted, LiftedSemiring, WeightStructure};
use crate::domains::relations::{hash_alphabet, hashes, HASH};
use crate::saturation::{chain_automaton, delta_from, presaturate, reach_regular, SatError, SaturationOptions, WeightedAutomaton};
use crate::signatures::{Signature, Symbol};
use crate::wpds::{Rule, State, WeightedPds};
use crate::wqo::{render_tuple, tuple_leq, UpSet, Wqo, WqoError};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term<E> {
    /// `λx. ↑{x}`
    Id,
    /// `λw. φ⁻¹(↑{w})` for the transfer with this position.
    Pre(usize),
    /// `λ(y, z). f(y) × ↑{z}` with `|z|` given.
    Ext(Arc<IdealFn<E>>, usize),
    /// `f̂ ∘ g`
    Comp(Arc<IdealFn<E>>, Arc<IdealFn<E>>),
    Const(UpSet<Vec<E>>),
}

/// A weight in `D_{m/n}`: the union of its terms, `λx. ∅` when empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IdealFn<E> {
    pub m: usize,
    pub n: usize,
    pub terms: Vec<Term<E>>,
}

impl<E> IdealFn<E> {
    pub fn zero(m: usize, n: usize) -> Self {
        IdealFn { m, n, terms: vec![] }
    }

    pub fn is_syntactic_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn is_id(&self) -> bool {
        matches!(self.terms.as_slice(), [Term::Id])
    }

    /// The ideal of a weight at `n = 0`.
    pub fn ideal(&self) -> Option<&UpSet<Vec<E>>> {
        match self.terms.as_slice() {
            [Term::Const(u)] if self.n == 0 => Some(u),
            _ => None,
        }
    }
}

/// A named monotone transfer `φ : Γ ⇀ Γ^i`.
#[derive(Debug, Clone)]
pub struct NamedTransfer<T> {
    pub name: String,
    pub transfer: T,
}

#[derive(Debug, Clone)]
pub struct IdealFns<W: Wqo> {
    pub order: Arc<W>,
    pub transfers: Arc<Vec<NamedTransfer<W::Transfer>>>,
}

impl<W: Wqo> IdealFns<W> {
    pub fn new(order: W, transfers: Vec<NamedTransfer<W::Transfer>>) -> Self {
        IdealFns { order: Arc::new(order), transfers: Arc::new(transfers) }
    }

    fn leq(&self) -> impl Fn(&Vec<W::Elem>, &Vec<W::Elem>) -> bool + '_ {
        |a, b| tuple_leq(&*self.order, a, b)
    }

    pub fn up(&self, xs: impl IntoIterator<Item = Vec<W::Elem>>) -> UpSet<Vec<W::Elem>> {
        UpSet::up(xs, self.leq())
    }

    pub fn constant(&self, m: usize, n: usize, u: UpSet<Vec<W::Elem>>) -> IdealFn<W::Elem> {
        let terms = if u.is_empty() { vec![] } else { vec![Term::Const(u)] };
        IdealFn { m, n, terms }
    }

    /// The rule weight `λw. φ⁻¹(↑{w})`.
    pub fn preimage_fn(&self, t: usize) -> IdealFn<W::Elem> {
        let arity = self.order.arity(&self.transfers[t].transfer);
        self.normalize(IdealFn { m: 1, n: arity, terms: vec![Term::Pre(t)] })
    }

    /// `f(x)` for a tuple `x ∈ Γ^n`.
    pub fn eval(&self, f: &IdealFn<W::Elem>, x: &[W::Elem]) -> UpSet<Vec<W::Elem>> {
        debug_assert_eq!(x.len(), f.n);
        let mut acc = UpSet::empty();
        for t in &f.terms {
            let u = self.eval_term(f, t, x);
            acc = acc.union(&u, self.leq());
        }
        acc
    }

    fn eval_term(&self, f: &IdealFn<W::Elem>, t: &Term<W::Elem>, x: &[W::Elem]) -> UpSet<Vec<W::Elem>> {
        match t {
            Term::Id => UpSet::single(x.to_vec()),
            Term::Pre(i) => {
                let pre = self
                    .order
                    .preimage(&self.transfers[*i].transfer, &UpSet::single(x.to_vec()))
                    .expect("arity checked at construction");
                self.up(pre.generators().iter().map(|g| vec![g.clone()]))
            }
            Term::Ext(inner, j) => {
                let (y, z) = x.split_at(f.n - j);
                self.eval(inner, y).product(&UpSet::single(z.to_vec()), self.leq())
            }
            Term::Comp(f1, f2) => {
                let mut acc = UpSet::empty();
                for g in self.eval(f2, x).generators() {
                    acc = acc.union(&self.eval(f1, g), self.leq());
                }
                acc
            }
            Term::Const(u) => u.clone(),
        }
    }

    fn normalize(&self, f: IdealFn<W::Elem>) -> IdealFn<W::Elem> {
        let canonical = matches!(f.terms.as_slice(), [] | [Term::Const(_)])
            && f.ideal().is_none_or(|u| !u.is_empty());
        if f.n == 0 && !canonical {
            let u = self.eval(&f, &[]);
            self.constant(f.m, 0, u)
        } else {
            f
        }
    }

    /// All tuples in `probes^n`.
    fn probe_tuples(&self, n: usize) -> Vec<Vec<W::Elem>> {
        let probes = self.order.probes();
        let mut out = vec![vec![]];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|t: Vec<W::Elem>| {
                    probes.iter().map(move |p| {
                        let mut t = t.clone();
                        t.push(p.clone());
                        t
                    })
                })
                .collect();
        }
        out
    }

    fn render_fn(&self, f: &IdealFn<W::Elem>) -> String {
        if let Some(u) = f.ideal() {
            return self.render_ideal(u);
        }
        if f.terms.is_empty() {
            return if f.n == 0 { "up{}".to_string() } else { "0".to_string() };
        }
        let parts: Vec<String> = f
            .terms
            .iter()
            .map(|t| match t {
                Term::Id => "id".to_string(),
                Term::Pre(i) => format!("pre({})", self.transfers[*i].name),
                Term::Ext(g, j) => format!("ext{j}({})", self.render_fn(g)),
                Term::Comp(a, b) => format!("({} ; {})", self.render_fn(a), self.render_fn(b)),
                Term::Const(u) => self.render_ideal(u),
            })
            .collect();
        parts.join(" + ")
    }

    pub fn render_ideal(&self, u: &UpSet<Vec<W::Elem>>) -> String {
        let parts: Vec<String> = u.generators().iter().map(|g| render_tuple(&*self.order, g)).collect();
        format!("up{{{}}}", parts.join(";"))
    }

    /// Parses `up{g;…}` as a weight at `m/0`; a generator is an element, or
    /// `[e1 e2 …]` for `m ≠ 1`.
    pub fn parse_ideal(&self, m: usize, text: &str) -> Option<IdealFn<W::Elem>> {
        let inner = text.trim().strip_prefix("up{")?.strip_suffix('}')?;
        let mut gens = Vec::new();
        for g in inner.split(';').map(str::trim).filter(|s| !s.is_empty()) {
            let tuple: Vec<W::Elem> = match g.strip_prefix('[').and_then(|g| g.strip_suffix(']')) {
                Some(body) => body.split_whitespace().map(|e| self.order.parse_elem(e)).collect::<Option<_>>()?,
                None => vec![self.order.parse_elem(g)?],
            };
            if tuple.len() != m {
                return None;
            }
            gens.push(tuple);
        }
        Some(self.constant(m, 0, self.up(gens)))
    }

    fn sample_ideal(&self, m: usize, rng: &mut SampleRng) -> UpSet<Vec<W::Elem>> {
        let k = rng.gen_range(0..3);
        self.up((0..k).map(|_| (0..m).map(|_| self.order.sample(rng)).collect::<Vec<_>>()))
    }

    fn sample_fn(&self, m: usize, n: usize, depth: usize, rng: &mut SampleRng) -> IdealFn<W::Elem> {
        let mut terms = Vec::new();
        for _ in 0..rng.gen_range(0..3) {
            let mut options: Vec<u8> = vec![0];
            if m == n {
                options.push(1);
            }
            if m == 1 && self.transfers.iter().any(|t| self.order.arity(&t.transfer) == n) {
                options.push(2);
            }
            if depth > 0 && m > 0 && n > 0 {
                options.push(3);
            }
            let term = match options[rng.gen_range(0..options.len())] {
                0 => Term::Const(self.sample_ideal(m, rng)),
                1 => Term::Id,
                2 => {
                    let fit: Vec<usize> = (0..self.transfers.len())
                        .filter(|&i| self.order.arity(&self.transfers[i].transfer) == n)
                        .collect();
                    Term::Pre(fit[rng.gen_range(0..fit.len())])
                }
                _ => {
                    let j = rng.gen_range(1..=m.min(n));
                    Term::Ext(Arc::new(self.sample_fn(m - j, n - j, depth - 1, rng)), j)
                }
            };
            if !terms.contains(&term) {
                terms.push(term);
            }
        }
        self.normalize(IdealFn { m, n, terms })
    }
}

impl<W: Wqo> WeightStructure for IdealFns<W> {
    type Value = IdealFn<W::Elem>;

    fn name(&self) -> String {
        "wspds".to_string()
    }

    fn contains(&self, sig: &Signature, a: &Self::Value) -> bool {
        a.m == sig.pop.len() && a.n == sig.push.len()
    }

    fn zero(&self, sig: &Signature) -> Self::Value {
        IdealFn::zero(sig.pop.len(), sig.push.len())
    }

    fn unit(&self, sig: &Signature) -> Self::Value {
        let m = sig.pop.len();
        if m == 0 {
            self.constant(0, 0, UpSet::single(vec![]))
        } else {
            IdealFn { m, n: m, terms: vec![Term::Id] }
        }
    }

    fn add(&self, _sig: &Signature, a: &Self::Value, b: &Self::Value) -> Self::Value {
        if let (Some(u), Some(v)) = (a.ideal(), b.ideal()) {
            return self.constant(a.m, 0, u.union(v, self.leq()));
        }
        let mut terms = a.terms.clone();
        for t in &b.terms {
            if !terms.contains(t) {
                terms.push(t.clone());
            }
        }
        self.normalize(IdealFn { m: a.m, n: a.n, terms })
    }

    fn smul(&self, _l: &Signature, _r: &Signature, a: &Self::Value, b: &Self::Value) -> Self::Value {
        if a.terms.is_empty() || b.terms.is_empty() {
            return IdealFn::zero(a.m, b.n);
        }
        if a.is_id() {
            return b.clone();
        }
        if b.is_id() {
            return a.clone();
        }
        self.normalize(IdealFn { m: a.m, n: b.n, terms: vec![Term::Comp(Arc::new(a.clone()), Arc::new(b.clone()))] })
    }

    fn ext(&self, _sig: &Signature, suffix: &[Symbol], a: &Self::Value) -> Self::Value {
        let j = suffix.len();
        if j == 0 {
            return a.clone();
        }
        if a.terms.is_empty() {
            return IdealFn::zero(a.m + j, a.n + j);
        }
        if a.is_id() || (a.m == 0 && a.n == 0) {
            // ↑{()} × ↑{z} = ↑{z}
            return IdealFn { m: a.m + j, n: a.n + j, terms: vec![Term::Id] };
        }
        IdealFn { m: a.m + j, n: a.n + j, terms: vec![Term::Ext(Arc::new(a.clone()), j)] }
    }

    /// Exact at `n = 0`; otherwise agreement on every tuple of probes.
    fn equal(&self, _sig: &Signature, a: &Self::Value, b: &Self::Value) -> bool {
        if a.n == 0 {
            return self.eval(a, &[]) == self.eval(b, &[]);
        }
        a == b || self.probe_tuples(a.n).iter().all(|x| self.eval(a, x) == self.eval(b, x))
    }

    fn locally_bounded(&self) -> bool {
        true
    }

    fn render(&self, a: &Self::Value) -> String {
        self.render_fn(a)
    }
}

impl<W: Wqo> StructureSampler for IdealFns<W> {
    fn sample_symbols(&self) -> usize {
        1
    }

    fn sample(&self, sig: &Signature, rng: &mut SampleRng) -> Self::Value {
        self.sample_fn(sig.pop.len(), sig.push.len(), 1, rng)
    }
}

/// A rule `⟨from, to, φ⟩`; `φ` is a position in the transfer list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WsRule {
    pub from: State,
    pub to: State,
    pub transfer: usize,
}

#[derive(Debug, Clone)]
pub struct Wspds<W: Wqo> {
    pub states: Vec<String>,
    pub order: W,
    pub transfers: Vec<NamedTransfer<W::Transfer>>,
    pub rules: Vec<WsRule>,
}

/// A configuration with a stack of order elements, top first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WsConfig<E> {
    pub state: State,
    pub stack: Vec<E>,
}

impl<W: Wqo> Wspds<W> {
    pub fn successors(&self, c: &WsConfig<W::Elem>) -> Vec<WsConfig<W::Elem>> {
        let Some((top, rest)) = c.stack.split_first() else { return vec![] };
        self.rules
            .iter()
            .filter(|r| r.from == c.state)
            .filter_map(|r| {
                let mut stack = self.order.apply(&self.transfers[r.transfer].transfer, top)?;
                stack.extend_from_slice(rest);
                Some(WsConfig { state: r.to, stack })
            })
            .collect()
    }
}

pub type WsWpds<W> = WeightedPds<LiftedSemiring<IdealFns<W>>>;

/// Rule `⟨p, p′, φ⟩` with `φ : Γ ⇀ Γ^i` becomes `⟨p, #, p′, #^i, λw. φ⁻¹(↑{w})⟩`.
pub fn wspds_ws<W: Wqo + Clone>(sys: &Wspds<W>) -> Result<WsWpds<W>, WqoError>
where
    W::Transfer: Clone,
{
    // every transfer must accept a target tuple of its own arity
    for t in &sys.transfers {
        let arity = sys.order.arity(&t.transfer);
        if let Some(e) = sys.order.probes().first() {
            sys.order.preimage(&t.transfer, &UpSet::single(vec![e.clone(); arity]))?;
        }
    }
    let ws = IdealFns::new(sys.order.clone(), sys.transfers.clone());
    let rules = sys
        .rules
        .iter()
        .map(|r| {
            let arity = sys.order.arity(&sys.transfers[r.transfer].transfer);
            Rule { from: r.from, pop: HASH, to: r.to, push: hashes(arity), weight: Lifted::Val(ws.preimage_fn(r.transfer)) }
        })
        .collect();
    Ok(WeightedPds::new(lift(ws), sys.states.clone(), hash_alphabet(), rules).expect("well typed"))
}

#[derive(Debug, thiserror::Error)]
pub enum WsError {
    #[error(transparent)]
    Order(#[from] WqoError),
    #[error(transparent)]
    Saturation(#[from] SatError),
}

pub struct CoverAnalysis<W: Wqo> {
    pub encoded: WsWpds<W>,
    pub automaton: WeightedAutomaton<Lifted<IdealFn<W::Elem>>>,
}

impl<W: Wqo + Clone> CoverAnalysis<W>
where
    W::Transfer: Clone,
{
    pub fn new(sys: &Wspds<W>, opts: &SaturationOptions) -> Result<Self, WsError> {
        let encoded = wspds_ws(sys)?;
        let automaton = presaturate(&encoded, opts)?.automaton;
        Ok(CoverAnalysis { encoded, automaton })
    }

    fn ws(&self) -> &IdealFns<W> {
        self.encoded.semiring.structure()
    }

    /// The ideal of start stacks from `p` of length `m` that cover `⟨q, w⟩`.
    pub fn covering(&self, p: State, m: usize, q: State, w: &[W::Elem], opts: &SaturationOptions) -> Result<UpSet<Vec<W::Elem>>, SatError> {
        let value = if w.is_empty() {
            delta_from(&self.encoded.semiring, &self.automaton, p, &hashes(m)).remove(&q)
        } else {
            let weights = w
                .iter()
                .map(|e| Lifted::Val(self.ws().constant(1, 0, UpSet::single(vec![e.clone()]))))
                .collect();
            let target = chain_automaton(&hashes(w.len()), weights);
            Some(reach_regular(&self.encoded, &target, q, p, &hashes(m), opts)?)
        };
        Ok(match value {
            Some(Lifted::Val(f)) => f.ideal().cloned().unwrap_or_else(UpSet::empty),
            _ => UpSet::empty(),
        })
    }

    /// Whether `⟨p, start⟩` reaches some `⟨q, w′⟩` with `w ≼ w′`.
    pub fn covers(&self, p: State, start: &[W::Elem], q: State, w: &[W::Elem], opts: &SaturationOptions) -> Result<bool, SatError> {
        let ideal = self.covering(p, start.len(), q, w, opts)?;
        Ok(ideal.member(&start.to_vec(), |a, b| tuple_leq(&*self.ws().order, a, b)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::laws::{indexed_law_suite, structure_law_suite, IndexFamily};
    use crate::wqo::{FiniteOrder, VectorOrder};

    fn chain3() -> (FiniteOrder, Vec<NamedTransfer<crate::wqo::FiniteTransfer>>) {
        let o = FiniteOrder::new(vec!["a".into(), "b".into(), "c".into()], &[(0, 1), (1, 2)]);
        let push = o.transfer(2, vec![Some(vec![0, 0]), Some(vec![1, 0]), Some(vec![2, 1])]).unwrap();
        let pop = o.transfer(0, vec![None, Some(vec![]), Some(vec![])]).unwrap();
        let up1 = o.transfer(1, vec![Some(vec![1]), Some(vec![2]), Some(vec![2])]).unwrap();
        let ts = vec![
            NamedTransfer { name: "push".into(), transfer: push },
            NamedTransfer { name: "pop".into(), transfer: pop },
            NamedTransfer { name: "up".into(), transfer: up1 },
        ];
        (o, ts)
    }

    #[test]
    fn laws_hold_on_a_finite_order() {
        let (o, ts) = chain3();
        let ws = IdealFns::new(o, ts);
        let r = structure_law_suite(&ws, 300, 9);
        assert!(r.passed(), "{r}");
        let r = indexed_law_suite(&lift(ws), IndexFamily::All, 300, 10);
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn laws_hold_on_vectors() {
        let mut o = VectorOrder::new(2);
        o.probe_bound = 1;
        let t = o.transfer(vec![1, 0], vec![vec![0, 2]]).unwrap();
        let ws = IdealFns::new(o, vec![NamedTransfer { name: "t".into(), transfer: t }]);
        let r = structure_law_suite(&ws, 200, 11);
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn empty_system_covers_only_by_itself() {
        let (o, ts) = chain3();
        let sys = Wspds { states: vec!["p".into()], order: o, transfers: ts, rules: vec![] };
        let an = CoverAnalysis::new(&sys, &SaturationOptions::default()).unwrap();
        let opts = SaturationOptions::default();
        assert!(an.covers(0, &[], 0, &[], &opts).unwrap());
        assert!(an.covers(0, &[2], 0, &[1], &opts).unwrap());
        assert!(!an.covers(0, &[0], 0, &[1], &opts).unwrap());
    }

    #[test]
    fn vector_counter() {
        // p: decrement the first coordinate by 1 and add 2 to the second
        // q ← p when the second coordinate is at least 3, popping
        let o = VectorOrder::new(2);
        let step = o.transfer(vec![1, 0], vec![vec![0, 2]]).unwrap();
        let out = o.transfer(vec![0, 3], vec![]).unwrap();
        let sys = Wspds {
            states: vec!["p".into(), "q".into()],
            order: o,
            transfers: vec![
                NamedTransfer { name: "step".into(), transfer: step },
                NamedTransfer { name: "out".into(), transfer: out },
            ],
            rules: vec![WsRule { from: 0, to: 0, transfer: 0 }, WsRule { from: 0, to: 1, transfer: 1 }],
        };
        let an = CoverAnalysis::new(&sys, &SaturationOptions::default()).unwrap();
        let opts = SaturationOptions::default();
        assert!(an.covers(0, &[vec![2, 0]], 1, &[], &opts).unwrap());
        assert!(!an.covers(0, &[vec![1, 0]], 1, &[], &opts).unwrap());
        assert!(an.covers(0, &[vec![2, 0]], 0, &[vec![0, 4]], &opts).unwrap());
        assert!(!an.covers(0, &[vec![2, 0]], 0, &[vec![1, 3]], &opts).unwrap());
        let ideal = an.covering(0, 1, 1, &[], &opts).unwrap();
        assert_eq!(an.ws().render_ideal(&ideal), "up{(0,3);(1,1);(2,0)}");
    }

    #[test]
    fn ideal_literal_round_trip() {
        let (o, ts) = chain3();
        let ws = IdealFns::new(o, ts);
        let f = ws.parse_ideal(1, "up{b;c}").unwrap();
        assert_eq!(ws.render(&f), "up{b}");
        let g = ws.parse_ideal(2, "up{[a c]}").unwrap();
        assert_eq!(ws.parse_ideal(2, &ws.render(&g)).unwrap(), g);
    }
}
