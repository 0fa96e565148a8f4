//! Well-quasi-ordered alphabets, upward-closed sets as antichains of minimal
//! elements, and monotone transfers with computable preimages.

use std::fmt::Debug;
use std::hash::Hash;

use rand::Rng;
use thiserror::Error;

use crate::algebra::laws::SampleRng;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WqoError {
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("transfer is not monotone: {0}")]
    NotMonotone(String),
    #[error("arity mismatch: transfer has arity {expected}, target tuples have {found}")]
    Arity { expected: usize, found: usize },
    #[error("malformed order or transfer: {0}")]
    Malformed(String),
}

/// A quasi-order on stack symbols together with its monotone transfers.
pub trait Wqo: Send + Sync {
    type Elem: Clone + Eq + Ord + Hash + Debug + Send + Sync;
    type Transfer: Clone + Debug + Send + Sync;

    fn leq(&self, x: &Self::Elem, y: &Self::Elem) -> bool;

    fn render(&self, x: &Self::Elem) -> String;

    fn parse_elem(&self, text: &str) -> Option<Self::Elem>;

    /// A finite set of elements on which functions are compared: all elements
    /// of a finite order, or a bounded box of vectors.
    fn probes(&self) -> Vec<Self::Elem>;

    fn sample(&self, rng: &mut SampleRng) -> Self::Elem;

    fn arity(&self, t: &Self::Transfer) -> usize;

    fn apply(&self, t: &Self::Transfer, x: &Self::Elem) -> Option<Vec<Self::Elem>>;

    /// `{x | apply(t, x) ∈ target}`, upward closed by monotonicity.
    fn preimage(
        &self,
        t: &Self::Transfer,
        target: &UpSet<Vec<Self::Elem>>,
    ) -> Result<UpSet<Self::Elem>, WqoError>;
}

/// Componentwise order on tuples.
pub fn tuple_leq<W: Wqo>(w: &W, x: &[W::Elem], y: &[W::Elem]) -> bool {
    x.len() == y.len() && x.iter().zip(y).all(|(a, b)| w.leq(a, b))
}

pub fn render_tuple<W: Wqo>(w: &W, x: &[W::Elem]) -> String {
    if x.len() == 1 {
        w.render(&x[0])
    } else {
        format!("[{}]", x.iter().map(|e| w.render(e)).collect::<Vec<_>>().join(" "))
    }
}

/// An upward-closed set `↑{g1, …, gk}` kept as the sorted antichain of its
/// minimal generators; the empty antichain denotes `∅`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UpSet<E> {
    gens: Vec<E>,
}

impl<E: Clone + Ord> UpSet<E> {
    pub fn empty() -> Self {
        UpSet { gens: Vec::new() }
    }

    /// Minimal elements of `xs`; among equivalent elements the least in the
    /// encoding order is kept.
    pub fn up(xs: impl IntoIterator<Item = E>, leq: impl Fn(&E, &E) -> bool) -> Self {
        let mut xs: Vec<E> = xs.into_iter().collect();
        xs.sort();
        xs.dedup();
        let mut gens: Vec<E> = Vec::new();
        for (i, x) in xs.iter().enumerate() {
            let dominated = xs.iter().enumerate().any(|(j, y)| {
                j != i && leq(y, x) && (!leq(x, y) || j < i)
            });
            if !dominated {
                gens.push(x.clone());
            }
        }
        UpSet { gens }
    }

    pub fn single(x: E) -> Self {
        UpSet { gens: vec![x] }
    }

    pub fn generators(&self) -> &[E] {
        &self.gens
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn member(&self, x: &E, leq: impl Fn(&E, &E) -> bool) -> bool {
        self.gens.iter().any(|g| leq(g, x))
    }

    pub fn union(&self, other: &Self, leq: impl Fn(&E, &E) -> bool) -> Self {
        if other.gens.is_empty() {
            return self.clone();
        }
        if self.gens.is_empty() {
            return other.clone();
        }
        UpSet::up(self.gens.iter().chain(&other.gens).cloned(), leq)
    }

    /// `self ⊆ other`.
    pub fn subset(&self, other: &Self, leq: impl Fn(&E, &E) -> bool) -> bool {
        self.gens.iter().all(|g| other.member(g, &leq))
    }
}

impl<E: Clone + Ord> UpSet<Vec<E>> {
    /// `A × B` over concatenated tuples.
    pub fn product(&self, other: &Self, leq: impl Fn(&Vec<E>, &Vec<E>) -> bool) -> Self {
        let gens = self.gens.iter().flat_map(|a| {
            other.gens.iter().map(move |b| a.iter().chain(b).cloned().collect::<Vec<E>>())
        });
        UpSet::up(gens, leq)
    }
}

pub fn up<W: Wqo>(w: &W, xs: impl IntoIterator<Item = W::Elem>) -> UpSet<W::Elem> {
    UpSet::up(xs, |a, b| w.leq(a, b))
}

pub fn up_tuples<W: Wqo>(w: &W, xs: impl IntoIterator<Item = Vec<W::Elem>>) -> UpSet<Vec<W::Elem>> {
    UpSet::up(xs, |a, b| tuple_leq(w, a, b))
}

pub fn render_upset<W: Wqo>(w: &W, u: &UpSet<Vec<W::Elem>>) -> String {
    let parts: Vec<String> = u.generators().iter().map(|g| render_tuple(w, g)).collect();
    format!("up{{{}}}", parts.join(";"))
}

/// A finite alphabet ordered by the reflexive-transitive closure of a list of
/// edges `a ≼ b`. Finite quasi-orders are trivially well-quasi-orders.
#[derive(Debug, Clone)]
pub struct FiniteOrder {
    names: Vec<String>,
    le: Vec<Vec<bool>>,
}

/// `φ(γ)` for every symbol; `None` where the rule does not apply.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteTransfer {
    pub arity: usize,
    pub table: Vec<Option<Vec<u32>>>,
}

impl FiniteOrder {
    pub fn new(names: Vec<String>, edges: &[(usize, usize)]) -> Self {
        let n = names.len();
        let mut le = vec![vec![false; n]; n];
        for (i, row) in le.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(a, b) in edges {
            le[a][b] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if le[i][k] {
                    for j in 0..n {
                        if le[k][j] {
                            le[i][j] = true;
                        }
                    }
                }
            }
        }
        FiniteOrder { names, le }
    }

    /// Equality as the order.
    pub fn discrete(names: Vec<String>) -> Self {
        FiniteOrder::new(names, &[])
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn lookup(&self, name: &str) -> Option<u32> {
        self.names.iter().position(|n| n == name).map(|i| i as u32)
    }

    /// Checks monotonicity on every comparable pair.
    pub fn transfer(&self, arity: usize, table: Vec<Option<Vec<u32>>>) -> Result<FiniteTransfer, WqoError> {
        if table.len() != self.len() {
            return Err(WqoError::Malformed(format!("transfer table has {} entries", table.len())));
        }
        for img in table.iter().flatten() {
            if img.len() != arity {
                return Err(WqoError::Arity { expected: arity, found: img.len() });
            }
        }
        for x in 0..self.len() {
            for y in 0..self.len() {
                if !self.le[x][y] {
                    continue;
                }
                if let Some(fx) = &table[x] {
                    let ok = match &table[y] {
                        None => false,
                        Some(fy) => fx.iter().zip(fy).all(|(a, b)| self.le[*a as usize][*b as usize]),
                    };
                    if !ok {
                        return Err(WqoError::NotMonotone(format!(
                            "{} ≼ {} but their images are not ordered",
                            self.names[x], self.names[y]
                        )));
                    }
                }
            }
        }
        Ok(FiniteTransfer { arity, table })
    }
}

impl Wqo for FiniteOrder {
    type Elem = u32;
    type Transfer = FiniteTransfer;

    fn leq(&self, x: &u32, y: &u32) -> bool {
        self.le[*x as usize][*y as usize]
    }

    fn render(&self, x: &u32) -> String {
        self.names[*x as usize].clone()
    }

    fn parse_elem(&self, text: &str) -> Option<u32> {
        self.lookup(text.trim())
    }

    fn probes(&self) -> Vec<u32> {
        (0..self.len() as u32).collect()
    }

    fn sample(&self, rng: &mut SampleRng) -> u32 {
        rng.gen_range(0..self.len() as u32)
    }

    fn arity(&self, t: &FiniteTransfer) -> usize {
        t.arity
    }

    fn apply(&self, t: &FiniteTransfer, x: &u32) -> Option<Vec<u32>> {
        t.table[*x as usize].clone()
    }

    fn preimage(&self, t: &FiniteTransfer, target: &UpSet<Vec<u32>>) -> Result<UpSet<u32>, WqoError> {
        if let Some(g) = target.generators().first() {
            if g.len() != t.arity {
                return Err(WqoError::Arity { expected: t.arity, found: g.len() });
            }
        }
        let xs = (0..self.len() as u32).filter(|x| match &t.table[*x as usize] {
            Some(img) => target.member(img, |a, b| tuple_leq(self, a, b)),
            None => false,
        });
        Ok(up(self, xs))
    }
}

/// `ℕ^k` with the pointwise order (a well-quasi-order by Dickson's lemma).
#[derive(Debug, Clone)]
pub struct VectorOrder {
    pub dim: usize,
    /// Probes cover the box `[0, probe_bound]^k`.
    pub probe_bound: u32,
}

/// `φ(v) = (v − guard + d_1, …, v − guard + d_i)` when `v ≥ guard`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuardedTranslation {
    pub guard: Vec<u32>,
    pub deltas: Vec<Vec<u32>>,
}

impl VectorOrder {
    pub fn new(dim: usize) -> Self {
        VectorOrder { dim, probe_bound: 3 }
    }

    pub fn parse_vector(&self, text: &str) -> Result<Vec<u32>, WqoError> {
        let inner = text
            .trim()
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(|| WqoError::UnknownElement(text.to_string()))?;
        let v: Vec<u32> = inner
            .split(',')
            .map(|c| c.trim().parse::<u32>())
            .collect::<Result<_, _>>()
            .map_err(|_| WqoError::UnknownElement(text.to_string()))?;
        if v.len() != self.dim {
            return Err(WqoError::UnknownElement(text.to_string()));
        }
        Ok(v)
    }

    pub fn transfer(&self, guard: Vec<u32>, deltas: Vec<Vec<u32>>) -> Result<GuardedTranslation, WqoError> {
        if guard.len() != self.dim || deltas.iter().any(|d| d.len() != self.dim) {
            return Err(WqoError::Malformed(format!("vectors must have dimension {}", self.dim)));
        }
        Ok(GuardedTranslation { guard, deltas })
    }
}

impl Wqo for VectorOrder {
    type Elem = Vec<u32>;
    type Transfer = GuardedTranslation;

    fn leq(&self, x: &Vec<u32>, y: &Vec<u32>) -> bool {
        x.iter().zip(y).all(|(a, b)| a <= b)
    }

    fn render(&self, x: &Vec<u32>) -> String {
        format!("({})", x.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(","))
    }

    fn parse_elem(&self, text: &str) -> Option<Vec<u32>> {
        self.parse_vector(text).ok()
    }

    fn probes(&self) -> Vec<Vec<u32>> {
        let mut out = vec![vec![]];
        for _ in 0..self.dim {
            out = out
                .into_iter()
                .flat_map(|v: Vec<u32>| {
                    (0..=self.probe_bound).map(move |c| {
                        let mut v = v.clone();
                        v.push(c);
                        v
                    })
                })
                .collect();
        }
        out
    }

    fn sample(&self, rng: &mut SampleRng) -> Vec<u32> {
        (0..self.dim).map(|_| rng.gen_range(0..=self.probe_bound)).collect()
    }

    fn arity(&self, t: &GuardedTranslation) -> usize {
        t.deltas.len()
    }

    fn apply(&self, t: &GuardedTranslation, x: &Vec<u32>) -> Option<Vec<Vec<u32>>> {
        if !self.leq(&t.guard, x) {
            return None;
        }
        Some(
            t.deltas
                .iter()
                .map(|d| x.iter().zip(&t.guard).zip(d).map(|((v, g), d)| v - g + d).collect())
                .collect(),
        )
    }

    fn preimage(
        &self,
        t: &GuardedTranslation,
        target: &UpSet<Vec<Vec<u32>>>,
    ) -> Result<UpSet<Vec<u32>>, WqoError> {
        let mut xs = Vec::new();
        for tuple in target.generators() {
            if tuple.len() != t.deltas.len() {
                return Err(WqoError::Arity { expected: t.deltas.len(), found: tuple.len() });
            }
            let mut bound = t.guard.clone();
            for (tj, dj) in tuple.iter().zip(&t.deltas) {
                for c in 0..self.dim {
                    let need = (tj[c] + t.guard[c]).saturating_sub(dj[c]);
                    bound[c] = bound[c].max(need);
                }
            }
            xs.push(bound);
        }
        Ok(up(self, xs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn vleq(a: &Vec<u32>, b: &Vec<u32>) -> bool {
        a.iter().zip(b).all(|(x, y)| x <= y)
    }

    #[test]
    fn upward_closure() {
        let e: UpSet<Vec<u32>> = UpSet::up(vec![], vleq);
        assert!(e.is_empty());
        let v = VectorOrder::new(2);
        let u = up(&v, [vec![1, 0], vec![0, 1], vec![1, 1]]);
        assert_eq!(u.generators(), &[vec![0, 1], vec![1, 0]]);
        let f = FiniteOrder::new(vec!["a".into(), "b".into()], &[(0, 1)]);
        assert_eq!(up(&f, [0, 1]).generators(), &[0]);
    }

    #[test]
    fn union_and_membership() {
        let a = UpSet::single(vec![1u32, 1]);
        assert_eq!(a.union(&UpSet::empty(), vleq), a);
        assert!(a.member(&vec![2, 1], vleq));
        assert!(!a.member(&vec![0, 5], vleq));
    }

    #[test]
    fn products() {
        let a: UpSet<Vec<u32>> = UpSet::up([vec![1], vec![2]], |x, y| x <= y);
        assert!(a.product(&UpSet::empty(), |x, y| x <= y).is_empty());
        let v = VectorOrder::new(2);
        let lt = |x: &Vec<Vec<u32>>, y: &Vec<Vec<u32>>| tuple_leq(&v, x, y);
        let x = UpSet::single(vec![vec![1, 0]]).union(&UpSet::single(vec![vec![0, 1]]), lt);
        let z = UpSet::single(vec![vec![2, 2]]);
        let p = x.product(&z, lt);
        assert_eq!(
            p.generators(),
            &[vec![vec![0, 1], vec![2, 2]], vec![vec![1, 0], vec![2, 2]]]
        );
    }

    #[test]
    fn finite_preimage_matches_definition() {
        let names: Vec<String> = ["a", "b", "c", "d"].iter().map(|s| s.to_string()).collect();
        let f = FiniteOrder::new(names, &[(0, 1), (1, 2), (0, 3)]);
        let t = f
            .transfer(1, vec![Some(vec![0]), Some(vec![1]), Some(vec![2]), Some(vec![3])])
            .unwrap();
        for target in [vec![1u32], vec![3], vec![0]] {
            let tgt = UpSet::single(target);
            let pre = f.preimage(&t, &tgt).unwrap();
            for x in 0..4 {
                let img = f.apply(&t, &x).unwrap();
                assert_eq!(pre.member(&x, |a, b| f.leq(a, b)), tgt.member(&img, |a, b| tuple_leq(&f, a, b)));
            }
        }
        assert!(f.preimage(&t, &UpSet::empty()).unwrap().is_empty());
        assert!(f.transfer(1, vec![Some(vec![2]), Some(vec![0]), None, None]).is_err());
    }

    #[test]
    fn vector_preimage_matches_definition() {
        let v = VectorOrder::new(2);
        let t = v.transfer(vec![1, 0], vec![vec![0, 2], vec![3, 0]]).unwrap();
        let box6: Vec<Vec<u32>> = VectorOrder { dim: 2, probe_bound: 6 }.probes();
        for tgt in [vec![vec![2, 1], vec![0, 0]], vec![vec![0, 0], vec![4, 4]], vec![vec![5, 0], vec![1, 3]]] {
            let target = UpSet::single(tgt);
            let pre = v.preimage(&t, &target).unwrap();
            for x in &box6 {
                let direct = match v.apply(&t, x) {
                    Some(img) => target.member(&img, |a, b| tuple_leq(&v, a, b)),
                    None => false,
                };
                assert_eq!(pre.member(x, vleq), direct, "{x:?}");
            }
        }
        let pop = v.transfer(vec![2, 1], vec![]).unwrap();
        let pre = v.preimage(&pop, &UpSet::single(vec![])).unwrap();
        assert_eq!(pre.generators(), &[vec![2, 1]]);
    }

    #[test]
    fn membership_in_closure_is_domination() {
        let names: Vec<String> = (0..5).map(|i| format!("e{i}")).collect();
        let f = FiniteOrder::new(names, &[(0, 1), (2, 1), (1, 3), (4, 4)]);
        let xs = [0u32, 2, 3];
        let u = up(&f, xs);
        for x in 0..5 {
            assert_eq!(u.member(&x, |a, b| f.leq(a, b)), xs.iter().any(|g| f.leq(g, &x)));
        }
    }

    #[test]
    fn ascending_chains_stabilize() {
        let v = VectorOrder::new(3);
        let mut rng = SampleRng::seed_from_u64(9);
        for _ in 0..20 {
            let mut acc: UpSet<Vec<u32>> = UpSet::empty();
            let mut stable_for = 0;
            let mut steps = 0;
            while stable_for < 200 {
                let next = acc.union(&UpSet::single(v.sample(&mut rng)), vleq);
                if next == acc {
                    stable_for += 1;
                } else {
                    stable_for = 0;
                }
                acc = next;
                steps += 1;
                assert!(steps < 100_000);
            }
            assert!(acc.generators().len() <= 64);
        }
    }
}
