//! Indexed semirings over the stack-signature monoid, the weight structures
//! they are built from, and the flattening into an ordinary semiring.

use std::fmt::Debug;
use std::hash::Hash;

use crate::signatures::{Lift, Signature, StackSignature, Symbol};

pub mod laws;

/// Values stored in weight domains. Equality must be decidable and canonical
/// wherever saturation compares edge weights.
pub trait WeightValue: Clone + Eq + Hash + Debug + Send + Sync {}

impl<T: Clone + Eq + Hash + Debug + Send + Sync> WeightValue for T {}

/// Weights with multiplication defined only on strictly compatible indices.
///
/// Every method takes the proper signature indexing its operands; callers
/// guarantee the operands inhabit those indices.
pub trait WeightStructure: Send + Sync {
    type Value: WeightValue;

    fn name(&self) -> String;

    /// Membership test for `D_σ`.
    fn contains(&self, sig: &Signature, a: &Self::Value) -> bool;

    fn zero(&self, sig: &Signature) -> Self::Value;

    /// `1_σ`, defined for balanced `σ = w/w`.
    fn unit(&self, sig: &Signature) -> Self::Value;

    fn add(&self, sig: &Signature, a: &Self::Value, b: &Self::Value) -> Self::Value;

    /// `a ⊙ b` for `left.push == right.pop`.
    fn smul(
        &self,
        left: &Signature,
        right: &Signature,
        a: &Self::Value,
        b: &Self::Value,
    ) -> Self::Value;

    /// Conversion from `D_σ` to `D_{σ·w}` where `σ·w` extends both components by `suffix`.
    fn ext(&self, sig: &Signature, suffix: &[Symbol], a: &Self::Value) -> Self::Value;

    fn equal(&self, _sig: &Signature, a: &Self::Value, b: &Self::Value) -> bool {
        a == b
    }

    /// Whether `D_{γ/ε}` has no infinite ascending chains for every `γ`.
    fn locally_bounded(&self) -> bool;

    fn render(&self, a: &Self::Value) -> String;
}

/// A semiring indexed by the ordered monoid of stack signatures, with
/// conversion functions along the order.
pub trait IndexedSemiring: Send + Sync {
    type Value: WeightValue;

    fn name(&self) -> String;

    fn contains(&self, idx: &StackSignature, a: &Self::Value) -> bool;

    fn zero(&self, idx: &StackSignature) -> Self::Value;

    /// The unit, an element of `D_{ε/ε}`.
    fn one(&self) -> Self::Value;

    fn add(&self, idx: &StackSignature, a: &Self::Value, b: &Self::Value) -> Self::Value;

    /// `a ⊗ b` with result in `D_{left·right}`.
    fn mul(
        &self,
        left: &StackSignature,
        right: &StackSignature,
        a: &Self::Value,
        b: &Self::Value,
    ) -> Self::Value;

    /// Conversion `D_from → D_to`; requires `from ≤ to`.
    fn convert(&self, from: &StackSignature, to: &StackSignature, a: &Self::Value) -> Self::Value;

    fn equal(&self, _idx: &StackSignature, a: &Self::Value, b: &Self::Value) -> bool {
        a == b
    }

    /// The order `a ⊑ b` iff `a ⊕ b = b`.
    fn below(&self, idx: &StackSignature, a: &Self::Value, b: &Self::Value) -> bool {
        self.equal(idx, &self.add(idx, a, b), b)
    }

    fn locally_bounded(&self) -> bool;

    fn render(&self, a: &Self::Value) -> String;

    fn is_zero(&self, idx: &StackSignature, a: &Self::Value) -> bool {
        self.equal(idx, a, &self.zero(idx))
    }
}

/// Values of a lifted weight structure: `D_Top` is the singleton `{•}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Lifted<V> {
    Bullet,
    Val(V),
}

impl<V> Lifted<V> {
    pub fn value(&self) -> Option<&V> {
        match self {
            Lifted::Val(v) => Some(v),
            Lifted::Bullet => None,
        }
    }

    fn expect_val(&self) -> &V {
        match self {
            Lifted::Val(v) => v,
            Lifted::Bullet => panic!("• used at a proper index"),
        }
    }
}

/// Builds the indexed semiring of a weight structure: operands of `⊗` are
/// aligned to a strictly compatible pair, the lifted side is converted, and
/// the restricted multiplication is applied.
pub fn lift<W: WeightStructure>(ws: W) -> LiftedSemiring<W> {
    LiftedSemiring { ws }
}

#[derive(Debug, Clone)]
pub struct LiftedSemiring<W> {
    ws: W,
}

impl<W> LiftedSemiring<W> {
    pub fn structure(&self) -> &W {
        &self.ws
    }
}

impl<W: WeightStructure> LiftedSemiring<W> {
    fn check(&self, idx: &StackSignature, a: &Lifted<W::Value>) {
        debug_assert!(
            self.contains(idx, a),
            "{} value {} outside its index {:?}",
            self.ws.name(),
            self.render(a),
            idx
        );
    }
}

impl<W: WeightStructure> IndexedSemiring for LiftedSemiring<W> {
    type Value = Lifted<W::Value>;

    fn name(&self) -> String {
        format!("lift({})", self.ws.name())
    }

    fn contains(&self, idx: &StackSignature, a: &Self::Value) -> bool {
        match (idx, a) {
            (StackSignature::Top, Lifted::Bullet) => true,
            (StackSignature::Proper(s), Lifted::Val(v)) => self.ws.contains(s, v),
            _ => false,
        }
    }

    fn zero(&self, idx: &StackSignature) -> Self::Value {
        match idx {
            StackSignature::Top => Lifted::Bullet,
            StackSignature::Proper(s) => Lifted::Val(self.ws.zero(s)),
        }
    }

    fn one(&self) -> Self::Value {
        Lifted::Val(self.ws.unit(&Signature::unit()))
    }

    fn add(&self, idx: &StackSignature, a: &Self::Value, b: &Self::Value) -> Self::Value {
        self.check(idx, a);
        self.check(idx, b);
        match idx {
            StackSignature::Top => Lifted::Bullet,
            StackSignature::Proper(s) => {
                Lifted::Val(self.ws.add(s, a.expect_val(), b.expect_val()))
            }
        }
    }

    fn mul(
        &self,
        left: &StackSignature,
        right: &StackSignature,
        a: &Self::Value,
        b: &Self::Value,
    ) -> Self::Value {
        self.check(left, a);
        self.check(right, b);
        let Some(al) = left.align(right) else {
            return Lifted::Bullet;
        };
        let (a, b) = (a.expect_val(), b.expect_val());
        let out = match &al.lifted {
            Lift::None => self.ws.smul(&al.left, &al.right, a, b),
            Lift::Left(w) => {
                let lifted = self.ws.ext(left.as_proper().unwrap(), w, a);
                self.ws.smul(&al.left, &al.right, &lifted, b)
            }
            Lift::Right(w) => {
                let lifted = self.ws.ext(right.as_proper().unwrap(), w, b);
                self.ws.smul(&al.left, &al.right, a, &lifted)
            }
        };
        let out = Lifted::Val(out);
        if cfg!(debug_assertions) {
            self.check(&left.mul(right), &out);
        }
        out
    }

    fn convert(&self, from: &StackSignature, to: &StackSignature, a: &Self::Value) -> Self::Value {
        self.check(from, a);
        match (from, to) {
            (_, StackSignature::Top) => Lifted::Bullet,
            (StackSignature::Proper(f), StackSignature::Proper(t)) => {
                let w = f
                    .suffix_to(t)
                    .unwrap_or_else(|| panic!("conversion requires {f:?} ≤ {t:?}"));
                if w.is_empty() {
                    a.clone()
                } else {
                    Lifted::Val(self.ws.ext(f, &w, a.expect_val()))
                }
            }
            (StackSignature::Top, StackSignature::Proper(_)) => {
                panic!("no conversion out of Top")
            }
        }
    }

    fn equal(&self, idx: &StackSignature, a: &Self::Value, b: &Self::Value) -> bool {
        match (idx, a, b) {
            (StackSignature::Proper(s), Lifted::Val(x), Lifted::Val(y)) => self.ws.equal(s, x, y),
            _ => a == b,
        }
    }

    fn locally_bounded(&self) -> bool {
        self.ws.locally_bounded()
    }

    fn render(&self, a: &Self::Value) -> String {
        match a {
            Lifted::Bullet => "•".to_string(),
            Lifted::Val(v) => self.ws.render(v),
        }
    }
}

/// An ordinary semiring.
pub trait Semiring {
    type Elem: Clone + Debug;

    fn name(&self) -> String;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn equal(&self, a: &Self::Elem, b: &Self::Elem) -> bool;
    fn render(&self, a: &Self::Elem) -> String;
}

/// Element of the flattened semiring: a value tagged with its index, or `⊥`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FlatWeight<V> {
    Bot,
    Tagged(StackSignature, V),
}

/// The ordinary semiring obtained from an indexed one by tagging values with
/// their signature; addition converts both operands to the join of the tags.
#[derive(Debug, Clone)]
pub struct Flattened<S> {
    pub inner: S,
}

pub fn flatten<S: IndexedSemiring>(s: S) -> Flattened<S> {
    Flattened { inner: s }
}

/// The same carrier with the equal-index-or-Top addition. It does not form a
/// semiring: multiplication fails to distribute over this addition.
#[derive(Debug, Clone)]
pub struct NaiveFlattened<S> {
    pub inner: S,
}

pub fn naive_flatten<S: IndexedSemiring>(s: S) -> NaiveFlattened<S> {
    NaiveFlattened { inner: s }
}

fn flat_mul<S: IndexedSemiring>(
    s: &S,
    x: &FlatWeight<S::Value>,
    y: &FlatWeight<S::Value>,
) -> FlatWeight<S::Value> {
    match (x, y) {
        (FlatWeight::Tagged(i, a), FlatWeight::Tagged(j, b)) => {
            FlatWeight::Tagged(i.mul(j), s.mul(i, j, a, b))
        }
        _ => FlatWeight::Bot,
    }
}

fn flat_equal<S: IndexedSemiring>(s: &S, x: &FlatWeight<S::Value>, y: &FlatWeight<S::Value>) -> bool {
    match (x, y) {
        (FlatWeight::Bot, FlatWeight::Bot) => true,
        (FlatWeight::Tagged(i, a), FlatWeight::Tagged(j, b)) => i == j && s.equal(i, a, b),
        _ => false,
    }
}

fn flat_render<S: IndexedSemiring>(s: &S, x: &FlatWeight<S::Value>) -> String {
    match x {
        FlatWeight::Bot => "⊥".to_string(),
        FlatWeight::Tagged(i, a) => format!("⟨{}, {}⟩", render_index(i), s.render(a)),
    }
}

/// Renders a word with numbered symbols, `-` when empty.
pub fn render_numbered(w: &[Symbol]) -> String {
    if w.is_empty() {
        "-".to_string()
    } else {
        w.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",")
    }
}

/// Renders a signature with numbered symbols (`s0`, `s1`, ..).
pub fn render_index(idx: &StackSignature) -> String {
    let word = render_numbered;
    match idx {
        StackSignature::Top => "TOP".to_string(),
        StackSignature::Proper(s) => format!("{}/{}", word(&s.pop), word(&s.push)),
    }
}

impl<S: IndexedSemiring> Flattened<S> {
    /// `⟨σ1,a⟩ ⊕ ⟨σ2,b⟩ = ⟨σ1⊔σ2, ext(a) ⊕ ext(b)⟩`.
    pub fn flat_add(&self, x: &FlatWeight<S::Value>, y: &FlatWeight<S::Value>) -> FlatWeight<S::Value> {
        match (x, y) {
            (FlatWeight::Bot, z) | (z, FlatWeight::Bot) => z.clone(),
            (FlatWeight::Tagged(i, a), FlatWeight::Tagged(j, b)) => {
                let k = i.join(j);
                let a = self.inner.convert(i, &k, a);
                let b = self.inner.convert(j, &k, b);
                let sum = self.inner.add(&k, &a, &b);
                FlatWeight::Tagged(k, sum)
            }
        }
    }
}

impl<S: IndexedSemiring> Semiring for Flattened<S> {
    type Elem = FlatWeight<S::Value>;

    fn name(&self) -> String {
        format!("flatten({})", self.inner.name())
    }

    fn zero(&self) -> Self::Elem {
        FlatWeight::Bot
    }

    fn one(&self) -> Self::Elem {
        FlatWeight::Tagged(StackSignature::unit(), self.inner.one())
    }

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.flat_add(a, b)
    }

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        flat_mul(&self.inner, a, b)
    }

    fn equal(&self, a: &Self::Elem, b: &Self::Elem) -> bool {
        flat_equal(&self.inner, a, b)
    }

    fn render(&self, a: &Self::Elem) -> String {
        flat_render(&self.inner, a)
    }
}

/// Equal indices add pointwise; anything else collapses to `⟨Top, •⟩`.
pub fn naive_add<S: IndexedSemiring>(
    s: &S,
    x: &FlatWeight<S::Value>,
    y: &FlatWeight<S::Value>,
) -> FlatWeight<S::Value> {
    match (x, y) {
        (FlatWeight::Bot, z) | (z, FlatWeight::Bot) => z.clone(),
        (FlatWeight::Tagged(i, a), FlatWeight::Tagged(j, b)) if i == j => {
            FlatWeight::Tagged(i.clone(), s.add(i, a, b))
        }
        _ => FlatWeight::Tagged(StackSignature::Top, s.zero(&StackSignature::Top)),
    }
}

impl<S: IndexedSemiring> Semiring for NaiveFlattened<S> {
    type Elem = FlatWeight<S::Value>;

    fn name(&self) -> String {
        format!("naive-flatten({})", self.inner.name())
    }

    fn zero(&self) -> Self::Elem {
        FlatWeight::Bot
    }

    fn one(&self) -> Self::Elem {
        FlatWeight::Tagged(StackSignature::unit(), self.inner.one())
    }

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        naive_add(&self.inner, a, b)
    }

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        flat_mul(&self.inner, a, b)
    }

    fn equal(&self, a: &Self::Elem, b: &Self::Elem) -> bool {
        flat_equal(&self.inner, a, b)
    }

    fn render(&self, a: &Self::Elem) -> String {
        flat_render(&self.inner, a)
    }
}

#[cfg(test)]
mod tests {
    use super::laws::{semiring_law_suite, structure_law_suite};
    use super::*;
    use crate::domains::{Height, MinHeight};

    fn idx(pop: usize, push: usize) -> StackSignature {
        StackSignature::proper(vec![Symbol(0); pop], vec![Symbol(0); push])
    }

    fn h(n: u64) -> Lifted<Height> {
        Lifted::Val(Height::Finite(n))
    }

    #[test]
    fn flat_addition_converts_to_the_join() {
        let f = flatten(lift(MinHeight::new(1)));
        let x = FlatWeight::Tagged(idx(0, 0), h(0));
        let y = FlatWeight::Tagged(idx(1, 1), h(1));
        assert_eq!(f.add(&x, &y), FlatWeight::Tagged(idx(1, 1), h(1)));
        assert_eq!(f.mul(&x, &FlatWeight::Bot), FlatWeight::Bot);
        assert_eq!(f.add(&FlatWeight::Bot, &y), y);
    }

    #[test]
    fn naive_addition_and_its_distributivity_failure() {
        let s = lift(MinHeight::new(1));
        let n = naive_flatten(s.clone());
        let a = FlatWeight::Tagged(idx(0, 0), h(0));
        let b = FlatWeight::Tagged(idx(1, 1), h(2));
        let c = FlatWeight::Tagged(idx(1, 1), h(3));
        assert_eq!(n.add(&b, &c), FlatWeight::Tagged(idx(1, 1), h(2)));
        assert_eq!(n.add(&a, &b), FlatWeight::Tagged(StackSignature::Top, Lifted::Bullet));
        let lhs = n.mul(&n.add(&a, &b), &c);
        let rhs = n.add(&n.mul(&a, &c), &n.mul(&b, &c));
        assert!(!n.equal(&lhs, &rhs));
    }

    #[test]
    fn flattened_laws() {
        let s = lift(MinHeight::new(1));
        let report = semiring_law_suite(&flatten(s.clone()), &s, 3000, 11);
        assert!(report.passed(), "{report}");
        let report = semiring_law_suite(&naive_flatten(s.clone()), &s, 3000, 11);
        let d = report.law("distrib-right").unwrap();
        assert_eq!(d.status, laws::LawStatus::Fail);
        assert!(d.failing_shapes.iter().any(|sh| sh == "-/- s0/s0 s0/s0"), "{:?}", d.failing_shapes);
    }

    /// A deliberately broken conversion must be caught by the checker.
    #[derive(Clone)]
    struct BrokenExt(MinHeight);

    impl WeightStructure for BrokenExt {
        type Value = Height;
        fn name(&self) -> String {
            "broken".into()
        }
        fn contains(&self, s: &Signature, a: &Height) -> bool {
            self.0.contains(s, a)
        }
        fn zero(&self, s: &Signature) -> Height {
            self.0.zero(s)
        }
        fn unit(&self, s: &Signature) -> Height {
            self.0.unit(s)
        }
        fn add(&self, s: &Signature, a: &Height, b: &Height) -> Height {
            self.0.add(s, a, b)
        }
        fn smul(&self, l: &Signature, r: &Signature, a: &Height, b: &Height) -> Height {
            self.0.smul(l, r, a, b)
        }
        fn ext(&self, _s: &Signature, w: &[Symbol], a: &Height) -> Height {
            a.plus(2 * w.len())
        }
        fn locally_bounded(&self) -> bool {
            true
        }
        fn render(&self, a: &Height) -> String {
            a.to_string()
        }
    }

    impl laws::StructureSampler for BrokenExt {
        fn sample_symbols(&self) -> usize {
            1
        }
        fn sample(&self, s: &Signature, rng: &mut laws::SampleRng) -> Height {
            self.0.sample(s, rng)
        }
    }

    #[test]
    fn checker_reports_broken_laws() {
        let report = structure_law_suite(&BrokenExt(MinHeight::new(1)), 500, 5);
        assert!(!report.passed());
        assert_eq!(report.law("ext-unit").unwrap().status, laws::LawStatus::Fail);
        assert!(report.law("ext-unit").unwrap().witness.is_some());
        assert_eq!(report.law("add-commutative").unwrap().status, laws::LawStatus::Pass);
    }
}
