//! Minimum stack height reached along a computation.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::laws::{IndexedSampler, SampleRng, StructureSampler};
use crate::algebra::{IndexedSemiring, WeightStructure};
use crate::signatures::{Signature, StackSignature, Symbol};

/// A height in `ℕ ∪ {∞}`; `∞` is the additive zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Height {
    Finite(u64),
    Infinite,
}

impl Height {
    pub fn plus(self, k: usize) -> Height {
        match self {
            Height::Finite(n) => Height::Finite(n + k as u64),
            Height::Infinite => Height::Infinite,
        }
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            Height::Finite(n) => Some(n),
            Height::Infinite => None,
        }
    }

    pub fn parse(text: &str) -> Option<Height> {
        match text.trim() {
            "inf" | "∞" => Some(Height::Infinite),
            t => t.parse().ok().map(Height::Finite),
        }
    }
}

impl fmt::Display for Height {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Height::Finite(n) => write!(f, "{n}"),
            Height::Infinite => write!(f, "inf"),
        }
    }
}

fn floor(sig: &Signature) -> u64 {
    sig.pop.len().max(sig.push.len()) as u64
}

/// `D_{w/w'} = ℕ^{≥max(|w|,|w'|)} ∪ {∞}` with `⊕ = min`, `⊙ = max`,
/// `1_{w/w} = |w|` and conversions adding the suffix length.
#[derive(Debug, Clone, Default)]
pub struct MinHeight {
    symbols: usize,
}

impl MinHeight {
    /// `symbols` only affects random sampling.
    pub fn new(symbols: usize) -> Self {
        MinHeight { symbols: symbols.max(1) }
    }
}

pub fn minheight_ws() -> MinHeight {
    MinHeight::new(2)
}

impl WeightStructure for MinHeight {
    type Value = Height;

    fn name(&self) -> String {
        "minheight".to_string()
    }

    fn contains(&self, sig: &Signature, a: &Height) -> bool {
        match a {
            Height::Finite(n) => *n >= floor(sig),
            Height::Infinite => true,
        }
    }

    fn zero(&self, _sig: &Signature) -> Height {
        Height::Infinite
    }

    fn unit(&self, sig: &Signature) -> Height {
        debug_assert!(sig.is_balanced());
        Height::Finite(sig.pop.len() as u64)
    }

    fn add(&self, _sig: &Signature, a: &Height, b: &Height) -> Height {
        (*a).min(*b)
    }

    fn smul(&self, l: &Signature, r: &Signature, a: &Height, b: &Height) -> Height {
        debug_assert!(l.strictly_compatible(r));
        (*a).max(*b)
    }

    fn ext(&self, _sig: &Signature, suffix: &[Symbol], a: &Height) -> Height {
        a.plus(suffix.len())
    }

    fn locally_bounded(&self) -> bool {
        true
    }

    fn render(&self, a: &Height) -> String {
        a.to_string()
    }
}

fn sample_height(floor: u64, rng: &mut SampleRng) -> Height {
    if rng.gen_ratio(1, 6) {
        Height::Infinite
    } else {
        Height::Finite(floor + rng.gen_range(0..4))
    }
}

impl StructureSampler for MinHeight {
    fn sample_symbols(&self) -> usize {
        self.symbols
    }

    fn sample(&self, sig: &Signature, rng: &mut SampleRng) -> Height {
        sample_height(floor(sig), rng)
    }
}

/// The same indexed semiring defined directly by case analysis on the
/// lengths of the inner words, without going through a weight structure.
/// `D_Top = {∞}`.
#[derive(Debug, Clone, Default)]
pub struct MinHeightDirect {
    symbols: usize,
}

impl MinHeightDirect {
    pub fn new(symbols: usize) -> Self {
        MinHeightDirect { symbols: symbols.max(1) }
    }
}

impl IndexedSemiring for MinHeightDirect {
    type Value = Height;

    fn name(&self) -> String {
        "minheight-direct".to_string()
    }

    fn contains(&self, idx: &StackSignature, a: &Height) -> bool {
        match idx {
            StackSignature::Top => *a == Height::Infinite,
            StackSignature::Proper(s) => MinHeight::default().contains(s, a),
        }
    }

    fn zero(&self, _idx: &StackSignature) -> Height {
        Height::Infinite
    }

    fn one(&self) -> Height {
        Height::Finite(0)
    }

    fn add(&self, _idx: &StackSignature, a: &Height, b: &Height) -> Height {
        (*a).min(*b)
    }

    fn mul(&self, l: &StackSignature, r: &StackSignature, a: &Height, b: &Height) -> Height {
        if l.mul(r).is_top() {
            return Height::Infinite;
        }
        let (l, r) = (l.as_proper().unwrap(), r.as_proper().unwrap());
        let (inner_l, inner_r) = (l.push.len(), r.pop.len());
        if inner_l <= inner_r {
            a.plus(inner_r - inner_l).max(*b)
        } else {
            (*a).max(b.plus(inner_l - inner_r))
        }
    }

    fn convert(&self, from: &StackSignature, to: &StackSignature, a: &Height) -> Height {
        match (from.as_proper(), to.as_proper()) {
            (Some(f), Some(t)) => a.plus(t.pop.len() - f.pop.len()),
            _ => Height::Infinite,
        }
    }

    fn locally_bounded(&self) -> bool {
        true
    }

    fn render(&self, a: &Height) -> String {
        a.to_string()
    }
}

impl IndexedSampler for MinHeightDirect {
    fn sample_symbols(&self) -> usize {
        self.symbols
    }

    fn sample(&self, idx: &StackSignature, rng: &mut SampleRng) -> Height {
        match idx {
            StackSignature::Top => Height::Infinite,
            StackSignature::Proper(s) => sample_height(floor(s), rng),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::laws::{indexed_law_suite, structure_law_suite, IndexFamily};
    use crate::algebra::{lift, Lifted};

    fn sig(pop: &[u32], push: &[u32]) -> StackSignature {
        StackSignature::proper(pop.iter().map(|&s| Symbol(s)).collect(), push.iter().map(|&s| Symbol(s)).collect())
    }

    #[test]
    fn lifted_products_from_the_running_example() {
        let s = lift(MinHeight::new(1));
        let g_e = sig(&[0], &[]);
        let e_e = sig(&[], &[]);
        let one = Lifted::Val(Height::Finite(1));
        let zero_h = Lifted::Val(Height::Finite(0));
        assert_eq!(s.mul(&g_e, &e_e, &one, &zero_h), Lifted::Val(Height::Finite(1)));
        assert_eq!(s.mul(&g_e, &g_e, &one, &one), Lifted::Val(Height::Finite(2)));
    }

    #[test]
    fn structure_examples() {
        let ws = MinHeight::new(1);
        let g_e = Signature::new(vec![Symbol(0)], vec![]);
        assert_eq!(ws.ext(&g_e, &[Symbol(1)], &Height::Finite(1)), Height::Finite(2));
        let ww = Signature::new(vec![Symbol(0); 2], vec![Symbol(0); 2]);
        let next = Signature::new(vec![Symbol(0); 2], vec![Symbol(0); 3]);
        assert_eq!(ws.smul(&ww, &next, &ws.unit(&ww), &Height::Finite(5)), Height::Finite(5));
        assert_eq!(ws.add(&g_e, &Height::Infinite, &Height::Finite(3)), Height::Finite(3));
    }

    #[test]
    fn order_runs_towards_smaller_heights() {
        let s = lift(MinHeight::new(1));
        let idx = sig(&[0], &[]);
        assert!(s.below(&idx, &Lifted::Val(Height::Finite(4)), &Lifted::Val(Height::Finite(2))));
        assert!(!s.below(&idx, &Lifted::Val(Height::Finite(2)), &Lifted::Val(Height::Finite(4))));
        assert!(s.below(&idx, &Lifted::Val(Height::Infinite), &Lifted::Val(Height::Finite(1))));
    }

    #[test]
    fn laws_hold() {
        let report = structure_law_suite(&MinHeight::new(2), 2000, 1);
        assert!(report.passed(), "{report}");
        let report = indexed_law_suite(&lift(MinHeight::new(2)), IndexFamily::All, 2000, 2);
        assert!(report.passed(), "{report}");
        let report = indexed_law_suite(&MinHeightDirect::new(2), IndexFamily::All, 2000, 3);
        assert!(report.passed(), "{report}");
    }

    #[test]
    fn direct_definition_agrees_with_lift() {
        let lifted = lift(MinHeight::new(2));
        let direct = MinHeightDirect::new(2);
        let sigs = crate::signatures::enumerate_signatures(2, 3);
        let heights = [Height::Finite(0), Height::Finite(3), Height::Finite(5), Height::Infinite];
        for s1 in &sigs {
            for s2 in &sigs {
                let (i1, i2) = (StackSignature::Proper(s1.clone()), StackSignature::Proper(s2.clone()));
                for a in heights.iter().map(|h| h.plus(floor(s1) as usize)) {
                    for b in heights.iter().map(|h| h.plus(floor(s2) as usize)) {
                        let via_lift = match lifted.mul(&i1, &i2, &Lifted::Val(a), &Lifted::Val(b)) {
                            Lifted::Bullet => Height::Infinite,
                            Lifted::Val(h) => h,
                        };
                        assert_eq!(via_lift, direct.mul(&i1, &i2, &a, &b), "{s1:?} {s2:?} {a} {b}");
                    }
                }
            }
        }
    }
}
