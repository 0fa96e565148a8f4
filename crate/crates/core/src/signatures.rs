//! The ordered monoid of stack signatures.
//!
//! A proper signature `w1/w2` summarizes a computation that pops `w1` and
//! pushes `w2` (top of stack at the left of both words). Composing two
//! signatures cancels the pushed prefix of the first against the popped prefix
//! of the second; when neither is a prefix of the other the composition is the
//! absorbing element [`StackSignature::Top`].

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// An interned stack symbol. Identity is the integer index into an [`Alphabet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Symbol(pub u32);

impl Symbol {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A word over the stack alphabet; index 0 is the top of the stack.
pub type Word = Vec<Symbol>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SignatureError {
    #[error("strict compatibility is only defined for proper signatures")]
    TopOperand,
    #[error("unknown stack symbol `{0}`")]
    UnknownSymbol(String),
    #[error("malformed signature `{0}`")]
    Malformed(String),
}

/// Named stack symbols, numbered in declaration order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
    index: HashMap<String, Symbol>,
}

impl Alphabet {
    pub fn new<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut alphabet = Alphabet::default();
        for name in names {
            alphabet.intern(name);
        }
        alphabet
    }

    /// Alphabet `{s0, s1, ..}` of the given size.
    pub fn numbered(size: usize) -> Self {
        Alphabet::new((0..size).map(|i| format!("s{i}")))
    }

    pub fn intern(&mut self, name: impl Into<String>) -> Symbol {
        let name = name.into();
        if let Some(&sym) = self.index.get(&name) {
            return sym;
        }
        let sym = Symbol(self.names.len() as u32);
        self.index.insert(name.clone(), sym);
        self.names.push(name);
        sym
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> + '_ {
        (0..self.names.len() as u32).map(Symbol)
    }

    pub fn lookup(&self, name: &str) -> Option<Symbol> {
        self.index.get(name).copied()
    }

    pub fn name(&self, sym: Symbol) -> &str {
        &self.names[sym.index()]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Parses a comma-separated word; `-`, `ε` and the empty string denote ε.
    pub fn parse_word(&self, text: &str) -> Result<Word, SignatureError> {
        let text = text.trim();
        if text.is_empty() || text == "-" || text == "ε" {
            return Ok(Word::new());
        }
        text.split(',')
            .map(|tok| {
                let tok = tok.trim();
                self.lookup(tok)
                    .ok_or_else(|| SignatureError::UnknownSymbol(tok.to_string()))
            })
            .collect()
    }

    pub fn render_word(&self, word: &[Symbol]) -> String {
        if word.is_empty() {
            return "-".to_string();
        }
        word.iter()
            .map(|&s| self.name(s))
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn render(&self, sig: &StackSignature) -> String {
        match sig {
            StackSignature::Top => "TOP".to_string(),
            StackSignature::Proper(s) => {
                format!("{}/{}", self.render_word(&s.pop), self.render_word(&s.push))
            }
        }
    }

    pub fn render_lattice(&self, sig: &SigLattice) -> String {
        match sig {
            SigLattice::Bottom => "BOT".to_string(),
            SigLattice::Sig(s) => self.render(s),
        }
    }

    pub fn parse_signature(&self, text: &str) -> Result<StackSignature, SignatureError> {
        let text = text.trim();
        if text == "TOP" {
            return Ok(StackSignature::Top);
        }
        let (pop, push) = text
            .split_once('/')
            .ok_or_else(|| SignatureError::Malformed(text.to_string()))?;
        if push.contains('/') {
            return Err(SignatureError::Malformed(text.to_string()));
        }
        Ok(StackSignature::proper(
            self.parse_word(pop)?,
            self.parse_word(push)?,
        ))
    }

    pub fn parse_lattice(&self, text: &str) -> Result<SigLattice, SignatureError> {
        if text.trim() == "BOT" {
            Ok(SigLattice::Bottom)
        } else {
            self.parse_signature(text).map(SigLattice::Sig)
        }
    }
}

/// A proper stack signature `pop/push`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Signature {
    pub pop: Word,
    pub push: Word,
}

impl Signature {
    pub fn new(pop: Word, push: Word) -> Self {
        Signature { pop, push }
    }

    /// The monoid unit `ε/ε`.
    pub fn unit() -> Self {
        Signature::new(Word::new(), Word::new())
    }

    /// `w/ε`, the signature of popping `w`.
    pub fn popping(word: Word) -> Self {
        Signature::new(word, Word::new())
    }

    /// Extends both components by the common suffix `w`.
    pub fn extend(&self, w: &[Symbol]) -> Self {
        let mut pop = self.pop.clone();
        pop.extend_from_slice(w);
        let mut push = self.push.clone();
        push.extend_from_slice(w);
        Signature::new(pop, push)
    }

    /// `|pop| + |push|`.
    pub fn size(&self) -> usize {
        self.pop.len() + self.push.len()
    }

    /// Whether `ε/ε ≤ self`, i.e. the signature has the form `w/w`.
    pub fn is_balanced(&self) -> bool {
        self.pop == self.push
    }

    pub fn strictly_compatible(&self, next: &Signature) -> bool {
        self.push == next.pop
    }

    pub fn leq(&self, other: &Signature) -> bool {
        self.suffix_to(other).is_some()
    }

    /// The word `w` with `other = self.extend(w)`, if any.
    pub fn suffix_to(&self, other: &Signature) -> Option<Word> {
        let w = other.pop.strip_prefix(self.pop.as_slice())?;
        let v = other.push.strip_prefix(self.push.as_slice())?;
        (w == v).then(|| w.to_vec())
    }
}

/// An element of the stack-signature monoid.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum StackSignature {
    Proper(Signature),
    Top,
}

/// Which branch of the prefix split produced a product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MulCase {
    /// The second operand's pop is a prefix of the first's push: `w1' = w2 w1''`.
    PushCoversPop,
    /// The first operand's push is a proper prefix of the second's pop: `w2 = w1' w2''`.
    PopExtendsPush,
    /// Incompatible operands or a `Top` operand.
    Top,
}

/// Result of aligning two compatible signatures to a strictly compatible pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alignment {
    pub left: Signature,
    pub right: Signature,
    pub lifted: Lift,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Lift {
    /// Already strictly compatible.
    None,
    /// The left operand was extended by the word.
    Left(Word),
    /// The right operand was extended by the word.
    Right(Word),
}

impl StackSignature {
    pub fn proper(pop: Word, push: Word) -> Self {
        StackSignature::Proper(Signature::new(pop, push))
    }

    pub fn unit() -> Self {
        StackSignature::Proper(Signature::unit())
    }

    pub fn is_top(&self) -> bool {
        matches!(self, StackSignature::Top)
    }

    pub fn as_proper(&self) -> Option<&Signature> {
        match self {
            StackSignature::Proper(s) => Some(s),
            StackSignature::Top => None,
        }
    }

    pub fn mul(&self, other: &StackSignature) -> StackSignature {
        self.mul_with_case(other).0
    }

    pub fn mul_with_case(&self, other: &StackSignature) -> (StackSignature, MulCase) {
        let (a, b) = match (self, other) {
            (StackSignature::Proper(a), StackSignature::Proper(b)) => (a, b),
            _ => return (StackSignature::Top, MulCase::Top),
        };
        if let Some(rest) = a.push.strip_prefix(b.pop.as_slice()) {
            let mut push = b.push.clone();
            push.extend_from_slice(rest);
            (
                StackSignature::proper(a.pop.clone(), push),
                MulCase::PushCoversPop,
            )
        } else if let Some(rest) = b.pop.strip_prefix(a.push.as_slice()) {
            let mut pop = a.pop.clone();
            pop.extend_from_slice(rest);
            (
                StackSignature::proper(pop, b.push.clone()),
                MulCase::PopExtendsPush,
            )
        } else {
            (StackSignature::Top, MulCase::Top)
        }
    }

    pub fn leq(&self, other: &StackSignature) -> bool {
        match (self, other) {
            (_, StackSignature::Top) => true,
            (StackSignature::Top, StackSignature::Proper(_)) => false,
            (StackSignature::Proper(a), StackSignature::Proper(b)) => a.leq(b),
        }
    }

    pub fn join(&self, other: &StackSignature) -> StackSignature {
        if self.leq(other) {
            other.clone()
        } else if other.leq(self) {
            self.clone()
        } else {
            // Two proper signatures with a proper common upper bound are
            // comparable, so incomparable ones only meet at Top.
            StackSignature::Top
        }
    }

    pub fn strictly_compatible(&self, other: &StackSignature) -> Result<bool, SignatureError> {
        match (self, other) {
            (StackSignature::Proper(a), StackSignature::Proper(b)) => Ok(a.strictly_compatible(b)),
            _ => Err(SignatureError::TopOperand),
        }
    }

    /// Minimal lifts making the operands strictly compatible, or `None` when
    /// they are incompatible (or either is `Top`).
    pub fn align(&self, other: &StackSignature) -> Option<Alignment> {
        align(self.as_proper()?, other.as_proper()?)
    }

    /// The suffix `w` with `other = pop·w / push·w`; `None` unless
    /// `self ≤ other` with `other` proper.
    pub fn suffix_of(&self, other: &StackSignature) -> Option<Word> {
        self.as_proper()?.suffix_to(other.as_proper()?)
    }
}

pub fn align(a: &Signature, b: &Signature) -> Option<Alignment> {
    if a.push == b.pop {
        return Some(Alignment {
            left: a.clone(),
            right: b.clone(),
            lifted: Lift::None,
        });
    }
    if let Some(rest) = b.pop.strip_prefix(a.push.as_slice()) {
        return Some(Alignment {
            left: a.extend(rest),
            right: b.clone(),
            lifted: Lift::Left(rest.to_vec()),
        });
    }
    if let Some(rest) = a.push.strip_prefix(b.pop.as_slice()) {
        return Some(Alignment {
            left: a.clone(),
            right: b.extend(rest),
            lifted: Lift::Right(rest.to_vec()),
        });
    }
    None
}

/// Classification of a triple product `s1·s2·s3 ≠ Top` into the five
/// alignment shapes used by the lifting construction's associativity argument.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TripleCase {
    /// `s1 ≤ s1'`, `s3 ≤ s3'`, `s1' ∥ s2`, `s2 ∥ s3'`.
    OuterLifted { s1: Signature, s3: Signature },
    /// `s1 ≤ s1'`, `s2 ≤ s2'`, `s1' ∥ s2`, `s2' ∥ s3`.
    LeftThenMiddle { s1: Signature, s2: Signature },
    /// `s3 ≤ s3'`, `s2 ≤ s2'`, `s2 ∥ s3'`, `s1 ∥ s2'`.
    RightThenMiddle { s3: Signature, s2: Signature },
    /// `s2 ≤ s2' ≤ s2''`, `s1 ∥ s2'`, `s2'' ∥ s3`.
    MiddleLeftFirst { inner: Signature, outer: Signature },
    /// `s2 ≤ s2' ≤ s2''`, `s1 ∥ s2''`, `s2' ∥ s3`.
    MiddleRightFirst { inner: Signature, outer: Signature },
}

/// Finds one of the five alignment shapes for a non-Top triple product.
/// Returns `None` exactly when the product is `Top`.
pub fn triple_case(s1: &Signature, s2: &Signature, s3: &Signature) -> Option<TripleCase> {
    let a12 = align(s1, s2)?;
    let a23 = align(s2, s3)?;
    match (&a12.lifted, &a23.lifted) {
        // s2 untouched on both sides.
        (Lift::None | Lift::Left(_), Lift::None | Lift::Right(_)) => {
            let ok = a12.left.strictly_compatible(s2) && s2.strictly_compatible(&a23.right);
            ok.then(|| TripleCase::OuterLifted {
                s1: a12.left.clone(),
                s3: a23.right.clone(),
            })
        }
        // s2 lifted by the right neighbour only: s1 must lift to meet s2'.
        (Lift::None | Lift::Left(_), Lift::Left(_)) => {
            let s2p = a23.left.clone();
            let s1p = a12.left.clone();
            let ok = s1p.strictly_compatible(s2) && s2p.strictly_compatible(s3);
            ok.then_some(TripleCase::LeftThenMiddle { s1: s1p, s2: s2p })
        }
        // s2 lifted by the left neighbour only.
        (Lift::Right(_), Lift::None | Lift::Right(_)) => {
            let s2p = a12.right.clone();
            let s3p = a23.right.clone();
            let ok = s2.strictly_compatible(&s3p) && s1.strictly_compatible(&s2p);
            ok.then_some(TripleCase::RightThenMiddle { s3: s3p, s2: s2p })
        }
        // s2 lifted on both sides; the lifts are nested.
        (Lift::Right(u), Lift::Left(v)) => {
            let left = a12.right.clone();
            let right = a23.left.clone();
            if u.len() <= v.len() && v.starts_with(u) {
                let ok = s1.strictly_compatible(&left) && right.strictly_compatible(s3);
                ok.then_some(TripleCase::MiddleLeftFirst {
                    inner: left,
                    outer: right,
                })
            } else if u.starts_with(v) {
                let ok = s1.strictly_compatible(&left) && right.strictly_compatible(s3);
                ok.then_some(TripleCase::MiddleRightFirst {
                    inner: right,
                    outer: left,
                })
            } else {
                None
            }
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}", self.0)
    }
}

/// The join-semiring completion: stack signatures plus a least element.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SigLattice {
    Bottom,
    Sig(StackSignature),
}

impl SigLattice {
    pub fn one() -> Self {
        SigLattice::Sig(StackSignature::unit())
    }

    pub fn leq(&self, other: &SigLattice) -> bool {
        match (self, other) {
            (SigLattice::Bottom, _) => true,
            (SigLattice::Sig(_), SigLattice::Bottom) => false,
            (SigLattice::Sig(a), SigLattice::Sig(b)) => a.leq(b),
        }
    }

    pub fn join(&self, other: &SigLattice) -> SigLattice {
        match (self, other) {
            (SigLattice::Bottom, x) | (x, SigLattice::Bottom) => x.clone(),
            (SigLattice::Sig(a), SigLattice::Sig(b)) => SigLattice::Sig(a.join(b)),
        }
    }

    pub fn mul(&self, other: &SigLattice) -> SigLattice {
        match (self, other) {
            (SigLattice::Sig(a), SigLattice::Sig(b)) => SigLattice::Sig(a.mul(b)),
            _ => SigLattice::Bottom,
        }
    }
}

/// All proper signatures with `|pop| + |push| ≤ max_size` over `symbols` letters.
pub fn enumerate_signatures(symbols: usize, max_size: usize) -> Vec<Signature> {
    let words: Vec<Vec<Word>> = (0..=max_size).map(|n| words_of_len(symbols, n)).collect();
    let mut out = Vec::new();
    for total in 0..=max_size {
        for pop_len in 0..=total {
            for pop in &words[pop_len] {
                for push in &words[total - pop_len] {
                    out.push(Signature::new(pop.clone(), push.clone()));
                }
            }
        }
    }
    out
}

/// All words of exactly length `len` in lexicographic order.
pub fn words_of_len(symbols: usize, len: usize) -> Vec<Word> {
    let mut out = vec![Word::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..symbols as u32).map(move |s| {
                    let mut w = w.clone();
                    w.push(Symbol(s));
                    w
                })
            })
            .collect();
    }
    out
}
