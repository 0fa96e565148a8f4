//! Relations between stack contents, the weight domain that turns an
//! ordinary pushdown system into one over the single symbol `#`.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;

use crate::algebra::laws::{SampleRng, StructureSampler};
use crate::algebra::{lift, Lifted, LiftedSemiring, WeightStructure};
use crate::saturation::{delta_from, presaturate, SatError, SaturationOptions, WeightedAutomaton};
use crate::signatures::{words_of_len, Alphabet, Signature, Symbol, Word};
use crate::wpds::{Pds, Rule, State, WeightedPds};

/// A finite relation `R ⊆ Γ^m × Γ^n`.
pub type Relation = BTreeSet<(Word, Word)>;

pub const HASH: Symbol = Symbol(0);

pub fn hash_alphabet() -> Alphabet {
    Alphabet::new(["#"])
}

pub fn hashes(n: usize) -> Word {
    vec![HASH; n]
}

/// `D_{m/n} = 2^{Γ^m × Γ^n}` over the index alphabet `{#}`.
#[derive(Debug, Clone)]
pub struct Relations {
    pub source: Alphabet,
}

impl Relations {
    pub fn new(source: Alphabet) -> Self {
        Relations { source }
    }

    fn tails(&self, j: usize) -> Vec<Word> {
        words_of_len(self.source.len(), j)
    }

    fn render_word(&self, w: &[Symbol]) -> String {
        if w.is_empty() {
            "-".to_string()
        } else {
            w.iter().map(|&s| self.source.name(s)).collect::<Vec<_>>().join(" ")
        }
    }

    fn parse_word(&self, text: &str) -> Option<Word> {
        let text = text.trim();
        if text == "-" || text.is_empty() {
            return Some(vec![]);
        }
        text.split_whitespace().map(|t| self.source.lookup(t)).collect()
    }

    /// Parses `rel:{(γ,w);…}`; the `rel:` prefix is optional.
    pub fn parse(&self, text: &str) -> Option<Relation> {
        let text = text.trim();
        let text = text.strip_prefix("rel:").unwrap_or(text);
        let inner = text.strip_prefix('{')?.strip_suffix('}')?;
        let mut out = Relation::new();
        for item in inner.split(';').map(str::trim).filter(|s| !s.is_empty()) {
            let (l, r) = item.strip_prefix('(')?.strip_suffix(')')?.split_once(',')?;
            out.insert((self.parse_word(l)?, self.parse_word(r)?));
        }
        Some(out)
    }
}

impl WeightStructure for Relations {
    type Value = Relation;

    fn name(&self) -> String {
        "relations".to_string()
    }

    fn contains(&self, sig: &Signature, a: &Relation) -> bool {
        let g = self.source.len() as u32;
        a.iter().all(|(x, y)| {
            x.len() == sig.pop.len()
                && y.len() == sig.push.len()
                && x.iter().chain(y).all(|s| s.0 < g)
        })
    }

    fn zero(&self, _sig: &Signature) -> Relation {
        Relation::new()
    }

    fn unit(&self, sig: &Signature) -> Relation {
        self.tails(sig.pop.len()).into_iter().map(|w| (w.clone(), w)).collect()
    }

    fn add(&self, _sig: &Signature, a: &Relation, b: &Relation) -> Relation {
        a.union(b).cloned().collect()
    }

    fn smul(&self, _l: &Signature, _r: &Signature, a: &Relation, b: &Relation) -> Relation {
        let mut by_mid: BTreeMap<&Word, Vec<&Word>> = BTreeMap::new();
        for (y, z) in b {
            by_mid.entry(y).or_default().push(z);
        }
        let mut out = Relation::new();
        for (x, y) in a {
            for z in by_mid.get(y).into_iter().flatten() {
                out.insert((x.clone(), (*z).clone()));
            }
        }
        out
    }

    fn ext(&self, _sig: &Signature, suffix: &[Symbol], a: &Relation) -> Relation {
        let tails = self.tails(suffix.len());
        let mut out = Relation::new();
        for (x, y) in a {
            for z in &tails {
                let mut xz = x.clone();
                xz.extend_from_slice(z);
                let mut yz = y.clone();
                yz.extend_from_slice(z);
                out.insert((xz, yz));
            }
        }
        out
    }

    fn locally_bounded(&self) -> bool {
        true
    }

    fn render(&self, a: &Relation) -> String {
        let items: Vec<String> = a
            .iter()
            .map(|(x, y)| format!("({},{})", self.render_word(x), self.render_word(y)))
            .collect();
        format!("rel:{{{}}}", items.join(";"))
    }
}

impl StructureSampler for Relations {
    fn sample_symbols(&self) -> usize {
        1
    }

    fn sample(&self, sig: &Signature, rng: &mut SampleRng) -> Relation {
        let xs = self.tails(sig.pop.len());
        let ys = self.tails(sig.push.len());
        let mut out = Relation::new();
        for x in &xs {
            for y in &ys {
                if rng.gen_bool(0.3) {
                    out.insert((x.clone(), y.clone()));
                }
            }
        }
        out
    }
}

pub type RelationPds = WeightedPds<LiftedSemiring<Relations>>;

/// Rule `⟨p, γ, p′, w⟩` becomes `⟨p, #, p′, #^{|w|}, {(γ, w)}⟩`.
pub fn encode_pds_as_relations(pds: &Pds) -> RelationPds {
    let rules = pds
        .rules
        .iter()
        .map(|r| Rule {
            from: r.from,
            pop: HASH,
            to: r.to,
            push: hashes(r.push.len()),
            weight: Lifted::Val(Relation::from([(vec![r.pop], r.push.clone())])),
        })
        .collect();
    WeightedPds::new(lift(Relations::new(pds.alphabet.clone())), pds.states.clone(), hash_alphabet(), rules)
        .expect("encoded rules are well typed")
}

/// Answers `⟨p, w⟩ ⟹* ⟨p′, ε⟩` for many queries from one saturation.
pub struct RelationAnalysis {
    pub encoded: RelationPds,
    pub automaton: WeightedAutomaton<Lifted<Relation>>,
}

impl RelationAnalysis {
    pub fn new(pds: &Pds, opts: &SaturationOptions) -> Result<Self, SatError> {
        let encoded = encode_pds_as_relations(pds);
        let automaton = presaturate(&encoded, opts)?.automaton;
        Ok(RelationAnalysis { encoded, automaton })
    }

    /// `δ(p, #^{|w|}, p′)`.
    pub fn weight(&self, p: State, w: &[Symbol], q: State) -> Relation {
        let ds = delta_from(&self.encoded.semiring, &self.automaton, p, &hashes(w.len()));
        match ds.get(&q) {
            Some(Lifted::Val(r)) => r.clone(),
            _ => Relation::new(),
        }
    }

    pub fn reaches(&self, p: State, w: &[Symbol], q: State) -> bool {
        self.weight(p, w, q).contains(&(w.to_vec(), vec![]))
    }
}
