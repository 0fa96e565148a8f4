//! Randomized checker for the algebraic laws of weight structures, indexed
//! semirings, and ordinary semirings.

use std::collections::BTreeSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{
    render_index, render_numbered, FlatWeight, IndexedSemiring, Lifted, LiftedSemiring, Semiring, WeightStructure,
};
use crate::signatures::{enumerate_signatures, Signature, StackSignature, Symbol, Word};

pub type SampleRng = ChaCha8Rng;

/// Random value generation for a weight structure.
pub trait StructureSampler: WeightStructure {
    /// Number of stack symbols used when drawing signatures.
    fn sample_symbols(&self) -> usize;

    /// Longest word drawn for a signature component.
    fn sample_max_len(&self) -> usize {
        2
    }

    fn sample(&self, sig: &Signature, rng: &mut SampleRng) -> Self::Value;
}

/// Random value generation for an indexed semiring.
pub trait IndexedSampler: IndexedSemiring {
    fn sample_symbols(&self) -> usize;

    fn sample_max_len(&self) -> usize {
        2
    }

    fn sample(&self, idx: &StackSignature, rng: &mut SampleRng) -> Self::Value;
}

impl<W: StructureSampler> IndexedSampler for LiftedSemiring<W> {
    fn sample_symbols(&self) -> usize {
        self.structure().sample_symbols()
    }

    fn sample_max_len(&self) -> usize {
        self.structure().sample_max_len()
    }

    fn sample(&self, idx: &StackSignature, rng: &mut SampleRng) -> Self::Value {
        match idx {
            StackSignature::Top => Lifted::Bullet,
            StackSignature::Proper(s) => Lifted::Val(self.structure().sample(s, rng)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LawStatus {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Serialize)]
pub struct LawRecord {
    pub name: String,
    pub law: String,
    pub status: LawStatus,
    pub checked: usize,
    pub failures: usize,
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub failing_shapes: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LawReport {
    pub subject: String,
    pub samples: usize,
    pub seed: u64,
    pub laws: Vec<LawRecord>,
}

impl LawReport {
    pub fn passed(&self) -> bool {
        self.laws.iter().all(|l| l.status == LawStatus::Pass)
    }

    pub fn law(&self, name: &str) -> Option<&LawRecord> {
        self.laws.iter().find(|l| l.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &LawRecord> {
        self.laws.iter().filter(|l| l.status == LawStatus::Fail)
    }
}

impl fmt::Display for LawReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} ({} samples, seed {})", self.subject, self.samples, self.seed)?;
        for l in &self.laws {
            let status = match l.status {
                LawStatus::Pass => "pass",
                LawStatus::Fail => "FAIL",
            };
            write!(f, "  {status:4} {:28} {}/{} ", l.name, l.checked - l.failures, l.checked)?;
            writeln!(f, "  {}", l.law)?;
            if let Some(w) = &l.witness {
                writeln!(f, "       witness: {w}")?;
            }
        }
        Ok(())
    }
}

const MAX_SHAPES: usize = 64;

struct Tally {
    name: &'static str,
    law: &'static str,
    checked: usize,
    failures: usize,
    witness: Option<(usize, String)>,
    shapes: BTreeSet<String>,
}

#[derive(Default)]
struct Book {
    tallies: Vec<Tally>,
}

impl Book {
    fn declare(&mut self, name: &'static str, law: &'static str) {
        self.tallies.push(Tally {
            name,
            law,
            checked: 0,
            failures: 0,
            witness: None,
            shapes: BTreeSet::new(),
        });
    }

    /// Records one check; `detail` is only evaluated on failure and yields
    /// (size, witness, shape).
    fn check(&mut self, name: &str, ok: bool, detail: impl FnOnce() -> (usize, String, String)) {
        let t = self
            .tallies
            .iter_mut()
            .find(|t| t.name == name)
            .unwrap_or_else(|| panic!("undeclared law {name}"));
        t.checked += 1;
        if ok {
            return;
        }
        t.failures += 1;
        let (size, witness, shape) = detail();
        if t.shapes.len() < MAX_SHAPES {
            t.shapes.insert(shape);
        }
        let better = match &t.witness {
            None => true,
            Some((s, w)) => (size, witness.len()) < (*s, w.len()),
        };
        if better {
            t.witness = Some((size, witness));
        }
    }

    fn finish(self, subject: String, samples: usize, seed: u64) -> LawReport {
        let laws = self
            .tallies
            .into_iter()
            .map(|t| LawRecord {
                name: t.name.to_string(),
                law: t.law.to_string(),
                status: if t.failures == 0 { LawStatus::Pass } else { LawStatus::Fail },
                checked: t.checked,
                failures: t.failures,
                witness: t.witness.map(|(_, w)| w),
                failing_shapes: t.shapes.into_iter().collect(),
            })
            .collect();
        LawReport { subject, samples, seed, laws }
    }
}

fn random_word(rng: &mut SampleRng, symbols: usize, max_len: usize) -> Word {
    let len = rng.gen_range(0..=max_len);
    (0..len).map(|_| Symbol(rng.gen_range(0..symbols) as u32)).collect()
}

fn random_signature(rng: &mut SampleRng, symbols: usize, max_len: usize) -> Signature {
    Signature::new(random_word(rng, symbols, max_len), random_word(rng, symbols, max_len))
}

fn sig_size(s: &Signature) -> usize {
    s.size()
}

fn idx_size(s: &StackSignature) -> usize {
    s.as_proper().map(sig_size).unwrap_or(0)
}

fn rs(s: &Signature) -> String {
    render_index(&StackSignature::Proper(s.clone()))
}

/// Which signatures index the sampled operands of an indexed semiring.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexFamily {
    /// Every proper signature plus Top.
    All,
    /// Only popping signatures `w/ε`; closed under multiplication.
    Popping,
}

fn ws_laws(book: &mut Book) {
    for (n, l) in [
        ("add-commutative", "a ⊕ b = b ⊕ a"),
        ("add-associative", "(a ⊕ b) ⊕ c = a ⊕ (b ⊕ c)"),
        ("add-idempotent", "a ⊕ a = a"),
        ("add-zero", "a ⊕ 0 = a"),
        ("smul-associative", "(a ⊙ b) ⊙ c = a ⊙ (b ⊙ c)"),
        ("unit-left", "1 ⊙ b = b"),
        ("unit-right", "a ⊙ 1 = a"),
        ("zero-left", "0 ⊙ b = 0"),
        ("zero-right", "a ⊙ 0 = 0"),
        ("distrib-left", "a ⊙ (b ⊕ c) = a ⊙ b ⊕ a ⊙ c"),
        ("distrib-right", "(a ⊕ b) ⊙ c = a ⊙ c ⊕ b ⊙ c"),
        ("ext-identity", "ext[σ,σ](a) = a"),
        ("ext-composition", "ext[σ',σ''](ext[σ,σ'](a)) = ext[σ,σ''](a)"),
        ("ext-zero", "ext(0) = 0"),
        ("ext-additive", "ext(a ⊕ b) = ext(a) ⊕ ext(b)"),
        ("ext-multiplicative", "ext(a ⊙ b) = ext(a) ⊙ ext(b)"),
        ("ext-unit", "ext(1) = 1"),
        ("ext-monotone", "a ⊑ b implies ext(a) ⊑ ext(b)"),
        ("typed-results", "every result inhabits its index"),
    ] {
        book.declare(n, l);
    }
}

/// Checks every weight-structure law on `samples` random instances.
pub fn structure_law_suite<W: StructureSampler>(ws: &W, samples: usize, seed: u64) -> LawReport {
    let mut rng = SampleRng::seed_from_u64(seed);
    let mut book = Book::default();
    ws_laws(&mut book);
    let k = ws.sample_symbols();
    let l = ws.sample_max_len();
    let small = enumerate_signatures(k, 2);
    let r = |a: &W::Value| ws.render(a);

    for i in 0..samples {
        let s = if i < small.len() {
            small[i].clone()
        } else {
            random_signature(&mut rng, k, l)
        };
        let (a, b, c) = (ws.sample(&s, &mut rng), ws.sample(&s, &mut rng), ws.sample(&s, &mut rng));
        let eq = |x: &W::Value, y: &W::Value| ws.equal(&s, x, y);
        let wit = |txt: String| (sig_size(&s), format!("σ={} {}", rs(&s), txt), rs(&s));

        let ab = ws.add(&s, &a, &b);
        let ba = ws.add(&s, &b, &a);
        book.check("add-commutative", eq(&ab, &ba), || {
            wit(format!("a={} b={}", r(&a), r(&b)))
        });
        let l1 = ws.add(&s, &ab, &c);
        let r1 = ws.add(&s, &a, &ws.add(&s, &b, &c));
        book.check("add-associative", eq(&l1, &r1), || {
            wit(format!("a={} b={} c={}", r(&a), r(&b), r(&c)))
        });
        book.check("add-idempotent", eq(&ws.add(&s, &a, &a), &a), || wit(format!("a={}", r(&a))));
        book.check("add-zero", eq(&ws.add(&s, &a, &ws.zero(&s)), &a), || {
            wit(format!("a={}", r(&a)))
        });
        book.check("typed-results", ws.contains(&s, &ab) && ws.contains(&s, &ws.zero(&s)), || {
            wit(format!("a⊕b={}", r(&ab)))
        });

        // strictly compatible chain s1 ∥ s2 ∥ s3
        let u0 = random_word(&mut rng, k, l);
        let u1 = random_word(&mut rng, k, l);
        let u2 = random_word(&mut rng, k, l);
        let u3 = random_word(&mut rng, k, l);
        let s1 = Signature::new(u0.clone(), u1.clone());
        let s2 = Signature::new(u1.clone(), u2.clone());
        let s3 = Signature::new(u2.clone(), u3.clone());
        let s12 = Signature::new(u0.clone(), u2.clone());
        let s23 = Signature::new(u1.clone(), u3.clone());
        let s13 = Signature::new(u0.clone(), u3.clone());
        let x = ws.sample(&s1, &mut rng);
        let y = ws.sample(&s2, &mut rng);
        let y2 = ws.sample(&s2, &mut rng);
        let z = ws.sample(&s3, &mut rng);
        let chain = |txt: String| {
            (
                sig_size(&s1) + sig_size(&s2) + sig_size(&s3),
                format!("σ1={} σ2={} σ3={} {}", rs(&s1), rs(&s2), rs(&s3), txt),
                format!("{} {} {}", rs(&s1), rs(&s2), rs(&s3)),
            )
        };
        let xy = ws.smul(&s1, &s2, &x, &y);
        let lhs = ws.smul(&s12, &s3, &xy, &z);
        let rhs = ws.smul(&s1, &s23, &x, &ws.smul(&s2, &s3, &y, &z));
        book.check("smul-associative", ws.equal(&s13, &lhs, &rhs), || {
            chain(format!("a={} b={} c={}", r(&x), r(&y), r(&z)))
        });
        book.check("typed-results", ws.contains(&s12, &xy), || {
            chain(format!("a⊙b={}", r(&xy)))
        });

        let xl = ws.smul(&s1, &s2, &x, &ws.add(&s2, &y, &y2));
        let xr = ws.add(&s12, &xy, &ws.smul(&s1, &s2, &x, &y2));
        book.check("distrib-left", ws.equal(&s12, &xl, &xr), || {
            chain(format!("a={} b={} c={}", r(&x), r(&y), r(&y2)))
        });
        let x2 = ws.sample(&s1, &mut rng);
        let dl = ws.smul(&s1, &s2, &ws.add(&s1, &x, &x2), &y);
        let dr = ws.add(&s12, &xy, &ws.smul(&s1, &s2, &x2, &y));
        book.check("distrib-right", ws.equal(&s12, &dl, &dr), || {
            chain(format!("a={} b={} c={}", r(&x), r(&x2), r(&y)))
        });
        let z1 = ws.smul(&s1, &s2, &ws.zero(&s1), &y);
        book.check("zero-left", ws.equal(&s12, &z1, &ws.zero(&s12)), || {
            chain(format!("b={}", r(&y)))
        });
        let z2 = ws.smul(&s1, &s2, &x, &ws.zero(&s2));
        book.check("zero-right", ws.equal(&s12, &z2, &ws.zero(&s12)), || {
            chain(format!("a={}", r(&x)))
        });

        // units: balanced index u1/u1 between s1 = u0/u1 and u1/u2
        let bal = Signature::new(u1.clone(), u1.clone());
        let one = ws.unit(&bal);
        let ul = ws.smul(&bal, &s2, &one, &y);
        book.check("unit-left", ws.equal(&s2, &ul, &y), || {
            chain(format!("b={} 1⊙b={}", r(&y), r(&ul)))
        });
        let ur = ws.smul(&s1, &bal, &x, &one);
        book.check("unit-right", ws.equal(&s1, &ur, &x), || {
            chain(format!("a={} a⊙1={}", r(&x), r(&ur)))
        });
        book.check("typed-results", ws.contains(&bal, &one), || {
            chain(format!("1={}", r(&one)))
        });

        // conversions
        let v = random_word(&mut rng, k, l);
        let v2 = random_word(&mut rng, k, l);
        let ext_wit = |txt: String| {
            (
                sig_size(&s) + v.len() + v2.len(),
                format!("σ={} w={} w'={} {}", rs(&s), render_numbered(&v), render_numbered(&v2), txt),
                rs(&s),
            )
        };
        book.check("ext-identity", eq(&ws.ext(&s, &[], &a), &a), || ext_wit(format!("a={}", r(&a))));
        let sv = s.extend(&v);
        let svv = sv.extend(&v2);
        let vv: Word = v.iter().chain(v2.iter()).copied().collect();
        let ea = ws.ext(&s, &v, &a);
        let step = ws.ext(&sv, &v2, &ea);
        let direct = ws.ext(&s, &vv, &a);
        book.check("ext-composition", ws.equal(&svv, &step, &direct), || {
            ext_wit(format!("a={} stepwise={} direct={}", r(&a), r(&step), r(&direct)))
        });
        book.check("typed-results", ws.contains(&sv, &ea), || {
            ext_wit(format!("ext(a)={}", r(&ea)))
        });
        book.check("ext-zero", ws.equal(&sv, &ws.ext(&s, &v, &ws.zero(&s)), &ws.zero(&sv)), || {
            ext_wit(String::new())
        });
        let eb = ws.ext(&s, &v, &b);
        let esum = ws.ext(&s, &v, &ab);
        book.check("ext-additive", ws.equal(&sv, &esum, &ws.add(&sv, &ea, &eb)), || {
            ext_wit(format!("a={} b={}", r(&a), r(&b)))
        });
        if eq(&ab, &b) {
            book.check("ext-monotone", ws.equal(&sv, &ws.add(&sv, &ea, &eb), &eb), || {
                ext_wit(format!("a={} b={}", r(&a), r(&b)))
            });
        }
        let s1v = s1.extend(&v);
        let s2v = s2.extend(&v);
        let s12v = s12.extend(&v);
        let lhs = ws.ext(&s12, &v, &xy);
        let rhs = ws.smul(&s1v, &s2v, &ws.ext(&s1, &v, &x), &ws.ext(&s2, &v, &y));
        book.check("ext-multiplicative", ws.equal(&s12v, &lhs, &rhs), || {
            chain(format!("w={} a={} b={}", render_numbered(&v), r(&x), r(&y)))
        });
        let balv = bal.extend(&v);
        book.check("ext-unit", ws.equal(&balv, &ws.ext(&bal, &v, &one), &ws.unit(&balv)), || {
            ext_wit(format!("σ1={}", rs(&bal)))
        });
    }
    book.finish(ws.name(), samples, seed)
}

fn draw_index(rng: &mut SampleRng, family: IndexFamily, k: usize, l: usize) -> StackSignature {
    match family {
        IndexFamily::All => {
            if rng.gen_ratio(1, 20) {
                StackSignature::Top
            } else {
                StackSignature::Proper(random_signature(rng, k, l))
            }
        }
        IndexFamily::Popping => StackSignature::Proper(Signature::popping(random_word(rng, k, l))),
    }
}

fn draw_above(rng: &mut SampleRng, idx: &StackSignature, family: IndexFamily, k: usize, l: usize) -> StackSignature {
    match idx {
        StackSignature::Top => StackSignature::Top,
        StackSignature::Proper(s) => {
            if family == IndexFamily::All && rng.gen_ratio(1, 10) {
                StackSignature::Top
            } else if family == IndexFamily::Popping {
                // w/ε only extends to itself inside the popping family
                idx.clone()
            } else {
                StackSignature::Proper(s.extend(&random_word(rng, k, l)))
            }
        }
    }
}

fn is_laws(book: &mut Book) {
    for (n, l) in [
        ("add-commutative", "a ⊕ b = b ⊕ a"),
        ("add-associative", "(a ⊕ b) ⊕ c = a ⊕ (b ⊕ c)"),
        ("add-idempotent", "a ⊕ a = a"),
        ("add-zero", "a ⊕ 0 = a"),
        ("mul-associative", "(a ⊗ b) ⊗ c = a ⊗ (b ⊗ c)"),
        ("one-left", "1 ⊗ b = b"),
        ("one-right", "a ⊗ 1 = a"),
        ("zero-left", "0 ⊗ b = 0"),
        ("zero-right", "a ⊗ 0 = 0"),
        ("distrib-left", "a ⊗ (b ⊕ c) = a ⊗ b ⊕ a ⊗ c"),
        ("distrib-right", "(a ⊕ b) ⊗ c = a ⊗ c ⊕ b ⊗ c"),
        ("convert-identity", "ext[σ,σ](a) = a"),
        ("convert-composition", "ext[σ',σ''](ext[σ,σ'](a)) = ext[σ,σ''](a)"),
        ("convert-zero", "ext(0) = 0"),
        ("convert-additive", "ext(a ⊕ b) = ext(a) ⊕ ext(b)"),
        ("convert-multiplicative", "ext[σ1σ2,σ1'σ2'](a ⊗ b) = ext(a) ⊗ ext(b)"),
        ("convert-exchange-left", "ext[σ1σ2,σ1'σ2](a ⊗ b) = ext(a) ⊗ b when σ1'σ2 ≠ TOP"),
        ("convert-exchange-right", "ext[σ1σ2,σ1σ2'](a ⊗ b) = a ⊗ ext(b) when σ1σ2' ≠ TOP"),
        ("convert-monotone", "a ⊑ b implies ext(a) ⊑ ext(b)"),
        ("typed-results", "every result inhabits its index"),
    ] {
        book.declare(n, l);
    }
}

/// Checks the indexed-semiring and conversion laws on `samples` random instances.
pub fn indexed_law_suite<S: IndexedSampler>(
    s: &S,
    family: IndexFamily,
    samples: usize,
    seed: u64,
) -> LawReport {
    let mut rng = SampleRng::seed_from_u64(seed);
    let mut book = Book::default();
    is_laws(&mut book);
    let k = s.sample_symbols();
    let l = s.sample_max_len();
    let r = |a: &S::Value| s.render(a);
    let ri = render_index;

    for _ in 0..samples {
        let i1 = draw_index(&mut rng, family, k, l);
        let i2 = draw_index(&mut rng, family, k, l);
        let i3 = draw_index(&mut rng, family, k, l);
        let (a, a2) = (s.sample(&i1, &mut rng), s.sample(&i1, &mut rng));
        let (b, b2) = (s.sample(&i2, &mut rng), s.sample(&i2, &mut rng));
        let c = s.sample(&i3, &mut rng);
        let i12 = i1.mul(&i2);
        let i23 = i2.mul(&i3);
        let i123 = i12.mul(&i3);
        let sz = idx_size(&i1) + idx_size(&i2) + idx_size(&i3);
        let wit = |txt: String| {
            (
                sz,
                format!("σ1={} σ2={} σ3={} {}", ri(&i1), ri(&i2), ri(&i3), txt),
                format!("{} {} {}", ri(&i1), ri(&i2), ri(&i3)),
            )
        };

        let aa = s.add(&i1, &a, &a2);
        book.check("add-commutative", s.equal(&i1, &aa, &s.add(&i1, &a2, &a)), || {
            wit(format!("a={} b={}", r(&a), r(&a2)))
        });
        let a3 = s.sample(&i1, &mut rng);
        let l1 = s.add(&i1, &aa, &a3);
        let r1 = s.add(&i1, &a, &s.add(&i1, &a2, &a3));
        book.check("add-associative", s.equal(&i1, &l1, &r1), || {
            wit(format!("a={} b={} c={}", r(&a), r(&a2), r(&a3)))
        });
        book.check("add-idempotent", s.equal(&i1, &s.add(&i1, &a, &a), &a), || {
            wit(format!("a={}", r(&a)))
        });
        book.check("add-zero", s.equal(&i1, &s.add(&i1, &a, &s.zero(&i1)), &a), || {
            wit(format!("a={}", r(&a)))
        });

        let ab = s.mul(&i1, &i2, &a, &b);
        book.check("typed-results", s.contains(&i12, &ab) && s.contains(&i1, &aa), || {
            wit(format!("a={} b={} a⊗b={}", r(&a), r(&b), r(&ab)))
        });
        let lhs = s.mul(&i12, &i3, &ab, &c);
        let rhs = s.mul(&i1, &i23, &a, &s.mul(&i2, &i3, &b, &c));
        book.check("mul-associative", s.equal(&i123, &lhs, &rhs), || {
            wit(format!("a={} b={} c={} left={} right={}", r(&a), r(&b), r(&c), r(&lhs), r(&rhs)))
        });

        let unit = StackSignature::unit();
        let one = s.one();
        book.check("one-left", s.equal(&i2, &s.mul(&unit, &i2, &one, &b), &b), || {
            wit(format!("b={}", r(&b)))
        });
        book.check("one-right", s.equal(&i1, &s.mul(&i1, &unit, &a, &one), &a), || {
            wit(format!("a={}", r(&a)))
        });
        book.check("zero-left", s.equal(&i12, &s.mul(&i1, &i2, &s.zero(&i1), &b), &s.zero(&i12)), || {
            wit(format!("b={}", r(&b)))
        });
        book.check("zero-right", s.equal(&i12, &s.mul(&i1, &i2, &a, &s.zero(&i2)), &s.zero(&i12)), || {
            wit(format!("a={}", r(&a)))
        });

        let dl = s.mul(&i1, &i2, &a, &s.add(&i2, &b, &b2));
        let dr = s.add(&i12, &ab, &s.mul(&i1, &i2, &a, &b2));
        book.check("distrib-left", s.equal(&i12, &dl, &dr), || {
            wit(format!("a={} b={} c={}", r(&a), r(&b), r(&b2)))
        });
        let el = s.mul(&i1, &i2, &aa, &b);
        let er = s.add(&i12, &ab, &s.mul(&i1, &i2, &a2, &b));
        book.check("distrib-right", s.equal(&i12, &el, &er), || {
            wit(format!("a={} b={} c={}", r(&a), r(&a2), r(&b)))
        });

        // conversions along i1 ≤ j1 ≤ h1 and i2 ≤ j2
        let j1 = draw_above(&mut rng, &i1, family, k, l);
        let h1 = draw_above(&mut rng, &j1, family, k, l);
        let j2 = draw_above(&mut rng, &i2, family, k, l);
        let cw = |txt: String| {
            (
                idx_size(&i1) + idx_size(&j1) + idx_size(&h1),
                format!("σ={} σ'={} σ''={} {}", ri(&i1), ri(&j1), ri(&h1), txt),
                format!("{} {} {}", ri(&i1), ri(&j1), ri(&h1)),
            )
        };
        if i1.is_top() {
            continue;
        }
        book.check("convert-identity", s.equal(&i1, &s.convert(&i1, &i1, &a), &a), || {
            cw(format!("a={}", r(&a)))
        });
        let ca = s.convert(&i1, &j1, &a);
        book.check("typed-results", s.contains(&j1, &ca), || cw(format!("ext(a)={}", r(&ca))));
        let step = if j1.is_top() { s.zero(&h1) } else { s.convert(&j1, &h1, &ca) };
        book.check("convert-composition", s.equal(&h1, &step, &s.convert(&i1, &h1, &a)), || {
            cw(format!("a={}", r(&a)))
        });
        book.check("convert-zero", s.equal(&j1, &s.convert(&i1, &j1, &s.zero(&i1)), &s.zero(&j1)), || {
            cw(String::new())
        });
        let ca2 = s.convert(&i1, &j1, &a2);
        book.check("convert-additive", s.equal(&j1, &s.convert(&i1, &j1, &aa), &s.add(&j1, &ca, &ca2)), || {
            cw(format!("a={} b={}", r(&a), r(&a2)))
        });
        if s.below(&i1, &a, &a2) {
            book.check("convert-monotone", s.below(&j1, &ca, &ca2), || {
                cw(format!("a={} b={}", r(&a), r(&a2)))
            });
        }
        if i2.is_top() {
            continue;
        }
        let j12 = j1.mul(&j2);
        let lhs = s.convert(&i12, &j12, &ab);
        let rhs = s.mul(&j1, &j2, &ca, &s.convert(&i2, &j2, &b));
        book.check("convert-multiplicative", s.equal(&j12, &lhs, &rhs), || {
            wit(format!("σ1'={} σ2'={} a={} b={}", ri(&j1), ri(&j2), r(&a), r(&b)))
        });
        let j1i2 = j1.mul(&i2);
        if !j1i2.is_top() {
            let lhs = s.convert(&i12, &j1i2, &ab);
            let rhs = s.mul(&j1, &i2, &ca, &b);
            book.check("convert-exchange-left", s.equal(&j1i2, &lhs, &rhs), || {
                wit(format!("σ1'={} a={} b={}", ri(&j1), r(&a), r(&b)))
            });
        }
        let i1j2 = i1.mul(&j2);
        if !i1j2.is_top() {
            let lhs = s.convert(&i12, &i1j2, &ab);
            let rhs = s.mul(&i1, &j2, &a, &s.convert(&i2, &j2, &b));
            book.check("convert-exchange-right", s.equal(&i1j2, &lhs, &rhs), || {
                wit(format!("σ2'={} a={} b={}", ri(&j2), r(&a), r(&b)))
            });
        }
    }
    let suffix = match family {
        IndexFamily::All => "",
        IndexFamily::Popping => " restricted to w/ε",
    };
    book.finish(format!("{}{}", s.name(), suffix), samples, seed)
}

/// Draws elements of a flattened semiring: `⊥`, Top-tagged `•`, or a
/// value tagged with a small signature.
pub fn sample_flat<S: IndexedSampler>(s: &S, rng: &mut SampleRng) -> FlatWeight<S::Value> {
    let k = s.sample_symbols();
    let pool = enumerate_signatures(k.min(2), 2);
    match rng.gen_range(0..20) {
        0 | 1 => FlatWeight::Bot,
        2 => FlatWeight::Tagged(StackSignature::Top, s.zero(&StackSignature::Top)),
        _ => {
            let idx = StackSignature::Proper(pool[rng.gen_range(0..pool.len())].clone());
            let v = s.sample(&idx, rng);
            FlatWeight::Tagged(idx, v)
        }
    }
}

fn flat_shape<V>(xs: &[&FlatWeight<V>]) -> String {
    xs.iter()
        .map(|x| match x {
            FlatWeight::Bot => "⊥".to_string(),
            FlatWeight::Tagged(i, _) => render_index(i),
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn flat_size<V>(xs: &[&FlatWeight<V>]) -> usize {
    xs.iter()
        .map(|x| match x {
            FlatWeight::Bot => 0,
            FlatWeight::Tagged(i, _) => idx_size(i),
        })
        .sum()
}

/// Checks the ordinary semiring laws of a flattened carrier.
pub fn semiring_law_suite<R, S>(sr: &R, inner: &S, samples: usize, seed: u64) -> LawReport
where
    S: IndexedSampler,
    R: Semiring<Elem = FlatWeight<S::Value>>,
{
    let mut rng = SampleRng::seed_from_u64(seed);
    let mut book = Book::default();
    for (n, l) in [
        ("add-commutative", "a ⊕ b = b ⊕ a"),
        ("add-associative", "(a ⊕ b) ⊕ c = a ⊕ (b ⊕ c)"),
        ("add-idempotent", "a ⊕ a = a"),
        ("add-zero", "a ⊕ ⊥ = a"),
        ("mul-associative", "(a ⊗ b) ⊗ c = a ⊗ (b ⊗ c)"),
        ("one-left", "1 ⊗ a = a"),
        ("one-right", "a ⊗ 1 = a"),
        ("zero-left", "⊥ ⊗ a = ⊥"),
        ("zero-right", "a ⊗ ⊥ = ⊥"),
        ("distrib-left", "a ⊗ (b ⊕ c) = a ⊗ b ⊕ a ⊗ c"),
        ("distrib-right", "(a ⊕ b) ⊗ c = a ⊗ c ⊕ b ⊗ c"),
    ] {
        book.declare(n, l);
    }
    let r = |x: &FlatWeight<S::Value>| sr.render(x);
    for _ in 0..samples {
        let a = sample_flat(inner, &mut rng);
        let b = sample_flat(inner, &mut rng);
        let c = sample_flat(inner, &mut rng);
        let wit = |xs: &[&FlatWeight<S::Value>]| {
            (
                flat_size(xs),
                xs.iter().map(|x| r(x)).collect::<Vec<_>>().join(", "),
                flat_shape(xs),
            )
        };
        let eq = |x: &FlatWeight<S::Value>, y: &FlatWeight<S::Value>| sr.equal(x, y);
        book.check("add-commutative", eq(&sr.add(&a, &b), &sr.add(&b, &a)), || wit(&[&a, &b]));
        book.check(
            "add-associative",
            eq(&sr.add(&sr.add(&a, &b), &c), &sr.add(&a, &sr.add(&b, &c))),
            || wit(&[&a, &b, &c]),
        );
        book.check("add-idempotent", eq(&sr.add(&a, &a), &a), || wit(&[&a]));
        book.check("add-zero", eq(&sr.add(&a, &sr.zero()), &a), || wit(&[&a]));
        book.check(
            "mul-associative",
            eq(&sr.mul(&sr.mul(&a, &b), &c), &sr.mul(&a, &sr.mul(&b, &c))),
            || wit(&[&a, &b, &c]),
        );
        book.check("one-left", eq(&sr.mul(&sr.one(), &a), &a), || wit(&[&a]));
        book.check("one-right", eq(&sr.mul(&a, &sr.one()), &a), || wit(&[&a]));
        book.check("zero-left", eq(&sr.mul(&sr.zero(), &a), &sr.zero()), || wit(&[&a]));
        book.check("zero-right", eq(&sr.mul(&a, &sr.zero()), &sr.zero()), || wit(&[&a]));
        book.check(
            "distrib-left",
            eq(&sr.mul(&a, &sr.add(&b, &c)), &sr.add(&sr.mul(&a, &b), &sr.mul(&a, &c))),
            || wit(&[&a, &b, &c]),
        );
        book.check(
            "distrib-right",
            eq(&sr.mul(&sr.add(&a, &b), &c), &sr.add(&sr.mul(&a, &c), &sr.mul(&b, &c))),
            || wit(&[&a, &b, &c]),
        );
    }
    book.finish(sr.name(), samples, seed)
}
