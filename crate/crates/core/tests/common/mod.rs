#![allow(dead_code)]

//! Reference procedures and random generators shared by the integration
//! tests. None of them goes through saturation or the weight structures.

use std::collections::{BTreeSet, HashSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sigpds::domains::conditional::{CondPds, CondRule};
use sigpds::domains::trpds::{TrPds, TrRule};
use sigpds::domains::wspds::{WsConfig, Wspds};
use sigpds::reglang::{Dfa, Transduction};
use sigpds::signatures::{Alphabet, Symbol, Word};
use sigpds::wpds::{Config, Pds, PlainRule};
use sigpds::wqo::Wqo;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn state_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("p{i}")).collect()
}

fn random_word(rng: &mut ChaCha8Rng, symbols: usize, max_len: usize) -> Word {
    let n = rng.gen_range(0..=max_len);
    (0..n).map(|_| Symbol(rng.gen_range(0..symbols as u32))).collect()
}

/// A random unweighted system with at most `max_states` states, `max_symbols`
/// letters and `max_rules` rules pushing at most two letters.
pub fn random_pds(rng: &mut ChaCha8Rng, max_states: usize, max_symbols: usize, max_rules: usize) -> Pds {
    let n = rng.gen_range(1..=max_states);
    let k = rng.gen_range(1..=max_symbols);
    let count = rng.gen_range(1..=max_rules);
    let mut rules = BTreeSet::new();
    for _ in 0..count {
        rules.insert(PlainRule {
            from: rng.gen_range(0..n as u32),
            pop: Symbol(rng.gen_range(0..k as u32)),
            to: rng.gen_range(0..n as u32),
            push: random_word(rng, k, 2),
        });
    }
    Pds { states: state_names(n), alphabet: Alphabet::numbered(k), rules: rules.into_iter().collect() }
}

/// All words over `symbols` letters of length at most `max_len`.
pub fn words_up_to(symbols: usize, max_len: usize) -> Vec<Word> {
    let mut out = vec![vec![]];
    let mut layer: Vec<Word> = vec![vec![]];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|w| {
                (0..symbols as u32).map(move |a| {
                    let mut w = w.clone();
                    w.push(Symbol(a));
                    w
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// Textbook pre* for an unweighted system: a P-automaton for the single
/// configuration `⟨target, word⟩`, saturated by the usual rule until nothing
/// changes.
pub struct ClassicPre {
    trans: HashSet<(usize, Symbol, usize)>,
    last: usize,
}

impl ClassicPre {
    pub fn new(pds: &Pds, target: u32, word: &[Symbol]) -> ClassicPre {
        let n = pds.states.len();
        let mut trans = HashSet::new();
        let mut last = target as usize;
        for (i, &a) in word.iter().enumerate() {
            trans.insert((last, a, n + i));
            last = n + i;
        }
        loop {
            let mut added = false;
            for r in &pds.rules {
                for s in Self::run(&trans, r.to as usize, &r.push) {
                    added |= trans.insert((r.from as usize, r.pop, s));
                }
            }
            if !added {
                break;
            }
        }
        ClassicPre { trans, last }
    }

    fn run(trans: &HashSet<(usize, Symbol, usize)>, from: usize, w: &[Symbol]) -> HashSet<usize> {
        let mut cur: HashSet<usize> = [from].into();
        for &a in w {
            cur = trans.iter().filter(|(p, b, _)| cur.contains(p) && *b == a).map(|t| t.2).collect();
        }
        cur
    }

    /// Whether `⟨p, w⟩` reaches the target configuration.
    pub fn accepts(&self, p: u32, w: &[Symbol]) -> bool {
        Self::run(&self.trans, p as usize, w).contains(&self.last)
    }
}

/// What a bounded search saw.
pub struct Explored<C> {
    pub reached: HashSet<C>,
    /// No configuration was cut off by either bound.
    pub complete: bool,
}

/// Breadth-first search from `start`, not expanding configurations whose
/// stack is longer than `stack_cap` and stopping after `depth_cap` steps.
pub fn bfs<C: Clone + Eq + std::hash::Hash>(
    start: C,
    stack_len: impl Fn(&C) -> usize,
    step: impl Fn(&C) -> Vec<C>,
    stack_cap: usize,
    depth_cap: usize,
) -> Explored<C> {
    let mut reached: HashSet<C> = [start.clone()].into();
    let mut queue = VecDeque::from([(start, 0usize)]);
    let mut complete = true;
    while let Some((c, d)) = queue.pop_front() {
        if stack_len(&c) > stack_cap {
            complete = false;
            continue;
        }
        let next = step(&c);
        if d == depth_cap {
            if next.iter().any(|n| !reached.contains(n)) {
                complete = false;
            }
            continue;
        }
        for n in next {
            if reached.insert(n.clone()) {
                queue.push_back((n, d + 1));
            }
        }
    }
    Explored { reached, complete }
}

pub fn cond_step(pds: &CondPds, c: &Config) -> Vec<Config> {
    let mut out = Vec::new();
    if let Some((&top, rest)) = c.stack.split_first() {
        let rest_ix: Vec<usize> = rest.iter().map(|s| s.0 as usize).collect();
        for r in &pds.rules {
            if r.from == c.state && r.pop == top && r.cond.accepts(&rest_ix) {
                out.push(Config { state: r.to, stack: [r.push.as_slice(), rest].concat() });
            }
        }
    }
    out
}

pub fn tr_step(pds: &TrPds, c: &Config) -> Vec<Config> {
    let mut out = Vec::new();
    if let Some((&top, rest)) = c.stack.split_first() {
        let rest_ix: Vec<usize> = rest.iter().map(|s| s.0 as usize).collect();
        let k = pds.alphabet.len();
        for r in pds.rules.iter().filter(|r| r.from == c.state && r.pop == top) {
            for w in words_up_to(k, rest.len()).into_iter().filter(|w| w.len() == rest.len()) {
                let w_ix: Vec<usize> = w.iter().map(|s| s.0 as usize).collect();
                if r.t.relates(&rest_ix, &w_ix) {
                    out.push(Config { state: r.to, stack: [r.push.as_slice(), &w].concat() });
                }
            }
        }
    }
    out
}

pub fn ws_step<W: Wqo>(sys: &Wspds<W>, c: &WsConfig<W::Elem>) -> Vec<WsConfig<W::Elem>> {
    let mut out = Vec::new();
    if let Some((top, rest)) = c.stack.split_first() {
        for r in sys.rules.iter().filter(|r| r.from == c.state) {
            if let Some(mut stack) = sys.order.apply(&sys.transfers[r.transfer].transfer, top) {
                stack.extend_from_slice(rest);
                out.push(WsConfig { state: r.to, stack });
            }
        }
    }
    out
}

fn random_dfa(rng: &mut ChaCha8Rng, symbols: usize, states: usize) -> Dfa {
    let trans = (0..states * symbols).map(|_| rng.gen_range(0..states as u32)).collect();
    let accept = (0..states).map(|_| rng.gen_bool(0.6)).collect();
    Dfa::new(symbols, trans, 0, accept)
}

/// Up to three states, two letters and six rules. Conditions come from a
/// pool of `Γ*`, `a*`, `b*` and one random two-state automaton, which keeps
/// the closure small.
pub fn random_cond_pds(rng: &mut ChaCha8Rng) -> CondPds {
    let n = rng.gen_range(1..=3);
    let k = 2;
    let pool = [Dfa::universal(k), Dfa::star_of(k, &[0]), Dfa::star_of(k, &[1]), random_dfa(rng, k, 2)];
    let rules = (0..rng.gen_range(1..=6))
        .map(|_| CondRule {
            from: rng.gen_range(0..n as u32),
            pop: Symbol(rng.gen_range(0..k as u32)),
            to: rng.gen_range(0..n as u32),
            push: random_word(rng, k, 2),
            cond: pool[rng.gen_range(0..pool.len())].clone(),
        })
        .collect();
    CondPds { states: state_names(n), alphabet: Alphabet::numbered(k), rules }
}

fn random_letter_map(rng: &mut ChaCha8Rng, k: usize) -> Transduction {
    let table: Vec<Option<usize>> =
        (0..k).map(|_| if rng.gen_bool(0.2) { None } else { Some(rng.gen_range(0..k)) }).collect();
    Transduction::letter_map(k, |a| table[a])
}

/// Up to three states, two letters and six rules rewriting the rest of the
/// stack through identities, letter maps or unions of two letter maps.
pub fn random_tr_pds(rng: &mut ChaCha8Rng) -> TrPds {
    let n = rng.gen_range(1..=3);
    let k = 2;
    let rules = (0..rng.gen_range(1..=6))
        .map(|_| {
            let t = match rng.gen_range(0..3) {
                0 => Transduction::identity(k),
                1 => random_letter_map(rng, k),
                _ => random_letter_map(rng, k).union(&random_letter_map(rng, k)).unwrap(),
            };
            TrRule {
                from: rng.gen_range(0..n as u32),
                pop: Symbol(rng.gen_range(0..k as u32)),
                to: rng.gen_range(0..n as u32),
                push: random_word(rng, k, 2),
                t,
            }
        })
        .collect();
    TrPds { states: state_names(n), alphabet: Alphabet::numbered(k), rules }
}
