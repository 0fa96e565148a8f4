//! The textual system format shared by the command line and the bindings.
//!
//! ```text
//! domain minheight
//! states p0 p1
//! alphabet g
//! rule p0 g -> p1 g g h:3
//! rule p1 g -> p1 - h:1
//! ```
//!
//! Other domains add companion blocks closed by `end`: `automaton NAME`
//! and `transduction NAME` hold a textual automaton, `transfer NAME ARITY`
//! lists `x -> y1 y2` lines for a finite order, and `target NAME` holds a
//! weighted automaton in the dump format with `init` and `final` lines.
//! Vector transfers fit on one line:
//! `transfer NAME guard (1,0) push (0,2) (1,1)`.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::algebra::{lift, Lifted, LiftedSemiring};
use crate::domains::conditional::{CondPds, CondRule};
use crate::domains::minheight::{Height, MinHeight};
use crate::domains::trpds::{TrPds, TrRule};
use crate::domains::wspds::{NamedTransfer, WsRule, Wspds};
use crate::reglang::{parse_dfa, Dfa, Transduction};
use crate::signatures::{Alphabet, Symbol, Word};
use crate::wpds::{Pds, PlainRule, Rule, State, WeightedPds};
use crate::wqo::{FiniteOrder, VectorOrder, Wqo};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {msg}")]
pub struct FormatError {
    pub line: usize,
    pub msg: String,
}

fn err<T>(line: usize, msg: impl Into<String>) -> Result<T, FormatError> {
    Err(FormatError { line, msg: msg.into() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    MinHeight,
    Relations,
    Conditional,
    Wspds,
    Trpds,
}

impl Domain {
    pub const ALL: [Domain; 5] =
        [Domain::MinHeight, Domain::Relations, Domain::Conditional, Domain::Wspds, Domain::Trpds];

    pub fn parse(text: &str) -> Option<Domain> {
        Some(match text {
            "minheight" => Domain::MinHeight,
            "relations" => Domain::Relations,
            "conditional" => Domain::Conditional,
            "wspds" => Domain::Wspds,
            "trpds" => Domain::Trpds,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Domain::MinHeight => "minheight",
            Domain::Relations => "relations",
            Domain::Conditional => "conditional",
            Domain::Wspds => "wspds",
            Domain::Trpds => "trpds",
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A weighted automaton from a `target` block, weights still as text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TargetSpec {
    pub line: usize,
    pub states: Vec<String>,
    pub edges: Vec<(String, String, String, String)>,
    pub init: String,
    pub finals: Vec<String>,
}

pub type MinHeightPds = WeightedPds<LiftedSemiring<MinHeight>>;

#[derive(Debug, Clone)]
pub enum System {
    MinHeight(MinHeightPds),
    Relations(Pds),
    Conditional(CondPds),
    Trpds(TrPds),
    WspdsFinite(Wspds<FiniteOrder>),
    WspdsVector(Wspds<VectorOrder>),
}

#[derive(Debug, Clone)]
pub struct SystemFile {
    pub domain: Domain,
    pub system: System,
    pub targets: BTreeMap<String, TargetSpec>,
    /// Automata from `automaton` blocks.
    pub automata: BTreeMap<String, Dfa>,
}

impl SystemFile {
    pub fn states(&self) -> &[String] {
        match &self.system {
            System::MinHeight(p) => &p.states,
            System::Relations(p) => &p.states,
            System::Conditional(p) => &p.states,
            System::Trpds(p) => &p.states,
            System::WspdsFinite(p) => &p.states,
            System::WspdsVector(p) => &p.states,
        }
    }

    pub fn state(&self, name: &str) -> Option<State> {
        self.states().iter().position(|s| s == name).map(|i| i as State)
    }

    /// The stack alphabet of the source system; `None` for WSPDS.
    pub fn alphabet(&self) -> Option<&Alphabet> {
        match &self.system {
            System::MinHeight(p) => Some(&p.alphabet),
            System::Relations(p) => Some(&p.alphabet),
            System::Conditional(p) => Some(&p.alphabet),
            System::Trpds(p) => Some(&p.alphabet),
            _ => None,
        }
    }
}

/// Splits a word on commas and whitespace; `-` alone is `ε`.
pub fn parse_word(alphabet: &Alphabet, text: &str) -> Result<Word, String> {
    let toks: Vec<&str> = text.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()).collect();
    if toks == ["-"] || toks == ["ε"] {
        return Ok(vec![]);
    }
    toks.iter()
        .map(|t| alphabet.lookup(t).ok_or_else(|| format!("unknown stack symbol `{t}`")))
        .collect()
}

/// Splits a stack of order elements on whitespace; `-` alone is `ε`.
pub fn parse_elems<W: Wqo>(order: &W, text: &str) -> Result<Vec<W::Elem>, String> {
    let toks: Vec<&str> = text.split_whitespace().collect();
    if toks == ["-"] || toks == ["ε"] {
        return Ok(vec![]);
    }
    toks.iter()
        .map(|t| order.parse_elem(t).ok_or_else(|| format!("unknown element `{t}`")))
        .collect()
}

pub fn parse_height(text: &str) -> Option<Height> {
    let t = text.trim();
    Height::parse(t.strip_prefix("h:").unwrap_or(t))
}

struct Block {
    kind: String,
    name: String,
    args: Vec<String>,
    line: usize,
    body: Vec<(usize, String)>,
}

impl Block {
    fn text(&self) -> String {
        self.body.iter().map(|(_, l)| format!("{l}\n")).collect()
    }

    fn relocate(&self, e: crate::reglang::RegError) -> FormatError {
        match e {
            crate::reglang::RegError::Parse { line, msg } => {
                let at = self.body.get(line.saturating_sub(1)).map_or(self.line, |(l, _)| *l);
                FormatError { line: at, msg }
            }
            other => FormatError { line: self.line, msg: other.to_string() },
        }
    }
}

struct RawRule {
    line: usize,
    from: String,
    pop: Option<String>,
    to: String,
    push: Vec<String>,
    weight: Option<String>,
}

const PREFIXES: [&str; 5] = ["h:", "rel:", "cond:", "phi:", "tr:"];

fn strip_brackets(t: &str) -> &str {
    let t = t.strip_prefix('[').unwrap_or(t);
    let t = t.strip_prefix("weight:").unwrap_or(t).trim();
    t.strip_suffix(']').unwrap_or(t)
}

fn parse_rule(line: usize, rest: &str) -> Result<RawRule, FormatError> {
    let (lhs, rhs) = rest.split_once("->").ok_or(FormatError { line, msg: "expected `->` in rule".into() })?;
    let lhs: Vec<&str> = lhs.split_whitespace().collect();
    let (from, pop) = match lhs.as_slice() {
        [p] => (p.to_string(), None),
        [p, g] => (p.to_string(), Some(g.to_string())),
        _ => return err(line, "expected `rule p γ -> p′ w…`"),
    };
    let mut right: Vec<String> = Vec::new();
    let mut weight = None;
    for t in rhs_tokens(rhs_split(rhs)) {
        let bare = strip_brackets(&t);
        if t.starts_with('[') || PREFIXES.iter().any(|p| bare.starts_with(p)) {
            weight = Some(bare.to_string());
        } else if weight.is_some() {
            return err(line, format!("unexpected `{t}` after the weight"));
        } else {
            right.push(t);
        }
    }
    let Some((to, push)) = right.split_first() else { return err(line, "missing target state") };
    let push: Vec<String> = if push.len() == 1 && push[0] == "-" { vec![] } else { push.to_vec() };
    Ok(RawRule { line, from, pop, to: to.clone(), push, weight })
}

fn rhs_split(rhs: &str) -> Vec<String> {
    rhs.split_whitespace().map(str::to_string).collect()
}

// rejoin a bracketed weight that contains spaces
fn rhs_tokens(toks: Vec<String>) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    let mut open: Option<String> = None;
    for t in toks {
        match open.take() {
            Some(mut acc) => {
                acc.push(' ');
                acc.push_str(&t);
                if balanced(&acc) {
                    out.push(acc);
                } else {
                    open = Some(acc);
                }
            }
            None if !balanced(&t) => open = Some(t),
            None => out.push(t),
        }
    }
    out.extend(open);
    out
}

fn balanced(t: &str) -> bool {
    let depth = t.chars().fold(0i32, |d, c| match c {
        '[' | '{' | '(' => d + 1,
        ']' | '}' | ')' => d - 1,
        _ => d,
    });
    depth <= 0
}

pub fn parse_system(text: &str) -> Result<SystemFile, FormatError> {
    let mut domain: Option<(usize, Domain)> = None;
    let mut states: Option<Vec<String>> = None;
    let mut alphabet: Option<Alphabet> = None;
    let mut order: Option<(usize, Vec<String>)> = None;
    let mut les: Vec<(usize, String, String)> = Vec::new();
    let mut rules: Vec<RawRule> = Vec::new();
    let mut blocks: Vec<Block> = Vec::new();
    let mut open: Option<Block> = None;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if let Some(b) = open.as_mut() {
            if trimmed == "end" {
                blocks.push(open.take().unwrap());
            } else if !trimmed.is_empty() {
                b.body.push((line, trimmed.to_string()));
            }
            continue;
        }
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with("//") {
            continue;
        }
        let (head, rest) = trimmed.split_once(char::is_whitespace).unwrap_or((trimmed, ""));
        let toks: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
        match head {
            "domain" => {
                let d = Domain::parse(rest.trim()).ok_or(FormatError {
                    line,
                    msg: format!("unknown domain `{}`; expected minheight, relations, conditional, wspds or trpds", rest.trim()),
                })?;
                domain = Some((line, d));
            }
            "states" => {
                if toks.is_empty() {
                    return err(line, "expected at least one state");
                }
                states = Some(toks);
            }
            "alphabet" => alphabet = Some(Alphabet::new(toks)),
            "order" => order = Some((line, toks)),
            "le" => match toks.as_slice() {
                [a, b] => les.push((line, a.clone(), b.clone())),
                _ => return err(line, "expected `le a b`"),
            },
            "rule" => rules.push(parse_rule(line, rest)?),
            "automaton" | "transduction" | "target" | "transfer" => {
                let Some((name, args)) = toks.split_first() else { return err(line, format!("`{head}` needs a name")) };
                let b = Block { kind: head.to_string(), name: name.clone(), args: args.to_vec(), line, body: vec![] };
                let one_line = head == "transfer" && args.first().is_some_and(|a| a == "guard");
                if one_line {
                    blocks.push(b);
                } else {
                    open = Some(b);
                }
            }
            other => return err(line, format!("unknown directive `{other}`")),
        }
    }
    if let Some(b) = open {
        return err(b.line, format!("`{} {}` is not closed by `end`", b.kind, b.name));
    }
    let Some((_, domain)) = domain else { return err(1, "missing `domain` line") };
    let Some(states) = states else { return err(1, "missing `states` line") };
    let state = |line: usize, name: &str| -> Result<State, FormatError> {
        states
            .iter()
            .position(|s| s == name)
            .map(|i| i as State)
            .ok_or(FormatError { line, msg: format!("unknown state `{name}`") })
    };

    let mut targets = BTreeMap::new();
    for b in blocks.iter().filter(|b| b.kind == "target") {
        targets.insert(b.name.clone(), parse_target(b)?);
    }

    let mut autos: BTreeMap<String, Dfa> = BTreeMap::new();
    let system = if domain == Domain::Wspds {
        let Some((oline, otoks)) = order else { return err(1, "a wspds system needs an `order` line") };
        match otoks.first().map(String::as_str) {
            Some("finite") => {
                let names: Vec<String> = otoks[1..].to_vec();
                let mut edges = Vec::new();
                for (line, a, b) in &les {
                    let find = |x: &str| names.iter().position(|n| n == x).ok_or(FormatError { line: *line, msg: format!("unknown element `{x}`") });
                    edges.push((find(a)?, find(b)?));
                }
                let o = FiniteOrder::new(names, &edges);
                let mut transfers = Vec::new();
                for b in blocks.iter().filter(|b| b.kind == "transfer") {
                    transfers.push(finite_transfer(&o, b)?);
                }
                System::WspdsFinite(Wspds { rules: ws_rules(&rules, &transfers, &state)?, states: states.clone(), order: o, transfers })
            }
            Some("vector") => {
                let dim: usize = otoks.get(1).and_then(|d| d.parse().ok()).ok_or(FormatError { line: oline, msg: "expected `order vector <dim>`".into() })?;
                let o = VectorOrder::new(dim);
                let mut transfers = Vec::new();
                for b in blocks.iter().filter(|b| b.kind == "transfer") {
                    transfers.push(vector_transfer(&o, b)?);
                }
                System::WspdsVector(Wspds { rules: ws_rules(&rules, &transfers, &state)?, states: states.clone(), order: o, transfers })
            }
            _ => return err(oline, "expected `order finite a b …` or `order vector <dim>`"),
        }
    } else {
        let Some(alphabet) = alphabet else { return err(1, "missing `alphabet` line") };
        let sym = |line: usize, t: &str| -> Result<Symbol, FormatError> {
            alphabet.lookup(t).ok_or(FormatError { line, msg: format!("unknown stack symbol `{t}`") })
        };
        let shape = |r: &RawRule| -> Result<(State, Symbol, State, Word), FormatError> {
            let pop = r.pop.as_ref().ok_or(FormatError { line: r.line, msg: "expected `rule p γ -> p′ w…`".into() })?;
            let push = r.push.iter().map(|t| sym(r.line, t)).collect::<Result<_, _>>()?;
            Ok((state(r.line, &r.from)?, sym(r.line, pop)?, state(r.line, &r.to)?, push))
        };
        match domain {
            Domain::MinHeight => {
                let mut out = Vec::new();
                for r in &rules {
                    let (from, pop, to, push) = shape(r)?;
                    let w = r.weight.as_deref().ok_or(FormatError { line: r.line, msg: "min-height rules need a weight `h:<n>`".into() })?;
                    let h = parse_height(w).ok_or(FormatError { line: r.line, msg: format!("bad min-height weight `{w}`") })?;
                    out.push(Rule { from, pop, to, push, weight: Lifted::Val(h) });
                }
                let pds = WeightedPds::new(lift(MinHeight::new(alphabet.len())), states.clone(), alphabet.clone(), out)
                    .map_err(|e| FormatError { line: rule_line(&rules, &e), msg: e.to_string() })?;
                System::MinHeight(pds)
            }
            Domain::Relations => {
                let mut out = Vec::new();
                for r in &rules {
                    if let Some(w) = &r.weight {
                        return err(r.line, format!("relations rules are unweighted; their weight is derived from the rule (found `{w}`)"));
                    }
                    let (from, pop, to, push) = shape(r)?;
                    out.push(PlainRule { from, pop, to, push });
                }
                System::Relations(Pds { states: states.clone(), alphabet: alphabet.clone(), rules: out })
            }
            Domain::Conditional => {
                for b in blocks.iter().filter(|b| b.kind == "automaton") {
                    autos.insert(b.name.clone(), parse_dfa(&b.text(), &alphabet).map_err(|e| b.relocate(e))?);
                }
                let mut out = Vec::new();
                for r in &rules {
                    let (from, pop, to, push) = shape(r)?;
                    let cond = match r.weight.as_deref() {
                        None => Dfa::universal(alphabet.len()),
                        Some(w) => {
                            let name = w.strip_prefix("cond:").ok_or(FormatError { line: r.line, msg: format!("expected `cond:<automaton>`, found `{w}`") })?;
                            autos.get(name).cloned().ok_or(FormatError { line: r.line, msg: format!("unknown automaton `{name}`") })?
                        }
                    };
                    out.push(CondRule { from, pop, to, push, cond });
                }
                System::Conditional(CondPds { states: states.clone(), alphabet: alphabet.clone(), rules: out })
            }
            Domain::Trpds => {
                let mut trs: BTreeMap<&str, Transduction> = BTreeMap::new();
                for b in blocks.iter().filter(|b| b.kind == "transduction") {
                    trs.insert(&b.name, Transduction::parse(&b.text(), &alphabet).map_err(|e| b.relocate(e))?);
                }
                let mut out = Vec::new();
                for r in &rules {
                    let (from, pop, to, push) = shape(r)?;
                    let t = match r.weight.as_deref() {
                        None => Transduction::identity(alphabet.len()),
                        Some(w) => {
                            let name = w.strip_prefix("tr:").ok_or(FormatError { line: r.line, msg: format!("expected `tr:<transduction>`, found `{w}`") })?;
                            trs.get(name).cloned().ok_or(FormatError { line: r.line, msg: format!("unknown transduction `{name}`") })?
                        }
                    };
                    out.push(TrRule { from, pop, to, push, t });
                }
                System::Trpds(TrPds { states: states.clone(), alphabet: alphabet.clone(), rules: out })
            }
            Domain::Wspds => unreachable!(),
        }
    };
    Ok(SystemFile { domain, system, targets, automata: autos })
}

fn rule_line(rules: &[RawRule], e: &crate::wpds::PdsError) -> usize {
    let index = match e {
        crate::wpds::PdsError::IllTyped { index, .. } | crate::wpds::PdsError::UnknownState { index, .. } => *index,
    };
    rules.get(index).map_or(1, |r| r.line)
}

fn ws_rules<T>(
    rules: &[RawRule],
    transfers: &[NamedTransfer<T>],
    state: &dyn Fn(usize, &str) -> Result<State, FormatError>,
) -> Result<Vec<WsRule>, FormatError> {
    rules
        .iter()
        .map(|r| {
            if r.pop.is_some() || !r.push.is_empty() {
                return err(r.line, "wspds rules have the form `rule p -> p′ phi:<transfer>`");
            }
            let w = r.weight.as_deref().unwrap_or("");
            let name = w.strip_prefix("phi:").ok_or(FormatError { line: r.line, msg: "expected `phi:<transfer>`".into() })?;
            let transfer = transfers
                .iter()
                .position(|t| t.name == name)
                .ok_or(FormatError { line: r.line, msg: format!("unknown transfer `{name}`") })?;
            Ok(WsRule { from: state(r.line, &r.from)?, to: state(r.line, &r.to)?, transfer })
        })
        .collect()
}

fn finite_transfer(o: &FiniteOrder, b: &Block) -> Result<NamedTransfer<crate::wqo::FiniteTransfer>, FormatError> {
    let arity: usize = b
        .args
        .first()
        .and_then(|a| a.parse().ok())
        .ok_or(FormatError { line: b.line, msg: "expected `transfer <name> <arity>`".into() })?;
    let mut table: Vec<Option<Vec<u32>>> = vec![None; o.len()];
    for (line, text) in &b.body {
        let (x, ys) = text.split_once("->").ok_or(FormatError { line: *line, msg: "expected `x -> y1 y2 …`".into() })?;
        let x = o.parse_elem(x).ok_or(FormatError { line: *line, msg: format!("unknown element `{}`", x.trim()) })?;
        let ys = parse_elems(o, ys).map_err(|msg| FormatError { line: *line, msg })?;
        table[x as usize] = Some(ys);
    }
    let transfer = o.transfer(arity, table).map_err(|e| FormatError { line: b.line, msg: e.to_string() })?;
    Ok(NamedTransfer { name: b.name.clone(), transfer })
}

fn vector_transfer(o: &VectorOrder, b: &Block) -> Result<NamedTransfer<crate::wqo::GuardedTranslation>, FormatError> {
    let bad = || FormatError { line: b.line, msg: "expected `transfer <name> guard (..) push (..) …`".into() };
    let args = &b.args;
    if args.len() < 3 || args[0] != "guard" || args[2] != "push" {
        return Err(bad());
    }
    let vec = |t: &str| o.parse_vector(t).map_err(|e| FormatError { line: b.line, msg: e.to_string() });
    let guard = vec(&args[1])?;
    let pushes: Vec<&String> = args[3..].iter().filter(|t| *t != "-").collect();
    let deltas = pushes.iter().map(|t| vec(t)).collect::<Result<Vec<_>, _>>()?;
    let transfer = o.transfer(guard, deltas).map_err(|e| FormatError { line: b.line, msg: e.to_string() })?;
    Ok(NamedTransfer { name: b.name.clone(), transfer })
}

fn parse_target(b: &Block) -> Result<TargetSpec, FormatError> {
    let mut init = None;
    let mut finals = Vec::new();
    let mut edges = Vec::new();
    let mut states: Vec<String> = Vec::new();
    let note = |s: &str, states: &mut Vec<String>| {
        if !states.iter().any(|x| x == s) {
            states.push(s.to_string());
        }
    };
    for (line, text) in &b.body {
        if let Some(q) = text.strip_prefix("init ") {
            init = Some(q.trim().to_string());
            note(q.trim(), &mut states);
        } else if let Some(qs) = text.strip_prefix("final ") {
            for q in qs.split_whitespace() {
                finals.push(q.to_string());
                note(q, &mut states);
            }
        } else {
            let bad = || FormatError { line: *line, msg: "expected `q --γ|weight--> q′`".into() };
            let (from, rest) = text.split_once(" --").ok_or_else(bad)?;
            let (label, to) = rest.rsplit_once("--> ").ok_or_else(bad)?;
            let (symbol, weight) = label.split_once('|').ok_or_else(bad)?;
            note(from.trim(), &mut states);
            note(to.trim(), &mut states);
            edges.push((from.trim().to_string(), symbol.trim().to_string(), weight.trim().to_string(), to.trim().to_string()));
        }
    }
    let init = init.ok_or(FormatError { line: b.line, msg: format!("target `{}` has no `init` line", b.name) })?;
    Ok(TargetSpec { line: b.line, states, edges, init, finals })
}

#[cfg(test)]
mod tests {
    use super::*;

    const PEX: &str = "\
# running example
domain minheight
states p0 p1 p2 p3
alphabet g
rule p0 g -> p1 g g g h:3
rule p1 g -> p1 g g g g [weight: h:4]
rule p1 g -> p2 - h:1
rule p2 g -> p3 - h:1
rule p3 g -> p2 - h:1
";

    #[test]
    fn running_example_parses() {
        let f = parse_system(PEX).unwrap();
        let System::MinHeight(p) = &f.system else { panic!() };
        assert_eq!(p.rules.len(), 5);
        assert_eq!(p.rules[1].push.len(), 4);
        assert_eq!(p.rules[1].weight, Lifted::Val(Height::Finite(4)));
        assert!(p.rules[2].push.is_empty());
    }

    #[test]
    fn errors_carry_lines() {
        let bad = PEX.replace("rule p2 g -> p3 - h:1", "rule p2 g -> p9 - h:1");
        assert_eq!(parse_system(&bad).unwrap_err().line, 8);
        let bad = PEX.replace("h:3", "h:2");
        let e = parse_system(&bad).unwrap_err();
        assert_eq!(e.line, 5, "{e}");
        let e = parse_system("domain nope\n").unwrap_err();
        assert!(e.msg.contains("unknown domain"));
    }

    #[test]
    fn conditional_blocks() {
        let text = "\
domain conditional
states p q
alphabet a b
rule p a -> q - cond:astar
rule q b -> p a a
automaton astar
dfa 1 a
0 a 0
accept 0
init 0
end
";
        let f = parse_system(text).unwrap();
        let System::Conditional(c) = &f.system else { panic!() };
        assert!(c.rules[0].cond.accepts(&[0, 0]));
        assert!(!c.rules[0].cond.accepts(&[1]));
        assert!(c.rules[1].cond.is_universal());
    }

    #[test]
    fn wspds_blocks() {
        let text = "\
domain wspds
states p q
order vector 2
transfer step guard (1,0) push (0,2)
transfer out guard (0,3) push -
rule p -> p phi:step
rule p -> q phi:out
";
        let f = parse_system(text).unwrap();
        let System::WspdsVector(w) = &f.system else { panic!() };
        assert_eq!(w.rules.len(), 2);
        assert_eq!(w.transfers[1].transfer.deltas.len(), 0);

        let text = "\
domain wspds
states p
order finite a b
le a b
transfer t 2
a -> a b
b -> b b
end
rule p -> p phi:t
";
        let f = parse_system(text).unwrap();
        let System::WspdsFinite(w) = &f.system else { panic!() };
        assert_eq!(w.order.apply(&w.transfers[0].transfer, &0), Some(vec![0, 1]));
    }

    #[test]
    fn targets() {
        let text = format!("{PEX}target t\ninit q0\nfinal q1\nq0 --g|h:1--> q1\nend\n");
        let f = parse_system(&text).unwrap();
        let t = &f.targets["t"];
        assert_eq!(t.states, vec!["q0", "q1"]);
        assert_eq!(t.edges[0].2, "h:1");
    }

    #[test]
    fn words() {
        let a = Alphabet::new(["a", "b"]);
        assert_eq!(parse_word(&a, "a,b a").unwrap(), vec![Symbol(0), Symbol(1), Symbol(0)]);
        assert_eq!(parse_word(&a, "-").unwrap(), vec![]);
        assert!(parse_word(&a, "c").is_err());
    }
}
