//! Model checking for EL, PAL, APAL, GAL and CAL on finite S5 models.
//!
//! Quantification over announcements is realised by enumerating
//! bisimulation-closed subsets of the current domain: on a finite model
//! those are exactly the extensions of epistemic formulas (atoms outside
//! the valuation are false everywhere and define nothing new). A group
//! announcement by `G` is a set `⋂_{a∈G} X_a(B_a)` with
//! `X_a(B) = { s : [s]_a ⊆ B }` and each `B_a` closed.
//!
//! Formulas are compiled into a hash-consed node arena. Evaluation works on
//! extensions within a *domain* (the states surviving the announcements made
//! so far) and only computes the states a caller asks for. Results for modal,
//! announcement and quantifier nodes are memoised per domain.
//!
//! When the body of a quantifier is epistemic, its truth at `s` after an
//! announcement `X` depends only on `X ∩ T` for a support set `T` computed
//! from the body and `s`; candidates are then enumerated modulo that
//! projection. [`CheckOptions::prune`] switches this off for cross-checking.

use std::collections::{HashMap, HashSet};
use std::rc::Rc;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bisim::{stable_on, Partition};
use crate::formula::Formula;
use crate::kripke::{Model, ModelError};
use crate::StateSet;

pub const DEFAULT_BUDGET: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),
    #[error("quantifier budget of {budget} candidates exceeded")]
    QuantifierBudgetExceeded { budget: u64 },
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckOptions {
    /// Cap on enumerated quantifier candidates per context.
    pub budget: u64,
    /// Use the verbatim `∀∃` clause for coalition boxes instead of the dual
    /// of the coalition diamond.
    pub cal_literal: bool,
    /// Enumerate candidates modulo the support of epistemic bodies.
    pub prune: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            budget: DEFAULT_BUDGET,
            cal_literal: false,
            prune: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub formula: String,
    pub point: String,
    pub value: bool,
    pub candidates_enumerated: u64,
    pub elapsed_ms: u64,
    /// For a false verdict: an announcement (as a state set) that refuted
    /// some quantified box during the check, if one was met.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refutation: Option<Refutation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Refutation {
    pub state: String,
    pub announcement: Vec<String>,
}

type NodeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Node {
    Top,
    Bottom,
    /// Index into the model's atoms; `None` for atoms outside the valuation.
    Atom(Option<usize>),
    Not(NodeId),
    And(NodeId, NodeId),
    Or(NodeId, NodeId),
    Imp(NodeId, NodeId),
    Know(usize, NodeId),
    Ann(NodeId, NodeId),
    Apal(NodeId),
    Gal(Vec<usize>, NodeId),
    Cal(Vec<usize>, NodeId),
}

#[derive(Debug, Default)]
struct Arena {
    nodes: Vec<Node>,
    intern: HashMap<Node, NodeId>,
    /// No announcements or quantifiers below.
    el: Vec<bool>,
    /// No modalities at all below.
    prop: Vec<bool>,
}

impl Arena {
    fn add(&mut self, node: Node) -> NodeId {
        if let Some(&id) = self.intern.get(&node) {
            return id;
        }
        let (el, prop) = match &node {
            Node::Top | Node::Bottom | Node::Atom(_) => (true, true),
            Node::Not(a) => (self.el[*a], self.prop[*a]),
            Node::And(a, b) | Node::Or(a, b) | Node::Imp(a, b) => {
                (self.el[*a] && self.el[*b], self.prop[*a] && self.prop[*b])
            }
            Node::Know(_, a) => (self.el[*a], false),
            _ => (false, false),
        };
        let id = self.nodes.len();
        self.nodes.push(node.clone());
        self.el.push(el);
        self.prop.push(prop);
        self.intern.insert(node, id);
        id
    }
}

#[derive(Debug, Clone)]
struct Entry {
    known: StateSet,
    truth: StateSet,
}

/// Reusable checking state for one model: compiled formulas, per-domain
/// memo tables, partition caches and statistics.
pub struct CheckContext<'m> {
    model: &'m Model,
    options: CheckOptions,
    arena: Arena,
    memo: HashMap<StateSet, HashMap<NodeId, Entry>>,
    stable: HashMap<StateSet, Rc<Partition>>,
    gal: HashMap<(StateSet, Vec<usize>), Rc<Vec<StateSet>>>,
    candidates: u64,
    refutation: Option<(usize, StateSet)>,
}

impl<'m> CheckContext<'m> {
    pub fn new(model: &'m Model) -> Self {
        Self::with_options(model, CheckOptions::default())
    }

    pub fn with_options(model: &'m Model, options: CheckOptions) -> Self {
        CheckContext {
            model,
            options,
            arena: Arena::default(),
            memo: HashMap::new(),
            stable: HashMap::new(),
            gal: HashMap::new(),
            candidates: 0,
            refutation: None,
        }
    }

    pub fn model(&self) -> &'m Model {
        self.model
    }

    pub fn options(&self) -> CheckOptions {
        self.options
    }

    /// Total quantifier candidates enumerated so far, including the steps
    /// spent generating group-announcement families.
    pub fn candidates_enumerated(&self) -> u64 {
        self.candidates
    }

    /// The first announcement found to refute a quantified box, if any.
    pub fn refutation(&self) -> Option<Refutation> {
        self.refutation.as_ref().map(|(s, x)| Refutation {
            state: self.model.state_name(*s).to_string(),
            announcement: self.model.names_of(x).into_iter().map(String::from).collect(),
        })
    }

    fn agent(&self, name: &str) -> Result<usize, CheckError> {
        self.model
            .agent_index(name)
            .map_err(|_| CheckError::SignatureMismatch(format!("agent `{name}` is not in the model")))
    }

    fn compile(&mut self, f: &Formula) -> Result<NodeId, CheckError> {
        let mut seen = HashMap::new();
        self.compile_rec(f, &mut seen)
    }

    fn compile_rec(&mut self, f: &Formula, seen: &mut HashMap<*const Formula, NodeId>) -> Result<NodeId, CheckError> {
        let key = f as *const Formula;
        if let Some(&id) = seen.get(&key) {
            return Ok(id);
        }
        let node = match f {
            Formula::Top => Node::Top,
            Formula::Bottom => Node::Bottom,
            Formula::Atom(p) => Node::Atom(self.model.atom_index(p.as_str())),
            Formula::Not(a) => Node::Not(self.compile_rec(a, seen)?),
            Formula::And(a, b) => Node::And(self.compile_rec(a, seen)?, self.compile_rec(b, seen)?),
            Formula::Or(a, b) => Node::Or(self.compile_rec(a, seen)?, self.compile_rec(b, seen)?),
            Formula::Imp(a, b) => Node::Imp(self.compile_rec(a, seen)?, self.compile_rec(b, seen)?),
            Formula::Know(a, body) => Node::Know(self.agent(a.as_str())?, self.compile_rec(body, seen)?),
            Formula::AnnBox(psi, phi) => Node::Ann(self.compile_rec(psi, seen)?, self.compile_rec(phi, seen)?),
            Formula::ApalBox(phi) => Node::Apal(self.compile_rec(phi, seen)?),
            Formula::GalBox(g, phi) => {
                let g = g.iter().map(|a| self.agent(a.as_str())).collect::<Result<Vec<_>, _>>()?;
                Node::Gal(g, self.compile_rec(phi, seen)?)
            }
            Formula::CalBox(g, phi) => {
                let g = g.iter().map(|a| self.agent(a.as_str())).collect::<Result<Vec<_>, _>>()?;
                Node::Cal(g, self.compile_rec(phi, seen)?)
            }
        };
        let id = self.arena.add(node);
        seen.insert(key, id);
        Ok(id)
    }

    /// Truth set of `f` in the submodel on `restriction`.
    pub fn extension(&mut self, restriction: &StateSet, f: &Formula) -> Result<StateSet, CheckError> {
        let id = self.compile(f)?;
        let mut d = restriction.clone();
        d.grow(self.model.len());
        if d.len() > self.model.len() {
            return Err(ModelError::UnknownState(format!("#{}", d.len() - 1)).into());
        }
        self.eval(&d, id, &d)
    }

    /// `M_s ⊨ f` on the whole model.
    pub fn check(&mut self, state: &str, f: &Formula) -> Result<bool, CheckError> {
        let s = self.model.state_index(state)?;
        let full = self.model.full_set();
        self.check_in(&full, s, f)
    }

    /// `M|d, s ⊨ f` for a state `s ∈ d`.
    pub fn check_in(&mut self, d: &StateSet, s: usize, f: &Formula) -> Result<bool, CheckError> {
        let id = self.compile(f)?;
        if !d.contains(s) {
            return Err(ModelError::UnknownState(self.model.state_name(s).to_string()).into());
        }
        let want = singleton(self.model.len(), s);
        Ok(!self.eval(d, id, &want)?.is_clear())
    }

    /// `M ⊨ f`: true at every state.
    pub fn check_validity(&mut self, f: &Formula) -> Result<bool, CheckError> {
        let full = self.model.full_set();
        Ok(self.extension(&full, f)? == full)
    }

    pub fn report(&mut self, state: &str, f: &Formula) -> Result<CheckReport, CheckError> {
        let start = Instant::now();
        let before = self.candidates;
        self.refutation = None;
        let value = self.check(state, f)?;
        Ok(CheckReport {
            formula: f.to_string(),
            point: state.to_string(),
            value,
            candidates_enumerated: self.candidates - before,
            elapsed_ms: start.elapsed().as_millis() as u64,
            refutation: if value { None } else { self.refutation() },
        })
    }

    /// The announcements available to group `agents` in the submodel on `d`,
    /// deduplicated, in generation order, without the empty set.
    pub fn gal_sets(&mut self, d: &StateSet, agents: &[&str]) -> Result<Vec<StateSet>, CheckError> {
        let mut g = agents.iter().map(|a| self.agent(a)).collect::<Result<Vec<_>, _>>()?;
        g.sort_unstable();
        g.dedup();
        Ok(self.gal_family(d, &g)?.as_ref().clone())
    }

    /// Stable bisimulation classes of the submodel on `d` over all model atoms.
    pub fn stable_partition(&mut self, d: &StateSet) -> Rc<Partition> {
        if let Some(p) = self.stable.get(d) {
            return p.clone();
        }
        let p = Rc::new(stable_on(self.model, d, self.model.atoms()));
        self.stable.insert(d.clone(), p.clone());
        p
    }

    fn tick(&mut self) -> Result<(), CheckError> {
        self.candidates += 1;
        if self.candidates > self.options.budget {
            return Err(CheckError::QuantifierBudgetExceeded {
                budget: self.options.budget,
            });
        }
        Ok(())
    }

    fn memoised(node: &Node) -> bool {
        matches!(
            node,
            Node::Know(..) | Node::Ann(..) | Node::Apal(_) | Node::Gal(..) | Node::Cal(..)
        )
    }

    /// States of `want` (a subset of `d`) where `id` holds in the submodel on `d`.
    fn eval(&mut self, d: &StateSet, id: NodeId, want: &StateSet) -> Result<StateSet, CheckError> {
        if want.is_clear() {
            return Ok(want.clone());
        }
        let node = self.arena.nodes[id].clone();
        if !Self::memoised(&node) {
            return self.eval_node(d, &node, want);
        }
        let mut missing = want.clone();
        let mut result = self.model.empty_set();
        if let Some(entry) = self.memo.get(d).and_then(|m| m.get(&id)) {
            missing.difference_with(&entry.known);
            result = entry.truth.clone();
            result.intersect_with(want);
        }
        if missing.is_clear() {
            return Ok(result);
        }
        let fresh = self.eval_node(d, &node, &missing)?;
        result.union_with(&fresh);
        let table = self.memo.entry(d.clone()).or_default();
        let entry = table.entry(id).or_insert_with(|| Entry {
            known: StateSet::with_capacity(d.len()),
            truth: StateSet::with_capacity(d.len()),
        });
        entry.known.union_with(&missing);
        entry.truth.union_with(&fresh);
        Ok(result)
    }

    fn eval_node(&mut self, d: &StateSet, node: &Node, want: &StateSet) -> Result<StateSet, CheckError> {
        Ok(match *node {
            Node::Top => want.clone(),
            Node::Bottom => self.model.empty_set(),
            Node::Atom(None) => self.model.empty_set(),
            Node::Atom(Some(p)) => {
                let mut out = want.clone();
                out.intersect_with(self.model.truth_set(p));
                out
            }
            Node::Not(a) => {
                let t = self.eval(d, a, want)?;
                let mut out = want.clone();
                out.difference_with(&t);
                out
            }
            Node::And(a, b) => {
                let ta = self.eval(d, a, want)?;
                self.eval(d, b, &ta)?
            }
            Node::Or(a, b) => {
                let ta = self.eval(d, a, want)?;
                let mut rest = want.clone();
                rest.difference_with(&ta);
                let tb = self.eval(d, b, &rest)?;
                let mut out = ta;
                out.union_with(&tb);
                out
            }
            Node::Imp(a, b) => {
                let ta = self.eval(d, a, want)?;
                let tb = self.eval(d, b, &ta)?;
                let mut out = want.clone();
                out.difference_with(&ta);
                out.union_with(&tb);
                out
            }
            Node::Know(a, body) => {
                let model = self.model;
                let mut need = model.empty_set();
                let mut blocks = Vec::new();
                let mut done = HashSet::new();
                for s in want.ones() {
                    let b = model.block_index(a, s);
                    if done.insert(b) {
                        let mut c = model.blocks(a)[b].clone();
                        c.intersect_with(d);
                        need.union_with(&c);
                        blocks.push(c);
                    }
                }
                let holds = self.eval(d, body, &need)?;
                let mut out = model.empty_set();
                for c in blocks {
                    if c.is_subset(&holds) {
                        out.union_with(&c);
                    }
                }
                out.intersect_with(want);
                out
            }
            Node::Ann(psi, phi) => {
                let p = self.eval(d, psi, d)?;
                let mut out = want.clone();
                out.difference_with(&p);
                let mut inside = want.clone();
                inside.intersect_with(&p);
                if !inside.is_clear() {
                    let t = self.eval(&p, phi, &inside)?;
                    out.union_with(&t);
                }
                out
            }
            Node::Apal(_) | Node::Gal(..) | Node::Cal(..) => {
                let mut out = self.model.empty_set();
                for s in want.ones() {
                    if self.quantifier(d, node, s)? {
                        out.insert(s);
                    }
                }
                out
            }
        })
    }

    fn holds_at(&mut self, d: &StateSet, id: NodeId, s: usize) -> Result<bool, CheckError> {
        let want = singleton(self.model.len(), s);
        Ok(!self.eval(d, id, &want)?.is_clear())
    }

    /// States whose presence can affect the truth of the epistemic node `id`
    /// at `s` under any restriction of `d` that keeps `s`.
    fn support(&mut self, d: &StateSet, id: NodeId, s: usize) -> Result<StateSet, CheckError> {
        let mut memo = HashMap::new();
        let mut out = self.support_rec(d, id, s, &mut memo)?;
        out.insert(s);
        Ok(out)
    }

    fn support_rec(
        &mut self,
        d: &StateSet,
        id: NodeId,
        s: usize,
        memo: &mut HashMap<(NodeId, usize), StateSet>,
    ) -> Result<StateSet, CheckError> {
        if self.arena.prop[id] {
            return Ok(self.model.empty_set());
        }
        if let Some(found) = memo.get(&(id, s)) {
            return Ok(found.clone());
        }
        let node = self.arena.nodes[id].clone();
        let out = match node {
            Node::Not(a) => self.support_rec(d, a, s, memo)?,
            Node::And(a, b) | Node::Or(a, b) | Node::Imp(a, b) => {
                // A propositional side whose value at `s` settles the
                // connective makes the other side irrelevant.
                let settles = |ctx: &mut Self, x: NodeId, when: bool| -> Result<bool, CheckError> {
                    Ok(ctx.arena.prop[x] && ctx.holds_at(d, x, s)? == when)
                };
                let decided = match node {
                    Node::And(..) => settles(self, a, false)? || settles(self, b, false)?,
                    Node::Or(..) => settles(self, a, true)? || settles(self, b, true)?,
                    _ => settles(self, a, false)? || settles(self, b, true)?,
                };
                if decided {
                    self.model.empty_set()
                } else {
                    let mut x = self.support_rec(d, a, s, memo)?;
                    x.union_with(&self.support_rec(d, b, s, memo)?);
                    x
                }
            }
            Node::Know(a, body) => {
                let mut c = self.model.class(a, s).clone();
                c.intersect_with(d);
                let mut x = self.model.empty_set();
                let prop = self.arena.prop[body];
                for t in c.ones() {
                    if prop && self.holds_at(d, body, t)? {
                        continue;
                    }
                    x.insert(t);
                    x.union_with(&self.support_rec(d, body, t, memo)?);
                }
                x
            }
            _ => d.clone(),
        };
        memo.insert((id, s), out.clone());
        Ok(out)
    }

    fn record(&mut self, s: usize, x: &StateSet) {
        if self.refutation.is_none() {
            self.refutation = Some((s, x.clone()));
        }
    }

    fn quantifier(&mut self, d: &StateSet, node: &Node, s: usize) -> Result<bool, CheckError> {
        let body = match node {
            Node::Apal(b) | Node::Gal(_, b) | Node::Cal(_, b) => *b,
            _ => unreachable!("not a quantifier"),
        };
        let support = if self.options.prune && self.arena.el[body] {
            self.support(d, body, s)?
        } else {
            d.clone()
        };
        match node {
            Node::Apal(_) => self.apal(d, body, s, &support),
            Node::Gal(g, _) => {
                let family = self.gal_family(d, g)?;
                let mut seen = HashSet::new();
                for x in family.iter() {
                    if !x.contains(s) || !seen.insert(projection(x, &support)) {
                        continue;
                    }
                    self.tick()?;
                    if !self.holds_at(x, body, s)? {
                        self.record(s, x);
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Node::Cal(g, _) => {
                let rest: Vec<usize> = (0..self.model.agents().len()).filter(|a| !g.contains(a)).collect();
                let xs = self.gal_family(d, g)?;
                let ys = self.gal_family(d, &rest)?;
                let mut seen_x = HashSet::new();
                for x in xs.iter() {
                    if !seen_x.insert(projection(x, &support)) {
                        continue;
                    }
                    if !self.options.cal_literal && !x.contains(s) {
                        continue;
                    }
                    let mut answered = false;
                    let mut seen_z = HashSet::new();
                    for y in ys.iter() {
                        let mut z = x.clone();
                        z.intersect_with(y);
                        if !self.options.cal_literal && !z.contains(s) {
                            continue;
                        }
                        if !seen_z.insert(projection(&z, &support)) {
                            continue;
                        }
                        self.tick()?;
                        if !z.contains(s) || self.holds_at(&z, body, s)? {
                            answered = true;
                            break;
                        }
                    }
                    if !answered {
                        self.record(s, x);
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            _ => unreachable!(),
        }
    }

    fn apal(&mut self, d: &StateSet, body: NodeId, s: usize, support: &StateSet) -> Result<bool, CheckError> {
        let part = self.stable_partition(d);
        let own = part.class_of[s];
        let mut pieces = Vec::new();
        let mut seen = HashSet::new();
        for t in support.ones() {
            let b = part.class_of[t];
            if b != usize::MAX && b != own && seen.insert(b) {
                pieces.push(b);
            }
        }
        pieces.sort_unstable();
        let base = part.blocks[own].clone();
        let mut counter = vec![false; pieces.len()];
        loop {
            let mut x = base.clone();
            for (i, &b) in pieces.iter().enumerate() {
                if counter[i] {
                    x.union_with(&part.blocks[b]);
                }
            }
            self.tick()?;
            if !self.holds_at(&x, body, s)? {
                self.record(s, &x);
                return Ok(false);
            }
            if !increment(&mut counter) {
                return Ok(true);
            }
        }
    }

    /// Deduplicated family of group announcements of `g` (sorted agent
    /// indices) on domain `d`, excluding the empty set. Cached per domain.
    fn gal_family(&mut self, d: &StateSet, g: &[usize]) -> Result<Rc<Vec<StateSet>>, CheckError> {
        let key = (d.clone(), g.to_vec());
        if let Some(f) = self.gal.get(&key) {
            return Ok(f.clone());
        }
        let family = if g.is_empty() {
            vec![d.clone()]
        } else {
            let mut acc: Option<Vec<StateSet>> = None;
            for &a in g {
                let fa = self.agent_family(d, a)?;
                acc = Some(match acc {
                    None => fa,
                    Some(prev) => {
                        let mut out = Vec::new();
                        let mut seen = HashSet::new();
                        for x in &prev {
                            for y in &fa {
                                self.tick()?;
                                let mut z = x.clone();
                                z.intersect_with(y);
                                if seen.insert(z.clone()) {
                                    out.push(z);
                                }
                            }
                        }
                        out
                    }
                });
            }
            let mut all = acc.unwrap_or_default();
            all.retain(|x| !x.is_clear());
            all
        };
        let family = Rc::new(family);
        self.gal.insert(key, family.clone());
        Ok(family)
    }

    /// `{ X_a(B) : B closed in d }`, possibly including the empty set.
    fn agent_family(&mut self, d: &StateSet, a: usize) -> Result<Vec<StateSet>, CheckError> {
        let part = self.stable_partition(d);
        let mut classes: Vec<StateSet> = Vec::new();
        for b in self.model.blocks(a) {
            let mut c = b.clone();
            c.intersect_with(d);
            if !c.is_clear() {
                classes.push(c);
            }
        }
        let know_within = |b: &StateSet| {
            let mut x = StateSet::with_capacity(d.len());
            for c in &classes {
                if c.is_subset(b) {
                    x.union_with(c);
                }
            }
            x
        };
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        // Every X_a(B) equals X_a(closure(U)) for U = X_a(B), so either
        // enumeration covers the family; pick the smaller space.
        let by_classes = classes.len() <= part.len();
        let units: &[StateSet] = if by_classes { &classes } else { &part.blocks };
        let mut counter = vec![false; units.len()];
        loop {
            self.tick()?;
            let mut u = StateSet::with_capacity(d.len());
            for (i, on) in counter.iter().enumerate() {
                if *on {
                    u.union_with(&units[i]);
                }
            }
            let b = if by_classes { part.closure(&u) } else { u };
            let x = know_within(&b);
            if seen.insert(x.clone()) {
                out.push(x);
            }
            if !increment(&mut counter) {
                break;
            }
        }
        Ok(out)
    }
}

fn singleton(n: usize, s: usize) -> StateSet {
    let mut x = StateSet::with_capacity(n);
    x.insert(s);
    x
}

fn projection(x: &StateSet, support: &StateSet) -> StateSet {
    let mut p = x.clone();
    p.intersect_with(support);
    p
}

/// Binary increment with index 0 least significant; false on wrap-around.
fn increment(counter: &mut [bool]) -> bool {
    for bit in counter.iter_mut() {
        *bit = !*bit;
        if *bit {
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square_model() -> Model {
        Model::from_json(
            r#"{"states":["w00","w01","w10","w11"],
                "agents":{"a":[["w00","w01"],["w10","w11"]],"b":[["w00","w10"],["w01","w11"]]},
                "valuation":{"w10":["p"],"w11":["p","q"],"w01":["q"]}}"#,
        )
        .unwrap()
        .0
    }

    fn f(s: &str) -> Formula {
        Formula::parse(s).unwrap()
    }

    #[test]
    fn extensions() {
        let m = square_model();
        let mut ctx = CheckContext::new(&m);
        let all = m.full_set();
        assert_eq!(ctx.extension(&all, &Formula::Top).unwrap(), all);
        assert_eq!(m.names_of(&ctx.extension(&all, &f("p")).unwrap()), ["w10", "w11"]);
        assert_eq!(m.names_of(&ctx.extension(&all, &f("K a p")).unwrap()), ["w10", "w11"]);
        assert!(ctx.extension(&all, &f("K a q")).unwrap().is_clear());
    }

    #[test]
    fn unknown_agent_is_a_signature_error() {
        let m = square_model();
        let mut ctx = CheckContext::new(&m);
        assert!(matches!(ctx.check("w00", &f("K z p")), Err(CheckError::SignatureMismatch(_))));
        assert!(matches!(ctx.check("w00", &f("[G{z}] p")), Err(CheckError::SignatureMismatch(_))));
        assert!(!ctx.check("w00", &f("unseen")).unwrap());
    }

    #[test]
    fn announcement_clause() {
        let m = square_model();
        let mut ctx = CheckContext::new(&m);
        assert!(ctx.check("w01", &f("[p | q] K a q")).unwrap());
        assert!(!ctx.check("w01", &f("K a q")).unwrap());
        // False announcements make the box vacuous.
        assert!(ctx.check("w00", &f("[p] false")).unwrap());
    }

    #[test]
    fn gal_families() {
        let m = square_model();
        let mut ctx = CheckContext::new(&m);
        let all = m.full_set();
        assert_eq!(ctx.gal_sets(&all, &[]).unwrap(), vec![all.clone()]);
        let fam = ctx.gal_sets(&all, &["a"]).unwrap();
        let mut names: Vec<Vec<&str>> = fam.iter().map(|x| m.names_of(x)).collect();
        names.sort();
        assert_eq!(names, vec![vec!["w00", "w01"], vec!["w00", "w01", "w10", "w11"], vec!["w10", "w11"]]);
    }

    #[test]
    fn budget_is_enforced() {
        let m = square_model();
        let opts = CheckOptions {
            budget: 1,
            ..CheckOptions::default()
        };
        let mut ctx = CheckContext::with_options(&m, opts);
        assert_eq!(
            ctx.check("w00", &f("[!] K a K b ~p")),
            Err(CheckError::QuantifierBudgetExceeded { budget: 1 })
        );
    }

    #[test]
    fn counter_wraps() {
        let mut c = vec![false; 2];
        let mut seen = 1;
        while increment(&mut c) {
            seen += 1;
        }
        assert_eq!(seen, 4);
        assert!(!increment(&mut []));
    }
}
