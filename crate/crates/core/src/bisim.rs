//! Bounded bisimulation by partition refinement.
//!
//! Level 0 groups states by their valuation over the atom set Π. Level
//! `m + 1` splits a level-`m` block whenever two of its states see different
//! sets of level-`m` blocks through some agent's relation. The fixpoint is
//! stable bisimilarity; on a finite model its unions are exactly the sets
//! definable in epistemic logic, which is why [`closed_sets`] can stand in
//! for "all announcements".

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use crate::formula::Formula;
use crate::kripke::{Model, ModelError, PropId};
use crate::StateSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Finite(usize),
    Stable,
}

/// A partition of (a subset of) a model's states into bisimulation classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub level: Level,
    pub atoms: Vec<PropId>,
    /// Blocks ordered by least member.
    pub blocks: Vec<StateSet>,
    /// Block index per state; `usize::MAX` for states outside the domain.
    pub class_of: Vec<usize>,
}

impl Partition {
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn block_of(&self, s: usize) -> &StateSet {
        &self.blocks[self.class_of[s]]
    }

    /// Union of the blocks that meet `set`.
    pub fn closure(&self, set: &StateSet) -> StateSet {
        let mut out = StateSet::with_capacity(self.class_of.len());
        let mut done = vec![false; self.blocks.len()];
        for s in set.ones() {
            let b = self.class_of[s];
            if b != usize::MAX && !done[b] {
                done[b] = true;
                out.union_with(&self.blocks[b]);
            }
        }
        out
    }

    pub fn names(&self, m: &Model) -> Vec<Vec<String>> {
        self.blocks
            .iter()
            .map(|b| m.names_of(b).into_iter().map(String::from).collect())
            .collect()
    }
}

fn from_labels(labels: &[usize], domain: &StateSet, level: Level, atoms: &[PropId]) -> Partition {
    let n = labels.len();
    let mut order: HashMap<usize, usize> = HashMap::new();
    let mut blocks: Vec<StateSet> = Vec::new();
    let mut class_of = vec![usize::MAX; n];
    for s in domain.ones() {
        let next = blocks.len();
        let b = *order.entry(labels[s]).or_insert(next);
        if b == blocks.len() {
            blocks.push(StateSet::with_capacity(n));
        }
        blocks[b].insert(s);
        class_of[s] = b;
    }
    Partition {
        level,
        atoms: atoms.to_vec(),
        blocks,
        class_of,
    }
}

/// Resolves Π to atom indices; atoms absent from the model are false
/// everywhere and therefore split nothing.
fn atom_indices(m: &Model, pi: &[PropId]) -> Vec<usize> {
    pi.iter().filter_map(|p| m.atom_index(p.as_str())).collect()
}

fn level0(m: &Model, domain: &StateSet, atoms: &[usize], pi: &[PropId]) -> Partition {
    let mut keys: HashMap<Vec<bool>, usize> = HashMap::new();
    let mut labels = vec![usize::MAX; m.len()];
    for s in domain.ones() {
        let key: Vec<bool> = atoms.iter().map(|&p| m.holds(p, s)).collect();
        let next = keys.len();
        labels[s] = *keys.entry(key).or_insert(next);
    }
    from_labels(&labels, domain, Level::Finite(0), pi)
}

fn refine(m: &Model, domain: &StateSet, prev: &Partition, level: Level) -> Partition {
    let mut keys: HashMap<(usize, Vec<Vec<usize>>), usize> = HashMap::new();
    let mut labels = vec![usize::MAX; m.len()];
    for s in domain.ones() {
        let mut sig = Vec::with_capacity(m.agents().len());
        for a in 0..m.agents().len() {
            let mut seen: Vec<usize> = m
                .class(a, s)
                .ones()
                .filter(|&t| domain.contains(t))
                .map(|t| prev.class_of[t])
                .collect();
            seen.sort_unstable();
            seen.dedup();
            sig.push(seen);
        }
        let next = keys.len();
        labels[s] = *keys.entry((prev.class_of[s], sig)).or_insert(next);
    }
    from_labels(&labels, domain, level, &prev.atoms)
}

/// Partitions for levels `0..=n` on the submodel induced by `domain`.
pub fn levels_on(m: &Model, domain: &StateSet, pi: &[PropId], n: usize) -> Vec<Partition> {
    let atoms = atom_indices(m, pi);
    let mut out = vec![level0(m, domain, &atoms, pi)];
    for k in 1..=n {
        let prev = out.last().expect("nonempty");
        let next = if prev.level == Level::Stable {
            Partition {
                level: Level::Finite(k),
                ..prev.clone()
            }
        } else {
            refine(m, domain, prev, Level::Finite(k))
        };
        out.push(next);
    }
    out
}

/// Stable bisimulation classes of the submodel induced by `domain`.
pub fn stable_on(m: &Model, domain: &StateSet, pi: &[PropId]) -> Partition {
    let atoms = atom_indices(m, pi);
    let mut current = level0(m, domain, &atoms, pi);
    loop {
        let next = refine(m, domain, &current, Level::Stable);
        if next.len() == current.len() {
            return Partition {
                level: Level::Stable,
                ..current
            };
        }
        current = next;
    }
}

/// `||·||_n^Π` over the whole model.
pub fn nbisim(m: &Model, pi: &[PropId], n: usize) -> Partition {
    levels_on(m, &m.full_set(), pi, n).pop().expect("nonempty")
}

pub fn stable_bisim(m: &Model, pi: &[PropId]) -> Partition {
    stable_on(m, &m.full_set(), pi)
}

/// Builds the characteristic formulas of every block at every level up to `n`.
struct Synth<'a> {
    m: &'a Model,
    levels: Vec<Partition>,
    memo: HashMap<(usize, usize), Arc<Formula>>,
}

impl Synth<'_> {
    fn literals(&self, s: usize) -> Formula {
        Formula::conj(self.levels[0].atoms.iter().map(|p| {
            let holds = self.m.atom_index(p.as_str()).is_some_and(|a| self.m.holds(a, s));
            if holds {
                Formula::atom(p.clone())
            } else {
                Formula::not(Formula::atom(p.clone()))
            }
        }))
    }

    fn formula(&mut self, level: usize, block: usize) -> Arc<Formula> {
        if let Some(f) = self.memo.get(&(level, block)) {
            return f.clone();
        }
        let rep = self.levels[level].blocks[block]
            .minimum()
            .expect("blocks are nonempty");
        let f = if level == 0 {
            self.literals(rep)
        } else {
            let mut parts = vec![self.literals(rep)];
            for a in 0..self.m.agents().len() {
                let agent = self.m.agents()[a].clone();
                let hit: BTreeSet<usize> = self
                    .m
                    .class(a, rep)
                    .ones()
                    .map(|t| self.levels[level - 1].class_of[t])
                    .collect();
                let succ: Vec<Arc<Formula>> = hit.iter().map(|&c| self.formula(level - 1, c)).collect();
                for g in &succ {
                    parts.push(Formula::not(Formula::Know(
                        agent.clone(),
                        Arc::new(Formula::Not(g.clone())),
                    )));
                }
                let any = succ
                    .into_iter()
                    .map(|g| (*g).clone())
                    .reduce(Formula::or)
                    .unwrap_or(Formula::Bottom);
                parts.push(Formula::know(agent, any));
            }
            Formula::conj(parts)
        };
        let f = Arc::new(f);
        self.memo.insert((level, block), f.clone());
        f
    }
}

/// An epistemic formula of depth at most `n` over Π that holds exactly at the
/// states `n`-bisimilar to `state`.
pub fn distinguishing_formula(m: &Model, pi: &[PropId], n: usize, state: &str) -> Result<Formula, ModelError> {
    let s = m.state_index(state)?;
    let levels = levels_on(m, &m.full_set(), pi, n);
    let block = levels[n].class_of[s];
    let mut synth = Synth {
        m,
        levels,
        memo: HashMap::new(),
    };
    Ok((*synth.formula(n, block)).clone())
}

/// One characteristic formula per level-`n` block, in block order.
pub fn class_formulas(m: &Model, pi: &[PropId], n: usize) -> Vec<Formula> {
    let levels = levels_on(m, &m.full_set(), pi, n);
    let count = levels[n].len();
    let mut synth = Synth {
        m,
        levels,
        memo: HashMap::new(),
    };
    (0..count).map(|b| (*synth.formula(n, b)).clone()).collect()
}

/// Characteristic formulas of the stable classes, in block order, together
/// with the partition they describe.
pub fn stable_class_formulas(m: &Model, pi: &[PropId]) -> (Partition, Vec<Formula>) {
    // Refinement stabilises after at most |S| rounds; find the first level
    // whose block count stops growing.
    let stable = stable_bisim(m, pi);
    let mut n = 0;
    loop {
        let p = nbisim(m, pi, n);
        if p.len() == stable.len() {
            return (stable, class_formulas(m, pi, n));
        }
        n += 1;
    }
}

/// All nonempty unions of the given blocks, as a binary counter with block 0
/// as the least significant bit.
#[derive(Debug, Clone)]
pub struct Unions {
    blocks: Vec<StateSet>,
    counter: Vec<bool>,
    width: usize,
    done: bool,
}

impl Unions {
    pub fn new(blocks: Vec<StateSet>, width: usize) -> Self {
        let done = blocks.is_empty();
        let counter = vec![false; blocks.len()];
        Unions {
            blocks,
            counter,
            width,
            done,
        }
    }
}

impl Iterator for Unions {
    type Item = StateSet;

    fn next(&mut self) -> Option<StateSet> {
        if self.done {
            return None;
        }
        let mut i = 0;
        loop {
            if i == self.counter.len() {
                self.done = true;
                return None;
            }
            self.counter[i] = !self.counter[i];
            if self.counter[i] {
                break;
            }
            i += 1;
        }
        let mut out = StateSet::with_capacity(self.width);
        for (b, on) in self.blocks.iter().zip(&self.counter) {
            if *on {
                out.union_with(b);
            }
        }
        if self.counter.iter().all(|&c| c) {
            self.done = true;
        }
        Some(out)
    }
}

/// Every nonempty union of stable bisimulation classes over Π.
pub fn closed_sets(m: &Model, pi: &[PropId]) -> Unions {
    Unions::new(stable_bisim(m, pi).blocks, m.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kripke::Model;
    use std::collections::BTreeMap;

    fn square_model() -> Model {
        Model::from_json(
            r#"{"states":["w00","w01","w10","w11"],
                "agents":{"a":[["w00","w01"],["w10","w11"]],"b":[["w00","w10"],["w01","w11"]]},
                "valuation":{"w10":["p"],"w11":["p","q"],"w01":["q"]}}"#,
        )
        .unwrap()
        .0
    }

    fn pq() -> Vec<PropId> {
        vec![PropId::new("p"), PropId::new("q")]
    }

    #[test]
    fn square_level0_is_discrete() {
        let m = square_model();
        assert_eq!(nbisim(&m, &pq(), 0).len(), 4);
        assert_eq!(stable_bisim(&m, &pq()).len(), 4);
    }

    #[test]
    fn singleton_has_one_block() {
        let parts = BTreeMap::from([("a".to_string(), vec![vec!["s".to_string()]])]);
        let m = Model::new(["s"], ["a"], &BTreeMap::new(), &parts).unwrap();
        for n in 0..4 {
            assert_eq!(nbisim(&m, &pq(), n).len(), 1);
        }
        assert_eq!(closed_sets(&m, &pq()).count(), 1);
    }

    #[test]
    fn duplicated_state_merges() {
        let parts = BTreeMap::from([(
            "a".to_string(),
            vec![vec!["x".to_string()], vec!["y".to_string()]],
        )]);
        let val = BTreeMap::from([
            ("x".to_string(), BTreeSet::from(["p".to_string()])),
            ("y".to_string(), BTreeSet::from(["p".to_string()])),
        ]);
        let m = Model::new(["x", "y"], ["a"], &val, &parts).unwrap();
        for n in 0..4 {
            assert_eq!(nbisim(&m, &pq(), n).len(), 1);
        }
    }

    #[test]
    fn level0_formula_is_literal_conjunction() {
        let m = square_model();
        let f = distinguishing_formula(&m, &pq(), 0, "w11").unwrap();
        assert_eq!(f, Formula::parse("p & q").unwrap());
        let f = distinguishing_formula(&m, &pq(), 0, "w00").unwrap();
        assert_eq!(f, Formula::parse("~p & ~q").unwrap());
    }

    #[test]
    fn unions_count() {
        let m = square_model();
        let all: Vec<StateSet> = closed_sets(&m, &pq()).collect();
        assert_eq!(all.len(), 15);
        let distinct: BTreeSet<Vec<usize>> = all.iter().map(|s| s.ones().collect()).collect();
        assert_eq!(distinct.len(), 15);
        // Block 0 is the least significant bit.
        assert_eq!(all[0].ones().collect::<Vec<_>>(), [0]);
        assert_eq!(all[2].ones().collect::<Vec<_>>(), [0, 1]);
    }
}
