//! Seeded random models and formulas for property suites.

use std::collections::{BTreeMap, BTreeSet};

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::formula::Formula;
use crate::kripke::Model;

/// A random S5 model with `1..=max_states` states named `s0, s1, …`,
/// agents `a, b, c, …` and atoms `p, q, r, …` (each atom true at each
/// state with probability one half).
pub fn random_model(rng: &mut StdRng, max_states: usize, agents: usize, atoms: usize) -> Model {
    let n = rng.gen_range(1..=max_states.max(1));
    let states: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    let agent_names = agent_names(agents);
    let atom_names = atom_names(atoms);
    let mut valuation = BTreeMap::new();
    for s in &states {
        let props: BTreeSet<String> = atom_names.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
        valuation.insert(s.clone(), props);
    }
    let mut partitions = BTreeMap::new();
    for a in &agent_names {
        // Assign each state a block label drawn from 0..k.
        let k = rng.gen_range(1..=n);
        let mut blocks: Vec<Vec<String>> = vec![Vec::new(); k];
        for s in &states {
            blocks[rng.gen_range(0..k)].push(s.clone());
        }
        blocks.retain(|b| !b.is_empty());
        partitions.insert(a.clone(), blocks);
    }
    Model::new(states, agent_names, &valuation, &partitions)
        .expect("generated model is well formed")
        .declare_atoms(atom_names)
}

pub fn agent_names(n: usize) -> Vec<String> {
    (0..n).map(|i| ((b'a' + i as u8) as char).to_string()).collect()
}

pub fn atom_names(n: usize) -> Vec<String> {
    const NAMES: [&str; 8] = ["p", "q", "r", "t", "v", "w", "x", "y"];
    NAMES.iter().take(n).map(|s| s.to_string()).collect()
}

/// Which constructors a random formula may use besides the epistemic ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Shape {
    pub announcements: bool,
    pub quantifiers: bool,
}

impl Shape {
    pub const EL: Shape = Shape {
        announcements: false,
        quantifiers: false,
    };
    pub const PAL: Shape = Shape {
        announcements: true,
        quantifiers: false,
    };
    pub const ALL: Shape = Shape {
        announcements: true,
        quantifiers: true,
    };
}

/// A random formula of size roughly bounded by `size` and modal depth at
/// most `depth`.
pub fn random_formula(
    rng: &mut StdRng,
    atoms: &[String],
    agents: &[String],
    size: usize,
    depth: usize,
    shape: Shape,
) -> Formula {
    if size <= 1 || (atoms.is_empty() && rng.gen_bool(0.5)) {
        return leaf(rng, atoms);
    }
    let mut choices: Vec<u8> = vec![0, 1, 2, 3];
    if depth > 0 && !agents.is_empty() {
        choices.extend([4, 4]);
        if shape.announcements {
            choices.push(5);
        }
        if shape.quantifiers {
            choices.extend([6, 7, 8]);
        }
    }
    let sub = size - 1;
    let go = |rng: &mut StdRng, size: usize, depth: usize| random_formula(rng, atoms, agents, size, depth, shape);
    match *choices.choose(rng).expect("nonempty") {
        0 => Formula::not(go(rng, sub, depth)),
        c @ 1..=3 => {
            let left = rng.gen_range(1..=sub.max(1));
            let a = go(rng, left, depth);
            let b = go(rng, sub.saturating_sub(left).max(1), depth);
            match c {
                1 => Formula::and(a, b),
                2 => Formula::or(a, b),
                _ => Formula::imp(a, b),
            }
        }
        4 => {
            let a = agents.choose(rng).expect("nonempty").clone();
            Formula::know(a, go(rng, sub, depth - 1))
        }
        5 => {
            let left = rng.gen_range(1..=sub.max(1));
            let psi = go(rng, left, depth - 1);
            let phi = go(rng, sub.saturating_sub(left).max(1), depth - 1);
            Formula::ann(psi, phi)
        }
        6 => Formula::apal(go(rng, sub, depth - 1)),
        c => {
            let g = random_group(rng, agents);
            let body = go(rng, sub, depth - 1);
            if c == 7 {
                Formula::gal(g, body)
            } else {
                Formula::cal(g, body)
            }
        }
    }
}

pub fn random_group(rng: &mut StdRng, agents: &[String]) -> Vec<String> {
    agents.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect()
}

fn leaf(rng: &mut StdRng, atoms: &[String]) -> Formula {
    if atoms.is_empty() || rng.gen_ratio(1, 8) {
        return if rng.gen_bool(0.5) { Formula::Top } else { Formula::Bottom };
    }
    Formula::atom(atoms.choose(rng).expect("nonempty").as_str())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn deterministic_per_seed() {
        let mut a = StdRng::seed_from_u64(7);
        let mut b = StdRng::seed_from_u64(7);
        assert_eq!(random_model(&mut a, 6, 2, 2), random_model(&mut b, 6, 2, 2));
        let atoms = atom_names(2);
        let agents = agent_names(2);
        assert_eq!(
            random_formula(&mut a, &atoms, &agents, 12, 3, Shape::ALL),
            random_formula(&mut b, &atoms, &agents, 12, 3, Shape::ALL)
        );
    }

    #[test]
    fn el_formulas_respect_depth() {
        let mut rng = StdRng::seed_from_u64(1);
        let atoms = atom_names(3);
        let agents = agent_names(2);
        for _ in 0..200 {
            let f = random_formula(&mut rng, &atoms, &agents, 15, 2, Shape::EL);
            assert!(f.modal_depth().unwrap() <= 2);
        }
    }
}
