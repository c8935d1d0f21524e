//! Naive reference semantics over `Vec<bool>` domains, written without any of
//! the library's evaluation, bisimulation or announcement machinery.

#![allow(dead_code)]

use announce_core::{Formula, Model};

pub type Dom = Vec<bool>;

pub fn full(m: &Model) -> Dom {
    vec![true; m.len()]
}

fn same_class(m: &Model, a: usize, s: usize, t: usize) -> bool {
    m.blocks(a).iter().any(|b| b.contains(s) && b.contains(t))
}

fn label(m: &Model, s: usize) -> Vec<bool> {
    (0..m.atoms().len()).map(|p| m.holds(p, s)).collect()
}

/// Stable bisimulation classes of the submodel on `d`, by naive pairwise
/// refinement of the relation "same atoms".
pub fn stable_classes(m: &Model, d: &Dom) -> Vec<Dom> {
    let n = m.len();
    let mut rel = vec![vec![false; n]; n];
    for s in 0..n {
        for t in 0..n {
            rel[s][t] = d[s] && d[t] && label(m, s) == label(m, t);
        }
    }
    loop {
        let mut changed = false;
        for s in 0..n {
            for t in 0..n {
                if !rel[s][t] {
                    continue;
                }
                let ok = (0..m.agents().len()).all(|a| {
                    let forth = (0..n)
                        .filter(|&u| d[u] && same_class(m, a, s, u))
                        .all(|u| (0..n).any(|v| d[v] && same_class(m, a, t, v) && rel[u][v]));
                    let back = (0..n)
                        .filter(|&v| d[v] && same_class(m, a, t, v))
                        .all(|v| (0..n).any(|u| d[u] && same_class(m, a, s, u) && rel[u][v]));
                    forth && back
                });
                if !ok {
                    rel[s][t] = false;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut classes: Vec<Dom> = Vec::new();
    for s in (0..n).filter(|&s| d[s]) {
        if !classes.iter().any(|c| c[s]) {
            classes.push((0..n).map(|t| rel[s][t]).collect());
        }
    }
    classes
}

/// Every union of stable classes of `d`, including the empty one.
pub fn definable_sets(m: &Model, d: &Dom) -> Vec<Dom> {
    let classes = stable_classes(m, d);
    (0u64..1 << classes.len())
        .map(|mask| {
            (0..m.len())
                .map(|s| classes.iter().enumerate().any(|(i, c)| mask >> i & 1 == 1 && c[s]))
                .collect()
        })
        .collect()
}

/// `{ t ∈ d : every a-successor of t in d lies in b }`
fn knows_within(m: &Model, d: &Dom, a: usize, b: &Dom) -> Dom {
    (0..m.len())
        .map(|t| d[t] && (0..m.len()).all(|u| !d[u] || !same_class(m, a, t, u) || b[u]))
        .collect()
}

/// All sets `⋂_{a∈G} K_a ψ_a` for definable `ψ_a`, nonempty, deduplicated.
pub fn group_announcements(m: &Model, d: &Dom, group: &[usize]) -> Vec<Dom> {
    let defs = definable_sets(m, d);
    let mut acc: Vec<Dom> = vec![d.clone()];
    for &a in group {
        let mut next = Vec::new();
        for x in &acc {
            for b in &defs {
                let k = knows_within(m, d, a, b);
                let z: Dom = x.iter().zip(&k).map(|(p, q)| *p && *q).collect();
                if !next.contains(&z) {
                    next.push(z);
                }
            }
        }
        acc = next;
    }
    acc.retain(|x| x.iter().any(|&v| v));
    acc
}

fn agent_indices(m: &Model, names: impl IntoIterator<Item = String>) -> Vec<usize> {
    names
        .into_iter()
        .map(|a| m.agent_index(&a).expect("known agent"))
        .collect()
}

pub fn holds(m: &Model, d: &Dom, f: &Formula, s: usize) -> bool {
    debug_assert!(d[s]);
    match f {
        Formula::Top => true,
        Formula::Bottom => false,
        Formula::Atom(p) => m.atom_index(p.as_str()).is_some_and(|i| m.holds(i, s)),
        Formula::Not(a) => !holds(m, d, a, s),
        Formula::And(a, b) => holds(m, d, a, s) && holds(m, d, b, s),
        Formula::Or(a, b) => holds(m, d, a, s) || holds(m, d, b, s),
        Formula::Imp(a, b) => !holds(m, d, a, s) || holds(m, d, b, s),
        Formula::Know(a, body) => {
            let a = m.agent_index(a.as_str()).expect("known agent");
            (0..m.len()).all(|t| !d[t] || !same_class(m, a, s, t) || holds(m, d, body, t))
        }
        Formula::AnnBox(psi, phi) => {
            if !holds(m, d, psi, s) {
                return true;
            }
            let e: Dom = (0..m.len()).map(|t| d[t] && holds(m, d, psi, t)).collect();
            holds(m, &e, phi, s)
        }
        Formula::ApalBox(phi) => definable_sets(m, d)
            .iter()
            .filter(|x| x[s])
            .all(|x| holds(m, x, phi, s)),
        Formula::GalBox(g, phi) => {
            let g = agent_indices(m, g.iter().map(|a| a.to_string()));
            group_announcements(m, d, &g)
                .iter()
                .filter(|x| x[s])
                .all(|x| holds(m, x, phi, s))
        }
        Formula::CalBox(g, phi) => {
            let gi = agent_indices(m, g.iter().map(|a| a.to_string()));
            let rest: Vec<usize> = (0..m.agents().len()).filter(|a| !gi.contains(a)).collect();
            let ys = group_announcements(m, d, &rest);
            group_announcements(m, d, &gi).iter().filter(|x| x[s]).all(|x| {
                ys.iter().any(|y| {
                    let z: Dom = x.iter().zip(y).map(|(p, q)| *p && *q).collect();
                    z[s] && holds(m, &z, phi, s)
                })
            })
        }
    }
}

pub fn truth_set(m: &Model, f: &Formula) -> Vec<usize> {
    let d = full(m);
    (0..m.len()).filter(|&s| holds(m, &d, f, s)).collect()
}
