//! Formula generators for the checkerboard encoding of a tile set.
//!
//! Direction atoms are `u`, `d`, `l`, `r`; suit atoms are `hearts`,
//! `clubs`, `diamonds`, `spades`. Big conjunctions and disjunctions fold to
//! the left in the order they are written out.

use std::str::FromStr;

use super::{TileSet, TilingError, CLUBS, DIAMONDS, DOWN, EDGE, HEARTS, LABELS, LEFT, RIGHT, SPADES, SQUARE, SUITS, UP, WHITE};
use crate::formula::Formula;

fn atom(p: &str) -> Formula {
    Formula::atom(p)
}

fn k(agent: &str, f: Formula) -> Formula {
    Formula::know(agent, f)
}

fn kh(agent: &str, f: Formula) -> Formula {
    Formula::poss(agent, f)
}

fn imp(a: Formula, b: Formula) -> Formula {
    Formula::imp(a, b)
}

/// `K_s K_e K_s φ`
fn everywhere(f: Formula) -> Formula {
    Formula::know_chain(&[SQUARE, EDGE, SQUARE], f)
}

/// `⋁_x (x ∧ ⋀_{y≠x} ¬y)`
fn exactly_one(names: &[String]) -> Formula {
    Formula::disj(names.iter().map(|x| {
        Formula::conj(
            std::iter::once(atom(x)).chain(names.iter().filter(|y| *y != x).map(|y| Formula::not(atom(y)))),
        )
    }))
}

/// `SAT_Γ = oneCol ∧ tile_Γ ∧ match`, over the palette plus the reserved
/// centre colour.
pub fn gen_sat(ts: &TileSet) -> Result<Formula, TilingError> {
    let mut colours: Vec<String> = Vec::new();
    for c in ts.palette() {
        if c.as_str() == WHITE || LABELS.contains(&c.as_str()) {
            return Err(TilingError::PaletteClash(c.0.clone()));
        }
        colours.push(c.0.clone());
    }
    colours.push(WHITE.to_string());

    let one_col = everywhere(exactly_one(&colours));
    let tile = everywhere(Formula::disj(ts.tiles().iter().map(|t| {
        Formula::conj([
            imp(atom(UP), atom(t.up.as_str())),
            imp(atom(RIGHT), atom(t.right.as_str())),
            imp(atom(DOWN), atom(t.down.as_str())),
            imp(atom(LEFT), atom(t.left.as_str())),
        ])
    })));
    let matching = everywhere(Formula::disj(colours.iter().map(|c| k(EDGE, atom(c)))));
    Ok(Formula::conj([one_col, tile, matching]))
}

fn sq(x: &str) -> Formula {
    Formula::conj([
        k(SQUARE, Formula::disj([atom(UP), atom(DOWN), atom(LEFT), atom(RIGHT), atom(x)])),
        kh(SQUARE, atom(UP)),
        kh(SQUARE, atom(DOWN)),
        kh(SQUARE, atom(LEFT)),
        kh(SQUARE, atom(RIGHT)),
        kh(SQUARE, atom(x)),
    ])
}

fn edge() -> Formula {
    // Each disjunct reads `(K_e(a ∨ b) ∧ K̂_e b) → …` under the grammar's
    // precedence.
    let horizontal = imp(
        Formula::and(k(EDGE, Formula::or(atom(LEFT), atom(RIGHT))), kh(EDGE, atom(RIGHT))),
        k(
            EDGE,
            imp(
                atom(LEFT),
                k(SQUARE, imp(atom(UP), k(EDGE, k(SQUARE, kh(EDGE, atom(RIGHT)))))),
            ),
        ),
    );
    let vertical = imp(
        Formula::and(k(EDGE, Formula::or(atom(UP), atom(DOWN))), kh(EDGE, atom(UP))),
        k(
            EDGE,
            imp(
                atom(DOWN),
                k(SQUARE, imp(atom(RIGHT), k(EDGE, k(SQUARE, kh(EDGE, atom(UP)))))),
            ),
        ),
    );
    let centre = Formula::conj(
        std::iter::once(k(EDGE, Formula::disj(SUITS.iter().map(|s| atom(s)))))
            .chain(SUITS.iter().map(|s| kh(EDGE, atom(s)))),
    );
    everywhere(Formula::disj([horizontal, vertical, centre]))
}

/// Right and upper neighbour suits of each suit.
const NEIGHBOURS: [(&str, &str, &str); 4] = [
    (HEARTS, CLUBS, SPADES),
    (CLUBS, HEARTS, DIAMONDS),
    (DIAMONDS, SPADES, CLUBS),
    (SPADES, DIAMONDS, HEARTS),
];

fn adj() -> Formula {
    Formula::conj(NEIGHBOURS.iter().map(|&(x, right, above)| {
        k(
            SQUARE,
            k(
                EDGE,
                imp(
                    atom(x),
                    k(
                        SQUARE,
                        Formula::conj([
                            imp(atom(RIGHT), k(EDGE, imp(atom(LEFT), kh(SQUARE, atom(right))))),
                            imp(atom(UP), k(EDGE, imp(atom(DOWN), kh(SQUARE, atom(above))))),
                        ]),
                    ),
                ),
            ),
        )
    }))
}

/// `local = oneLabel ∧ oneSuit ∧ edge ∧ adj`
pub fn gen_local() -> Formula {
    let labels: Vec<String> = LABELS.iter().map(|s| s.to_string()).collect();
    let one_label = everywhere(exactly_one(&labels));
    let one_suit = k(SQUARE, k(EDGE, Formula::disj(SUITS.iter().map(|s| sq(s)))));
    Formula::conj([one_label, one_suit, edge(), adj()])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CbKind {
    Apal,
    Gal,
    Cal,
}

impl FromStr for CbKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "apal" => Ok(CbKind::Apal),
            "gal" => Ok(CbKind::Gal),
            "cal" => Ok(CbKind::Cal),
            other => Err(format!("unknown kind `{other}` (expected apal, gal or cal)")),
        }
    }
}

/// `K_{a1}(p1 → K_{a2}(p2 → … tail))`
fn chain(steps: &[(&str, &str)], tail: Formula) -> Formula {
    steps
        .iter()
        .rev()
        .fold(tail, |acc, &(agent, p)| k(agent, imp(atom(p), acc)))
}

const CYCLE: [(&str, &str); 8] = [
    (SQUARE, RIGHT),
    (EDGE, LEFT),
    (SQUARE, UP),
    (EDGE, DOWN),
    (SQUARE, LEFT),
    (EDGE, RIGHT),
    (SQUARE, DOWN),
    (EDGE, UP),
];

fn both() -> [&'static str; 2] {
    [SQUARE, EDGE]
}

fn cyc(kind: CbKind) -> Formula {
    Formula::conj(SUITS.iter().map(|&x| {
        let body = match kind {
            CbKind::Apal | CbKind::Cal => chain(&CYCLE, kh(SQUARE, atom(x))),
            CbKind::Gal => chain(
                &CYCLE[..7],
                kh(EDGE, Formula::and(atom(UP), kh(SQUARE, atom(x)))),
            ),
        };
        let quantified = match kind {
            CbKind::Apal => Formula::apal(body),
            CbKind::Gal => Formula::gal([SQUARE], body),
            CbKind::Cal => Formula::cal(both(), body),
        };
        imp(atom(x), quantified)
    }))
}

/// `(X, Y, Z)`: a suit with the suits to its right and above.
const TRIPLES: [(&str, &str, &str); 4] = NEIGHBOURS;

fn ck(kind: CbKind) -> Formula {
    Formula::conj(TRIPLES.iter().map(|&(x, y, z)| {
        let rhs = match kind {
            CbKind::Gal => Formula::gal(
                [EDGE],
                k(
                    SQUARE,
                    Formula::conj([
                        imp(atom(RIGHT), k(EDGE, imp(atom(LEFT), kh(SQUARE, atom(y))))),
                        imp(atom(UP), k(EDGE, imp(atom(DOWN), kh(SQUARE, atom(z))))),
                        imp(atom(LEFT), k(EDGE, imp(atom(RIGHT), kh(SQUARE, atom(y))))),
                        imp(atom(DOWN), k(EDGE, imp(atom(UP), kh(SQUARE, atom(z))))),
                    ]),
                ),
            ),
            CbKind::Apal | CbKind::Cal => {
                let quantify = |f: Formula| match kind {
                    CbKind::Apal => Formula::apal(f),
                    _ => Formula::cal(both(), f),
                };
                let part = |w: &str, first: &str, second: &str| {
                    let not_w = Formula::not(atom(w));
                    quantify(imp(
                        k(EDGE, not_w.clone()),
                        k(SQUARE, imp(atom(first), k(EDGE, imp(atom(second), k(SQUARE, not_w))))),
                    ))
                };
                Formula::conj([
                    part(y, RIGHT, LEFT),
                    part(z, UP, DOWN),
                    part(y, LEFT, RIGHT),
                    part(z, DOWN, UP),
                ])
            }
        };
        imp(atom(x), rhs)
    }))
}

/// `CB_apa = K_e K_s (local ∧ cyc ∧ ck)`; the group and coalition variants
/// use the prefix `K_s K_e K_s`.
pub fn gen_cb(kind: CbKind) -> Formula {
    let body = Formula::conj([gen_local(), cyc(kind), ck(kind)]);
    match kind {
        CbKind::Apal => Formula::know_chain(&[EDGE, SQUARE], body),
        CbKind::Gal | CbKind::Cal => everywhere(body),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tiling::Tile;

    #[test]
    fn cb_prefixes() {
        assert!(gen_cb(CbKind::Apal).to_string().starts_with("K e K s ("));
        assert!(gen_cb(CbKind::Gal).to_string().starts_with("K s K e K s ("));
        assert!(gen_cb(CbKind::Cal).to_string().starts_with("K s K e K s ("));
    }

    #[test]
    fn sat_rejects_reserved_colours() {
        let ts = TileSet::uniform(WHITE, "blue");
        assert_eq!(gen_sat(&ts), Err(TilingError::PaletteClash(WHITE.into())));
        let ts = TileSet::uniform("u", "blue");
        assert_eq!(gen_sat(&ts), Err(TilingError::PaletteClash("u".into())));
    }

    #[test]
    fn sat_signature() {
        let ts = TileSet::new(vec!["red".into()], vec![Tile::new("red", "red", "red", "red")]).unwrap();
        let f = gen_sat(&ts).unwrap();
        let atoms: Vec<String> = f.atoms_of().into_iter().map(|p| p.to_string()).collect();
        assert_eq!(atoms, ["d", "l", "r", "red", "u", WHITE]);
        assert_eq!(Formula::parse(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn local_depth_and_signature() {
        let local = gen_local();
        assert_eq!(local.modal_depth(), Ok(8));
        let agents: Vec<String> = local.agents_of().into_iter().map(|a| a.to_string()).collect();
        assert_eq!(agents, ["e", "s"]);
        assert_eq!(local.atoms_of().len(), 8);
    }
}
