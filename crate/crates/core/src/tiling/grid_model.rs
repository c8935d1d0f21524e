//! The checkerboard model of a bounded tiling, and reading a tiling back
//! out of a model.
//!
//! Square `(i, j)` contributes five worlds named `i_j_k` for
//! `k ∈ {u, d, l, r, mid}`. The square agent cannot distinguish the worlds of
//! one square; the edge agent confuses `(i,j,u)` with `(i,j+1,d)`,
//! `(i,j,r)` with `(i+1,j,l)`, and all centres with each other. Sides on the
//! border of the rectangle have singleton edge classes.

use std::collections::{BTreeMap, BTreeSet};

use super::{
    valid_tiling, TileGrid, TileSet, TilingError, CLUBS, DIAMONDS, DIRECTIONS, DOWN, EDGE, HEARTS, LABELS, LEFT,
    RIGHT, SPADES, SQUARE, UP, WHITE,
};
use crate::kripke::{Model, PointedModel, Program, Step};
use crate::{AgentId, PropId, StateSet};

const MID: &str = "mid";

/// Name of world `k` of square `(i, j)`.
pub fn grid_state(i: usize, j: usize, k: &str) -> String {
    format!("{i}_{j}_{k}")
}

fn suit(i: usize, j: usize) -> &'static str {
    match (i % 2, j % 2) {
        (0, 0) => HEARTS,
        (1, 0) => CLUBS,
        (1, 1) => DIAMONDS,
        _ => SPADES,
    }
}

/// Builds the checkerboard model of `g`, pointed at `0_0_mid`.
pub fn gen_grid_model(ts: &TileSet, g: &TileGrid) -> Result<PointedModel, TilingError> {
    if !valid_tiling(ts, g)? {
        return Err(TilingError::InvalidTiling);
    }
    let (w, h) = (g.width(), g.height());
    let mut states = Vec::with_capacity(5 * w * h);
    let mut valuation: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    let mut square_blocks = Vec::new();
    let mut edge_blocks = Vec::new();
    let mut mids = Vec::new();
    for j in 0..h {
        for i in 0..w {
            let tile = &ts.tiles()[g.get(i, j)];
            let mut square = Vec::new();
            for k in DIRECTIONS.iter().copied().chain([MID]) {
                let name = grid_state(i, j, k);
                let props = if k == MID {
                    BTreeSet::from([WHITE.to_string(), suit(i, j).to_string()])
                } else {
                    BTreeSet::from([k.to_string(), tile.side(k).0.clone()])
                };
                valuation.insert(name.clone(), props);
                states.push(name.clone());
                square.push(name);
            }
            square_blocks.push(square);
            mids.push(grid_state(i, j, MID));

            // Each shared side is emitted once, from the square below or to
            // the left; unmatched sides stay singletons.
            let mut up = vec![grid_state(i, j, UP)];
            if j + 1 < h {
                up.push(grid_state(i, j + 1, DOWN));
            }
            edge_blocks.push(up);
            let mut right = vec![grid_state(i, j, RIGHT)];
            if i + 1 < w {
                right.push(grid_state(i + 1, j, LEFT));
            }
            edge_blocks.push(right);
            if j == 0 {
                edge_blocks.push(vec![grid_state(i, j, DOWN)]);
            }
            if i == 0 {
                edge_blocks.push(vec![grid_state(i, j, LEFT)]);
            }
        }
    }
    edge_blocks.push(mids);
    let partitions = BTreeMap::from([(SQUARE.to_string(), square_blocks), (EDGE.to_string(), edge_blocks)]);
    let mut signature: Vec<PropId> = LABELS.iter().map(|&p| PropId::new(p)).collect();
    signature.extend(ts.palette().iter().map(|c| PropId::new(c.as_str())));
    signature.push(PropId::new(WHITE));
    let model = Model::new(states, [SQUARE, EDGE], &valuation, &partitions)?.declare_atoms(signature);
    Ok(PointedModel::new(model, &grid_state(0, 0, MID))?)
}

fn program(steps: &[(bool, &str)]) -> Program {
    Program::new(
        steps
            .iter()
            .map(|&(agent, name)| {
                if agent {
                    Step::Agent(AgentId::new(name))
                } else {
                    Step::Test(PropId::new(name))
                }
            })
            .collect(),
    )
    .expect("nonempty")
}

fn only(m: &Model, set: &StateSet, i: usize, j: usize, what: &str) -> Result<usize, TilingError> {
    let mut it = set.ones();
    match (it.next(), it.next()) {
        (Some(s), None) => Ok(s),
        (None, _) => Err(TilingError::ChainBroken {
            i,
            j,
            detail: format!("no {what}"),
        }),
        (Some(_), Some(_)) => Err(TilingError::ChainBroken {
            i,
            j,
            detail: format!("ambiguous {what}: {}", m.names_of(set).join(", ")),
        }),
    }
}

/// Reads a `W×H` tiling off a checkerboard model by walking
/// `s;r?;e;l?` to the right and `s;u?;e;d?` upwards from the point.
/// Each square's tile is the first one in `ts` whose sides match the colour
/// atoms of the square's four direction worlds.
pub fn extract_tiling(pm: &PointedModel, ts: &TileSet, width: usize, height: usize) -> Result<TileGrid, TilingError> {
    let m = &pm.model;
    let step_right = program(&[(true, SQUARE), (false, RIGHT), (true, EDGE), (false, LEFT)]);
    let step_up = program(&[(true, SQUARE), (false, UP), (true, EDGE), (false, DOWN)]);
    let palette: Vec<Option<usize>> = ts.palette().iter().map(|c| m.atom_index(c.as_str())).collect();

    let mut anchors = vec![vec![usize::MAX; width]; height];
    for j in 0..height {
        for i in 0..width {
            anchors[j][i] = if i == 0 && j == 0 {
                pm.point
            } else {
                let (from, prog, ii, jj) = if i > 0 {
                    (anchors[j][i - 1], &step_right, i - 1, j)
                } else {
                    (anchors[j - 1][i], &step_up, i, j - 1)
                };
                let start = {
                    let mut s = m.empty_set();
                    s.insert(from);
                    s
                };
                let next = m.run_program_from(prog, &start)?;
                only(m, &next, ii, jj, if i > 0 { "right neighbour" } else { "upper neighbour" })?
            };
        }
    }

    let mut cells = vec![vec![0; width]; height];
    for j in 0..height {
        for i in 0..width {
            let mut start = m.empty_set();
            start.insert(anchors[j][i]);
            let mut sides = Vec::with_capacity(4);
            for dir in [UP, RIGHT, DOWN, LEFT] {
                let world = m.run_program_from(&program(&[(true, SQUARE), (false, dir)]), &start)?;
                let world = only(m, &world, i, j, &format!("{dir}-world"))?;
                let colours: Vec<usize> = palette
                    .iter()
                    .enumerate()
                    .filter(|(_, a)| a.is_some_and(|a| m.holds(a, world)))
                    .map(|(c, _)| c)
                    .collect();
                match colours.as_slice() {
                    [c] => sides.push(*c),
                    _ => return Err(TilingError::NoMatchingTile { i, j }),
                }
            }
            let colour = |c: usize| &ts.palette()[c];
            cells[j][i] = ts
                .tiles()
                .iter()
                .position(|t| {
                    t.up == *colour(sides[0])
                        && t.right == *colour(sides[1])
                        && t.down == *colour(sides[2])
                        && t.left == *colour(sides[3])
                })
                .ok_or(TilingError::NoMatchingTile { i, j })?;
        }
    }
    TileGrid::new(width, height, cells)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_by_one() {
        let ts = TileSet::uniform("red", "blue");
        let pm = gen_grid_model(&ts, &TileGrid::constant(1, 1, 0).unwrap()).unwrap();
        let m = &pm.model;
        assert_eq!(m.len(), 5);
        let e = m.agent_index(EDGE).unwrap();
        let sizes: Vec<usize> = m.blocks(e).iter().map(|b| b.count_ones(..)).collect();
        assert_eq!(sizes, [1, 1, 1, 1, 1]);
        assert_eq!(pm.point_name(), "0_0_mid");
        assert!(m.holds(m.atom_index(HEARTS).unwrap(), pm.point));
    }

    #[test]
    fn two_by_two() {
        let ts = TileSet::uniform("red", "blue");
        let pm = gen_grid_model(&ts, &TileGrid::constant(2, 2, 0).unwrap()).unwrap();
        let m = &pm.model;
        assert_eq!(m.len(), 20);
        let mids = m.equiv_class(EDGE, "1_1_mid").unwrap();
        assert_eq!(m.names_of(&mids), ["0_0_mid", "1_0_mid", "0_1_mid", "1_1_mid"]);
        let pi: Program = "s;r?;e;l?".parse().unwrap();
        assert_eq!(m.names_of(&m.run_program(&pi, "0_0_mid").unwrap()), ["1_0_l"]);
        assert_eq!(extract_tiling(&pm, &ts, 2, 2).unwrap(), TileGrid::constant(2, 2, 0).unwrap());
    }

    #[test]
    fn invalid_grid_rejected() {
        let ts = TileSet::new(
            vec!["red".into(), "blue".into(), "green".into()],
            vec![super::super::Tile::new("red", "blue", "green", "blue")],
        )
        .unwrap();
        assert_eq!(
            gen_grid_model(&ts, &TileGrid::constant(1, 2, 0).unwrap()),
            Err(TilingError::InvalidTiling)
        );
    }
}
