//! Wang tiles, bounded tilings, and the checkerboard encoding.
//!
//! A tile is a four-tuple of colours (up, right, down, left). A `W×H` grid
//! of tile indices is a valid tiling when every horizontal neighbour pair
//! agrees on right/left and every vertical pair on up/down.

mod gadgets;
mod grid_model;

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kripke::ModelError;

pub use gadgets::{gen_cb, gen_local, gen_sat, CbKind};
pub use grid_model::{extract_tiling, gen_grid_model, grid_state};

/// Agent that cannot tell apart the five worlds of a square.
pub const SQUARE: &str = "s";
/// Agent that cannot tell apart adjoining sides of neighbouring squares.
pub const EDGE: &str = "e";
/// Colour reserved for centre worlds.
pub const WHITE: &str = "white";

pub const UP: &str = "u";
pub const DOWN: &str = "d";
pub const LEFT: &str = "l";
pub const RIGHT: &str = "r";
pub const HEARTS: &str = "hearts";
pub const CLUBS: &str = "clubs";
pub const DIAMONDS: &str = "diamonds";
pub const SPADES: &str = "spades";

pub const DIRECTIONS: [&str; 4] = [UP, DOWN, LEFT, RIGHT];
pub const SUITS: [&str; 4] = [HEARTS, CLUBS, DIAMONDS, SPADES];
/// The eight labels: four directions, then four suits.
pub const LABELS: [&str; 8] = [UP, DOWN, LEFT, RIGHT, HEARTS, CLUBS, DIAMONDS, SPADES];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TilingError {
    #[error("tile set has no tiles")]
    EmptyTileSet,
    #[error("colour `{0}` is listed twice")]
    DuplicateColour(String),
    #[error("colour `{0}` is not in the palette")]
    UnknownColour(String),
    #[error("grid must be at least 1x1 and match its declared {width}x{height} shape")]
    BadShape { width: usize, height: usize },
    #[error("cell ({i},{j}) holds tile {index}, but the tile set has {count} tiles")]
    IndexOutOfRange {
        i: usize,
        j: usize,
        index: usize,
        count: usize,
    },
    #[error("colour `{0}` clashes with a reserved name")]
    PaletteClash(String),
    #[error("grid is not a valid tiling")]
    InvalidTiling,
    #[error("chain broken at square ({i},{j}): {detail}")]
    ChainBroken { i: usize, j: usize, detail: String },
    #[error("square ({i},{j}) matches no tile")]
    NoMatchingTile { i: usize, j: usize },
    #[error("malformed tiling file: {0}")]
    Json(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Colour(pub String);

impl Colour {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Colour {
    fn from(s: &str) -> Self {
        Colour(s.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tile {
    pub up: Colour,
    pub right: Colour,
    pub down: Colour,
    pub left: Colour,
}

impl Tile {
    pub fn new(up: &str, right: &str, down: &str, left: &str) -> Tile {
        Tile {
            up: up.into(),
            right: right.into(),
            down: down.into(),
            left: left.into(),
        }
    }

    /// Colour on the side named by a direction label.
    pub fn side(&self, direction: &str) -> &Colour {
        match direction {
            UP => &self.up,
            RIGHT => &self.right,
            DOWN => &self.down,
            LEFT => &self.left,
            other => panic!("not a direction: {other}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TileSetFile {
    pub colours: Vec<Colour>,
    pub tiles: Vec<Tile>,
}

/// Γ: a palette and an ordered list of tiles over it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TileSetFile", into = "TileSetFile")]
pub struct TileSet {
    palette: Vec<Colour>,
    tiles: Vec<Tile>,
}

impl TryFrom<TileSetFile> for TileSet {
    type Error = TilingError;

    fn try_from(f: TileSetFile) -> Result<Self, Self::Error> {
        TileSet::new(f.colours, f.tiles)
    }
}

impl From<TileSet> for TileSetFile {
    fn from(t: TileSet) -> Self {
        TileSetFile {
            colours: t.palette,
            tiles: t.tiles,
        }
    }
}

impl TileSet {
    pub fn new(palette: Vec<Colour>, tiles: Vec<Tile>) -> Result<TileSet, TilingError> {
        if tiles.is_empty() {
            return Err(TilingError::EmptyTileSet);
        }
        let mut seen = HashSet::new();
        for c in &palette {
            if !seen.insert(c) {
                return Err(TilingError::DuplicateColour(c.0.clone()));
            }
        }
        for t in &tiles {
            for c in [&t.up, &t.right, &t.down, &t.left] {
                if !seen.contains(c) {
                    return Err(TilingError::UnknownColour(c.0.clone()));
                }
            }
        }
        Ok(TileSet { palette, tiles })
    }

    pub fn from_json(text: &str) -> Result<TileSet, TilingError> {
        let f: TileSetFile = serde_json::from_str(text).map_err(|e| TilingError::Json(e.to_string()))?;
        TileSet::try_from(f)
    }

    /// A single self-matching tile with colours `up/down = a`, `left/right = b`.
    pub fn uniform(a: &str, b: &str) -> TileSet {
        let palette = if a == b { vec![a.into()] } else { vec![a.into(), b.into()] };
        TileSet::new(palette, vec![Tile::new(a, b, a, b)]).expect("uniform tile set is well formed")
    }

    pub fn palette(&self) -> &[Colour] {
        &self.palette
    }

    pub fn tiles(&self) -> &[Tile] {
        &self.tiles
    }

    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridFile {
    pub width: usize,
    pub height: usize,
    pub cells: Vec<Vec<usize>>,
}

/// A `W×H` assignment of tile indices, stored row-major as `cells[j][i]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GridFile", into = "GridFile")]
pub struct TileGrid {
    width: usize,
    height: usize,
    cells: Vec<Vec<usize>>,
}

impl TryFrom<GridFile> for TileGrid {
    type Error = TilingError;

    fn try_from(f: GridFile) -> Result<Self, Self::Error> {
        TileGrid::new(f.width, f.height, f.cells)
    }
}

impl From<TileGrid> for GridFile {
    fn from(g: TileGrid) -> Self {
        GridFile {
            width: g.width,
            height: g.height,
            cells: g.cells,
        }
    }
}

impl TileGrid {
    pub fn new(width: usize, height: usize, cells: Vec<Vec<usize>>) -> Result<TileGrid, TilingError> {
        if width == 0 || height == 0 || cells.len() != height || cells.iter().any(|row| row.len() != width) {
            return Err(TilingError::BadShape { width, height });
        }
        Ok(TileGrid { width, height, cells })
    }

    pub fn constant(width: usize, height: usize, tile: usize) -> Result<TileGrid, TilingError> {
        TileGrid::new(width, height, vec![vec![tile; width]; height])
    }

    pub fn from_json(text: &str) -> Result<TileGrid, TilingError> {
        let f: GridFile = serde_json::from_str(text).map_err(|e| TilingError::Json(e.to_string()))?;
        TileGrid::try_from(f)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Tile index at column `i`, row `j`.
    pub fn get(&self, i: usize, j: usize) -> usize {
        self.cells[j][i]
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.cells
    }

    fn check_indices(&self, ts: &TileSet) -> Result<(), TilingError> {
        for j in 0..self.height {
            for i in 0..self.width {
                let index = self.get(i, j);
                if index >= ts.len() {
                    return Err(TilingError::IndexOutOfRange {
                        i,
                        j,
                        index,
                        count: ts.len(),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Both matching conditions on every interior edge of the rectangle.
pub fn valid_tiling(ts: &TileSet, g: &TileGrid) -> Result<bool, TilingError> {
    g.check_indices(ts)?;
    let tile = |i, j| &ts.tiles()[g.get(i, j)];
    for j in 0..g.height() {
        for i in 0..g.width() {
            if i + 1 < g.width() && tile(i, j).right != tile(i + 1, j).left {
                return Ok(false);
            }
            if j + 1 < g.height() && tile(i, j).up != tile(i, j + 1).down {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The lexicographically least valid `W×H` tiling (cells in row-major
/// order, tiles in list order), if any exists.
pub fn search_tiling(ts: &TileSet, width: usize, height: usize) -> Option<TileGrid> {
    if width == 0 || height == 0 {
        return None;
    }
    let n = width * height;
    let mut cells = vec![0usize; n];
    let fits = |cells: &[usize], k: usize, t: usize| {
        let (i, j) = (k % width, k / width);
        let tile = &ts.tiles()[t];
        (i == 0 || ts.tiles()[cells[k - 1]].right == tile.left)
            && (j == 0 || ts.tiles()[cells[k - width]].up == tile.down)
    };
    // Iterative backtracking: `next[k]` is the next tile index to try at cell k.
    let mut next = vec![0usize; n];
    let mut k = 0;
    loop {
        let mut placed = false;
        while next[k] < ts.len() {
            let t = next[k];
            next[k] += 1;
            if fits(&cells, k, t) {
                cells[k] = t;
                placed = true;
                break;
            }
        }
        if placed {
            if k + 1 == n {
                let rows = cells.chunks(width).map(<[usize]>::to_vec).collect();
                return TileGrid::new(width, height, rows).ok();
            }
            k += 1;
            next[k] = 0;
        } else if k == 0 {
            return None;
        } else {
            k -= 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_tile_tiles_everything() {
        let ts = TileSet::uniform("red", "blue");
        for (w, h) in [(1, 1), (3, 2), (4, 4)] {
            assert!(valid_tiling(&ts, &TileGrid::constant(w, h, 0).unwrap()).unwrap());
        }
        assert_eq!(search_tiling(&ts, 4, 4), Some(TileGrid::constant(4, 4, 0).unwrap()));
    }

    #[test]
    fn mismatched_tile() {
        let ts = TileSet::new(
            vec!["red".into(), "blue".into(), "green".into()],
            vec![Tile::new("red", "blue", "green", "blue")],
        )
        .unwrap();
        assert!(!valid_tiling(&ts, &TileGrid::constant(1, 2, 0).unwrap()).unwrap());
        assert!(valid_tiling(&ts, &TileGrid::constant(2, 1, 0).unwrap()).unwrap());
        assert_eq!(search_tiling(&ts, 2, 2), None);
    }

    #[test]
    fn index_out_of_range() {
        let ts = TileSet::uniform("red", "blue");
        let g = TileGrid::new(2, 1, vec![vec![0, 3]]).unwrap();
        assert_eq!(
            valid_tiling(&ts, &g),
            Err(TilingError::IndexOutOfRange {
                i: 1,
                j: 0,
                index: 3,
                count: 1
            })
        );
    }

    #[test]
    fn malformed_sets_and_grids() {
        assert_eq!(TileSet::new(vec!["a".into()], vec![]), Err(TilingError::EmptyTileSet));
        assert!(matches!(
            TileSet::new(vec!["a".into()], vec![Tile::new("a", "a", "a", "b")]),
            Err(TilingError::UnknownColour(_))
        ));
        assert!(TileGrid::new(2, 2, vec![vec![0, 0]]).is_err());
        assert!(TileGrid::new(0, 0, vec![]).is_err());
        assert!(TileSet::from_json(r#"{"colours":["a"],"tiles":[],"x":1}"#).is_err());
    }

    #[test]
    fn json_shapes() {
        let ts = TileSet::from_json(
            r#"{"colours":["red","blue"],"tiles":[{"up":"red","right":"blue","down":"red","left":"blue"}]}"#,
        )
        .unwrap();
        assert_eq!(ts, TileSet::uniform("red", "blue"));
        let g = TileGrid::from_json(r#"{"width":3,"height":2,"cells":[[0,1,2],[3,4,5]]}"#).unwrap();
        assert_eq!(g.get(2, 0), 2);
        assert_eq!(g.get(0, 1), 3);
    }
}
