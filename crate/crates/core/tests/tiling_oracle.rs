use announce_core::suite::{mismatched_tiles, uniform_tiles};
use announce_core::tiling::{
    extract_tiling, gen_grid_model, gen_local, gen_sat, grid_state, search_tiling, valid_tiling, Tile, EDGE, SQUARE,
};
use announce_core::{CheckContext, Formula, TileGrid, TileSet, TilingError};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Per-edge double loop over the grid, independent of the library check.
fn edges_match(ts: &TileSet, cells: &[Vec<usize>]) -> bool {
    let (h, w) = (cells.len(), cells[0].len());
    let mut ok = true;
    for j in 0..h {
        for i in 0..w {
            let t = &ts.tiles()[cells[j][i]];
            if i > 0 {
                ok &= ts.tiles()[cells[j][i - 1]].right == t.left;
            }
            if j > 0 {
                ok &= ts.tiles()[cells[j - 1][i]].up == t.down;
            }
        }
    }
    ok
}

/// First valid grid in row-major odometer order, by exhaustive enumeration.
fn brute_force(ts: &TileSet, w: usize, h: usize) -> Option<Vec<Vec<usize>>> {
    let n = w * h;
    let total = ts.len().checked_pow(n as u32)?;
    (0..total).find_map(|code| {
        let mut flat = vec![0; n];
        let mut c = code;
        for k in (0..n).rev() {
            flat[k] = c % ts.len();
            c /= ts.len();
        }
        let cells: Vec<Vec<usize>> = flat.chunks(w).map(|r| r.to_vec()).collect();
        edges_match(ts, &cells).then_some(cells)
    })
}

fn random_tiles(rng: &mut StdRng) -> TileSet {
    let colours = ["red", "blue", "green"];
    let n = rng.gen_range(1..=3);
    let tiles = (0..n)
        .map(|_| {
            let mut c = || colours[rng.gen_range(0..3)];
            Tile::new(c(), c(), c(), c())
        })
        .collect();
    TileSet::new(colours.iter().map(|&c| c.into()).collect(), tiles).unwrap()
}

#[test]
fn search_matches_exhaustive_enumeration() {
    let mut rng = StdRng::seed_from_u64(21);
    for _ in 0..300 {
        let ts = random_tiles(&mut rng);
        let (w, h) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
        let got = search_tiling(&ts, w, h).map(|g| g.rows().to_vec());
        assert_eq!(got, brute_force(&ts, w, h), "{ts:?} {w}x{h}");
    }
}

#[test]
fn validity_matches_edge_loop() {
    let mut rng = StdRng::seed_from_u64(22);
    for _ in 0..500 {
        let ts = random_tiles(&mut rng);
        let (w, h) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
        let cells: Vec<Vec<usize>> = (0..h).map(|_| (0..w).map(|_| rng.gen_range(0..ts.len())).collect()).collect();
        let g = TileGrid::new(w, h, cells.clone()).unwrap();
        assert_eq!(valid_tiling(&ts, &g).unwrap(), edges_match(&ts, &cells));
    }
}

#[test]
fn fixed_search_outcomes() {
    assert!(search_tiling(&mismatched_tiles(), 2, 2).is_none());
    assert_eq!(search_tiling(&uniform_tiles(), 4, 4), Some(TileGrid::constant(4, 4, 0).unwrap()));
    assert!(search_tiling(&mismatched_tiles(), 0, 3).is_none());
}

#[test]
fn out_of_range_tile_index_is_an_error() {
    let g = TileGrid::constant(2, 1, 3).unwrap();
    assert!(matches!(
        valid_tiling(&uniform_tiles(), &g),
        Err(TilingError::IndexOutOfRange { index: 3, .. })
    ));
}

#[test]
fn grid_models_of_found_tilings_round_trip() {
    let mut rng = StdRng::seed_from_u64(23);
    let mut seen = 0;
    while seen < 25 {
        let ts = random_tiles(&mut rng);
        let (w, h) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
        let Some(g) = search_tiling(&ts, w, h) else { continue };
        seen += 1;
        let pm = gen_grid_model(&ts, &g).unwrap();
        assert_eq!(pm.model.len(), 5 * w * h);
        let back = extract_tiling(&pm, &ts, w, h).unwrap();
        // Tiles with identical sides are indistinguishable; compare sides.
        for j in 0..h {
            for i in 0..w {
                assert_eq!(ts.tiles()[back.get(i, j)], ts.tiles()[g.get(i, j)]);
            }
        }
        let goal = Formula::and(gen_sat(&ts).unwrap(), Formula::know_chain(&[EDGE, SQUARE], gen_local()));
        let mut ctx = CheckContext::new(&pm.model);
        assert!(ctx.check(pm.point_name(), &goal).unwrap(), "{ts:?} {w}x{h}");
    }
}

#[test]
fn edge_relation_pairs_facing_sides() {
    let ts = uniform_tiles();
    let pm = gen_grid_model(&ts, &TileGrid::constant(3, 2, 0).unwrap()).unwrap();
    let m = &pm.model;
    for j in 0..2 {
        for i in 0..3 {
            let right = m.equiv_class(EDGE, &grid_state(i, j, "r")).unwrap();
            let want: Vec<String> = if i + 1 < 3 {
                vec![grid_state(i, j, "r"), grid_state(i + 1, j, "l")]
            } else {
                vec![grid_state(i, j, "r")]
            };
            let mut got: Vec<String> = m.names_of(&right).into_iter().map(String::from).collect();
            got.sort();
            let mut want = want;
            want.sort();
            assert_eq!(got, want);
            let sq = m.equiv_class(SQUARE, &grid_state(i, j, "u")).unwrap();
            assert_eq!(sq.count_ones(..), 5);
        }
    }
}

#[test]
fn sat_fails_on_a_grid_model_for_a_different_tile_set() {
    let ts = uniform_tiles();
    let pm = gen_grid_model(&ts, &TileGrid::constant(2, 2, 0).unwrap()).unwrap();
    let other = TileSet::uniform("blue", "red");
    let mut ctx = CheckContext::new(&pm.model);
    assert!(!ctx.check(pm.point_name(), &gen_sat(&other).unwrap()).unwrap());
}
