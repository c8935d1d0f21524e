//! Property and acceptance suites shared by the `suite` command and the
//! acceptance test target.
//!
//! Every function is deterministic for a given seed. A criterion returns a
//! [`CriterionResult`]; `asserted == false` marks experiments whose outcome is
//! recorded but does not count as a failure.

use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::bisim::{class_formulas, levels_on, stable_class_formulas};
use crate::formula::Formula;
use crate::kripke::{Model, PropId};
use crate::mcheck::{CheckContext, CheckOptions};
use crate::random::{agent_names, atom_names, random_formula, random_group, random_model, Shape};
use crate::tiling::{
    extract_tiling, gen_cb, gen_grid_model, gen_local, gen_sat, search_tiling, valid_tiling, CbKind, Tile, TileGrid,
    TileSet, EDGE, HEARTS, SQUARE,
};

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub asserted: bool,
    pub detail: String,
    pub elapsed_ms: u64,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        let status = match (self.asserted, self.passed) {
            (true, true) => "PASS",
            (true, false) => "FAIL",
            (false, _) => "RECORDED",
        };
        format!("[{status}] criterion {}: {} — {}", self.id, self.name, self.detail)
    }
}

fn run(id: u8, name: &str, asserted: bool, body: impl FnOnce() -> Result<String, String>) -> CriterionResult {
    let start = Instant::now();
    let (passed, detail) = match body() {
        Ok(d) => (true, d),
        Err(e) => (false, e),
    };
    CriterionResult {
        id,
        name: name.to_string(),
        passed,
        asserted,
        detail,
        elapsed_ms: start.elapsed().as_millis() as u64,
    }
}

pub const SQUARE_MODEL_JSON: &str = r#"{
  "states": ["w00", "w01", "w10", "w11"],
  "agents": {
    "a": [["w00", "w01"], ["w10", "w11"]],
    "b": [["w00", "w10"], ["w01", "w11"]]
  },
  "valuation": {"w01": ["q"], "w10": ["p"], "w11": ["p", "q"]},
  "point": "w11"
}
"#;

pub fn square_model() -> Model {
    Model::from_json(SQUARE_MODEL_JSON).expect("shipped model is valid").0
}

fn parse(text: &str) -> Result<Formula, String> {
    Formula::parse(text).map_err(|e| e.to_string())
}

fn expect(ctx: &mut CheckContext<'_>, what: &str, got: Result<bool, crate::CheckError>, want: bool) -> Result<(), String> {
    let _ = ctx;
    match got {
        Ok(v) if v == want => Ok(()),
        Ok(v) => Err(format!("{what}: expected {want}, got {v}")),
        Err(e) => Err(format!("{what}: {e}")),
    }
}

/// Criterion 1: the worked example on the four-state model.
pub fn square_battery(seed: u64, random_formulas: usize) -> CriterionResult {
    run(1, "four-state example battery", true, || {
        let m = square_model();
        let mut ctx = CheckContext::new(&m);
        let at = |ctx: &mut CheckContext<'_>, s: &str, f: &str, want: bool| -> Result<(), String> {
            let phi = parse(f)?;
            let got = ctx.check(s, &phi);
            expect(ctx, &format!("{s} ⊨ {f}"), got, want)
        };
        let valid = |ctx: &mut CheckContext<'_>, f: &str, want: bool| -> Result<(), String> {
            let phi = parse(f)?;
            let got = ctx.check_validity(&phi);
            expect(ctx, &format!("valid {f}"), got, want)
        };
        at(&mut ctx, "w01", "~K a q & <!> K a q", true)?;
        at(&mut ctx, "w11", "<G{a}> K b p", true)?;
        valid(&mut ctx, "<G{a}> (K b p | K b ~p)", true)?;
        valid(&mut ctx, "<G{b}> (K a q | K a ~q)", true)?;
        at(&mut ctx, "w11", "<G{a,b}> (K a (p & q) & K b (p & q))", true)?;
        valid(&mut ctx, "<C{a}> (K b p | K b ~p)", true)?;
        valid(&mut ctx, "<C{a}> ~(K a q | K a ~q)", false)?;
        valid(&mut ctx, "<G{a}> ~(K a q | K a ~q)", true)?;

        let mut rng = StdRng::seed_from_u64(seed);
        let atoms = atom_names(2);
        let agents = agent_names(2);
        for _ in 0..random_formulas {
            let size = rng.gen_range(1..=8);
            let phi = random_formula(&mut rng, &atoms, &agents, size, 2, Shape::PAL);
            let f = Formula::iff(Formula::gal_dia(["a", "b"], phi.clone()), Formula::cal_dia(["a", "b"], phi.clone()));
            let got = ctx.check_validity(&f);
            expect(&mut ctx, &format!("<G{{a,b}}>φ <-> <C{{a,b}}>φ for φ = {phi}"), got, true)?;
        }
        Ok(format!(
            "8 worked-example checks and {random_formulas} group/coalition equivalences hold ({} candidates)",
            ctx.candidates_enumerated()
        ))
    })
}

fn model_pool(seed: u64, count: usize, max_states: usize, max_agents: usize, max_atoms: usize) -> Vec<Model> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let agents = rng.gen_range(1..=max_agents);
            let atoms = rng.gen_range(1..=max_atoms);
            random_model(&mut rng, max_states, agents, atoms)
        })
        .collect()
}

fn model_atoms(m: &Model) -> Vec<PropId> {
    m.atoms().to_vec()
}

fn model_names(m: &Model) -> (Vec<String>, Vec<String>) {
    (
        m.atoms().iter().map(|p| p.to_string()).collect(),
        m.agents().iter().map(|a| a.to_string()).collect(),
    )
}

/// Criterion 2: distinguishing formulas define exactly the `n`-bisimulation
/// class of their state.
pub fn distinguishing_suite(seed: u64, count: usize, max_states: usize, max_n: usize) -> CriterionResult {
    run(2, "distinguishing formulas define n-bisimulation classes", true, || {
        let mut checks = 0usize;
        for (k, m) in model_pool(seed, count, max_states, 3, 3).iter().enumerate() {
            let pi = model_atoms(m);
            let levels = levels_on(m, &m.full_set(), &pi, max_n);
            let mut ctx = CheckContext::new(m);
            for (n, part) in levels.iter().enumerate() {
                let formulas = class_formulas(m, &pi, n);
                for (b, f) in formulas.iter().enumerate() {
                    if f.modal_depth().map_err(|e| e.to_string())? > n {
                        return Err(format!("model {k}, n={n}: depth exceeds n"));
                    }
                    let ext = ctx.extension(&m.full_set(), f).map_err(|e| e.to_string())?;
                    checks += 1;
                    if ext != part.blocks[b] {
                        return Err(format!(
                            "model {k}, n={n}, block {:?}: formula defines {:?}",
                            m.names_of(&part.blocks[b]),
                            m.names_of(&ext)
                        ));
                    }
                }
            }
        }
        Ok(format!("{count} models, n ≤ {max_n}: {checks} class formulas define their classes exactly"))
    })
}

/// Criterion 3: `n`-bisimilar states agree on epistemic formulas of depth ≤ n.
pub fn invariance_suite(seed: u64, count: usize, max_states: usize, formulas: usize, max_n: usize) -> CriterionResult {
    run(3, "n-bisimilar states agree on depth-n formulas", true, || {
        let mut rng = StdRng::seed_from_u64(seed ^ 0x5eed);
        let mut agreements = 0u64;
        for (k, m) in model_pool(seed, count, max_states, 3, 3).iter().enumerate() {
            let pi = model_atoms(m);
            let (atoms, agents) = model_names(m);
            let levels = levels_on(m, &m.full_set(), &pi, max_n);
            let mut ctx = CheckContext::new(m);
            for i in 0..formulas {
                let n = i % (max_n + 1);
                let size = rng.gen_range(1..=12);
                let f = random_formula(&mut rng, &atoms, &agents, size, n, Shape::EL);
                let ext = ctx.extension(&m.full_set(), &f).map_err(|e| e.to_string())?;
                for block in &levels[n].blocks {
                    let inside = block.count_ones(..);
                    let mut hit = block.clone();
                    hit.intersect_with(&ext);
                    let c = hit.count_ones(..);
                    if c != 0 && c != inside {
                        return Err(format!("model {k}, n={n}: {f} splits {:?}", m.names_of(block)));
                    }
                    agreements += (inside * (inside - 1)) as u64;
                }
            }
        }
        Ok(format!(
            "{count} models × {formulas} formulas: all {agreements} ordered n-bisimilar pairs agree"
        ))
    })
}

/// Reference semantics for `[!]φ`: announce every disjunction of stable class
/// formulas through the announcement clause.
pub fn apal_by_announcements(ctx: &mut CheckContext<'_>, m: &Model, phi: &Formula) -> Result<Vec<bool>, String> {
    let (_, classes) = stable_class_formulas(m, &model_atoms(m));
    let k = classes.len();
    let mut verdict = vec![true; m.len()];
    for mask in 1u64..(1u64 << k) {
        let psi = Formula::disj((0..k).filter(|b| mask >> b & 1 == 1).map(|b| classes[b].clone()));
        let f = Formula::ann(psi, phi.clone());
        let ext = ctx.extension(&m.full_set(), &f).map_err(|e| e.to_string())?;
        for (s, v) in verdict.iter_mut().enumerate() {
            *v &= ext.contains(s);
        }
    }
    Ok(verdict)
}

/// Criterion 4: `[!]` by closed-set enumeration agrees with the
/// formula-level reference.
pub fn apal_oracle(seed: u64, count: usize, max_states: usize, formulas: usize) -> CriterionResult {
    run(4, "arbitrary announcements match the formula-level oracle", true, || {
        let mut rng = StdRng::seed_from_u64(seed ^ 0xa9a1);
        let mut compared = 0usize;
        for (k, m) in model_pool(seed ^ 4, count, max_states, 3, 3).iter().enumerate() {
            let (atoms, agents) = model_names(m);
            let mut ctx = CheckContext::new(m);
            let mut oracle_ctx = CheckContext::new(m);
            for _ in 0..formulas {
                let size = rng.gen_range(1..=8);
                let phi = random_formula(&mut rng, &atoms, &agents, size, 2, Shape::PAL);
                let ext = ctx
                    .extension(&m.full_set(), &Formula::apal(phi.clone()))
                    .map_err(|e| e.to_string())?;
                let reference = apal_by_announcements(&mut oracle_ctx, m, &phi)?;
                for (s, want) in reference.iter().enumerate() {
                    compared += 1;
                    if ext.contains(s) != *want {
                        return Err(format!("model {k}, state {}: [!] {phi} disagrees", m.state_name(s)));
                    }
                }
            }
        }
        Ok(format!("{count} models × {formulas} formulas: {compared} state verdicts agree"))
    })
}

/// The validities of criterion 5 instantiated with random subformulas.
pub fn validity_instances(rng: &mut StdRng, m: &Model) -> Vec<(&'static str, Formula)> {
    let (atoms, agents) = model_names(m);
    let pick = |rng: &mut StdRng| {
        let size = rng.gen_range(1..=6);
        random_formula(rng, &atoms, &agents, size, 2, Shape::PAL)
    };
    let psi = pick(rng);
    let phi = pick(rng);
    let a = agents[rng.gen_range(0..agents.len())].clone();
    let g = random_group(rng, &agents);
    let ann = |f: Formula| Formula::ann(psi.clone(), f);
    vec![
        (
            "[ψ]p ↔ (ψ → p)",
            Formula::iff(
                ann(Formula::atom(atoms[0].as_str())),
                Formula::imp(psi.clone(), Formula::atom(atoms[0].as_str())),
            ),
        ),
        (
            "[ψ]¬φ ↔ (ψ → ¬[ψ]φ)",
            Formula::iff(
                ann(Formula::not(phi.clone())),
                Formula::imp(psi.clone(), Formula::not(ann(phi.clone()))),
            ),
        ),
        (
            "[ψ]K_aφ ↔ (ψ → K_a(ψ → [ψ]φ))",
            Formula::iff(
                ann(Formula::know(a.as_str(), phi.clone())),
                Formula::imp(
                    psi.clone(),
                    Formula::know(a.as_str(), Formula::imp(psi.clone(), ann(phi.clone()))),
                ),
            ),
        ),
        (
            "⟨G⟩⟨G⟩φ → ⟨G⟩φ",
            Formula::imp(
                Formula::gal_dia(g.clone(), Formula::gal_dia(g.clone(), phi.clone())),
                Formula::gal_dia(g.clone(), phi.clone()),
            ),
        ),
        (
            "⟨G⟩φ → ⟨!⟩φ",
            Formula::imp(Formula::gal_dia(g.clone(), phi.clone()), Formula::apal_dia(phi.clone())),
        ),
        (
            "¬⟨[∅]⟩¬φ → ⟨[A]⟩φ",
            Formula::imp(
                Formula::not(Formula::cal_dia(Vec::<String>::new(), Formula::not(phi.clone()))),
                Formula::cal_dia(agents.clone(), phi.clone()),
            ),
        ),
        (
            "[A]φ ↔ [⟨A⟩]φ",
            Formula::iff(Formula::gal(agents.clone(), phi.clone()), Formula::cal(agents.clone(), phi)),
        ),
    ]
}

/// Criterion 5: PAL reduction laws and the quantifier validities.
pub fn validity_suite(seed: u64, count: usize, max_states: usize) -> CriterionResult {
    run(5, "reduction laws and quantifier validities", true, || {
        let mut rng = StdRng::seed_from_u64(seed ^ 0x7a11d);
        let mut checked = 0usize;
        for (k, m) in model_pool(seed ^ 5, count, max_states, 3, 3).iter().enumerate() {
            let mut ctx = CheckContext::new(m);
            for _ in 0..3 {
                for (law, f) in validity_instances(&mut rng, m) {
                    checked += 1;
                    match ctx.check_validity(&f) {
                        Ok(true) => {}
                        Ok(false) => return Err(format!("model {k}: {law} fails as {f}")),
                        Err(e) => return Err(format!("model {k}: {law}: {e}")),
                    }
                }
            }
        }
        Ok(format!("{count} models: {checked} instances valid, zero counterexamples"))
    })
}

pub fn uniform_tiles() -> TileSet {
    TileSet::uniform("red", "blue")
}

pub fn mismatched_tiles() -> TileSet {
    TileSet::new(
        vec!["red".into(), "blue".into(), "green".into()],
        vec![Tile::new("red", "blue", "green", "blue")],
    )
    .expect("well formed")
}

/// Criterion 6: the quantifier-free gadget formulas hold on checkerboard
/// models, and the tiling can be read back.
pub fn tiling_el(max_side: usize) -> CriterionResult {
    run(6, "checkerboard models satisfy SAT and local", true, || {
        let ts = uniform_tiles();
        let sat = gen_sat(&ts).map_err(|e| e.to_string())?;
        let local = Formula::know_chain(&[EDGE, SQUARE], gen_local());
        let goal = Formula::and(sat, local);
        let mut grids = 0;
        for w in 1..=max_side {
            for h in 1..=max_side {
                let g = TileGrid::constant(w, h, 0).map_err(|e| e.to_string())?;
                let pm = gen_grid_model(&ts, &g).map_err(|e| e.to_string())?;
                let m = &pm.model;
                let mut ctx = CheckContext::new(m);
                let ok = ctx.check(pm.point_name(), &goal).map_err(|e| e.to_string())?;
                if !ok {
                    return Err(format!("{w}x{h}: SAT ∧ K_e K_s local fails at the point"));
                }
                if !ctx.check(pm.point_name(), &Formula::atom(HEARTS)).map_err(|e| e.to_string())? {
                    return Err(format!("{w}x{h}: the point is not a hearts square"));
                }
                let back = extract_tiling(&pm, &ts, w, h).map_err(|e| e.to_string())?;
                if back != g {
                    return Err(format!("{w}x{h}: extraction returned a different grid"));
                }
                grids += 1;
            }
        }
        Ok(format!("{grids} grids up to {max_side}x{max_side}: SAT, K_e K_s local, hearts point, round trip"))
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CbOutcome {
    pub kind: String,
    pub value: Option<bool>,
    pub candidates_enumerated: u64,
    pub elapsed_ms: u64,
    pub error: Option<String>,
    pub refutation: Option<crate::mcheck::Refutation>,
}

/// Checks the three checkerboard formulas at the point of the 2×2 model.
pub fn cb_outcomes(budget: u64) -> Vec<CbOutcome> {
    let ts = uniform_tiles();
    let pm = gen_grid_model(&ts, &TileGrid::constant(2, 2, 0).expect("2x2")).expect("valid");
    [("apal", CbKind::Apal), ("gal", CbKind::Gal), ("cal", CbKind::Cal)]
        .into_iter()
        .map(|(name, kind)| {
            let opts = CheckOptions {
                budget,
                ..CheckOptions::default()
            };
            let mut ctx = CheckContext::with_options(&pm.model, opts);
            let f = gen_cb(kind);
            let start = Instant::now();
            let result = ctx.report(pm.point_name(), &f);
            let elapsed_ms = start.elapsed().as_millis() as u64;
            match result {
                Ok(r) => CbOutcome {
                    kind: name.to_string(),
                    value: Some(r.value),
                    candidates_enumerated: r.candidates_enumerated,
                    elapsed_ms,
                    error: None,
                    refutation: r.refutation,
                },
                Err(e) => CbOutcome {
                    kind: name.to_string(),
                    value: None,
                    candidates_enumerated: ctx.candidates_enumerated(),
                    elapsed_ms,
                    error: Some(e.to_string()),
                    refutation: None,
                },
            }
        })
        .collect()
}

/// Criterion 7: quantified gadget formulas on the 2×2 model (recorded).
pub fn tiling_quantified(budget: u64) -> CriterionResult {
    run(7, "checkerboard formulas with quantifiers on 2x2 (recorded)", false, || {
        let parts: Vec<String> = cb_outcomes(budget)
            .into_iter()
            .map(|o| {
                let value = match (o.value, &o.error) {
                    (Some(v), _) => v.to_string(),
                    (None, Some(e)) => format!("error ({e})"),
                    (None, None) => "unknown".into(),
                };
                let mut s = format!(
                    "CB_{}={} [{} candidates, {} ms]",
                    o.kind, value, o.candidates_enumerated, o.elapsed_ms
                );
                if let Some(r) = o.refutation {
                    s.push_str(&format!(" refuted at {} by {{{}}}", r.state, r.announcement.join(",")));
                }
                s
            })
            .collect();
        Ok(parts.join("; "))
    })
}

/// Criterion 8: the brute-force tiling search.
pub fn tiling_oracle(seed: u64) -> CriterionResult {
    run(8, "tiling search oracle", true, || {
        if let Some(g) = search_tiling(&mismatched_tiles(), 2, 2) {
            return Err(format!("mismatched tile set tiled 2x2: {:?}", g.rows()));
        }
        let uniform = search_tiling(&uniform_tiles(), 4, 4);
        if uniform != Some(TileGrid::constant(4, 4, 0).map_err(|e| e.to_string())?) {
            return Err("uniform tile set did not give the constant 4x4 grid".into());
        }
        let mut rng = StdRng::seed_from_u64(seed ^ 8);
        let colours = ["red", "blue", "green"];
        let mut found = 0;
        for _ in 0..100 {
            let n = rng.gen_range(1..=4);
            let tiles: Vec<Tile> = (0..n)
                .map(|_| {
                    let mut c = || colours[rng.gen_range(0..colours.len())];
                    Tile::new(c(), c(), c(), c())
                })
                .collect();
            let ts = TileSet::new(colours.iter().map(|&c| c.into()).collect(), tiles).map_err(|e| e.to_string())?;
            let (w, h) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
            if let Some(g) = search_tiling(&ts, w, h) {
                found += 1;
                if !valid_tiling(&ts, &g).map_err(|e| e.to_string())? {
                    return Err(format!("search returned an invalid {w}x{h} grid"));
                }
            }
        }
        Ok(format!("mismatched 2x2 → none; uniform 4x4 → constant; {found}/100 random searches valid"))
    })
}

/// All acceptance criteria with their documented parameters.
pub fn acceptance(seed: u64, cb_budget: Option<u64>) -> Vec<CriterionResult> {
    let mut out = vec![
        square_battery(seed, 50),
        distinguishing_suite(seed, 200, 8, 4),
        invariance_suite(seed, 200, 8, 1000, 4),
        apal_oracle(seed, 100, 5, 20),
        validity_suite(seed, 100, 6),
        tiling_el(4),
    ];
    if let Some(budget) = cb_budget {
        out.push(tiling_quantified(budget));
    }
    out.push(tiling_oracle(seed));
    out
}

/// The property suites run over random models with the given state caps.
pub fn properties(seed: u64, sizes: &[usize]) -> Vec<CriterionResult> {
    let mut out = vec![square_battery(seed, 20)];
    for &n in sizes {
        let n = n.max(1);
        out.push(distinguishing_suite(seed, 50, n, 4));
        out.push(invariance_suite(seed, 50, n, 200, 4));
        out.push(apal_oracle(seed, 30, n.min(6), 10));
        out.push(validity_suite(seed, 30, n.min(6)));
    }
    out.push(tiling_el(3));
    out.push(tiling_oracle(seed));
    out
}
