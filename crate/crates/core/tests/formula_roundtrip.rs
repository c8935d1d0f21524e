use announce_core::random::{agent_names, atom_names, random_formula, Shape};
use announce_core::{Formula, FormulaError};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

#[test]
fn printing_then_parsing_is_identity_on_random_formulas() {
    let mut rng = StdRng::seed_from_u64(41);
    let (atoms, agents) = (atom_names(3), agent_names(3));
    for _ in 0..1000 {
        let f = random_formula(&mut rng, &atoms, &agents, 14, 4, Shape::ALL);
        let text = f.to_string();
        assert_eq!(Formula::parse(&text).unwrap(), f, "{text}");
    }
}

proptest! {
    #[test]
    fn round_trip_for_any_seed(seed in any::<u64>(), size in 1usize..20) {
        let mut rng = StdRng::seed_from_u64(seed);
        let (atoms, agents) = (atom_names(2), agent_names(2));
        let f = random_formula(&mut rng, &atoms, &agents, size, 3, Shape::ALL);
        prop_assert_eq!(Formula::parse(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn parser_never_panics(text in "[a-zK~&|()\\[\\]<>!{},GC -]{0,30}") {
        let _ = Formula::parse(&text);
    }
}

#[test]
fn unknown_group_operator_is_reported() {
    assert!(matches!(
        Formula::parse("[X{a}] p"),
        Err(FormulaError::UnknownOperator { .. }) | Err(FormulaError::SyntaxError { .. })
    ));
}
