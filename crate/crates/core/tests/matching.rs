use t2v_core::metrics::classify_error;
use t2v_core::vql::{canonicalize, component_match, tree_match};
use t2v_testkit::{mutate, random_instance, respell, rng, InstanceConfig, Mutation};

#[test]
fn component_conjunction_iff_tree_match() {
    let mut rng = rng(3);
    let cfg = InstanceConfig::default();
    let (mut pairs, mut equal, mut different) = (0, 0, 0);
    while pairs < 10_000 {
        let inst = random_instance(&mut rng, &cfg);
        let gold = &inst.query;
        let pred = match pairs % 3 {
            0 => respell(&mut rng, gold, &inst.schema),
            1 => mutate(&mut rng, gold, &inst.schema).0,
            _ => random_instance(&mut rng, &cfg).query,
        };
        let (Ok(tree), Ok(rep)) = (
            tree_match(&pred, gold, &inst.schema),
            component_match(&pred, gold, &inst.schema),
        ) else {
            continue;
        };
        assert_eq!(rep.all_match(), tree, "{pred}\n{gold}\n{rep:?}");
        if tree {
            equal += 1;
        } else {
            different += 1;
            let errs = classify_error(Some(&pred), gold, &inst.schema);
            assert!(!errs.is_empty(), "{pred}\n{gold}");
        }
        pairs += 1;
    }
    assert!(equal > 2_000 && different > 2_000, "{equal} equal, {different} different");
}

#[test]
fn single_mutation_flags_its_component() {
    let mut rng = rng(4);
    let cfg = InstanceConfig::default();
    let mut seen = 0;
    while seen < 2_000 {
        let inst = random_instance(&mut rng, &cfg);
        let (pred, kind) = mutate(&mut rng, &inst.query, &inst.schema);
        let Ok(pred) = canonicalize(&pred, &inst.schema) else { continue };
        if pred == inst.query {
            continue;
        }
        let rep = component_match(&pred, &inst.query, &inst.schema).unwrap();
        match kind {
            Mutation::Chart => assert!(!rep.vis_match && rep.axis_match && rep.data_match.all()),
            Mutation::Axis => assert!(!rep.axis_match && rep.vis_match && rep.data_match.all()),
            Mutation::Where => assert!(!rep.data_match.where_ && rep.vis_match && rep.axis_match),
            Mutation::Bin => assert!(!rep.data_match.binning && rep.vis_match && rep.axis_match),
            Mutation::Order => assert!(!rep.data_match.order && rep.vis_match && rep.axis_match),
        }
        seen += 1;
    }
}
