use pp_core::builders::{gen_majority, pebbles, tower, Built};
use pp_core::model::{
    apply_move, apply_snipe, config_from_strings, enabled_transitions, is_terminal, output_of, Predicate, PredicateSpec,
};
use pp_core::{Configuration, ModelError, Output, Protocol, Transition};

fn cfg(p: &dyn Protocol, entries: &[(&str, u32)]) -> Configuration {
    Configuration::from_counts(entries.iter().map(|&(n, c)| (p.state_id(n).unwrap(), c)))
}

fn tr(p: &dyn Protocol, a: &str, b: &str, c: &str, d: &str) -> Transition {
    let s = |n: &str| p.state_id(n).unwrap();
    Transition::new(s(a), s(b), s(c), s(d))
}

fn proto(b: &Built) -> &dyn Protocol {
    b.protocol.as_ref()
}

#[test]
fn predicate_examples() {
    let vets = PredicateSpec::threshold(vec![3, 2], 192);
    assert!(vets.eval(&[64, 0]).unwrap());
    assert!(!PredicateSpec::threshold(vec![1], 64).eval(&[0]).unwrap());
    assert!(PredicateSpec::modulo(vec![1], 7, 4).eval(&[11]).unwrap());
    assert!(matches!(vets.eval(&[1]), Err(ModelError::Dimension { .. })));
    let p = Predicate::parse("(>= (mod x 7) 4)", None).unwrap();
    assert!(p.eval(&[11]).unwrap() && !p.eval(&[10]).unwrap());
}

#[test]
fn output_examples() {
    let gm = gen_majority(&[1, -2]).unwrap();
    let p = proto(&gm);
    // run <3·1, -2> to termination by hand: 1,-2 -> -1,0 ; 1,-1 -> 0,0
    let c = cfg(p, &[("1", 3), ("-2", 1)]);
    let c = apply_move(p, &c, &tr(p, "1", "-2", "-1", "0")).unwrap();
    let c = apply_move(p, &c, &tr(p, "1", "-1", "0", "0")).unwrap();
    assert_eq!(c, cfg(p, &[("1", 1), ("0", 3)]));
    assert!(is_terminal(p, &c));
    assert_eq!(output_of(p, &c).unwrap(), Output::Accept);
    assert_eq!(output_of(p, &cfg(p, &[("0", 4)])).unwrap(), Output::Reject);

    let t4 = tower(4).unwrap();
    let p = proto(&t4);
    assert_eq!(output_of(p, &cfg(p, &[("2", 1), ("3", 1)])).unwrap(), Output::Reject);
    assert_eq!(output_of(p, &cfg(p, &[("3", 1), ("4", 1)])).unwrap(), Output::Undecided);
    assert_eq!(output_of(p, &Configuration::empty()).unwrap(), Output::Reject);
}

#[test]
fn enabled_examples() {
    let pb = pebbles(4).unwrap();
    let p = proto(&pb);
    let en = enabled_transitions(p, &cfg(p, &[("1", 2)]), false);
    assert!(en.iter().any(|t| t.canonical() == tr(p, "1", "1", "2", "0").canonical()));
    assert!(enabled_transitions(p, &Configuration::empty(), false).is_empty());

    let t3 = tower(3).unwrap();
    let p = proto(&t3);
    assert!(enabled_transitions(p, &cfg(p, &[("1", 1), ("2", 1)]), true).is_empty());
    assert!(!is_terminal(p, &cfg(p, &[("1", 3)])));
}

#[test]
fn move_examples() {
    let t4 = tower(4).unwrap();
    let p = proto(&t4);
    let d = apply_move(p, &cfg(p, &[("2", 2)]), &tr(p, "2", "2", "2", "3")).unwrap();
    assert_eq!(d, cfg(p, &[("2", 1), ("3", 1)]));
    let c = cfg(p, &[("1", 1), ("2", 1)]);
    assert_eq!(apply_move(p, &c, &tr(p, "1", "2", "1", "2")).unwrap(), c);
    assert!(apply_move(p, &c, &tr(p, "3", "3", "3", "4")).is_err());

    let pb = pebbles(4).unwrap();
    let p = proto(&pb);
    let d = apply_move(p, &cfg(p, &[("3", 1), ("2", 1)]), &tr(p, "3", "2", "4", "4")).unwrap();
    assert_eq!(d, cfg(p, &[("4", 2)]));
}

#[test]
fn snipe_examples() {
    let pb = pebbles(4).unwrap();
    let p = proto(&pb);
    let c = cfg(p, &[("3", 1), ("2", 1), ("0", 3)]);
    let d = apply_snipe(&c, p.state_id("3").unwrap()).unwrap();
    assert_eq!(d, cfg(p, &[("2", 1), ("0", 3)]));
    assert!(is_terminal(p, &d));
    assert_eq!(output_of(p, &d).unwrap(), Output::Reject);
    let one = cfg(p, &[("1", 1)]);
    assert!(apply_snipe(&one, p.state_id("1").unwrap()).unwrap().is_empty());
    assert!(matches!(apply_snipe(&one, p.state_id("2").unwrap()), Err(ModelError::Unoccupied(_))));
    assert!(is_terminal(p, &Configuration::empty()));
}

#[test]
fn configuration_text() {
    let t4 = tower(4).unwrap();
    let p = proto(&t4);
    let c = config_from_strings(p, &["2*1", "3"]).unwrap();
    assert_eq!(c, cfg(p, &[("1", 2), ("3", 1)]));
    assert!(config_from_strings(p, &["9"]).is_err());
}
