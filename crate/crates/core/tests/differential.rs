use polyech::differential::{differential, differential_chain, differential_with, TwoHChoice};
use polyech::sample;

#[test]
fn delta_squared_on_mixed_samples() {
    let mut rng = sample::rng(11);
    for _ in 0..300 {
        let g = sample::mixed_generator(&mut rng).unwrap();
        let d = differential(&g).unwrap();
        let dd = differential_chain(&d).unwrap();
        assert!(dd.is_zero(), "delta^2 != 0 on {g}: {dd:?}");
    }
}

#[test]
fn two_h_choice_is_irrelevant() {
    let mut rng = sample::rng(12);
    for _ in 0..300 {
        let g = sample::mixed_generator(&mut rng).unwrap();
        assert_eq!(
            differential_with(&g, TwoHChoice::Following).unwrap(),
            differential_with(&g, TwoHChoice::Preceding).unwrap(),
            "{g}"
        );
    }
}
