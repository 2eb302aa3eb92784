use proptest::prelude::*;

use advice_automata::advice::{advised_prob, randomized_advised_prob, AdviceEnsemble};
use advice_automata::alphabet::Alphabet;
use advice_automata::constructions::{build_equivalence, compile_advised_family, derandomize, dnormalize, extract_equivalence};
use advice_automata::fixtures::{random_advice, random_advised_pfa, random_language, rng};
use advice_automata::q;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn normalizing_keeps_every_probability(seed in any::<u64>(), states in 2usize..4) {
        let sigma = Alphabet::binary();
        let mut r = rng(seed);
        let m = random_advised_pfa(&mut r, states, &sigma, &sigma, &[1, 2, 3]).unwrap();
        let h = random_advice(seed, sigma.clone());
        let nm = dnormalize(&m).unwrap();
        let (dfa, dt) = derandomize(&nm, &AdviceEnsemble::from_advice(&h)).unwrap();
        for n in 0..=3 {
            for x in sigma.words(n) {
                let p = advised_prob(&m, &h, &x).unwrap();
                prop_assert_eq!(&advised_prob(&nm, &h, &x).unwrap(), &p);
                prop_assert_eq!(randomized_advised_prob(&dfa, &dt, &x).unwrap(), p);
            }
        }
    }

    #[test]
    fn compiled_machines_decide_their_language(seed in any::<u64>()) {
        let sigma = Alphabet::binary();
        let mut r = rng(seed);
        let lang = random_language(&mut r, &sigma, 4);
        let parts: Vec<_> = (0..=4).map(|n| build_equivalence(&lang, n)).collect();
        let (m, h) = compile_advised_family(&parts).unwrap();
        for n in 0..=4 {
            for x in sigma.words(n) {
                prop_assert_eq!(advised_prob(&m, &h, &x).unwrap() == q(1, 1), lang.contains(&x));
            }
            prop_assert!(extract_equivalence(&m, &h, n).unwrap().class_count() <= parts[n].class_count());
        }
    }
}
