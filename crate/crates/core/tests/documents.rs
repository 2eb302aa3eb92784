use advice_automata::advice::{advised_prob, randomized_advised_prob};
use advice_automata::alphabet::Alphabet;
use advice_automata::constructions::{dup_cequal_family, dup_cequal_uniform, palhash_rn};
use advice_automata::document::{LoadedAdvice, MachineDocument};
use advice_automata::fixtures::{random_advice, random_advised_dfa, random_advised_pfa, random_ensemble, rng};
use advice_automata::languages::pal_alphabet;

fn reparse(doc: &MachineDocument) -> MachineDocument {
    let text = doc.emit();
    let back = MachineDocument::parse(&text).unwrap();
    assert_eq!(back.emit(), text);
    back
}

#[test]
fn random_machines_survive_a_round_trip() {
    let sigma = Alphabet::binary();
    let mut r = rng(11);
    for i in 0..20 {
        let m = random_advised_pfa(&mut r, 2 + i % 3, &sigma, &sigma, &[1, 2, 3]).unwrap();
        let h = random_advice(i as u64, sigma.clone());
        let lengths: Vec<usize> = (0..=4).collect();
        let doc = MachineDocument::bundle(
            MachineDocument::pfa(&m),
            Some(MachineDocument::advice(&h, Some(lengths)).unwrap()),
            None,
        );
        let back = reparse(&doc);
        let loaded = back.load_machine().unwrap();
        let Some(LoadedAdvice::Deterministic(h2)) = back.load_advice().unwrap() else {
            panic!("deterministic advice expected");
        };
        for n in 0..=4 {
            for x in sigma.words(n) {
                assert_eq!(advised_prob(&loaded, &h2, &x).unwrap(), advised_prob(&m, &h, &x).unwrap());
            }
        }
    }
}

#[test]
fn dfas_and_ensembles_round_trip() {
    let sigma = Alphabet::binary();
    let mut r = rng(12);
    let m = random_advised_dfa(&mut r, 3, &sigma, &sigma).unwrap();
    let d = random_ensemble(3, sigma.clone(), 3);
    let back = reparse(&MachineDocument::bundle(
        MachineDocument::dfa(&m),
        Some(MachineDocument::ensemble(&d, Some(vec![0, 1, 2, 3])).unwrap()),
        None,
    ));
    let loaded = back.load_machine().unwrap();
    let Some(LoadedAdvice::Randomized(d2)) = back.load_advice().unwrap() else {
        panic!("ensemble expected");
    };
    for n in 0..=3 {
        for x in sigma.words(n) {
            assert_eq!(
                randomized_advised_prob(&loaded, &d2, &x).unwrap(),
                randomized_advised_prob(&m, &d, &x).unwrap()
            );
        }
    }
}

#[test]
fn constructions_round_trip() {
    let (m, h) = dup_cequal_uniform().unwrap();
    let doc = MachineDocument::bundle(
        MachineDocument::pfa(&m),
        Some(MachineDocument::advice(&h, Some((0..=6).collect())).unwrap()),
        Some("dup".into()),
    );
    let back = reparse(&doc);
    assert!(back.load_language().unwrap().is_some());

    let (fam, _) = dup_cequal_family();
    let back = reparse(&MachineDocument::family(&fam, 0..=5).unwrap());
    let loaded = back.load_machine().unwrap();
    let (_, hf) = dup_cequal_family();
    for x in Alphabet::binary().words(4) {
        assert_eq!(advised_prob(&loaded, &hf, &x).unwrap(), advised_prob(&fam, &hf, &x).unwrap());
    }

    let (pal, d) = palhash_rn(true).unwrap();
    let back = reparse(&MachineDocument::ensemble(&d, Some(vec![0, 1, 2, 3])).unwrap());
    let Some(LoadedAdvice::Randomized(d2)) = back.load_advice().unwrap() else {
        panic!("ensemble expected");
    };
    for x in pal_alphabet().words(3) {
        assert_eq!(randomized_advised_prob(&pal, &d2, &x).unwrap(), randomized_advised_prob(&pal, &d, &x).unwrap());
    }
}

#[test]
fn lengths_outside_the_table_are_errors() {
    let (m, h) = dup_cequal_uniform().unwrap();
    let back = reparse(&MachineDocument::advice(&h, Some(vec![2])).unwrap());
    let Some(LoadedAdvice::Deterministic(h2)) = back.load_advice().unwrap() else {
        panic!("deterministic advice expected");
    };
    let x: Vec<_> = Alphabet::binary().words(2).next().unwrap();
    assert!(advised_prob(&m, &h2, &x).is_ok());
    let y: Vec<_> = Alphabet::binary().words(4).next().unwrap();
    assert!(advised_prob(&m, &h2, &y).is_err());
}
