//! Recognizers that use randomized advice.

use std::collections::BTreeMap;

use crate::advice::{AdviceEnsemble, Distribution, LengthPolicy};
use crate::alphabet::{reverse, sym, track_word, Alphabet, Symbol, Word};
use crate::automata::{Pfa, PfaBuilder, Step};
use crate::error::{Error, Result};
use crate::languages::{pal_alphabet, Language};
use crate::linalg::q;

use super::compose::amplify;

/// `D ⊗ D`: pairs two independent draws as the tracks of one advice string.
pub fn paired_ensemble(d: AdviceEnsemble) -> AdviceEnsemble {
    let gamma = d.alphabet().clone();
    AdviceEnsemble::from_fn(gamma.tracks(&gamma), d.policy(), move |n| {
        let dist = d.at(n)?;
        let mut entries = Vec::with_capacity(dist.support().len().pow(2));
        for (u, pu) in dist.support() {
            for (l, pl) in dist.support() {
                entries.push((track_word(u, l)?, pu * pl));
            }
        }
        Distribution::new(entries)
    })
}

/// Uniform over `y#y^R` for `y ∈ {0,1}^n` on length `2n+1`; a point mass on
/// `0^N` for even `N`.
pub fn palhash_ensemble() -> AdviceEnsemble {
    AdviceEnsemble::from_fn(pal_alphabet(), LengthPolicy::Exact, |len| {
        if len % 2 == 0 {
            return Ok(Distribution::point(vec![sym("0"); len]));
        }
        let support = Alphabet::binary()
            .words(len / 2)
            .map(|y| {
                let mut w = y.clone();
                w.push(sym("#"));
                w.extend(reverse(&y));
                w
            })
            .collect();
        Distribution::uniform(support)
    })
}

/// On `⟨x1#x2, y#y^R⟩` compares `x1⊙y` with `x2⊙y^R`; any other shape is
/// rejected. Members of `Pal#` are accepted with certainty, well-formed
/// non-members with probability 1/2 (1/4 when amplified).
pub fn palhash_rn(amplified: bool) -> Result<(Pfa, AdviceEnsemble)> {
    let sigma = pal_alphabet();
    let names = ["ph1-0", "ph1-1", "ph2-0", "ph2-1", "acc", "rej"];
    let mut b = PfaBuilder::new(sigma.tracks(&sigma), names.iter().map(|s| s.to_string()).collect());
    let [p10, p11, p20, p21, acc, rej] = [0, 1, 2, 3, 4, 5];
    for x in sigma.symbols() {
        for y in sigma.symbols() {
            let step = Step::Letter(x.over(y));
            match (x.as_str(), y.as_str()) {
                ("#", "#") => {
                    b.go(&step, p10, p20)?;
                    b.go(&step, p11, p21)?;
                    b.go(&step, p20, rej)?;
                    b.go(&step, p21, rej)?;
                }
                ("#", _) | (_, "#") => {
                    for s in [p10, p11, p20, p21] {
                        b.go(&step, s, rej)?;
                    }
                }
                (u, v) => {
                    let flip = u == "1" && v == "1";
                    for (s0, s1) in [(p10, p11), (p20, p21)] {
                        b.go(&step, s0, if flip { s1 } else { s0 })?;
                        b.go(&step, s1, if flip { s0 } else { s1 })?;
                    }
                }
            }
        }
    }
    for (from, to) in [(p10, rej), (p11, rej), (p20, acc), (p21, rej)] {
        b.go(&Step::Right, from, to)?;
    }
    b.final_state(acc);
    let single = b.build(p10)?;
    let ensemble = palhash_ensemble();
    if !amplified {
        return Ok((single, ensemble));
    }
    Ok((amplify(&single, &sigma, &sigma)?, paired_ensemble(ensemble)))
}

/// A symbol outside `sigma`, used as the filler advice `#^n`.
fn filler(sigma: &Alphabet) -> Symbol {
    let base = sym("#");
    if !sigma.contains(&base) {
        return base;
    }
    (0..)
        .map(|i| sym(&format!("#{i}")))
        .find(|s| !sigma.contains(s))
        .expect("some fresh token")
}

/// Exact-half recognizer for an arbitrary language `A ∌ λ`, tabulated for
/// lengths `0..=n`: the advice is uniform over `Σ^k − A`, or `#^k` when `A`
/// contains the whole slice; the machine accepts with certainty when input
/// and advice agree and flips a fair coin otherwise.
pub fn universal_cequal_rlin(lang: &Language, n: usize) -> Result<(Pfa, AdviceEnsemble)> {
    if lang.contains(&[]) {
        return Err(Error::EmptyStringInLanguage);
    }
    let sigma = lang.alphabet().clone();
    let fill = filler(&sigma);
    let mut gamma_syms = sigma.symbols().to_vec();
    gamma_syms.push(fill.clone());
    let gamma = Alphabet::new(gamma_syms)?;

    let mut b = PfaBuilder::new(sigma.tracks(&gamma), vec!["eq".into(), "neq".into(), "acc".into(), "rej".into()]);
    let [eq, neq, acc, rej] = [0, 1, 2, 3];
    for x in sigma.symbols() {
        for y in gamma.symbols() {
            if x != y {
                b.go(&Step::Letter(x.over(y)), eq, neq)?;
            }
        }
    }
    b.go(&Step::Right, eq, acc)?;
    b.row(&Step::Right, neq, &[(acc, q(1, 2)), (rej, q(1, 2))])?;
    b.final_state(acc);

    let mut table = BTreeMap::new();
    for k in 0..=n {
        let outside: Vec<Word> = sigma.words(k).filter(|w| !lang.contains(w)).collect();
        let dist = if outside.is_empty() {
            Distribution::point(vec![fill.clone(); k])
        } else {
            Distribution::uniform(outside)?
        };
        table.insert(k, dist);
    }
    Ok((b.build(eq)?, AdviceEnsemble::tabulated(gamma, LengthPolicy::Exact, table)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::advice::{randomized_advised_prob, verify_recognition, Advice};
    use crate::alphabet::word;
    use crate::automata::AcceptanceMode;
    use crate::languages::pal_hash;
    use crate::linalg::rational_from_usize;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashSet;

    #[test]
    fn palhash_examples() {
        let (m, d) = palhash_rn(false).unwrap();
        assert_eq!(randomized_advised_prob(&m, &d, &word("0 1 # 1 0")).unwrap(), q(1, 1));
        assert_eq!(randomized_advised_prob(&m, &d, &word("0 0 # 1 0")).unwrap(), q(1, 2));
        assert_eq!(randomized_advised_prob(&m, &d, &word("#")).unwrap(), q(1, 1));
        assert_eq!(randomized_advised_prob(&m, &d, &word("0 # # 1 0")).unwrap(), q(0, 1));
        assert_eq!(randomized_advised_prob(&m, &d, &word("0 1")).unwrap(), q(0, 1));
        let (m2, d2) = palhash_rn(true).unwrap();
        assert_eq!(randomized_advised_prob(&m2, &d2, &word("0 0 # 1 0")).unwrap(), q(1, 4));
        assert_eq!(randomized_advised_prob(&m2, &d2, &word("1 0 # 0 1")).unwrap(), q(1, 1));
    }

    #[test]
    fn palhash_amplified_worst_error() {
        let (m, d) = palhash_rn(true).unwrap();
        let mode = AcceptanceMode::bounded(q(1, 4)).unwrap();
        let r = verify_recognition(&m, Advice::Randomized(&d), &Language::pal_hash(), 5, &mode).unwrap();
        assert_eq!(r.max_error, q(1, 4));
        assert!(r.passed());
        let single = palhash_rn(false).unwrap();
        let r = verify_recognition(&single.0, Advice::Randomized(&single.1), &Language::pal_hash(), 3, &AcceptanceMode::UnboundedError).unwrap();
        assert_eq!(r.max_error, q(1, 2));
        assert!(r.violations.iter().all(|v| !pal_hash(&v.input)));
    }

    #[test]
    fn universal_full_slice_uses_filler() {
        let sigma = Alphabet::binary();
        let lang = Language::new("nonempty", sigma.clone(), |w| !w.is_empty());
        let (m, d) = universal_cequal_rlin(&lang, 3).unwrap();
        for x in sigma.words(3) {
            assert_eq!(randomized_advised_prob(&m, &d, &x).unwrap(), q(1, 2));
        }
        assert_eq!(randomized_advised_prob(&m, &d, &[]).unwrap(), q(1, 1));
    }

    #[test]
    fn universal_empty_language() {
        let (m, d) = universal_cequal_rlin(&Language::empty(Alphabet::binary()), 2).unwrap();
        for x in Alphabet::binary().words(2) {
            assert_eq!(randomized_advised_prob(&m, &d, &x).unwrap(), q(1, 2) + q(1, 8));
        }
        assert_eq!(
            universal_cequal_rlin(&Language::full(Alphabet::binary()), 2).unwrap_err(),
            Error::EmptyStringInLanguage
        );
    }

    #[test]
    fn universal_filler_avoids_input_symbols() {
        let (_, d) = universal_cequal_rlin(&Language::pal_hash(), 1).unwrap();
        assert!(d.alphabet().contains(&sym("#0")));
    }

    #[test]
    fn universal_random_languages() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let sigma = Alphabet::binary();
        for _ in 0..10 {
            let members: HashSet<Word> = (1..=3)
                .flat_map(|k| sigma.words(k).collect::<Vec<_>>())
                .filter(|_| rng.gen_bool(0.5))
                .collect();
            let lang = Language::from_set("random", sigma.clone(), members);
            let (m, d) = universal_cequal_rlin(&lang, 3).unwrap();
            for k in 1..=3 {
                let r = verify_recognition(&m, Advice::Randomized(&d), &lang, k, &AcceptanceMode::ExactHalf).unwrap();
                assert!(r.passed(), "{:?}", r.violations);
                let outside = sigma.words(k).filter(|w| !lang.contains(w)).count();
                for x in sigma.words(k).filter(|w| !lang.contains(w)) {
                    let p = randomized_advised_prob(&m, &d, &x).unwrap();
                    assert_eq!(p, q(1, 2) + q(1, 2) / rational_from_usize(outside));
                }
            }
        }
    }
}
