use anyhow::{bail, Result};

use advice_automata::alphabet::Alphabet;
use advice_automata::automata::{always_accept, coin_machine};
use advice_automata::constructions::{dup_cequal_family, dup_cequal_uniform, dup_rn, equal6_machine, palhash_rn};
use advice_automata::document::{LoadedAdvice, LoadedMachine, MachineDocument};
use advice_automata::{q, AcceptanceMode};

pub const NAMES: &[&str] = &[
    "dup-uniform",
    "dup-family",
    "dup-rn",
    "dup-rn-amplified",
    "palhash",
    "palhash-amplified",
    "equal6",
    "coin",
    "always",
];

/// A named construction with the language and mode it is meant for.
pub struct Built {
    pub machine: LoadedMachine,
    pub advice: Option<LoadedAdvice>,
    pub language: String,
    pub mode: AcceptanceMode,
}

pub fn build(name: &str) -> Result<Built> {
    let quarter = || AcceptanceMode::bounded(q(1, 4));
    let built = match name {
        "dup-uniform" => {
            let (m, h) = dup_cequal_uniform()?;
            Built {
                machine: LoadedMachine::Pfa(m),
                advice: Some(LoadedAdvice::Deterministic(h)),
                language: "dup".into(),
                mode: AcceptanceMode::ExactHalf,
            }
        }
        "dup-family" => {
            let (m, h) = dup_cequal_family();
            Built {
                machine: LoadedMachine::Family(m),
                advice: Some(LoadedAdvice::Deterministic(h)),
                language: "dup".into(),
                mode: AcceptanceMode::ExactHalf,
            }
        }
        "dup-rn" | "dup-rn-amplified" | "palhash" | "palhash-amplified" => {
            let amplified = name.ends_with("amplified");
            let (m, d) = if name.starts_with("dup") { dup_rn(amplified)? } else { palhash_rn(amplified)? };
            Built {
                machine: LoadedMachine::Pfa(m),
                advice: Some(LoadedAdvice::Randomized(d)),
                language: if name.starts_with("dup") { "dup" } else { "pal#" }.into(),
                mode: if amplified { quarter()? } else { AcceptanceMode::UnboundedError },
            }
        }
        "equal6" => Built {
            machine: LoadedMachine::Pfa(equal6_machine()?),
            advice: None,
            language: "equal6".into(),
            mode: AcceptanceMode::ExactHalf,
        },
        "coin" => Built {
            machine: LoadedMachine::Pfa(coin_machine(Alphabet::binary())),
            advice: None,
            language: "empty".into(),
            mode: AcceptanceMode::UnboundedError,
        },
        "always" => Built {
            machine: LoadedMachine::Pfa(always_accept(Alphabet::binary())),
            advice: None,
            language: "full".into(),
            mode: AcceptanceMode::BoundedError(q(0, 1)),
        },
        other => bail!("unknown construction `{other}`; known: {}", NAMES.join(", ")),
    };
    Ok(built)
}

/// The construction as a bundle document, with length-dependent parts
/// written out for `lengths`.
pub fn document(b: &Built, lengths: &[usize]) -> Result<MachineDocument> {
    let machine = match &b.machine {
        LoadedMachine::Dfa(m) => MachineDocument::dfa(m),
        LoadedMachine::Pfa(m) => MachineDocument::pfa(m),
        LoadedMachine::Family(m) => MachineDocument::family(m, lengths.iter().copied())?,
    };
    let advice = match &b.advice {
        None => None,
        Some(LoadedAdvice::Deterministic(h)) => Some(MachineDocument::advice(h, Some(lengths.to_vec()))?),
        Some(LoadedAdvice::Randomized(d)) => Some(MachineDocument::ensemble(d, Some(lengths.to_vec()))?),
    };
    Ok(MachineDocument::bundle(machine, advice, Some(b.language.clone())))
}
