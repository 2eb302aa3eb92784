//! Membership oracles for the witness languages.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use crate::alphabet::{reverse, sym, symbol_count, Alphabet, Symbol, Word};
use crate::error::{Error, Result};

type Predicate = dyn Fn(&[Symbol]) -> bool + Send + Sync;

/// A named language given by a total membership procedure.
#[derive(Clone)]
pub struct Language {
    name: String,
    alphabet: Alphabet,
    member: Arc<Predicate>,
}

impl fmt::Debug for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Language")
            .field("name", &self.name)
            .field("alphabet", &self.alphabet)
            .finish_non_exhaustive()
    }
}

impl Language {
    pub fn new(
        name: impl Into<String>,
        alphabet: Alphabet,
        member: impl Fn(&[Symbol]) -> bool + Send + Sync + 'static,
    ) -> Self {
        Language {
            name: name.into(),
            alphabet,
            member: Arc::new(member),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn contains(&self, w: &[Symbol]) -> bool {
        (self.member)(w)
    }

    /// Members of length `n`, in lexicographic order.
    pub fn slice(&self, n: usize) -> Vec<Word> {
        self.alphabet.words(n).filter(|w| self.contains(w)).collect()
    }

    pub fn complement(&self) -> Language {
        let inner = self.member.clone();
        let name = match self.name.strip_prefix("co-") {
            Some(base) => base.to_string(),
            None => format!("co-{}", self.name),
        };
        Language {
            name,
            alphabet: self.alphabet.clone(),
            member: Arc::new(move |w| !inner(w)),
        }
    }

    pub fn dup() -> Language {
        Language::new("dup", Alphabet::binary(), dup)
    }

    pub fn pal_hash() -> Language {
        Language::new("pal#", pal_alphabet(), pal_hash)
    }

    pub fn ip_star() -> Language {
        Language::new("ip*", Alphabet::binary(), ip_star)
    }

    pub fn l_eq() -> Language {
        Language::new("l-eq", Alphabet::binary(), l_eq)
    }

    pub fn equal6() -> Language {
        Language::new("equal6", sigma6(), equal6)
    }

    pub fn l_ij(i: usize, j: usize) -> Language {
        Language::new(format!("l-{i}-{j}"), sigma6(), move |w| l_ij(i, j, w))
    }

    pub fn empty(alphabet: Alphabet) -> Language {
        Language::new("empty", alphabet, |_| false)
    }

    pub fn full(alphabet: Alphabet) -> Language {
        Language::new("full", alphabet, |_| true)
    }

    /// A finite language given by its members.
    pub fn from_set(name: impl Into<String>, alphabet: Alphabet, members: HashSet<Word>) -> Language {
        Language::new(name, alphabet, move |w| members.contains(w))
    }

    /// Looks a language up by name: `dup`, `pal#`, `ip*`, `l-eq`, `equal6`,
    /// `l-i-j`, `empty`, `full` (binary), with an optional `co-` prefix.
    pub fn by_name(name: &str) -> Result<Language> {
        if let Some(base) = name.strip_prefix("co-") {
            return Ok(Language::by_name(base)?.complement());
        }
        let lang = match name {
            "dup" => Language::dup(),
            "pal#" | "pal-hash" => Language::pal_hash(),
            "ip*" | "ip-star" => Language::ip_star(),
            "l-eq" | "leq" => Language::l_eq(),
            "equal6" => Language::equal6(),
            "empty" => Language::empty(Alphabet::binary()),
            "full" => Language::full(Alphabet::binary()),
            other => {
                let parts: Vec<&str> = other.split('-').collect();
                match parts.as_slice() {
                    ["l", i, j] => {
                        let parse = |s: &str| s.parse::<usize>().ok().filter(|k| (1..=6).contains(k));
                        match (parse(i), parse(j)) {
                            (Some(i), Some(j)) if i != j => Language::l_ij(i, j),
                            _ => return Err(Error::UnknownLanguage(name.into())),
                        }
                    }
                    _ => return Err(Error::UnknownLanguage(name.into())),
                }
            }
        };
        Ok(lang)
    }
}

/// `{0, 1, #}`.
pub fn pal_alphabet() -> Alphabet {
    Alphabet::from_tokens("0 1 #").expect("static alphabet")
}

/// `{a1, …, a6, #}`.
pub fn sigma6() -> Alphabet {
    Alphabet::from_tokens("a1 a2 a3 a4 a5 a6 #").expect("static alphabet")
}

fn bit(s: &Symbol) -> Option<u8> {
    match s.as_str() {
        "0" => Some(0),
        "1" => Some(1),
        _ => None,
    }
}

/// `u ⊙ v mod 2` over binary strings of equal length; `None` on other symbols.
pub fn inner_product(u: &[Symbol], v: &[Symbol]) -> Option<u8> {
    if u.len() != v.len() {
        return None;
    }
    let mut acc = 0;
    for (a, b) in u.iter().zip(v) {
        acc ^= bit(a)? & bit(b)?;
    }
    Some(acc)
}

/// `{ww}`.
pub fn dup(x: &[Symbol]) -> bool {
    let n = x.len();
    n % 2 == 0 && x[..n / 2] == x[n / 2..]
}

/// `{w#w^R : w ∈ {0,1}*}`.
pub fn pal_hash(x: &[Symbol]) -> bool {
    let n = x.len();
    if n % 2 == 0 {
        return false;
    }
    let (left, rest) = x.split_at(n / 2);
    let (mid, right) = rest.split_at(1);
    mid[0].as_str() == "#"
        && left.iter().all(|s| bit(s).is_some())
        && left.iter().eq(right.iter().rev())
}

/// `{a u v : a ∈ {λ,0,1}, |u| = |v|, u^R ⊙ v ≡ 0}`; the parse of `a` is fixed
/// by the parity of `|x|`.
pub fn ip_star(x: &[Symbol]) -> bool {
    if x.iter().any(|s| bit(s).is_none()) {
        return false;
    }
    let body = if x.len() % 2 == 1 { &x[1..] } else { x };
    let (u, v) = body.split_at(body.len() / 2);
    inner_product(&reverse(u), v) == Some(0)
}

/// `{0^k 1^k}`.
pub fn l_eq(x: &[Symbol]) -> bool {
    let n = x.len();
    n % 2 == 0
        && x[..n / 2].iter().all(|s| s.as_str() == "0")
        && x[n / 2..].iter().all(|s| s.as_str() == "1")
}

fn letter(i: usize) -> Symbol {
    sym(&format!("a{i}"))
}

/// `#_{a_i}(x) = #_{a_j}(x)`.
pub fn l_ij(i: usize, j: usize, x: &[Symbol]) -> bool {
    symbol_count(x, &letter(i)) == symbol_count(x, &letter(j))
}

/// All six letter counts agree.
pub fn equal6(x: &[Symbol]) -> bool {
    let c = symbol_count(x, &letter(1));
    (2..=6).all(|i| symbol_count(x, &letter(i)) == c)
}
