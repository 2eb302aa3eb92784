//! Symbols, alphabets, strings and the two-track cell notation.
//!
//! Symbols are atomic whitespace-free tokens. A track cell pairing an upper
//! symbol with a lower symbol is itself a symbol, spelled `<upper|lower>`,
//! with `_` standing for the blank padding. Track cells nest, so advice
//! alphabets built from pairs (two independent advice copies, annotated
//! advice) stay representable as plain symbols.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Left endmarker.
pub const LEFT_END: &str = "¢";
/// Right endmarker.
pub const RIGHT_END: &str = "$";
/// Spelling of the blank padding cell inside a track token.
pub const BLANK: &str = "_";

/// An atomic symbol token.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(Arc<str>);

impl Symbol {
    /// Creates a symbol usable in an alphabet. Rejects empty tokens, tokens
    /// with whitespace, the endmarkers and the blank.
    pub fn new(token: &str) -> Result<Self> {
        if token.is_empty()
            || token.chars().any(char::is_whitespace)
            || token == LEFT_END
            || token == RIGHT_END
            || token == BLANK
        {
            return Err(Error::InvalidSymbol(token.to_string()));
        }
        Ok(Symbol(Arc::from(token)))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// The pair `<self|lower>`.
    pub fn over(&self, lower: &Symbol) -> Symbol {
        TrackSymbol::pair(self.clone(), lower.clone()).to_symbol()
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Serialize for Symbol {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Symbol {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Symbol::new(&s).map_err(serde::de::Error::custom)
    }
}

/// Builds a symbol from a token known to be valid.
///
/// # Panics
/// Panics on an invalid token; only meant for literals.
pub fn sym(token: &str) -> Symbol {
    Symbol::new(token).unwrap_or_else(|e| panic!("{e}"))
}

/// A string over some alphabet.
pub type Word = Vec<Symbol>;

/// Splits a whitespace-separated token list into a word.
pub fn word(text: &str) -> Word {
    text.split_whitespace().map(sym).collect()
}

/// Renders a word as a whitespace-separated token list.
pub fn render(w: &[Symbol]) -> String {
    let mut out = String::new();
    for (i, s) in w.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(s.as_str());
    }
    out
}

/// Serde adapters writing words as space-separated token strings.
pub mod serde_word {
    use super::{render, Symbol, Word};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(w: &[Symbol], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&render(w))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Word, D::Error> {
        let text = String::deserialize(d)?;
        text.split_whitespace()
            .map(|t| Symbol::new(t).map_err(serde::de::Error::custom))
            .collect()
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(ws: &[Word], s: S) -> std::result::Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(ws.len()))?;
            for w in ws {
                seq.serialize_element(&render(w))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Word>, D::Error> {
            Vec::<String>::deserialize(d)?
                .iter()
                .map(|text| {
                    text.split_whitespace()
                        .map(|t| Symbol::new(t).map_err(serde::de::Error::custom))
                        .collect()
                })
                .collect()
        }
    }
}

/// An ordered finite set of distinct symbols.
#[derive(Clone)]
pub struct Alphabet {
    symbols: Vec<Symbol>,
    index: HashMap<Symbol, usize>,
}

impl Alphabet {
    pub fn new(symbols: Vec<Symbol>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        let mut index = HashMap::with_capacity(symbols.len());
        for (i, s) in symbols.iter().enumerate() {
            if index.insert(s.clone(), i).is_some() {
                return Err(Error::DuplicateSymbol(s.to_string()));
            }
        }
        Ok(Alphabet { symbols, index })
    }

    /// Alphabet from whitespace-separated tokens.
    pub fn from_tokens(text: &str) -> Result<Self> {
        let symbols = text
            .split_whitespace()
            .map(Symbol::new)
            .collect::<Result<Vec<_>>>()?;
        Alphabet::new(symbols)
    }

    pub fn binary() -> Self {
        Alphabet::from_tokens("0 1").expect("binary alphabet")
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn index_of(&self, s: &Symbol) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn contains(&self, s: &Symbol) -> bool {
        self.index.contains_key(s)
    }

    pub fn get(&self, i: usize) -> &Symbol {
        &self.symbols[i]
    }

    /// Checks that every symbol of `w` belongs to this alphabet.
    pub fn check_word(&self, w: &[Symbol]) -> Result<()> {
        match w.iter().find(|s| !self.contains(s)) {
            Some(s) => Err(Error::UnknownSymbol(s.to_string())),
            None => Ok(()),
        }
    }

    /// Parses user text into a word: whitespace-separated tokens, or, when the
    /// text has no whitespace and is not itself a symbol, one symbol per char.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let text = text.trim();
        if text.is_empty() || text == "λ" {
            return Ok(Vec::new());
        }
        let w: Word = if text.contains(char::is_whitespace) {
            text.split_whitespace().map(Symbol::new).collect::<Result<_>>()?
        } else if let Some(s) = Symbol::new(text).ok().filter(|s| self.contains(s)) {
            vec![s]
        } else {
            text.chars()
                .map(|c| Symbol::new(&c.to_string()))
                .collect::<Result<_>>()?
        };
        self.check_word(&w)?;
        Ok(w)
    }

    /// All words of length `n`, in lexicographic order of symbol indices.
    pub fn words(&self, n: usize) -> Words<'_> {
        Words {
            alphabet: self,
            digits: vec![0; n],
            done: false,
        }
    }

    /// |Σ|^n, or `None` on overflow.
    pub fn count_words(&self, n: usize) -> Option<usize> {
        self.len().checked_pow(u32::try_from(n).ok()?)
    }

    /// Upper-track symbols of a two-track alphabet, in order of first
    /// appearance.
    pub fn upper_alphabet(&self) -> Result<Alphabet> {
        let mut out: Vec<Symbol> = Vec::new();
        for c in self.symbols() {
            let upper = TrackSymbol::parse(c)
                .and_then(|t| t.upper)
                .ok_or_else(|| Error::MalformedMachine(format!("`{c}` is not a two-track cell")))?;
            if !out.contains(&upper) {
                out.push(upper);
            }
        }
        Alphabet::new(out)
    }

    /// The alphabet of all cells `<σ|τ>` with σ from `self` and τ from `lower`.
    pub fn tracks(&self, lower: &Alphabet) -> Alphabet {
        let mut out = Vec::with_capacity(self.len() * lower.len());
        for u in self.symbols() {
            for l in lower.symbols() {
                out.push(u.over(l));
            }
        }
        Alphabet::new(out).expect("track alphabet is non-empty and distinct")
    }
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.symbols.iter()).finish()
    }
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        self.symbols == other.symbols
    }
}

impl Eq for Alphabet {}

/// Iterator over Σ^n.
pub struct Words<'a> {
    alphabet: &'a Alphabet,
    digits: Vec<usize>,
    done: bool,
}

impl Iterator for Words<'_> {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        if self.done {
            return None;
        }
        let out = self
            .digits
            .iter()
            .map(|&d| self.alphabet.get(d).clone())
            .collect();
        // odometer increment, last position fastest
        let base = self.alphabet.len();
        let mut i = self.digits.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            self.digits[i] += 1;
            if self.digits[i] < base {
                break;
            }
            self.digits[i] = 0;
        }
        Some(out)
    }
}

/// One cell of a two-track string. `None` is the blank.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TrackSymbol {
    pub upper: Option<Symbol>,
    pub lower: Option<Symbol>,
}

impl TrackSymbol {
    pub fn new(upper: Option<Symbol>, lower: Option<Symbol>) -> Result<Self> {
        if upper.is_none() && lower.is_none() {
            return Err(Error::InvalidSymbol("<_|_>".into()));
        }
        Ok(TrackSymbol { upper, lower })
    }

    pub fn pair(upper: Symbol, lower: Symbol) -> Self {
        TrackSymbol {
            upper: Some(upper),
            lower: Some(lower),
        }
    }

    pub fn to_symbol(&self) -> Symbol {
        let part = |s: &Option<Symbol>| s.as_ref().map_or(BLANK, |s| s.as_str()).to_owned();
        Symbol(Arc::from(format!(
            "<{}|{}>",
            part(&self.upper),
            part(&self.lower)
        )))
    }

    /// Inverse of [`TrackSymbol::to_symbol`]; `None` when `s` is not a cell.
    pub fn parse(s: &Symbol) -> Option<TrackSymbol> {
        let inner = s.as_str().strip_prefix('<')?.strip_suffix('>')?;
        let mut depth = 0usize;
        let mut split = None;
        for (i, c) in inner.char_indices() {
            match c {
                '<' => depth += 1,
                '>' => depth = depth.checked_sub(1)?,
                '|' if depth == 0 => {
                    if split.is_some() {
                        return None;
                    }
                    split = Some(i);
                }
                _ => {}
            }
        }
        let i = split?;
        let part = |t: &str| -> Option<Option<Symbol>> {
            if t == BLANK {
                Some(None)
            } else {
                Symbol::new(t).ok().map(Some)
            }
        };
        let cell = TrackSymbol {
            upper: part(&inner[..i])?,
            lower: part(&inner[i + 1..])?,
        };
        (cell.upper.is_some() || cell.lower.is_some()).then_some(cell)
    }
}

/// Pairs `x` and `y` cell by cell, padding the shorter one on the right with
/// blanks.
pub fn track_compose(x: &[Symbol], y: &[Symbol]) -> Result<Vec<TrackSymbol>> {
    for s in x.iter().chain(y) {
        if matches!(s.as_str(), LEFT_END | RIGHT_END | BLANK) {
            return Err(Error::InvalidSymbol(s.to_string()));
        }
    }
    let n = x.len().max(y.len());
    Ok((0..n)
        .map(|i| TrackSymbol {
            upper: x.get(i).cloned(),
            lower: y.get(i).cloned(),
        })
        .collect())
}

/// [`track_compose`] flattened to cell symbols, ready to feed a machine.
pub fn track_word(x: &[Symbol], y: &[Symbol]) -> Result<Word> {
    Ok(track_compose(x, y)?.iter().map(TrackSymbol::to_symbol).collect())
}

/// Recovers `(upper, lower)` strings from a track string, dropping blanks.
pub fn split_tracks(cells: &[TrackSymbol]) -> (Word, Word) {
    let upper = cells.iter().filter_map(|c| c.upper.clone()).collect();
    let lower = cells.iter().filter_map(|c| c.lower.clone()).collect();
    (upper, lower)
}

/// Number of occurrences of `s` in `x`.
pub fn symbol_count(x: &[Symbol], s: &Symbol) -> usize {
    x.iter().filter(|t| *t == s).count()
}

pub fn reverse(x: &[Symbol]) -> Word {
    x.iter().rev().cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn compose_equal_lengths() {
        let t = track_word(&word("a b"), &word("0 1")).unwrap();
        assert_eq!(render(&t), "<a|0> <b|1>");
    }

    #[test]
    fn compose_pads_shorter_upper() {
        let t = track_word(&word("a"), &word("0 1")).unwrap();
        assert_eq!(render(&t), "<a|0> <_|1>");
    }

    #[test]
    fn compose_empty() {
        assert!(track_compose(&[], &[]).unwrap().is_empty());
    }

    #[test]
    fn compose_rejects_reserved() {
        let bad = vec![Symbol(Arc::from("$"))];
        assert_eq!(
            track_compose(&bad, &[]),
            Err(Error::InvalidSymbol("$".into()))
        );
    }

    #[test]
    fn counts_and_reverse() {
        assert_eq!(symbol_count(&word("a1 a1 a2"), &sym("a1")), 2);
        assert_eq!(symbol_count(&[], &sym("a1")), 0);
        assert_eq!(symbol_count(&word("1 1 1"), &sym("0")), 0);
        assert_eq!(reverse(&word("0 1 1")), word("1 1 0"));
        assert_eq!(reverse(&[]), Word::new());
        assert_eq!(reverse(&word("0")), word("0"));
    }

    #[test]
    fn alphabet_rejects_duplicates_and_reserved() {
        assert!(Alphabet::from_tokens("").is_err());
        assert!(matches!(
            Alphabet::from_tokens("a a"),
            Err(Error::DuplicateSymbol(_))
        ));
        assert!(Alphabet::from_tokens("a $").is_err());
        assert!(Alphabet::from_tokens("a ¢").is_err());
        // `#` is an ordinary letter (Pal#, Σ6 use it)
        assert!(Alphabet::from_tokens("0 1 #").is_ok());
    }

    #[test]
    fn nested_track_tokens_parse() {
        let inner = sym("0").over(&sym("#"));
        let cell = sym("1").over(&inner);
        assert_eq!(cell.as_str(), "<1|<0|#>>");
        let parsed = TrackSymbol::parse(&cell).unwrap();
        assert_eq!(parsed.upper, Some(sym("1")));
        assert_eq!(parsed.lower, Some(inner));
        assert!(TrackSymbol::parse(&sym("a")).is_none());
    }

    #[test]
    fn words_enumerates_in_order() {
        let a = Alphabet::binary();
        let all: Vec<String> = a.words(2).map(|w| render(&w)).collect();
        assert_eq!(all, ["0 0", "0 1", "1 0", "1 1"]);
        assert_eq!(a.words(0).count(), 1);
    }

    #[test]
    fn parse_word_forms() {
        let a = Alphabet::from_tokens("0 1 #").unwrap();
        assert_eq!(a.parse_word("01#10").unwrap(), word("0 1 # 1 0"));
        assert_eq!(a.parse_word("0 1").unwrap(), word("0 1"));
        assert!(a.parse_word("").unwrap().is_empty());
        assert!(a.parse_word("2").is_err());
        let b = Alphabet::from_tokens("a1 a2").unwrap();
        assert_eq!(b.parse_word("a1").unwrap(), word("a1"));
    }

    fn bits() -> impl Strategy<Value = Word> {
        prop::collection::vec(prop_oneof![Just(sym("0")), Just(sym("1"))], 0..8)
    }

    proptest! {
        #[test]
        fn compose_length_and_projection(x in bits(), y in bits()) {
            let cells = track_compose(&x, &y).unwrap();
            prop_assert_eq!(cells.len(), x.len().max(y.len()));
            let (u, l) = split_tracks(&cells);
            prop_assert_eq!(u, x);
            prop_assert_eq!(l, y);
            for c in &cells {
                let back = TrackSymbol::parse(&c.to_symbol()).unwrap();
                prop_assert_eq!(&back, c);
            }
        }

        #[test]
        fn reverse_involution_and_count_additive(x in bits(), y in bits()) {
            prop_assert_eq!(reverse(&reverse(&x)), x.clone());
            let mut xy = x.clone();
            xy.extend(y.iter().cloned());
            let one = sym("1");
            prop_assert_eq!(symbol_count(&xy, &one), symbol_count(&x, &one) + symbol_count(&y, &one));
        }
    }
}
