//! `advice`: simulate, verify and refute advised automata from the command
//! line.

mod builders;
mod report;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use advice_automata::advice::{verify_recognition, Advice};
use advice_automata::alphabet::{render, Alphabet, TrackSymbol};
use advice_automata::automata::{classify, AcceptanceMode, Classification, Dfa, Machine};
use advice_automata::criteria::{density_table, refute_cequal_complement_dup, refute_plin_ipstar, MachineAt, PlinSearch};
use advice_automata::document::{LoadedAdvice, LoadedMachine, MachineDocument};
use advice_automata::fixtures::{cequal_candidates, plin_candidates};
use advice_automata::game::{
    optimal_randomized_advice, payoff_columns, payoff_matrix_with, sample_columns, worst_case_distribution, GameBudget,
    PayoffMatrix,
};
use advice_automata::languages::Language;
use advice_automata::linalg::{parse_rational, Matrix, Rational};
use advice_automata::{q, Error};

use report::{Format, Report};

#[derive(Parser)]
#[command(name = "advice", version, about = "Exact simulation and verification of finite automata with advice")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format for reports.
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Include wall-clock time in the report.
    #[arg(long, global = true)]
    timing: bool,
    /// Largest number of inputs enumerated at one length.
    #[arg(long, global = true, default_value_t = 1 << 20)]
    max_strings: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Acceptance probability of one input.
    Simulate {
        #[command(flatten)]
        source: Source,
        input: String,
        #[command(flatten)]
        mode: ModeArgs,
    },
    /// Checks a recognizer against a language on every input of each length.
    Verify {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        language: Option<String>,
        /// `n`, `a..b` or `a..=b` (both inclusive).
        #[arg(long, default_value = "0..6")]
        lengths: String,
        #[command(flatten)]
        mode: ModeArgs,
        /// Witnesses listed per length.
        #[arg(long, default_value_t = 10)]
        witnesses: usize,
    },
    /// Runs a refutation against candidate files, or against the built-in
    /// candidates when none are given.
    Refute {
        #[arg(value_parser = ["cequal-codup", "plin-ipstar"])]
        criterion: String,
        candidates: Vec<PathBuf>,
        #[arg(long)]
        start_half: Option<usize>,
        #[arg(long, default_value_t = 4096)]
        budget: usize,
    },
    /// Solves the advice game of a DFA against a language.
    Game {
        #[command(flatten)]
        source: Source,
        /// Reads the payoff grid from a file instead of building it.
        #[arg(long, conflicts_with_all = ["machine", "builder"])]
        payoff: Option<PathBuf>,
        #[arg(long)]
        language: Option<String>,
        #[arg(short, long, default_value_t = 1)]
        n: usize,
        /// Advice alphabet; defaults to the lower-track symbols of the machine.
        #[arg(long)]
        advice_alphabet: Option<String>,
        /// Also print the hardest input distribution and the best advice
        /// string against it.
        #[arg(long)]
        worst_case: bool,
        #[arg(long)]
        show_payoff: bool,
        /// Largest number of advice columns.
        #[arg(long, default_value_t = 4096)]
        max_columns: usize,
        /// Keep only this many random columns (heuristic).
        #[arg(long)]
        subsample: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Distance of a symmetric difference from half, per length.
    Density {
        language: String,
        /// Second language; otherwise the language of the given machine.
        other: Option<String>,
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        mode: ModeArgs,
        #[arg(long, default_value = "1..12")]
        lengths: String,
    },
    /// Writes a named construction as a document.
    Build {
        #[arg(value_parser = builders::NAMES.to_vec())]
        name: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Lengths at which length-dependent parts are written out.
        #[arg(long, default_value = "0..8")]
        lengths: String,
    },
}

#[derive(Args, Clone)]
struct Source {
    /// Machine document (`dfa`, `pfa`, `pfa-family` or `bundle`).
    #[arg(long)]
    machine: Option<PathBuf>,
    /// Advice document, overriding any advice in the machine bundle.
    #[arg(long)]
    advice: Option<PathBuf>,
    /// A named construction instead of a file.
    #[arg(long, conflicts_with = "machine")]
    builder: Option<String>,
}

#[derive(Args, Clone)]
struct ModeArgs {
    /// `exact-half`, `unbounded` or `bounded`.
    #[arg(long)]
    mode: Option<String>,
    /// Error bound for `bounded`.
    #[arg(long)]
    epsilon: Option<String>,
}

struct Loaded {
    machine: LoadedMachine,
    advice: Option<LoadedAdvice>,
    language: Option<String>,
    mode: Option<AcceptanceMode>,
}

fn read_document(path: &Path) -> Result<MachineDocument> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    MachineDocument::parse(&text).with_context(|| format!("in {}", path.display()))
}

impl Source {
    fn is_given(&self) -> bool {
        self.machine.is_some() || self.builder.is_some()
    }

    fn load(&self) -> Result<Loaded> {
        let mut loaded = match (&self.machine, &self.builder) {
            (Some(path), _) => {
                let doc = read_document(path)?;
                let language = match &doc {
                    MachineDocument::Bundle(b) => b.language.clone(),
                    _ => None,
                };
                Loaded { machine: doc.load_machine()?, advice: doc.load_advice()?, language, mode: None }
            }
            (None, Some(name)) => {
                let b = builders::build(name)?;
                Loaded { machine: b.machine, advice: b.advice, language: Some(b.language), mode: Some(b.mode) }
            }
            (None, None) => bail!("give --machine FILE or --builder NAME"),
        };
        if let Some(path) = &self.advice {
            let doc = read_document(path)?;
            loaded.advice = Some(doc.load_advice()?.ok_or_else(|| anyhow!("{} holds no advice", path.display()))?);
        }
        Ok(loaded)
    }
}

impl Loaded {
    fn advice(&self) -> Advice<'_> {
        self.advice.as_ref().map_or(Advice::None, LoadedAdvice::as_advice)
    }

    /// Alphabet the user's inputs are written over.
    fn input_alphabet(&self) -> Result<Alphabet> {
        let a = Machine::alphabet(&self.machine);
        Ok(if self.advice.is_some() { a.upper_alphabet()? } else { a.clone() })
    }

    fn language(&self, explicit: &Option<String>) -> Result<Language> {
        let name = explicit.as_ref().or(self.language.as_ref()).ok_or_else(|| anyhow!("give --language"))?;
        Ok(Language::by_name(name)?)
    }
}

impl ModeArgs {
    fn resolve(&self, fallback: Option<AcceptanceMode>) -> Result<Option<AcceptanceMode>> {
        let epsilon = self.epsilon.as_deref().map(parse_rational).transpose()?;
        let mode = match self.mode.as_deref() {
            None => return Ok(fallback),
            Some("exact-half") => AcceptanceMode::ExactHalf,
            Some("unbounded") => AcceptanceMode::UnboundedError,
            Some("bounded") => AcceptanceMode::bounded(epsilon.ok_or_else(|| anyhow!("bounded mode needs --epsilon"))?)?,
            Some(other) => bail!("unknown mode `{other}`"),
        };
        Ok(Some(mode))
    }
}

fn parse_lengths(text: &str) -> Result<Vec<usize>> {
    let bad = || anyhow!("bad length range `{text}`");
    let (a, b) = match text.split_once("..") {
        Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim_start_matches('=').trim().parse().map_err(|_| bad())?),
        None => {
            let n = text.trim().parse().map_err(|_| bad())?;
            (n, n)
        }
    };
    if a > b {
        return Err(bad());
    }
    Ok((a..=b).collect())
}

fn within_budget(alphabet: &Alphabet, n: usize, max: usize) -> Result<()> {
    match alphabet.count_words(n) {
        Some(k) if k <= max => Ok(()),
        _ => Err(Error::ScaleLimit(format!("|Σ|^{n} inputs exceed --max-strings {max}")).into()),
    }
}

fn verdict_name(c: Classification) -> &'static str {
    match c {
        Classification::Member => "member",
        Classification::NonMember => "non-member",
        Classification::Undetermined => "undetermined",
    }
}

fn simulate(source: &Source, input: &str, mode: &ModeArgs) -> Result<(Value, usize)> {
    let loaded = source.load()?;
    let x = loaded.input_alphabet()?.parse_word(input)?;
    let p = loaded.advice().prob(&loaded.machine, &x)?;
    let mut out = json!({"input": render(&x), "length": x.len(), "probability": p.to_string()});
    if let Some(mode) = mode.resolve(loaded.mode.clone())? {
        out["mode"] = json!(mode.to_string());
        out["verdict"] = json!(verdict_name(classify(&p, &mode)));
    }
    Ok((out, 0))
}

fn verify(
    source: &Source,
    language: &Option<String>,
    lengths: &str,
    mode: &ModeArgs,
    witnesses: usize,
    max_strings: usize,
) -> Result<(Value, usize)> {
    let loaded = source.load()?;
    let lang = loaded.language(language)?;
    let mode = mode.resolve(loaded.mode.clone())?.ok_or_else(|| anyhow!("give --mode"))?;
    let mut rows = Vec::new();
    let mut violations = 0;
    for n in parse_lengths(lengths)? {
        within_budget(lang.alphabet(), n, max_strings)?;
        let r = verify_recognition(&loaded.machine, loaded.advice(), &lang, n, &mode)?;
        violations += r.violations.len();
        let shown: Vec<Value> = r
            .violations
            .iter()
            .take(witnesses)
            .map(|v| {
                json!({"input": render(&v.input), "probability": v.probability.to_string(),
                       "member": v.member, "verdict": verdict_name(v.verdict)})
            })
            .collect();
        rows.push(json!({"n": n, "inputs": r.inputs, "max_error": r.max_error.to_string(),
                         "violations": r.violations.len(), "witnesses": shown}));
    }
    Ok((json!({"language": lang.name(), "mode": mode.to_string(), "lengths": rows}), violations))
}

fn refute(criterion: &str, files: &[PathBuf], start_half: Option<usize>, budget: usize) -> Result<(Value, usize)> {
    type Entry = (String, Box<dyn MachineAt>, advice_automata::advice::AdviceFunction);
    let mut entries: Vec<Entry> = Vec::new();
    if files.is_empty() {
        let fixtures = if criterion == "cequal-codup" { cequal_candidates()? } else { plin_candidates()? };
        entries.extend(fixtures.into_iter().map(|c| (c.name, c.machine, c.advice)));
    }
    for path in files {
        let doc = read_document(path)?;
        let h = match doc.load_advice()? {
            Some(LoadedAdvice::Deterministic(h)) => h,
            _ => bail!("{}: refutation needs deterministic advice", path.display()),
        };
        entries.push((path.display().to_string(), Box::new(doc.load_machine()?), h));
    }
    let search = PlinSearch { start_half, budget, ..PlinSearch::default() };
    let mut rows = Vec::new();
    let mut failures = 0;
    for (name, m, h) in &entries {
        let outcome = if criterion == "cequal-codup" {
            refute_cequal_complement_dup(m.as_ref(), h).map(|r| serde_json::to_value(r).expect("trace serializes"))
        } else {
            refute_plin_ipstar(m.as_ref(), h, &search).map(|r| serde_json::to_value(r).expect("trace serializes"))
        };
        match outcome {
            Ok(trace) => rows.push(json!({"candidate": name, "refuted": true, "trace": trace})),
            Err(e) => {
                failures += 1;
                rows.push(json!({"candidate": name, "refuted": false, "error": e.to_string()}));
            }
        }
    }
    Ok((json!({"criterion": criterion, "candidates": rows}), failures))
}

/// Lower-track symbols of the cells, in order of first appearance.
fn lower_alphabet(cells: &Alphabet) -> Result<Alphabet> {
    let mut lowers = Vec::new();
    for s in cells.symbols() {
        let lower = TrackSymbol::parse(s)
            .and_then(|t| t.lower)
            .ok_or_else(|| anyhow!("cell `{s}` has no advice track"))?;
        if !lowers.contains(&lower) {
            lowers.push(lower);
        }
    }
    Ok(Alphabet::new(lowers)?)
}

fn read_payoff(path: &Path) -> Result<PayoffMatrix> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let v: Value = serde_json::from_str(&text).with_context(|| format!("in {}", path.display()))?;
    let grid = v
        .get("grid")
        .or_else(|| v.pointer("/results/payoff/grid"))
        .and_then(Value::as_array)
        .ok_or_else(|| anyhow!("{}: no `grid` array", path.display()))?;
    let rows = grid
        .iter()
        .map(|row| {
            let row = row.as_str().ok_or_else(|| anyhow!("grid rows are strings of rationals"))?;
            row.split_whitespace().map(|p| Ok(parse_rational(p)?)).collect::<Result<Vec<Rational>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PayoffMatrix::from_grid(Matrix::from_rows(rows)?))
}

#[allow(clippy::too_many_arguments)]
fn game(
    source: &Source,
    payoff: &Option<PathBuf>,
    language: &Option<String>,
    n: usize,
    advice_alphabet: &Option<String>,
    worst_case: bool,
    show_payoff: bool,
    max_columns: usize,
    subsample: Option<usize>,
    seed: u64,
    max_strings: usize,
) -> Result<(Value, usize)> {
    let p = match payoff {
        Some(path) => read_payoff(path)?,
        None => {
            let loaded = source.load()?;
            let m = match &loaded.machine {
                LoadedMachine::Dfa(m) => m.clone(),
                LoadedMachine::Pfa(m) => Dfa::from_pfa(m).context("the game needs a deterministic machine")?,
                LoadedMachine::Family(_) => bail!("the game needs a single deterministic machine"),
            };
            let lang = loaded.language(language)?;
            let gamma = match advice_alphabet {
                Some(text) => Alphabet::from_tokens(text)?,
                None => lower_alphabet(m.alphabet())?,
            };
            match subsample {
                Some(k) => {
                    within_budget(lang.alphabet(), n, max_strings)?;
                    if k > max_columns {
                        return Err(Error::ScaleLimit(format!("{k} columns exceed --max-columns {max_columns}")).into());
                    }
                    payoff_columns(&m, &lang, n, sample_columns(&gamma, n, k, seed)?)?
                }
                None => {
                    let budget = GameBudget { max_inputs: max_strings, max_columns };
                    payoff_matrix_with(&m, &lang, n, &gamma, &budget)?
                }
            }
        }
    };
    let solution = optimal_randomized_advice(&p)?;
    let worst = worst_case_distribution(&p)?;
    let guarantee = p.advice_success(&solution.advice).into_iter().min().expect("some input");
    let mut violations = 0;
    if guarantee < solution.value {
        violations += 1;
    }
    if worst.attained != solution.value {
        violations += 1;
    }
    let mut out = json!({
        "n": p.n,
        "rows": p.grid.rows(),
        "columns": p.grid.cols(),
        "heuristic": p.subsampled,
        "value": solution.value.to_string(),
        "advice_strategy": solution.advice,
        "input_strategy": solution.input,
        "guarantee": guarantee.to_string(),
        "duality": {"maximin": solution.value.to_string(), "minimax": worst.attained.to_string(),
                    "equal": worst.attained == solution.value},
    });
    if p.subsampled {
        out["note"] = json!("columns are a random subsample; the value holds for the subsample only");
    }
    if worst_case {
        out["worst_case"] = serde_json::to_value(&worst)?;
    }
    if show_payoff {
        out["payoff"] = serde_json::to_value(&p)?;
    }
    Ok((out, violations))
}

fn density(
    a: &str,
    other: &Option<String>,
    source: &Source,
    mode: &ModeArgs,
    lengths: &str,
    max_strings: usize,
) -> Result<(Value, usize)> {
    let a = Language::by_name(a)?;
    let b = match (other, source.is_given()) {
        (Some(name), false) => Language::by_name(name)?,
        (None, true) => {
            let loaded = source.load()?;
            let mode = mode.resolve(loaded.mode.clone())?.ok_or_else(|| anyhow!("give --mode"))?;
            let Loaded { machine, advice, .. } = loaded;
            Language::new("machine", a.alphabet().clone(), move |x| {
                let adv = advice.as_ref().map_or(Advice::None, LoadedAdvice::as_advice);
                adv.prob(&machine, x).is_ok_and(|p| classify(&p, &mode) == Classification::Member)
            })
        }
        _ => bail!("give a second language or a machine, not both"),
    };
    let lengths = parse_lengths(lengths)?;
    for &n in &lengths {
        within_budget(a.alphabet(), n, max_strings)?;
    }
    let table: Vec<Value> = density_table(&a, &b, lengths)?
        .into_iter()
        .map(|(n, ell)| json!({"n": n, "ell": ell.to_string()}))
        .collect();
    let out_of_range = density_table_check(&table);
    Ok((json!({"a": a.name(), "b": b.name(), "table": table}), out_of_range))
}

/// Entries outside `[0, 1/2]`; always zero for a correct computation.
fn density_table_check(table: &[Value]) -> usize {
    table
        .iter()
        .filter(|row| {
            let ell = row["ell"].as_str().and_then(|s| parse_rational(s).ok());
            !ell.is_some_and(|e| e >= q(0, 1) && e <= q(1, 2))
        })
        .count()
}

fn build(name: &str, output: &Option<PathBuf>, lengths: &str) -> Result<()> {
    let b = builders::build(name)?;
    let text = builders::document(&b, &parse_lengths(lengths)?)?.emit();
    match output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<Option<(Value, usize)>> {
    let out = match &cli.command {
        Command::Simulate { source, input, mode } => simulate(source, input, mode)?,
        Command::Verify { source, language, lengths, mode, witnesses } => {
            verify(source, language, lengths, mode, *witnesses, cli.max_strings)?
        }
        Command::Refute { criterion, candidates, start_half, budget } => {
            refute(criterion, candidates, *start_half, *budget)?
        }
        Command::Game {
            source,
            payoff,
            language,
            n,
            advice_alphabet,
            worst_case,
            show_payoff,
            max_columns,
            subsample,
            seed,
        } => game(
            source,
            payoff,
            language,
            *n,
            advice_alphabet,
            *worst_case,
            *show_payoff,
            *max_columns,
            *subsample,
            *seed,
            cli.max_strings,
        )?,
        Command::Density { language, other, source, mode, lengths } => {
            density(language, other, source, mode, lengths, cli.max_strings)?
        }
        Command::Build { name, output, lengths } => {
            build(name, output, lengths)?;
            return Ok(None);
        }
    };
    Ok(Some(out))
}

fn main() -> ExitCode {
    let started = Instant::now();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some((results, violations))) => {
            let report = Report { command: std::env::args().skip(1).collect(), results, violations, started, timing: cli.timing };
            print!("{}", report.render(cli.format));
            if violations == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn length_ranges() {
        assert_eq!(parse_lengths("3").unwrap(), vec![3]);
        assert_eq!(parse_lengths("1..3").unwrap(), vec![1, 2, 3]);
        assert_eq!(parse_lengths("1..=2").unwrap(), vec![1, 2]);
        assert!(parse_lengths("4..2").is_err());
        assert!(parse_lengths("x").is_err());
    }

    #[test]
    fn lower_track_alphabet() {
        let cells = Alphabet::binary().tracks(&Alphabet::from_tokens("a b").unwrap());
        assert_eq!(lower_alphabet(&cells).unwrap(), Alphabet::from_tokens("a b").unwrap());
        assert!(lower_alphabet(&Alphabet::binary()).is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
