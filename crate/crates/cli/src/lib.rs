//! `deciban` command-line front end.
//!
//! Tables go to standard output as TSV, structured parameters as JSON.
//! Exit status is 0 on success, 1 when the input data is unusable and 2 on
//! a usage error.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use deciban_core::bayes::{combine_independent, Decibans, Odds};
use deciban_core::corpus::{
    self, bigram_counts_to_tsv, letter_counts_to_tsv, parse_counts_tsv, BigramStats,
    LetterDistribution, RgramCounts, StatsBundle,
};
use deciban_core::generate::{self, MarkovTextModel};
use deciban_core::letters::{self, ALPHABET};
use deciban_core::repeats::{self, RepeatParams, RepetitionFigure};
use deciban_core::subtractor::{self, CribAlignment, SlideScoreTable};
use deciban_core::transposition::{self, ExclusiveBigramTable, TranspositionKey};
use deciban_core::vigenere::{self, ScoreFormula, VigenereKey};

#[derive(Debug, Parser)]
#[command(
    name = "deciban",
    version,
    about = "Bayesian scoring for classical cipher problems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Count letters, bigrams and optionally r-gram repeats in a corpus.
    Stats(StatsArgs),
    /// Combine prior odds with independent factors or decibans.
    Bayes(BayesArgs),
    #[command(subcommand)]
    Vigenere(VigenereCmd),
    #[command(subcommand)]
    Subtractor(SubtractorCmd),
    #[command(subcommand)]
    Repeats(RepeatsCmd),
    #[command(subcommand)]
    Transpose(TransposeCmd),
    /// Seeded synthetic corpora and ciphers.
    #[command(subcommand)]
    Generate(GenerateCmd),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Tsv,
}

#[derive(Debug, Args)]
struct StatsArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Also record apparent repeats M_1..M_r (JSON only).
    #[arg(long)]
    max_r: Option<usize>,
    /// Count bigrams without wrapping from the last letter to the first.
    #[arg(long)]
    linear: bool,
}

#[derive(Debug, Args)]
struct BayesArgs {
    /// Prior odds, e.g. `1:4` or `0.25`.
    #[arg(long, conflicts_with = "prior_probability")]
    prior: Option<Odds>,
    #[arg(long)]
    prior_probability: Option<f64>,
    /// Likelihood ratio of one piece of evidence (repeatable).
    #[arg(long)]
    factor: Vec<f64>,
    /// Evidence in decibans (repeatable).
    #[arg(long, allow_hyphen_values = true)]
    decibans: Vec<f64>,
}

#[derive(Debug, Args)]
struct StatsSource {
    /// Letter statistics: a JSON stats bundle or TSV counts. Defaults to the built-in 1000-letter English count.
    #[arg(long)]
    stats: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormulaArg {
    /// 20·log10(26p)
    #[value(name = "26p")]
    TwentySixP,
    /// 20·log10(25p/(1 − p))
    Odds,
}

#[derive(Debug, Subcommand)]
enum VigenereCmd {
    /// Half-deciban score of every key for every column.
    Score {
        #[arg(long)]
        period: usize,
        #[arg(long)]
        cipher: PathBuf,
        #[command(flatten)]
        stats: StatsSource,
    },
    /// Scores plus exact posteriors, and the best key.
    Solve {
        #[arg(long)]
        period: usize,
        #[arg(long)]
        cipher: PathBuf,
        #[command(flatten)]
        stats: StatsSource,
    },
    /// The letter score table with multiplicity rows.
    Table {
        #[command(flatten)]
        stats: StatsSource,
        #[arg(long, default_value_t = 9)]
        max_mult: usize,
        #[arg(long, value_enum, default_value = "26p")]
        formula: FormulaArg,
    },
    Decipher {
        #[arg(long)]
        key: String,
        #[arg(long)]
        cipher: PathBuf,
    },
}

#[derive(Debug, Args)]
struct WheelArgs {
    #[arg(long, default_value_t = 3)]
    components: usize,
    #[arg(long, default_value_t = 9)]
    max_slide: usize,
}

#[derive(Debug, Subcommand)]
enum SubtractorCmd {
    /// Coefficients of the slide generating function.
    Coefficients {
        #[command(flatten)]
        wheels: WheelArgs,
    },
    /// Slide probabilities and half-deciban scores.
    Table {
        #[command(flatten)]
        wheels: WheelArgs,
        /// Show the printed 3-wheel table instead of computing one.
        #[arg(long)]
        printed: bool,
    },
    /// Score a crib, given either cipher and crib text or the slides directly.
    Crib {
        #[arg(long, requires = "crib", conflicts_with = "slides")]
        cipher: Option<String>,
        #[arg(long)]
        crib: Option<String>,
        /// Comma-separated slide values.
        #[arg(long, value_delimiter = ',')]
        slides: Vec<u8>,
        #[arg(long, default_value = "1:1")]
        prior_odds: Odds,
        #[arg(long)]
        printed_table: bool,
        #[command(flatten)]
        wheels: WheelArgs,
    },
}

#[derive(Debug, Subcommand)]
enum RepeatsCmd {
    /// Repetition figure of two messages at a distance.
    Figure {
        #[arg(long)]
        m1: PathBuf,
        #[arg(long)]
        m2: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        distance: i64,
    },
    /// Estimate repeat parameters from a plain-language corpus.
    Params {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, default_value_t = 6)]
        max_r: usize,
    },
    /// Score a figure with estimated parameters, or with the simple theory.
    Score {
        #[arg(long)]
        figure: RepetitionFigure,
        #[arg(long, required_unless_present = "simple")]
        params: Option<PathBuf>,
        #[arg(long, requires = "beta")]
        simple: bool,
        #[arg(long)]
        beta: Option<f64>,
    },
    /// Scores of simulated true and wrong fits, with the AUC.
    Simulate {
        #[arg(long, default_value_t = 50)]
        overlap: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 100_000)]
        corpus_length: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Debug, Args)]
struct TableSource {
    /// Bigram counts (stats JSON or TSV) to build exclusive scores from.
    #[arg(long, group = "table_source")]
    bigrams: Option<PathBuf>,
    /// Exclusive scores as `AB<TAB>score` lines.
    #[arg(long, group = "table_source")]
    table: Option<PathBuf>,
    /// The six-entry table quoted for the German example.
    #[arg(long, group = "table_source")]
    fixture: bool,
}

#[derive(Debug, Subcommand)]
enum TransposeCmd {
    /// Score a probe column against every window of a message.
    Score {
        #[arg(long)]
        probe: String,
        #[arg(long)]
        message: PathBuf,
        #[command(flatten)]
        source: TableSource,
    },
    /// Exclusive bigram table built from counts.
    Table {
        #[arg(long)]
        bigrams: PathBuf,
    },
    /// Probability that position m closes a column, for each key length.
    Bottomprob {
        #[arg(long)]
        length: usize,
        #[arg(long)]
        pos: usize,
        /// A key length or an inclusive range such as `10..20`.
        #[arg(long)]
        keys: String,
    },
    /// Convergence of the letter chain to its stationary distribution.
    MarkovCheck {
        #[arg(long)]
        bigrams: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 100)]
        max_n: usize,
    },
    Decipher {
        /// 1-based column read-out order, e.g. `5,11,8,7,3,10,6,12,9,4,1,2`.
        #[arg(long)]
        key: TranspositionKey,
        #[arg(long)]
        cipher: PathBuf,
    },
    Encipher {
        #[arg(long)]
        key: TranspositionKey,
        #[arg(long)]
        plain: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Model {
    /// Order-2 letter model of the built-in English sample.
    English,
    Uniform,
}

#[derive(Debug, Subcommand)]
enum GenerateCmd {
    Corpus {
        #[arg(long)]
        length: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum, default_value = "english")]
        model: Model,
    },
    /// Random key and the resulting Vigenère cipher of generated text.
    Vigenere {
        #[arg(long)]
        period: usize,
        #[arg(long)]
        length: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Random key and the resulting columnar transposition of generated text.
    Transposition {
        #[arg(long)]
        key_length: usize,
        #[arg(long)]
        length: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Data(String),
}

impl From<deciban_core::Error> for Failure {
    fn from(e: deciban_core::Error) -> Self {
        Failure::Data(e.to_string())
    }
}

type Outcome = Result<String, Failure>;

/// Runs the CLI on `args` (including the program name), writing results to
/// `out` and diagnostics to `err`. Returns the process exit code.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    0
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    2
                }
            };
        }
    };
    match dispatch(cli.command) {
        Ok(text) => {
            if out.write_all(text.as_bytes()).is_err() {
                return 1;
            }
            0
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Data(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
    }
}

fn dispatch(cmd: Command) -> Outcome {
    match cmd {
        Command::Stats(a) => stats(a),
        Command::Bayes(a) => bayes(a),
        Command::Vigenere(c) => vigenere_cmd(c),
        Command::Subtractor(c) => subtractor_cmd(c),
        Command::Repeats(c) => repeats_cmd(c),
        Command::Transpose(c) => transpose_cmd(c),
        Command::Generate(c) => generate_cmd(c),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn read_letters(path: &Path) -> Result<Vec<u8>, Failure> {
    corpus::normalize_nonempty(read(path)?.as_bytes())
        .map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn parse_inline(text: &str) -> Result<Vec<u8>, Failure> {
    let letters = corpus::normalize(text.as_bytes());
    if letters.is_empty() {
        return Err(Failure::Usage(format!("{text:?} contains no letters")));
    }
    Ok(letters)
}

/// Letter and bigram counts from a JSON bundle or TSV counts.
struct LoadedCounts {
    letters: Option<[u64; ALPHABET]>,
    bigrams: Option<[[u64; ALPHABET]; ALPHABET]>,
}

fn load_counts(path: &Path) -> Result<LoadedCounts, Failure> {
    let text = read(path)?;
    let wrap = |e: deciban_core::Error| Failure::Data(format!("{}: {e}", path.display()));
    if text.trim_start().starts_with('{') {
        let b = StatsBundle::from_json(&text).map_err(wrap)?;
        return Ok(LoadedCounts {
            letters: Some(b.letter_counts()),
            bigrams: Some(b.bigram_counts()),
        });
    }
    let t = parse_counts_tsv(&text).map_err(wrap)?;
    Ok(LoadedCounts {
        letters: t.letters,
        bigrams: t.bigrams,
    })
}

fn letter_dist(source: &StatsSource) -> Result<LetterDistribution, Failure> {
    let Some(path) = &source.stats else {
        return Ok(LetterDistribution::english());
    };
    let counts = load_counts(path)?;
    let letters = match (counts.letters, counts.bigrams) {
        (Some(l), _) => l,
        (None, Some(b)) => {
            let mut l = [0; ALPHABET];
            for (a, row) in b.iter().enumerate() {
                l[a] = row.iter().sum();
            }
            l
        }
        (None, None) => {
            return Err(Failure::Data(format!(
                "{}: no counts found",
                path.display()
            )))
        }
    };
    Ok(LetterDistribution::from_counts(&letters)?)
}

fn bigram_stats(path: &Path) -> Result<BigramStats, Failure> {
    let counts = load_counts(path)?;
    let b = counts
        .bigrams
        .ok_or_else(|| Failure::Data(format!("{}: no bigram counts", path.display())))?;
    Ok(BigramStats::from_counts(&b)?)
}

fn stats(a: StatsArgs) -> Outcome {
    let text = read_letters(&a.corpus)?;
    let source = a
        .corpus
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let mut bundle = StatsBundle::from_corpus(&text, &source, !a.linear)?;
    match a.format {
        Format::Json => {
            if let Some(r) = a.max_r {
                bundle = bundle.with_rgrams(&RgramCounts::new(&text, r)?)?;
            }
            Ok(bundle.to_json() + "\n")
        }
        Format::Tsv => Ok(format!(
            "letter\tcount\n{}{}",
            letter_counts_to_tsv(&bundle.letter_counts()),
            bigram_counts_to_tsv(&bundle.bigram_counts())
        )),
    }
}

fn bayes(a: BayesArgs) -> Outcome {
    let prior = match (a.prior, a.prior_probability) {
        (Some(o), _) => o,
        (None, Some(p)) => Odds::from_probability(p)?,
        (None, None) => Odds::evens(),
    };
    let mut factors = a.factor.clone();
    factors.extend(a.decibans.iter().map(|&d| Decibans(d).factor()));
    let posterior = combine_independent(&factors, prior)?;
    let total: f64 = factors.iter().map(|f| 10.0 * f.log10()).sum();
    Ok(format!(
        "prior_odds\t{}\ntotal_decibans\t{total:.4}\nposterior_odds\t{:.6}\nposterior_probability\t{:.6}\nsummary\t{posterior}\n",
        prior.ratio(),
        posterior.ratio(),
        posterior.probability()
    ))
}

fn vigenere_cmd(cmd: VigenereCmd) -> Outcome {
    match cmd {
        VigenereCmd::Score {
            period,
            cipher,
            stats,
        }
        | VigenereCmd::Solve {
            period,
            cipher,
            stats,
        } if period == 0 => {
            let _ = (cipher, stats);
            Err(Failure::Usage("--period must be at least 1".into()))
        }
        VigenereCmd::Score {
            period,
            cipher,
            stats,
        } => {
            let sol = vigenere::solve(&read_letters(&cipher)?, period, &letter_dist(&stats)?)?;
            let mut out = String::from("key");
            for c in 1..=period {
                let _ = write!(out, "\t{c}");
            }
            out.push('\n');
            for k in 0..ALPHABET {
                out.push(letters::to_char(k as u8));
                for s in &sol {
                    let _ = write!(out, "\t{}", s.scores[k].value());
                }
                out.push('\n');
            }
            Ok(out)
        }
        VigenereCmd::Solve {
            period,
            cipher,
            stats,
        } => {
            let sol = vigenere::solve(&read_letters(&cipher)?, period, &letter_dist(&stats)?)?;
            let mut out = String::from("key");
            for c in 1..=period {
                let _ = write!(out, "\tscore{c}\tposterior{c}");
            }
            out.push('\n');
            for k in 0..ALPHABET {
                out.push(letters::to_char(k as u8));
                for s in &sol {
                    let _ = write!(out, "\t{}\t{:.6}", s.scores[k].value(), s.posterior[k]);
                }
                out.push('\n');
            }
            let best: Vec<u8> = sol.iter().map(|s| s.best).collect();
            let _ = writeln!(out, "best\t{}", letters::render(&best));
            Ok(out)
        }
        VigenereCmd::Table {
            stats,
            max_mult,
            formula,
        } => {
            let formula = match formula {
                FormulaArg::TwentySixP => ScoreFormula::TwentySixP,
                FormulaArg::Odds => ScoreFormula::OddsForm,
            };
            let dist = letter_dist(&stats)?;
            let table = vigenere::build_score_table_with(&dist, max_mult, formula)?;
            let mut out = String::from("letter\tp");
            for m in 1..=max_mult {
                let _ = write!(out, "\t{m}");
            }
            out.push('\n');
            for l in 0..ALPHABET as u8 {
                let _ = write!(out, "{}\t{:.4}", letters::to_char(l), dist.p(l));
                for m in 1..=max_mult {
                    let _ = write!(out, "\t{}", table.multiple(l, m)?);
                }
                out.push('\n');
            }
            Ok(out)
        }
        VigenereCmd::Decipher { key, cipher } => {
            let key = VigenereKey::parse(&key)?;
            Ok(letters::render(&vigenere::decipher(&read_letters(&cipher)?, &key)) + "\n")
        }
    }
}

fn slide_table(
    wheels: &WheelArgs,
    printed: bool,
) -> Result<(SlideScoreTable, subtractor::SlideDistribution), Failure> {
    let dist = subtractor::slide_coefficients(wheels.components, wheels.max_slide)?;
    let table = if printed {
        SlideScoreTable::printed()
    } else {
        subtractor::build_slide_table(&dist)
    };
    Ok((table, dist))
}

fn subtractor_cmd(cmd: SubtractorCmd) -> Outcome {
    match cmd {
        SubtractorCmd::Coefficients { wheels } => {
            let d = subtractor::slide_coefficients(wheels.components, wheels.max_slide)?;
            let mut out = String::from("power\tcoefficient\n");
            for (s, c) in d.coeffs().iter().enumerate() {
                let _ = writeln!(out, "{s}\t{c}");
            }
            let _ = writeln!(out, "total\t{}", d.total());
            Ok(out)
        }
        SubtractorCmd::Table { wheels, printed } => {
            let (table, dist) = slide_table(&wheels, printed)?;
            let mut out = String::from("slide\tletter\tremainder\tprobability\tscore\n");
            for s in 0..ALPHABET as u8 {
                let _ = writeln!(
                    out,
                    "{s}\t{}\t{}\t{:.6}\t{}",
                    letters::to_char(s),
                    dist.remainders()[s as usize],
                    dist.probability(s),
                    table.score(s).value()
                );
            }
            Ok(out)
        }
        SubtractorCmd::Crib {
            cipher,
            crib,
            slides,
            prior_odds,
            printed_table,
            wheels,
        } => {
            let alignment = match (cipher, crib) {
                (Some(c), Some(p)) => {
                    subtractor::slides_from_crib(&parse_inline(&c)?, &parse_inline(&p)?)?
                }
                (None, None) if !slides.is_empty() => CribAlignment::from_slides(slides)?,
                _ => {
                    return Err(Failure::Usage(
                        "give --cipher with --crib, or --slides".into(),
                    ))
                }
            };
            let (table, _) = slide_table(&wheels, printed_table)?;
            let (score, posterior) = subtractor::score_crib(&alignment, &table, prior_odds)?;
            let slides: Vec<String> = alignment.slides.iter().map(u8::to_string).collect();
            let per: Vec<String> = alignment
                .slides
                .iter()
                .map(|&s| table.score(s).value().to_string())
                .collect();
            Ok(format!(
                "slides\t{}\nscores\t{}\nscore\t{}\nposterior_odds\t{:.6}\nsummary\t{posterior}\n",
                slides.join(","),
                per.join(","),
                score.value(),
                posterior.ratio()
            ))
        }
    }
}

fn repeats_cmd(cmd: RepeatsCmd) -> Outcome {
    match cmd {
        RepeatsCmd::Figure { m1, m2, distance } => {
            let f = repeats::repetition_figure(&read_letters(&m1)?, &read_letters(&m2)?, distance)?;
            Ok(format!("{f}\n"))
        }
        RepeatsCmd::Params { corpus, max_r } => {
            let text = read_letters(&corpus)?;
            let stats = RgramCounts::new(&text, max_r + 2)?;
            let dist = LetterDistribution::from_corpus(&text)?;
            Ok(repeats::estimate_params(&stats, &dist, max_r)?.to_json() + "\n")
        }
        RepeatsCmd::Score {
            figure,
            params,
            simple,
            beta,
        } => {
            let db = if simple {
                repeats::simple_fit_factor(&figure, beta.expect("clap enforces --beta"))?
            } else {
                let path = params.expect("clap enforces --params");
                let p = RepeatParams::from_json(&read(&path)?)?;
                repeats::general_fit_score(&figure, &p)?
            };
            Ok(format!(
                "decibans\t{:.4}\nfactor\t{:.6}\n",
                db.value(),
                db.factor()
            ))
        }
        RepeatsCmd::Simulate {
            overlap,
            trials,
            corpus_length,
            seed,
        } => {
            if overlap == 0 || trials == 0 {
                return Err(Failure::Usage(
                    "--overlap and --trials must be positive".into(),
                ));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let corpus = MarkovTextModel::english().generate(corpus_length, &mut rng);
            let beta = LetterDistribution::from_corpus(&corpus)?.coincidence();
            let mut truth = Vec::with_capacity(trials);
            let mut wrong = Vec::with_capacity(trials);
            for _ in 0..trials {
                let t = generate::true_fit_figure(&corpus, overlap, &mut rng)?;
                truth.push(repeats::simple_fit_factor(&t, beta)?.value());
                let w = generate::wrong_fit_figure(overlap, &mut rng);
                wrong.push(repeats::simple_fit_factor(&w, beta)?.value());
            }
            let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
            Ok(format!(
                "beta\t{beta:.6}\noverlap\t{overlap}\ntrials\t{trials}\ntrue_mean_db\t{:.4}\nwrong_mean_db\t{:.4}\nauc\t{:.6}\n",
                mean(&truth),
                mean(&wrong),
                generate::auc(&truth, &wrong)
            ))
        }
    }
}

fn exclusive_table(source: &TableSource) -> Result<ExclusiveBigramTable, Failure> {
    if source.fixture {
        return Ok(ExclusiveBigramTable::fixture());
    }
    if let Some(path) = &source.table {
        return Ok(ExclusiveBigramTable::from_tsv(&read(path)?)?);
    }
    if let Some(path) = &source.bigrams {
        return Ok(transposition::build_bigram_score_table(&bigram_stats(
            path,
        )?));
    }
    Err(Failure::Usage(
        "give one of --bigrams, --table or --fixture".into(),
    ))
}

fn parse_keys(spec: &str) -> Result<Vec<usize>, Failure> {
    let bad = || Failure::Usage(format!("bad --keys {spec:?}; use N or A..B"));
    if let Some((lo, hi)) = spec.split_once("..") {
        let lo: usize = lo.trim().parse().map_err(|_| bad())?;
        let hi: usize = hi
            .trim_start_matches('=')
            .trim()
            .parse()
            .map_err(|_| bad())?;
        if lo > hi {
            return Err(bad());
        }
        return Ok((lo..=hi).collect());
    }
    spec.split(',')
        .map(|t| t.trim().parse().map_err(|_| bad()))
        .collect()
}

fn format_rational(r: &BigRational) -> String {
    if r.denom() == &1.into() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn transpose_cmd(cmd: TransposeCmd) -> Outcome {
    match cmd {
        TransposeCmd::Score {
            probe,
            message,
            source,
        } => {
            let table = exclusive_table(&source)?;
            let probe = parse_inline(&probe)?;
            let message = read_letters(&message)?;
            let scan = transposition::scan_alignments(&probe, &message, &table)?;
            let show = |s: Option<deciban_core::bayes::HalfDecibans>| {
                s.map_or("-".to_string(), |s| s.value().to_string())
            };
            let mut out = String::from("offset\tletter\tearlier\tlater\n");
            for s in &scan {
                let _ = writeln!(
                    out,
                    "{}\t{}\t{}\t{}",
                    s.offset,
                    letters::to_char(message[s.offset]),
                    show(s.earlier),
                    show(s.later)
                );
            }
            Ok(out)
        }
        TransposeCmd::Table { bigrams } => {
            Ok(transposition::build_bigram_score_table(&bigram_stats(&bigrams)?).to_tsv())
        }
        TransposeCmd::Bottomprob { length, pos, keys } => {
            let mut out = String::new();
            for k in parse_keys(&keys)? {
                let p = transposition::bottom_of_column_probability(length, k, pos)?;
                let _ = writeln!(
                    out,
                    "{k}\t{}\t{:.6}",
                    format_rational(&p),
                    deciban_core::bayes::rational_to_f64(&p)
                );
            }
            Ok(out)
        }
        TransposeCmd::MarkovCheck {
            bigrams,
            tol,
            max_n,
        } => {
            let stats = bigram_stats(&bigrams)?;
            let q = transposition::TransitionMatrix::from_stats(&stats);
            let rep = transposition::stationarity_check(&q, tol, max_n);
            let mut out = String::new();
            let _ = writeln!(
                out,
                "converged_at\t{}",
                rep.converged_at
                    .map_or("none".to_string(), |n| n.to_string())
            );
            let _ = writeln!(out, "max_deviation\t{:.3e}", rep.max_deviation);
            let _ = writeln!(out, "yq_error\t{:.3e}", rep.yq_error);
            let _ = writeln!(out, "yy_error\t{:.3e}", rep.yy_error);
            out.push_str("gap\tweighted_rel_error\tworst_rel_error\n");
            for gap in 0..=8 {
                let e = transposition::gap_approximation_error(&stats, gap);
                let _ = writeln!(out, "{gap}\t{:.6}\t{:.6}", e.weighted_mean, e.worst);
            }
            Ok(out)
        }
        TransposeCmd::Decipher { key, cipher } => {
            Ok(letters::render(&transposition::decipher(&read_letters(&cipher)?, &key)) + "\n")
        }
        TransposeCmd::Encipher { key, plain } => {
            Ok(letters::render(&transposition::encipher(&read_letters(&plain)?, &key)) + "\n")
        }
    }
}

fn generate_cmd(cmd: GenerateCmd) -> Outcome {
    let text =
        |length: usize, rng: &mut ChaCha8Rng| MarkovTextModel::english().generate(length, rng);
    match cmd {
        GenerateCmd::Corpus {
            length,
            seed,
            model,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let letters = match model {
                Model::English => text(length, &mut rng),
                Model::Uniform => generate::uniform_text(length, &mut rng),
            };
            Ok(letters::render(&letters) + "\n")
        }
        GenerateCmd::Vigenere {
            period,
            length,
            seed,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let key = generate::random_vigenere_key(period, &mut rng)?;
            let plain = text(length, &mut rng);
            Ok(format!(
                "key\t{key}\nplain\t{}\ncipher\t{}\n",
                letters::render(&plain),
                letters::render(&vigenere::encipher(&plain, &key))
            ))
        }
        GenerateCmd::Transposition {
            key_length,
            length,
            seed,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let key = generate::random_transposition_key(key_length, &mut rng)?;
            let plain = text(length, &mut rng);
            Ok(format!(
                "key\t{key}\nplain\t{}\ncipher\t{}\n",
                letters::render(&plain),
                letters::render(&transposition::encipher(&plain, &key))
            ))
        }
    }
}
