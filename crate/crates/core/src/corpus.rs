//! Corpus ingestion: normalisation plus letter, bigram and r-gram statistics.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::letters::{self, ALPHABET};
use crate::{Error, Result};

/// English letter counts on 1000 letters, A through Z, as used for the
/// Vigenère worked example. X is a compromise between ordinary prose and
/// telegraphese.
pub const ENGLISH_1000: [u64; ALPHABET] = [
    84, 23, 21, 46, 116, 20, 25, 49, 76, 2, 5, 38, 34, // A-M
    66, 66, 15, 2, 64, 73, 81, 19, 11, 21, 16, 24, 3, // N-Z
];

/// Uppercases ASCII letters and drops every other byte.
pub fn normalize(text: &[u8]) -> Vec<u8> {
    text.iter()
        .filter(|b| b.is_ascii_alphabetic())
        .map(|b| b.to_ascii_uppercase() - b'A')
        .collect()
}

/// Like [`normalize`], but an empty result is an error.
pub fn normalize_nonempty(text: &[u8]) -> Result<Vec<u8>> {
    let out = normalize(text);
    if out.is_empty() {
        Err(Error::EmptyCorpus)
    } else {
        Ok(out)
    }
}

pub fn letter_counts(corpus: &[u8]) -> [u64; ALPHABET] {
    let mut counts = [0u64; ALPHABET];
    for &l in corpus {
        counts[l as usize] += 1;
    }
    counts
}

/// Single-letter frequencies `p_α`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LetterDistribution {
    p: [f64; ALPHABET],
}

impl LetterDistribution {
    pub fn from_counts(counts: &[u64; ALPHABET]) -> Result<Self> {
        letter_distribution(counts)
    }

    pub fn from_corpus(corpus: &[u8]) -> Result<Self> {
        letter_distribution(&letter_counts(corpus))
    }

    /// The 1000-letter English count ([`ENGLISH_1000`]).
    pub fn english() -> Self {
        letter_distribution(&ENGLISH_1000).expect("reference counts are nonzero")
    }

    pub fn uniform() -> Self {
        LetterDistribution {
            p: [1.0 / ALPHABET as f64; ALPHABET],
        }
    }

    /// Arbitrary probabilities; must be nonnegative and sum to 1 within 1e-9.
    pub fn from_probabilities(p: [f64; ALPHABET]) -> Result<Self> {
        if p.iter().any(|&x| !(x.is_finite() && x >= 0.0)) {
            return Err(Error::Domain(
                "probabilities must be finite and >= 0".into(),
            ));
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(format!("probabilities sum to {sum}, not 1")));
        }
        Ok(LetterDistribution { p })
    }

    pub fn p(&self, letter: u8) -> f64 {
        self.p[letter as usize]
    }

    pub fn probabilities(&self) -> &[f64; ALPHABET] {
        &self.p
    }

    /// `β = Σ p_α²`, the chance that two independent plain letters agree.
    pub fn coincidence(&self) -> f64 {
        self.p.iter().map(|x| x * x).sum()
    }
}

pub fn letter_distribution(counts: &[u64; ALPHABET]) -> Result<LetterDistribution> {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(Error::EmptyCorpus);
    }
    let mut p = [0.0; ALPHABET];
    for (dst, &c) in p.iter_mut().zip(counts) {
        *dst = c as f64 / total as f64;
    }
    Ok(LetterDistribution { p })
}

/// Joint bigram frequencies `P_αβ` with marginals and transition ratios.
#[derive(Debug, Clone, PartialEq)]
pub struct BigramStats {
    counts: Vec<[u64; ALPHABET]>,
    total: u64,
    joint: Vec<[f64; ALPHABET]>,
    row: [f64; ALPHABET],
    col: [f64; ALPHABET],
}

impl BigramStats {
    pub fn from_corpus(corpus: &[u8], circular: bool) -> Result<Self> {
        bigram_stats(corpus, circular)
    }

    pub fn from_counts(counts: &[[u64; ALPHABET]; ALPHABET]) -> Result<Self> {
        let total: u64 = counts.iter().flatten().sum();
        if total == 0 {
            return Err(Error::EmptyCorpus);
        }
        let tf = total as f64;
        let mut joint = vec![[0.0; ALPHABET]; ALPHABET];
        let mut row = [0.0; ALPHABET];
        let mut col = [0.0; ALPHABET];
        for a in 0..ALPHABET {
            for b in 0..ALPHABET {
                let v = counts[a][b] as f64 / tf;
                joint[a][b] = v;
                row[a] += v;
                col[b] += v;
            }
        }
        Ok(BigramStats {
            counts: counts.to_vec(),
            total,
            joint,
            row,
            col,
        })
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn count(&self, a: u8, b: u8) -> u64 {
        self.counts[a as usize][b as usize]
    }

    pub fn counts(&self) -> [[u64; ALPHABET]; ALPHABET] {
        let mut out = [[0; ALPHABET]; ALPHABET];
        out.copy_from_slice(&self.counts);
        out
    }

    /// `P_αβ`.
    pub fn joint(&self, a: u8, b: u8) -> f64 {
        self.joint[a as usize][b as usize]
    }

    /// `P_α` as the row marginal `Σ_β P_αβ`.
    pub fn marginal(&self, a: u8) -> f64 {
        self.row[a as usize]
    }

    /// `Σ_α P_αβ`. Equal to [`marginal`](Self::marginal) for circular corpora.
    pub fn column_marginal(&self, b: u8) -> f64 {
        self.col[b as usize]
    }

    /// `q_αβ = P_αβ / P_α`; zero when `P_α = 0`.
    pub fn transition(&self, a: u8, b: u8) -> f64 {
        let m = self.row[a as usize];
        if m > 0.0 {
            self.joint[a as usize][b as usize] / m
        } else {
            0.0
        }
    }

    pub fn letter_distribution(&self) -> Result<LetterDistribution> {
        LetterDistribution::from_probabilities(self.row)
    }
}

pub fn bigram_stats(corpus: &[u8], circular: bool) -> Result<BigramStats> {
    if corpus.len() < 2 {
        return Err(Error::CorpusTooShort {
            needed: 2,
            got: corpus.len(),
        });
    }
    let mut counts = [[0u64; ALPHABET]; ALPHABET];
    for w in corpus.windows(2) {
        counts[w[0] as usize][w[1] as usize] += 1;
    }
    if circular {
        counts[corpus[corpus.len() - 1] as usize][corpus[0] as usize] += 1;
    }
    BigramStats::from_counts(&counts)
}

/// Occurrence counts `S_{β,r}` of every r-gram `β` (r = 1..=max_r) in a corpus
/// written round a circle, so that every position starts an r-gram.
#[derive(Debug, Clone)]
pub struct RgramCounts {
    text: Vec<u8>,
    max_r: usize,
    // counts[r - 1] maps r-gram -> occurrences
    counts: Vec<HashMap<Vec<u8>, u64>>,
}

impl RgramCounts {
    pub fn new(corpus: &[u8], max_r: usize) -> Result<Self> {
        rgram_counts(corpus, max_r)
    }

    /// `N`, the number of letters in the statistics.
    pub fn total(&self) -> usize {
        self.text.len()
    }

    pub fn max_r(&self) -> usize {
        self.max_r
    }

    pub fn text(&self) -> &[u8] {
        &self.text
    }

    pub fn count(&self, gram: &[u8]) -> u64 {
        if gram.is_empty() || gram.len() > self.max_r {
            return 0;
        }
        self.counts[gram.len() - 1].get(gram).copied().unwrap_or(0)
    }

    pub fn grams(&self, r: usize) -> impl Iterator<Item = (&[u8], u64)> {
        self.counts
            .get(r.wrapping_sub(1))
            .into_iter()
            .flat_map(|m| m.iter().map(|(k, &v)| (k.as_slice(), v)))
    }

    /// Apparent r-gram repeats `M_r = Σ_β S_{β,r}(S_{β,r} − 1)/2`: the number
    /// of position pairs whose r-grams agree. `M_0` is the number of pairs.
    pub fn apparent_repeats(&self, r: usize) -> Result<u64> {
        if r == 0 {
            return Ok(pairs(self.text.len() as u64));
        }
        if r > self.max_r {
            return Err(Error::InsufficientOrder {
                have: self.max_r,
                need: r,
            });
        }
        Ok(self.counts[r - 1].values().map(|&s| pairs(s)).sum())
    }
}

pub(crate) fn pairs(n: u64) -> u64 {
    n * n.saturating_sub(1) / 2
}

pub fn rgram_counts(corpus: &[u8], max_r: usize) -> Result<RgramCounts> {
    if max_r == 0 {
        return Err(Error::Domain("max_r must be >= 1".into()));
    }
    if corpus.len() < max_r {
        return Err(Error::CorpusTooShort {
            needed: max_r,
            got: corpus.len(),
        });
    }
    let n = corpus.len();
    let mut ring = corpus.to_vec();
    ring.extend_from_slice(&corpus[..max_r - 1]);
    let counts = (1..=max_r)
        .map(|r| {
            let mut m: HashMap<Vec<u8>, u64> = HashMap::new();
            for i in 0..n {
                *m.entry(ring[i..i + r].to_vec()).or_default() += 1;
            }
            m
        })
        .collect();
    Ok(RgramCounts {
        text: corpus.to_vec(),
        max_r,
        counts,
    })
}

/// Letter and bigram counts plus provenance, exchanged as JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsBundle {
    pub letter_counts: Vec<u64>,
    pub bigram_counts: Vec<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rgram: Option<RgramSummary>,
    pub meta: StatsMeta,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RgramSummary {
    pub max_r: usize,
    /// `M_r` for r = 1..=max_r.
    pub apparent_repeats: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsMeta {
    pub source: String,
    pub size: u64,
    pub circular: bool,
}

impl StatsBundle {
    pub fn from_corpus(corpus: &[u8], source: &str, circular: bool) -> Result<Self> {
        if corpus.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let letters = letter_counts(corpus);
        let bigrams = if corpus.len() >= 2 {
            bigram_stats(corpus, circular)?.counts
        } else {
            vec![[0; ALPHABET]; ALPHABET]
        };
        Ok(StatsBundle {
            letter_counts: letters.to_vec(),
            bigram_counts: bigrams.iter().map(|r| r.to_vec()).collect(),
            rgram: None,
            meta: StatsMeta {
                source: source.to_string(),
                size: corpus.len() as u64,
                circular,
            },
        })
    }

    pub fn with_rgrams(mut self, stats: &RgramCounts) -> Result<Self> {
        let apparent = (1..=stats.max_r())
            .map(|r| stats.apparent_repeats(r))
            .collect::<Result<Vec<_>>>()?;
        self.rgram = Some(RgramSummary {
            max_r: stats.max_r(),
            apparent_repeats: apparent,
        });
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.letter_counts.len() != ALPHABET {
            return Err(Error::Parse(format!(
                "letter_counts has {} entries",
                self.letter_counts.len()
            )));
        }
        if self.bigram_counts.len() != ALPHABET
            || self.bigram_counts.iter().any(|r| r.len() != ALPHABET)
        {
            return Err(Error::Parse("bigram_counts must be 26x26".into()));
        }
        let total: u64 = self.letter_counts.iter().sum();
        if total != self.meta.size {
            return Err(Error::Parse(format!(
                "letter counts total {total} disagrees with meta.size {}",
                self.meta.size
            )));
        }
        Ok(())
    }

    pub fn letter_counts(&self) -> [u64; ALPHABET] {
        let mut out = [0; ALPHABET];
        out.copy_from_slice(&self.letter_counts);
        out
    }

    pub fn bigram_counts(&self) -> [[u64; ALPHABET]; ALPHABET] {
        let mut out = [[0; ALPHABET]; ALPHABET];
        for (dst, src) in out.iter_mut().zip(&self.bigram_counts) {
            dst.copy_from_slice(src);
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("bundle serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let b: StatsBundle = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        b.validate()?;
        Ok(b)
    }
}

/// `letter\tcount` lines, A through Z.
pub fn letter_counts_to_tsv(counts: &[u64; ALPHABET]) -> String {
    let mut out = String::new();
    for (i, c) in counts.iter().enumerate() {
        let _ = writeln!(out, "{}\t{}", letters::to_char(i as u8), c);
    }
    out
}

/// `bigram\tcount` lines for every nonzero pair, in alphabetical order.
pub fn bigram_counts_to_tsv(counts: &[[u64; ALPHABET]; ALPHABET]) -> String {
    let mut out = String::new();
    for (a, row) in counts.iter().enumerate() {
        for (b, &c) in row.iter().enumerate() {
            if c > 0 {
                let _ = writeln!(
                    out,
                    "{}{}\t{}",
                    letters::to_char(a as u8),
                    letters::to_char(b as u8),
                    c
                );
            }
        }
    }
    out
}

/// Counts parsed from TSV. A file may hold letter lines, bigram lines, or
/// both; blank lines and `#` comments are skipped.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TsvCounts {
    pub letters: Option<[u64; ALPHABET]>,
    pub bigrams: Option<[[u64; ALPHABET]; ALPHABET]>,
}

pub fn parse_counts_tsv(text: &str) -> Result<TsvCounts> {
    let mut out = TsvCounts::default();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split('\t');
        let (key, value) = match (fields.next(), fields.next()) {
            (Some(k), Some(v)) => (k.trim(), v.trim()),
            _ => {
                return Err(Error::Parse(format!(
                    "line {}: expected key<TAB>count",
                    lineno + 1
                )))
            }
        };
        let count: u64 = match value.parse() {
            Ok(c) => c,
            // a header row such as "letter\tcount"
            Err(_) if lineno == 0 => continue,
            Err(_) => {
                return Err(Error::Parse(format!(
                    "line {}: bad count {value:?}",
                    lineno + 1
                )))
            }
        };
        let key =
            letters::parse(key).map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
        match key.as_slice() {
            [a] => out.letters.get_or_insert([0; ALPHABET])[*a as usize] += count,
            [a, b] => {
                out.bigrams.get_or_insert([[0; ALPHABET]; ALPHABET])[*a as usize][*b as usize] +=
                    count
            }
            _ => {
                return Err(Error::Parse(format!(
                    "line {}: key must be 1 or 2 letters",
                    lineno + 1
                )))
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::letters::parse;

    #[test]
    fn normalize_examples() {
        assert_eq!(letters::render(&normalize(b"Owing to war.")), "OWINGTOWAR");
        assert_eq!(letters::render(&normalize("ÄB".as_bytes())), "B");
        assert!(normalize(b"").is_empty());
        assert_eq!(normalize_nonempty(b"123"), Err(Error::EmptyCorpus));
    }

    #[test]
    fn english_distribution() {
        let d = LetterDistribution::english();
        assert!((d.p(4) - 0.116).abs() < 1e-12);
        let sum: f64 = d.probabilities().iter().sum();
        assert!((sum - 1.0).abs() < 1e-9);
        // Σ p² summed independently from the printed counts
        let direct: f64 = ENGLISH_1000
            .iter()
            .map(|&c| (c as f64 / 1000.0).powi(2))
            .sum();
        assert!((d.coincidence() - direct).abs() < 1e-15);
        assert!((d.coincidence() - 0.0621).abs() < 5e-5);
    }

    #[test]
    fn uniform_counts() {
        let d = letter_distribution(&[7; ALPHABET]).unwrap();
        for l in 0..26 {
            assert!((d.p(l) - 1.0 / 26.0).abs() < 1e-15);
        }
        assert!((d.coincidence() - 1.0 / 26.0).abs() < 1e-15);
        assert_eq!(letter_distribution(&[0; ALPHABET]), Err(Error::EmptyCorpus));
    }

    #[test]
    fn bigram_examples() {
        let s = bigram_stats(&parse("ABAB").unwrap(), true).unwrap();
        assert_eq!(s.joint(0, 1), 0.5);
        assert_eq!(s.joint(1, 0), 0.5);
        assert_eq!(s.transition(0, 1), 1.0);

        let s = bigram_stats(&parse("AAAA").unwrap(), true).unwrap();
        assert_eq!(s.transition(0, 0), 1.0);
        assert_eq!(s.marginal(0), 1.0);

        assert!(bigram_stats(&parse("A").unwrap(), true).is_err());
    }

    #[test]
    fn open_bigrams_do_not_wrap() {
        let s = bigram_stats(&parse("ABC").unwrap(), false).unwrap();
        assert_eq!(s.total(), 2);
        assert_eq!(s.count(2, 0), 0);
    }

    #[test]
    fn rgram_examples() {
        let s = rgram_counts(&parse("ABAB").unwrap(), 2).unwrap();
        assert_eq!(s.count(&parse("AB").unwrap()), 2);
        assert_eq!(s.count(&parse("BA").unwrap()), 2);

        let s = rgram_counts(&parse("AAA").unwrap(), 2).unwrap();
        assert_eq!(s.count(&parse("AA").unwrap()), 3);
        assert_eq!(s.apparent_repeats(2).unwrap(), 3);
        assert_eq!(s.apparent_repeats(0).unwrap(), 3);
        assert!(s.apparent_repeats(3).is_err());
        assert!(rgram_counts(&parse("AB").unwrap(), 3).is_err());
    }

    #[test]
    fn tsv_round_trip() {
        let text = letter_counts_to_tsv(&ENGLISH_1000);
        assert!(text.starts_with("A\t84\nB\t23\n"));
        let parsed = parse_counts_tsv(&format!("letter\tcount\n{text}")).unwrap();
        assert_eq!(parsed.letters, Some(ENGLISH_1000));
        assert_eq!(parsed.bigrams, None);

        let s = bigram_stats(&parse("THETHEN").unwrap(), false).unwrap();
        let tsv = bigram_counts_to_tsv(&s.counts());
        assert!(tsv.contains("TH\t2\n"));
        let parsed = parse_counts_tsv(&tsv).unwrap();
        assert_eq!(parsed.bigrams, Some(s.counts()));
        assert!(parse_counts_tsv("A\t1\nB\tx").is_err());
        assert!(parse_counts_tsv("ABC\t2").is_err());
    }

    #[test]
    fn bundle_json() {
        let corpus = parse("THEQUICKBROWNFOX").unwrap();
        let b = StatsBundle::from_corpus(&corpus, "t", true).unwrap();
        let back = StatsBundle::from_json(&b.to_json()).unwrap();
        assert_eq!(back, b);
        assert_eq!(back.bigram_counts().iter().flatten().sum::<u64>(), 16);

        let mut bad = b.clone();
        bad.letter_counts.pop();
        assert!(StatsBundle::from_json(&bad.to_json()).is_err());
    }
}
