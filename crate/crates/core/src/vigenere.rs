//! Vigenère encipherment, half-deciban key scoring and exact key posteriors.
//!
//! Key letter `A` is the identity shift; a cipher letter `c` under key `k`
//! decodes to `c − k` (in the classical `A = 1` numbering, `c − k + 1`).
//!
//! Scoring a column against key `k` means decoding it with `k` and adding the
//! per-letter scores `20·log10(26·p)` of the decoded letters. Repeated
//! letters are looked up in a multiplicity row, rounded from `m` times the
//! unrounded score, so three S's score `round(3 × 5.57) = 17` rather than
//! `3 × 6`.

use std::fmt;

use crate::bayes::HalfDecibans;
use crate::corpus::LetterDistribution;
use crate::letters::{self, ALPHABET};
use crate::{Error, Result};

/// Score assigned to a letter of probability zero, per occurrence.
pub const ZERO_PROBABILITY_FLOOR: i64 = -99;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VigenereKey(Vec<u8>);

impl VigenereKey {
    pub fn new(letters: Vec<u8>) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::InvalidKey("key must be nonempty".into()));
        }
        if let Some(&bad) = letters.iter().find(|&&l| l as usize >= ALPHABET) {
            return Err(Error::InvalidKey(format!(
                "letter value {bad} out of range"
            )));
        }
        Ok(VigenereKey(letters))
    }

    pub fn parse(text: &str) -> Result<Self> {
        VigenereKey::new(letters::parse(text)?)
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn period(&self) -> usize {
        self.0.len()
    }
}

impl fmt::Display for VigenereKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&letters::render(&self.0))
    }
}

pub fn encipher(plain: &[u8], key: &VigenereKey) -> Vec<u8> {
    plain
        .iter()
        .zip(key.0.iter().cycle())
        .map(|(&p, &k)| letters::add(p, k))
        .collect()
}

pub fn decipher(cipher: &[u8], key: &VigenereKey) -> Vec<u8> {
    cipher
        .iter()
        .zip(key.0.iter().cycle())
        .map(|(&c, &k)| letters::sub(c, k))
        .collect()
}

/// Splits text written in its period into columns.
pub fn columns(text: &[u8], period: usize) -> Vec<Vec<u8>> {
    let mut cols = vec![Vec::new(); period];
    for (i, &l) in text.iter().enumerate() {
        cols[i % period].push(l);
    }
    cols
}

/// Which per-letter factor a [`ColumnScoreTable`] tabulates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScoreFormula {
    /// `26·p`: likelihood of the decode against uniformly random letters.
    #[default]
    TwentySixP,
    /// `25p / (1 − p)`: the two-hypothesis ("key is β" vs "key is not β") factor.
    OddsForm,
}

impl ScoreFormula {
    fn factor(self, p: f64) -> f64 {
        match self {
            ScoreFormula::TwentySixP => 26.0 * p,
            ScoreFormula::OddsForm => 25.0 * p / (1.0 - p),
        }
    }
}

/// Per-letter half-deciban scores with multiplicity rows.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnScoreTable {
    raw: [f64; ALPHABET],
    // multiples[m - 1][letter]
    multiples: Vec<[i64; ALPHABET]>,
}

impl ColumnScoreTable {
    pub fn base(&self, letter: u8) -> i64 {
        self.multiples[0][letter as usize]
    }

    /// Score for `count` occurrences of `letter`.
    pub fn multiple(&self, letter: u8, count: usize) -> Result<i64> {
        if count == 0 {
            return Ok(0);
        }
        self.multiples
            .get(count - 1)
            .map(|row| row[letter as usize])
            .ok_or(Error::MultiplicityExceeded {
                count,
                rows: self.multiples.len(),
            })
    }

    /// Unrounded half-deciban score (`-inf` for zero probability).
    pub fn raw(&self, letter: u8) -> f64 {
        self.raw[letter as usize]
    }

    pub fn max_multiplicity(&self) -> usize {
        self.multiples.len()
    }

    pub fn rows(&self) -> &[[i64; ALPHABET]] {
        &self.multiples
    }
}

pub fn build_score_table(dist: &LetterDistribution, max_mult: usize) -> Result<ColumnScoreTable> {
    build_score_table_with(dist, max_mult, ScoreFormula::default())
}

pub fn build_score_table_with(
    dist: &LetterDistribution,
    max_mult: usize,
    formula: ScoreFormula,
) -> Result<ColumnScoreTable> {
    if max_mult == 0 {
        return Err(Error::Domain("max_mult must be >= 1".into()));
    }
    let mut raw = [0.0; ALPHABET];
    for (l, r) in raw.iter_mut().enumerate() {
        let p = dist.p(l as u8);
        *r = if p > 0.0 {
            20.0 * formula.factor(p).log10()
        } else {
            f64::NEG_INFINITY
        };
    }
    let multiples = (1..=max_mult)
        .map(|m| {
            let mut row = [0i64; ALPHABET];
            for (dst, &r) in row.iter_mut().zip(&raw) {
                *dst = if r.is_finite() {
                    HalfDecibans::round(m as f64 * r).value()
                } else {
                    m as i64 * ZERO_PROBABILITY_FLOOR
                };
            }
            row
        })
        .collect();
    Ok(ColumnScoreTable { raw, multiples })
}

fn decoded_counts(column: &[u8], key: u8) -> [usize; ALPHABET] {
    let mut counts = [0usize; ALPHABET];
    for &c in column {
        counts[letters::sub(c, key) as usize] += 1;
    }
    counts
}

/// Total half-deciban score of a column decoded with `key`.
pub fn score_column(column: &[u8], key: u8, table: &ColumnScoreTable) -> Result<HalfDecibans> {
    if column.is_empty() {
        return Err(Error::Domain("column must be nonempty".into()));
    }
    let counts = decoded_counts(column, key);
    let mut total = 0;
    for (letter, &n) in counts.iter().enumerate() {
        total += table.multiple(letter as u8, n)?;
    }
    Ok(HalfDecibans(total))
}

/// All 26 keys with their scores, best first; ties go to the earlier letter.
pub fn rank_keys(column: &[u8], table: &ColumnScoreTable) -> Result<Vec<(u8, HalfDecibans)>> {
    let mut ranked = (0..ALPHABET as u8)
        .map(|k| score_column(column, k, table).map(|s| (k, s)))
        .collect::<Result<Vec<_>>>()?;
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    Ok(ranked)
}

/// `ln ∏_i 26·p(α_i − β)` for every key β.
fn log_likelihoods(column: &[u8], dist: &LetterDistribution) -> Result<[f64; ALPHABET]> {
    if column.is_empty() {
        return Err(Error::Domain("column must be nonempty".into()));
    }
    let mut out = [0.0; ALPHABET];
    for (key, slot) in out.iter_mut().enumerate() {
        *slot = column
            .iter()
            .map(|&c| (26.0 * dist.p(letters::sub(c, key as u8))).ln())
            .sum();
    }
    Ok(out)
}

/// Normalised posterior over the 26 keys under equal priors.
pub fn key_posterior(column: &[u8], dist: &LetterDistribution) -> Result<[f64; ALPHABET]> {
    let logs = log_likelihoods(column, dist)?;
    let max = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Err(Error::Degenerate);
    }
    let mut post = [0.0; ALPHABET];
    let mut sum = 0.0;
    for (dst, &l) in post.iter_mut().zip(&logs) {
        *dst = (l - max).exp();
        sum += *dst;
    }
    for p in &mut post {
        *p /= sum;
    }
    Ok(post)
}

/// `Σ_β ∏_i 26·p(α_i − β)`, the normaliser of [`key_posterior`]. It is the
/// likelihood ratio of "Vigenère with this period" against random letters
/// for the column, so it can be used to compare structural hypotheses.
pub fn evidence_denominator(column: &[u8], dist: &LetterDistribution) -> Result<f64> {
    let logs = log_likelihoods(column, dist)?;
    let max = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    Ok(max.exp() * logs.iter().map(|&l| (l - max).exp()).sum::<f64>())
}

/// Per-column result of [`solve`].
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnSolution {
    pub scores: [HalfDecibans; ALPHABET],
    pub posterior: [f64; ALPHABET],
    pub best: u8,
}

/// Scores and posteriors for every column of `cipher` at the given period.
pub fn solve(
    cipher: &[u8],
    period: usize,
    dist: &LetterDistribution,
) -> Result<Vec<ColumnSolution>> {
    if period == 0 || cipher.len() < period {
        return Err(Error::Domain(format!(
            "period {period} needs at least that many cipher letters, got {}",
            cipher.len()
        )));
    }
    let cols = columns(cipher, period);
    let longest = cols.iter().map(Vec::len).max().unwrap_or(1);
    let table = build_score_table(dist, longest)?;
    cols.iter()
        .map(|col| {
            let mut scores = [HalfDecibans(0); ALPHABET];
            for (k, s) in scores.iter_mut().enumerate() {
                *s = score_column(col, k as u8, &table)?;
            }
            let best = rank_keys(col, &table)?[0].0;
            Ok(ColumnSolution {
                scores,
                posterior: key_posterior(col, dist)?,
                best,
            })
        })
        .collect()
}
