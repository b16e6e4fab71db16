//! Simple columnar transposition and the statistics used to attack it.
//!
//! Plain text is written in rows of width `K` and read out column by column
//! in key order. When `K` does not divide the length `L = DK + E`, the first
//! `E` columns hold `D + 1` letters and the rest `D`.
//!
//! Column matching uses exclusive bigram scores, `20·log10(P_ab/(P_a·P_b))`,
//! which measure how much more often `a` is directly followed by `b` than
//! independence would suggest. The module also covers where column bottoms
//! fall in the cipher text and checks on the letter-to-letter Markov chain
//! behind those scores.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::bayes::HalfDecibans;
use crate::corpus::BigramStats;
use crate::letters::{self, ALPHABET};
use crate::vigenere::ZERO_PROBABILITY_FLOOR;
use crate::{Error, Result};

/// Column read-out order: `order()[j]` is the (0-based) column read `j`-th.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranspositionKey {
    order: Vec<usize>,
}

impl TranspositionKey {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let k = order.len();
        if k == 0 {
            return Err(Error::InvalidKey("empty transposition key".into()));
        }
        let mut seen = vec![false; k];
        for &c in &order {
            if c >= k || seen[c] {
                return Err(Error::InvalidKey(format!(
                    "{order:?} is not a permutation of 0..{k}"
                )));
            }
            seen[c] = true;
        }
        Ok(TranspositionKey { order })
    }

    /// From a 1-based read-out sequence such as `5,11,8,…`.
    pub fn from_one_based(order: &[usize]) -> Result<Self> {
        if order.contains(&0) {
            return Err(Error::InvalidKey("columns are numbered from 1".into()));
        }
        Self::new(order.iter().map(|&c| c - 1).collect())
    }

    pub fn identity(k: usize) -> Result<Self> {
        Self::new((0..k).collect())
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

impl fmt::Display for TranspositionKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.order.iter().map(|c| (c + 1).to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

/// Parses comma- or space-separated 1-based column numbers.
impl FromStr for TranspositionKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let cols = s
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| Error::InvalidKey(format!("bad column {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_one_based(&cols)
    }
}

fn column_len(len: usize, k: usize, col: usize) -> usize {
    len / k + usize::from(col < len % k)
}

pub fn encipher(plain: &[u8], key: &TranspositionKey) -> Vec<u8> {
    let k = key.len();
    let mut out = Vec::with_capacity(plain.len());
    for &col in key.order() {
        out.extend(plain.iter().skip(col).step_by(k));
    }
    out
}

pub fn decipher(cipher: &[u8], key: &TranspositionKey) -> Vec<u8> {
    let k = key.len();
    let mut plain = vec![0u8; cipher.len()];
    let mut pos = 0;
    for &col in key.order() {
        let n = column_len(cipher.len(), k, col);
        for (row, &c) in cipher[pos..pos + n].iter().enumerate() {
            plain[row * k + col] = c;
        }
        pos += n;
    }
    plain
}

/// The columns of the plain-text grid, in natural (unkeyed) order.
pub fn plain_columns(plain: &[u8], k: usize) -> Vec<Vec<u8>> {
    (0..k)
        .map(|c| plain.iter().skip(c).step_by(k).copied().collect())
        .collect()
}

/// Exclusive bigram scores in half-decibans.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExclusiveBigramTable {
    score: [[i64; ALPHABET]; ALPHABET],
}

impl Default for ExclusiveBigramTable {
    fn default() -> Self {
        ExclusiveBigramTable {
            score: [[0; ALPHABET]; ALPHABET],
        }
    }
}

impl ExclusiveBigramTable {
    pub fn from_scores(score: [[i64; ALPHABET]; ALPHABET]) -> Self {
        ExclusiveBigramTable { score }
    }

    /// A table that is zero except for the given `(first, second, score)` entries.
    pub fn from_entries(entries: &[(u8, u8, i64)]) -> Self {
        let mut t = Self::default();
        for &(a, b, s) in entries {
            t.score[a as usize][b as usize] = s;
        }
        t
    }

    /// The six entries quoted for the German example: SF, AA, TS, PT, TA, WU.
    pub fn fixture() -> Self {
        let l = |c: char| c as u8 - b'A';
        Self::from_entries(&[
            (l('S'), l('F'), -7),
            (l('A'), l('A'), -7),
            (l('T'), l('S'), -2),
            (l('P'), l('T'), -10),
            (l('T'), l('A'), -3),
            (l('W'), l('U'), -13),
        ])
    }

    pub fn score(&self, a: u8, b: u8) -> i64 {
        self.score[a as usize][b as usize]
    }

    pub fn scores(&self) -> &[[i64; ALPHABET]; ALPHABET] {
        &self.score
    }

    /// One `AB<TAB>score` line per pair.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("bigram\tscore\n");
        for a in 0..ALPHABET as u8 {
            for b in 0..ALPHABET as u8 {
                out.push_str(&format!(
                    "{}{}\t{}\n",
                    letters::to_char(a),
                    letters::to_char(b),
                    self.score(a, b)
                ));
            }
        }
        out
    }

    /// Reads `AB<TAB>score` lines; pairs not listed score 0. A header line,
    /// blank lines and `#` comments are skipped.
    pub fn from_tsv(text: &str) -> Result<Self> {
        let mut t = Self::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split_whitespace();
            let (Some(pair), Some(value), None) = (fields.next(), fields.next(), fields.next())
            else {
                return Err(Error::Parse(format!(
                    "line {}: expected `AB<TAB>score`",
                    n + 1
                )));
            };
            let Ok(value) = value.parse::<i64>() else {
                if n == 0 {
                    continue;
                }
                return Err(Error::Parse(format!("line {}: bad score {value:?}", n + 1)));
            };
            let pair = letters::parse(pair)?;
            if pair.len() != 2 {
                return Err(Error::Parse(format!(
                    "line {}: expected two letters",
                    n + 1
                )));
            }
            t.score[pair[0] as usize][pair[1] as usize] = value;
        }
        Ok(t)
    }
}

/// Rounds `20·log10(P_ab/(P_a·P_b))`; pairs never seen get the floor.
pub fn build_bigram_score_table(stats: &BigramStats) -> ExclusiveBigramTable {
    let mut score = [[0i64; ALPHABET]; ALPHABET];
    for (a, row) in score.iter_mut().enumerate() {
        for (b, s) in row.iter_mut().enumerate() {
            *s = match exclusive_ratio(stats, a as u8, b as u8) {
                Some(ratio) => HalfDecibans::round(20.0 * ratio.log10()).value(),
                None => ZERO_PROBABILITY_FLOOR,
            };
        }
    }
    ExclusiveBigramTable { score }
}

/// `P_ab/(P_a·P_b)`, or `None` when the pair was never seen.
pub fn exclusive_ratio(stats: &BigramStats, a: u8, b: u8) -> Option<f64> {
    let joint = stats.joint(a, b);
    (joint > 0.0).then(|| joint / (stats.marginal(a) * stats.column_marginal(b)))
}

/// `Σ_i score(first_i, second_i)`: evidence that `second` directly follows `first`.
pub fn score_column_pair(
    first: &[u8],
    second: &[u8],
    table: &ExclusiveBigramTable,
) -> Result<HalfDecibans> {
    if first.len() != second.len() {
        return Err(Error::LengthMismatch {
            left: first.len(),
            right: second.len(),
        });
    }
    Ok(HalfDecibans(
        first
            .iter()
            .zip(second)
            .map(|(&a, &b)| table.score(a, b))
            .sum(),
    ))
}

/// Scores for one offset of the probe against the message.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AlignmentScore {
    pub offset: usize,
    /// Probe as the earlier column (window follows it). `None` when the window is the probe itself.
    pub earlier: Option<HalfDecibans>,
    /// Probe as the later column.
    pub later: Option<HalfDecibans>,
}

impl AlignmentScore {
    pub fn is_self(&self) -> bool {
        self.earlier.is_none()
    }
}

/// Slides `probe` along `message`, scoring each window in both orders.
pub fn scan_alignments(
    probe: &[u8],
    message: &[u8],
    table: &ExclusiveBigramTable,
) -> Result<Vec<AlignmentScore>> {
    if probe.is_empty() || probe.len() > message.len() {
        return Err(Error::LengthMismatch {
            left: probe.len(),
            right: message.len(),
        });
    }
    message
        .windows(probe.len())
        .enumerate()
        .map(|(offset, window)| {
            if window == probe {
                return Ok(AlignmentScore {
                    offset,
                    earlier: None,
                    later: None,
                });
            }
            Ok(AlignmentScore {
                offset,
                earlier: Some(score_column_pair(probe, window, table)?),
                later: Some(score_column_pair(window, probe, table)?),
            })
        })
        .collect()
}

/// Converts scores of mutually exclusive alternatives into probabilities
/// `f_r / Σ f_i`. Excluded entries stay `None`.
pub fn alignment_posteriors(scores: &[Option<HalfDecibans>]) -> Vec<Option<f64>> {
    let max = scores.iter().flatten().map(|s| s.value()).max();
    let Some(max) = max else {
        return vec![None; scores.len()];
    };
    // shift by the max before exponentiating
    let factors: Vec<Option<f64>> = scores
        .iter()
        .map(|s| s.map(|s| 10f64.powf((s.value() - max) as f64 / 20.0)))
        .collect();
    let total: f64 = factors.iter().flatten().sum();
    factors.into_iter().map(|f| f.map(|f| f / total)).collect()
}

fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::from(1u32);
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Probability that letter `m` (1-based) of a cipher text of length `len`,
/// made with an unknown key of length `k`, is the last letter of a column.
/// Every choice of which `E` columns are long is taken as equally likely.
pub fn bottom_of_column_probability(len: usize, k: usize, m: usize) -> Result<BigRational> {
    if k == 0 {
        return Err(Error::Domain("key length must be at least 1".into()));
    }
    if m == 0 || m > len {
        return Err(Error::Domain(format!("position {m} outside 1..={len}")));
    }
    let d = len / k;
    let e = len % k;
    if d == 0 {
        // every non-empty column has one letter
        return Ok(BigRational::from_integer(1.into()));
    }
    // m closes the w-th column read when l of those w columns are long: m = dw + l
    let mut num = BigInt::zero();
    for w in 1..=k {
        let Some(l) = m.checked_sub(d * w) else { break };
        if l > w || l > e {
            continue;
        }
        num += binomial(w, l) * binomial(k - w, e - l);
    }
    Ok(BigRational::new(num, binomial(k, e)))
}

/// One known letter of a pattern, preceded by `gap_before` unknown letters
/// (ignored for the first element).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PatternElement {
    pub gap_before: usize,
    pub letter: u8,
}

impl PatternElement {
    pub fn new(gap_before: usize, letter: u8) -> Self {
        PatternElement { gap_before, letter }
    }
}

/// Approximate probability of a pattern of known letters with gaps: the
/// product of single-letter frequencies, times the exclusive factor for each
/// pair of known letters that are adjacent.
pub fn pattern_probability(pattern: &[PatternElement], stats: &BigramStats) -> Result<f64> {
    if pattern.is_empty() {
        return Err(Error::Domain("pattern must be nonempty".into()));
    }
    let mut p = 1.0;
    for (i, el) in pattern.iter().enumerate() {
        let pa = stats.marginal(el.letter);
        if pa <= 0.0 {
            return Err(Error::Domain(format!(
                "letter {} never occurs",
                letters::to_char(el.letter)
            )));
        }
        p *= pa;
        if i > 0 && el.gap_before == 0 {
            let prev = pattern[i - 1].letter;
            p *= stats.joint(prev, el.letter)
                / (stats.marginal(prev) * stats.column_marginal(el.letter));
        }
    }
    Ok(p)
}

/// Exact probability of the pattern under the bigram chain, marginalising
/// each gap of `n` letters with `Q^{n+1}`.
pub fn exact_pattern_probability(pattern: &[PatternElement], stats: &BigramStats) -> Result<f64> {
    let first = pattern
        .first()
        .ok_or_else(|| Error::Domain("pattern must be nonempty".into()))?;
    let q = TransitionMatrix::from_stats(stats);
    let mut p = stats.marginal(first.letter);
    let mut powers: Vec<Matrix> = vec![q.q];
    for pair in pattern.windows(2) {
        let steps = pair[1].gap_before + 1;
        while powers.len() < steps {
            let next = mul(powers.last().unwrap(), &q.q);
            powers.push(next);
        }
        p *= powers[steps - 1][pair[0].letter as usize][pair[1].letter as usize];
    }
    Ok(p)
}

/// `J(α_1…α_n) = P_{α_1} ∏ q_{α_i α_{i+1}}`, the chain's probability of a
/// fully known piece of text.
pub fn plain_language_probability(text: &[u8], stats: &BigramStats) -> Result<f64> {
    let pattern: Vec<PatternElement> = text.iter().map(|&c| PatternElement::new(0, c)).collect();
    exact_pattern_probability(&pattern, stats)
}

/// How far the gap approximation strays from the chain for two known letters
/// separated by `gap` unknown ones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapApproximationError {
    pub gap: usize,
    /// `Σ_ab J(a…b)·|approx/exact − 1|`, the error expected on text drawn from the chain.
    pub weighted_mean: f64,
    /// Largest relative error over all pairs the chain can produce.
    pub worst: f64,
}

#[allow(clippy::needless_range_loop)]
pub fn gap_approximation_error(stats: &BigramStats, gap: usize) -> GapApproximationError {
    let q = TransitionMatrix::from_stats(stats);
    let t = q.power(gap + 1);
    let mut weighted_mean = 0.0;
    let mut worst: f64 = 0.0;
    for a in 0..ALPHABET {
        for b in 0..ALPHABET {
            let exact = stats.marginal(a as u8) * t[a][b];
            if exact <= 0.0 {
                continue;
            }
            let approx = stats.marginal(a as u8) * stats.marginal(b as u8);
            let err = (approx / exact - 1.0).abs();
            weighted_mean += exact * err;
            worst = worst.max(err);
        }
    }
    GapApproximationError {
        gap,
        weighted_mean,
        worst,
    }
}

type Matrix = [[f64; ALPHABET]; ALPHABET];

fn mul(a: &Matrix, b: &Matrix) -> Matrix {
    let mut out = [[0.0; ALPHABET]; ALPHABET];
    for i in 0..ALPHABET {
        for k in 0..ALPHABET {
            let aik = a[i][k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..ALPHABET {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

fn max_abs_diff(a: &Matrix, b: &Matrix) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..ALPHABET {
        for j in 0..ALPHABET {
            m = m.max((a[i][j] - b[i][j]).abs());
        }
    }
    m
}

/// Row-stochastic letter transition matrix, `q_ab = P_ab / P_a`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    q: Matrix,
}

impl TransitionMatrix {
    pub fn new(q: Matrix) -> Result<Self> {
        for (a, row) in q.iter().enumerate() {
            if row.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
                return Err(Error::Domain(format!(
                    "row {a} has an entry outside [0, 1]"
                )));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(Error::Domain(format!("row {a} sums to {sum}")));
            }
        }
        Ok(TransitionMatrix { q })
    }

    /// Letters never seen as the first of a pair get a uniform row; the
    /// chain cannot reach them, so the choice does not affect the limit.
    pub fn from_stats(stats: &BigramStats) -> Self {
        let mut q = [[0.0; ALPHABET]; ALPHABET];
        for (a, row) in q.iter_mut().enumerate() {
            if stats.marginal(a as u8) > 0.0 {
                for (b, x) in row.iter_mut().enumerate() {
                    *x = stats.transition(a as u8, b as u8);
                }
            } else {
                row.fill(1.0 / ALPHABET as f64);
            }
        }
        TransitionMatrix { q }
    }

    pub fn rows(&self) -> &Matrix {
        &self.q
    }

    pub fn power(&self, n: usize) -> Matrix {
        let mut out = [[0.0; ALPHABET]; ALPHABET];
        for (i, row) in out.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        for _ in 0..n {
            out = mul(&out, &self.q);
        }
        out
    }

    #[allow(clippy::needless_range_loop)]
    /// Stationary vector by power iteration on the lazy chain `(I + Q)/2`,
    /// which has the same fixed point but cannot oscillate.
    pub fn stationary(&self) -> [f64; ALPHABET] {
        let mut p = [1.0 / ALPHABET as f64; ALPHABET];
        for _ in 0..100_000 {
            let mut next = [0.0; ALPHABET];
            for a in 0..ALPHABET {
                for b in 0..ALPHABET {
                    next[b] += p[a] * self.q[a][b];
                }
            }
            let mut delta: f64 = 0.0;
            for b in 0..ALPHABET {
                next[b] = 0.5 * (next[b] + p[b]);
                delta = delta.max((next[b] - p[b]).abs());
            }
            p = next;
            if delta < 1e-17 {
                break;
            }
        }
        let total: f64 = p.iter().sum();
        p.map(|x| x / total)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationarityReport {
    /// Smallest `n` with `max |(Q^n)_ab − P_b| < tol`, if reached by `max_n`.
    pub converged_at: Option<usize>,
    /// The deviation at `converged_at`, or at `max_n` if not converged.
    pub max_deviation: f64,
    pub stationary: [f64; ALPHABET],
    /// `max |YQ − Y|` for the limit `Y` whose rows are all `P`.
    pub yq_error: f64,
    /// `max |Y² − Y|`.
    pub yy_error: f64,
}

impl StationarityReport {
    pub fn converged(&self) -> bool {
        self.converged_at.is_some()
    }
}

pub fn stationarity_check(q: &TransitionMatrix, tol: f64, max_n: usize) -> StationarityReport {
    let p = q.stationary();
    let y: Matrix = [p; ALPHABET];
    let mut power = q.q;
    let mut converged_at = None;
    let mut deviation = max_abs_diff(&power, &y);
    for n in 1..=max_n {
        if n > 1 {
            power = mul(&power, &q.q);
            deviation = max_abs_diff(&power, &y);
        }
        if deviation < tol {
            converged_at = Some(n);
            break;
        }
    }
    StationarityReport {
        converged_at,
        max_deviation: deviation,
        stationary: p,
        yq_error: max_abs_diff(&mul(&y, &q.q), &y),
        yy_error: max_abs_diff(&mul(&y, &y), &y),
    }
}
