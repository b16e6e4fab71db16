//! Repetition figures and evidence for fits ("depths").
//!
//! Two messages fit at a distance when the same run of substitutions
//! enciphers both, offset by that many places. Writing one under the other
//! and marking agreements `X` and disagreements `O` gives the repetition
//! figure. Under a true fit an `X` happens whenever the plain texts agree, so
//! figures from true fits carry more `X`s, and longer runs of them, than the
//! 1-in-26 coincidences of a wrong fit.
//!
//! Two scorers are provided:
//!
//! - [`simple_fit_factor`] uses only the counts of `X` and overlap length;
//! - [`general_fit_score`] scores each maximal run of `r` agreements with a
//!   tabulated `μ_r` and charges `ν` decibans per unit of overlap, from
//!   parameters estimated on a plain-language corpus by [`estimate_params`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bayes::Decibans;
use crate::corpus::{pairs, LetterDistribution, RgramCounts};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Message {
    First,
    Second,
}

/// Letters of one message lying outside the overlap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Overhang {
    pub count: usize,
    pub owner: Option<Message>,
}

impl Overhang {
    fn of(count: usize, owner: Message) -> Self {
        Overhang {
            count,
            owner: (count > 0).then_some(owner),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepetitionFigure {
    /// `true` for X (agreement).
    symbols: Vec<bool>,
    pub leading: Overhang,
    pub trailing: Overhang,
}

/// A maximal run of agreements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Run {
    pub start: usize,
    pub len: usize,
}

impl RepetitionFigure {
    pub fn from_symbols(symbols: Vec<bool>) -> Self {
        RepetitionFigure {
            symbols,
            leading: Overhang::default(),
            trailing: Overhang::default(),
        }
    }

    pub fn symbols(&self) -> &[bool] {
        &self.symbols
    }

    /// Overlap length.
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn repeats(&self) -> usize {
        self.symbols.iter().filter(|&&x| x).count()
    }

    pub fn runs(&self) -> Vec<Run> {
        let mut runs = Vec::new();
        let mut i = 0;
        while i < self.symbols.len() {
            if self.symbols[i] {
                let start = i;
                while i < self.symbols.len() && self.symbols[i] {
                    i += 1;
                }
                runs.push(Run {
                    start,
                    len: i - start,
                });
            } else {
                i += 1;
            }
        }
        runs
    }

    /// Number of places where `r` consecutive X's begin.
    pub fn apparent_repeats(&self, r: usize) -> usize {
        if r == 0 {
            return self.symbols.len();
        }
        self.runs()
            .iter()
            .map(|run| (run.len + 1).saturating_sub(r))
            .sum()
    }

    /// Number of maximal runs of exactly `r` X's.
    pub fn actual_repeats(&self, r: usize) -> usize {
        self.runs().iter().filter(|run| run.len == r).count()
    }

    pub fn symbol_string(&self) -> String {
        self.symbols
            .iter()
            .map(|&x| if x { 'X' } else { 'O' })
            .collect()
    }
}

/// Renders as `^{lead}XOO…^{trail}`.
impl fmt::Display for RepetitionFigure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "^{{{}}}{}^{{{}}}",
            self.leading.count,
            self.symbol_string(),
            self.trailing.count
        )
    }
}

/// Accepts a bare `X`/`O` string, optionally wrapped in `^{n}` overhang marks.
impl FromStr for RepetitionFigure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let take_mark = |t: &str, at_start: bool| -> Result<(usize, String)> {
            let t = t.to_string();
            if at_start {
                if let Some(rest) = t.strip_prefix("^{") {
                    let close = rest
                        .find('}')
                        .ok_or_else(|| Error::Parse("unclosed ^{".into()))?;
                    let n = rest[..close]
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad overhang in {s:?}")))?;
                    return Ok((n, rest[close + 1..].to_string()));
                }
            } else if let Some(open) = t.rfind("^{") {
                if t.ends_with('}') {
                    let n = t[open + 2..t.len() - 1]
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad overhang in {s:?}")))?;
                    return Ok((n, t[..open].to_string()));
                }
            }
            Ok((0, t))
        };
        let (lead, rest) = take_mark(s, true)?;
        let (trail, body) = take_mark(&rest, false)?;
        let symbols = body
            .chars()
            .map(|c| match c {
                'X' | 'x' => Ok(true),
                'O' | 'o' | '0' => Ok(false),
                other => Err(Error::Parse(format!(
                    "figure symbol {other:?} is not X or O"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(RepetitionFigure {
            symbols,
            leading: Overhang {
                count: lead,
                owner: None,
            },
            trailing: Overhang {
                count: trail,
                owner: None,
            },
        })
    }
}

/// Compares `msg2` against `msg1` with `msg2` starting `distance` places into
/// `msg1` (a negative distance starts `msg1` inside `msg2`).
pub fn repetition_figure(msg1: &[u8], msg2: &[u8], distance: i64) -> Result<RepetitionFigure> {
    let shift = distance.unsigned_abs() as usize;
    let (early, late, early_id, late_id) = if distance >= 0 {
        (msg1, msg2, Message::First, Message::Second)
    } else {
        (msg2, msg1, Message::Second, Message::First)
    };
    if shift >= early.len() || late.is_empty() {
        return Err(Error::NoOverlap(distance));
    }
    let overlap = (early.len() - shift).min(late.len());
    let symbols = early[shift..shift + overlap]
        .iter()
        .zip(&late[..overlap])
        .map(|(a, b)| a == b)
        .collect();
    let early_rest = early.len() - shift - overlap;
    let late_rest = late.len() - overlap;
    let trailing = if early_rest > 0 {
        Overhang::of(early_rest, early_id)
    } else {
        Overhang::of(late_rest, late_id)
    };
    Ok(RepetitionFigure {
        symbols,
        leading: Overhang::of(shift, early_id),
        trailing,
    })
}

/// Decibans for a fit from the number of X's alone: `26β` per X and
/// `(26/25)(1 − β)` per O, where `β = Σ p²` of the plain language.
pub fn simple_fit_factor(figure: &RepetitionFigure, beta: f64) -> Result<Decibans> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::Domain(format!(
            "beta must lie in (0, 1), got {beta}"
        )));
    }
    let n = figure.repeats() as f64;
    let overlap = figure.len() as f64;
    let per_x = 10.0 * (25.0 * beta / (1.0 - beta)).log10();
    let per_unit = 10.0 * (26.0 / 25.0 * (1.0 - beta)).log10();
    Ok(Decibans(n * per_x + overlap * per_unit))
}

/// Factor for a specific short figure (e.g. `OXXXXO`) observed in a fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FigureFactor {
    pub factor: f64,
    /// Sample pairs showing exactly the pattern.
    pub observed: u64,
    /// `N(N − 1)/2` pairs compared.
    pub pairs: u64,
    /// Frequency of the pattern under a wrong fit, `(1/26)^X (25/26)^O`.
    pub wrong_frequency: f64,
    /// Set when no pair showed the pattern, so the factor (0) is unreliable.
    pub insufficient: bool,
}

/// Frequency of `pattern` among all pairs of sample windows of its length,
/// divided by its frequency under a wrong fit. The sample is every window of
/// the circular statistics text.
pub fn hexagram_figure_factor(pattern: &[bool], stats: &RgramCounts) -> Result<FigureFactor> {
    let width = pattern.len();
    if width == 0 {
        return Err(Error::Domain("pattern must be nonempty".into()));
    }
    if width > stats.max_r() {
        return Err(Error::InsufficientOrder {
            have: stats.max_r(),
            need: width,
        });
    }
    let agree: Vec<usize> = (0..width).filter(|&i| pattern[i]).collect();
    let differ: Vec<usize> = (0..width).filter(|&i| !pattern[i]).collect();
    if differ.len() > 20 {
        return Err(Error::Domain("too many O positions in pattern".into()));
    }
    let text = stats.text();
    let n = text.len();
    // Inclusion–exclusion over the O positions: pairs agreeing on the X
    // positions minus those that also agree somewhere they must differ.
    let mut exact: i128 = 0;
    for mask in 0u32..(1 << differ.len()) {
        let mut positions = agree.clone();
        positions.extend(
            differ
                .iter()
                .enumerate()
                .filter(|(j, _)| mask & (1 << j) != 0)
                .map(|(_, &p)| p),
        );
        let agreeing = agreeing_pairs(text, &positions) as i128;
        if mask.count_ones() % 2 == 0 {
            exact += agreeing;
        } else {
            exact -= agreeing;
        }
    }
    let total = pairs(n as u64);
    let observed = exact as u64;
    let xs = agree.len() as i32;
    let os = differ.len() as i32;
    let wrong = (1.0 / 26f64).powi(xs) * (25.0 / 26f64).powi(os);
    let freq = if total > 0 {
        observed as f64 / total as f64
    } else {
        0.0
    };
    Ok(FigureFactor {
        factor: freq / wrong,
        observed,
        pairs: total,
        wrong_frequency: wrong,
        insufficient: observed == 0,
    })
}

/// Pairs of circular windows whose letters agree at every offset in `positions`.
fn agreeing_pairs(text: &[u8], positions: &[usize]) -> u64 {
    let n = text.len();
    if positions.is_empty() {
        return pairs(n as u64);
    }
    let mut keys: std::collections::HashMap<Vec<u8>, u64> = std::collections::HashMap::new();
    for start in 0..n {
        let key = positions.iter().map(|&p| text[(start + p) % n]).collect();
        *keys.entry(key).or_default() += 1;
    }
    keys.values().map(|&c| pairs(c)).sum()
}

/// Parameters of the general repeat theory, estimated from plain language
/// compared with itself at every non-zero offset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepeatParams {
    pub max_r: usize,
    /// `L = N(N − 1)/2`.
    pub pairs: u64,
    /// Apparent repeats `M_0 ..= M_{max_r+2}` with `M_0 = L`.
    pub apparent: Vec<u64>,
    /// Actual repeats `N_0 ..= N_{max_r}`, `N_r = M_r − 2M_{r+1} + M_{r+2}`.
    pub actual: Vec<i64>,
    /// Probability of an O.
    pub h: f64,
    /// `k_0 ..= k_{max_r}`: chance that the stretch after an O is exactly `r` X's then an O.
    pub k: Vec<f64>,
    /// Combined `k_r` for all `r > max_r`, so that `Σ k + k_beyond = 1`.
    pub k_beyond: f64,
    /// `a_r`, the chance of another X after `O` followed by `r` X's.
    pub a: Vec<f64>,
    /// Negative decibans per unit of overlap.
    pub nu: f64,
    /// `μ_0 ..= μ_{max_r}`, decibans for an r-gram repeat (`μ_0 = 0`).
    pub mu: Vec<f64>,
    pub beta: f64,
    /// Run scores for a figure whose first run starts the comparison and
    /// some letters precede it. Defaults to `mu` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_some: Option<Vec<f64>>,
    /// As `mu_some`, when no letters precede the comparison.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_none: Option<Vec<f64>>,
}

impl RepeatParams {
    pub fn a0(&self) -> f64 {
        self.a[0]
    }

    fn initial_series(&self, leading: usize) -> &[f64] {
        let slot = if leading == 0 {
            &self.mu_none
        } else {
            &self.mu_some
        };
        slot.as_deref().unwrap_or(&self.mu)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("params serialise")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

pub fn estimate_params(
    stats: &RgramCounts,
    dist: &LetterDistribution,
    max_r: usize,
) -> Result<RepeatParams> {
    if max_r < 1 {
        return Err(Error::Domain("max_r must be >= 1".into()));
    }
    if stats.max_r() < max_r + 2 {
        return Err(Error::InsufficientOrder {
            have: stats.max_r(),
            need: max_r + 2,
        });
    }
    let apparent = (0..=max_r + 2)
        .map(|r| stats.apparent_repeats(r))
        .collect::<Result<Vec<u64>>>()?;
    let m = |r: usize| apparent[r] as i64;
    let pairs_l = apparent[0];
    let actual: Vec<i64> = (0..=max_r)
        .map(|r| m(r) - 2 * m(r + 1) + m(r + 2))
        .collect();

    let outs = m(0) - m(1);
    if outs <= 0 {
        return Err(Error::Estimation(
            "L − M_1 <= 0: every comparison repeats".into(),
        ));
    }
    let lh = outs as f64;
    let h = lh / pairs_l as f64;
    let k: Vec<f64> = actual.iter().map(|&n| n as f64 / lh).collect();
    let k_beyond = (m(max_r + 1) - m(max_r + 2)) as f64 / lh;
    if let Some((r, _)) = k.iter().enumerate().find(|(_, &kr)| kr <= 0.0) {
        return Err(Error::Estimation(format!(
            "k_{r} <= 0; corpus too small or degenerate"
        )));
    }
    // survival[r] = P(at least r X's follow an O)
    let survival = |r: usize| -> f64 {
        if r == 0 {
            1.0
        } else {
            (m(r) - m(r + 1)) as f64 / lh
        }
    };
    let a: Vec<f64> = (0..=max_r).map(|r| survival(r + 1) / survival(r)).collect();
    let nu = -10.0 * (26.0 * k[0] / 25.0).log10();
    let mu = k
        .iter()
        .enumerate()
        .map(|(r, &kr)| {
            10.0 * (26f64.powi(r as i32 + 1) * kr / 25.0).log10() + (r as f64 + 1.0) * nu
        })
        .collect();
    Ok(RepeatParams {
        max_r,
        pairs: pairs_l,
        apparent,
        actual,
        h,
        k,
        k_beyond,
        a,
        nu,
        mu,
        beta: dist.coincidence(),
        mu_some: None,
        mu_none: None,
    })
}

/// `Σ μ_r` over maximal runs of X, minus `ν` per unit overlap. The run at the
/// start of the figure is scored from the `mu_none` / `mu_some` series
/// according to whether letters precede the overlap. A trailing run is
/// scored like any other; the small end-of-figure correction is ignored.
pub fn general_fit_score(figure: &RepetitionFigure, params: &RepeatParams) -> Result<Decibans> {
    let runs = figure.runs();
    if let Some(long) = runs.iter().find(|r| r.len > params.max_r) {
        return Err(Error::RunTooLong {
            run: long.len,
            max_r: params.max_r,
        });
    }
    let mut total = 0.0;
    let initial_len = runs.first().filter(|r| r.start == 0).map_or(0, |r| r.len);
    if !figure.is_empty() {
        total += params.initial_series(figure.leading.count)[initial_len];
    }
    for run in runs.iter().filter(|r| r.start != 0) {
        total += params.mu[run.len];
    }
    total -= params.nu * figure.len() as f64;
    Ok(Decibans(total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::rgram_counts;
    use crate::letters::parse;

    fn fig(s: &str) -> RepetitionFigure {
        s.parse().unwrap()
    }

    #[test]
    fn worked_figure() {
        let m1 = parse("GFRLIKQGVBMILAFIXMMOROGBYSKYXDAZCHMUMRKBZLDLDDOHCMVTIPRSD").unwrap();
        let m2 = parse("VLOVDYQCEJSOPYGBMBKYXDAZNBFIOPTFCXDOD").unwrap();
        let f = repetition_figure(&m1, &m2, 8).unwrap();
        assert_eq!(f.symbol_string(), "XOOOOOOOOOOXOOXXOOXXXXXXOOOOOOOOOOXOX");
        assert_eq!(
            f.leading,
            Overhang {
                count: 8,
                owner: Some(Message::First)
            }
        );
        // the printed margin says 11; the messages as given leave 12
        assert_eq!(
            f.trailing,
            Overhang {
                count: 12,
                owner: Some(Message::First)
            }
        );
        assert!(f.symbol_string().contains("XXXXXX"));
        assert_eq!(
            f.to_string(),
            "^{8}XOOOOOOOOOOXOOXXOOXXXXXXOOOOOOOOOOXOX^{12}"
        );
    }

    #[test]
    fn negative_distance_swaps_roles() {
        let a = parse("ABCDE").unwrap();
        let b = parse("ZZABC").unwrap();
        let f = repetition_figure(&a, &b, -2).unwrap();
        assert_eq!(f.symbol_string(), "XXX");
        assert_eq!(
            f.leading,
            Overhang {
                count: 2,
                owner: Some(Message::Second)
            }
        );
        assert_eq!(
            f.trailing,
            Overhang {
                count: 2,
                owner: Some(Message::First)
            }
        );
        assert_eq!(repetition_figure(&a, &b, 5), Err(Error::NoOverlap(5)));
        assert_eq!(repetition_figure(&a, &b, -9), Err(Error::NoOverlap(-9)));
    }

    #[test]
    fn identical_and_one_change() {
        let a = parse("THEMAINCONVOY").unwrap();
        assert!(repetition_figure(&a, &a, 0)
            .unwrap()
            .symbols()
            .iter()
            .all(|&x| x));
        let mut b = a[3..].to_vec();
        b[4] = (b[4] + 1) % 26;
        let f = repetition_figure(&a, &b, 3).unwrap();
        assert_eq!(f.len() - f.repeats(), 1);
    }

    #[test]
    fn figure_parse() {
        let f = fig("^{3}XXO^{4}");
        assert_eq!(f.leading.count, 3);
        assert_eq!(f.trailing.count, 4);
        assert_eq!(f.symbol_string(), "XXO");
        assert_eq!(fig("OXO").leading.count, 0);
        assert!("XQ".parse::<RepetitionFigure>().is_err());
    }

    #[test]
    fn simple_factor_examples() {
        let any = fig("XXOOXOOOXX");
        assert!(simple_fit_factor(&any, 1.0 / 26.0).unwrap().value().abs() < 1e-12);

        let one_x = fig("X");
        let d = simple_fit_factor(&one_x, 0.0621).unwrap().value();
        assert!((d - 10.0 * (26.0f64 * 0.0621).log10()).abs() < 1e-12);
        assert!((d - 2.08).abs() < 0.005);

        let all_o = fig("OOOOOOOOOO");
        let d = simple_fit_factor(&all_o, 0.0621).unwrap().value();
        assert!((d - 10.0 * 10.0 * (26.0 / 25.0 * (1.0 - 0.0621f64)).log10()).abs() < 1e-12);
        assert!(d < 0.0);

        assert!(simple_fit_factor(&any, 0.0).is_err());
        assert!(simple_fit_factor(&any, 1.0).is_err());
    }

    #[test]
    fn apparent_and_actual_counts() {
        let f = fig("XXXXOOOXOXXXOOXX");
        assert_eq!(f.apparent_repeats(1), 10);
        assert_eq!(f.apparent_repeats(2), 6);
        assert_eq!(f.apparent_repeats(3), 3);
        assert_eq!(f.actual_repeats(1), 1);
        assert_eq!(f.actual_repeats(2), 1);
        assert_eq!(f.actual_repeats(3), 1);
        assert_eq!(f.actual_repeats(4), 1);
    }

    #[test]
    fn hexagram_wrong_frequency() {
        let stats =
            rgram_counts(&parse("THEQUICKBROWNFOXJUMPSOVERTHELAZYDOG").unwrap(), 6).unwrap();
        let pattern: Vec<bool> = "OXXXXO".chars().map(|c| c == 'X').collect();
        let f = hexagram_figure_factor(&pattern, &stats).unwrap();
        let expected = (1.0 / 26f64).powi(4) * (25.0 / 26f64).powi(2);
        assert!((f.wrong_frequency - expected).abs() < 1e-18);
        assert_eq!(f.observed, 0);
        assert!(f.insufficient);
        assert_eq!(f.factor, 0.0);
    }

    #[test]
    fn hexagram_degenerate_sample() {
        let stats = rgram_counts(&[0; 40], 6).unwrap();
        let f = hexagram_figure_factor(&[true; 6], &stats).unwrap();
        assert_eq!(f.observed, f.pairs);
        assert!((f.factor - 26f64.powi(6)).abs() / 26f64.powi(6) < 1e-12);
        let g = hexagram_figure_factor(&[false, true, true, true, true, false], &stats).unwrap();
        assert_eq!(g.observed, 0);
        assert!(hexagram_figure_factor(&[true; 7], &stats).is_err());
    }

    #[test]
    fn degenerate_corpora_fail_estimation() {
        let d = LetterDistribution::uniform();
        let aaaa = rgram_counts(&[0; 50], 5).unwrap();
        assert!(matches!(
            estimate_params(&aaaa, &d, 3),
            Err(Error::Estimation(_))
        ));

        let abab: Vec<u8> = (0..50).map(|i| (i % 2) as u8).collect();
        let stats = rgram_counts(&abab, 5).unwrap();
        assert!(matches!(
            estimate_params(&stats, &d, 3),
            Err(Error::Estimation(_))
        ));

        assert!(matches!(
            estimate_params(&stats, &d, 4),
            Err(Error::InsufficientOrder { .. })
        ));
    }

    fn toy_params() -> RepeatParams {
        RepeatParams {
            max_r: 3,
            pairs: 0,
            apparent: vec![],
            actual: vec![],
            h: 0.9,
            k: vec![],
            k_beyond: 0.0,
            a: vec![0.1],
            nu: 0.25,
            mu: vec![0.0, 3.0, 8.0, 14.0],
            beta: 0.066,
            mu_some: None,
            mu_none: None,
        }
    }

    #[test]
    fn general_score_structure() {
        let p = toy_params();
        assert!((general_fit_score(&fig("OOOOO"), &p).unwrap().value() + 1.25).abs() < 1e-12);
        // initial 2-run, single, trailing 3-run
        let s = general_fit_score(&fig("XXOOXOXXX"), &p).unwrap().value();
        assert!((s - (8.0 + 3.0 + 14.0 - 9.0 * 0.25)).abs() < 1e-12);
        assert_eq!(
            general_fit_score(&fig("OXXXXO"), &p),
            Err(Error::RunTooLong { run: 4, max_r: 3 })
        );
    }

    #[test]
    fn initial_series_slots() {
        let mut p = toy_params();
        p.mu_none = Some(vec![-1.0, 1.0, 2.0, 3.0]);
        p.mu_some = Some(vec![0.5, 1.5, 2.5, 3.5]);
        let mut f = fig("XXOX");
        let none = general_fit_score(&f, &p).unwrap().value();
        assert!((none - (2.0 + 3.0 - 1.0)).abs() < 1e-12);
        f.leading.count = 4;
        let some = general_fit_score(&f, &p).unwrap().value();
        assert!((some - (2.5 + 3.0 - 1.0)).abs() < 1e-12);
        let o_start = general_fit_score(&fig("OX"), &p).unwrap().value();
        assert!((o_start - (-1.0 + 3.0 - 0.5)).abs() < 1e-12);
    }

    #[test]
    fn params_json_round_trip() {
        let p = toy_params();
        assert_eq!(RepeatParams::from_json(&p.to_json()).unwrap(), p);
    }
}
