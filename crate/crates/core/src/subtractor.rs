//! Slide distributions for multi-component letter subtractors.
//!
//! A subtractor built from `k` superimposed Vigenère components, each using
//! slides `0..=q` equally often, produces a total slide whose distribution is
//! given by the coefficients of `f(x) = (1 + x + … + x^q)^k`. Folding those
//! coefficients mod 26 gives the probability of each alphabetic slide, and
//! hence a half-deciban score `20·log10(26·C_s / total)` per slide for
//! evaluating cribs.

use crate::bayes::{HalfDecibans, Odds};
use crate::letters::{self, ALPHABET};
use crate::{Error, Result};

/// Slide scores as printed for the 3-wheel, 0..9 subtractor. They agree with
/// [`build_slide_table`] except at slides 5 and 22, printed as −6 where the
/// formula rounds to −5.
pub const PRINTED_SLIDE_SCORES: [i64; ALPHABET] = [
    -20, -20, -16, -12, -8, -6, -3, -1, 1, 3, 4, 5, 6, // slides 0-12
    6, 6, 6, 5, 4, 3, 1, -1, -3, -6, -8, -12, -16, // slides 13-25
];

/// Coefficients of `(1 + x + … + x^q)^k` and their mod-26 folding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlideDistribution {
    components: usize,
    max_slide: usize,
    coeffs: Vec<u128>,
    remainders: [u128; ALPHABET],
    total: u128,
}

impl SlideDistribution {
    pub fn components(&self) -> usize {
        self.components
    }

    pub fn max_slide(&self) -> usize {
        self.max_slide
    }

    /// `C_s` for `s = 0..=k·q`.
    pub fn coeffs(&self) -> &[u128] {
        &self.coeffs
    }

    /// `Σ_j C_{s + 26j}` for each alphabetic slide `s`.
    pub fn remainders(&self) -> &[u128; ALPHABET] {
        &self.remainders
    }

    /// `(q + 1)^k`.
    pub fn total(&self) -> u128 {
        self.total
    }

    pub fn probability(&self, slide: u8) -> f64 {
        self.remainders[slide as usize % ALPHABET] as f64 / self.total as f64
    }
}

/// Expands `(1 + x + … + x^q)^k` by repeated convolution.
pub fn slide_coefficients(components: usize, max_slide: usize) -> Result<SlideDistribution> {
    if components == 0 {
        return Err(Error::Domain("need at least one component".into()));
    }
    let mut coeffs: Vec<u128> = vec![1];
    for _ in 0..components {
        let mut next = vec![0u128; coeffs.len() + max_slide];
        for (i, &c) in coeffs.iter().enumerate() {
            for slot in &mut next[i..=i + max_slide] {
                *slot = slot
                    .checked_add(c)
                    .ok_or(Error::Overflow("slide coefficients"))?;
            }
        }
        coeffs = next;
    }
    let mut remainders = [0u128; ALPHABET];
    for (s, &c) in coeffs.iter().enumerate() {
        remainders[s % ALPHABET] += c;
    }
    let total = coeffs
        .iter()
        .try_fold(0u128, |acc, &c| acc.checked_add(c))
        .ok_or(Error::Overflow("slide total"))?;
    Ok(SlideDistribution {
        components,
        max_slide,
        coeffs,
        remainders,
        total,
    })
}

/// Half-deciban score for each slide value `0..26`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SlideScoreTable {
    score: [i64; ALPHABET],
}

impl SlideScoreTable {
    pub fn from_scores(score: [i64; ALPHABET]) -> Self {
        SlideScoreTable { score }
    }

    /// The table exactly as printed for the 3-wheel subtractor.
    pub fn printed() -> Self {
        SlideScoreTable {
            score: PRINTED_SLIDE_SCORES,
        }
    }

    pub fn score(&self, slide: u8) -> HalfDecibans {
        HalfDecibans(self.score[slide as usize % ALPHABET])
    }

    pub fn scores(&self) -> &[i64; ALPHABET] {
        &self.score
    }
}

/// Slides with zero probability (possible only when `k·q < 25`) score
/// [`crate::vigenere::ZERO_PROBABILITY_FLOOR`].
pub fn build_slide_table(dist: &SlideDistribution) -> SlideScoreTable {
    let mut score = [0i64; ALPHABET];
    for (s, dst) in score.iter_mut().enumerate() {
        let r = dist.remainders[s];
        *dst = if r == 0 {
            crate::vigenere::ZERO_PROBABILITY_FLOOR
        } else {
            HalfDecibans::round(20.0 * (26.0 * r as f64 / dist.total as f64).log10()).value()
        };
    }
    SlideScoreTable { score }
}

/// A crib placed against cipher text, with the slide each position needs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CribAlignment {
    pub cipher: Vec<u8>,
    pub crib: Vec<u8>,
    pub slides: Vec<u8>,
}

impl CribAlignment {
    /// An alignment known only through its slide list.
    pub fn from_slides(slides: Vec<u8>) -> Result<Self> {
        if let Some(&bad) = slides.iter().find(|&&s| s as usize >= ALPHABET) {
            return Err(Error::Domain(format!("slide {bad} out of range 0..26")));
        }
        Ok(CribAlignment {
            cipher: Vec::new(),
            crib: Vec::new(),
            slides,
        })
    }
}

/// Aligns `crib` with the start of `cipher`: `slide_i = cipher_i − crib_i (mod 26)`.
pub fn slides_from_crib(cipher: &[u8], crib: &[u8]) -> Result<CribAlignment> {
    if crib.len() > cipher.len() {
        return Err(Error::LengthMismatch {
            left: cipher.len(),
            right: crib.len(),
        });
    }
    let cipher = cipher[..crib.len()].to_vec();
    let slides = cipher
        .iter()
        .zip(crib)
        .map(|(&c, &p)| letters::sub(c, p))
        .collect();
    Ok(CribAlignment {
        cipher,
        crib: crib.to_vec(),
        slides,
    })
}

/// Total score of the crib's slides and the resulting posterior odds.
pub fn score_crib(
    alignment: &CribAlignment,
    table: &SlideScoreTable,
    prior: Odds,
) -> Result<(HalfDecibans, Odds)> {
    let total: HalfDecibans = alignment.slides.iter().map(|&s| table.score(s)).sum();
    let posterior = prior.apply_factor(total.factor())?;
    Ok((total, posterior))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::letters::parse;

    #[test]
    fn three_wheel_expansion() {
        let d = slide_coefficients(3, 9).unwrap();
        let expected: [u128; 28] = [
            1, 3, 6, 10, 15, 21, 28, 36, 45, 55, 63, 69, 73, 75, 75, 73, 69, 63, 55, 45, 36, 28,
            21, 15, 10, 6, 3, 1,
        ];
        assert_eq!(d.coeffs(), &expected);
        assert_eq!(d.total(), 1000);
        assert_eq!(&d.remainders()[..5], &[4, 4, 6, 10, 15]);
        assert_eq!(d.remainders().iter().sum::<u128>(), 1000);
    }

    #[test]
    fn single_wheel_is_uniform() {
        let d = slide_coefficients(1, 9).unwrap();
        assert_eq!(d.coeffs(), &[1; 10]);
        assert_eq!(d.total(), 10);
        assert!(slide_coefficients(0, 9).is_err());
    }

    #[test]
    fn overflow_is_reported() {
        assert_eq!(
            slide_coefficients(200, 25),
            Err(Error::Overflow("slide coefficients"))
        );
    }

    #[test]
    fn computed_table_vs_printed() {
        let t = build_slide_table(&slide_coefficients(3, 9).unwrap());
        assert_eq!(t.score(13).value(), 6);
        assert_eq!(t.score(0).value(), -20);
        assert_eq!(t.score(2).value(), -16);
        for s in 0..26u8 {
            let diff = (t.score(s).value() - PRINTED_SLIDE_SCORES[s as usize]).abs();
            assert!(diff <= 1, "slide {s}");
        }
        assert_eq!(t.score(5).value(), -5);
        assert_eq!(t.score(22).value(), -5);
    }

    #[test]
    fn crib_slides() {
        let a =
            slides_from_crib(&parse("NYXLNXIQHH").unwrap(), &parse("AMBASSADOR").unwrap()).unwrap();
        assert_eq!(a.slides, vec![13, 12, 22, 11, 21, 5, 8, 13, 19, 16]);

        let a = slides_from_crib(
            &parse("MVHWUSXOWBVMMK").unwrap(),
            &parse("AMBASSADOR").unwrap(),
        )
        .unwrap();
        assert_eq!(a.slides, vec![12, 9, 6, 22, 2, 0, 23, 11, 8, 10]);

        let t = parse("HELLO").unwrap();
        assert!(slides_from_crib(&t, &t)
            .unwrap()
            .slides
            .iter()
            .all(|&s| s == 0));
        assert!(slides_from_crib(&parse("AB").unwrap(), &parse("ABC").unwrap()).is_err());
    }

    #[test]
    fn crib_scores() {
        let printed = SlideScoreTable::printed();
        let computed = build_slide_table(&slide_coefficients(3, 9).unwrap());
        let prior = Odds::from_pair(1.0, 2.0).unwrap();

        let second =
            CribAlignment::from_slides(vec![13, 12, 22, 11, 21, 5, 8, 13, 19, 16]).unwrap();
        let (s, post) = score_crib(&second, &printed, prior).unwrap();
        assert_eq!(s.value(), 15);
        assert!((post.ratio() - 2.81).abs() < 0.01);
        assert_eq!(score_crib(&second, &computed, prior).unwrap().0.value(), 17);

        let first = CribAlignment::from_slides(vec![12, 9, 6, 22, 2, 0, 23, 11, 14]).unwrap();
        let (s, post) = score_crib(&first, &printed, prior).unwrap();
        assert_eq!(s.value(), -33);
        assert!((1.0 / post.ratio() - 89.3).abs() < 0.1);
        assert_eq!(score_crib(&first, &computed, prior).unwrap().0.value(), -32);

        let zeros = CribAlignment::from_slides(vec![0; 7]).unwrap();
        assert_eq!(
            score_crib(&zeros, &computed, prior).unwrap().0.value(),
            -140
        );
        assert!(CribAlignment::from_slides(vec![26]).is_err());
    }
}
