//! Synthetic texts, keys and fits for self-contained testing.
//!
//! Everything takes a caller-supplied [`Rng`] so that seeded runs are
//! reproducible. [`SAMPLE_ENGLISH`] is a short original passage that covers
//! all 26 letters; [`MarkovTextModel`] trained on it can produce corpora of
//! any size with English-like letter and digraph statistics.

use std::collections::BTreeMap;

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::corpus::LetterDistribution;
use crate::letters::ALPHABET;
use crate::repeats::RepetitionFigure;
use crate::transposition::TranspositionKey;
use crate::vigenere::VigenereKey;
use crate::{Error, Result};

pub const SAMPLE_ENGLISH: &str = "\
The harbour was quiet when the convoy came in just before dawn. A thin fog lay over the water \
and the lamps along the quay were still burning. The pilot brought the first ship alongside \
without a sound, and the men on deck began to unload crates of grain, sacks of sugar and a \
quantity of machine parts packed in straw. Nobody spoke much. Everyone knew that the next \
week would decide whether the factories inland could keep working through the winter.\
\
Mary had been at her desk since midnight. Her job was to read every message that came over \
the wire from the coast and to pass the important ones to the office upstairs. Most of them \
were routine: the weather, the state of the roads, requests for fuel or for extra hands at \
the docks. Some were in cipher, and those she copied out with great care, letter by letter, \
because a single mistake could make a whole page useless. She liked the quiet hours. The \
building was cold but the tea was hot, and there was a kind of puzzle in every sheet.\
\
At six the relief clerk arrived, shaking the rain from his coat. He was a young man called \
Jack, lazy in manner but quick with figures, and he had a habit of whistling while he worked \
that annoyed everybody except Mary. She told him which messages were still waiting and which \
had gone up to the director. He asked whether anything unusual had happened during the night. \
She thought about it for a moment and then said that one of the cipher groups had looked \
strange, as if the sender had used the same key twice. That would be a gift to anyone \
listening, and it would also be a serious breach of the rules.\
\
The director was not pleased to hear it. He called the two of them into his office, closed the \
door and asked to see the sheets. For a long time he said nothing at all. Then he took a pencil \
and began to write the two messages one above the other, sliding the lower line along until \
certain letters stood in the same places. Where the letters agreed he made a small cross; where \
they differed he made a circle. After a while a pattern appeared. There were far more crosses \
than chance would allow, and several of them came in long runs. He put the pencil down and \
looked out of the window at the grey sky over the river.\
\
It was clear, he explained, that the two messages had been sent in depth. If the key had been \
changed as the instructions required, the crosses would have been scattered thinly, about one \
in every twenty six places. Instead they were crowded together, and a run of six crosses in a \
row was almost impossible unless the plain texts themselves were alike. He asked Jack to \
estimate the odds. Jack scribbled a few lines and replied that the evidence was worth at least \
a thousand to one. The director nodded. Good, he said, but we should not be too sure of \
ourselves. Start from the odds you believed before you saw the sheets, and multiply by the \
factor the sheets give you. Never forget the first step.\
\
Over the next few days the small team worked out most of both texts. The first was an order \
to move a battery of guns to a new position near the bridge. The second was a list of supplies \
needed by a field hospital: bandages, quinine, zinc ointment, fresh water and a dozen boxes of \
candles. Neither message was exciting in itself, but together they showed where the enemy \
expected the next attack, and that was worth knowing. The director wrote a short report and \
sent it by hand to the general staff. He did not mention Mary by name, but he made a point of \
thanking her the next morning, and he quietly arranged for the office to get a new stove.\
\
Years later Jack would say that he learned more in that week than in all his time at school. \
It was not the mathematics that impressed him, although there was plenty of that. It was the \
habit of weighing each small clue, of asking how much more likely it was if one story were \
true than if another were, and of adding those weights together until the answer could no \
longer be doubted. He kept the pencil sketch of crosses and circles in a drawer for the rest \
of his life, and he showed it to his grandchildren when they were old enough to ask questions. \
They thought it looked like a game of noughts and crosses played by someone who had forgotten \
the rules. In a way, he told them, that was exactly what it was.\
\
The winter was hard. Snow closed the northern roads in January and the river froze for the first \
time in a decade. Still the convoys came, escorted by small grey ships that zigzagged across the \
bay to confuse any submarine waiting below. Each arrival brought a fresh bundle of messages, and \
each bundle brought a fresh set of puzzles. Some yielded in an hour; others took a fortnight and \
a great deal of squabbling over the blackboard. By the spring the team had grown to twelve, and \
they had moved into a larger room with a view of the old market square and its quaint clock tower.";

/// Independent letters drawn from `dist`.
pub fn iid_text<R: Rng + ?Sized>(
    dist: &LetterDistribution,
    len: usize,
    rng: &mut R,
) -> Result<Vec<u8>> {
    let index =
        WeightedIndex::new(dist.probabilities()).map_err(|e| Error::Domain(e.to_string()))?;
    Ok((0..len).map(|_| index.sample(rng) as u8).collect())
}

pub fn uniform_text<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Vec<u8> {
    (0..len).map(|_| rng.gen_range(0..ALPHABET as u8)).collect()
}

/// Character-level Markov model of a fixed order, trained circularly so that
/// every context seen has at least one successor.
#[derive(Debug, Clone)]
pub struct MarkovTextModel {
    order: usize,
    seed_context: Vec<u8>,
    successors: BTreeMap<Vec<u8>, (Vec<u8>, WeightedIndex<u64>)>,
}

impl MarkovTextModel {
    pub fn train(text: &[u8], order: usize) -> Result<Self> {
        if text.len() <= order {
            return Err(Error::CorpusTooShort {
                needed: order + 1,
                got: text.len(),
            });
        }
        let n = text.len();
        let mut counts: BTreeMap<Vec<u8>, [u64; ALPHABET]> = BTreeMap::new();
        for i in 0..n {
            let ctx: Vec<u8> = (0..order).map(|j| text[(i + j) % n]).collect();
            counts.entry(ctx).or_insert([0; ALPHABET])[text[(i + order) % n] as usize] += 1;
        }
        let successors = counts
            .into_iter()
            .map(|(ctx, c)| {
                let letters: Vec<u8> = (0..ALPHABET as u8).filter(|&b| c[b as usize] > 0).collect();
                let weights: Vec<u64> = letters.iter().map(|&b| c[b as usize]).collect();
                let index = WeightedIndex::new(weights).expect("context has a successor");
                (ctx, (letters, index))
            })
            .collect();
        Ok(MarkovTextModel {
            order,
            seed_context: text[..order].to_vec(),
            successors,
        })
    }

    /// Order-2 model of [`SAMPLE_ENGLISH`].
    pub fn english() -> Self {
        let text = letters_only(SAMPLE_ENGLISH);
        Self::train(&text, 2).expect("sample is long enough")
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn generate<R: Rng + ?Sized>(&self, len: usize, rng: &mut R) -> Vec<u8> {
        let mut out = self.seed_context.clone();
        while out.len() < len + self.order {
            let ctx = &out[out.len() - self.order..];
            let (letters, index) = &self.successors[ctx];
            out.push(letters[index.sample(rng)]);
        }
        out.split_off(self.order)
    }
}

/// Normalises a piece of prose to letters, dropping everything else.
pub fn letters_only(text: &str) -> Vec<u8> {
    text.bytes()
        .filter(u8::is_ascii_alphabetic)
        .map(|b| b.to_ascii_uppercase() - b'A')
        .collect()
}

pub fn random_vigenere_key<R: Rng + ?Sized>(period: usize, rng: &mut R) -> Result<VigenereKey> {
    VigenereKey::new(uniform_text(period, rng))
}

pub fn random_transposition_key<R: Rng + ?Sized>(
    k: usize,
    rng: &mut R,
) -> Result<TranspositionKey> {
    let mut order: Vec<usize> = (0..k).collect();
    order.shuffle(rng);
    TranspositionKey::new(order)
}

/// Total slides of a subtractor whose `components` wheels each carry slides
/// `0..=max_slide`, stepping independently.
pub fn random_subtractor_slides<R: Rng + ?Sized>(
    components: usize,
    max_slide: u8,
    len: usize,
    rng: &mut R,
) -> Vec<u8> {
    (0..len)
        .map(|_| {
            let total: usize = (0..components)
                .map(|_| rng.gen_range(0..=max_slide) as usize)
                .sum();
            (total % ALPHABET) as u8
        })
        .collect()
}

/// Figure of a true fit: two stretches of plain language under one key
/// stream agree exactly where the plain texts agree.
pub fn true_fit_figure<R: Rng + ?Sized>(
    corpus: &[u8],
    overlap: usize,
    rng: &mut R,
) -> Result<RepetitionFigure> {
    if corpus.len() < 2 * overlap {
        return Err(Error::CorpusTooShort {
            needed: 2 * overlap,
            got: corpus.len(),
        });
    }
    let a = rng.gen_range(0..=corpus.len() - overlap);
    let mut b = rng.gen_range(0..=corpus.len() - overlap);
    while a.abs_diff(b) < overlap {
        b = rng.gen_range(0..=corpus.len() - overlap);
    }
    Ok(agreement(&corpus[a..a + overlap], &corpus[b..b + overlap]))
}

/// Figure of a wrong fit: unrelated cipher letters.
pub fn wrong_fit_figure<R: Rng + ?Sized>(overlap: usize, rng: &mut R) -> RepetitionFigure {
    agreement(&uniform_text(overlap, rng), &uniform_text(overlap, rng))
}

fn agreement(x: &[u8], y: &[u8]) -> RepetitionFigure {
    RepetitionFigure::from_symbols(x.iter().zip(y).map(|(a, b)| a == b).collect())
}

/// Mann–Whitney estimate of the probability that a random positive scores
/// above a random negative (ties count half).
pub fn auc(positives: &[f64], negatives: &[f64]) -> f64 {
    let mut wins = 0.0;
    for &p in positives {
        for &n in negatives {
            wins += if p > n {
                1.0
            } else if p == n {
                0.5
            } else {
                0.0
            };
        }
    }
    wins / (positives.len() * negatives.len()) as f64
}
