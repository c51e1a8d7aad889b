//! C0 better/worse classification over significant pairs, and the
//! pairwise model significance matrix built from per-pair correctness.

use std::fs;
use std::path::Path;

use super::normal::normal_cdf;
use super::pairs::SignificantPairSet;
use crate::error::{Error, Result};
use crate::metrics::ScoreTable;

/// How a model's score difference is judged against the subjectively
/// better side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum C0Mode {
    /// Correct iff the difference points at the subjectively better image
    /// (ties count as incorrect).
    Sign,
    /// Correct iff the difference, oriented toward the subjectively better
    /// image and taken on min-max normalized scores, exceeds theta.
    Threshold(f64),
}

impl Default for C0Mode {
    fn default() -> Self {
        C0Mode::Sign
    }
}

pub const C0_DEFAULT_THETA: f64 = 0.95;

/// Per-pair correctness of one model, in pair-set order.
pub fn c0_outcomes(
    scores: &ScoreTable,
    pairs: &SignificantPairSet,
    mode: C0Mode,
) -> Result<Vec<bool>> {
    if pairs.is_empty() {
        return Err(Error::invalid("empty significant-pair set"));
    }
    let score_of = |id: &str| -> Result<f64> {
        scores
            .get(id)
            .ok_or_else(|| Error::invalid(format!("model '{}' has no score for '{id}'", scores.model_name)))
    };
    let orient = if scores.higher_is_better { 1.0 } else { -1.0 };
    match mode {
        C0Mode::Sign => pairs
            .pairs
            .iter()
            .map(|p| {
                let delta = orient * (score_of(&p.better)? - score_of(&p.worse)?);
                Ok(delta > 0.0)
            })
            .collect(),
        C0Mode::Threshold(theta) => {
            // Min-max normalization over the images the pair set touches;
            // infinite sentinels pin to the corresponding end.
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for p in &pairs.pairs {
                for id in [&p.better, &p.worse] {
                    let v = score_of(id)?;
                    if v.is_finite() {
                        lo = lo.min(v);
                        hi = hi.max(v);
                    }
                }
            }
            let normalize = move |v: f64| -> f64 {
                if v == f64::INFINITY {
                    1.0
                } else if v == f64::NEG_INFINITY {
                    0.0
                } else if hi > lo {
                    (v - lo) / (hi - lo)
                } else {
                    0.5
                }
            };
            pairs
                .pairs
                .iter()
                .map(|p| {
                    let delta =
                        orient * (normalize(score_of(&p.better)?) - normalize(score_of(&p.worse)?));
                    Ok(delta > theta)
                })
                .collect()
        }
    }
}

/// Fraction of significant pairs whose better image the model identifies.
pub fn c0(scores: &ScoreTable, pairs: &SignificantPairSet, mode: C0Mode) -> Result<f64> {
    let outcomes = c0_outcomes(scores, pairs, mode)?;
    Ok(outcomes.iter().filter(|&&ok| ok).count() as f64 / outcomes.len() as f64)
}

/// Row-vs-column verdicts of the model significance matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Significance {
    Lower,
    Similar,
    Higher,
}

impl Significance {
    pub fn as_i8(self) -> i8 {
        match self {
            Significance::Lower => -1,
            Significance::Similar => 0,
            Significance::Higher => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignificanceMatrix {
    pub models: Vec<String>,
    /// `cells[row][col]` classifies the row model against the column model.
    pub cells: Vec<Vec<Significance>>,
    pub alpha: f64,
}

impl SignificanceMatrix {
    /// CSV of {-1, 0, 1}: `model,<m1>,<m2>,...` header then one row per model.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut out = format!("model,{}\n", self.models.join(","));
        for (model, row) in self.models.iter().zip(&self.cells) {
            let cells: Vec<String> = row.iter().map(|s| s.as_i8().to_string()).collect();
            out.push_str(&format!("{model},{}\n", cells.join(",")));
        }
        fs::write(path, out).map_err(|e| Error::io(path, e))
    }
}

/// Classifies every ordered model pair by a paired two-proportion z-test on
/// the per-pair correctness outcomes (the discordant-pair statistic
/// `z = (b - c) / sqrt(b + c)`), two-sided at level `alpha`.
///
/// All outcome vectors must come from the identical pair set.
pub fn significance_matrix(
    outcomes: &[(String, Vec<bool>)],
    alpha: f64,
) -> Result<SignificanceMatrix> {
    if outcomes.is_empty() {
        return Err(Error::invalid("no models to compare"));
    }
    let n = outcomes[0].1.len();
    if outcomes.iter().any(|(_, v)| v.len() != n) {
        return Err(Error::invalid(
            "correctness vectors span different pair sets",
        ));
    }
    if n == 0 {
        return Err(Error::invalid("empty correctness vectors"));
    }
    let mut cells = Vec::with_capacity(outcomes.len());
    for (_, row_outcomes) in outcomes {
        let mut row = Vec::with_capacity(outcomes.len());
        for (_, col_outcomes) in outcomes {
            let mut row_only = 0u64; // row correct where column is not
            let mut col_only = 0u64;
            for (&r, &c) in row_outcomes.iter().zip(col_outcomes) {
                match (r, c) {
                    (true, false) => row_only += 1,
                    (false, true) => col_only += 1,
                    _ => {}
                }
            }
            let verdict = if row_only + col_only == 0 {
                Significance::Similar
            } else {
                let z = (row_only as f64 - col_only as f64)
                    / ((row_only + col_only) as f64).sqrt();
                let p = 2.0 * (1.0 - normal_cdf(z.abs()));
                if p >= alpha {
                    Significance::Similar
                } else if z > 0.0 {
                    Significance::Higher
                } else {
                    Significance::Lower
                }
            };
            row.push(verdict);
        }
        cells.push(row);
    }
    Ok(SignificanceMatrix {
        models: outcomes.iter().map(|(m, _)| m.clone()).collect(),
        cells,
        alpha,
    })
}

#[cfg(test)]
mod tests {
    use super::super::pairs::{significant_pairs, tests::mos_entry};
    use super::*;
    use crate::subjective::MosTable;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeMap;

    fn spread_mos(n: usize) -> (MosTable, Vec<String>) {
        let mut entries = BTreeMap::new();
        let mut ids = Vec::new();
        for i in 0..n {
            let id = format!("img_{i:03}");
            let mos = (i as f64 * 97.0) % 100.0 + i as f64 * 1e-4;
            entries.insert(id.clone(), mos_entry(mos, 0.25, 20));
            ids.push(id);
        }
        (MosTable::from_entries(entries), ids)
    }

    #[test]
    fn perfect_model_scores_one_antimodel_zero() {
        let (mos, ids) = spread_mos(12);
        let pairs = significant_pairs(&mos, &ids).unwrap();
        assert!(!pairs.is_empty());
        let mut perfect = ScoreTable::new("perfect");
        let mut anti = ScoreTable::new("anti");
        for id in &ids {
            let m = mos.get(id).unwrap().mos;
            perfect.scores.insert(id.clone(), m);
            anti.scores.insert(id.clone(), -m);
        }
        assert_eq!(c0(&perfect, &pairs, C0Mode::Sign).unwrap(), 1.0);
        assert_eq!(c0(&anti, &pairs, C0Mode::Sign).unwrap(), 0.0);
        // lower-is-better orientation flips the anti-model back to perfect
        anti.higher_is_better = false;
        assert_eq!(c0(&anti, &pairs, C0Mode::Sign).unwrap(), 1.0);
    }

    #[test]
    fn random_model_sits_near_half() {
        // Pair outcomes share images, so the spread of C0 is governed by
        // the image count; 200 images keep a random model well inside .05.
        let (mos, ids) = spread_mos(200);
        let pairs = significant_pairs(&mos, &ids).unwrap();
        assert!(pairs.len() >= 1000);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut random = ScoreTable::new("random");
        for id in &ids {
            random.scores.insert(id.clone(), rng.random::<f64>());
        }
        let v = c0(&random, &pairs, C0Mode::Sign).unwrap();
        assert!((v - 0.5).abs() < 0.05, "c0 {v}");
    }

    #[test]
    fn sign_mode_ties_count_as_incorrect() {
        let (mos, ids) = spread_mos(4);
        let pairs = significant_pairs(&mos, &ids).unwrap();
        let mut flat = ScoreTable::new("flat");
        for id in &ids {
            flat.scores.insert(id.clone(), 7.0);
        }
        assert_eq!(c0(&flat, &pairs, C0Mode::Sign).unwrap(), 0.0);
    }

    #[test]
    fn threshold_mode_requires_a_large_normalized_gap() {
        let (mos, ids) = spread_mos(6);
        let pairs = significant_pairs(&mos, &ids).unwrap();
        let mut perfect = ScoreTable::new("perfect");
        for id in &ids {
            perfect.scores.insert(id.clone(), mos.get(id).unwrap().mos);
        }
        let sign = c0(&perfect, &pairs, C0Mode::Sign).unwrap();
        let thresh = c0(&perfect, &pairs, C0Mode::Threshold(C0_DEFAULT_THETA)).unwrap();
        assert_eq!(sign, 1.0);
        assert!(thresh <= sign);
    }

    #[test]
    fn sign_mode_matches_an_exhaustive_pair_walker() {
        // Independent route: walk all unordered image pairs directly,
        // re-deriving significance and correctness from first principles.
        use crate::eval::normal_cdf;
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..20 {
            let n = rng.random_range(5..=30);
            let mut entries = BTreeMap::new();
            let mut scores = ScoreTable::new("m");
            let mut ids = Vec::new();
            for i in 0..n {
                let id = format!("i{i:02}");
                entries.insert(
                    id.clone(),
                    mos_entry(
                        rng.random_range(0.0..100.0),
                        rng.random_range(0.0..3.0),
                        rng.random_range(5..25),
                    ),
                );
                scores.scores.insert(id.clone(), rng.random_range(-3.0..3.0));
                ids.push(id);
            }
            let mos = MosTable::from_entries(entries);

            let mut total = 0u32;
            let mut correct = 0u32;
            for i in 0..ids.len() {
                for j in i + 1..ids.len() {
                    let a = mos.get(&ids[i]).unwrap();
                    let b = mos.get(&ids[j]).unwrap();
                    let se2 = a.variance / a.n_raters as f64 + b.variance / b.n_raters as f64;
                    let significant = if se2 == 0.0 {
                        a.mos != b.mos
                    } else {
                        normal_cdf((a.mos - b.mos).abs() / se2.sqrt()) > 0.95
                    };
                    if !significant {
                        continue;
                    }
                    total += 1;
                    let (better, worse) = if a.mos > b.mos {
                        (&ids[i], &ids[j])
                    } else {
                        (&ids[j], &ids[i])
                    };
                    if scores.get(better).unwrap() > scores.get(worse).unwrap() {
                        correct += 1;
                    }
                }
            }
            let pairs = crate::eval::significant_pairs(&mos, &ids).unwrap();
            assert_eq!(pairs.len() as u32, total);
            if total > 0 {
                let expected = correct as f64 / total as f64;
                assert_eq!(c0(&scores, &pairs, C0Mode::Sign).unwrap(), expected);
            }
        }
    }

    #[test]
    fn missing_score_errors() {
        let (mos, ids) = spread_mos(4);
        let pairs = significant_pairs(&mos, &ids).unwrap();
        let sparse = ScoreTable::new("sparse");
        assert!(c0(&sparse, &pairs, C0Mode::Sign).is_err());
    }

    #[test]
    fn empty_pair_set_errors() {
        let pairs = SignificantPairSet::default();
        let table = ScoreTable::new("m");
        assert!(c0(&table, &pairs, C0Mode::Sign).is_err());
    }

    #[test]
    fn matrix_diagonal_is_similar_and_antisymmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let n = 500;
        let models: Vec<(String, Vec<bool>)> = (0..4)
            .map(|m| {
                let quality = 0.3 + 0.2 * m as f64;
                (
                    format!("m{m}"),
                    (0..n).map(|_| rng.random::<f64>() < quality).collect(),
                )
            })
            .collect();
        let matrix = significance_matrix(&models, 0.05).unwrap();
        for i in 0..4 {
            assert_eq!(matrix.cells[i][i], Significance::Similar);
            for j in 0..4 {
                let expected = match matrix.cells[j][i] {
                    Significance::Lower => Significance::Higher,
                    Significance::Similar => Significance::Similar,
                    Significance::Higher => Significance::Lower,
                };
                assert_eq!(matrix.cells[i][j], expected);
            }
        }
    }

    #[test]
    fn perfect_beats_random_on_a_thousand_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let perfect: Vec<bool> = vec![true; 1000];
        let random: Vec<bool> = (0..1000).map(|_| rng.random::<bool>()).collect();
        let matrix = significance_matrix(
            &[("perfect".into(), perfect), ("random".into(), random)],
            0.05,
        )
        .unwrap();
        assert_eq!(matrix.cells[0][1], Significance::Higher);
        assert_eq!(matrix.cells[1][0], Significance::Lower);
    }

    #[test]
    fn mismatched_pair_sets_error() {
        let a = ("a".to_string(), vec![true, false]);
        let b = ("b".to_string(), vec![true]);
        assert!(significance_matrix(&[a, b], 0.05).is_err());
    }
}
