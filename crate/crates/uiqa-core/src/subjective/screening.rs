//! Verification-set subject screening: a repeat rating that moves by more
//! than 2 points marks a fluctuation image; subjects with too many
//! fluctuations are discarded.

use std::collections::BTreeMap;

use serde::Serialize;

use super::RatingTable;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize)]
pub struct ScreeningDecision {
    pub subject_id: String,
    pub fluctuations: u32,
    pub n_verification: u32,
    pub keep: bool,
}

/// Fluctuation counts per subject, counting verification images where the
/// primary and repeat scores differ by strictly more than 2. Subjects with
/// no verification repeats are reported with count 0.
pub(super) fn fluctuation_counts(table: &RatingTable) -> BTreeMap<String, u32> {
    let mut counts: BTreeMap<String, u32> = table
        .subjects()
        .into_iter()
        .map(|s| (s.to_string(), 0))
        .collect();
    for (subject, diffs) in verification_diffs(table) {
        let n = diffs.iter().filter(|&&d| d > 2).count() as u32;
        counts.insert(subject, n);
    }
    counts
}

/// Per subject: absolute primary-vs-repeat differences over the
/// verification images that subject re-rated.
fn verification_diffs(table: &RatingTable) -> BTreeMap<String, Vec<u8>> {
    // (subject, image) -> presentations sorted by id; first is primary.
    let mut showings: BTreeMap<(&str, &str), Vec<(&str, u8)>> = BTreeMap::new();
    for r in table.ratings() {
        showings
            .entry((r.subject_id.as_str(), r.image_id.as_str()))
            .or_default()
            .push((r.presentation_id.as_str(), r.score));
    }
    let mut out: BTreeMap<String, Vec<u8>> = BTreeMap::new();
    for ((subject, _), mut present) in showings {
        if present.len() < 2 {
            continue;
        }
        present.sort();
        let first = present[0].1 as i16;
        for &(_, repeat) in &present[1..] {
            out.entry(subject.to_string())
                .or_default()
                .push((first - repeat as i16).unsigned_abs() as u8);
        }
    }
    out
}

/// Keep/discard decision per subject. The default discard rule is
/// `fluctuations > ceil(verification_size / 2)`; pass `threshold` to
/// override the cutoff.
pub fn screen_subjects(
    table: &RatingTable,
    threshold: Option<u32>,
) -> Result<Vec<ScreeningDecision>> {
    let verification = table.verification_pairs();
    if verification.is_empty() {
        return Err(Error::invalid(
            "no verification repeats present in the rating table",
        ));
    }
    let diffs = verification_diffs(table);
    let mut decisions = Vec::new();
    for subject in table.subjects() {
        let subject_diffs = diffs.get(subject).ok_or_else(|| {
            Error::invalid(format!(
                "subject '{subject}' has no verification repeats"
            ))
        })?;
        let n_verification = subject_diffs.len() as u32;
        let fluctuations = subject_diffs.iter().filter(|&&d| d > 2).count() as u32;
        let cutoff = threshold.unwrap_or(n_verification.div_ceil(2));
        decisions.push(ScreeningDecision {
            subject_id: subject.to_string(),
            fluctuations,
            n_verification,
            keep: fluctuations <= cutoff,
        });
    }
    Ok(decisions)
}

#[cfg(test)]
mod tests {
    use super::super::tests::table_from;
    use super::*;

    fn verification_table(scores: &[(u8, u8)]) -> RatingTable {
        let mut rows = Vec::new();
        for (i, &(first, repeat)) in scores.iter().enumerate() {
            let image = format!("v{i}");
            rows.push(("s0", image.clone(), "p1", first));
            rows.push(("s0", image, "p2", repeat));
        }
        let refs: Vec<(&str, &str, &str, u8)> = rows
            .iter()
            .map(|(s, i, p, v)| (*s, i.as_str(), *p, *v))
            .collect();
        table_from(&refs)
    }

    #[test]
    fn counts_single_large_deviation() {
        let table = verification_table(&[(5, 5), (4, 3), (2, 2), (1, 4), (3, 3)]);
        let decisions = screen_subjects(&table, None).unwrap();
        assert_eq!(decisions.len(), 1);
        assert_eq!(decisions[0].fluctuations, 1); // only |1-4| = 3 counts
        assert_eq!(decisions[0].n_verification, 5);
        assert!(decisions[0].keep);
    }

    #[test]
    fn identical_repeats_are_kept() {
        let table = verification_table(&[(3, 3), (4, 4), (5, 5)]);
        let decisions = screen_subjects(&table, None).unwrap();
        assert_eq!(decisions[0].fluctuations, 0);
        assert!(decisions[0].keep);
    }

    #[test]
    fn difference_of_exactly_two_is_not_a_fluctuation() {
        let table = verification_table(&[(1, 3), (5, 3), (4, 2), (2, 4), (3, 5)]);
        let decisions = screen_subjects(&table, None).unwrap();
        assert_eq!(decisions[0].fluctuations, 0);
        assert!(decisions[0].keep);
    }

    #[test]
    fn heavy_fluctuations_discard_the_subject() {
        // 4 of 5 repeats move by 3+: cutoff is ceil(5/2) = 3.
        let table = verification_table(&[(1, 5), (5, 1), (1, 4), (4, 1), (3, 3)]);
        let decisions = screen_subjects(&table, None).unwrap();
        assert_eq!(decisions[0].fluctuations, 4);
        assert!(!decisions[0].keep);
        // A laxer explicit threshold keeps them.
        let lax = screen_subjects(&table, Some(4)).unwrap();
        assert!(lax[0].keep);
    }

    #[test]
    fn subject_without_repeats_errors() {
        let table = table_from(&[
            ("s0", "v0", "p1", 3),
            ("s0", "v0", "p2", 3),
            ("s1", "v0", "p1", 4), // s1 never re-rated anything
        ]);
        assert!(screen_subjects(&table, None).is_err());
    }

    #[test]
    fn no_verification_data_errors() {
        let table = table_from(&[("s0", "a", "p1", 3)]);
        assert!(screen_subjects(&table, None).is_err());
    }
}
