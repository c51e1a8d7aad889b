//! Inter-rater agreement: normalized cross correlation and normalized
//! Euclidean distance between every two subjects' rating vectors, bundled
//! with the outlier coefficient and per-subject fluctuation counts into one
//! reliability report.

use std::collections::BTreeMap;

use serde::Serialize;

use super::screening::fluctuation_counts;
use super::{compute_mos, outlier_coefficient, RatingTable};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize)]
pub struct PairAgreement {
    pub subject_a: String,
    pub subject_b: String,
    /// `<u,v> / (|u| |v|)` over commonly rated images.
    pub ncc: f64,
    /// `|u - v| / (4 sqrt(n))`: Euclidean distance normalized by the
    /// maximum per-element range (4) and the vector length, so it lies in
    /// `[0, 1]`.
    pub eud: f64,
    pub n_common: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct AgreementReport {
    pub oc: f64,
    pub mean_ncc: f64,
    pub mean_eud: f64,
    pub pairs: Vec<PairAgreement>,
    /// Verification fluctuation count per subject (0 when the subject has
    /// no verification repeats).
    pub fluctuations: BTreeMap<String, u32>,
}

pub fn rater_agreement(table: &RatingTable) -> Result<AgreementReport> {
    let subjects: Vec<&str> = table.subjects().into_iter().collect();
    if subjects.len() < 2 {
        return Err(Error::invalid("agreement requires at least 2 subjects"));
    }
    let primary = table.primary_ratings();
    let mut per_subject: BTreeMap<&str, BTreeMap<&str, u8>> = BTreeMap::new();
    for ((subject, image), score) in primary {
        per_subject.entry(subject).or_default().insert(image, score);
    }

    let mut pairs = Vec::new();
    for (i, &a) in subjects.iter().enumerate() {
        for &b in &subjects[i + 1..] {
            let va = &per_subject[a];
            let vb = &per_subject[b];
            let mut u = Vec::new();
            let mut v = Vec::new();
            for (image, &score) in va {
                if let Some(&other) = vb.get(image) {
                    u.push(score as f64);
                    v.push(other as f64);
                }
            }
            if u.len() < 2 {
                return Err(Error::invalid(format!(
                    "subjects '{a}' and '{b}' share fewer than 2 rated images"
                )));
            }
            let dot: f64 = u.iter().zip(&v).map(|(x, y)| x * y).sum();
            let nu: f64 = u.iter().map(|x| x * x).sum::<f64>().sqrt();
            let nv: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            let dist: f64 = u
                .iter()
                .zip(&v)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt();
            pairs.push(PairAgreement {
                subject_a: a.to_string(),
                subject_b: b.to_string(),
                ncc: dot / (nu * nv),
                eud: dist / (4.0 * (u.len() as f64).sqrt()),
                n_common: u.len(),
            });
        }
    }
    let mean_ncc = pairs.iter().map(|p| p.ncc).sum::<f64>() / pairs.len() as f64;
    let mean_eud = pairs.iter().map(|p| p.eud).sum::<f64>() / pairs.len() as f64;
    let oc = outlier_coefficient(&compute_mos(table)?)?;
    Ok(AgreementReport {
        oc,
        mean_ncc,
        mean_eud,
        pairs,
        fluctuations: fluctuation_counts(table),
    })
}
