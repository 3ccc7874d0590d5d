//! Likert trust surveys: reverse coding, scores and Cronbach's alpha.
//!
//! Variances use the population convention (divide by n) throughout.

use std::collections::BTreeSet;

use serde::Serialize;

use super::MetricsError;

/// Respondent × item matrix of integer Likert scores.
#[derive(Debug, Clone, PartialEq)]
pub struct SurveyResponseSet {
    item_names: Vec<String>,
    rows: Vec<Vec<i64>>,
    reverse_coded: BTreeSet<usize>,
    scale_min: i64,
    scale_max: i64,
}

impl SurveyResponseSet {
    pub fn new(
        item_names: Vec<String>,
        rows: Vec<Vec<i64>>,
        reverse_coded: BTreeSet<usize>,
        scale_min: i64,
        scale_max: i64,
    ) -> Result<Self, MetricsError> {
        if scale_min >= scale_max {
            return Err(MetricsError::BadScale { min: scale_min, max: scale_max });
        }
        if item_names.is_empty() {
            return Err(MetricsError::TooSmall { what: "items", need: 1, got: 0 });
        }
        let k = item_names.len();
        if let Some(&bad) = reverse_coded.iter().find(|&&i| i >= k) {
            return Err(MetricsError::UnknownReverseItem(bad));
        }
        for (row, scores) in rows.iter().enumerate() {
            if scores.len() != k {
                return Err(MetricsError::RaggedRow { row, got: scores.len(), expected: k });
            }
            if let Some((column, &value)) = scores.iter().enumerate().find(|(_, &v)| v < scale_min || v > scale_max) {
                return Err(MetricsError::ScoreOutOfRange { row, column, value, min: scale_min, max: scale_max });
            }
        }
        Ok(Self { item_names, rows, reverse_coded, scale_min, scale_max })
    }

    pub fn item_names(&self) -> &[String] {
        &self.item_names
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    pub fn reverse_coded(&self) -> &BTreeSet<usize> {
        &self.reverse_coded
    }

    pub fn scale(&self) -> (i64, i64) {
        (self.scale_min, self.scale_max)
    }

    pub fn item_count(&self) -> usize {
        self.item_names.len()
    }

    pub fn respondent_count(&self) -> usize {
        self.rows.len()
    }

    /// Scores with reverse-coded items mapped `x ↦ min + max − x`.
    pub fn corrected_rows(&self) -> Vec<Vec<i64>> {
        self.rows
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .map(
                        |(i, &x)| {
                            if self.reverse_coded.contains(&i) {
                                self.scale_min + self.scale_max - x
                            } else {
                                x
                            }
                        },
                    )
                    .collect()
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrustReport {
    pub respondents: usize,
    pub items: usize,
    pub per_respondent_score: Vec<f64>,
    pub overall_mean: Option<f64>,
    /// Population standard deviation of the per-respondent scores.
    pub overall_sd: Option<f64>,
    /// `None` when alpha is undefined for this survey; see `alpha_error`.
    pub cronbach_alpha: Option<f64>,
    pub alpha_error: Option<String>,
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn pop_variance(v: &[f64]) -> f64 {
    let m = mean(v);
    v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / v.len() as f64
}

pub fn trust_score(survey: &SurveyResponseSet) -> TrustReport {
    let scores: Vec<f64> =
        survey.corrected_rows().iter().map(|row| row.iter().sum::<i64>() as f64 / row.len() as f64).collect();
    let (overall_mean, overall_sd) =
        if scores.is_empty() { (None, None) } else { (Some(mean(&scores)), Some(pop_variance(&scores).sqrt())) };
    let (cronbach_alpha, alpha_error) = match cronbach_alpha(survey) {
        Ok(a) => (Some(a), None),
        Err(e) => (None, Some(e.to_string())),
    };
    TrustReport {
        respondents: survey.respondent_count(),
        items: survey.item_count(),
        per_respondent_score: scores,
        overall_mean,
        overall_sd,
        cronbach_alpha,
        alpha_error,
    }
}

/// `k/(k−1) · (1 − Σ item variance / total-score variance)` on corrected scores.
pub fn cronbach_alpha(survey: &SurveyResponseSet) -> Result<f64, MetricsError> {
    let k = survey.item_count();
    let n = survey.respondent_count();
    if k < 2 {
        return Err(MetricsError::TooSmall { what: "items", need: 2, got: k });
    }
    if n < 2 {
        return Err(MetricsError::TooSmall { what: "respondents", need: 2, got: n });
    }
    let rows = survey.corrected_rows();
    let item_var_sum: f64 = (0..k).map(|i| pop_variance(&rows.iter().map(|r| r[i] as f64).collect::<Vec<_>>())).sum();
    let totals: Vec<f64> = rows.iter().map(|r| r.iter().sum::<i64>() as f64).collect();
    let total_var = pop_variance(&totals);
    if total_var == 0.0 {
        return Err(MetricsError::NoVariance);
    }
    let k = k as f64;
    Ok(k / (k - 1.0) * (1.0 - item_var_sum / total_var))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn survey(rows: &[&[i64]], reverse: &[usize]) -> SurveyResponseSet {
        let k = rows.first().map_or(3, |r| r.len());
        SurveyResponseSet::new(
            (0..k).map(|i| format!("q{}", i + 1)).collect(),
            rows.iter().map(|r| r.to_vec()).collect(),
            reverse.iter().copied().collect(),
            1,
            7,
        )
        .unwrap()
    }

    #[test]
    fn single_respondent_score() {
        let r = trust_score(&survey(&[&[5, 5, 5]], &[]));
        assert_eq!(r.per_respondent_score, vec![5.0]);
        assert_eq!(r.overall_mean, Some(5.0));
        assert_eq!(r.cronbach_alpha, None);
        assert!(r.alpha_error.is_some());
    }

    #[test]
    fn reverse_coding() {
        let r = trust_score(&survey(&[&[2, 6, 2]], &[1]));
        assert_eq!(r.per_respondent_score, vec![2.0]);
    }

    #[test]
    fn hand_grid() {
        let s = survey(&[&[4, 5, 4], &[6, 6, 7], &[3, 2, 3], &[5, 5, 6]], &[]);
        let r = trust_score(&s);
        assert!((r.overall_mean.unwrap() - 14.0 / 3.0).abs() < 1e-12);
        assert!((r.overall_sd.unwrap() - 1.354_006_400_772_66).abs() < 1e-12);
        assert!((r.cronbach_alpha.unwrap() - 21.0 / 22.0).abs() < 1e-12);
    }

    #[test]
    fn identical_columns_give_one() {
        let s = survey(&[&[1, 1, 1], &[4, 4, 4], &[6, 6, 6], &[2, 2, 2]], &[]);
        assert_eq!(cronbach_alpha(&s).unwrap(), 1.0);
    }

    #[test]
    fn zero_total_variance() {
        let s =
            SurveyResponseSet::new(vec!["a".into(), "b".into()], vec![vec![1, 2], vec![2, 1]], BTreeSet::new(), 1, 7)
                .unwrap();
        let err = cronbach_alpha(&s).unwrap_err();
        assert_eq!(err, MetricsError::NoVariance);
        assert_eq!(err.to_string(), "no variance in total scores");
    }

    #[test]
    fn validation() {
        let names = || vec!["a".to_string(), "b".to_string()];
        let none = BTreeSet::new;
        assert!(matches!(
            SurveyResponseSet::new(names(), vec![vec![1, 9]], none(), 1, 7),
            Err(MetricsError::ScoreOutOfRange { row: 0, column: 1, value: 9, .. })
        ));
        assert!(matches!(
            SurveyResponseSet::new(names(), vec![vec![1]], none(), 1, 7),
            Err(MetricsError::RaggedRow { .. })
        ));
        assert!(matches!(
            SurveyResponseSet::new(names(), vec![], [5].into_iter().collect(), 1, 7),
            Err(MetricsError::UnknownReverseItem(5))
        ));
        assert!(SurveyResponseSet::new(names(), vec![], none(), 7, 7).is_err());
    }
}
