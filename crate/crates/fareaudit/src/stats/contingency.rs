//! Contingency tables and chi-square independence tests.

use serde::{Deserialize, Serialize};

use super::special::reg_gamma_q;
use super::{Alternative, StatsError, TestMethod, TestResult};

/// Cross-tabulation of group membership (rows) against ordered wage bands
/// (columns). Counts are row-major.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContingencyTable {
    row_labels: Vec<String>,
    col_labels: Vec<String>,
    counts: Vec<u64>,
}

impl ContingencyTable {
    /// Build a table from row-major counts. Requires at least 2 rows,
    /// 2 columns and a positive grand total.
    pub fn new(
        row_labels: Vec<String>,
        col_labels: Vec<String>,
        counts: Vec<u64>,
    ) -> Result<Self, StatsError> {
        let r = row_labels.len();
        let c = col_labels.len();
        if r < 2 || c < 2 {
            return Err(StatsError::DegenerateTable {
                detail: format!("need at least a 2x2 table, got {r}x{c}"),
            });
        }
        if counts.len() != r * c {
            return Err(StatsError::LengthMismatch {
                left: counts.len(),
                right: r * c,
            });
        }
        if counts.iter().sum::<u64>() == 0 {
            return Err(StatsError::DegenerateTable {
                detail: "grand total is zero".to_string(),
            });
        }
        Ok(Self {
            row_labels,
            col_labels,
            counts,
        })
    }

    /// Tally (group, column) observations into a table. Label order fixes
    /// row/column order; pairs outside the declared labels are ignored.
    pub fn from_observations<'a, I>(
        row_labels: &[String],
        col_labels: &[String],
        observations: I,
    ) -> Result<Self, StatsError>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let r = row_labels.len();
        let c = col_labels.len();
        let mut counts = vec![0u64; r * c];
        for (row, col) in observations {
            let ri = row_labels.iter().position(|l| l == row);
            let ci = col_labels.iter().position(|l| l == col);
            if let (Some(ri), Some(ci)) = (ri, ci) {
                counts[ri * c + ci] += 1;
            }
        }
        Self::new(row_labels.to_vec(), col_labels.to_vec(), counts)
    }

    pub fn rows(&self) -> usize {
        self.row_labels.len()
    }

    pub fn cols(&self) -> usize {
        self.col_labels.len()
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[String] {
        &self.col_labels
    }

    pub fn count(&self, row: usize, col: usize) -> u64 {
        self.counts[row * self.cols() + col]
    }

    pub fn row_total(&self, row: usize) -> u64 {
        (0..self.cols()).map(|c| self.count(row, c)).sum()
    }

    pub fn col_total(&self, col: usize) -> u64 {
        (0..self.rows()).map(|r| self.count(r, col)).sum()
    }

    pub fn grand_total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Two-row slice of this table for a pairwise test, with columns that are
    /// zero in both rows removed.
    fn pair_table(&self, a: usize, b: usize) -> Result<ContingencyTable, StatsError> {
        let mut col_labels = Vec::new();
        let mut counts = Vec::new();
        let mut kept = Vec::new();
        for c in 0..self.cols() {
            if self.count(a, c) + self.count(b, c) > 0 {
                kept.push(c);
                col_labels.push(self.col_labels[c].clone());
            }
        }
        if kept.len() < 2 {
            return Err(StatsError::DegenerateTable {
                detail: format!(
                    "pair ({}, {}) has fewer than 2 populated wage bands",
                    self.row_labels[a], self.row_labels[b]
                ),
            });
        }
        for &r in &[a, b] {
            for &c in &kept {
                counts.push(self.count(r, c));
            }
        }
        ContingencyTable::new(
            vec![self.row_labels[a].clone(), self.row_labels[b].clone()],
            col_labels,
            counts,
        )
    }
}

/// Pearson chi-square test of independence without continuity correction.
pub fn chi_square_test(table: &ContingencyTable) -> Result<TestResult, StatsError> {
    chi_square_test_with(table, false)
}

/// Chi-square test with an optional Yates continuity correction.
///
/// The correction only applies to 2x2 tables (df = 1); for larger tables the
/// flag is ignored and noted in the result.
pub fn chi_square_test_with(
    table: &ContingencyTable,
    yates: bool,
) -> Result<TestResult, StatsError> {
    let r = table.rows();
    let c = table.cols();
    let n = table.grand_total() as f64;
    for i in 0..r {
        if table.row_total(i) == 0 {
            return Err(StatsError::DegenerateTable {
                detail: format!("row {:?} has zero total", table.row_labels[i]),
            });
        }
    }
    for j in 0..c {
        if table.col_total(j) == 0 {
            return Err(StatsError::DegenerateTable {
                detail: format!("column {:?} has zero total", table.col_labels[j]),
            });
        }
    }
    let df = ((r - 1) * (c - 1)) as f64;
    let apply_yates = yates && df == 1.0;
    let mut statistic = 0.0;
    let mut low_expected = 0usize;
    for i in 0..r {
        for j in 0..c {
            let expected = table.row_total(i) as f64 * table.col_total(j) as f64 / n;
            if expected < 5.0 {
                low_expected += 1;
            }
            let observed = table.count(i, j) as f64;
            let diff = if apply_yates {
                ((observed - expected).abs() - 0.5).max(0.0)
            } else {
                observed - expected
            };
            statistic += diff * diff / expected;
        }
    }
    let p_value = reg_gamma_q(df / 2.0, statistic / 2.0)?;
    let mut result = TestResult {
        method: TestMethod::ChiSquare,
        statistic,
        df: Some(df),
        p_value,
        alternative: Alternative::TwoSided,
        n: vec![n as usize],
        notes: String::new(),
    };
    if low_expected > 0 {
        result.push_note(&format!(
            "{low_expected} cell(s) with expected count < 5; approximation may be poor"
        ));
    }
    if yates && !apply_yates {
        result.push_note("continuity correction requested but table is not 2x2; ignored");
    } else if apply_yates {
        result.push_note("Yates continuity correction applied");
    }
    Ok(result)
}

/// Family-wise error correction for pairwise tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Correction {
    None,
    Holm,
    Bonferroni,
}

impl std::str::FromStr for Correction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(Correction::None),
            "holm" => Ok(Correction::Holm),
            "bonferroni" => Ok(Correction::Bonferroni),
            other => Err(format!(
                "unknown correction {other:?} (expected none, holm or bonferroni)"
            )),
        }
    }
}

/// One pairwise comparison. Degenerate pairs carry the error instead of
/// aborting the family.
#[derive(Debug, Clone)]
pub struct PairwiseOutcome {
    pub group_a: String,
    pub group_b: String,
    pub outcome: Result<(TestResult, f64), StatsError>,
}

/// All unordered 2xc row-pair tests of `table`, with multiplicity-adjusted
/// p-values. The adjustment family is the set of pairs that produced a test;
/// pairs are returned sorted by raw p-value, failed pairs last.
pub fn pairwise_chi_square(
    table: &ContingencyTable,
    correction: Correction,
) -> Vec<PairwiseOutcome> {
    let r = table.rows();
    let mut raw: Vec<(usize, usize, Result<TestResult, StatsError>)> = Vec::new();
    for a in 0..r {
        for b in (a + 1)..r {
            let outcome = table.pair_table(a, b).and_then(|t| chi_square_test(&t));
            raw.push((a, b, outcome));
        }
    }

    // adjust over the pairs that actually produced a p-value
    let mut ok_idx: Vec<usize> = (0..raw.len()).filter(|&i| raw[i].2.is_ok()).collect();
    ok_idx.sort_by(|&i, &j| {
        let pi = raw[i].2.as_ref().unwrap().p_value;
        let pj = raw[j].2.as_ref().unwrap().p_value;
        pi.partial_cmp(&pj).unwrap()
    });
    let k = ok_idx.len();
    let mut adjusted = vec![0.0f64; raw.len()];
    let mut running_max = 0.0f64;
    for (rank, &i) in ok_idx.iter().enumerate() {
        let p = raw[i].2.as_ref().unwrap().p_value;
        let adj = match correction {
            Correction::None => p,
            Correction::Bonferroni => (k as f64 * p).min(1.0),
            Correction::Holm => {
                let step = ((k - rank) as f64 * p).min(1.0);
                running_max = running_max.max(step);
                running_max
            }
        };
        adjusted[i] = adj;
    }

    let mut out: Vec<PairwiseOutcome> = Vec::with_capacity(raw.len());
    for &i in &ok_idx {
        let (a, b, ref outcome) = raw[i];
        let result = outcome.as_ref().unwrap().clone();
        out.push(PairwiseOutcome {
            group_a: table.row_labels[a].clone(),
            group_b: table.row_labels[b].clone(),
            outcome: Ok((result, adjusted[i])),
        });
    }
    for (a, b, outcome) in raw {
        if let Err(e) = outcome {
            out.push(PairwiseOutcome {
                group_a: table.row_labels[a].clone(),
                group_b: table.row_labels[b].clone(),
                outcome: Err(e),
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(rows: &[&str], cols: &[&str], counts: &[u64]) -> ContingencyTable {
        ContingencyTable::new(
            rows.iter().map(|s| s.to_string()).collect(),
            cols.iter().map(|s| s.to_string()).collect(),
            counts.to_vec(),
        )
        .unwrap()
    }

    #[test]
    fn rejects_degenerate_shapes() {
        assert!(ContingencyTable::new(
            vec!["a".into()],
            vec!["x".into(), "y".into()],
            vec![1, 2]
        )
        .is_err());
        assert!(ContingencyTable::new(
            vec!["a".into(), "b".into()],
            vec!["x".into(), "y".into()],
            vec![0, 0, 0, 0]
        )
        .is_err());
    }

    #[test]
    fn proportional_rows_give_zero_statistic() {
        // rows exactly proportional → independence → χ² = 0, p = 1
        let t = table(&["a", "b"], &["x", "y", "z"], &[10, 20, 30, 20, 40, 60]);
        let r = chi_square_test(&t).unwrap();
        assert!(r.statistic.abs() < 1e-10, "χ² = {}", r.statistic);
        assert!((r.p_value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn hand_computed_two_by_two() {
        // [[10,20],[20,10]]: E = 15 everywhere, χ² = 4·25/15 = 20/3
        let t = table(&["a", "b"], &["x", "y"], &[10, 20, 20, 10]);
        let r = chi_square_test(&t).unwrap();
        assert!((r.statistic - 20.0 / 3.0).abs() < 1e-10);
        assert_eq!(r.df, Some(1.0));
        assert!((r.p_value - 0.0098).abs() < 1e-4, "p = {}", r.p_value);
    }

    #[test]
    fn statistic_scales_with_counts() {
        let t1 = table(&["a", "b"], &["x", "y"], &[10, 20, 20, 10]);
        let t10 = table(&["a", "b"], &["x", "y"], &[100, 200, 200, 100]);
        let r1 = chi_square_test(&t1).unwrap();
        let r10 = chi_square_test(&t10).unwrap();
        assert!((r10.statistic - 10.0 * r1.statistic).abs() < 1e-8);
        assert!(r10.p_value < r1.p_value);
    }

    #[test]
    fn permutation_invariance() {
        let t = table(&["a", "b", "c"], &["x", "y"], &[5, 9, 14, 2, 7, 11]);
        let permuted = table(&["c", "a", "b"], &["y", "x"], &[11, 7, 9, 5, 2, 14]);
        let r1 = chi_square_test(&t).unwrap();
        let r2 = chi_square_test(&permuted).unwrap();
        assert!((r1.statistic - r2.statistic).abs() < 1e-12);
        assert!((r1.p_value - r2.p_value).abs() < 1e-12);
    }

    #[test]
    fn zero_row_is_degenerate_and_named() {
        let t = table(&["a", "b"], &["x", "y"], &[0, 0, 3, 4]);
        match chi_square_test(&t) {
            Err(StatsError::DegenerateTable { detail }) => assert!(detail.contains("\"a\"")),
            other => panic!("expected degenerate-table error, got {other:?}"),
        }
    }

    #[test]
    fn low_expected_counts_noted_not_fatal() {
        let t = table(&["a", "b"], &["x", "y"], &[1, 9, 9, 1]);
        let r = chi_square_test(&t).unwrap();
        assert!(r.notes.contains("expected count < 5"));
    }

    #[test]
    fn yates_only_for_two_by_two() {
        let t = table(&["a", "b"], &["x", "y"], &[10, 20, 20, 10]);
        let plain = chi_square_test(&t).unwrap();
        let corrected = chi_square_test_with(&t, true).unwrap();
        assert!(corrected.statistic < plain.statistic);
        let t3 = table(&["a", "b", "c"], &["x", "y"], &[5, 9, 14, 2, 7, 11]);
        let r3 = chi_square_test_with(&t3, true).unwrap();
        assert!(r3.notes.contains("not 2x2"));
        assert!((r3.statistic - chi_square_test(&t3).unwrap().statistic).abs() < 1e-12);
    }

    #[test]
    fn pairwise_two_groups_single_pair() {
        let t = table(&["a", "b"], &["x", "y"], &[10, 20, 20, 10]);
        for corr in [Correction::None, Correction::Holm, Correction::Bonferroni] {
            let pairs = pairwise_chi_square(&t, corr);
            assert_eq!(pairs.len(), 1);
            let (res, adj) = pairs[0].outcome.as_ref().unwrap();
            assert!((adj - res.p_value).abs() < 1e-15, "k = 1 must not change p");
        }
    }

    #[test]
    fn pairwise_pair_count_and_sort() {
        let t = table(
            &["a", "b", "c", "d"],
            &["x", "y"],
            &[10, 20, 20, 10, 15, 15, 5, 25],
        );
        let pairs = pairwise_chi_square(&t, Correction::None);
        assert_eq!(pairs.len(), 6); // C(4,2)
        let ps: Vec<f64> = pairs
            .iter()
            .map(|p| p.outcome.as_ref().unwrap().0.p_value)
            .collect();
        assert!(ps.windows(2).all(|w| w[0] <= w[1]), "not sorted: {ps:?}");
    }

    #[test]
    fn bonferroni_is_direct_multiplication() {
        let t = table(
            &["a", "b", "c"],
            &["x", "y"],
            &[10, 20, 20, 10, 15, 15],
        );
        let raw = pairwise_chi_square(&t, Correction::None);
        let bon = pairwise_chi_square(&t, Correction::Bonferroni);
        let k = raw.len() as f64;
        for (r, b) in raw.iter().zip(bon.iter()) {
            let (rr, _) = r.outcome.as_ref().unwrap();
            let (_, adj) = b.outcome.as_ref().unwrap();
            assert!((adj - (k * rr.p_value).min(1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn holm_is_monotone_and_bounded_by_bonferroni() {
        let t = table(
            &["a", "b", "c", "d"],
            &["x", "y", "z"],
            &[10, 20, 5, 20, 10, 5, 15, 15, 5, 5, 25, 5],
        );
        let holm = pairwise_chi_square(&t, Correction::Holm);
        let bon = pairwise_chi_square(&t, Correction::Bonferroni);
        let mut prev = 0.0;
        for (h, b) in holm.iter().zip(bon.iter()) {
            let (_, ha) = h.outcome.as_ref().unwrap();
            let (_, ba) = b.outcome.as_ref().unwrap();
            assert!(*ha <= *ba + 1e-15, "holm must not exceed bonferroni");
            assert!(*ha >= prev - 1e-15, "holm adjusted p must be monotone");
            prev = *ha;
        }
    }

    #[test]
    fn pairwise_degenerate_pair_is_local_failure() {
        // group c only appears in band x; paired with a group that is also
        // only in band x the pair table has a single populated column
        let t = table(&["a", "b", "c"], &["x", "y"], &[5, 0, 3, 4, 7, 0]);
        let pairs = pairwise_chi_square(&t, Correction::Holm);
        assert_eq!(pairs.len(), 3);
        let failed: Vec<_> = pairs.iter().filter(|p| p.outcome.is_err()).collect();
        assert_eq!(failed.len(), 1);
        assert_eq!(failed[0].group_a, "a");
        assert_eq!(failed[0].group_b, "c");
        assert!(pairs.iter().filter(|p| p.outcome.is_ok()).count() == 2);
    }
}
