//! Cluster-covariate association: contingency tables, mosaic-plot geometry,
//! per-cluster ratio profiles, and boxplot five-number summaries.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::clustering::ClusterModel;
use crate::composition::{center, Composition, CompositionalCenter};
use crate::error::CodaError;
use crate::math;
use crate::ratios::{center_ratios, FinancialStatement, RatioSet};

/// Cluster x category counts with marginals. Row labels are cluster ids in
/// ascending order; column labels are category levels in lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct ContingencyTable {
    pub row_labels: Vec<usize>,
    pub col_labels: Vec<String>,
    counts: Vec<u64>,
    pub row_marginals: Vec<u64>,
    pub col_marginals: Vec<u64>,
    pub total: u64,
}

impl ContingencyTable {
    pub fn count(&self, row: usize, col: usize) -> u64 {
        self.counts[row * self.col_labels.len() + col]
    }

    /// Pearson chi-square statistic. Informational only; not part of the
    /// standard outputs.
    pub fn chi_square(&self) -> f64 {
        let mut stat = 0.0;
        for (r, &rm) in self.row_marginals.iter().enumerate() {
            for (c, &cm) in self.col_marginals.iter().enumerate() {
                let expected = rm as f64 * cm as f64 / self.total as f64;
                if expected > 0.0 {
                    let diff = self.count(r, c) as f64 - expected;
                    stat += diff * diff / expected;
                }
            }
        }
        stat
    }
}

/// Exact cross-tabulation of cluster assignments against category levels.
pub fn crosstab(assignments: &[usize], categories: &[String]) -> Result<ContingencyTable, CodaError> {
    if assignments.len() != categories.len() {
        return Err(CodaError::DimensionMismatch(format!(
            "{} assignments vs {} categories",
            assignments.len(),
            categories.len()
        )));
    }
    if assignments.is_empty() {
        return Err(CodaError::EmptyInput("nothing to cross-tabulate".into()));
    }
    let mut clusters: Vec<usize> = assignments.to_vec();
    clusters.sort_unstable();
    clusters.dedup();
    let mut levels: Vec<String> = categories.to_vec();
    levels.sort_unstable();
    levels.dedup();

    let cluster_index: BTreeMap<usize, usize> =
        clusters.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let level_index: BTreeMap<&String, usize> =
        levels.iter().enumerate().map(|(i, l)| (l, i)).collect();

    let mut counts = alloc::vec![0u64; clusters.len() * levels.len()];
    for (&a, cat) in assignments.iter().zip(categories) {
        counts[cluster_index[&a] * levels.len() + level_index[cat]] += 1;
    }
    let row_marginals: Vec<u64> = counts
        .chunks(levels.len())
        .map(|row| row.iter().sum())
        .collect();
    let col_marginals: Vec<u64> = (0..levels.len())
        .map(|c| (0..clusters.len()).map(|r| counts[r * levels.len() + c]).sum())
        .collect();
    let total = assignments.len() as u64;
    Ok(ContingencyTable {
        row_labels: clusters,
        col_labels: levels,
        counts,
        row_marginals,
        col_marginals,
        total,
    })
}

/// Mosaic-plot rectangles: column width = cluster share of the sample,
/// segment height = level share within the cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct MosaicGeometry {
    pub clusters: Vec<usize>,
    /// Column width fraction per included cluster; sums to 1.
    pub widths: Vec<f64>,
    pub levels: Vec<String>,
    /// heights[cluster][level]; each inner vector sums to 1.
    pub heights: Vec<Vec<f64>>,
    /// Cluster rows dropped because they had no observations.
    pub excluded: Vec<usize>,
}

pub fn mosaic_geometry(t: &ContingencyTable) -> Result<MosaicGeometry, CodaError> {
    if t.total == 0 {
        return Err(CodaError::EmptyInput(
            "contingency table has zero total".into(),
        ));
    }
    let mut clusters = Vec::new();
    let mut widths = Vec::new();
    let mut heights = Vec::new();
    let mut excluded = Vec::new();
    for (r, &rm) in t.row_marginals.iter().enumerate() {
        if rm == 0 {
            excluded.push(t.row_labels[r]);
            continue;
        }
        clusters.push(t.row_labels[r]);
        widths.push(rm as f64 / t.total as f64);
        heights.push(
            (0..t.col_labels.len())
                .map(|c| t.count(r, c) as f64 / rm as f64)
                .collect(),
        );
    }
    Ok(MosaicGeometry {
        clusters,
        widths,
        levels: t.col_labels.clone(),
        heights,
        excluded,
    })
}

/// Per-cluster compositional center, mean ratios, and share of observations.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterProfile {
    pub cluster: usize,
    pub center: CompositionalCenter,
    pub ratios: RatioSet,
    pub size: usize,
    pub share: f64,
}

/// Center-then-ratios for each cluster's member statements. Shares sum to 1.
pub fn cluster_profiles(
    model: &ClusterModel,
    rows: &[FinancialStatement],
) -> Result<Vec<ClusterProfile>, CodaError> {
    profiles_from_assignments(&model.assignments, model.k, rows)
}

/// Workhorse behind [`cluster_profiles`], usable with any labeling (clusters
/// 0..k, each non-empty).
pub fn profiles_from_assignments(
    assignments: &[usize],
    k: usize,
    rows: &[FinancialStatement],
) -> Result<Vec<ClusterProfile>, CodaError> {
    if assignments.len() != rows.len() {
        return Err(CodaError::DimensionMismatch(format!(
            "{} assignments vs {} statements",
            assignments.len(),
            rows.len()
        )));
    }
    let mut members: Vec<Vec<Composition>> = alloc::vec![Vec::new(); k];
    for (&a, s) in assignments.iter().zip(rows) {
        members[a].push(s.to_composition());
    }
    let n = rows.len() as f64;
    members
        .into_iter()
        .enumerate()
        .map(|(cluster, comps)| {
            let size = comps.len();
            let ctr = center(&comps)?;
            let ratios = center_ratios(&ctr)?;
            Ok(ClusterProfile {
                cluster,
                center: ctr,
                ratios,
                size,
                share: size as f64 / n,
            })
        })
        .collect()
}

/// Five-number summary with Tukey 1.5*IQR whiskers clipped to observed data.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxplotSummary {
    pub cluster: usize,
    pub count: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub whisker_low: f64,
    pub whisker_high: f64,
    pub outliers: Vec<f64>,
}

/// Per-cluster boxplot summaries with linear-interpolation quartiles.
pub fn numeric_summary(
    values: &[f64],
    assignments: &[usize],
) -> Result<Vec<BoxplotSummary>, CodaError> {
    if values.len() != assignments.len() {
        return Err(CodaError::DimensionMismatch(format!(
            "{} values vs {} assignments",
            values.len(),
            assignments.len()
        )));
    }
    if values.is_empty() {
        return Err(CodaError::EmptyInput("nothing to summarize".into()));
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(CodaError::InvalidParameter(format!("non-finite value {v}")));
    }
    let mut groups: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for (&v, &a) in values.iter().zip(assignments) {
        groups.entry(a).or_default().push(v);
    }
    Ok(groups
        .into_iter()
        .map(|(cluster, mut vs)| {
            vs.sort_unstable_by(f64::total_cmp);
            let q1 = math::percentile_sorted(&vs, 25.0);
            let median = math::percentile_sorted(&vs, 50.0);
            let q3 = math::percentile_sorted(&vs, 75.0);
            let iqr = q3 - q1;
            let lo_fence = q1 - 1.5 * iqr;
            let hi_fence = q3 + 1.5 * iqr;
            let whisker_low = vs.iter().cloned().find(|&v| v >= lo_fence).unwrap_or(vs[0]);
            let whisker_high = vs
                .iter()
                .rev()
                .cloned()
                .find(|&v| v <= hi_fence)
                .unwrap_or(vs[vs.len() - 1]);
            let outliers: Vec<f64> = vs
                .iter()
                .cloned()
                .filter(|&v| v < whisker_low || v > whisker_high)
                .collect();
            BoxplotSummary {
                cluster,
                count: vs.len(),
                min: vs[0],
                q1,
                median,
                q3,
                max: vs[vs.len() - 1],
                whisker_low,
                whisker_high,
                outliers,
            }
        })
        .collect())
}
