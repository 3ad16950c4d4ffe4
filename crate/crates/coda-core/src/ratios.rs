//! The twelve standard financial-statement ratios, computed for a single
//! statement or for a compositional center (industry/cluster mean).
//!
//! Ratios of geometric means equal geometric means of ratios, so applying the
//! same formulas to a compositional center yields the compositional notion of
//! an industry-average ratio.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::composition::{center, closure, Composition, CompositionalCenter};
use crate::error::CodaError;
use crate::records::FirmYearRecord;

/// A statement with all six parts strictly positive (post-imputation):
/// x1 non-current assets, x2 current assets, x3 non-current liabilities,
/// x4 current liabilities, x5 revenue, x6 expenses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FinancialStatement {
    parts: [f64; 6],
}

impl FinancialStatement {
    pub fn new(parts: [f64; 6]) -> Result<Self, CodaError> {
        for (j, &p) in parts.iter().enumerate() {
            if !p.is_finite() || p <= 0.0 {
                return Err(CodaError::InvalidComposition(format!(
                    "statement part x{} is {p}, must be finite and > 0",
                    j + 1
                )));
            }
        }
        Ok(Self { parts })
    }

    pub fn parts(&self) -> &[f64; 6] {
        &self.parts
    }

    /// Total assets x1 + x2.
    pub fn total_assets(&self) -> f64 {
        self.parts[0] + self.parts[1]
    }

    /// Equity (net worth) x1 + x2 - x3 - x4; its sign governs whether
    /// leverage and ROE are defined.
    pub fn equity(&self) -> f64 {
        self.parts[0] + self.parts[1] - self.parts[2] - self.parts[3]
    }

    pub fn to_composition(&self) -> Composition {
        Composition::new(self.parts.to_vec()).expect("statement parts are positive")
    }
}

/// The twelve ratios. `leverage` and `roe` are `None` when equity <= 0
/// (marked undefined rather than infinite or sign-flipped).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioSet {
    pub turnover: f64,
    pub current_asset_turnover: f64,
    pub profit_margin: f64,
    pub leverage: Option<f64>,
    pub roa: f64,
    pub roe: Option<f64>,
    pub debt: f64,
    pub short_term_debt: f64,
    pub long_term_solvency: f64,
    pub short_term_solvency: f64,
    pub asset_tangibility: f64,
    pub debt_maturity: f64,
}

impl RatioSet {
    /// Ratio names in report order.
    pub const NAMES: [&'static str; 12] = [
        "turnover",
        "current_asset_turnover",
        "profit_margin",
        "leverage",
        "roa",
        "roe",
        "debt",
        "short_term_debt",
        "long_term_solvency",
        "short_term_solvency",
        "asset_tangibility",
        "debt_maturity",
    ];

    /// Values in the same order as [`RatioSet::NAMES`]; undefined entries are `None`.
    pub fn values(&self) -> [Option<f64>; 12] {
        [
            Some(self.turnover),
            Some(self.current_asset_turnover),
            Some(self.profit_margin),
            self.leverage,
            Some(self.roa),
            self.roe,
            Some(self.debt),
            Some(self.short_term_debt),
            Some(self.long_term_solvency),
            Some(self.short_term_solvency),
            Some(self.asset_tangibility),
            Some(self.debt_maturity),
        ]
    }
}

fn ratios_from_parts(x: &[f64; 6]) -> RatioSet {
    let total_assets = x[0] + x[1];
    let total_debt = x[2] + x[3];
    let equity = total_assets - total_debt;
    let result = x[4] - x[5];
    let (leverage, roe) = if equity > 0.0 {
        (Some(total_assets / equity), Some(result / equity))
    } else {
        (None, None)
    };
    RatioSet {
        turnover: x[4] / total_assets,
        current_asset_turnover: x[4] / x[1],
        profit_margin: result / x[4],
        leverage,
        roa: result / total_assets,
        roe,
        debt: total_debt / total_assets,
        short_term_debt: x[3] / total_assets,
        long_term_solvency: total_assets / total_debt,
        short_term_solvency: x[1] / x[3],
        asset_tangibility: x[0] / x[1],
        debt_maturity: x[2] / x[3],
    }
}

/// All twelve ratios for one statement. Denominators x2, x4, x5, x1+x2 and
/// x3+x4 are positive by the type invariant; only equity can be non-positive,
/// which marks leverage and ROE undefined.
pub fn firm_ratios(s: &FinancialStatement) -> RatioSet {
    ratios_from_parts(s.parts())
}

/// The same formulas applied to the parts of a compositional center, giving
/// mean ratios at industry/cluster level.
pub fn center_ratios(c: &CompositionalCenter) -> Result<RatioSet, CodaError> {
    if c.dim() != 6 {
        return Err(CodaError::DimensionMismatch(format!(
            "center has {} parts, statement ratios need 6",
            c.dim()
        )));
    }
    let mut x = [0.0f64; 6];
    x.copy_from_slice(c.parts());
    Ok(ratios_from_parts(&x))
}

/// Grouping key for per-group center/ratio tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupBy {
    Year,
    Nace,
    Cluster,
    YearNace,
}

impl GroupBy {
    pub fn as_str(&self) -> &'static str {
        match self {
            GroupBy::Year => "year",
            GroupBy::Nace => "nace",
            GroupBy::Cluster => "cluster",
            GroupBy::YearNace => "year_nace",
        }
    }

    /// Parses a group key name; unknown keys are an error.
    pub fn parse(s: &str) -> Result<Self, CodaError> {
        match s {
            "year" => Ok(GroupBy::Year),
            "nace" => Ok(GroupBy::Nace),
            "cluster" => Ok(GroupBy::Cluster),
            "year_nace" | "year x nace" => Ok(GroupBy::YearNace),
            other => Err(CodaError::InvalidParameter(format!(
                "unknown group key '{other}' (expected year, nace, cluster or year_nace)"
            ))),
        }
    }
}

impl core::fmt::Display for GroupBy {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Label of one group, ordered lexicographically on (year, nace, cluster id).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum GroupLabel {
    Year(i32),
    Nace(String),
    Cluster(usize),
    YearNace(i32, String),
}

impl core::fmt::Display for GroupLabel {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            GroupLabel::Year(y) => write!(f, "{y}"),
            GroupLabel::Nace(n) => f.write_str(n),
            GroupLabel::Cluster(c) => write!(f, "{c}"),
            GroupLabel::YearNace(y, n) => write!(f, "{y}/{n}"),
        }
    }
}

/// Per-group compositional center, its ratios, and the group size.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupProfile {
    pub label: GroupLabel,
    pub center: CompositionalCenter,
    pub ratios: RatioSet,
    pub size: usize,
}

/// Groups records by `group_by`, then computes the compositional center and
/// its ratios per group. Records must already be imputed (all parts > 0).
/// Grouping by cluster requires `assignments` aligned with `records`. Groups
/// are emitted in sorted label order.
pub fn grouped_center_ratios(
    records: &[FirmYearRecord],
    group_by: GroupBy,
    assignments: Option<&[usize]>,
) -> Result<Vec<GroupProfile>, CodaError> {
    if records.is_empty() {
        return Err(CodaError::EmptyInput("no records to group".into()));
    }
    if group_by == GroupBy::Cluster {
        let a = assignments.ok_or_else(|| {
            CodaError::InvalidParameter("grouping by cluster needs assignments".into())
        })?;
        if a.len() != records.len() {
            return Err(CodaError::DimensionMismatch(format!(
                "{} assignments for {} records",
                a.len(),
                records.len()
            )));
        }
    }

    let mut groups: alloc::collections::BTreeMap<GroupLabel, Vec<Composition>> =
        alloc::collections::BTreeMap::new();
    for (i, r) in records.iter().enumerate() {
        let label = match group_by {
            GroupBy::Year => GroupLabel::Year(r.year),
            GroupBy::Nace => GroupLabel::Nace(r.nace.clone()),
            GroupBy::Cluster => GroupLabel::Cluster(assignments.unwrap()[i]),
            GroupBy::YearNace => GroupLabel::YearNace(r.year, r.nace.clone()),
        };
        let comp = Composition::new(r.parts.to_vec()).map_err(|e| {
            CodaError::InvalidComposition(format!(
                "record ({}, {}): {e} (impute zeros before grouping)",
                r.firm_id, r.year
            ))
        })?;
        groups.entry(label).or_default().push(comp);
    }

    groups
        .into_iter()
        .map(|(label, comps)| {
            let ctr = center(&comps)?;
            let ratios = center_ratios(&ctr)?;
            Ok(GroupProfile {
                label,
                center: ctr,
                ratios,
                size: comps.len(),
            })
        })
        .collect()
}

/// Center of a record collection ignoring grouping; convenience for
/// whole-sample tables.
pub fn records_center(records: &[FirmYearRecord]) -> Result<CompositionalCenter, CodaError> {
    let comps: Result<Vec<Composition>, CodaError> = records
        .iter()
        .map(|r| Composition::new(r.parts.to_vec()))
        .collect();
    center(&comps?)
}

/// Closure of a single statement, for symmetry with center-based reporting.
pub fn statement_closure(s: &FinancialStatement) -> Composition {
    closure(&s.to_composition())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::composition::CENTER_2021;
    use alloc::vec;

    const CENTER_2022: [f64; 6] = [0.0712, 0.1145, 0.0155, 0.0711, 0.3712, 0.3565];
    const CENTER_2023: [f64; 6] = [0.0696, 0.1175, 0.0129, 0.0696, 0.3773, 0.3531];

    fn stmt(parts: [f64; 6]) -> FinancialStatement {
        FinancialStatement::new(parts).unwrap()
    }

    fn assert_close(got: f64, want: f64, tol: f64, name: &str) {
        assert!(
            (got - want).abs() <= tol,
            "{name}: got {got}, want {want} (tol {tol})"
        );
    }

    #[test]
    fn table_2021_column_as_statement() {
        let r = firm_ratios(&stmt(CENTER_2021));
        assert_close(r.turnover, 1.849, 1e-3, "turnover");
        assert_close(r.profit_margin, 0.047, 1e-3, "margin");
        assert_close(r.leverage.unwrap(), 1.893, 1e-3, "leverage");
        assert_close(r.roa, 0.086, 1e-3, "roa");
        assert_close(r.roe.unwrap(), 0.164, 1e-3, "roe");
        assert_close(r.debt, 0.471, 1e-3, "debt");
        assert_close(r.short_term_debt, 0.370, 1e-3, "short_term_debt");
        assert_close(r.long_term_solvency, 2.120, 1e-3, "long_term_solvency");
        assert_close(r.short_term_solvency, 1.699, 1e-3, "short_term_solvency");
        assert_close(r.asset_tangibility, 0.590, 1e-3, "asset_tangibility");
        assert_close(r.debt_maturity, 0.274, 1e-3, "debt_maturity");
    }

    #[test]
    fn equity_zero_marks_leverage_and_roe_undefined() {
        let r = firm_ratios(&stmt([1.0; 6]));
        assert_eq!(r.profit_margin, 0.0);
        assert_eq!(r.roa, 0.0);
        assert_eq!(r.turnover, 0.5);
        assert_eq!(r.current_asset_turnover, 1.0);
        assert_eq!(r.debt, 1.0);
        assert!(r.leverage.is_none());
        assert!(r.roe.is_none());
    }

    #[test]
    fn negative_equity_marks_undefined_not_negative() {
        let r = firm_ratios(&stmt([1.0, 1.0, 3.0, 3.0, 4.0, 3.0]));
        assert!(r.leverage.is_none());
        assert!(r.roe.is_none());
        assert!(r.roa > 0.0);
    }

    #[test]
    fn hand_arithmetic_statement() {
        let r = firm_ratios(&stmt([2.0, 2.0, 1.0, 1.0, 4.0, 3.0]));
        assert_close(r.turnover, 1.0, 1e-12, "turnover");
        assert_close(r.profit_margin, 0.25, 1e-12, "margin");
        assert_close(r.leverage.unwrap(), 2.0, 1e-12, "leverage");
        assert_close(r.roa, 0.25, 1e-12, "roa");
        assert_close(r.roe.unwrap(), 0.5, 1e-12, "roe");
        assert_close(r.debt, 0.5, 1e-12, "debt");
        assert_close(r.current_asset_turnover, 2.0, 1e-12, "cat");
        assert_close(r.short_term_debt, 0.25, 1e-12, "std");
        assert_close(r.long_term_solvency, 2.0, 1e-12, "lts");
        assert_close(r.short_term_solvency, 2.0, 1e-12, "sts");
        assert_close(r.asset_tangibility, 1.0, 1e-12, "tang");
        assert_close(r.debt_maturity, 1.0, 1e-12, "dm");
    }

    #[test]
    fn scale_invariance_of_ratios() {
        let base = stmt([2.0, 3.0, 1.0, 1.5, 7.0, 6.0]);
        let r0 = firm_ratios(&base);
        // power-of-two scales commute exactly with every float operation
        for lambda in [0.5f64.powi(20), 8.0, 2.0f64.powi(20)] {
            let mut p = *base.parts();
            for v in p.iter_mut() {
                *v *= lambda;
            }
            let r = firm_ratios(&stmt(p));
            assert_eq!(r0.turnover, r.turnover);
            assert_eq!(r0.debt, r.debt);
            assert_eq!(r0.profit_margin, r.profit_margin);
            assert_eq!(r0.roe, r.roe);
        }
        // arbitrary scales agree to rounding error
        for lambda in [1e-6, 3.0, 1e6] {
            let mut p = *base.parts();
            for v in p.iter_mut() {
                *v *= lambda;
            }
            let r = firm_ratios(&stmt(p));
            for (a, b) in r0.values().iter().zip(r.values()) {
                let (a, b) = (a.unwrap(), b.unwrap());
                assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
            }
        }
    }

    #[test]
    fn center_ratios_reproduce_mean_ratio_table() {
        // Each column of the center table must reproduce the corresponding
        // annual mean ratio column within ±0.01 absolute.
        let columns: [(&[f64; 6], [f64; 12]); 3] = [
            (
                &CENTER_2021,
                [
                    1.849, 2.940, 0.047, 1.893, 0.086, 0.164, 0.471, 0.370, 2.120, 1.699, 0.590,
                    0.274,
                ],
            ),
            (
                &CENTER_2022,
                [
                    1.998, 3.241, 0.039, 1.873, 0.079, 0.148, 0.466, 0.382, 2.144, 1.610, 0.621,
                    0.218,
                ],
            ),
            (
                &CENTER_2023,
                [
                    2.016, 3.211, 0.064, 1.788, 0.129, 0.231, 0.440, 0.371, 2.268, 1.688, 0.592,
                    0.185,
                ],
            ),
        ];
        for (parts, expected) in columns {
            let c = CompositionalCenter::new(parts.to_vec()).unwrap();
            let r = center_ratios(&c).unwrap();
            for (value, (want, name)) in r
                .values()
                .iter()
                .zip(expected.iter().zip(RatioSet::NAMES.iter()))
            {
                assert_close(value.unwrap(), *want, 0.01, name);
            }
        }
    }

    #[test]
    fn center_current_asset_turnover_2021() {
        let c = CompositionalCenter::new(CENTER_2021.to_vec()).unwrap();
        let r = center_ratios(&c).unwrap();
        assert_close(r.current_asset_turnover, 2.940, 2e-3, "cat 2021");
        assert_close(r.profit_margin, 0.047, 1e-3, "margin 2021");
    }

    fn record(firm: &str, year: i32, nace: &str, parts: [f64; 6]) -> FirmYearRecord {
        FirmYearRecord {
            firm_id: firm.into(),
            year,
            nace: nace.into(),
            legal_form: crate::records::LegalForm::PrivateLimited,
            employees: 25,
            importer: false,
            exporter: false,
            parts,
        }
    }

    #[test]
    fn grouped_single_group_equals_whole_sample() {
        let rows = vec![
            record("a", 2021, "104", [2.0, 3.0, 1.0, 1.5, 7.0, 6.0]),
            record("b", 2021, "104", [1.0, 2.0, 0.5, 0.7, 5.0, 4.5]),
        ];
        let grouped = grouped_center_ratios(&rows, GroupBy::Year, None).unwrap();
        assert_eq!(grouped.len(), 1);
        let whole = records_center(&rows).unwrap();
        assert_eq!(grouped[0].center, whole);
        assert_eq!(grouped[0].size, 2);
    }

    #[test]
    fn grouped_symmetric_groups_have_identical_ratios() {
        let rows = vec![
            record("a", 2021, "104", [2.0, 3.0, 1.0, 1.5, 7.0, 6.0]),
            record("b", 2021, "104", [1.0, 2.0, 0.5, 0.7, 5.0, 4.5]),
            record("a", 2022, "104", [2.0, 3.0, 1.0, 1.5, 7.0, 6.0]),
            record("b", 2022, "104", [1.0, 2.0, 0.5, 0.7, 5.0, 4.5]),
        ];
        let grouped = grouped_center_ratios(&rows, GroupBy::Year, None).unwrap();
        assert_eq!(grouped.len(), 2);
        assert_eq!(grouped[0].ratios, grouped[1].ratios);
    }

    #[test]
    fn grouped_by_cluster_requires_assignments() {
        let rows = vec![record("a", 2021, "104", [2.0, 3.0, 1.0, 1.5, 7.0, 6.0])];
        assert!(grouped_center_ratios(&rows, GroupBy::Cluster, None).is_err());
        let ok = grouped_center_ratios(&rows, GroupBy::Cluster, Some(&[0])).unwrap();
        assert_eq!(ok[0].label, GroupLabel::Cluster(0));
    }

    #[test]
    fn unknown_group_key_errors() {
        assert!(GroupBy::parse("sector").is_err());
        assert_eq!(GroupBy::parse("year_nace").unwrap(), GroupBy::YearNace);
    }

    #[test]
    fn group_labels_sort_lexicographically() {
        let rows = vec![
            record("a", 2022, "107", [2.0, 3.0, 1.0, 1.5, 7.0, 6.0]),
            record("b", 2021, "104", [1.0, 2.0, 0.5, 0.7, 5.0, 4.5]),
            record("c", 2021, "0111", [1.0, 2.0, 0.5, 0.7, 5.0, 4.5]),
        ];
        let grouped = grouped_center_ratios(&rows, GroupBy::YearNace, None).unwrap();
        let labels: Vec<_> = grouped.iter().map(|g| g.label.clone()).collect();
        assert_eq!(
            labels,
            vec![
                GroupLabel::YearNace(2021, "0111".into()),
                GroupLabel::YearNace(2021, "104".into()),
                GroupLabel::YearNace(2022, "107".into()),
            ]
        );
    }
}
