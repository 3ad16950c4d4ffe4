//! Delimited-text ingestion with the sample filters: minimum employee
//! count, and removal of rows whose total assets, revenue, or expenses are
//! zero (periods of inactivity). Remaining zeros stay in place for the
//! imputation stage.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;

use coda_core::{FirmYearRecord, LegalForm};
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const HEADER: [&str; 13] = [
    "firm_id",
    "year",
    "nace",
    "legal_form",
    "employees",
    "importer",
    "exporter",
    "x1",
    "x2",
    "x3",
    "x4",
    "x5",
    "x6",
];

/// Why a row was excluded. Every excluded row carries exactly one primary
/// reason; the checks run in the order listed here.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExclusionReason {
    /// employees below the configured threshold
    MinEmployees,
    /// x1 + x2 == 0 (no assets)
    InactiveAssets,
    /// x5 == 0 (no revenue)
    InactiveRevenue,
    /// x6 == 0 (no expenses)
    InactiveExpenses,
}

impl ExclusionReason {
    pub fn code(&self) -> &'static str {
        match self {
            ExclusionReason::MinEmployees => "min-employees",
            ExclusionReason::InactiveAssets => "inactive-assets",
            ExclusionReason::InactiveRevenue => "inactive-revenue",
            ExclusionReason::InactiveExpenses => "inactive-expenses",
        }
    }
}

impl fmt::Display for ExclusionReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Exclusion {
    pub firm_id: String,
    pub year: i32,
    pub line: u64,
    pub reason: ExclusionReason,
}

/// Parsed dataset: kept records, the exclusion log, ingestion warnings, and
/// the SHA-256 digest of the raw input bytes.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub records: Vec<FirmYearRecord>,
    pub excluded: Vec<Exclusion>,
    pub warnings: Vec<String>,
    pub digest: String,
    pub ingested: usize,
}

fn data_err(line: u64, msg: impl fmt::Display) -> CliError {
    CliError::Data(format!("line {line}: {msg}"))
}

fn parse_bool(s: &str, field: &str, line: u64) -> Result<bool, CliError> {
    match s {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(data_err(
            line,
            format!("{field} must be true or false, got '{other}'"),
        )),
    }
}

fn parse_money(s: &str, field: &str, line: u64) -> Result<f64, CliError> {
    let v: f64 = s
        .parse()
        .map_err(|_| data_err(line, format!("{field} is not a number: '{s}'")))?;
    if !v.is_finite() {
        return Err(data_err(line, format!("{field} is not finite: '{s}'")));
    }
    if v < 0.0 {
        return Err(data_err(
            line,
            format!("{field} is negative ({v}); accounting parts must be >= 0"),
        ));
    }
    Ok(v)
}

fn normalize_legal_form(s: &str, line: u64, warnings: &mut Vec<String>) -> LegalForm {
    match s.to_ascii_lowercase().as_str() {
        "public_limited" => LegalForm::PublicLimited,
        "private_limited" => LegalForm::PrivateLimited,
        "other" => LegalForm::Other,
        other => {
            warnings.push(format!(
                "line {line}: unmapped legal form '{other}' treated as other"
            ));
            LegalForm::Other
        }
    }
}

/// Reads and filters the input file. Malformed rows and duplicate
/// (firm_id, year) pairs abort with a line-tagged data error; filter hits
/// are logged, not errors.
pub fn ingest(path: &Path, employee_threshold: u32) -> Result<Dataset, CliError> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
    ingest_bytes(&bytes, employee_threshold)
}

pub fn ingest_bytes(bytes: &[u8], employee_threshold: u32) -> Result<Dataset, CliError> {
    let digest = hex_digest(bytes);
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(bytes);

    let headers = reader
        .headers()
        .map_err(|e| CliError::Data(format!("cannot read header: {e}")))?
        .clone();
    let got: Vec<&str> = headers.iter().collect();
    if got != HEADER {
        return Err(CliError::Data(format!(
            "header mismatch: expected '{}', got '{}'",
            HEADER.join(","),
            got.join(",")
        )));
    }

    let mut records = Vec::new();
    let mut excluded = Vec::new();
    let mut warnings = Vec::new();
    let mut seen: HashSet<(String, i32)> = HashSet::new();
    let mut ingested = 0usize;

    for row in reader.records() {
        let row = row.map_err(|e| {
            let line = e
                .position()
                .map(|p| p.line())
                .unwrap_or(0);
            data_err(line, format!("malformed row: {e}"))
        })?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        if row.len() != HEADER.len() {
            return Err(data_err(
                line,
                format!("expected {} fields, got {}", HEADER.len(), row.len()),
            ));
        }
        ingested += 1;

        let firm_id = row[0].trim().to_string();
        if firm_id.is_empty() {
            return Err(data_err(line, "empty firm_id"));
        }
        let year: i32 = row[1]
            .trim()
            .parse()
            .map_err(|_| data_err(line, format!("year is not an integer: '{}'", &row[1])))?;
        let nace = row[2].trim().to_string();
        if nace.is_empty() {
            return Err(data_err(line, "empty nace code"));
        }
        let legal_form = normalize_legal_form(row[3].trim(), line, &mut warnings);
        let employees: u32 = row[4]
            .trim()
            .parse()
            .map_err(|_| data_err(line, format!("employees is not a count: '{}'", &row[4])))?;
        let importer = parse_bool(row[5].trim(), "importer", line)?;
        let exporter = parse_bool(row[6].trim(), "exporter", line)?;
        let mut parts = [0.0f64; 6];
        for (j, part) in parts.iter_mut().enumerate() {
            *part = parse_money(row[7 + j].trim(), HEADER[7 + j], line)?;
        }

        if !seen.insert((firm_id.clone(), year)) {
            return Err(data_err(
                line,
                format!("duplicate (firm_id, year) = ({firm_id}, {year})"),
            ));
        }

        let reason = if employees < employee_threshold {
            Some(ExclusionReason::MinEmployees)
        } else if parts[0] + parts[1] == 0.0 {
            Some(ExclusionReason::InactiveAssets)
        } else if parts[4] == 0.0 {
            Some(ExclusionReason::InactiveRevenue)
        } else if parts[5] == 0.0 {
            Some(ExclusionReason::InactiveExpenses)
        } else {
            None
        };
        if let Some(reason) = reason {
            excluded.push(Exclusion {
                firm_id,
                year,
                line,
                reason,
            });
            continue;
        }

        records.push(FirmYearRecord {
            firm_id,
            year,
            nace,
            legal_form,
            employees,
            importer,
            exporter,
            parts,
        });
    }

    Ok(Dataset {
        records,
        excluded,
        warnings,
        digest,
        ingested,
    })
}

fn hex_digest(bytes: &[u8]) -> String {
    let hash = Sha256::digest(bytes);
    let mut s = String::with_capacity(64);
    for b in hash {
        s.push_str(&format!("{b:02x}"));
    }
    s
}
