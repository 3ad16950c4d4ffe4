//! Firm-year records: identifiers, covariates, and the six accounting parts.

use alloc::string::String;

/// Legal form of a firm, normalized to three levels at ingestion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum LegalForm {
    PublicLimited,
    PrivateLimited,
    Other,
}

impl LegalForm {
    pub fn as_str(&self) -> &'static str {
        match self {
            LegalForm::PublicLimited => "public_limited",
            LegalForm::PrivateLimited => "private_limited",
            LegalForm::Other => "other",
        }
    }
}

impl core::fmt::Display for LegalForm {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One firm-year row. Parts x1..x6 are non-negative monetary amounts:
/// non-current assets, current assets, non-current liabilities, current
/// liabilities, revenue, expenses. Zeros may remain in x1..x4 until
/// imputation; post-filter rows guarantee x1+x2 > 0, x5 > 0 and x6 > 0.
#[derive(Debug, Clone, PartialEq)]
pub struct FirmYearRecord {
    pub firm_id: String,
    pub year: i32,
    pub nace: String,
    pub legal_form: LegalForm,
    pub employees: u32,
    pub importer: bool,
    pub exporter: bool,
    pub parts: [f64; 6],
}
