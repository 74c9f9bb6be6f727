//! Rating-list ingestion and empirical summaries.
//!
//! The input format is a UTF-8 CSV with header
//! `player_id,name,federation,sex,rating,active` (any column order,
//! unknown extra columns ignored, LF or CRLF). Ratings are integers;
//! the model layer consumes them as reals.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fit::{RatingSample, TopKSample};

/// Sex code as carried by rating lists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sex {
    #[serde(rename = "M")]
    Male,
    #[serde(rename = "W")]
    Female,
    #[serde(rename = "U")]
    Unknown,
}

impl fmt::Display for Sex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sex::Male => "M",
            Sex::Female => "W",
            Sex::Unknown => "U",
        })
    }
}

impl FromStr for Sex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "M" => Ok(Sex::Male),
            "W" => Ok(Sex::Female),
            "U" => Ok(Sex::Unknown),
            other => Err(Error::Format(format!(
                "unknown sex code '{other}' (expected M, W or U)"
            ))),
        }
    }
}

/// One row of a rating list.
#[derive(Debug, Clone, PartialEq)]
pub struct RatingRecord {
    pub player_id: String,
    pub name: String,
    /// Uppercase alphabetic federation code, possibly empty.
    pub federation: String,
    pub sex: Sex,
    /// Published integer rating, strictly positive.
    pub rating: i64,
    pub active: bool,
}

/// A parsed rating list with its provenance label.
#[derive(Debug, Clone, PartialEq)]
pub struct RatingList {
    pub records: Vec<RatingRecord>,
    pub source: String,
}

/// A rejected input row with its 1-based file line.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowIssue {
    pub line: u64,
    pub message: String,
}

/// Parse outcome: the valid records plus per-row diagnostics for the rest.
#[derive(Debug, Clone)]
pub struct ParseReport {
    pub list: RatingList,
    pub rejected: Vec<RowIssue>,
}

const COLUMNS: [&str; 6] = ["player_id", "name", "federation", "sex", "rating", "active"];

/// Parse a rating-list CSV stream.
///
/// Rows with malformed fields are rejected individually (with the source
/// line in the diagnostic); a missing mandatory column or an empty input
/// fails the whole parse.
pub fn parse_rating_csv<R: Read>(input: R, source: &str) -> Result<ParseReport> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(input);

    let headers = reader
        .headers()
        .map_err(|e| Error::Format(format!("cannot read header: {e}")))?
        .clone();
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Err(Error::Format("empty file: no header row".to_string()));
    }

    let mut idx = [0usize; 6];
    for (slot, col) in idx.iter_mut().zip(COLUMNS) {
        *slot = headers
            .iter()
            .position(|h| h.trim() == col)
            .ok_or_else(|| Error::Format(format!("missing mandatory column '{col}'")))?;
    }
    let [id_i, name_i, fed_i, sex_i, rating_i, active_i] = idx;

    let mut records = Vec::new();
    let mut rejected = Vec::new();
    for row in reader.records() {
        let row = match row {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line());
                rejected.push(RowIssue {
                    line,
                    message: format!("unreadable row: {e}"),
                });
                continue;
            }
        };
        let line = row.position().map_or(0, |p| p.line());
        match parse_record(&row, id_i, name_i, fed_i, sex_i, rating_i, active_i) {
            Ok(rec) => records.push(rec),
            Err(message) => rejected.push(RowIssue { line, message }),
        }
    }

    Ok(ParseReport {
        list: RatingList {
            records,
            source: source.to_string(),
        },
        rejected,
    })
}

fn parse_record(
    row: &csv::StringRecord,
    id_i: usize,
    name_i: usize,
    fed_i: usize,
    sex_i: usize,
    rating_i: usize,
    active_i: usize,
) -> std::result::Result<RatingRecord, String> {
    let field = |i: usize, col: &str| -> std::result::Result<&str, String> {
        row.get(i).ok_or_else(|| format!("row too short: no '{col}' field"))
    };

    let rating_raw = field(rating_i, "rating")?.trim();
    let rating: i64 = rating_raw
        .parse()
        .map_err(|_| format!("unparseable rating '{rating_raw}'"))?;
    if rating <= 0 {
        return Err(format!("rating must be positive, got {rating}"));
    }

    let sex = field(sex_i, "sex")?
        .parse::<Sex>()
        .map_err(|e| e.to_string())?;

    let active_raw = field(active_i, "active")?.trim();
    let active = match active_raw.to_ascii_lowercase().as_str() {
        "true" | "1" => true,
        "false" | "0" => false,
        other => return Err(format!("unparseable active flag '{other}'")),
    };

    let federation = field(fed_i, "federation")?.trim().to_ascii_uppercase();
    if !federation.is_empty() && !federation.chars().all(|c| c.is_ascii_uppercase()) {
        return Err(format!("federation '{federation}' is not alphabetic"));
    }

    Ok(RatingRecord {
        player_id: field(id_i, "player_id")?.trim().to_string(),
        name: field(name_i, "name")?.to_string(),
        federation,
        sex,
        rating,
        active,
    })
}

/// Write a rating list in the exact input format (header included).
pub fn write_rating_csv<W: Write>(list: &RatingList, out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer
        .write_record(COLUMNS)
        .map_err(|e| Error::Format(format!("write failed: {e}")))?;
    for rec in &list.records {
        writer
            .write_record([
                rec.player_id.as_str(),
                rec.name.as_str(),
                rec.federation.as_str(),
                &rec.sex.to_string(),
                &rec.rating.to_string(),
                if rec.active { "true" } else { "false" },
            ])
            .map_err(|e| Error::Format(format!("write failed: {e}")))?;
    }
    writer
        .flush()
        .map_err(|e| Error::Format(format!("write failed: {e}")))?;
    Ok(())
}

/// Stratum selector for rating lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StratumFilter {
    All,
    Sex(Sex),
    Federation(String),
}

impl StratumFilter {
    /// Whether a record belongs to the stratum. Records with sex `U`
    /// pass only sex-agnostic filters.
    pub fn matches(&self, rec: &RatingRecord) -> bool {
        match self {
            StratumFilter::All => true,
            StratumFilter::Sex(want) => rec.sex == *want,
            StratumFilter::Federation(code) => rec.federation == *code,
        }
    }

    /// Stable textual label, also accepted back by [`FromStr`].
    pub fn label(&self) -> String {
        match self {
            StratumFilter::All => "all".to_string(),
            StratumFilter::Sex(s) => format!("sex={s}"),
            StratumFilter::Federation(code) => format!("fed={code}"),
        }
    }
}

impl fmt::Display for StratumFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for StratumFilter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("all") {
            return Ok(StratumFilter::All);
        }
        if let Some(code) = s.strip_prefix("sex=") {
            return match code.parse::<Sex>()? {
                Sex::Unknown => Err(Error::Format(
                    "sex=U is not a stratum; records with unknown sex \
                     pass only sex-agnostic filters"
                        .to_string(),
                )),
                sex => Ok(StratumFilter::Sex(sex)),
            };
        }
        if let Some(code) = s.strip_prefix("fed=").or_else(|| s.strip_prefix("federation=")) {
            let code = code.trim().to_ascii_uppercase();
            if code.is_empty() || !code.chars().all(|c| c.is_ascii_uppercase()) {
                return Err(Error::Format(format!("bad federation code '{code}'")));
            }
            return Ok(StratumFilter::Federation(code));
        }
        Err(Error::Format(format!(
            "unknown stratum expression '{s}' (expected all, sex=M, sex=W or fed=XXX)"
        )))
    }
}

/// Build the over-threshold sample: active records matching the filter
/// with rating at or above `r0`. An empty result is permitted; fitting
/// layers enforce their own size floors.
pub fn make_sample(list: &RatingList, r0: f64, filter: &StratumFilter) -> RatingSample {
    let ratings: Vec<f64> = list
        .records
        .iter()
        .filter(|rec| rec.active && filter.matches(rec) && rec.rating as f64 >= r0)
        .map(|rec| rec.rating as f64)
        .collect();
    RatingSample::new(filter.label(), r0, ratings).expect("filtered ratings are >= r0")
}

/// The k largest ratings (nonincreasing) plus the total count above the
/// threshold. Ties at position k are cut by the stable descending order.
pub fn to_topk(s: &RatingSample, k: usize) -> Result<TopKSample> {
    if k > s.len() {
        return Err(Error::Domain(format!(
            "requested top-{k} from a sample of {}",
            s.len()
        )));
    }
    let mut sorted = s.ratings().to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).expect("finite ratings"));
    sorted.truncate(k);
    TopKSample::new(s.r0(), sorted, s.len())
}

/// Right-continuous empirical distribution function at `x`.
pub fn ecdf(s: &RatingSample, x: f64) -> Result<f64> {
    if s.is_empty() {
        return Err(Error::Domain("ECDF of an empty sample".to_string()));
    }
    let count = s.ratings().iter().filter(|&&r| r <= x).count();
    Ok(count as f64 / s.len() as f64)
}
