//! Options-chain ingestion from venue-style CSV or JSON snapshot exports.
//!
//! Both formats carry the same fields. CSV is headered with the fixed
//! column order `underlying,snapshot_time,spot,kind,strike,expiry,bid,
//! ask,mark,premium_ccy` (absent premiums are empty strings); JSON is a
//! single object with a `quotes` array. Premiums declared in the base
//! asset are converted to quote currency at ingestion by multiplying by
//! the snapshot spot, so downstream consumers only ever see quote-currency
//! premiums.

use std::collections::HashSet;
use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use chrono::{DateTime, NaiveDate, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptionKind {
    Call,
    Put,
}

impl fmt::Display for OptionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OptionKind::Call => write!(f, "call"),
            OptionKind::Put => write!(f, "put"),
        }
    }
}

impl FromStr for OptionKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "call" => Ok(OptionKind::Call),
            "put" => Ok(OptionKind::Put),
            other => Err(format!("unknown option kind `{other}` (expected call|put)")),
        }
    }
}

/// Currency a premium is quoted in. Deribit-style venues quote option
/// prices in the base asset; `Quote` premiums are already in cash terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PremiumCcy {
    Quote,
    Base,
}

impl fmt::Display for PremiumCcy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PremiumCcy::Quote => write!(f, "quote"),
            PremiumCcy::Base => write!(f, "base"),
        }
    }
}

impl FromStr for PremiumCcy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "quote" => Ok(PremiumCcy::Quote),
            "base" => Ok(PremiumCcy::Base),
            other => Err(format!(
                "unknown premium currency `{other}` (expected quote|base)"
            )),
        }
    }
}

/// One listed European option quote.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptionQuote {
    pub kind: OptionKind,
    pub strike: f64,
    pub expiry: NaiveDate,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bid: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ask: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mark: Option<f64>,
    pub premium_ccy: PremiumCcy,
}

impl OptionQuote {
    /// Executable premium: the bid/ask mid when both sides are present,
    /// otherwise the mark.
    pub fn mid_price(&self) -> Result<f64> {
        match (self.bid, self.ask) {
            (Some(b), Some(a)) => Ok(0.5 * (b + a)),
            _ => self.mark.ok_or_else(|| {
                Error::Data(format!(
                    "no usable price for {} strike {} (need bid+ask or mark)",
                    self.kind, self.strike
                ))
            }),
        }
    }
}

/// Snapshot of an option chain for one underlying.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptionChain {
    pub underlying: String,
    pub snapshot_time: DateTime<Utc>,
    pub spot: f64,
    pub quotes: Vec<OptionQuote>,
}

impl OptionChain {
    /// Distinct expiries present in the chain, ascending.
    pub fn expiries(&self) -> Vec<NaiveDate> {
        let mut ex: Vec<NaiveDate> = self.quotes.iter().map(|q| q.expiry).collect();
        ex.sort();
        ex.dedup();
        ex
    }

    /// Mid premium of the unique quote with this kind and strike (any
    /// expiry); errors if the strike is unquoted or quoted at several
    /// expiries.
    pub fn premium(&self, kind: OptionKind, strike: f64) -> Result<f64> {
        let tol = 1e-9 * strike.abs();
        let mut found: Option<&OptionQuote> = None;
        for q in &self.quotes {
            if q.kind == kind && (q.strike - strike).abs() <= tol {
                if found.is_some() {
                    return Err(Error::Data(format!(
                        "ambiguous {kind} quote at strike {strike}: multiple expiries match"
                    )));
                }
                found = Some(q);
            }
        }
        found
            .ok_or(Error::MissingQuote { kind, strike })?
            .mid_price()
    }
}

/// Quotes matching an expiry, kind, and inclusive strike band, sorted by
/// strike ascending.
pub fn filter(
    chain: &OptionChain,
    expiry: NaiveDate,
    kind: OptionKind,
    strikes: RangeInclusive<f64>,
) -> Vec<&OptionQuote> {
    let mut out: Vec<&OptionQuote> = chain
        .quotes
        .iter()
        .filter(|q| q.expiry == expiry && q.kind == kind && strikes.contains(&q.strike))
        .collect();
    out.sort_by(|a, b| a.strike.total_cmp(&b.strike));
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainFormat {
    Csv,
    Json,
}

const CSV_COLUMNS: [&str; 10] = [
    "underlying",
    "snapshot_time",
    "spot",
    "kind",
    "strike",
    "expiry",
    "bid",
    "ask",
    "mark",
    "premium_ccy",
];

/// Parses a chain snapshot, validates it, and converts base-currency
/// premiums to quote currency.
pub fn parse_chain(input: &str, format: ChainFormat) -> Result<OptionChain> {
    let mut chain = match format {
        ChainFormat::Csv => parse_csv(input)?,
        ChainFormat::Json => parse_json(input)?,
    };
    validate_and_convert(&mut chain)?;
    Ok(chain)
}

/// Serializes a chain in the given format. The CSV form uses the fixed
/// column order and shortest round-trip number formatting, so
/// `parse(serialize(chain))` reproduces the chain field for field.
pub fn serialize_chain(chain: &OptionChain, format: ChainFormat) -> Result<String> {
    match format {
        ChainFormat::Csv => serialize_csv(chain),
        ChainFormat::Json => serde_json::to_string_pretty(chain)
            .map_err(|e| Error::Data(format!("json serialization failed: {e}"))),
    }
}

fn parse_json(input: &str) -> Result<OptionChain> {
    serde_json::from_str(input).map_err(|e| Error::Parse {
        line: e.line(),
        msg: e.to_string(),
    })
}

fn parse_csv(input: &str) -> Result<OptionChain> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(input.as_bytes());

    let headers = reader
        .headers()
        .map_err(|e| Error::Parse {
            line: 1,
            msg: e.to_string(),
        })?
        .clone();

    let mut index = [usize::MAX; CSV_COLUMNS.len()];
    for (pos, name) in headers.iter().enumerate() {
        match CSV_COLUMNS.iter().position(|c| *c == name) {
            Some(i) => index[i] = pos,
            None => log::warn!("ignoring unknown chain column `{name}`"),
        }
    }
    for (i, col) in CSV_COLUMNS.iter().enumerate() {
        if index[i] == usize::MAX {
            return Err(Error::Data(format!("missing required column `{col}`")));
        }
    }

    let mut chain: Option<OptionChain> = None;
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            msg: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let field = |i: usize| -> Result<&str> {
            record.get(index[i]).ok_or_else(|| Error::Parse {
                line,
                msg: format!("row is missing the `{}` field", CSV_COLUMNS[i]),
            })
        };
        let bad = |col: &str, msg: String| Error::Parse {
            line,
            msg: format!("column `{col}`: {msg}"),
        };

        let underlying = field(0)?.to_string();
        let snapshot_time = parse_timestamp(field(1)?).map_err(|m| bad("snapshot_time", m))?;
        let spot: f64 = field(2)?.parse().map_err(|e| bad("spot", format!("{e}")))?;
        let quote = OptionQuote {
            kind: field(3)?.parse().map_err(|m| bad("kind", m))?,
            strike: field(4)?
                .parse()
                .map_err(|e| bad("strike", format!("{e}")))?,
            expiry: parse_expiry(field(5)?).map_err(|m| bad("expiry", m))?,
            bid: parse_premium(field(6)?).map_err(|m| bad("bid", m))?,
            ask: parse_premium(field(7)?).map_err(|m| bad("ask", m))?,
            mark: parse_premium(field(8)?).map_err(|m| bad("mark", m))?,
            premium_ccy: field(9)?.parse().map_err(|m| bad("premium_ccy", m))?,
        };

        match &mut chain {
            None => {
                chain = Some(OptionChain {
                    underlying,
                    snapshot_time,
                    spot,
                    quotes: vec![quote],
                })
            }
            Some(c) => {
                if c.underlying != underlying || c.snapshot_time != snapshot_time || c.spot != spot
                {
                    return Err(Error::Data(format!(
                        "inconsistent chain metadata at line {line}: every row must repeat the \
                         same underlying, snapshot_time, and spot"
                    )));
                }
                c.quotes.push(quote);
            }
        }
    }

    chain.ok_or_else(|| Error::Data("chain contains no quotes".into()))
}

fn parse_timestamp(s: &str) -> std::result::Result<DateTime<Utc>, String> {
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Ok(dt.with_timezone(&Utc));
    }
    NaiveDate::parse_from_str(s, "%Y-%m-%d")
        .map(|d| d.and_hms_opt(0, 0, 0).unwrap().and_utc())
        .map_err(|_| format!("`{s}` is not an ISO-8601 timestamp or date"))
}

fn parse_expiry(s: &str) -> std::result::Result<NaiveDate, String> {
    if let Ok(d) = NaiveDate::parse_from_str(s, "%Y-%m-%d") {
        return Ok(d);
    }
    // Intraday expiry timestamps are truncated to their UTC date.
    DateTime::parse_from_rfc3339(s)
        .map(|dt| dt.with_timezone(&Utc).date_naive())
        .map_err(|_| format!("`{s}` is not an ISO-8601 date"))
}

fn parse_premium(s: &str) -> std::result::Result<Option<f64>, String> {
    if s.is_empty() {
        return Ok(None);
    }
    s.parse().map(Some).map_err(|e| format!("{e}"))
}

fn serialize_csv(chain: &OptionChain) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(CSV_COLUMNS)
        .map_err(|e| Error::Data(format!("csv serialization failed: {e}")))?;
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for q in &chain.quotes {
        writer
            .write_record([
                chain.underlying.clone(),
                chain
                    .snapshot_time
                    .to_rfc3339_opts(SecondsFormat::Secs, true),
                chain.spot.to_string(),
                q.kind.to_string(),
                q.strike.to_string(),
                q.expiry.format("%Y-%m-%d").to_string(),
                opt(q.bid),
                opt(q.ask),
                opt(q.mark),
                q.premium_ccy.to_string(),
            ])
            .map_err(|e| Error::Data(format!("csv serialization failed: {e}")))?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| Error::Data(format!("csv serialization failed: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Data(format!("csv serialization failed: {e}")))
}

fn validate_and_convert(chain: &mut OptionChain) -> Result<()> {
    if !(chain.spot > 0.0 && chain.spot.is_finite()) {
        return Err(Error::Data(format!(
            "spot must be positive, got {}",
            chain.spot
        )));
    }
    let mut seen: HashSet<(OptionKind, u64, NaiveDate)> = HashSet::new();
    for q in &mut chain.quotes {
        if !(q.strike > 0.0 && q.strike.is_finite()) {
            return Err(Error::Data(format!(
                "strike must be positive, got {}",
                q.strike
            )));
        }
        for (name, v) in [("bid", q.bid), ("ask", q.ask), ("mark", q.mark)] {
            if let Some(v) = v {
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(Error::Data(format!(
                        "{name} must be non-negative for {} strike {}, got {v}",
                        q.kind, q.strike
                    )));
                }
            }
        }
        if let (Some(b), Some(a)) = (q.bid, q.ask) {
            if b > a {
                return Err(Error::Data(format!(
                    "crossed market for {} strike {}: bid {b} > ask {a}",
                    q.kind, q.strike
                )));
            }
        }
        if !seen.insert((q.kind, q.strike.to_bits(), q.expiry)) {
            return Err(Error::Data(format!(
                "duplicate quote: {} strike {} expiry {}",
                q.kind, q.strike, q.expiry
            )));
        }
        if q.premium_ccy == PremiumCcy::Base {
            q.bid = q.bid.map(|v| v * chain.spot);
            q.ask = q.ask.map(|v| v * chain.spot);
            q.mark = q.mark.map(|v| v * chain.spot);
            q.premium_ccy = PremiumCcy::Quote;
        }
    }
    Ok(())
}
