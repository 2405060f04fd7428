//! ISO-8601 date fields that also accept the renderings found in source
//! material ("28-Dec-23", "June 7, 2023") and normalize them on ingest.

use chrono::NaiveDate;
use serde::{Deserialize, Deserializer, Serializer};

const ACCEPTED: &[&str] = &["%Y-%m-%d", "%d-%b-%y", "%d-%b-%Y", "%B %d, %Y", "%b %d, %Y", "%Y/%m/%d"];

pub fn parse_date(text: &str) -> Option<NaiveDate> {
    let text = text.trim();
    ACCEPTED.iter().find_map(|fmt| NaiveDate::parse_from_str(text, fmt).ok())
}

pub fn serialize<S: Serializer>(date: &NaiveDate, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&date.format("%Y-%m-%d").to_string())
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<NaiveDate, D::Error> {
    let raw = String::deserialize(d)?;
    parse_date(&raw).ok_or_else(|| serde::de::Error::custom(format!("unrecognized date {raw:?}")))
}
