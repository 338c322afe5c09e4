//! City catalog ingestion.
//!
//! A catalog is loaded once from a CSV file through a [`ColumnMapping`] that
//! maps the engine's canonical fields onto arbitrary source columns. Rows that
//! violate a record invariant are skipped with a diagnostic; the load fails
//! outright when more than 10% of the rows are rejected or when two valid rows
//! share an id. The loaded [`Catalog`] is immutable and sorted by id.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

/// Value substituted for a missing optional sustainability attribute.
pub const NEUTRAL_ATTRIBUTE: f64 = 0.5;

/// Maximum fraction of rejected rows a load tolerates.
pub const REJECTION_BUDGET: f64 = 0.10;

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("cannot read {path}: {source}")]
    FileUnreadable {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed CSV: {0}")]
    Csv(String),
    #[error("schema mismatch: missing column(s) {}", .missing.join(", "))]
    SchemaMismatch { missing: Vec<String> },
    #[error("invalid column mapping: {0}")]
    MappingInvalid(String),
    #[error("row {}: {}", .0.row, .0.reason)]
    RowInvalid(RowDiagnostic),
    #[error("rejection_budget_exceeded: {rejected} of {total} rows rejected")]
    RejectionBudgetExceeded {
        rejected: usize,
        total: usize,
        diagnostics: Vec<RowDiagnostic>,
    },
    #[error("duplicate city id {id:?} (rows {first_row} and {second_row})")]
    DuplicateId {
        id: String,
        first_row: usize,
        second_row: usize,
    },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LookupError {
    #[error("unknown city id {0:?}")]
    NotFound(String),
    #[error("month {0} is outside 1..=12")]
    MonthOutOfRange(u32),
}

/// A row-level problem; `row` is the 1-based data row (header excluded).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RowDiagnostic {
    pub row: usize,
    pub reason: String,
}

impl fmt::Display for RowDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "row {}: {}", self.row, self.reason)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoPoint {
    lat: f64,
    lon: f64,
}

impl GeoPoint {
    pub fn new(lat: f64, lon: f64) -> Result<Self, String> {
        if !(lat.is_finite() && (-90.0..=90.0).contains(&lat)) {
            return Err(format!("latitude {lat} outside [-90, 90]"));
        }
        if !(lon.is_finite() && (-180.0..=180.0).contains(&lon)) {
            return Err(format!("longitude {lon} outside [-180, 180]"));
        }
        Ok(Self { lat, lon })
    }

    pub fn lat(&self) -> f64 {
        self.lat
    }

    pub fn lon(&self) -> f64 {
        self.lon
    }
}

/// A lowercase interest tag such as `cultural` or `nightlife`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct InterestCategory(String);

impl InterestCategory {
    pub fn new(tag: &str) -> Result<Self, String> {
        let tag = tag.trim();
        if tag.is_empty() {
            return Err("interest category must not be empty".into());
        }
        if !tag.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_' || c == '-') {
            return Err(format!("interest category {tag:?} must be a lowercase slug"));
        }
        Ok(Self(tag.to_string()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for InterestCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CityRecord {
    pub id: String,
    pub name: String,
    pub country: String,
    pub location: GeoPoint,
    pub popularity_count: u64,
    /// Crowdedness per month, January first.
    pub seasonality: [f64; 12],
    pub interest_scores: BTreeMap<InterestCategory, f64>,
    /// Higher is worse.
    pub air_quality: f64,
    /// Higher is more vulnerable.
    pub climate_vulnerability: f64,
    /// Higher is more walkable.
    pub walkability: f64,
}

/// True for a non-empty lowercase slug (`a-z`, `0-9`, `-`, `_`).
pub fn is_slug(id: &str) -> bool {
    !id.is_empty()
        && id
            .chars()
            .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '-' || c == '_')
}

fn check_unit(name: &str, value: f64) -> Result<(), String> {
    if value.is_finite() && (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(format!("{name} = {value} outside [0, 1]"))
    }
}

impl CityRecord {
    /// Check every record invariant, returning the first violation.
    pub fn validate(&self) -> Result<(), String> {
        if !is_slug(&self.id) {
            return Err(format!("id {:?} is not a lowercase slug", self.id));
        }
        GeoPoint::new(self.location.lat, self.location.lon)?;
        for (i, v) in self.seasonality.iter().enumerate() {
            check_unit(&format!("seasonality[{}]", i + 1), *v)?;
        }
        for (cat, v) in &self.interest_scores {
            check_unit(&format!("interest {cat}"), *v)?;
        }
        check_unit("air_quality", self.air_quality)?;
        check_unit("climate_vulnerability", self.climate_vulnerability)?;
        check_unit("walkability", self.walkability)?;
        Ok(())
    }
}

/// Crowdedness of `city` in `month` (1 = January).
pub fn seasonality_of(city: &CityRecord, month: u32) -> Result<f64, LookupError> {
    if !(1..=12).contains(&month) {
        return Err(LookupError::MonthOutOfRange(month));
    }
    Ok(city.seasonality[(month - 1) as usize])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Transform {
    #[default]
    #[serde(rename = "identity")]
    Identity,
    /// Min-max over the column's parseable values in the file.
    #[serde(rename = "minmax-to-unit")]
    MinMaxToUnit,
    /// `1 - x` for a value already in `[0, 1]`.
    #[serde(rename = "invert")]
    Invert,
    /// Twelve monthly values, from twelve columns or one delimited cell.
    #[serde(rename = "month-split")]
    MonthSplit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSource {
    #[serde(default)]
    pub column: Option<String>,
    /// Twelve column names, only for `month-split`.
    #[serde(default)]
    pub columns: Option<Vec<String>>,
    #[serde(default)]
    pub transform: Transform,
    /// Used when the mapped cell is empty. Only numeric or text defaults matching the field.
    #[serde(default)]
    pub default: Option<toml::Value>,
}

impl FieldSource {
    pub fn column(name: &str) -> Self {
        Self { column: Some(name.to_string()), columns: None, transform: Transform::Identity, default: None }
    }

    pub fn with_transform(mut self, transform: Transform) -> Self {
        self.transform = transform;
        self
    }

    fn source_columns(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        if let Some(c) = &self.column {
            out.push(c);
        }
        if let Some(cs) = &self.columns {
            out.extend(cs.iter().map(String::as_str));
        }
        out
    }
}

/// Canonical record fields that a mapping may bind.
pub const CANONICAL_FIELDS: [&str; 10] = [
    "id",
    "name",
    "country",
    "lat",
    "lon",
    "popularity_count",
    "seasonality",
    "air_quality",
    "climate_vulnerability",
    "walkability",
];

const REQUIRED_FIELDS: [&str; 6] = ["id", "name", "lat", "lon", "popularity_count", "seasonality"];

/// Maps canonical fields and interest categories onto CSV columns.
///
/// `country`, `air_quality`, `climate_vulnerability` and `walkability` have
/// built-in defaults (empty string, 0.5, 0.5, 0.5) and may be left unmapped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColumnMapping {
    pub fields: BTreeMap<String, FieldSource>,
    /// Declared interest categories and the column holding each score.
    #[serde(default)]
    pub interests: BTreeMap<String, FieldSource>,
}

impl ColumnMapping {
    pub fn load(path: &Path) -> Result<Self, CatalogError> {
        let text = std::fs::read_to_string(path).map_err(|source| CatalogError::FileUnreadable {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    pub fn from_toml_str(text: &str) -> Result<Self, CatalogError> {
        let mapping: Self =
            toml::from_str(text).map_err(|e| CatalogError::MappingInvalid(e.to_string()))?;
        mapping.validate()?;
        Ok(mapping)
    }

    pub fn validate(&self) -> Result<(), CatalogError> {
        let invalid = |msg: String| Err(CatalogError::MappingInvalid(msg));
        for key in self.fields.keys() {
            if !CANONICAL_FIELDS.contains(&key.as_str()) {
                return invalid(format!("unknown canonical field {key:?}"));
            }
        }
        for field in REQUIRED_FIELDS {
            match self.fields.get(field) {
                None => return invalid(format!("required field {field:?} is not mapped")),
                Some(src) if src.source_columns().is_empty() && src.default.is_none() => {
                    return invalid(format!("field {field:?} names no column and no default"))
                }
                Some(_) => {}
            }
        }
        for (field, src) in &self.fields {
            let numeric = !matches!(field.as_str(), "id" | "name" | "country");
            match (field.as_str(), src.transform) {
                ("seasonality", Transform::MonthSplit) => {
                    let ok = match (&src.column, &src.columns) {
                        (Some(_), None) => true,
                        (None, Some(cs)) => cs.len() == 12,
                        _ => false,
                    };
                    if !ok {
                        return invalid(
                            "seasonality needs either one `column` or exactly twelve `columns`".into(),
                        );
                    }
                }
                ("seasonality", other) => {
                    return invalid(format!("seasonality requires transform month-split, got {other:?}"))
                }
                (_, Transform::MonthSplit) => {
                    return invalid(format!("month-split is only valid for seasonality, not {field:?}"))
                }
                (_, t) if !numeric && t != Transform::Identity => {
                    return invalid(format!("text field {field:?} only supports identity"))
                }
                ("popularity_count" | "lat" | "lon", t) if t != Transform::Identity => {
                    return invalid(format!("{field:?} only supports identity"))
                }
                _ => {}
            }
            if field != "seasonality" && src.columns.is_some() {
                return invalid(format!("`columns` is only valid for seasonality, not {field:?}"));
            }
            if field != "seasonality" && src.column.is_none() && src.default.is_none() {
                return invalid(format!("field {field:?} names no column and no default"));
            }
            if let Some(default) = &src.default {
                let ok = if numeric { default.as_float().is_some() || default.as_integer().is_some() } else { default.is_str() };
                if !ok || field == "seasonality" || field == "id" {
                    return invalid(format!("unsupported default for field {field:?}"));
                }
            }
        }
        for (tag, src) in &self.interests {
            InterestCategory::new(tag).map_err(CatalogError::MappingInvalid)?;
            if src.column.is_none() || src.columns.is_some() {
                return invalid(format!("interest {tag:?} needs exactly one `column`"));
            }
            if src.transform == Transform::MonthSplit {
                return invalid(format!("interest {tag:?} cannot use month-split"));
            }
        }
        Ok(())
    }

    fn required_columns(&self) -> Vec<String> {
        let mut out = Vec::new();
        for src in self.fields.values().chain(self.interests.values()) {
            for c in src.source_columns() {
                if !out.iter().any(|o: &String| o == c) {
                    out.push(c.to_string());
                }
            }
        }
        out
    }
}

/// Immutable, id-sorted set of cities plus the declared interest categories.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Catalog {
    cities: Vec<CityRecord>,
    categories: BTreeSet<InterestCategory>,
    source_fingerprint: String,
    #[serde(skip)]
    rejected: Vec<RowDiagnostic>,
    #[serde(skip)]
    warnings: Vec<RowDiagnostic>,
}

impl Catalog {
    /// Build a catalog from already-typed records. Used for synthetic catalogs;
    /// the fingerprint hashes the canonical JSON encoding of the sorted records.
    pub fn from_records(
        mut cities: Vec<CityRecord>,
        categories: BTreeSet<InterestCategory>,
    ) -> Result<Self, CatalogError> {
        for (i, city) in cities.iter().enumerate() {
            city.validate()
                .map_err(|reason| CatalogError::RowInvalid(RowDiagnostic { row: i + 1, reason }))?;
            if let Some(cat) = city.interest_scores.keys().find(|c| !categories.contains(*c)) {
                return Err(CatalogError::RowInvalid(RowDiagnostic {
                    row: i + 1,
                    reason: format!("undeclared interest category {cat}"),
                }));
            }
        }
        check_duplicates(cities.iter().enumerate().map(|(i, c)| (i + 1, c.id.as_str())))?;
        cities.sort_by(|a, b| a.id.cmp(&b.id));
        let encoded = serde_json::to_vec(&(&cities, &categories)).expect("records serialize");
        let source_fingerprint = hex::encode(Sha256::digest(&encoded));
        Ok(Self { cities, categories, source_fingerprint, rejected: Vec::new(), warnings: Vec::new() })
    }

    pub fn cities(&self) -> &[CityRecord] {
        &self.cities
    }

    pub fn categories(&self) -> &BTreeSet<InterestCategory> {
        &self.categories
    }

    /// Lowercase hex SHA-256 of the ingested file.
    pub fn fingerprint(&self) -> &str {
        &self.source_fingerprint
    }

    pub fn len(&self) -> usize {
        self.cities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cities.is_empty()
    }

    /// Rows skipped during load.
    pub fn rejected(&self) -> &[RowDiagnostic] {
        &self.rejected
    }

    /// Non-fatal notes, e.g. defaulted attributes.
    pub fn warnings(&self) -> &[RowDiagnostic] {
        &self.warnings
    }

    /// Exact-match lookup by id.
    pub fn get_city(&self, id: &str) -> Result<&CityRecord, LookupError> {
        self.cities
            .binary_search_by(|c| c.id.as_str().cmp(id))
            .map(|i| &self.cities[i])
            .map_err(|_| LookupError::NotFound(id.to_string()))
    }
}

fn check_duplicates<'a>(ids: impl Iterator<Item = (usize, &'a str)>) -> Result<(), CatalogError> {
    let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
    for (row, id) in ids {
        if let Some(first_row) = seen.insert(id, row) {
            return Err(CatalogError::DuplicateId { id: id.to_string(), first_row, second_row: row });
        }
    }
    Ok(())
}

pub fn load_catalog(csv_path: &Path, mapping: &ColumnMapping) -> Result<Catalog, CatalogError> {
    let bytes = std::fs::read(csv_path).map_err(|source| CatalogError::FileUnreadable {
        path: csv_path.to_path_buf(),
        source,
    })?;
    parse_catalog(&bytes, mapping)
}

/// Parse CSV bytes with `mapping`; the fingerprint is the SHA-256 of `bytes`.
pub fn parse_catalog(bytes: &[u8], mapping: &ColumnMapping) -> Result<Catalog, CatalogError> {
    mapping.validate()?;
    let fingerprint = hex::encode(Sha256::digest(bytes));

    let mut reader = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(bytes);
    let headers = reader.headers().map_err(|e| CatalogError::Csv(e.to_string()))?.clone();
    let index: BTreeMap<&str, usize> = headers.iter().enumerate().map(|(i, h)| (h, i)).collect();

    let missing: Vec<String> = mapping
        .required_columns()
        .into_iter()
        .filter(|c| !index.contains_key(c.as_str()))
        .collect();
    if !missing.is_empty() {
        return Err(CatalogError::SchemaMismatch { missing });
    }

    let mut rows = Vec::new();
    for record in reader.records() {
        rows.push(record.map_err(|e| CatalogError::Csv(e.to_string()))?);
    }

    let ctx = RowContext::new(mapping, &index, &rows);
    let mut cities = Vec::new();
    let mut rows_of = Vec::new();
    let mut rejected = Vec::new();
    let mut warnings = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let row_no = i + 1;
        match ctx.build(row, row_no, &mut warnings) {
            Ok(city) => {
                rows_of.push(row_no);
                cities.push(city);
            }
            Err(reason) => rejected.push(RowDiagnostic { row: row_no, reason }),
        }
    }

    let total = rows.len();
    if total > 0 && rejected.len() as f64 > REJECTION_BUDGET * total as f64 {
        return Err(CatalogError::RejectionBudgetExceeded { rejected: rejected.len(), total, diagnostics: rejected });
    }
    check_duplicates(rows_of.iter().copied().zip(cities.iter().map(|c| c.id.as_str())))?;

    cities.sort_by(|a, b| a.id.cmp(&b.id));
    let categories = mapping
        .interests
        .keys()
        .map(|k| InterestCategory::new(k).map_err(CatalogError::MappingInvalid))
        .collect::<Result<BTreeSet<_>, _>>()?;
    Ok(Catalog { cities, categories, source_fingerprint: fingerprint, rejected, warnings })
}

/// Column lookups plus per-column min/max for `minmax-to-unit`.
struct RowContext<'a> {
    mapping: &'a ColumnMapping,
    index: &'a BTreeMap<&'a str, usize>,
    ranges: BTreeMap<String, (f64, f64)>,
}

fn parse_number(cell: &str) -> Option<f64> {
    cell.parse::<f64>().ok().filter(|v| v.is_finite())
}

impl<'a> RowContext<'a> {
    fn new(mapping: &'a ColumnMapping, index: &'a BTreeMap<&'a str, usize>, rows: &[csv::StringRecord]) -> Self {
        let mut ranges = BTreeMap::new();
        for src in mapping.fields.values().chain(mapping.interests.values()) {
            if src.transform != Transform::MinMaxToUnit {
                continue;
            }
            let Some(col) = &src.column else { continue };
            let idx = index[col.as_str()];
            let values = rows.iter().filter_map(|r| r.get(idx).and_then(parse_number));
            let range = values.fold(None, |acc: Option<(f64, f64)>, v| match acc {
                None => Some((v, v)),
                Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
            });
            if let Some(range) = range {
                ranges.insert(col.clone(), range);
            }
        }
        Self { mapping, index, ranges }
    }

    fn cell<'r>(&self, row: &'r csv::StringRecord, column: &str) -> Option<&'r str> {
        row.get(self.index[column]).filter(|s| !s.is_empty())
    }

    fn text(&self, row: &csv::StringRecord, field: &str) -> Result<Option<String>, String> {
        let Some(src) = self.mapping.fields.get(field) else { return Ok(None) };
        if let Some(value) = src.column.as_deref().and_then(|c| self.cell(row, c)) {
            return Ok(Some(value.to_string()));
        }
        Ok(src.default.as_ref().and_then(|d| d.as_str()).map(str::to_string))
    }

    /// Numeric value with transform applied; `Ok(None)` when the cell is empty and no default exists.
    fn number(&self, row: &csv::StringRecord, name: &str, src: &FieldSource) -> Result<Option<f64>, String> {
        let raw = src.column.as_deref().and_then(|c| self.cell(row, c));
        let Some(raw) = raw else {
            return Ok(src.default.as_ref().and_then(|d| d.as_float().or(d.as_integer().map(|i| i as f64))));
        };
        let value = parse_number(raw).ok_or_else(|| format!("{name}: {raw:?} is not a finite number"))?;
        match src.transform {
            Transform::Identity => Ok(Some(value)),
            Transform::Invert => {
                check_unit(name, value)?;
                Ok(Some(1.0 - value))
            }
            Transform::MinMaxToUnit => {
                let col = src.column.as_deref().unwrap_or_default();
                let (lo, hi) = self.ranges[col];
                if hi > lo {
                    Ok(Some((value - lo) / (hi - lo)))
                } else {
                    Ok(Some(0.5))
                }
            }
            Transform::MonthSplit => Err(format!("{name}: month-split is not a scalar transform")),
        }
    }

    fn seasonality(&self, row: &csv::StringRecord) -> Result<[f64; 12], String> {
        let src = &self.mapping.fields["seasonality"];
        let values: Vec<f64> = if let Some(cols) = &src.columns {
            cols.iter()
                .map(|c| {
                    let raw = self.cell(row, c).ok_or_else(|| format!("seasonality column {c:?} is empty"))?;
                    parse_number(raw).ok_or_else(|| format!("seasonality {c:?}: {raw:?} is not a number"))
                })
                .collect::<Result<_, _>>()?
        } else {
            let col = src.column.as_deref().unwrap_or_default();
            let raw = self.cell(row, col).ok_or_else(|| "seasonality is empty".to_string())?;
            split_months(raw)?
        };
        if values.len() != 12 {
            return Err(format!("seasonality has {} entries, expected 12", values.len()));
        }
        let mut out = [0.0; 12];
        for (i, v) in values.into_iter().enumerate() {
            check_unit(&format!("seasonality[{}]", i + 1), v)?;
            out[i] = v;
        }
        Ok(out)
    }

    fn build(
        &self,
        row: &csv::StringRecord,
        row_no: usize,
        warnings: &mut Vec<RowDiagnostic>,
    ) -> Result<CityRecord, String> {
        let id = self.text(row, "id")?.ok_or("id is empty")?;
        let name = self.text(row, "name")?.ok_or("name is empty")?;
        let country = self.text(row, "country")?.unwrap_or_default();

        let required = |field: &str| -> Result<f64, String> {
            let src = &self.mapping.fields[field];
            self.number(row, field, src)?.ok_or_else(|| format!("{field} is empty"))
        };
        let location = GeoPoint::new(required("lat")?, required("lon")?)?;

        let popularity = required("popularity_count")?;
        if popularity < 0.0 || popularity.fract() != 0.0 || popularity > u64::MAX as f64 {
            return Err(format!("popularity_count {popularity} is not a non-negative integer"));
        }

        let seasonality = self.seasonality(row)?;

        let mut attribute = |field: &str| -> Result<f64, String> {
            let value = match self.mapping.fields.get(field) {
                Some(src) => self.number(row, field, src)?,
                None => None,
            };
            match value {
                Some(v) => {
                    check_unit(field, v)?;
                    Ok(v)
                }
                None => {
                    warnings.push(RowDiagnostic {
                        row: row_no,
                        reason: format!("{field} missing, defaulted to {NEUTRAL_ATTRIBUTE}"),
                    });
                    Ok(NEUTRAL_ATTRIBUTE)
                }
            }
        };
        let air_quality = attribute("air_quality")?;
        let climate_vulnerability = attribute("climate_vulnerability")?;
        let walkability = attribute("walkability")?;

        let mut interest_scores = BTreeMap::new();
        for (tag, src) in &self.mapping.interests {
            if let Some(v) = self.number(row, tag, src)? {
                check_unit(&format!("interest {tag}"), v)?;
                interest_scores.insert(InterestCategory::new(tag)?, v);
            }
        }

        let city = CityRecord {
            id,
            name,
            country,
            location,
            popularity_count: popularity as u64,
            seasonality,
            interest_scores,
            air_quality,
            climate_vulnerability,
            walkability,
        };
        city.validate()?;
        Ok(city)
    }
}

/// Split one cell holding twelve monthly values, e.g. `[0.1, 0.2, ...]` or `0.1;0.2;...`.
fn split_months(raw: &str) -> Result<Vec<f64>, String> {
    let inner = raw.trim().trim_start_matches('[').trim_end_matches(']');
    inner
        .split(|c: char| c == ',' || c == ';' || c == '|' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| parse_number(s).ok_or_else(|| format!("seasonality entry {s:?} is not a number")))
        .collect()
}
