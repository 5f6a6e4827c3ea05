//! CSV ingestion of two-group survival data.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use survcmp::survival::{BeyondHorizon, Observation, Sample};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnMapping {
    pub time: String,
    pub status: String,
    pub group: String,
    /// Status value marking an observed event.
    pub event_code: String,
    /// Status value marking a censored record.
    pub censor_code: String,
}

impl Default for ColumnMapping {
    fn default() -> Self {
        Self {
            time: "time".into(),
            status: "delta".into(),
            group: "type".into(),
            event_code: "1".into(),
            censor_code: "0".into(),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("missing column `{0}` in header")]
    MissingColumn(String),
    #[error("row {row}: non-numeric time `{value}`")]
    BadTime { row: u64, value: String },
    #[error("row {row}: invalid status code `{value}`")]
    BadStatus { row: u64, value: String },
    #[error("row {row}: missing field `{column}`")]
    MissingField { row: u64, column: String },
    #[error("expected exactly 2 groups, found {found}: {labels}")]
    GroupCount { found: usize, labels: String },
    #[error("row {row}: time must be positive and finite, got `{value}`")]
    NonPositiveTime { row: u64, value: String },
    #[error("only group `{0}` present; the other group is empty")]
    EmptyGroup(String),
    #[error("group `{label}`: {source}")]
    Invalid { label: String, source: survcmp::Error },
}

/// Two samples keyed by their sorted group labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub labels: [String; 2],
    pub first: Sample,
    pub second: Sample,
}

fn label_order(a: &str, b: &str) -> Ordering {
    match (a.parse::<f64>(), b.parse::<f64>()) {
        (Ok(x), Ok(y)) => x.total_cmp(&y),
        _ => a.cmp(b),
    }
}

fn column(headers: &csv::StringRecord, name: &str) -> Result<usize, IngestError> {
    headers
        .iter()
        .position(|h| h.trim() == name)
        .ok_or_else(|| IngestError::MissingColumn(name.to_string()))
}

pub fn read_csv<R: Read>(
    reader: R,
    mapping: &ColumnMapping,
    horizon: f64,
    policy: BeyondHorizon,
) -> Result<Dataset, IngestError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let (ti, si, gi) = (
        column(&headers, &mapping.time)?,
        column(&headers, &mapping.status)?,
        column(&headers, &mapping.group)?,
    );

    let mut groups: BTreeMap<String, Vec<Observation>> = BTreeMap::new();
    for record in rdr.records() {
        let record = record?;
        let row = record.position().map_or(0, |p| p.line());
        let field = |i: usize, name: &str| {
            record.get(i).ok_or_else(|| IngestError::MissingField {
                row,
                column: name.to_string(),
            })
        };
        let time_raw = field(ti, &mapping.time)?;
        let time: f64 = time_raw.parse().map_err(|_| IngestError::BadTime {
            row,
            value: time_raw.to_string(),
        })?;
        if !(time > 0.0 && time.is_finite()) {
            return Err(IngestError::NonPositiveTime {
                row,
                value: time_raw.to_string(),
            });
        }
        let status = field(si, &mapping.status)?;
        let event = if status == mapping.event_code {
            true
        } else if status == mapping.censor_code {
            false
        } else {
            return Err(IngestError::BadStatus {
                row,
                value: status.to_string(),
            });
        };
        let label = field(gi, &mapping.group)?.to_string();
        groups.entry(label).or_default().push(Observation::new(time, event));
    }

    let mut labels: Vec<String> = groups.keys().cloned().collect();
    labels.sort_by(|a, b| label_order(a, b));
    if labels.len() != 2 {
        if labels.len() == 1 {
            return Err(IngestError::EmptyGroup(labels[0].clone()));
        }
        return Err(IngestError::GroupCount {
            found: labels.len(),
            labels: labels.join(", "),
        });
    }
    let mut build = |label: &str| {
        let obs = groups.remove(label).expect("label collected above");
        Sample::truncate_with(&obs, horizon, policy).map_err(|source| IngestError::Invalid {
            label: label.to_string(),
            source,
        })
    };
    let first = build(&labels[0])?;
    let second = build(&labels[1])?;
    Ok(Dataset {
        labels: [labels[0].clone(), labels[1].clone()],
        first,
        second,
    })
}

pub fn ingest_csv(
    path: &Path,
    mapping: &ColumnMapping,
    horizon: f64,
    policy: BeyondHorizon,
) -> Result<Dataset, IngestError> {
    let file = std::fs::File::open(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })?;
    read_csv(file, mapping, horizon, policy)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Dataset, IngestError> {
        read_csv(text.as_bytes(), &ColumnMapping::default(), 100.0, BeyondHorizon::Event)
    }

    #[test]
    fn splits_and_sorts_groups() {
        let d = parse("type,time,delta\n10,3,1\n9,4,0\n10,5.5,1\n").unwrap();
        assert_eq!(d.labels, ["9".to_string(), "10".to_string()]);
        assert_eq!(d.first.len(), 1);
        assert_eq!(d.second.observations()[1], Observation::event(5.5));
    }

    #[test]
    fn structured_errors() {
        let e = parse("type,time,delta\n1,3,1\n2,4,0\n3,5,1\n").unwrap_err();
        assert!(e.to_string().contains("expected exactly 2 groups"), "{e}");
        let e = parse("type,time,delta\n1,3,1\n2,4,2\n").unwrap_err();
        assert!(e.to_string().contains("row 3: invalid status code"), "{e}");
        let e = parse("type,time,delta\n1,abc,1\n2,4,0\n").unwrap_err();
        assert!(e.to_string().contains("row 2: non-numeric time"), "{e}");
        let e = parse("type,t,delta\n1,3,1\n").unwrap_err();
        assert!(e.to_string().contains("missing column `time`"), "{e}");
        let e = parse("type,time,delta\n1,3,1\n").unwrap_err();
        assert!(e.to_string().contains("empty"), "{e}");
        let e = parse("type,time,delta\n1,-3,1\n2,4,0\n").unwrap_err();
        assert!(e.to_string().starts_with("row 2: time must be positive"), "{e}");
    }

    #[test]
    fn custom_status_codes() {
        let mapping = ColumnMapping {
            event_code: "dead".into(),
            censor_code: "alive".into(),
            ..ColumnMapping::default()
        };
        let text = "type,time,delta\na,3,dead\nb,4,alive\n";
        let d = read_csv(text.as_bytes(), &mapping, 10.0, BeyondHorizon::Event).unwrap();
        assert!(d.first.is_uncensored());
        assert!(!d.second.is_uncensored());
    }
}
