//! Annual time-series data model: validation, CSV ingestion, rebasing and
//! alignment.
//!
//! A series is a contiguous run of strictly positive annual observations,
//! indexed both by calendar year and by `t` = years since the reference
//! year. Gaps, duplicate years and non-positive values are rejected up
//! front so the fitting code can assume clean annual spacing.

use thiserror::Error;

/// Errors produced while constructing, parsing or transforming a series.
#[derive(Debug, Error, PartialEq)]
pub enum SeriesError {
    #[error("line {line}: malformed row {row:?} (expected `year,value`)")]
    MalformedRow { line: usize, row: String },
    #[error("missing or invalid header (expected exactly `year,value`)")]
    BadHeader,
    #[error("line {line}: non-positive value {value} for year {year}")]
    NonPositiveValue { line: usize, year: i32, value: f64 },
    #[error("value {value} for year {year} is not strictly positive")]
    NonPositive { year: i32, value: f64 },
    #[error("duplicate year {0}")]
    DuplicateYear(i32),
    #[error("missing year {0} (annual series must have no gaps)")]
    MissingYear(i32),
    #[error("fewer than 2 rows ({0} found)")]
    TooFewRows(usize),
    #[error("series is empty")]
    Empty,
    #[error("reference year {reference} is later than the last observation ({last})")]
    RebaseBeyondEnd { reference: i32, last: i32 },
    #[error("series overlap on fewer than 2 years")]
    InsufficientOverlap,
}

/// One observation: `t` years after the reference year, strictly positive value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub t: u32,
    pub value: f64,
}

/// A named annual series rebased to a reference year (`t = 0`).
///
/// Invariants, enforced at construction:
/// - every value is finite and `> 0` (logarithms must exist),
/// - `t` is strictly increasing with no gaps (annual spacing),
/// - the series is non-empty.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnualSeries {
    name: String,
    reference_year: i32,
    observations: Vec<Observation>,
}

impl AnnualSeries {
    /// Build a series from `(calendar year, value)` pairs.
    ///
    /// Pairs are sorted by year; the reference year is the smallest year
    /// present. Duplicate years, interior gaps and non-positive values are
    /// errors.
    pub fn from_year_values(
        name: impl Into<String>,
        pairs: &[(i32, f64)],
    ) -> Result<Self, SeriesError> {
        if pairs.is_empty() {
            return Err(SeriesError::Empty);
        }
        let mut sorted: Vec<(i32, f64)> = pairs.to_vec();
        sorted.sort_by_key(|&(year, _)| year);

        let reference_year = sorted[0].0;
        let mut observations = Vec::with_capacity(sorted.len());
        for (i, &(year, value)) in sorted.iter().enumerate() {
            if !value.is_finite() || value <= 0.0 {
                return Err(SeriesError::NonPositive { year, value });
            }
            if i > 0 {
                let prev = sorted[i - 1].0;
                if year == prev {
                    return Err(SeriesError::DuplicateYear(year));
                }
                if year != prev + 1 {
                    return Err(SeriesError::MissingYear(prev + 1));
                }
            }
            observations.push(Observation {
                t: (year - reference_year) as u32,
                value,
            });
        }
        Ok(Self {
            name: name.into(),
            reference_year,
            observations,
        })
    }

    /// Parse the `year,value` CSV contract: exact header, one record per
    /// line, LF or CRLF endings, `.` decimal separator.
    ///
    /// The result is keyed by calendar year and rebased to the smallest
    /// year present. Requires at least 2 rows.
    pub fn parse_csv(name: impl Into<String>, text: &str) -> Result<Self, SeriesError> {
        let mut lines = text.lines();
        match lines.next() {
            Some(header) if header.trim_end_matches('\r') == "year,value" => {}
            _ => return Err(SeriesError::BadHeader),
        }

        let mut pairs: Vec<(i32, f64)> = Vec::new();
        let mut seen_years: Vec<i32> = Vec::new();
        for (idx, raw) in lines.enumerate() {
            let line_no = idx + 2; // header is line 1
            let row = raw.trim_end_matches('\r');
            if row.is_empty() {
                continue;
            }
            let Some((year_str, value_str)) = row.split_once(',') else {
                return Err(SeriesError::MalformedRow {
                    line: line_no,
                    row: row.to_string(),
                });
            };
            let year: i32 = year_str.trim().parse().map_err(|_| SeriesError::MalformedRow {
                line: line_no,
                row: row.to_string(),
            })?;
            let value: f64 = value_str.trim().parse().map_err(|_| SeriesError::MalformedRow {
                line: line_no,
                row: row.to_string(),
            })?;
            if !value.is_finite() || value <= 0.0 {
                return Err(SeriesError::NonPositiveValue {
                    line: line_no,
                    year,
                    value,
                });
            }
            if seen_years.contains(&year) {
                return Err(SeriesError::DuplicateYear(year));
            }
            seen_years.push(year);
            pairs.push((year, value));
        }

        if pairs.len() < 2 {
            return Err(SeriesError::TooFewRows(pairs.len()));
        }
        Self::from_year_values(name, &pairs)
    }

    /// Serialize back to the `year,value` contract. Values use the shortest
    /// representation that round-trips, so `parse_csv(to_csv(s)) == s`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("year,value\n");
        for obs in &self.observations {
            out.push_str(&format!("{},{}\n", self.calendar_year(obs.t), obs.value));
        }
        out
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn reference_year(&self) -> i32 {
        self.reference_year
    }

    pub fn observations(&self) -> &[Observation] {
        &self.observations
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    /// Calendar year of the observation at offset `t`.
    pub fn calendar_year(&self, t: u32) -> i32 {
        self.reference_year + t as i32
    }

    pub fn first_year(&self) -> i32 {
        self.calendar_year(self.observations[0].t)
    }

    pub fn last_year(&self) -> i32 {
        self.calendar_year(self.observations[self.observations.len() - 1].t)
    }

    /// Shift the time axis so `reference_year` maps to `t = 0`, keeping
    /// values unchanged.
    ///
    /// A reference at or before the first observation is a pure translation.
    /// A reference inside the series drops the earlier observations; the
    /// second element of the result is the number dropped, so callers can
    /// warn. A reference past the last observation is an error.
    pub fn rebase(&self, reference_year: i32) -> Result<(AnnualSeries, usize), SeriesError> {
        let last = self.last_year();
        if reference_year > last {
            return Err(SeriesError::RebaseBeyondEnd {
                reference: reference_year,
                last,
            });
        }
        let kept: Vec<Observation> = self
            .observations
            .iter()
            .filter(|obs| self.calendar_year(obs.t) >= reference_year)
            .map(|obs| Observation {
                t: (self.calendar_year(obs.t) - reference_year) as u32,
                value: obs.value,
            })
            .collect();
        let dropped = self.observations.len() - kept.len();
        Ok((
            AnnualSeries {
                name: self.name.clone(),
                reference_year,
                observations: kept,
            },
            dropped,
        ))
    }

    /// Rename, preserving everything else.
    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }
}

/// Restrict both series to their common calendar-year window and rebase
/// both to the common first year. Errors if they share fewer than 2 years.
pub fn align(a: &AnnualSeries, b: &AnnualSeries) -> Result<(AnnualSeries, AnnualSeries), SeriesError> {
    let mut aligned = align_many(&[a, b])?;
    let second = aligned.pop().expect("align_many returns one per input");
    let first = aligned.pop().expect("align_many returns one per input");
    Ok((first, second))
}

/// [`align`] over any number of series: all outputs share the same window
/// and reference year.
pub fn align_many(series: &[&AnnualSeries]) -> Result<Vec<AnnualSeries>, SeriesError> {
    let first = series.first().ok_or(SeriesError::Empty)?;
    let mut start = first.first_year();
    let mut end = first.last_year();
    for s in &series[1..] {
        start = start.max(s.first_year());
        end = end.min(s.last_year());
    }
    if end < start || (end - start + 1) < 2 {
        return Err(SeriesError::InsufficientOverlap);
    }
    series
        .iter()
        .map(|s| {
            let (rebased, _) = s.rebase(start)?;
            let trimmed: Vec<Observation> = rebased
                .observations
                .into_iter()
                .filter(|obs| rebased.reference_year + obs.t as i32 <= end)
                .collect();
            Ok(AnnualSeries {
                name: rebased.name,
                reference_year: start,
                observations: trimmed,
            })
        })
        .collect()
}
