use std::io::Read;

use rocband::empirical::choose_orientation;
use rocband::model::{Orientation, TwoGroupSample};
use rocband::Sample;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Convention {
    /// Lower values are less desirable (comparator group sits below).
    Lower,
    /// Higher values are less desirable.
    Higher,
    /// Whichever direction gives AUC >= 0.5.
    Auto,
}

fn parse_error(line: u64, what: &str) -> CliError {
    CliError::Parse(format!("line {line}: {what}"))
}

/// Reads "group,value" rows (group 0 = reference, 1 = comparator).
pub fn parse_dataset<R: Read>(input: R, convention: Convention) -> Result<Sample, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(input);
    let mut records = reader.records();
    match records.next() {
        Some(Ok(h)) if h.len() == 2 && &h[0] == "group" && &h[1] == "value" => {}
        Some(Err(e)) => return Err(CliError::Parse(format!("line 1: {e}"))),
        _ => return Err(parse_error(1, "missing header \"group,value\"")),
    }
    let mut groups: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
    for record in records {
        let record = record.map_err(|e| CliError::Parse(e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != 2 {
            return Err(parse_error(line, "expected two fields"));
        }
        let group = match &record[0] {
            "0" => 0,
            "1" => 1,
            _ => return Err(parse_error(line, "unknown group label")),
        };
        let value: f64 = record[1]
            .parse()
            .map_err(|_| parse_error(line, "non-numeric value"))?;
        if !value.is_finite() {
            return Err(parse_error(line, "non-finite value"));
        }
        groups[group].push(value);
    }
    for (g, values) in groups.iter().enumerate() {
        if values.len() < 2 {
            return Err(CliError::Parse(format!(
                "group {g} has {} rows; at least 2 are required",
                values.len()
            )));
        }
    }
    let [reference, comparator] = groups;
    let orientation = match convention {
        Convention::Lower => Orientation::LowerLessDesirable,
        Convention::Higher => Orientation::HigherLessDesirable,
        Convention::Auto => choose_orientation(&reference, &comparator)?,
    };
    Ok(TwoGroupSample::new(reference, comparator, orientation)?)
}
