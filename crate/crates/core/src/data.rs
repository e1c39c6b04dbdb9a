//! Binary datasets: CSV ingestion, null-row classification and the two
//! synthetic cohorts.
//!
//! Both generators draw from ChaCha8 (`rand_chacha`) seeded through
//! `SeedableRng::seed_from_u64`. A coin flip is the most significant bit of
//! one `next_u32` output.

use std::collections::HashSet;
use std::io::{Read, Write};

use rand::seq::SliceRandom;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{BmcmError, Result};
use crate::expr::BitRow;

/// Column names shared by the synthetic cohorts.
pub const SYNTHETIC_COLUMNS: [&str; 4] = ["x1", "x2", "x3", "xO"];
pub const SYNTHETIC_OUTCOME: &str = "xO";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dataset {
    columns: Vec<String>,
    outcome: usize,
    rows: Vec<Vec<bool>>,
}

impl Dataset {
    pub fn new(columns: Vec<String>, outcome: &str, rows: Vec<Vec<bool>>) -> Result<Self> {
        let mut seen = HashSet::new();
        for name in &columns {
            if !seen.insert(name.as_str()) {
                return Err(BmcmError::DuplicateColumn(name.clone()));
            }
        }
        let outcome_index = columns
            .iter()
            .position(|c| c == outcome)
            .ok_or_else(|| BmcmError::UnknownOutcome(outcome.to_string()))?;
        if rows.is_empty() {
            return Err(BmcmError::EmptyDataset);
        }
        if let Some((i, row)) = rows
            .iter()
            .enumerate()
            .find(|(_, r)| r.len() != columns.len())
        {
            return Err(BmcmError::RaggedRow {
                row: i + 1,
                expected: columns.len(),
                found: row.len(),
            });
        }
        Ok(Dataset {
            columns,
            outcome: outcome_index,
            rows,
        })
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn outcome(&self) -> &str {
        &self.columns[self.outcome]
    }

    pub fn outcome_index(&self) -> usize {
        self.outcome
    }

    /// Every column except the outcome, in header order.
    pub fn explanatory(&self) -> Vec<&str> {
        self.columns
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != self.outcome)
            .map(|(_, c)| c.as_str())
            .collect()
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<bool>] {
        &self.rows
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| BmcmError::MissingVariable(name.to_string()))
    }

    pub fn outcome_bit(&self, row: usize) -> bool {
        self.rows[row][self.outcome]
    }

    pub fn row(&self, index: usize) -> BitRow {
        self.columns
            .iter()
            .zip(&self.rows[index])
            .map(|(c, &b)| (c.as_str(), b))
            .collect()
    }

    pub fn ones(&self, column: &str) -> Result<usize> {
        let idx = self.column_index(column)?;
        Ok(self.rows.iter().filter(|r| r[idx]).count())
    }

    /// Null class of every row, judged over `explanatory`.
    pub fn null_classes(&self, explanatory: &[&str]) -> Result<Vec<NullClass>> {
        let idx = explanatory
            .iter()
            .map(|name| self.column_index(name))
            .collect::<Result<Vec<_>>>()?;
        Ok(self
            .rows
            .iter()
            .map(|row| NullClass::of(idx.iter().map(|&i| row[i]), row[self.outcome]))
            .collect())
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut out = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(writer);
        let csv_err = |e: csv::Error| BmcmError::Csv(e.to_string());
        out.write_record(&self.columns).map_err(csv_err)?;
        for row in &self.rows {
            out.write_record(row.iter().map(|&b| if b { "1" } else { "0" }))
                .map_err(csv_err)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Read a header-first CSV of `0`/`1` cells.
pub fn load_csv<R: Read>(source: R, outcome: &str) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(source);
    let mut records = reader.records();
    let header = match records.next() {
        Some(rec) => rec.map_err(|e| BmcmError::Csv(e.to_string()))?,
        None => return Err(BmcmError::MissingHeader),
    };
    let columns: Vec<String> = header.iter().map(str::to_string).collect();
    if columns.iter().all(|c| c.is_empty()) {
        return Err(BmcmError::MissingHeader);
    }
    let mut seen = HashSet::new();
    for name in &columns {
        if !seen.insert(name.as_str()) {
            return Err(BmcmError::DuplicateColumn(name.clone()));
        }
    }
    if !columns.iter().any(|c| c == outcome) {
        return Err(BmcmError::UnknownOutcome(outcome.to_string()));
    }

    let mut rows = Vec::new();
    for (i, rec) in records.enumerate() {
        let rec = rec.map_err(|e| BmcmError::Csv(e.to_string()))?;
        let line = i + 1;
        if rec.len() != columns.len() {
            return Err(BmcmError::RaggedRow {
                row: line,
                expected: columns.len(),
                found: rec.len(),
            });
        }
        let row = rec
            .iter()
            .zip(&columns)
            .map(|(cell, column)| match cell {
                "0" => Ok(false),
                "1" => Ok(true),
                other => Err(BmcmError::NonBinaryCell {
                    row: line,
                    column: column.clone(),
                    value: other.to_string(),
                }),
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Dataset::new(columns, outcome, rows)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NullClass {
    AllOnePos,
    AllZeroNeg,
    AllOneNeg,
    AllZeroPos,
    NonNull,
}

impl NullClass {
    pub fn of<I: IntoIterator<Item = bool>>(explanatory: I, outcome: bool) -> Self {
        let (mut any_one, mut any_zero) = (false, false);
        for bit in explanatory {
            if bit {
                any_one = true;
            } else {
                any_zero = true;
            }
        }
        match (any_one, any_zero, outcome) {
            (true, false, true) => NullClass::AllOnePos,
            (true, false, false) => NullClass::AllOneNeg,
            (false, true, false) => NullClass::AllZeroNeg,
            (false, true, true) => NullClass::AllZeroPos,
            _ => NullClass::NonNull,
        }
    }

    pub fn is_null(self) -> bool {
        self != NullClass::NonNull
    }
}

pub fn classify_null<S: AsRef<str>>(
    row: &BitRow,
    explanatory: &[S],
    outcome: &str,
) -> Result<NullClass> {
    let bits = explanatory
        .iter()
        .map(|name| row.require(name.as_ref()))
        .collect::<Result<Vec<_>>>()?;
    Ok(NullClass::of(bits, row.require(outcome)?))
}

fn coin(rng: &mut ChaCha8Rng) -> bool {
    rng.next_u32() >> 31 == 1
}

fn synthetic_columns() -> Vec<String> {
    SYNTHETIC_COLUMNS.iter().map(|c| c.to_string()).collect()
}

/// `x1, x2, x3, xO` all independent fair coins, drawn row by row in column
/// order.
pub fn generate_random(n: usize, seed: u64) -> Result<Dataset> {
    if n == 0 {
        return Err(BmcmError::InvalidSize {
            n,
            reason: "need at least one row",
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows = (0..n)
        .map(|_| {
            (0..SYNTHETIC_COLUMNS.len())
                .map(|_| coin(&mut rng))
                .collect()
        })
        .collect();
    Dataset::new(synthetic_columns(), SYNTHETIC_OUTCOME, rows)
}

/// `xO = x1` with exactly `n / 2` ones in `x1`, placed by a seeded shuffle;
/// `x2, x3` are fair coins drawn afterwards from the same stream.
pub fn generate_dependent(n: usize, seed: u64) -> Result<Dataset> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(BmcmError::InvalidSize {
            n,
            reason: "dependent cohort needs an even row count >= 2",
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut driver: Vec<bool> = (0..n).map(|i| i < n / 2).collect();
    driver.shuffle(&mut rng);
    let rows = driver
        .into_iter()
        .map(|x1| {
            let x2 = coin(&mut rng);
            let x3 = coin(&mut rng);
            vec![x1, x2, x3, x1]
        })
        .collect();
    Dataset::new(synthetic_columns(), SYNTHETIC_OUTCOME, rows)
}
