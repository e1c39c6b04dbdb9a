//! Operator trials: evaluate a template under many operator assignments per
//! row, label each trial faithful or unfaithful, and tally operators per slot.
//!
//! Rows are processed in parallel on the current rayon pool. Per-row tallies
//! merge by addition, so the result does not depend on scheduling. In sampled
//! mode row `r` draws from ChaCha8 seeded with `seed` on stream `r`; trial `t`
//! consumes words `t * w .. (t + 1) * w` of that stream, `w = ceil(k / 64)`
//! 64-bit words, and slot `j` takes bit `(j - 1) % 64` of word `(j - 1) / 64`
//! (1 = `or`).

use std::ops::{Add, AddAssign};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, NullClass};
use crate::error::{BmcmError, Result};
use crate::expr::{
    enumerate_assignments, evaluate_items, ModelTemplate, Operator, OperatorAssignment,
    TemplateItem,
};
use crate::stats::{binomial_chisq, TestResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialClass {
    Faithful,
    Unfaithful,
}

pub fn classify_trial(f_value: bool, outcome: bool) -> TrialClass {
    if f_value == outcome {
        TrialClass::Faithful
    } else {
        TrialClass::Unfaithful
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SlotCounts {
    pub faithful_and: u64,
    pub faithful_or: u64,
    pub unfaithful_and: u64,
    pub unfaithful_or: u64,
}

impl SlotCounts {
    pub fn record(&mut self, class: TrialClass, op: Operator) {
        let cell = match (class, op) {
            (TrialClass::Faithful, Operator::And) => &mut self.faithful_and,
            (TrialClass::Faithful, Operator::Or) => &mut self.faithful_or,
            (TrialClass::Unfaithful, Operator::And) => &mut self.unfaithful_and,
            (TrialClass::Unfaithful, Operator::Or) => &mut self.unfaithful_or,
        };
        *cell += 1;
    }

    pub fn total(&self) -> u64 {
        self.faithful_and + self.faithful_or + self.unfaithful_and + self.unfaithful_or
    }

    pub fn faithful(&self) -> u64 {
        self.faithful_and + self.faithful_or
    }

    pub fn unfaithful(&self) -> u64 {
        self.unfaithful_and + self.unfaithful_or
    }
}

impl AddAssign for SlotCounts {
    fn add_assign(&mut self, rhs: Self) {
        self.faithful_and += rhs.faithful_and;
        self.faithful_or += rhs.faithful_or;
        self.unfaithful_and += rhs.unfaithful_and;
        self.unfaithful_or += rhs.unfaithful_or;
    }
}

/// Per-slot operator counts; `slots[0]` is slot 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SlotTally {
    pub slots: Vec<SlotCounts>,
    pub total_trials: u64,
}

impl SlotTally {
    pub fn empty(slot_count: usize) -> Self {
        SlotTally {
            slots: vec![SlotCounts::default(); slot_count],
            total_trials: 0,
        }
    }

    pub fn slot_count(&self) -> usize {
        self.slots.len()
    }

    /// Counts for a 1-based slot id.
    pub fn slot(&self, id: usize) -> Option<&SlotCounts> {
        id.checked_sub(1).and_then(|i| self.slots.get(i))
    }

    pub fn record(&mut self, class: TrialClass, ops: &[Operator]) {
        for (counts, &op) in self.slots.iter_mut().zip(ops) {
            counts.record(class, op);
        }
        self.total_trials += 1;
    }
}

impl Add for SlotTally {
    type Output = SlotTally;

    fn add(mut self, rhs: SlotTally) -> SlotTally {
        debug_assert_eq!(self.slots.len(), rhs.slots.len());
        for (lhs, rhs) in self.slots.iter_mut().zip(rhs.slots) {
            *lhs += rhs;
        }
        self.total_trials += rhs.total_trials;
        self
    }
}

/// How operator assignments are chosen per row.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum TrialMode {
    /// Every one of the `2^k` assignments once.
    #[default]
    Exhaustive,
    /// Independent fair-coin assignments.
    Sampled { trials_per_row: u64 },
}

/// A template with its variables replaced by dataset column indices.
struct BoundModel {
    items: Vec<TemplateItem<usize>>,
    variables: Vec<usize>,
    slot_count: usize,
}

impl BoundModel {
    fn new(dataset: &Dataset, template: &ModelTemplate) -> Result<Self> {
        let items = template.bind(|name| dataset.column_index(name))?;
        let variables = template
            .variables()
            .into_iter()
            .map(|name| dataset.column_index(name))
            .collect::<Result<_>>()?;
        Ok(BoundModel {
            items,
            variables,
            slot_count: template.slot_count(),
        })
    }

    fn eval(&self, row: &[bool], ops: &[Operator]) -> bool {
        evaluate_items(&self.items, ops, &|&col: &usize| row[col])
    }

    /// Rows entering the trials. Null status is judged over the template's
    /// own variables, the ones whose value fixes `f` regardless of operators.
    fn retained_rows(&self, dataset: &Dataset, exclude_null: bool) -> Vec<usize> {
        let outcome = dataset.outcome_index();
        (0..dataset.n())
            .filter(|&r| {
                if !exclude_null {
                    return true;
                }
                let row = &dataset.rows()[r];
                !NullClass::of(self.variables.iter().map(|&c| row[c]), row[outcome]).is_null()
            })
            .collect()
    }
}

pub fn run_exhaustive(
    dataset: &Dataset,
    template: &ModelTemplate,
    exclude_null: bool,
) -> Result<SlotTally> {
    let model = BoundModel::new(dataset, template)?;
    let assignments = enumerate_assignments(model.slot_count)?;
    let rows = model.retained_rows(dataset, exclude_null);
    let outcome = dataset.outcome_index();
    let k = model.slot_count;

    Ok(rows
        .par_iter()
        .fold(
            || SlotTally::empty(k),
            |mut tally, &r| {
                let row = &dataset.rows()[r];
                for assignment in &assignments {
                    let f = model.eval(row, assignment.ops());
                    tally.record(classify_trial(f, row[outcome]), assignment.ops());
                }
                tally
            },
        )
        .reduce(|| SlotTally::empty(k), Add::add))
}

pub fn run_sampled(
    dataset: &Dataset,
    template: &ModelTemplate,
    trials_per_row: u64,
    seed: u64,
    exclude_null: bool,
) -> Result<SlotTally> {
    if trials_per_row == 0 {
        return Err(BmcmError::InvalidTrials);
    }
    let model = BoundModel::new(dataset, template)?;
    let rows = model.retained_rows(dataset, exclude_null);
    let outcome = dataset.outcome_index();
    let k = model.slot_count;
    let words = k.div_ceil(64);

    Ok(rows
        .par_iter()
        .fold(
            || {
                (
                    SlotTally::empty(k),
                    vec![Operator::And; k],
                    vec![0u64; words],
                )
            },
            |(mut tally, mut ops, mut bits), &r| {
                let row = &dataset.rows()[r];
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(r as u64);
                for _ in 0..trials_per_row {
                    bits.iter_mut().for_each(|w| *w = rng.next_u64());
                    for (j, op) in ops.iter_mut().enumerate() {
                        *op = if (bits[j / 64] >> (j % 64)) & 1 == 1 {
                            Operator::Or
                        } else {
                            Operator::And
                        };
                    }
                    let f = model.eval(row, &ops);
                    tally.record(classify_trial(f, row[outcome]), &ops);
                }
                (tally, ops, bits)
            },
        )
        .map(|(tally, _, _)| tally)
        .reduce(|| SlotTally::empty(k), Add::add))
}

pub fn run_trials(
    dataset: &Dataset,
    template: &ModelTemplate,
    mode: TrialMode,
    seed: u64,
    exclude_null: bool,
) -> Result<SlotTally> {
    match mode {
        TrialMode::Exhaustive => run_exhaustive(dataset, template, exclude_null),
        TrialMode::Sampled { trials_per_row } => {
            run_sampled(dataset, template, trials_per_row, seed, exclude_null)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Choice {
    And,
    Or,
    Inconclusive,
}

impl Choice {
    pub fn operator(self) -> Option<Operator> {
        match self {
            Choice::And => Some(Operator::And),
            Choice::Or => Some(Operator::Or),
            Choice::Inconclusive => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlotDecision {
    pub slot: usize,
    pub choice: Choice,
    pub faithful_test: TestResult,
    /// Absent when the slot saw no unfaithful trials.
    pub unfaithful_test: Option<TestResult>,
    pub corroborated: bool,
}

fn majority(and: u64, or: u64) -> Option<Operator> {
    match and.cmp(&or) {
        std::cmp::Ordering::Greater => Some(Operator::And),
        std::cmp::Ordering::Less => Some(Operator::Or),
        std::cmp::Ordering::Equal => None,
    }
}

/// Binomial chi-square on each slot's faithful counts decides the operator;
/// the unfaithful counts are tested for a significant opposite lean.
pub fn decide_operators(tally: &SlotTally, alpha: f64) -> Result<Vec<SlotDecision>> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(BmcmError::InvalidAlpha(alpha));
    }
    tally
        .slots
        .iter()
        .enumerate()
        .map(|(i, counts)| {
            let slot = i + 1;
            if counts.faithful() == 0 {
                return Err(BmcmError::UndecidableSlot(slot));
            }
            let faithful_test = binomial_chisq(counts.faithful_and, counts.faithful_or)?;
            let unfaithful_test = match counts.unfaithful() {
                0 => None,
                _ => Some(binomial_chisq(counts.unfaithful_and, counts.unfaithful_or)?),
            };
            let choice = match majority(counts.faithful_and, counts.faithful_or) {
                Some(op) if faithful_test.is_significant(alpha) => match op {
                    Operator::And => Choice::And,
                    Operator::Or => Choice::Or,
                },
                _ => Choice::Inconclusive,
            };
            let corroborated = match (choice.operator(), &unfaithful_test) {
                (Some(op), Some(test)) => {
                    test.is_significant(alpha)
                        && majority(counts.unfaithful_and, counts.unfaithful_or)
                            == Some(op.opposite())
                }
                _ => false,
            };
            Ok(SlotDecision {
                slot,
                choice,
                faithful_test,
                unfaithful_test,
                corroborated,
            })
        })
        .collect()
}

/// The fully decided assignment, if no slot is inconclusive.
pub fn resolve(decisions: &[SlotDecision]) -> Option<OperatorAssignment> {
    decisions
        .iter()
        .map(|d| d.choice.operator())
        .collect::<Option<Vec<_>>>()
        .map(OperatorAssignment::new)
}
