//! The three-step analysis: screen null rows for an outcome trend, estimate
//! operator tendencies per model, then tabulate each resolved model against
//! the outcome over the full dataset.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, NullClass};
use crate::engine::{
    decide_operators, resolve, run_trials, Choice, SlotDecision, SlotTally, TrialMode,
};
use crate::error::{BmcmError, Result};
use crate::expr::{evaluate_items, ModelTemplate, OperatorAssignment};
use crate::stats::{contingency_chisq, fisher_exact, Table2x2, TestResult};

pub const REPORT_FORMAT_VERSION: u32 = 1;
pub const DEFAULT_ALPHA: f64 = 0.05;

pub const GATE_WARNING: &str =
    "null data show no outcome trend between all-1 and all-0 rows; change the variables or hypothesis";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub trials: TrialMode,
    pub seed: u64,
    pub alpha: f64,
    /// Keep null rows in the operator trials.
    pub include_null_in_step2: bool,
    /// Run steps 2 and 3 even when the null-data gate fails.
    pub ignore_gate: bool,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            trials: TrialMode::Exhaustive,
            seed: 0,
            alpha: DEFAULT_ALPHA,
            include_null_in_step2: false,
            ignore_gate: false,
        }
    }
}

impl AnalysisConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(BmcmError::InvalidAlpha(self.alpha));
        }
        if let TrialMode::Sampled { trials_per_row: 0 } = self.trials {
            return Err(BmcmError::InvalidTrials);
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NullCounts {
    pub all_one_pos: u64,
    pub all_zero_neg: u64,
    pub all_one_neg: u64,
    pub all_zero_pos: u64,
    pub non_null: u64,
}

impl NullCounts {
    fn add(&mut self, class: NullClass) {
        match class {
            NullClass::AllOnePos => self.all_one_pos += 1,
            NullClass::AllZeroNeg => self.all_zero_neg += 1,
            NullClass::AllOneNeg => self.all_one_neg += 1,
            NullClass::AllZeroPos => self.all_zero_pos += 1,
            NullClass::NonNull => self.non_null += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.all_one_pos + self.all_zero_neg + self.all_one_neg + self.all_zero_pos + self.non_null
    }

    /// Rows all-1 / all-0, columns outcome 1 / outcome 0.
    pub fn table(&self) -> Table2x2 {
        Table2x2::new(
            self.all_one_pos,
            self.all_one_neg,
            self.all_zero_pos,
            self.all_zero_neg,
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NullReport {
    pub counts: NullCounts,
    pub table: Table2x2,
    pub chisq: TestResult,
    pub fisher: TestResult,
    pub gate_passed: bool,
    pub warning: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelReport {
    pub template: String,
    pub tally: SlotTally,
    pub decisions: Vec<SlotDecision>,
    pub resolved: Option<OperatorAssignment>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FinalReport {
    pub template: String,
    pub assignment: OperatorAssignment,
    /// Rows f=1 / f=0, columns outcome 1 / outcome 0.
    pub table: Table2x2,
    pub chisq: TestResult,
    pub fisher: TestResult,
    pub sensitivity: Option<f64>,
    pub specificity: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelEntry {
    pub template: String,
    pub report: Option<ModelReport>,
    #[serde(rename = "final")]
    pub final_report: Option<FinalReport>,
    pub error: Option<String>,
}

impl ModelEntry {
    pub fn is_resolved(&self) -> bool {
        self.report.as_ref().is_some_and(|r| r.resolved.is_some())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub n: usize,
    pub columns: Vec<String>,
    pub outcome: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub format_version: u32,
    pub config: AnalysisConfig,
    pub dataset: DatasetSummary,
    pub null: NullReport,
    /// Steps 2 and 3 were skipped because the gate failed.
    pub halted: bool,
    pub models: Vec<ModelEntry>,
    /// Number of faithful-side slot tests behind the operator decisions.
    pub slot_tests: usize,
}

impl AnalysisReport {
    pub fn finals(&self) -> impl Iterator<Item = &FinalReport> {
        self.models.iter().filter_map(|m| m.final_report.as_ref())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Chi-square on a table whose margins may be empty; an empty margin carries
/// no evidence of association.
fn chisq_or_null(table: &Table2x2) -> Result<TestResult> {
    match contingency_chisq(table, true) {
        Err(BmcmError::DegenerateTable) => Ok(TestResult {
            statistic: 0.0,
            p_value: 1.0,
            log10_p_value: 0.0,
            dof: 1,
        }),
        other => other,
    }
}

/// Step 1: outcome trend among rows whose explanatory bits are all equal.
pub fn step1_null(dataset: &Dataset, alpha: f64) -> Result<NullReport> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(BmcmError::InvalidAlpha(alpha));
    }
    let mut counts = NullCounts::default();
    for class in dataset.null_classes(&dataset.explanatory())? {
        counts.add(class);
    }
    let table = counts.table();
    let (all_one, all_zero) = table.row_margins();
    if all_one == 0 || all_zero == 0 {
        return Err(BmcmError::GateInapplicable { all_one, all_zero });
    }
    let chisq = chisq_or_null(&table)?;
    let fisher = fisher_exact(&table);
    let gate_passed = chisq.is_significant(alpha);
    Ok(NullReport {
        counts,
        table,
        chisq,
        fisher,
        gate_passed,
        warning: (!gate_passed).then(|| GATE_WARNING.to_string()),
    })
}

fn check_target(dataset: &Dataset, template: &ModelTemplate) -> Result<()> {
    if template.target() != dataset.outcome() {
        return Err(BmcmError::TargetMismatch {
            expected: dataset.outcome().to_string(),
            found: template.target().to_string(),
        });
    }
    Ok(())
}

/// Step 2: operator trials and per-slot decisions for one template.
pub fn step2_model(
    dataset: &Dataset,
    template: &ModelTemplate,
    config: &AnalysisConfig,
    null: &NullReport,
) -> Result<ModelReport> {
    config.validate()?;
    if !null.gate_passed && !config.ignore_gate {
        return Err(BmcmError::GateNotPassed {
            p_value: null.chisq.p_value,
        });
    }
    check_target(dataset, template)?;
    let tally = run_trials(
        dataset,
        template,
        config.trials,
        config.seed,
        !config.include_null_in_step2,
    )?;
    let decisions = decide_operators(&tally, config.alpha)?;
    let resolved = resolve(&decisions);
    Ok(ModelReport {
        template: template.to_string(),
        tally,
        decisions,
        resolved,
    })
}

/// Step 3: the resolved function against the outcome over every row.
pub fn step3_contingency(
    dataset: &Dataset,
    template: &ModelTemplate,
    assignment: &OperatorAssignment,
) -> Result<FinalReport> {
    template.check_assignment(assignment)?;
    check_target(dataset, template)?;
    let items = template.bind(|name| dataset.column_index(name))?;
    let outcome = dataset.outcome_index();
    let mut table = Table2x2::default();
    for row in dataset.rows() {
        let f = evaluate_items(&items, assignment.ops(), &|&col: &usize| row[col]);
        match (f, row[outcome]) {
            (true, true) => table.a += 1,
            (true, false) => table.b += 1,
            (false, true) => table.c += 1,
            (false, false) => table.d += 1,
        }
    }
    let chisq = contingency_chisq(&table, true)?;
    let fisher = fisher_exact(&table);
    Ok(FinalReport {
        template: template.to_string(),
        assignment: assignment.clone(),
        table,
        chisq,
        fisher,
        sensitivity: table.sensitivity(),
        specificity: table.specificity(),
    })
}

fn analyze_model(
    dataset: &Dataset,
    template: &ModelTemplate,
    config: &AnalysisConfig,
    null: &NullReport,
) -> ModelEntry {
    let mut entry = ModelEntry {
        template: template.to_string(),
        report: None,
        final_report: None,
        error: None,
    };
    match step2_model(dataset, template, config, null) {
        Ok(report) => {
            if let Some(assignment) = &report.resolved {
                match step3_contingency(dataset, template, assignment) {
                    Ok(fin) => entry.final_report = Some(fin),
                    Err(err) => entry.error = Some(err.to_string()),
                }
            }
            entry.report = Some(report);
        }
        Err(err) => entry.error = Some(err.to_string()),
    }
    entry
}

/// All three steps. Per-model failures are recorded in their entries; only
/// configuration and step-1 errors abort.
pub fn run_full(
    dataset: &Dataset,
    templates: &[ModelTemplate],
    config: &AnalysisConfig,
) -> Result<AnalysisReport> {
    if templates.is_empty() {
        return Err(BmcmError::NoTemplates);
    }
    config.validate()?;
    let null = step1_null(dataset, config.alpha)?;
    let halted = !null.gate_passed && !config.ignore_gate;
    let models: Vec<ModelEntry> = if halted {
        Vec::new()
    } else {
        templates
            .par_iter()
            .map(|t| analyze_model(dataset, t, config, &null))
            .collect()
    };
    let slot_tests = models
        .iter()
        .filter_map(|m| m.report.as_ref())
        .map(|r| r.decisions.len())
        .sum();
    Ok(AnalysisReport {
        format_version: REPORT_FORMAT_VERSION,
        config: config.clone(),
        dataset: DatasetSummary {
            n: dataset.n(),
            columns: dataset.columns().to_vec(),
            outcome: dataset.outcome().to_string(),
        },
        null,
        halted,
        models,
        slot_tests,
    })
}

/// `value` with two significant digits, e.g. `1.6e-10`. Falls back to the
/// logarithm when the value underflowed.
pub fn sci(value: f64, log10: Option<f64>) -> String {
    if value > 0.0 && value.is_normal() || value == 0.0 && log10.is_none() {
        return format!("{value:.1e}");
    }
    match log10 {
        Some(lg) if lg.is_finite() => {
            let mut exponent = lg.floor();
            let mut mantissa = 10f64.powf(lg - exponent);
            if (mantissa * 10.0).round() >= 100.0 {
                mantissa /= 10.0;
                exponent += 1.0;
            }
            format!("{mantissa:.1}e{exponent}")
        }
        _ => format!("{value:.1e}"),
    }
}

fn fmt_test(label: &str, test: &TestResult) -> String {
    format!(
        "{label} chi2={}, p={}",
        sci(test.statistic, None),
        sci(test.p_value, Some(test.log10_p_value))
    )
}

fn fmt_p(test: &TestResult) -> String {
    sci(test.p_value, Some(test.log10_p_value))
}

fn write_table(out: &mut String, rows: [&str; 2], table: &Table2x2) {
    let width = rows.iter().map(|r| r.len()).max().unwrap_or(0);
    let _ = writeln!(out, "  {:width$}  {:>8}  {:>8}", "", "out=1", "out=0");
    let _ = writeln!(out, "  {:width$}  {:>8}  {:>8}", rows[0], table.a, table.b);
    let _ = writeln!(out, "  {:width$}  {:>8}  {:>8}", rows[1], table.c, table.d);
}

fn decision_line(d: &SlotDecision) -> String {
    let verdict = match d.choice {
        Choice::And => "and",
        Choice::Or => "or",
        Choice::Inconclusive => "no bias",
    };
    let mut line = format!(
        "  slot {}: {verdict} (faithful{}",
        d.slot,
        fmt_test("", &d.faithful_test)
    );
    if let Some(u) = &d.unfaithful_test {
        line.push_str(&format!("; unfaithful{}", fmt_test("", u)));
    }
    line.push(')');
    if d.corroborated {
        line.push_str(", corroborated");
    }
    line
}

/// Plain-text rendering of a report.
pub fn render_text(report: &AnalysisReport) -> String {
    let mut out = String::new();
    let null = &report.null;
    let _ = writeln!(out, "Null data analysis (n = {})", report.dataset.n);
    write_table(&mut out, ["all 1", "all 0"], &null.table);
    let _ = writeln!(
        out,
        "  {}; Fisher p={}",
        fmt_test("corrected", &null.chisq).trim_start(),
        fmt_p(&null.fisher)
    );
    let _ = writeln!(
        out,
        "  gate: {}",
        if null.gate_passed { "passed" } else { "failed" }
    );
    if let Some(w) = &null.warning {
        let _ = writeln!(out, "  warning: {w}");
    }
    if report.halted {
        let _ = writeln!(out, "\nAnalysis halted at the null-data gate.");
        return out;
    }
    for entry in &report.models {
        let _ = writeln!(out, "\nModel: {}", entry.template);
        if let Some(r) = &entry.report {
            for d in &r.decisions {
                let _ = writeln!(out, "{}", decision_line(d));
            }
            match &r.resolved {
                Some(a) => {
                    let _ = writeln!(out, "  resolved: {a}");
                }
                None => {
                    let _ = writeln!(out, "  unresolved");
                }
            }
        }
        if let Some(fin) = &entry.final_report {
            let _ = writeln!(out, "  Contingency table over all rows:");
            write_table(&mut out, ["f=1", "f=0"], &fin.table);
            let _ = writeln!(
                out,
                "  {}; Fisher p={}",
                fmt_test("corrected", &fin.chisq).trim_start(),
                fmt_p(&fin.fisher)
            );
            if let (Some(sens), Some(spec)) = (fin.sensitivity, fin.specificity) {
                let _ = writeln!(out, "  sensitivity={sens:.3}, specificity={spec:.3}");
            }
        }
        if let Some(err) = &entry.error {
            let _ = writeln!(out, "  error: {err}");
        }
    }
    let _ = writeln!(out, "\nslot tests performed: {}", report.slot_tests);
    out
}
