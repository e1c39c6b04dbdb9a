//! C ABI over the `bmcm` library.
//!
//! Datasets, templates and reports cross the boundary as opaque handles that
//! the caller releases with the matching `*_free` function. Every fallible
//! call returns a [`BmcmStatus`]; on failure a description is available from
//! [`bmcm_last_error_message`] on the same thread. Strings returned by this
//! library must be released with [`bmcm_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fs::File;
use std::io::BufReader;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use bmcm::data::{generate_dependent, generate_random, load_csv};
use bmcm::expr::{ModelTemplate, Operator, OperatorAssignment};
use bmcm::pipeline::{render_text, run_full, AnalysisConfig, AnalysisReport};
use bmcm::stats::{binomial_chisq, chi2_sf, contingency_chisq, fisher_exact, Table2x2, TestResult};
use bmcm::{BmcmError, Dataset, TrialMode};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BmcmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Template text could not be parsed.
    Syntax = 3,
    /// Template or assignment does not fit the data.
    InvalidModel = 4,
    /// CSV content or dataset size is invalid.
    InvalidData = 5,
    /// A numeric argument is out of range.
    InvalidArgument = 6,
    /// Too many slots for exhaustive enumeration.
    Capacity = 7,
    /// A test is undefined for the given counts.
    Degenerate = 8,
    /// The null-data gate is inapplicable or failed.
    Gate = 9,
    Io = 10,
    Panic = 99,
}

impl From<&BmcmError> for BmcmStatus {
    fn from(err: &BmcmError) -> Self {
        use BmcmError::*;
        match err {
            Syntax { .. } | DuplicateSlot(_) | SlotOutOfRange { .. } | VariableIsTarget(_) => {
                BmcmStatus::Syntax
            }
            MissingVariable(_)
            | AssignmentLength { .. }
            | UnsupportedArity(_)
            | TargetMismatch { .. }
            | NoTemplates => BmcmStatus::InvalidModel,
            MissingHeader
            | DuplicateColumn(_)
            | NonBinaryCell { .. }
            | UnknownOutcome(_)
            | RaggedRow { .. }
            | EmptyDataset
            | InvalidSize { .. }
            | Csv(_) => BmcmStatus::InvalidData,
            Domain(_) | UnsupportedDof(_) | InvalidAlpha(_) | InvalidTrials => {
                BmcmStatus::InvalidArgument
            }
            Capacity { .. } => BmcmStatus::Capacity,
            UndefinedTest | DegenerateTable | UndecidableSlot(_) => BmcmStatus::Degenerate,
            GateInapplicable { .. } | GateNotPassed { .. } => BmcmStatus::Gate,
            Io(_) => BmcmStatus::Io,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: impl Into<String>) {
    let message = CString::new(message.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(message));
}

fn clear_last_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

fn fail(status: BmcmStatus, message: impl Into<String>) -> BmcmStatus {
    set_last_error(message);
    status
}

/// Run `body`, converting errors and panics into status codes.
fn guard<F>(body: F) -> BmcmStatus
where
    F: FnOnce() -> Result<(), BmcmStatus>,
{
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => BmcmStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => fail(BmcmStatus::Panic, "internal panic"),
    }
}

fn lib_err(err: BmcmError) -> BmcmStatus {
    let status = BmcmStatus::from(&err);
    fail(status, err.to_string())
}

unsafe fn str_arg<'a>(ptr: *const c_char, name: &str) -> Result<&'a str, BmcmStatus> {
    if ptr.is_null() {
        return Err(fail(BmcmStatus::NullPointer, format!("`{name}` is null")));
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        fail(
            BmcmStatus::InvalidUtf8,
            format!("`{name}` is not valid UTF-8"),
        )
    })
}

unsafe fn ref_arg<'a, T>(ptr: *const T, name: &str) -> Result<&'a T, BmcmStatus> {
    ptr.as_ref()
        .ok_or_else(|| fail(BmcmStatus::NullPointer, format!("`{name}` is null")))
}

unsafe fn write_out<T>(out: *mut T, value: T, name: &str) -> Result<(), BmcmStatus> {
    if out.is_null() {
        return Err(fail(BmcmStatus::NullPointer, format!("`{name}` is null")));
    }
    out.write(value);
    Ok(())
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).map_or(ptr::null_mut(), CString::into_raw)
}

/// Opaque binary dataset.
pub struct BmcmDataset(Dataset);

/// Opaque parsed model template.
pub struct BmcmTemplate(ModelTemplate);

/// Opaque analysis report.
pub struct BmcmReport(AnalysisReport);

/// Mirror of a test result.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct BmcmTestResult {
    pub statistic: f64,
    pub p_value: f64,
    pub log10_p_value: f64,
    pub dof: u32,
}

impl From<TestResult> for BmcmTestResult {
    fn from(r: TestResult) -> Self {
        BmcmTestResult {
            statistic: r.statistic,
            p_value: r.p_value,
            log10_p_value: r.log10_p_value,
            dof: r.dof,
        }
    }
}

/// Analysis settings. Obtain defaults from [`bmcm_config_default`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BmcmConfig {
    /// Sample assignments instead of enumerating all of them.
    pub sampled: bool,
    /// Trials per row when `sampled` is set.
    pub trials_per_row: u64,
    pub seed: u64,
    pub alpha: f64,
    pub include_null_in_step2: bool,
    pub ignore_gate: bool,
}

impl From<&BmcmConfig> for AnalysisConfig {
    fn from(c: &BmcmConfig) -> Self {
        AnalysisConfig {
            trials: if c.sampled {
                TrialMode::Sampled {
                    trials_per_row: c.trials_per_row,
                }
            } else {
                TrialMode::Exhaustive
            },
            seed: c.seed,
            alpha: c.alpha,
            include_null_in_step2: c.include_null_in_step2,
            ignore_gate: c.ignore_gate,
        }
    }
}

/// Message for the last failed call on this thread, or NULL. The caller owns
/// the returned string.
#[no_mangle]
pub extern "C" fn bmcm_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(ptr::null_mut(), |msg| msg.clone().into_raw())
    })
}

/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bmcm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[no_mangle]
pub extern "C" fn bmcm_config_default() -> BmcmConfig {
    let d = AnalysisConfig::default();
    BmcmConfig {
        sampled: false,
        trials_per_row: 1024,
        seed: d.seed,
        alpha: d.alpha,
        include_null_in_step2: d.include_null_in_step2,
        ignore_gate: d.ignore_gate,
    }
}

/// Load a CSV file.
///
/// # Safety
/// `path` and `outcome` must be NUL-terminated strings; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn bmcm_dataset_from_csv_path(
    path: *const c_char,
    outcome: *const c_char,
    out: *mut *mut BmcmDataset,
) -> BmcmStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        let outcome = str_arg(outcome, "outcome")?;
        let file = File::open(path).map_err(|e| fail(BmcmStatus::Io, format!("{path}: {e}")))?;
        let ds = load_csv(BufReader::new(file), outcome).map_err(lib_err)?;
        write_out(out, Box::into_raw(Box::new(BmcmDataset(ds))), "out")
    })
}

/// Parse CSV content held in memory.
///
/// # Safety
/// `data` must point to `len` readable bytes; `outcome` must be a
/// NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bmcm_dataset_from_csv_bytes(
    data: *const u8,
    len: usize,
    outcome: *const c_char,
    out: *mut *mut BmcmDataset,
) -> BmcmStatus {
    guard(|| {
        if data.is_null() && len > 0 {
            return Err(fail(BmcmStatus::NullPointer, "`data` is null"));
        }
        let bytes = if len == 0 {
            &[][..]
        } else {
            std::slice::from_raw_parts(data, len)
        };
        let outcome = str_arg(outcome, "outcome")?;
        let ds = load_csv(bytes, outcome).map_err(lib_err)?;
        write_out(out, Box::into_raw(Box::new(BmcmDataset(ds))), "out")
    })
}

/// Independent fair-coin cohort with columns x1, x2, x3, xO.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bmcm_dataset_generate_random(
    n: usize,
    seed: u64,
    out: *mut *mut BmcmDataset,
) -> BmcmStatus {
    guard(|| {
        let ds = generate_random(n, seed).map_err(lib_err)?;
        write_out(out, Box::into_raw(Box::new(BmcmDataset(ds))), "out")
    })
}

/// Cohort with xO = x1 (exactly n/2 ones); `n` must be even.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bmcm_dataset_generate_dependent(
    n: usize,
    seed: u64,
    out: *mut *mut BmcmDataset,
) -> BmcmStatus {
    guard(|| {
        let ds = generate_dependent(n, seed).map_err(lib_err)?;
        write_out(out, Box::into_raw(Box::new(BmcmDataset(ds))), "out")
    })
}

/// Row count, or 0 for NULL.
///
/// # Safety
/// `dataset` must be NULL or a live dataset handle.
#[no_mangle]
pub unsafe extern "C" fn bmcm_dataset_rows(dataset: *const BmcmDataset) -> usize {
    dataset.as_ref().map_or(0, |d| d.0.n())
}

/// Serialize as CSV; the caller owns the returned string. NULL on failure.
///
/// # Safety
/// `dataset` must be NULL or a live dataset handle.
#[no_mangle]
pub unsafe extern "C" fn bmcm_dataset_to_csv(dataset: *const BmcmDataset) -> *mut c_char {
    let Some(ds) = dataset.as_ref() else {
        return ptr::null_mut();
    };
    let mut buf = Vec::new();
    match ds.0.write_csv(&mut buf) {
        Ok(()) => into_c_string(String::from_utf8_lossy(&buf).into_owned()),
        Err(_) => ptr::null_mut(),
    }
}

/// # Safety
/// `dataset` must be NULL or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bmcm_dataset_free(dataset: *mut BmcmDataset) {
    if !dataset.is_null() {
        drop(Box::from_raw(dataset));
    }
}

/// Parse template text such as `"x1 ? x2 ? x3 = xO"`.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bmcm_template_parse(
    text: *const c_char,
    out: *mut *mut BmcmTemplate,
) -> BmcmStatus {
    guard(|| {
        let text = str_arg(text, "text")?;
        let t = ModelTemplate::parse(text).map_err(lib_err)?;
        write_out(out, Box::into_raw(Box::new(BmcmTemplate(t))), "out")
    })
}

/// # Safety
/// `template` must be NULL or a live template handle.
#[no_mangle]
pub unsafe extern "C" fn bmcm_template_slot_count(template: *const BmcmTemplate) -> usize {
    template.as_ref().map_or(0, |t| t.0.slot_count())
}

/// Canonical text; the caller owns the returned string.
///
/// # Safety
/// `template` must be NULL or a live template handle.
#[no_mangle]
pub unsafe extern "C" fn bmcm_template_to_string(template: *const BmcmTemplate) -> *mut c_char {
    template
        .as_ref()
        .map_or(ptr::null_mut(), |t| into_c_string(t.0.to_string()))
}

/// Evaluate on one dataset row. `ops[i]` fills slot `i + 1`: 0 = and,
/// 1 = or.
///
/// # Safety
/// `template` and `dataset` must be live handles; `ops` must point to
/// `n_ops` readable bytes (may be NULL when `n_ops` is 0); `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn bmcm_template_evaluate(
    template: *const BmcmTemplate,
    dataset: *const BmcmDataset,
    row: usize,
    ops: *const u8,
    n_ops: usize,
    out: *mut bool,
) -> BmcmStatus {
    guard(|| {
        let t = ref_arg(template, "template")?;
        let ds = ref_arg(dataset, "dataset")?;
        if row >= ds.0.n() {
            return Err(fail(
                BmcmStatus::InvalidArgument,
                format!("row {row} out of range"),
            ));
        }
        if ops.is_null() && n_ops > 0 {
            return Err(fail(BmcmStatus::NullPointer, "`ops` is null"));
        }
        let raw = if n_ops == 0 {
            &[][..]
        } else {
            std::slice::from_raw_parts(ops, n_ops)
        };
        let ops = raw
            .iter()
            .map(|&b| match b {
                0 => Ok(Operator::And),
                1 => Ok(Operator::Or),
                other => Err(fail(
                    BmcmStatus::InvalidArgument,
                    format!("operator code {other} is not 0 or 1"),
                )),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let value =
            t.0.evaluate(&OperatorAssignment::new(ops), &ds.0.row(row))
                .map_err(lib_err)?;
        write_out(out, value, "out")
    })
}

/// # Safety
/// `template` must be NULL or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bmcm_template_free(template: *mut BmcmTemplate) {
    if !template.is_null() {
        drop(Box::from_raw(template));
    }
}

/// Binomial chi-square of `H0: p = 1/2` on two counts.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bmcm_binomial_chisq(
    count_and: u64,
    count_or: u64,
    out: *mut BmcmTestResult,
) -> BmcmStatus {
    guard(|| {
        let r = binomial_chisq(count_and, count_or).map_err(lib_err)?;
        write_out(out, r.into(), "out")
    })
}

/// 2x2 chi-square; `corrected` applies the continuity correction.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bmcm_contingency_chisq(
    a: u64,
    b: u64,
    c: u64,
    d: u64,
    corrected: bool,
    out: *mut BmcmTestResult,
) -> BmcmStatus {
    guard(|| {
        let r = contingency_chisq(&Table2x2::new(a, b, c, d), corrected).map_err(lib_err)?;
        write_out(out, r.into(), "out")
    })
}

/// Two-sided Fisher exact test.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bmcm_fisher_exact(
    a: u64,
    b: u64,
    c: u64,
    d: u64,
    out: *mut BmcmTestResult,
) -> BmcmStatus {
    guard(|| write_out(out, fisher_exact(&Table2x2::new(a, b, c, d)).into(), "out"))
}

/// Chi-square(1) survival function.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bmcm_chi2_sf(x: f64, out: *mut f64) -> BmcmStatus {
    guard(|| {
        let p = chi2_sf(x, 1).map_err(lib_err)?;
        write_out(out, p, "out")
    })
}

/// Run all three steps. `templates` holds `n_templates` template handles.
/// A failed gate is not an error: inspect [`bmcm_report_halted`].
///
/// # Safety
/// `dataset` must be a live handle, `templates` must point to
/// `n_templates` live template handles, `config` may be NULL for defaults,
/// and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bmcm_analyze(
    dataset: *const BmcmDataset,
    templates: *const *const BmcmTemplate,
    n_templates: usize,
    config: *const BmcmConfig,
    out: *mut *mut BmcmReport,
) -> BmcmStatus {
    guard(|| {
        let ds = ref_arg(dataset, "dataset")?;
        if templates.is_null() && n_templates > 0 {
            return Err(fail(BmcmStatus::NullPointer, "`templates` is null"));
        }
        let handles = if n_templates == 0 {
            &[][..]
        } else {
            std::slice::from_raw_parts(templates, n_templates)
        };
        let models = handles
            .iter()
            .map(|&h| ref_arg(h, "templates[i]").map(|t| t.0.clone()))
            .collect::<Result<Vec<_>, _>>()?;
        let config = config
            .as_ref()
            .map_or_else(AnalysisConfig::default, AnalysisConfig::from);
        let report = run_full(&ds.0, &models, &config).map_err(lib_err)?;
        write_out(out, Box::into_raw(Box::new(BmcmReport(report))), "out")
    })
}

/// # Safety
/// `report` must be NULL or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn bmcm_report_gate_passed(report: *const BmcmReport) -> bool {
    report.as_ref().is_some_and(|r| r.0.null.gate_passed)
}

/// True when steps 2 and 3 were skipped because the gate failed.
///
/// # Safety
/// `report` must be NULL or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn bmcm_report_halted(report: *const BmcmReport) -> bool {
    report.as_ref().is_some_and(|r| r.0.halted)
}

/// # Safety
/// `report` must be NULL or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn bmcm_report_model_count(report: *const BmcmReport) -> usize {
    report.as_ref().map_or(0, |r| r.0.models.len())
}

/// Write model `index`'s resolved operators (0 = and, 1 = or) to `ops`.
/// `*resolved` is false when the model has no resolved assignment, and
/// `ops` is left untouched.
///
/// # Safety
/// `report` must be a live handle; `ops` must have room for `capacity`
/// bytes; `resolved` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bmcm_report_resolved(
    report: *const BmcmReport,
    index: usize,
    ops: *mut u8,
    capacity: usize,
    resolved: *mut bool,
) -> BmcmStatus {
    guard(|| {
        let r = ref_arg(report, "report")?;
        let entry = r.0.models.get(index).ok_or_else(|| {
            fail(
                BmcmStatus::InvalidArgument,
                format!("model {index} out of range"),
            )
        })?;
        let assignment = entry.report.as_ref().and_then(|m| m.resolved.as_ref());
        let Some(assignment) = assignment else {
            return write_out(resolved, false, "resolved");
        };
        if assignment.len() > capacity {
            return Err(fail(
                BmcmStatus::InvalidArgument,
                "`ops` capacity too small",
            ));
        }
        if ops.is_null() && !assignment.is_empty() {
            return Err(fail(BmcmStatus::NullPointer, "`ops` is null"));
        }
        for (i, op) in assignment.ops().iter().enumerate() {
            ops.add(i).write(u8::from(*op == Operator::Or));
        }
        write_out(resolved, true, "resolved")
    })
}

/// Step-3 table of model `index` as `a, b, c, d`; fails when the model has
/// no final table.
///
/// # Safety
/// `report` must be a live handle; `cells` must have room for 4 values.
#[no_mangle]
pub unsafe extern "C" fn bmcm_report_final_table(
    report: *const BmcmReport,
    index: usize,
    cells: *mut u64,
) -> BmcmStatus {
    guard(|| {
        let r = ref_arg(report, "report")?;
        let table =
            r.0.models
                .get(index)
                .and_then(|m| m.final_report.as_ref())
                .map(|f| f.table)
                .ok_or_else(|| {
                    fail(
                        BmcmStatus::InvalidArgument,
                        format!("model {index} has no final table"),
                    )
                })?;
        if cells.is_null() {
            return Err(fail(BmcmStatus::NullPointer, "`cells` is null"));
        }
        for (i, v) in [table.a, table.b, table.c, table.d].into_iter().enumerate() {
            cells.add(i).write(v);
        }
        Ok(())
    })
}

/// JSON report; the caller owns the returned string.
///
/// # Safety
/// `report` must be NULL or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn bmcm_report_to_json(report: *const BmcmReport) -> *mut c_char {
    report
        .as_ref()
        .map_or(ptr::null_mut(), |r| into_c_string(r.0.to_json()))
}

/// Plain-text report; the caller owns the returned string.
///
/// # Safety
/// `report` must be NULL or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn bmcm_report_to_text(report: *const BmcmReport) -> *mut c_char {
    report
        .as_ref()
        .map_or(ptr::null_mut(), |r| into_c_string(render_text(&r.0)))
}

/// # Safety
/// `report` must be NULL or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bmcm_report_free(report: *mut BmcmReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}
