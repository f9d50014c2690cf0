//! Command dispatch for the `lucas3` binary.
//!
//! [`run`] never prints; it returns the exit status together with the text
//! meant for stdout and stderr so callers and tests can inspect both.

mod config;
mod render;
mod report;

use clap::Parser;
use lucas3::identities::IdentityGrid;
use lucas3::period::PeriodSource;
use lucas3::predictor::flags_for_case;
use lucas3::sequence::eval_exact;
use lucas3::valuation::ord3_exact_oracle;
use lucas3::{
    census_with, classify, omega, ord3, period_bruteforce_with, period_closed, run_identity_suite,
    stability_report, verify_with, Branch, DiscrepancyFlag, LucasError, LucasParams, Modulus3Pow,
    Predictor, SearchOptions, SequenceKind, TheoremCase, K_MAX,
};

pub use config::{Command, KRange, KindArg, OutputFormat, RunConfig};
pub use report::{PredictionPayload, Report, ReportRow, Status};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn failure(code: i32, message: String) -> Self {
        Outcome {
            code,
            stdout: String::new(),
            stderr: message,
        }
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Resource(String),
}

impl From<LucasError> for Failure {
    fn from(e: LucasError) -> Self {
        match e {
            LucasError::BudgetExceeded { .. } | LucasError::IndexOutOfRange { .. } => {
                Failure::Resource(e.to_string())
            }
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type Step<T> = std::result::Result<T, Failure>;

/// Parses `args` (including the program name) and runs the command.
pub fn run_from_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match RunConfig::try_parse_from(args) {
        Ok(config) => run(&config),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome::failure(code, text)
            }
        }
    }
}

pub fn run(config: &RunConfig) -> Outcome {
    let rows = match execute(config) {
        Ok(rows) => rows,
        Err(Failure::Usage(msg)) => return Outcome::failure(EXIT_USAGE, format!("error: {msg}\n")),
        Err(Failure::Resource(msg)) => {
            return Outcome::failure(EXIT_RESOURCE, format!("error: {msg}\n"))
        }
    };
    let code = if rows.iter().any(|r| r.status == Status::Mismatch) {
        EXIT_MISMATCH
    } else {
        EXIT_OK
    };
    let report = Report {
        command: config.command.as_str().to_string(),
        rows,
    };
    match render::render(&report, config.format) {
        Ok(stdout) => Outcome {
            code,
            stdout,
            stderr: String::new(),
        },
        Err(msg) => Outcome::failure(EXIT_USAGE, format!("error: {msg}\n")),
    }
}

struct Ctx<'a> {
    config: &'a RunConfig,
    params: LucasParams,
    options: SearchOptions,
}

impl Ctx<'_> {
    fn k_range(&self) -> Step<KRange> {
        let range = self.config.k.ok_or_else(|| {
            Failure::Usage(format!("{} requires --k", self.config.command.as_str()))
        })?;
        if range.end > self.config.kmax {
            return Err(LucasError::ExponentTooLarge {
                k: range.end,
                cap: self.config.kmax,
            }
            .into());
        }
        Ok(range)
    }

    fn modulus(&self, k: u32) -> Step<Modulus3Pow> {
        Ok(Modulus3Pow::with_cap(k, self.config.kmax)?)
    }

    fn row(&self, status: Status) -> ReportRow {
        ReportRow::new(self.config.command.as_str(), self.params, status)
    }

    fn require_n(&self) -> Step<i64> {
        self.config
            .n
            .ok_or_else(|| Failure::Usage(format!("{} requires --n", self.config.command.as_str())))
    }

    /// `None` when the predictor does not apply to this `P`.
    fn case(&self, m: &Modulus3Pow) -> Option<TheoremCase> {
        classify(self.params, m).ok()
    }
}

fn execute(config: &RunConfig) -> Step<Vec<ReportRow>> {
    if config.budget == 0 {
        return Err(Failure::Usage("--budget must be positive".into()));
    }
    if config.kmax == 0 || config.kmax > K_MAX {
        return Err(Failure::Usage(format!("--kmax must lie in 1..={K_MAX}")));
    }
    let params = LucasParams::new(config.p)?;
    let mut options = SearchOptions::with_budget(config.budget);
    if let Some(len) = config.chunk {
        options = options.chunked(len);
    }
    let ctx = Ctx {
        config,
        params,
        options,
    };
    match config.command {
        Command::Eval => eval_rows(&ctx),
        Command::Valuation => valuation_rows(&ctx),
        Command::Period => period_rows(&ctx),
        Command::Census => census_rows(&ctx),
        Command::Predict => predict_rows(&ctx),
        Command::Verify => verify_rows(&ctx),
        Command::Omega => omega_rows(&ctx),
        Command::Stability => stability_rows(&ctx),
        Command::Identities => identity_rows(&ctx),
    }
}

fn eval_rows(ctx: &Ctx) -> Step<Vec<ReportRow>> {
    let n = ctx.require_n()?;
    let mut rows = Vec::new();
    for &kind in ctx.config.kind.kinds() {
        match ctx.config.k {
            None => {
                let mut row = ctx.row(Status::Ok).at(kind, None);
                row.n = Some(n);
                row.value = Some(eval_exact(ctx.params, kind, n)?.to_string());
                rows.push(row);
            }
            Some(_) => {
                for k in ctx.k_range()?.iter() {
                    let m = ctx.modulus(k)?;
                    let mut row = ctx.row(Status::Ok).at(kind, Some(k));
                    row.n = Some(n);
                    row.value = Some(lucas3::eval_mod(ctx.params, kind, n as i128, &m).to_string());
                    rows.push(row);
                }
            }
        }
    }
    Ok(rows)
}

fn valuation_rows(ctx: &Ctx) -> Step<Vec<ReportRow>> {
    let n = ctx.require_n()?;
    if n < 0 {
        return Err(Failure::Usage("valuation requires --n >= 0".into()));
    }
    let mut rows = Vec::new();
    for &kind in ctx.config.kind.kinds() {
        let closed = ord3(ctx.params, kind, n as u64)?.0;
        let oracle = match ord3_exact_oracle(ctx.params, kind, n) {
            Ok(v) => Some(v.0),
            Err(LucasError::IndexOutOfRange { .. }) => None,
            Err(e) => return Err(e.into()),
        };
        let status = match oracle {
            Some(o) if o != closed => Status::Mismatch,
            _ => Status::Ok,
        };
        let mut row = ctx.row(status).at(kind, None);
        row.n = Some(n);
        row.valuation = Some(closed);
        row.valuation_oracle = oracle;
        row.discrepancy_flags = vec![DiscrepancyFlag::ValuationFormula];
        rows.push(row);
    }
    Ok(rows)
}

fn period_flags(params: LucasParams) -> Vec<DiscrepancyFlag> {
    match lucas3::delta_of(params).branch {
        Branch::NotDivisible3 => vec![DiscrepancyFlag::PeriodConstant],
        Branch::Divisible3 => Vec::new(),
    }
}

fn period_rows(ctx: &Ctx) -> Step<Vec<ReportRow>> {
    let mut rows = Vec::new();
    for &kind in ctx.config.kind.kinds() {
        for k in ctx.k_range()?.iter() {
            let m = ctx.modulus(k)?;
            let mut row = match period_closed(ctx.params, kind, &m) {
                Ok(res) => {
                    let mut row = ctx.row(Status::Ok);
                    row.period = Some(res.h);
                    row.period_source = Some(res.source);
                    row
                }
                Err(LucasError::UnsupportedRange { .. }) => {
                    let res = period_bruteforce_with(ctx.params, kind, &m, ctx.options)?;
                    let mut row = ctx.row(Status::UnsupportedClosedForm);
                    row.period = Some(res.h);
                    row.period_source = Some(res.source);
                    row
                }
                Err(e) => return Err(e.into()),
            };
            row = row.at(kind, Some(k));
            row.case = ctx.case(&m);
            row.discrepancy_flags = period_flags(ctx.params);
            rows.push(row);
        }
    }
    Ok(rows)
}

fn census_rows(ctx: &Ctx) -> Step<Vec<ReportRow>> {
    let mut rows = Vec::new();
    for &kind in ctx.config.kind.kinds() {
        for k in ctx.k_range()?.iter() {
            let m = ctx.modulus(k)?;
            let c = census_with(ctx.params, kind, &m, ctx.options)?;
            let mut row = ctx.row(Status::Ok).at(kind, Some(k));
            row.case = ctx.case(&m);
            row.period = Some(c.period());
            row.period_source = Some(PeriodSource::BruteForce);
            row.histogram = Some(c.histogram().clone());
            rows.push(row);
        }
    }
    Ok(rows)
}

/// The predictor refuses `P <= 0` outright, independent of `k`.
fn require_predictor_domain(ctx: &Ctx) -> Step<()> {
    if ctx.params.p() <= 0 {
        return Err(LucasError::UnsupportedParameter { p: ctx.params.p() }.into());
    }
    Ok(())
}

/// Row for `k < δ`: census in place of a prediction.
fn empirical_row(ctx: &Ctx, kind: SequenceKind, k: u32, m: &Modulus3Pow) -> Step<ReportRow> {
    let c = census_with(ctx.params, kind, m, ctx.options)?;
    let mut row = ctx.row(Status::Empirical).at(kind, Some(k));
    row.case = Some(TheoremCase::Unsupported);
    row.period = Some(c.period());
    row.period_source = Some(PeriodSource::BruteForce);
    row.histogram = Some(c.histogram().clone());
    Ok(row)
}

fn predict_rows(ctx: &Ctx) -> Step<Vec<ReportRow>> {
    require_predictor_domain(ctx)?;
    let mut rows = Vec::new();
    for &kind in ctx.config.kind.kinds() {
        for k in ctx.k_range()?.iter() {
            let m = ctx.modulus(k)?;
            if classify(ctx.params, &m)? == TheoremCase::Unsupported {
                rows.push(empirical_row(ctx, kind, k, &m)?);
                continue;
            }
            let predictor = Predictor::new(ctx.params, kind, &m)?;
            let mut row = ctx.row(Status::Ok).at(kind, Some(k));
            row.case = Some(predictor.case());
            row.period = Some(period_closed(ctx.params, kind, &m)?.h);
            row.period_source = Some(PeriodSource::ClosedForm);
            row.prediction = Some(match ctx.config.b {
                Some(b) => PredictionPayload::Residue {
                    residue: b,
                    prediction: predictor.predict(b)?,
                },
                None => PredictionPayload::Histogram(predictor.histogram()),
            });
            row.discrepancy_flags = flags_for_case(predictor.case());
            rows.push(row);
        }
    }
    Ok(rows)
}

fn verify_rows(ctx: &Ctx) -> Step<Vec<ReportRow>> {
    require_predictor_domain(ctx)?;
    let mut rows = Vec::new();
    for &kind in ctx.config.kind.kinds() {
        for k in ctx.k_range()?.iter() {
            let m = ctx.modulus(k)?;
            if classify(ctx.params, &m)? == TheoremCase::Unsupported {
                rows.push(empirical_row(ctx, kind, k, &m)?);
                continue;
            }
            let report = verify_with(ctx.params, kind, &m, ctx.options)?;
            let status = if report.passed() {
                Status::Ok
            } else {
                Status::Mismatch
            };
            let mut row = ctx.row(status).at(kind, Some(k));
            row.case = Some(report.case);
            row.period = Some(report.period);
            row.period_source = Some(PeriodSource::BruteForce);
            row.alternate_reading_mismatches = report.alternate_reading_mismatches;
            row.discrepancy_flags = report.discrepancy_flags;
            row.diffs = Some(report.diffs);
            rows.push(row);
        }
    }
    Ok(rows)
}

fn omega_rows(ctx: &Ctx) -> Step<Vec<ReportRow>> {
    let mut rows = Vec::new();
    for &kind in ctx.config.kind.kinds() {
        for k in ctx.k_range()?.iter() {
            let m = ctx.modulus(k)?;
            let c = census_with(ctx.params, kind, &m, ctx.options)?;
            let mut row = ctx.row(Status::Ok).at(kind, Some(k));
            row.case = ctx.case(&m);
            row.period = Some(c.period());
            row.period_source = Some(PeriodSource::BruteForce);
            row.omega = Some(omega(&c));
            rows.push(row);
        }
    }
    Ok(rows)
}

fn stability_rows(ctx: &Ctx) -> Step<Vec<ReportRow>> {
    let range = ctx.k_range()?;
    let mut rows = Vec::new();
    for &kind in ctx.config.kind.kinds() {
        let report = stability_report(ctx.params, kind, range.start..=range.end, ctx.options)?;
        for (i, entry) in report.entries.into_iter().enumerate() {
            let m = ctx.modulus(entry.k)?;
            let mut row = ctx.row(Status::Ok).at(kind, Some(entry.k));
            row.case = ctx.case(&m);
            row.period = Some(entry.period);
            row.period_source = Some(PeriodSource::BruteForce);
            row.omega = Some(entry.omega);
            row.differs_from_previous = i.checked_sub(1).map(|j| report.transitions[j].differs);
            rows.push(row);
        }
    }
    Ok(rows)
}

fn identity_rows(ctx: &Ctx) -> Step<Vec<ReportRow>> {
    if ctx.config.radius < 0 {
        return Err(Failure::Usage("--radius must be nonnegative".into()));
    }
    let grid = IdentityGrid {
        radius: ctx.config.radius,
        ..IdentityGrid::default()
    };
    let report = run_identity_suite(ctx.params, grid)?;
    let status = if report.all_hold() {
        Status::Ok
    } else {
        Status::Mismatch
    };
    let mut row = ctx.row(status);
    row.identities = Some(report.tallies);
    Ok(vec![row])
}
