//! Named, deterministic reports behind the command-line tool.
//!
//! Every command turns a [`RunConfig`] into a [`Report`] holding a JSON body,
//! a plain-text rendering and, where a table makes sense, CSV. Nothing here
//! depends on the argument parser, so the same reports are reachable from
//! the library and the C interface.

use std::fmt::Write as _;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize};
use serde_json::{json, Value};

use crate::convergence::{
    coincidence_report, escaped_mass, extended_limit, inconsistency_demo, tightness_check, CoincidenceReport,
    EscapeAccount, Ladder, LimitConfig, TightnessOutcome, TightnessVerdict, DEFAULT_WINDOW,
};
use crate::error::{Error, Result};
use crate::events::{EventRule, EventSet};
use crate::extreal::{format_rational, parse_rational, ExtendedReal};
use crate::families::{binomial, default_k_max, poisson_truncated, record_index, MeasureFamily, TailPolicy};
use crate::measure::{tv_distance, DiscreteMeasure, Mass};
use crate::oracle::{
    check_identity, closed_form_pmfs, enumerate_exact, partition_check, pmf_table, simulate, write_pmf_csv,
    IdentityMode, PmfRow, Variable, DEFAULT_WORKERS,
};
use crate::uncertain::{transmission_range, DigitPrefix};

pub const SCHEMA_VERSION: u32 = 1;

/// Example ids with a report. `ex12` needs continuous measures and is not
/// among them.
pub const EXAMPLE_IDS: [&str; 14] = [
    "ex1", "ex2", "ex3", "ex4", "ex5", "ex6", "ex7", "ex8", "ex9", "ex10", "ex11", "ex13", "ex14", "ex15",
];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
    Csv,
}

fn rational_from_json<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigRational, D::Error> {
    match Value::deserialize(d)? {
        Value::String(s) => parse_rational(&s).map_err(serde::de::Error::custom),
        Value::Number(n) => parse_rational(&n.to_string()).map_err(serde::de::Error::custom),
        other => Err(serde::de::Error::custom(format!("expected a rational, got {other}"))),
    }
}

fn opt_rational_from_json<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<BigRational>, D::Error> {
    match Value::deserialize(d)? {
        Value::Null => Ok(None),
        Value::String(s) => parse_rational(&s).map(Some).map_err(serde::de::Error::custom),
        Value::Number(n) => parse_rational(&n.to_string()).map(Some).map_err(serde::de::Error::custom),
        other => Err(serde::de::Error::custom(format!("expected a rational, got {other}"))),
    }
}

/// Parameters shared by every command. Unused fields are ignored.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    #[serde(deserialize_with = "rational_from_json")]
    pub q: BigRational,
    #[serde(deserialize_with = "rational_from_json")]
    pub c: BigRational,
    /// Scan horizon `N`.
    #[serde(rename = "N")]
    pub horizon: u64,
    /// Index for single-`n` commands.
    pub n: u64,
    pub k_max: Option<u64>,
    pub trials: u64,
    pub seed: u64,
    pub workers: usize,
    pub tol: f64,
    pub window: usize,
    pub eps: Option<f64>,
    #[serde(deserialize_with = "opt_rational_from_json")]
    pub b_max: Option<BigRational>,
    pub family: Option<String>,
    pub rule: Option<String>,
    pub event: Option<String>,
    pub prefix: Option<String>,
    pub var: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            q: BigRational::new(1.into(), 2.into()),
            c: BigRational::one(),
            horizon: 200,
            n: 3,
            k_max: None,
            trials: 100_000,
            seed: 42,
            workers: DEFAULT_WORKERS,
            tol: 1e-9,
            window: DEFAULT_WINDOW,
            eps: None,
            b_max: None,
            family: None,
            rule: None,
            event: None,
            prefix: None,
            var: None,
        }
    }
}

impl RunConfig {
    pub fn limit_config(&self) -> Result<LimitConfig> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::param(format!("tol must be positive, got {}", self.tol)));
        }
        if self.window == 0 {
            return Err(Error::param("window must be at least 1"));
        }
        Ok(LimitConfig {
            window: self.window,
            tol: self.tol,
        })
    }

    fn check_horizon(&self) -> Result<u64> {
        if self.horizon == 0 {
            return Err(Error::param("N must be at least 1"));
        }
        Ok(self.horizon)
    }

    fn check_q(&self) -> Result<()> {
        if self.q <= BigRational::zero() || self.q >= BigRational::one() {
            return Err(Error::param(format!("q must lie in (0,1), got {}", format_rational(&self.q))));
        }
        Ok(())
    }

    /// The family named by `--family` (default `default`) with `q` and `c`.
    pub fn family_or(&self, default: &str) -> Result<MeasureFamily> {
        let name = self.family.as_deref().unwrap_or(default);
        let params = json!({ "q": format_rational(&self.q), "c": format_rational(&self.c) });
        MeasureFamily::from_registry(name, &params)
    }

    pub fn rule_or(&self, default: &str) -> Result<EventRule> {
        let seed = self.event.as_deref().map(str::parse::<EventSet>).transpose()?;
        let name = match (&self.rule, &seed) {
            (Some(r), _) => r.as_str(),
            (None, Some(_)) => "identity",
            (None, None) => default,
        };
        EventRule::by_name(name, seed)
    }

    fn variable(&self) -> Result<Variable> {
        Variable::from_name(self.var.as_deref().unwrap_or("z"))
    }

    fn prefix_or(&self, default: &str) -> Result<DigitPrefix> {
        self.prefix.as_deref().unwrap_or(default).parse()
    }
}

/// A finished report.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub command: String,
    pub body: Value,
    pub text: String,
    pub csv: Option<String>,
}

impl Report {
    fn new(command: impl Into<String>, body: impl Serialize, text: String) -> Result<Self> {
        Ok(Report {
            command: command.into(),
            body: serde_json::to_value(body)?,
            text,
            csv: None,
        })
    }

    fn with_csv(mut self, csv: String) -> Self {
        self.csv = Some(csv);
        self
    }

    /// `{"schema_version": 1, "command": …, "report": …}`.
    pub fn envelope(&self) -> Value {
        json!({
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "report": self.body,
        })
    }

    pub fn render(&self, format: OutputFormat) -> Result<String> {
        match format {
            OutputFormat::Text => Ok(self.text.clone()),
            OutputFormat::Json => {
                let mut s = serde_json::to_string_pretty(&self.envelope())?;
                s.push('\n');
                Ok(s)
            }
            OutputFormat::Csv => self
                .csv
                .clone()
                .ok_or_else(|| Error::Unsupported(format!("command {} has no CSV output", self.command))),
        }
    }
}

fn csv_string(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "none".to_string(), |x| x.to_string())
}

fn coincidence_text(out: &mut String, r: &CoincidenceReport) {
    let _ = writeln!(out, "family: {}", r.family);
    let _ = writeln!(out, "rule: {}", r.rule);
    let _ = writeln!(out, "limit event: {}", describe_limit_event(r));
    let _ = writeln!(out, "lim rho_n(E_n): {}", opt(r.numeric_limit));
    let _ = writeln!(
        out,
        "limit measure on R: {}",
        r.limit_measure_r.as_ref().map_or("none".to_string(), |m| m.to_string())
    );
    let _ = writeln!(
        out,
        "limit measure on Rbar: {}",
        r.limit_measure_rbar.as_ref().map_or("none".to_string(), |m| m.to_string())
    );
    let _ = writeln!(out, "[lim rho_n](E) on R: {}", opt(r.measure_side_r));
    let _ = writeln!(out, "[lim rho_n](E) on Rbar: {}", opt(r.measure_side_rbar));
    let _ = writeln!(out, "classification: {}", r.classification);
}

fn describe_limit_event(r: &CoincidenceReport) -> String {
    use crate::events::LimitEvent;
    match &r.limit_event {
        LimitEvent::InR(e) => format!("{e} (in R)"),
        LimitEvent::InRbarOnly(e) => format!("{e} (in Rbar only)"),
        LimitEvent::NoLimit => "none".to_string(),
    }
}

fn escape_text(out: &mut String, acc: &EscapeAccount) {
    let _ = writeln!(out, "mass to +inf: {}", acc.mass_to_plus_inf);
    let _ = writeln!(out, "mass to -inf: {}", acc.mass_to_minus_inf);
    let _ = writeln!(out, "retained at last rung: {}", acc.retained_total);
}

fn tightness_text(out: &mut String, v: &TightnessVerdict) {
    let _ = writeln!(out, "family: {}", v.family);
    let _ = writeln!(out, "epsilon: {}", v.epsilon);
    let _ = writeln!(
        out,
        "scan: n <= {}, b <= {}",
        v.scan_bounds.horizon,
        format_rational(&v.scan_bounds.b_max)
    );
    match &v.outcome {
        TightnessOutcome::Tight {
            interval,
            sup_mass_outside,
            ..
        } => {
            let _ = writeln!(out, "verdict: tight");
            let _ = writeln!(out, "interval: {interval}");
            let _ = writeln!(out, "sup_n mass outside: {sup_mass_outside}");
        }
        TightnessOutcome::NotTight { witness } => {
            let _ = writeln!(out, "verdict: not_tight");
            let shown = witness.len().min(5);
            for w in &witness[..shown] {
                let _ = writeln!(
                    out,
                    "  b = {}: n = {} leaves {} outside [-b, b]",
                    format_rational(&w.bound),
                    w.n,
                    w.mass_outside
                );
            }
            if witness.len() > shown {
                let _ = writeln!(out, "  ... {} more bounds", witness.len() - shown);
            }
        }
    }
}

fn default_b_max(horizon: u64) -> BigRational {
    BigRational::from_integer((horizon / 2).into())
}

fn tightness_for(cfg: &RunConfig, family: &MeasureFamily, eps: f64) -> Result<TightnessVerdict> {
    let horizon = cfg.check_horizon()?;
    let b_max = cfg.b_max.clone().unwrap_or_else(|| default_b_max(horizon));
    tightness_check(family, eps, horizon, &b_max)
}

/// `example <id>`.
pub fn cmd_example(id: &str, cfg: &RunConfig) -> Result<Report> {
    let lc = cfg.limit_config()?;
    let horizon = cfg.check_horizon()?;
    let command = format!("example {id}");
    let mut text = String::new();
    match id {
        "ex1" => {
            let fam = MeasureFamily::dirac_walk();
            let rep = coincidence_report(&fam, &EventRule::singleton_shift(), horizon, &lc);
            let acc = escaped_mass(&fam, &Ladder::for_horizon(horizon), &lc);
            coincidence_text(&mut text, &rep);
            escape_text(&mut text, &acc);
            Report::new(command, json!({ "coincidence": rep, "escape": acc }), text)
        }
        "ex2" => {
            let rule = EventRule::identity("(-inf,0]".parse()?);
            let rep = coincidence_report(&MeasureFamily::dirac_recip(), &rule, horizon, &lc);
            coincidence_text(&mut text, &rep);
            Report::new(command, json!({ "coincidence": rep }), text)
        }
        "ex3" => {
            let rep = coincidence_report(&MeasureFamily::dirac_recip(), &EventRule::singleton_shift(), horizon, &lc);
            coincidence_text(&mut text, &rep);
            Report::new(command, json!({ "coincidence": rep }), text)
        }
        "ex4" => {
            cfg.check_q()?;
            let fam = MeasureFamily::record_index(cfg.q.clone())?;
            let acc = escaped_mass(&fam, &Ladder::for_horizon(horizon), &lc);
            // mass at n − k does not depend on n
            let mut lags = Vec::new();
            for k in 1..=5u64 {
                let expected = (BigRational::one() - &cfg.q) * num_traits::pow(cfg.q.clone(), k as usize);
                let at: Vec<BigRational> = [k + 1, 2 * k + 3, horizon.max(k + 1)]
                    .iter()
                    .map(|&n| Ok(record_index::<BigRational>(&cfg.q, n)?.mass_at(&ExtendedReal::from_int((n - k) as i64))))
                    .collect::<Result<_>>()?;
                let constant = at.iter().all(|m| *m == expected);
                lags.push(json!({ "k": k, "mass": format_rational(&expected), "constant_in_n": constant }));
                let _ = writeln!(text, "mass at n-{k}: {} (constant in n: {constant})", format_rational(&expected));
            }
            escape_text(&mut text, &acc);
            Report::new(command, json!({ "family": fam.to_string(), "lag_masses": lags, "escape": acc }), text)
        }
        "ex5" => {
            cfg.check_q()?;
            let fam = MeasureFamily::record_index(cfg.q.clone())?;
            let top = coincidence_report(&fam, &EventRule::singleton_shift(), horizon, &lc);
            let below = coincidence_report(&fam, &EventRule::ray_growth(), horizon, &lc);
            coincidence_text(&mut text, &top);
            text.push('\n');
            coincidence_text(&mut text, &below);
            Report::new(command, json!({ "top_atom": top, "below_top": below }), text)
        }
        "ex6" => {
            cfg.check_q()?;
            let fam = MeasureFamily::record_index(cfg.q.clone())?;
            let eps = cfg.eps.unwrap_or_else(|| Mass::to_f64(&(BigRational::one() - &cfg.q)));
            let v = tightness_for(cfg, &fam, eps)?;
            tightness_text(&mut text, &v);
            Report::new(command, json!({ "tightness": v }), text)
        }
        "ex7" | "ex8" => {
            cfg.check_q()?;
            let fam = if id == "ex7" {
                MeasureFamily::bernoulli_marginal(cfg.q.clone())?
            } else {
                MeasureFamily::running_max(cfg.q.clone())?
            };
            let mut reports = Vec::new();
            for a in [0, 1] {
                let rep = coincidence_report(&fam, &EventRule::identity(EventSet::singleton(a)), horizon, &lc);
                coincidence_text(&mut text, &rep);
                text.push('\n');
                reports.push(rep);
            }
            let mut verdicts = Vec::new();
            for eps in [0.1, 0.01] {
                let v = tightness_for(cfg, &fam, eps)?;
                tightness_text(&mut text, &v);
                verdicts.push(v);
            }
            Report::new(command, json!({ "coincidence": reports, "tightness": verdicts }), text)
        }
        "ex9" => {
            cfg.check_q()?;
            let fam = MeasureFamily::record_index(cfg.q.clone())?;
            let lim = extended_limit(&fam, horizon, &lc);
            let on_r = lim.as_ref().map(|m| m.measure_of(&EventSet::real_line()));
            let rep = coincidence_report(&fam, &EventRule::ray_growth(), horizon, &lc);
            let _ = writeln!(
                text,
                "extended limit: {}",
                lim.as_ref().map_or("none".to_string(), |m| m.to_string())
            );
            let _ = writeln!(text, "[lim mu_n](R): {}", opt(on_r));
            let _ = writeln!(text, "lim mu_n((-inf,n)): {}", opt(rep.numeric_limit));
            Report::new(
                command,
                json!({ "extended_limit": lim, "limit_probability_of_R": on_r, "coincidence": rep }),
                text,
            )
        }
        "ex10" => {
            cfg.check_q()?;
            let n_max = cfg.n.clamp(1, 20) as u32;
            let mut partitions = Vec::new();
            for n in 1..=n_max {
                let bad = partition_check(n)?;
                partitions.push(json!({ "n": n, "holds": bad.is_none() }));
            }
            let all_hold = partitions.iter().all(|p| p["holds"] == true);
            let exact = enumerate_exact(&cfg.q, u64::from(n_max))?;
            let closed = closed_form_pmfs(&cfg.q, u64::from(n_max))?;
            let eps = Mass::to_f64(&(BigRational::one() - &cfg.q));
            let record = tightness_for(cfg, &MeasureFamily::record_index(cfg.q.clone())?, eps)?;
            let marginal = tightness_for(cfg, &MeasureFamily::bernoulli_marginal(cfg.q.clone())?, eps)?;
            let _ = writeln!(text, "{{X_n=0}} = {{Z_n<n}} u {{Y_n=0}}, disjoint, for n <= {n_max}: {all_hold}");
            let _ = writeln!(text, "Z_{n_max} law by enumeration: {}", exact.z);
            let _ = writeln!(text, "matches closed form: {}", exact == closed);
            let _ = writeln!(text, "bernoulli marginal tight at eps = {eps}: {}", marginal.is_tight());
            let _ = writeln!(text, "record index tight at eps = {eps}: {}", record.is_tight());
            Report::new(
                command,
                json!({
                    "partition": partitions,
                    "partition_holds": all_hold,
                    "record_law": exact.z,
                    "matches_closed_form": exact == closed,
                    "marginal_tightness": marginal,
                    "record_tightness": record,
                }),
                text,
            )
        }
        "ex11" => {
            let c = &cfg.c;
            if *c <= BigRational::zero() {
                return Err(Error::param("c must be positive"));
            }
            let k_max = cfg.k_max.unwrap_or_else(|| default_k_max(c));
            let limit: DiscreteMeasure<f64> = poisson_truncated(c, k_max, TailPolicy::LumpAtKmax)?;
            let c2 = Mass::to_f64(&(c * c));
            let mut rows = Vec::new();
            for n in [10u64, 100, 1000] {
                let p = (c / BigRational::from_integer(n.into())).min(BigRational::one());
                let tv = tv_distance(&binomial::<f64>(n, &p)?, &limit);
                let bound = c2 / n as f64;
                let _ = writeln!(text, "n = {n}: tv = {tv:.6e}, bound c^2/n = {bound:.6e}");
                rows.push(json!({ "n": n, "tv": tv, "bound": bound, "within_bound": tv <= bound }));
            }
            let decreasing = rows.windows(2).all(|w| w[1]["tv"].as_f64() < w[0]["tv"].as_f64());
            let _ = writeln!(text, "strictly decreasing: {decreasing}");
            let csv = csv_string(
                &["n", "tv", "bound"],
                rows.iter().map(|r| vec![r["n"].to_string(), r["tv"].to_string(), r["bound"].to_string()]),
            )?;
            Ok(Report::new(
                command,
                json!({ "c": format_rational(c), "k_max": k_max, "rows": rows, "strictly_decreasing": decreasing }),
                text,
            )?
            .with_csv(csv))
        }
        "ex12" => Err(Error::Unsupported(
            "example ex12 is out of scope (continuous measures)".to_string(),
        )),
        "ex13" => {
            let mut prefix = cfg.prefix_or("0.141")?;
            let mut chain = Vec::new();
            for d in [5u32, 9, 2] {
                let iv = prefix.interval();
                let _ = writeln!(text, "{prefix}: {iv}, width {}", format_rational(&iv.width()));
                chain.push(json!({ "prefix": prefix.to_string(), "interval": iv, "width": format_rational(&iv.width()) }));
                prefix = prefix.refine(d)?;
            }
            Report::new(command, json!({ "chain": chain }), text)
        }
        "ex14" => {
            // β_m is exact; its nearest double is a different number
            let prefix = cfg.prefix_or("0.141")?;
            let beta = prefix.interval().lo;
            let as_float = Mass::to_f64(&beta);
            let float_value = BigRational::from_float(as_float).expect("finite");
            let gap = &float_value - &beta;
            let _ = writeln!(text, "beta_m: {}", format_rational(&beta));
            let _ = writeln!(text, "nearest double: {as_float:?}");
            let _ = writeln!(text, "double - beta_m: {}", format_rational(&gap));
            Report::new(
                command,
                json!({
                    "prefix": prefix.to_string(),
                    "beta": format_rational(&beta),
                    "nearest_double": as_float,
                    "double_minus_beta": format_rational(&gap),
                    "double_is_exact": gap.is_zero(),
                }),
                text,
            )
        }
        "ex15" => {
            let prefix = cfg.prefix_or("0.7")?;
            let iv = prefix.interval();
            let range = transmission_range(&prefix)?;
            let _ = writeln!(text, "theta in {iv} rad");
            let _ = writeln!(text, "cos^2(theta) in {range}");
            Report::new(
                command,
                json!({ "prefix": prefix.to_string(), "theta": iv, "probability": range }),
                text,
            )
        }
        other => Err(Error::param(format!(
            "unknown example {other:?}; expected one of {}",
            EXAMPLE_IDS.join(", ")
        ))),
    }
}

/// The identity `λₙ({0}) − γₙ({0}) = μₙ((−∞, n))` row by row, with the limits
/// of both sides on `ℝ` and `ℝ̄`.
pub fn cmd_demo_inconsistency(cfg: &RunConfig) -> Result<Report> {
    cfg.check_q()?;
    let horizon = cfg.check_horizon()?;
    let demo = inconsistency_demo(&cfg.q, horizon, &cfg.limit_config()?)?;
    let mut text = String::new();
    let _ = writeln!(text, "q = {}, n = 1..{}", format_rational(&cfg.q), horizon);
    let _ = writeln!(text, "residual zero for every n: {}", demo.all_residuals_zero);
    for row in demo.rows.iter().take(5) {
        let _ = writeln!(
            text,
            "  n = {}: {} - {} = {} = {} (residual {})",
            row.n,
            format_rational(&row.marginal_zero),
            format_rational(&row.running_max_zero),
            format_rational(&row.lhs),
            format_rational(&row.rhs),
            format_rational(&row.residual)
        );
    }
    let _ = writeln!(
        text,
        "limits of the sequences: ({}, {})",
        demo.lhs_numeric_limit, demo.rhs_numeric_limit
    );
    let _ = writeln!(text, "lim gamma_n({{0}}): {}", demo.gap_numeric_limit);
    let _ = writeln!(text, "marginal at {{0}}: {}", demo.marginal_report.classification);
    let _ = writeln!(text, "record index on (-inf,n): {}", demo.record_report.classification);
    let verdict = |v: &crate::convergence::WeakLimitVerdict| match v {
        v if v.is_confirmed() => "confirmed",
        v if v.is_refuted() => "refuted",
        _ => "inconclusive at this N",
    };
    let _ = writeln!(
        text,
        "limit measures on Rbar: ([lim lambda_n]({{0}}), [lim mu_n](R)) = ({}, {}) [{}; {}]",
        demo.extended_pair.marginal_limit_probability,
        demo.extended_pair.record_limit_probability_on_r,
        verdict(&demo.extended_pair.marginal_verdict),
        verdict(&demo.extended_pair.record_verdict)
    );
    let csv = csv_string(
        &["n", "marginal_zero", "running_max_zero", "lhs", "rhs", "residual", "closed_form"],
        demo.rows.iter().map(|r| {
            [
                &r.marginal_zero,
                &r.running_max_zero,
                &r.lhs,
                &r.rhs,
                &r.residual,
                &r.closed_form,
            ]
            .iter()
            .map(|v| format_rational(v))
            .fold(vec![r.n.to_string()], |mut acc, s| {
                acc.push(s);
                acc
            })
        }),
    )?;
    Ok(Report::new("demo-inconsistency", &demo, text)?.with_csv(csv))
}

fn pmf_text(out: &mut String, rows: &[PmfRow]) {
    let _ = writeln!(out, "{:>6}  {:>24}  {:>24}  {:>10}  {:>10}", "value", "exact", "closed_form", "empirical", "abs_err");
    for r in rows {
        let _ = writeln!(
            out,
            "{:>6}  {:>24}  {:>24}  {:>10}  {:>10}",
            r.value,
            r.exact,
            r.closed_form,
            r.empirical.map_or("-".to_string(), |f| format!("{f:.6}")),
            r.abs_err.map_or("-".to_string(), |f| format!("{f:.2e}"))
        );
    }
}

fn pmf_csv(rows: &[PmfRow]) -> Result<String> {
    let mut buf = Vec::new();
    write_pmf_csv(rows, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

/// Exact laws of `Xₙ`, `Yₙ`, `Zₙ` by enumeration, next to the closed forms.
pub fn cmd_oracle(cfg: &RunConfig) -> Result<Report> {
    let var = cfg.variable()?;
    let exact = enumerate_exact(&cfg.q, cfg.n)?;
    let closed = closed_form_pmfs(&cfg.q, cfg.n)?;
    let residual = check_identity(&cfg.q, cfg.n, IdentityMode::Oracle)?;
    let rows = pmf_table(exact.get(var), closed.get(var), None);
    let mut text = String::new();
    let _ = writeln!(text, "q = {}, n = {}, variable {}", format_rational(&cfg.q), cfg.n, var.name());
    pmf_text(&mut text, &rows);
    let _ = writeln!(text, "enumeration equals closed form (x, y, z): {}", exact == closed);
    let _ = writeln!(text, "identity residual: {}", format_rational(&residual));
    let body = json!({
        "q": format_rational(&cfg.q),
        "n": cfg.n,
        "variable": var,
        "table": rows,
        "exact": exact,
        "matches_closed_form": exact == closed,
        "identity_residual": format_rational(&residual),
    });
    let csv = pmf_csv(&rows)?;
    Ok(Report::new("oracle", body, text)?.with_csv(csv))
}

/// Monte Carlo frequencies against the exact laws.
pub fn cmd_simulate(cfg: &RunConfig) -> Result<Report> {
    let var = cfg.variable()?;
    let sim = simulate(&cfg.q, cfg.n, cfg.trials, cfg.seed, cfg.workers)?;
    let closed = closed_form_pmfs(&cfg.q, cfg.n)?;
    // enumeration when it is cheap, closed form beyond the bound
    let exact = if cfg.n <= crate::oracle::ENUMERATION_BOUND {
        enumerate_exact(&cfg.q, cfg.n)?
    } else {
        closed.clone()
    };
    let rows = pmf_table(exact.get(var), closed.get(var), Some(sim.get(var)));
    let max_err = rows.iter().filter_map(|r| r.abs_err).fold(0.0, f64::max);
    let mut text = String::new();
    let _ = writeln!(
        text,
        "q = {}, n = {}, trials = {}, seed = {}, workers = {}, variable {}",
        format_rational(&cfg.q),
        cfg.n,
        cfg.trials,
        cfg.seed,
        sim.workers,
        var.name()
    );
    pmf_text(&mut text, &rows);
    let _ = writeln!(text, "max abs error: {max_err:.3e}");
    let body = json!({ "simulation": sim, "variable": var, "table": rows, "max_abs_err": max_err });
    let csv = pmf_csv(&rows)?;
    Ok(Report::new("simulate", body, text)?.with_csv(csv))
}

/// Tightness scan for `--family` (default `record_index`).
pub fn cmd_tightness(cfg: &RunConfig) -> Result<Report> {
    let fam = cfg.family_or("record_index")?;
    let eps = cfg.eps.unwrap_or(0.1);
    let v = tightness_for(cfg, &fam, eps)?;
    let mut text = String::new();
    tightness_text(&mut text, &v);
    let csv = match &v.outcome {
        TightnessOutcome::NotTight { witness } => csv_string(
            &["bound", "n", "mass_outside"],
            witness
                .iter()
                .map(|w| vec![format_rational(&w.bound), w.n.to_string(), w.mass_outside.to_string()]),
        )?,
        TightnessOutcome::Tight {
            interval,
            bound,
            sup_mass_outside,
        } => csv_string(
            &["interval", "bound", "sup_mass_outside"],
            [vec![interval.to_string(), format_rational(bound), sup_mass_outside.to_string()]],
        )?,
    };
    Ok(Report::new("tightness", &v, text)?.with_csv(csv))
}

/// Coincidence report and escape account for `--family` and `--rule`.
pub fn cmd_converge(cfg: &RunConfig) -> Result<Report> {
    let fam = cfg.family_or("record_index")?;
    let rule = cfg.rule_or("ray_growth")?;
    let horizon = cfg.check_horizon()?;
    let lc = cfg.limit_config()?;
    let rep = coincidence_report(&fam, &rule, horizon, &lc);
    let acc = escaped_mass(&fam, &Ladder::for_horizon(horizon), &lc);
    let path: Vec<f64> = crate::convergence::probability_path(&fam, &rule, horizon);
    let mut text = String::new();
    coincidence_text(&mut text, &rep);
    escape_text(&mut text, &acc);
    let csv = csv_string(
        &["n", "probability"],
        path.iter()
            .enumerate()
            .map(|(i, p)| vec![(i + 1).to_string(), p.to_string()]),
    )?;
    Ok(Report::new("converge", json!({ "coincidence": rep, "escape": acc }), text)?.with_csv(csv))
}

/// Uncertain interval of `--prefix` and, for angles in `[0, π/2]`, the
/// transmission range.
pub fn cmd_uncertain(cfg: &RunConfig) -> Result<Report> {
    let prefix = cfg.prefix_or("0.141")?;
    let iv = prefix.interval();
    let range = match transmission_range(&prefix) {
        Ok(r) => Some(r),
        Err(Error::Domain(_)) => None,
        Err(e) => return Err(e),
    };
    let mut text = String::new();
    let _ = writeln!(text, "prefix: {prefix}");
    let _ = writeln!(text, "interval: {iv}");
    let _ = writeln!(text, "width: {}", format_rational(&iv.width()));
    match &range {
        Some(r) => {
            let _ = writeln!(text, "cos^2 over the interval (radians): {r}");
        }
        None => {
            let _ = writeln!(text, "cos^2 range: interval leaves [0, pi/2]");
        }
    }
    let body = json!({
        "prefix": prefix.to_string(),
        "digits": prefix.digits(),
        "interval": iv,
        "width": format_rational(&iv.width()),
        "transmission_range": range,
    });
    Report::new("uncertain", body, text)
}

/// Dispatch by command name, as used by the C interface.
pub fn run_command(command: &str, cfg: &RunConfig) -> Result<Report> {
    let mut parts = command.split_whitespace();
    match (parts.next(), parts.next(), parts.next()) {
        (Some("example"), Some(id), None) => cmd_example(id, cfg),
        (Some("demo-inconsistency"), None, None) => cmd_demo_inconsistency(cfg),
        (Some("oracle"), None, None) => cmd_oracle(cfg),
        (Some("simulate"), None, None) => cmd_simulate(cfg),
        (Some("tightness"), None, None) => cmd_tightness(cfg),
        (Some("converge"), None, None) => cmd_converge(cfg),
        (Some("uncertain"), None, None) => cmd_uncertain(cfg),
        _ => Err(Error::param(format!("unknown command {command:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> RunConfig {
        RunConfig::default()
    }

    #[test]
    fn every_example_runs() {
        for id in EXAMPLE_IDS {
            let rep = cmd_example(id, &cfg()).unwrap_or_else(|e| panic!("{id}: {e}"));
            assert!(!rep.text.is_empty());
            assert_eq!(rep.envelope()["schema_version"], 1);
        }
        let err = cmd_example("ex12", &cfg()).unwrap_err();
        assert!(err.to_string().contains("out of scope (continuous measures)"));
        assert!(cmd_example("ex99", &cfg()).is_err());
    }

    #[test]
    fn example_key_numbers() {
        let ex2 = cmd_example("ex2", &cfg()).unwrap().body;
        assert_eq!(ex2["coincidence"]["classification"], "mismatch");
        assert_eq!(ex2["coincidence"]["numeric_limit"], 0.0);
        assert_eq!(ex2["coincidence"]["measure_side_R"], 1.0);

        let ex6 = cmd_example("ex6", &cfg()).unwrap().body;
        assert_eq!(ex6["tightness"]["outcome"], "not_tight");
        assert_eq!(ex6["tightness"]["epsilon"], 0.5);

        let ex9 = cmd_example("ex9", &cfg()).unwrap().body;
        assert_eq!(ex9["limit_probability_of_R"], 0.0);
        assert_eq!(ex9["extended_limit"]["atoms"][0]["point"], "+inf");

        let ex4 = cmd_example("ex4", &cfg()).unwrap().body;
        assert!(ex4["lag_masses"].as_array().unwrap().iter().all(|l| l["constant_in_n"] == true));

        let ex11 = cmd_example("ex11", &cfg()).unwrap().body;
        assert_eq!(ex11["strictly_decreasing"], true);

        let ex14 = cmd_example("ex14", &cfg()).unwrap().body;
        assert_eq!(ex14["double_is_exact"], false);
    }

    #[test]
    fn json_is_deterministic() {
        for cmd in ["oracle", "simulate", "tightness", "converge", "uncertain", "demo-inconsistency"] {
            let mut c = cfg();
            c.trials = 5000;
            c.horizon = 60;
            let a = run_command(cmd, &c).unwrap().render(OutputFormat::Json).unwrap();
            let b = run_command(cmd, &c).unwrap().render(OutputFormat::Json).unwrap();
            assert_eq!(a, b, "{cmd}");
        }
    }

    #[test]
    fn oracle_table() {
        let rep = cmd_oracle(&cfg()).unwrap();
        let csv = rep.render(OutputFormat::Csv).unwrap();
        assert_eq!(csv, "value,exact,closed_form,empirical,abs_err\n1,0.125,0.125,,\n2,0.25,0.25,,\n3,0.625,0.625,,\n");
        assert_eq!(rep.body["identity_residual"], "0");
    }

    #[test]
    fn uncertain_report() {
        let mut c = cfg();
        c.prefix = Some("0.141".into());
        let rep = cmd_uncertain(&c).unwrap();
        assert_eq!(rep.body["interval"]["lo"], "0.141");
        assert_eq!(rep.body["interval"]["hi"], "0.142");
        assert_eq!(rep.body["width"], "0.001");
        assert!(rep.render(OutputFormat::Csv).is_err());
        c.prefix = Some("3.1".into());
        assert!(cmd_uncertain(&c).unwrap().body["transmission_range"].is_null());
    }

    #[test]
    fn config_from_json() {
        let c: RunConfig = serde_json::from_str(r#"{"q": "3/10", "N": 50, "c": 2}"#).unwrap();
        assert_eq!(c.q, BigRational::new(3.into(), 10.into()));
        assert_eq!(c.c, BigRational::from_integer(2.into()));
        assert_eq!(c.horizon, 50);
        assert_eq!(c.seed, 42);
        assert!(serde_json::from_str::<RunConfig>(r#"{"bogus": 1}"#).is_err());
        assert!(serde_json::from_str::<RunConfig>(r#"{"q": "a/b"}"#).is_err());
    }

    #[test]
    fn parameter_errors() {
        let mut c = cfg();
        c.q = BigRational::from_integer(2.into());
        assert!(cmd_demo_inconsistency(&c).is_err());
        let mut c = cfg();
        c.n = 21;
        assert!(matches!(cmd_oracle(&c), Err(Error::Capacity { .. })));
        let mut c = cfg();
        c.eps = Some(1.5);
        assert!(cmd_tightness(&c).is_err());
        let mut c = cfg();
        c.rule = Some("identity".into());
        assert!(cmd_converge(&c).is_err());
    }
}
