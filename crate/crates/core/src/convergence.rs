//! Limits of measure sequences: numeric limits of `ρₙ(Eₙ)`, tightness,
//! escaped mass, weak limits on `ℝ` and `ℝ̄`, and the classification of
//! `limₙ[ρₙ(Eₙ)]` against `[limₙ ρₙ](E)`.
//!
//! Scans run in `f64`. The exact identities live in [`inconsistency_demo`],
//! which keeps its per-`n` rows in rational arithmetic.

use std::collections::BTreeSet;
use std::fmt;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::events::{EventRule, EventSet, LimitEvent};
use crate::extreal::{serialize_rational, ExtendedReal};
use crate::families::MeasureFamily;
use crate::measure::{DiscreteMeasure, Mass};

pub const DEFAULT_WINDOW: usize = 20;
pub const DEFAULT_TOL: f64 = 1e-9;

/// Tail-window settings shared by every limit estimate in this module.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LimitConfig {
    pub window: usize,
    pub tol: f64,
}

impl Default for LimitConfig {
    fn default() -> Self {
        LimitConfig {
            window: DEFAULT_WINDOW,
            tol: DEFAULT_TOL,
        }
    }
}

impl LimitConfig {
    pub fn with_tol(tol: f64) -> Self {
        LimitConfig {
            tol,
            ..LimitConfig::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "status", content = "value", rename_all = "snake_case")]
pub enum NumericLimit {
    Limit(f64),
    NoLimit,
}

impl NumericLimit {
    pub fn value(self) -> Option<f64> {
        match self {
            NumericLimit::Limit(v) => Some(v),
            NumericLimit::NoLimit => None,
        }
    }
}

impl fmt::Display for NumericLimit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NumericLimit::Limit(v) => write!(f, "{v:?}"),
            NumericLimit::NoLimit => f.write_str("no limit"),
        }
    }
}

/// Tail-window Cauchy test: the last `window` terms (all of them when the
/// sequence is shorter) must have spread below `tol`; the limit is their mean.
///
/// A slowly divergent sequence can pass this test. Every built-in path
/// converges geometrically or is eventually constant.
pub fn numeric_limit(seq: &[f64], window: usize, tol: f64) -> NumericLimit {
    if seq.is_empty() {
        return NumericLimit::NoLimit;
    }
    let w = window.clamp(1, seq.len());
    let tail = &seq[seq.len() - w..];
    let (lo, hi) = tail
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        });
    if hi - lo < tol {
        NumericLimit::Limit(tail.iter().sum::<f64>() / w as f64)
    } else {
        NumericLimit::NoLimit
    }
}

/// `[ρₙ(Eₙ)]` for `n = 1..=horizon`.
pub fn probability_path<M: Mass>(family: &MeasureFamily, rule: &EventRule, horizon: u64) -> Vec<M> {
    (1..=horizon)
        .into_par_iter()
        .map(|n| family.measure::<M>(n).measure_of(&rule.apply(n)))
        .collect()
}

fn float_measures(family: &MeasureFamily, from: u64, to: u64) -> Vec<(u64, DiscreteMeasure<f64>)> {
    (from..=to)
        .into_par_iter()
        .map(|n| (n, family.measure::<f64>(n)))
        .collect()
}

/// Mass of one measure outside `[−b, b]`, as a step function of `b`.
struct OutsideMass {
    keys: Vec<BigRational>,
    // suffix[i] = mass at |x| >= keys[i], plus any mass at ±∞
    suffix: Vec<f64>,
}

impl OutsideMass {
    fn new(m: &DiscreteMeasure<f64>) -> Self {
        let mut infinite = 0.0;
        let mut finite: Vec<(BigRational, f64)> = Vec::with_capacity(m.len());
        for a in m.atoms() {
            match &a.point {
                ExtendedReal::Finite(v) => finite.push((v.abs(), a.mass)),
                _ => infinite += a.mass,
            }
        }
        finite.sort_by(|a, b| a.0.cmp(&b.0));
        let mut keys: Vec<BigRational> = Vec::with_capacity(finite.len());
        let mut masses: Vec<f64> = Vec::with_capacity(finite.len());
        for (k, m) in finite {
            if keys.last() == Some(&k) {
                *masses.last_mut().expect("parallel vectors") += m;
            } else {
                keys.push(k);
                masses.push(m);
            }
        }
        let mut suffix = vec![infinite; keys.len() + 1];
        for i in (0..keys.len()).rev() {
            suffix[i] = suffix[i + 1] + masses[i];
        }
        OutsideMass { keys, suffix }
    }

    fn beyond(&self, b: &BigRational) -> f64 {
        let idx = self.keys.partition_point(|k| k <= b);
        self.suffix[idx]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanBounds {
    pub horizon: u64,
    #[serde(serialize_with = "serialize_rational")]
    pub b_max: BigRational,
}

/// One scanned bound `b` and the first `n` whose mass outside `[−b, b]`
/// reaches `ε`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WitnessEntry {
    #[serde(serialize_with = "serialize_rational")]
    pub bound: BigRational,
    pub n: u64,
    pub mass_outside: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum TightnessOutcome {
    /// Every scanned `ρₙ` leaves less than `ε` outside `interval`.
    Tight {
        interval: EventSet,
        #[serde(serialize_with = "serialize_rational")]
        bound: BigRational,
        sup_mass_outside: f64,
    },
    /// For every scanned bound some `ρₙ` leaves at least `ε` outside it.
    NotTight { witness: Vec<WitnessEntry> },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TightnessVerdict {
    pub family: String,
    pub epsilon: f64,
    #[serde(flatten)]
    pub outcome: TightnessOutcome,
    pub scan_bounds: ScanBounds,
}

impl TightnessVerdict {
    pub fn is_tight(&self) -> bool {
        matches!(self.outcome, TightnessOutcome::Tight { .. })
    }

    pub fn interval(&self) -> Option<&EventSet> {
        match &self.outcome {
            TightnessOutcome::Tight { interval, .. } => Some(interval),
            TightnessOutcome::NotTight { .. } => None,
        }
    }
}

/// Scans `[−b, b]` for `0 ≤ b ≤ b_max` over `ρ₁ … ρ_N`.
///
/// Mass outside `[−b, b]` only changes at atom magnitudes, so the scanned
/// bounds are `0`, every atom magnitude up to `b_max`, and `b_max`. The
/// smallest bound that works yields the tight verdict; its interval is the
/// hull of the atoms it keeps, which is the smallest interval with the same
/// outside mass.
pub fn tightness_check(
    family: &MeasureFamily,
    epsilon: f64,
    horizon: u64,
    b_max: &BigRational,
) -> Result<TightnessVerdict> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::param(format!("epsilon must lie in (0,1), got {epsilon}")));
    }
    if horizon == 0 {
        return Err(Error::param("horizon N must be at least 1"));
    }
    if b_max.is_negative() {
        return Err(Error::param("b_max must be non-negative"));
    }
    let measures = float_measures(family, 1, horizon);
    let profiles: Vec<OutsideMass> = measures.par_iter().map(|(_, m)| OutsideMass::new(m)).collect();

    let mut bounds: BTreeSet<BigRational> = BTreeSet::new();
    bounds.insert(BigRational::zero());
    bounds.insert(b_max.clone());
    for p in &profiles {
        bounds.extend(p.keys.iter().take_while(|k| *k <= b_max).cloned());
    }

    let scan = |b: &BigRational| -> (f64, Option<WitnessEntry>) {
        let mut sup = 0.0f64;
        let mut first = None;
        for (p, (n, _)) in profiles.iter().zip(&measures) {
            let out = p.beyond(b);
            sup = sup.max(out);
            if first.is_none() && out >= epsilon {
                first = Some(WitnessEntry {
                    bound: b.clone(),
                    n: *n,
                    mass_outside: out,
                });
            }
        }
        (sup, first)
    };

    let bounds: Vec<BigRational> = bounds.into_iter().collect();
    let mut witness = Vec::with_capacity(bounds.len());
    for b in &bounds {
        let (sup, first) = scan(b);
        match first {
            Some(entry) => witness.push(entry),
            None => {
                let (lo, hi) = kept_hull(&measures, b);
                return Ok(TightnessVerdict {
                    family: family.to_string(),
                    epsilon,
                    outcome: TightnessOutcome::Tight {
                        interval: EventSet::closed(lo, hi),
                        bound: b.clone(),
                        sup_mass_outside: sup,
                    },
                    scan_bounds: ScanBounds {
                        horizon,
                        b_max: b_max.clone(),
                    },
                });
            }
        }
    }
    Ok(TightnessVerdict {
        family: family.to_string(),
        epsilon,
        outcome: TightnessOutcome::NotTight { witness },
        scan_bounds: ScanBounds {
            horizon,
            b_max: b_max.clone(),
        },
    })
}

fn kept_hull(measures: &[(u64, DiscreteMeasure<f64>)], b: &BigRational) -> (BigRational, BigRational) {
    let mut lo: Option<BigRational> = None;
    let mut hi: Option<BigRational> = None;
    for (_, m) in measures {
        for a in m.atoms() {
            if let ExtendedReal::Finite(v) = &a.point {
                if v.abs() <= *b {
                    if lo.as_ref().is_none_or(|l| v < l) {
                        lo = Some(v.clone());
                    }
                    if hi.as_ref().is_none_or(|h| v > h) {
                        hi = Some(v.clone());
                    }
                }
            }
        }
    }
    let lo = lo.unwrap_or_else(|| -b.clone());
    let hi = hi.unwrap_or_else(|| b.clone());
    (lo, hi)
}

/// One step `(N, b)` of an escape ladder.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Rung {
    pub horizon: u64,
    #[serde(serialize_with = "serialize_rational")]
    pub bound: BigRational,
}

/// Increasing `(N, b)` schedule: for each bound the tail value in `n` is
/// taken first, then the bound grows along the ladder.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Ladder {
    rungs: Vec<Rung>,
}

impl Ladder {
    pub fn new(rungs: Vec<Rung>) -> Result<Self> {
        if rungs.is_empty() {
            return Err(Error::param("ladder needs at least one rung"));
        }
        for r in &rungs {
            if r.horizon == 0 || r.bound.is_negative() {
                return Err(Error::param("ladder rungs need N >= 1 and b >= 0"));
            }
        }
        for pair in rungs.windows(2) {
            if pair[1].horizon < pair[0].horizon || pair[1].bound <= pair[0].bound {
                return Err(Error::param("ladder must increase in N and strictly in b"));
            }
        }
        Ok(Ladder { rungs })
    }

    /// Four rungs ending at `horizon`: `Nₖ = ⌈k·N/4⌉`, `bₖ = ⌊Nₖ/4⌋`.
    pub fn for_horizon(horizon: u64) -> Self {
        let horizon = horizon.max(1);
        let mut rungs: Vec<Rung> = Vec::new();
        for k in 1..=4u64 {
            let n = (k * horizon).div_ceil(4).max(1);
            let b = BigRational::from_integer((n / 4).into());
            if rungs.last().is_none_or(|r| r.bound < b) {
                rungs.push(Rung { horizon: n, bound: b });
            }
        }
        Ladder { rungs }
    }

    pub fn rungs(&self) -> &[Rung] {
        &self.rungs
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RungEstimate {
    pub horizon: u64,
    #[serde(serialize_with = "serialize_rational")]
    pub bound: BigRational,
    pub above: NumericLimit,
    pub below: NumericLimit,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointMass {
    pub point: ExtendedReal,
    pub mass: f64,
}

/// Where the mass of a sequence goes: to `+∞`, to `−∞`, or stays within the
/// last rung's bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EscapeAccount {
    pub mass_to_plus_inf: NumericLimit,
    pub mass_to_minus_inf: NumericLimit,
    /// Atoms of `ρ_N` inside `[−b, b]` at the last rung.
    pub retained: Vec<PointMass>,
    pub retained_total: f64,
    pub rungs: Vec<RungEstimate>,
}

fn combine_rungs(values: &[NumericLimit], tol: f64) -> NumericLimit {
    let take = values.len().min(3);
    let tail = &values[values.len() - take..];
    let finite: Option<Vec<f64>> = tail.iter().map(|v| v.value()).collect();
    match finite {
        Some(vals) => numeric_limit(&vals, vals.len(), tol),
        None => NumericLimit::NoLimit,
    }
}

pub fn escaped_mass(family: &MeasureFamily, ladder: &Ladder, cfg: &LimitConfig) -> EscapeAccount {
    let rungs: Vec<RungEstimate> = ladder
        .rungs
        .par_iter()
        .map(|rung| {
            let from = rung.horizon.saturating_sub(cfg.window as u64 - 1).max(1);
            let upper = ExtendedReal::Finite(rung.bound.clone());
            let lower = ExtendedReal::Finite(-rung.bound.clone());
            let (above, below): (Vec<f64>, Vec<f64>) = float_measures(family, from, rung.horizon)
                .iter()
                .map(|(_, m)| (m.mass_above(&upper), m.mass_below(&lower)))
                .unzip();
            RungEstimate {
                horizon: rung.horizon,
                bound: rung.bound.clone(),
                above: numeric_limit(&above, cfg.window, cfg.tol),
                below: numeric_limit(&below, cfg.window, cfg.tol),
            }
        })
        .collect();

    let above: Vec<NumericLimit> = rungs.iter().map(|r| r.above).collect();
    let below: Vec<NumericLimit> = rungs.iter().map(|r| r.below).collect();
    let last = ladder.rungs.last().expect("non-empty ladder");
    let window = EventSet::closed(-last.bound.clone(), last.bound.clone());
    let retained: Vec<PointMass> = family
        .measure::<f64>(last.horizon)
        .atoms()
        .iter()
        .filter(|a| window.contains(&a.point))
        .map(|a| PointMass {
            point: a.point.clone(),
            mass: a.mass,
        })
        .collect();
    EscapeAccount {
        mass_to_plus_inf: combine_rungs(&above, cfg.tol),
        mass_to_minus_inf: combine_rungs(&below, cfg.tol),
        retained_total: retained.iter().map(|p| p.mass).sum(),
        retained,
        rungs,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscrepancyKind {
    /// `Fₙ(x)` differs from the candidate CDF at a probe point.
    Cdf,
    /// Estimated mass escaping to `+∞` differs from the candidate's atom there.
    EscapePlus,
    /// Same for `−∞`.
    EscapeMinus,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Discrepancy {
    pub kind: DiscrepancyKind,
    pub point: Option<ExtendedReal>,
    pub n: u64,
    pub observed: f64,
    pub expected: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum WeakLimitVerdict {
    Confirmed { max_discrepancy: f64 },
    Refuted { witness: Discrepancy },
    /// The discrepancy is above `tol` but still shrinking across the window.
    Inconclusive { max_discrepancy: f64 },
}

impl WeakLimitVerdict {
    pub fn is_confirmed(&self) -> bool {
        matches!(self, WeakLimitVerdict::Confirmed { .. })
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self, WeakLimitVerdict::Refuted { .. })
    }
}

/// CDF probe points for comparing `Fₙ` with the candidate's `F`.
///
/// Each candidate atom `c` gets probes at `c ± δ` with `δ = min(1, gap)/4`;
/// midpoints between consecutive atoms of the candidate and of `reference`
/// are added when they stay at least `δ` away from every candidate atom, and
/// the range is closed by margin probes one unit beyond the candidate's
/// extreme atoms. Points within `δ` of a candidate atom are skipped because
/// atoms of `ρₙ` converging onto a limit atom sit there.
pub fn probe_grid(candidate: &DiscreteMeasure<f64>, reference: &DiscreteMeasure<f64>) -> Vec<BigRational> {
    let one = BigRational::from_integer(1.into());
    let cand: Vec<BigRational> = candidate
        .atoms()
        .iter()
        .filter_map(|a| a.point.finite().cloned())
        .collect();
    let (lo, hi, delta) = match (cand.first(), cand.last()) {
        (Some(first), Some(last)) => {
            let gap = cand
                .windows(2)
                .map(|w| &w[1] - &w[0])
                .min()
                .unwrap_or_else(|| one.clone())
                .min(one.clone());
            (first - &one, last + &one, gap / BigRational::from_integer(4.into()))
        }
        _ => (-one.clone(), one.clone(), BigRational::new(1.into(), 4.into())),
    };

    let mut probes: BTreeSet<BigRational> = BTreeSet::new();
    probes.insert(lo.clone());
    probes.insert(hi.clone());
    for c in &cand {
        probes.insert(c - &delta);
        probes.insert(c + &delta);
    }
    let mut pts: BTreeSet<BigRational> = cand.iter().cloned().collect();
    pts.extend(
        reference
            .atoms()
            .iter()
            .filter_map(|a| a.point.finite())
            .filter(|v| **v >= lo && **v <= hi)
            .cloned(),
    );
    let pts: Vec<BigRational> = pts.into_iter().collect();
    let two = BigRational::from_integer(2.into());
    for w in pts.windows(2) {
        let mid = (&w[0] + &w[1]) / &two;
        if cand.iter().all(|c| (&mid - c).abs() >= delta) {
            probes.insert(mid);
        }
    }
    probes.into_iter().collect()
}

/// Checks `ρₙ ⇒ candidate` over the tail window ending at `horizon`.
///
/// Two ingredients: CDF agreement on [`probe_grid`] (the outer margin probes
/// bound the mass leaving the candidate's range), and agreement of the
/// escaped-mass account with the candidate's atoms at `±∞`. A candidate on
/// `ℝ` has none, so any escaping mass refutes it.
pub fn verify_weak_limit(
    family: &MeasureFamily,
    candidate: &DiscreteMeasure<f64>,
    horizon: u64,
    cfg: &LimitConfig,
) -> WeakLimitVerdict {
    let horizon = horizon.max(1);
    let from = horizon.saturating_sub(cfg.window as u64 - 1).max(1);
    let measures = float_measures(family, from, horizon);
    let reference = &measures.last().expect("non-empty window").1;
    let probes: Vec<ExtendedReal> = probe_grid(candidate, reference)
        .into_iter()
        .map(ExtendedReal::Finite)
        .collect();
    let expected: Vec<f64> = probes.iter().map(|x| candidate.cdf(x)).collect();

    // worst probe per n
    let worst: Vec<Discrepancy> = measures
        .par_iter()
        .map(|(n, m)| {
            let mut best = Discrepancy {
                kind: DiscrepancyKind::Cdf,
                point: None,
                n: *n,
                observed: 0.0,
                expected: 0.0,
            };
            let mut best_gap = -1.0;
            for (x, f) in probes.iter().zip(&expected) {
                let fn_x = m.cdf(x);
                let gap = (fn_x - f).abs();
                if gap > best_gap {
                    best_gap = gap;
                    best = Discrepancy {
                        kind: DiscrepancyKind::Cdf,
                        point: Some(x.clone()),
                        n: *n,
                        observed: fn_x,
                        expected: *f,
                    };
                }
            }
            best
        })
        .collect();
    let gap = |d: &Discrepancy| (d.observed - d.expected).abs();
    let cdf_max = worst.iter().map(gap).fold(0.0, f64::max);
    let start = gap(worst.first().expect("non-empty window"));
    let end = worst.last().expect("non-empty window");

    let account = escaped_mass(family, &Ladder::for_horizon(horizon), cfg);
    let escape_checks = [
        (
            DiscrepancyKind::EscapePlus,
            account.mass_to_plus_inf,
            candidate.mass_at(&ExtendedReal::PosInf),
        ),
        (
            DiscrepancyKind::EscapeMinus,
            account.mass_to_minus_inf,
            candidate.mass_at(&ExtendedReal::NegInf),
        ),
    ];
    let mut escape_settled = true;
    let mut escape_max = 0.0f64;
    for (kind, estimate, expected) in escape_checks {
        match estimate {
            NumericLimit::Limit(v) => {
                let d = (v - expected).abs();
                if d > cfg.tol {
                    return WeakLimitVerdict::Refuted {
                        witness: Discrepancy {
                            kind,
                            point: None,
                            n: horizon,
                            observed: v,
                            expected,
                        },
                    };
                }
                escape_max = escape_max.max(d);
            }
            NumericLimit::NoLimit => escape_settled = false,
        }
    }

    let max_discrepancy = cdf_max.max(escape_max);
    if cdf_max <= cfg.tol && escape_settled {
        WeakLimitVerdict::Confirmed { max_discrepancy }
    } else if gap(end) > cfg.tol && gap(end) >= start - cfg.tol {
        WeakLimitVerdict::Refuted {
            witness: end.clone(),
        }
    } else {
        WeakLimitVerdict::Inconclusive { max_discrepancy }
    }
}

/// Pointwise tail limits of atom masses plus the escape account, used when a
/// family declares no limit of its own.
fn discover_candidate(family: &MeasureFamily, horizon: u64, cfg: &LimitConfig) -> Option<DiscreteMeasure<f64>> {
    let ladder = Ladder::for_horizon(horizon);
    let account = escaped_mass(family, &ladder, cfg);
    let plus = account.mass_to_plus_inf.value()?;
    let minus = account.mass_to_minus_inf.value()?;
    let from = horizon.saturating_sub(cfg.window as u64 - 1).max(1);
    let measures = float_measures(family, from, horizon);
    let mut atoms: Vec<(ExtendedReal, f64)> = Vec::new();
    for p in &account.retained {
        let seq: Vec<f64> = measures.iter().map(|(_, m)| m.mass_at(&p.point)).collect();
        let v = numeric_limit(&seq, cfg.window, cfg.tol).value()?;
        if v > cfg.tol {
            atoms.push((p.point.clone(), v));
        }
    }
    if plus > cfg.tol {
        atoms.push((ExtendedReal::PosInf, plus));
    }
    if minus > cfg.tol {
        atoms.push((ExtendedReal::NegInf, minus));
    }
    let total: f64 = atoms.iter().map(|a| a.1).sum();
    if (total - 1.0).abs() > 1e-6 {
        return None;
    }
    DiscreteMeasure::from_atoms(atoms.into_iter().map(|(p, m)| (p, m / total))).ok()
}

/// Weak limit on `ℝ̄`, escaped mass included as atoms at `±∞`. The declared
/// limit (or a discovered one when none is declared) is returned only after
/// [`verify_weak_limit`] confirms it.
pub fn extended_limit(family: &MeasureFamily, horizon: u64, cfg: &LimitConfig) -> Option<DiscreteMeasure<f64>> {
    let candidate = family
        .declared_limit_on_rbar::<f64>()
        .or_else(|| discover_candidate(family, horizon, cfg))?;
    verify_weak_limit(family, &candidate, horizon, cfg)
        .is_confirmed()
        .then_some(candidate)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    /// Both sides exist, agree, and the measure side is a probability on `ℝ`.
    Coincides,
    /// Both sides exist on `ℝ` but disagree.
    Mismatch,
    /// The sequence converges but no limit measure on `ℝ` evaluates it at an
    /// event of `ℝ`.
    LimitNotAProbability,
    NoNumericLimit,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::Coincides => "coincides",
            Classification::Mismatch => "mismatch",
            Classification::LimitNotAProbability => "limit_not_a_probability",
            Classification::NoNumericLimit => "no_numeric_limit",
        })
    }
}

/// `limₙ[ρₙ(Eₙ)]` next to `[limₙ ρₙ](E)` on `ℝ` and on `ℝ̄`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoincidenceReport {
    pub family: String,
    pub rule: String,
    pub horizon: u64,
    pub tol: f64,
    pub numeric_limit: Option<f64>,
    /// Last few terms of `ρₙ(Eₙ)`.
    pub path_tail: Vec<f64>,
    #[serde(rename = "limit_measure_R")]
    pub limit_measure_r: Option<DiscreteMeasure<f64>>,
    #[serde(rename = "limit_measure_Rbar")]
    pub limit_measure_rbar: Option<DiscreteMeasure<f64>>,
    pub weak_limit_verdict: Option<WeakLimitVerdict>,
    pub limit_event: LimitEvent,
    pub classification: Classification,
    #[serde(rename = "measure_side_R")]
    pub measure_side_r: Option<f64>,
    #[serde(rename = "measure_side_Rbar")]
    pub measure_side_rbar: Option<f64>,
}

pub fn coincidence_report(
    family: &MeasureFamily,
    rule: &EventRule,
    horizon: u64,
    cfg: &LimitConfig,
) -> CoincidenceReport {
    let horizon = horizon.max(1);
    let path: Vec<f64> = probability_path(family, rule, horizon);
    let numeric = numeric_limit(&path, cfg.window, cfg.tol).value();

    let verdict = family
        .declared_limit_on_r::<f64>()
        .map(|cand| (verify_weak_limit(family, &cand, horizon, cfg), cand));
    let limit_measure_r = verdict
        .as_ref()
        .and_then(|(v, cand)| v.is_confirmed().then(|| cand.clone()));
    let limit_measure_rbar = extended_limit(family, horizon, cfg);
    let limit_event = rule.limit_event().clone();

    let measure_side_r = match (&limit_measure_r, limit_event.in_real()) {
        (Some(m), Some(e)) => Some(m.measure_of(e)),
        _ => None,
    };
    let measure_side_rbar = match (&limit_measure_rbar, limit_event.event()) {
        (Some(m), Some(e)) => Some(m.measure_of(e)),
        _ => None,
    };

    let classification = match (numeric, measure_side_r) {
        (None, _) => Classification::NoNumericLimit,
        (Some(a), Some(b)) if (a - b).abs() <= cfg.tol => Classification::Coincides,
        (Some(_), Some(_)) => Classification::Mismatch,
        (Some(_), None) => Classification::LimitNotAProbability,
    };

    let tail_len = path.len().min(5);
    CoincidenceReport {
        family: family.to_string(),
        rule: format!("{}(seed={})", rule.name, rule.seed),
        horizon,
        tol: cfg.tol,
        numeric_limit: numeric,
        path_tail: path[path.len() - tail_len..].to_vec(),
        limit_measure_r,
        limit_measure_rbar,
        weak_limit_verdict: verdict.map(|(v, _)| v),
        limit_event,
        classification,
        measure_side_r,
        measure_side_rbar,
    }
}

/// One index of the identity `λₙ({0}) − γₙ({0}) = μₙ((−∞, n))`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityRow {
    pub n: u64,
    /// `λₙ({0})`
    #[serde(serialize_with = "serialize_rational")]
    pub marginal_zero: BigRational,
    /// `γₙ({0})`
    #[serde(serialize_with = "serialize_rational")]
    pub running_max_zero: BigRational,
    #[serde(serialize_with = "serialize_rational")]
    pub lhs: BigRational,
    /// `μₙ((−∞, n))`
    #[serde(serialize_with = "serialize_rational")]
    pub rhs: BigRational,
    #[serde(serialize_with = "serialize_rational")]
    pub residual: BigRational,
    /// `q − qⁿ`
    #[serde(serialize_with = "serialize_rational")]
    pub closed_form: BigRational,
}

/// Limit probabilities of both sides computed on `ℝ̄`, shown side by side.
/// They are reported, not compared.
///
/// Values come from each family's declared limit on `ℝ̄`; the verdicts say
/// whether the scan up to the horizon confirms those limits. Escape of mass
/// is slow to settle, so short horizons can leave a verdict inconclusive.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtendedPair {
    /// `[limₙ λₙ]({0})`
    pub marginal_limit_probability: f64,
    /// `[limₙ μₙ](ℝ)`
    pub record_limit_probability_on_r: f64,
    pub marginal_verdict: WeakLimitVerdict,
    pub record_verdict: WeakLimitVerdict,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InconsistencyReport {
    #[serde(serialize_with = "serialize_rational")]
    pub q: BigRational,
    pub horizon: u64,
    pub rows: Vec<IdentityRow>,
    pub all_residuals_zero: bool,
    /// `limₙ[λₙ({0}) − γₙ({0})]`
    pub lhs_numeric_limit: NumericLimit,
    /// `limₙ[μₙ((−∞, n))]`
    pub rhs_numeric_limit: NumericLimit,
    /// `limₙ |λₙ({0}) − μₙ((−∞, n))| = limₙ γₙ({0})`
    pub gap_numeric_limit: NumericLimit,
    /// `(bernoulli_marginal, identity {0})`
    pub marginal_report: CoincidenceReport,
    /// `(record_index, ray_growth)`
    pub record_report: CoincidenceReport,
    pub extended_pair: ExtendedPair,
}

/// Exact per-`n` identity rows, and the limits of both sides.
pub fn identity_row(q: &BigRational, n: u64) -> Result<IdentityRow> {
    use crate::families::{bernoulli_marginal, record_index, running_max};
    let zero = EventSet::singleton(0);
    let marginal_zero = bernoulli_marginal::<BigRational>(q, n)?.measure_of(&zero);
    let running_max_zero = running_max::<BigRational>(q, n)?.measure_of(&zero);
    let rhs = record_index::<BigRational>(q, n)?.measure_of(&EventRule::ray_growth().apply(n));
    let lhs = &marginal_zero - &running_max_zero;
    let residual = &lhs - &rhs;
    let closed_form = q - num_traits::pow(q.clone(), n as usize);
    Ok(IdentityRow {
        n,
        marginal_zero,
        running_max_zero,
        lhs,
        rhs,
        residual,
        closed_form,
    })
}

pub fn inconsistency_demo(q: &BigRational, horizon: u64, cfg: &LimitConfig) -> Result<InconsistencyReport> {
    if horizon == 0 {
        return Err(Error::param("horizon N must be at least 1"));
    }
    let marginal = MeasureFamily::bernoulli_marginal(q.clone())?;
    let record = MeasureFamily::record_index(q.clone())?;
    let rows: Vec<IdentityRow> = (1..=horizon)
        .into_par_iter()
        .map(|n| identity_row(q, n))
        .collect::<Result<_>>()?;
    let all_residuals_zero = rows.iter().all(|r| r.residual.is_zero());
    let lhs: Vec<f64> = rows.iter().map(|r| Mass::to_f64(&r.lhs)).collect();
    let rhs: Vec<f64> = rows.iter().map(|r| Mass::to_f64(&r.rhs)).collect();
    let gap: Vec<f64> = rows
        .iter()
        .map(|r| Mass::to_f64(&(&r.marginal_zero - &r.rhs).abs()))
        .collect();

    let zero_rule = EventRule::identity(EventSet::singleton(0));
    let marginal_report = coincidence_report(&marginal, &zero_rule, horizon, cfg);
    let record_report = coincidence_report(&record, &EventRule::ray_growth(), horizon, cfg);
    let marginal_limit = marginal
        .declared_limit_on_rbar::<f64>()
        .expect("bernoulli marginal declares its limit");
    let record_limit = record
        .declared_limit_on_rbar::<f64>()
        .expect("record index declares its limit on the extended line");
    let extended_pair = ExtendedPair {
        marginal_limit_probability: marginal_limit.measure_of(&EventSet::singleton(0)),
        record_limit_probability_on_r: record_limit.measure_of(&EventSet::real_line()),
        marginal_verdict: verify_weak_limit(&marginal, &marginal_limit, horizon, cfg),
        record_verdict: verify_weak_limit(&record, &record_limit, horizon, cfg),
    };

    Ok(InconsistencyReport {
        q: q.clone(),
        horizon,
        rows,
        all_residuals_zero,
        lhs_numeric_limit: numeric_limit(&lhs, cfg.window, cfg.tol),
        rhs_numeric_limit: numeric_limit(&rhs, cfg.window, cfg.tol),
        gap_numeric_limit: numeric_limit(&gap, cfg.window, cfg.tol),
        marginal_report,
        record_report,
        extended_pair,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn half() -> BigRational {
        r(1, 2)
    }

    #[test]
    fn numeric_limit_cases() {
        let q: f64 = 0.5;
        let rising: Vec<f64> = (1..=200).map(|n| q - q.powi(n)).collect();
        assert_eq!(numeric_limit(&rising, 20, 1e-9), NumericLimit::Limit(0.5));
        let falling: Vec<f64> = (1..=200).map(|n| 1.0 - q + q.powi(n)).collect();
        assert_eq!(numeric_limit(&falling, 20, 1e-9), NumericLimit::Limit(0.5));
        let alternating: Vec<f64> = (0..200).map(|n| (n % 2) as f64).collect();
        assert_eq!(numeric_limit(&alternating, 20, 1e-9), NumericLimit::NoLimit);
        assert_eq!(numeric_limit(&[], 20, 1e-9), NumericLimit::NoLimit);
        assert_eq!(numeric_limit(&[0.3], 20, 1e-9), NumericLimit::Limit(0.3));
    }

    #[test]
    fn probability_paths() {
        let record = MeasureFamily::record_index(half()).unwrap();
        let path: Vec<BigRational> = probability_path(&record, &EventRule::ray_growth(), 3);
        assert_eq!(path, vec![r(0, 1), r(1, 4), r(3, 8)]);

        let walk = MeasureFamily::dirac_walk();
        let path: Vec<f64> = probability_path(&walk, &EventRule::singleton_shift(), 50);
        assert!(path.iter().all(|&v| v == 1.0));

        let recip = MeasureFamily::dirac_recip();
        let rule = EventRule::identity("(-inf,0]".parse().unwrap());
        let path: Vec<f64> = probability_path(&recip, &rule, 50);
        assert!(path.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn record_path_is_q_minus_q_to_the_n_and_increasing() {
        for k in 1..=9 {
            let q = r(k, 10);
            let fam = MeasureFamily::record_index(q.clone()).unwrap();
            let path: Vec<BigRational> = probability_path(&fam, &EventRule::ray_growth(), 40);
            for (i, v) in path.iter().enumerate() {
                let n = i + 1;
                assert_eq!(*v, &q - num_traits::pow(q.clone(), n));
            }
            assert!(path.windows(2).all(|w| w[0] < w[1]));
            assert!(path.iter().all(|v| *v < q));
        }
    }

    #[test]
    fn tightness_verdicts() {
        let b_max = r(100, 1);
        for fam in [
            MeasureFamily::bernoulli_marginal(half()).unwrap(),
            MeasureFamily::running_max(r(3, 10)).unwrap(),
        ] {
            for eps in [0.1, 0.01, 0.5] {
                let v = tightness_check(&fam, eps, 200, &b_max).unwrap();
                assert_eq!(v.interval(), Some(&EventSet::closed(0, 1)), "{fam} eps={eps}");
            }
        }

        let record = MeasureFamily::record_index(half()).unwrap();
        let v = tightness_check(&record, 0.5, 200, &r(100, 1)).unwrap();
        let TightnessOutcome::NotTight { witness } = &v.outcome else {
            panic!("record index must not be tight");
        };
        assert_eq!(witness.len(), 101);
        for w in witness {
            // first escaping index is the next integer beyond b; the mass outside is μₙ({n})
            assert_eq!(BigRational::from_integer(w.n.into()), w.bound.floor() + BigRational::one());
            let expected = 0.5 + 0.5f64.powi(w.n as i32);
            assert!((w.mass_outside - expected).abs() < 1e-15);
            assert!(w.mass_outside >= 0.5);
        }

        let walk = MeasureFamily::dirac_walk();
        assert!(!tightness_check(&walk, 0.5, 100, &r(50, 1)).unwrap().is_tight());
        // with bounds reaching past the horizon the finite scan cannot see escape
        assert!(tightness_check(&walk, 0.5, 100, &r(100, 1)).unwrap().is_tight());
    }

    #[test]
    fn tightness_errors() {
        let fam = MeasureFamily::dirac_walk();
        assert!(tightness_check(&fam, 0.0, 10, &r(5, 1)).is_err());
        assert!(tightness_check(&fam, 1.0, 10, &r(5, 1)).is_err());
        assert!(tightness_check(&fam, 0.5, 0, &r(5, 1)).is_err());
        assert!(tightness_check(&fam, 0.5, 10, &r(-5, 1)).is_err());
    }

    #[test]
    fn tightness_is_monotone_in_epsilon() {
        let fam = MeasureFamily::running_max(r(9, 10)).unwrap();
        let eps_values = [0.05, 0.1, 0.3, 0.6, 0.95];
        for (i, &eps) in eps_values.iter().enumerate() {
            let v = tightness_check(&fam, eps, 100, &r(10, 1)).unwrap();
            let TightnessOutcome::Tight { interval, .. } = &v.outcome else {
                panic!("running max is tight");
            };
            for &bigger in &eps_values[i..] {
                let w = tightness_check(&fam, bigger, 100, &r(10, 1)).unwrap();
                assert!(w.interval().unwrap().is_subset_of(interval));
                let outside = interval.complement(crate::events::Universe::Extended);
                let sup = (1..=100)
                    .map(|n| fam.measure::<f64>(n).measure_of(&outside))
                    .fold(0.0, f64::max);
                assert!(sup < bigger);
            }
        }
    }

    #[test]
    fn escape_accounts() {
        let cfg = LimitConfig::default();
        let ladder = Ladder::for_horizon(200);
        let record = escaped_mass(&MeasureFamily::record_index(half()).unwrap(), &ladder, &cfg);
        assert!((record.mass_to_plus_inf.value().unwrap() - 1.0).abs() < 1e-9);
        assert_eq!(record.mass_to_minus_inf, NumericLimit::Limit(0.0));

        let walk = escaped_mass(&MeasureFamily::dirac_walk(), &ladder, &cfg);
        assert_eq!(walk.mass_to_plus_inf, NumericLimit::Limit(1.0));
        assert!(walk.retained.is_empty());

        let bern = escaped_mass(&MeasureFamily::bernoulli_marginal(r(3, 10)).unwrap(), &ladder, &cfg);
        assert_eq!(bern.mass_to_plus_inf, NumericLimit::Limit(0.0));
        assert_eq!(bern.mass_to_minus_inf, NumericLimit::Limit(0.0));
        assert_eq!(bern.retained.len(), 2);
        assert!((bern.retained[0].mass - 0.3).abs() < 1e-15);

        for acc in [&record, &walk, &bern] {
            let total = acc.mass_to_plus_inf.value().unwrap()
                + acc.mass_to_minus_inf.value().unwrap()
                + acc.retained_total;
            assert!((total - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn ladder_validation() {
        let rung = |n: u64, b: i64| Rung {
            horizon: n,
            bound: r(b, 1),
        };
        assert!(Ladder::new(vec![rung(10, 1), rung(20, 2)]).is_ok());
        assert!(Ladder::new(vec![rung(20, 1), rung(10, 2)]).is_err());
        assert!(Ladder::new(vec![rung(10, 2), rung(20, 2)]).is_err());
        assert!(Ladder::new(vec![]).is_err());
        assert!(Ladder::new(vec![rung(0, 1)]).is_err());
        let small = Ladder::for_horizon(3);
        assert!(!small.rungs().is_empty());
        assert_eq!(Ladder::for_horizon(200).rungs().len(), 4);
    }

    #[test]
    fn weak_limit_verification() {
        let cfg = LimitConfig::default();
        let recip = MeasureFamily::dirac_recip();
        let zero = DiscreteMeasure::dirac(ExtendedReal::from_int(0));
        assert!(verify_weak_limit(&recip, &zero, 200, &cfg).is_confirmed());

        let rmax = MeasureFamily::running_max(half()).unwrap();
        let one = DiscreteMeasure::dirac(ExtendedReal::from_int(1));
        assert!(verify_weak_limit(&rmax, &one, 200, &cfg).is_confirmed());

        let record = MeasureFamily::record_index(half()).unwrap();
        for cand in [zero.clone(), one.clone(), record.measure::<f64>(200)] {
            assert!(verify_weak_limit(&record, &cand, 200, &cfg).is_refuted());
        }
        let inf = DiscreteMeasure::dirac(ExtendedReal::PosInf);
        assert!(verify_weak_limit(&record, &inf, 200, &cfg).is_confirmed());
    }

    #[test]
    fn declared_limits_confirm_and_perturbations_refute() {
        let cfg = LimitConfig::default();
        let families = [
            MeasureFamily::bernoulli_marginal(r(3, 10)).unwrap(),
            MeasureFamily::running_max(half()).unwrap(),
            MeasureFamily::dirac_recip(),
        ];
        for fam in &families {
            let declared = fam.declared_limit_on_r::<f64>().unwrap();
            assert!(verify_weak_limit(fam, &declared, 200, &cfg).is_confirmed(), "{fam}");

            // move 0.05 of mass from the heaviest atom to a neighbour
            let atoms = declared.atoms();
            let heavy = atoms
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.mass.partial_cmp(&b.1.mass).unwrap())
                .unwrap()
                .0;
            let mut perturbed: Vec<(ExtendedReal, f64)> =
                atoms.iter().map(|a| (a.point.clone(), a.mass)).collect();
            perturbed[heavy].1 -= 0.05;
            if atoms.len() > 1 {
                let other = if heavy == 0 { 1 } else { 0 };
                perturbed[other].1 += 0.05;
            } else {
                let p = atoms[0].point.shifted(&BigRational::one());
                perturbed.push((p, 0.05));
            }
            let perturbed = DiscreteMeasure::from_atoms(perturbed).unwrap();
            assert!(verify_weak_limit(fam, &perturbed, 200, &cfg).is_refuted(), "{fam}");
        }
    }

    #[test]
    fn slow_convergence_is_inconclusive() {
        let fam = MeasureFamily::running_max(r(99, 100)).unwrap();
        let one = DiscreteMeasure::dirac(ExtendedReal::from_int(1));
        let v = verify_weak_limit(&fam, &one, 200, &LimitConfig::default());
        assert!(matches!(v, WeakLimitVerdict::Inconclusive { .. }), "{v:?}");
    }

    #[test]
    fn extended_limits() {
        let cfg = LimitConfig::default();
        let record = MeasureFamily::record_index(half()).unwrap();
        let inf: DiscreteMeasure<f64> = DiscreteMeasure::dirac(ExtendedReal::PosInf);
        assert_eq!(extended_limit(&record, 200, &cfg), Some(inf.clone()));
        assert_eq!(extended_limit(&MeasureFamily::dirac_walk(), 200, &cfg), Some(inf));
        let bern = MeasureFamily::bernoulli_marginal(r(3, 10)).unwrap();
        let lim = extended_limit(&bern, 200, &cfg).unwrap();
        assert_eq!(lim, bern.measure::<f64>(1));
        for fam in [record, bern] {
            assert!((extended_limit(&fam, 200, &cfg).unwrap().total() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn discovery_recovers_declared_limits() {
        let cfg = LimitConfig::default();
        let record = MeasureFamily::record_index(half()).unwrap();
        assert_eq!(
            discover_candidate(&record, 200, &cfg),
            Some(DiscreteMeasure::dirac(ExtendedReal::PosInf))
        );
        let rmax = MeasureFamily::running_max(half()).unwrap();
        assert_eq!(
            discover_candidate(&rmax, 200, &cfg),
            Some(DiscreteMeasure::dirac(ExtendedReal::from_int(1)))
        );
    }

    #[test]
    fn coincidence_classifications() {
        let cfg = LimitConfig::default();
        let n = 200;
        let q = half();

        let ex1 = coincidence_report(&MeasureFamily::dirac_walk(), &EventRule::singleton_shift(), n, &cfg);
        assert_eq!(ex1.classification, Classification::LimitNotAProbability);
        assert_eq!(ex1.numeric_limit, Some(1.0));
        assert!(ex1.limit_event.in_real().is_none());

        let ex2 = coincidence_report(
            &MeasureFamily::dirac_recip(),
            &EventRule::identity("(-inf,0]".parse().unwrap()),
            n,
            &cfg,
        );
        assert_eq!(ex2.classification, Classification::Mismatch);
        assert_eq!(ex2.numeric_limit, Some(0.0));
        assert_eq!(ex2.measure_side_r, Some(1.0));

        let ex3 = coincidence_report(&MeasureFamily::dirac_recip(), &EventRule::singleton_shift(), n, &cfg);
        assert_eq!(ex3.classification, Classification::LimitNotAProbability);
        assert_eq!(ex3.numeric_limit, Some(0.0));

        let record = MeasureFamily::record_index(q.clone()).unwrap();
        let ex5a = coincidence_report(&record, &EventRule::singleton_shift(), n, &cfg);
        assert_eq!(ex5a.classification, Classification::LimitNotAProbability);
        assert!((ex5a.numeric_limit.unwrap() - 0.5).abs() < 1e-9);
        let ex5b = coincidence_report(&record, &EventRule::ray_growth(), n, &cfg);
        assert_eq!(ex5b.classification, Classification::LimitNotAProbability);
        assert!((ex5b.numeric_limit.unwrap() - 0.5).abs() < 1e-9);
        assert_eq!(ex5b.measure_side_rbar, Some(0.0));

        let ex7 = coincidence_report(
            &MeasureFamily::bernoulli_marginal(r(3, 10)).unwrap(),
            &EventRule::identity(EventSet::singleton(0)),
            n,
            &cfg,
        );
        assert_eq!(ex7.classification, Classification::Coincides);
        assert!((ex7.numeric_limit.unwrap() - 0.3).abs() < 1e-12);
        assert!((ex7.measure_side_r.unwrap() - 0.3).abs() < 1e-12);

        for a in [0, 1] {
            let ex8 = coincidence_report(
                &MeasureFamily::running_max(q.clone()).unwrap(),
                &EventRule::identity(EventSet::singleton(a)),
                n,
                &cfg,
            );
            assert_eq!(ex8.classification, Classification::Coincides, "a={a}");
            assert_eq!(ex8.measure_side_r, Some(a as f64));
        }
    }

    #[test]
    fn oscillating_path_has_no_numeric_limit() {
        // δ_{1/n} on {1/2} u {1/4}: hits only at n = 2 and n = 4, then zero
        let rule = EventRule::identity("{1/2, 1/4}".parse().unwrap());
        let rep = coincidence_report(&MeasureFamily::dirac_recip(), &rule, 5, &LimitConfig::default());
        assert_eq!(rep.classification, Classification::NoNumericLimit);
    }

    #[test]
    fn identity_rows_and_demo() {
        let row = identity_row(&half(), 3).unwrap();
        assert_eq!(row.lhs, r(3, 8));
        assert_eq!(row.rhs, r(3, 8));
        assert!(row.residual.is_zero());
        let row = identity_row(&r(3, 10), 5).unwrap();
        assert!(row.residual.is_zero());
        assert_eq!(row.rhs, r(3, 10) - num_traits::pow(r(3, 10), 5));
        let row = identity_row(&half(), 1).unwrap();
        assert!(row.lhs.is_zero() && row.rhs.is_zero());

        let demo = inconsistency_demo(&half(), 200, &LimitConfig::default()).unwrap();
        assert!(demo.all_residuals_zero);
        assert!((demo.lhs_numeric_limit.value().unwrap() - 0.5).abs() < 1e-9);
        assert!((demo.rhs_numeric_limit.value().unwrap() - 0.5).abs() < 1e-9);
        assert!(demo.gap_numeric_limit.value().unwrap() < 1e-9);
        assert_eq!(demo.marginal_report.classification, Classification::Coincides);
        assert_eq!(demo.record_report.classification, Classification::LimitNotAProbability);
        assert_eq!(demo.extended_pair.marginal_limit_probability, 0.5);
        assert_eq!(demo.extended_pair.record_limit_probability_on_r, 0.0);
        assert!(demo.extended_pair.marginal_verdict.is_confirmed());
        assert!(demo.extended_pair.record_verdict.is_confirmed());

        // at a short horizon the escape has not settled within tol
        let short = inconsistency_demo(&half(), 50, &LimitConfig::default()).unwrap();
        assert_eq!(short.extended_pair.record_limit_probability_on_r, 0.0);
        assert!(matches!(short.extended_pair.record_verdict, WeakLimitVerdict::Inconclusive { .. }));
        assert!(inconsistency_demo(&half(), 0, &LimitConfig::default()).is_err());
        assert!(inconsistency_demo(&r(1, 1), 10, &LimitConfig::default()).is_err());
    }
}
