//! Ground truth for the Bernoulli-trial families: exact enumeration of all
//! `2ⁿ` trial strings, and seeded Monte Carlo simulation.
//!
//! A trial fails (`Xⱼ = 0`) with probability `q` and succeeds with `1 − q`.
//! `Yₙ` is the running maximum and `Zₙ` the last index attaining it, which is
//! `n` when every trial fails.

use std::collections::BTreeMap;
use std::io::Write;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::distr::{Bernoulli, Distribution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::convergence::identity_row;
use crate::error::{Error, Result};
use crate::events::{EventRule, EventSet};
use crate::extreal::ExtendedReal;
use crate::families::{bernoulli_marginal, record_index, running_max};
use crate::measure::{DiscreteMeasure, Mass};

/// Largest `n` for which all `2ⁿ` strings are enumerated.
pub const ENUMERATION_BOUND: u64 = 20;

pub const DEFAULT_WORKERS: usize = 8;

/// Outcomes `X₁ … Xₙ` packed into bits: bit `j − 1` holds `Xⱼ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TrialString {
    bits: u32,
    len: u32,
}

impl TrialString {
    pub fn new(bits: u32, len: u32) -> Result<Self> {
        if len == 0 || u64::from(len) > ENUMERATION_BOUND {
            return Err(Error::Capacity {
                n: u64::from(len),
                max: ENUMERATION_BOUND,
            });
        }
        if bits >> len != 0 {
            return Err(Error::param(format!("bits {bits:#b} do not fit in {len} trials")));
        }
        Ok(TrialString { bits, len })
    }

    /// Every string of length `n`, in counting order.
    pub fn all(n: u32) -> Result<impl Iterator<Item = TrialString>> {
        TrialString::new(0, n)?;
        Ok((0..1u32 << n).map(move |bits| TrialString { bits, len: n }))
    }

    pub fn len(&self) -> u32 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// `Xⱼ` for `1 ≤ j ≤ n`.
    pub fn x(&self, j: u32) -> u8 {
        assert!(j >= 1 && j <= self.len, "trial index {j} outside 1..={}", self.len);
        ((self.bits >> (j - 1)) & 1) as u8
    }

    /// `Yₙ = max Xⱼ`.
    pub fn y(&self) -> u8 {
        u8::from(self.bits != 0)
    }

    /// `Zₙ = max{j : Xⱼ = Yₙ}`.
    pub fn z(&self) -> u32 {
        if self.bits == 0 {
            self.len
        } else {
            32 - self.bits.leading_zeros()
        }
    }

    pub fn zeros(&self) -> u32 {
        self.len - self.bits.count_ones()
    }

    /// `q^{#zeros} (1 − q)^{#ones}`.
    pub fn probability(&self, q: &BigRational) -> BigRational {
        let zeros = self.zeros() as usize;
        num_traits::pow(q.clone(), zeros) * num_traits::pow(BigRational::one() - q, self.len as usize - zeros)
    }
}

/// Exact laws of `Xₙ`, `Yₙ` and `Zₙ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExactPmfs {
    pub x: DiscreteMeasure<BigRational>,
    pub y: DiscreteMeasure<BigRational>,
    pub z: DiscreteMeasure<BigRational>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variable {
    X,
    Y,
    Z,
}

impl Variable {
    pub fn from_name(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "x" => Ok(Variable::X),
            "y" => Ok(Variable::Y),
            "z" => Ok(Variable::Z),
            other => Err(Error::param(format!("unknown variable {other:?}, expected x, y or z"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Variable::X => "x",
            Variable::Y => "y",
            Variable::Z => "z",
        }
    }
}

impl ExactPmfs {
    pub fn get(&self, var: Variable) -> &DiscreteMeasure<BigRational> {
        match var {
            Variable::X => &self.x,
            Variable::Y => &self.y,
            Variable::Z => &self.z,
        }
    }
}

fn check_q(q: &BigRational) -> Result<()> {
    if *q <= BigRational::zero() || *q >= BigRational::one() {
        return Err(Error::param(format!("q must lie in (0,1), got {q}")));
    }
    Ok(())
}

fn check_enumerable(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::param("n must be at least 1"));
    }
    if n > ENUMERATION_BOUND {
        return Err(Error::Capacity {
            n,
            max: ENUMERATION_BOUND,
        });
    }
    Ok(())
}

/// String counts by `(value, #zeros)` for each of `Xₙ`, `Yₙ`, `Zₙ`.
#[derive(Clone)]
struct Tally {
    x: Vec<Vec<u64>>,
    y: Vec<Vec<u64>>,
    z: Vec<Vec<u64>>,
}

impl Tally {
    fn new(n: usize) -> Self {
        Tally {
            x: vec![vec![0; n + 1]; 2],
            y: vec![vec![0; n + 1]; 2],
            z: vec![vec![0; n + 1]; n + 1],
        }
    }

    fn add(mut self, s: TrialString) -> Self {
        let zeros = s.zeros() as usize;
        self.x[s.x(s.len()) as usize][zeros] += 1;
        self.y[s.y() as usize][zeros] += 1;
        self.z[s.z() as usize][zeros] += 1;
        self
    }

    fn merge(mut self, other: Tally) -> Self {
        for (a, b) in [(&mut self.x, other.x), (&mut self.y, other.y), (&mut self.z, other.z)] {
            for (row_a, row_b) in a.iter_mut().zip(b) {
                for (ca, cb) in row_a.iter_mut().zip(row_b) {
                    *ca += cb;
                }
            }
        }
        self
    }
}

fn counts_to_pmf(counts: &[Vec<u64>], weights: &[BigRational]) -> Result<DiscreteMeasure<BigRational>> {
    DiscreteMeasure::from_atoms(counts.iter().enumerate().map(|(value, row)| {
        let mass = row
            .iter()
            .zip(weights)
            .filter(|(c, _)| **c > 0)
            .fold(BigRational::zero(), |acc, (c, w)| acc + w * BigRational::from_integer((*c).into()));
        (ExtendedReal::from_int(value as i64), mass)
    }))
}

/// Sums string probabilities over all `2ⁿ` strings. Work is sharded across
/// threads; shards merge by adding integer counts, so the result does not
/// depend on the split.
pub fn enumerate_exact(q: &BigRational, n: u64) -> Result<ExactPmfs> {
    check_q(q)?;
    check_enumerable(n)?;
    let len = n as u32;
    let nu = n as usize;
    let tally = (0..1u32 << len)
        .into_par_iter()
        .fold(
            || Tally::new(nu),
            |t, bits| t.add(TrialString { bits, len }),
        )
        .reduce(|| Tally::new(nu), Tally::merge);

    // weight of one string with `z` zeros
    let p = BigRational::one() - q;
    let weights: Vec<BigRational> = (0..=nu)
        .map(|z| num_traits::pow(q.clone(), z) * num_traits::pow(p.clone(), nu - z))
        .collect();
    Ok(ExactPmfs {
        x: counts_to_pmf(&tally.x, &weights)?,
        y: counts_to_pmf(&tally.y, &weights)?,
        z: counts_to_pmf(&tally.z, &weights)?,
    })
}

/// Closed-form laws of `Xₙ`, `Yₙ`, `Zₙ` from [`crate::families`].
pub fn closed_form_pmfs(q: &BigRational, n: u64) -> Result<ExactPmfs> {
    Ok(ExactPmfs {
        x: bernoulli_marginal(q, n)?,
        y: running_max(q, n)?,
        z: record_index(q, n)?,
    })
}

/// String-by-string check that `{Xₙ = 0}` is the disjoint union of
/// `{Zₙ < n}` and `{Yₙ = 0}`. Returns the first violating string, if any.
pub fn partition_check(n: u32) -> Result<Option<TrialString>> {
    Ok(TrialString::all(n)?.find(|s| {
        let last_fails = s.x(n) == 0;
        let early_record = s.z() < n;
        let all_fail = s.y() == 0;
        last_fails != (early_record || all_fail) || (early_record && all_fail)
    }))
}

/// Empirical counts of one variable.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EmpiricalPmf {
    pub counts: BTreeMap<u32, u64>,
    pub trials: u64,
    pub seed: u64,
}

impl EmpiricalPmf {
    pub fn frequency(&self, value: u32) -> f64 {
        self.counts.get(&value).copied().unwrap_or(0) as f64 / self.trials as f64
    }

    pub fn frequencies(&self) -> BTreeMap<u32, f64> {
        self.counts.keys().map(|&v| (v, self.frequency(v))).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Simulation {
    pub q: String,
    pub n: u64,
    pub workers: usize,
    pub x: EmpiricalPmf,
    pub y: EmpiricalPmf,
    pub z: EmpiricalPmf,
}

impl Simulation {
    pub fn get(&self, var: Variable) -> &EmpiricalPmf {
        match var {
            Variable::X => &self.x,
            Variable::Y => &self.y,
            Variable::Z => &self.z,
        }
    }
}

type Counts = [BTreeMap<u32, u64>; 3];

fn simulate_shard(success: &Bernoulli, n: u64, trials: u64, seed: u64, worker: usize) -> Counts {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(worker as u64);
    let mut counts: Counts = Default::default();
    for _ in 0..trials {
        let mut y = 0u32;
        let mut z = n as u32;
        let mut last = 0u32;
        for j in 1..=n as u32 {
            let x = u32::from(success.sample(&mut rng));
            if x == 1 {
                y = 1;
                z = j;
            }
            last = x;
        }
        *counts[0].entry(last).or_default() += 1;
        *counts[1].entry(y).or_default() += 1;
        *counts[2].entry(z).or_default() += 1;
    }
    counts
}

/// Simulates `trials` independent runs of `n` trials.
///
/// Runs are split across `workers` deterministic shards; shard `w` draws
/// from ChaCha8 seeded with `seed` on stream `w`. The counts depend only on
/// `(q, n, trials, seed, workers)`, not on thread scheduling.
pub fn simulate(q: &BigRational, n: u64, trials: u64, seed: u64, workers: usize) -> Result<Simulation> {
    check_q(q)?;
    if n == 0 {
        return Err(Error::param("n must be at least 1"));
    }
    if n > u64::from(u32::MAX) {
        return Err(Error::param("n is too large to simulate"));
    }
    if trials == 0 {
        return Err(Error::param("trials must be at least 1"));
    }
    let workers = workers.max(1);
    let success = Bernoulli::new(Mass::to_f64(&(BigRational::one() - q)))
        .map_err(|e| Error::param(format!("success probability: {e}")))?;
    let base = trials / workers as u64;
    let extra = trials % workers as u64;
    let shards: Vec<Counts> = (0..workers)
        .into_par_iter()
        .map(|w| {
            let share = base + u64::from((w as u64) < extra);
            simulate_shard(&success, n, share, seed, w)
        })
        .collect();
    let mut merged: Counts = Default::default();
    for shard in shards {
        for (acc, part) in merged.iter_mut().zip(shard) {
            for (value, c) in part {
                *acc.entry(value).or_default() += c;
            }
        }
    }
    let [x, y, z] = merged.map(|counts| EmpiricalPmf { counts, trials, seed });
    Ok(Simulation {
        q: crate::extreal::format_rational(q),
        n,
        workers,
        x,
        y,
        z,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IdentityMode {
    /// Both sides from enumeration of all strings; `n ≤` [`ENUMERATION_BOUND`].
    Oracle,
    /// Both sides from the closed-form families; any `n`.
    ClosedForm,
}

/// `λₙ({0}) − γₙ({0}) − μₙ((−∞, n))`, exactly.
pub fn check_identity(q: &BigRational, n: u64, mode: IdentityMode) -> Result<BigRational> {
    match mode {
        IdentityMode::ClosedForm => {
            check_q(q)?;
            if n == 0 {
                return Err(Error::param("n must be at least 1"));
            }
            Ok(identity_row(q, n)?.residual)
        }
        IdentityMode::Oracle => {
            let pmfs = enumerate_exact(q, n)?;
            let zero = EventSet::singleton(0);
            let below_n = EventRule::ray_growth().apply(n);
            Ok(pmfs.x.measure_of(&zero) - pmfs.y.measure_of(&zero) - pmfs.z.measure_of(&below_n))
        }
    }
}

/// One line of a pmf table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PmfRow {
    pub value: u32,
    pub exact: String,
    pub closed_form: String,
    pub empirical: Option<f64>,
    pub abs_err: Option<f64>,
}

/// Enumerated, closed-form and (optionally) simulated pmf of one variable,
/// on the union of their supports.
pub fn pmf_table(
    exact: &DiscreteMeasure<BigRational>,
    closed_form: &DiscreteMeasure<BigRational>,
    empirical: Option<&EmpiricalPmf>,
) -> Vec<PmfRow> {
    let mut values: Vec<u32> = exact
        .atoms()
        .iter()
        .chain(closed_form.atoms())
        .filter_map(|a| a.point.finite().and_then(|v| num_traits::ToPrimitive::to_u32(&v.to_integer())))
        .collect();
    if let Some(e) = empirical {
        values.extend(e.counts.keys());
    }
    values.sort_unstable();
    values.dedup();
    values
        .into_iter()
        .map(|v| {
            let p = ExtendedReal::from_int(i64::from(v));
            let ex = exact.mass_at(&p);
            let freq = empirical.map(|e| e.frequency(v));
            PmfRow {
                value: v,
                exact: ex.format(),
                closed_form: closed_form.mass_at(&p).format(),
                empirical: freq,
                abs_err: freq.map(|f| (f - Mass::to_f64(&ex)).abs()),
            }
        })
        .collect()
}

/// Writes rows under the header `value,exact,closed_form,empirical,abs_err`.
/// Missing empirical columns are left empty.
pub fn write_pmf_csv<W: Write>(rows: &[PmfRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["value", "exact", "closed_form", "empirical", "abs_err"])?;
    for r in rows {
        w.write_record([
            r.value.to_string(),
            r.exact.clone(),
            r.closed_form.clone(),
            r.empirical.map(|f| f.to_string()).unwrap_or_default(),
            r.abs_err.map(|f| f.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
