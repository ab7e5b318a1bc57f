//! Closed-form measure sequences `n ↦ ρₙ` and their declared limits.
//!
//! With `X₁, X₂, …` i.i.d. Bernoulli trials where `P(Xⱼ = 0) = q`:
//!
//! | family              | measure of            | pmf at index `n`                                   |
//! |---------------------|-----------------------|----------------------------------------------------|
//! | `bernoulli_marginal`| `Xₙ`                  | `{0: q, 1: 1−q}`                                   |
//! | `running_max`       | `Yₙ = max Xⱼ`         | `{0: qⁿ, 1: 1−qⁿ}`                                 |
//! | `record_index`      | `Zₙ = max{j: Xⱼ = Yₙ}`| `j<n: (1−q)q^{n−j}`, `j=n: 1−q+qⁿ`                 |
//! | `dirac_walk`        | `Wₙ = n`              | `{n: 1}`                                           |
//! | `dirac_recip`       | `Qₙ = 1/n`            | `{1/n: 1}`                                         |
//! | `binomial_poisson`  | `Vₙ ~ Bin(n, c/n)`    | binomial, tending to Poisson(`c`)                  |

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extreal::{format_rational, parse_rational, ExtendedReal};
use crate::measure::{DiscreteMeasure, Mass};

/// Poisson tail below which the default truncation point is placed.
pub const POISSON_TAIL_TARGET: f64 = 1e-15;

fn check_open_unit(name: &str, q: &BigRational) -> Result<()> {
    if q.is_positive() && *q < BigRational::one() {
        Ok(())
    } else {
        Err(Error::param(format!(
            "{name} must lie in (0,1), got {}",
            format_rational(q)
        )))
    }
}

/// `q^0, q^1, …, q^n`.
fn powers<M: Mass>(q: &M, n: u64) -> Vec<M> {
    let mut out = Vec::with_capacity(n as usize + 1);
    let mut acc = M::one();
    out.push(acc.clone());
    for _ in 0..n {
        acc = acc * q.clone();
        out.push(acc.clone());
    }
    out
}

fn int_point(v: u64) -> ExtendedReal {
    ExtendedReal::Finite(BigRational::from_integer(v.into()))
}

fn build<M: Mass>(atoms: Vec<(ExtendedReal, M)>) -> DiscreteMeasure<M> {
    DiscreteMeasure::from_atoms(atoms).expect("closed-form pmf has unit mass")
}

pub fn dirac<M: Mass>(point: ExtendedReal) -> DiscreteMeasure<M> {
    DiscreteMeasure::dirac(point)
}

/// Law of a single trial `Xₙ`: `{(0, q), (1, 1−q)}` for every `n`.
pub fn bernoulli_marginal<M: Mass>(q: &BigRational, _n: u64) -> Result<DiscreteMeasure<M>> {
    check_open_unit("q", q)?;
    let q = M::from_rational(q);
    Ok(build(vec![
        (int_point(0), q.clone()),
        (int_point(1), M::one() - q),
    ]))
}

/// Law of the running maximum `Yₙ`: `{(0, qⁿ), (1, 1−qⁿ)}`.
pub fn running_max<M: Mass>(q: &BigRational, n: u64) -> Result<DiscreteMeasure<M>> {
    check_open_unit("q", q)?;
    check_index(n)?;
    let qn = num_traits::pow(M::from_rational(q), n as usize);
    Ok(build(vec![
        (int_point(0), qn.clone()),
        (int_point(1), M::one() - qn),
    ]))
}

/// Law of the record index `Zₙ`: mass `(1−q)q^{n−j}` at `j < n` and
/// `1−q+qⁿ` at `j = n`.
pub fn record_index<M: Mass>(q: &BigRational, n: u64) -> Result<DiscreteMeasure<M>> {
    check_open_unit("q", q)?;
    check_index(n)?;
    let qm = M::from_rational(q);
    let p = M::one() - qm.clone();
    let pw = powers(&qm, n);
    let mut atoms: Vec<(ExtendedReal, M)> = (1..n)
        .map(|j| (int_point(j), p.clone() * pw[(n - j) as usize].clone()))
        .collect();
    atoms.push((int_point(n), p + pw[n as usize].clone()));
    Ok(build(atoms))
}

/// `δₙ`, unit mass at `n`.
pub fn dirac_walk<M: Mass>(n: u64) -> Result<DiscreteMeasure<M>> {
    check_index(n)?;
    Ok(dirac(int_point(n)))
}

/// `δ_{1/n}`, unit mass at `1/n`.
pub fn dirac_recip<M: Mass>(n: u64) -> Result<DiscreteMeasure<M>> {
    check_index(n)?;
    Ok(dirac(ExtendedReal::Finite(BigRational::new(
        1.into(),
        n.into(),
    ))))
}

/// `Bin(n, p)`. Masses come from the ratio recurrence around the mode and
/// are normalised at the end, which is exact in rational mode and avoids
/// underflow of `(1−p)ⁿ` in float mode.
pub fn binomial<M: Mass>(n: u64, p: &BigRational) -> Result<DiscreteMeasure<M>> {
    check_index(n)?;
    if p.is_negative() || *p > BigRational::one() {
        return Err(Error::param(format!(
            "p must lie in [0,1], got {}",
            format_rational(p)
        )));
    }
    if p.is_zero() {
        return Ok(dirac(int_point(0)));
    }
    if p.is_one() {
        return Ok(dirac(int_point(n)));
    }
    let odds = M::from_rational(&(p / (BigRational::one() - p)));
    let mode = ((BigRational::from_integer((n + 1).into()) * p).floor())
        .to_integer()
        .try_into()
        .map(|m: u64| m.min(n))
        .unwrap_or(n);

    let mut weights = vec![M::zero(); n as usize + 1];
    weights[mode as usize] = M::one();
    for k in mode..n {
        // w(k+1) = w(k) · (n−k)/(k+1) · p/(1−p)
        let ratio = M::from_rational(&BigRational::new((n - k).into(), (k + 1).into()));
        weights[k as usize + 1] = weights[k as usize].clone() * ratio * odds.clone();
    }
    for k in (1..=mode).rev() {
        // w(k−1) = w(k) · k/(n−k+1) · (1−p)/p
        let ratio = M::from_rational(&BigRational::new(k.into(), (n - k + 1).into()));
        weights[k as usize - 1] = weights[k as usize].clone() * ratio / odds.clone();
    }
    let total = weights.iter().fold(M::zero(), |acc, w| acc + w.clone());
    Ok(build(
        weights
            .into_iter()
            .enumerate()
            .map(|(k, w)| (int_point(k as u64), w / total.clone()))
            .collect(),
    ))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailPolicy {
    /// Put the whole tail `P(V ≥ k_max)` on the atom `k_max`.
    #[default]
    LumpAtKmax,
    /// Rescale the kept masses to sum to one.
    Renormalize,
}

fn ln_factorial(k: u64) -> f64 {
    (2..=k).map(|j| (j as f64).ln()).sum()
}

/// Untruncated Poisson(`c`) masses for `k = 0..=k_max`, evaluated in `f64`
/// through logarithms.
pub fn poisson_pmf_prefix(c: &BigRational, k_max: u64) -> Result<Vec<f64>> {
    if !c.is_positive() {
        return Err(Error::param(format!(
            "c must be positive, got {}",
            format_rational(c)
        )));
    }
    let cf = Mass::to_f64(c);
    let ln_c = cf.ln();
    Ok((0..=k_max)
        .map(|k| (-cf + k as f64 * ln_c - ln_factorial(k)).exp())
        .collect())
}

/// Smallest `k_max ≥ max(1, ⌈c⌉)` whose Poisson tail beyond `k_max` is
/// bounded by [`POISSON_TAIL_TARGET`]. The bound is the geometric majorant
/// `p(k+1) / (1 − c/(k+2))`.
pub fn default_k_max(c: &BigRational) -> u64 {
    let cf = Mass::to_f64(c);
    let ln_c = cf.ln();
    let mut k = (cf.ceil() as u64).max(1);
    loop {
        let next = k + 1;
        let ratio = cf / (next + 1) as f64;
        if ratio < 1.0 {
            let ln_p_next = -cf + next as f64 * ln_c - ln_factorial(next);
            if ln_p_next.exp() / (1.0 - ratio) < POISSON_TAIL_TARGET {
                return k;
            }
        }
        k += 1;
    }
}

/// Poisson(`c`) truncated to `0..=k_max` with the tail handled by `policy`.
/// The pmf is evaluated in `f64`; in exact mode those float values are taken
/// as exact binary rationals before the tail correction.
pub fn poisson_truncated<M: Mass>(
    c: &BigRational,
    k_max: u64,
    policy: TailPolicy,
) -> Result<DiscreteMeasure<M>> {
    if k_max < 1 {
        return Err(Error::param("k_max must be at least 1"));
    }
    let masses: Vec<M> = poisson_pmf_prefix(c, k_max)?
        .into_iter()
        .map(M::from_f64)
        .collect();
    let atoms: Vec<(ExtendedReal, M)> = match policy {
        TailPolicy::LumpAtKmax => {
            let head = masses[..k_max as usize]
                .iter()
                .fold(M::zero(), |acc, m| acc + m.clone());
            let mut atoms: Vec<_> = masses[..k_max as usize]
                .iter()
                .enumerate()
                .map(|(k, m)| (int_point(k as u64), m.clone()))
                .collect();
            atoms.push((int_point(k_max), M::one() - head));
            atoms
        }
        TailPolicy::Renormalize => {
            let total = masses.iter().fold(M::zero(), |acc, m| acc + m.clone());
            masses
                .into_iter()
                .enumerate()
                .map(|(k, m)| (int_point(k as u64), m / total.clone()))
                .collect()
        }
    };
    DiscreteMeasure::from_atoms(atoms)
}

fn check_index(n: u64) -> Result<()> {
    if n == 0 {
        Err(Error::param("index n starts at 1"))
    } else {
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    BernoulliMarginal,
    RunningMax,
    RecordIndex,
    DiracWalk,
    DiracRecip,
    BinomialPoisson,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 6] = [
        FamilyKind::BernoulliMarginal,
        FamilyKind::RunningMax,
        FamilyKind::RecordIndex,
        FamilyKind::DiracWalk,
        FamilyKind::DiracRecip,
        FamilyKind::BinomialPoisson,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::BernoulliMarginal => "bernoulli_marginal",
            FamilyKind::RunningMax => "running_max",
            FamilyKind::RecordIndex => "record_index",
            FamilyKind::DiracWalk => "dirac_walk",
            FamilyKind::DiracRecip => "dirac_recip",
            FamilyKind::BinomialPoisson => "binomial_poisson",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        FamilyKind::ALL
            .into_iter()
            .find(|k| k.name() == name)
            .ok_or_else(|| {
                let known: Vec<_> = FamilyKind::ALL.iter().map(|k| k.name()).collect();
                Error::param(format!(
                    "unknown family {name:?} (known: {})",
                    known.join(", ")
                ))
            })
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A validated, named rule `n ↦ ρₙ`. Parameters are checked once at
/// construction so that generation cannot fail.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasureFamily {
    kind: FamilyKind,
    q: Option<BigRational>,
    c: Option<BigRational>,
}

impl MeasureFamily {
    pub fn bernoulli_marginal(q: BigRational) -> Result<Self> {
        Self::with_q(FamilyKind::BernoulliMarginal, q)
    }

    pub fn running_max(q: BigRational) -> Result<Self> {
        Self::with_q(FamilyKind::RunningMax, q)
    }

    pub fn record_index(q: BigRational) -> Result<Self> {
        Self::with_q(FamilyKind::RecordIndex, q)
    }

    pub fn dirac_walk() -> Self {
        MeasureFamily {
            kind: FamilyKind::DiracWalk,
            q: None,
            c: None,
        }
    }

    pub fn dirac_recip() -> Self {
        MeasureFamily {
            kind: FamilyKind::DiracRecip,
            q: None,
            c: None,
        }
    }

    /// `Bin(n, min(c/n, 1))`.
    pub fn binomial_poisson(c: BigRational) -> Result<Self> {
        if !c.is_positive() {
            return Err(Error::param(format!(
                "c must be positive, got {}",
                format_rational(&c)
            )));
        }
        Ok(MeasureFamily {
            kind: FamilyKind::BinomialPoisson,
            q: None,
            c: Some(c),
        })
    }

    fn with_q(kind: FamilyKind, q: BigRational) -> Result<Self> {
        check_open_unit("q", &q)?;
        Ok(MeasureFamily {
            kind,
            q: Some(q),
            c: None,
        })
    }

    /// Registry lookup with a JSON parameter blob such as `{"q": "1/2"}`.
    /// Numbers may be JSON numbers or strings; both are read exactly.
    pub fn from_registry(name: &str, params: &serde_json::Value) -> Result<Self> {
        let kind = FamilyKind::from_name(name)?;
        let get = |key: &str| -> Result<Option<BigRational>> {
            match params.get(key) {
                None | Some(serde_json::Value::Null) => Ok(None),
                Some(serde_json::Value::String(s)) => parse_rational(s).map(Some),
                Some(serde_json::Value::Number(n)) => parse_rational(&n.to_string()).map(Some),
                Some(other) => Err(Error::param(format!("parameter {key} is not a number: {other}"))),
            }
        };
        let require = |key: &str| -> Result<BigRational> {
            get(key)?.ok_or_else(|| Error::param(format!("family {name} needs parameter {key}")))
        };
        match kind {
            FamilyKind::BernoulliMarginal => Self::bernoulli_marginal(require("q")?),
            FamilyKind::RunningMax => Self::running_max(require("q")?),
            FamilyKind::RecordIndex => Self::record_index(require("q")?),
            FamilyKind::DiracWalk => Ok(Self::dirac_walk()),
            FamilyKind::DiracRecip => Ok(Self::dirac_recip()),
            FamilyKind::BinomialPoisson => Self::binomial_poisson(require("c")?),
        }
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    pub fn q(&self) -> Option<&BigRational> {
        self.q.as_ref()
    }

    pub fn c(&self) -> Option<&BigRational> {
        self.c.as_ref()
    }

    pub fn params(&self) -> BTreeMap<String, String> {
        let mut out = BTreeMap::new();
        if let Some(q) = &self.q {
            out.insert("q".to_string(), format_rational(q));
        }
        if let Some(c) = &self.c {
            out.insert("c".to_string(), format_rational(c));
        }
        out
    }

    /// `ρₙ` for `n ≥ 1`.
    pub fn measure<M: Mass>(&self, n: u64) -> DiscreteMeasure<M> {
        assert!(n >= 1, "family index starts at 1");
        let q = || self.q.as_ref().expect("validated q");
        let generated = match self.kind {
            FamilyKind::BernoulliMarginal => bernoulli_marginal(q(), n),
            FamilyKind::RunningMax => running_max(q(), n),
            FamilyKind::RecordIndex => record_index(q(), n),
            FamilyKind::DiracWalk => dirac_walk(n),
            FamilyKind::DiracRecip => dirac_recip(n),
            FamilyKind::BinomialPoisson => {
                let c = self.c.as_ref().expect("validated c");
                let p = (c / BigRational::from_integer(n.into())).min(BigRational::one());
                binomial(n, &p)
            }
        };
        generated.expect("parameters validated at construction")
    }

    /// Weak limit on `ℝ` as stated for the family, if it has one.
    pub fn declared_limit_on_r<M: Mass>(&self) -> Option<DiscreteMeasure<M>> {
        match self.kind {
            FamilyKind::BernoulliMarginal => Some(self.measure(1)),
            FamilyKind::RunningMax => Some(dirac(int_point(1))),
            FamilyKind::DiracRecip => Some(dirac(int_point(0))),
            FamilyKind::BinomialPoisson => {
                let c = self.c.as_ref().expect("validated c");
                poisson_truncated(c, default_k_max(c), TailPolicy::LumpAtKmax).ok()
            }
            FamilyKind::RecordIndex | FamilyKind::DiracWalk => None,
        }
    }

    /// Weak limit on `ℝ̄`, with escaped mass as atoms at `±∞`.
    pub fn declared_limit_on_rbar<M: Mass>(&self) -> Option<DiscreteMeasure<M>> {
        match self.kind {
            FamilyKind::RecordIndex | FamilyKind::DiracWalk => Some(dirac(ExtendedReal::PosInf)),
            _ => self.declared_limit_on_r(),
        }
    }
}

impl fmt::Display for MeasureFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())?;
        let params = self.params();
        if !params.is_empty() {
            let parts: Vec<_> = params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            write!(f, "({})", parts.join(", "))?;
        }
        Ok(())
    }
}
