//! Events as finite unions of intervals on `ℝ̄`, and recursive event rules
//! `Eₙ = H⁽ⁿ⁻¹⁾(E₁)` with declared limit events.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::extreal::ExtendedReal;

/// The ambient set used for complements and membership.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Universe {
    /// `ℝ`: the infinities are never members.
    Real,
    /// `ℝ̄ = [−∞, +∞]`.
    Extended,
}

/// An interval with independently open or closed endpoints. A closed
/// endpoint at `±∞` means the infinity itself is a member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: ExtendedReal,
    pub lo_closed: bool,
    pub hi: ExtendedReal,
    pub hi_closed: bool,
}

impl Interval {
    pub fn new(lo: ExtendedReal, lo_closed: bool, hi: ExtendedReal, hi_closed: bool) -> Self {
        Interval {
            lo,
            lo_closed,
            hi,
            hi_closed,
        }
    }

    pub fn point(p: ExtendedReal) -> Self {
        Interval::new(p.clone(), true, p, true)
    }

    pub fn is_empty(&self) -> bool {
        match self.lo.cmp(&self.hi) {
            Ordering::Greater => true,
            Ordering::Equal => !(self.lo_closed && self.hi_closed),
            Ordering::Less => false,
        }
    }

    pub fn is_singleton(&self) -> bool {
        self.lo == self.hi && self.lo_closed && self.hi_closed
    }

    pub fn contains(&self, p: &ExtendedReal) -> bool {
        let above_lo = match self.lo.cmp(p) {
            Ordering::Less => true,
            Ordering::Equal => self.lo_closed,
            Ordering::Greater => false,
        };
        let below_hi = match p.cmp(&self.hi) {
            Ordering::Less => true,
            Ordering::Equal => self.hi_closed,
            Ordering::Greater => false,
        };
        above_lo && below_hi
    }

    fn intersect(&self, other: &Interval) -> Interval {
        let (lo, lo_closed) = match self.lo.cmp(&other.lo) {
            Ordering::Less => (other.lo.clone(), other.lo_closed),
            Ordering::Greater => (self.lo.clone(), self.lo_closed),
            Ordering::Equal => (self.lo.clone(), self.lo_closed && other.lo_closed),
        };
        let (hi, hi_closed) = match self.hi.cmp(&other.hi) {
            Ordering::Less => (self.hi.clone(), self.hi_closed),
            Ordering::Greater => (other.hi.clone(), other.hi_closed),
            Ordering::Equal => (self.hi.clone(), self.hi_closed && other.hi_closed),
        };
        Interval::new(lo, lo_closed, hi, hi_closed)
    }

    fn shifted(&self, by: &BigRational) -> Interval {
        Interval::new(
            self.lo.shifted(by),
            self.lo_closed,
            self.hi.shifted(by),
            self.hi_closed,
        )
    }

    /// Order by left endpoint, closed starts first.
    fn start_cmp(&self, other: &Interval) -> Ordering {
        self.lo
            .cmp(&other.lo)
            .then_with(|| other.lo_closed.cmp(&self.lo_closed))
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_singleton() {
            return write!(f, "{{{}}}", self.lo);
        }
        write!(
            f,
            "{}{},{}{}",
            if self.lo_closed { '[' } else { '(' },
            self.lo,
            self.hi,
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

/// A finite union of intervals in canonical form: non-empty components,
/// sorted, pairwise disjoint and non-adjacent.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct EventSet {
    components: Vec<Interval>,
}

impl EventSet {
    pub fn empty() -> Self {
        EventSet::default()
    }

    /// `ℝ = (−∞, +∞)`.
    pub fn real_line() -> Self {
        EventSet::from_intervals([Interval::new(
            ExtendedReal::NegInf,
            false,
            ExtendedReal::PosInf,
            false,
        )])
    }

    /// `ℝ̄ = [−∞, +∞]`.
    pub fn extended_line() -> Self {
        EventSet::from_intervals([Interval::new(
            ExtendedReal::NegInf,
            true,
            ExtendedReal::PosInf,
            true,
        )])
    }

    pub fn universe(u: Universe) -> Self {
        match u {
            Universe::Real => EventSet::real_line(),
            Universe::Extended => EventSet::extended_line(),
        }
    }

    pub fn singleton(p: impl Into<ExtendedReal>) -> Self {
        EventSet::from_intervals([Interval::point(p.into())])
    }

    /// `(−∞, b)`.
    pub fn ray_below(b: impl Into<ExtendedReal>) -> Self {
        EventSet::from_intervals([Interval::new(ExtendedReal::NegInf, false, b.into(), false)])
    }

    /// `(−∞, b]`.
    pub fn ray_below_closed(b: impl Into<ExtendedReal>) -> Self {
        EventSet::from_intervals([Interval::new(ExtendedReal::NegInf, false, b.into(), true)])
    }

    pub fn closed(lo: impl Into<ExtendedReal>, hi: impl Into<ExtendedReal>) -> Self {
        EventSet::from_intervals([Interval::new(lo.into(), true, hi.into(), true)])
    }

    pub fn from_intervals<I: IntoIterator<Item = Interval>>(parts: I) -> Self {
        EventSet {
            components: canonicalize(parts.into_iter().collect()),
        }
    }

    pub fn components(&self) -> &[Interval] {
        &self.components
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn contains(&self, p: &ExtendedReal) -> bool {
        self.components.iter().any(|c| c.contains(p))
    }

    pub fn contains_in(&self, p: &ExtendedReal, universe: Universe) -> bool {
        (universe == Universe::Extended || p.is_finite()) && self.contains(p)
    }

    pub fn union(&self, other: &EventSet) -> EventSet {
        EventSet::from_intervals(
            self.components
                .iter()
                .chain(other.components.iter())
                .cloned(),
        )
    }

    pub fn intersection(&self, other: &EventSet) -> EventSet {
        let mut parts = Vec::new();
        for a in &self.components {
            for b in &other.components {
                let c = a.intersect(b);
                if !c.is_empty() {
                    parts.push(c);
                }
            }
        }
        EventSet::from_intervals(parts)
    }

    /// `U \ e` for the chosen universe `U`.
    pub fn complement(&self, universe: Universe) -> EventSet {
        let mut gaps = Vec::new();
        let mut cursor = ExtendedReal::NegInf;
        let mut cursor_closed = true;
        for c in &self.components {
            gaps.push(Interval::new(
                cursor.clone(),
                cursor_closed,
                c.lo.clone(),
                !c.lo_closed,
            ));
            cursor = c.hi.clone();
            cursor_closed = !c.hi_closed;
        }
        gaps.push(Interval::new(cursor, cursor_closed, ExtendedReal::PosInf, true));
        EventSet::from_intervals(gaps).intersection(&EventSet::universe(universe))
    }

    pub fn is_subset_of(&self, other: &EventSet) -> bool {
        self.intersection(&other.complement(Universe::Extended))
            .is_empty()
    }

    pub fn shifted(&self, by: &BigRational) -> EventSet {
        EventSet::from_intervals(self.components.iter().map(|c| c.shifted(by)))
    }

    /// True when neither infinity is a member, i.e. the set is an event of `ℝ`.
    pub fn is_real(&self) -> bool {
        !self.contains(&ExtendedReal::NegInf) && !self.contains(&ExtendedReal::PosInf)
    }

    /// Right end of the last component, if any.
    pub fn supremum(&self) -> Option<&ExtendedReal> {
        self.components.last().map(|c| &c.hi)
    }
}

fn canonicalize(mut parts: Vec<Interval>) -> Vec<Interval> {
    parts.retain(|p| !p.is_empty());
    parts.sort_by(|a, b| a.start_cmp(b));
    let mut out: Vec<Interval> = Vec::with_capacity(parts.len());
    for p in parts {
        if let Some(last) = out.last_mut() {
            let touches = match p.lo.cmp(&last.hi) {
                Ordering::Less => true,
                Ordering::Equal => last.hi_closed || p.lo_closed,
                Ordering::Greater => false,
            };
            if touches {
                match p.hi.cmp(&last.hi) {
                    Ordering::Greater => {
                        last.hi = p.hi;
                        last.hi_closed = p.hi_closed;
                    }
                    Ordering::Equal => last.hi_closed |= p.hi_closed,
                    Ordering::Less => {}
                }
                continue;
            }
        }
        out.push(p);
    }
    out
}

impl fmt::Display for EventSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return f.write_str("{}");
        }
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                f.write_str(" u ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Parses `"(-inf,3)"`, `"{5}"`, `"{1,2}"`, `"[0,1) u {4}"`, `"R"`, `"Rbar"`
/// and `"{}"`. Components are joined by `u`, `U` or `∪`.
impl FromStr for EventSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = Vec::new();
        for raw in s.split(['u', 'U', '∪']) {
            let comp = raw.trim();
            if comp.is_empty() {
                return Err(Error::parse(format!("empty component in event {s:?}")));
            }
            match comp {
                "R" | "ℝ" => parts.extend(EventSet::real_line().components),
                "Rbar" | "ℝ̄" => parts.extend(EventSet::extended_line().components),
                "empty" | "∅" => {}
                _ => parts.extend(parse_component(comp)?),
            }
        }
        Ok(EventSet::from_intervals(parts))
    }
}

fn parse_component(comp: &str) -> Result<Vec<Interval>> {
    if let Some(inner) = comp.strip_prefix('{').and_then(|c| c.strip_suffix('}')) {
        if inner.trim().is_empty() {
            return Ok(Vec::new());
        }
        return inner
            .split(',')
            .map(|p| p.parse::<ExtendedReal>().map(Interval::point))
            .collect();
    }
    let lo_closed = match comp.chars().next() {
        Some('[') => true,
        Some('(') => false,
        _ => return Err(Error::parse(format!("bad interval {comp:?}"))),
    };
    let hi_closed = match comp.chars().last() {
        Some(']') => true,
        Some(')') => false,
        _ => return Err(Error::parse(format!("bad interval {comp:?}"))),
    };
    let inner = &comp[1..comp.len() - 1];
    let (lo, hi) = inner
        .split_once(',')
        .ok_or_else(|| Error::parse(format!("interval needs two endpoints: {comp:?}")))?;
    let interval = Interval::new(lo.parse()?, lo_closed, hi.parse()?, hi_closed);
    if interval.lo > interval.hi {
        return Err(Error::parse(format!("reversed endpoints in {comp:?}")));
    }
    Ok(vec![interval])
}

impl Serialize for EventSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for EventSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Where a rule's events end up.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "event")]
pub enum LimitEvent {
    /// The limit is an event of `ℝ`.
    InR(EventSet),
    /// The limit only exists as a subset of `ℝ̄` that is not an event of `ℝ`.
    InRbarOnly(EventSet),
    NoLimit,
}

impl LimitEvent {
    pub fn event(&self) -> Option<&EventSet> {
        match self {
            LimitEvent::InR(e) | LimitEvent::InRbarOnly(e) => Some(e),
            LimitEvent::NoLimit => None,
        }
    }

    pub fn in_real(&self) -> Option<&EventSet> {
        match self {
            LimitEvent::InR(e) => Some(e),
            _ => None,
        }
    }
}

impl fmt::Display for LimitEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LimitEvent::InR(e) => write!(f, "{e} (in R)"),
            LimitEvent::InRbarOnly(e) => write!(f, "{e} (in Rbar only)"),
            LimitEvent::NoLimit => f.write_str("no limit"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleStep {
    /// `H(E) = E`.
    Identity,
    /// `H(E) = E + 1`; on `{n−1}` this gives `{n}`.
    SingletonShift,
    /// `H(E) = E ∪ [s, s+1)` with `s = sup E`; on `(−∞, n−1)` this gives `(−∞, n)`.
    RayGrowth,
}

/// A seed event `E₁`, a step map `H`, and the limit event the rule declares.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EventRule {
    pub name: String,
    pub seed: EventSet,
    pub step: RuleStep,
    pub declared_limit: LimitEvent,
}

/// Outcome of checking a declared limit against the first few events.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum LimitCheck {
    /// Events increase and each one is inside the declared limit.
    Consistent,
    /// Events increase but `Eₙ` is not inside the declared limit.
    Violated { n: u64 },
    /// The events are not increasing, so inclusion says nothing.
    NotMonotone,
    NoDeclaredLimit,
}

impl EventRule {
    /// `Eₙ = {n}` starting from `{1}`; the limit `{+∞}` is not an event of `ℝ`.
    pub fn singleton_shift() -> Self {
        EventRule {
            name: "singleton_shift".into(),
            seed: EventSet::singleton(1),
            step: RuleStep::SingletonShift,
            declared_limit: LimitEvent::InRbarOnly(EventSet::singleton(ExtendedReal::PosInf)),
        }
    }

    /// `Eₙ = E₁` for every `n`.
    pub fn identity(seed: EventSet) -> Self {
        let declared_limit = if seed.is_real() {
            LimitEvent::InR(seed.clone())
        } else {
            LimitEvent::InRbarOnly(seed.clone())
        };
        EventRule {
            name: "identity".into(),
            seed,
            step: RuleStep::Identity,
            declared_limit,
        }
    }

    /// `Eₙ = (−∞, n)` starting from `(−∞, 1)`; the limit is `ℝ`.
    pub fn ray_growth() -> Self {
        EventRule {
            name: "ray_growth".into(),
            seed: EventSet::ray_below(1),
            step: RuleStep::RayGrowth,
            declared_limit: LimitEvent::InR(EventSet::real_line()),
        }
    }

    /// Built-in rule by name. `identity` needs a seed.
    pub fn by_name(name: &str, seed: Option<EventSet>) -> Result<Self> {
        match name {
            "singleton_shift" | "shift" => Ok(EventRule::singleton_shift()),
            "ray_growth" | "ray" => Ok(EventRule::ray_growth()),
            "identity" => seed
                .map(EventRule::identity)
                .ok_or_else(|| Error::param("the identity rule needs a seed event")),
            other => Err(Error::param(format!(
                "unknown rule {other:?} (expected singleton_shift, identity or ray_growth)"
            ))),
        }
    }

    /// One application of `H`.
    pub fn step(&self, e: &EventSet) -> EventSet {
        let one = BigRational::one();
        match self.step {
            RuleStep::Identity => e.clone(),
            RuleStep::SingletonShift => e.shifted(&one),
            RuleStep::RayGrowth => match e.supremum() {
                Some(ExtendedReal::Finite(s)) => e.union(&EventSet::from_intervals([
                    Interval::new(s.clone().into(), true, (s + &one).into(), false),
                ])),
                _ => e.clone(),
            },
        }
    }

    /// `Eₙ`, computed from the closed form of the step.
    pub fn apply(&self, n: u64) -> EventSet {
        assert!(n >= 1, "event index starts at 1");
        let k = BigRational::from_integer((n - 1).into());
        match self.step {
            RuleStep::Identity => self.seed.clone(),
            RuleStep::SingletonShift => self.seed.shifted(&k),
            RuleStep::RayGrowth => match self.seed.supremum() {
                Some(ExtendedReal::Finite(s)) if n > 1 => {
                    self.seed.union(&EventSet::from_intervals([Interval::new(
                        s.clone().into(),
                        true,
                        (s + &k).into(),
                        false,
                    )]))
                }
                _ => self.seed.clone(),
            },
        }
    }

    /// `Eₙ` by applying `step` `n − 1` times to the seed.
    pub fn iterate(&self, n: u64) -> EventSet {
        assert!(n >= 1, "event index starts at 1");
        (1..n).fold(self.seed.clone(), |e, _| self.step(&e))
    }

    pub fn limit_event(&self) -> &LimitEvent {
        &self.declared_limit
    }

    /// Checks the declared limit by set inclusion over `E₁ … E_horizon`.
    /// Only increasing sequences can be checked this way.
    pub fn check_declared_limit(&self, horizon: u64) -> LimitCheck {
        let Some(limit) = self.declared_limit.event() else {
            return LimitCheck::NoDeclaredLimit;
        };
        let mut prev = self.apply(1);
        for n in 2..=horizon.max(2) {
            let next = self.apply(n);
            if !prev.is_subset_of(&next) {
                return LimitCheck::NotMonotone;
            }
            prev = next;
        }
        for n in 1..=horizon.max(2) {
            if !self.apply(n).is_subset_of(limit) {
                return LimitCheck::Violated { n };
            }
        }
        LimitCheck::Consistent
    }
}
