//! Finitely supported probability measures on `ℝ̄`.

use std::cmp::Ordering;
use std::fmt;

use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::events::EventSet;
use crate::extreal::{format_rational, parse_rational, ExtendedReal};

/// Total-mass tolerance for float-mode measures.
pub const FLOAT_MASS_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArithmeticMode {
    Exact,
    Float,
}

impl fmt::Display for ArithmeticMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ArithmeticMode::Exact => "exact",
            ArithmeticMode::Float => "float",
        })
    }
}

/// Scalar type carried by a measure: exact rationals or `f64`.
pub trait Mass:
    Clone + fmt::Debug + PartialEq + PartialOrd + Num + Signed + Send + Sync + 'static
{
    const MODE: ArithmeticMode;

    fn from_rational(r: &BigRational) -> Self;

    /// Exact mode takes the exact binary value of `x`.
    fn from_f64(x: f64) -> Self;

    fn to_f64(&self) -> f64;

    /// Whether `total` counts as a unit total mass in this mode.
    fn is_unit(total: &Self) -> bool;

    fn is_valid(&self) -> bool;

    fn format(&self) -> String;

    fn parse(s: &str) -> Result<Self>;
}

impl Mass for BigRational {
    const MODE: ArithmeticMode = ArithmeticMode::Exact;

    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }

    fn from_f64(x: f64) -> Self {
        BigRational::from_float(x).expect("finite float")
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn is_unit(total: &Self) -> bool {
        total.is_one()
    }

    fn is_valid(&self) -> bool {
        !self.is_negative()
    }

    fn format(&self) -> String {
        format_rational(self)
    }

    fn parse(s: &str) -> Result<Self> {
        parse_rational(s)
    }
}

impl Mass for f64 {
    const MODE: ArithmeticMode = ArithmeticMode::Float;

    fn from_rational(r: &BigRational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }

    fn from_f64(x: f64) -> Self {
        x
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn is_unit(total: &Self) -> bool {
        (total - 1.0).abs() <= FLOAT_MASS_TOLERANCE
    }

    fn is_valid(&self) -> bool {
        self.is_finite() && *self >= 0.0
    }

    fn format(&self) -> String {
        self.to_string()
    }

    fn parse(s: &str) -> Result<Self> {
        s.trim()
            .parse()
            .map_err(|_| Error::parse(format!("bad float mass {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Atom<M> {
    pub point: ExtendedReal,
    pub mass: M,
}

/// A probability measure with finitely many atoms.
///
/// Atoms are strictly increasing in `point`, carry positive mass, and the
/// masses sum to one (exactly, or within [`FLOAT_MASS_TOLERANCE`] for `f64`).
/// Atoms at `±∞` are ordinary atoms; see [`DiscreteMeasure::is_on_real`].
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteMeasure<M = BigRational> {
    atoms: Vec<Atom<M>>,
}

impl<M: Mass> DiscreteMeasure<M> {
    /// Sorts, merges repeated points and drops zero-mass atoms before
    /// checking the total.
    pub fn from_atoms<I>(atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (ExtendedReal, M)>,
    {
        let mut raw: Vec<Atom<M>> = Vec::new();
        for (point, mass) in atoms {
            if !mass.is_valid() {
                return Err(Error::InvalidMeasure(format!(
                    "mass {} at {point} is negative or not finite",
                    mass.format()
                )));
            }
            raw.push(Atom { point, mass });
        }
        raw.sort_by(|a, b| a.point.cmp(&b.point));

        let mut merged: Vec<Atom<M>> = Vec::with_capacity(raw.len());
        for atom in raw {
            match merged.last_mut() {
                Some(last) if last.point == atom.point => {
                    last.mass = last.mass.clone() + atom.mass;
                }
                _ => merged.push(atom),
            }
        }
        merged.retain(|a| !a.mass.is_zero());

        let measure = DiscreteMeasure { atoms: merged };
        let total = measure.total();
        if !M::is_unit(&total) {
            return Err(Error::InvalidMeasure(format!(
                "total mass is {}, expected 1",
                total.format()
            )));
        }
        Ok(measure)
    }

    pub fn dirac(point: ExtendedReal) -> Self {
        DiscreteMeasure {
            atoms: vec![Atom {
                point,
                mass: M::one(),
            }],
        }
    }

    pub fn mode(&self) -> ArithmeticMode {
        M::MODE
    }

    pub fn atoms(&self) -> &[Atom<M>] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total(&self) -> M {
        self.atoms
            .iter()
            .fold(M::zero(), |acc, a| acc + a.mass.clone())
    }

    pub fn mass_at(&self, point: &ExtendedReal) -> M {
        match self.atoms.binary_search_by(|a| a.point.cmp(point)) {
            Ok(i) => self.atoms[i].mass.clone(),
            Err(_) => M::zero(),
        }
    }

    /// `ρ(E)`: total mass of the atoms lying in `event`.
    pub fn measure_of(&self, event: &EventSet) -> M {
        self.atoms
            .iter()
            .filter(|a| event.contains(&a.point))
            .fold(M::zero(), |acc, a| acc + a.mass.clone())
    }

    /// `ρ([−∞, x])`, counting any mass at `−∞`.
    pub fn cdf(&self, x: &ExtendedReal) -> M {
        self.atoms
            .iter()
            .take_while(|a| a.point <= *x)
            .fold(M::zero(), |acc, a| acc + a.mass.clone())
    }

    /// Mass strictly above `x` (including `+∞`).
    pub fn mass_above(&self, x: &ExtendedReal) -> M {
        self.atoms
            .iter()
            .filter(|a| a.point > *x)
            .fold(M::zero(), |acc, a| acc + a.mass.clone())
    }

    /// Mass strictly below `x` (including `−∞`).
    pub fn mass_below(&self, x: &ExtendedReal) -> M {
        self.atoms
            .iter()
            .filter(|a| a.point < *x)
            .fold(M::zero(), |acc, a| acc + a.mass.clone())
    }

    /// True when no mass sits at `±∞`.
    pub fn is_on_real(&self) -> bool {
        self.atoms.iter().all(|a| a.point.is_finite())
    }

    pub fn to_float(&self) -> DiscreteMeasure<f64> {
        DiscreteMeasure {
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom {
                    point: a.point.clone(),
                    mass: a.mass.to_f64(),
                })
                .collect(),
        }
    }
}

/// Total variation distance `½ Σ |a(x) − b(x)|` over the union of supports.
pub fn tv_distance<M: Mass>(a: &DiscreteMeasure<M>, b: &DiscreteMeasure<M>) -> M {
    let (xs, ys) = (a.atoms(), b.atoms());
    let (mut i, mut j) = (0, 0);
    let mut sum = M::zero();
    while i < xs.len() || j < ys.len() {
        let order = match (xs.get(i), ys.get(j)) {
            (Some(x), Some(y)) => x.point.cmp(&y.point),
            (Some(_), None) => Ordering::Less,
            (None, _) => Ordering::Greater,
        };
        match order {
            Ordering::Less => {
                sum = sum + xs[i].mass.clone();
                i += 1;
            }
            Ordering::Greater => {
                sum = sum + ys[j].mass.clone();
                j += 1;
            }
            Ordering::Equal => {
                sum = sum + (xs[i].mass.clone() - ys[j].mass.clone()).abs();
                i += 1;
                j += 1;
            }
        }
    }
    sum / (M::one() + M::one())
}

#[derive(Serialize, Deserialize)]
struct AtomRepr {
    point: ExtendedReal,
    mass: String,
}

#[derive(Serialize, Deserialize)]
struct MeasureRepr {
    atoms: Vec<AtomRepr>,
    mode: ArithmeticMode,
}

impl<M: Mass> Serialize for DiscreteMeasure<M> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MeasureRepr {
            atoms: self
                .atoms
                .iter()
                .map(|a| AtomRepr {
                    point: a.point.clone(),
                    mass: a.mass.format(),
                })
                .collect(),
            mode: M::MODE,
        }
        .serialize(serializer)
    }
}

impl<'de, M: Mass> Deserialize<'de> for DiscreteMeasure<M> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = MeasureRepr::deserialize(deserializer)?;
        if repr.mode != M::MODE {
            return Err(D::Error::custom(format!(
                "measure is in {} mode, expected {}",
                repr.mode,
                M::MODE
            )));
        }
        let atoms = repr
            .atoms
            .into_iter()
            .map(|a| M::parse(&a.mass).map(|m| (a.point, m)))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        DiscreteMeasure::from_atoms(atoms).map_err(D::Error::custom)
    }
}

impl<M: Mass> fmt::Display for DiscreteMeasure<M> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "({}, {})", a.point, a.mass.format())?;
        }
        f.write_str("}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::events::Universe;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn exact(atoms: &[(i64, i64, i64)]) -> DiscreteMeasure<BigRational> {
        DiscreteMeasure::from_atoms(
            atoms
                .iter()
                .map(|&(p, n, d)| (ExtendedReal::from_int(p), r(n, d))),
        )
        .unwrap()
    }

    #[test]
    fn dirac_has_one_unit_atom() {
        let m: DiscreteMeasure = DiscreteMeasure::dirac(ExtendedReal::from_int(3));
        assert_eq!(m.atoms(), &[Atom { point: ExtendedReal::from_int(3), mass: r(1, 1) }]);
        let inf: DiscreteMeasure<f64> = DiscreteMeasure::dirac(ExtendedReal::PosInf);
        assert!(!inf.is_on_real());
        assert_eq!(inf.mass_at(&ExtendedReal::PosInf), 1.0);
    }

    #[test]
    fn constructor_merges_sorts_and_checks_total() {
        let m = DiscreteMeasure::from_atoms(vec![
            (ExtendedReal::from_int(2), r(1, 4)),
            (ExtendedReal::from_int(0), r(1, 4)),
            (ExtendedReal::from_int(2), r(1, 2)),
            (ExtendedReal::from_int(5), r(0, 1)),
        ])
        .unwrap();
        assert_eq!(m, exact(&[(0, 1, 4), (2, 3, 4)]));

        let short = DiscreteMeasure::from_atoms(vec![(ExtendedReal::from_int(0), r(1, 2))]);
        assert!(matches!(short, Err(Error::InvalidMeasure(_))));
        let negative = DiscreteMeasure::from_atoms(vec![
            (ExtendedReal::from_int(0), r(3, 2)),
            (ExtendedReal::from_int(1), r(-1, 2)),
        ]);
        assert!(negative.is_err());
        let float = DiscreteMeasure::from_atoms(vec![
            (ExtendedReal::from_int(0), 0.1),
            (ExtendedReal::from_int(1), 0.2),
            (ExtendedReal::from_int(2), 0.7),
        ]);
        assert!(float.is_ok());
        let nan = DiscreteMeasure::from_atoms(vec![(ExtendedReal::from_int(0), f64::NAN)]);
        assert!(nan.is_err());
    }

    #[test]
    fn measure_of_simple_events() {
        let m: DiscreteMeasure = DiscreteMeasure::dirac(ExtendedReal::from_ratio(1, 3));
        let ray: EventSet = "(-inf,0]".parse().unwrap();
        assert_eq!(m.measure_of(&ray), r(0, 1));
        assert_eq!(m.measure_of(&EventSet::extended_line()), r(1, 1));

        let inf: DiscreteMeasure = DiscreteMeasure::dirac(ExtendedReal::PosInf);
        assert_eq!(inf.measure_of(&EventSet::real_line()), r(0, 1));
        assert_eq!(inf.measure_of(&EventSet::extended_line()), r(1, 1));
    }

    #[test]
    fn tv_distance_basics() {
        let a: DiscreteMeasure = DiscreteMeasure::dirac(ExtendedReal::from_int(0));
        let b: DiscreteMeasure = DiscreteMeasure::dirac(ExtendedReal::from_int(1));
        assert_eq!(tv_distance(&a, &a), r(0, 1));
        assert_eq!(tv_distance(&a, &b), r(1, 1));
        let c = exact(&[(0, 1, 2), (1, 1, 2)]);
        assert_eq!(tv_distance(&a, &c), r(1, 2));
    }

    #[test]
    fn json_shape_matches_the_published_layout() {
        let m = DiscreteMeasure::from_atoms(vec![
            (ExtendedReal::from_int(3), 0.625),
            (ExtendedReal::PosInf, 0.375),
        ])
        .unwrap();
        let json = serde_json::to_string(&m).unwrap();
        assert_eq!(
            json,
            r#"{"atoms":[{"point":"3","mass":"0.625"},{"point":"+inf","mass":"0.375"}],"mode":"float"}"#
        );
        let back: DiscreteMeasure<f64> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<DiscreteMeasure<BigRational>>(&json).is_err());

        let e = exact(&[(1, 1, 8), (2, 1, 4), (3, 5, 8)]);
        let json = serde_json::to_string(&e).unwrap();
        assert!(json.contains(r#""mass":"0.625""#) && json.contains(r#""mode":"exact""#));
        assert_eq!(serde_json::from_str::<DiscreteMeasure>(&json).unwrap(), e);
    }

    fn small_measure() -> impl Strategy<Value = DiscreteMeasure<BigRational>> {
        prop::collection::vec((-5i64..=5, 1u32..=6), 1..6).prop_map(|pairs| {
            let total: u32 = pairs.iter().map(|p| p.1).sum();
            DiscreteMeasure::from_atoms(pairs.into_iter().map(|(x, w)| {
                (
                    ExtendedReal::from_int(x),
                    BigRational::new(w.into(), total.into()),
                )
            }))
            .unwrap()
        })
    }

    fn small_event() -> impl Strategy<Value = EventSet> {
        prop::collection::vec((-6i64..=6, 0i64..=4, any::<bool>(), any::<bool>()), 0..4).prop_map(
            |parts| {
                EventSet::from_intervals(parts.into_iter().map(|(lo, len, lc, hc)| {
                    crate::events::Interval::new(
                        ExtendedReal::from_int(lo),
                        lc || len == 0,
                        ExtendedReal::from_int(lo + len),
                        hc || len == 0,
                    )
                }))
            },
        )
    }

    proptest! {
        #[test]
        fn complement_mass_is_one_minus(m in small_measure(), e in small_event()) {
            let c = e.complement(Universe::Extended);
            prop_assert_eq!(m.measure_of(&c), BigRational::one() - m.measure_of(&e));
        }

        #[test]
        fn finitely_additive_on_disjoint_events(m in small_measure(), a in small_event(), b in small_event()) {
            let b_minus_a = b.intersection(&a.complement(Universe::Extended));
            let union = a.union(&b_minus_a);
            prop_assert_eq!(m.measure_of(&union), m.measure_of(&a) + m.measure_of(&b_minus_a));
        }

        #[test]
        fn tv_is_a_metric_on_small_measures(a in small_measure(), b in small_measure(), c in small_measure()) {
            let ab = tv_distance(&a, &b);
            prop_assert_eq!(ab.clone(), tv_distance(&b, &a));
            prop_assert!(ab >= <BigRational as num_traits::Zero>::zero() && ab <= BigRational::one());
            prop_assert!(tv_distance(&a, &c) <= ab + tv_distance(&b, &c));
        }

        #[test]
        fn float_conversion_preserves_total(m in small_measure()) {
            prop_assert!((m.to_float().total() - 1.0).abs() <= FLOAT_MASS_TOLERANCE);
        }
    }
}
