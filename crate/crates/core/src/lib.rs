//! Discrete probability measures on the real and extended real line.
//!
//! The crate builds finitely supported measure sequences (Bernoulli marginals,
//! running maxima, record indices, Dirac walks, binomials), evaluates them on
//! finite unions of intervals, and checks what happens to them as the index
//! grows: tightness, mass escaping to `±∞`, weak limits on `ℝ` and `ℝ̄`, and
//! whether the limit of `ρₙ(Eₙ)` agrees with the limit measure evaluated at
//! the limit event.
//!
//! Two arithmetic modes share one code path through the [`Mass`] trait:
//! exact rationals ([`BigRational`]) for identities that must hold with zero
//! residual, and `f64` for long convergence scans.

pub mod convergence;
pub mod error;
pub mod events;
pub mod extreal;
pub mod families;
pub mod measure;
pub mod oracle;
pub mod report;
pub mod uncertain;

pub use error::{Error, Result};
pub use events::{EventRule, EventSet, Interval, LimitEvent, Universe};
pub use extreal::{parse_rational, ExtendedReal};
pub use families::{FamilyKind, MeasureFamily, TailPolicy};
pub use measure::{tv_distance, ArithmeticMode, Atom, DiscreteMeasure, Mass};
pub use num_rational::BigRational;
