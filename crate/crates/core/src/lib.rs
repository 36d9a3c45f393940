//! Decision attacks on Polynomial LWE through zero-trace roots of the
//! modulus polynomial.
//!
//! The crate provides exact arithmetic in `F_q` and `F_{q^2}`, the quotient
//! ring `R_q = F_q[x]/(f(x))`, seedable uniform and PLWE sample oracles,
//! smallness-region tables, the root-evaluation and zero-trace attacks, a
//! forge for vulnerable parameter sets, and an experiment harness.

pub mod attack;
pub mod error;
pub mod field;
pub mod forge;
pub mod files;
pub mod fpoly;
pub mod harness;
pub mod ring;
pub mod region;
pub mod sampler;

pub use error::{Error, Result};
pub use field::{FieldElement, FieldParams, PrimeField, QuadExtElement};
pub use ring::{ModulusPoly, Ring, RingElement};
pub use sampler::{GaussianParams, Oracle, OracleKind, Sample};
pub use region::{RegionMode, SmallnessRegion};
pub use attack::{AttackPlan, AttackVerdict, VerdictKind};
pub use forge::{ParameterSet, VulnerabilityReport};
pub use harness::{ExperimentConfig, ExperimentReport};
