//! Primitive-root counting for a function `g` on a variety over GF(q):
//! non-geometric primes, the correction factor ρ_g(n), the two counting
//! algorithms, character sums, and the constructive choice of `n`.

mod charsum;
mod count;
mod geometric;
mod rho;

use std::sync::{Arc, OnceLock};

pub use charsum::{
    charsum_experiment, charsum_explore, class_counts, CharacterClassCounts, CharacterRow,
    CharsumReport,
};
pub use count::{
    count_artin_closed, count_artin_points, mobius_expansion_check, ClosedTally, CountReport,
};
pub use geometric::{
    geometric_oracle, is_geometric_at, nongeometric_primes, GeometricityReport, Method,
    NonGeometricPrimeSet, Witness,
};
pub use rho::{artin_n_generator, generator_sequence, rho, rho_positive, RhoFactor, RhoValue};

pub use crate::arith::ramanujan_sum;

pub(crate) use count::closed_tally;

use crate::error::{Error, Result};
use crate::field::{FiniteField, DEFAULT_CAP};
use crate::geometry::{FunctionOnVariety, VarietyModel};
use crate::ratfunc::RationalFunction;

/// A function `g` on a variety `X` over GF(q), with the enumeration cap
/// used by everything computed from it. The set 𝒫_g is computed once.
#[derive(Debug)]
pub struct Subject {
    variety: VarietyModel,
    g: FunctionOnVariety,
    cap: u64,
    primes: OnceLock<Result<NonGeometricPrimeSet>>,
}

impl Clone for Subject {
    fn clone(&self) -> Self {
        let primes = OnceLock::new();
        if let Some(v) = self.primes.get() {
            let _ = primes.set(v.clone());
        }
        Subject {
            variety: self.variety.clone(),
            g: self.g.clone(),
            cap: self.cap,
            primes,
        }
    }
}

impl Subject {
    pub fn new(variety: VarietyModel, g: FunctionOnVariety, cap: u64) -> Result<Self> {
        match (&variety, &g) {
            (VarietyModel::ProjectiveLine, FunctionOnVariety::Line(_)) => {}
            (VarietyModel::ProjectiveLine, _) | (_, FunctionOnVariety::Line(_)) => {
                return Err(Error::InvalidArgument(format!(
                    "function {g} does not live on {variety}"
                )))
            }
            (VarietyModel::PlaneCurve(f), FunctionOnVariety::Forms { a, .. }) => {
                if f.field() != a.field() {
                    return Err(Error::InvalidArgument("curve and function over different fields".into()));
                }
            }
            _ => {}
        }
        if cap == 0 {
            return Err(Error::InvalidArgument("cap must be positive".into()));
        }
        Ok(Subject {
            variety,
            g,
            cap,
            primes: OnceLock::new(),
        })
    }

    /// `g` on P¹ with the default cap.
    pub fn line(g: RationalFunction) -> Self {
        Self::new(VarietyModel::ProjectiveLine, FunctionOnVariety::Line(g), DEFAULT_CAP)
            .expect("a rational function lives on P1")
    }

    /// Parses `g` for the variety described by `variety`.
    pub fn parse(field: &Arc<FiniteField>, variety: &str, g: &str, cap: u64) -> Result<Self> {
        let variety = VarietyModel::parse(field, variety)?;
        let g = FunctionOnVariety::parse(field, &variety, g)?;
        Self::new(variety, g, cap)
    }

    pub fn with_cap(mut self, cap: u64) -> Self {
        self.cap = cap.max(1);
        self
    }

    pub fn variety(&self) -> &VarietyModel {
        &self.variety
    }

    pub fn g(&self) -> &FunctionOnVariety {
        &self.g
    }

    pub fn field(&self) -> &Arc<FiniteField> {
        self.g.field()
    }

    pub fn q(&self) -> u64 {
        self.field().order() as u64
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    /// Dimension `r` of the variety.
    pub fn dim(&self) -> u32 {
        self.variety.dim()
    }

    /// The degree of the divisor of `g`. On P¹ this is exact; for a ratio of
    /// forms of degree `d` it is the bound `2d` on P² and `2d·deg f` on a
    /// curve `f = 0` (the degrees of the zero and pole divisors of the
    /// representative).
    pub fn deg_g(&self) -> Result<u64> {
        if self.g.is_constant() {
            return Err(Error::ConstantFunction);
        }
        match (&self.g, &self.variety) {
            (FunctionOnVariety::Line(g), _) => g.deg_g(),
            (FunctionOnVariety::Forms { a, .. }, VarietyModel::PlaneCurve(f)) => {
                Ok(2 * a.total_degree().unwrap() as u64 * f.total_degree().unwrap() as u64)
            }
            (FunctionOnVariety::Forms { a, .. }, _) => Ok(2 * a.total_degree().unwrap() as u64),
        }
    }

    /// 𝒫_g, computed on first use.
    pub fn nongeometric(&self) -> Result<&NonGeometricPrimeSet> {
        self.primes
            .get_or_init(|| nongeometric_primes(self))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Fails with [`Error::FullPower`] when `g` is a full ℓ-th power for a
    /// prime `ℓ | q − 1`, in which case `g` is a primitive root nowhere.
    pub fn check_not_full_power(&self) -> Result<()> {
        for rep in &self.nongeometric()?.reports {
            if rep.full_power {
                return Err(Error::FullPower(rep.ell));
            }
        }
        Ok(())
    }

    /// Geometricity at a single prime, reusing 𝒫_g when `ℓ` lies in range.
    pub fn geometricity(&self, ell: u64) -> Result<GeometricityReport> {
        geometric::geometricity(self, ell)
    }
}
