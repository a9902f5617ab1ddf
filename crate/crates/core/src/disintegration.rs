//! Disintegration rules w ↦ μ_w.

use serde::{Deserialize, Serialize};

use crate::base::BasePoint;
use crate::error::{Error, Result};
use crate::exact::Q;
use crate::fiber::{FiberSpace, FiberSystem};
use crate::measure::{average, pushforward, Atom, FiberMeasure, GridDensity, ProductMeasure, VectorRule};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
pub enum Disintegration {
    /// Uniform vectors `1/k(θ^i w)` at every coordinate.
    UniformProduct,
    /// Explicit rules for the first coordinates, then `tail`.
    Product { head: Vec<VectorRule>, tail: VectorRule },
    /// Lebesgue measure as a uniform grid.
    Lebesgue { resolution: usize },
    /// The same grid density on every fiber.
    Grid { weights: Vec<f64> },
    /// The same atoms on every fiber.
    Atomic { atoms: Vec<Atom> },
    /// w ↦ f_{w_{-1}}∗μ_{w_{-1}}.
    Pullback { inner: Box<Disintegration> },
    /// The Cesàro pullback average μ_{n,w} of order `order`.
    Cesaro { inner: Box<Disintegration>, order: usize },
}

impl Disintegration {
    pub fn validate(&self, sys: &FiberSystem) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidMeasure(m.to_string()));
        match (self, &sys.space) {
            (Disintegration::UniformProduct | Disintegration::Product { .. }, FiberSpace::Symbolic { .. }) => Ok(()),
            (Disintegration::UniformProduct | Disintegration::Product { .. }, _) => {
                bad("cylinder-product rules need a symbolic fiber")
            }
            (Disintegration::Lebesgue { resolution }, FiberSpace::Circle | FiberSpace::Interval) => {
                if *resolution == 0 {
                    bad("grid resolution must be positive")
                } else {
                    Ok(())
                }
            }
            (Disintegration::Grid { weights }, FiberSpace::Circle | FiberSpace::Interval) => {
                let s: f64 = weights.iter().sum();
                if weights.is_empty() || weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) || (s - 1.0).abs() > 1e-12 {
                    bad("grid weights must be nonnegative and sum to 1")
                } else {
                    Ok(())
                }
            }
            (Disintegration::Lebesgue { .. } | Disintegration::Grid { .. }, _) => {
                bad("grid densities need a circle or interval fiber")
            }
            (Disintegration::Atomic { atoms }, space) => {
                let s: f64 = atoms.iter().map(|a| a.weight).sum();
                if atoms.is_empty() || atoms.iter().any(|a| a.weight <= 0.0) || (s - 1.0).abs() > 1e-12 {
                    return bad("atom weights must be positive and sum to 1");
                }
                if atoms.iter().any(|a| a.point.real().is_some() == space.is_symbolic()) {
                    return bad("atoms do not lie in this fiber space");
                }
                Ok(())
            }
            (Disintegration::Pullback { inner }, _) => inner.validate(sys),
            (Disintegration::Cesaro { inner, order }, _) => {
                if *order == 0 {
                    return bad("Cesàro order must be at least 1");
                }
                inner.validate(sys)
            }
        }
    }

    pub fn is_atomic(&self) -> bool {
        match self {
            Disintegration::Atomic { .. } => true,
            Disintegration::Pullback { inner } | Disintegration::Cesaro { inner, .. } => inner.is_atomic(),
            _ => false,
        }
    }

    /// μ_w.
    pub fn measure_at(&self, sys: &FiberSystem, w: &BasePoint) -> Result<FiberMeasure> {
        match self {
            Disintegration::UniformProduct => self.product(sys, w, &[], &VectorRule::Uniform),
            Disintegration::Product { head, tail } => self.product(sys, w, head, tail),
            Disintegration::Lebesgue { resolution } => {
                Ok(FiberMeasure::Grid(GridDensity::uniform(sys.space.is_circle(), *resolution)))
            }
            Disintegration::Grid { weights } => Ok(FiberMeasure::Grid(GridDensity {
                circle: sys.space.is_circle(),
                weights: weights.clone(),
            })),
            Disintegration::Atomic { atoms } => Ok(FiberMeasure::Atomic(atoms.clone())),
            Disintegration::Pullback { inner } => {
                let prev = w.advance(-1);
                pushforward(sys, &prev, &inner.measure_at(sys, &prev)?)
            }
            Disintegration::Cesaro { inner, order } => average(cesaro_components(sys, inner, w, *order)?),
        }
    }

    fn product(&self, sys: &FiberSystem, w: &BasePoint, head: &[VectorRule], tail: &VectorRule) -> Result<FiberMeasure> {
        let FiberSpace::Symbolic { alphabet } = &sys.space else {
            return Err(Error::Incompatible("cylinder-product rules need a symbolic fiber".into()));
        };
        let vectors = head
            .iter()
            .enumerate()
            .map(|(i, r)| r.vector(alphabet.at(w, i as i64), w.symbol(i as i64)))
            .collect::<Result<Vec<Vec<Q>>>>()?;
        Ok(FiberMeasure::product(ProductMeasure::new(w.clone(), alphabet.clone(), vectors, tail.clone())?))
    }
}

/// The components `(f_{w_{-1}}∘⋯∘f_{w_{-i}})∗μ_{w_{-i}}` for `i` in `0..n`.
pub fn cesaro_components(sys: &FiberSystem, inner: &Disintegration, w: &BasePoint, n: usize) -> Result<Vec<FiberMeasure>> {
    (0..n as i64)
        .map(|i| {
            let start = w.advance(-i);
            let mut mu = inner.measure_at(sys, &start)?;
            for s in 0..i {
                mu = pushforward(sys, &start.advance(s), &mu)?;
            }
            Ok(mu)
        })
        .collect()
}

/// Total weight of a cylinder mixture, used to assert mass conservation.
pub fn mixture_weight(mu: &FiberMeasure) -> Option<Q> {
    match mu {
        FiberMeasure::Cylinder(parts) => Some(parts.iter().map(|(w, _)| w.clone()).sum()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::{BaseEnvironment, EnvKind, RandomInt};
    use crate::exact::{q, Fraction};
    use crate::fiber::Generator;
    use crate::measure::{measure_distance, DistanceMode, Distance};

    fn shift_sys() -> FiberSystem {
        FiberSystem::new(
            FiberSpace::Symbolic { alphabet: RandomInt::SymbolTable(vec![2, 3]) },
            Generator::Shift,
            false,
        )
        .unwrap()
    }

    fn env() -> std::sync::Arc<BaseEnvironment> {
        BaseEnvironment::new(EnvKind::Bernoulli { weights: vec![0.5, 0.5] }, "fair").unwrap()
    }

    #[test]
    fn pullback_of_uniform_product_is_uniform() {
        let sys = shift_sys();
        let w = crate::base::BasePoint::seeded(&env(), 11);
        let a = Disintegration::UniformProduct.measure_at(&sys, &w).unwrap();
        let b = Disintegration::Pullback { inner: Box::new(Disintegration::UniformProduct) }
            .measure_at(&sys, &w)
            .unwrap();
        let d = measure_distance(&a, &b, DistanceMode::TvCylinder { depth: 6 }).unwrap();
        assert_eq!(d, Distance::Exact(q(0, 1)));
    }

    #[test]
    fn cesaro_of_skewed_start_has_two_components() {
        let sys = shift_sys();
        let w = crate::base::BasePoint::seeded(&env(), 11);
        let skew = Disintegration::Product { head: vec![VectorRule::Lead(Fraction(q(3, 4)))], tail: VectorRule::Uniform };
        let mu = Disintegration::Cesaro { inner: Box::new(skew), order: 8 }.measure_at(&sys, &w).unwrap();
        let FiberMeasure::Cylinder(parts) = &mu else { panic!() };
        assert_eq!(parts.len(), 2);
        assert_eq!(mixture_weight(&mu).unwrap(), q(1, 1));
        // depth-1 mass of symbol 1: (1/8)·3/4 + (7/8)·1/k(w)
        let k = RandomInt::SymbolTable(vec![2, 3]).at(&w, 0) as i64;
        assert_eq!(mu.cylinder_mass(&[1]).unwrap(), q(3, 32) + q(7, 8 * k));
    }

    #[test]
    fn cesaro_order_one_is_the_rule() {
        let sys = shift_sys();
        let w = crate::base::BasePoint::seeded(&env(), 3);
        let a = Disintegration::UniformProduct.measure_at(&sys, &w).unwrap();
        let b = Disintegration::Cesaro { inner: Box::new(Disintegration::UniformProduct), order: 1 }
            .measure_at(&sys, &w)
            .unwrap();
        assert_eq!(a, b);
    }
}
