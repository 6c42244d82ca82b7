//! Linear previsions: expectation operators of probability mass vectors.

use std::sync::Arc;

use crate::config::EPS_ZERO;
use crate::error::{Error, Result};
use crate::gamble::Gamble;
use crate::space::{Event, ProductSpace};

/// Tolerance on the unit-sum constraint of a mass vector.
pub const MASS_SUM_TOL: f64 = 1e-12;

/// Drift bound under which a constructed joint may be renormalized.
pub const RENORM_TOL: f64 = 1e-9;

/// A probability mass vector on a finite space, acting on gambles as the
/// expectation operator.
#[derive(Debug, Clone)]
pub struct LinearPrevision {
    space: Arc<ProductSpace>,
    mass: Vec<f64>,
}

impl LinearPrevision {
    pub fn new(space: &Arc<ProductSpace>, mass: Vec<f64>) -> Result<Self> {
        if mass.len() != space.cell_count() {
            return Err(Error::InvalidMass(format!(
                "{} entries for {} cells",
                mass.len(),
                space.cell_count()
            )));
        }
        if mass.iter().any(|&m| !(m >= 0.0) || !m.is_finite()) {
            return Err(Error::InvalidMass("negative or non-finite entry".into()));
        }
        let sum: f64 = mass.iter().sum();
        if (sum - 1.0).abs() > MASS_SUM_TOL {
            return Err(Error::InvalidMass(format!("entries sum to {sum}")));
        }
        Ok(LinearPrevision {
            space: Arc::clone(space),
            mass,
        })
    }

    /// Accepts small construction drift (|sum - 1| <= 1e-9) and renormalizes;
    /// larger drift is rejected.
    pub fn new_renormalizing(space: &Arc<ProductSpace>, mut mass: Vec<f64>) -> Result<Self> {
        if mass.len() != space.cell_count() {
            return Err(Error::InvalidMass(format!(
                "{} entries for {} cells",
                mass.len(),
                space.cell_count()
            )));
        }
        if mass.iter().any(|&m| !(m >= 0.0) || !m.is_finite()) {
            return Err(Error::InvalidMass("negative or non-finite entry".into()));
        }
        let sum: f64 = mass.iter().sum();
        if (sum - 1.0).abs() > RENORM_TOL {
            return Err(Error::InvalidMass(format!(
                "entries sum to {sum}, outside the renormalization window"
            )));
        }
        for m in &mut mass {
            *m /= sum;
        }
        Ok(LinearPrevision {
            space: Arc::clone(space),
            mass,
        })
    }

    /// Point mass at one cell.
    pub fn degenerate(space: &Arc<ProductSpace>, cell: usize) -> Result<Self> {
        if cell >= space.cell_count() {
            return Err(Error::InvalidMass(format!("cell {cell} out of range")));
        }
        let mut mass = vec![0.0; space.cell_count()];
        mass[cell] = 1.0;
        LinearPrevision::new(space, mass)
    }

    pub fn uniform(space: &Arc<ProductSpace>) -> Result<Self> {
        let n = space.cell_count();
        LinearPrevision::new(space, vec![1.0 / n as f64; n])
    }

    pub fn space(&self) -> &Arc<ProductSpace> {
        &self.space
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    /// The expectation `sum_cell mass * payoff`; linear in the gamble.
    pub fn expectation(&self, f: &Gamble) -> Result<f64> {
        if self.space != *f.space() {
            return Err(Error::SpaceMismatch);
        }
        Ok(self
            .mass
            .iter()
            .enumerate()
            .map(|(c, &m)| m * f.value(c))
            .sum())
    }

    pub fn event_mass(&self, b: &Event) -> Result<f64> {
        if &self.space != b.space() {
            return Err(Error::SpaceMismatch);
        }
        Ok(b.cells().map(|c| self.mass[c]).sum())
    }

    /// Bayes conditioning: `P(f * 1_B) / P(B)`.
    pub fn bayes_condition(&self, b: &Event, f: &Gamble) -> Result<f64> {
        self.bayes_condition_with(b, f, EPS_ZERO)
    }

    pub fn bayes_condition_with(&self, b: &Event, f: &Gamble, eps_zero: f64) -> Result<f64> {
        if self.space != *f.space() || &self.space != b.space() {
            return Err(Error::SpaceMismatch);
        }
        let pb = self.event_mass(b)?;
        if pb <= eps_zero {
            return Err(Error::ZeroMassEvent {
                mass: pb,
                eps: eps_zero,
            });
        }
        let num: f64 = b.cells().map(|c| self.mass[c] * f.value(c)).sum();
        Ok(num / pb)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::VariableSpec;

    fn coin_pair() -> Arc<ProductSpace> {
        ProductSpace::new(vec![
            VariableSpec::new("X1", vec!["h".into(), "t".into()]).unwrap(),
            VariableSpec::new("X2", vec!["h".into(), "t".into()]).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn uniform_symmetry() {
        let s = ProductSpace::new(vec![VariableSpec::new(
            "X",
            vec!["0".into(), "1".into()],
        )
        .unwrap()])
        .unwrap();
        let p = LinearPrevision::uniform(&s).unwrap();
        let f = Gamble::new(&s, &[0], vec![0.0, 1.0]).unwrap();
        assert_eq!(p.expectation(&f).unwrap(), 0.5);
    }

    #[test]
    fn point_mass_evaluates_the_gamble() {
        let s = coin_pair();
        let f = Gamble::from_fn(&s, &[0, 1], |c| (2 * c[0] + c[1]) as f64).unwrap();
        for cell in s.cells() {
            let p = LinearPrevision::degenerate(&s, cell).unwrap();
            assert_eq!(p.expectation(&f).unwrap(), f.value(cell));
        }
    }

    #[test]
    fn bayes_renormalizes() {
        let s = coin_pair();
        let p = LinearPrevision::uniform(&s).unwrap();
        let b = Event::from_assignment(&s, &[(0, 0)]).unwrap(); // X1 = h
        let f = Gamble::indicator(&Event::from_assignment(&s, &[(0, 0), (1, 0)]).unwrap());
        assert!((p.bayes_condition(&b, &f).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn conditioning_on_whole_space_is_expectation() {
        let s = coin_pair();
        let p = LinearPrevision::new(&s, vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let f = Gamble::from_fn(&s, &[0, 1], |c| (c[0] + 3 * c[1]) as f64).unwrap();
        let b = Event::whole(&s);
        assert!(
            (p.bayes_condition(&b, &f).unwrap() - p.expectation(&f).unwrap()).abs() < 1e-12
        );
    }

    #[test]
    fn zero_mass_event_is_rejected() {
        let s = coin_pair();
        let p = LinearPrevision::degenerate(&s, 0).unwrap();
        let b = Event::from_cells(&s, &[3]).unwrap();
        let f = Gamble::constant(&s, 1.0).unwrap();
        assert!(matches!(
            p.bayes_condition(&b, &f),
            Err(Error::ZeroMassEvent { .. })
        ));
    }

    #[test]
    fn space_mismatch_is_detected() {
        let s1 = coin_pair();
        let s2 = ProductSpace::new(vec![VariableSpec::new(
            "Other",
            vec!["0".into(), "1".into()],
        )
        .unwrap()])
        .unwrap();
        let p = LinearPrevision::uniform(&s1).unwrap();
        let f = Gamble::constant(&s2, 1.0).unwrap();
        assert!(matches!(p.expectation(&f), Err(Error::SpaceMismatch)));
    }

    #[test]
    fn mass_validation() {
        let s = coin_pair();
        assert!(LinearPrevision::new(&s, vec![0.5, 0.5, 0.1, -0.1]).is_err());
        assert!(LinearPrevision::new(&s, vec![0.3, 0.3, 0.3, 0.2]).is_err());
        // Renormalization accepts 1e-10 drift but not 1e-3.
        let drift = vec![0.25 + 2.5e-11, 0.25, 0.25, 0.25];
        assert!(LinearPrevision::new_renormalizing(&s, drift).is_ok());
        assert!(LinearPrevision::new_renormalizing(&s, vec![0.25, 0.25, 0.25, 0.251]).is_err());
    }
}
