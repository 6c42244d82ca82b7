//! Credal sets: finite vertex lists whose lower envelope is a coherent lower
//! prevision.
//!
//! The closed convex set of dominating linear previsions is represented by
//! its extreme points. The lower prevision of a gamble is the minimum vertex
//! expectation; conditioning by regular extension minimizes the Bayes ratio
//! over the vertices that give the conditioning event positive mass. Vertex
//! minimization is exact on polytopes: any mixture's conditional value
//! dominates some vertex's by the mediant inequality, and vertices with zero
//! event mass contribute nothing to a mixture's ratio since
//! `|P(f 1_B)| <= sup|f| * P(B)`.

use std::sync::Arc;

use crate::config::EPS_ZERO;
use crate::error::{Error, Result};
use crate::gamble::Gamble;
use crate::prevision::LinearPrevision;
use crate::space::{Event, ProductSpace};

#[derive(Debug, Clone)]
pub struct CredalSet {
    vertices: Vec<LinearPrevision>,
}

impl CredalSet {
    pub fn new(vertices: Vec<LinearPrevision>) -> Result<Self> {
        let first = vertices
            .first()
            .ok_or_else(|| Error::InvalidModel("credal set needs at least one vertex".into()))?;
        let space = Arc::clone(first.space());
        if vertices.iter().any(|p| *p.space() != space) {
            return Err(Error::SpaceMismatch);
        }
        Ok(CredalSet { vertices })
    }

    pub fn singleton(p: LinearPrevision) -> Self {
        CredalSet { vertices: vec![p] }
    }

    /// The vacuous credal set relative to a nonempty event: one degenerate
    /// vertex per member cell.
    pub fn vacuous(space: &Arc<ProductSpace>, a: &Event) -> Result<Self> {
        if a.space() != space {
            return Err(Error::SpaceMismatch);
        }
        if a.is_empty() {
            return Err(Error::EmptyEvent);
        }
        let vertices = a
            .cells()
            .map(|c| LinearPrevision::degenerate(space, c))
            .collect::<Result<Vec<_>>>()?;
        Ok(CredalSet { vertices })
    }

    pub fn vertices(&self) -> &[LinearPrevision] {
        &self.vertices
    }

    pub fn space(&self) -> &Arc<ProductSpace> {
        self.vertices[0].space()
    }

    pub fn is_singleton(&self) -> bool {
        self.vertices.len() == 1
    }

    /// Lower prevision: the minimum vertex expectation.
    pub fn lower_prevision(&self, f: &Gamble) -> Result<f64> {
        let mut lo = f64::INFINITY;
        for p in &self.vertices {
            lo = lo.min(p.expectation(f)?);
        }
        Ok(lo)
    }

    /// Upper prevision, by conjugacy: `-lower(-f)`.
    pub fn upper_prevision(&self, f: &Gamble) -> Result<f64> {
        Ok(-self.lower_prevision(&f.neg())?)
    }

    pub fn lower_probability(&self, b: &Event) -> Result<f64> {
        let mut lo = f64::INFINITY;
        for p in &self.vertices {
            lo = lo.min(p.event_mass(b)?);
        }
        Ok(lo)
    }

    /// Maximum vertex mass of an event.
    pub fn upper_probability(&self, b: &Event) -> Result<f64> {
        let mut hi = f64::NEG_INFINITY;
        for p in &self.vertices {
            hi = hi.max(p.event_mass(b)?);
        }
        Ok(hi)
    }

    /// Regular extension: the minimal Bayes-conditioned value over vertices
    /// that give the conditioning event mass above `eps_zero`.
    pub fn regular_extension(&self, b: &Event, f: &Gamble) -> Result<f64> {
        self.regular_extension_with(b, f, EPS_ZERO)
    }

    pub fn regular_extension_with(&self, b: &Event, f: &Gamble, eps_zero: f64) -> Result<f64> {
        let mut lo = f64::INFINITY;
        let mut max_mass = f64::NEG_INFINITY;
        for p in &self.vertices {
            let pb = p.event_mass(b)?;
            max_mass = max_mass.max(pb);
            if pb > eps_zero {
                lo = lo.min(p.bayes_condition_with(b, f, eps_zero)?);
            }
        }
        if lo.is_infinite() {
            return Err(Error::ZeroUpperProbability {
                max_mass,
                eps: eps_zero,
            });
        }
        Ok(lo)
    }

    /// Conjugate of the regular extension.
    pub fn upper_regular_extension_with(
        &self,
        b: &Event,
        f: &Gamble,
        eps_zero: f64,
    ) -> Result<f64> {
        Ok(-self.regular_extension_with(b, &f.neg(), eps_zero)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::VariableSpec;

    fn coin_pair() -> Arc<ProductSpace> {
        ProductSpace::new(vec![
            VariableSpec::new("X1", vec!["heads".into(), "tails".into()]).unwrap(),
            VariableSpec::new("X2", vec!["heads".into(), "tails".into()]).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn vacuous_lower_is_min_over_event() {
        let s = coin_pair();
        let a = Event::from_cells(&s, &[0, 3]).unwrap();
        let k = CredalSet::vacuous(&s, &a).unwrap();
        let f = Gamble::from_fn(&s, &[0, 1], |c| (c[0] * 2 + c[1]) as f64).unwrap();
        assert_eq!(k.lower_prevision(&f).unwrap(), 0.0);
        assert_eq!(k.upper_prevision(&f).unwrap(), 3.0);
        // Vacuous on the whole space: lower prevision is the infimum.
        let whole = CredalSet::vacuous(&s, &Event::whole(&s)).unwrap();
        assert_eq!(whole.lower_prevision(&f).unwrap(), f.min_value());
    }

    #[test]
    fn vacuous_rejects_empty_event() {
        let s = coin_pair();
        let a = Event::from_cells(&s, &[]).unwrap();
        assert!(matches!(
            CredalSet::vacuous(&s, &a),
            Err(Error::EmptyEvent)
        ));
    }

    #[test]
    fn singleton_lower_is_expectation() {
        let s = coin_pair();
        let p = LinearPrevision::new(&s, vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let k = CredalSet::singleton(p.clone());
        let f = Gamble::from_fn(&s, &[0, 1], |c| (c[0] + 10 * c[1]) as f64).unwrap();
        assert_eq!(
            k.lower_prevision(&f).unwrap(),
            p.expectation(&f).unwrap()
        );
    }

    #[test]
    fn loaded_coin_regular_extension() {
        // A coin known to always land the same way: vacuous on
        // {(heads, heads), (tails, tails)}. Conditioning on X1 = heads makes
        // X2 = heads certain.
        let s = coin_pair();
        let a = Event::from_cells(&s, &[0, 3]).unwrap();
        let k = CredalSet::vacuous(&s, &a).unwrap();
        let b = Event::from_assignment(&s, &[(0, 0)]).unwrap();
        let f = Gamble::state_indicator(&s, 1, 0).unwrap();
        assert_eq!(k.regular_extension(&b, &f).unwrap(), 1.0);
    }

    #[test]
    fn regular_extension_on_whole_space_is_lower_prevision() {
        let s = coin_pair();
        let k = CredalSet::new(vec![
            LinearPrevision::new(&s, vec![0.4, 0.1, 0.25, 0.25]).unwrap(),
            LinearPrevision::new(&s, vec![0.1, 0.4, 0.3, 0.2]).unwrap(),
        ])
        .unwrap();
        let f = Gamble::from_fn(&s, &[0, 1], |c| (3 * c[0] + c[1]) as f64).unwrap();
        let b = Event::whole(&s);
        assert_eq!(
            k.regular_extension(&b, &f).unwrap(),
            k.lower_prevision(&f).unwrap()
        );
    }

    #[test]
    fn regular_extension_rejects_zero_upper_probability() {
        let s = coin_pair();
        let k = CredalSet::vacuous(&s, &Event::from_cells(&s, &[0]).unwrap()).unwrap();
        let b = Event::from_cells(&s, &[3]).unwrap();
        let f = Gamble::constant(&s, 1.0).unwrap();
        assert!(matches!(
            k.regular_extension(&b, &f),
            Err(Error::ZeroUpperProbability { .. })
        ));
    }

    #[test]
    fn singleton_regular_extension_equals_bayes() {
        let s = coin_pair();
        let p = LinearPrevision::new(&s, vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let k = CredalSet::singleton(p.clone());
        let b = Event::from_assignment(&s, &[(0, 1)]).unwrap();
        let f = Gamble::state_indicator(&s, 1, 1).unwrap();
        assert_eq!(
            k.regular_extension(&b, &f).unwrap(),
            p.bayes_condition(&b, &f).unwrap()
        );
    }
}
