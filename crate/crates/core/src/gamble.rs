//! Bounded real-valued payoff functions on a product space.
//!
//! A gamble with scope `J` stores one value per cell of the projected space
//! and is measurable with respect to the variables in `J` by construction:
//! cells with equal projection get equal payoffs.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::space::{Event, ProductSpace};

#[derive(Debug, Clone)]
pub struct Gamble {
    space: Arc<ProductSpace>,
    scope: Vec<usize>,
    sub: Arc<ProductSpace>,
    values: Vec<f64>,
}

impl Gamble {
    /// Builds a gamble from dense values over the projected space of `scope`
    /// (scope is sorted internally; values must be indexed accordingly).
    pub fn new(space: &Arc<ProductSpace>, scope: &[usize], values: Vec<f64>) -> Result<Self> {
        space.check_index_set(scope)?;
        let mut scope = scope.to_vec();
        scope.sort_unstable();
        let sub = space.subspace(&scope)?;
        if values.len() != sub.cell_count() {
            return Err(Error::InvalidModel(format!(
                "gamble has {} values, projected space has {} cells",
                values.len(),
                sub.cell_count()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidModel("gamble value is not finite".into()));
        }
        Ok(Gamble {
            space: Arc::clone(space),
            scope,
            sub,
            values,
        })
    }

    /// Builds a gamble by evaluating `f` on each cell of the projected space;
    /// `f` receives the scope coordinates in ascending variable order.
    pub fn from_fn(
        space: &Arc<ProductSpace>,
        scope: &[usize],
        f: impl Fn(&[usize]) -> f64,
    ) -> Result<Self> {
        space.check_index_set(scope)?;
        let mut sorted = scope.to_vec();
        sorted.sort_unstable();
        let sub = space.subspace(&sorted)?;
        let values: Vec<f64> = sub.cells().map(|c| f(&sub.coords_of(c))).collect();
        Gamble::new(space, &sorted, values)
    }

    pub fn constant(space: &Arc<ProductSpace>, c: f64) -> Result<Self> {
        Gamble::new(space, &[], vec![c])
    }

    /// The indicator gamble of an event (full scope).
    pub fn indicator(event: &Event) -> Self {
        let space = event.space();
        let scope: Vec<usize> = (0..space.num_variables()).collect();
        let values: Vec<f64> = space
            .cells()
            .map(|c| if event.contains(c) { 1.0 } else { 0.0 })
            .collect();
        Gamble {
            space: Arc::clone(space),
            scope,
            sub: Arc::clone(space),
            values,
        }
    }

    /// Indicator of a single-variable state.
    pub fn state_indicator(space: &Arc<ProductSpace>, var: usize, state: usize) -> Result<Self> {
        space.check_index_set(&[var])?;
        if state >= space.arity(var) {
            return Err(Error::InvalidModel(format!(
                "state index {state} out of range for variable {var}"
            )));
        }
        Gamble::from_fn(space, &[var], |c| if c[0] == state { 1.0 } else { 0.0 })
    }

    pub fn space(&self) -> &Arc<ProductSpace> {
        &self.space
    }

    pub fn scope(&self) -> &[usize] {
        &self.scope
    }

    /// Payoff at a full-space linear cell index.
    #[inline]
    pub fn value(&self, idx: usize) -> f64 {
        self.values[self.space.project_index(idx, &self.scope, &self.sub)]
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn neg(&self) -> Self {
        let mut g = self.clone();
        for v in &mut g.values {
            *v = -*v;
        }
        g
    }

    pub fn scale(&self, k: f64) -> Self {
        let mut g = self.clone();
        for v in &mut g.values {
            *v *= k;
        }
        g
    }

    pub fn shift(&self, c: f64) -> Self {
        let mut g = self.clone();
        for v in &mut g.values {
            *v += c;
        }
        g
    }

    pub fn add(&self, other: &Gamble) -> Result<Self> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch);
        }
        let mut scope: Vec<usize> = self.scope.clone();
        for &j in &other.scope {
            if !scope.contains(&j) {
                scope.push(j);
            }
        }
        scope.sort_unstable();
        Gamble::from_fn_full(&self.space, &scope, |idx| self.value(idx) + other.value(idx))
    }

    /// Masks the gamble by an event: `f * indicator(B)` (full scope).
    pub fn mul_indicator(&self, event: &Event) -> Result<Self> {
        if &self.space != event.space() {
            return Err(Error::SpaceMismatch);
        }
        let scope: Vec<usize> = (0..self.space.num_variables()).collect();
        Gamble::from_fn_full(&self.space, &scope, |idx| {
            if event.contains(idx) {
                self.value(idx)
            } else {
                0.0
            }
        })
    }

    /// Re-hosts the gamble on another space that starts with the same
    /// variables (the extra variables must come after all scope variables).
    pub fn relift(&self, space: &Arc<ProductSpace>) -> Result<Self> {
        for &j in &self.scope {
            if j >= space.num_variables()
                || space.variables()[j] != self.space.variables()[j]
            {
                return Err(Error::SpaceMismatch);
            }
        }
        Gamble::new(space, &self.scope, self.values.clone())
    }

    /// Like `from_fn` but the closure receives the full-space linear index.
    fn from_fn_full(
        space: &Arc<ProductSpace>,
        scope: &[usize],
        f: impl Fn(usize) -> f64,
    ) -> Result<Self> {
        let sub = space.subspace(scope)?;
        // Pick one representative full-space cell per projected cell.
        let mut values = vec![0.0; sub.cell_count()];
        for pc in sub.cells() {
            let coords = sub.coords_of(pc);
            let mut full = vec![0usize; space.num_variables()];
            for (k, &j) in scope.iter().enumerate() {
                full[j] = coords[k];
            }
            values[pc] = f(space.index_of(&full)?);
        }
        Gamble::new(space, scope, values)
    }
}
