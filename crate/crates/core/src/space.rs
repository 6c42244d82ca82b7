//! Finite multi-variable outcome spaces.
//!
//! A [`ProductSpace`] is an ordered list of finite-state variables; its cells
//! are tuples of state indices, stored as row-major linear indices. Events
//! are explicit cell subsets.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A named variable with a finite, ordered list of state labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariableSpec {
    pub name: String,
    pub states: Vec<String>,
}

impl VariableSpec {
    pub fn new(name: impl Into<String>, states: Vec<String>) -> Result<Self> {
        let name = name.into();
        if states.is_empty() {
            return Err(Error::InvalidModel(format!(
                "variable `{name}` has no states"
            )));
        }
        for (i, s) in states.iter().enumerate() {
            if states[..i].contains(s) {
                return Err(Error::InvalidModel(format!(
                    "variable `{name}` has duplicate state `{s}`"
                )));
            }
        }
        Ok(VariableSpec { name, states })
    }

    /// Convenience constructor for a binary variable with states `x'`, `x''`.
    pub fn primed_binary(name: impl Into<String>) -> Self {
        let name = name.into();
        let states = vec![format!("{name}'"), format!("{name}''")];
        VariableSpec { name, states }
    }

    pub fn arity(&self) -> usize {
        self.states.len()
    }

    pub fn state_index(&self, label: &str) -> Option<usize> {
        self.states.iter().position(|s| s == label)
    }
}

/// The product of finitely many variables' state spaces.
///
/// Cells are addressed either as coordinate tuples (one state index per
/// variable) or as row-major linear indices; the last variable varies
/// fastest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductSpace {
    variables: Vec<VariableSpec>,
    strides: Vec<usize>,
    cell_count: usize,
}

impl ProductSpace {
    // The empty product is allowed and has a single cell (the empty tuple);
    // it backs constant gambles and degenerate observation parts.
    pub fn new(variables: Vec<VariableSpec>) -> Result<Arc<Self>> {
        for (i, v) in variables.iter().enumerate() {
            if variables[..i].iter().any(|u| u.name == v.name) {
                return Err(Error::InvalidModel(format!(
                    "duplicate variable name `{}`",
                    v.name
                )));
            }
        }
        let mut strides = vec![0usize; variables.len()];
        let mut count: usize = 1;
        for i in (0..variables.len()).rev() {
            strides[i] = count;
            count = count.checked_mul(variables[i].arity()).ok_or_else(|| {
                Error::InvalidModel("cell count overflows usize".to_string())
            })?;
        }
        Ok(Arc::new(ProductSpace {
            variables,
            strides,
            cell_count: count,
        }))
    }

    pub fn variables(&self) -> &[VariableSpec] {
        &self.variables
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn cell_count(&self) -> usize {
        self.cell_count
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    pub fn arity(&self, var: usize) -> usize {
        self.variables[var].arity()
    }

    pub fn stride(&self, var: usize) -> usize {
        self.strides[var]
    }

    /// Coordinate of variable `var` within linear cell index `idx`.
    #[inline]
    pub fn coord(&self, idx: usize, var: usize) -> usize {
        (idx / self.strides[var]) % self.variables[var].arity()
    }

    pub fn coords_of(&self, idx: usize) -> Vec<usize> {
        (0..self.variables.len()).map(|v| self.coord(idx, v)).collect()
    }

    pub fn index_of(&self, coords: &[usize]) -> Result<usize> {
        if coords.len() != self.variables.len() {
            return Err(Error::InvalidModel(format!(
                "cell has {} coordinates, space has {} variables",
                coords.len(),
                self.variables.len()
            )));
        }
        let mut idx = 0;
        for (v, &c) in coords.iter().enumerate() {
            if c >= self.arity(v) {
                return Err(Error::InvalidModel(format!(
                    "state index {c} out of range for variable `{}`",
                    self.variables[v].name
                )));
            }
            idx += c * self.strides[v];
        }
        Ok(idx)
    }

    /// Validates an index set: entries in range and pairwise distinct.
    pub fn check_index_set(&self, indices: &[usize]) -> Result<()> {
        for (i, &j) in indices.iter().enumerate() {
            if j >= self.variables.len() {
                return Err(Error::InvalidIndexSet {
                    indices: indices.to_vec(),
                    arity: self.variables.len(),
                    reason: format!("index {j} out of range"),
                });
            }
            if indices[..i].contains(&j) {
                return Err(Error::InvalidIndexSet {
                    indices: indices.to_vec(),
                    arity: self.variables.len(),
                    reason: format!("index {j} repeated"),
                });
            }
        }
        Ok(())
    }

    /// The projection operator: drops the coordinates outside `indices`,
    /// preserving the order in which `indices` lists them.
    pub fn project(&self, cell: &[usize], indices: &[usize]) -> Result<Vec<usize>> {
        self.check_index_set(indices)?;
        if cell.len() != self.variables.len() {
            return Err(Error::InvalidModel(format!(
                "cell has {} coordinates, space has {} variables",
                cell.len(),
                self.variables.len()
            )));
        }
        Ok(indices.iter().map(|&j| cell[j]).collect())
    }

    /// The space of the selected variables, in the order `indices` lists them.
    pub fn subspace(&self, indices: &[usize]) -> Result<Arc<ProductSpace>> {
        self.check_index_set(indices)?;
        ProductSpace::new(indices.iter().map(|&j| self.variables[j].clone()).collect())
    }

    /// Linear index into `subspace(indices)` of the projection of full-space
    /// cell `idx`.
    #[inline]
    pub fn project_index(&self, idx: usize, indices: &[usize], sub: &ProductSpace) -> usize {
        let mut p = 0;
        for (k, &j) in indices.iter().enumerate() {
            p += self.coord(idx, j) * sub.strides[k];
        }
        p
    }

    pub fn cells(&self) -> std::ops::Range<usize> {
        0..self.cell_count
    }

    /// Human-readable label of a cell, e.g. `(v', k'')`.
    pub fn cell_label(&self, idx: usize) -> String {
        let parts: Vec<&str> = (0..self.variables.len())
            .map(|v| self.variables[v].states[self.coord(idx, v)].as_str())
            .collect();
        format!("({})", parts.join(", "))
    }
}

/// An explicit subset of a space's cells.
#[derive(Debug, Clone)]
pub struct Event {
    space: Arc<ProductSpace>,
    members: Vec<bool>,
    count: usize,
}

impl Event {
    pub fn from_pred(space: &Arc<ProductSpace>, pred: impl Fn(usize) -> bool) -> Self {
        let members: Vec<bool> = space.cells().map(pred).collect();
        let count = members.iter().filter(|&&b| b).count();
        Event {
            space: Arc::clone(space),
            members,
            count,
        }
    }

    pub fn from_cells(space: &Arc<ProductSpace>, cells: &[usize]) -> Result<Self> {
        let mut members = vec![false; space.cell_count()];
        for &c in cells {
            if c >= members.len() {
                return Err(Error::InvalidModel(format!("cell index {c} out of range")));
            }
            members[c] = true;
        }
        let count = members.iter().filter(|&&b| b).count();
        Ok(Event {
            space: Arc::clone(space),
            members,
            count,
        })
    }

    pub fn whole(space: &Arc<ProductSpace>) -> Self {
        Event {
            space: Arc::clone(space),
            members: vec![true; space.cell_count()],
            count: space.cell_count(),
        }
    }

    /// Cells whose coordinates at `vars` match one of `tuples`.
    pub fn from_tuples(
        space: &Arc<ProductSpace>,
        vars: &[usize],
        tuples: &[Vec<usize>],
    ) -> Result<Self> {
        space.check_index_set(vars)?;
        let sub = space.subspace(vars)?;
        let mut allowed = vec![false; sub.cell_count()];
        for t in tuples {
            allowed[sub.index_of(t)?] = true;
        }
        Ok(Event::from_pred(space, |c| {
            allowed[space.project_index(c, vars, &sub)]
        }))
    }

    /// Cells with the given coordinates fixed at the given states.
    pub fn from_assignment(space: &Arc<ProductSpace>, assignment: &[(usize, usize)]) -> Result<Self> {
        let vars: Vec<usize> = assignment.iter().map(|&(v, _)| v).collect();
        let tuple: Vec<usize> = assignment.iter().map(|&(_, s)| s).collect();
        Event::from_tuples(space, &vars, &[tuple])
    }

    pub fn intersect(&self, other: &Event) -> Result<Event> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch);
        }
        let members: Vec<bool> = self
            .members
            .iter()
            .zip(&other.members)
            .map(|(&a, &b)| a && b)
            .collect();
        let count = members.iter().filter(|&&b| b).count();
        Ok(Event {
            space: Arc::clone(&self.space),
            members,
            count,
        })
    }

    pub fn union(&self, other: &Event) -> Result<Event> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch);
        }
        let members: Vec<bool> = self
            .members
            .iter()
            .zip(&other.members)
            .map(|(&a, &b)| a || b)
            .collect();
        let count = members.iter().filter(|&&b| b).count();
        Ok(Event {
            space: Arc::clone(&self.space),
            members,
            count,
        })
    }

    #[inline]
    pub fn contains(&self, idx: usize) -> bool {
        self.members[idx]
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn space(&self) -> &Arc<ProductSpace> {
        &self.space
    }

    pub fn cells(&self) -> impl Iterator<Item = usize> + '_ {
        self.members
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| if b { Some(i) } else { None })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abc_space() -> Arc<ProductSpace> {
        ProductSpace::new(vec![
            VariableSpec::new("X1", vec!["a".into(), "x".into()]).unwrap(),
            VariableSpec::new("X2", vec!["b".into(), "y".into()]).unwrap(),
            VariableSpec::new("X3", vec!["c".into(), "z".into()]).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn project_selects_coordinates() {
        let s = abc_space();
        assert_eq!(s.project(&[0, 1, 0], &[0, 2]).unwrap(), vec![0, 0]);
        assert_eq!(s.project(&[0, 1, 1], &[0, 1, 2]).unwrap(), vec![0, 1, 1]);
    }

    #[test]
    fn project_rejects_bad_indices() {
        let s = abc_space();
        assert!(matches!(
            s.project(&[0, 0, 0], &[3]),
            Err(Error::InvalidIndexSet { .. })
        ));
        assert!(matches!(
            s.project(&[0, 0, 0], &[1, 1]),
            Err(Error::InvalidIndexSet { .. })
        ));
    }

    #[test]
    fn seven_variable_projection_keeps_h_and_a() {
        // (v', k'', b'', h'', o', l', a') restricted to {H, A} is (h'', a').
        let vars: Vec<VariableSpec> = ["V", "K", "B", "H", "O", "L", "A"]
            .iter()
            .map(|n| VariableSpec::primed_binary(*n))
            .collect();
        let s = ProductSpace::new(vars).unwrap();
        let cell = [0, 1, 1, 1, 0, 0, 0];
        let h = s.var_index("H").unwrap();
        let a = s.var_index("A").unwrap();
        let proj = s.project(&cell, &[h, a]).unwrap();
        assert_eq!(proj, vec![1, 0]); // (h'', a')
    }

    #[test]
    fn linear_index_round_trip() {
        let s = abc_space();
        for idx in s.cells() {
            assert_eq!(s.index_of(&s.coords_of(idx)).unwrap(), idx);
        }
    }

    #[test]
    fn event_from_tuples_matches_predicate() {
        let s = abc_space();
        let e = Event::from_tuples(&s, &[0, 2], &[vec![0, 1], vec![1, 0]]).unwrap();
        for c in s.cells() {
            let want = (s.coord(c, 0), s.coord(c, 2)) == (0, 1)
                || (s.coord(c, 0), s.coord(c, 2)) == (1, 0);
            assert_eq!(e.contains(c), want);
        }
    }
}
