//! Conditional lower previsions given as per-row credal sets, and the
//! coherence bookkeeping built on them: contingent-gamble residuals
//! `G(f|x)`, supports, and fixed-witness coherence evaluation.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gamble::Gamble;
use crate::prevision::LinearPrevision;
use crate::space::{Event, ProductSpace};
use crate::credal::CredalSet;

/// A conditional lower prevision `P(X_O | X_I)`: one credal set over the
/// target subspace per conditioning cell.
#[derive(Debug, Clone)]
pub struct ConditionalTable {
    space: Arc<ProductSpace>,
    targets: Vec<usize>,
    givens: Vec<usize>,
    target_sub: Arc<ProductSpace>,
    given_sub: Arc<ProductSpace>,
    rows: Vec<CredalSet>,
}

impl ConditionalTable {
    /// `rows` are indexed by the linear index of the conditioning cell in the
    /// subspace of `givens` (both index lists are sorted internally).
    pub fn new(
        space: &Arc<ProductSpace>,
        targets: &[usize],
        givens: &[usize],
        rows: Vec<CredalSet>,
    ) -> Result<Self> {
        space.check_index_set(targets)?;
        space.check_index_set(givens)?;
        if targets.is_empty() {
            return Err(Error::InvalidModel("empty target set".into()));
        }
        if targets.iter().any(|t| givens.contains(t)) {
            return Err(Error::InvalidModel(
                "target and conditioning sets overlap".into(),
            ));
        }
        let mut targets = targets.to_vec();
        targets.sort_unstable();
        let mut givens = givens.to_vec();
        givens.sort_unstable();
        let target_sub = space.subspace(&targets)?;
        let given_sub = space.subspace(&givens)?;
        if rows.len() != given_sub.cell_count() {
            return Err(Error::InvalidModel(format!(
                "{} rows for {} conditioning cells",
                rows.len(),
                given_sub.cell_count()
            )));
        }
        for row in &rows {
            if *row.space() != target_sub {
                return Err(Error::SpaceMismatch);
            }
        }
        Ok(ConditionalTable {
            space: Arc::clone(space),
            targets,
            givens,
            target_sub,
            given_sub,
            rows,
        })
    }

    /// An unconditional prevision as a one-row table.
    pub fn unconditional(space: &Arc<ProductSpace>, targets: &[usize], k: CredalSet) -> Result<Self> {
        ConditionalTable::new(space, targets, &[], vec![k])
    }

    pub fn space(&self) -> &Arc<ProductSpace> {
        &self.space
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn givens(&self) -> &[usize] {
        &self.givens
    }

    pub fn target_sub(&self) -> &Arc<ProductSpace> {
        &self.target_sub
    }

    pub fn given_sub(&self) -> &Arc<ProductSpace> {
        &self.given_sub
    }

    pub fn rows(&self) -> &[CredalSet] {
        &self.rows
    }

    pub fn row(&self, given_cell: usize) -> &CredalSet {
        &self.rows[given_cell]
    }

    pub fn row_at(&self, given_coords: &[usize]) -> Result<&CredalSet> {
        Ok(&self.rows[self.given_sub.index_of(given_coords)?])
    }

    /// True when every row is a single linear prevision.
    pub fn is_linear(&self) -> bool {
        self.rows.iter().all(|r| r.is_singleton())
    }

    /// The conditional lower prevision `P(f | x)` for a gamble measurable on
    /// targets-plus-givens: the row's lower prevision of `f` restricted to
    /// the slice `X_I = x`.
    pub fn conditional_lower(&self, f: &Gamble, given_cell: usize) -> Result<f64> {
        let g = self.restrict_gamble(f, given_cell)?;
        self.rows[given_cell].lower_prevision(&g)
    }

    /// Restriction of `f` to the slice `X_I = x`, as a gamble on the target
    /// subspace. `f` must be measurable on targets-plus-givens.
    fn restrict_gamble(&self, f: &Gamble, given_cell: usize) -> Result<Gamble> {
        if *f.space() != self.space {
            return Err(Error::SpaceMismatch);
        }
        for &j in f.scope() {
            if !self.targets.contains(&j) && !self.givens.contains(&j) {
                return Err(Error::InvalidModel(format!(
                    "gamble depends on variable {j} outside the table's domain"
                )));
            }
        }
        let given_coords = self.given_sub.coords_of(given_cell);
        let mut full = vec![0usize; self.space.num_variables()];
        for (k, &j) in self.givens.iter().enumerate() {
            full[j] = given_coords[k];
        }
        let space = &self.space;
        let targets = &self.targets;
        let values: Vec<f64> = self
            .target_sub
            .cells()
            .map(|tc| {
                let tcoords = self.target_sub.coords_of(tc);
                let mut cell = full.clone();
                for (k, &j) in targets.iter().enumerate() {
                    cell[j] = tcoords[k];
                }
                f.value(space.index_of(&cell).unwrap())
            })
            .collect();
        Gamble::new(
            &self.target_sub,
            &(0..self.targets.len()).collect::<Vec<_>>(),
            values,
        )
    }

    /// The contingent gamble `G(f|x) = 1_{X_I = x} (f - P(f|x))` on the full
    /// space.
    pub fn gamble_residual(&self, f: &Gamble, given_cell: usize) -> Result<Gamble> {
        let plo = self.conditional_lower(f, given_cell)?;
        let scope: Vec<usize> = (0..self.space.num_variables()).collect();
        let sub = self.given_sub.clone();
        let givens = self.givens.clone();
        Gamble::from_fn(&self.space, &scope, |coords| {
            let idx = self.space.index_of(coords).unwrap();
            if self.space.project_index(idx, &givens, &sub) == given_cell {
                f.value(idx) - plo
            } else {
                0.0
            }
        })
    }

    /// `G(f|X_I) = sum_x G(f|x)`: pointwise `f - P(f | x(cell))`.
    pub fn gamble_residual_summed(&self, f: &Gamble) -> Result<Gamble> {
        let mut row_lower = vec![0.0; self.given_sub.cell_count()];
        for x in self.given_sub.cells() {
            row_lower[x] = self.conditional_lower(f, x)?;
        }
        let scope: Vec<usize> = (0..self.space.num_variables()).collect();
        let sub = self.given_sub.clone();
        let givens = self.givens.clone();
        Gamble::from_fn(&self.space, &scope, |coords| {
            let idx = self.space.index_of(coords).unwrap();
            let x = self.space.project_index(idx, &givens, &sub);
            f.value(idx) - row_lower[x]
        })
    }

    /// Conditioning cells where `f` restricted to the slice is not
    /// identically zero (the support of `f` for this table's partition).
    pub fn support_of(&self, f: &Gamble) -> Result<Vec<usize>> {
        support(f, &self.givens)
    }
}

/// The conditioning cells `x` in the subspace of `given` for which
/// `f * 1_{X_I = x}` is not identically zero.
pub fn support(f: &Gamble, given: &[usize]) -> Result<Vec<usize>> {
    let space = f.space();
    space.check_index_set(given)?;
    let mut sorted = given.to_vec();
    sorted.sort_unstable();
    let sub = space.subspace(&sorted)?;
    let mut hit = vec![false; sub.cell_count()];
    for c in space.cells() {
        if f.value(c) != 0.0 {
            hit[space.project_index(c, &sorted, &sub)] = true;
        }
    }
    Ok(hit
        .iter()
        .enumerate()
        .filter_map(|(i, &b)| if b { Some(i) } else { None })
        .collect())
}

/// Pairwise-coherence residual of a joint with one linear row of a table:
/// `P(1_x (f - P_row(f|x)))`. A zero value (to 1e-9) certifies the
/// generalized Bayes rule at `x` when `P(x) > 0`.
pub fn gbr_residual(
    p: &LinearPrevision,
    table: &ConditionalTable,
    f: &Gamble,
    given_cell: usize,
) -> Result<f64> {
    if !table.is_linear() {
        return Err(Error::InvalidModel(
            "gbr residual needs linear (single-vertex) rows".into(),
        ));
    }
    if p.space() != table.space() {
        return Err(Error::SpaceMismatch);
    }
    let row_value = table.conditional_lower(f, given_cell)?;
    let mut acc = 0.0;
    let space = p.space();
    for c in space.cells() {
        if space.project_index(c, table.givens(), table.given_sub()) == given_cell {
            acc += p.mass()[c] * (f.value(c) - row_value);
        }
    }
    Ok(acc)
}

/// One admissible set `B` and the supremum of the witness combination on it.
#[derive(Debug, Clone)]
pub struct WitnessCandidate {
    /// Which table the set came from (`None` for the conditioning event of
    /// the distinguished gamble).
    pub table: Option<usize>,
    /// The conditioning cell in that table's given-subspace.
    pub given_cell: usize,
    pub sup: f64,
}

#[derive(Debug, Clone)]
pub struct WitnessReport {
    pub candidates: Vec<WitnessCandidate>,
    /// True when every admissible supremum is strictly negative, i.e. the
    /// collection is incoherent and the gambles witness it.
    pub incoherence_witnessed: bool,
}

/// Evaluates the combination `sum_j G_j(f_j | X_{I_j}) - G_{j0}(f_0 | z_0)`
/// pointwise and reports its supremum over each admissible set: the
/// conditioning event of the distinguished gamble and every support event of
/// the f_j. Coherence requires some supremum to be nonnegative.
pub fn coherence_witness_sup(
    tables: &[ConditionalTable],
    gambles: &[Gamble],
    j0: usize,
    f0: &Gamble,
    z0: &[usize],
) -> Result<WitnessReport> {
    if tables.is_empty() || tables.len() != gambles.len() {
        return Err(Error::InvalidModel(
            "need one gamble per conditional prevision".into(),
        ));
    }
    if j0 >= tables.len() {
        return Err(Error::InvalidModel(format!("j0 = {j0} out of range")));
    }
    let space = tables[0].space();
    if tables.iter().any(|t| t.space() != space) {
        return Err(Error::SpaceMismatch);
    }
    let z0_cell = tables[j0].given_sub().index_of(z0)?;

    let mut combo = tables[0].gamble_residual_summed(&gambles[0])?;
    for (t, f) in tables.iter().zip(gambles).skip(1) {
        combo = combo.add(&t.gamble_residual_summed(f)?)?;
    }
    combo = combo.add(&tables[j0].gamble_residual(f0, z0_cell)?.neg())?;

    let mut candidates = Vec::new();
    let mut push = |table: Option<usize>, givens: &[usize], sub: &Arc<ProductSpace>, x: usize| {
        let sup = space
            .cells()
            .filter(|&c| space.project_index(c, givens, sub) == x)
            .map(|c| combo.value(c))
            .fold(f64::NEG_INFINITY, f64::max);
        candidates.push(WitnessCandidate {
            table,
            given_cell: x,
            sup,
        });
    };
    push(None, tables[j0].givens(), tables[j0].given_sub(), z0_cell);
    for (j, (t, f)) in tables.iter().zip(gambles).enumerate() {
        for x in t.support_of(f)? {
            push(Some(j), t.givens(), t.given_sub(), x);
        }
    }
    let incoherence_witnessed = candidates.iter().all(|c| c.sup < 0.0);
    Ok(WitnessReport {
        candidates,
        incoherence_witnessed,
    })
}

/// Degenerate conditional row: point mass on one target cell per row.
pub fn point_mass_table(
    space: &Arc<ProductSpace>,
    targets: &[usize],
    givens: &[usize],
    row_cells: &[Vec<usize>],
) -> Result<ConditionalTable> {
    let mut sorted_t = targets.to_vec();
    sorted_t.sort_unstable();
    let target_sub = space.subspace(&sorted_t)?;
    let rows = row_cells
        .iter()
        .map(|coords| {
            let cell = target_sub.index_of(coords)?;
            Ok(CredalSet::singleton(LinearPrevision::degenerate(
                &target_sub,
                cell,
            )?))
        })
        .collect::<Result<Vec<_>>>()?;
    ConditionalTable::new(space, targets, givens, rows)
}

/// Event `X_I = x` for a table's conditioning cell, on the full space.
pub fn given_event(table: &ConditionalTable, given_cell: usize) -> Event {
    let space = table.space();
    Event::from_pred(space, |c| {
        space.project_index(c, table.givens(), table.given_sub()) == given_cell
    })
}
