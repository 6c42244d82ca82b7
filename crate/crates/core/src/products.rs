//! Joint construction from hierarchical conditional assessments: marginal
//! extension and the strong and irrelevant products.
//!
//! All three build joint vertex lists by the iterated-expectation chain: a
//! joint vertex's mass at a cell is the product, over the chain's tables, of
//! the chosen row vertex's mass at the cell's target coordinates. They differ
//! only in how extreme points may be chosen:
//!
//! * the strong product picks one vertex per original conditioning row, so
//!   the choice is tied across every earlier variable not in the row's
//!   conditioning set;
//! * the irrelevant product picks one vertex per extended conditioning cell
//!   (the row's conditioning set plus all earlier chain variables),
//!   independently.
//!
//! On a strictly nested chain the two coincide; with marginal-only inputs
//! they differ and the strong product's envelope dominates.

use crate::cohgraph::{self, CollectionSpec};
use crate::conditional::ConditionalTable;
use crate::config::Config;
use crate::credal::CredalSet;
use crate::error::{Error, Result};
use crate::prevision::LinearPrevision;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TieMode {
    /// One extreme-point choice per original row.
    Strong,
    /// One choice per extended conditioning cell.
    Irrelevant,
}

/// Marginal extension of a chain given in order: the first table must be
/// unconditional and each table may condition only on variables already
/// introduced. For credal inputs the vertex set is built with strong-product
/// ties.
pub fn marginal_extension(tables: &[ConditionalTable], cfg: &Config) -> Result<CredalSet> {
    validate_chain_order(tables)?;
    enumerate_product(tables, TieMode::Strong, cfg)
}

/// Strong product of an A1+-representable collection; the chain order is
/// derived from the signatures.
pub fn strong_product(tables: &[ConditionalTable], cfg: &Config) -> Result<CredalSet> {
    let ordered = order_tables(tables)?;
    enumerate_product(&ordered, TieMode::Strong, cfg)
}

/// Irrelevant product of the same collections; enumerates extreme points per
/// extended conditioning cell.
pub fn irrelevant_product(tables: &[ConditionalTable], cfg: &Config) -> Result<CredalSet> {
    let ordered = order_tables(tables)?;
    enumerate_product(&ordered, TieMode::Irrelevant, cfg)
}

fn validate_chain_order(tables: &[ConditionalTable]) -> Result<()> {
    if tables.is_empty() {
        return Err(Error::InvalidChain("empty chain".into()));
    }
    let space = tables[0].space();
    if tables.iter().any(|t| t.space() != space) {
        return Err(Error::SpaceMismatch);
    }
    if !tables[0].givens().is_empty() {
        return Err(Error::InvalidChain(
            "first chain element must be unconditional".into(),
        ));
    }
    let mut introduced = vec![false; space.num_variables()];
    let mut output = vec![false; space.num_variables()];
    for (j, t) in tables.iter().enumerate() {
        for &i in t.givens() {
            if !introduced[i] {
                return Err(Error::InvalidChain(format!(
                    "table {j} conditions on variable {i} before it is introduced"
                )));
            }
        }
        for &o in t.targets() {
            if output[o] {
                return Err(Error::InvalidChain(format!(
                    "variable {o} is output by two tables"
                )));
            }
            output[o] = true;
            introduced[o] = true;
        }
        for &i in t.givens() {
            introduced[i] = true;
        }
    }
    if !output.iter().all(|&b| b) {
        return Err(Error::InvalidChain(
            "chain outputs must cover every variable".into(),
        ));
    }
    Ok(())
}

fn order_tables(tables: &[ConditionalTable]) -> Result<Vec<ConditionalTable>> {
    if tables.is_empty() {
        return Err(Error::InvalidChain("empty collection".into()));
    }
    let space = tables[0].space();
    if tables.iter().any(|t| t.space() != space) {
        return Err(Error::SpaceMismatch);
    }
    let spec = CollectionSpec::new(
        space.num_variables(),
        tables
            .iter()
            .map(|t| (t.targets().to_vec(), t.givens().to_vec()))
            .collect(),
    )
    .map_err(|e| Error::InvalidChain(e.to_string()))?;
    if !cohgraph::a1plus_partition_check(&spec) {
        return Err(Error::InvalidChain(
            "collection outputs must partition the variables".into(),
        ));
    }
    let order = cohgraph::compatible_order(&spec)
        .map_err(|_| Error::InvalidChain("collection is not A1-representable".into()))?;
    let ordered: Vec<ConditionalTable> = order.iter().map(|&k| tables[k].clone()).collect();
    validate_chain_order(&ordered)?;
    Ok(ordered)
}

/// One enumeration slot: the row whose vertex list the slot chooses from.
struct Slot {
    row: usize,
}

fn enumerate_product(
    tables: &[ConditionalTable],
    mode: TieMode,
    cfg: &Config,
) -> Result<CredalSet> {
    let space = tables[0].space().clone();
    if space.cell_count() > cfg.max_cells {
        return Err(Error::EnumerationCapExceeded {
            needed: space.cell_count() as u128,
            cap: cfg.max_cells as u128,
        });
    }

    // Extended conditioning sets per table: all variables introduced earlier
    // in the chain, plus the table's own conditioning set.
    let mut seen: Vec<usize> = Vec::new();
    let mut ext_givens: Vec<Vec<usize>> = Vec::new();
    for t in tables {
        let mut ext: Vec<usize> = seen
            .iter()
            .copied()
            .chain(t.givens().iter().copied())
            .collect();
        ext.sort_unstable();
        ext.dedup();
        ext_givens.push(ext);
        for &v in t.givens().iter().chain(t.targets()) {
            if !seen.contains(&v) {
                seen.push(v);
            }
        }
    }

    // Build the choice slots and their radices.
    let mut slots: Vec<Slot> = Vec::new();
    let mut radices: Vec<usize> = Vec::new();
    // Per (table, extended cell) the slot driving it.
    let mut slot_of: Vec<Vec<usize>> = Vec::new();
    for (j, t) in tables.iter().enumerate() {
        match mode {
            TieMode::Strong => {
                let base = slots.len();
                for row in t.given_sub().cells() {
                    slots.push(Slot { row });
                    radices.push(t.row(row).vertices().len());
                }
                let ext_sub = space.subspace(&ext_givens[j])?;
                let mut per_cell = vec![0usize; ext_sub.cell_count()];
                for (zc, slot) in per_cell.iter_mut().enumerate() {
                    // Recover the original row from the extended cell.
                    let zcoords = ext_sub.coords_of(zc);
                    let row_coords: Vec<usize> = t
                        .givens()
                        .iter()
                        .map(|g| zcoords[ext_givens[j].iter().position(|x| x == g).unwrap()])
                        .collect();
                    *slot = base + t.given_sub().index_of(&row_coords)?;
                }
                slot_of.push(per_cell);
            }
            TieMode::Irrelevant => {
                let ext_sub = space.subspace(&ext_givens[j])?;
                let mut per_cell = vec![0usize; ext_sub.cell_count()];
                for (zc, slot) in per_cell.iter_mut().enumerate() {
                    let zcoords = ext_sub.coords_of(zc);
                    let row_coords: Vec<usize> = t
                        .givens()
                        .iter()
                        .map(|g| zcoords[ext_givens[j].iter().position(|x| x == g).unwrap()])
                        .collect();
                    let row = t.given_sub().index_of(&row_coords)?;
                    *slot = slots.len();
                    slots.push(Slot { row });
                    radices.push(t.row(row).vertices().len());
                }
                slot_of.push(per_cell);
            }
        }
    }

    let total: u128 = radices.iter().map(|&r| r as u128).product();
    if total > cfg.max_vertices {
        return Err(Error::EnumerationCapExceeded {
            needed: total,
            cap: cfg.max_vertices,
        });
    }

    // Precompute, per table, the per-cell (extended-cell index, target index).
    let mut cell_maps: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    for (j, t) in tables.iter().enumerate() {
        let ext_sub = space.subspace(&ext_givens[j])?;
        let exts: Vec<usize> = space
            .cells()
            .map(|c| space.project_index(c, &ext_givens[j], &ext_sub))
            .collect();
        let tgts: Vec<usize> = space
            .cells()
            .map(|c| space.project_index(c, t.targets(), t.target_sub()))
            .collect();
        cell_maps.push((exts, tgts));
    }

    let mut choice = vec![0usize; slots.len()];
    let mut vertices: Vec<LinearPrevision> = Vec::with_capacity(total as usize);
    loop {
        let mass: Vec<f64> = space
            .cells()
            .map(|c| {
                let mut m = 1.0;
                for (j, t) in tables.iter().enumerate() {
                    let (exts, tgts) = &cell_maps[j];
                    let slot = slot_of[j][exts[c]];
                    let vertex = &t.row(slots[slot].row).vertices()[choice[slot]];
                    m *= vertex.mass()[tgts[c]];
                }
                m
            })
            .collect();
        vertices.push(LinearPrevision::new_renormalizing(&space, mass)?);

        // Mixed-radix increment, last slot fastest.
        let mut k = slots.len();
        loop {
            if k == 0 {
                return CredalSet::new(vertices);
            }
            k -= 1;
            choice[k] += 1;
            if choice[k] < radices[k] {
                break;
            }
            choice[k] = 0;
        }
    }
}
