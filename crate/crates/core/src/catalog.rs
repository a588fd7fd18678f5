//! Exhaustive catalogs of small monoids, one representative per
//! isomorphism class, plus per-monoid classification.
//!
//! Generation pins the identity to element 0 and backtracks over the
//! remaining table cells with incremental associativity pruning. A finished
//! table is kept only when it equals its own canonical form, which both
//! filters isomorphic duplicates and fixes a deterministic ordering.

use rayon::prelude::*;
use serde::Serialize;

use crate::budget::Budget;
use crate::category::{outer_group_of_category, TruncatedSkeleton};
use crate::error::{Error, Result};
use crate::monoid::{canonical_form, FiniteMonoid};

/// Largest catalog order the generator accepts. Order 5 already has 2237
/// classes and is out of desk scope.
pub const MAX_CATALOG_ORDER: usize = 4;

/// All monoids of a fixed order up to isomorphism, canonically ordered.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MonoidCatalog {
    pub order: usize,
    pub representatives: Vec<FiniteMonoid>,
}

impl MonoidCatalog {
    pub fn len(&self) -> usize {
        self.representatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.representatives.is_empty()
    }
}

pub fn generate_monoids(order: usize, budget: &Budget) -> Result<MonoidCatalog> {
    if order == 0 {
        return Err(Error::InvalidInput(
            "a monoid has at least one element".into(),
        ));
    }
    if order > MAX_CATALOG_ORDER {
        return Err(Error::TooLarge {
            what: "catalog order",
            size: order,
            limit: MAX_CATALOG_ORDER,
        });
    }
    let mut table = vec![vec![0usize; order]; order];
    for x in 0..order {
        table[0][x] = x;
        table[x][0] = x;
    }
    let cells: Vec<(usize, usize)> = (1..order)
        .flat_map(|i| (1..order).map(move |j| (i, j)))
        .collect();
    let mut representatives = Vec::new();
    fill_cells(&mut table, &cells, 0, order, budget, &mut representatives)?;
    representatives.sort_by(|a, b| a.table().cmp(b.table()));
    Ok(MonoidCatalog {
        order,
        representatives,
    })
}

fn fill_cells(
    table: &mut Vec<Vec<usize>>,
    cells: &[(usize, usize)],
    pos: usize,
    order: usize,
    budget: &Budget,
    representatives: &mut Vec<FiniteMonoid>,
) -> Result<()> {
    if pos == cells.len() {
        let m = FiniteMonoid::validate(table.clone(), 0)
            .expect("incremental pruning admits only monoid tables");
        let (canon, _) = canonical_form(&m, budget)?;
        if canon.table() == m.table() {
            representatives.push(m);
        }
        return Ok(());
    }
    budget.check_deadline()?;
    let (i, j) = cells[pos];
    for value in 0..order {
        table[i][j] = value;
        if associativity_consistent(table, order, pos) {
            fill_cells(table, cells, pos + 1, order, budget, representatives)?;
        }
    }
    Ok(())
}

/// Checks every associativity triple whose four lookups are all decided by
/// the cells assigned so far (identity row and column are always decided;
/// cell (i,j) with i,j >= 1 is decided once its row-major index is reached).
fn associativity_consistent(table: &[Vec<usize>], order: usize, assigned_upto: usize) -> bool {
    let decided = |a: usize, b: usize| -> Option<usize> {
        if a == 0 || b == 0 || (a - 1) * (order - 1) + (b - 1) <= assigned_upto {
            Some(table[a][b])
        } else {
            None
        }
    };
    for a in 1..order {
        for b in 1..order {
            for c in 1..order {
                let Some(ab) = decided(a, b) else { continue };
                let Some(bc) = decided(b, c) else { continue };
                let (Some(left), Some(right)) = (decided(ab, c), decided(a, bc)) else {
                    continue;
                };
                if left != right {
                    return false;
                }
            }
        }
    }
    true
}

/// Per-monoid classification: automorphism structure, the perfectness flag
/// (trivial automorphism group), and, when the truncated skeleton fits the
/// budget, the category-level outer group as a cross-check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassificationEntry {
    pub monoid: FiniteMonoid,
    pub aut_order: usize,
    pub inner_order: usize,
    pub outer_order: usize,
    pub perfect: bool,
    pub category_outer_order: Option<usize>,
    pub category_outer_matches: Option<bool>,
}

/// Classifies every catalog entry in parallel. Per-entry budget errors are
/// returned in place without aborting the rest of the batch.
pub fn classify_catalog(
    catalog: &MonoidCatalog,
    truncation: usize,
    budget: &Budget,
) -> Vec<Result<ClassificationEntry>> {
    catalog
        .representatives
        .par_iter()
        .map(|m| classify_monoid(m, truncation, budget))
        .collect()
}

pub fn classify_monoid(
    m: &FiniteMonoid,
    truncation: usize,
    budget: &Budget,
) -> Result<ClassificationEntry> {
    let aut = m.automorphisms(budget)?;
    let inner = m.inner_automorphisms();
    let outer = m.outer_group(budget)?;
    let (category_outer_order, category_outer_matches) =
        match TruncatedSkeleton::new(m.clone(), truncation, budget)
            .and_then(|skel| outer_group_of_category(&skel, budget))
        {
            Ok(cat) => (Some(cat.order), Some(cat.matches_monoid_outer)),
            Err(Error::TooLarge { .. }) | Err(Error::Timeout { .. }) => (None, None),
            Err(other) => return Err(other),
        };
    Ok(ClassificationEntry {
        monoid: m.clone(),
        aut_order: aut.len(),
        inner_order: inner.len(),
        outer_order: outer.order,
        perfect: aut.len() == 1,
        category_outer_order,
        category_outer_matches,
    })
}
