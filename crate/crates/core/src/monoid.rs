//! Finite monoids presented by multiplication tables.
//!
//! A monoid of order `n` lives on the element set `{0, .., n-1}` with the
//! identity always at index 0; constructors that accept a different identity
//! index relabel the table before storing it. On top of the table the module
//! provides units, automorphism enumeration, inner automorphisms (conjugation
//! by units), the outer automorphism group Aut/Int, and isomorphism testing.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::error::{Error, Result};

/// A finite monoid, stored as a full multiplication table.
///
/// Invariants (enforced by every constructor): the table is square, all
/// entries are in range, index 0 is a two-sided identity, and multiplication
/// is associative.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "MonoidJson", into = "MonoidJson")]
pub struct FiniteMonoid {
    table: Vec<Vec<usize>>,
}

/// Wire form of a monoid. `identity` may be any element; construction
/// relabels so the identity ends up at index 0.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct MonoidJson {
    order: usize,
    identity: usize,
    table: Vec<Vec<usize>>,
}

impl TryFrom<MonoidJson> for FiniteMonoid {
    type Error = Error;

    fn try_from(raw: MonoidJson) -> Result<Self> {
        if raw.order != raw.table.len() {
            return Err(Error::InvalidInput(format!(
                "declared order {} does not match table size {}",
                raw.order,
                raw.table.len()
            )));
        }
        FiniteMonoid::validate(raw.table, raw.identity)
    }
}

impl From<FiniteMonoid> for MonoidJson {
    fn from(m: FiniteMonoid) -> Self {
        MonoidJson {
            order: m.order(),
            identity: 0,
            table: m.table,
        }
    }
}

impl FiniteMonoid {
    /// Checks the monoid laws on `table` with the given identity index and
    /// returns the monoid, relabeled so the identity is element 0.
    ///
    /// Errors name witnesses in the *original* labeling: the offending table
    /// coordinates for shape and range problems, the element where an
    /// identity law fails, or the triple on which associativity fails.
    pub fn validate(table: Vec<Vec<usize>>, identity: usize) -> Result<Self> {
        let order = table.len();
        if order == 0 {
            return Err(Error::InvalidInput("empty table".into()));
        }
        for (row, entries) in table.iter().enumerate() {
            if entries.len() != order {
                return Err(Error::NotSquare {
                    row,
                    len: entries.len(),
                    order,
                });
            }
            for (col, &value) in entries.iter().enumerate() {
                if value >= order {
                    return Err(Error::IndexOutOfRange {
                        row,
                        col,
                        value,
                        order,
                    });
                }
            }
        }
        if identity >= order {
            return Err(Error::IndexOutOfRange {
                row: identity,
                col: identity,
                value: identity,
                order,
            });
        }
        for x in 0..order {
            if table[identity][x] != x || table[x][identity] != x {
                return Err(Error::BadIdentity { element: x });
            }
        }
        for a in 0..order {
            for b in 0..order {
                for c in 0..order {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::NotAssociative { a, b, c });
                    }
                }
            }
        }
        let table = if identity == 0 {
            table
        } else {
            // Swap the labels 0 and `identity`.
            let perm: Vec<usize> = (0..order)
                .map(|x| match x {
                    0 => identity,
                    x if x == identity => 0,
                    x => x,
                })
                .collect();
            relabel_table(&table, &perm)
        };
        Ok(FiniteMonoid { table })
    }

    /// The cyclic group of order `n` under addition mod `n`.
    pub fn cyclic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("cyclic group of order 0".into()));
        }
        let table = (0..n)
            .map(|i| (0..n).map(|j| (i + j) % n).collect())
            .collect();
        FiniteMonoid::validate(table, 0)
    }

    /// The symmetric group on `k` letters, elements listed as permutations
    /// of `{0, .., k-1}` in lexicographic order (so the identity permutation
    /// is element 0). The product `p * q` acts as `p` first, then `q`.
    pub fn symmetric(k: usize) -> Result<Self> {
        if k == 0 || k > 5 {
            return Err(Error::TooLarge {
                what: "symmetric group degree",
                size: k,
                limit: 5,
            });
        }
        let perms = all_permutations(k);
        let index: HashMap<&[usize], usize> = perms
            .iter()
            .enumerate()
            .map(|(i, p)| (p.as_slice(), i))
            .collect();
        let table = perms
            .iter()
            .map(|p| {
                perms
                    .iter()
                    .map(|q| {
                        let pq: Vec<usize> = (0..k).map(|x| q[p[x]]).collect();
                        index[pq.as_slice()]
                    })
                    .collect()
            })
            .collect();
        FiniteMonoid::validate(table, 0)
    }

    /// Number of elements.
    pub fn order(&self) -> usize {
        self.table.len()
    }

    /// Product of `a` and `b`. Panics if either index is out of range.
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    /// The identity element, always 0.
    pub fn identity(&self) -> usize {
        0
    }

    /// The full multiplication table.
    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn is_commutative(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| (a + 1..n).all(|b| self.table[a][b] == self.table[b][a]))
    }

    /// Elements with a two-sided inverse, in increasing order.
    pub fn units(&self) -> Vec<usize> {
        (0..self.order())
            .filter(|&u| self.inverse_of(u).is_some())
            .collect()
    }

    /// The two-sided inverse of `u`, if `u` is a unit.
    pub fn inverse_of(&self, u: usize) -> Option<usize> {
        (0..self.order()).find(|&v| self.table[u][v] == 0 && self.table[v][u] == 0)
    }

    /// A small generating set, greedily chosen: repeatedly adjoin the least
    /// element not yet in the generated submonoid. The identity is never
    /// listed (it is generated by the empty set).
    pub fn generating_set(&self) -> Vec<usize> {
        let n = self.order();
        let mut known = vec![false; n];
        known[0] = true;
        let mut gens = Vec::new();
        while let Some(g) = known.iter().position(|&k| !k) {
            gens.push(g);
            known[g] = true;
            self.close_under_products(&mut known);
        }
        gens
    }

    fn close_under_products(&self, known: &mut [bool]) {
        let n = self.order();
        loop {
            let mut grew = false;
            for a in 0..n {
                if !known[a] {
                    continue;
                }
                for b in 0..n {
                    if !known[b] {
                        continue;
                    }
                    let p = self.table[a][b];
                    if !known[p] {
                        known[p] = true;
                        grew = true;
                    }
                }
            }
            if !grew {
                return;
            }
        }
    }

    /// Invariants of `x` preserved by every automorphism: the tail and
    /// period of the power sequence x, x^2, .. and whether `x` is a unit.
    fn element_profile(&self, x: usize) -> (usize, usize, bool) {
        let mut seen: HashMap<usize, usize> = HashMap::new();
        let mut power = x;
        let mut step = 0;
        loop {
            if let Some(&first) = seen.get(&power) {
                return (first, step - first, self.inverse_of(x).is_some());
            }
            seen.insert(power, step);
            power = self.table[power][x];
            step += 1;
        }
    }

    /// All automorphisms, sorted by image array (the identity map first).
    ///
    /// Below order 6 this filters every permutation fixing 0. From order 6
    /// up it backtracks over images of a generating set and derives the rest,
    /// which keeps the search well under the factorial blowup. Orders above
    /// `budget.max_monoid_order` are refused.
    pub fn automorphisms(&self, budget: &Budget) -> Result<Vec<MonoidAutomorphism>> {
        let n = self.order();
        budget.check_size("monoid order", n, budget.max_monoid_order)?;
        let mut found = if n < 6 {
            let mut out = Vec::new();
            for perm in permutations_fixing_zero(n) {
                if self.is_multiplicative(&perm) {
                    out.push(perm);
                }
            }
            out
        } else {
            self.automorphisms_via_generators(budget)?
        };
        found.sort();
        Ok(found
            .into_iter()
            .map(|image| MonoidAutomorphism { image })
            .collect())
    }

    fn is_multiplicative(&self, image: &[usize]) -> bool {
        let n = self.order();
        (0..n).all(|a| (0..n).all(|b| image[self.table[a][b]] == self.table[image[a]][image[b]]))
    }

    fn automorphisms_via_generators(&self, budget: &Budget) -> Result<Vec<Vec<usize>>> {
        let n = self.order();
        // Discovery order: each non-identity element is either a chosen
        // generator or a product of two earlier-known elements, so generator
        // images determine the whole map.
        let gens = self.generating_set();
        let mut discovery: Vec<(usize, Derivation)> = Vec::new();
        let mut known = vec![false; n];
        known[0] = true;
        for (slot, &g) in gens.iter().enumerate() {
            if known[g] {
                continue;
            }
            known[g] = true;
            discovery.push((g, Derivation::Gen(slot)));
            loop {
                let mut grew = false;
                for a in 0..n {
                    if !known[a] {
                        continue;
                    }
                    for b in 0..n {
                        if !known[b] {
                            continue;
                        }
                        let p = self.table[a][b];
                        if !known[p] {
                            known[p] = true;
                            discovery.push((p, Derivation::Prod(a, b)));
                            grew = true;
                        }
                    }
                }
                if !grew {
                    break;
                }
            }
        }
        let profiles: Vec<_> = (0..n).map(|x| self.element_profile(x)).collect();
        let candidates: Vec<Vec<usize>> = gens
            .iter()
            .map(|&g| (1..n).filter(|&y| profiles[y] == profiles[g]).collect())
            .collect();

        let mut found = Vec::new();
        let mut chosen = vec![0usize; gens.len()];
        self.backtrack_generator_images(
            0,
            &mut chosen,
            &candidates,
            &gens,
            &discovery,
            budget,
            &mut found,
        )?;
        Ok(found)
    }

    #[allow(clippy::too_many_arguments)]
    fn backtrack_generator_images(
        &self,
        slot: usize,
        chosen: &mut Vec<usize>,
        candidates: &[Vec<usize>],
        gens: &[usize],
        discovery: &[(usize, Derivation)],
        budget: &Budget,
        found: &mut Vec<Vec<usize>>,
    ) -> Result<()> {
        budget.check_deadline()?;
        if slot == gens.len() {
            let n = self.order();
            let mut image = vec![usize::MAX; n];
            image[0] = 0;
            for &(elem, how) in discovery {
                image[elem] = match how {
                    Derivation::Gen(s) => chosen[s],
                    Derivation::Prod(a, b) => self.table[image[a]][image[b]],
                };
            }
            let mut hit = vec![false; n];
            let bijective = image.iter().all(|&y| {
                if y >= n || hit[y] {
                    return false;
                }
                hit[y] = true;
                true
            });
            if bijective && self.is_multiplicative(&image) {
                found.push(image);
            }
            return Ok(());
        }
        for &y in &candidates[slot] {
            if chosen[..slot].contains(&y) {
                continue;
            }
            chosen[slot] = y;
            self.backtrack_generator_images(
                slot + 1,
                chosen,
                candidates,
                gens,
                discovery,
                budget,
                found,
            )?;
        }
        Ok(())
    }

    /// Conjugations x -> u x u^-1 by units, deduplicated and sorted.
    pub fn inner_automorphisms(&self) -> Vec<MonoidAutomorphism> {
        let n = self.order();
        let mut images = BTreeSet::new();
        for u in self.units() {
            let v = self.inverse_of(u).expect("units have inverses");
            let image: Vec<usize> = (0..n).map(|x| self.table[self.table[u][x]][v]).collect();
            images.insert(image);
        }
        images
            .into_iter()
            .map(|image| {
                MonoidAutomorphism::from_image(self, image)
                    .expect("conjugation by a unit is an automorphism")
            })
            .collect()
    }

    /// The outer automorphism group Aut/Int: one representative per coset of
    /// the inner automorphisms, with the induced multiplication table. The
    /// identity coset is index 0 and each representative is the
    /// lexicographically least member of its coset.
    pub fn outer_group(&self, budget: &Budget) -> Result<OuterGroup> {
        let auts = self.automorphisms(budget)?;
        let inner = self.inner_automorphisms();
        let mut signature_of: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for phi in &auts {
            let sig = inner
                .iter()
                .map(|iota| phi.compose(iota).image)
                .min()
                .expect("inner automorphisms contain the identity");
            signature_of.insert(phi.image.clone(), sig);
        }
        let reps: Vec<MonoidAutomorphism> = signature_of
            .values()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .map(|sig| MonoidAutomorphism { image: sig.clone() })
            .collect();
        let rep_index: HashMap<&[usize], usize> = reps
            .iter()
            .enumerate()
            .map(|(i, r)| (r.image.as_slice(), i))
            .collect();
        let table: Vec<Vec<usize>> = reps
            .iter()
            .map(|a| {
                reps.iter()
                    .map(|b| {
                        let product = a.compose(b);
                        rep_index[signature_of[&product.image].as_slice()]
                    })
                    .collect()
            })
            .collect();
        debug_assert_eq!(reps.len() * inner.len(), auts.len());
        Ok(OuterGroup {
            order: reps.len(),
            reps,
            table,
        })
    }
}

/// How an element was reached while closing a generating set: either it is
/// the generator in the given slot, or the product of two earlier elements.
#[derive(Clone, Copy)]
enum Derivation {
    Gen(usize),
    Prod(usize, usize),
}

/// A multiplicative bijection of a monoid fixing the identity, stored as its
/// image array: `image[x]` is where `x` goes.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MonoidAutomorphism {
    pub image: Vec<usize>,
}

impl MonoidAutomorphism {
    /// Validates that `image` is an automorphism of `m`.
    pub fn from_image(m: &FiniteMonoid, image: Vec<usize>) -> Result<Self> {
        let n = m.order();
        if image.len() != n {
            return Err(Error::NotAPermutation {
                order: n,
                detail: format!("image array has length {}", image.len()),
            });
        }
        let mut hit = vec![false; n];
        for &y in &image {
            if y >= n {
                return Err(Error::NotAPermutation {
                    order: n,
                    detail: format!("value {y} out of range"),
                });
            }
            if hit[y] {
                return Err(Error::NotAPermutation {
                    order: n,
                    detail: format!("value {y} repeated"),
                });
            }
            hit[y] = true;
        }
        if image[0] != 0 {
            return Err(Error::IdentityNotFixed { image: image[0] });
        }
        for a in 0..n {
            for b in 0..n {
                if image[m.table[a][b]] != m.table[image[a]][image[b]] {
                    return Err(Error::NotMultiplicative { a, b });
                }
            }
        }
        Ok(MonoidAutomorphism { image })
    }

    /// The identity automorphism of a monoid of order `n`.
    pub fn identity(n: usize) -> Self {
        MonoidAutomorphism {
            image: (0..n).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(x, &y)| x == y)
    }

    pub fn apply(&self, x: usize) -> usize {
        self.image[x]
    }

    pub fn order(&self) -> usize {
        self.image.len()
    }

    /// `self` after `other`: the composite x -> self(other(x)).
    pub fn compose(&self, other: &Self) -> Self {
        MonoidAutomorphism {
            image: other.image.iter().map(|&y| self.image[y]).collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        let mut image = vec![0; self.image.len()];
        for (x, &y) in self.image.iter().enumerate() {
            image[y] = x;
        }
        MonoidAutomorphism { image }
    }

    /// Re-checks the automorphism laws against `m`, for values that came in
    /// over the wire.
    pub fn validate_against(&self, m: &FiniteMonoid) -> Result<()> {
        MonoidAutomorphism::from_image(m, self.image.clone()).map(|_| ())
    }
}

/// The quotient Aut/Int with explicit coset representatives and group table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OuterGroup {
    pub order: usize,
    pub reps: Vec<MonoidAutomorphism>,
    pub table: Vec<Vec<usize>>,
}

impl OuterGroup {
    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }

    /// The index of the coset of `phi`, found by canonicalizing `phi` against
    /// the inner automorphisms of `m`. Returns `None` when `phi` belongs to
    /// no listed coset (e.g. it is not an automorphism of `m`).
    pub fn coset_index_of(&self, m: &FiniteMonoid, phi: &MonoidAutomorphism) -> Option<usize> {
        let inner = m.inner_automorphisms();
        let sig = inner.iter().map(|iota| phi.compose(iota).image).min()?;
        self.reps.iter().position(|r| r.image == sig)
    }
}

/// Tests whether two monoids are isomorphic; on success returns a relabeling
/// `w` of `a` onto `b` (so `w[a.mul(x, y)] == b.mul(w[x], w[y])`).
///
/// Below order 5 this backtracks directly over identity-fixing bijections in
/// lexicographic order, so a monoid tested against itself yields the
/// identity witness. From order 5 up it compares canonical forms and stitches
/// the witness from the two canonicalizing relabelings.
pub fn isomorphism(
    a: &FiniteMonoid,
    b: &FiniteMonoid,
    budget: &Budget,
) -> Result<Option<Vec<usize>>> {
    let n = a.order();
    if n != b.order() {
        return Ok(None);
    }
    budget.check_size("monoid order", n, budget.max_monoid_order)?;
    let mut profiles_a: Vec<_> = (0..n).map(|x| a.element_profile(x)).collect();
    let mut profiles_b: Vec<_> = (0..n).map(|x| b.element_profile(x)).collect();
    let per_element_a = profiles_a.clone();
    let per_element_b = profiles_b.clone();
    profiles_a.sort_unstable();
    profiles_b.sort_unstable();
    if profiles_a != profiles_b {
        return Ok(None);
    }
    if n < 5 {
        let mut image = vec![usize::MAX; n];
        image[0] = 0;
        let mut used = vec![false; n];
        used[0] = true;
        if search_isomorphism(
            a,
            b,
            &per_element_a,
            &per_element_b,
            1,
            &mut image,
            &mut used,
        ) {
            return Ok(Some(image));
        }
        return Ok(None);
    }
    let (canon_a, to_canon_a) = canonical_form(a, budget)?;
    let (canon_b, to_canon_b) = canonical_form(b, budget)?;
    if canon_a != canon_b {
        return Ok(None);
    }
    let mut from_canon_b = vec![0; n];
    for (x, &y) in to_canon_b.iter().enumerate() {
        from_canon_b[y] = x;
    }
    Ok(Some((0..n).map(|x| from_canon_b[to_canon_a[x]]).collect()))
}

fn search_isomorphism(
    a: &FiniteMonoid,
    b: &FiniteMonoid,
    profiles_a: &[(usize, usize, bool)],
    profiles_b: &[(usize, usize, bool)],
    next: usize,
    image: &mut Vec<usize>,
    used: &mut Vec<bool>,
) -> bool {
    let n = a.order();
    if next == n {
        return (0..n).all(|x| (0..n).all(|y| image[a.mul(x, y)] == b.mul(image[x], image[y])));
    }
    for y in 0..n {
        if used[y] || profiles_a[next] != profiles_b[y] {
            continue;
        }
        image[next] = y;
        used[y] = true;
        // Elements are assigned images in index order, so a product has an
        // image exactly when it is at most `next`.
        let consistent = (0..=next).all(|x| {
            (0..=next).all(|z| {
                let p = a.mul(x, z);
                p > next || image[p] == b.mul(image[x], image[z])
            })
        });
        if consistent && search_isomorphism(a, b, profiles_a, profiles_b, next + 1, image, used) {
            return true;
        }
        used[y] = false;
        image[next] = usize::MAX;
    }
    false
}

/// The lexicographically least relabeling of `m` among all relabelings that
/// keep the identity at 0, together with the relabeling (old index to new)
/// that achieves it. Two monoids are isomorphic exactly when their canonical
/// forms have equal tables.
pub fn canonical_form(m: &FiniteMonoid, budget: &Budget) -> Result<(FiniteMonoid, Vec<usize>)> {
    let n = m.order();
    budget.check_size("monoid order", n, budget.max_monoid_order)?;
    let mut best: Option<(Vec<Vec<usize>>, Vec<usize>)> = None;
    for perm in permutations_fixing_zero(n) {
        budget.check_deadline()?;
        let candidate = relabel_table(m.table(), &perm);
        let better = match &best {
            None => true,
            Some((table, _)) => candidate < *table,
        };
        if better {
            best = Some((candidate, perm));
        }
    }
    let (table, perm) = best.expect("at least the identity relabeling exists");
    Ok((FiniteMonoid { table }, perm))
}

/// Relabels `table` along `perm` (old index to new index).
fn relabel_table(table: &[Vec<usize>], perm: &[usize]) -> Vec<Vec<usize>> {
    let n = table.len();
    let mut out = vec![vec![0; n]; n];
    for (i, row) in table.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            out[perm[i]][perm[j]] = perm[v];
        }
    }
    out
}

/// All permutations of `{0, .., n-1}`, in lexicographic order.
pub fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(n);
    let mut used = vec![false; n];
    fn go(n: usize, current: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if current.len() == n {
            out.push(current.clone());
            return;
        }
        for y in 0..n {
            if used[y] {
                continue;
            }
            used[y] = true;
            current.push(y);
            go(n, current, used, out);
            current.pop();
            used[y] = false;
        }
    }
    go(n, &mut current, &mut used, &mut out);
    out
}

/// All permutations of `{0, .., n-1}` with `perm[0] == 0`, in lexicographic
/// order (so the identity permutation comes first).
pub(crate) fn permutations_fixing_zero(n: usize) -> Vec<Vec<usize>> {
    all_permutations(n)
        .into_iter()
        .filter(|p| p[0] == 0)
        .collect()
}
