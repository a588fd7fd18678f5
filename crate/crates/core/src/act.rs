//! Free left S-acts and their homomorphisms.
//!
//! The free act of rank `n` over a monoid S is the disjoint union of `n`
//! copies of S, written F_n. An element is a pair (copy, monoid element),
//! the action is s·(i, t) = (i, st), and the basis point of copy `i` is
//! (i, identity). Every equivariant map F_n -> F_m is determined by where it
//! sends the n basis points, so homs are stored as arrays of basis images
//! and hom-sets enumerate in a canonical order indexed by mixed-radix
//! counting over those arrays.

use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::monoid::{FiniteMonoid, MonoidAutomorphism};

/// An element (copy, elem) of a free act: monoid element `elem` sitting in
/// the `copy`-th summand. Both coordinates are zero-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ActElement {
    pub copy: usize,
    pub elem: usize,
}

impl ActElement {
    /// Flat index copy·|S| + elem, the canonical ordering of act elements.
    pub fn packed(self, order: usize) -> usize {
        self.copy * order + self.elem
    }

    pub fn unpacked(packed: usize, order: usize) -> Self {
        ActElement {
            copy: packed / order,
            elem: packed % order,
        }
    }
}

/// The free act F_n over a monoid, owning its scalar monoid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeAct {
    monoid: FiniteMonoid,
    rank: usize,
}

impl FreeAct {
    pub fn new(monoid: FiniteMonoid, rank: usize) -> Result<Self> {
        if rank == 0 {
            return Err(Error::InvalidInput("free act of rank 0".into()));
        }
        Ok(FreeAct { monoid, rank })
    }

    pub fn monoid(&self) -> &FiniteMonoid {
        &self.monoid
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn element_count(&self) -> usize {
        self.rank * self.monoid.order()
    }

    pub fn elements(&self) -> impl Iterator<Item = ActElement> + '_ {
        let order = self.monoid.order();
        (0..self.element_count()).map(move |p| ActElement::unpacked(p, order))
    }

    /// The basis point of copy `i`: (i, identity).
    pub fn basis(&self, i: usize) -> Result<ActElement> {
        if i >= self.rank {
            return Err(Error::CopyOutOfRange {
                copy: i,
                rank: self.rank,
            });
        }
        Ok(ActElement { copy: i, elem: 0 })
    }

    /// The action s·(i, t) = (i, st).
    pub fn action(&self, s: usize, x: ActElement) -> Result<ActElement> {
        self.check_element(x)?;
        if s >= self.monoid.order() {
            return Err(Error::ElemOutOfRange {
                elem: s,
                order: self.monoid.order(),
            });
        }
        Ok(ActElement {
            copy: x.copy,
            elem: self.monoid.mul(s, x.elem),
        })
    }

    fn check_element(&self, x: ActElement) -> Result<()> {
        check_element(&self.monoid, self.rank, x)
    }
}

fn check_element(m: &FiniteMonoid, rank: usize, x: ActElement) -> Result<()> {
    if x.copy >= rank {
        return Err(Error::CopyOutOfRange { copy: x.copy, rank });
    }
    if x.elem >= m.order() {
        return Err(Error::ElemOutOfRange {
            elem: x.elem,
            order: m.order(),
        });
    }
    Ok(())
}

/// An equivariant map F_n -> F_m, stored by its basis images: the map sends
/// (i, t) to (j, t·s) where basis_images[i] = (j, s).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ActHom {
    pub source_rank: usize,
    pub target_rank: usize,
    pub basis_images: Vec<ActElement>,
}

impl ActHom {
    pub fn new(
        m: &FiniteMonoid,
        source_rank: usize,
        target_rank: usize,
        basis_images: Vec<ActElement>,
    ) -> Result<Self> {
        if basis_images.len() != source_rank {
            return Err(Error::RankMismatch {
                expected: source_rank,
                found: basis_images.len(),
            });
        }
        for &img in &basis_images {
            check_element(m, target_rank, img)?;
        }
        Ok(ActHom {
            source_rank,
            target_rank,
            basis_images,
        })
    }

    /// The identity map on F_rank.
    pub fn identity(rank: usize) -> Self {
        ActHom {
            source_rank: rank,
            target_rank: rank,
            basis_images: (0..rank).map(|i| ActElement { copy: i, elem: 0 }).collect(),
        }
    }

    /// The canonical injection F_1 -> F_n onto copy `i`.
    pub fn injection(i: usize, n: usize) -> Result<Self> {
        if i >= n {
            return Err(Error::CopyOutOfRange { copy: i, rank: n });
        }
        Ok(ActHom {
            source_rank: 1,
            target_rank: n,
            basis_images: vec![ActElement { copy: i, elem: 0 }],
        })
    }

    /// The codiagonal F_n -> F_1 collapsing every copy onto the single copy
    /// of F_1, (i, s) -> (0, s).
    pub fn codiagonal(n: usize) -> Self {
        ActHom {
            source_rank: n,
            target_rank: 1,
            basis_images: vec![ActElement { copy: 0, elem: 0 }; n],
        }
    }

    /// Applies the hom: (i, t) -> (j, t·s) for basis image (j, s).
    pub fn apply(&self, m: &FiniteMonoid, x: ActElement) -> Result<ActElement> {
        check_element(m, self.source_rank, x)?;
        let img = self.basis_images[x.copy];
        Ok(ActElement {
            copy: img.copy,
            elem: m.mul(x.elem, img.elem),
        })
    }

    /// `self` after `f`: the composite x -> self(f(x)). Requires `f`'s
    /// target rank to equal `self`'s source rank.
    pub fn compose(&self, m: &FiniteMonoid, f: &ActHom) -> Result<ActHom> {
        if f.target_rank != self.source_rank {
            return Err(Error::RankMismatch {
                expected: self.source_rank,
                found: f.target_rank,
            });
        }
        let basis_images = f
            .basis_images
            .iter()
            .map(|&img| self.apply(m, img))
            .collect::<Result<Vec<_>>>()?;
        Ok(ActHom {
            source_rank: f.source_rank,
            target_rank: self.target_rank,
            basis_images,
        })
    }

    /// The total map on packed element indices.
    pub fn element_map(&self, m: &FiniteMonoid) -> Vec<usize> {
        let order = m.order();
        (0..self.source_rank * order)
            .map(|p| {
                let x = ActElement::unpacked(p, order);
                let img = self.basis_images[x.copy];
                ActElement {
                    copy: img.copy,
                    elem: m.mul(x.elem, img.elem),
                }
                .packed(order)
            })
            .collect()
    }

    /// True when the induced total map is a bijection onto the target.
    pub fn is_bijective(&self, m: &FiniteMonoid) -> bool {
        let target_size = self.target_rank * m.order();
        if self.source_rank != self.target_rank {
            return false;
        }
        let mut hit = vec![false; target_size];
        for p in self.element_map(m) {
            if hit[p] {
                return false;
            }
            hit[p] = true;
        }
        true
    }

    /// If every basis image is (π(i), uᵢ) with π a permutation of the copies
    /// and each uᵢ a unit, returns (π, units). This is the structural shape
    /// that bijectivity is expected to force; tests compare it against
    /// [`ActHom::is_bijective`] rather than assuming the equivalence.
    pub fn unit_permutation_form(&self, m: &FiniteMonoid) -> Option<(Vec<usize>, Vec<usize>)> {
        if self.source_rank != self.target_rank {
            return None;
        }
        let mut pi = Vec::with_capacity(self.source_rank);
        let mut units = Vec::with_capacity(self.source_rank);
        let mut hit = vec![false; self.target_rank];
        for &img in &self.basis_images {
            if hit[img.copy] || m.inverse_of(img.elem).is_none() {
                return None;
            }
            hit[img.copy] = true;
            pi.push(img.copy);
            units.push(img.elem);
        }
        Some((pi, units))
    }

    /// The inverse hom, if this one is bijective.
    pub fn inverse(&self, m: &FiniteMonoid) -> Option<ActHom> {
        if !self.is_bijective(m) {
            return None;
        }
        let order = m.order();
        let forward = self.element_map(m);
        let mut backward = vec![0; forward.len()];
        for (p, &q) in forward.iter().enumerate() {
            backward[q] = p;
        }
        let basis_images = (0..self.target_rank)
            .map(|i| {
                ActElement::unpacked(
                    backward[ActElement { copy: i, elem: 0 }.packed(order)],
                    order,
                )
            })
            .collect();
        Some(ActHom {
            source_rank: self.target_rank,
            target_rank: self.source_rank,
            basis_images,
        })
    }

    /// Position of this hom in the canonical enumeration of its hom-set.
    pub fn hom_index(&self, m: &FiniteMonoid) -> usize {
        let base = self.target_rank * m.order();
        self.basis_images
            .iter()
            .fold(0, |acc, &img| acc * base + img.packed(m.order()))
    }
}

/// Number of homs F_n -> F_m, i.e. (m·|S|)^n, or `None` on overflow.
pub fn hom_count(m: &FiniteMonoid, n: usize, target_rank: usize) -> Option<usize> {
    target_rank
        .checked_mul(m.order())
        .and_then(|base| base.checked_pow(u32::try_from(n).ok()?))
}

/// The hom at `index` in the canonical order of Hom(F_n, F_m).
pub fn hom_from_index(m: &FiniteMonoid, n: usize, target_rank: usize, index: usize) -> ActHom {
    let order = m.order();
    let base = target_rank * order;
    let mut digits = vec![0; n];
    let mut rest = index;
    for d in digits.iter_mut().rev() {
        *d = rest % base;
        rest /= base;
    }
    ActHom {
        source_rank: n,
        target_rank,
        basis_images: digits
            .into_iter()
            .map(|p| ActElement::unpacked(p, order))
            .collect(),
    }
}

/// All homs F_n -> F_m in canonical (lexicographic-by-basis-images) order,
/// so `result[i].hom_index(m) == i`.
pub fn enumerate_homs(
    m: &FiniteMonoid,
    n: usize,
    target_rank: usize,
    budget: &Budget,
) -> Result<Vec<ActHom>> {
    let count = hom_count(m, n, target_rank).ok_or(Error::TooLarge {
        what: "hom-set",
        size: usize::MAX,
        limit: budget.max_homset,
    })?;
    budget.check_size("hom-set", count, budget.max_homset)?;
    Ok((0..count)
        .map(|i| hom_from_index(m, n, target_rank, i))
        .collect())
}

/// The canonical injections μ₁..μₙ: F_1 -> F_n and the codiagonal
/// ν₀: F_n -> F_1. They satisfy ν₀ ∘ μᵢ = identity for every i.
pub fn structural_morphisms(n: usize) -> Result<(Vec<ActHom>, ActHom)> {
    if n == 0 {
        return Err(Error::InvalidInput("rank 0 has no injections".into()));
    }
    let injections = (0..n)
        .map(|i| ActHom::injection(i, n))
        .collect::<Result<Vec<_>>>()?;
    Ok((injections, ActHom::codiagonal(n)))
}

/// All bijective homs F_n -> F_n, filtered from the full hom-set by the
/// definition of bijectivity (no structural shortcut).
pub fn enumerate_act_automorphisms(
    m: &FiniteMonoid,
    n: usize,
    budget: &Budget,
) -> Result<Vec<ActHom>> {
    Ok(enumerate_homs(m, n, n, budget)?
        .into_iter()
        .filter(|h| h.is_bijective(m))
        .collect())
}

/// A σ-semilinear bijection of F_n: a bijection s of the underlying set with
/// s(t·x) = σ(t)·s(x) for every scalar t and element x. Stored as a total
/// permutation of packed element indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SemilinearMap {
    pub sigma: MonoidAutomorphism,
    pub rank: usize,
    pub mapping: Vec<usize>,
}

impl SemilinearMap {
    /// Validates bijectivity and the semilinearity law.
    pub fn new(
        m: &FiniteMonoid,
        sigma: MonoidAutomorphism,
        rank: usize,
        mapping: Vec<usize>,
    ) -> Result<Self> {
        sigma.validate_against(m)?;
        let size = rank * m.order();
        if mapping.len() != size {
            return Err(Error::RankMismatch {
                expected: size,
                found: mapping.len(),
            });
        }
        let mut hit = vec![false; size];
        for &p in &mapping {
            if p >= size {
                return Err(Error::NotAPermutation {
                    order: size,
                    detail: format!("value {p} out of range"),
                });
            }
            if hit[p] {
                return Err(Error::NotAPermutation {
                    order: size,
                    detail: format!("value {p} repeated"),
                });
            }
            hit[p] = true;
        }
        let map = SemilinearMap {
            sigma,
            rank,
            mapping,
        };
        map.check_semilinearity(m)?;
        Ok(map)
    }

    fn check_semilinearity(&self, m: &FiniteMonoid) -> Result<()> {
        let order = m.order();
        for t in 0..order {
            for p in 0..self.mapping.len() {
                let x = ActElement::unpacked(p, order);
                let tx = ActElement {
                    copy: x.copy,
                    elem: m.mul(t, x.elem),
                };
                let lhs = self.mapping[tx.packed(order)];
                let sx = ActElement::unpacked(self.mapping[p], order);
                let rhs = ActElement {
                    copy: sx.copy,
                    elem: m.mul(self.sigma.apply(t), sx.elem),
                }
                .packed(order);
                if lhs != rhs {
                    return Err(Error::NotMultiplicative { a: t, b: p });
                }
            }
        }
        Ok(())
    }

    /// Builds the semilinear map determined by basis images: the map sends
    /// (i, t) to σ(t)·images[i]. Fails if the induced total map is not a
    /// bijection.
    pub fn from_basis_images(
        m: &FiniteMonoid,
        sigma: MonoidAutomorphism,
        rank: usize,
        images: &[ActElement],
    ) -> Result<Self> {
        if images.len() != rank {
            return Err(Error::RankMismatch {
                expected: rank,
                found: images.len(),
            });
        }
        let order = m.order();
        for &img in images {
            check_element(m, rank, img)?;
        }
        let mapping = (0..rank * order)
            .map(|p| {
                let x = ActElement::unpacked(p, order);
                let img = images[x.copy];
                ActElement {
                    copy: img.copy,
                    elem: m.mul(sigma.apply(x.elem), img.elem),
                }
                .packed(order)
            })
            .collect();
        SemilinearMap::new(m, sigma, rank, mapping)
    }

    /// The coordinatewise twist (i, t) -> (i, σ(t)), the basic σ-semilinear
    /// bijection fixing every copy.
    pub fn coordinatewise(m: &FiniteMonoid, sigma: MonoidAutomorphism, rank: usize) -> Self {
        let images: Vec<ActElement> = (0..rank).map(|i| ActElement { copy: i, elem: 0 }).collect();
        SemilinearMap::from_basis_images(m, sigma, rank, &images)
            .expect("coordinatewise twist by an automorphism is bijective")
    }

    pub fn identity(m: &FiniteMonoid, rank: usize) -> Self {
        SemilinearMap::coordinatewise(m, MonoidAutomorphism::identity(m.order()), rank)
    }

    pub fn is_identity(&self) -> bool {
        self.sigma.is_identity() && self.mapping.iter().enumerate().all(|(i, &p)| i == p)
    }

    pub fn apply_packed(&self, p: usize) -> usize {
        self.mapping[p]
    }

    pub fn apply(&self, m: &FiniteMonoid, x: ActElement) -> Result<ActElement> {
        check_element(m, self.rank, x)?;
        Ok(ActElement::unpacked(
            self.mapping[x.packed(m.order())],
            m.order(),
        ))
    }

    /// The basis image s((i, identity)).
    pub fn basis_image(&self, m: &FiniteMonoid, i: usize) -> ActElement {
        ActElement::unpacked(
            self.mapping[ActElement { copy: i, elem: 0 }.packed(m.order())],
            m.order(),
        )
    }

    /// Whether every basis image has a unit monoid coordinate.
    pub fn has_unit_basis_images(&self, m: &FiniteMonoid) -> bool {
        (0..self.rank).all(|i| m.inverse_of(self.basis_image(m, i).elem).is_some())
    }

    /// `self` after `other`; the composite is (σ∘τ)-semilinear when `self`
    /// is σ-semilinear and `other` is τ-semilinear.
    pub fn compose(&self, other: &SemilinearMap) -> SemilinearMap {
        SemilinearMap {
            sigma: self.sigma.compose(&other.sigma),
            rank: self.rank,
            mapping: other.mapping.iter().map(|&p| self.mapping[p]).collect(),
        }
    }

    pub fn inverse(&self) -> SemilinearMap {
        let mut mapping = vec![0; self.mapping.len()];
        for (p, &q) in self.mapping.iter().enumerate() {
            mapping[q] = p;
        }
        SemilinearMap {
            sigma: self.sigma.inverse(),
            rank: self.rank,
            mapping,
        }
    }

    /// Re-checks all invariants, for values that came in over the wire.
    pub fn validate_against(&self, m: &FiniteMonoid) -> Result<()> {
        SemilinearMap::new(m, self.sigma.clone(), self.rank, self.mapping.clone()).map(|_| ())
    }
}

/// All σ-semilinear bijections of F_n, searched over basis images (the
/// (n|S|)^n candidates) with a bijectivity check, in canonical order of the
/// basis-image tuple.
pub fn enumerate_semilinear_bijections(
    m: &FiniteMonoid,
    rank: usize,
    sigma: &MonoidAutomorphism,
    budget: &Budget,
) -> Result<Vec<SemilinearMap>> {
    let count = hom_count(m, rank, rank).ok_or(Error::TooLarge {
        what: "semilinear search space",
        size: usize::MAX,
        limit: budget.max_homset,
    })?;
    budget.check_size("semilinear search space", count, budget.max_homset)?;
    let order = m.order();
    let mut out = Vec::new();
    for idx in 0..count {
        let images = hom_from_index(m, rank, rank, idx).basis_images;
        debug_assert_eq!(images.len(), rank);
        let mapping: Vec<usize> = (0..rank * order)
            .map(|p| {
                let x = ActElement::unpacked(p, order);
                let img = images[x.copy];
                ActElement {
                    copy: img.copy,
                    elem: m.mul(sigma.apply(x.elem), img.elem),
                }
                .packed(order)
            })
            .collect();
        let mut hit = vec![false; mapping.len()];
        let bijective = mapping.iter().all(|&p| {
            if hit[p] {
                return false;
            }
            hit[p] = true;
            true
        });
        if bijective {
            out.push(SemilinearMap {
                sigma: sigma.clone(),
                rank,
                mapping,
            });
        }
    }
    Ok(out)
}
