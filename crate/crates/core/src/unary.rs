//! Free unary algebras as acts over truncated free word monoids.
//!
//! A signature with k unary operation symbols makes every term a word over
//! those symbols applied to a variable, so the free algebra on n variables
//! is the rank-n free act over the free monoid on k letters. Truncating
//! word length keeps everything finite at the cost of partiality: applying
//! an operation to a maximal-depth term is undefined rather than wrapped.
//!
//! The module provides the letterwise permutation twists (the semilinear
//! bijections of these algebras), an exhaustive check of their defining
//! equation, a brute-force rigidity search showing that the only
//! product-preserving bijections of the truncated word monoid are the k!
//! letter permutations, and the perfectness criterion that falls out: one
//! operation symbol means no nontrivial twists.

use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::monoid::{all_permutations, FiniteMonoid};
use crate::truncated::TruncatedFreeMonoid;

/// A unary signature: k operation symbols, with terms truncated at word
/// length L.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnarySignature {
    pub k: usize,
    #[serde(rename = "L")]
    pub l: usize,
}

impl UnarySignature {
    pub fn new(k: usize, l: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidInput(
                "a unary signature needs at least one operation symbol".into(),
            ));
        }
        if l == 0 {
            return Err(Error::InvalidInput(
                "word-length truncation must be at least 1".into(),
            ));
        }
        Ok(UnarySignature { k, l })
    }

    /// The default truncation for a symbol count: deep enough to exercise
    /// non-commutativity, small enough for brute-force searches.
    pub fn default_for(k: usize) -> Result<Self> {
        UnarySignature::new(k, if k <= 2 { 3 } else { 2 })
    }

    /// The truncated free monoid of operation words.
    pub fn word_monoid(&self, budget: &Budget) -> Result<TruncatedFreeMonoid> {
        TruncatedFreeMonoid::new(self.k, self.l, budget)
    }
}

/// A term of a free unary algebra: the word of operation symbols applied
/// (outermost first) to a variable. Variables are indexed from 0.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct UnaryElement {
    pub var: usize,
    pub word: Vec<u8>,
}

/// The free unary algebra on `rank` variables, truncated at the signature's
/// word length.
#[derive(Debug, Clone)]
pub struct FreeUnaryAlgebra {
    sig: UnarySignature,
    words: TruncatedFreeMonoid,
    rank: usize,
}

impl FreeUnaryAlgebra {
    pub fn new(sig: UnarySignature, rank: usize, budget: &Budget) -> Result<Self> {
        if rank == 0 {
            return Err(Error::InvalidInput("rank must be at least 1".into()));
        }
        let words = sig.word_monoid(budget)?;
        budget.check_size(
            "free unary algebra",
            rank.checked_mul(words.len()).ok_or(Error::TooLarge {
                what: "free unary algebra",
                size: usize::MAX,
                limit: budget.max_elements,
            })?,
            budget.max_elements,
        )?;
        Ok(FreeUnaryAlgebra { sig, words, rank })
    }

    pub fn signature(&self) -> UnarySignature {
        self.sig
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn words(&self) -> &TruncatedFreeMonoid {
        &self.words
    }

    pub fn element_count(&self) -> usize {
        self.rank * self.words.len()
    }

    pub fn elements(&self) -> impl Iterator<Item = UnaryElement> + '_ {
        (0..self.rank).flat_map(move |var| {
            (0..self.words.len()).map(move |w| UnaryElement {
                var,
                word: self.words.word(w).to_vec(),
            })
        })
    }

    pub fn variable(&self, i: usize) -> Result<UnaryElement> {
        if i >= self.rank {
            return Err(Error::CopyOutOfRange {
                copy: i,
                rank: self.rank,
            });
        }
        Ok(UnaryElement {
            var: i,
            word: Vec::new(),
        })
    }

    /// Applies operation symbol `sym`, prepending it to the term's word.
    /// Undefined (`None`) when the result would exceed the truncation.
    pub fn apply_symbol(&self, sym: usize, x: &UnaryElement) -> Option<UnaryElement> {
        assert!(sym < self.sig.k, "operation symbol out of range");
        if x.word.len() + 1 > self.sig.l {
            return None;
        }
        let mut word = Vec::with_capacity(x.word.len() + 1);
        word.push(sym as u8);
        word.extend_from_slice(&x.word);
        Some(UnaryElement { var: x.var, word })
    }

    /// Applies a whole operation word (outermost first), i.e. the partial
    /// act of the word monoid on this algebra.
    pub fn apply_word(&self, w: &[u8], x: &UnaryElement) -> Option<UnaryElement> {
        if w.len() + x.word.len() > self.sig.l {
            return None;
        }
        let mut word = Vec::with_capacity(w.len() + x.word.len());
        word.extend_from_slice(w);
        word.extend_from_slice(&x.word);
        Some(UnaryElement { var: x.var, word })
    }
}

/// A homomorphism between free unary algebras of the same signature,
/// determined by the images of the source variables. Because of the
/// truncation the induced map is partial: a term maps only if its word
/// concatenated with the generator image's word still fits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnaryHom {
    pub source_rank: usize,
    pub target_rank: usize,
    pub generator_images: Vec<UnaryElement>,
}

impl UnaryHom {
    pub fn new(
        sig: UnarySignature,
        source_rank: usize,
        target_rank: usize,
        generator_images: Vec<UnaryElement>,
    ) -> Result<Self> {
        if generator_images.len() != source_rank {
            return Err(Error::RankMismatch {
                expected: source_rank,
                found: generator_images.len(),
            });
        }
        for img in &generator_images {
            if img.var >= target_rank {
                return Err(Error::CopyOutOfRange {
                    copy: img.var,
                    rank: target_rank,
                });
            }
            if img.word.len() > sig.l {
                return Err(Error::InvalidInput(format!(
                    "generator image word of length {} exceeds truncation {}",
                    img.word.len(),
                    sig.l
                )));
            }
        }
        Ok(UnaryHom {
            source_rank,
            target_rank,
            generator_images,
        })
    }

    /// Whether every source element maps within the truncation.
    pub fn is_total(&self) -> bool {
        self.generator_images.iter().all(|img| img.word.is_empty())
    }

    pub fn apply(&self, sig: UnarySignature, x: &UnaryElement) -> Option<UnaryElement> {
        let img = &self.generator_images[x.var];
        if x.word.len() + img.word.len() > sig.l {
            return None;
        }
        let mut word = Vec::with_capacity(x.word.len() + img.word.len());
        word.extend_from_slice(&x.word);
        word.extend_from_slice(&img.word);
        Some(UnaryElement { var: img.var, word })
    }
}

/// All homs between the free algebras of the given ranks, one per choice of
/// generator images, ordered by target element index tuples.
pub fn enumerate_unary_homs(
    sig: UnarySignature,
    source_rank: usize,
    target_rank: usize,
    budget: &Budget,
) -> Result<Vec<UnaryHom>> {
    let target = FreeUnaryAlgebra::new(sig, target_rank, budget)?;
    let per_generator = target.element_count();
    let total = per_generator
        .checked_pow(u32::try_from(source_rank).map_err(|_| Error::TooLarge {
            what: "hom-set",
            size: usize::MAX,
            limit: budget.max_homset,
        })?)
        .ok_or(Error::TooLarge {
            what: "hom-set",
            size: usize::MAX,
            limit: budget.max_homset,
        })?;
    budget.check_size("hom-set", total, budget.max_homset)?;
    let pool: Vec<UnaryElement> = target.elements().collect();
    let mut homs = Vec::with_capacity(total);
    for index in 0..total {
        let mut images = Vec::with_capacity(source_rank);
        let mut rest = index;
        for _ in 0..source_rank {
            images.push(pool[rest % per_generator].clone());
            rest /= per_generator;
        }
        images.reverse();
        homs.push(UnaryHom::new(sig, source_rank, target_rank, images)?);
    }
    Ok(homs)
}

/// A permutation of the operation symbols, applied letterwise to words. The
/// same letter map acts on the free algebra of every rank (fixing variables),
/// which is what makes it a family of bijections rather than a single map.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LetterTwist {
    pub pi: Vec<usize>,
}

impl LetterTwist {
    pub fn new(pi: Vec<usize>) -> Result<Self> {
        let k = pi.len();
        let mut hit = vec![false; k];
        for &image in &pi {
            if image >= k || hit[image] {
                return Err(Error::NotAPermutation {
                    order: k,
                    detail: format!("letter map {pi:?} is not a permutation"),
                });
            }
            hit[image] = true;
        }
        Ok(LetterTwist { pi })
    }

    pub fn identity(k: usize) -> Self {
        LetterTwist {
            pi: (0..k).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.pi.iter().enumerate().all(|(i, &p)| i == p)
    }

    pub fn apply_word(&self, w: &[u8]) -> Vec<u8> {
        w.iter().map(|&a| self.pi[a as usize] as u8).collect()
    }

    pub fn apply(&self, x: &UnaryElement) -> UnaryElement {
        UnaryElement {
            var: x.var,
            word: self.apply_word(&x.word),
        }
    }

    /// `self` after `other`.
    pub fn compose(&self, other: &LetterTwist) -> LetterTwist {
        LetterTwist {
            pi: other.pi.iter().map(|&a| self.pi[a]).collect(),
        }
    }

    pub fn inverse(&self) -> LetterTwist {
        let mut pi = vec![0; self.pi.len()];
        for (a, &b) in self.pi.iter().enumerate() {
            pi[b] = a;
        }
        LetterTwist { pi }
    }
}

/// Outcome of exhaustively checking the twist equation
/// s(w·a) = π(w)·s(a) over every element and every in-truncation word.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwistReport {
    pub pi: Vec<usize>,
    pub checked_elements: usize,
    pub equation_holds: bool,
}

/// Builds the letterwise twist for `pi` and exhaustively checks its defining
/// equation on the free algebras of ranks 1..=max_rank: for every element a
/// and every word w with w·a still in truncation, s(w·a) must equal
/// π(w)·s(a). The report records how many instances were checked and whether
/// all of them held.
pub fn permutation_twist(
    sig: UnarySignature,
    pi: &[usize],
    max_rank: usize,
    budget: &Budget,
) -> Result<(LetterTwist, TwistReport)> {
    if pi.len() != sig.k {
        return Err(Error::RankMismatch {
            expected: sig.k,
            found: pi.len(),
        });
    }
    let twist = LetterTwist::new(pi.to_vec())?;
    let mut checked = 0usize;
    let mut holds = true;
    for rank in 1..=max_rank {
        let algebra = FreeUnaryAlgebra::new(sig, rank, budget)?;
        let words = algebra.words();
        for a in algebra.elements() {
            for w_idx in 0..words.len() {
                let w = words.word(w_idx);
                let Some(wa) = algebra.apply_word(w, &a) else {
                    continue;
                };
                checked += 1;
                let lhs = twist.apply(&wa);
                let rhs = algebra
                    .apply_word(&twist.apply_word(w), &twist.apply(&a))
                    .expect("letterwise images preserve length");
                if lhs != rhs {
                    holds = false;
                }
            }
        }
    }
    let report = TwistReport {
        pi: pi.to_vec(),
        checked_elements: checked,
        equation_holds: holds,
    };
    Ok((twist, report))
}

/// Checks that conjugating homs by the twist family agrees with the
/// letterwise action: for every hom f: F_n -> F_m, the hom determined by the
/// generator images s⁻¹(f(s(xⱼ))) must agree with the pointwise composite
/// s⁻¹ ∘ f ∘ s on every element, with the same domain of definition. Returns
/// the number of (hom, element) comparisons made.
pub fn hom_conjugation_agrees(
    sig: UnarySignature,
    twist: &LetterTwist,
    source_rank: usize,
    target_rank: usize,
    budget: &Budget,
) -> Result<usize> {
    let source = FreeUnaryAlgebra::new(sig, source_rank, budget)?;
    let inverse = twist.inverse();
    let mut checked = 0usize;
    for f in enumerate_unary_homs(sig, source_rank, target_rank, budget)? {
        let conjugated_images: Vec<UnaryElement> = (0..source_rank)
            .map(|j| {
                let var = source.variable(j)?;
                let image = f
                    .apply(sig, &twist.apply(&var))
                    .expect("variables map within truncation");
                Ok(inverse.apply(&image))
            })
            .collect::<Result<_>>()?;
        let conjugated = UnaryHom::new(sig, source_rank, target_rank, conjugated_images)?;
        for x in source.elements() {
            checked += 1;
            let via_hom = conjugated.apply(sig, &x);
            let pointwise = f.apply(sig, &twist.apply(&x)).map(|y| inverse.apply(&y));
            if via_hom != pointwise {
                return Err(Error::NotMultiplicative {
                    a: x.var,
                    b: x.word.len(),
                });
            }
        }
    }
    Ok(checked)
}

/// Result of the brute-force rigidity search over the truncated word monoid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RigidityReport {
    pub signature: UnarySignature,
    /// Number of bijections fixing the empty word and preserving every
    /// defined concatenation.
    pub bijection_count: usize,
    /// Whether each such bijection is induced letterwise by a permutation of
    /// the operation symbols.
    pub all_letter_induced: bool,
    /// The inducing letter permutations, in lexicographic order.
    pub letter_permutations: Vec<Vec<usize>>,
}

const RIGIDITY_MAX_SYMBOLS: usize = 3;
const RIGIDITY_MAX_LEN: usize = 3;

/// Enumerates every bijection of the truncated word monoid that fixes the
/// empty word and preserves all defined products (undefined products impose
/// no constraint), and checks that each one acts letterwise by a permutation
/// of the symbols. The count is expected to be k!.
pub fn verify_letter_permutation_rigidity(
    sig: UnarySignature,
    budget: &Budget,
) -> Result<RigidityReport> {
    if sig.k > RIGIDITY_MAX_SYMBOLS {
        return Err(Error::TooLarge {
            what: "rigidity search symbol count",
            size: sig.k,
            limit: RIGIDITY_MAX_SYMBOLS,
        });
    }
    if sig.l > RIGIDITY_MAX_LEN {
        return Err(Error::TooLarge {
            what: "rigidity search truncation",
            size: sig.l,
            limit: RIGIDITY_MAX_LEN,
        });
    }
    let words = sig.word_monoid(budget)?;
    let count = words.len();

    // Product triples (i, j, p) with i·j = p, grouped by the last index to
    // be assigned so each is checked as soon as it is fully determined.
    let mut triples_by_last: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); count];
    for i in 0..count {
        for j in 0..count {
            if let Some(p) = words.product(i, j) {
                triples_by_last[i.max(j).max(p)].push((i, j, p));
            }
        }
    }

    let mut image = vec![usize::MAX; count];
    let mut used = vec![false; count];
    image[0] = 0;
    used[0] = true;
    let mut solutions: Vec<Vec<usize>> = Vec::new();
    search_rigid_bijections(
        &words,
        &triples_by_last,
        1,
        &mut image,
        &mut used,
        &mut solutions,
    );

    let letter_maps: Vec<(Vec<usize>, Vec<usize>)> = all_permutations(sig.k)
        .into_iter()
        .map(|pi| {
            let twist = LetterTwist { pi: pi.clone() };
            let induced: Vec<usize> = (0..count)
                .map(|w| {
                    words
                        .index_of(&twist.apply_word(words.word(w)))
                        .expect("letterwise image stays in truncation")
                })
                .collect();
            (pi, induced)
        })
        .collect();
    let mut letter_permutations = Vec::new();
    let mut all_letter_induced = true;
    for solution in &solutions {
        match letter_maps.iter().find(|(_, induced)| induced == solution) {
            Some((pi, _)) => letter_permutations.push(pi.clone()),
            None => all_letter_induced = false,
        }
    }
    letter_permutations.sort();

    Ok(RigidityReport {
        signature: sig,
        bijection_count: solutions.len(),
        all_letter_induced,
        letter_permutations,
    })
}

fn search_rigid_bijections(
    words: &TruncatedFreeMonoid,
    triples_by_last: &[Vec<(usize, usize, usize)>],
    next: usize,
    image: &mut Vec<usize>,
    used: &mut Vec<bool>,
    solutions: &mut Vec<Vec<usize>>,
) {
    if next == image.len() {
        solutions.push(image.clone());
        return;
    }
    'candidates: for candidate in 0..image.len() {
        if used[candidate] {
            continue;
        }
        image[next] = candidate;
        for &(i, j, p) in &triples_by_last[next] {
            if words.product(image[i], image[j]) != Some(image[p]) {
                continue 'candidates;
            }
        }
        used[candidate] = true;
        search_rigid_bijections(words, triples_by_last, next + 1, image, used, solutions);
        used[candidate] = false;
    }
    image[next] = usize::MAX;
}

/// Verdict on whether a variety has only trivial self-equivalences fixing
/// objects, together with the witnesses when it does not.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PerfectnessReport {
    pub perfect: bool,
    pub explanation: String,
    /// Nontrivial automorphism witnesses: element images for a monoid,
    /// letter permutations for a signature.
    pub witnesses: Vec<Vec<usize>>,
}

/// The acts over S form a perfect variety exactly when S has no nontrivial
/// automorphism at all (inner ones included).
pub fn monoid_perfectness(m: &FiniteMonoid, budget: &Budget) -> Result<PerfectnessReport> {
    let automorphisms = m.automorphisms(budget)?;
    let witnesses: Vec<Vec<usize>> = automorphisms
        .iter()
        .filter(|a| !a.is_identity())
        .map(|a| a.image.clone())
        .collect();
    let perfect = witnesses.is_empty();
    let explanation = if perfect {
        "the monoid has no nontrivial automorphism, so every self-equivalence is inner".into()
    } else {
        format!(
            "the monoid has {} nontrivial automorphism(s); each twists the category non-innerly",
            witnesses.len()
        )
    };
    Ok(PerfectnessReport {
        perfect,
        explanation,
        witnesses,
    })
}

/// A variety of unary algebras is perfect exactly when it is mono-unary:
/// with k symbols the letter permutations give k! twists, so only k = 1
/// leaves nothing but the identity. For k within brute-force range the
/// verdict is cross-checked against the rigidity search at the default
/// truncation.
pub fn signature_perfectness(k: usize, budget: &Budget) -> Result<PerfectnessReport> {
    if k == 0 {
        return Err(Error::InvalidInput(
            "a unary signature needs at least one operation symbol".into(),
        ));
    }
    let witnesses: Vec<Vec<usize>> = all_permutations(k)
        .into_iter()
        .filter(|pi| pi.iter().enumerate().any(|(i, &p)| i != p))
        .collect();
    let perfect = witnesses.is_empty();
    let mut explanation = if perfect {
        "one operation symbol admits only the identity letter permutation".to_string()
    } else {
        format!(
            "{} operation symbols admit {} nontrivial letter permutations, each a non-inner twist",
            k,
            witnesses.len()
        )
    };
    if k <= RIGIDITY_MAX_SYMBOLS {
        let sig = UnarySignature::default_for(k)?;
        let rigidity = verify_letter_permutation_rigidity(sig, budget)?;
        let factorial: usize = (1..=k).product();
        if rigidity.bijection_count != factorial || !rigidity.all_letter_induced {
            return Err(Error::InvalidInput(format!(
                "rigidity search at {sig:?} found {} bijections (letter-induced: {}), expected {}",
                rigidity.bijection_count, rigidity.all_letter_induced, factorial
            )));
        }
        explanation.push_str("; confirmed by exhaustive rigidity search");
    }
    Ok(PerfectnessReport {
        perfect,
        explanation,
        witnesses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn budget() -> Budget {
        Budget::default()
    }

    #[test]
    fn signature_validation_and_json() {
        assert!(UnarySignature::new(0, 2).is_err());
        assert!(UnarySignature::new(2, 0).is_err());
        let sig = UnarySignature::new(2, 3).unwrap();
        let json = serde_json::to_value(sig).unwrap();
        assert_eq!(json, serde_json::json!({"k": 2, "L": 3}));
        let back: UnarySignature = serde_json::from_value(json).unwrap();
        assert_eq!(back, sig);
        assert_eq!(UnarySignature::default_for(2).unwrap().l, 3);
        assert_eq!(UnarySignature::default_for(3).unwrap().l, 2);
    }

    #[test]
    fn free_algebra_element_counts() {
        let cases = [(1, 2, 1, 3), (2, 2, 1, 7), (2, 1, 2, 6)];
        for (k, l, rank, expected) in cases {
            let alg =
                FreeUnaryAlgebra::new(UnarySignature::new(k, l).unwrap(), rank, &budget()).unwrap();
            assert_eq!(alg.element_count(), expected);
            assert_eq!(alg.elements().count(), expected);
        }
    }

    #[test]
    fn operations_are_partial_at_the_boundary() {
        let sig = UnarySignature::new(2, 2).unwrap();
        let alg = FreeUnaryAlgebra::new(sig, 1, &budget()).unwrap();
        let x = alg.variable(0).unwrap();
        let fx = alg.apply_symbol(0, &x).unwrap();
        assert_eq!(fx.word, vec![0]);
        let gfx = alg.apply_symbol(1, &fx).unwrap();
        assert_eq!(gfx.word, vec![1, 0]);
        assert_eq!(alg.apply_symbol(0, &gfx), None);
        assert_eq!(alg.apply_word(&[0, 1], &x).unwrap().word, vec![0, 1]);
        assert_eq!(alg.apply_word(&[0, 1], &fx), None);
    }

    #[test]
    fn homs_are_generator_determined_and_partial() {
        let sig = UnarySignature::new(2, 2).unwrap();
        let h = UnaryHom::new(
            sig,
            2,
            1,
            vec![
                UnaryElement {
                    var: 0,
                    word: vec![1],
                },
                UnaryElement {
                    var: 0,
                    word: vec![],
                },
            ],
        )
        .unwrap();
        assert!(!h.is_total());
        // x₀ ↦ f₁·y, so a depth-1 term still fits but a depth-2 term does not.
        let t = UnaryElement {
            var: 0,
            word: vec![0],
        };
        assert_eq!(
            h.apply(sig, &t),
            Some(UnaryElement {
                var: 0,
                word: vec![0, 1]
            })
        );
        let deep = UnaryElement {
            var: 0,
            word: vec![0, 0],
        };
        assert_eq!(h.apply(sig, &deep), None);
        // The second generator maps without depth, so everything over x₁ fits.
        let t1 = UnaryElement {
            var: 1,
            word: vec![1, 1],
        };
        assert_eq!(
            h.apply(sig, &t1),
            Some(UnaryElement {
                var: 0,
                word: vec![1, 1]
            })
        );
        let homs = enumerate_unary_homs(sig, 1, 1, &budget()).unwrap();
        assert_eq!(homs.len(), 7);
    }

    #[test]
    fn twist_equation_holds_exhaustively() {
        // Identity permutation: the identity family.
        let sig = UnarySignature::new(2, 3).unwrap();
        let (twist, report) = permutation_twist(sig, &[0, 1], 2, &budget()).unwrap();
        assert!(twist.is_identity());
        assert!(report.equation_holds);
        let x = UnaryElement {
            var: 0,
            word: vec![0, 1, 0],
        };
        assert_eq!(twist.apply(&x), x);
        // The swap maps f₁f₂·x to f₂f₁·x.
        let (swap, report) = permutation_twist(sig, &[1, 0], 2, &budget()).unwrap();
        assert!(report.equation_holds);
        assert!(report.checked_elements > 0);
        assert_eq!(
            swap.apply(&UnaryElement {
                var: 0,
                word: vec![0, 1]
            }),
            UnaryElement {
                var: 0,
                word: vec![1, 0]
            }
        );
        // A 3-cycle at k = 3, L = 2: all 13 words map letterwise.
        let sig3 = UnarySignature::new(3, 2).unwrap();
        let (cycle, report) = permutation_twist(sig3, &[1, 2, 0], 1, &budget()).unwrap();
        assert!(report.equation_holds);
        let words = sig3.word_monoid(&budget()).unwrap();
        assert_eq!(words.len(), 13);
        for idx in 0..words.len() {
            let w = words.word(idx);
            let expected: Vec<u8> = w.iter().map(|&a| [1u8, 2, 0][a as usize]).collect();
            assert_eq!(cycle.apply_word(w), expected);
        }
    }

    #[test]
    fn twists_form_a_faithful_group_action() {
        let perms = all_permutations(3);
        for pi in &perms {
            for rho in &perms {
                let a = LetterTwist::new(pi.clone()).unwrap();
                let b = LetterTwist::new(rho.clone()).unwrap();
                let composed = a.compose(&b);
                let x = UnaryElement {
                    var: 0,
                    word: vec![0, 1, 2],
                };
                assert_eq!(composed.apply(&x), a.apply(&b.apply(&x)));
                assert!(a.compose(&a.inverse()).is_identity());
            }
        }
        // Distinct permutations act differently on the letters themselves.
        let mut images = std::collections::BTreeSet::new();
        for pi in &perms {
            let twist = LetterTwist::new(pi.clone()).unwrap();
            images.insert(twist.apply_word(&[0, 1, 2]));
        }
        assert_eq!(images.len(), perms.len());
    }

    #[test]
    fn hom_conjugation_matches_pointwise_composition() {
        let sig = UnarySignature::new(2, 2).unwrap();
        let swap = LetterTwist::new(vec![1, 0]).unwrap();
        for (n, m) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
            let checked = hom_conjugation_agrees(sig, &swap, n, m, &budget()).unwrap();
            assert!(checked > 0);
        }
    }

    #[test]
    fn rigidity_counts_are_factorials() {
        let cases = [(1, 3, 1), (2, 2, 2), (2, 3, 2), (3, 2, 6)];
        for (k, l, expected) in cases {
            let report =
                verify_letter_permutation_rigidity(UnarySignature::new(k, l).unwrap(), &budget())
                    .unwrap();
            assert_eq!(report.bijection_count, expected, "k={k} L={l}");
            assert!(report.all_letter_induced);
            assert_eq!(report.letter_permutations, all_permutations(k));
        }
    }

    #[test]
    fn rigidity_search_is_bounded() {
        assert!(matches!(
            verify_letter_permutation_rigidity(UnarySignature::new(4, 2).unwrap(), &budget()),
            Err(Error::TooLarge { .. })
        ));
        assert!(matches!(
            verify_letter_permutation_rigidity(UnarySignature::new(2, 4).unwrap(), &budget()),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn perfectness_verdicts() {
        let mono = signature_perfectness(1, &budget()).unwrap();
        assert!(mono.perfect);
        assert!(mono.witnesses.is_empty());
        let swap = signature_perfectness(2, &budget()).unwrap();
        assert!(!swap.perfect);
        assert_eq!(swap.witnesses, vec![vec![1, 0]]);
        let trivial = monoid_perfectness(&FiniteMonoid::cyclic(1).unwrap(), &budget()).unwrap();
        assert!(trivial.perfect);
        let c3 = monoid_perfectness(&FiniteMonoid::cyclic(3).unwrap(), &budget()).unwrap();
        assert!(!c3.perfect);
        assert_eq!(c3.witnesses, vec![vec![0, 2, 1]]);
        let s3 = monoid_perfectness(&FiniteMonoid::symmetric(3).unwrap(), &budget()).unwrap();
        assert!(!s3.perfect);
        assert_eq!(s3.witnesses.len(), 5);
    }

    #[test]
    fn twist_report_json_shape() {
        let sig = UnarySignature::new(2, 2).unwrap();
        let (_, report) = permutation_twist(sig, &[1, 0], 1, &budget()).unwrap();
        let json = serde_json::to_value(&report).unwrap();
        assert_eq!(json["pi"], serde_json::json!([1, 0]));
        assert!(json["checked_elements"].as_u64().unwrap() > 0);
        assert_eq!(json["equation_holds"], serde_json::json!(true));
    }
}
