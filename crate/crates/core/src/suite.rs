//! End-to-end verification runs: enumerate, certify, quotient, compare.
//!
//! A suite run over one monoid and one truncation produces a report whose
//! claims are all backed by serialized objects (functors, certificates,
//! inner witnesses), so a consumer can re-verify every claim without
//! trusting the run that produced it.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::category::{
    check_functoriality, enumerate_category_automorphisms, is_inner, outer_group_of_category,
    semi_inner_certificate, verify_certificate, SemiInnerCertificate, TruncatedFunctor,
    TruncatedSkeleton,
};
use crate::error::{Error, Result};
use crate::monoid::FiniteMonoid;
use crate::unary::monoid_perfectness;

/// One enumerated automorphism with its certification evidence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertifiedAutomorphism {
    pub functor: TruncatedFunctor,
    /// A verified semi-inner decomposition, or `None` when the exhaustive
    /// search found none (which would contradict the expected structure).
    pub certificate: Option<SemiInnerCertificate>,
    pub inner: bool,
}

/// The outcome of a full verification run at one truncation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub monoid: FiniteMonoid,
    #[serde(rename = "N")]
    pub truncation: usize,
    /// Every enumerated automorphism fixes every object.
    pub object_stable: bool,
    pub automorphism_count: usize,
    pub all_semi_inner: bool,
    pub all_inner: bool,
    pub outer_order: usize,
    /// The category outer group is isomorphic to the monoid outer group via
    /// the verified twisting-automorphism witness.
    pub outer_matches_monoid: bool,
    /// The monoid has no nontrivial automorphism.
    pub perfect: bool,
    pub entries: Vec<CertifiedAutomorphism>,
    /// False when a deadline cut the run short; the filled prefix of the
    /// report is still valid.
    pub complete: bool,
    pub elapsed_ms: u64,
}

/// Runs the whole verification pipeline: skeleton construction, automorphism
/// enumeration (object permutations included), semi-inner certification of
/// every automorphism with independent re-verification, the inner test, the
/// outer quotient with its isomorphism witness, and the perfectness verdict.
/// A deadline expiry yields the partial report with `complete = false`
/// instead of an error.
pub fn run_theorem_suite(
    m: &FiniteMonoid,
    truncation: usize,
    budget: &Budget,
) -> Result<TheoremReport> {
    let start = Instant::now();
    let mut report = TheoremReport {
        monoid: m.clone(),
        truncation,
        object_stable: false,
        automorphism_count: 0,
        all_semi_inner: false,
        all_inner: false,
        outer_order: 0,
        outer_matches_monoid: false,
        perfect: monoid_perfectness(m, budget)?.perfect,
        entries: Vec::new(),
        complete: false,
        elapsed_ms: 0,
    };
    let outcome = run_stages(m, truncation, budget, &mut report);
    report.elapsed_ms = start.elapsed().as_millis() as u64;
    match outcome {
        Ok(()) => {
            report.complete = true;
            Ok(report)
        }
        Err(Error::Timeout { .. }) => Ok(report),
        Err(other) => Err(other),
    }
}

fn run_stages(
    m: &FiniteMonoid,
    truncation: usize,
    budget: &Budget,
    report: &mut TheoremReport,
) -> Result<()> {
    let skel = TruncatedSkeleton::new(m.clone(), truncation, budget)?;
    let automorphisms = enumerate_category_automorphisms(&skel, budget, false)?;
    report.automorphism_count = automorphisms.len();
    report.object_stable = automorphisms.iter().all(TruncatedFunctor::is_object_stable);

    let mut all_semi_inner = !automorphisms.is_empty();
    let mut all_inner = !automorphisms.is_empty();
    for phi in &automorphisms {
        budget.check_deadline()?;
        let certificate = semi_inner_certificate(&skel, phi, budget)?;
        match &certificate {
            Some(cert) => verify_certificate(&skel, phi, cert)?,
            None => all_semi_inner = false,
        }
        let inner = is_inner(&skel, phi, budget)?.is_some();
        all_inner &= inner;
        report.entries.push(CertifiedAutomorphism {
            functor: phi.clone(),
            certificate,
            inner,
        });
    }
    report.all_semi_inner = all_semi_inner;
    report.all_inner = all_inner;

    let outer = outer_group_of_category(&skel, budget)?;
    report.outer_order = outer.order;
    report.outer_matches_monoid = outer.matches_monoid_outer;
    Ok(())
}

/// Re-derives the pass/fail content of a (possibly deserialized) report from
/// its own evidence: every functor is re-checked against the functor laws,
/// every certificate re-verified by the independent evaluator, and the
/// aggregate flags recomputed. Returns whether the report's claims are
/// reproduced exactly.
pub fn verify_report(report: &TheoremReport, budget: &Budget) -> Result<bool> {
    let skel = TruncatedSkeleton::new(report.monoid.clone(), report.truncation, budget)?;
    if report.entries.len() != report.automorphism_count {
        return Ok(false);
    }
    let mut certified = 0usize;
    for entry in &report.entries {
        if !check_functoriality(&skel, &entry.functor).is_empty() {
            return Ok(false);
        }
        if !entry.functor.is_object_stable() && report.object_stable {
            return Ok(false);
        }
        if let Some(cert) = &entry.certificate {
            if verify_certificate(&skel, &entry.functor, cert).is_err() {
                return Ok(false);
            }
            certified += 1;
        }
    }
    let all_semi_inner = !report.entries.is_empty() && certified == report.entries.len();
    Ok(all_semi_inner == report.all_semi_inner)
}
