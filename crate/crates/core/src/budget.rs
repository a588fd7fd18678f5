//! Resource limits for searches that can blow up combinatorially.
//!
//! Every enumeration entry point takes a [`Budget`] and fails fast with
//! [`Error::TooLarge`](crate::Error::TooLarge) or
//! [`Error::Timeout`](crate::Error::Timeout) instead of grinding
//! unboundedly. The defaults are sized for desk-scale inputs: monoids of
//! order up to eight or so and skeleton truncations of rank two or three.

use std::time::Instant;

use crate::error::{Error, Result};

/// Limits applied to enumeration and search routines.
#[derive(Debug, Clone)]
pub struct Budget {
    /// Largest hom-set a category-level search may materialize.
    pub max_homset: usize,
    /// Largest per-triple composition table |hom(n,m)|·|hom(m,k)| a skeleton
    /// may precompute.
    pub max_composites: usize,
    /// Largest element count for truncated word monoids and free algebras.
    pub max_elements: usize,
    /// Largest monoid order for automorphism and isomorphism searches.
    pub max_monoid_order: usize,
    /// Wall-clock deadline, if any.
    pub deadline: Option<Instant>,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_homset: 1 << 16,
            max_composites: 1 << 24,
            max_elements: 1 << 16,
            max_monoid_order: 8,
            deadline: None,
        }
    }
}

impl Budget {
    /// Default limits with a wall-clock deadline `secs` from now.
    pub fn with_timeout_secs(secs: u64) -> Self {
        Budget {
            deadline: Some(Instant::now() + std::time::Duration::from_secs(secs)),
            ..Budget::default()
        }
    }

    /// Errors if the deadline has passed. Cheap enough to call in inner loops.
    pub fn check_deadline(&self) -> Result<()> {
        if let Some(deadline) = self.deadline {
            let now = Instant::now();
            if now >= deadline {
                let over = now.duration_since(deadline).as_millis();
                return Err(Error::Timeout { elapsed_ms: over });
            }
        }
        Ok(())
    }

    /// Errors unless `size <= limit`, tagging the failure with `what`.
    pub fn check_size(&self, what: &'static str, size: usize, limit: usize) -> Result<()> {
        if size > limit {
            return Err(Error::TooLarge { what, size, limit });
        }
        Ok(())
    }
}
