//! Figures of merit: classical distribution fidelity, the pairwise
//! oracle-distinguishability matrix, and actual-vs-ideal comparison.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::grover::RunReport;
use crate::measurement::OutcomeDistribution;
use crate::qubit::{grover_reference, MarkedItem};

/// Classical fidelity of two distributions over the same outcome set:
/// `F(p, q) = sum_x sqrt(p(x) q(x))`.
///
/// Equals 1 precisely when the distributions are identical and 0 precisely
/// when their supports are disjoint. Note the direction: for the purpose of
/// telling oracles apart, small pairwise fidelity is the good case.
pub fn distribution_fidelity<L: Ord + Clone>(
    p: &OutcomeDistribution<L>,
    q: &OutcomeDistribution<L>,
) -> Result<f64> {
    if !p.same_outcome_set(q) {
        return Err(Error::InvalidArgument("distributions have different outcome sets".into()));
    }
    for (label, dist) in [("first", p), ("second", q)] {
        let sum: f64 = dist.iter().map(|(_, x)| x).sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "{label} distribution sums to {sum}, not 1"
            )));
        }
        if dist.iter().any(|(_, x)| x < 0.0) {
            return Err(Error::InvalidArgument(format!(
                "{label} distribution has a negative entry"
            )));
        }
    }
    let mut f = 0.0;
    for (label, pp) in p.iter() {
        f += (pp * q.probability(label)).sqrt();
    }
    Ok(f)
}

/// Pairwise fidelities across the four oracle-conditioned distributions,
/// plus each oracle's fidelity to its ideal distribution.
#[derive(Debug, Clone)]
pub struct FidelityReport {
    /// Marked items, in the order of the report rows/columns.
    pub labels: Vec<String>,
    /// Symmetric matrix of pairwise fidelities; diagonal is 1.
    pub pairwise: [[f64; 4]; 4],
    /// Convenience column: distinguishability = 1 - fidelity.
    pub pairwise_distinguishability: [[f64; 4]; 4],
    /// Fidelity of each conditional distribution to the ideal one.
    pub to_ideal: [f64; 4],
    /// Smallest off-diagonal distinguishability (worst oracle pair).
    pub min_distinguishability: f64,
}

/// Builds the distinguishability report from four runs of one variant, one
/// per marked item.
pub fn oracle_distinguishability(reports: &[RunReport; 4]) -> Result<FidelityReport> {
    let variant = reports[0].variant;
    if reports.iter().any(|r| r.variant != variant) {
        return Err(Error::InvalidArgument("reports mix circuit variants".into()));
    }
    let mut labels = Vec::new();
    for r in reports {
        labels.push(r.marked.bits());
    }
    let mut pairwise = [[0.0; 4]; 4];
    let mut dist = [[0.0; 4]; 4];
    let mut min_distinguishability = f64::INFINITY;
    for i in 0..4 {
        for j in 0..4 {
            let f = distribution_fidelity(&reports[i].conditional, &reports[j].conditional)?;
            pairwise[i][j] = f;
            dist[i][j] = 1.0 - f;
            if i != j && dist[i][j] < min_distinguishability {
                min_distinguishability = dist[i][j];
            }
        }
    }
    let mut to_ideal = [0.0; 4];
    for (i, r) in reports.iter().enumerate() {
        to_ideal[i] = ideal_actual_fidelity(&r.conditional, &r.marked)?;
    }
    Ok(FidelityReport {
        labels,
        pairwise,
        pairwise_distinguishability: dist,
        to_ideal,
        min_distinguishability,
    })
}

/// Fidelity of a measured answer distribution against the reference
/// simulator's ideal distribution for the same marked item.
pub fn ideal_actual_fidelity(
    actual: &OutcomeDistribution<String>,
    marked: &MarkedItem,
) -> Result<f64> {
    let reference = grover_reference(marked.n_bits(), marked, 1)?;
    let mut weights = BTreeMap::new();
    for label in actual.labels() {
        weights.insert(label.clone(), reference.probability(label));
    }
    let ideal = OutcomeDistribution::from_probs(weights, 1.0);
    distribution_fidelity(actual, &ideal)
}
