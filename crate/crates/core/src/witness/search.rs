//! Existential searches over rank-one projective measurements (or preparations).
//!
//! A projective pair is invariant under `n̂ → -n̂`, so the grid covers the upper
//! hemisphere only. The coarse grid is refined by Nelder-Mead in spherical
//! coordinates.

use std::f64::consts::PI;

use super::induced::{
    condition_unnormalized, negativity_two_qubit, ProjectivePair, System, ZERO_PROBABILITY,
};
use crate::model::{BlochVector, CausalMap};
use crate::optim::NelderMead;

/// Which causal pathway (or the Berkson effect) a search probes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pathway {
    /// Preparations on D, entanglement of `τ^d_CB`.
    CommonCause,
    /// Measurements on C, entanglement of `τ^c_BD`.
    CauseEffect,
    /// Measurements on B, entanglement of `τ^b_CD`.
    Berkson,
}

impl Pathway {
    pub const ALL: [Pathway; 3] = [Pathway::CommonCause, Pathway::CauseEffect, Pathway::Berkson];

    /// Basis used in the reference experiment: σy on D, σx on C, σz on B.
    pub fn reference_basis(self) -> BlochVector {
        match self {
            Pathway::CommonCause => BlochVector::Y,
            Pathway::CauseEffect => BlochVector::X,
            Pathway::Berkson => BlochVector::Z,
        }
    }

    pub fn system(self) -> System {
        match self {
            Pathway::CommonCause => System::D,
            Pathway::CauseEffect => System::C,
            Pathway::Berkson => System::B,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Pathway::CommonCause => "cc",
            Pathway::CauseEffect => "ce",
            Pathway::Berkson => "berkson",
        }
    }
}

/// Negativities of the induced states for outcomes `+1` and `-1` along `n`.
///
/// Impossible outcomes (probability below [`ZERO_PROBABILITY`]) yield zero.
pub fn outcome_negativities(map: &CausalMap, pathway: Pathway, n: &BlochVector) -> [f64; 2] {
    let pair = ProjectivePair::new(*n);
    [1i8, -1].map(|s| {
        let proj = pair.get(s);
        let state = match pathway {
            Pathway::CommonCause => map.apply_unchecked(proj),
            Pathway::CauseEffect | Pathway::Berkson => {
                let raw = condition_unnormalized(map.tau(), pathway.system(), proj);
                let prob = raw.trace().re;
                if prob < ZERO_PROBABILITY {
                    return 0.0;
                }
                raw.scale(1.0 / prob)
            }
        };
        negativity_two_qubit(&state.hermitian_part()).unwrap_or(0.0)
    })
}

/// `min` over both outcomes of the induced negativity along `n`.
pub fn pathway_value(map: &CausalMap, pathway: Pathway, n: &BlochVector) -> f64 {
    let [a, b] = outcome_negativities(map, pathway, n);
    a.min(b)
}

#[derive(Debug, Clone, Copy)]
pub struct SearchOptions {
    pub grid_points: usize,
    pub refine: NelderMead,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            grid_points: 400,
            refine: NelderMead {
                max_iterations: 200,
                tolerance: 1e-8,
                initial_step: 0.15,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchResult {
    pub basis: BlochVector,
    pub value: f64,
}

/// Fibonacci lattice on the upper hemisphere.
pub fn hemisphere_grid(points: usize) -> Vec<BlochVector> {
    let golden_angle = PI * (3.0 - 5f64.sqrt());
    (0..points)
        .map(|i| {
            let z = 1.0 - (i as f64 + 0.5) / points as f64;
            let r = (1.0 - z * z).sqrt();
            let phi = golden_angle * i as f64;
            BlochVector::new(r * phi.cos(), r * phi.sin(), z).expect("unit by construction")
        })
        .collect()
}

fn canonical(n: BlochVector) -> BlochVector {
    let [x, y, z] = n.components();
    let flip = z < 0.0 || (z == 0.0 && (y < 0.0 || (y == 0.0 && x < 0.0)));
    if flip {
        n.negate()
    } else {
        n
    }
}

/// Maximizes `min_± N` over Bloch directions.
pub fn search(map: &CausalMap, pathway: Pathway, opts: &SearchOptions) -> SearchResult {
    let mut candidates = vec![BlochVector::X, BlochVector::Y, BlochVector::Z];
    candidates.extend(hemisphere_grid(opts.grid_points));

    let mut best = SearchResult {
        basis: pathway.reference_basis(),
        value: f64::NEG_INFINITY,
    };
    for n in candidates {
        let v = pathway_value(map, pathway, &n);
        if v > best.value {
            best = SearchResult { basis: n, value: v };
        }
    }
    if best.value <= 0.0 {
        // flat zero landscape; nothing to refine
        return SearchResult {
            basis: canonical(best.basis),
            value: 0.0,
        };
    }

    let (theta, phi) = best.basis.to_spherical();
    let refined = opts.refine.minimize(
        |x| -pathway_value(map, pathway, &BlochVector::from_spherical(x[0], x[1])),
        &[theta, phi],
    );
    if -refined.value > best.value {
        best = SearchResult {
            basis: BlochVector::from_spherical(refined.x[0], refined.x[1]),
            value: -refined.value,
        };
    }
    SearchResult {
        basis: canonical(best.basis),
        value: best.value,
    }
}

pub fn search_pathway_cc(map: &CausalMap) -> SearchResult {
    search(map, Pathway::CommonCause, &SearchOptions::default())
}

pub fn search_pathway_ce(map: &CausalMap) -> SearchResult {
    search(map, Pathway::CauseEffect, &SearchOptions::default())
}

pub fn search_berkson(map: &CausalMap) -> SearchResult {
    search(map, Pathway::Berkson, &SearchOptions::default())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_on_upper_hemisphere() {
        let g = hemisphere_grid(400);
        assert_eq!(g.len(), 400);
        assert!(g.iter().all(|n| n.z() > 0.0));
    }

    #[test]
    fn canonical_orientation() {
        let n = BlochVector::from_direction(0.1, 0.2, -0.3).unwrap();
        assert!(canonical(n).z() > 0.0);
        assert_eq!(canonical(BlochVector::X.negate()), BlochVector::X);
    }
}
