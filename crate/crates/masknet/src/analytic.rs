//! Closed-form and fixed-point predictions for the mask model: the
//! two-strain mutation analogue, the epidemic threshold, emergence
//! probability by patient-zero type, and expected epidemic size.
//!
//! All solvers are plain monotone fixed-point iterations: extinction starts
//! from (0, 0) and climbs to the smallest nonnegative fixed point, the size
//! recursion starts from (1, 1) and descends to the supercritical branch.
//! Damping kicks in automatically if residuals oscillate.

use crate::degree::DegreeDistribution;
use crate::error::SolverError;
use crate::model::{MaskModelParams, NodeType};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iter: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Diagnostics {
    pub iterations: u64,
    pub residual: f64,
    pub damped: bool,
}

/// The two-strain analogue of the mask model: effective transmissibilities
/// Q1, Q2 and the row-stochastic mutation matrix mu.
///
/// A row with Q_i = 0 has no well-defined mu entries; it is flagged
/// degenerate and stored as zeros, and downstream solvers treat type i as
/// non-transmitting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MutationAnalogue {
    pub q: [f64; 2],
    pub mu: [[f64; 2]; 2],
    pub degenerate: [bool; 2],
}

/// Map mask-model parameters onto the two-strain mutation model:
/// Q_i is the expected transmissibility of an infected type-i node, and
/// mu_ij the fraction of its victims that have type j.
pub fn mutation_map(params: &MaskModelParams) -> MutationAnalogue {
    let m = params.m;
    let t = &params.t;
    let mut q = [0.0; 2];
    let mut mu = [[0.0; 2]; 2];
    let mut degenerate = [false; 2];
    for i in 0..2 {
        q[i] = t[i][0] * m + t[i][1] * (1.0 - m);
        if q[i] > 0.0 {
            mu[i][0] = t[i][0] * m / q[i];
            mu[i][1] = t[i][1] * (1.0 - m) / q[i];
        } else {
            degenerate[i] = true;
        }
    }
    MutationAnalogue { q, mu, degenerate }
}

/// Spectral radius of a nonnegative 2x2 matrix via the closed-form
/// eigenvalue formula.
pub fn spectral_radius_2x2(a: [[f64; 2]; 2]) -> f64 {
    let tr = a[0][0] + a[1][1];
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    let disc = (tr * tr - 4.0 * det).max(0.0).sqrt();
    (tr + disc) / 2.0
}

/// R0 = ((⟨k²⟩ - ⟨k⟩) / ⟨k⟩) * rho(T diag(m, 1-m)). An epidemic can
/// persist iff R0 > 1. Zero-mean distributions give R0 = 0.
pub fn r0(dist: &DegreeDistribution, params: &MaskModelParams) -> f64 {
    dist.mean_excess_degree() * spectral_radius_2x2(params.t_m_matrix())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmergenceSolution {
    /// Extinction probabilities (P1, P2) by patient-zero type.
    pub extinction: [f64; 2],
    /// Emergence probabilities, the complements of `extinction`.
    pub emergence: [f64; 2],
    /// m * (1 - P1) + (1 - m) * (1 - P2): emergence for a random patient zero.
    pub emergence_mixed: f64,
    /// Smallest nonnegative fixed point (q1, q2) of the excess-degree PGFs.
    pub fixed_point: [f64; 2],
    pub diagnostics: Diagnostics,
}

/// Extinction/emergence probabilities by patient-zero type.
///
/// Iterates (s, t) <- (Gamma_1(s, t), Gamma_2(s, t)) from (0, 0), where
/// Gamma_i(s, t) = G(1 - Q_i + Q_i (s mu_i1 + t mu_i2)) over the excess
/// degree distribution, then evaluates the degree-PGF analogue gamma_i at
/// the fixed point.
pub fn emergence_probability(
    dist: &DegreeDistribution,
    params: &MaskModelParams,
    opts: SolverOptions,
) -> Result<EmergenceSolution, SolverError> {
    if dist.mean_degree() <= 0.0 {
        return Ok(EmergenceSolution {
            extinction: [1.0, 1.0],
            emergence: [0.0, 0.0],
            emergence_mixed: 0.0,
            fixed_point: [1.0, 1.0],
            diagnostics: Diagnostics::default(),
        });
    }
    let opts = tighten_near_threshold(r0(dist, params), opts);
    let analogue = mutation_map(params);
    let arg = |i: usize, s: f64, t: f64| {
        1.0 - analogue.q[i] + analogue.q[i] * (s * analogue.mu[i][0] + t * analogue.mu[i][1])
    };
    let (fp, diagnostics) = iterate2(
        |[s, t]| {
            [
                dist.excess_pgf_children_unchecked(arg(0, s, t).clamp(0.0, 1.0)),
                dist.excess_pgf_children_unchecked(arg(1, s, t).clamp(0.0, 1.0)),
            ]
        },
        [0.0, 0.0],
        opts,
    )?;
    let extinction = [
        dist.pgf_unchecked(arg(0, fp[0], fp[1]).clamp(0.0, 1.0)),
        dist.pgf_unchecked(arg(1, fp[0], fp[1]).clamp(0.0, 1.0)),
    ];
    let emergence = [snap_unit(1.0 - extinction[0], opts.tol), snap_unit(1.0 - extinction[1], opts.tol)];
    Ok(EmergenceSolution {
        extinction,
        emergence,
        emergence_mixed: params.m * emergence[0] + (1.0 - params.m) * emergence[1],
        fixed_point: fp,
        diagnostics,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SizeSolution {
    /// (S1, S2): expected infected fraction of each type's population,
    /// conditioned on emergence.
    pub s: [f64; 2],
    /// S = S1 * m + S2 * (1 - m).
    pub total: f64,
    /// Interior fixed point (q_inf_1, q_inf_2) of the level recursion.
    pub q_inf: [f64; 2],
    pub diagnostics: Diagnostics,
}

/// Expected epidemic size by type, via the tree recursion over k - 1
/// children iterated from (1, 1) down to the supercritical fixed point.
pub fn epidemic_size(
    dist: &DegreeDistribution,
    params: &MaskModelParams,
    opts: SolverOptions,
) -> Result<SizeSolution, SolverError> {
    if dist.mean_degree() <= 0.0 {
        return Ok(SizeSolution {
            s: [0.0, 0.0],
            total: 0.0,
            q_inf: [0.0, 0.0],
            diagnostics: Diagnostics::default(),
        });
    }
    let opts = tighten_near_threshold(r0(dist, params), opts);
    let (q_inf, diagnostics) = iterate2(
        |[q1, q2]| {
            [
                1.0 - dist.excess_pgf_children_unchecked((1.0 - attack_rate(params, NodeType::Masked, q1, q2)).clamp(0.0, 1.0)),
                1.0 - dist.excess_pgf_children_unchecked((1.0 - attack_rate(params, NodeType::Unmasked, q1, q2)).clamp(0.0, 1.0)),
            ]
        },
        [1.0, 1.0],
        opts,
    )?;
    let s = [
        snap_unit(1.0 - dist.pgf_unchecked((1.0 - attack_rate(params, NodeType::Masked, q_inf[0], q_inf[1])).clamp(0.0, 1.0)), opts.tol),
        snap_unit(1.0 - dist.pgf_unchecked((1.0 - attack_rate(params, NodeType::Unmasked, q_inf[0], q_inf[1])).clamp(0.0, 1.0)), opts.tol),
    ];
    Ok(SizeSolution {
        s,
        total: s[0] * params.m + s[1] * (1.0 - params.m),
        q_inf,
        diagnostics,
    })
}

/// Per-child probability that a random child infects a `parent`-typed node,
/// given per-type child infection probabilities (q1, q2).
fn attack_rate(params: &MaskModelParams, parent: NodeType, q1: f64, q2: f64) -> f64 {
    let j = parent.index();
    params.m * q1 * params.t[0][j] + (1.0 - params.m) * q2 * params.t[1][j]
}

/// Closed form of the infection probability of a `parent`-typed node with
/// `z` children: f(z, q1, q2) = 1 - (1 - beta)^z where beta is the
/// per-child attack rate. Collapses the literal triple binomial sum.
pub fn f_closed(z: f64, q1: f64, q2: f64, params: &MaskModelParams, parent: NodeType) -> f64 {
    1.0 - (1.0 - attack_rate(params, parent, q1, q2)).powf(z)
}

/// Maximum `z` accepted by [`f_literal`]; the sum is O(z^3).
pub const F_LITERAL_MAX_Z: u32 = 20;

/// The literal triple binomial sum for the infection probability of a node
/// with `z` children. Exists solely as an oracle for [`f_closed`].
pub fn f_literal(
    z: u32,
    q1: f64,
    q2: f64,
    params: &MaskModelParams,
    parent: NodeType,
) -> Result<f64, SolverError> {
    if z > F_LITERAL_MAX_Z {
        return Err(SolverError::LiteralSumTooLarge {
            z,
            max: F_LITERAL_MAX_Z,
        });
    }
    let m = params.m;
    let j = parent.index();
    let (ta, tb) = (params.t[0][j], params.t[1][j]);
    let z = z as usize;
    let mut total = 0.0;
    for x in 0..=z {
        let px = binomial(z, x) * m.powi(x as i32) * (1.0 - m).powi((z - x) as i32);
        for u in 0..=x {
            let pu = binomial(x, u) * q1.powi(u as i32) * (1.0 - q1).powi((x - u) as i32);
            for v in 0..=(z - x) {
                let pv = binomial(z - x, v)
                    * q2.powi(v as i32)
                    * (1.0 - q2).powi((z - x - v) as i32);
                let infected = 1.0 - (1.0 - ta).powi(u as i32) * (1.0 - tb).powi(v as i32);
                total += px * pu * pv * infected;
            }
        }
    }
    Ok(total)
}

fn binomial(n: usize, k: usize) -> f64 {
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MutationSizeSolution {
    /// Infected fraction of the whole population carrying each strain.
    pub by_strain: [f64; 2],
    pub total: f64,
    pub q_inf: [f64; 2],
    pub diagnostics: Diagnostics,
}

/// Expected epidemic size of the two-strain mutation model built from the
/// mask model's analogue.
///
/// Transmission rule: a child infected with strain i transmits with
/// probability Q_i, and the strain developing in the newly infected host is
/// j with probability mu_ij. A node receiving x successful strain-1 and y
/// successful strain-2 infections becomes infected iff x + y >= 1 and
/// adopts strain 1 with probability x / (x + y). Conditioning on the number
/// of successes collapses the multinomial sum: the per-strain share of the
/// infection probability is exactly a_i / (a_1 + a_2), where a_j is the
/// per-child probability of a successful post-mutation strain-j infection.
pub fn mutation_epidemic_size(
    dist: &DegreeDistribution,
    analogue: &MutationAnalogue,
    opts: SolverOptions,
) -> Result<MutationSizeSolution, SolverError> {
    if dist.mean_degree() <= 0.0 || analogue.q[0] + analogue.q[1] <= 0.0 {
        return Ok(MutationSizeSolution {
            by_strain: [0.0, 0.0],
            total: 0.0,
            q_inf: [0.0, 0.0],
            diagnostics: Diagnostics::default(),
        });
    }
    let shares = |q1: f64, q2: f64| {
        let a1 = q1 * analogue.q[0] * analogue.mu[0][0] + q2 * analogue.q[1] * analogue.mu[1][0];
        let a2 = q1 * analogue.q[0] * analogue.mu[0][1] + q2 * analogue.q[1] * analogue.mu[1][1];
        (a1, a2)
    };
    let (q_inf, diagnostics) = iterate2(
        |[q1, q2]| {
            let (a1, a2) = shares(q1, q2);
            let tot = a1 + a2;
            if tot <= 0.0 {
                return [0.0, 0.0];
            }
            let infected = 1.0 - dist.excess_pgf_children_unchecked((1.0 - tot).clamp(0.0, 1.0));
            [a1 / tot * infected, a2 / tot * infected]
        },
        [0.5, 0.5],
        opts,
    )?;
    let (a1, a2) = shares(q_inf[0], q_inf[1]);
    let tot = a1 + a2;
    let by_strain = if tot > 0.0 {
        let infected = snap_unit(1.0 - dist.pgf_unchecked((1.0 - tot).clamp(0.0, 1.0)), opts.tol);
        [a1 / tot * infected, a2 / tot * infected]
    } else {
        [0.0, 0.0]
    };
    Ok(MutationSizeSolution {
        by_strain,
        total: by_strain[0] + by_strain[1],
        q_inf,
        diagnostics,
    })
}

/// The fixed point degenerates at criticality; tighten the tolerance there
/// instead of failing.
fn tighten_near_threshold(r0: f64, mut opts: SolverOptions) -> SolverOptions {
    if (r0 - 1.0).abs() < 1e-3 {
        opts.tol = opts.tol.min(1e-14);
    }
    opts
}

/// Snap solver noise below tolerance onto the exact boundary values.
fn snap_unit(x: f64, tol: f64) -> f64 {
    if x.abs() < 10.0 * tol {
        0.0
    } else if (x - 1.0).abs() < 10.0 * tol {
        1.0
    } else {
        x
    }
}

/// Plain 2-d fixed-point iteration with sup-norm stopping; switches to
/// damping (factor 0.5) if the residual grows.
fn iterate2<F>(
    map: F,
    start: [f64; 2],
    opts: SolverOptions,
) -> Result<([f64; 2], Diagnostics), SolverError>
where
    F: Fn([f64; 2]) -> [f64; 2],
{
    let mut x = start;
    let mut prev_residual = f64::INFINITY;
    let mut damped = false;
    for iteration in 1..=opts.max_iter {
        let y = map(x);
        let residual = (y[0] - x[0]).abs().max((y[1] - x[1]).abs());
        if residual > prev_residual {
            damped = true;
        }
        x = if damped {
            [0.5 * (x[0] + y[0]), 0.5 * (x[1] + y[1])]
        } else {
            y
        };
        if residual < opts.tol {
            return Ok((
                x,
                Diagnostics {
                    iterations: iteration,
                    residual,
                    damped,
                },
            ));
        }
        prev_residual = residual;
    }
    Err(SolverError::NonConvergence {
        iterations: opts.max_iter,
        residual: prev_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fig1_params() -> MaskModelParams {
        MaskModelParams::new(0.45, [[0.126, 0.18], [0.42, 0.6]]).unwrap()
    }

    fn opts() -> SolverOptions {
        SolverOptions::default()
    }

    #[test]
    fn mutation_map_fig1_values() {
        let a = mutation_map(&fig1_params());
        assert!((a.q[0] - 0.1557).abs() < 1e-12);
        assert!((a.q[1] - 0.519).abs() < 1e-12);
        assert!((a.mu[0][0] - 0.0567 / 0.1557).abs() < 1e-12);
        for i in 0..2 {
            assert!((a.mu[i][0] + a.mu[i][1] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn mutation_map_boundaries() {
        let t = [[0.126, 0.18], [0.42, 0.6]];
        let a = mutation_map(&MaskModelParams::new(0.0, t).unwrap());
        assert!((a.q[0] - 0.18).abs() < 1e-15 && (a.q[1] - 0.6).abs() < 1e-15);
        assert!((a.mu[0][1] - 1.0).abs() < 1e-15 && (a.mu[1][1] - 1.0).abs() < 1e-15);
        let a = mutation_map(&MaskModelParams::new(1.0, t).unwrap());
        assert!((a.q[0] - 0.126).abs() < 1e-15 && (a.q[1] - 0.42).abs() < 1e-15);
        assert!((a.mu[0][0] - 1.0).abs() < 1e-15 && (a.mu[1][0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn mutation_map_degenerate_row() {
        let a = mutation_map(&MaskModelParams::new(0.5, [[0.0, 0.0], [0.3, 0.4]]).unwrap());
        assert!(a.degenerate[0] && !a.degenerate[1]);
        assert_eq!(a.mu[0], [0.0, 0.0]);
    }

    #[test]
    fn r0_single_type_reduction() {
        let t = 0.3;
        let params = MaskModelParams::new(1.0, [[t; 2]; 2]).unwrap();
        let d = DegreeDistribution::poisson(5.0);
        assert!((r0(&d, &params) - 5.0 * t).abs() < 1e-12);
    }

    #[test]
    fn r0_zero_matrix() {
        let params = MaskModelParams::new(0.45, [[0.0; 2]; 2]).unwrap();
        assert_eq!(r0(&DegreeDistribution::poisson(5.0), &params), 0.0);
    }

    #[test]
    fn r0_factored_masks_crosses_one_near_reference_value() {
        // rank-1 T diag(m, 1-m) with inward 0.3, outward 0.7 and Poisson(5):
        // rho = 0.6445 T, so R0 = 1 at T = 1 / (5 * 0.6445).
        let d = DegreeDistribution::poisson(5.0);
        let expected: f64 = 1.0 / (5.0 * 0.6445);
        assert!((expected - 0.3103).abs() < 5e-4);
        let at = |t: f64| {
            let p = MaskModelParams::from_factored(0.45, t, 0.3, 0.7, None).unwrap();
            r0(&d, &p)
        };
        assert!((at(expected) - 1.0).abs() < 1e-12);
        assert!(at(expected - 1e-4) < 1.0 && at(expected + 1e-4) > 1.0);
    }

    #[test]
    fn emergence_trivial_when_no_transmission() {
        let params = MaskModelParams::new(0.45, [[0.0; 2]; 2]).unwrap();
        let sol =
            emergence_probability(&DegreeDistribution::poisson(5.0), &params, opts()).unwrap();
        assert_eq!(sol.extinction, [1.0, 1.0]);
        assert_eq!(sol.emergence_mixed, 0.0);
    }

    #[test]
    fn emergence_zero_below_threshold() {
        let d = DegreeDistribution::poisson(1.0);
        let sol = emergence_probability(&d, &fig1_params(), opts()).unwrap();
        assert!(r0(&d, &fig1_params()) < 1.0);
        assert!(sol.emergence_mixed.abs() < 1e-9);
    }

    #[test]
    fn size_trivial_when_no_transmission() {
        let params = MaskModelParams::new(0.45, [[0.0; 2]; 2]).unwrap();
        let sol = epidemic_size(&DegreeDistribution::poisson(5.0), &params, opts()).unwrap();
        assert_eq!(sol.q_inf, [0.0, 0.0]);
        assert_eq!(sol.total, 0.0);
    }

    /// Independent single-type Newman solver used as an oracle below.
    fn newman_single_type(lambda: f64, t: f64) -> (f64, f64) {
        // extinction from the excess process, then size via 1 - g(1 - T q).
        let g = |z: f64| (lambda * (z - 1.0)).exp();
        let mut e = 0.0;
        for _ in 0..1_000_000 {
            let ne = g(1.0 - t + t * e);
            if (ne - e).abs() < 1e-15 {
                e = ne;
                break;
            }
            e = ne;
        }
        let emergence = 1.0 - g(1.0 - t + t * e);
        let mut q: f64 = 1.0;
        for _ in 0..1_000_000 {
            let nq = 1.0 - g(1.0 - t * q);
            if (nq - q).abs() < 1e-15 {
                q = nq;
                break;
            }
            q = nq;
        }
        (emergence, 1.0 - g(1.0 - t * q))
    }

    #[test]
    fn single_type_reduction_matches_newman() {
        // m = 1 reduces to single-type with T11; m = 0 to T22.
        for (m, lambda, t) in [(1.0, 10.0, 0.126), (0.0, 5.0, 0.6)] {
            let d = DegreeDistribution::poisson(lambda);
            let params = fig1_params();
            let params = MaskModelParams::new(m, params.t).unwrap();
            let tight = SolverOptions { tol: 1e-15, max_iter: 2_000_000 };
            let em = emergence_probability(&d, &params, tight).unwrap();
            let sz = epidemic_size(&d, &params, tight).unwrap();
            let (newman_emergence, newman_size) = newman_single_type(lambda, t);
            let idx = if m == 1.0 { 0 } else { 1 };
            assert!((em.emergence[idx] - newman_emergence).abs() < 1e-9);
            assert!((sz.s[idx] - newman_size).abs() < 1e-9);
            // Poisson single-type: emergence and size coincide.
            assert!((em.emergence[idx] - sz.s[idx]).abs() < 1e-9);
        }
    }

    #[test]
    fn threshold_consistency_along_mean_degree_sweep() {
        // Both solvers flip from zero to positive where R0 crosses 1.
        let params = fig1_params();
        let critical = {
            // bisection on R0(lambda) - 1
            let (mut lo, mut hi) = (0.5, 10.0);
            while hi - lo > 1e-9 {
                let mid = 0.5 * (lo + hi);
                if r0(&DegreeDistribution::poisson(mid), &params) < 1.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        };
        for (lambda, expect_positive) in
            [(critical - 0.05, false), (critical + 0.05, true)]
        {
            let d = DegreeDistribution::poisson(lambda);
            let em = emergence_probability(&d, &params, opts()).unwrap().emergence_mixed;
            let sz = epidemic_size(&d, &params, opts()).unwrap().total;
            if expect_positive {
                assert!(em > 1e-4 && sz > 1e-4, "lambda={lambda} em={em} sz={sz}");
            } else {
                assert!(em < 1e-6 && sz < 1e-6, "lambda={lambda} em={em} sz={sz}");
            }
        }
    }

    #[test]
    fn degenerate_transmitter_type() {
        // Masked nodes never transmit; a masked patient zero alone cannot
        // start an epidemic... unless it sparks an unmasked neighbor, which
        // it cannot since row 1 of T is zero.
        let params = MaskModelParams::new(0.45, [[0.0, 0.0], [0.42, 0.6]]).unwrap();
        let d = DegreeDistribution::poisson(8.0);
        let sol = emergence_probability(&d, &params, opts()).unwrap();
        assert!(sol.emergence[0].abs() < 1e-9);
        assert!(sol.emergence[1] > 0.0);
    }

    #[test]
    fn size_nonincreasing_in_mask_fraction() {
        let d = DegreeDistribution::poisson(5.0);
        let mut prev = f64::INFINITY;
        for i in 0..=20 {
            let m = i as f64 / 20.0;
            let params = MaskModelParams::from_factored(m, 0.6, 0.3, 0.7, None).unwrap();
            let total = epidemic_size(&d, &params, opts()).unwrap().total;
            assert!(total <= prev + 1e-9, "m={m} total={total} prev={prev}");
            prev = total;
        }
    }

    #[test]
    fn f_literal_examples() {
        let params = fig1_params();
        assert_eq!(f_literal(0, 0.5, 0.5, &params, NodeType::Masked).unwrap(), 0.0);
        let m1 = MaskModelParams::new(1.0, params.t).unwrap();
        let got = f_literal(1, 1.0, 0.0, &m1, NodeType::Masked).unwrap();
        assert!((got - 0.126).abs() < 1e-12);
        assert!(f_literal(21, 0.5, 0.5, &params, NodeType::Masked).is_err());
    }

    #[test]
    fn f_closed_matches_literal_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(2020);
        for _ in 0..100 {
            let params = MaskModelParams::new(
                rng.random(),
                [[rng.random(), rng.random()], [rng.random(), rng.random()]],
            )
            .unwrap();
            let (q1, q2) = (rng.random(), rng.random());
            for z in 0..=8u32 {
                for parent in [NodeType::Masked, NodeType::Unmasked] {
                    let lit = f_literal(z, q1, q2, &params, parent).unwrap();
                    let clo = f_closed(z as f64, q1, q2, &params, parent);
                    assert!((lit - clo).abs() < 1e-12, "z={z} lit={lit} clo={clo}");
                }
            }
        }
    }

    #[test]
    fn mutation_size_trivial_and_identity_reduction() {
        let d = DegreeDistribution::poisson(5.0);
        let zero = MutationAnalogue {
            q: [0.0, 0.0],
            mu: [[0.0; 2]; 2],
            degenerate: [true, true],
        };
        assert_eq!(mutation_epidemic_size(&d, &zero, opts()).unwrap().total, 0.0);

        // mu = identity with equal Q: strains are indistinguishable and the
        // total must match the single-type size at transmissibility Q.
        let q = 0.4;
        let identity = MutationAnalogue {
            q: [q, q],
            mu: [[1.0, 0.0], [0.0, 1.0]],
            degenerate: [false, false],
        };
        let total = mutation_epidemic_size(&d, &identity, opts()).unwrap().total;
        let (_, single) = newman_single_type(5.0, q);
        assert!((total - single).abs() < 1e-9, "total={total} single={single}");
    }

    /// Literal multinomial version of the mutation-model strain shares,
    /// used as an oracle for the collapsed form inside the solver.
    fn mutation_shares_literal(z: usize, a1: f64, a2: f64) -> (f64, f64) {
        let mut s1 = 0.0;
        let mut s2 = 0.0;
        for x in 0..=z {
            for y in 0..=(z - x) {
                if x + y == 0 {
                    continue;
                }
                let ways = binomial(z, x) * binomial(z - x, y);
                let p = ways
                    * a1.powi(x as i32)
                    * a2.powi(y as i32)
                    * (1.0 - a1 - a2).powi((z - x - y) as i32);
                s1 += p * x as f64 / (x + y) as f64;
                s2 += p * y as f64 / (x + y) as f64;
            }
        }
        (s1, s2)
    }

    #[test]
    fn mutation_share_collapse_matches_multinomial_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..50 {
            let a1 = rng.random::<f64>() * 0.5;
            let a2 = rng.random::<f64>() * 0.5;
            for z in 1..=8usize {
                let (s1, s2) = mutation_shares_literal(z, a1, a2);
                let tot = a1 + a2;
                let infected = 1.0 - (1.0 - tot).powi(z as i32);
                assert!((s1 - a1 / tot * infected).abs() < 1e-12);
                assert!((s2 - a2 / tot * infected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn fig1_supercritical_predictions_are_sane() {
        let d = DegreeDistribution::poisson(10.0);
        let em = emergence_probability(&d, &fig1_params(), opts()).unwrap();
        let sz = epidemic_size(&d, &fig1_params(), opts()).unwrap();
        assert!(em.emergence_mixed > 0.85 && em.emergence_mixed < 0.92);
        assert!(sz.total > 0.94 && sz.total < 0.98);
        assert!((sz.total - (sz.s[0] * 0.45 + sz.s[1] * 0.55)).abs() < 1e-12);
    }
}
