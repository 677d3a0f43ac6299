//! Multiplicative Kantian optimization in rescaled units. A player
//! contemplating z asks "what if we all rescaled our z by a common
//! factor a?" and requires a = 1 to be optimal. Profiles with one
//! positive and one negative strategy use the extended deviation
//! family (a, 2 - a) so both strategies keep their signs.

use crate::error::{Error, Result};
use crate::game::{landmarks, SolverConfig, ValidatedGame, EXACT_FOC, ROOT_MERGE};
use crate::rescale::{feasible_z_interval, Rescaling};
use crate::solve;
use serde::Serialize;

/// A profile in rescaled units.
pub type ZProfile = (f64, f64);

/// Which deviation family applies to a profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    SameSign,
    OppositeSign,
}

/// Same-sign profiles scale jointly by a >= 0; mixed-sign profiles use
/// the (a, 2 - a) family on (0, 2].
pub fn branch_of(p: ZProfile) -> Branch {
    let (z1, z2) = p;
    if (z2 < 0.0 && z1 >= 0.0) || (z1 < 0.0 && z2 >= 0.0) {
        Branch::OppositeSign
    } else {
        Branch::SameSign
    }
}

/// Player 1's payoff after the whole profile is rescaled by a.
/// Errors propagate when the scaled profile leaves either domain;
/// maximizing callers treat that as an infeasible deviation.
pub fn kantian_objective(
    game: &ValidatedGame,
    r: &Rescaling,
    p: ZProfile,
    a: f64,
) -> Result<f64> {
    let (z1, z2) = p;
    let (s1, s2) = match branch_of(p) {
        Branch::SameSign => {
            if a < 0.0 {
                return Err(Error::BadParameter(format!(
                    "scale factor must be nonnegative on the same-sign branch, got {a}"
                )));
            }
            (a * z1, a * z2)
        }
        Branch::OppositeSign => {
            if !(a > 0.0 && a <= 2.0) {
                return Err(Error::BadParameter(format!(
                    "scale factor must lie in (0, 2] on the opposite-sign branch, got {a}"
                )));
            }
            if z1 >= 0.0 {
                (a * z1, (2.0 - a) * z2)
            } else {
                ((2.0 - a) * z1, a * z2)
            }
        }
    };
    let x1 = r.apply(s1)?;
    let x2 = r.apply(s2)?;
    game.payoff(x1, x2)
}

fn foc_terms(
    game: &ValidatedGame,
    r: &Rescaling,
    p: ZProfile,
) -> Result<(f64, f64)> {
    let (z1, z2) = p;
    let x1 = r.apply(z1)?;
    let x2 = r.apply(z2)?;
    let u1 = game.d_own(x1, x2)?;
    let u2 = game.d_other(x1, x2)?;
    let t1 = r.deriv_times_z(z1)?;
    let t2 = r.deriv_times_z(z2)?;
    Ok((u1 * t1, u2 * t2))
}

/// d/da of the Kantian objective at a = 1: the stationarity residual.
pub fn kantian_foc(game: &ValidatedGame, r: &Rescaling, p: ZProfile) -> Result<f64> {
    let (own, other) = foc_terms(game, r, p)?;
    Ok(match branch_of(p) {
        Branch::SameSign => own + other,
        Branch::OppositeSign => {
            if p.0 >= 0.0 {
                own - other
            } else {
                other - own
            }
        }
    })
}

/// One stationary point of the Kantian objective in z1.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct KbrRoot {
    pub z1: f64,
    pub branch: Branch,
    /// Whether a = 1 beats a local grid of alternative scale factors.
    pub sufficient: bool,
}

/// All Kantian best-response candidates to a fixed opponent z2:
/// stationary points of the branch-appropriate objective across the
/// feasible z1 range, each with a local sufficiency verdict.
pub fn kantian_best_response(
    game: &ValidatedGame,
    r: &Rescaling,
    z2: f64,
    cfg: &SolverConfig,
) -> Result<Vec<KbrRoot>> {
    r.apply(z2).map_err(|_| Error::OutsideDomain {
        what: "opponent rescaled strategy",
        value: z2,
        lo: r.z_domain().lo,
        hi: r.z_domain().hi,
    })?;
    let zint = feasible_z_interval(game, r, cfg)?;
    let span = zint.hi - zint.lo;
    let tiny = 1e-9 * span.max(1.0);
    // Regions on which the branch label is constant for this z2.
    let (same, opp) = if z2 >= 0.0 {
        ((zint.lo.max(0.0), zint.hi), (zint.lo, -tiny))
    } else {
        ((zint.lo, (-tiny).min(zint.hi)), (zint.lo.max(0.0), zint.hi))
    };
    let foc = |z1: f64| kantian_foc(game, r, (z1, z2)).ok();
    let mut out: Vec<KbrRoot> = Vec::new();
    let add = |z1: f64, list: &mut Vec<KbrRoot>| {
        if !list.iter().any(|k| (k.z1 - z1).abs() <= ROOT_MERGE) {
            let p = (z1, z2);
            list.push(KbrRoot {
                z1,
                branch: branch_of(p),
                sufficient: locally_sufficient(game, r, p),
            });
        }
    };
    for (lo, hi) in [same, opp] {
        if lo.partial_cmp(&hi) != Some(std::cmp::Ordering::Less) {
            continue;
        }
        let cells =
            ((cfg.grid_points as f64) * (hi - lo) / span).ceil().max(8.0) as usize;
        for root in solve::scan_roots(&foc, lo, hi, cells, cfg.tol_root, ROOT_MERGE, cfg.max_iter)
        {
            add(root, &mut out);
        }
    }
    // The scaled-by-a family is flat at z1 = 0 terms, so a vanishing
    // residual there never produces a sign change; test it directly.
    if zint.contains(0.0) {
        if let Ok((own, other)) = foc_terms(game, r, (0.0, z2)) {
            let scale = 1.0 + own.abs() + other.abs();
            if let Ok(v) = kantian_foc(game, r, (0.0, z2)) {
                if v.abs() <= EXACT_FOC * scale {
                    add(0.0, &mut out);
                }
            }
        }
    }
    out.sort_by(|a, b| a.z1.partial_cmp(&b.z1).unwrap());
    Ok(out)
}

/// Checks a = 1 against a short grid of nearby scale factors.
/// [0.5, 1.5] is valid on both branches.
pub(crate) fn locally_sufficient(game: &ValidatedGame, r: &Rescaling, p: ZProfile) -> bool {
    let Ok(base) = kantian_objective(game, r, p, 1.0) else {
        return false;
    };
    const N: usize = 128;
    for i in 0..=N {
        let a = 0.5 + (i as f64) / (N as f64);
        if let Ok(v) = kantian_objective(game, r, p, a) {
            if v > base + 1e-9 {
                return false;
            }
        }
    }
    true
}

/// Outcome of the brute-force scale-factor scan.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Verification {
    pub verdict: bool,
    /// Largest payoff gain any sampled deviation achieves over a = 1
    /// (negative when every deviation loses).
    pub worst_violation: f64,
    pub player1_violation: f64,
    /// Present on the same-sign branch, where the definition
    /// quantifies over both players.
    pub player2_violation: Option<f64>,
}

const ORACLE_GRID: usize = 4096;
const ORACLE_SLACK: f64 = 1e-8;

fn scan_player(
    game: &ValidatedGame,
    r: &Rescaling,
    p: ZProfile,
    cfg: &SolverConfig,
) -> Result<f64> {
    let base = kantian_objective(game, r, p, 1.0)?;
    let mut worst = f64::NEG_INFINITY;
    match branch_of(p) {
        Branch::SameSign => {
            for i in 0..=ORACLE_GRID {
                let a = cfg.a_grid_max * (i as f64) / (ORACLE_GRID as f64);
                if let Ok(v) = kantian_objective(game, r, p, a) {
                    worst = worst.max(v - base);
                }
            }
        }
        Branch::OppositeSign => {
            for i in 0..ORACLE_GRID {
                let a = 2.0 * ((i + 1) as f64) / (ORACLE_GRID as f64);
                if let Ok(v) = kantian_objective(game, r, p, a) {
                    worst = worst.max(v - base);
                }
            }
        }
    }
    Ok(worst)
}

/// Brute-force check of the equilibrium definition on a dense grid of
/// scale factors: same-sign profiles must survive both players' scans,
/// mixed-sign profiles the Kantian deviator's. Infeasible deviations
/// are skipped.
pub fn verify_mke(
    game: &ValidatedGame,
    r: &Rescaling,
    p: ZProfile,
    cfg: &SolverConfig,
) -> Result<Verification> {
    let p1 = scan_player(game, r, p, cfg)?;
    let p2 = match branch_of(p) {
        Branch::SameSign => Some(scan_player(game, r, (p.1, p.0), cfg)?),
        Branch::OppositeSign => None,
    };
    let worst = p1.max(p2.unwrap_or(f64::NEG_INFINITY));
    Ok(Verification {
        verdict: worst <= ORACLE_SLACK,
        worst_violation: worst,
        player1_violation: p1,
        player2_violation: p2,
    })
}

/// A symmetric Kantian equilibrium candidate with its verification.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MkeResult {
    pub z1: f64,
    pub z2: f64,
    pub x1: f64,
    pub x2: f64,
    pub payoff1: f64,
    pub payoff2: f64,
    pub branch: Branch,
    pub foc_residual: f64,
    pub verified: bool,
    pub efficient: bool,
}

/// Symmetric equilibria z1 = z2 = z: the trivial root z = 0 (when
/// feasible) plus every zero of the summed marginal term
/// (U_own + U_other)(s(z), s(z)). Each candidate is run through the
/// oracle; the one matching the Pareto payoff is flagged efficient.
pub fn solve_symmetric_mke(
    game: &ValidatedGame,
    r: &Rescaling,
    cfg: &SolverConfig,
) -> Result<Vec<MkeResult>> {
    let zint = feasible_z_interval(game, r, cfg)?;
    let lm = landmarks(game, cfg)?;
    let bracket = |z: f64| {
        let x = r.apply(z).ok()?;
        let u1 = game.d_own(x, x).ok()?;
        let u2 = game.d_other(x, x).ok()?;
        Some(u1 + u2)
    };
    let mut roots: Vec<f64> = Vec::new();
    if zint.contains(0.0) && r.apply(0.0).is_ok() {
        roots.push(0.0);
    }
    for root in solve::scan_roots(
        &bracket,
        zint.lo,
        zint.hi,
        cfg.grid_points,
        cfg.tol_root,
        ROOT_MERGE,
        cfg.max_iter,
    ) {
        solve::push_root(&mut roots, root, ROOT_MERGE);
    }
    // The Pareto preimage satisfies the bracket exactly; probing it
    // guards against tangent zeros the sign scan cannot see.
    if let Ok(zp) = r.invert(lm.x_pareto) {
        if zint.contains(zp) {
            if let Some(v) = bracket(zp) {
                if v.abs() <= EXACT_FOC {
                    solve::push_root(&mut roots, zp, ROOT_MERGE);
                }
            }
        }
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut out = Vec::new();
    for z in roots {
        let x = r.apply(z)?;
        let payoff = game.payoff(x, x)?;
        // At z = 0 every common factor leaves the profile unchanged,
        // so the objective is constant in a and the residual is zero
        // even where the payoff derivative itself is singular.
        let foc_residual = if z == 0.0 {
            0.0
        } else {
            kantian_foc(game, r, (z, z))?.abs()
        };
        let check = verify_mke(game, r, (z, z), cfg)?;
        out.push(MkeResult {
            z1: z,
            z2: z,
            x1: x,
            x2: x,
            payoff1: payoff,
            payoff2: payoff,
            branch: Branch::SameSign,
            foc_residual,
            verified: check.verdict && foc_residual <= 1e-8,
            efficient: (payoff - lm.u_pareto).abs() <= 1e-6,
        });
    }
    Ok(out)
}

/// The efficient symmetric equilibrium, preferring an oracle-verified
/// one when several candidates match the Pareto payoff.
pub fn efficient_symmetric_mke(
    game: &ValidatedGame,
    r: &Rescaling,
    cfg: &SolverConfig,
) -> Result<MkeResult> {
    let all = solve_symmetric_mke(game, r, cfg)?;
    all.iter()
        .find(|m| m.efficient && m.verified)
        .or_else(|| all.iter().find(|m| m.efficient))
        .copied()
        .ok_or(Error::NoEfficientMke)
}
