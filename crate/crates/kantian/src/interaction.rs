//! Mixed-protocol play: player 1 optimizes Kantian-style in rescaled
//! units while player 2 plays an ordinary Nash best response in
//! original units. Equilibria of that game feed the type-vs-type
//! payoff matrix used by the population dynamics.

use crate::error::{Error, Result};
use crate::game::{
    landmarks, nash_best_response, SolverConfig, ValidatedGame, EXACT_FOC, ROOT_MERGE,
};
use crate::mke::{branch_of, kantian_foc, locally_sufficient, Branch};
use crate::rescale::{feasible_z_interval, Rescaling};
use crate::solve;
use serde::Serialize;

/// One equilibrium of the Kantian-Nasher game. z-values live in
/// rescaled units, x-values in the game's own units; x1 = apply(z1)
/// and x2 = apply(z2) = the Nasher reply to x1.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct KnEquilibrium {
    pub z1: f64,
    pub z2: f64,
    pub x1: f64,
    pub x2: f64,
    pub u_kantian: f64,
    pub u_nasher: f64,
    pub symmetric: bool,
    pub branch: Branch,
}

/// Payoffs for each pairing of optimization protocols.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TypeGameMatrix {
    pub u_kk: f64,
    pub u_kn: f64,
    pub u_nk: f64,
    pub u_nn: f64,
}

fn nasher_reply(
    game: &ValidatedGame,
    r: &Rescaling,
    z1: f64,
    cfg: &SolverConfig,
) -> Result<(f64, f64)> {
    let x1 = r.apply(z1)?;
    let x2 = nash_best_response(game, x1, cfg)?.x;
    let z2 = r.invert(x2)?;
    // Replies within solver noise of the rescaling origin are the
    // origin; the sign of the noise must not pick the branch.
    if z2 != 0.0 && z2.abs() <= 1e-9 {
        return Ok((0.0, r.apply(0.0)?));
    }
    Ok((z2, x2))
}

/// Equilibria of the two-protocol game: roots of the Kantian
/// stationarity residual along the Nasher reply curve
/// z1 -> invert(nash_best_response(apply(z1))). The residual is
/// continuous across sign-branch boundaries because the switching
/// term carries a factor that vanishes there.
pub fn solve_kantian_nasher(
    game: &ValidatedGame,
    r: &Rescaling,
    cfg: &SolverConfig,
) -> Result<Vec<KnEquilibrium>> {
    let zint = feasible_z_interval(game, r, cfg)?;
    let residual = |z1: f64| {
        let (z2, _) = nasher_reply(game, r, z1, cfg).ok()?;
        kantian_foc(game, r, (z1, z2)).ok()
    };
    let mut roots = solve::scan_roots(
        &residual,
        zint.lo,
        zint.hi,
        cfg.grid_points,
        cfg.tol_root,
        ROOT_MERGE,
        cfg.max_iter,
    );
    // Tangent roots produce no sign change; probe the natural
    // candidates (the rescaling origin and the Nash anchor) directly.
    let lm = landmarks(game, cfg)?;
    let mut candidates = vec![0.0];
    if let Ok(zn) = r.invert(lm.x_nash) {
        candidates.push(zn);
    }
    for z1 in candidates {
        if !zint.contains(z1) {
            continue;
        }
        if let Some(v) = residual(z1) {
            if v.abs() <= EXACT_FOC {
                solve::push_root(&mut roots, z1, ROOT_MERGE);
            }
        }
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut out = Vec::new();
    for z1 in roots {
        let Ok((z2, x2)) = nasher_reply(game, r, z1, cfg) else {
            continue;
        };
        let Ok(foc) = kantian_foc(game, r, (z1, z2)) else {
            continue;
        };
        // Rejects bisection artifacts and stationary points where the
        // common-factor family strictly improves on a = 1.
        if foc.abs() > 1e-6 || !locally_sufficient(game, r, (z1, z2)) {
            continue;
        }
        let x1 = r.apply(z1)?;
        out.push(KnEquilibrium {
            z1,
            z2,
            x1,
            x2,
            u_kantian: game.payoff(x1, x2)?,
            u_nasher: game.payoff(x2, x1)?,
            symmetric: (x1 - x2).abs() <= 1e-6,
            branch: branch_of((z1, z2)),
        });
    }
    Ok(out)
}

/// The coordination-focal equilibrium: the unique symmetric entry.
/// Errors when none or several distinct symmetric entries exist.
pub fn select_focal(equilibria: &[KnEquilibrium]) -> Result<KnEquilibrium> {
    let symmetric: Vec<&KnEquilibrium> =
        equilibria.iter().filter(|e| e.symmetric).collect();
    match symmetric.len() {
        0 => Err(Error::NoSymmetricEquilibrium),
        1 => Ok(*symmetric[0]),
        _ => Err(Error::AmbiguousSymmetricEquilibrium(symmetric.len())),
    }
}

/// The focal equilibrium when one exists, else the unique equilibrium
/// of an asymmetric-only singleton list.
pub fn kn_representative(
    game: &ValidatedGame,
    r: &Rescaling,
    cfg: &SolverConfig,
) -> Result<KnEquilibrium> {
    let kn = solve_kantian_nasher(game, r, cfg)?;
    match select_focal(&kn) {
        Ok(e) => Ok(e),
        Err(Error::NoSymmetricEquilibrium) if kn.len() == 1 => Ok(kn[0]),
        Err(e) => Err(e),
    }
}

/// Payoff matrix for the four protocol pairings: Kantian-Kantian from
/// the efficient symmetric equilibrium, the mixed cells from the
/// Kantian-Nasher focal equilibrium, Nasher-Nasher from the Nash
/// landmark. When no symmetric mixed equilibrium exists but the
/// equilibrium is unique, that one is used; free-riding then shows up
/// as u_kn < u_nk.
pub fn build_type_matrix(
    game: &ValidatedGame,
    r: &Rescaling,
    cfg: &SolverConfig,
) -> Result<TypeGameMatrix> {
    let lm = landmarks(game, cfg)?;
    let kk = crate::mke::efficient_symmetric_mke(game, r, cfg)?;
    let focal = kn_representative(game, r, cfg)?;
    Ok(TypeGameMatrix {
        u_kk: kk.payoff1,
        u_kn: focal.u_kantian,
        u_nk: focal.u_nasher,
        u_nn: lm.u_nash,
    })
}

/// One row of the best-response comparison table: an opponent
/// position given in both unit systems, player 1's Kantian reply, and
/// player 1's Nasher reply. Missing Kantian replies (no stationary
/// point) are NaN.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BrCurvePoint {
    pub z: f64,
    pub x: f64,
    pub br_kantian_z: f64,
    pub br_kantian_x: f64,
    pub br_nasher_z: f64,
    pub br_nasher_x: f64,
}

/// Samples both protocols' best responses on an n-point grid over the
/// feasible z-interval. Among several Kantian stationary points the
/// sufficient one with the highest payoff is reported.
pub fn best_response_curves(
    game: &ValidatedGame,
    r: &Rescaling,
    n: usize,
    cfg: &SolverConfig,
) -> Result<Vec<BrCurvePoint>> {
    let zint = feasible_z_interval(game, r, cfg)?;
    let n = n.max(2);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let z = zint.lo + (zint.hi - zint.lo) * (i as f64) / ((n - 1) as f64);
        let Ok(x) = r.apply(z) else { continue };
        let kantian = crate::mke::kantian_best_response(game, r, z, cfg)
            .ok()
            .and_then(|roots| {
                let score = |z1: f64| {
                    let x1 = r.apply(z1).ok()?;
                    game.payoff(x1, x).ok()
                };
                let mut best: Option<(f64, f64)> = None;
                for k in roots.iter().filter(|k| k.sufficient) {
                    if let Some(s) = score(k.z1) {
                        if best.is_none_or(|(_, bs)| s > bs) {
                            best = Some((k.z1, s));
                        }
                    }
                }
                best.map(|(z1, _)| z1)
            });
        let (br_kantian_z, br_kantian_x) = match kantian {
            Some(z1) => (z1, r.apply(z1)?),
            None => (f64::NAN, f64::NAN),
        };
        let Ok(br) = nash_best_response(game, x, cfg) else {
            continue;
        };
        let br_nasher_z = r.invert(br.x).unwrap_or(f64::NAN);
        out.push(BrCurvePoint {
            z,
            x,
            br_kantian_z,
            br_kantian_x,
            br_nasher_z,
            br_nasher_x: br.x,
        });
    }
    Ok(out)
}
