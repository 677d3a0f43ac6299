//! Populations of Kantian and Nasher optimizers: per-match payoffs
//! aggregated over round-robin play in a finite group, one-shot type
//! choice viewed as a game in itself, evolutionary stability under
//! uniform random matching, and two-type replicator dynamics.

use crate::error::{Error, Result};
use crate::game::{landmarks, SolverConfig, ValidatedGame};
use crate::interaction::{kn_representative, TypeGameMatrix};
use crate::mke::efficient_symmetric_mke;
use crate::rescale::Rescaling;
use serde::Serialize;

/// What each type plays in each pairing at equilibrium. Kantian
/// actions are in rescaled units, Nasher actions in original units.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct StagePlan {
    pub z_kk: f64,
    pub z_kn: f64,
    pub x_nk: f64,
    pub x_nn: f64,
}

/// The equilibrium stage plan: the efficient symmetric equilibrium
/// against fellow Kantians, the mixed-game equilibrium against a
/// Nasher, and the Nash action among Nashers.
pub fn equilibrium_stage_plan(
    game: &ValidatedGame,
    r: &Rescaling,
    cfg: &SolverConfig,
) -> Result<StagePlan> {
    let kk = efficient_symmetric_mke(game, r, cfg)?;
    let kn = kn_representative(game, r, cfg)?;
    let lm = landmarks(game, cfg)?;
    Ok(StagePlan {
        z_kk: kk.z1,
        z_kn: kn.z1,
        x_nk: kn.x2,
        x_nn: lm.x_nash,
    })
}

/// A population split across the two types.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PopulationState {
    /// Kantian fraction.
    pub k: f64,
    /// Nasher fraction; always 1 - k.
    pub n: f64,
}

impl PopulationState {
    pub fn new(k: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&k) {
            return Err(Error::BadParameter(format!(
                "population fraction must lie in [0, 1], got {k}"
            )));
        }
        Ok(PopulationState { k, n: 1.0 - k })
    }
}

/// Expected per-match payoff of each type under uniform matching when
/// a fraction k of the population is Kantian.
pub fn mean_payoffs(m: &TypeGameMatrix, k: f64) -> (f64, f64) {
    let u_k = k * m.u_kk + (1.0 - k) * m.u_kn;
    let u_n = k * m.u_nk + (1.0 - k) * m.u_nn;
    (u_k, u_n)
}

/// Round-robin totals in a group with the given composition. A role's
/// total is undefined when nobody holds that role.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct StagePayoffs {
    pub pi_kantian: Option<f64>,
    pub pi_nasher: Option<f64>,
}

impl StagePayoffs {
    pub fn kantian(&self) -> Result<f64> {
        self.pi_kantian
            .ok_or_else(|| Error::UndefinedRole("no Kantian in the group".into()))
    }

    pub fn nasher(&self) -> Result<f64> {
        self.pi_nasher
            .ok_or_else(|| Error::UndefinedRole("no Nasher in the group".into()))
    }
}

/// Total payoff each type collects playing everyone else once in a
/// group of n_total with n_kantian Kantians.
pub fn stage_payoffs(
    n_total: u32,
    n_kantian: u32,
    m: &TypeGameMatrix,
) -> Result<StagePayoffs> {
    if n_total < 2 {
        return Err(Error::BadParameter(format!(
            "group size must be at least 2, got {n_total}"
        )));
    }
    if n_kantian > n_total {
        return Err(Error::BadParameter(format!(
            "Kantian count {n_kantian} exceeds group size {n_total}"
        )));
    }
    let nk = n_kantian as f64;
    let n = n_total as f64;
    let pi_kantian =
        (n_kantian >= 1).then_some((nk - 1.0) * m.u_kk + (n - nk) * m.u_kn);
    let pi_nasher =
        (n_kantian < n_total).then_some(nk * m.u_nk + (n - nk - 1.0) * m.u_nn);
    Ok(StagePayoffs { pi_kantian, pi_nasher })
}

/// Equilibrium structure of the one-shot type-choice game.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SpneReport {
    /// Everyone choosing Kantian is a (weak) equilibrium.
    pub all_kantian_equilibrium: bool,
    /// Kantian earns at least the Nasher payoff against every opponent
    /// composition.
    pub kantian_weakly_dominant: bool,
    /// Some opponent composition makes the Kantian choice strictly
    /// better; false flags the degenerate boundary where the two
    /// protocols tie everywhere.
    pub strict_gain_exists: bool,
    /// Everyone choosing Nasher survives unilateral deviations.
    pub all_nasher_equilibrium: bool,
    /// Everyone choosing Nasher also survives a two-player joint
    /// switch to Kantian.
    pub all_nasher_coalition_proof: bool,
}

const PAYOFF_SLACK: f64 = 1e-9;

/// Evaluates type-choice equilibria by direct enumeration: one player
/// faces m Kantians among n_total - 1 opponents and compares the two
/// type choices match by match.
pub fn check_spne(n_total: u32, m: &TypeGameMatrix) -> Result<SpneReport> {
    if n_total < 2 {
        return Err(Error::BadParameter(format!(
            "group size must be at least 2, got {n_total}"
        )));
    }
    let others = n_total - 1;
    let as_kantian =
        |k: u32| (k as f64) * m.u_kk + ((others - k) as f64) * m.u_kn;
    let as_nasher =
        |k: u32| (k as f64) * m.u_nk + ((others - k) as f64) * m.u_nn;
    let mut weakly_dominant = true;
    let mut strict_gain = false;
    for k in 0..=others {
        let gap = as_kantian(k) - as_nasher(k);
        if gap < -PAYOFF_SLACK {
            weakly_dominant = false;
        }
        if gap > PAYOFF_SLACK {
            strict_gain = true;
        }
    }
    let all_kantian = as_nasher(others) <= as_kantian(others) + PAYOFF_SLACK;
    let all_nasher = as_kantian(0) <= as_nasher(0) + PAYOFF_SLACK;
    // A deviating pair leaves each member facing one Kantian (the
    // partner) and n_total - 2 Nashers.
    let pair_payoff = m.u_kk + ((n_total - 2) as f64) * m.u_kn;
    let coalition_proof = pair_payoff <= as_nasher(0) + PAYOFF_SLACK;
    Ok(SpneReport {
        all_kantian_equilibrium: all_kantian,
        kantian_weakly_dominant: weakly_dominant,
        strict_gain_exists: strict_gain,
        all_nasher_equilibrium: all_nasher,
        all_nasher_coalition_proof: coalition_proof,
    })
}

/// Invasion test outcomes at both ends of the population simplex.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EssReport {
    /// A resident Kantian population repels an epsilon of Nashers.
    pub kantian_ess: bool,
    /// A resident Nasher population repels an epsilon of Kantians.
    pub nasher_ess: bool,
    /// Kantian mean payoff minus Nasher mean payoff at k = 1 - epsilon.
    pub payoff_gap_at_k_high: f64,
    /// The same gap at k = epsilon.
    pub payoff_gap_at_k_low: f64,
}

/// Compares mean payoffs near the two monomorphic states.
pub fn ess_check(m: &TypeGameMatrix, epsilon: f64) -> Result<EssReport> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::BadParameter(format!(
            "invasion fraction must lie in (0, 1/2), got {epsilon}"
        )));
    }
    let gap = |k: f64| {
        let (u_k, u_n) = mean_payoffs(m, k);
        u_k - u_n
    };
    let high = gap(1.0 - epsilon);
    let low = gap(epsilon);
    Ok(EssReport {
        kantian_ess: high > 0.0,
        nasher_ess: low < 0.0,
        payoff_gap_at_k_high: high,
        payoff_gap_at_k_low: low,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct TrajectorySample {
    pub t: f64,
    pub k: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminalState {
    FixationKantian,
    FixationNasher,
    Interior,
}

#[derive(Debug, Clone, Serialize)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
    pub terminal: TerminalState,
}

const FIXATION_TOL: f64 = 1e-6;

fn classify(k: f64) -> TerminalState {
    if (k - 1.0).abs() < FIXATION_TOL {
        TerminalState::FixationKantian
    } else if k.abs() < FIXATION_TOL {
        TerminalState::FixationNasher
    } else {
        TerminalState::Interior
    }
}

/// Integrates the two-type replicator equation
/// dk/dt = k (1 - k) (meanK(k) - meanN(k)) with classical fourth-order
/// fixed steps, clamping k to [0, 1]. Integration stops early once a
/// monomorphic state is reached to within 1e-6.
pub fn replicator_simulate(
    m: &TypeGameMatrix,
    k0: f64,
    dt: f64,
    steps: u64,
) -> Result<Trajectory> {
    if !(0.0..=1.0).contains(&k0) {
        return Err(Error::BadParameter(format!(
            "initial Kantian fraction must lie in [0, 1], got {k0}"
        )));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::BadParameter(format!(
            "step size must be positive and finite, got {dt}"
        )));
    }
    if steps == 0 {
        return Err(Error::BadParameter("step count must be at least 1".into()));
    }
    let f = |k: f64| {
        let (u_k, u_n) = mean_payoffs(m, k);
        k * (1.0 - k) * (u_k - u_n)
    };
    let mut k = k0;
    let mut samples = vec![TrajectorySample { t: 0.0, k }];
    for i in 0..steps {
        if classify(k) != TerminalState::Interior && i > 0 {
            break;
        }
        let k1 = f(k);
        let k2 = f((k + 0.5 * dt * k1).clamp(0.0, 1.0));
        let k3 = f((k + 0.5 * dt * k2).clamp(0.0, 1.0));
        let k4 = f((k + dt * k3).clamp(0.0, 1.0));
        k = (k + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)).clamp(0.0, 1.0);
        samples.push(TrajectorySample { t: ((i + 1) as f64) * dt, k });
    }
    Ok(Trajectory { terminal: classify(k), samples })
}
