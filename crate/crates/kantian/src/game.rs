//! Symmetric two-player games: a payoff U(own, other) shared by both
//! players, a common strategy interval, assumption validation, and the
//! Nash / Pareto landmark solvers.

use crate::error::{Error, Result};
use crate::expr::{Dual, Expr};
use crate::solve;
use serde::{Deserialize, Serialize};

/// Closed strategy interval; `hi` may be positive infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || hi.is_nan() || lo >= hi {
            return Err(Error::BadDomain(format!(
                "lower bound {lo} must be finite and below upper bound {hi}"
            )));
        }
        Ok(Interval { lo, hi })
    }

    pub fn contains(&self, x: f64) -> bool {
        // Tolerate rounding at the edges so solver output near a bound
        // remains feasible.
        let slack = 1e-12 * (1.0 + x.abs());
        x >= self.lo - slack && x <= self.hi + slack
    }

    /// Clamps to the interval; used after edge-tolerant containment.
    pub fn clamp(&self, x: f64) -> f64 {
        x.max(self.lo).min(self.hi)
    }
}

/// Numerical parameters shared by every solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Absolute interval tolerance for root bisection.
    pub tol_root: f64,
    /// Absolute interval tolerance for golden-section maximization.
    pub tol_opt: f64,
    /// Cells in coarse scans.
    pub grid_points: usize,
    /// Stands in for an infinite bound when scanning, in either unit
    /// system.
    pub domain_cap: f64,
    /// Iteration budget for bisection and golden-section loops.
    pub max_iter: usize,
    /// Upper end of the scale-factor grid used by the equilibrium
    /// oracle on the same-sign branch.
    pub a_grid_max: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol_root: 1e-10,
            tol_opt: 1e-9,
            grid_points: 512,
            domain_cap: 1e3,
            max_iter: 200,
            a_grid_max: 8.0,
        }
    }
}

/// Merge distance for nearby roots and the residual bound below which
/// a stationary-point candidate counts as exact.
pub(crate) const ROOT_MERGE: f64 = 1e-6;
pub(crate) const EXACT_FOC: f64 = 1e-9;

/// A symmetric game. Both players share `payoff`, written in terms of
/// `own` and `other`, and the same strategy interval.
#[derive(Debug, Clone)]
pub struct Game {
    name: String,
    payoff_text: String,
    payoff: Expr,
    domain: Interval,
}

impl Game {
    pub fn new(name: &str, payoff: &str, domain: Interval) -> Result<Game> {
        let expr = Expr::parse(payoff, &["own", "other"])?;
        Ok(Game { name: name.to_string(), payoff_text: payoff.to_string(), payoff: expr, domain })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn payoff_text(&self) -> &str {
        &self.payoff_text
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    /// Scan interval: the domain with an infinite upper bound replaced
    /// by the cap.
    pub fn scan_interval(&self, cfg: &SolverConfig) -> Result<Interval> {
        let hi = self.domain.hi.min(cfg.domain_cap);
        if hi <= self.domain.lo {
            return Err(Error::BadDomain(format!(
                "domain cap {} does not exceed the lower bound {}",
                cfg.domain_cap, self.domain.lo
            )));
        }
        Ok(Interval { lo: self.domain.lo, hi })
    }

    /// U(own, other). Errors if the point leaves the domain or the
    /// expression is undefined there.
    pub fn payoff(&self, own: f64, other: f64) -> Result<f64> {
        self.check_point(own)?;
        self.check_point(other)?;
        Ok(self.payoff.eval_slots(&[own, other])?)
    }

    /// Partial derivative with respect to the player's own strategy.
    pub fn d_own(&self, own: f64, other: f64) -> Result<f64> {
        self.check_point(own)?;
        self.check_point(other)?;
        Ok(self.payoff.eval_dual_slots(&[Dual::variable(own), Dual::constant(other)])?.deriv)
    }

    /// Partial derivative with respect to the opponent's strategy.
    pub fn d_other(&self, own: f64, other: f64) -> Result<f64> {
        self.check_point(own)?;
        self.check_point(other)?;
        Ok(self.payoff.eval_dual_slots(&[Dual::constant(own), Dual::variable(other)])?.deriv)
    }

    /// Derivative of the diagonal section U(x, x).
    fn d_diag(&self, x: f64) -> Result<f64> {
        self.check_point(x)?;
        Ok(self.payoff.eval_dual_slots(&[Dual::variable(x), Dual::variable(x)])?.deriv)
    }

    fn check_point(&self, x: f64) -> Result<()> {
        if !self.domain.contains(x) {
            return Err(Error::OutsideDomain {
                what: "strategy",
                value: x,
                lo: self.domain.lo,
                hi: self.domain.hi,
            });
        }
        Ok(())
    }
}

/// One named assumption check from [`validate_assumptions`].
#[derive(Debug, Clone, Serialize)]
pub struct AssumptionCheck {
    pub id: String,
    pub passed: bool,
    pub detail: String,
}

/// Outcome of validating a game against the solver assumptions.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub game: String,
    pub passed: bool,
    pub checks: Vec<AssumptionCheck>,
}

/// A game that passed validation; every solver requires one. Carries
/// a cache for the landmark solve, which everything downstream of
/// [`landmarks`] repeats otherwise.
#[derive(Debug, Clone)]
pub struct ValidatedGame {
    game: Game,
    landmark_cache: std::sync::OnceLock<(SolverConfig, Landmarks)>,
}

impl std::ops::Deref for ValidatedGame {
    type Target = Game;

    fn deref(&self) -> &Game {
        &self.game
    }
}

impl Game {
    /// Runs [`validate_assumptions`] and wraps the game on success.
    pub fn validated(self, cfg: &SolverConfig) -> Result<ValidatedGame> {
        let report = validate_assumptions(&self, cfg);
        if !report.passed {
            return Err(Error::ValidationFailed {
                game: self.name.clone(),
                failing: report
                    .checks
                    .iter()
                    .filter(|c| !c.passed)
                    .map(|c| c.id.clone())
                    .collect(),
            });
        }
        Ok(ValidatedGame { game: self, landmark_cache: std::sync::OnceLock::new() })
    }
}

/// Checks the structural assumptions the solvers rely on: the payoff
/// evaluates across the strategy square, the diagonal section has a
/// unique interior peak, the opponent's strategy moves the payoff in a
/// fixed direction, own-sections have unique maxima, and contributing
/// pays at the origin. Evaluation failures surface as failed checks
/// with the offending location.
pub fn validate_assumptions(game: &Game, cfg: &SolverConfig) -> ValidationReport {
    let mut checks = Vec::new();
    let scan = game.scan_interval(cfg);
    match scan {
        Ok(scan) => {
            checks.push(check_grid_evaluates(game, scan));
            checks.push(check_diagonal_peak(game, scan, cfg));
            checks.push(check_opponent_monotone(game, scan));
            checks.push(check_own_sections(game, scan, cfg));
            checks.push(check_origin_gain(game, scan));
        }
        Err(e) => checks.push(AssumptionCheck {
            id: "scan_interval".into(),
            passed: false,
            detail: e.to_string(),
        }),
    }
    ValidationReport {
        game: game.name.clone(),
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}

fn check_grid_evaluates(game: &Game, scan: Interval) -> AssumptionCheck {
    const N: usize = 32;
    for i in 0..=N {
        for j in 0..=N {
            let own = scan.lo + (scan.hi - scan.lo) * (i as f64) / (N as f64);
            let other = scan.lo + (scan.hi - scan.lo) * (j as f64) / (N as f64);
            if let Err(e) = game.payoff(own, other) {
                return AssumptionCheck {
                    id: "payoff_evaluates_on_grid".into(),
                    passed: false,
                    detail: format!("U({own}, {other}) failed: {e}"),
                };
            }
        }
    }
    AssumptionCheck {
        id: "payoff_evaluates_on_grid".into(),
        passed: true,
        detail: format!("{}x{} grid over [{}, {}]", N + 1, N + 1, scan.lo, scan.hi),
    }
}

fn check_diagonal_peak(game: &Game, scan: Interval, cfg: &SolverConfig) -> AssumptionCheck {
    let id = "diagonal_unique_interior_max";
    let samples = solve::sample(|x| game.payoff(x, x).ok(), scan.lo, scan.hi, cfg.grid_points);
    let Some(best) = solve::argmax(&samples) else {
        return AssumptionCheck {
            id: id.into(),
            passed: false,
            detail: "diagonal payoff infeasible everywhere".into(),
        };
    };
    let (bx, bv) = (samples[best].0, samples[best].1.unwrap());
    let span = solve::near_max_span(&samples, bv, cfg.tol_opt);
    if span > 2 {
        return AssumptionCheck {
            id: id.into(),
            passed: false,
            detail: format!("diagonal maximum is not unique (flat within {} near {bx})", cfg.tol_opt),
        };
    }
    if best == 0 || best == samples.len() - 1 {
        return AssumptionCheck {
            id: id.into(),
            passed: false,
            detail: format!("diagonal maximum sits on the boundary at {bx}"),
        };
    }
    AssumptionCheck { id: id.into(), passed: true, detail: format!("unique interior peak near {bx}") }
}

fn check_opponent_monotone(game: &Game, scan: Interval) -> AssumptionCheck {
    let id = "opponent_effect_sign_constant";
    const N: usize = 32;
    let mut sign = 0.0f64;
    for i in 0..N {
        for j in 0..N {
            // Cell-centered points keep clear of boundary blowups.
            let own = scan.lo + (scan.hi - scan.lo) * (i as f64 + 0.5) / (N as f64);
            let other = scan.lo + (scan.hi - scan.lo) * (j as f64 + 0.5) / (N as f64);
            match game.d_other(own, other) {
                Ok(d) => {
                    if d.abs() <= 1e-12 {
                        return AssumptionCheck {
                            id: id.into(),
                            passed: false,
                            detail: format!("opponent effect vanishes at ({own}, {other})"),
                        };
                    }
                    if sign == 0.0 {
                        sign = d.signum();
                    } else if d.signum() != sign {
                        return AssumptionCheck {
                            id: id.into(),
                            passed: false,
                            detail: format!("opponent effect changes sign at ({own}, {other})"),
                        };
                    }
                }
                Err(e) => {
                    return AssumptionCheck {
                        id: id.into(),
                        passed: false,
                        detail: format!("derivative failed at ({own}, {other}): {e}"),
                    }
                }
            }
        }
    }
    AssumptionCheck {
        id: id.into(),
        passed: true,
        detail: format!("sign {}", if sign > 0.0 { "+" } else { "-" }),
    }
}

fn check_own_sections(game: &Game, scan: Interval, cfg: &SolverConfig) -> AssumptionCheck {
    let id = "own_section_unique_max";
    const SECTIONS: usize = 8;
    for j in 0..SECTIONS {
        let other = scan.lo + (scan.hi - scan.lo) * (j as f64 + 0.5) / (SECTIONS as f64);
        let samples =
            solve::sample(|own| game.payoff(own, other).ok(), scan.lo, scan.hi, cfg.grid_points);
        let Some(best) = solve::argmax(&samples) else {
            return AssumptionCheck {
                id: id.into(),
                passed: false,
                detail: format!("own-section at other = {other} infeasible everywhere"),
            };
        };
        let bv = samples[best].1.unwrap();
        if solve::near_max_span(&samples, bv, cfg.tol_opt) > 2 {
            return AssumptionCheck {
                id: id.into(),
                passed: false,
                detail: format!("own-section maximum not unique at other = {other}"),
            };
        }
    }
    AssumptionCheck { id: id.into(), passed: true, detail: format!("{SECTIONS} sections checked") }
}

fn check_origin_gain(game: &Game, scan: Interval) -> AssumptionCheck {
    let id = "positive_marginal_gain_at_origin";
    // The marginal product may blow up exactly at the corner (for
    // example a square root with zero argument); step inward until the
    // derivative is defined.
    let mut delta = 0.0;
    let step = (scan.hi - scan.lo) * 1e-9;
    for _ in 0..8 {
        let x = scan.lo + delta;
        match game.d_own(x, x) {
            Ok(d) => {
                return AssumptionCheck {
                    id: id.into(),
                    passed: d > 0.0,
                    detail: format!("dU/d(own) = {d} at ({x}, {x})"),
                };
            }
            Err(_) => {
                delta = if delta == 0.0 { step } else { delta * 32.0 };
            }
        }
    }
    AssumptionCheck {
        id: id.into(),
        passed: false,
        detail: "own-derivative undefined near the origin".into(),
    }
}

/// Interior best response with a boundary flag.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BestResponse {
    pub x: f64,
    pub interior: bool,
}

/// A symmetric profile (x, x) and its payoff.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SymmetricPoint {
    pub x: f64,
    pub payoff: f64,
}

/// Nash and Pareto landmark values.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Landmarks {
    pub x_nash: f64,
    pub u_nash: f64,
    pub x_pareto: f64,
    pub u_pareto: f64,
}

/// argmax over own of U(own, opponent_x): coarse grid scan, golden
/// section on the bracketing cells, then a derivative-bisection polish
/// when the optimum is interior.
pub fn nash_best_response(
    game: &ValidatedGame,
    opponent_x: f64,
    cfg: &SolverConfig,
) -> Result<BestResponse> {
    if !game.domain().contains(opponent_x) {
        return Err(Error::OutsideDomain {
            what: "opponent strategy",
            value: opponent_x,
            lo: game.domain().lo,
            hi: game.domain().hi,
        });
    }
    let scan = game.scan_interval(cfg)?;
    let opponent_x = game.domain().clamp(opponent_x);
    let f = |own: f64| game.payoff(own, opponent_x).ok();
    let samples = solve::sample(f, scan.lo, scan.hi, cfg.grid_points);
    let best = solve::argmax(&samples)
        .ok_or_else(|| Error::NoMaximum(format!("own-section at other = {opponent_x}")))?;
    let lo = if best == 0 { samples[0].0 } else { samples[best - 1].0 };
    let hi = if best == samples.len() - 1 { samples[best].0 } else { samples[best + 1].0 };
    let (mut x, _) = solve::golden_max(f, lo, hi, cfg.tol_opt, cfg.max_iter);
    let interior = x > scan.lo + 2.0 * cfg.tol_opt && x < scan.hi - 2.0 * cfg.tol_opt;
    if interior {
        x = polish_stationary(|t| game.d_own(t, opponent_x).ok(), x, hi - lo, scan, cfg)
            .unwrap_or(x);
    }
    Ok(BestResponse { x, interior })
}

/// Best response computed in rescaled units: argmax over z of
/// U(s(z), opponent_x), reported as the z that attains it.
pub fn nash_best_response_rescaled(
    game: &ValidatedGame,
    rescaling: &crate::rescale::Rescaling,
    opponent_x: f64,
    cfg: &SolverConfig,
) -> Result<f64> {
    let z_scan = crate::rescale::feasible_z_interval(game, rescaling, cfg)?;
    let f = |z: f64| {
        let x = rescaling.apply(z).ok()?;
        game.payoff(x, opponent_x).ok()
    };
    let samples = solve::sample(f, z_scan.lo, z_scan.hi, cfg.grid_points);
    let best = solve::argmax(&samples)
        .ok_or_else(|| Error::NoMaximum("rescaled own-section".into()))?;
    let lo = if best == 0 { samples[0].0 } else { samples[best - 1].0 };
    let hi = if best == samples.len() - 1 { samples[best].0 } else { samples[best + 1].0 };
    let (z, _) = solve::golden_max(f, lo, hi, cfg.tol_opt, cfg.max_iter);
    let d = |z: f64| {
        let x = rescaling.apply(z).ok()?;
        let sp = rescaling.deriv(z).ok()?;
        Some(game.d_own(x, opponent_x).ok()? * sp)
    };
    Ok(polish_stationary(d, z, hi - lo, z_scan, cfg).unwrap_or(z))
}

/// Shrinks a stationary point bracket by bisecting the derivative.
fn polish_stationary<F>(
    d: F,
    x0: f64,
    width: f64,
    bounds: Interval,
    cfg: &SolverConfig,
) -> Option<f64>
where
    F: Fn(f64) -> Option<f64>,
{
    let a = (x0 - width).max(bounds.lo);
    let b = (x0 + width).min(bounds.hi);
    let (da, db) = (d(a)?, d(b)?);
    if da == 0.0 {
        return Some(a);
    }
    if db == 0.0 {
        return Some(b);
    }
    if (da > 0.0) == (db > 0.0) {
        return None;
    }
    let tol = cfg.tol_root.min(1e-12 * (1.0 + x0.abs()));
    solve::bisect(d, a, b, da, tol, cfg.max_iter)
}

/// Symmetric Nash equilibrium: the fixed point of the best-response
/// map, found by bisecting g(x) = BR(x) - x.
pub fn solve_nash(game: &ValidatedGame, cfg: &SolverConfig) -> Result<SymmetricPoint> {
    let scan = game.scan_interval(cfg)?;
    let g = |x: f64| nash_best_response(game, x, cfg).ok().map(|br| br.x - x);
    let roots = solve::scan_roots(&g, scan.lo, scan.hi, cfg.grid_points, cfg.tol_root, ROOT_MERGE, cfg.max_iter);
    let x = *roots.first().ok_or(Error::NoInteriorNash)?;
    let payoff = game.payoff(x, x)?;
    Ok(SymmetricPoint { x, payoff })
}

/// Maximizer of the diagonal section U(x, x): the symmetric Pareto
/// benchmark. Errors if the peak sits on the boundary.
pub fn solve_pareto(game: &ValidatedGame, cfg: &SolverConfig) -> Result<SymmetricPoint> {
    let scan = game.scan_interval(cfg)?;
    let f = |x: f64| game.payoff(x, x).ok();
    let samples = solve::sample(f, scan.lo, scan.hi, cfg.grid_points);
    let best = solve::argmax(&samples).ok_or_else(|| Error::NoMaximum("diagonal".into()))?;
    if best == 0 || best == samples.len() - 1 {
        return Err(Error::BoundaryOptimum(samples[best].0));
    }
    let (lo, hi) = (samples[best - 1].0, samples[best + 1].0);
    let (mut x, _) = solve::golden_max(f, lo, hi, cfg.tol_opt, cfg.max_iter);
    x = polish_stationary(|t| game.d_diag(t).ok(), x, hi - lo, scan, cfg).unwrap_or(x);
    let payoff = game.payoff(x, x)?;
    Ok(SymmetricPoint { x, payoff })
}

/// Both landmarks in one pass, cached per game for the common case of
/// repeated solves under one configuration.
pub fn landmarks(game: &ValidatedGame, cfg: &SolverConfig) -> Result<Landmarks> {
    if let Some((cached_cfg, lm)) = game.landmark_cache.get() {
        if cached_cfg == cfg {
            return Ok(*lm);
        }
    }
    let nash = solve_nash(game, cfg)?;
    let pareto = solve_pareto(game, cfg)?;
    let lm =
        Landmarks { x_nash: nash.x, u_nash: nash.payoff, x_pareto: pareto.x, u_pareto: pareto.payoff };
    let _ = game.landmark_cache.set((*cfg, lm));
    Ok(lm)
}

/// On-disk game description.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GameSpec {
    pub name: String,
    pub payoff: String,
    pub domain: DomainSpec,
}

/// Domain bounds; the upper bound is a number or the string "inf".
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DomainSpec {
    pub lo: f64,
    pub hi: Bound,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Bound {
    Finite(f64),
    Named(String),
}

impl Bound {
    fn value(&self) -> Result<f64> {
        match self {
            Bound::Finite(v) => Ok(*v),
            Bound::Named(s) if s == "inf" => Ok(f64::INFINITY),
            Bound::Named(s) => Err(Error::BadSpec(format!(
                "upper bound must be a number or \"inf\", got \"{s}\""
            ))),
        }
    }
}

impl Game {
    /// Builds a game from its JSON spec text.
    pub fn from_spec_str(text: &str) -> Result<Game> {
        let spec: GameSpec =
            serde_json::from_str(text).map_err(|e| Error::BadSpec(e.to_string()))?;
        Game::from_spec(&spec)
    }

    pub fn from_spec(spec: &GameSpec) -> Result<Game> {
        let domain = Interval::new(spec.domain.lo, spec.domain.hi.value()?)?;
        Game::new(&spec.name, &spec.payoff, domain)
    }

    pub fn to_spec(&self) -> GameSpec {
        GameSpec {
            name: self.name.clone(),
            payoff: self.payoff_text.clone(),
            domain: DomainSpec {
                lo: self.domain.lo,
                hi: if self.domain.hi.is_finite() {
                    Bound::Finite(self.domain.hi)
                } else {
                    Bound::Named("inf".into())
                },
            },
        }
    }
}

pub const BUILTIN_NAMES: [&str; 2] = ["linear-quadratic", "sqrt-public-good"];

/// The two bundled reference games.
pub fn builtin(name: &str) -> Result<Game> {
    match name {
        "linear-quadratic" => {
            Game::new(name, "own + other - own^2/2", Interval::new(0.0, f64::INFINITY)?)
        }
        "sqrt-public-good" => {
            Game::new(name, "sqrt(1 - own) + sqrt(own + other)", Interval::new(0.0, 1.0)?)
        }
        _ => Err(Error::UnknownBuiltin(name.to_string())),
    }
}
