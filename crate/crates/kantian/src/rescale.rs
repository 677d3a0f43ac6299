//! Strategy rescalings x = s(z): strictly monotone reparameterizations
//! of the strategy space. Kantian optimization is performed in z-units,
//! so the choice of s changes best responses unless s'(z)·z is
//! proportional to s(z). The efficient rescaling pins s(0) at the Nash
//! strategy, which makes "do nothing" mean "play Nash".

use crate::error::{Error, Result};
use crate::expr::{Dual, Expr};
use crate::game::{landmarks, Interval, SolverConfig, ValidatedGame};
use serde::{Deserialize, Serialize};

/// Supported transform families.
#[derive(Debug, Clone)]
pub enum RescalingKind {
    /// x = z.
    Identity,
    /// x = z + shift.
    Affine { shift: f64 },
    /// x = ln z on z >= 1.
    Log,
    /// x = sqrt(z) on z >= 0.
    Sqrt,
    /// x = z^exponent on z >= 0, exponent > 0.
    Power { exponent: f64 },
    /// User-supplied forward map over the variable `z`.
    Custom { forward: Expr },
}

/// A strictly monotone rescaling with its natural z-domain.
#[derive(Debug, Clone)]
pub struct Rescaling {
    kind: RescalingKind,
    z_domain: Interval,
    increasing: bool,
}

/// Grid used for monotonicity and proportionality checks.
const CHECK_GRID: usize = 1024;
/// Finite stand-in for unbounded z when gridding standalone checks.
const CHECK_SPAN: f64 = 1e3;

impl Rescaling {
    pub fn identity() -> Rescaling {
        Rescaling {
            kind: RescalingKind::Identity,
            z_domain: Interval { lo: f64::NEG_INFINITY, hi: f64::INFINITY },
            increasing: true,
        }
    }

    pub fn affine(shift: f64) -> Result<Rescaling> {
        if !shift.is_finite() {
            return Err(Error::BadRescaling("affine shift must be finite".into()));
        }
        Ok(Rescaling {
            kind: RescalingKind::Affine { shift },
            z_domain: Interval { lo: f64::NEG_INFINITY, hi: f64::INFINITY },
            increasing: true,
        })
    }

    pub fn log() -> Rescaling {
        Rescaling {
            kind: RescalingKind::Log,
            z_domain: Interval { lo: 1.0, hi: f64::INFINITY },
            increasing: true,
        }
    }

    pub fn sqrt() -> Rescaling {
        Rescaling {
            kind: RescalingKind::Sqrt,
            z_domain: Interval { lo: 0.0, hi: f64::INFINITY },
            increasing: true,
        }
    }

    pub fn power(exponent: f64) -> Result<Rescaling> {
        if !(exponent.is_finite() && exponent > 0.0) {
            return Err(Error::BadRescaling(format!(
                "power exponent must be positive, got {exponent}"
            )));
        }
        Ok(Rescaling {
            kind: RescalingKind::Power { exponent },
            z_domain: Interval { lo: 0.0, hi: f64::INFINITY },
            increasing: true,
        })
    }

    /// Custom forward map, checked for strict monotonicity on a grid
    /// over the (finite) z-domain.
    pub fn custom(forward: Expr, z_domain: Interval) -> Result<Rescaling> {
        if forward.variables() != ["z".to_string()] {
            return Err(Error::BadRescaling("custom forward map must use the variable `z`".into()));
        }
        if !z_domain.lo.is_finite() || !z_domain.hi.is_finite() {
            return Err(Error::BadRescaling("custom rescaling needs a finite z_domain".into()));
        }
        let mut sign = 0.0f64;
        for i in 0..CHECK_GRID {
            // Cell centers: endpoint derivatives may legitimately blow up.
            let z = z_domain.lo
                + (z_domain.hi - z_domain.lo) * (i as f64 + 0.5) / (CHECK_GRID as f64);
            let d = forward
                .eval_dual_slots(&[Dual::variable(z)])
                .map_err(|_| Error::NotMonotone)?
                .deriv;
            if d.abs() <= 1e-12 {
                return Err(Error::NotMonotone);
            }
            if sign == 0.0 {
                sign = d.signum();
            } else if d.signum() != sign {
                return Err(Error::NotMonotone);
            }
        }
        Ok(Rescaling { kind: RescalingKind::Custom { forward }, z_domain, increasing: sign > 0.0 })
    }

    pub fn kind(&self) -> &RescalingKind {
        &self.kind
    }

    pub fn z_domain(&self) -> Interval {
        self.z_domain
    }

    pub fn is_increasing(&self) -> bool {
        self.increasing
    }

    fn check_z(&self, z: f64) -> Result<()> {
        if !self.z_domain.contains(z) {
            return Err(Error::OutsideDomain {
                what: "rescaled strategy",
                value: z,
                lo: self.z_domain.lo,
                hi: self.z_domain.hi,
            });
        }
        Ok(())
    }

    /// Forward map x = s(z).
    pub fn apply(&self, z: f64) -> Result<f64> {
        self.check_z(z)?;
        Ok(match &self.kind {
            RescalingKind::Identity => z,
            RescalingKind::Affine { shift } => z + shift,
            RescalingKind::Log => z.max(1.0).ln(),
            RescalingKind::Sqrt => z.max(0.0).sqrt(),
            RescalingKind::Power { exponent } => z.max(0.0).powf(*exponent),
            RescalingKind::Custom { forward } => forward.eval_slots(&[z])?,
        })
    }

    /// Inverse map z = s^{-1}(x); bisection for custom transforms.
    pub fn invert(&self, x: f64) -> Result<f64> {
        match &self.kind {
            RescalingKind::Identity => Ok(x),
            RescalingKind::Affine { shift } => Ok(x - shift),
            RescalingKind::Log => {
                if x < 0.0 {
                    return Err(Error::ValueNotAttained(x));
                }
                Ok(x.exp())
            }
            RescalingKind::Sqrt => {
                if x < 0.0 {
                    return Err(Error::ValueNotAttained(x));
                }
                Ok(x * x)
            }
            RescalingKind::Power { exponent } => {
                if x < 0.0 {
                    return Err(Error::ValueNotAttained(x));
                }
                Ok(x.powf(1.0 / exponent))
            }
            RescalingKind::Custom { .. } => self.invert_by_bisection(x),
        }
    }

    fn invert_by_bisection(&self, x: f64) -> Result<f64> {
        let (mut a, mut b) = (self.z_domain.lo, self.z_domain.hi);
        let f = |z: f64| self.apply(z).ok().map(|v| v - x);
        let (mut fa, mut fb) = (f(a), f(b));
        // Nudge off endpoints where the map is undefined.
        let h = (b - a) * 1e-9;
        if fa.is_none() {
            a += h;
            fa = f(a);
        }
        if fb.is_none() {
            b -= h;
            fb = f(b);
        }
        let (fa, fb) = match (fa, fb) {
            (Some(fa), Some(fb)) => (fa, fb),
            _ => return Err(Error::ValueNotAttained(x)),
        };
        if fa == 0.0 {
            return Ok(a);
        }
        if fb == 0.0 {
            return Ok(b);
        }
        if (fa > 0.0) == (fb > 0.0) {
            return Err(Error::ValueNotAttained(x));
        }
        let tol = 1e-13 * (1.0 + a.abs().max(b.abs()));
        crate::solve::bisect(f, a, b, fa, tol, 200).ok_or(Error::ValueNotAttained(x))
    }

    /// Derivative s'(z).
    pub fn deriv(&self, z: f64) -> Result<f64> {
        self.check_z(z)?;
        Ok(match &self.kind {
            RescalingKind::Identity | RescalingKind::Affine { .. } => 1.0,
            RescalingKind::Log => 1.0 / z,
            RescalingKind::Sqrt => {
                if z == 0.0 {
                    return Err(Error::Eval(crate::expr::EvalError::DerivativeUndefined {
                        op: "sqrt",
                        at: 0.0,
                    }));
                }
                0.5 / z.sqrt()
            }
            RescalingKind::Power { exponent } => {
                if z == 0.0 && *exponent < 1.0 {
                    return Err(Error::Eval(crate::expr::EvalError::DerivativeUndefined {
                        op: "pow",
                        at: 0.0,
                    }));
                }
                exponent * z.powf(exponent - 1.0)
            }
            RescalingKind::Custom { forward } => {
                forward.eval_dual_slots(&[Dual::variable(z)])?.deriv
            }
        })
    }

    /// The product s'(z)·z that multiplies each first-order-condition
    /// term, with exact limits where s' alone blows up (sqrt and
    /// power at z = 0).
    pub fn deriv_times_z(&self, z: f64) -> Result<f64> {
        self.check_z(z)?;
        Ok(match &self.kind {
            RescalingKind::Identity | RescalingKind::Affine { .. } => z,
            RescalingKind::Log => 1.0,
            RescalingKind::Sqrt => 0.5 * z.max(0.0).sqrt(),
            RescalingKind::Power { exponent } => exponent * z.max(0.0).powf(*exponent),
            RescalingKind::Custom { forward } => {
                forward.eval_dual_slots(&[Dual::variable(z)])?.deriv * z
            }
        })
    }
}

/// Proportionality verdict: whether s'(z)·z is a constant multiple of
/// s(z) across the checked grid.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ProportionalityReport {
    pub proportional: bool,
    pub max_relative_spread: f64,
}

/// Tests s'(z)·z ∝ s(z) on a grid, excluding zeros of s. Best
/// responses survive the rescaling untouched exactly when this holds.
pub fn is_proportional(r: &Rescaling) -> Result<ProportionalityReport> {
    let lo = r.z_domain.lo.max(-CHECK_SPAN);
    let hi = r.z_domain.hi.min(CHECK_SPAN);
    let mut ratios: Vec<f64> = Vec::new();
    for i in 0..CHECK_GRID {
        let z = lo + (hi - lo) * (i as f64 + 0.5) / (CHECK_GRID as f64);
        let (Ok(s), Ok(dz)) = (r.apply(z), r.deriv_times_z(z)) else { continue };
        if s.abs() <= 1e-9 {
            continue;
        }
        ratios.push(dz / s);
    }
    if ratios.is_empty() {
        return Err(Error::BadRescaling("transform vanishes on the whole check grid".into()));
    }
    let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let scale = ratios.iter().map(|r| r.abs()).fold(0.0f64, f64::max).max(1e-12);
    let spread = (max - min) / scale;
    Ok(ProportionalityReport { proportional: spread <= 1e-6, max_relative_spread: spread })
}

/// The rescaling that anchors inaction at the Nash strategy:
/// x = z + x^N, so s(0) = x^N exactly.
pub fn efficient_rescaling(game: &ValidatedGame, cfg: &SolverConfig) -> Result<Rescaling> {
    let lm = landmarks(game, cfg)?;
    Rescaling::affine(lm.x_nash)
}

/// z-interval actually searchable for a given game: the rescaling's
/// natural domain intersected with the preimage of the game's strategy
/// interval, with infinities replaced by the cap in z-units.
pub fn feasible_z_interval(
    game: &ValidatedGame,
    r: &Rescaling,
    cfg: &SolverConfig,
) -> Result<Interval> {
    let scan = game.scan_interval(cfg)?;
    let (pre_lo, pre_hi) = if r.is_increasing() {
        (r.invert(scan.lo), r.invert(scan.hi))
    } else {
        (r.invert(scan.hi), r.invert(scan.lo))
    };
    let mut lo = r.z_domain.lo;
    let mut hi = r.z_domain.hi;
    if let Ok(v) = pre_lo {
        lo = lo.max(v);
    }
    if let Ok(v) = pre_hi {
        hi = hi.min(v);
    }
    lo = lo.max(-cfg.domain_cap);
    hi = hi.min(cfg.domain_cap);
    if lo.partial_cmp(&hi) != Some(std::cmp::Ordering::Less) {
        return Err(Error::BadRescaling(format!(
            "no feasible z-interval: [{lo}, {hi}] after intersecting domains"
        )));
    }
    Ok(Interval { lo, hi })
}

/// On-disk rescaling description.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RescalingSpec {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shift: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponent: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub forward: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z_domain: Option<[f64; 2]>,
}

impl Rescaling {
    /// Builds a rescaling from its JSON spec text.
    pub fn from_spec_str(text: &str) -> Result<Rescaling> {
        let spec: RescalingSpec =
            serde_json::from_str(text).map_err(|e| Error::BadSpec(e.to_string()))?;
        Rescaling::from_spec(&spec)
    }

    pub fn from_spec(spec: &RescalingSpec) -> Result<Rescaling> {
        match spec.kind.as_str() {
            "identity" => Ok(Rescaling::identity()),
            "affine" => {
                let shift = spec
                    .shift
                    .ok_or_else(|| Error::BadSpec("affine rescaling needs `shift`".into()))?;
                Rescaling::affine(shift)
            }
            "log" => Ok(Rescaling::log()),
            "sqrt" => Ok(Rescaling::sqrt()),
            "power" => {
                let exponent = spec
                    .exponent
                    .ok_or_else(|| Error::BadSpec("power rescaling needs `exponent`".into()))?;
                Rescaling::power(exponent)
            }
            "custom" => {
                let text = spec
                    .forward
                    .as_ref()
                    .ok_or_else(|| Error::BadSpec("custom rescaling needs `forward`".into()))?;
                let [lo, hi] = spec
                    .z_domain
                    .ok_or_else(|| Error::BadSpec("custom rescaling needs `z_domain`".into()))?;
                let forward = Expr::parse(text, &["z"])?;
                Rescaling::custom(forward, Interval::new(lo, hi)?)
            }
            other => Err(Error::BadSpec(format!("unknown rescaling kind `{other}`"))),
        }
    }

    pub fn to_spec(&self) -> RescalingSpec {
        let mut spec = RescalingSpec {
            kind: String::new(),
            shift: None,
            exponent: None,
            forward: None,
            z_domain: None,
        };
        match &self.kind {
            RescalingKind::Identity => spec.kind = "identity".into(),
            RescalingKind::Affine { shift } => {
                spec.kind = "affine".into();
                spec.shift = Some(*shift);
            }
            RescalingKind::Log => spec.kind = "log".into(),
            RescalingKind::Sqrt => spec.kind = "sqrt".into(),
            RescalingKind::Power { exponent } => {
                spec.kind = "power".into();
                spec.exponent = Some(*exponent);
            }
            RescalingKind::Custom { forward } => {
                spec.kind = "custom".into();
                spec.forward = Some(forward.to_string());
                spec.z_domain = Some([self.z_domain.lo, self.z_domain.hi]);
            }
        }
        spec
    }
}
