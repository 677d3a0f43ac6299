//! Defines a game and a rescaling from JSON specs, the same formats
//! the command-line tool reads, then runs the full pipeline on them:
//! validation, landmarks, the efficient rescaling, and the
//! Kantian-Nasher equilibrium set.

use kantian::{
    efficient_rescaling, landmarks, solve_kantian_nasher, validate_assumptions, Game, Rescaling,
    SolverConfig,
};

fn main() -> kantian::Result<()> {
    let cfg = SolverConfig::default();
    let game = Game::from_spec_str(
        r#"{
            "name": "shared-harvest",
            "payoff": "sqrt(own + other) - own^2 / 4",
            "domain": { "lo": 0.0, "hi": 4.0 }
        }"#,
    )?;

    let report = validate_assumptions(&game, &cfg);
    for check in &report.checks {
        println!("{:<36} {}", check.id, if check.passed { "ok" } else { "FAIL" });
    }
    let game = game.validated(&cfg)?;

    let lm = landmarks(&game, &cfg)?;
    println!(
        "\nNash x = {:.6} (payoff {:.6}), Pareto x = {:.6} (payoff {:.6})",
        lm.x_nash, lm.u_nash, lm.x_pareto, lm.u_pareto
    );

    let r = efficient_rescaling(&game, &cfg)?;
    println!("efficient rescaling: {:?}", r.kind());
    for e in solve_kantian_nasher(&game, &r, &cfg)? {
        println!(
            "  equilibrium x = ({:.6}, {:.6}), payoffs = ({:.6}, {:.6}), symmetric = {}",
            e.x1, e.x2, e.u_kantian, e.u_nasher, e.symmetric
        );
    }

    // A handwritten monotone map also works as a rescaling.
    let r = Rescaling::from_spec_str(
        r#"{ "kind": "custom", "forward": "z^3 + z", "z_domain": [0.0, 1.5] }"#,
    )?;
    let z2 = r.invert(lm.x_nash)?;
    let roots = kantian::kantian_best_response(&game, &r, z2, &cfg)?;
    println!("\ncustom rescaling replies to the Nash point:");
    for k in roots {
        println!("  z1 = {:.6} maps to x1 = {:.6}", k.z1, r.apply(k.z1)?);
    }
    Ok(())
}
