//! Validates the two builtin games and prints their Nash and Pareto
//! reference points, plus a few Nash best responses.

use kantian::{builtin, landmarks, nash_best_response, SolverConfig};

fn main() -> kantian::Result<()> {
    let cfg = SolverConfig::default();
    for name in ["linear-quadratic", "sqrt-public-good"] {
        let game = builtin(name)?.validated(&cfg)?;
        let lm = landmarks(&game, &cfg)?;
        println!("{name}");
        println!("  payoff:  {}", game.payoff_text());
        println!("  domain:  [{}, {}]", game.domain().lo, game.domain().hi);
        println!("  Nash:    x = {:.6}, payoff {:.6}", lm.x_nash, lm.u_nash);
        println!("  Pareto:  x = {:.6}, payoff {:.6}", lm.x_pareto, lm.u_pareto);
        for x2 in [0.0, lm.x_nash, lm.x_pareto] {
            let br = nash_best_response(&game, x2, &cfg)?;
            println!("  Nash best response to {x2:.4} is {:.6}", br.x);
        }
        println!();
    }
    Ok(())
}
