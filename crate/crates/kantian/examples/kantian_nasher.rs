//! The mixed-protocol game: player 1 optimizes Kantian-style in
//! rescaled units, player 2 best-responds the ordinary way. Under
//! generic rescalings the Nasher free-rides on the Kantian; shifting
//! the origin to the Nash point removes the wedge and the equilibrium
//! becomes symmetric with both players at the Nash payoff.

use kantian::{builtin, solve_kantian_nasher, Rescaling, SolverConfig};

fn main() -> kantian::Result<()> {
    let cfg = SolverConfig::default();
    let game = builtin("linear-quadratic")?.validated(&cfg)?;
    let cases = [
        ("identity", Rescaling::identity()),
        ("log", Rescaling::log()),
        ("sqrt", Rescaling::sqrt()),
        ("affine(x_nash)", Rescaling::affine(1.0)?),
    ];
    println!("{:<16} {:>10} {:>10} {:>12} {:>12}", "rescaling", "x1", "x2", "u_kantian", "u_nasher");
    for (label, r) in cases {
        for e in solve_kantian_nasher(&game, &r, &cfg)? {
            println!(
                "{:<16} {:>10.6} {:>10.6} {:>12.6} {:>12.6}{}",
                label,
                e.x1,
                e.x2,
                e.u_kantian,
                e.u_nasher,
                if e.symmetric { "  (symmetric)" } else { "" }
            );
        }
    }
    Ok(())
}
