//! Mixed-sign profiles use the extended deviation family: scaling the
//! positive strategy by a and the negative one by 2 - a keeps both
//! signs intact. In the public-good game under the Nash-anchored
//! shift this produces an asymmetric Kantian-Nasher equilibrium where
//! one player contributes more than the Nash level and the other
//! less, alongside the symmetric one.

use kantian::{
    builtin, branch_of, kantian_objective, select_focal, solve_kantian_nasher, verify_mke,
    Rescaling, SolverConfig,
};

fn main() -> kantian::Result<()> {
    let cfg = SolverConfig::default();
    let game = builtin("sqrt-public-good")?.validated(&cfg)?;
    let r = Rescaling::affine(1.0 / 3.0)?;

    let eqs = solve_kantian_nasher(&game, &r, &cfg)?;
    println!("equilibria under affine(1/3):");
    for e in &eqs {
        println!(
            "  z = ({:>9.6}, {:>9.6})  x = ({:.6}, {:.6})  payoffs = ({:.6}, {:.6})  branch = {:?}",
            e.z1, e.z2, e.x1, e.x2, e.u_kantian, e.u_nasher, e.branch
        );
        let v = verify_mke(&game, &r, (e.z1, e.z2), &cfg)?;
        println!("    brute-force check: {}", v.verdict);
    }
    let focal = select_focal(&eqs)?;
    println!("focal (symmetric): x = ({:.6}, {:.6})", focal.x1, focal.x2);

    // Walk the deviation family at the asymmetric equilibrium: a = 1
    // is the Kantian's argmax.
    let asym = eqs.iter().find(|e| !e.symmetric).expect("asymmetric equilibrium");
    let p = (asym.z1, asym.z2);
    println!(
        "\nscale-factor sweep at the asymmetric equilibrium ({:?} branch):",
        branch_of(p)
    );
    for a in [0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0] {
        match kantian_objective(&game, &r, p, a) {
            Ok(u) => println!("  a = {a:<5} payoff = {u:.6}"),
            Err(_) => println!("  a = {a:<5} infeasible"),
        }
    }
    Ok(())
}
