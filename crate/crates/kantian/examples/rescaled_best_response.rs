//! Shows how monotone strategy rescalings reshape the Kantian best
//! response while the Nash best response stays put. A rescaling
//! x = s(z) preserves Kantian best responses exactly when s'(z) z is
//! proportional to s(z); sqrt and fixed powers qualify, log and
//! affine shifts do not.

use kantian::{
    builtin, is_proportional, kantian_best_response, nash_best_response,
    nash_best_response_rescaled, Rescaling, SolverConfig,
};

fn main() -> kantian::Result<()> {
    let cfg = SolverConfig::default();
    let game = builtin("linear-quadratic")?.validated(&cfg)?;
    let rescalings = [
        Rescaling::identity(),
        Rescaling::sqrt(),
        Rescaling::power(2.0)?,
        Rescaling::log(),
        Rescaling::affine(1.0)?,
    ];

    let x2 = 1.0;
    println!("opponent plays x2 = {x2}; Kantian replies in original units:");
    for r in &rescalings {
        let z2 = r.invert(x2)?;
        let prop = is_proportional(r)?;
        let roots = kantian_best_response(&game, r, z2, &cfg)?;
        let mapped: Vec<String> = roots
            .iter()
            .map(|k| format!("{:.6}", r.apply(k.z1).unwrap()))
            .collect();
        println!(
            "  {:<28} preserves_br={:<5} replies: {}",
            format!("{:?}", r.kind()),
            prop.proportional,
            mapped.join(", ")
        );
    }

    // The Nash side is invariant under every monotone rescaling.
    let direct = nash_best_response(&game, x2, &cfg)?.x;
    println!("\nNash best response to x2 = {x2}:");
    println!("  direct:                      {direct:.6}");
    for r in &rescalings {
        let via_z = nash_best_response_rescaled(&game, r, x2, &cfg)?;
        println!("  via {:<24} {:.6}", format!("{:?}", r.kind()), r.apply(via_z)?);
    }
    Ok(())
}
