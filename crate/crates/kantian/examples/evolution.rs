//! Integrates the two-type replicator dynamic. Under the efficient
//! rescaling Kantians earn strictly more whenever any of them are
//! around, so every interior starting point fixes the Kantian type;
//! under the identity rescaling the free-riding Nasher wins instead.

use kantian::{build_type_matrix, builtin, replicator_simulate, Rescaling, SolverConfig};

fn main() -> kantian::Result<()> {
    let cfg = SolverConfig::default();
    let game = builtin("linear-quadratic")?.validated(&cfg)?;
    for (label, r) in [
        ("efficient", Rescaling::affine(1.0)?),
        ("identity", Rescaling::identity()),
    ] {
        let m = build_type_matrix(&game, &r, &cfg)?;
        println!("{label} rescaling:");
        for k0 in [0.1, 0.5, 0.9] {
            let tr = replicator_simulate(&m, k0, 0.01, 1_000_000)?;
            let last = tr.samples.last().expect("at least the initial sample");
            println!(
                "  k0 = {k0}: {:?} at t = {:.2} after {} samples",
                tr.terminal,
                last.t,
                tr.samples.len()
            );
        }
    }
    Ok(())
}
