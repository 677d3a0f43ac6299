//! Builds the type-vs-type payoff matrix and examines the one-shot
//! type-choice game for a finite group. With the efficient rescaling,
//! choosing Kantian is weakly dominant and all-Nasher play is not
//! coalition-proof; with the identity rescaling the Nasher free-rides
//! and dominance fails.

use kantian::{
    build_type_matrix, builtin, check_spne, ess_check, stage_payoffs, Rescaling, SolverConfig,
};

fn main() -> kantian::Result<()> {
    let cfg = SolverConfig::default();
    let game = builtin("linear-quadratic")?.validated(&cfg)?;

    for (label, r) in [
        ("efficient", Rescaling::affine(1.0)?),
        ("identity", Rescaling::identity()),
    ] {
        let m = build_type_matrix(&game, &r, &cfg)?;
        println!("{label} rescaling:");
        println!(
            "  matrix  u_kk = {:.4}  u_kn = {:.4}  u_nk = {:.4}  u_nn = {:.4}",
            m.u_kk, m.u_kn, m.u_nk, m.u_nn
        );

        let n = 4;
        println!("  group of {n}, round-robin totals:");
        for nk in 0..=n {
            let p = stage_payoffs(n, nk, &m)?;
            let fmt = |v: Option<f64>| match v {
                Some(v) => format!("{v:.4}"),
                None => "-".into(),
            };
            println!(
                "    {nk} Kantian: pi_K = {:<8} pi_N = {}",
                fmt(p.pi_kantian),
                fmt(p.pi_nasher)
            );
        }

        let spne = check_spne(n, &m)?;
        println!(
            "  all-K equilibrium = {}, K weakly dominant = {}, all-N equilibrium = {}, all-N coalition-proof = {}",
            spne.all_kantian_equilibrium,
            spne.kantian_weakly_dominant,
            spne.all_nasher_equilibrium,
            spne.all_nasher_coalition_proof
        );

        let ess = ess_check(&m, 0.01)?;
        println!(
            "  ESS: kantian = {}, nasher = {} (payoff gaps {:+.4} at k = 0.99, {:+.4} at k = 0.01)\n",
            ess.kantian_ess, ess.nasher_ess, ess.payoff_gap_at_k_high, ess.payoff_gap_at_k_low
        );
    }
    Ok(())
}
