use clap::Args;
use fhw_core::scaling::beta_identity_check;

use crate::config::ConfigArgs;
use crate::Failure;

#[derive(Debug, Clone, Args)]
pub struct ParamsArgs {
    #[command(flatten)]
    pub cfg: ConfigArgs,
    /// Print the report as JSON
    #[arg(long)]
    pub json: bool,
}

pub fn run(args: &ParamsArgs) -> Result<(), Failure> {
    let cfg = args.cfg.load()?;
    let adm = cfg.admissibility()?;
    let (alpha, rho) = (cfg.model.alpha, cfg.model.rho);
    let beta = beta_identity_check(&adm.exponents, alpha, rho)?;
    if args.json {
        let v = serde_json::json!({ "admissibility": adm, "beta": beta, "config_hash": cfg.hash() });
        println!("{}", serde_json::to_string_pretty(&v).expect("report serializes"));
        return Ok(());
    }
    let p = &cfg.params;
    println!(
        "n = {}, alpha = {alpha}, rho = {rho}, p = {}, q = {}, mu = {}",
        cfg.space.n, p.p, p.q, p.mu
    );
    println!("admissible: {}", if adm.admissible { "yes" } else { "no" });
    for c in &adm.conditions {
        println!("  [{}] {:<15} {}", if c.holds { "ok" } else { "FAIL" }, c.name, c.detail);
    }
    let e = &adm.exponents;
    println!("exponents:");
    println!("  eta     = {}", e.eta);
    println!("  sigma   = {}", e.sigma);
    println!("  gamma1  = {}", e.gamma1);
    println!("  gamma2  = {}", e.gamma2);
    println!("  l       = {}", e.l);
    println!("  s_tilde = {}", e.s_tilde);
    println!("identity residuals: {:e}, {:e}", beta.residual1, beta.residual2);
    match beta.betas {
        Some([b1, b2, b3]) => println!("beta factors: {b1}, {b2}, {b3}"),
        None => println!("beta factors: {}", beta.note.as_deref().unwrap_or("not evaluated")),
    }
    println!("config hash: {}", cfg.hash());
    Ok(())
}
