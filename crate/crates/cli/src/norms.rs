use std::fs::File;
use std::io::BufWriter;

use clap::{Args, ValueEnum};
use fhw_core::norms::{besov_morrey_norm, morrey_norm, sobolev_morrey_norm, write_norm_csv, LPPartition};

use crate::config::{prepare_out_dir, ConfigArgs};
use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormKind {
    /// `M_{q,mu}` at the configured q
    Morrey,
    /// `M^s_{p,mu}`
    Sobolev,
    /// `N^s_{p,mu,r}`
    Besov,
}

#[derive(Debug, Clone, Args)]
pub struct NormsArgs {
    #[command(flatten)]
    pub cfg: ConfigArgs,
    /// Norms to evaluate, comma separated
    #[arg(long, value_enum, value_delimiter = ',', default_values = ["morrey", "besov"])]
    pub kind: Vec<NormKind>,
    /// Regularity index; defaults to the derived sigma
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<f64>,
    /// Besov summability index; omitted means the supremum
    #[arg(long)]
    pub r: Option<f64>,
}

pub fn run(args: &NormsArgs) -> Result<(), Failure> {
    let cfg = args.cfg.load()?;
    let adm = cfg.admissibility()?;
    let f = cfg.initial_data()?;
    let p = &cfg.params;
    let s = args.s.unwrap_or(adm.exponents.sigma);
    let mut reports = Vec::new();
    for kind in &args.kind {
        let rep = match kind {
            NormKind::Morrey => morrey_norm(&f, p.q, p.mu, &p.balls)?,
            NormKind::Sobolev => sobolev_morrey_norm(&f, s, p.p, p.mu, &p.balls)?,
            NormKind::Besov => {
                let part = LPPartition::new(f.grid(), None)?;
                let rep = besov_morrey_norm(&f, s, p.p, p.mu, args.r, &part, &p.balls)?;
                if let Some(w) = &rep.warning {
                    eprintln!("fhw: warning: {w}");
                }
                rep
            }
        };
        reports.push(rep);
    }
    let dir = prepare_out_dir(&cfg)?;
    let hash = cfg.hash();
    write_norm_csv(BufWriter::new(File::create(dir.join("norms.csv"))?), &reports, &hash)?;
    write_norm_csv(std::io::stdout().lock(), &reports, &hash)?;
    Ok(())
}
