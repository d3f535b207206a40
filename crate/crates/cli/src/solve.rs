use std::fs::File;
use std::io::{BufWriter, Write};

use clap::Args;
use fhw_core::grid::fhwg;
use fhw_core::norms::morrey_norm;
use fhw_core::solver::MildSolver;
use fhw_core::FhwError;

use crate::config::{prepare_out_dir, ConfigArgs};
use crate::Failure;

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub cfg: ConfigArgs,
    /// Global Picard iteration instead of time marching
    #[arg(long)]
    pub picard: bool,
}

pub fn run(args: &SolveArgs) -> Result<(), Failure> {
    let cfg = args.cfg.load()?;
    let adm = cfg.require_admissible(args.cfg.force)?;
    if cfg.output.stride == 0 {
        return Err(Failure::usage("stride must be at least 1"));
    }
    let model = cfg.model()?;
    let u0 = cfg.initial_data()?;
    let tgrid = cfg.tgrid()?;
    let dir = prepare_out_dir(&cfg)?;
    let hash = cfg.hash();
    let solver = MildSolver::new(model, u0.grid().clone(), tgrid)?;
    let tol = &cfg.tolerances;
    let traj = if args.picard {
        match solver.picard(&u0, tol.max_iter, tol.picard_tol) {
            Ok((traj, report)) => {
                std::fs::write(
                    dir.join("picard_report.json"),
                    serde_json::to_string_pretty(&report).expect("report serializes"),
                )?;
                traj
            }
            Err(e) => {
                if let FhwError::NonConvergence { report, .. } = &e {
                    std::fs::write(
                        dir.join("picard_report.json"),
                        serde_json::to_string_pretty(report).expect("report serializes"),
                    )?;
                }
                return Err(e.into());
            }
        }
    } else {
        solver.march(&u0, tol.corrector_iters)?
    };

    let p = &cfg.params;
    let eta = adm.exponents.eta;
    let mut manifest = BufWriter::new(File::create(dir.join("manifest.csv"))?);
    writeln!(manifest, "node,t,l2,linf,morrey,weighted_morrey,snapshot,config_hash")?;
    let last = tgrid.steps();
    for (k, u) in traj.nodes().iter().enumerate() {
        let snapshot = if k % cfg.output.stride == 0 || k == last {
            let name = format!("snap_{k:05}.fhwg");
            fhwg::write_file(dir.join(&name), u)?;
            name
        } else {
            String::new()
        };
        let t = traj.time(k);
        let m = morrey_norm(u, p.q, p.mu, &p.balls)?.value;
        writeln!(
            manifest,
            "{k},{t:.17e},{:.17e},{:.17e},{m:.17e},{:.17e},{snapshot},{hash}",
            u.l2_norm(),
            u.sup_norm(),
            t.powf(eta) * m
        )?;
    }
    manifest.flush()?;
    println!(
        "{} nodes to T = {}, sup norm {:e}; output in {}",
        last + 1,
        tgrid.horizon(),
        traj.sup_norm(),
        dir.display()
    );
    Ok(())
}
