use std::io::Write;

use clap::Args;
use fhw_core::special::{l_alpha, ml_one_with_path, ml_two_with_path};

use crate::config::hash_bytes;
use crate::Failure;

#[derive(Debug, Clone, Args)]
pub struct MlEvalArgs {
    /// Orders, comma separated
    #[arg(long, value_delimiter = ',', required = true)]
    pub alpha: Vec<f64>,
    /// Arguments x of E(-x), comma separated
    #[arg(long, value_delimiter = ',')]
    pub x: Vec<f64>,
    /// Uniform x grid `start:stop:count`
    #[arg(long)]
    pub x_range: Option<String>,
    /// Evaluate E_{alpha,b} instead of E_alpha
    #[arg(long)]
    pub two_param: bool,
    /// Second parameters for --two-param, comma separated
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub b: Vec<f64>,
    /// Evaluate the cut-integral remainder l_alpha instead
    #[arg(long, conflicts_with = "two_param")]
    pub l_alpha: bool,
}

fn parse_range(s: &str) -> Result<Vec<f64>, Failure> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || Failure::usage(format!("--x-range expects start:stop:count, got '{s}'"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let a: f64 = parts[0].parse().map_err(|_| bad())?;
    let b: f64 = parts[1].parse().map_err(|_| bad())?;
    let n: usize = parts[2].parse().map_err(|_| bad())?;
    Ok(match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    })
}

pub fn run(args: &MlEvalArgs) -> Result<(), Failure> {
    let mut xs = args.x.clone();
    if let Some(r) = &args.x_range {
        xs.extend(parse_range(r)?);
    }
    if xs.is_empty() {
        return Err(Failure::usage("give --x or --x-range"));
    }
    let hash = hash_bytes(format!("{args:?}").as_bytes());
    let mut out = std::io::stdout().lock();
    writeln!(out, "alpha,b,x,value,path_used,config_hash")?;
    for &alpha in &args.alpha {
        let bs: &[f64] = if args.two_param { &args.b } else { &[1.0] };
        for &b in bs {
            for &x in &xs {
                let (value, path) = if args.l_alpha {
                    (l_alpha(alpha, x)?, "cut_integral")
                } else if args.two_param {
                    let (v, p) = ml_two_with_path(alpha, b, x)?;
                    (v, p.as_str())
                } else {
                    let (v, p) = ml_one_with_path(alpha, x)?;
                    (v, p.as_str())
                };
                let b_col = if args.l_alpha { String::new() } else { format!("{b}") };
                writeln!(out, "{alpha},{b_col},{x},{value},{path},{hash}")?;
            }
        }
    }
    Ok(())
}
