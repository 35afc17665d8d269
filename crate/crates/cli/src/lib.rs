//! Command-line stages and the query service over a run directory.

pub mod args;
pub mod commands;
pub mod manifest;
pub mod service;

use anyhow::Result;

use args::{Cli, Command};

/// Runs one subcommand and prints its one-line summary.
pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate(a) => {
            let m = commands::generate(&a)?;
            println!(
                "generated {} forms, accepted {} ({:.2}%), seed {} -> {}",
                m.counts.generated,
                m.counts.accepted,
                100.0 * m.acceptance_rate,
                m.seed,
                a.out.display()
            );
        }
        Command::TrainSom(a) => {
            let f = commands::train_som_stage(&a)?;
            println!(
                "form-map {}x{}: {} occupied, {} gaps, QE {:.4}, TE {:.4}",
                f.grid.width,
                f.grid.height,
                f.grid.occupied(),
                f.grid.gaps(),
                f.quality.quantization_error,
                f.quality.topographic_error
            );
        }
        Command::TrainUmap(a) => {
            let e = commands::train_umap_stage(&a)?;
            println!("embedded {} forms (k={}, min-dist={})", e.points.len(), e.config.k, e.config.min_dist);
        }
        Command::Analyze(a) => {
            let r = commands::analyze_stage(&a)?;
            let counts: Vec<String> = r.class_counts.iter().map(|(c, n)| format!("{n} {}", c.label())).collect();
            println!("{} clusters, {} noise points; parameters: {}", r.cluster_count, r.noise, counts.join(", "));
        }
        Command::Sensitivity(a) => {
            let r = commands::sensitivity_stage(&a)?;
            println!(
                "clusters: baseline {} vs override {}; {} class changes",
                r.baseline_cluster_count,
                r.override_cluster_count,
                r.class_changes.len()
            );
        }
        Command::Serve(a) => {
            let service = std::sync::Arc::new(service::Service::load(&a.run, a.queue)?);
            service::serve(service, &a.addr, a.common.workers().max(2))?;
        }
    }
    Ok(())
}
