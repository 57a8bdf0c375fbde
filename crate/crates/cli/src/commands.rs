use std::fmt::Write as _;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use amfem::adapt::{loglog_fit, run_amfem, run_uniform, IterationRecord, RunFailure, Step};
use amfem::mesh::write_vtk;
use amfem::mixed::assemble;
use amfem::problem::variants;

use crate::config::{Mode, RunConfig};
use crate::history::{format_float, read_history, write_atomic, write_history, HistoryError};

#[derive(Debug, thiserror::Error)]
pub enum CommandError {
    #[error("run failed: {0}")]
    Run(#[from] RunFailure),
    #[error(transparent)]
    History(#[from] HistoryError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Input(String),
}

pub const HISTORY_FILE: &str = "history.csv";

/// Runs one benchmark, writing `history.csv` after every iteration and the
/// optional VTK and matrix dumps into `config.out`.
pub fn cmd_run(config: &RunConfig, mut progress: impl FnMut(&IterationRecord)) -> Result<Vec<IterationRecord>, CommandError> {
    std::fs::create_dir_all(&config.out)?;
    let spec = config.benchmark.spec();
    let csv_path = config.out.join(HISTORY_FILE);
    let mut history: Vec<IterationRecord> = Vec::new();
    let on_step = |step: &Step| -> amfem::Result<()> {
        let k = step.record.k;
        if config.vtk_every > 0 && (k - 1) % config.vtk_every == 0 {
            let path = config.out.join(format!("mesh_{k}.vtk"));
            let eta = step.estimator.indicators();
            let mut w = BufWriter::new(File::create(path)?);
            write_vtk(
                step.mesh,
                &mut w,
                &format!("{} iteration {k}", spec.name),
                &[("p_h", &step.solution.pressure), ("eta", &eta)],
                &[],
            )?;
        }
        if config.dump_matrix {
            let var = variants(step.mesh, &spec)?;
            let system = assemble(step.mesh, &spec, &var)?;
            let mut w = BufWriter::new(File::create(config.out.join(format!("system_{k}.mtx")))?);
            system.matrix.write_matrix_market(&mut w)?;
        }
        history.push(step.record.clone());
        write_atomic(&csv_path, |f| write_history(&history, f))
            .map_err(|e| amfem::Error::Io(std::io::Error::other(e.to_string())))?;
        progress(step.record);
        Ok(())
    };
    let result = match config.mode {
        Mode::Adaptive => run_amfem(&spec, &config.adapt, on_step),
        Mode::Uniform => run_uniform(&spec, &config.adapt, on_step),
    };
    Ok(result?.history)
}

fn cell(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.4}")).unwrap_or_else(|| "\u{2212}".to_string())
}

/// Fixed-width table with columns k, DOF, e_k, eta_k, EOC_E, EOC_eta.
pub fn render_table(records: &[IterationRecord]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:>4} {:>9} {:>12} {:>12} {:>8} {:>8}", "k", "DOF", "e_k", "eta_k", "EOC_E", "EOC_eta");
    for r in records {
        let _ = writeln!(
            s,
            "{:>4} {:>9} {:>12} {:>12} {:>8} {:>8}",
            r.k,
            r.ndof,
            cell(r.error),
            cell(Some(r.eta)),
            cell(r.eoc_e),
            cell(r.eoc_eta)
        );
    }
    s
}

pub fn cmd_table(path: &Path) -> Result<String, CommandError> {
    Ok(render_table(&read_history(path)?))
}

/// Long-format `series,ndof,error,eta` with a fitted log-log slope per series
/// in trailing comment lines.
pub fn cmd_compare(inputs: &[(String, PathBuf)]) -> Result<String, CommandError> {
    let mut body = String::from("series,ndof,error,eta\n");
    let mut footer = String::new();
    for (label, path) in inputs {
        let recs = read_history(path)?;
        if recs.is_empty() {
            return Err(CommandError::Input(format!("{}: empty history", path.display())));
        }
        for r in &recs {
            let _ = writeln!(
                body,
                "{label},{},{},{}",
                r.ndof,
                r.error.map(format_float).unwrap_or_default(),
                format_float(r.eta)
            );
        }
        let x: Vec<f64> = recs.iter().map(|r| r.ndof as f64).collect();
        let eta: Vec<f64> = recs.iter().map(|r| r.eta).collect();
        let slope = |y: &[f64]| loglog_fit(&x, y).map(|(s, _)| format!("{s:.4}")).unwrap_or_default();
        let err_slope = if recs.iter().all(|r| r.error.is_some()) {
            slope(&recs.iter().map(|r| r.error.unwrap()).collect::<Vec<_>>())
        } else {
            String::new()
        };
        let _ = writeln!(footer, "# slope {label} error={err_slope} eta={}", slope(&eta));
    }
    body.push_str(&footer);
    Ok(body)
}

pub fn bench_list() -> String {
    let mut s = String::new();
    for name in amfem::problem::Benchmark::names() {
        let b = amfem::problem::Benchmark::parse(name, None).expect("listed benchmark parses");
        let eps = b.epsilon().map(|e| format!(" epsilon={e}")).unwrap_or_default();
        let _ = writeln!(s, "{name:<16} theta={}{eps}", b.default_theta());
    }
    s
}
