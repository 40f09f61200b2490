//! Gnuplot script emission for decay and slope CSVs.
//!
//! Scripts are self-contained and reference the CSV by path; no data is
//! embedded. Rendering is left to gnuplot so the artifact stays
//! dependency-free.

use std::path::Path;

use crate::csv_io::{read_csv, CsvFile};
use crate::error::{Error, Result};
use crate::harness::experiments::log_log_fit;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    Decay,
    Slope,
}

impl std::str::FromStr for PlotKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "decay" => Ok(PlotKind::Decay),
            "slope" => Ok(PlotKind::Slope),
            other => Err(Error::InvalidConfig(format!("unknown plot kind `{other}`"))),
        }
    }
}

fn require_columns(file: &CsvFile, names: &[&str]) -> Result<()> {
    for name in names {
        file.column_index(name)?;
    }
    Ok(())
}

/// Script for an error-decay CSV: `|delta|` against time on a log axis,
/// with a horizontal line at the `3 eps` accuracy threshold.
fn decay_script(file: &CsvFile, csv_path: &Path) -> Result<String> {
    require_columns(file, &["t", "delta_sq", "p_delta_sq", "norm_sq"])?;
    let eps: f64 = file
        .meta_value("eps")
        .ok_or_else(|| Error::InvalidConfig("decay CSV lacks `# eps = ...` metadata".into()))?
        .parse()
        .map_err(|_| Error::InvalidConfig("decay CSV has non-numeric eps metadata".into()))?;
    let csv = csv_path.display();
    let threshold = if eps > 0.0 {
        format!(
            ", {th} with lines dashtype 2 lw 2 title '3 eps = {th}'",
            th = 3.0 * eps
        )
    } else {
        String::new()
    };
    Ok(format!(
        "# Error decay plot. Render with: gnuplot <this file>\n\
         set datafile separator ','\n\
         set key autotitle columnhead\n\
         set logscale y\n\
         set xlabel 't'\n\
         set ylabel '|delta|'\n\
         set grid\n\
         plot '{csv}' using 1:(sqrt($2)) with lines lw 1 title 'filter error'{threshold}\n\
         pause -1 'press enter to close'\n"
    ))
}

/// Script for a slope CSV: asymptotic MSE against noise scale on log-log
/// axes, the fitted line, and a slope-2 reference.
fn slope_script(file: &CsvFile, csv_path: &Path) -> Result<String> {
    require_columns(file, &["eps"])?;
    let eps = file.column("eps")?;
    let mut plots: Vec<String> = Vec::new();
    let csv = csv_path.display();
    let mut fit_lines = String::new();
    let mut have_mse = false;
    for (col, label) in [("mse_time", "time average"), ("mse_ensemble", "ensemble average")] {
        if let Ok(idx) = file.column_index(col) {
            have_mse = true;
            plots.push(format!(
                "'{csv}' using 1:{} with points pointtype 7 pointsize 1.5 title '{label}'",
                idx + 1
            ));
            let mse = file.column(col)?;
            let fit = log_log_fit(&eps, &mse)?;
            let fname = format!("fit_{col}");
            fit_lines.push_str(&format!(
                "{fname}(x) = exp({intercept}) * x**({slope})\n",
                intercept = fit.intercept,
                slope = fit.slope
            ));
            plots.push(format!(
                "{fname}(x) with lines dashtype 2 title 'fit, slope {slope:.3}'",
                slope = fit.slope
            ));
        }
    }
    if !have_mse {
        return Err(Error::MissingColumn("mse_time".to_string()));
    }
    // Slope-2 reference anchored at the first data point.
    let anchor_col = if file.column_index("mse_time").is_ok() { "mse_time" } else { "mse_ensemble" };
    let anchor = file.column(anchor_col)?[0];
    let anchor_eps = eps[0];
    plots.push(format!(
        "{anchor} * (x/{anchor_eps})**2 with lines dashtype 3 title 'slope-2 reference'"
    ));
    Ok(format!(
        "# Asymptotic MSE scaling plot. Render with: gnuplot <this file>\n\
         set datafile separator ','\n\
         set key autotitle columnhead\n\
         set key top left\n\
         set logscale xy\n\
         set xlabel 'eps'\n\
         set ylabel 'asymptotic E|delta|^2'\n\
         set grid\n\
         {fit_lines}\
         plot {}\n\
         pause -1 'press enter to close'\n",
        plots.join(", \\\n     ")
    ))
}

/// Read `csv_path`, validate its header against `kind`, and return the
/// gnuplot script text.
pub fn emit_plot_script(csv_path: &Path, kind: PlotKind) -> Result<String> {
    let file = read_csv(csv_path)?;
    match kind {
        PlotKind::Decay => decay_script(&file, csv_path),
        PlotKind::Slope => slope_script(&file, csv_path),
    }
}
