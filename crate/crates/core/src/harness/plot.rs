//! gnuplot script stubs for a finished run.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::experiment::{Manifest, PlotKind, PlotSpec};
use crate::error::{Error, Result};

/// Write one `<name>.gp` per plot listed in `dir/manifest.json`, plus
/// `<name>_ref.dat` guide lines (CSV) for log-log plots with reference slopes.
/// Nothing is written unless every plot can be produced.
pub fn emit_plot_data(dir: &Path) -> Result<Vec<PathBuf>> {
    let manifest = Manifest::load(&dir.join("manifest.json"))?;
    if manifest.plots.is_empty() {
        return Err(Error::Manifest("manifest lists no plots".into()));
    }
    let mut files = Vec::new();
    for plot in &manifest.plots {
        let data = dir.join(&plot.data);
        if !data.is_file() {
            return Err(Error::Manifest(format!(
                "plot `{}` refers to missing {}",
                plot.name, plot.data
            )));
        }
        if plot.kind != PlotKind::Image && plot.series.is_empty() {
            return Err(Error::Manifest(format!("plot `{}` has no series", plot.name)));
        }
        let reference = if plot.reference_slopes.is_empty() {
            None
        } else {
            let text = std::fs::read_to_string(&data).map_err(|e| Error::io(&data, e))?;
            Some(reference_lines(plot, &text)?)
        };
        files.push((plot, reference));
    }
    let mut written = Vec::new();
    for (plot, reference) in files {
        if let Some(refdata) = &reference {
            let path = dir.join(format!("{}_ref.dat", plot.name));
            std::fs::write(&path, refdata).map_err(|e| Error::io(&path, e))?;
            written.push(path);
        }
        let path = dir.join(format!("{}.gp", plot.name));
        std::fs::write(&path, script(plot, reference.is_some())).map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

/// Endpoints of lines `y ∝ x^s` through the geometric centre of the first
/// series, one column per slope.
fn reference_lines(plot: &PlotSpec, csv: &str) -> Result<String> {
    let s = &plot.series[0];
    let pts: Vec<(f64, f64)> = csv
        .lines()
        .skip(1)
        .filter_map(|line| {
            let cols: Vec<&str> = line.split(',').collect();
            let x: f64 = cols.get(s.x - 1)?.trim().parse().ok()?;
            let y: f64 = cols.get(s.y - 1)?.trim().parse().ok()?;
            (x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite()).then_some((x, y))
        })
        .collect();
    if pts.is_empty() {
        return Err(Error::Manifest(format!(
            "plot `{}` has no positive data for guide lines",
            plot.name
        )));
    }
    let n = pts.len() as f64;
    let lx = pts.iter().map(|p| p.0.ln()).sum::<f64>() / n;
    let ly = pts.iter().map(|p| p.1.ln()).sum::<f64>() / n;
    let x_lo = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let x_hi = pts.iter().map(|p| p.0).fold(0.0, f64::max);
    let mut out = String::from("x");
    for slope in &plot.reference_slopes {
        write!(out, ",slope{slope}").unwrap();
    }
    out.push('\n');
    for x in [x_lo, x_hi] {
        write!(out, "{x:e}").unwrap();
        for slope in &plot.reference_slopes {
            write!(out, ",{:e}", (ly + slope * (x.ln() - lx)).exp()).unwrap();
        }
        out.push('\n');
    }
    Ok(out)
}

fn script(plot: &PlotSpec, has_reference: bool) -> String {
    let mut s = String::new();
    writeln!(s, "set terminal pngcairo size 800,600").unwrap();
    writeln!(s, "set output '{}.png'", plot.name).unwrap();
    writeln!(s, "set title \"{}\"", plot.title).unwrap();
    writeln!(s, "set xlabel \"{}\"", plot.xlabel).unwrap();
    writeln!(s, "set ylabel \"{}\"", plot.ylabel).unwrap();
    if plot.kind == PlotKind::Image {
        writeln!(s, "# axes: see {}", plot.meta.as_deref().unwrap_or("-")).unwrap();
        writeln!(s, "set xrange [0:2*pi]\nset yrange [-pi:pi]").unwrap();
        writeln!(s, "stats '{}' matrix nooutput", plot.data).unwrap();
        writeln!(
            s,
            "plot '{}' matrix using ($1*2*pi/STATS_size_x):(-pi+$2*2*pi/STATS_size_y):3 with image notitle",
            plot.data
        )
        .unwrap();
        return s;
    }
    writeln!(s, "set datafile separator ','").unwrap();
    match plot.kind {
        PlotKind::LogLog => writeln!(s, "set logscale xy").unwrap(),
        PlotKind::SemilogY => writeln!(s, "set logscale y").unwrap(),
        _ => {}
    }
    let mut parts: Vec<String> = plot
        .series
        .iter()
        .map(|ser| {
            let y = match ser.filter {
                Some((col, v)) => format!("(${col}=={v}?${}:1/0)", ser.y),
                None => format!("{}", ser.y),
            };
            format!(
                "'{}' every ::1 using {}:{} with linespoints title \"{}\"",
                plot.data, ser.x, y, ser.label
            )
        })
        .collect();
    if has_reference {
        for (i, slope) in plot.reference_slopes.iter().enumerate() {
            parts.push(format!(
                "'{}_ref.dat' every ::1 using 1:{} with lines dashtype 2 title \"slope {slope}\"",
                plot.name,
                i + 2
            ));
        }
    }
    writeln!(s, "plot {}", parts.join(", \\\n     ")).unwrap();
    s
}
