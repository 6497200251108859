use std::fs;
use std::path::{Path, PathBuf};

use super::study::ReportBundle;
use super::svg;
use crate::error::{Result, UqError};
use crate::metrics::write_records;

pub const RUNS_HEADER: &str = "run,seed,accuracy,sensitivity,specificity,auc";
pub const SWEEP_HEADER: &str = "method,threshold,tc,tu,fu,fc,usen,uspe,upre,uacc";
pub const RELIABILITY_HEADER: &str = "method,bin,lower,upper,count,accuracy,confidence,gap";
pub const ENTROPY_HIST_HEADER: &str = "method,bin,lower,upper,correct,incorrect";
pub const TABLE2_HEADER: &str = "method,threshold,uacc,usen,uspe,upre,tc,tu,fu,fc";

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn write(path: &Path, content: &str, written: &mut Vec<PathBuf>) -> Result<()> {
    fs::write(path, content).map_err(|e| UqError::io(path, e))?;
    written.push(path.to_path_buf());
    Ok(())
}

/// Writes the bundle as `metrics.json` plus CSV tables (and SVG renderings
/// when enabled). Method-specific files are skipped when the bundle has no
/// method sections. Returns the paths written, in order.
pub fn emit_reports(bundle: &ReportBundle, out_dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir).map_err(|e| UqError::io(out_dir, e))?;
    let mut written = Vec::new();

    let json = serde_json::to_string_pretty(bundle).map_err(|e| UqError::json("report bundle", e))?;
    write(&out_dir.join("metrics.json"), &(json + "\n"), &mut written)?;

    let mut runs = format!("{RUNS_HEADER}\n");
    if let Some(base) = &bundle.base_model {
        for r in &base.runs {
            runs += &format!(
                "{},{},{},{},{},{}\n",
                r.run,
                r.seed,
                r.accuracy,
                opt(r.sensitivity),
                opt(r.specificity),
                opt(r.auc)
            );
        }
    }
    write(&out_dir.join("runs.csv"), &runs, &mut written)?;

    if bundle.methods.is_empty() {
        return Ok(written);
    }

    let mut sweep = format!("{SWEEP_HEADER}\n");
    let mut reliability = format!("{RELIABILITY_HEADER}\n");
    let mut hist = format!("{ENTROPY_HIST_HEADER}\n");
    let mut table2 = format!("{TABLE2_HEADER}\n");
    for m in &bundle.methods {
        for row in &m.sweep {
            let (c, u) = (&row.matrix, &row.metrics);
            sweep += &format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                m.method,
                row.threshold,
                c.tc,
                c.tu,
                c.fu,
                c.fc,
                opt(u.usen),
                opt(u.uspe),
                opt(u.upre),
                u.uacc
            );
        }
        for (i, b) in m.evaluation.calibration.calibration.bins.iter().enumerate() {
            let gap = b.accuracy.zip(b.confidence).map(|(a, c)| (a - c).abs());
            reliability += &format!(
                "{},{},{},{},{},{},{},{}\n",
                m.method,
                i + 1,
                b.lower,
                b.upper,
                b.count,
                opt(b.accuracy),
                opt(b.confidence),
                opt(gap)
            );
        }
        let h = &m.entropy_histogram;
        for i in 0..h.correct.len() {
            hist += &format!(
                "{},{},{},{},{},{}\n",
                m.method,
                i + 1,
                h.edges[i],
                h.edges[i + 1],
                h.correct[i],
                h.incorrect[i]
            );
        }
        let (c, u) = (&m.evaluation.confusion, &m.evaluation.uncertainty);
        table2 += &format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            m.method,
            c.threshold,
            u.uacc,
            opt(u.usen),
            opt(u.uspe),
            opt(u.upre),
            c.tc,
            c.tu,
            c.fu,
            c.fc
        );

        let path = out_dir.join(format!("records_{}.csv", m.method));
        let mut buf = Vec::new();
        write_records(&m.records, &mut buf)?;
        fs::write(&path, buf).map_err(|e| UqError::io(&path, e))?;
        written.push(path);
    }
    write(&out_dir.join("sweep.csv"), &sweep, &mut written)?;
    write(&out_dir.join("reliability.csv"), &reliability, &mut written)?;
    write(&out_dir.join("entropy_hist.csv"), &hist, &mut written)?;
    write(&out_dir.join("table2.csv"), &table2, &mut written)?;

    if bundle.config.write_svg {
        for m in &bundle.methods {
            write(
                &out_dir.join(format!("reliability_{}.svg", m.method)),
                &svg::reliability(m),
                &mut written,
            )?;
            write(
                &out_dir.join(format!("sweep_{}.svg", m.method)),
                &svg::sweep(m),
                &mut written,
            )?;
            write(
                &out_dir.join(format!("entropy_{}.svg", m.method)),
                &svg::entropy(m),
                &mut written,
            )?;
        }
    }
    Ok(written)
}
