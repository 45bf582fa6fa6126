use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::exactalg::{format_rational, rational_to_f64, PolynomialHamiltonian};
use crate::oscillator::{eigenfunction_value, oscillator_energy};
use crate::spectrum::{classical_cross_section, evaluate_spectrum};

use super::table::{format_float, tables_to_json, Table};
use super::{CliError, Format};

/// Samples per unit length along x.
const SAMPLES_PER_UNIT: usize = 20;
/// Fraction of the smallest energy gap used as the eigenfunction display scale.
const SCALE_FRACTION: f64 = 0.9;

/// Data behind the level diagram: exact spectrum, classical cross-section
/// `P(x²/2)`, and eigenfunctions drawn at height `E_n + s·φ_n(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureBundle {
    pub spectrum: Table,
    pub cross_section: Table,
    pub eigenfunctions: Table,
    pub display_scale: f64,
    xs: Vec<f64>,
    energies: Vec<f64>,
    cross: Vec<f64>,
    curves: Vec<Vec<f64>>,
}

fn display_scale(energies: &[f64]) -> f64 {
    let mut sorted = energies.to_vec();
    sorted.sort_by(f64::total_cmp);
    let gap = sorted
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|g| *g > 0.0)
        .fold(f64::INFINITY, f64::min);
    // all levels coincide: fall back to a unit gap
    SCALE_FRACTION * if gap.is_finite() { gap } else { 1.0 }
}

impl FigureBundle {
    pub fn new(h: &PolynomialHamiltonian, levels: usize) -> Result<Self, CliError> {
        let records = evaluate_spectrum(h, levels);
        let energies: Vec<f64> = records.iter().map(|r| rational_to_f64(&r.energy)).collect();
        let scale = display_scale(&energies);

        // classical turning point of the highest level plus a margin
        let half_range = ((2 * levels + 1) as f64).sqrt().ceil() as usize + 2;
        let steps = half_range * SAMPLES_PER_UNIT;
        let xs: Vec<f64> = (0..=2 * steps)
            .map(|i| (i as f64 - steps as f64) / SAMPLES_PER_UNIT as f64)
            .collect();

        let mut spectrum = Table::new("spectrum", &["n", "h_n", "E_n", "E_n_decimal"]);
        for r in &records {
            spectrum.push(vec![
                r.n.0.into(),
                format_rational(&oscillator_energy(r.n)).into(),
                format_rational(&r.energy).into(),
                rational_to_f64(&r.energy).into(),
            ]);
        }

        let cross: Vec<f64> = xs.iter().map(|&x| classical_cross_section(h, x)).collect();
        let mut cross_section = Table::new("cross_section", &["x", "H_x0"]);
        for (x, v) in xs.iter().zip(&cross) {
            cross_section.push(vec![(*x).into(), (*v).into()]);
        }

        let curves = records
            .iter()
            .zip(&energies)
            .map(|(r, e)| {
                xs.iter()
                    .map(|&x| eigenfunction_value(r.n, x).map(|phi| e + scale * phi))
                    .collect::<Result<Vec<f64>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CliError::Internal(e.to_string()))?;

        let columns: Vec<String> = std::iter::once("x".to_string())
            .chain((0..levels).map(|n| format!("level_{n}")))
            .collect();
        let mut eigenfunctions = Table::new(
            "eigenfunctions",
            &columns.iter().map(String::as_str).collect::<Vec<_>>(),
        );
        for (i, x) in xs.iter().enumerate() {
            let mut row = vec![(*x).into()];
            row.extend(curves.iter().map(|c| c[i].into()));
            eigenfunctions.push(row);
        }

        Ok(FigureBundle {
            spectrum,
            cross_section,
            eigenfunctions,
            display_scale: scale,
            xs,
            energies,
            cross,
            curves,
        })
    }

    /// Level diagram as a standalone SVG: the cross-section curve plus each
    /// eigenfunction drawn around its energy baseline.
    pub fn to_svg(&self) -> String {
        const W: f64 = 640.0;
        const H: f64 = 480.0;
        const PAD: f64 = 40.0;
        let x_max = self.xs.last().copied().unwrap_or(1.0);
        let e_min = self.energies.iter().copied().fold(f64::INFINITY, f64::min);
        let e_max = self.energies.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let margin = self.display_scale.max(1e-12);
        let (y_lo, y_hi) = (e_min - margin, e_max + margin);
        let px = |x: f64| PAD + (x + x_max) / (2.0 * x_max) * (W - 2.0 * PAD);
        let py = |y: f64| H - PAD - (y - y_lo) / (y_hi - y_lo) * (H - 2.0 * PAD);
        let polyline = |ys: &[f64]| {
            let mut pts = String::new();
            for (x, y) in self.xs.iter().zip(ys) {
                if !pts.is_empty() {
                    pts.push(' ');
                }
                let _ = write!(pts, "{:.2},{:.2}", px(*x), py(*y));
            }
            pts
        };

        let mut svg = String::new();
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
        );
        let _ = writeln!(
            svg,
            r#"<clipPath id="plot"><rect x="{PAD}" y="{PAD}" width="{}" height="{}"/></clipPath>"#,
            W - 2.0 * PAD,
            H - 2.0 * PAD
        );
        let _ = writeln!(svg, r#"<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>"#);
        let _ = writeln!(
            svg,
            r#"<polyline clip-path="url(#plot)" fill="none" stroke="black" stroke-width="1.5" points="{}"/>"#,
            polyline(&self.cross)
        );
        for (n, (e, curve)) in self.energies.iter().zip(&self.curves).enumerate() {
            let y = py(*e);
            let _ = writeln!(
                svg,
                r##"<line x1="{PAD}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#999999" stroke-dasharray="3,3"/>"##,
                W - PAD
            );
            let _ = writeln!(
                svg,
                r##"<polyline clip-path="url(#plot)" fill="none" stroke="#1f4e9c" points="{}"/>"##,
                polyline(curve)
            );
            let _ = writeln!(
                svg,
                r#"<text x="{:.2}" y="{:.2}" font-size="10" font-family="sans-serif">n={n}, E={}</text>"#,
                W - PAD + 2.0,
                y + 3.0,
                format_float(*e)
            );
        }
        svg.push_str("</svg>\n");
        svg
    }
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn csv_bytes(table: &Table, preamble: Option<String>) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    if let Some(p) = preamble {
        buf.extend_from_slice(p.as_bytes());
    }
    table
        .write_csv(&mut buf)
        .map_err(|e| CliError::Internal(e.to_string()))?;
    Ok(buf)
}

/// Writes `spectrum.csv`, `cross_section.csv`, `eigenfunctions.csv` and
/// `figure.svg` (plus `figure.json` in JSON mode) into `dir`.
pub fn write_figure_bundle(bundle: &FigureBundle, dir: &Path, format: Format) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.display().to_string(),
        source,
    })?;
    let scale_line = format!("# display_scale={}\n", format_float(bundle.display_scale));
    let mut files = vec![
        (dir.join("spectrum.csv"), csv_bytes(&bundle.spectrum, None)?),
        (dir.join("cross_section.csv"), csv_bytes(&bundle.cross_section, None)?),
        (
            dir.join("eigenfunctions.csv"),
            csv_bytes(&bundle.eigenfunctions, Some(scale_line))?,
        ),
        (dir.join("figure.svg"), bundle.to_svg().into_bytes()),
    ];
    if format == Format::Json {
        let mut value = tables_to_json(&[
            bundle.spectrum.clone(),
            bundle.cross_section.clone(),
            bundle.eigenfunctions.clone(),
        ]);
        value["display_scale"] = bundle.display_scale.into();
        let mut text = serde_json::to_string_pretty(&value).map_err(|e| CliError::Internal(e.to_string()))?;
        text.push('\n');
        files.push((dir.join("figure.json"), text.into_bytes()));
    }
    for (path, bytes) in &files {
        write_file(path, bytes)?;
    }
    Ok(files.into_iter().map(|(p, _)| p).collect())
}
