//! CSV tables and run manifests. Files are written to a temporary sibling and
//! renamed into place, so an interrupted run leaves no partial output.

use std::io::{self, Write};
use std::path::{Path, PathBuf};

use optomech::{OptimalGain, Record};

pub const SWEEP_HEADER: [&str; 7] = [
    "sweep_value",
    "stable",
    "E_N",
    "nu_minus_tilde",
    "ratio_mode1",
    "ratio_mode2",
    "spectral_abscissa",
];

pub const OPTIMAL_GAIN_HEADER: [&str; 9] = [
    "temperature_k",
    "g_opt_rad_s",
    "g_opt_in_kappa",
    "E_N_opt",
    "bracket_lo_rad_s",
    "bracket_hi_rad_s",
    "baseline_E_N",
    "enhancement_percent",
    "boundary_maximum",
];

/// Shortest decimal that parses back to the same `f64`.
pub fn float(x: f64) -> String {
    format!("{x}")
}

fn opt(x: Option<f64>) -> String {
    x.map(float).unwrap_or_default()
}

/// One sweep row. `sweep_value` is passed separately because the CSV reports
/// gains in units of κ while the record holds rad/s.
pub fn sweep_row(sweep_value: f64, r: &Record) -> [String; 7] {
    let ratios = r.ratios();
    [
        float(sweep_value),
        r.stable.to_string(),
        opt(r.e_n()),
        opt(r.nu_minus_tilde()),
        opt(ratios.map(|x| x.0)),
        opt(ratios.map(|x| x.1)),
        opt(r.spectral_abscissa),
    ]
}

/// One optimal-gain row; a failed temperature leaves every cell but the first empty.
pub fn optimal_gain_row(temperature: f64, r: Option<&OptimalGain>) -> [String; 9] {
    let Some(r) = r else {
        let mut row: [String; 9] = Default::default();
        row[0] = float(temperature);
        return row;
    };
    [
        float(temperature),
        float(r.g_opt),
        float(r.g_opt_in_kappa),
        float(r.e_n_opt),
        float(r.bracket.0),
        float(r.bracket.1),
        opt(r.baseline_e_n),
        opt(r.enhancement_percent),
        r.boundary_maximum.to_string(),
    ]
}

pub fn csv_bytes<const N: usize>(header: [&str; N], rows: &[[String; N]]) -> csv::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.into_inner().map_err(|e| e.into_error().into())
}

/// `run.csv` → `run.manifest.json`.
pub fn manifest_path(csv: &Path) -> PathBuf {
    csv.with_extension("manifest.json")
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
