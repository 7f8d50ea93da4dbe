//! Result files: time-series CSV, summary JSON and residual report.
//!
//! Every float is written with 17 significant digits, so values round-trip
//! and repeated runs produce byte-identical files.

use std::fs;
use std::path::{Path, PathBuf};

use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

use crate::error::{Error, Result};
use crate::phase::Applicability;
use crate::scenario::{ResidualBounds, ScenarioResult};

pub const CSV_HEADER: [&str; 17] = [
    "t",
    "r1",
    "theta1",
    "omega1",
    "vr1",
    "r2",
    "theta2",
    "omega2",
    "vr2",
    "A_theta_1",
    "E_theta_1",
    "B_z_1",
    "A_theta_2",
    "E_theta_2",
    "B_z_2",
    "phi_ab_partial",
    "phi_kin_partial",
];

/// 17 significant digits.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Ordered JSON tree whose numbers keep the fixed float format.
#[derive(Debug, Clone)]
pub enum Json {
    Null,
    Bool(bool),
    Num(f64),
    Int(u64),
    Str(String),
    Arr(Vec<Json>),
    Obj(Vec<(String, Json)>),
}

impl Json {
    fn obj(entries: Vec<(&str, Json)>) -> Json {
        Json::Obj(entries.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
    }

    fn opt(x: Option<f64>) -> Json {
        x.map_or(Json::Null, Json::Num)
    }

    pub fn to_pretty_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("in-memory serialisation");
        s.push('\n');
        s
    }
}

impl Serialize for Json {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Json::Null => s.serialize_none(),
            Json::Bool(b) => s.serialize_bool(*b),
            Json::Num(x) if x.is_finite() => RawValue::from_string(format_float(*x))
                .map_err(serde::ser::Error::custom)?
                .serialize(s),
            Json::Num(_) => s.serialize_none(),
            Json::Int(i) => s.serialize_u64(*i),
            Json::Str(t) => s.serialize_str(t),
            Json::Arr(items) => {
                let mut seq = s.serialize_seq(Some(items.len()))?;
                for item in items {
                    seq.serialize_element(item)?;
                }
                seq.end()
            }
            Json::Obj(entries) => {
                let mut map = s.serialize_map(Some(entries.len()))?;
                for (k, v) in entries {
                    map.serialize_entry(k, v)?;
                }
                map.end()
            }
        }
    }
}

fn applicability_name(a: Applicability) -> &'static str {
    match a {
        Applicability::CircularQuasistatic => "circular_quasistatic",
        Applicability::CircularGeneralField => "circular_general_field",
        Applicability::StaticAnyPath => "static_any_path",
        Applicability::None => "none",
    }
}

fn bounds_json(b: &ResidualBounds) -> Json {
    Json::obj(vec![
        ("ab", Json::opt(b.ab)),
        ("kin", Json::opt(b.kin)),
        ("total", Json::opt(b.total)),
        (
            "ab_window",
            b.ab_window
                .map_or(Json::Null, |(lo, hi)| Json::Arr(vec![Json::Num(lo), Json::Num(hi)])),
        ),
        ("canonical_drift", Json::opt(b.canonical_drift)),
        ("spread_max", Json::opt(b.spread_max)),
        ("spread_min", Json::opt(b.spread_min)),
    ])
}

fn failures_json(r: &ScenarioResult) -> Json {
    Json::Arr(r.bound_failures.iter().cloned().map(Json::Str).collect())
}

fn residuals_json(r: &ScenarioResult) -> Json {
    r.residuals.map_or(Json::Null, |x| {
        Json::obj(vec![("ab", Json::Num(x.ab)), ("kin", Json::Num(x.kin)), ("total", Json::Num(x.total))])
    })
}

/// Summary of one scenario as an ordered JSON tree.
pub fn summary_json(r: &ScenarioResult) -> Json {
    let p = &r.phases;
    let units = r.e_phi0.and_then(|e| p.in_units_of(e)).map_or(Json::Null, |[ab, kin, total]| {
        Json::obj(vec![("ab", Json::Num(ab)), ("kin", Json::Num(kin)), ("total", Json::Num(total))])
    });
    let d = &r.diagnostics;
    let validity = d.validity.map_or(Json::Null, |v| {
        Json::obj(vec![
            ("omega_a_over_c", Json::Num(v.ratio_a)),
            ("omega_r_over_c", Json::Num(v.ratio_r)),
            ("threshold", Json::Num(v.threshold)),
            ("ok", Json::Bool(v.ok)),
        ])
    });
    let sweep = r.sweep.as_ref().map_or(Json::Null, |s| {
        let members = s
            .members
            .iter()
            .map(|m| {
                Json::obj(vec![
                    ("r0", Json::Num(m.shape.r0)),
                    ("v_r0", Json::Num(m.shape.v_r0)),
                    ("phi_ab", Json::opt(m.phi_ab)),
                    ("error", m.error.clone().map_or(Json::Null, Json::Str)),
                ])
            })
            .collect();
        Json::obj(vec![
            ("members", Json::Arr(members)),
            ("spread", Json::Num(s.spread)),
            ("spread_over_e_phi0", Json::opt(s.relative_spread)),
            ("failures", Json::Int(s.failures as u64)),
        ])
    });
    let pr = &r.prediction;
    Json::obj(vec![
        ("name", Json::Str(r.name.clone())),
        (
            "phases",
            Json::obj(vec![
                ("phi_ab", Json::Num(p.phi_ab)),
                ("phi_kin", Json::Num(p.phi_kin)),
                ("phi_total", Json::Num(p.phi_total)),
                ("e_phi0", Json::opt(r.e_phi0)),
                ("in_units_of_e_phi0", units),
            ]),
        ),
        (
            "prediction",
            Json::obj(vec![
                ("applicability", Json::Str(applicability_name(pr.applicability).into())),
                ("ab", Json::opt(pr.predicted_ab)),
                ("kin", Json::opt(pr.predicted_kin)),
                ("total", Json::opt(pr.predicted_total)),
            ]),
        ),
        ("residuals", residuals_json(r)),
        (
            "diagnostics",
            Json::obj(vec![
                ("meeting_time", Json::Num(d.meeting_time)),
                ("event_residual", Json::Num(d.event_residual)),
                ("final_radial_separation", Json::Num(d.final_radial_separation)),
                ("validity", validity),
                ("canonical_drift", Json::Num(d.canonical_drift)),
                ("grid_points", Json::Int(d.grid_points as u64)),
                ("grid_dt", Json::Num(d.grid_dt)),
            ]),
        ),
        ("sweep", sweep),
        ("passed", Json::Bool(r.passed())),
        ("bound_failures", failures_json(r)),
    ])
}

pub fn residual_report_json(r: &ScenarioResult) -> Json {
    Json::obj(vec![
        ("name", Json::Str(r.name.clone())),
        ("residuals", residuals_json(r)),
        ("bounds", bounds_json(&r.bounds)),
        ("passed", Json::Bool(r.passed())),
        ("bound_failures", failures_json(r)),
    ])
}

/// Summary entry for a scenario that stopped with an error.
pub fn error_json(name: &str, err: &Error) -> Json {
    Json::obj(vec![
        ("name", Json::Str(name.to_string())),
        ("error", Json::Str(err.to_string())),
        ("passed", Json::Bool(false)),
    ])
}

/// Where a run's scenario came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScenarioSource {
    Builtin(String),
    ConfigFile(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EmitFlags {
    pub timeseries: bool,
    pub summary: bool,
    pub residuals: bool,
}

impl Default for EmitFlags {
    fn default() -> Self {
        EmitFlags {
            timeseries: true,
            summary: true,
            residuals: true,
        }
    }
}

/// What to write and where. Runs are seedless: the same scenario always
/// produces the same files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunManifest {
    pub source: ScenarioSource,
    pub out_dir: PathBuf,
    pub emit: EmitFlags,
}

impl RunManifest {
    /// Create the output directory if needed and confirm it is writable.
    pub fn prepare(&self) -> Result<()> {
        let io = |source| Error::Io {
            path: self.out_dir.clone(),
            source,
        };
        fs::create_dir_all(&self.out_dir).map_err(io)?;
        let meta = fs::metadata(&self.out_dir).map_err(io)?;
        if !meta.is_dir() || meta.permissions().readonly() {
            return Err(io(std::io::Error::new(
                std::io::ErrorKind::PermissionDenied,
                "output directory is not writable",
            )));
        }
        Ok(())
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn file_stem(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

/// Write the time series as CSV; one row per grid point after the header.
pub fn write_timeseries(result: &ScenarioResult, path: &Path) -> Result<()> {
    let io_err = |e: csv::Error| Error::Io {
        path: path.to_path_buf(),
        source: e.into(),
    };
    let mut w = csv::Writer::from_path(path).map_err(io_err)?;
    w.write_record(CSV_HEADER).map_err(io_err)?;
    for row in result.time_series()? {
        let mut rec: Vec<String> = Vec::with_capacity(CSV_HEADER.len());
        rec.push(format_float(row.t));
        for (r, theta, omega, v_r) in row.beams {
            rec.extend([r, theta, omega, v_r].map(format_float));
        }
        for f in row.fields {
            rec.extend([f.a_theta, f.e_theta, f.b_z].map(format_float));
        }
        rec.push(format_float(row.phi_ab_partial));
        rec.push(format_float(row.phi_kin_partial));
        w.write_record(&rec).map_err(io_err)?;
    }
    w.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Write the files selected by the manifest; returns their paths.
pub fn emit_outputs(result: &ScenarioResult, manifest: &RunManifest) -> Result<Vec<PathBuf>> {
    manifest.prepare()?;
    let stem = file_stem(&result.name);
    let mut written = Vec::new();
    if manifest.emit.timeseries {
        let p = manifest.out_dir.join(format!("{stem}.timeseries.csv"));
        write_timeseries(result, &p)?;
        written.push(p);
    }
    if manifest.emit.summary {
        let p = manifest.out_dir.join(format!("{stem}.summary.json"));
        write_file(&p, &summary_json(result).to_pretty_string())?;
        written.push(p);
    }
    if manifest.emit.residuals {
        let p = manifest.out_dir.join(format!("{stem}.residuals.json"));
        write_file(&p, &residual_report_json(result).to_pretty_string())?;
        written.push(p);
    }
    Ok(written)
}

/// Combined summary for a suite run.
pub fn suite_json(entries: &[(String, Result<ScenarioResult>)]) -> Json {
    let all_passed = entries.iter().all(|(_, r)| matches!(r, Ok(r) if r.passed()));
    Json::obj(vec![
        (
            "scenarios",
            Json::Arr(
                entries
                    .iter()
                    .map(|(name, r)| match r {
                        Ok(r) => summary_json(r),
                        Err(e) => error_json(name, e),
                    })
                    .collect(),
            ),
        ),
        ("passed", Json::Bool(all_passed)),
    ])
}

pub fn write_suite_summary(entries: &[(String, Result<ScenarioResult>)], out_dir: &Path) -> Result<PathBuf> {
    let p = out_dir.join("suite.summary.json");
    write_file(&p, &suite_json(entries).to_pretty_string())?;
    Ok(p)
}
