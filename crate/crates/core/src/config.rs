//! Scenario files: TOML restricted to a top-level `name` and flat tables
//! of scalar keys.
//!
//! ```toml
//! name = "static-circular"
//!
//! [solenoid]
//! radius_a = 1.0
//! light_speed_c = 10000.0
//!
//! [flux]
//! kind = "constant"
//! phi0 = 1.0
//!
//! [beams]
//! path = "circular"
//! R = 2.0
//! omega0_1 = 3.141592653589793
//! ```
//!
//! | section    | keys |
//! |------------|------|
//! | `solenoid` | `radius_a`, `light_speed_c`, `turns_density_n`, `current_amplitude_I0` |
//! | `particle` | `charge_e` (1), `mass_m` (1) |
//! | `flux`     | `kind`, `phi0`, `alpha`, `omega_drive`, `t_on`, `t_off`, `ramp_width` (0) |
//! | `field`    | `model` (`"quasistatic"`), `validity_threshold` (0.01) |
//! | `beams`    | `path`, `R`, `omega0_1`, `omega0_2`, `r0`, `v_r0` (0), `r0_2`, `v_r0_2`, `guide_omega`, `sweep_v_r0` |
//! | `run`      | `dt`, `t_max`, `event_tol` |
//! | `bounds`   | `ab`, `kin`, `total`, `ab_window_lo`, `ab_window_hi`, `canonical_drift`, `spread_max`, `spread_min` |
//!
//! Parenthesised values are defaults. `kind` is one of `constant`,
//! `linear_ramp`, `sinusoidal`, `trapezoidal_pulse`; `path` is `circular`
//! or `free`; `sweep_v_r0` is an array of radial launch speeds in units of
//! r0·ω0.

use std::fmt::Write as _;

use toml::{Table, Value};

use crate::dynamics::ParticleConfig;
use crate::error::{Error, Result};
use crate::fields::{FieldModelKind, SolenoidConfig, DEFAULT_VALIDITY_THRESHOLD};
use crate::flux::{FluxKind, FluxProfile};
use crate::scenario::{BeamsConfig, PathKind, ResidualBounds, RunConfig, Scenario};

const SECTIONS: [(&str, &[&str]); 7] = [
    ("solenoid", &["radius_a", "light_speed_c", "turns_density_n", "current_amplitude_I0"]),
    ("particle", &["charge_e", "mass_m"]),
    ("flux", &["kind", "phi0", "alpha", "omega_drive", "t_on", "t_off", "ramp_width"]),
    ("field", &["model", "validity_threshold"]),
    (
        "beams",
        &["path", "R", "omega0_1", "omega0_2", "r0", "v_r0", "r0_2", "v_r0_2", "guide_omega", "sweep_v_r0"],
    ),
    ("run", &["dt", "t_max", "event_tol"]),
    (
        "bounds",
        &["ab", "kin", "total", "ab_window_lo", "ab_window_hi", "canonical_drift", "spread_max", "spread_min"],
    ),
];

struct Reader<'a> {
    root: &'a Table,
    errors: Vec<String>,
}

impl<'a> Reader<'a> {
    fn section(&self, name: &str) -> Option<&'a Table> {
        self.root.get(name).and_then(Value::as_table)
    }

    fn raw(&self, section: &str, key: &str) -> Option<&'a Value> {
        self.section(section).and_then(|t| t.get(key))
    }

    fn num(&mut self, section: &str, key: &str) -> Option<f64> {
        match self.raw(section, key)? {
            Value::Float(f) => Some(*f),
            Value::Integer(i) => Some(*i as f64),
            other => {
                self.errors
                    .push(format!("{section}.{key}: expected a number, got {}", other.type_str()));
                None
            }
        }
    }

    fn req_num(&mut self, section: &str, key: &str) -> Option<f64> {
        let v = self.num(section, key);
        if v.is_none() && self.raw(section, key).is_none() {
            self.errors.push(format!("{section}.{key}: missing required key"));
        }
        v
    }

    fn string(&mut self, section: &str, key: &str) -> Option<&'a str> {
        match self.raw(section, key)? {
            Value::String(s) => Some(s.as_str()),
            other => {
                self.errors
                    .push(format!("{section}.{key}: expected a string, got {}", other.type_str()));
                None
            }
        }
    }

    fn num_list(&mut self, section: &str, key: &str) -> Vec<f64> {
        match self.raw(section, key) {
            None => Vec::new(),
            Some(Value::Array(items)) => {
                let mut out = Vec::with_capacity(items.len());
                for item in items {
                    match item {
                        Value::Float(f) => out.push(*f),
                        Value::Integer(i) => out.push(*i as f64),
                        other => self
                            .errors
                            .push(format!("{section}.{key}: expected numbers, got {}", other.type_str())),
                    }
                }
                out
            }
            Some(other) => {
                self.errors
                    .push(format!("{section}.{key}: expected an array, got {}", other.type_str()));
                Vec::new()
            }
        }
    }

    fn check_keys(&mut self) {
        for (key, value) in self.root {
            if key == "name" {
                continue;
            }
            match SECTIONS.iter().find(|(s, _)| s == key) {
                None => self.errors.push(format!("{key}: unknown key")),
                Some((section, allowed)) => match value.as_table() {
                    None => self.errors.push(format!("{section}: expected a table")),
                    Some(t) => {
                        for k in t.keys() {
                            if !allowed.contains(&k.as_str()) {
                                self.errors.push(format!("{section}.{k}: unknown key"));
                            }
                        }
                    }
                },
            }
        }
    }
}

fn parse_flux(rd: &mut Reader<'_>) -> Option<FluxProfile> {
    let kind_text = match rd.string("flux", "kind") {
        Some(s) => s,
        None => {
            if rd.raw("flux", "kind").is_none() {
                rd.errors.push("flux.kind: missing required key".into());
            }
            return None;
        }
    };
    let Some(kind) = FluxKind::parse(kind_text) else {
        rd.errors.push(format!(
            "flux.kind: unknown profile {kind_text:?} (expected constant, linear_ramp, sinusoidal or trapezoidal_pulse)"
        ));
        return None;
    };
    let used: &[&str] = match kind {
        FluxKind::Constant => &["kind", "phi0"],
        FluxKind::LinearRamp => &["kind", "alpha"],
        FluxKind::Sinusoidal => &["kind", "phi0", "omega_drive"],
        FluxKind::TrapezoidalPulse => &["kind", "phi0", "t_on", "t_off", "ramp_width"],
    };
    if let Some(t) = rd.section("flux") {
        for k in t.keys() {
            let known = SECTIONS[2].1.contains(&k.as_str());
            if known && !used.contains(&k.as_str()) {
                rd.errors
                    .push(format!("flux.{k}: not a parameter of the {} profile", kind.as_str()));
            }
        }
    }
    let built = match kind {
        FluxKind::Constant => rd.req_num("flux", "phi0").map(FluxProfile::constant),
        FluxKind::LinearRamp => rd.req_num("flux", "alpha").map(FluxProfile::linear_ramp),
        FluxKind::Sinusoidal => {
            let phi0 = rd.req_num("flux", "phi0");
            let omega = rd.req_num("flux", "omega_drive");
            phi0.zip(omega).map(|(p, w)| FluxProfile::sinusoidal(p, w))
        }
        FluxKind::TrapezoidalPulse => {
            let phi0 = rd.req_num("flux", "phi0");
            let t_on = rd.req_num("flux", "t_on");
            let t_off = rd.req_num("flux", "t_off");
            let w = rd.num("flux", "ramp_width").unwrap_or(0.0);
            match (phi0, t_on, t_off) {
                (Some(p), Some(a), Some(b)) => Some(FluxProfile::trapezoidal_pulse(p, a, b, w)),
                _ => None,
            }
        }
    }?;
    match built {
        Ok(f) => Some(f),
        Err(e) => {
            rd.errors.push(format!("flux: {e}"));
            None
        }
    }
}

/// Parse and fully validate a scenario file, reporting every problem found.
pub fn parse_config(text: &str) -> Result<Scenario> {
    let root: Table = text
        .parse()
        .map_err(|e: toml::de::Error| Error::Config(vec![format!("syntax: {}", e.message())]))?;
    let mut rd = Reader {
        root: &root,
        errors: Vec::new(),
    };
    rd.check_keys();

    let name = match root.get("name") {
        Some(Value::String(s)) => s.clone(),
        Some(_) => {
            rd.errors.push("name: expected a string".into());
            String::new()
        }
        None => {
            rd.errors.push("name: missing required key".into());
            String::new()
        }
    };

    let radius_a = rd.req_num("solenoid", "radius_a");
    let light_speed_c = rd.req_num("solenoid", "light_speed_c");
    let turns = rd.num("solenoid", "turns_density_n");
    let current = rd.num("solenoid", "current_amplitude_I0");
    if turns.is_some() != current.is_some() {
        rd.errors.push(
            "solenoid: turns_density_n and current_amplitude_I0 must be given together".into(),
        );
    }
    let solenoid = radius_a.zip(light_speed_c).map(|(a, c)| SolenoidConfig {
        radius_a: a,
        light_speed_c: c,
        turns_density_n: turns,
        current_amplitude_i0: current,
    });

    let particle = ParticleConfig {
        charge_e: rd.num("particle", "charge_e").unwrap_or(1.0),
        mass_m: rd.num("particle", "mass_m").unwrap_or(1.0),
    };

    let flux = parse_flux(&mut rd);

    let field_model = match rd.string("field", "model") {
        None => Some(FieldModelKind::Quasistatic),
        Some(s) => {
            let k = FieldModelKind::parse(s);
            if k.is_none() {
                rd.errors.push(format!(
                    "field.model: unknown model {s:?} (expected quasistatic or exact_sinusoidal)"
                ));
            }
            k
        }
    };
    let validity_threshold = rd
        .num("field", "validity_threshold")
        .unwrap_or(DEFAULT_VALIDITY_THRESHOLD);

    let path = match rd.string("beams", "path") {
        None => {
            if rd.raw("beams", "path").is_none() {
                rd.errors.push("beams.path: missing required key".into());
            }
            None
        }
        Some(s) => {
            let p = PathKind::parse(s);
            if p.is_none() {
                rd.errors
                    .push(format!("beams.path: unknown path {s:?} (expected circular or free)"));
            }
            p
        }
    };
    let omega0_1 = rd.req_num("beams", "omega0_1");
    let beams_radius = rd.num("beams", "R");
    let r0 = rd.num("beams", "r0");
    if path == Some(PathKind::Circular) {
        for k in ["r0", "v_r0", "r0_2", "v_r0_2", "guide_omega", "sweep_v_r0"] {
            if rd.raw("beams", k).is_some() {
                rd.errors.push(format!("beams.{k}: only meaningful for free paths"));
            }
        }
    }
    if path == Some(PathKind::Free) && rd.raw("beams", "R").is_some() {
        rd.errors.push("beams.R: only meaningful for circular paths".into());
    }
    let beams = path.zip(omega0_1).map(|(path, omega0_1)| BeamsConfig {
        path,
        radius: beams_radius,
        omega0_1,
        omega0_2: rd.num("beams", "omega0_2"),
        r0,
        v_r0: rd.num("beams", "v_r0").unwrap_or(0.0),
        r0_2: rd.num("beams", "r0_2"),
        v_r0_2: rd.num("beams", "v_r0_2"),
        guide_omega: rd.num("beams", "guide_omega"),
        sweep_v_r0: rd.num_list("beams", "sweep_v_r0"),
    });

    let run = RunConfig {
        dt: rd.num("run", "dt"),
        t_max: rd.num("run", "t_max"),
        event_tol: rd.num("run", "event_tol"),
    };

    let lo = rd.num("bounds", "ab_window_lo");
    let hi = rd.num("bounds", "ab_window_hi");
    if lo.is_some() != hi.is_some() {
        rd.errors
            .push("bounds: ab_window_lo and ab_window_hi must be given together".into());
    }
    let bounds = ResidualBounds {
        ab: rd.num("bounds", "ab"),
        kin: rd.num("bounds", "kin"),
        total: rd.num("bounds", "total"),
        ab_window: lo.zip(hi),
        canonical_drift: rd.num("bounds", "canonical_drift"),
        spread_max: rd.num("bounds", "spread_max"),
        spread_min: rd.num("bounds", "spread_min"),
    };

    let mut errors = rd.errors;
    if let (Some(solenoid), Some(flux), Some(field_model), Some(beams)) = (solenoid, flux, field_model, beams) {
        let scenario = Scenario {
            name,
            solenoid,
            particle,
            flux,
            field_model,
            validity_threshold,
            beams,
            run,
            bounds,
        };
        for e in scenario.validation_errors() {
            if !errors.contains(&e) {
                errors.push(e);
            }
        }
        if errors.is_empty() {
            return Ok(scenario);
        }
    }
    Err(Error::Config(errors))
}

/// Read and parse a scenario file.
pub fn load_config(path: &std::path::Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}

fn num(x: f64) -> String {
    // Debug formatting round-trips and always carries a decimal point.
    format!("{x:?}")
}

/// Canonical text of a scenario. Parsing it back gives an equal scenario.
pub fn to_config_string(s: &Scenario) -> String {
    let mut out = String::new();
    let mut line = |k: &str, v: String| {
        let _ = writeln!(out, "{k} = {v}");
    };
    line("name", format!("{:?}", s.name));

    let section = |out: &mut String, name: &str, entries: Vec<(&str, String)>| {
        if entries.is_empty() {
            return;
        }
        let _ = writeln!(out, "\n[{name}]");
        for (k, v) in entries {
            let _ = writeln!(out, "{k} = {v}");
        }
    };

    let mut sol = vec![
        ("radius_a", num(s.solenoid.radius_a)),
        ("light_speed_c", num(s.solenoid.light_speed_c)),
    ];
    if let Some(n) = s.solenoid.turns_density_n {
        sol.push(("turns_density_n", num(n)));
    }
    if let Some(i) = s.solenoid.current_amplitude_i0 {
        sol.push(("current_amplitude_I0", num(i)));
    }
    section(&mut out, "solenoid", sol);
    section(
        &mut out,
        "particle",
        vec![("charge_e", num(s.particle.charge_e)), ("mass_m", num(s.particle.mass_m))],
    );

    let kind = format!("{:?}", s.flux.kind().as_str());
    let flux = match s.flux {
        FluxProfile::Constant { phi0 } => vec![("kind", kind), ("phi0", num(phi0))],
        FluxProfile::LinearRamp { alpha } => vec![("kind", kind), ("alpha", num(alpha))],
        FluxProfile::Sinusoidal { phi0, omega_drive } => {
            vec![("kind", kind), ("phi0", num(phi0)), ("omega_drive", num(omega_drive))]
        }
        FluxProfile::TrapezoidalPulse {
            phi0,
            t_on,
            t_off,
            ramp_width,
        } => vec![
            ("kind", kind),
            ("phi0", num(phi0)),
            ("t_on", num(t_on)),
            ("t_off", num(t_off)),
            ("ramp_width", num(ramp_width)),
        ],
    };
    section(&mut out, "flux", flux);
    section(
        &mut out,
        "field",
        vec![
            ("model", format!("{:?}", s.field_model.as_str())),
            ("validity_threshold", num(s.validity_threshold)),
        ],
    );

    let b = &s.beams;
    let mut beams = vec![("path", format!("{:?}", b.path.as_str()))];
    let opt = |v: &mut Vec<(&'static str, String)>, k: &'static str, x: Option<f64>| {
        if let Some(x) = x {
            v.push((k, num(x)));
        }
    };
    if b.path == PathKind::Circular {
        opt(&mut beams, "R", b.radius);
    }
    beams.push(("omega0_1", num(b.omega0_1)));
    opt(&mut beams, "omega0_2", b.omega0_2);
    if b.path == PathKind::Free {
        opt(&mut beams, "r0", b.r0);
        beams.push(("v_r0", num(b.v_r0)));
        opt(&mut beams, "r0_2", b.r0_2);
        opt(&mut beams, "v_r0_2", b.v_r0_2);
        opt(&mut beams, "guide_omega", b.guide_omega);
        if !b.sweep_v_r0.is_empty() {
            let items: Vec<String> = b.sweep_v_r0.iter().map(|&x| num(x)).collect();
            beams.push(("sweep_v_r0", format!("[{}]", items.join(", "))));
        }
    }
    section(&mut out, "beams", beams);

    let mut run = Vec::new();
    opt(&mut run, "dt", s.run.dt);
    opt(&mut run, "t_max", s.run.t_max);
    opt(&mut run, "event_tol", s.run.event_tol);
    section(&mut out, "run", run);

    let bd = &s.bounds;
    let mut bounds = Vec::new();
    opt(&mut bounds, "ab", bd.ab);
    opt(&mut bounds, "kin", bd.kin);
    opt(&mut bounds, "total", bd.total);
    if let Some((lo, hi)) = bd.ab_window {
        bounds.push(("ab_window_lo", num(lo)));
        bounds.push(("ab_window_hi", num(hi)));
    }
    opt(&mut bounds, "canonical_drift", bd.canonical_drift);
    opt(&mut bounds, "spread_max", bd.spread_max);
    opt(&mut bounds, "spread_min", bd.spread_min);
    section(&mut out, "bounds", bounds);
    out
}
