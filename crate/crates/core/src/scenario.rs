//! Scenario files: flat `key = value` lines with `#` comments and dotted
//! section keys. Missing keys take the defaults of [`Scenario::default_for`].
//!
//! ```text
//! name = bowling_ball
//! dimension = 2
//! spring.k_hist = 400
//! sphere.enabled = true
//! sphere.center = 2.0, 2.2
//! ```

use std::collections::HashMap;
use std::fmt::{self, Write as _};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::sph::{FluidParams, Particle};
use crate::springs::SpringParams;
use crate::world::{Container, RigidSphere, Vibration, VibrationSource, World};
use crate::Vector;

/// Where a configuration problem was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    Line(usize),
    /// The value came from a default.
    Default,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Line(n) => write!(f, "line {n}"),
            Location::Default => f.write_str("default value"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScenarioError {
    #[error("line {line}: expected `key = value`, found `{text}`")]
    Syntax { line: usize, text: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key `{key}`")]
    DuplicateKey { line: usize, key: String },
    #[error("{at}: invalid `{key}`: {reason}")]
    Invalid { at: Location, key: String, reason: String },
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
}

/// Length of the fractional-derivative window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HistoryWindow {
    /// `round(1 / dt)` steps, one second of memory.
    OneSecond,
    /// Every step of the run.
    Full,
    Steps(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FluidConfig {
    pub h: f64,
    pub rho0: f64,
    pub k_pressure: f64,
    pub k_near: f64,
    pub sigma: f64,
    pub beta: f64,
    pub gravity: Vec<f64>,
    pub particle_mass: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpringConfig {
    pub k_min: f64,
    pub k_hist: f64,
    pub q: f64,
    pub window: HistoryWindow,
    pub alpha: f64,
    pub gamma: f64,
    /// Disables the history phase entirely when false.
    pub history: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContainerConfig {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
    pub wall_band: f64,
}

/// Initial fluid block filled on a regular lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockConfig {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
    pub spacing: f64,
    /// Random offset of each lattice point, as a fraction of the spacing.
    pub jitter: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SphereConfig {
    pub center: Vec<f64>,
    pub radius: f64,
    pub velocity: Vec<f64>,
    pub mass: f64,
    /// Time (s) at which the sphere is let go; it is held in place and does
    /// not touch the fluid before then.
    pub release: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VibrationConfig {
    pub band: f64,
    pub amplitude: f64,
    pub frequency: f64,
    pub frequency_step: f64,
    /// Equally spaced source patches per horizontal axis; 0 drives the
    /// whole band.
    pub sources: usize,
    pub width: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub dimension: usize,
    pub dt: f64,
    pub steps: u64,
    pub seed: u64,
    /// Frames are written every `output_stride` steps.
    pub output_stride: u64,
    pub fluid: FluidConfig,
    pub spring: SpringConfig,
    pub container: ContainerConfig,
    pub block: BlockConfig,
    pub sphere: Option<SphereConfig>,
    pub vibration: Option<VibrationConfig>,
}

const KEYS: &[&str] = &[
    "name",
    "dimension",
    "dt",
    "steps",
    "seed",
    "output_stride",
    "fluid.h",
    "fluid.rho0",
    "fluid.k_pressure",
    "fluid.k_near",
    "fluid.sigma",
    "fluid.beta",
    "fluid.gravity",
    "fluid.particle_mass",
    "spring.k_min",
    "spring.k_hist",
    "spring.q",
    "spring.d",
    "spring.alpha",
    "spring.gamma",
    "spring.history",
    "container.min",
    "container.max",
    "container.wall_band",
    "block.min",
    "block.max",
    "block.spacing",
    "block.jitter",
    "sphere.enabled",
    "sphere.center",
    "sphere.radius",
    "sphere.velocity",
    "sphere.mass",
    "sphere.release",
    "vibration.enabled",
    "vibration.band",
    "vibration.amplitude",
    "vibration.frequency",
    "vibration.frequency_step",
    "vibration.sources",
    "vibration.width",
];

/// Every key accepted by [`parse_scenario`].
pub fn known_keys() -> &'static [&'static str] {
    KEYS
}

/// Presets shipped with the crate, as scenario text.
pub const PRESETS: &[(&str, &str)] = &[
    ("block_drop", include_str!("../presets/block_drop.scn")),
    ("bowling_ball", include_str!("../presets/bowling_ball.scn")),
    ("vibration", include_str!("../presets/vibration.scn")),
    ("long_memory", include_str!("../presets/long_memory.scn")),
];

pub fn preset(name: &str) -> Result<Scenario, ScenarioError> {
    let text = PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| *t)
        .ok_or_else(|| ScenarioError::UnknownPreset(name.to_string()))?;
    parse_scenario(text)
}

fn vec_of(dimension: usize, xy: [f64; 2], z: f64) -> Vec<f64> {
    let mut v = xy.to_vec();
    if dimension == 3 {
        v.push(z);
    }
    v
}

impl Scenario {
    /// Defaults: a block of fluid dropped into a box, q = 0.5, one second of
    /// memory at dt = 0.01.
    pub fn default_for(dimension: usize) -> Self {
        Self {
            name: "block_drop".into(),
            dimension,
            dt: 0.01,
            steps: 300,
            seed: 1,
            output_stride: 10,
            fluid: FluidConfig {
                h: 0.1,
                rho0: 1.5,
                k_pressure: 80.0,
                k_near: 40.0,
                sigma: 0.5,
                beta: 0.1,
                gravity: vec_of(dimension, [0.0, -9.81], 0.0),
                particle_mass: 1.0,
            },
            spring: SpringConfig {
                k_min: 30.0,
                k_hist: 300.0,
                q: 0.5,
                window: HistoryWindow::OneSecond,
                alpha: 10.0,
                gamma: 0.0,
                history: true,
            },
            container: ContainerConfig {
                min: vec_of(dimension, [0.0, 0.0], 0.0),
                max: vec_of(dimension, [2.0, 2.0], 0.5),
                wall_band: 0.01,
            },
            block: BlockConfig {
                min: vec_of(dimension, [0.0, 0.0], 0.0),
                max: vec_of(dimension, [0.6, 1.0], 0.3),
                spacing: 0.05,
                jitter: 0.0,
            },
            sphere: None,
            vibration: None,
        }
    }

    /// Window length in steps.
    pub fn history_window(&self) -> usize {
        match self.spring.window {
            HistoryWindow::OneSecond => (1.0 / self.dt).round() as usize,
            HistoryWindow::Full => self.steps as usize,
            HistoryWindow::Steps(d) => d,
        }
    }

    /// Validates all parameter ranges. `lines` maps keys to source lines for
    /// error reporting.
    fn validate_at(&self, lines: &HashMap<String, usize>) -> Result<(), ScenarioError> {
        let fail = |key: &str, reason: String| ScenarioError::Invalid {
            at: lines.get(key).map_or(Location::Default, |&l| Location::Line(l)),
            key: key.to_string(),
            reason,
        };
        let check = |ok: bool, key: &str, reason: &str| if ok { Ok(()) } else { Err(fail(key, reason.to_string())) };
        let dim = self.dimension;
        check(dim == 2 || dim == 3, "dimension", "must be 2 or 3")?;
        check(
            !self.name.is_empty() && !self.name.contains(['#', '\n', '\r']) && self.name.trim() == self.name,
            "name",
            "must be non-empty, trimmed and free of `#`",
        )?;
        check(self.dt > 0.0 && self.dt.is_finite(), "dt", "must be positive")?;
        check(self.steps >= 1, "steps", "must be at least 1")?;
        check(self.output_stride >= 1, "output_stride", "must be at least 1")?;
        for (key, v) in [
            ("fluid.gravity", &self.fluid.gravity),
            ("container.min", &self.container.min),
            ("container.max", &self.container.max),
            ("block.min", &self.block.min),
            ("block.max", &self.block.max),
        ] {
            check(v.len() == dim, key, "needs one component per dimension")?;
            check(v.iter().all(|c| c.is_finite()), key, "must be finite")?;
        }
        let f = &self.fluid;
        check(f.h > 0.0 && f.h.is_finite(), "fluid.h", "must be positive")?;
        check(f.rho0 > 0.0 && f.rho0.is_finite(), "fluid.rho0", "must be positive")?;
        check(f.k_pressure >= 0.0 && f.k_pressure.is_finite(), "fluid.k_pressure", "must be non-negative")?;
        check(f.k_near >= 0.0 && f.k_near.is_finite(), "fluid.k_near", "must be non-negative")?;
        check(f.sigma >= 0.0 && f.sigma.is_finite(), "fluid.sigma", "must be non-negative")?;
        check(f.beta >= 0.0 && f.beta.is_finite(), "fluid.beta", "must be non-negative")?;
        check(f.particle_mass > 0.0 && f.particle_mass.is_finite(), "fluid.particle_mass", "must be positive")?;
        let s = &self.spring;
        check(s.q > 0.0 && s.q < 1.0, "spring.q", "must lie in the open interval (0, 1)")?;
        check(s.k_min >= 0.0 && s.k_min.is_finite(), "spring.k_min", "must be non-negative")?;
        check(s.k_hist >= 0.0 && s.k_hist.is_finite(), "spring.k_hist", "must be non-negative")?;
        check(s.alpha >= 0.0 && s.alpha * self.dt < 1.0, "spring.alpha", "must satisfy 0 <= alpha * dt < 1")?;
        check((0.0..1.0).contains(&s.gamma), "spring.gamma", "must lie in [0, 1)")?;
        let c = &self.container;
        check(
            c.min.iter().zip(&c.max).all(|(a, b)| a < b),
            "container.max",
            "must exceed container.min on every axis",
        )?;
        check(c.wall_band > 0.0 && c.wall_band.is_finite(), "container.wall_band", "must be positive")?;
        let b = &self.block;
        check(b.spacing > 0.0 && b.spacing.is_finite(), "block.spacing", "must be positive")?;
        check((0.0..0.5).contains(&b.jitter), "block.jitter", "must lie in [0, 0.5)")?;
        check(
            b.min.iter().zip(&b.max).all(|(a, b)| a <= b),
            "block.max",
            "must not be below block.min",
        )?;
        check(
            (0..dim).all(|a| b.min[a] >= c.min[a] && b.max[a] <= c.max[a]),
            "block.max",
            "block must lie inside the container",
        )?;
        if let Some(sp) = &self.sphere {
            for (key, v) in [("sphere.center", &sp.center), ("sphere.velocity", &sp.velocity)] {
                check(v.len() == dim, key, "needs one component per dimension")?;
                check(v.iter().all(|c| c.is_finite()), key, "must be finite")?;
            }
            check(sp.radius > 0.0 && sp.radius.is_finite(), "sphere.radius", "must be positive")?;
            check(sp.mass > 0.0 && sp.mass.is_finite(), "sphere.mass", "must be positive")?;
            check(sp.release >= 0.0 && sp.release.is_finite(), "sphere.release", "must be non-negative")?;
            check(
                (0..dim).all(|a| 2.0 * sp.radius < c.max[a] - c.min[a]),
                "sphere.radius",
                "sphere does not fit inside the container",
            )?;
        }
        if let Some(v) = &self.vibration {
            check(v.band >= 0.0 && v.band.is_finite(), "vibration.band", "must be non-negative")?;
            check(v.amplitude >= 0.0 && v.amplitude.is_finite(), "vibration.amplitude", "must be non-negative")?;
            check(v.frequency > 0.0 && v.frequency.is_finite(), "vibration.frequency", "must be positive")?;
            check(
                v.frequency_step >= 0.0 && v.frequency_step.is_finite(),
                "vibration.frequency_step",
                "must be non-negative",
            )?;
            check(v.width > 0.0 && v.width.is_finite(), "vibration.width", "must be positive")?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        self.validate_at(&HashMap::new())
    }

    /// Renders the scenario in the file format; `parse_scenario` inverts it.
    pub fn serialize(&self) -> String {
        fn vec(v: &[f64]) -> String {
            v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", ")
        }
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        kv("name", self.name.clone());
        kv("dimension", self.dimension.to_string());
        kv("dt", self.dt.to_string());
        kv("steps", self.steps.to_string());
        kv("seed", self.seed.to_string());
        kv("output_stride", self.output_stride.to_string());
        let f = &self.fluid;
        kv("fluid.h", f.h.to_string());
        kv("fluid.rho0", f.rho0.to_string());
        kv("fluid.k_pressure", f.k_pressure.to_string());
        kv("fluid.k_near", f.k_near.to_string());
        kv("fluid.sigma", f.sigma.to_string());
        kv("fluid.beta", f.beta.to_string());
        kv("fluid.gravity", vec(&f.gravity));
        kv("fluid.particle_mass", f.particle_mass.to_string());
        let s = &self.spring;
        kv("spring.k_min", s.k_min.to_string());
        kv("spring.k_hist", s.k_hist.to_string());
        kv("spring.q", s.q.to_string());
        kv(
            "spring.d",
            match s.window {
                HistoryWindow::OneSecond => "auto".into(),
                HistoryWindow::Full => "full".into(),
                HistoryWindow::Steps(d) => d.to_string(),
            },
        );
        kv("spring.alpha", s.alpha.to_string());
        kv("spring.gamma", s.gamma.to_string());
        kv("spring.history", s.history.to_string());
        kv("container.min", vec(&self.container.min));
        kv("container.max", vec(&self.container.max));
        kv("container.wall_band", self.container.wall_band.to_string());
        kv("block.min", vec(&self.block.min));
        kv("block.max", vec(&self.block.max));
        kv("block.spacing", self.block.spacing.to_string());
        kv("block.jitter", self.block.jitter.to_string());
        kv("sphere.enabled", self.sphere.is_some().to_string());
        if let Some(sp) = &self.sphere {
            kv("sphere.center", vec(&sp.center));
            kv("sphere.radius", sp.radius.to_string());
            kv("sphere.velocity", vec(&sp.velocity));
            kv("sphere.mass", sp.mass.to_string());
            kv("sphere.release", sp.release.to_string());
        }
        kv("vibration.enabled", self.vibration.is_some().to_string());
        if let Some(v) = &self.vibration {
            kv("vibration.band", v.band.to_string());
            kv("vibration.amplitude", v.amplitude.to_string());
            kv("vibration.frequency", v.frequency.to_string());
            kv("vibration.frequency_step", v.frequency_step.to_string());
            kv("vibration.sources", v.sources.to_string());
            kv("vibration.width", v.width.to_string());
        }
        out
    }

    /// Lattice positions of the initial block, jittered by the scenario seed.
    pub fn initial_positions<const D: usize>(&self) -> Vec<Vector<D>> {
        let b = &self.block;
        let counts: Vec<usize> = (0..D)
            .map(|a| (((b.max[a] - b.min[a]) / b.spacing) + 1e-9).floor().max(0.0) as usize)
            .collect();
        let total: usize = counts.iter().product();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut out = Vec::with_capacity(total);
        for flat in 0..total {
            let mut rem = flat;
            let x = Vector::<D>::from_fn(|a, _| {
                let k = rem % counts[a];
                rem /= counts[a];
                b.min[a] + b.spacing * (k as f64 + 0.5)
            });
            let offset = if b.jitter > 0.0 {
                Vector::<D>::from_fn(|_, _| rng.random_range(-b.jitter..b.jitter) * b.spacing)
            } else {
                Vector::<D>::zeros()
            };
            out.push(x + offset);
        }
        out
    }

    /// Builds a world of dimension `D`, which must match `self.dimension`.
    pub fn build_world<const D: usize>(&self) -> Result<World<D>, ScenarioError> {
        self.validate()?;
        let invalid = |key: &str, reason: String| ScenarioError::Invalid {
            at: Location::Default,
            key: key.into(),
            reason,
        };
        if D != self.dimension {
            return Err(invalid("dimension", format!("scenario is {}D, world is {D}D", self.dimension)));
        }
        let v = |c: &[f64]| Vector::<D>::from_fn(|a, _| c[a]);
        let window = self.history_window();
        let fluid = FluidParams {
            h: self.fluid.h,
            rho0: self.fluid.rho0,
            k_pressure: self.fluid.k_pressure,
            k_near: self.fluid.k_near,
            sigma: self.fluid.sigma,
            beta: self.fluid.beta,
            dt: self.dt,
            gravity: v(&self.fluid.gravity),
            particle_mass: self.fluid.particle_mass,
        };
        let springs = SpringParams {
            k_min: self.spring.k_min,
            k_hist: self.spring.k_hist,
            q: self.spring.q,
            d: window,
            alpha: self.spring.alpha,
            gamma: self.spring.gamma,
        };
        let container = Container {
            min: v(&self.container.min),
            max: v(&self.container.max),
            wall_band: self.container.wall_band,
        };
        let particles = self
            .initial_positions::<D>()
            .into_iter()
            .map(|x| Particle::new(x, Vector::<D>::zeros(), window))
            .collect();
        let mut world =
            World::new(particles, fluid, springs, container, self.seed).map_err(|e| invalid("scenario", e.to_string()))?;
        world.history_enabled = self.spring.history;
        world.sphere = self.sphere.as_ref().map(|s| RigidSphere {
            center: v(&s.center),
            radius: s.radius,
            velocity: v(&s.velocity),
            mass: s.mass,
            active: s.release == 0.0,
            release_step: (s.release / self.dt).round() as u64,
        });
        world.vibration = self.vibration.as_ref().map(|c| {
            Vibration::new(VibrationSource {
                band: c.band,
                amplitude: c.amplitude,
                base_frequency: c.frequency,
                frequency_step: c.frequency_step,
                seed: self.seed,
                sources: c.sources,
                width: c.width,
            }, D - 1)
        });
        Ok(world)
    }
}

impl Default for Scenario {
    fn default() -> Self {
        Self::default_for(2)
    }
}

struct Entry<'a> {
    line: usize,
    key: &'a str,
    value: &'a str,
}

/// Parses and validates a scenario file.
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let mut entries: Vec<Entry> = Vec::new();
    let mut lines: HashMap<String, usize> = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| ScenarioError::Syntax {
            line,
            text: content.to_string(),
        })?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            return Err(ScenarioError::Syntax {
                line,
                text: content.to_string(),
            });
        }
        if !KEYS.contains(&key) {
            return Err(ScenarioError::UnknownKey {
                line,
                key: key.to_string(),
            });
        }
        if lines.insert(key.to_string(), line).is_some() {
            return Err(ScenarioError::DuplicateKey {
                line,
                key: key.to_string(),
            });
        }
        entries.push(Entry { line, key, value });
    }

    let dimension = match entries.iter().find(|e| e.key == "dimension") {
        Some(e) => parse_num::<usize>(e)?,
        None => 2,
    };
    let mut s = Scenario::default_for(dimension);
    let sphere_on = entries.iter().find(|e| e.key == "sphere.enabled").map(parse_bool).transpose()?;
    let vibration_on = entries
        .iter()
        .find(|e| e.key == "vibration.enabled")
        .map(parse_bool)
        .transpose()?;
    let mut sphere = SphereConfig {
        center: vec_of(dimension, [1.0, 1.6], 0.25),
        radius: 0.2,
        velocity: vec_of(dimension, [0.0, 0.0], 0.0),
        mass: 100.0,
        release: 0.0,
    };
    let mut vibration = VibrationConfig {
        band: 0.1,
        amplitude: 0.5,
        frequency: 10.0,
        frequency_step: 0.5,
        sources: 0,
        width: 0.5,
    };

    for e in &entries {
        match e.key {
            "name" => s.name = e.value.to_string(),
            "dimension" => s.dimension = dimension,
            "dt" => s.dt = parse_num(e)?,
            "steps" => s.steps = parse_num(e)?,
            "seed" => s.seed = parse_num(e)?,
            "output_stride" => s.output_stride = parse_num(e)?,
            "fluid.h" => s.fluid.h = parse_num(e)?,
            "fluid.rho0" => s.fluid.rho0 = parse_num(e)?,
            "fluid.k_pressure" => s.fluid.k_pressure = parse_num(e)?,
            "fluid.k_near" => s.fluid.k_near = parse_num(e)?,
            "fluid.sigma" => s.fluid.sigma = parse_num(e)?,
            "fluid.beta" => s.fluid.beta = parse_num(e)?,
            "fluid.gravity" => s.fluid.gravity = parse_vec(e)?,
            "fluid.particle_mass" => s.fluid.particle_mass = parse_num(e)?,
            "spring.k_min" => s.spring.k_min = parse_num(e)?,
            "spring.k_hist" => s.spring.k_hist = parse_num(e)?,
            "spring.q" => s.spring.q = parse_num(e)?,
            "spring.d" => {
                s.spring.window = match e.value {
                    "auto" => HistoryWindow::OneSecond,
                    "full" => HistoryWindow::Full,
                    _ => HistoryWindow::Steps(parse_num(e)?),
                }
            }
            "spring.alpha" => s.spring.alpha = parse_num(e)?,
            "spring.gamma" => s.spring.gamma = parse_num(e)?,
            "spring.history" => s.spring.history = parse_bool(e)?,
            "container.min" => s.container.min = parse_vec(e)?,
            "container.max" => s.container.max = parse_vec(e)?,
            "container.wall_band" => s.container.wall_band = parse_num(e)?,
            "block.min" => s.block.min = parse_vec(e)?,
            "block.max" => s.block.max = parse_vec(e)?,
            "block.spacing" => s.block.spacing = parse_num(e)?,
            "block.jitter" => s.block.jitter = parse_num(e)?,
            "sphere.enabled" | "vibration.enabled" => {}
            "sphere.center" => sphere.center = parse_vec(e)?,
            "sphere.radius" => sphere.radius = parse_num(e)?,
            "sphere.velocity" => sphere.velocity = parse_vec(e)?,
            "sphere.mass" => sphere.mass = parse_num(e)?,
            "sphere.release" => sphere.release = parse_num(e)?,
            "vibration.band" => vibration.band = parse_num(e)?,
            "vibration.amplitude" => vibration.amplitude = parse_num(e)?,
            "vibration.frequency" => vibration.frequency = parse_num(e)?,
            "vibration.frequency_step" => vibration.frequency_step = parse_num(e)?,
            "vibration.sources" => vibration.sources = parse_num(e)?,
            "vibration.width" => vibration.width = parse_num(e)?,
            other => unreachable!("key {other} passed the known-key check"),
        }
    }
    if sphere_on == Some(true) {
        s.sphere = Some(sphere);
    }
    if vibration_on == Some(true) {
        s.vibration = Some(vibration);
    }
    s.validate_at(&lines)?;
    Ok(s)
}

fn invalid(e: &Entry, reason: impl Into<String>) -> ScenarioError {
    ScenarioError::Invalid {
        at: Location::Line(e.line),
        key: e.key.to_string(),
        reason: reason.into(),
    }
}

fn parse_num<T: std::str::FromStr>(e: &Entry) -> Result<T, ScenarioError>
where
    T::Err: fmt::Display,
{
    e.value
        .parse()
        .map_err(|err| invalid(e, format!("`{}`: {err}", e.value)))
}

fn parse_bool(e: &Entry) -> Result<bool, ScenarioError> {
    match e.value {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(invalid(e, format!("expected true or false, found `{other}`"))),
    }
}

fn parse_vec(e: &Entry) -> Result<Vec<f64>, ScenarioError> {
    e.value
        .split(',')
        .map(|c| {
            c.trim()
                .parse::<f64>()
                .map_err(|err| invalid(e, format!("component `{}`: {err}", c.trim())))
        })
        .collect()
}
