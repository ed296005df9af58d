//! Container, drivers and the simulation step.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::frackernel::{FracWeights, KernelError};
use crate::sph::{self, jitter_direction, FluidParams, Particle};
use crate::springs::{accumulate_history_sums, SpringNetwork, SpringParams};
use crate::{Vector, VERTICAL};

/// Axis-aligned box holding the fluid. Particles closer than `wall_band` to a
/// wall are treated as boundary particles.
#[derive(Debug, Clone, PartialEq)]
pub struct Container<const D: usize> {
    pub min: Vector<D>,
    pub max: Vector<D>,
    pub wall_band: f64,
}

impl<const D: usize> Container<D> {
    pub fn contains(&self, x: &Vector<D>) -> bool {
        (0..D).all(|a| x[a] >= self.min[a] && x[a] <= self.max[a])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RigidSphere<const D: usize> {
    pub center: Vector<D>,
    pub radius: f64,
    pub velocity: Vector<D>,
    pub mass: f64,
    /// An inactive sphere is held in place and ignored by the fluid.
    pub active: bool,
    /// Step from which an inactive sphere becomes active.
    pub release_step: u64,
}

/// Vertical velocity injection near the container floor. With `sources == 0`
/// the whole bottom band is driven by one oscillator; otherwise `sources`
/// patches of width `width` are spaced equally along each horizontal axis,
/// each with its own oscillator.
#[derive(Debug, Clone, PartialEq)]
pub struct VibrationSource {
    /// Height of the driven band above the container floor (m).
    pub band: f64,
    /// Velocity amplitude (m/s).
    pub amplitude: f64,
    /// Base frequency (Hz).
    pub base_frequency: f64,
    /// Largest change of the frequency per step (Hz).
    pub frequency_step: f64,
    pub seed: u64,
    pub sources: usize,
    /// Horizontal extent of each source patch (m).
    pub width: f64,
}

#[derive(Debug, Clone)]
struct Oscillator {
    rng: ChaCha8Rng,
    frequency: f64,
    phase: f64,
}

/// Running state of the vibration sources: one random-walk frequency and
/// phase per oscillator.
#[derive(Debug, Clone)]
pub struct Vibration {
    pub source: VibrationSource,
    oscillators: Vec<Oscillator>,
}

impl Vibration {
    /// `horizontal_axes` is the number of horizontal axes (`D - 1`); it fixes
    /// how many oscillators a patterned source needs.
    pub fn new(source: VibrationSource, horizontal_axes: usize) -> Self {
        let count = if source.sources == 0 {
            1
        } else {
            source.sources.pow(horizontal_axes as u32)
        };
        let oscillators = (0..count as u64)
            .map(|k| Oscillator {
                rng: ChaCha8Rng::seed_from_u64(source.seed.wrapping_add(k.wrapping_mul(0x9E37_79B9_7F4A_7C15))),
                frequency: source.base_frequency,
                phase: 0.0,
            })
            .collect();
        Self { source, oscillators }
    }

    pub fn oscillator_count(&self) -> usize {
        self.oscillators.len()
    }

    pub fn frequency(&self, k: usize) -> f64 {
        self.oscillators[k].frequency
    }

    /// Current velocity kick `A sin(phase)` of oscillator `k`.
    pub fn signal(&self, k: usize) -> f64 {
        self.source.amplitude * self.oscillators[k].phase.sin()
    }

    /// Advances every phase by one step and takes one random-walk step of each
    /// frequency, kept within half and twice the base frequency.
    pub fn advance(&mut self, dt: f64) {
        let step = self.source.frequency_step;
        let f0 = self.source.base_frequency;
        for osc in &mut self.oscillators {
            osc.phase += 2.0 * std::f64::consts::PI * osc.frequency * dt;
            if step > 0.0 {
                osc.frequency = (osc.frequency + osc.rng.random_range(-step..=step)).clamp(0.5 * f0, 2.0 * f0);
            }
        }
    }

    /// Oscillator driving a particle at `x`, if any.
    fn oscillator_at<const D: usize>(&self, x: &Vector<D>, container: &Container<D>) -> Option<usize> {
        if x[VERTICAL] >= container.min[VERTICAL] + self.source.band {
            return None;
        }
        let n = self.source.sources;
        if n == 0 {
            return Some(0);
        }
        let mut flat = 0;
        for a in (0..D).filter(|&a| a != VERTICAL) {
            let span = container.max[a] - container.min[a];
            let u = (x[a] - container.min[a]) / span * n as f64;
            let cell = (u.floor().max(0.0) as usize).min(n - 1);
            let offset = (u - (cell as f64 + 0.5)).abs() * span / n as f64;
            if offset >= 0.5 * self.source.width {
                return None;
            }
            flat = flat * n + cell;
        }
        Some(flat)
    }
}

/// Adds the vibration signal of the covering source to the vertical velocity
/// of every particle in a driven region.
pub fn apply_vibration<const D: usize>(particles: &mut [Particle<D>], vibration: &Vibration, container: &Container<D>) {
    if vibration.source.amplitude == 0.0 {
        return;
    }
    for p in particles.iter_mut() {
        if let Some(k) = vibration.oscillator_at(&p.position, container) {
            p.velocity[VERTICAL] += vibration.signal(k);
        }
    }
}

/// Sticky walls: clamps particles into the container, cancels the wall-normal
/// velocity of boundary particles and scales their tangential velocity by
/// `k_min / (k_min + s)`, with `s` the particle's mean history stiffness.
pub fn process_boundaries<const D: usize>(particles: &mut [Particle<D>], container: &Container<D>, k_min: f64) {
    particles.par_iter_mut().for_each(|p| {
        let mut boundary = false;
        let mut normal = [false; D];
        for a in 0..D {
            let x = p.position[a];
            if x <= container.min[a] + container.wall_band {
                boundary = true;
                normal[a] = true;
                if x < container.min[a] {
                    p.position[a] = container.min[a];
                }
            } else if x >= container.max[a] - container.wall_band {
                boundary = true;
                normal[a] = true;
                if x > container.max[a] {
                    p.position[a] = container.max[a];
                }
            }
        }
        p.boundary = boundary;
        if !boundary {
            return;
        }
        let s = p.avg_hist_stiffness;
        let scale = if s > 0.0 { k_min / (k_min + s) } else { 1.0 };
        for a in 0..D {
            if normal[a] {
                p.velocity[a] = 0.0;
            } else {
                p.velocity[a] *= scale;
            }
        }
    });
}

/// Clamps stray particles back into the container, cancelling the normal
/// velocity on the clamped axes.
fn clamp_into<const D: usize>(particles: &mut [Particle<D>], container: &Container<D>) {
    for p in particles.iter_mut() {
        for a in 0..D {
            if p.position[a] < container.min[a] {
                p.position[a] = container.min[a];
                p.velocity[a] = 0.0;
            } else if p.position[a] > container.max[a] {
                p.position[a] = container.max[a];
                p.velocity[a] = 0.0;
            }
        }
    }
}

/// Momentum exchanged in one sphere coupling pass.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Contact {
    pub touched: usize,
}

/// Projects particles inside the sphere onto its surface and removes their
/// approaching normal velocity with a mass-weighted impulse that the sphere
/// receives with opposite sign. Particles are visited in index order.
pub fn couple_sphere<const D: usize>(
    particles: &mut [Particle<D>],
    sphere: &mut RigidSphere<D>,
    particle_mass: f64,
    seed: u64,
) -> Contact {
    let mut contact = Contact::default();
    if !sphere.active {
        return contact;
    }
    let r2 = sphere.radius * sphere.radius;
    let reduced = particle_mass * sphere.mass / (particle_mass + sphere.mass);
    for (i, p) in particles.iter_mut().enumerate() {
        let offset = p.position - sphere.center;
        let d2 = offset.norm_squared();
        if d2 >= r2 {
            continue;
        }
        contact.touched += 1;
        let d = d2.sqrt();
        let normal = if d > 0.0 {
            offset / d
        } else {
            jitter_direction(seed, u32::MAX, i as u32)
        };
        p.position = sphere.center + normal * sphere.radius;
        let approach = (p.velocity - sphere.velocity).dot(&normal);
        if approach < 0.0 {
            let impulse = -approach * reduced;
            p.velocity += normal * (impulse / particle_mass);
            sphere.velocity -= normal * (impulse / sphere.mass);
        }
    }
    contact
}

/// Keeps the sphere inside the container, zeroing the velocity component
/// pointing into a wall it touches.
fn confine_sphere<const D: usize>(sphere: &mut RigidSphere<D>, container: &Container<D>) {
    for a in 0..D {
        let lo = container.min[a] + sphere.radius;
        let hi = container.max[a] - sphere.radius;
        if sphere.center[a] <= lo {
            sphere.center[a] = lo;
            sphere.velocity[a] = sphere.velocity[a].max(0.0);
        } else if sphere.center[a] >= hi {
            sphere.center[a] = hi;
            sphere.velocity[a] = sphere.velocity[a].min(0.0);
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum WorldError {
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Fluid(#[from] sph::ParamError),
    #[error(transparent)]
    Spring(#[from] crate::springs::SpringParamError),
    #[error("invalid world setup: {0}")]
    Setup(String),
}

/// Non-finite state detected after a step.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("non-finite state at step {step}, particle {particle}: x = {position:?}, v = {velocity:?}")]
pub struct StepError {
    pub step: u64,
    /// `usize::MAX` marks the rigid sphere.
    pub particle: usize,
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
}

/// Timings and counters of one step.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StepReport {
    pub step_ms: f64,
    /// Time spent accumulating the per-particle history sums.
    pub history_ms: f64,
    /// Weighted velocity terms accumulated in the history phase.
    pub history_ops: u64,
    pub coincident_pairs: usize,
    /// Particles projected out of the sphere this step.
    pub sphere_contacts: usize,
}

#[derive(Debug, Clone)]
pub struct World<const D: usize> {
    pub particles: Vec<Particle<D>>,
    pub springs: SpringNetwork,
    pub fluid: FluidParams<D>,
    pub spring_params: SpringParams,
    pub container: Container<D>,
    pub sphere: Option<RigidSphere<D>>,
    pub vibration: Option<Vibration>,
    /// When false the history phase is skipped and springs use `k_min` only.
    pub history_enabled: bool,
    pub seed: u64,
    weights: FracWeights,
    step: u64,
}

impl<const D: usize> World<D> {
    pub fn new(
        particles: Vec<Particle<D>>,
        fluid: FluidParams<D>,
        spring_params: SpringParams,
        container: Container<D>,
        seed: u64,
    ) -> Result<Self, WorldError> {
        fluid.validate()?;
        spring_params.validate()?;
        if !(0..D).all(|a| container.min[a] < container.max[a]) || !(container.wall_band > 0.0) {
            return Err(WorldError::Setup("container needs min < max and a positive wall band".into()));
        }
        let weights = FracWeights::new(spring_params.q, spring_params.d, fluid.dt)?;
        Ok(Self {
            particles,
            springs: SpringNetwork::new(),
            fluid,
            spring_params,
            container,
            sphere: None,
            vibration: None,
            history_enabled: true,
            seed,
            weights,
            step: 0,
        })
    }

    /// Index of the latest completed step; histories hold velocities through it.
    pub fn step_index(&self) -> u64 {
        self.step
    }

    pub fn time(&self) -> f64 {
        self.step as f64 * self.fluid.dt
    }

    pub fn weights(&self) -> &FracWeights {
        &self.weights
    }

    /// Advances by one timestep.
    pub fn step(&mut self) -> Result<StepReport, StepError> {
        let started = Instant::now();
        let mut report = StepReport::default();
        let dt = self.fluid.dt;
        let n = self.step;

        let gravity = self.fluid.gravity * dt;
        self.particles.par_iter_mut().for_each(|p| p.velocity += gravity);

        let (_, neighbors) = sph::rebuild_index(&self.particles, self.fluid.h);
        sph::apply_viscosity(&mut self.particles, &neighbors, &self.fluid, self.seed);

        self.particles.par_iter_mut().for_each(|p| {
            p.previous_position = p.position;
            p.position += p.velocity * dt;
        });

        let (_, neighbors) = sph::rebuild_index(&self.particles, self.fluid.h);
        self.springs
            .adjust(&self.particles, &neighbors, &self.spring_params, self.fluid.h, dt);

        let sums = if self.history_enabled {
            let t = Instant::now();
            let window = self.weights.window(n);
            let sums = accumulate_history_sums(&self.particles, &window);
            report.history_ms = t.elapsed().as_secs_f64() * 1e3;
            report.history_ops = self.particles.iter().map(|p| p.history.len().min(window.len()) as u64).sum();
            Some(sums)
        } else {
            None
        };
        let history = sums.as_deref().map(|s| (s, self.weights.prefactor()));
        let spring_dx = self
            .springs
            .displacements(&self.particles, history, &self.spring_params, dt, self.seed);
        self.particles
            .par_iter_mut()
            .zip(spring_dx)
            .for_each(|(p, dx)| p.position += dx);

        report.coincident_pairs = sph::double_density_relaxation(&mut self.particles, &neighbors, &self.fluid, self.seed);

        let inv_dt = 1.0 / dt;
        self.particles
            .par_iter_mut()
            .for_each(|p| p.velocity = (p.position - p.previous_position) * inv_dt);

        let means = self.springs.mean_hist_stiffness(self.particles.len());
        for (p, s) in self.particles.iter_mut().zip(means) {
            p.avg_hist_stiffness = s;
        }
        process_boundaries(&mut self.particles, &self.container, self.spring_params.k_min);

        if let Some(sphere) = self.sphere.as_mut() {
            sphere.active |= n >= sphere.release_step;
        }
        if let Some(sphere) = self.sphere.as_mut().filter(|s| s.active) {
            sphere.velocity += self.fluid.gravity * dt;
            sphere.center += sphere.velocity * dt;
            report.sphere_contacts = couple_sphere(&mut self.particles, sphere, self.fluid.particle_mass, self.seed).touched;
            confine_sphere(sphere, &self.container);
        }
        if let Some(vibration) = self.vibration.as_mut() {
            apply_vibration(&mut self.particles, vibration, &self.container);
            vibration.advance(dt);
        }
        clamp_into(&mut self.particles, &self.container);

        self.step += 1;
        self.check_finite()?;
        self.particles.par_iter_mut().for_each(|p| p.history.push(p.velocity));

        report.step_ms = started.elapsed().as_secs_f64() * 1e3;
        Ok(report)
    }

    fn check_finite(&self) -> Result<(), StepError> {
        let bad = |x: &Vector<D>, v: &Vector<D>| !(x.iter().chain(v.iter()).all(|c| c.is_finite()));
        if let Some((i, p)) = self
            .particles
            .iter()
            .enumerate()
            .find(|(_, p)| bad(&p.position, &p.velocity))
        {
            return Err(StepError {
                step: self.step,
                particle: i,
                position: p.position.iter().copied().collect(),
                velocity: p.velocity.iter().copied().collect(),
            });
        }
        if let Some(s) = self.sphere.as_ref().filter(|s| bad(&s.center, &s.velocity)) {
            return Err(StepError {
                step: self.step,
                particle: usize::MAX,
                position: s.center.iter().copied().collect(),
                velocity: s.velocity.iter().copied().collect(),
            });
        }
        Ok(())
    }
}
