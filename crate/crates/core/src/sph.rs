//! Particle storage, neighbour search and the double-density fluid phases.
//!
//! All pairwise phases are written in gather form: every particle sums the
//! contributions of its sorted neighbour row, so results do not depend on how
//! the particle loop is split across threads.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::frackernel::VelocityHistory;
use crate::Vector;

#[derive(Debug, Clone, PartialEq)]
pub struct Particle<const D: usize> {
    pub position: Vector<D>,
    pub previous_position: Vector<D>,
    pub velocity: Vector<D>,
    pub history: VelocityHistory<D>,
    /// Set while the particle sits inside a container wall band.
    pub boundary: bool,
    /// Mean history stiffness of the springs attached to this particle.
    pub avg_hist_stiffness: f64,
}

impl<const D: usize> Particle<D> {
    /// A particle whose history keeps `window + 1` velocities, seeded with the
    /// initial velocity as the sample of step 0.
    pub fn new(position: Vector<D>, velocity: Vector<D>, window: usize) -> Self {
        let mut history = VelocityHistory::new(window);
        history.push(velocity);
        Self {
            position,
            previous_position: position,
            velocity,
            history,
            boundary: false,
            avg_hist_stiffness: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("invalid fluid parameter {name}: {reason}")]
pub struct ParamError {
    pub name: &'static str,
    pub reason: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FluidParams<const D: usize> {
    /// Interaction radius.
    pub h: f64,
    /// Rest density in kernel units.
    pub rho0: f64,
    pub k_pressure: f64,
    pub k_near: f64,
    /// Linear viscosity.
    pub sigma: f64,
    /// Quadratic viscosity.
    pub beta: f64,
    pub dt: f64,
    pub gravity: Vector<D>,
    /// Mass of one particle, used when exchanging momentum with rigid drivers.
    pub particle_mass: f64,
}

impl<const D: usize> FluidParams<D> {
    pub fn validate(&self) -> Result<(), ParamError> {
        let check = |ok: bool, name, reason| if ok { Ok(()) } else { Err(ParamError { name, reason }) };
        check(self.h > 0.0 && self.h.is_finite(), "h", "must be positive")?;
        check(self.dt > 0.0 && self.dt.is_finite(), "dt", "must be positive")?;
        check(self.rho0 > 0.0 && self.rho0.is_finite(), "rho0", "must be positive")?;
        check(self.k_pressure >= 0.0, "k_pressure", "must be non-negative")?;
        check(self.k_near >= 0.0, "k_near", "must be non-negative")?;
        check(self.sigma >= 0.0, "sigma", "must be non-negative")?;
        check(self.beta >= 0.0, "beta", "must be non-negative")?;
        check(self.particle_mass > 0.0, "particle_mass", "must be positive")?;
        check(self.gravity.iter().all(|g| g.is_finite()), "gravity", "must be finite")
    }
}

type Cell<const D: usize> = [i64; D];

/// Uniform hash grid with cell size equal to the interaction radius.
#[derive(Debug, Clone)]
pub struct SpatialHash<const D: usize> {
    cell_size: f64,
    cells: HashMap<Cell<D>, Vec<u32>>,
}

impl<const D: usize> SpatialHash<D> {
    pub fn new(cell_size: f64) -> Self {
        assert!(cell_size > 0.0, "cell size must be positive");
        Self {
            cell_size,
            cells: HashMap::new(),
        }
    }

    /// Indexes `positions`; each cell lists its particles in ascending order.
    pub fn build<'a>(cell_size: f64, positions: impl IntoIterator<Item = &'a Vector<D>>) -> Self {
        let mut hash = Self::new(cell_size);
        for (i, x) in positions.into_iter().enumerate() {
            hash.cells.entry(hash.cell_of(x)).or_default().push(i as u32);
        }
        hash
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn cell_of(&self, x: &Vector<D>) -> Cell<D> {
        std::array::from_fn(|a| (x[a] / self.cell_size).floor() as i64)
    }

    pub fn len(&self) -> usize {
        self.cells.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Every indexed particle in the 3^D block of cells around `x`. A superset
    /// of the particles within one cell size of `x`, in no particular order.
    pub fn candidates(&self, x: &Vector<D>, out: &mut Vec<u32>) {
        out.clear();
        let base = self.cell_of(x);
        let blocks = 3usize.pow(D as u32);
        for code in 0..blocks {
            let mut rem = code;
            let cell: Cell<D> = std::array::from_fn(|a| {
                let off = (rem % 3) as i64 - 1;
                rem /= 3;
                base[a] + off
            });
            if let Some(list) = self.cells.get(&cell) {
                out.extend_from_slice(list);
            }
        }
    }
}

/// Compressed per-particle neighbour rows; each row is sorted ascending and
/// holds every other particle strictly closer than `h`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NeighborList {
    offsets: Vec<usize>,
    indices: Vec<u32>,
}

impl NeighborList {
    pub fn len(&self) -> usize {
        self.offsets.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.indices[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn pair_count(&self) -> usize {
        self.indices.len() / 2
    }

    /// Unordered pairs `(i, j)` with `i < j`, lexicographically sorted.
    pub fn pairs(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.len()).flat_map(move |i| {
            self.row(i)
                .iter()
                .filter(move |&&j| j as usize > i)
                .map(move |&j| (i as u32, j))
        })
    }

    pub fn from_rows(rows: Vec<Vec<u32>>) -> Self {
        let mut offsets = Vec::with_capacity(rows.len() + 1);
        let mut indices = Vec::new();
        offsets.push(0);
        for row in rows {
            indices.extend(row);
            offsets.push(indices.len());
        }
        Self { offsets, indices }
    }
}

/// Builds the hash and the neighbour rows for the current positions.
pub fn rebuild_index<const D: usize>(particles: &[Particle<D>], h: f64) -> (SpatialHash<D>, NeighborList) {
    let hash = SpatialHash::build(h, particles.iter().map(|p| &p.position));
    let neighbors = neighbor_list(&hash, particles, h);
    (hash, neighbors)
}

pub fn neighbor_list<const D: usize>(hash: &SpatialHash<D>, particles: &[Particle<D>], h: f64) -> NeighborList {
    let h2 = h * h;
    let rows: Vec<Vec<u32>> = (0..particles.len())
        .into_par_iter()
        .map_init(Vec::new, |scratch, i| {
            let xi = &particles[i].position;
            hash.candidates(xi, scratch);
            let mut row: Vec<u32> = scratch
                .iter()
                .copied()
                .filter(|&j| j as usize != i && (particles[j as usize].position - xi).norm_squared() < h2)
                .collect();
            row.sort_unstable();
            row
        })
        .collect();
    NeighborList::from_rows(rows)
}

/// Deterministic unit direction used when two particles coincide.
/// Antisymmetric: `jitter_direction(s, i, j) == -jitter_direction(s, j, i)`.
pub fn jitter_direction<const D: usize>(seed: u64, i: u32, j: u32) -> Vector<D> {
    let (lo, hi, sign) = if i < j { (i, j, 1.0) } else { (j, i, -1.0) };
    let key = seed ^ ((lo as u64) << 32 | hi as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    loop {
        let v = Vector::<D>::from_fn(|_, _| rng.random_range(-1.0..1.0));
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return v * (sign / n);
        }
    }
}

/// Distance between `i` and `j` and the unit vector pointing from `i` to `j`.
#[inline]
pub fn separation<const D: usize>(xi: &Vector<D>, xj: &Vector<D>, i: u32, j: u32, seed: u64) -> (f64, Vector<D>) {
    let rij = xj - xi;
    let r = rij.norm();
    if r > 0.0 {
        (r, rij / r)
    } else {
        (0.0, jitter_direction(seed, i, j))
    }
}

/// Velocity changes from the pairwise radial viscosity impulses. For each pair
/// approaching with radial speed `u > 0` the impulse
/// `dt (1 - r/h) (sigma u + beta u^2)` is split evenly between both particles.
pub fn viscosity_deltas<const D: usize>(
    particles: &[Particle<D>],
    neighbors: &NeighborList,
    params: &FluidParams<D>,
    seed: u64,
) -> Vec<Vector<D>> {
    (0..particles.len())
        .into_par_iter()
        .map(|i| {
            let pi = &particles[i];
            let mut dv = Vector::<D>::zeros();
            for &j in neighbors.row(i) {
                let pj = &particles[j as usize];
                let (r, dir) = separation(&pi.position, &pj.position, i as u32, j, seed);
                let q = r / params.h;
                if q >= 1.0 {
                    continue;
                }
                let u = (pi.velocity - pj.velocity).dot(&dir);
                if u > 0.0 {
                    let impulse = dir * (params.dt * (1.0 - q) * (params.sigma * u + params.beta * u * u));
                    dv -= impulse * 0.5;
                }
            }
            dv
        })
        .collect()
}

pub fn apply_viscosity<const D: usize>(
    particles: &mut [Particle<D>],
    neighbors: &NeighborList,
    params: &FluidParams<D>,
    seed: u64,
) {
    let dv = viscosity_deltas(particles, neighbors, params, seed);
    particles.par_iter_mut().zip(dv).for_each(|(p, dv)| p.velocity += dv);
}

/// Far and near densities of every particle.
pub fn densities<const D: usize>(particles: &[Particle<D>], neighbors: &NeighborList, h: f64) -> Vec<(f64, f64)> {
    (0..particles.len())
        .into_par_iter()
        .map(|i| {
            let xi = &particles[i].position;
            let mut rho = 0.0;
            let mut rho_near = 0.0;
            for &j in neighbors.row(i) {
                let q = (particles[j as usize].position - xi).norm() / h;
                if q < 1.0 {
                    let w = 1.0 - q;
                    rho += w * w;
                    rho_near += w * w * w;
                }
            }
            (rho, rho_near)
        })
        .collect()
}

/// Outcome of one relaxation pass.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Relaxation<const D: usize> {
    pub displacements: Vec<Vector<D>>,
    /// Ordered pairs found at zero separation.
    pub coincident_pairs: usize,
}

/// Position displacements of double density relaxation. Every ordered visit
/// `(i, j)` pushes the pair apart by `dt^2 (P_i (1-q) + P_near,i (1-q)^2)`,
/// half to each side; summed per particle this is a symmetric pair term.
pub fn density_displacements<const D: usize>(
    particles: &[Particle<D>],
    neighbors: &NeighborList,
    params: &FluidParams<D>,
    seed: u64,
) -> Relaxation<D> {
    let pressures: Vec<(f64, f64)> = densities(particles, neighbors, params.h)
        .into_iter()
        .map(|(rho, rho_near)| (params.k_pressure * (rho - params.rho0), params.k_near * rho_near))
        .collect();
    let dt2 = params.dt * params.dt;
    let per_particle: Vec<(Vector<D>, usize)> = (0..particles.len())
        .into_par_iter()
        .map(|i| {
            let xi = &particles[i].position;
            let (p_i, pn_i) = pressures[i];
            let mut dx = Vector::<D>::zeros();
            let mut coincident = 0;
            for &j in neighbors.row(i) {
                let (r, dir) = separation(xi, &particles[j as usize].position, i as u32, j, seed);
                if r == 0.0 {
                    coincident += 1;
                }
                let q = r / params.h;
                if q >= 1.0 {
                    continue;
                }
                let w = 1.0 - q;
                let (p_j, pn_j) = pressures[j as usize];
                let mag = dt2 * ((p_i + p_j) * w + (pn_i + pn_j) * w * w);
                dx -= dir * (0.5 * mag);
            }
            (dx, coincident)
        })
        .collect();
    let coincident_pairs = per_particle.iter().map(|(_, c)| c).sum();
    Relaxation {
        displacements: per_particle.into_iter().map(|(dx, _)| dx).collect(),
        coincident_pairs,
    }
}

/// Applies double density relaxation in place and returns the number of
/// coincident ordered pairs that needed a jitter direction.
pub fn double_density_relaxation<const D: usize>(
    particles: &mut [Particle<D>],
    neighbors: &NeighborList,
    params: &FluidParams<D>,
    seed: u64,
) -> usize {
    let relax = density_displacements(particles, neighbors, params, seed);
    particles
        .par_iter_mut()
        .zip(relax.displacements)
        .for_each(|(p, dx)| p.position += dx);
    relax.coincident_pairs
}
