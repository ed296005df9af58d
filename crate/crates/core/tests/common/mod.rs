//! Brute-force references for the pairwise fluid phases. Every routine visits
//! all other particles in ascending index order, which is the order the
//! neighbour rows are sorted in, so the results must agree bit for bit.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thicken_core::sph::separation;
use thicken_core::{FluidParams, Particle, Vector};

pub fn brute_neighbors<const D: usize>(particles: &[Particle<D>], h: f64) -> Vec<Vec<u32>> {
    let h2 = h * h;
    (0..particles.len())
        .map(|i| {
            let xi = particles[i].position;
            (0..particles.len())
                .filter(|&j| j != i && (particles[j].position - xi).norm_squared() < h2)
                .map(|j| j as u32)
                .collect()
        })
        .collect()
}

pub fn brute_viscosity<const D: usize>(particles: &[Particle<D>], params: &FluidParams<D>, seed: u64) -> Vec<Vector<D>> {
    let h2 = params.h * params.h;
    (0..particles.len())
        .map(|i| {
            let pi = &particles[i];
            let mut dv = Vector::<D>::zeros();
            for (j, pj) in particles.iter().enumerate() {
                if j == i || (pj.position - pi.position).norm_squared() >= h2 {
                    continue;
                }
                let (r, dir) = separation(&pi.position, &pj.position, i as u32, j as u32, seed);
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

pub fn brute_relaxation<const D: usize>(particles: &[Particle<D>], params: &FluidParams<D>, seed: u64) -> Vec<Vector<D>> {
    let h = params.h;
    let h2 = h * h;
    let near = |i: usize, j: usize| j != i && (particles[j].position - particles[i].position).norm_squared() < h2;
    let pressures: Vec<(f64, f64)> = (0..particles.len())
        .map(|i| {
            let (mut rho, mut rho_near) = (0.0, 0.0);
            for j in (0..particles.len()).filter(|&j| near(i, j)) {
                let q = (particles[j].position - particles[i].position).norm() / h;
                if q < 1.0 {
                    let w = 1.0 - q;
                    rho += w * w;
                    rho_near += w * w * w;
                }
            }
            (params.k_pressure * (rho - params.rho0), params.k_near * rho_near)
        })
        .collect();
    let dt2 = params.dt * params.dt;
    (0..particles.len())
        .map(|i| {
            let xi = particles[i].position;
            let (p_i, pn_i) = pressures[i];
            let mut dx = Vector::<D>::zeros();
            for j in (0..particles.len()).filter(|&j| near(i, j)) {
                let (r, dir) = separation(&xi, &particles[j].position, i as u32, j as u32, seed);
                let q = r / h;
                if q >= 1.0 {
                    continue;
                }
                let w = 1.0 - q;
                let (p_j, pn_j) = pressures[j];
                dx -= dir * (0.5 * (dt2 * ((p_i + p_j) * w + (pn_i + pn_j) * w * w)));
            }
            dx
        })
        .collect()
}

/// `n` particles with uniform random positions in a cube of side `extent`
/// and random velocities; a few share positions exactly to exercise the
/// coincident-pair path.
pub fn random_particles<const D: usize>(n: usize, extent: f64, seed: u64) -> Vec<Particle<D>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ps: Vec<Particle<D>> = (0..n)
        .map(|_| {
            let x = Vector::<D>::from_fn(|_, _| rng.random_range(0.0..extent));
            let v = Vector::<D>::from_fn(|_, _| rng.random_range(-2.0..2.0));
            Particle::new(x, v, 4)
        })
        .collect();
    for k in 0..n / 100 {
        let src = ps[k].position;
        ps[n - 1 - k].position = src;
    }
    ps
}

pub fn fluid<const D: usize>(h: f64) -> FluidParams<D> {
    let mut gravity = Vector::<D>::zeros();
    gravity[1] = -9.81;
    FluidParams {
        h,
        rho0: 1.3,
        k_pressure: 40.0,
        k_near: 40.0,
        sigma: 0.5,
        beta: 0.1,
        dt: 0.01,
        gravity,
        particle_mass: 1.0,
    }
}
