//! Shared fixtures for the criterion benchmarks.

use thicken_core::{parse_scenario, Particle, World};

/// A 2D block of `nx * ny` particles at spacing 0.05 that has been stepped
/// `warmup` times, with a history window of `d` steps.
pub fn block_world(nx: usize, ny: usize, d: usize, warmup: u64) -> World<2> {
    let (w, h) = (nx as f64 * 0.05, ny as f64 * 0.05);
    let text = format!(
        "block.max = {w}, {h}\ncontainer.max = {}, {}\nspring.d = {d}\n",
        w.max(2.0),
        (2.0 * h).max(2.0)
    );
    let scenario = parse_scenario(&text).expect("fixture scenario");
    let mut world = scenario.build_world::<2>().expect("fixture world");
    for _ in 0..warmup {
        world.step().expect("fixture warm-up");
    }
    world
}

/// Particles of `block_world` with histories filled to capacity.
pub fn full_histories(nx: usize, ny: usize, d: usize) -> Vec<Particle<2>> {
    let mut world = block_world(nx, ny, d, 0);
    for p in &mut world.particles {
        for k in 0..=d {
            let mut v = p.velocity;
            v.x += k as f64 * 1e-3;
            p.history.push(v);
        }
    }
    world.particles
}
