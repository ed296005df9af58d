//! Dynamic springs with plastic rest lengths and history-based stiffness.
//!
//! A spring between `i` and `j` has stiffness
//!
//! ```text
//! kappa = k_hist * dt^(1-q)/Γ(3-q) * |Σ_p a_{p,n} (v_pi - v_pj)| + k_min
//! ```
//!
//! The weighted sum is linear in the velocities, so it is accumulated once per
//! particle (`S_i`) and each spring only takes the difference `S_i - S_j`.

use rayon::prelude::*;

use crate::sph::{separation, NeighborList, Particle};
use crate::Vector;

#[derive(Debug, Clone, PartialEq)]
pub struct Spring {
    pub i: u32,
    pub j: u32,
    pub rest_length: f64,
    /// `kappa - k_min` from the latest displacement pass.
    pub last_hist_stiffness: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("invalid spring parameter {name}: {reason}")]
pub struct SpringParamError {
    pub name: &'static str,
    pub reason: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpringParams {
    pub k_min: f64,
    pub k_hist: f64,
    /// Fractional order.
    pub q: f64,
    /// History window in steps.
    pub d: usize,
    /// Plasticity rate (1/s).
    pub alpha: f64,
    /// Yield ratio.
    pub gamma: f64,
}

impl SpringParams {
    pub fn validate(&self) -> Result<(), SpringParamError> {
        let check = |ok: bool, name, reason| if ok { Ok(()) } else { Err(SpringParamError { name, reason }) };
        check(self.k_min >= 0.0 && self.k_min.is_finite(), "k_min", "must be non-negative")?;
        check(self.k_hist >= 0.0 && self.k_hist.is_finite(), "k_hist", "must be non-negative")?;
        check(self.q > 0.0 && self.q < 1.0, "q", "must lie in (0, 1)")?;
        check(self.alpha >= 0.0 && self.alpha.is_finite(), "alpha", "must be non-negative")?;
        check((0.0..1.0).contains(&self.gamma), "gamma", "must lie in [0, 1)")
    }
}

/// Springs sorted by `(i, j)` with `i < j`, at most one per pair.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SpringNetwork {
    springs: Vec<Spring>,
}

impl SpringNetwork {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn springs(&self) -> &[Spring] {
        &self.springs
    }

    pub fn len(&self) -> usize {
        self.springs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.springs.is_empty()
    }

    pub fn get(&self, i: u32, j: u32) -> Option<&Spring> {
        let key = if i < j { (i, j) } else { (j, i) };
        self.springs
            .binary_search_by(|s| (s.i, s.j).cmp(&key))
            .ok()
            .map(|k| &self.springs[k])
    }

    /// Inserts a spring, replacing any spring on the same pair.
    pub fn insert(&mut self, i: u32, j: u32, rest_length: f64) {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        let spring = Spring {
            i,
            j,
            rest_length,
            last_hist_stiffness: 0.0,
        };
        match self.springs.binary_search_by(|s| (s.i, s.j).cmp(&(i, j))) {
            Ok(k) => self.springs[k] = spring,
            Err(k) => self.springs.insert(k, spring),
        }
    }

    /// Creates springs for new neighbour pairs, applies the plastic rest-length
    /// update to every spring and drops springs whose rest length exceeds `h`.
    pub fn adjust<const D: usize>(
        &mut self,
        particles: &[Particle<D>],
        neighbors: &NeighborList,
        params: &SpringParams,
        h: f64,
        dt: f64,
    ) {
        let old = std::mem::take(&mut self.springs);
        let mut merged = Vec::with_capacity(old.len().max(neighbors.pair_count()));
        let mut old = old.into_iter().peekable();
        let mut pairs = neighbors.pairs().peekable();
        loop {
            let next = match (old.peek(), pairs.peek()) {
                (None, None) => break,
                (Some(_), None) => old.next().unwrap(),
                (None, Some(_)) => {
                    let (i, j) = pairs.next().unwrap();
                    fresh(i, j, h)
                }
                (Some(s), Some(&(i, j))) => match (s.i, s.j).cmp(&(i, j)) {
                    std::cmp::Ordering::Less => old.next().unwrap(),
                    std::cmp::Ordering::Greater => {
                        pairs.next();
                        fresh(i, j, h)
                    }
                    std::cmp::Ordering::Equal => {
                        pairs.next();
                        old.next().unwrap()
                    }
                },
            };
            merged.push(next);
        }
        let step = dt * params.alpha;
        merged.par_iter_mut().for_each(|s| {
            let r = (particles[s.j as usize].position - particles[s.i as usize].position).norm();
            s.rest_length = plastic_rest_length(s.rest_length, r, step, params.gamma);
        });
        merged.retain(|s| s.rest_length > 0.0 && s.rest_length <= h);
        self.springs = merged;
    }

    /// Per-particle mean of `last_hist_stiffness` over attached springs
    /// (zero for particles without springs).
    pub fn mean_hist_stiffness(&self, particle_count: usize) -> Vec<f64> {
        let mut sum = vec![0.0; particle_count];
        let mut count = vec![0u32; particle_count];
        for s in &self.springs {
            for k in [s.i as usize, s.j as usize] {
                sum[k] += s.last_hist_stiffness;
                count[k] += 1;
            }
        }
        sum.iter()
            .zip(&count)
            .map(|(&s, &c)| if c == 0 { 0.0 } else { s / c as f64 })
            .collect()
    }

    /// Spring-force displacements. `history` carries the per-particle sums
    /// `S_i` and the kernel prefactor; `None` disables the history term so
    /// every spring has stiffness `k_min`. Updates each spring's cached
    /// history stiffness.
    pub fn displacements<const D: usize>(
        &mut self,
        particles: &[Particle<D>],
        history: Option<(&[Vector<D>], f64)>,
        params: &SpringParams,
        dt: f64,
        seed: u64,
    ) -> Vec<Vector<D>> {
        let dt2 = dt * dt;
        let per_spring: Vec<Vector<D>> = self
            .springs
            .par_iter_mut()
            .map(|s| {
                let kappa = match history {
                    Some((sums, prefactor)) => stiffness(
                        params.k_min,
                        params.k_hist,
                        prefactor,
                        &(sums[s.i as usize] - sums[s.j as usize]),
                    ),
                    None => params.k_min,
                };
                s.last_hist_stiffness = kappa - params.k_min;
                let xi = &particles[s.i as usize].position;
                let xj = &particles[s.j as usize].position;
                // unit vector from j to i
                let (r, dir) = separation(xj, xi, s.j, s.i, seed);
                // F_i = -kappa (r - L) dir
                dir * (-kappa * (r - s.rest_length) * dt2 * 0.5)
            })
            .collect();
        let mut out = vec![Vector::<D>::zeros(); particles.len()];
        for (s, d) in self.springs.iter().zip(&per_spring) {
            out[s.i as usize] += d;
            out[s.j as usize] -= d;
        }
        out
    }
}

fn fresh(i: u32, j: u32, h: f64) -> Spring {
    Spring {
        i,
        j,
        rest_length: h,
        last_hist_stiffness: 0.0,
    }
}

/// Rest length after one plastic step; `step = dt * alpha`. Inside the yield
/// band `[L (1 - gamma), L (1 + gamma)]` the rest length is unchanged.
pub fn plastic_rest_length(rest: f64, r: f64, step: f64, gamma: f64) -> f64 {
    let stretched = rest * (1.0 + gamma);
    let compressed = rest * (1.0 - gamma);
    if r > stretched {
        rest + step * (r - stretched)
    } else if r < compressed {
        rest - step * (compressed - r)
    } else {
        rest
    }
}

/// `k_hist * prefactor * |relative_sum| + k_min`.
#[inline]
pub fn stiffness<const D: usize>(k_min: f64, k_hist: f64, prefactor: f64, relative_sum: &Vector<D>) -> f64 {
    k_hist * prefactor * relative_sum.norm() + k_min
}

/// Per-particle weighted velocity sums `S_i = Σ_p a_{p,n} v_{p,i}` for the
/// window weights of the current step (oldest first).
pub fn accumulate_history_sums<const D: usize>(particles: &[Particle<D>], window: &[f64]) -> Vec<Vector<D>> {
    particles
        .par_iter()
        .map(|p| p.history.weighted_sum(window))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frackernel::FracWeights;
    use crate::sph::rebuild_index;

    type V2 = Vector<2>;

    fn params() -> SpringParams {
        SpringParams {
            k_min: 2.0,
            k_hist: 0.0,
            q: 0.5,
            d: 100,
            alpha: 0.3,
            gamma: 0.1,
        }
    }

    fn pair(x0: V2, x1: V2) -> Vec<Particle<2>> {
        vec![Particle::new(x0, V2::zeros(), 100), Particle::new(x1, V2::zeros(), 100)]
    }

    #[test]
    fn plastic_update_matches_rule() {
        assert!((plastic_rest_length(1.0, 1.3, 0.01 * 0.3, 0.1) - 1.0006).abs() < 1e-15);
        assert_eq!(plastic_rest_length(1.0, 1.0, 0.003, 0.1), 1.0);
        assert_eq!(plastic_rest_length(1.0, 1.05, 0.003, 0.1), 1.0);
        assert!((plastic_rest_length(1.0, 0.5, 0.003, 0.1) - (1.0 - 0.003 * 0.4)).abs() < 1e-15);
    }

    #[test]
    fn no_spring_outside_radius() {
        let ps = pair(V2::zeros(), V2::new(1.5, 0.0));
        let (_, nl) = rebuild_index(&ps, 1.0);
        let mut net = SpringNetwork::new();
        net.adjust(&ps, &nl, &params(), 1.0, 0.01);
        assert!(net.is_empty());
    }

    #[test]
    fn new_spring_starts_at_radius_then_yields() {
        let ps = pair(V2::zeros(), V2::new(0.5, 0.0));
        let (_, nl) = rebuild_index(&ps, 1.0);
        let mut net = SpringNetwork::new();
        net.adjust(&ps, &nl, &params(), 1.0, 0.01);
        let s = net.get(1, 0).unwrap();
        // L = 1 compressed to 0.5: L -= 0.003 * (0.9 - 0.5)
        assert!((s.rest_length - (1.0 - 0.003 * 0.4)).abs() < 1e-15);
        net.adjust(&ps, &nl, &params(), 1.0, 0.01);
        assert_eq!(net.len(), 1);
    }

    #[test]
    fn overstretched_spring_is_removed() {
        let ps = pair(V2::zeros(), V2::new(3.0, 0.0));
        let mut net = SpringNetwork::new();
        net.insert(0, 1, 0.99);
        let nl = NeighborList::from_rows(vec![vec![], vec![]]);
        // 0.99 + 0.3*(3 - 1.089) > 1
        net.adjust(&ps, &nl, &params(), 1.0, 1.0);
        assert!(net.is_empty());
    }

    #[test]
    fn hooke_reduction() {
        let ps = pair(V2::zeros(), V2::new(1.2, 0.0));
        let mut net = SpringNetwork::new();
        net.insert(0, 1, 1.0);
        let dt = 0.1;
        let d = net.displacements(&ps, None, &params(), dt, 0);
        // force 2 * 0.2 = 0.4 toward each other, dt^2 F split in half
        assert!((d[0].x - 0.4 * dt * dt * 0.5).abs() < 1e-15);
        assert_eq!(d[1], -d[0]);
        assert_eq!(net.springs()[0].last_hist_stiffness, 0.0);
    }

    #[test]
    fn rest_length_gives_no_displacement() {
        let mut ps = pair(V2::zeros(), V2::new(0.7, 0.0));
        ps[0].history.push(V2::new(50.0, 3.0));
        let mut net = SpringNetwork::new();
        net.insert(0, 1, 0.7);
        let w = FracWeights::new(0.5, 100, 0.01).unwrap();
        let sums = accumulate_history_sums(&ps, &w.window(1));
        let mut p = params();
        p.k_hist = 100.0;
        let d = net.displacements(&ps, Some((&sums, w.prefactor())), &p, 0.01, 0);
        assert!(d.iter().all(|v| *v == V2::zeros()));
        assert!(net.springs()[0].last_hist_stiffness > 0.0);
    }

    #[test]
    fn co_moving_pair_gains_no_stiffness() {
        let mut ps = pair(V2::zeros(), V2::new(0.7, 0.0));
        for k in 0..20 {
            let v = V2::new(k as f64, -1.0);
            ps[0].history.push(v);
            ps[1].history.push(v);
        }
        let mut net = SpringNetwork::new();
        net.insert(0, 1, 0.5);
        let w = FracWeights::new(0.5, 100, 0.01).unwrap();
        let sums = accumulate_history_sums(&ps, &w.window(20));
        let mut p = params();
        p.k_hist = 1e3;
        net.displacements(&ps, Some((&sums, w.prefactor())), &p, 0.01, 0);
        assert_eq!(net.springs()[0].last_hist_stiffness, 0.0);
    }

    #[test]
    fn insert_keeps_order_and_uniqueness() {
        let mut net = SpringNetwork::new();
        net.insert(3, 1, 0.5);
        net.insert(0, 2, 0.5);
        net.insert(1, 3, 0.25);
        assert_eq!(net.len(), 2);
        assert_eq!((net.springs()[0].i, net.springs()[0].j), (0, 2));
        assert_eq!(net.get(3, 1).unwrap().rest_length, 0.25);
    }

    #[test]
    fn mean_stiffness_per_particle() {
        let mut net = SpringNetwork::new();
        net.insert(0, 1, 0.5);
        net.insert(1, 2, 0.5);
        net.springs[0].last_hist_stiffness = 2.0;
        net.springs[1].last_hist_stiffness = 4.0;
        assert_eq!(net.mean_hist_stiffness(4), vec![2.0, 3.0, 4.0, 0.0]);
    }

    #[test]
    fn validation() {
        assert!(params().validate().is_ok());
        let mut p = params();
        p.gamma = 1.0;
        assert_eq!(p.validate().unwrap_err().name, "gamma");
        let mut p = params();
        p.q = 1.0;
        assert_eq!(p.validate().unwrap_err().name, "q");
    }
}
