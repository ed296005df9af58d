//! Frame and metrics CSV output, and the `run` driver.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::scenario::{Scenario, ScenarioError};
use crate::world::{StepError, StepReport, World};
use crate::{Vector, VERTICAL};

pub const FRAME_HEADER: &str = "step,id,x,y,z,vx,vy,vz,stiff";
pub const METRICS_HEADER: &str = "step,time,stiff_mean,stiff_max,ke,surface_max,sphere_y,ms_step,ms_history";

/// Row id used for the rigid sphere in frame files.
pub const SPHERE_ROW_ID: i64 = -1;

#[derive(Debug, Clone, PartialEq)]
pub struct FrameRow {
    pub id: usize,
    pub position: [f64; 3],
    pub velocity: [f64; 3],
    pub stiffness: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameRecord {
    pub step: u64,
    pub rows: Vec<FrameRow>,
    /// Sphere center and velocity.
    pub sphere: Option<([f64; 3], [f64; 3])>,
}

fn pad<const D: usize>(v: &Vector<D>) -> [f64; 3] {
    std::array::from_fn(|a| if a < D { v[a] } else { 0.0 })
}

impl FrameRecord {
    pub fn capture<const D: usize>(world: &World<D>) -> Self {
        Self {
            step: world.step_index(),
            rows: world
                .particles
                .iter()
                .enumerate()
                .map(|(id, p)| FrameRow {
                    id,
                    position: pad(&p.position),
                    velocity: pad(&p.velocity),
                    stiffness: p.avg_hist_stiffness,
                })
                .collect(),
            sphere: world
                .sphere
                .as_ref()
                .map(|s| (pad(&s.center), pad(&s.velocity))),
        }
    }

    /// Writes the header and one row per particle; the sphere, if present,
    /// follows as a row with id -1 and zero stiffness.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{FRAME_HEADER}")?;
        let step = self.step;
        for r in &self.rows {
            let ([x, y, z], [vx, vy, vz]) = (r.position, r.velocity);
            writeln!(w, "{step},{},{x},{y},{z},{vx},{vy},{vz},{}", r.id, r.stiffness)?;
        }
        if let Some(([x, y, z], [vx, vy, vz])) = self.sphere {
            writeln!(w, "{step},{SPHERE_ROW_ID},{x},{y},{z},{vx},{vy},{vz},0")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub step: u64,
    pub time: f64,
    pub stiff_mean: f64,
    pub stiff_max: f64,
    /// Kinetic energy of the particles and the sphere.
    pub ke: f64,
    /// Height of the highest particle.
    pub surface_max: f64,
    pub sphere_y: Option<f64>,
    pub ms_step: f64,
    pub ms_history: f64,
}

impl MetricsRow {
    pub fn capture<const D: usize>(world: &World<D>, report: &StepReport) -> Self {
        let springs = world.springs.springs();
        let (sum, max) = springs
            .iter()
            .fold((0.0, 0.0f64), |(s, m), sp| (s + sp.last_hist_stiffness, m.max(sp.last_hist_stiffness)));
        let mass = world.fluid.particle_mass;
        let mut ke: f64 = world
            .particles
            .iter()
            .map(|p| 0.5 * mass * p.velocity.norm_squared())
            .sum();
        let sphere = world.sphere.as_ref();
        if let Some(s) = sphere {
            ke += 0.5 * s.mass * s.velocity.norm_squared();
        }
        Self {
            step: world.step_index(),
            time: world.time(),
            stiff_mean: if springs.is_empty() { 0.0 } else { sum / springs.len() as f64 },
            stiff_max: max,
            ke,
            surface_max: world
                .particles
                .iter()
                .map(|p| p.position[VERTICAL])
                .fold(f64::NEG_INFINITY, f64::max),
            sphere_y: sphere.map(|s| s.center[VERTICAL]),
            ms_step: report.step_ms,
            ms_history: report.history_ms,
        }
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let sphere_y = self.sphere_y.map(|y| y.to_string()).unwrap_or_default();
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            self.step,
            self.time,
            self.stiff_mean,
            self.stiff_max,
            self.ke,
            self.surface_max,
            sphere_y,
            self.ms_step,
            self.ms_history
        )
    }
}

/// Surface height per column: the column bins split the container floor into
/// cells of `bin_width`; a column's height is the height of its
/// `(ignore_top + 1)`-th highest particle, so up to `ignore_top` stray
/// droplets are discounted. Columns with too few particles report `None`.
pub fn column_heights<const D: usize>(world: &World<D>, bin_width: f64, ignore_top: usize) -> Vec<Option<f64>> {
    let c = &world.container;
    let axes: Vec<usize> = (0..D).filter(|&a| a != VERTICAL).collect();
    let dims: Vec<usize> = axes
        .iter()
        .map(|&a| ((c.max[a] - c.min[a]) / bin_width).ceil().max(1.0) as usize)
        .collect();
    let total: usize = dims.iter().product();
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); total];
    for p in &world.particles {
        let mut flat = 0;
        for (k, &a) in axes.iter().enumerate() {
            let cell = (((p.position[a] - c.min[a]) / bin_width) as usize).min(dims[k] - 1);
            flat = flat * dims[k] + cell;
        }
        columns[flat].push(p.position[VERTICAL]);
    }
    columns
        .into_iter()
        .map(|mut ys| {
            if ys.len() <= ignore_top {
                return None;
            }
            ys.sort_by(|a, b| b.total_cmp(a));
            Some(ys[ignore_top])
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    /// Wall-clock columns of the metrics file; zero-filled when false so the
    /// file is reproducible byte for byte.
    pub record_timings: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { record_timings: true }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunSummary {
    pub steps: u64,
    pub frames: usize,
    pub particles: usize,
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ScenarioError),
    #[error("simulation aborted: {0}")]
    Numerical(#[from] StepError),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> RunError + '_ {
    move |source| RunError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn frame_path(dir: &Path, step: u64) -> PathBuf {
    dir.join(format!("frame_{step:06}.csv"))
}

/// Runs a scenario, writing `frame_NNNNNN.csv` every `output_stride` steps
/// (starting with the initial state) and one `metrics.csv` row per step.
pub fn run(scenario: &Scenario, out_dir: &Path, options: RunOptions) -> Result<RunSummary, RunError> {
    match scenario.dimension {
        2 => run_world(scenario.build_world::<2>()?, scenario, out_dir, options),
        3 => run_world(scenario.build_world::<3>()?, scenario, out_dir, options),
        d => unreachable!("validated dimension {d}"),
    }
}

fn run_world<const D: usize>(
    mut world: World<D>,
    scenario: &Scenario,
    out_dir: &Path,
    options: RunOptions,
) -> Result<RunSummary, RunError> {
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let metrics_path = out_dir.join("metrics.csv");
    let mut metrics = BufWriter::new(File::create(&metrics_path).map_err(io_err(&metrics_path))?);
    writeln!(metrics, "{METRICS_HEADER}").map_err(io_err(&metrics_path))?;

    let mut frames = 0;
    let mut write_frame = |world: &World<D>| -> Result<(), RunError> {
        let path = frame_path(out_dir, world.step_index());
        let file = File::create(&path).map_err(io_err(&path))?;
        let mut w = BufWriter::new(file);
        FrameRecord::capture(world).write_csv(&mut w).map_err(io_err(&path))?;
        w.flush().map_err(io_err(&path))?;
        frames += 1;
        Ok(())
    };

    write_frame(&world)?;
    MetricsRow::capture(&world, &StepReport::default())
        .write_csv(&mut metrics)
        .map_err(io_err(&metrics_path))?;
    let mut outcome = Ok(());
    for _ in 0..scenario.steps {
        let mut report = match world.step() {
            Ok(r) => r,
            Err(e) => {
                outcome = Err(RunError::Numerical(e));
                break;
            }
        };
        if !options.record_timings {
            report.step_ms = 0.0;
            report.history_ms = 0.0;
        }
        MetricsRow::capture(&world, &report)
            .write_csv(&mut metrics)
            .map_err(io_err(&metrics_path))?;
        if world.step_index().is_multiple_of(scenario.output_stride) {
            write_frame(&world)?;
        }
    }
    metrics.flush().map_err(io_err(&metrics_path))?;
    outcome?;
    Ok(RunSummary {
        steps: world.step_index(),
        frames,
        particles: world.particles.len(),
    })
}
