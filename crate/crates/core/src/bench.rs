//! Per-step cost as a function of the history window.

use std::io::{self, Write};

use crate::output::RunError;
use crate::scenario::{HistoryWindow, Scenario};
use crate::world::World;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub d: usize,
    pub particles: usize,
    pub steps: u64,
    pub mean_step_ms: f64,
    pub mean_history_ms: f64,
    /// Weighted velocity terms accumulated over the measured steps.
    pub history_ops: u64,
}

pub const BENCH_HEADER: &str = "d,particles,steps,ms_step,ms_history,history_ops";

/// Runs `steps` measured steps of `scenario` for every window in `windows`.
/// Each run first advances `d + 1` unmeasured steps so the window is full.
/// `d = 0` runs without the history phase.
pub fn bench(scenario: &Scenario, windows: &[usize], steps: u64) -> Result<Vec<BenchRow>, RunError> {
    windows
        .iter()
        .map(|&d| {
            let mut s = scenario.clone();
            s.spring.window = HistoryWindow::Steps(d);
            s.spring.history = d > 0;
            match s.dimension {
                2 => bench_one(s.build_world::<2>()?, d, steps),
                3 => bench_one(s.build_world::<3>()?, d, steps),
                other => unreachable!("validated dimension {other}"),
            }
        })
        .collect()
}

fn bench_one<const D: usize>(mut world: World<D>, d: usize, steps: u64) -> Result<BenchRow, RunError> {
    for _ in 0..=d {
        world.step()?;
    }
    let (mut step_ms, mut history_ms, mut ops) = (0.0, 0.0, 0);
    for _ in 0..steps {
        let r = world.step()?;
        step_ms += r.step_ms;
        history_ms += r.history_ms;
        ops += r.history_ops;
    }
    let per = steps.max(1) as f64;
    Ok(BenchRow {
        d,
        particles: world.particles.len(),
        steps,
        mean_step_ms: step_ms / per,
        mean_history_ms: history_ms / per,
        history_ops: ops,
    })
}

pub fn write_bench_csv<W: Write>(rows: &[BenchRow], mut w: W) -> io::Result<()> {
    writeln!(w, "{BENCH_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            r.d, r.particles, r.steps, r.mean_step_ms, r.mean_history_ms, r.history_ops
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::parse_scenario;

    #[test]
    fn zero_window_skips_history_and_ops_are_reproducible() {
        let s = parse_scenario("block.max = 0.3, 0.3").unwrap();
        let a = bench(&s, &[0, 4], 5).unwrap();
        assert_eq!(a[0].mean_history_ms, 0.0);
        assert_eq!(a[0].history_ops, 0);
        assert_eq!(a[1].history_ops, 5 * 5 * a[1].particles as u64);
        let b = bench(&s, &[0, 4], 5).unwrap();
        let ops = |rows: &[BenchRow]| rows.iter().map(|r| r.history_ops).collect::<Vec<_>>();
        assert_eq!(ops(&a), ops(&b));
        let mut buf = Vec::new();
        write_bench_csv(&a, &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with(BENCH_HEADER));
    }
}
