//! Single-element probe: history stiffness of one spring whose first
//! endpoint follows a prescribed velocity program while the other rests.

use std::fmt;
use std::io::{self, Write};

use crate::frackernel::{FracWeights, KernelError, VelocityHistory};
use crate::springs::stiffness;
use crate::Vector;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VelocityProgram {
    Zero,
    /// `magnitude` during step `at_step` only.
    Impulse { magnitude: f64, at_step: u64 },
    /// `magnitude` for steps in `start..stop`.
    Step { magnitude: f64, start: u64, stop: u64 },
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProbeError {
    #[error("invalid velocity program `{0}`; expected zero, impulse:MAG,STEP or step:MAG,START,STOP")]
    Program(String),
    #[error("invalid probe setup: {0}")]
    Setup(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

impl VelocityProgram {
    pub fn velocity(&self, step: u64) -> f64 {
        match *self {
            VelocityProgram::Zero => 0.0,
            VelocityProgram::Impulse { magnitude, at_step } => {
                if step == at_step {
                    magnitude
                } else {
                    0.0
                }
            }
            VelocityProgram::Step { magnitude, start, stop } => {
                if (start..stop).contains(&step) {
                    magnitude
                } else {
                    0.0
                }
            }
        }
    }

    /// Parses `zero`, `impulse:MAG,STEP` or `step:MAG,START,STOP`.
    pub fn parse(text: &str) -> Result<Self, ProbeError> {
        let bad = || ProbeError::Program(text.to_string());
        let (kind, args) = text.split_once(':').unwrap_or((text, ""));
        let args: Vec<&str> = if args.is_empty() {
            Vec::new()
        } else {
            args.split(',').map(str::trim).collect()
        };
        let program = match (kind.trim(), args.as_slice()) {
            ("zero", []) => VelocityProgram::Zero,
            ("impulse", [m, s]) => VelocityProgram::Impulse {
                magnitude: m.parse().map_err(|_| bad())?,
                at_step: s.parse().map_err(|_| bad())?,
            },
            ("step", [m, a, b]) => VelocityProgram::Step {
                magnitude: m.parse().map_err(|_| bad())?,
                start: a.parse().map_err(|_| bad())?,
                stop: b.parse().map_err(|_| bad())?,
            },
            _ => return Err(bad()),
        };
        program.validate().map_err(|_| bad())?;
        Ok(program)
    }

    fn validate(&self) -> Result<(), ProbeError> {
        match *self {
            VelocityProgram::Zero => Ok(()),
            VelocityProgram::Impulse { magnitude, .. } if magnitude.is_finite() => Ok(()),
            VelocityProgram::Step { magnitude, start, stop } if magnitude.is_finite() && start < stop => Ok(()),
            _ => Err(ProbeError::Program(self.to_string())),
        }
    }
}

impl fmt::Display for VelocityProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VelocityProgram::Zero => f.write_str("zero"),
            VelocityProgram::Impulse { magnitude, at_step } => write!(f, "impulse:{magnitude},{at_step}"),
            VelocityProgram::Step { magnitude, start, stop } => write!(f, "step:{magnitude},{start},{stop}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeConfig {
    pub q: f64,
    /// One output column per window length.
    pub windows: Vec<usize>,
    pub dt: f64,
    pub k_min: f64,
    pub k_hist: f64,
    /// Last step evaluated; rows cover `0..=steps`.
    pub steps: u64,
    pub program: VelocityProgram,
}

/// `kappa - k_min` over time, one column per window.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeTable {
    pub dt: f64,
    pub windows: Vec<usize>,
    pub columns: Vec<Vec<f64>>,
}

impl ProbeTable {
    pub fn column(&self, window: usize) -> Option<&[f64]> {
        self.windows
            .iter()
            .position(|&d| d == window)
            .map(|k| self.columns[k].as_slice())
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let header: Vec<String> = self.windows.iter().map(|d| format!("d{d}")).collect();
        writeln!(w, "step,time,{}", header.join(","))?;
        let rows = self.columns.first().map_or(0, Vec::len);
        for n in 0..rows {
            write!(w, "{n},{}", n as f64 * self.dt)?;
            for col in &self.columns {
                write!(w, ",{}", col[n])?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

pub fn probe(config: &ProbeConfig) -> Result<ProbeTable, ProbeError> {
    config.program.validate()?;
    if config.windows.is_empty() {
        return Err(ProbeError::Setup("at least one window is required".into()));
    }
    if !(config.k_min >= 0.0 && config.k_hist >= 0.0) {
        return Err(ProbeError::Setup("stiffness constants must be non-negative".into()));
    }
    if let VelocityProgram::Impulse { at_step, .. } = config.program {
        if at_step > config.steps {
            return Err(ProbeError::Program(config.program.to_string()));
        }
    }
    let mut columns = Vec::with_capacity(config.windows.len());
    for &d in &config.windows {
        let weights = FracWeights::new(config.q, d, config.dt)?;
        let mut driven = VelocityHistory::<1>::new(d);
        let mut resting = VelocityHistory::<1>::new(d);
        let mut col = Vec::with_capacity(config.steps as usize + 1);
        for n in 0..=config.steps {
            driven.push(Vector::<1>::new(config.program.velocity(n)));
            resting.push(Vector::<1>::zeros());
            let window = weights.window(n);
            let relative = driven.weighted_sum(&window) - resting.weighted_sum(&window);
            let kappa = stiffness(config.k_min, config.k_hist, weights.prefactor(), &relative);
            col.push(kappa - config.k_min);
        }
        columns.push(col);
    }
    Ok(ProbeTable {
        dt: config.dt,
        windows: config.windows.clone(),
        columns,
    })
}
