//! Control-parameter schedules: SHADE success-history memory or fixed values.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{config, Result};
use crate::rng::RngStream;

pub const DEFAULT_MEMORY_SIZE: usize = 100;
pub const DEFAULT_F: f64 = 0.5;
pub const DEFAULT_CR: f64 = 0.9;
const SCALE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase", tag = "mode"))]
pub enum Adaptation {
    Shade { memory_size: usize },
    Fixed { f: f64, cr: f64 },
}

impl Default for Adaptation {
    fn default() -> Self {
        Adaptation::Shade {
            memory_size: DEFAULT_MEMORY_SIZE,
        }
    }
}

impl Adaptation {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Adaptation::Shade { memory_size: 0 } => {
                Err(config("SHADE memory size H must be at least 1"))
            }
            Adaptation::Fixed { f, .. } if !(f > 0.0 && f.is_finite()) => {
                Err(config(alloc::format!("F must be positive, got {f}")))
            }
            Adaptation::Fixed { cr, .. } if !(0.0..=1.0).contains(&cr) => {
                Err(config(alloc::format!("Cr must lie in [0, 1], got {cr}")))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuccessRecord {
    pub f_used: f64,
    pub cr_used: f64,
    /// `f(parent) - f(trial)`, positive for recorded successes.
    pub improvement: f64,
}

/// Circular SHADE memory of `H` (F, Cr) pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamMemory {
    m_f: Vec<f64>,
    m_cr: Vec<f64>,
    write_index: usize,
}

impl ParamMemory {
    pub fn new(size: usize) -> Self {
        assert!(size > 0, "memory size must be positive");
        Self {
            m_f: vec![0.5; size],
            m_cr: vec![0.5; size],
            write_index: 0,
        }
    }

    /// Memory with explicit entries; F in (0, 1], Cr in [0, 1].
    pub fn with_entries(m_f: Vec<f64>, m_cr: Vec<f64>) -> Result<Self> {
        if m_f.is_empty() || m_f.len() != m_cr.len() {
            return Err(config("memory arrays must be non-empty and of equal length"));
        }
        if m_f.iter().any(|&f| !(f > 0.0 && f <= 1.0)) {
            return Err(config("M_F entries must lie in (0, 1]"));
        }
        if m_cr.iter().any(|&c| !(0.0..=1.0).contains(&c)) {
            return Err(config("M_Cr entries must lie in [0, 1]"));
        }
        Ok(Self {
            m_f,
            m_cr,
            write_index: 0,
        })
    }

    pub fn size(&self) -> usize {
        self.m_f.len()
    }

    pub fn m_f(&self) -> &[f64] {
        &self.m_f
    }

    pub fn m_cr(&self) -> &[f64] {
        &self.m_cr
    }

    pub fn write_index(&self) -> usize {
        self.write_index
    }

    /// Slot `r ~ U{0..H}`; `F ~ Cauchy(M_F[r], 0.1)` redrawn while `F <= 0` and
    /// capped at 1; `Cr ~ N(M_Cr[r], 0.1)` clamped to `[0, 1]`.
    pub fn sample(&self, rng: &mut RngStream) -> (f64, f64) {
        let r = rng.index(self.size());
        let f = loop {
            let f = rng.cauchy(self.m_f[r], SCALE);
            if f > 0.0 {
                break f.min(1.0);
            }
        };
        let cr = rng.normal(self.m_cr[r], SCALE).clamp(0.0, 1.0);
        (f, cr)
    }

    /// Writes the improvement-weighted Lehmer mean of F and the weighted
    /// arithmetic mean of Cr into the current slot. No-op without successes.
    pub fn update(&mut self, successes: &[SuccessRecord]) {
        let successes: Vec<&SuccessRecord> = successes
            .iter()
            .filter(|s| s.improvement > 0.0 && s.improvement.is_finite())
            .collect();
        if successes.is_empty() {
            return;
        }
        // Normalizing by the largest improvement keeps the weight sum finite.
        let top = successes.iter().map(|s| s.improvement).fold(0.0, f64::max);
        let total: f64 = successes.iter().map(|s| s.improvement / top).sum();
        let (mut f_sq, mut f_lin, mut cr) = (0.0, 0.0, 0.0);
        for s in &successes {
            let w = (s.improvement / top) / total;
            f_sq += w * s.f_used * s.f_used;
            f_lin += w * s.f_used;
            cr += w * s.cr_used;
        }
        let new_f = (f_sq / f_lin).clamp(f64::MIN_POSITIVE, 1.0);
        self.m_f[self.write_index] = new_f;
        self.m_cr[self.write_index] = cr.clamp(0.0, 1.0);
        self.write_index = (self.write_index + 1) % self.size();
    }
}

/// Per-run parameter source behind one interface.
#[derive(Debug, Clone)]
pub enum ParameterControl {
    Shade(ParamMemory),
    Fixed { f: f64, cr: f64 },
}

impl ParameterControl {
    pub fn new(mode: Adaptation) -> Result<Self> {
        mode.validate()?;
        Ok(match mode {
            Adaptation::Shade { memory_size } => Self::Shade(ParamMemory::new(memory_size)),
            Adaptation::Fixed { f, cr } => Self::Fixed { f, cr },
        })
    }

    pub fn sample(&self, rng: &mut RngStream) -> (f64, f64) {
        match self {
            Self::Shade(mem) => mem.sample(rng),
            Self::Fixed { f, cr } => (*f, *cr),
        }
    }

    pub fn update(&mut self, successes: &[SuccessRecord]) {
        if let Self::Shade(mem) = self {
            mem.update(successes);
        }
    }
}
