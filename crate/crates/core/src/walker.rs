//! Walker state and the unitary step `U = S · (C ⊗ I)`.
//!
//! The state is a pair of amplitude arrays (spin up, spin down) over a finite
//! open chain. One step applies the site coin and then shifts spin-up
//! amplitude one site to the right and spin-down amplitude one site to the
//! left. Both operations are fused into a single pass that writes into a
//! second pair of buffers, which are swapped afterwards.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::noise::{AngleSchedule, ScheduleAxis};

/// Tolerance on the norm of a user supplied initial qubit.
pub const QUBIT_NORM_TOLERANCE: f64 = 1e-12;

/// Two-component amplitude of the walker at a single site.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spinor {
    pub up: Complex64,
    pub down: Complex64,
}

impl Spinor {
    pub const fn new(up: Complex64, down: Complex64) -> Self {
        Self { up, down }
    }

    /// `(|↑⟩ + i|↓⟩)/√2`, the default starting qubit.
    pub const fn balanced() -> Self {
        Self {
            up: Complex64::new(FRAC_1_SQRT_2, 0.0),
            down: Complex64::new(0.0, FRAC_1_SQRT_2),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.up.norm_sqr() + self.down.norm_sqr()
    }
}

impl Default for Spinor {
    fn default() -> Self {
        Self::balanced()
    }
}

/// Real coin `cosθ·Z + sinθ·X`, i.e. rows `(cosθ, sinθ)` and `(sinθ, −cosθ)`.
///
/// It is a reflection: orthogonal, symmetric and with determinant −1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoinMatrix {
    cos: f64,
    sin: f64,
}

impl CoinMatrix {
    pub fn new(theta: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(invalid(format!("coin angle must be finite, got {theta}")));
        }
        Ok(Self::from_finite(theta))
    }

    fn from_finite(theta: f64) -> Self {
        let (sin, cos) = theta.sin_cos();
        Self { cos, sin }
    }

    pub fn entries(&self) -> [[f64; 2]; 2] {
        [[self.cos, self.sin], [self.sin, -self.cos]]
    }

    pub fn determinant(&self) -> f64 {
        -self.cos * self.cos - self.sin * self.sin
    }

    #[inline(always)]
    pub fn apply(&self, up: Complex64, down: Complex64) -> (Complex64, Complex64) {
        (
            up * self.cos + down * self.sin,
            up * self.sin - down * self.cos,
        )
    }
}

/// Builds the coin matrix for `theta` radians.
pub fn coin_matrix(theta: f64) -> Result<CoinMatrix> {
    CoinMatrix::new(theta)
}

/// Coins applied during one step.
#[derive(Clone, Copy, Debug)]
pub enum CoinField<'a> {
    /// The same coin on every site.
    Uniform(CoinMatrix),
    /// One coin per lattice site.
    Sites(&'a [CoinMatrix]),
}

/// Amplitudes of the walker over an open chain of `len` sites.
///
/// Besides the amplitudes the state keeps a conservative bounding interval
/// of its support; all amplitudes outside it are exactly zero, and only that
/// interval is touched by [`WalkerState::step`].
#[derive(Clone, Debug)]
pub struct WalkerState {
    up: Vec<Complex64>,
    down: Vec<Complex64>,
    next_up: Vec<Complex64>,
    next_down: Vec<Complex64>,
    // interval of the scratch buffers that may hold stale nonzero values
    stale: (usize, usize),
    lo: usize,
    hi: usize,
    origin: usize,
    time: usize,
}

impl WalkerState {
    /// Builds a state from raw amplitudes. Normalization is not checked, so
    /// arbitrary superpositions can be evolved.
    pub fn from_amplitudes(
        up: Vec<Complex64>,
        down: Vec<Complex64>,
        origin: usize,
    ) -> Result<Self> {
        let len = up.len();
        if down.len() != len {
            return Err(invalid(format!(
                "amplitude arrays differ in length ({} vs {})",
                len,
                down.len()
            )));
        }
        if origin >= len {
            return Err(invalid(format!(
                "origin {origin} outside a lattice of {len} sites"
            )));
        }
        let zero = Complex64::new(0.0, 0.0);
        let occupied = |n: &usize| up[*n] != zero || down[*n] != zero;
        let lo = (0..len).find(occupied).unwrap_or(origin);
        let hi = (0..len).rev().find(occupied).unwrap_or(origin);
        Ok(Self {
            next_up: vec![zero; len],
            next_down: vec![zero; len],
            stale: (0, 0),
            up,
            down,
            lo,
            hi,
            origin,
            time: 0,
        })
    }

    pub fn len(&self) -> usize {
        self.up.len()
    }

    pub fn is_empty(&self) -> bool {
        self.up.is_empty()
    }

    pub fn up(&self) -> &[Complex64] {
        &self.up
    }

    pub fn down(&self) -> &[Complex64] {
        &self.down
    }

    pub fn origin(&self) -> usize {
        self.origin
    }

    pub fn time(&self) -> usize {
        self.time
    }

    /// Inclusive site interval outside of which every amplitude is zero.
    pub fn support(&self) -> (usize, usize) {
        (self.lo, self.hi)
    }

    pub fn spinor(&self, site: usize) -> Spinor {
        Spinor::new(self.up[site], self.down[site])
    }

    pub fn probability(&self, site: usize) -> f64 {
        self.up[site].norm_sqr() + self.down[site].norm_sqr()
    }

    pub fn norm_sqr(&self) -> f64 {
        (self.lo..=self.hi).map(|n| self.probability(n)).sum()
    }

    /// Advances the state by one step with per-site angles (`angles.len()`
    /// must equal the lattice size).
    pub fn step(&mut self, angles: &[f64]) -> Result<()> {
        if angles.len() != self.len() {
            return Err(invalid(format!(
                "angle profile has {} entries for a lattice of {} sites",
                angles.len(),
                self.len()
            )));
        }
        let coins = angles
            .iter()
            .map(|&theta| CoinMatrix::new(theta))
            .collect::<Result<Vec<_>>>()?;
        self.step_with(CoinField::Sites(&coins))
    }

    /// Advances the state by one step with precomputed coins.
    pub fn step_with(&mut self, coins: CoinField<'_>) -> Result<()> {
        let len = self.len();
        let (lo, hi) = (self.lo, self.hi);
        if lo < 2 || hi + 3 > len {
            return Err(Error::EdgeContact {
                time: self.time,
                lo,
                hi,
                len,
            });
        }
        if let CoinField::Sites(c) = coins {
            if c.len() != len {
                return Err(invalid(format!(
                    "coin field has {} entries for a lattice of {} sites",
                    c.len(),
                    len
                )));
            }
        }

        let zero = Complex64::new(0.0, 0.0);
        // Clear stale scratch entries that the scatter below does not overwrite.
        let (s_lo, s_hi) = self.stale;
        let below = s_lo..(s_hi + 1).min(lo - 1);
        let above = s_lo.max(hi + 2)..s_hi + 1;
        for range in [below, above] {
            if !range.is_empty() {
                self.next_up[range.clone()].fill(zero);
                self.next_down[range].fill(zero);
            }
        }
        self.next_up[lo - 1] = zero;
        self.next_up[lo] = zero;
        self.next_down[hi] = zero;
        self.next_down[hi + 1] = zero;

        let up = &self.up[lo..=hi];
        let down = &self.down[lo..=hi];
        let next_up = &mut self.next_up[lo + 1..=hi + 1];
        let next_down = &mut self.next_down[lo - 1..=hi - 1];
        match coins {
            CoinField::Uniform(coin) => {
                for (((u, d), nu), nd) in up
                    .iter()
                    .zip(down)
                    .zip(next_up.iter_mut())
                    .zip(next_down.iter_mut())
                {
                    let (cu, cd) = coin.apply(*u, *d);
                    *nu = cu;
                    *nd = cd;
                }
            }
            CoinField::Sites(all) => {
                let coins = &all[lo..=hi];
                for ((((u, d), coin), nu), nd) in up
                    .iter()
                    .zip(down)
                    .zip(coins)
                    .zip(next_up.iter_mut())
                    .zip(next_down.iter_mut())
                {
                    let (cu, cd) = coin.apply(*u, *d);
                    *nu = cu;
                    *nd = cd;
                }
            }
        }

        std::mem::swap(&mut self.up, &mut self.next_up);
        std::mem::swap(&mut self.down, &mut self.next_down);
        self.stale = (lo, hi);
        self.time += 1;

        let (mut lo, mut hi) = (lo - 1, hi + 1);
        while lo < hi && self.up[lo] == zero && self.down[lo] == zero {
            lo += 1;
        }
        while hi > lo && self.up[hi] == zero && self.down[hi] == zero {
            hi -= 1;
        }
        self.lo = lo;
        self.hi = hi;
        Ok(())
    }
}

/// Places a qubit on the central site of an odd lattice of `lattice_size`
/// sites.
pub fn initial_state(lattice_size: usize, qubit: Spinor) -> Result<WalkerState> {
    if lattice_size < 3 || lattice_size.is_multiple_of(2) {
        return Err(invalid(format!(
            "lattice size must be odd and at least 3, got {lattice_size}"
        )));
    }
    let norm = qubit.norm_sqr();
    if !norm.is_finite() || (norm - 1.0).abs() > QUBIT_NORM_TOLERANCE {
        return Err(invalid(format!(
            "initial qubit is not normalized (|up|² + |down|² = {norm})"
        )));
    }
    let zero = Complex64::new(0.0, 0.0);
    let origin = lattice_size / 2;
    let mut up = vec![zero; lattice_size];
    let mut down = vec![zero; lattice_size];
    up[origin] = qubit.up;
    down[origin] = qubit.down;
    WalkerState::from_amplitudes(up, down, origin)
}

/// Evolves `state` for `steps` steps under `schedule`, calling `observer`
/// after every step.
pub fn evolve<F>(
    state: &mut WalkerState,
    schedule: &AngleSchedule,
    steps: usize,
    mut observer: F,
) -> Result<()>
where
    F: FnMut(&WalkerState) -> Result<()>,
{
    match schedule.axis() {
        ScheduleAxis::Homogeneous => {
            let coin = CoinMatrix::new(schedule.values()[0])?;
            for _ in 0..steps {
                state.step_with(CoinField::Uniform(coin))?;
                observer(state)?;
            }
        }
        ScheduleAxis::Temporal => {
            if schedule.len() < steps {
                return Err(invalid(format!(
                    "temporal schedule covers {} steps, {} requested",
                    schedule.len(),
                    steps
                )));
            }
            for &theta in &schedule.values()[..steps] {
                state.step_with(CoinField::Uniform(CoinMatrix::new(theta)?))?;
                observer(state)?;
            }
        }
        ScheduleAxis::Spatial => {
            if schedule.len() != state.len() {
                return Err(invalid(format!(
                    "spatial schedule covers {} sites, lattice has {}",
                    schedule.len(),
                    state.len()
                )));
            }
            let coins = schedule
                .values()
                .iter()
                .map(|&theta| CoinMatrix::new(theta))
                .collect::<Result<Vec<_>>>()?;
            for _ in 0..steps {
                state.step_with(CoinField::Sites(&coins))?;
                observer(state)?;
            }
        }
    }
    Ok(())
}
