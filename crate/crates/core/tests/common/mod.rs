//! Dense reference for the walk operator, shared by the integration tests.

#![allow(dead_code)]

use num_complex::Complex64;
use qwalk::walker::WalkerState;

pub type Matrix = Vec<Vec<Complex64>>;

pub fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Index of `(site, spin)` in the flattened vector; spin 0 is up.
pub fn idx(site: usize, spin: usize) -> usize {
    2 * site + spin
}

/// `S · (C ⊗ I)` built entry by entry from the operator definitions.
pub fn dense_unitary(angles: &[f64]) -> Matrix {
    let n = angles.len();
    let dim = 2 * n;
    let mut coin = vec![vec![zero(); dim]; dim];
    for (site, &theta) in angles.iter().enumerate() {
        let (c, s) = (theta.cos(), theta.sin());
        // cosθ·Z + sinθ·X
        let block = [[c, s], [s, -c]];
        for a in 0..2 {
            for b in 0..2 {
                coin[idx(site, a)][idx(site, b)] = Complex64::new(block[a][b], 0.0);
            }
        }
    }
    let mut shift = vec![vec![zero(); dim]; dim];
    for site in 0..n {
        if site + 1 < n {
            shift[idx(site + 1, 0)][idx(site, 0)] = Complex64::new(1.0, 0.0);
        }
        if site >= 1 {
            shift[idx(site - 1, 1)][idx(site, 1)] = Complex64::new(1.0, 0.0);
        }
    }
    let mut u = vec![vec![zero(); dim]; dim];
    for i in 0..dim {
        for k in 0..dim {
            if shift[i][k] == zero() {
                continue;
            }
            for j in 0..dim {
                u[i][j] += shift[i][k] * coin[k][j];
            }
        }
    }
    u
}

pub fn apply(m: &Matrix, v: &[Complex64]) -> Vec<Complex64> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

pub fn flatten(state: &WalkerState) -> Vec<Complex64> {
    state
        .up()
        .iter()
        .zip(state.down())
        .flat_map(|(u, d)| [*u, *d])
        .collect()
}

pub fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Random state supported on `[centre - width, centre + width]`.
pub fn random_state(len: usize, width: usize, amps: &[f64]) -> WalkerState {
    let centre = len / 2;
    let mut up = vec![zero(); len];
    let mut down = vec![zero(); len];
    for (k, site) in (centre - width..=centre + width).enumerate() {
        up[site] = Complex64::new(amps[4 * k], amps[4 * k + 1]);
        down[site] = Complex64::new(amps[4 * k + 2], amps[4 * k + 3]);
    }
    let norm: f64 = up
        .iter()
        .chain(&down)
        .map(|c| c.norm_sqr())
        .sum::<f64>()
        .sqrt();
    for c in up.iter_mut().chain(down.iter_mut()) {
        *c /= norm;
    }
    WalkerState::from_amplitudes(up, down, centre).unwrap()
}
