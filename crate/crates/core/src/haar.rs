//! Random two-qubit unitaries.
//!
//! [`sample_haar_two_qubit`] draws from the Haar measure on U(4) via the QR
//! factorization of a complex Ginibre matrix with the phases of `R`'s
//! diagonal moved into `Q`. [`sample_phase_parameterized`] feeds uniform
//! phases into a six-element rectangular mesh of two-mode rotations plus a
//! diagonal phase screen; whether that is Haar is checked empirically.

use core::f64::consts::PI;

#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{identity4, Mat4, C64, ZERO};

/// Number of real parameters consumed by [`unitary_from_phases`].
pub const PHASE_COUNT: usize = 16;

/// Mode pairs of the rectangular mesh, applied left to right.
pub const MESH_PLAN: [(usize, usize); 6] = [(0, 1), (2, 3), (1, 2), (0, 1), (2, 3), (1, 2)];

const DEGENERATE_PIVOT: f64 = 1e-150;

fn ginibre<R: Rng + ?Sized>(rng: &mut R) -> Mat4 {
    let mut a = [[ZERO; 4]; 4];
    for row in a.iter_mut() {
        for z in row.iter_mut() {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            *z = C64::new(re, im);
        }
    }
    a
}

/// Householder QR of a 4×4 complex matrix, returning `Q` and the diagonal
/// of `R`, or `None` when a column is numerically zero.
fn householder_qr(mut a: Mat4) -> Option<(Mat4, [C64; 4])> {
    let mut q = identity4();
    let mut diag = [ZERO; 4];
    for k in 0..4 {
        let norm = (k..4).map(|i| a[i][k].norm_sqr()).sum::<f64>().sqrt();
        if norm < DEGENERATE_PIVOT {
            return None;
        }
        let x0 = a[k][k];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { C64::new(1.0, 0.0) };
        let alpha = -phase * norm;
        // v = x - alpha e_k
        let mut v = [ZERO; 4];
        for i in k..4 {
            v[i] = a[i][k];
        }
        v[k] -= alpha;
        let vnorm2: f64 = (k..4).map(|i| v[i].norm_sqr()).sum();
        if vnorm2 > 0.0 {
            // A ← (I - 2vv†/|v|²) A on rows k.., columns k..
            for j in k..4 {
                let dot: C64 = (k..4).map(|i| v[i].conj() * a[i][j]).sum();
                let f = dot * (2.0 / vnorm2);
                for i in k..4 {
                    a[i][j] -= v[i] * f;
                }
            }
            // Q ← Q (I - 2vv†/|v|²)
            for row in q.iter_mut() {
                let dot: C64 = (k..4).map(|i| row[i] * v[i]).sum();
                let f = dot * (2.0 / vnorm2);
                for i in k..4 {
                    row[i] -= f * v[i].conj();
                }
            }
        }
        diag[k] = a[k][k];
    }
    Some((q, diag))
}

/// Haar-random element of U(4).
pub fn sample_haar_two_qubit<R: Rng + ?Sized>(rng: &mut R) -> Mat4 {
    loop {
        let Some((mut q, diag)) = householder_qr(ginibre(rng)) else {
            continue;
        };
        for (j, r) in diag.iter().enumerate() {
            let phase = r / r.norm();
            for row in q.iter_mut() {
                row[j] *= phase;
            }
        }
        return q;
    }
}

fn apply_two_mode_rotation(u: &mut Mat4, (i, j): (usize, usize), theta: f64, phi: f64) {
    // U ← U T, with T acting on modes i, j as
    // [[e^{iφ} cos θ, -sin θ], [e^{iφ} sin θ, cos θ]]
    let (c, s) = (theta.cos(), theta.sin());
    let e = C64::from_polar(1.0, phi);
    let t = [[e * c, C64::new(-s, 0.0)], [e * s, C64::new(c, 0.0)]];
    for row in u.iter_mut() {
        let (a, b) = (row[i], row[j]);
        row[i] = a * t[0][0] + b * t[1][0];
        row[j] = a * t[0][1] + b * t[1][1];
    }
}

/// `U = D · T₀ · T₁ ⋯ T₅`: six two-mode rotations along [`MESH_PLAN`], each
/// taking `(θ, φ)` from consecutive parameters, then a diagonal of four
/// phases from the last four parameters.
pub fn unitary_from_phases(phases: &[f64]) -> Result<Mat4> {
    if phases.len() != PHASE_COUNT {
        return Err(Error::ParameterCount { expected: PHASE_COUNT, got: phases.len() });
    }
    let mut u = identity4();
    for (m, &pair) in MESH_PLAN.iter().enumerate() {
        apply_two_mode_rotation(&mut u, pair, phases[2 * m], phases[2 * m + 1]);
    }
    for (i, row) in u.iter_mut().enumerate() {
        let d = C64::from_polar(1.0, phases[12 + i]);
        for z in row.iter_mut() {
            *z *= d;
        }
    }
    Ok(u)
}

/// `unitary_from_phases` on 16 i.i.d. uniform phases in `[0, 2π)`.
pub fn sample_phase_parameterized<R: Rng + ?Sized>(rng: &mut R) -> Mat4 {
    let mut p = [0.0; PHASE_COUNT];
    for x in p.iter_mut() {
        *x = rng.gen_range(0.0..2.0 * PI);
    }
    unitary_from_phases(&p).expect("fixed parameter count")
}
