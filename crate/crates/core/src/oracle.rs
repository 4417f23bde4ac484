//! Brute-force dense references for small circuits.
//!
//! Basis states are little-endian: wire `w` is bit `w` of the basis index.

use alloc::vec;
use alloc::vec::Vec;

use crate::circuit::{Circuit, GateMatrix, Wires};
use crate::error::{Error, Result};
use crate::linalg::{C64, ONE, ZERO};
use crate::tensornet::BasisState;

/// Largest register simulated densely.
pub const MAX_DENSE_QUBITS: usize = 12;
/// Largest target register for [`dense_trace`].
pub const MAX_TRACE_QUBITS: usize = 10;

fn check_size(n: usize, limit: usize) -> Result<()> {
    if n > limit {
        return Err(Error::TooLarge { qubits: n, limit });
    }
    Ok(())
}

/// Row-major `2^n × 2^n` complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    pub dim: usize,
    pub data: Vec<C64>,
}

impl DenseMatrix {
    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.dim + col]
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        let mut data = vec![ZERO; d * d];
        for r in 0..d {
            for c in 0..d {
                data[c * d + r] = self.data[r * d + c].conj();
            }
        }
        Self { dim: d, data }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let d = self.dim;
        let mut data = vec![ZERO; d * d];
        for r in 0..d {
            for k in 0..d {
                let a = self.data[r * d + k];
                if a == ZERO {
                    continue;
                }
                for c in 0..d {
                    data[r * d + c] += a * other.data[k * d + c];
                }
            }
        }
        Self { dim: d, data }
    }

    pub fn identity(dim: usize) -> Self {
        let mut data = vec![ZERO; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = ONE;
        }
        Self { dim, data }
    }
}

/// Applies every gate of `c` to `state` in place.
pub fn apply_circuit(c: &Circuit, state: &mut [C64]) {
    for g in c.gates() {
        match (g.matrix(), g.wires()) {
            (GateMatrix::One(m), Wires::One(w)) => {
                let bit = 1usize << w;
                for i in 0..state.len() {
                    if i & bit == 0 {
                        let (a, b) = (state[i], state[i | bit]);
                        state[i] = m[0][0] * a + m[0][1] * b;
                        state[i | bit] = m[1][0] * a + m[1][1] * b;
                    }
                }
            }
            (GateMatrix::Two(m), Wires::Two(hi, lo)) => {
                let (bh, bl) = (1usize << hi, 1usize << lo);
                for i in 0..state.len() {
                    if i & (bh | bl) == 0 {
                        let idx = [i, i | bl, i | bh, i | bh | bl];
                        let v = idx.map(|k| state[k]);
                        for (r, &k) in idx.iter().enumerate() {
                            state[k] = m[r][0] * v[0] + m[r][1] * v[1] + m[r][2] * v[2] + m[r][3] * v[3];
                        }
                    }
                }
            }
            _ => unreachable!("circuit validates gate arity"),
        }
    }
}

/// Ordered product of the gate matrices, last gate leftmost.
pub fn dense_unitary(c: &Circuit) -> Result<DenseMatrix> {
    let n = c.qubit_count();
    check_size(n, MAX_DENSE_QUBITS)?;
    let dim = 1usize << n;
    let mut data = vec![ZERO; dim * dim];
    let mut col = vec![ZERO; dim];
    for j in 0..dim {
        col.fill(ZERO);
        col[j] = ONE;
        apply_circuit(c, &mut col);
        for (i, z) in col.iter().enumerate() {
            data[i * dim + j] = *z;
        }
    }
    Ok(DenseMatrix { dim, data })
}

/// `⟨out| C |in⟩` by statevector evolution.
pub fn dense_amplitude(c: &Circuit, input: &BasisState, output: &BasisState) -> Result<C64> {
    let n = c.qubit_count();
    check_size(n, MAX_DENSE_QUBITS)?;
    if input.len() != n || output.len() != n {
        return Err(Error::QubitMismatch { left: n, right: input.len().max(output.len()) });
    }
    let mut state = vec![ZERO; 1 << n];
    state[input.index()] = ONE;
    apply_circuit(c, &mut state);
    Ok(state[output.index()])
}

/// `Tr(U† V)`, summed column by column as `Σ_x ⟨U x | V x⟩`.
pub fn dense_trace(u: &Circuit, v: &Circuit) -> Result<C64> {
    let n = u.qubit_count();
    if n != v.qubit_count() {
        return Err(Error::QubitMismatch { left: n, right: v.qubit_count() });
    }
    check_size(n, MAX_TRACE_QUBITS)?;
    let dim = 1usize << n;
    let mut a = vec![ZERO; dim];
    let mut b = vec![ZERO; dim];
    let mut tr = ZERO;
    for x in 0..dim {
        a.fill(ZERO);
        b.fill(ZERO);
        a[x] = ONE;
        b[x] = ONE;
        apply_circuit(u, &mut a);
        apply_circuit(v, &mut b);
        tr += a.iter().zip(&b).map(|(p, q)| p.conj() * q).sum::<C64>();
    }
    Ok(tr)
}
