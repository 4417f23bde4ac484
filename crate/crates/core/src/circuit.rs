//! Circuit intermediate representation, ensemble generators and the
//! ancilla-based trace circuit.
//!
//! Wires are numbered from 0. Two-qubit gate matrices are written in the
//! local basis `|a b⟩` with the first wire `a` as the high bit, so
//! `CNOT(control, target)` is the usual `diag(I, X)` block matrix.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI};
use core::fmt;

#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;
use rand::Rng;

use crate::error::{Error, Result};
use crate::haar;
use crate::linalg::{adjoint2, adjoint4, unitarity_error4, Mat2, Mat4, C64, ONE, ZERO};

/// Rotation angles are kept modulo the true period of `exp(-iθP/2)`.
pub const ANGLE_PERIOD: f64 = 4.0 * PI;

/// Entrywise tolerance on `U†U = I` for explicit two-qubit unitaries.
pub const UNITARY_TOLERANCE: f64 = 1e-12;

fn wrap_angle(theta: f64) -> f64 {
    let t = theta % ANGLE_PERIOD;
    let t = if t < 0.0 { t + ANGLE_PERIOD } else { t };
    // -tiny % 4π can round up to exactly 4π
    if t >= ANGLE_PERIOD {
        0.0
    } else {
        t
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    Hadamard,
    PauliX,
    Cnot,
    Cz,
    RotX(f64),
    RotY(f64),
    RotZ(f64),
    TwoQubitUnitary(Box<Mat4>),
}

/// Wires a gate acts on. For `Cnot` the order is `(control, target)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Wires {
    One(usize),
    Two(usize, usize),
}

/// The matrix of a gate in its local basis.
#[derive(Debug, Clone, PartialEq)]
pub enum GateMatrix {
    One(Mat2),
    Two(Mat4),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    kind: GateKind,
    wires: Wires,
}

impl Gate {
    pub fn hadamard(w: usize) -> Self {
        Self { kind: GateKind::Hadamard, wires: Wires::One(w) }
    }

    pub fn pauli_x(w: usize) -> Self {
        Self { kind: GateKind::PauliX, wires: Wires::One(w) }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Self { kind: GateKind::Cnot, wires: Wires::Two(control, target) }
    }

    pub fn cz(a: usize, b: usize) -> Self {
        Self { kind: GateKind::Cz, wires: Wires::Two(a, b) }
    }

    pub fn rot_x(w: usize, theta: f64) -> Self {
        Self { kind: GateKind::RotX(wrap_angle(theta)), wires: Wires::One(w) }
    }

    pub fn rot_y(w: usize, theta: f64) -> Self {
        Self { kind: GateKind::RotY(wrap_angle(theta)), wires: Wires::One(w) }
    }

    pub fn rot_z(w: usize, theta: f64) -> Self {
        Self { kind: GateKind::RotZ(wrap_angle(theta)), wires: Wires::One(w) }
    }

    /// An explicit two-qubit unitary; rejects matrices that are not unitary
    /// to within [`UNITARY_TOLERANCE`].
    pub fn unitary(a: usize, b: usize, matrix: Mat4) -> Result<Self> {
        let err = unitarity_error4(&matrix);
        if !(err <= UNITARY_TOLERANCE) {
            return Err(Error::InvalidGate(format!(
                "two-qubit matrix deviates from unitarity by {err:e}"
            )));
        }
        Ok(Self { kind: GateKind::TwoQubitUnitary(Box::new(matrix)), wires: Wires::Two(a, b) })
    }

    pub fn kind(&self) -> &GateKind {
        &self.kind
    }

    pub fn wires(&self) -> Wires {
        self.wires
    }

    /// True for gates whose matrix is diagonal in the computational basis.
    pub fn is_diagonal(&self) -> bool {
        matches!(self.kind, GateKind::Cz | GateKind::RotZ(_))
    }

    /// The conjugate-transpose gate on the same wires.
    pub fn adjoint(&self) -> Self {
        let kind = match &self.kind {
            GateKind::RotX(t) => GateKind::RotX(wrap_angle(-t)),
            GateKind::RotY(t) => GateKind::RotY(wrap_angle(-t)),
            GateKind::RotZ(t) => GateKind::RotZ(wrap_angle(-t)),
            GateKind::TwoQubitUnitary(m) => GateKind::TwoQubitUnitary(Box::new(adjoint4(m))),
            other => other.clone(),
        };
        Self { kind, wires: self.wires }
    }

    /// Same gate with every wire index shifted by `offset`.
    pub fn shifted(&self, offset: usize) -> Self {
        let wires = match self.wires {
            Wires::One(w) => Wires::One(w + offset),
            Wires::Two(a, b) => Wires::Two(a + offset, b + offset),
        };
        Self { kind: self.kind.clone(), wires }
    }

    /// Rotations follow `R_P(θ) = exp(-iθP/2)`.
    pub fn matrix(&self) -> GateMatrix {
        let i = C64::new(0.0, 1.0);
        match &self.kind {
            GateKind::Hadamard => {
                let h = C64::new(FRAC_1_SQRT_2, 0.0);
                GateMatrix::One([[h, h], [h, -h]])
            }
            GateKind::PauliX => GateMatrix::One([[ZERO, ONE], [ONE, ZERO]]),
            GateKind::RotX(t) => {
                let (c, s) = ((t / 2.0).cos(), (t / 2.0).sin());
                GateMatrix::One([[C64::new(c, 0.0), -i * s], [-i * s, C64::new(c, 0.0)]])
            }
            GateKind::RotY(t) => {
                let (c, s) = ((t / 2.0).cos(), (t / 2.0).sin());
                GateMatrix::One([
                    [C64::new(c, 0.0), C64::new(-s, 0.0)],
                    [C64::new(s, 0.0), C64::new(c, 0.0)],
                ])
            }
            GateKind::RotZ(t) => GateMatrix::One([
                [C64::from_polar(1.0, -t / 2.0), ZERO],
                [ZERO, C64::from_polar(1.0, t / 2.0)],
            ]),
            GateKind::Cnot => {
                let mut m = [[ZERO; 4]; 4];
                m[0][0] = ONE;
                m[1][1] = ONE;
                m[2][3] = ONE;
                m[3][2] = ONE;
                GateMatrix::Two(m)
            }
            GateKind::Cz => {
                let mut m = [[ZERO; 4]; 4];
                m[0][0] = ONE;
                m[1][1] = ONE;
                m[2][2] = ONE;
                m[3][3] = -ONE;
                GateMatrix::Two(m)
            }
            GateKind::TwoQubitUnitary(m) => GateMatrix::Two(**m),
        }
    }
}

impl GateMatrix {
    pub fn adjoint(&self) -> Self {
        match self {
            GateMatrix::One(m) => GateMatrix::One(adjoint2(m)),
            GateMatrix::Two(m) => GateMatrix::Two(adjoint4(m)),
        }
    }
}

/// An ordered gate list over `qubit_count` wires.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    qubit_count: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(qubit_count: usize) -> Result<Self> {
        if qubit_count == 0 {
            return Err(Error::InvalidGate("circuit needs at least one qubit".into()));
        }
        Ok(Self { qubit_count, gates: Vec::new() })
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        let n = self.qubit_count;
        match gate.wires {
            Wires::One(w) if w >= n => {
                return Err(Error::InvalidGate(format!("wire {w} out of range for {n} qubits")))
            }
            Wires::Two(a, b) if a >= n || b >= n => {
                return Err(Error::InvalidGate(format!(
                    "wires ({a},{b}) out of range for {n} qubits"
                )))
            }
            Wires::Two(a, b) if a == b => {
                return Err(Error::InvalidGate(format!("two-qubit gate on repeated wire {a}")))
            }
            _ => {}
        }
        match (&gate.kind, gate.wires) {
            (
                GateKind::Hadamard
                | GateKind::PauliX
                | GateKind::RotX(_)
                | GateKind::RotY(_)
                | GateKind::RotZ(_),
                Wires::One(_),
            )
            | (GateKind::Cnot | GateKind::Cz | GateKind::TwoQubitUnitary(_), Wires::Two(..)) => {}
            _ => return Err(Error::InvalidGate("gate arity does not match its wires".into())),
        }
        self.gates.push(gate);
        Ok(())
    }

    /// Gates reversed, each replaced by its conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self {
            qubit_count: self.qubit_count,
            gates: self.gates.iter().rev().map(Gate::adjoint).collect(),
        }
    }

    /// True when every two-qubit gate acts on neighbouring wires.
    pub fn is_nearest_neighbor(&self) -> bool {
        self.gates.iter().all(|g| match g.wires {
            Wires::One(_) => true,
            Wires::Two(a, b) => a.abs_diff(b) == 1,
        })
    }

    pub fn two_qubit_gate_count(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g.wires, Wires::Two(..))).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    Parallel,
    Local,
    HardwareEfficient,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Parallel => "parallel",
            Family::Local => "local",
            Family::HardwareEfficient => "hea",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "parallel" => Some(Family::Parallel),
            "local" => Some(Family::Local),
            "hea" | "hardware-efficient" | "hardware_efficient" => {
                Some(Family::HardwareEfficient)
            }
            _ => None,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Entangler {
    Cnot,
    Cz,
}

impl Entangler {
    pub fn name(self) -> &'static str {
        match self {
            Entangler::Cnot => "cnot",
            Entangler::Cz => "cz",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "cnot" | "CNOT" => Some(Entangler::Cnot),
            "cz" | "CZ" => Some(Entangler::Cz),
            _ => None,
        }
    }

    fn gate(self, a: usize, b: usize) -> Gate {
        match self {
            Entangler::Cnot => Gate::cnot(a, b),
            Entangler::Cz => Gate::cz(a, b),
        }
    }
}

/// How Haar-random two-qubit gates are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum HaarMode {
    #[default]
    GinibreQr,
    PhaseParam,
}

impl HaarMode {
    pub fn name(self) -> &'static str {
        match self {
            HaarMode::GinibreQr => "ginibre-qr",
            HaarMode::PhaseParam => "phase-param",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "ginibre-qr" | "ginibre" | "qr" => Some(HaarMode::GinibreQr),
            "phase-param" | "phase" | "phases" => Some(HaarMode::PhaseParam),
            _ => None,
        }
    }

    pub fn sample<R: Rng + ?Sized>(self, rng: &mut R) -> Mat4 {
        match self {
            HaarMode::GinibreQr => haar::sample_haar_two_qubit(rng),
            HaarMode::PhaseParam => haar::sample_phase_parameterized(rng),
        }
    }
}

/// Parameters of a random circuit ensemble. The local dimension is always 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EnsembleSpec {
    pub family: Family,
    pub qubits: usize,
    pub layers: usize,
    pub entangler: Option<Entangler>,
    pub haar_mode: HaarMode,
}

impl EnsembleSpec {
    pub const LOCAL_DIM: u32 = 2;

    pub fn parallel(qubits: usize, layers: usize) -> Self {
        Self { family: Family::Parallel, qubits, layers, entangler: None, haar_mode: HaarMode::GinibreQr }
    }

    pub fn local(qubits: usize, layers: usize) -> Self {
        Self { family: Family::Local, qubits, layers, entangler: None, haar_mode: HaarMode::GinibreQr }
    }

    pub fn hardware_efficient(qubits: usize, layers: usize, entangler: Entangler) -> Self {
        Self {
            family: Family::HardwareEfficient,
            qubits,
            layers,
            entangler: Some(entangler),
            haar_mode: HaarMode::GinibreQr,
        }
    }

    pub fn with_haar_mode(mut self, mode: HaarMode) -> Self {
        self.haar_mode = mode;
        self
    }

    pub fn with_layers(mut self, layers: usize) -> Self {
        self.layers = layers;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.qubits < 2 {
            return Err(Error::InvalidSpec(format!("n = {} < 2", self.qubits)));
        }
        if self.layers < 1 {
            return Err(Error::InvalidSpec("l must be at least 1".into()));
        }
        if self.family == Family::HardwareEfficient && self.entangler.is_none() {
            return Err(Error::InvalidSpec("hardware-efficient ensemble needs an entangler".into()));
        }
        Ok(())
    }

    /// Draws one circuit from the ensemble.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Circuit> {
        match self.family {
            Family::Parallel => build_parallel_instance(self, rng),
            Family::Local => build_local_instance(self, rng),
            Family::HardwareEfficient => build_hea_instance(self, rng),
        }
    }
}

fn check_family(spec: &EnsembleSpec, family: Family) -> Result<()> {
    spec.validate()?;
    if spec.family != family {
        return Err(Error::InvalidSpec(format!(
            "expected a {family} spec, got {}",
            spec.family
        )));
    }
    Ok(())
}

/// Brickwork: layer `j` covers pairs `(i, i+1)` for `i = j mod 2, j mod 2 + 2, …`.
pub fn build_parallel_instance<R: Rng + ?Sized>(spec: &EnsembleSpec, rng: &mut R) -> Result<Circuit> {
    check_family(spec, Family::Parallel)?;
    let n = spec.qubits;
    let mut c = Circuit::new(n)?;
    for j in 0..spec.layers {
        let mut i = j % 2;
        while i + 1 < n {
            c.push(Gate::unitary(i, i + 1, spec.haar_mode.sample(rng))?)?;
            i += 2;
        }
    }
    Ok(c)
}

/// One Haar gate per layer on a uniformly chosen neighbouring pair.
pub fn build_local_instance<R: Rng + ?Sized>(spec: &EnsembleSpec, rng: &mut R) -> Result<Circuit> {
    check_family(spec, Family::Local)?;
    let n = spec.qubits;
    let mut c = Circuit::new(n)?;
    for _ in 0..spec.layers {
        let i = rng.gen_range(0..n - 1);
        c.push(Gate::unitary(i, i + 1, spec.haar_mode.sample(rng))?)?;
    }
    Ok(c)
}

/// `RY(π/4)` wall, then per layer: a random Pauli rotation on every qubit,
/// an entangler wall on even pairs and one on odd pairs.
pub fn build_hea_instance<R: Rng + ?Sized>(spec: &EnsembleSpec, rng: &mut R) -> Result<Circuit> {
    check_family(spec, Family::HardwareEfficient)?;
    let entangler = spec.entangler.expect("validated");
    let n = spec.qubits;
    let mut c = Circuit::new(n)?;
    for w in 0..n {
        c.push(Gate::rot_y(w, FRAC_PI_4))?;
    }
    for _ in 0..spec.layers {
        for w in 0..n {
            let theta = rng.gen_range(0.0..2.0 * PI);
            let gate = match rng.gen_range(0..3u8) {
                0 => Gate::rot_x(w, theta),
                1 => Gate::rot_y(w, theta),
                _ => Gate::rot_z(w, theta),
            };
            c.push(gate)?;
        }
        for start in [0, 1] {
            let mut i = start;
            while i + 1 < n {
                c.push(entangler.gate(i, i + 1))?;
                i += 2;
            }
        }
    }
    Ok(c)
}

/// Builds the `2n`-qubit circuit whose `⟨0…0|·|0…0⟩` amplitude is
/// `Tr(U†V) / 2^n`.
///
/// Wires `0..n` are ancillas and `n..2n` are targets. Ancilla `j` is put in a
/// Bell pair with target `j` by `H` then `CNOT`; then `V` and `U†` run on
/// the targets, and the Bell preparation is undone (`CNOT` then `H`).
pub fn build_trace_circuit(u: &Circuit, v: &Circuit) -> Result<Circuit> {
    if u.qubit_count() != v.qubit_count() {
        return Err(Error::QubitMismatch { left: u.qubit_count(), right: v.qubit_count() });
    }
    let n = u.qubit_count();
    let mut c = Circuit::new(2 * n)?;
    for j in 0..n {
        c.push(Gate::hadamard(j))?;
        c.push(Gate::cnot(j, n + j))?;
    }
    for g in v.gates() {
        c.push(g.shifted(n))?;
    }
    for g in u.gates().iter().rev() {
        c.push(g.adjoint().shifted(n))?;
    }
    for j in 0..n {
        c.push(Gate::cnot(j, n + j))?;
        c.push(Gate::hadamard(j))?;
    }
    Ok(c)
}
