//! Small dense unitaries and the SWAP-equivalence test.
//!
//! Two-qubit matrices are indexed over the basis `|x y>` with the first
//! qubit of the pair as the high bit, so index = `2 * x + y`.

use std::ops::Mul;

use num_complex::Complex64;
use thiserror::Error;

use crate::gates::{self, GateMatrix};
use crate::qasm::Instruction;
use crate::Qubit;

/// Tolerance used when checking that a matrix is unitary.
pub const UNITARITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum UnitaryError {
    #[error("matrix is not unitary (max |M M^dagger - I| = {deviation:e})")]
    NotUnitary { deviation: f64 },
    #[error("gate `{0}` has no known matrix")]
    UnknownGate(String),
    #[error("instruction `{name}` on {qubits:?} acts outside the pair ({a}, {b})")]
    OutsidePair {
        name: String,
        qubits: Vec<Qubit>,
        a: Qubit,
        b: Qubit,
    },
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat4(pub [[Complex64; 4]; 4]);

impl Mat2 {
    pub fn identity() -> Self {
        Mat2([[ONE, ZERO], [ZERO, ONE]])
    }

    pub fn diag(a: Complex64, b: Complex64) -> Self {
        Mat2([[a, ZERO], [ZERO, b]])
    }

    /// `self ⊗ other`.
    pub fn kron(&self, other: &Mat2) -> Mat4 {
        let mut out = [[ZERO; 4]; 4];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, cell) in row.iter_mut().enumerate() {
                *cell = self.0[r / 2][c / 2] * other.0[r % 2][c % 2];
            }
        }
        Mat4(out)
    }
}

impl Mat4 {
    pub fn identity() -> Self {
        let mut m = [[ZERO; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = ONE;
        }
        Mat4(m)
    }

    pub fn swap() -> Self {
        Self::permutation([0, 2, 1, 3])
    }

    /// Permutation matrix sending basis state `i` to `perm[i]`.
    pub fn permutation(perm: [usize; 4]) -> Self {
        let mut m = [[ZERO; 4]; 4];
        for (i, &p) in perm.iter().enumerate() {
            m[p][i] = ONE;
        }
        Mat4(m)
    }

    pub fn diag(d: [Complex64; 4]) -> Self {
        let mut m = [[ZERO; 4]; 4];
        for (i, v) in d.into_iter().enumerate() {
            m[i][i] = v;
        }
        Mat4(m)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut m = self.0;
        m.iter_mut().flatten().for_each(|v| *v *= s);
        Mat4(m)
    }

    pub fn add(&self, other: &Mat4) -> Self {
        let mut m = self.0;
        for (r, row) in m.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v += other.0[r][c];
            }
        }
        Mat4(m)
    }

    pub fn dagger(&self) -> Self {
        let mut m = [[ZERO; 4]; 4];
        for (r, row) in m.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = self.0[c][r].conj();
            }
        }
        Mat4(m)
    }

    /// Largest entry-wise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Mat4) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn unitarity_deviation(&self) -> f64 {
        (*self * self.dagger()).max_abs_diff(&Mat4::identity())
    }

    pub fn is_unitary(&self, tolerance: f64) -> bool {
        self.unitarity_deviation() <= tolerance
    }

    /// Conjugates by SWAP, exchanging the roles of the two qubits.
    pub fn exchange_qubits(&self) -> Self {
        let s = Mat4::swap();
        s * *self * s
    }

    /// Row-major `(re, im)` pairs, 32 values.
    pub fn to_real_parts(&self) -> Vec<f64> {
        self.0.iter().flatten().flat_map(|z| [z.re, z.im]).collect()
    }

    pub fn from_real_parts(parts: &[f64]) -> Option<Self> {
        if parts.len() != 32 {
            return None;
        }
        let mut m = [[ZERO; 4]; 4];
        for (i, v) in m.iter_mut().flatten().enumerate() {
            *v = Complex64::new(parts[2 * i], parts[2 * i + 1]);
        }
        Some(Mat4(m))
    }
}

impl Mul for Mat4 {
    type Output = Mat4;

    fn mul(self, rhs: Mat4) -> Mat4 {
        let mut out = [[ZERO; 4]; 4];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, cell) in row.iter_mut().enumerate() {
                *cell = (0..4).map(|k| self.0[r][k] * rhs.0[k][c]).sum();
            }
        }
        Mat4(out)
    }
}

/// Whether `matrix` equals SWAP up to a global phase within `tolerance`.
///
/// The phase is read off the largest-magnitude entry of `matrix` against
/// the matching SWAP entry, then every entry is compared.
pub fn unitary_equals_swap(matrix: &Mat4, tolerance: f64) -> Result<bool, UnitaryError> {
    let deviation = matrix.unitarity_deviation();
    if deviation > UNITARITY_TOLERANCE {
        return Err(UnitaryError::NotUnitary { deviation });
    }
    let swap = Mat4::swap();
    let mut best = (0, 0);
    let mut best_norm = -1.0;
    for r in 0..4 {
        for c in 0..4 {
            let n = matrix.0[r][c].norm();
            if n > best_norm {
                best_norm = n;
                best = (r, c);
            }
        }
    }
    let (r, c) = best;
    if swap.0[r][c] == ZERO {
        return Ok(false);
    }
    let z = matrix.0[r][c];
    let phase = z / z.norm();
    Ok(matrix.max_abs_diff(&swap.scale(phase)) <= tolerance)
}

/// Lifts one instruction to a 4x4 unitary on the ordered pair `(a, b)`.
pub fn instruction_unitary(inst: &Instruction, a: Qubit, b: Qubit) -> Result<Mat4, UnitaryError> {
    let outside = || UnitaryError::OutsidePair {
        name: inst.name.clone(),
        qubits: inst.qubits.clone(),
        a,
        b,
    };
    if let Some(m) = &inst.matrix {
        return match inst.qubits.as_slice() {
            [x, y] if (*x, *y) == (a, b) => Ok(**m),
            [x, y] if (*x, *y) == (b, a) => Ok(m.exchange_qubits()),
            _ => Err(outside()),
        };
    }
    let gm = gates::gate_matrix(&inst.name, &inst.params)
        .ok_or_else(|| UnitaryError::UnknownGate(inst.name.clone()))?;
    match (gm, inst.qubits.as_slice()) {
        (GateMatrix::One(u), [q]) if *q == a => Ok(u.kron(&Mat2::identity())),
        (GateMatrix::One(u), [q]) if *q == b => Ok(Mat2::identity().kron(&u)),
        (GateMatrix::Two(m), [x, y]) if (*x, *y) == (a, b) => Ok(m),
        (GateMatrix::Two(m), [x, y]) if (*x, *y) == (b, a) => Ok(m.exchange_qubits()),
        _ => Err(outside()),
    }
}

/// Product of the instructions' unitaries on `pair`, the first
/// instruction applied first (rightmost factor).
pub fn compose_span_unitary(instructions: &[Instruction], pair: (Qubit, Qubit)) -> Result<Mat4, UnitaryError> {
    let (a, b) = pair;
    instructions
        .iter()
        .try_fold(Mat4::identity(), |acc, inst| Ok(instruction_unitary(inst, a, b)? * acc))
}
