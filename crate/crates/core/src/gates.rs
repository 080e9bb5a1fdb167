//! The built-in gate table standing in for `qelib1.inc`.

use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;

use crate::unitary::{Mat2, Mat4};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GateSignature {
    pub num_params: usize,
    pub num_qubits: usize,
}

const fn sig(num_params: usize, num_qubits: usize) -> GateSignature {
    GateSignature { num_params, num_qubits }
}

/// Name of the two-qubit explicit-matrix extension gate. Its 32 parameters
/// are the row-major `(re, im)` entries of the 4x4 unitary.
pub const UNITARY_GATE: &str = "unitary";

pub fn standard_gate(name: &str) -> Option<GateSignature> {
    Some(match name {
        "id" | "x" | "y" | "z" | "h" | "s" | "sdg" | "t" | "tdg" | "sx" | "sxdg" => sig(0, 1),
        "u1" | "p" | "rx" | "ry" | "rz" => sig(1, 1),
        "u2" => sig(2, 1),
        "u3" | "u" => sig(3, 1),
        "cx" | "cz" | "swap" | "iswap" => sig(0, 2),
        "rxx" | "ryy" | "rzz" => sig(1, 2),
        "ccx" => sig(0, 3),
        _ => return None,
    })
}

pub fn is_standard(name: &str) -> bool {
    standard_gate(name).is_some()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GateMatrix {
    One(Mat2),
    Two(Mat4),
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn phase(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}

fn u3(theta: f64, phi: f64, lambda: f64) -> Mat2 {
    let (s, co) = (theta / 2.0).sin_cos();
    Mat2([
        [c(co, 0.0), -phase(lambda) * s],
        [phase(phi) * s, phase(phi + lambda) * co],
    ])
}

/// `exp(-i theta/2 P⊗P)` for a Pauli product whose square is the identity.
fn pauli_rotation(theta: f64, pp: Mat4) -> Mat4 {
    let (s, co) = (theta / 2.0).sin_cos();
    Mat4::identity().scale(c(co, 0.0)).add(&pp.scale(c(0.0, -s)))
}

/// Unitary of a standard gate, `None` for unknown names, 3-qubit gates or
/// a wrong parameter count.
pub fn gate_matrix(name: &str, params: &[f64]) -> Option<GateMatrix> {
    let sig = standard_gate(name)?;
    if sig.num_params != params.len() {
        return None;
    }
    let p = |i: usize| params[i];
    let one = |m: Mat2| Some(GateMatrix::One(m));
    let two = |m: Mat4| Some(GateMatrix::Two(m));
    let x = Mat2([[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]]);
    let y = Mat2([[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]]);
    let z = Mat2::diag(c(1.0, 0.0), c(-1.0, 0.0));
    match name {
        "id" => one(Mat2::identity()),
        "x" => one(x),
        "y" => one(y),
        "z" => one(z),
        "h" => {
            let r = std::f64::consts::FRAC_1_SQRT_2;
            one(Mat2([[c(r, 0.0), c(r, 0.0)], [c(r, 0.0), c(-r, 0.0)]]))
        }
        "s" => one(Mat2::diag(c(1.0, 0.0), c(0.0, 1.0))),
        "sdg" => one(Mat2::diag(c(1.0, 0.0), c(0.0, -1.0))),
        "t" => one(Mat2::diag(c(1.0, 0.0), phase(FRAC_PI_4))),
        "tdg" => one(Mat2::diag(c(1.0, 0.0), phase(-FRAC_PI_4))),
        "sx" => one(Mat2([[c(0.5, 0.5), c(0.5, -0.5)], [c(0.5, -0.5), c(0.5, 0.5)]])),
        "sxdg" => one(Mat2([[c(0.5, -0.5), c(0.5, 0.5)], [c(0.5, 0.5), c(0.5, -0.5)]])),
        "u1" | "p" => one(Mat2::diag(c(1.0, 0.0), phase(p(0)))),
        "rx" => {
            let (s, co) = (p(0) / 2.0).sin_cos();
            one(Mat2([[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]]))
        }
        "ry" => {
            let (s, co) = (p(0) / 2.0).sin_cos();
            one(Mat2([[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]]))
        }
        "rz" => one(Mat2::diag(phase(-p(0) / 2.0), phase(p(0) / 2.0))),
        "u2" => one(u3(std::f64::consts::FRAC_PI_2, p(0), p(1))),
        "u3" | "u" => one(u3(p(0), p(1), p(2))),
        "cx" => two(Mat4::permutation([0, 1, 3, 2])),
        "cz" => two(Mat4::diag([c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0)])),
        "swap" => two(Mat4::swap()),
        "iswap" => {
            let mut m = Mat4::diag([c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
            m.0[1][2] = c(0.0, 1.0);
            m.0[2][1] = c(0.0, 1.0);
            two(m)
        }
        "rxx" => two(pauli_rotation(p(0), x.kron(&x))),
        "ryy" => two(pauli_rotation(p(0), y.kron(&y))),
        "rzz" => two(pauli_rotation(p(0), z.kron(&z))),
        _ => None,
    }
}
