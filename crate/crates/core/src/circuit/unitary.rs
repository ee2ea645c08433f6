//! Dense qubit operators: 2×2 single-qubit algebra and full circuit unitaries.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{normalize_angle, Circuit, Gate};
use crate::error::{Error, Result};

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Largest register `circuit_unitary` accepts.
pub const MAX_UNITARY_QUBITS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl Mat2 {
    pub fn identity() -> Self {
        Mat2([[ONE, ZERO], [ZERO, ONE]])
    }

    /// R(θ,φ) = cos(θ/2)·I − i·sin(θ/2)·(cos φ·X + sin φ·Y).
    pub fn rotation(theta: f64, phi: f64) -> Self {
        let c = C64::new((theta / 2.0).cos(), 0.0);
        let s = (theta / 2.0).sin();
        let minus_i = C64::new(0.0, -1.0);
        Mat2([
            [c, minus_i * s * C64::from_polar(1.0, -phi)],
            [minus_i * s * C64::from_polar(1.0, phi), c],
        ])
    }

    /// diag(e^{-iα/2}, e^{iα/2}).
    pub fn virtual_z(angle: f64) -> Self {
        Mat2([
            [C64::from_polar(1.0, -angle / 2.0), ZERO],
            [ZERO, C64::from_polar(1.0, angle / 2.0)],
        ])
    }

    pub fn hadamard() -> Self {
        let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Mat2([[h, h], [h, -h]])
    }

    pub fn pauli_x() -> Self {
        Mat2([[ZERO, ONE], [ONE, ZERO]])
    }

    /// `self · rhs`
    pub fn mul(&self, rhs: &Mat2) -> Mat2 {
        let a = &self.0;
        let b = &rhs.0;
        let mut out = [[ZERO; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2(out)
    }

    pub fn dagger(&self) -> Mat2 {
        let a = &self.0;
        Mat2([[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]])
    }

    /// Max elementwise distance between `self` and `e^{iγ}·other`, minimized
    /// over the global phase.
    pub fn distance_up_to_phase(&self, other: &Mat2) -> f64 {
        let mut overlap = ZERO;
        for i in 0..2 {
            for j in 0..2 {
                overlap += other.0[i][j].conj() * self.0[i][j];
            }
        }
        let phase = if overlap.norm() < 1e-300 { ONE } else { overlap / overlap.norm() };
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((self.0[i][j] - phase * other.0[i][j]).norm());
            }
        }
        worst
    }

    pub fn of_gate(gate: &Gate) -> Option<Mat2> {
        match gate {
            Gate::R { theta, phi, .. } => Some(Mat2::rotation(*theta, *phi)),
            Gate::VirtualZ { angle, .. } => Some(Mat2::virtual_z(*angle)),
            Gate::H { .. } => Some(Mat2::hadamard()),
            Gate::X { .. } => Some(Mat2::pauli_x()),
            _ => None,
        }
    }
}

/// A single-qubit operator written as one physical pulse followed by a frame
/// change: `U ∝ Z(lambda) · R(theta, phi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseFrame {
    /// In `[0, π]`; zero when `U` is diagonal.
    pub theta: f64,
    /// In `[0, 2π)`.
    pub phi: f64,
    /// In `[0, 2π)`.
    pub lambda: f64,
}

/// Decompose an arbitrary 2×2 unitary into a pulse plus a virtual Z.
pub fn pulse_frame(u: &Mat2) -> PulseFrame {
    let m = &u.0;
    let theta = 2.0 * m[1][0].norm().atan2(m[0][0].norm());
    const TINY: f64 = 1e-12;
    if m[1][0].norm() < TINY {
        let lambda = normalize_angle(m[1][1].arg() - m[0][0].arg());
        return PulseFrame { theta: 0.0, phi: 0.0, lambda };
    }
    if m[0][0].norm() < TINY {
        // R(π,φ) and R(π,φ+π) differ by a global sign, so either root works.
        let phi = normalize_angle((m[1][0].arg() - m[0][1].arg()) / 2.0);
        return PulseFrame { theta: PI, phi, lambda: 0.0 };
    }
    let lambda = normalize_angle(m[1][1].arg() - m[0][0].arg());
    let v = Mat2::virtual_z(-lambda).mul(u);
    let g = v.0[0][0] / v.0[0][0].norm();
    // v10 / g = -i·sin(θ/2)·e^{iφ}
    let phi = normalize_angle((v.0[1][0] / g * C64::new(0.0, 1.0)).arg());
    PulseFrame { theta, phi, lambda }
}

/// Dense operator on `2^n` amplitudes, row-major. Qubit `q` is bit `q` of the
/// basis index.
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary {
    pub n_qubits: usize,
    pub data: Vec<C64>,
}

impl Unitary {
    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.dim() + col]
    }

    /// Returns the phase `e^{iγ}` such that `self ≈ e^{iγ}·other` within `tol`
    /// elementwise, or `None`.
    pub fn equal_up_to_phase(&self, other: &Unitary, tol: f64) -> Option<C64> {
        if self.n_qubits != other.n_qubits {
            return None;
        }
        phase_match(&self.data, &other.data, tol)
    }
}

/// Best global phase aligning `b` onto `a`, if the aligned residual is within `tol`.
pub fn phase_match(a: &[C64], b: &[C64], tol: f64) -> Option<C64> {
    let overlap: C64 = a.iter().zip(b).map(|(x, y)| y.conj() * x).sum();
    let phase = if overlap.norm() < 1e-300 { ONE } else { overlap / overlap.norm() };
    let worst = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - phase * y).norm())
        .fold(0.0, f64::max);
    (worst <= tol).then_some(phase)
}

fn apply_mat2(state: &mut [C64], q: usize, m: &Mat2) {
    let bit = 1usize << q;
    for i in 0..state.len() {
        if i & bit == 0 {
            let a = state[i];
            let b = state[i | bit];
            state[i] = m.0[0][0] * a + m.0[0][1] * b;
            state[i | bit] = m.0[1][0] * a + m.0[1][1] * b;
        }
    }
}

/// Apply one gate to a qubit state vector in place.
pub fn apply_gate(state: &mut [C64], gate: &Gate) {
    match gate {
        Gate::Mcz { qubits } => {
            let mask = qubits.iter().fold(0usize, |m, &q| m | (1 << q));
            for (i, amp) in state.iter_mut().enumerate() {
                if i & mask == mask {
                    *amp = -*amp;
                }
            }
        }
        Gate::Ccz { qubits } => apply_gate(state, &Gate::mcz(qubits.to_vec())),
        Gate::Cnot { qubits: [c, t] } => {
            let (cb, tb) = (1usize << c, 1usize << t);
            for i in 0..state.len() {
                if i & cb != 0 && i & tb == 0 {
                    state.swap(i, i | tb);
                }
            }
        }
        Gate::Swap { qubits: [a, b] } => {
            let (ab, bb) = (1usize << a, 1usize << b);
            for i in 0..state.len() {
                if i & ab != 0 && i & bb == 0 {
                    state.swap(i, (i & !ab) | bb);
                }
            }
        }
        single => {
            let q = single.qubits()[0];
            let m = Mat2::of_gate(single).expect("single-qubit gate");
            apply_mat2(state, q, &m);
        }
    }
}

/// Run a circuit on a state vector.
pub fn simulate(circuit: &Circuit, state: &mut [C64]) {
    for g in &circuit.gates {
        apply_gate(state, g);
    }
}

pub fn zero_state(n_qubits: usize) -> Vec<C64> {
    let mut s = vec![ZERO; 1 << n_qubits];
    s[0] = ONE;
    s
}

/// Exact dense product of the circuit's gate matrices, in circuit order.
pub fn circuit_unitary(circuit: &Circuit) -> Result<Unitary> {
    let n = circuit.n_qubits;
    if n > MAX_UNITARY_QUBITS {
        return Err(Error::TooLarge { what: "circuit_unitary", max: MAX_UNITARY_QUBITS, got: n });
    }
    circuit.check_structure()?;
    let dim = 1usize << n;
    let mut data = vec![ZERO; dim * dim];
    let mut col = vec![ZERO; dim];
    for j in 0..dim {
        col.iter_mut().for_each(|a| *a = ZERO);
        col[j] = ONE;
        simulate(circuit, &mut col);
        for (i, a) in col.iter().enumerate() {
            data[i * dim + j] = *a;
        }
    }
    Ok(Unitary { n_qubits: n, data })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_mul(a: &Mat2, b: &Mat2) -> Mat2 {
        let mut out = Mat2([[ZERO; 2]; 2]);
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    out.0[i][j] += a.0[i][k] * b.0[k][j];
                }
            }
        }
        out
    }

    #[test]
    fn resonant_pi_on_zero_gives_minus_i_one() {
        let r = Mat2::rotation(PI, 0.0);
        assert!(r.0[0][0].norm() < 1e-15);
        assert!((r.0[1][0] - C64::new(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn rotation_is_unitary() {
        for &(t, p) in &[(0.3, 1.1), (PI, 2.0), (2.5, 5.9)] {
            let r = Mat2::rotation(t, p);
            assert!(naive_mul(&r.dagger(), &r).distance_up_to_phase(&Mat2::identity()) < 1e-12);
        }
    }

    #[test]
    fn pulse_frame_reconstructs() {
        let cases = [
            Mat2::rotation(PI / 2.0, 0.0).mul(&Mat2::rotation(PI / 2.0, PI / 2.0)),
            Mat2::hadamard(),
            Mat2::pauli_x(),
            Mat2::virtual_z(0.7),
            Mat2::rotation(1.0, 2.0).mul(&Mat2::virtual_z(0.4)),
            Mat2::identity(),
        ];
        for u in cases {
            let f = pulse_frame(&u);
            let back = Mat2::virtual_z(f.lambda).mul(&Mat2::rotation(f.theta, f.phi));
            assert!(back.distance_up_to_phase(&u) < 1e-12, "{u:?} -> {f:?}");
            assert!((0.0..=PI + 1e-12).contains(&f.theta));
        }
    }

    #[test]
    fn mcz_unitary_is_diagonal_with_one_flip() {
        let c = Circuit::with_gates(2, vec![Gate::mcz(vec![0, 1])]);
        let u = circuit_unitary(&c).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expected = if i != j { 0.0 } else if i == 3 { -1.0 } else { 1.0 };
                assert!((u.get(i, j) - C64::new(expected, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn empty_circuit_is_identity() {
        let u = circuit_unitary(&Circuit::new(2)).unwrap();
        for i in 0..4 {
            assert_eq!(u.get(i, i), ONE);
        }
    }

    #[test]
    fn single_rotation_matches_matrix() {
        let c = Circuit::with_gates(1, vec![Gate::r(0, PI, 0.0)]);
        let u = circuit_unitary(&c).unwrap();
        let m = Mat2::rotation(PI, 0.0);
        for i in 0..2 {
            for j in 0..2 {
                assert!((u.get(i, j) - m.0[i][j]).norm() < 1e-15);
            }
        }
        // U†U = I
        let mut uu = ZERO;
        for k in 0..2 {
            uu += u.get(k, 0).conj() * u.get(k, 0);
        }
        assert!((uu - ONE).norm() < 1e-12);
    }

    #[test]
    fn too_large_rejected() {
        assert!(matches!(circuit_unitary(&Circuit::new(11)), Err(Error::TooLarge { .. })));
    }
}
