//! 2×2 complex matrices for single-qubit gates.

use num_complex::Complex64 as C64;

use crate::pauli::Pauli;

pub type M2 = [[C64; 2]; 2];

const fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

const R: f64 = std::f64::consts::FRAC_1_SQRT_2;

pub const IDENTITY: M2 = [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]];
pub const H: M2 = [[c(R, 0.0), c(R, 0.0)], [c(R, 0.0), c(-R, 0.0)]];
pub const S: M2 = [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 1.0)]];
pub const SDG: M2 = [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, -1.0)]];
pub const X: M2 = [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]];
pub const Y: M2 = [[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]];
pub const Z: M2 = [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]];
/// exp(-iπ/4 Y): maps Z to X.
pub const SQRT_Y: M2 = [[c(R, 0.0), c(-R, 0.0)], [c(R, 0.0), c(R, 0.0)]];

pub fn pauli(p: Pauli) -> M2 {
    match p {
        Pauli::X => X,
        Pauli::Y => Y,
        Pauli::Z => Z,
    }
}

pub fn mul(a: &M2, b: &M2) -> M2 {
    let mut o = [[C64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            o[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    o
}

pub fn dagger(a: &M2) -> M2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

pub fn scale(a: &M2, s: C64) -> M2 {
    [[a[0][0] * s, a[0][1] * s], [a[1][0] * s, a[1][1] * s]]
}

pub fn max_diff(a: &M2, b: &M2) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            m = m.max((a[i][j] - b[i][j]).norm());
        }
    }
    m
}

pub fn is_unitary(a: &M2, tol: f64) -> bool {
    max_diff(&mul(a, &dagger(a)), &IDENTITY) <= tol
}

/// Equality up to a global phase.
#[allow(clippy::needless_range_loop)]
pub fn eq_up_to_phase(a: &M2, b: &M2, tol: f64) -> bool {
    // align on the largest entry of b
    let (mut bi, mut bj, mut best) = (0, 0, 0.0);
    for i in 0..2 {
        for j in 0..2 {
            if b[i][j].norm() > best {
                best = b[i][j].norm();
                bi = i;
                bj = j;
            }
        }
    }
    if best < 1e-12 || a[bi][bj].norm() < 1e-12 {
        return false;
    }
    let ph = b[bi][bj] / a[bi][bj];
    let ph = ph / ph.norm();
    max_diff(&scale(a, ph), b) <= tol
}

/// `u P u†` identified as `±P'`, if it is a Pauli.
pub fn conjugate_pauli(u: &M2, p: Pauli) -> Option<(bool, Pauli)> {
    let m = mul(&mul(u, &pauli(p)), &dagger(u));
    for q in [Pauli::X, Pauli::Y, Pauli::Z] {
        let pm = pauli(q);
        if max_diff(&m, &pm) < 1e-8 {
            return Some((false, q));
        }
        if max_diff(&m, &scale(&pm, C64::new(-1.0, 0.0))) < 1e-8 {
            return Some((true, q));
        }
    }
    None
}

/// Images of X, Y, Z under conjugation, as (negated, Pauli), or `None` for a
/// non-Clifford gate.
pub fn clifford_images(u: &M2) -> Option<[(bool, Pauli); 3]> {
    Some([
        conjugate_pauli(u, Pauli::X)?,
        conjugate_pauli(u, Pauli::Y)?,
        conjugate_pauli(u, Pauli::Z)?,
    ])
}

/// Rotation exp(-i θ Z / 2).
pub fn rz(theta: f64) -> M2 {
    let h = theta / 2.0;
    [
        [C64::from_polar(1.0, -h), c(0.0, 0.0)],
        [c(0.0, 0.0), C64::from_polar(1.0, h)],
    ]
}

/// Unitary with first column (alpha, beta).
pub fn state_prep(alpha: C64, beta: C64) -> M2 {
    [[alpha, -beta.conj()], [beta, alpha.conj()]]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_gates_are_unitary_cliffords() {
        for g in [IDENTITY, H, S, SDG, X, Y, Z, SQRT_Y] {
            assert!(is_unitary(&g, 1e-12));
            assert!(clifford_images(&g).is_some());
        }
        assert!(clifford_images(&rz(0.3)).is_none());
    }

    #[test]
    fn sqrt_y_maps_z_to_x() {
        assert_eq!(conjugate_pauli(&SQRT_Y, Pauli::Z), Some((false, Pauli::X)));
        assert_eq!(conjugate_pauli(&SQRT_Y, Pauli::X), Some((true, Pauli::Z)));
        assert!(eq_up_to_phase(&mul(&SQRT_Y, &SQRT_Y), &Y, 1e-12));
    }

    #[test]
    fn phase_equality() {
        let g = scale(&H, C64::from_polar(1.0, 0.7));
        assert!(eq_up_to_phase(&g, &H, 1e-12));
        assert!(!eq_up_to_phase(&S, &H, 1e-6));
    }
}
