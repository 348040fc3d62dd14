//! Small operator helpers: Pauli matrices, tensor products, partial traces.

use crate::matcore::{c64, hermitian_eigen, CMat, CVec, C64, I, ONE, ZERO};

pub fn pauli_x() -> CMat {
    CMat::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn pauli_y() -> CMat {
    CMat::from_row_slice(2, 2, &[ZERO, -I, I, ZERO])
}

pub fn pauli_z() -> CMat {
    CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
}

pub fn paulis() -> [CMat; 3] {
    [pauli_x(), pauli_y(), pauli_z()]
}

/// `a·σ` for a real 3-vector.
pub fn pauli_dot(v: [f64; 3]) -> CMat {
    let [x, y, z] = paulis();
    x * c64(v[0], 0.0) + y * c64(v[1], 0.0) + z * c64(v[2], 0.0)
}

/// Coefficients `(m0, m)` with `M = m0·I + m·σ` for a 2x2 matrix.
pub fn pauli_coordinates(m: &CMat) -> (C64, [C64; 3]) {
    let half = c64(0.5, 0.0);
    let coord = |p: &CMat| (p * m).trace() * half;
    let [x, y, z] = paulis();
    (m.trace() * half, [coord(&x), coord(&y), coord(&z)])
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// `Tr(A† B)`.
pub fn hs_inner(a: &CMat, b: &CMat) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Traces out the first factor of `H_A ⊗ H_B`, index `a·d_b + b`.
pub fn partial_trace_first(m: &CMat, da: usize, db: usize) -> CMat {
    CMat::from_fn(db, db, |b, bp| (0..da).map(|a| m[(a * db + b, a * db + bp)]).sum())
}

/// Traces out the second factor of `H_A ⊗ H_B`, index `a·d_b + b`.
pub fn partial_trace_second(m: &CMat, da: usize, db: usize) -> CMat {
    CMat::from_fn(da, da, |a, ap| (0..db).map(|b| m[(a * db + b, ap * db + b)]).sum())
}

/// `|v⟩⟨w|`.
pub fn outer(v: &CVec, w: &CVec) -> CMat {
    v * w.adjoint()
}

/// `½‖X‖₁` for Hermitian `X`.
pub fn trace_norm_half(x: &CMat) -> f64 {
    0.5 * hermitian_eigen(x).0.iter().map(|l| l.abs()).sum::<f64>()
}

/// Trace distance `½‖ρ − σ‖₁`.
pub fn trace_distance(rho: &CMat, sigma: &CMat) -> f64 {
    trace_norm_half(&(rho - sigma))
}

/// Row-major flattening `vec(F)_{iD+j} = F_{ij}`, the convention of `(F⊗1)Σ|k⟩|k⟩`.
pub fn vec_row_major(f: &CMat) -> CVec {
    let (r, c) = f.shape();
    CVec::from_fn(r * c, |idx, _| f[(idx / c, idx % c)])
}

pub fn unvec_row_major(v: &CVec, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |i, j| v[i * cols + j])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::eye;

    #[test]
    fn pauli_algebra() {
        let [x, y, z] = paulis();
        assert!((&x * &y - &z * I).norm() < 1e-15);
        assert!((&x * &x - eye(2)).norm() < 1e-15);
        let m = eye(2) * c64(0.3, 0.1) + pauli_dot([0.2, -0.4, 0.7]);
        let (m0, v) = pauli_coordinates(&m);
        assert!((m0 - c64(0.3, 0.1)).norm() < 1e-15);
        assert!((v[1] - c64(-0.4, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn partial_traces_of_product() {
        let a = CMat::from_fn(2, 2, |i, j| c64(i as f64 + 1.0, j as f64));
        let b = CMat::from_fn(3, 3, |i, j| c64((i * j) as f64, 1.0));
        let ab = kron(&a, &b);
        assert!((partial_trace_first(&ab, 2, 3) - &b * a.trace()).norm() < 1e-12);
        assert!((partial_trace_second(&ab, 2, 3) - &a * b.trace()).norm() < 1e-12);
    }

    #[test]
    fn vec_roundtrip_and_inner() {
        let f = CMat::from_fn(2, 3, |i, j| c64(i as f64, j as f64));
        assert_eq!(unvec_row_major(&vec_row_major(&f), 2, 3), f);
        assert_eq!(hs_inner(&eye(2), &pauli_z()), ZERO);
        assert!((trace_distance(&pauli_z(), &(-pauli_z())) - 2.0).abs() < 1e-14);
    }
}
