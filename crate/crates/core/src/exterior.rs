//! Pointwise exterior algebra on `ℝ^m`.
//!
//! A multi-index `I = {i_1 < … < i_p}` is a bitmask; the coefficients of a
//! degree-`p` form are stored densely in lexicographic order of the sorted
//! index tuples.

use std::sync::OnceLock;

const MAX_DIM: usize = 12;

struct Tables {
    /// `bases[m][p]` = masks of size `p` in `{0..m}`, lexicographic.
    bases: Vec<Vec<Vec<u32>>>,
    /// `ranks[m][mask]` = position of `mask` within its degree.
    ranks: Vec<Vec<usize>>,
}

fn tables() -> &'static Tables {
    static T: OnceLock<Tables> = OnceLock::new();
    T.get_or_init(|| {
        let mut bases = Vec::new();
        let mut ranks = Vec::new();
        for m in 0..=MAX_DIM {
            let mut by_deg: Vec<Vec<u32>> = vec![Vec::new(); m + 1];
            let mut all: Vec<Vec<usize>> = Vec::new();
            for mask in 0u32..(1u32 << m) {
                all.push(indices(mask));
            }
            all.sort();
            all.sort_by_key(|v| v.len());
            let mut rank = vec![0usize; 1 << m];
            for idx in all {
                let mask = to_mask(&idx);
                let p = idx.len();
                rank[mask as usize] = by_deg[p].len();
                by_deg[p].push(mask);
            }
            bases.push(by_deg);
            ranks.push(rank);
        }
        Tables { bases, ranks }
    })
}

pub fn indices(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask & (1 << i) != 0).collect()
}

pub fn to_mask(idx: &[usize]) -> u32 {
    idx.iter().fold(0, |m, &i| m | (1 << i))
}

/// Multi-indices of size `p` in `{0..m}`.
pub fn basis(m: usize, p: usize) -> &'static [u32] {
    assert!(m <= MAX_DIM, "ambient dimension {m} exceeds {MAX_DIM}");
    if p > m {
        return &[];
    }
    &tables().bases[m][p]
}

pub fn rank(m: usize, mask: u32) -> usize {
    tables().ranks[m][mask as usize]
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Sign of `dx_a ∧ dx_b` relative to `dx_{a∪b}`; zero if they overlap.
pub fn merge_sign(a: u32, b: u32) -> f64 {
    if a & b != 0 {
        return 0.0;
    }
    let mut inversions = 0u32;
    let mut rest = a;
    while rest != 0 {
        let i = rest.trailing_zeros();
        rest &= rest - 1;
        inversions += (b & ((1u32 << i) - 1)).count_ones();
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Sign of a permutation given as a list of distinct indices; 0 if repeated.
pub fn permutation_sign(idx: &[usize]) -> f64 {
    let mut s = 1.0;
    for i in 0..idx.len() {
        for j in i + 1..idx.len() {
            if idx[i] == idx[j] {
                return 0.0;
            }
            if idx[i] > idx[j] {
                s = -s;
            }
        }
    }
    s
}

/// `a ∧ b` for dense coefficient vectors.
pub fn wedge(m: usize, p: usize, a: &[f64], q: usize, b: &[f64], out: &mut [f64]) {
    out.iter_mut().for_each(|x| *x = 0.0);
    let ba = basis(m, p);
    let bb = basis(m, q);
    for (i, &ma) in ba.iter().enumerate() {
        if a[i] == 0.0 {
            continue;
        }
        for (j, &mb) in bb.iter().enumerate() {
            if b[j] == 0.0 {
                continue;
            }
            let s = merge_sign(ma, mb);
            if s != 0.0 {
                out[rank(m, ma | mb)] += s * a[i] * b[j];
            }
        }
    }
}

/// Determinant of a small row-major square matrix.
pub fn det(n: usize, a: &[f64]) -> f64 {
    match n {
        0 => 1.0,
        1 => a[0],
        2 => a[0] * a[3] - a[1] * a[2],
        3 => {
            a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6])
                + a[2] * (a[3] * a[7] - a[4] * a[6])
        }
        _ => nalgebra::DMatrix::from_row_slice(n, n, a).determinant(),
    }
}

/// Determinant of the submatrix of a row-major `rows × cols` matrix.
pub fn minor(cols: usize, a: &[f64], row_sel: &[usize], col_sel: &[usize]) -> f64 {
    let n = row_sel.len();
    debug_assert_eq!(n, col_sel.len());
    let mut buf = [0.0f64; 64];
    if n * n <= 64 {
        for (i, &r) in row_sel.iter().enumerate() {
            for (j, &c) in col_sel.iter().enumerate() {
                buf[i * n + j] = a[r * cols + c];
            }
        }
        det(n, &buf[..n * n])
    } else {
        let mut v = Vec::with_capacity(n * n);
        for &r in row_sel {
            for &c in col_sel {
                v.push(a[r * cols + c]);
            }
        }
        det(n, &v)
    }
}

/// Top-degree pullback `Σ_I c_I det(J[I,:])` of a degree-`k` form through a
/// row-major `m × k` Jacobian.
pub fn pullback_top(m: usize, k: usize, coeffs: &[f64], jac: &[f64]) -> f64 {
    let cols: Vec<usize> = (0..k).collect();
    let mut acc = 0.0;
    for (i, &mask) in basis(m, k).iter().enumerate() {
        if coeffs[i] == 0.0 {
            continue;
        }
        acc += coeffs[i] * minor(k, jac, &indices(mask), &cols);
    }
    acc
}

/// Pullback of a degree-`p` form through a linear map with row-major
/// `rows × cols` matrix `a` (target dimension `rows`, source `cols`).
pub fn pullback_linear(rows: usize, cols: usize, p: usize, coeffs: &[f64], a: &[f64]) -> Vec<f64> {
    let src = basis(rows, p);
    let dst = basis(cols, p);
    let mut out = vec![0.0; dst.len()];
    for (j, &mj) in src.iter().enumerate() {
        if coeffs[j] == 0.0 {
            continue;
        }
        let rsel = indices(mj);
        for (i, &mi) in dst.iter().enumerate() {
            out[i] += coeffs[j] * minor(cols, a, &rsel, &indices(mi));
        }
    }
    out
}

/// Kernel weights of a `k`-dimensional chain: entry `J` (degree `m - k`) is
/// `sign(J, Jᶜ) · det(D[Jᶜ rows])`, so that `∫ (Σ_J w_J dx_J) ∧ φ` reproduces
/// the chain's pairing with `φ`.
pub fn chain_minor_vector(m: usize, k: usize, jac: &[f64], out: &mut [f64]) {
    let full = (1u32 << m) - 1;
    let cols: Vec<usize> = (0..k).collect();
    for (i, &mj) in basis(m, m - k).iter().enumerate() {
        let comp = full & !mj;
        out[i] = merge_sign(mj, comp) * minor(k, jac, &indices(comp), &cols);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bases_are_lexicographic() {
        let b: Vec<Vec<usize>> = basis(4, 2).iter().map(|&m| indices(m)).collect();
        assert_eq!(b, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
        for (i, &mask) in basis(5, 3).iter().enumerate() {
            assert_eq!(rank(5, mask), i);
        }
        assert_eq!(basis(3, 0), &[0]);
    }

    #[test]
    fn merge_signs() {
        assert_eq!(merge_sign(0b01, 0b10), 1.0);
        assert_eq!(merge_sign(0b10, 0b01), -1.0);
        assert_eq!(merge_sign(0b11, 0b01), 0.0);
        // dx2 ∧ dx0dx1 = +dx0dx1dx2
        assert_eq!(merge_sign(0b100, 0b011), 1.0);
        assert_eq!(permutation_sign(&[2, 0, 1]), 1.0);
        assert_eq!(permutation_sign(&[1, 0, 2]), -1.0);
    }

    #[test]
    fn wedge_of_one_forms_is_antisymmetric() {
        let a = [1.0, 2.0, 0.5];
        let b = [-1.0, 0.3, 4.0];
        let mut ab = [0.0; 3];
        let mut ba = [0.0; 3];
        wedge(3, 1, &a, 1, &b, &mut ab);
        wedge(3, 1, &b, 1, &a, &mut ba);
        for i in 0..3 {
            assert!((ab[i] + ba[i]).abs() < 1e-15);
        }
        // dx0∧dx1 coefficient
        assert!((ab[0] - (1.0 * 0.3 - 2.0 * -1.0)).abs() < 1e-15);
    }

    #[test]
    fn minor_vector_laplace_expansion() {
        // For complementary frames the pairing equals det[D1 | D2].
        let d1 = [1.0, 0.2, 0.3, 1.0, -0.4, 0.5]; // 3x2
        let d2 = [0.1, 0.7, 2.0]; // 3x1
        let mut w = [0.0; 3];
        chain_minor_vector(3, 1, &d2, &mut w);
        let val = pullback_top(3, 2, &w, &d1);
        let full = [1.0, 0.2, 0.1, 0.3, 1.0, 0.7, -0.4, 0.5, 2.0];
        assert!((val - det(3, &full)).abs() < 1e-14);
    }

    #[test]
    fn large_determinant_uses_lu() {
        let mut a = vec![0.0; 25];
        for i in 0..5 {
            a[i * 5 + i] = (i + 1) as f64;
        }
        a[1] = 3.0;
        assert!((det(5, &a) - 120.0).abs() < 1e-10);
    }
}
