//! Dense row-major Cholesky factorization and triangular solves.
//!
//! Hot loops are compiled twice, plain and with AVX2 enabled, and picked at
//! run time. Both use the same operation order and no fused multiply-add,
//! so results are bit-identical either way.

const LANES: usize = 4;

#[inline(always)]
fn dot_body(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [0.0f64; LANES];
    let ca = a.chunks_exact(LANES);
    let cb = b.chunks_exact(LANES);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for l in 0..LANES {
            acc[l] += x[l] * y[l];
        }
    }
    let mut tail = 0.0;
    for (x, y) in ra.iter().zip(rb) {
        tail += x * y;
    }
    (acc[0] + acc[2]) + (acc[1] + acc[3]) + tail
}

/// Dot product with independent accumulators so the loop vectorizes.
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    dot_body(a, b)
}

#[inline(always)]
fn cholesky_body(a: &mut [f64], m: usize) -> bool {
    for i in 0..m {
        for j in 0..=i {
            let (row_i, row_j) = (i * m, j * m);
            let s = a[row_i + j] - dot_body(&a[row_i..row_i + j], &a[row_j..row_j + j]);
            if i == j {
                if !(s > 0.0) || !s.is_finite() {
                    return false;
                }
                a[row_i + i] = s.sqrt();
            } else {
                a[row_i + j] = s / a[row_j + j];
            }
        }
        for j in (i + 1)..m {
            a[i * m + j] = 0.0;
        }
    }
    true
}

/// Solves `L v_c = rhs_c` in place for `p` right-hand sides stored as the
/// rows of the `p x m` matrix `rhs`.
#[inline(always)]
fn solve_lower_rows_body(l: &[f64], m: usize, rhs: &mut [f64]) {
    let p = rhs.len() / m;
    for i in 0..m {
        let row = &l[i * m..i * m + i];
        let diag = l[i * m + i];
        for c in 0..p {
            let vc = &mut rhs[c * m..(c + 1) * m];
            let s = dot_body(row, &vc[..i]);
            vc[i] = (vc[i] - s) / diag;
        }
    }
}

#[cfg(target_arch = "x86_64")]
mod avx2 {
    #[target_feature(enable = "avx2")]
    pub(super) unsafe fn cholesky(a: &mut [f64], m: usize) -> bool {
        super::cholesky_body(a, m)
    }

    #[target_feature(enable = "avx2")]
    pub(super) unsafe fn solve_lower_rows(l: &[f64], m: usize, rhs: &mut [f64]) {
        super::solve_lower_rows_body(l, m, rhs)
    }
}

#[cfg(target_arch = "x86_64")]
#[inline]
fn has_avx2() -> bool {
    std::arch::is_x86_feature_detected!("avx2")
}

/// Overwrites the lower triangle of the symmetric `m x m` matrix `a` with
/// its Cholesky factor and zeroes the strict upper triangle. Returns false
/// when `a` is not numerically positive definite.
pub fn cholesky_in_place(a: &mut [f64], m: usize) -> bool {
    #[cfg(target_arch = "x86_64")]
    if has_avx2() {
        // SAFETY: the CPU supports AVX2, checked above.
        return unsafe { avx2::cholesky(a, m) };
    }
    cholesky_body(a, m)
}

/// Solves `L v = rhs` in place for every `m`-long row of `rhs`.
pub fn solve_lower_rows(l: &[f64], m: usize, rhs: &mut [f64]) {
    debug_assert_eq!(rhs.len() % m.max(1), 0);
    #[cfg(target_arch = "x86_64")]
    if has_avx2() {
        // SAFETY: the CPU supports AVX2, checked above.
        return unsafe { avx2::solve_lower_rows(l, m, rhs) };
    }
    solve_lower_rows_body(l, m, rhs)
}

/// Solves `L z = b`.
pub fn solve_lower(l: &[f64], m: usize, b: &[f64]) -> Vec<f64> {
    let mut z = b.to_vec();
    solve_lower_rows(l, m, &mut z);
    z
}

/// Solves `L' x = z`.
pub fn solve_lower_transpose(l: &[f64], m: usize, z: &[f64]) -> Vec<f64> {
    let mut x = z.to_vec();
    for i in (0..m).rev() {
        x[i] /= l[i * m + i];
        let xi = x[i];
        for t in 0..i {
            x[t] -= l[i * m + t] * xi;
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_reconstructs_and_solves() {
        let a = vec![4.0, 2.0, 0.4, 2.0, 5.0, 1.0, 0.4, 1.0, 3.0];
        let mut l = a.clone();
        assert!(cholesky_in_place(&mut l, 3));
        for i in 0..3 {
            for j in 0..3 {
                let v: f64 = (0..3).map(|t| l[i * 3 + t] * l[j * 3 + t]).sum();
                assert!((v - a[i * 3 + j]).abs() < 1e-12);
            }
        }
        let b = [1.0, -2.0, 0.5];
        let x = solve_lower_transpose(&l, 3, &solve_lower(&l, 3, &b));
        for i in 0..3 {
            let v: f64 = (0..3).map(|j| a[i * 3 + j] * x[j]).sum();
            assert!((v - b[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn dispatch_paths_agree_bitwise() {
        let m = 37;
        let mut a = vec![0.0; m * m];
        for i in 0..m {
            for j in 0..m {
                let d = i as f64 - j as f64;
                a[i * m + j] = (-d * d / 50.0).exp() + if i == j { 1e-3 } else { 0.0 };
            }
        }
        let mut fast = a.clone();
        let mut plain = a.clone();
        assert!(cholesky_in_place(&mut fast, m));
        assert!(cholesky_body(&mut plain, m));
        assert_eq!(fast, plain);
        let rhs: Vec<f64> = (0..3 * m).map(|i| (i as f64 * 0.37).sin()).collect();
        let mut r1 = rhs.clone();
        let mut r2 = rhs.clone();
        solve_lower_rows(&fast, m, &mut r1);
        solve_lower_rows_body(&plain, m, &mut r2);
        assert_eq!(r1, r2);
        assert_eq!(solve_lower(&fast, m, &rhs[..m]), r1[..m].to_vec());
    }

    #[test]
    fn rejects_indefinite() {
        let mut a = vec![1.0, 2.0, 2.0, 1.0];
        assert!(!cholesky_in_place(&mut a, 2));
    }
}
