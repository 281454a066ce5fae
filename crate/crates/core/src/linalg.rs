//! Small dense matrices and LU determinants.

use num_complex::Complex64;

use crate::dd::Dd;

/// Determinant together with a crude conditioning diagnostic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Determinant {
    pub value: f64,
    /// `max |u_ii| / min |u_ii|` of the pivoted factor; infinite when singular.
    pub pivot_ratio: f64,
}

/// LU with partial pivoting on a row-major `n x n` matrix.
pub fn det_lu(mut a: Vec<f64>, n: usize) -> Determinant {
    assert_eq!(a.len(), n * n, "matrix must be n x n");
    if n == 0 {
        return Determinant {
            value: 1.0,
            pivot_ratio: 1.0,
        };
    }
    let mut sign = 1.0;
    let mut det = 1.0;
    let (mut umax, mut umin) = (0.0f64, f64::INFINITY);
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))
            .unwrap();
        if piv != col {
            for c in 0..n {
                a.swap(piv * n + c, col * n + c);
            }
            sign = -sign;
        }
        let p = a[col * n + col];
        umax = umax.max(p.abs());
        umin = umin.min(p.abs());
        det *= p;
        if p == 0.0 {
            return Determinant {
                value: 0.0,
                pivot_ratio: f64::INFINITY,
            };
        }
        for r in col + 1..n {
            let f = a[r * n + col] / p;
            if f != 0.0 {
                for c in col + 1..n {
                    a[r * n + c] -= f * a[col * n + c];
                }
            }
        }
    }
    Determinant {
        value: sign * det,
        pivot_ratio: umax / umin,
    }
}

/// [`det_lu`] in double-double arithmetic.
pub fn det_lu_dd(mut a: Vec<Dd>, n: usize) -> Dd {
    assert_eq!(a.len(), n * n, "matrix must be n x n");
    let mut det = Dd::ONE;
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i * n + col].hi.abs().total_cmp(&a[j * n + col].hi.abs()))
            .unwrap();
        if piv != col {
            for c in 0..n {
                a.swap(piv * n + c, col * n + c);
            }
            det = -det;
        }
        let p = a[col * n + col];
        if p.hi == 0.0 {
            return Dd::ZERO;
        }
        det = det * p;
        for r in col + 1..n {
            let f = a[r * n + col] / p;
            if f.hi != 0.0 {
                for c in col + 1..n {
                    let v = a[col * n + c];
                    a[r * n + c] = a[r * n + c] - f * v;
                }
            }
        }
    }
    det
}

/// Complex LU determinant, partial pivoting.
pub fn det_lu_complex(mut a: Vec<Complex64>, n: usize) -> Complex64 {
    assert_eq!(a.len(), n * n, "matrix must be n x n");
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i * n + col].norm().total_cmp(&a[j * n + col].norm()))
            .unwrap();
        if piv != col {
            for c in 0..n {
                a.swap(piv * n + c, col * n + c);
            }
            det = -det;
        }
        let p = a[col * n + col];
        if p == Complex64::new(0.0, 0.0) {
            return p;
        }
        det *= p;
        for r in col + 1..n {
            let f = a[r * n + col] / p;
            for c in col + 1..n {
                let v = a[col * n + c];
                a[r * n + c] -= f * v;
            }
        }
    }
    det
}

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: usize, cols: usize, data: Vec<Complex64>) -> Self {
        assert_eq!(data.len(), rows * cols);
        CMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// 0-based entry access.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn kron(&self, other: &CMatrix) -> CMatrix {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = CMatrix::zeros(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out.set(i * other.rows + k, j * other.cols + l, a * other.get(k, l));
                    }
                }
            }
        }
        out
    }

    /// Ordinary product; zero entries of `self` are skipped, which makes
    /// products with Kronecker factors of identities cheap.
    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows, "shape mismatch");
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}
