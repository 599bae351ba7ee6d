//! Small dense square matrices over GF(2^r).

use crate::field::{FieldCtx, FieldElement};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    n: usize,
    entries: Vec<FieldElement>,
}

impl Matrix {
    /// Row-major construction. Panics if `entries.len() != n * n`.
    pub fn new(n: usize, entries: Vec<FieldElement>) -> Self {
        assert_eq!(entries.len(), n * n, "expected {n}x{n} entries");
        Matrix { n, entries }
    }

    pub fn zero(n: usize) -> Self {
        Matrix::new(n, vec![FieldElement::ZERO; n * n])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zero(n);
        for i in 0..n {
            m.set(i, i, FieldElement::ONE);
        }
        m
    }

    /// The matrix whose row-major entries are the base-q digits of `index`,
    /// least significant digit first.
    pub fn from_index(ctx: &FieldCtx, n: usize, mut index: u64) -> Self {
        let q = ctx.q() as u64;
        let entries = (0..n * n)
            .map(|_| {
                let d = index % q;
                index /= q;
                FieldElement::from_bits(d as u32)
            })
            .collect();
        Matrix::new(n, entries)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[FieldElement] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> FieldElement {
        self.entries[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: FieldElement) {
        self.entries[i * self.n + j] = v;
    }

    pub fn mul(&self, ctx: &FieldCtx, other: &Matrix) -> Matrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Matrix::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let v = ctx.add(out.get(i, j), ctx.mul(a, other.get(k, j)));
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        let n = self.n;
        let mut out = Matrix::zero(n);
        for i in 0..n {
            for j in 0..n {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    pub fn trace(&self) -> FieldElement {
        let bits = (0..self.n).fold(0, |acc, i| acc ^ self.get(i, i).bits());
        FieldElement::from_bits(bits)
    }

    /// Gauss-Jordan inverse; `None` when singular.
    pub fn inverse(&self, ctx: &FieldCtx) -> Option<Matrix> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = Matrix::identity(n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a.get(r, col).is_zero())?;
            if pivot != col {
                for j in 0..n {
                    let (x, y) = (a.get(col, j), a.get(pivot, j));
                    a.set(col, j, y);
                    a.set(pivot, j, x);
                    let (x, y) = (inv.get(col, j), inv.get(pivot, j));
                    inv.set(col, j, y);
                    inv.set(pivot, j, x);
                }
            }
            let scale = ctx.inv(a.get(col, col)).ok()?;
            for j in 0..n {
                a.set(col, j, ctx.mul(scale, a.get(col, j)));
                inv.set(col, j, ctx.mul(scale, inv.get(col, j)));
            }
            for row in 0..n {
                let f = a.get(row, col);
                if row == col || f.is_zero() {
                    continue;
                }
                for j in 0..n {
                    a.set(row, j, ctx.add(a.get(row, j), ctx.mul(f, a.get(col, j))));
                    inv.set(
                        row,
                        j,
                        ctx.add(inv.get(row, j), ctx.mul(f, inv.get(col, j))),
                    );
                }
            }
        }
        Some(inv)
    }
}
