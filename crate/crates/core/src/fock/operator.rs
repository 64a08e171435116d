use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::sync::Arc;

use num_complex::Complex64;

use super::index::{FockBasis, ENUMERATION_VERSION};
use super::vector::FockVector;
use crate::error::Result;
use crate::linalg::{CMatrix, CVector};

/// Column-major sparse complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    dim: usize,
    /// `(row, value)` pairs per column, rows ascending.
    columns: Vec<Vec<(usize, Complex64)>>,
}

impl SparseMatrix {
    pub fn from_columns(dim: usize, mut columns: Vec<Vec<(usize, Complex64)>>) -> Self {
        assert_eq!(columns.len(), dim);
        for col in &mut columns {
            col.sort_by_key(|&(r, _)| r);
            col.retain(|(_, z)| *z != Complex64::new(0.0, 0.0));
        }
        Self { dim, columns }
    }

    pub fn from_dense(m: &CMatrix) -> Self {
        let columns = (0..m.ncols())
            .map(|j| {
                (0..m.nrows())
                    .filter(|&i| m[(i, j)] != Complex64::new(0.0, 0.0))
                    .map(|i| (i, m[(i, j)]))
                    .collect()
            })
            .collect();
        Self { dim: m.nrows(), columns }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    /// Nonzero entries in row-major order.
    pub fn triplets(&self) -> Vec<(usize, usize, Complex64)> {
        let mut t: Vec<_> = self
            .columns
            .iter()
            .enumerate()
            .flat_map(|(j, col)| col.iter().map(move |&(i, z)| (i, j, z)))
            .collect();
        t.sort_by_key(|&(i, j, _)| (i, j));
        t
    }

    pub fn to_dense(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim, self.dim);
        for (j, col) in self.columns.iter().enumerate() {
            for &(i, z) in col {
                m[(i, j)] = z;
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &CVector) -> CVector {
        let mut out = CVector::zeros(self.dim);
        for (j, col) in self.columns.iter().enumerate() {
            let vj = v[j];
            if vj == Complex64::new(0.0, 0.0) {
                continue;
            }
            for &(i, z) in col {
                out[i] += z * vj;
            }
        }
        out
    }
}

/// Truncated operator on the Fock space together with its exactness bookkeeping.
#[derive(Clone, Debug)]
pub struct FockOperator {
    basis: Arc<FockBasis>,
    matrix: SparseMatrix,
    degree_shifts: BTreeSet<(i32, i32)>,
    safe_degree: usize,
}

impl FockOperator {
    /// Wraps `matrix`; the realized grade shifts are read off its nonzero entries.
    pub fn new(basis: Arc<FockBasis>, matrix: SparseMatrix, safe_degree: usize) -> Self {
        let mut degree_shifts = BTreeSet::new();
        for (i, j, _) in matrix.triplets() {
            let (ki, li) = basis.index(i).grade();
            let (kj, lj) = basis.index(j).grade();
            degree_shifts.insert((ki as i32 - kj as i32, li as i32 - lj as i32));
        }
        Self { basis, matrix, degree_shifts, safe_degree }
    }

    pub fn from_dense(basis: Arc<FockBasis>, m: &CMatrix, safe_degree: usize) -> Self {
        Self::new(basis, SparseMatrix::from_dense(m), safe_degree)
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn dense(&self) -> CMatrix {
        self.matrix.to_dense()
    }

    pub fn degree_shifts(&self) -> &BTreeSet<(i32, i32)> {
        &self.degree_shifts
    }

    pub fn safe_degree(&self) -> usize {
        self.safe_degree
    }

    pub fn degree_cap(&self) -> usize {
        self.basis.degree_cap()
    }

    pub fn apply(&self, v: &FockVector) -> Result<FockVector> {
        let dense = v.to_dense(&self.basis)?;
        Ok(FockVector::from_dense(&self.basis, &self.matrix.mul_vec(&dense)))
    }

    /// Grade-annotated sparse triplet text.
    ///
    /// ```text
    /// # fock-operator sparse triplets
    /// format graded-triplet-v1
    /// enumeration graded-lex-v1
    /// modes <m_f> <m_b>
    /// degree_cap <D>
    /// safe_degree <s>
    /// dim <N>
    /// nnz <K>
    /// basis <pos> <k> <l> <label> <gram weight>
    /// entry <row> <col> <k_row>,<l_row> <k_col>,<l_col> <re> <im>
    /// ```
    ///
    /// Matrix entries are coefficients on the monomial basis; the Gram weight
    /// column gives each monomial's squared norm. Floats use shortest
    /// round-trip formatting.
    pub fn to_triplet_text(&self) -> String {
        let b = &self.basis;
        let mut out = String::new();
        out.push_str("# fock-operator sparse triplets\n");
        out.push_str("format graded-triplet-v1\n");
        let _ = writeln!(out, "enumeration {ENUMERATION_VERSION}");
        let _ = writeln!(out, "modes {} {}", b.space().m_f(), b.space().m_b());
        let _ = writeln!(out, "degree_cap {}", b.degree_cap());
        let _ = writeln!(out, "safe_degree {}", self.safe_degree);
        let _ = writeln!(out, "dim {}", b.len());
        let _ = writeln!(out, "nnz {}", self.matrix.nnz());
        for (pos, idx) in b.indices().iter().enumerate() {
            let (k, l) = idx.grade();
            let _ = writeln!(out, "basis {pos} {k} {l} {} {}", idx.label(), fmt_f64(idx.gram_weight()));
        }
        for (i, j, z) in self.matrix.triplets() {
            let (ki, li) = b.index(i).grade();
            let (kj, lj) = b.index(j).grade();
            let _ = writeln!(
                out,
                "entry {i} {j} {ki},{li} {kj},{lj} {} {}",
                fmt_f64(z.re),
                fmt_f64(z.im)
            );
        }
        out
    }
}

/// Shortest round-trip decimal form, with negative zero folded into zero.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else {
        format!("{x:?}")
    }
}
