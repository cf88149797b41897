//! Compressed sparse row storage and the vertex-to-unknown map.

use std::ops::{Add, Mul};

use num_traits::Zero;

use crate::geometry::Mesh;
use crate::scalar::{Complex, Real};

/// Square CSR matrix with sorted, unique column indices per row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix<V> {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<V>,
}

/// Complex CSR matrix used for all assembled sesquilinear forms.
pub type ComplexSparseMatrix<T> = CsrMatrix<Complex<T>>;

impl<V: Copy + Zero + Add<Output = V>> CsrMatrix<V> {
    /// Empty `n x n` matrix.
    pub fn zeros(n: usize) -> Self {
        Self { n, row_ptr: vec![0; n + 1], col_idx: Vec::new(), values: Vec::new() }
    }

    /// Sums duplicate entries. Duplicates are added in input order, so the
    /// result is independent of the sort implementation.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, V)>) -> Self {
        triplets.sort_by_key(|&(i, j, _)| (i, j));
        let mut row_ptr = vec![0; n + 1];
        let mut col_idx: Vec<usize> = Vec::with_capacity(triplets.len());
        let mut values: Vec<V> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in triplets {
            assert!(i < n && j < n, "triplet ({i}, {j}) outside a {n} x {n} matrix");
            if last == Some((i, j)) {
                let slot = values.last_mut().unwrap();
                *slot = *slot + v;
            } else {
                row_ptr[i + 1] += 1;
                col_idx.push(j);
                values.push(v);
                last = Some((i, j));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self { n, row_ptr, col_idx, values }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[V] {
        &self.values
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, V)> + '_ {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[range.clone()].iter().copied().zip(self.values[range].iter().copied())
    }

    /// Entry `(i, j)`, zero when not stored.
    pub fn get(&self, i: usize, j: usize) -> V {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col_idx[range.clone()].binary_search(&j) {
            Ok(k) => self.values[range.start + k],
            Err(_) => V::zero(),
        }
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, V)> + '_ {
        (0..self.n).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    /// Entrywise sum over the union of both patterns. Entries present in
    /// only one operand are copied unchanged.
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch in matrix sum");
        let mut row_ptr = Vec::with_capacity(self.n + 1);
        let mut col_idx = Vec::with_capacity(self.nnz().max(other.nnz()));
        let mut values = Vec::with_capacity(self.nnz().max(other.nnz()));
        row_ptr.push(0);
        for i in 0..self.n {
            let (mut a, mut b) = (self.row(i).peekable(), other.row(i).peekable());
            loop {
                match (a.peek().copied(), b.peek().copied()) {
                    (Some((ja, va)), Some((jb, vb))) if ja == jb => {
                        col_idx.push(ja);
                        values.push(va + vb);
                        a.next();
                        b.next();
                    }
                    (Some((ja, va)), Some((jb, _))) if ja < jb => {
                        col_idx.push(ja);
                        values.push(va);
                        a.next();
                    }
                    (Some((ja, va)), None) => {
                        col_idx.push(ja);
                        values.push(va);
                        a.next();
                    }
                    (_, Some((jb, vb))) => {
                        col_idx.push(jb);
                        values.push(vb);
                        b.next();
                    }
                    (None, None) => break,
                }
            }
            row_ptr.push(col_idx.len());
        }
        Self { n: self.n, row_ptr, col_idx, values }
    }

    /// Same pattern with transformed values.
    pub fn map<W>(&self, f: impl Fn(V) -> W) -> CsrMatrix<W> {
        CsrMatrix {
            n: self.n,
            row_ptr: self.row_ptr.clone(),
            col_idx: self.col_idx.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn mul_vec(&self, x: &[V]) -> Vec<V>
    where
        V: Mul<Output = V>,
    {
        assert_eq!(x.len(), self.n, "dimension mismatch in matrix-vector product");
        (0..self.n).map(|i| self.row(i).fold(V::zero(), |acc, (j, v)| acc + v * x[j])).collect()
    }
}

impl<T: Real> CsrMatrix<T> {
    /// `v^H M v` for a real symmetric matrix and a complex vector.
    pub fn hermitian_form(&self, v: &[Complex<T>]) -> T {
        assert_eq!(v.len(), self.n, "dimension mismatch in quadratic form");
        let mut total = T::zero();
        for (i, vi) in v.iter().enumerate() {
            let (mut re, mut im) = (T::zero(), T::zero());
            for (j, m) in self.row(i) {
                re = re + m * v[j].re;
                im = im + m * v[j].im;
            }
            total = total + vi.re * re + vi.im * im;
        }
        total
    }
}

impl<T: Real> CsrMatrix<Complex<T>> {
    /// `M x` for a complex matrix.
    pub fn apply(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        self.mul_vec(x)
    }

    /// `M conj(x)`.
    pub fn apply_conj(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        let xc: Vec<_> = x.iter().map(|v| v.conj()).collect();
        self.mul_vec(&xc)
    }

    /// Largest `|M_ij - M_ji|` over the stored pattern.
    pub fn max_asymmetry(&self) -> T {
        self.triplets().map(|(i, j, v)| (v - self.get(j, i)).norm()).fold(T::zero(), T::max)
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().map(|v| v.norm()).fold(T::zero(), T::max)
    }
}

/// Numbering of the unknowns: every vertex not on the outer circle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DofMap {
    vertex_to_dof: Vec<Option<usize>>,
    dof_to_vertex: Vec<usize>,
}

impl DofMap {
    pub fn new<T: Real>(mesh: &Mesh<T>) -> Self {
        let mut vertex_to_dof = vec![Some(0); mesh.num_vertices()];
        for &v in mesh.boundary_vertices() {
            vertex_to_dof[v] = None;
        }
        let mut dof_to_vertex = Vec::with_capacity(mesh.num_vertices());
        for (v, slot) in vertex_to_dof.iter_mut().enumerate() {
            if slot.is_some() {
                *slot = Some(dof_to_vertex.len());
                dof_to_vertex.push(v);
            }
        }
        Self { vertex_to_dof, dof_to_vertex }
    }

    pub fn len(&self) -> usize {
        self.dof_to_vertex.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dof_to_vertex.is_empty()
    }

    pub fn dof(&self, vertex: usize) -> Option<usize> {
        self.vertex_to_dof[vertex]
    }

    pub fn vertex(&self, dof: usize) -> usize {
        self.dof_to_vertex[dof]
    }

    /// Nodal values on all vertices, zero on the Dirichlet boundary.
    pub fn expand<V: Copy + Zero>(&self, u: &[V]) -> Vec<V> {
        self.vertex_to_dof.iter().map(|d| d.map_or(V::zero(), |d| u[d])).collect()
    }

    /// Values at the unknowns from values on all vertices.
    pub fn restrict<V: Copy>(&self, nodal: &[V]) -> Vec<V> {
        self.dof_to_vertex.iter().map(|&v| nodal[v]).collect()
    }
}
