//! Row-major dense matrices and row-normalised sparse adjacency.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Mat {
        Mat {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Mat {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Mat {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        }
    }

    pub fn identity(n: usize) -> Mat {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// self · other
    pub fn matmul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let o = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0.0 {
                    continue;
                }
                for (x, b) in o.iter_mut().zip(other.row(k)) {
                    *x += a * b;
                }
            }
        }
        out
    }

    /// selfᵀ · other
    pub fn t_matmul(&self, other: &Mat) -> Mat {
        assert_eq!(self.rows, other.rows, "t_matmul shape mismatch");
        let mut out = Mat::zeros(self.cols, other.cols);
        for k in 0..self.rows {
            let b = other.row(k);
            for i in 0..self.cols {
                let a = self.data[k * self.cols + i];
                if a == 0.0 {
                    continue;
                }
                for (x, y) in out.row_mut(i).iter_mut().zip(b) {
                    *x += a * y;
                }
            }
        }
        out
    }

    /// self · otherᵀ
    pub fn matmul_t(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.cols, "matmul_t shape mismatch");
        let mut out = Mat::zeros(self.rows, other.rows);
        for i in 0..self.rows {
            let a = self.row(i);
            for j in 0..other.rows {
                out.data[i * other.rows + j] = a.iter().zip(other.row(j)).map(|(x, y)| x * y).sum();
            }
        }
        out
    }

    pub fn add_assign(&mut self, other: &Mat) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
    }

    /// self -= k · other
    pub fn sub_scaled(&mut self, k: f64, other: &Mat) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a -= k * b;
        }
    }

    pub fn map_inplace(&mut self, f: impl Fn(f64) -> f64) {
        for x in &mut self.data {
            *x = f(*x);
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn select_rows(&self, idx: &[usize]) -> Mat {
        let mut out = Mat::zeros(idx.len(), self.cols);
        for (o, &i) in idx.iter().enumerate() {
            out.row_mut(o).copy_from_slice(self.row(i));
        }
        out
    }
}

/// Mean aggregation over neighbours: (A·H)_i = mean of H_j over j ∈ N(i).
/// Nodes without neighbours aggregate to zero.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Adjacency {
    pub neighbors: Vec<Vec<usize>>,
}

impl Adjacency {
    pub fn new(n: usize) -> Adjacency {
        Adjacency {
            neighbors: vec![Vec::new(); n],
        }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Adjacency {
        let mut adj = Adjacency::new(n);
        for (a, b) in edges {
            if a != b {
                adj.neighbors[a].push(b);
                adj.neighbors[b].push(a);
            }
        }
        for list in &mut adj.neighbors {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }

    pub fn len(&self) -> usize {
        self.neighbors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.neighbors.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.neighbors[a].binary_search(&b).is_ok()
    }

    /// A · H. Each output element sums its neighbour values in sorted order,
    /// so the result does not depend on node numbering.
    pub fn aggregate(&self, h: &Mat) -> Mat {
        assert_eq!(self.len(), h.rows);
        let mut out = Mat::zeros(h.rows, h.cols);
        let mut buf = Vec::new();
        for (i, nb) in self.neighbors.iter().enumerate() {
            if nb.is_empty() {
                continue;
            }
            let w = 1.0 / nb.len() as f64;
            for c in 0..h.cols {
                buf.clear();
                buf.extend(nb.iter().map(|&j| h.get(j, c)));
                buf.sort_by(f64::total_cmp);
                out.set(i, c, buf.iter().sum::<f64>() * w);
            }
        }
        out
    }

    /// Aᵀ · G
    pub fn aggregate_transpose(&self, g: &Mat) -> Mat {
        assert_eq!(self.len(), g.rows);
        let mut out = Mat::zeros(g.rows, g.cols);
        for (i, nb) in self.neighbors.iter().enumerate() {
            if nb.is_empty() {
                continue;
            }
            let w = 1.0 / nb.len() as f64;
            let gi = g.row(i);
            for &j in nb {
                for (x, y) in out.row_mut(j).iter_mut().zip(gi) {
                    *x += w * y;
                }
            }
        }
        out
    }

    /// Relabels nodes: node `i` becomes `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Adjacency {
        let mut out = Adjacency::new(self.len());
        for (i, nb) in self.neighbors.iter().enumerate() {
            let mut list: Vec<usize> = nb.iter().map(|&j| perm[j]).collect();
            list.sort_unstable();
            out.neighbors[perm[i]] = list;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn products_agree() {
        let a = Mat::from_rows(&[vec![1.0, 2.0, 0.0], vec![-1.0, 0.5, 3.0]]);
        let b = Mat::from_rows(&[vec![2.0, 1.0], vec![0.0, -1.0], vec![4.0, 0.25]]);
        let ab = a.matmul(&b);
        assert_eq!(ab.data, vec![2.0, -1.0, 10.0, -0.75]);
        let at = Mat::from_rows(&[vec![1.0, -1.0], vec![2.0, 0.5], vec![0.0, 3.0]]);
        assert_eq!(at.t_matmul(&b), ab);
        let bt = Mat::from_rows(&[vec![2.0, 0.0, 4.0], vec![1.0, -1.0, 0.25]]);
        assert_eq!(a.matmul_t(&bt), ab);
    }

    #[test]
    fn mean_aggregation_and_transpose() {
        let adj = Adjacency::from_edges(3, [(0, 1), (0, 2), (1, 1)]);
        assert_eq!(adj.edge_count(), 2);
        let h = Mat::from_rows(&[vec![1.0], vec![2.0], vec![4.0]]);
        assert_eq!(adj.aggregate(&h).data, vec![3.0, 1.0, 1.0]);
        // <A h, g> = <h, Aᵀ g>
        let g = Mat::from_rows(&[vec![0.5], vec![-1.0], vec![2.0]]);
        let lhs: f64 = adj.aggregate(&h).data.iter().zip(&g.data).map(|(a, b)| a * b).sum();
        let rhs: f64 = h.data.iter().zip(&adj.aggregate_transpose(&g).data).map(|(a, b)| a * b).sum();
        assert!((lhs - rhs).abs() < 1e-12);
    }
}
