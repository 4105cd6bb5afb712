//! Square integer matrices and full-rank sublattices of `Z^d`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Row-major square integer matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<i64>>", into = "Vec<Vec<i64>>")]
pub struct IntMatrix {
    n: usize,
    data: Vec<i64>,
}

impl TryFrom<Vec<Vec<i64>>> for IntMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<i64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidMatrix("empty matrix".into()));
        }
        if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::InvalidMatrix(format!(
                "row {i} has {} entries, expected {n}",
                row.len()
            )));
        }
        Ok(IntMatrix { n, data: rows.into_iter().flatten().collect() })
    }
}

impl From<IntMatrix> for Vec<Vec<i64>> {
    fn from(m: IntMatrix) -> Self {
        m.rows()
    }
}

impl IntMatrix {
    pub fn from_rows(rows: Vec<Vec<i64>>) -> Result<Self> {
        Self::try_from(rows)
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![1; n])
    }

    pub fn zeros(n: usize) -> Self {
        IntMatrix { n, data: vec![0; n * n] }
    }

    pub fn diagonal(diag: &[i64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n);
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * n + i] = d;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.n + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.data.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut t = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                t.data[j * n + i] = self.get(i, j);
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "matrix dimension mismatch");
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(self.n, v.len(), "vector dimension mismatch");
        self.data
            .chunks(self.n)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "matrix dimension mismatch");
        IntMatrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1))
    }

    pub fn scale(&self, c: i64) -> Self {
        IntMatrix { n: self.n, data: self.data.iter().map(|a| a * c).collect() }
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn trace(&self) -> i64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// Maximum absolute row sum, the operator norm for `|.|_inf`.
    pub fn inf_norm(&self) -> i64 {
        self.data.chunks(self.n).map(|r| r.iter().map(|a| a.abs()).sum()).max().unwrap_or(0)
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> i64 {
        let n = self.n;
        let mut a: Vec<i128> = self.data.iter().map(|&x| x as i128).collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n {
            if a[k * n + k] == 0 {
                let Some(p) = (k + 1..n).find(|&r| a[r * n + k] != 0) else {
                    return 0;
                };
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i * n + j] = (a[i * n + j] * a[k * n + k] - a[i * n + k] * a[k * n + j]) / prev;
                }
            }
            prev = a[k * n + k];
        }
        let det = sign * a[n * n - 1];
        i64::try_from(det).expect("determinant overflows i64")
    }

    fn minor(&self, row: usize, col: usize) -> Self {
        let n = self.n;
        let data = (0..n)
            .filter(|&i| i != row)
            .flat_map(|i| (0..n).filter(move |&j| j != col).map(move |j| (i, j)))
            .map(|(i, j)| self.get(i, j))
            .collect();
        IntMatrix { n: n - 1, data }
    }

    /// Integer adjugate: `adj(M)·M = det(M)·I`.
    pub fn adjugate(&self) -> Self {
        let n = self.n;
        if n == 1 {
            return Self::identity(1);
        }
        let mut adj = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let cof = self.minor(i, j).det();
                let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
                adj.data[j * n + i] = sign * cof;
            }
        }
        adj
    }
}

/// Full-rank sublattice `B·Z^d` of the dual `Z^d` of the torus `T^d`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DualSublattice {
    basis: IntMatrix,
    #[serde(skip)]
    adjugate: IntMatrix,
    index: u64,
}

impl DualSublattice {
    /// The lattice spanned by the columns of `basis`.
    pub fn new(basis: IntMatrix) -> Result<Self> {
        let det = basis.det();
        if det == 0 {
            return Err(Error::SingularMatrix);
        }
        Ok(DualSublattice { adjugate: basis.adjugate(), index: det.unsigned_abs(), basis })
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    /// `[Z^d : L] = |det B|`.
    pub fn index(&self) -> u64 {
        self.index
    }

    /// `y ∈ L` iff `adj(B)·y ≡ 0 (mod |det B|)`.
    pub fn contains(&self, y: &[i64]) -> bool {
        let adj = self.adjugate.mul_vec(y);
        let m = self.index as i64;
        adj.iter().all(|c| c.rem_euclid(m) == 0)
    }

    /// Angle coordinates (as numerators over `index`) of the finite subgroup
    /// `K = A(T^d, L)`: the points `t` with `<t, y> ∈ Z` for every `y ∈ L`.
    pub fn annihilator_numerators(&self) -> Vec<Vec<i64>> {
        // t ∈ K iff Bᵀ t ∈ Z^d iff t = adj(Bᵀ) z / det for some z.
        let d = self.dim();
        let det = self.basis.det();
        let m = self.index as i64;
        let adj_t = self.basis.transpose().adjugate();
        let mut out = std::collections::BTreeSet::new();
        let mut z = vec![0i64; d];
        loop {
            let t: Vec<i64> = adj_t
                .mul_vec(&z)
                .into_iter()
                .map(|c| (c * det.signum()).rem_euclid(m))
                .collect();
            out.insert(t);
            let mut i = 0;
            loop {
                if i == d {
                    return out.into_iter().collect();
                }
                z[i] += 1;
                if z[i] < m {
                    break;
                }
                z[i] = 0;
                i += 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn det_and_adjugate() {
        let b = m(&[&[2, -1], &[-1, 3]]);
        assert_eq!(b.det(), 5);
        assert_eq!(b.adjugate(), m(&[&[3, 1], &[1, 2]]));
        let c = m(&[&[0, 1, 2], &[1, 0, 3], &[4, -3, 8]]);
        assert_eq!(c.det(), -2);
        let prod = c.adjugate().mul(&c);
        assert_eq!(prod, IntMatrix::identity(3).scale(-2));
        assert_eq!(m(&[&[1, 2], &[2, 4]]).det(), 0);
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(IntMatrix::from_rows(vec![vec![1, 2], vec![3]]).is_err());
        assert!(IntMatrix::from_rows(vec![]).is_err());
    }

    #[test]
    fn sublattice_membership() {
        let h = DualSublattice::new(m(&[&[2, -1], &[-1, 3]])).unwrap();
        assert_eq!(h.index(), 5);
        assert!(h.contains(&[0, 0]));
        assert!(h.contains(&[2, -1]));
        assert!(h.contains(&[-1, 3]));
        assert!(!h.contains(&[2, 0]));
        for a in -10..=10 {
            for b in -10..=10 {
                assert_eq!(h.contains(&[a, b]), (3 * a + b).rem_euclid(5) == 0);
            }
        }
        assert!(DualSublattice::new(m(&[&[1, 2], &[2, 4]])).is_err());
    }

    #[test]
    fn annihilator_has_index_many_points() {
        let h = DualSublattice::new(m(&[&[2, -1], &[-1, 3]])).unwrap();
        let k = h.annihilator_numerators();
        assert_eq!(k.len(), 5);
        for t in &k {
            // <t/5, y> integral for the basis columns
            assert_eq!((2 * t[0] - t[1]).rem_euclid(5), 0);
            assert_eq!((-t[0] + 3 * t[1]).rem_euclid(5), 0);
        }
        let y2 = DualSublattice::new(IntMatrix::diagonal(&[2, 2])).unwrap();
        assert_eq!(y2.annihilator_numerators().len(), 4);
    }

    #[test]
    fn serde_row_major() {
        let a = m(&[&[-1, 1], &[1, -2]]);
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, "[[-1,1],[1,-2]]");
        let back: IntMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, a);
        assert!(serde_json::from_str::<IntMatrix>("[[1,2],[3]]").is_err());
    }
}
