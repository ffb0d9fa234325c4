//! Dense per-link containers indexed by `(ue, ap)`.

use nalgebra::Complex;

pub type C64 = Complex<f64>;

/// Row-major `rows x cols` table, rows are UEs (or pilots) and columns APs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T> Grid<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Grid { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let n_rows = rows.len();
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Grid {
            rows: n_rows,
            cols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.data.iter()
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Grid<U> {
        Grid {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }
}

impl<T> std::ops::Index<(usize, usize)> for Grid<T> {
    type Output = T;

    fn index(&self, (r, c): (usize, usize)) -> &T {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Grid<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut T {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

/// One length-`A` complex vector per `(ue, ap)` link, stored contiguously.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkTensor {
    n_ues: usize,
    n_aps: usize,
    n_antennas: usize,
    data: Vec<C64>,
}

impl LinkTensor {
    pub fn zeros(n_ues: usize, n_aps: usize, n_antennas: usize) -> Self {
        LinkTensor {
            n_ues,
            n_aps,
            n_antennas,
            data: vec![C64::new(0.0, 0.0); n_ues * n_aps * n_antennas],
        }
    }

    pub fn n_ues(&self) -> usize {
        self.n_ues
    }

    pub fn n_aps(&self) -> usize {
        self.n_aps
    }

    pub fn n_antennas(&self) -> usize {
        self.n_antennas
    }

    fn offset(&self, ue: usize, ap: usize) -> usize {
        debug_assert!(ue < self.n_ues && ap < self.n_aps);
        (ue * self.n_aps + ap) * self.n_antennas
    }

    pub fn get(&self, ue: usize, ap: usize) -> &[C64] {
        let o = self.offset(ue, ap);
        &self.data[o..o + self.n_antennas]
    }

    pub fn get_mut(&mut self, ue: usize, ap: usize) -> &mut [C64] {
        let o = self.offset(ue, ap);
        let a = self.n_antennas;
        &mut self.data[o..o + a]
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }
}

/// `a^H b`.
#[inline]
pub fn dotc(a: &[C64], b: &[C64]) -> C64 {
    a.iter()
        .zip(b)
        .fold(C64::new(0.0, 0.0), |acc, (x, y)| acc + x.conj() * y)
}

#[inline]
pub fn norm_sqr(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_indexing_is_row_major() {
        let g = Grid::from_fn(2, 3, |r, c| 10 * r + c);
        assert_eq!(g[(1, 2)], 12);
        assert_eq!(g.row(1), &[10, 11, 12]);
    }

    #[test]
    fn link_tensor_slices_do_not_overlap() {
        let mut t = LinkTensor::zeros(2, 2, 3);
        t.get_mut(1, 0)[2] = C64::new(1.0, 0.0);
        assert_eq!(t.get(1, 0)[2].re, 1.0);
        assert!(t.get(0, 1).iter().all(|z| z.re == 0.0));
        assert!(t.get(1, 1).iter().all(|z| z.re == 0.0));
    }
}
