/// Symmetric matrix stored as its lower band.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedMatrix {
    n: usize,
    bandwidth: usize,
    // row i holds entries (i, i - k) for k in 0..=bandwidth
    data: Vec<f64>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, bandwidth: usize) -> Self {
        Self { n, bandwidth, data: vec![0.0; n * (bandwidth + 1)] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        (i - j <= self.bandwidth && i < self.n).then(|| i * (self.bandwidth + 1) + (i - j))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.slot(i, j).map_or(0.0, |s| self.data[s])
    }

    /// Adds `v` to the symmetric pair `(i, j)`, `(j, i)`.
    ///
    /// # Panics
    /// If `(i, j)` lies outside the band.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let s = self.slot(i, j).unwrap_or_else(|| panic!("entry ({i}, {j}) outside band {}", self.bandwidth));
        self.data[s] += v;
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn set_diagonal(&mut self, i: usize, v: f64) {
        let s = self.slot(i, i).expect("diagonal in band");
        self.data[s] = v;
    }

    /// Zeroes row and column `i` and puts 1 on the diagonal.
    pub fn pin(&mut self, i: usize) {
        let lo = i.saturating_sub(self.bandwidth);
        let hi = (i + self.bandwidth).min(self.n - 1);
        for j in lo..=hi {
            let s = self.slot(i, j).expect("in band");
            self.data[s] = 0.0;
        }
        self.set_diagonal(i, 1.0);
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            let lo = i.saturating_sub(self.bandwidth);
            for j in lo..i {
                let a = self.get(i, j);
                y[i] += a * x[j];
                y[j] += a * x[i];
            }
            y[i] += self.get(i, i) * x[i];
        }
        y
    }

    /// Solves `A x = b` by banded Cholesky. `None` when `A` is not positive definite.
    pub fn cholesky_solve(&self, b: &[f64]) -> Option<Vec<f64>> {
        let (n, bw) = (self.n, self.bandwidth);
        let w = bw + 1;
        let mut l = self.data.clone();
        let at = |i: usize, j: usize| i * w + (i - j);
        for j in 0..n {
            let lo = j.saturating_sub(bw);
            let mut s = l[at(j, j)];
            for k in lo..j {
                s -= l[at(j, k)] * l[at(j, k)];
            }
            if !(s > 0.0 && s.is_finite()) {
                return None;
            }
            let d = s.sqrt();
            l[at(j, j)] = d;
            for i in j + 1..(j + bw + 1).min(n) {
                let lo = i.saturating_sub(bw);
                let mut s = l[at(i, j)];
                for k in lo..j {
                    s -= l[at(i, k)] * l[at(j, k)];
                }
                l[at(i, j)] = s / d;
            }
        }
        let mut y = b.to_vec();
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            for k in lo..i {
                y[i] -= l[at(i, k)] * y[k];
            }
            y[i] /= l[at(i, i)];
        }
        for i in (0..n).rev() {
            for k in i + 1..(i + bw + 1).min(n) {
                y[i] -= l[at(k, i)] * y[k];
            }
            y[i] /= l[at(i, i)];
        }
        Some(y)
    }
}
