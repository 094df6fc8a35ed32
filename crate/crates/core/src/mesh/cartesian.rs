use crate::error::MeshError;

/// Uniform tensor-product grid of `D`-dimensional cells. Cell indices run
/// fastest in the first direction.
#[derive(Clone, Debug, PartialEq)]
pub struct CartesianGrid<const D: usize> {
    counts: [usize; D],
    lower: [f64; D],
    upper: [f64; D],
    periodic: [bool; D],
    spacing: [f64; D],
}

impl<const D: usize> CartesianGrid<D> {
    pub fn new(counts: [usize; D], lower: [f64; D], upper: [f64; D], periodic: [bool; D]) -> Result<Self, MeshError> {
        if counts.contains(&0) {
            return Err(MeshError::NoCells);
        }
        for d in 0..D {
            if !(upper[d] > lower[d]) || !lower[d].is_finite() || !upper[d].is_finite() {
                return Err(MeshError::DegenerateBounds { direction: d, lower: lower[d], upper: upper[d] });
            }
        }
        let spacing = std::array::from_fn(|d| (upper[d] - lower[d]) / counts[d] as f64);
        Ok(Self { counts, lower, upper, periodic, spacing })
    }

    pub fn counts(&self) -> [usize; D] {
        self.counts
    }

    pub fn lower(&self) -> [f64; D] {
        self.lower
    }

    pub fn upper(&self) -> [f64; D] {
        self.upper
    }

    pub fn periodic(&self) -> [bool; D] {
        self.periodic
    }

    pub fn spacing(&self) -> [f64; D] {
        self.spacing
    }

    pub fn num_cells(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing.iter().product()
    }

    pub fn domain_volume(&self) -> f64 {
        (0..D).map(|d| self.upper[d] - self.lower[d]).product()
    }

    pub fn stride(&self, direction: usize) -> usize {
        self.counts[..direction].iter().product()
    }

    pub fn index(&self, multi: [usize; D]) -> usize {
        let mut idx = 0;
        for d in (0..D).rev() {
            idx = idx * self.counts[d] + multi[d];
        }
        idx
    }

    pub fn multi_index(&self, mut idx: usize) -> [usize; D] {
        let mut out = [0; D];
        for d in 0..D {
            out[d] = idx % self.counts[d];
            idx /= self.counts[d];
        }
        out
    }

    pub fn center(&self, idx: usize) -> [f64; D] {
        let multi = self.multi_index(idx);
        std::array::from_fn(|d| self.lower[d] + (multi[d] as f64 + 0.5) * self.spacing[d])
    }

    /// Neighbour across the face on `side` (0 = lower, 1 = upper) in
    /// `direction`; `None` at a non-periodic boundary.
    pub fn neighbor(&self, idx: usize, direction: usize, side: usize) -> Option<usize> {
        let mut multi = self.multi_index(idx);
        let n = self.counts[direction];
        let k = multi[direction];
        multi[direction] = match (side, k) {
            (0, 0) if self.periodic[direction] => n - 1,
            (0, 0) => return None,
            (0, k) => k - 1,
            (_, k) if k + 1 == n && self.periodic[direction] => 0,
            (_, k) if k + 1 == n => return None,
            (_, k) => k + 1,
        };
        Some(self.index(multi))
    }
}
