use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::MeshError;
use crate::sbp::SbpOperatorSet;

/// Boundary treatment of one side of the domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Boundary {
    Periodic,
    SlipWall,
}

impl Boundary {
    pub fn name(self) -> &'static str {
        match self {
            Boundary::Periodic => "periodic",
            Boundary::SlipWall => "slip_wall",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "periodic" => Some(Boundary::Periodic),
            "slip_wall" => Some(Boundary::SlipWall),
            _ => None,
        }
    }
}

/// A face between two elements along reference direction `direction`.
/// `minus` touches it with its upper side, `plus` with its lower side; one of
/// them is `None` on a physical boundary.
#[derive(Clone, Debug, PartialEq)]
pub struct Face<const D: usize> {
    pub direction: usize,
    pub minus: Option<usize>,
    pub plus: Option<usize>,
    /// Shared contravariant vector `Ja^direction` per face node, pointing
    /// from `minus` to `plus`.
    pub normals: Vec<[f64; D]>,
}

/// Structured mesh of mapped tensor-product elements with LGL collocation
/// nodes. Element indices run fastest in the first direction, and so do node
/// indices inside an element.
#[derive(Clone, Debug)]
pub struct CurvilinearMesh<const D: usize> {
    op: Arc<SbpOperatorSet>,
    counts: [usize; D],
    boundaries: [Boundary; D],
    coords: Vec<[f64; D]>,
    jacobian: Vec<f64>,
    /// `contravariant[node][i]` is `Ja^i`.
    contravariant: Vec<[[f64; D]; D]>,
    faces: Vec<Face<D>>,
    /// `element_faces[e][direction][side]` indexes `faces`.
    element_faces: Vec<[[usize; 2]; D]>,
}

impl<const D: usize> CurvilinearMesh<D> {
    /// Builds the mesh from a mapping of global reference coordinates in
    /// `[-1, 1]^D` to physical space. Non-periodic directions get slip walls.
    pub fn new<F>(counts: [usize; D], op: Arc<SbpOperatorSet>, periodic: [bool; D], mapping: F) -> Result<Self, MeshError>
    where
        F: Fn(&[f64; D]) -> [f64; D],
    {
        if D == 0 || D > 2 {
            return Err(MeshError::UnsupportedDimension(D));
        }
        if counts.contains(&0) {
            return Err(MeshError::NoCells);
        }
        let m = op.len();
        let npe = m.pow(D as u32);
        let num_elements: usize = counts.iter().product();
        let mut coords = Vec::with_capacity(num_elements * npe);
        for e in 0..num_elements {
            let multi = multi_index(&counts, e);
            for node in 0..npe {
                let local = multi_index(&[m; D], node);
                let reference: [f64; D] = std::array::from_fn(|d| {
                    -1.0 + (2.0 * multi[d] as f64 + op.nodes()[local[d]] + 1.0) / counts[d] as f64
                });
                coords.push(mapping(&reference));
            }
        }
        // A single node carries no derivative information; take the element
        // extent from the mapping instead (exact for affine maps).
        let midpoint_derivatives: Option<Vec<[[f64; D]; D]>> = (m == 1).then(|| {
            (0..num_elements)
                .map(|e| {
                    let multi = multi_index(&counts, e);
                    let centre: [f64; D] = std::array::from_fn(|d| -1.0 + (2.0 * multi[d] as f64 + 1.0) / counts[d] as f64);
                    let mut der = [[0.0; D]; D];
                    for d in 0..D {
                        let (mut lo, mut hi) = (centre, centre);
                        lo[d] -= 1.0 / counts[d] as f64;
                        hi[d] += 1.0 / counts[d] as f64;
                        let (a, b) = (mapping(&lo), mapping(&hi));
                        for k in 0..D {
                            der[k][d] = 0.5 * (b[k] - a[k]);
                        }
                    }
                    der
                })
                .collect()
        });
        let boundaries = periodic.map(|p| if p { Boundary::Periodic } else { Boundary::SlipWall });
        let mut mesh = Self {
            op,
            counts,
            boundaries,
            coords,
            jacobian: Vec::new(),
            contravariant: Vec::new(),
            faces: Vec::new(),
            element_faces: Vec::new(),
        };
        mesh.compute_metrics(midpoint_derivatives)?;
        mesh.build_faces()?;
        mesh.check_metric_identity()?;
        Ok(mesh)
    }

    /// Affine mesh of the box `[lower, upper]`.
    pub fn cartesian(
        counts: [usize; D],
        op: Arc<SbpOperatorSet>,
        lower: [f64; D],
        upper: [f64; D],
        periodic: [bool; D],
    ) -> Result<Self, MeshError> {
        for d in 0..D {
            if !(upper[d] > lower[d]) {
                return Err(MeshError::DegenerateBounds { direction: d, lower: lower[d], upper: upper[d] });
            }
        }
        Self::new(counts, op, periodic, |r| std::array::from_fn(|d| lower[d] + 0.5 * (r[d] + 1.0) * (upper[d] - lower[d])))
    }

    pub fn operator(&self) -> &Arc<SbpOperatorSet> {
        &self.op
    }

    pub fn counts(&self) -> [usize; D] {
        self.counts
    }

    pub fn num_elements(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn nodes_per_element(&self) -> usize {
        self.op.len().pow(D as u32)
    }

    pub fn num_nodes(&self) -> usize {
        self.coords.len()
    }

    pub fn boundaries(&self) -> [Boundary; D] {
        self.boundaries
    }

    pub fn coords(&self) -> &[[f64; D]] {
        &self.coords
    }

    pub fn jacobian(&self) -> &[f64] {
        &self.jacobian
    }

    pub fn contravariant(&self) -> &[[[f64; D]; D]] {
        &self.contravariant
    }

    pub fn faces(&self) -> &[Face<D>] {
        &self.faces
    }

    pub fn element_faces(&self, element: usize) -> &[[usize; 2]; D] {
        &self.element_faces[element]
    }

    /// Quadrature weight `J w` of every node.
    pub fn mass(&self) -> Vec<f64> {
        let m = self.op.len();
        let npe = self.nodes_per_element();
        (0..self.num_nodes())
            .map(|g| {
                let local = multi_index(&[m; D], g % npe);
                local.iter().map(|&i| self.op.weights()[i]).product::<f64>() * self.jacobian[g]
            })
            .collect()
    }

    /// Index of node `pos` on line `line` along `direction` within an element.
    #[inline]
    pub fn line_node(&self, direction: usize, line: usize, pos: usize) -> usize {
        line_node::<D>(self.op.len(), direction, line, pos)
    }

    /// Test hook: adds `delta` to one component of `Ja^direction` at a node
    /// without touching the face normals.
    #[doc(hidden)]
    pub fn perturb_contravariant(&mut self, node: usize, direction: usize, component: usize, delta: f64) {
        self.contravariant[node][direction][component] += delta;
    }

    fn compute_metrics(&mut self, midpoint_derivatives: Option<Vec<[[f64; D]; D]>>) -> Result<(), MeshError> {
        let m = self.op.len();
        let npe = self.nodes_per_element();
        let n = self.num_nodes();
        self.jacobian = vec![0.0; n];
        self.contravariant = vec![[[0.0; D]; D]; n];
        for e in 0..self.num_elements() {
            let base = e * npe;
            // derivative[node][k][d] = d x_k / d xi_d
            let mut derivative = vec![[[0.0; D]; D]; npe];
            if let Some(der) = &midpoint_derivatives {
                derivative[0] = der[e];
            }
            for d in 0..D {
                for line in 0..npe / m {
                    for i in 0..m {
                        let node = line_node::<D>(m, d, line, i);
                        for j in 0..m {
                            let other = base + line_node::<D>(m, d, line, j);
                            for k in 0..D {
                                derivative[node][k][d] += self.op.d(i, j) * self.coords[other][k];
                            }
                        }
                    }
                }
            }
            for (node, der) in derivative.iter().enumerate() {
                let g = base + node;
                let (jac, ja) = metric_terms::<D>(der);
                if !(jac > 0.0) {
                    return Err(MeshError::NonPositiveJacobian { element: e, node, jacobian: jac });
                }
                self.jacobian[g] = jac;
                self.contravariant[g] = ja;
            }
        }
        Ok(())
    }

    fn build_faces(&mut self) -> Result<(), MeshError> {
        let m = self.op.len();
        let npe = self.nodes_per_element();
        let face_nodes = npe / m;
        let num_elements = self.num_elements();
        self.element_faces = vec![[[usize::MAX; 2]; D]; num_elements];
        for d in 0..D {
            let k = self.counts[d];
            let periodic = self.boundaries[d] == Boundary::Periodic;
            for e in 0..num_elements {
                let multi = multi_index(&self.counts, e);
                // every element owns the face on its lower side, and the last
                // element of a non-periodic row also owns the upper boundary
                let lower_neighbor = if multi[d] > 0 {
                    let mut nb = multi;
                    nb[d] -= 1;
                    Some(linear_index(&self.counts, &nb))
                } else if periodic {
                    let mut nb = multi;
                    nb[d] = k - 1;
                    Some(linear_index(&self.counts, &nb))
                } else {
                    None
                };
                let normals = (0..face_nodes)
                    .map(|f| {
                        let own = self.contravariant[e * npe + line_node::<D>(m, d, f, 0)][d];
                        match lower_neighbor {
                            Some(nb) => {
                                let other = self.contravariant[nb * npe + line_node::<D>(m, d, f, m - 1)][d];
                                std::array::from_fn(|c| 0.5 * (own[c] + other[c]))
                            }
                            None => own,
                        }
                    })
                    .collect();
                let id = self.faces.len();
                self.faces.push(Face { direction: d, minus: lower_neighbor, plus: Some(e), normals });
                self.element_faces[e][d][0] = id;
                if let Some(nb) = lower_neighbor {
                    self.element_faces[nb][d][1] = id;
                    if multi[d] > 0 && m > 1 {
                        self.check_interface(d, nb, e)?;
                    }
                }
                if !periodic && multi[d] + 1 == k {
                    let normals = (0..face_nodes)
                        .map(|f| self.contravariant[e * npe + line_node::<D>(m, d, f, m - 1)][d])
                        .collect();
                    let id = self.faces.len();
                    self.faces.push(Face { direction: d, minus: Some(e), plus: None, normals });
                    self.element_faces[e][d][1] = id;
                }
            }
        }
        Ok(())
    }

    fn check_interface(&self, d: usize, minus: usize, plus: usize) -> Result<(), MeshError> {
        let m = self.op.len();
        let npe = self.nodes_per_element();
        let mut scale = 1.0f64;
        let mut mismatch = 0.0f64;
        for f in 0..npe / m {
            let a = self.coords[minus * npe + line_node::<D>(m, d, f, m - 1)];
            let b = self.coords[plus * npe + line_node::<D>(m, d, f, 0)];
            for c in 0..D {
                mismatch = mismatch.max((a[c] - b[c]).abs());
                scale = scale.max(a[c].abs());
            }
        }
        if mismatch > 1e-12 * scale {
            return Err(MeshError::InterfaceMismatch { left: minus, right: plus, mismatch });
        }
        Ok(())
    }

    /// Largest `|sum_i D^(i) Ja^i|` over nodes and components, together with
    /// the largest `sum_i |D^(i)| |Ja^i|`, the size of the summed terms.
    pub fn metric_identity_residual(&self) -> (f64, f64) {
        let (residual, scale, _) = self.metric_identity_worst();
        (residual, scale)
    }

    fn metric_identity_worst(&self) -> (f64, f64, usize) {
        let m = self.op.len();
        let npe = self.nodes_per_element();
        let mut worst = (0.0f64, f64::MIN_POSITIVE, 0usize);
        for e in 0..self.num_elements() {
            let base = e * npe;
            let mut acc = vec![[0.0; D]; npe];
            let mut size = vec![[0.0; D]; npe];
            for d in 0..D {
                for line in 0..npe / m {
                    for i in 0..m {
                        let node = line_node::<D>(m, d, line, i);
                        for j in 0..m {
                            let ja = self.contravariant[base + line_node::<D>(m, d, line, j)][d];
                            for c in 0..D {
                                acc[node][c] += self.op.d(i, j) * ja[c];
                                size[node][c] += (self.op.d(i, j) * ja[c]).abs();
                            }
                        }
                    }
                }
            }
            for node in 0..npe {
                for c in 0..D {
                    worst.0 = worst.0.max(acc[node][c].abs());
                    if worst.0 == acc[node][c].abs() && acc[node][c] != 0.0 {
                        worst.2 = e;
                    }
                    worst.1 = worst.1.max(size[node][c]);
                }
            }
        }
        worst
    }

    fn check_metric_identity(&self) -> Result<(), MeshError> {
        let (residual, scale, element) = self.metric_identity_worst();
        if residual > 1e-12 * scale {
            return Err(MeshError::MetricIdentity { element, residual, scale });
        }
        Ok(())
    }

    /// Element corners and smallest Jacobian, one element per line.
    pub fn summary(&self) -> String {
        let m = self.op.len();
        let npe = self.nodes_per_element();
        let mut out = String::new();
        let _ = writeln!(out, "dimension {D}");
        let _ = writeln!(out, "elements {:?}", self.counts);
        let _ = writeln!(out, "degree {}", self.op.degree());
        let _ = writeln!(out, "boundaries {:?}", self.boundaries.map(Boundary::name));
        let corners: Vec<usize> = (0..1usize << D)
            .map(|mask| {
                let local: [usize; D] = std::array::from_fn(|d| if mask >> d & 1 == 1 { m - 1 } else { 0 });
                linear_index(&[m; D], &local)
            })
            .collect();
        let global_min = self.jacobian.iter().cloned().fold(f64::INFINITY, f64::min);
        let _ = writeln!(out, "min_jacobian {global_min:.17e}");
        for e in 0..self.num_elements() {
            let min_j = self.jacobian[e * npe..(e + 1) * npe].iter().cloned().fold(f64::INFINITY, f64::min);
            let _ = write!(out, "element {e} min_jacobian {min_j:.17e} corners");
            for &c in &corners {
                let x = self.coords[e * npe + c];
                let _ = write!(out, " (");
                for (k, v) in x.iter().enumerate() {
                    let _ = write!(out, "{}{v:.17e}", if k > 0 { ", " } else { "" });
                }
                let _ = write!(out, ")");
            }
            let _ = writeln!(out);
        }
        out
    }
}

/// The paper benchmark mapping of `[-1, 1]^2` onto `[0, 1000]^2`:
/// `x = 500 (1 + xi + 0.1 sin(pi xi) sin(pi eta))`, `y` analogous.
pub fn warped_square(reference: &[f64; 2]) -> [f64; 2] {
    use std::f64::consts::PI;
    let bump = 0.1 * (PI * reference[0]).sin() * (PI * reference[1]).sin();
    [500.0 * (1.0 + reference[0] + bump), 500.0 * (1.0 + reference[1] + bump)]
}

impl CurvilinearMesh<2> {
    pub fn warped(counts: [usize; 2], op: Arc<SbpOperatorSet>, periodic: [bool; 2]) -> Result<Self, MeshError> {
        Self::new(counts, op, periodic, warped_square)
    }
}

fn metric_terms<const D: usize>(der: &[[f64; D]; D]) -> (f64, [[f64; D]; D]) {
    let mut ja = [[0.0; D]; D];
    match D {
        1 => {
            ja[0][0] = 1.0;
            (der[0][0], ja)
        }
        2 => {
            let (x_xi, x_eta, y_xi, y_eta) = (der[0][0], der[0][1], der[1][0], der[1][1]);
            ja[0][0] = y_eta;
            ja[0][1] = -x_eta;
            ja[1][0] = -y_xi;
            ja[1][1] = x_xi;
            (x_xi * y_eta - x_eta * y_xi, ja)
        }
        _ => unreachable!("checked in the constructor"),
    }
}

fn multi_index<const D: usize>(counts: &[usize; D], mut idx: usize) -> [usize; D] {
    let mut out = [0; D];
    for d in 0..D {
        out[d] = idx % counts[d];
        idx /= counts[d];
    }
    out
}

fn linear_index<const D: usize>(counts: &[usize; D], multi: &[usize; D]) -> usize {
    let mut idx = 0;
    for d in (0..D).rev() {
        idx = idx * counts[d] + multi[d];
    }
    idx
}

/// Node `pos` on the `line`-th line along `direction` of an element with `m`
/// nodes per direction. Lines are numbered by the remaining indices, fastest
/// first.
#[inline]
fn line_node<const D: usize>(m: usize, direction: usize, line: usize, pos: usize) -> usize {
    let stride = m.pow(direction as u32);
    let low = line % stride;
    let high = line / stride;
    low + stride * (pos + m * high)
}
