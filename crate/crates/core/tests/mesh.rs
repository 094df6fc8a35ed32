use thetaflux::mesh::{warped_square, Boundary, CartesianGrid, CurvilinearMesh};
use thetaflux::sbp::SbpOperatorSet;
use thetaflux::MeshError;

#[test]
fn cartesian_spacing_and_neighbours() {
    let grid = CartesianGrid::new([64], [0.0], [1.0], [true]).unwrap();
    assert_eq!(grid.spacing(), [1.0 / 64.0]);
    assert_eq!(grid.neighbor(0, 0, 0), Some(63));
    assert_eq!(grid.neighbor(63, 0, 1), Some(0));
    let walls = CartesianGrid::new([4, 3], [0.0, 0.0], [4.0, 3.0], [true, false]).unwrap();
    assert_eq!(walls.neighbor(0, 1, 0), None);
    assert_eq!(walls.neighbor(0, 0, 0), Some(3));
    assert_eq!(walls.neighbor(walls.index([2, 1]), 1, 1), Some(walls.index([2, 2])));
    assert_eq!(walls.center(walls.index([2, 1])), [2.5, 1.5]);
    let cube = CartesianGrid::new([16; 3], [0.0; 3], [1.0; 3], [true; 3]).unwrap();
    assert_eq!(cube.num_cells(), 4096);
    for idx in [0, 17, 4095] {
        assert_eq!(cube.index(cube.multi_index(idx)), idx);
    }
}

#[test]
fn cartesian_rejects_degenerate_input() {
    assert_eq!(CartesianGrid::new([0], [0.0], [1.0], [true]).unwrap_err(), MeshError::NoCells);
    assert!(matches!(
        CartesianGrid::new([4, 4], [0.0, 1.0], [1.0, 1.0], [true, true]),
        Err(MeshError::DegenerateBounds { direction: 1, .. })
    ));
}

#[test]
fn affine_mesh_has_constant_metrics() {
    let op = SbpOperatorSet::lgl(3).unwrap();
    let mesh = CurvilinearMesh::cartesian([4, 2], op, [0.0, -1.0], [8.0, 3.0], [true, false]).unwrap();
    // element extents 2 x 2, so J = 1 * 1 and Ja axis aligned
    for (j, ja) in mesh.jacobian().iter().zip(mesh.contravariant()) {
        assert!((j - 1.0).abs() < 1e-13);
        assert!((ja[0][0] - 1.0).abs() < 1e-13 && ja[0][1].abs() < 1e-13);
        assert!((ja[1][1] - 1.0).abs() < 1e-13 && ja[1][0].abs() < 1e-13);
    }
    let total: f64 = mesh.mass().iter().sum();
    assert!((total - 32.0).abs() < 1e-12);
    assert_eq!(mesh.boundaries(), [Boundary::Periodic, Boundary::SlipWall]);
    // 4 x 2 periodic faces in x, 4 x 3 faces in y
    assert_eq!(mesh.faces().len(), 8 + 12);
}

#[test]
fn polynomial_mapping_metrics_are_exact() {
    let op = SbpOperatorSet::lgl(3).unwrap();
    let map = |r: &[f64; 2]| [r[0] + 0.1 * r[1] * r[1], r[1] + 0.05 * r[0] * r[0] * r[1]];
    let mesh = CurvilinearMesh::new([2, 2], op, [false, false], map).unwrap();
    // reference derivatives of the global mapping scale by 1/K = 1/2 per direction
    for (x_ref, (j, ja)) in global_references(&mesh).iter().zip(mesh.jacobian().iter().zip(mesh.contravariant())) {
        let (xi, eta) = (x_ref[0], x_ref[1]);
        let x_xi = 0.5;
        let x_eta = 0.5 * 0.2 * eta;
        let y_xi = 0.5 * 0.1 * xi * eta;
        let y_eta = 0.5 * (1.0 + 0.05 * xi * xi);
        assert!((j - (x_xi * y_eta - x_eta * y_xi)).abs() < 1e-14);
        assert!((ja[0][0] - y_eta).abs() < 1e-14 && (ja[0][1] + x_eta).abs() < 1e-14);
        assert!((ja[1][0] + y_xi).abs() < 1e-14 && (ja[1][1] - x_xi).abs() < 1e-14);
    }
}

fn global_references(mesh: &CurvilinearMesh<2>) -> Vec<[f64; 2]> {
    let op = mesh.operator();
    let m = op.len();
    let [k0, k1] = mesh.counts();
    let mut out = Vec::new();
    for e1 in 0..k1 {
        for e0 in 0..k0 {
            for j in 0..m {
                for i in 0..m {
                    out.push([
                        -1.0 + (2.0 * e0 as f64 + op.nodes()[i] + 1.0) / k0 as f64,
                        -1.0 + (2.0 * e1 as f64 + op.nodes()[j] + 1.0) / k1 as f64,
                    ]);
                }
            }
        }
    }
    out
}

#[test]
fn warped_mesh_is_valid() {
    for n in [2, 3, 4] {
        let op = SbpOperatorSet::lgl(n).unwrap();
        let mesh = CurvilinearMesh::warped([16, 16], op, [false, false]).unwrap();
        assert!(mesh.jacobian().iter().all(|&j| j > 0.0));
        let (residual, scale) = mesh.metric_identity_residual();
        assert!(residual <= 1e-12 * scale, "N={n}: {residual} vs {scale}");
        let area: f64 = mesh.mass().iter().sum();
        assert!((area - 1e6).abs() < 1e-6 * 1e6, "area {area}");
    }
}

#[test]
fn interfaces_match_and_normals_are_shared() {
    let op = SbpOperatorSet::lgl(2).unwrap();
    let mesh = CurvilinearMesh::warped([4, 4], op.clone(), [false, false]).unwrap();
    let npe = mesh.nodes_per_element();
    let m = op.len();
    for face in mesh.faces() {
        let (Some(minus), Some(plus)) = (face.minus, face.plus) else { continue };
        for f in 0..m {
            let a = mesh.coords()[minus * npe + mesh.line_node(face.direction, f, m - 1)];
            let b = mesh.coords()[plus * npe + mesh.line_node(face.direction, f, 0)];
            assert!((a[0] - b[0]).abs() < 1e-12 && (a[1] - b[1]).abs() < 1e-12);
        }
    }
    let corner = warped_square(&[-1.0, -1.0]);
    assert!(corner[0].abs() < 1e-12 && corner[1].abs() < 1e-12);
}

#[test]
fn folded_mapping_is_rejected() {
    let op = SbpOperatorSet::lgl(2).unwrap();
    let err = CurvilinearMesh::new([2, 2], op, [false, false], |r| [-r[0], r[1]]).unwrap_err();
    assert!(matches!(err, MeshError::NonPositiveJacobian { element: 0, .. }));
}

#[test]
fn summary_lists_every_element() {
    let op = SbpOperatorSet::lgl(2).unwrap();
    let mesh = CurvilinearMesh::warped([3, 2], op, [false, false]).unwrap();
    let text = mesh.summary();
    assert_eq!(text.lines().filter(|l| l.starts_with("element ")).count(), 6);
    assert!(text.contains("min_jacobian"));
}

#[test]
fn one_dimensional_and_single_node_meshes() {
    let op = SbpOperatorSet::lgl(3).unwrap();
    let mesh = CurvilinearMesh::cartesian([5], op, [0.0], [1.0], [true]).unwrap();
    assert!(mesh.jacobian().iter().all(|&j| (j - 0.1).abs() < 1e-14));
    assert_eq!(mesh.faces().len(), 5);
    let fv = CurvilinearMesh::cartesian([8], SbpOperatorSet::single_node(), [0.0], [2.0], [true]).unwrap();
    assert_eq!(fv.coords()[0], [0.125]);
    assert!(fv.jacobian().iter().all(|&j| (j - 0.125).abs() < 1e-15));
}
