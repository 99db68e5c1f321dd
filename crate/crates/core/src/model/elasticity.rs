use super::{normalize_max, BoundaryKind, Grid3D, ProblemInstance, ProblemKind};
use crate::error::{Error, Result};
use crate::sparse::{CsrMatrix, DenseColumnBlock};

/// Isotropic linear-elastic material.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Material {
    pub youngs_modulus: f64,
    pub poisson_ratio: f64,
}

impl Default for Material {
    fn default() -> Self {
        Self {
            youngs_modulus: 1.0,
            poisson_ratio: 0.3,
        }
    }
}

impl Material {
    fn validate(&self) -> Result<()> {
        if !(self.youngs_modulus > 0.0 && self.youngs_modulus.is_finite()) {
            return Err(Error::InvalidMaterial(format!(
                "Young's modulus must be positive, got {}",
                self.youngs_modulus
            )));
        }
        if !(0.0..0.5).contains(&self.poisson_ratio) {
            return Err(Error::InvalidMaterial(format!(
                "Poisson ratio must lie in [0, 0.5), got {}",
                self.poisson_ratio
            )));
        }
        Ok(())
    }

    /// Voigt-ordered (xx, yy, zz, yz, xz, xy) constitutive matrix.
    fn constitutive(&self) -> [[f64; 6]; 6] {
        let (e, nu) = (self.youngs_modulus, self.poisson_ratio);
        let lambda = e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
        let mu = e / (2.0 * (1.0 + nu));
        let mut d = [[0.0; 6]; 6];
        for i in 0..3 {
            for j in 0..3 {
                d[i][j] = lambda;
            }
            d[i][i] = lambda + 2.0 * mu;
            d[i + 3][i + 3] = mu;
        }
        d
    }
}

/// 24×24 stiffness of a trilinear brick of size `hx × hy × hz`, 2×2×2 Gauss
/// rule. Local node `a = ax + 2 ay + 4 az`, dofs `3a..3a+3`.
///
/// The upper triangle is integrated and mirrored, so the result is exactly
/// symmetric.
pub fn hex8_stiffness(h: [f64; 3], material: &Material) -> [[f64; 24]; 24] {
    let d = material.constitutive();
    let g = 1.0 / 3f64.sqrt();
    let det_j = h[0] * h[1] * h[2] / 8.0;
    let mut ke = [[0.0; 24]; 24];
    for &zq in &[-g, g] {
        for &yq in &[-g, g] {
            for &xq in &[-g, g] {
                let q = [xq, yq, zq];
                // Physical gradients of the eight shape functions.
                let mut grad = [[0.0; 3]; 8];
                for (a, ga) in grad.iter_mut().enumerate() {
                    let s = [
                        if a & 1 == 1 { 1.0 } else { -1.0 },
                        if a & 2 == 2 { 1.0 } else { -1.0 },
                        if a & 4 == 4 { 1.0 } else { -1.0 },
                    ];
                    let f = [
                        0.5 * (1.0 + s[0] * q[0]),
                        0.5 * (1.0 + s[1] * q[1]),
                        0.5 * (1.0 + s[2] * q[2]),
                    ];
                    ga[0] = 0.5 * s[0] * f[1] * f[2] * 2.0 / h[0];
                    ga[1] = 0.5 * s[1] * f[0] * f[2] * 2.0 / h[1];
                    ga[2] = 0.5 * s[2] * f[0] * f[1] * 2.0 / h[2];
                }
                let mut b = [[0.0; 24]; 6];
                for (a, ga) in grad.iter().enumerate() {
                    let c = 3 * a;
                    b[0][c] = ga[0];
                    b[1][c + 1] = ga[1];
                    b[2][c + 2] = ga[2];
                    b[3][c + 1] = ga[2];
                    b[3][c + 2] = ga[1];
                    b[4][c] = ga[2];
                    b[4][c + 2] = ga[0];
                    b[5][c] = ga[1];
                    b[5][c + 1] = ga[0];
                }
                let mut db = [[0.0; 24]; 6];
                for r in 0..6 {
                    for c in 0..24 {
                        db[r][c] = (0..6).map(|k| d[r][k] * b[k][c]).sum();
                    }
                }
                for r in 0..24 {
                    for c in r..24 {
                        let v: f64 = (0..6).map(|k| b[k][r] * db[k][c]).sum();
                        ke[r][c] += v * det_j;
                    }
                }
            }
        }
    }
    for r in 0..24 {
        for c in 0..r {
            ke[r][c] = ke[c][r];
        }
    }
    ke
}

/// Linear elasticity with trilinear hexahedra on the lattice.
///
/// `Neumann` keeps every node (six rigid-body modes in the kernel).
/// `Dirichlet` clamps the `x = 0` face: those nodes are removed from the
/// system and the remaining matrix is SPD.
///
/// The null-space block always holds the three translations and the three
/// linearised rotations `(−y, x, 0)`, `(0, −z, y)`, `(z, 0, −x)` evaluated at
/// the system dofs.
pub fn assemble_elasticity3d(
    grid: Grid3D,
    material: Material,
    boundary: BoundaryKind,
) -> Result<ProblemInstance> {
    material.validate()?;
    if grid.dofs_per_node != 3 {
        return Err(Error::InvalidGrid(format!(
            "elasticity needs three dofs per node, got {}",
            grid.dofs_per_node
        )));
    }
    let [nx, ny, nz] = grid.dims();
    let h = grid.spacing();
    let ke = hex8_stiffness(h, &material);

    // Lattice node -> system node (None when clamped).
    let mut node_map = vec![None; grid.num_nodes()];
    let mut nodes = Vec::with_capacity(grid.num_nodes());
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                if boundary == BoundaryKind::Dirichlet && i == 0 {
                    continue;
                }
                node_map[grid.node_index(i, j, k)] = Some(nodes.len());
                nodes.push([i, j, k]);
            }
        }
    }
    let n = 3 * nodes.len();
    let mut trip: Vec<(usize, usize, f64)> =
        Vec::with_capacity((nx - 1) * (ny - 1) * (nz - 1) * 576);
    for ek in 0..nz - 1 {
        for ej in 0..ny - 1 {
            for ei in 0..nx - 1 {
                let mut dof = [None; 24];
                for a in 0..8 {
                    let lat = grid.node_index(ei + (a & 1), ej + ((a >> 1) & 1), ek + ((a >> 2) & 1));
                    if let Some(node) = node_map[lat] {
                        for c in 0..3 {
                            dof[3 * a + c] = Some(3 * node + c);
                        }
                    }
                }
                for r in 0..24 {
                    let Some(gr) = dof[r] else { continue };
                    for c in 0..24 {
                        let Some(gc) = dof[c] else { continue };
                        trip.push((gr, gc, ke[r][c]));
                    }
                }
            }
        }
    }
    let matrix = CsrMatrix::from_triplets(n, n, &trip)?;

    let coords: Vec<[f64; 3]> = nodes
        .iter()
        .map(|&[i, j, k]| [i as f64 * h[0], j as f64 * h[1], k as f64 * h[2]])
        .collect();
    let mut cols = vec![vec![0.0; n]; 6];
    for (node, &[x, y, z]) in coords.iter().enumerate() {
        let d = 3 * node;
        for t in 0..3 {
            cols[t][d + t] = 1.0;
        }
        cols[3][d] = -y;
        cols[3][d + 1] = x;
        cols[4][d + 1] = -z;
        cols[4][d + 2] = y;
        cols[5][d] = z;
        cols[5][d + 2] = -x;
    }
    cols.iter_mut().for_each(|c| normalize_max(c));
    let nullspace = DenseColumnBlock::from_columns(n, cols);

    Ok(ProblemInstance {
        kind: ProblemKind::Elasticity3d,
        grid,
        boundary,
        matrix,
        nodes,
        coords,
        dofs_per_node: 3,
        nullspace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_invalid_poisson_ratio() {
        let g = Grid3D::cube(2, 3).unwrap();
        for nu in [-0.1, 0.5, 0.7] {
            let m = Material {
                youngs_modulus: 1.0,
                poisson_ratio: nu,
            };
            assert!(matches!(
                assemble_elasticity3d(g, m, BoundaryKind::Neumann),
                Err(Error::InvalidMaterial(_))
            ));
        }
    }

    #[test]
    fn single_element_rigid_modes_in_kernel() {
        let g = Grid3D::cube(2, 3).unwrap();
        let p = assemble_elasticity3d(g, Material::default(), BoundaryKind::Neumann).unwrap();
        assert_eq!(p.num_dofs(), 24);
        let norm_a = p.matrix.norm_inf();
        for j in 0..6 {
            let z = p.nullspace.column(j);
            let az = p.matrix.mul_vec(z);
            let zmax = z.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let r = az.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            assert!(r <= 1e-12 * norm_a * zmax, "mode {j}: {r}");
        }
    }

    #[test]
    fn stiffness_exactly_symmetric() {
        let ke = hex8_stiffness([0.5, 0.25, 1.0], &Material::default());
        for r in 0..24 {
            for c in 0..24 {
                assert_eq!(ke[r][c], ke[c][r]);
            }
        }
    }

    #[test]
    fn clamped_face_removes_nodes() {
        let g = Grid3D::cube(3, 3).unwrap();
        let p = assemble_elasticity3d(g, Material::default(), BoundaryKind::Dirichlet).unwrap();
        assert_eq!(p.nodes.len(), 18);
        assert!(p.nodes.iter().all(|n| n[0] > 0));
        assert_eq!(p.num_dofs(), 54);
        assert_eq!(crate::sparse::transpose(&p.matrix), p.matrix);
    }
}
