//! Triangulated geodesic spheres and OBJ export.

use std::collections::HashMap;
use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::geodesic::{geodesic_point, GeodesicParams};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TriangleMesh {
    pub vertices: Vec<[f64; 3]>,
    pub triangles: Vec<[usize; 3]>,
}

impl TriangleMesh {
    /// Signed volume enclosed by the surface (positive for outward winding).
    pub fn signed_volume(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| {
                let [a, b, c] = t.map(|i| self.vertices[i]);
                let cross = [b[1] * c[2] - b[2] * c[1], b[2] * c[0] - b[0] * c[2], b[0] * c[1] - b[1] * c[0]];
                (a[0] * cross[0] + a[1] * cross[1] + a[2] * cross[2]) / 6.0
            })
            .sum()
    }

    /// Every edge is shared by exactly two triangles traversing it in
    /// opposite directions.
    pub fn is_watertight(&self) -> bool {
        let mut edges: HashMap<(usize, usize), i32> = HashMap::new();
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                if a == b {
                    return false;
                }
                *edges.entry((a, b)).or_default() += 1;
            }
        }
        edges.iter().all(|(&(a, b), &n)| n == 1 && edges.get(&(b, a)) == Some(&1))
    }

    pub fn has_nan(&self) -> bool {
        self.vertices.iter().flatten().any(|v| !v.is_finite())
    }

    pub fn write_obj<W: Write>(&self, mut w: W, comment: &str) -> io::Result<()> {
        for line in comment.lines() {
            writeln!(w, "# {line}")?;
        }
        for v in &self.vertices {
            writeln!(w, "v {:.12} {:.12} {:.12}", v[0], v[1], v[2])?;
        }
        for t in &self.triangles {
            writeln!(w, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1)?;
        }
        Ok(())
    }

    pub fn to_obj(&self, comment: &str) -> String {
        let mut buf = Vec::new();
        self.write_obj(&mut buf, comment).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("OBJ output is ASCII")
    }
}

/// Geodesic sphere of radius `rho` about the origin in Euclidean model
/// coordinates.
///
/// The unit sphere of directions is triangulated by subdividing the
/// octahedron, `res/2` segments per octant edge, so `res` segments run from
/// pole to pole and the mesh has `2·res²` triangles. A direction `(x, y, z)`
/// has longitude `atan2(y, x)` and altitude `asin z`.
pub fn sphere_mesh(rho: f64, res: usize) -> Result<TriangleMesh> {
    if res < 2 || !res.is_multiple_of(2) {
        return Err(Error::InvalidMeshResolution(res));
    }
    if !(0.0..std::f64::consts::FRAC_PI_2).contains(&rho) {
        return Err(Error::RadiusOutOfRange(rho));
    }
    let n = (res / 2) as i64;
    let mut index: HashMap<(i64, i64, i64), usize> = HashMap::new();
    let mut mesh = TriangleMesh::default();
    let mut vertex = |key: (i64, i64, i64), mesh: &mut TriangleMesh| -> Result<usize> {
        if let Some(&i) = index.get(&key) {
            return Ok(i);
        }
        let (x, y, z) = (key.0 as f64, key.1 as f64, key.2 as f64);
        let len = (x * x + y * y + z * z).sqrt();
        let g = GeodesicParams::new(rho, y.atan2(x), (z / len).clamp(-1.0, 1.0).asin());
        let e = geodesic_point(&g)?;
        mesh.vertices.push([e.x, e.y, e.z]);
        index.insert(key, mesh.vertices.len() - 1);
        Ok(mesh.vertices.len() - 1)
    };
    for signs in 0..8 {
        let s = [1, 2, 4].map(|bit| if signs & bit == 0 { 1 } else { -1 });
        let flip = s.iter().filter(|&&v| v < 0).count() % 2 == 1;
        let key = |i: i64, j: i64| (s[0] * i, s[1] * j, s[2] * (n - i - j));
        let push = |a, b, c, mesh: &mut TriangleMesh| {
            mesh.triangles.push(if flip { [a, c, b] } else { [a, b, c] });
        };
        for i in 0..n {
            for j in 0..n - i {
                let a = vertex(key(i, j), &mut mesh)?;
                let b = vertex(key(i + 1, j), &mut mesh)?;
                let c = vertex(key(i, j + 1), &mut mesh)?;
                push(a, b, c, &mut mesh);
                if i + j < n - 1 {
                    let d = vertex(key(i + 1, j + 1), &mut mesh)?;
                    push(b, d, c, &mut mesh);
                }
            }
        }
    }
    // The exponential map may reverse orientation; keep the winding outward.
    if mesh.signed_volume() < 0.0 {
        for t in &mut mesh.triangles {
            t.swap(1, 2);
        }
    }
    Ok(mesh)
}
