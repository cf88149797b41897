//! Interface-fitted triangulations of the disk `|x| <= R_hat`.
//!
//! Meshes are built from concentric vertex rings whose vertex counts follow
//! the ring circumference. The circles `r = r0` (Kerr medium boundary),
//! `r = R` (PML interface) and `r = R_hat` (outer boundary) are always vertex
//! rings, so every triangle lies entirely inside one region. Elements are
//! straight-edged; ring vertices sit exactly on their circle.

use std::collections::HashMap;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use thiserror::Error;

use crate::scalar::{lit, to_f64, Real};

const LOCATE_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("radii must satisfy 0 < r0 < R < R_hat, got ({0}, {1}, {2})")]
    InvalidRadii(f64, f64, f64),
    #[error("mesh size {h} must be positive and at most r0 = {r0}")]
    MeshSizeTooLarge { h: f64, r0: f64 },
    #[error("point ({0}, {1}) lies outside the computational disk")]
    OutsideDomain(f64, f64),
    #[error("inconsistent mesh: {0}")]
    Inconsistent(String),
    #[error("mesh file parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Material region of a triangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Region {
    /// Kerr medium, `r < r0`.
    Kerr,
    /// Linear part of the physical domain, `r0 < r < R`.
    Annulus,
    /// Absorbing layer, `R < r < R_hat`.
    Pml,
}

impl Region {
    /// Whether the region belongs to the physical domain `|x| < R`.
    pub fn in_omega(self) -> bool {
        !matches!(self, Region::Pml)
    }

    pub fn code(self) -> u8 {
        match self {
            Region::Kerr => 0,
            Region::Annulus => 1,
            Region::Pml => 2,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(Region::Kerr),
            1 => Some(Region::Annulus),
            2 => Some(Region::Pml),
            _ => None,
        }
    }
}

/// The three tagged circles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Circle {
    Kerr,
    Interface,
    Outer,
}

impl Circle {
    pub fn code(self) -> u8 {
        match self {
            Circle::Kerr => 1,
            Circle::Interface => 2,
            Circle::Outer => 3,
        }
    }

    pub fn from_code(code: u8) -> Option<Option<Self>> {
        match code {
            0 => Some(None),
            1 => Some(Some(Circle::Kerr)),
            2 => Some(Some(Circle::Interface)),
            3 => Some(Some(Circle::Outer)),
            _ => None,
        }
    }
}

/// Radii `(r0, R, R_hat)` of the tagged circles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskRadii<T> {
    pub kerr: T,
    pub interface: T,
    pub outer: T,
}

impl<T: Real> DiskRadii<T> {
    pub fn new(kerr: T, interface: T, outer: T) -> Result<Self, MeshError> {
        let r = Self { kerr, interface, outer };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<(), MeshError> {
        let ok = self.kerr > T::zero()
            && self.kerr < self.interface
            && self.interface < self.outer
            && self.outer.is_finite();
        if ok {
            Ok(())
        } else {
            Err(MeshError::InvalidRadii(to_f64(self.kerr), to_f64(self.interface), to_f64(self.outer)))
        }
    }

    pub fn radius(&self, circle: Circle) -> T {
        match circle {
            Circle::Kerr => self.kerr,
            Circle::Interface => self.interface,
            Circle::Outer => self.outer,
        }
    }
}

/// An edge shared by two triangles. `left` has the directed edge
/// `vertices[0] -> vertices[1]` in counter-clockwise order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InteriorEdge {
    pub vertices: [usize; 2],
    pub left: usize,
    pub right: usize,
    /// Both neighbouring triangles lie in the physical domain.
    pub in_omega: bool,
}

/// Refinement level together with the resulting mesh size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefinementLevel<T> {
    pub level: usize,
    pub h_max: T,
}

/// Point location result.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Location<T> {
    pub triangle: usize,
    pub barycentric: [T; 3],
}

/// Immutable triangulation of the disk with region tags and edge adjacency.
#[derive(Debug, Clone)]
pub struct Mesh<T> {
    radii: DiskRadii<T>,
    vertices: Vec<[T; 2]>,
    vertex_circles: Vec<Option<Circle>>,
    triangles: Vec<[usize; 3]>,
    regions: Vec<Region>,
    boundary_vertices: Vec<usize>,
    interior_edges: Vec<InteriorEdge>,
    h_max: T,
    level: usize,
}

impl<T: Real> Mesh<T> {
    /// Assembles a mesh from raw parts, deriving adjacency and checking orientation.
    pub fn from_parts(
        radii: DiskRadii<T>,
        vertices: Vec<[T; 2]>,
        vertex_circles: Vec<Option<Circle>>,
        triangles: Vec<[usize; 3]>,
        regions: Vec<Region>,
        level: usize,
    ) -> Result<Self, MeshError> {
        radii.validate()?;
        if vertex_circles.len() != vertices.len() || regions.len() != triangles.len() {
            return Err(MeshError::Inconsistent("array lengths disagree".into()));
        }
        for (t, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= vertices.len()) {
                return Err(MeshError::Inconsistent(format!("triangle {t} has an invalid vertex")));
            }
            let a = signed_area(&vertices[tri[0]], &vertices[tri[1]], &vertices[tri[2]]);
            if !(a > T::zero()) {
                return Err(MeshError::Inconsistent(format!("triangle {t} has non-positive area")));
            }
        }

        let mut first_owner: HashMap<(usize, usize), (usize, [usize; 2])> = HashMap::new();
        let mut interior_edges = Vec::new();
        for (t, tri) in triangles.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                let key = (a.min(b), a.max(b));
                match first_owner.remove(&key) {
                    None => {
                        first_owner.insert(key, (t, [a, b]));
                    }
                    Some((left, dir)) => {
                        if dir != [b, a] {
                            return Err(MeshError::Inconsistent(format!("edge {key:?} is not shared consistently")));
                        }
                        interior_edges.push(InteriorEdge {
                            vertices: dir,
                            left,
                            right: t,
                            in_omega: regions[left].in_omega() && regions[t].in_omega(),
                        });
                    }
                }
            }
        }

        let mut on_boundary = vec![false; vertices.len()];
        for &(a, b) in first_owner.keys() {
            on_boundary[a] = true;
            on_boundary[b] = true;
        }
        let boundary_vertices: Vec<usize> = (0..vertices.len()).filter(|&v| on_boundary[v]).collect();

        let h_max = triangles.iter().map(|tri| diameter(&vertices, tri)).fold(T::zero(), T::max);

        Ok(Self {
            radii,
            vertices,
            vertex_circles,
            triangles,
            regions,
            boundary_vertices,
            interior_edges,
            h_max,
            level,
        })
    }

    pub fn radii(&self) -> DiskRadii<T> {
        self.radii
    }

    pub fn vertices(&self) -> &[[T; 2]] {
        &self.vertices
    }

    pub fn vertex_circles(&self) -> &[Option<Circle>] {
        &self.vertex_circles
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    /// Vertices on the outer circle, where the Dirichlet condition applies.
    pub fn boundary_vertices(&self) -> &[usize] {
        &self.boundary_vertices
    }

    pub fn interior_edges(&self) -> &[InteriorEdge] {
        &self.interior_edges
    }

    pub fn h_max(&self) -> T {
        self.h_max
    }

    pub fn refinement_level(&self) -> RefinementLevel<T> {
        RefinementLevel { level: self.level, h_max: self.h_max }
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn triangle_vertices(&self, t: usize) -> [[T; 2]; 3] {
        let tri = self.triangles[t];
        [self.vertices[tri[0]], self.vertices[tri[1]], self.vertices[tri[2]]]
    }

    pub fn triangle_area(&self, t: usize) -> T {
        let [a, b, c] = self.triangle_vertices(t);
        signed_area(&a, &b, &c)
    }

    pub fn triangle_diameter(&self, t: usize) -> T {
        diameter(&self.vertices, &self.triangles[t])
    }

    pub fn total_area(&self) -> T {
        (0..self.triangles.len()).map(|t| self.triangle_area(t)).sum()
    }

    /// Finds the triangle containing `point`.
    ///
    /// Points inside the disk but in the sliver between the outer polygon and
    /// the circle are assigned to the nearest triangle with clamped
    /// barycentric coordinates.
    pub fn locate(&self, point: [T; 2]) -> Result<Location<T>, MeshError> {
        let r = (point[0] * point[0] + point[1] * point[1]).sqrt();
        if !r.is_finite() || r > self.radii.outer + lit(LOCATE_TOL) {
            return Err(MeshError::OutsideDomain(to_f64(point[0]), to_f64(point[1])));
        }
        let tol: T = lit(LOCATE_TOL);
        let mut best: Option<(T, usize, [T; 3])> = None;
        for t in 0..self.triangles.len() {
            let bary = barycentric(&self.triangle_vertices(t), &point);
            let worst = bary.iter().copied().fold(T::infinity(), T::min);
            if worst >= -tol {
                return Ok(Location { triangle: t, barycentric: bary });
            }
            if best.is_none_or(|(w, _, _)| worst > w) {
                best = Some((worst, t, bary));
            }
        }
        let (_, t, bary) = best.ok_or_else(|| MeshError::Inconsistent("empty mesh".into()))?;
        let clamped = bary.map(|b| b.max(T::zero()));
        let s: T = clamped.iter().copied().sum();
        Ok(Location { triangle: t, barycentric: clamped.map(|b| b / s) })
    }
}

pub(crate) fn signed_area<T: Real>(a: &[T; 2], b: &[T; 2], c: &[T; 2]) -> T {
    ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1])) / lit(2.0)
}

fn dist<T: Real>(a: &[T; 2], b: &[T; 2]) -> T {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

fn diameter<T: Real>(vertices: &[[T; 2]], tri: &[usize; 3]) -> T {
    let [a, b, c] = tri.map(|v| vertices[v]);
    dist(&a, &b).max(dist(&b, &c)).max(dist(&c, &a))
}

pub(crate) fn barycentric<T: Real>(tri: &[[T; 2]; 3], p: &[T; 2]) -> [T; 3] {
    let area = signed_area(&tri[0], &tri[1], &tri[2]);
    let l0 = signed_area(p, &tri[1], &tri[2]) / area;
    let l1 = signed_area(&tri[0], p, &tri[2]) / area;
    [l0, l1, T::one() - l0 - l1]
}

/// Builds a quasi-uniform, interface-fitted ring mesh of the disk.
pub fn build_disk_mesh<T: Real>(radii: DiskRadii<T>, h_target: T) -> Result<Mesh<T>, MeshError> {
    radii.validate()?;
    if !(h_target > T::zero()) || h_target > radii.kerr {
        return Err(MeshError::MeshSizeTooLarge { h: to_f64(h_target), r0: to_f64(radii.kerr) });
    }
    let ring_spacing = h_target * lit(0.75_f64.sqrt());
    let two_pi = T::PI() + T::PI();

    let segments = [
        (T::zero(), radii.kerr, Circle::Kerr, Region::Kerr),
        (radii.kerr, radii.interface, Circle::Interface, Region::Annulus),
        (radii.interface, radii.outer, Circle::Outer, Region::Pml),
    ];

    let mut vertices = vec![[T::zero(), T::zero()]];
    let mut vertex_circles = vec![None];
    // (vertex ids of the ring, region of the band just inside the ring)
    let mut rings: Vec<(Vec<usize>, Region)> = Vec::new();
    for (lo, hi, circle, region) in segments {
        let n = ((hi - lo) / ring_spacing).ceil().to_usize().unwrap_or(1).max(1);
        for i in 1..=n {
            let rho = if i == n { hi } else { lo + (hi - lo) * T::from_usize(i).unwrap() / T::from_usize(n).unwrap() };
            let count = (two_pi * rho / h_target).ceil().to_usize().unwrap_or(6).max(6);
            let offset = if rings.len() % 2 == 1 { T::PI() / T::from_usize(count).unwrap() } else { T::zero() };
            let tag = if i == n { Some(circle) } else { None };
            let mut ids = Vec::with_capacity(count);
            for j in 0..count {
                let theta = offset + two_pi * T::from_usize(j).unwrap() / T::from_usize(count).unwrap();
                ids.push(vertices.len());
                vertices.push([rho * theta.cos(), rho * theta.sin()]);
                vertex_circles.push(tag);
            }
            rings.push((ids, region));
        }
    }

    let mut triangles = Vec::new();
    let mut regions = Vec::new();
    let (first, first_region) = &rings[0];
    for j in 0..first.len() {
        triangles.push([0, first[j], first[(j + 1) % first.len()]]);
        regions.push(*first_region);
    }
    for w in rings.windows(2) {
        let (inner, _) = &w[0];
        let (outer, region) = &w[1];
        let before = triangles.len();
        stitch_rings(&vertices, inner, outer, &mut triangles);
        regions.extend(std::iter::repeat_n(*region, triangles.len() - before));
    }

    Mesh::from_parts(radii, vertices, vertex_circles, triangles, regions, 0)
}

/// Triangulates the band between two closed rings using the shorter-diagonal rule.
fn stitch_rings<T: Real>(vertices: &[[T; 2]], inner: &[usize], outer: &[usize], triangles: &mut Vec<[usize; 3]>) {
    let (m, n) = (inner.len(), outer.len());
    let start = (0..n)
        .min_by(|&a, &b| {
            dist(&vertices[inner[0]], &vertices[outer[a]])
                .partial_cmp(&dist(&vertices[inner[0]], &vertices[outer[b]]))
                .unwrap()
        })
        .unwrap_or(0);
    let (mut i, mut j) = (0, 0);
    while i < m || j < n {
        let a = inner[i % m];
        let a_next = inner[(i + 1) % m];
        let b = outer[(start + j) % n];
        let b_next = outer[(start + j + 1) % n];
        let advance_inner = if i == m {
            false
        } else if j == n {
            true
        } else {
            dist(&vertices[a_next], &vertices[b]) < dist(&vertices[a], &vertices[b_next])
        };
        if advance_inner {
            triangles.push([a, b, a_next]);
            i += 1;
        } else {
            triangles.push([a, b, b_next]);
            j += 1;
        }
    }
}

/// Uniform 1-to-4 refinement. Midpoints of edges on a tagged circle are
/// projected radially back onto it.
pub fn refine<T: Real>(mesh: &Mesh<T>) -> Mesh<T> {
    let mut vertices = mesh.vertices.clone();
    let mut vertex_circles = mesh.vertex_circles.clone();
    let mut midpoints: HashMap<(usize, usize), usize> = HashMap::new();
    let half: T = lit(0.5);

    let mut midpoint = |a: usize, b: usize, vertices: &mut Vec<[T; 2]>, circles: &mut Vec<Option<Circle>>| {
        *midpoints.entry((a.min(b), a.max(b))).or_insert_with(|| {
            let (pa, pb) = (vertices[a], vertices[b]);
            let mut p = [(pa[0] + pb[0]) * half, (pa[1] + pb[1]) * half];
            let tag = match (circles[a], circles[b]) {
                (Some(ca), Some(cb)) if ca == cb => Some(ca),
                _ => None,
            };
            if let Some(c) = tag {
                let rho = mesh.radii.radius(c);
                let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
                p = [p[0] * rho / r, p[1] * rho / r];
            }
            vertices.push(p);
            circles.push(tag);
            vertices.len() - 1
        })
    };

    let mut triangles = Vec::with_capacity(4 * mesh.triangles.len());
    let mut regions = Vec::with_capacity(4 * mesh.triangles.len());
    for (tri, &region) in mesh.triangles.iter().zip(&mesh.regions) {
        let [a, b, c] = *tri;
        let ab = midpoint(a, b, &mut vertices, &mut vertex_circles);
        let bc = midpoint(b, c, &mut vertices, &mut vertex_circles);
        let ca = midpoint(c, a, &mut vertices, &mut vertex_circles);
        triangles.extend_from_slice(&[[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]);
        regions.extend_from_slice(&[region; 4]);
    }

    Mesh::from_parts(mesh.radii, vertices, vertex_circles, triangles, regions, mesh.level + 1)
        .expect("refinement of a valid mesh is valid")
}

/// Builds the base mesh at `h_target` and refines it `level` times.
pub fn build_refined<T: Real>(radii: DiskRadii<T>, h_target: T, level: usize) -> Result<Mesh<T>, MeshError> {
    let mut mesh = build_disk_mesh(radii, h_target)?;
    for _ in 0..level {
        mesh = refine(&mesh);
    }
    Ok(mesh)
}

/// Writes `index x y tag` node and `index v1 v2 v3 region` element files.
pub fn write_mesh<T: Real>(mesh: &Mesh<T>, nodes: &Path, elements: &Path) -> Result<(), MeshError> {
    let mut w = BufWriter::new(File::create(nodes)?);
    for (i, (p, c)) in mesh.vertices.iter().zip(&mesh.vertex_circles).enumerate() {
        writeln!(w, "{} {:.17e} {:.17e} {}", i, to_f64(p[0]), to_f64(p[1]), c.map_or(0, Circle::code))?;
    }
    w.flush()?;
    let mut w = BufWriter::new(File::create(elements)?);
    for (i, (t, r)) in mesh.triangles.iter().zip(&mesh.regions).enumerate() {
        writeln!(w, "{} {} {} {} {}", i, t[0], t[1], t[2], r.code())?;
    }
    w.flush()?;
    Ok(())
}

fn parse_fields(line: &str, n: usize, lineno: usize) -> Result<Vec<&str>, MeshError> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() != n {
        return Err(MeshError::Parse { line: lineno, msg: format!("expected {n} fields") });
    }
    Ok(fields)
}

fn parse<V: std::str::FromStr>(s: &str, lineno: usize) -> Result<V, MeshError> {
    s.parse().map_err(|_| MeshError::Parse { line: lineno, msg: format!("invalid value '{s}'") })
}

/// Reads a mesh written by [`write_mesh`]. Radii are recovered from the
/// tagged vertices.
pub fn read_mesh<T: Real>(nodes: &Path, elements: &Path) -> Result<Mesh<T>, MeshError> {
    let mut vertices = Vec::new();
    let mut circles = Vec::new();
    for (k, line) in BufReader::new(File::open(nodes)?).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let f = parse_fields(&line, 4, k + 1)?;
        if parse::<usize>(f[0], k + 1)? != vertices.len() {
            return Err(MeshError::Parse { line: k + 1, msg: "node indices must be consecutive".into() });
        }
        let x: f64 = parse(f[1], k + 1)?;
        let y: f64 = parse(f[2], k + 1)?;
        let tag = Circle::from_code(parse(f[3], k + 1)?)
            .ok_or_else(|| MeshError::Parse { line: k + 1, msg: "unknown node tag".into() })?;
        vertices.push([lit::<T>(x), lit::<T>(y)]);
        circles.push(tag);
    }
    let mut triangles = Vec::new();
    let mut regions = Vec::new();
    for (k, line) in BufReader::new(File::open(elements)?).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let f = parse_fields(&line, 5, k + 1)?;
        triangles.push([parse(f[1], k + 1)?, parse(f[2], k + 1)?, parse(f[3], k + 1)?]);
        regions.push(
            Region::from_code(parse(f[4], k + 1)?)
                .ok_or_else(|| MeshError::Parse { line: k + 1, msg: "unknown region".into() })?,
        );
    }
    let radius = |c: Circle| -> Result<T, MeshError> {
        let rs: Vec<T> = vertices
            .iter()
            .zip(&circles)
            .filter(|(_, t)| **t == Some(c))
            .map(|(p, _)| (p[0] * p[0] + p[1] * p[1]).sqrt())
            .collect();
        if rs.is_empty() {
            return Err(MeshError::Inconsistent(format!("no vertices tagged {c:?}")));
        }
        Ok(rs.iter().copied().sum::<T>() / T::from_usize(rs.len()).unwrap())
    };
    let radii = DiskRadii::new(radius(Circle::Kerr)?, radius(Circle::Interface)?, radius(Circle::Outer)?)?;
    Mesh::from_parts(radii, vertices, circles, triangles, regions, 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    const RADIUS_TOL: f64 = 1e-12;

    fn reference_mesh() -> Mesh<f64> {
        build_disk_mesh(DiskRadii::new(0.5, 1.0, 2.0).unwrap(), 0.2).unwrap()
    }

    fn radius(p: &[f64; 2]) -> f64 {
        p[0].hypot(p[1])
    }

    fn check_invariants(mesh: &Mesh<f64>) {
        let radii = mesh.radii();
        for t in 0..mesh.num_triangles() {
            assert!(mesh.triangle_area(t) > 0.0);
            let verts = mesh.triangle_vertices(t);
            // no tagged circle separates the vertices of a triangle
            for rho in [radii.kerr, radii.interface] {
                let inside = verts.iter().any(|p| radius(p) < rho - RADIUS_TOL);
                let outside = verts.iter().any(|p| radius(p) > rho + RADIUS_TOL);
                assert!(!(inside && outside), "triangle {t} crosses r = {rho}");
            }
            let bary =
                [(verts[0][0] + verts[1][0] + verts[2][0]) / 3.0, (verts[0][1] + verts[1][1] + verts[2][1]) / 3.0];
            let rb = radius(&bary);
            let expected = if rb < radii.kerr {
                Region::Kerr
            } else if rb < radii.interface {
                Region::Annulus
            } else {
                Region::Pml
            };
            assert_eq!(mesh.regions()[t], expected, "triangle {t}");
        }
        for p in mesh.vertices() {
            assert!(radius(p) <= radii.outer + RADIUS_TOL);
        }
        for (p, c) in mesh.vertices().iter().zip(mesh.vertex_circles()) {
            if let Some(c) = c {
                assert!((radius(p) - radii.radius(*c)).abs() <= RADIUS_TOL);
            }
        }
        for &v in mesh.boundary_vertices() {
            assert_eq!(mesh.vertex_circles()[v], Some(Circle::Outer));
        }
        for e in mesh.interior_edges() {
            assert_ne!(e.left, e.right);
            if e.in_omega {
                for &v in &e.vertices {
                    assert!(radius(&mesh.vertices()[v]) <= radii.interface + RADIUS_TOL);
                }
            }
        }
        // every triangle edge not on the outer circle is listed once
        let mut count: HashMap<(usize, usize), usize> = HashMap::new();
        for e in mesh.interior_edges() {
            let key = (e.vertices[0].min(e.vertices[1]), e.vertices[0].max(e.vertices[1]));
            *count.entry(key).or_default() += 1;
        }
        for tri in mesh.triangles() {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                let key = (a.min(b), a.max(b));
                let on_outer =
                    mesh.vertex_circles()[a] == Some(Circle::Outer) && mesh.vertex_circles()[b] == Some(Circle::Outer);
                if on_outer {
                    assert!(!count.contains_key(&key));
                } else {
                    assert_eq!(count.get(&key), Some(&1));
                }
            }
        }
    }

    #[test]
    fn reference_mesh_invariants() {
        let mesh = reference_mesh();
        check_invariants(&mesh);
        assert!(mesh.h_max() <= 1.5 * 0.2 && mesh.h_max() >= 0.25 * 0.2);
    }

    #[test]
    fn triangle_count_is_bounded_by_area() {
        let mesh = reference_mesh();
        let area = std::f64::consts::PI * 4.0;
        let lo = area / (0.433 * (1.5 * 0.2_f64).powi(2));
        let hi = area / (0.433 * (0.25 * 0.2_f64).powi(2));
        let n = mesh.num_triangles() as f64;
        assert!(n >= lo && n <= hi, "{n} not in [{lo}, {hi}]");
    }

    #[test]
    fn invalid_inputs() {
        assert!(matches!(DiskRadii::new(1.0, 0.5, 2.0), Err(MeshError::InvalidRadii(..))));
        let radii = DiskRadii { kerr: 1.0, interface: 0.5, outer: 2.0 };
        assert!(matches!(build_disk_mesh(radii, 0.2), Err(MeshError::InvalidRadii(..))));
        let radii = DiskRadii::new(0.5, 1.0, 2.0).unwrap();
        assert!(matches!(build_disk_mesh(radii, 0.6), Err(MeshError::MeshSizeTooLarge { .. })));
        assert!(matches!(build_disk_mesh(radii, -0.1), Err(MeshError::MeshSizeTooLarge { .. })));
    }

    #[test]
    fn refinement_splits_and_projects() {
        let mesh = reference_mesh();
        let fine = refine(&mesh);
        assert_eq!(fine.num_triangles(), 4 * mesh.num_triangles());
        check_invariants(&fine);
        assert!(fine.h_max() <= 0.55 * mesh.h_max());
        assert_eq!(fine.refinement_level().level, 1);
    }

    #[test]
    fn midpoint_of_circle_edge_lands_on_circle() {
        let theta: f64 = 0.3;
        let radii = DiskRadii::new(0.5, 1.0, 2.0).unwrap();
        let vertices = vec![[0.0, 0.0], [1.0, 0.0], [theta.cos(), theta.sin()]];
        let circles = vec![None, Some(Circle::Interface), Some(Circle::Interface)];
        let mesh = Mesh::from_parts(radii, vertices, circles, vec![[0, 1, 2]], vec![Region::Annulus], 0).unwrap();
        let fine = refine(&mesh);
        let tagged: Vec<_> =
            fine.vertices()[3..].iter().zip(&fine.vertex_circles()[3..]).filter(|(_, c)| c.is_some()).collect();
        assert_eq!(tagged.len(), 1);
        assert!((radius(tagged[0].0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn interior_mesh_size_quarters_after_two_refinements() {
        let interior_h = |m: &Mesh<f64>| {
            (0..m.num_triangles())
                .filter(|&t| m.triangles()[t].iter().all(|&v| m.vertex_circles()[v].is_none()))
                .map(|t| m.triangle_diameter(t))
                .fold(0.0, f64::max)
        };
        let mesh = reference_mesh();
        let twice = refine(&refine(&mesh));
        let ratio = interior_h(&twice) / interior_h(&mesh);
        assert!((0.24..=0.26).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn area_deficit_converges_quadratically() {
        let mesh = reference_mesh();
        let full = std::f64::consts::PI * 4.0;
        let m1 = refine(&mesh);
        let m2 = refine(&m1);
        let d0 = full - mesh.total_area();
        let d1 = full - m1.total_area();
        let d2 = full - m2.total_area();
        for (a, b) in [(d0, d1), (d1, d2)] {
            assert!((3.5..=4.5).contains(&(a / b)), "{a} / {b}");
        }
        // total area equals the area of the outer vertex polygon
        let mut ring: Vec<[f64; 2]> = mesh.boundary_vertices().iter().map(|&v| mesh.vertices()[v]).collect();
        ring.sort_by(|a, b| a[1].atan2(a[0]).partial_cmp(&b[1].atan2(b[0])).unwrap());
        let poly: f64 = (0..ring.len())
            .map(|i| {
                let (p, q) = (ring[i], ring[(i + 1) % ring.len()]);
                0.5 * (p[0] * q[1] - q[0] * p[1])
            })
            .sum();
        assert!((poly - mesh.total_area()).abs() < 1e-12 * poly);
    }

    #[test]
    fn locate_points() {
        let mesh = reference_mesh();
        let loc = mesh.locate([0.0, 0.0]).unwrap();
        assert!((loc.barycentric.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        let v = 57;
        let loc = mesh.locate(mesh.vertices()[v]).unwrap();
        let slot = mesh.triangles()[loc.triangle].iter().position(|&w| w == v).unwrap();
        for (k, b) in loc.barycentric.iter().enumerate() {
            let e = if k == slot { 1.0 } else { 0.0 };
            assert!((b - e).abs() < 1e-12);
        }
        assert!(matches!(mesh.locate([3.0, 0.0]), Err(MeshError::OutsideDomain(..))));
        // sliver between the polygon and the circle
        let loc = mesh.locate([2.0 * 0.01_f64.cos(), 2.0 * 0.01_f64.sin()]).unwrap();
        assert!(loc.barycentric.iter().all(|&b| (-1e-10..=1.0 + 1e-10).contains(&b)));
    }

    #[test]
    fn single_precision_mesh() {
        let mesh = build_disk_mesh(DiskRadii::new(0.5_f32, 1.0, 2.0).unwrap(), 0.2).unwrap();
        assert!(mesh.num_triangles() > 100);
    }
}
