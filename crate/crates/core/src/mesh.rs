//! Triangular meshes of planar domains with tagged boundary facets.

use std::collections::HashMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use crate::error::{Error, Result};

pub type Point2 = [f64; 2];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ElasticTag {
    Dirichlet,
    Neumann,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NutrientTag {
    Dirichlet,
    Neumann,
}

impl fmt::Display for ElasticTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Dirichlet => "elastic_dirichlet",
            Self::Neumann => "elastic_neumann",
        })
    }
}

impl fmt::Display for NutrientTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Dirichlet => "nutrient_dirichlet",
            Self::Neumann => "nutrient_neumann",
        })
    }
}

impl FromStr for ElasticTag {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "elastic_dirichlet" => Ok(Self::Dirichlet),
            "elastic_neumann" => Ok(Self::Neumann),
            other => Err(format!("unknown elastic tag `{other}`")),
        }
    }
}

impl FromStr for NutrientTag {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "nutrient_dirichlet" => Ok(Self::Dirichlet),
            "nutrient_neumann" => Ok(Self::Neumann),
            other => Err(format!("unknown nutrient tag `{other}`")),
        }
    }
}

/// A boundary edge, oriented counter-clockwise with respect to its cell.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryFacet {
    pub vertices: [usize; 2],
    pub elastic: ElasticTag,
    pub nutrient: NutrientTag,
    pub cell: usize,
    /// Outward unit normal.
    pub normal: Point2,
    pub length: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    vertices: Vec<Point2>,
    cells: Vec<[usize; 3]>,
    facets: Vec<BoundaryFacet>,
}

fn polygon_area(p: &[Point2; 3]) -> f64 {
    0.5 * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]))
}

impl Mesh {
    /// Validates and builds a mesh. Facets may be given in either orientation;
    /// they must cover the boundary edges exactly once.
    pub fn new(
        vertices: Vec<Point2>,
        cells: Vec<[usize; 3]>,
        facets: Vec<([usize; 2], ElasticTag, NutrientTag)>,
    ) -> Result<Self> {
        let nv = vertices.len();
        if vertices
            .iter()
            .any(|p| !p[0].is_finite() || !p[1].is_finite())
        {
            return Err(Error::InvalidMesh("non-finite vertex coordinate".into()));
        }
        // Oriented boundary edges: (a, b) appears in a CCW cell traversal
        // while (b, a) does not.
        let mut edges: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
        for (c, cell) in cells.iter().enumerate() {
            if cell.iter().any(|&v| v >= nv) {
                return Err(Error::InvalidMesh(format!(
                    "cell {c} references a missing vertex"
                )));
            }
            let p = [vertices[cell[0]], vertices[cell[1]], vertices[cell[2]]];
            let area = polygon_area(&p);
            if !(area > 0.0) {
                return Err(Error::InvalidMesh(format!(
                    "cell {c} is not positively oriented (area {area:e})"
                )));
            }
            for k in 0..3 {
                let (a, b) = (cell[k], cell[(k + 1) % 3]);
                let key = (a.min(b), a.max(b));
                let entry = edges.entry(key).or_insert((0, c));
                entry.0 += 1;
                if entry.0 > 2 {
                    return Err(Error::InvalidMesh(format!(
                        "edge {key:?} shared by more than two cells"
                    )));
                }
                if entry.0 == 1 {
                    entry.1 = c;
                }
            }
        }
        let boundary: HashMap<(usize, usize), usize> = edges
            .into_iter()
            .filter(|(_, (count, _))| *count == 1)
            .map(|(k, (_, c))| (k, c))
            .collect();
        let mut seen = HashMap::new();
        let mut out = Vec::with_capacity(facets.len());
        for (idx, (verts, elastic, nutrient)) in facets.into_iter().enumerate() {
            let key = (verts[0].min(verts[1]), verts[0].max(verts[1]));
            let Some(&cell) = boundary.get(&key) else {
                return Err(Error::InvalidMesh(format!(
                    "facet {idx} {verts:?} is not a boundary edge"
                )));
            };
            if seen.insert(key, idx).is_some() {
                return Err(Error::InvalidMesh(format!("facet {verts:?} listed twice")));
            }
            let cv = cells[cell];
            let k = cv.iter().position(|&v| v == key.0).unwrap();
            let oriented = if cv[(k + 1) % 3] == key.1 {
                [key.0, key.1]
            } else {
                [key.1, key.0]
            };
            let (p, q) = (vertices[oriented[0]], vertices[oriented[1]]);
            let (dx, dy) = (q[0] - p[0], q[1] - p[1]);
            let length = dx.hypot(dy);
            out.push(BoundaryFacet {
                vertices: oriented,
                elastic,
                nutrient,
                cell,
                normal: [dy / length, -dx / length],
                length,
            });
        }
        if seen.len() != boundary.len() {
            return Err(Error::InvalidMesh(format!(
                "{} boundary edges carry no tags",
                boundary.len() - seen.len()
            )));
        }
        if !out.iter().any(|f| f.elastic == ElasticTag::Dirichlet) {
            return Err(Error::InvalidTagRule(
                "the elastic Dirichlet boundary must be non-empty".into(),
            ));
        }
        Ok(Self {
            vertices,
            cells,
            facets: out,
        })
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn cells(&self) -> &[[usize; 3]] {
        &self.cells
    }

    pub fn facets(&self) -> &[BoundaryFacet] {
        &self.facets
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn cell_points(&self, c: usize) -> [Point2; 3] {
        let cell = self.cells[c];
        [
            self.vertices[cell[0]],
            self.vertices[cell[1]],
            self.vertices[cell[2]],
        ]
    }

    pub fn cell_area(&self, c: usize) -> f64 {
        polygon_area(&self.cell_points(c))
    }

    pub fn total_area(&self) -> f64 {
        (0..self.num_cells()).map(|c| self.cell_area(c)).sum()
    }

    /// Constant gradients of the three P1 shape functions on cell `c`.
    pub fn shape_gradients(&self, c: usize) -> [Point2; 3] {
        let p = self.cell_points(c);
        let two_area = 2.0 * polygon_area(&p);
        let mut g = [[0.0; 2]; 3];
        for k in 0..3 {
            let a = p[(k + 1) % 3];
            let b = p[(k + 2) % 3];
            g[k] = [(a[1] - b[1]) / two_area, (b[0] - a[0]) / two_area];
        }
        g
    }

    /// Sorted vertices on elastic Dirichlet facets (mixed corners included).
    pub fn elastic_dirichlet_nodes(&self) -> Vec<usize> {
        self.nodes_where(|f| f.elastic == ElasticTag::Dirichlet)
    }

    pub fn nutrient_dirichlet_nodes(&self) -> Vec<usize> {
        self.nodes_where(|f| f.nutrient == NutrientTag::Dirichlet)
    }

    fn nodes_where(&self, pred: impl Fn(&BoundaryFacet) -> bool) -> Vec<usize> {
        let mut nodes: Vec<usize> = self
            .facets
            .iter()
            .filter(|f| pred(f))
            .flat_map(|f| f.vertices)
            .collect();
        nodes.sort_unstable();
        nodes.dedup();
        nodes
    }

    /// Largest interior angle over all cells, in radians.
    pub fn max_angle(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for c in 0..self.num_cells() {
            let p = self.cell_points(c);
            for k in 0..3 {
                let o = p[k];
                let a = p[(k + 1) % 3];
                let b = p[(k + 2) % 3];
                let u = [a[0] - o[0], a[1] - o[1]];
                let v = [b[0] - o[0], b[1] - o[1]];
                let cos = (u[0] * v[0] + u[1] * v[1]) / (u[0].hypot(u[1]) * v[0].hypot(v[1]));
                worst = worst.max(cos.clamp(-1.0, 1.0).acos());
            }
        }
        worst
    }

    /// No obtuse angles: the regime where P1 reaction-diffusion solutions
    /// inherit non-negativity from their data.
    pub fn is_delaunay_type(&self) -> bool {
        self.max_angle() <= std::f64::consts::FRAC_PI_2 + 1e-12
    }

    /// Largest cell diameter.
    pub fn mesh_size(&self) -> f64 {
        let mut h: f64 = 0.0;
        for c in 0..self.num_cells() {
            let p = self.cell_points(c);
            for k in 0..3 {
                let (a, b) = (p[k], p[(k + 1) % 3]);
                h = h.max((a[0] - b[0]).hypot(a[1] - b[1]));
            }
        }
        h
    }
}

/// Axis-aligned box `[x0, x1] x [y0, y1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub const UNIT: Rect = Rect {
        x0: 0.0,
        x1: 1.0,
        y0: 0.0,
        y1: 1.0,
    };
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Triangulation {
    /// Four triangles per square around a centre vertex.
    Crossed,
    /// Two triangles per square split along the rising diagonal.
    Diagonal,
}

impl FromStr for Triangulation {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "crossed" => Ok(Self::Crossed),
            "diagonal" => Ok(Self::Diagonal),
            other => Err(format!("unknown triangulation `{other}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
    Bottom,
    Top,
}

/// Per-side boundary tags for rectangle meshes, indexed left, right, bottom, top.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TagRule {
    pub elastic: [ElasticTag; 4],
    pub nutrient: [NutrientTag; 4],
}

impl TagRule {
    pub fn all_dirichlet() -> Self {
        Self {
            elastic: [ElasticTag::Dirichlet; 4],
            nutrient: [NutrientTag::Dirichlet; 4],
        }
    }

    /// Left edge clamped, the rest traction boundary; nutrient Dirichlet everywhere.
    pub fn left_clamped() -> Self {
        Self {
            elastic: [
                ElasticTag::Dirichlet,
                ElasticTag::Neumann,
                ElasticTag::Neumann,
                ElasticTag::Neumann,
            ],
            nutrient: [NutrientTag::Dirichlet; 4],
        }
    }

    pub fn with_nutrient(mut self, nutrient: [NutrientTag; 4]) -> Self {
        self.nutrient = nutrient;
        self
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "all_dirichlet" => Some(Self::all_dirichlet()),
            "left_clamped" => Some(Self::left_clamped()),
            _ => None,
        }
    }

    fn index(side: Side) -> usize {
        match side {
            Side::Left => 0,
            Side::Right => 1,
            Side::Bottom => 2,
            Side::Top => 3,
        }
    }

    pub fn tags(&self, side: Side) -> (ElasticTag, NutrientTag) {
        let k = Self::index(side);
        (self.elastic[k], self.nutrient[k])
    }
}

/// Structured triangulation of `extent` with `nx x ny` squares.
pub fn build_rectangle_mesh(
    nx: usize,
    ny: usize,
    extent: Rect,
    mode: Triangulation,
    rule: &TagRule,
) -> Result<Mesh> {
    if nx == 0 || ny == 0 {
        return Err(Error::InvalidMesh("nx and ny must be at least 1".into()));
    }
    if !(extent.x1 > extent.x0 && extent.y1 > extent.y0) {
        return Err(Error::InvalidMesh(format!("empty extent {extent:?}")));
    }
    if !rule.elastic.contains(&ElasticTag::Dirichlet) {
        return Err(Error::InvalidTagRule(
            "the elastic Dirichlet boundary must be non-empty".into(),
        ));
    }
    let hx = (extent.x1 - extent.x0) / nx as f64;
    let hy = (extent.y1 - extent.y0) / ny as f64;
    let xs = |i: usize| {
        if i == nx {
            extent.x1
        } else {
            extent.x0 + i as f64 * hx
        }
    };
    let ys = |j: usize| {
        if j == ny {
            extent.y1
        } else {
            extent.y0 + j as f64 * hy
        }
    };

    // Row-by-row numbering (grid row, then its centre row) keeps the
    // bandwidth proportional to nx.
    let stride = match mode {
        Triangulation::Crossed => 2 * nx + 1,
        Triangulation::Diagonal => nx + 1,
    };
    let grid = |i: usize, j: usize| j * stride + i;
    let centre = |i: usize, j: usize| j * stride + nx + 1 + i;

    let mut vertices = Vec::new();
    for j in 0..=ny {
        for i in 0..=nx {
            vertices.push([xs(i), ys(j)]);
        }
        if mode == Triangulation::Crossed && j < ny {
            for i in 0..nx {
                vertices.push([
                    extent.x0 + (i as f64 + 0.5) * hx,
                    extent.y0 + (j as f64 + 0.5) * hy,
                ]);
            }
        }
    }

    let mut cells = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let (a, b, c, d) = (
                grid(i, j),
                grid(i + 1, j),
                grid(i + 1, j + 1),
                grid(i, j + 1),
            );
            match mode {
                Triangulation::Crossed => {
                    let m = centre(i, j);
                    cells.extend_from_slice(&[[a, b, m], [b, c, m], [c, d, m], [d, a, m]]);
                }
                Triangulation::Diagonal => {
                    cells.extend_from_slice(&[[a, b, c], [a, c, d]]);
                }
            }
        }
    }

    let mut facets = Vec::new();
    let mut push = |verts: [usize; 2], side: Side| {
        let (e, n) = rule.tags(side);
        facets.push((verts, e, n));
    };
    for i in 0..nx {
        push([grid(i, 0), grid(i + 1, 0)], Side::Bottom);
    }
    for j in 0..ny {
        push([grid(nx, j), grid(nx, j + 1)], Side::Right);
    }
    for i in (0..nx).rev() {
        push([grid(i + 1, ny), grid(i, ny)], Side::Top);
    }
    for j in (0..ny).rev() {
        push([grid(0, j + 1), grid(0, j)], Side::Left);
    }
    Mesh::new(vertices, cells, facets)
}

/// Writes the ASCII mesh format; coordinates use 17 significant digits.
pub fn write_mesh(mesh: &Mesh, mut w: impl Write) -> Result<()> {
    writeln!(w, "dim 2")?;
    writeln!(w, "vertices {}", mesh.num_vertices())?;
    for p in mesh.vertices() {
        writeln!(w, "{:.16e} {:.16e}", p[0], p[1])?;
    }
    writeln!(w, "cells {}", mesh.num_cells())?;
    for c in mesh.cells() {
        writeln!(w, "{} {} {}", c[0], c[1], c[2])?;
    }
    writeln!(w, "boundary_facets {}", mesh.facets().len())?;
    for f in mesh.facets() {
        writeln!(
            w,
            "{} {} {} {}",
            f.vertices[0], f.vertices[1], f.elastic, f.nutrient
        )?;
    }
    Ok(())
}

struct LineReader<R> {
    inner: R,
    line: usize,
}

impl<R: BufRead> LineReader<R> {
    fn next_tokens(&mut self) -> Result<Vec<String>> {
        loop {
            let mut buf = String::new();
            self.line += 1;
            if self.inner.read_line(&mut buf)? == 0 {
                return Err(self.err("unexpected end of file"));
            }
            let content = buf.split('#').next().unwrap_or("").trim();
            if !content.is_empty() {
                return Ok(content.split_whitespace().map(str::to_owned).collect());
            }
        }
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            message: message.into(),
        }
    }

    fn header(&mut self, key: &str) -> Result<usize> {
        let t = self.next_tokens()?;
        if t.len() != 2 || t[0] != key {
            return Err(self.err(format!("expected `{key} <count>`")));
        }
        t[1].parse()
            .map_err(|_| self.err(format!("bad count `{}`", t[1])))
    }

    fn parse<T: FromStr>(&self, tok: &str) -> Result<T> {
        tok.parse()
            .map_err(|_| self.err(format!("cannot parse `{tok}`")))
    }
}

/// Reads the format produced by [`write_mesh`].
pub fn read_mesh(r: impl BufRead) -> Result<Mesh> {
    let mut lr = LineReader { inner: r, line: 0 };
    let dim = lr.header("dim")?;
    if dim != 2 {
        return Err(lr.err(format!("only dim 2 meshes are supported, got {dim}")));
    }
    let nv = lr.header("vertices")?;
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let t = lr.next_tokens()?;
        if t.len() != 2 {
            return Err(lr.err("expected two coordinates"));
        }
        vertices.push([lr.parse(&t[0])?, lr.parse(&t[1])?]);
    }
    let nc = lr.header("cells")?;
    let mut cells = Vec::with_capacity(nc);
    for _ in 0..nc {
        let t = lr.next_tokens()?;
        if t.len() != 3 {
            return Err(lr.err("expected three vertex indices"));
        }
        cells.push([lr.parse(&t[0])?, lr.parse(&t[1])?, lr.parse(&t[2])?]);
    }
    let nf = lr.header("boundary_facets")?;
    let mut facets = Vec::with_capacity(nf);
    for _ in 0..nf {
        let t = lr.next_tokens()?;
        if t.len() != 4 {
            return Err(lr.err("expected two vertex indices and two tags"));
        }
        let e: ElasticTag = t[2].parse().map_err(|m: String| lr.err(m))?;
        let n: NutrientTag = t[3].parse().map_err(|m: String| lr.err(m))?;
        facets.push(([lr.parse(&t[0])?, lr.parse(&t[1])?], e, n));
    }
    Mesh::new(vertices, cells, facets)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_square_counts() {
        let crossed = build_rectangle_mesh(
            1,
            1,
            Rect::UNIT,
            Triangulation::Crossed,
            &TagRule::all_dirichlet(),
        )
        .unwrap();
        assert_eq!((crossed.num_cells(), crossed.num_vertices()), (4, 5));
        let diag = build_rectangle_mesh(
            1,
            1,
            Rect::UNIT,
            Triangulation::Diagonal,
            &TagRule::all_dirichlet(),
        )
        .unwrap();
        assert_eq!((diag.num_cells(), diag.num_vertices()), (2, 4));
    }

    #[test]
    fn all_dirichlet_rule_tags_everything() {
        let m = build_rectangle_mesh(
            3,
            2,
            Rect::UNIT,
            Triangulation::Crossed,
            &TagRule::all_dirichlet(),
        )
        .unwrap();
        assert_eq!(m.facets().len(), 10);
        assert!(m
            .facets()
            .iter()
            .all(|f| f.elastic == ElasticTag::Dirichlet));
    }

    #[test]
    fn areas_sum_to_domain() {
        let m = build_rectangle_mesh(
            8,
            8,
            Rect::UNIT,
            Triangulation::Crossed,
            &TagRule::left_clamped(),
        )
        .unwrap();
        assert!((m.total_area() - 1.0).abs() < 1e-12);
        let r = Rect {
            x0: -1.0,
            x1: 2.0,
            y0: 0.5,
            y1: 1.5,
        };
        let m = build_rectangle_mesh(5, 7, r, Triangulation::Diagonal, &TagRule::left_clamped())
            .unwrap();
        assert!((m.total_area() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn normals_point_outward() {
        let m = build_rectangle_mesh(
            4,
            4,
            Rect::UNIT,
            Triangulation::Crossed,
            &TagRule::all_dirichlet(),
        )
        .unwrap();
        for f in m.facets() {
            let p = m.vertices()[f.vertices[0]];
            let q = m.vertices()[f.vertices[1]];
            let mid = [(p[0] + q[0]) / 2.0, (p[1] + q[1]) / 2.0];
            let probe = [mid[0] + 1e-3 * f.normal[0], mid[1] + 1e-3 * f.normal[1]];
            let inside = (0.0..=1.0).contains(&probe[0]) && (0.0..=1.0).contains(&probe[1]);
            assert!(!inside, "normal {:?} at {mid:?}", f.normal);
            assert!((f.length - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn empty_dirichlet_rule_rejected() {
        let rule = TagRule {
            elastic: [ElasticTag::Neumann; 4],
            nutrient: [NutrientTag::Dirichlet; 4],
        };
        let err = build_rectangle_mesh(2, 2, Rect::UNIT, Triangulation::Crossed, &rule);
        assert!(matches!(err, Err(Error::InvalidTagRule(_))));
    }

    #[test]
    fn mixed_corners_are_dirichlet() {
        let m = build_rectangle_mesh(
            2,
            2,
            Rect::UNIT,
            Triangulation::Diagonal,
            &TagRule::left_clamped(),
        )
        .unwrap();
        let nodes = m.elastic_dirichlet_nodes();
        assert_eq!(nodes.len(), 3);
        assert!(nodes.iter().all(|&n| m.vertices()[n][0] == 0.0));
    }

    #[test]
    fn crossed_mesh_is_delaunay_type() {
        let m = build_rectangle_mesh(
            4,
            4,
            Rect::UNIT,
            Triangulation::Crossed,
            &TagRule::all_dirichlet(),
        )
        .unwrap();
        assert!(m.is_delaunay_type());
        let d = build_rectangle_mesh(
            4,
            4,
            Rect::UNIT,
            Triangulation::Diagonal,
            &TagRule::all_dirichlet(),
        )
        .unwrap();
        assert!(d.is_delaunay_type());
    }

    #[test]
    fn rejects_inverted_cells_and_untagged_edges() {
        let v = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let f = vec![
            ([0, 1], ElasticTag::Dirichlet, NutrientTag::Dirichlet),
            ([1, 2], ElasticTag::Dirichlet, NutrientTag::Dirichlet),
            ([2, 0], ElasticTag::Dirichlet, NutrientTag::Dirichlet),
        ];
        assert!(Mesh::new(v.clone(), vec![[0, 2, 1]], f.clone()).is_err());
        assert!(Mesh::new(v.clone(), vec![[0, 1, 2]], f[..2].to_vec()).is_err());
        assert!(Mesh::new(v, vec![[0, 1, 2]], f).is_ok());
    }

    #[test]
    fn file_round_trip_is_bit_exact() {
        let r = Rect {
            x0: 0.1,
            x1: 0.7,
            y0: -0.3,
            y1: 1.0 / 3.0,
        };
        let m = build_rectangle_mesh(3, 5, r, Triangulation::Crossed, &TagRule::left_clamped())
            .unwrap();
        let mut buf = Vec::new();
        write_mesh(&m, &mut buf).unwrap();
        let back = read_mesh(std::io::Cursor::new(&buf)).unwrap();
        assert_eq!(back, m);
        let mut buf2 = Vec::new();
        write_mesh(&back, &mut buf2).unwrap();
        assert_eq!(buf, buf2);
    }

    #[test]
    fn malformed_file_reports_line() {
        let text = "dim 2\nvertices 1\n0.0 abc\n";
        match read_mesh(std::io::Cursor::new(text)) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }
}
