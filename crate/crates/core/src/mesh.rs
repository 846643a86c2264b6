//! Uniform square meshes of the unit square and their 2×2 macroelements.
//!
//! Element `(i, j)` (column `i`, row `j`) has index `j n + i`. Vertical edges
//! come first, `j (n + 1) + i` for the edge at `x = i h` in row `j`; horizontal
//! edges follow, `n (n + 1) + j n + i` for the edge at `y = j h` in column `i`.
//! Vertex `(i, j)` has index `j (n + 1) + i`. Each element lists its edges as
//! left, right, bottom, top, matching the reference-square local numbering.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Vertical,
    Horizontal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub orientation: Orientation,
    pub boundary: bool,
    /// Endpoints, ordered by increasing coordinate along the edge.
    pub vertices: [usize; 2],
    /// Adjacent elements: left/below first, then right/above.
    pub elements: [Option<usize>; 2],
}

impl Edge {
    /// Fixed unit normal: `(1, 0)` for vertical edges, `(0, 1)` for horizontal ones.
    pub fn normal(&self) -> [f64; 2] {
        match self.orientation {
            Orientation::Vertical => [1.0, 0.0],
            Orientation::Horizontal => [0.0, 1.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    n: usize,
    edges: Vec<Edge>,
}

impl Mesh {
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyMesh);
        }
        let nv = n + 1;
        let mut edges = Vec::with_capacity(2 * n * nv);
        for j in 0..n {
            for i in 0..=n {
                edges.push(Edge {
                    orientation: Orientation::Vertical,
                    boundary: i == 0 || i == n,
                    vertices: [j * nv + i, (j + 1) * nv + i],
                    elements: [
                        (i > 0).then(|| j * n + i - 1),
                        (i < n).then(|| j * n + i),
                    ],
                });
            }
        }
        for j in 0..=n {
            for i in 0..n {
                edges.push(Edge {
                    orientation: Orientation::Horizontal,
                    boundary: j == 0 || j == n,
                    vertices: [j * nv + i, j * nv + i + 1],
                    elements: [
                        (j > 0).then(|| (j - 1) * n + i),
                        (j < n).then(|| j * n + i),
                    ],
                });
            }
        }
        Ok(Self { n, edges })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn num_elements(&self) -> usize {
        self.n * self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_vertices(&self) -> usize {
        (self.n + 1) * (self.n + 1)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn element_index(&self, i: usize, j: usize) -> usize {
        j * self.n + i
    }

    /// Grid position `(i, j)` of element `e`.
    pub fn element_position(&self, e: usize) -> (usize, usize) {
        (e % self.n, e / self.n)
    }

    pub fn vertical_edge(&self, i: usize, j: usize) -> usize {
        j * (self.n + 1) + i
    }

    pub fn horizontal_edge(&self, i: usize, j: usize) -> usize {
        self.n * (self.n + 1) + j * self.n + i
    }

    pub fn vertex_index(&self, i: usize, j: usize) -> usize {
        j * (self.n + 1) + i
    }

    pub fn vertex_coords(&self, v: usize) -> [f64; 2] {
        let nv = self.n + 1;
        [(v % nv) as f64 * self.h(), (v / nv) as f64 * self.h()]
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        let nv = self.n + 1;
        let (i, j) = (v % nv, v / nv);
        i == 0 || j == 0 || i == self.n || j == self.n
    }

    /// Local edges of element `e`: left, right, bottom, top.
    pub fn element_edges(&self, e: usize) -> [usize; 4] {
        let (i, j) = self.element_position(e);
        [
            self.vertical_edge(i, j),
            self.vertical_edge(i + 1, j),
            self.horizontal_edge(i, j),
            self.horizontal_edge(i, j + 1),
        ]
    }

    /// Local vertices of element `e`, counterclockwise from the lower left.
    pub fn element_vertices(&self, e: usize) -> [usize; 4] {
        let (i, j) = self.element_position(e);
        [
            self.vertex_index(i, j),
            self.vertex_index(i + 1, j),
            self.vertex_index(i + 1, j + 1),
            self.vertex_index(i, j + 1),
        ]
    }

    /// Center of element `e`.
    pub fn element_center(&self, e: usize) -> [f64; 2] {
        let (i, j) = self.element_position(e);
        let h = self.h();
        [(i as f64 + 0.5) * h, (j as f64 + 0.5) * h]
    }

    /// Physical point of the reference point `xi` in element `e`.
    pub fn map_point(&self, e: usize, xi: &[f64; 2]) -> [f64; 2] {
        let c = self.element_center(e);
        let half = 0.5 * self.h();
        [c[0] + half * xi[0], c[1] + half * xi[1]]
    }

    pub fn macroelements(&self) -> Result<Vec<Macroelement>> {
        if !self.n.is_multiple_of(2) {
            return Err(Error::OddMesh(self.n));
        }
        let m = self.n / 2;
        let mut out = Vec::with_capacity(m * m);
        for bj in 0..m {
            for bi in 0..m {
                let (i, j) = (2 * bi, 2 * bj);
                out.push(Macroelement {
                    elements: [
                        self.element_index(i, j),
                        self.element_index(i + 1, j),
                        self.element_index(i + 1, j + 1),
                        self.element_index(i, j + 1),
                    ],
                    edges: [
                        self.vertical_edge(i + 1, j),
                        self.horizontal_edge(i + 1, j + 1),
                        self.vertical_edge(i + 1, j + 1),
                        self.horizontal_edge(i, j + 1),
                    ],
                    vertex: self.vertex_index(i + 1, j + 1),
                });
            }
        }
        Ok(out)
    }
}

/// Four elements `K1..K4` counterclockwise from the lower left, the interior edges
/// `e1` (K1|K2), `e2` (K2|K3), `e3` (K3|K4), `e4` (K4|K1), and the center vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Macroelement {
    pub elements: [usize; 4],
    pub edges: [usize; 4],
    pub vertex: usize,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        let m = Mesh::uniform(1).unwrap();
        assert_eq!((m.num_elements(), m.num_edges(), m.num_vertices()), (1, 4, 4));
        let m = Mesh::uniform(2).unwrap();
        assert_eq!((m.num_elements(), m.num_edges(), m.num_vertices()), (4, 12, 9));
        let interior = (0..9).filter(|&v| !m.is_boundary_vertex(v)).count();
        assert_eq!(interior, 1);
        let m = Mesh::uniform(4).unwrap();
        assert_eq!((m.num_elements(), m.num_edges()), (16, 40));
        assert_eq!(m.macroelements().unwrap().len(), 4);
        assert!(matches!(Mesh::uniform(0), Err(Error::EmptyMesh)));
    }

    #[test]
    fn incidence_is_symmetric() {
        let m = Mesh::uniform(3).unwrap();
        for e in 0..m.num_elements() {
            let le = m.element_edges(e);
            assert_eq!(m.edge(le[0]).orientation, Orientation::Vertical);
            assert_eq!(m.edge(le[2]).orientation, Orientation::Horizontal);
            for ed in le {
                assert!(m.edge(ed).elements.contains(&Some(e)));
            }
        }
        for (id, ed) in m.edges().iter().enumerate() {
            let adj = ed.elements.iter().flatten().count();
            assert_eq!(adj, if ed.boundary { 1 } else { 2 });
            for &k in ed.elements.iter().flatten() {
                assert!(m.element_edges(k).contains(&id));
            }
        }
    }

    #[test]
    fn macroelement_layout() {
        let m = Mesh::uniform(2).unwrap();
        let macs = m.macroelements().unwrap();
        assert_eq!(macs.len(), 1);
        assert_eq!(m.vertex_coords(macs[0].vertex), [0.5, 0.5]);
        let mac = macs[0];
        let e1 = m.edge(mac.edges[0]);
        assert_eq!(e1.orientation, Orientation::Vertical);
        assert_eq!(e1.elements, [Some(mac.elements[0]), Some(mac.elements[1])]);
        let e2 = m.edge(mac.edges[1]);
        assert_eq!(e2.elements, [Some(mac.elements[1]), Some(mac.elements[2])]);
        let e3 = m.edge(mac.edges[2]);
        assert_eq!(e3.elements, [Some(mac.elements[3]), Some(mac.elements[2])]);
        let e4 = m.edge(mac.edges[3]);
        assert_eq!(e4.elements, [Some(mac.elements[0]), Some(mac.elements[3])]);

        let m4 = Mesh::uniform(4).unwrap();
        let mut seen: Vec<usize> = m4.macroelements().unwrap().iter().flat_map(|mac| mac.elements).collect();
        seen.sort();
        assert_eq!(seen, (0..16).collect::<Vec<_>>());
        assert!(matches!(Mesh::uniform(3).unwrap().macroelements(), Err(Error::OddMesh(3))));
    }
}
