//! Combinatorial structure of a closed pseudo 3-manifold.
//!
//! A triangulation is a finite set of tetrahedra whose faces are glued in
//! pairs. For the curvature and flow pipeline only the induced edge classes
//! matter, so a [`Triangulation`] stores, for every tetrahedron, the edge class
//! of each of its six local edges together with the class valences.
//!
//! Local vertices are numbered `0..4` and local edges follow the fixed order
//! `(01, 02, 03, 12, 13, 23)`, which is the 1-based order `(12, 13, 14, 23,
//! 24, 34)`. A face is identified by the local vertex opposite to it.

mod dsu;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use dsu::DisjointSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TriangulationError {
    #[error("triangulation has no tetrahedra")]
    Empty,
    #[error("edge class indices are not contiguous: class {missing} is never used")]
    NonContiguous { missing: usize },
    #[error("edge class index {index} out of range (edge class count is {count})")]
    ClassOutOfRange { index: usize, count: usize },
    #[error("tetrahedron index {index} out of range (tetrahedron count is {count})")]
    TetOutOfRange { index: usize, count: usize },
    #[error("face index {face} out of range, faces are numbered 0..4")]
    FaceOutOfRange { face: usize },
    #[error("face {face} of tetrahedron {tet} is glued more than once")]
    FaceGluedTwice { tet: usize, face: usize },
    #[error("face {face} of tetrahedron {tet} is not glued")]
    FaceUnglued { tet: usize, face: usize },
    #[error("invalid vertex map on face {face} of tetrahedron {tet}: {reason}")]
    InvalidVertexMap {
        tet: usize,
        face: usize,
        reason: String,
    },
}

/// One of the six edges of a tetrahedron, in the fixed local order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LocalEdge {
    E12,
    E13,
    E14,
    E23,
    E24,
    E34,
}

impl LocalEdge {
    pub const ALL: [LocalEdge; 6] = [
        LocalEdge::E12,
        LocalEdge::E13,
        LocalEdge::E14,
        LocalEdge::E23,
        LocalEdge::E24,
        LocalEdge::E34,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<Self> {
        Self::ALL.get(index).copied()
    }

    /// Endpoints as 0-based local vertices, smaller first.
    pub fn vertices(self) -> (usize, usize) {
        match self {
            LocalEdge::E12 => (0, 1),
            LocalEdge::E13 => (0, 2),
            LocalEdge::E14 => (0, 3),
            LocalEdge::E23 => (1, 2),
            LocalEdge::E24 => (1, 3),
            LocalEdge::E34 => (2, 3),
        }
    }

    pub fn from_vertices(a: usize, b: usize) -> Option<Self> {
        let key = if a < b { (a, b) } else { (b, a) };
        Self::ALL.into_iter().find(|e| e.vertices() == key)
    }

    /// The edge sharing no vertex with `self`.
    pub fn opposite(self) -> Self {
        Self::ALL[5 - self.index()]
    }
}

/// An ordering `(e1, ..., e6)` of the edges of one tetrahedron in which
/// `(e_i, e_{i+3})` are opposite for `i = 1, 2, 3`, the edges `e1, e2, e3`
/// share a vertex, and `e4, e5, e6` therefore bound the face opposite that
/// vertex. The two faces containing `e1` are `{e1, e2, e6}` and
/// `{e1, e3, e5}`, which is the layout the `phi` formula reads.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EdgeOrientation {
    edges: [LocalEdge; 6],
}

impl EdgeOrientation {
    /// Validates an arbitrary ordering against the orientation rules.
    pub fn new(edges: [LocalEdge; 6]) -> Option<Self> {
        let mut seen = [false; 6];
        for e in edges {
            if std::mem::replace(&mut seen[e.index()], true) {
                return None;
            }
        }
        for i in 0..3 {
            if edges[i].opposite() != edges[i + 3] {
                return None;
            }
        }
        let (a, b) = edges[0].vertices();
        let pivot_ok = |v| shares_vertex(edges[1], v) && shares_vertex(edges[2], v);
        (pivot_ok(a) || pivot_ok(b)).then_some(Self { edges })
    }

    pub fn edges(&self) -> [LocalEdge; 6] {
        self.edges
    }

    pub fn get(&self, position: usize) -> LocalEdge {
        self.edges[position]
    }

    /// Reads a per-local-edge vector in orientation order.
    pub fn permute<T: Copy>(&self, values: &[T; 6]) -> [T; 6] {
        self.edges.map(|e| values[e.index()])
    }
}

fn shares_vertex(edge: LocalEdge, v: usize) -> bool {
    let (a, b) = edge.vertices();
    a == v || b == v
}

/// Canonical orientation with `e1 = edge`.
///
/// For `e1 = {i, j}` with `i < j` the pivot vertex is `i`; with `k < h` the
/// remaining vertices the result is `(ij, ik, ih, kh, jh, jk)`.
pub fn orientation_at(edge: LocalEdge) -> EdgeOrientation {
    let (i, j) = edge.vertices();
    let mut rest = (0..4).filter(|&v| v != i && v != j);
    let k = rest.next().unwrap();
    let h = rest.next().unwrap();
    let e = |a, b| LocalEdge::from_vertices(a, b).unwrap();
    EdgeOrientation {
        edges: [e(i, j), e(i, k), e(i, h), e(k, h), e(j, h), e(j, k)],
    }
}

/// Identification of face `face` of tetrahedron `tet` with face `to_face` of
/// tetrahedron `to_tet`. The vertices of the source face, in increasing
/// order, are sent to `vertex_map[0..3]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceGluing {
    pub tet: usize,
    pub face: usize,
    pub to_tet: usize,
    pub to_face: usize,
    pub vertex_map: [usize; 3],
}

impl FaceGluing {
    fn source_vertices(&self) -> [usize; 3] {
        face_vertices(self.face)
    }

    /// Image of a source-face vertex, `None` if `v` is not on the source face.
    pub fn map_vertex(&self, v: usize) -> Option<usize> {
        self.source_vertices()
            .iter()
            .position(|&s| s == v)
            .map(|k| self.vertex_map[k])
    }

    /// The same identification read from the target face back to the source.
    pub fn reverse(&self) -> FaceGluing {
        let src = self.source_vertices();
        let dst = face_vertices(self.to_face);
        let vertex_map = dst.map(|w| {
            let k = self.vertex_map.iter().position(|&m| m == w).unwrap_or(0);
            src[k]
        });
        FaceGluing {
            tet: self.to_tet,
            face: self.to_face,
            to_tet: self.tet,
            to_face: self.face,
            vertex_map,
        }
    }

    fn validate(&self, tet_count: usize) -> Result<(), TriangulationError> {
        for &t in &[self.tet, self.to_tet] {
            if t >= tet_count {
                return Err(TriangulationError::TetOutOfRange {
                    index: t,
                    count: tet_count,
                });
            }
        }
        for &f in &[self.face, self.to_face] {
            if f >= 4 {
                return Err(TriangulationError::FaceOutOfRange { face: f });
            }
        }
        let bad = |reason: &str| TriangulationError::InvalidVertexMap {
            tet: self.tet,
            face: self.face,
            reason: reason.to_owned(),
        };
        if self.tet == self.to_tet && self.face == self.to_face {
            return Err(bad("a face cannot be glued to itself"));
        }
        let mut seen = [false; 4];
        for &v in &self.vertex_map {
            if v >= 4 || v == self.to_face {
                return Err(bad("image is not a vertex of the target face"));
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(bad("vertex map is not a bijection"));
            }
        }
        Ok(())
    }
}

fn face_vertices(face: usize) -> [usize; 3] {
    let mut out = [0; 3];
    for (slot, v) in out.iter_mut().zip((0..4).filter(|&v| v != face)) {
        *slot = v;
    }
    out
}

/// Edge-class structure of a closed pseudo 3-manifold.
#[derive(Clone, Debug, PartialEq)]
pub struct Triangulation {
    labels: Vec<[usize; 6]>,
    valences: Vec<usize>,
    gluings: Option<Vec<FaceGluing>>,
}

impl Triangulation {
    /// Builds directly from per-tetrahedron edge-class labels. No check is made
    /// that the labels come from an actual face pairing.
    pub fn from_edge_labels(labels: Vec<[usize; 6]>) -> Result<Self, TriangulationError> {
        if labels.is_empty() {
            return Err(TriangulationError::Empty);
        }
        let count = labels.iter().flatten().copied().max().unwrap_or(0) + 1;
        let mut valences = vec![0usize; count];
        for &c in labels.iter().flatten() {
            valences[c] += 1;
        }
        if let Some(missing) = valences.iter().position(|&v| v == 0) {
            return Err(TriangulationError::NonContiguous { missing });
        }
        Ok(Self {
            labels,
            valences,
            gluings: None,
        })
    }

    /// Builds from face gluings. Edge classes are the orbits of edge instances
    /// under the gluing maps, numbered in order of first appearance
    /// (tetrahedron-major, local edge order).
    pub fn from_gluings(
        tet_count: usize,
        gluings: Vec<FaceGluing>,
    ) -> Result<Self, TriangulationError> {
        if tet_count == 0 {
            return Err(TriangulationError::Empty);
        }
        let mut used = vec![false; 4 * tet_count];
        for g in &gluings {
            g.validate(tet_count)?;
            for (t, f) in [(g.tet, g.face), (g.to_tet, g.to_face)] {
                if std::mem::replace(&mut used[4 * t + f], true) {
                    return Err(TriangulationError::FaceGluedTwice { tet: t, face: f });
                }
            }
        }
        if let Some(slot) = used.iter().position(|&u| !u) {
            return Err(TriangulationError::FaceUnglued {
                tet: slot / 4,
                face: slot % 4,
            });
        }

        let mut dsu = DisjointSet::new(6 * tet_count);
        for g in &gluings {
            let src = g.source_vertices();
            for (a, b) in [(src[0], src[1]), (src[0], src[2]), (src[1], src[2])] {
                let from = LocalEdge::from_vertices(a, b).unwrap();
                let (ma, mb) = (g.map_vertex(a).unwrap(), g.map_vertex(b).unwrap());
                let to = LocalEdge::from_vertices(ma, mb).unwrap();
                dsu.union(6 * g.tet + from.index(), 6 * g.to_tet + to.index());
            }
        }

        let mut class_of_root = vec![usize::MAX; 6 * tet_count];
        let mut next = 0;
        let mut labels = vec![[0usize; 6]; tet_count];
        for (t, row) in labels.iter_mut().enumerate() {
            for (e, slot) in row.iter_mut().enumerate() {
                let root = dsu.find(6 * t + e);
                if class_of_root[root] == usize::MAX {
                    class_of_root[root] = next;
                    next += 1;
                }
                *slot = class_of_root[root];
            }
        }
        let mut tri = Self::from_edge_labels(labels)?;
        tri.gluings = Some(gluings);
        Ok(tri)
    }

    pub fn tet_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_class_count(&self) -> usize {
        self.valences.len()
    }

    pub fn labels(&self) -> &[[usize; 6]] {
        &self.labels
    }

    pub fn valences(&self) -> &[usize] {
        &self.valences
    }

    pub fn valence(&self, class: usize) -> Result<usize, TriangulationError> {
        self.valences
            .get(class)
            .copied()
            .ok_or(TriangulationError::ClassOutOfRange {
                index: class,
                count: self.valences.len(),
            })
    }

    pub fn min_valence(&self) -> usize {
        self.valences.iter().copied().min().unwrap_or(0)
    }

    /// Face gluings the triangulation was built from, if any. They are kept
    /// for reference and not used by the curvature pipeline.
    pub fn gluings(&self) -> Option<&[FaceGluing]> {
        self.gluings.as_deref()
    }

    /// Lengths of the six local edges of tetrahedron `tet` under a per-class
    /// length vector.
    pub fn pull_back(&self, tet: usize, class_values: &[f64]) -> [f64; 6] {
        self.labels[tet].map(|c| class_values[c])
    }
}
