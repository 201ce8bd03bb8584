use crate::error::{Error, Result};

/// A finite simple graph on vertices `0..m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleGraph {
    m: usize,
    edges: Vec<(usize, usize)>,
}

/// Shapes with closed-form homomorphism densities.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Shape {
    Edge,
    Path2,
    Triangle,
    Cycle4,
    General,
}

impl SimpleGraph {
    /// Edges are unordered; each is stored with the smaller endpoint first.
    pub fn new(m: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidGraph("a graph needs at least one vertex".into()));
        }
        let mut out: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a >= m || b >= m {
                return Err(Error::InvalidGraph(format!("edge ({a}, {b}) out of range for {m} vertices")));
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop at {a}")));
            }
            let e = (a.min(b), a.max(b));
            if out.contains(&e) {
                return Err(Error::InvalidGraph(format!("duplicate edge {e:?}")));
            }
            out.push(e);
        }
        Ok(SimpleGraph { m, edges: out })
    }

    pub fn edge() -> Self {
        SimpleGraph { m: 2, edges: vec![(0, 1)] }
    }

    /// The path with two edges (a cherry).
    pub fn path2() -> Self {
        SimpleGraph { m: 3, edges: vec![(0, 1), (1, 2)] }
    }

    pub fn triangle() -> Self {
        SimpleGraph { m: 3, edges: vec![(0, 1), (1, 2), (0, 2)] }
    }

    pub fn cycle4() -> Self {
        SimpleGraph { m: 4, edges: vec![(0, 1), (1, 2), (2, 3), (0, 3)] }
    }

    /// Built-in names: `edge`, `path2`, `triangle`, `cycle4`.
    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "edge" => Some(Self::edge()),
            "path2" => Some(Self::path2()),
            "triangle" => Some(Self::triangle()),
            "cycle4" => Some(Self::cycle4()),
            _ => None,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.m
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.m];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &(a, b) in &self.edges {
                let next = if a == v {
                    b
                } else if b == v {
                    a
                } else {
                    continue;
                };
                if !seen[next] {
                    seen[next] = true;
                    stack.push(next);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub(crate) fn shape(&self) -> Shape {
        let active = (0..self.m).filter(|&v| self.degree(v) > 0).count();
        let degs: Vec<usize> = (0..self.m).map(|v| self.degree(v)).filter(|&d| d > 0).collect();
        match (active, self.edges.len()) {
            (2, 1) => Shape::Edge,
            (3, 2) => Shape::Path2,
            (3, 3) => Shape::Triangle,
            (4, 4) if degs.iter().all(|&d| d == 2) => Shape::Cycle4,
            _ => Shape::General,
        }
    }
}
