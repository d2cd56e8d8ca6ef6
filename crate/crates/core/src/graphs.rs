//! Directed graphs with loops, their monomial edge listings, and the two
//! transformations that send graphs on `n` vertices to functional graphs on `n²`
//! (`T`) or `n² + 2` (`T_f`) vertices.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::cyclotomic::CycloRational;
use crate::error::{Error, Result};
use crate::listings::{content_lines, parse_usizes, FunctionTable};
use crate::multipoly::{Monomial, MultiPoly};

/// Binary adjacency matrix; entry `(i, j)` is the edge `i → j`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Graph {
    n: usize,
    adj: Vec<bool>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            adj: vec![false; n * n],
        }
    }

    /// All `n²` ordered pairs, loops included.
    pub fn totally_complete(n: usize) -> Self {
        Graph {
            n,
            adj: vec![true; n * n],
        }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = Graph::empty(n);
        for (i, j) in edges {
            if i >= n || j >= n {
                return Err(Error::Domain(format!("edge ({i},{j}) outside Z_{n}")));
            }
            g.set_edge(i, j, true);
        }
        Ok(g)
    }

    /// Row-major bits, `n²` of them.
    pub fn from_bits(n: usize, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != n * n {
            return Err(Error::DimensionMismatch(format!(
                "{} adjacency bits for {n} vertices",
                bits.len()
            )));
        }
        Ok(Graph { n, adj: bits })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bits(&self) -> &[bool] {
        &self.adj
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[self.n * i + j]
    }

    pub fn set_edge(&mut self, i: usize, j: usize, present: bool) {
        self.adj[self.n * i + j] = present;
    }

    /// Edges in row-major order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n * self.n)
            .filter(|&k| self.adj[k])
            .map(|k| (k / self.n, k % self.n))
            .collect()
    }

    pub fn out_degree(&self, i: usize) -> usize {
        (0..self.n).filter(|&j| self.has_edge(i, j)).count()
    }

    /// Every vertex has out-degree exactly one.
    pub fn is_functional(&self) -> bool {
        (0..self.n).all(|i| self.out_degree(i) == 1)
    }

    /// Functional and every column also sums to one.
    pub fn is_permutation(&self) -> bool {
        self.is_functional()
            && (0..self.n).all(|j| (0..self.n).filter(|&i| self.has_edge(i, j)).count() == 1)
    }

    pub fn as_function(&self) -> Option<FunctionTable> {
        if !self.is_functional() {
            return None;
        }
        let images = (0..self.n)
            .map(|i| (0..self.n).find(|&j| self.has_edge(i, j)).unwrap())
            .collect();
        FunctionTable::new(images).ok()
    }

    /// `M_G = ∏_{(i,j) ∈ E(G)} a_{i,j}`.
    pub fn monomial_edge_listing(&self) -> MultiPoly {
        let vars = (0..self.n * self.n).filter(|&k| self.adj[k]);
        MultiPoly::from_terms(
            self.n * self.n,
            [(Monomial::from_vars(vars), CycloRational::one())],
        )
    }

    /// Header `n`, then `n` rows of space-separated 0/1 entries.
    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.n);
        for i in 0..self.n {
            let row: Vec<&str> = (0..self.n)
                .map(|j| if self.has_edge(i, j) { "1" } else { "0" })
                .collect();
            let _ = writeln!(s, "{}", row.join(" "));
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let lines: Vec<(usize, &str)> = content_lines(text).collect();
        let mut graphs = parse_graph_lines(&lines)?;
        match graphs.len() {
            1 => Ok(graphs.pop().unwrap()),
            0 => Err(Error::parse(1, "missing graph")),
            _ => Err(Error::parse(1, "expected a single graph")),
        }
    }
}

fn parse_graph_lines(lines: &[(usize, &str)]) -> Result<Vec<Graph>> {
    let mut graphs = Vec::new();
    let mut rest = lines;
    while let Some(&(hl, header)) = rest.first() {
        let n = match parse_usizes(hl, header)?[..] {
            [n] => n,
            _ => return Err(Error::parse(hl, "graph header must be `n`")),
        };
        if rest.len() < n + 1 {
            return Err(Error::parse(hl, format!("expected {n} adjacency rows")));
        }
        let mut bits = Vec::with_capacity(n * n);
        for &(ln, row) in &rest[1..=n] {
            let vals = parse_usizes(ln, row)?;
            if vals.len() != n {
                return Err(Error::parse(ln, format!("expected {n} entries")));
            }
            for v in vals {
                match v {
                    0 => bits.push(false),
                    1 => bits.push(true),
                    _ => return Err(Error::parse(ln, "adjacency entries must be 0 or 1")),
                }
            }
        }
        graphs.push(Graph { n, adj: bits });
        rest = &rest[n + 1..];
    }
    Ok(graphs)
}

/// Blank-line-separated graph blocks.
pub fn parse_graph_set(text: &str) -> Result<Vec<Graph>> {
    let mut blocks: Vec<Vec<(usize, &str)>> = vec![Vec::new()];
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.starts_with('#') {
            continue;
        }
        if line.is_empty() {
            if !blocks.last().unwrap().is_empty() {
                blocks.push(Vec::new());
            }
        } else {
            blocks.last_mut().unwrap().push((i + 1, line));
        }
    }
    let mut out = Vec::new();
    for block in blocks.iter().filter(|b| !b.is_empty()) {
        let gs = parse_graph_lines(block)?;
        if gs.len() != 1 {
            return Err(Error::parse(
                block[0].0,
                "each block must hold exactly one graph",
            ));
        }
        out.extend(gs);
    }
    Ok(out)
}

pub fn write_graph_set(graphs: &[Graph]) -> String {
    graphs
        .iter()
        .map(Graph::to_text)
        .collect::<Vec<_>>()
        .join("\n")
}

/// `T`: vertex `n·i + j` maps to 1 if `(i, j)` is an edge, to 0 otherwise.
/// Needs `n ≥ 2` so that both images lie in `Z_{n²}`.
pub fn transform_t(g: &Graph) -> Result<FunctionTable> {
    if g.n < 2 {
        return Err(Error::Domain(format!(
            "T needs at least 2 vertices, got {}",
            g.n
        )));
    }
    FunctionTable::new(g.adj.iter().map(|&e| e as usize).collect())
}

/// `T_f`: vertices 0 and 1 follow `f`, vertex `2 + n·i + j` maps to 1 if `(i, j)` is
/// an edge, to 0 otherwise.
pub fn transform_tf(g: &Graph, f: &FunctionTable) -> Result<FunctionTable> {
    if f.n() != 2 {
        return Err(Error::Domain(format!(
            "T_f needs f: Z_2 -> Z_2, got domain Z_{}",
            f.n()
        )));
    }
    let images = f
        .images()
        .iter()
        .copied()
        .chain(g.adj.iter().map(|&e| e as usize))
        .collect();
    FunctionTable::new(images)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Transform {
    T,
    Tf(FunctionTable),
}

impl Transform {
    fn apply(&self, g: &Graph) -> Result<FunctionTable> {
        match self {
            Transform::T => transform_t(g),
            Transform::Tf(f) => transform_tf(g, f),
        }
    }

    /// Vertex count of the image of a graph on `n` vertices.
    pub fn image_size(&self, n: usize) -> usize {
        match self {
            Transform::T => n * n,
            Transform::Tf(_) => n * n + 2,
        }
    }

    /// Fixings and relabelling that turn `P_{∈T(S)}` back into `P_{∈S}`: every
    /// "non-edge" variable and every `M_f` variable is set to 1, and each "edge"
    /// variable `a_{off+n·i+j, 1}` becomes `a_{i,j}`.
    pub fn recovery_maps(
        &self,
        n: usize,
    ) -> (BTreeMap<usize, CycloRational>, BTreeMap<usize, usize>) {
        let width = self.image_size(n);
        let var = |vertex: usize, image: usize| width * vertex + image;
        let mut fix = BTreeMap::new();
        let mut relabel = BTreeMap::new();
        let offset = match self {
            Transform::T => 0,
            Transform::Tf(f) => {
                for v in 0..2 {
                    fix.insert(var(v, f.apply(v)), CycloRational::one());
                }
                2
            }
        };
        for k in 0..n * n {
            fix.insert(var(offset + k, 0), CycloRational::one());
            relabel.insert(var(offset + k, 1), k);
        }
        (fix, relabel)
    }
}

#[derive(Clone, Debug)]
pub struct TransformOutput {
    pub graphs: Vec<FunctionTable>,
    pub before: MultiPoly,
    pub after: MultiPoly,
}

impl TransformOutput {
    /// Restrict `after` along the recovery maps; equals `before` when the transform
    /// preserved the listing data.
    pub fn recover(&self, transform: &Transform, n: usize) -> Result<MultiPoly> {
        let (fix, relabel) = transform.recovery_maps(n);
        self.after
            .restrict_and_relabel(&fix, &relabel)?
            .with_nvars(n * n)
    }
}

/// Apply a transform to every graph of a set (duplicates collapse) and build the
/// listings `P_{∈S}` and `P_{∈T(S)}`.
pub fn transform_set(graphs: &[Graph], transform: &Transform) -> Result<TransformOutput> {
    let n = graphs.first().map_or(0, Graph::n);
    if let Some(g) = graphs.iter().find(|g| g.n() != n) {
        return Err(Error::Domain(format!(
            "graph set mixes {n} and {} vertices",
            g.n()
        )));
    }
    let set: BTreeSet<&Graph> = graphs.iter().collect();
    let images = set
        .iter()
        .map(|g| transform.apply(g))
        .collect::<Result<Vec<_>>>()?;
    let before = set.iter().fold(MultiPoly::zero(n * n), |acc, g| {
        acc + g.monomial_edge_listing()
    });
    let width = transform.image_size(n);
    let after = images
        .iter()
        .fold(MultiPoly::zero(width * width), |acc, f| {
            acc + f.monomial_listing()
        });
    Ok(TransformOutput {
        graphs: images,
        before,
        after,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: usize, edges: &[(usize, usize)]) -> Graph {
        Graph::from_edges(n, edges.iter().copied()).unwrap()
    }

    fn mono_poly(nvars: usize, vars: &[usize]) -> MultiPoly {
        MultiPoly::from_terms(
            nvars,
            [(
                Monomial::from_vars(vars.iter().copied()),
                CycloRational::one(),
            )],
        )
    }

    #[test]
    fn edge_listings() {
        assert_eq!(
            g(2, &[(0, 0), (1, 0)]).monomial_edge_listing(),
            mono_poly(4, &[0, 2])
        );
        assert_eq!(Graph::empty(3).monomial_edge_listing(), MultiPoly::one(9));
        assert_eq!(
            g(2, &[(0, 0), (0, 1)]).monomial_edge_listing(),
            mono_poly(4, &[0, 1])
        );
    }

    #[test]
    fn functional_predicate() {
        assert!(!g(2, &[(0, 0), (0, 1)]).is_functional());
        assert!(g(3, &[(0, 0), (1, 1), (2, 2)]).is_functional());
        assert!(g(2, &[(0, 1), (1, 0)]).is_functional());
        assert_eq!(
            g(2, &[(0, 1), (1, 0)]).as_function().unwrap().images(),
            &[1, 0]
        );
    }

    #[test]
    fn transform_t_examples() {
        let gm = g(2, &[(0, 0), (0, 1)]);
        // a01 a11 a20 a30 on 4 vertices (width 4)
        assert_eq!(
            transform_t(&gm).unwrap().monomial_listing(),
            mono_poly(16, &[1, 5, 8, 12])
        );
        assert_eq!(
            transform_t(&Graph::empty(2)).unwrap().images(),
            &[0, 0, 0, 0]
        );
        assert_eq!(
            transform_t(&Graph::totally_complete(2)).unwrap().images(),
            &[1, 1, 1, 1]
        );
        assert!(transform_t(&Graph::totally_complete(1)).is_err());
    }

    #[test]
    fn transform_tf_examples() {
        let gm = g(2, &[(0, 0), (0, 1)]);
        let f0 = FunctionTable::constant(2, 0).unwrap();
        let img = transform_tf(&gm, &f0).unwrap();
        assert_eq!(img.images(), &[0, 0, 1, 1, 0, 0]);
        // a00 a10 a21 a31 a40 a50 on 6 vertices
        assert_eq!(
            img.monomial_listing(),
            mono_poly(36, &[0, 6, 13, 19, 24, 30])
        );
        let id = FunctionTable::identity(2);
        assert_eq!(
            transform_tf(&Graph::empty(2), &id).unwrap().images(),
            &[0, 1, 0, 0, 0, 0]
        );
        let loop1 = Graph::totally_complete(1);
        let img = transform_tf(&loop1, &f0).unwrap();
        assert_eq!(img.monomial_listing(), mono_poly(9, &[0, 3, 7]));
        assert!(transform_tf(&loop1, &FunctionTable::identity(3)).is_err());
    }

    #[test]
    fn set_transform_recovers_listing() {
        let all_functional: Vec<Graph> = FunctionTable::all(2).map(|f| f.to_graph()).collect();
        let out = transform_set(&all_functional, &Transform::T).unwrap();
        assert_eq!(out.graphs.len(), 4);
        assert!(out.graphs.iter().all(|f| f.n() == 4));
        assert_eq!(out.recover(&Transform::T, 2).unwrap(), out.before);
        assert_eq!(out.before.term_count(), 4);

        let single = vec![g(2, &[(1, 0)])];
        let out = transform_set(&single, &Transform::T).unwrap();
        assert_eq!(
            out.recover(&Transform::T, 2).unwrap(),
            single[0].monomial_edge_listing()
        );

        let constants = vec![g(2, &[(0, 0), (1, 0)]), g(2, &[(0, 1), (1, 1)])];
        let tf = Transform::Tf(FunctionTable::constant(2, 0).unwrap());
        let out = transform_set(&constants, &tf).unwrap();
        assert_eq!(
            out.recover(&tf, 2).unwrap(),
            crate::listings::listing_constant_functions(2)
        );
        assert!(out.after.terms().all(|(m, _)| m.degree() == 6));
    }

    #[test]
    fn mixed_sizes_rejected() {
        let r = transform_set(&[Graph::empty(2), Graph::empty(3)], &Transform::T);
        assert!(matches!(r, Err(Error::Domain(_))));
    }

    #[test]
    fn graph_text_formats() {
        let a = g(3, &[(0, 1), (2, 2)]);
        let s = a.to_text();
        assert_eq!(s, "3\n0 1 0\n0 0 0\n0 0 1\n");
        assert_eq!(Graph::parse(&s).unwrap(), a);
        let b = Graph::totally_complete(2);
        let set = write_graph_set(&[a.clone(), b.clone()]);
        assert_eq!(parse_graph_set(&set).unwrap(), vec![a, b]);
        assert!(Graph::parse("2\n0 1\n").is_err());
        assert!(Graph::parse("2\n0 2\n1 0\n").is_err());
    }
}
