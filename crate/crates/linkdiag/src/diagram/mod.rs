//! Combinatorial link diagrams.
//!
//! A diagram is a 4-valent plane graph with a rotation system: every crossing
//! has four slots numbered 0..3 counterclockwise, the strand in slots 0 and 2
//! passes under, the strand in slots 1 and 3 passes over. A dart (half-edge)
//! is one slot of one crossing; an edge joins two darts. Closed curves with
//! no crossing at all are carried separately as free loops.
//!
//! Orientation is not part of the input: each component is directed so that
//! its lowest edge label runs from the label's first occurrence (scanning
//! crossings in order, slots 0..3) to its second. A crossing is positive when
//! the over strand enters at the slot counterclockwise-before the slot where
//! the under strand enters, negative otherwise.

mod pd;
mod json;

pub use pd::{parse_pd, emit_pd};
pub use json::DiagramJson;

use crate::error::{LinkError, Result};
use serde::{Deserialize, Serialize};

/// Edge label, 1-based as in PD codes.
pub type EdgeId = usize;

/// Face index into `Faces::walks`.
pub type FaceId = usize;

/// One slot of one crossing, encoded as `4 * crossing + slot`.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct Dart(pub u32);

impl Dart {
    pub fn new(crossing: usize, slot: u8) -> Self {
        Dart((crossing * 4 + slot as usize) as u32)
    }
    pub fn crossing(self) -> usize {
        (self.0 / 4) as usize
    }
    pub fn slot(self) -> u8 {
        (self.0 % 4) as u8
    }
    /// Dart at the same crossing, `k` slots counterclockwise.
    pub fn rotate(self, k: u8) -> Self {
        Dart::new(self.crossing(), (self.slot() + k) % 4)
    }
}

/// A crossing: edge labels at slots 0..3 in counterclockwise order.
/// Slots 0 and 2 carry the under strand, slots 1 and 3 the over strand.
#[derive(Copy, Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Crossing {
    pub edges: [EdgeId; 4],
}

/// A half-edge in the strand-successor view: `successor` is the next
/// half-edge encountered travelling along the strand through the crossing.
/// The successor map is a bijection on half-edge ids; its orbits are the two
/// directed traversals of each component.
#[derive(Copy, Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct HalfEdge {
    pub id: u32,
    pub crossing: usize,
    pub slot: u8,
    pub successor: u32,
}

/// Face structure of the crossing part of a diagram. Walks are traced with
/// the face on the left of each directed edge; a directed edge is identified
/// with the dart at its head. Free loops are not part of any walk.
#[derive(Clone, Debug)]
pub struct Faces {
    pub walks: Vec<Vec<Dart>>,
    pub face_of: Vec<FaceId>,
}

impl Faces {
    pub fn count(&self) -> usize {
        self.walks.len()
    }
}

/// Symmetric matrix of linking data. Off-diagonal entries are linking
/// numbers (half the signed count of crossings between the two components);
/// diagonal entries are self-writhes (full signed count of self-crossings).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkingMatrix {
    pub dim: usize,
    pub entries: Vec<Vec<i64>>,
}

impl LinkingMatrix {
    /// Multiset of absolute off-diagonal entries, sorted. Invariant under
    /// component renumbering, reorientation and mirroring.
    pub fn abs_off_diagonal(&self) -> Vec<i64> {
        let mut v = Vec::new();
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                v.push(self.entries[i][j].abs());
            }
        }
        v.sort_unstable();
        v
    }
}

/// A validated link diagram together with its derived combinatorial data.
#[derive(Clone, Debug)]
pub struct Diagram {
    crossings: Vec<Crossing>,
    free_loops: usize,
    /// Both ends of each edge, indexed by label-1, in scan order.
    edge_ends: Vec<[Dart; 2]>,
    /// Per dart: true when the dart is the head of its edge in the chosen
    /// component orientation (the strand enters its crossing there).
    active: Vec<bool>,
    signs: Vec<i8>,
    comp_of_edge: Vec<usize>,
    n_components: usize,
    connected: bool,
    faces: Faces,
    /// Kink-quadruple block ids used by the move engine; None elsewhere.
    tags: Vec<Option<u32>>,
}

impl PartialEq for Diagram {
    fn eq(&self, other: &Self) -> bool {
        self.crossings == other.crossings
            && self.free_loops == other.free_loops
            && self.tags == other.tags
    }
}
impl Eq for Diagram {}

impl Diagram {
    /// Build and validate a diagram from raw crossing tuples.
    pub fn new(crossings: Vec<Crossing>, free_loops: usize) -> Result<Diagram> {
        Self::new_tagged(crossings, free_loops, Vec::new())
    }

    pub(crate) fn new_tagged(
        crossings: Vec<Crossing>,
        free_loops: usize,
        mut tags: Vec<Option<u32>>,
    ) -> Result<Diagram> {
        let n = crossings.len();
        if n == 0 && free_loops == 0 {
            return Err(LinkError::EmptyDiagram);
        }
        if tags.is_empty() {
            tags = vec![None; n];
        }
        if tags.len() != n {
            return Err(LinkError::MalformedCode("tag array length".into()));
        }

        // Every label in 1..=2n, each exactly twice, ends recorded in scan order.
        let mut edge_ends: Vec<Vec<Dart>> = vec![Vec::new(); 2 * n];
        for (ci, x) in crossings.iter().enumerate() {
            for (si, &e) in x.edges.iter().enumerate() {
                if e == 0 || e > 2 * n {
                    return Err(LinkError::MalformedCode(format!(
                        "edge label {e} out of range 1..={}",
                        2 * n
                    )));
                }
                if edge_ends[e - 1].len() == 2 {
                    return Err(LinkError::MalformedCode(format!(
                        "edge label {e} appears more than twice"
                    )));
                }
                edge_ends[e - 1].push(Dart::new(ci, si as u8));
            }
        }
        let mut ends = Vec::with_capacity(2 * n);
        for (i, v) in edge_ends.into_iter().enumerate() {
            if v.len() != 2 {
                return Err(LinkError::MalformedCode(format!(
                    "edge label {} appears {} times, expected 2",
                    i + 1,
                    v.len()
                )));
            }
            ends.push([v[0], v[1]]);
        }

        let mut d = Diagram {
            crossings,
            free_loops,
            edge_ends: ends,
            active: vec![false; 4 * n],
            signs: vec![0; n],
            comp_of_edge: vec![usize::MAX; 2 * n],
            n_components: 0,
            connected: true,
            faces: Faces { walks: Vec::new(), face_of: Vec::new() },
            tags,
        };
        d.faces = d.trace_faces();
        d.check_planar()?;
        d.orient();
        Ok(d)
    }

    pub fn n_crossings(&self) -> usize {
        self.crossings.len()
    }
    pub fn n_edges(&self) -> usize {
        2 * self.crossings.len()
    }
    pub fn free_loops(&self) -> usize {
        self.free_loops
    }
    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }
    pub fn tags(&self) -> &[Option<u32>] {
        &self.tags
    }
    pub fn n_components(&self) -> usize {
        self.n_components + self.free_loops
    }
    /// Components that live on crossings (free loops excluded).
    pub fn n_graph_components(&self) -> usize {
        self.n_components
    }
    pub fn is_connected(&self) -> bool {
        self.connected
    }
    pub fn signs(&self) -> &[i8] {
        &self.signs
    }
    pub fn sign(&self, crossing: usize) -> i8 {
        self.signs[crossing]
    }

    pub fn edge_at(&self, d: Dart) -> EdgeId {
        self.crossings[d.crossing()].edges[d.slot() as usize]
    }
    pub fn edge_ends(&self, e: EdgeId) -> [Dart; 2] {
        self.edge_ends[e - 1]
    }
    /// The other end of the edge at dart `d`.
    pub fn theta(&self, d: Dart) -> Dart {
        let [a, b] = self.edge_ends[self.edge_at(d) - 1];
        if a == d { b } else { a }
    }
    /// Next entering dart along the strand through `d`'s crossing.
    pub fn succ(&self, d: Dart) -> Dart {
        self.theta(d.rotate(2))
    }
    /// True when `d` is the head of its edge under the chosen orientation.
    pub fn is_head(&self, d: Dart) -> bool {
        self.active[d.0 as usize]
    }
    /// Head dart of edge `e`: the end the directed edge points into.
    pub fn head(&self, e: EdgeId) -> Dart {
        let [a, b] = self.edge_ends[e - 1];
        if self.active[a.0 as usize] { a } else { b }
    }
    pub fn tail(&self, e: EdgeId) -> Dart {
        let [a, b] = self.edge_ends[e - 1];
        if self.active[a.0 as usize] { b } else { a }
    }
    pub fn comp_of_edge(&self, e: EdgeId) -> usize {
        self.comp_of_edge[e - 1]
    }

    pub fn half_edges(&self) -> Vec<HalfEdge> {
        (0..4 * self.n_crossings() as u32)
            .map(|id| {
                let d = Dart(id);
                HalfEdge {
                    id,
                    crossing: d.crossing(),
                    slot: d.slot(),
                    successor: self.succ(d).0,
                }
            })
            .collect()
    }

    pub fn faces(&self) -> &Faces {
        &self.faces
    }

    /// Number of complementary regions, counting each free loop as adding
    /// one region (free loops are drawn nested inside a single face).
    pub fn face_count(&self) -> usize {
        if self.crossings.is_empty() {
            self.free_loops + 1
        } else {
            self.faces.count() + self.free_loops
        }
    }

    /// Face on the left of edge `e` traversed in its orientation.
    pub fn face_left(&self, e: EdgeId) -> FaceId {
        self.faces.face_of[self.head(e).0 as usize]
    }
    pub fn face_right(&self, e: EdgeId) -> FaceId {
        self.faces.face_of[self.tail(e).0 as usize]
    }
    /// The two faces flanking edge `e` (left, right of its orientation).
    pub fn edge_faces(&self, e: EdgeId) -> (FaceId, FaceId) {
        (self.face_left(e), self.face_right(e))
    }

    pub fn writhe(&self) -> i64 {
        self.signs.iter().map(|&s| s as i64).sum()
    }

    /// Under-strand component and over-strand component at a crossing.
    pub fn strand_components(&self, c: usize) -> (usize, usize) {
        let under = self.comp_of_edge(self.crossings[c].edges[0]);
        let over = self.comp_of_edge(self.crossings[c].edges[1]);
        (under, over)
    }

    pub fn linking_matrix(&self) -> LinkingMatrix {
        let dim = self.n_components();
        let mut acc = vec![vec![0i64; dim]; dim];
        for c in 0..self.n_crossings() {
            let (u, o) = self.strand_components(c);
            let s = self.signs[c] as i64;
            acc[u][o] += s;
            if u != o {
                acc[o][u] += s;
            }
        }
        for i in 0..dim {
            for j in 0..dim {
                if i != j {
                    debug_assert!(acc[i][j] % 2 == 0, "inter-component signs must pair up");
                    acc[i][j] /= 2;
                }
            }
        }
        LinkingMatrix { dim, entries: acc }
    }

    /// Edges of component `comp` in traversal order, starting from the head
    /// of its lowest-labelled edge.
    pub fn component_edges(&self, comp: usize) -> Vec<EdgeId> {
        let lowest = (1..=self.n_edges()).find(|&e| self.comp_of_edge(e) == comp);
        let Some(lowest) = lowest else { return Vec::new() };
        let mut out = Vec::new();
        let start = self.head(lowest);
        let mut d = start;
        loop {
            out.push(self.edge_at(d));
            d = self.succ(d);
            if d == start {
                break;
            }
        }
        out
    }

    /// Number of connected pieces of the underlying curve arrangement.
    pub fn pieces(&self) -> usize {
        if self.crossings.is_empty() {
            return self.free_loops;
        }
        let mut uf = UnionFind::new(self.n_crossings());
        for e in 1..=self.n_edges() {
            let [a, b] = self.edge_ends(e);
            uf.union(a.crossing(), b.crossing());
        }
        uf.count() + self.free_loops
    }

    /// Swap over and under strands everywhere (mirror link, same shadow).
    pub fn mirror(&self) -> Diagram {
        let crossings = self
            .crossings
            .iter()
            .map(|x| Crossing {
                edges: [x.edges[1], x.edges[2], x.edges[3], x.edges[0]],
            })
            .collect();
        Diagram::new(crossings, self.free_loops).expect("mirror of a valid diagram is valid")
    }

    /// Reverse the rotation system (reflect the plane, over/under kept).
    pub fn reflect(&self) -> Diagram {
        let crossings = self
            .crossings
            .iter()
            .map(|x| Crossing {
                edges: [x.edges[0], x.edges[3], x.edges[2], x.edges[1]],
            })
            .collect();
        Diagram::new(crossings, self.free_loops).expect("reflection of a valid diagram is valid")
    }

    // Face walks: from the head dart of a directed edge, the boundary of the
    // face on its left continues with the edge leaving one slot clockwise.
    fn trace_faces(&self) -> Faces {
        let n4 = 4 * self.n_crossings();
        let mut face_of = vec![usize::MAX; n4];
        let mut walks = Vec::new();
        for start in 0..n4 {
            if face_of[start] != usize::MAX {
                continue;
            }
            let mut walk = Vec::new();
            let mut d = Dart(start as u32);
            loop {
                face_of[d.0 as usize] = walks.len();
                walk.push(d);
                d = self.theta(d.rotate(3));
                if d.0 as usize == start {
                    break;
                }
            }
            walks.push(walk);
        }
        Faces { walks, face_of }
    }

    fn check_planar(&mut self) -> Result<()> {
        let n = self.n_crossings();
        if n == 0 {
            self.connected = self.free_loops == 1;
            return Ok(());
        }
        let mut uf = UnionFind::new(n);
        for e in 1..=self.n_edges() {
            let [a, b] = self.edge_ends(e);
            uf.union(a.crossing(), b.crossing());
        }
        let pieces = uf.count();
        self.connected = pieces == 1 && self.free_loops == 0;

        // Euler characteristic per connected piece: V - E + F = 2 exactly
        // when the rotation system is a sphere embedding.
        let mut v = vec![0i64; n];
        let mut ecnt = vec![0i64; n];
        let mut f = vec![0i64; n];
        for c in 0..n {
            v[uf.find(c)] += 1;
        }
        for e in 1..=self.n_edges() {
            let [a, _] = self.edge_ends(e);
            ecnt[uf.find(a.crossing())] += 1;
        }
        for walk in &self.faces.walks {
            f[uf.find(walk[0].crossing())] += 1;
        }
        for c in 0..n {
            if uf.find(c) == c {
                let chi = v[c] - ecnt[c] + f[c];
                if chi != 2 {
                    return Err(LinkError::NonPlanar(format!(
                        "Euler characteristic {chi} != 2 on a connected piece"
                    )));
                }
            }
        }
        Ok(())
    }

    fn orient(&mut self) {
        let n_edges = self.n_edges();
        let mut comp = 0usize;
        for e in 1..=n_edges {
            if self.comp_of_edge[e - 1] != usize::MAX {
                continue;
            }
            // Direct the lowest edge of the component from its first
            // occurrence to its second, then follow the strand around.
            let start = self.edge_ends(e)[1];
            let mut d = start;
            loop {
                self.active[d.0 as usize] = true;
                let edge = self.edge_at(d);
                self.comp_of_edge[edge - 1] = comp;
                d = self.succ(d);
                if d == start {
                    break;
                }
            }
            comp += 1;
        }
        self.n_components = comp;
        self.recompute_signs();
    }

    fn recompute_signs(&mut self) {
        for c in 0..self.n_crossings() {
            let u_in = if self.active[Dart::new(c, 0).0 as usize] { 0u8 } else { 2 };
            let o_in = if self.active[Dart::new(c, 1).0 as usize] { 1u8 } else { 3 };
            debug_assert!(
                self.active[Dart::new(c, u_in).0 as usize]
                    && !self.active[Dart::new(c, (u_in + 2) % 4).0 as usize],
                "under strand enters exactly once"
            );
            debug_assert!(
                self.active[Dart::new(c, o_in).0 as usize]
                    && !self.active[Dart::new(c, (o_in + 2) % 4).0 as usize],
                "over strand enters exactly once"
            );
            self.signs[c] = if (o_in + 4 - u_in) % 4 == 3 { 1 } else { -1 };
        }
    }

    /// Reverse the orientation of one component, updating head marks and
    /// crossing signs. Surgery uses this to carry inherited orientations
    /// across the relabelling that rebuilding forces; first-occurrence
    /// orientation stays the rule for freshly parsed input.
    pub(crate) fn flip_component(&mut self, comp: usize) {
        for e in 1..=self.n_edges() {
            if self.comp_of_edge[e - 1] == comp {
                let [a, b] = self.edge_ends(e);
                self.active[a.0 as usize] = !self.active[a.0 as usize];
                self.active[b.0 as usize] = !self.active[b.0 as usize];
            }
        }
        self.recompute_signs();
    }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }
    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }
    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // Root at the smaller index keeps component ids stable.
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
    pub fn count(&mut self) -> usize {
        (0..self.parent.len()).filter(|&i| self.find(i) == i).count()
    }
}
