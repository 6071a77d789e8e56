//! Mutable diagram surgery.
//!
//! A builder is a set of 4-valent nodes whose slots are pairwise connected;
//! finalize assigns fresh edge labels (scanning nodes in order, slots 0..3)
//! and revalidates through the normal constructor, so nothing invalid can
//! escape. Crossing indices survive from `from_diagram`: live nodes keep
//! their relative order and new nodes append, which is what makes move
//! traces replayable.

use crate::diagram::{Crossing, Dart, Diagram};
use crate::error::{LinkError, Result};

pub(crate) type Slot = (usize, u8);

pub(crate) struct DiagramBuilder {
    conn: Vec<[Option<Slot>; 4]>,
    alive: Vec<bool>,
    tags: Vec<Option<u32>>,
    /// Per slot: whether the strand entered the crossing there in the source
    /// diagram. None on new nodes; finalize uses the surviving marks to keep
    /// each component's direction of travel across relabelling.
    head: Vec<[Option<bool>; 4]>,
    pub free_loops: usize,
    next_tag: u32,
}

impl DiagramBuilder {
    pub fn new_empty(free_loops: usize) -> Self {
        DiagramBuilder {
            conn: Vec::new(),
            alive: Vec::new(),
            tags: Vec::new(),
            head: Vec::new(),
            free_loops,
            next_tag: 0,
        }
    }

    pub fn from_diagram(d: &Diagram) -> Self {
        let n = d.n_crossings();
        let mut b = DiagramBuilder {
            conn: vec![[None; 4]; n],
            alive: vec![true; n],
            tags: d.tags().to_vec(),
            head: vec![[None; 4]; n],
            free_loops: d.free_loops(),
            next_tag: d.tags().iter().flatten().max().map_or(0, |t| t + 1),
        };
        for e in 1..=d.n_edges() {
            let [x, y] = d.edge_ends(e);
            b.connect(
                (x.crossing(), x.slot()),
                (y.crossing(), y.slot()),
            );
        }
        for c in 0..n {
            for s in 0..4u8 {
                b.head[c][s as usize] = Some(d.is_head(Dart::new(c, s)));
            }
        }
        b
    }

    pub fn add_node(&mut self, tag: Option<u32>) -> usize {
        self.conn.push([None; 4]);
        self.alive.push(true);
        self.tags.push(tag);
        self.head.push([None; 4]);
        self.conn.len() - 1
    }

    pub fn fresh_tag(&mut self) -> u32 {
        let t = self.next_tag;
        self.next_tag += 1;
        t
    }

    pub fn connect(&mut self, a: Slot, b: Slot) {
        debug_assert!(a != b, "cannot connect a slot to itself");
        debug_assert!(self.conn[a.0][a.1 as usize].is_none(), "slot in use");
        debug_assert!(self.conn[b.0][b.1 as usize].is_none(), "slot in use");
        self.conn[a.0][a.1 as usize] = Some(b);
        self.conn[b.0][b.1 as usize] = Some(a);
    }

    /// Break the connection at `a`, returning the dart it was joined to.
    pub fn disconnect(&mut self, a: Slot) -> Slot {
        let b = self.conn[a.0][a.1 as usize].expect("slot not connected");
        self.conn[a.0][a.1 as usize] = None;
        self.conn[b.0][b.1 as usize] = None;
        b
    }

    /// Delete the given crossings, splicing every strand that ran through
    /// them: entering slot s leaves at s+2, and connections internal to the
    /// dead set are followed transitively. Strands closed entirely inside
    /// become free loops.
    pub fn excise(&mut self, dead: &[usize]) {
        let mut is_dead = vec![false; self.conn.len()];
        for &c in dead {
            is_dead[c] = true;
        }
        let snapshot = self.conn.clone();
        let p = |s: Slot| snapshot[s.0][s.1 as usize].expect("dangling slot in excise");
        let mut seen = vec![[false; 4]; self.conn.len()];

        // Strands entering from outside.
        let mut joins: Vec<(Slot, Slot)> = Vec::new();
        for c in dead {
            for s in 0..4u8 {
                let entry = (*c, s);
                if seen[entry.0][entry.1 as usize] {
                    continue;
                }
                let outside = p(entry);
                if is_dead[outside.0] {
                    continue;
                }
                let mut cur = entry;
                loop {
                    seen[cur.0][cur.1 as usize] = true;
                    let exit = (cur.0, cur.1 ^ 2);
                    seen[exit.0][exit.1 as usize] = true;
                    let next = p(exit);
                    if !is_dead[next.0] {
                        joins.push((outside, next));
                        break;
                    }
                    cur = next;
                }
            }
        }
        // Strands closed inside the dead set.
        for c in dead {
            for s in 0..4u8 {
                let start = (*c, s);
                if seen[start.0][start.1 as usize] {
                    continue;
                }
                self.free_loops += 1;
                let mut cur = start;
                loop {
                    seen[cur.0][cur.1 as usize] = true;
                    let exit = (cur.0, cur.1 ^ 2);
                    seen[exit.0][exit.1 as usize] = true;
                    let next = p(exit);
                    if next == start {
                        break;
                    }
                    cur = next;
                }
            }
        }

        for &c in dead {
            for s in 0..4u8 {
                if let Some(b) = self.conn[c][s as usize].take() {
                    self.conn[b.0][b.1 as usize] = None;
                }
            }
            self.alive[c] = false;
        }
        for (a, b) in joins {
            self.connect(a, b);
        }
    }

    pub fn finalize(self) -> Result<Diagram> {
        let mut index = vec![usize::MAX; self.conn.len()];
        let mut order = Vec::new();
        for (i, &alive) in self.alive.iter().enumerate() {
            if alive {
                index[i] = order.len();
                order.push(i);
            }
        }
        let mut edges = vec![[0usize; 4]; order.len()];
        let mut next = 1usize;
        for (new_c, &old_c) in order.iter().enumerate() {
            for s in 0..4usize {
                if edges[new_c][s] != 0 {
                    continue;
                }
                let b = self.conn[old_c][s].ok_or_else(|| {
                    LinkError::MalformedCode(format!(
                        "dangling slot {s} on crossing {old_c}"
                    ))
                })?;
                if !self.alive[b.0] {
                    return Err(LinkError::MalformedCode(
                        "connection into a deleted crossing".into(),
                    ));
                }
                edges[new_c][s] = next;
                edges[index[b.0]][b.1 as usize] = next;
                next += 1;
            }
        }
        let crossings = edges.into_iter().map(|e| Crossing { edges: e }).collect();
        let tags = order.iter().map(|&i| self.tags[i]).collect();
        let mut d = Diagram::new_tagged(crossings, self.free_loops, tags)?;

        // Restore inherited orientations. The constructor directed each
        // component by its lowest fresh label; the earliest surviving mark
        // on the component says whether that matches the source direction.
        let mut decided = vec![false; d.n_components()];
        for (new_c, &old_c) in order.iter().enumerate() {
            for s in 0..4u8 {
                let Some(was_head) = self.head[old_c][s as usize] else {
                    continue;
                };
                let dart = Dart::new(new_c, s);
                let comp = d.comp_of_edge(d.edge_at(dart));
                if decided[comp] {
                    continue;
                }
                decided[comp] = true;
                if d.is_head(dart) != was_head {
                    d.flip_component(comp);
                }
            }
        }
        Ok(d)
    }
}

/// Convenience: the builder slot for a dart of the source diagram.
pub(crate) fn slot_of(d: Dart) -> Slot {
    (d.crossing(), d.slot())
}
