//! Reidemeister rewrites with replayable traces.
//!
//! Every move is a pure function from diagram to diagram, implemented as
//! surgery on a builder and revalidated on the way out. A `MoveTrace`
//! records the applied moves against the diagram state they were applied
//! to; since surgery keeps surviving crossing indices stable and edge
//! relabelling is deterministic, replaying a trace on the original input
//! reproduces the output exactly.
//!
//! Kink bookkeeping: `r1_add` tags its crossing with a fresh block id.
//! Doubling a tagged crossing yields four crossings sharing the tag, and
//! `reduce_kink_quadruples` rewrites each such quadruple to the two-crossing
//! clasp (a full twist of the band: each strand goes over at one crossing
//! and under at the other). The writhe drops by 2 sign per quadruple while
//! the normalized Jones polynomial is unchanged.

use serde::{Deserialize, Serialize};

use crate::builder::{slot_of, DiagramBuilder, Slot};
use crate::diagram::{Dart, Diagram, EdgeId};
use crate::error::{LinkError, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Move {
    #[serde(rename = "R1+")]
    R1Plus { edge: EdgeId, flip: bool },
    #[serde(rename = "R1-")]
    R1Minus { edge: EdgeId, flip: bool },
    #[serde(rename = "R1-undo")]
    R1Undo { crossing: usize },
    #[serde(rename = "R2")]
    R2 { u: u32, v: u32, over: bool },
    #[serde(rename = "R2-undo")]
    R2Undo { c1: usize, c2: usize },
    #[serde(rename = "R3")]
    R3 { dart: u32 },
    #[serde(rename = "Reduce4to2")]
    Reduce4to2 { tag: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveTrace {
    pub before_crossings: usize,
    pub after_crossings: usize,
    pub moves: Vec<Move>,
}

impl MoveTrace {
    fn new(before: usize) -> Self {
        MoveTrace {
            before_crossings: before,
            after_crossings: before,
            moves: Vec::new(),
        }
    }
}

/// Add a kink on the given edge. The new crossing's sign equals `sign` and
/// is tagged as kink-derived. On a crossingless unknot the kink closes a
/// free loop instead (pass any edge value).
pub fn r1_add(d: &Diagram, edge: EdgeId, sign: i8) -> Result<Diagram> {
    r1_add_variant(d, edge, sign, false)
}

/// `flip` curls the kink to the other side of the strand; the sign is
/// unaffected. Both variants are needed to chain kinks tidily.
pub fn r1_add_variant(d: &Diagram, edge: EdgeId, sign: i8, flip: bool) -> Result<Diagram> {
    if sign != 1 && sign != -1 {
        return Err(LinkError::MalformedCode(format!("kink sign {sign} not +-1")));
    }
    if d.n_edges() == 0 {
        if d.free_loops() == 0 {
            return Err(LinkError::EmptyDiagram);
        }
        let mut b = DiagramBuilder::new_empty(d.free_loops() - 1);
        let tag = b.fresh_tag();
        let c = b.add_node(Some(tag));
        let (l1, l2, t1, t2) = kink_slots(sign, flip);
        b.connect((c, l1), (c, l2));
        b.connect((c, t1), (c, t2));
        return b.finalize();
    }
    if edge == 0 || edge > d.n_edges() {
        return Err(LinkError::MalformedCode(format!("no edge {edge}")));
    }
    let p = d.tail(edge);
    let q = d.head(edge);
    let mut b = DiagramBuilder::from_diagram(d);
    let tag = b.fresh_tag();
    b.disconnect(slot_of(p));
    let c = b.add_node(Some(tag));
    let (l1, l2, t1, t2) = kink_slots(sign, flip);
    b.connect((c, l1), (c, l2));
    if p == q.rotate(0) && slot_of(p) == slot_of(q) {
        unreachable!("an edge has two distinct ends");
    }
    b.connect(slot_of(p), (c, t1));
    b.connect((c, t2), slot_of(q));
    b.finalize()
}

/// Loop slot pair and through slot pair for a kink of the given sign.
/// A loop joining slots {1,2} or {3,0} makes a negative crossing, {0,1} or
/// {2,3} a positive one; the through strand enters on the earlier side so
/// chained kinks line up.
fn kink_slots(sign: i8, flip: bool) -> (u8, u8, u8, u8) {
    match (sign, flip) {
        (-1, false) => (1, 2, 0, 3),
        (-1, true) => (3, 0, 1, 2),
        (1, false) => (2, 3, 0, 1),
        (1, true) => (0, 1, 2, 3),
        _ => unreachable!(),
    }
}

/// Remove a kink: the crossing must carry a loop on adjacent slots.
pub fn r1_remove(d: &Diagram, crossing: usize) -> Result<Diagram> {
    if crossing >= d.n_crossings() {
        return Err(LinkError::MalformedCode(format!("no crossing {crossing}")));
    }
    if find_kink_loop(d, crossing).is_none() {
        return Err(LinkError::MalformedCode(format!(
            "crossing {crossing} carries no kink loop"
        )));
    }
    let mut b = DiagramBuilder::from_diagram(d);
    b.excise(&[crossing]);
    b.finalize()
}

/// The low slot s of a loop edge joining slots (s, s+1), if any.
fn find_kink_loop(d: &Diagram, c: usize) -> Option<u8> {
    (0..4u8).find(|&s| d.theta(Dart::new(c, s)) == Dart::new(c, (s + 1) % 4))
}

/// Push the edge under dart `u` across their common face over (or under)
/// the edge at dart `v`, adding two crossings.
pub fn r2_add(d: &Diagram, u: Dart, v: Dart, over: bool) -> Result<Diagram> {
    let n_darts = 4 * d.n_crossings();
    if u.0 as usize >= n_darts || v.0 as usize >= n_darts {
        return Err(LinkError::MalformedCode("dart out of range".into()));
    }
    let faces = d.faces();
    if faces.face_of[u.0 as usize] != faces.face_of[v.0 as usize] {
        return Err(LinkError::MalformedCode(
            "r2 darts must lie on a common face".into(),
        ));
    }
    if d.edge_at(u) == d.edge_at(v) {
        return Err(LinkError::MalformedCode(
            "r2 needs two distinct edges".into(),
        ));
    }
    let tu = d.theta(u);
    let tv = d.theta(v);
    let mut b = DiagramBuilder::from_diagram(d);
    b.disconnect(slot_of(u));
    b.disconnect(slot_of(v));
    let c1 = b.add_node(None);
    let c2 = b.add_node(None);
    // Both edges are traversed with the face interior on the left, so the
    // pushed bight meets c1 then c2 along its own edge while the crossed
    // edge meets c2 then c1. Slots counterclockwise per crossing.
    if over {
        b.connect(slot_of(tu), (c1, 3));
        b.connect((c1, 1), (c2, 1));
        b.connect((c2, 3), slot_of(u));
        b.connect(slot_of(tv), (c2, 0));
        b.connect((c2, 2), (c1, 0));
        b.connect((c1, 2), slot_of(v));
    } else {
        b.connect(slot_of(tu), (c1, 0));
        b.connect((c1, 2), (c2, 0));
        b.connect((c2, 2), slot_of(u));
        b.connect(slot_of(tv), (c2, 3));
        b.connect((c2, 1), (c1, 1));
        b.connect((c1, 3), slot_of(v));
    }
    b.finalize()
}

/// Remove a bigon between the two crossings where one strand runs over the
/// other at both; clasps (over then under) are refused.
pub fn r2_remove(d: &Diagram, c1: usize, c2: usize) -> Result<Diagram> {
    let n = d.n_crossings();
    if c1 >= n || c2 >= n || c1 == c2 {
        return Err(LinkError::MalformedCode("bad crossing pair".into()));
    }
    let bigon = d.faces().walks.iter().find(|w| {
        w.len() == 2 && {
            let (a, b) = (w[0].crossing(), w[1].crossing());
            (a, b) == (c1, c2) || (a, b) == (c2, c1)
        }
    });
    let Some(walk) = bigon else {
        return Err(LinkError::MalformedCode(format!(
            "no bigon face between crossings {c1} and {c2}"
        )));
    };
    for &g in walk {
        let h = d.theta(g);
        if g.slot() % 2 != h.slot() % 2 {
            return Err(LinkError::MalformedCode(
                "bigon is a clasp, not a removable pair".into(),
            ));
        }
    }
    let mut b = DiagramBuilder::from_diagram(d);
    b.excise(&[c1, c2]);
    b.finalize()
}

/// Slide the top strand of a triangular face across the opposite crossing.
/// The face must have three distinct crossings and a transitive over
/// pattern; sites whose anchors land on the slid-over crossing are refused.
pub fn r3(d: &Diagram, at: Dart) -> Result<Diagram> {
    let n_darts = 4 * d.n_crossings();
    if (at.0 as usize) >= n_darts {
        return Err(LinkError::MalformedCode("dart out of range".into()));
    }
    let faces = d.faces();
    let f = faces.face_of[at.0 as usize];
    let walk = &faces.walks[f];
    if walk.len() != 3 {
        return Err(LinkError::MalformedCode("r3 needs a triangular face".into()));
    }
    let pos = walk.iter().position(|&g| g == at).expect("dart on its face");
    let g: Vec<Dart> = (0..3).map(|i| walk[(pos + i) % 3]).collect();
    let c: Vec<usize> = g.iter().map(|d| d.crossing()).collect();
    let s: Vec<u8> = g.iter().map(|d| d.slot()).collect();
    if c[0] == c[1] || c[1] == c[2] || c[0] == c[2] {
        return Err(LinkError::MalformedCode(
            "triangle revisits a crossing".into(),
        ));
    }
    // Strand X_i runs along the side from C_i (slot s_i - 1) to C_{i+1}
    // (slot s_{i+1}); it is the top strand if both those slots are odd.
    let mut top = None;
    let mut bottom = None;
    for i in 0..3 {
        let side_a = (s[i] + 3) % 4;
        let side_b = s[(i + 1) % 3];
        if side_a % 2 == 1 && side_b % 2 == 1 {
            top = Some(i);
        }
        if side_a % 2 == 0 && side_b % 2 == 0 {
            bottom = Some(i);
        }
    }
    let (Some(t), Some(_)) = (top, bottom) else {
        return Err(LinkError::MalformedCode(
            "triangle over-pattern is cyclic; no strand to slide".into(),
        ));
    };
    // Relabel so cstar is the crossing the top strand does not touch.
    let k = (t + 2) % 3;
    let (cstar, sk) = (c[k], s[k]);
    let (ca, sa) = (c[(k + 1) % 3], s[(k + 1) % 3]);
    let (cb, sb) = (c[(k + 2) % 3], s[(k + 2) % 3]);
    let t_outer_a = Dart::new(ca, (sa + 1) % 4);
    let t_outer_b = Dart::new(cb, (sb + 2) % 4);
    let anchor_a = d.theta(t_outer_b); // west anchor, beyond cb
    let anchor_b = d.theta(t_outer_a); // east anchor, beyond ca
    let closed_top = anchor_a == t_outer_a;
    if !closed_top {
        for anchor in [anchor_a, anchor_b] {
            if anchor.crossing() == ca || anchor.crossing() == cb {
                return Err(LinkError::MalformedCode(
                    "top strand anchor inside the triangle; site too degenerate".into(),
                ));
            }
            if anchor.crossing() == cstar {
                return Err(LinkError::MalformedCode(
                    "top strand anchored on the slid-over crossing".into(),
                ));
            }
        }
    }

    let mut b = DiagramBuilder::from_diagram(d);
    b.excise(&[ca, cb]);
    let leg1: Slot = (cstar, (sk + 1) % 4);
    let leg2: Slot = (cstar, (sk + 2) % 4);
    let q1 = b.disconnect(leg1);
    let dl = b.add_node(None);
    b.connect((dl, 0), leg1);
    let dr = b.add_node(None);
    if q1 == leg2 {
        b.connect((dr, 0), leg2);
        b.connect((dr, 2), (dl, 2));
    } else {
        b.connect((dl, 2), q1);
        let q2 = b.disconnect(leg2);
        b.connect((dr, 0), leg2);
        b.connect((dr, 2), q2);
    }
    if closed_top {
        b.connect((dl, 3), (dr, 1));
        b.connect((dr, 3), (dl, 1));
    } else {
        b.disconnect(slot_of(anchor_a));
        b.connect((dl, 1), slot_of(anchor_a));
        b.connect((dl, 3), (dr, 1));
        b.connect((dr, 3), slot_of(anchor_b));
    }
    b.finalize()
}

/// Kinks of the opposite sign on the lowest edge until the writhe is zero.
/// Knot diagrams only.
pub fn normalize_writhe(d: &Diagram) -> Result<(Diagram, MoveTrace)> {
    if d.n_components() != 1 {
        return Err(LinkError::MultiComponent(d.n_components()));
    }
    let mut trace = MoveTrace::new(d.n_crossings());
    let w = d.writhe();
    let sign: i8 = if w > 0 { -1 } else { 1 };
    let mut cur = d.clone();
    for i in 0..w.unsigned_abs() {
        let flip = i % 2 == 1;
        cur = r1_add_variant(&cur, 1, sign, flip)?;
        trace.moves.push(if sign == 1 {
            Move::R1Plus { edge: 1, flip }
        } else {
            Move::R1Minus { edge: 1, flip }
        });
    }
    assert_eq!(cur.writhe(), 0, "writhe normalization must land on zero");
    assert_eq!(
        cur.n_crossings(),
        d.n_crossings() + w.unsigned_abs() as usize,
        "each kink adds one crossing"
    );
    trace.after_crossings = cur.n_crossings();
    Ok((cur, trace))
}

/// Rewrite one tagged quadruple (the blackboard double of a kink) into a
/// two-crossing clasp. The quadruple's four crossings share the tag and the
/// band runs through them on two strands. Each strand crosses itself once in
/// there; those two crossings carry the source kink's sign whatever
/// direction each strand ends up with, while the two inter-strand crossings
/// flip with the strands' relative orientation.
pub fn reduce_one_quadruple(d: &Diagram, tag: u32) -> Result<Diagram> {
    let group: Vec<usize> = (0..d.n_crossings())
        .filter(|&c| d.tags()[c] == Some(tag))
        .collect();
    if group.len() != 4 {
        return Err(LinkError::UntaggedInput(format!(
            "tag {tag}: expected a quadruple, found {} crossings",
            group.len()
        )));
    }
    let in_group = |c: usize| group.contains(&c);

    // Boundary legs and the strand paths pairing them.
    let mut legs: Vec<Dart> = Vec::new();
    for &c in &group {
        for s in 0..4u8 {
            let dart = Dart::new(c, s);
            if !in_group(d.theta(dart).crossing()) {
                legs.push(dart);
            }
        }
    }
    if legs.len() != 4 {
        return Err(LinkError::UntaggedInput(format!(
            "tag {tag}: quadruple has {} boundary legs, expected 4",
            legs.len()
        )));
    }
    let trace_through = |entry: Dart| -> (Dart, Vec<Dart>) {
        let mut cur = entry;
        let mut visited = vec![cur];
        loop {
            let exit = cur.rotate(2);
            let next = d.theta(exit);
            if !in_group(next.crossing()) {
                return (exit, visited);
            }
            cur = next;
            visited.push(cur);
        }
    };
    let mut paths: Vec<(Dart, Dart)> = Vec::new(); // (entry leg, exit leg)
    let mut self_signs: Vec<i8> = Vec::new();
    let mut used = [false; 4];
    for i in 0..4 {
        if used[i] {
            continue;
        }
        let entry = legs[i];
        if !d.is_head(entry) {
            continue; // handled from its entry side
        }
        let (exit, visited) = trace_through(entry);
        let j = legs
            .iter()
            .position(|&l| l == exit)
            .ok_or_else(|| LinkError::UntaggedInput(format!("tag {tag}: broken band path")))?;
        used[i] = true;
        used[j] = true;
        paths.push((entry, exit));
        for (k, a) in visited.iter().enumerate() {
            for b in &visited[k + 1..] {
                if a.crossing() == b.crossing() {
                    self_signs.push(d.sign(a.crossing()));
                }
            }
        }
    }
    if paths.len() != 2 || used.iter().any(|u| !u) {
        return Err(LinkError::UntaggedInput(format!(
            "tag {tag}: band does not run through on two strands"
        )));
    }
    let sigma = match self_signs[..] {
        [a, b] if a == b => a,
        _ => {
            return Err(LinkError::UntaggedInput(format!(
                "tag {tag}: self-crossing signs {self_signs:?} do not name a kink"
            )))
        }
    };
    let (a_entry, a_exit) = paths[0];
    let (mut b_entry, mut b_exit) = paths[1];
    // The band's two ends sit on distinct sides of the source kink, so legs
    // at one end share their slot index. A strand running the band backwards
    // presents its legs swapped; undo that so the rewiring below always sees
    // the parallel picture.
    if b_entry.slot() != a_entry.slot() {
        std::mem::swap(&mut b_entry, &mut b_exit);
    }
    if b_entry.slot() != a_entry.slot() || b_exit.slot() != a_exit.slot() {
        return Err(LinkError::UntaggedInput(format!(
            "tag {tag}: band ends do not pair up"
        )));
    }
    // A doubled block keeps its four crossings consecutive through any
    // later renumbering, quadrant-indexed from the lowest id: side s of the
    // source crossing is served by crossings base + s and base + (s+3)%4,
    // one per band copy. The two copies stay on their sides through the
    // full twist, and the rewiring below tells them apart by that index,
    // which dart order does not determine.
    let base = group[0];
    if group != [base, base + 1, base + 2, base + 3] {
        return Err(LinkError::UntaggedInput(format!(
            "tag {tag}: quadruple crossings are not one block"
        )));
    }
    let s_in = a_entry.slot() as usize;
    let s_out = a_exit.slot() as usize;
    let left_in = base + s_in;
    let right_in = base + (s_in + 3) % 4;
    let ((l_entry, l_exit), (r_entry, r_exit)) =
        if (a_entry.crossing(), b_entry.crossing()) == (left_in, right_in) {
            ((a_entry, a_exit), (b_entry, b_exit))
        } else if (a_entry.crossing(), b_entry.crossing()) == (right_in, left_in) {
            ((b_entry, b_exit), (a_entry, a_exit))
        } else {
            return Err(LinkError::UntaggedInput(format!(
                "tag {tag}: entry legs do not sit on a doubled block"
            )));
        };
    if l_exit.crossing() != base + (s_out + 3) % 4 || r_exit.crossing() != base + s_out {
        return Err(LinkError::UntaggedInput(format!(
            "tag {tag}: strands do not return to their band sides"
        )));
    }
    // Outside anchors, recorded before surgery.
    let lin = d.theta(l_entry);
    let lout = d.theta(l_exit);
    let rin = d.theta(r_entry);
    let rout = d.theta(r_exit);

    let mut b = DiagramBuilder::from_diagram(d);
    b.excise(&group);
    b.disconnect(slot_of(lin));
    b.disconnect(slot_of(rin));
    let c1 = b.add_node(None);
    let c2 = b.add_node(None);
    // Full twist: each strand over once and under once, both crossings of
    // sign sigma.
    if sigma == 1 {
        b.connect(slot_of(lin), (c1, 0));
        b.connect(slot_of(rin), (c1, 3));
        b.connect((c1, 1), (c2, 0));
        b.connect((c1, 2), (c2, 3));
        b.connect(slot_of(lout), (c2, 1));
        b.connect(slot_of(rout), (c2, 2));
    } else {
        b.connect(slot_of(rin), (c1, 0));
        b.connect(slot_of(lin), (c1, 1));
        b.connect((c1, 2), (c2, 1));
        b.connect((c1, 3), (c2, 0));
        b.connect(slot_of(lout), (c2, 2));
        b.connect(slot_of(rout), (c2, 3));
    }
    let out = b.finalize()?;
    debug_assert_eq!(
        out.writhe(),
        d.writhe() - 2 * sigma as i64,
        "clasp reduction drops the writhe by two signs"
    );
    Ok(out)
}

/// Reduce every tagged quadruple, ascending tag order.
pub fn reduce_kink_quadruples(d: &Diagram) -> Result<(Diagram, MoveTrace)> {
    let tags: Vec<u32> = {
        let mut set: Vec<u32> = d.tags().iter().flatten().copied().collect();
        set.sort_unstable();
        set.dedup();
        set
    };
    let mut trace = MoveTrace::new(d.n_crossings());
    let mut cur = d.clone();
    for tag in tags {
        cur = reduce_one_quadruple(&cur, tag)?;
        trace.moves.push(Move::Reduce4to2 { tag });
    }
    trace.after_crossings = cur.n_crossings();
    Ok((cur, trace))
}

/// Strip kinks and removable bigons until none remain or the step budget
/// runs out. Clasps survive (they are not R2 pairs).
pub fn simplify_greedy(d: &Diagram, max_steps: usize) -> (Diagram, MoveTrace) {
    let mut trace = MoveTrace::new(d.n_crossings());
    let mut cur = d.clone();
    for _ in 0..max_steps {
        if let Some(c) = (0..cur.n_crossings()).find(|&c| find_kink_loop(&cur, c).is_some()) {
            cur = r1_remove(&cur, c).expect("detected kink removes");
            trace.moves.push(Move::R1Undo { crossing: c });
            continue;
        }
        let bigon = cur.faces().walks.iter().find_map(|w| {
            if w.len() != 2 || w[0].crossing() == w[1].crossing() {
                return None;
            }
            let ok = w.iter().all(|&g| {
                let h = cur.theta(g);
                g.slot() % 2 == h.slot() % 2
            });
            ok.then(|| (w[0].crossing().min(w[1].crossing()), w[0].crossing().max(w[1].crossing())))
        });
        match bigon {
            Some((c1, c2)) => {
                cur = r2_remove(&cur, c1, c2).expect("detected bigon removes");
                trace.moves.push(Move::R2Undo { c1, c2 });
            }
            None => break,
        }
    }
    trace.after_crossings = cur.n_crossings();
    (cur, trace)
}

/// Apply a recorded trace to a diagram. The result is byte-identical to the
/// original output when replayed on the original input.
pub fn replay(d: &Diagram, trace: &MoveTrace) -> Result<Diagram> {
    if d.n_crossings() != trace.before_crossings {
        return Err(LinkError::MalformedCode(format!(
            "trace expects {} crossings, diagram has {}",
            trace.before_crossings,
            d.n_crossings()
        )));
    }
    let mut cur = d.clone();
    for m in &trace.moves {
        cur = match *m {
            Move::R1Plus { edge, flip } => r1_add_variant(&cur, edge, 1, flip)?,
            Move::R1Minus { edge, flip } => r1_add_variant(&cur, edge, -1, flip)?,
            Move::R1Undo { crossing } => r1_remove(&cur, crossing)?,
            Move::R2 { u, v, over } => r2_add(&cur, Dart(u), Dart(v), over)?,
            Move::R2Undo { c1, c2 } => r2_remove(&cur, c1, c2)?,
            Move::R3 { dart } => r3(&cur, Dart(dart))?,
            Move::Reduce4to2 { tag } => reduce_one_quadruple(&cur, tag)?,
        };
    }
    if cur.n_crossings() != trace.after_crossings {
        return Err(LinkError::MalformedCode(format!(
            "trace promised {} crossings, produced {}",
            trace.after_crossings,
            cur.n_crossings()
        )));
    }
    Ok(cur)
}
