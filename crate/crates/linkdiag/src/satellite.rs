//! Satellites of annular patterns: the blackboard two-cable of a companion
//! knot, and the corridor splice that routes a pattern's marked arcs along
//! the cable.
//!
//! An annular pattern is an ordinary diagram plus a record of how it sits in
//! the annulus. The spanning form marks two arcs running boundary-parallel,
//! one against each boundary circle, with a single channel face between
//! them; every crossing keeps clear of that corridor, so crossing the
//! corridor transversely meets exactly the two arcs. Doubling a companion
//! expands each crossing into a 2x2 block with the source shadow and adds
//! no twist along any band section, which pins the linking number of the
//! two cable curves to the companion's writhe. Splicing cuts the pattern's
//! marked arcs together with the doubled copies of the companion's lowest
//! edge and reconnects them so the pattern rides the band.

use std::collections::VecDeque;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::builder::DiagramBuilder;
use crate::diagram::{emit_pd, parse_pd, Dart, Diagram, EdgeId, FaceId};
use crate::error::{LinkError, Result};
use crate::moves::{normalize_writhe, reduce_kink_quadruples, MoveTrace};
use crate::structure::{companion_disk_at, CompanionDisk};

/// How a diagram sits inside the annulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AnnularForm {
    /// Crossingless: every free loop runs parallel to the core.
    CoreCircles { count: usize },
    /// The whole diagram fits inside a disk; both boundary circles lie in
    /// the named face, so nothing wraps.
    Contained { face: FaceId },
    /// Two marked arcs run boundary-parallel, `arc1` against the outer
    /// circle and `arc2` against the inner one, with the channel face
    /// spanning the corridor between them.
    Spanning {
        arc1: EdgeId,
        arc2: EdgeId,
        channel: FaceId,
        inner: FaceId,
        outer: FaceId,
    },
}

/// A diagram embedded in the annulus, with algebraic winding numbers.
///
/// Winding is indexed by strand component, except for core circles where it
/// is indexed by free loop. A spanning form always admits a spanning arc
/// with two intersections (straight through the corridor), so its wrapping
/// number is at most two.
#[derive(Clone, Debug)]
pub struct AnnularDiagram {
    diagram: Diagram,
    form: AnnularForm,
    winding: Vec<i64>,
}

impl AnnularDiagram {
    pub fn new(diagram: Diagram, form: AnnularForm) -> Result<AnnularDiagram> {
        match form {
            AnnularForm::CoreCircles { count } => {
                if diagram.n_crossings() != 0 {
                    return Err(LinkError::InvalidDisk(
                        "core circles carry no crossings".into(),
                    ));
                }
                if count == 0 || count != diagram.free_loops() {
                    return Err(LinkError::InvalidDisk(format!(
                        "{count} core circles against {} free loops",
                        diagram.free_loops()
                    )));
                }
            }
            AnnularForm::Contained { face } => {
                let faces = diagram.face_count().max(1);
                if face >= faces {
                    return Err(LinkError::InvalidDisk(format!("no face {face}")));
                }
            }
            AnnularForm::Spanning {
                arc1,
                arc2,
                channel,
                inner,
                outer,
            } => {
                if !diagram.is_connected() {
                    return Err(LinkError::Disconnected(
                        "a spanning annular form needs a connected diagram".into(),
                    ));
                }
                if diagram.free_loops() != 0 {
                    return Err(LinkError::InvalidDisk(
                        "a free loop has no fixed annular position".into(),
                    ));
                }
                if arc1 == arc2 || arc1 == 0 || arc2 == 0 || arc1 > diagram.n_edges() || arc2 > diagram.n_edges() {
                    return Err(LinkError::InvalidDisk(format!(
                        "marked arcs {arc1}, {arc2} must be two distinct edges"
                    )));
                }
                let flanks = |arc: EdgeId, boundary: FaceId, side: &str| -> Result<()> {
                    let (a, b) = diagram.edge_faces(arc);
                    let ok = channel != boundary
                        && ((a, b) == (channel, boundary) || (a, b) == (boundary, channel));
                    if ok {
                        Ok(())
                    } else {
                        Err(LinkError::InvalidDisk(format!(
                            "arc {arc} does not separate the channel from the {side} boundary"
                        )))
                    }
                };
                flanks(arc1, outer, "outer")?;
                flanks(arc2, inner, "inner")?;
            }
        }
        let winding = compute_winding(&diagram, form);
        let out = AnnularDiagram {
            diagram,
            form,
            winding,
        };
        debug_assert_eq!(
            out.wrapping_number() % 2,
            (out.total_winding().unsigned_abs() % 2) as usize,
            "wrapping and winding agree mod 2"
        );
        Ok(out)
    }

    pub fn diagram(&self) -> &Diagram {
        &self.diagram
    }

    pub fn form(&self) -> AnnularForm {
        self.form
    }

    /// Signed passes around the core, per strand component (per free loop
    /// for core circles).
    pub fn winding(&self) -> &[i64] {
        &self.winding
    }

    pub fn total_winding(&self) -> i64 {
        self.winding.iter().sum()
    }

    /// Fewest transverse intersections of an embedded spanning arc with the
    /// diagram: breadth-first distance between the two boundary faces in
    /// the face dual, one step per edge crossed. Spanning arcs avoid
    /// crossings, so faces meeting only at a corner are not adjacent.
    pub fn wrapping_number(&self) -> usize {
        match self.form {
            AnnularForm::CoreCircles { count } => count,
            AnnularForm::Contained { .. } => 0,
            AnnularForm::Spanning { inner, outer, .. } => {
                dual_distance(&self.diagram, inner, outer)
            }
        }
    }
}

/// Minimum intersections over embedded spanning arcs of the annulus.
pub fn wrapping_number(a: &AnnularDiagram) -> usize {
    a.wrapping_number()
}

fn compute_winding(d: &Diagram, form: AnnularForm) -> Vec<i64> {
    match form {
        AnnularForm::CoreCircles { count } => vec![1; count],
        AnnularForm::Contained { .. } => vec![0; d.n_components()],
        AnnularForm::Spanning {
            arc1,
            arc2,
            channel,
            ..
        } => {
            // A spanning ray runs inner, arc2, channel, arc1, outer and
            // meets nothing else; each passage counts with the sign of the
            // strand against the ray. The channel-side walk dart of an arc
            // is its head exactly when the strand runs with the channel on
            // its left.
            let mut w = vec![0i64; d.n_components()];
            let g1 = corridor_dart(d, arc1, channel);
            let g2 = corridor_dart(d, arc2, channel);
            w[d.comp_of_edge(arc1)] += if d.is_head(g1) { 1 } else { -1 };
            w[d.comp_of_edge(arc2)] += if d.is_head(g2) { -1 } else { 1 };
            w
        }
    }
}

/// The end dart of `arc` lying on the walk of `face`.
fn corridor_dart(d: &Diagram, arc: EdgeId, face: FaceId) -> Dart {
    let [a, b] = d.edge_ends(arc);
    if d.faces().face_of[a.0 as usize] == face {
        a
    } else {
        b
    }
}

fn dual_distance(d: &Diagram, from: FaceId, to: FaceId) -> usize {
    let n = d.face_count();
    let mut adj: Vec<Vec<FaceId>> = vec![Vec::new(); n];
    for e in 1..=d.n_edges() {
        let (a, b) = d.edge_faces(e);
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut dist = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    dist[from] = 0;
    queue.push_back(from);
    while let Some(f) = queue.pop_front() {
        if f == to {
            break;
        }
        for &g in &adj[f] {
            if dist[g] == usize::MAX {
                dist[g] = dist[f] + 1;
                queue.push_back(g);
            }
        }
    }
    dist[to]
}

/// Re-embed a diagram in the annulus so the disk's two arcs become the
/// marked boundary-parallel arcs. The abstract diagram is unchanged; only
/// the annular position is chosen. A crossingless diagram lands in core
/// position with every loop parallel to the core.
pub fn annular_embed(d: &Diagram, disk: &CompanionDisk) -> Result<AnnularDiagram> {
    let disk = companion_disk_at(d, disk.face, disk.a1, disk.a2)?;
    if d.n_crossings() == 0 {
        return AnnularDiagram::new(
            d.clone(),
            AnnularForm::CoreCircles {
                count: d.free_loops(),
            },
        );
    }
    let channel = disk.face;
    let across = |arc: EdgeId, side: &str| -> Result<FaceId> {
        let (a, b) = d.edge_faces(arc);
        if a == channel && b == channel {
            Err(LinkError::InvalidDisk(format!(
                "{side} arc has the channel on both sides"
            )))
        } else if a == channel {
            Ok(b)
        } else if b == channel {
            Ok(a)
        } else {
            Err(LinkError::InvalidDisk(format!(
                "{side} arc does not flank the disk's face"
            )))
        }
    };
    let outer = across(disk.a1, "first")?;
    let inner = across(disk.a2, "second")?;
    AnnularDiagram::new(
        d.clone(),
        AnnularForm::Spanning {
            arc1: disk.a1,
            arc2: disk.a2,
            channel,
            inner,
            outer,
        },
    )
}

/// Cable stub left of the outward direction on side `s` of source crossing
/// `c`. Blocks occupy nodes 4c..4c+3 quadrant-wise at (+,+), (-,+), (-,-),
/// (+,-), which puts the left stub on node 4c+s and the right one on node
/// 4c+(s+3)%4, both at slot `s`.
fn stub_l(c: usize, s: u8) -> (usize, u8) {
    (4 * c + s as usize, s)
}

fn stub_r(c: usize, s: u8) -> (usize, u8) {
    (4 * c + (s as usize + 3) % 4, s)
}

fn double_with_tags(d: &Diagram, block_tags: &[Option<u32>]) -> Result<Diagram> {
    let mut b = DiagramBuilder::new_empty(0);
    for c in 0..d.n_crossings() {
        for _ in 0..4 {
            b.add_node(block_tags[c]);
        }
        // The under copies run east-west through slots {0,2}, the over
        // copies north-south through {1,3}, matching the source frame.
        b.connect((4 * c, 2), (4 * c + 1, 0));
        b.connect((4 * c + 3, 2), (4 * c + 2, 0));
        b.connect((4 * c, 3), (4 * c + 3, 1));
        b.connect((4 * c + 1, 3), (4 * c + 2, 1));
    }
    for e in 1..=d.n_edges() {
        let [p, q] = d.edge_ends(e);
        // No twist along the section: left of the outgoing direction meets
        // right of the incoming one.
        b.connect(
            stub_l(p.crossing(), p.slot()),
            stub_r(q.crossing(), q.slot()),
        );
        b.connect(
            stub_r(p.crossing(), p.slot()),
            stub_l(q.crossing(), q.slot()),
        );
    }
    b.finalize()
}

/// Reorient so the two cable curves run parallel along the band. Scan-order
/// orientation picks each component's direction independently; comparing
/// the two under-copy passages of block 0 detects a disagreement, and one
/// flip fixes every block at once because the copies stay side by side
/// along the whole band.
fn align_cable_copies(out: &mut Diagram) {
    let top = Dart::new(0, 0);
    let bottom = Dart::new(3, 0);
    if out.is_head(top) != out.is_head(bottom) {
        let comp = out.comp_of_edge(out.edge_at(bottom));
        out.flip_component(comp);
    }
}

/// Blackboard-parallel two-cable of a knot diagram, as drawn: no writhe
/// normalization. Each crossing becomes a 2x2 block with the source shadow;
/// the two resulting curves link exactly the writhe of the input. Source
/// tags spread to all four crossings of their block.
pub fn blackboard_double(d: &Diagram) -> Result<Diagram> {
    if !d.is_connected() {
        return Err(LinkError::Disconnected(
            "doubling wants a connected diagram".into(),
        ));
    }
    if d.n_components() != 1 || d.n_crossings() == 0 {
        return Err(LinkError::NotAKnot(format!(
            "doubling wants a knot with crossings, got {} components over {} crossings",
            d.n_components(),
            d.n_crossings()
        )));
    }
    let mut out = double_with_tags(d, d.tags())?;
    align_cable_copies(&mut out);
    debug_assert_eq!(out.n_components(), 2, "a doubled knot has two curves");
    debug_assert_eq!(
        cable_linking(&out),
        d.writhe(),
        "blackboard framing: the copies link the writhe"
    );
    Ok(out)
}

/// Linking number of a double's two cable curves.
fn cable_linking(double: &Diagram) -> i64 {
    double.linking_matrix().entries[0][1]
}

/// Outcome of `entangle` or `cable`. `output` carries the final diagram;
/// `raw_crossings` is the pre-reduction count and always equals
/// pattern + 4 * doubled companion crossings.
#[derive(Clone, Debug)]
pub struct SatelliteResult {
    pub output: Diagram,
    pub raw_crossings: usize,
    /// Crossing count of `output` (equals `raw_crossings` when no
    /// reduction ran).
    pub reduced_crossings: usize,
    pub pattern_crossings: usize,
    pub companion_crossings: usize,
    /// Crossings of the diagram that was actually doubled (the
    /// writhe-normalized companion for `entangle`, the companion itself
    /// for `cable`).
    pub doubled_crossings: usize,
    /// Linking number of the double's two boundary curves, before any
    /// splice or clasp. Equals the writhe of the doubled diagram.
    pub double_linking: i64,
    /// The cable curves do not link: the satellite respects the zero
    /// framing.
    pub framing: bool,
    /// Wrapping number re-measured in the output's companion annulus.
    pub wrapping: usize,
    /// Two distinct pattern components wind nontrivially around the core.
    pub reliable: bool,
    /// Reduction moves applied to the raw output, replayable.
    pub trace: MoveTrace,
}

/// The doubled companion's boundary curves must not link; their linking
/// number is the writhe of the diagram that was doubled.
pub fn verify_zero_framing(r: &SatelliteResult) -> bool {
    r.double_linking == 0
}

fn empty_trace(crossings: usize) -> MoveTrace {
    MoveTrace {
        before_crossings: crossings,
        after_crossings: crossings,
        moves: Vec::new(),
    }
}

/// Satellite of a wrapping-two annular pattern around a companion knot.
///
/// The companion is writhe-normalized, doubled, and the pattern's marked
/// arcs are spliced along the doubled copies of the lowest edge. Raw size
/// is exactly pattern + 4 * normalized-companion crossings; reducing the
/// kink quadruples afterwards brings it to at most
/// pattern + 6 * companion crossings.
pub fn entangle(
    pattern: &AnnularDiagram,
    companion: &Diagram,
    reduce: bool,
) -> Result<SatelliteResult> {
    let wrapping = pattern.wrapping_number();
    if wrapping < 2 {
        return Err(LinkError::WrappingTooSmall(wrapping));
    }
    if let AnnularForm::CoreCircles { count } = pattern.form {
        if count != 2 {
            return Err(LinkError::InvalidDisk(format!(
                "the positive semiannulus holds exactly two arcs, not {count} core circles"
            )));
        }
    }
    if !companion.is_connected() {
        return Err(LinkError::Disconnected(
            "the companion must be connected".into(),
        ));
    }
    let reliable = pattern.winding.iter().filter(|&&w| w != 0).count() >= 2;
    let pat = &pattern.diagram;
    let pattern_crossings = pat.n_crossings();

    if companion.n_crossings() == 0 {
        // A single free loop: the identity companion. The annulus maps to a
        // plain neighborhood of the unknot and the pattern comes back out
        // unchanged.
        return Ok(SatelliteResult {
            output: pat.clone(),
            raw_crossings: pattern_crossings,
            reduced_crossings: pattern_crossings,
            pattern_crossings,
            companion_crossings: 0,
            doubled_crossings: 0,
            double_linking: 0,
            framing: true,
            wrapping,
            reliable,
            trace: empty_trace(pattern_crossings),
        });
    }
    if companion.n_components() != 1 {
        return Err(LinkError::NotAKnot(format!(
            "the companion must be a knot, got {} components",
            companion.n_components()
        )));
    }

    // Strip inherited tags so the only tagged crossings in the double are
    // the writhe-normalization kinks, each of which doubles into one
    // reducible quadruple.
    let clean = Diagram::new(companion.crossings().to_vec(), companion.free_loops())?;
    let (dk, _) = normalize_writhe(&clean)?;
    let doubled_crossings = dk.n_crossings();
    let mut double = double_with_tags(&dk, dk.tags())?;
    align_cable_copies(&mut double);
    let double_linking = cable_linking(&double);
    debug_assert_eq!(double_linking, 0, "normalized companions double flat");

    let raw = match pattern.form {
        AnnularForm::CoreCircles { .. } => double,
        AnnularForm::Spanning {
            arc1,
            arc2,
            channel,
            ..
        } => splice(pat, arc1, arc2, channel, &dk, &double)?,
        AnnularForm::Contained { .. } => unreachable!("wrapping 0 was rejected above"),
    };
    let raw_crossings = pattern_crossings + 4 * doubled_crossings;
    debug_assert_eq!(raw.n_crossings(), raw_crossings);

    let out_wrapping = corridor_wrapping(&raw, dk.tail(1)).unwrap_or(wrapping);
    debug_assert_eq!(
        out_wrapping, wrapping,
        "the splice preserves the wrapping number"
    );

    let (output, trace) = if reduce {
        reduce_kink_quadruples(&raw)?
    } else {
        let t = empty_trace(raw_crossings);
        (raw, t)
    };
    Ok(SatelliteResult {
        reduced_crossings: output.n_crossings(),
        output,
        raw_crossings,
        pattern_crossings,
        companion_crossings: companion.n_crossings(),
        doubled_crossings,
        double_linking,
        framing: double_linking == 0,
        wrapping: out_wrapping,
        reliable,
        trace,
    })
}

/// Cut the pattern's marked arcs and the doubled copies of the companion's
/// lowest edge, then reconnect so the pattern rides the band. The inserted
/// piece is the complement of the pattern's corridor strip, so its boundary
/// runs against the corridor's: each channel-walk dart lands on the far
/// block's side. That pairing is the planar one keeping each marked arc on
/// one cable copy.
fn splice(
    pat: &Diagram,
    arc1: EdgeId,
    arc2: EdgeId,
    channel: FaceId,
    dk: &Diagram,
    double: &Diagram,
) -> Result<Diagram> {
    let p = dk.tail(1);
    let q = dk.head(1);
    let (c, s) = (p.crossing(), p.slot());
    let (cq, sq) = (q.crossing(), q.slot());
    let g1 = corridor_dart(pat, arc1, channel);
    let g2 = corridor_dart(pat, arc2, channel);
    let h1 = pat.theta(g1);
    let h2 = pat.theta(g2);

    let mut b = DiagramBuilder::from_diagram(double);
    let w = b.disconnect(stub_l(c, s));
    debug_assert_eq!(w, stub_r(cq, sq), "corridor pairs left with right");
    let w = b.disconnect(stub_r(c, s));
    debug_assert_eq!(w, stub_l(cq, sq), "corridor pairs right with left");

    let off = double.n_crossings();
    for _ in 0..pat.n_crossings() {
        // Pattern tags are dropped: they would read as fake quadruples.
        b.add_node(None);
    }
    let moved = |d: Dart| (off + d.crossing(), d.slot());
    for e in 1..=pat.n_edges() {
        if e == arc1 || e == arc2 {
            continue;
        }
        let [x, y] = pat.edge_ends(e);
        b.connect(moved(x), moved(y));
    }
    // The channel walk traverses arc1 and arc2 in opposite directions, so
    // the walk-side darts g1, g2 sit on opposite corridor ends.
    b.connect(moved(h1), stub_l(c, s));
    b.connect(moved(g1), stub_r(cq, sq));
    b.connect(moved(g2), stub_r(c, s));
    b.connect(moved(h2), stub_l(cq, sq));
    b.finalize()
}

/// Wrapping re-measured in the output's companion annulus. The corridor at
/// the doubled lowest edge still bounds it: its two edges are the marked
/// arcs, the face between them is the channel.
fn corridor_wrapping(out: &Diagram, p: Dart) -> Option<usize> {
    let (c, s) = (p.crossing(), p.slot());
    let (ln, ls) = stub_l(c, s);
    let (rn, rs) = stub_r(c, s);
    let top = out.edge_at(Dart::new(ln, ls));
    let bottom = out.edge_at(Dart::new(rn, rs));
    let (t1, t2) = out.edge_faces(top);
    let (b1, b2) = out.edge_faces(bottom);
    for channel in [t1, t2] {
        if channel != b1 && channel != b2 {
            continue;
        }
        let outer = if t1 == channel { t2 } else { t1 };
        let inner = if b1 == channel { b2 } else { b1 };
        let form = AnnularForm::Spanning {
            arc1: top,
            arc2: bottom,
            channel,
            inner,
            outer,
        };
        if let Ok(a) = AnnularDiagram::new(out.clone(), form) {
            return Some(a.wrapping_number());
        }
    }
    None
}

/// Blackboard double of the companion as drawn, closed into one curve by a
/// single clasp crossing: 4 cr + 1 crossings exactly, one component. The
/// companion is not writhe-normalized; the pre-clasp framing rides along
/// in `double_linking`.
pub fn cable(companion: &Diagram) -> Result<SatelliteResult> {
    cable_signed(companion, true)
}

/// `positive_clasp` picks the clasp crossing's sign as seen by parallel
/// cable strands.
pub fn cable_signed(companion: &Diagram, positive_clasp: bool) -> Result<SatelliteResult> {
    if !companion.is_connected() {
        return Err(LinkError::Disconnected(
            "the companion must be connected".into(),
        ));
    }
    if companion.n_components() != 1 || companion.n_crossings() == 0 {
        return Err(LinkError::NotAKnot(format!(
            "cabling wants a knot with at least one crossing, got {} components over {} crossings",
            companion.n_components(),
            companion.n_crossings()
        )));
    }
    let clean = Diagram::new(companion.crossings().to_vec(), companion.free_loops())?;
    let double = blackboard_double(&clean)?;
    let double_linking = cable_linking(&double);

    let p = clean.tail(1);
    let q = clean.head(1);
    let (c, s) = (p.crossing(), p.slot());
    let (cq, sq) = (q.crossing(), q.slot());
    let mut b = DiagramBuilder::from_diagram(&double);
    let w = b.disconnect(stub_l(c, s));
    debug_assert_eq!(w, stub_r(cq, sq), "corridor pairs left with right");
    let w = b.disconnect(stub_r(c, s));
    debug_assert_eq!(w, stub_l(cq, sq), "corridor pairs right with left");
    let n = b.add_node(None);
    let tw = stub_l(c, s);
    let bw = stub_r(c, s);
    let te = stub_r(cq, sq);
    let be = stub_l(cq, sq);
    // Each corridor side crosses to the other, closing the two copies into
    // one curve; the slot assignment sets which diagonal goes over.
    if positive_clasp {
        b.connect((n, 0), te);
        b.connect((n, 1), tw);
        b.connect((n, 2), bw);
        b.connect((n, 3), be);
    } else {
        b.connect((n, 0), tw);
        b.connect((n, 1), bw);
        b.connect((n, 2), be);
        b.connect((n, 3), te);
    }
    let output = b.finalize()?;
    let raw_crossings = 4 * clean.n_crossings() + 1;
    debug_assert_eq!(output.n_crossings(), raw_crossings);
    debug_assert_eq!(output.n_components(), 1, "a cable is one curve");
    Ok(SatelliteResult {
        raw_crossings,
        reduced_crossings: raw_crossings,
        pattern_crossings: 1,
        companion_crossings: clean.n_crossings(),
        doubled_crossings: clean.n_crossings(),
        double_linking,
        framing: double_linking == 0,
        wrapping: 2,
        reliable: false,
        trace: empty_trace(raw_crossings),
        output,
    })
}

#[derive(Serialize, Deserialize)]
struct AnnularRepr {
    code: String,
    form: AnnularForm,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    winding: Option<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    wrapping: Option<usize>,
}

impl Serialize for AnnularDiagram {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        AnnularRepr {
            code: emit_pd(&self.diagram),
            form: self.form,
            winding: Some(self.winding.clone()),
            wrapping: Some(self.wrapping_number()),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for AnnularDiagram {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let repr = AnnularRepr::deserialize(de)?;
        let d = parse_pd(&repr.code).map_err(D::Error::custom)?;
        AnnularDiagram::new(d, repr.form).map_err(D::Error::custom)
    }
}
