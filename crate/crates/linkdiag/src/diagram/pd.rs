//! PD code text format.
//!
//! A diagram is a whitespace-separated list of tokens. `X(a,b,c,d)` is a
//! crossing: the four edge labels counterclockwise starting at the under
//! strand, so slots 0 and 2 are the under edges. `O` is a closed curve with
//! no crossings. Labels run 1..2n and each appears exactly twice.
//!
//! Orientation is derived, not stored: the parser directs the lowest label
//! of every component from its first occurrence (crossings in listed order,
//! slots 0..3) to its second. On conventionally numbered codes, where labels
//! ascend along the strand away from position 0, this reads the strand
//! backwards; that is invisible for knots and a global reversal for links,
//! so the derived data agree either way.
//!
//! `emit_pd` renumbers labels consecutively along each component, starts
//! every tuple at the under-strand exit and sorts tuples by first label.
//! The start edge of each component is chosen so that re-parsing reproduces
//! the orientation (the lowest label must first occur at its tail), which
//! makes the canonical form a fixed point of parse-then-emit. In the rare
//! configurations where no start assignment is orientation-stable the
//! diagram is emitted exactly as stored, which round-trips trivially.

use super::{Crossing, Dart, Diagram};
use crate::error::{LinkError, Result};

pub fn parse_pd(text: &str) -> Result<Diagram> {
    let mut crossings = Vec::new();
    let mut free_loops = 0usize;
    for tok in text.split_whitespace() {
        if tok == "O" {
            free_loops += 1;
            continue;
        }
        let inner = tok
            .strip_prefix("X(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| LinkError::MalformedCode(format!("bad token {tok:?}")))?;
        let parts: Vec<&str> = inner.split(',').collect();
        if parts.len() != 4 {
            return Err(LinkError::MalformedCode(format!(
                "crossing {tok:?} needs 4 labels"
            )));
        }
        let mut edges = [0usize; 4];
        for (i, p) in parts.iter().enumerate() {
            edges[i] = p
                .trim()
                .parse::<usize>()
                .map_err(|_| LinkError::MalformedCode(format!("bad label {p:?} in {tok:?}")))?;
        }
        crossings.push(Crossing { edges });
    }
    Diagram::new(crossings, free_loops)
}

const EMIT_SEARCH_CAP: usize = 50_000;

pub fn emit_pd(d: &Diagram) -> String {
    let n = d.n_crossings();
    if n == 0 {
        return vec!["O"; d.free_loops()].join(" ");
    }

    // Head-dart traversal of every component, fixed cyclic order.
    let mut cycles: Vec<Vec<Dart>> = Vec::new();
    for comp in 0..d.n_graph_components() {
        let lowest = (1..=d.n_edges())
            .find(|&e| d.comp_of_edge(e) == comp)
            .expect("component has an edge");
        let start = d.head(lowest);
        let mut cyc = Vec::new();
        let mut dart = start;
        loop {
            cyc.push(dart);
            dart = d.succ(dart);
            if dart == start {
                break;
            }
        }
        cycles.push(cyc);
    }

    let mut starts = vec![0usize; cycles.len()];
    let mut tried = 0usize;
    loop {
        if let Some(tuples) = try_emit(d, &cycles, &starts) {
            let mut out: Vec<String> = tuples
                .iter()
                .map(|t| format!("X({},{},{},{})", t[0], t[1], t[2], t[3]))
                .collect();
            out.extend(std::iter::repeat_n("O".to_string(), d.free_loops()));
            return out.join(" ");
        }
        tried += 1;
        if tried >= EMIT_SEARCH_CAP {
            break;
        }
        // Next start combination; exhaustion falls through to the fallback.
        let mut i = 0;
        loop {
            if i == cycles.len() {
                return emit_as_stored(d);
            }
            starts[i] += 1;
            if starts[i] < cycles[i].len() {
                break;
            }
            starts[i] = 0;
            i += 1;
        }
    }
    emit_as_stored(d)
}

/// Relabel along the cycles from the given starts; return the sorted tuple
/// list when the labelling re-parses to the same orientation.
fn try_emit(d: &Diagram, cycles: &[Vec<Dart>], starts: &[usize]) -> Option<Vec<[usize; 4]>> {
    let n = d.n_crossings();
    let mut new_label = vec![0usize; d.n_edges()]; // old label-1 -> new label
    let mut old_of_new = vec![0usize; d.n_edges() + 1];
    let mut block_start = vec![0usize; cycles.len()];
    let mut next = 1usize;
    for (ci, cyc) in cycles.iter().enumerate() {
        block_start[ci] = next;
        for k in 0..cyc.len() {
            let dart = cyc[(starts[ci] + k) % cyc.len()];
            let old = d.edge_at(dart);
            new_label[old - 1] = next;
            old_of_new[next] = old;
            next += 1;
        }
    }

    // Tuples start where the under strand leaves the crossing; position 0 is
    // then a tail, so a lowest label sitting there re-parses tail-first.
    let mut tuples: Vec<([usize; 4], usize, u8)> = (0..n)
        .map(|c| {
            let u_start = if d.is_head(Dart::new(c, 0)) { 2u8 } else { 0u8 };
            let mut t = [0usize; 4];
            for p in 0..4u8 {
                let slot = (u_start + p) % 4;
                t[p as usize] = new_label[d.edge_at(Dart::new(c, slot)) - 1];
            }
            (t, c, u_start)
        })
        .collect();
    tuples.sort_unstable();

    // Orientation stability: scanning the emitted code, the first occurrence
    // of each component's lowest label must be the tail of its edge.
    for (ci, _) in cycles.iter().enumerate() {
        let target = block_start[ci];
        let mut first: Option<Dart> = None;
        'scan: for (t, c, u_start) in &tuples {
            for p in 0..4usize {
                if t[p] == target {
                    first = Some(Dart::new(*c, (u_start + p as u8) % 4));
                    break 'scan;
                }
            }
        }
        if first != Some(d.tail(old_of_new[target])) {
            return None;
        }
    }

    Some(tuples.into_iter().map(|(t, _, _)| t).collect())
}

/// Emit crossings exactly as stored: same order, same slots, same labels.
/// Re-parsing rebuilds the identical structure and therefore re-derives the
/// identical orientation.
pub fn emit_as_stored(d: &Diagram) -> String {
    let mut toks: Vec<String> = d
        .crossings()
        .iter()
        .map(|x| format!("X({},{},{},{})", x.edges[0], x.edges[1], x.edges[2], x.edges[3]))
        .collect();
    toks.extend(std::iter::repeat_n("O".to_string(), d.free_loops()));
    toks.join(" ")
}
