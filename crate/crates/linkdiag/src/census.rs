//! Small-diagram census and exact bound arithmetic.
//!
//! The enumerator builds every connected 4-valent planar rotation system
//! with a given crossing count, assigns over/under data, and reduces each
//! result to a canonical code, so the counts are of diagram classes rather
//! than labellings. By default classes are taken up to reflection and
//! mirror image together (a link and its mirror count once); the chiral
//! convention is a flag away. Prime classes are bucketed by
//! `invariant_fingerprint`, which can only merge distinct links, so bucket
//! counts are lower bounds on link-class counts and the table labels them
//! that way.
//!
//! The bound functions at the bottom evaluate the crossing-growth
//! inequalities those counts feed: everything is exact `BigRational`
//! arithmetic, square roots are eliminated by squaring, and no float ever
//! decides a comparison.

use std::collections::{BTreeSet, HashSet};
use std::io::Write;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::diagram::{Crossing, Dart, Diagram};
use crate::error::{LinkError, Result};
use crate::invariants::{invariant_fingerprint, Fingerprint};
use crate::structure::is_prime_diagram;

/// Enumeration cap: the class count and the per-class invariant work both
/// blow up fast enough past this that a census stops being a desk job.
pub const DEFAULT_CENSUS_BUDGET: usize = 8;

const UNSET: u32 = u32::MAX;

// ---------------------------------------------------------------------------
// Canonical codes

/// Dart `offset` rotation steps from `e` around its crossing; `refl` walks
/// the rotation backwards.
fn rot(e: u32, offset: u32, refl: bool) -> u32 {
    let s = e & 3;
    let s2 = if refl { (s + 4 - offset) & 3 } else { (s + offset) & 3 };
    (e & !3) | s2
}

/// Rotation steps from `entry` to `t` (same crossing) in the `refl` sense.
fn offset_of(entry: u32, t: u32, refl: bool) -> u32 {
    let fwd = ((t & 3) + 4 - (entry & 3)) & 3;
    if refl {
        (4 - fwd) & 3
    } else {
        fwd
    }
}

/// Relabelling-independent code for one choice of (root, reflection,
/// over/under swap): crossings in breadth-first discovery order, each
/// contributing the under-parity of its entry dart (dropped for shadow
/// codes) and its four theta targets in rotation order from the entry,
/// every target written as 4 * discovered_id + rotation_offset. `b` rotates
/// the slot labels of a crossing by one, turning its under strand into the
/// over strand.
fn bfs_code(
    theta: &[u32],
    parity: Option<(&[u8], bool)>,
    root: u32,
    refl: bool,
    out: &mut Vec<u32>,
) {
    let n = theta.len() / 4;
    out.clear();
    let mut id = vec![UNSET; n];
    let mut entry = vec![UNSET; n];
    let mut order = Vec::with_capacity(n);
    id[root as usize / 4] = 0;
    entry[root as usize / 4] = root;
    order.push(root as usize / 4);
    let mut next_id = 1u32;
    let mut k = 0;
    while k < order.len() {
        let c = order[k];
        k += 1;
        let e = entry[c];
        if let Some((b, swap)) = parity {
            out.push((e + b[c] as u32 + swap as u32) & 1);
        }
        for j in 0..4 {
            let d = rot(e, j, refl);
            let t = theta[d as usize];
            let c2 = t as usize / 4;
            if id[c2] == UNSET {
                id[c2] = next_id;
                next_id += 1;
                entry[c2] = t;
                order.push(c2);
            }
            out.push(id[c2] * 4 + offset_of(entry[c2], t, refl));
        }
    }
    debug_assert_eq!(order.len(), n, "code walks expect a connected pairing");
}

/// Symmetry choices folded into a canonical code. Reflection reverses all
/// rotations with over/under kept; the swap flips over/under with rotations
/// kept; each alone mirrors the link and their composite preserves it.
fn symmetry_group(mirror_identified: bool) -> &'static [(bool, bool)] {
    if mirror_identified {
        &[(false, false), (false, true), (true, false), (true, true)]
    } else {
        &[(false, false), (true, true)]
    }
}

fn canonical_code_raw(theta: &[u32], b: &[u8], mirror_identified: bool) -> Vec<u32> {
    let mut best: Vec<u32> = Vec::new();
    let mut buf = Vec::new();
    for root in 0..theta.len() as u32 {
        for &(refl, swap) in symmetry_group(mirror_identified) {
            bfs_code(theta, Some((b, swap)), root, refl, &mut buf);
            if best.is_empty() || buf < best {
                std::mem::swap(&mut best, &mut buf);
            }
        }
    }
    best
}

fn canonical_shadow_raw(theta: &[u32]) -> Vec<u32> {
    let mut best: Vec<u32> = Vec::new();
    let mut buf = Vec::new();
    for root in 0..theta.len() as u32 {
        for refl in [false, true] {
            bfs_code(theta, None, root, refl, &mut buf);
            if best.is_empty() || buf < best {
                std::mem::swap(&mut best, &mut buf);
            }
        }
    }
    best
}

fn theta_array(d: &Diagram) -> Vec<u32> {
    (0..4 * d.n_crossings() as u32)
        .map(|i| d.theta(Dart(i)).0)
        .collect()
}

/// Canonical code of a diagram's class: the lexicographic minimum of
/// `bfs_code` over every root dart, the reflection, and (when
/// `mirror_identified`) the over/under swap. Equal codes mean isomorphic
/// rotation systems up to exactly those symmetries. Crossingless diagrams
/// all get the empty code.
pub fn canonical_code(d: &Diagram, mirror_identified: bool) -> Vec<u32> {
    let n = d.n_crossings();
    if n == 0 {
        return Vec::new();
    }
    canonical_code_raw(&theta_array(d), &vec![0u8; n], mirror_identified)
}

/// Rebuild the class representative a canonical code describes. The code's
/// target tokens are literally the theta array of the relabelled diagram,
/// interleaved with one under-parity bit per crossing.
fn decode(code: &[u32]) -> Diagram {
    let n = code.len() / 5;
    let mut theta = vec![0u32; 4 * n];
    let mut b = vec![0u8; n];
    for c in 0..n {
        b[c] = code[5 * c] as u8;
        for j in 0..4 {
            theta[4 * c + j] = code[5 * c + 1 + j];
        }
    }
    build_diagram(&theta, &b)
}

/// Materialize a pairing plus per-crossing parity as a `Diagram`: slot `s`
/// of crossing `c` reads the edge through raw dart `4c + ((s + b_c) mod 4)`,
/// so `b_c = 1` exchanges the under and over strands there.
fn build_diagram(theta: &[u32], b: &[u8]) -> Diagram {
    let n = theta.len() / 4;
    let mut edge_of = vec![0usize; theta.len()];
    let mut next_edge = 0usize;
    for d in 0..theta.len() {
        let t = theta[d] as usize;
        debug_assert_eq!(theta[t] as usize, d, "pairing is an involution");
        if d < t {
            next_edge += 1;
            edge_of[d] = next_edge;
            edge_of[t] = next_edge;
        }
    }
    let crossings = (0..n)
        .map(|c| Crossing {
            edges: std::array::from_fn(|s| edge_of[4 * c + ((s + b[c] as usize) & 3)]),
        })
        .collect();
    Diagram::new(crossings, 0).expect("enumerated pairings are connected and planar")
}

// ---------------------------------------------------------------------------
// Generator

/// Partially built rotation system. Growth always pairs the smallest free
/// dart, either with a free dart on the same boundary cycle (the cycle
/// splits in two and the surface stays a sphere) or with slot 0 of a fresh
/// crossing (whose other three slots join the cycle in rotation order).
/// Pairing across two boundary cycles would add a handle, so it is never
/// offered; forcing slot 0 on fresh crossings kills relabelled duplicates
/// up to the rotation of crossing 0, and the leftover multiplicity is
/// absorbed by canonical-code dedupe.
#[derive(Clone)]
struct PartialMap {
    n: usize,
    used: usize,
    theta: Vec<u32>,
    nxt: Vec<u32>,
    prv: Vec<u32>,
    cyc: Vec<u32>,
    next_cyc: u32,
    free: usize,
}

impl PartialMap {
    fn start(n: usize) -> PartialMap {
        let mut m = PartialMap {
            n,
            used: 1,
            theta: vec![UNSET; 4 * n],
            nxt: vec![UNSET; 4 * n],
            prv: vec![UNSET; 4 * n],
            cyc: vec![UNSET; 4 * n],
            next_cyc: 1,
            free: 4,
        };
        for s in 0..4usize {
            m.nxt[s] = (s as u32 + 1) & 3;
            m.prv[s] = (s as u32 + 3) & 3;
            m.cyc[s] = 0;
        }
        m
    }

    fn smallest_free(&self) -> Option<u32> {
        (0..4 * self.used as u32).find(|&d| self.theta[d as usize] == UNSET)
    }

    fn complete(&self) -> bool {
        self.free == 0 && self.used == self.n
    }

    /// Children in a fixed order: same-cycle partners in walk order, then
    /// the fresh crossing.
    fn children(&self) -> Vec<PartialMap> {
        let Some(d) = self.smallest_free() else {
            return Vec::new();
        };
        let mut out = Vec::new();
        let mut e = self.nxt[d as usize];
        while e != d {
            let mut child = self.clone();
            child.pair_split(d, e);
            out.push(child);
            e = self.nxt[e as usize];
        }
        if self.used < self.n {
            let mut child = self.clone();
            child.attach(d);
            out.push(child);
        }
        out
    }

    fn pair_split(&mut self, d: u32, e: u32) {
        debug_assert_eq!(self.cyc[d as usize], self.cyc[e as usize]);
        self.theta[d as usize] = e;
        self.theta[e as usize] = d;
        self.free -= 2;
        // The arc strictly between d and e becomes its own cycle; the arc
        // strictly between e and d keeps the old id.
        let mut seg = Vec::new();
        let mut x = self.nxt[d as usize];
        while x != e {
            seg.push(x);
            x = self.nxt[x as usize];
        }
        self.relink(&seg, true);
        let mut seg = Vec::new();
        let mut x = self.nxt[e as usize];
        while x != d {
            seg.push(x);
            x = self.nxt[x as usize];
        }
        self.relink(&seg, false);
    }

    fn relink(&mut self, seg: &[u32], fresh: bool) {
        if seg.is_empty() {
            return;
        }
        let id = if fresh {
            let id = self.next_cyc;
            self.next_cyc += 1;
            id
        } else {
            self.cyc[seg[0] as usize]
        };
        let k = seg.len();
        for (i, &a) in seg.iter().enumerate() {
            self.nxt[a as usize] = seg[(i + 1) % k];
            self.prv[a as usize] = seg[(i + k - 1) % k];
            self.cyc[a as usize] = id;
        }
    }

    fn attach(&mut self, d: u32) {
        let base = 4 * self.used as u32;
        self.used += 1;
        self.theta[d as usize] = base;
        self.theta[base as usize] = d;
        self.free += 2;
        let id = self.cyc[d as usize];
        let (p1, p2, p3) = (base + 1, base + 2, base + 3);
        if self.nxt[d as usize] == d {
            self.nxt[p3 as usize] = p1;
            self.prv[p1 as usize] = p3;
        } else {
            let before = self.prv[d as usize];
            let after = self.nxt[d as usize];
            self.nxt[before as usize] = p1;
            self.prv[p1 as usize] = before;
            self.nxt[p3 as usize] = after;
            self.prv[after as usize] = p3;
        }
        self.nxt[p1 as usize] = p2;
        self.prv[p2 as usize] = p1;
        self.nxt[p2 as usize] = p3;
        self.prv[p3 as usize] = p2;
        for p in [p1, p2, p3] {
            self.cyc[p as usize] = id;
        }
    }
}

fn leaves_from(st: &PartialMap, sink: &mut impl FnMut(&[u32])) {
    let kids = st.children();
    if kids.is_empty() {
        if st.complete() {
            sink(&st.theta);
        }
        return;
    }
    for k in &kids {
        leaves_from(k, sink);
    }
}

/// One complete pairing: dedupe its shadow, and on first sight sweep every
/// over/under assignment into canonical diagram codes.
fn handle_leaf(
    theta: &[u32],
    shadows: &mut BTreeSet<Vec<u32>>,
    classes: &mut BTreeSet<Vec<u32>>,
    mirror_identified: bool,
) {
    if !shadows.insert(canonical_shadow_raw(theta)) {
        return;
    }
    let n = theta.len() / 4;
    let mut b = vec![0u8; n];
    for mask in 0u32..(1 << n) {
        for (c, bit) in b.iter_mut().enumerate() {
            *bit = (mask >> c & 1) as u8;
        }
        classes.insert(canonical_code_raw(theta, &b, mirror_identified));
    }
}

/// Breadth-first expansion of the search tree until at least `target`
/// incomplete states exist; complete pairings met on the way are returned
/// separately. The expansion is deterministic, so any later partition of
/// the seeds yields the same leaf set.
fn make_seeds(n: usize, target: usize) -> (Vec<PartialMap>, Vec<Vec<u32>>) {
    let mut frontier = vec![PartialMap::start(n)];
    let mut leaves = Vec::new();
    while frontier.len() < target {
        let mut next = Vec::new();
        let mut expanded = false;
        for st in &frontier {
            let kids = st.children();
            if kids.is_empty() {
                if st.complete() {
                    leaves.push(st.theta.clone());
                }
            } else {
                expanded = true;
                next.extend(kids);
            }
        }
        if !expanded {
            return (Vec::new(), leaves);
        }
        frontier = next;
    }
    (frontier, leaves)
}

// ---------------------------------------------------------------------------
// Census tables

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CensusOptions {
    /// Worker threads; 0 picks the available parallelism. The output is
    /// byte-identical for every choice.
    pub workers: usize,
    /// Largest admissible crossing count.
    pub budget: usize,
    /// Count a diagram and its mirror image as one class (the convention
    /// for unoriented link pairs); false keeps chiral classes apart.
    pub mirror_identified: bool,
}

impl Default for CensusOptions {
    fn default() -> Self {
        CensusOptions {
            workers: 0,
            budget: DEFAULT_CENSUS_BUDGET,
            mirror_identified: true,
        }
    }
}

/// One enumerated diagram class at exactly `n` crossings.
#[derive(Debug, Clone)]
pub struct CensusClass {
    pub n: usize,
    /// Canonical code; also the dedupe key.
    pub code: Vec<u32>,
    /// Representative rebuilt from the code, so it is the same diagram for
    /// every run and worker count.
    pub diagram: Diagram,
    pub prime: bool,
    pub fingerprint: Fingerprint,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusRow {
    pub n: usize,
    /// Connected diagram classes with exactly n crossings.
    pub diagrams: u64,
    /// Those that pass `is_prime_diagram`.
    pub prime_diagrams: u64,
    /// Distinct fingerprints among the prime classes: a lower bound on the
    /// prime non-split link classes needing exactly n crossings here.
    pub link_classes_lb: u64,
    pub cum_prime_diagrams: u64,
    pub cum_link_classes_lb: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusTable {
    pub mirror_identified: bool,
    /// Provenance: which code produced the rows.
    pub generator: String,
    pub rows: Vec<CensusRow>,
}

/// Connected diagram classes with exactly `n` crossings, sorted by
/// canonical code.
pub fn enumerate_classes(n: usize, opts: &CensusOptions) -> Result<Vec<CensusClass>> {
    if n == 0 {
        return Err(LinkError::EmptyDiagram);
    }
    if n > opts.budget {
        return Err(LinkError::BudgetExceeded(format!(
            "census at {n} crossings over budget {}",
            opts.budget
        )));
    }
    let workers = resolve_workers(opts.workers);
    let mirror = opts.mirror_identified;
    let (seeds, early) = make_seeds(n, workers * 4);
    let mut shadows = BTreeSet::new();
    let mut classes = BTreeSet::new();
    for theta in &early {
        handle_leaf(theta, &mut shadows, &mut classes, mirror);
    }
    if workers <= 1 || seeds.len() <= 1 {
        for s in &seeds {
            leaves_from(s, &mut |t| handle_leaf(t, &mut shadows, &mut classes, mirror));
        }
    } else {
        let results: Vec<BTreeSet<Vec<u32>>> = std::thread::scope(|sc| {
            let seeds = &seeds;
            let handles: Vec<_> = (0..workers)
                .map(|w| {
                    sc.spawn(move || {
                        let mut sh = BTreeSet::new();
                        let mut cl = BTreeSet::new();
                        for (i, s) in seeds.iter().enumerate() {
                            if i % workers == w {
                                leaves_from(s, &mut |t| handle_leaf(t, &mut sh, &mut cl, mirror));
                            }
                        }
                        cl
                    })
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("census worker"))
                .collect()
        });
        for r in results {
            classes.extend(r);
        }
    }
    classes
        .iter()
        .map(|code| {
            let diagram = decode(code);
            debug_assert_eq!(diagram.n_crossings(), n);
            let (prime, _) = is_prime_diagram(&diagram)?;
            Ok(CensusClass {
                n,
                code: code.clone(),
                prime,
                fingerprint: invariant_fingerprint(&diagram),
                diagram,
            })
        })
        .collect()
}

fn resolve_workers(workers: usize) -> usize {
    if workers > 0 {
        workers
    } else {
        std::thread::available_parallelism()
            .map(|p| p.get())
            .unwrap_or(1)
    }
}

pub fn enumerate_diagrams(n_max: usize) -> Result<CensusTable> {
    enumerate_diagrams_opts(n_max, &CensusOptions::default())
}

/// Census rows for 1..=n_max. Deterministic: identical rows for every run
/// and worker count.
pub fn enumerate_diagrams_opts(n_max: usize, opts: &CensusOptions) -> Result<CensusTable> {
    if n_max > opts.budget {
        return Err(LinkError::BudgetExceeded(format!(
            "census to {n_max} crossings over budget {}",
            opts.budget
        )));
    }
    let mut rows = Vec::new();
    let (mut cum_p, mut cum_l) = (0u64, 0u64);
    for n in 1..=n_max {
        let classes = enumerate_classes(n, opts)?;
        let prime: Vec<_> = classes.iter().filter(|c| c.prime).collect();
        let buckets: HashSet<&Fingerprint> = prime.iter().map(|c| &c.fingerprint).collect();
        cum_p += prime.len() as u64;
        cum_l += buckets.len() as u64;
        rows.push(CensusRow {
            n,
            diagrams: classes.len() as u64,
            prime_diagrams: prime.len() as u64,
            link_classes_lb: buckets.len() as u64,
            cum_prime_diagrams: cum_p,
            cum_link_classes_lb: cum_l,
        });
    }
    Ok(CensusTable {
        mirror_identified: opts.mirror_identified,
        generator: generator_tag(),
        rows,
    })
}

fn generator_tag() -> String {
    format!("linkdiag-census {}", env!("CARGO_PKG_VERSION"))
}

const CSK_MAGIC: &str = "# linkdiag census v1";
const CSK_COLUMNS: &str =
    "# columns: n diagrams prime_diagrams link_classes_lb cum_prime_diagrams cum_link_classes_lb";

impl CensusTable {
    /// The cumulative prime-link lower-bound series; the P series the
    /// recursion check consumes.
    pub fn prime_link_cumulative(&self) -> Vec<u64> {
        self.rows.iter().map(|r| r.cum_link_classes_lb).collect()
    }

    /// Synthetic table whose per-n link counts are given directly; the
    /// diagram columns mirror them. For bound experiments and tests.
    pub fn from_prime_counts(p: &[u64]) -> CensusTable {
        let mut cum = 0u64;
        let rows = p
            .iter()
            .enumerate()
            .map(|(i, &count)| {
                cum += count;
                CensusRow {
                    n: i + 1,
                    diagrams: count,
                    prime_diagrams: count,
                    link_classes_lb: count,
                    cum_prime_diagrams: cum,
                    cum_link_classes_lb: cum,
                }
            })
            .collect();
        CensusTable {
            mirror_identified: true,
            generator: "synthetic".into(),
            rows,
        }
    }

    /// Cumulative columns must be the prefix sums of the per-n columns,
    /// with rows numbered 1..=len.
    pub fn check(&self) -> Result<()> {
        let (mut cum_p, mut cum_l) = (0u64, 0u64);
        for (i, r) in self.rows.iter().enumerate() {
            cum_p += r.prime_diagrams;
            cum_l += r.link_classes_lb;
            if r.n != i + 1 || r.cum_prime_diagrams != cum_p || r.cum_link_classes_lb != cum_l {
                return Err(LinkError::MalformedCode(format!(
                    "census table row {} breaks the cumulative identity",
                    r.n
                )));
            }
        }
        Ok(())
    }

    /// The persisted form, byte for byte: the four header lines, then one
    /// row per line as six space-separated decimal numbers, `\n` endings.
    pub fn to_csk(&self) -> String {
        let mut s = String::new();
        s.push_str(CSK_MAGIC);
        s.push('\n');
        s.push_str(&format!("# mirror_identified={}\n", self.mirror_identified));
        s.push_str(&format!("# generator={}\n", self.generator));
        s.push_str(CSK_COLUMNS);
        s.push('\n');
        for r in &self.rows {
            s.push_str(&format!(
                "{} {} {} {} {} {}\n",
                r.n,
                r.diagrams,
                r.prime_diagrams,
                r.link_classes_lb,
                r.cum_prime_diagrams,
                r.cum_link_classes_lb
            ));
        }
        s
    }

    pub fn parse_csk(text: &str) -> Result<CensusTable> {
        let bad = |m: &str| LinkError::MalformedCode(format!("census table: {m}"));
        let mut lines = text.lines();
        if lines.next() != Some(CSK_MAGIC) {
            return Err(bad("missing magic line"));
        }
        let mirror_identified = match lines.next().and_then(|l| l.strip_prefix("# mirror_identified=")) {
            Some("true") => true,
            Some("false") => false,
            _ => return Err(bad("missing mirror_identified line")),
        };
        let generator = lines
            .next()
            .and_then(|l| l.strip_prefix("# generator="))
            .ok_or_else(|| bad("missing generator line"))?
            .to_string();
        if lines.next() != Some(CSK_COLUMNS) {
            return Err(bad("missing columns line"));
        }
        let mut rows = Vec::new();
        for line in lines {
            let fields: Vec<u64> = line
                .split(' ')
                .map(|f| f.parse().map_err(|_| bad(&format!("bad row: {line}"))))
                .collect::<Result<_>>()?;
            if fields.len() != 6 {
                return Err(bad(&format!("bad row: {line}")));
            }
            rows.push(CensusRow {
                n: fields[0] as usize,
                diagrams: fields[1],
                prime_diagrams: fields[2],
                link_classes_lb: fields[3],
                cum_prime_diagrams: fields[4],
                cum_link_classes_lb: fields[5],
            });
        }
        let t = CensusTable {
            mirror_identified,
            generator,
            rows,
        };
        t.check()?;
        Ok(t)
    }

    /// Persist append-only. A fresh path gets the full table; an existing
    /// file is re-parsed and every overlapping row must match exactly, then
    /// any additional rows are appended. Rerunning with the same or a
    /// smaller n_max therefore verifies and leaves the bytes untouched.
    pub fn save_csk(&self, path: &Path) -> Result<()> {
        let io = |e: std::io::Error| LinkError::Io(format!("{}: {e}", path.display()));
        let old_text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                return write_atomic(path, &self.to_csk()).map_err(io);
            }
            Err(e) => return Err(io(e)),
        };
        let old = CensusTable::parse_csk(&old_text)?;
        if old.mirror_identified != self.mirror_identified {
            return Err(LinkError::TableMismatch(format!(
                "{}: mirror_identified {} on disk, {} in memory",
                path.display(),
                old.mirror_identified,
                self.mirror_identified
            )));
        }
        let common = old.rows.len().min(self.rows.len());
        for i in 0..common {
            if old.rows[i] != self.rows[i] {
                return Err(LinkError::TableMismatch(format!(
                    "{}: row n={} disagrees with the file",
                    path.display(),
                    i + 1
                )));
            }
        }
        if self.rows.len() <= old.rows.len() {
            return Ok(());
        }
        let mut text = old_text;
        for r in &self.rows[old.rows.len()..] {
            text.push_str(&format!(
                "{} {} {} {} {} {}\n",
                r.n,
                r.diagrams,
                r.prime_diagrams,
                r.link_classes_lb,
                r.cum_prime_diagrams,
                r.cum_link_classes_lb
            ));
        }
        write_atomic(path, &text).map_err(io)
    }
}

fn write_atomic(path: &Path, text: &str) -> std::io::Result<()> {
    let tmp = path.with_extension(format!("tmp.{}", std::process::id()));
    let write = (|| {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(text.as_bytes())?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)
    })();
    if write.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    write
}

// ---------------------------------------------------------------------------
// Exact bound arithmetic

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedConstant {
    pub name: String,
    pub value: String,
}

/// One evaluated comparison. `lhs`, `rhs` are exact rationals rendered as
/// `numer` or `numer/denom`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundItem {
    pub name: String,
    pub lhs: String,
    pub relation: String,
    pub rhs: String,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    pub constants: Vec<NamedConstant>,
    pub items: Vec<BoundItem>,
    pub all_pass: bool,
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn rat_u(n: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn rat_text(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn pow_rat(base: &BigRational, k: u32) -> BigRational {
    BigRational::new(base.numer().pow(k), base.denom().pow(k))
}

fn ten_pow_neg(k: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(10).pow(k))
}

fn cmp_item(name: String, lhs: &BigRational, relation: &str, rhs: &BigRational) -> BoundItem {
    let pass = match relation {
        "<" => lhs < rhs,
        ">" => lhs > rhs,
        "<=" => lhs <= rhs,
        ">=" => lhs >= rhs,
        _ => lhs == rhs,
    };
    BoundItem {
        name,
        lhs: rat_text(lhs),
        relation: relation.into(),
        rhs: rat_text(rhs),
        pass,
    }
}

fn report(constants: Vec<NamedConstant>, items: Vec<BoundItem>) -> BoundReport {
    let all_pass = items.iter().all(|i| i.pass);
    BoundReport {
        constants,
        items,
        all_pass,
    }
}

/// Exact checks of the growth and threshold constants behind the counting
/// bounds. Square roots never materialize: (sqrt(a)+p)/q < t is decided by
/// comparing a with (tq-p)^2 once tq-p is checked positive, and everything
/// else is plain `BigRational` comparison, so evaluation order cannot
/// change any verdict.
pub fn evaluate_constants() -> BoundReport {
    let ten4 = rat(52, 5);
    let six14 = rat(307, 50);
    let one = BigRational::one();
    let constants = vec![
        NamedConstant {
            name: "link_growth_ratio_cap".into(),
            value: "52/5".into(),
        },
        NamedConstant {
            name: "knot_growth_ratio_floor".into(),
            value: "307/50".into(),
        },
        NamedConstant {
            name: "composite_crossing_denominator".into(),
            value: "152".into(),
        },
    ];
    let mut items = Vec::new();

    let edge = &ten4 * rat(20, 1) - rat(91, 1);
    assert!(edge.is_positive(), "squaring preserves the comparison");
    items.push(cmp_item(
        "(sqrt(13681)+91)/20 < 10.4".into(),
        &rat(13681, 1),
        "<",
        &(&edge * &edge),
    ));

    let edge = &six14 * rat(40, 1) - rat(101, 1);
    assert!(edge.is_positive(), "squaring preserves the comparison");
    items.push(cmp_item(
        "(sqrt(21001)+101)/40 > 6.14".into(),
        &rat(21001, 1),
        ">",
        &(&edge * &edge),
    ));

    for c in 1..=20u32 {
        let lhs = &one / (&one + pow_rat(&ten4, 6 * c));
        items.push(cmp_item(
            format!("1/(1+10.4^{}) > 10^-{}", 6 * c, 7 * c),
            &lhs,
            ">",
            &ten_pow_neg(7 * c),
        ));
    }
    for c in 6..=20u32 {
        let k = 6 * (4 * c + 1);
        let lhs = &one / (&one + pow_rat(&ten4, k));
        items.push(cmp_item(
            format!("1/(1+10.4^{}) > 10^-{}", k, 26 * c),
            &lhs,
            ">",
            &ten_pow_neg(26 * c),
        ));
    }
    let lhs = &one / (&one + pow_rat(&ten4, 18));
    items.push(cmp_item(
        "1/(1+10.4^18) > 10^-19".into(),
        &lhs,
        ">",
        &ten_pow_neg(19),
    ));

    report(constants, items)
}

/// Instance-wise check of the satellite-count recursion: every prime
/// non-split link of at most n crossings is either a satellite already, is
/// screened out, or entangles into a distinct satellite needing at most
/// n + 6*cr_k crossings, which forces S_{n+6*cr_k} >= P_n - S_n - N_n on
/// the count series. The report carries one item per checkable n, the
/// proportion value 1/(1+r) for the smallest observed cumulative ratio
/// r = P_{n+6*cr_k}/P_n, and the exact thresholds the ratio cap implies.
pub fn satellite_recursion_check(
    table: &CensusTable,
    cr_k: usize,
    s_counts: &[u64],
    n_counts: &[u64],
) -> Result<BoundReport> {
    let len = table.rows.len();
    if s_counts.len() != len || n_counts.len() != len {
        return Err(LinkError::LengthMismatch(format!(
            "table has {len} rows, S has {}, N has {}",
            s_counts.len(),
            n_counts.len()
        )));
    }
    let p = table.prime_link_cumulative();
    let shift = 6 * cr_k;
    let mut items = Vec::new();
    let mut min_ratio: Option<BigRational> = None;
    for i in 0..len.saturating_sub(shift) {
        let n = i + 1;
        let lhs = rat_u(s_counts[i + shift]);
        let rhs = BigRational::from_integer(
            BigInt::from(p[i]) - BigInt::from(s_counts[i]) - BigInt::from(n_counts[i]),
        );
        items.push(cmp_item(
            format!("S_{} >= P_{} - S_{} - N_{}", n + shift, n, n, n),
            &lhs,
            ">=",
            &rhs,
        ));
        if p[i] > 0 {
            let r = BigRational::new(BigInt::from(p[i + shift]), BigInt::from(p[i]));
            min_ratio = Some(match min_ratio.take() {
                None => r,
                Some(m) => m.min(r),
            });
        }
    }
    if let Some(r) = min_ratio {
        let v = BigRational::one() / (BigRational::one() + r);
        items.push(BoundItem {
            name: format!("proportion bound 1/(1 + min P_(n+{shift})/P_n)"),
            lhs: rat_text(&v),
            relation: "=".into(),
            rhs: rat_text(&v),
            pass: true,
        });
    }
    if cr_k >= 1 {
        let one = BigRational::one();
        let cap = pow_rat(&rat(52, 5), 6 * cr_k as u32);
        let lhs = &one / (&one + cap);
        items.push(cmp_item(
            format!("1/(1+10.4^{}) > 10^-{}", 6 * cr_k, 7 * cr_k),
            &lhs,
            ">",
            &ten_pow_neg(7 * cr_k as u32),
        ));
        if cr_k == 3 {
            items.push(cmp_item(
                "1/(1+10.4^18) > 10^-19".into(),
                &lhs,
                ">",
                &ten_pow_neg(19),
            ));
        }
    }
    Ok(report(Vec::new(), items))
}

/// Divide a count of strongly diagrammatically prime factor knots by
/// 152*x: an upper bound for how many prime knots of the matching crossing
/// number can fail x-regularity, since each failure pins at least 152*x
/// crossings worth of such factors through the composite crossing-number
/// bound. Exact; x must lie in (0, 1].
pub fn regularity_budget(strongly_prime_count: u64, x: &BigRational) -> Result<BigRational> {
    if !x.is_positive() || x > &BigRational::one() {
        return Err(LinkError::XOutOfRange(rat_text(x)));
    }
    Ok(rat_u(strongly_prime_count) / (rat(152, 1) * x))
}

/// Necessary consistency check of the composite crossing-number bound: the
/// crossing numbers of the factors of a connected sum, divided by 152, must
/// not exceed any diagrammatic upper bound for the composite's crossing
/// number. A pass proves nothing; a fail against a minimal composite
/// diagram would be a counterexample.
pub fn lackenby_check(factor_crossings: &[u64], composite_diagram_cr: u64) -> bool {
    debug_assert!(factor_crossings.iter().all(|&c| c >= 1));
    debug_assert!(composite_diagram_cr >= 1);
    let sum: u128 = factor_crossings.iter().map(|&c| c as u128).sum();
    sum <= 152u128 * composite_diagram_cr as u128
}

/// Exact rational from "3/4", "2" or "0.75" text.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || LinkError::MalformedCode(format!("rational: {s}"));
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let value = if let Some((a, b)) = body.split_once('/') {
        let n: BigInt = a.trim().parse().map_err(|_| bad())?;
        let d: BigInt = b.trim().parse().map_err(|_| bad())?;
        if d.is_zero() || n.is_negative() || d.is_negative() {
            return Err(bad());
        }
        BigRational::new(n, d)
    } else if let Some((a, b)) = body.split_once('.') {
        if b.is_empty() || !b.bytes().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let whole: BigInt = if a.is_empty() {
            BigInt::zero()
        } else {
            a.parse().map_err(|_| bad())?
        };
        if whole.is_negative() {
            return Err(bad());
        }
        let frac: BigInt = b.parse().map_err(|_| bad())?;
        let denom = BigInt::from(10).pow(b.len() as u32);
        BigRational::new(whole * &denom + frac, denom)
    } else {
        let n: BigInt = body.parse().map_err(|_| bad())?;
        if n.is_negative() {
            return Err(bad());
        }
        BigRational::from_integer(n)
    };
    Ok(if neg { -value } else { value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::parse_pd;

    const TREFOIL: &str = "X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)";
    const FIG8: &str = "X(4,2,5,1) X(8,6,1,5) X(6,3,7,4) X(2,7,3,8)";
    const HOPF: &str = "X(1,4,2,3) X(3,2,4,1)";
    const KINK_NEG: &str = "X(1,2,2,1)";

    fn opts(workers: usize) -> CensusOptions {
        CensusOptions {
            workers,
            ..CensusOptions::default()
        }
    }

    #[test]
    fn canonical_code_quotients_the_right_symmetries() {
        let tre = parse_pd(TREFOIL).unwrap();
        let relabelled = parse_pd("X(3,6,4,1) X(5,2,6,3) X(1,4,2,5)").unwrap();
        assert_eq!(canonical_code(&tre, true), canonical_code(&relabelled, true));
        assert_eq!(canonical_code(&tre, true), canonical_code(&tre.mirror(), true));
        assert_eq!(canonical_code(&tre, true), canonical_code(&tre.reflect(), true));
        // chiral convention: the self-isotopy (reflect + mirror) still
        // collapses, the single mirror does not
        assert_eq!(
            canonical_code(&tre, false),
            canonical_code(&tre.mirror().reflect(), false)
        );
        assert_ne!(canonical_code(&tre, false), canonical_code(&tre.mirror(), false));
        let fig8 = parse_pd(FIG8).unwrap();
        assert_ne!(canonical_code(&tre, true), canonical_code(&fig8, true));
    }

    #[test]
    fn codes_decode_to_their_own_class() {
        for code in [TREFOIL, FIG8, HOPF, KINK_NEG] {
            let d = parse_pd(code).unwrap();
            let c = canonical_code(&d, true);
            let back = decode(&c);
            assert_eq!(back.n_crossings(), d.n_crossings());
            assert_eq!(canonical_code(&back, true), c);
        }
    }

    #[test]
    fn one_crossing_census_is_the_unknot() {
        let t = enumerate_diagrams_opts(1, &opts(1)).unwrap();
        assert_eq!(
            t.rows,
            vec![CensusRow {
                n: 1,
                diagrams: 1,
                prime_diagrams: 1,
                link_classes_lb: 1,
                cum_prime_diagrams: 1,
                cum_link_classes_lb: 1,
            }]
        );
        let classes = enumerate_classes(1, &opts(1)).unwrap();
        let unknot_fp = invariant_fingerprint(&parse_pd(KINK_NEG).unwrap());
        assert!(classes.iter().all(|c| c.fingerprint == unknot_fp));
        // the chiral convention keeps the two kinks apart
        let chiral = CensusOptions {
            mirror_identified: false,
            ..opts(1)
        };
        assert_eq!(enumerate_classes(1, &chiral).unwrap().len(), 2);
    }

    /// Independent of the incremental generator: pair the darts every
    /// possible way, keep what the diagram constructor itself accepts as a
    /// connected planar diagram, and canonicalize.
    fn flat_rematch(n: usize) -> BTreeSet<Vec<u32>> {
        fn matchings(free: &mut Vec<u32>, theta: &mut [u32], sink: &mut impl FnMut(&[u32])) {
            let Some(&d) = free.first() else {
                sink(theta);
                return;
            };
            for i in 1..free.len() {
                let e = free[i];
                let mut rest: Vec<u32> = free[1..].to_vec();
                rest.remove(i - 1);
                theta[d as usize] = e;
                theta[e as usize] = d;
                matchings(&mut rest, theta, sink);
            }
        }
        let mut out = BTreeSet::new();
        let mut free: Vec<u32> = (0..4 * n as u32).collect();
        let mut theta = vec![UNSET; 4 * n];
        matchings(&mut free, &mut theta, &mut |theta| {
            let mut edge_of = vec![0usize; theta.len()];
            let mut next = 0;
            for d in 0..theta.len() {
                if d < theta[d] as usize {
                    next += 1;
                    edge_of[d] = next;
                    edge_of[theta[d] as usize] = next;
                }
            }
            let crossings: Vec<Crossing> = (0..n)
                .map(|c| Crossing {
                    edges: std::array::from_fn(|s| edge_of[4 * c + s]),
                })
                .collect();
            if let Ok(d) = Diagram::new(crossings, 0) {
                if d.is_connected() {
                    out.insert(canonical_code(&d, true));
                }
            }
        });
        out
    }

    #[test]
    fn generator_agrees_with_a_flat_rematch() {
        for n in 1..=3 {
            let flat = flat_rematch(n);
            let fast: BTreeSet<Vec<u32>> = enumerate_classes(n, &opts(1))
                .unwrap()
                .into_iter()
                .map(|c| c.code)
                .collect();
            assert_eq!(flat, fast, "class sets differ at {n} crossings");
        }
    }

    #[test]
    fn trefoil_bucket_shows_up_at_three_crossings() {
        let classes = enumerate_classes(3, &opts(0)).unwrap();
        let tre_fp = invariant_fingerprint(&parse_pd(TREFOIL).unwrap());
        assert!(classes.iter().any(|c| c.prime && c.fingerprint == tre_fp));
    }

    #[test]
    fn worker_counts_and_reruns_do_not_change_the_bytes() {
        let a = enumerate_diagrams_opts(3, &opts(1)).unwrap().to_csk();
        let b = enumerate_diagrams_opts(3, &opts(4)).unwrap().to_csk();
        let c = enumerate_diagrams_opts(3, &opts(1)).unwrap().to_csk();
        assert_eq!(a, b);
        assert_eq!(a, c);
    }

    #[test]
    fn csk_save_verifies_and_appends() {
        let dir = std::env::temp_dir().join(format!("csk-test-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("table.csk");
        let _ = std::fs::remove_file(&path);

        let t3 = enumerate_diagrams_opts(3, &opts(2)).unwrap();
        t3.save_csk(&path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        assert_eq!(CensusTable::parse_csk(&t3.to_csk()).unwrap(), t3);

        // rerun verifies without touching the file
        t3.save_csk(&path).unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), bytes);

        // larger run appends; the prefix bytes stay put
        let t4 = enumerate_diagrams_opts(4, &opts(2)).unwrap();
        t4.save_csk(&path).unwrap();
        let grown = std::fs::read(&path).unwrap();
        assert!(grown.starts_with(&bytes));
        assert_eq!(CensusTable::parse_csk(std::str::from_utf8(&grown).unwrap()).unwrap(), t4);

        // a diverging table is refused
        let mut wrong = t3.clone();
        wrong.rows[0].diagrams += 1;
        wrong.rows[0].prime_diagrams += 1;
        wrong.rows[0].link_classes_lb += 1;
        wrong.rows[0].cum_prime_diagrams += 1;
        wrong.rows[0].cum_link_classes_lb += 1;
        // keep the cumulative identity so only the on-disk comparison fails
        let fixed = CensusTable {
            rows: {
                let mut rows = wrong.rows.clone();
                rows.truncate(1);
                rows
            },
            ..wrong
        };
        assert!(matches!(
            fixed.save_csk(&path),
            Err(LinkError::TableMismatch(_))
        ));
        let _ = std::fs::remove_file(&path);
        let _ = std::fs::remove_dir(&dir);
    }

    #[test]
    fn budget_gates_the_enumeration() {
        assert!(matches!(
            enumerate_diagrams(DEFAULT_CENSUS_BUDGET + 1),
            Err(LinkError::BudgetExceeded(_))
        ));
        assert!(matches!(
            enumerate_classes(0, &opts(1)),
            Err(LinkError::EmptyDiagram)
        ));
    }

    #[test]
    fn growth_constant_checks_pass_exactly() {
        let start = std::time::Instant::now();
        let r = evaluate_constants();
        assert!(r.all_pass);
        assert_eq!(r.items.len(), 2 + 20 + 15 + 1);
        let sq = r
            .items
            .iter()
            .find(|i| i.name.starts_with("(sqrt(13681)"))
            .unwrap();
        assert_eq!((sq.lhs.as_str(), sq.rhs.as_str()), ("13681", "13689"));
        let sq = r
            .items
            .iter()
            .find(|i| i.name.starts_with("(sqrt(21001)"))
            .unwrap();
        assert_eq!((sq.lhs.as_str(), sq.rhs.as_str()), ("21001", "522729/25"));
        assert!(start.elapsed().as_secs() < 1);
    }

    #[test]
    fn recursion_check_reports_requirements_and_ratio() {
        // P_n = 2^n
        let p: Vec<u64> = (0..12).map(|i| if i == 0 { 2 } else { 1 << i }).collect();
        let table = CensusTable::from_prime_counts(&p);
        assert_eq!(table.prime_link_cumulative()[11], 1 << 12);

        let zeros = vec![0u64; 12];
        let r = satellite_recursion_check(&table, 1, &zeros, &zeros).unwrap();
        assert!(!r.all_pass, "S = 0 cannot satisfy the requirement");
        let first = &r.items[0];
        assert_eq!(first.name, "S_7 >= P_1 - S_1 - N_1");
        assert_eq!((first.lhs.as_str(), first.rhs.as_str()), ("0", "2"));
        let ratio = r.items.iter().find(|i| i.relation == "=").unwrap();
        assert_eq!(ratio.rhs, "1/65");

        // a satisfying series: S_n = P_n makes every requirement 0
        let s: Vec<u64> = (1..=12).map(|n| 1u64 << n).collect();
        let r = satellite_recursion_check(&table, 1, &s, &zeros).unwrap();
        assert!(r.all_pass);

        let r = satellite_recursion_check(&table, 3, &zeros, &zeros).unwrap();
        assert!(r.items.iter().any(|i| i.name == "1/(1+10.4^18) > 10^-19" && i.pass));

        assert!(matches!(
            satellite_recursion_check(&table, 1, &zeros[..5], &zeros),
            Err(LinkError::LengthMismatch(_))
        ));
    }

    #[test]
    fn budget_and_composite_arithmetic() {
        let one = BigRational::one();
        assert_eq!(regularity_budget(114, &rat(3, 4)).unwrap(), one);
        assert_eq!(regularity_budget(0, &rat(1, 2)).unwrap(), BigRational::zero());
        assert_eq!(regularity_budget(152, &one).unwrap(), one);
        assert!(matches!(
            regularity_budget(114, &rat(2, 1)),
            Err(LinkError::XOutOfRange(_))
        ));
        assert!(matches!(
            regularity_budget(114, &rat(0, 1)),
            Err(LinkError::XOutOfRange(_))
        ));

        assert!(lackenby_check(&[3, 3], 6));
        assert!(lackenby_check(&[152], 1));
        assert!(!lackenby_check(&[304], 1));
    }

    #[test]
    fn rational_text_forms() {
        assert_eq!(parse_rational("3/4").unwrap(), rat(3, 4));
        assert_eq!(parse_rational("2").unwrap(), rat(2, 1));
        assert_eq!(parse_rational("0.75").unwrap(), rat(3, 4));
        assert_eq!(parse_rational("-1.5").unwrap(), rat(-3, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("1.").is_err());
    }
}

