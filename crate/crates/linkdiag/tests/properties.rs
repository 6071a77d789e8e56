//! Randomized invariants. Diagrams are generated by scrambling known knots
//! and links with validity-checked moves, so every case is a legal diagram
//! and every move preserves the underlying link.

use linkdiag::census::canonical_code;
use linkdiag::diagram::{emit_pd, parse_pd, Dart, Diagram, DiagramJson};
use linkdiag::invariants::{jones, kauffman_bracket};
use linkdiag::moves::{r1_add_variant, r1_remove, r2_add, r2_remove, r3};
use linkdiag::structure::{connected_sum, extract_tangle, find_companion_disk, glue_tangles};
use linkdiag::LaurentPoly;
use proptest::prelude::*;

const KNOTS: [&str; 4] = [
    "X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)",
    "X(4,2,5,1) X(8,6,1,5) X(6,3,7,4) X(2,7,3,8)",
    "X(1,6,2,7) X(3,8,4,9) X(5,10,6,1) X(7,2,8,3) X(9,4,10,5)",
    "X(1,4,2,5) X(3,8,4,9) X(5,10,6,1) X(9,6,10,7) X(7,2,8,3)",
];

const LINKS: [&str; 3] = [
    "X(1,4,2,3) X(3,2,4,1)",
    "X(7,1,2,8) X(1,3,4,2) X(3,5,6,4) X(5,7,8,6)",
    "X(1,6,2,7) X(3,8,4,9) X(5,10,6,1) X(7,2,8,3) X(9,4,10,5) O",
];

#[derive(Clone, Copy, Debug)]
enum Cmd {
    Kink { at: u32, sign: bool, flip: bool },
    Poke { u: u32, v: u32, over: bool },
    Slide { at: u32 },
    Unkink { at: u32 },
    Unpoke { a: u32, b: u32 },
}

fn cmd() -> impl Strategy<Value = Cmd> {
    prop_oneof![
        (any::<u32>(), any::<bool>(), any::<bool>())
            .prop_map(|(at, sign, flip)| Cmd::Kink { at, sign, flip }),
        (any::<u32>(), any::<u32>(), any::<bool>())
            .prop_map(|(u, v, over)| Cmd::Poke { u, v, over }),
        any::<u32>().prop_map(|at| Cmd::Slide { at }),
        any::<u32>().prop_map(|at| Cmd::Unkink { at }),
        (any::<u32>(), any::<u32>()).prop_map(|(a, b)| Cmd::Unpoke { a, b }),
    ]
}

/// Applies each command if it is legal at that moment; illegal ones are
/// skipped, so any command list is a valid scramble.
fn apply(base: &Diagram, cmds: &[Cmd], cap: usize) -> Diagram {
    let mut cur = base.clone();
    for &c in cmds {
        let n = cur.n_crossings() as u32;
        let result = match c {
            Cmd::Kink { at, sign, flip } if cur.n_edges() > 0 && (n as usize) < cap => {
                let edge = 1 + (at as usize % cur.n_edges());
                r1_add_variant(&cur, edge, if sign { 1 } else { -1 }, flip)
            }
            Cmd::Poke { u, v, over } if n > 0 && (n as usize) + 2 <= cap => {
                r2_add(&cur, Dart(u % (4 * n)), Dart(v % (4 * n)), over)
            }
            Cmd::Slide { at } if n > 0 => r3(&cur, Dart(at % (4 * n))),
            Cmd::Unkink { at } if n > 0 => r1_remove(&cur, at as usize % n as usize),
            Cmd::Unpoke { a, b } if n > 1 => {
                r2_remove(&cur, a as usize % n as usize, b as usize % n as usize)
            }
            _ => continue,
        };
        if let Ok(d) = result {
            cur = d;
        }
    }
    cur
}

prop_compose! {
    fn knot()(seed in 0..KNOTS.len(), cmds in prop::collection::vec(cmd(), 0..14)) -> Diagram {
        apply(&parse_pd(KNOTS[seed]).unwrap(), &cmds, 10)
    }
}

prop_compose! {
    fn link()(seed in 0..LINKS.len(), cmds in prop::collection::vec(cmd(), 0..14)) -> Diagram {
        apply(&parse_pd(LINKS[seed]).unwrap(), &cmds, 10)
    }
}

proptest! {
    #[test]
    fn pd_text_round_trips(d in knot()) {
        let back = parse_pd(&emit_pd(&d)).unwrap();
        prop_assert_eq!(canonical_code(&back, false), canonical_code(&d, false));
        prop_assert_eq!(back.writhe(), d.writhe());
    }

    #[test]
    fn json_round_trips(d in link()) {
        let text = serde_json::to_string(&DiagramJson::from_diagram(&d)).unwrap();
        let back = DiagramJson::from_str(&text).unwrap();
        prop_assert_eq!(canonical_code(&back, false), canonical_code(&d, false));
        prop_assert_eq!(back.free_loops(), d.free_loops());
    }

    #[test]
    fn faces_satisfy_the_euler_count(d in knot()) {
        prop_assert_eq!(d.face_count(), d.n_crossings() + 2);
    }

    #[test]
    fn moves_never_change_jones(d in knot(), extra in prop::collection::vec(cmd(), 1..10)) {
        let moved = apply(&d, &extra, 10);
        prop_assert_eq!(jones(&moved).unwrap(), jones(&d).unwrap());
    }

    #[test]
    fn kinks_scale_the_bracket_by_a_cubed(d in knot(), at in any::<u32>(), sign in any::<bool>(), flip in any::<bool>()) {
        let edge = 1 + (at as usize % d.n_edges());
        let s: i8 = if sign { 1 } else { -1 };
        let kinked = r1_add_variant(&d, edge, s, flip).unwrap();
        let factor = LaurentPoly::monomial(-1, 3 * s as i64);
        prop_assert_eq!(
            kauffman_bracket(&kinked).unwrap(),
            kauffman_bracket(&d).unwrap().mul(&factor)
        );
    }

    #[test]
    fn mirroring_inverts_the_bracket_variable(d in link()) {
        let m = d.mirror();
        prop_assert_eq!(m.writhe(), -d.writhe());
        prop_assert_eq!(
            kauffman_bracket(&m).unwrap(),
            kauffman_bracket(&d).unwrap().invert_variable()
        );
    }

    #[test]
    fn linking_matrix_is_symmetric_and_carries_the_writhe(d in link()) {
        let lm = d.linking_matrix();
        let k = lm.entries.len();
        let mut total = 0i64;
        for i in 0..k {
            for j in 0..k {
                prop_assert_eq!(lm.entries[i][j], lm.entries[j][i]);
                total += lm.entries[i][j];
            }
        }
        // diagonal carries self-writhe, each linking number appears twice
        prop_assert_eq!(total, d.writhe());
    }

    #[test]
    fn canonical_codes_ignore_labels_and_mirrors(d in link()) {
        let code = canonical_code(&d, true);
        prop_assert_eq!(canonical_code(&d.mirror(), true), code.clone());
        let relabeled = parse_pd(&emit_pd(&d)).unwrap();
        prop_assert_eq!(canonical_code(&relabeled, true), code);
    }

    #[test]
    fn connected_sums_multiply_jones(a in knot(), b in knot(), ea in any::<u32>(), eb in any::<u32>()) {
        prop_assume!(a.n_crossings() + b.n_crossings() <= 14);
        let sum = connected_sum(
            &a, 1 + (ea as usize % a.n_edges()),
            &b, 1 + (eb as usize % b.n_edges()),
        ).unwrap();
        prop_assert_eq!(sum.n_crossings(), a.n_crossings() + b.n_crossings());
        prop_assert_eq!(
            jones(&sum).unwrap(),
            jones(&a).unwrap().mul(&jones(&b).unwrap())
        );
    }

    #[test]
    fn tangle_extraction_glues_back_to_the_same_diagram(d in link()) {
        prop_assume!(d.is_connected() && d.free_loops() == 0);
        let disk = find_companion_disk(&d).unwrap();
        let (inside, outside) = extract_tangle(&d, &disk).unwrap();
        let glued = glue_tangles(&inside, &outside).unwrap();
        prop_assert_eq!(canonical_code(&glued, false), canonical_code(&d, false));
    }
}
