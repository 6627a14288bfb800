//! Factorization invariants computed directly from the definitions.
//!
//! These are the reference oracles: catenary degree via minimum-spanning-tree
//! bottlenecks over complete factorization graphs, Betti elements via
//! connectivity of the atom graph, tame degree via bounded enumeration of
//! qualifying factorizations, and elasticity as an exact rational. Closed
//! forms elsewhere in the crate are validated against these.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;
use thiserror::Error;

use crate::monoid::{exponent_distance, NumericalMonoid};

/// Errors from invariant queries on specific elements.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvariantError {
    /// The queried value is not an element of the monoid.
    #[error("{value} is not an element of the monoid")]
    NotAMember { value: i64 },
    /// The queried value is not an atom of the monoid.
    #[error("{value} is not an atom of the monoid")]
    NotAnAtom { value: i64 },
}

/// Catenary degree of a single element: the least `N` such that any two
/// factorizations are joined by a chain with consecutive distances ≤ `N`,
/// computed as the bottleneck edge of a minimum spanning tree over all
/// factorizations. Zero when the element has at most one factorization.
pub fn catenary_of_element(m: &NumericalMonoid, n: i64) -> Result<i64, InvariantError> {
    if !m.contains(n) {
        return Err(InvariantError::NotAMember { value: n });
    }
    let mut zs: Vec<Vec<i64>> = Vec::new();
    m.for_each_factorization(n, |z| zs.push(z.to_vec()));
    if zs.len() <= 1 {
        return Ok(0);
    }
    Ok(mst_bottleneck(&zs))
}

/// Bottleneck (largest edge) of a minimum spanning tree of the complete graph
/// on `zs` under the factorization distance; Prim's algorithm.
fn mst_bottleneck(zs: &[Vec<i64>]) -> i64 {
    let n = zs.len();
    let mut in_tree = vec![false; n];
    let mut best = vec![i64::MAX; n];
    best[0] = 0;
    let mut bottleneck = 0i64;
    for _ in 0..n {
        let mut u = usize::MAX;
        for v in 0..n {
            if !in_tree[v] && (u == usize::MAX || best[v] < best[u]) {
                u = v;
            }
        }
        in_tree[u] = true;
        bottleneck = bottleneck.max(best[u]);
        for v in 0..n {
            if !in_tree[v] {
                best[v] = best[v].min(exponent_distance(&zs[u], &zs[v]));
            }
        }
    }
    bottleneck
}

/// Whether the atom graph of `n` (vertices: atoms `a` with `n − a` in the
/// monoid; edges: pairs with `n − a − a′` in the monoid) is disconnected,
/// i.e. has at least two components.
fn atom_graph_disconnected(m: &NumericalMonoid, n: i64) -> bool {
    let atoms = m.atoms();
    let verts: Vec<i64> = atoms.iter().copied().filter(|&a| m.contains(n - a)).collect();
    if verts.len() < 2 {
        return false;
    }
    // Breadth-first search from the first vertex.
    let mut seen = vec![false; verts.len()];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut reached = 1usize;
    while let Some(i) = stack.pop() {
        for j in 0..verts.len() {
            if !seen[j] && m.contains(n - verts[i] - verts[j]) {
                seen[j] = true;
                reached += 1;
                stack.push(j);
            }
        }
    }
    reached < verts.len()
}

/// Betti elements in the inclusive range `lo..=hi`: elements whose atom graph
/// is disconnected.
pub fn betti_elements_in(m: &NumericalMonoid, lo: i64, hi: i64) -> Vec<i64> {
    (lo.max(1)..=hi)
        .filter(|&n| m.contains(n) && atom_graph_disconnected(m, n))
        .collect()
}

/// Bound up to which all Betti elements occur: Frobenius number plus twice
/// the largest atom (above it every atom graph is connected).
pub fn betti_scan_bound(m: &NumericalMonoid) -> i64 {
    m.frobenius() + 2 * m.atoms().last().unwrap()
}

/// All Betti elements of the monoid, ascending.
pub fn betti_elements(m: &NumericalMonoid) -> Vec<i64> {
    betti_elements_in(m, 1, betti_scan_bound(m))
}

/// Catenary degree of the monoid: the maximum catenary degree over its Betti
/// elements; 0 when there are none.
pub fn catenary(m: &NumericalMonoid) -> i64 {
    betti_elements(m)
        .iter()
        .map(|&b| catenary_of_element(m, b).expect("Betti elements are members"))
        .max()
        .unwrap_or(0)
}

/// Catenary degree recomputed by scanning every element up to `bound`;
/// definitional cross-check for [`catenary`].
pub fn catenary_by_full_scan(m: &NumericalMonoid, bound: i64) -> i64 {
    (0..=bound)
        .filter(|&n| m.contains(n))
        .map(|n| catenary_of_element(m, n).unwrap())
        .max()
        .unwrap_or(0)
}

/// The distinct positive element-level catenary degrees occurring up to
/// `bound`, ascending.
pub fn positive_catenary_set(m: &NumericalMonoid, bound: i64) -> Vec<i64> {
    let mut vals: Vec<i64> = (0..=bound)
        .filter(|&n| m.contains(n))
        .map(|n| catenary_of_element(m, n).unwrap())
        .filter(|&c| c > 0)
        .collect();
    vals.sort_unstable();
    vals.dedup();
    vals
}

/// Minimum factorization length for every element up to `bound`; `None` for
/// non-elements. Dynamic program over the atoms.
pub fn min_length_table(m: &NumericalMonoid, bound: i64) -> Vec<Option<i64>> {
    length_table(m, bound, false)
}

/// Maximum factorization length for every element up to `bound`; `None` for
/// non-elements.
pub fn max_length_table(m: &NumericalMonoid, bound: i64) -> Vec<Option<i64>> {
    length_table(m, bound, true)
}

fn length_table(m: &NumericalMonoid, bound: i64, maximize: bool) -> Vec<Option<i64>> {
    if bound < 0 {
        return Vec::new();
    }
    let mut table: Vec<Option<i64>> = vec![None; bound as usize + 1];
    table[0] = Some(0);
    for v in 1..=bound {
        let mut best: Option<i64> = None;
        for &a in m.atoms() {
            if a > v {
                break;
            }
            if let Some(prev) = table[(v - a) as usize] {
                let cand = prev + 1;
                best = Some(match best {
                    None => cand,
                    Some(b) if maximize => b.max(cand),
                    Some(b) => b.min(cand),
                });
            }
        }
        table[v as usize] = best;
    }
    table
}

/// Local tame degree of the atom `u`: over all elements `b` of `u + M` and
/// factorizations `z` of `b` that avoid `u` entirely and cannot shed any used
/// atom toward `u` (for every atom `a` used in `z`, `b − a − u` is not an
/// element), the largest of `max(|z|, 1 + minlen(b − u))`. Elements beyond
/// `u + max(atoms) + Frobenius` cannot contribute.
pub fn tame_local(m: &NumericalMonoid, u: i64) -> Result<i64, InvariantError> {
    let atoms = m.atoms();
    let Some(u_idx) = atoms.iter().position(|&a| a == u) else {
        return Err(InvariantError::NotAnAtom { value: u });
    };
    let bound = u + atoms.last().unwrap() + m.frobenius();
    let minlen = min_length_table(m, bound.max(0));
    let mut t = 0i64;
    for b in u..=bound {
        let rem = b - u;
        if !m.contains(rem) {
            continue;
        }
        let with_u = 1 + minlen[rem as usize].expect("member has a length");
        m.for_each_factorization(b, |z| {
            if z[u_idx] > 0 {
                return;
            }
            let qualifying = z
                .iter()
                .enumerate()
                .all(|(i, &e)| e == 0 || !m.contains(b - atoms[i] - u));
            if qualifying {
                let len: i64 = z.iter().sum();
                t = t.max(len.max(with_u));
            }
        });
    }
    Ok(t)
}

/// Tame degree of the monoid: maximum local tame degree over its atoms.
pub fn tame(m: &NumericalMonoid) -> i64 {
    m.atoms()
        .iter()
        .map(|&u| tame_local(m, u).expect("atoms are atoms"))
        .max()
        .unwrap()
}

/// Elasticity: largest atom over smallest atom, as an exact reduced rational.
pub fn elasticity(m: &NumericalMonoid) -> BigRational {
    BigRational::new(
        BigInt::from(*m.atoms().last().unwrap()),
        BigInt::from(m.atoms()[0]),
    )
}

/// Reduced rational as explicit numerator and denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RatioParts {
    pub num: i64,
    pub den: i64,
}

/// Full invariant summary of a monoid, serializable to JSON.
#[derive(Debug, Clone, Serialize)]
pub struct InvariantReport {
    pub atoms: Vec<i64>,
    pub frobenius: i64,
    pub catenary: i64,
    pub tame: i64,
    pub elasticity: RatioParts,
    pub betti: Vec<i64>,
    pub tame_local: BTreeMap<i64, i64>,
    pub ca_partial: Vec<i64>,
    pub scan_bound: i64,
}

/// Computes every invariant of `m`. `scan_bound` limits the element scan for
/// the positive catenary-degree set; it defaults to the Betti scan bound.
pub fn invariant_report(m: &NumericalMonoid, scan_bound: Option<i64>) -> InvariantReport {
    let bound = scan_bound.unwrap_or_else(|| betti_scan_bound(m));
    let rho = elasticity(m);
    let tame_local_map: BTreeMap<i64, i64> = m
        .atoms()
        .iter()
        .map(|&u| (u, tame_local(m, u).unwrap()))
        .collect();
    InvariantReport {
        atoms: m.atoms().to_vec(),
        frobenius: m.frobenius(),
        catenary: catenary(m),
        tame: *tame_local_map.values().max().unwrap(),
        elasticity: RatioParts {
            num: i64::try_from(rho.numer()).expect("atom-sized numerator"),
            den: i64::try_from(rho.denom()).expect("atom-sized denominator"),
        },
        betti: betti_elements(m),
        tame_local: tame_local_map,
        ca_partial: positive_catenary_set(m, bound),
        scan_bound: bound,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn monoid(gens: &[i64]) -> NumericalMonoid {
        NumericalMonoid::new(gens).unwrap()
    }

    #[test]
    fn element_catenary_fixtures() {
        let m = monoid(&[3, 5, 7]);
        assert_eq!(catenary_of_element(&m, 12).unwrap(), 4);
        assert_eq!(catenary_of_element(&m, 10).unwrap(), 2);
        assert_eq!(catenary_of_element(&m, 3).unwrap(), 0);
        assert_eq!(catenary_of_element(&m, 0).unwrap(), 0);
        assert_eq!(
            catenary_of_element(&m, 4).unwrap_err(),
            InvariantError::NotAMember { value: 4 }
        );
    }

    #[test]
    fn betti_element_fixtures() {
        let m = monoid(&[3, 5, 7]);
        assert_eq!(betti_elements(&m), vec![10, 12, 14]);
        let cs: Vec<i64> = betti_elements(&m)
            .iter()
            .map(|&b| catenary_of_element(&m, b).unwrap())
            .collect();
        assert_eq!(cs, vec![2, 4, 4]);

        assert_eq!(betti_elements(&monoid(&[2, 3])), vec![6]);
        assert_eq!(betti_elements(&monoid(&[1])), Vec::<i64>::new());
    }

    #[test]
    fn monoid_catenary_fixtures() {
        assert_eq!(catenary(&monoid(&[3, 5, 7])), 4);
        assert_eq!(catenary(&monoid(&[2, 3])), 3);
        assert_eq!(catenary(&monoid(&[1])), 0);
        assert_eq!(catenary(&monoid(&[5, 7, 9])), 5);
    }

    #[test]
    fn full_scan_agrees_with_betti_method() {
        for gens in [
            vec![1],
            vec![2, 3],
            vec![3, 5, 7],
            vec![4, 6, 9],
            vec![6, 9, 20],
            vec![5, 7, 9],
            vec![3, 5],
        ] {
            let m = monoid(&gens);
            let bound = betti_scan_bound(&m);
            assert_eq!(
                catenary_by_full_scan(&m, bound),
                catenary(&m),
                "scan mismatch for {gens:?}"
            );
        }
    }

    #[test]
    fn positive_catenary_set_fixtures() {
        assert_eq!(positive_catenary_set(&monoid(&[3, 5, 7]), 14), vec![2, 4]);
        assert_eq!(positive_catenary_set(&monoid(&[2, 3]), 6), vec![3]);
        assert_eq!(positive_catenary_set(&monoid(&[1]), 20), Vec::<i64>::new());
    }

    #[test]
    fn tame_degree_fixtures() {
        let m = monoid(&[3, 5, 7]);
        assert_eq!(tame_local(&m, 3).unwrap(), 4);
        assert_eq!(tame_local(&m, 5).unwrap(), 4);
        assert_eq!(tame_local(&m, 7).unwrap(), 4);
        assert_eq!(tame(&m), 4);
        assert_eq!(
            tame_local(&m, 4).unwrap_err(),
            InvariantError::NotAnAtom { value: 4 }
        );

        let one = monoid(&[1]);
        assert_eq!(tame_local(&one, 1).unwrap(), 0);
        assert_eq!(tame(&one), 0);

        let m = monoid(&[2, 3]);
        assert_eq!(tame_local(&m, 2).unwrap(), 3);
        assert_eq!(tame_local(&m, 3).unwrap(), 3);
        assert_eq!(tame(&m), 3);
    }

    #[test]
    fn catenary_tame_sandwich_on_small_pool() {
        for gens in [
            vec![1],
            vec![2, 3],
            vec![3, 5],
            vec![3, 5, 7],
            vec![4, 6, 9],
            vec![5, 7, 9],
            vec![6, 9, 20],
            vec![7, 11, 13],
        ] {
            let m = monoid(&gens);
            let c = catenary(&m);
            let t = tame(&m);
            assert!(0 <= c && c <= t, "sandwich failed for {gens:?}: c={c}, t={t}");
            let trivial = m.atoms() == [1];
            assert_eq!(c == 0, trivial, "c=0 iff trivial for {gens:?}");
            assert_eq!(t == 0, trivial, "t=0 iff trivial for {gens:?}");
        }
    }

    #[test]
    fn elasticity_fixtures() {
        let r = elasticity(&monoid(&[3, 5, 7]));
        assert_eq!(i64::try_from(r.numer()).unwrap(), 7);
        assert_eq!(i64::try_from(r.denom()).unwrap(), 3);
        let r = elasticity(&monoid(&[1]));
        assert!(num_traits::One::is_one(&r));
        let r = elasticity(&monoid(&[4, 6, 9]));
        assert_eq!(i64::try_from(r.numer()).unwrap(), 9);
        assert_eq!(i64::try_from(r.denom()).unwrap(), 4);
    }

    #[test]
    fn length_tables_match_enumeration() {
        let m = monoid(&[3, 5, 7]);
        let bound = 40;
        let min = min_length_table(&m, bound);
        let max = max_length_table(&m, bound);
        for n in 0..=bound {
            let mut lens: Vec<i64> = Vec::new();
            m.for_each_factorization(n, |z| lens.push(z.iter().sum()));
            if lens.is_empty() {
                assert_eq!(min[n as usize], None);
                assert_eq!(max[n as usize], None);
            } else {
                assert_eq!(min[n as usize], lens.iter().copied().min());
                assert_eq!(max[n as usize], lens.iter().copied().max());
            }
        }
    }

    #[test]
    fn report_serializes_with_expected_shape() {
        let report = invariant_report(&monoid(&[3, 5, 7]), None);
        assert_eq!(report.catenary, 4);
        assert_eq!(report.tame, 4);
        assert_eq!(report.elasticity, RatioParts { num: 7, den: 3 });
        assert_eq!(report.betti, vec![10, 12, 14]);
        assert_eq!(report.scan_bound, 18);
        let json = serde_json::to_value(&report).unwrap();
        assert_eq!(json["atoms"], serde_json::json!([3, 5, 7]));
        assert_eq!(json["frobenius"], serde_json::json!(4));
        assert_eq!(json["tame_local"]["3"], serde_json::json!(4));
        assert_eq!(json["elasticity"]["num"], serde_json::json!(7));
        assert_eq!(json["ca_partial"], serde_json::json!([2, 4]));

        let trivial = invariant_report(&monoid(&[1]), None);
        assert_eq!(trivial.catenary, 0);
        assert_eq!(trivial.tame, 0);
        assert_eq!(trivial.frobenius, -1);
        assert_eq!(trivial.elasticity, RatioParts { num: 1, den: 1 });
        assert_eq!(trivial.betti, Vec::<i64>::new());
        assert_eq!(trivial.tame_local[&1], 0);
    }
}
