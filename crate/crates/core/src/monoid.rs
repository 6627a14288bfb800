//! Numerical monoids, their Apéry sets, and factorization enumeration.
//!
//! A numerical monoid is determined by its unique minimal generating set (the
//! atoms). Construction validates the generators, discards redundant ones, and
//! caches the Apéry set with respect to the smallest atom; membership and the
//! Frobenius number read off that cache in constant time.

use std::collections::VecDeque;
use std::sync::Arc;

use thiserror::Error;

/// Largest allowed generator value; keeps every intermediate Apéry distance
/// inside `i64` (table length × generator ≤ 2^24 · 2^31 < 2^63).
pub const MAX_GENERATOR: i64 = i32::MAX as i64;

/// Largest allowed Apéry modulus (table length), a memory guard.
pub const MAX_MODULUS: i64 = 1 << 24;

/// Errors from monoid construction and element-level queries.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MonoidError {
    /// The generator list was empty.
    #[error("generator list is empty")]
    EmptyGenerators,
    /// A generator was zero or negative.
    #[error("generator {value} is not a positive integer")]
    NonPositiveGenerator { value: i64 },
    /// The generators have a common divisor greater than 1.
    #[error("generators have common divisor {gcd}, expected 1")]
    NonCoprime { gcd: i64 },
    /// A generator exceeds the supported magnitude.
    #[error("generator {value} exceeds the supported maximum {max}")]
    GeneratorTooLarge { value: i64, max: i64 },
    /// An Apéry modulus exceeds the supported table length.
    #[error("Apéry modulus {modulus} exceeds the supported maximum {max}")]
    ModulusTooLarge { modulus: i64, max: i64 },
    /// The queried value is not a positive element of the monoid.
    #[error("{value} is not a nonzero element of the monoid")]
    NotAMember { value: i64 },
    /// Arithmetic overflowed the fixed-width integer range.
    #[error("arithmetic overflow in monoid computation")]
    Overflow,
    /// Two factorizations belong to different monoids.
    #[error("factorizations belong to different monoids")]
    MonoidMismatch,
}

#[derive(Debug, PartialEq, Eq)]
struct Inner {
    /// Strictly increasing minimal generating set.
    atoms: Vec<i64>,
    /// `apery[r]` is the least element congruent to `r` modulo `atoms[0]`.
    apery: Vec<i64>,
    /// Largest integer outside the monoid (−1 when every non-negative integer
    /// is an element).
    frobenius: i64,
}

/// A numerical monoid: all non-negative integer combinations of a coprime set
/// of positive generators. Immutable after construction; cloning is cheap.
#[derive(Debug, Clone)]
pub struct NumericalMonoid {
    inner: Arc<Inner>,
}

impl PartialEq for NumericalMonoid {
    fn eq(&self, other: &Self) -> bool {
        // Atoms are a canonical form: equal atom lists mean equal monoids.
        self.inner.atoms == other.inner.atoms
    }
}

impl Eq for NumericalMonoid {}

impl NumericalMonoid {
    /// Builds the monoid generated by `gens`, reducing to the minimal
    /// generating set. Fails when the list is empty, contains a non-positive
    /// or oversized value, or has gcd ≠ 1.
    pub fn new(gens: &[i64]) -> Result<Self, MonoidError> {
        if gens.is_empty() {
            return Err(MonoidError::EmptyGenerators);
        }
        for &g in gens {
            if g <= 0 {
                return Err(MonoidError::NonPositiveGenerator { value: g });
            }
            if g > MAX_GENERATOR {
                return Err(MonoidError::GeneratorTooLarge {
                    value: g,
                    max: MAX_GENERATOR,
                });
            }
        }
        let mut gens: Vec<i64> = gens.to_vec();
        gens.sort_unstable();
        gens.dedup();
        let gcd = gens.iter().fold(0i64, |acc, &g| num_integer::gcd(acc, g));
        if gcd != 1 {
            return Err(MonoidError::NonCoprime { gcd });
        }
        let m = gens[0];
        if m > MAX_MODULUS {
            return Err(MonoidError::ModulusTooLarge {
                modulus: m,
                max: MAX_MODULUS,
            });
        }
        let apery = apery_table(&gens, m);
        // g is redundant exactly when g = a + x for a smaller generator a and
        // a nonzero element x; the monoid generated by the survivors is
        // unchanged, so the Apéry cache carries over.
        let member = |x: i64| x >= 0 && x >= apery[(x % m) as usize];
        let atoms: Vec<i64> = gens
            .iter()
            .copied()
            .filter(|&g| !gens.iter().any(|&a| a < g && member(g - a)))
            .collect();
        debug_assert_eq!(atoms[0], m);
        debug_assert_eq!(apery_table(&atoms, m), apery);
        let frobenius = apery.iter().copied().max().unwrap() - m;
        Ok(NumericalMonoid {
            inner: Arc::new(Inner {
                atoms,
                apery,
                frobenius,
            }),
        })
    }

    /// The minimal generating set, strictly increasing.
    pub fn atoms(&self) -> &[i64] {
        &self.inner.atoms
    }

    /// The smallest atom (the multiplicity).
    pub fn multiplicity(&self) -> i64 {
        self.inner.atoms[0]
    }

    /// Largest integer that is not an element; −1 when the monoid is all of
    /// the non-negative integers.
    pub fn frobenius(&self) -> i64 {
        self.inner.frobenius
    }

    /// Whether `n` is an element of the monoid.
    pub fn contains(&self, n: i64) -> bool {
        if n < 0 {
            return false;
        }
        let m = self.inner.atoms[0];
        n >= self.inner.apery[(n % m) as usize]
    }

    /// The Apéry set with respect to a nonzero element `m`: entry `r` is the
    /// least element congruent to `r` modulo `m`.
    pub fn apery_set(&self, m: i64) -> Result<Vec<i64>, MonoidError> {
        if m <= 0 || !self.contains(m) {
            return Err(MonoidError::NotAMember { value: m });
        }
        if m > MAX_MODULUS {
            return Err(MonoidError::ModulusTooLarge {
                modulus: m,
                max: MAX_MODULUS,
            });
        }
        if m == self.inner.atoms[0] {
            return Ok(self.inner.apery.clone());
        }
        Ok(apery_table(&self.inner.atoms, m))
    }

    /// All factorizations of `n`: exponent vectors over the atoms, in a
    /// deterministic order. Empty when `n` is not an element.
    pub fn factorizations(&self, n: i64) -> Vec<Factorization> {
        let mut out = Vec::new();
        self.for_each_factorization(n, |exps| {
            out.push(Factorization {
                monoid: self.clone(),
                exponents: exps.to_vec(),
            });
        });
        out
    }

    /// Streams the exponent vectors of every factorization of `n` without
    /// allocating per factorization. No calls when `n` is not an element.
    pub fn for_each_factorization(&self, n: i64, mut f: impl FnMut(&[i64])) {
        if !self.contains(n) {
            return;
        }
        let atoms = &self.inner.atoms;
        let mut exps = vec![0i64; atoms.len()];
        recurse(atoms, atoms.len() - 1, n, &mut exps, &mut f);
    }

    /// Number of factorizations of `n`.
    pub fn factorization_count(&self, n: i64) -> u64 {
        let mut count = 0u64;
        self.for_each_factorization(n, |_| count += 1);
        count
    }
}

fn recurse(atoms: &[i64], idx: usize, rem: i64, exps: &mut Vec<i64>, f: &mut impl FnMut(&[i64])) {
    if idx == 0 {
        if rem % atoms[0] == 0 {
            exps[0] = rem / atoms[0];
            f(exps);
        }
        return;
    }
    let a = atoms[idx];
    for e in 0..=(rem / a) {
        exps[idx] = e;
        recurse(atoms, idx - 1, rem - e * a, exps, f);
    }
    exps[idx] = 0;
}

/// Least element of ⟨atoms⟩ in each residue class modulo `m`, by shortest-path
/// relaxation over the residue graph. Requires gcd(atoms) coprime to `m`,
/// which holds for any monoid built here; distances stay below
/// `m · max(atoms)` and therefore inside `i64` by the construction guards.
fn apery_table(atoms: &[i64], m: i64) -> Vec<i64> {
    let mu = m as usize;
    let mut dist = vec![i64::MAX; mu];
    dist[0] = 0;
    let mut queue: VecDeque<u32> = VecDeque::new();
    let mut queued = vec![false; mu];
    queue.push_back(0);
    queued[0] = true;
    while let Some(r) = queue.pop_front() {
        let r = r as usize;
        queued[r] = false;
        let d = dist[r];
        for &a in atoms {
            let nr = ((r as i64 + a) % m) as usize;
            let nd = d + a;
            if nd < dist[nr] {
                dist[nr] = nd;
                if !queued[nr] {
                    queued[nr] = true;
                    queue.push_back(nr as u32);
                }
            }
        }
    }
    debug_assert!(dist.iter().all(|&d| d != i64::MAX));
    dist
}

/// A factorization of an element: the exponent of each atom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    monoid: NumericalMonoid,
    exponents: Vec<i64>,
}

impl Factorization {
    /// Wraps an explicit exponent vector over the atoms of `monoid`.
    pub fn new(monoid: &NumericalMonoid, exponents: Vec<i64>) -> Result<Self, MonoidError> {
        if exponents.len() != monoid.atoms().len() {
            return Err(MonoidError::MonoidMismatch);
        }
        for &e in &exponents {
            if e < 0 {
                return Err(MonoidError::NonPositiveGenerator { value: e });
            }
        }
        // Validate that the value fits in range.
        let mut total: i64 = 0;
        for (&e, &a) in exponents.iter().zip(monoid.atoms()) {
            let term = e.checked_mul(a).ok_or(MonoidError::Overflow)?;
            total = total.checked_add(term).ok_or(MonoidError::Overflow)?;
        }
        let _ = total;
        Ok(Factorization {
            monoid: monoid.clone(),
            exponents,
        })
    }

    /// The monoid this factorization lives in.
    pub fn monoid(&self) -> &NumericalMonoid {
        &self.monoid
    }

    /// The exponent vector over the atoms.
    pub fn exponents(&self) -> &[i64] {
        &self.exponents
    }

    /// The element it factors: Σ exponentᵢ · atomᵢ.
    pub fn value(&self) -> i64 {
        self.exponents
            .iter()
            .zip(self.monoid.atoms())
            .map(|(&e, &a)| e * a)
            .sum()
    }

    /// Total number of atoms used: Σ exponentᵢ.
    pub fn length(&self) -> i64 {
        self.exponents.iter().sum()
    }

    /// Distance to another factorization of the same monoid: remove the
    /// common part, then take the larger remaining length.
    pub fn distance(&self, other: &Factorization) -> Result<i64, MonoidError> {
        if self.monoid != other.monoid {
            return Err(MonoidError::MonoidMismatch);
        }
        Ok(exponent_distance(&self.exponents, &other.exponents))
    }
}

/// Distance between two exponent vectors of equal arity: subtract the
/// componentwise minimum from both, then take the larger total length.
pub fn exponent_distance(x: &[i64], y: &[i64]) -> i64 {
    debug_assert_eq!(x.len(), y.len());
    let mut sx: i64 = 0;
    let mut sy: i64 = 0;
    for (&a, &b) in x.iter().zip(y) {
        let g = a.min(b);
        sx += a - g;
        sy += b - g;
    }
    sx.max(sy)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn monoid(gens: &[i64]) -> NumericalMonoid {
        NumericalMonoid::new(gens).unwrap()
    }

    #[test]
    fn atoms_are_reduced_to_the_minimal_generating_set() {
        assert_eq!(monoid(&[3, 5, 7]).atoms(), &[3, 5, 7]);
        assert_eq!(monoid(&[3, 5, 7, 8]).atoms(), &[3, 5, 7]);
        assert_eq!(monoid(&[7, 5, 3, 5]).atoms(), &[3, 5, 7]);
        assert_eq!(monoid(&[1, 5]).atoms(), &[1]);
        assert_eq!(monoid(&[4, 6, 9]).atoms(), &[4, 6, 9]);
        assert_eq!(monoid(&[6, 9, 20]).atoms(), &[6, 9, 20]);
    }

    #[test]
    fn construction_rejects_bad_generator_lists() {
        assert_eq!(
            NumericalMonoid::new(&[]).unwrap_err(),
            MonoidError::EmptyGenerators
        );
        assert_eq!(
            NumericalMonoid::new(&[2, 4]).unwrap_err(),
            MonoidError::NonCoprime { gcd: 2 }
        );
        assert_eq!(
            NumericalMonoid::new(&[7]).unwrap_err(),
            MonoidError::NonCoprime { gcd: 7 }
        );
        assert_eq!(
            NumericalMonoid::new(&[0, 3]).unwrap_err(),
            MonoidError::NonPositiveGenerator { value: 0 }
        );
        assert_eq!(
            NumericalMonoid::new(&[-2, 3]).unwrap_err(),
            MonoidError::NonPositiveGenerator { value: -2 }
        );
        assert!(matches!(
            NumericalMonoid::new(&[3, MAX_GENERATOR + 1]).unwrap_err(),
            MonoidError::GeneratorTooLarge { .. }
        ));
    }

    #[test]
    fn apery_set_and_frobenius_fixtures() {
        let m = monoid(&[3, 5, 7]);
        assert_eq!(m.apery_set(3).unwrap(), vec![0, 7, 5]);
        assert_eq!(m.frobenius(), 4);

        let m = monoid(&[2, 3]);
        assert_eq!(m.apery_set(2).unwrap(), vec![0, 3]);
        assert_eq!(m.frobenius(), 1);

        let one = monoid(&[1]);
        assert_eq!(one.apery_set(1).unwrap(), vec![0]);
        assert_eq!(one.frobenius(), -1);

        // Apéry with respect to a non-multiplicity element.
        let m = monoid(&[3, 5, 7]);
        assert_eq!(m.apery_set(5).unwrap(), vec![0, 6, 7, 3, 9]);
        assert_eq!(m.apery_set(4).unwrap_err(), MonoidError::NotAMember { value: 4 });
        assert_eq!(m.apery_set(0).unwrap_err(), MonoidError::NotAMember { value: 0 });
        assert_eq!(m.apery_set(-3).unwrap_err(), MonoidError::NotAMember { value: -3 });
    }

    #[test]
    fn membership_agrees_with_the_apery_criterion() {
        let m = monoid(&[3, 5, 7]);
        let elements: Vec<i64> = (0..=10).filter(|&n| m.contains(n)).collect();
        assert_eq!(elements, vec![0, 3, 5, 6, 7, 8, 9, 10]);
        assert!(!m.contains(-1));
        assert!(!m.contains(4));

        let one = monoid(&[1]);
        assert!(one.contains(0) && one.contains(1) && one.contains(106));

        // Frobenius number is the last gap.
        assert!(!m.contains(m.frobenius()));
        assert!((m.frobenius() + 1..=m.frobenius() + 100).all(|n| m.contains(n)));
    }

    #[test]
    fn factorization_enumeration_fixtures() {
        let m = monoid(&[3, 5, 7]);
        let z12: Vec<Vec<i64>> = m
            .factorizations(12)
            .iter()
            .map(|z| z.exponents().to_vec())
            .collect();
        assert_eq!(z12, vec![vec![4, 0, 0], vec![0, 1, 1]]);

        assert_eq!(m.factorizations(4), vec![]);
        assert_eq!(m.factorizations(-5), vec![]);
        let z0 = m.factorizations(0);
        assert_eq!(z0.len(), 1);
        assert_eq!(z0[0].exponents(), &[0, 0, 0]);
        assert_eq!(z0[0].length(), 0);

        let one = monoid(&[1]);
        let z9 = one.factorizations(9);
        assert_eq!(z9.len(), 1);
        assert_eq!(z9[0].exponents(), &[9]);

        // Every enumerated factorization reproduces its value.
        for n in 0..=60 {
            for z in m.factorizations(n) {
                assert_eq!(z.value(), n);
            }
        }
    }

    #[test]
    fn distance_fixtures() {
        let m = monoid(&[3, 5, 7]);
        let z = m.factorizations(12);
        // d((4,0,0),(0,1,1)) = max(4, 2) = 4.
        assert_eq!(z[0].distance(&z[1]).unwrap(), 4);
        assert_eq!(z[1].distance(&z[0]).unwrap(), 4);
        assert_eq!(z[0].distance(&z[0]).unwrap(), 0);

        let a = Factorization::new(&m, vec![1, 2, 3]).unwrap();
        let b = Factorization::new(&m, vec![2, 2, 1]).unwrap();
        // common part (1,2,1): remainders (0,0,2) and (1,0,0) → max(2,1).
        assert_eq!(a.distance(&b).unwrap(), 2);

        let other = monoid(&[2, 3]);
        let c = Factorization::new(&other, vec![1, 1]).unwrap();
        assert_eq!(a.distance(&c).unwrap_err(), MonoidError::MonoidMismatch);
    }

    #[test]
    fn factorization_count_matches_enumeration() {
        let m = monoid(&[6, 9, 20]);
        for n in 0..=120 {
            assert_eq!(m.factorization_count(n), m.factorizations(n).len() as u64);
            assert_eq!(m.contains(n), m.factorization_count(n) > 0);
        }
    }
}
