//! Closed forms for catenary and tame degrees of monoids with two or three
//! pairwise-coprime generators, and parameterized affine λ forms for the
//! stratified prime family.
//!
//! The three-generator form is certified at construction: for each atom the
//! minimal multiple lying in the span of the other two is found by search, and
//! its representation is proved unique by exhaustive enumeration.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use serde::Serialize;
use thiserror::Error;

use crate::monoid::NumericalMonoid;
use crate::primes::is_prime_i64;

/// Errors from the closed-form evaluators.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClosedFormError {
    /// The monoid does not have the required number of atoms.
    #[error("expected exactly {expected} atoms, found {actual}")]
    WrongAtomCount { expected: usize, actual: usize },
    /// Two atoms share a common factor.
    #[error("atoms {a} and {b} share the common factor {gcd}")]
    NotPairwiseCoprime { a: i64, b: i64, gcd: i64 },
    /// The minimal multiple has more than one representation over the other
    /// two atoms, so the closed form does not apply.
    #[error("{value} has {count} representations over the other two atoms, expected exactly one")]
    AmbiguousRepresentation { value: i64, count: usize },
    /// The unique representation has a zero coefficient, so the closed form
    /// does not apply.
    #[error("representation of {value} over the other two atoms has a zero coefficient")]
    NonPositiveRepresentation { value: i64 },
    /// One or more named parameter preconditions failed.
    #[error("parameter preconditions violated: {flags:?}")]
    PreconditionViolated { flags: Vec<PreconditionFlag> },
    /// A λ form evaluated to a non-integer.
    #[error("lambda {index} evaluates to the non-integer {value}")]
    NonIntegralLambda { index: usize, value: String },
}

/// Named preconditions of the parameterized λ forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PreconditionFlag {
    /// `h1` must be an odd prime.
    H1NotOddPrime,
    /// `k` must satisfy 2 ≤ k ≤ (h1 − 1)/2.
    KOutOfRange,
    /// `h2` must be an odd prime.
    H2NotOddPrime,
    /// Generators must satisfy 2 < h1 < h2 < h3.
    OrderingViolated,
    /// `h2 ≡ 1 (mod h1)`.
    H2CongruenceViolated,
    /// `h3 ≡ h1 − k + 1 (mod h1)`.
    H3CongruenceViolated,
    /// `h1 − k < h3 / h2 < h1 − k + 1`.
    WindowViolated,
    /// `gcd(h3, h1) = 1`.
    H3NotCoprimeToH1,
    /// `gcd(h3, h2) = 1`.
    H3NotCoprimeToH2,
}

/// Catenary (= tame) degree of a two-atom monoid: the larger atom.
pub fn cat2(m: &NumericalMonoid) -> Result<i64, ClosedFormError> {
    let atoms = m.atoms();
    if atoms.len() != 2 {
        return Err(ClosedFormError::WrongAtomCount {
            expected: 2,
            actual: atoms.len(),
        });
    }
    Ok(atoms[1])
}

/// The table `r[i][j]`: coefficient of atom `j` in the unique representation
/// of `c[i] · atoms[i]` over the other two atoms. Keys are 1-based index
/// pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RTable {
    #[serde(rename = "12")]
    pub r12: i64,
    #[serde(rename = "13")]
    pub r13: i64,
    #[serde(rename = "21")]
    pub r21: i64,
    #[serde(rename = "23")]
    pub r23: i64,
    #[serde(rename = "31")]
    pub r31: i64,
    #[serde(rename = "32")]
    pub r32: i64,
}

/// Certified closed form for a three-atom pairwise-coprime monoid.
///
/// `c[i]` is the least positive multiplier such that `c[i] · atoms[i]` lies in
/// the monoid generated by the other two atoms; `r` holds the coefficients of
/// those (unique) representations; `value` is the catenary = tame degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ClosedForm3 {
    pub atoms: [i64; 3],
    pub c: [i64; 3],
    pub r: RTable,
    pub value: i64,
}

/// Closed-form catenary (= tame) degree of a three-atom pairwise-coprime
/// monoid, with representation uniqueness certified by enumeration.
pub fn cat3(m: &NumericalMonoid) -> Result<ClosedForm3, ClosedFormError> {
    let atoms = m.atoms();
    if atoms.len() != 3 {
        return Err(ClosedFormError::WrongAtomCount {
            expected: 3,
            actual: atoms.len(),
        });
    }
    let a = [atoms[0], atoms[1], atoms[2]];
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let g = a[i].gcd(&a[j]);
        if g != 1 {
            return Err(ClosedFormError::NotPairwiseCoprime {
                a: a[i],
                b: a[j],
                gcd: g,
            });
        }
    }
    let mut c = [0i64; 3];
    let mut r = [[0i64; 3]; 3];
    for i in 0..3 {
        let (j, l) = match i {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        let (ci, rj, rl) = minimal_multiple_in_span(a[i], a[j], a[l])?;
        c[i] = ci;
        r[i][j] = rj;
        r[i][l] = rl;
    }
    // The cross identities c_i = r_ji + r_li hold whenever the closed form
    // applies; they are re-verified by the test suite against enumeration.
    debug_assert_eq!(c[0], r[1][0] + r[2][0]);
    debug_assert_eq!(c[1], r[0][1] + r[2][1]);
    debug_assert_eq!(c[2], r[0][2] + r[1][2]);
    let value = [
        c[0],
        c[1],
        c[2],
        r[0][1] + r[0][2],
        r[1][0] + r[1][2],
        r[2][0] + r[2][1],
    ]
    .into_iter()
    .max()
    .unwrap();
    Ok(ClosedForm3 {
        atoms: a,
        c,
        r: RTable {
            r12: r[0][1],
            r13: r[0][2],
            r21: r[1][0],
            r23: r[1][2],
            r31: r[2][0],
            r32: r[2][1],
        },
        value,
    })
}

/// Least `k ≥ 1` with `k·h` representable as `x·a + y·b` (a, b coprime),
/// together with the unique `(x, y)`; uniqueness is certified by enumerating
/// every representation. Lower multiples are non-members by the search order.
fn minimal_multiple_in_span(h: i64, a: i64, b: i64) -> Result<(i64, i64, i64), ClosedFormError> {
    let k = (1..=a.min(b))
        .find(|&k| in_two_generator_span(k as i128 * h as i128, a, b))
        .expect("k = min(a, b) always lies in the span");
    let v = k as i128 * h as i128;
    // Enumerate every representation x·a + y·b = v by stepping the
    // coefficient of the larger of a and b.
    let (big, small, swapped) = if a >= b { (a, b, false) } else { (b, a, true) };
    let mut reps: Vec<(i64, i64)> = Vec::new();
    let mut t = 0i128;
    while t * big as i128 <= v {
        let rest = v - t * big as i128;
        if rest % small as i128 == 0 {
            let s = rest / small as i128;
            let (x, y) = if swapped { (s, t) } else { (t, s) };
            reps.push((x as i64, y as i64));
        }
        t += 1;
    }
    let value = (v as u128).min(i64::MAX as u128) as i64;
    match reps.as_slice() {
        [(x, y)] => {
            if *x == 0 || *y == 0 {
                Err(ClosedFormError::NonPositiveRepresentation { value })
            } else {
                Ok((k, *x, *y))
            }
        }
        [] => unreachable!("membership was established before enumeration"),
        many => Err(ClosedFormError::AmbiguousRepresentation {
            value,
            count: many.len(),
        }),
    }
}

/// Whether `n` is a non-negative combination of coprime `a` and `b`,
/// decided through the modular inverse of `a` modulo `b`.
fn in_two_generator_span(n: i128, a: i64, b: i64) -> bool {
    if n < 0 {
        return false;
    }
    let (a, b) = (a as i128, b as i128);
    let inv = mod_inverse(a.rem_euclid(b), b);
    let x0 = (n % b) * inv % b;
    x0 * a <= n
}

/// Inverse of `a` modulo `m` (gcd(a, m) = 1), via the extended Euclidean
/// algorithm; result in `0..m`.
fn mod_inverse(a: i128, m: i128) -> i128 {
    let (mut old_r, mut r) = (a, m);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    debug_assert_eq!(old_r, 1, "inputs must be coprime");
    old_s.rem_euclid(m)
}

/// An affine form `constant + h2_coeff·h2 + h3_coeff·h3` with exact rational
/// coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineForm {
    pub constant: BigRational,
    pub h2_coeff: BigRational,
    pub h3_coeff: BigRational,
}

impl AffineForm {
    fn new(constant: BigRational, h2_coeff: BigRational, h3_coeff: BigRational) -> Self {
        AffineForm {
            constant,
            h2_coeff,
            h3_coeff,
        }
    }

    /// Exact value at integer `(h2, h3)`.
    pub fn eval(&self, h2: i64, h3: i64) -> BigRational {
        &self.constant
            + &self.h2_coeff * BigRational::from(BigInt::from(h2))
            + &self.h3_coeff * BigRational::from(BigInt::from(h3))
    }

    /// Coefficientwise sum of two forms.
    pub fn add(&self, other: &AffineForm) -> AffineForm {
        AffineForm {
            constant: &self.constant + &other.constant,
            h2_coeff: &self.h2_coeff + &other.h2_coeff,
            h3_coeff: &self.h3_coeff + &other.h3_coeff,
        }
    }
}

/// The six λ forms in `(h2, h3)` for a fixed stratum `(h1, k)`. Values λ1, λ5,
/// and λ6 determine the predicted catenary = tame degree; λ2, λ3, λ4 are the
/// auxiliary constants `h1 − k + 1`, `2`, and `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LambdaForms {
    h1: i64,
    k: i64,
    forms: [AffineForm; 6],
}

impl LambdaForms {
    /// Builds the forms for stratum `(h1, k)`. Requires `h1` an odd prime and
    /// `2 ≤ k ≤ (h1 − 1)/2`.
    pub fn new(h1: i64, k: i64) -> Result<Self, ClosedFormError> {
        let mut flags = Vec::new();
        if !(is_prime_i64(h1) && h1 % 2 == 1) {
            flags.push(PreconditionFlag::H1NotOddPrime);
        }
        if !(2 <= k && h1 >= 2 && k <= (h1 - 1) / 2) {
            flags.push(PreconditionFlag::KOutOfRange);
        }
        if !flags.is_empty() {
            return Err(ClosedFormError::PreconditionViolated { flags });
        }
        let rat = |n: i64| BigRational::from(BigInt::from(n));
        let frac = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
        let forms = [
            // λ1 = ((k − 1)·h2 + h3) / h1
            AffineForm::new(rat(0), frac(k - 1, h1), frac(1, h1)),
            // λ2 = h1 − k + 1
            AffineForm::new(rat(h1 - k + 1), rat(0), rat(0)),
            // λ3 = 2
            AffineForm::new(rat(2), rat(0), rat(0)),
            // λ4 = k
            AffineForm::new(rat(k), rat(0), rat(0)),
            // λ5 = 1 + ((h1 − k + 1)·h2 − h3) / h1
            AffineForm::new(rat(1), frac(h1 - k + 1, h1), frac(-1, h1)),
            // λ6 = (h1 − 2k + 2) + (2·h3 − (h1 − 2k + 2)·h2) / h1
            AffineForm::new(rat(h1 - 2 * k + 2), frac(-(h1 - 2 * k + 2), h1), frac(2, h1)),
        ];
        Ok(LambdaForms { h1, k, forms })
    }

    pub fn h1(&self) -> i64 {
        self.h1
    }

    pub fn k(&self) -> i64 {
        self.k
    }

    /// The six forms, λ1 through λ6.
    pub fn forms(&self) -> &[AffineForm; 6] {
        &self.forms
    }

    /// Evaluates all six forms at `(h2, h3)`, requiring integer results.
    pub fn eval(&self, h2: i64, h3: i64) -> Result<[i64; 6], ClosedFormError> {
        let mut out = [0i64; 6];
        for (idx, form) in self.forms.iter().enumerate() {
            let v = form.eval(h2, h3);
            if !v.is_integer() {
                return Err(ClosedFormError::NonIntegralLambda {
                    index: idx + 1,
                    value: v.to_string(),
                });
            }
            out[idx] = i64::try_from(&v.to_integer()).expect("lambda value fits i64");
        }
        Ok(out)
    }
}

/// Predicted catenary = tame degree from λ values: max{λ1, λ5, λ6}.
pub fn predicted_degree(lambda: &[i64; 6]) -> i64 {
    lambda[0].max(lambda[4]).max(lambda[5])
}

/// Validates the full precondition set for the stratified family member
/// `(h1, k, h2, h3)` — primality, ordering, congruences, window, coprimality —
/// then evaluates the λ forms. Returns the six values and the predicted
/// catenary = tame degree. All violated preconditions are reported together.
pub fn comp3_lambdas(
    h1: i64,
    k: i64,
    h2: i64,
    h3: i64,
) -> Result<([i64; 6], i64), ClosedFormError> {
    let mut flags = Vec::new();
    if !(is_prime_i64(h1) && h1 % 2 == 1) {
        flags.push(PreconditionFlag::H1NotOddPrime);
    }
    if !(2 <= k && h1 >= 2 && k <= (h1 - 1) / 2) {
        flags.push(PreconditionFlag::KOutOfRange);
    }
    if !(is_prime_i64(h2) && h2 % 2 == 1) {
        flags.push(PreconditionFlag::H2NotOddPrime);
    }
    if !(2 < h1 && h1 < h2 && h2 < h3) {
        flags.push(PreconditionFlag::OrderingViolated);
    }
    if h2.rem_euclid(h1.max(1)) != 1 {
        flags.push(PreconditionFlag::H2CongruenceViolated);
    }
    if h3.rem_euclid(h1.max(1)) != (h1 - k + 1).rem_euclid(h1.max(1)) {
        flags.push(PreconditionFlag::H3CongruenceViolated);
    }
    let lo = (h1 - k) as i128 * h2 as i128;
    let hi = (h1 - k + 1) as i128 * h2 as i128;
    if !(lo < h3 as i128 && (h3 as i128) < hi) {
        flags.push(PreconditionFlag::WindowViolated);
    }
    if h3.gcd(&h1) != 1 {
        flags.push(PreconditionFlag::H3NotCoprimeToH1);
    }
    if h3.gcd(&h2) != 1 {
        flags.push(PreconditionFlag::H3NotCoprimeToH2);
    }
    if !flags.is_empty() {
        return Err(ClosedFormError::PreconditionViolated { flags });
    }
    let forms = LambdaForms::new(h1, k)?;
    let lambda = forms.eval(h2, h3)?;
    Ok((lambda, predicted_degree(&lambda)))
}
