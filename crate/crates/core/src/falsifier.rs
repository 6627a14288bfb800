//! Candidate polynomial formulas for invariants: parsing, exact evaluation,
//! counterexample search, and degree certificates.
//!
//! An *explicit* candidate is a finite list of polynomials `f₁..f_σ` in
//! `X1, X2, X3`; it fits a monoid when some branch evaluates to the invariant
//! exactly. An *implicit* candidate is one polynomial `F` in
//! `X1, X2, X3, Y` claiming `F(h1, h2, h3, invariant) = 0`. [`falsify`]
//! searches a fixed deterministic corpus for a monoid where a candidate
//! fails. [`degree_certificate`] shows by exact linear algebra that no
//! nonzero polynomial in `X2, X3, Y` of total degree ≤ d (with the smallest
//! generator fixed) vanishes on sampled family data.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::families::{
    comp3_generate, stratum_records, FamilyError, GenerateOptions, StrataDataset, StratumRecord,
};
use crate::invariants;
use crate::linalg::{reduce, IntMatrix};
use crate::monoid::{MonoidError, NumericalMonoid};
use crate::poly::{parse_polynomial, MultiPoly};
use crate::primes::is_prime_i64;

/// Errors from formula parsing, evaluation, and certification.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FalsifierError {
    /// The formula text could not be parsed; the position is a byte offset
    /// into the full source text.
    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },
    /// An implicit candidate must not be the zero polynomial.
    #[error("the zero polynomial is not a valid implicit candidate")]
    ZeroPolynomial,
    /// Candidates speak about monoids with at most three atoms.
    #[error("monoid has {count} atoms; candidates apply to at most 3")]
    TooManyAtoms { count: usize },
    /// The dataset was generated for a different smallest generator.
    #[error("dataset was built for h1 = {actual}, certificate requested h1 = {expected}")]
    DatasetMismatch { expected: i64, actual: i64 },
    /// The certificate needs more distinct strata than the dataset covers.
    #[error("dataset covers {available} strata; degree {degree} needs {needed}")]
    InsufficientStrata {
        degree: u32,
        available: usize,
        needed: usize,
    },
    /// Too few sample points, either as a parameter or inside one stratum.
    #[error("insufficient points{}: need {needed}, have {available}", stratum.map(|k| format!(" in stratum k = {k}")).unwrap_or_default())]
    InsufficientPoints {
        needed: usize,
        available: usize,
        /// `None`: the `points_per_stratum` parameter is below the monomial
        /// count; `Some(k)`: stratum `k` cannot supply enough usable points.
        stratum: Option<i64>,
    },
    /// `h1` must be an odd prime at least 7.
    #[error("h1 = {value} must be an odd prime at least 7")]
    H1OutOfRange { value: i64 },
    /// A found counterexample failed its independent re-verification.
    #[error("counterexample failed re-verification: {detail}")]
    SoundnessCheckFailed { detail: String },
    /// Corpus or fresh-point generation failed.
    #[error(transparent)]
    Family(#[from] FamilyError),
    /// A corpus monoid could not be constructed.
    #[error(transparent)]
    Monoid(#[from] MonoidError),
}

/// Which invariant a candidate formula claims to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InvariantKind {
    Catenary,
    Tame,
    Elasticity,
}

impl InvariantKind {
    /// Computes the invariant from first principles as an exact rational.
    pub fn compute(self, m: &NumericalMonoid) -> BigRational {
        match self {
            InvariantKind::Catenary => BigRational::from(BigInt::from(invariants::catenary(m))),
            InvariantKind::Tame => BigRational::from(BigInt::from(invariants::tame(m))),
            InvariantKind::Elasticity => invariants::elasticity(m),
        }
    }
}

impl fmt::Display for InvariantKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InvariantKind::Catenary => "catenary",
            InvariantKind::Tame => "tame",
            InvariantKind::Elasticity => "elasticity",
        })
    }
}

/// Whether a formula is a branch list or a single implicit relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormulaKind {
    /// `f₁; …; f_σ` in `X1, X2, X3`.
    Explicit,
    /// One `F` in `X1, X2, X3, Y`.
    Implicit,
}

/// A parsed candidate formula.
#[derive(Debug, Clone, PartialEq)]
pub struct FormulaCandidate {
    /// The original input text.
    pub source_text: String,
    pub body: FormulaBody,
}

/// The parsed content of a candidate.
#[derive(Debug, Clone, PartialEq)]
pub enum FormulaBody {
    /// Branches in `X1, X2, X3`; the candidate claims the invariant equals
    /// some branch value.
    Explicit(Vec<MultiPoly>),
    /// A polynomial in `X1, X2, X3, Y` claimed to vanish at
    /// `(h1, h2, h3, invariant)`.
    Implicit(MultiPoly),
}

impl FormulaCandidate {
    pub fn kind(&self) -> FormulaKind {
        match self.body {
            FormulaBody::Explicit(_) => FormulaKind::Explicit,
            FormulaBody::Implicit(_) => FormulaKind::Implicit,
        }
    }
}

/// Parses a candidate formula. Explicit candidates are one or more
/// polynomials in `X1, X2, X3` separated by `;`; implicit candidates are a
/// single nonzero polynomial in `X1, X2, X3, Y`.
pub fn parse_formula(text: &str, kind: FormulaKind) -> Result<FormulaCandidate, FalsifierError> {
    let body = match kind {
        FormulaKind::Explicit => {
            let mut branches = Vec::new();
            let mut offset = 0usize;
            for piece in text.split(';') {
                let poly = parse_polynomial(piece, 3).map_err(|e| FalsifierError::Parse {
                    position: offset + e.position,
                    message: e.message,
                })?;
                branches.push(poly);
                offset += piece.len() + 1;
            }
            FormulaBody::Explicit(branches)
        }
        FormulaKind::Implicit => {
            let poly = parse_polynomial(text, 4).map_err(|e| FalsifierError::Parse {
                position: e.position,
                message: e.message,
            })?;
            if poly.is_zero() {
                return Err(FalsifierError::ZeroPolynomial);
            }
            FormulaBody::Implicit(poly)
        }
    };
    Ok(FormulaCandidate {
        source_text: text.to_string(),
        body,
    })
}

/// The exact evaluation record of a candidate on one monoid.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CandidateValues {
    /// Each branch value `fᵢ(h1, h2, h3)`, rendered exactly.
    Explicit { branch_values: Vec<String> },
    /// `F(h1, h2, h3, invariant)`, rendered exactly.
    Implicit { residual: String },
}

/// Atoms padded to length 3 with zeros (the image of padding a generating
/// set with copies of the identity).
fn padded_atoms(m: &NumericalMonoid) -> Result<[i64; 3], FalsifierError> {
    let atoms = m.atoms();
    if atoms.len() > 3 {
        return Err(FalsifierError::TooManyAtoms { count: atoms.len() });
    }
    let mut out = [0i64; 3];
    out[..atoms.len()].copy_from_slice(atoms);
    Ok(out)
}

/// Evaluates a candidate against the invariant value, returning the exact
/// per-branch values (explicit) or residual (implicit) plus whether the
/// candidate fits.
pub fn eval_candidate_values(
    c: &FormulaCandidate,
    m: &NumericalMonoid,
    invariant: InvariantKind,
) -> Result<(CandidateValues, BigRational, bool), FalsifierError> {
    let atoms = padded_atoms(m)?;
    let actual = invariant.compute(m);
    let point3: Vec<BigRational> = atoms
        .iter()
        .map(|&a| BigRational::from(BigInt::from(a)))
        .collect();
    Ok(match &c.body {
        FormulaBody::Explicit(branches) => {
            let values: Vec<BigRational> = branches.iter().map(|f| f.eval(&point3)).collect();
            let matched = values.iter().any(|v| v == &actual);
            let rendered = values.iter().map(|v| v.to_string()).collect();
            (
                CandidateValues::Explicit {
                    branch_values: rendered,
                },
                actual,
                matched,
            )
        }
        FormulaBody::Implicit(f) => {
            let mut point4 = point3;
            point4.push(actual.clone());
            let residual = f.eval(&point4);
            let vanishes = residual.is_zero();
            (
                CandidateValues::Implicit {
                    residual: residual.to_string(),
                },
                actual,
                vanishes,
            )
        }
    })
}

/// Whether the candidate fits the monoid: some branch equals the invariant
/// (explicit), or the relation vanishes at the invariant (implicit).
pub fn eval_candidate(
    c: &FormulaCandidate,
    m: &NumericalMonoid,
    invariant: InvariantKind,
) -> Result<bool, FalsifierError> {
    eval_candidate_values(c, m, invariant).map(|(_, _, fits)| fits)
}

/// A monoid on which a candidate formula fails, with the exact evidence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counterexample {
    /// Atoms of the refuting monoid.
    pub atoms: Vec<i64>,
    pub invariant_name: InvariantKind,
    /// The true invariant value, rendered exactly.
    pub actual: String,
    pub candidate_values: CandidateValues,
    /// Corpus monoids examined, including this one.
    pub examined: usize,
}

/// Result of a counterexample search.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum FalsifyOutcome {
    Counterexample(Counterexample),
    NotFoundWithinBudget { examined: usize },
}

/// The fixed search corpus: the three-atom seed ⟨3, 5, 7⟩ followed by the
/// first family member of every stratum, strata ordered by `(h1, k)` with
/// `h1` running over odd primes from 7 upward.
fn corpus() -> impl Iterator<Item = Result<NumericalMonoid, FalsifierError>> {
    let mut h1 = 7i64;
    let mut k = 1i64;
    let mut seeded = false;
    std::iter::from_fn(move || {
        if !seeded {
            seeded = true;
            return Some(NumericalMonoid::new(&[3, 5, 7]).map_err(FalsifierError::from));
        }
        k += 1;
        if k > (h1 - 1) / 2 {
            h1 += 2;
            while !is_prime_i64(h1) {
                h1 += 2;
            }
            k = 2;
        }
        let made = comp3_generate(h1, k, &GenerateOptions::default())
            .map_err(FalsifierError::from)
            .and_then(|rec| {
                NumericalMonoid::new(&[rec.h1, rec.h2, rec.h3]).map_err(FalsifierError::from)
            });
        Some(made)
    })
}

/// Searches the corpus for a monoid on which the candidate fails, examining
/// at most `budget` monoids. Any returned counterexample is re-verified with
/// a fresh invariant computation before being reported.
pub fn falsify(
    c: &FormulaCandidate,
    invariant: InvariantKind,
    budget: usize,
) -> Result<FalsifyOutcome, FalsifierError> {
    let mut examined = 0usize;
    for monoid in corpus().take(budget) {
        let m = monoid?;
        examined += 1;
        let (values, actual, fits) = eval_candidate_values(c, &m, invariant)?;
        if !fits {
            reverify(c, &m, invariant, &actual)?;
            return Ok(FalsifyOutcome::Counterexample(Counterexample {
                atoms: m.atoms().to_vec(),
                invariant_name: invariant,
                actual: actual.to_string(),
                candidate_values: values,
                examined,
            }));
        }
    }
    Ok(FalsifyOutcome::NotFoundWithinBudget { examined })
}

/// Recomputes the invariant on a freshly constructed monoid and re-evaluates
/// the candidate, confirming the defining inequality of the counterexample.
fn reverify(
    c: &FormulaCandidate,
    m: &NumericalMonoid,
    invariant: InvariantKind,
    claimed_actual: &BigRational,
) -> Result<(), FalsifierError> {
    let fresh = NumericalMonoid::new(m.atoms())?;
    let (_, actual, fits) = eval_candidate_values(c, &fresh, invariant)?;
    if &actual != claimed_actual || fits {
        return Err(FalsifierError::SoundnessCheckFailed {
            detail: format!(
                "atoms {:?}: recomputed {invariant} = {actual}, candidate fits = {fits}",
                m.atoms()
            ),
        });
    }
    Ok(())
}

/// Converts an explicit branch list into the implicit product
/// `∏ᵢ (fᵢ − Y)`: the product vanishes at the invariant exactly when some
/// branch equals it.
pub fn explicit_to_implicit(c: &FormulaCandidate) -> Result<FormulaCandidate, FalsifierError> {
    let FormulaBody::Explicit(branches) = &c.body else {
        return Ok(c.clone());
    };
    let y = MultiPoly::var(4, 3);
    let mut product = MultiPoly::constant(4, BigRational::one());
    for f in branches {
        product = product.mul(&f.lift_arity(4).sub(&y));
    }
    debug_assert!(!product.is_zero(), "branch factors fᵢ − Y are never zero");
    Ok(FormulaCandidate {
        source_text: format!("product of (branch - Y) over: {}", c.source_text),
        body: FormulaBody::Implicit(product),
    })
}

/// A family record used to refute annihilators, identified by its stratum.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FreshPoint {
    pub k: i64,
    pub h2: i64,
    pub h3: i64,
    pub catenary: i64,
}

/// One annihilator refuted on one fresh point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnnihilatorRefutation {
    /// Index into the reported annihilator basis.
    pub basis_index: usize,
    pub point: FreshPoint,
    /// The nonzero value of the annihilator at the point, rendered exactly.
    pub residual: String,
}

/// Outcome of a degree certificate run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CertificateOutcome {
    /// The annihilator space of the sample matrix is trivial.
    Certified,
    /// The sample matrix had annihilators, but enlarging with freshly
    /// generated records refuted all of them: the enlarged matrix has a
    /// trivial annihilator space, and each original basis polynomial fails
    /// on a listed fresh point.
    CertifiedAfterFalsification {
        fresh_points: Vec<FreshPoint>,
        refutations: Vec<AnnihilatorRefutation>,
        enlarged_rows: usize,
        enlarged_rank: usize,
    },
    /// Annihilators survived the fresh-point budget.
    Inconclusive {
        advice: String,
        nullspace_dim: usize,
    },
}

/// Exact-linear-algebra evidence that no nonzero polynomial in `X2, X3, Y`
/// of total degree ≤ `degree` vanishes on the sampled data of a fixed `h1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeCertificate {
    pub h1: i64,
    pub degree: u32,
    /// Distinct strata sampled; always more than `degree` of them.
    pub strata_used: Vec<i64>,
    /// Points taken from each stratum.
    pub sample_points: usize,
    /// Monomial exponents `(a, b, c)` for `X2^a X3^b Y^c`, graded
    /// lexicographic.
    pub monomials: Vec<[u32; 3]>,
    pub matrix_rows: usize,
    pub matrix_cols: usize,
    pub rank: usize,
    pub pivot_columns: Vec<usize>,
    pub nullity: usize,
    /// Integer coefficient vectors of the annihilator basis of the sample
    /// matrix (empty when certified outright), in monomial order.
    pub annihilator_basis: Vec<Vec<String>>,
    /// Extra generated points appended to repair a degenerate (collinear)
    /// stratum sample; usually empty.
    pub supplemental_points: Vec<FreshPoint>,
    pub outcome: CertificateOutcome,
}

/// Monomial exponents `(a, b, c)` with `a + b + c ≤ d`, graded lex:
/// ascending total degree, then lexicographically descending exponents.
fn monomials_up_to(d: u32) -> Vec<[u32; 3]> {
    let mut out = Vec::new();
    for deg in 0..=d {
        for a in (0..=deg).rev() {
            for b in (0..=deg - a).rev() {
                out.push([a, b, deg - a - b]);
            }
        }
    }
    out
}

fn point_of(record: &StratumRecord) -> FreshPoint {
    FreshPoint {
        k: record.k,
        h2: record.h2,
        h3: record.h3,
        catenary: record.catenary.unwrap_or(record.predicted),
    }
}

fn monomial_row(point: &FreshPoint, monomials: &[[u32; 3]]) -> Vec<BigInt> {
    monomials
        .iter()
        .map(|&[a, b, c]| {
            BigInt::from(point.h2).pow(a)
                * BigInt::from(point.h3).pow(b)
                * BigInt::from(point.catenary).pow(c)
        })
        .collect()
}

/// Whether all `(h2, h3)` coordinates lie on one affine line. Fewer than
/// three points never count as degenerate.
fn all_collinear(points: &[&FreshPoint]) -> bool {
    if points.len() < 3 {
        return false;
    }
    let (x0, y0) = (points[0].h2 as i128, points[0].h3 as i128);
    let (x1, y1) = (points[1].h2 as i128, points[1].h3 as i128);
    points.iter().skip(2).all(|p| {
        let (x2, y2) = (p.h2 as i128, p.h3 as i128);
        (x1 - x0) * (y2 - y0) == (y1 - y0) * (x2 - x0)
    })
}

/// Value of an integer-coefficient polynomial (in monomial order) at a point.
fn apply_annihilator(coeffs: &[BigInt], monomials: &[[u32; 3]], point: &FreshPoint) -> BigInt {
    let row = monomial_row(point, monomials);
    coeffs
        .iter()
        .zip(row.iter())
        .map(|(c, v)| c * v)
        .sum()
}

/// Rounds of fresh points (one per stratum each) tried before giving up.
const FRESH_ROUNDS: usize = 3;
/// Extra points tried to repair one degenerate stratum sample.
const SUPPLEMENT_LIMIT: usize = 4;

/// Certifies that no nonzero polynomial in `X2, X3, Y` of total degree
/// ≤ `d` vanishes at every sampled point `(h2, h3, catenary)` of the
/// dataset. Requires more than `d` distinct strata and at least as many
/// points per stratum as there are monomials of degree ≤ `d` in two
/// variables. When the sample matrix has annihilators, freshly generated
/// records are appended until the annihilator space collapses.
pub fn degree_certificate(
    h1: i64,
    d: u32,
    points_per_stratum: usize,
    dataset: &StrataDataset,
) -> Result<DegreeCertificate, FalsifierError> {
    if !(h1 >= 7 && h1 % 2 == 1 && is_prime_i64(h1)) {
        return Err(FalsifierError::H1OutOfRange { value: h1 });
    }
    if dataset.h1 != h1 {
        return Err(FalsifierError::DatasetMismatch {
            expected: h1,
            actual: dataset.h1,
        });
    }
    let strata: Vec<i64> = dataset
        .records
        .iter()
        .map(|r| r.k)
        .collect::<BTreeSet<i64>>()
        .into_iter()
        .collect();
    let needed_strata = d as usize + 1;
    if strata.len() < needed_strata {
        return Err(FalsifierError::InsufficientStrata {
            degree: d,
            available: strata.len(),
            needed: needed_strata,
        });
    }
    let min_points = ((d as usize + 1) * (d as usize + 2)) / 2;
    if points_per_stratum < min_points {
        return Err(FalsifierError::InsufficientPoints {
            needed: min_points,
            available: points_per_stratum,
            stratum: None,
        });
    }

    // Select the sample: the first points_per_stratum records per stratum,
    // repairing any stratum whose planar points are all collinear with extra
    // generated points.
    let mut points: Vec<FreshPoint> = Vec::new();
    let mut supplemental: Vec<FreshPoint> = Vec::new();
    for &k in &strata {
        let in_stratum: Vec<FreshPoint> = dataset
            .records
            .iter()
            .filter(|r| r.k == k)
            .take(points_per_stratum)
            .map(point_of)
            .collect();
        if in_stratum.len() < points_per_stratum {
            return Err(FalsifierError::InsufficientPoints {
                needed: points_per_stratum,
                available: in_stratum.len(),
                stratum: Some(k),
            });
        }
        let mut stratum_points = in_stratum;
        if stratum_points.len() >= 3 {
            let mut walker = stratum_records(h1, k)?;
            let mut added = 0usize;
            while all_collinear(&stratum_points.iter().collect::<Vec<_>>()) {
                if added == SUPPLEMENT_LIMIT {
                    return Err(FalsifierError::InsufficientPoints {
                        needed: points_per_stratum + added + 1,
                        available: stratum_points.len(),
                        stratum: Some(k),
                    });
                }
                let fresh = next_unused(&mut walker, &stratum_points)?;
                supplemental.push(fresh.clone());
                stratum_points.push(fresh);
                added += 1;
            }
        }
        points.extend(stratum_points);
    }

    let monomials = monomials_up_to(d);
    let rows: Vec<Vec<BigInt>> = points.iter().map(|p| monomial_row(p, &monomials)).collect();
    let matrix = IntMatrix::from_rows(rows.clone());
    let reduction = reduce(&matrix);
    let nullity = reduction.nullspace.len();
    let annihilator_basis: Vec<Vec<String>> = reduction
        .nullspace
        .iter()
        .map(|v| v.iter().map(|c| c.to_string()).collect())
        .collect();

    let mut certificate = DegreeCertificate {
        h1,
        degree: d,
        strata_used: strata.clone(),
        sample_points: points_per_stratum,
        monomials: monomials.clone(),
        matrix_rows: matrix.rows(),
        matrix_cols: matrix.cols(),
        rank: reduction.rank,
        pivot_columns: reduction.pivot_cols.clone(),
        nullity,
        annihilator_basis,
        supplemental_points: supplemental,
        outcome: CertificateOutcome::Certified,
    };
    if nullity == 0 {
        return Ok(certificate);
    }

    // Enlarge with fresh records, one per stratum per round, until the
    // annihilator space collapses.
    let mut fresh_points: Vec<FreshPoint> = Vec::new();
    let mut all_rows = rows;
    for _ in 0..FRESH_ROUNDS {
        for &k in &strata {
            let mut walker = stratum_records(h1, k)?;
            let known: Vec<FreshPoint> = points
                .iter()
                .chain(fresh_points.iter())
                .filter(|p| p.k == k)
                .cloned()
                .collect();
            let fresh = next_unused(&mut walker, &known)?;
            all_rows.push(monomial_row(&fresh, &monomials));
            fresh_points.push(fresh);
        }
        let enlarged = reduce(&IntMatrix::from_rows(all_rows.clone()));
        if enlarged.nullspace.is_empty() {
            let refutations = reduction
                .nullspace
                .iter()
                .enumerate()
                .map(|(basis_index, coeffs)| {
                    let (point, residual) = fresh_points
                        .iter()
                        .find_map(|p| {
                            let value = apply_annihilator(coeffs, &monomials, p);
                            (!value.is_zero()).then(|| (p.clone(), value.to_string()))
                        })
                        .expect("trivial enlarged annihilator space refutes every basis vector");
                    AnnihilatorRefutation {
                        basis_index,
                        point,
                        residual,
                    }
                })
                .collect();
            certificate.outcome = CertificateOutcome::CertifiedAfterFalsification {
                fresh_points,
                refutations,
                enlarged_rows: all_rows.len(),
                enlarged_rank: enlarged.rank,
            };
            return Ok(certificate);
        }
    }
    let surviving = reduce(&IntMatrix::from_rows(all_rows.clone())).nullspace.len();
    certificate.outcome = CertificateOutcome::Inconclusive {
        advice: format!(
            "annihilator space still has dimension {surviving} after {} fresh points; \
             raise points_per_stratum above {points_per_stratum} or extend the dataset \
             with further strata data",
            fresh_points.len()
        ),
        nullspace_dim: surviving,
    };
    Ok(certificate)
}

/// The next record from the walker whose `(h2, h3)` is not already used.
fn next_unused(
    walker: &mut crate::families::StratumIter,
    used: &[FreshPoint],
) -> Result<FreshPoint, FalsifierError> {
    loop {
        let record = walker.next().expect("stratum walk is unbounded")?;
        let candidate = point_of(&record);
        if !used
            .iter()
            .any(|p| p.h2 == candidate.h2 && p.h3 == candidate.h3)
        {
            return Ok(candidate);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::strata_dataset;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn monoid(gens: &[i64]) -> NumericalMonoid {
        NumericalMonoid::new(gens).unwrap()
    }

    #[test]
    fn parses_explicit_branch_lists() {
        let c = parse_formula("X2 + X3", FormulaKind::Explicit).unwrap();
        let FormulaBody::Explicit(branches) = &c.body else {
            panic!("expected explicit body")
        };
        assert_eq!(branches.len(), 1);
        assert_eq!(c.kind(), FormulaKind::Explicit);

        let c = parse_formula("X1; X2 - 1; 1/2", FormulaKind::Explicit).unwrap();
        let FormulaBody::Explicit(branches) = &c.body else {
            panic!("expected explicit body")
        };
        assert_eq!(branches.len(), 3);
        assert_eq!(branches[2].eval(&[rat(9, 1), rat(9, 1), rat(9, 1)]), rat(1, 2));
    }

    #[test]
    fn parse_errors_carry_global_positions() {
        // The offending Y sits at byte 4 of the full text.
        let err = parse_formula("X2; Y", FormulaKind::Explicit).unwrap_err();
        assert!(matches!(err, FalsifierError::Parse { position: 4, .. }), "{err:?}");

        let err = parse_formula("X1 +", FormulaKind::Implicit).unwrap_err();
        assert!(matches!(err, FalsifierError::Parse { .. }));

        assert_eq!(
            parse_formula("X1 - X1", FormulaKind::Implicit).unwrap_err(),
            FalsifierError::ZeroPolynomial
        );
        assert_eq!(
            parse_formula("0", FormulaKind::Implicit).unwrap_err(),
            FalsifierError::ZeroPolynomial
        );
    }

    #[test]
    fn evaluates_candidates_exactly() {
        let m357 = monoid(&[3, 5, 7]);

        let elasticity_formula = parse_formula("X3 - X1*Y", FormulaKind::Implicit).unwrap();
        assert!(eval_candidate(&elasticity_formula, &m357, InvariantKind::Elasticity).unwrap());

        let sum = parse_formula("X2 + X3", FormulaKind::Explicit).unwrap();
        let (values, actual, fits) =
            eval_candidate_values(&sum, &m357, InvariantKind::Catenary).unwrap();
        assert!(!fits);
        assert_eq!(actual, rat(4, 1));
        assert_eq!(
            values,
            CandidateValues::Explicit {
                branch_values: vec!["12".to_string()]
            }
        );

        let constant = parse_formula("Y - 4", FormulaKind::Implicit).unwrap();
        assert!(eval_candidate(&constant, &m357, InvariantKind::Catenary).unwrap());
    }

    #[test]
    fn evaluation_pads_missing_atoms_with_zero() {
        // ⟨2, 3⟩ evaluates with atoms (2, 3, 0); its catenary degree is 3.
        let m = monoid(&[2, 3]);
        let shifted = parse_formula("X1 + 1", FormulaKind::Explicit).unwrap();
        assert!(eval_candidate(&shifted, &m, InvariantKind::Catenary).unwrap());
        let third = parse_formula("X3", FormulaKind::Explicit).unwrap();
        assert!(!eval_candidate(&third, &m, InvariantKind::Catenary).unwrap());
    }

    #[test]
    fn rejects_monoids_with_more_than_three_atoms() {
        let m = monoid(&[5, 7, 9, 11]);
        assert_eq!(m.atoms().len(), 4);
        let c = parse_formula("Y", FormulaKind::Implicit).unwrap();
        assert_eq!(
            eval_candidate(&c, &m, InvariantKind::Catenary).unwrap_err(),
            FalsifierError::TooManyAtoms { count: 4 }
        );
    }

    #[test]
    fn falsifies_a_constant_catenary_claim_on_the_family() {
        let c = parse_formula("Y - 4", FormulaKind::Implicit).unwrap();
        let FalsifyOutcome::Counterexample(cx) =
            falsify(&c, InvariantKind::Catenary, 50).unwrap()
        else {
            panic!("expected a counterexample")
        };
        // The seed ⟨3,5,7⟩ has catenary 4 and survives; the first family
        // member refutes the claim.
        assert_eq!(cx.atoms, vec![7, 29, 146]);
        assert_eq!(cx.actual, "26");
        assert_eq!(cx.examined, 2);
        assert_eq!(
            cx.candidate_values,
            CandidateValues::Implicit {
                residual: "22".to_string()
            }
        );
    }

    #[test]
    fn falsifies_an_explicit_candidate_on_the_seed() {
        let c = parse_formula("X2 + X3", FormulaKind::Explicit).unwrap();
        let FalsifyOutcome::Counterexample(cx) =
            falsify(&c, InvariantKind::Catenary, 10).unwrap()
        else {
            panic!("expected a counterexample")
        };
        assert_eq!(cx.atoms, vec![3, 5, 7]);
        assert_eq!(cx.examined, 1);
        assert_eq!(
            cx.candidate_values,
            CandidateValues::Explicit {
                branch_values: vec!["12".to_string()]
            }
        );
    }

    #[test]
    fn elasticity_formula_survives_the_family() {
        let c = parse_formula("X3 - X1*Y", FormulaKind::Implicit).unwrap();
        assert_eq!(
            falsify(&c, InvariantKind::Elasticity, 30).unwrap(),
            FalsifyOutcome::NotFoundWithinBudget { examined: 30 }
        );
    }

    #[test]
    fn counterexamples_serialize_to_json() {
        let c = parse_formula("Y - 4", FormulaKind::Implicit).unwrap();
        let outcome = falsify(&c, InvariantKind::Catenary, 50).unwrap();
        let json = serde_json::to_value(&outcome).unwrap();
        assert_eq!(json["outcome"], serde_json::json!("counterexample"));
        assert_eq!(json["invariant_name"], serde_json::json!("catenary"));
        assert_eq!(json["candidate_values"]["kind"], serde_json::json!("implicit"));
    }

    #[test]
    fn product_construction_expands_exactly() {
        // One branch: X2 becomes X2 − Y.
        let single = parse_formula("X2", FormulaKind::Explicit).unwrap();
        let implicit = explicit_to_implicit(&single).unwrap();
        let FormulaBody::Implicit(f) = &implicit.body else {
            panic!("expected implicit body")
        };
        let expected = parse_formula("X2 - Y", FormulaKind::Implicit).unwrap();
        let FormulaBody::Implicit(g) = &expected.body else {
            unreachable!()
        };
        assert_eq!(f, g);

        // Two branches: (2 − Y)(X3 − Y) = 2·X3 − 2·Y − X3·Y + Y².
        let pair = parse_formula("2; X3", FormulaKind::Explicit).unwrap();
        let implicit = explicit_to_implicit(&pair).unwrap();
        let FormulaBody::Implicit(f) = &implicit.body else {
            panic!("expected implicit body")
        };
        let expected =
            parse_formula("2*X3 - 2*Y - X3*Y + Y^2", FormulaKind::Implicit).unwrap();
        let FormulaBody::Implicit(g) = &expected.body else {
            unreachable!()
        };
        assert_eq!(f, g);
    }

    #[test]
    fn product_consistency_on_a_monoid() {
        let m = monoid(&[3, 5, 7]);
        // A branch that fits: the product must vanish too.
        let fitting = parse_formula("4; X2 + X3", FormulaKind::Explicit).unwrap();
        assert!(eval_candidate(&fitting, &m, InvariantKind::Catenary).unwrap());
        let product = explicit_to_implicit(&fitting).unwrap();
        assert!(eval_candidate(&product, &m, InvariantKind::Catenary).unwrap());

        // A falsified product falsifies the branch list on the same monoid.
        let failing = parse_formula("X2 + X3", FormulaKind::Explicit).unwrap();
        let product = explicit_to_implicit(&failing).unwrap();
        assert!(!eval_candidate(&product, &m, InvariantKind::Catenary).unwrap());
        assert!(!eval_candidate(&failing, &m, InvariantKind::Catenary).unwrap());
    }

    #[test]
    fn degree_zero_certificates_are_immediate() {
        let ds = strata_dataset(7, 2, &rat(0, 1)).unwrap();
        let cert = degree_certificate(7, 0, 1, &ds).unwrap();
        assert_eq!(cert.outcome, CertificateOutcome::Certified);
        assert_eq!(cert.monomials, vec![[0, 0, 0]]);
        assert_eq!(cert.rank, 1);
        assert_eq!(cert.nullity, 0);
        assert_eq!(cert.strata_used, vec![2, 3]);
    }

    #[test]
    fn certificate_preconditions_are_enforced() {
        let ds = strata_dataset(7, 3, &rat(0, 1)).unwrap();
        assert_eq!(
            degree_certificate(7, 10, 3, &ds).unwrap_err(),
            FalsifierError::InsufficientStrata {
                degree: 10,
                available: 2,
                needed: 11
            }
        );
        // Degree 1 needs C(3, 2) = 3 points per stratum.
        assert_eq!(
            degree_certificate(7, 1, 2, &ds).unwrap_err(),
            FalsifierError::InsufficientPoints {
                needed: 3,
                available: 2,
                stratum: None
            }
        );
        // A stratum with too few records is reported by its k.
        assert_eq!(
            degree_certificate(7, 0, 4, &ds).unwrap_err(),
            FalsifierError::InsufficientPoints {
                needed: 4,
                available: 3,
                stratum: Some(2)
            }
        );
        assert_eq!(
            degree_certificate(11, 0, 1, &ds).unwrap_err(),
            FalsifierError::DatasetMismatch {
                expected: 11,
                actual: 7
            }
        );
        assert_eq!(
            degree_certificate(9, 0, 1, &ds).unwrap_err(),
            FalsifierError::H1OutOfRange { value: 9 }
        );
    }

    #[test]
    fn linear_certificate_on_two_strata() {
        let ds = strata_dataset(7, 3, &rat(0, 1)).unwrap();
        let cert = degree_certificate(7, 1, 3, &ds).unwrap();
        assert_eq!(cert.matrix_rows, 6);
        assert_eq!(cert.matrix_cols, 4);
        assert!(matches!(
            cert.outcome,
            CertificateOutcome::Certified | CertificateOutcome::CertifiedAfterFalsification { .. }
        ));
        // Strata-count lower bound: certified degree stays below the number
        // of distinct strata.
        assert!((cert.degree as usize) < cert.strata_used.len());
    }

    #[test]
    fn certificate_monotonicity_in_degree() {
        let ds = strata_dataset(13, 10, &rat(0, 1)).unwrap();
        let d2 = degree_certificate(13, 2, 6, &ds).unwrap();
        let d1 = degree_certificate(13, 1, 6, &ds).unwrap();
        if d2.outcome == CertificateOutcome::Certified {
            assert_eq!(d1.outcome, CertificateOutcome::Certified);
        }
        assert!(matches!(
            d2.outcome,
            CertificateOutcome::Certified | CertificateOutcome::CertifiedAfterFalsification { .. }
        ));
    }

    #[test]
    fn collinear_samples_are_repaired_with_fresh_points() {
        // Hand-build a dataset whose strata each consist of three points on
        // one vertical line h2 = 29, a degenerate configuration the
        // generator itself never produces.
        let mut records = Vec::new();
        for (k, h3s) in [(2i64, [146i64, 153, 160]), (3, [117, 124, 131])] {
            for h3 in h3s {
                let (lambda, predicted) = crate::closedform::comp3_lambdas(7, k, 29, h3).unwrap();
                records.push(StratumRecord {
                    h1: 7,
                    k,
                    h2: 29,
                    h3,
                    lambda,
                    predicted,
                    catenary: None,
                    tame: None,
                    verified: crate::families::Verification::ClosedFormOnly,
                });
            }
        }
        let ds = StrataDataset {
            h1: 7,
            provenance: crate::families::Provenance {
                h1: 7,
                per_stratum: 3,
                crosscheck_fraction: "0".into(),
                h2_min: 2,
                max_h3_per_h2: 3,
                seed: None,
            },
            records,
        };
        let cert = degree_certificate(7, 1, 3, &ds).unwrap();
        assert!(!cert.supplemental_points.is_empty());
        assert!(matches!(
            cert.outcome,
            CertificateOutcome::Certified | CertificateOutcome::CertifiedAfterFalsification { .. }
        ));
    }

    #[test]
    fn certificates_serialize_with_a_full_transcript() {
        let ds = strata_dataset(7, 3, &rat(0, 1)).unwrap();
        let cert = degree_certificate(7, 1, 3, &ds).unwrap();
        let json = serde_json::to_value(&cert).unwrap();
        assert_eq!(json["h1"], serde_json::json!(7));
        assert_eq!(json["matrix_rows"], serde_json::json!(6));
        assert_eq!(json["matrix_cols"], serde_json::json!(4));
        assert!(json["rank"].is_u64() || json["rank"].is_i64());
        assert!(json["pivot_columns"].is_array());
        assert!(json["outcome"]["status"].is_string());
    }
}
