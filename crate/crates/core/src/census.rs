//! The finite verification layer: scan all coprime (a, b) with
//! a^2 + b^2 below the threshold, collect the pairs whose equation has a
//! small solution, cut the list down to the twelve fully-checked
//! equations, and re-verify every worked example family.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use rayon::prelude::*;

use crate::arith::{perfect_square, perfect_square_u128};
use crate::pell::solve_pell;
use crate::quadfam::{enumerate_families, EquationInstance};
use crate::quartic::QuarticSolution;
use crate::{Error, Result};

/// The twelve equations reported in §4 as passing the negative-Pell and
/// single-family filters, and then fully solved.
pub const TWELVE: [(u64, u64); 12] = [
    (1, 1),
    (1, 3),
    (3, 7),
    (9, 7),
    (11, 3),
    (11, 7),
    (18, 43),
    (19, 9),
    (29, 11),
    (29, 17),
    (31, 5),
    (41, 13),
];

/// Candidate pairs that pass the negative-Pell and single-family tests by
/// direct computation here but are absent from the §4 list of twelve.
///
/// The selection of the twelve is not derivable from the stated filters:
/// e.g. (1,3) and (61,7) have isomorphic solution structure — each has
/// exactly the base solutions `(±a, 1)` inside the fundamental region and
/// one further coprime quartic solution reached by a single step of the
/// norm-one unit on the `-a` branch of Eq. (14c) — yet only (1,3) is
/// among the twelve.  Fourteen of the seventeen pairs below are later
/// instances of the Remark 1 parametric families (Example 1 with
/// b = 17..41, Example 2 with b = 7..11); (2,3), (3,26) and (86,77) are
/// sporadic.  Every one of them satisfies the negative-Pell condition and
/// the Eq. (14c) single-family condition, verified both by orbit
/// enumeration and (where the Nagell bound is small enough) by direct
/// scan of the fundamental region.
///
/// [`filter_twelve`] therefore reconciles the computed selection against
/// this frozen list: the twelve plus exactly these seventeen must appear,
/// and anything else — a missing pair, a new pair, a changed flag — is a
/// reproduction failure.  This keeps the twelve-list check exact while
/// refusing to silently absorb any new discrepancy.
pub const EXTRA_CANDIDATES: [(u64, u64); 17] = [
    (2, 3),
    (3, 26),
    (61, 7),
    (71, 17),
    (86, 77),
    (89, 19),
    (101, 9),
    (109, 21),
    (131, 23),
    (151, 11),
    (181, 27),
    (209, 29),
    (239, 31),
    (271, 33),
    (341, 37),
    (379, 39),
    (419, 41),
];

#[derive(Debug, Clone)]
pub struct CensusRecord {
    pub a: u64,
    pub b: u64,
    pub d: u64,
    pub has_solution_y_ge2: bool,
    pub has_coprime_y_ge2: bool,
    /// Has a coprime solution with `Y > b^2 / 2`, the threshold below
    /// which Lemma 3.4 already excludes solutions; the pairs with this
    /// flag set are exactly the 35 candidates of §4.
    pub candidate: bool,
    pub min_y_ge2: Option<u64>,
    pub passes_y1ub: bool,
    pub neg_pell: bool,
    pub single_family: bool,
    pub solutions: Vec<QuarticSolution>,
}

/// Largest Y with `Y^8 (a^2+b^2)^4 < 1.26e8 b^20` (Eq. (y1-UB)), the
/// point past which the contradiction engine excludes solutions.
pub fn y_upper_bound(a: u64, b: u64) -> u64 {
    let d = BigInt::from(a) * a + BigInt::from(b) * b;
    let n = BigInt::from(126_000_000u64) * BigInt::from(b).pow(20);
    let d4 = d.pow(4);
    let mut y = (&n / &d4).nth_root(8);
    while (&y + 1u8).pow(8) * &d4 < n {
        y += 1;
    }
    while y.is_positive() && y.pow(8) * &d4 >= n {
        y -= 1;
    }
    y.to_u64().unwrap_or(0)
}

fn y1ub_holds(a: u64, b: u64, y: u64) -> bool {
    let d = BigInt::from(a) * a + BigInt::from(b) * b;
    BigInt::from(y).pow(8) * d.pow(4) < BigInt::from(126_000_000u64) * BigInt::from(b).pow(20)
}

/// All solutions of `X^2 - D Y^4 = -b^2` with `2 <= Y <= y_max`, by
/// direct scan. u128 fast path; exact BigInt fallback when the products
/// would overflow.
fn scan_pair(a: u64, b: u64, y_max: u64) -> Vec<QuarticSolution> {
    let d = a as u128 * a as u128 + b as u128 * b as u128;
    let bb = b as u128 * b as u128;
    let mut out = Vec::new();
    for y in 2..=y_max {
        let y = y as u128;
        let v = y
            .checked_pow(4)
            .and_then(|y4| y4.checked_mul(d))
            .map(|p| p - bb);
        let hit = match v {
            Some(v) => perfect_square_u128(v).map(BigInt::from),
            None => {
                let big = BigInt::from(d) * BigInt::from(y).pow(4) - BigInt::from(bb);
                perfect_square(&big)
            }
        };
        if let Some(x) = hit {
            let yi = BigInt::from(y);
            let coprime = x.gcd(&yi).is_one();
            out.push(QuarticSolution { x, y: yi, coprime, witness: None });
        }
    }
    out
}

/// §4 scan: every coprime pair with non-square `D = a^2 + b^2 < limit`
/// is searched for a solution with `2 <= Y <= max(y_cutoff - 1, Y_ub)`.
/// Records are emitted for pairs with at least one hit, ordered by
/// `(D, a)` regardless of the parallel sharding.
pub fn scan(limit: u64, y_cutoff: u64) -> Result<Vec<CensusRecord>> {
    if limit > 10_000_000 {
        return Err(Error::InvalidArgument("scan limit capped at 10^7".into()));
    }
    if y_cutoff < 2 {
        return Err(Error::InvalidArgument("y_cutoff must be at least 2".into()));
    }
    let amax = (limit as f64).sqrt() as u64 + 1;
    let mut records: Vec<CensusRecord> = (1..=amax)
        .into_par_iter()
        .map(|a| -> Result<Vec<CensusRecord>> {
            let mut shard = Vec::new();
            for b in 1..=amax {
                let d = a * a + b * b;
                if d >= limit || a.gcd(&b) != 1 {
                    continue;
                }
                if perfect_square_u128(d as u128).is_some() {
                    continue;
                }
                let bound = (y_cutoff - 1).max(y_upper_bound(a, b));
                let solutions = scan_pair(a, b, bound);
                if solutions.is_empty() {
                    continue;
                }
                let inst = EquationInstance::new(a, b)?;
                let pd = solve_pell(&inst.d_big())?;
                let families = enumerate_families(&inst, &pd)?;
                let min_y = solutions.iter().map(|s| s.y.to_u64().unwrap()).min();
                // Coprime solution above the Lemma 3.4 floor: 2Y > b^2.
                let candidate = solutions
                    .iter()
                    .any(|s| s.coprime && 2u128 * s.y.to_u128().unwrap() > b as u128 * b as u128);
                shard.push(CensusRecord {
                    a,
                    b,
                    d,
                    has_solution_y_ge2: true,
                    has_coprime_y_ge2: solutions.iter().any(|s| s.coprime),
                    candidate,
                    min_y_ge2: min_y,
                    passes_y1ub: min_y.map_or(false, |y| y1ub_holds(a, b, y)),
                    neg_pell: pd.fund_minus.is_some(),
                    single_family: families.single_family,
                    solutions,
                });
            }
            Ok(shard)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    records.sort_by_key(|r| (r.d, r.a));
    Ok(records)
}

/// Pair counts under the three readings of "pair with a solution".
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InterpretationCounts {
    /// Any solution with `Y >= 2` in range (coprime or not).
    pub any_solution: usize,
    /// At least one coprime solution with `Y >= 2` in range.
    pub coprime_solution: usize,
    /// At least one coprime solution with `2Y > b^2` in range; this is
    /// the reading that reproduces the reported count of 35.
    pub lemma_candidates: usize,
}

/// Counts the scanned pairs under each documented filter reading.
pub fn interpretation_counts(records: &[CensusRecord]) -> InterpretationCounts {
    InterpretationCounts {
        any_solution: records.len(),
        coprime_solution: records.iter().filter(|r| r.has_coprime_y_ge2).count(),
        lemma_candidates: records.iter().filter(|r| r.candidate).count(),
    }
}

/// Applies the §4 filters — candidate (coprime solution with
/// `2Y > b^2`), negative Pell solvable, single Eq. (14c) family — and
/// reconciles the outcome against the reported twelve.
///
/// Direct computation marks 29 of the 35 candidates as passing the
/// negative-Pell and single-family tests: the twelve plus the seventeen
/// [`EXTRA_CANDIDATES`].  The reconciliation demands exactly that split
/// and returns the twelve; any other outcome is a reproduction failure
/// carrying the full diff, so a genuinely new pair or a lost pair can
/// never be masked.
pub fn filter_twelve(records: &[CensusRecord]) -> Result<Vec<(u64, u64)>> {
    let mut got: Vec<(u64, u64)> = records
        .iter()
        .filter(|r| r.candidate && r.neg_pell && r.single_family)
        .map(|r| (r.a, r.b))
        .collect();
    got.sort_unstable();
    let mut expected: Vec<(u64, u64)> = TWELVE.iter().chain(EXTRA_CANDIDATES.iter()).copied().collect();
    expected.sort_unstable();
    if got != expected {
        let missing: Vec<_> = expected.iter().filter(|p| !got.contains(p)).collect();
        let extra: Vec<_> = got.iter().filter(|p| !expected.contains(p)).collect();
        return Err(Error::Reproduction(format!(
            "twelve-equation reconciliation mismatch: missing {missing:?}, unexpected {extra:?}"
        )));
    }
    let mut twelve = TWELVE.to_vec();
    twelve.sort_unstable();
    Ok(twelve)
}

#[derive(Debug, Clone)]
pub struct RemarkReport {
    /// (b, formula solution checks out) per family.
    pub example1: Vec<(u64, bool)>,
    pub example2: Vec<(u64, bool)>,
    pub square_b_extra: Vec<(u64, bool)>,
    pub recurrence: Vec<(BigInt, bool)>,
    /// b' -> check of the near-optimal even family; informational only
    /// (the source states it with a parity that cannot hold literally).
    pub even_family: Vec<(u64, bool)>,
}

fn solves(a: &BigInt, b: &BigInt, x: &BigInt, y: &BigInt) -> bool {
    let d = a * a + b * b;
    x * x - d * y.pow(4) == -(b * b)
}

/// Exact verification of the closed-form solution families from the
/// remarks, for the first `count` admissible parameters of each.
pub fn verify_remark_families(count: usize) -> Result<RemarkReport> {
    let mut example1 = Vec::new();
    let mut b = 3u64;
    while example1.len() < count {
        if b % 2 == 1 && b % 5 != 0 {
            let bb = BigInt::from(b);
            let a = (&bb * &bb - 5) / 4;
            let x = (bb.pow(6) + bb.pow(4) * 5 + &bb * &bb * 15 - 5) / 16;
            let y = (&bb * &bb + 1) / 2;
            example1.push((b, solves(&a, &bb, &x, &y)));
        }
        b += 2;
    }

    let mut example2 = Vec::new();
    let mut b = 1u64;
    while example2.len() < count {
        let bb = BigInt::from(b);
        let a = (&bb * &bb * 5 - 1) / 4;
        let x = (bb.pow(6) * 3125 + bb.pow(4) * 625 + &bb * &bb * 75 - 1) / 16;
        let y = (&bb * &bb * 25 + 1) / 2;
        example2.push((b, solves(&a, &bb, &x, &y)));
        b += 2;
    }

    // Example 1 instances with b = b1^2 carry the extra non-coprime
    // solution ((b^3 + 3b)/4, b1).
    let mut square_b_extra = Vec::new();
    let mut b1 = 3u64;
    while square_b_extra.len() < count {
        if b1 % 5 != 0 {
            let b = b1 * b1;
            let bb = BigInt::from(b);
            let a = (&bb * &bb - 5) / 4;
            let x = (bb.pow(3) + &bb * 3) / 4;
            let y = BigInt::from(b1);
            square_b_extra.push((b, solves(&a, &bb, &x, &y)));
        }
        b1 += 2;
    }

    let mut recurrence = Vec::new();
    let mut t0 = BigInt::from(-3);
    let mut t1 = BigInt::from(4);
    for _ in 0..count {
        let sq = &t0 * &t0 * 624 + 625;
        recurrence.push((t0.clone(), perfect_square(&sq).is_some()));
        let t2 = &t1 * 50 - &t0;
        t0 = t1;
        t1 = t2;
    }

    let mut even_family = Vec::new();
    let mut bp = 8u64;
    while even_family.len() < count {
        if matches!(bp % 10, 0 | 2 | 8) && bp % 2 == 0 {
            let bpb = BigInt::from(bp);
            let b = &bpb * &bpb - 1;
            let a = bpb.pow(3) / 4 - &bpb * 3 / 2;
            let x = &bpb * (bpb.pow(6) + bpb.pow(4) * 4 + &bpb * &bpb * 5 + 10) / 4;
            let y = &b + 2;
            even_family.push((bp, solves(&a, &b, &x, &y)));
        }
        bp += 2;
    }

    let report = RemarkReport { example1, example2, square_b_extra, recurrence, even_family };
    let hard_ok = report.example1.iter().all(|(_, ok)| *ok)
        && report.example2.iter().all(|(_, ok)| *ok)
        && report.square_b_extra.iter().all(|(_, ok)| *ok)
        && report.recurrence.iter().all(|(_, ok)| *ok);
    if !hard_ok {
        return Err(Error::Reproduction(format!("remark family failed: {report:?}")));
    }
    Ok(report)
}

#[derive(Debug, Clone)]
pub struct FinalCheckReport {
    /// (a, b, coprime solutions with Y >= 1 up to the search bound).
    pub per_pair: Vec<(u64, u64, Vec<(BigInt, BigInt)>)>,
}

/// Known coprime solution sets of the twelve equations.
pub fn known_twelve_solutions() -> Vec<((u64, u64), Vec<(u64, u64)>)> {
    vec![
        ((1, 1), vec![(1, 1), (239, 13)]),
        ((1, 3), vec![(1, 1), (79, 5)]),
        ((3, 7), vec![(3, 1), (90483, 109)]),
        ((9, 7), vec![(9, 1), (15609, 37)]),
        ((11, 3), vec![(11, 1), (145589, 113)]),
        ((11, 7), vec![(11, 1), (8149, 25)]),
        ((18, 43), vec![(18, 1), (47458302, 1009)]),
        ((19, 9), vec![(19, 1), (35341, 41)]),
        ((29, 11), vec![(29, 1), (115411, 61)]),
        ((29, 17), vec![(29, 1), (1762829, 229)]),
        ((31, 5), vec![(31, 1), (3076289, 313)]),
        ((41, 13), vec![(41, 1), (310759, 85)]),
    ]
}

/// Re-runs the solution search for the twelve equations out to
/// `max(1700, Y_ub, b^2)` and insists the coprime sets match the known
/// lists. Any extra solution would contradict the source's conclusion
/// and is surfaced verbatim in the error.
pub fn final_check_twelve() -> Result<FinalCheckReport> {
    let known = known_twelve_solutions();
    let per_pair: Vec<(u64, u64, Vec<(BigInt, BigInt)>)> = known
        .par_iter()
        .map(|((a, b), expected)| -> Result<(u64, u64, Vec<(BigInt, BigInt)>)> {
            let bound = 1700u64.max(y_upper_bound(*a, *b)).max(b * b);
            let inst = EquationInstance::new(*a, *b)?;
            let mut found: Vec<(BigInt, BigInt)> = vec![(inst.a_big(), BigInt::one())];
            found.extend(
                scan_pair(*a, *b, bound)
                    .into_iter()
                    .filter(|s| s.coprime)
                    .map(|s| (s.x, s.y)),
            );
            let expected_big: Vec<(BigInt, BigInt)> = expected
                .iter()
                .map(|(x, y)| (BigInt::from(*x), BigInt::from(*y)))
                .collect();
            if found != expected_big {
                return Err(Error::Reproduction(format!(
                    "NEW SOLUTION SET for (a,b)=({a},{b}): found {found:?}, expected {expected_big:?}"
                )));
            }
            Ok((*a, *b, found))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FinalCheckReport { per_pair })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn y_upper_bound_examples() {
        // b = 43 pairs with a = 18: bound comfortably above 1700.
        assert_eq!(y_upper_bound(18, 43), 2677);
        // Tiny b: the bound collapses and the 1700 cutoff dominates.
        assert!(y_upper_bound(31, 5) < 1700);
    }

    #[test]
    fn scan_pair_31_5() {
        let sols = scan_pair(31, 5, 400);
        let pairs: Vec<(u64, u64)> = sols
            .iter()
            .map(|s| (s.x.to_u64().unwrap(), s.y.to_u64().unwrap()))
            .collect();
        assert_eq!(pairs, vec![(785, 5), (3076289, 313)]);
        assert!(!sols[0].coprime && sols[1].coprime);
    }

    #[test]
    fn remark_families_prefix() {
        let rep = verify_remark_families(8).unwrap();
        assert!(rep.example1.iter().all(|(_, ok)| *ok));
        assert_eq!(rep.example1[0].0, 3);
        assert_eq!(rep.example2[0].0, 1);
        assert_eq!(rep.square_b_extra[0].0, 9);
        // -3 opens the recurrence: 624*9+625 = 79^2.
        assert_eq!(rep.recurrence[0].0, BigInt::from(-3));
        assert!(rep.recurrence.iter().all(|(_, ok)| *ok));
        // The even family checks out despite the garbled parity condition.
        assert!(rep.even_family.iter().all(|(_, ok)| *ok));
        assert_eq!(rep.even_family[0].0, 8);
    }

    #[test]
    fn final_check_runs_clean() {
        let rep = final_check_twelve().unwrap();
        assert_eq!(rep.per_pair.len(), 12);
        let p31 = rep.per_pair.iter().find(|(a, b, _)| (*a, *b) == (31, 5)).unwrap();
        assert_eq!(p31.2.len(), 2);
    }

    fn synthetic(a: u64, b: u64, candidate: bool, neg_pell: bool) -> CensusRecord {
        CensusRecord {
            a,
            b,
            d: a * a + b * b,
            has_solution_y_ge2: true,
            has_coprime_y_ge2: candidate,
            candidate,
            min_y_ge2: None,
            passes_y1ub: false,
            neg_pell,
            single_family: true,
            solutions: Vec::new(),
        }
    }

    #[test]
    fn filter_twelve_reconciles_known_census() {
        // The 35 candidates with their computed flags: 29 pass the
        // negative-Pell + single-family tests, 6 fail negative Pell.
        let mut recs: Vec<CensusRecord> = TWELVE
            .iter()
            .chain(EXTRA_CANDIDATES.iter())
            .map(|&(a, b)| synthetic(a, b, true, true))
            .collect();
        for &(a, b) in &[(5, 11), (25, 41), (28, 3), (47, 28), (176, 5), (263, 23)] {
            recs.push(synthetic(a, b, true, false));
        }
        // Non-candidate pairs are ignored by the filter entirely.
        recs.push(synthetic(1, 21, false, true));
        let mut expected = TWELVE.to_vec();
        expected.sort_unstable();
        assert_eq!(filter_twelve(&recs).unwrap(), expected);

        // A missing pair or a novel pair must surface as a failure.
        let short = &recs[1..];
        assert!(filter_twelve(short).is_err());
        let mut extra = recs.clone();
        extra.push(synthetic(7, 99, true, true));
        assert!(filter_twelve(&extra).is_err());
    }

    #[test]
    fn small_scan_contains_known_pairs() {
        // Clip the census to D < 500 to keep the unit test quick.
        let recs = scan(500, 120).unwrap();
        let pairs: Vec<(u64, u64)> = recs.iter().map(|r| (r.a, r.b)).collect();
        assert!(pairs.contains(&(1, 1)));
        assert!(pairs.contains(&(1, 3)));
        assert!(pairs.contains(&(19, 9)));
        let r13 = recs.iter().find(|r| (r.a, r.b) == (1, 3)).unwrap();
        assert_eq!(r13.min_y_ge2, Some(5));
        assert!(r13.neg_pell && r13.single_family && r13.passes_y1ub);
        // (79, 5) is coprime with 2*5 > 9, so (1,3) is a lemma candidate.
        assert!(r13.candidate);
        let counts = interpretation_counts(&recs);
        assert!(counts.any_solution >= counts.coprime_solution);
        assert!(counts.coprime_solution >= counts.lemma_candidates);
        assert!(counts.lemma_candidates >= 3);
        // Deterministic order by (D, a).
        let mut keys: Vec<(u64, u64)> = recs.iter().map(|r| (r.d, r.a)).collect();
        keys.dedup();
        let mut sorted = keys.clone();
        sorted.sort_unstable();
        assert_eq!(keys, sorted);
    }
}
