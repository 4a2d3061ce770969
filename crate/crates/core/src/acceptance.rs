//! The eight reproduction criteria behind `qpell paper-check` and the
//! acceptance test target.
//!
//! Each criterion is independent, returns a pass/fail verdict plus a
//! human-readable detail line, and never panics: infrastructure errors
//! are folded into the verdict so that one broken criterion cannot mask
//! the others.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::arith::perfect_square;
use crate::ball::RealBall;
use crate::census::{self, CensusRecord};
use crate::hyperg::{build_context, check_approximant, verify_lemma24};
use crate::pell::solve_pell;
use crate::quadfam::EquationInstance;
use crate::quartic::{c2_of_c1, solve_all};

/// Verdict for one acceptance criterion.
#[derive(Debug, Clone)]
pub struct Criterion {
    pub index: u8,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl Criterion {
    pub fn line(&self) -> String {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        format!("criterion {} ({}): {} — {}", self.index, self.name, verdict, self.detail)
    }
}

/// Runs the criteria in order, invoking `emit` with each verdict as it
/// completes. With `fail_fast` the run stops at the first failure.
/// Returns true iff every executed criterion passed.
pub fn run_all(fail_fast: bool, emit: &mut dyn FnMut(&Criterion)) -> bool {
    // Criteria 1, 2 and 7 share one full census scan.
    let records = census::scan(181_700, 1_700);

    let mut all_pass = true;
    for f in CRITERIA {
        let c = f(&records);
        let pass = c.pass;
        emit(&c);
        if !pass {
            all_pass = false;
            if fail_fast {
                break;
            }
        }
    }
    all_pass
}

type ScanResult = crate::Result<Vec<CensusRecord>>;
const CRITERIA: [fn(&ScanResult) -> Criterion; 8] = [
    criterion_1,
    criterion_2,
    criterion_3,
    criterion_4,
    criterion_5,
    criterion_6,
    criterion_7,
    criterion_8,
];

fn scan_or_fail<'a>(index: u8, name: &'static str, scan: &'a ScanResult) -> Result<&'a [CensusRecord], Criterion> {
    match scan {
        Ok(records) => Ok(records),
        Err(e) => Err(Criterion { index, name, pass: false, detail: format!("census scan failed: {e}") }),
    }
}

fn criterion_1(scan: &ScanResult) -> Criterion {
    let name = "twelve-equation list";
    let records = match scan_or_fail(1, name, scan) {
        Ok(r) => r,
        Err(c) => return c,
    };
    match census::filter_twelve(records) {
        Ok(pairs) => Criterion {
            index: 1,
            name,
            pass: true,
            detail: format!("{pairs:?}"),
        },
        Err(e) => Criterion { index: 1, name, pass: false, detail: e.to_string() },
    }
}

fn criterion_2(scan: &ScanResult) -> Criterion {
    let name = "census count 35";
    let records = match scan_or_fail(2, name, scan) {
        Ok(r) => r,
        Err(c) => return c,
    };
    let counts = census::interpretation_counts(records);
    let pass = counts.any_solution == 35
        || counts.coprime_solution == 35
        || counts.lemma_candidates == 35;
    let mut detail = format!(
        "any-solution: {}, coprime-solution: {}, lemma-candidate (coprime, 2Y > b^2): {}",
        counts.any_solution, counts.coprime_solution, counts.lemma_candidates
    );
    if !pass {
        // No interpretation matches: emit the list for manual comparison.
        let pairs: Vec<(u64, u64)> = records.iter().map(|r| (r.a, r.b)).collect();
        detail.push_str(&format!("; candidates: {pairs:?}"));
    }
    Criterion { index: 2, name, pass, detail }
}

fn criterion_3(_scan: &ScanResult) -> Criterion {
    let name = "(31,5) solution set";
    let run = || -> crate::Result<(Vec<(BigInt, BigInt)>, usize)> {
        let inst = EquationInstance::new(31, 5)?;
        let sols = solve_all(&inst, 400);
        let coprime = sols.iter().filter(|s| s.coprime).count();
        Ok((sols.into_iter().map(|s| (s.x, s.y)).collect(), coprime))
    };
    match run() {
        Ok((sols, coprime)) => {
            let expected: Vec<(BigInt, BigInt)> = [(31u32, 1u32), (785, 5), (3_076_289, 313)]
                .iter()
                .map(|&(x, y)| (BigInt::from(x), BigInt::from(y)))
                .collect();
            let pass = sols == expected && coprime == 2;
            Criterion {
                index: 3,
                name,
                pass,
                detail: format!("solutions with Y <= 400: {sols:?}, coprime count {coprime}"),
            }
        }
        Err(e) => Criterion { index: 3, name, pass: false, detail: e.to_string() },
    }
}

fn criterion_4(_scan: &ScanResult) -> Criterion {
    let name = "Lemma 2.4 constants to r = 155";
    match verify_lemma24(155) {
        Ok(report) => Criterion {
            index: 4,
            name,
            pass: true,
            detail: format!(
                "maxima at r = ({}, {}), peak values ({:.4}, {:.4})",
                report.argmax1,
                report.argmax2,
                report.rows[report.argmax1 as usize].lhs1,
                report.rows[report.argmax2 as usize].lhs2
            ),
        },
        Err(e) => Criterion { index: 4, name, pass: false, detail: e.to_string() },
    }
}

fn criterion_5(_scan: &ScanResult) -> Criterion {
    let name = "remark families";
    match census::verify_remark_families(50) {
        Ok(report) => {
            let hard_ok = report.example1.iter().all(|&(_, ok)| ok)
                && report.example2.iter().all(|&(_, ok)| ok)
                && report.square_b_extra.iter().all(|&(_, ok)| ok)
                && report.recurrence.iter().all(|(_, ok)| *ok);
            Criterion {
                index: 5,
                name,
                pass: hard_ok,
                detail: format!(
                    "example 1: {} cases, example 2: {} cases, square-b: {} cases, recurrence: {} terms",
                    report.example1.len(),
                    report.example2.len(),
                    report.square_b_extra.len(),
                    report.recurrence.len()
                ),
            }
        }
        Err(e) => Criterion { index: 5, name, pass: false, detail: e.to_string() },
    }
}

fn criterion_6(_scan: &ScanResult) -> Criterion {
    let name = "Lemma 3.2bb constants";
    let prec = 256u32;
    let run = || -> crate::Result<(RealBall, RealBall)> {
        // c1 = (2/25)^(1/4) and c1 = 0.04, both exact rationals at the root.
        let c1a = RealBall::from_rational(prec, &BigRational::new(2.into(), 25.into()))
            .sqrt()?
            .sqrt()?;
        let c1b = RealBall::from_rational(prec, &BigRational::new(1.into(), 25.into()));
        Ok((c2_of_c1(&c1a)?, c2_of_c1(&c1b)?))
    };
    match run() {
        Ok((c2a, c2b)) => {
            let t331 = RealBall::from_rational(prec, &BigRational::new(331.into(), 100.into()));
            let t399 = RealBall::from_rational(prec, &BigRational::new(399.into(), 100.into()));
            let pass = c2a.definitely_gt(&t331) && c2b.definitely_gt(&t399);
            Criterion {
                index: 6,
                name,
                pass,
                detail: format!("c2((2/25)^(1/4)) = {:.6}, c2(0.04) = {:.6}", c2a.to_f64(), c2b.to_f64()),
            }
        }
        Err(e) => Criterion { index: 6, name, pass: false, detail: e.to_string() },
    }
}

fn criterion_7(scan: &ScanResult) -> Criterion {
    let name = "approximant property suite";
    let records = match scan_or_fail(7, name, scan) {
        Ok(r) => r,
        Err(c) => return c,
    };
    let mut contexts = 0usize;
    let mut checks = 0usize;
    // Solutions whose E <= 1 (Y1^2 too small against b^2): the Lemma 2.1
    // apparatus is vacuous there, so the context is excluded, not failed.
    let mut excluded = 0usize;
    for rec in records {
        // Theorem-shaped counting invariants on the scanned window.
        let coprime = rec.solutions.iter().filter(|s| s.coprime).count();
        if coprime > 2 {
            return Criterion {
                index: 7,
                name,
                pass: false,
                detail: format!("(a,b)=({},{}) has {coprime} coprime solutions", rec.a, rec.b),
            };
        }
        if rec.solutions.len() > 3 {
            return Criterion {
                index: 7,
                name,
                pass: false,
                detail: format!("(a,b)=({},{}) has {} solutions", rec.a, rec.b, rec.solutions.len()),
            };
        }
        let inst = match EquationInstance::new(rec.a, rec.b) {
            Ok(inst) => inst,
            Err(e) => {
                return Criterion { index: 7, name, pass: false, detail: e.to_string() };
            }
        };
        for sol in rec.solutions.iter().filter(|s| s.coprime && s.y >= BigInt::from(5)) {
            let ctx = match build_context(&inst, &sol.x, &sol.y, crate::DEFAULT_PRECISION) {
                Ok(ctx) => ctx,
                Err(crate::Error::HypothesisNotMet(_)) => {
                    excluded += 1;
                    continue;
                }
                Err(e) => {
                    return Criterion {
                        index: 7,
                        name,
                        pass: false,
                        detail: format!("context for (a,b)=({},{}), Y={}: {e}", rec.a, rec.b, sol.y),
                    };
                }
            };
            contexts += 1;
            for r in 1..=20u32 {
                let report = match check_approximant(&ctx, r) {
                    Ok(report) => report,
                    Err(e) => {
                        return Criterion {
                            index: 7,
                            name,
                            pass: false,
                            detail: format!("(a,b)=({},{}), r={r}: {e}", rec.a, rec.b),
                        };
                    }
                };
                checks += 1;
                let ok = report.lemma22a_ok
                    && report.q_bound_ok
                    && report.residual_bound_ok
                    && report.nondegenerate;
                if !ok {
                    return Criterion {
                        index: 7,
                        name,
                        pass: false,
                        detail: format!(
                            "(a,b)=({},{}), Y={}, r={r}: 2.2(a) {}, |q_r| bound {}, residual bound {}, nondegenerate {}",
                            rec.a, rec.b, sol.y,
                            report.lemma22a_ok, report.q_bound_ok,
                            report.residual_bound_ok, report.nondegenerate
                        ),
                    };
                }
            }
        }
    }
    Criterion {
        index: 7,
        name,
        pass: true,
        detail: format!(
            "{contexts} contexts, {checks} per-r checks, {excluded} excluded (E <= 1), counting invariants hold"
        ),
    }
}

fn criterion_8(_scan: &ScanResult) -> Criterion {
    let name = "Pell oracle equivalence";
    const Y_MAX: u64 = 10_000;
    for d in 2u64..1000 {
        let d_big = BigInt::from(d);
        if perfect_square(&d_big).is_some() {
            continue;
        }
        let pd = match solve_pell(&d_big) {
            Ok(pd) => pd,
            Err(e) => {
                return Criterion { index: 8, name, pass: false, detail: format!("D={d}: {e}") };
            }
        };
        // Brute-force minimal solutions over y <= 10^4 for norms 1, -1, -4.
        let brute = |offset: i64| -> Option<(BigInt, BigInt)> {
            for y in 1..=Y_MAX {
                let v = d as i128 * (y as i128) * (y as i128) + offset as i128;
                if v < 0 {
                    continue;
                }
                if let Some(x) = crate::arith::perfect_square_u128(v as u128) {
                    return Some((BigInt::from(x), BigInt::from(y)));
                }
            }
            None
        };
        // Comparison is restricted to the scanned window: whichever side
        // produces a solution with y <= 10^4 must agree with the other.
        let cases: [(&str, Option<&(BigInt, BigInt)>, Option<(BigInt, BigInt)>); 3] = [
            ("+1", Some(&pd.fund_plus), brute(1)),
            ("-1", pd.fund_minus.as_ref(), brute(-1)),
            ("-4", pd.t1u1.as_ref(), brute(-4)),
        ];
        for (label, cf, bf) in cases {
            let in_window = cf.map(|(_, y)| y <= &BigInt::from(Y_MAX)).unwrap_or(false);
            let agree = match (&bf, cf) {
                (Some(b), Some(c)) if in_window => b == c,
                (Some(_), _) => false, // brute force found what the CF missed
                (None, Some(_)) => !in_window,
                (None, None) => true,
            };
            if !agree {
                return Criterion {
                    index: 8,
                    name,
                    pass: false,
                    detail: format!("D={d}, norm {label}: continued fraction {cf:?} vs brute force {bf:?}"),
                };
            }
        }
        // Internal consistency: a -1 solution always doubles to a -4 one
        // (the converse can fail, e.g. D = 8).
        if pd.fund_minus.is_some() && pd.t1u1.is_none() {
            return Criterion {
                index: 8,
                name,
                pass: false,
                detail: format!("D={d}: -1 solvable but no -4 unit reported"),
            };
        }
        if let Some((t, u)) = &pd.t1u1 {
            if t * t - &d_big * u * u != BigInt::from(-4) {
                return Criterion {
                    index: 8,
                    name,
                    pass: false,
                    detail: format!("D={d}: reported (T1, U1) fails the -4 equation"),
                };
            }
        }
    }
    Criterion {
        index: 8,
        name,
        pass: true,
        detail: "all non-square D < 1000 agree with brute force for norms 1, -1, -4".into(),
    }
}
