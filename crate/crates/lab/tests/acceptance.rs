//! Runs every acceptance criterion at full sample counts and prints one
//! verdict line per criterion. Exits nonzero if any check fails.

use std::process::ExitCode;
use std::time::Instant;

use prophet_lab::{reproduce, SuiteOptions, SuiteReport, Verdict};

const CRITERIA: &[(u32, &str, &[&str])] = &[
    (1, "fixed thresholds fail on the 2-tower", &["fixed-threshold-failure"]),
    (2, "tower hardness", &["tower-hardness"]),
    (3, "single-item augmentation", &["augmentation-single"]),
    (4, "strict median rule failure", &["median-failure"]),
    (5, "column-sparsity ratio", &["col-sparse-ratio"]),
    (6, "representative construction", &["row-sparse-construction"]),
    (7, "row-sparsity ratio", &["row-sparse-ratio"]),
    (8, "multi-item bucket algorithm", &["multi-bucket-invariants", "multi-trend"]),
    (9, "small-budget column-sparse rule", &["appendix-c"]),
    (10, "unweighted fixed thresholds", &["appendix-a"]),
    (11, "negatively associated values", &["appendix-b"]),
    (12, "oracle self-consistency", &["oracle-consistency"]),
];

fn main() -> ExitCode {
    let opts = SuiteOptions::default();
    let mut failed = 0;
    for &(id, title, suites) in CRITERIA {
        let start = Instant::now();
        let reports: Result<Vec<SuiteReport>, _> = suites.iter().map(|s| reproduce(s, &opts)).collect();
        let reports = match reports {
            Ok(r) => r,
            Err(e) => {
                failed += 1;
                println!("criterion {id:>2} {title}: FAIL (error: {e:#})");
                continue;
            }
        };
        let count = |v| reports.iter().map(|r| r.count(v)).sum::<usize>();
        let (pass, fail, skip) = (count(Verdict::Pass), count(Verdict::Fail), count(Verdict::Skip));
        let verdict = if fail == 0 { "PASS" } else { "FAIL" };
        failed += (fail > 0) as usize;
        println!(
            "criterion {id:>2} {title}: {verdict} ({pass} pass, {fail} fail, {skip} skip; {}; {:.1} s)",
            suites.join(" + "),
            start.elapsed().as_secs_f64()
        );
        for row in reports.iter().flat_map(|r| &r.rows).filter(|r| r.verdict != Verdict::Pass) {
            let tag = if row.verdict == Verdict::Fail { "fail" } else { "skip" };
            println!("    {tag}: {} measured {:e}, bound {:e}, margin {:e} {}", row.check, row.measured, row.bound, row.margin, row.note);
        }
    }
    println!("{} of {} criteria pass", CRITERIA.len() - failed, CRITERIA.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
