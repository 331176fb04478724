//! Acceptance suite. Prints one PASS/FAIL line per criterion and fails if
//! any criterion fails. Run with `--nocapture` to see the lines.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use concomp_core::campaign::{run_campaign, Campaign, CampaignConfig, CampaignReport};
use concomp_core::interactive::{concomp, mechanism_privacy, randomized_response, Mechanism, Round};
use concomp_core::rdp::{optimal_rdp_adversary, verify_rdp_concurrent};
use concomp_core::reduction::{reduce, verify_reduction};
use concomp_core::tol::DEFAULT_GUARD;
use concomp_core::tradeoff::{f_eps_delta, np_tradeoff};
use concomp_core::distributions::product;
use concomp_core::{ExtReal, FiniteDistribution, Outcome, TradeoffFunction};

struct Line {
    id: &'static str,
    passed: bool,
    note: String,
}

fn cfg(seed: u64, trials: usize) -> CampaignConfig {
    CampaignConfig {
        seed,
        trials,
        ..CampaignConfig::default()
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn campaign_line(id: &'static str, report: &CampaignReport, took: Duration, limit: Option<Duration>) -> Line {
    let in_time = limit.is_none_or(|l| took <= l);
    Line {
        id,
        passed: report.all_passed() && in_time,
        note: format!(
            "{}/{} trials, worst deviation {:.3e}, {:.2}s{}",
            report.passed,
            report.trials,
            report.worst_deviation,
            took.as_secs_f64(),
            if in_time { "" } else { " (over time limit)" }
        ),
    }
}

fn bit(hit: &str, miss: &str, p: f64) -> FiniteDistribution {
    FiniteDistribution::from_pairs([(Outcome::text(hit), p), (Outcome::text(miss), 1.0 - p)]).unwrap()
}

/// The mechanism speaks first with a three-way answer, then answers one of
/// two queries with a strength that depends on its own first answer.
fn speaking_first() -> Mechanism {
    let mut k = BTreeMap::new();
    let prologue = |d: &str| {
        let w = if d == "x" { [0.5, 0.3, 0.2] } else { [0.2, 0.3, 0.5] };
        FiniteDistribution::from_pairs(["lo", "mid", "hi"].into_iter().map(Outcome::text).zip(w)).unwrap()
    };
    for d in ["x", "x'"] {
        let (hit, miss) = if d == "x" { ("1", "0") } else { ("0", "1") };
        k.insert(format!("{d}|"), prologue(d));
        for (a, s) in [("lo", 0.6), ("mid", 0.75), ("hi", 0.9)] {
            k.insert(format!("{d}|={a};count"), bit(hit, miss, s));
            k.insert(format!("{d}|={a};sum"), bit(hit, miss, 1.0 - s / 2.0));
        }
    }
    Mechanism::new(
        vec!["x".into(), "x'".into()],
        vec![Round::new(Vec::<String>::new(), ["lo", "mid", "hi"]), Round::new(["count", "sum"], ["0", "1"])],
        true,
        k,
    )
    .unwrap()
}

/// The adversary speaks first; one answer of the first query is impossible
/// under `x'`, and the follow-up depends on the whole history.
fn listening_first() -> Mechanism {
    let mut k = BTreeMap::new();
    k.insert("x|u".into(), bit("yes", "no", 0.4));
    k.insert("x'|u".into(), FiniteDistribution::point("no"));
    k.insert("x|v".into(), bit("yes", "no", 0.7));
    k.insert("x'|v".into(), bit("yes", "no", 0.35));
    for d in ["x", "x'"] {
        for q in ["u", "v"] {
            for a in ["yes", "no"] {
                let p = match (d, a) {
                    ("x", "yes") => 0.9,
                    ("x", _) => 0.6,
                    (_, "yes") => 0.5,
                    _ => 0.3,
                };
                let p = if q == "u" { p } else { 1.0 - p };
                k.insert(format!("{d}|{q}={a};w"), bit("yes", "no", p));
            }
        }
    }
    Mechanism::new(
        vec!["x".into(), "x'".into()],
        vec![Round::new(["u", "v"], ["yes", "no"]), Round::new(["w"], ["yes", "no"])],
        false,
        k,
    )
    .unwrap()
}

fn exemplar_passes(m: &Mechanism) -> (bool, String) {
    let res = reduce(m, "x", "x'", DEFAULT_GUARD).unwrap();
    let report = verify_reduction(m, "x", "x'", &res, DEFAULT_GUARD).unwrap();
    let dev = report.max_view_deviation.max(report.max_view_deviation_prime);
    (report.passed, format!("{} adversaries, view dev {dev:.1e}", report.adversaries))
}

fn criterion_1() -> Line {
    let (r, t) = timed(|| run_campaign(Campaign::ChainRule, &cfg(7, 100)).unwrap());
    campaign_line("1 chain-rule exactness", &r, t, Some(Duration::from_secs(10)))
}

fn criterion_2() -> Line {
    let (r, t) = timed(|| run_campaign(Campaign::Blackwell, &cfg(7, 200)).unwrap());
    let s = &r.summary;
    let dead = s["dead_zone"].as_u64().unwrap();
    let mut line = campaign_line("2 Blackwell biconditional", &r, t, Some(Duration::from_secs(30)));
    line.passed &= dead <= 2 && s["disagreements"].as_u64() == Some(0);
    line.note = format!(
        "{}; feasible {}, infeasible {}, dead zone {dead}",
        line.note, s["feasible"], s["infeasible"]
    );
    line
}

fn criterion_3() -> Line {
    let (r, t) = timed(|| run_campaign(Campaign::Coupling, &cfg(7, 100)).unwrap());
    campaign_line("3 coupling marginals", &r, t, None)
}

fn criterion_4() -> Line {
    let ((r, ex), t) = timed(|| {
        let r = run_campaign(Campaign::Reduction, &cfg(7, 50)).unwrap();
        (r, [exemplar_passes(&speaking_first()), exemplar_passes(&listening_first())])
    });
    let mut line = campaign_line("4 reduction views", &r, t, Some(Duration::from_secs(120)));
    line.passed &= ex.iter().all(|e| e.0);
    line.note = format!("{}; mechanism-first: {}; adversary-first: {}", line.note, ex[0].1, ex[1].1);
    line
}

/// Two-fold RR(ln 2): likelihood ratios 4, 1, 1/4 with masses 4/9, 4/9, 1/9
/// under the first dataset.
fn two_fold_rr_oracle() -> TradeoffFunction {
    TradeoffFunction::from_breakpoints(vec![(0.0, 1.0), (1.0 / 9.0, 5.0 / 9.0), (5.0 / 9.0, 1.0 / 9.0), (1.0, 0.0)])
        .unwrap()
}

fn criterion_5() -> Line {
    let rr = randomized_response(2f64.ln()).unwrap();
    let comp = concomp(&[rr.clone(), rr.clone()]).unwrap();
    let concurrent = mechanism_privacy(&comp, "0", "1", DEFAULT_GUARD).unwrap();
    let y = rr.kernel("0", &[], "q").unwrap();
    let y_prime = rr.kernel("1", &[], "q").unwrap();
    let brute = np_tradeoff(product(y, y).dist(), product(y_prime, y_prime).dist());
    let oracle = two_fold_rr_oracle();
    let at_kinks = oracle
        .kinks()
        .iter()
        .map(|&(a, b)| (concurrent.eval(a).unwrap() - b).abs())
        .fold(0.0, f64::max);
    let gap = concurrent.sup_distance(&brute, 101);
    let basic = f_eps_delta(2.0 * 2f64.ln(), 0.0).unwrap();
    let looser = concurrent.dominates(&basic, 1e-9) && !basic.dominates(&concurrent, 1e-9);
    Line {
        id: "5 concurrent f-DP composition",
        passed: at_kinks <= 1e-9 && gap <= 1e-9 && brute.sup_distance(&oracle, 101) <= 1e-12 && looser,
        note: format!("kink deviation {at_kinks:.1e}, brute-force distance {gap:.1e}, basic composition strictly looser: {looser}"),
    }
}

fn criterion_6() -> Line {
    let rr = randomized_response(2f64.ln()).unwrap();
    let (_, single) = optimal_rdp_adversary(&rr, "0", "1", 2.0, DEFAULT_GUARD).unwrap();
    let report = verify_rdp_concurrent(&[rr.clone(), rr], "0", "1", 2.0, DEFAULT_GUARD).unwrap();
    let target = 1.5f64.ln();
    let exact = single.approx_eq(ExtReal::Finite(target), 1e-9)
        && report.concurrent_optimum.approx_eq(ExtReal::Finite(2.0 * target), 1e-9)
        && report.passed;
    let (r, t) = timed(|| run_campaign(Campaign::Rdp, &cfg(7, 30)).unwrap());
    let mut line = campaign_line("6 RDP concurrency", &r, t, None);
    line.passed &= exact;
    line.note = format!(
        "RR pair: single {single}, concurrent {}; random pairs: {}",
        report.concurrent_optimum, line.note
    );
    line
}

fn criterion_7() -> Line {
    let (r, t) = timed(|| run_campaign(Campaign::SupSet, &cfg(7, 100)).unwrap());
    campaign_line("7 sup_set correctness", &r, t, None)
}

fn criterion_8() -> Line {
    let (r, t) = timed(|| run_campaign(Campaign::Measures, &cfg(7, 200)).unwrap());
    campaign_line("8 measure contracts", &r, t, None)
}

fn criterion_9() -> Line {
    let mut mismatched = Vec::new();
    for c in Campaign::ALL {
        let json = |threads| {
            run_campaign(c, &CampaignConfig { threads, ..cfg(11, 10) })
                .unwrap()
                .to_json()
                .unwrap()
        };
        let (a, b, again) = (json(1), json(4), json(1));
        if a != b || a != again {
            mismatched.push(c.name());
        }
    }
    Line {
        id: "9 determinism",
        passed: mismatched.is_empty(),
        note: if mismatched.is_empty() {
            format!("{} campaigns byte-identical across 1 and 4 threads", Campaign::ALL.len())
        } else {
            format!("differs: {}", mismatched.join(", "))
        },
    }
}

#[test]
fn acceptance() {
    let lines = [
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
        criterion_9(),
    ];
    for l in &lines {
        println!("[{}] {}: {}", if l.passed { "PASS" } else { "FAIL" }, l.id, l.note);
    }
    let failed: Vec<_> = lines.iter().filter(|l| !l.passed).map(|l| l.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
