//! End-to-end acceptance run: one PASS/FAIL line per criterion, nonzero exit
//! status if any criterion fails.

use std::time::Instant;

use mlqc::and_protocol::build_and_protocol;
use mlqc::audit::{all_checks, audit, check_concavity, Verdict};
use mlqc::compilers::{compile_oneshot, compile_private, send_input_protocol, verify_oneshot, verify_private};
use mlqc::compilers::private::DEFAULT_WIDTH_CAP;
use mlqc::corpus::{audit_corpus, coined_corpus};
use mlqc::cost::{cic, cic0};
use mlqc::lemmas;
use mlqc::protocol::{and, error_probability, u0, InputDistribution, DEFAULT_CAP};

const SEED: u64 = 20_240_601;
const TOL: f64 = 1e-9;
/// Largest `k·cic/log₂k` measured on Π_AND for r = 1..8 was 0.8147 (r = 8);
/// frozen slightly above.
const FROZEN_RATIO: f64 = 0.82;

struct Outcome {
    pass: bool,
    detail: String,
}

fn run(n: usize, title: &str, f: impl FnOnce() -> Result<Outcome, mlqc::Error>) -> bool {
    let start = Instant::now();
    let outcome = f().unwrap_or_else(|e| Outcome {
        pass: false,
        detail: format!("error: {e}"),
    });
    println!(
        "{} criterion {n}: {title} — {} [{:.2}s]",
        if outcome.pass { "PASS" } else { "FAIL" },
        outcome.detail,
        start.elapsed().as_secs_f64()
    );
    outcome.pass
}

fn main() {
    let mut ok = true;

    ok &= run(1, "pure-state Pinsker equality", || {
        let r = lemmas::pure_pinsker(SEED, 200, TOL)?;
        Ok(Outcome {
            pass: r.all_passed() && r.trials == 200,
            detail: format!("{}/{} encodings, max |I − h₂| = {:.3e}", r.passed, r.trials, r.worst),
        })
    });

    ok &= run(2, "Uhlmann unitary attains the fidelity", || {
        let r = lemmas::uhlmann(SEED, 100, 1e-8)?;
        Ok(Outcome {
            pass: r.all_passed() && r.trials == 100,
            detail: format!("{}/{} purifications, max |overlap − F| = {:.3e}", r.passed, r.trials, r.worst),
        })
    });

    ok &= run(3, "AND protocol is exact", || {
        let mut worst: f64 = 0.0;
        let mut per_input = Vec::new();
        for r in 1..=8 {
            let rep = error_probability(&build_and_protocol(r)?, and, &u0())?;
            worst = worst.max(rep.distributional);
            let cells: Vec<String> = rep
                .per_input
                .iter()
                .flatten()
                .map(|e| format!("{e:.1e}"))
                .collect();
            per_input.push(format!("r={r}:[{}]", cells.join(",")));
        }
        Ok(Outcome {
            pass: worst <= 1e-12,
            detail: format!("max distributional error {worst:.3e}; per-input errors {}", per_input.join(" ")),
        })
    });

    ok &= run(4, "CIC sandwich on AND", || {
        let mut pass = true;
        let mut max_ratio: f64 = 0.0;
        let mut min_slack = f64::INFINITY;
        for r in 1..=8 {
            let p = build_and_protocol(r)?;
            let k = p.num_rounds() as f64;
            let c = cic(&p, &u0())?.cic;
            let lower = k.log2() / (12.0 * k);
            let ratio = k * c / k.log2();
            pass &= c >= lower - TOL && ratio <= FROZEN_RATIO;
            max_ratio = max_ratio.max(ratio);
            min_slack = min_slack.min(c - lower);
        }
        Ok(Outcome {
            pass,
            detail: format!(
                "min cic − log₂k/(12k) = {min_slack:.4}, max k·cic/log₂k = {max_ratio:.4} ≤ {FROZEN_RATIO}"
            ),
        })
    });

    let corpus = audit_corpus(SEED, 100);
    ok &= run(5, "lower-bound audit chain", || {
        let mut protocols: Vec<_> = (1..=8).map(build_and_protocol).collect::<Result<_, _>>()?;
        protocols.extend(corpus.iter().cloned());
        let mut failures = 0;
        let mut applicable = 0;
        let mut checks = 0;
        for p in &protocols {
            let aud = audit(p)?;
            for c in all_checks(&aud, TOL) {
                checks += 1;
                match c.verdict {
                    Verdict::Fails => failures += 1,
                    Verdict::Holds => applicable += 1,
                    Verdict::NotApplicable => {}
                }
            }
        }
        Ok(Outcome {
            pass: failures == 0,
            detail: format!(
                "{} protocols, {checks} checks: {applicable} hold, {} not applicable, {failures} fail",
                protocols.len(),
                checks - applicable - failures
            ),
        })
    });

    ok &= run(6, "CIC equals two thirds of CIC⁰ on memoryless protocols", || {
        let mut worst: f64 = 0.0;
        let mut n = 0;
        for p in corpus.iter().cloned().chain((1..=8).map(|r| build_and_protocol(r).expect("valid r"))) {
            let c = cic(&p, &u0())?.cic;
            worst = worst.max((c - 2.0 / 3.0 * cic0(&p)?).abs());
            n += 1;
        }
        Ok(Outcome {
            pass: worst <= TOL,
            detail: format!("{n} protocols, max |cic − ⅔·cic⁰| = {worst:.3e}"),
        })
    });

    ok &= run(7, "privacy compiler on the send-input AND protocol", || {
        let compiled = compile_private(&send_input_protocol(and))?;
        let r0 = verify_private(&compiled, &u0(), DEFAULT_WIDTH_CAP)?;
        let ru = verify_private(&compiled, &InputDistribution::uniform([2, 2]), DEFAULT_WIDTH_CAP)?;
        let max_round = r0.round_terms.iter().chain(&ru.round_terms).fold(0.0f64, |a, &b| a.max(b));
        let pass = r0.passes(TOL) && ru.passes(TOL) && r0.total_cic.abs() <= TOL;
        Ok(Outcome {
            pass,
            detail: format!(
                "max round term {max_round:.2e}, output deviation {:.1e}; total CIC under U0 {:.3e} (I(out:X|Y) = {:.3e}), uniform {:.6} (I = {:.6})",
                r0.output_deviation.max(ru.output_deviation),
                r0.total_cic,
                r0.output_information,
                ru.total_cic,
                ru.output_information
            ),
        })
    });

    ok &= run(8, "one-shot coin removal", || {
        let coined = coined_corpus(SEED, 50);
        let mut failing = 0;
        let mut worst_tv: f64 = 0.0;
        for p in &coined {
            let c = compile_oneshot(p, DEFAULT_CAP)?;
            let r = verify_oneshot(p, &c, TOL, DEFAULT_CAP)?;
            worst_tv = worst_tv.max(r.output_distance);
            if !r.passes() {
                failing += 1;
            }
        }
        Ok(Outcome {
            pass: failing == 0,
            detail: format!("{} protocols, {failing} failing certificates, max TV {worst_tv:.2e}", coined.len()),
        })
    });

    ok &= run(9, "entropy lemma and concavity", || {
        let r = lemmas::entropy_lemma(SEED, 1000, TOL)?;
        let c = check_concavity(400, TOL);
        Ok(Outcome {
            pass: r.all_passed() && r.trials == 1000 && c.holds(),
            detail: format!(
                "{}/{} arrays (max excess {:.3e}); concavity worst midpoint gap {:.3e}",
                r.passed, r.trials, r.worst, c.lhs
            ),
        })
    });

    ok &= run(10, "one-time pad twirl", || {
        let r = lemmas::qotp_twirl(SEED, 80, 1e-12)?;
        Ok(Outcome {
            pass: r.all_passed() && r.trials == 80,
            detail: format!("{}/{} states over widths 1–4, max deviation {:.3e}", r.passed, r.trials, r.worst),
        })
    });

    if !ok {
        std::process::exit(1);
    }
}
