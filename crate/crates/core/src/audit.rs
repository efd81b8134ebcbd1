//! Step-by-step numerical certification of the `Ω(log k / k)` lower bound
//! on the information cost of memoryless AND protocols.
//!
//! For a protocol with transcript states `|ψ^i_{xy}⟩` the audit records
//!
//! * `a_i = I(M_i : X | Y=0)` (odd `i`) or `I(M_i : Y | X=0)` (even `i`),
//! * `b_i = Δ(ψ^i_{10}, ψ^i_{00})` (odd) or `Δ(ψ^i_{01}, ψ^i_{00})` (even),
//! * `δ_i = Δ(ψ^i_{01}, ψ^i_{11})` (odd) or `Δ(ψ^i_{10}, ψ^i_{11})` (even),
//!
//! and checks the chain `1 − 2ε ≤ δ_k ≤ 2Σb_i ≤ 4k·√(h₂⁻¹(Σa_i / k))`
//! together with the two resulting lower bounds on `CIC⁰` and `CIC`.

use std::fmt::Write as _;

use crate::cost::{cic0_terms, cic_terms};
use crate::entropy::{h2, h2_inv};
use crate::error::{Error, Result};
use crate::measures::pure_trace_distance;
use crate::protocol::{and, simulate, u0, Party, ProtocolSpec, Transcript};

/// Per-round hypothesis of the third claim.
pub const CLAIM3_THRESHOLD: f64 = 0.4;

#[derive(Debug, Clone, PartialEq)]
pub struct LowerBoundAudit {
    pub k: usize,
    /// Worst-case error over the two inputs whose final states `δ_k`
    /// compares; this is the `ε` used by every check.
    pub epsilon: f64,
    /// Worst-case error over `(1,0)` and `(1,1)`.
    pub epsilon_10_11: f64,
    /// Worst-case error over all four inputs.
    pub epsilon_worst: f64,
    /// Error under `𝒰₀`.
    pub epsilon_distributional: f64,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub delta: Vec<f64>,
    pub cic0: f64,
    /// CIC under `𝒰₀`.
    pub cic: f64,
    /// `Σ_m |p_m − q_m|` between the output distributions of the `δ_k` pair.
    pub output_gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails,
    NotApplicable,
}

impl Verdict {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Holds
        } else {
            Verdict::Fails
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Verdict::Holds => "PASS",
            Verdict::Fails => "FAIL",
            Verdict::NotApplicable => "N/A",
        }
    }
}

/// One certified inequality `lhs ≤ rhs` (or `≥`, as named).
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub verdict: Verdict,
}

impl Check {
    pub fn holds(&self) -> bool {
        self.verdict != Verdict::Fails
    }
}

fn pair_states(t: &Transcript, round: usize) -> [[&[crate::linalg::C64]; 2]; 2] {
    [
        [t.state(0, 0, 0, round), t.state(0, 1, 0, round)],
        [t.state(1, 0, 0, round), t.state(1, 1, 0, round)],
    ]
}

/// Audits a memoryless, coin-free, binary-input protocol with an odd number
/// of rounds.
pub fn audit(p: &ProtocolSpec) -> Result<LowerBoundAudit> {
    if !p.memoryless {
        return Err(Error::RequiresMemoryless);
    }
    if !p.is_binary() {
        return Err(Error::RequiresBinaryInputs);
    }
    if !p.coins.coins.is_empty() {
        return Err(Error::InvalidProtocol("the audit needs a coin-free protocol".into()));
    }
    let k = p.num_rounds();
    if k % 2 == 0 {
        return Err(Error::RequiresAliceLast);
    }
    let t = simulate(p)?;
    let mu = u0();

    let a = cic0_terms(p, &t)?;
    let cic = cic_terms(p, &t, &mu)?.iter().map(|t| t.bits).sum();
    let mut b = Vec::with_capacity(k);
    let mut delta = Vec::with_capacity(k);
    for i in 1..=k {
        let s = pair_states(&t, i);
        match Party::sender_of_round(i) {
            Party::Alice => {
                b.push(pure_trace_distance(s[1][0], s[0][0]));
                delta.push(pure_trace_distance(s[0][1], s[1][1]));
            }
            Party::Bob => {
                b.push(pure_trace_distance(s[0][1], s[0][0]));
                delta.push(pure_trace_distance(s[1][0], s[1][1]));
            }
        }
    }

    let errors = t.error_probability(and, &mu);
    let e = &errors.per_input;
    // k is odd, so δ_k compares (0,1) with (1,1).
    let epsilon = e[0][1].max(e[1][1]);
    let out01 = t.output_distribution(0, 1);
    let out11 = t.output_distribution(1, 1);
    let output_gap = out01.iter().zip(&out11).map(|(p, q)| (p - q).abs()).sum();

    Ok(LowerBoundAudit {
        k,
        epsilon,
        epsilon_10_11: e[1][0].max(e[1][1]),
        epsilon_worst: errors.worst_case,
        epsilon_distributional: errors.distributional,
        cic0: a.iter().sum(),
        a,
        b,
        delta,
        cic,
        output_gap,
    })
}

/// `δ_k ≥ 1 − 2ε`.
pub fn check_claim1(aud: &LowerBoundAudit, tol: f64) -> Check {
    let lhs = *aud.delta.last().unwrap_or(&0.0);
    let rhs = 1.0 - 2.0 * aud.epsilon;
    Check {
        name: "claim1",
        lhs,
        rhs,
        verdict: Verdict::from_bool(lhs >= rhs - tol),
    }
}

/// Measurement bound behind the first claim: `2δ_k ≥ Σ_m |p_m − q_m|`.
pub fn check_povm(aud: &LowerBoundAudit, tol: f64) -> Check {
    let lhs = 2.0 * aud.delta.last().unwrap_or(&0.0);
    Check {
        name: "povm",
        lhs,
        rhs: aud.output_gap,
        verdict: Verdict::from_bool(lhs >= aud.output_gap - tol),
    }
}

/// `δ_k ≤ 2Σb_i`, together with every step `δ_i ≤ b_{i−1} + b_i + δ_{i−1}`
/// (with `b_0 = δ_0 = 0`).
pub fn check_claim2(aud: &LowerBoundAudit, tol: f64) -> Check {
    let lhs = *aud.delta.last().unwrap_or(&0.0);
    let rhs = 2.0 * aud.b.iter().sum::<f64>();
    let mut ok = lhs <= rhs + tol;
    for i in 0..aud.delta.len() {
        let (b_prev, d_prev) = if i == 0 { (0.0, 0.0) } else { (aud.b[i - 1], aud.delta[i - 1]) };
        ok &= aud.delta[i] <= b_prev + aud.b[i] + d_prev + tol;
    }
    Check {
        name: "claim2",
        lhs,
        rhs,
        verdict: Verdict::from_bool(ok),
    }
}

fn f_sqrt_inv(x: f64) -> f64 {
    2.0 * h2_inv(x).sqrt()
}

/// `Σb_i ≤ 2k√(h₂⁻¹(Σa_i/k))` and `b_i ≤ 2√(h₂⁻¹(a_i))`, provided every
/// `a_i ≤ 0.4`.
pub fn check_claim3(aud: &LowerBoundAudit, tol: f64) -> Check {
    let k = aud.a.len().max(1) as f64;
    let lhs = aud.b.iter().sum::<f64>();
    let total_a: f64 = aud.a.iter().sum();
    let rhs = k * f_sqrt_inv(total_a / k);
    if aud.a.iter().any(|&a| a > CLAIM3_THRESHOLD) {
        return Check {
            name: "claim3",
            lhs,
            rhs,
            verdict: Verdict::NotApplicable,
        };
    }
    let per_round = aud.a.iter().zip(&aud.b).all(|(&a, &b)| b <= f_sqrt_inv(a) + tol);
    Check {
        name: "claim3",
        lhs,
        rhs,
        verdict: Verdict::from_bool(per_round && lhs <= rhs + tol),
    }
}

/// The three claims combined: `½(1 − 2ε) ≤ 2k√(h₂⁻¹(CIC⁰/k))` (only when
/// the third claim's hypothesis holds), and its consequence
/// `CIC⁰/k ≥ h₂((1−2ε)² / (16k²))`.
pub fn check_chain(aud: &LowerBoundAudit, tol: f64) -> Vec<Check> {
    let k = aud.k as f64;
    let margin = (1.0 - 2.0 * aud.epsilon).max(0.0);
    let applicable = aud.a.iter().all(|&a| a <= CLAIM3_THRESHOLD);
    let verdict = |ok: bool| {
        if applicable {
            Verdict::from_bool(ok)
        } else {
            Verdict::NotApplicable
        }
    };
    let lhs = 0.5 * margin;
    let rhs = 2.0 * k * h2_inv(aud.cic0 / k).sqrt();
    let x = margin * margin / (16.0 * k * k);
    let per_round = aud.cic0 / k;
    vec![
        Check {
            name: "chain",
            lhs,
            rhs,
            verdict: verdict(lhs <= rhs + tol),
        },
        Check {
            name: "chain_entropy",
            lhs: per_round,
            rhs: h2(x),
            verdict: verdict(per_round >= h2(x) - tol),
        },
    ]
}

/// `CIC⁰ ≥ (1−2ε)² log₂k / (8k)` and `CIC ≥ (1−2ε)² log₂k / (12k)`.
/// For `ε ≥ ½` both bounds are taken as 0.
pub fn check_proposition(aud: &LowerBoundAudit, tol: f64) -> Vec<Check> {
    let k = aud.k as f64;
    let margin = (1.0 - 2.0 * aud.epsilon).max(0.0);
    let core = margin * margin * k.log2() / k;
    let b0 = core / 8.0;
    let b1 = core / 12.0;
    vec![
        Check {
            name: "proposition_cic0",
            lhs: aud.cic0,
            rhs: b0,
            verdict: Verdict::from_bool(aud.cic0 >= b0 - tol),
        },
        Check {
            name: "proposition_cic",
            lhs: aud.cic,
            rhs: b1,
            verdict: Verdict::from_bool(aud.cic >= b1 - tol),
        },
    ]
}

/// Midpoint concavity of `x ↦ 2√(h₂⁻¹(x))` on a `grid × grid` lattice of
/// `[0, 0.4]²`. `lhs` is the worst violation `(f(x)+f(y))/2 − f((x+y)/2)`.
pub fn check_concavity(grid: usize, tol: f64) -> Check {
    let n = grid.max(2);
    let pts: Vec<f64> = (0..n).map(|i| CLAIM3_THRESHOLD * i as f64 / (n - 1) as f64).collect();
    let vals: Vec<f64> = pts.iter().map(|&x| f_sqrt_inv(x)).collect();
    let mut worst = f64::NEG_INFINITY;
    for i in 0..n {
        for j in i..n {
            let mid = f_sqrt_inv(0.5 * (pts[i] + pts[j]));
            worst = worst.max(0.5 * (vals[i] + vals[j]) - mid);
        }
    }
    Check {
        name: "concavity",
        lhs: worst,
        rhs: 0.0,
        verdict: Verdict::from_bool(worst <= tol),
    }
}

/// `Σ h₂(x_i) ≤ 3S·|log₂(2n/S)|` with `S = Σx_i` (and `0 ≤ 0` when `S = 0`).
pub fn check_entropy_lemma(xs: &[f64], tol: f64) -> Result<Check> {
    let mut lhs = 0.0;
    for &x in xs {
        lhs += crate::entropy::binary_entropy(x)?;
    }
    let s: f64 = xs.iter().sum();
    let n = xs.len() as f64;
    let rhs = if s > 0.0 { 3.0 * s * (2.0 * n / s).log2().abs() } else { 0.0 };
    Ok(Check {
        name: "entropy_lemma",
        lhs,
        rhs,
        verdict: Verdict::from_bool(lhs <= rhs + tol),
    })
}

/// Every audit check in report order.
pub fn all_checks(aud: &LowerBoundAudit, tol: f64) -> Vec<Check> {
    let mut checks = vec![
        check_claim1(aud, tol),
        check_povm(aud, tol),
        check_claim2(aud, tol),
        check_claim3(aud, tol),
    ];
    checks.extend(check_chain(aud, tol));
    checks.extend(check_proposition(aud, tol));
    checks
}

/// `i,a_i,b_i,delta_i` rows, then `name,lhs,rhs,verdict` summary rows and
/// the measured `ε` variants and costs.
pub fn report_csv(aud: &LowerBoundAudit, tol: f64) -> String {
    let mut s = String::from("i,a_i,b_i,delta_i\n");
    for i in 0..aud.k {
        let _ = writeln!(s, "{},{:.16e},{:.16e},{:.16e}", i + 1, aud.a[i], aud.b[i], aud.delta[i]);
    }
    for c in all_checks(aud, tol) {
        let _ = writeln!(s, "{},{:.16e},{:.16e},{}", c.name, c.lhs, c.rhs, c.verdict.label());
    }
    for (name, v) in [
        ("epsilon", aud.epsilon),
        ("epsilon_10_11", aud.epsilon_10_11),
        ("epsilon_worst", aud.epsilon_worst),
        ("epsilon_u0", aud.epsilon_distributional),
        ("cic0", aud.cic0),
        ("cic", aud.cic),
    ] {
        let _ = writeln!(s, "{name},{v:.16e},,");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::and_protocol::build_and_protocol;

    fn synthetic(a: Vec<f64>, b: Vec<f64>, delta: Vec<f64>) -> LowerBoundAudit {
        LowerBoundAudit {
            k: a.len(),
            epsilon: 0.0,
            epsilon_10_11: 0.0,
            epsilon_worst: 0.0,
            epsilon_distributional: 0.0,
            cic0: a.iter().sum(),
            cic: 2.0 / 3.0 * a.iter().sum::<f64>(),
            a,
            b,
            delta,
            output_gap: 0.0,
        }
    }

    #[test]
    fn and_r1_final_delta_is_one() {
        let aud = audit(&build_and_protocol(1).unwrap()).unwrap();
        assert!((aud.delta[2] - 1.0).abs() < 1e-12);
        assert!(aud.epsilon < 1e-12);
        assert!(all_checks(&aud, 1e-9).iter().all(Check::holds));
    }

    #[test]
    fn claim3_hypothesis_failure_is_not_applicable() {
        let aud = synthetic(vec![0.5, 0.1, 0.1], vec![0.0; 3], vec![0.0; 3]);
        assert_eq!(check_claim3(&aud, 1e-9).verdict, Verdict::NotApplicable);
    }

    #[test]
    fn all_zero_audit() {
        let aud = synthetic(vec![0.0; 3], vec![0.0; 3], vec![0.0; 3]);
        let c2 = check_claim2(&aud, 1e-9);
        assert_eq!((c2.lhs, c2.rhs, c2.verdict), (0.0, 0.0, Verdict::Holds));
        let c3 = check_claim3(&aud, 1e-9);
        assert_eq!((c3.lhs, c3.rhs, c3.verdict), (0.0, 0.0, Verdict::Holds));
    }

    #[test]
    fn vacuous_proposition_at_half_error() {
        let mut aud = synthetic(vec![0.0; 3], vec![0.0; 3], vec![0.0; 3]);
        aud.epsilon = 0.5;
        for c in check_proposition(&aud, 1e-9) {
            assert_eq!(c.rhs, 0.0);
            assert!(c.holds());
        }
    }

    #[test]
    fn entropy_lemma_examples() {
        let c = check_entropy_lemma(&[0.5; 4], 1e-9).unwrap();
        assert_eq!((c.lhs, c.rhs), (4.0, 12.0));
        let z = check_entropy_lemma(&[0.0; 5], 1e-9).unwrap();
        assert_eq!((z.lhs, z.rhs, z.verdict), (0.0, 0.0, Verdict::Holds));
        assert!(check_entropy_lemma(&[1.5], 1e-9).is_err());
    }

    #[test]
    fn concavity_grid() {
        let c = check_concavity(400, 1e-9);
        assert!(c.holds(), "worst violation {}", c.lhs);
        // endpoints: f(0) = 0 and the diagonal gives equality
        assert_eq!(f_sqrt_inv(0.0), 0.0);
        let (x, y) = (0.1, 0.3);
        assert!(f_sqrt_inv(0.2) >= 0.5 * (f_sqrt_inv(x) + f_sqrt_inv(y)));
    }

    #[test]
    fn audit_preconditions() {
        let mut p = build_and_protocol(1).unwrap();
        p.memoryless = false;
        assert_eq!(audit(&p), Err(Error::RequiresMemoryless));
        let mut p = build_and_protocol(1).unwrap();
        p.rounds.pop();
        p.output.register = "C".into();
        // two rounds: output ends with Alice; validation rejects it
        assert!(audit(&p).is_err());
    }
}
