//! Randomized property suites for the information-theoretic lemmas the
//! lower bound and the compilers rest on. Each suite draws its own seeded
//! stream, so reports are reproducible byte for byte.

use std::fmt::Write as _;

use rand::Rng;

use crate::audit::{check_concavity, check_entropy_lemma};
use crate::compilers::qotp_average;
use crate::entropy::{h2, von_neumann_entropy};
use crate::error::Result;
use crate::linalg::ComplexMatrix;
use crate::measures::{fidelity, mutual_information, pure_trace_distance, trace_distance, uhlmann_unitary};
use crate::random;
use crate::state::{DensityOperator, PureState, RegisterLayout};

/// Outcome of one suite. `worst` is the largest value of the quantity that
/// must stay below the tolerance (a violation amount or an absolute error).
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub trials: usize,
    pub passed: usize,
    pub worst: f64,
}

impl SuiteReport {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            trials: 0,
            passed: 0,
            worst: f64::NEG_INFINITY,
        }
    }

    fn record(&mut self, excess: f64, tol: f64) {
        self.trials += 1;
        if excess <= tol {
            self.passed += 1;
        }
        // `+ 0.0` turns a negative zero into a positive one for the report
        self.worst = self.worst.max(excess) + 0.0;
    }

    pub fn all_passed(&self) -> bool {
        self.passed == self.trials
    }
}

/// `suite,trials,passed,worst` rows.
pub fn to_csv(reports: &[SuiteReport]) -> String {
    let mut s = String::from("suite,trials,passed,worst\n");
    for r in reports {
        let _ = writeln!(s, "{},{},{},{:.16e}", r.name, r.trials, r.passed, r.worst);
    }
    s
}

fn layout(regs: &[(&str, usize)]) -> RegisterLayout {
    RegisterLayout::new(regs.iter().copied()).expect("distinct names")
}

/// `½|0⟩⟨0| ⊗ ρ₀ + ½|1⟩⟨1| ⊗ ρ₁` on `X ⊗ Q`.
fn cq_state(rho0: &DensityOperator, rho1: &DensityOperator) -> Result<DensityOperator> {
    let d = rho0.layout().dim();
    let l = layout(&[("X", 2)]).join(rho0.layout())?;
    let mut m = ComplexMatrix::zeros(2 * d, 2 * d);
    for (x, rho) in [rho0, rho1].into_iter().enumerate() {
        for i in 0..d {
            for j in 0..d {
                m[(x * d + i, x * d + j)] = rho.matrix()[(i, j)] * 0.5;
            }
        }
    }
    DensityOperator::new(l, m)
}

fn random_pure_pair(rng: &mut impl Rng) -> (PureState, PureState) {
    let d = rng.gen_range(2..=8);
    let l = layout(&[("Q", d)]);
    (random::pure_state(rng, &l), random::pure_state(rng, &l))
}

/// `I(X:M) = h₂((1 − |⟨ψ₀|ψ₁⟩|)/2)` for a uniform bit encoded in pure states.
pub fn pure_pinsker(seed: u64, trials: usize, tol: f64) -> Result<SuiteReport> {
    let mut rng = random::rng(seed, 101);
    let mut rep = SuiteReport::new("pure_pinsker");
    for _ in 0..trials {
        let (a, b) = random_pure_pair(&mut rng);
        let i = mutual_information(&cq_state(&a.density(), &b.density())?, &["X"], &["Q"])?;
        let expected = h2((1.0 - a.inner(&b).norm().min(1.0)) / 2.0);
        rep.record((i - expected).abs(), tol);
    }
    Ok(rep)
}

/// `I(X:M) ≥ h₂(Δ²/4)` for pure encodings.
pub fn improved_pinsker(seed: u64, trials: usize, tol: f64) -> Result<SuiteReport> {
    let mut rng = random::rng(seed, 102);
    let mut rep = SuiteReport::new("improved_pinsker");
    for _ in 0..trials {
        let (a, b) = random_pure_pair(&mut rng);
        let i = mutual_information(&cq_state(&a.density(), &b.density())?, &["X"], &["Q"])?;
        let delta = pure_trace_distance(a.amplitudes(), b.amplitudes());
        rep.record(h2(delta * delta / 4.0) - i, tol);
    }
    Ok(rep)
}

/// `I(X:Q) ≥ 1 − F(σ₀,σ₁)` for mixed encodings of a uniform bit.
pub fn pinsker_fidelity(seed: u64, trials: usize, tol: f64) -> Result<SuiteReport> {
    let mut rng = random::rng(seed, 103);
    let mut rep = SuiteReport::new("pinsker_fidelity");
    for _ in 0..trials {
        let d = rng.gen_range(2..=4);
        let env = rng.gen_range(1..=4);
        let l = layout(&[("Q", d)]);
        let (s0, s1) = (random::density(&mut rng, &l, env), random::density(&mut rng, &l, env));
        let i = mutual_information(&cq_state(&s0, &s1)?, &["X"], &["Q"])?;
        rep.record(1.0 - fidelity(&s0, &s1)? - i, tol);
    }
    Ok(rep)
}

/// `S(A) = S(B)` for pure bipartite states.
pub fn schmidt_symmetry(seed: u64, trials: usize, tol: f64) -> Result<SuiteReport> {
    let mut rng = random::rng(seed, 104);
    let mut rep = SuiteReport::new("schmidt_symmetry");
    for _ in 0..trials {
        let l = layout(&[("A", rng.gen_range(2..=4)), ("B", rng.gen_range(2..=6))]);
        let rho = random::pure_state(&mut rng, &l).density();
        let sa = von_neumann_entropy(&rho.partial_trace(&["A"])?)?;
        let sb = von_neumann_entropy(&rho.partial_trace(&["B"])?)?;
        rep.record((sa - sb).abs(), tol);
    }
    Ok(rep)
}

/// Appending an uncorrelated pure register leaves `I(A:B)` unchanged.
pub fn ancilla_neutrality(seed: u64, trials: usize, tol: f64) -> Result<SuiteReport> {
    let mut rng = random::rng(seed, 105);
    let mut rep = SuiteReport::new("ancilla_neutrality");
    for _ in 0..trials {
        let l = layout(&[("A", 2), ("B", rng.gen_range(2..=3))]);
        let env = rng.gen_range(1..=4);
        let rho = random::density(&mut rng, &l, env);
        let c = random::pure_state(&mut rng, &layout(&[("C", 2)])).density();
        let before = mutual_information(&rho, &["A"], &["B"])?;
        let after = mutual_information(&rho.tensor(&c)?, &["A"], &["B", "C"])?;
        rep.record((before - after).abs(), tol);
    }
    Ok(rep)
}

/// Trace distance and fidelity are invariant under a common unitary.
pub fn unitary_invariance(seed: u64, trials: usize, tol: f64) -> Result<SuiteReport> {
    let mut rng = random::rng(seed, 106);
    let mut rep = SuiteReport::new("unitary_invariance");
    for _ in 0..trials {
        let d = rng.gen_range(2..=4);
        let l = layout(&[("Q", d)]);
        let (r, s) = (random::density(&mut rng, &l, 2), random::density(&mut rng, &l, 3));
        let u = random::unitary(&mut rng, d);
        let (ur, us) = (r.conjugate(&u)?, s.conjugate(&u)?);
        let dt = (trace_distance(&r, &s)? - trace_distance(&ur, &us)?).abs();
        let df = (fidelity(&r, &s)? - fidelity(&ur, &us)?).abs();
        rep.record(dt.max(df), tol);
    }
    Ok(rep)
}

/// The closed form for pure states matches `½ Tr|ρ − σ|`.
pub fn pure_trace_distance_identity(seed: u64, trials: usize, tol: f64) -> Result<SuiteReport> {
    let mut rng = random::rng(seed, 107);
    let mut rep = SuiteReport::new("pure_trace_distance");
    for _ in 0..trials {
        let (a, b) = random_pure_pair(&mut rng);
        let general = trace_distance(&a.density(), &b.density())?;
        rep.record((general - pure_trace_distance(a.amplitudes(), b.amplitudes())).abs(), tol);
    }
    Ok(rep)
}

/// `Δ(ρ,σ) ≥ ½ Σ_m |p_m − q_m|` for random two-outcome measurements.
pub fn povm_bound(seed: u64, trials: usize, tol: f64) -> Result<SuiteReport> {
    let mut rng = random::rng(seed, 108);
    let mut rep = SuiteReport::new("povm_bound");
    for _ in 0..trials {
        let d = rng.gen_range(2..=4);
        let l = layout(&[("Q", d)]);
        let (r, s) = (random::density(&mut rng, &l, 2), random::density(&mut rng, &l, 2));
        let u = random::unitary(&mut rng, d);
        let lambdas: Vec<f64> = (0..d).map(|_| rng.gen::<f64>()).collect();
        let e0 = &(&u * &ComplexMatrix::diag_real(&lambdas)) * &u.adjoint();
        let e1 = &ComplexMatrix::identity(d) - &e0;
        let prob = |rho: &DensityOperator, e: &ComplexMatrix| (e * rho.matrix()).trace().re;
        let gap = (prob(&r, &e0) - prob(&s, &e0)).abs() + (prob(&r, &e1) - prob(&s, &e1)).abs();
        rep.record(0.5 * gap - trace_distance(&r, &s)?, tol);
    }
    Ok(rep)
}

/// The Uhlmann unitary on the purifying register attains the fidelity of
/// the reduced states (alternating 2⊗2 and 2⊗4 purifications).
pub fn uhlmann(seed: u64, trials: usize, tol: f64) -> Result<SuiteReport> {
    let mut rng = random::rng(seed, 109);
    let mut rep = SuiteReport::new("uhlmann");
    for t in 0..trials {
        let l = layout(&[("A", 2), ("B", if t % 2 == 0 { 2 } else { 4 })]);
        let (p0, p1) = (random::pure_state(&mut rng, &l), random::pure_state(&mut rng, &l));
        let v = uhlmann_unitary(&p0, &p1, &["B"])?;
        let overlap = p0.inner(&p1.apply(&v, &["B"])?).norm();
        let f = fidelity(&p0.density().partial_trace(&["A"])?, &p1.density().partial_trace(&["A"])?)?;
        rep.record((overlap - f).abs(), tol);
    }
    Ok(rep)
}

/// `Σ h₂(x_i) ≤ 3S|log₂(2n/S)|` on random arrays of length up to 64 mixing
/// dense, sparse and tiny entries.
pub fn entropy_lemma(seed: u64, trials: usize, tol: f64) -> Result<SuiteReport> {
    let mut rng = random::rng(seed, 110);
    let mut rep = SuiteReport::new("entropy_lemma");
    for _ in 0..trials {
        let n = rng.gen_range(1..=64);
        let power = [1.0, 2.0, 6.0][rng.gen_range(0..3)];
        let density: f64 = rng.gen();
        let xs: Vec<f64> = (0..n)
            .map(|_| if rng.gen::<f64>() < density { rng.gen::<f64>().powf(power) } else { 0.0 })
            .collect();
        let c = check_entropy_lemma(&xs, tol)?;
        rep.record(c.lhs - c.rhs, tol);
    }
    Ok(rep)
}

/// `h₂(x) ≥ x log₂(1/x)` on a grid of `(0, 1]` (`trials` points).
pub fn h2_lower_bound(trials: usize, tol: f64) -> SuiteReport {
    let mut rep = SuiteReport::new("h2_lower_bound");
    for j in 1..=trials {
        let x = j as f64 / trials as f64;
        rep.record(-x * x.log2() - h2(x), tol);
    }
    rep
}

/// Midpoint concavity of `2√(h₂⁻¹(·))` on a 400-point grid of `[0, 0.4]`.
pub fn concavity(tol: f64) -> SuiteReport {
    let mut rep = SuiteReport::new("concavity");
    let c = check_concavity(400, tol);
    rep.record(c.lhs - c.rhs, tol);
    rep
}

/// Averaging a random state over every pad key of its whole register
/// block gives the maximally mixed state (widths cycle through 1–4).
pub fn qotp_twirl(seed: u64, trials: usize, tol: f64) -> Result<SuiteReport> {
    let mut rng = random::rng(seed, 111);
    let mut rep = SuiteReport::new("qotp_twirl");
    for t in 0..trials {
        let width = 1 + t % 4;
        let names: Vec<String> = (0..width).map(|q| format!("q{q}")).collect();
        let l = RegisterLayout::new(names.iter().map(|n| (n.clone(), 2)))?;
        let env = rng.gen_range(1..=4);
        let rho = random::density(&mut rng, &l, env);
        let block: Vec<&str> = names.iter().map(String::as_str).collect();
        let avg = qotp_average(&rho, &block)?;
        let mixed = DensityOperator::maximally_mixed(l);
        rep.record(avg.matrix().max_abs_diff(mixed.matrix()), tol);
    }
    Ok(rep)
}

/// Every suite, in report order. `trials` applies to the randomized suites;
/// the Uhlmann suite uses at least `1e-8` and the twirl at most `1e-12`.
pub fn run_all(seed: u64, trials: usize, tol: f64) -> Result<Vec<SuiteReport>> {
    Ok(vec![
        schmidt_symmetry(seed, trials, tol)?,
        ancilla_neutrality(seed, trials, tol)?,
        unitary_invariance(seed, trials, tol)?,
        pure_trace_distance_identity(seed, trials, tol)?,
        povm_bound(seed, trials, tol)?,
        pinsker_fidelity(seed, trials, tol)?,
        pure_pinsker(seed, trials, tol)?,
        improved_pinsker(seed, trials, tol)?,
        h2_lower_bound(10_000, tol),
        uhlmann(seed, trials, tol.max(1e-8))?,
        entropy_lemma(seed, trials, tol)?,
        concavity(tol),
        qotp_twirl(seed, trials, tol.min(1e-12))?,
    ])
}
