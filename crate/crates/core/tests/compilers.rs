use mlqc::compilers::private::{output_information, DEFAULT_WIDTH_CAP};
use mlqc::compilers::{compile_oneshot, compile_private, send_input_protocol, verify_oneshot, verify_private};
use mlqc::corpus::{random_coined, random_memoryless};
use mlqc::entropy::h2;
use mlqc::protocol::{and, simulate, u0, InputDistribution, DEFAULT_CAP};
use mlqc::Error;

#[test]
fn private_or_reveals_exactly_the_output() {
    let base = send_input_protocol(|x, y| x | y);
    let c = compile_private(&base).unwrap();
    let mu = InputDistribution::uniform([2, 2]);
    let r = verify_private(&c, &mu, DEFAULT_WIDTH_CAP).unwrap();
    // y = 0 reveals x (one bit), y = 1 reveals nothing
    assert!((r.output_information - 0.5).abs() < 1e-12);
    assert!((r.total_cic - 0.5).abs() < 1e-9);
    assert!(r.passes(1e-9), "{r:?}");
}

#[test]
fn private_and_under_u0_costs_nothing() {
    let c = compile_private(&send_input_protocol(and)).unwrap();
    let r = verify_private(&c, &u0(), DEFAULT_WIDTH_CAP).unwrap();
    assert!(r.total_cic.abs() < 1e-9);
    assert!(r.output_information.abs() < 1e-12);
    assert!(r.output_deviation <= 1e-12);
}

#[test]
fn output_information_of_a_random_protocol() {
    // oracle: I(out:X|Y) from the base distributions with uniform X
    let p = random_memoryless(3, 0, 3);
    let t = simulate(&p).unwrap();
    let mu = InputDistribution::uniform([2, 2]);
    let mut expected = 0.0;
    for y in 0..2 {
        let (p0, p1) = (t.output_distribution(0, y)[1], t.output_distribution(1, y)[1]);
        expected += 0.5 * (h2((p0 + p1) / 2.0) - 0.5 * h2(p0) - 0.5 * h2(p1));
    }
    assert!((output_information(&p, &mu).unwrap() - expected).abs() < 1e-12);
}

#[test]
fn oneshot_certificates_on_a_coined_protocol() {
    let p = random_coined(11, 0, 3);
    let c = compile_oneshot(&p, DEFAULT_CAP).unwrap();
    assert_eq!(c.compiled.registers.len(), 4);
    let r = verify_oneshot(&p, &c, 1e-9, DEFAULT_CAP).unwrap();
    for cert in &r.certificates {
        assert!(cert.pass, "{cert:?}");
    }
    assert!(r.output_distance <= 1e-9);
    // compensation never lowers the overlap below the uncompensated one
    for step in &c.plan.steps {
        assert!((step.overlap - step.complement_fidelity).abs() < 1e-8, "{step:?}");
    }
}

#[test]
fn oneshot_reports_the_compiled_dimension() {
    let p = random_coined(11, 1, 5);
    // one message qubit plus five coin qubits
    assert_eq!(compile_oneshot(&p, 32).unwrap_err(), Error::StateBlowup { dim: 64, cap: 32 });
}
