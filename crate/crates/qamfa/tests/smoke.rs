//! Cross-module smoke checks of the protocol machines through the exact
//! engine before the full acceptance battery.

use qamfa::engine::{build_config_graph, overall_acceptance, solve_absorption, BuildOptions};
use qamfa::prover::{enumerate_adversaries, honest_prover, ProverStrategy};
use qamfa::protocols::{build_verifier, build_verifier_with_k, bounds, ProtocolId};

fn exact(
    spec: &qamfa::machine::VerifierSpec,
    input: &str,
    prover: &ProverStrategy,
) -> qamfa::engine::IterationOutcome {
    let g = build_config_graph(spec, input, prover, &BuildOptions::default()).unwrap();
    solve_absorption(&g).unwrap().outcome()
}

#[test]
fn middle_member_honest() {
    let (spec, params) = build_verifier(ProtocolId::Middle, 0.25).unwrap();
    assert_eq!(params.k, 3);
    let prover = honest_prover(ProtocolId::Middle, "aaa").unwrap();
    let o = exact(&spec, "aaa", &prover);
    println!("middle aaa honest: {o:?}");
    assert!(o.p_reject.abs() < 1e-9, "p_reject = {}", o.p_reject);
    let expect = 1.0 / 128.0; // 1/(2^3 * 4^2)
    assert!(
        (o.p_accept - expect).abs() < 1e-12,
        "p_accept = {} vs {expect}",
        o.p_accept
    );
    assert!((overall_acceptance(&o).unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn middle_nonmember_adversaries() {
    let (spec, _) = build_verifier(ProtocolId::Middle, 0.25).unwrap();
    let input = "aa";
    let n = 2u64;
    let bound =
        bounds::evaluate_bound(&bounds::Bound::MiddleRejectLb { n }).unwrap();
    for adv in enumerate_adversaries(ProtocolId::Middle, input).unwrap() {
        let o = exact(&spec, input, &adv);
        println!("middle aa {}: {o:?}", adv.describe());
        assert!(
            o.p_reject >= bound - 1e-9,
            "{}: p_reject {} < bound {bound}",
            adv.describe(),
            o.p_reject
        );
        let rejection = 1.0 - overall_acceptance(&o).unwrap();
        assert!(rejection > 0.75, "{}: overall rejection {rejection}", adv.describe());
    }
}

#[test]
fn gadget_probability_exact() {
    for k in [1u32, 4] {
        let spec = qamfa::protocols::middle::build_gadget_only(k);
        for n in [0usize, 1, 5, 20] {
            let input = "a".repeat(n);
            let o = exact(&spec, &input, &ProverStrategy::silent());
            let expect = bounds::evaluate_bound(&bounds::Bound::GadgetAccept {
                n: n as u64,
                k,
            })
            .unwrap();
            assert!(
                (o.p_accept - expect).abs() < 1e-12,
                "gadget n={n} k={k}: {} vs {expect}",
                o.p_accept
            );
            assert!(o.p_reject == 0.0);
        }
    }
}

#[test]
fn mpal_member_and_adversaries() {
    let (spec, params) = build_verifier(ProtocolId::Mpal, 0.25).unwrap();
    assert_eq!(params.k, 3);
    let prover = honest_prover(ProtocolId::Mpal, "aba").unwrap_err();
    let _ = prover; // "aba" is not a member (center 'b')

    let prover = honest_prover(ProtocolId::Mpal, "bab").unwrap();
    let o = exact(&spec, "bab", &prover);
    println!("mpal bab honest: {o:?}");
    assert!(o.p_reject.abs() < 1e-9);
    let expect = 2f64.powi(-(params.k as i32 * 3));
    assert!((o.p_accept - expect).abs() < 1e-12, "{} vs {expect}", o.p_accept);

    let input = "bb";
    let bound = 5f64.powi(1 - 2);
    for adv in enumerate_adversaries(ProtocolId::Mpal, input).unwrap() {
        let o = exact(&spec, input, &adv);
        println!("mpal bb {}: {o:?}", adv.describe());
        assert!(o.p_reject >= bound - 1e-9, "{}: {}", adv.describe(), o.p_reject);
    }
}

#[test]
fn knapsack_member_and_nonmember() {
    let (spec, _params) = build_verifier(ProtocolId::Knapsack, 0.25).unwrap();
    let input = "101#10#11";
    let prover = honest_prover(ProtocolId::Knapsack, input).unwrap();
    let o = exact(&spec, input, &prover);
    println!("knapsack member honest: {o:?}");
    assert!(o.p_reject.abs() < 1e-9, "p_reject = {}", o.p_reject);
    assert!((overall_acceptance(&o).unwrap() - 1.0).abs() < 1e-9);

    let bad = "101#10#110";
    let g_spec = spec.clone();
    for adv in enumerate_adversaries(ProtocolId::Knapsack, bad).unwrap() {
        let g = build_config_graph(&g_spec, bad, &adv, &BuildOptions::default()).unwrap();
        let sol = solve_absorption(&g).unwrap();
        let o = sol.outcome();
        let rejection = 1.0 - overall_acceptance(&o).unwrap();
        // Conditional rejection at the final measurement.
        let fin = g
            .find_node(|node| g_spec.state_name(node.config.classical) == "fin")
            .expect("final measurement reached");
        let step4 = sol.outcome_from(fin).p_reject;
        println!(
            "knapsack {} : overall rejection {rejection:.6}, step4 {step4:.6}",
            adv.describe()
        );
        assert!(step4 >= 0.5 - 1e-9, "{}: step4 {step4}", adv.describe());
        assert!(rejection > 0.75, "{}: rejection {rejection}", adv.describe());
    }
}

#[test]
fn pair_languages_complete_and_sound() {
    for (protocol, member) in [
        (ProtocolId::L1, "abba"), // mirrored pair of b's
        (ProtocolId::L1, "aabaa"), // center b
        (ProtocolId::L2, "ab"),
        (ProtocolId::L2, "aabb"),
    ] {
        let (spec, _) = build_verifier(protocol, 0.4).unwrap();
        let prover = honest_prover(protocol, member).unwrap();
        let o = exact(&spec, member, &prover);
        println!("{protocol} {member} honest: {o:?}");
        assert!(o.p_reject.abs() < 1e-9, "{protocol}: {}", o.p_reject);
        assert!((overall_acceptance(&o).unwrap() - 1.0).abs() < 1e-9);
    }

    // Soundness: "aa" is in neither language.
    for protocol in [ProtocolId::L1, ProtocolId::L2] {
        let (spec, _) = build_verifier(protocol, 0.4).unwrap();
        for adv in enumerate_adversaries(protocol, "aa").unwrap() {
            let o = exact(&spec, "aa", &adv);
            let rejection = 1.0 - overall_acceptance(&o).unwrap();
            assert!(
                rejection > 0.6,
                "{protocol} {}: rejection {rejection}",
                adv.describe()
            );
        }
    }
}

#[test]
fn knapsack_encoding_through_the_machine() {
    let spec = build_verifier_with_k(ProtocolId::Knapsack, 1);
    for bits in ["1", "10", "101", "1101"] {
        let input = format!("{bits}#1");
        let g = build_config_graph(
            &spec,
            &input,
            &ProverStrategy {
                param: qamfa::prover::StrategyParam::SubsetSelect { take: vec![false] },
            },
            &BuildOptions::default(),
        )
        .unwrap();
        let ask_head = bits.len() + 1;
        let node = g
            .find_node(|node| {
                spec.state_name(node.config.classical) == "ask" && node.config.head == ask_head
            })
            .expect("boundary query node");
        let state = &g.nodes[node].config.quantum;
        let expect = bounds::encode_state(bits).unwrap();
        assert!(
            state.approx_eq(&expect, 1e-9),
            "encode {bits}: {state:?} vs {expect:?}"
        );
    }
}
