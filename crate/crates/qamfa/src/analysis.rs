//! Protocol-level analysis: run the exact engine under the honest prover or
//! across a full adversary family, compare against the applicable
//! closed-form bound, and assemble a report.

use crate::engine::{
    build_config_graph, expected_runtime, monte_carlo, overall_acceptance, solve_absorption,
    BuildOptions, IterationOutcome, McEstimate,
};
use crate::error::Result;
use crate::machine::VerifierSpec;
use crate::prover::{enumerate_adversaries, honest_prover, ProverStrategy};
use crate::protocols::{
    bounds::{evaluate_bound, Bound},
    build_verifier, reference_decider, ProtocolId, ProtocolParams,
};

/// Which engine produced the headline numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineMode {
    Exact,
    MonteCarlo,
}

impl std::fmt::Display for EngineMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EngineMode::Exact => write!(f, "exact"),
            EngineMode::MonteCarlo => write!(f, "monte-carlo"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct AnalyzeOptions {
    pub epsilon: f64,
    pub mode: EngineMode,
    pub trials: u64,
    pub seed: u64,
    pub step_cap: u64,
    pub node_cap: usize,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            epsilon: 0.25,
            mode: EngineMode::Exact,
            trials: 100_000,
            seed: 0,
            step_cap: crate::engine::DEFAULT_STEP_CAP,
            node_cap: crate::engine::DEFAULT_NODE_CAP,
        }
    }
}

/// One quantitative guarantee checked against a measured value.
#[derive(Debug, Clone)]
pub struct BoundCheck {
    pub name: String,
    pub bound: f64,
    pub measured: f64,
    pub margin: f64,
    pub satisfied: bool,
}

impl BoundCheck {
    pub fn at_least(name: &str, measured: f64, bound: f64, slack: f64) -> Self {
        BoundCheck {
            name: name.to_string(),
            bound,
            measured,
            margin: measured - bound,
            satisfied: measured >= bound - slack,
        }
    }

    pub fn equals(name: &str, measured: f64, bound: f64, tol: f64) -> Self {
        BoundCheck {
            name: name.to_string(),
            bound,
            measured,
            margin: (measured - bound).abs(),
            satisfied: (measured - bound).abs() <= tol,
        }
    }
}

/// Summary of a full adversary sweep on a non-member input.
#[derive(Debug, Clone)]
pub struct AdversarySummary {
    pub count: usize,
    pub min_iteration_rejection: f64,
    pub min_iteration_rejection_by: String,
    pub min_overall_rejection: f64,
    pub min_overall_rejection_by: String,
}

/// Everything one analysis run produces.
#[derive(Debug, Clone)]
pub struct AnalysisReport {
    pub protocol: ProtocolId,
    pub input: String,
    pub params: ProtocolParams,
    pub member: bool,
    pub mode: EngineMode,
    /// Strategy whose iteration law is reported: the honest prover for
    /// members, the rejection-minimizing adversary for non-members.
    pub strategy: String,
    pub iteration: IterationOutcome,
    pub overall_acceptance: f64,
    pub expected_total_steps: f64,
    pub graph_nodes: usize,
    pub adversaries: Option<AdversarySummary>,
    pub checks: Vec<BoundCheck>,
    pub mc: Option<McEstimate>,
}

/// Exact iteration law of one (machine, input, strategy) triple.
pub fn exact_outcome(
    spec: &VerifierSpec,
    input: &str,
    strategy: &ProverStrategy,
    node_cap: usize,
) -> Result<(IterationOutcome, usize)> {
    let graph = build_config_graph(
        spec,
        input,
        strategy,
        &BuildOptions {
            node_cap,
            ..Default::default()
        },
    )?;
    let outcome = solve_absorption(&graph)?.outcome();
    Ok((outcome, graph.node_count()))
}

/// Conditional rejection probability at the subset-sum final measurement:
/// the reject mass of the absorption law started from the `fin` node.
/// `None` when the scan rejects before ever reaching that measurement.
pub fn knapsack_final_rejection(
    spec: &VerifierSpec,
    input: &str,
    strategy: &ProverStrategy,
    node_cap: usize,
) -> Result<Option<f64>> {
    let graph = build_config_graph(
        spec,
        input,
        strategy,
        &BuildOptions {
            node_cap,
            ..Default::default()
        },
    )?;
    let Some(fin) = graph.find_node(|n| spec.state_name(n.config.classical) == "fin") else {
        return Ok(None);
    };
    let solution = solve_absorption(&graph)?;
    Ok(Some(solution.outcome_from(fin).p_reject))
}

/// Analyze one input: honest prover for members, exhaustive adversary
/// enumeration for non-members, plus the applicable bound checks.
pub fn analyze(protocol: ProtocolId, input: &str, opts: &AnalyzeOptions) -> Result<AnalysisReport> {
    let (spec, params) = build_verifier(protocol, opts.epsilon)?;
    let member = reference_decider(protocol, input);
    let n = input.chars().count() as u64;

    let mut checks = Vec::new();
    let (strategy, iteration, nodes, adversaries) = if member {
        let prover = honest_prover(protocol, input)?;
        let (outcome, nodes) = exact_outcome(&spec, input, &prover, opts.node_cap)?;
        checks.push(BoundCheck::equals(
            "completeness: per-iteration rejection is zero",
            outcome.p_reject,
            0.0,
            1e-9,
        ));
        let accept_law = match protocol {
            ProtocolId::Middle | ProtocolId::L1 | ProtocolId::L2 => Some((
                "per-iteration acceptance 1/(2^k (n+1)^2)",
                Bound::GadgetAccept { n, k: params.k },
            )),
            ProtocolId::Mpal => Some((
                "per-iteration acceptance 2^(-kn)",
                Bound::FlagAccept { n, k: params.k },
            )),
            ProtocolId::Knapsack => None,
        };
        if let Some((name, bound)) = accept_law {
            checks.push(BoundCheck::equals(
                name,
                outcome.p_accept,
                evaluate_bound(&bound)?,
                1e-12,
            ));
        }
        (prover.describe(), outcome, nodes, None)
    } else {
        let family = enumerate_adversaries(protocol, input)?;
        let mut min_iter: Option<(f64, String)> = None;
        let mut min_overall: Option<(f64, String, IterationOutcome, usize)> = None;
        let mut min_final: Option<f64> = None;
        for adv in &family {
            let (outcome, graph_nodes) = exact_outcome(&spec, input, adv, opts.node_cap)?;
            let overall_rej = 1.0 - overall_acceptance(&outcome)?;
            if min_iter
                .as_ref()
                .map_or(true, |(p, _)| outcome.p_reject < *p)
            {
                min_iter = Some((outcome.p_reject, adv.describe()));
            }
            if min_overall.as_ref().map_or(true, |(p, ..)| overall_rej < *p) {
                min_overall = Some((overall_rej, adv.describe(), outcome, graph_nodes));
            }
            if protocol == ProtocolId::Knapsack {
                if let Some(fin) = knapsack_final_rejection(&spec, input, adv, opts.node_cap)? {
                    if min_final.map_or(true, |p| fin < p) {
                        min_final = Some(fin);
                    }
                }
            }
        }
        let (min_iter_p, min_iter_by) = min_iter.expect("adversary family is never empty");
        let (min_overall_p, min_overall_by, outcome, nodes) =
            min_overall.expect("adversary family is never empty");

        match protocol {
            ProtocolId::Middle if n >= 1 => checks.push(BoundCheck::at_least(
                "soundness: min per-iteration rejection >= 1/(2n^2+1)",
                min_iter_p,
                evaluate_bound(&Bound::MiddleRejectLb { n })?,
                1e-9,
            )),
            ProtocolId::Mpal if n >= 1 => checks.push(BoundCheck::at_least(
                "soundness: min per-iteration rejection >= 5^(1-n)",
                min_iter_p,
                evaluate_bound(&Bound::MpalRejectLb { n })?,
                1e-9,
            )),
            ProtocolId::Knapsack => {
                if let Some(fin) = min_final {
                    checks.push(BoundCheck::at_least(
                        "soundness: min final-measurement rejection >= 1/2",
                        fin,
                        evaluate_bound(&Bound::KnapsackRejectLb)?,
                        1e-9,
                    ));
                }
            }
            _ => {}
        }
        checks.push(BoundCheck::at_least(
            "soundness: min overall rejection > 1 - epsilon",
            min_overall_p,
            1.0 - params.epsilon,
            0.0,
        ));

        let summary = AdversarySummary {
            count: family.len(),
            min_iteration_rejection: min_iter_p,
            min_iteration_rejection_by: min_iter_by,
            min_overall_rejection: min_overall_p,
            min_overall_rejection_by: min_overall_by,
        };
        (
            summary.min_overall_rejection_by.clone(),
            outcome,
            nodes,
            Some(summary),
        )
    };

    let overall = overall_acceptance(&iteration)?;
    if member {
        checks.push(BoundCheck::equals(
            "completeness: overall acceptance is one",
            overall,
            1.0,
            1e-9,
        ));
    }

    let mc = if opts.mode == EngineMode::MonteCarlo {
        let prover = if member {
            honest_prover(protocol, input)?
        } else {
            enumerate_adversaries(protocol, input)?
                .into_iter()
                .find(|a| a.describe() == strategy)
                .expect("reported strategy comes from the family")
        };
        Some(monte_carlo(
            &spec,
            input,
            &prover,
            opts.trials,
            opts.seed,
            opts.step_cap,
        )?)
    } else {
        None
    };

    Ok(AnalysisReport {
        protocol,
        input: input.to_string(),
        params,
        member,
        mode: opts.mode,
        strategy,
        iteration,
        overall_acceptance: overall,
        expected_total_steps: expected_runtime(&iteration)?,
        graph_nodes: nodes,
        adversaries,
        checks,
        mc,
    })
}

/// One row of a size sweep under the honest prover.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub protocol: ProtocolId,
    pub n: usize,
    pub k: u32,
    pub epsilon: f64,
    pub input: String,
    pub p_accept_iter: f64,
    pub p_reject_iter: f64,
    pub expected_steps_iter: f64,
    pub overall_acceptance: f64,
    pub expected_total_steps: f64,
}

/// Exact expected runtimes across input sizes, on the protocol's canonical
/// member of each length. Lengths with no member of that exact size are an
/// error.
pub fn sweep(
    protocol: ProtocolId,
    sizes: &[usize],
    epsilon: f64,
    node_cap: usize,
) -> Result<Vec<SweepRow>> {
    let (spec, params) = build_verifier(protocol, epsilon)?;
    let mut rows = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let input = crate::protocols::canonical_member(protocol, n).ok_or_else(|| {
            crate::error::Error::InvalidArgument(format!(
                "{protocol} has no canonical member of length {n}"
            ))
        })?;
        let prover = honest_prover(protocol, &input)?;
        let (outcome, _) = exact_outcome(&spec, &input, &prover, node_cap)?;
        rows.push(SweepRow {
            protocol,
            n,
            k: params.k,
            epsilon,
            input,
            p_accept_iter: outcome.p_accept,
            p_reject_iter: outcome.p_reject,
            expected_steps_iter: outcome.expected_steps,
            overall_acceptance: overall_acceptance(&outcome)?,
            expected_total_steps: expected_runtime(&outcome)?,
        });
    }
    Ok(rows)
}

/// Least-squares slope of ln(expected total steps) against ln(n).
/// `None` with fewer than two rows.
pub fn log_log_slope(rows: &[SweepRow]) -> Option<f64> {
    if rows.len() < 2 {
        return None;
    }
    let points: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| ((r.n as f64).ln(), r.expected_total_steps.ln()))
        .collect();
    let n = points.len() as f64;
    let mean_x = points.iter().map(|(x, _)| x).sum::<f64>() / n;
    let mean_y = points.iter().map(|(_, y)| y).sum::<f64>() / n;
    let sxy: f64 = points
        .iter()
        .map(|(x, y)| (x - mean_x) * (y - mean_y))
        .sum();
    let sxx: f64 = points.iter().map(|(x, _)| (x - mean_x).powi(2)).sum();
    Some(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn member_report_checks_pass() {
        let report = analyze(ProtocolId::Middle, "aaa", &AnalyzeOptions::default()).unwrap();
        assert!(report.member);
        assert!(report.checks.iter().all(|c| c.satisfied), "{:?}", report.checks);
        assert!((report.iteration.p_accept - 1.0 / 128.0).abs() < 1e-12);
        assert!((report.overall_acceptance - 1.0).abs() < 1e-9);
        assert!(report.expected_total_steps > 0.0);
    }

    #[test]
    fn nonmember_report_enumerates_adversaries() {
        let report = analyze(ProtocolId::Middle, "aba", &AnalyzeOptions::default()).unwrap();
        assert!(!report.member);
        let adv = report.adversaries.as_ref().unwrap();
        assert_eq!(adv.count, 4);
        assert!(adv.min_overall_rejection > 0.75);
        assert!(report.checks.iter().all(|c| c.satisfied), "{:?}", report.checks);
    }

    #[test]
    fn knapsack_nonmember_checks_final_measurement() {
        let report =
            analyze(ProtocolId::Knapsack, "101#10#110", &AnalyzeOptions::default()).unwrap();
        assert!(!report.member);
        assert!(report
            .checks
            .iter()
            .any(|c| c.name.contains("final-measurement") && c.satisfied));
        let adv = report.adversaries.as_ref().unwrap();
        assert_eq!(adv.count, 4);
        assert!(adv.min_overall_rejection > 0.75);
    }

    #[test]
    fn monte_carlo_mode_attaches_estimate() {
        let opts = AnalyzeOptions {
            mode: EngineMode::MonteCarlo,
            trials: 2_000,
            seed: 5,
            ..Default::default()
        };
        let report = analyze(ProtocolId::Middle, "a", &opts).unwrap();
        let mc = report.mc.unwrap();
        assert_eq!(mc.trials, 2_000);
        // Members are eventually accepted in every uncensored trial.
        assert_eq!(mc.rejects, 0);
    }
}
