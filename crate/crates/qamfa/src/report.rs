//! Machine-readable report documents: a stable structured-text rendering
//! (default) and flat CSV for sweeps. Probabilities print with 12
//! significant digits so bound margins stay auditable; identical inputs and
//! seeds render byte-identical documents.

use crate::analysis::{AnalysisReport, SweepRow};
use crate::engine::McEstimate;
use crate::suites::SuiteReport;

pub const SCHEMA_VERSION: &str = "qamfa-report/1";

/// 12-significant-digit scientific rendering used for every probability.
pub fn g12(x: f64) -> String {
    format!("{x:.11e}")
}

#[derive(Debug)]
pub enum ReportBody {
    Analysis(AnalysisReport),
    Suite(SuiteReport),
    Sweep { rows: Vec<SweepRow>, slope: Option<f64> },
    Simulate {
        report: AnalysisReport,
    },
}

#[derive(Debug)]
pub struct ReportDocument {
    pub command: String,
    pub body: ReportBody,
}

impl ReportDocument {
    /// True when every check the document carries passed.
    pub fn all_passed(&self) -> bool {
        match &self.body {
            ReportBody::Analysis(r) | ReportBody::Simulate { report: r } => {
                r.checks.iter().all(|c| c.satisfied)
            }
            ReportBody::Suite(s) => s.passed(),
            ReportBody::Sweep { .. } => true,
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("schema: {SCHEMA_VERSION}\n"));
        out.push_str(&format!("command: {}\n", self.command));
        match &self.body {
            ReportBody::Analysis(r) | ReportBody::Simulate { report: r } => {
                render_analysis(&mut out, r)
            }
            ReportBody::Suite(s) => render_suite(&mut out, s),
            ReportBody::Sweep { rows, slope } => render_sweep(&mut out, rows, *slope),
        }
        out
    }
}

fn render_analysis(out: &mut String, r: &AnalysisReport) {
    out.push_str(&format!("protocol: {}\n", r.protocol));
    out.push_str(&format!(
        "input: {:?} (n = {})\n",
        r.input,
        r.input.chars().count()
    ));
    out.push_str(&format!(
        "epsilon: {} (k = {})\n",
        r.params.epsilon, r.params.k
    ));
    out.push_str(&format!(
        "member: {}\n",
        if r.member { "yes" } else { "no" }
    ));
    out.push_str(&format!("engine: {}\n", r.mode));
    out.push_str(&format!("strategy: {}\n", r.strategy));
    out.push_str(&format!("graph nodes: {}\n", r.graph_nodes));
    out.push_str("iteration:\n");
    out.push_str(&format!("  p_accept       = {}\n", g12(r.iteration.p_accept)));
    out.push_str(&format!("  p_reject       = {}\n", g12(r.iteration.p_reject)));
    out.push_str(&format!("  p_restart      = {}\n", g12(r.iteration.p_restart)));
    out.push_str(&format!(
        "  expected steps = {}\n",
        g12(r.iteration.expected_steps)
    ));
    out.push_str(&format!(
        "overall acceptance   = {}\n",
        g12(r.overall_acceptance)
    ));
    out.push_str(&format!(
        "overall rejection    = {}\n",
        g12(1.0 - r.overall_acceptance)
    ));
    out.push_str(&format!(
        "expected total steps = {}\n",
        g12(r.expected_total_steps)
    ));
    if let Some(adv) = &r.adversaries {
        out.push_str(&format!("adversaries: {}\n", adv.count));
        out.push_str(&format!(
            "  min per-iteration rejection = {} ({})\n",
            g12(adv.min_iteration_rejection),
            adv.min_iteration_rejection_by
        ));
        out.push_str(&format!(
            "  min overall rejection       = {} ({})\n",
            g12(adv.min_overall_rejection),
            adv.min_overall_rejection_by
        ));
    }
    if let Some(mc) = &r.mc {
        render_mc(out, mc);
    }
    out.push_str("checks:\n");
    for c in &r.checks {
        out.push_str(&format!(
            "  [{}] {} | measured {} | bound {} | margin {}\n",
            if c.satisfied { "pass" } else { "FAIL" },
            c.name,
            g12(c.measured),
            g12(c.bound),
            g12(c.margin)
        ));
    }
    out.push_str(&format!(
        "result: {}\n",
        if r.checks.iter().all(|c| c.satisfied) {
            "pass"
        } else {
            "FAIL"
        }
    ));
}

fn render_mc(out: &mut String, mc: &McEstimate) {
    out.push_str("monte-carlo:\n");
    out.push_str(&format!("  trials   = {}\n", mc.trials));
    out.push_str(&format!("  seed     = {}\n", mc.seed));
    out.push_str(&format!("  step cap = {}\n", mc.step_cap));
    out.push_str(&format!("  accepts  = {}\n", mc.accepts));
    out.push_str(&format!("  rejects  = {}\n", mc.rejects));
    out.push_str(&format!("  censored = {}\n", mc.censored));
    out.push_str(&format!("  p_accept = {}\n", g12(mc.p_accept)));
    out.push_str(&format!("  std err  = {}\n", g12(mc.std_error)));
}

fn render_suite(out: &mut String, s: &SuiteReport) {
    out.push_str(&format!("suite: {}\n", s.suite));
    out.push_str(&format!("checks run: {}\n", s.total_checks));
    for c in &s.cases {
        out.push_str(&format!(
            "  [{}] {} | measured {} | bound {} | margin {}\n",
            if c.pass { "pass" } else { "FAIL" },
            c.name,
            g12(c.measured),
            g12(c.bound),
            g12(c.margin)
        ));
    }
    out.push_str(&format!(
        "result: {}\n",
        if s.passed() { "pass" } else { "FAIL" }
    ));
}

fn render_sweep(out: &mut String, rows: &[SweepRow], slope: Option<f64>) {
    for r in rows {
        out.push_str(&format!(
            "n = {:>3}: input {:?}, p_accept/iter {}, expected steps/iter {}, expected total {}\n",
            r.n,
            r.input,
            g12(r.p_accept_iter),
            g12(r.expected_steps_iter),
            g12(r.expected_total_steps)
        ));
    }
    match slope {
        Some(slope) => out.push_str(&format!("log-log slope: {}\n", g12(slope))),
        None => out.push_str("log-log slope: n/a (single point)\n"),
    }
}

/// Flat CSV for sweeps.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(
        "protocol,n,k,epsilon,p_accept_iter,p_reject_iter,expected_steps_iter,\
         overall_acceptance,expected_total_steps\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.protocol,
            r.n,
            r.k,
            r.epsilon,
            g12(r.p_accept_iter),
            g12(r.p_reject_iter),
            g12(r.expected_steps_iter),
            g12(r.overall_acceptance),
            g12(r.expected_total_steps)
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(g12(1.0 / 128.0), "7.81250000000e-3");
        assert_eq!(g12(0.0), "0.00000000000e0");
        assert_eq!(g12(1.0), "1.00000000000e0");
    }
}
