//! Bisection on a sign-changing residual, keeping the bracket history.

use ekt_mesh::fmt_g;

use crate::error::{DiagnosticsError, Result};

/// A scalar equation `residual(x) = 0` to be solved on `[lo, hi]`.
pub struct PeriodProblem<F> {
    /// Residual, typically an evolve-and-trace pipeline.
    pub residual: F,
    /// Left end of the bracket.
    pub lo: f64,
    /// Right end of the bracket.
    pub hi: f64,
    /// Bisection stops once the bracket is at most this wide.
    pub tol: f64,
}

/// One bisection step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BracketStep {
    /// Bracket before the step.
    pub lo: f64,
    /// Bracket before the step.
    pub hi: f64,
    /// Evaluated midpoint.
    pub mid: f64,
    /// Residual at the midpoint.
    pub residual: f64,
}

/// Outcome of [`solve_period`].
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodSolution {
    /// Midpoint of the final bracket.
    pub root: f64,
    /// Final bracket.
    pub bracket: (f64, f64),
    /// Residuals at the initial bracket ends.
    pub end_residuals: (f64, f64),
    /// Every midpoint evaluation, in order.
    pub history: Vec<BracketStep>,
}

impl PeriodSolution {
    /// Number of midpoint evaluations.
    pub fn iterations(&self) -> usize {
        self.history.len()
    }

    /// Structured text report with the bracket history.
    pub fn report(&self) -> String {
        let mut out = format!(
            "root = {}\nfinal_bracket = [{}, {}]\nresidual_lo = {}\nresidual_hi = {}\niterations = {}\n",
            fmt_g(self.root, 17),
            fmt_g(self.bracket.0, 17),
            fmt_g(self.bracket.1, 17),
            fmt_g(self.end_residuals.0, 17),
            fmt_g(self.end_residuals.1, 17),
            self.iterations()
        );
        out.push_str("step,lo,hi,mid,residual\n");
        for (i, st) in self.history.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                i + 1,
                fmt_g(st.lo, 17),
                fmt_g(st.hi, 17),
                fmt_g(st.mid, 17),
                fmt_g(st.residual, 17)
            ));
        }
        out
    }
}

/// Bisects until the bracket is at most `tol` wide, which takes
/// `⌈log₂((hi − lo)/tol)⌉` residual evaluations besides the two ends.
/// Errors of the residual (for instance evolver stalls) are propagated.
pub fn solve_period<F>(p: PeriodProblem<F>) -> Result<PeriodSolution>
where
    F: FnMut(f64) -> Result<f64>,
{
    let PeriodProblem { mut residual, mut lo, mut hi, tol } = p;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) || !(tol > 0.0) {
        return Err(DiagnosticsError::InvalidArgument(format!("bad bracket [{lo}, {hi}] or tolerance {tol}")));
    }
    let mut flo = residual(lo)?;
    let fhi = residual(hi)?;
    if !(flo.is_finite() && fhi.is_finite()) {
        return Err(DiagnosticsError::InvalidArgument("residual is not finite at the bracket ends".into()));
    }
    let end_residuals = (flo, fhi);
    if flo * fhi > 0.0 {
        return Err(DiagnosticsError::NoBracket(format!(
            "residual({lo}) = {flo:e} and residual({hi}) = {fhi:e} have the same sign"
        )));
    }
    let mut history = Vec::new();
    if flo == 0.0 || fhi == 0.0 {
        let root = if flo == 0.0 { lo } else { hi };
        return Ok(PeriodSolution { root, bracket: (root, root), end_residuals, history });
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let fm = residual(mid)?;
        history.push(BracketStep { lo, hi, mid, residual: fm });
        if fm == 0.0 {
            lo = mid;
            hi = mid;
        } else if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(PeriodSolution { root: 0.5 * (lo + hi), bracket: (lo, hi), end_residuals, history })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_residual() {
        let sol = solve_period(PeriodProblem { residual: |x: f64| Ok(x - 1.0), lo: 0.0, hi: 2.0, tol: 1e-10 }).unwrap();
        assert!((sol.root - 1.0).abs() < 1e-10);
    }

    #[test]
    fn iteration_count_is_the_bisection_bound() {
        for (lo, hi, tol) in [(0.0, 2.0, 1e-10), (-3.0, 0.7, 1e-6), (0.1, 0.35, 0.03)] {
            let sol = solve_period(PeriodProblem { residual: |x: f64| Ok(x - 0.123), lo, hi, tol }).unwrap();
            let expect = ((hi - lo) / tol).log2().ceil() as usize;
            assert_eq!(sol.iterations(), expect);
            assert!(sol.bracket.1 - sol.bracket.0 <= tol);
        }
    }

    #[test]
    fn same_signs_are_rejected() {
        let e = solve_period(PeriodProblem { residual: |x: f64| Ok(x * x + 1.0), lo: -1.0, hi: 1.0, tol: 1e-3 }).unwrap_err();
        assert_eq!(e.kind(), "NoBracket");
    }

    #[test]
    fn residual_errors_propagate() {
        let stall = || ekt_evolver::EvolveError::Stall { message: "mock".into(), report: None };
        let e = solve_period(PeriodProblem {
            residual: |x: f64| if x > 0.3 && x < 0.7 { Err(stall().into()) } else { Ok(x - 0.5) },
            lo: 0.0,
            hi: 1.0,
            tol: 1e-3,
        })
        .unwrap_err();
        assert_eq!(e.kind(), "StallError");
    }
}
