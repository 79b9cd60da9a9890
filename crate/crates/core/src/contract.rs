//! Wage-scheme design for a principal who pays a complexity cost for
//! distinguishing performance states.
//!
//! Three performance states, agent utility `√W − c·e`, effort `e ∈ {0, 1}`.
//! The principal minimizes `Σ μ1 W + δ|S^W|` (0 for a flat wage) subject to
//! participation `Σ μ1 √W − c ≥ ū` and incentive compatibility
//! `Σ μ1 √W − c ≥ Σ μ0 √W`. Everything is solved in `s = √W`, where both
//! constraints are linear and the objective is a weighted sum of squares.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::car::Belief;
use crate::error::{Error, Result};
use crate::rational::{int, serde_rational, serde_rational_vec, to_f64, Rational};

pub const STATES: usize = 3;

/// Residual tolerance used by the oracle's own checks.
pub const ORACLE_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "ProblemDoc")]
pub struct ContractProblem {
    mu0: Belief,
    mu1: Belief,
    #[serde(with = "serde_rational")]
    c: Rational,
    #[serde(with = "serde_rational")]
    u_bar: Rational,
    #[serde(with = "serde_rational")]
    delta: Rational,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemDoc {
    mu0: Belief,
    mu1: Belief,
    #[serde(with = "serde_rational")]
    c: Rational,
    #[serde(with = "serde_rational")]
    u_bar: Rational,
    #[serde(with = "serde_rational")]
    delta: Rational,
}

impl TryFrom<ProblemDoc> for ContractProblem {
    type Error = Error;
    fn try_from(d: ProblemDoc) -> Result<Self> {
        ContractProblem::new(d.mu0, d.mu1, d.c, d.u_bar, d.delta)
    }
}

fn all_distinct(v: &[Rational]) -> bool {
    (0..v.len()).all(|i| (i + 1..v.len()).all(|j| v[i] != v[j]))
}

impl ContractProblem {
    pub fn new(mu0: Belief, mu1: Belief, c: Rational, u_bar: Rational, delta: Rational) -> Result<Self> {
        if mu0.n() != STATES || mu1.n() != STATES {
            return Err(Error::Hypothesis(format!("contract problems have exactly {STATES} states")));
        }
        if !c.is_positive() {
            return Err(Error::Hypothesis("effort cost c must be positive".into()));
        }
        if !delta.is_positive() {
            return Err(Error::Hypothesis("delta must be positive".into()));
        }
        if mu1.probs().iter().any(|p| !p.is_positive()) {
            return Err(Error::DivisionByZero("high-effort probabilities must be positive".into()));
        }
        if !all_distinct(mu0.probs()) || !all_distinct(mu1.probs()) {
            return Err(Error::Hypothesis("state probabilities must differ within each effort level".into()));
        }
        if mu0.probs() == mu1.probs() {
            return Err(Error::Hypothesis("effort must change the distribution".into()));
        }
        Ok(ContractProblem { mu0, mu1, c, u_bar, delta })
    }

    pub fn mu0(&self) -> &Belief {
        &self.mu0
    }

    pub fn mu1(&self) -> &Belief {
        &self.mu1
    }

    pub fn c(&self) -> &Rational {
        &self.c
    }

    pub fn u_bar(&self) -> &Rational {
        &self.u_bar
    }

    pub fn delta(&self) -> &Rational {
        &self.delta
    }

    pub fn with_delta(&self, delta: Rational) -> Result<Self> {
        ContractProblem::new(self.mu0.clone(), self.mu1.clone(), self.c.clone(), self.u_bar.clone(), delta)
    }

    /// Required expected `√W` under high effort.
    fn participation_target(&self) -> Rational {
        &self.u_bar + &self.c
    }

    /// Slack of participation and incentive constraints at `s = √W`.
    pub fn slack(&self, s: &[Rational]) -> (Rational, Rational) {
        let m = likelihood_stat(self);
        let part = self.mu1.expectation(s) - &self.u_bar - &self.c;
        let ic: Rational = self.mu1.probs().iter().zip(&m).zip(s).map(|((p, mi), si)| p * mi * si).sum::<Rational>() - &self.c;
        (part, ic)
    }

    fn slack_f64(&self, s: &[f64]) -> (f64, f64) {
        let p: Vec<f64> = self.mu1.probs().iter().map(to_f64).collect();
        let m: Vec<f64> = likelihood_stat(self).iter().map(to_f64).collect();
        let part = (0..STATES).map(|i| p[i] * s[i]).sum::<f64>() - to_f64(&self.u_bar) - to_f64(&self.c);
        let ic = (0..STATES).map(|i| p[i] * m[i] * s[i]).sum::<f64>() - to_f64(&self.c);
        (part, ic)
    }
}

/// `μ(ω) = 1 − μ0(ω)/μ1(ω)`.
pub fn likelihood_stat(problem: &ContractProblem) -> Vec<Rational> {
    problem.mu1.probs().iter().zip(problem.mu0.probs()).map(|(p1, p0)| int(1) - p0 / p1).collect()
}

/// `(Σ μ1 μ, Σ μ1 μ² + Σ μ0 μ)`; both are zero for every valid problem.
pub fn identities(problem: &ContractProblem) -> (Rational, Rational) {
    let m = likelihood_stat(problem);
    let first = problem.mu1.expectation(&m);
    let sq: Vec<Rational> = m.iter().map(|x| x * x).collect();
    (first, problem.mu1.expectation(&sq) + problem.mu0.expectation(&m))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Regime {
    Simple,
    /// Two wage levels; `k` (0-based) is the state paid differently.
    Moderate { k: usize },
    Complex,
}

impl Regime {
    pub fn blocks(&self) -> usize {
        match self {
            Regime::Simple => 1,
            Regime::Moderate { .. } => 2,
            Regime::Complex => 3,
        }
    }

    pub fn complexity_cost(&self, delta: &Rational) -> Rational {
        match self {
            Regime::Simple => Rational::zero(),
            r => delta * int(r.blocks() as i64),
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Regime::Simple => write!(f, "simple"),
            Regime::Moderate { k } => write!(f, "moderate(k={})", k + 1),
            Regime::Complex => write!(f, "complex"),
        }
    }
}

/// A wage scheme in exact arithmetic, from a closed form.
#[derive(Clone, Debug, Serialize)]
pub struct ExactScheme {
    pub regime: Regime,
    #[serde(with = "serde_rational_vec")]
    pub sqrt_wages: Vec<Rational>,
    #[serde(with = "serde_rational_vec")]
    pub wages: Vec<Rational>,
    #[serde(with = "serde_rational")]
    pub expected_wage: Rational,
    #[serde(with = "serde_rational")]
    pub total_cost: Rational,
    /// `Σ μ1 √W − c − ū`; negative means the participation constraint fails.
    #[serde(with = "serde_rational")]
    pub participation_slack: Rational,
    /// `Σ μ1 μ √W − c`; negative means the incentive constraint fails.
    #[serde(with = "serde_rational")]
    pub incentive_slack: Rational,
}

impl ExactScheme {
    fn from_sqrt(problem: &ContractProblem, regime: Regime, s: Vec<Rational>) -> Self {
        let wages: Vec<Rational> = s.iter().map(|x| x * x).collect();
        let expected_wage = problem.mu1.expectation(&wages);
        let total_cost = &expected_wage + regime.complexity_cost(&problem.delta);
        let (participation_slack, incentive_slack) = problem.slack(&s);
        ExactScheme { regime, sqrt_wages: s, wages, expected_wage, total_cost, participation_slack, incentive_slack }
    }

    pub fn is_feasible(&self) -> bool {
        !self.participation_slack.is_negative() && !self.incentive_slack.is_negative()
    }
}

/// The printed regime threshold `[μ1(k)(1−μ1(k))/μ(k)² + 1]c²`.
pub fn regime_threshold(problem: &ContractProblem, k: usize) -> Result<Rational> {
    let m = likelihood_stat(problem);
    let mk = m.get(k).ok_or(Error::StateOutOfRange { index: k, n: STATES })?;
    if mk.is_zero() {
        return Err(Error::DivisionByZero(format!("likelihood statistic is zero at state {}", k + 1)));
    }
    let p = problem.mu1.prob(k);
    Ok((p * (int(1) - p) / (mk * mk) + int(1)) * &problem.c * &problem.c)
}

/// Output of the formulas exactly as printed, with the constraint slack they
/// actually achieve.
#[derive(Clone, Debug, Serialize)]
pub struct PrintedFormulas {
    /// State used for the moderate formula and the threshold.
    pub k: usize,
    #[serde(with = "serde_rational")]
    pub threshold: Rational,
    pub regime: Regime,
    pub chosen: ExactScheme,
    pub moderate: ExactScheme,
    pub complex: ExactScheme,
}

/// Evaluates the printed wage formulas. `k` is the state with negative
/// likelihood statistic whose printed moderate cost term
/// `μ1(k)(1−μ1(k))/μ(k)²` is smallest.
pub fn solve_printed(problem: &ContractProblem) -> Result<PrintedFormulas> {
    let m = likelihood_stat(problem);
    let u = &problem.u_bar;
    let c = &problem.c;
    let k = (0..STATES)
        .filter(|&k| m[k].is_negative())
        .min_by_key(|&k| {
            let p = problem.mu1.prob(k);
            p * (int(1) - p) / (&m[k] * &m[k])
        })
        .ok_or_else(|| Error::Hypothesis("no state with negative likelihood statistic".into()))?;
    let p = problem.mu1.prob(k);
    let low = (u - c * p / &m[k]).abs();
    let high = (u + c * (int(1) - p) / &m[k]).abs();
    let s_mod: Vec<Rational> = (0..STATES).map(|i| if i == k { high.clone() } else { low.clone() }).collect();
    let moderate = ExactScheme::from_sqrt(problem, Regime::Moderate { k }, s_mod);

    let denom = problem.mu0.expectation(&m);
    if denom.is_zero() {
        return Err(Error::DivisionByZero("Σ μ0 μ is zero".into()));
    }
    let s_cx: Vec<Rational> = m.iter().map(|mi| (u - c * mi / &denom).abs()).collect();
    let complex = ExactScheme::from_sqrt(problem, Regime::Complex, s_cx);

    let threshold = regime_threshold(problem, k)?;
    let (regime, chosen) =
        if problem.delta > threshold { (moderate.regime, moderate.clone()) } else { (Regime::Complex, complex.clone()) };
    Ok(PrintedFormulas { k, threshold, regime, chosen, moderate, complex })
}

/// Interior closed-form optimum for one regime, re-derived with the effort
/// cost in the participation constraint. `None` when the interior solution
/// would need a negative `√W` (then the oracle is the only answer) or the
/// regime cannot satisfy the incentive constraint.
pub fn closed_form(problem: &ContractProblem, regime: Regime) -> Option<ExactScheme> {
    let m = likelihood_stat(problem);
    let a = problem.participation_target();
    let c = &problem.c;
    let s: Vec<Rational> = match regime {
        Regime::Simple => return None,
        Regime::Complex => {
            let sq: Vec<Rational> = m.iter().map(|x| x * x).collect();
            let var = problem.mu1.expectation(&sq);
            let s: Vec<Rational> = m.iter().map(|mi| &a + c * mi / &var).collect();
            if !all_distinct(&s) {
                return None;
            }
            s
        }
        Regime::Moderate { k } => {
            if m[k].is_zero() {
                return None;
            }
            let p = problem.mu1.prob(k);
            let low = &a - c / &m[k];
            let high = &a + c * (int(1) - p) / (p * &m[k]);
            (0..STATES).map(|i| if i == k { high.clone() } else { low.clone() }).collect()
        }
    };
    if s.iter().any(|x| x.is_negative()) {
        return None;
    }
    Some(ExactScheme::from_sqrt(problem, regime, s))
}

/// A numerically solved wage scheme.
#[derive(Clone, Debug, Serialize)]
pub struct WageScheme {
    pub regime: Regime,
    pub sqrt_wages: Vec<f64>,
    pub wages: Vec<f64>,
    pub expected_wage: f64,
    pub complexity_cost: f64,
    pub total_cost: f64,
    pub participation_slack: f64,
    pub incentive_slack: f64,
    /// Multipliers of participation and incentive constraints.
    pub multipliers: (f64, f64),
}

impl WageScheme {
    pub fn max_violation(&self) -> f64 {
        (-self.participation_slack).max(-self.incentive_slack).max(0.0)
    }

    /// Both constraints hold with equality within `tol`.
    pub fn binds(&self, tol: f64) -> bool {
        self.participation_slack.abs() <= tol && self.incentive_slack.abs() <= tol
    }
}

/// Minimizes `Σ w s²` over `s ≥ 0` subject to `Σ w s ≥ a` and `Σ w m s ≥ c`.
///
/// KKT gives `s = max(0, (λ + βm)/2)`. For fixed β the participation
/// multiplier λ is found by bisection (participation is increasing in λ);
/// β is then found by an outer bisection on the incentive constraint.
fn dual_solve(w: &[f64], m: &[f64], a: f64, c: f64) -> Option<(Vec<f64>, f64, f64)> {
    let s_of = |lam: f64, beta: f64| -> Vec<f64> { m.iter().map(|mi| ((lam + beta * mi) / 2.0).max(0.0)).collect() };
    let part = |s: &[f64]| -> f64 { w.iter().zip(s).map(|(wi, si)| wi * si).sum() };
    let ic = |s: &[f64]| -> f64 { w.iter().zip(m).zip(s).map(|((wi, mi), si)| wi * mi * si).sum() };

    let lambda_for = |beta: f64| -> f64 {
        if part(&s_of(0.0, beta)) >= a {
            return 0.0;
        }
        let mut hi = 1.0;
        while part(&s_of(hi, beta)) < a {
            hi *= 2.0;
            if hi > 1e300 {
                return f64::NAN;
            }
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if part(&s_of(mid, beta)) >= a {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    };
    let ic_at = |beta: f64| -> f64 { ic(&s_of(lambda_for(beta), beta)) };

    let beta = if ic_at(0.0) >= c {
        0.0
    } else {
        let mut hi = 1.0;
        while ic_at(hi) < c {
            hi *= 2.0;
            if hi > 1e300 {
                return None;
            }
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if ic_at(mid) >= c {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    };
    let lam = lambda_for(beta);
    if !lam.is_finite() {
        return None;
    }
    Some((s_of(lam, beta), lam, beta))
}

/// Per-regime oracle solution; `None` when the regime cannot induce high
/// effort or its optimum collapses into a coarser regime.
pub fn solve_regime_oracle(problem: &ContractProblem, regime: Regime) -> Option<WageScheme> {
    let p: Vec<f64> = problem.mu1.probs().iter().map(to_f64).collect();
    let m: Vec<f64> = likelihood_stat(problem).iter().map(to_f64).collect();
    let a = to_f64(&problem.participation_target());
    let c = to_f64(&problem.c);
    let (s, lam, beta) = match regime {
        // flat wages give Σ μ1 μ s = 0 < c
        Regime::Simple => return None,
        Regime::Complex => {
            let (s, lam, beta) = dual_solve(&p, &m, a, c)?;
            let distinct = (0..STATES).all(|i| (i + 1..STATES).all(|j| (s[i] - s[j]).abs() > ORACLE_TOLERANCE));
            if !distinct {
                return None;
            }
            (s, lam, beta)
        }
        Regime::Moderate { k } => {
            // pool the two states paid alike into one
            let pk = p[k];
            let pooled_m = -pk * m[k] / (1.0 - pk);
            let (s2, lam, beta) = dual_solve(&[1.0 - pk, pk], &[pooled_m, m[k]], a, c)?;
            if (s2[0] - s2[1]).abs() <= ORACLE_TOLERANCE {
                return None;
            }
            let s = (0..STATES).map(|i| if i == k { s2[1] } else { s2[0] }).collect();
            (s, lam, beta)
        }
    };
    let wages: Vec<f64> = s.iter().map(|x| x * x).collect();
    let expected_wage: f64 = p.iter().zip(&wages).map(|(pi, wi)| pi * wi).sum();
    let complexity_cost = to_f64(&regime.complexity_cost(&problem.delta));
    let (participation_slack, incentive_slack) = problem.slack_f64(&s);
    if participation_slack < -ORACLE_TOLERANCE || incentive_slack < -ORACLE_TOLERANCE {
        return None;
    }
    Some(WageScheme {
        regime,
        sqrt_wages: s,
        wages,
        expected_wage,
        complexity_cost,
        total_cost: expected_wage + complexity_cost,
        participation_slack,
        incentive_slack,
        multipliers: (lam, beta),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleSolution {
    pub best: WageScheme,
    /// Every attainable regime, in regime order.
    pub candidates: Vec<WageScheme>,
    /// Regimes that cannot induce high effort or collapse.
    pub infeasible: Vec<Regime>,
    /// Smallest δ at which a moderate scheme is optimal, from the δ-free
    /// expected wages of the best moderate and the complex candidate.
    pub flip_delta: Option<f64>,
}

pub fn all_regimes() -> Vec<Regime> {
    let mut v = vec![Regime::Simple];
    v.extend((0..STATES).map(|k| Regime::Moderate { k }));
    v.push(Regime::Complex);
    v
}

/// Solves every regime and keeps the cheapest; ties go to fewer blocks.
pub fn solve_oracle(problem: &ContractProblem) -> Result<OracleSolution> {
    let mut candidates = Vec::new();
    let mut infeasible = Vec::new();
    for r in all_regimes() {
        match solve_regime_oracle(problem, r) {
            Some(s) => candidates.push(s),
            None => infeasible.push(r),
        }
    }
    let best = candidates
        .iter()
        .min_by(|x, y| x.total_cost.total_cmp(&y.total_cost).then(x.regime.blocks().cmp(&y.regime.blocks())))
        .cloned()
        .ok_or_else(|| Error::Hypothesis("no regime can induce high effort".into()))?;
    let best_moderate = candidates
        .iter()
        .filter(|s| s.regime.blocks() == 2)
        .map(|s| s.expected_wage)
        .min_by(f64::total_cmp);
    let complex = candidates.iter().find(|s| s.regime == Regime::Complex).map(|s| s.expected_wage);
    let flip_delta = match (best_moderate, complex) {
        (Some(m), Some(c)) => Some((m - c).max(0.0)),
        _ => None,
    };
    Ok(OracleSolution { best, candidates, infeasible, flip_delta })
}

/// Printed formulas against the oracle at one problem.
#[derive(Clone, Debug, Serialize)]
pub struct ContractComparison {
    pub printed: PrintedFormulas,
    pub oracle: OracleSolution,
    pub regimes_agree: bool,
    /// Oracle total cost minus the printed scheme's total cost.
    pub cost_delta: f64,
    /// Largest constraint violation of the printed scheme.
    pub printed_violation: f64,
}

pub fn compare(problem: &ContractProblem) -> Result<ContractComparison> {
    let printed = solve_printed(problem)?;
    let oracle = solve_oracle(problem)?;
    let regimes_agree = printed.regime.blocks() == oracle.best.regime.blocks();
    let cost_delta = oracle.best.total_cost - to_f64(&printed.chosen.total_cost);
    let printed_violation = (-to_f64(&printed.chosen.participation_slack)).max(-to_f64(&printed.chosen.incentive_slack)).max(0.0);
    Ok(ContractComparison { printed, oracle, regimes_agree, cost_delta, printed_violation })
}
