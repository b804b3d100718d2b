//! Explicit constants and rates of the uniform and non-uniform call-function bounds.
//!
//! Every expression is evaluated as printed, with the signed value of tan(πα/2) (negative on
//! (1, 2)). Max-branches or terms that come out non-positive are reported as warnings.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::attraction::{AttractionLaw, Moments};
use crate::error::{check_alpha, check_delta, Error, Result};

/// Distance from 2 - α within which a floating γ is treated as the boundary case.
pub const BOUNDARY_EPS: f64 = 1e-12;

/// Decay regime of |B(x)| ≤ L/|x|^γ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    #[serde(rename = "γ>2−α")]
    Above,
    #[serde(rename = "γ=2−α")]
    Boundary,
    #[serde(rename = "0<γ<2−α")]
    Between,
    #[serde(rename = "γ=0")]
    Zero,
}

impl Regime {
    pub fn classify(alpha: f64, gamma: f64) -> Result<(Regime, Option<String>)> {
        check_alpha(alpha)?;
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(Error::invalid("gamma", format!("{gamma} must be non-negative")));
        }
        let crit = 2.0 - alpha;
        if gamma == crit {
            return Ok((Regime::Boundary, None));
        }
        if (gamma - crit).abs() <= BOUNDARY_EPS {
            let note = format!("gamma = {gamma} is within {BOUNDARY_EPS:e} of 2 - alpha; treated as the boundary case");
            return Ok((Regime::Boundary, Some(note)));
        }
        Ok((
            if gamma == 0.0 {
                Regime::Zero
            } else if gamma > crit {
                Regime::Above
            } else {
                Regime::Between
            },
            None,
        ))
    }

    pub fn label(&self) -> &'static str {
        match self {
            Regime::Above => "γ>2−α",
            Regime::Boundary => "γ=2−α",
            Regime::Between => "0<γ<2−α",
            Regime::Zero => "γ=0",
        }
    }
}

fn gamma_fn(x: f64) -> f64 {
    libm::tgamma(x)
}

fn beta_fn(u: f64, v: f64) -> f64 {
    (libm::lgamma(u) + libm::lgamma(v) - libm::lgamma(u + v)).exp()
}

/// Heat-kernel constants η₁, η₂ (depend on α, δ), η₃ (from η₁) and η₄ (α only).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Etas {
    pub eta1: f64,
    pub eta2: f64,
    pub eta3: f64,
    pub eta4: f64,
    pub warnings: Vec<String>,
}

/// The factor (4α + 2α^{(2α-2)/α} - 1)/(α - 1) shared by η₃ and η₄.
fn eta_factor(alpha: f64) -> f64 {
    (4.0 * alpha + 2.0 * alpha.powf((2.0 * alpha - 2.0) / alpha) - 1.0) / (alpha - 1.0)
}

/// The two branches of the max in η₄; the second is the constant of the |y|^{-α-1}
/// envelope of the symmetric density.
pub fn eta4_branches(alpha: f64) -> (f64, f64) {
    let b1 = gamma_fn(1.0 / alpha) / alpha;
    let b2 = alpha * 2f64.powf(alpha - 1.0) * (FRAC_PI_2 * alpha).sin() * gamma_fn(0.5 * (1.0 + alpha)) * gamma_fn(0.5 * alpha)
        / PI.powf(1.5);
    (b1, b2)
}

/// η₄ = max{Γ(1/α)/α, α 2^{α-1} sin(απ/2) Γ((1+α)/2) Γ(α/2)/π^{3/2}} (4α + 2α^{(2α-2)/α} - 1)/(α - 1).
pub fn eta4(alpha: f64) -> f64 {
    let (b1, b2) = eta4_branches(alpha);
    b1.max(b2) * eta_factor(alpha)
}

pub fn eta_constants(alpha: f64, delta: f64) -> Result<Etas> {
    check_alpha(alpha)?;
    check_delta(delta)?;
    let dt = delta * (FRAC_PI_2 * alpha).tan();
    let mut warnings = Vec::new();
    let e1a = gamma_fn(1.0 / alpha) / (PI * alpha);
    let e1b = (alpha - 1.0) * (1.0 + dt) * (2.0 + dt) * gamma_fn((alpha - 1.0) / alpha) / PI;
    if e1b <= 0.0 {
        warnings.push(format!("eta1: second branch {e1b} is non-positive"));
    }
    let e2a = gamma_fn(2.0 / alpha) / (PI * alpha);
    let e2b = (1.0 + dt) * (1.0 + 2.0 * alpha + alpha * dt) / PI;
    if e2b <= 0.0 {
        warnings.push(format!("eta2: second branch {e2b} is non-positive"));
    }
    let eta1 = e1a.max(e1b);
    let eta2 = beta_fn(2.0 / alpha, 1.0 - 1.0 / alpha) * e2a.max(e2b);
    Ok(Etas {
        eta1,
        eta2,
        eta3: eta_factor(alpha) * eta1,
        eta4: eta4(alpha),
        warnings,
    })
}

/// R_n for the regime of γ. The γ = 0 case needs ∫_{-c}^{c}|B(x)|/|x|^{α-1}dx and
/// sup_{|x|≥c}|B(x)| with c = σ n^{1/α}.
pub fn rate_rn(alpha: f64, gamma: f64, sigma: f64, n: f64, b_integral: Option<f64>, b_sup_tail: Option<f64>) -> Result<f64> {
    let (regime, _) = Regime::classify(alpha, gamma)?;
    if !(n >= 1.0) {
        return Err(Error::invalid("n", format!("{n} must be at least 1")));
    }
    let base = n.powf(1.0 - 2.0 / alpha);
    Ok(match regime {
        Regime::Above => base,
        Regime::Boundary => base * (sigma * n.powf(1.0 / alpha)).ln().abs(),
        Regime::Between => n.powf(-(alpha - 1.0) * gamma / (alpha * (1.0 - gamma))),
        Regime::Zero => {
            let (bi, bs) = match (b_integral, b_sup_tail) {
                (Some(bi), Some(bs)) => (bi, bs),
                _ => return Err(Error::MissingBData),
            };
            base + base * bi + bs.powf(alpha - 1.0)
        }
    })
}

/// Everything the constants depend on.
#[derive(Debug, Clone, Serialize)]
pub struct BoundInputs {
    pub alpha: f64,
    #[serde(rename = "A")]
    pub a: f64,
    pub delta: f64,
    pub gamma: f64,
    #[serde(rename = "L")]
    pub l: f64,
    pub n: f64,
    #[serde(rename = "M")]
    pub m: Option<f64>,
    pub moments: Moments,
    pub sigma: f64,
    pub d_alpha: f64,
    pub b_integral: Option<f64>,
    pub b_sup_tail: Option<f64>,
}

impl BoundInputs {
    /// Inputs for a law: moments by quadrature and, for γ = 0, the B data at c = σ n^{1/α}.
    pub fn from_law(law: &AttractionLaw, n: f64, m: Option<f64>) -> Result<Self> {
        let (sigma, d_alpha) = law.sigma_norm();
        let moments = law.moments()?;
        let (regime, _) = Regime::classify(law.alpha(), law.gamma())?;
        let (b_integral, b_sup_tail) = if regime == Regime::Zero {
            let c = sigma * n.powf(1.0 / law.alpha());
            (Some(law.b_integral(c)?), Some(law.b_sup_tail(c)))
        } else {
            (None, None)
        };
        let inputs = BoundInputs {
            alpha: law.alpha(),
            a: law.a(),
            delta: law.delta(),
            gamma: law.gamma(),
            l: law.l(),
            n,
            m,
            moments,
            sigma,
            d_alpha,
            b_integral,
            b_sup_tail,
        };
        inputs.validate()?;
        Ok(inputs)
    }

    pub fn validate(&self) -> Result<()> {
        check_alpha(self.alpha)?;
        check_delta(self.delta)?;
        if !(self.n >= 1.0) {
            return Err(Error::invalid("n", format!("{} must be at least 1", self.n)));
        }
        if let Some(m) = self.m {
            if !(m > 0.0 && m.is_finite()) {
                return Err(Error::invalid("M", format!("{m} must be positive")));
            }
        }
        let (regime, _) = Regime::classify(self.alpha, self.gamma)?;
        if regime == Regime::Zero && (self.b_integral.is_none() || self.b_sup_tail.is_none()) {
            return Err(Error::MissingBData);
        }
        Ok(())
    }

    fn two_a_pow(&self) -> f64 {
        (2.0 * self.a).powf(2.0 / self.alpha)
    }

    /// d_α E|X - EX|^{2-α} / ((2-α)(α-1)σ^{2-α}) and E|X||EX|/σ².
    fn moment_parts(&self) -> (f64, f64) {
        let al = self.alpha;
        let frac = self.d_alpha * self.moments.frac_centered / ((2.0 - al) * (al - 1.0) * self.sigma.powf(2.0 - al));
        let mix = self.moments.abs_mean * self.moments.mean.abs() / (self.sigma * self.sigma);
        (frac, mix)
    }
}

/// c₁ split into its moment bracket and its regime term.
pub fn const_c1_terms(inp: &BoundInputs, etas: &Etas) -> Result<[f64; 2]> {
    inp.validate()?;
    let (al, a, l, g, s) = (inp.alpha, inp.a, inp.l, inp.gamma, inp.sigma);
    let e2 = etas.eta2;
    let ta = inp.two_a_pow();
    let (frac, mix) = inp.moment_parts();
    let moment = (16.0 * frac + 12.0 * mix) * e2;
    let k = 8.0 * al * al * (a + l) - 4.0 * l;
    let (regime, _) = Regime::classify(al, g)?;
    let regime_term = match regime {
        Regime::Above => {
            8.0 * ta / (s * s) * (2.0 / (2.0 - al) + 2.0 * l / (al + g - 2.0) * (2.0 * a).powf(-(al + g) / al)) * e2
        }
        Regime::Boundary => (4.0 * (4.0 * ta / (2.0 - al) + 8.0 * l / (al - 1.0)) * e2 + k / (al - 1.0)) / (s * s),
        Regime::Between => {
            s.powf((al - g) / (g - 1.0)) * (4.0 * (4.0 * ta / (2.0 - al) + 8.0 * l / (2.0 - al - g)) * e2 + k / (al - 1.0))
        }
        Regime::Zero => {
            let t1 = 2.0 * al * ta / ((2.0 - al) * s * s);
            let t2 = 4.0 / (s * s);
            let sa = s.powf(al);
            let t3 = 8.0 / ((2.0 - al) * sa) + 2.0 * ta / sa + k / (4.0 * (al - 1.0) * e2 * sa);
            4.0 * t1.max(t2).max(t3) * e2
        }
    };
    Ok([moment, regime_term])
}

pub fn const_c1(inp: &BoundInputs) -> Result<f64> {
    let etas = eta_constants(inp.alpha, inp.delta)?;
    let [m, r] = const_c1_terms(inp, &etas)?;
    Ok(m + r)
}

/// q₁ = (8α²(A+L) - 4αL)/((α-1)η₃) and q₂, the same with η₄.
pub fn q_constants(inp: &BoundInputs, etas: &Etas) -> (f64, f64) {
    let al = inp.alpha;
    let num = 8.0 * al * al * (inp.a + inp.l) - 4.0 * al * inp.l;
    (num / ((al - 1.0) * etas.eta3), num / ((al - 1.0) * etas.eta4))
}

/// Which of the two non-uniform constants to assemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum NonUniform {
    C2,
    C3,
}

/// Non-uniform constant split into (moment terms, regime term).
fn nonuniform_terms(inp: &BoundInputs, etas: &Etas, which: NonUniform) -> Result<[f64; 2]> {
    inp.validate()?;
    let m = inp.m.ok_or_else(|| Error::invalid("M", "a strike is required for the non-uniform bound"))?;
    let (al, a, l, g, s) = (inp.alpha, inp.a, inp.l, inp.gamma, inp.sigma);
    let ta = inp.two_a_pow();
    let (q1, q2) = q_constants(inp, etas);
    let (eta, q, e_main, e_between, e_zero, log_coef) = match which {
        NonUniform::C2 => {
            let e = 2.0 * (al - 1.0) / (3.0 * al - 1.0);
            (
                etas.eta3,
                q1,
                e,
                2.0 * (al - 1.0).powi(2) / ((3.0 * al - 1.0) * (1.0 - g)),
                2.0 * (al - 1.0).powi(2) / (3.0 * al - 1.0),
                e,
            )
        }
        NonUniform::C3 => {
            let e = (al * al - 1.0) / (al * al + 2.0 * al - 1.0);
            (
                etas.eta4,
                q2,
                e,
                (al * al - 1.0) * (al - 1.0) / ((al * al + 2.0 * al - 1.0) * (1.0 - g)),
                (al * al - 1.0) * (al - 1.0) / (al * al + 2.0 * al - 1.0),
                e,
            )
        }
    };
    let (frac, mix) = inp.moment_parts();
    let moment = (4.0 * frac + 3.0 * mix) * eta * m.powf(-e_main);
    let (regime, _) = Regime::classify(al, g)?;
    let case = match regime {
        Regime::Above => {
            2.0 * ta / (s * s) * (2.0 / (2.0 - al) + 2.0 * l / (al + g - 2.0) * (2.0 * a).powf(-(al + g) / al)) * m.powf(-e_main)
        }
        Regime::Boundary => {
            ((4.0 * ta / (2.0 - al) + 8.0 * l / (al - 1.0)) + q) / (s * s) * log_coef * m.ln() * m.powf(-e_main)
        }
        Regime::Between => {
            s.powf((al - g) / (g - 1.0)) * ((4.0 * ta / (2.0 - al) + 8.0 * l / (2.0 - al - g)) + q) * m.powf(-e_between)
        }
        Regime::Zero => {
            let t1 = 2.0 * al * ta / ((2.0 - al) * s * s);
            let t2 = 4.0 / (s * s);
            let sa = s.powf(al);
            let t3 = 8.0 / ((2.0 - al) * sa) + 2.0 * ta / sa + q;
            t1.max(t2).max(t3) * m.powf(-e_zero)
        }
    };
    Ok([moment, eta * case])
}

/// (c₂,M, c₃,M); c₃,M only when δ = 0.
pub fn const_c2m_c3m(inp: &BoundInputs) -> Result<(f64, Option<f64>)> {
    let etas = eta_constants(inp.alpha, inp.delta)?;
    let [a, b] = nonuniform_terms(inp, &etas, NonUniform::C2)?;
    let c3 = if inp.delta == 0.0 {
        let [c, d] = nonuniform_terms(inp, &etas, NonUniform::C3)?;
        Some(c + d)
    } else {
        None
    };
    Ok((a + b, c3))
}

/// All constants and the assembled bounds, in a stable key order.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub eta1: f64,
    pub eta2: f64,
    pub eta3: f64,
    pub eta4: f64,
    pub q1: f64,
    pub q2: f64,
    #[serde(rename = "Rn")]
    pub rn: f64,
    pub c1: f64,
    #[serde(rename = "c2M", skip_serializing_if = "Option::is_none")]
    pub c2m: Option<f64>,
    #[serde(rename = "c3M", skip_serializing_if = "Option::is_none")]
    pub c3m: Option<f64>,
    pub uniform_bound: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nonuniform_bound: Option<f64>,
    pub regime: Regime,
    pub sigma: f64,
    pub d_alpha: f64,
    #[serde(rename = "M", skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    pub n: f64,
    /// [moment bracket, regime term] of c₁.
    pub c1_terms: [f64; 2],
    #[serde(rename = "c2M_terms", skip_serializing_if = "Option::is_none")]
    pub c2m_terms: Option<[f64; 2]>,
    #[serde(rename = "c3M_terms", skip_serializing_if = "Option::is_none")]
    pub c3m_terms: Option<[f64; 2]>,
    pub warnings: Vec<String>,
    pub notes: Vec<String>,
}

pub fn assemble_report(inp: &BoundInputs) -> Result<BoundReport> {
    inp.validate()?;
    let etas = eta_constants(inp.alpha, inp.delta)?;
    let (regime, note) = Regime::classify(inp.alpha, inp.gamma)?;
    let rn = rate_rn(inp.alpha, inp.gamma, inp.sigma, inp.n, inp.b_integral, inp.b_sup_tail)?;
    let (q1, q2) = q_constants(inp, &etas);
    let c1_terms = const_c1_terms(inp, &etas)?;
    let c1 = c1_terms[0] + c1_terms[1];
    let (c2m_terms, c3m_terms) = if inp.m.is_some() {
        let c2 = nonuniform_terms(inp, &etas, NonUniform::C2)?;
        let c3 = if inp.delta == 0.0 {
            Some(nonuniform_terms(inp, &etas, NonUniform::C3)?)
        } else {
            None
        };
        (Some(c2), c3)
    } else {
        (None, None)
    };
    let c2m = c2m_terms.map(|t| t[0] + t[1]);
    let c3m = c3m_terms.map(|t| t[0] + t[1]);
    let nonuniform_bound = c2m.map(|c2| c3m.map_or(c2, |c3| c2.min(c3)) * rn);
    let mut warnings = etas.warnings.clone();
    let mut check = |name: &str, v: f64| {
        if !(v > 0.0 && v.is_finite()) {
            warnings.push(format!("{name} = {v} is not finite and positive"));
        }
    };
    check("c1", c1);
    check("Rn", rn);
    if let Some(c) = c2m {
        check("c2M", c);
    }
    if let Some(c) = c3m {
        check("c3M", c);
    }
    Ok(BoundReport {
        eta1: etas.eta1,
        eta2: etas.eta2,
        eta3: etas.eta3,
        eta4: etas.eta4,
        q1,
        q2,
        rn,
        c1,
        c2m,
        c3m,
        uniform_bound: c1 * rn,
        nonuniform_bound,
        regime,
        sigma: inp.sigma,
        d_alpha: inp.d_alpha,
        m: inp.m,
        n: inp.n,
        c1_terms,
        c2m_terms,
        c3m_terms,
        warnings,
        notes: note.into_iter().collect(),
    })
}

/// R_n just below, at and just above γ = 2 - α (the rate is not continuous there).
pub fn rn_boundary_audit(alpha: f64, sigma: f64, n: f64, eps: f64) -> Result<[f64; 3]> {
    let crit = 2.0 - alpha;
    Ok([
        rate_rn(alpha, crit - eps, sigma, n, None, None)?,
        rate_rn(alpha, crit, sigma, n, None, None)?,
        rate_rn(alpha, crit + eps, sigma, n, None, None)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attraction::pareto_preset;

    fn pareto_inputs(alpha: f64, n: f64, m: Option<f64>) -> BoundInputs {
        BoundInputs::from_law(&pareto_preset(alpha).unwrap(), n, m).unwrap()
    }

    #[test]
    fn symmetric_etas() {
        let e = eta_constants(1.5, 0.0).unwrap();
        // Γ(1/3)/π and Beta(4/3, 1/3)·4/π.
        assert!((e.eta1 - 0.852_732_620_076_194_3).abs() < 1e-12, "{}", e.eta1);
        assert!((e.eta2 - beta_fn(4.0 / 3.0, 1.0 / 3.0) * 4.0 / PI).abs() < 1e-12);
        assert!((e.eta2 - 3.374).abs() < 1e-3);
        let f = 4.0 * 1.5 + 2.0 * 1.5f64.powf(2.0 / 3.0) - 1.0;
        assert!((e.eta3 - f * e.eta1 / 0.5).abs() < 1e-12);
        assert!(e.warnings.is_empty());
    }

    #[test]
    fn eta4_is_skew_free() {
        let a = eta_constants(1.5, 0.0).unwrap().eta4;
        let b = eta_constants(1.5, 0.7).unwrap().eta4;
        assert_eq!(a, b);
    }

    #[test]
    fn signed_tangent_branches_are_flagged() {
        // At α = 1.3, δ tan(πα/2) ≈ -1.57 puts 1 + δt below 0 and 2 + δt above it.
        let e = eta_constants(1.3, 0.8).unwrap();
        assert!(!e.warnings.is_empty());
    }

    #[test]
    fn rates() {
        assert!((rate_rn(1.5, 2.0, 1.0, 1000.0, None, None).unwrap() - 0.1).abs() < 1e-15);
        let s = 1.845;
        let v = rate_rn(1.5, 0.5, s, 1e4, None, None).unwrap();
        assert!((v - 1e4f64.powf(-1.0 / 3.0) * (s * 1e4f64.powf(2.0 / 3.0)).ln()).abs() < 1e-14);
        let v = rate_rn(1.5, 0.25, s, 1e4, None, None).unwrap();
        assert!((v - 1e4f64.powf(-1.0 / 9.0)).abs() < 1e-14);
        assert!(matches!(rate_rn(1.5, 0.0, s, 1e4, None, None), Err(Error::MissingBData)));
        let r1 = rate_rn(1.5, 2.0, s, 500.0, None, None).unwrap();
        let r2 = rate_rn(1.5, 2.0, s, 1000.0, None, None).unwrap();
        assert!((r2 / r1 - 2f64.powf(1.0 - 2.0 / 1.5)).abs() < 1e-14);
    }

    #[test]
    fn boundary_tolerance() {
        let (r, note) = Regime::classify(1.5, 0.5 + 1e-13).unwrap();
        assert_eq!(r, Regime::Boundary);
        assert!(note.is_some());
        assert_eq!(Regime::classify(1.5, 0.5 + 1e-9).unwrap().0, Regime::Above);
        assert_eq!(Regime::classify(1.5, 0.0).unwrap().0, Regime::Zero);
        assert_eq!(Regime::classify(1.5, 0.2).unwrap().0, Regime::Between);
    }

    #[test]
    fn pareto_report() {
        let inp = pareto_inputs(1.5, 1000.0, Some(2.0));
        let r = assemble_report(&inp).unwrap();
        assert_eq!(r.regime, Regime::Above);
        assert!((r.rn - 0.1).abs() < 1e-15);
        assert_eq!(r.uniform_bound, r.c1 * r.rn);
        // Zero mean: the E|X||EX| term vanishes.
        assert!(inp.moments.mean.abs() < 1e-10);
        let c3 = r.c3m.unwrap();
        assert_eq!(r.nonuniform_bound.unwrap(), r.c2m.unwrap().min(c3) * r.rn);
        let json = serde_json::to_string(&r).unwrap();
        let keys = ["eta1", "eta2", "eta3", "eta4", "q1", "q2", "Rn", "c1", "c2M", "c3M", "uniform_bound", "nonuniform_bound", "regime"];
        let mut last = 0;
        for k in keys {
            let pos = json.find(&format!("\"{k}\":")).unwrap();
            assert!(pos >= last, "{k}");
            last = pos;
        }
    }

    #[test]
    fn c1_grows_with_l() {
        let mut inp = pareto_inputs(1.5, 100.0, None);
        let a = const_c1(&inp).unwrap();
        inp.l = 0.7;
        assert!(const_c1(&inp).unwrap() > a);
    }

    #[test]
    fn nonuniform_constants_decay_in_m() {
        let mut inp = pareto_inputs(1.5, 100.0, Some(4.0));
        let (c2, c3) = const_c2m_c3m(&inp).unwrap();
        inp.m = Some(4e6);
        let (d2, d3) = const_c2m_c3m(&inp).unwrap();
        assert!(d2 < c2 && d3.unwrap() < c3.unwrap());
        inp.m = Some(1e30);
        let (e2, e3) = const_c2m_c3m(&inp).unwrap();
        assert!(e2 < 1e-5 && e3.unwrap() < 1e-5);
        for k in 1..100 {
            let al = 1.0 + k as f64 / 100.0;
            let gap = (al * al - 1.0) / (al * al + 2.0 * al - 1.0) - 2.0 * (al - 1.0) / (3.0 * al - 1.0);
            let closed = (al - 1.0).powi(3) / ((al * al + 2.0 * al - 1.0) * (3.0 * al - 1.0));
            assert!(gap > 0.0 && (gap - closed).abs() < 1e-15);
        }
    }

    #[test]
    fn skewed_law_has_no_c3() {
        let law = AttractionLaw::power_tail(1.5, 0.5, 0.3, 0.1, 1.0).unwrap();
        let inp = BoundInputs::from_law(&law, 100.0, Some(2.0)).unwrap();
        let r = assemble_report(&inp).unwrap();
        assert!(r.c3m.is_none());
        assert!(serde_json::to_string(&r).unwrap().find("\"c3M\"").is_none());
        assert!(r.c1_terms[0] > 0.0);
    }
}
