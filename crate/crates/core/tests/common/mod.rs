#![allow(dead_code)]

pub mod oracle;

use stable_stein::attraction::{pareto_preset, AttractionLaw};
use stable_stein::bounds::{assemble_report, BoundInputs, BoundReport};

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

pub fn law_of(case: &oracle::Case) -> AttractionLaw {
    match case.kind {
        "pareto" => pareto_preset(case.args[0]).unwrap(),
        _ => {
            let a = case.args;
            AttractionLaw::power_tail(a[0], a[1], a[2], a[3], a[4]).unwrap()
        }
    }
}

pub fn report_of(case: &oracle::Case) -> BoundReport {
    let law = law_of(case);
    assemble_report(&BoundInputs::from_law(&law, case.n, Some(case.m)).unwrap()).unwrap()
}

/// Largest relative deviation from the oracle over every constant of one case, with its name.
pub fn worst_deviation(case: &oracle::Case) -> (f64, &'static str) {
    let law = law_of(case);
    let r = report_of(case);
    let mo = law.moments().unwrap();
    let mut pairs = vec![
        ("d_alpha", r.d_alpha, case.d_alpha),
        ("sigma", r.sigma, case.sigma),
        ("L", law.l(), case.l),
        ("abs_mean", mo.abs_mean, case.abs_mean),
        ("frac_centered", mo.frac_centered, case.frac_centered),
        ("eta1", r.eta1, case.eta1),
        ("eta2", r.eta2, case.eta2),
        ("eta3", r.eta3, case.eta3),
        ("eta4", r.eta4, case.eta4),
        ("q1", r.q1, case.q1),
        ("q2", r.q2, case.q2),
        ("Rn", r.rn, case.rn),
        ("c1", r.c1, case.c1),
        ("c2M", r.c2m.unwrap(), case.c2m),
    ];
    if let Some(c3) = case.c3m {
        pairs.push(("c3M", r.c3m.unwrap(), c3));
    }
    let mut worst = (rel(mo.mean, case.mean).min((mo.mean - case.mean).abs()), "mean");
    for (name, got, want) in pairs {
        let d = rel(got, want);
        if !(d <= worst.0) {
            worst = (d, name);
        }
    }
    worst
}
