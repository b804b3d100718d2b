//! Bound constants evaluated independently at 40 digits.

#[allow(dead_code)]
pub struct Case {
    pub kind: &'static str,
    pub args: &'static [f64],
    pub n: f64,
    pub m: f64,
    pub d_alpha: f64,
    pub sigma: f64,
    pub l: f64,
    pub mean: f64,
    pub abs_mean: f64,
    pub frac_centered: f64,
    pub eta1: f64,
    pub eta2: f64,
    pub eta3: f64,
    pub eta4: f64,
    pub q1: f64,
    pub q2: f64,
    pub rn: f64,
    pub c1: f64,
    pub c2m: f64,
    pub c3m: Option<f64>,
}

// Generated by tools/constants_oracle.py (mpmath, 40 digits).
pub const CASES: &[Case] = &[
    Case { kind: "pareto", args: &[1.2], n: 1000.0, m: 2.0, d_alpha: 0.66709885982449622671, sigma: 1.6311448893174308235, l: 0.5, mean: 0.0, abs_mean: 6.0000000000000011102, frac_centered: 3.0000000000000005551, eta1: 0.70872536519587174938, eta2: 5.7813780623181923671, eta3: 20.997112763946252817, eta4: 27.868421391162485922, q1: 2.171727156616451961, q2: 1.6362606033530296202, rn: 0.0099999999999999957394, c1: 840.20067330255154023, c2m: 685.70755946796213582, c3m: Some(909.42226461101416249) },
    Case { kind: "pareto", args: &[1.5], n: 1000.0, m: 4.0, d_alpha: 0.59841342060214901691, sigma: 1.8452701486440284191, l: 0.5, mean: 0.0, abs_mean: 3.0, frac_centered: 1.5, eta1: 0.85273262007619410489, eta2: 3.3740314771874145939, eta3: 12.9969095520137216, eta4: 13.759176844836833223, q1: 2.3082410383745299791, q2: 2.1803629925185224845, rn: 0.1, c1: 179.6829473170137094, c2m: 116.44496043091526005, c3m: Some(121.84668720671372796) },
    Case { kind: "pareto", args: &[1.8], n: 100.0, m: 2.0, d_alpha: 0.3298098776366053913, sigma: 2.5671388505363831696, l: 0.5, mean: 0.0, abs_mean: 2.2499999999999999306, frac_centered: 1.1249999999999999653, eta1: 1.0149723366482715889, eta2: 3.1073081869516006623, eta3: 12.14464960713359602, eta4: 10.640758743799678881, q1: 2.2973079423890445669, q2: 2.6219934754424539002, rn: 0.59948425031894109049, c1: 135.29552477110480239, c2m: 102.74451516417521077, c3m: Some(88.786747624190093494) },
    Case { kind: "power_tail", args: &[1.5, 0.5, 0.3, 0.2, 0.5], n: 1000.0, m: 2.0, d_alpha: 0.59841342060214901691, sigma: 1.8452701486440284191, l: 0.23623519685528871839, mean: 1.0075620250763270081, abs_mean: 3.3585400835877568181, frac_centered: 1.4462564299160655924, eta1: 0.50737590894533550377, eta2: 2.0961170552026813595, eta3: 7.7331611834481645254, eta4: 13.759176844836833223, q1: 3.0607980569690898337, q2: 1.7202805801139931405, rn: 0.52177958747912065292, c1: 146.70254130727614494, c2m: 89.05652822277163544, c3m: None },
    Case { kind: "power_tail", args: &[1.5, 0.5, 0.0, 0.2, 0.3], n: 1000.0, m: 4.0, d_alpha: 0.59841342060214901691, sigma: 1.8452701486440284191, l: 0.29117796615482468938, mean: 0.0, abs_mean: 3.4569981593260412899, frac_centered: 1.633091293147620643, eta1: 0.85273262007619410489, eta2: 3.3740314771874145939, eta3: 12.9969095520137216, eta4: 13.759176844836833223, q1: 1.9226317677839150173, q2: 1.8161167248237459846, rn: 0.37275937203149403606, c1: 257.26931955543932764, c2m: 174.58739682353261694, c3m: Some(182.56093238253735905) },
    Case { kind: "power_tail", args: &[1.6, 0.4, -0.4, -0.1, 0.9], n: 500.0, m: 3.0, d_alpha: 0.53495938186195001592, sigma: 1.7250660406034041874, l: 0.12710078699714263889, mean: -0.84886099548896270887, abs_mean: 2.1221524887224066544, frac_centered: 0.98655853933451560223, eta1: 1.3383802289344225915, eta2: 4.5926256397981589465, eta3: 18.392126070855837711, eta4: 12.320794071963031525, q1: 0.90451561014621526246, q2: 1.3502348174719332272, rn: 0.2114742526881129151, c1: 216.72211344011636159, c2m: 153.3713552172059222, c3m: None },
];
