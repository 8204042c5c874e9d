//! The twelve verification suites. Each one returns a [`CriterionReport`] listing its checks.
//!
//! A check is either a `Criterion` check, which is the statement being verified exactly as
//! posed, or a `Supporting` check, which exercises a corrected or auxiliary form. The verdict of
//! a suite is the conjunction of its criterion checks and its runtime budget.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analytic::{
    self, eisenstein, functional_equation_residual, gamma0_case, gamma0_klf_residual, gamma0_measured_constant,
    gamma0_printed_constant, gamma_c, klf_row, ko_mellin_ratio, ko_mellin_residual, siegel_logabs,
    whittaker_w00, whittaker_w00_scaled, FeForm, Gamma0Mode, MellinKernel, ResidueVector, SiegelConvention,
    UHPoint, GAMMA_C_RESIDUE,
};
use crate::boundary::{
    coordinate_change, cusp_image, gamma_params, ledger_check, torsion_order, CoordBasis, CoordChange,
    DivisorLedger, LatticeE, UnipotentParam,
};
use crate::hecke::{
    double_coset_consistent, eigenvalue_on_unramified_character, mab_representatives, pairwise_distinct,
    ramified_place, HeckeElement, TorusCharacter,
};
use crate::localzeta::{
    compare_series, ieta_series, lfactor_inert, lfactor_ramified, lfactor_split, pieri_identity_check,
    ramified_whittaker_integral, unipotent_measure, zeta_series_inert, zeta_series_split, SatakeData,
};
use crate::oracle::{lattice_sum_eisenstein, siegel_direct_product, whittaker_w00_integral};
use crate::quadfield::{
    is_norm, isotropic_in_complement, norm_witness_search, pairing, rat, xi_membership, Discriminant, FieldElem, Matrix3E,
    Rational,
};
use crate::symlaurent::{reconstruct, surplus_equations, LaurentPoly, PowerSeries, RatFunc};

type StepResult = Result<(), Box<dyn std::error::Error + Send + Sync>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SuiteConfig {
    /// Requested working precision in decimal digits (clamped to double precision).
    pub digits: u32,
    pub seed: u64,
    pub inert_order: usize,
    pub split_order: usize,
    pub ramified_order: usize,
    pub pieri_order: usize,
    pub levels: Vec<u64>,
    pub z_grid: Vec<(f64, f64)>,
    pub boundary_samples: usize,
    pub torsion_samples: usize,
    pub norm_samples: usize,
    pub witness_bound: i64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            digits: analytic::DEFAULT_DIGITS,
            seed: 42,
            inert_order: 20,
            split_order: 12,
            ramified_order: 20,
            pieri_order: 10,
            levels: vec![3, 5],
            z_grid: vec![(0.0, 1.0), (0.3, 0.8), (-0.25, 2.0)],
            boundary_samples: 100,
            torsion_samples: 50,
            norm_samples: 100,
            witness_bound: 40,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Role {
    Criterion,
    Supporting,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub role: Role,
    pub pass: bool,
    pub value: Option<f64>,
    pub tolerance: Option<f64>,
    pub detail: String,
}

/// One numeric residual, flattened for CSV output.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualRow {
    pub test: String,
    pub z: String,
    pub s: String,
    pub level: u64,
    pub w: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionReport {
    pub id: u32,
    pub key: &'static str,
    pub title: &'static str,
    pub pass: bool,
    pub elapsed_ms: f64,
    pub budget_ms: Option<f64>,
    pub checks: Vec<Check>,
    pub rows: Vec<ResidualRow>,
}

impl CriterionReport {
    pub fn supporting_ok(&self) -> bool {
        self.checks.iter().filter(|c| c.role == Role::Supporting).all(|c| c.pass)
    }

    pub fn failing(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

pub struct Suite {
    pub id: u32,
    pub key: &'static str,
    pub title: &'static str,
    pub budget: Option<Duration>,
    run: fn(&SuiteConfig, &mut Recorder) -> StepResult,
}

pub const SUITES: [Suite; 12] = [
    Suite { id: 1, key: "inert", title: "inert unramified identity", budget: Some(Duration::from_secs(1)), run: inert },
    Suite { id: 2, key: "split", title: "split unramified identity", budget: Some(Duration::from_secs(5)), run: split },
    Suite { id: 3, key: "ramified", title: "ramified identity", budget: Some(Duration::from_secs(1)), run: ramified },
    Suite { id: 4, key: "reconstruct", title: "rational reconstruction", budget: Some(Duration::from_secs(5)), run: rational_reconstruction },
    Suite { id: 5, key: "unipotent", title: "unipotent measure", budget: Some(Duration::from_secs(10)), run: unipotent },
    Suite { id: 6, key: "hecke", title: "Hecke cosets", budget: Some(Duration::from_secs(5)), run: hecke_cosets },
    Suite { id: 7, key: "klf", title: "Kronecker limit formula", budget: Some(Duration::from_secs(30)), run: klf },
    Suite { id: 8, key: "fe", title: "functional equation", budget: None, run: functional_equation },
    Suite { id: 9, key: "gamma0", title: "Gamma_0(N) limit formulae", budget: None, run: gamma0 },
    Suite { id: 10, key: "arch", title: "Mellin identity, W00 and Gamma_C", budget: None, run: archimedean },
    Suite { id: 11, key: "boundary", title: "boundary geometry", budget: Some(Duration::from_secs(5)), run: boundary },
    Suite { id: 12, key: "norms", title: "norm-group decisions", budget: Some(Duration::from_secs(10)), run: norms },
];

pub fn suite_by_key(key: &str) -> Option<&'static Suite> {
    SUITES.iter().find(|s| s.key == key || s.id.to_string() == key)
}

pub fn run_suite(suite: &Suite, cfg: &SuiteConfig) -> CriterionReport {
    let mut rec = Recorder::default();
    let start = Instant::now();
    if let Err(e) = (suite.run)(cfg, &mut rec) {
        rec.exact("evaluation completed", false, e.to_string());
    }
    let elapsed = start.elapsed();
    if let Some(budget) = suite.budget {
        rec.push(Check {
            name: "runtime within budget".into(),
            role: Role::Criterion,
            pass: elapsed <= budget,
            value: Some(elapsed.as_secs_f64()),
            tolerance: Some(budget.as_secs_f64()),
            detail: format!("{:.3} s of {:.0} s", elapsed.as_secs_f64(), budget.as_secs_f64()),
        });
    }
    let pass = rec.checks.iter().filter(|c| c.role == Role::Criterion).all(|c| c.pass);
    CriterionReport {
        id: suite.id,
        key: suite.key,
        title: suite.title,
        pass,
        elapsed_ms: elapsed.as_secs_f64() * 1e3,
        budget_ms: suite.budget.map(|b| b.as_secs_f64() * 1e3),
        checks: rec.checks,
        rows: rec.rows,
    }
}

/// Run every suite, optionally on a pool of worker threads; reports come back in suite order.
pub fn run_all(cfg: &SuiteConfig, jobs: usize) -> Vec<CriterionReport> {
    if jobs <= 1 {
        return SUITES.iter().map(|s| run_suite(s, cfg)).collect();
    }
    let next = std::sync::atomic::AtomicUsize::new(0);
    let mut out: Vec<Option<CriterionReport>> = vec![None; SUITES.len()];
    let results = std::sync::Mutex::new(&mut out);
    std::thread::scope(|scope| {
        for _ in 0..jobs.min(SUITES.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                if i >= SUITES.len() {
                    break;
                }
                let report = run_suite(&SUITES[i], cfg);
                results.lock().unwrap()[i] = Some(report);
            });
        }
    });
    out.into_iter().map(|r| r.expect("every suite ran")).collect()
}

#[derive(Default)]
pub struct Recorder {
    checks: Vec<Check>,
    rows: Vec<ResidualRow>,
}

impl Recorder {
    fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    fn exact(&mut self, name: &str, pass: bool, detail: impl Into<String>) {
        self.role_exact(name, Role::Criterion, pass, detail);
    }

    fn role_exact(&mut self, name: &str, role: Role, pass: bool, detail: impl Into<String>) {
        self.push(Check { name: name.into(), role, pass, value: None, tolerance: None, detail: detail.into() });
    }

    /// Records max(values) <= tol.
    fn bound(&mut self, name: &str, role: Role, values: &[f64], tol: f64, detail: impl Into<String>) {
        let worst = values.iter().cloned().fold(0.0f64, |a, b| if b.is_nan() || a.is_nan() { f64::NAN } else { a.max(b) });
        self.push(Check {
            name: name.into(),
            role,
            pass: !values.is_empty() && worst <= tol,
            value: Some(worst),
            tolerance: Some(tol),
            detail: detail.into(),
        });
    }

    fn row(&mut self, test: &str, z: &UHPoint, s: Complex64, rv: Option<&ResidueVector>, residual: f64, tol: f64) {
        self.rows.push(ResidualRow {
            test: test.into(),
            z: format!("{}{:+}i", z.x, z.y),
            s: if s.im == 0.0 { format!("{}", s.re) } else { format!("{}{:+}i", s.re, s.im) },
            level: rv.map_or(0, |r| r.level),
            w: rv.map_or(String::new(), |r| format!("({},{})", r.w.0, r.w.1)),
            residual,
            tolerance: tol,
            pass: residual <= tol,
        });
    }
}

fn series_detail(order: usize, first: Option<usize>) -> String {
    match first {
        None => format!("coefficients agree through X^{}", order - 1),
        Some(k) => format!("first difference at X^{k}"),
    }
}

fn inert(cfg: &SuiteConfig, rec: &mut Recorder) -> StepResult {
    let s = SatakeData::symbolic_inert().strict()?;
    let series = zeta_series_inert(&s, cfg.inert_order)?;
    let c = compare_series(&series, &lfactor_inert(&s)?)?;
    rec.exact("zeta series equals closed-form factor", c.equal, series_detail(c.order, c.first_difference));
    Ok(())
}

fn split(cfg: &SuiteConfig, rec: &mut Recorder) -> StepResult {
    let s = SatakeData::symbolic_split().strict()?;
    let series = zeta_series_split(&s, cfg.split_order)?;
    let c = compare_series(&series, &lfactor_split(&s)?)?;
    rec.exact("double sum equals degree-6 factor", c.equal, series_detail(c.order, c.first_difference));
    let n = cfg.pieri_order;
    rec.exact("Pieri identity", pieri_identity_check(n, n), format!("a, b <= {n}"));
    Ok(())
}

fn ramified(cfg: &SuiteConfig, rec: &mut Recorder) -> StepResult {
    let factor = lfactor_ramified();
    let c = compare_series(&ieta_series(cfg.ramified_order), &factor)?;
    rec.exact("series equals closed form", c.equal, series_detail(c.order, c.first_difference));
    let p = |s: &str| LaurentPoly::parse(s);
    let num = p("1 - b^2*X^2")?;
    let den = &(&p("1 - a*b*X")? * &p("1 - b*X")?) * &p("1 - a^-1*b*X")?;
    rec.exact("closed form is (1 - b^2 X^2) over the three linear factors", factor == RatFunc::new(num, den)?, factor.to_string());
    let d = ramified_whittaker_integral()?;
    rec.exact("shift X -> pX' reproduces the Whittaker integral", d.shift_matches, d.shifted.to_string());
    rec.exact("b -> b n1^2 reproduces the twisted factor", d.twist_matches, d.integral.to_string());
    Ok(())
}

fn rational_reconstruction(cfg: &SuiteConfig, rec: &mut Recorder) -> StepResult {
    let inert = SatakeData::symbolic_inert().strict()?;
    let split = SatakeData::symbolic_split().strict()?;
    let cases: [(&str, PowerSeries, RatFunc, usize, usize); 3] = [
        ("inert", zeta_series_inert(&inert, cfg.inert_order)?, lfactor_inert(&inert)?, 0, 6),
        ("split", zeta_series_split(&split, cfg.split_order)?, lfactor_split(&split)?, 0, 6),
        ("ramified", ieta_series(cfg.ramified_order), lfactor_ramified(), 2, 3),
    ];
    for (name, series, factor, num, den) in cases {
        let surplus = surplus_equations(series.order(), num, den);
        rec.exact(&format!("{name}: surplus equations >= 5"), surplus >= 5, format!("{surplus} surplus"));
        let back = reconstruct(&series, num, den)?;
        rec.exact(&format!("{name}: reconstruction recovers the factor"), back == factor, back.to_string());
    }
    Ok(())
}

fn unipotent(_cfg: &SuiteConfig, rec: &mut Recorder) -> StepResult {
    for p in [3u64, 5] {
        for a3 in 0..=4u32 {
            let got = unipotent_measure(a3, p, a3 + 2)?;
            let want = Rational::from_integer(BigInt::from(p).pow(a3));
            rec.exact(&format!("p = {p}, a3 = {a3}"), got == want, format!("measure {got}, expected {want}"));
        }
    }
    Ok(())
}

fn hecke_cosets(_cfg: &SuiteConfig, rec: &mut Recorder) -> StepResult {
    for p in [3u64, 7] {
        let disc = Discriminant::new(p)?;
        let reps = mab_representatives(p, disc)?;
        let expect = (p * p + 1) as usize;
        rec.exact(&format!("p = {p}: p^2+1 representatives"), reps.len() == expect, format!("{} representatives", reps.len()));
        let place = ramified_place(p, disc)?;
        rec.exact(&format!("p = {p}: pairwise distinct modulo K"), pairwise_distinct(&reps, &place)?, "");
        rec.exact(&format!("p = {p}: Smith valuations consistent"), double_coset_consistent(&reps, &place)?, "");
        let h = HeckeElement::basic(place)?;
        let trivial = TorusCharacter::trivial();
        let ev = eigenvalue_on_unramified_character(&h, &trivial)?;
        rec.exact(&format!("p = {p}: eigenvalue on trivial character"), ev == LaurentPoly::from_int(expect as i64), ev.to_string());
        let ev0 = eigenvalue_on_unramified_character(&h.minus_mass(), &trivial)?;
        rec.exact(&format!("p = {p}: T - mu annihilates"), ev0.is_zero(), ev0.to_string());
    }
    Ok(())
}

fn grid(cfg: &SuiteConfig) -> Result<Vec<UHPoint>, analytic::AnalyticError> {
    cfg.z_grid.iter().map(|&(x, y)| UHPoint::with_digits(x, y, cfg.digits)).collect()
}

fn residue_vectors(cfg: &SuiteConfig) -> Vec<ResidueVector> {
    cfg.levels.iter().flat_map(|&n| ResidueVector::all_nonzero(n)).collect()
}

const KLF_TOL: f64 = 1e-8;

fn klf(cfg: &SuiteConfig, rec: &mut Recorder) -> StepResult {
    let mut printed = Vec::new();
    let mut standard = Vec::new();
    let zero = Complex64::new(0.0, 0.0);
    for z in grid(cfg)? {
        for rv in residue_vectors(cfg) {
            let row = klf_row(&z, &rv)?;
            rec.row("klf_printed", &z, zero, Some(&rv), row.printed_residual, KLF_TOL);
            rec.row("klf_standard", &z, zero, Some(&rv), row.standard_residual, KLF_TOL);
            printed.push(row.printed_residual);
            standard.push(row.standard_residual);
        }
    }
    rec.bound("E(z,0) = log|g_w0(z)|, printed product", Role::Criterion, &printed, KLF_TOL, format!("{} points", printed.len()));
    rec.bound("E(z,0) = -2 log|g_w0(z)|, Kubert-Lang product", Role::Supporting, &standard, KLF_TOL, format!("{} points", standard.len()));
    let mut product = Vec::new();
    for z in grid(cfg)? {
        for (a, b) in [(0.2, 0.4), (0.75, -0.6), (0.0, 0.5)] {
            product.push((siegel_logabs(&z, a, b, SiegelConvention::Printed)? - siegel_direct_product(&z, a, b, 2000)).abs());
        }
    }
    rec.bound("Siegel product against direct multiplication", Role::Supporting, &product, 1e-12, "");
    Ok(())
}

const FE_TOL: f64 = 1e-10;
const ORACLE_TOL: f64 = 1e-12;

fn functional_equation(cfg: &SuiteConfig, rec: &mut Recorder) -> StepResult {
    let points = [Complex64::new(0.3, 0.0), Complex64::new(0.5, 0.0), Complex64::new(0.7, 0.2)];
    let mut printed = Vec::new();
    let mut normalized = Vec::new();
    let mut oracle = Vec::new();
    let oracle_s = 1.2;
    for z in grid(cfg)? {
        for rv in residue_vectors(cfg) {
            for &s in &points {
                let r = functional_equation_residual(&z, s, &rv, FeForm::Printed)?;
                rec.row("fe_printed", &z, s, Some(&rv), r, FE_TOL);
                printed.push(r);
                let r = functional_equation_residual(&z, s, &rv, FeForm::Normalized)?;
                rec.row("fe_normalized", &z, s, Some(&rv), r, FE_TOL);
                normalized.push(r);
            }
            let s = Complex64::new(oracle_s, 0.0);
            let e = eisenstein(&z, s, &rv)?;
            let r = (e.re - lattice_sum_eisenstein(&z, oracle_s, &rv)?).abs().max(e.im.abs());
            rec.row("lattice_sum_oracle", &z, s, Some(&rv), r, ORACLE_TOL);
            oracle.push(r);
        }
    }
    rec.bound("E(s) = Ê(1-s) as displayed", Role::Criterion, &printed, FE_TOL, "s in {0.3, 0.5, 0.7+0.2i}");
    rec.bound("theta integral against direct lattice sum at s = 1.2", Role::Criterion, &oracle, ORACLE_TOL, "");
    rec.bound("N^{2s} E(s) = Ê(1-s)", Role::Supporting, &normalized, FE_TOL, "s in {0.3, 0.5, 0.7+0.2i}");
    Ok(())
}

fn gamma0(cfg: &SuiteConfig, rec: &mut Recorder) -> StepResult {
    let z = UHPoint::with_digits(0.3, 0.8, cfg.digits)?;
    let (x2, y2) = (-0.25, 2.0);
    for level in [9u64, 6] {
        let r = gamma0_klf_residual(&z, level, Gamma0Mode::Difference { x2, y2 })?;
        rec.row("gamma0_difference", &z, Complex64::new(0.0, 0.0), None, r, KLF_TOL);
        rec.rows.last_mut().unwrap().level = level;
        rec.bound(&format!("N = {level}: difference mode"), Role::Criterion, &[r], KLF_TOL, format!("second point {x2}{y2:+}i"));
    }
    for level in [9u64, 6] {
        let case = gamma0_case(level)?;
        let r = gamma0_klf_residual(&z, level, Gamma0Mode::Absolute)?;
        rec.row("gamma0_absolute", &z, Complex64::new(0.0, 0.0), None, r, KLF_TOL);
        rec.rows.last_mut().unwrap().level = level;
        rec.bound(
            &format!("N = {level}: absolute mode"),
            Role::Criterion,
            &[r],
            KLF_TOL,
            format!("{case:?}, constant {:.15}", gamma0_printed_constant(case)),
        );
    }
    let measured = gamma0_measured_constant(&z)?;
    let printed = gamma0_printed_constant(gamma0_case(1)?);
    rec.push(Check {
        name: "N = 1: measured constant".into(),
        role: Role::Supporting,
        pass: (measured - printed).abs() <= KLF_TOL,
        value: Some(measured),
        tolerance: Some(KLF_TOL),
        detail: format!("measured {measured:.15}, gamma - log 4 pi = {printed:.15}"),
    });
    Ok(())
}

fn archimedean(_cfg: &SuiteConfig, rec: &mut Recorder) -> StepResult {
    let points = [1.0, 2.0, 3.5];
    let mut sqrt_b = Vec::new();
    let mut normalized = Vec::new();
    let mut spread = Vec::new();
    let mut ratios = Vec::new();
    for disc in [3u64, 4] {
        let b = analytic::default_b(disc);
        let mut rs = Vec::new();
        for &s in &points {
            let sc = Complex64::new(s, 0.0);
            sqrt_b.push(ko_mellin_residual(sc, b, MellinKernel::SqrtB)?);
            normalized.push(ko_mellin_residual(sc, b, MellinKernel::Normalized)?);
            rs.push(ko_mellin_ratio(sc, b, MellinKernel::TwoSqrtB)?);
        }
        spread.push(rs.iter().map(|r| (r - rs[0]).norm() / rs[0].norm()).fold(0.0, f64::max));
        ratios.push(format!("D = {disc}: {:.6}", rs[0].re));
    }
    rec.bound("Mellin identity with W00(sqrt(b) t)", Role::Criterion, &sqrt_b, 1e-6, "relative error, s in {1, 2, 3.5}, D in {3, 4}");
    rec.bound("Mellin identity with (b^2/4) t^4 K0(sqrt(b) t)", Role::Supporting, &normalized, 1e-6, "relative error");
    rec.bound("W00(2 sqrt(b) t) kernel differs by a constant", Role::Supporting, &spread, 1e-8, ratios.join(", "));

    let mut w_err = Vec::new();
    let ys = [0.05, 0.2, 1.0, 3.0, 10.0, 25.0, analytic::whittaker_point(3), analytic::whittaker_point(4)];
    for &y in &ys {
        let w = whittaker_w00(y)?.value;
        w_err.push((w - whittaker_w00_integral(y)?).abs() / w);
    }
    rec.bound("W00 against its integral representation", Role::Criterion, &w_err, 1e-10, "relative error");
    let mut asym = Vec::new();
    for y in [10.0, 100.0, 1e4] {
        asym.push((whittaker_w00_scaled(y)? - 1.0).abs() * 4.0 * y);
    }
    rec.bound("|W00(y) e^{y/2} - 1| <= 1/(4y)", Role::Supporting, &asym, 1.0, "");

    let residue_gap = |target: f64| -> Vec<f64> {
        (1..=6)
            .map(|k| {
                let s = 10f64.powi(-k);
                (gamma_c(Complex64::new(s, 0.0)) * s - target).norm()
            })
            .collect()
    };
    let monotone = |v: &[f64]| v.windows(2).all(|w| w[1] < w[0]);
    let gap1 = residue_gap(1.0);
    rec.push(Check {
        name: "|s Gamma_C(s) - 1| decreases to 0".into(),
        role: Role::Criterion,
        pass: monotone(&gap1) && gap1[5] < 1e-5,
        value: Some(gap1[5]),
        tolerance: Some(1e-5),
        detail: format!("{:?}", gap1),
    });
    let gap2 = residue_gap(GAMMA_C_RESIDUE);
    rec.push(Check {
        name: "|s Gamma_C(s) - 2| decreases to 0".into(),
        role: Role::Supporting,
        pass: monotone(&gap2) && gap2[5] < 1e-5,
        value: Some(gap2[5]),
        tolerance: Some(1e-5),
        detail: format!("{:?}", gap2),
    });
    Ok(())
}

fn small_rational(rng: &mut ChaCha8Rng, h: i64) -> Rational {
    rat(rng.gen_range(-h..=h), rng.gen_range(1..=h))
}

fn small_elem(rng: &mut ChaCha8Rng, h: i64, disc: Discriminant) -> FieldElem {
    FieldElem::new(small_rational(rng, h), small_rational(rng, h), disc)
}

fn nonzero_elem(rng: &mut ChaCha8Rng, h: i64, disc: Discriminant) -> FieldElem {
    loop {
        let x = small_elem(rng, h, disc);
        if !x.is_zero() {
            return x;
        }
    }
}

fn boundary(cfg: &SuiteConfig, rec: &mut Recorder) -> StepResult {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let discs = [Discriminant::new(3)?, Discriminant::new(4)?, Discriminant::new(7)?];

    let mut round_trip = 0;
    let mut cocycle = 0;
    for i in 0..cfg.boundary_samples {
        let disc = discs[i % discs.len()];
        let basis = CoordBasis::standard(disc);
        let g1 = UnipotentParam { r: small_rational(&mut rng, 9), s: small_elem(&mut rng, 9, disc) };
        let g2 = UnipotentParam { r: small_rational(&mut rng, 9), s: small_elem(&mut rng, 9, disc) };
        if gamma_params(&g1.matrix(), &basis)? == g1 {
            round_trip += 1;
        }
        let prod = gamma_params(&(&g1.matrix() * &g2.matrix()), &basis)?;
        if prod.s == &g1.s + &g2.s && prod.r == &g1.r + &g2.r + UnipotentParam::cocycle(&g1, &g2) {
            cocycle += 1;
        }
    }
    let n = cfg.boundary_samples;
    rec.exact("gamma_params round trip", round_trip == n, format!("{round_trip}/{n}"));
    rec.exact("gamma_params composition law", cocycle == n, format!("{cocycle}/{n}"));

    let mut cusp_ok = 0;
    for i in 0..n {
        let disc = discs[i % discs.len()];
        let (a, b) = (nonzero_elem(&mut rng, 9, disc), nonzero_elem(&mut rng, 9, disc));
        let w = [a.clone(), b.clone(), FieldElem::zero(disc)];
        let expected = -&(&FieldElem::delta(disc).inv().unwrap() * &(&a.conj() * &b.conj().inv().unwrap()));
        if cusp_image(&w, &CoordBasis::standard(disc))? == expected {
            cusp_ok += 1;
        }
    }
    rec.exact("cusp image of (a, b, 0) is -conj(a)/(delta conj(b))", cusp_ok == n, format!("{cusp_ok}/{n}"));

    let mut finite = 0;
    let mut invariant = 0;
    let m = cfg.torsion_samples;
    for i in 0..m {
        let disc = discs[i % discs.len()];
        let lattice = loop {
            let gens: Vec<FieldElem> = (0..3).map(|_| small_elem(&mut rng, 6, disc)).collect();
            let l = LatticeE::from_generators(&gens, disc);
            if l.rank() == 2 {
                break l;
            }
        };
        let u = small_elem(&mut rng, 12, disc);
        let order = torsion_order(&u, &lattice)?;
        if order.is_positive() && lattice.contains(&(&u * &FieldElem::from_rational(Rational::from_integer(order.clone()), disc)))? {
            finite += 1;
        }
        let a = nonzero_elem(&mut rng, 5, disc);
        let (u2, l2) = coordinate_change(&u, &lattice, &CoordChange::Rescale(a))?;
        if torsion_order(&u2, &l2)? == order {
            invariant += 1;
        }
    }
    rec.exact("torsion order finite and annihilating", finite == m, format!("{finite}/{m}"));
    rec.exact("torsion order invariant under rescaling", invariant == m, format!("{invariant}/{m}"));

    for (name, ledger, want_a, want_b) in ledger_fixtures() {
        let r = ledger_check(&ledger);
        rec.exact(
            &format!("ledger fixture: {name}"),
            r.ok_2a == want_a && r.ok_2b == want_b,
            format!("degrees {}, pushforward {}", r.ok_2a, r.ok_2b),
        );
    }
    Ok(())
}

/// Hand-built ledgers with the expected (degree-zero, pushforward-zero) verdicts.
pub fn ledger_fixtures() -> Vec<(&'static str, DivisorLedger, bool, bool)> {
    let empty = DivisorLedger::new();
    let mut single = DivisorLedger::new();
    single.add_entry("C", "P", 1);
    single.map_cusp("C", "P", "g");
    let mut pair = DivisorLedger::new();
    for (curve, cusp, m) in [("C1", "P", 1), ("C1", "Q", -1), ("C2", "P", -1), ("C2", "Q", 1)] {
        pair.add_entry(curve, cusp, m);
    }
    for (curve, cusp, g) in [("C1", "P", "g"), ("C2", "P", "g"), ("C1", "Q", "h"), ("C2", "Q", "h")] {
        pair.map_cusp(curve, cusp, g);
    }
    let mut unbalanced = DivisorLedger::new();
    for (curve, cusp, m) in [("C1", "P", 1), ("C1", "Q", -1), ("C2", "P", 1), ("C2", "Q", -1)] {
        unbalanced.add_entry(curve, cusp, m);
    }
    for (curve, cusp, g) in [("C1", "P", "g"), ("C2", "P", "g"), ("C1", "Q", "h"), ("C2", "Q", "h")] {
        unbalanced.map_cusp(curve, cusp, g);
    }
    let mut unmapped = DivisorLedger::new();
    unmapped.add_entry("C", "P", 1);
    unmapped.add_entry("C", "Q", -1);
    unmapped.map_cusp("C", "P", "g");
    vec![
        ("empty", empty, true, true),
        ("single cusp", single, false, false),
        ("opposite pair", pair, true, true),
        ("degree zero, pushforward nonzero", unbalanced, true, false),
        ("unmapped cusp", unmapped, true, false),
    ]
}

fn norms(cfg: &SuiteConfig, rec: &mut Recorder) -> StepResult {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(12));
    let mut contradictions = Vec::new();
    let mut stats: HashMap<u64, (usize, usize, usize)> = HashMap::new();
    for d in [3u64, 4, 7] {
        let disc = Discriminant::new(d)?;
        let entry = stats.entry(d).or_default();
        for _ in 0..cfg.norm_samples {
            let q = loop {
                let q = rat(rng.gen_range(-60..=60), rng.gen_range(1..=30));
                if !q.is_zero() {
                    break q;
                }
            };
            let decided = is_norm(&q, disc)?;
            let witness = norm_witness_search(&q, disc, cfg.witness_bound);
            if decided {
                entry.0 += 1;
            }
            if let Some(x) = &witness {
                entry.1 += 1;
                if !decided || x.norm() != q {
                    contradictions.push(format!("D = {d}, q = {q}, witness {x}"));
                }
            }
            if q.is_negative() && decided {
                contradictions.push(format!("D = {d}, q = {q} negative but accepted"));
            }
            // an actual norm must be accepted and, with small heights, found
            let x = nonzero_elem(&mut rng, 6, disc);
            let n = x.norm();
            if !is_norm(&n, disc)? {
                contradictions.push(format!("D = {d}, Nm({x}) = {n} rejected"));
            }
            if norm_witness_search(&n, disc, cfg.witness_bound).is_some() {
                entry.2 += 1;
            }
        }
    }
    let mut summary: Vec<String> = stats
        .iter()
        .map(|(d, (acc, found, found_norm))| format!("D = {d}: {acc} accepted, {found} witnessed, {found_norm} norms witnessed"))
        .collect();
    summary.sort();
    rec.exact("is_norm agrees with witness search", contradictions.is_empty(), if contradictions.is_empty() {
        summary.join("; ")
    } else {
        contradictions.join("; ")
    });
    // an isotropic vector orthogonal to w certifies that the line of w is in Xi
    let (mut certified, mut bad) = (0usize, Vec::new());
    for d in [4u64, 7] {
        let disc = Discriminant::new(d)?;
        let j = Matrix3E::hermitian_form(disc);
        for a in -3i64..=3 {
            for b in 1i64..=3 {
                let w = [
                    FieldElem::new(rat(a, 1), rat(b, 2), disc),
                    FieldElem::from_rational(rat(b, 1), disc),
                    FieldElem::one(disc),
                ];
                if !pairing(&w, &w, &j).a().is_positive() {
                    continue;
                }
                if isotropic_in_complement(&w, &j, 4)?.is_some() {
                    certified += 1;
                    if !xi_membership(&w, &j)? {
                        bad.push(format!("D = {d}, w = ({a} + {b}/2 delta, {b}, 1)"));
                    }
                }
            }
        }
    }
    rec.role_exact("isotropic complement implies Xi membership", Role::Supporting, bad.is_empty(), if bad.is_empty() {
        format!("{certified} lines certified by search")
    } else {
        bad.join("; ")
    });
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_resolve() {
        assert_eq!(suite_by_key("klf").unwrap().id, 7);
        assert_eq!(suite_by_key("12").unwrap().key, "norms");
        assert!(suite_by_key("nope").is_none());
    }

    #[test]
    fn ledger_fixture_verdicts() {
        for (name, ledger, a, b) in ledger_fixtures() {
            let r = ledger_check(&ledger);
            assert_eq!((r.ok_2a, r.ok_2b), (a, b), "{name}");
        }
    }

    #[test]
    fn quick_suites_pass() {
        let cfg = SuiteConfig::default();
        for key in ["ramified", "unipotent", "hecke", "boundary", "norms"] {
            let r = run_suite(suite_by_key(key).unwrap(), &cfg);
            assert!(r.pass, "{key}: {:?}", r.failing().collect::<Vec<_>>());
        }
    }
}
