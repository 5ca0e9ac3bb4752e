//! Check suites behind the command-line driver: surface pipelines on catalog
//! entries or grid files, convergence studies, and the superspace suite.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{AlgebraContext, AlgebraElement, Quaternion};
use crate::catalog::{builtin, load_grid, CatalogEntry, Evaluator};
use crate::error::{Error, Result};
use crate::gauss::{
    cmc_check, conformality_residual, gauss_data, hsl_residual, mean_curvature, special_lagrangian_check, GaussOptions,
    Immersion,
};
use crate::gridcalc::{GridDomain, GridMap};
use crate::lift::{
    beta_flatness_residual, flatness_residual, lift_condition_residual, lift_frame, lift_hopf, lift_hopf_octonion,
    rotor_frame,
};
use crate::report::{default_tolerance, Check, CheckKind, CurvePoint, GridInfo, Report, MIN_ORDER};
use crate::superspace::dpw::{exp_nilpotent, integrate, maurer_cartan_laurent, solve, Potential};
use crate::superspace::{
    lambda_laurent, op_d, op_dbar, phi_residual, sphere_defect, super_curvature, super_frame, vmax_abs, Grassmann, Jet,
    MapSign, Sample, SuperConnection, SuperExample, Superspace,
};

pub fn default_lambdas() -> Vec<Complex64> {
    vec![Complex64::from(1.0), Complex64::i(), Complex64::from_polar(1.0, PI / 5.0), Complex64::from(2.0)]
}

pub fn lambda_label(l: Complex64) -> String {
    if l.im == 0.0 {
        format!("{}", l.re)
    } else if l.re == 0.0 && l.im == 1.0 {
        "i".to_string()
    } else {
        format!("{:.4}{:+.4}i", l.re, l.im)
    }
}

#[derive(Debug, Clone)]
pub struct CheckOptions {
    pub grid: usize,
    /// Tolerance of exact checks.
    pub tol: f64,
    pub lambdas: Vec<Complex64>,
    /// Distinguished unit imaginary; defaults to `j` (ℍ) or `e1` (𝕆).
    pub u: Option<Vec<f64>>,
    pub seed: u64,
    pub conformal_tol: f64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            grid: 64,
            tol: default_tolerance(),
            lambdas: default_lambdas(),
            u: None,
            seed: 0,
            conformal_tol: GaussOptions::default().conformal_tol,
        }
    }
}

impl CheckOptions {
    fn context(&self, octonionic: bool) -> Result<AlgebraContext> {
        let dim = if octonionic { 8 } else { 4 };
        match &self.u {
            None if octonionic => Ok(AlgebraContext::octonionic()),
            None => Ok(AlgebraContext::quaternionic()),
            Some(u) => {
                let mut c = vec![0.0; dim];
                if u.len() == dim {
                    c.copy_from_slice(u);
                } else if u.len() == 3 && dim == 4 {
                    c[1..].copy_from_slice(u);
                } else {
                    return Err(Error::MixedAlgebra(dim, u.len()));
                }
                AlgebraContext::with_u(dim, AlgebraElement::from_slice(&c)?)
            }
        }
    }
}

#[derive(Debug, Clone)]
pub enum Subject {
    Catalog(Box<CatalogEntry>),
    File(PathBuf),
}

impl Subject {
    /// A catalog name, or else a path to a grid file.
    pub fn resolve(s: &str) -> Result<Self> {
        match builtin(s) {
            Ok(e) => Ok(Subject::Catalog(Box::new(e))),
            Err(err) => {
                let p = Path::new(s);
                if p.exists() {
                    Ok(Subject::File(p.to_path_buf()))
                } else {
                    Err(err)
                }
            }
        }
    }

    pub fn name(&self) -> String {
        match self {
            Subject::Catalog(e) => e.name.to_string(),
            Subject::File(p) => p.display().to_string(),
        }
    }

    /// Levels coarse to fine. A file yields itself and as many 2:1
    /// subsamplings as `count` asks for and the shape allows.
    fn levels(&self, grids: &[usize]) -> Result<Vec<Level>> {
        match self {
            Subject::Catalog(e) => grids
                .iter()
                .map(|&n| match e.evaluator {
                    Evaluator::Surface { .. } => e.immersion(n).map(|i| Level::Surface(Box::new(i))),
                    Evaluator::Rotor(_) => e.rotor(n).map(Level::Rotor),
                })
                .collect(),
            Subject::File(p) => {
                let mut out = vec![load_grid(p)?];
                while out.len() < grids.len() {
                    match coarsen_immersion(&out[0]) {
                        Some(c) => out.insert(0, c),
                        None => break,
                    }
                }
                Ok(out.into_iter().map(|i| Level::Surface(Box::new(i))).collect())
            }
        }
    }
}

enum Level {
    Surface(Box<Immersion>),
    Rotor(GridMap<Quaternion>),
}

impl Level {
    fn domain(&self) -> GridDomain {
        match self {
            Level::Surface(i) => i.x.domain,
            Level::Rotor(r) => r.domain,
        }
    }
}

/// Every other sample. Periodic axes need an even count, open axes an odd one.
pub fn coarsen<V: Clone>(m: &GridMap<V>) -> Option<GridMap<V>> {
    let d = m.domain;
    let half = |n: usize, periodic: bool| match (periodic, n % 2) {
        (true, 0) if n >= 6 => Some(n / 2),
        (false, 1) if n >= 5 => Some(n.div_ceil(2)),
        _ => None,
    };
    let nx = half(d.nx, d.periodic[0])?;
    let ny = half(d.ny, d.periodic[1])?;
    let dom = GridDomain::new(nx, ny, 2.0 * d.hx, 2.0 * d.hy, d.x0, d.y0, d.periodic).ok()?;
    let mut values = Vec::with_capacity(nx * ny);
    for i in 0..nx {
        for j in 0..ny {
            values.push(m.at(2 * i, 2 * j).clone());
        }
    }
    GridMap::from_values(dom, values).ok()
}

pub fn coarsen_immersion(imm: &Immersion) -> Option<Immersion> {
    let x = coarsen(&imm.x)?;
    match &imm.jets {
        Some((a, b)) => Immersion::with_jets(x, coarsen(a)?, coarsen(b)?).ok(),
        None => Immersion::new(x).ok(),
    }
}

/// Residuals measured on one level.
#[derive(Default)]
struct Measures {
    values: Vec<(String, CheckKind, f64, Option<Complex64>)>,
    properties: BTreeMap<String, serde_json::Value>,
}

impl Measures {
    fn push(&mut self, name: impl Into<String>, kind: CheckKind, v: f64) {
        self.values.push((name.into(), kind, v, None));
    }

    fn push_lambda(&mut self, name: &str, l: Complex64, v: f64) {
        self.values.push((format!("{name}@{}", lambda_label(l)), CheckKind::Order, v, Some(l)));
    }
}

fn measure_surface(imm: &Immersion, opts: &CheckOptions) -> Result<Measures> {
    let mut m = Measures::default();
    let algebraic = if imm.jets.is_some() { CheckKind::Exact } else { CheckKind::Order };
    let conf = conformality_residual(imm)?;
    if conf > opts.conformal_tol {
        return Err(Error::NotConformal(conf));
    }
    m.push("conformality", algebraic, conf);
    match imm.dim() {
        8 => {
            let ctx = opts.context(true)?;
            let b = lift_hopf_octonion(imm, &ctx)?;
            m.push("lift_condition/octonion_hopf", CheckKind::Order, lift_condition_residual(&b));
            for &l in &opts.lambdas {
                m.push_lambda("flatness/octonion_hopf", l, flatness_residual(&b, l)?);
            }
        }
        dim => {
            let gopts = GaussOptions { conformal_tol: opts.conformal_tol, ..GaussOptions::default() };
            let gd = gauss_data(imm, &gopts)?;
            m.push("defining_relation", CheckKind::Order, gd.defining_relation);
            let ctx = opts.context(false)?;
            if dim == 4 {
                m.push("lagrangian", algebraic, gd.lagrangian);
                m.properties.insert("lagrangian".into(), gd.is_lagrangian().into());
            } else {
                let c = cmc_check(imm, &gd)?;
                m.push("cmc/rho_plus_sigma", CheckKind::Exact, c.rho_plus_sigma);
                m.push("cmc/gauss_tension", CheckKind::Order, c.tension_sup);
                m.properties.insert("mean_curvature".into(), c.mean_curvature_mean.into());
                m.properties.insert("mean_curvature_spread".into(), c.mean_curvature_spread.into());
            }
            let frame = lift_frame(imm, &gd, &ctx, 0.0)?;
            m.push("lift_condition/frame", CheckKind::Order, lift_condition_residual(&frame));
            for &l in &opts.lambdas {
                m.push_lambda("flatness/frame", l, flatness_residual(&frame, l)?);
            }
            if dim == 4 && gd.is_lagrangian() {
                m.push("hsl/laplacian_beta", CheckKind::Order, hsl_residual(&gd)?.flat);
                m.push("mean_curvature_identity", CheckKind::Order, mean_curvature(imm, &gd)?.identity_residual);
                let sl = special_lagrangian_check(&gd, 1e-6)?;
                m.properties.insert("special_lagrangian".into(), sl.special.into());
                m.properties.insert("beta_deviation".into(), sl.deviation.into());
                let hopf = lift_hopf(imm, &gd, &ctx)?;
                m.push("lift_condition/hopf", CheckKind::Order, lift_condition_residual(&hopf));
                for &l in &opts.lambdas {
                    m.push_lambda("flatness/hopf", l, flatness_residual(&hopf, l)?);
                }
            }
        }
    }
    Ok(m)
}

fn measure_rotor(p: &GridMap<Quaternion>, opts: &CheckOptions) -> Result<Measures> {
    let mut m = Measures::default();
    let b = rotor_frame(p, &opts.context(false)?)?;
    for &l in &opts.lambdas {
        m.push_lambda("flatness/beta_lambda2", l, beta_flatness_residual(&b, l)?);
    }
    Ok(m)
}

/// Full report, plus the per-λ residual curves.
#[derive(Debug, Clone)]
pub struct Run {
    pub report: Report,
    pub curves: Vec<CurvePoint>,
}

fn grid_info(d: &GridDomain) -> GridInfo {
    GridInfo { nx: d.nx, ny: d.ny, h: d.h() }
}

fn run_levels(subject: &Subject, grids: &[usize], opts: &CheckOptions) -> Result<Run> {
    let levels = subject.levels(grids)?;
    let mut report = Report::new(subject.name(), opts.seed);
    report.lambda_samples = opts.lambdas.iter().map(|l| [l.re, l.im]).collect();
    report.grids = levels.iter().map(|l| grid_info(&l.domain())).collect();
    report.grid = report.grids.last().copied();
    let mut measured = Vec::new();
    for level in &levels {
        let h = level.domain().h();
        let m = match level {
            Level::Surface(imm) => measure_surface(imm, opts)?,
            Level::Rotor(p) => measure_rotor(p, opts)?,
        };
        measured.push((h, m));
    }
    let mut curves = Vec::new();
    let (_, finest) = measured.last().ok_or(Error::TooFewLevels(0))?;
    for (k, v) in &finest.properties {
        report.property(k.clone(), v.clone());
    }
    for (idx, (name, kind, value, lambda)) in finest.values.iter().enumerate() {
        let series: Vec<(f64, f64)> = measured
            .iter()
            .filter_map(|(h, m)| m.values.get(idx).filter(|v| v.0 == *name).map(|v| (*h, v.2)))
            .collect();
        if let Some(l) = lambda {
            for (h, r) in &series {
                curves.push(CurvePoint { check: name.clone(), lambda: [l.re, l.im], h: *h, residual: *r });
            }
        }
        let check = match kind {
            CheckKind::Exact => Check::exact(name.clone(), *value, opts.tol),
            CheckKind::LowerBound => Check::lower_bound(name.clone(), *value, opts.tol),
            CheckKind::Order if series.len() >= 2 => Check::order(name.clone(), series, MIN_ORDER)?,
            // a single level cannot establish an order
            CheckKind::Order => Check::exact(name.clone(), *value, opts.tol),
        };
        report.push(check);
    }
    curves.sort_by(|a, b| a.check.cmp(&b.check));
    Ok(Run { report: report.finish(), curves })
}

/// Pipeline at `opts.grid`, with orders estimated against half resolution.
pub fn check(subject: &Subject, opts: &CheckOptions) -> Result<Run> {
    let coarse = (opts.grid / 2).max(4);
    run_levels(subject, &[coarse, opts.grid], opts)
}

pub fn convergence(subject: &Subject, grids: &[usize], opts: &CheckOptions) -> Result<Run> {
    if grids.len() < 2 {
        return Err(Error::TooFewLevels(grids.len()));
    }
    let mut g = grids.to_vec();
    g.sort_unstable();
    g.dedup();
    if g.len() < 2 {
        return Err(Error::TooFewLevels(g.len()));
    }
    run_levels(subject, &g, opts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuperMode {
    Polynomial,
    Grid,
}

/// Jet order used by the polynomial-mode suite.
pub const SUPER_JET_ORDER: usize = 7;
/// Odd generators besides `θ¹, θ²`.
pub const SUPER_ETAS: usize = 4;
/// Tolerance of the exact superspace identities.
pub const SUPER_TOL: f64 = 1e-13;
/// Frame axis: the examples keep `Φ` orthogonal to `e₃`.
const FRAME_AXIS: usize = 2;

fn random_jet(rng: &mut ChaCha8Rng, order: usize, at: (f64, f64)) -> Jet {
    let c = (0..Jet::len_for(order))
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    Jet::from_coeffs(order, at, c)
}

fn random_superfield(ss: &Superspace<Jet>, rng: &mut ChaCha8Rng) -> Grassmann<Jet> {
    let mut f = ss.zero();
    for _ in 0..6 {
        let mask = rng.random_range(0..(1u32 << ss.g()));
        let t = Grassmann::term(ss.g(), mask, random_jet(rng, ss.template.order, ss.template.center))
            .expect("mask within budget");
        f = f.add(&t);
    }
    f
}

fn super_connection<C: Sample>(ss: &Superspace<C>, kind: SuperExample) -> Result<SuperConnection<C>> {
    let phi = kind.build(ss)?.assemble(ss)?;
    SuperConnection::from_frame(&super_frame(ss, &phi, FRAME_AXIS)?)
}

/// Exactness threshold used to classify a curvature component as vanishing.
const VANISH: f64 = 1e-8;

fn polynomial_suite(report: &mut Report, seed: u64, lambdas: &[Complex64]) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let at = (rng.random_range(-1.0..1.0), rng.random_range(-0.5..0.5));
    report.property("expansion_point", vec![at.0, at.1]);
    let ss = Superspace::new(SUPER_ETAS, Jet::constant_of(SUPER_JET_ORDER, Complex64::from(0.0)).at(at))?;

    let (mut dd, mut bb, mut mixed) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..8 {
        let f = random_superfield(&ss, &mut rng);
        let minus = Complex64::from(-1.0);
        dd = dd.max(op_d(&op_d(&f)?)?.max_diff(&f.d_dz()?.scale(minus)));
        bb = bb.max(op_dbar(&op_dbar(&f)?)?.max_diff(&f.d_dzbar()?.scale(minus)));
        mixed = mixed.max(op_d(&op_dbar(&f)?)?.add(&op_dbar(&op_d(&f)?)?).max_abs());
    }
    report.push(Check::exact("super/operators/d_squared", dd, SUPER_TOL));
    report.push(Check::exact("super/operators/dbar_squared", bb, SUPER_TOL));
    report.push(Check::exact("super/operators/anticommutator", mixed, SUPER_TOL));

    let mut mismatches = 0usize;
    for kind in SuperExample::ALL {
        let name = kind.name();
        let sf = kind.build(&ss)?;
        let ids = sf.component_identities(&ss)?;
        let worst = ids.iter().map(|(_, v)| *v).fold(0.0, f64::max);
        report.push(Check::exact(format!("super/components/{name}"), worst, SUPER_TOL));
        let phi = sf.assemble(&ss)?;
        report.push(Check::exact(format!("super/sphere/{name}"), sphere_defect(&ss, &phi), SUPER_TOL));
        let full = vmax_abs(&phi_residual(&phi)?);
        let comp = sf.residuals(MapSign::Plus)?.sup();
        if kind.is_superharmonic() {
            report.push(Check::exact(format!("super/equation/{name}"), full.max(comp), SUPER_TOL));
        } else {
            report.push(Check::lower_bound(format!("super/equation/{name}"), full.min(comp), 0.05));
        }
        if kind == SuperExample::Superharmonic {
            let minus = vmax_abs(&sf.residuals(MapSign::Minus)?.r_map);
            report.property("map_equation_minus_sign_residual", minus);
        }

        let a = super_connection(&ss, kind)?;
        let [m1, _, _] = lambda_laurent(&a, FRAME_AXIS)?;
        let expr = a.superharmonic_expression(FRAME_AXIS)?;
        report.push(Check::exact(format!("super/lambda_laurent/{name}"), m1.sub(&expr).max_abs(), SUPER_TOL));
        for &l in lambdas {
            let curv = super_curvature(&a.lambda_family(FRAME_AXIS, l)?)?;
            let db = curv.components[0].1.max_abs();
            let rest = curv.sups()[1..].iter().map(|(_, v)| *v).fold(0.0, f64::max);
            if (db < VANISH) != (rest < VANISH) {
                mismatches += 1;
            }
            let label = format!("super/lambda_family/{name}@{}", lambda_label(l));
            let sup = db.max(rest);
            if kind.is_superharmonic() || l == Complex64::from(1.0) {
                report.push(Check::exact(label, sup, 1e-10));
            } else {
                report.push(Check::lower_bound(label, db, 0.05));
            }
        }
    }
    report.push(Check::exact("super/curvature_coincidence", mismatches as f64, 0.0));

    let dpw_ss = Superspace::new(SUPER_ETAS, Complex64::from(0.0))?;
    let pot = Potential::seeded(3, rng.random())?;
    let a = pot.mu0_at(Complex64::from(0.0), Complex64::from(1.0));
    let a2 = a.mul(&a);
    let closed = Potential::constant_odd(dpw_ss.clone(), a)?;
    let z1 = Complex64::new(0.8, -0.6);
    let mut worst: f64 = 0.0;
    for &l in lambdas {
        let path = integrate(&closed, l, Complex64::from(0.0), z1, 40)?;
        let exact = exp_nilpotent(&dpw_ss, &a2.scale(-z1 / (l * l)))?;
        worst = worst.max(path[40].sub(&exact).max_abs());
    }
    report.push(Check::exact("super/dpw/closed_form", worst, 1e-8));
    let coeffs = maurer_cartan_laurent(&pot, Complex64::from(0.0), Complex64::new(0.5, 0.3), 64, 16)?;
    let below = coeffs.iter().filter(|(k, _)| *k < -2).map(|(_, v)| *v).fold(0.0, f64::max);
    let lead = coeffs.iter().find(|(k, _)| *k == -2).map(|(_, v)| *v).unwrap_or(0.0);
    report.push(Check::exact("super/dpw/laurent_below_minus2", below, 1e-9));
    report.push(Check::lower_bound("super/dpw/laurent_minus2", lead, 0.05));
    let lowest = coeffs.iter().find(|(_, v)| *v > 1e-9).map(|(k, _)| *k);
    report.property("dpw_lowest_degree", lowest);
    let levels = [20usize, 40, 80]
        .iter()
        .map(|&n| {
            let lam = Complex64::from_polar(1.0, 0.9);
            Ok((z1.norm() / n as f64, solve(&pot, lam, Complex64::from(0.0), z1, n)?.ode_residual))
        })
        .collect::<Result<Vec<_>>>()?;
    report.push(Check::order("super/dpw/ode_residual", levels, MIN_ORDER)?);
    Ok(())
}

fn grid_space(n: usize) -> Result<Superspace<GridMap<Complex64>>> {
    let d = GridDomain::rectangle(n, n + 1, 0.0, 2.0 * PI, -0.5, 1.0, [true, false])?;
    Superspace::new(2, GridMap::from_fn(d, |_, _| Complex64::from(0.0)))
}

fn grid_suite(report: &mut Report, grids: &[usize], curves: &mut Vec<CurvePoint>) -> Result<()> {
    let lambdas = [Complex64::i(), Complex64::from(2.0)];
    for kind in [SuperExample::Superharmonic, SuperExample::HarmonicMap] {
        let mut eq = Vec::new();
        let mut fam: Vec<Vec<(f64, f64)>> = vec![Vec::new(); lambdas.len()];
        for &n in grids {
            let ss = grid_space(n)?;
            let h = ss.template.domain.h();
            let sf = kind.build(&ss)?;
            eq.push((h, vmax_abs(&phi_residual(&sf.assemble(&ss)?)?).max(sf.residuals(MapSign::Plus)?.sup())));
            let a = super_connection(&ss, kind)?;
            for (k, &l) in lambdas.iter().enumerate() {
                let r = super_curvature(&a.lambda_family(FRAME_AXIS, l)?)?.sup();
                fam[k].push((h, r));
                let name = format!("super/grid/lambda_family/{}@{}", kind.name(), lambda_label(l));
                curves.push(CurvePoint { check: name, lambda: [l.re, l.im], h, residual: r });
            }
        }
        report.push(Check::order(format!("super/grid/equation/{}", kind.name()), eq, MIN_ORDER)?);
        for (k, &l) in lambdas.iter().enumerate() {
            let name = format!("super/grid/lambda_family/{}@{}", kind.name(), lambda_label(l));
            report.push(Check::order(name, fam[k].clone(), MIN_ORDER)?);
        }
    }
    let finest = *grids.iter().max().ok_or(Error::TooFewLevels(0))?;
    let ss = grid_space(finest)?;
    let r = SuperExample::SpinorCoupled.build(&ss)?.residuals(MapSign::Plus)?.sup();
    report.push(Check::lower_bound("super/grid/equation/spinor_coupled", r, 0.05));
    report.grids =
        grids.iter().map(|&n| grid_space(n).map(|s| grid_info(&s.template.domain))).collect::<Result<_>>()?;
    report.grid = report.grids.last().copied();
    Ok(())
}

pub fn run_super(mode: SuperMode, seed: u64, grids: &[usize]) -> Result<Run> {
    let lambdas = default_lambdas();
    let mut report = Report::new(
        match mode {
            SuperMode::Polynomial => "superspace/polynomial",
            SuperMode::Grid => "superspace/grid",
        },
        seed,
    );
    report.lambda_samples = lambdas.iter().map(|l| [l.re, l.im]).collect();
    let mut curves = Vec::new();
    match mode {
        SuperMode::Polynomial => polynomial_suite(&mut report, seed, &lambdas)?,
        SuperMode::Grid => {
            if grids.len() < 2 {
                return Err(Error::TooFewLevels(grids.len()));
            }
            grid_suite(&mut report, grids, &mut curves)?
        }
    }
    Ok(Run { report: report.finish(), curves })
}
