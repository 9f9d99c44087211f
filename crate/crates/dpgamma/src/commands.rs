//! The subcommands. Each one turns a target into report entries; failures
//! inside a target become entries with a message instead of aborting the run.

use std::fmt::Write as _;

use dpgamma_core::gamma::{
    chern_data, gamma_hypersurface_ambient, gamma_surface, gamma_wps, GammaError, TwistedSectors,
};
use dpgamma_core::gw::GwTable;
use dpgamma_core::jseries::{fit_growth, gamma_limit_report, CIModel, EvalOptions, JError};
use dpgamma_core::lattice::{exceptional_classes, orbit, DivClass};
use dpgamma_core::mirror::{
    bmodel_o_check, bottleneck_matching, builtin_potential, critical_points, mirror_spectrum_match,
    weighted_potential, wps_closed_form, BModelOReport, LaurentPoly, MirrorError,
};
use dpgamma_core::operator::{
    diagonal_entry, diagonal_table, off_diagonal_entry, operator_for, quantum_table, structural_checks,
    verify_conjecture_o, OperatorError, PfEvidence, StructuralReport,
};
use dpgamma_core::real::Real;
use dpgamma_core::spectra::{spectrum, SpectraError};
use dpgamma_core::SurfaceId;
use num_complex::Complex64;
use serde::Serialize;

use crate::config::RunConfig;
use crate::report::{exact, matrix, Approx, CDecimal, Cplx, Decimal, Entry, Interval, Report, Status};
use crate::{load_table, par_map, CliError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    VerifyO,
    Mirror,
    GammaLimit,
    Exceptional,
    Operator,
    GammaClass,
    ReportAll,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::VerifyO => "verify-o",
            Command::Mirror => "mirror",
            Command::GammaLimit => "gamma-limit",
            Command::Exceptional => "exceptional",
            Command::Operator => "operator",
            Command::GammaClass => "gamma-class",
            Command::ReportAll => "report-all",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Target {
    All,
    Surface(SurfaceId),
    /// Full weight vector of a weighted projective space.
    Weights(Vec<u32>),
}

impl Target {
    pub fn parse(target: Option<&str>, weights: Option<&[u32]>) -> Result<Target, CliError> {
        match (target, weights) {
            (Some(_), Some(_)) => Err(CliError::Usage("give either a target or --weights, not both".into())),
            (None, Some(w)) => Ok(Target::Weights(w.to_vec())),
            (None, None) => Ok(Target::All),
            (Some(t), None) if t.eq_ignore_ascii_case("all") => Ok(Target::All),
            (Some(t), None) => t.parse().map(Target::Surface).map_err(|e| CliError::Usage(format!("{e}"))),
        }
    }

    fn label(&self) -> String {
        match self {
            Target::All => "all".into(),
            Target::Surface(s) => s.to_string(),
            Target::Weights(w) => wps_name(w),
        }
    }
}

fn wps_name(w: &[u32]) -> String {
    let parts: Vec<String> = w.iter().map(|x| x.to_string()).collect();
    format!("P({})", parts.join(","))
}

/// Failure of one target: `Fail` for a mathematical check, `Error` for input
/// the command cannot handle.
type Outcome<T> = Result<(T, bool), (Status, String)>;

fn entry<T: Serialize>(target: String, o: Outcome<T>) -> Entry {
    match o {
        Ok((data, pass)) => Entry::ok(target, pass, &data),
        Err((status, msg)) => Entry::failed(target, status, msg),
    }
}

fn data_err(e: impl std::fmt::Display) -> (Status, String) {
    (Status::Error, e.to_string())
}

fn op_err(e: OperatorError) -> (Status, String) {
    let status = if matches!(e, OperatorError::Spectra(_)) { Status::Fail } else { Status::Error };
    (status, e.to_string())
}

fn mirror_err(e: MirrorError) -> (Status, String) {
    let status = match e {
        MirrorError::NotProper | MirrorError::IncompleteEnumeration { .. } | MirrorError::Spectra(_) => Status::Fail,
        _ => Status::Error,
    };
    (status, e.to_string())
}

/// Run one command against one target.
pub fn run(cmd: Command, target: &Target, cfg: &RunConfig) -> Result<Report, CliError> {
    cfg.validate()?;
    let table = load_table(cfg.gw_table_path.as_deref())?;
    let entries = match cmd {
        Command::VerifyO => {
            let ss = surfaces(cmd, target)?;
            par_map(&ss, |&s| entry(s.to_string(), verify_o(s, &table, cfg)))
        }
        Command::Operator => {
            let ss = surfaces(cmd, target)?;
            par_map(&ss, |&s| entry(s.to_string(), operator(s, &table)))
        }
        Command::Exceptional => {
            let ss = surfaces(cmd, target)?;
            ss.iter().map(|&s| entry(s.to_string(), exceptional(s))).collect()
        }
        Command::Mirror => match target {
            Target::Weights(w) => vec![entry(wps_name(w), mirror_weights(w, cfg))],
            Target::Surface(s) => vec![entry(s.to_string(), mirror_surface(*s, cfg))],
            Target::All => {
                let ss: Vec<SurfaceId> = SurfaceId::ALL.into_iter().filter(|s| s.is_toric()).collect();
                par_map(&ss, |&s| entry(s.to_string(), mirror_surface(s, cfg)))
            }
        },
        Command::GammaLimit => match target {
            Target::Weights(w) => vec![entry(wps_name(w), gamma_limit_weights(w, cfg))],
            Target::Surface(s) => vec![entry(s.to_string(), gamma_limit_surface(*s, &table, cfg))],
            Target::All => {
                let ss: Vec<SurfaceId> = SurfaceId::ALL.into_iter().filter(|&s| CIModel::for_surface(s).is_ok()).collect();
                par_map(&ss, |&s| entry(s.to_string(), gamma_limit_surface(s, &table, cfg)))
            }
        },
        Command::GammaClass => match target {
            Target::Weights(w) => vec![entry(wps_name(w), gamma_class_weights(w, cfg))],
            _ => {
                let ss = surfaces(cmd, target)?;
                ss.iter().map(|&s| entry(s.to_string(), gamma_class_surface(s, cfg))).collect()
            }
        },
        Command::ReportAll => {
            if *target != Target::All {
                return Err(CliError::Usage("report-all takes no target".into()));
            }
            report_all(&table, cfg)
        }
    };
    Ok(Report::new(cmd.name(), &target.label(), cfg, entries))
}

fn surfaces(cmd: Command, target: &Target) -> Result<Vec<SurfaceId>, CliError> {
    match target {
        Target::All => Ok(SurfaceId::ALL.to_vec()),
        Target::Surface(s) => Ok(vec![*s]),
        Target::Weights(_) => Err(CliError::Usage(format!("{} does not take --weights", cmd.name()))),
    }
}

#[derive(Serialize)]
struct EigenvalueOut {
    re: f64,
    im: f64,
    multiplicity: usize,
    abs_error: f64,
    interval: Option<Interval>,
}

#[derive(Serialize)]
struct SpectrumOut {
    rho: Approx,
    eigenvalues: Vec<EigenvalueOut>,
}

#[derive(Serialize)]
struct CertificateOut {
    holds: bool,
    rho: f64,
    rho_is_eigenvalue: bool,
    rho_simple: bool,
    fano_index: u32,
    part2_holds: bool,
    modulus_rho_eigenvalues: Vec<Cplx>,
    tol: f64,
}

#[derive(Serialize)]
struct ConjugationOut {
    a: String,
    b: String,
    c: String,
    matrix: Vec<Vec<String>>,
    column_sums_positive: bool,
    square_positive: bool,
}

#[derive(Serialize)]
struct PfOut {
    kind: &'static str,
    holds: bool,
    column_sums_positive: Option<bool>,
    k: Option<u32>,
    primitive_row: Option<usize>,
    conjugation: Option<ConjugationOut>,
}

#[derive(Serialize)]
struct StructuralOut {
    all: bool,
    column_sums_positive: bool,
    row2_nonnegative: bool,
    square_nonnegative: bool,
    square_rows_positive: bool,
    square_dominance: bool,
    square_exceeds_diagonal: bool,
    row_offsets_positive: Option<bool>,
}

impl From<&StructuralReport> for StructuralOut {
    fn from(s: &StructuralReport) -> Self {
        StructuralOut {
            all: s.all(),
            column_sums_positive: s.column_sums_positive,
            row2_nonnegative: s.row2_nonnegative,
            square_nonnegative: s.square_nonnegative,
            square_rows_positive: s.square_rows_positive,
            square_dominance: s.square_dominance,
            square_exceeds_diagonal: s.square_exceeds_diagonal,
            row_offsets_positive: s.row_offsets_positive,
        }
    }
}

#[derive(Serialize)]
struct VerifyOOut {
    surface: String,
    source: &'static str,
    basis: Vec<String>,
    matrix: Vec<Vec<String>>,
    char_poly: String,
    spectrum: SpectrumOut,
    certificate: CertificateOut,
    pf: PfOut,
    primitive_row: Option<usize>,
    structural: Option<StructuralOut>,
    c1_multiplicity: Option<String>,
}

fn verify_o(s: SurfaceId, table: &GwTable, cfg: &RunConfig) -> Outcome<VerifyOOut> {
    let rep = verify_conjecture_o(s, Some(table), cfg.tolerance).map_err(op_err)?;
    let spec = spectrum(&rep.matrix, cfg.tolerance).map_err(|e| (Status::Fail, e.to_string()))?;
    let top_err = spec.eigenvalues.first().map_or(0.0, |e| e.error_bound);
    let pf = match &rep.evidence {
        PfEvidence::Direct(w) => PfOut {
            kind: "direct",
            holds: rep.evidence.holds(),
            column_sums_positive: Some(w.column_sums_positive),
            k: w.k,
            primitive_row: w.primitive_row,
            conjugation: None,
        },
        PfEvidence::Conjugated(w) => PfOut {
            kind: "conjugated",
            holds: rep.evidence.holds(),
            column_sums_positive: w.as_ref().map(|w| w.checks.gpf.column_sums_positive),
            k: w.as_ref().and_then(|w| w.checks.gpf.k),
            primitive_row: w.as_ref().and_then(|w| w.checks.gpf.primitive_row),
            conjugation: w.as_ref().map(|w| ConjugationOut {
                a: exact(&w.a),
                b: exact(&w.b),
                c: exact(&w.c),
                matrix: matrix(&w.conjugated),
                column_sums_positive: w.checks.column_sums_positive,
                square_positive: w.checks.square_positive,
            }),
        },
    };
    let c = &rep.certificate;
    let out = VerifyOOut {
        surface: s.to_string(),
        source: rep.source,
        basis: rep.basis.clone(),
        matrix: matrix(&rep.matrix),
        char_poly: spec.char_poly.to_string(),
        spectrum: SpectrumOut {
            rho: Approx { value: spec.rho, abs_error: top_err },
            eigenvalues: spec
                .eigenvalues
                .iter()
                .map(|e| EigenvalueOut {
                    re: e.re,
                    im: e.im,
                    multiplicity: e.multiplicity,
                    abs_error: e.error_bound,
                    interval: e.interval.as_ref().map(Interval::from),
                })
                .collect(),
        },
        certificate: CertificateOut {
            holds: c.holds,
            rho: c.rho,
            rho_is_eigenvalue: c.rho_is_eigenvalue,
            rho_simple: c.rho_simple,
            fano_index: c.fano_index,
            part2_holds: c.part2_holds,
            modulus_rho_eigenvalues: c.modulus_rho_eigenvalues.iter().map(|&z| z.into()).collect(),
            tol: c.tol,
        },
        pf,
        primitive_row: rep.primitive_row,
        structural: rep.structural.as_ref().map(StructuralOut::from),
        c1_multiplicity: rep.c1_multiplicity.as_ref().map(exact),
    };
    Ok((out, rep.holds()))
}

#[derive(Serialize)]
struct QuantumTableOut {
    standard_basis: Vec<String>,
    standard: Vec<Vec<String>>,
    preferred_basis: Vec<String>,
    change_of_basis: Vec<Vec<String>>,
    preferred: Vec<Vec<String>>,
}

#[derive(Serialize)]
struct OperatorOut {
    surface: String,
    source: &'static str,
    basis: Vec<String>,
    matrix: Vec<Vec<String>>,
    char_poly: String,
    trace: String,
    diagonal_entry: Option<String>,
    diagonal_expected: Option<i64>,
    off_diagonal_vanish: Option<bool>,
    structural: Option<StructuralOut>,
    quantum_table: Option<QuantumTableOut>,
}

fn operator(s: SurfaceId, table: &GwTable) -> Outcome<OperatorOut> {
    let (m, source) = operator_for(s, Some(table)).map_err(op_err)?;
    let r = s.blowup_rank().unwrap_or(0);
    let mut pass = true;
    let (diag, expected, off) = if r >= 4 {
        let d = diagonal_entry(r).map_err(op_err)?;
        let want = diagonal_table(r);
        pass &= want.is_some_and(|w| d == dpgamma_core::linalg::int(w));
        let mut zero = true;
        for i in 1..=r as usize {
            for j in 1..=r as usize {
                if i != j {
                    zero &= off_diagonal_entry(r, i, j).map_err(op_err)?.numer() == &0.into();
                }
            }
        }
        pass &= zero;
        (Some(exact(&d)), want, Some(zero))
    } else {
        (None, None, None)
    };
    let structural = (r >= 3).then(|| structural_checks(&m, r));
    pass &= structural.as_ref().map_or(true, |s| s.all());
    let out = OperatorOut {
        surface: s.to_string(),
        source,
        basis: dpgamma_core::operator::basis_labels(s),
        char_poly: dpgamma_core::linalg::char_poly(&m).to_string(),
        trace: exact(&m.trace()),
        matrix: matrix(&m),
        diagonal_entry: diag,
        diagonal_expected: expected,
        off_diagonal_vanish: off,
        structural: structural.as_ref().map(StructuralOut::from),
        quantum_table: quantum_table(s).map(|q| QuantumTableOut {
            standard_basis: q.standard_basis.clone(),
            standard: matrix(&q.standard),
            preferred_basis: q.preferred_basis.clone(),
            change_of_basis: matrix(&q.change_of_basis),
            preferred: matrix(&q.preferred()),
        }),
    };
    Ok((out, pass))
}

#[derive(Serialize)]
struct ClassOut {
    class: String,
    coefficients: Vec<i32>,
}

#[derive(Serialize)]
struct ExceptionalOut {
    surface: String,
    r: Option<u8>,
    count: usize,
    classes: Vec<ClassOut>,
    all_minus_one_curves: bool,
    /// Whether the orbit of `E1` under the Cremona involution and the swaps
    /// is the whole list (`r >= 3`).
    orbit_of_e1_complete: Option<bool>,
}

fn exceptional(s: SurfaceId) -> Outcome<ExceptionalOut> {
    let r = s.blowup_rank();
    let classes = match r {
        Some(r) if r >= 1 => exceptional_classes(r),
        _ => Vec::new(),
    };
    let minus_one = classes.iter().all(|c| c.self_intersection() == -1 && c.degree() == 1);
    let orbit_ok = r.filter(|&r| r >= 3).map(|r| orbit(&DivClass::e(r, 1)) == classes);
    let out = ExceptionalOut {
        surface: s.to_string(),
        r,
        count: classes.len(),
        classes: classes.iter().map(|c| ClassOut { class: c.to_string(), coefficients: c.coeffs().to_vec() }).collect(),
        all_minus_one_curves: minus_one,
        orbit_of_e1_complete: orbit_ok,
    };
    let pass = minus_one && orbit_ok.unwrap_or(true);
    Ok((out, pass))
}

#[derive(Serialize)]
struct TermOut {
    exponent: Vec<i32>,
    coefficient: f64,
}

fn potential(f: &LaurentPoly) -> Vec<TermOut> {
    f.terms().iter().map(|(b, c)| TermOut { exponent: b.clone(), coefficient: *c }).collect()
}

#[derive(Serialize)]
struct BModelOut {
    holds: bool,
    t_con: Decimal,
    z_con: Vec<Decimal>,
    gradient_norm: f64,
    hessian_positive: bool,
    conifold_certified: bool,
    critical_values: Vec<Cplx>,
    bounded_by_t_con: bool,
    unique_at_t_con: bool,
    complete: bool,
}

/// Digits the conifold point is computed to.
const CONIFOLD_DIGITS: u32 = 40;

fn bmodel_out(b: &BModelOReport) -> BModelOut {
    let d = CONIFOLD_DIGITS - 5;
    BModelOut {
        holds: b.holds(),
        t_con: Decimal::new(&b.conifold.t_con, d),
        z_con: b.conifold.z_con.iter().map(|x| Decimal::new(x, d)).collect(),
        gradient_norm: b.conifold.gradient_norm,
        hessian_positive: b.conifold.hessian_positive,
        conifold_certified: b.conifold.certified,
        critical_values: b.critical_values.iter().map(|&z| z.into()).collect(),
        bounded_by_t_con: b.cond1,
        unique_at_t_con: b.cond2,
        complete: b.complete,
    }
}

#[derive(Serialize)]
struct SpectrumMatchOut {
    matched: bool,
    max_deviation: Option<f64>,
    tol: f64,
    eigenvalues: Vec<Cplx>,
    critical_values: Vec<Cplx>,
    permutation: Vec<usize>,
}

#[derive(Serialize)]
struct MirrorSurfaceOut {
    surface: String,
    potential: Vec<TermOut>,
    bmodel: BModelOut,
    spectrum_match: SpectrumMatchOut,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

fn mirror_surface(s: SurfaceId, cfg: &RunConfig) -> Outcome<MirrorSurfaceOut> {
    let f = builtin_potential(s).map_err(mirror_err)?;
    let b = bmodel_o_check(&f, cfg.seed, cfg.tolerance).map_err(mirror_err)?;
    let m = mirror_spectrum_match(s, cfg.seed, cfg.tolerance).map_err(mirror_err)?;
    let pass = b.holds() && b.complete && m.matched;
    let out = MirrorSurfaceOut {
        surface: s.to_string(),
        potential: potential(&f),
        bmodel: bmodel_out(&b),
        spectrum_match: SpectrumMatchOut {
            matched: m.matched,
            max_deviation: finite(m.max_deviation),
            tol: cfg.tolerance,
            eigenvalues: m.eigenvalues.iter().map(|&z| z.into()).collect(),
            critical_values: m.critical_values.iter().map(|&z| z.into()).collect(),
            permutation: m.permutation,
        },
    };
    Ok((out, pass))
}

#[derive(Serialize)]
struct ClosedFormOut {
    index: u32,
    c: Decimal,
    points: Vec<Vec<CDecimal>>,
    values: Vec<CDecimal>,
}

#[derive(Serialize)]
struct AgreementOut {
    agrees: bool,
    max_value_deviation: Option<f64>,
    max_point_deviation: Option<f64>,
    tol: f64,
}

#[derive(Serialize)]
struct MirrorWeightsOut {
    weights: Vec<u32>,
    potential: Vec<TermOut>,
    bmodel: BModelOut,
    closed_form: ClosedFormOut,
    agreement: AgreementOut,
}

fn mirror_weights(w: &[u32], cfg: &RunConfig) -> Outcome<MirrorWeightsOut> {
    let f = weighted_potential(w).map_err(mirror_err)?;
    let cf = wps_closed_form(w, cfg.precision_digits).map_err(mirror_err)?;
    let b = bmodel_o_check(&f, cfg.seed, cfg.tolerance).map_err(mirror_err)?;
    let pts = critical_points(&f, cfg.seed, cfg.tolerance * 1e-3).map_err(mirror_err)?;
    let c64 = |re: &Real, im: &Real| Complex64::new(re.to_f64(), im.to_f64());
    let closed: Vec<Complex64> = cf.values.iter().map(|z| c64(&z.re, &z.im)).collect();
    let found: Vec<Complex64> = pts.iter().map(|p| p.value).collect();
    let (value_dev, point_dev) = match bottleneck_matching(&found, &closed) {
        Some((perm, d)) => {
            let mut pd = 0.0f64;
            for (i, p) in pts.iter().enumerate() {
                for (a, q) in p.z.iter().zip(&cf.points[perm[i]]) {
                    pd = pd.max((a - c64(&q.re, &q.im)).norm());
                }
            }
            (d, pd)
        }
        None => (f64::INFINITY, f64::INFINITY),
    };
    let agrees = value_dev <= cfg.tolerance && point_dev <= cfg.tolerance;
    let digits = cfg.precision_digits - 5;
    let out = MirrorWeightsOut {
        weights: w.to_vec(),
        potential: potential(&f),
        bmodel: bmodel_out(&b),
        closed_form: ClosedFormOut {
            index: cf.index,
            c: Decimal::new(&cf.c, digits),
            points: cf.points.iter().map(|p| p.iter().map(|z| CDecimal::new(z, digits)).collect()).collect(),
            values: cf.values.iter().map(|z| CDecimal::new(z, digits)).collect(),
        },
        agreement: AgreementOut {
            agrees,
            max_value_deviation: finite(value_dev),
            max_point_deviation: finite(point_dev),
            tol: cfg.tolerance,
        },
    };
    Ok((out, b.holds() && b.complete && agrees))
}

#[derive(Serialize)]
struct PointOut {
    t: f64,
    terms: usize,
    dispersion: f64,
    ratios: Vec<f64>,
    log_scalar: f64,
}

#[derive(Serialize)]
struct GridFailure {
    t: f64,
    message: String,
}

#[derive(Serialize)]
struct GammaLimitOut {
    model: String,
    /// Factors of the ambient space and the multidegrees of its equations.
    ambient: Vec<String>,
    equations: Vec<Vec<u32>>,
    rho: f64,
    rho_source: &'static str,
    digits: u32,
    max_terms: usize,
    components: Vec<String>,
    gamma: Vec<f64>,
    points: Vec<PointOut>,
    failures: Vec<GridFailure>,
    monotone: bool,
    floor: f64,
    final_dispersion: Option<f64>,
    threshold: f64,
    /// Least-squares exponential rate of the scalar pairing over the grid.
    growth_fit: Option<f64>,
}

fn j_err(e: JError) -> (Status, String) {
    let status = match e {
        JError::UnsupportedModel(_) | JError::BadGrid => Status::Error,
        _ => Status::Fail,
    };
    (status, e.to_string())
}

fn eval_options(cfg: &RunConfig) -> EvalOptions {
    EvalOptions { digits: cfg.precision_digits, guard_digits: cfg.precision_digits, max_terms: cfg.max_terms }
}

fn gamma_limit(model: &CIModel, rho: f64, rho_source: &'static str, cfg: &RunConfig) -> Outcome<GammaLimitOut> {
    let rep = gamma_limit_report(model, rho, &cfg.t_grid, &eval_options(cfg)).map_err(j_err)?;
    let samples: Vec<(f64, f64)> = rep.points.iter().map(|p| (p.t, p.log_scalar)).collect();
    let out = GammaLimitOut {
        model: rep.target.clone(),
        ambient: model.factors.iter().map(|w| wps_name(w)).collect(),
        equations: model.rows.clone(),
        rho,
        rho_source,
        digits: cfg.precision_digits,
        max_terms: cfg.max_terms,
        components: rep.components.clone(),
        gamma: rep.gamma.clone(),
        points: rep
            .points
            .iter()
            .map(|p| PointOut {
                t: p.t,
                terms: p.terms,
                dispersion: p.dispersion,
                ratios: p.ratios.clone(),
                log_scalar: p.log_scalar,
            })
            .collect(),
        failures: rep.failures.iter().map(|(t, m)| GridFailure { t: *t, message: m.clone() }).collect(),
        monotone: rep.monotone,
        floor: rep.floor,
        final_dispersion: finite(rep.final_dispersion),
        threshold: rep.threshold,
        growth_fit: fit_growth(&samples),
    };
    Ok((out, rep.passes()))
}

pub fn spectral_radius(s: SurfaceId, table: &GwTable) -> Result<f64, (Status, String)> {
    let (m, _) = operator_for(s, Some(table)).map_err(op_err)?;
    spectrum(&m, 1e-12).map(|r| r.rho).map_err(|e: SpectraError| (Status::Fail, e.to_string()))
}

fn gamma_limit_surface(s: SurfaceId, table: &GwTable, cfg: &RunConfig) -> Outcome<GammaLimitOut> {
    let model = CIModel::for_surface(s).map_err(j_err)?;
    let rho = spectral_radius(s, table)?;
    gamma_limit(&model, rho, "spectral radius of c1*", cfg)
}

fn gamma_limit_weights(w: &[u32], cfg: &RunConfig) -> Outcome<GammaLimitOut> {
    let model = CIModel::weighted_ambient(w).map_err(j_err)?;
    let cf = wps_closed_form(w, 30).map_err(mirror_err)?;
    gamma_limit(&model, cf.c.to_f64(), "conifold value of the mirror", cfg)
}

#[derive(Serialize)]
struct ChernOut {
    c1_squared: i64,
    c2: i64,
    ch2: String,
}

#[derive(Serialize)]
struct CoefficientOut {
    class: String,
    value: Decimal,
}

#[derive(Serialize)]
struct RestrictionOut {
    weights: Vec<u32>,
    degree: u32,
    /// `h^2` on the surface as a multiple of the point class.
    h2: String,
    max_deviation: f64,
    threshold: f64,
    agrees: bool,
}

#[derive(Serialize)]
struct GammaSurfaceOut {
    surface: String,
    chern: ChernOut,
    c1_coefficient: Decimal,
    pt_coefficient: Decimal,
    coefficients: Vec<CoefficientOut>,
    c1_coefficient_is_minus_euler: bool,
    ambient_restriction: Option<RestrictionOut>,
}

/// Surfaces cut out of a weighted projective space by one equation.
fn hypersurface_model(s: SurfaceId) -> Option<(&'static [u32], u32)> {
    match s {
        SurfaceId::P2 => Some((&[1, 1, 1], 0)),
        SurfaceId::X(6) => Some((&[1, 1, 1, 1], 3)),
        SurfaceId::X(7) => Some((&[1, 1, 1, 2], 4)),
        SurfaceId::X(8) => Some((&[1, 1, 2, 3], 6)),
        _ => None,
    }
}

fn agreement_threshold(digits: u32) -> f64 {
    10f64.powi(-(digits as i32 - 10).min(300))
}

fn deviation(a: &Real, b: &Real) -> f64 {
    let d = (a - b).abs();
    if d.is_zero() {
        0.0
    } else {
        10f64.powf(d.log10_abs())
    }
}

fn gamma_class_surface(s: SurfaceId, cfg: &RunConfig) -> Outcome<GammaSurfaceOut> {
    let digits = cfg.precision_digits;
    let g = gamma_surface(s, digits);
    let p = g.c1.precision();
    let ch = chern_data(s);
    let thr = agreement_threshold(digits);
    let minus_euler = deviation(&g.c1, &-Real::euler_gamma(p)) <= thr;
    let restriction = match hypersurface_model(s) {
        Some((w, d)) => {
            let amb = gamma_hypersurface_ambient(w, d, digits).map_err(data_err)?;
            // c_1 restricts to (sum w - d) h; h^2 integrates to d / prod w
            let index = w.iter().sum::<u32>() - d;
            let prod: u32 = w.iter().product();
            // (d = 0 is the plane itself)
            let h2 = dpgamma_core::linalg::rat(d.max(1) as i64, prod as i64);
            let per_c1 = amb.coeff(1) / &Real::from_i64(index as i64, p);
            let pt = amb.coeff(2) * &Real::from_rat(&h2, p);
            let dev = deviation(&per_c1, &g.c1).max(deviation(&pt, &g.pt));
            Some(RestrictionOut {
                weights: w.to_vec(),
                degree: d,
                h2: exact(&h2),
                max_deviation: dev,
                threshold: thr,
                agrees: dev <= thr,
            })
        }
        None => None,
    };
    let d = digits - 5;
    let out = GammaSurfaceOut {
        surface: s.to_string(),
        chern: ChernOut { c1_squared: ch.c1_squared, c2: ch.c2, ch2: exact(&ch.ch2()) },
        c1_coefficient: Decimal::new(&g.c1, d),
        pt_coefficient: Decimal::new(&g.pt, d),
        coefficients: g.coefficients().into_iter().map(|(l, v)| CoefficientOut { class: l, value: Decimal::new(&v, d) }).collect(),
        c1_coefficient_is_minus_euler: minus_euler,
        ambient_restriction: restriction,
    };
    let pass = minus_euler && out.ambient_restriction.as_ref().map_or(true, |r| r.agrees);
    Ok((out, pass))
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum TwistedOut {
    Absent,
    NotComputed { sectors: usize },
}

#[derive(Serialize)]
struct GammaWeightsOut {
    weights: Vec<u32>,
    index: u32,
    untwisted: Vec<CoefficientOut>,
    twisted: TwistedOut,
    c1_coefficient_is_minus_euler: bool,
}

fn gamma_class_weights(w: &[u32], cfg: &RunConfig) -> Outcome<GammaWeightsOut> {
    let digits = cfg.precision_digits;
    let g = gamma_wps(w, digits).map_err(|e: GammaError| data_err(e))?;
    let p = g.untwisted.precision();
    let index: u32 = w.iter().sum();
    let per_c1 = g.untwisted.coeff(1) / &Real::from_i64(index as i64, p);
    let ok = deviation(&per_c1, &-Real::euler_gamma(p)) <= agreement_threshold(digits);
    let d = digits - 5;
    let out = GammaWeightsOut {
        weights: w.to_vec(),
        index,
        untwisted: ["1", "h", "h^2"]
            .iter()
            .enumerate()
            .map(|(k, l)| CoefficientOut { class: l.to_string(), value: Decimal::new(g.untwisted.coeff(k), d) })
            .collect(),
        twisted: match g.twisted {
            TwistedSectors::Absent => TwistedOut::Absent,
            TwistedSectors::NotComputed { sectors } => TwistedOut::NotComputed { sectors },
        },
        c1_coefficient_is_minus_euler: ok,
    };
    Ok((out, ok))
}

/// One row of the `report-all` table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Cell {
    Pass,
    Fail,
    Error,
    #[serde(rename = "n/a")]
    Na,
}

impl Cell {
    fn of(e: &Entry) -> Cell {
        Cell::from(e.status)
    }

    fn text(self) -> &'static str {
        match self {
            Cell::Pass => "pass",
            Cell::Fail => "FAIL",
            Cell::Error => "error",
            Cell::Na => "n/a",
        }
    }
}

#[derive(Serialize)]
pub struct SummaryRow {
    pub property_o: Cell,
    pub rho: Option<f64>,
    pub mirror: Cell,
    pub gamma_limit: Cell,
    pub final_dispersion: Option<f64>,
    pub gamma_class: Cell,
    pub messages: Vec<String>,
}

fn summarize(target: String, rows: [Option<Entry>; 4], rho: Option<f64>, disp: Option<f64>) -> Entry {
    let mut messages = Vec::new();
    let mut cells = [Cell::Na; 4];
    const NAMES: [&str; 4] = ["verify-o", "mirror", "gamma-limit", "gamma-class"];
    for (k, e) in rows.iter().enumerate() {
        if let Some(e) = e {
            cells[k] = Cell::of(e);
            if let Some(m) = &e.message {
                messages.push(format!("{}: {m}", NAMES[k]));
            }
            let first_failure = e.data.as_ref().and_then(|d| d.get("failures")?.get(0)?.get("message")?.as_str());
            if let Some(m) = first_failure {
                messages.push(format!("{}: {m}", NAMES[k]));
            }
        }
    }
    let row = SummaryRow {
        property_o: cells[0],
        rho,
        mirror: cells[1],
        gamma_limit: cells[2],
        final_dispersion: disp,
        gamma_class: cells[3],
        messages,
    };
    let worst = cells
        .iter()
        .map(|c| match c {
            Cell::Pass | Cell::Na => Status::Pass,
            Cell::Fail => Status::Fail,
            Cell::Error => Status::Error,
        })
        .max()
        .unwrap_or(Status::Pass);
    let mut e = Entry::ok(target, true, &row);
    e.status = worst;
    e
}

fn final_dispersion(e: &Entry) -> Option<f64> {
    e.data.as_ref()?.get("final_dispersion")?.as_f64()
}

impl From<Status> for Cell {
    fn from(s: Status) -> Cell {
        match s {
            Status::Pass => Cell::Pass,
            Status::Fail => Cell::Fail,
            Status::Error => Cell::Error,
        }
    }
}

/// Weighted projective spaces included in the summary.
pub const SUMMARY_WEIGHTS: [&[u32]; 2] = [&[1, 1, 1, 2], &[1, 1, 2, 3]];

fn report_all(table: &GwTable, cfg: &RunConfig) -> Vec<Entry> {
    let mut out = par_map(&SurfaceId::ALL, |&s| {
        let name = s.to_string();
        let vo = entry(name.clone(), verify_o(s, table, cfg));
        let rho = vo.data.as_ref().and_then(|d| d["certificate"]["rho"].as_f64());
        let mirror = s.is_toric().then(|| entry(name.clone(), mirror_surface(s, cfg)));
        let gl = CIModel::for_surface(s).is_ok().then(|| entry(name.clone(), gamma_limit_surface(s, table, cfg)));
        let disp = gl.as_ref().and_then(final_dispersion);
        let gc = entry(name.clone(), gamma_class_surface(s, cfg));
        summarize(name, [Some(vo), mirror, gl, Some(gc)], rho, disp)
    });
    out.extend(par_map(&SUMMARY_WEIGHTS, |w| {
        let name = wps_name(w);
        let m = entry(name.clone(), mirror_weights(w, cfg));
        let rho = m.data.as_ref().and_then(|d| d["closed_form"]["c"]["value"].as_str()?.parse().ok());
        let gl = entry(name.clone(), gamma_limit_weights(w, cfg));
        let disp = final_dispersion(&gl);
        let gc = entry(name.clone(), gamma_class_weights(w, cfg));
        summarize(name, [None, Some(m), Some(gl), Some(gc)], rho, disp)
    }));
    out
}

/// Plain-text rendering of a `report-all` document.
pub fn summary_table(r: &Report) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<12} {:<10} {:>10} {:<8} {:<11} {:>10} {:<11}",
        "target", "property-O", "rho", "mirror", "gamma-limit", "D(t_last)", "gamma-class"
    );
    for e in &r.results {
        let d = e.data.as_ref();
        let cell = |k: &str| d.and_then(|d| d[k].as_str()).map(|c| if c == "fail" { "FAIL" } else { c }).unwrap_or("-");
        let num = |k: &str, f: &dyn Fn(f64) -> String| d.and_then(|d| d[k].as_f64()).map(f).unwrap_or_else(|| "-".into());
        let _ = writeln!(
            s,
            "{:<12} {:<10} {:>10} {:<8} {:<11} {:>10} {:<11}",
            e.target,
            cell("property_o"),
            num("rho", &|x| format!("{x:.6}")),
            cell("mirror"),
            cell("gamma_limit"),
            num("final_dispersion", &|x| format!("{x:.2e}")),
            cell("gamma_class"),
        );
        if let Some(msgs) = d.and_then(|d| d["messages"].as_array()) {
            for m in msgs.iter().filter_map(|m| m.as_str()) {
                let _ = writeln!(s, "    {m}");
            }
        }
    }
    let _ = writeln!(s, "overall: {}", Cell::from(r.status).text());
    s
}
