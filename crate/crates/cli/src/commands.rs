use qleb::decomp::{
    is_absolutely_continuous, is_mutually_ac, is_singular, lebesgue_decompose,
    lebesgue_decompose_direct, LebesgueDecomposition,
};
use qleb::gaussian::QcfQuery;
use qleb::io::{convergence_csv, read_json, DecompositionJson, MatrixJson};
use qleb::linalg::{default_cutoff, eig_hermitian};
use qleb::models::{model_by_name, random_psd_pair, PairMode, ParametricModel, RandomPsdPairSpec, TabulatedModel};
use qleb::qlan::{lecam_report, oh2_report, qclt_report, sandwich_report, sld_set, ConvergenceReport, Oh2Report};
use qleb::{HermitianOperator, PositiveOperator};
use serde::Serialize;

use crate::args::{CheckArgs, CheckKind, DecomposeArgs, Format, GlobalArgs, Mode, PairArgs, QlanArgs, SampleArgs, Study};
use crate::config::{display, parse_query, query_to_wire, require_positive, Detail, RunConfig};
use crate::output::{emit, json, per_study_path};
use crate::Failure;

fn load_pair(pair: &PairArgs) -> Result<(PositiveOperator, PositiveOperator), Failure> {
    require_positive("--hermitian-tol", pair.hermitian_tol)?;
    let cutoff = default_cutoff();
    let load = |path: &std::path::Path| -> Result<PositiveOperator, Failure> {
        let m: MatrixJson = read_json(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
        m.to_positive(pair.hermitian_tol, cutoff)
            .map_err(|e| Failure::input(format!("{}: {e}", path.display())))
    };
    let (rho, sigma) = (load(&pair.rho)?, load(&pair.sigma)?);
    if rho.dim() != sigma.dim() {
        return Err(Failure::input(format!("rho is {0}x{0} but sigma is {1}x{1}", rho.dim(), sigma.dim())));
    }
    Ok((rho, sigma))
}

fn pair_config(global: &GlobalArgs, command: &'static str, pair: &PairArgs, route_tol: Option<f64>, check: Option<CheckKind>) -> RunConfig {
    RunConfig {
        command,
        cutoff: default_cutoff(),
        format: global.format,
        out: global.out.as_deref().map(display),
        detail: Detail::Pair {
            rho: display(&pair.rho),
            sigma: display(&pair.sigma),
            hermitian_tol: pair.hermitian_tol,
            route_tol,
            check,
        },
    }
}

fn json_only(global: &GlobalArgs, command: &str) -> Result<(), Failure> {
    if global.format == Format::Csv {
        return Err(Failure::input(format!("{command} writes JSON only; csv is available for qlan")));
    }
    Ok(())
}

/// Spectral norm of a Hermitian difference.
fn op_norm_diff(a: &PositiveOperator, b: &PositiveOperator) -> Result<f64, Failure> {
    let diff = HermitianOperator::new(a.matrix() - b.matrix())?;
    Ok(eig_hermitian(&diff)?.eigenvalues.iter().fold(0.0f64, |m, x| m.max(x.abs())))
}

#[derive(Serialize)]
struct Disagreement {
    sigma_ac: f64,
    sigma_sing: f64,
    max: f64,
}

#[derive(Serialize)]
struct DecomposeReport {
    block: DecompositionJson,
    direct: DecompositionJson,
    disagreement: Disagreement,
    routes_agree: bool,
    clipped: [f64; 2],
}

pub fn decompose(global: &GlobalArgs, args: &DecomposeArgs) -> Result<u8, Failure> {
    json_only(global, "decompose")?;
    require_positive("--route-tol", args.route_tol)?;
    let (rho, sigma) = load_pair(&args.pair)?;
    let block: LebesgueDecomposition = lebesgue_decompose(&sigma, &rho)?;
    let direct = lebesgue_decompose_direct(&sigma, &rho)?;
    let ac = op_norm_diff(&block.sigma_ac, &direct.sigma_ac)?;
    let sing = op_norm_diff(&block.sigma_sing, &direct.sigma_sing)?;
    let max = ac.max(sing);
    let agree = max <= args.route_tol;
    let config = pair_config(global, "decompose", &args.pair, Some(args.route_tol), None);
    let report = DecomposeReport {
        block: DecompositionJson::from(&block),
        direct: DecompositionJson::from(&direct),
        disagreement: Disagreement { sigma_ac: ac, sigma_sing: sing, max },
        routes_agree: agree,
        clipped: [block.clipped, direct.clipped],
    };
    emit(global.out.as_deref(), &json(&config, report)?)?;
    if agree {
        Ok(0)
    } else {
        eprintln!("qleb: routes disagree by {max:e} (tolerance {:e})", args.route_tol);
        Ok(3)
    }
}

#[derive(Serialize)]
struct AcJson {
    absolutely_continuous: bool,
    min_excision_eigenvalue: f64,
    threshold: f64,
    witness: Option<MatrixJson>,
    witness_residual: Option<f64>,
}

#[derive(Serialize)]
struct CheckReport<T: Serialize> {
    verdict: bool,
    diagnostics: T,
}

pub fn check(global: &GlobalArgs, args: &CheckArgs) -> Result<u8, Failure> {
    json_only(global, "check")?;
    let (rho, sigma) = load_pair(&args.pair)?;
    let config = pair_config(global, "check", &args.pair, None, Some(args.kind));
    let (verdict, text) = match args.kind {
        CheckKind::Singular => {
            let r = is_singular(&rho, &sigma)?;
            println!("singular: {}", r.singular);
            println!("  excision vanishes: {} (norm {:e})", r.excision_zero, r.excision_norm);
            println!("  supports orthogonal: {} (projector overlap {:e})", r.supports_orthogonal, r.projector_overlap);
            println!("  trace vanishes: {} (Tr rho sigma = {:e})", r.trace_zero, r.trace_overlap);
            println!("  criteria agree: {}", r.criteria_agree());
            (r.singular, json(&config, CheckReport { verdict: r.singular, diagnostics: r })?)
        }
        CheckKind::Ac => {
            let r = is_absolutely_continuous(&rho, &sigma)?;
            println!("absolutely continuous (rho << sigma): {}", r.absolutely_continuous);
            println!("  min excision eigenvalue: {:e} (threshold {:e})", r.min_excision_eigenvalue, r.threshold);
            match r.witness_residual {
                Some(res) => println!("  witness residual ||R sigma R - rho||_max: {res:e}"),
                None => println!("  witness: none"),
            }
            let body = AcJson {
                absolutely_continuous: r.absolutely_continuous,
                min_excision_eigenvalue: r.min_excision_eigenvalue,
                threshold: r.threshold,
                witness: r.witness.as_ref().map(|w| MatrixJson::from_matrix(w.matrix())),
                witness_residual: r.witness_residual,
            };
            (r.absolutely_continuous, json(&config, CheckReport { verdict: r.absolutely_continuous, diagnostics: body })?)
        }
        CheckKind::Mutual => {
            let r = is_mutually_ac(&rho, &sigma)?;
            println!("mutually absolutely continuous: {}", r.mutually_ac);
            println!("  rho << sigma: {}", r.rho_ac_sigma);
            println!("  sigma << rho: {}", r.sigma_ac_rho);
            println!("  rank criterion: {}", r.rank_criterion);
            (r.mutually_ac, json(&config, CheckReport { verdict: r.mutually_ac, diagnostics: r })?)
        }
    };
    if let Some(path) = global.out.as_deref() {
        emit(Some(path), &text)?;
    }
    Ok(if verdict { 0 } else { 1 })
}

#[derive(Serialize)]
#[serde(untagged)]
enum StudyReport {
    Convergence(ConvergenceReport),
    Oh2 {
        study: &'static str,
        #[serde(flatten)]
        report: Oh2Report,
    },
}

impl StudyReport {
    fn name(&self) -> &str {
        match self {
            StudyReport::Convergence(r) => &r.study,
            StudyReport::Oh2 { study, .. } => study,
        }
    }

    fn passed(&self) -> bool {
        match self {
            StudyReport::Convergence(r) => r.passed(),
            StudyReport::Oh2 { report, .. } => report.passed(),
        }
    }

    fn summary(&self) -> String {
        let verdict = if self.passed() { "pass" } else { "fail" };
        let (label, value) = match self {
            StudyReport::Convergence(r) => ("rate", r.fitted_rate),
            StudyReport::Oh2 { report, .. } => ("slope", report.fitted_slope),
        };
        match value {
            Some(v) => format!("{}: {verdict} ({label} {v:.4})", self.name()),
            None => format!("{}: {verdict} (exact)", self.name()),
        }
    }

    fn csv(&self) -> String {
        match self {
            StudyReport::Convergence(r) => convergence_csv(&r.n_values, &r.errors),
            StudyReport::Oh2 { report, .. } => {
                let mut out = String::from("radius,g_max\n");
                for (r, g) in report.radii.iter().zip(&report.g_max) {
                    out.push_str(&format!("{r:.16e},{g:.16e}\n"));
                }
                out
            }
        }
    }
}

#[derive(Serialize)]
struct QlanReport {
    fisher_j: MatrixJson,
    warnings: Vec<String>,
    reports: Vec<StudyReport>,
}

pub fn qlan(global: &GlobalArgs, args: &QlanArgs) -> Result<u8, Failure> {
    let (model, model_label): (Box<dyn ParametricModel>, String) = match (&args.model, &args.model_file) {
        (Some(name), _) => (model_by_name(name)?, name.clone()),
        (None, Some(path)) => (Box::new(TabulatedModel::from_file(path)?), display(path)),
        (None, None) => return Err(Failure::input("--model or --model-file is required")),
    };
    let d = model.theta_dim();
    let h = args.h.clone().unwrap_or_else(|| vec![0.0; d]);
    if h.len() != d {
        return Err(Failure::input(format!("--h has {} components, the model has {d} parameters", h.len())));
    }
    let queries = if args.xi.is_empty() {
        let mut e1 = vec![0.0; d];
        e1[0] = 1.0;
        vec![QcfQuery::single(&e1)]
    } else {
        args.xi.iter().map(|x| QcfQuery::new(parse_query(x)?).map_err(Failure::from)).collect::<Result<Vec<_>, _>>()?
    };
    let mut studies = args.study.clone();
    studies.dedup();

    let config = RunConfig {
        command: "qlan",
        cutoff: default_cutoff(),
        format: global.format,
        out: global.out.as_deref().map(display),
        detail: Detail::Qlan {
            model: model_label,
            studies: studies.clone(),
            n_grid: args.n.clone(),
            h: h.clone(),
            queries: queries.iter().map(query_to_wire).collect(),
            radii: args.radii.clone(),
            directions: args.directions,
        },
    };

    // The collective observables are the SLDs at theta_0.
    let slds = sld_set(model.as_ref())?;
    let model = model.as_ref();
    let mut reports = Vec::with_capacity(studies.len());
    for study in &studies {
        let report = match study {
            Study::Qclt => StudyReport::Convergence(qclt_report(model, &queries, &args.n)?),
            Study::Lecam => StudyReport::Convergence(lecam_report(model, &slds.l_ops, &h, &queries, &args.n)?),
            Study::Sandwich => StudyReport::Convergence(sandwich_report(model, &slds.l_ops, &h, &queries, &args.n)?),
            Study::Oh2 => StudyReport::Oh2 { study: "oh2", report: oh2_report(model, &args.radii, args.directions)? },
        };
        eprintln!("{}", report.summary());
        reports.push(report);
    }
    let all_pass = reports.iter().all(StudyReport::passed);

    match global.format {
        Format::Json => {
            let body = QlanReport {
                fisher_j: MatrixJson::from_matrix(&slds.j_matrix),
                warnings: slds.warnings.clone(),
                reports,
            };
            emit(global.out.as_deref(), &json(&config, body)?)?;
        }
        Format::Csv => {
            let single = reports.len() == 1;
            for report in &reports {
                match global.out.as_deref() {
                    Some(path) if single => emit(Some(path), &report.csv())?,
                    Some(path) => emit(Some(&per_study_path(path, report.name())), &report.csv())?,
                    None => emit(None, &format!("# {}\n{}", report.name(), report.csv()))?,
                }
            }
        }
    }
    Ok(if all_pass { 0 } else { 1 })
}

pub fn sample(args: &SampleArgs) -> Result<u8, Failure> {
    let mode = match args.mode {
        Mode::Generic => PairMode::Generic,
        Mode::Orthogonal => PairMode::OrthogonalSupports,
        Mode::NearSingular => PairMode::NearSingularOverlap,
        Mode::NearDeficient => PairMode::NearRankDeficient,
    };
    let spec = RandomPsdPairSpec::generic(args.dim, args.rank_rho, args.rank_sigma, args.seed).with_mode(mode);
    let (rho, sigma) = random_psd_pair(&spec)?;
    for (op, path) in [(&rho, &args.rho), (&sigma, &args.sigma)] {
        let text = qleb::io::to_json_string(&MatrixJson::from_matrix(op.matrix()))?;
        emit(Some(path), &text)?;
    }
    Ok(0)
}
