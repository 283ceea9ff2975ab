//! Command implementations shared by the binary and the tests.

use std::path::{Path, PathBuf};

use poseval_core::perturb::perturb;
use poseval_core::seed::derive_seed;
use poseval_core::{
    compute_ap_ar, group_samples, sample_scene, simulate, simulate_from_estimates, ApAr, EvalConfig, EvalError,
    EvalReport, Estimate, GtAnnotation, ModelSet, ObjectModel, PreparedSample, ProcessOutcome, SweepPoint,
};
use rayon::prelude::*;
use rayon::ThreadPool;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::io::{self, check_objects, DatasetManifest, ObjectPolicy};
use crate::report::{self, format_ap_ar, OutputDir, SummaryLabels};

pub const CONFIG_ECHO: &str = "config.toml";

pub fn thread_pool(jobs: usize) -> Result<ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Invalid(format!("cannot start {jobs} worker threads: {e}")))
}

fn first_error<T, E>(results: Vec<std::result::Result<T, E>>) -> std::result::Result<Vec<T>, E> {
    results.into_iter().collect()
}

/// Prepares samples in parallel. The outcome does not depend on the pool size.
pub fn prepare_parallel(
    pool: &ThreadPool,
    gts: &[GtAnnotation],
    estimates: &[Estimate],
    models: &ModelSet,
) -> std::result::Result<Vec<PreparedSample>, EvalError> {
    let groups: Vec<_> = group_samples(gts, estimates).into_iter().collect();
    let results = pool.install(|| groups.par_iter().map(|(k, s)| PreparedSample::new(*k, s, models)).collect());
    first_error(results)
}

pub fn evaluate_parallel(
    pool: &ThreadPool,
    gts: &[GtAnnotation],
    estimates: &[Estimate],
    models: &ModelSet,
    cfg: &EvalConfig,
) -> std::result::Result<EvalReport, EvalError> {
    cfg.validate()?;
    let prepared = prepare_parallel(pool, gts, estimates, models)?;
    if prepared.is_empty() {
        return Err(EvalError::NoSamples);
    }
    EvalReport::from_prepared(&prepared, models, cfg)
}

pub fn sweep_parallel(
    pool: &ThreadPool,
    gts: &[GtAnnotation],
    estimates: &[Estimate],
    models: &ModelSet,
    cfg: &EvalConfig,
) -> std::result::Result<Vec<SweepPoint>, EvalError> {
    cfg.validate()?;
    let prepared = prepare_parallel(pool, gts, estimates, models)?;
    if prepared.is_empty() {
        return Err(EvalError::NoSamples);
    }
    let grid = poseval_core::metrics::sweep_thresholds(cfg.sweep_resolution);
    let points = pool.install(|| {
        grid.par_iter()
            .map(|&c| {
                let at = cfg.with_confidence_threshold(c);
                let results: Vec<_> = prepared.iter().map(|p| p.match_with(&at)).collect();
                let ApAr { ap, ar } = compute_ap_ar(&results, cfg.empty_sample_policy)?;
                Ok(SweepPoint { confidence: c, ap, ar })
            })
            .collect()
    });
    first_error(points)
}

pub fn simulate_parallel(
    pool: &ThreadPool,
    cfg: &RunConfig,
    model: &ObjectModel,
) -> Result<Vec<ProcessOutcome>> {
    let n = cfg.simulate.replications as u64;
    let results = pool.install(|| {
        (0..n).into_par_iter().map(|r| simulate(&cfg.process.replication(r), model, &cfg.noise)).collect()
    });
    Ok(first_error(results)?)
}

/// Models, ground truth and estimates named by the configuration, either
/// directly or through a manifest variant and split.
pub struct Inputs {
    pub models: ModelSet,
    pub gts: Vec<GtAnnotation>,
    pub estimates: Vec<Estimate>,
    pub skipped: usize,
}

fn required<'a>(p: &'a Option<PathBuf>, what: &str) -> Result<&'a Path> {
    p.as_deref().ok_or_else(|| Error::Invalid(format!("missing {what} path")))
}

fn policy(cfg: &RunConfig) -> ObjectPolicy {
    if cfg.strict {
        ObjectPolicy::Strict
    } else {
        ObjectPolicy::Lenient
    }
}

pub fn load_inputs(cfg: &RunConfig, need_estimates: bool) -> Result<Inputs> {
    let paths = &cfg.paths;
    let (models, gts, estimates) = if let Some(manifest) = &paths.manifest {
        let manifest = DatasetManifest::load(manifest)?;
        let variant = manifest.variant(required_name(&paths.variant, "variant")?)?;
        let split = variant.split(required_name(&paths.split, "split")?)?;
        let models = io::load_models(&variant.models)?;
        (models, split.load_ground_truth()?, split.load_estimates()?)
    } else {
        let models = io::load_models(required(&paths.models, "models")?)?;
        let gts = io::load_ground_truth(required(&paths.ground_truth, "ground-truth")?)?;
        let estimates = match (&paths.estimates, need_estimates) {
            (Some(p), _) => io::load_estimates(p)?,
            (None, false) => Vec::new(),
            (None, true) => return Err(Error::Invalid("missing estimates path".into())),
        };
        (models, gts, estimates)
    };
    let checked = check_objects(gts, estimates, &models, policy(cfg))?;
    Ok(Inputs { models, gts: checked.gts, estimates: checked.estimates, skipped: checked.skipped })
}

fn required_name<'a>(name: &'a Option<String>, what: &str) -> Result<&'a str> {
    name.as_deref().ok_or_else(|| Error::Invalid(format!("a manifest needs a {what} name")))
}

fn pick_model(models: &ModelSet, id: Option<u32>) -> Result<&ObjectModel> {
    match id {
        Some(id) => models.get(id).ok_or_else(|| Error::Invalid(format!("unknown object id {id}"))),
        None => models.iter().next().ok_or_else(|| Error::Invalid("no models loaded".into())),
    }
}

fn echo(out: &OutputDir, cfg: &RunConfig) -> Result<()> {
    out.write_text(CONFIG_ECHO, &cfg.to_toml()?)?;
    Ok(())
}

/// What a command prints to standard output.
pub type Summary = String;

pub fn cmd_evaluate(cfg: &RunConfig, out: &Path, force: bool) -> Result<Summary> {
    let pool = thread_pool(cfg.jobs)?;
    let inputs = load_inputs(cfg, true)?;
    let report = evaluate_parallel(&pool, &inputs.gts, &inputs.estimates, &inputs.models, &cfg.eval)?;
    let out = OutputDir::create(out, force)?;
    out.write_json("report.json", &report)?;
    report::write_ap_ar(&out, &report)?;
    report::write_sweep(&out, &report.sweep)?;
    report::write_distribution(&out, &report.distribution)?;
    report::write_components(&out, &report.components)?;
    echo(&out, cfg)?;
    Ok(format_ap_ar(report.ap, report.ar))
}

pub fn cmd_sweep(cfg: &RunConfig, out: &Path, force: bool) -> Result<Summary> {
    let pool = thread_pool(cfg.jobs)?;
    let inputs = load_inputs(cfg, true)?;
    let sweep = sweep_parallel(&pool, &inputs.gts, &inputs.estimates, &inputs.models, &cfg.eval)?;
    let out = OutputDir::create(out, force)?;
    let path = report::write_sweep(&out, &sweep)?;
    echo(&out, cfg)?;
    Ok(format!("{} thresholds written to {}", sweep.len(), path.display()))
}

pub fn cmd_distribution(cfg: &RunConfig, out: &Path, force: bool) -> Result<Summary> {
    let pool = thread_pool(cfg.jobs)?;
    let inputs = load_inputs(cfg, true)?;
    let prepared = prepare_parallel(&pool, &inputs.gts, &inputs.estimates, &inputs.models)?;
    let mut ordered: Vec<&PreparedSample> = prepared.iter().collect();
    ordered.sort_by_key(|p| p.key());
    let results: Vec<_> = ordered.iter().map(|p| p.match_with(&cfg.eval)).collect();
    let rows = poseval_core::export_distribution(&results);
    let stats = poseval_core::component_statistics(&results, &inputs.models, cfg.eval.component_scope)?;
    let out = OutputDir::create(out, force)?;
    let path = report::write_distribution(&out, &rows)?;
    report::write_components(&out, &stats)?;
    echo(&out, cfg)?;
    Ok(format!("{} matched estimates written to {}", rows.len(), path.display()))
}

pub const ESTIMATES_FILE: &str = "estimates.csv";
pub const SCENES_DIR: &str = "scenes";

/// Synthetic scenes (or loaded ground truth) plus noisy estimates.
pub fn cmd_perturb(cfg: &RunConfig, out: &Path, force: bool) -> Result<Summary> {
    let models = io::load_models(required(&cfg.paths.models, "models")?)?;
    let gts = match &cfg.paths.ground_truth {
        Some(p) => check_objects(io::load_ground_truth(p)?, Vec::new(), &models, policy(cfg))?.gts,
        None => {
            let model = pick_model(&models, cfg.scene.object_id)?;
            let mut gts = Vec::new();
            for s in 0..cfg.scene.scenes {
                let seed = derive_seed(cfg.scene.seed, s as u64);
                gts.extend(sample_scene(&cfg.scene.layout, cfg.scene.parts_per_scene, model, s as u32, seed)?);
            }
            gts
        }
    };
    let estimates = perturb(&gts, &models, &cfg.noise)?;
    let out = OutputDir::create(out, force)?;
    io::write_ground_truth_tree(&out.path(SCENES_DIR), &gts)?;
    io::save_estimates(&out.path(ESTIMATES_FILE), &estimates)?;
    echo(&out, cfg)?;
    Ok(format!(
        "{} ground-truth instances and {} estimates written to {}",
        gts.len(),
        estimates.len(),
        out.root().display()
    ))
}

/// Process simulation, from the perturbation model or by replaying
/// recorded estimates when an estimate file is given.
pub fn cmd_simulate(cfg: &RunConfig, out: &Path, force: bool) -> Result<Summary> {
    let pool = thread_pool(cfg.jobs)?;
    let (outcomes, object) = if cfg.paths.estimates.is_some() || cfg.paths.manifest.is_some() {
        let inputs = load_inputs(cfg, true)?;
        if cfg.simulate.replications > 1 {
            log::warn!("replay is deterministic; running a single replication");
        }
        let object = inputs.gts.first().map_or(0, |g| g.object_id);
        let outcome = simulate_from_estimates(&cfg.process, &inputs.gts, &inputs.estimates, &inputs.models)?;
        (vec![outcome], object)
    } else {
        let models = io::load_models(required(&cfg.paths.models, "models")?)?;
        let model = pick_model(&models, cfg.simulate.object_id)?;
        (simulate_parallel(&pool, cfg, model)?, model.object_id())
    };
    let out = OutputDir::create(out, force)?;
    out.write_json("attempts.json", &outcomes)?;
    let labels = SummaryLabels { object, method: &cfg.simulate.method, variant: &cfg.simulate.variant };
    report::write_process_summary(&out, &labels, &outcomes)?;
    echo(&out, cfg)?;
    let n = outcomes.len() as f64;
    let ap = outcomes.iter().map(|o| o.ap).sum::<f64>() / n;
    let ar = outcomes.iter().map(|o| o.ar).sum::<f64>() / n;
    Ok(format_ap_ar(ap, ar))
}
