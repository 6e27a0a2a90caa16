use gmtc_core::corpus::make_splits;
use gmtc_core::model::{param_count, receptive_field, DrdScheme, ModelConfig, SkipMode};
use gmtc_core::trainer::{render_run_config, TrainConfig};
use gmtc_core::{Error, Result};

use crate::args::{AblateArgs, Study};
use crate::io::{create_dir, load_run_config, write};
use crate::run::RunRecorder;
use crate::train::{fit_plan, Experiment};

/// Named model variants for a study, derived from `base`.
pub fn variants(study: Study, base: &ModelConfig) -> Vec<(String, ModelConfig)> {
    match study {
        Study::Gating => (1..=4)
            .map(|l| (format!("L={}", l), ModelConfig { gating_levels: l, ..base.clone() }))
            .collect(),
        Study::Gscb => (1..=5)
            .map(|j| (format!("J={}", j), ModelConfig { n_gscb: j, ..base.clone() }))
            .collect(),
        Study::Scale => [SkipMode::MaxScale, SkipMode::MultiScale]
            .into_iter()
            .map(|s| (s.to_string(), ModelConfig { skip_mode: s, ..base.clone() }))
            .collect(),
        Study::Drd => [
            ("ours-256", DrdScheme::Ours, 7),
            ("ours-128", DrdScheme::Ours, 6),
            ("raw-128", DrdScheme::Raw, 7),
            ("raw-256", DrdScheme::Raw, 8),
        ]
        .into_iter()
        .map(|(name, drd, n)| {
            (
                name.to_string(),
                ModelConfig {
                    drd_scheme: drd,
                    n_gcb: n,
                    ..base.clone()
                },
            )
        })
        .collect(),
    }
}

pub fn run(args: AblateArgs) -> Result<()> {
    create_dir(&args.out)?;
    let study = format!("{:?}", args.study).to_lowercase();
    let (exp, base, train_cfg) = if args.no_train {
        let (m, t) = load_run_config(args.config.as_deref(), args.classes, ModelConfig::default().seq_len)?;
        (None, m, t)
    } else {
        let cache = args
            .features
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("--features is required unless --no-train is given".into()))?;
        let exp = Experiment::load(cache)?;
        let (m, t) = load_run_config(args.config.as_deref(), exp.manifest.n_classes(), exp.seq_len())?;
        (Some(exp), m, TrainConfig { seed: args.seed, ..t })
    };
    let mut rec = RunRecorder::start("ablate", render_run_config(&base, &train_cfg), Some(args.seed));

    let mut csv = String::from("study,variant,params,nominal_rf,actual_rf");
    if exp.is_some() {
        csv.push_str(",war_max,war_mean,war_std,uar_max,uar_mean,uar_std");
    }
    csv.push('\n');
    for (name, cfg) in variants(args.study, &base) {
        cfg.validate()?;
        let rf = receptive_field(&cfg);
        csv.push_str(&format!("{},{},{},{},{}", study, name, param_count(&cfg), rf.nominal, rf.actual));
        if let Some(exp) = &exp {
            let data = exp.dataset()?;
            let plan = make_splits(&exp.manifest, args.split.into(), args.seed)?;
            let (_, s) = fit_plan(&cfg, &train_cfg, &data, &plan)
                .map_err(|e| Error::Data(format!("variant {}: {}", name, e)))?;
            log::info!("{}: WAR {:.4} UAR {:.4}", name, s.war.mean, s.uar.mean);
            csv.push_str(&format!(
                ",{},{},{},{},{},{}",
                s.war.max, s.war.mean, s.war.std, s.uar.max, s.uar.mean, s.uar.std
            ));
        }
        csv.push('\n');
    }
    let table = args.out.join(format!("ablation_{}.csv", study));
    write(&table, &csv)?;
    rec.artifact(&table);
    print!("{}", csv);
    rec.finish(&args.out.join("run.json"))
}
