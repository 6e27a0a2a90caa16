use gmtc_core::corpus::synth_generate;
use gmtc_core::Result;

use crate::args::SynthArgs;
use crate::io::create_dir;
use crate::run::RunRecorder;

pub fn run(args: SynthArgs) -> Result<()> {
    create_dir(&args.out)?;
    let config = format!("classes={}\nper_class={}\n", args.classes, args.per_class);
    let mut rec = RunRecorder::start("synth", config, Some(args.seed));
    let manifest = synth_generate(&args.out, args.seed, args.per_class as usize, args.classes as usize)?;
    for e in &manifest.entries {
        rec.artifact(args.out.join(&e.path));
    }
    rec.artifact(args.out.join("manifest.csv"));
    log::info!("wrote {} clips to {}", manifest.len(), args.out.display());
    rec.finish(&args.out.join("run.json"))
}
