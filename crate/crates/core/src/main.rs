use std::fs;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use hanoi_help::cli::{parse_cli, CliError, Invocation};
use hanoi_help::reporting::{render_plot, write_csv, write_svg, RunManifest, ARTIFACT_VERSION};
use hanoi_help::{Error, Result};

fn run(inv: &Invocation) -> Result<()> {
    let scenario = &inv.scenario;
    let series = match inv.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("cannot start {n} workers: {e}")))?
            .install(|| scenario.run())?,
        None => scenario.run()?,
    };
    let svg = render_plot(&series, scenario.kind.axis_mode(), scenario.kind.name())?;

    fs::create_dir_all(&inv.out).map_err(|source| Error::Io {
        path: inv.out.clone(),
        source,
    })?;
    let mut outputs = Vec::new();
    for s in &series {
        let path = scenario.csv_path(&inv.out, s);
        write_csv(&s.points, &path)?;
        outputs.push(path);
        let truncated: u64 = s.points.iter().map(|p| p.truncated_episodes).sum();
        if truncated > 0 {
            eprintln!("warning: {} had {truncated} truncated episodes", s.name);
        }
        if let Some(last) = s.points.last() {
            println!(
                "{:<14} episodes={:<6} mean_moves={:.3} mean_expert_moves={:.3}",
                s.name, last.episodes_trained, last.mean_moves, last.mean_expert_moves
            );
        }
    }
    let svg_path = scenario.svg_path(&inv.out);
    write_svg(&svg, &svg_path)?;
    outputs.push(svg_path);

    let manifest = RunManifest {
        scenario: scenario.kind.name().into(),
        config: scenario.base.clone(),
        artifact_version: ARTIFACT_VERSION.into(),
        timestamp: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        series: scenario.describe_series(),
        outputs,
    };
    manifest.write(&inv.out.join("manifest.txt"))
}

fn main() -> ExitCode {
    let inv = match parse_cli(std::env::args_os()) {
        Ok(inv) => inv,
        Err(CliError::Usage(e)) => e.exit(),
        Err(CliError::Config(e)) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match run(&inv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
