use std::fs;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::ArgMatches;
use oad_ia::baselines::generate;
use oad_ia::io::{
    detections_to_events, parse_detections, parse_ground_truth, read_event_stream,
    write_comparison, write_detections, write_event_stream, write_metric_series, write_summary,
    ComparisonRow, DetectionSet, GroundTruth,
};
use oad_ia::stream::StreamSession;
use oad_ia::{
    cases, evaluate_series, maia, offline_report, summarize as summarize_corpus, BaselineKind,
    DatasetSummary, EvaluatorConfig, MetricSeries,
};

use crate::{
    BaselineArgs, BaselineName, Common, EvaluateArgs, Failure, RandomArgs, StreamArgs,
    SummarizeArgs,
};

fn read_text(path: &Path, what: &str) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| match e.kind() {
        io::ErrorKind::NotFound => Failure::input(format!("{what} not found: {}", path.display())),
        _ => Failure::input(format!("cannot read {what} {}: {e}", path.display())),
    })
}

fn load_gt(common: &Common) -> Result<GroundTruth, Failure> {
    let text = read_text(&common.gt, "ground truth")?;
    parse_ground_truth(&text).map_err(|e| Failure::input(format!("{}: {e}", common.gt.display())))
}

fn load_detections(path: &Path, gt: &GroundTruth) -> Result<DetectionSet, Failure> {
    let text = read_text(path, "detections")?;
    parse_detections(&text, gt).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn config(common: &Common) -> Result<EvaluatorConfig, Failure> {
    Ok(EvaluatorConfig::new(common.delta_t, common.weighted)?)
}

fn baseline_kind(name: BaselineName, random: &RandomArgs) -> BaselineKind {
    match name {
        BaselineName::AllBg => BaselineKind::AllBackground,
        BaselineName::Pm => BaselineKind::PerfectModel,
        BaselineName::Random => BaselineKind::UniformRandom {
            seed: random.seed,
            detections_per_minute: random.rate,
        },
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)
            .map_err(|e| Failure::input(format!("cannot create {}: {e}", dir.display())))?;
    }
    fs::write(path, contents)
        .map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))
}

/// `series/<video>.csv` for every video, then `summary.csv`.
fn write_reports(
    dir: &Path,
    series: &[MetricSeries],
    summary: &DatasetSummary,
) -> Result<(), Failure> {
    for s in series {
        write_file(
            &dir.join("series").join(format!("{}.csv", s.video_id)),
            &write_metric_series(s),
        )?;
    }
    write_file(&dir.join("summary.csv"), &write_summary(summary))
}

fn headline(summary: &DatasetSummary, weighted: bool) -> String {
    let label = if weighted { "weighted_maIA" } else { "maIA" };
    format!("{label},{:.6}", summary.headline(weighted))
}

fn print(text: &str) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|()| out.flush())
        .map_err(|e| Failure::input(format!("cannot write to stdout: {e}")))
}

pub fn evaluate(args: &EvaluateArgs) -> Result<(), Failure> {
    let gt = load_gt(&args.common)?;
    let cfg = config(&args.common)?;
    let dets = match (&args.det, args.baseline) {
        (Some(path), _) => load_detections(path, &gt)?,
        (None, Some(name)) => generate(baseline_kind(name, &args.random), &gt, cfg.delta_t())?,
        (None, None) => return Err(Failure::input("either --det or --baseline is required")),
    };
    let cs = cases(&gt, &dets);
    let class_count = gt.catalog.len();
    match &args.out {
        Some(dir) => {
            let series = evaluate_series(&cs, &cfg, class_count)?;
            let summary = maia(&series)?;
            write_reports(dir, &series, &summary)?;
            print(&format!("{}\n", headline(&summary, cfg.weighted)))
        }
        None => {
            let summary = summarize_corpus(&cs, &cfg, class_count)?;
            print(&write_summary(&summary))
        }
    }
}

pub fn stream(args: &StreamArgs) -> Result<(), Failure> {
    let gt = load_gt(&args.common)?;
    let cfg = config(&args.common)?;
    let input: Box<dyn BufRead> = match &args.events {
        Some(path) => Box::new(BufReader::new(fs::File::open(path).map_err(|e| {
            Failure::input(format!("cannot open events {}: {e}", path.display()))
        })?)),
        None => Box::new(io::stdin().lock()),
    };
    let mut session = StreamSession::new(&gt, cfg, args.latency)?;
    let mut out = BufWriter::new(io::stdout().lock());
    let mut emit = |ticks: Vec<oad_ia::stream::Tick>| -> Result<(), Failure> {
        for t in &ticks {
            writeln!(
                out,
                "{},{:.6},{:.6},{:.6}",
                t.video_id, t.point.t_prime, t.point.ia, t.point.weighted_ia
            )
            .map_err(|e| Failure::input(format!("cannot write to stdout: {e}")))?;
        }
        if !ticks.is_empty() {
            out.flush()
                .map_err(|e| Failure::input(format!("cannot write to stdout: {e}")))?;
        }
        Ok(())
    };
    for event in read_event_stream(input, &gt) {
        let ticks = session.push(event?)?;
        emit(ticks)?;
    }
    let (ticks, series) = session.finish()?;
    emit(ticks)?;
    if let Some(dir) = &args.out {
        let summary = maia(&series)?;
        write_reports(dir, &series, &summary)?;
    }
    Ok(())
}

pub fn baseline(args: &BaselineArgs) -> Result<(), Failure> {
    let gt = load_gt(&args.common)?;
    let cfg = config(&args.common)?;
    let dets = generate(
        baseline_kind(args.baseline, &args.random),
        &gt,
        cfg.delta_t(),
    )?;
    let text = if args.as_events {
        write_event_stream(&detections_to_events(&dets, &gt), &gt)
    } else {
        write_detections(&dets, &gt)
    };
    match &args.out {
        Some(path) => write_file(path, &text),
        None => print(&text),
    }
}

/// A detector column of the comparison table, in command-line order.
pub enum Detector {
    File(PathBuf),
    Baseline(BaselineName),
}

pub fn detector_order(args: &SummarizeArgs, matches: &ArgMatches) -> Vec<Detector> {
    let mut order: Vec<(usize, Detector)> = Vec::new();
    if let Some(idx) = matches.indices_of("det") {
        order.extend(
            idx.zip(&args.det)
                .map(|(i, p)| (i, Detector::File(p.clone()))),
        );
    }
    if let Some(idx) = matches.indices_of("baseline") {
        order.extend(
            idx.zip(&args.baseline)
                .map(|(i, &b)| (i, Detector::Baseline(b))),
        );
    }
    order.sort_by_key(|(i, _)| *i);
    order.into_iter().map(|(_, d)| d).collect()
}

pub fn summarize(args: &SummarizeArgs, detectors: &[Detector]) -> Result<(), Failure> {
    if detectors.is_empty() {
        return Err(Failure::input(
            "summarize needs at least one --det or --baseline",
        ));
    }
    let gt = load_gt(&args.common)?;
    let cfg = config(&args.common)?;
    let class_count = gt.catalog.len();
    let mut rows = Vec::with_capacity(detectors.len());
    for d in detectors {
        let (name, dets) = match d {
            Detector::File(path) => (path.display().to_string(), load_detections(path, &gt)?),
            Detector::Baseline(b) => {
                let kind = baseline_kind(*b, &args.random);
                (kind.name().to_string(), generate(kind, &gt, cfg.delta_t())?)
            }
        };
        let cs = cases(&gt, &dets);
        let summary = summarize_corpus(&cs, &cfg, class_count)?;
        let offline = offline_report(&cs, cfg.delta_t(), class_count)?;
        rows.push(ComparisonRow {
            detector: name,
            map: offline.map,
            cap: offline.cap,
            maia: summary.maia,
            weighted_maia: summary.weighted_maia,
        });
    }
    let table = write_comparison(&rows);
    if let Some(dir) = &args.out {
        write_file(&dir.join("comparison.csv"), &table)?;
    }
    print(&table)
}
