mod common;

use std::fs;
use std::path::Path;

use voicetraits::pipeline::{
    extract_corpus, load_corpus, parse_manifest, run_labeling, ExtractOptions, FeatureCache, LabelingConfig,
    Manifest, ManifestFormat,
};
use voicetraits::lld::FeatureConfig;
use voicetraits::quantize::{load_scheme_config, QuantizationScheme, NUM_CLASSES};

use common::write_corpus;

fn schemes(vectors: &[voicetraits::lld::UtteranceFeatureVector]) -> Vec<QuantizationScheme> {
    ["f1_mean", "f2_mean", "spectral_flux", "warmth_combo", "slope", "competence_combo"]
        .iter()
        .map(|n| load_scheme_config(n).unwrap().resolve(Some(vectors)).unwrap())
        .collect()
}

/// Runs extraction and labeling end to end, writing manifests into `out`.
fn run_once(corpus_dir: &Path, out: &Path, jobs: usize, seed: u64) {
    let corpus = load_corpus(corpus_dir.join("metadata.csv"), corpus_dir.join("wavs")).unwrap();
    let cache = FeatureCache::new(FeatureConfig::default());
    extract_corpus(&corpus, &cache, &ExtractOptions { jobs: Some(jobs), dump_dir: None }).unwrap();
    cache.save(out.join("cache.json")).unwrap();
    let records = cache.records();
    let vectors: Vec<_> = records.iter().filter_map(|r| r.features.clone()).collect();
    let schemes = schemes(&vectors);
    let config = LabelingConfig { seed, ..LabelingConfig::default() };
    let run = run_labeling(&records, &schemes, &config).unwrap();
    for s in &schemes {
        let m = Manifest::from_run(&run, &s.name).unwrap();
        m.write(out.join(format!("{}.txt", s.name)), ManifestFormat::Pipe).unwrap();
        m.write(out.join(format!("{}.jsonl", s.name)), ManifestFormat::Jsonl).unwrap();
    }
    fs::write(out.join("report.json"), run.report_json().unwrap()).unwrap();
}

fn dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn identical_inputs_give_identical_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    write_corpus(tmp.path(), 16);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    fs::create_dir_all(&a).unwrap();
    fs::create_dir_all(&b).unwrap();
    run_once(tmp.path(), &a, 1, 1234);
    run_once(tmp.path(), &b, 3, 1234);
    let (fa, fb) = (dir_bytes(&a), dir_bytes(&b));
    assert_eq!(fa.len(), 14);
    assert_eq!(fa, fb);

    let c = tmp.path().join("c");
    fs::create_dir_all(&c).unwrap();
    run_once(tmp.path(), &c, 1, 99);
    let ma = parse_manifest(a.join("f1_mean.txt")).unwrap();
    let mc = parse_manifest(c.join("f1_mean.txt")).unwrap();
    assert_eq!(ma.rows, mc.rows);
    assert_ne!(ma.header.test_ids, mc.header.test_ids);
}

#[test]
fn manifests_round_trip_and_cover_every_labeled_utterance() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = write_corpus(tmp.path(), 10);
    let out = tmp.path().join("out");
    fs::create_dir_all(&out).unwrap();
    run_once(tmp.path(), &out, 2, 1234);
    for name in ["f2_mean", "warmth_combo"] {
        let pipe = parse_manifest(out.join(format!("{name}.txt"))).unwrap();
        let json = parse_manifest(out.join(format!("{name}.jsonl"))).unwrap();
        assert_eq!(pipe, json);
        // Voiced files plus the flagged silent one; the missing file is skipped.
        assert_eq!(pipe.rows.len(), corpus.voiced + 1);
        let hist = pipe.class_histogram();
        assert_eq!(hist.len(), NUM_CLASSES);
        assert_eq!(hist.iter().sum::<usize>(), pipe.rows.len());
        assert_eq!(pipe.header.test_ids.len(), 1);
    }
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["total_utterances"], 12);
    assert_eq!(report["labeled"], 11);
    assert_eq!(report["flagged_labeled"], 1);
    assert_eq!(report["skipped"].as_array().unwrap().len(), 1);
}

#[test]
fn cache_reuses_unchanged_audio_and_reextracts_changed() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = write_corpus(tmp.path(), 4);
    let loaded = load_corpus(&corpus.metadata, &corpus.audio_dir).unwrap();
    let path = tmp.path().join("cache.json");
    let cache = FeatureCache::open_or_new(&path, FeatureConfig::default()).unwrap();
    let first = extract_corpus(&loaded, &cache, &ExtractOptions::default()).unwrap();
    assert_eq!((first.extracted, first.reused, first.missing_audio), (5, 0, 1));
    cache.save(&path).unwrap();

    fs::copy(corpus.audio_dir.join("LJ002-0000.wav"), corpus.audio_dir.join("LJ001-0000.wav")).unwrap();
    let cache = FeatureCache::open_or_new(&path, FeatureConfig::default()).unwrap();
    let second = extract_corpus(&loaded, &cache, &ExtractOptions::default()).unwrap();
    assert_eq!((second.extracted, second.reused), (1, 4));
    let rec = cache.records().into_iter().find(|r| r.utterance_id == "LJ001-0000").unwrap();
    assert!(rec.features.unwrap().is_flagged());
}

#[test]
fn exclude_flagged_drops_silent_utterance() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = write_corpus(tmp.path(), 6);
    let loaded = load_corpus(&corpus.metadata, &corpus.audio_dir).unwrap();
    let cache = FeatureCache::new(FeatureConfig::default());
    extract_corpus(&loaded, &cache, &ExtractOptions::default()).unwrap();
    let records = cache.records();
    let vectors: Vec<_> = records.iter().filter_map(|r| r.features.clone()).collect();
    let config = LabelingConfig { exclude_flagged: true, ..LabelingConfig::default() };
    let run = run_labeling(&records, &schemes(&vectors), &config).unwrap();
    assert_eq!(run.utterances.len(), 6);
    assert_eq!(run.report.skipped.len(), 2);
}

#[test]
fn frame_dumps_written_per_utterance() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = write_corpus(tmp.path(), 2);
    let loaded = load_corpus(&corpus.metadata, &corpus.audio_dir).unwrap();
    let dumps = tmp.path().join("dumps");
    let cache = FeatureCache::new(FeatureConfig::default());
    let options = ExtractOptions { jobs: Some(1), dump_dir: Some(dumps.clone()) };
    extract_corpus(&loaded, &cache, &options).unwrap();
    let text = fs::read_to_string(dumps.join("LJ001-0001.lld.csv")).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "time_s,f0_hz,voiced,flux,f1_hz,f2_hz,slope_0_500,slope_500_1500"
    );
    assert!(text.lines().count() > 10);
}
