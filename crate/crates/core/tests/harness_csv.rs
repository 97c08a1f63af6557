use borda_manip::gen::{Model, UrnWeight};
use borda_manip::harness::{
    generate_instances, read_csv, run_experiment, write_csv, ExperimentConfig, Target, CSV_HEADER,
};
use borda_manip::{minimum_manipulators, reverse, Budget};

fn micro(workers: usize) -> ExperimentConfig {
    ExperimentConfig {
        ms: vec![4, 5],
        ps: vec![3, 6],
        per_cell: 8,
        workers,
        ..ExperimentConfig::desk(vec![Model::Uniform, Model::Urn(UrnWeight::Factorial)], 17)
    }
}

fn csv_bytes(cfg: &ExperimentConfig) -> Vec<u8> {
    let res = run_experiment(cfg).unwrap();
    let mut out = Vec::new();
    write_csv(&res.records, cfg.seed, &mut out).unwrap();
    out
}

#[test]
fn csv_is_identical_across_worker_counts() {
    let a = csv_bytes(&micro(1));
    let b = csv_bytes(&micro(4));
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# root_seed=17"));
    assert_eq!(lines.next(), Some(CSV_HEADER.join(",").as_str()));
}

#[test]
fn records_agree_with_direct_solves() {
    let cfg = micro(2);
    let set = generate_instances(&cfg).unwrap();
    let res = run_experiment(&cfg).unwrap();
    assert_eq!(set.instances.len(), res.records.len());
    assert_eq!(set.generated, set.instances.len() + set.duplicates);
    for (inst, rec) in set.instances.iter().zip(&res.records) {
        assert_eq!(inst.id, rec.instance_id);
        assert_eq!((inst.m, inst.p), (rec.m, rec.p));
        assert_eq!(inst.model.to_string(), rec.model);
        assert_eq!(reverse(&inst.profile).n, rec.n_reverse);
        let report = minimum_manipulators(&inst.profile, Budget::nodes(1_000_000)).unwrap();
        assert_eq!(report.n_optimal, rec.n_optimal);
        assert_eq!(report.proof, rec.proof);
        assert_eq!(rec.elapsed_ms, 0);
    }
    // Worst-off targeting backs a minimum-score candidate.
    for inst in &set.instances {
        let d = inst.profile.distinguished().zero_based();
        let min = *inst.profile.scores().iter().min().unwrap();
        assert_eq!(inst.profile.scores()[d], min);
    }
}

#[test]
fn csv_round_trips() {
    let cfg = micro(0);
    let res = run_experiment(&cfg).unwrap();
    let mut out = Vec::new();
    write_csv(&res.records, cfg.seed, &mut out).unwrap();
    let back = read_csv(&out[..]).unwrap();
    assert_eq!(back, res.records);
}

#[test]
fn schema_mismatch_is_reported() {
    let bad = "instance_id,m,p\n1,4,4\n";
    assert!(read_csv(bad.as_bytes()).is_err());
    assert!(read_csv("".as_bytes()).unwrap().is_empty());
}

#[test]
fn last_target_backs_candidate_m() {
    let cfg = ExperimentConfig {
        target: Target::Last,
        ..micro(1)
    };
    for inst in generate_instances(&cfg).unwrap().instances {
        assert_eq!(inst.profile.distinguished().index(), inst.m);
    }
}

#[test]
fn invalid_configs_are_rejected() {
    let mut cfg = micro(1);
    cfg.models = vec![Model::Prop1];
    assert!(run_experiment(&cfg).is_err());
    let mut cfg = micro(1);
    cfg.ps = vec![0];
    assert!(run_experiment(&cfg).is_err());
}

fn golden_config() -> ExperimentConfig {
    ExperimentConfig {
        ms: vec![4, 6],
        ps: vec![4],
        per_cell: 3,
        workers: 1,
        ..ExperimentConfig::desk(vec![Model::Uniform, Model::Urn(UrnWeight::Factorial)], 5)
    }
}

/// Schema and content regression. Set `UPDATE_GOLDEN=1` to rewrite the file
/// after an intentional format change.
#[test]
fn micro_run_matches_golden_file() {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/micro_run.csv");
    let actual = String::from_utf8(csv_bytes(&golden_config())).unwrap();
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &actual).unwrap();
    }
    let expected = std::fs::read_to_string(&path).unwrap();
    assert_eq!(actual, expected);
}
