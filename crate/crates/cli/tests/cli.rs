use std::path::Path;
use std::process::{Command, Output};

use osp_cli::{execute, ConfigError, RunConfig, RunError, Suite, EXIT_CONFIG, EXIT_FAILURE, EXIT_PASS, OUTPUT_DIR_ENV};
use tempfile::TempDir;

fn osp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_osp")).args(args).env_remove(OUTPUT_DIR_ENV).output().expect("spawn osp")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn error_kind(o: &Output) -> String {
    let line = stdout(o).lines().next().unwrap_or_default().to_string();
    let v: serde_json::Value = serde_json::from_str(&line).unwrap_or_else(|e| panic!("not a record: {line}: {e}"));
    v["error"].as_str().expect("error tag").to_string()
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("run.toml");
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn configs_dir() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

const SMALL: &str = r#"
seed = 11
suites = ["counterexamples", "algebra"]

[truncation]
m_f = 1
m_b = 1
degree_cap = 6

[samples]
triples = 12
analytic_functions = 5
witness_levels = 20
"#;

#[test]
fn reference_file_matches_builtin_default() {
    let file = RunConfig::load(&configs_dir().join("reference.toml")).unwrap();
    assert_eq!(file, RunConfig::default());
    assert_eq!(file.hash(), RunConfig::default().hash());
}

#[test]
fn hash_ignores_output_location_but_not_seed() {
    let a = RunConfig::default();
    let mut b = a.clone();
    b.output.dir = "elsewhere".into();
    assert_eq!(a.hash(), b.hash());
    b.seed = Some(43);
    assert_ne!(a.hash(), b.hash());
}

#[test]
fn config_validation_errors() {
    let mut c = RunConfig::default();
    c.truncation.degree_cap = 4;
    match c.validate() {
        Err(ConfigError::NoSafeInterior { degree_cap: 4, .. }) => {}
        other => panic!("{other:?}"),
    }
    // Suites without Fock operators need no interior.
    c.suites = vec!["counterexamples".into(), "algebra".into()];
    assert_eq!(c.validate().unwrap(), vec![Suite::Algebra, Suite::Counterexamples]);

    let mut c = RunConfig::default();
    c.seed = None;
    assert!(matches!(c.validate(), Err(ConfigError::MissingSeed(_))));

    let mut c = RunConfig::default();
    c.suites = vec!["algebra".into(), "magic".into()];
    assert!(matches!(c.validate(), Err(ConfigError::UnknownSuite(_))));

    let mut c = RunConfig::default();
    c.suites.clear();
    assert!(matches!(c.validate(), Err(ConfigError::NoSuites)));

    let mut c = RunConfig::default();
    c.truncation.m_b = 0;
    assert!(matches!(c.validate(), Err(ConfigError::Truncation(_))));

    assert!(matches!(RunConfig::from_toml("seed = 1\nbogus = 2\n"), Err(ConfigError::Parse(_))));
    let e = execute(&RunConfig { seed: None, ..RunConfig::default() }).unwrap_err();
    assert_eq!(e.exit_code(), EXIT_CONFIG);
    assert!(matches!(e, RunError::Config(ConfigError::MissingSeed(_))));
}

#[test]
fn unknown_suite_exits_with_config_record() {
    let o = osp(&["run", "--suites", "algebra,magic", "-o", "/nonexistent/never-written"]);
    assert_eq!(o.status.code(), Some(EXIT_CONFIG));
    assert_eq!(error_kind(&o), "unknown_suite");
}

#[test]
fn small_cap_with_operator_suite_is_rejected_before_running() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    let o = osp(&["run", "--degree-cap", "4", "--suites", "oscillator", "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(EXIT_CONFIG));
    assert_eq!(error_kind(&o), "no_safe_interior");
    assert!(!out.exists(), "nothing is written for an invalid config");
}

#[test]
fn missing_seed_in_file_is_a_config_error() {
    let tmp = TempDir::new().unwrap();
    let text = SMALL.replace("seed = 11\n", "");
    let cfg = write_config(tmp.path(), &text);
    let o = osp(&["run", "-c", &cfg, "-o", tmp.path().join("out").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(EXIT_CONFIG));
    assert_eq!(error_kind(&o), "missing_seed");
}

#[test]
fn list_suites_names_every_suite() {
    let o = osp(&["list-suites"]);
    assert!(o.status.success());
    let names: Vec<String> = stdout(&o).lines().filter_map(|l| l.split_whitespace().next().map(String::from)).collect();
    assert_eq!(names, ["algebra", "counterexamples", "oscillator", "restriction", "series"]);
}

fn entries(text: &str) -> Vec<(usize, usize, [u32; 2], f64, f64)> {
    text.lines()
        .filter_map(|l| l.strip_prefix("entry "))
        .map(|l| {
            let f: Vec<&str> = l.split(' ').collect();
            let grade: Vec<u32> = f[2].split(',').map(|x| x.parse().unwrap()).collect();
            (f[0].parse().unwrap(), f[1].parse().unwrap(), [grade[0], grade[1]], f[4].parse().unwrap(), f[5].parse().unwrap())
        })
        .collect()
}

fn dim(text: &str) -> usize {
    text.lines().find_map(|l| l.strip_prefix("dim ")).unwrap().parse().unwrap()
}

#[test]
fn central_generator_is_i_times_identity() {
    let o = osp(&["emit-matrix", "-g", "central", "--degree-cap", "6", "--file", "-"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let e = entries(&text);
    assert_eq!(e.len(), dim(&text));
    for (i, j, _, re, im) in e {
        assert_eq!(i, j);
        assert_eq!((re, im), (0.0, 1.0));
    }
}

#[test]
fn number_generator_is_diagonal_in_total_degree() {
    let o = osp(&["emit-matrix", "-g", "number", "--m-f", "2", "--m-b", "1", "--degree-cap", "6", "--file", "-"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let e = entries(&text);
    // The vacuum is the only basis vector annihilated.
    assert_eq!(e.len(), dim(&text) - 1);
    for (i, j, [k, l], re, im) in e {
        assert_eq!(i, j);
        assert_eq!(re, 0.0);
        assert_eq!(im, f64::from(k + l));
    }
}

#[test]
fn emitted_matrix_is_reproducible_and_lands_in_output_dir() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().to_str().unwrap();
    let args = ["emit-matrix", "-g", "odd_lin_re_b1f1", "-o", out];
    assert!(osp(&args).status.success());
    let path = tmp.path().join("matrices/odd_lin_re_b1f1.triplets");
    let first = std::fs::read(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert!(osp(&args).status.success());
    assert_eq!(first, std::fs::read(&path).unwrap());
    assert!(String::from_utf8(first).unwrap().contains("enumeration graded-lex-v1"));
}

#[test]
fn unknown_generator_is_rejected() {
    let o = osp(&["emit-matrix", "-g", "nope", "--file", "-"]);
    assert_eq!(o.status.code(), Some(EXIT_CONFIG));
    assert_eq!(error_kind(&o), "unknown_generator");
}

#[test]
fn output_dir_precedence_is_flag_then_env_then_file() {
    let tmp = TempDir::new().unwrap();
    let file_dir = tmp.path().join("from-file");
    let env_dir = tmp.path().join("from-env");
    let flag_dir = tmp.path().join("from-flag");
    let text = format!("{SMALL}\n[output]\ndir = {:?}\n", file_dir.to_str().unwrap());
    let cfg = write_config(tmp.path(), &text);
    let bin = env!("CARGO_BIN_EXE_osp");

    let o = Command::new(bin).args(["run", "-c", &cfg]).env(OUTPUT_DIR_ENV, &env_dir).output().unwrap();
    assert_eq!(o.status.code(), Some(EXIT_PASS), "{}", stdout(&o));
    assert!(env_dir.join("summary.json").exists());
    assert!(!file_dir.exists());

    let o = Command::new(bin)
        .args(["run", "-c", &cfg, "-o", flag_dir.to_str().unwrap()])
        .env(OUTPUT_DIR_ENV, &env_dir)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(EXIT_PASS));
    assert!(flag_dir.join("summary.json").exists());

    let o = osp(&["run", "-c", &cfg]);
    assert_eq!(o.status.code(), Some(EXIT_PASS));
    assert!(file_dir.join("reports.jsonl").exists());
}

fn read_tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                files.push((p.strip_prefix(dir).unwrap().display().to_string(), std::fs::read(&p).unwrap()));
            }
        }
    }
    files.sort();
    files
}

#[test]
fn small_run_is_byte_deterministic() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), SMALL);
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    for d in [&a, &b] {
        let o = osp(&["run", "-c", &cfg, "-o", d.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(EXIT_PASS), "{}", stdout(&o));
    }
    let ta = read_tree(&a);
    assert!(ta.iter().any(|(n, _)| n == "reports.jsonl"));
    assert!(ta.iter().any(|(n, _)| n == "tables/moments.csv"));
    assert_eq!(ta, read_tree(&b));

    // Records come out in suite-name order regardless of the config order.
    let reports = String::from_utf8(ta.iter().find(|(n, _)| n == "reports.jsonl").unwrap().1.clone()).unwrap();
    let suites: Vec<String> = reports
        .lines()
        .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap()["suite"].as_str().unwrap().to_string())
        .collect();
    let mut sorted = suites.clone();
    sorted.sort();
    assert_eq!(suites, sorted);
}

#[test]
fn seed_changes_sampled_results() {
    let mut a: RunConfig = RunConfig::from_toml(SMALL).unwrap();
    a.suites = vec!["algebra".into()];
    let mut b = a.clone();
    b.seed = Some(12);
    let ra = execute(&a).unwrap();
    let rb = execute(&b).unwrap();
    assert_ne!(ra.tables[0].rows, rb.tables[0].rows);
    assert_eq!(ra.tables[0].rows, execute(&a).unwrap().tables[0].rows);
}

#[test]
fn failing_check_still_writes_every_artifact() {
    let tmp = TempDir::new().unwrap();
    // A zero Jacobi tolerance cannot survive rounding.
    let text = format!("{SMALL}\n[tolerances]\njacobi = 0.0\n");
    let cfg = write_config(tmp.path(), &text);
    let out = tmp.path().join("out");
    let o = osp(&["run", "-c", &cfg, "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(EXIT_FAILURE));
    assert!(stdout(&o).contains("FAILED algebra/graded_jacobi"));
    let summary: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["status"], "fail");
    assert_eq!(summary["failed_checks"][0], "algebra/graded_jacobi");
    assert!(out.join("reports.jsonl").exists());
    assert!(out.join("tables/algebra_triples.csv").exists());
}

#[test]
fn quick_config_passes() {
    let tmp = TempDir::new().unwrap();
    let cfg = configs_dir().join("quick.toml");
    let o = osp(&["run", "-c", cfg.to_str().unwrap(), "-o", tmp.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(EXIT_PASS), "{}", stdout(&o));
}
