use std::fs;
use std::path::Path;

use portal_core::harness::{
    self, condition_orders, import_and_analyze, import_human_logs, latin_square_orders, report_from_dir, run_batch,
    write_trial_log_csv, ExperimentConfig, HarnessError, Measure, Preset, ANOVA_COLUMNS, TRIAL_SUMMARY_COLUMNS,
};
use portal_core::tasks::TaskKind;

fn fixture() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/sample_session.csv"))
}

fn config_err(text: &str) -> (String, String) {
    match ExperimentConfig::from_toml_str(text) {
        Err(HarnessError::Config { path, message }) => (path, message),
        other => panic!("expected a config error, got {other:?}"),
    }
}

#[test]
fn config_errors_name_the_field() {
    let (path, _) = config_err("schema_version = 1\npreset = \"custom\"\ndistances = [3.0, -1.0]\n");
    assert_eq!(path, "distances[1]");
    let (path, _) = config_err("schema_version = 1\n[agent]\nfitts_b = \"fast\"\n");
    assert_eq!(path, "agent.fitts_b");
    let (path, _) = config_err("schema_version = 1\n[room]\nwidth = 3\n");
    assert!(path.starts_with("room"), "{path}");
    let (path, _) = config_err("schema_version = 2\n");
    assert_eq!(path, "schema_version");
    let (path, message) = config_err("schema_version = 1\npreset = \"study2\"\ntrials_per_cell = 4\n");
    assert_eq!(path, "trials_per_cell");
    assert!(message.contains("study2"));
}

#[test]
fn shipped_configs_resolve_to_presets() {
    let dir = Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs"));
    for preset in [Preset::Study1Task1, Preset::Study1Task2, Preset::Study2] {
        let c = ExperimentConfig::from_file(&dir.join(format!("{preset}.toml"))).unwrap();
        assert_eq!(c, ExperimentConfig::preset(preset));
    }
    let custom = ExperimentConfig::from_file(&dir.join("sample_docking.toml")).unwrap();
    assert_eq!(custom.cell_count(), 4);
}

#[test]
fn condition_orders_are_latin_rows() {
    let c = ExperimentConfig::preset(Preset::Study1Task1);
    let orders = condition_orders(&c);
    assert_eq!(orders.len(), 21);
    for block in orders.chunks(9).filter(|b| b.len() == 9) {
        for pos in 0..9 {
            let mut column: Vec<String> = block.iter().map(|o| format!("{:?}", o[pos])).collect();
            column.sort();
            column.dedup();
            assert_eq!(column.len(), 9);
        }
    }
}

#[test]
fn williams_square_balances_carryover() {
    for n in [2, 4, 6, 8] {
        let rows = latin_square_orders(n, n, 3);
        let mut follows = vec![vec![0; n]; n];
        for r in &rows {
            for w in r.windows(2) {
                follows[w[0]][w[1]] += 1;
            }
        }
        for (i, row) in follows.iter().enumerate() {
            for (j, &count) in row.iter().enumerate() {
                assert_eq!(count, usize::from(i != j), "n={n} {i}->{j}");
            }
        }
    }
}

#[test]
fn simulated_output_reanalyses_identically() {
    let c = ExperimentConfig::preset(Preset::Study2);
    let sessions = run_batch(&c, None).unwrap();
    let dir = tempfile::tempdir().unwrap();
    harness::write_outputs(dir.path(), &c, &sessions).unwrap();
    let imported = import_human_logs(&dir.path().join("trial_log.csv")).unwrap();
    assert_eq!(imported.len(), sessions.len());
    for (a, b) in imported.iter().zip(&sessions) {
        assert_eq!(a.logs, b.logs);
    }
    let original = harness::analyze_sessions(&sessions).unwrap();
    let again = harness::analyze_sessions(&imported).unwrap();
    assert_eq!(original, again);
    let report = report_from_dir(dir.path()).unwrap();
    assert!(report.contains("docking_time_s") && report.contains("Tukey HSD"));

    let summary = fs::read_to_string(dir.path().join("trial_summary.csv")).unwrap();
    let header: Vec<&str> = summary.lines().next().unwrap().split(',').collect();
    assert_eq!(&header[..9], &TRIAL_SUMMARY_COLUMNS[..9]);
    assert_eq!(summary.lines().count(), 1 + 22 * 54);
    let anova = fs::read_to_string(dir.path().join("anova_error_distance_m.csv")).unwrap();
    assert_eq!(anova.lines().next().unwrap(), ANOVA_COLUMNS.join(","));
    assert_eq!(anova.lines().count(), 4);
}

#[test]
fn browser_style_session_produces_tables() {
    let out = tempfile::tempdir().unwrap();
    let (sessions, report) = import_and_analyze(fixture(), Some(out.path())).unwrap();
    assert_eq!(sessions.len(), 3);
    assert!(sessions.iter().all(|s| s.docking_trials() == 8));
    assert!(report.contains("## error_distance_m"));
    let summary = fs::read_to_string(out.path().join("condition_summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 1 + 4 * 3);
    assert!(out.path().join("anova_docking_time_s.csv").exists());
    let analyses = harness::analyze_sessions(&sessions).unwrap();
    assert_eq!(analyses[0].task, TaskKind::Docking);
    assert!(analyses[0].anova(Measure::DockingTime).is_some());
}

#[test]
fn import_rejects_bad_logs() {
    let text = fs::read_to_string(fixture()).unwrap();
    let dir = tempfile::tempdir().unwrap();

    let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
    let row = (2..lines.len()).find(|&i| lines[i].contains(",event,") && !lines[i].contains("trial_start")).unwrap();
    let mut fields: Vec<String> = lines[row].split(',').map(str::to_string).collect();
    fields[9] = "-1".into();
    lines[row] = fields.join(",");
    let path = dir.path().join("decreasing.csv");
    fs::write(&path, lines.join("\n") + "\n").unwrap();
    match import_human_logs(&path) {
        Err(HarnessError::Import { row: r, message }) => {
            assert_eq!(r as usize, row + 1, "{message}");
        }
        other => panic!("expected an import error, got {other:?}"),
    }

    let path = dir.path().join("version.csv");
    let bumped: String = text
        .lines()
        .enumerate()
        .map(|(i, l)| if i == 1 { l.replacen('1', "9", 1) } else { l.to_string() })
        .collect::<Vec<_>>()
        .join("\n");
    fs::write(&path, bumped).unwrap();
    let err = import_human_logs(&path).unwrap_err().to_string();
    assert!(err.contains("schema"), "{err}");
}

#[test]
fn session_counts_match_presets() {
    for (preset, center, ring, docking) in [
        (Preset::Study1Task1, 27, 432, 0),
        (Preset::Study1Task2, 0, 0, 27),
        (Preset::Study2, 0, 0, 54),
    ] {
        let mut c = ExperimentConfig::preset(preset);
        c.participants = 4;
        for s in run_batch(&c, Some(2)).unwrap() {
            assert_eq!((s.center_selections(), s.scored_ring_selections(), s.docking_trials()), (center, ring, docking));
            assert_eq!(s.config_hash, c.hash());
        }
    }
}

#[test]
fn trial_log_is_stable_under_reserialisation() {
    let sessions = import_human_logs(fixture()).unwrap();
    let logs: Vec<_> = sessions.iter().flat_map(|s| s.logs.clone()).collect();
    let mut buf = Vec::new();
    write_trial_log_csv(&logs, &mut buf).unwrap();
    assert_eq!(String::from_utf8(buf).unwrap(), fs::read_to_string(fixture()).unwrap());
}
