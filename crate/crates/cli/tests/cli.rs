use std::path::Path;
use std::process::{Command, Output};

fn sicnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sicnet"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn report_value(report: &str, key: &str) -> f64 {
    report
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")))
        .and_then(|v| v.split_whitespace().next())
        .unwrap()
        .parse()
        .unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn train_len_examples() {
    let o = sicnet(&["train-len", "3", "0.01", "0.1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(report_value(&stdout(&o), "M"), 145.0);

    let o = sicnet(&["train-len", "1", "0.5", "10"]);
    assert_eq!(report_value(&stdout(&o), "M"), 1.0);

    let strict = report_value(&stdout(&sicnet(&["train-len", "4", "1e-6", "0.01"])), "M");
    let loose = report_value(&stdout(&sicnet(&["train-len", "4", "1e-3", "0.01"])), "M");
    assert!((strict / loose - 1.83).abs() < 0.01, "{strict} / {loose}");
}

#[test]
fn invalid_scalars_exit_with_config_error() {
    assert_eq!(sicnet(&["train-len", "0", "0.01", "0.1"]).status.code(), Some(2));
    assert_eq!(sicnet(&["train-len", "3", "1.5", "0.1"]).status.code(), Some(2));
    assert_eq!(sicnet(&["train-len", "3", "abc", "0.1"]).status.code(), Some(2));
}

#[test]
fn empty_lambda_grid_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.conf", "# nothing to sweep\nlambda_grid =\n");
    let o = sicnet(&["pout-sweep", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("lambda_grid"));
}

#[test]
fn unknown_keys_and_bad_params_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "a.conf", "lamda = 0.1\n");
    assert_eq!(sicnet(&["simulate", "--config", &cfg]).status.code(), Some(2));
    let cfg = write(dir.path(), "b.conf", "N = 3\nL = 3\n");
    assert_eq!(sicnet(&["simulate", "--config", &cfg]).status.code(), Some(2));
    assert_eq!(sicnet(&["simulate", "--mode", "psychic"]).status.code(), Some(2));
    assert_eq!(sicnet(&["simulate", "--trials", "0"]).status.code(), Some(2));
}

#[test]
fn pout_sweep_is_reproducible_across_runs_and_threads() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "sweep.conf",
        "lambda_grid = logspace(0.005, 0.05, 3)\nL_grid = 1, 3\nM_list = 11\nmode = perfect, shortcut\ntrials = 3000\nmaster_seed = 7\n",
    );
    let run = |name: &str, threads: &str| {
        let out = dir.path().join(name);
        let o = sicnet(&["pout-sweep", "--config", &cfg, "--threads", threads, "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read(out).unwrap()
    };
    let a = run("a.csv", "1");
    let b = run("b.csv", "1");
    let c = run("c.csv", "3");
    assert_eq!(a, b);
    assert_eq!(a, c);
    let text = String::from_utf8(a).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "lambda,mode,L,M,p_sim,ci,p_lower,p_upper");
    assert_eq!(lines.count(), 12);

    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("a.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 7);
    assert_eq!(manifest["command"], "pout-sweep");
    assert!(manifest["wall_time_s"].as_f64().unwrap() >= 0.0);
    assert!(manifest["git_describe"].is_string());
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "s.conf", "master_seed = 1\ntrials = 500\nlambda_grid = 0.01\n");
    let out = dir.path().join("s.csv");
    let o = sicnet(&["simulate", "--config", &cfg, "--seed", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().next().unwrap(), "lambda,trials,p_hat,ci,mode,L,N,alpha,theta,M,seed");
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[1], "500");
    assert_eq!(row[10], "2");
}

#[test]
fn tc_sweep_capacity_column() {
    let o = sicnet(&[
        "tc-sweep",
        "--trials",
        "20000",
        "--set",
        "eps_grid=0.1,0.05",
        "--set",
        "L_grid=0..=2",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "eps,L,M,lambda_star,capacity,bracket_lo,bracket_hi");
    let mut n = 0;
    let mut last_l = None;
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        let eps: f64 = f[0].parse().unwrap();
        let lambda: f64 = f[3].parse().unwrap();
        let cap: f64 = f[4].parse().unwrap();
        let want = (1.0 - eps) * 4f64.log2() * lambda;
        assert!((cap / want - 1.0).abs() < 1e-12);
        last_l = Some(f[1].to_string());
        n += 1;
    }
    assert_eq!(n, 6);
    assert_eq!(last_l.as_deref(), Some("2"));
}

#[test]
fn bounds_and_dump_tables() {
    let o = sicnet(&["bounds", "--set", "lambda_grid=0.001,0.01"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().next().unwrap(), "lambda,lower,upper,Lambda1,Lambda2,Lambda3,quad_err");
    for line in text.lines().skip(1) {
        let f: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert!(f[1] <= f[2]);
    }

    let o = sicnet(&["dump", "--trials", "3", "--seed", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().next().unwrap(), "trial_id,r_T,J_T,canceled_flag,primary_flag");
    for id in 0..3 {
        let rows: Vec<Vec<&str>> = text
            .lines()
            .skip(1)
            .map(|l| l.split(',').collect::<Vec<_>>())
            .filter(|f| f[0] == id.to_string())
            .collect();
        assert_eq!(rows.iter().filter(|f| f[3] == "1").count(), 1);
        assert_eq!(rows.iter().filter(|f| f[4] == "1").count(), 1);
    }
}

#[test]
fn unwritable_output_is_reported() {
    let o = sicnet(&["bounds", "--set", "lambda_grid=0.01", "--out", "/nonexistent-dir/x.csv"]);
    assert_ne!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cannot create"));
}
