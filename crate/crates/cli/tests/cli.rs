use std::path::PathBuf;
use std::process::{Command, Output};

fn hankel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hankel"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn terms_file(name: &str, terms: Vec<String>) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hankel-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string(&terms).unwrap()).unwrap();
    path
}

fn binomial(n: u64, k: u64) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

const CATALAN: [&str; 6] = ["-a", "4", "-b", "-6", "-g", "2"];
const CENTRAL: [&str; 6] = ["-a", "4", "-b", "-2", "-g", "1"];

/// Subcommand arguments followed by spec flags.
fn with<'a>(spec: &[&'a str], command: &[&'a str]) -> Vec<&'a str> {
    let mut v = command.to_vec();
    v.extend_from_slice(spec);
    v
}

#[test]
fn gen_examples() {
    let o = hankel(&[
        "gen", "-a", "4", "-b", "-6", "-g", "2", "--a0", "1", "-c", "5",
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "1 1 2 5 14");

    let o = hankel(&[
        "gen", "-a", "1", "-b", "-1", "-g", "2", "--a0", "1", "-c", "3",
    ]);
    assert_eq!(stdout(&o).trim(), "1 1/2 1/3");

    let o = hankel(&["gen", "-a", "1", "-b", "-1", "-g", "0", "-c", "3"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("gamma"));

    assert_eq!(
        code(&hankel(&[
            "gen", "-a", "0.5", "-b", "1", "-g", "1", "-c", "3"
        ])),
        2
    );
}

#[test]
fn transform_examples() {
    let o = hankel(&with(
        &CATALAN,
        &["transform", "-n", "6", "-k", "1", "--method", "closed"],
    ));
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("1 "));

    let o = hankel(&with(
        &CENTRAL,
        &["transform", "-n", "5", "-k", "0", "--method", "auto"],
    ));
    assert!(stdout(&o).starts_with("16 "));

    let o = hankel(&[
        "transform",
        "-a",
        "2",
        "-b",
        "1",
        "-g",
        "3",
        "-n",
        "1",
        "-k",
        "7",
        "--method",
        "bareiss",
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let gen = hankel(&["gen", "-a", "2", "-b", "1", "-g", "3", "-c", "8"]);
    let a7 = stdout(&gen).split_whitespace().last().unwrap().to_string();
    assert_eq!(v["value"], a7);
    assert_eq!(v["method"], "bareiss");
}

#[test]
fn closed_matches_bareiss_for_negative_fractional_gamma() {
    let args = ["-a", "1", "-b", "1", "-g", "-3/2"];
    let closed = hankel(&with(
        &args,
        &["transform", "-n", "3", "-k", "2", "--method", "closed"],
    ));
    let bareiss = hankel(&with(
        &args,
        &["transform", "-n", "3", "-k", "2", "--method", "bareiss"],
    ));
    assert_eq!(code(&closed), 0);
    assert_eq!(
        stdout(&closed).split_whitespace().next(),
        stdout(&bareiss).split_whitespace().next()
    );
}

#[test]
fn verify_examples() {
    for (spec, n_max, k_max) in [
        (CATALAN.to_vec(), "6", "4"),
        (vec!["-a", "1", "-b", "-1", "-g", "2"], "5", "3"),
        (vec!["-a", "0", "-b", "1", "-g", "1"], "5", "3"),
    ] {
        let o = hankel(&with(
            &spec,
            &["verify", "--n-max", n_max, "--k-max", k_max],
        ));
        assert_eq!(code(&o), 0, "{}", stdout(&o));
        assert!(stdout(&o).contains("all agree"));
    }
}

#[test]
fn verify_random_is_reproducible() {
    let args = [
        "verify", "--random", "10", "--seed", "11", "--n-max", "4", "--k-max", "3", "--format",
        "json",
    ];
    let a = hankel(&args);
    let b = hankel(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(stdout(&a), stdout(&b));
    let v: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(v["all_agree"], true);
    assert_eq!(v["specs"].as_array().unwrap().len(), 10);
}

#[test]
fn catalog_examples() {
    let o = hankel(&["catalog", "eval", "catalan", "-n", "5", "-k", "2"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("simplified: 6"));
    assert!(stdout(&o).contains("principal:  6"));

    let o = hankel(&[
        "catalog",
        "eval",
        "binomial_shifted",
        "--m",
        "2",
        "--lambda",
        "7/2",
        "-n",
        "4",
        "-k",
        "0",
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["simplified"], "0");
    assert_eq!(v["principal"], "0");

    let o = hankel(&["catalog", "list"]);
    assert_eq!(stdout(&o).lines().count(), 11);

    assert_eq!(
        code(&hankel(&["catalog", "eval", "nonesuch", "-n", "1"])),
        2
    );
    assert_eq!(
        code(&hankel(&["catalog", "eval", "binomial_lambda", "-n", "1"])),
        2
    );

    let o = hankel(&[
        "catalog",
        "verify",
        "reciprocal_catalan",
        "--n-max",
        "4",
        "--k-max",
        "2",
    ]);
    assert_eq!(code(&o), 0);
}

#[test]
fn reciprocal_examples() {
    let o = hankel(&with(
        &CATALAN,
        &["reciprocal", "-n", "2", "-k", "0", "--format", "json"],
    ));
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["value"], "-1/2");
    let s = &v["reciprocal_spec"];
    assert_eq!(
        (&s["alpha"], &s["beta"], &s["gamma"], &s["a0"]),
        (&"1/4".into(), &"3/8".into(), &"1/2".into(), &"1".into())
    );

    let o = hankel(&with(&CENTRAL, &["reciprocal", "-n", "1", "-k", "2"]));
    assert_eq!(stdout(&o).lines().last(), Some("1/6"));

    let o = hankel(&["reciprocal", "-a", "-1", "-b", "3", "-g", "1", "-n", "2"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn detect_inverse_squares() {
    let path = terms_file(
        "squares.json",
        (0..13)
            .map(|n| format!("1/{}", (n + 1) * (n + 1)))
            .collect(),
    );
    let o = hankel(&[
        "detect",
        "--terms-file",
        path.to_str().unwrap(),
        "--n-max",
        "7",
    ]);
    assert_eq!(code(&o), 4);
    assert!(stdout(&o).contains("largest prime 1280587616051046200369  verdict"));

    let o = hankel(&[
        "detect",
        "--terms-file",
        path.to_str().unwrap(),
        "--n-max",
        "7",
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["reports"][6]["largest_prime"], "1280587616051046200369");
    assert_eq!(v["reports"][2]["value"], "647/4665600");
}

#[test]
fn detect_catalan_plausible() {
    let o = hankel(&with(&CATALAN, &["detect", "--n-max", "7"]));
    assert_eq!(code(&o), 0);
}

#[test]
fn detect_three_n_plus_one() {
    let terms: Vec<String> = (0..13)
        .map(|n| binomial(3 * n + 1, n).to_string())
        .collect();
    let path = terms_file("c3n1.json", terms);
    let p = path.to_str().unwrap();
    assert_eq!(
        code(&hankel(&["detect", "--terms-file", p, "--n-max", "7"])),
        4
    );
    // The n = 5 value carries the prime 20323; at n_max = 6 only a bound below it flags it.
    assert_eq!(
        code(&hankel(&[
            "detect",
            "--terms-file",
            p,
            "--n-max",
            "6",
            "--bound",
            "20000"
        ])),
        4
    );
    assert_eq!(
        code(&hankel(&[
            "detect",
            "--terms-file",
            p,
            "--n-max",
            "6",
            "--bound",
            "30000"
        ])),
        0
    );
}

#[test]
fn detect_rejects_bad_input() {
    let path = terms_file("short.json", vec!["1".into(), "2".into()]);
    assert_eq!(
        code(&hankel(&[
            "detect",
            "--terms-file",
            path.to_str().unwrap(),
            "--n-max",
            "4"
        ])),
        2
    );
    let path = terms_file("junk.json", vec!["x".into()]);
    assert_eq!(
        code(&hankel(&[
            "detect",
            "--terms-file",
            path.to_str().unwrap(),
            "--n-max",
            "1"
        ])),
        2
    );
}

#[test]
fn config_file_and_flags() {
    let dir = std::env::temp_dir().join(format!("hankel-cfg-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("hankel.conf");
    std::fs::write(&cfg, "format = json\njobs = 2\n").unwrap();
    let c = cfg.to_str().unwrap();
    let o = hankel(&with(&CATALAN, &["--config", c, "gen", "-c", "3"]));
    assert_eq!(stdout(&o).trim(), r#"["1","1","2"]"#);
    let o = hankel(&with(
        &CATALAN,
        &["--config", c, "--format", "text", "gen", "-c", "3"],
    ));
    assert_eq!(stdout(&o).trim(), "1 1 2");

    std::fs::write(&cfg, "colour = red\n").unwrap();
    assert_eq!(
        code(&hankel(&with(&CATALAN, &["--config", c, "gen", "-c", "3"]))),
        2
    );
}

#[test]
fn json_rationals_round_trip() {
    let o = hankel(&[
        "gen", "-a", "1/3", "-b", "-2/5", "-g", "7/2", "--a0", "-3", "-c", "6", "--format", "json",
    ]);
    let terms: Vec<String> = serde_json::from_str(&stdout(&o)).unwrap();
    let text = hankel(&[
        "gen", "-a", "1/3", "-b", "-2/5", "-g", "7/2", "--a0", "-3", "-c", "6",
    ]);
    let plain: Vec<String> = stdout(&text).split_whitespace().map(String::from).collect();
    assert_eq!(terms, plain);
    for t in &terms {
        let reparsed = hankel_core::arith::parse_rational(t).unwrap();
        assert_eq!(&hankel_core::arith::format_rational(&reparsed), t);
    }
}
