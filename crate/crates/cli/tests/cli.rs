use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use rpac_core::code::Code;
use rpac_core::construction::example_64_14_profile;
use rpac_core::precode::{Polynomial, POLY_10};
use rpac_core::spectrum::enumerate_by_message;

fn rpac(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rpac")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn construct_then_message_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    let prof = dir.path().join("p.toml");
    stdout(&rpac(&["construct", "--n", "64", "--k", "14", "--design-snr", "4", "--profile-out", path(&prof)]));
    assert!(fs::read_to_string(&prof).unwrap().contains("info_set = [31, 46, 47, 51, 53, 54, 55, 57, 58, 59, 60, 61, 62, 63]"));

    let out = stdout(&rpac(&[
        "spectrum", "--profile", path(&prof), "--scheme", "rpac", "--poly", "1,1,0,1,1,0,1,1,0,1", "--method", "message",
    ]));
    let code = Code::rpac(example_64_14_profile(), Polynomial::new(&POLY_10).unwrap()).unwrap();
    let expect = enumerate_by_message(&code).unwrap();
    assert!(out.contains(&format!("wmin = {}\n", expect.wmin.unwrap())), "{out}");
    assert!(out.contains(&format!("A_wmin = {}\n", expect.a_wmin)), "{out}");
    // Resolved configuration travels with the report.
    assert!(out.contains("# scheme = \"rpac\""), "{out}");
    assert!(out.contains("# poly = \"1,1,0,1,1,0,1,1,0,1\""), "{out}");
}

#[test]
fn support_spectrum_128() {
    let out = stdout(&rpac(&[
        "spectrum", "--n", "128", "--k", "110", "--design-snr", "4", "--scheme", "polar", "--method", "support", "--wcap", "4",
    ]));
    assert!(out.contains("wmin = 4\n") && out.contains("A_wmin = 4448\n"), "{out}");
}

#[test]
fn budget_is_refused_with_estimate() {
    let o = rpac(&["spectrum", "--n", "64", "--k", "50", "--design-snr", "4", "--scheme", "pac", "--wcap", "4", "--budget", "1000"]);
    assert!(!o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("budget") && err.contains("679120"), "{err}");
}

#[test]
fn simulate_without_points_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("b.csv");
    stdout(&rpac(&[
        "simulate", "--scheme", "rpac", "--n", "64", "--k", "50", "--design-snr", "4", "--list-size", "8", "--ebn0",
        "--out", path(&csv),
    ]));
    assert_eq!(fs::read_to_string(&csv).unwrap(), "ebn0_db,frames,block_errors,bler,union_bound,elapsed_s\n");
    let recipe = fs::read_to_string(dir.path().join("b.csv.recipe.toml")).unwrap();
    assert!(recipe.contains("seed = 1") && recipe.contains("list_size = 8"), "{recipe}");
}

fn strip_elapsed(csv: &str) -> Vec<String> {
    csv.lines().map(|l| l.rsplit_once(',').unwrap().0.to_string()).collect()
}

#[test]
fn simulate_from_recipe_is_replayable() {
    let dir = tempfile::tempdir().unwrap();
    let recipe = dir.path().join("r.toml");
    fs::write(
        &recipe,
        r#"seed = 7

[code]
scheme = "pac"
n = 64
k = 50
design_snr_db = 4.0

[decoder]
list_size = 4

[sweep]
ebn0_db = [2.0, 3.0]
min_errors = 20
max_frames = 2000

[output]
bound_wcap = 4
"#,
    )
    .unwrap();
    let a = dir.path().join("a.csv");
    stdout(&rpac(&["simulate", "--recipe", path(&recipe), "--out", path(&a)]));
    // Replay from the recipe the first run wrote.
    let side = dir.path().join("a.csv.recipe.toml");
    let b = dir.path().join("b.csv");
    stdout(&rpac(&["simulate", "--recipe", path(&side), "--out", path(&b)]));
    let (ta, tb) = (fs::read_to_string(&a).unwrap(), fs::read_to_string(&b).unwrap());
    assert_eq!(strip_elapsed(&ta), strip_elapsed(&tb));
    let rows: Vec<Vec<&str>> = ta.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 2);
    for r in &rows {
        assert_eq!(r[2], "20");
        assert!(r[4].parse::<f64>().unwrap() > 0.0);
    }
    // Flags override the recipe.
    let c = dir.path().join("c.csv");
    stdout(&rpac(&["simulate", "--recipe", path(&recipe), "--ebn0", "2.0", "--seed", "8", "--out", path(&c)]));
    assert_eq!(fs::read_to_string(&c).unwrap().lines().count(), 2);
    assert!(fs::read_to_string(dir.path().join("c.csv.recipe.toml")).unwrap().contains("seed = 8"));
}

#[test]
fn decode_noiseless_word() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("y.txt");
    fs::write(&input, "0".repeat(64)).unwrap();
    let out = stdout(&rpac(&[
        "decode", "--n", "64", "--k", "50", "--design-snr", "4", "--scheme", "rpac", "--list-size", "4", "--input", path(&input),
    ]));
    let first = out.lines().find(|l| l.starts_with("1,")).unwrap();
    assert!(first.ends_with(&format!(",-,{}", "0".repeat(50))), "{first}");
    assert_eq!(out.lines().filter(|l| !l.starts_with('#')).count(), 5);

    fs::write(&input, "0000000000000000").unwrap();
    let out = stdout(&rpac(&[
        "decode", "--n", "64", "--k", "50", "--design-snr", "4", "--crc", "--list-size", "2", "--input", path(&input),
    ]));
    assert!(out.contains("\n1,") && out.contains(",true,"), "{out}");

    let o = rpac(&[
        "decode", "--n", "64", "--k", "50", "--design-snr", "4", "--scheme", "rpac", "--list-size", "1", "--input", path(&input),
    ]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("list size 1 is below the minimum 2"));
}

#[test]
fn cosets_table() {
    let out = stdout(&rpac(&["cosets", "--n", "64", "--k", "14", "--design-snr", "4"]));
    assert!(out.contains("leader,row_weight,in_b,k_i_size,class,two_pow_k_i,a_i_wmin_pac"));
    assert!(out.contains("# wmin = 16"));
    assert!(out.contains("\n63,64,false,0,incapable_no_frozen,"), "{out}");
}

#[test]
fn usage_errors() {
    let o = rpac(&["construct", "--n", "64", "--k", "14"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("--design-snr"));
    let o = rpac(&["spectrum", "--n", "64", "--k", "14", "--design-snr", "4", "--scheme", "turbo"]);
    assert_eq!(o.status.code(), Some(1));
    let o = rpac(&["spectrum", "--frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    let o = rpac(&["spectrum", "--n", "64", "--k", "14", "--design-snr", "4", "--scheme", "polar", "--poly", "1,1"]);
    assert!(!o.status.success());
    let o = rpac(&["spectrum", "--profile", "/nonexistent/p.toml", "--scheme", "polar"]);
    assert!(!o.status.success());
}

#[test]
fn help_lists_flags() {
    let out = stdout(&rpac(&["simulate", "--help"]));
    for flag in ["--recipe", "--scheme", "--poly", "--crc", "--list-size", "--metric", "--check-node", "--ebn0", "--min-errors", "--max-frames", "--seed", "--out", "--bound-wcap", "--budget", "--profile", "--design-snr"] {
        assert!(out.contains(flag), "{flag} missing");
    }
}
