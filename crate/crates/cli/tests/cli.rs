use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn snblock(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_snblock")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn generate(dir: &Path, n: &str, u: &str) -> (String, String) {
    let records = dir.join("records.csv").to_string_lossy().into_owned();
    let truth = dir.join("truth.csv").to_string_lossy().into_owned();
    let o = snblock(&[
        "generate",
        "--n",
        n,
        "--u",
        u,
        "--dist",
        "zipf",
        "--dup-rate",
        "0.2",
        "--seed",
        "4",
        "--out",
        &records,
        "--truth",
        &truth,
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    (records, truth)
}

fn kv(text: &str, key: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")))
        .unwrap_or_else(|| panic!("no {key} in\n{text}"))
        .to_string()
}

const SEVEN_PEOPLE: &str = "id,first,last,zip
1,Cathy,Ransom,77111
2,Catherine,Ridley,77093
3,Cathy,Ridley,77093
4,John,Rogers,78751
5,J.,Rogers,78732
6,John,Ridley,77093
7,John,Ridley Sr.,77093
";

#[test]
fn seven_people_modes() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("t1.csv");
    fs::write(&input, SEVEN_PEOPLE).unwrap();
    let input = input.to_str().unwrap();
    let o = snblock(&["block", "--input", input, "--mode", "sn-local"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 6);
    let o = snblock(&["block", "--input", input, "--mode", "mapreduce", "--reducers", "3"]);
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 4);
    // score first, then ids, best score on top
    let scores: Vec<f64> = out
        .lines()
        .map(|l| l.split(',').next().unwrap().parse().unwrap())
        .collect();
    assert!(scores.windows(2).all(|w| w[0] >= w[1]));
    let o = snblock(&["block", "--input", input, "--mode", "traditional"]);
    assert_eq!(stdout(&o).lines().count(), 4);
}

#[test]
fn report_counts_match_output() {
    let dir = TempDir::new().unwrap();
    let (records, truth) = generate(dir.path(), "150", "6");
    for mode in ["sn-local", "sn-global", "traditional", "mapreduce"] {
        let out = dir.path().join(format!("{mode}.csv"));
        let rep = dir.path().join(format!("{mode}.txt"));
        let o = snblock(&[
            "block",
            "--input",
            &records,
            "--mode",
            mode,
            "--out",
            out.to_str().unwrap(),
            "--report",
            rep.to_str().unwrap(),
            "--truth",
            &truth,
        ]);
        assert!(o.status.success(), "{mode}: {}", String::from_utf8_lossy(&o.stderr));
        let lines = fs::read_to_string(&out).unwrap().lines().count();
        let report = fs::read_to_string(&rep).unwrap();
        assert_eq!(kv(&report, "candidates"), lines.to_string(), "{mode}");
        assert_eq!(kv(&report, "mode"), mode);
        let pc: f64 = kv(&report, "pairs_completeness").parse().unwrap();
        assert!((0.0..=1.0).contains(&pc));
    }
}

#[test]
fn mapreduce_output_is_configuration_independent() {
    let dir = TempDir::new().unwrap();
    let (records, _) = generate(dir.path(), "120", "5");
    let run = |m: &str, r: &str, seed: &str, extra: &[&str]| {
        let mut args = vec![
            "block",
            "--input",
            &records,
            "--mode",
            "mapreduce",
            "--mappers",
            m,
            "--reducers",
            r,
            "--seed",
            seed,
        ];
        args.extend_from_slice(extra);
        let o = snblock(&args);
        assert!(o.status.success());
        o.stdout
    };
    let base = run("1", "1", "0", &[]);
    assert_eq!(base, run("4", "10", "9", &[]));
    assert_eq!(base, run("2", "5", "3", &["--sequential"]));
}

#[test]
fn config_file_supplies_defaults() {
    let dir = TempDir::new().unwrap();
    let (records, _) = generate(dir.path(), "100", "4");
    let cfg = dir.path().join("run.conf");
    fs::write(
        &cfg,
        format!("# mapreduce run\ninput = {records}\nmode = mapreduce\nreducers = 2\n"),
    )
    .unwrap();
    let o = snblock(&["block", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let first = stdout(&o).lines().next().unwrap().to_string();
    assert_eq!(first.split(',').count(), 3);
    // the command line overrides the file
    let o = snblock(&["block", "--config", cfg.to_str().unwrap(), "--mode", "sn-local"]);
    assert_eq!(stdout(&o).lines().count(), 99);
    fs::write(&cfg, "input = x.csv\nbogus = 1\n").unwrap();
    assert_eq!(
        snblock(&["block", "--config", cfg.to_str().unwrap()]).status.code(),
        Some(1)
    );
}

#[test]
fn multi_pass_unions_passes() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("t1.csv");
    fs::write(&input, SEVEN_PEOPLE).unwrap();
    let o = snblock(&[
        "block",
        "--input",
        input.to_str().unwrap(),
        "--mode",
        "sn-multi",
        "--pass",
        "initials@jaccard",
        "--pass",
        "first:2:3@cosine",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let n = stdout(&o).lines().count();
    assert!((6..=12).contains(&n));
    let o = snblock(&["block", "--input", input.to_str().unwrap(), "--mode", "sn-multi"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let dup = dir.path().join("dup.csv");
    fs::write(&dup, "1,a\n1,b\n").unwrap();
    assert_eq!(
        snblock(&["block", "--input", dup.to_str().unwrap()]).status.code(),
        Some(1)
    );
    assert_eq!(snblock(&["block", "--mode", "nope"]).status.code(), Some(1));
    assert_eq!(
        snblock(&["reduce-verify", "--theorem", "2", "--max-m", "12"])
            .status
            .code(),
        Some(2)
    );
    let big = dir.path().join("big.csv");
    fs::write(&big, (1..=12).map(|i| format!("{i},x\n")).collect::<String>()).unwrap();
    let o = snblock(&["order-block", "--input", big.to_str().unwrap(), "--brute-force"]);
    assert_eq!(o.status.code(), Some(2));
    let o = snblock(&["order-block", "--input", big.to_str().unwrap(), "--solver", "greedy"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(snblock(&["--help"]).status.code(), Some(0));
}

#[test]
fn reduce_verify_reports() {
    let o = snblock(&["reduce-verify", "--theorem", "3", "--seeds", "5"]);
    assert!(o.status.success());
    assert_eq!(kv(&stdout(&o), "result"), "PASS");
    let o = snblock(&["reduce-verify", "--theorem", "2", "--seeds", "20", "--k-offset", "1"]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert_eq!(kv(&out, "result"), "FAIL");
    assert!(kv(&out, "counterexample").contains("source=true"));
    let o = snblock(&["reduce-verify", "--theorem", "cor1", "--seeds", "20", "--max-m", "5"]);
    assert!(o.status.success());
}

#[test]
fn order_block_and_graph_dump() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("blk.csv");
    fs::write(&input, "1,john smith\n2,jon smith\n3,john smyth\n4,john smith jr\n").unwrap();
    let graph = dir.path().join("g.txt");
    let o = snblock(&[
        "order-block",
        "--input",
        input.to_str().unwrap(),
        "--graph-out",
        graph.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let tsp = stdout(&o);
    let brute = stdout(&snblock(&[
        "order-block",
        "--input",
        input.to_str().unwrap(),
        "--brute-force",
    ]));
    assert_eq!(kv(&tsp, "score"), kv(&brute, "score"));
    // four records plus the dummy vertex
    assert_eq!(fs::read_to_string(&graph).unwrap().lines().count(), 10);
    let o = snblock(&["order-block", "--graph", graph.to_str().unwrap(), "--solver", "exact"]);
    assert_eq!(kv(&stdout(&o), "tour").split(',').count(), 5);
}

#[test]
fn score_and_bench() {
    let dir = TempDir::new().unwrap();
    let cands = dir.path().join("c.csv");
    let truth = dir.path().join("t.csv");
    fs::write(&cands, "1,2\n2,3\n3,4\n4,5\n5,6\n6,7\n").unwrap();
    fs::write(&truth, "1,2\n6,5\n1,7\n").unwrap();
    let o = snblock(&[
        "score",
        "--candidates",
        cands.to_str().unwrap(),
        "--truth",
        truth.to_str().unwrap(),
    ]);
    let out = stdout(&o);
    let pc: f64 = kv(&out, "pairs_completeness").parse().unwrap();
    assert!((pc - 1.0 / 3.0).abs() < 1e-12);
    fs::write(&cands, "0.5,2,1\n").unwrap();
    let o = snblock(&[
        "score",
        "--candidates",
        cands.to_str().unwrap(),
        "--truth",
        truth.to_str().unwrap(),
        "--format",
        "scored",
    ]);
    assert_eq!(kv(&stdout(&o), "pairs_completeness"), "1");
    let o = snblock(&["bench", "--module", "sn-local", "--sizes", "60,90", "--u", "5"]);
    let table = stdout(&o);
    assert_eq!(table.lines().count(), 5);
    assert!(table.lines().skip(1).all(|l| {
        let f: Vec<&str> = l.split(',').collect();
        f[5].parse::<usize>().unwrap() + 1 == f[2].parse::<usize>().unwrap()
    }));
}
