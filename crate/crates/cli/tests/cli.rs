use std::path::Path;
use std::process::{Command, Output};

const THREE_LOOPS: &str = r#"{"vertices":[[{"half":0,"dir":"out"},{"half":1,"dir":"in"},{"half":4,"dir":"out"},{"half":3,"dir":"in"},{"half":2,"dir":"out"},{"half":5,"dir":"in"}]],"edges":[[0,1],[2,3],[4,5]],"pairing":[[0,3],[2,1]]}"#;

fn strata(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_strata")).args(args).env_remove("STRATA_MEMBER_CAP").output().unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = strata(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    strata(args).status.code().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn classify_output() {
    assert_eq!(
        stdout(&["classify", "--perm", "6 5 4 3 2 1"]),
        "{\"pi\":[6,5,4,3,2,1],\"profile\":[4],\"genus\":3,\"component\":\"hyperelliptic\",\"spin_parity\":0}\n"
    );
    assert_eq!(
        stdout(&["classify", "--perm", "5 4 3 2 1"]),
        "{\"pi\":[5,4,3,2,1],\"profile\":[1,1],\"genus\":2,\"component\":\"hyperelliptic\",\"spin_parity\":null}\n"
    );
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["classify", "--perm", "1 2 3"]), 2);
    assert_eq!(code(&["classify", "--perm", "4 3 2"]), 1);
    assert_eq!(code(&["classify"]), 1);
    assert_eq!(code(&["classify", "--perm", "2 1", "--bogus"]), 1);
    assert_eq!(code(&["census", "--letters", "1"]), 1);
    assert_eq!(code(&["census", "--letters", "10"]), 3);
    assert_eq!(code(&["--member-cap", "10", "class", "enumerate", "--perm", "6 5 4 3 2 1"]), 3);
    assert_eq!(code(&["diagram", "make", "--type", "E", "--genus", "2"]), 1);
    assert_eq!(code(&["diagram", "make", "--type", "X", "--genus", "4"]), 1);
    assert_eq!(code(&["--help"]), 0);
}

#[test]
fn member_cap_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_strata"))
        .args(["class", "enumerate", "--perm", "6 5 4 3 2 1"])
        .env("STRATA_MEMBER_CAP", "5")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn census_table_and_file() {
    assert_eq!(stdout(&["census", "--letters", "6"]), "6\t[4]\t2\t[31,134]\n");
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("census.tsv");
    assert_eq!(stdout(&["census", "--letters", "7", "--out", path(&file)]), "m=7: 3 classes in 2 strata\n");
    assert_eq!(std::fs::read_to_string(&file).unwrap(), "7\t[3,1]\t1\t[770]\n7\t[2,2]\t2\t[63,294]\n");
}

#[test]
fn class_files() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("class.txt");
    let saved = stdout(&["class", "save", "--perm", "4 3 2 1", "--out", path(&file)]);
    assert_eq!(saved, stdout(&["class", "enumerate", "--perm", "4 3 2 1"]));
    assert_eq!(saved, stdout(&["class", "load", "--in", path(&file)]));
    let text = std::fs::read_to_string(&file).unwrap();
    assert!(text.starts_with("m=4 generators=abd count=7 profile=2\n"), "{text}");
    assert_eq!(
        stdout(&["class", "member", "--in", path(&file), "--perm", "3 1 4 2"]),
        "{\"member\":true,\"pi\":[3,1,4,2]}\n"
    );
    assert_eq!(
        stdout(&["class", "member", "--in", path(&file), "--perm", "2 1 4 3"]),
        "{\"member\":false,\"pi\":[2,1,4,3]}\n"
    );
}

#[test]
fn spin_routes_agree() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("s.json");
    for p in ["4 3 2 1", "6 5 4 3 2 1", "8 7 6 5 4 3 2 1", "6 3 2 5 4 1"] {
        stdout(&["suspend", "--perm", p, "--out", path(&file)]);
        assert_eq!(stdout(&["spin", "--perm", p]), stdout(&["spin", "--surface", path(&file)]), "{p}");
    }
}

#[test]
fn diagram_commands() {
    let dir = tempfile::tempdir().unwrap();
    let fig = dir.path().join("fig.json");
    std::fs::write(&fig, THREE_LOOPS).unwrap();
    assert_eq!(
        stdout(&["diagram", "realize", "--in", path(&fig)]),
        "{\"lengths\":[\"1/3\",\"1/3\",\"1/3\"],\"realizable\":true}\n"
    );

    let h2 = dir.path().join("h2.json");
    stdout(&["diagram", "make", "--type", "H", "--genus", "2", "--out", path(&h2)]);
    let bubbled = dir.path().join("b.json");
    stdout(&["diagram", "bubble", "--in", path(&h2), "--sector-a", "0", "--sector-b", "1", "--out", path(&bubbled)]);
    let b: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&bubbled).unwrap()).unwrap();
    assert_eq!(b["edges"].as_array().unwrap().len(), 5);
    let original = std::fs::read_to_string(&h2).unwrap();
    let pair = (0..3)
        .find(|p| {
            let out = strata(&["diagram", "erase", "--in", path(&bubbled), "--pair", &p.to_string()]);
            out.status.success() && String::from_utf8_lossy(&out.stdout) == original
        })
        .expect("the fresh pair erases back");
    let pair = pair.to_string();
    let out = strata(&["diagram", "erase", "--in", path(&bubbled), "--pair", &pair]);
    assert!(String::from_utf8(out.stderr).unwrap().starts_with("m="));

    assert_eq!(
        stdout(&["diagram", "rotate", "--in", path(&bubbled), "--pair", &pair, "--steps", "0"]),
        std::fs::read_to_string(&bubbled).unwrap()
    );
    assert!(stdout(&["diagram", "make", "--type", "O", "--genus", "3", "--format", "dot"]).starts_with("digraph"));
    assert_eq!(code(&["diagram", "contract", "--in", path(&h2), "--edge", "0"]), 2);
    let surface = stdout(&["diagram", "surface", "--in", path(&fig)]);
    assert!(surface.starts_with('{'));
}

#[test]
fn invalid_diagram_names_the_invariant() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"vertices":[[{"half":0,"dir":"out"},{"half":2,"dir":"out"},{"half":1,"dir":"in"},{"half":3,"dir":"in"}]],"edges":[[0,1],[2,3]],"pairing":[]}"#,
    )
    .unwrap();
    let out = strata(&["diagram", "realize", "--in", path(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("alternat"));
    std::fs::write(&bad, "{").unwrap();
    assert_eq!(code(&["diagram", "realize", "--in", path(&bad)]), 2);
}

#[test]
fn emitted_json_round_trips() {
    for kind in ["H", "O", "E"] {
        let text = stdout(&["diagram", "make", "--type", kind, "--genus", "4"]);
        let d = strata::diagram::SeparatrixDiagram::from_json(text.trim_end()).unwrap();
        assert_eq!(format!("{}\n", d.to_json()), text);
    }
    let text = stdout(&["suspend", "--perm", "5 4 3 2 1"]);
    let s = strata::surface::SquareTiledSurface::from_json(text.trim_end()).unwrap();
    assert_eq!(format!("{}\n", s.to_json()), text);
}

#[test]
fn o_and_h_coincide_in_genus_two() {
    assert_eq!(
        stdout(&["diagram", "make", "--type", "O", "--genus", "2"]),
        stdout(&["diagram", "make", "--type", "H", "--genus", "2"])
    );
    let err = strata(&["diagram", "make", "--type", "E", "--genus", "2"]);
    assert!(String::from_utf8(err.stderr).unwrap().contains("genus too small"));
}

#[test]
fn census_of_eight_letters() {
    let table = stdout(&["census", "--letters", "8"]);
    let total: usize = table.lines().map(|l| l.split('\t').nth(2).unwrap().parse::<usize>().unwrap()).sum();
    assert_eq!(total, 4);
}
