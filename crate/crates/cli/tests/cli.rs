use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use sqz_core::certificate::Certificate;
use sqz_core::oracle::verify_certificate;
use sqz_core::{ExactMatrix, FieldSpec};

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn sqz(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_sqz")).args(args).output().expect("binary runs");
    Run { code: out.status.code().unwrap_or(-1), stdout: String::from_utf8_lossy(&out.stdout).into(), stderr: String::from_utf8_lossy(&out.stderr).into() }
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("sqz-cli-tests-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn write(name: &str, m: &ExactMatrix) -> String {
    let p = scratch(name);
    fs::write(&p, m.to_text()).unwrap();
    p.to_string_lossy().into_owned()
}

fn diag(d: &[i64]) -> ExactMatrix {
    let q = FieldSpec::Rationals;
    ExactMatrix::diag(q, &d.iter().map(|&x| q.from_i64(x)).collect::<Vec<_>>())
}

/// The certificate block of a text-mode run.
fn certificate_of(stdout: &str) -> Certificate {
    let start = stdout.find("certificate ").expect("certificate in output");
    let end = stdout[start..].find("\nend\n").expect("certificate end") + start + 5;
    Certificate::parse(&stdout[start..end]).unwrap()
}

/// Matrix block following a `# name` comment.
fn matrix_after(stdout: &str, name: &str) -> ExactMatrix {
    let tag = format!("# {}\n", name);
    let start = stdout.find(&tag).unwrap() + tag.len();
    let lines: Vec<&str> = stdout[start..].lines().collect();
    let rows: usize = lines[1].split_whitespace().next().unwrap().parse().unwrap();
    ExactMatrix::parse(&lines[..2 + rows].join("\n")).unwrap()
}

fn example2() -> (String, String, ExactMatrix, ExactMatrix) {
    let q = FieldSpec::Rationals;
    let u = [3i64, 0, 2, 0, -4, 0, -11];
    let g = ExactMatrix::from_i64(q, &u.iter().map(|&a| vec![40 * a, 80 * a, 40 * a]).collect::<Vec<_>>());
    let f = ExactMatrix::from_i64(q, &(0..7).map(|i| vec![11 + 3 * i, 40, 29 - 3 * i]).collect::<Vec<_>>());
    (write("g2.mat", &g), write("f2.mat", &f), g, f)
}

#[test]
fn sqzq_rank_three_on_second_example() {
    let (gp, fp, g, f) = example2();
    let r = sqz(&["sqzq", &gp, &fp, "--rank", "3"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("verified: HF=G, H^2=0, rank=3"), "{}", r.stdout);
    assert!(r.stdout.contains("bounds: 1 3"));
    let h = matrix_after(&r.stdout, "H");
    assert_eq!(&h * &f, g);
    assert!(h.is_square_zero());
    assert!(verify_certificate(&certificate_of(&r.stdout)).passed());
}

#[test]
fn sqzq_with_recipe_file_reproduces_printed_h1() {
    let (gp, fp, _, _) = example2();
    let recipe = scratch("b.recipe");
    fs::write(&recipe, "recipe\nB\nfield Q\n7 1\n-3\n-2\n-1\n0\n1\n2\n3\n").unwrap();
    let r = sqz(&["sqzq", &gp, &fp, "--rank", "1", "--recipe", recipe.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let h = matrix_after(&r.stdout, "H");
    let q = FieldSpec::Rationals;
    let mut want = ExactMatrix::zeros(q, 7, 7);
    for (row, v) in [(0usize, [132i64, 6, -48]), (2, [88, 4, -32]), (4, [-176, -8, 64]), (6, [-484, -22, 176])] {
        for j in 0..3 {
            want[(row, 4 + j)] = q.from_ratio(v[j], 15).unwrap();
        }
    }
    assert_eq!(h, want);
}

#[test]
fn sqzq_out_of_range_rank_fails() {
    let (gp, fp, _, _) = example2();
    let r = sqz(&["sqzq", &gp, &fp, "--rank", "4"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("rank"), "{}", r.stderr);
}

#[test]
fn divide_left_and_right() {
    let q = FieldSpec::Rationals;
    let f = ExactMatrix::from_i64(q, &[vec![1, 2], vec![3, 4]]);
    let h = ExactMatrix::from_i64(q, &[vec![0, 1], vec![1, 1]]);
    let (fp, gp) = (write("df.mat", &f), write("dg.mat", &(&h * &f)));
    let r = sqz(&["divide", &gp, &fp]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("verified: HF=G, rank=2"));
    assert_eq!(matrix_after(&r.stdout, "H"), h);
    let gl = write("dgl.mat", &(&f * &h));
    let r = sqz(&["divide", &gl, &fp, "--left"]);
    assert!(r.stdout.contains("verified: FH=G"), "{}", r.stdout);
    assert_eq!(matrix_after(&r.stdout, "H"), h);
}

#[test]
fn three_sum_decisions_and_exit_codes() {
    let r = sqz(&["sum3-decide", &write("tk.mat", &diag(&[-5, 2, -5, 2, 2, 2, 2]))]);
    assert_eq!(r.code, 1);
    assert!(r.stdout.contains("r=3 does not divide 2m=4"), "{}", r.stdout);
    let r = sqz(&["sum3-decide", &write("ww.mat", &diag(&[-4, 1, 1, 1, 1]))]);
    assert_eq!(r.code, 1);
    assert!(r.stdout.contains("= 4 > 15/4"), "{}", r.stdout);
    let c = sqz_core::UniPoly::from_i64(FieldSpec::Rationals, &[1, 0, 0, -2, 0, 1]).companion().unwrap();
    let r = sqz(&["sum3-decide", &write("cp.mat", &c)]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    let cert = certificate_of(&r.stdout);
    assert_eq!(cert.parts.len(), 3);
    assert!(verify_certificate(&cert).passed());
    // three copies of an irreducible quadratic over GF(3): no listed rule applies
    let f3 = FieldSpec::PrimeField(3);
    let cq = sqz_core::UniPoly::from_i64(f3, &[2, 1, 1]).companion().unwrap();
    let a = ExactMatrix::block_diag(f3, &[&cq, &cq, &cq]);
    let r = sqz(&["sum3-decide", &write("unk.mat", &a)]);
    assert_eq!(r.code, 2, "{}", r.stdout);
    assert!(r.stdout.contains("verdict: unknown"));
}

#[test]
fn invariants_of_nilpotent_companion() {
    let q = FieldSpec::Rationals;
    let r = sqz(&["invariants", &write("cx2.mat", &ExactMatrix::from_i64(q, &[vec![0, 0], vec![1, 0]]))]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("x^2"), "{}", r.stdout);
    let r = sqz(&["minpoly", &write("id.mat", &ExactMatrix::identity(q, 3))]);
    assert!(r.stdout.contains("x - 1"), "{}", r.stdout);
    let r = sqz(&["charpoly", &write("id3.mat", &ExactMatrix::identity(q, 3)), "--out", "structured"]);
    assert!(r.stdout.contains("charpoly.coeffs=-1 3 -3 1"), "{}", r.stdout);
}

#[test]
fn factor_and_sum_certificates_verify() {
    let q = FieldSpec::Rationals;
    let g = ExactMatrix::from_i64(q, &[vec![1, 0, 0, 0], vec![0, 0, 0, 0], vec![0, 0, 0, 0], vec![0, 0, 0, 0]]);
    let gp = write("fg.mat", &g);
    for args in [
        vec!["factor", gp.as_str(), "--kind", "sqz2"],
        vec!["factor", gp.as_str(), "--kind", "sqz3"],
        vec!["factor", gp.as_str(), "--kind", "sqzk", "--k", "5"],
        vec!["factor", gp.as_str(), "--kind", "nilpotent2"],
    ] {
        let r = sqz(&args);
        assert_eq!(r.code, 0, "{:?}: {}", args, r.stderr);
        let c = certificate_of(&r.stdout);
        assert!(verify_certificate(&c).passed());
        assert_eq!(c.input, g);
    }
    let t = ExactMatrix::from_i64(q, &[vec![1, 2], vec![3, -1]]);
    let tp = write("st.mat", &t);
    for kind in ["nilpotent", "4", "3"] {
        let r = sqz(&["sum", &tp, "--k", kind]);
        assert_eq!(r.code, 0, "{}: {}{}", kind, r.stdout, r.stderr);
        assert!(verify_certificate(&certificate_of(&r.stdout)).passed());
    }
    let r = sqz(&["sum", &tp, "--k", "2"]);
    assert_eq!(r.code, 0, "x^2 - 7 is even");
    let r = sqz(&["sum", &write("d3.mat", &diag(&[1, 2, -3])), "--k", "2"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("error"));
    let r = sqz(&["factor", &gp, "--kind", "sqz2", "--ranks", "3,3"]);
    assert_eq!(r.code, 1);
}

#[test]
fn verify_reports_tampering() {
    let q = FieldSpec::Rationals;
    let t = ExactMatrix::from_i64(q, &[vec![1, 2], vec![3, -1]]);
    let r = sqz(&["sum", &write("vt.mat", &t), "--k", "4"]);
    let cert = certificate_of(&r.stdout);
    let good = scratch("good.cert");
    fs::write(&good, cert.to_text()).unwrap();
    let r = sqz(&["verify", good.to_str().unwrap()]);
    assert_eq!((r.code, r.stdout.trim()), (0, "result: pass"));
    let mut bad = cert.clone();
    bad.input[(0, 0)] = q.from_i64(7);
    let badp = scratch("bad.cert");
    fs::write(&badp, bad.to_text()).unwrap();
    let r = sqz(&["verify", badp.to_str().unwrap()]);
    assert_eq!(r.code, 1);
    assert!(r.stdout.contains("sum mismatch"));
}

#[test]
fn oracle_scan_passes() {
    let r = sqz(&["oracle-scan", "--field", "GF(2)", "--n", "2"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.stdout.matches("PASS").count(), 6);
    let r = sqz(&["oracle-scan", "--field", "GF(3)", "--n", "2", "--claim", "sum2"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.stdout.matches("PASS").count(), 1);
}

#[test]
fn errors_exit_one() {
    let r = sqz(&["rcf", "/definitely/not/here.mat"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("cannot read"));
    let p = scratch("broken.mat");
    fs::write(&p, "field Q\n2 2\n1 2\n3\n").unwrap();
    let r = sqz(&["rcf", p.to_str().unwrap()]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("row 2"), "{}", r.stderr);
}

#[test]
fn field_override_reinterprets_entries() {
    let q = FieldSpec::Rationals;
    let p = write("ov.mat", &ExactMatrix::from_i64(q, &[vec![1, 1], vec![0, 1]]));
    let r = sqz(&["charpoly", &p, "--field", "GF(2)", "--out", "structured"]);
    assert!(r.stdout.contains("charpoly.coeffs=1 0 1"), "{}", r.stdout);
}

#[test]
fn structured_output_is_key_value() {
    let (gp, fp, _, _) = example2();
    let r = sqz(&["sqzq", &gp, &fp, "--out", "structured"]);
    assert_eq!(r.code, 0);
    for line in r.stdout.lines() {
        let (k, _) = line.split_once('=').unwrap_or_else(|| panic!("not key=value: {}", line));
        assert!(!k.is_empty() && !k.contains(' '), "{}", line);
    }
    assert!(r.stdout.contains("H.field=Q\nH.rows=7\nH.cols=7\n"));
}

fn normalized(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .map(|l| l.split('#').next().unwrap())
        .map(|l| l.split_whitespace().map(String::from).collect::<Vec<_>>())
        .filter(|t| !t.is_empty())
        .collect()
}

#[test]
fn fixtures_round_trip_through_the_binary() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let mut files: Vec<PathBuf> = fs::read_dir(&dir).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    assert_eq!(files.len(), 50);
    for path in files {
        let original = fs::read_to_string(&path).unwrap();
        let parsed = ExactMatrix::parse(&original).unwrap();
        assert_eq!(normalized(&parsed.to_text()), normalized(&original), "{}", path.display());
        let r = sqz(&["rcf", path.to_str().unwrap()]);
        assert_eq!(r.code, 0, "{}: {}", path.display(), r.stderr);
        let cert = certificate_of(&r.stdout);
        assert!(verify_certificate(&cert).passed(), "{}", path.display());
        let echoed = &cert.parts[1].matrix;
        assert_eq!(normalized(&echoed.to_text()), normalized(&original), "{}", path.display());
        let form = matrix_after(&r.stdout, "form");
        assert_eq!(form, cert.input);
    }
}
