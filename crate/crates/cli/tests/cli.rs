use std::path::{Path, PathBuf};
use std::process::Command;

use conproj::io::{
    parse_dimacs, parse_polynomial, parse_sdpa, write_dimacs, write_polynomial, write_sdpa,
    SdpaOptions,
};
use conproj::polysos::{motzkin, Graph};
use conproj::regsolver::{residuals, IterateTriple};
use conproj::BlockPoint;
use conproj_cli::run_cli;
use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn run(args: &[&str]) -> i32 {
    let mut argv = vec!["conproj"];
    argv.extend_from_slice(args);
    run_cli(argv)
}

/// Runs with `--out` into a temp dir; returns the exit code and report.
fn run_report(args: &[&str]) -> (i32, Value) {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let mut a = args.to_vec();
    a.extend_from_slice(&["--out", out.to_str().unwrap()]);
    let code = run(&a);
    let text = std::fs::read_to_string(&out).unwrap();
    (code, serde_json::from_str(&text).unwrap())
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

const SDPA_FIXTURES: [&str; 5] = [
    "trace2.dat-s",
    "mixed_blocks.dat-s",
    "theta_c5.dat-s",
    "sos_n2_d2.dat-s",
    "polymin_structured2.dat-s",
];

#[test]
fn theta_of_c5() {
    let c5 = fixture("c5.col");
    let (code, r) = run_report(&[
        "theta",
        c5.to_str().unwrap(),
        "--solver",
        "simple",
        "--tol",
        "1e-7",
    ]);
    assert_eq!(code, 0);
    assert_eq!(r["status"], "converged");
    assert!((f(&r["objective"]) - 5f64.sqrt()).abs() <= 1e-4);
    assert_eq!(r["objective"], r["values"]["theta"]);
    assert_eq!(r["dims"]["m"], 6);
}

#[test]
fn motzkin_exit_codes() {
    let m = fixture("motzkin.txt");
    let m = m.to_str().unwrap();
    let (code, r) = run_report(&["sos-check", m, "--degree", "8", "--tol", "1e-5"]);
    assert_eq!(code, 0);
    assert!(f(&r["primal_residual"]) <= 1e-5);
    let (code, r) = run_report(&["sos-check", m, "--degree", "3"]);
    assert!(code == 2 || code == 3, "exit {code}");
    assert_ne!(r["status"], "converged");
}

#[test]
fn input_errors_exit_4() {
    assert_eq!(run(&["theta", "/nonexistent/graph.col"]), 4);
    assert_eq!(run(&["theta", fixture("motzkin.txt").to_str().unwrap()]), 4);
    assert_eq!(run(&["solve", fixture("c5.col").to_str().unwrap()]), 4);
    assert_eq!(
        run(&["nearcorr", fixture("trace2.dat-s").to_str().unwrap()]),
        4
    );
    assert_eq!(
        run(&["theta", fixture("c5.col").to_str().unwrap(), "--tol", "-1"]),
        4
    );
    assert_eq!(run(&["frobnicate"]), 4);
    assert_eq!(run(&[]), 4);
    assert_eq!(run(&["--help"]), 0);
}

#[test]
fn reports_are_deterministic() {
    let sos = fixture("sos_n2_d2.dat-s");
    let strip = |mut v: Value| {
        v.as_object_mut().unwrap().remove("wall_time_ms");
        serde_json::to_string(&v).unwrap()
    };
    for solver in ["simple", "quasi-newton", "ssnewton"] {
        let args = [
            "solve",
            sos.to_str().unwrap(),
            "--solver",
            solver,
            "--seed",
            "9",
        ];
        let (c1, a) = run_report(&args);
        let (c2, b) = run_report(&args);
        assert_eq!(c1, c2);
        assert_eq!(a["seed"], 9);
        assert_eq!(strip(a), strip(b));
    }
}

#[test]
fn binary_output_is_byte_identical() {
    let exe = env!("CARGO_BIN_EXE_conproj");
    let c5 = fixture("c5.col");
    let go = || {
        Command::new(exe)
            .args(["theta", c5.to_str().unwrap()])
            .output()
            .unwrap()
    };
    let (a, b) = (go(), go());
    assert_eq!(a.status.code(), Some(0));
    let strip = |o: &std::process::Output| {
        String::from_utf8(o.stdout.clone())
            .unwrap()
            .lines()
            .filter(|l| !l.contains("wall_time_ms"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn residuals_recomputed_from_solution() {
    let dir = tempfile::tempdir().unwrap();
    let sol = dir.path().join("sol.json");
    for (cmd, file) in [
        ("solve", "sos_n2_d2.dat-s"),
        ("solve", "mixed_blocks.dat-s"),
        ("solve", "theta_c5.dat-s"),
    ] {
        let path = fixture(file);
        let (code, r) = run_report(&[
            cmd,
            path.to_str().unwrap(),
            "--solution",
            sol.to_str().unwrap(),
        ]);
        assert_eq!(code, 0, "{file}");
        let lcp = parse_sdpa(
            &std::fs::read_to_string(&path).unwrap(),
            SdpaOptions::default(),
        )
        .unwrap();
        let s: Value = serde_json::from_str(&std::fs::read_to_string(&sol).unwrap()).unwrap();
        let vec = |k: &str| -> Vec<f64> { s[k].as_array().unwrap().iter().map(f).collect() };
        let trip = IterateTriple {
            p: BlockPoint::from_vec(&lcp.cone, vec("x")).unwrap(),
            y: vec("y"),
            u: BlockPoint::from_vec(&lcp.cone, vec("u")).unwrap(),
        };
        let (primal, dual) = residuals(&lcp, &trip);
        assert!((primal - f(&r["primal_residual"])).abs() <= 1e-12, "{file}");
        assert!((dual - f(&r["dual_residual"])).abs() <= 1e-12, "{file}");
        assert!(
            (lcp.objective(&trip.p) - f(&r["objective"])).abs()
                <= 1e-12 * (1.0 + f(&r["objective"]).abs())
        );
    }
}

#[test]
fn sdpa_fixtures_round_trip() {
    for name in SDPA_FIXTURES {
        let text = std::fs::read_to_string(fixture(name)).unwrap();
        let lcp = parse_sdpa(&text, SdpaOptions::default()).unwrap();
        assert_eq!(write_sdpa(&lcp).unwrap(), text, "{name}");
        let again = parse_sdpa(&write_sdpa(&lcp).unwrap(), SdpaOptions::default()).unwrap();
        assert_eq!(again.a, lcp.a);
        assert_eq!(again.c, lcp.c);
        assert_eq!(again.cone, lcp.cone);
    }
}

#[test]
fn messy_sdpa_canonicalizes() {
    let messy = "* the trace fixture, reordered\n\"title\"\n1 = mDIM\n1 = nBLOCK\n{2}\n{1.0}\n1 1 2 2 1.0\n0 1 1 2 1\n1 1 1 1 1\n0 1 2 2 1.0e0\n0 1 1 1 1\n";
    let lcp = parse_sdpa(messy, SdpaOptions::default()).unwrap();
    assert_eq!(
        write_sdpa(&lcp).unwrap(),
        std::fs::read_to_string(fixture("trace2.dat-s")).unwrap()
    );
}

#[test]
fn text_fixtures_round_trip() {
    let text = std::fs::read_to_string(fixture("motzkin.txt")).unwrap();
    let p = parse_polynomial(&text).unwrap();
    assert_eq!(p, motzkin());
    assert_eq!(write_polynomial(&p), text);
    let text = std::fs::read_to_string(fixture("c5.col")).unwrap();
    let g = parse_dimacs(&text).unwrap();
    assert_eq!(g, Graph::cycle(5));
    assert_eq!(write_dimacs(&g), text);
}

#[test]
fn nearcorr_two_by_two_every_solver() {
    let dir = tempfile::tempdir().unwrap();
    let mat = dir.path().join("c.mat");
    std::fs::write(&mat, "1 2\n2 1\n").unwrap();
    let sol = dir.path().join("x.mat");
    for s in [
        "dykstra",
        "admm",
        "fixed-metric",
        "quasi-newton",
        "ssnewton",
    ] {
        let (code, _) = run_report(&[
            "nearcorr",
            mat.to_str().unwrap(),
            "--solver",
            s,
            "--tol",
            "1e-10",
            "--solution",
            sol.to_str().unwrap(),
        ]);
        assert_eq!(code, 0, "{s}");
        let x = conproj::io::parse_dense_matrix(&std::fs::read_to_string(&sol).unwrap()).unwrap();
        for v in x.as_slice() {
            assert!((v - 1.0).abs() <= 1e-8, "{s}: {v}");
        }
    }
}

#[test]
fn project_native_second_order_cone() {
    let dir = tempfile::tempdir().unwrap();
    let sol = dir.path().join("x.json");
    let (code, r) = run_report(&[
        "project",
        fixture("soc_projection.json").to_str().unwrap(),
        "--solution",
        sol.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert_eq!(r["dims"]["soc"][0], 3);
    let s: Value = serde_json::from_str(&std::fs::read_to_string(&sol).unwrap()).unwrap();
    let x: Vec<f64> = s["x"].as_array().unwrap().iter().map(f).collect();
    // the cone head is the last entry; (2, 1) lands on the unit circle
    assert!((x[2] - 1.0).abs() <= 1e-6);
    let r5 = 5f64.sqrt();
    assert!(
        (x[0] - 2.0 / r5).abs() <= 1e-6 && (x[1] - 1.0 / r5).abs() <= 1e-6,
        "{x:?}"
    );
}

#[test]
fn project_sdpa_with_center() {
    let dir = tempfile::tempdir().unwrap();
    let center = dir.path().join("c.txt");
    std::fs::write(&center, "1 2\n2 1\n").unwrap();
    let sol = dir.path().join("x.json");
    let trace = fixture("trace2.dat-s");
    let (code, _) = run_report(&[
        "project",
        trace.to_str().unwrap(),
        "--center",
        center.to_str().unwrap(),
        "--solution",
        sol.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let s: Value = serde_json::from_str(&std::fs::read_to_string(&sol).unwrap()).unwrap();
    let x: Vec<f64> = s["x"].as_array().unwrap().iter().map(f).collect();
    // eigenvalues of C are 3 and −1; the trace-one part is ½(1,1)(1,1)ᵀ
    for v in x {
        assert!((v - 0.5).abs() <= 1e-7);
    }
    std::fs::write(&center, "1 2 3\n").unwrap();
    assert_eq!(
        run(&[
            "project",
            trace.to_str().unwrap(),
            "--center",
            center.to_str().unwrap()
        ]),
        4
    );
}

#[test]
fn polymin_reports_bound() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("p.txt");
    std::fs::write(&p, "nvars 1\n1 0\n-2 1\n1 2\n").unwrap();
    let (code, r) = run_report(&["polymin", p.to_str().unwrap(), "--tol", "1e-10"]);
    assert_eq!(code, 0);
    assert!(f(&r["values"]["lower_bound"]).abs() <= 1e-8);
}

#[test]
fn gen_is_independent_of_thread_count() {
    let exe = env!("CARGO_BIN_EXE_conproj");
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for threads in ["1", "4"] {
        let out = dir.path().join(format!("t{threads}"));
        let o = Command::new(exe)
            .env("CONIC_PROJ_THREADS", threads)
            .args([
                "gen",
                "sos",
                "--nvars",
                "2",
                "--count",
                "6",
                "--seed",
                "40",
                "--out",
                out.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0));
        let summary: Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(
            summary["threads"].as_u64().unwrap(),
            threads.parse::<u64>().unwrap()
        );
        let mut files: Vec<String> = Vec::new();
        for i in 0..6 {
            files.push(std::fs::read_to_string(out.join(format!("sos-{i:04}.dat-s"))).unwrap());
        }
        outputs.push(files);
    }
    assert_eq!(outputs[0], outputs[1]);
    // instance i of a batch is the single instance with seed + i
    let single = Command::new(exe)
        .args(["gen", "sos", "--nvars", "2", "--seed", "43"])
        .output()
        .unwrap();
    assert_eq!(String::from_utf8(single.stdout).unwrap(), outputs[0][3]);
    assert_ne!(outputs[0][0], outputs[0][1]);

    let bad = Command::new(exe)
        .env("CONIC_PROJ_THREADS", "zero")
        .args([
            "gen",
            "graph",
            "--count",
            "2",
            "--out",
            dir.path().join("g").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(4));
}

#[test]
fn gen_writes_parseable_instances() {
    for (kind, check) in [
        ("graph", "p edge"),
        ("polymin", "nvars 3"),
        ("structured", "nvars 3"),
        ("motzkin", "nvars 2"),
    ] {
        let o = Command::new(env!("CARGO_BIN_EXE_conproj"))
            .args(["gen", kind])
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0));
        assert!(
            String::from_utf8(o.stdout).unwrap().starts_with(check),
            "{kind}"
        );
    }
    let o = Command::new(env!("CARGO_BIN_EXE_conproj"))
        .args(["gen", "nearcorr", "--n", "4"])
        .output()
        .unwrap();
    let m = conproj::io::parse_dense_matrix(&String::from_utf8(o.stdout).unwrap()).unwrap();
    assert_eq!(m.dim(), 4);
}
