use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eulerphase"))
        .args(args)
        .output()
        .expect("spawn eulerphase")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("eulerphase-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn expand_rows() {
    let text = stdout(&["--family", "constant", "expand", "--n", "4"]);
    assert_eq!(text.lines().last(), Some("0,1,2,1,1"));
    assert_eq!(text.lines().count(), 5);
    assert_eq!(
        stdout(&["--family", "constant", "expand", "--n", "0"]),
        "1\n"
    );

    let text = stdout(&["--family", "ap:a=1,j=2", "expand", "--n", "5"]);
    let total: u64 = text
        .lines()
        .last()
        .unwrap()
        .split(',')
        .map(|v| v.parse::<u64>().unwrap())
        .sum();
    assert_eq!(total, 3);
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| run(args).status.code();
    assert_eq!(code(&["--family", "bogus", "expand", "--n", "3"]), Some(2));
    assert_eq!(
        code(&["--family", "power:t=2", "expand", "--n", "3"]),
        Some(2)
    );
    assert_eq!(
        code(&["--family", "constant", "--sigma0", "0.5", "expand", "--n", "3"]),
        Some(2)
    );
    assert_eq!(
        code(&["--family", "power:s0=1.5", "expand", "--n", "3"]),
        Some(4)
    );
    assert_eq!(
        code(&["--family", "constant", "eval", "--z", "1.5", "--n", "3"]),
        Some(0)
    );
    assert_eq!(
        code(&["--family", "constant", "eval", "--z", "1.5", "--n", "3", "--method", "contour"]),
        Some(3)
    );
    assert_eq!(
        code(&["--family", "constant", "asymp", "--z", "0", "--n", "30"]),
        Some(3)
    );
    assert_eq!(
        code(&[
            "--family",
            "constant",
            "-o",
            "/nonexistent-dir/out.csv",
            "expand",
            "--n",
            "3"
        ]),
        Some(1)
    );
}

#[test]
fn eval_methods_agree() {
    let mut rows = Vec::new();
    for method in ["recurrence", "contour", "polynomial"] {
        let text = stdout(&[
            "--family",
            "ap:a=1,j=3",
            "eval",
            "--z",
            "0.2+0.4i",
            "--n",
            "10,40..60:10",
            "--method",
            method,
        ]);
        let parsed: Vec<(u64, f64, f64)> = text
            .lines()
            .map(|line| {
                let v: serde_json::Value = serde_json::from_str(line).unwrap();
                (
                    v["n"].as_u64().unwrap(),
                    v["re"].as_f64().unwrap(),
                    v["im"].as_f64().unwrap(),
                )
            })
            .collect();
        assert_eq!(
            parsed.iter().map(|r| r.0).collect::<Vec<_>>(),
            [10, 40, 50, 60]
        );
        rows.push(parsed);
    }
    for other in &rows[1..] {
        for (a, b) in rows[0].iter().zip(other) {
            let scale = a.1.hypot(a.2);
            assert!((a.1 - b.1).hypot(a.2 - b.2) < 1e-8 * scale);
        }
    }
}

#[test]
fn compare_csv() {
    let text = stdout(&[
        "--family",
        "constant",
        "compare",
        "--z",
        "0.5",
        "--n",
        "250,500,1000,2000",
    ]);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("n,exact_re,exact_im,est_re,est_im,rel_err")
    );
    let errs: Vec<f64> = lines
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(errs.len(), 4);
    assert!(errs[2] < 0.05);
    assert!(errs.windows(2).all(|w| w[1] < w[0]));

    let text = stdout(&[
        "--family",
        "power:s0=2",
        "compare",
        "--z",
        "0.4",
        "--n",
        "500,1000",
    ]);
    let errs: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert!(errs[1] < errs[0]);
}

#[test]
fn asymp_json() {
    let text = stdout(&[
        "--family",
        "power:s0=3",
        "asymp",
        "--z",
        "-0.2",
        "--n",
        "500",
    ]);
    let v: serde_json::Value = serde_json::from_str(text.trim()).unwrap();
    assert_eq!(v["n"], 500);
    assert_eq!(v["arcs"][0]["h"], 1);
    assert_eq!(v["arcs"][0]["k"], 1);
    assert_eq!(v["arcs"][0]["branch"], "oscillatory");
    assert!((v["mu"].as_f64().unwrap() - 0.2475).abs() < 1e-12);
}

#[test]
fn dirichlet_and_meinardus() {
    let text = stdout(&["--family", "constant", "dirichlet", "--k", "2"]);
    assert_eq!(text.lines().next(), Some("kind,index,re,im"));
    assert!(text.contains("d0,1,-5.0000000000000000e-1,0\n"));
    assert!(text.contains("residue,1,0,0\n"));
    assert!(text.contains("residue,2,1.0000000000000000e0,0\n"));

    let text = stdout(&["--family", "constant", "meinardus", "--n", "1000"]);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0], "1000");
    assert_eq!(row[2], "24061467864032622473692149727991");
    assert!(row[3].parse::<f64>().unwrap() < 0.03);
}

#[test]
fn phase_map_files() {
    let dir = scratch("map");
    let ppm = dir.join("cube.ppm");
    let summary = stdout(&[
        "--family",
        "power:s0=3",
        "-o",
        ppm.to_str().unwrap(),
        "phase-map",
        "--width",
        "48",
        "--height",
        "32",
    ]);
    assert_eq!(summary, "h,k,fraction\n1,1,1.0000000000000000e0\n");
    let bytes = std::fs::read(&ppm).unwrap();
    let header = b"P6\n48 32\n255\n";
    assert!(bytes.starts_with(header));
    assert_eq!(bytes.len(), header.len() + 48 * 32 * 3);
    let csv = std::fs::read_to_string(dir.join("cube.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 48 * 32);
    std::fs::remove_dir_all(&dir).unwrap();

    assert_eq!(
        run(&[
            "--family",
            "constant",
            "phase-map",
            "--width",
            "8",
            "--height",
            "8"
        ])
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn outputs_are_deterministic() {
    let args = [
        "--family",
        "ap:a=1,j=2",
        "compare",
        "--z",
        "-0.3+0.2i",
        "--n",
        "100..160:20",
    ];
    assert_eq!(stdout(&args), stdout(&args));
    let mut threaded = vec!["--threads", "1"];
    threaded.extend_from_slice(&args);
    assert_eq!(stdout(&args), stdout(&threaded));

    let dir = scratch("det");
    let render = |name: &str| {
        let ppm = dir.join(name);
        stdout(&[
            "--family",
            "constant",
            "-o",
            ppm.to_str().unwrap(),
            "phase-map",
            "--width",
            "40",
            "--height",
            "40",
        ]);
        (
            std::fs::read(&ppm).unwrap(),
            std::fs::read(ppm.with_extension("csv")).unwrap(),
        )
    };
    assert_eq!(render("a.ppm"), render("b.ppm"));
    std::fs::remove_dir_all(&dir).unwrap();
}
