use std::path::PathBuf;

fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["deciban"];
    argv.extend_from_slice(args);
    let code = deciban_cli::run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn scratch(name: &str, text: &str) -> String {
    let dir: PathBuf = std::env::temp_dir().join(format!("deciban-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn bottomprob_line() {
    let (code, out, _) = cli(&[
        "transpose",
        "bottomprob",
        "--length",
        "133",
        "--pos",
        "45",
        "--keys",
        "15",
    ]);
    assert_eq!(code, 0);
    assert_eq!(out, "15\t3/7\t0.428571\n");
}

#[test]
fn subtractor_table_has_26_rows() {
    let (code, out, _) = cli(&["subtractor", "table"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 27);
    assert!(out.lines().nth(14).unwrap().starts_with("13\tN\t"));
}

#[test]
fn empty_corpus_is_a_data_error() {
    let path = scratch("empty.txt", "1234 ... \n");
    let (code, out, err) = cli(&["stats", "--corpus", &path]);
    assert_eq!(code, 1);
    assert!(out.is_empty());
    assert!(err.contains("empty corpus"), "{err}");
}

#[test]
fn usage_errors_exit_2() {
    let (code, _, err) = cli(&["stats", "--nonsense"]);
    assert_eq!(code, 2);
    assert!(err.contains("Usage"));
    assert_eq!(cli(&["frobnicate"]).0, 2);
    assert_eq!(
        cli(&["vigenere", "score", "--period", "0", "--cipher", "x"]).0,
        2
    );
    assert_eq!(cli(&["subtractor", "crib"]).0, 2);
    assert_eq!(
        cli(&["transpose", "score", "--probe", "AB", "--message", "x"]).0,
        2
    );
    let (code, out, _) = cli(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("vigenere"));
}

#[test]
fn missing_file_is_a_data_error() {
    assert_eq!(
        cli(&[
            "vigenere",
            "decipher",
            "--key",
            "A",
            "--cipher",
            "/nonexistent/file"
        ])
        .0,
        1
    );
}

#[test]
fn output_is_deterministic() {
    let args = ["generate", "corpus", "--length", "3000", "--seed", "9"];
    let a = cli(&args).1;
    assert_eq!(a, cli(&args).1);
    assert_ne!(
        a,
        cli(&["generate", "corpus", "--length", "3000", "--seed", "10"]).1
    );
    let corpus = scratch("det.txt", &a);
    let stats = ["stats", "--corpus", corpus.as_str(), "--max-r", "3"];
    assert_eq!(cli(&stats).1, cli(&stats).1);
    let sim = [
        "repeats",
        "simulate",
        "--overlap",
        "60",
        "--trials",
        "20",
        "--seed",
        "4",
    ];
    assert_eq!(cli(&sim).1, cli(&sim).1);
}

#[test]
fn stats_bundle_feeds_vigenere() {
    let (_, out, _) = cli(&[
        "generate", "vigenere", "--period", "5", "--length", "500", "--seed", "3",
    ]);
    let field = |k: &str| {
        out.lines()
            .find_map(|l| l.strip_prefix(k))
            .unwrap()
            .trim()
            .to_string()
    };
    let key = field("key\t");
    let cipher = scratch("vig.txt", &field("cipher\t"));

    let (_, corpus, _) = cli(&["generate", "corpus", "--length", "20000", "--seed", "1"]);
    let corpus = scratch("vig-corpus.txt", &corpus);
    let (code, bundle, _) = cli(&["stats", "--corpus", &corpus]);
    assert_eq!(code, 0);
    let bundle = scratch("bundle.json", &bundle);
    let (code, tsv, _) = cli(&["stats", "--corpus", &corpus, "--format", "tsv"]);
    assert_eq!(code, 0);
    let tsv = scratch("counts.tsv", &tsv);

    for stats in [bundle.as_str(), tsv.as_str()] {
        let (code, out, err) = cli(&[
            "vigenere", "solve", "--period", "5", "--cipher", &cipher, "--stats", stats,
        ]);
        assert_eq!(code, 0, "{err}");
        assert_eq!(out.lines().last().unwrap(), format!("best\t{key}"));
    }
    let (code, out, _) = cli(&["vigenere", "decipher", "--key", &key, "--cipher", &cipher]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), field("plain\t"));
}

#[test]
fn vigenere_score_grid_shape() {
    let cipher = scratch("fig.txt", "DKQHSHZMNP RCVXUHTEAQ XHPUEPPSBK");
    let (code, out, _) = cli(&["vigenere", "score", "--period", "10", "--cipher", &cipher]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 27);
    assert_eq!(lines[0].split('\t').count(), 11);
    assert!(lines[1].starts_with("A\t"));
}

#[test]
fn crib_from_text() {
    let (code, out, _) = cli(&[
        "subtractor",
        "crib",
        "--cipher",
        "NYXLNXIQHH",
        "--crib",
        "AMBASSADOR",
        "--prior-odds",
        "1:2",
        "--printed-table",
    ]);
    assert_eq!(code, 0);
    assert!(out.starts_with("slides\t13,12,22,11,21,5,8,13,19,16\n"));
    assert!(out.contains("score\t15\n"));
}

#[test]
fn repeats_figure_and_scores() {
    let m1 = scratch(
        "m1.txt",
        "GFRLIKQGVBMILAFIXMMOROGBYSKYXDAZCHMUMRKBZLDLDDOHCMVTIPRSD",
    );
    let m2 = scratch("m2.txt", "VLOVDYQCEJSOPYGBMBKYXDAZNBFIOPTFCXDOD");
    let (code, out, _) = cli(&[
        "repeats",
        "figure",
        "--m1",
        &m1,
        "--m2",
        &m2,
        "--distance",
        "8",
    ]);
    assert_eq!(code, 0);
    assert_eq!(out, "^{8}XOOOOOOOOOOXOOXXOOXXXXXXOOOOOOOOOOXOX^{12}\n");
    assert_eq!(
        cli(&[
            "repeats",
            "figure",
            "--m1",
            &m1,
            "--m2",
            &m2,
            "--distance",
            "-90"
        ])
        .0,
        1
    );

    let (_, corpus, _) = cli(&["generate", "corpus", "--length", "30000", "--seed", "2"]);
    let corpus = scratch("rep.txt", &corpus);
    let (code, params, _) = cli(&["repeats", "params", "--corpus", &corpus, "--max-r", "6"]);
    assert_eq!(code, 0);
    let params = scratch("params.json", &params);
    let (code, out, _) = cli(&[
        "repeats", "score", "--figure", "OXXXXXXO", "--params", &params,
    ]);
    assert_eq!(code, 0);
    assert!(out.starts_with("decibans\t"));
    let (code, _, err) = cli(&[
        "repeats",
        "score",
        "--figure",
        "XXXXXXXXX",
        "--params",
        &params,
    ]);
    assert_eq!(code, 1);
    assert!(err.contains("exceeds"), "{err}");
    let (code, out, _) = cli(&[
        "repeats", "score", "--figure", "X", "--simple", "--beta", "0.0621",
    ]);
    assert_eq!(code, 0);
    assert!(out.starts_with("decibans\t2.08"), "{out}");
}

#[test]
fn simple_scorer_separates_fits_with_longer_overlap() {
    let (code, out, _) = cli(&[
        "repeats",
        "simulate",
        "--overlap",
        "400",
        "--trials",
        "100",
        "--seed",
        "1",
    ]);
    assert_eq!(code, 0);
    let auc: f64 = out
        .lines()
        .find_map(|l| l.strip_prefix("auc\t"))
        .unwrap()
        .parse()
        .unwrap();
    assert!(auc > 0.9, "{auc}");
}

#[test]
fn transposition_commands() {
    let german = "SATPTWSFASTAUTEEAIEUFHWTJTDDGCNITSEFCUIEBOEYQHGTJTEEFIEORTARURNLNNNNAIEOTUSHLESBFBRNDXGNJHUANWR";
    let message = scratch("german.txt", german);
    let (code, out, _) = cli(&[
        "transpose",
        "decipher",
        "--key",
        "5,11,8,7,3,10,6,12,9,4,1,2",
        "--cipher",
        &message,
    ]);
    assert_eq!(code, 0);
    assert!(out.starts_with("BNTOSJJALBARFJ"));
    let plain = scratch("plain.txt", &out);
    let (_, back, _) = cli(&[
        "transpose",
        "encipher",
        "--key",
        "5,11,8,7,3,10,6,12,9,4,1,2",
        "--plain",
        &plain,
    ]);
    assert_eq!(back.trim(), german);

    let (code, scan, _) = cli(&[
        "transpose",
        "score",
        "--probe",
        "SATPTW",
        "--message",
        &message,
        "--fixture",
    ]);
    assert_eq!(code, 0);
    assert_eq!(scan.lines().count(), 1 + german.len() - 5);
    assert!(scan.lines().nth(1).unwrap().ends_with("\t-\t-"));

    let (_, corpus, _) = cli(&["generate", "corpus", "--length", "20000", "--seed", "5"]);
    let corpus = scratch("tcorpus.txt", &corpus);
    let (_, counts, _) = cli(&["stats", "--corpus", &corpus, "--format", "tsv"]);
    let counts = scratch("tcounts.tsv", &counts);
    let (code, table, _) = cli(&["transpose", "table", "--bigrams", &counts]);
    assert_eq!(code, 0);
    assert_eq!(table.lines().count(), 677);
    let table = scratch("table.tsv", &table);
    assert_eq!(
        cli(&[
            "transpose",
            "score",
            "--probe",
            "SATPTW",
            "--message",
            &message,
            "--table",
            &table
        ])
        .0,
        0
    );

    let (code, out, _) = cli(&["transpose", "markov-check", "--bigrams", &counts]);
    assert_eq!(code, 0);
    assert!(!out.contains("converged_at\tnone"));
    assert_eq!(
        cli(&[
            "transpose",
            "bottomprob",
            "--length",
            "10",
            "--pos",
            "11",
            "--keys",
            "3"
        ])
        .0,
        1
    );
    assert_eq!(
        cli(&[
            "transpose",
            "bottomprob",
            "--length",
            "10",
            "--pos",
            "1",
            "--keys",
            "5..2"
        ])
        .0,
        2
    );
}

#[test]
fn bayes_defaults_to_evens() {
    let (code, out, _) = cli(&["bayes", "--decibans", "10"]);
    assert_eq!(code, 0);
    assert!(out.contains("posterior_odds\t10.000000\n"));
    assert_eq!(cli(&["bayes", "--prior", "1:0"]).0, 2);
}
