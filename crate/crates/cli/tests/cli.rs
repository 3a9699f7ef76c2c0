use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use polarlab::gf2::Gf2Poly;
use polarlab_cli::commands::parse_data;
use polarlab_cli::RunConfig;

fn polarlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polarlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, format!("{body}\n[output]\ndirectory = \"out\"\n")).unwrap();
    p
}

fn set_line<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")))
        .unwrap_or_else(|| panic!("no {key} line"))
}

fn construct(dir: &Path, name: &str, body: &str) -> String {
    let cfg = write_config(dir, name, body);
    let out = polarlab(&["construct", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let path = String::from_utf8(out.stdout).unwrap();
    fs::read_to_string(path.trim()).unwrap()
}

#[test]
fn polar_32_16_information_set() {
    let dir = tempfile::tempdir().unwrap();
    let text = construct(dir.path(), "p.toml", "[code]\nscheme = \"polar\"\nn = 32\nk = 16\n");
    let mut expect = vec![11, 13, 14, 15, 19];
    expect.extend(21..32);
    let info: Vec<usize> = set_line(&text, "info")
        .split_whitespace()
        .map(|t| t.parse().unwrap())
        .collect();
    assert_eq!(info, expect);
}

#[test]
fn ps_pac_without_shift_matches_pac() {
    let dir = tempfile::tempdir().unwrap();
    let body = |s: &str| format!("[code]\nscheme = \"{s}\"\nn = 64\nk = 32\nconv_poly = \"1011011011\"\nalpha = 0\n");
    let pac = construct(dir.path(), "a.toml", &body("pac"));
    let ps = construct(dir.path(), "b.toml", &body("ps_pac"));
    let strip = |t: &str| t.lines().filter(|l| !l.starts_with("scheme")).collect::<Vec<_>>().join("\n");
    assert_eq!(strip(&pac), strip(&ps));
}

#[test]
fn ccrc_masked_set() {
    let dir = tempfile::tempdir().unwrap();
    let text = construct(
        dir.path(),
        "c.toml",
        "[code]\nscheme = \"ccrc_polar\"\nn = 32\nk = 16\ncrc_poly = \"101001\"\n",
    );
    assert_eq!(set_line(&text, "masked"), "8 9 10 16");
    assert_eq!(set_line(&text, "crc"), "27 28 29 30 31");
}

#[test]
fn profile_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let text = construct(
        dir.path(),
        "c.toml",
        "[code]\nscheme = \"ccrc_polar\"\nn = 32\nk = 16\ncrc_poly = \"101001\"\n",
    );
    fs::write(dir.path().join("saved.txt"), &text).unwrap();
    let again = construct(
        dir.path(),
        "d.toml",
        "[construction]\nsource = \"profile\"\npath = \"saved.txt\"\n",
    );
    assert_eq!(text, again);
}

#[test]
fn wmin_closed_form_equals_search() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "w.toml",
        "[code]\nscheme = \"polar\"\nn = 16\nk = 8\n[wmin]\nmethod = \"both\"\n",
    );
    let out = polarlab(&["wmin", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    let csv = fs::read_to_string(dir.path().join("out/wmin_16_8.csv")).unwrap();
    let rows: Vec<Vec<&str>> = csv.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][5], "closed_form");
    assert_eq!(rows[1][5], "exhaustive_search");
    assert_eq!(rows[0][3..5], rows[1][3..5]);
    assert_eq!(rows[0][6], rows[1][6]);
}

#[test]
fn exhaustive_search_refuses_long_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "w.toml", "[code]\nscheme = \"polar\"\nn = 128\nk = 64\n");
    let out = polarlab(&["wmin", cfg.to_str().unwrap()]);
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.trim_end().lines().count(), 1, "{err}");
    assert!(err.contains("N <= 64"));
}

const SIM: &str = "[code]\nscheme = \"crc_polar\"\nn = 32\nk = 16\ncrc_poly = \"101001\"\n\
[sim]\nlist_size = 4\nsnr_db = [40.0]\nseed = 5\nmin_errors = 1\nmax_frames = 1000\n";

#[test]
fn high_snr_simulation_is_error_free() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "s.toml", SIM);
    let out = polarlab(&["simulate", "-q", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    let csv = fs::read_to_string(String::from_utf8(out.stdout).unwrap().trim()).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("scheme,N,K,L,snr_db,frames,block_errors,bler,ci95,bit_errors,ber")
    );
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&row[..7], &["crc_polar", "32", "16", "4", "40.000", "1000", "0"]);
}

#[test]
fn simulation_is_byte_stable_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let body = SIM.replace("[40.0]", "[1.0, 3.0]").replace("min_errors = 1", "min_errors = 20");
    let cfg = write_config(dir.path(), "s.toml", &body);
    let run = || {
        let out = polarlab(&["simulate", "-q", cfg.to_str().unwrap()]);
        assert!(out.status.success());
        fs::read(String::from_utf8(out.stdout).unwrap().trim()).unwrap()
    };
    assert_eq!(run(), run());
}

const CRC_32_16: &str = "[code]\nscheme = \"crc_polar\"\nn = 32\nk = 16\ncrc_poly = \"101001\"\n";

#[test]
fn codec_example_message() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "e.toml", CRC_32_16);
    let out = polarlab(&["codec", cfg.to_str().unwrap(), "0006", "--decode", "10"]);
    assert!(out.status.success());
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.contains("crc positions  u27=1 u28=0 u29=0 u30=0 u31=1"), "{s}");
    assert!(s.contains("weight(x) = 20"));
    assert!(s.contains("match true"));
}

#[test]
fn codec_zero_word() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "e.toml", CRC_32_16);
    let out = polarlab(&["codec", cfg.to_str().unwrap(), "0000"]);
    let s = String::from_utf8(out.stdout).unwrap();
    for stage in ["d", "c", "v", "u", "x"] {
        let line = s.lines().find(|l| l.starts_with(&format!("{stage}  "))).unwrap();
        assert!(line[3..].chars().all(|c| c == '0'), "{line}");
    }
}

#[test]
fn codec_decodes_given_llrs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "e.toml", "[code]\nscheme = \"polar\"\nn = 8\nk = 4\n");
    // all-zero codeword with one weak flipped position
    let llr = dir.path().join("llr.txt");
    fs::write(&llr, "4.0, 3.5, -0.5, 4.2\n3.9 4.4 5.0 3.1\n").unwrap();
    let out = polarlab(&["codec", cfg.to_str().unwrap(), "0", "--llr", llr.to_str().unwrap()]);
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.contains("decoded d  0000"), "{s}");
}

#[test]
fn malformed_input_fails_with_one_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "e.toml", CRC_32_16);
    for args in [
        vec!["codec", cfg.to_str().unwrap(), "00g6"],
        vec!["codec", cfg.to_str().unwrap(), "10000"],
        vec!["construct", "/nonexistent/config.toml"],
    ] {
        let out = polarlab(&args);
        assert!(!out.status.success(), "{args:?}");
        let err = String::from_utf8(out.stderr).unwrap();
        assert_eq!(err.trim_end().lines().count(), 1, "{err}");
    }
    let bad = write_config(dir.path(), "b.toml", "[code]\nscheme = \"polar\"\nn = 12\nk = 4\n");
    assert!(!polarlab(&["construct", bad.to_str().unwrap()]).status.success());
    let bad = write_config(dir.path(), "c.toml", "[code]\nscheme = \"crc_polar\"\nn = 32\nk = 8\ncrc_poly = \"10100\"\n");
    assert!(!polarlab(&["construct", bad.to_str().unwrap()]).status.success());
}

#[test]
fn polynomial_strings_are_msb_first() {
    let q = Gf2Poly::parse("111000100001").unwrap();
    assert_eq!(q, Gf2Poly::from_exponents(&[11, 10, 9, 5, 0]).unwrap());
    assert_eq!(Gf2Poly::parse("0xE21").unwrap(), q);
    let cfg = RunConfig::parse(
        "[code]\nscheme = \"pac\"\nn = 64\nk = 32\nconv_poly = \"1011011011\"\n",
    )
    .unwrap();
    let conv = cfg.conv().unwrap().unwrap();
    let p: Vec<u8> = (0..=9).map(|a| conv.coeffs().bit(a)).collect();
    assert_eq!(p, [1, 1, 0, 1, 1, 0, 1, 1, 0, 1]);
}

#[test]
fn hex_data_is_msb_first() {
    let d = parse_data("0006", 16).unwrap();
    assert_eq!(d.support(), vec![13, 14]);
    assert_eq!(parse_data("0b101", 3).unwrap().support(), vec![0, 2]);
    assert!(parse_data("8", 3).is_err());
    assert_eq!(parse_data("7", 3).unwrap().weight(), 3);
}

#[test]
fn unknown_config_keys_are_rejected() {
    assert!(RunConfig::parse("[code]\nschema = \"polar\"\n").is_err());
}
