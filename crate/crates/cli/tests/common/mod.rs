//! Helpers shared by the golden and acceptance test targets.
#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_entrovel")
}

pub fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

pub fn golden_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

pub fn run(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .output()
        .expect("failed to spawn entrovel")
}

pub fn run_ok(args: &[&str]) -> Vec<u8> {
    let out = run(args);
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out.stdout
}

/// Byte-compare against a checked-in golden; `UPDATE_GOLDEN=1` rewrites it.
pub fn check_golden(name: &str, actual: &[u8]) {
    let path = golden_path(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let expected = std::fs::read(&path)
        .unwrap_or_else(|e| panic!("missing golden {name} ({e}); run with UPDATE_GOLDEN=1"));
    if expected != actual {
        panic!(
            "golden mismatch for {name}\n--- expected ---\n{}\n--- actual ---\n{}",
            String::from_utf8_lossy(&expected),
            String::from_utf8_lossy(actual)
        );
    }
}

/// Tiny well-formedness checker: single root, matched tags, quoted
/// attributes. Enough to catch malformed output without an XML crate.
pub fn assert_well_formed_xml(text: &str) {
    let mut rest = text.trim_start();
    if let Some(stripped) = rest.strip_prefix("<?xml") {
        let end = stripped.find("?>").expect("unterminated xml declaration");
        rest = &stripped[end + 2..];
    }
    let mut stack: Vec<String> = Vec::new();
    let mut roots = 0usize;
    let mut chars = rest.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if c != '<' {
            continue;
        }
        let tail = &rest[i..];
        let end = tail.find('>').unwrap_or_else(|| panic!("unclosed tag at byte {i}"));
        let tag = &tail[1..end];
        assert!(!tag.is_empty(), "empty tag at byte {i}");
        let quotes = tag.matches('"').count();
        assert!(quotes.is_multiple_of(2), "unbalanced attribute quotes in <{tag}>");
        if let Some(name) = tag.strip_prefix('/') {
            let open = stack.pop().unwrap_or_else(|| panic!("stray closing </{name}>"));
            assert_eq!(open, name, "mismatched </{name}>, open was <{open}>");
        } else if tag.ends_with('/') {
            if stack.is_empty() {
                roots += 1;
            }
        } else {
            let name: String = tag
                .split_whitespace()
                .next()
                .unwrap()
                .trim_end_matches('/')
                .to_string();
            if stack.is_empty() {
                roots += 1;
            }
            stack.push(name);
        }
        while let Some(&(j, _)) = chars.peek() {
            if j > i + end {
                break;
            }
            chars.next();
        }
    }
    assert!(stack.is_empty(), "unclosed tags: {stack:?}");
    assert_eq!(roots, 1, "expected exactly one root element");
}

pub fn extract_drawn_points(svg: &str) -> Vec<(f64, f64)> {
    let mut pts = Vec::new();
    for part in svg.split("<circle ").skip(1) {
        let cx = attr_value(part, "cx");
        let cy = attr_value(part, "cy");
        pts.push((cx, cy));
    }
    for part in svg.split("points=\"").skip(1) {
        let coords = part.split('"').next().unwrap();
        for pair in coords.split(' ') {
            let mut it = pair.split(',');
            let x: f64 = it.next().unwrap().parse().unwrap();
            let y: f64 = it.next().unwrap().parse().unwrap();
            pts.push((x, y));
        }
    }
    pts
}

fn attr_value(fragment: &str, name: &str) -> f64 {
    let marker = format!("{name}=\"");
    let start = fragment.find(&marker).unwrap() + marker.len();
    let rest = &fragment[start..];
    rest[..rest.find('"').unwrap()].parse().unwrap()
}

/// Well-formed XML with every drawn point inside the 800x500 viewport.
pub fn assert_svg_contract(path: &Path) {
    let svg = std::fs::read_to_string(path).unwrap();
    assert_well_formed_xml(&svg);
    let pts = extract_drawn_points(&svg);
    assert!(!pts.is_empty(), "figure should draw something");
    for (x, y) in pts {
        assert!((0.0..=800.0).contains(&x), "x {x} outside viewport in {path:?}");
        assert!((0.0..=500.0).contains(&y), "y {y} outside viewport in {path:?}");
    }
}
