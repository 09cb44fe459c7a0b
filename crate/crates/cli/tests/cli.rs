use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

fn corpus(dir: &str) -> Vec<PathBuf> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/corpus").join(dir);
    let mut files: Vec<PathBuf> = fs::read_dir(root)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "cl"))
        .collect();
    files.sort();
    files
}

fn all_corpus() -> Vec<PathBuf> {
    ["valid", "invalid", "productions", "runtime"]
        .iter()
        .flat_map(|d| corpus(d))
        .collect()
}

fn coolio(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_coolio"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn on_file(sub: &str, path: &Path) -> Output {
    coolio(&[sub, path.to_str().unwrap()], "")
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8(bytes.to_vec()).unwrap()
}

fn write_temp(dir: &tempfile::TempDir, name: &str, contents: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, contents).unwrap();
    path
}

#[test]
fn valid_programs_produce_expected_output() {
    let files = corpus("valid");
    assert!(files.len() >= 5);
    for file in files {
        let out = on_file("run", &file);
        let expected = fs::read_to_string(file.with_extension("out")).unwrap();
        assert_eq!(text(&out.stdout), expected, "{}", file.display());
        assert_eq!(text(&out.stderr), "", "{}", file.display());
        assert_eq!(out.status.code(), Some(0), "{}", file.display());
    }
}

#[test]
fn hello_world() {
    let hello = corpus("valid").into_iter().find(|p| p.ends_with("hello.cl")).unwrap();
    let out = on_file("run", &hello);
    assert_eq!(text(&out.stdout), "HelloWorld");
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn attribute_initializer_type_error() {
    let bad = corpus("invalid").into_iter().find(|p| p.ends_with("attr_init.cl")).unwrap();
    let out = on_file("typecheck", &bad);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(
        text(&out.stderr),
        "ERROR: 2: typechecking: String does not conform to Int in initialization of attribute num\n"
    );
    assert_eq!(text(&out.stdout), "");
}

#[test]
fn runtime_error_reports_line() {
    let file = &corpus("runtime")[0];
    let out = on_file("run", file);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(text(&out.stderr), "ERROR: 4: evaluation: division by zero\n");
}

#[test]
fn exit_code_zero_iff_stderr_empty() {
    for file in all_corpus() {
        for sub in ["lex", "parse", "typecheck"] {
            let out = on_file(sub, &file);
            assert_eq!(
                out.status.code() == Some(0),
                out.stderr.is_empty(),
                "{sub} {}",
                file.display()
            );
        }
    }
}

#[test]
fn later_phases_never_hide_earlier_errors() {
    for file in all_corpus() {
        let lines = |sub: &str| -> Vec<String> {
            text(&on_file(sub, &file).stderr).lines().map(String::from).collect()
        };
        let (lex, parse, check) = (lines("lex"), lines("parse"), lines("typecheck"));
        for l in &lex {
            assert!(parse.contains(l), "{}: {l}", file.display());
        }
        for l in &parse {
            assert!(check.contains(l), "{}: {l}", file.display());
        }
    }
}

#[test]
fn lex_dump_format() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_temp(&dir, "t.cl", "class Main {\n  x : Int <- 0; -- note\n  s : String <- \"a\\tb\";\n};");
    let out = on_file("lex", &file);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        text(&out.stdout),
        "1: CLASS class\n1: TYPEID Main\n1: LBRACE {\n\
         2: OBJECTID x\n2: COLON :\n2: TYPEID Int\n2: ASSIGN <-\n2: INT_CONST 0\n2: SEMI ;\n\
         3: OBJECTID s\n3: COLON :\n3: TYPEID String\n3: ASSIGN <-\n3: STR_CONST \"a\\tb\"\n3: SEMI ;\n\
         4: RBRACE }\n4: SEMI ;\n"
    );
}

#[test]
fn lex_empty_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_temp(&dir, "empty.cl", "");
    let out = on_file("lex", &file);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert!(out.stderr.is_empty());
}

#[test]
fn lex_errors_still_print_tokens() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_temp(&dir, "bad.cl", "x 007 #");
    let out = on_file("lex", &file);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(text(&out.stdout), "1: OBJECTID x\n1: INT_CONST 007\n");
    assert_eq!(
        text(&out.stderr),
        "ERROR: 1: lexing: integer literal 007 has a leading zero\nERROR: 1: lexing: invalid character '#'\n"
    );
}

#[test]
fn parse_dump() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_temp(&dir, "p.cl", "class Main {\n  main() : Int { 1 + 2 };\n};");
    let out = on_file("parse", &file);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        text(&out.stdout),
        "program [1]\n  class Main [1]\n    method main : Int [2]\n      binop + [2]\n        int 1 [2]\n        int 2 [2]\n"
    );
}

#[test]
fn typecheck_prints_class_map() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_temp(
        &dir,
        "t.cl",
        "class A { a : Int; f(x : Int, y : A) : SELF_TYPE { self }; };\nclass Main inherits A { main() : Object { 0 }; };",
    );
    let out = on_file("typecheck", &file);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        text(&out.stdout),
        "OK\nclass A inherits Object\n  attribute a : Int\n  method f(x : Int, y : A) : SELF_TYPE\nclass Main inherits A\n  method main() : Object\n"
    );
}

#[test]
fn run_reads_standard_input() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_temp(
        &dir,
        "echo.cl",
        "class Main inherits IO { main() : Object { out_int(in_int() + in_int()) }; };",
    );
    let out = coolio(&["run", file.to_str().unwrap()], "40\n2\n");
    assert_eq!(text(&out.stdout), "42");
}

#[test]
fn run_with_fuel() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_temp(&dir, "spin.cl", "class Main {\n  main() : Object {\n    while true loop 0 pool\n  };\n};");
    let out = coolio(&["run", "--fuel", "10000", file.to_str().unwrap()], "");
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stderr).contains("evaluation: fuel exhausted"));
}

#[test]
fn abort_has_distinct_status() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_temp(
        &dir,
        "abort.cl",
        "class Main inherits IO { main() : Object {{ out_string(\"before\"); abort(); }}; };",
    );
    let out = on_file("run", &file);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(text(&out.stdout), "before");
    assert_eq!(text(&out.stderr), "abort called from class Main\n");
}

#[test]
fn run_stops_on_type_errors() {
    let bad = corpus("invalid").into_iter().find(|p| p.ends_with("attr_init.cl")).unwrap();
    let out = on_file("run", &bad);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
}

#[test]
fn missing_file() {
    let out = coolio(&["run", "/definitely/not/here.cl"], "");
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).starts_with("error: cannot read"));
}

#[test]
fn wrong_extension_warns_and_proceeds() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_temp(&dir, "prog.txt", "class Main { main() : Object { 0 }; };");
    let out = on_file("typecheck", &file);
    assert_eq!(out.status.code(), Some(0));
    assert!(text(&out.stderr).starts_with("warning:"));
    assert!(text(&out.stdout).starts_with("OK\n"));
}

#[test]
fn usage_errors() {
    let out = coolio(&["frobnicate"], "");
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("Usage"));
    let out = coolio(&[], "");
    assert_eq!(out.status.code(), Some(2));
    let out = coolio(&["--help"], "");
    assert_eq!(out.status.code(), Some(0));
    assert!(text(&out.stdout).contains("emit-assets"));
}

#[test]
fn emit_assets_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = coolio(&["emit-assets", "--out", dir.path().to_str().unwrap()], "");
        assert_eq!(out.status.code(), Some(0));
    }
    for name in ["cool.tmLanguage.json", "cool.code-snippets.json"] {
        let x = fs::read(a.path().join(name)).unwrap();
        let y = fs::read(b.path().join(name)).unwrap();
        assert_eq!(x, y, "{name}");
    }
}

#[test]
fn emit_assets_into_unwritable_location() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = write_temp(&dir, "file", "");
    let target = blocker.join("sub");
    let out = coolio(&["emit-assets", "--out", target.to_str().unwrap()], "");
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn lsp_subcommand_speaks_over_stdio() {
    let mut input = Vec::new();
    for body in [
        r#"{"jsonrpc":"2.0","id":1,"method":"initialize","params":{"capabilities":{}}}"#,
        r#"{"jsonrpc":"2.0","id":2,"method":"shutdown"}"#,
        r#"{"jsonrpc":"2.0","method":"exit"}"#,
    ] {
        write!(input, "Content-Length: {}\r\n\r\n{body}", body.len()).unwrap();
    }
    let out = coolio(&["lsp"], std::str::from_utf8(&input).unwrap());
    assert_eq!(out.status.code(), Some(0));
    let stdout = text(&out.stdout);
    assert!(stdout.starts_with("Content-Length: "));
    assert!(stdout.contains("completionProvider"));
}

#[test]
fn lexer_golden() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/corpus/golden");
    let out = on_file("lex", &dir.join("lexer.cl"));
    assert_eq!(text(&out.stdout), fs::read_to_string(dir.join("lexer.tokens")).unwrap());
    assert_eq!(text(&out.stderr), fs::read_to_string(dir.join("lexer.err")).unwrap());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn audit_mode_over_valid_corpus() {
    use coolio_core::interpreter::{run_program, RunConfig, RunResult};
    use coolio_core::pipeline::{analyze, Stage};
    let mut audited = 0;
    for file in corpus("valid") {
        let analysis = analyze(&fs::read_to_string(&file).unwrap(), Stage::Typecheck);
        let (program, table) = (analysis.program.unwrap(), analysis.table.unwrap());
        let config = RunConfig {
            audit: true,
            ..RunConfig::default()
        };
        let outcome = run_program(&program, &table, "", &config);
        assert_eq!(outcome.result, RunResult::Completed, "{}", file.display());
        audited += outcome.audited;
        let expected = fs::read_to_string(file.with_extension("out")).unwrap();
        assert_eq!(outcome.output, expected, "{}", file.display());
    }
    assert!(audited > 0);
}
