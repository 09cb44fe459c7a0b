//! Editor assets: the TextMate grammar and the completion snippet table.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use crate::lexer::Keyword;

pub const GRAMMAR_FILE: &str = "cool.tmLanguage.json";
pub const SNIPPETS_FILE: &str = "cool.code-snippets.json";
pub const SCOPE_NAME: &str = "source.cool";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SnippetEntry {
    /// Key in the snippet file.
    pub key: &'static str,
    pub label: &'static str,
    pub prefix: &'static str,
    pub body: &'static [&'static str],
    pub description: &'static str,
}

impl SnippetEntry {
    /// Body lines joined as inserted by the editor.
    pub fn body_text(&self) -> String {
        self.body.join("\n")
    }
}

pub const SNIPPETS: &[SnippetEntry] = &[
    SnippetEntry {
        key: "COOL_class",
        label: "class",
        prefix: "class",
        body: &["class ${1:Name} {", "\t${0:body}", "};"],
        description: "COOL: class",
    },
    SnippetEntry {
        key: "COOL_class_inherits",
        label: "class inherits",
        prefix: "class",
        body: &["class ${1:Name} inherits ${2:Object}{", "\t${0:body}", "};"],
        description: "COOL: class inherits",
    },
    SnippetEntry {
        key: "COOL_method",
        label: "method",
        prefix: "method",
        body: &["${1:name}(${2:arg} : ${3:Type}) : ${4:Type} {", "\t${0:body}", "};"],
        description: "COOL: method definition",
    },
    SnippetEntry {
        key: "COOL_if",
        label: "if",
        prefix: "if",
        body: &["if ${1:condition} then ${2:expression} else ${0:expression} fi"],
        description: "COOL: if then else",
    },
    SnippetEntry {
        key: "COOL_while",
        label: "while",
        prefix: "while",
        body: &["while ${1:condition} loop", "\t${0:body}", "pool"],
        description: "COOL: while loop",
    },
    SnippetEntry {
        key: "COOL_let",
        label: "let",
        prefix: "let",
        body: &["let ${1:var} : ${2:Type} <- ${3:value} in", "\t${0:body}"],
        description: "COOL: let declaration",
    },
    SnippetEntry {
        key: "COOL_case",
        label: "case",
        prefix: "case",
        body: &["case ${1:expression} of", "\t${2:id} : ${3:Type} => ${0:expression};", "esac"],
        description: "COOL: case",
    },
];

/// Tab-stop indices of a snippet body, in order of appearance. Accepts
/// `$n` and `${n:default}`; `\$` escapes a dollar sign. The body must contain
/// a final `$0` stop and positive stops numbered 1..=k without gaps.
pub fn placeholders(body: &str) -> Result<Vec<u32>, String> {
    let chars: Vec<char> = body.chars().collect();
    let mut found = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        match chars[i] {
            '\\' => i += 2,
            '$' => {
                i += 1;
                let braced = chars.get(i) == Some(&'{');
                if braced {
                    i += 1;
                }
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                if start == i {
                    return Err(format!("'$' without a tab-stop index at {}", start - 1));
                }
                let index: u32 = chars[start..i]
                    .iter()
                    .collect::<String>()
                    .parse()
                    .map_err(|e| format!("bad index: {e}"))?;
                if braced {
                    let mut depth = 1;
                    match chars.get(i) {
                        Some('}') => depth = 0,
                        Some(':') => {}
                        _ => return Err(format!("malformed placeholder at {start}")),
                    }
                    i += 1;
                    while depth > 0 {
                        match chars.get(i) {
                            None => return Err("unterminated placeholder".into()),
                            Some('\\') => i += 1,
                            Some('{') => depth += 1,
                            Some('}') => depth -= 1,
                            _ => {}
                        }
                        i += 1;
                    }
                }
                found.push(index);
            }
            _ => i += 1,
        }
    }
    if !found.contains(&0) {
        return Err("missing final $0 tab stop".into());
    }
    let max = found.iter().copied().max().unwrap_or(0);
    if let Some(gap) = (1..=max).find(|n| !found.contains(n)) {
        return Err(format!("tab stop {gap} is missing"));
    }
    Ok(found)
}

fn rule(name: &str, pattern: &str) -> Value {
    json!({ "match": pattern, "name": name })
}

/// The keyword alternation used in the grammar, in declaration order.
pub fn keyword_pattern() -> String {
    let words: Vec<&str> = Keyword::ALL.iter().map(|k| k.as_str()).collect();
    format!("\\b(?i:{})\\b", words.join("|"))
}

pub fn grammar() -> Value {
    let order = [
        "line_comment",
        "block_comment",
        "string",
        "integer",
        "capitalized_boolean",
        "keyword",
        "special_id",
        "class",
        "object_id",
        "operator",
    ];
    let mut repository = Map::new();
    repository.insert(
        "line_comment".into(),
        json!({ "begin": "--", "end": "$\\n?", "name": "comment.line.double-dash.cool" }),
    );
    repository.insert(
        "block_comment".into(),
        json!({
            "begin": "\\(\\*",
            "end": "\\*\\)",
            "name": "comment.block.cool",
            "patterns": [{ "include": "#block_comment" }]
        }),
    );
    repository.insert(
        "string".into(),
        json!({
            "begin": "\"",
            "end": "\"",
            "name": "string.quoted.double.cool",
            "patterns": [{ "match": "\\\\.", "name": "constant.character.escape.cool" }]
        }),
    );
    repository.insert(
        "integer".into(),
        rule("constant.numeric.integer.cool", "\\b(0|[1-9][0-9]*)\\b"),
    );
    // `True` and `False` are type names, not the boolean constants.
    repository.insert(
        "capitalized_boolean".into(),
        rule("entity.name.type.class.cool", "\\b[TF](?i:rue|alse)\\b"),
    );
    repository.insert("keyword".into(), rule("keyword.control.cool", &keyword_pattern()));
    repository.insert(
        "special_id".into(),
        rule("variable.language.cool", "\\b(self|SELF_TYPE)\\b"),
    );
    repository.insert(
        "class".into(),
        rule("entity.name.type.class.cool", "\\b[A-Z][A-Za-z0-9_]*\\b"),
    );
    repository.insert(
        "object_id".into(),
        rule("variable.other.cool", "\\b[a-z][A-Za-z0-9_]*\\b"),
    );
    repository.insert(
        "operator".into(),
        rule("keyword.operator.cool", "<-|<=|=>|[-+*/~<=@.]"),
    );
    let patterns: Vec<Value> = order
        .iter()
        .map(|r| json!({ "include": format!("#{r}") }))
        .collect();
    json!({
        "scopeName": SCOPE_NAME,
        "name": "COOL",
        "fileTypes": ["cl"],
        "patterns": patterns,
        "repository": repository,
    })
}

pub fn snippets() -> Value {
    let mut map = Map::new();
    for s in SNIPPETS {
        map.insert(
            s.key.into(),
            json!({ "prefix": s.prefix, "body": s.body, "description": s.description }),
        );
    }
    Value::Object(map)
}

fn render(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    text.push('\n');
    text
}

pub fn grammar_json() -> String {
    render(&grammar())
}

pub fn snippets_json() -> String {
    render(&snippets())
}

/// Writes the grammar and snippet files into `dir`, returning their paths.
pub fn emit_assets(dir: &Path) -> io::Result<Vec<PathBuf>> {
    let grammar_path = dir.join(GRAMMAR_FILE);
    let snippets_path = dir.join(SNIPPETS_FILE);
    fs::write(&grammar_path, grammar_json())?;
    fs::write(&snippets_path, snippets_json())?;
    Ok(vec![grammar_path, snippets_path])
}
