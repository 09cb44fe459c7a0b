use coolio_core::assets::{SnippetEntry, SNIPPETS};
use coolio_core::diagnostics::{LineIndex, PositionEncoding};
use lsp_types::{CompletionItem, CompletionItemKind, Documentation, InsertTextFormat, Position};

fn is_word_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Char offset of `position` within `text`, or `None` if the position is
/// past the end of its line or the document.
pub fn offset_of(text: &str, index: &LineIndex, position: Position, encoding: PositionEncoding) -> Option<usize> {
    let line = position.line.checked_add(1)?;
    if line as usize > index.line_count() {
        return None;
    }
    let content = &text[index.line_bytes(line)];
    let line_start = index.line_starts()[line as usize - 1];
    let mut units = 0usize;
    for (chars, c) in content.chars().enumerate() {
        if units == position.character as usize {
            return Some(line_start + chars);
        }
        units += match encoding {
            PositionEncoding::Utf16 => c.len_utf16(),
            PositionEncoding::Utf8 => c.len_utf8(),
        };
        if units > position.character as usize {
            return None;
        }
    }
    (units == position.character as usize).then(|| line_start + content.chars().count())
}

/// The maximal run of identifier characters ending at `position`.
pub fn word_before(text: &str, index: &LineIndex, position: Position, encoding: PositionEncoding) -> Option<String> {
    let offset = offset_of(text, index, position, encoding)?;
    let before: Vec<char> = text.chars().take(offset).collect();
    let start = before
        .iter()
        .rposition(|c| !is_word_char(*c))
        .map_or(0, |i| i + 1);
    Some(before[start..].iter().collect())
}

pub fn snippet_item(entry: &SnippetEntry) -> CompletionItem {
    CompletionItem {
        label: entry.label.to_string(),
        kind: Some(CompletionItemKind::SNIPPET),
        detail: Some(entry.description.to_string()),
        documentation: Some(Documentation::String(entry.body_text())),
        filter_text: Some(entry.prefix.to_string()),
        insert_text: Some(entry.body_text()),
        insert_text_format: Some(InsertTextFormat::SNIPPET),
        ..CompletionItem::default()
    }
}

/// Snippets whose prefix starts with `word`, case-sensitively.
pub fn complete_word(word: &str) -> Vec<CompletionItem> {
    SNIPPETS
        .iter()
        .filter(|s| s.prefix.starts_with(word))
        .map(snippet_item)
        .collect()
}

pub fn complete(text: &str, index: &LineIndex, position: Position, encoding: PositionEncoding) -> Vec<CompletionItem> {
    match word_before(text, index, position, encoding) {
        Some(word) => complete_word(&word),
        None => Vec::new(),
    }
}
