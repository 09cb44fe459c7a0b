use std::collections::HashMap;

use coolio_core::diagnostics::LineIndex;
use lsp_types::Url;

#[derive(Clone, Debug)]
pub struct Document {
    pub text: String,
    pub version: i32,
    pub index: LineIndex,
}

impl Document {
    fn new(text: String, version: i32) -> Self {
        let index = LineIndex::new(&text);
        Document { text, version, index }
    }
}

/// Open documents keyed by URI.
#[derive(Clone, Debug, Default)]
pub struct DocumentStore {
    docs: HashMap<Url, Document>,
}

impl DocumentStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn open(&mut self, uri: Url, text: String, version: i32) {
        self.docs.insert(uri, Document::new(text, version));
    }

    /// Replaces the text of an open document. Changes that do not advance
    /// the version are rejected and leave the document untouched.
    pub fn change(&mut self, uri: &Url, text: String, version: i32) -> bool {
        match self.docs.get_mut(uri) {
            Some(doc) if version > doc.version => {
                *doc = Document::new(text, version);
                true
            }
            _ => false,
        }
    }

    pub fn close(&mut self, uri: &Url) -> Option<Document> {
        self.docs.remove(uri)
    }

    pub fn get(&self, uri: &Url) -> Option<&Document> {
        self.docs.get(uri)
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uri() -> Url {
        Url::parse("file:///tmp/a.cl").unwrap()
    }

    #[test]
    fn versions_only_move_forward() {
        let mut store = DocumentStore::new();
        store.open(uri(), "a".into(), 1);
        assert!(store.change(&uri(), "ab".into(), 2));
        assert!(!store.change(&uri(), "stale".into(), 2));
        assert!(!store.change(&uri(), "stale".into(), 1));
        let doc = store.get(&uri()).unwrap();
        assert_eq!((doc.text.as_str(), doc.version), ("ab", 2));
        assert_eq!(doc.index.len_chars(), 2);
    }

    #[test]
    fn change_to_unknown_document_is_rejected() {
        let mut store = DocumentStore::new();
        assert!(!store.change(&uri(), "x".into(), 5));
        assert!(store.is_empty());
    }

    #[test]
    fn close_removes() {
        let mut store = DocumentStore::new();
        store.open(uri(), "a".into(), 1);
        assert!(store.close(&uri()).is_some());
        assert!(store.get(&uri()).is_none());
    }
}
