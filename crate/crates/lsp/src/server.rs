use std::io::{BufRead, Write};

use coolio_core::diagnostics::{Diagnostic, LineIndex, PositionEncoding, TextRange};
use coolio_core::pipeline::{analyze, Stage};
use lsp_types::{
    CompletionOptions, CompletionParams, CompletionResponse, DidChangeTextDocumentParams,
    DidCloseTextDocumentParams, DidOpenTextDocumentParams, DidSaveTextDocumentParams, InitializeParams,
    InitializeResult, NumberOrString, Position, PositionEncodingKind, PublishDiagnosticsParams, Range,
    SaveOptions, ServerCapabilities, ServerInfo, TextDocumentSyncCapability, TextDocumentSyncKind,
    TextDocumentSyncOptions, TextDocumentSyncSaveOptions, Url,
};
use serde_json::{json, Value};

use crate::completion::complete;
use crate::store::DocumentStore;
use crate::transport::{read_frame, write_message, FrameError};

pub mod codes {
    pub const PARSE_ERROR: i64 = -32700;
    pub const INVALID_REQUEST: i64 = -32600;
    pub const METHOD_NOT_FOUND: i64 = -32601;
    pub const INVALID_PARAMS: i64 = -32602;
    pub const SERVER_NOT_INITIALIZED: i64 = -32002;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum State {
    Uninitialized,
    Running,
    ShuttingDown,
}

/// What the loop should do after a message.
#[derive(Debug, PartialEq, Eq)]
pub enum Control {
    Continue,
    Exit(i32),
}

pub struct Server {
    state: State,
    encoding: PositionEncoding,
    documents: DocumentStore,
    outgoing: Vec<Value>,
}

impl Default for Server {
    fn default() -> Self {
        Self::new()
    }
}

fn error_response(id: Value, code: i64, message: &str) -> Value {
    json!({ "jsonrpc": "2.0", "id": id, "error": { "code": code, "message": message } })
}

fn to_lsp_range(range: TextRange) -> Range {
    Range {
        start: Position::new(range.start.line - 1, range.start.character),
        end: Position::new(range.end.line - 1, range.end.character),
    }
}

/// Converts a front-end diagnostic to its protocol form, covering the
/// diagnostic's whole line.
pub fn to_lsp_diagnostic(d: &Diagnostic, index: &LineIndex, encoding: PositionEncoding) -> lsp_types::Diagnostic {
    lsp_types::Diagnostic {
        range: to_lsp_range(index.line_to_range_in(d.line, encoding)),
        severity: Some(match d.severity {
            coolio_core::Severity::Error => lsp_types::DiagnosticSeverity::ERROR,
            coolio_core::Severity::Warning => lsp_types::DiagnosticSeverity::WARNING,
        }),
        code: Some(NumberOrString::String(d.phase.as_str().to_string())),
        source: Some("coolio".into()),
        message: d.message.clone(),
        ..lsp_types::Diagnostic::default()
    }
}

pub fn capabilities(encoding: PositionEncoding) -> ServerCapabilities {
    let triggers = ('a'..='z')
        .chain('A'..='Z')
        .chain('0'..='9')
        .chain(['_'])
        .map(String::from)
        .collect();
    ServerCapabilities {
        position_encoding: Some(match encoding {
            PositionEncoding::Utf16 => PositionEncodingKind::UTF16,
            PositionEncoding::Utf8 => PositionEncodingKind::UTF8,
        }),
        text_document_sync: Some(TextDocumentSyncCapability::Options(TextDocumentSyncOptions {
            open_close: Some(true),
            change: Some(TextDocumentSyncKind::FULL),
            save: Some(TextDocumentSyncSaveOptions::SaveOptions(SaveOptions {
                include_text: Some(false),
            })),
            ..TextDocumentSyncOptions::default()
        })),
        completion_provider: Some(CompletionOptions {
            trigger_characters: Some(triggers),
            ..CompletionOptions::default()
        }),
        ..ServerCapabilities::default()
    }
}

impl Server {
    pub fn new() -> Self {
        Server {
            state: State::Uninitialized,
            encoding: PositionEncoding::Utf16,
            documents: DocumentStore::new(),
            outgoing: Vec::new(),
        }
    }

    pub fn documents(&self) -> &DocumentStore {
        &self.documents
    }

    /// Messages queued for the client since the last call.
    pub fn take_outgoing(&mut self) -> Vec<Value> {
        std::mem::take(&mut self.outgoing)
    }

    fn respond(&mut self, id: Value, result: Value) {
        self.outgoing
            .push(json!({ "jsonrpc": "2.0", "id": id, "result": result }));
    }

    fn fail(&mut self, id: Value, code: i64, message: &str) {
        self.outgoing.push(error_response(id, code, message));
    }

    /// Handles one raw frame body.
    pub fn handle_bytes(&mut self, body: &[u8]) -> Control {
        match serde_json::from_slice::<Value>(body) {
            Ok(message) => self.handle(message),
            Err(e) => {
                self.fail(Value::Null, codes::PARSE_ERROR, &format!("parse error: {e}"));
                Control::Continue
            }
        }
    }

    pub fn handle(&mut self, message: Value) -> Control {
        let id = message.get("id").cloned();
        let Some(method) = message.get("method").and_then(Value::as_str).map(str::to_string) else {
            // Responses to server-initiated requests are not expected.
            if let Some(id) = id {
                if message.get("result").is_none() && message.get("error").is_none() {
                    self.fail(id, codes::INVALID_REQUEST, "message has no method");
                }
            } else {
                self.fail(Value::Null, codes::INVALID_REQUEST, "message has no method");
            }
            return Control::Continue;
        };
        let params = message.get("params").cloned().unwrap_or(Value::Null);
        match id {
            Some(id) => {
                self.request(id, &method, params);
                Control::Continue
            }
            None => self.notification(&method, params),
        }
    }

    fn request(&mut self, id: Value, method: &str, params: Value) {
        match (self.state, method) {
            (State::Uninitialized, "initialize") => match serde_json::from_value::<InitializeParams>(params) {
                Ok(p) => {
                    let offered = p
                        .capabilities
                        .general
                        .and_then(|g| g.position_encodings)
                        .unwrap_or_default();
                    if offered.contains(&PositionEncodingKind::UTF8) && !offered.contains(&PositionEncodingKind::UTF16) {
                        self.encoding = PositionEncoding::Utf8;
                    }
                    let result = InitializeResult {
                        capabilities: capabilities(self.encoding),
                        server_info: Some(ServerInfo {
                            name: "coolio".into(),
                            version: Some(env!("CARGO_PKG_VERSION").into()),
                        }),
                    };
                    self.state = State::Running;
                    self.respond(id, serde_json::to_value(result).expect("serializable"));
                }
                Err(e) => self.fail(id, codes::INVALID_PARAMS, &format!("invalid initialize params: {e}")),
            },
            (State::Uninitialized, _) => self.fail(id, codes::SERVER_NOT_INITIALIZED, "server not initialized"),
            (_, "initialize") => self.fail(id, codes::INVALID_REQUEST, "server already initialized"),
            (State::ShuttingDown, _) => self.fail(id, codes::INVALID_REQUEST, "server is shutting down"),
            (State::Running, "shutdown") => {
                self.state = State::ShuttingDown;
                self.respond(id, Value::Null);
            }
            (State::Running, "textDocument/completion") => match serde_json::from_value::<CompletionParams>(params) {
                Ok(p) => {
                    let pos = p.text_document_position;
                    let items = match self.documents.get(&pos.text_document.uri) {
                        Some(doc) => complete(&doc.text, &doc.index, pos.position, self.encoding),
                        None => Vec::new(),
                    };
                    let response = CompletionResponse::Array(items);
                    self.respond(id, serde_json::to_value(response).expect("serializable"));
                }
                Err(e) => self.fail(id, codes::INVALID_PARAMS, &format!("invalid completion params: {e}")),
            },
            (State::Running, _) => self.fail(id, codes::METHOD_NOT_FOUND, &format!("method not found: {method}")),
        }
    }

    fn notification(&mut self, method: &str, params: Value) -> Control {
        if method == "exit" {
            return Control::Exit(if self.state == State::ShuttingDown { 0 } else { 1 });
        }
        if self.state != State::Running {
            return Control::Continue;
        }
        match method {
            "textDocument/didOpen" => {
                if let Ok(p) = serde_json::from_value::<DidOpenTextDocumentParams>(params) {
                    let doc = p.text_document;
                    self.documents.open(doc.uri.clone(), doc.text, doc.version);
                    self.publish(&doc.uri);
                }
            }
            "textDocument/didChange" => {
                if let Ok(p) = serde_json::from_value::<DidChangeTextDocumentParams>(params) {
                    // Full sync: the last change carries the whole text.
                    if let Some(change) = p.content_changes.into_iter().last() {
                        self.documents
                            .change(&p.text_document.uri, change.text, p.text_document.version);
                    }
                }
            }
            "textDocument/didSave" => {
                if let Ok(p) = serde_json::from_value::<DidSaveTextDocumentParams>(params) {
                    self.publish(&p.text_document.uri);
                }
            }
            "textDocument/didClose" => {
                if let Ok(p) = serde_json::from_value::<DidCloseTextDocumentParams>(params) {
                    self.documents.close(&p.text_document.uri);
                }
            }
            _ => {}
        }
        Control::Continue
    }

    /// Analyzes the stored text of `uri` and queues its diagnostics.
    fn publish(&mut self, uri: &Url) {
        let Some(doc) = self.documents.get(uri) else {
            return;
        };
        let analysis = analyze(&doc.text, Stage::Typecheck);
        let diagnostics = analysis
            .diagnostics
            .iter()
            .map(|d| to_lsp_diagnostic(d, &doc.index, self.encoding))
            .collect();
        let params = PublishDiagnosticsParams {
            uri: uri.clone(),
            diagnostics,
            version: Some(doc.version),
        };
        self.outgoing.push(json!({
            "jsonrpc": "2.0",
            "method": "textDocument/publishDiagnostics",
            "params": serde_json::to_value(params).expect("serializable"),
        }));
    }
}

/// Runs the server until `exit` or end of input. Returns the process exit
/// status: 0 only for `exit` after `shutdown`.
pub fn serve<R: BufRead, W: Write>(mut input: R, mut output: W) -> i32 {
    let mut server = Server::new();
    loop {
        let control = match read_frame(&mut input) {
            Ok(Some(body)) => server.handle_bytes(&body),
            Ok(None) => Control::Exit(1),
            Err(FrameError::BadHeader(h)) => {
                eprintln!("coolio lsp: bad frame header: {h}");
                Control::Continue
            }
            Err(e) => {
                eprintln!("coolio lsp: {e}");
                Control::Exit(1)
            }
        };
        for message in server.take_outgoing() {
            if write_message(&mut output, &message).is_err() {
                return 1;
            }
        }
        if let Control::Exit(code) = control {
            return code;
        }
    }
}
