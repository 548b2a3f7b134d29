use std::fmt;

use crate::syntax::{ParseError, ParseErrorKind, SourceSpan};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Warning,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Warning => "warning",
            Severity::Error => "error",
        })
    }
}

/// Stable machine-readable diagnostic codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DiagnosticCode {
    UnexpectedToken,
    UnterminatedBlock,
    MalformedLiteral,
    UnknownInterface,
    DuplicateInterface,
    DuplicateEntity,
    DuplicateMember,
    NameClash,
    DuplicateInit,
    TypeMismatch,
    UnknownAttribute,
    UninitializedAttribute,
    UnknownEvent,
    UnknownAction,
    UnknownMember,
    UnknownVariable,
    UnknownEntity,
    VariableRedeclared,
    UnsupportedConstruct,
}

impl DiagnosticCode {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagnosticCode::UnexpectedToken => "UnexpectedToken",
            DiagnosticCode::UnterminatedBlock => "UnterminatedBlock",
            DiagnosticCode::MalformedLiteral => "MalformedLiteral",
            DiagnosticCode::UnknownInterface => "UnknownInterface",
            DiagnosticCode::DuplicateInterface => "DuplicateInterface",
            DiagnosticCode::DuplicateEntity => "DuplicateEntity",
            DiagnosticCode::DuplicateMember => "DuplicateMember",
            DiagnosticCode::NameClash => "NameClash",
            DiagnosticCode::DuplicateInit => "DuplicateInit",
            DiagnosticCode::TypeMismatch => "TypeMismatch",
            DiagnosticCode::UnknownAttribute => "UnknownAttribute",
            DiagnosticCode::UninitializedAttribute => "UninitializedAttribute",
            DiagnosticCode::UnknownEvent => "UnknownEvent",
            DiagnosticCode::UnknownAction => "UnknownAction",
            DiagnosticCode::UnknownMember => "UnknownMember",
            DiagnosticCode::UnknownVariable => "UnknownVariable",
            DiagnosticCode::UnknownEntity => "UnknownEntity",
            DiagnosticCode::VariableRedeclared => "VariableRedeclared",
            DiagnosticCode::UnsupportedConstruct => "UnsupportedConstruct",
        }
    }
}

impl fmt::Display for DiagnosticCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: DiagnosticCode,
    pub message: String,
    pub span: SourceSpan,
    /// Entity or interface the diagnostic is about, when there is one.
    pub context: Option<String>,
}

impl Diagnostic {
    pub fn error(code: DiagnosticCode, message: impl Into<String>, span: SourceSpan) -> Self {
        Self { severity: Severity::Error, code, message: message.into(), span, context: None }
    }

    pub fn warning(code: DiagnosticCode, message: impl Into<String>, span: SourceSpan) -> Self {
        Self { severity: Severity::Warning, code, message: message.into(), span, context: None }
    }

    pub fn in_context(mut self, context: impl Into<String>) -> Self {
        self.context = Some(context.into());
        self
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}: {}", self.severity, self.code, self.message)
    }
}

impl From<ParseError> for Diagnostic {
    fn from(e: ParseError) -> Self {
        let code = match e.kind {
            ParseErrorKind::UnexpectedToken => DiagnosticCode::UnexpectedToken,
            ParseErrorKind::UnterminatedBlock => DiagnosticCode::UnterminatedBlock,
            ParseErrorKind::MalformedLiteral => DiagnosticCode::MalformedLiteral,
        };
        Diagnostic::error(code, e.message, e.span)
    }
}

/// Orders diagnostics by source position, keeping the original order for ties.
pub fn sort_by_position(diagnostics: &mut [Diagnostic]) {
    diagnostics.sort_by_key(|d| (d.span.line, d.span.column));
}
