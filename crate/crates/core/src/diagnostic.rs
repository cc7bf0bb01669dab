use std::fmt;

use crate::syntax::Site;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    Error,
    Warning,
    Info,
}

impl Severity {
    pub fn as_str(self) -> &'static str {
        match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
            Severity::Info => "info",
        }
    }
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.as_str().to_ascii_uppercase())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Diagnostic {
    pub code: &'static str,
    pub severity: Severity,
    pub site: Site,
    pub message: String,
}

impl Diagnostic {
    pub fn new(code: &'static str, severity: Severity, site: Site, message: impl Into<String>) -> Self {
        Diagnostic {
            code,
            severity,
            site,
            message: message.into(),
        }
    }

    pub fn error(code: &'static str, site: Site, message: impl Into<String>) -> Self {
        Self::new(code, Severity::Error, site, message)
    }

    pub fn warning(code: &'static str, site: Site, message: impl Into<String>) -> Self {
        Self::new(code, Severity::Warning, site, message)
    }

    pub fn info(code: &'static str, site: Site, message: impl Into<String>) -> Self {
        Self::new(code, Severity::Info, site, message)
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    /// `(diagnostic (severity error) (code X) ...)` with the message quoted.
    pub fn to_sexp(&self) -> String {
        let escaped = self.message.replace('\\', "\\\\").replace('"', "\\\"");
        format!(
            "(diagnostic (severity {}) (code {}) (file \"{}\") (line {}) (column {}) (namespace {}) (message \"{}\"))",
            self.severity.as_str(),
            self.code,
            self.site.file.replace('"', "\\\""),
            self.site.line,
            self.site.column,
            if self.site.namespace.is_empty() { "-" } else { &self.site.namespace },
            escaped
        )
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {} [{}] {}",
            self.severity, self.code, self.site, self.site.namespace, self.message
        )
    }
}

/// Sorts by (file, line, column, code) and drops exact duplicates.
pub fn sort_diagnostics(diags: &mut Vec<Diagnostic>) {
    diags.sort_by(|a, b| {
        (&a.site.file, a.site.line, a.site.column, a.code, &a.message)
            .cmp(&(&b.site.file, b.site.line, b.site.column, b.code, &b.message))
    });
    diags.dedup();
}
