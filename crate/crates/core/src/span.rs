//! Source positions and spans.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::Serialize;

/// A point in a source text. `line` and `column` are 1-based; `offset` is a
/// byte offset into the text the position was computed from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize)]
pub struct Position {
    pub offset: usize,
    pub line: u32,
    pub column: u32,
}

/// Half-open byte range `[start.offset, end.offset)` with line/column endpoints.
///
/// The file is not stored here; it belongs to the owning
/// [`CompilationUnit`](crate::java::CompilationUnit). Use [`Span::located`] to
/// attach it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
pub struct Span {
    pub start: Position,
    pub end: Position,
}

impl Span {
    pub fn new(start: Position, end: Position) -> Self {
        debug_assert!(start.offset <= end.offset);
        Span { start, end }
    }

    /// Smallest span covering both.
    pub fn to(self, other: Span) -> Span {
        let start = if other.start.offset < self.start.offset { other.start } else { self.start };
        let end = if other.end.offset > self.end.offset { other.end } else { self.end };
        Span { start, end }
    }

    pub fn contains(&self, other: &Span) -> bool {
        self.start.offset <= other.start.offset && other.end.offset <= self.end.offset
    }

    /// Contains `other` and is not equal to it.
    pub fn strictly_contains(&self, other: &Span) -> bool {
        self.contains(other) && self != other
    }

    pub fn is_disjoint(&self, other: &Span) -> bool {
        self.end.offset <= other.start.offset || other.end.offset <= self.start.offset
    }

    /// Number of physical lines the span touches.
    pub fn line_count(&self) -> u32 {
        self.end.line.saturating_sub(self.start.line) + 1
    }

    pub fn slice<'t>(&self, text: &'t str) -> &'t str {
        text.get(self.start.offset..self.end.offset).unwrap_or("")
    }

    pub fn located(&self, file: &Path) -> SourceSpan {
        SourceSpan {
            start: SourcePosition { file: file.to_path_buf(), line: self.start.line, column: self.start.column },
            end: SourcePosition { file: file.to_path_buf(), line: self.end.line, column: self.end.column },
        }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}-{}:{}", self.start.line, self.start.column, self.end.line, self.end.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SourcePosition {
    pub file: PathBuf,
    pub line: u32,
    pub column: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SourceSpan {
    pub start: SourcePosition,
    pub end: SourcePosition,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start.file.display(), self.start.line, self.start.column)
    }
}

/// Maps byte offsets to 1-based line/column pairs.
#[derive(Debug, Clone)]
pub struct LineIndex {
    line_starts: Vec<usize>,
}

impl LineIndex {
    pub fn new(text: &str) -> Self {
        let mut line_starts = vec![0];
        for (i, b) in text.bytes().enumerate() {
            if b == b'\n' {
                line_starts.push(i + 1);
            }
        }
        LineIndex { line_starts }
    }

    /// Columns count characters, not bytes.
    pub fn position(&self, text: &str, offset: usize) -> Position {
        let line_idx = match self.line_starts.binary_search(&offset) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let line_start = self.line_starts[line_idx];
        let column = text.get(line_start..offset).map(|s| s.chars().count()).unwrap_or(offset - line_start);
        Position { offset, line: line_idx as u32 + 1, column: column as u32 + 1 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positions_are_one_based() {
        let text = "ab\ncd\n";
        let idx = LineIndex::new(text);
        assert_eq!(idx.position(text, 0), Position { offset: 0, line: 1, column: 1 });
        assert_eq!(idx.position(text, 4), Position { offset: 4, line: 2, column: 2 });
        assert_eq!(idx.position(text, 6), Position { offset: 6, line: 3, column: 1 });
    }

    #[test]
    fn containment() {
        let idx = LineIndex::new("0123456789");
        let t = "0123456789";
        let outer = Span::new(idx.position(t, 1), idx.position(t, 8));
        let inner = Span::new(idx.position(t, 2), idx.position(t, 5));
        assert!(outer.strictly_contains(&inner));
        assert!(!inner.contains(&outer));
        assert!(outer.contains(&outer));
        assert!(!outer.strictly_contains(&outer));
    }
}
