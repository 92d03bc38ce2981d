//! Java tokenizer. Comments and whitespace are dropped; string, char and
//! text-block literals become single tokens so keywords inside them are never
//! seen by the parser.
//!
//! `>` is always emitted as a single-character token. The parser glues
//! adjacent `>` / `=` tokens back into `>=`, `>>`, `>>>`, `>>=` when it is
//! parsing an expression, which keeps nested generic closers (`>>`) trivial.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Ident,
    Number,
    Str,
    Char,
    Punct,
    Eof,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexDiagnostic {
    pub start: usize,
    pub end: usize,
    pub message: String,
}

const PUNCT: &[&str] = &[
    "<<=", "...", "->", "::", "==", "!=", "<=", "&&", "||", "++", "--", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<", "(", ")",
    "{", "}", "[", "]", ";", ",", ".", "@", "=", ">", "<", "!", "~", "?", ":", "+", "-", "*", "/", "&", "|", "^", "%",
];

pub struct Lexed {
    pub tokens: Vec<Token>,
    pub diagnostics: Vec<LexDiagnostic>,
}

pub fn tokenize(text: &str) -> Lexed {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut diagnostics = Vec::new();
    let mut i = 0;

    while i < bytes.len() {
        let b = bytes[i];
        if b.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if b == b'/' && bytes.get(i + 1) == Some(&b'/') {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        if b == b'/' && bytes.get(i + 1) == Some(&b'*') {
            let start = i;
            i += 2;
            loop {
                if i + 1 >= bytes.len() {
                    i = bytes.len();
                    diagnostics.push(LexDiagnostic { start, end: i, message: "unterminated block comment".into() });
                    break;
                }
                if bytes[i] == b'*' && bytes[i + 1] == b'/' {
                    i += 2;
                    break;
                }
                i += 1;
            }
            continue;
        }
        let start = i;
        if b == b'"' {
            if bytes.get(i + 1) == Some(&b'"') && bytes.get(i + 2) == Some(&b'"') {
                i = lex_text_block(bytes, i, &mut diagnostics);
            } else {
                i = lex_quoted(bytes, i, b'"', &mut diagnostics);
            }
            tokens.push(Token { kind: TokenKind::Str, start, end: i });
            continue;
        }
        if b == b'\'' {
            i = lex_quoted(bytes, i, b'\'', &mut diagnostics);
            tokens.push(Token { kind: TokenKind::Char, start, end: i });
            continue;
        }
        if b.is_ascii_digit() || (b == b'.' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            i = lex_number(bytes, i);
            tokens.push(Token { kind: TokenKind::Number, start, end: i });
            continue;
        }
        // Identifiers may contain any Unicode letter.
        let ch = text[i..].chars().next().unwrap_or('\0');
        if ch == '_' || ch == '$' || ch.is_alphabetic() {
            i += ch.len_utf8();
            while let Some(c) = text[i..].chars().next() {
                if c == '_' || c == '$' || c.is_alphanumeric() {
                    i += c.len_utf8();
                } else {
                    break;
                }
            }
            tokens.push(Token { kind: TokenKind::Ident, start, end: i });
            continue;
        }
        if let Some(p) = PUNCT.iter().find(|p| bytes[i..].starts_with(p.as_bytes())) {
            i += p.len();
            tokens.push(Token { kind: TokenKind::Punct, start, end: i });
            continue;
        }
        i += ch.len_utf8().max(1);
        diagnostics.push(LexDiagnostic { start, end: i, message: format!("unexpected character {ch:?}") });
    }

    tokens.push(Token { kind: TokenKind::Eof, start: bytes.len(), end: bytes.len() });
    Lexed { tokens, diagnostics }
}

fn lex_quoted(bytes: &[u8], start: usize, quote: u8, diags: &mut Vec<LexDiagnostic>) -> usize {
    let mut i = start + 1;
    while i < bytes.len() {
        match bytes[i] {
            b'\\' => i += 2,
            b'\n' => break,
            c if c == quote => return i + 1,
            _ => i += 1,
        }
    }
    let end = i.min(bytes.len());
    diags.push(LexDiagnostic { start, end, message: "unterminated literal".into() });
    end
}

fn lex_text_block(bytes: &[u8], start: usize, diags: &mut Vec<LexDiagnostic>) -> usize {
    let mut i = start + 3;
    while i < bytes.len() {
        if bytes[i] == b'\\' {
            i += 2;
            continue;
        }
        if bytes[i..].starts_with(b"\"\"\"") {
            return i + 3;
        }
        i += 1;
    }
    diags.push(LexDiagnostic { start, end: bytes.len(), message: "unterminated text block".into() });
    bytes.len()
}

fn lex_number(bytes: &[u8], start: usize) -> usize {
    let mut i = start;
    let hex = bytes[i] == b'0' && matches!(bytes.get(i + 1), Some(b'x' | b'X'));
    if hex {
        i += 2;
    }
    while i < bytes.len() {
        let c = bytes[i];
        let exp = if hex { matches!(c, b'p' | b'P') } else { matches!(c, b'e' | b'E') };
        if exp && matches!(bytes.get(i + 1), Some(b'+' | b'-')) {
            i += 2;
        } else if c.is_ascii_alphanumeric() || c == b'_' {
            i += 1;
        } else if c == b'.' && bytes.get(i + 1).is_some_and(|n| n.is_ascii_digit() || !n.is_ascii_alphabetic()) {
            // `1.5`, `1.`; but not `1.toString` style member access.
            if bytes.get(i + 1) == Some(&b'.') {
                break;
            }
            i += 1;
        } else {
            break;
        }
    }
    i
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(src: &str) -> Vec<&str> {
        tokenize(src).tokens.iter().filter(|t| t.kind != TokenKind::Eof).map(|t| &src[t.start..t.end]).collect()
    }

    #[test]
    fn comments_and_strings_hide_keywords() {
        let src = "// if\n/* switch */ x = \"if (a)\"; c = 'i';";
        assert_eq!(texts(src), vec!["x", "=", "\"if (a)\"", ";", "c", "=", "'i'", ";"]);
    }

    #[test]
    fn generic_closers_are_split() {
        assert_eq!(texts("Map<String,List<X>>"), vec!["Map", "<", "String", ",", "List", "<", "X", ">", ">"]);
    }

    #[test]
    fn numbers() {
        assert_eq!(texts("0x1F 1_000L 1.5e-3f .5 a.b"), vec!["0x1F", "1_000L", "1.5e-3f", ".5", "a", ".", "b"]);
    }

    #[test]
    fn unterminated_things_report_diagnostics() {
        assert_eq!(tokenize("\"abc").diagnostics.len(), 1);
        assert_eq!(tokenize("/* abc").diagnostics.len(), 1);
        assert_eq!(tokenize("a # b").diagnostics.len(), 1);
    }

    #[test]
    fn text_block() {
        assert_eq!(texts("s = \"\"\"\n if \"\n\"\"\";"), vec!["s", "=", "\"\"\"\n if \"\n\"\"\"", ";"]);
    }
}
