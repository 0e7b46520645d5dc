//! C# tokenizer.
//!
//! Produces the significant tokens of a source file. Whitespace, comments,
//! attribute sections and preprocessor directive lines are consumed as trivia.
//! Generic angle brackets are plain `<`/`>` operators; `>>` is never formed so
//! that nested type arguments close cleanly (shifts are reassembled by readers).

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// 1-based location of a token in a named source file.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SourcePosition {
    pub file: String,
    pub line: u32,
    pub column: u32,
}

impl SourcePosition {
    pub fn new(file: impl Into<String>, line: u32, column: u32) -> Self {
        Self {
            file: file.into(),
            line,
            column,
        }
    }
}

impl fmt::Display for SourcePosition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.column)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TokenKind {
    Keyword,
    Identifier,
    IntLiteral,
    RealLiteral,
    StringLiteral,
    CharLiteral,
    Punctuator,
    Operator,
}

impl TokenKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TokenKind::Keyword => "Keyword",
            TokenKind::Identifier => "Identifier",
            TokenKind::IntLiteral => "IntLiteral",
            TokenKind::RealLiteral => "RealLiteral",
            TokenKind::StringLiteral => "StringLiteral",
            TokenKind::CharLiteral => "CharLiteral",
            TokenKind::Punctuator => "Punctuator",
            TokenKind::Operator => "Operator",
        }
    }
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    pub pos: SourcePosition,
}

impl Token {
    pub fn is_punct(&self, p: &str) -> bool {
        self.kind == TokenKind::Punctuator && self.text == p
    }

    pub fn is_op(&self, op: &str) -> bool {
        self.kind == TokenKind::Operator && self.text == op
    }

    pub fn is_keyword(&self, kw: &str) -> bool {
        self.kind == TokenKind::Keyword && self.text == kw
    }

    pub fn is_ident(&self) -> bool {
        self.kind == TokenKind::Identifier
    }

    /// True for an identifier with exactly this spelling (contextual keywords
    /// such as `get` or `partial` are identifiers).
    pub fn is_ident_named(&self, name: &str) -> bool {
        self.kind == TokenKind::Identifier && self.text == name
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LexError {
    #[error("{0}: unterminated string or character literal")]
    UnterminatedString(SourcePosition),
    #[error("{0}: unterminated block comment")]
    UnterminatedComment(SourcePosition),
    #[error("{pos}: illegal character {ch:?}")]
    IllegalCharacter { pos: SourcePosition, ch: char },
}

impl LexError {
    pub fn position(&self) -> &SourcePosition {
        match self {
            LexError::UnterminatedString(p) | LexError::UnterminatedComment(p) => p,
            LexError::IllegalCharacter { pos, .. } => pos,
        }
    }
}

/// C# 1.0 reserved words. Contextual words (`partial`, `where`, `get`, `set`,
/// `add`, `remove`, `value`, ...) are lexed as identifiers.
pub const KEYWORDS: &[&str] = &[
    "abstract", "as", "base", "bool", "break", "byte", "case", "catch", "char", "checked",
    "class", "const", "continue", "decimal", "default", "delegate", "do", "double", "else",
    "enum", "event", "explicit", "extern", "false", "finally", "fixed", "float", "for",
    "foreach", "goto", "if", "implicit", "in", "int", "interface", "internal", "is", "lock",
    "long", "namespace", "new", "null", "object", "operator", "out", "override", "params",
    "private", "protected", "public", "readonly", "ref", "return", "sbyte", "sealed", "short",
    "sizeof", "stackalloc", "static", "string", "struct", "switch", "this", "throw", "true",
    "try", "typeof", "uint", "ulong", "unchecked", "unsafe", "ushort", "using", "virtual",
    "void", "volatile", "while",
];

pub fn is_keyword(word: &str) -> bool {
    KEYWORDS.binary_search(&word).is_ok()
}

const PUNCTUATORS: &[char] = &['{', '}', '[', ']', '(', ')', '.', ',', ':', ';'];

// Longest match first within each leading character.
const OPERATORS: &[&str] = &[
    "<<=", "->", "++", "--", "&&", "||", "<<", "==", "!=", "<=", ">=", "+=", "-=", "*=", "/=",
    "%=", "&=", "|=", "^=", "+", "-", "*", "/", "%", "&", "|", "^", "!", "~", "=", "<", ">",
    "?",
];

/// Tokenize one C# source file.
pub fn tokenize(source: &str, file: &str) -> Result<Vec<Token>, LexError> {
    Lexer::new(source, file).run()
}

struct Lexer<'a> {
    src: &'a str,
    file: &'a str,
    offset: usize,
    line: u32,
    column: u32,
    at_line_start: bool,
    tokens: Vec<Token>,
    // Depth of `[` inside the attribute section currently being discarded.
    attribute_depth: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str, file: &'a str) -> Self {
        Self {
            src,
            file,
            offset: 0,
            line: 1,
            column: 1,
            at_line_start: true,
            tokens: Vec::new(),
            attribute_depth: 0,
        }
    }

    fn pos(&self) -> SourcePosition {
        SourcePosition::new(self.file, self.line, self.column)
    }

    fn rest(&self) -> &'a str {
        &self.src[self.offset..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.rest().chars().nth(n)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.offset += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
            self.at_line_start = true;
        } else {
            self.column += 1;
            if !c.is_whitespace() {
                self.at_line_start = false;
            }
        }
        Some(c)
    }

    fn run(mut self) -> Result<Vec<Token>, LexError> {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
                continue;
            }
            if c == '#' && self.at_line_start {
                while let Some(c) = self.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
                continue;
            }
            if c == '/' && self.peek_at(1) == Some('/') {
                while let Some(c) = self.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
                continue;
            }
            if c == '/' && self.peek_at(1) == Some('*') {
                self.block_comment()?;
                continue;
            }
            let start = self.offset;
            let pos = self.pos();
            let kind = self.scan_token(c, &pos)?;
            let text = &self.src[start..self.offset];
            self.push(kind, text, pos);
        }
        Ok(self.tokens)
    }

    fn push(&mut self, kind: TokenKind, text: &str, pos: SourcePosition) {
        if self.attribute_depth > 0 {
            if kind == TokenKind::Punctuator {
                match text {
                    "[" => self.attribute_depth += 1,
                    "]" => self.attribute_depth -= 1,
                    _ => {}
                }
            }
            return;
        }
        if kind == TokenKind::Punctuator && text == "[" && self.opens_attribute() {
            self.attribute_depth = 1;
            return;
        }
        self.tokens.push(Token {
            kind,
            text: text.to_string(),
            pos,
        });
    }

    /// A `[` opens an attribute section when it sits where a declaration or
    /// parameter may start. Only emitted tokens are consulted, so re-lexing a
    /// space-joined token stream reaches the same decision.
    fn opens_attribute(&self) -> bool {
        match self.tokens.last() {
            None => true,
            Some(t) => {
                t.kind == TokenKind::Punctuator && matches!(t.text.as_str(), "{" | "}" | ";" | "(" | ",")
            }
        }
    }

    fn block_comment(&mut self) -> Result<(), LexError> {
        let pos = self.pos();
        self.bump();
        self.bump();
        loop {
            match self.bump() {
                None => return Err(LexError::UnterminatedComment(pos)),
                Some('*') if self.peek() == Some('/') => {
                    self.bump();
                    return Ok(());
                }
                Some(_) => {}
            }
        }
    }

    fn scan_token(&mut self, c: char, pos: &SourcePosition) -> Result<TokenKind, LexError> {
        if c == '@' {
            return match self.peek_at(1) {
                Some('"') => {
                    self.bump();
                    self.verbatim_string(pos)
                }
                Some(n) if is_ident_start(n) => {
                    self.bump();
                    self.identifier_tail();
                    Ok(TokenKind::Identifier)
                }
                _ => Err(LexError::IllegalCharacter { pos: pos.clone(), ch: c }),
            };
        }
        if is_ident_start(c) {
            let start = self.offset;
            self.identifier_tail();
            let word = &self.src[start..self.offset];
            return Ok(if is_keyword(word) {
                TokenKind::Keyword
            } else {
                TokenKind::Identifier
            });
        }
        if c.is_ascii_digit() || (c == '.' && self.peek_at(1).is_some_and(|d| d.is_ascii_digit())) {
            return Ok(self.number());
        }
        if c == '"' {
            return self.quoted('"', pos).map(|_| TokenKind::StringLiteral);
        }
        if c == '\'' {
            return self.quoted('\'', pos).map(|_| TokenKind::CharLiteral);
        }
        if PUNCTUATORS.contains(&c) {
            self.bump();
            return Ok(TokenKind::Punctuator);
        }
        let rest = self.rest();
        if let Some(op) = OPERATORS.iter().find(|op| rest.starts_with(**op)) {
            for _ in 0..op.chars().count() {
                self.bump();
            }
            return Ok(TokenKind::Operator);
        }
        Err(LexError::IllegalCharacter { pos: pos.clone(), ch: c })
    }

    fn identifier_tail(&mut self) {
        self.bump();
        while self.peek().is_some_and(is_ident_part) {
            self.bump();
        }
    }

    fn number(&mut self) -> TokenKind {
        if self.peek() == Some('0') && matches!(self.peek_at(1), Some('x' | 'X')) {
            self.bump();
            self.bump();
            while self.peek().is_some_and(|c| c.is_ascii_hexdigit()) {
                self.bump();
            }
            self.int_suffix();
            return TokenKind::IntLiteral;
        }
        let mut real = false;
        self.digits();
        if self.peek() == Some('.') && self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
            real = true;
            self.bump();
            self.digits();
        }
        if matches!(self.peek(), Some('e' | 'E')) {
            let sign = matches!(self.peek_at(1), Some('+' | '-'));
            let digit_at = if sign { 2 } else { 1 };
            if self.peek_at(digit_at).is_some_and(|c| c.is_ascii_digit()) {
                real = true;
                for _ in 0..digit_at {
                    self.bump();
                }
                self.digits();
            }
        }
        if matches!(self.peek(), Some('f' | 'F' | 'd' | 'D' | 'm' | 'M')) {
            self.bump();
            return TokenKind::RealLiteral;
        }
        if real {
            return TokenKind::RealLiteral;
        }
        self.int_suffix();
        TokenKind::IntLiteral
    }

    fn digits(&mut self) {
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
        }
    }

    fn int_suffix(&mut self) {
        // U, L, UL, LU in any case
        let mut seen = 0;
        while seen < 2 && matches!(self.peek(), Some('u' | 'U' | 'l' | 'L')) {
            self.bump();
            seen += 1;
        }
    }

    fn quoted(&mut self, quote: char, pos: &SourcePosition) -> Result<(), LexError> {
        self.bump();
        loop {
            match self.peek() {
                None | Some('\n') | Some('\r') => return Err(LexError::UnterminatedString(pos.clone())),
                Some('\\') => {
                    self.bump();
                    match self.peek() {
                        None | Some('\n') | Some('\r') => {
                            return Err(LexError::UnterminatedString(pos.clone()))
                        }
                        Some(_) => {
                            self.bump();
                        }
                    }
                }
                Some(c) if c == quote => {
                    self.bump();
                    return Ok(());
                }
                Some(_) => {
                    self.bump();
                }
            }
        }
    }

    fn verbatim_string(&mut self, pos: &SourcePosition) -> Result<TokenKind, LexError> {
        self.bump();
        loop {
            match self.bump() {
                None => return Err(LexError::UnterminatedString(pos.clone())),
                Some('"') => {
                    if self.peek() == Some('"') {
                        self.bump();
                    } else {
                        return Ok(TokenKind::StringLiteral);
                    }
                }
                Some(_) => {}
            }
        }
    }
}

fn is_ident_start(c: char) -> bool {
    c == '_' || c.is_alphabetic()
}

fn is_ident_part(c: char) -> bool {
    c == '_' || c.is_alphanumeric()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds_and_texts(src: &str) -> Vec<(TokenKind, String)> {
        tokenize(src, "t.cs")
            .unwrap()
            .into_iter()
            .map(|t| (t.kind, t.text))
            .collect()
    }

    #[test]
    fn keyword_table_is_sorted() {
        let mut sorted = KEYWORDS.to_vec();
        sorted.sort_unstable();
        assert_eq!(sorted, KEYWORDS);
        assert_eq!(KEYWORDS.len(), 77);
    }

    #[test]
    fn empty_input() {
        assert!(tokenize("", "t.cs").unwrap().is_empty());
    }

    #[test]
    fn contextual_words_are_identifiers() {
        for w in ["partial", "where", "get", "set", "add", "remove", "value", "yield"] {
            assert_eq!(kinds_and_texts(w), vec![(TokenKind::Identifier, w.to_string())]);
        }
    }

    #[test]
    fn positions_are_one_based() {
        let toks = tokenize("class A\n  {\n}", "x.cs").unwrap();
        let pos: Vec<_> = toks.iter().map(|t| (t.pos.line, t.pos.column)).collect();
        assert_eq!(pos, vec![(1, 1), (1, 7), (2, 3), (3, 1)]);
        assert!(toks.iter().all(|t| t.pos.file == "x.cs"));
    }

    #[test]
    fn comments_and_directives_are_trivia() {
        let src = "#region Fields\n/* a\n b */ int x; // tail\n   #endregion\n";
        assert_eq!(
            kinds_and_texts(src),
            vec![
                (TokenKind::Keyword, "int".into()),
                (TokenKind::Identifier, "x".into()),
                (TokenKind::Punctuator, ";".into()),
            ]
        );
    }

    #[test]
    fn hash_inside_line_is_illegal() {
        let err = tokenize("int x; #if", "t.cs").unwrap_err();
        assert_eq!(
            err,
            LexError::IllegalCharacter {
                pos: SourcePosition::new("t.cs", 1, 8),
                ch: '#'
            }
        );
    }

    #[test]
    fn attributes_are_trivia_but_indexers_are_not() {
        let src = "[Serializable, Foo(new int[] { 1 })] class C { void M([In] int a) { x[0][1] = a; } }";
        let texts: Vec<String> = kinds_and_texts(src).into_iter().map(|(_, t)| t).collect();
        let joined = texts.join(" ");
        assert_eq!(
            joined,
            "class C { void M ( int a ) { x [ 0 ] [ 1 ] = a ; } }"
        );
    }

    #[test]
    fn strings_keep_quotes() {
        let toks = kinds_and_texts(r#"s = "a\"b" + @"c""d" + 'x' + '\'';"#);
        assert_eq!(toks[2], (TokenKind::StringLiteral, r#""a\"b""#.to_string()));
        assert_eq!(toks[4], (TokenKind::StringLiteral, r#"@"c""d""#.to_string()));
        assert_eq!(toks[6], (TokenKind::CharLiteral, "'x'".to_string()));
        assert_eq!(toks[8], (TokenKind::CharLiteral, r"'\''".to_string()));
    }

    #[test]
    fn verbatim_string_may_span_lines() {
        let toks = tokenize("a = @\"x\ny\"; b", "t.cs").unwrap();
        assert_eq!(toks[2].text, "@\"x\ny\"");
        assert_eq!(toks[4].pos.line, 2);
    }

    #[test]
    fn numbers() {
        let toks = kinds_and_texts("1 0x1F 10UL 1.5 2e10 3.0f 7m 1.ToString");
        let kinds: Vec<TokenKind> = toks.iter().map(|t| t.0).collect();
        use TokenKind::*;
        assert_eq!(
            kinds,
            vec![IntLiteral, IntLiteral, IntLiteral, RealLiteral, RealLiteral, RealLiteral, RealLiteral, IntLiteral, Punctuator, Identifier]
        );
    }

    #[test]
    fn generic_close_is_never_a_shift() {
        let texts: Vec<String> = kinds_and_texts("List<List<int>> x; a >>= 1; b <<= 2;")
            .into_iter()
            .map(|t| t.1)
            .collect();
        assert_eq!(
            texts,
            vec!["List", "<", "List", "<", "int", ">", ">", "x", ";", "a", ">", ">=", "1", ";", "b", "<<=", "2", ";"]
        );
    }

    #[test]
    fn verbatim_identifier() {
        assert_eq!(kinds_and_texts("@class"), vec![(TokenKind::Identifier, "@class".into())]);
    }

    #[test]
    fn lexer_errors_carry_positions() {
        assert_eq!(
            tokenize("x = \"abc\n", "f.cs").unwrap_err(),
            LexError::UnterminatedString(SourcePosition::new("f.cs", 1, 5))
        );
        assert_eq!(
            tokenize("a /* never", "f.cs").unwrap_err(),
            LexError::UnterminatedComment(SourcePosition::new("f.cs", 1, 3))
        );
        assert_eq!(
            tokenize("a $ b", "f.cs").unwrap_err(),
            LexError::IllegalCharacter {
                pos: SourcePosition::new("f.cs", 1, 3),
                ch: '$'
            }
        );
        assert!(matches!(tokenize("@\"open", "f.cs"), Err(LexError::UnterminatedString(_))));
    }
}
