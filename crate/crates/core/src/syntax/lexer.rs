use super::ast::SourceSpan;
use super::{ParseError, ParseErrorKind};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Token {
    Ident(String),
    Num(u64),
    // keywords
    Interface,
    Attribute,
    Event,
    Action,
    Entity,
    Rules,
    When,
    Trigger,
    End,
    From,
    With,
    Value,
    Changed,
    On,
    And,
    Or,
    All,
    GroupBy,
    True,
    False,
    // punctuation
    LBrace,
    RBrace,
    LParen,
    RParen,
    Colon,
    Semi,
    Comma,
    Dot,
    Eq,
    ParBar,
    Eof,
}

impl Token {
    fn keyword(word: &str) -> Option<Token> {
        Some(match word {
            "interface" => Token::Interface,
            "attribute" => Token::Attribute,
            "event" => Token::Event,
            "action" => Token::Action,
            "entity" => Token::Entity,
            "rules" => Token::Rules,
            "when" => Token::When,
            "trigger" => Token::Trigger,
            "end" => Token::End,
            "from" => Token::From,
            "with" => Token::With,
            "value" => Token::Value,
            "changed" => Token::Changed,
            "on" => Token::On,
            "and" => Token::And,
            "or" => Token::Or,
            "all" => Token::All,
            "groupby" => Token::GroupBy,
            "true" => Token::True,
            "false" => Token::False,
            _ => return None,
        })
    }

    /// Human-readable form for error messages.
    pub fn describe(&self) -> String {
        match self {
            Token::Ident(name) => format!("identifier `{name}`"),
            Token::Num(n) => format!("number `{n}`"),
            Token::Eof => "end of input".to_string(),
            other => format!("`{}`", other.spelling()),
        }
    }

    fn spelling(&self) -> &'static str {
        match self {
            Token::Interface => "interface",
            Token::Attribute => "attribute",
            Token::Event => "event",
            Token::Action => "action",
            Token::Entity => "entity",
            Token::Rules => "rules",
            Token::When => "when",
            Token::Trigger => "trigger",
            Token::End => "end",
            Token::From => "from",
            Token::With => "with",
            Token::Value => "value",
            Token::Changed => "changed",
            Token::On => "on",
            Token::And => "and",
            Token::Or => "or",
            Token::All => "all",
            Token::GroupBy => "groupby",
            Token::True => "true",
            Token::False => "false",
            Token::LBrace => "{",
            Token::RBrace => "}",
            Token::LParen => "(",
            Token::RParen => ")",
            Token::Colon => ":",
            Token::Semi => ";",
            Token::Comma => ",",
            Token::Dot => ".",
            Token::Eq => "=",
            Token::ParBar => "||",
            Token::Ident(_) | Token::Num(_) | Token::Eof => "",
        }
    }
}

/// Reserved words cannot be used as identifiers.
pub fn is_keyword(word: &str) -> bool {
    Token::keyword(word).is_some()
}

#[derive(Clone, Debug)]
pub struct Spanned {
    pub token: Token,
    pub span: SourceSpan,
}

/// Splits `text` into tokens. Lexical errors are collected and the offending
/// characters skipped, so the parser still sees the rest of the input.
/// The token list always ends with [`Token::Eof`].
pub fn tokenize(text: &str) -> (Vec<Spanned>, Vec<ParseError>) {
    let mut tokens = Vec::new();
    let mut errors = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    let mut line = 1u32;
    let mut col = 1u32;

    while i < chars.len() {
        let c = chars[i];
        let start = SourceSpan::new(line, col, 1);
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                    col += 1;
                }
            }
            c if c.is_ascii_alphabetic() => {
                let begin = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let word: String = chars[begin..i].iter().collect();
                let len = (i - begin) as u32;
                let token = Token::keyword(&word).unwrap_or(Token::Ident(word));
                tokens.push(Spanned { token, span: SourceSpan::new(line, col, len) });
                col += len;
            }
            c if c.is_ascii_digit() => {
                let begin = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let word: String = chars[begin..i].iter().collect();
                let len = (i - begin) as u32;
                let span = SourceSpan::new(line, col, len);
                col += len;
                match word.parse::<u64>() {
                    Ok(n) => tokens.push(Spanned { token: Token::Num(n), span }),
                    Err(_) => errors.push(ParseError::new(
                        ParseErrorKind::MalformedLiteral,
                        format!("malformed numeral `{word}`"),
                        span,
                    )),
                }
            }
            '|' if chars.get(i + 1) == Some(&'|') => {
                tokens.push(Spanned { token: Token::ParBar, span: SourceSpan::new(line, col, 2) });
                i += 2;
                col += 2;
            }
            _ => {
                let token = match c {
                    '{' => Some(Token::LBrace),
                    '}' => Some(Token::RBrace),
                    '(' => Some(Token::LParen),
                    ')' => Some(Token::RParen),
                    ':' => Some(Token::Colon),
                    ';' => Some(Token::Semi),
                    ',' => Some(Token::Comma),
                    '.' => Some(Token::Dot),
                    '=' => Some(Token::Eq),
                    _ => None,
                };
                match token {
                    Some(token) => tokens.push(Spanned { token, span: start }),
                    None => errors.push(ParseError::new(
                        ParseErrorKind::UnexpectedToken,
                        format!("unexpected character `{}`", c.escape_default()),
                        start,
                    )),
                }
                i += 1;
                col += 1;
            }
        }
    }
    tokens.push(Spanned { token: Token::Eof, span: SourceSpan::new(line, col, 0) });
    (tokens, errors)
}
