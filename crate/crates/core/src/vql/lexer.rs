use super::error::VqlError;

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Word(String),
    Number(f64),
    Str(String),
    Comma,
    Dot,
    LParen,
    RParen,
    Star,
    Op(&'static str),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    /// Byte offset of the first character.
    pub pos: usize,
}

impl Token {
    pub fn describe(&self) -> String {
        match &self.kind {
            TokenKind::Word(w) => w.clone(),
            TokenKind::Number(n) => n.to_string(),
            TokenKind::Str(s) => format!("'{}'", s),
            TokenKind::Comma => ",".into(),
            TokenKind::Dot => ".".into(),
            TokenKind::LParen => "(".into(),
            TokenKind::RParen => ")".into(),
            TokenKind::Star => "*".into(),
            TokenKind::Op(o) => (*o).into(),
        }
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

pub fn tokenize(text: &str) -> Result<Vec<Token>, VqlError> {
    let mut tokens = Vec::new();
    let mut chars = text.char_indices().peekable();

    while let Some(&(pos, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        let kind = if is_ident_start(c) {
            let mut end = pos;
            while let Some(&(i, ch)) = chars.peek() {
                if !is_ident_char(ch) {
                    break;
                }
                end = i + ch.len_utf8();
                chars.next();
            }
            TokenKind::Word(text[pos..end].to_string())
        } else if c.is_ascii_digit() || (c == '-' && next_is_digit(text, pos + 1)) {
            chars.next();
            let mut end = pos + 1;
            let mut seen_dot = false;
            let mut seen_exp = false;
            while let Some(&(i, ch)) = chars.peek() {
                let accept = if ch.is_ascii_digit() {
                    true
                } else if ch == '.' && !seen_dot && !seen_exp && next_is_digit(text, i + 1) {
                    seen_dot = true;
                    true
                } else if (ch == 'e' || ch == 'E') && !seen_exp && exponent_follows(text, i + 1) {
                    seen_exp = true;
                    true
                } else {
                    (ch == '+' || ch == '-') && seen_exp && text[..i].ends_with(['e', 'E'])
                };
                if !accept {
                    break;
                }
                end = i + 1;
                chars.next();
            }
            let lexeme = &text[pos..end];
            let value: f64 = lexeme.parse().map_err(|_| VqlError::Syntax {
                position: pos,
                expected: vec!["number".into()],
                found: lexeme.to_string(),
            })?;
            if !value.is_finite() {
                return Err(VqlError::Syntax {
                    position: pos,
                    expected: vec!["finite number".into()],
                    found: lexeme.to_string(),
                });
            }
            TokenKind::Number(value)
        } else if c == '\'' {
            chars.next();
            let mut value = String::new();
            let mut closed = false;
            while let Some((_, ch)) = chars.next() {
                if ch == '\'' {
                    if matches!(chars.peek(), Some(&(_, '\''))) {
                        chars.next();
                        value.push('\'');
                    } else {
                        closed = true;
                        break;
                    }
                } else {
                    value.push(ch);
                }
            }
            if !closed {
                return Err(VqlError::Syntax {
                    position: pos,
                    expected: vec!["closing quote".into()],
                    found: "end of input".into(),
                });
            }
            TokenKind::Str(value)
        } else {
            chars.next();
            match c {
                ',' => TokenKind::Comma,
                '.' => TokenKind::Dot,
                '(' => TokenKind::LParen,
                ')' => TokenKind::RParen,
                '*' => TokenKind::Star,
                '=' => TokenKind::Op("="),
                '!' if matches!(chars.peek(), Some(&(_, '='))) => {
                    chars.next();
                    TokenKind::Op("!=")
                }
                '<' => match chars.peek() {
                    Some(&(_, '=')) => {
                        chars.next();
                        TokenKind::Op("<=")
                    }
                    Some(&(_, '>')) => {
                        chars.next();
                        TokenKind::Op("!=")
                    }
                    _ => TokenKind::Op("<"),
                },
                '>' => match chars.peek() {
                    Some(&(_, '=')) => {
                        chars.next();
                        TokenKind::Op(">=")
                    }
                    _ => TokenKind::Op(">"),
                },
                other => {
                    return Err(VqlError::Syntax {
                        position: pos,
                        expected: vec!["token".into()],
                        found: other.to_string(),
                    })
                }
            }
        };
        tokens.push(Token { kind, pos });
    }
    Ok(tokens)
}

fn next_is_digit(text: &str, at: usize) -> bool {
    text.as_bytes().get(at).is_some_and(|b| b.is_ascii_digit())
}

fn exponent_follows(text: &str, at: usize) -> bool {
    let bytes = text.as_bytes();
    match bytes.get(at) {
        Some(b) if b.is_ascii_digit() => true,
        Some(b'+') | Some(b'-') => bytes.get(at + 1).is_some_and(|b| b.is_ascii_digit()),
        _ => false,
    }
}
