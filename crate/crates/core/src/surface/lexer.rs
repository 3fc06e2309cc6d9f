use super::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Int(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Dot,
    Comma,
    Bang,
    And,
    Or,
    Arrow,
    Iff,
    Eq,
    Lt,
    Gt,
    Insert,
    MapsTo,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) | Tok::Int(s) => format!("`{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Bang => "`!`".into(),
            Tok::And => "`/\\`".into(),
            Tok::Or => "`\\/`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Iff => "`<->`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Lt => "`<`".into(),
            Tok::Gt => "`>`".into(),
            Tok::Insert => "`<|`".into(),
            Tok::MapsTo => "`|->`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Pos {
    pub line: usize,
    pub column: usize,
}

pub(crate) fn lex(src: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut column) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, column };
        let rest = &chars[i..];
        let starts = |s: &str| s.chars().enumerate().all(|(k, ch)| rest.get(k) == Some(&ch));
        let (tok, len) = if c == '\n' {
            i += 1;
            line += 1;
            column = 1;
            continue;
        } else if c.is_whitespace() {
            (None, 1)
        } else if c.is_ascii_alphabetic() || c == '_' {
            let len = rest
                .iter()
                .take_while(|ch| ch.is_ascii_alphanumeric() || **ch == '_' || **ch == '\'')
                .count();
            (Some(Tok::Ident(rest[..len].iter().collect())), len)
        } else if c.is_ascii_digit() {
            let len = rest.iter().take_while(|ch| ch.is_ascii_digit()).count();
            (Some(Tok::Int(rest[..len].iter().collect())), len)
        } else if starts("<->") {
            (Some(Tok::Iff), 3)
        } else if starts("|->") {
            (Some(Tok::MapsTo), 3)
        } else if starts("<|") {
            (Some(Tok::Insert), 2)
        } else if starts("->") {
            (Some(Tok::Arrow), 2)
        } else if starts("/\\") {
            (Some(Tok::And), 2)
        } else if starts("\\/") {
            (Some(Tok::Or), 2)
        } else {
            let tok = match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '{' => Tok::LBrace,
                '}' => Tok::RBrace,
                '.' => Tok::Dot,
                ',' => Tok::Comma,
                '!' => Tok::Bang,
                '=' => Tok::Eq,
                '<' => Tok::Lt,
                '>' => Tok::Gt,
                _ => return Err(ParseError::new(line, column, format!("unexpected character `{c}`"))),
            };
            (Some(tok), 1)
        };
        if let Some(tok) = tok {
            out.push((tok, pos));
        }
        i += len;
        column += len;
    }
    out.push((Tok::Eof, Pos { line, column }));
    Ok(out)
}
