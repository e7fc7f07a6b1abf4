use num_bigint::{BigInt, BigUint};

use super::ParseError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    /// `Ind.Ctor`
    Qualified(String, String),
    Int(BigInt),
    Nat(BigUint),
    /// `^n`, a raw type variable index
    TyIdx(usize),
    /// `#n`, a parameter count
    Count(usize),
    Backslash,
    TyLambda,
    Arrow,
    Colon,
    Eq,
    Bar,
    LParen,
    RParen,
    LBrack,
    RBrack,
    LBrace,
    RBrace,
    Comma,
    Dot,
    Eof,
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

pub(crate) fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut toks = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let err = |line, col, msg: String| ParseError { line, col, msg };
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let mut advance = |n: usize, i: &mut usize| {
            for _ in 0..n {
                if chars[*i] == '\n' {
                    line += 1;
                    col = 1;
                } else {
                    col += 1;
                }
                *i += 1;
            }
        };
        if c.is_whitespace() {
            advance(1, &mut i);
            continue;
        }
        if c == '-' && chars.get(i + 1) == Some(&'-') {
            while i < chars.len() && chars[i] != '\n' {
                advance(1, &mut i);
            }
            continue;
        }
        let peek = |k: usize| chars.get(i + k).copied();
        let tok = if is_ident_start(c) {
            let start = i;
            let mut end = i;
            while end < chars.len() && is_ident_char(chars[end]) {
                end += 1;
            }
            let first: String = chars[start..end].iter().collect();
            if chars.get(end) == Some(&'.') && chars.get(end + 1).is_some_and(|&c| is_ident_start(c)) {
                let mut end2 = end + 1;
                while end2 < chars.len() && is_ident_char(chars[end2]) {
                    end2 += 1;
                }
                let second: String = chars[end + 1..end2].iter().collect();
                advance(end2 - start, &mut i);
                Tok::Qualified(first, second)
            } else {
                advance(end - start, &mut i);
                Tok::Ident(first)
            }
        } else if c.is_ascii_digit() || (c == '-' && peek(1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            let mut end = i + 1;
            while end < chars.len() && chars[end].is_ascii_digit() {
                end += 1;
            }
            let digits: String = chars[start..end].iter().collect();
            if chars.get(end) == Some(&'z') && !chars.get(end + 1).is_some_and(|&c| is_ident_char(c)) {
                advance(end + 1 - start, &mut i);
                Tok::Int(digits.parse().map_err(|_| err(tl, tc, format!("bad integer literal {digits}z")))?)
            } else if c == '-' {
                return Err(err(tl, tc, format!("negative literal {digits} needs the `z` suffix")));
            } else {
                advance(end - start, &mut i);
                Tok::Nat(digits.parse().map_err(|_| err(tl, tc, format!("bad natural literal {digits}")))?)
            }
        } else if c == '^' || c == '#' {
            let start = i + 1;
            let mut end = start;
            while end < chars.len() && chars[end].is_ascii_digit() {
                end += 1;
            }
            if end == start {
                return Err(err(tl, tc, format!("expected digits after `{c}`")));
            }
            let digits: String = chars[start..end].iter().collect();
            let n = digits.parse().map_err(|_| err(tl, tc, format!("index {digits} too large")))?;
            advance(end - i, &mut i);
            if c == '^' {
                Tok::TyIdx(n)
            } else {
                Tok::Count(n)
            }
        } else {
            let (tok, len) = match (c, peek(1)) {
                ('-', Some('>')) => (Tok::Arrow, 2),
                ('/', Some('\\')) => (Tok::TyLambda, 2),
                ('\\', _) => (Tok::Backslash, 1),
                (':', _) => (Tok::Colon, 1),
                ('=', _) => (Tok::Eq, 1),
                ('|', _) => (Tok::Bar, 1),
                ('(', _) => (Tok::LParen, 1),
                (')', _) => (Tok::RParen, 1),
                ('[', _) => (Tok::LBrack, 1),
                (']', _) => (Tok::RBrack, 1),
                ('{', _) => (Tok::LBrace, 1),
                ('}', _) => (Tok::RBrace, 1),
                (',', _) => (Tok::Comma, 1),
                ('.', _) => (Tok::Dot, 1),
                _ => return Err(err(tl, tc, format!("unexpected character {c:?}"))),
            };
            advance(len, &mut i);
            tok
        };
        toks.push(Token { tok, line: tl, col: tc });
    }
    toks.push(Token { tok: Tok::Eof, line, col });
    Ok(toks)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(s: &str) -> Vec<Tok> {
        lex(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn literals_and_symbols() {
        assert_eq!(
            kinds(r"\x : Nat -> 5z -3z 7"),
            vec![
                Tok::Backslash,
                Tok::Ident("x".into()),
                Tok::Colon,
                Tok::Ident("Nat".into()),
                Tok::Arrow,
                Tok::Int(5.into()),
                Tok::Int((-3).into()),
                Tok::Nat(7u32.into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn qualified_names_and_indices() {
        assert_eq!(
            kinds("Msg.Claim forall A. ^1 #2 -- comment\n/\\"),
            vec![
                Tok::Qualified("Msg".into(), "Claim".into()),
                Tok::Ident("forall".into()),
                Tok::Ident("A".into()),
                Tok::Dot,
                Tok::TyIdx(1),
                Tok::Count(2),
                Tok::TyLambda,
                Tok::Eof
            ]
        );
    }

    #[test]
    fn errors_carry_position() {
        let e = lex("x\n  $").unwrap_err();
        assert_eq!((e.line, e.col), (2, 3));
    }
}
