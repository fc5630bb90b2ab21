use super::{Atom, Database, ModelError, Query, Value, Var};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Neck,
    Eof,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            chars: text.chars().peekable(),
            line: 1,
            col: 1,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn tokens(mut self) -> Result<Vec<Spanned>, ModelError> {
        let mut out = Vec::new();
        loop {
            while let Some(&c) = self.chars.peek() {
                if c.is_whitespace() {
                    self.bump();
                } else if c == '%' {
                    while let Some(&c) = self.chars.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                } else {
                    break;
                }
            }
            let (line, col) = (self.line, self.col);
            let Some(&c) = self.chars.peek() else {
                out.push(Spanned {
                    tok: Tok::Eof,
                    line,
                    col,
                });
                return Ok(out);
            };
            let tok = match c {
                '(' => {
                    self.bump();
                    Tok::LParen
                }
                ')' => {
                    self.bump();
                    Tok::RParen
                }
                ',' => {
                    self.bump();
                    Tok::Comma
                }
                '.' => {
                    self.bump();
                    Tok::Dot
                }
                ':' => {
                    self.bump();
                    if self.chars.peek() == Some(&'-') {
                        self.bump();
                        Tok::Neck
                    } else {
                        return Err(syntax(line, col, "expected ':-'"));
                    }
                }
                c if is_word_char(c) => {
                    let mut w = String::new();
                    while let Some(&c) = self.chars.peek() {
                        if !is_word_char(c) {
                            break;
                        }
                        w.push(c);
                        self.bump();
                    }
                    Tok::Word(w)
                }
                other => return Err(syntax(line, col, &format!("unexpected character {other:?}"))),
            };
            out.push(Spanned { tok, line, col });
        }
    }
}

fn is_word_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '#'
}

fn syntax(line: usize, col: usize, msg: &str) -> ModelError {
    ModelError::Syntax {
        line,
        col,
        msg: msg.to_string(),
    }
}

fn is_relation_name(w: &str) -> bool {
    let mut cs = w.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_uppercase())
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn is_variable_name(w: &str) -> bool {
    let mut cs = w.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_lowercase())
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Atomic tokens: `[a-z0-9_]+`, optionally joined by `#` for composite
/// gadget values.
fn is_value_token(w: &str) -> bool {
    !w.is_empty()
        && w.split('#').all(|part| {
            !part.is_empty()
                && part
                    .chars()
                    .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
        })
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ModelError> {
        let t = self.next();
        if t.tok == tok {
            Ok(())
        } else {
            Err(syntax(t.line, t.col, &format!("expected {what}")))
        }
    }

    fn relation_name(&mut self) -> Result<String, ModelError> {
        let t = self.next();
        match t.tok {
            Tok::Word(w) if is_relation_name(&w) => Ok(w),
            _ => Err(syntax(t.line, t.col, "expected relation name")),
        }
    }

    /// Parenthesised, comma separated list; `item` parses one element.
    fn list<T>(
        &mut self,
        mut item: impl FnMut(&mut Self) -> Result<T, ModelError>,
    ) -> Result<Vec<T>, ModelError> {
        self.expect(Tok::LParen, "'('")?;
        let mut out = Vec::new();
        if self.peek().tok == Tok::RParen {
            self.next();
            return Ok(out);
        }
        loop {
            out.push(item(self)?);
            let t = self.next();
            match t.tok {
                Tok::Comma => continue,
                Tok::RParen => return Ok(out),
                _ => return Err(syntax(t.line, t.col, "expected ',' or ')'")),
            }
        }
    }

    fn variable(&mut self) -> Result<Var, ModelError> {
        let t = self.next();
        match t.tok {
            Tok::Word(w) if is_variable_name(&w) => Ok(Var::new(w)),
            _ => Err(syntax(t.line, t.col, "expected variable")),
        }
    }

    fn value(&mut self) -> Result<Value, ModelError> {
        let t = self.next();
        match t.tok {
            Tok::Word(w) if w == "pair" && self.peek().tok == Tok::LParen => {
                let open = self.peek().clone();
                let parts = self.list(|p| {
                    let t = p.next();
                    match t.tok {
                        Tok::Word(w) => Ok((w, t.line, t.col)),
                        _ => Err(syntax(t.line, t.col, "expected pair component")),
                    }
                })?;
                if parts.len() != 2 {
                    return Err(syntax(open.line, open.col, "pair takes two components"));
                }
                let (data, dl, dc) = &parts[0];
                let (var, vl, vc) = &parts[1];
                if !is_value_token(data) {
                    return Err(syntax(*dl, *dc, "invalid pair data token"));
                }
                if !is_variable_name(var) {
                    return Err(syntax(*vl, *vc, "invalid pair variable"));
                }
                Ok(Value::pair(data.clone(), Var::new(var.clone())))
            }
            Tok::Word(w) if is_value_token(&w) => Ok(Value::Atomic(w)),
            _ => Err(syntax(t.line, t.col, "expected value")),
        }
    }
}

/// Parses a single rule `Head(v1,...,vk) :- A1, ..., Am.`; a rule without a
/// body (`Q().`) denotes the empty query.
pub fn parse_query(text: &str) -> Result<Query, ModelError> {
    let mut p = Parser {
        toks: Lexer::new(text).tokens()?,
        pos: 0,
    };
    p.relation_name()?;
    let head_start = p.peek().clone();
    let head = p.list(Parser::variable)?;
    let mut atoms = Vec::new();
    if p.peek().tok == Tok::Neck {
        p.next();
        loop {
            let sym = p.relation_name()?;
            let args = p.list(Parser::variable)?;
            atoms.push(Atom::new(sym, args));
            let t = p.next();
            match t.tok {
                Tok::Comma => continue,
                Tok::Dot => break,
                _ => return Err(syntax(t.line, t.col, "expected ',' or '.'")),
            }
        }
    } else {
        p.expect(Tok::Dot, "':-' or '.'")?;
    }
    let t = p.next();
    if t.tok != Tok::Eof {
        return Err(syntax(t.line, t.col, "expected end of input after rule"));
    }
    Query::new(atoms, head).map_err(|e| match e {
        ModelError::UnboundHeadVar(v) => ModelError::Syntax {
            line: head_start.line,
            col: head_start.col,
            msg: format!("head variable {v} does not occur in the body"),
        },
        other => other,
    })
}

/// Parses a sequence of facts `R(v1,...,vk).`; duplicates collapse.
pub fn parse_database(text: &str) -> Result<Database, ModelError> {
    let mut p = Parser {
        toks: Lexer::new(text).tokens()?,
        pos: 0,
    };
    let mut db = Database::new();
    while p.peek().tok != Tok::Eof {
        let sym = p.relation_name()?;
        let tuple = p.list(Parser::value)?;
        p.expect(Tok::Dot, "'.'")?;
        db.insert(&sym, tuple)?;
    }
    Ok(db)
}
