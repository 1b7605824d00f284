//! Parser for field specifiers `GF(p)` and `GF(p^n)`.

use super::FieldError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FieldSpec {
    pub p: u64,
    pub n: usize,
}

impl std::fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.n == 1 {
            write!(f, "GF({})", self.p)
        } else {
            write!(f, "GF({}^{})", self.p, self.n)
        }
    }
}

struct Cursor<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn err(&self, msg: &str) -> FieldError {
        FieldError::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), FieldError> {
        self.skip_ws();
        if self.s.get(self.pos) == Some(&c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", c as char)))
        }
    }

    fn number(&mut self) -> Result<u64, FieldError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a number"));
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| FieldError::Parse {
                pos: start,
                msg: "number out of range".into(),
            })
    }
}

/// Parses `GF(p)` or `GF(p^n)` (case-insensitive prefix, spaces allowed).
/// Primality is checked later by [`super::build_field`].
pub fn parse_field_spec(text: &str) -> Result<FieldSpec, FieldError> {
    let mut c = Cursor {
        s: text.as_bytes(),
        pos: 0,
    };
    c.skip_ws();
    let head = text.get(c.pos..c.pos + 2).unwrap_or("");
    if !head.eq_ignore_ascii_case("gf") {
        return Err(c.err("expected 'GF'"));
    }
    c.pos += 2;
    c.expect(b'(')?;
    let p = c.number()?;
    c.skip_ws();
    let n = if c.s.get(c.pos) == Some(&b'^') {
        c.pos += 1;
        let n = c.number()?;
        if n == 0 {
            return Err(c.err("extension degree must be at least 1"));
        }
        n as usize
    } else {
        1
    };
    c.expect(b')')?;
    c.skip_ws();
    if c.pos != c.s.len() {
        return Err(c.err("trailing input"));
    }
    Ok(FieldSpec { p, n })
}
