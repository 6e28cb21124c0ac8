//! Shared tokenizer for the line-oriented file formats.

use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub(crate) struct Token<'a> {
    pub text: &'a str,
    /// 1-based column of the first character.
    pub column: usize,
}

impl Token<'_> {
    pub fn parse<T: FromStr>(&self, line: usize) -> Result<T> {
        self.text
            .parse()
            .map_err(|_| Error::parse(line, self.column, format!("cannot read `{}` as a number", self.text)))
    }
}

/// Yields `(line_number, tokens)` for each line with content, comments
/// stripped. Line numbers are 1-based.
pub(crate) fn tokenized_lines(text: &str) -> impl Iterator<Item = (usize, Vec<Token<'_>>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let body = match line.find('#') {
            Some(pos) => &line[..pos],
            None => line,
        };
        let mut toks = Vec::new();
        let mut start: Option<usize> = None;
        for (pos, ch) in body.char_indices() {
            if ch.is_whitespace() {
                if let Some(s) = start.take() {
                    toks.push(Token {
                        text: &body[s..pos],
                        column: body[..s].chars().count() + 1,
                    });
                }
            } else if start.is_none() {
                start = Some(pos);
            }
        }
        if let Some(s) = start {
            toks.push(Token {
                text: &body[s..],
                column: body[..s].chars().count() + 1,
            });
        }
        if toks.is_empty() {
            None
        } else {
            Some((i + 1, toks))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn columns_and_comments() {
        let lines: Vec<_> = tokenized_lines("a  bc # x\n\n  # only\n d\n").collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0].0, 1);
        assert_eq!(lines[0].1[1].text, "bc");
        assert_eq!(lines[0].1[1].column, 4);
        assert_eq!(lines[1].0, 4);
        assert_eq!(lines[1].1[0].column, 2);
    }
}
