//! Tokenizer for math-mode LaTeX strings.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TokenKind {
    ControlSequence,
    Letter,
    Digit,
    Operator,
    Relation,
    OpenGroup,
    CloseGroup,
    Subscript,
    Superscript,
    Ampersand,
    Other,
}

/// One lexical token. `position` is a 0-based character offset into the input;
/// concatenating the `text` of all tokens reproduces the input up to whitespace.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MathToken {
    pub kind: TokenKind,
    pub text: String,
    pub position: usize,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TokenizeError {
    #[error("empty input")]
    EmptyInput,
    #[error("unbalanced braces at position {0}")]
    UnbalancedBraces(usize),
    #[error("illegal character {ch:?} at position {position}")]
    IllegalCharacter { position: usize, ch: char },
}

const OPERATOR_CHARS: &[char] = &['+', '-', '*', '/', '(', ')', '[', ']', ',', '|', '!'];
const RELATION_CHARS: &[char] = &['=', '<', '>'];
const OTHER_CHARS: &[char] = &['.', '@', '\''];

/// Splits a math-mode expression (no surrounding `$`) into tokens.
///
/// Control sequences are single tokens (`\frac`, `\{`), every non-whitespace
/// character is covered by exactly one token, and brace balance is checked.
pub fn tokenize(input: &str) -> Result<Vec<MathToken>, TokenizeError> {
    let chars: Vec<char> = input.chars().collect();
    let mut tokens = Vec::new();
    let mut open_braces: Vec<usize> = Vec::new();
    let mut i = 0;

    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        match c {
            '\\' => {
                let start = i;
                i += 1;
                if i < chars.len() && chars[i].is_ascii_alphabetic() {
                    let mut name = String::from("\\");
                    while i < chars.len() && chars[i].is_ascii_alphabetic() {
                        name.push(chars[i]);
                        i += 1;
                    }
                    tokens.push(MathToken {
                        kind: TokenKind::ControlSequence,
                        text: name,
                        position: start,
                    });
                } else if i < chars.len() && (chars[i] == '{' || chars[i] == '}') {
                    tokens.push(MathToken {
                        kind: TokenKind::ControlSequence,
                        text: format!("\\{}", chars[i]),
                        position: start,
                    });
                    i += 1;
                } else {
                    return Err(TokenizeError::IllegalCharacter {
                        position: start,
                        ch: '\\',
                    });
                }
            }
            '{' => {
                open_braces.push(i);
                tokens.push(MathToken {
                    kind: TokenKind::OpenGroup,
                    text: "{".into(),
                    position: i,
                });
                i += 1;
            }
            '}' => {
                if open_braces.pop().is_none() {
                    return Err(TokenizeError::UnbalancedBraces(i));
                }
                tokens.push(MathToken {
                    kind: TokenKind::CloseGroup,
                    text: "}".into(),
                    position: i,
                });
                i += 1;
            }
            '_' => {
                tokens.push(MathToken {
                    kind: TokenKind::Subscript,
                    text: "_".into(),
                    position: i,
                });
                i += 1;
            }
            '^' => {
                tokens.push(MathToken {
                    kind: TokenKind::Superscript,
                    text: "^".into(),
                    position: i,
                });
                i += 1;
            }
            '&' => {
                tokens.push(MathToken {
                    kind: TokenKind::Ampersand,
                    text: "&".into(),
                    position: i,
                });
                i += 1;
            }
            c if c.is_ascii_alphabetic() => {
                tokens.push(MathToken {
                    kind: TokenKind::Letter,
                    text: c.to_string(),
                    position: i,
                });
                i += 1;
            }
            c if c.is_ascii_digit() => {
                tokens.push(MathToken {
                    kind: TokenKind::Digit,
                    text: c.to_string(),
                    position: i,
                });
                i += 1;
            }
            c if RELATION_CHARS.contains(&c) => {
                tokens.push(MathToken {
                    kind: TokenKind::Relation,
                    text: c.to_string(),
                    position: i,
                });
                i += 1;
            }
            c if OPERATOR_CHARS.contains(&c) => {
                tokens.push(MathToken {
                    kind: TokenKind::Operator,
                    text: c.to_string(),
                    position: i,
                });
                i += 1;
            }
            c if OTHER_CHARS.contains(&c) => {
                tokens.push(MathToken {
                    kind: TokenKind::Other,
                    text: c.to_string(),
                    position: i,
                });
                i += 1;
            }
            c => {
                return Err(TokenizeError::IllegalCharacter { position: i, ch: c });
            }
        }
    }

    if let Some(pos) = open_braces.first() {
        return Err(TokenizeError::UnbalancedBraces(*pos));
    }
    if tokens.is_empty() {
        return Err(TokenizeError::EmptyInput);
    }
    Ok(tokens)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frac_splits_into_seven_tokens() {
        let tokens = tokenize(r"\frac{1}{2}").unwrap();
        let kinds: Vec<TokenKind> = tokens.iter().map(|t| t.kind).collect();
        assert_eq!(
            kinds,
            vec![
                TokenKind::ControlSequence,
                TokenKind::OpenGroup,
                TokenKind::Digit,
                TokenKind::CloseGroup,
                TokenKind::OpenGroup,
                TokenKind::Digit,
                TokenKind::CloseGroup,
            ]
        );
        assert_eq!(tokens[0].text, r"\frac");
    }

    #[test]
    fn empty_input_is_an_error() {
        assert_eq!(tokenize(""), Err(TokenizeError::EmptyInput));
        assert_eq!(tokenize("   "), Err(TokenizeError::EmptyInput));
    }

    #[test]
    fn pi_applied_to_sum_tokenizes_with_operator_parens() {
        let tokens = tokenize(r"\pi(x+y)").unwrap();
        let texts: Vec<&str> = tokens.iter().map(|t| t.text.as_str()).collect();
        assert_eq!(texts, vec![r"\pi", "(", "x", "+", "y", ")"]);
        assert_eq!(tokens[1].kind, TokenKind::Operator);
        assert_eq!(tokens[5].kind, TokenKind::Operator);
    }

    #[test]
    fn positions_are_strictly_increasing_and_cover_non_whitespace() {
        let input = r"\frac {1}{2} + x";
        let tokens = tokenize(input).unwrap();
        for w in tokens.windows(2) {
            assert!(w[0].position < w[1].position);
        }
        let token_len: usize = tokens.iter().map(|t| t.text.chars().count()).sum();
        let non_ws = input.chars().filter(|c| !c.is_whitespace()).count();
        assert_eq!(token_len, non_ws);
    }

    #[test]
    fn unbalanced_braces_report_position() {
        assert_eq!(tokenize("{x"), Err(TokenizeError::UnbalancedBraces(0)));
        assert_eq!(tokenize("x}"), Err(TokenizeError::UnbalancedBraces(1)));
    }

    #[test]
    fn illegal_character_reports_position() {
        assert_eq!(
            tokenize("x$y"),
            Err(TokenizeError::IllegalCharacter {
                position: 1,
                ch: '$'
            })
        );
    }

    #[test]
    fn escaped_braces_are_control_sequences() {
        let tokens = tokenize(r"\{x\}").unwrap();
        assert_eq!(tokens[0].kind, TokenKind::ControlSequence);
        assert_eq!(tokens[0].text, r"\{");
        assert_eq!(tokens[2].text, r"\}");
    }
}
