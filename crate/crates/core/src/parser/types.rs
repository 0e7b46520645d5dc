use crate::lexer::{Token, TokenKind};

pub(crate) const PREDEFINED_TYPES: &[&str] = &[
    "bool", "byte", "char", "decimal", "double", "float", "int", "long", "object", "sbyte",
    "short", "string", "uint", "ulong", "ushort", "void",
];

const MAX_TYPE_DEPTH: usize = 32;

pub(crate) fn is_predefined_type(t: &Token) -> bool {
    t.kind == TokenKind::Keyword && PREDEFINED_TYPES.contains(&t.text.as_str())
}

/// Scan a type expression starting at `start`. Generic argument lists, array
/// ranks, nullable and pointer suffixes are folded into one printable name,
/// e.g. `Dictionary<string,List<int>>[]`. Returns the index just past the type.
pub(crate) fn scan_type(tokens: &[Token], start: usize) -> Option<(usize, String)> {
    scan_type_at_depth(tokens, start, 0)
}

fn scan_type_at_depth(tokens: &[Token], start: usize, depth: usize) -> Option<(usize, String)> {
    if depth > MAX_TYPE_DEPTH {
        return None;
    }
    let mut text = String::new();
    let mut j = start;
    let first = tokens.get(j)?;
    if is_predefined_type(first) {
        text.push_str(&first.text);
        j += 1;
    } else if first.is_ident() {
        loop {
            let seg = tokens.get(j)?;
            if !seg.is_ident() {
                return None;
            }
            text.push_str(&seg.text);
            j += 1;
            if tokens.get(j).is_some_and(|t| t.is_op("<")) {
                text.push('<');
                j += 1;
                loop {
                    let (next, inner) = scan_type_at_depth(tokens, j, depth + 1)?;
                    text.push_str(&inner);
                    j = next;
                    let sep = tokens.get(j)?;
                    if sep.is_punct(",") {
                        text.push(',');
                        j += 1;
                    } else if sep.is_op(">") {
                        text.push('>');
                        j += 1;
                        break;
                    } else {
                        return None;
                    }
                }
            }
            if tokens.get(j).is_some_and(|t| t.is_punct("."))
                && tokens.get(j + 1).is_some_and(|t| t.is_ident())
            {
                text.push('.');
                j += 1;
                continue;
            }
            break;
        }
    } else {
        return None;
    }
    loop {
        match tokens.get(j) {
            Some(t) if t.is_op("?") || t.is_op("*") => {
                text.push_str(&t.text);
                j += 1;
            }
            Some(t) if t.is_punct("[") => {
                let mut k = j + 1;
                let mut rank = String::from("[");
                while tokens.get(k).is_some_and(|t| t.is_punct(",")) {
                    rank.push(',');
                    k += 1;
                }
                if tokens.get(k).is_some_and(|t| t.is_punct("]")) {
                    rank.push(']');
                    text.push_str(&rank);
                    j = k + 1;
                } else {
                    break;
                }
            }
            _ => break,
        }
    }
    Some((j, text))
}
