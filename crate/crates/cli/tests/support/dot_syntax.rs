//! Recursive-descent recogniser for the Graphviz DOT language (graph,
//! statements, attribute lists, edges, subgraphs, ports, comments). Returns
//! node/edge statement counts so callers can cross-check the structure.

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Id(String),
    Kw(&'static str),
    Punct(&'static str),
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct DotSummary {
    pub node_stmts: usize,
    pub edge_stmts: usize,
    pub edges: usize,
    pub subgraphs: usize,
}

const KEYWORDS: [&str; 6] = ["strict", "graph", "digraph", "node", "edge", "subgraph"];

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, String> {
    let chars: Vec<char> = src.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    let mut line = 1;
    let mut at_line_start = true;
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            line += 1;
            i += 1;
            at_line_start = true;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        // `#` lines are preprocessor output and ignored.
        if c == '#' && at_line_start {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        at_line_start = false;
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'*') {
            i += 2;
            loop {
                match chars.get(i) {
                    None => return Err(format!("line {line}: unterminated comment")),
                    Some('*') if chars.get(i + 1) == Some(&'/') => {
                        i += 2;
                        break;
                    }
                    Some(ch) => {
                        if *ch == '\n' {
                            line += 1;
                        }
                        i += 1;
                    }
                }
            }
            continue;
        }
        if c == '"' {
            let start_line = line;
            let mut s = String::new();
            i += 1;
            loop {
                match chars.get(i) {
                    None => return Err(format!("line {start_line}: unterminated string")),
                    Some('"') => {
                        i += 1;
                        break;
                    }
                    Some('\\') if i + 1 < chars.len() => {
                        if chars[i + 1] == '\n' {
                            line += 1;
                        }
                        s.push(chars[i + 1]);
                        i += 2;
                    }
                    Some(ch) => {
                        if *ch == '\n' {
                            line += 1;
                        }
                        s.push(*ch);
                        i += 1;
                    }
                }
            }
            toks.push((Tok::Id(s), start_line));
            continue;
        }
        if c == '<' {
            // HTML string: balanced angle brackets.
            let mut depth = 0usize;
            let start_line = line;
            loop {
                match chars.get(i) {
                    None => return Err(format!("line {start_line}: unterminated HTML string")),
                    Some('<') => depth += 1,
                    Some('>') => {
                        depth -= 1;
                        if depth == 0 {
                            i += 1;
                            break;
                        }
                    }
                    Some('\n') => line += 1,
                    _ => {}
                }
                i += 1;
            }
            toks.push((Tok::Id(String::from("<html>")), start_line));
            continue;
        }
        if c == '-' && matches!(chars.get(i + 1), Some('>') | Some('-')) {
            toks.push((Tok::Punct(if chars[i + 1] == '>' { "->" } else { "--" }), line));
            i += 2;
            continue;
        }
        if let Some(p) = ["{", "}", "[", "]", ";", ",", "=", ":"].iter().find(|p| p.starts_with(c)) {
            toks.push((Tok::Punct(p), line));
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || c == '.' || c == '-' {
            // Numeral: [-]?(.[0-9]+ | [0-9]+(.[0-9]*)?)
            let start = i;
            if c == '-' {
                i += 1;
            }
            let mut digits = 0;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
                digits += 1;
            }
            if chars.get(i) == Some(&'.') {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                    digits += 1;
                }
            }
            if digits == 0 {
                return Err(format!("line {line}: malformed numeral"));
            }
            if i < chars.len() && (chars[i].is_alphabetic() || chars[i] == '_') {
                return Err(format!("line {line}: numeral runs into an identifier"));
            }
            toks.push((Tok::Id(chars[start..i].iter().collect()), line));
            continue;
        }
        if c.is_alphabetic() || c == '_' || !c.is_ascii() {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || !chars[i].is_ascii()) {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            let lower = word.to_ascii_lowercase();
            match KEYWORDS.iter().find(|k| **k == lower) {
                Some(k) => toks.push((Tok::Kw(k), line)),
                None => toks.push((Tok::Id(word), line)),
            }
            continue;
        }
        return Err(format!("line {line}: unexpected character {c:?}"));
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    edge_op: &'static str,
    summary: DotSummary,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|(t, _)| t)
    }

    fn err(&self, what: &str) -> String {
        match self.toks.get(self.pos) {
            Some((t, line)) => format!("line {line}: expected {what}, found {t:?}"),
            None => format!("end of input: expected {what}"),
        }
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Punct(q)) if *q == p) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, p: &str) -> Result<(), String> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            Err(self.err(&format!("'{p}'")))
        }
    }

    fn eat_kw(&mut self, k: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Kw(q)) if *q == k) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn id(&mut self) -> Result<(), String> {
        if matches!(self.peek(), Some(Tok::Id(_))) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err("an ID"))
        }
    }

    fn graph(&mut self) -> Result<(), String> {
        self.eat_kw("strict");
        if self.eat_kw("digraph") {
            self.edge_op = "->";
        } else if self.eat_kw("graph") {
            self.edge_op = "--";
        } else {
            return Err(self.err("'graph' or 'digraph'"));
        }
        if matches!(self.peek(), Some(Tok::Id(_))) {
            self.pos += 1;
        }
        self.expect_punct("{")?;
        self.stmt_list()?;
        self.expect_punct("}")?;
        if self.pos != self.toks.len() {
            return Err(self.err("end of input"));
        }
        Ok(())
    }

    fn stmt_list(&mut self) -> Result<(), String> {
        while !matches!(self.peek(), Some(Tok::Punct("}")) | None) {
            self.stmt()?;
            self.eat_punct(";");
        }
        Ok(())
    }

    fn stmt(&mut self) -> Result<(), String> {
        match self.peek() {
            Some(Tok::Kw("graph" | "node" | "edge")) => {
                self.pos += 1;
                self.attr_list(true)
            }
            Some(Tok::Id(_)) if matches!(self.peek_at(1), Some(Tok::Punct("="))) => {
                self.pos += 2;
                self.id()
            }
            Some(Tok::Id(_)) => {
                self.node_id()?;
                if self.edge_rhs()? {
                    self.summary.edge_stmts += 1;
                } else {
                    self.summary.node_stmts += 1;
                }
                self.attr_list(false)
            }
            Some(Tok::Kw("subgraph")) | Some(Tok::Punct("{")) => {
                self.subgraph()?;
                if self.edge_rhs()? {
                    self.summary.edge_stmts += 1;
                    self.attr_list(false)?;
                }
                Ok(())
            }
            _ => Err(self.err("a statement")),
        }
    }

    fn subgraph(&mut self) -> Result<(), String> {
        if self.eat_kw("subgraph") && matches!(self.peek(), Some(Tok::Id(_))) {
            self.pos += 1;
        }
        self.expect_punct("{")?;
        self.summary.subgraphs += 1;
        self.stmt_list()?;
        self.expect_punct("}")
    }

    fn node_id(&mut self) -> Result<(), String> {
        self.id()?;
        if self.eat_punct(":") {
            self.id()?;
            if self.eat_punct(":") {
                self.id()?;
            }
        }
        Ok(())
    }

    /// Zero or more `edgeop (node_id | subgraph)`; true if any were present.
    fn edge_rhs(&mut self) -> Result<bool, String> {
        let mut any = false;
        loop {
            match self.peek() {
                Some(Tok::Punct(op @ ("->" | "--"))) => {
                    if *op != self.edge_op {
                        return Err(self.err(&format!("'{}'", self.edge_op)));
                    }
                    self.pos += 1;
                }
                _ => return Ok(any),
            }
            any = true;
            self.summary.edges += 1;
            match self.peek() {
                Some(Tok::Kw("subgraph")) | Some(Tok::Punct("{")) => self.subgraph()?,
                _ => self.node_id()?,
            }
        }
    }

    fn attr_list(&mut self, required: bool) -> Result<(), String> {
        if !matches!(self.peek(), Some(Tok::Punct("["))) {
            return if required { Err(self.err("'['")) } else { Ok(()) };
        }
        while self.eat_punct("[") {
            while !self.eat_punct("]") {
                self.id()?;
                self.expect_punct("=")?;
                self.id()?;
                if !self.eat_punct(";") {
                    self.eat_punct(",");
                }
            }
        }
        Ok(())
    }
}

/// Check that `src` is one syntactically valid DOT graph.
pub fn check_dot(src: &str) -> Result<DotSummary, String> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
        edge_op: "->",
        summary: DotSummary::default(),
    };
    p.graph()?;
    Ok(p.summary)
}
