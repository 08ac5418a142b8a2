//! Text formats: a PGSolver-compatible parity game format and a bespoke
//! exact-rational format for simple stochastic games.
//!
//! Parity games:
//!
//! ```text
//! parity 2;
//! 0 3 0 1,2 "start";
//! 1 1 1 0;
//! 2 0 0 2;
//! ```
//!
//! Header `parity <max-id>;`, then one line per vertex: id, priority,
//! owner (0 = Eve, 1 = Adam), comma-separated successors and an optional
//! quoted name. Sparse ids are remapped to dense ones on load; the mapping
//! is kept on the parsed game.
//!
//! Simple stochastic games:
//!
//! ```text
//! ssg 3;
//! 0 R 1:1/2 2:1/2;
//! 1 E 1;
//! 2 A 2;
//! win 1;
//! lose 2;
//! ```
//!
//! Probabilities are attached with `:num/den` exactly on the successors of
//! random (`R`) vertices. Printing is canonical (dense ids, ascending
//! successors, lowest-term rationals), and parsing a canonical document
//! reproduces it byte for byte.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::arena::{Arena, Owner, Player, PriorityMap, VertexId};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::ssg::Ssg;

/// A parity game as read from or written to a document.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityGame {
    pub arena: Arena,
    pub priorities: PriorityMap,
    /// Optional display names, dense-indexed.
    pub names: Vec<Option<String>>,
    /// Dense index -> id used in the source document.
    pub id_map: Vec<u64>,
}

impl ParityGame {
    pub fn new(arena: Arena, priorities: PriorityMap) -> ParityGame {
        let n = arena.num_vertices();
        ParityGame {
            arena,
            priorities,
            names: vec![None; n],
            id_map: (0..n as u64).collect(),
        }
    }
}

struct Cursor<'a> {
    line: &'a str,
    line_no: usize,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(line: &'a str, line_no: usize) -> Cursor<'a> {
        Cursor {
            line,
            line_no,
            pos: 0,
        }
    }

    fn error(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line_no,
            column: self.pos + 1,
            message: message.into(),
        }
    }

    fn skip_spaces(&mut self) {
        while self.line[self.pos..].starts_with([' ', '\t']) {
            self.pos += 1;
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_spaces();
        self.pos >= self.line.len()
    }

    /// Next token of characters not in ` \t;`, or a quoted string.
    fn token(&mut self) -> Result<&'a str> {
        self.skip_spaces();
        let rest = &self.line[self.pos..];
        if rest.is_empty() {
            return Err(self.error("unexpected end of line"));
        }
        if let Some(stripped) = rest.strip_prefix('"') {
            let close = stripped
                .find('"')
                .ok_or_else(|| self.error("unterminated string"))?;
            let token = &rest[..close + 2];
            self.pos += token.len();
            return Ok(token);
        }
        let len = rest.find([' ', '\t', ';']).unwrap_or(rest.len());
        if len == 0 {
            return Err(self.error("unexpected ';'"));
        }
        let token = &rest[..len];
        self.pos += len;
        Ok(token)
    }

    fn expect_terminator(&mut self) -> Result<()> {
        self.skip_spaces();
        if self.line[self.pos..].starts_with(';') {
            self.pos += 1;
            self.skip_spaces();
            if self.pos == self.line.len() {
                Ok(())
            } else {
                Err(self.error("trailing content after ';'"))
            }
        } else {
            Err(self.error("expected ';'"))
        }
    }

    fn number<T: std::str::FromStr>(&mut self, what: &str) -> Result<T> {
        self.skip_spaces();
        let start = self.pos;
        let token = self.token()?;
        token.parse().map_err(|_| {
            self.pos = start;
            self.error(format!("expected {what}, found '{token}'"))
        })
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end()))
        .filter(|(_, l)| !l.trim().is_empty())
}

/// Parses a PGSolver-style parity game document. Sparse vertex ids are
/// remapped to a dense range; the mapping is preserved in `id_map`.
pub fn parse_parity(text: &str) -> Result<ParityGame> {
    struct RawVertex {
        priority: u32,
        owner: Player,
        successors: Vec<u64>,
        name: Option<String>,
    }

    let mut lines = content_lines(text);
    let (line_no, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        column: 1,
        message: "empty document".into(),
    })?;
    let mut cursor = Cursor::new(header, line_no);
    let keyword = cursor.token()?;
    if keyword != "parity" {
        return Err(cursor.error("expected 'parity' header"));
    }
    let _declared_max: u64 = cursor.number("the maximal vertex id")?;
    cursor.expect_terminator()?;

    let mut declared: BTreeMap<u64, RawVertex> = BTreeMap::new();
    for (line_no, line) in lines {
        let mut cursor = Cursor::new(line, line_no);
        let id: u64 = cursor.number("a vertex id")?;
        let priority: u32 = cursor.number("a priority")?;
        let owner = match cursor.number::<u8>("an owner (0 or 1)")? {
            0 => Player::Eve,
            1 => Player::Adam,
            _ => return Err(cursor.error("owner must be 0 (Eve) or 1 (Adam)")),
        };
        let successors_token = cursor.token()?;
        let mut successors = Vec::new();
        for part in successors_token.split(',') {
            let part = part.trim();
            let succ: u64 = part
                .parse()
                .map_err(|_| cursor.error(format!("bad successor id '{part}'")))?;
            successors.push(succ);
        }
        let name = if cursor.at_end() || cursor.line[cursor.pos..].starts_with(';') {
            None
        } else {
            let token = cursor.token()?;
            let quoted = token
                .strip_prefix('"')
                .and_then(|t| t.strip_suffix('"'))
                .ok_or_else(|| cursor.error("expected a quoted name"))?;
            Some(quoted.to_string())
        };
        cursor.expect_terminator()?;
        if declared
            .insert(
                id,
                RawVertex {
                    priority,
                    owner,
                    successors,
                    name,
                },
            )
            .is_some()
        {
            return Err(Error::Semantic(format!("vertex {id} declared twice")));
        }
    }
    if declared.is_empty() {
        return Err(Error::Semantic("document declares no vertices".into()));
    }

    let id_map: Vec<u64> = declared.keys().copied().collect();
    let dense: BTreeMap<u64, VertexId> = id_map
        .iter()
        .enumerate()
        .map(|(i, &id)| (id, VertexId(i)))
        .collect();
    let mut owners = Vec::new();
    let mut priorities = Vec::new();
    let mut names = Vec::new();
    let mut edges = Vec::new();
    for (&id, raw) in &declared {
        let u = dense[&id];
        owners.push(raw.owner);
        priorities.push(raw.priority);
        names.push(raw.name.clone());
        for &succ in &raw.successors {
            let v = dense
                .get(&succ)
                .ok_or_else(|| Error::Semantic(format!("undeclared vertex id {succ}")))?;
            edges.push((u, *v));
        }
    }
    let arena = Arena::two_player(owners, edges);
    arena.require_valid()?;
    Ok(ParityGame {
        arena,
        priorities: PriorityMap::new(priorities),
        names,
        id_map,
    })
}

/// Canonical document for a parity game: dense ids, ascending successors.
pub fn print_parity(game: &ParityGame) -> String {
    let n = game.arena.num_vertices();
    let mut out = String::new();
    let _ = writeln!(out, "parity {};", n.saturating_sub(1));
    for v in game.arena.vertices() {
        let owner = match game.arena.owner(v) {
            Owner::Eve => 0,
            Owner::Adam => 1,
            Owner::Random => unreachable!("parity games are 2-player"),
        };
        let successors = game
            .arena
            .successors(v)
            .iter()
            .map(|w| w.index().to_string())
            .collect::<Vec<_>>()
            .join(",");
        let _ = write!(
            out,
            "{} {} {} {}",
            v.index(),
            game.priorities.priority(v),
            owner,
            successors
        );
        if let Some(Some(name)) = game.names.get(v.index()) {
            let _ = write!(out, " \"{name}\"");
        }
        out.push_str(";\n");
    }
    out
}

fn parse_rational(token: &str, cursor: &Cursor) -> Result<Rational> {
    let (num, den) = token
        .split_once('/')
        .ok_or_else(|| cursor.error(format!("expected num/den, found '{token}'")))?;
    let numer: BigInt = num
        .parse()
        .map_err(|_| cursor.error(format!("bad numerator '{num}'")))?;
    let denom: BigInt = den
        .parse()
        .map_err(|_| cursor.error(format!("bad denominator '{den}'")))?;
    if denom.is_zero() {
        return Err(cursor.error("zero denominator"));
    }
    Ok(Rational::new(numer, denom))
}

/// Parses the simple stochastic game format. The vertex ids must be dense.
pub fn parse_ssg(text: &str) -> Result<Ssg> {
    let mut lines = content_lines(text);
    let (line_no, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        column: 1,
        message: "empty document".into(),
    })?;
    let mut cursor = Cursor::new(header, line_no);
    if cursor.token()? != "ssg" {
        return Err(cursor.error("expected 'ssg' header"));
    }
    let n: usize = cursor.number("the vertex count")?;
    cursor.expect_terminator()?;
    if n == 0 {
        return Err(Error::Semantic("vertex count must be positive".into()));
    }

    let mut owners: Vec<Option<Owner>> = vec![None; n];
    let mut edges = Vec::new();
    let mut trans: BTreeMap<VertexId, Vec<(VertexId, Rational)>> = BTreeMap::new();
    let mut win: Option<VertexId> = None;
    let mut lose: Option<VertexId> = None;

    for (line_no, line) in lines {
        let mut cursor = Cursor::new(line, line_no);
        let first = cursor.token()?;
        if first == "win" || first == "lose" {
            let id: usize = cursor.number("a vertex id")?;
            cursor.expect_terminator()?;
            if id >= n {
                return Err(Error::Semantic(format!("sink id {id} out of range")));
            }
            let slot = if first == "win" { &mut win } else { &mut lose };
            if slot.replace(VertexId(id)).is_some() {
                return Err(Error::Semantic(format!("duplicate '{first}' line")));
            }
            continue;
        }
        let id: usize = first
            .parse()
            .map_err(|_| cursor.error(format!("expected a vertex id, found '{first}'")))?;
        if id >= n {
            return Err(Error::Semantic(format!("vertex id {id} out of range")));
        }
        let v = VertexId(id);
        let owner = match cursor.token()? {
            "E" => Owner::Eve,
            "A" => Owner::Adam,
            "R" => Owner::Random,
            other => return Err(cursor.error(format!("bad owner '{other}', expected E, A or R"))),
        };
        if owners[id].replace(owner).is_some() {
            return Err(Error::Semantic(format!("vertex {id} declared twice")));
        }
        let mut dist = Vec::new();
        while !cursor.at_end() && !cursor.line[cursor.pos..].starts_with(';') {
            let token = cursor.token()?;
            let (succ_part, prob_part) = match token.split_once(':') {
                Some((s, p)) => (s, Some(p)),
                None => (token, None),
            };
            let succ: usize = succ_part
                .parse()
                .map_err(|_| cursor.error(format!("bad successor id '{succ_part}'")))?;
            if succ >= n {
                return Err(Error::Semantic(format!("successor id {succ} out of range")));
            }
            edges.push((v, VertexId(succ)));
            match (owner, prob_part) {
                (Owner::Random, Some(p)) => {
                    dist.push((VertexId(succ), parse_rational(p, &cursor)?));
                }
                (Owner::Random, None) => {
                    return Err(cursor.error("random successor needs a :num/den probability"))
                }
                (_, Some(_)) => {
                    return Err(cursor.error("only random successors carry probabilities"))
                }
                (_, None) => {}
            }
        }
        cursor.expect_terminator()?;
        if owner == Owner::Random {
            trans.insert(v, dist);
        }
    }

    let owners: Vec<Owner> = owners
        .into_iter()
        .enumerate()
        .map(|(i, o)| o.ok_or_else(|| Error::Semantic(format!("vertex {i} never declared"))))
        .collect::<Result<_>>()?;
    let win = win.ok_or_else(|| Error::Semantic("missing 'win' line".into()))?;
    let lose = lose.ok_or_else(|| Error::Semantic("missing 'lose' line".into()))?;
    let ssg = Ssg::new(Arena::new(owners, edges, trans), win, lose);
    ssg.require_valid()?;
    Ok(ssg)
}

/// Canonical document for a simple stochastic game.
pub fn print_ssg(ssg: &Ssg) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "ssg {};", ssg.arena.num_vertices());
    for v in ssg.arena.vertices() {
        let owner = match ssg.arena.owner(v) {
            Owner::Eve => "E",
            Owner::Adam => "A",
            Owner::Random => "R",
        };
        let _ = write!(out, "{} {}", v.index(), owner);
        match ssg.arena.distribution(v) {
            Some(dist) => {
                for (w, p) in dist {
                    let _ = write!(out, " {}:{}", w.index(), p);
                }
            }
            None => {
                for w in ssg.arena.successors(v) {
                    let _ = write!(out, " {}", w.index());
                }
            }
        }
        out.push_str(";\n");
    }
    let _ = writeln!(out, "win {};", ssg.win.index());
    let _ = writeln!(out, "lose {};", ssg.lose.index());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn minimal_parity_document() {
        let game = parse_parity("parity 1;\n0 0 0 0;\n").unwrap();
        assert_eq!(game.arena.num_vertices(), 1);
        assert_eq!(game.arena.owner(VertexId(0)), Owner::Eve);
        assert_eq!(game.priorities.priority(VertexId(0)), 0);
        assert_eq!(game.arena.successors(VertexId(0)), &[VertexId(0)]);
    }

    #[test]
    fn parity_round_trip() {
        let text = "parity 2;\n0 3 0 1,2 \"start\";\n1 1 1 0;\n2 0 0 2;\n";
        let game = parse_parity(text).unwrap();
        assert_eq!(print_parity(&game), text);
        let reparsed = parse_parity(&print_parity(&game)).unwrap();
        assert_eq!(reparsed, game);
    }

    #[test]
    fn sparse_ids_are_remapped() {
        let game = parse_parity("parity 7;\n2 0 0 7;\n7 1 1 2,7;\n").unwrap();
        assert_eq!(game.id_map, vec![2, 7]);
        assert_eq!(game.arena.num_vertices(), 2);
        assert!(game.arena.has_edge(VertexId(0), VertexId(1)));
        // canonical print is dense
        assert_eq!(print_parity(&game), "parity 1;\n0 0 0 1;\n1 1 1 0,1;\n");
    }

    #[test]
    fn undeclared_successor_is_a_semantic_error() {
        let err = parse_parity("parity 1;\n0 0 0 7;\n").unwrap_err();
        match err {
            Error::Semantic(msg) => assert!(msg.contains('7'), "{msg}"),
            other => panic!("expected a semantic error, got {other}"),
        }
    }

    #[test]
    fn parse_errors_carry_positions() {
        let err = parse_parity("parity 1;\n0 zero 0 0;\n").unwrap_err();
        match err {
            Error::Parse { line, column, .. } => {
                assert_eq!(line, 2);
                assert_eq!(column, 3);
            }
            other => panic!("expected a parse error, got {other}"),
        }
        let err = parse_parity("parity 1;\n0 0 0 0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn ssg_round_trip() {
        let text = "ssg 3;\n0 R 1:1/2 2:1/2;\n1 E 1;\n2 A 2;\nwin 1;\nlose 2;\n";
        let ssg = parse_ssg(text).unwrap();
        assert_eq!(ssg.win, VertexId(1));
        assert_eq!(ssg.lose, VertexId(2));
        assert_eq!(
            *ssg.arena.probability(VertexId(0), VertexId(1)).unwrap(),
            rat(1, 2)
        );
        assert_eq!(print_ssg(&ssg), text);
    }

    #[test]
    fn ssg_requires_probabilities_on_random_successors() {
        let err = parse_ssg("ssg 3;\n0 R 1 2;\n1 E 1;\n2 A 2;\nwin 1;\nlose 2;\n").unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
        let err = parse_ssg("ssg 3;\n0 E 1:1/2;\n1 E 1;\n2 A 2;\nwin 1;\nlose 2;\n").unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
    }

    #[test]
    fn ssg_validates_distributions() {
        let err =
            parse_ssg("ssg 3;\n0 R 1:1/2 2:1/4;\n1 E 1;\n2 A 2;\nwin 1;\nlose 2;\n").unwrap_err();
        assert!(matches!(err, Error::InvalidArena(_)));
        let err =
            parse_ssg("ssg 3;\n0 R 1:1/2 2:1/2;\n1 E 1;\n2 A 0;\nwin 1;\nlose 2;\n").unwrap_err();
        assert!(matches!(err, Error::InvalidArena(_)));
    }

    #[test]
    fn ssg_reduced_game_round_trip() {
        use crate::reduction::reduce_parity_to_ssg;
        let game = parse_parity("parity 1;\n0 0 0 0,1;\n1 1 1 0;\n").unwrap();
        let (ssg, ..) = reduce_parity_to_ssg(&game.arena, &game.priorities).unwrap();
        let text = print_ssg(&ssg);
        let reparsed = parse_ssg(&text).unwrap();
        assert_eq!(reparsed.arena, ssg.arena);
        assert_eq!(print_ssg(&reparsed), text);
    }
}
