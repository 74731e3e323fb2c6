//! Line-oriented text format for embedded weighted graphs.
//!
//! ```text
//! # figure-eight on the torus
//! surface counterclockwise
//! vertex v : h1 h2 h1' h2'
//! edge 1 : h1 h1' weight x1
//! edge 2 : h2 h2'
//! coord v : 0 0
//! ```
//!
//! Weights are variable names, exact rationals or `a+b*I`; an omitted weight
//! is the variable `x<EID>`.

use std::collections::HashMap;
use std::fmt::Write as _;

use isingkw::combmap::{CombMap, Point, VarTable, Weight};
use isingkw::exactalg::GaussRat;
use num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

/// A parsed map together with the names used in the file.
#[derive(Clone, Debug)]
pub struct MapFile {
    pub map: CombMap,
    pub vertex_names: Vec<String>,
    pub edge_names: Vec<String>,
    pub half_names: Vec<String>,
}

#[derive(Clone, Copy)]
struct Pos {
    line: usize,
    col: usize,
}

struct Tok<'a> {
    text: &'a str,
    pos: Pos,
}

fn err(pos: Pos, msg: impl Into<String>) -> ParseError {
    ParseError { line: pos.line, col: pos.col, msg: msg.into() }
}

fn tokens(line: &str, lineno: usize) -> Vec<Tok<'_>> {
    let body = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    let col_of = |b: usize| body[..b].chars().count() + 1;
    for (b, c) in body.char_indices() {
        if c.is_whitespace() || c == ':' {
            if let Some(s) = start.take() {
                out.push(Tok { text: &body[s..b], pos: Pos { line: lineno, col: col_of(s) } });
            }
            if c == ':' {
                out.push(Tok { text: &body[b..b + 1], pos: Pos { line: lineno, col: col_of(b) } });
            }
        } else if start.is_none() {
            start = Some(b);
        }
    }
    if let Some(s) = start {
        out.push(Tok { text: &body[s..], pos: Pos { line: lineno, col: col_of(s) } });
    }
    out
}

fn is_identifier(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_alphabetic() || c == '_')
        && cs.all(|c| c.is_alphanumeric() || c == '_' || c == '\'')
}

fn parse_rational(t: &Tok<'_>) -> Result<BigRational, ParseError> {
    let g: GaussRat = t.text.parse().map_err(|_| err(t.pos, format!("expected a rational, found `{}`", t.text)))?;
    if !g.is_real() {
        return Err(err(t.pos, "coordinates must be real"));
    }
    Ok(g.re)
}

enum WeightText {
    Var(String),
    Const(GaussRat),
}

fn parse_weight(t: &Tok<'_>) -> Result<WeightText, ParseError> {
    if let Ok(g) = t.text.parse::<GaussRat>() {
        return Ok(WeightText::Const(g));
    }
    if is_identifier(t.text) {
        return Ok(WeightText::Var(t.text.to_string()));
    }
    Err(err(t.pos, format!("invalid weight `{}`", t.text)))
}

fn expect_colon<'a>(toks: &'a [Tok<'a>], k: usize, after: Pos) -> Result<(), ParseError> {
    match toks.get(k) {
        Some(t) if t.text == ":" => Ok(()),
        Some(t) => Err(err(t.pos, format!("expected `:`, found `{}`", t.text))),
        None => Err(err(after, "expected `:`")),
    }
}

struct EdgeLine<'a> {
    name: &'a str,
    halves: [&'a Tok<'a>; 2],
    weight: Option<&'a Tok<'a>>,
    pos: Pos,
}

/// Parses a map file; every error carries a line and column.
pub fn parse_map(text: &str) -> Result<MapFile, ParseError> {
    let lines: Vec<Vec<Tok<'_>>> = text.lines().enumerate().map(|(i, l)| tokens(l, i + 1)).collect();
    let mut vertex_lines: Vec<(&Tok<'_>, Vec<&Tok<'_>>)> = Vec::new();
    let mut edge_lines: Vec<EdgeLine<'_>> = Vec::new();
    let mut coord_lines: Vec<(&Tok<'_>, &Tok<'_>, &Tok<'_>)> = Vec::new();
    for toks in &lines {
        let Some(head) = toks.first() else { continue };
        match head.text {
            "surface" => match toks.get(1) {
                Some(t) if t.text == "counterclockwise" && toks.len() == 2 => {}
                Some(t) => return Err(err(t.pos, "only `surface counterclockwise` is supported")),
                None => return Err(err(head.pos, "expected `counterclockwise` after `surface`")),
            },
            "vertex" => {
                let name = toks.get(1).filter(|t| t.text != ":").ok_or_else(|| err(head.pos, "missing vertex id"))?;
                expect_colon(toks, 2, name.pos)?;
                vertex_lines.push((name, toks[3..].iter().collect()));
            }
            "edge" => {
                let name = toks.get(1).filter(|t| t.text != ":").ok_or_else(|| err(head.pos, "missing edge id"))?;
                expect_colon(toks, 2, name.pos)?;
                let rest = &toks[3..];
                if rest.len() < 2 {
                    return Err(err(head.pos, "an edge needs two half-edges"));
                }
                let weight = match rest.len() {
                    2 => None,
                    4 if rest[2].text == "weight" => Some(&rest[3]),
                    _ => return Err(err(rest[2].pos, "expected `weight W` after the half-edges")),
                };
                edge_lines.push(EdgeLine { name: name.text, halves: [&rest[0], &rest[1]], weight, pos: head.pos });
            }
            "coord" => {
                let name = toks.get(1).filter(|t| t.text != ":").ok_or_else(|| err(head.pos, "missing vertex id"))?;
                expect_colon(toks, 2, name.pos)?;
                if toks.len() != 5 {
                    return Err(err(head.pos, "expected `coord VID : X Y`"));
                }
                coord_lines.push((name, &toks[3], &toks[4]));
            }
            other => return Err(err(head.pos, format!("unknown keyword `{other}`"))),
        }
    }

    let mut vertex_id: HashMap<&str, usize> = HashMap::new();
    for (k, (name, _)) in vertex_lines.iter().enumerate() {
        if vertex_id.insert(name.text, k).is_some() {
            return Err(err(name.pos, format!("duplicate vertex id `{}`", name.text)));
        }
    }
    let mut edge_seen: HashMap<&str, usize> = HashMap::new();
    let mut half_id: HashMap<&str, usize> = HashMap::new();
    let mut half_names = Vec::new();
    for (k, e) in edge_lines.iter().enumerate() {
        if edge_seen.insert(e.name, k).is_some() {
            return Err(err(e.pos, format!("duplicate edge id `{}`", e.name)));
        }
        for (s, t) in e.halves.iter().enumerate() {
            if half_id.insert(t.text, 2 * k + s).is_some() {
                return Err(err(t.pos, format!("half-edge `{}` appears in two edges", t.text)));
            }
            half_names.push(t.text.to_string());
        }
    }
    let mut placed: Vec<Option<Pos>> = vec![None; half_names.len()];
    let mut rotations = Vec::with_capacity(vertex_lines.len());
    for (_, hs) in &vertex_lines {
        let mut rot = Vec::with_capacity(hs.len());
        for t in hs {
            let &h = half_id.get(t.text).ok_or_else(|| err(t.pos, format!("dangling half-edge `{}`", t.text)))?;
            if placed[h].is_some() {
                return Err(err(t.pos, format!("half-edge `{}` appears at two vertices", t.text)));
            }
            placed[h] = Some(t.pos);
            rot.push(h);
        }
        rotations.push(rot);
    }
    for (h, p) in placed.iter().enumerate() {
        if p.is_none() {
            let e = &edge_lines[h / 2];
            let t = e.halves[h % 2];
            return Err(err(t.pos, format!("half-edge `{}` is not at any vertex", t.text)));
        }
    }

    let mut vars = VarTable::new();
    let mut weights = Vec::with_capacity(edge_lines.len());
    for e in &edge_lines {
        let w = match e.weight {
            None => Weight::Var(vars.intern(&format!("x{}", e.name))),
            Some(t) => match parse_weight(t)? {
                WeightText::Var(name) => Weight::Var(vars.intern(&name)),
                WeightText::Const(c) => Weight::Const(c),
            },
        };
        weights.push(w);
    }
    let first_pos = lines.iter().flatten().next().map(|t| t.pos).unwrap_or(Pos { line: 1, col: 1 });
    let mut map = CombMap::new(rotations, weights, vars).map_err(|e| err(first_pos, e.to_string()))?;

    if !coord_lines.is_empty() {
        let mut coords: Vec<Option<Point>> = vec![None; vertex_lines.len()];
        for (name, x, y) in &coord_lines {
            let &v = vertex_id.get(name.text).ok_or_else(|| err(name.pos, format!("unknown vertex `{}`", name.text)))?;
            if coords[v].is_some() {
                return Err(err(name.pos, format!("duplicate coordinates for `{}`", name.text)));
            }
            coords[v] = Some((parse_rational(x)?, parse_rational(y)?));
        }
        let coords: Vec<Point> = coords
            .into_iter()
            .enumerate()
            .map(|(v, c)| c.ok_or_else(|| err(vertex_lines[v].0.pos, format!("vertex `{}` has no coordinates", vertex_lines[v].0.text))))
            .collect::<Result<_, _>>()?;
        let pos = coord_lines[0].0.pos;
        map = map.with_coords(coords).map_err(|e| err(pos, e.to_string()))?;
    }

    Ok(MapFile {
        map,
        vertex_names: vertex_lines.iter().map(|(n, _)| n.text.to_string()).collect(),
        edge_names: edge_lines.iter().map(|e| e.name.to_string()).collect(),
        half_names,
    })
}

fn rat_text(q: &BigRational) -> String {
    GaussRat::real(q.clone()).to_string()
}

/// Writes a map back in the file format.
pub fn serialize_map(f: &MapFile) -> String {
    let m = &f.map;
    let mut s = String::from("surface counterclockwise\n");
    for v in 0..m.n_vertices() {
        let hs: Vec<&str> = m.rotation(v).iter().map(|&h| f.half_names[h].as_str()).collect();
        let _ = writeln!(s, "vertex {} : {}", f.vertex_names[v], hs.join(" "));
    }
    for e in 0..m.n_edges() {
        let w = match m.weight(e) {
            Weight::Var(v) => m.var_name(*v),
            Weight::Const(c) => c.to_string(),
        };
        let _ = writeln!(s, "edge {} : {} {} weight {w}", f.edge_names[e], f.half_names[2 * e], f.half_names[2 * e + 1]);
    }
    if let Some(cs) = m.coords() {
        for (v, (x, y)) in cs.iter().enumerate() {
            let _ = writeln!(s, "coord {} : {} {}", f.vertex_names[v], rat_text(x), rat_text(y));
        }
    }
    s
}

/// Wraps a generated map with default names `v<i>`, `<k+1>`, `h<k+1>`/`h<k+1>'`.
pub fn from_map(map: CombMap) -> MapFile {
    let vertex_names = (0..map.n_vertices()).map(|v| format!("v{v}")).collect();
    let edge_names = (0..map.n_edges()).map(|e| format!("{}", e + 1)).collect();
    let half_names = (0..map.n_half_edges())
        .map(|h| if h % 2 == 0 { format!("h{}", h / 2 + 1) } else { format!("h{}'", h / 2 + 1) })
        .collect();
    MapFile { map, vertex_names, edge_names, half_names }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG8: &str = "# planar figure-eight\nsurface counterclockwise\nvertex v : h1 h1' h2 h2'\nedge 1 : h1 h1'\nedge 2 : h2 h2'\n";

    #[test]
    fn figure_eight_parses() {
        let f = parse_map(FIG8).unwrap();
        assert_eq!(f.map.genus(), 0);
        assert_eq!(f.map.var_name(0), "x1");
    }

    #[test]
    fn half_edge_in_two_edges() {
        let e = parse_map("vertex v : a b\nedge 1 : a b\nedge 2 : a b\n").unwrap_err();
        assert_eq!((e.line, e.col), (3, 10));
    }

    #[test]
    fn dangling_half_edge() {
        let e = parse_map("vertex v : a b c\nedge 1 : a b\n").unwrap_err();
        assert!(e.msg.contains("dangling"));
        assert_eq!((e.line, e.col), (1, 16));
    }

    #[test]
    fn weights() {
        let f = parse_map("vertex v : a b c d\nedge 1 : a b weight 1/2-3*I\nedge 2 : c d weight beta\n").unwrap();
        assert_eq!(f.map.weight(0), &Weight::Const(GaussRat::new(
            BigRational::new(1.into(), 2.into()),
            BigRational::from_integer((-3).into()),
        )));
        assert_eq!(f.map.var_name(0), "beta");
        assert!(parse_map("vertex v : a b\nedge 1 : a b weight 1+\n").is_err());
    }

    #[test]
    fn round_trip() {
        let f = parse_map(FIG8).unwrap();
        let g = parse_map(&serialize_map(&f)).unwrap();
        assert_eq!(g.map.rotations(), f.map.rotations());
        assert_eq!(g.map.weights(), f.map.weights());
        assert_eq!(serialize_map(&g), serialize_map(&f));
    }

    #[test]
    fn coordinates_are_checked() {
        let good = "vertex a : p\nvertex b : q\nedge 1 : p q\ncoord a : 0 0\ncoord b : 1 1/2\n";
        assert!(parse_map(good).unwrap().map.coords().is_some());
        let clash = "vertex a : p\nvertex b : q\nedge 1 : p q\ncoord a : 0 0\ncoord b : 0 0\n";
        assert!(parse_map(clash).unwrap_err().msg.contains("coincident"));
    }

    #[test]
    fn unknown_keyword() {
        let e = parse_map("vertex v : a b\n  loop 1 : a b\n").unwrap_err();
        assert_eq!((e.line, e.col), (2, 3));
    }
}
