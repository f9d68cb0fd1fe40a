//! PACE `.td` text format. Vertex and bag ids are 1-based in the file.

use std::fmt::Write as _;

use thiserror::Error;

use super::decomposition::TreeDecomposition;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TdFormatError {
    #[error("missing `s td` header")]
    MissingHeader,
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("header declares {declared} bags but {found} were listed")]
    BagCount { declared: usize, found: usize },
}

/// Parsed `.td` file: the decomposition (0-based ids, width as claimed by the
/// header) and the declared vertex count.
#[derive(Clone, Debug)]
pub struct TdFile {
    pub decomposition: TreeDecomposition,
    pub num_vertices: usize,
}

pub fn write_td(td: &TreeDecomposition, num_vertices: usize) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "s td {} {} {}", td.num_nodes(), td.width() + 1, num_vertices);
    for (i, bag) in td.bags().iter().enumerate() {
        let _ = write!(out, "b {}", i + 1);
        for v in bag {
            let _ = write!(out, " {}", v + 1);
        }
        out.push('\n');
    }
    for &(a, b) in td.tree_edges() {
        let _ = writeln!(out, "{} {}", a + 1, b + 1);
    }
    out
}

pub fn parse_td(text: &str) -> Result<TdFile, TdFormatError> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut bags: Vec<Option<Vec<usize>>> = Vec::new();
    let mut edges = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let ln = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let nums = |toks: &[&str]| -> Result<Vec<usize>, TdFormatError> {
            toks.iter()
                .map(|t| {
                    t.parse::<usize>().map_err(|_| TdFormatError::Malformed {
                        line: ln,
                        msg: format!("`{t}` is not a number"),
                    })
                })
                .collect()
        };
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks[0] {
            "s" => {
                if toks.len() != 5 || toks[1] != "td" {
                    return Err(TdFormatError::Malformed {
                        line: ln,
                        msg: "expected `s td <bags> <max bag size> <vertices>`".into(),
                    });
                }
                let v = nums(&toks[2..])?;
                header = Some((v[0], v[1], v[2]));
                bags = vec![None; v[0]];
            }
            "b" => {
                let (count, _, n) = header.ok_or(TdFormatError::MissingHeader)?;
                let v = nums(&toks[1..])?;
                let id = *v.first().ok_or_else(|| TdFormatError::Malformed {
                    line: ln,
                    msg: "bag line without an id".into(),
                })?;
                if id == 0 || id > count {
                    return Err(TdFormatError::Malformed {
                        line: ln,
                        msg: format!("bag id {id} out of range"),
                    });
                }
                if let Some(&bad) = v[1..].iter().find(|&&x| x == 0 || x > n) {
                    return Err(TdFormatError::Malformed {
                        line: ln,
                        msg: format!("vertex {bad} out of range"),
                    });
                }
                bags[id - 1] = Some(v[1..].iter().map(|x| x - 1).collect());
            }
            _ => {
                let (count, _, _) = header.ok_or(TdFormatError::MissingHeader)?;
                let v = nums(&toks)?;
                if v.len() != 2 || v.iter().any(|&x| x == 0 || x > count) {
                    return Err(TdFormatError::Malformed {
                        line: ln,
                        msg: "expected a tree edge `i j`".into(),
                    });
                }
                edges.push((v[0] - 1, v[1] - 1));
            }
        }
    }
    let (count, max_bag, num_vertices) = header.ok_or(TdFormatError::MissingHeader)?;
    let found = bags.iter().filter(|b| b.is_some()).count();
    if found != count {
        return Err(TdFormatError::BagCount { declared: count, found });
    }
    let bags = bags.into_iter().map(Option::unwrap).collect();
    let decomposition = TreeDecomposition::new(bags, edges).with_claimed_width(max_bag.saturating_sub(1));
    Ok(TdFile {
        decomposition,
        num_vertices,
    })
}
