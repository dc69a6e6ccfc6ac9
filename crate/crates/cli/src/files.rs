//! Line-oriented plant and controller files.
//!
//! ```text
//! # comment
//! num: 0.094 20 2.4e3 3.5e5
//! den: 1.2e-3 2.8 2e3 3.9e5 8.7e7 6.4e9 6.4e11
//! ```
//!
//! or, with roots entered as `re` or `re±im` (`+-` also accepted):
//!
//! ```text
//! zeros: -187 -16±141i
//! poles: -35.5±112.2i -48.4±168.6i -1082.8±281.9i
//! gain: 78.3
//! ```

use std::collections::BTreeMap;

use monotrack_core::{Controller, ControllerStructure, Plant, Polynomial, RootSet};

use crate::error::{CliError, Result};
use crate::report::real;

struct Entry {
    line: usize,
    value: String,
}

/// `key: value` lines with comments and blanks removed. Keys must be in
/// `allowed` and may appear once.
fn entries(text: &str, allowed: &[&str]) -> Result<BTreeMap<String, Entry>> {
    let mut out: BTreeMap<String, Entry> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let Some((key, value)) = body.split_once(':') else {
            return Err(CliError::Parse {
                line,
                msg: format!("expected `key: values`, got `{body}`"),
            });
        };
        let key = key.trim();
        if !allowed.contains(&key) {
            return Err(CliError::Parse {
                line,
                msg: format!(
                    "unknown key `{key}` (expected one of {})",
                    allowed.join(", ")
                ),
            });
        }
        if let Some(prev) = out.get(key) {
            return Err(CliError::Parse {
                line,
                msg: format!("`{key}` already given on line {}", prev.line),
            });
        }
        out.insert(
            key.to_string(),
            Entry {
                line,
                value: value.trim().to_string(),
            },
        );
    }
    Ok(out)
}

fn number(tok: &str, line: usize) -> Result<f64> {
    let v: f64 = tok.parse().map_err(|_| CliError::Parse {
        line,
        msg: format!("`{tok}` is not a number"),
    })?;
    if !v.is_finite() {
        return Err(CliError::Parse {
            line,
            msg: format!("`{tok}` is not finite"),
        });
    }
    Ok(v)
}

fn coefficients(e: &Entry, key: &str) -> Result<Polynomial> {
    let c = e
        .value
        .split_whitespace()
        .map(|t| number(t, e.line))
        .collect::<Result<Vec<_>>>()?;
    if c.is_empty() {
        return Err(CliError::Parse {
            line: e.line,
            msg: format!("`{key}` needs at least one coefficient"),
        });
    }
    Ok(Polynomial::new(c))
}

fn scalar(e: &Entry, key: &str) -> Result<f64> {
    let toks: Vec<&str> = e.value.split_whitespace().collect();
    match toks.as_slice() {
        [t] => number(t, e.line),
        _ => Err(CliError::Parse {
            line: e.line,
            msg: format!("`{key}` takes a single number"),
        }),
    }
}

/// Joins `-16 ± 141i` into one token and normalizes `+-` and U+2212.
fn root_tokens(s: &str) -> Vec<String> {
    let mut s = s.replace('\u{2212}', "-").replace("+-", "±");
    loop {
        let next = s.replace(" ±", "±").replace("± ", "±");
        if next == s {
            break;
        }
        s = next;
    }
    s.split_whitespace().map(str::to_string).collect()
}

fn roots(e: &Entry) -> Result<RootSet> {
    let mut set = RootSet::new();
    for tok in root_tokens(&e.value) {
        match tok.split_once('±') {
            Some((re, im)) => {
                let im = im.trim_end_matches(['i', 'j']);
                let (re, im) = (number(re, e.line)?, number(im, e.line)?);
                if im == 0.0 {
                    return Err(CliError::Parse {
                        line: e.line,
                        msg: format!("`{tok}` has zero imaginary part; write it as a real root"),
                    });
                }
                set.push_pair(re, im.abs(), 1);
            }
            None => {
                if tok.ends_with(['i', 'j']) {
                    return Err(CliError::Parse {
                        line: e.line,
                        msg: format!("`{tok}`: complex roots come in pairs, write `re±im`"),
                    });
                }
                set.push_real(number(&tok, e.line)?, 1);
            }
        }
    }
    set.sort();
    Ok(set)
}

/// Either `num` + `den`, or `poles` + `gain` with optional `zeros`.
pub fn parse_plant(text: &str) -> Result<Plant> {
    let e = entries(text, &["num", "den", "zeros", "poles", "gain"])?;
    let coeff_form = e.contains_key("num") || e.contains_key("den");
    let root_form = ["zeros", "poles", "gain"]
        .iter()
        .any(|k| e.contains_key(*k));
    let last_line = text.lines().count().max(1);
    if coeff_form && root_form {
        let line = e.values().map(|x| x.line).max().unwrap_or(1);
        return Err(CliError::Parse {
            line,
            msg: "give either num/den or zeros/poles/gain, not both".into(),
        });
    }
    if coeff_form {
        let (Some(num), Some(den)) = (e.get("num"), e.get("den")) else {
            let line = e.values().map(|x| x.line).max().unwrap_or(last_line);
            return Err(CliError::Parse {
                line,
                msg: "`num` and `den` must both be given".into(),
            });
        };
        let n = coefficients(num, "num")?;
        let d = coefficients(den, "den")?;
        if d.is_zero() {
            return Err(CliError::Parse {
                line: den.line,
                msg: "denominator is zero".into(),
            });
        }
        if n.is_zero() {
            return Err(CliError::Parse {
                line: num.line,
                msg: "numerator is zero".into(),
            });
        }
        if n.degree() > d.degree() {
            return Err(CliError::Parse {
                line: num.line,
                msg: format!(
                    "improper plant: numerator degree {} > denominator degree {}",
                    n.degree().unwrap_or(0),
                    d.degree().unwrap_or(0)
                ),
            });
        }
        return Ok(Plant::new(n, d)?);
    }
    if !root_form {
        return Err(CliError::Parse {
            line: last_line,
            msg: "no plant given: expected num/den or zeros/poles/gain".into(),
        });
    }
    let (Some(poles), Some(gain)) = (e.get("poles"), e.get("gain")) else {
        let line = e.values().map(|x| x.line).max().unwrap_or(last_line);
        return Err(CliError::Parse {
            line,
            msg: "the root form needs `poles` and `gain` (`zeros` may be omitted)".into(),
        });
    };
    let zeros = match e.get("zeros") {
        Some(z) => roots(z)?,
        None => RootSet::new(),
    };
    let p = roots(poles)?;
    let k = scalar(gain, "gain")?;
    if k == 0.0 {
        return Err(CliError::Parse {
            line: gain.line,
            msg: "gain must be nonzero".into(),
        });
    }
    if zeros.count() > p.count() {
        return Err(CliError::Parse {
            line: poles.line,
            msg: format!(
                "improper plant: {} zeros but {} poles",
                zeros.count(),
                p.count()
            ),
        });
    }
    Ok(Plant::from_zpk(&zeros, &p, k)?)
}

/// A controller and the structure its file declares.
pub struct ControllerFile {
    pub controller: Controller,
    pub declared: Option<ControllerStructure>,
}

pub fn parse_controller(text: &str) -> Result<ControllerFile> {
    let e = entries(text, &["F", "G", "Kc", "structure"])?;
    let last_line = text.lines().count().max(1);
    let get = |k: &str| {
        e.get(k).ok_or_else(|| CliError::Parse {
            line: last_line,
            msg: format!("missing `{k}`"),
        })
    };
    let f = coefficients(get("F")?, "F")?;
    let g_entry = get("G")?;
    let g = coefficients(g_entry, "G")?;
    let kc = scalar(get("Kc")?, "Kc")?;
    let declared = match e.get("structure") {
        None => None,
        Some(s) => Some(match s.value.as_str() {
            "direct" => ControllerStructure::DirectG,
            "alternative" => ControllerStructure::AlternativeG,
            other => {
                return Err(CliError::Parse {
                    line: s.line,
                    msg: format!("structure must be `direct` or `alternative`, got `{other}`"),
                })
            }
        }),
    };
    let controller = Controller::new(f, g, kc).map_err(|err| CliError::Parse {
        line: g_entry.line,
        msg: err.to_string(),
    })?;
    Ok(ControllerFile {
        controller,
        declared,
    })
}

fn coefficient_line(key: &str, p: &Polynomial) -> String {
    let vals: Vec<String> = p.coeffs().iter().map(|&c| real(c)).collect();
    format!("{key}: {}", vals.join(" "))
}

/// Controller file text; coefficients highest power first.
pub fn format_controller(c: &Controller) -> String {
    format!(
        "# u = (Kc r - F y) / G\n{}\n{}\nKc: {}\nstructure: {}\n",
        coefficient_line("F", &c.f),
        coefficient_line("G", &c.g),
        real(c.kc),
        c.structure
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_of(r: Result<Plant>) -> usize {
        match r {
            Err(CliError::Parse { line, .. }) => line,
            Err(e) => panic!("unexpected error {e}"),
            Ok(_) => panic!("parsed"),
        }
    }

    #[test]
    fn coefficient_form() {
        let p = parse_plant("# plant\nnum: 2 4   # 2s + 4\nden: 1 3 2\n").unwrap();
        assert_eq!(p.n_o(), 2);
        assert!((p.gain() - 2.0).abs() < 1e-15);
        assert!((p.zeros().real[0].value + 2.0).abs() < 1e-14);
    }

    #[test]
    fn root_form_with_spaced_pairs() {
        let p = parse_plant("zeros: -187 -16 ± 141i\npoles: -1 -2 -3+-4i\ngain: 3\n").unwrap();
        assert_eq!(p.zeros().count(), 3);
        assert_eq!(p.zeros().complex[0].im, 141.0);
        assert_eq!(p.poles().count(), 4);
        let p = parse_plant("zeros: \u{2212}16\u{b1}141i\npoles: -1 -2 -3\ngain: 1").unwrap();
        assert_eq!(p.zeros().complex[0].re, -16.0);
        let p = parse_plant("poles: -1 -2\ngain: 1").unwrap();
        assert_eq!(p.m(), 0);
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert_eq!(line_of(parse_plant("num: 1\n\nden: 1 x\n")), 3);
        assert_eq!(line_of(parse_plant("num: 1\nnum: 2\nden: 1 1")), 2);
        assert_eq!(line_of(parse_plant("num: 1\nfoo: 2\n")), 2);
        assert_eq!(line_of(parse_plant("num: 1 2 3\nden: 1 1\n")), 1);
        assert_eq!(line_of(parse_plant("num: 1\nden: 1 1\ngain: 2\n")), 3);
        assert_eq!(line_of(parse_plant("poles: -1 2i\ngain: 1\n")), 1);
        assert_eq!(line_of(parse_plant("poles: -1\ngain: 0\n")), 2);
        assert_eq!(
            line_of(parse_plant("zeros: -1\npoles: -1±0i\ngain: 1\n")),
            2
        );
        assert_eq!(line_of(parse_plant("just text\n")), 1);
        assert_eq!(line_of(parse_plant("# nothing\n")), 1);
    }

    #[test]
    fn controller_round_trip() {
        let c = Controller::new(
            Polynomial::new(vec![0.1, -2.0 / 3.0]),
            Polynomial::new(vec![1.0, 1e-17 + 0.3]),
            std::f64::consts::PI,
        )
        .unwrap();
        let back = parse_controller(&format_controller(&c)).unwrap();
        assert_eq!(back.controller, c);
        assert_eq!(back.declared, Some(ControllerStructure::DirectG));
    }

    #[test]
    fn controller_errors() {
        assert!(matches!(
            parse_controller("F: 1\nG: 1 1\n"),
            Err(CliError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_controller("F: 1\nG: 1 1\nKc: 1\nstructure: sideways\n"),
            Err(CliError::Parse { line: 4, .. })
        ));
        assert!(matches!(
            parse_controller("F: 1 2 3\nG: 1 1\nKc: 1\n"),
            Err(CliError::Parse { line: 2, .. })
        ));
    }
}
