//! Text syntax for forms.
//!
//! A form is a sum of terms; each term is a product of scalar factors and
//! coordinate differentials, e.g. `x2*dx1^dx3 - 2*dx2∧dx3`. `^`, `∧`, `*`
//! and `·` may all join factors; a differential is `d` followed by a chart
//! coordinate name. Printing uses `·` and `∧`.

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use super::{CartanError, Chart, KForm};
use crate::symexpr::parse::Parser;
use crate::symexpr::{Poly, Token};

/// One `coefficient · dx^{i₁}∧…∧dx^{i_k}` entry with 1-based indices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormRecord {
    pub indices: Vec<usize>,
    pub coefficient: String,
}

/// A form as it appears in input files: text or a list of records.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FormSpec {
    Text(String),
    Records(Vec<FormRecord>),
}

impl FormSpec {
    /// Resolves against a chart. `degree` is required to type an empty
    /// record list and otherwise checked.
    pub fn to_form(&self, chart: &Chart, degree: Option<usize>) -> Result<KForm, CartanError> {
        let form = match self {
            FormSpec::Text(s) => {
                let f = parse_form(s, chart)?;
                match degree {
                    // "0" parses as a 0-form but is the zero form of any degree
                    Some(k) if f.is_zero() => KForm::zero(chart, k),
                    _ => f,
                }
            }
            FormSpec::Records(recs) => {
                let k = match (recs.first(), degree) {
                    (Some(r), _) => r.indices.len(),
                    (None, Some(k)) => k,
                    (None, None) => 0,
                };
                let mut out = KForm::zero(chart, k);
                for r in recs {
                    if r.indices.len() != k {
                        return Err(CartanError::MixedDegree(k, r.indices.len()));
                    }
                    let mut idx = Vec::with_capacity(k);
                    for &i in &r.indices {
                        if i == 0 || i > chart.dim() {
                            return Err(CartanError::IndexOutOfRange {
                                index: i,
                                dim: chart.dim(),
                            });
                        }
                        idx.push(i - 1);
                    }
                    let c = Poly::parse(&r.coefficient)?;
                    check_vars(&c, chart)?;
                    out.add_term(&idx, c);
                }
                out
            }
        };
        if let Some(k) = degree {
            if form.degree() != k {
                return Err(CartanError::MixedDegree(k, form.degree()));
            }
        }
        if form.degree() > chart.dim() {
            return Err(CartanError::DegreeTooLarge {
                degree: form.degree(),
                dim: chart.dim(),
            });
        }
        Ok(form)
    }

    pub fn records(form: &KForm) -> FormSpec {
        FormSpec::Records(
            form.terms()
                .map(|(idx, c)| FormRecord {
                    indices: idx.iter().map(|i| i + 1).collect(),
                    coefficient: c.to_string(),
                })
                .collect(),
        )
    }
}

fn check_vars(c: &Poly, chart: &Chart) -> Result<(), CartanError> {
    for v in c.free_vars() {
        if !chart.contains(&v) {
            return Err(CartanError::UnknownVariable(v.to_string()));
        }
    }
    Ok(())
}

fn differential(name: &str, chart: &Chart) -> Option<usize> {
    if chart.contains(name) {
        return None;
    }
    name.strip_prefix('d').and_then(|rest| chart.index_of(rest))
}

/// Parses the text syntax against a chart.
pub fn parse_form(src: &str, chart: &Chart) -> Result<KForm, CartanError> {
    let mut p = Parser::new(src)?;
    let mut terms: Vec<(Poly, Vec<usize>)> = Vec::new();
    let mut negate = false;
    match p.peek() {
        Token::Minus => {
            p.bump()?;
            negate = true;
        }
        Token::Plus => {
            p.bump()?;
        }
        _ => {}
    }
    loop {
        let (c, idx) = term(&mut p, chart)?;
        terms.push((if negate { -c } else { c }, idx));
        match p.peek() {
            Token::Plus => negate = false,
            Token::Minus => negate = true,
            Token::End => break,
            t => {
                let msg = format!("unexpected {} at offset {}", crate::symexpr::parse::describe(t), p.offset());
                return Err(CartanError::Syntax(msg));
            }
        }
        p.bump()?;
    }
    let degree = terms.iter().map(|(_, i)| i.len()).max().unwrap_or(0);
    let mut out = KForm::zero(chart, degree);
    for (c, idx) in terms {
        if idx.len() != degree {
            if c.is_zero() {
                continue;
            }
            return Err(CartanError::MixedDegree(degree, idx.len()));
        }
        check_vars(&c, chart)?;
        out.add_term(&idx, c);
    }
    if degree > chart.dim() {
        return Err(CartanError::DegreeTooLarge {
            degree,
            dim: chart.dim(),
        });
    }
    Ok(out)
}

fn term(p: &mut Parser<'_>, chart: &Chart) -> Result<(Poly, Vec<usize>), CartanError> {
    let mut coef = Poly::one();
    let mut idx = Vec::new();
    let mut divide = false;
    loop {
        let diff = match p.peek() {
            Token::Ident(name) => differential(name, chart),
            _ => None,
        };
        match diff {
            Some(i) => {
                if divide {
                    return Err(CartanError::Syntax(format!(
                        "cannot divide by a differential at offset {}",
                        p.offset()
                    )));
                }
                p.bump()?;
                idx.push(i);
            }
            None => {
                let f = Poly::from(&p.unary()?);
                coef = if divide { &coef * &f.reciprocal() } else { &coef * &f };
            }
        }
        divide = false;
        match p.peek() {
            Token::Star | Token::Caret | Token::Wedge => {}
            Token::Slash => divide = true,
            _ => break,
        }
        p.bump()?;
    }
    Ok((coef, idx))
}

/// Standard text for a form. Terms with a positive leading sign come first.
pub(crate) fn print_form(form: &KForm) -> String {
    if form.degree() == 0 {
        return form.coeff(&[]).to_string();
    }
    let chart = form.chart();
    let mut pieces: Vec<(bool, String)> = Vec::new();
    for (idx, c) in form.terms() {
        let basis: Vec<String> = idx.iter().map(|&i| format!("d{}", chart.name(i))).collect();
        let basis = basis.join("∧");
        let negative = c.len() == 1 && c.terms().next().is_some_and(|(_, k)| k.is_negative());
        let mag = if negative { -c } else { c.clone() };
        let body = if mag == Poly::one() {
            basis
        } else if mag.len() > 1 {
            format!("({mag})·{basis}")
        } else {
            format!("{mag}·{basis}")
        };
        pieces.push((negative, body));
    }
    if pieces.is_empty() {
        return "0".into();
    }
    pieces.sort_by_key(|(neg, _)| *neg);
    let mut out = String::new();
    for (i, (neg, body)) in pieces.iter().enumerate() {
        match (i, neg) {
            (0, false) => {}
            (0, true) => out.push('−'),
            (_, false) => out.push_str(" + "),
            (_, true) => out.push_str(" − "),
        }
        out.push_str(body);
    }
    out
}
