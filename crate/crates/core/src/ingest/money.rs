//! Rule-based detection of monetary values in tokenized sentences.
//!
//! A token is numeric when it is a run of digits, optionally grouped by
//! thousands commas, with at most one decimal point, optionally wrapped in
//! parentheses (an accounting negative). The scale comes from a scale word in
//! the two tokens after the number, the currency from a symbol or ISO code in
//! the two tokens before it. Bare four-digit years in `[1900, 2100]` and
//! numbers directly followed by `%`/`percent` are not monetary.

use std::sync::LazyLock;

use regex::Regex;
use rust_decimal::Decimal;
use serde::Serialize;

use crate::model::Interval;

const WINDOW: usize = 2;

static NUMERIC: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^(\()?(\d{1,3}(?:,\d{3})+|\d+)(\.\d+)?(\))?$").expect("numeric pattern")
});

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    One,
    Thousand,
    Million,
    Billion,
    Trillion,
}

impl Scale {
    pub fn multiplier(self) -> u64 {
        match self {
            Scale::One => 1,
            Scale::Thousand => 1_000,
            Scale::Million => 1_000_000,
            Scale::Billion => 1_000_000_000,
            Scale::Trillion => 1_000_000_000_000,
        }
    }

    fn from_word(word: &str) -> Option<Self> {
        match word.to_ascii_lowercase().as_str() {
            "thousand" => Some(Scale::Thousand),
            "million" => Some(Scale::Million),
            "billion" => Some(Scale::Billion),
            "trillion" => Some(Scale::Trillion),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Currency {
    #[serde(rename = "USD")]
    Usd,
    #[serde(rename = "EUR")]
    Eur,
    #[serde(rename = "GBP")]
    Gbp,
    #[serde(rename = "unknown")]
    Unknown,
}

impl Currency {
    fn from_marker(token: &str) -> Option<Self> {
        match token {
            "$" | "USD" => Some(Currency::Usd),
            "€" | "EUR" => Some(Currency::Eur),
            "£" | "GBP" => Some(Currency::Gbp),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MonetaryMention {
    /// The numeric token.
    pub value_span: Interval,
    pub numeric_value: Decimal,
    pub scale: Scale,
    pub currency: Currency,
}

impl MonetaryMention {
    /// `numeric_value * scale`.
    pub fn amount(&self) -> Decimal {
        self.numeric_value * Decimal::from(self.scale.multiplier())
    }
}

struct Numeric {
    value: Decimal,
    bare_integer: bool,
}

fn parse_numeric(token: &str) -> Option<Numeric> {
    let caps = NUMERIC.captures(token)?;
    let open = caps.get(1).is_some();
    let close = caps.get(4).is_some();
    if open != close {
        return None;
    }
    let digits: String = caps[2].chars().filter(|c| *c != ',').collect();
    let fraction = caps.get(3).map_or("", |m| m.as_str());
    let mut value: Decimal = format!("{digits}{fraction}").parse().ok()?;
    if open {
        value.set_sign_negative(true);
    }
    Some(Numeric {
        value,
        bare_integer: !open && fraction.is_empty() && !caps[2].contains(','),
    })
}

fn is_numeric(token: &str) -> bool {
    parse_numeric(token).is_some()
}

fn is_percent(token: &str) -> bool {
    token == "%" || token.eq_ignore_ascii_case("percent")
}

fn is_year(token: &str, numeric: &Numeric) -> bool {
    numeric.bare_integer
        && token.len() == 4
        && token
            .parse::<u32>()
            .is_ok_and(|y| (1900..=2100).contains(&y))
}

/// Finds every monetary mention, in token order.
pub fn detect_monetary<S: AsRef<str>>(tokens: &[S]) -> Vec<MonetaryMention> {
    let text = |i: usize| tokens[i].as_ref();
    let mut out = Vec::new();

    for i in 0..tokens.len() {
        let Some(numeric) = parse_numeric(text(i)) else {
            continue;
        };

        let mut currency = None;
        for j in (i.saturating_sub(WINDOW)..i).rev() {
            if is_numeric(text(j)) {
                break;
            }
            if let Some(c) = Currency::from_marker(text(j)) {
                currency = Some(c);
                break;
            }
        }

        if currency.is_none() && is_year(text(i), &numeric) {
            continue;
        }
        if i + 1 < tokens.len() && is_percent(text(i + 1)) {
            continue;
        }

        let mut scale = Scale::One;
        for j in i + 1..(i + 1 + WINDOW).min(tokens.len()) {
            if is_numeric(text(j)) {
                break;
            }
            if let Some(s) = Scale::from_word(text(j)) {
                scale = s;
                break;
            }
        }

        out.push(MonetaryMention {
            value_span: Interval::new(i, i + 1),
            numeric_value: numeric.value,
            scale,
            currency: currency.unwrap_or(Currency::Unknown),
        });
    }
    out
}

/// Indices of the sentences that contain at least one monetary mention.
pub fn filter_monetary_sentences<S: AsRef<str>>(sentences: &[Vec<S>]) -> Vec<usize> {
    sentences
        .iter()
        .enumerate()
        .filter(|(_, tokens)| !detect_monetary(tokens).is_empty())
        .map(|(i, _)| i)
        .collect()
}
