//! Ticket request grammar: `MOVA|from|to|date|class|passenger`.

use std::fmt;

use chrono::NaiveDate;
use mova_core::MAX_TICKET_LEN;

use crate::error::{ClientError, Result};

pub const SENTINEL: &str = "MOVA";
pub const SEPARATOR: char = '|';
/// Room left for the message once the space and four signature characters
/// are appended.
pub const MAX_RENDERED_LEN: usize = MAX_TICKET_LEN - 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TravelClass {
    First,
    Second,
}

impl TravelClass {
    pub fn from_number(n: u8) -> Result<Self> {
        match n {
            1 => Ok(Self::First),
            2 => Ok(Self::Second),
            _ => Err(ClientError::InvalidRequest(format!("travel class must be 1 or 2, got {n}"))),
        }
    }

    pub fn number(self) -> u8 {
        match self {
            Self::First => 1,
            Self::Second => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TicketRequest {
    from: String,
    to: String,
    date: NaiveDate,
    class: TravelClass,
    passenger: String,
}

impl TicketRequest {
    pub fn new(
        from: impl Into<String>,
        to: impl Into<String>,
        date: NaiveDate,
        class: TravelClass,
        passenger: impl Into<String>,
    ) -> Result<Self> {
        let req = Self { from: from.into(), to: to.into(), date, class, passenger: passenger.into() };
        for (name, value) in [("from", &req.from), ("to", &req.to), ("passenger", &req.passenger)] {
            check_field(name, value)?;
        }
        let len = req.render().len();
        if len > MAX_RENDERED_LEN {
            return Err(ClientError::InvalidRequest(format!(
                "rendered ticket text is {len} characters, limit is {MAX_RENDERED_LEN}"
            )));
        }
        Ok(req)
    }

    pub fn parse_date(text: &str) -> Result<NaiveDate> {
        NaiveDate::parse_from_str(text, "%Y-%m-%d")
            .map_err(|_| ClientError::InvalidRequest(format!("date {text:?} is not YYYY-MM-DD")))
    }

    pub fn from(&self) -> &str {
        &self.from
    }

    pub fn to(&self) -> &str {
        &self.to
    }

    pub fn date(&self) -> NaiveDate {
        self.date
    }

    pub fn class(&self) -> TravelClass {
        self.class
    }

    pub fn passenger(&self) -> &str {
        &self.passenger
    }

    pub fn render(&self) -> String {
        format!(
            "{SENTINEL}|{}|{}|{}|{}|{}",
            self.from,
            self.to,
            self.date.format("%Y-%m-%d"),
            self.class.number(),
            self.passenger
        )
    }

    pub fn parse(text: &str) -> Result<Self> {
        let bad = || ClientError::InvalidRequest(format!("not a ticket message: {text:?}"));
        let parts: Vec<&str> = text.split(SEPARATOR).collect();
        let [sentinel, from, to, date, class, passenger] = parts[..] else { return Err(bad()) };
        if sentinel != SENTINEL {
            return Err(bad());
        }
        let class: u8 = class.parse().map_err(|_| bad())?;
        let req = Self::new(from, to, Self::parse_date(date)?, TravelClass::from_number(class)?, passenger)?;
        if req.render() != text {
            return Err(bad());
        }
        Ok(req)
    }
}

impl fmt::Display for TicketRequest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

fn check_field(name: &str, value: &str) -> Result<()> {
    let err = |why: &str| Err(ClientError::InvalidRequest(format!("{name} {why}")));
    if value.is_empty() {
        return err("is empty");
    }
    if value.trim() != value {
        return err("has leading or trailing spaces");
    }
    if !value.chars().all(|c| c.is_ascii_graphic() || c == ' ') {
        return err("must be printable ASCII");
    }
    if value.contains(SEPARATOR) {
        return err("must not contain '|'");
    }
    Ok(())
}
