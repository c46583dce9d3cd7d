//! Bundled station list used to validate ticket requests.

const BUNDLED: &str = include_str!("../data/stations.txt");

#[derive(Debug, Clone)]
pub struct Stations {
    names: Vec<String>,
}

impl Stations {
    pub fn bundled() -> Self {
        Self::parse(BUNDLED)
    }

    /// One name per line; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Self {
        let names =
            text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).map(str::to_owned).collect();
        Self { names }
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Canonical spelling of `name`, matched case-insensitively.
    pub fn lookup(&self, name: &str) -> Option<&str> {
        let name = name.trim();
        self.names.iter().find(|n| n.eq_ignore_ascii_case(name)).map(String::as_str)
    }
}
