//! Line-oriented `field=hexvalue` key files.

use std::collections::BTreeMap;

use crate::bits::{pack_bits_raw, unpack_bits_raw};
use crate::keys::{PrivateKey, PublicKey};
use crate::params::DomainParams;
use crate::scalar::ModScalar;
use crate::{MovaError, Result};

/// Ordered `field=hex` records. Blank lines and `#` comments are ignored on parse.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KeyValueFile {
    entries: Vec<(String, String)>,
}

impl KeyValueFile {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        let mut seen = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (field, value) = line
                .split_once('=')
                .ok_or_else(|| MovaError::KeyFile(format!("line {}: expected field=value", lineno + 1)))?;
            let (field, value) = (field.trim(), value.trim());
            if value.is_empty() || !value.bytes().all(|b| b.is_ascii_hexdigit()) {
                return Err(MovaError::KeyFile(format!("line {}: {field} is not hex", lineno + 1)));
            }
            if seen.insert(field.to_owned(), ()).is_some() {
                return Err(MovaError::KeyFile(format!("duplicate field {field}")));
            }
            entries.push((field.to_owned(), value.to_ascii_lowercase()));
        }
        Ok(Self { entries })
    }

    pub fn push_bytes(&mut self, field: &str, bytes: &[u8]) -> &mut Self {
        self.entries.push((field.to_owned(), hex::encode(bytes)));
        self
    }

    pub fn push_uint<T: ModScalar>(&mut self, field: &str, value: &T) -> &mut Self {
        self.push_bytes(field, &value.to_be_bytes())
    }

    pub fn push_u64(&mut self, field: &str, value: u64) -> &mut Self {
        self.entries.push((field.to_owned(), format!("{value:x}")));
        self
    }

    fn raw(&self, field: &str) -> Result<&str> {
        self.entries
            .iter()
            .find(|(f, _)| f == field)
            .map(|(_, v)| v.as_str())
            .ok_or_else(|| MovaError::KeyFile(format!("missing field {field}")))
    }

    pub fn bytes(&self, field: &str) -> Result<Vec<u8>> {
        let raw = self.raw(field)?;
        let padded = if raw.len() % 2 == 1 { format!("0{raw}") } else { raw.to_owned() };
        hex::decode(padded).map_err(|e| MovaError::KeyFile(format!("{field}: {e}")))
    }

    pub fn uint<T: ModScalar>(&self, field: &str) -> Result<T> {
        T::from_be_bytes(&self.bytes(field)?)
            .ok_or_else(|| MovaError::KeyFile(format!("{field} overflows the scalar type")))
    }

    pub fn u64(&self, field: &str) -> Result<u64> {
        u64::from_str_radix(self.raw(field)?, 16).map_err(|e| MovaError::KeyFile(format!("{field}: {e}")))
    }

    pub fn fields(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(f, _)| f.as_str())
    }

    /// Rejects fields outside `allowed`.
    pub fn expect_fields(&self, allowed: &[&str]) -> Result<()> {
        match self.fields().find(|f| !allowed.contains(f)) {
            Some(f) => Err(MovaError::KeyFile(format!("unexpected field {f}"))),
            None => Ok(()),
        }
    }
}

impl std::fmt::Display for KeyValueFile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (field, value) in &self.entries {
            writeln!(f, "{field}={value}")?;
        }
        Ok(())
    }
}

pub const PUBLIC_KEY_FILE: &str = "keyPub.key";
pub const PRIVATE_KEY_FILE: &str = "keyPriv.key";

const PUBLIC_FIELDS: &[&str] = &["n", "d", "k", "ygen", "lkey", "lsig", "icon", "iden"];

impl<T: ModScalar> PublicKey<T> {
    pub fn to_key_file(&self) -> String {
        let mut file = KeyValueFile::new();
        file.push_uint("n", &self.n)
            .push_u64("d", u64::from(self.d()))
            .push_bytes("k", &self.k)
            .push_bytes("ygen", &pack_bits_raw(&self.y_gen))
            .push_u64("lkey", self.params.l_key as u64)
            .push_u64("lsig", self.params.l_sig as u64)
            .push_u64("icon", self.params.i_con as u64)
            .push_u64("iden", self.params.i_den as u64);
        file.to_string()
    }

    /// Parses a public key file; prime size is recovered from the modulus length.
    pub fn from_key_file(text: &str) -> Result<Self> {
        let file = KeyValueFile::parse(text)?;
        file.expect_fields(PUBLIC_FIELDS)?;
        if file.u64("d")? != 2 {
            return Err(MovaError::KeyFile("only d = 2 is supported".into()));
        }
        let n: T = file.uint("n")?;
        let count =
            |field| usize::try_from(file.u64(field)?).map_err(|_| MovaError::KeyFile(format!("{field} too large")));
        let params = DomainParams {
            l_key: count("lkey")?,
            l_sig: count("lsig")?,
            i_con: count("icon")?,
            i_den: count("iden")?,
            modulus_bits: n.bits().div_ceil(2).max(16),
            ..Default::default()
        };
        let y_gen = unpack_bits_raw(&file.bytes("ygen")?, params.l_key)
            .ok_or_else(|| MovaError::KeyFile("ygen length does not match lkey".into()))?;
        PublicKey::new(n, file.bytes("k")?, y_gen, params)
    }
}

impl<T: ModScalar> PrivateKey<T> {
    pub fn to_key_file(&self) -> String {
        let mut file = KeyValueFile::new();
        file.push_uint("p", self.p()).push_uint("q", self.q());
        file.to_string()
    }

    pub fn from_key_file(text: &str) -> Result<Self> {
        let file = KeyValueFile::parse(text)?;
        file.expect_fields(&["p", "q"])?;
        PrivateKey::new(file.uint("p")?, file.uint("q")?)
    }
}
