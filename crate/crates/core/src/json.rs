//! JSON entry points with path-qualified schema errors.

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::{Error, Result};

/// Parses `text`, naming the offending JSON path on failure.
pub fn from_str<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::schema(if path.is_empty() { ".".into() } else { path }, e.into_inner().to_string())
    })
}

/// Pretty JSON with a trailing newline. Output is deterministic: every map
/// in the crate's documents is ordered.
pub fn to_string<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| Error::schema(".", e.to_string()))?;
    s.push('\n');
    Ok(s)
}
