//! File formats: TOML state files, CSV grids with a `# {json}` header line,
//! and run manifests.

mod csv;
mod manifest;
mod state;

pub use csv::{
    hybrid_from_csv, hybrid_to_csv, quadrature_from_csv, quadrature_to_csv, spin_from_csv, spin_to_csv, CsvTable,
};
pub use manifest::{sha256_hex, FileRecord, RunManifest};
pub use state::{parse_state, read_state, render_density, StateFile};

/// 1-based line of byte offset `pos` in `text`.
pub(crate) fn line_of(text: &str, pos: usize) -> usize {
    text.as_bytes()[..pos.min(text.len())].iter().filter(|&&b| b == b'\n').count() + 1
}

/// Maps a TOML error onto [`crate::Error::Parse`] with its line number.
pub(crate) fn toml_error(text: &str, e: toml::de::Error) -> crate::Error {
    let line = e.span().map_or(1, |s| line_of(text, s.start));
    crate::Error::parse(line, e.message().to_string())
}
