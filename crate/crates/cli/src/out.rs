use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use image::codecs::png::PngEncoder;
use image::{ExtendedColorType, ImageEncoder};
use tempfile::NamedTempFile;

fn parent(path: &Path) -> PathBuf {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    }
}

/// Fails unless a file can be created next to `path`.
pub fn check_writable(path: &Path) -> Result<(), String> {
    let dir = parent(path);
    NamedTempFile::new_in(&dir)
        .map(drop)
        .map_err(|e| format!("cannot write to {}: {e}", dir.display()))
}

/// An output file staged in memory and written in one rename.
pub struct Artifact {
    pub path: PathBuf,
    pub bytes: Vec<u8>,
}

pub fn commit(artifacts: Vec<Artifact>) -> Result<(), String> {
    let mut staged = Vec::with_capacity(artifacts.len());
    for a in &artifacts {
        let mut tmp = NamedTempFile::new_in(parent(&a.path)).map_err(|e| e.to_string())?;
        tmp.write_all(&a.bytes).map_err(|e| e.to_string())?;
        tmp.as_file().sync_all().map_err(|e| e.to_string())?;
        staged.push((tmp, &a.path));
    }
    for (tmp, path) in staged {
        tmp.persist(path).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    Ok(())
}

pub fn png(rgb: &[u8], n: usize) -> Result<Vec<u8>, String> {
    let mut out = Vec::new();
    PngEncoder::new(&mut out)
        .write_image(rgb, n as u32, n as u32, ExtendedColorType::Rgb8)
        .map_err(|e| e.to_string())?;
    Ok(out)
}

/// PPM bytes, or PNG when the path ends in `.png`.
pub fn image_artifact(path: &Path, ppm: Vec<u8>, rgb: &[u8], n: usize) -> Result<Artifact, String> {
    let is_png = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("png"));
    let bytes = if is_png { png(rgb, n)? } else { ppm };
    Ok(Artifact { path: path.to_path_buf(), bytes })
}

pub fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}
