use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

/// Files written by one command. Unless [`Artifacts::commit`] runs, every
/// file (and any directory it created) is removed on drop.
pub struct Artifacts {
    dir: PathBuf,
    seed: u64,
    files: Vec<PathBuf>,
    dirs: Vec<PathBuf>,
    committed: bool,
}

impl Artifacts {
    pub fn new(dir: &Path, seed: u64) -> Result<Self> {
        let mut a = Artifacts { dir: dir.to_path_buf(), seed, files: Vec::new(), dirs: Vec::new(), committed: false };
        a.ensure_dir(dir)?;
        Ok(a)
    }

    fn ensure_dir(&mut self, dir: &Path) -> Result<()> {
        if !dir.exists() {
            std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            self.dirs.push(dir.to_path_buf());
        }
        Ok(())
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn create(&mut self, name: &str) -> Result<(PathBuf, BufWriter<File>)> {
        let path = self.path(name);
        if let Some(parent) = path.parent() {
            self.ensure_dir(parent)?;
        }
        let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        self.files.push(path.clone());
        Ok((path, BufWriter::new(file)))
    }

    /// A CSV artifact: a `# seed=` line, then whatever `body` writes.
    pub fn csv<F>(&mut self, name: &str, body: F) -> Result<PathBuf>
    where
        F: FnOnce(&mut dyn Write) -> Result<()>,
    {
        let seed = self.seed;
        let (path, mut w) = self.create(name)?;
        writeln!(w, "# seed={seed}")?;
        body(&mut w).with_context(|| format!("writing {}", path.display()))?;
        w.flush()?;
        Ok(path)
    }

    pub fn json<T: serde::Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf> {
        let (path, mut w) = self.create(name)?;
        serde_json::to_writer_pretty(&mut w, value)?;
        writeln!(w)?;
        w.flush()?;
        Ok(path)
    }

    /// Register a file some other writer produced.
    pub fn adopt(&mut self, path: PathBuf) {
        self.files.push(path);
    }

    pub fn commit(mut self) -> Vec<PathBuf> {
        self.committed = true;
        std::mem::take(&mut self.files)
    }
}

impl Drop for Artifacts {
    fn drop(&mut self) {
        if self.committed {
            return;
        }
        for f in &self.files {
            let _ = std::fs::remove_file(f);
        }
        for d in self.dirs.iter().rev() {
            let _ = std::fs::remove_dir(d);
        }
    }
}

/// CSV reader that skips `#` header lines.
pub fn csv_reader(path: &Path) -> Result<csv::Reader<File>> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .with_context(|| format!("opening {}", path.display()))
}
