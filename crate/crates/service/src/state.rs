use std::collections::HashMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use sudoku_audit_core::ledger::replay_text;
use sudoku_audit_core::Workbench;
use uuid::Uuid;

pub struct Session {
    pub id: String,
    pub wb: Workbench,
}

pub type SharedSession = Arc<Mutex<Session>>;

/// Every live session, plus the directory their ledgers are written to.
pub struct AppState {
    sessions: RwLock<HashMap<String, SharedSession>>,
    store: Option<Store>,
}

impl AppState {
    pub fn in_memory() -> Self {
        AppState {
            sessions: RwLock::new(HashMap::new()),
            store: None,
        }
    }

    /// Creates `dir` if needed and restores every ledger in it by replay.
    /// Ledgers that fail to replay are logged and left on disk untouched.
    pub fn with_data_dir(dir: impl Into<PathBuf>) -> io::Result<Self> {
        let store = Store { dir: dir.into() };
        fs::create_dir_all(&store.dir)?;
        let mut sessions = HashMap::new();
        for (id, wb) in store.load_all()? {
            sessions.insert(id.clone(), Arc::new(Mutex::new(Session { id, wb })));
        }
        Ok(AppState {
            sessions: RwLock::new(sessions),
            store: Some(store),
        })
    }

    pub fn session_count(&self) -> usize {
        self.sessions.read().expect("session table poisoned").len()
    }

    pub fn get(&self, id: &str) -> Option<SharedSession> {
        self.sessions
            .read()
            .expect("session table poisoned")
            .get(id)
            .cloned()
    }

    pub fn insert(&self, wb: Workbench) -> io::Result<SharedSession> {
        let id = Uuid::new_v4().to_string();
        let session = Session { id: id.clone(), wb };
        self.persist(&session)?;
        let shared = Arc::new(Mutex::new(session));
        self.sessions
            .write()
            .expect("session table poisoned")
            .insert(id, shared.clone());
        Ok(shared)
    }

    /// Writes the session's ledger. Callers hold the session lock, so
    /// writes for one session never interleave.
    pub fn persist(&self, session: &Session) -> io::Result<()> {
        match &self.store {
            Some(store) => store.save(&session.id, &session.wb.ledger().to_text()),
            None => Ok(()),
        }
    }
}

struct Store {
    dir: PathBuf,
}

impl Store {
    fn path(&self, id: &str) -> PathBuf {
        self.dir.join(format!("{id}.ledger"))
    }

    fn save(&self, id: &str, text: &str) -> io::Result<()> {
        let tmp = self.dir.join(format!(".{id}.ledger.tmp"));
        fs::write(&tmp, text)?;
        fs::rename(&tmp, self.path(id))
    }

    fn load_all(&self) -> io::Result<Vec<(String, Workbench)>> {
        let mut loaded = Vec::new();
        for entry in fs::read_dir(&self.dir)? {
            let path = entry?.path();
            let Some(id) = session_id(&path) else {
                continue;
            };
            let restored = fs::read_to_string(&path)
                .map_err(|e| e.to_string())
                .and_then(|text| replay_text(&text).map_err(|e| e.to_string()));
            match restored {
                Ok(wb) => loaded.push((id, wb)),
                Err(e) => tracing::warn!(path = %path.display(), "skipping ledger: {e}"),
            }
        }
        Ok(loaded)
    }
}

fn session_id(path: &Path) -> Option<String> {
    if path.extension()? != "ledger" {
        return None;
    }
    let stem = path.file_stem()?.to_str()?;
    Uuid::parse_str(stem).ok().map(|u| u.to_string())
}
