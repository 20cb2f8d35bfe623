//! In-memory breeding sessions.
//!
//! Each session sits behind its own mutex, so requests against one session
//! are serialized while different sessions proceed in parallel. Handlers that
//! also touch the store lock the session first.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;
use std::time::{Duration, Instant};

use breeder_core::neat::{MutationConfig, Session};
use parking_lot::Mutex;
use rand_chacha::ChaCha8Rng;

pub const IDLE_TIMEOUT: Duration = Duration::from_secs(24 * 60 * 60);

#[derive(Debug)]
pub struct LiveSession {
    pub session: Session,
    pub selected: BTreeSet<usize>,
    pub rng: ChaCha8Rng,
    pub config: MutationConfig,
    pub last_used: Instant,
}

impl LiveSession {
    pub fn new(session: Session, rng: ChaCha8Rng, config: MutationConfig) -> Self {
        Self {
            session,
            selected: BTreeSet::new(),
            rng,
            config,
            last_used: Instant::now(),
        }
    }
}

pub type SessionHandle = Arc<Mutex<LiveSession>>;

#[derive(Debug)]
pub struct SessionManager {
    sessions: Mutex<HashMap<String, SessionHandle>>,
    idle: Duration,
}

impl Default for SessionManager {
    fn default() -> Self {
        Self::new(IDLE_TIMEOUT)
    }
}

impl SessionManager {
    pub fn new(idle: Duration) -> Self {
        Self {
            sessions: Mutex::new(HashMap::new()),
            idle,
        }
    }

    pub fn insert(&self, live: LiveSession) -> String {
        let id = live.session.id.clone();
        self.evict_idle(Instant::now());
        self.sessions
            .lock()
            .insert(id.clone(), Arc::new(Mutex::new(live)));
        id
    }

    /// Looks up a session and marks it as used.
    pub fn get(&self, id: &str) -> Option<SessionHandle> {
        let handle = self.sessions.lock().get(id).cloned()?;
        handle.lock().last_used = Instant::now();
        Some(handle)
    }

    /// Drops sessions idle for longer than the timeout, returning how many.
    pub fn evict_idle(&self, now: Instant) -> usize {
        let mut map = self.sessions.lock();
        let before = map.len();
        map.retain(|_, s| {
            // a session busy with a request is in use, not idle
            s.try_lock()
                .is_none_or(|s| now.saturating_duration_since(s.last_used) <= self.idle)
        });
        before - map.len()
    }

    pub fn len(&self) -> usize {
        self.sessions.lock().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use breeder_core::neat::InnovationRegistry;
    use breeder_core::Palette;
    use rand::SeedableRng;

    fn live(id: &str) -> LiveSession {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = Session::scratch(
            id,
            Palette::Gray,
            4,
            1,
            &mut InnovationRegistry::new(),
            &mut rng,
        )
        .unwrap();
        LiveSession::new(s, rng, MutationConfig::default())
    }

    #[test]
    fn idle_sessions_are_evicted() {
        let m = SessionManager::new(Duration::from_secs(10));
        m.insert(live("a"));
        m.insert(live("b"));
        m.get("a").unwrap().lock().last_used -= Duration::from_secs(11);
        assert_eq!(m.evict_idle(Instant::now()), 1);
        assert!(m.get("a").is_none());
        assert!(m.get("b").is_some());
    }
}
